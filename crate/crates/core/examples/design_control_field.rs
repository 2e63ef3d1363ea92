//! Solves for the counter-propagating control field that removes the two-photon Doppler shift.

use dffwm::designer::{refine_numeric, solve_control_rabi, velocity_samples};
use dffwm::{fig1b_fields, fig1c_fields, Direction, SchemeConfig};

fn main() -> dffwm::Result<()> {
    let s = SchemeConfig::sodium_preset();
    for (name, fields) in [("1b", fig1b_fields(&s)), ("1c", fig1c_fields(&s))] {
        let report = solve_control_rabi(&s, &fields)?;
        println!(
            "{name}: |G23−| = {:.2} MHz after {} iterations, Ω1 = {:.2} MHz, Γ̃02 = {:.3} MHz",
            report.solved_rabi, report.iterations, report.omega1, report.induced_width
        );
        for w in &report.warnings {
            println!("    warning: {w}");
        }
        match refine_numeric(&s, &fields, &report, &velocity_samples(s.u, 9)) {
            Ok(r) => println!(
                "    flattened over |v| ≤ u: |G23−| = {:.2} MHz, spread {:.3} MHz",
                r.refined_rabi.unwrap_or(f64::NAN),
                r.refined_spread.unwrap_or(f64::NAN)
            ),
            Err(e) => println!("    refinement: {e}"),
        }
    }

    let co = fig1b_fields(&s).with_control_direction(Direction::Forward);
    if let Err(e) = solve_control_rabi(&s, &co) {
        println!("co-propagating control: {e} (exit code {})", e.exit_code());
    }
    Ok(())
}
