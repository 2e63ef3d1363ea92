//! Resonance centre Ω1*(v) per velocity group, with and without the control field.

use dffwm::designer::{df_probe_detuning, resonance_centers, velocity_samples};
use dffwm::{fig1b_fields, ResponseModel, SchemeConfig};

fn main() -> dffwm::Result<()> {
    let s = SchemeConfig::sodium_preset();
    let on = fig1b_fields(&s);
    let off = on.without_control();
    let v = velocity_samples(s.u, 9);
    let c_on = resonance_centers(&s, &on, &v)?;
    let c_off = resonance_centers(&s, &off, &v)?;

    println!("{:>9} {:>16} {:>16}", "v (m/s)", "Ω1* on (MHz)", "Ω1* off (MHz)");
    for i in 0..v.len() {
        println!("{:>9.1} {:>16.3} {:>16.3}", v[i], c_on[i], c_off[i]);
    }
    for (name, f, c) in [("on", &on, &c_on), ("off", &off, &c_off)] {
        let spread = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - c.iter().cloned().fold(f64::INFINITY, f64::min);
        let centre = df_probe_detuning(&s, f, f.e2.detuning)?;
        let width = ResponseModel::new(&s, f)?.induced_resonance(centre).width;
        println!("{name}: spread {spread:.2} MHz = {:.1} Γ̃02", spread / width);
    }
    Ok(())
}
