//! Quantum conversion efficiency versus optical thickness by the closed form and the ODE.

use dffwm::doppler::{make_grid, QuadratureKind};
use dffwm::propagation::{conversion_scan, optimal_probe_detuning};
use dffwm::{designer::df_probe_detuning, fig1b_fields, fig1c_fields, FieldSet, SchemeConfig};

fn peak(s: &SchemeConfig, f: &FieldSet, half: f64) -> dffwm::Result<()> {
    let grid = make_grid(s.u, 128, QuadratureKind::GaussHermite)?;
    let centre = df_probe_detuning(s, f, f.e2.detuning)?;
    let omega1 = optimal_probe_detuning(s, f, &grid, centre, half, 401)?;
    let scan = conversion_scan(s, f, omega1, 5.0, 11, &grid)?;
    println!(
        "  Ω1 = {omega1:.2} MHz  α1 = {:.4}  α4 = {:.4}  ΔK = {:.3e}",
        scan.absorption.alpha1, scan.absorption.alpha4, scan.delta_k
    );
    println!("  {:>6} {:>12} {:>12}", "α01z", "η closed", "η ODE");
    for ((z, c), o) in scan.closed.thickness.iter().zip(&scan.closed.eta_q).zip(&scan.ode.eta_q) {
        println!("  {z:>6.1} {c:>12.4e} {o:>12.4e}");
    }
    let d = scan.discrepancy;
    println!(
        "  max relative difference {:.2e}; after the e^(−(α4−α1)z) factor {:.1e}",
        d.max_relative, d.residual_after_absorption_factor
    );
    Ok(())
}

fn main() -> dffwm::Result<()> {
    let s = SchemeConfig::sodium_preset();
    for (name, f) in [("1b", fig1b_fields(&s)), ("1c", fig1c_fields(&s))] {
        println!("{name}, control on");
        peak(&s, &f, 200.0)?;
        println!("{name}, control off");
        peak(&s, &f.without_control(), 500.0)?;
    }
    Ok(())
}
