//! Velocity-averaged |⟨χ̃4⟩|² line with and without the control field.

use dffwm::designer::df_probe_detuning;
use dffwm::doppler::{averaged_spectrum, detuning_range, line_metrics, make_grid, QuadratureKind};
use dffwm::{fig1b_fields, FieldSet, Response, SchemeConfig};

fn hwhm(s: &SchemeConfig, f: &FieldSet, half_span: f64) -> dffwm::Result<(f64, f64, bool)> {
    let grid = make_grid(s.u, 128, QuadratureKind::GaussHermite)?;
    let centre = df_probe_detuning(s, f, f.e2.detuning)?;
    let d = detuning_range(centre, 2.0 * half_span, 801)?;
    let spectrum = averaged_spectrum(s, f, &d, &grid, Response::Chi4nl)?;
    let m = line_metrics(&d, &spectrum.mean.abs2())?;
    Ok((m.peak_position, m.hwhm, spectrum.flagged()))
}

fn main() -> dffwm::Result<()> {
    let s = SchemeConfig::sodium_preset();
    let on = fig1b_fields(&s);
    let (peak_on, w_on, flag_on) = hwhm(&s, &on, 40.0)?;
    let (peak_off, w_off, flag_off) = hwhm(&s, &on.without_control(), 800.0)?;
    println!("control on:  peak {peak_on:.2} MHz, HWHM {w_on:.3} MHz, guard flagged: {flag_on}");
    println!("control off: peak {peak_off:.2} MHz, HWHM {w_off:.2} MHz, guard flagged: {flag_off}");
    println!("narrowing factor {:.1}", w_off / w_on);
    Ok(())
}
