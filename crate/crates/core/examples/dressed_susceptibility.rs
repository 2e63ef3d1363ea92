//! Per-velocity dressed susceptibilities across the Raman resonance.

use dffwm::designer::df_probe_detuning;
use dffwm::{fig1b_fields, ResponseModel, SchemeConfig};

fn main() -> dffwm::Result<()> {
    let s = SchemeConfig::sodium_preset();
    let fields = fig1b_fields(&s);
    let model = ResponseModel::new(&s, &fields)?;
    let center = df_probe_detuning(&s, &fields, fields.e2.detuning)?;
    let resonance = model.induced_resonance(center);
    println!("dressed resonance at Ω1 = {center:.2} MHz, Γ̃02 = {:.3} MHz", resonance.width);

    println!("{:>8} {:>10} {:>12} {:>12} {:>12}", "v (m/s)", "Ω1−c", "Re χ1", "Im χ1", "|χ̃4|");
    for v in [-538.0, 0.0, 538.0] {
        for offset in [-10.0, -2.0, 0.0, 2.0, 10.0] {
            let p = model.response_point(center + offset, v);
            println!(
                "{v:>8.0} {offset:>10.1} {:>12.4e} {:>12.4e} {:>12.4e}",
                p.chi1_ratio.re,
                p.chi1_ratio.im,
                p.chi4nl_ratio.norm()
            );
        }
    }
    Ok(())
}
