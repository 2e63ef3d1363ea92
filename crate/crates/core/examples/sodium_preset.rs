//! Prints the sodium-dimer scheme: widths, Doppler widths and derived constants.

use dffwm::scheme::{LevelWidths, TransitionLabel};
use dffwm::SchemeConfig;

fn main() {
    let s = SchemeConfig::sodium_preset();
    s.validate().expect("preset is consistent");
    println!("thermal velocity u = {:.2} m/s", s.u);
    println!("{:>5} {:>10} {:>10} {:>14}", "line", "λ (nm)", "Γ (MHz)", "Doppler (MHz)");
    for label in TransitionLabel::ALL {
        let t = s.transition(label);
        println!("{:>5} {:>10.1} {:>10.2} {:>14.1}", label.as_str(), t.wavelength, t.gamma, s.doppler_hwhm(label));
    }
    let levels = LevelWidths::from_scheme(&s);
    println!("Γ01 + Γ23 − Γ12 − Γ03 = {:+.3} MHz", s.width_mismatch());
    println!("Γ12 from level decay rates = {:.2} MHz", levels.half_width(1, 2));
    println!("Γ02 = {:.2} MHz", s.gamma02);
    println!("generated wave λ4 = {:.3} nm", 1.0 / s.generated_inv_wavelength());
}
