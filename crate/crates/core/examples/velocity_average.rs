//! Maxwell averaging: Gauss–Hermite against the trapezoid oracle on a bare Voigt line.

use dffwm::doppler::{average_response, make_grid, QuadratureKind};
use dffwm::{fig1b_fields, FieldSet, Response, ResponseModel, SchemeConfig};

fn main() -> dffwm::Result<()> {
    let s = SchemeConfig::sodium_preset();
    let mut p = fig1b_fields(&s).without_control().params();
    p.g12 = 0.0;
    let model = ResponseModel::new(&s, &FieldSet::new(&s, &p)?)?;

    let gh = make_grid(s.u, 128, QuadratureKind::GaussHermite)?;
    let trap = make_grid(s.u, 8192, QuadratureKind::AdaptiveTrapezoid)?;
    println!("{:>10} {:>14} {:>14} {:>10}", "Ω1 (MHz)", "GH-128", "trap-8192", "rel diff");
    for omega1 in [0.0, 200.0, 678.0, 1500.0] {
        let a = average_response(&model, &gh, Response::Chi1, omega1)?.mean;
        let b = average_response(&model, &trap, Response::Chi1, omega1)?.mean;
        println!("{omega1:>10.0} {:>14.6e} {:>14.6e} {:>10.1e}", a.re, b.re, (a - b).norm() / b.norm());
    }
    Ok(())
}
