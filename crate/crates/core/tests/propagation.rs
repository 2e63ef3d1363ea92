use dffwm::designer::df_probe_detuning;
use dffwm::doppler::{make_grid, QuadratureKind, VelocityGrid};
use dffwm::propagation::{
    absorption_set, conversion_scan, nonlinear_coupling, optimal_probe_detuning, phase_mismatch, qce_closed_form, qce_ode,
    thickness_grid,
};
use dffwm::{fig1b_fields, fig1c_fields, FieldSet, SchemeConfig};
use num_complex::Complex64;

fn gh(s: &SchemeConfig) -> VelocityGrid {
    make_grid(s.u, 128, QuadratureKind::GaussHermite).unwrap()
}

fn off(s: &SchemeConfig) -> FieldSet {
    let mut p = fig1b_fields(s).without_control().params();
    p.g12 = 0.0;
    p.g23plus = 0.0;
    FieldSet::new(s, &p).unwrap()
}

#[test]
fn fields_off_absorption_follows_voigt() {
    let s = SchemeConfig::sodium_preset();
    let grid = gh(&s);
    let f = off(&s);
    let a0 = absorption_set(&s, &f, 0.0, &grid).unwrap();
    assert!((a0.alpha1 - 1.0).abs() < 1e-12);
    let a = absorption_set(&s, &f, 678.0, &grid).unwrap();
    assert!((a.alpha1 - 0.5).abs() <= 0.02, "{}", a.alpha1);
}

#[test]
fn control_raises_probe_absorption_at_df_resonance() {
    let s = SchemeConfig::sodium_preset();
    let grid = gh(&s);
    let f = fig1b_fields(&s);
    let o1 = df_probe_detuning(&s, &f, f.e2.detuning).unwrap();
    let on = absorption_set(&s, &f, o1, &grid).unwrap();
    let without = absorption_set(&s, &f.without_control(), o1, &grid).unwrap();
    assert!(on.alpha1 > without.alpha1, "{} vs {}", on.alpha1, without.alpha1);
    assert!(on.alpha1 >= 0.0 && on.alpha4 >= 0.0);
}

#[test]
fn mismatch_bounded_by_mean_absorption() {
    let s = SchemeConfig::sodium_preset();
    let grid = gh(&s);
    let f = fig1c_fields(&s);
    let o1 = df_probe_detuning(&s, &f, f.e2.detuning).unwrap();
    let a = absorption_set(&s, &f, o1, &grid).unwrap();
    let dk = phase_mismatch(&a);
    assert!(dk.re.is_finite() && dk.im.is_finite());
    assert!(dk.im.abs() <= 0.5 * (a.alpha1 + a.alpha4));
}

#[test]
fn doubling_mixing_field_quadruples_efficiency() {
    let s = SchemeConfig::sodium_preset();
    let grid = gh(&s);
    let f = fig1b_fields(&s);
    let o1 = df_probe_detuning(&s, &f, f.e2.detuning).unwrap();
    let mut p = f.params();
    p.g23plus *= 2.0;
    let doubled = FieldSet::new(&s, &p).unwrap();
    let a = conversion_scan(&s, &f, o1, 0.01, 3, &grid).unwrap();
    let b = conversion_scan(&s, &doubled, o1, 0.01, 3, &grid).unwrap();
    assert!((b.closed.eta_q[2] / a.closed.eta_q[2] - 4.0).abs() < 1e-9);
    assert!((b.ode.eta_q[2] / a.ode.eta_q[2] - 4.0).abs() < 1e-6);
}

#[test]
fn no_drive_no_conversion() {
    let s = SchemeConfig::sodium_preset();
    let grid = gh(&s);
    let mut p = fig1b_fields(&s).params();
    p.g12 = 0.0;
    let f = FieldSet::new(&s, &p).unwrap();
    assert_eq!(nonlinear_coupling(&s, &f, 92_000.0, &grid).unwrap(), Complex64::new(0.0, 0.0));
    let scan = conversion_scan(&s, &f, 92_000.0, 5.0, 11, &grid).unwrap();
    assert!(scan.closed.eta_q.iter().chain(&scan.ode.eta_q).all(|&e| e == 0.0));
}

#[test]
fn peak_moves_to_thinner_medium_as_generated_absorption_grows() {
    let sigma = Complex64::new(0.4, 0.1);
    let z = thickness_grid(40.0, 4001).unwrap();
    let alpha1 = 0.05;
    let mut previous = f64::INFINITY;
    for alpha4 in [0.2, 0.5, 1.0, 2.0] {
        let dk = Complex64::new(0.0, -(alpha4 - alpha1) / 2.0);
        let (_, z_closed, _) = qce_closed_form(sigma, dk, alpha4, 0.9, &z).maximum();
        let (_, z_ode, _) = qce_ode(sigma, alpha1, alpha4, 0.0, 0.9, &z).unwrap().maximum();
        assert!(z_closed < previous && z_ode < 40.0);
        previous = z_closed;
    }
}

#[test]
fn absorption_wins_in_thick_medium() {
    let sigma = Complex64::new(0.4, 0.1);
    let z = thickness_grid(400.0, 401).unwrap();
    let closed = qce_closed_form(sigma, Complex64::new(0.3, -0.2), 0.5, 0.9, &z);
    let ode = qce_ode(sigma, 0.1, 0.5, 0.3, 0.9, &z).unwrap();
    let (_, _, peak) = ode.maximum();
    assert!(*closed.eta_q.last().unwrap() < 1e-12 * closed.maximum().2);
    assert!(*ode.eta_q.last().unwrap() < 1e-12 * peak);
}

#[test]
fn reflection_symmetry() {
    let s = SchemeConfig::sodium_preset();
    let grid = gh(&s);
    let f = fig1c_fields(&s);
    let o1 = df_probe_detuning(&s, &f, f.e2.detuning).unwrap();
    let mut p = f.params();
    p.omega2 = -p.omega2;
    p.omega3plus = -p.omega3plus;
    p.omega3minus = -p.omega3minus;
    let mirrored = FieldSet::new(&s, &p).unwrap();
    let a = conversion_scan(&s, &f, o1, 5.0, 11, &grid).unwrap();
    let b = conversion_scan(&s, &mirrored, -o1, 5.0, 11, &grid).unwrap();
    for (x, y) in a.closed.eta_q.iter().zip(&b.closed.eta_q).skip(1) {
        assert!((x - y).abs() <= 1e-9 * x, "{x} vs {y}");
    }
    for (x, y) in a.ode.eta_q.iter().zip(&b.ode.eta_q).skip(1) {
        assert!((x - y).abs() <= 1e-7 * x, "{x} vs {y}");
    }
}

#[test]
fn enhancement_by_control_field() {
    let s = SchemeConfig::sodium_preset();
    let grid = gh(&s);
    for f in [fig1b_fields(&s), fig1c_fields(&s)] {
        let peak = |f: &FieldSet, half: f64| {
            let c = df_probe_detuning(&s, f, f.e2.detuning).unwrap();
            let o1 = optimal_probe_detuning(&s, f, &grid, c, half, 401).unwrap();
            let scan = conversion_scan(&s, f, o1, 5.0, 51, &grid).unwrap();
            (scan.closed.maximum().2, scan.ode.maximum().2)
        };
        let on = peak(&f, 200.0);
        let without = peak(&f.without_control(), 500.0);
        assert!(on.0 >= 2.0 * without.0 && on.1 >= 2.0 * without.1);
    }
}

/// |σ̂| for the 1b preset at the dressed resonance, recorded on the first validated run.
const SIGMA_1B_ANCHOR: f64 = 6.464_044_198_555e-5;

#[test]
fn coupling_regression_anchor() {
    let s = SchemeConfig::sodium_preset();
    let f = fig1b_fields(&s);
    let o1 = df_probe_detuning(&s, &f, f.e2.detuning).unwrap();
    let sigma = nonlinear_coupling(&s, &f, o1, &gh(&s)).unwrap().norm();
    assert!((sigma / SIGMA_1B_ANCHOR - 1.0).abs() < 1e-6, "{sigma:.12e}");
}
