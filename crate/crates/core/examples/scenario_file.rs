//! Runs a conversion scan from a TOML scenario, the same way the `dffwm convert` command does.

use dffwm::cli::{cmd_convert, RunOptions, Scenario};

const SCENARIO: &str = r#"
scheme = "na2"
quadrature = "gh"
velocity_nodes = 128
z_max = 5.0
n_z = 21

[fields]
g12 = 74.2
g23plus = 5.78
g23minus = 635.8
omega2 = 2300.0
omega3plus = -1960.0
omega3minus = 1830.0
"#;

fn main() -> dffwm::Result<()> {
    let scenario = Scenario::from_toml(SCENARIO)?;
    let out = std::env::temp_dir().join("dffwm-scenario-example");
    let options = RunOptions {
        out_dir: out.clone(),
        compare_off: true,
        ..RunOptions::default()
    };
    let summary = cmd_convert(&scenario, &options)?;
    println!("enhancement (closed form): {}", summary["enhancement_ratio"]);
    println!("enhancement (ODE):         {}", summary["enhancement_ratio_ode"]);
    println!("tables written to {}", out.display());
    Ok(())
}
