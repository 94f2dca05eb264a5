//! A mountain-pass bound state between the two semitrivial wells. Inside
//! the level window c2 < c1 < 2 c2 (with alpha >= 2) the path family
//! joining the wells has a saddle strictly above c1 and strictly below
//! c1 + c2; deformation rounds push the path maximum down onto it.
//!
//! Run with `cargo run --example mountain_pass`.

use hardy_sobolev::{
    classify_regime, mountain_pass, Classification, CouplingWeight, RadialGrid, SaddleWindow,
    SolverConfig, SystemFunctional, SystemParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = SystemParams::new(
        3,
        0.05,
        0.125,
        0.5,
        0.5,
        0.5,
        2.5,
        1.5,
        0.05,
        CouplingWeight::new(1.0, 1.0, 4.0)?,
    )?;
    let report = classify_regime(&params);
    println!(
        "levels: c1 = {:.8}, c2 = {:.8}; saddle window = {:?}",
        report.c1, report.c2, report.saddle_window
    );
    assert_eq!(report.saddle_window, Some(SaddleWindow::FirstHigher));

    let grid = RadialGrid::new(3, 1e-12, 1e12, 2048)?;
    let fun = SystemFunctional::new(grid, params)?;
    let cfg = SolverConfig {
        step0: 0.1, // deformation wants gentler steps than plain descent
        ..SolverConfig::default()
    };
    let result = mountain_pass(&fun, &cfg)?;

    println!("\npath maximum per deformation round:");
    for row in &result.trace {
        println!(
            "  round {}: max level = {:.10}, dual grad norm at peak = {:.3e}",
            row.iter, row.energy, row.grad_norm
        );
    }
    for pair in result.trace.windows(2) {
        assert!(pair[1].energy <= pair[0].energy + 1e-12, "rounds never raise the maximum");
    }

    println!("\nrefined saddle level = {:.10}", result.energy);
    println!("classification       = {}", result.classification);
    assert_eq!(result.classification, Classification::Coupled);
    assert!(result.energy > report.c1 && result.energy < report.c1 + report.c2);
    println!(
        "level sits inside the window ({:.8}, {:.8}) as the theory demands",
        report.c1,
        report.c1 + report.c2
    );
    Ok(())
}
