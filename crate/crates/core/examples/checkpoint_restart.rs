//! Write a checkpoint halfway, resume from it, and compare with a straight run.

use hydrolimit::boussinesq::BoussinesqStepper;
use hydrolimit::io::{read_checkpoint, write_checkpoint, CheckpointManifest};
use hydrolimit::profiles::Profile;
use hydrolimit::state::{validate_initial_data, ValidationOptions};
use hydrolimit::{Grid, PhysicalParams, State};

fn main() -> anyhow::Result<()> {
    let grid = Grid::cubic(16)?;
    let (eps, dt) = (0.2, 1e-3);
    let (v, theta) = Profile::acceptance().fields(grid);
    let s0 = State::from_initial(&validate_initial_data(
        v,
        theta,
        ValidationOptions::default(),
    )?)?;
    let stepper = || BoussinesqStepper::new(PhysicalParams::scaled(eps).unwrap(), grid, dt);

    let straight = stepper()?.run_until(s0.clone(), 0.1, |_| {})?;
    let half = stepper()?.run_until(s0, 0.05, |_| {})?;

    let dir = tempfile_dir()?;
    let manifest = CheckpointManifest {
        t: half.time,
        eps: Some(eps),
        dt,
        scheme: "imex-cn-heun".into(),
        solver: "boussinesq".into(),
        steps: 50,
        config_hash: "example".into(),
        coefficients: String::new(),
    };
    let path = write_checkpoint(&dir, "half", &half, &manifest)?;
    let (restored, m) = read_checkpoint(&path)?;
    println!("checkpoint {} at t = {}", path.display(), m.t);
    let resumed = stepper()?.run_until(restored, 0.1, |_| {})?;

    let gap = straight
        .fields()
        .iter()
        .zip(resumed.fields())
        .map(|(a, b)| (*a - b).max_abs_coeff())
        .fold(0.0, f64::max);
    println!("largest coefficient difference between straight and resumed runs: {gap:.1e}");
    Ok(())
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join("hydrolimit-checkpoint-example");
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
