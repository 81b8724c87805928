//! Tabulate the bound functions for the acceptance data.

use hydrolimit::diagnostics::{BoundConfig, BoundRow};
use hydrolimit::profiles::Profile;
use hydrolimit::state::{validate_initial_data, ValidationOptions};
use hydrolimit::{Grid, State};

fn main() -> hydrolimit::Result<()> {
    let (v, theta) = Profile::acceptance().fields(Grid::cubic(16)?);
    let s0 = State::from_initial(&validate_initial_data(
        v,
        theta,
        ValidationOptions::default(),
    )?)?;
    let cfg = BoundConfig::from_state(&s0, 1.0)?;
    println!("{cfg:?}");
    println!(
        "{:>6} {:>11} {:>11} {:>11} {:>11}",
        "t", "alpha1", "alpha3", "beta1", "beta2"
    );
    for t in [0.0, 0.05, 0.1, 0.2, 0.5] {
        let r = BoundRow::at(t, &cfg, 0.1)?;
        println!(
            "{t:>6} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}",
            r.alpha[0], r.alpha[2], r.beta1, r.beta2
        );
    }
    Ok(())
}
