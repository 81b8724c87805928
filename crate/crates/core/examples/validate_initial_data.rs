//! Hypothesis checklist for each built-in profile, and the projection that
//! repairs data violating the barotropic constraint.

use hydrolimit::profiles::{Profile, ProfileKind, PROFILE_NAMES};
use hydrolimit::state::{check_initial_data, project_to_hypotheses, ValidationOptions};
use hydrolimit::Grid;

fn main() -> hydrolimit::Result<()> {
    let grid = Grid::cubic(16)?;
    for name in PROFILE_NAMES {
        let kind: ProfileKind = name.parse()?;
        let profile = Profile::new(kind, 0.5, 0.5);
        let (v, theta) = profile.fields(grid);
        let report = check_initial_data(&v, &theta, ValidationOptions::default())?;
        if report.all_passed() {
            println!("{profile}: all hypotheses hold");
        } else {
            println!("{profile}: {report}");
        }
    }

    let (v, theta) = Profile::ZIndependent { velocity: 1.0 }.fields(grid);
    let (v, theta) = project_to_hypotheses(&v, &theta);
    let report = check_initial_data(&v, &theta, ValidationOptions::default())?;
    println!(
        "z-independent after projection: passes = {}",
        report.all_passed()
    );
    Ok(())
}
