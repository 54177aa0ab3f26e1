//! Randomized scenario generator. Every weight is strictly positive, so all
//! absolute-continuity hypotheses hold and every generated check must pass.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::{
    CheckKind, CheckSpec, DirectionSpec, PointSpec, Real, ReferenceSpec, ScenarioFile, YSupportSpec, SCHEMA_VERSION,
};

pub const LAMBDA_CHOICES: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
const ALPHA_CHOICES: [f64; 3] = [0.25, 0.5, 0.75];
const LAMBDAS_PER_SCENARIO: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateOptions {
    pub seed: u64,
    pub nx: usize,
    pub ny: usize,
    pub count: usize,
}

fn positive(rng: &mut ChaCha8Rng) -> Real {
    Real(rng.gen_range(0.05..1.0))
}

/// Builds the `index`-th scenario of a run; `rng` carries state across indices.
pub fn random_scenario(rng: &mut ChaCha8Rng, seed: u64, index: usize, nx: usize, ny: usize) -> ScenarioFile {
    let cost = (0..nx)
        .map(|_| (0..ny).map(|_| Real(rng.gen_range(-1.0..=1.0))).collect())
        .collect();
    let reference = ReferenceSpec::Weights {
        weights: (0..ny).map(|_| positive(rng)).collect(),
    };
    let lambdas = LAMBDA_CHOICES
        .choose_multiple(rng, LAMBDAS_PER_SCENARIO)
        .map(|&l| Real(l))
        .collect();
    let p_x = (0..nx).map(|_| positive(rng)).collect();
    let mut families = BTreeMap::new();
    for name in ["A", "B"] {
        let rows = (0..nx).map(|_| (0..ny).map(|_| positive(rng)).collect()).collect();
        families.insert(name.to_string(), rows);
    }

    let pair = |kind: CheckKind, x: Option<usize>| CheckSpec {
        x_index: x,
        p1: Some("A".into()),
        p2: Some("B".into()),
        ..CheckSpec::new(kind)
    };
    let mut pairs = Vec::new();
    for x in 0..nx {
        pairs.push(pair(CheckKind::GapClosedForm, Some(x)));
        for d in [DirectionSpec::P2, DirectionSpec::P1] {
            pairs.push(CheckSpec {
                direction: Some(d),
                ..pair(CheckKind::GapClosedFormRelative, Some(x))
            });
        }
        pairs.push(CheckSpec {
            alpha: Some(Real(*ALPHA_CHOICES.choose(rng).expect("non-empty"))),
            ..pair(CheckKind::GapMixtureReference, Some(x))
        });
        pairs.push(CheckSpec {
            x_index: Some(x),
            ..CheckSpec::new(CheckKind::FreeEnergyIdentities)
        });
        pairs.push(CheckSpec {
            x_index: Some(x),
            seed: Some(rng.gen_range(0..1000)),
            ..CheckSpec::new(CheckKind::VariationalOracle)
        });
    }
    pairs.push(pair(CheckKind::ExpectedGapClosedForm, None));
    for d in [DirectionSpec::P2, DirectionSpec::P1] {
        pairs.push(CheckSpec {
            direction: Some(d),
            ..pair(CheckKind::ExpectedGapRelative, None)
        });
    }
    for fam in ["A", "B"] {
        pairs.push(CheckSpec {
            family: Some(fam.into()),
            ..CheckSpec::new(CheckKind::MarginalGap)
        });
    }
    pairs.push(CheckSpec::new(CheckKind::GibbsMarginalGap));

    ScenarioFile {
        schema: SCHEMA_VERSION,
        name: format!("random_{seed}_{index:03}"),
        y_support: YSupportSpec::Points((0..ny).map(|i| PointSpec::Scalar(Real(i as f64))).collect()),
        x_points: (0..nx).map(|i| PointSpec::Scalar(Real(i as f64))).collect(),
        cost,
        reference,
        lambdas,
        p_x,
        families,
        pairs,
    }
}

/// Writes `count` scenarios named `scenario_<seed>_<index>.json` into
/// `out_dir`, creating it if needed. Identical options give identical bytes.
pub fn generate(opts: GenerateOptions, out_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    if opts.nx == 0 || opts.ny == 0 || opts.count == 0 {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "nx, ny and count must all be at least 1",
        ));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut written = Vec::with_capacity(opts.count);
    for i in 0..opts.count {
        let file = random_scenario(&mut rng, opts.seed, i, opts.nx, opts.ny);
        let mut text = serde_json::to_string_pretty(&file).map_err(std::io::Error::other)?;
        text.push('\n');
        let path = out_dir.join(format!("scenario_{}_{i:03}.json", opts.seed));
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    #[test]
    fn generated_scenarios_validate_and_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..5 {
            let file = random_scenario(&mut rng, 3, i, 3, 4);
            let text = serde_json::to_string(&file).unwrap();
            let back: ScenarioFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, file);
            let report = Scenario::from_file(file).unwrap().run(None);
            assert!(report.all_passed(), "{}", report.render_text(false));
        }
    }

    #[test]
    fn rejects_empty_dimensions() {
        let dir = std::env::temp_dir();
        let opts = GenerateOptions {
            seed: 1,
            nx: 0,
            ny: 2,
            count: 1,
        };
        assert!(generate(opts, &dir).is_err());
    }
}
