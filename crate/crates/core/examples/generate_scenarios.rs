//! Generate randomized scenarios in memory and verify each one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tiltgap::generate::random_scenario;
use tiltgap::scenario::Scenario;

fn main() {
    let seed = 2024;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..4 {
        let file = random_scenario(&mut rng, seed, i, 3, 6);
        let scenario = Scenario::from_file(file).expect("generated scenarios are valid");
        let report = scenario.run(None);
        println!(
            "{}: {} checks, {} failed, max |diff| {:.2e}",
            scenario.name,
            report.records.len(),
            report.failed(),
            report.max_discrepancy()
        );
    }
}
