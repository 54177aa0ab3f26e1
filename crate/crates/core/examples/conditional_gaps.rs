//! Average gaps over a conditioning variable, with a fixed reference and with
//! the x-dependent reference given by one of the conditionals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tiltgap::prelude::*;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (nx, ny) = (3, 5);
    let x = Support::range(nx)?;
    let y = Domain::Points(Support::range(ny)?);
    let h = CostTable::from_fn(x.clone(), y.clone(), |x, y| (x[0] - y[0]).powi(2) / 10.0)?;
    let mut rows = || -> Vec<Vec<f64>> {
        (0..nx)
            .map(|_| (0..ny).map(|_| rng.gen_range(0.1..1.0)).collect())
            .collect()
    };
    let c1 = ConditionalFamily::from_rows(x.clone(), &y, rows(), true)?;
    let c2 = ConditionalFamily::from_rows(x.clone(), &y, rows(), true)?;
    let p_x = FiniteMeasure::new(x, vec![0.5, 0.3, 0.2], false)?;

    println!("direct average gap {:.12}", expected_gap_direct(&h, &c1, &c2, &p_x)?);
    for lambda in [0.5, -2.0] {
        let fixed = expected_gap_closed_form(&h, &c1, &c2, &p_x, &Measure::base(&y), lambda)?;
        let rel = expected_gap_relative(&h, &c1, &c2, &p_x, Direction::P2Reference, lambda)?;
        println!(
            "lambda {lambda}: counting reference {:.12} (H(P1|X) = {:.6}), x-dependent reference {:.12}",
            fixed.closed_form,
            fixed.term("H(P1|X)").unwrap_or(f64::NAN),
            rel.closed_form
        );
    }
    Ok(())
}
