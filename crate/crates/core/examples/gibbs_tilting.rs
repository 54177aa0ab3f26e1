//! Tilt a reference measure by a cost and inspect the log-partition function.

use tiltgap::prelude::*;

fn main() -> Result<()> {
    let y = Domain::Points(Support::new(vec![vec![0.0], vec![1.0], vec![2.0]])?);
    let h = CostTable::single(y.clone(), vec![0.0, 1.0, 4.0])?;
    let q = Measure::on_domain(&y, vec![0.2, 0.5, 0.3], false)?;

    for lambda in [-1.0, 0.5, 2.0] {
        let g = gibbs_tilt(&h, &q, lambda, 0)?;
        println!(
            "lambda {lambda:>5}: K(-lambda) = {:.6}, free energy = {:.6}, weights = {:.4?}",
            g.log_partition,
            g.free_energy,
            g.measure.densities()
        );
        let ids = free_energy_identities(&g, &h, &q, 0)?;
        println!("    E_Q h - D(Q||G)/lambda = {:.6?}", ids.via_reference);
        println!("    E_G h + D(G||Q)/lambda = {:.6}", ids.via_gibbs);
    }

    // Tilting by a and then by b is tilting by a + b.
    let once = gibbs_tilt(&h, &q, 1.5, 0)?;
    let twice = gibbs_tilt(&h, &gibbs_tilt(&h, &q, 0.5, 0)?.measure, 1.0, 0)?;
    println!(
        "composition TV = {:.2e}",
        total_variation(&once.measure, &twice.measure)?
    );
    Ok(())
}
