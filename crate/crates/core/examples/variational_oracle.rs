//! Solve the KL-regularized expected-cost problem by mirror descent and
//! compare with the closed-form Gibbs minimizer.

use tiltgap::prelude::*;

fn main() -> Result<()> {
    let y = Domain::Points(Support::range(5)?);
    let h = CostTable::single(y.clone(), vec![0.3, -0.8, 0.1, 0.9, -0.2])?;
    let q = Measure::base(&y);

    for lambda in [1.0, -1.0] {
        let g = gibbs_tilt(&h, &q, lambda, 0)?;
        let sol = variational_oracle(&h, &q, lambda, 0, 10_000, 42)?;
        let kind = if lambda > 0.0 { "minimum" } else { "maximum" };
        println!("lambda {lambda}: {kind} of E_P h + D(P||Q)/lambda");
        println!(
            "    oracle    {:.12} after {} iterations",
            sol.objective, sol.iterations
        );
        println!("    closed    {:.12}", g.free_energy);
        println!(
            "    TV(oracle, Gibbs) = {:.2e}",
            total_variation(&sol.measure, &g.measure)?
        );
        let uniform = Measure::on_domain(&y, vec![1.0; 5], true)?;
        println!(
            "    uniform P {:.12}",
            variational_objective(&h, &q, lambda, 0, &uniform)?
        );
    }
    Ok(())
}
