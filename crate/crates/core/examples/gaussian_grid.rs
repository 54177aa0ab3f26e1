//! Densities on a uniform grid: Gaussian tilt, differential entropy and the
//! gap decomposition against Lebesgue and Gaussian references.

use std::f64::consts::{E, PI};

use tiltgap::prelude::*;

fn normal(mean: f64, sd: f64) -> impl Fn(f64) -> f64 {
    move |y| (-0.5 * ((y - mean) / sd).powi(2)).exp() / (sd * (2.0 * PI).sqrt())
}

fn main() -> Result<()> {
    let grid = Grid::new(-8.0, 8.0, 4000)?;
    let y = Domain::Grid(grid);
    let density = |f: &dyn Fn(f64) -> f64| y.evaluate(|v| f(v[0]));
    let h = CostTable::single(y.clone(), density(&|v| v * v))?;
    let q = Measure::on_domain(&y, density(&normal(0.0, 1.0)), false)?;
    let p1 = Measure::on_domain(&y, density(&normal(0.5, 1.0)), true)?;
    let p2 = Measure::on_domain(&y, density(&normal(-0.3, 0.8)), true)?;

    let std_normal = GridDensity::from_fn(grid, normal(0.0, 1.0), true)?;
    println!(
        "h(N(0,1)) = {:.9} (exact {:.9})",
        differential_entropy(&std_normal)?,
        0.5 * (2.0 * PI * E).ln()
    );

    // Tilting N(0,1) by y² at λ = 0.5 gives N(0, 1/2).
    let g = gibbs_tilt(&h, &q, 0.5, 0)?;
    println!("E_G[y²] = {:.9} (exact 0.5)", expectation(&h.rows()[0], &g.measure)?);

    for (label, reference) in [("N(0,1)", &q), ("Lebesgue", &Measure::base(&y))] {
        let d = gap_closed_form(&h, 0, &p1, &p2, reference, 0.5)?;
        println!(
            "{label} reference: direct {:.10}, closed form {:.10}",
            d.direct, d.closed_form
        );
    }
    Ok(())
}
