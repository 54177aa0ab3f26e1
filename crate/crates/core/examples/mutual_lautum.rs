//! The gap between the product of marginals and the joint, written with
//! mutual and lautum information.

use tiltgap::prelude::*;

fn main() -> Result<()> {
    let x = Support::range(2)?;
    let y = Domain::Points(Support::range(3)?);
    let h = CostTable::new(x.clone(), y.clone(), vec![vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0]])?;
    let q = Measure::base(&y);
    let p_x = FiniteMeasure::new(x.clone(), vec![0.4, 0.6], false)?;
    let cond = ConditionalFamily::from_rows(x, &y, vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.3, 0.5]], false)?;

    let info = InfoSummary::compute(&cond, &cond, &p_x)?;
    println!(
        "I = {:.9}, L = {:.9}, H(Y|X) = {:.9}",
        info.mutual, info.lautum, info.cond_entropy_1
    );

    let lambda = 1.0;
    let d = marginal_gap(&h, &cond, &p_x, &q, lambda)?;
    println!(
        "arbitrary family: direct {:.12}, closed form {:.12}",
        d.direct, d.closed_form
    );
    for t in &d.terms {
        println!("    {:<18} {:.12}", t.name, t.value);
    }

    let g = gibbs_marginal_gap(&h, &q, lambda, &p_x)?;
    let (i, l) = (g.term("I").unwrap(), g.term("L").unwrap());
    println!(
        "Gibbs family: lambda * gap = {:.12}, I + L = {:.12}",
        lambda * g.direct,
        i + l
    );

    let disjoint = ConditionalFamily::from_rows(
        Support::range(2)?,
        &y,
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
        false,
    )?;
    println!("disjoint family: L = {}", lautum_information(&disjoint, &p_x)?);
    println!(
        "disjoint family: {}",
        marginal_gap(&h, &disjoint, &p_x, &q, lambda).unwrap_err()
    );
    Ok(())
}
