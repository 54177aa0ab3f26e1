//! Express E_P1[h] - E_P2[h] through relative entropies against a Gibbs
//! measure, for several choices of reference.

use tiltgap::prelude::*;

fn show(label: &str, d: &GapDecomposition) {
    println!(
        "{label} ({}): direct {:.12}, closed form {:.12}",
        d.reference, d.direct, d.closed_form
    );
    for t in &d.terms {
        println!("    {:<14} {:>16.12}", t.name, t.value);
    }
}

fn main() -> Result<()> {
    let y = Domain::Points(Support::range(4)?);
    let h = CostTable::single(y.clone(), vec![1.0, -0.5, 0.25, 2.0])?;
    let p1 = Measure::on_domain(&y, vec![0.1, 0.4, 0.3, 0.2], false)?;
    let p2 = Measure::on_domain(&y, vec![0.25, 0.25, 0.25, 0.25], false)?;
    let counting = Measure::base(&y);
    let lambda = 0.7;

    show(
        "counting reference",
        &gap_closed_form(&h, 0, &p1, &p2, &counting, lambda)?,
    );
    show(
        "P2 as reference",
        &gap_closed_form_relative(&h, 0, &p1, &p2, Direction::P2Reference, lambda)?,
    );
    show(
        "P1 as reference",
        &gap_closed_form_relative(&h, 0, &p1, &p2, Direction::P1Reference, lambda)?,
    );
    show(
        "mixture reference",
        &gap_mixture_reference(&h, 0, &p1, &p2, 0.3, lambda)?,
    );

    // Without absolute continuity the relative form is refused.
    let point = Measure::on_domain(&y, vec![0.0, 1.0, 0.0, 0.0], false)?;
    match gap_closed_form_relative(&h, 0, &p2, &point, Direction::P2Reference, lambda) {
        Err(e) => println!("refused: {e}"),
        Ok(d) => println!("unexpected: {d:?}"),
    }
    Ok(())
}
