//! Relative entropy, Shannon and differential entropy, conditional entropy,
//! mutual and lautum information. All quantities are in nats.
//!
//! Infinite divergences are returned as `f64::INFINITY`, never as errors.

use crate::error::{Error, Result};
use crate::measures::{marginal_y, ConditionalFamily, FiniteMeasure, GridDensity, Measure};
use crate::numeric::{self, CompensatedSum};

/// `D(P‖Q) = Σ p ln(p/q)` (times the cell width on grids).
///
/// `P` must be a probability measure; `Q` may be any validated measure, in
/// which case the result can be negative. Returns `+∞` when `P ⋠ Q`.
pub fn kl(p: &Measure, q: &Measure) -> Result<f64> {
    p.same_representation(q)?;
    p.require_probability()?;
    let s = numeric::sum(
        p.densities()
            .iter()
            .zip(q.densities())
            .map(|(&a, &b)| numeric::rel_entropy_term(a, b)),
    );
    Ok(s * p.cell_volume())
}

/// `H(P) = −Σ p ln p`.
pub fn shannon_entropy(p: &FiniteMeasure) -> Result<f64> {
    if !p.is_probability() {
        return Err(Error::NonProbabilityMeasure { mass: p.mass() });
    }
    Ok(0.0 - numeric::sum(p.weights().iter().map(|&w| numeric::xlogx(w))))
}

/// `h(P) = −∫ f ln f` by the midpoint rule.
pub fn differential_entropy(p: &GridDensity) -> Result<f64> {
    if !p.is_probability() {
        return Err(Error::NonProbabilityMeasure { mass: p.mass() });
    }
    Ok((0.0 - numeric::sum(p.values().iter().map(|&v| numeric::xlogx(v)))) * p.grid().width())
}

/// Shannon or differential entropy, by representation.
pub fn entropy(p: &Measure) -> Result<f64> {
    match p {
        Measure::Finite(m) => shannon_entropy(m),
        Measure::Grid(m) => differential_entropy(m),
    }
}

/// `Σ_x P_X(x) · entropy(P_{Y|X=x})`.
pub fn conditional_entropy(cond: &ConditionalFamily, p_x: &FiniteMeasure) -> Result<f64> {
    cond.aligned_with(p_x)?;
    weighted_over_x(p_x, |x| entropy(&cond.members()[x]))
}

/// `I(P_{Y|X}; P_X) = Σ_x P_X(x) · D(P_{Y|X=x} ‖ P_Y)`.
pub fn mutual_information(cond: &ConditionalFamily, p_x: &FiniteMeasure) -> Result<f64> {
    let p_y = marginal_y(cond, p_x)?;
    weighted_over_x(p_x, |x| kl(&cond.members()[x], &p_y))
}

/// `L(P_{Y|X}; P_X) = Σ_x P_X(x) · D(P_Y ‖ P_{Y|X=x})`; `+∞` when `P_Y` charges
/// a point some active member does not.
pub fn lautum_information(cond: &ConditionalFamily, p_x: &FiniteMeasure) -> Result<f64> {
    let p_y = marginal_y(cond, p_x)?;
    weighted_over_x(p_x, |x| kl(&p_y, &cond.members()[x]))
}

/// Information quantities of a pair of conditional families sharing `P_X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoSummary {
    /// Mutual information of the first family.
    pub mutual: f64,
    /// Lautum information of the first family.
    pub lautum: f64,
    pub cond_entropy_1: f64,
    pub cond_entropy_2: f64,
}

impl InfoSummary {
    pub fn compute(cond1: &ConditionalFamily, cond2: &ConditionalFamily, p_x: &FiniteMeasure) -> Result<Self> {
        Ok(InfoSummary {
            mutual: mutual_information(cond1, p_x)?,
            lautum: lautum_information(cond1, p_x)?,
            cond_entropy_1: conditional_entropy(cond1, p_x)?,
            cond_entropy_2: conditional_entropy(cond2, p_x)?,
        })
    }
}

/// `Σ_x P_X(x) f(x)` over the indices with positive `P_X` mass.
pub(crate) fn weighted_over_x<F>(p_x: &FiniteMeasure, mut f: F) -> Result<f64>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut acc = CompensatedSum::new();
    for (x, &w) in p_x.weights().iter().enumerate() {
        if w > 0.0 {
            acc.add(w * f(x)?);
        }
    }
    Ok(acc.total())
}
