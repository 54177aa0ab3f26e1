//! Log-partition function, Gibbs tilting and the free-energy identities.
//!
//! For a cost row `h(x, ·)`, a reference `Q` and `λ ≠ 0` the tilted measure is
//!
//! ```text
//! dP/dQ (y) = exp(−λ h(x, y) − K(−λ)),    K(t) = ln ∫ exp(t h(x, y)) dQ(y)
//! ```
//!
//! and its free energy `−K(−λ)/λ` is the optimal value of
//! `E_P[h] + D(P‖Q)/λ` over `P ≪ Q` (minimum for `λ > 0`, maximum for `λ < 0`).
//! [`variational_oracle`] solves that problem by entropic mirror descent
//! without using the closed form, so the two can be compared.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::divergences::kl;
use crate::error::{Error, Result};
use crate::measures::{expectation, Domain, Measure, Support};
use crate::numeric;

/// Smallest admissible `|λ|`.
pub const MIN_ABS_LAMBDA: f64 = 1e-12;

pub fn validate_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda.abs() >= MIN_ABS_LAMBDA {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

/// Cost `h(x, y)` tabulated on the x-points times the Y-representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    x_points: Support,
    domain: Domain,
    values: Vec<Vec<f64>>,
}

impl CostTable {
    pub fn new(x_points: Support, domain: Domain, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != x_points.len() {
            return Err(Error::LengthMismatch {
                expected: x_points.len(),
                actual: values.len(),
            });
        }
        for row in &values {
            if row.len() != domain.len() {
                return Err(Error::LengthMismatch {
                    expected: domain.len(),
                    actual: row.len(),
                });
            }
            if let Some((index, &value)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFiniteValue { index, value });
            }
        }
        Ok(CostTable {
            x_points,
            domain,
            values,
        })
    }

    /// Tabulates `h(x, y)` at every x-point and support point (or grid midpoint).
    pub fn from_fn<F: FnMut(&[f64], &[f64]) -> f64>(x_points: Support, domain: Domain, mut h: F) -> Result<Self> {
        let values = x_points.points().iter().map(|x| domain.evaluate(|y| h(x, y))).collect();
        Self::new(x_points, domain, values)
    }

    /// Single-row table for costs that do not depend on `x`.
    pub fn single(domain: Domain, row: Vec<f64>) -> Result<Self> {
        Self::new(Support::new(vec![vec![0.0]])?, domain, vec![row])
    }

    pub fn x_points(&self) -> &Support {
        &self.x_points
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, x_index: usize) -> Result<&[f64]> {
        self.values
            .get(x_index)
            .map(Vec::as_slice)
            .ok_or(Error::XIndexOutOfRange {
                index: x_index,
                len: self.values.len(),
            })
    }
}

/// `K_{h,Q,x}(t) = ln Σ exp(t h(x, y)) q(y)` (midpoint rule on grids).
///
/// `+∞` signals that the tilted measure does not exist.
pub fn log_partition(h: &CostTable, q: &Measure, x_index: usize, t: f64) -> Result<f64> {
    q.on(h.domain())?;
    let row = h.row(x_index)?;
    let lse = numeric::log_sum_exp(
        row.iter()
            .zip(q.densities())
            .filter(|(_, &w)| w > 0.0)
            .map(|(&hv, &w)| t * hv + w.ln()),
    );
    Ok(lse + q.cell_volume().ln())
}

/// The tilted probability measure together with its normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsResult {
    pub measure: Measure,
    /// `K(−λ)`.
    pub log_partition: f64,
    /// `−K(−λ)/λ`.
    pub free_energy: f64,
    pub lambda: f64,
    pub x_index: usize,
}

/// Exponential tilting of `q` by `exp(−λ h(x, ·))`.
pub fn gibbs_tilt(h: &CostTable, q: &Measure, lambda: f64, x_index: usize) -> Result<GibbsResult> {
    validate_lambda(lambda)?;
    let k = log_partition(h, q, x_index, -lambda)?;
    if !k.is_finite() {
        return Err(Error::InfiniteLogPartition { x_index });
    }
    let row = h.row(x_index)?;
    let densities = row
        .iter()
        .zip(q.densities())
        .map(|(&hv, &w)| if w > 0.0 { w * (-lambda * hv - k).exp() } else { 0.0 })
        .collect();
    Ok(GibbsResult {
        measure: Measure::derived_probability(h.domain(), densities),
        log_partition: k,
        free_energy: -k / lambda,
        lambda,
        x_index,
    })
}

/// `E_P[h(x, ·)] + D(P‖Q)/λ`.
pub fn variational_objective(h: &CostTable, q: &Measure, lambda: f64, x_index: usize, p: &Measure) -> Result<f64> {
    validate_lambda(lambda)?;
    let e = expectation(h.row(x_index)?, p)?;
    Ok(e + kl(p, q)? / lambda)
}

/// The free energy evaluated three ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyIdentities {
    /// `−K(−λ)/λ`.
    pub free_energy: f64,
    /// `E_Q[h] − D(Q‖P_gibbs)/λ`; `None` when `Q` is not a probability measure.
    pub via_reference: Option<f64>,
    /// `E_{P_gibbs}[h] + D(P_gibbs‖Q)/λ`.
    pub via_gibbs: f64,
    pub max_discrepancy: f64,
}

pub fn free_energy_identities(
    g: &GibbsResult,
    h: &CostTable,
    q: &Measure,
    x_index: usize,
) -> Result<FreeEnergyIdentities> {
    g.measure.same_representation(q)?;
    if g.x_index != x_index {
        return Err(Error::IndexMismatch(format!(
            "Gibbs measure was built for x index {}, not {x_index}",
            g.x_index
        )));
    }
    let lambda = g.lambda;
    let row = h.row(x_index)?;
    let d_gibbs_q = finite_term(kl(&g.measure, q)?, "D(Gibbs||Q)")?;
    let via_gibbs = expectation(row, &g.measure)? + d_gibbs_q / lambda;
    let via_reference = if q.is_probability() {
        let d_q_gibbs = finite_term(kl(q, &g.measure)?, "D(Q||Gibbs)")?;
        Some(expectation(row, q)? - d_q_gibbs / lambda)
    } else {
        None
    };
    let max_discrepancy = via_reference
        .map(|v| (v - g.free_energy).abs())
        .unwrap_or(0.0)
        .max((via_gibbs - g.free_energy).abs());
    Ok(FreeEnergyIdentities {
        free_energy: g.free_energy,
        via_reference,
        via_gibbs,
        max_discrepancy,
    })
}

pub(crate) fn finite_term(value: f64, term: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InfiniteDivergence { term: term.into() })
    }
}

/// Output of the mirror-descent solver.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub measure: Measure,
    pub objective: f64,
    pub iterations: usize,
}

/// Solves `min (λ > 0) / max (λ < 0)  E_P[h] + D(P‖Q)/λ` over `P ≪ Q` by
/// exponentiated-gradient steps on the support of `Q`.
///
/// The start is the normalized `Q`, multiplicatively perturbed by a seeded
/// factor in `[e^{-1/2}, e^{1/2}]` so different seeds approach the optimum
/// from different directions. The step is `|λ|/(1 + |λ|·range(h))`; in log
/// coordinates the error contracts by `|λ|·range/(1 + |λ|·range)` per step.
/// Iteration stops once the log-weights and objective are stationary.
pub fn variational_oracle(
    h: &CostTable,
    q: &Measure,
    lambda: f64,
    x_index: usize,
    iters: usize,
    seed: u64,
) -> Result<OracleSolution> {
    validate_lambda(lambda)?;
    q.on(h.domain())?;
    let row = h.row(x_index)?;
    if !log_partition(h, q, x_index, -lambda)?.is_finite() {
        return Err(Error::InfiniteLogPartition { x_index });
    }
    let active: Vec<usize> = (0..q.len()).filter(|&i| q.densities()[i] > 0.0).collect();
    let log_q: Vec<f64> = active.iter().map(|&i| q.densities()[i].ln()).collect();
    let cost: Vec<f64> = active.iter().map(|&i| row[i]).collect();

    let (lo, hi) = cost.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
        (lo.min(c), hi.max(c))
    });
    let range = hi - lo;
    let step = lambda.abs() / (1.0 + lambda.abs() * range);
    let direction = lambda.signum();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_p: Vec<f64> = log_q.iter().map(|&l| l + rng.gen_range(-0.5..0.5)).collect();
    normalize_log(&mut log_p);

    let objective = |log_p: &[f64]| -> f64 {
        // E_P[h] + D(P‖Q)/λ in cell masses; the volume enters through ln Δ.
        let ln_vol = q.cell_volume().ln();
        numeric::sum(
            log_p
                .iter()
                .zip(&cost)
                .zip(&log_q)
                .map(|((&lp, &c), &lq)| lp.exp() * (c + (lp - lq - ln_vol) / lambda)),
        )
    };

    let mut current = objective(&log_p);
    let mut last_change = f64::INFINITY;
    for it in 1..=iters {
        let previous = log_p.clone();
        for ((lp, &c), &lq) in log_p.iter_mut().zip(&cost).zip(&log_q) {
            // Gradient in mass coordinates, up to an additive constant.
            *lp -= direction * step * (c + (*lp - lq) / lambda);
        }
        normalize_log(&mut log_p);
        let max_move = log_p
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let next = objective(&log_p);
        last_change = (next - current).abs();
        current = next;
        if max_move <= 1e-13 && last_change <= 1e-14 * current.abs().max(1.0) {
            return Ok(finish(q, &active, &log_p, h, lambda, x_index, it));
        }
    }
    Err(Error::NonConvergence { iters, last_change })
}

fn finish(
    q: &Measure,
    active: &[usize],
    log_p: &[f64],
    h: &CostTable,
    lambda: f64,
    x_index: usize,
    iterations: usize,
) -> OracleSolution {
    let mut densities = vec![0.0; q.len()];
    let vol = q.cell_volume();
    for (&i, &lp) in active.iter().zip(log_p) {
        densities[i] = lp.exp() / vol;
    }
    let measure = Measure::derived_probability(h.domain(), densities);
    let objective = variational_objective(h, q, lambda, x_index, &measure).unwrap_or(f64::NAN);
    OracleSolution {
        measure,
        objective,
        iterations,
    }
}

fn normalize_log(log_p: &mut [f64]) {
    let z = numeric::log_sum_exp(log_p.iter().copied());
    log_p.iter_mut().for_each(|l| *l -= z);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{total_variation, FiniteMeasure, Grid, GridDensity};
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn two_point() -> (CostTable, Measure) {
        let d = Domain::Points(Support::range(2).unwrap());
        let h = CostTable::single(d.clone(), vec![0.0, 1.0]).unwrap();
        (h, Measure::base(&d))
    }

    fn pm(w: &[f64]) -> Measure {
        FiniteMeasure::new(Support::range(w.len()).unwrap(), w.to_vec(), false)
            .unwrap()
            .into()
    }

    #[test]
    fn log_partition_examples() {
        let (h, counting) = two_point();
        let half = pm(&[0.5, 0.5]);
        assert_eq!(log_partition(&h, &half, 0, 0.0).unwrap(), 0.0);
        assert!((log_partition(&h, &counting, 0, 0.0).unwrap() - LN2).abs() < 1e-15);
        // ln(e^0 + e^{-ln 2}) = ln(3/2).
        let k = log_partition(&h, &counting, 0, -LN2).unwrap();
        assert!((k - 1.5f64.ln()).abs() < 1e-15);
        assert!((k - 0.4055).abs() < 1e-4);
        assert!(log_partition(&h, &counting, 1, 0.0).is_err());
    }

    #[test]
    fn log_partition_survives_large_exponents() {
        let d = Domain::Points(Support::range(2).unwrap());
        let h = CostTable::single(d.clone(), vec![1000.0, 999.0]).unwrap();
        let k = log_partition(&h, &Measure::base(&d), 0, 1.0).unwrap();
        assert!((k - (1000.0 + (1.0 + (-1f64).exp()).ln())).abs() < 1e-12);
    }

    #[test]
    fn gibbs_tilt_examples() {
        let (h, counting) = two_point();
        let g = gibbs_tilt(&h, &counting, LN2, 0).unwrap();
        let w = g.measure.densities();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] - 1.0 / 3.0).abs() < 1e-15);
        let g_half = gibbs_tilt(&h, &pm(&[0.5, 0.5]), LN2, 0).unwrap();
        assert!(total_variation(&g.measure, &g_half.measure).unwrap() < 1e-15);

        let d = Domain::Points(Support::range(3).unwrap());
        let constant = CostTable::single(d, vec![2.5; 3]).unwrap();
        let q = pm(&[0.2, 0.3, 0.5]);
        for lambda in [-3.0, 0.1, 7.0] {
            let g = gibbs_tilt(&constant, &q, lambda, 0).unwrap();
            assert!(total_variation(&g.measure, &q).unwrap() < 1e-15);
            assert!((g.free_energy * -lambda - g.log_partition).abs() < 1e-12);
        }
        assert_eq!(
            gibbs_tilt(&h, &counting, 0.0, 0).unwrap_err(),
            Error::InvalidLambda(0.0)
        );
        assert!(gibbs_tilt(&h, &counting, 1e-13, 0).is_err());
    }

    #[test]
    fn overflowing_partition_is_reported() {
        let d = Domain::Points(Support::range(2).unwrap());
        let h = CostTable::single(d.clone(), vec![-1e300, 0.0]).unwrap();
        assert_eq!(
            gibbs_tilt(&h, &Measure::base(&d), 1e10, 0).unwrap_err(),
            Error::InfiniteLogPartition { x_index: 0 }
        );
    }

    #[test]
    fn free_energy_hand_example() {
        let d = Domain::Points(Support::range(2).unwrap());
        let h = CostTable::single(d, vec![0.0, 1.0]).unwrap();
        let q = pm(&[0.5, 0.5]);
        let g = gibbs_tilt(&h, &q, LN2, 0).unwrap();
        let e_gibbs = 1.0 / 3.0;
        let d_gibbs_q = (2.0 / 3.0) * (4.0f64 / 3.0).ln() + (1.0 / 3.0) * (2.0f64 / 3.0).ln();
        let hand = e_gibbs + d_gibbs_q / LN2;
        let ids = free_energy_identities(&g, &h, &q, 0).unwrap();
        assert!((ids.via_gibbs - hand).abs() < 1e-12);
        assert!((ids.free_energy - hand).abs() < 1e-12);
        assert!(ids.via_reference.is_some());
        assert!(ids.max_discrepancy < 1e-12);
    }

    #[test]
    fn free_energy_constant_cost() {
        let d = Domain::Points(Support::range(3).unwrap());
        let h = CostTable::single(d, vec![1.7; 3]).unwrap();
        let q = pm(&[0.1, 0.6, 0.3]);
        let g = gibbs_tilt(&h, &q, -0.7, 0).unwrap();
        let ids = free_energy_identities(&g, &h, &q, 0).unwrap();
        assert!((ids.free_energy - 1.7).abs() < 1e-15);
        assert!(ids.max_discrepancy < 1e-15);
    }

    #[test]
    fn free_energy_non_probability_reference_skips_reference_side() {
        let (h, counting) = two_point();
        let g = gibbs_tilt(&h, &counting, 1.3, 0).unwrap();
        let ids = free_energy_identities(&g, &h, &counting, 0).unwrap();
        assert!(ids.via_reference.is_none());
        assert!(ids.max_discrepancy < 1e-14);
    }

    #[test]
    fn oracle_examples() {
        let d = Domain::Points(Support::range(2).unwrap());
        let h = CostTable::single(d.clone(), vec![0.0, 1.0]).unwrap();
        let q = pm(&[0.5, 0.5]);
        let sol = variational_oracle(&h, &q, LN2, 0, 2000, 1).unwrap();
        let w = sol.measure.densities();
        assert!((w[0] - 2.0 / 3.0).abs() + (w[1] - 1.0 / 3.0).abs() < 2e-6);
        let sol = variational_oracle(&h, &q, -LN2, 0, 2000, 2).unwrap();
        let w = sol.measure.densities();
        assert!((w[0] - 1.0 / 3.0).abs() + (w[1] - 2.0 / 3.0).abs() < 2e-6);

        let flat = CostTable::single(d, vec![4.0, 4.0]).unwrap();
        let q = pm(&[0.3, 0.7]);
        let sol = variational_oracle(&flat, &q, 2.0, 0, 2000, 3).unwrap();
        assert!(total_variation(&sol.measure, &q).unwrap() < 1e-10);
    }

    #[test]
    fn oracle_reports_non_convergence() {
        let d = Domain::Points(Support::range(3).unwrap());
        let h = CostTable::single(d, vec![0.0, 1.0, -1.0]).unwrap();
        let q = pm(&[0.2, 0.3, 0.5]);
        assert!(matches!(
            variational_oracle(&h, &q, 2.0, 0, 2, 0),
            Err(Error::NonConvergence { iters: 2, .. })
        ));
    }

    #[test]
    fn oracle_on_grid_matches_tilt() {
        let grid = Grid::new(-3.0, 3.0, 60).unwrap();
        let d = Domain::Grid(grid);
        let h = CostTable::from_fn(Support::new(vec![vec![0.0]]).unwrap(), d.clone(), |_, y| {
            y[0] * y[0] / 4.0
        })
        .unwrap();
        let q: Measure = GridDensity::lebesgue(grid).into();
        let g = gibbs_tilt(&h, &q, 1.0, 0).unwrap();
        let sol = variational_oracle(&h, &q, 1.0, 0, 5000, 9).unwrap();
        assert!(total_variation(&g.measure, &sol.measure).unwrap() < 1e-9);
        assert!((sol.objective - g.free_energy).abs() < 1e-10);
    }

    fn instance(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(0.05f64..2.0, n),
        )
    }

    proptest! {
        #[test]
        fn tilt_is_normalized((c, w) in (1usize..32).prop_flat_map(instance), lambda in -5.0f64..5.0) {
            prop_assume!(lambda.abs() > 1e-3);
            let d = Domain::Points(Support::range(c.len()).unwrap());
            let h = CostTable::single(d.clone(), c).unwrap();
            let q = Measure::on_domain(&d, w, false).unwrap();
            let g = gibbs_tilt(&h, &q, lambda, 0).unwrap();
            prop_assert!((g.measure.mass() - 1.0).abs() < 1e-12);
            prop_assert!((log_partition(&h, &q, 0, 0.0).unwrap() - q.mass().ln()).abs() < 1e-12);
        }

        #[test]
        fn log_partition_is_convex(
            (c, w) in (1usize..16).prop_flat_map(instance),
            t1 in -4.0f64..4.0, t2 in -4.0f64..4.0, theta in 0.0f64..1.0,
        ) {
            let d = Domain::Points(Support::range(c.len()).unwrap());
            let h = CostTable::single(d.clone(), c).unwrap();
            let q = Measure::on_domain(&d, w, false).unwrap();
            let k = |t| log_partition(&h, &q, 0, t).unwrap();
            prop_assert!(k(theta * t1 + (1.0 - theta) * t2) <= theta * k(t1) + (1.0 - theta) * k(t2) + 1e-10);
        }

        #[test]
        fn tilting_composes((c, w) in (1usize..16).prop_flat_map(instance), l1 in -2.0f64..2.0, l2 in -2.0f64..2.0) {
            prop_assume!(l1.abs() > 1e-3 && l2.abs() > 1e-3 && (l1 + l2).abs() > 1e-3);
            let d = Domain::Points(Support::range(c.len()).unwrap());
            let h = CostTable::single(d.clone(), c).unwrap();
            let q = Measure::on_domain(&d, w, false).unwrap();
            let twice = gibbs_tilt(&h, &gibbs_tilt(&h, &q, l1, 0).unwrap().measure, l2, 0).unwrap();
            let once = gibbs_tilt(&h, &q, l1 + l2, 0).unwrap();
            for (a, b) in twice.measure.densities().iter().zip(once.measure.densities()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn gibbs_point_is_optimal(
            (c, w, p) in (2usize..10).prop_flat_map(|n| (prop::collection::vec(-1.0f64..1.0, n), prop::collection::vec(0.05f64..2.0, n), prop::collection::vec(0.0f64..1.0, n))),
            lambda in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
        ) {
            prop_assume!(p.iter().sum::<f64>() > 1e-3);
            let d = Domain::Points(Support::range(c.len()).unwrap());
            let h = CostTable::single(d.clone(), c).unwrap();
            let q = Measure::on_domain(&d, w, false).unwrap();
            let p = Measure::on_domain(&d, p, true).unwrap();
            let fe = gibbs_tilt(&h, &q, lambda, 0).unwrap().free_energy;
            let obj = variational_objective(&h, &q, lambda, 0, &p).unwrap();
            if lambda > 0.0 {
                prop_assert!(obj >= fe - 1e-10);
            } else {
                prop_assert!(obj <= fe + 1e-10);
            }
        }
    }
}
