//! Random instances and plain-loop oracles shared by the integration tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tiltgap::prelude::*;

pub const LAMBDAS: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];

pub fn positive_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.01..1.0)).collect()
}

pub fn probability(rng: &mut ChaCha8Rng, y: &Domain) -> Measure {
    Measure::on_domain(y, positive_weights(rng, y.len()), true).unwrap()
}

pub fn finite_measure(rng: &mut ChaCha8Rng, y: &Domain) -> Measure {
    Measure::on_domain(
        y,
        positive_weights(rng, y.len()).iter().map(|w| 3.0 * w).collect(),
        false,
    )
    .unwrap()
}

pub fn points(n: usize) -> Domain {
    Domain::Points(Support::range(n).unwrap())
}

pub fn cost(rng: &mut ChaCha8Rng, nx: usize, y: &Domain) -> CostTable {
    let rows = (0..nx)
        .map(|_| (0..y.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    CostTable::new(Support::range(nx).unwrap(), y.clone(), rows).unwrap()
}

pub fn family(rng: &mut ChaCha8Rng, nx: usize, y: &Domain) -> ConditionalFamily {
    let rows = (0..nx).map(|_| positive_weights(rng, y.len())).collect();
    ConditionalFamily::from_rows(Support::range(nx).unwrap(), y, rows, true).unwrap()
}

pub fn p_x(rng: &mut ChaCha8Rng, nx: usize) -> FiniteMeasure {
    FiniteMeasure::new(Support::range(nx).unwrap(), positive_weights(rng, nx), true).unwrap()
}

pub fn lambda(rng: &mut ChaCha8Rng) -> f64 {
    LAMBDAS[rng.gen_range(0..LAMBDAS.len())]
}

/// `Σ_y h(y)(p1(y) − p2(y))·Δ`, summed naively.
pub fn naive_gap(row: &[f64], p1: &Measure, p2: &Measure) -> f64 {
    let (a, b) = (p1.densities(), p2.densities());
    row.iter()
        .zip(a.iter().zip(b))
        .map(|(h, (u, v))| h * (u - v))
        .sum::<f64>()
        * p1.cell_volume()
}

/// `Σ_y p ln(p/q)·Δ` with `0 ln 0 = 0`.
pub fn naive_kl(p: &Measure, q: &Measure) -> f64 {
    let s: f64 = p
        .densities()
        .iter()
        .zip(q.densities())
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum();
    s * p.cell_volume()
}

/// Joint-table oracle `Σ_{x,y} h(x,y)[p1(y|x) − p2(y|x)]p(x)`.
pub fn naive_expected_gap(h: &CostTable, c1: &ConditionalFamily, c2: &ConditionalFamily, p_x: &FiniteMeasure) -> f64 {
    p_x.weights()
        .iter()
        .enumerate()
        .map(|(x, w)| w * naive_gap(&h.rows()[x], &c1.members()[x], &c2.members()[x]))
        .sum()
}
