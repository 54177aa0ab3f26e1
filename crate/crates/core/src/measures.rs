//! Probability and σ-finite reference measures.
//!
//! Two representations are supported:
//!
//! - [`FiniteMeasure`]: weighted point masses on a finite [`Support`] in ℝ^m.
//!   Unit weights give the counting measure; arbitrary positive weights give
//!   a weighted counting reference.
//! - [`GridDensity`]: a density on a 1-D uniform [`Grid`], integrated with the
//!   midpoint rule. The all-ones density is the Lebesgue reference.
//!
//! Every operation taking several measures requires them to share one
//! [`Domain`]: the same support (compared exactly, coordinate by coordinate)
//! or the same grid.
//!
//! Internally both representations are handled uniformly as a vector of
//! densities together with a cell volume (`1` for point masses, the cell
//! width for grids); the mass carried by cell `i` is `density[i] * volume`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric;

/// A point of ℝ^m.
pub type Point = Vec<f64>;

/// Mass tolerance for the probability flag of point-mass measures.
pub const FINITE_MASS_TOL: f64 = 1e-12;
/// Midpoint-rule mass tolerance for the probability flag of grid densities.
pub const GRID_MASS_TOL: f64 = 1e-9;

/// Validated finite set of pairwise distinct points of one dimension.
#[derive(Debug, Clone)]
pub struct Support(Arc<[Point]>);

impl Support {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        let dim = points[0].len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    actual: p.len(),
                });
            }
            if let Some(j) = p.iter().position(|c| !c.is_finite()) {
                return Err(Error::NonFiniteValue { index, value: p[j] });
            }
        }
        // Exact coordinate comparison; sort indices lexicographically to find ties.
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            points[a]
                .iter()
                .zip(&points[b])
                .map(|(x, y)| (x + 0.0).total_cmp(&(y + 0.0)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoint { first, second });
            }
        }
        Ok(Support(points.into()))
    }

    /// Support `{0, 1, ..., n-1}` embedded in ℝ.
    pub fn range(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| vec![i as f64]).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0[0].len()
    }
}

impl PartialEq for Support {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

/// Uniform grid of `n_cells` cells on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    n_cells: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n_cells: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo && n_cells > 0) {
            return Err(Error::InvalidGrid { lo, hi, n_cells });
        }
        Ok(Grid { lo, hi, n_cells })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Cell width Δ.
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n_cells as f64
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(|i| self.midpoint(i))
    }
}

/// The Y-representation shared by all measures of one computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Points(Support),
    Grid(Grid),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Domain::Points(s) => s.len(),
            Domain::Grid(g) => g.n_cells(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Mass-per-density factor: `1` for point masses, Δ for grid cells.
    pub fn cell_volume(&self) -> f64 {
        match self {
            Domain::Points(_) => 1.0,
            Domain::Grid(g) => g.width(),
        }
    }

    /// Evaluates `f` at every support point (or grid midpoint, as a 1-vector).
    pub fn evaluate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Vec<f64> {
        match self {
            Domain::Points(s) => s.points().iter().map(|p| f(p)).collect(),
            Domain::Grid(g) => g.midpoints().map(|m| f(&[m])).collect(),
        }
    }
}

/// Weighted point masses on a finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    support: Support,
    weights: Vec<f64>,
    is_probability: bool,
}

impl FiniteMeasure {
    /// Validates `weights` against `support`; with `normalize` the weights are
    /// rescaled to total mass one.
    pub fn new(support: Support, weights: Vec<f64>, normalize: bool) -> Result<Self> {
        let (weights, is_probability) = validate_weights(weights, support.len(), normalize, FINITE_MASS_TOL, 1.0)?;
        Ok(FiniteMeasure {
            support,
            weights,
            is_probability,
        })
    }

    /// Unit weights on every support point.
    pub fn counting(support: Support) -> Self {
        let weights = vec![1.0; support.len()];
        let is_probability = support.len() == 1;
        FiniteMeasure {
            support,
            weights,
            is_probability,
        }
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_probability(&self) -> bool {
        self.is_probability
    }

    pub fn mass(&self) -> f64 {
        numeric::sum(self.weights.iter().copied())
    }
}

/// Nonnegative density values at the midpoints of a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    grid: Grid,
    values: Vec<f64>,
    is_probability: bool,
}

impl GridDensity {
    pub fn new(grid: Grid, values: Vec<f64>, normalize: bool) -> Result<Self> {
        let (values, is_probability) =
            validate_weights(values, grid.n_cells(), normalize, GRID_MASS_TOL, grid.width())?;
        Ok(GridDensity {
            grid,
            values,
            is_probability,
        })
    }

    /// Density `f` sampled at the cell midpoints.
    pub fn from_fn<F: FnMut(f64) -> f64>(grid: Grid, f: F, normalize: bool) -> Result<Self> {
        let values = grid.midpoints().map(f).collect();
        Self::new(grid, values, normalize)
    }

    /// The Lebesgue reference restricted to the grid (density one).
    pub fn lebesgue(grid: Grid) -> Self {
        let values = vec![1.0; grid.n_cells()];
        let is_probability = (grid.hi() - grid.lo() - 1.0).abs() <= GRID_MASS_TOL;
        GridDensity {
            grid,
            values,
            is_probability,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_probability(&self) -> bool {
        self.is_probability
    }

    /// Midpoint-rule integral of the density.
    pub fn mass(&self) -> f64 {
        numeric::sum(self.values.iter().copied()) * self.grid.width()
    }
}

fn validate_weights(
    mut weights: Vec<f64>,
    expected_len: usize,
    normalize: bool,
    tol: f64,
    volume: f64,
) -> Result<(Vec<f64>, bool)> {
    if weights.is_empty() {
        return Err(Error::EmptySupport);
    }
    if weights.len() != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            actual: weights.len(),
        });
    }
    for (index, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFiniteValue { index, value: w });
        }
        if w < 0.0 {
            return Err(Error::NegativeWeight { index, value: w });
        }
    }
    let mass = numeric::sum(weights.iter().copied()) * volume;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::ZeroMass { mass });
    }
    if normalize {
        weights.iter_mut().for_each(|w| *w /= mass);
        return Ok((weights, true));
    }
    Ok((weights, (mass - 1.0).abs() <= tol))
}

/// A measure in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Finite(FiniteMeasure),
    Grid(GridDensity),
}

impl From<FiniteMeasure> for Measure {
    fn from(m: FiniteMeasure) -> Self {
        Measure::Finite(m)
    }
}

impl From<GridDensity> for Measure {
    fn from(m: GridDensity) -> Self {
        Measure::Grid(m)
    }
}

impl Measure {
    /// Builds a measure on `domain` from densities with respect to its base
    /// (counting or Lebesgue).
    pub fn on_domain(domain: &Domain, densities: Vec<f64>, normalize: bool) -> Result<Self> {
        Ok(match domain {
            Domain::Points(s) => FiniteMeasure::new(s.clone(), densities, normalize)?.into(),
            Domain::Grid(g) => GridDensity::new(*g, densities, normalize)?.into(),
        })
    }

    /// Counting measure on a support, Lebesgue measure on a grid.
    pub fn base(domain: &Domain) -> Self {
        match domain {
            Domain::Points(s) => FiniteMeasure::counting(s.clone()).into(),
            Domain::Grid(g) => GridDensity::lebesgue(*g).into(),
        }
    }

    /// Construction from already-validated, normalized derived densities.
    pub(crate) fn derived_probability(domain: &Domain, densities: Vec<f64>) -> Self {
        debug_assert_eq!(densities.len(), domain.len());
        match domain {
            Domain::Points(s) => Measure::Finite(FiniteMeasure {
                support: s.clone(),
                weights: densities,
                is_probability: true,
            }),
            Domain::Grid(g) => Measure::Grid(GridDensity {
                grid: *g,
                values: densities,
                is_probability: true,
            }),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Measure::Finite(m) => Domain::Points(m.support.clone()),
            Measure::Grid(m) => Domain::Grid(m.grid),
        }
    }

    /// Densities with respect to the base measure of the domain.
    pub fn densities(&self) -> &[f64] {
        match self {
            Measure::Finite(m) => &m.weights,
            Measure::Grid(m) => &m.values,
        }
    }

    pub fn cell_volume(&self) -> f64 {
        match self {
            Measure::Finite(_) => 1.0,
            Measure::Grid(m) => m.grid.width(),
        }
    }

    pub fn len(&self) -> usize {
        self.densities().len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities().is_empty()
    }

    pub fn is_probability(&self) -> bool {
        match self {
            Measure::Finite(m) => m.is_probability,
            Measure::Grid(m) => m.is_probability,
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Measure::Finite(m) => m.mass(),
            Measure::Grid(m) => m.mass(),
        }
    }

    /// True when this is the unweighted counting measure or the Lebesgue density.
    pub fn is_base(&self) -> bool {
        self.densities().iter().all(|&d| d == 1.0)
    }

    pub fn same_representation(&self, other: &Measure) -> Result<()> {
        let same = match (self, other) {
            (Measure::Finite(a), Measure::Finite(b)) => a.support == b.support,
            (Measure::Grid(a), Measure::Grid(b)) => a.grid == b.grid,
            _ => false,
        };
        if same {
            Ok(())
        } else {
            Err(Error::RepresentationMismatch)
        }
    }

    pub fn on(&self, domain: &Domain) -> Result<()> {
        let same = match (self, domain) {
            (Measure::Finite(a), Domain::Points(s)) => &a.support == s,
            (Measure::Grid(a), Domain::Grid(g)) => &a.grid == g,
            _ => false,
        };
        if same {
            Ok(())
        } else {
            Err(Error::RepresentationMismatch)
        }
    }

    pub(crate) fn require_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::NonProbabilityMeasure { mass: self.mass() })
        }
    }
}

/// `∫ f dP`, where `f` lists the integrand on every support point or cell.
///
/// Points with zero `P`-mass are skipped, so `f` only needs to be finite on
/// the support of `P`.
pub fn expectation(f: &[f64], p: &Measure) -> Result<f64> {
    p.require_probability()?;
    if f.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            actual: f.len(),
        });
    }
    let mut acc = numeric::CompensatedSum::new();
    for (index, (&fv, &pv)) in f.iter().zip(p.densities()).enumerate() {
        if pv == 0.0 {
            continue;
        }
        if !fv.is_finite() {
            return Err(Error::NonFiniteValue { index, value: fv });
        }
        acc.add(fv * pv);
    }
    Ok(acc.total() * p.cell_volume())
}

/// Expectation of a scalar function of `y`.
pub fn expectation_fn<F: FnMut(&[f64]) -> f64>(f: F, p: &Measure) -> Result<f64> {
    let values = p.domain().evaluate(f);
    expectation(&values, p)
}

/// Conditional probability measure indexed by finitely many x-values.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalFamily {
    x_points: Support,
    members: Vec<Measure>,
}

impl ConditionalFamily {
    pub fn new(x_points: Support, members: Vec<Measure>) -> Result<Self> {
        if members.len() != x_points.len() {
            return Err(Error::LengthMismatch {
                expected: x_points.len(),
                actual: members.len(),
            });
        }
        for m in &members {
            m.require_probability()?;
            m.same_representation(&members[0])?;
        }
        Ok(ConditionalFamily { x_points, members })
    }

    /// Family built from rows of densities on a shared domain; rows are
    /// normalized when `normalize` is set.
    pub fn from_rows(x_points: Support, domain: &Domain, rows: Vec<Vec<f64>>, normalize: bool) -> Result<Self> {
        let members = rows
            .into_iter()
            .map(|r| Measure::on_domain(domain, r, normalize))
            .collect::<Result<Vec<_>>>()?;
        Self::new(x_points, members)
    }

    pub fn x_points(&self) -> &Support {
        &self.x_points
    }

    pub fn members(&self) -> &[Measure] {
        &self.members
    }

    pub fn member(&self, x_index: usize) -> Result<&Measure> {
        self.members.get(x_index).ok_or(Error::XIndexOutOfRange {
            index: x_index,
            len: self.members.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.members[0].domain()
    }

    /// Checks that `p_x` is a probability measure on exactly the x-points.
    pub(crate) fn aligned_with(&self, p_x: &FiniteMeasure) -> Result<()> {
        if !p_x.is_probability() {
            return Err(Error::NonProbabilityMeasure { mass: p_x.mass() });
        }
        if p_x.support() != &self.x_points {
            return Err(Error::IndexMismatch(
                "P_X support differs from the family's x-points".into(),
            ));
        }
        Ok(())
    }
}

/// Marginal `P_Y = Σ_x P_X(x) P_{Y|X=x}`.
pub fn marginal_y(cond: &ConditionalFamily, p_x: &FiniteMeasure) -> Result<Measure> {
    cond.aligned_with(p_x)?;
    let n = cond.members[0].len();
    let densities = (0..n)
        .map(|y| {
            numeric::sum(
                cond.members
                    .iter()
                    .zip(p_x.weights())
                    .map(|(m, &px)| px * m.densities()[y]),
            )
        })
        .collect();
    Ok(Measure::derived_probability(&cond.domain(), densities))
}

/// Convex combination `α P1 + (1 − α) P2` of two probability measures.
pub fn mix(p1: &Measure, p2: &Measure, alpha: f64) -> Result<Measure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    p1.same_representation(p2)?;
    p1.require_probability()?;
    p2.require_probability()?;
    let densities = p1
        .densities()
        .iter()
        .zip(p2.densities())
        .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
        .collect();
    Ok(Measure::derived_probability(&p1.domain(), densities))
}

/// `P ≪ Q`: every point or cell charged by `P` is charged by `Q`.
pub fn absolutely_continuous(p: &Measure, q: &Measure) -> Result<bool> {
    p.same_representation(q)?;
    Ok(p.densities()
        .iter()
        .zip(q.densities())
        .all(|(&a, &b)| a == 0.0 || b > 0.0))
}

/// `P ≪ Q` and `Q ≪ P`.
pub fn mutually_absolutely_continuous(p: &Measure, q: &Measure) -> Result<bool> {
    Ok(absolutely_continuous(p, q)? && absolutely_continuous(q, p)?)
}

/// Radon–Nikodym derivative `dP/dQ` per point or cell, `0` on `Q`-null points.
pub fn radon_nikodym(p: &Measure, q: &Measure) -> Result<Vec<f64>> {
    if !absolutely_continuous(p, q)? {
        return Err(Error::NotAbsolutelyContinuous {
            what: "P".into(),
            reference: "Q".into(),
            x_index: None,
        });
    }
    Ok(p.densities()
        .iter()
        .zip(q.densities())
        .map(|(&a, &b)| if b == 0.0 { 0.0 } else { a / b })
        .collect())
}

/// Total variation distance `½ Σ |p − q|`.
pub fn total_variation(p: &Measure, q: &Measure) -> Result<f64> {
    p.same_representation(q)?;
    let s = numeric::sum(p.densities().iter().zip(q.densities()).map(|(a, b)| (a - b).abs()));
    Ok(0.5 * s * p.cell_volume())
}
