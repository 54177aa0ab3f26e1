//! Scenario files: JSON descriptions of a cost table, reference measure,
//! conditional families and the identity checks to run on them.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "name": "two_point",
//!   "y_support": { "points": [[0], [1]] },
//!   "x_points": [[0]],
//!   "cost": [[0, 1]],
//!   "reference": "counting",
//!   "lambdas": ["0.69314718055994531"],
//!   "p_x": [1],
//!   "families": { "A": [[1, 0]], "B": [[0, 1]] },
//!   "pairs": [
//!     { "check": "gap_closed_form", "x_index": 0, "p1": "A", "p2": "B" }
//!   ]
//! }
//! ```
//!
//! - `y_support` is `{"points": [...]}` or `{"grid": {"lo", "hi", "n_cells"}}`.
//!   Points may be written as scalars when one-dimensional.
//! - `reference` is `"counting"` (points), `"lebesgue"` (grid) or
//!   `{"weights": [...]}` (densities on the Y-representation, not normalized).
//! - Every real may be a JSON number or a decimal string; strings are
//!   converted with round-to-nearest.
//! - `p_x` and the family rows are normalized on load.
//! - Each entry of `pairs` names a check and its arguments; every check runs
//!   once per value in `lambdas`. `expect` defaults to `"pass"`; a value
//!   `"error:<Kind>"` declares that the check must fail with that error.
//!
//! Check names and arguments:
//!
//! | `check` | arguments |
//! |---|---|
//! | `gap_closed_form` | `x_index`, `p1`, `p2` |
//! | `gap_closed_form_relative` | `x_index`, `p1`, `p2`, `direction` (`"p2"` or `"p1"`) |
//! | `gap_mixture_reference` | `x_index`, `p1`, `p2`, `alpha` |
//! | `expected_gap_closed_form` | `p1`, `p2` |
//! | `expected_gap_relative` | `p1`, `p2`, `direction` |
//! | `marginal_gap` | `family` |
//! | `gibbs_marginal_gap` | none |
//! | `free_energy_identities` | `x_index` |
//! | `variational_oracle` | `x_index`, optional `iters` (default 5000), `seed` (default 0) |

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gaps::{self, Direction, Term};
use crate::gibbs::{self, validate_lambda, CostTable};
use crate::measures::{total_variation, ConditionalFamily, Domain, FiniteMeasure, Grid, Measure, Support};
use crate::report::{CheckRecord, Report};

pub const SCHEMA_VERSION: u32 = 1;
/// Identity tolerance for point-mass scenarios.
pub const FINITE_TOLERANCE: f64 = 1e-10;
/// Identity tolerance for grid scenarios.
pub const GRID_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_ORACLE_ITERS: usize = 5000;

/// Input problems; the CLI maps all of them to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: {message}")]
    Invalid { origin: String, message: String },
}

/// A real written either as a JSON number or as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealRepr", into = "f64")]
pub struct Real(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<RealRepr> for Real {
    type Error = String;

    fn try_from(r: RealRepr) -> Result<Self, Self::Error> {
        match r {
            RealRepr::Number(v) => Ok(Real(v)),
            RealRepr::Text(s) => s
                .trim()
                .parse::<f64>()
                .map(Real)
                .map_err(|_| format!("`{s}` is not a decimal number")),
        }
    }
}

impl From<Real> for f64 {
    fn from(r: Real) -> f64 {
        r.0
    }
}

/// A point written as a scalar or as a coordinate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Scalar(Real),
    Vector(Vec<Real>),
}

impl PointSpec {
    fn coords(&self) -> Vec<f64> {
        match self {
            PointSpec::Scalar(r) => vec![r.0],
            PointSpec::Vector(v) => v.iter().map(|r| r.0).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum YSupportSpec {
    Points(Vec<PointSpec>),
    Grid { lo: Real, hi: Real, n_cells: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSpec {
    Named(String),
    Weights { weights: Vec<Real> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionSpec {
    P2,
    P1,
}

impl From<DirectionSpec> for Direction {
    fn from(d: DirectionSpec) -> Self {
        match d {
            DirectionSpec::P2 => Direction::P2Reference,
            DirectionSpec::P1 => Direction::P1Reference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    GapClosedForm,
    GapClosedFormRelative,
    GapMixtureReference,
    ExpectedGapClosedForm,
    ExpectedGapRelative,
    MarginalGap,
    GibbsMarginalGap,
    FreeEnergyIdentities,
    VariationalOracle,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::GapClosedForm => "gap_closed_form",
            CheckKind::GapClosedFormRelative => "gap_closed_form_relative",
            CheckKind::GapMixtureReference => "gap_mixture_reference",
            CheckKind::ExpectedGapClosedForm => "expected_gap_closed_form",
            CheckKind::ExpectedGapRelative => "expected_gap_relative",
            CheckKind::MarginalGap => "marginal_gap",
            CheckKind::GibbsMarginalGap => "gibbs_marginal_gap",
            CheckKind::FreeEnergyIdentities => "free_energy_identities",
            CheckKind::VariationalOracle => "variational_oracle",
        }
    }

    /// Short descriptive tag of the identity a check exercises.
    pub fn identity(self) -> &'static str {
        match self {
            CheckKind::GapClosedForm => "gap/gibbs-four-term",
            CheckKind::GapClosedFormRelative => "gap/relative-reference",
            CheckKind::GapMixtureReference => "gap/mixture-reference",
            CheckKind::ExpectedGapClosedForm => "expected-gap/gibbs-four-term",
            CheckKind::ExpectedGapRelative => "expected-gap/x-dependent-reference",
            CheckKind::MarginalGap => "marginal-gap/mutual-lautum-cross",
            CheckKind::GibbsMarginalGap => "marginal-gap/gibbs-mutual-plus-lautum",
            CheckKind::FreeEnergyIdentities => "free-energy/two-sided",
            CheckKind::VariationalOracle => "free-energy/variational-optimum",
        }
    }
}

/// One entry of `pairs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: CheckKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

impl CheckSpec {
    pub fn new(check: CheckKind) -> Self {
        CheckSpec {
            check,
            x_index: None,
            p1: None,
            p2: None,
            family: None,
            direction: None,
            alpha: None,
            iters: None,
            seed: None,
            expect: None,
        }
    }
}

/// The on-disk document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    pub name: String,
    pub y_support: YSupportSpec,
    pub x_points: Vec<PointSpec>,
    pub cost: Vec<Vec<Real>>,
    pub reference: ReferenceSpec,
    pub lambdas: Vec<Real>,
    pub p_x: Vec<Real>,
    pub families: BTreeMap<String, Vec<Vec<Real>>>,
    pub pairs: Vec<CheckSpec>,
}

/// What a check is expected to do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    Error(String),
}

impl Expectation {
    fn parse(s: Option<&str>) -> Result<Self, String> {
        match s {
            None | Some("pass") => Ok(Expectation::Pass),
            Some(other) => match other.strip_prefix("error:") {
                Some(kind) if !kind.is_empty() => Ok(Expectation::Error(kind.to_string())),
                _ => Err(format!("expect must be \"pass\" or \"error:<Kind>\", got `{other}`")),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            Expectation::Pass => "pass".into(),
            Expectation::Error(k) => format!("error:{k}"),
        }
    }
}

/// A validated check with family names resolved to indices.
#[derive(Debug, Clone)]
pub struct Check {
    pub kind: CheckKind,
    pub label: String,
    pub expect: Expectation,
    x_index: usize,
    p1: usize,
    p2: usize,
    direction: Direction,
    alpha: f64,
    iters: usize,
    seed: u64,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub domain: Domain,
    pub cost: CostTable,
    pub reference: Measure,
    pub lambdas: Vec<f64>,
    pub p_x: FiniteMeasure,
    pub families: Vec<(String, ConditionalFamily)>,
    pub checks: Vec<Check>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: origin.clone(),
            source,
        })?;
        Self::from_json_str(&text, &origin)
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_file(file).map_err(|message| ScenarioError::Invalid {
            origin: origin.to_string(),
            message,
        })
    }

    /// Validates every dimension cross-check of a parsed document.
    pub fn from_file(file: ScenarioFile) -> Result<Self, String> {
        if file.schema != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                file.schema
            ));
        }
        let ctx = |what: &str| {
            let what = what.to_string();
            move |e: Error| format!("{what}: {e}")
        };
        let domain = match &file.y_support {
            YSupportSpec::Points(points) => {
                Domain::Points(Support::new(points.iter().map(PointSpec::coords).collect()).map_err(ctx("y_support"))?)
            }
            YSupportSpec::Grid { lo, hi, n_cells } => {
                Domain::Grid(Grid::new(lo.0, hi.0, *n_cells).map_err(ctx("y_support"))?)
            }
        };
        let x_points = Support::new(file.x_points.iter().map(PointSpec::coords).collect()).map_err(ctx("x_points"))?;
        let cost_rows = file.cost.iter().map(|r| r.iter().map(|v| v.0).collect()).collect();
        let cost = CostTable::new(x_points.clone(), domain.clone(), cost_rows).map_err(ctx("cost"))?;
        let reference = match &file.reference {
            ReferenceSpec::Named(n) => match (n.as_str(), &domain) {
                ("counting", Domain::Points(_)) | ("lebesgue", Domain::Grid(_)) => Measure::base(&domain),
                ("counting", Domain::Grid(_)) => return Err("reference: counting measure needs a point support".into()),
                ("lebesgue", Domain::Points(_)) => return Err("reference: lebesgue measure needs a grid".into()),
                (other, _) => return Err(format!("reference: unknown reference `{other}`")),
            },
            ReferenceSpec::Weights { weights } => {
                Measure::on_domain(&domain, weights.iter().map(|w| w.0).collect(), false).map_err(ctx("reference"))?
            }
        };
        if file.lambdas.is_empty() {
            return Err("lambdas: at least one value is required".into());
        }
        let lambdas: Vec<f64> = file.lambdas.iter().map(|l| l.0).collect();
        for &l in &lambdas {
            validate_lambda(l).map_err(ctx("lambdas"))?;
        }
        let p_x =
            FiniteMeasure::new(x_points.clone(), file.p_x.iter().map(|w| w.0).collect(), true).map_err(ctx("p_x"))?;

        let mut families = Vec::new();
        for (name, rows) in &file.families {
            let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v.0).collect()).collect();
            let fam = ConditionalFamily::from_rows(x_points.clone(), &domain, rows, true)
                .map_err(ctx(&format!("families.{name}")))?;
            families.push((name.clone(), fam));
        }

        let mut checks = Vec::new();
        for (i, spec) in file.pairs.iter().enumerate() {
            checks.push(resolve_check(spec, &families, x_points.len()).map_err(|e| format!("pairs[{i}]: {e}"))?);
        }
        Ok(Scenario {
            name: file.name,
            domain,
            cost,
            reference,
            lambdas,
            p_x,
            families,
            checks,
        })
    }

    pub fn default_tolerance(&self) -> f64 {
        match self.domain {
            Domain::Points(_) => FINITE_TOLERANCE,
            Domain::Grid(_) => GRID_TOLERANCE,
        }
    }

    fn family(&self, index: usize) -> &ConditionalFamily {
        &self.families[index].1
    }

    /// Runs every check at every λ. Records come back in declaration order,
    /// λ-major within each check.
    pub fn run(&self, tolerance: Option<f64>) -> Report {
        let tolerance = tolerance.unwrap_or_else(|| self.default_tolerance());
        let start = Instant::now();
        let jobs: Vec<(&Check, f64)> = self
            .checks
            .iter()
            .flat_map(|c| self.lambdas.iter().map(move |&l| (c, l)))
            .collect();
        let records = jobs
            .par_iter()
            .map(|&(check, lambda)| self.run_check(check, lambda, tolerance))
            .collect();
        Report::new(self.name.clone(), records, start.elapsed())
    }

    fn run_check(&self, check: &Check, lambda: f64, tolerance: f64) -> CheckRecord {
        let outcome = self.evaluate(check, lambda);
        let mut record = CheckRecord {
            check: check.label.clone(),
            identity: check.kind.identity().to_string(),
            lambda,
            expect: check.expect.label(),
            direct: None,
            closed_form: None,
            discrepancy: None,
            tolerance,
            pass: false,
            error: None,
            terms: Vec::new(),
        };
        match (outcome, &check.expect) {
            (Ok(ev), expect) => {
                record.pass = *expect == Expectation::Pass && ev.discrepancy <= tolerance;
                record.direct = Some(ev.direct);
                record.closed_form = Some(ev.closed_form);
                record.discrepancy = Some(ev.discrepancy);
                record.terms = ev.terms;
            }
            (Err(e), Expectation::Error(kind)) => {
                record.pass = e.kind() == kind;
                record.error = Some(format!("{}: {e}", e.kind()));
            }
            (Err(e), Expectation::Pass) => {
                record.error = Some(format!("{}: {e}", e.kind()));
            }
        }
        record
    }

    fn evaluate(&self, c: &Check, lambda: f64) -> Result<Evaluation, Error> {
        let h = &self.cost;
        let q = &self.reference;
        let member = |fam: usize| &self.family(fam).members()[c.x_index];
        Ok(match c.kind {
            CheckKind::GapClosedForm => {
                gaps::gap_closed_form(h, c.x_index, member(c.p1), member(c.p2), q, lambda)?.into()
            }
            CheckKind::GapClosedFormRelative => {
                gaps::gap_closed_form_relative(h, c.x_index, member(c.p1), member(c.p2), c.direction, lambda)?.into()
            }
            CheckKind::GapMixtureReference => {
                gaps::gap_mixture_reference(h, c.x_index, member(c.p1), member(c.p2), c.alpha, lambda)?.into()
            }
            CheckKind::ExpectedGapClosedForm => {
                gaps::expected_gap_closed_form(h, self.family(c.p1), self.family(c.p2), &self.p_x, q, lambda)?.into()
            }
            CheckKind::ExpectedGapRelative => {
                gaps::expected_gap_relative(h, self.family(c.p1), self.family(c.p2), &self.p_x, c.direction, lambda)?
                    .into()
            }
            CheckKind::MarginalGap => gaps::marginal_gap(h, self.family(c.p1), &self.p_x, q, lambda)?.into(),
            CheckKind::GibbsMarginalGap => gaps::gibbs_marginal_gap(h, q, lambda, &self.p_x)?.into(),
            CheckKind::FreeEnergyIdentities => {
                let g = gibbs::gibbs_tilt(h, q, lambda, c.x_index)?;
                let ids = gibbs::free_energy_identities(&g, h, q, c.x_index)?;
                let mut terms = vec![
                    Term {
                        name: "K(-lambda)",
                        value: g.log_partition,
                    },
                    Term {
                        name: "via_gibbs",
                        value: ids.via_gibbs,
                    },
                ];
                if let Some(v) = ids.via_reference {
                    terms.push(Term {
                        name: "via_reference",
                        value: v,
                    });
                }
                let worst = match ids.via_reference {
                    Some(v) if (v - ids.free_energy).abs() > (ids.via_gibbs - ids.free_energy).abs() => v,
                    _ => ids.via_gibbs,
                };
                Evaluation {
                    direct: ids.free_energy,
                    closed_form: worst,
                    discrepancy: ids.max_discrepancy,
                    terms,
                }
            }
            CheckKind::VariationalOracle => {
                let g = gibbs::gibbs_tilt(h, q, lambda, c.x_index)?;
                let sol = gibbs::variational_oracle(h, q, lambda, c.x_index, c.iters, c.seed)?;
                let tv = total_variation(&sol.measure, &g.measure)?;
                Evaluation {
                    direct: sol.objective,
                    closed_form: g.free_energy,
                    discrepancy: (sol.objective - g.free_energy).abs(),
                    terms: vec![
                        Term {
                            name: "total_variation",
                            value: tv,
                        },
                        Term {
                            name: "iterations",
                            value: sol.iterations as f64,
                        },
                    ],
                }
            }
        })
    }
}

struct Evaluation {
    direct: f64,
    closed_form: f64,
    discrepancy: f64,
    terms: Vec<Term>,
}

impl From<gaps::GapDecomposition> for Evaluation {
    fn from(d: gaps::GapDecomposition) -> Self {
        Evaluation {
            direct: d.direct,
            closed_form: d.closed_form,
            discrepancy: d.discrepancy,
            terms: d.terms,
        }
    }
}

fn resolve_check(spec: &CheckSpec, families: &[(String, ConditionalFamily)], nx: usize) -> Result<Check, String> {
    let find = |field: &str, name: &Option<String>| -> Result<usize, String> {
        let name = name.as_ref().ok_or_else(|| format!("`{field}` is required"))?;
        families
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| format!("{field}: unknown family `{name}`"))
    };
    let x_index = |required: bool| -> Result<usize, String> {
        match spec.x_index {
            Some(i) if i < nx => Ok(i),
            Some(i) => Err(format!("x_index {i} out of range ({nx} x-points)")),
            None if required => Err("`x_index` is required".into()),
            None => Ok(0),
        }
    };
    let direction = |required: bool| -> Result<Direction, String> {
        match spec.direction {
            Some(d) => Ok(d.into()),
            None if required => Err("`direction` is required".into()),
            None => Ok(Direction::P2Reference),
        }
    };
    let mut check = Check {
        kind: spec.check,
        label: String::new(),
        expect: Expectation::parse(spec.expect.as_deref())?,
        x_index: 0,
        p1: 0,
        p2: 0,
        direction: Direction::P2Reference,
        alpha: 0.5,
        iters: spec.iters.unwrap_or(DEFAULT_ORACLE_ITERS),
        seed: spec.seed.unwrap_or(0),
    };
    let name = spec.check.name();
    let fam = |i: usize| families[i].0.as_str();
    check.label = match spec.check {
        CheckKind::GapClosedForm | CheckKind::GapClosedFormRelative | CheckKind::GapMixtureReference => {
            check.x_index = x_index(true)?;
            check.p1 = find("p1", &spec.p1)?;
            check.p2 = find("p2", &spec.p2)?;
            let base = format!("{name}[x={},p1={},p2={}", check.x_index, fam(check.p1), fam(check.p2));
            match spec.check {
                CheckKind::GapClosedFormRelative => {
                    check.direction = direction(true)?;
                    format!("{base},ref={}]", direction_label(check.direction))
                }
                CheckKind::GapMixtureReference => {
                    let alpha = spec.alpha.ok_or("`alpha` is required")?.0;
                    if !(alpha > 0.0 && alpha < 1.0) {
                        return Err(format!("alpha {alpha} outside (0, 1)"));
                    }
                    check.alpha = alpha;
                    format!("{base},alpha={alpha}]")
                }
                _ => format!("{base}]"),
            }
        }
        CheckKind::ExpectedGapClosedForm | CheckKind::ExpectedGapRelative => {
            check.p1 = find("p1", &spec.p1)?;
            check.p2 = find("p2", &spec.p2)?;
            let base = format!("{name}[p1={},p2={}", fam(check.p1), fam(check.p2));
            if spec.check == CheckKind::ExpectedGapRelative {
                check.direction = direction(true)?;
                format!("{base},ref={}]", direction_label(check.direction))
            } else {
                format!("{base}]")
            }
        }
        CheckKind::MarginalGap => {
            check.p1 = find("family", &spec.family)?;
            format!("{name}[family={}]", fam(check.p1))
        }
        CheckKind::GibbsMarginalGap => name.to_string(),
        CheckKind::FreeEnergyIdentities => {
            check.x_index = x_index(true)?;
            format!("{name}[x={}]", check.x_index)
        }
        CheckKind::VariationalOracle => {
            check.x_index = x_index(true)?;
            format!("{name}[x={},seed={}]", check.x_index, check.seed)
        }
    };
    Ok(check)
}

fn direction_label(d: Direction) -> &'static str {
    match d {
        Direction::P2Reference => "p2",
        Direction::P1Reference => "p1",
    }
}
