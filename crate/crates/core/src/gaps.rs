//! Gap functionals, computed directly and through their information-theoretic
//! decompositions.
//!
//! Every closed-form routine returns a [`GapDecomposition`] carrying the
//! direct (brute-force) value, the closed-form value, every divergence term
//! that entered the closed form and the absolute discrepancy between the two.
//!
//! | routine | closed form (all divided by λ) |
//! |---|---|
//! | [`gap_closed_form`] | `D(P1‖G) − D(P2‖G) + D(P2‖Q) − D(P1‖Q)`, `G` the `(h,Q,λ)` tilt |
//! | [`gap_closed_form_relative`] | `Q = P2`: `D(P1‖G) − D(P2‖G) − D(P1‖P2)`; `Q = P1`: `… + D(P2‖P1)` |
//! | [`gap_mixture_reference`] | as [`gap_closed_form`] with `Q = αP1 + (1−α)P2` |
//! | [`expected_gap_closed_form`] | `P_X`-average of the four-term form |
//! | [`expected_gap_relative`] | `P_X`-average of the relative form, reference `P^(2)_{Y|X=x}` or `P^(1)_{Y|X=x}` |
//! | [`marginal_gap`] | `I + L + E_{P_Y⊗P_X}[ln dP_{Y|X}/dG] − E_{P_{Y|X}P_X}[ln dP_{Y|X}/dG]` |
//! | [`gibbs_marginal_gap`] | `I + L` for the Gibbs family itself |
//!
//! A term that is infinite although the identity claims a finite total makes
//! the routine fail with [`Error::InfiniteDivergence`]; no `∞ − ∞` is formed.

use crate::divergences::{entropy, kl, lautum_information, mutual_information, weighted_over_x};
use crate::error::{Error, Result};
use crate::gibbs::{finite_term, gibbs_tilt, validate_lambda, CostTable};
use crate::measures::{
    absolutely_continuous, expectation, marginal_y, mix, mutually_absolutely_continuous, ConditionalFamily,
    FiniteMeasure, Measure,
};
use crate::numeric::{self, CompensatedSum};

/// One named contribution to a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
}

/// Which reference measure the closed form was built on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceTag {
    Explicit,
    P2AsReference,
    P1AsReference,
    Mixture(f64),
}

impl std::fmt::Display for ReferenceTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReferenceTag::Explicit => write!(f, "explicit"),
            ReferenceTag::P2AsReference => write!(f, "P2-as-reference"),
            ReferenceTag::P1AsReference => write!(f, "P1-as-reference"),
            ReferenceTag::Mixture(a) => write!(f, "mixture({a})"),
        }
    }
}

/// Reference choice for the relative decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Requires `P1 ≪ P2`.
    P2Reference,
    /// Requires `P2 ≪ P1`.
    P1Reference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapDecomposition {
    pub direct: f64,
    pub closed_form: f64,
    pub terms: Vec<Term>,
    pub lambda: f64,
    pub reference: ReferenceTag,
    pub discrepancy: f64,
}

impl GapDecomposition {
    fn new(direct: f64, closed_form: f64, terms: Vec<Term>, lambda: f64, reference: ReferenceTag) -> Self {
        GapDecomposition {
            direct,
            closed_form,
            terms,
            lambda,
            reference,
            discrepancy: (direct - closed_form).abs(),
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

fn term(name: &'static str, value: f64) -> Term {
    Term { name, value }
}

/// `G_h(x, P1, P2) = E_{P1}[h(x, ·)] − E_{P2}[h(x, ·)]`.
pub fn gap_direct(h: &CostTable, x_index: usize, p1: &Measure, p2: &Measure) -> Result<f64> {
    p1.same_representation(p2)?;
    p1.on(h.domain())?;
    let row = h.row(x_index)?;
    let d = expectation(row, p1)? - expectation(row, p2)?;
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NonFiniteExpectation)
    }
}

fn require_ac(p: &Measure, q: &Measure, what: &str, reference: &str) -> Result<()> {
    if absolutely_continuous(p, q)? {
        Ok(())
    } else {
        Err(Error::NotAbsolutelyContinuous {
            what: what.into(),
            reference: reference.into(),
            x_index: None,
        })
    }
}

/// Four-term decomposition against the `(h, Q, λ)` tilt.
pub fn gap_closed_form(
    h: &CostTable,
    x_index: usize,
    p1: &Measure,
    p2: &Measure,
    q: &Measure,
    lambda: f64,
) -> Result<GapDecomposition> {
    validate_lambda(lambda)?;
    p1.same_representation(q)?;
    p2.same_representation(q)?;
    require_ac(p1, q, "P1", "Q")?;
    require_ac(p2, q, "P2", "Q")?;
    let direct = gap_direct(h, x_index, p1, p2)?;
    let g = gibbs_tilt(h, q, lambda, x_index)?;

    let d1g = finite_term(kl(p1, &g.measure)?, "D(P1||Gibbs)")?;
    let d2g = finite_term(kl(p2, &g.measure)?, "D(P2||Gibbs)")?;
    let d2q = finite_term(kl(p2, q)?, "D(P2||Q)")?;
    let d1q = finite_term(kl(p1, q)?, "D(P1||Q)")?;
    let closed = numeric::sum([d1g, -d2g, d2q, -d1q]) / lambda;

    let mut terms = vec![
        term("D(P1||Gibbs)", d1g),
        term("D(P2||Gibbs)", d2g),
        term("D(P2||Q)", d2q),
        term("D(P1||Q)", d1q),
        term("K(-lambda)", g.log_partition),
    ];
    if q.is_base() {
        // Against counting (Lebesgue) measure −D(P‖Q) is the Shannon (differential) entropy.
        terms.push(term("H(P1)", entropy(p1)?));
        terms.push(term("H(P2)", entropy(p2)?));
    }
    Ok(GapDecomposition::new(
        direct,
        closed,
        terms,
        lambda,
        ReferenceTag::Explicit,
    ))
}

/// Decomposition using `P2` (or `P1`) itself as the reference measure.
pub fn gap_closed_form_relative(
    h: &CostTable,
    x_index: usize,
    p1: &Measure,
    p2: &Measure,
    direction: Direction,
    lambda: f64,
) -> Result<GapDecomposition> {
    validate_lambda(lambda)?;
    p1.same_representation(p2)?;
    let direct = gap_direct(h, x_index, p1, p2)?;
    let (reference, tag) = match direction {
        Direction::P2Reference => {
            require_ac(p1, p2, "P1", "P2")?;
            (p2, ReferenceTag::P2AsReference)
        }
        Direction::P1Reference => {
            require_ac(p2, p1, "P2", "P1")?;
            (p1, ReferenceTag::P1AsReference)
        }
    };
    let g = gibbs_tilt(h, reference, lambda, x_index)?;
    let d1g = finite_term(kl(p1, &g.measure)?, "D(P1||Gibbs)")?;
    let d2g = finite_term(kl(p2, &g.measure)?, "D(P2||Gibbs)")?;
    let (closed, cross) = match direction {
        Direction::P2Reference => {
            let d12 = finite_term(kl(p1, p2)?, "D(P1||P2)")?;
            (numeric::sum([d1g, -d2g, -d12]) / lambda, term("D(P1||P2)", d12))
        }
        Direction::P1Reference => {
            let d21 = finite_term(kl(p2, p1)?, "D(P2||P1)")?;
            (numeric::sum([d1g, -d2g, d21]) / lambda, term("D(P2||P1)", d21))
        }
    };
    let terms = vec![term("D(P1||Gibbs)", d1g), term("D(P2||Gibbs)", d2g), cross];
    Ok(GapDecomposition::new(direct, closed, terms, lambda, tag))
}

/// [`gap_closed_form`] with `Q = αP1 + (1 − α)P2`, valid for any `P1`, `P2`.
pub fn gap_mixture_reference(
    h: &CostTable,
    x_index: usize,
    p1: &Measure,
    p2: &Measure,
    alpha: f64,
    lambda: f64,
) -> Result<GapDecomposition> {
    let q = mix(p1, p2, alpha)?;
    let mut d = gap_closed_form(h, x_index, p1, p2, &q, lambda)?;
    d.reference = ReferenceTag::Mixture(alpha);
    Ok(d)
}

fn check_conditional(h: &CostTable, cond: &ConditionalFamily, p_x: &FiniteMeasure) -> Result<()> {
    cond.aligned_with(p_x)?;
    if h.x_points() != cond.x_points() {
        return Err(Error::IndexMismatch(
            "cost table and family use different x-points".into(),
        ));
    }
    cond.members()[0].on(h.domain())
}

/// `Ḡ_h = Σ_x P_X(x) G_h(x, P^(1)_{Y|X=x}, P^(2)_{Y|X=x})`.
pub fn expected_gap_direct(
    h: &CostTable,
    cond1: &ConditionalFamily,
    cond2: &ConditionalFamily,
    p_x: &FiniteMeasure,
) -> Result<f64> {
    check_conditional(h, cond1, p_x)?;
    check_conditional(h, cond2, p_x)?;
    let mut acc = CompensatedSum::new();
    for (x, &w) in p_x.weights().iter().enumerate() {
        acc.add(w * gap_direct(h, x, &cond1.members()[x], &cond2.members()[x])?);
    }
    Ok(acc.total())
}

/// `P_X`-weighted average of per-x decompositions. Terms are matched by
/// position; every per-x decomposition must produce the same term list.
fn average_over_x<F>(p_x: &FiniteMeasure, mut per_x: F) -> Result<(f64, Vec<Term>)>
where
    F: FnMut(usize) -> Result<GapDecomposition>,
{
    let mut closed = CompensatedSum::new();
    let mut names: Vec<&'static str> = Vec::new();
    let mut sums: Vec<CompensatedSum> = Vec::new();
    for (x, &w) in p_x.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let d = per_x(x).map_err(|e| e.at_x_index(x))?;
        if names.is_empty() {
            names = d.terms.iter().map(|t| t.name).collect();
            sums = vec![CompensatedSum::new(); names.len()];
        }
        closed.add(w * d.closed_form);
        for (s, t) in sums.iter_mut().zip(&d.terms) {
            s.add(w * t.value);
        }
    }
    let terms = names
        .into_iter()
        .zip(sums)
        .map(|(name, s)| term(name, s.total()))
        .collect();
    Ok((closed.total(), terms))
}

/// Conditional version of [`gap_closed_form`] with a common reference `Q`.
pub fn expected_gap_closed_form(
    h: &CostTable,
    cond1: &ConditionalFamily,
    cond2: &ConditionalFamily,
    p_x: &FiniteMeasure,
    q: &Measure,
    lambda: f64,
) -> Result<GapDecomposition> {
    validate_lambda(lambda)?;
    let direct = expected_gap_direct(h, cond1, cond2, p_x)?;
    let (closed, mut terms) = average_over_x(p_x, |x| {
        gap_closed_form(h, x, &cond1.members()[x], &cond2.members()[x], q, lambda)
    })?;
    // Per-x entropies average into the conditional entropies.
    for t in &mut terms {
        t.name = match t.name {
            "H(P1)" => "H(P1|X)",
            "H(P2)" => "H(P2|X)",
            other => other,
        };
    }
    Ok(GapDecomposition::new(
        direct,
        closed,
        terms,
        lambda,
        ReferenceTag::Explicit,
    ))
}

/// Conditional version of [`gap_closed_form_relative`]; the reference is the
/// x-dependent member `P^(2)_{Y|X=x}` (or `P^(1)_{Y|X=x}`).
pub fn expected_gap_relative(
    h: &CostTable,
    cond1: &ConditionalFamily,
    cond2: &ConditionalFamily,
    p_x: &FiniteMeasure,
    direction: Direction,
    lambda: f64,
) -> Result<GapDecomposition> {
    validate_lambda(lambda)?;
    let direct = expected_gap_direct(h, cond1, cond2, p_x)?;
    let (closed, terms) = average_over_x(p_x, |x| {
        gap_closed_form_relative(h, x, &cond1.members()[x], &cond2.members()[x], direction, lambda)
    })?;
    let tag = match direction {
        Direction::P2Reference => ReferenceTag::P2AsReference,
        Direction::P1Reference => ReferenceTag::P1AsReference,
    };
    Ok(GapDecomposition::new(direct, closed, terms, lambda, tag))
}

/// Pieces of the marginal-versus-joint decomposition.
struct MarginalPieces {
    direct: f64,
    mutual: f64,
    lautum: f64,
    cross_marginal: f64,
    cross_conditional: f64,
}

fn marginal_pieces(
    h: &CostTable,
    cond: &ConditionalFamily,
    p_x: &FiniteMeasure,
    q: &Measure,
    lambda: f64,
) -> Result<MarginalPieces> {
    validate_lambda(lambda)?;
    check_conditional(h, cond, p_x)?;
    cond.members()[0].same_representation(q)?;
    let p_y = marginal_y(cond, p_x)?;

    // Hypotheses at every P_X-positive index: (a) domination by Q, (b) mutual
    // absolute continuity of P_Y and the member.
    for (x, &w) in p_x.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let member = &cond.members()[x];
        require_ac(&p_y, q, "P_Y", "Q").map_err(|e| e.at_x_index(x))?;
        require_ac(member, q, "P_Y|X", "Q").map_err(|e| e.at_x_index(x))?;
        if !mutually_absolutely_continuous(&p_y, member)? {
            return Err(Error::MutualContinuityViolated { x_index: x });
        }
    }

    let direct = weighted_over_x(p_x, |x| {
        // Zero-weight indices are skipped: the direct value is the same sum.
        gap_direct(h, x, &p_y, &cond.members()[x])
    })?;
    let mutual = finite_term(mutual_information(cond, p_x)?, "I")?;
    let lautum = finite_term(lautum_information(cond, p_x)?, "L")?;

    let vol = q.cell_volume();
    let mut cross_marginal = CompensatedSum::new();
    let mut cross_conditional = CompensatedSum::new();
    for (x, &w) in p_x.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let member = &cond.members()[x];
        let g = gibbs_tilt(h, q, lambda, x)?;
        let mut on_marginal = CompensatedSum::new();
        let mut on_member = CompensatedSum::new();
        for ((&py, &pm), &pg) in p_y
            .densities()
            .iter()
            .zip(member.densities())
            .zip(g.measure.densities())
        {
            if py == 0.0 {
                continue;
            }
            // pm > 0 by mutual continuity, pg > 0 because pm ≪ Q.
            let log_ratio = (pm / pg).ln();
            on_marginal.add(py * log_ratio);
            on_member.add(pm * log_ratio);
        }
        cross_marginal.add(w * on_marginal.total() * vol);
        cross_conditional.add(w * on_member.total() * vol);
    }
    Ok(MarginalPieces {
        direct,
        mutual,
        lautum,
        cross_marginal: cross_marginal.total(),
        cross_conditional: cross_conditional.total(),
    })
}

/// `Ḡ_h(P_Y, P_{Y|X}, P_X)`: the change from the joint `P_{Y|X}P_X` to the
/// product of marginals, decomposed into mutual and lautum information plus
/// two cross terms against the `(h, Q, λ)` Gibbs family.
pub fn marginal_gap(
    h: &CostTable,
    cond: &ConditionalFamily,
    p_x: &FiniteMeasure,
    q: &Measure,
    lambda: f64,
) -> Result<GapDecomposition> {
    let m = marginal_pieces(h, cond, p_x, q, lambda)?;
    let closed = numeric::sum([m.mutual, m.lautum, m.cross_marginal, -m.cross_conditional]) / lambda;
    let terms = vec![
        term("I", m.mutual),
        term("L", m.lautum),
        term("cross(P_Y x P_X)", m.cross_marginal),
        term("cross(P_Y|X P_X)", m.cross_conditional),
    ];
    Ok(GapDecomposition::new(
        m.direct,
        closed,
        terms,
        lambda,
        ReferenceTag::Explicit,
    ))
}

/// Builds the `(h, Q, λ)` Gibbs conditional family on the x-points of `h`.
pub fn gibbs_family(h: &CostTable, q: &Measure, lambda: f64) -> Result<ConditionalFamily> {
    let members = (0..h.x_points().len())
        .map(|x| gibbs_tilt(h, q, lambda, x).map(|g| g.measure))
        .collect::<Result<Vec<_>>>()?;
    ConditionalFamily::new(h.x_points().clone(), members)
}

/// Marginal gap of the Gibbs family: `λ·Ḡ_h = I + L`. The cross terms of
/// [`marginal_gap`] are reported and must vanish.
pub fn gibbs_marginal_gap(h: &CostTable, q: &Measure, lambda: f64, p_x: &FiniteMeasure) -> Result<GapDecomposition> {
    validate_lambda(lambda)?;
    let family = gibbs_family(h, q, lambda)?;
    let m = marginal_pieces(h, &family, p_x, q, lambda)?;
    let closed = (m.mutual + m.lautum) / lambda;
    let terms = vec![
        term("I", m.mutual),
        term("L", m.lautum),
        term("cross(P_Y x P_X)", m.cross_marginal),
        term("cross(P_Y|X P_X)", m.cross_conditional),
    ];
    Ok(GapDecomposition::new(
        m.direct,
        closed,
        terms,
        lambda,
        ReferenceTag::Explicit,
    ))
}
