//! Closed-form expressions for the change of an expectation under a change of
//! probability measure, and brute-force machinery to check them.
//!
//! For a cost `h(x, y)` the gap `E_{P1}[h] − E_{P2}[h]` can be written with
//! relative entropies against a Gibbs (exponentially tilted) measure built
//! from any reference `Q` that dominates both `P1` and `P2`. Averaged over a
//! conditional family, and specialized to the marginal-versus-joint change,
//! the same gap becomes a combination of mutual and lautum information.
//!
//! Modules, bottom-up:
//!
//! - [`measures`]: finite point-mass measures and 1-D grid densities,
//!   absolute continuity, Radon–Nikodym ratios, marginals and mixtures.
//! - [`divergences`]: KL divergence, entropies, mutual and lautum information.
//! - [`gibbs`]: log-partition function, tilting, free-energy identities and a
//!   mirror-descent solver for the KL-regularized problem.
//! - [`gaps`]: the gap functionals computed directly and in closed form, with
//!   every term recorded.
//! - [`scenario`], [`report`], [`generate`]: the JSON scenario runner behind
//!   the `tiltgap` binary.
//!
//! ```
//! use tiltgap::prelude::*;
//!
//! let y = Domain::Points(Support::range(2)?);
//! let h = CostTable::single(y.clone(), vec![0.0, 1.0])?;
//! let p1 = Measure::on_domain(&y, vec![1.0, 0.0], false)?;
//! let p2 = Measure::on_domain(&y, vec![0.0, 1.0], false)?;
//! let counting = Measure::base(&y);
//!
//! let gap = gap_closed_form(&h, 0, &p1, &p2, &counting, std::f64::consts::LN_2)?;
//! assert!((gap.closed_form - -1.0).abs() < 1e-12);
//! assert!(gap.discrepancy < 1e-12);
//! # Ok::<(), tiltgap::Error>(())
//! ```

pub mod divergences;
pub mod error;
pub mod gaps;
pub mod generate;
pub mod gibbs;
pub mod measures;
pub mod numeric;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::divergences::{
        conditional_entropy, differential_entropy, entropy, kl, lautum_information, mutual_information,
        shannon_entropy, InfoSummary,
    };
    pub use crate::error::{Error, Result};
    pub use crate::gaps::{
        expected_gap_closed_form, expected_gap_direct, expected_gap_relative, gap_closed_form,
        gap_closed_form_relative, gap_direct, gap_mixture_reference, gibbs_family, gibbs_marginal_gap, marginal_gap,
        Direction, GapDecomposition, ReferenceTag, Term,
    };
    pub use crate::gibbs::{
        free_energy_identities, gibbs_tilt, log_partition, variational_objective, variational_oracle, CostTable,
        FreeEnergyIdentities, GibbsResult, OracleSolution,
    };
    pub use crate::measures::{
        absolutely_continuous, expectation, expectation_fn, marginal_y, mix, mutually_absolutely_continuous,
        radon_nikodym, total_variation, ConditionalFamily, Domain, FiniteMeasure, Grid, GridDensity, Measure, Support,
    };
}
