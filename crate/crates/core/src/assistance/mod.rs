//! Charlie's measurements and the assistance values they reach.
//!
//! - [`commuting_charlie_basis`]: Charlie bases whose conditional marginals
//!   on one side commute.
//! - [`theorem1_measurement`]: the `E₂`-optimal measurement, reaching
//!   `min(E₂^{A|BC}, E₂^{B|AC})`.
//! - [`eoa_numeric`]: independent POVM search for any measure.
//! - [`lossless_classifier`]: when strictly concave measures reach the
//!   min-cut bound.
//! - [`unital_fixed_point_check`], [`corollary_check`],
//!   [`eoc_lower_bound_search`], [`eoa_density`], [`analyze`].

mod commuting;
mod corollary;
mod density;
mod eoc;
pub(crate) mod geometry;
mod lossless;
mod measurement;
mod numeric;
mod report;
mod theorem1;
mod unital;

pub use commuting::{aligned, commuting_charlie_basis, Alignment, CommutingBasisResult};
pub use corollary::{corollary_check, corollary_check_with, CorollaryReport, LuSearch};
pub use density::{eoa_density, DensityAssistance};
pub use eoc::{eoc_lower_bound_search, EocBudget, EocResult};
pub(crate) use lossless::lossless_certificate_parameters;
pub use lossless::{lossless_classifier, LosslessBranch, LosslessCertificate, LosslessVerdict, Thm2Parameters};
pub use measurement::{average_post_measurement, post_measurement_branches, Branch, Measurement, MeasurementJson, MAX_OUTCOMES};
pub use numeric::{eoa_numeric, NumericBudget, NumericResult};
pub use report::{analyze, AnalyzeOptions, AssistanceReport};
pub use theorem1::{normal_form_e_basis, theorem1_measurement, verify_theorem1, EBasisResult, Theorem1Case, Theorem1Check, Theorem1Result};
pub use unital::{unital_fixed_point_check, UnitalCheck};
