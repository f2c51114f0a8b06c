//! Energy balance, moment bounds, cutoff caps and contraction statistics.

pub mod apriori;
pub mod contraction;
pub mod energy;
pub mod in_n;
pub mod studies;
pub mod xi_cap;

pub use apriori::{apriori_check, gronwall_bound, AprioriReport, MIN_PATHS};
pub use contraction::{contraction_report, ContractionReport};
pub use energy::{energy_ledger, EnergyLedger, LedgerStep};
pub use in_n::{in_diagnostic, in_series, InEnvelope, InReport};
pub use studies::{ledger_order_study, scheme_gap_study, strong_order_study, StepStudy};
pub use xi_cap::{xi_cap_check, xi_series, XiCapReport};
