//! Entropy functionals, dissipations and trajectory-level checks.

mod checks;
mod fit;
mod functionals;
pub(crate) mod psi;

pub use checks::{
    cylinder_l2_check, d_dt_entropy_check, l1_distance_monitor, linf_estimate_check, min_b_bound_check, CylinderReport,
    DdtReport, L1Monitor, L1Sample, LinfSlack, MinBReport,
};
pub use fit::{fit_decay_rate, fit_log_linear, FitWindow, RateFit, DEFAULT_FIT_FLOOR};
pub use functionals::{
    dissipation_rel, entropy_abs, entropy_record, entropy_rel, entropy_rel_const, entropy_rel_to_means,
    fisher_log_mean, sqrt_gradient_sq, write_entropy_csv, Dissipation, EntropyRecord,
};
pub use psi::{phi, psi, psi_limit, psi_ratio, sqrt_gap_sq};
