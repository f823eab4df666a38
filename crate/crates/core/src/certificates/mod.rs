//! Explicit convergence-rate constants for the two preset families and the
//! checks that compare them with simulated runs.

mod cert2;
mod cert3;
mod checks;
mod class;
mod constants;
mod mu;

pub use cert2::{cert2_build, Cert2Inputs, CertBundle2};
pub use cert3::{cert3_build, Cert3Inputs, CertBundle3, Envelope3};
pub use checks::{
    eedi_pointwise_check, envelope_check2, envelope_check3, lp_functionals, lp_monotone_check, lp_q_pair, CheckStatus,
    EediReport, Envelope2Report, Envelope3Report, LpReport,
};
pub use class::{class_point, d2, quadratic_limit, s2, scan_c4, ClassScan};
pub use constants::{
    functional_constants, k_grid_pick, l_grid, lsi_estimate, poincare_ratio, FunctionalConfig, FunctionalConstants,
    LsiEstimate,
};
pub use mu::{class_mu_2species, class_mu_3species, mu_inequality_2species, mu_inequality_3species};

/// Fails with a typed error unless `value` is finite and positive.
pub(crate) fn positive(name: &'static str, value: f64, inputs: impl FnOnce() -> String) -> crate::Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(crate::Error::Constant { name, value, inputs: inputs() })
    }
}
