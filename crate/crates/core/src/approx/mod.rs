//! Certified approximation of partition functions by truncated Taylor
//! series of `ln q`, where `q(z) = p(G)(I + z(h − I))` and `q(1) = p(G)(h)`.
//!
//! If `q` has no roots in the closed disk of radius `M > 1`, the degree-`n`
//! Taylor polynomial of `ln q` at `0` is within
//! `d·q0^{n+1}/((n+1)(1−q0))` of `ln q(1)`, with `d = |V|` and
//! `q0 = 1/M`. The radius comes from the zero-free region around the
//! all-ones model and scales inversely with `sup|h − 1|`.

mod constants;
mod derivatives;
mod region;
mod taylor;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use constants::{
    assignment_deviation, certified_radius, radius_for_deviation, zero_free_constants,
    ZeroFreeConstants,
};
pub use derivatives::{
    normalized_log_coefficients, normalized_q_derivatives, q_derivative, DerivativeEngine,
    AUTO_SUBSET_LIMIT,
};
pub use region::{
    magnitude_lower_bound, sample_region_assignment, verify_zero_free, ZeroFreeReport,
};
pub use taylor::{
    log_derivatives_from_p, p_from_log_derivatives, taylor_bound, taylor_order, LogDerivatives,
    Mode,
};

use crate::complex_json::finite_or_null;
use crate::error::{HolantError, Result};
use crate::graph::Multigraph;
use crate::models::{EdgeColoringModel, TensorAssignment};
use crate::Budget;

/// Result of a certified approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxCertificate {
    /// `exp(T_n)` in multiplicative mode, `Re T_n` in additive mode.
    #[serde(with = "crate::complex_json")]
    pub value: Complex64,
    /// `T_n`, the approximation of `ln p` on the principal branch at `0`.
    #[serde(with = "crate::complex_json")]
    pub log_value: Complex64,
    /// Zero-free radius; `+∞` is written as `null`.
    #[serde(rename = "M", with = "finite_or_null")]
    pub radius: f64,
    pub q0: f64,
    pub n: usize,
    /// Proven bound on `|T_n − ln p|`.
    pub bound: f64,
    pub mode: Mode,
    /// Set when the radius is an empirical estimate rather than proven.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub heuristic_radius: bool,
}

impl ApproxCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HolantError::Parse(e.to_string()))
    }
}

/// Knobs shared by the approximation entry points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ApproxOptions {
    pub engine: DerivativeEngine,
    pub budget: Budget,
}

/// Approximates `p(G)(h)` to within `eps` in the given mode.
///
/// Errors with `OutsideRegion` unless the certified radius exceeds 1.
pub fn approx_partition(
    g: &Multigraph,
    h: &EdgeColoringModel,
    eps: f64,
    mode: Mode,
    options: ApproxOptions,
) -> Result<ApproxCertificate> {
    let radius = certified_radius(h, g.max_degree())?;
    approx_with_radius(g, &TensorAssignment::from_model(g, h), radius, eps, mode, options)
}

/// [`approx_partition`] for a tensor network, with the radius computed from
/// the largest per-vertex deviation from the all-ones tensor.
pub fn approx_network(
    g: &Multigraph,
    t: &TensorAssignment,
    eps: f64,
    mode: Mode,
    options: ApproxOptions,
) -> Result<ApproxCertificate> {
    let radius = radius_for_deviation(assignment_deviation(t), g.max_degree())?;
    approx_with_radius(g, t, radius, eps, mode, options)
}

fn approx_with_radius(
    g: &Multigraph,
    t: &TensorAssignment,
    radius: f64,
    eps: f64,
    mode: Mode,
    options: ApproxOptions,
) -> Result<ApproxCertificate> {
    if !(eps > 0.0) {
        return Err(HolantError::Precondition(format!("eps must be positive, got {eps}")));
    }
    t.check_against(g)?;
    let q0 = 1.0 / radius;
    let d = g.n();
    let n = if q0 == 0.0 { 0 } else { taylor_order(d, q0, eps, mode)? };
    let derivs = normalized_q_derivatives(g, t, n, options.engine, options.budget)?;
    let logs = log_derivatives_from_p(&derivs, n)?;
    let k = t.k() as f64;
    let normalized = logs.taylor(Complex64::new(1.0, 0.0));
    let log_value = normalized + g.m() as f64 * k.ln();
    let value = match mode {
        Mode::Multiplicative => {
            let scale = k.powi(g.m() as i32);
            if scale.is_finite() {
                normalized.exp() * scale
            } else {
                log_value.exp()
            }
        }
        Mode::Additive => Complex64::new(log_value.re, 0.0),
    };
    Ok(ApproxCertificate {
        value,
        log_value,
        radius,
        q0,
        n,
        bound: taylor_bound(d, q0, n),
        mode,
        heuristic_radius: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_partition;
    use crate::models::perturbed_ones;

    #[test]
    fn ones_is_exact() {
        let g = Multigraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let h = EdgeColoringModel::ones(3).unwrap();
        let cert = approx_partition(&g, &h, 1e-3, Mode::Multiplicative, ApproxOptions::default()).unwrap();
        assert_eq!(cert.value, Complex64::new(243.0, 0.0));
        assert_eq!(cert.n, 0);
        assert_eq!(cert.radius, f64::INFINITY);
        let back = ApproxCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn small_deviation_within_eps() {
        let g = Multigraph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (1, 4)]).unwrap();
        let h = perturbed_ones(2, 3, 0.05, 17).unwrap();
        let exact = exact_partition(&g, &h, Budget::DEFAULT).unwrap();
        let cert = approx_partition(&g, &h, 1e-3, Mode::Multiplicative, ApproxOptions::default()).unwrap();
        assert!(cert.q0 < 1.0);
        let ratio = (cert.value / exact).ln();
        assert!(ratio.re.abs() <= 1e-3 && ratio.im.abs() <= 1e-3);
        assert!((cert.log_value - exact.ln()).norm() <= cert.bound);
        let add = approx_partition(&g, &h, 1e-3, Mode::Additive, ApproxOptions::default()).unwrap();
        assert!((add.value.re - exact.norm().ln()).abs() <= 1e-3 * 6.0);
        assert_eq!(add.value.im, 0.0);
    }

    #[test]
    fn outside_region_is_rejected() {
        let g = Multigraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = perturbed_ones(2, 2, 0.5, 1).unwrap();
        assert!(matches!(
            approx_partition(&g, &h, 1e-3, Mode::Multiplicative, ApproxOptions::default()),
            Err(HolantError::OutsideRegion(_))
        ));
    }

    #[test]
    fn mode_names_parse() {
        assert_eq!("mult".parse::<Mode>().unwrap(), Mode::Multiplicative);
        assert_eq!("add".parse::<Mode>().unwrap(), Mode::Additive);
        assert!("x".parse::<Mode>().is_err());
    }
}
