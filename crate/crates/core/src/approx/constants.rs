use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{HolantError, Result};
use crate::models::TensorAssignment;
use crate::models::EdgeColoringModel;

/// `θ*`, the root of `2/θ = tan(θ/2)` in `(0, 2π/3)`, and `x* = θ*·cos(θ*/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFreeConstants {
    pub theta_star: f64,
    pub x_star: f64,
}

impl ZeroFreeConstants {
    /// `β*(d) = x*/(1 + x*/(2d))`, for `d ≥ 1`.
    pub fn beta_star(&self, d: usize) -> f64 {
        self.x_star / (1.0 + self.x_star / (2.0 * d as f64))
    }

    /// The largest deviation `sup|h − 1|` that the zero-free region
    /// tolerates at `z = 1` on graphs of maximum degree `max_degree`:
    /// `β*(Δ+1)/(2(Δ+1))`.
    pub fn deviation_threshold(&self, max_degree: usize) -> f64 {
        let d = max_degree + 1;
        self.beta_star(d) / (2.0 * d as f64)
    }
}

/// Computed once by bisection on the increasing function
/// `tan(θ/2) − 2/θ`.
pub fn zero_free_constants() -> ZeroFreeConstants {
    static CELL: OnceLock<ZeroFreeConstants> = OnceLock::new();
    *CELL.get_or_init(|| {
        let f = |t: f64| (t / 2.0).tan() - 2.0 / t;
        let (mut lo, mut hi) = (1.0, 2.0 * PI / 3.0);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta_star = 0.5 * (lo + hi);
        ZeroFreeConstants {
            theta_star,
            x_star: theta_star * (theta_star / 2.0).cos(),
        }
    })
}

/// `M = β*(Δ+1)/(2(Δ+1)·r)` for deviation `r`, `+∞` when `r = 0`.
/// Errors with `OutsideRegion` when `M ≤ 1`.
pub fn radius_for_deviation(r: f64, max_degree: usize) -> Result<f64> {
    if r == 0.0 {
        return Ok(f64::INFINITY);
    }
    let threshold = zero_free_constants().deviation_threshold(max_degree);
    let radius = threshold / r;
    if radius <= 1.0 || radius.is_nan() {
        return Err(HolantError::OutsideRegion(format!(
            "deviation r = {r} from the all-ones model is not below the threshold \
             beta*(D+1)/(2(D+1)) = {threshold} for max degree {max_degree}"
        )));
    }
    Ok(radius)
}

/// Certified zero-free radius of `z ↦ I + z(h − I)` on graphs of maximum
/// degree `max_degree`, with `r = sup_{|α| ≤ Δ} |h(α) − 1|`.
pub fn certified_radius(h: &EdgeColoringModel, max_degree: usize) -> Result<f64> {
    radius_for_deviation(h.deviation_from_ones(max_degree as u32), max_degree)
}

/// Largest `|h^v(α) − 1|` over all vertices and entries.
pub fn assignment_deviation(t: &TensorAssignment) -> f64 {
    t.tensors()
        .iter()
        .flat_map(|tensor| tensor.iter().map(|(_, v)| (v - 1.0).norm()))
        .fold(0.0, f64::max)
}
