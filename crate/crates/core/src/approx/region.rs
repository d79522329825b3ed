use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex_json::finite_or_null;
use crate::error::{HolantError, Result};
use crate::exact::contract_network;
use crate::graph::Multigraph;
use crate::models::{RegionParams, SymmetricTensor, TensorAssignment};
use crate::Budget;

/// `(cos(θ/2)·η)^{|V|}·k^{|E|}`, the lower bound on `|p(G)(h)|` for
/// `h ∈ S_G(δ, η)`.
pub fn magnitude_lower_bound(g: &Multigraph, k: usize, params: &RegionParams) -> Result<f64> {
    if !params.valid_for(g.max_degree()) {
        return Err(HolantError::Precondition(format!(
            "delta = {} exceeds min(eta, beta/(D+1)) for max degree {}",
            params.delta,
            g.max_degree()
        )));
    }
    Ok(((params.theta / 2.0).cos() * params.eta).powi(g.n() as i32) * (k as f64).powi(g.m() as i32))
}

/// Outcome of [`verify_zero_free`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroFreeReport {
    pub samples: usize,
    /// Smallest `|p|` seen; `+∞` (JSON `null`) without samples.
    #[serde(with = "finite_or_null")]
    pub min_abs: f64,
    pub lower_bound: f64,
    /// Samples with `p = 0`.
    pub zero_violations: usize,
    /// Samples with `|p|` below the lower bound.
    pub bound_violations: usize,
    /// Draws rejected by the membership predicate.
    pub rejected: usize,
}

impl ZeroFreeReport {
    pub fn held(&self) -> bool {
        self.zero_violations == 0 && self.bound_violations == 0
    }
}

/// One random element of `S_G(δ, η)`: for every vertex a center `c` with
/// `|c| = (η + δ/2)·s`, `s ∈ [1, 1.5]`, uniform phase, and entries
/// `c + (δ/2)ρe^{iφ}` with `ρ ∈ [0, 1)`.
pub fn sample_region_assignment(
    g: &Multigraph,
    k: usize,
    params: &RegionParams,
    rng: &mut impl Rng,
) -> TensorAssignment {
    let tensors = g
        .degrees()
        .into_iter()
        .map(|d| {
            let radius = (params.eta + params.delta / 2.0) * rng.gen_range(1.0..=1.5);
            let center = Complex64::from_polar(radius, rng.gen_range(0.0..2.0 * PI));
            SymmetricTensor::from_fn(k, d as u32, |_| {
                center
                    + Complex64::from_polar(
                        params.delta / 2.0 * rng.gen_range(0.0..1.0),
                        rng.gen_range(0.0..2.0 * PI),
                    )
            })
        })
        .collect();
    TensorAssignment::new(k, tensors).expect("all tensors share k")
}

/// Samples `samples` assignments in `S_G(δ, η)`, contracts each exactly and
/// compares `|p|` with zero and with [`magnitude_lower_bound`].
pub fn verify_zero_free(
    g: &Multigraph,
    k: usize,
    params: &RegionParams,
    samples: usize,
    seed: u64,
    budget: Budget,
) -> Result<ZeroFreeReport> {
    let lower_bound = magnitude_lower_bound(g, k, params)?;
    budget.check(samples as f64 * (k as f64).powi(g.m() as i32))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ZeroFreeReport {
        samples,
        min_abs: f64::INFINITY,
        lower_bound,
        zero_violations: 0,
        bound_violations: 0,
        rejected: 0,
    };
    let mut accepted = 0;
    while accepted < samples {
        let t = sample_region_assignment(g, k, params, &mut rng);
        if !t.tensors().iter().all(|x| x.in_region(params.delta, params.eta)) {
            report.rejected += 1;
            continue;
        }
        accepted += 1;
        let p = contract_network(g, &t, Budget(u64::MAX))?.norm();
        report.min_abs = report.min_abs.min(p);
        if p == 0.0 {
            report.zero_violations += 1;
        }
        if p < lower_bound {
            report.bound_violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::zero_free_constants;
    use crate::graph::{generate, GraphFamilySpec};

    #[test]
    fn lower_bound_examples() {
        let tri = Multigraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let theta = zero_free_constants().theta_star;
        let p = RegionParams::for_degree(0.5, theta, 2).unwrap();
        let want = ((theta / 2.0).cos() * 0.5).powi(3) * 8.0;
        assert!((magnitude_lower_bound(&tri, 2, &p).unwrap() - want).abs() < 1e-15);
        let small = RegionParams::for_degree(1.0, 1e-9, 2).unwrap();
        assert!((magnitude_lower_bound(&tri, 2, &small).unwrap() - 8.0).abs() < 1e-12);
        let right = RegionParams::for_degree(1.0, PI / 2.0, 2).unwrap();
        let want = (PI / 4.0).cos().powi(3) * 8.0;
        assert!((magnitude_lower_bound(&tri, 2, &right).unwrap() - want).abs() < 1e-12);
        let wide = RegionParams::for_degree(1.0, 1.0, 1).unwrap();
        assert!(magnitude_lower_bound(&tri, 2, &wide).is_err());
    }

    #[test]
    fn sampler_stays_in_region_and_bound_holds() {
        let c5 = generate(&GraphFamilySpec::Cycle { n: 5 }).unwrap();
        let theta = zero_free_constants().theta_star;
        let params = RegionParams::for_degree(0.9, theta, 2).unwrap();
        let report = verify_zero_free(&c5, 2, &params, 100, 7, Budget::DEFAULT).unwrap();
        assert!(report.held());
        assert_eq!(report.rejected, 0);
        assert!(report.min_abs >= report.lower_bound);
        let empty = verify_zero_free(&c5, 2, &params, 0, 7, Budget::DEFAULT).unwrap();
        assert_eq!(empty.samples, 0);
        assert_eq!(empty.min_abs, f64::INFINITY);
    }

    #[test]
    fn ones_meets_the_bound() {
        let g = generate(&GraphFamilySpec::Cycle { n: 4 }).unwrap();
        let theta = zero_free_constants().theta_star;
        let params = RegionParams::for_degree(0.9, theta, 2).unwrap();
        let p = contract_network(&g, &TensorAssignment::constant(&g, 2, Complex64::new(1.0, 0.0)), Budget::DEFAULT).unwrap();
        assert!(p.norm() >= magnitude_lower_bound(&g, 2, &params).unwrap());
    }
}
