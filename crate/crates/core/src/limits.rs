//! Normalized partition functions `ln|p(G)(h)|/|V|` along graph families,
//! the cycle transfer matrix, and the identity relating them to the roots
//! of the normalized reversed polynomial.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{approx_partition, ApproxOptions, Mode};
use crate::error::{HolantError, Result};
use crate::exact::{exact_partition, exact_poly_by_interpolation};
use crate::graph::{generate, GraphFamilySpec, Multigraph};
use crate::models::EdgeColoringModel;
use crate::poly::poly_roots;
use crate::Budget;

/// How `|p|` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PfEngine {
    Exact,
    /// Additive-mode approximation; the normalized value is within `eps`.
    Approx { eps: f64 },
}

/// `n(G)(h) = ln|p(G)(h)| / |V|`.
pub fn normalized_pf(g: &Multigraph, h: &EdgeColoringModel, engine: PfEngine, options: ApproxOptions) -> Result<f64> {
    if g.n() == 0 {
        return Err(HolantError::Precondition("graph has no vertices".into()));
    }
    let log_abs = match engine {
        PfEngine::Exact => {
            let p = exact_partition(g, h, options.budget)?;
            if p.norm() == 0.0 {
                return Err(HolantError::ZeroPartition(format!("p = 0 on {g}")));
            }
            p.norm().ln()
        }
        PfEngine::Approx { eps } => approx_partition(g, h, eps, Mode::Additive, options)?.value.re,
    };
    Ok(log_abs / g.n() as f64)
}

/// `T[i][j] = h(e_i + e_j)`.
pub fn transfer_matrix(h: &EdgeColoringModel) -> DMatrix<Complex64> {
    let k = h.k();
    DMatrix::from_fn(k, k, |i, j| {
        let mut alpha = vec![0u32; k];
        alpha[i] += 1;
        alpha[j] += 1;
        h.value(&alpha)
    })
}

/// `ln trace(T^n)` by repeated squaring with rescaling, so large `n` does
/// not overflow.
pub fn cycle_transfer_log_pf(h: &EdgeColoringModel, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(HolantError::Precondition("cycle length must be at least 1".into()));
    }
    let k = h.k();
    let mut base = transfer_matrix(h);
    let mut base_log = 0.0;
    let mut acc = DMatrix::<Complex64>::identity(k, k);
    let mut acc_log = 0.0;
    let mut e = n;
    let rescale = |m: &mut DMatrix<Complex64>, log: &mut f64| {
        let s = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s > 0.0 && s.is_finite() {
            *m /= Complex64::new(s, 0.0);
            *log += s.ln();
        }
    };
    rescale(&mut base, &mut base_log);
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
            acc_log += base_log;
            rescale(&mut acc, &mut acc_log);
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
            base_log *= 2.0;
            rescale(&mut base, &mut base_log);
        }
    }
    let trace = acc.trace();
    if trace.norm() == 0.0 {
        return Err(HolantError::ZeroPartition(format!("trace(T^{n}) = 0")));
    }
    Ok(trace.ln() + acc_log)
}

/// `trace(T^n) = p(C_n)(h)`; `C_1` is a single loop and `C_2` a double
/// edge under the same formula.
pub fn cycle_transfer_pf(h: &EdgeColoringModel, n: usize) -> Result<Complex64> {
    match cycle_transfer_log_pf(h, n) {
        Ok(l) => Ok(l.exp()),
        Err(HolantError::ZeroPartition(_)) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Eigenvalue of largest modulus of the transfer matrix.
pub fn dominant_eigenvalue(h: &EdgeColoringModel) -> Complex64 {
    let t = transfer_matrix(h);
    t.schur()
        .eigenvalues()
        .expect("complex Schur form yields eigenvalues")
        .iter()
        .copied()
        .fold(Complex64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() { z } else { best })
}

/// Normalized partition functions along a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub sizes: Vec<usize>,
    /// Vertex counts of the generated graphs.
    pub vertices: Vec<usize>,
    /// `n(G)(h)` per size; `null` when that size failed.
    pub values: Vec<Option<f64>>,
    pub densities: Vec<f64>,
    /// `values[i+1] − values[i]`; `null` when either side failed.
    pub diffs: Vec<Option<f64>>,
    pub tolerance: f64,
    /// Whether the last three differences are all below `tolerance`.
    pub cauchy: bool,
    pub engine_per_size: Vec<String>,
    pub errors: Vec<Option<String>>,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text table, one row per size.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:>8} {:>8} {:>22} {:>12} {:>10}\n", "size", "|V|", "n(G)(h)", "diff", "engine");
        for i in 0..self.sizes.len() {
            let value = self.values[i].map_or("-".to_string(), |v| format!("{v:.15}"));
            let diff = if i == 0 {
                String::new()
            } else {
                self.diffs[i - 1].map_or("-".to_string(), |d| format!("{d:.3e}"))
            };
            out.push_str(&format!(
                "{:>8} {:>8} {:>22} {:>12} {:>10}\n",
                self.sizes[i], self.vertices[i], value, diff, self.engine_per_size[i]
            ));
        }
        out.push_str(&format!("cauchy (tol {:e}): {}\n", self.tolerance, self.cauchy));
        out
    }
}

/// Computes `n(G)(h)` for each size of the family: by the transfer matrix
/// on cycles, by the additive approximation otherwise. Sizes are processed
/// in parallel and reported in order; per-size failures are recorded, not
/// propagated.
pub fn convergence_run(
    family: &GraphFamilySpec,
    sizes: &[usize],
    h: &EdgeColoringModel,
    eps: f64,
    tolerance: f64,
    options: ApproxOptions,
) -> Result<ConvergenceReport> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HolantError::Precondition("sizes must be strictly increasing".into()));
    }
    let rows: Vec<(usize, f64, String, Result<f64>)> = sizes
        .par_iter()
        .map(|&size| {
            let spec = family.with_size(size);
            let g = match generate(&spec) {
                Ok(g) => g,
                Err(e) => return (0, 0.0, "none".to_string(), Err(e)),
            };
            let density = g.m() as f64 / g.n().max(1) as f64;
            let (engine, value) = match spec {
                GraphFamilySpec::Cycle { n } => (
                    "transfer".to_string(),
                    cycle_transfer_log_pf(h, n).map(|l| l.re / n as f64),
                ),
                _ => (
                    format!("approx:{eps}"),
                    normalized_pf(&g, h, PfEngine::Approx { eps }, options),
                ),
            };
            (g.n(), density, engine, value)
        })
        .collect();
    let mut report = ConvergenceReport {
        family: family.label(),
        sizes: sizes.to_vec(),
        vertices: Vec::new(),
        values: Vec::new(),
        densities: Vec::new(),
        diffs: Vec::new(),
        tolerance,
        cauchy: false,
        engine_per_size: Vec::new(),
        errors: Vec::new(),
    };
    for (n, density, engine, value) in rows {
        report.vertices.push(n);
        report.densities.push(density);
        report.engine_per_size.push(engine);
        match value {
            Ok(v) => {
                report.values.push(Some(v));
                report.errors.push(None);
            }
            Err(e) => {
                report.values.push(None);
                report.errors.push(Some(e.to_string()));
            }
        }
    }
    report.diffs = report
        .values
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        })
        .collect();
    let tail = report.diffs.len().saturating_sub(3);
    report.cauchy = report.diffs.len() >= 3
        && report.diffs[tail..]
            .iter()
            .all(|d| d.is_some_and(|d| d.abs() < tolerance));
    Ok(report)
}

/// Both sides of
/// `(1/|V|) Σ_ζ ln|1 − ζ| = n(G)(h) − (|E|/|V|) ln k`, the sum running over
/// the roots of `k^{−|E|} z^{|V|} q(1/z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPotential {
    pub lhs: f64,
    pub rhs: f64,
    pub discrepancy: f64,
}

/// Computes the left side from the roots of the interpolated polynomial and
/// the right side from an exact evaluation.
pub fn log_potential_check(g: &Multigraph, h: &EdgeColoringModel, budget: Budget) -> Result<LogPotential> {
    let n = g.n();
    if n == 0 {
        return Err(HolantError::Precondition("graph has no vertices".into()));
    }
    let k = h.k() as f64;
    let q = exact_poly_by_interpolation(g, h, budget)?;
    let qhat = q.reversed(n).scale(Complex64::new(k.powi(-(g.m() as i32)), 0.0));
    let roots = poly_roots(&qhat)?;
    let mut lhs = 0.0;
    for r in &roots {
        let gap = (Complex64::new(1.0, 0.0) - r).norm();
        if gap == 0.0 {
            return Err(HolantError::ZeroPartition("root at z = 1".into()));
        }
        lhs += gap.ln();
    }
    lhs /= n as f64;
    let rhs = normalized_pf(
        g,
        h,
        PfEngine::Exact,
        ApproxOptions {
            budget,
            ..ApproxOptions::default()
        },
    )? - g.m() as f64 / n as f64 * k.ln();
    Ok(LogPotential {
        lhs,
        rhs,
        discrepancy: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{model_from_predicate, perturbed_ones, PredicateKind};

    #[test]
    fn normalized_examples() {
        let ones = EdgeColoringModel::ones(3).unwrap();
        let g = Multigraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let v = normalized_pf(&g, &ones, PfEngine::Exact, ApproxOptions::default()).unwrap();
        assert!((v - 5.0 / 4.0 * 3f64.ln()).abs() < 1e-14);
        let matching = model_from_predicate(PredicateKind::Matching, 2, 2).unwrap();
        let c4 = generate(&GraphFamilySpec::Cycle { n: 4 }).unwrap();
        let v = normalized_pf(&c4, &matching, PfEngine::Exact, ApproxOptions::default()).unwrap();
        assert!((v - 7f64.ln() / 4.0).abs() < 1e-14);
        let h = perturbed_ones(2, 3, 0.3, 1).unwrap();
        let a = normalized_pf(&g, &h, PfEngine::Exact, ApproxOptions::default()).unwrap();
        let b = normalized_pf(&g.disjoint_union(&g), &h, PfEngine::Exact, ApproxOptions::default()).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn transfer_examples() {
        let ones = EdgeColoringModel::ones(2).unwrap();
        for n in 1..10 {
            assert!((cycle_transfer_pf(&ones, n).unwrap() - Complex64::new(2f64.powi(n as i32), 0.0)).norm() < 1e-9);
        }
        let matching = model_from_predicate(PredicateKind::Matching, 2, 2).unwrap();
        assert!((cycle_transfer_pf(&matching, 3).unwrap() - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        let h = perturbed_ones(3, 2, 0.4, 6).unwrap();
        for n in 3..=8 {
            let c = generate(&GraphFamilySpec::Cycle { n }).unwrap();
            let want = exact_partition(&c, &h, Budget::DEFAULT).unwrap();
            let got = cycle_transfer_pf(&h, n).unwrap();
            assert!((got - want).norm() <= 1e-10 * want.norm(), "n = {n}");
        }
        assert!(cycle_transfer_pf(&h, 0).is_err());
    }

    #[test]
    fn dominant_eigenvalue_of_ones() {
        let ones = EdgeColoringModel::ones(3).unwrap();
        assert!((dominant_eigenvalue(&ones) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn convergence_on_cycles() {
        let ones = EdgeColoringModel::ones(2).unwrap();
        let family = GraphFamilySpec::Cycle { n: 3 };
        let r = convergence_run(&family, &[50, 100, 150, 200], &ones, 1e-3, 1e-9, ApproxOptions::default()).unwrap();
        assert!(r.values.iter().all(|v| (v.unwrap() - 2f64.ln()).abs() < 1e-12));
        assert!(r.cauchy);
        assert!(r.engine_per_size.iter().all(|e| e == "transfer"));
        assert!(convergence_run(&family, &[5, 5], &ones, 1e-3, 1e-9, ApproxOptions::default()).is_err());
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["family", "sizes", "values", "diffs", "cauchy", "engine_per_size"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn convergence_records_failures() {
        let h = perturbed_ones(2, 4, 0.5, 2).unwrap();
        let family = GraphFamilySpec::Torus2d { rows: 3, cols: 3 };
        let r = convergence_run(&family, &[3, 4], &h, 1e-2, 1e-3, ApproxOptions::default()).unwrap();
        assert!(r.values.iter().all(|v| v.is_none()));
        assert!(r.errors.iter().all(|e| e.is_some()));
        assert!(!r.cauchy);
    }

    #[test]
    fn log_potential_examples() {
        let ones = EdgeColoringModel::ones(2).unwrap();
        let tri = Multigraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let lp = log_potential_check(&tri, &ones, Budget::DEFAULT).unwrap();
        assert!(lp.lhs.abs() < 1e-12 && lp.rhs.abs() < 1e-12);
        let matching = model_from_predicate(PredicateKind::Matching, 2, 2).unwrap();
        let lp = log_potential_check(&tri, &matching, Budget::DEFAULT).unwrap();
        assert!(lp.discrepancy <= 1e-7);
        let c4 = generate(&GraphFamilySpec::Cycle { n: 4 }).unwrap();
        let h = perturbed_ones(2, 2, 0.1, 3).unwrap();
        assert!(log_potential_check(&c4, &h, Budget::DEFAULT).unwrap().discrepancy <= 1e-7);
    }
}
