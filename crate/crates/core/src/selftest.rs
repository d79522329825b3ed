//! Independent oracles and a quick oracle-equivalence suite.
//!
//! The oracles share no code with the engines they check: colorings are
//! enumerated with an odometer and [`Multigraph::incident_multiset`],
//! matchings and proper colorings are counted combinatorially.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{
    approx_partition, normalized_q_derivatives, q_derivative, zero_free_constants, ApproxOptions,
    DerivativeEngine, Mode,
};
use crate::error::Result;
use crate::exact::{exact_partition, exact_poly_by_interpolation, vertex_model_partition};
use crate::exptype::{chi_k_coefficients, tutte_direct, ExpTypeSpec};
use crate::graph::{generate, simple_graphs_up_to_isomorphism, GraphFamilySpec, Multigraph};
use crate::limits::{cycle_transfer_pf, log_potential_check};
use crate::models::{
    apply_orthogonal_model, model_from_predicate, perturbed_ones, random_orthogonal,
    vertex_to_edge, EdgeColoringModel, PredicateKind, TensorAssignment, VertexModel,
};
use crate::poly::ComplexPoly;
use crate::Budget;

/// `Σ_φ Π_v h(φ(δ(v)))` by a plain odometer over all `k^{|E|}` colorings.
pub fn naive_partition(g: &Multigraph, h: &EdgeColoringModel) -> Result<Complex64> {
    let k = h.k();
    let mut coloring = vec![0usize; g.m()];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut term = Complex64::new(1.0, 0.0);
        for v in 0..g.n() {
            term *= h.value(&g.incident_multiset(v, &coloring, k)?);
        }
        total += term;
        let mut i = 0;
        loop {
            if i == coloring.len() {
                return Ok(total);
            }
            coloring[i] += 1;
            if coloring[i] < k {
                break;
            }
            coloring[i] = 0;
            i += 1;
        }
    }
}

/// Number of matchings (sets of pairwise disjoint non-loop edges),
/// counting parallel edges separately.
pub fn count_matchings(g: &Multigraph) -> u64 {
    fn rec(v: usize, used: &mut [bool], adj: &[Vec<usize>]) -> u64 {
        if v == used.len() {
            return 1;
        }
        if used[v] {
            return rec(v + 1, used, adj);
        }
        // v unmatched
        let mut total = rec(v + 1, used, adj);
        // v matched to a later free neighbour, once per parallel edge
        used[v] = true;
        for &w in &adj[v] {
            if w > v && !used[w] {
                used[w] = true;
                total += rec(v + 1, used, adj);
                used[w] = false;
            }
        }
        used[v] = false;
        total
    }
    let mut adj = vec![Vec::new(); g.n()];
    for &(u, v) in g.edges() {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    rec(0, &mut vec![false; g.n()], &adj)
}

/// Number of maps `V → [q]` with distinct colors on the ends of every edge.
pub fn count_proper_colorings(g: &Multigraph, q: usize) -> u64 {
    fn rec(v: usize, colors: &mut Vec<usize>, q: usize, earlier: &[Vec<usize>]) -> u64 {
        if v == earlier.len() {
            return 1;
        }
        let mut total = 0;
        for c in 0..q {
            if earlier[v].iter().all(|&u| colors[u] != c) {
                colors.push(c);
                total += rec(v + 1, colors, q, earlier);
                colors.pop();
            }
        }
        total
    }
    if g.edges().iter().any(|&(u, v)| u == v) {
        return 0;
    }
    let mut earlier = vec![Vec::new(); g.n()];
    for &(u, v) in g.edges() {
        earlier[u.max(v)].push(u.min(v));
    }
    rec(0, &mut Vec::with_capacity(g.n()), q, &earlier)
}

/// Random simple graph `G(n, p)`.
pub fn random_simple_graph(n: usize, p: f64, rng: &mut impl Rng) -> Multigraph {
    let mut edges = Vec::new();
    for b in 1..n {
        for a in 0..b {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Multigraph::new(n, edges).expect("endpoints in range")
}

/// Random multigraph with up to `m` edges (loops and parallel edges
/// allowed) and maximum degree at most `max_degree`; candidate edges that
/// would exceed the degree bound are skipped.
pub fn random_bounded_multigraph(n: usize, m: usize, max_degree: usize, rng: &mut impl Rng) -> Multigraph {
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let extra = if u == v { 2 } else { 1 };
        if degree[u] + extra > max_degree || degree[v] + extra > max_degree {
            continue;
        }
        degree[u] += extra;
        if u != v {
            degree[v] += 1;
        }
        edges.push((u, v));
    }
    Multigraph::new(n, edges).expect("endpoints in range")
}

/// Random simple graph with exactly `m` edges and maximum degree at most
/// `max_degree` (fewer edges if the bound blocks every remaining pair).
pub fn random_bounded_simple_graph(n: usize, m: usize, max_degree: usize, rng: &mut impl Rng) -> Multigraph {
    let mut pairs: Vec<(usize, usize)> = (1..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect();
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, rng.gen_range(0..=i));
    }
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (a, b) in pairs {
        if edges.len() == m {
            break;
        }
        if degree[a] < max_degree && degree[b] < max_degree {
            degree[a] += 1;
            degree[b] += 1;
            edges.push((a, b));
        }
    }
    Multigraph::new(n, edges).expect("endpoints in range")
}

/// Model `h(α) = 1 + r·e^{iφ(α)}` on `|α| ≤ max_degree` with `r` exactly
/// attained; shorthand for [`perturbed_ones`] with an RNG-drawn seed.
pub fn random_model_with_deviation(k: usize, max_degree: u32, r: f64, rng: &mut impl Rng) -> EdgeColoringModel {
    perturbed_ones(k, max_degree, r, rng.gen()).expect("k >= 1")
}

/// Relative difference `|a − b| / max(|a|, |b|)`, `0` when both vanish.
pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Outcome of one self-test check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Outcome of [`run_selftest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestReport {
    pub checks: Vec<CheckResult>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<(bool, String)>;

/// Runs a reduced oracle-equivalence suite (a few seconds) with a fixed
/// seed.
pub fn run_selftest(seed: u64) -> SelfTestReport {
    let checks: [(&str, Check); 11] = [
        ("constants", check_constants),
        ("matchings-vs-enumerator", check_matchings),
        ("exact-vs-odometer", check_exact_vs_naive),
        ("derivatives-vs-interpolation", check_derivatives),
        ("subsets-vs-clusters", check_engines),
        ("approx-within-bound", check_approx),
        ("tutte-pipeline", check_tutte),
        ("transfer-matrix", check_transfer),
        ("log-potential", check_log_potential),
        ("orthogonal-invariance", check_orthogonal),
        ("vertex-edge-correspondence", check_vertex_models),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results = checks
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(&mut rng) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name: name.to_string(),
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    SelfTestReport { checks: results }
}

fn check_constants(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let c = zero_free_constants();
    let ok = (c.theta_star - 1.72067).abs() < 1e-4
        && (c.x_star - 1.12219).abs() < 1e-4
        && (c.beta_star(1) - 0.71885).abs() < 1e-4;
    Ok((ok, format!("theta*={} x*={} beta*(1)={}", c.theta_star, c.x_star, c.beta_star(1))))
}

fn check_matchings(_: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let h = model_from_predicate(PredicateKind::Matching, 2, 5)?;
    let mut count = 0;
    for n in 0..=5 {
        for g in simple_graphs_up_to_isomorphism(n)? {
            let p = exact_partition(&g, &h, Budget::DEFAULT)?;
            if p != Complex64::new(count_matchings(&g) as f64, 0.0) {
                return Ok((false, format!("mismatch on {g}")));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} graphs")))
}

fn check_exact_vs_naive(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let g = random_bounded_multigraph(5, 7, 4, rng);
        let h = random_model_with_deviation(3, 4, 0.8, rng);
        worst = worst.max(rel_diff(exact_partition(&g, &h, Budget::DEFAULT)?, naive_partition(&g, &h)?));
    }
    Ok((worst <= 1e-12, format!("max relative difference {worst:e}")))
}

fn check_derivatives(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let g = random_bounded_multigraph(6, 8, 4, rng);
        let h = random_model_with_deviation(2, 4, 1.0, rng);
        let poly = exact_poly_by_interpolation(&g, &h, Budget::DEFAULT)?;
        let mut fact = 1.0;
        for m in 0..=g.n() {
            if m > 0 {
                fact *= m as f64;
            }
            let d = q_derivative(&g, &h, m, Budget::DEFAULT)?;
            worst = worst.max(rel_diff(d, poly.coeff(m) * fact));
        }
    }
    Ok((worst <= 1e-7, format!("max relative difference {worst:e}")))
}

fn check_engines(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let g = random_bounded_multigraph(7, 10, 4, rng);
        let h = random_model_with_deviation(2, 4, 0.5, rng);
        let t = TensorAssignment::from_model(&g, &h);
        let a = normalized_q_derivatives(&g, &t, 5, DerivativeEngine::Subsets, Budget::DEFAULT)?;
        let b = normalized_q_derivatives(&g, &t, 5, DerivativeEngine::Clusters, Budget::DEFAULT)?;
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).norm() / (1.0 + x.norm()));
        }
    }
    Ok((worst <= 1e-9, format!("max difference {worst:e}")))
}

fn check_approx(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..5 {
        let g = random_bounded_multigraph(7, 10, 4, rng);
        let h = random_model_with_deviation(2, 4, 0.05, rng);
        let exact = exact_partition(&g, &h, Budget::DEFAULT)?;
        let cert = approx_partition(&g, &h, 1e-3, Mode::Multiplicative, ApproxOptions::default())?;
        let err = (cert.log_value - exact.ln()).norm();
        if err > cert.bound {
            return Ok((false, format!("error {err:e} above bound {:e}", cert.bound)));
        }
        let ratio = (cert.value / exact).ln();
        worst_ratio = worst_ratio.max(ratio.re.abs()).max(ratio.im.abs());
    }
    Ok((worst_ratio <= 1e-3, format!("max |ln ratio| component {worst_ratio:e}")))
}

fn check_tutte(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for g in simple_graphs_up_to_isomorphism(4)?.iter().filter(|g| g.is_connected()) {
        for v in [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(2.0, 1.0)] {
            let p = ComplexPoly::new(chi_k_coefficients(g, &ExpTypeSpec::tutte(v))?);
            for _ in 0..5 {
                let q = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                worst = worst.max(rel_diff(p.eval(q), tutte_direct(g, q, v)?));
            }
        }
        for q in [2usize, 3] {
            let z = tutte_direct(g, Complex64::new(q as f64, 0.0), Complex64::new(-1.0, 0.0))?;
            if (z - Complex64::new(count_proper_colorings(g, q) as f64, 0.0)).norm() > 1e-9 {
                return Ok((false, format!("chromatic mismatch on {g}")));
            }
        }
    }
    Ok((worst <= 1e-8, format!("max relative difference {worst:e}")))
}

fn check_transfer(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let h = random_model_with_deviation(3, 2, 0.7, rng);
        for n in 3..=6 {
            let c = generate(&GraphFamilySpec::Cycle { n })?;
            worst = worst.max(rel_diff(cycle_transfer_pf(&h, n)?, exact_partition(&c, &h, Budget::DEFAULT)?));
        }
    }
    Ok((worst <= 1e-10, format!("max relative difference {worst:e}")))
}

fn check_log_potential(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let threshold = zero_free_constants().deviation_threshold(4);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let g = random_bounded_multigraph(6, 8, 4, rng);
        let h = random_model_with_deviation(2, 4, 0.9 * threshold, rng);
        worst = worst.max(log_potential_check(&g, &h, Budget::DEFAULT)?.discrepancy);
    }
    Ok((worst <= 1e-7, format!("max discrepancy {worst:e}")))
}

fn check_orthogonal(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let g = random_bounded_multigraph(5, 7, 4, rng);
        let h = random_model_with_deviation(3, 4, 1.0, rng);
        let o = random_orthogonal(3, rng.gen());
        let gh = apply_orthogonal_model(&o, &h, g.max_degree() as u32);
        let a = exact_partition(&g, &h, Budget::DEFAULT)?;
        let b = exact_partition(&g, &gh, Budget::DEFAULT)?;
        worst = worst.max((a - b).norm() / (1.0 + a.norm()));
    }
    Ok((worst <= 1e-8, format!("max relative difference {worst:e}")))
}

fn check_vertex_models(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let q = 3;
        let mut b = DMatrix::<Complex64>::zeros(q, q);
        for i in 0..q {
            for j in i..q {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                b[(i, j)] = z;
                b[(j, i)] = z;
            }
        }
        let a = (0..q)
            .map(|_| Complex64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5)))
            .collect();
        let vm = VertexModel::new(a, b)?;
        let g = random_bounded_multigraph(5, 7, 4, rng);
        let h = vertex_to_edge(&vm, None, g.max_degree() as u32)?;
        let direct = vertex_model_partition(&g, &vm, Budget::DEFAULT)?;
        worst = worst.max(rel_diff(direct, exact_partition(&g, &h, Budget::DEFAULT)?));
    }
    Ok((worst <= 1e-8, format!("max relative difference {worst:e}")))
}
