//! Derivatives of `q(z) = p(G)(I + z(h − I))` at `z = 0`.
//!
//! Everything here works with the normalized `q̃ = q / k^{|E|}`, so that
//! `q̃(0) = 1` and the numbers stay bounded on large graphs. Expanding the
//! product over vertices gives
//!
//! ```text
//! q̃(z) = Σ_{U ⊆ V} z^{|U|} W(U),
//! W(U) = k^{−|E(U)|} Σ_{φ: E(U) → [k]} Π_{v ∈ U} (h − I)(φ(δ(v))),
//! ```
//!
//! where `E(U)` are the edges touching `U`. An edge from `U` to `V ∖ U`
//! affects only its endpoint in `U`, so its color is summed out into a
//! per-vertex table first and `W(U)` becomes a contraction over the edges
//! of `G[U]` alone.
//!
//! Two routes compute the coefficients:
//!
//! * [`DerivativeEngine::Subsets`] sums `W(U)` over all `|U| = m`;
//! * [`DerivativeEngine::Clusters`] uses that `W` factorizes over the
//!   components of `G[U]`, so `ln q̃` is a sum over connected vertex sets
//!   `S` of Möbius-inverted terms that are `O(z^{|S|})`. Only connected
//!   sets with at most `n` vertices are needed for the first `n`
//!   coefficients, which keeps large bounded-degree graphs tractable.

use std::collections::HashMap;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HolantError, Result};
use crate::exact::contract_network;
use crate::graph::{next_combination, Multigraph};
use crate::models::{EdgeColoringModel, SymmetricTensor, TensorAssignment};
use crate::multiset::{binomial, compositions, multinomial};
use crate::Budget;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Which expansion computes the derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeEngine {
    /// Subsets when there are at most [`AUTO_SUBSET_LIMIT`] of them,
    /// clusters otherwise.
    #[default]
    Auto,
    Subsets,
    Clusters,
}

impl FromStr for DerivativeEngine {
    type Err = HolantError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(DerivativeEngine::Auto),
            "subsets" => Ok(DerivativeEngine::Subsets),
            "clusters" => Ok(DerivativeEngine::Clusters),
            other => Err(HolantError::Parse(format!("unknown derivative engine '{other}'"))),
        }
    }
}

/// Number of vertex subsets up to which [`DerivativeEngine::Auto`] picks the
/// subset route.
pub const AUTO_SUBSET_LIMIT: f64 = 200_000.0;

/// `d^m q/dz^m (0)` by the subset formula, including the `k^{|E|}` factor.
pub fn q_derivative(g: &Multigraph, h: &EdgeColoringModel, m: usize, budget: Budget) -> Result<Complex64> {
    let t = TensorAssignment::from_model(g, h);
    let d = normalized_q_derivatives(g, &t, m, DerivativeEngine::Subsets, budget)?;
    Ok(d[m] * (h.k() as f64).powi(g.m() as i32))
}

/// `q̃^{(m)}(0)` for `m = 0, …, n`, where `q̃(z)` is the contraction of
/// `(g, I + z(t − I))` divided by `k^{|E|}`.
pub fn normalized_q_derivatives(
    g: &Multigraph,
    t: &TensorAssignment,
    n: usize,
    engine: DerivativeEngine,
    budget: Budget,
) -> Result<Vec<Complex64>> {
    t.check_against(g)?;
    let frags = Fragments::new(g, t);
    let engine = match engine {
        DerivativeEngine::Auto => {
            let subsets: f64 = (0..=n.min(g.n())).map(|m| binomial(g.n(), m)).sum();
            if subsets <= AUTO_SUBSET_LIMIT {
                DerivativeEngine::Subsets
            } else {
                DerivativeEngine::Clusters
            }
        }
        e => e,
    };
    match engine {
        DerivativeEngine::Subsets => subset_derivatives(&frags, n, budget),
        _ => {
            let logs = cluster_log_coefficients(&frags, n, budget)?;
            Ok(exp_series_derivatives(&logs))
        }
    }
}

/// `[z^m] ln q̃` for `m = 0, …, n` by the cluster route; entry `0` is `0`.
pub fn normalized_log_coefficients(
    g: &Multigraph,
    t: &TensorAssignment,
    n: usize,
    budget: Budget,
) -> Result<Vec<Complex64>> {
    t.check_against(g)?;
    cluster_log_coefficients(&Fragments::new(g, t), n, budget)
}

/// Per-vertex data for fragment weights `W(U)`.
struct Fragments<'a> {
    g: &'a Multigraph,
    k: usize,
    /// `tables[v][j]`: `h^v − 1` with `j` incidences summed over all colors
    /// and scaled by `k^{−j}`.
    tables: Vec<Vec<SymmetricTensor>>,
    /// Non-loop incidences as `(edge index, other endpoint)`, loops as
    /// `(edge index, v)` once.
    incidences: Vec<Vec<(usize, usize)>>,
    neighbours: Vec<Vec<usize>>,
}

impl<'a> Fragments<'a> {
    fn new(g: &'a Multigraph, t: &TensorAssignment) -> Self {
        let k = t.k();
        let mut incidences = vec![Vec::new(); g.n()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            incidences[u].push((e, v));
            if u != v {
                incidences[v].push((e, u));
            }
        }
        let tables = (0..g.n())
            .map(|v| {
                let dev = t.tensor(v).map(|x| x - ONE);
                let non_loop = incidences[v].iter().filter(|&&(_, w)| w != v).count();
                (0..=non_loop).map(|j| marginalize(&dev, j as u32, k)).collect()
            })
            .collect();
        let neighbours = g
            .neighbours()
            .into_iter()
            .enumerate()
            .map(|(v, mut ns)| {
                ns.retain(|&w| w != v);
                ns.sort_unstable();
                ns.dedup();
                ns
            })
            .collect();
        Fragments {
            g,
            k,
            tables,
            incidences,
            neighbours,
        }
    }

    /// `W(U)` for a sorted vertex set.
    fn weight(&self, set: &[usize]) -> Complex64 {
        let pos = |v: usize| set.binary_search(&v).ok();
        let mut edges = Vec::new();
        let mut half = vec![0usize; set.len()];
        for (i, &v) in set.iter().enumerate() {
            for &(_, w) in &self.incidences[v] {
                match pos(w) {
                    Some(j) if j >= i => edges.push((i, j)),
                    Some(_) => {}
                    None => half[i] += 1,
                }
            }
        }
        let local = Multigraph::new(set.len(), edges).expect("positions are in range");
        let tensors = set
            .iter()
            .zip(&half)
            .map(|(&v, &j)| self.tables[v][j].clone())
            .collect();
        let t = TensorAssignment::new(self.k, tensors).expect("tables share k");
        let inner = contract_network(&local, &t, Budget(u64::MAX)).expect("degrees match");
        inner * (self.k as f64).powi(-(local.m() as i32))
    }

    /// Number of edges with both ends in the sorted set.
    fn internal_edges(&self, set: &[usize]) -> usize {
        set.iter()
            .map(|&v| {
                self.incidences[v]
                    .iter()
                    .filter(|&&(_, w)| w >= v && set.binary_search(&w).is_ok())
                    .count()
            })
            .sum()
    }

    fn connected_components(&self, set: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; set.len()];
        let mut out = Vec::new();
        for start in 0..set.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![set[start]];
            let mut stack = vec![set[start]];
            while let Some(v) = stack.pop() {
                for &w in &self.neighbours[v] {
                    if let Ok(j) = set.binary_search(&w) {
                        if !seen[j] {
                            seen[j] = true;
                            comp.push(w);
                            stack.push(w);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// `(t ⊕ j)(γ) = k^{−j} Σ_{β ∈ ℕ^k_j} multinom(β) t(γ + β)` on `ℕ^k_{d−j}`.
fn marginalize(t: &SymmetricTensor, j: u32, k: usize) -> SymmetricTensor {
    if j == 0 {
        return t.clone();
    }
    let betas: Vec<(Vec<u32>, f64)> = compositions(k, j)
        .into_iter()
        .map(|b| {
            let w = multinomial(&b);
            (b, w)
        })
        .collect();
    let scale = (k as f64).powi(-(j as i32));
    let mut sum_alpha = vec![0u32; k];
    SymmetricTensor::from_fn(k, t.degree() - j, |gamma| {
        let mut acc = ZERO;
        for (beta, w) in &betas {
            for c in 0..k {
                sum_alpha[c] = gamma[c] + beta[c];
            }
            acc += t.get(&sum_alpha) * *w;
        }
        acc * scale
    })
}

fn subset_derivatives(frags: &Fragments, n: usize, budget: Budget) -> Result<Vec<Complex64>> {
    let nv = frags.g.n();
    let k = frags.k as f64;
    let dmax = frags.g.max_degree();
    let work: f64 = (1..=n.min(nv))
        .map(|m| binomial(nv, m) * k.powi(((m * dmax) / 2).min(frags.g.m()) as i32))
        .sum();
    budget.check(work)?;
    let mut out = vec![ZERO; n + 1];
    out[0] = ONE;
    let mut factorial = 1.0;
    for m in 1..=n {
        factorial *= m as f64;
        if m > nv {
            continue;
        }
        let mut subset: Vec<usize> = (0..m).collect();
        let mut sum = ZERO;
        loop {
            let mut chunk = Vec::with_capacity(1 << 14);
            let mut more = true;
            while chunk.len() < 1 << 14 {
                chunk.push(subset.clone());
                if !next_combination(&mut subset, nv) {
                    more = false;
                    break;
                }
            }
            let weights: Vec<Complex64> = chunk.par_iter().map(|u| frags.weight(u)).collect();
            sum = weights.into_iter().fold(sum, |a, b| a + b);
            if !more {
                break;
            }
        }
        out[m] = sum * factorial;
    }
    Ok(out)
}

/// Connected vertex sets with at most `max_size` vertices, each exactly
/// once, sorted ascending within the set. Sets are grouped by their least
/// vertex and listed in extension order.
pub(crate) fn connected_sets(neighbours: &[Vec<usize>], max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if max_size == 0 {
        return out;
    }
    for root in 0..neighbours.len() {
        let ext: Vec<usize> = neighbours[root].iter().copied().filter(|&u| u > root).collect();
        let mut sub = vec![root];
        extend(neighbours, &mut sub, ext, root, max_size, &mut out);
    }
    out
}

fn extend(
    neighbours: &[Vec<usize>],
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    root: usize,
    max_size: usize,
    out: &mut Vec<Vec<usize>>,
) {
    let mut sorted = sub.clone();
    sorted.sort_unstable();
    out.push(sorted);
    if sub.len() == max_size {
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next_ext = ext.clone();
        for &u in &neighbours[w] {
            if u <= root || sub.contains(&u) || next_ext.contains(&u) {
                continue;
            }
            // exclusive neighbours of w: not adjacent to the current set
            if sub.iter().any(|&s| neighbours[s].binary_search(&u).is_ok()) {
                continue;
            }
            next_ext.push(u);
        }
        sub.push(w);
        extend(neighbours, sub, next_ext, root, max_size, out);
        sub.pop();
    }
}

fn cluster_log_coefficients(frags: &Fragments, n: usize, budget: Budget) -> Result<Vec<Complex64>> {
    let mut logs = vec![ZERO; n + 1];
    if n == 0 || frags.g.n() == 0 {
        return Ok(logs);
    }
    let sets = connected_sets(&frags.neighbours, n);
    let k = frags.k as f64;
    let work: f64 = sets
        .iter()
        .map(|s| 2f64.powi(s.len() as i32) + k.powi(frags.internal_edges(s) as i32))
        .sum();
    budget.check(work)?;
    let weights: Vec<Complex64> = sets.par_iter().map(|s| frags.weight(s)).collect();
    let weight_of: HashMap<&[usize], Complex64> =
        sets.iter().map(|s| s.as_slice()).zip(weights.iter().copied()).collect();

    // ln Z_S truncated at order n, for every connected S
    let ln_z: Vec<Vec<Complex64>> = sets
        .par_iter()
        .map(|s| {
            let mut z = vec![ZERO; n + 1];
            z[0] = ONE;
            for_each_subset(s, |sub| {
                if sub.is_empty() {
                    return;
                }
                let prod = frags
                    .connected_components(sub)
                    .iter()
                    .map(|c| weight_of[c.as_slice()])
                    .fold(ONE, |a, b| a * b);
                z[sub.len()] += prod;
            });
            log_series(&z)
        })
        .collect();
    let ln_z_of: HashMap<&[usize], &Vec<Complex64>> =
        sets.iter().map(|s| s.as_slice()).zip(ln_z.iter()).collect();

    // φ(S) = Σ_{T ⊆ S} (−1)^{|S∖T|} Σ_{components C of G[T]} ln Z_C
    let contributions: Vec<Vec<Complex64>> = sets
        .par_iter()
        .map(|s| {
            let mut phi = vec![ZERO; n + 1];
            for_each_subset(s, |sub| {
                if sub.is_empty() {
                    return;
                }
                let sign = if (s.len() - sub.len()) % 2 == 0 { 1.0 } else { -1.0 };
                for c in frags.connected_components(sub) {
                    let series = ln_z_of[c.as_slice()];
                    for m in s.len()..=n {
                        phi[m] += series[m] * sign;
                    }
                }
            });
            phi
        })
        .collect();
    for phi in contributions {
        for m in 1..=n {
            logs[m] += phi[m];
        }
    }
    Ok(logs)
}

fn for_each_subset(set: &[usize], mut f: impl FnMut(&[usize])) {
    let mut sub = Vec::with_capacity(set.len());
    for mask in 0u32..(1u32 << set.len()) {
        sub.clear();
        for (i, &v) in set.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sub.push(v);
            }
        }
        f(&sub);
    }
}

/// `ln a` as a truncated power series, for `a_0 = 1`.
pub(crate) fn log_series(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut b = vec![ZERO; n];
    for m in 1..n {
        let mut acc = a[m];
        for j in 1..m {
            acc -= b[j] * a[m - j] * (j as f64 / m as f64);
        }
        b[m] = acc;
    }
    b
}

/// Derivatives `m!·[z^m] exp(L)` of the exponential of a series with
/// `L_0 = 0`.
pub(crate) fn exp_series_derivatives(logs: &[Complex64]) -> Vec<Complex64> {
    let n = logs.len();
    let mut e = vec![ZERO; n];
    if n == 0 {
        return e;
    }
    e[0] = ONE;
    for m in 1..n {
        let mut acc = ZERO;
        for j in 1..=m {
            acc += logs[j] * e[m - j] * j as f64;
        }
        e[m] = acc / m as f64;
    }
    let mut factorial = 1.0;
    for (m, x) in e.iter_mut().enumerate().skip(1) {
        factorial *= m as f64;
        *x *= factorial;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_poly_by_interpolation, interpolate_network};
    use crate::graph::{generate, GraphFamilySpec};
    use crate::models::perturbed_ones;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn endpoints_of_the_formula() {
        let g = Multigraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]).unwrap();
        let h = perturbed_ones(2, 3, 0.6, 11).unwrap();
        assert_eq!(q_derivative(&g, &h, 0, Budget::DEFAULT).unwrap(), Complex64::new(32.0, 0.0));
        let diff = TensorAssignment::from_model(&g, &h).map(|v| v - ONE);
        let top = contract_network(&g, &diff, Budget::DEFAULT).unwrap() * 24.0;
        assert!(rel(q_derivative(&g, &h, 4, Budget::DEFAULT).unwrap(), top) < 1e-12);
    }

    #[test]
    fn subsets_match_interpolation() {
        let g = Multigraph::new(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 4)]).unwrap();
        let h = perturbed_ones(3, 4, 0.8, 2).unwrap();
        let poly = exact_poly_by_interpolation(&g, &h, Budget::DEFAULT).unwrap();
        let mut fact = 1.0;
        for m in 0..=5 {
            if m > 0 {
                fact *= m as f64;
            }
            let d = q_derivative(&g, &h, m, Budget::DEFAULT).unwrap();
            assert!(rel(d, poly.coeff(m) * fact) < 1e-9, "m = {m}");
        }
    }

    #[test]
    fn clusters_match_subsets() {
        let graphs = [
            Multigraph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (1, 1), (2, 3)]).unwrap(),
            generate(&GraphFamilySpec::Torus2d { rows: 3, cols: 3 }).unwrap(),
            Multigraph::new(5, [(0, 1), (3, 4)]).unwrap(),
        ];
        for (i, g) in graphs.iter().enumerate() {
            let h = perturbed_ones(2, g.max_degree() as u32, 0.3, i as u64).unwrap();
            let t = TensorAssignment::from_model(g, &h);
            let n = g.n();
            let a = normalized_q_derivatives(g, &t, n, DerivativeEngine::Subsets, Budget::DEFAULT).unwrap();
            let b = normalized_q_derivatives(g, &t, n, DerivativeEngine::Clusters, Budget::DEFAULT).unwrap();
            for m in 0..=n {
                assert!((a[m] - b[m]).norm() <= 1e-9 * (1.0 + a[m].norm()), "graph {i}, m = {m}: {} vs {}", a[m], b[m]);
            }
        }
    }

    #[test]
    fn cluster_coefficients_beyond_degree_vanish_in_q() {
        let g = generate(&GraphFamilySpec::Cycle { n: 4 }).unwrap();
        let h = perturbed_ones(2, 2, 0.2, 3).unwrap();
        let t = TensorAssignment::from_model(&g, &h);
        let d = normalized_q_derivatives(&g, &t, 7, DerivativeEngine::Clusters, Budget::DEFAULT).unwrap();
        for m in 5..=7 {
            assert!(d[m].norm() < 1e-10 * (1.0 + d[4].norm()) * 5040.0);
        }
        let poly = interpolate_network(&g, &t, Budget::DEFAULT).unwrap();
        assert!(rel(d[4] / 24.0 * 16.0, poly.coeff(4)) < 1e-8);
    }

    #[test]
    fn connected_set_enumeration_counts() {
        // path on 4 vertices: connected sets are the 10 intervals
        let p4 = generate(&GraphFamilySpec::Path { n: 4 }).unwrap();
        let frags_ns: Vec<Vec<usize>> = p4.neighbours();
        assert_eq!(connected_sets(&frags_ns, 4).len(), 10);
        assert_eq!(connected_sets(&frags_ns, 2).len(), 7);
        // K4: all 15 nonempty subsets
        let k4 = Multigraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let sets = connected_sets(&k4.neighbours(), 4);
        assert_eq!(sets.len(), 15);
        let mut uniq = sets.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 15);
    }

    #[test]
    fn series_helpers_invert() {
        let logs = vec![ZERO, Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.0), Complex64::new(0.05, 0.4)];
        let derivs = exp_series_derivatives(&logs);
        let coeffs: Vec<Complex64> = derivs
            .iter()
            .enumerate()
            .map(|(m, d)| d / (1..=m).map(|x| x as f64).product::<f64>())
            .collect();
        let back = log_series(&coeffs);
        for m in 0..4 {
            assert!((back[m] - logs[m]).norm() < 1e-14);
        }
    }

    #[test]
    fn engine_names_parse() {
        assert_eq!("clusters".parse::<DerivativeEngine>().unwrap(), DerivativeEngine::Clusters);
        assert!("magic".parse::<DerivativeEngine>().is_err());
    }
}
