//! Brute-force contraction of tensor networks over all edge colorings,
//! restricted sums, vertex-model sums and coefficient extraction by
//! interpolation.
//!
//! Colorings are enumerated depth first over the edges in their stored
//! order, colors ascending, so the summation order is lexicographic. Each
//! vertex keeps a running code of the colors it has seen; its factor is
//! looked up when its last incident edge is colored and a zero factor prunes
//! the whole subtree. Parallel runs split the enumeration on a fixed-length
//! prefix of free edges and add the per-prefix sums in prefix order, so the
//! result does not depend on the number of worker threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HolantError, Result};
use crate::graph::Multigraph;
use crate::models::{EdgeColoringModel, SymmetricTensor, TensorAssignment, VertexModel};
use crate::poly::ComplexPoly;
use crate::Budget;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Colorings fixed on a subset `F` of the edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedSpec {
    /// `(edge index, color)` pairs; edge indices are distinct.
    pub fixed: Vec<(usize, usize)>,
}

impl RestrictedSpec {
    pub fn unrestricted() -> Self {
        RestrictedSpec { fixed: Vec::new() }
    }

    fn per_edge(&self, m: usize, k: usize) -> Result<Vec<Option<usize>>> {
        let mut out = vec![None; m];
        for &(e, c) in &self.fixed {
            if e >= m || c >= k {
                return Err(HolantError::Precondition(format!(
                    "restriction ({e}, {c}) outside {m} edges and {k} colors"
                )));
            }
            if out[e].replace(c).is_some() {
                return Err(HolantError::Precondition(format!("edge {e} restricted twice")));
            }
        }
        Ok(out)
    }
}

/// `p(G)(h) = Σ_φ Π_v h(φ(δ(v)))`.
pub fn exact_partition(g: &Multigraph, h: &EdgeColoringModel, budget: Budget) -> Result<Complex64> {
    contract_network(g, &TensorAssignment::from_model(g, h), budget)
}

/// Contraction `Σ_φ Π_v h^v(φ(δ(v)))` of the tensor network `(g, t)`.
pub fn contract_network(g: &Multigraph, t: &TensorAssignment, budget: Budget) -> Result<Complex64> {
    restricted_partition(g, t, &RestrictedSpec::unrestricted(), budget)
}

/// The contraction restricted to colorings that extend the fixed part.
pub fn restricted_partition(
    g: &Multigraph,
    t: &TensorAssignment,
    r: &RestrictedSpec,
    budget: Budget,
) -> Result<Complex64> {
    t.check_against(g)?;
    let plan = Plan::new(g, t, r.per_edge(g.m(), t.k())?)?;
    budget.check((t.k() as f64).powi(plan.free_edges() as i32))?;
    Ok(plan.run())
}

struct Plan<'a> {
    k: usize,
    edges: Vec<(usize, usize)>,
    fixed: Vec<Option<usize>>,
    /// `(vertex, code increment)` pairs per edge and color.
    increments: Vec<Vec<Vec<(usize, usize)>>>,
    /// Vertices whose last incident edge is this edge.
    closes: Vec<Vec<usize>>,
    tables: Vec<&'a [Complex64]>,
    /// Product of the factors of isolated vertices.
    constant: Complex64,
}

impl<'a> Plan<'a> {
    fn new(g: &Multigraph, t: &'a TensorAssignment, fixed: Vec<Option<usize>>) -> Result<Self> {
        let k = t.k();
        let tensors: &'a [SymmetricTensor] = t.tensors();
        let mut last = vec![None; g.n()];
        let mut increments = Vec::with_capacity(g.m());
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            last[u] = Some(e);
            last[v] = Some(e);
            let su = tensors[u].code_space();
            let sv = tensors[v].code_space();
            increments.push(
                (0..k)
                    .map(|c| {
                        if u == v {
                            vec![(u, 2 * su.stride(c))]
                        } else {
                            vec![(u, su.stride(c)), (v, sv.stride(c))]
                        }
                    })
                    .collect(),
            );
        }
        let mut closes = vec![Vec::new(); g.m()];
        let mut constant = ONE;
        for (v, l) in last.iter().enumerate() {
            match l {
                Some(e) => closes[*e].push(v),
                None => constant *= tensors[v].dense()[0],
            }
        }
        Ok(Plan {
            k,
            edges: g.edges().to_vec(),
            fixed,
            increments,
            closes,
            tables: tensors.iter().map(|t| t.dense()).collect(),
            constant,
        })
    }

    fn free_edges(&self) -> usize {
        self.fixed.iter().filter(|f| f.is_none()).count()
    }

    fn colors(&self, e: usize) -> std::ops::Range<usize> {
        match self.fixed[e] {
            Some(c) => c..c + 1,
            None => 0..self.k,
        }
    }

    fn run(&self) -> Complex64 {
        if self.constant == ZERO {
            return ZERO;
        }
        let m = self.edges.len();
        let mut codes = vec![0usize; self.tables.len()];
        // split on the first `depth` edges once that yields enough prefixes
        let mut depth = 0;
        let mut prefixes = 1usize;
        while depth < m && prefixes < 256 && m - depth > 8 {
            prefixes *= self.colors(depth).len();
            depth += 1;
        }
        if depth == 0 {
            return self.constant * self.dfs(0, &mut codes, ONE);
        }
        let mut starts: Vec<(Vec<usize>, Complex64)> = Vec::new();
        self.collect_prefixes(0, depth, &mut codes, ONE, &mut starts);
        let partial: Vec<Complex64> = starts
            .into_par_iter()
            .map(|(codes, acc)| {
                let mut codes = codes;
                self.dfs(depth, &mut codes, acc)
            })
            .collect();
        self.constant * partial.into_iter().fold(ZERO, |a, b| a + b)
    }

    fn collect_prefixes(
        &self,
        e: usize,
        depth: usize,
        codes: &mut [usize],
        acc: Complex64,
        out: &mut Vec<(Vec<usize>, Complex64)>,
    ) {
        if e == depth {
            out.push((codes.to_vec(), acc));
            return;
        }
        for c in self.colors(e) {
            if let Some(next) = self.step(e, c, codes, acc) {
                self.collect_prefixes(e + 1, depth, codes, next, out);
            }
            self.unstep(e, c, codes);
        }
    }

    /// Colors edge `e` with `c`; returns the new partial product unless a
    /// closing factor vanished.
    #[inline]
    fn step(&self, e: usize, c: usize, codes: &mut [usize], acc: Complex64) -> Option<Complex64> {
        for &(v, inc) in &self.increments[e][c] {
            codes[v] += inc;
        }
        let mut acc = acc;
        for &v in &self.closes[e] {
            let f = self.tables[v][codes[v]];
            if f == ZERO {
                return None;
            }
            acc *= f;
        }
        Some(acc)
    }

    #[inline]
    fn unstep(&self, e: usize, c: usize, codes: &mut [usize]) {
        for &(v, inc) in &self.increments[e][c] {
            codes[v] -= inc;
        }
    }

    fn dfs(&self, e: usize, codes: &mut [usize], acc: Complex64) -> Complex64 {
        if e == self.edges.len() {
            return acc;
        }
        let mut sum = ZERO;
        for c in self.colors(e) {
            if let Some(next) = self.step(e, c, codes, acc) {
                sum += self.dfs(e + 1, codes, next);
            }
            self.unstep(e, c, codes);
        }
        sum
    }
}

/// `p(G)(a, B) = Σ_{σ: V → [n]} Π_v a_{σ(v)} Π_{uv ∈ E} B_{σ(u)σ(v)}`; a loop at
/// `v` contributes `B_{σ(v)σ(v)}`.
pub fn vertex_model_partition(g: &Multigraph, model: &VertexModel, budget: Budget) -> Result<Complex64> {
    let q = model.a().len();
    let n = g.n();
    budget.check((q as f64).powi(n as i32))?;
    let b: &DMatrix<Complex64> = model.b();
    // edges grouped by their later endpoint so each is applied once both ends are set
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        closing[v].push(u);
    }
    fn rec(
        v: usize,
        sigma: &mut Vec<usize>,
        acc: Complex64,
        a: &[Complex64],
        b: &DMatrix<Complex64>,
        closing: &[Vec<usize>],
    ) -> Complex64 {
        if v == closing.len() {
            return acc;
        }
        let mut sum = ZERO;
        for s in 0..a.len() {
            sigma.push(s);
            let mut next = acc * a[s];
            for &u in &closing[v] {
                next *= b[(sigma[u], s)];
            }
            if next != ZERO {
                sum += rec(v + 1, sigma, next, a, b, closing);
            }
            sigma.pop();
        }
        sum
    }
    Ok(rec(0, &mut Vec::with_capacity(n), ONE, model.a(), b, &closing))
}

/// Coefficients of `q(z) = p(G)(I + z(h − I))`.
pub fn exact_poly_by_interpolation(
    g: &Multigraph,
    h: &EdgeColoringModel,
    budget: Budget,
) -> Result<ComplexPoly> {
    interpolate_network(g, &TensorAssignment::from_model(g, h), budget)
}

/// Coefficients of `z ↦ contraction of (g, I + z(t − I))`, a polynomial of
/// degree at most `|V|`, from its values at `z = 0, 1, …, |V|`.
pub fn interpolate_network(g: &Multigraph, t: &TensorAssignment, budget: Budget) -> Result<ComplexPoly> {
    t.check_against(g)?;
    let n = g.n();
    budget.check((n as f64 + 1.0) * (t.k() as f64).powi(g.m() as i32))?;
    let nodes: Vec<f64> = (0..=n).map(|i| i as f64).collect();
    let values = nodes
        .iter()
        .map(|&z| {
            let shifted = t.map(|v| ONE + z * (v - ONE));
            contract_network(g, &shifted, Budget(u64::MAX))
        })
        .collect::<Result<Vec<_>>>()?;
    let coeffs = newton_to_monomial(&nodes, &values);
    let poly = ComplexPoly::new(coeffs);
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let residual = nodes
        .iter()
        .zip(&values)
        .map(|(&z, &y)| (poly.eval(Complex64::new(z, 0.0)) - y).norm())
        .fold(0.0, f64::max);
    if residual > 1e-8 * scale {
        return Err(HolantError::Precondition(format!(
            "interpolation residual {residual:e} exceeds 1e-8 relative"
        )));
    }
    Ok(poly)
}

/// Newton divided differences at the given nodes, converted to monomial
/// coefficients.
pub fn newton_to_monomial(nodes: &[f64], values: &[Complex64]) -> Vec<Complex64> {
    let n = nodes.len();
    let mut dd = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - j]);
        }
    }
    // Horner on the Newton form: p = dd[0] + (z − x0)(dd[1] + (z − x1)(…))
    let mut coeffs = vec![ZERO; n];
    for i in (0..n).rev() {
        // coeffs ← coeffs·(z − x_i) + dd[i]
        let mut next = vec![ZERO; n];
        for j in 0..n - 1 {
            next[j + 1] += coeffs[j];
            next[j] -= coeffs[j] * nodes[i];
        }
        next[0] += dd[i];
        coeffs = next;
    }
    coeffs
}
