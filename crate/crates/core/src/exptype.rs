//! Graph polynomials of exponential type, `p_χ(G)(z) = Σ_k χ_k(G) z^k` with
//! `χ_k(G)` the sum over partitions of `V` into `k` blocks of the product
//! of `χ` on the induced blocks.
//!
//! When `χ(K_1) = 1` the polynomial is monic of degree `|V|` and
//! `q̂(z) = z^{|V|} p_χ(1/z)` satisfies `q̂(0) = 1`; the derivative
//! `q̂^{(m)}(0)` sums over partitions with exactly `|V| − m` blocks, whose
//! non-singleton blocks cover between `m + 1` and `2m` vertices. Evaluating
//! `p_χ` at a large `x` is then a Taylor problem for `ln q̂` at `1/x`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::approx::{
    log_derivatives_from_p, taylor_bound, taylor_order, ApproxCertificate, Mode,
};
use crate::error::{HolantError, Result};
use crate::graph::{next_combination, Multigraph};
use crate::multiset::binomial;
use crate::partitions::{for_each_partition, for_each_rgs};
use crate::poly::{poly_roots, ComplexPoly};
use crate::Budget;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Largest edge count for the `2^{|E|}` edge-subset sums.
pub const MAX_SUBSET_EDGES: usize = 24;

/// Largest vertex count for the Bell-number partition sums.
pub const MAX_PARTITION_VERTICES: usize = 10;

/// The graph parameter inducing an exponential-type polynomial.
pub type ChiFn = Arc<dyn Fn(&Multigraph) -> Complex64 + Send + Sync>;

/// Bound `c` on the moduli of the roots of `p_χ(G)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootRadius {
    pub value: f64,
    /// True when estimated from samples rather than proven.
    pub heuristic: bool,
}

/// A pluggable `χ` with metadata.
#[derive(Clone)]
pub struct ExpTypeSpec {
    name: String,
    chi: ChiFn,
    root_radius: Option<RootRadius>,
    /// `R(Δ)` of bounded exponential type, when known.
    r_delta: Option<f64>,
}

impl fmt::Debug for ExpTypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpTypeSpec")
            .field("name", &self.name)
            .field("root_radius", &self.root_radius)
            .field("r_delta", &self.r_delta)
            .finish()
    }
}

impl ExpTypeSpec {
    pub fn new(name: impl Into<String>, chi: ChiFn) -> Self {
        ExpTypeSpec {
            name: name.into(),
            chi,
            root_radius: None,
            r_delta: None,
        }
    }

    /// `χ` = connected spanning subgraph generating function with edge
    /// weight `v`, so that `p_χ(G)(q) = Z(G)(q, v)`.
    pub fn tutte(v: Complex64) -> Self {
        ExpTypeSpec::new(
            format!("tutte:v={},{}", v.re, v.im),
            Arc::new(move |g: &Multigraph| chi_tutte(g, v).expect("block within edge limit")),
        )
    }

    /// Tutte at `v = −1`: the chromatic polynomial.
    pub fn chromatic() -> Self {
        let mut spec = ExpTypeSpec::tutte(Complex64::new(-1.0, 0.0));
        spec.name = "chromatic".into();
        spec
    }

    /// Parses the built-in names `tutte:v=<re>,<im>` and `chromatic`.
    pub fn parse(text: &str) -> Result<Self> {
        if text == "chromatic" {
            return Ok(ExpTypeSpec::chromatic());
        }
        let rest = text
            .strip_prefix("tutte:v=")
            .ok_or_else(|| HolantError::Parse(format!("unknown polynomial '{text}'")))?;
        let mut parts = rest.split(',');
        let num = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| HolantError::Parse(format!("expected tutte:v=<re>,<im>, got '{text}'")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| HolantError::Parse(format!("{text}: {e}")))
        };
        let re = num(parts.next())?;
        let im = num(parts.next())?;
        if parts.next().is_some() {
            return Err(HolantError::Parse(format!("trailing fields in '{text}'")));
        }
        Ok(ExpTypeSpec::tutte(Complex64::new(re, im)))
    }

    pub fn with_root_radius(mut self, c: f64) -> Self {
        self.root_radius = Some(RootRadius {
            value: c,
            heuristic: false,
        });
        self
    }

    pub fn with_heuristic_radius(mut self, c: f64) -> Self {
        self.root_radius = Some(RootRadius {
            value: c,
            heuristic: true,
        });
        self
    }

    pub fn with_r_delta(mut self, r: f64) -> Self {
        self.r_delta = Some(r);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root_radius(&self) -> Option<RootRadius> {
        self.root_radius
    }

    pub fn r_delta(&self) -> Option<f64> {
        self.r_delta
    }

    pub fn chi(&self, g: &Multigraph) -> Complex64 {
        (self.chi)(g)
    }
}

fn check_edges(g: &Multigraph) -> Result<()> {
    if g.m() > MAX_SUBSET_EDGES {
        return Err(HolantError::BudgetExceeded {
            needed: 2f64.powi(g.m() as i32),
            budget: 1 << MAX_SUBSET_EDGES,
        });
    }
    Ok(())
}

/// Calls `f(|A|, components of (V, A))` for every edge subset `A`.
fn for_each_edge_subset(g: &Multigraph, mut f: impl FnMut(usize, usize)) {
    let n = g.n();
    let mut parent: Vec<usize> = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << g.m()) {
        parent.clear();
        parent.extend(0..n);
        let mut components = n;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if mask >> e & 1 == 0 {
                continue;
            }
            let (mut a, mut b) = (u, v);
            while parent[a] != a {
                a = parent[a];
            }
            while parent[b] != b {
                b = parent[b];
            }
            if a != b {
                parent[a.max(b)] = a.min(b);
                components -= 1;
            }
        }
        f(mask.count_ones() as usize, components);
    }
}

/// `Σ v^{|A|}` over edge sets `A` with `(V, A)` connected; `0` for the
/// empty graph.
pub fn chi_tutte(g: &Multigraph, v: Complex64) -> Result<Complex64> {
    check_edges(g)?;
    if g.n() == 0 {
        return Ok(ZERO);
    }
    let powers: Vec<Complex64> = (0..=g.m()).map(|i| v.powu(i as u32)).collect();
    let mut sum = ZERO;
    for_each_edge_subset(g, |size, comps| {
        if comps == 1 {
            sum += powers[size];
        }
    });
    Ok(sum)
}

/// `Z(G)(q, v) = Σ_{A ⊆ E} q^{k(A)} v^{|A|}`.
pub fn tutte_direct(g: &Multigraph, q: Complex64, v: Complex64) -> Result<Complex64> {
    check_edges(g)?;
    let vp: Vec<Complex64> = (0..=g.m()).map(|i| v.powu(i as u32)).collect();
    let qp: Vec<Complex64> = (0..=g.n()).map(|i| q.powu(i as u32)).collect();
    let mut sum = ZERO;
    for_each_edge_subset(g, |size, comps| sum += qp[comps] * vp[size]);
    Ok(sum)
}

/// `χ` on induced subgraphs, memoized by vertex set.
struct BlockCache<'a> {
    g: &'a Multigraph,
    spec: &'a ExpTypeSpec,
    values: HashMap<Vec<usize>, Complex64>,
}

impl<'a> BlockCache<'a> {
    fn new(g: &'a Multigraph, spec: &'a ExpTypeSpec) -> Self {
        BlockCache {
            g,
            spec,
            values: HashMap::new(),
        }
    }

    fn get(&mut self, block: &[usize]) -> Complex64 {
        if let Some(&v) = self.values.get(block) {
            return v;
        }
        let sub = self.g.induced_subgraph(block).expect("block vertices in range");
        let v = self.spec.chi(&sub);
        self.values.insert(block.to_vec(), v);
        v
    }
}

/// `χ_0, χ_1, …, χ_{|V|}` by restricted-growth-string enumeration of all set
/// partitions; `χ_0 = 0` unless `V = ∅`.
pub fn chi_k_coefficients(g: &Multigraph, spec: &ExpTypeSpec) -> Result<Vec<Complex64>> {
    let n = g.n();
    if n > MAX_PARTITION_VERTICES {
        return Err(HolantError::BudgetExceeded {
            needed: bell(n),
            budget: bell(MAX_PARTITION_VERTICES) as u64,
        });
    }
    let mut coeffs = vec![ZERO; n + 1];
    if n == 0 {
        coeffs[0] = ONE;
        return Ok(coeffs);
    }
    let mut cache = BlockCache::new(g, spec);
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(n);
    for_each_rgs(n, |a| {
        let count = a.iter().max().map_or(0, |m| m + 1);
        blocks.clear();
        blocks.resize(count, Vec::new());
        for (v, &b) in a.iter().enumerate() {
            blocks[b].push(v);
        }
        let prod = blocks.iter().fold(ONE, |acc, b| acc * cache.get(b));
        coeffs[count] += prod;
    });
    Ok(coeffs)
}

/// `p_χ(G)` as a polynomial in `z`.
pub fn exp_type_polynomial(g: &Multigraph, spec: &ExpTypeSpec) -> Result<ComplexPoly> {
    Ok(ComplexPoly::new(chi_k_coefficients(g, spec)?))
}

fn bell(n: usize) -> f64 {
    let mut row = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    row[0]
}

/// `q̂^{(m)}(0) = m!·Σ Π_j χ(G[V_j])` over partitions of `V` into exactly
/// `|V| − m` blocks, enumerated by the support `S` of the non-singleton
/// blocks: `|S| = s` with `m < s ≤ 2m`, split into `s − m` blocks of size
/// at least 2.
pub fn qhat_derivative(g: &Multigraph, spec: &ExpTypeSpec, m: usize, budget: Budget) -> Result<Complex64> {
    let n = g.n();
    if n == 0 || m >= n {
        return Ok(ZERO);
    }
    let work: f64 = (m + 1..=(2 * m).min(n))
        .map(|s| binomial(n, s) * bell(s))
        .sum();
    budget.check(work)?;
    let mut cache = BlockCache::new(g, spec);
    let singletons: Vec<Complex64> = (0..n).map(|v| cache.get(&[v])).collect();
    let mut total = ZERO;
    if m == 0 {
        total = singletons.iter().fold(ONE, |a, b| a * b);
    }
    for s in m + 1..=(2 * m).min(n) {
        let mut support: Vec<usize> = (0..s).collect();
        loop {
            let mut rest = ONE;
            let mut j = 0;
            for (v, &single) in singletons.iter().enumerate() {
                if j < s && support[j] == v {
                    j += 1;
                } else {
                    rest *= single;
                }
            }
            if rest != ZERO {
                let mut inner = ZERO;
                for_each_partition(&support, s - m, 2, |blocks| {
                    inner += blocks.iter().fold(ONE, |acc, b| acc * cache.get(b));
                });
                total += inner * rest;
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    Ok(total * factorial(m))
}

/// [`qhat_derivative`] by filtering all restricted-growth strings; the
/// independent route used for cross-checks.
pub fn qhat_derivative_rgs(g: &Multigraph, spec: &ExpTypeSpec, m: usize) -> Result<Complex64> {
    let n = g.n();
    if n > MAX_PARTITION_VERTICES {
        return Err(HolantError::BudgetExceeded {
            needed: bell(n),
            budget: bell(MAX_PARTITION_VERTICES) as u64,
        });
    }
    if n == 0 || m >= n {
        return Ok(ZERO);
    }
    let mut cache = BlockCache::new(g, spec);
    let mut total = ZERO;
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for_each_rgs(n, |a| {
        let count = a.iter().max().map_or(0, |x| x + 1);
        if count != n - m {
            return;
        }
        blocks.clear();
        blocks.resize(count, Vec::new());
        for (v, &b) in a.iter().enumerate() {
            blocks[b].push(v);
        }
        total += blocks.iter().fold(ONE, |acc, b| acc * cache.get(b));
    });
    Ok(total * factorial(m))
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Approximates `p_χ(G)(x)` for `|x|` above the root radius `c`.
///
/// Uses `q̂`, whose roots have modulus at least `1/c`, at `t = 1/x`: the
/// radius is `M = 1/c`, `q0 = c/|x|` and the degree bound is `|V| − 1`.
/// Multiplicative mode returns `x^{|V|}·exp(T_n)`; additive mode returns
/// `Re T_n + |V|·ln|x|`.
pub fn eval_exp_type(
    g: &Multigraph,
    spec: &ExpTypeSpec,
    x: Complex64,
    eps: f64,
    mode: Mode,
    budget: Budget,
) -> Result<ApproxCertificate> {
    let radius = spec.root_radius().ok_or_else(|| {
        HolantError::Precondition(format!(
            "no root radius for '{}'; supply c or run estimate_root_radius",
            spec.name()
        ))
    })?;
    let c = radius.value;
    if !(x.norm() > c) {
        return Err(HolantError::OutsideRegion(format!(
            "|x| = {} does not exceed the root radius {c}",
            x.norm()
        )));
    }
    let k1 = spec.chi(&Multigraph::empty(1));
    if (k1 - ONE).norm() > 1e-12 {
        return Err(HolantError::Precondition(format!(
            "chi(K_1) = {k1}, but the monic transform needs chi(K_1) = 1"
        )));
    }
    if !(eps > 0.0) {
        return Err(HolantError::Precondition(format!("eps must be positive, got {eps}")));
    }
    let n = g.n();
    let degree = n.saturating_sub(1);
    let q0 = c / x.norm();
    let order = if q0 == 0.0 || degree == 0 {
        0
    } else {
        taylor_order(degree, q0, eps, mode)?
    };
    let derivs = (0..=order)
        .map(|m| qhat_derivative(g, spec, m, budget))
        .collect::<Result<Vec<_>>>()?;
    let logs = log_derivatives_from_p(&derivs, order)?;
    let t = ONE / x;
    let series = logs.taylor(t);
    let log_value = series + x.ln() * n as f64;
    let value = match mode {
        Mode::Multiplicative => x.powu(n as u32) * series.exp(),
        Mode::Additive => Complex64::new(series.re + n as f64 * x.norm().ln(), 0.0),
    };
    Ok(ApproxCertificate {
        value,
        log_value,
        radius: if c == 0.0 { f64::INFINITY } else { 1.0 / c },
        q0,
        n: order,
        bound: taylor_bound(degree, q0, order),
        mode,
        heuristic_radius: radius.heuristic,
    })
}

/// Safety factor applied to the largest observed root modulus.
pub const ROOT_RADIUS_SAFETY: f64 = 1.5;

/// `1.5 ×` the largest root modulus of `p_χ` over the samples, which must
/// have maximum degree at most `max_degree`. This is a heuristic: it bounds
/// the samples, not the whole class.
pub fn estimate_root_radius(spec: &ExpTypeSpec, max_degree: usize, samples: &[Multigraph]) -> Result<f64> {
    let mut largest: f64 = 0.0;
    for g in samples {
        if g.max_degree() > max_degree {
            return Err(HolantError::Precondition(format!(
                "sample with max degree {} exceeds {max_degree}",
                g.max_degree()
            )));
        }
        let p = exp_type_polynomial(g, spec)?;
        if p.degree().unwrap_or(0) >= 1 {
            for r in poly_roots(&p)? {
                largest = largest.max(r.norm());
            }
        }
    }
    Ok(largest * ROOT_RADIUS_SAFETY)
}
