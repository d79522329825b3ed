//! Edge-coloring models, tensor assignments, vertex-coloring models and the
//! complex orthogonal group acting on them.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex_json::JsonComplex;
use crate::error::{HolantError, Result};
use crate::graph::Multigraph;
use crate::multiset::{compositions, compositions_up_to, norm, CodeSpace};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A `k`-color edge-coloring model `h: ℕ^k → ℂ`, stored as a sparse table
/// plus a default value for every unlisted `α`.
///
/// Builders that tabulate a rule (matchings, rank-one models, ...) do so up
/// to a degree bound; the model is only faithful to the rule on graphs whose
/// maximum degree does not exceed that bound.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeColoringModel {
    k: usize,
    entries: BTreeMap<Vec<u32>, Complex64>,
    default: Complex64,
}

impl EdgeColoringModel {
    pub fn new(k: usize, default: Complex64) -> Result<Self> {
        if k == 0 {
            return Err(HolantError::Precondition("a model needs at least one color".into()));
        }
        Ok(EdgeColoringModel {
            k,
            entries: BTreeMap::new(),
            default,
        })
    }

    /// The all-ones model `I`.
    pub fn ones(k: usize) -> Result<Self> {
        EdgeColoringModel::new(k, ONE)
    }

    /// Tabulates `f` on every `α` with `|α| ≤ max_degree`.
    pub fn from_fn(
        k: usize,
        max_degree: u32,
        default: Complex64,
        mut f: impl FnMut(&[u32]) -> Complex64,
    ) -> Result<Self> {
        let mut model = EdgeColoringModel::new(k, default)?;
        for alpha in compositions_up_to(k, max_degree) {
            let value = f(&alpha);
            model.entries.insert(alpha, value);
        }
        Ok(model)
    }

    pub fn set(&mut self, alpha: Vec<u32>, value: Complex64) -> Result<()> {
        if alpha.len() != self.k {
            return Err(HolantError::Precondition(format!(
                "multiset {alpha:?} does not have {} colors",
                self.k
            )));
        }
        self.entries.insert(alpha, value);
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn default_value(&self) -> Complex64 {
        self.default
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u32>, Complex64> {
        &self.entries
    }

    /// Largest `|α|` among listed entries.
    pub fn max_alpha_norm(&self) -> u32 {
        self.entries.keys().map(|a| norm(a)).max().unwrap_or(0)
    }

    pub fn value(&self, alpha: &[u32]) -> Complex64 {
        self.entries.get(alpha).copied().unwrap_or(self.default)
    }

    /// `sup_{|α| ≤ max_degree} |h(α) − 1|`.
    pub fn deviation_from_ones(&self, max_degree: u32) -> f64 {
        compositions_up_to(self.k, max_degree)
            .iter()
            .map(|a| (self.value(a) - ONE).norm())
            .fold(0.0, f64::max)
    }

    /// The restriction of `h` to `ℕ^k_degree`.
    pub fn tensor(&self, degree: u32) -> SymmetricTensor {
        SymmetricTensor::from_fn(self.k, degree, |a| self.value(a))
    }

    /// `I + z(h − I)` on every `α` with `|α| ≤ max_degree`, default
    /// `1 + z(default − 1)`.
    pub fn interpolate_from_ones(&self, z: Complex64, max_degree: u32) -> EdgeColoringModel {
        let shift = |v: Complex64| ONE + z * (v - ONE);
        let mut out = EdgeColoringModel {
            k: self.k,
            entries: BTreeMap::new(),
            default: shift(self.default),
        };
        for alpha in compositions_up_to(self.k, max_degree) {
            let v = shift(self.value(&alpha));
            out.entries.insert(alpha, v);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            k: self.k,
            default: self.default.into(),
            entries: self
                .entries
                .iter()
                .map(|(alpha, v)| ModelEntry {
                    alpha: alpha.clone(),
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| HolantError::Parse(e.to_string()))?;
        let mut model = EdgeColoringModel::new(file.k, file.default.into())
            .map_err(|e| HolantError::Parse(e.to_string()))?;
        for entry in file.entries {
            model
                .set(entry.alpha, Complex64::new(entry.re, entry.im))
                .map_err(|e| HolantError::Parse(e.to_string()))?;
        }
        Ok(model)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        EdgeColoringModel::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    k: usize,
    default: JsonComplex,
    entries: Vec<ModelEntry>,
}

#[derive(Serialize, Deserialize)]
struct ModelEntry {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

/// Built-in predicate models on two colors; color `0` plays the role of the
/// distinguished first color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKind {
    /// `h(α) = 1` iff `α₁ ≤ 1`: counts matchings.
    Matching,
    /// `h(α) = 1` iff `α₁ = d`: counts spanning `d`-regular subgraphs.
    DRegular(u32),
}

/// Tabulates a predicate model for `|α| ≤ max_degree`, default `0`.
pub fn model_from_predicate(
    kind: PredicateKind,
    k: usize,
    max_degree: u32,
) -> Result<EdgeColoringModel> {
    if k < 2 {
        return Err(HolantError::Precondition(format!(
            "predicate models need k >= 2, got {k}"
        )));
    }
    let pred = move |a: &[u32]| match kind {
        PredicateKind::Matching => a[0] <= 1,
        PredicateKind::DRegular(d) => a[0] == d,
    };
    EdgeColoringModel::from_fn(k, max_degree, ZERO, |a| if pred(a) { ONE } else { ZERO })
}

/// `h_x(α) = Π_j x_j^{α_j}`, tabulated for `|α| ≤ max_degree`.
pub fn rank_one_model(x: &[Complex64], max_degree: u32) -> Result<EdgeColoringModel> {
    EdgeColoringModel::from_fn(x.len(), max_degree, ZERO, |a| monomial(x, a))
}

fn monomial(x: &[Complex64], alpha: &[u32]) -> Complex64 {
    x.iter()
        .zip(alpha)
        .fold(ONE, |acc, (xi, &ai)| acc * xi.powu(ai))
}

/// `h(α) = 1 + r·e^{iφ(α)}` with independent uniform phases for
/// `|α| ≤ max_degree`, default `1`; the deviation from `I` is exactly `r`.
pub fn perturbed_ones(k: usize, max_degree: u32, r: f64, seed: u64) -> Result<EdgeColoringModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EdgeColoringModel::from_fn(k, max_degree, ONE, |_| {
        ONE + Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
    })
}

/// A symmetric tensor of order `degree` over `k` colors, i.e. a function
/// `ℕ^k_degree → ℂ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensor {
    space: CodeSpace,
    values: Vec<Complex64>,
}

impl SymmetricTensor {
    pub fn from_fn(k: usize, degree: u32, mut f: impl FnMut(&[u32]) -> Complex64) -> Self {
        let space = CodeSpace::new(k, degree);
        let mut values = vec![ZERO; space.size()];
        for alpha in compositions(k, degree) {
            values[space.code(&alpha)] = f(&alpha);
        }
        SymmetricTensor { space, values }
    }

    pub fn constant(k: usize, degree: u32, value: Complex64) -> Self {
        SymmetricTensor::from_fn(k, degree, |_| value)
    }

    pub fn k(&self) -> usize {
        self.space.k
    }

    pub fn degree(&self) -> u32 {
        self.space.degree
    }

    pub fn code_space(&self) -> CodeSpace {
        self.space
    }

    /// Values indexed by [`CodeSpace::code`]; slots that encode no valid
    /// multiset hold zero.
    pub fn dense(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, alpha: &[u32]) -> Complex64 {
        debug_assert_eq!(norm(alpha), self.space.degree);
        self.values[self.space.code(alpha)]
    }

    /// `(α, value)` pairs in lexicographic order of `α`.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<u32>, Complex64)> + '_ {
        compositions(self.space.k, self.space.degree)
            .into_iter()
            .map(move |a| {
                let v = self.get(&a);
                (a, v)
            })
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> SymmetricTensor {
        SymmetricTensor::from_fn(self.k(), self.degree(), |a| f(self.get(a)))
    }

    /// Membership in `S_d(δ, η)`: all pairwise differences below `delta` and
    /// all moduli at least `eta`.
    pub fn in_region(&self, delta: f64, eta: f64) -> bool {
        let vals: Vec<Complex64> = self.iter().map(|(_, v)| v).collect();
        vals.iter().all(|v| v.norm() >= eta)
            && vals
                .iter()
                .enumerate()
                .all(|(i, a)| vals[i + 1..].iter().all(|b| (a - b).norm() < delta))
    }
}

/// One symmetric tensor per vertex of an associated graph: an element of
/// `S_G`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorAssignment {
    k: usize,
    tensors: Vec<SymmetricTensor>,
}

impl TensorAssignment {
    pub fn new(k: usize, tensors: Vec<SymmetricTensor>) -> Result<Self> {
        if let Some(t) = tensors.iter().find(|t| t.k() != k) {
            return Err(HolantError::Precondition(format!(
                "tensor over {} colors in a {k}-color assignment",
                t.k()
            )));
        }
        Ok(TensorAssignment { k, tensors })
    }

    /// `h^v = h` restricted to `ℕ^k_{deg(v)}` for every vertex.
    pub fn from_model(g: &Multigraph, h: &EdgeColoringModel) -> TensorAssignment {
        let mut by_degree: HashMap<usize, SymmetricTensor> = HashMap::new();
        let tensors = g
            .degrees()
            .into_iter()
            .map(|d| {
                by_degree
                    .entry(d)
                    .or_insert_with(|| h.tensor(d as u32))
                    .clone()
            })
            .collect();
        TensorAssignment { k: h.k(), tensors }
    }

    pub fn constant(g: &Multigraph, k: usize, value: Complex64) -> TensorAssignment {
        let tensors = g
            .degrees()
            .into_iter()
            .map(|d| SymmetricTensor::constant(k, d as u32, value))
            .collect();
        TensorAssignment { k, tensors }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tensors(&self) -> &[SymmetricTensor] {
        &self.tensors
    }

    pub fn tensor(&self, v: usize) -> &SymmetricTensor {
        &self.tensors[v]
    }

    pub fn set_tensor(&mut self, v: usize, t: SymmetricTensor) {
        self.tensors[v] = t;
    }

    /// Checks that there is one tensor per vertex of `g` with matching order.
    pub fn check_against(&self, g: &Multigraph) -> Result<()> {
        if self.tensors.len() != g.n() {
            return Err(HolantError::Precondition(format!(
                "{} tensors for {} vertices",
                self.tensors.len(),
                g.n()
            )));
        }
        for (v, (t, d)) in self.tensors.iter().zip(g.degrees()).enumerate() {
            if t.degree() as usize != d {
                return Err(HolantError::DegreeMismatch {
                    vertex: v,
                    tensor_degree: t.degree() as usize,
                    graph_degree: d,
                });
            }
        }
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> TensorAssignment {
        TensorAssignment {
            k: self.k,
            tensors: self.tensors.iter().map(|t| t.map(&mut f)).collect(),
        }
    }
}

/// A vertex-coloring model `(a, B)` with nonzero vertex weights and a
/// symmetric edge-weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexModel {
    a: Vec<Complex64>,
    b: DMatrix<Complex64>,
}

impl VertexModel {
    pub fn new(a: Vec<Complex64>, b: DMatrix<Complex64>) -> Result<Self> {
        let n = a.len();
        if b.nrows() != n || b.ncols() != n {
            return Err(HolantError::Precondition(format!(
                "B is {}x{} but a has {n} entries",
                b.nrows(),
                b.ncols()
            )));
        }
        if a.contains(&ZERO) {
            return Err(HolantError::Precondition("vertex weights must be nonzero".into()));
        }
        if b != b.transpose() {
            return Err(HolantError::Precondition("B must be symmetric".into()));
        }
        Ok(VertexModel { a, b })
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<Complex64> {
        &self.b
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            a: Vec<JsonComplex>,
            #[serde(rename = "B")]
            b: Vec<Vec<JsonComplex>>,
        }
        let file: File = serde_json::from_str(text).map_err(|e| HolantError::Parse(e.to_string()))?;
        let n = file.a.len();
        if file.b.len() != n || file.b.iter().any(|row| row.len() != n) {
            return Err(HolantError::Parse("B must be square of the size of a".into()));
        }
        let b = DMatrix::from_fn(n, n, |i, j| file.b[i][j].into());
        VertexModel::new(file.a.into_iter().map(Into::into).collect(), b)
            .map_err(|e| HolantError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let n = self.a.len();
        let b: Vec<Vec<JsonComplex>> = (0..n)
            .map(|i| (0..n).map(|j| self.b[(i, j)].into()).collect())
            .collect();
        let a: Vec<JsonComplex> = self.a.iter().map(|&x| x.into()).collect();
        serde_json::json!({ "a": a, "B": b }).to_string()
    }
}

/// Finds `U` with `UᵀU = B` (plain transpose, no conjugation) for a complex
/// symmetric `B`.
///
/// Symmetric elimination by congruence with diagonal pivoting. When every
/// remaining diagonal entry is small against the largest off-diagonal entry
/// `B_ab`, row/column `b` is first added (with sign ±1) to row/column `a`,
/// which makes the new diagonal entry at least `|B_ab|` in modulus. The
/// result is `QᵀDQ = B` and `U = √D·Q` with principal square roots.
pub fn symmetric_decompose(b: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = b.nrows();
    if b.ncols() != n {
        return Err(HolantError::Precondition("matrix must be square".into()));
    }
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut s = b.clone();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    for i in 0..n {
        let (p, diag_max) = (i..n)
            .map(|p| (p, s[(p, p)].norm()))
            .fold((i, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let mut off = (i, i, 0.0);
        for a in i..n {
            for c in a + 1..n {
                let m = s[(a, c)].norm();
                if m > off.2 {
                    off = (a, c, m);
                }
            }
        }
        if diag_max <= tiny && off.2 <= tiny {
            break;
        }
        if diag_max >= 0.5 * off.2 {
            swap_congruence(&mut s, &mut q, i, p);
        } else {
            let (a, c, _) = off;
            swap_congruence(&mut s, &mut q, i, a);
            let c = if c == i { a } else { c };
            // column/row i += sign * column/row c
            let plus = s[(i, i)] + 2.0 * s[(i, c)] + s[(c, c)];
            let minus = s[(i, i)] - 2.0 * s[(i, c)] + s[(c, c)];
            let sign = if plus.norm() >= minus.norm() { 1.0 } else { -1.0 };
            for r in 0..n {
                let v = s[(r, c)] * sign;
                s[(r, i)] += v;
            }
            for r in 0..n {
                let v = s[(c, r)] * sign;
                s[(i, r)] += v;
            }
            for col in 0..n {
                let v = q[(i, col)] * sign;
                q[(c, col)] -= v;
            }
        }
        let pivot = s[(i, i)];
        if pivot.norm() <= tiny {
            return Err(HolantError::DecompositionFailed { pivot: i });
        }
        for j in i + 1..n {
            let l = s[(j, i)] / pivot;
            if l == ZERO {
                continue;
            }
            for r in 0..n {
                let v = s[(r, i)] * l;
                s[(r, j)] -= v;
            }
            for r in 0..n {
                let v = s[(i, r)] * l;
                s[(j, r)] -= v;
            }
            for col in 0..n {
                let v = q[(j, col)] * l;
                q[(i, col)] += v;
            }
        }
    }
    let mut u = q;
    for i in 0..n {
        let root = s[(i, i)].sqrt();
        for col in 0..n {
            u[(i, col)] *= root;
        }
    }
    let residual = (u.transpose() * &u - b)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if !(residual <= 1e-10 * scale.max(1.0)) {
        return Err(HolantError::DecompositionFailed { pivot: n });
    }
    Ok(u)
}

fn swap_congruence(s: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>, i: usize, p: usize) {
    if i != p {
        s.swap_rows(i, p);
        s.swap_columns(i, p);
        q.swap_rows(i, p);
    }
}

/// The edge-coloring model `h_{a,U}(α) = Σ_i a_i Π_j U_{j,i}^{α_j}`,
/// tabulated for `|α| ≤ max_degree`. The number of colors is the number of
/// rows of `U`. If `u` is `None` it is obtained from
/// [`symmetric_decompose`]; a supplied `U` is used as is.
pub fn vertex_to_edge(
    model: &VertexModel,
    u: Option<&DMatrix<Complex64>>,
    max_degree: u32,
) -> Result<EdgeColoringModel> {
    let owned;
    let u = match u {
        Some(u) => u,
        None => {
            owned = symmetric_decompose(model.b())?;
            &owned
        }
    };
    if u.ncols() != model.a().len() {
        return Err(HolantError::Precondition(format!(
            "U has {} columns for {} vertex colors",
            u.ncols(),
            model.a().len()
        )));
    }
    let k = u.nrows();
    let columns: Vec<Vec<Complex64>> = (0..u.ncols())
        .map(|i| u.column(i).iter().copied().collect())
        .collect();
    EdgeColoringModel::from_fn(k, max_degree, ZERO, |alpha| {
        model
            .a()
            .iter()
            .zip(&columns)
            .map(|(ai, col)| ai * monomial(col, alpha))
            .sum()
    })
}

/// Parameters `(δ, η, θ, β)` of the zero-free region `S_G(δ, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub delta: f64,
    pub eta: f64,
    pub theta: f64,
    pub beta: f64,
}

impl RegionParams {
    /// Validates `δ, η > 0`, `θ ∈ (0, 2π/3)` and `β ≤ ηθcos(θ/2)`.
    pub fn new(delta: f64, eta: f64, theta: f64, beta: f64) -> Result<Self> {
        if !(delta > 0.0 && eta > 0.0) {
            return Err(HolantError::Precondition("delta and eta must be positive".into()));
        }
        if !(theta > 0.0 && theta < 2.0 * PI / 3.0) {
            return Err(HolantError::Precondition(format!(
                "theta = {theta} is not in (0, 2pi/3)"
            )));
        }
        let cap = eta * theta * (theta / 2.0).cos();
        if beta > cap {
            return Err(HolantError::Precondition(format!(
                "beta = {beta} exceeds eta*theta*cos(theta/2) = {cap}"
            )));
        }
        Ok(RegionParams {
            delta,
            eta,
            theta,
            beta,
        })
    }

    /// Largest admissible `β = ηθcos(θ/2)` and `δ = min(η, β/(Δ+1))`.
    pub fn for_degree(eta: f64, theta: f64, max_degree: usize) -> Result<Self> {
        let beta = eta * theta * (theta / 2.0).cos();
        let delta = eta.min(beta / (max_degree as f64 + 1.0));
        RegionParams::new(delta, eta, theta, beta)
    }

    /// Whether `δ ≤ min(η, β/(Δ+1))` for a graph of maximum degree `Δ`.
    pub fn valid_for(&self, max_degree: usize) -> bool {
        self.delta <= self.eta.min(self.beta / (max_degree as f64 + 1.0))
    }
}

/// Coefficients `c_{αβ}(g)` of the orthogonal action on `ℕ^k_degree`:
/// row `i` expands `Π_j (Σ_l g_{jl} x_l)^{α_j}` for the `i`-th multiset `α`
/// over the monomials `x^β` listed in the same order.
pub fn orthogonal_action_matrix(g: &DMatrix<Complex64>, degree: u32) -> Vec<Vec<Complex64>> {
    let k = g.nrows();
    let space = CodeSpace::new(k, degree);
    let basis = compositions(k, degree);
    let index: HashMap<usize, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, b)| (space.code(b), i))
        .collect();
    basis
        .iter()
        .map(|alpha| {
            // homogeneous polynomial as map from exponent vector to coefficient
            let mut poly: BTreeMap<Vec<u32>, Complex64> = BTreeMap::from([(vec![0; k], ONE)]);
            for (j, &aj) in alpha.iter().enumerate() {
                for _ in 0..aj {
                    let mut next: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
                    for (mono, coef) in &poly {
                        for l in 0..k {
                            let c = g[(j, l)];
                            if c == ZERO {
                                continue;
                            }
                            let mut m = mono.clone();
                            m[l] += 1;
                            *next.entry(m).or_insert(ZERO) += coef * c;
                        }
                    }
                    poly = next;
                }
            }
            let mut row = vec![ZERO; basis.len()];
            for (mono, coef) in poly {
                row[index[&space.code(&mono)]] += coef;
            }
            row
        })
        .collect()
}

/// `(g·t)(α) = Σ_β c_{αβ}(g) t(β)`.
pub fn apply_orthogonal_tensor(g: &DMatrix<Complex64>, t: &SymmetricTensor) -> SymmetricTensor {
    let action = orthogonal_action_matrix(g, t.degree());
    apply_with(&action, t)
}

fn apply_with(action: &[Vec<Complex64>], t: &SymmetricTensor) -> SymmetricTensor {
    let values: Vec<Complex64> = t.iter().map(|(_, v)| v).collect();
    let basis = compositions(t.k(), t.degree());
    let image: HashMap<Vec<u32>, Complex64> = basis
        .into_iter()
        .zip(action)
        .map(|(alpha, row)| (alpha, row.iter().zip(&values).map(|(c, v)| c * v).sum()))
        .collect();
    SymmetricTensor::from_fn(t.k(), t.degree(), |a| image[a])
}

/// Applies `g` vertex by vertex.
pub fn apply_orthogonal_assignment(
    g: &DMatrix<Complex64>,
    h: &TensorAssignment,
) -> TensorAssignment {
    let mut cache: HashMap<u32, Vec<Vec<Complex64>>> = HashMap::new();
    let tensors = h
        .tensors()
        .iter()
        .map(|t| {
            let action = cache
                .entry(t.degree())
                .or_insert_with(|| orthogonal_action_matrix(g, t.degree()));
            apply_with(action, t)
        })
        .collect();
    TensorAssignment { k: h.k(), tensors }
}

/// Applies `g` to `h` on every degree `≤ max_degree`. The image is only
/// tabulated up to that degree and has default `0`.
pub fn apply_orthogonal_model(
    g: &DMatrix<Complex64>,
    h: &EdgeColoringModel,
    max_degree: u32,
) -> EdgeColoringModel {
    let mut out = EdgeColoringModel {
        k: h.k(),
        entries: BTreeMap::new(),
        default: ZERO,
    };
    for d in 0..=max_degree {
        let image = apply_orthogonal_tensor(g, &h.tensor(d));
        for (alpha, v) in image.iter() {
            out.entries.insert(alpha, v);
        }
    }
    out
}

/// `exp(A)` for a square complex matrix by scaling and squaring of the
/// Taylor series.
pub fn matrix_exp(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * Complex64::new(scale, 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for j in 1..=20 {
        term = &term * &x * Complex64::new(1.0 / j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// A random element of `O_k(ℂ)`: `exp(A)` for an antisymmetric `A` whose
/// entries are drawn uniformly with modulus at most 1.
pub fn random_orthogonal(k: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::<Complex64>::zeros(k, k);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..k {
        for j in i + 1..k {
            let z = Complex64::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
            a[(i, j)] = z;
            a[(j, i)] = -z;
        }
    }
    matrix_exp(&a)
}

/// `max |gᵀg − I|`.
pub fn orthogonality_residual(g: &DMatrix<Complex64>) -> f64 {
    let n = g.nrows();
    (g.transpose() * g - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}
