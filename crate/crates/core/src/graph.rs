//! Multigraphs with loops and parallel edges.
//!
//! Degrees follow the convention that a loop contributes 2 to the degree of
//! its vertex and contributes its color twice to the vertex's color
//! multiset. This is the convention under which a vertex of degree `d`
//! carries a symmetric tensor of order `d`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HolantError, Result};

/// A finite multigraph on vertices `0..n`. Edges are stored as `(u, v)` with
/// `u <= v`; `u == v` is a loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(HolantError::VertexOutOfRange { vertex: w, n });
                }
            }
            out.push((u.min(v), u.max(v)));
        }
        Ok(Multigraph { n, edges: out })
    }

    pub fn empty(n: usize) -> Self {
        Multigraph { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(HolantError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self
            .edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::new();
        self.edges.iter().all(|&(u, v)| u != v && seen.insert((u, v)))
    }

    /// Distinct neighbours of each vertex, loops excluded, sorted ascending.
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Indices of the edges incident with `v`, once per edge (a loop is
    /// listed once).
    pub fn incident_edges(&self, v: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(i, _)| i)
            .collect())
    }

    /// The color multiset `φ(δ(v)) ∈ ℕ^k` seen by `v` under an edge coloring
    /// with colors in `0..k`.
    pub fn incident_multiset(&self, v: usize, coloring: &[usize], k: usize) -> Result<Vec<u32>> {
        self.check_vertex(v)?;
        if coloring.len() != self.edges.len() {
            return Err(HolantError::Precondition(format!(
                "coloring has {} entries for {} edges",
                coloring.len(),
                self.edges.len()
            )));
        }
        let mut alpha = vec![0u32; k];
        for (&(a, b), &c) in self.edges.iter().zip(coloring) {
            if c >= k {
                return Err(HolantError::Precondition(format!("color {c} not in 0..{k}")));
            }
            alpha[c] += (a == v) as u32 + (b == v) as u32;
        }
        Ok(alpha)
    }

    fn vertex_mask(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &v in set {
            self.check_vertex(v)?;
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Indices of the edges with at least one endpoint in `set`.
    pub fn edges_touching(&self, set: &[usize]) -> Result<Vec<usize>> {
        let mask = self.vertex_mask(set)?;
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| mask[u] || mask[v])
            .map(|(i, _)| i)
            .collect())
    }

    /// The subgraph induced by `set`. Vertices are relabelled `0..|set|` in
    /// ascending order of their original index; loops and parallel edges
    /// between kept vertices are preserved.
    pub fn induced_subgraph(&self, set: &[usize]) -> Result<Multigraph> {
        let mask = self.vertex_mask(set)?;
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if mask[v] {
                label[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| mask[u] && mask[v])
            .map(|&(u, v)| (label[u], label[v]))
            .collect();
        Ok(Multigraph { n: next, edges })
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Multigraph) -> Multigraph {
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + self.n, v + self.n)));
        Multigraph {
            n: self.n + other.n,
            edges,
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.neighbours();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Parses the edge-list format: a header line `n m` followed by `m`
    /// lines `u v` (0-indexed). Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Multigraph> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| HolantError::Parse("empty edge list".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(HolantError::Parse(format!(
                "header declares {m} edges, found {}",
                edges.len()
            )));
        }
        Multigraph::new(n, edges).map_err(|e| HolantError::Parse(e.to_string()))
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Multigraph> {
        Multigraph::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl fmt::Display for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multigraph(n={}, edges={:?})", self.n, self.edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| HolantError::Parse(format!("{t:?}: {e}")))
    });
    let a = it.next().ok_or_else(|| HolantError::Parse(format!("short line {line:?}")))??;
    let b = it.next().ok_or_else(|| HolantError::Parse(format!("short line {line:?}")))??;
    if it.next().is_some() {
        return Err(HolantError::Parse(format!("trailing tokens in {line:?}")));
    }
    Ok((a, b))
}

/// Largest pattern accepted by [`count_induced`].
pub const MAX_PATTERN_VERTICES: usize = 8;

/// Number of vertex subsets `U` of `g` with `g[U]` isomorphic to the simple
/// pattern `h`. Brute force over `|V(h)|`-subsets, with isomorphism decided
/// against every relabelling of `h`.
pub fn count_induced(g: &Multigraph, h: &Multigraph) -> Result<u64> {
    let t = h.n();
    if t > MAX_PATTERN_VERTICES {
        return Err(HolantError::Precondition(format!(
            "pattern has {t} vertices; at most {MAX_PATTERN_VERTICES} supported"
        )));
    }
    if !h.is_simple() {
        return Err(HolantError::Precondition("pattern must be simple".into()));
    }
    if t > g.n() {
        return Ok(0);
    }
    // Adjacency of g as a multiplicity matrix so loops and parallel edges
    // are seen (and rejected) by the comparison.
    let mut mult = vec![vec![0u32; g.n()]; g.n()];
    for &(u, v) in g.edges() {
        mult[u][v] += 1;
        if u != v {
            mult[v][u] += 1;
        }
    }
    let pair_bit = |i: usize, j: usize| -> usize {
        let (a, b) = (i.min(j), i.max(j));
        b * (b - 1) / 2 + a
    };
    let mut images = HashSet::new();
    let mut perm: Vec<usize> = (0..t).collect();
    loop {
        let mut mask = 0u64;
        for &(u, v) in h.edges() {
            mask |= 1 << pair_bit(perm[u], perm[v]);
        }
        images.insert(mask);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut count = 0u64;
    let mut subset: Vec<usize> = (0..t).collect();
    loop {
        let mut mask = 0u64;
        let mut ok = true;
        'outer: for i in 0..t {
            if mult[subset[i]][subset[i]] > 0 {
                ok = false;
                break;
            }
            for j in 0..i {
                match mult[subset[i]][subset[j]] {
                    0 => {}
                    1 => mask |= 1 << pair_bit(i, j),
                    _ => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok && images.contains(&mask) {
            count += 1;
        }
        if !next_combination(&mut subset, g.n()) {
            break;
        }
    }
    Ok(count)
}

/// Advances `perm` to the next lexicographic permutation.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Advances a sorted `r`-subset of `0..n` to the next one in lexicographic
/// order.
pub(crate) fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] < n - r + i {
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Graph families used by the experiments. All generated graphs are simple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphFamilySpec {
    Cycle { n: usize },
    Path { n: usize },
    Torus2d { rows: usize, cols: usize },
    RandomRegular { n: usize, d: usize, seed: u64 },
    Complete { n: usize },
}

impl GraphFamilySpec {
    /// The degree bound `Δ` the family guarantees.
    pub fn declared_max_degree(&self) -> usize {
        match *self {
            GraphFamilySpec::Cycle { .. } => 2,
            GraphFamilySpec::Path { n } => {
                if n >= 3 {
                    2
                } else {
                    n.saturating_sub(1)
                }
            }
            GraphFamilySpec::Torus2d { .. } => 4,
            GraphFamilySpec::RandomRegular { d, .. } => d,
            GraphFamilySpec::Complete { n } => n.saturating_sub(1),
        }
    }

    /// Same family with its size parameter replaced by `size` (the side
    /// length for tori).
    pub fn with_size(&self, size: usize) -> GraphFamilySpec {
        match *self {
            GraphFamilySpec::Cycle { .. } => GraphFamilySpec::Cycle { n: size },
            GraphFamilySpec::Path { .. } => GraphFamilySpec::Path { n: size },
            GraphFamilySpec::Torus2d { .. } => GraphFamilySpec::Torus2d {
                rows: size,
                cols: size,
            },
            GraphFamilySpec::RandomRegular { d, seed, .. } => {
                GraphFamilySpec::RandomRegular { n: size, d, seed }
            }
            GraphFamilySpec::Complete { .. } => GraphFamilySpec::Complete { n: size },
        }
    }

    pub fn label(&self) -> String {
        match *self {
            GraphFamilySpec::Cycle { n } => format!("cycle:{n}"),
            GraphFamilySpec::Path { n } => format!("path:{n}"),
            GraphFamilySpec::Torus2d { rows, cols } => format!("torus:{rows}x{cols}"),
            GraphFamilySpec::RandomRegular { n, d, seed } => {
                format!("random-regular:{n}:{d}:{seed}")
            }
            GraphFamilySpec::Complete { n } => format!("complete:{n}"),
        }
    }
}

/// Parses the [`GraphFamilySpec::label`] syntax: `cycle:<n>`, `path:<n>`,
/// `torus:<rows>x<cols>`, `random-regular:<n>:<d>:<seed>`, `complete:<n>`.
impl std::str::FromStr for GraphFamilySpec {
    type Err = HolantError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || HolantError::Parse(format!("unrecognised graph family '{s}'"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (tag, rest) = s.split_once(':').ok_or_else(bad)?;
        let fields: Vec<&str> = rest.split(':').collect();
        match (tag, fields.as_slice()) {
            ("cycle", [n]) => Ok(GraphFamilySpec::Cycle { n: num(n)? }),
            ("path", [n]) => Ok(GraphFamilySpec::Path { n: num(n)? }),
            ("complete", [n]) => Ok(GraphFamilySpec::Complete { n: num(n)? }),
            ("torus", [dims]) => {
                let (r, c) = dims.split_once('x').ok_or_else(bad)?;
                Ok(GraphFamilySpec::Torus2d {
                    rows: num(r)?,
                    cols: num(c)?,
                })
            }
            ("random-regular", [n, d, seed]) => Ok(GraphFamilySpec::RandomRegular {
                n: num(n)?,
                d: num(d)?,
                seed: seed.trim().parse::<u64>().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

const PAIRING_ATTEMPTS: usize = 100_000;

/// Builds the graph described by `spec`. Deterministic in `(spec, seed)`.
pub fn generate(spec: &GraphFamilySpec) -> Result<Multigraph> {
    match *spec {
        GraphFamilySpec::Cycle { n } => {
            if n < 3 {
                return Err(HolantError::Precondition(format!(
                    "cycle needs at least 3 vertices, got {n}"
                )));
            }
            Multigraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        GraphFamilySpec::Path { n } => {
            if n == 0 {
                return Err(HolantError::Precondition("path needs at least 1 vertex".into()));
            }
            Multigraph::new(n, (1..n).map(|i| (i - 1, i)))
        }
        GraphFamilySpec::Torus2d { rows, cols } => {
            if rows < 3 || cols < 3 {
                return Err(HolantError::Precondition(format!(
                    "torus sides must be at least 3, got {rows}x{cols}"
                )));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::with_capacity(2 * rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    edges.push((id(r, c), id(r, (c + 1) % cols)));
                    edges.push((id(r, c), id((r + 1) % rows, c)));
                }
            }
            Multigraph::new(rows * cols, edges)
        }
        GraphFamilySpec::Complete { n } => {
            if n == 0 {
                return Err(HolantError::Precondition("complete graph needs a vertex".into()));
            }
            Multigraph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
        }
        GraphFamilySpec::RandomRegular { n, d, seed } => random_regular(n, d, seed),
    }
}

/// Pairing-model random `d`-regular graph; pairings with loops or repeated
/// edges are rejected and redrawn.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<Multigraph> {
    if (n * d) % 2 == 1 {
        return Err(HolantError::Precondition(format!(
            "n*d must be even for a {d}-regular graph on {n} vertices"
        )));
    }
    if d > 0 && d >= n {
        return Err(HolantError::Precondition(format!(
            "degree {d} too large for {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d.max(1)).collect();
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        points.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Multigraph::new(n, edges);
    }
    Err(HolantError::Precondition(format!(
        "pairing model found no simple {d}-regular graph on {n} vertices"
    )))
}

/// Largest vertex count accepted by [`simple_graphs_up_to_isomorphism`].
pub const MAX_ENUMERATED_VERTICES: usize = 8;

/// One representative of every isomorphism class of simple graphs on `n`
/// vertices, in canonical form, sorted by edge count and then by canonical
/// adjacency code.
///
/// Classes on `n` vertices are obtained by attaching a new vertex to every
/// neighbourhood in every class on `n − 1` vertices and keeping the distinct
/// canonical forms.
pub fn simple_graphs_up_to_isomorphism(n: usize) -> Result<Vec<Multigraph>> {
    if n > MAX_ENUMERATED_VERTICES {
        return Err(HolantError::Precondition(format!(
            "graph enumeration supports at most {MAX_ENUMERATED_VERTICES} vertices, got {n}"
        )));
    }
    let mut classes: Vec<u64> = vec![0];
    for size in 1..n {
        let mut next = HashSet::new();
        for &code in &classes {
            for nbhd in 0u64..(1 << size) {
                let mut extended = code;
                for u in 0..size {
                    if nbhd >> u & 1 == 1 {
                        extended |= 1 << pair_index(u, size);
                    }
                }
                next.insert(canonical_code(extended, size + 1));
            }
        }
        classes = next.into_iter().collect();
    }
    if n == 0 {
        return Ok(vec![Multigraph::empty(0)]);
    }
    let mut graphs: Vec<(u32, u64)> = classes.into_iter().map(|c| (c.count_ones(), c)).collect();
    graphs.sort_unstable();
    Ok(graphs.into_iter().map(|(_, c)| from_code(c, n)).collect())
}

/// Bit index of the pair `{a, b}`, `a ≠ b`, in an adjacency code.
fn pair_index(a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    b * (b - 1) / 2 + a
}

fn from_code(code: u64, n: usize) -> Multigraph {
    let mut edges = Vec::new();
    for b in 1..n {
        for a in 0..b {
            if code >> pair_index(a, b) & 1 == 1 {
                edges.push((a, b));
            }
        }
    }
    Multigraph { n, edges }
}

/// Smallest adjacency code over all relabellings that list vertices in
/// ascending order of degree.
fn canonical_code(code: u64, n: usize) -> u64 {
    let adjacent = |a: usize, b: usize| a != b && code >> pair_index(a, b) & 1 == 1;
    let degree: Vec<usize> = (0..n).map(|v| (0..n).filter(|&u| adjacent(u, v)).count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| degree[v]);
    // runs of equal degree are permuted independently
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || degree[order[i]] != degree[order[start]] {
            runs.push((start, i));
            start = i;
        }
    }
    let mut best = u64::MAX;
    let mut perm = order.clone();
    loop {
        // perm[i] is the original vertex placed at position i
        let mut c = 0u64;
        for b in 1..n {
            for a in 0..b {
                if adjacent(perm[a], perm[b]) {
                    c |= 1 << pair_index(a, b);
                }
            }
        }
        best = best.min(c);
        // advance the run-wise permutation odometer
        let mut advanced = false;
        for &(s, e) in runs.iter().rev() {
            if next_permutation(&mut perm[s..e]) {
                advanced = true;
                break;
            }
            perm[s..e].sort_unstable();
        }
        if !advanced {
            return best;
        }
    }
}
