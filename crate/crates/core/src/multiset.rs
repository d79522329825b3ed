//! Color multisets `α ∈ ℕ^k` and their dense encodings.

/// All `α ∈ ℕ^k` with `|α| = degree`, in ascending lexicographic order.
pub fn compositions(k: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if k == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; k];
    fill(&mut cur, 0, degree, &mut out);
    out
}

fn fill(cur: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.to_vec());
        return;
    }
    for a in 0..=remaining {
        cur[pos] = a;
        fill(cur, pos + 1, remaining - a, out);
    }
}

/// All `α ∈ ℕ^k` with `|α| ≤ max_degree`, grouped by degree.
pub fn compositions_up_to(k: usize, max_degree: u32) -> Vec<Vec<u32>> {
    (0..=max_degree).flat_map(|d| compositions(k, d)).collect()
}

pub fn norm(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

/// Number of colorings of `|α|` distinguishable slots that produce the
/// multiset `α`.
pub fn multinomial(alpha: &[u32]) -> f64 {
    let mut total = 0u32;
    let mut acc = 1.0f64;
    for &a in alpha {
        for i in 1..=a {
            total += 1;
            acc *= total as f64 / i as f64;
        }
    }
    acc
}

pub fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    let mut acc = 1.0f64;
    for i in 0..r {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Mixed-radix encoding of `α ∈ ℕ^k_d`: the first `k-1` counts in base
/// `d+1`; the last count is implied by `|α| = d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSpace {
    pub k: usize,
    pub degree: u32,
}

impl CodeSpace {
    pub fn new(k: usize, degree: u32) -> Self {
        CodeSpace { k, degree }
    }

    pub fn size(&self) -> usize {
        (self.degree as usize + 1).pow(self.k.saturating_sub(1) as u32)
    }

    /// Code increment contributed by one incidence of color `c`.
    pub fn stride(&self, c: usize) -> usize {
        if c + 1 >= self.k {
            0
        } else {
            (self.degree as usize + 1).pow(c as u32)
        }
    }

    pub fn code(&self, alpha: &[u32]) -> usize {
        debug_assert_eq!(alpha.len(), self.k);
        (0..self.k).map(|c| alpha[c] as usize * self.stride(c)).sum()
    }
}
