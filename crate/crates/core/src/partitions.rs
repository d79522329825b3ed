//! Set-partition enumeration.
//!
//! Two independent generators: restricted-growth strings over all
//! partitions of `{0, …, n−1}` with a block-count filter, and a direct
//! recursive generator for partitions of an arbitrary set into exactly `b`
//! blocks of a minimum size.

/// Calls `f` on every restricted-growth string of length `n`, i.e. every
/// `a` with `a[0] = 0` and `a[i] ≤ 1 + max(a[..i])`, in lexicographic
/// order. Element `i` lies in block `a[i]`.
pub fn for_each_rgs(n: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 {
        f(&[]);
        return;
    }
    let mut a = vec![0usize; n];
    // prefix maxima: m[i] = max(a[..i]) for i ≥ 1
    let mut m = vec![0usize; n];
    loop {
        f(&a);
        // rightmost position that can still be incremented
        let mut i = n - 1;
        while i > 0 && a[i] > m[i] {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        a[i] += 1;
        let top = m[i].max(a[i]);
        for j in i + 1..n {
            a[j] = 0;
            m[j] = top;
        }
    }
}

/// Partitions of `{0, …, n−1}` into exactly `blocks` nonempty blocks, as
/// lists of blocks with ascending elements, via [`for_each_rgs`].
pub fn partitions_by_rgs(n: usize, blocks: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_rgs(n, |a| {
        let count = a.iter().max().map_or(0, |m| m + 1);
        if count == blocks {
            let mut parts = vec![Vec::new(); blocks];
            for (i, &b) in a.iter().enumerate() {
                parts[b].push(i);
            }
            out.push(parts);
        }
    });
    out
}

/// Calls `f` on every partition of `set` into exactly `blocks` blocks, each
/// of size at least `min_size`. Blocks are ordered by their first element
/// and keep the order of `set`.
pub fn for_each_partition(
    set: &[usize],
    blocks: usize,
    min_size: usize,
    mut f: impl FnMut(&[Vec<usize>]),
) {
    if set.is_empty() {
        if blocks == 0 {
            f(&[]);
        }
        return;
    }
    if blocks == 0 || blocks * min_size.max(1) > set.len() {
        return;
    }
    let mut parts: Vec<Vec<usize>> = Vec::with_capacity(blocks);
    place(set, 0, blocks, min_size.max(1), &mut parts, &mut f);
}

fn place(
    set: &[usize],
    i: usize,
    blocks: usize,
    min_size: usize,
    parts: &mut Vec<Vec<usize>>,
    f: &mut impl FnMut(&[Vec<usize>]),
) {
    let remaining = set.len() - i;
    let open = parts.len();
    let deficit: usize = parts.iter().map(|p| min_size.saturating_sub(p.len())).sum();
    // elements still needed: fill open blocks, then min_size for each unopened block
    if deficit + (blocks - open) * min_size > remaining {
        return;
    }
    if i == set.len() {
        if open == blocks {
            f(parts);
        }
        return;
    }
    let x = set[i];
    for j in 0..open {
        parts[j].push(x);
        place(set, i + 1, blocks, min_size, parts, f);
        parts[j].pop();
    }
    if open < blocks {
        parts.push(vec![x]);
        place(set, i + 1, blocks, min_size, parts, f);
        parts.pop();
    }
}

/// Stirling number of the second kind `S(n, k)`.
pub fn stirling2(n: usize, k: usize) -> u64 {
    let mut row = vec![0u64; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = j as u64 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}
