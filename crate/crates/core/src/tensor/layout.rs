//! Index bookkeeping for packed symmetric storage.
//!
//! Canonical classes of order `k` over `n` symbols are the nondecreasing
//! sequences `i_1 <= ... <= i_k` (0-based). They are ranked in colexicographic
//! order through the bijection `i_j + j` onto strictly increasing sequences,
//! so `rank = sum_j C(i_j + j, j + 1)`.

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Number of canonical classes of order `k` in dimension `n`.
pub(crate) fn class_count(n: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    binomial(n + k - 1, k)
}

/// Colex rank of a sorted (nondecreasing) 0-based multi-index.
pub(crate) fn rank(sorted: &[usize]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(j, &i)| binomial(i + j, j + 1))
        .sum()
}

/// Number of distinct permutations of a multi-index: `m! / prod(count_i!)`.
pub(crate) fn multiplicity(sorted: &[usize]) -> f64 {
    let mut denom = 1.0;
    let mut run = 1;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    if !sorted.is_empty() {
        denom *= factorial(run);
    }
    factorial(sorted.len()) / denom
}

/// Per-(order, dim) tables shared by every tensor of that shape.
#[derive(Debug)]
pub(crate) struct Layout {
    pub order: usize,
    pub dim: usize,
    /// `classes[k]` holds every order-`k` class, flattened with stride `k`, in rank order.
    classes: Vec<Vec<usize>>,
    /// `insert[k][r * dim + i]` is the order-`k` rank of `sort(class_{k-1}(r) + [i])`.
    insert: Vec<Vec<usize>>,
    /// Permutation multiplicity of every top-order class.
    pub multiplicities: Vec<f64>,
}

impl Layout {
    pub fn new(order: usize, dim: usize) -> Self {
        let mut classes = Vec::with_capacity(order + 1);
        for k in 0..=order {
            classes.push(enumerate_classes(dim, k));
        }

        let mut insert = vec![Vec::new()];
        let mut scratch = Vec::with_capacity(order);
        for k in 1..=order {
            let lower = &classes[k - 1];
            let count = class_count(dim, k - 1);
            let mut table = Vec::with_capacity(count * dim);
            for r in 0..count {
                let base = &lower[r * (k - 1)..(r + 1) * (k - 1)];
                for i in 0..dim {
                    scratch.clear();
                    scratch.extend_from_slice(base);
                    let pos = scratch.partition_point(|&v| v <= i);
                    scratch.insert(pos, i);
                    table.push(rank(&scratch));
                }
            }
            insert.push(table);
        }

        let top = &classes[order];
        let multiplicities = (0..class_count(dim, order))
            .map(|r| multiplicity(&top[r * order..(r + 1) * order]))
            .collect();

        Layout {
            order,
            dim,
            classes,
            insert,
            multiplicities,
        }
    }

    pub fn count(&self, k: usize) -> usize {
        class_count(self.dim, k)
    }

    /// The `r`-th class of order `k`.
    pub fn class(&self, k: usize, r: usize) -> &[usize] {
        &self.classes[k][r * k..(r + 1) * k]
    }

    /// Contract one vector into an order-`k` packed symmetric tensor, giving
    /// the packed order-`(k-1)` tensor `T x`.
    pub fn contract(&self, data: &[f64], k: usize, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let table = &self.insert[k];
        (0..self.count(k - 1))
            .map(|r| {
                let row = &table[r * n..(r + 1) * n];
                row.iter().zip(x).map(|(&idx, &xi)| data[idx] * xi).sum()
            })
            .collect()
    }
}

fn enumerate_classes(dim: usize, k: usize) -> Vec<usize> {
    let count = class_count(dim, k);
    let mut out = vec![0usize; count * k];
    if k == 0 {
        return out;
    }
    let mut cur = vec![0usize; k];
    loop {
        let r = rank(&cur);
        out[r * k..(r + 1) * k].copy_from_slice(&cur);
        // advance to the next nondecreasing sequence in lexicographic order
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if cur[j] + 1 < dim {
                let v = cur[j] + 1;
                for slot in cur.iter_mut().skip(j) {
                    *slot = v;
                }
                break;
            }
        }
    }
}
