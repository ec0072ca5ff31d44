//! Exhaustive minimization over additive splits of a residue vector.
//!
//! A target `T ∈ F_p^L` is written as `X_0 + … + X_{k-1}`; the first `k-1`
//! parts are free and the last is `T - Σ`. Each part has a cost
//! `rank(view_i(X_i))`, where a view gathers the vector into a matrix. The
//! split with the smallest total wins, ties going to the smallest index
//! when the free entries are read as little-endian base-`p` digits.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::fieldlinalg::rank::{rank_gf2_rows, rank_modp_in_place};

/// A matrix view of a part: entry `(r, c)` is `x[src[r * cols + c]]`.
#[derive(Clone, Debug)]
pub(crate) struct View {
    pub rows: usize,
    pub cols: usize,
    pub src: Vec<usize>,
}

/// Rank of small residue matrices with reusable scratch space.
pub(crate) struct SmallRank {
    p: u64,
    buf: Vec<u64>,
}

impl SmallRank {
    pub(crate) fn new(p: u64) -> Self {
        SmallRank { p, buf: Vec::new() }
    }

    pub(crate) fn rank(&mut self, x: &[u64], view: &View) -> usize {
        let (rows, cols) = (view.rows, view.cols);
        if self.p == 2 && cols <= 64 {
            self.buf.resize(rows, 0);
            for r in 0..rows {
                let mut bits = 0u64;
                for c in 0..cols {
                    bits |= (x[view.src[r * cols + c]] & 1) << c;
                }
                self.buf[r] = bits;
            }
            return rank_gf2_rows(&mut self.buf[..rows]);
        }
        self.buf.clear();
        self.buf.extend(view.src.iter().map(|&s| x[s]));
        rank_modp_in_place(&mut self.buf, rows, cols, self.p)
    }
}

pub(crate) struct SplitProblem {
    pub p: u64,
    pub target: Vec<u64>,
    pub views: Vec<View>,
}

fn decode(mut t: u64, p: u64, digits: &mut [u64]) {
    for d in digits.iter_mut() {
        *d = t % p;
        t /= p;
    }
}

fn increment(digits: &mut [u64], p: u64) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < p {
            return;
        }
        *d = 0;
    }
}

impl SplitProblem {
    fn free(&self) -> usize {
        self.views.len() - 1
    }

    fn len(&self) -> usize {
        self.target.len()
    }

    /// `p^{(k-1)·L}`, saturating.
    pub(crate) fn size(&self) -> u128 {
        (0..self.free() * self.len()).fold(1u128, |acc, _| acc.saturating_mul(self.p as u128))
    }

    fn value(&self, digits: &[u64], last: &mut [u64], ranker: &mut SmallRank, cutoff: usize) -> usize {
        let (p, e) = (self.p, self.len());
        last.copy_from_slice(&self.target);
        let mut total = 0;
        for i in 0..self.free() {
            let part = &digits[i * e..(i + 1) * e];
            for (l, &x) in last.iter_mut().zip(part) {
                *l = (*l + p - x) % p;
            }
            total += ranker.rank(part, &self.views[i]);
            if total >= cutoff {
                return total;
            }
        }
        total + ranker.rank(last, &self.views[self.free()])
    }

    /// `(minimum, first index attaining it)`. `lower` is a known lower
    /// bound; reaching it ends the search. The caller checks the budget.
    pub(crate) fn minimize(&self, lower: usize) -> (usize, u64) {
        let total = u64::try_from(self.size()).expect("size checked against budget");
        if self.free() == 0 {
            let mut ranker = SmallRank::new(self.p);
            return (ranker.rank(&self.target, &self.views[0]), 0);
        }
        let shards = total.clamp(1, 256);
        let shard_len = total.div_ceil(shards);
        let found_at_lower = AtomicU64::new(u64::MAX);
        (0..shards)
            .into_par_iter()
            .map(|s| {
                let start = s * shard_len;
                let end = (start + shard_len).min(total);
                let mut best = (usize::MAX, u64::MAX);
                if start >= end || start > found_at_lower.load(Ordering::Relaxed) {
                    return best;
                }
                let mut digits = vec![0u64; self.free() * self.len()];
                let mut last = vec![0u64; self.len()];
                let mut ranker = SmallRank::new(self.p);
                decode(start, self.p, &mut digits);
                for t in start..end {
                    let v = self.value(&digits, &mut last, &mut ranker, best.0);
                    if v < best.0 {
                        best = (v, t);
                        if v <= lower {
                            found_at_lower.fetch_min(t, Ordering::Relaxed);
                            break;
                        }
                    }
                    if t & 0xfff == 0 && t > found_at_lower.load(Ordering::Relaxed) {
                        break;
                    }
                    increment(&mut digits, self.p);
                }
                best
            })
            .reduce(|| (usize::MAX, u64::MAX), |a, b| a.min(b))
    }

    /// The parts of the split with the given index.
    pub(crate) fn parts(&self, index: u64) -> Vec<Vec<u64>> {
        let (p, e) = (self.p, self.len());
        let mut digits = vec![0u64; self.free() * e];
        decode(index, p, &mut digits);
        let mut last = self.target.clone();
        let mut out: Vec<Vec<u64>> = digits.chunks(e.max(1)).take(self.free()).map(<[u64]>::to_vec).collect();
        for part in &out {
            for (l, &x) in last.iter_mut().zip(part) {
                *l = (*l + p - x) % p;
            }
        }
        out.push(last);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_reassemble_and_minimize() {
        // 2x2 matrices over GF(3): rank(X) + rank(Xᵀ-view) with identity target.
        let id = View { rows: 2, cols: 2, src: vec![0, 1, 2, 3] };
        let problem = SplitProblem { p: 3, target: vec![1, 0, 0, 1], views: vec![id.clone(), id] };
        let (v, t) = problem.minimize(1);
        assert_eq!(v, 2);
        let parts = problem.parts(t);
        for k in 0..4 {
            assert_eq!((parts[0][k] + parts[1][k]) % 3, problem.target[k]);
        }
        assert_eq!(problem.size(), 81);
    }
}
