//! Exact min-plus convolution over the XOR group `(Z/2)^k`.
//!
//! `h(m) = min_x f(x) + g(m ⊕ x)` is computed from level sets: `h(m) ≤ s`
//! iff some `a + b = s` has a nonzero count `#{x : f(x) ≤ a, g(m⊕x) ≤ b}`,
//! and those counts are ordinary XOR convolutions, done with Walsh-Hadamard
//! transforms in exact integer arithmetic.

use crate::error::{Error, Result};

/// In-place unnormalized Walsh-Hadamard transform.
pub fn walsh_hadamard(v: &mut [i64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for k in block..block + h {
                let (a, b) = (v[k], v[k + h]);
                v[k] = a + b;
                v[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

fn level_transforms(f: &[u8], max: u8) -> Vec<Vec<i64>> {
    (0..=max)
        .map(|a| {
            let mut v: Vec<i64> = f.iter().map(|&x| (x <= a) as i64).collect();
            walsh_hadamard(&mut v);
            v
        })
        .collect()
}

/// `h(m) = min_x f(x) + g(m ⊕ x)` for tables of length `2^k`.
pub fn xor_min_plus(f: &[u8], g: &[u8]) -> Result<Vec<u8>> {
    let n = f.len();
    if n != g.len() || !n.is_power_of_two() {
        return Err(Error::Dimension(format!("tables of length {n} and {}", g.len())));
    }
    let (fmax, gmax) = (*f.iter().max().unwrap_or(&0), *g.iter().max().unwrap_or(&0));
    let ft = level_transforms(f, fmax);
    let gt = level_transforms(g, gmax);
    let mut h = vec![u8::MAX; n];
    let mut open = n;
    let mut buf = vec![0i64; n];
    for s in 0..=(fmax as usize + gmax as usize) {
        if open == 0 {
            break;
        }
        for a in 0..=(fmax as usize).min(s) {
            let b = s - a;
            if b > gmax as usize {
                continue;
            }
            for (o, (x, y)) in buf.iter_mut().zip(ft[a].iter().zip(&gt[b])) {
                *o = x * y;
            }
            walsh_hadamard(&mut buf);
            for (m, &c) in buf.iter().enumerate() {
                // c is n times the count.
                if c > 0 && h[m] == u8::MAX {
                    h[m] = s as u8;
                    open -= 1;
                }
            }
        }
    }
    Ok(h)
}

/// Direct evaluation of one entry of the convolution, with the first
/// minimizing `x`.
pub fn xor_min_plus_at(f: &[u8], g: &[u8], m: usize) -> (u8, usize) {
    let mut best = (u8::MAX, 0);
    for x in 0..f.len() {
        let v = f[x] + g[m ^ x];
        if v < best.0 {
            best = (v, x);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_direct_evaluation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for k in [1usize, 3, 6, 9] {
            let n = 1 << k;
            let f: Vec<u8> = (0..n).map(|_| rng.gen_range(0..5)).collect();
            let g: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let h = xor_min_plus(&f, &g).unwrap();
            for m in 0..n {
                assert_eq!(h[m], xor_min_plus_at(&f, &g, m).0);
            }
        }
    }

    #[test]
    fn transform_is_self_inverse_up_to_scale() {
        let mut v: Vec<i64> = (0..16).map(|x| x * x - 7).collect();
        let orig = v.clone();
        walsh_hadamard(&mut v);
        walsh_hadamard(&mut v);
        assert!(v.iter().zip(&orig).all(|(a, b)| *a == 16 * b));
    }
}
