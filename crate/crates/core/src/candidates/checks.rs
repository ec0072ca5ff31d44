//! Rank checks on `W_T`: partial-transpose scans, regrouped flattenings, the
//! rank-one transpose of the cyclic family and the middle cut of the
//! triangular family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abpformula::{abp_middle_cut, abp_to_pt_cert, OrderedABP};
use crate::error::{Error, Result};
use crate::fieldlinalg::{DenseMatrix, Entries, FieldCtx, Scalar};
use crate::ptcore::{all_kappas, partial_transpose, transpose_rank, Kappa};
use crate::tensorspace::{shifted_tensor, unflat, FlatteningSpec, HyperMatrix};

use super::family::{build_wt, cyclic_t, triangular_t, ExponentMatrix, Policy};

/// `rank(W^{⊤κ})` for every `κ ⊆ [d]` in lexicographic order.
pub fn wt_kappa_rank_scan(w: &HyperMatrix) -> Vec<(Kappa, usize)> {
    all_kappas(w.d())
        .into_par_iter()
        .map(|k| {
            let r = transpose_rank(w, &k).expect("κ sized to W");
            (k, r)
        })
        .collect()
}

/// `W^{[λ]}`: rows `(i_λ, j_λ)`, columns `(i_{λᶜ}, j_{λᶜ})`.
pub fn wt_lambda_matrix(w: &HyperMatrix, lambda: &[usize]) -> Result<DenseMatrix> {
    let (n, d) = (w.n(), w.d());
    if lambda.iter().any(|&k| k == 0 || k > d) {
        return Err(Error::OutOfRange(format!("λ = {lambda:?} is not a subset of [{d}]")));
    }
    let inside: Vec<usize> = (1..=d).filter(|k| lambda.contains(k)).map(|k| k - 1).collect();
    let outside: Vec<usize> = (1..=d).filter(|k| !lambda.contains(k)).map(|k| k - 1).collect();
    let rows = n.pow(2 * inside.len() as u32);
    let cols = n.pow(2 * outside.len() as u32);
    let mut i = vec![0usize; d];
    let mut j = vec![0usize; d];
    let spread = |mut x: usize, blocks: &[usize], i: &mut [usize], j: &mut [usize]| {
        for &b in blocks.iter().rev() {
            j[b] = x % n;
            x /= n;
        }
        for &b in blocks.iter().rev() {
            i[b] = x % n;
            x /= n;
        }
    };
    Ok(DenseMatrix::from_fn(rows, cols, *w.ctx(), |r, c| {
        spread(r, &inside, &mut i, &mut j);
        spread(c, &outside, &mut i, &mut j);
        w.get(&i, &j)
    }))
}

pub fn wt_lambda_flatten_rank(w: &HyperMatrix, lambda: &[usize]) -> Result<usize> {
    Ok(wt_lambda_matrix(w, lambda)?.rank())
}

/// `n^{2 min(|λ|, d - |λ|)}`.
pub fn lambda_full_rank(n: usize, d: usize, size: usize) -> usize {
    n.pow(2 * size.min(d - size) as u32)
}

/// `W^{⊤κ} = u vᵀ` for the cyclic exponent matrix with `κ` the odd blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicCert {
    pub kappa: Kappa,
    pub u: Entries,
    pub v: Entries,
    pub rank: usize,
}

/// After transposing the odd blocks, row digits are `(j₁, i₂, j₃, …)` and
/// column digits `(i₁, j₂, i₃, …)`. Each term `i_a j_{a+1}` of the exponent
/// has both factors on the row side when `a` is even and on the column side
/// when `a` is odd, so `u(r) = ω^{Σ_{a even} r_a r_{a+1}}` and
/// `v(c) = ω^{Σ_{a odd} c_a c_{a+1}}`, with `r_{d+1} = r_1`.
pub fn cyclic_rank1_cert(n: usize, d: usize, ctx: FieldCtx, policy: Policy) -> Result<CyclicCert> {
    if !d.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("d = {d} must be even")));
    }
    let t = cyclic_t(n as u64, d, policy)?;
    let w = build_wt(&t, ctx)?;
    let omega = ctx.root_of_unity(n as u64).expect("checked by build_wt");
    let odd: Vec<usize> = (1..=d).step_by(2).collect();
    let kappa = Kappa::new(d, &odd)?;
    let dim = w.dim();
    let side = |parity: usize| {
        let mut e = Entries::zeros(&ctx, dim);
        for x in 0..dim {
            let digits = w.tuple(x);
            let mut s = 0;
            for a in (parity..d).step_by(2) {
                s += digits[a] * digits[(a + 1) % d];
            }
            e.set(x, ctx.pow(omega, (s % n) as u64));
        }
        e
    };
    // 0-based position 1 is block 2, the first even block.
    let (u, v) = (side(1), side(0));
    let transposed = partial_transpose(&w, &kappa)?;
    if !transposed.body().approx_eq(&DenseMatrix::outer(&u, &v, ctx)) {
        return Err(Error::VerificationFailed(format!("W^⊤{kappa} is not u vᵀ for n = {n}, d = {d}")));
    }
    Ok(CyclicCert { kappa, u, v, rank: transposed.rank() })
}

/// Whether every entry of `e` has absolute value 1 (complex contexts) or is
/// nonzero (finite ones).
pub fn unit_entries(e: &Entries, ctx: &FieldCtx) -> bool {
    match e {
        Entries::C(v) => v.iter().all(|z| (z.norm() - 1.0).abs() < 1e-9),
        Entries::Fp(_) => (0..e.len()).all(|k| !ctx.is_zero(e.get(k))),
    }
}

/// Rows and columns scaled by powers of `ω` chosen from `seed`; such scaling
/// never changes a rank.
pub fn rescale_units(w: &HyperMatrix, seed: u64) -> Result<HyperMatrix> {
    let ctx = *w.ctx();
    let omega = ctx
        .root_of_unity(w.n() as u64)
        .ok_or_else(|| Error::InvalidField(format!("{ctx} has no root of order {}", w.n())))?;
    let n = w.n() as u64;
    let mix = |x: u64| x.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(seed).rotate_left(17) % n;
    let dim = w.dim();
    let body = DenseMatrix::from_fn(dim, dim, ctx, |r, c| {
        let s = ctx.pow(omega, mix(r as u64) + mix((c + dim) as u64));
        ctx.mul(s, w.body().get(r, c))
    });
    HyperMatrix::new(w.n(), w.d(), body)
}

/// The scan with every `W^{⊤κ}` rescaled by unit rows and columns first.
pub fn wt_rescaled_scan(w: &HyperMatrix, seed: u64) -> Result<Vec<(Kappa, usize)>> {
    all_kappas(w.d())
        .into_par_iter()
        .map(|k| {
            let t = partial_transpose(w, &k)?;
            Ok((k, rescale_units(&t, seed ^ k.mask())?.rank()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularReport {
    pub n: usize,
    pub d: usize,
    pub cut_rank: usize,
    pub bound: usize,
    /// Width of the ordered program for the shifted tensor.
    pub abp_width: usize,
    /// Pairs kept by the middle cut of that program.
    pub abp_pairs: Option<usize>,
    /// `(verified value, claimed bound)` when a coarse identity is built in.
    pub certificate: Option<(usize, usize)>,
    pub note: String,
}

impl TriangularReport {
    pub fn holds(&self) -> bool {
        self.cut_rank <= self.bound
    }
}

/// Width-`n` program for `shifted(W_{T₃})`: the state after block `l` is the
/// prefix sum `i₁ + … + i_l`, and block `(j_l, i_{l+1})` contributes
/// `ω^{j_l · state}`.
pub fn triangular_abp(n: usize, d: usize, ctx: FieldCtx) -> Result<OrderedABP> {
    let omega = ctx
        .root_of_unity(n as u64)
        .ok_or_else(|| Error::InvalidField(format!("{ctx} has no root of order {n}")))?;
    let nn = n * n;
    let form = |pairs: &[(usize, Scalar)]| {
        let mut e = Entries::zeros(&ctx, nn);
        for &(k, s) in pairs {
            e.set(k, s);
        }
        e
    };
    let mut layers = Vec::with_capacity(d + 1);
    layers.push((0..n).map(|s| form(&[(s, ctx.one())])).collect());
    for _ in 1..d {
        let mut layer = Vec::with_capacity(nn);
        for s in 0..n {
            for s2 in 0..n {
                let i = (s2 + n - s) % n;
                let terms: Vec<(usize, Scalar)> =
                    (0..n).map(|j| (j * n + i, ctx.pow(omega, (j * s % n) as u64))).collect();
                layer.push(form(&terms));
            }
        }
        layers.push(layer);
    }
    layers.push((0..n).map(|s| form(&(0..n).map(|j| (j * n, ctx.pow(omega, (j * s % n) as u64))).collect::<Vec<_>>())).collect());
    let mut widths = vec![n; d + 2];
    widths[0] = 1;
    widths[d + 1] = 1;
    let one = || {
        let mut e = Entries::zeros(&ctx, 1);
        e.set(0, ctx.one());
        e
    };
    OrderedABP::new(nn, ctx, widths, layers, one(), one())
}

/// `rank(Mat_{{1..d+1},{d+2..2d+2}}(A)) ≤ n²` for `A♭ = shifted(W_{T₃})`, plus
/// the ordered program and, when possible, its certificate.
pub fn triangular_flattening_check(n: usize, d: usize, ctx: FieldCtx, policy: Policy) -> Result<TriangularReport> {
    let t: ExponentMatrix = triangular_t(n as u64, d, policy)?;
    let w = build_wt(&t, ctx)?;
    let a = unflat(&shifted_tensor(&w)?, n)?;
    let top = 2 * d as i64 + 2;
    let spec = FlatteningSpec::new((1..=d as i64 + 1).collect(), (d as i64 + 2..=top).collect());
    let cut_rank = a.flatten_mat(&spec)?.rank();
    let abp = triangular_abp(n, d, ctx)?;
    let mut note = String::new();
    let (abp_pairs, certificate) = if ctx.is_finite() {
        let cut = abp_middle_cut(&abp, &w)?;
        let certificate = match abp_to_pt_cert(&abp, &w, None) {
            Ok(b) => Some((b.certificate.value(), b.claimed_bound)),
            Err(Error::Unsupported(why)) => {
                note = why;
                None
            }
            Err(Error::CharacteristicTwo) => {
                note = "no certificate in characteristic 2".into();
                None
            }
            Err(e) => return Err(e),
        };
        (Some(cut.pairs.len()), certificate)
    } else {
        note = "program checked only in finite contexts".into();
        (None, None)
    };
    Ok(TriangularReport { n, d, cut_rank, bound: n * n, abp_width: n, abp_pairs, certificate, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::family::{cauchy_t, zero_t};

    fn contexts(n: u64) -> Vec<FieldCtx> {
        let (a, b) = FieldCtx::cycmod_pair(n).unwrap();
        vec![FieldCtx::complex(1e-9).unwrap(), a, b]
    }

    #[test]
    fn cyclic_rank_one() {
        for ctx in contexts(5) {
            let cert = cyclic_rank1_cert(5, 2, ctx, Policy::Strict).unwrap();
            assert_eq!((cert.kappa.members(), cert.rank), (vec![1], 1));
            assert!(unit_entries(&cert.u, &ctx) && unit_entries(&cert.v, &ctx));
        }
        let ctx = FieldCtx::cycmod_above(3, 1 << 20).unwrap();
        assert_eq!(cyclic_rank1_cert(3, 2, ctx, Policy::Relaxed).unwrap().rank, 1);
        assert_eq!(cyclic_rank1_cert(3, 4, ctx, Policy::Relaxed).unwrap().rank, 1);
        let ctx = FieldCtx::cycmod_above(7, 1 << 20).unwrap();
        assert!(cyclic_rank1_cert(7, 3, ctx, Policy::Relaxed).is_err());
    }

    #[test]
    fn cyclic_scan_and_duality() {
        let ctx = FieldCtx::cycmod_above(5, 1 << 20).unwrap();
        let w = build_wt(&cyclic_t(5, 2, Policy::Strict).unwrap(), ctx).unwrap();
        let ranks: Vec<usize> = wt_kappa_rank_scan(&w).into_iter().map(|(_, r)| r).collect();
        // Lexicographic order: {}, {1}, {1,2}, {2}.
        assert_eq!(ranks, vec![25, 1, 25, 1]);
    }

    #[test]
    fn cauchy_full_rank_everywhere() {
        let t = cauchy_t(2, 5, Policy::Strict).unwrap();
        for ctx in contexts(5) {
            let w = build_wt(&t, ctx).unwrap();
            assert!(wt_kappa_rank_scan(&w).iter().all(|&(_, r)| r == 25), "{ctx}");
            for lambda in [vec![], vec![1], vec![2], vec![1, 2]] {
                assert_eq!(wt_lambda_flatten_rank(&w, &lambda).unwrap(), lambda_full_rank(5, 2, lambda.len()));
            }
        }
    }

    #[test]
    fn lambda_layout_and_zero() {
        let ctx = FieldCtx::cycmod_above(5, 1 << 20).unwrap();
        let w = build_wt(&zero_t(5, 2, Policy::Strict).unwrap(), ctx).unwrap();
        let m = wt_lambda_matrix(&w, &[]).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (1, 625, 1));
        assert_eq!(wt_lambda_flatten_rank(&w, &[1]).unwrap(), 1);
        assert!(wt_lambda_matrix(&w, &[3]).is_err());
        let w = build_wt(&cauchy_t(2, 5, Policy::Strict).unwrap(), ctx).unwrap();
        let m = wt_lambda_matrix(&w, &[2]).unwrap();
        // Row (i₂, j₂) = (1, 3), column (i₁, j₁) = (4, 0).
        assert_eq!(m.get(5 + 3, 4 * 5), w.get(&[4, 1], &[0, 3]));
    }

    #[test]
    fn unit_rescaling_keeps_scans() {
        let t = cauchy_t(2, 5, Policy::Strict).unwrap();
        let ctx = FieldCtx::cycmod_above(5, 1 << 20).unwrap();
        let w = build_wt(&cyclic_t(5, 2, Policy::Strict).unwrap(), ctx).unwrap();
        let scaled = rescale_units(&w, 3).unwrap();
        assert_ne!(scaled, w);
        assert_eq!(wt_rescaled_scan(&w, 3).unwrap(), wt_kappa_rank_scan(&w));
        let wc = build_wt(&t, ctx).unwrap();
        assert_eq!(wt_rescaled_scan(&wc, 9).unwrap(), wt_kappa_rank_scan(&wc));
    }

    #[test]
    fn triangular_cut() {
        for n in [3usize, 5] {
            let ctx = FieldCtx::cycmod_above(n as u64, 1 << 20).unwrap();
            let r = triangular_flattening_check(n, 2, ctx, Policy::Relaxed).unwrap();
            assert!(r.holds(), "{r:?}");
            assert!(r.abp_pairs.unwrap() <= n * n);
        }
        let r = triangular_flattening_check(3, 2, FieldCtx::complex(1e-9).unwrap(), Policy::Relaxed).unwrap();
        assert!(r.holds() && r.abp_pairs.is_none());
        let d1 = triangular_flattening_check(3, 1, FieldCtx::cycmod_above(3, 1 << 20).unwrap(), Policy::Relaxed);
        assert!(d1.unwrap().holds());
    }

    #[test]
    fn triangular_certificate_when_identity_is_built_in() {
        let ctx = FieldCtx::gf(3).unwrap();
        let r = triangular_flattening_check(2, 2, ctx, Policy::Relaxed).unwrap();
        let (value, bound) = r.certificate.unwrap();
        assert!(value <= bound);
    }
}
