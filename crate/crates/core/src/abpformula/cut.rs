//! Cutting an ordered program for a shifted tensor in the middle, and the
//! resulting PT-rank upper bound.
//!
//! For `M` over `[n]^{d'}` with `d'` even, the program has `d = d' + 1`
//! blocks over `[n²]`. Writing the shifted tensor as `A` over `[n]^{2d}`,
//! the split of the middle layer `⌈d/2⌉` into its row and column halves
//! gives `Mat_{1..d, d+1..2d}(A)` as a sum of `w² n²` outer products. Pinning
//! the padded positions `1` and `2d` to the first index leaves a matrix
//! whose rank factors `vec(B_l) vec(C_l)ᵀ` give `M = Σ_l B̃_l ⊠ C̃_l` over
//! `[n^{d'/2}]²`.

use crate::error::{Error, Result};
use crate::fieldlinalg::{DenseMatrix, Entries, FieldCtx, Scalar};
use crate::ptcore::{kron_act, refine_certificate, regroup, verify_pt_certificate, PTCertificate};
use crate::soslink::{base_identity, sos_to_pt, SoSCertificate};
use crate::tensorspace::{shifted_tensor, unflat, FlatteningSpec, HyperMatrix};

use super::abp::{abp_eval, OrderedABP};

#[derive(Clone, Debug, PartialEq)]
pub struct MiddleCut {
    /// 1-based index of the cut layer.
    pub layer: usize,
    /// Nonzero outer products produced by the cut.
    pub terms: usize,
    /// `w_{c-1} · w_c · n²`.
    pub term_bound: usize,
    /// `Mat_{2..2c-1, 2c..2d-1}(A)` for the cut layer `c`.
    pub matrix: DenseMatrix,
    /// `(vec B_l, vec C_l)` with `Σ_l vec(B_l) vec(C_l)ᵀ = matrix`.
    pub pairs: Vec<(Entries, Entries)>,
}

fn base_of(abp: &OrderedABP) -> Result<usize> {
    let q = abp.alphabet();
    let n = (q as f64).sqrt().round() as usize;
    if n * n != q {
        return Err(Error::InvalidArgument(format!("alphabet {q} is not a square")));
    }
    Ok(n)
}

pub fn abp_middle_cut(abp: &OrderedABP, m: &HyperMatrix) -> Result<MiddleCut> {
    let n = base_of(abp)?;
    let d = abp.d();
    if m.n() != n || m.d() + 1 != d {
        return Err(Error::Dimension(format!(
            "a {d}-block program over [{}] cannot compute the shifted tensor of a [{}]^{} matrix",
            abp.alphabet(),
            m.n(),
            m.d()
        )));
    }
    if abp_eval(abp)? != shifted_tensor(m)? {
        return Err(Error::VerificationFailed("program does not compute the shifted tensor of M".into()));
    }
    let ctx = *m.ctx();
    let c = d.div_ceil(2);
    let (wl, wr) = (abp.widths()[c - 1], abp.widths()[c]);
    let pre = abp.prefix(c - 1);
    let suf = abp.suffix(c);
    let (left, right) = (pre.len() / wl, suf.len() / wr);

    // Row index (a_1..a_{2c-2}, a) and column index (b, a_{2c+1}..a_{2d}).
    let rows = left * n;
    let cols = n * right;
    let mut full = DenseMatrix::zeros(rows, cols, ctx);
    let mut terms = 0;
    for i in 0..wl {
        for j in 0..wr {
            for a in 0..n {
                for b in 0..n {
                    let coef = abp.coeff(c, i, j, a * n + b);
                    if ctx.is_zero(coef) {
                        continue;
                    }
                    let u: Vec<Scalar> = (0..left).map(|x| pre[x * wl + i]).collect();
                    let v: Vec<Scalar> = (0..right).map(|y| suf[y * wr + j]).collect();
                    if u.iter().all(|&s| ctx.is_zero(s)) || v.iter().all(|&s| ctx.is_zero(s)) {
                        continue;
                    }
                    terms += 1;
                    for (x, &ux) in u.iter().enumerate() {
                        if ctx.is_zero(ux) {
                            continue;
                        }
                        let cu = ctx.mul(coef, ux);
                        for (y, &vy) in v.iter().enumerate() {
                            let (r, col) = (x * n + a, b * right + y);
                            full.set(r, col, ctx.add(full.get(r, col), ctx.mul(cu, vy)));
                        }
                    }
                }
            }
        }
    }

    let flat_a = unflat(&shifted_tensor(m)?, n)?;
    let split = 2 * c as i64 - 1;
    let spec = FlatteningSpec::new((1..=split).collect(), (split + 1..=2 * d as i64).collect());
    if !flat_a.flatten_mat(&spec)?.approx_eq(&full) {
        return Err(Error::VerificationFailed("middle-cut terms do not reassemble the flattening".into()));
    }

    // Pin a_1 (most significant row digit) and a_{2d} (least significant
    // column digit) to the first index.
    let (sub_rows, sub_cols) = (rows / n, cols / n);
    let matrix = DenseMatrix::from_fn(sub_rows, sub_cols, ctx, |r, col| full.get(r, col * n));
    let pairs = matrix.rank_factorization();
    Ok(MiddleCut { layer: c, terms, term_bound: wl * wr * n * n, matrix, pairs })
}

/// `Mat_{i's, j's}` of a vector over `(i_1, j_1, …, i_h, j_h)`.
fn interleaved_to_matrix(v: &Entries, n: usize, h: usize, ctx: FieldCtx) -> DenseMatrix {
    let side = n.pow(h as u32);
    let mut src = vec![0usize; side * side];
    for y in 0..side * side {
        let (mut r, mut c, mut rest, mut place) = (0, 0, y, 1);
        for _ in 0..h {
            c += (rest % n) * place;
            rest /= n;
            r += (rest % n) * place;
            rest /= n;
            place *= n;
        }
        src[r * side + c] = y;
    }
    DenseMatrix::from_fn(side, side, ctx, |r, c| v.get(src[r * side + c]))
}

/// The certificate and the bookkeeping behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct AbpBound {
    pub certificate: PTCertificate,
    pub cut: MiddleCut,
    /// Value of the coarse identity certificate.
    pub provider_value: usize,
    /// `pairs · provider_value`.
    pub claimed_bound: usize,
}

/// A verified PT certificate for `M` from an ordered program computing its
/// shifted tensor. `provider` must represent the biquadratic identity over
/// `[n^{d'/2}]²`; without one, the built-in composition identity is used
/// when that size is 1, 2, 4 or 8.
pub fn abp_to_pt_cert(abp: &OrderedABP, m: &HyperMatrix, provider: Option<&SoSCertificate>) -> Result<AbpBound> {
    let (n, fine_d) = (m.n(), m.d());
    if fine_d == 0 || fine_d % 2 != 0 {
        return Err(Error::Unsupported(format!(
            "the middle cut needs an even number of matrix blocks (an odd number of program blocks); got d = {fine_d}"
        )));
    }
    let ctx = *m.ctx();
    let h = fine_d / 2;
    let side = n.pow(h as u32);
    let cut = abp_middle_cut(abp, m)?;

    let coarse_id = HyperMatrix::identity(side, 2, ctx)?;
    let built;
    let sos = match provider {
        Some(s) => s,
        None => {
            built = base_identity(side, ctx)
                .map_err(|_| Error::Unsupported(format!("no provider for the identity over [{side}]^2")))?;
            &built
        }
    };
    let id_cert = sos_to_pt(&coarse_id, sos)?;
    let provider_value = verify_pt_certificate(&id_cert)?;

    let coarse_m = regroup(m, h, 2)?;
    let mut parts = Vec::new();
    for (u, v) in &cut.pairs {
        let b = interleaved_to_matrix(u, n, h, ctx);
        let c = interleaved_to_matrix(v, n, h, ctx);
        let (_, moved) = kron_act(&coarse_id, &[b, c], Some(&id_cert))?;
        parts.extend(moved.expect("certificate supplied").parts().iter().cloned());
    }
    let claimed_bound = cut.pairs.len() * provider_value;
    let coarse_cert = PTCertificate::new(
        coarse_m,
        parts,
        format!(
            "middle cut at layer {}: {} outer products (bound w²n² = {}), compressed to {} pairs; \
             each pair B⊠C = (B⊠C)·I over [{side}]^2 inherits the identity certificate of value {provider_value}; \
             sum of pairs gives value ≤ {} · {provider_value} = {claimed_bound}",
            cut.layer,
            cut.terms,
            cut.term_bound,
            cut.pairs.len(),
            cut.pairs.len()
        ),
    )?;
    verify_pt_certificate(&coarse_cert)?;
    let mut certificate = refine_certificate(&coarse_cert, n, h)?;
    let value = verify_pt_certificate(&certificate)?;
    certificate.append_metadata(&format!("verified value {value} ≤ {claimed_bound}"));
    Ok(AbpBound { certificate, cut, provider_value, claimed_bound })
}
