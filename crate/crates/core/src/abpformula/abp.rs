//! Ordered algebraic branching programs over block alphabets.

use crate::error::{Error, Result};
use crate::fieldlinalg::{Entries, FieldCtx, Scalar};
use crate::tensorspace::Tensor;

/// `f = v₁ᵀ M₁ ⋯ M_d v₂` where every entry of `M_k` is a linear form in the
/// `alphabet` variables of block `k`, stored as its coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedABP {
    alphabet: usize,
    ctx: FieldCtx,
    widths: Vec<usize>,
    /// `layers[k][r * widths[k+1] + c]` is the form at `(r, c)` of `M_{k+1}`.
    layers: Vec<Vec<Entries>>,
    v1: Entries,
    v2: Entries,
}

impl OrderedABP {
    pub fn new(
        alphabet: usize,
        ctx: FieldCtx,
        widths: Vec<usize>,
        layers: Vec<Vec<Entries>>,
        v1: Entries,
        v2: Entries,
    ) -> Result<Self> {
        ctx.validate()?;
        if alphabet == 0 || layers.is_empty() {
            return Err(Error::InvalidArgument("an ABP needs a nonempty alphabet and at least one layer".into()));
        }
        if widths.len() != layers.len() + 1 || widths.contains(&0) {
            return Err(Error::Dimension(format!(
                "{} widths for {} layers; widths must be positive",
                widths.len(),
                layers.len()
            )));
        }
        if v1.len() != widths[0] || v2.len() != widths[layers.len()] {
            return Err(Error::Dimension(format!(
                "boundary vectors of length {}, {} for widths {:?}",
                v1.len(),
                v2.len(),
                widths
            )));
        }
        v1.validate(&ctx)?;
        v2.validate(&ctx)?;
        for (k, layer) in layers.iter().enumerate() {
            let cells = widths[k].checked_mul(widths[k + 1]).ok_or_else(|| Error::OutOfRange("width".into()))?;
            if layer.len() != cells {
                return Err(Error::Dimension(format!("layer {} has {} entries, expected {cells}", k + 1, layer.len())));
            }
            for form in layer {
                if form.len() != alphabet {
                    return Err(Error::Dimension(format!(
                        "layer {} form has {} coefficients, expected {alphabet}",
                        k + 1,
                        form.len()
                    )));
                }
                form.validate(&ctx)?;
            }
        }
        Ok(OrderedABP { alphabet, ctx, widths, layers, v1, v2 })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Number of blocks.
    pub fn d(&self) -> usize {
        self.layers.len()
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn width(&self) -> usize {
        *self.widths.iter().max().expect("nonempty")
    }

    /// `Σ w_i`.
    pub fn size(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn layers(&self) -> &[Vec<Entries>] {
        &self.layers
    }

    pub fn v1(&self) -> &Entries {
        &self.v1
    }

    pub fn v2(&self) -> &Entries {
        &self.v2
    }

    /// Coefficient of variable `a` in entry `(r, c)` of `M_k` (`k` 1-based).
    pub fn coeff(&self, k: usize, r: usize, c: usize, a: usize) -> Scalar {
        self.layers[k - 1][r * self.widths[k] + c].get(a)
    }

    #[cfg(test)]
    pub(crate) fn set_coeff(&mut self, k: usize, r: usize, c: usize, a: usize, s: Scalar) {
        let w = self.widths[k];
        self.layers[k - 1][r * w + c].set(a, s);
    }

    /// Row vectors `v₁ᵀ M₁ ⋯ M_k` as polynomials: entry `x * w_k + j` is the
    /// coefficient of monomial `x ∈ [q]^k` in component `j`.
    pub(crate) fn prefix(&self, k: usize) -> Vec<Scalar> {
        let ctx = self.ctx;
        let mut cur: Vec<Scalar> = (0..self.widths[0]).map(|j| self.v1.get(j)).collect();
        for layer in 1..=k {
            let (wi, wo) = (self.widths[layer - 1], self.widths[layer]);
            let mono = cur.len() / wi;
            let mut next = vec![ctx.zero(); mono * self.alphabet * wo];
            for x in 0..mono {
                for r in 0..wi {
                    let s = cur[x * wi + r];
                    if ctx.is_zero(s) {
                        continue;
                    }
                    for c in 0..wo {
                        let form = &self.layers[layer - 1][r * wo + c];
                        for a in 0..self.alphabet {
                            let t = form.get(a);
                            if !ctx.is_zero(t) {
                                let at = (x * self.alphabet + a) * wo + c;
                                next[at] = ctx.add(next[at], ctx.mul(s, t));
                            }
                        }
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// Column vectors `M_{k+1} ⋯ M_d v₂`: entry `x * w_k + i` is the
    /// coefficient of monomial `x ∈ [q]^{d-k}` in component `i`.
    pub(crate) fn suffix(&self, k: usize) -> Vec<Scalar> {
        let ctx = self.ctx;
        let d = self.d();
        let mut cur: Vec<Scalar> = (0..self.widths[d]).map(|j| self.v2.get(j)).collect();
        // `cur` is indexed by (x, i) with x over the blocks after `layer`.
        let mut tail = 1usize;
        for layer in (k + 1..=d).rev() {
            let (wi, wo) = (self.widths[layer - 1], self.widths[layer]);
            let mut next = vec![ctx.zero(); self.alphabet * tail * wi];
            for a in 0..self.alphabet {
                for r in 0..wi {
                    for c in 0..wo {
                        let t = self.layers[layer - 1][r * wo + c].get(a);
                        if ctx.is_zero(t) {
                            continue;
                        }
                        for x in 0..tail {
                            let s = cur[x * wo + c];
                            let at = (a * tail + x) * wi + r;
                            next[at] = ctx.add(next[at], ctx.mul(t, s));
                        }
                    }
                }
            }
            cur = next;
            tail *= self.alphabet;
        }
        cur
    }
}

/// The coefficient tensor over `[q]^d`, labels `1..=d`.
pub fn abp_eval(abp: &OrderedABP) -> Result<Tensor> {
    let d = abp.d();
    crate::tensorspace::tensor::checked_volume(abp.alphabet, d)?;
    let ctx = abp.ctx;
    let wd = abp.widths[d];
    let rows = abp.prefix(d);
    let mut data = Entries::zeros(&ctx, rows.len() / wd);
    for x in 0..rows.len() / wd {
        let mut acc = ctx.zero();
        for j in 0..wd {
            acc = ctx.add(acc, ctx.mul(rows[x * wd + j], abp.v2.get(j)));
        }
        data.set(x, acc);
    }
    Tensor::new(abp.alphabet, (1..=d as i64).collect(), ctx, data)
}

/// The width-`n` program for `IMM_{n,d}` over `[n²]^d`: `M_k(r, c)` is the
/// variable `⟨r, c⟩` of block `k`, and both boundary vectors are all-ones.
pub fn abp_for_imm(n: usize, d: usize, ctx: FieldCtx) -> Result<OrderedABP> {
    imm_program(n, d, ctx, false)
}

/// As [`abp_for_imm`] with both boundary vectors `e_1`, so the chain starts
/// and ends at the first index. This computes the shifted tensor of the
/// `n^{d-1} × n^{d-1}` identity.
pub fn abp_for_imm_slice(n: usize, d: usize, ctx: FieldCtx) -> Result<OrderedABP> {
    imm_program(n, d, ctx, true)
}

fn imm_program(n: usize, d: usize, ctx: FieldCtx, pinned: bool) -> Result<OrderedABP> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("IMM needs n, d >= 1".into()));
    }
    let q = n.checked_mul(n).ok_or_else(|| Error::OutOfRange("n²".into()))?;
    let layer: Vec<Entries> = (0..n * n)
        .map(|rc| {
            let mut e = Entries::zeros(&ctx, q);
            e.set(rc, ctx.one());
            e
        })
        .collect();
    let boundary = || {
        let mut e = Entries::zeros(&ctx, n);
        for j in 0..n {
            if !pinned || j == 0 {
                e.set(j, ctx.one());
            }
        }
        e
    };
    OrderedABP::new(q, ctx, vec![n; d + 1], vec![layer; d], boundary(), boundary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorspace::{imm_endpoint_slice, imm_tensor};

    #[test]
    fn imm_programs_evaluate_to_imm() {
        let ctx = FieldCtx::gf(3).unwrap();
        for (n, d) in [(1, 3), (2, 1), (2, 3), (3, 2)] {
            let abp = abp_for_imm(n, d, ctx).unwrap();
            assert_eq!(abp.size(), (d + 1) * n);
            assert_eq!(abp_eval(&abp).unwrap(), imm_tensor(n, d, ctx).unwrap());
            assert_eq!(abp_eval(&abp_for_imm_slice(n, d, ctx).unwrap()).unwrap(), imm_endpoint_slice(n, d, ctx).unwrap());
        }
        assert!(abp_eval(&abp_for_imm(1, 4, ctx).unwrap()).unwrap().entries() == &Entries::Fp(vec![1]));
    }

    #[test]
    fn width_one_is_a_product_of_forms() {
        let ctx = FieldCtx::gf(5).unwrap();
        let form = |v: Vec<u64>| Entries::Fp(v);
        let abp = OrderedABP::new(
            2,
            ctx,
            vec![1, 1, 1],
            vec![vec![form(vec![1, 0])], vec![form(vec![2, 3])]],
            form(vec![1]),
            form(vec![4]),
        )
        .unwrap();
        // 4 · x₁ · (2y₁ + 3y₂)
        let t = abp_eval(&abp).unwrap();
        assert_eq!(t.entries(), &Entries::Fp(vec![3, 2, 0, 0]));
        let zero = OrderedABP::new(2, ctx, vec![1, 1], vec![vec![form(vec![1, 1])]], form(vec![0]), form(vec![1])).unwrap();
        assert!(abp_eval(&zero).unwrap().is_zero());
    }

    #[test]
    fn prefix_and_suffix_meet() {
        let ctx = FieldCtx::gf(7).unwrap();
        let abp = abp_for_imm(2, 3, ctx).unwrap();
        let full = abp_eval(&abp).unwrap();
        for k in 0..=3 {
            let (pre, suf) = (abp.prefix(k), abp.suffix(k));
            let w = abp.widths()[k];
            let (left, right) = (pre.len() / w, suf.len() / w);
            for x in 0..left {
                for y in 0..right {
                    let mut acc = ctx.zero();
                    for j in 0..w {
                        acc = ctx.add(acc, ctx.mul(pre[x * w + j], suf[y * w + j]));
                    }
                    assert_eq!(acc, full.get_flat(x * right + y));
                }
            }
        }
    }

    #[test]
    fn shapes_are_checked() {
        let ctx = FieldCtx::gf(2).unwrap();
        let f = Entries::Fp(vec![1]);
        assert!(OrderedABP::new(1, ctx, vec![1, 2], vec![vec![f.clone()]], f.clone(), f.clone()).is_err());
        assert!(OrderedABP::new(1, ctx, vec![1], vec![], f.clone(), f.clone()).is_err());
        assert!(OrderedABP::new(2, ctx, vec![1, 1], vec![vec![f.clone()]], f.clone(), f).is_err());
    }
}
