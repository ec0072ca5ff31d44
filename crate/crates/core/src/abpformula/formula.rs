//! Syntactically set-multilinear formulas and their coefficient tensors.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fieldlinalg::{FieldCtx, Scalar};
use crate::tensorspace::constructions::one_hot;
use crate::tensorspace::Tensor;

#[derive(Clone, Debug, PartialEq)]
pub enum SmNode {
    /// `coeff · X^{(block)}_{var}`.
    Leaf { block: i64, var: usize, coeff: Scalar },
    Plus(Vec<SmNode>),
    Times(Box<SmNode>, Box<SmNode>),
}

impl SmNode {
    pub fn leaf(block: i64, var: usize, coeff: Scalar) -> SmNode {
        SmNode::Leaf { block, var, coeff }
    }

    pub fn times(a: SmNode, b: SmNode) -> SmNode {
        SmNode::Times(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> usize {
        match self {
            SmNode::Leaf { .. } => 1,
            SmNode::Plus(children) => children.iter().map(SmNode::leaves).sum(),
            SmNode::Times(a, b) => a.leaves() + b.leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SmNode::Leaf { .. } => 0,
            SmNode::Plus(children) => 1 + children.iter().map(SmNode::depth).max().unwrap_or(0),
            SmNode::Times(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// The block set, checking set-multilinearity on the way.
    fn blocks(&self, alphabet: usize, ctx: &FieldCtx) -> Result<BTreeSet<i64>> {
        match self {
            SmNode::Leaf { block, var, coeff } => {
                if *var >= alphabet {
                    return Err(Error::OutOfRange(format!("variable {var} of block {block} ≥ {alphabet}")));
                }
                ctx.check_scalar(*coeff)?;
                Ok(BTreeSet::from([*block]))
            }
            SmNode::Plus(children) => {
                let (first, rest) = children
                    .split_first()
                    .ok_or_else(|| Error::InvalidArgument("empty sum".into()))?;
                let blocks = first.blocks(alphabet, ctx)?;
                for c in rest {
                    let other = c.blocks(alphabet, ctx)?;
                    if other != blocks {
                        return Err(Error::InvalidArgument(format!(
                            "summands over blocks {blocks:?} and {other:?}"
                        )));
                    }
                }
                Ok(blocks)
            }
            SmNode::Times(a, b) => {
                let (x, y) = (a.blocks(alphabet, ctx)?, b.blocks(alphabet, ctx)?);
                if !x.is_disjoint(&y) {
                    return Err(Error::InvalidArgument(format!("product of overlapping blocks {x:?} and {y:?}")));
                }
                Ok(x.union(&y).copied().collect())
            }
        }
    }

    fn eval(&self, alphabet: usize, ctx: FieldCtx) -> Result<Tensor> {
        match self {
            SmNode::Leaf { block, var, coeff } => Ok(one_hot(alphabet, vec![*block], ctx, &[*var])?.scale(*coeff)),
            SmNode::Plus(children) => {
                let mut acc = children[0].eval(alphabet, ctx)?;
                for c in &children[1..] {
                    acc = acc.add(&c.eval(alphabet, ctx)?.reorder(acc.labels())?)?;
                }
                Ok(acc)
            }
            SmNode::Times(a, b) => {
                let t = a.eval(alphabet, ctx)?.tensor_product(&b.eval(alphabet, ctx)?)?;
                let mut sorted = t.labels().to_vec();
                sorted.sort_unstable();
                t.reorder(&sorted)
            }
        }
    }
}

/// A formula whose variables are `X^{(b)}_a` for blocks `b` and `a < alphabet`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmFormula {
    alphabet: usize,
    ctx: FieldCtx,
    root: SmNode,
    blocks: Vec<i64>,
}

impl SmFormula {
    pub fn new(alphabet: usize, ctx: FieldCtx, root: SmNode) -> Result<Self> {
        ctx.validate()?;
        if alphabet == 0 {
            return Err(Error::InvalidArgument("empty alphabet".into()));
        }
        let blocks = root.blocks(alphabet, &ctx)?.into_iter().collect();
        Ok(SmFormula { alphabet, ctx, root, blocks })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn root(&self) -> &SmNode {
        &self.root
    }

    /// Sorted block labels.
    pub fn blocks(&self) -> &[i64] {
        &self.blocks
    }

    pub fn leaves(&self) -> usize {
        self.root.leaves()
    }
}

/// The coefficient tensor over `[alphabet]^{blocks}`, labels sorted.
pub fn formula_eval(f: &SmFormula) -> Result<Tensor> {
    crate::tensorspace::tensor::checked_volume(f.alphabet, f.blocks.len())?;
    f.root.eval(f.alphabet, f.ctx)
}

/// Entry `(s, t)` of `X^{(lo)} ⋯ X^{(hi)}`, with `None` meaning summed.
fn chain(n: usize, lo: i64, hi: i64, s: Option<usize>, t: Option<usize>, one: Scalar) -> SmNode {
    let ends = |e: Option<usize>| -> Vec<usize> { e.map_or_else(|| (0..n).collect(), |x| vec![x]) };
    if lo == hi {
        let mut leaves: Vec<SmNode> = Vec::new();
        for a in ends(s) {
            for b in ends(t) {
                leaves.push(SmNode::leaf(lo, a * n + b, one));
            }
        }
        return if leaves.len() == 1 { leaves.pop().expect("one leaf") } else { SmNode::Plus(leaves) };
    }
    let mid = lo + (hi - lo) / 2;
    let terms: Vec<SmNode> = (0..n)
        .map(|m| SmNode::times(chain(n, lo, mid, s, Some(m), one), chain(n, mid + 1, hi, Some(m), t, one)))
        .collect();
    if terms.len() == 1 {
        terms.into_iter().next().expect("one term")
    } else {
        SmNode::Plus(terms)
    }
}

/// Divide-and-conquer formula for `IMM_{n,d}` over blocks `1..=d`, with the
/// endpoint sums pushed into the outer factors. For `d = 2` it has `2n²`
/// leaves.
pub fn imm_formula(n: usize, d: usize, ctx: FieldCtx) -> Result<SmFormula> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("IMM needs n, d >= 1".into()));
    }
    SmFormula::new(n * n, ctx, chain(n, 1, d as i64, None, None, ctx.one()))
}

/// The same with both endpoints fixed to the first index: a formula for the
/// shifted tensor of the identity.
pub fn imm_slice_formula(n: usize, d: usize, ctx: FieldCtx) -> Result<SmFormula> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("IMM needs n, d >= 1".into()));
    }
    SmFormula::new(n * n, ctx, chain(n, 1, d as i64, Some(0), Some(0), ctx.one()))
}

/// A random formula over `blocks` (sorted): depth at most `max_depth`
/// (beyond what the block count forces), fan-in at most 3, and products that
/// split the block list into contiguous halves.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    blocks: &[i64],
    alphabet: usize,
    ctx: FieldCtx,
    max_depth: usize,
) -> Result<SmFormula> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("no blocks".into()));
    }
    let p = ctx.require_finite()?;
    let root = random_node(rng, blocks, alphabet, ctx, p, max_depth);
    SmFormula::new(alphabet, ctx, root)
}

fn random_node<R: Rng>(rng: &mut R, blocks: &[i64], alphabet: usize, ctx: FieldCtx, p: u64, depth: usize) -> SmNode {
    // Products need ⌈log₂|blocks|⌉ levels below this one.
    let needed = usize::BITS as usize - (blocks.len() - 1).leading_zeros() as usize;
    if depth > needed && rng.gen_bool(0.35) {
        let fanin = rng.gen_range(2..=3);
        return SmNode::Plus((0..fanin).map(|_| random_node(rng, blocks, alphabet, ctx, p, depth - 1)).collect());
    }
    if blocks.len() == 1 {
        return SmNode::leaf(blocks[0], rng.gen_range(0..alphabet), ctx.from_int(rng.gen_range(1..p) as i64));
    }
    let split = rng.gen_range(1..blocks.len());
    let next = depth.saturating_sub(1);
    SmNode::times(
        random_node(rng, &blocks[..split], alphabet, ctx, p, next),
        random_node(rng, &blocks[split..], alphabet, ctx, p, next),
    )
}
