//! Finite subgraphs of the infinite path and orientations of vertex sets.
//!
//! Edge `i` joins `v_{i-1}` and `v_i`. Its directed versions carry labels
//! `2i-1` (`v_{i-1} → v_i`) and `2i` (`v_i → v_{i-1}`), so vertex `v_k`
//! owns the outgoing labels `2k` (towards `v_{k-1}`) and `2k+1` (towards
//! `v_{k+1}`).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Outgoing labels of `v_k`: `(left, right)`.
pub fn out_labels(v: i64) -> (i64, i64) {
    (2 * v, 2 * v + 1)
}

/// The vertex a directed label leaves from.
pub fn tail_of(label: i64) -> i64 {
    label.div_euclid(2)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathGraph {
    edges: BTreeSet<i64>,
}

/// Derived vertex and directed-edge sets of a [`PathGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphAnalysis {
    pub v1: Vec<i64>,
    pub v2: Vec<i64>,
    pub d1: Vec<i64>,
    pub d2: Vec<i64>,
    pub components: Vec<Vec<i64>>,
    pub longest: usize,
}

impl PathGraph {
    pub fn new(edges: impl IntoIterator<Item = i64>) -> Result<Self> {
        let edges: BTreeSet<i64> = edges.into_iter().collect();
        if edges.is_empty() {
            return Err(Error::InvalidArgument("a path subgraph needs at least one edge".into()));
        }
        // Labels 2i-1, 2i must stay representable.
        if edges.iter().any(|e| e.unsigned_abs() > (1 << 40)) {
            return Err(Error::OutOfRange("edge index too large".into()));
        }
        Ok(PathGraph { edges })
    }

    /// Edges `1..=d`: the path `v_0 … v_d`.
    pub fn path(d: usize) -> Result<Self> {
        PathGraph::new(1..=d as i64)
    }

    pub fn edges(&self) -> Vec<i64> {
        self.edges.iter().copied().collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, e: i64) -> bool {
        self.edges.contains(&e)
    }

    pub fn degree(&self, v: i64) -> usize {
        self.has_edge(v) as usize + self.has_edge(v + 1) as usize
    }

    pub fn vertices(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.edges.iter().flat_map(|&e| [e - 1, e]).collect();
        set.into_iter().collect()
    }

    pub fn v1(&self) -> Vec<i64> {
        self.vertices().into_iter().filter(|&v| self.degree(v) == 1).collect()
    }

    pub fn v2(&self) -> Vec<i64> {
        self.vertices().into_iter().filter(|&v| self.degree(v) == 2).collect()
    }

    /// `D(G)` as sorted labels.
    pub fn directed(&self) -> Vec<i64> {
        self.edges.iter().flat_map(|&e| [2 * e - 1, 2 * e]).collect()
    }

    pub fn contains_label(&self, label: i64) -> bool {
        self.has_edge((label + 1).div_euclid(2))
    }

    /// Directed edges leaving a degree-1 vertex.
    pub fn d1(&self) -> Vec<i64> {
        self.directed().into_iter().filter(|&l| self.degree(tail_of(l)) == 1).collect()
    }

    pub fn d2(&self) -> Vec<i64> {
        self.directed().into_iter().filter(|&l| self.degree(tail_of(l)) == 2).collect()
    }

    /// Maximal runs of consecutive edges.
    pub fn components(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        for &e in &self.edges {
            match out.last_mut() {
                Some(run) if *run.last().expect("nonempty run") + 1 == e => run.push(e),
                _ => out.push(vec![e]),
            }
        }
        out
    }

    /// `ℓ(G)`: edges in the largest component.
    pub fn longest(&self) -> usize {
        self.components().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn analyze(&self) -> GraphAnalysis {
        GraphAnalysis {
            v1: self.v1(),
            v2: self.v2(),
            d1: self.d1(),
            d2: self.d2(),
            components: self.components(),
            longest: self.longest(),
        }
    }

    pub fn is_edge_disjoint(&self, other: &PathGraph) -> bool {
        self.edges.is_disjoint(&other.edges)
    }

    pub fn union(&self, other: &PathGraph) -> PathGraph {
        PathGraph { edges: self.edges.union(&other.edges).copied().collect() }
    }
}

impl fmt::Display for PathGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.edges())
    }
}

/// An element of `𝒫(S)`: bit `j` of `mask` belongs to the `j`-th smallest
/// vertex of `S`; bit 0 sends its left outgoing edge to `I` and its right
/// one to `J`, bit 1 the reverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    base: Vec<i64>,
    mask: u64,
}

/// Largest supported base set.
pub const MAX_BASE: usize = 24;

impl Orientation {
    pub fn new(base: &[i64], mask: u64) -> Result<Self> {
        let mut sorted = base.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != base.len() {
            return Err(Error::InvalidArgument(format!("repeated vertex in {base:?}")));
        }
        if sorted.len() > MAX_BASE || (sorted.len() < 64 && mask >> sorted.len() != 0) {
            return Err(Error::OutOfRange(format!("mask {mask:#x} for {} vertices", sorted.len())));
        }
        Ok(Orientation { base: sorted, mask })
    }

    pub fn empty() -> Self {
        Orientation { base: Vec::new(), mask: 0 }
    }

    pub fn base(&self) -> &[i64] {
        &self.base
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Bit of vertex `v`, if it is in the base.
    pub fn bit(&self, v: i64) -> Option<bool> {
        self.base.iter().position(|&x| x == v).map(|j| self.mask >> j & 1 == 1)
    }

    pub fn i_labels(&self) -> Vec<i64> {
        self.side(false)
    }

    pub fn j_labels(&self) -> Vec<i64> {
        self.side(true)
    }

    fn side(&self, j_side: bool) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .base
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (left, right) = out_labels(v);
                let flipped = self.mask >> k & 1 == 1;
                if flipped != j_side {
                    right
                } else {
                    left
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// `γ₁ ⊔ γ₂` for disjoint bases.
    pub fn union(&self, other: &Orientation) -> Result<Orientation> {
        if self.base.iter().any(|v| other.base.contains(v)) {
            return Err(Error::InvalidArgument("orientation bases overlap".into()));
        }
        let mut pairs: Vec<(i64, bool)> = self
            .base
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, self.mask >> k & 1 == 1))
            .chain(other.base.iter().enumerate().map(|(k, &v)| (v, other.mask >> k & 1 == 1)))
            .collect();
        pairs.sort_unstable();
        let base: Vec<i64> = pairs.iter().map(|p| p.0).collect();
        let mask = pairs.iter().enumerate().fold(0u64, |m, (k, p)| m | (p.1 as u64) << k);
        Orientation::new(&base, mask)
    }

    /// Restriction to the vertices of `sub` (which must be in the base).
    pub fn restrict(&self, sub: &[i64]) -> Result<Orientation> {
        let mut mask = 0u64;
        let mut sorted = sub.to_vec();
        sorted.sort_unstable();
        for (k, &v) in sorted.iter().enumerate() {
            let bit = self.bit(v).ok_or_else(|| Error::InvalidArgument(format!("vertex {v} not in base")))?;
            mask |= (bit as u64) << k;
        }
        Orientation::new(&sorted, mask)
    }
}

/// All of `𝒫(S)` in increasing mask order.
pub fn orientations(base: &[i64]) -> Result<Vec<Orientation>> {
    Orientation::new(base, 0)?;
    (0..1u64 << base.len()).map(|m| Orientation::new(base, m)).collect()
}

/// `(γ⁺, γ⁻)` over `V₁(G)`, or with `h` given, `(δ⁺, δ⁻)` over
/// `V₁(G) ∩ V₁(H)`. `γ⁺` sends every edge of `G` leaving a degree-1 vertex
/// to `I`; `δ⁺` sends the edge of `H` at each shared endpoint to `I` and the
/// edge of `G` to `J`. The minus versions flip every bit.
pub fn gamma_delta_pm(g: &PathGraph, h: Option<&PathGraph>) -> Result<(Orientation, Orientation)> {
    let (base, towards): (Vec<i64>, &PathGraph) = match h {
        None => (g.v1(), g),
        Some(h) => {
            if !g.is_edge_disjoint(h) {
                return Err(Error::InvalidArgument(format!("{g} and {h} share an edge")));
            }
            let hv1 = h.v1();
            (g.v1().into_iter().filter(|v| hv1.contains(v)).collect(), h)
        }
    };
    // Bit 1 puts the right edge in I, so use it when the chosen edge is v+1.
    let mask = base
        .iter()
        .enumerate()
        .fold(0u64, |m, (k, &v)| m | (towards.has_edge(v + 1) as u64) << k);
    let full = if base.is_empty() { 0 } else { u64::MAX >> (64 - base.len()) };
    Ok((Orientation::new(&base, mask)?, Orientation::new(&base, !mask & full)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_and_paths() {
        let g = PathGraph::new([1]).unwrap();
        let a = g.analyze();
        assert_eq!((a.v1.len(), a.v2.len(), a.longest), (2, 0, 1));
        for d in 1..6 {
            let p = PathGraph::path(d).unwrap();
            let a = p.analyze();
            assert_eq!((a.v1.len(), a.v2.len(), a.longest), (2, d - 1, d));
            assert_eq!(a.d1.len(), a.v1.len());
            assert_eq!(a.d2.len(), 2 * a.v2.len());
        }
        let two = PathGraph::new([1, 3]).unwrap();
        assert_eq!(two.components(), vec![vec![1], vec![3]]);
        assert_eq!(two.longest(), 1);
        assert!(PathGraph::new([]).is_err());
    }

    #[test]
    fn orientation_counts_and_sides() {
        assert_eq!(orientations(&[]).unwrap(), vec![Orientation::empty()]);
        assert_eq!(orientations(&[0, 2, 5]).unwrap().len(), 8);
        let o = Orientation::new(&[1], 0).unwrap();
        assert_eq!((o.i_labels(), o.j_labels()), (vec![2], vec![3]));
        let a = Orientation::new(&[1, 4], 0b10).unwrap();
        let b = Orientation::new(&[2], 1).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.base(), &[1, 2, 4]);
        assert_eq!(u.i_labels(), vec![2, 5, 9]);
        assert_eq!(orientations(u.base()).unwrap().len(), 2 * 4);
        assert!(a.union(&a).is_err());
        assert_eq!(u.restrict(&[4, 1]).unwrap(), a);
    }

    #[test]
    fn gamma_plus_covers_d1() {
        for edges in [vec![1], vec![1, 2, 3], vec![0, 2, 3, 7]] {
            let g = PathGraph::new(edges).unwrap();
            let (plus, minus) = gamma_delta_pm(&g, None).unwrap();
            let d1 = g.d1();
            assert_eq!(plus.i_labels(), d1);
            assert_eq!(minus.j_labels(), d1);
            assert!(plus.j_labels().iter().all(|l| !d1.contains(l)));
            assert!(minus.i_labels().iter().all(|l| !d1.contains(l)));
        }
    }

    #[test]
    fn delta_swaps_at_shared_endpoints() {
        let g = PathGraph::new([1]).unwrap();
        let h = PathGraph::new([2]).unwrap();
        let (plus, minus) = gamma_delta_pm(&g, Some(&h)).unwrap();
        assert_eq!(plus.base(), &[1]);
        // v_1 → v_2 is edge 2 of H, forward label 3.
        assert_eq!((plus.i_labels(), plus.j_labels()), (vec![3], vec![2]));
        assert_eq!((minus.i_labels(), minus.j_labels()), (vec![2], vec![3]));
        let far = PathGraph::new([5]).unwrap();
        let (p, m) = gamma_delta_pm(&g, Some(&far)).unwrap();
        assert!(p.base().is_empty() && m.base().is_empty());
        assert!(gamma_delta_pm(&g, Some(&g)).is_err());
    }
}
