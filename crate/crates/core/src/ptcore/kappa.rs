use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A subset `κ ⊆ [d]`, stored as a bitmask with bit `k-1` for member `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Kappa {
    d: usize,
    mask: u64,
}

impl Kappa {
    pub fn empty(d: usize) -> Kappa {
        Kappa { d, mask: 0 }
    }

    pub fn full(d: usize) -> Kappa {
        Kappa { d, mask: low_bits(d) }
    }

    /// From 1-based members.
    pub fn new(d: usize, members: &[usize]) -> Result<Kappa> {
        let mut mask = 0u64;
        for &k in members {
            if k == 0 || k > d {
                return Err(Error::OutOfRange(format!("{k} is not in [{d}]")));
            }
            mask |= 1 << (k - 1);
        }
        Ok(Kappa { d, mask })
    }

    pub fn from_mask(d: usize, mask: u64) -> Result<Kappa> {
        if d > 63 || mask & !low_bits(d) != 0 {
            return Err(Error::OutOfRange(format!("mask {mask:#b} is not a subset of [{d}]")));
        }
        Ok(Kappa { d, mask })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= 1 && k <= self.d && self.mask >> (k - 1) & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        (1..=self.d).filter(|&k| self.contains(k)).collect()
    }

    pub fn complement(&self) -> Kappa {
        Kappa { d: self.d, mask: !self.mask & low_bits(self.d) }
    }

    pub fn sym_diff(&self, other: &Kappa) -> Kappa {
        Kappa { d: self.d, mask: self.mask ^ other.mask }
    }

    /// Normal form: a subset of `[d-1]`, replacing `κ` by its complement when
    /// it contains `d`.
    pub fn canonical(&self) -> Kappa {
        if self.d > 0 && self.contains(self.d) {
            self.complement()
        } else {
            *self
        }
    }
}

fn low_bits(d: usize) -> u64 {
    if d >= 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

/// Lexicographic order on sorted member lists, so `∅ < {1} < {1,2} < {2}`.
impl Ord for Kappa {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d.cmp(&other.d).then_with(|| self.members().cmp(&other.members()))
    }
}

impl PartialOrd for Kappa {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// Every subset of `[d]`, in lexicographic order.
pub fn all_kappas(d: usize) -> Vec<Kappa> {
    let mut v: Vec<Kappa> = (0..1u64 << d).map(|mask| Kappa { d, mask }).collect();
    v.sort();
    v
}

/// The subsets of `[d-1]` that key canonical certificates, in lexicographic
/// order.
pub fn canonical_kappas(d: usize) -> Vec<Kappa> {
    if d == 0 {
        return vec![Kappa::empty(0)];
    }
    let mut v: Vec<Kappa> = (0..1u64 << (d - 1)).map(|mask| Kappa { d, mask }).collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let names: Vec<String> = all_kappas(3).iter().map(|k| k.to_string()).collect();
        assert_eq!(names, ["{}", "{1}", "{1,2}", "{1,2,3}", "{1,3}", "{2}", "{2,3}", "{3}"]);
        let canon: Vec<String> = canonical_kappas(3).iter().map(|k| k.to_string()).collect();
        assert_eq!(canon, ["{}", "{1}", "{1,2}", "{2}"]);
    }

    #[test]
    fn canonical_complements() {
        let k = Kappa::new(3, &[1, 3]).unwrap();
        assert_eq!(k.canonical(), Kappa::new(3, &[2]).unwrap());
        assert_eq!(k.complement().complement(), k);
        assert!(Kappa::new(2, &[3]).is_err());
        assert!(Kappa::from_mask(2, 4).is_err());
    }
}
