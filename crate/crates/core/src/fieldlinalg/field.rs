//! Field contexts and scalar arithmetic.
//!
//! Three kinds of field are supported: prime fields GF(p), an approximate
//! complex field carrying a pivot tolerance, and "cyclotomic-modular"
//! contexts, which are prime fields GF(q) with a distinguished element of
//! multiplicative order n standing in for a primitive n-th root of unity.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest modulus accepted; products of two residues must fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldCtx {
    Prime { p: u64 },
    Complex { eps: f64 },
    CycMod { q: u64, n: u64, omega: u64 },
}

/// A single field element, tagged by representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Fp(u64),
    C(Complex64),
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldCtx::Prime { p } => write!(f, "GF({p})"),
            FieldCtx::Complex { eps } => write!(f, "C~(eps={eps:e})"),
            FieldCtx::CycMod { q, n, omega } => write!(f, "GF({q})[omega={omega}, order {n}]"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    Some(old_s.rem_euclid(p as i64) as u64)
}

/// True when `a` is a nonzero square modulo the odd prime `p`.
pub fn is_square_mod(a: u64, p: u64) -> bool {
    let a = a % p;
    if p == 2 || a == 0 {
        return true;
    }
    pow_mod(a, (p - 1) / 2, p) == 1
}

/// Square root modulo a prime (Tonelli-Shanks); returns the smaller of the
/// two roots, or `None` when `a` is a non-residue.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || p == 2 {
        return Some(a);
    }
    if !is_square_mod(a, p) {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while is_square_mod(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % p;
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r.min(p - r))
}

/// Writes `a` as `x^2 + y^2` modulo an odd prime, scanning `x` upward.
pub fn two_squares_mod(a: u64, p: u64) -> (u64, u64) {
    let a = a % p;
    for x in 0..p {
        let rest = (a + p - x * x % p) % p;
        if let Some(y) = sqrt_mod(rest, p) {
            return (x, y);
        }
    }
    unreachable!("every residue modulo an odd prime is a sum of two squares")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order check: `omega^n == 1` and `omega^m != 1` for `0 < m < n`.
pub fn has_exact_order(omega: u64, n: u64, q: u64) -> bool {
    if n == 0 || pow_mod(omega, n, q) != 1 {
        return false;
    }
    prime_factors(n)
        .into_iter()
        .all(|r| pow_mod(omega, n / r, q) != 1)
}

impl FieldCtx {
    pub fn gf(p: u64) -> Result<Self> {
        let ctx = FieldCtx::Prime { p };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn complex(eps: f64) -> Result<Self> {
        let ctx = FieldCtx::Complex { eps };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn cycmod(q: u64, n: u64, omega: u64) -> Result<Self> {
        let ctx = FieldCtx::CycMod { q, n, omega };
        ctx.validate()?;
        Ok(ctx)
    }

    /// Cyclotomic-modular context over the smallest prime `q > floor` with
    /// `q ≡ 1 (mod n)`, using the first valid `x^((q-1)/n)` as omega.
    pub fn cycmod_above(n: u64, floor: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidField("root order must be positive".into()));
        }
        let mut q = floor + 1;
        while q % n != 1 % n || !is_prime(q) {
            q += 1;
            if q >= MAX_MODULUS {
                return Err(Error::InvalidField(format!("no prime q ≡ 1 mod {n} below 2^32")));
            }
        }
        let omega = (2..q)
            .map(|x| pow_mod(x, (q - 1) / n, q))
            .find(|&w| has_exact_order(w, n, q))
            .ok_or_else(|| Error::InvalidField(format!("no element of order {n} mod {q}")))?;
        FieldCtx::cycmod(q, n, omega)
    }

    /// The two cyclotomic-modular contexts used for cross-checking complex
    /// rank claims: the two smallest primes `q ≡ 1 (mod n)` above 2^20.
    pub fn cycmod_pair(n: u64) -> Result<(Self, Self)> {
        let first = FieldCtx::cycmod_above(n, 1 << 20)?;
        let second = FieldCtx::cycmod_above(n, first.modulus().unwrap_or(0))?;
        Ok((first, second))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldCtx::Prime { p } => {
                if p >= MAX_MODULUS || !is_prime(p) {
                    return Err(Error::InvalidField(format!("{p} is not a prime below 2^32")));
                }
            }
            FieldCtx::Complex { eps } => {
                if !(eps.is_finite() && eps > 0.0) {
                    return Err(Error::InvalidField(format!("tolerance {eps} must be positive")));
                }
            }
            FieldCtx::CycMod { q, n, omega } => {
                if q >= MAX_MODULUS || !is_prime(q) {
                    return Err(Error::InvalidField(format!("{q} is not a prime below 2^32")));
                }
                if n == 0 || (q - 1) % n != 0 {
                    return Err(Error::InvalidField(format!("{n} does not divide {q} - 1")));
                }
                if omega >= q || !has_exact_order(omega, n, q) {
                    return Err(Error::InvalidField(format!(
                        "{omega} does not have multiplicative order {n} mod {q}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Modulus of the underlying prime field, `None` for the complex context.
    pub fn modulus(&self) -> Option<u64> {
        match *self {
            FieldCtx::Prime { p } => Some(p),
            FieldCtx::CycMod { q, .. } => Some(q),
            FieldCtx::Complex { .. } => None,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.modulus().unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.modulus().is_some()
    }

    pub fn require_finite(&self) -> Result<u64> {
        self.modulus().ok_or_else(|| Error::InfiniteField(self.to_string()))
    }

    pub fn require_odd_characteristic(&self) -> Result<()> {
        if self.characteristic() == 2 {
            Err(Error::CharacteristicTwo)
        } else {
            Ok(())
        }
    }

    pub fn ensure_same(&self, other: &FieldCtx) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.to_string(), other.to_string()))
        }
    }

    /// Number of elements, `None` for the complex context.
    pub fn order(&self) -> Option<u64> {
        self.modulus()
    }

    pub fn zero(&self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        match self.modulus() {
            Some(p) => Scalar::Fp(v.rem_euclid(p as i64) as u64),
            None => Scalar::C(Complex64::new(v as f64, 0.0)),
        }
    }

    /// A primitive root of unity of the requested order, if the context has one.
    pub fn root_of_unity(&self, order: u64) -> Option<Scalar> {
        match *self {
            FieldCtx::CycMod { n, omega, .. } if n == order => Some(Scalar::Fp(omega)),
            FieldCtx::CycMod { q, .. } | FieldCtx::Prime { p: q } => {
                if order == 0 || (q - 1) % order != 0 {
                    return None;
                }
                (2..q)
                    .map(|x| pow_mod(x, (q - 1) / order, q))
                    .find(|&w| has_exact_order(w, order, q))
                    .map(Scalar::Fp)
                    .or(if order == 1 { Some(Scalar::Fp(1)) } else { None })
            }
            FieldCtx::Complex { .. } => {
                if order == 0 {
                    return None;
                }
                let theta = 2.0 * std::f64::consts::PI / order as f64;
                Some(Scalar::C(Complex64::from_polar(1.0, theta)))
            }
        }
    }

    pub fn check_scalar(&self, s: Scalar) -> Result<()> {
        match (self.modulus(), s) {
            (Some(p), Scalar::Fp(v)) if v < p => Ok(()),
            (None, Scalar::C(c)) if c.re.is_finite() && c.im.is_finite() => Ok(()),
            _ => Err(Error::InvalidArgument(format!("{s:?} is not an element of {self}"))),
        }
    }

    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp((x + y) % self.characteristic()),
            (Scalar::C(x), Scalar::C(y)) => Scalar::C(x + y),
            _ => panic!("mixed scalar representations"),
        }
    }

    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: Scalar) -> Scalar {
        match a {
            Scalar::Fp(x) => {
                let p = self.characteristic();
                Scalar::Fp((p - x % p) % p)
            }
            Scalar::C(x) => Scalar::C(-x),
        }
    }

    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp(x * y % self.characteristic()),
            (Scalar::C(x), Scalar::C(y)) => Scalar::C(x * y),
            _ => panic!("mixed scalar representations"),
        }
    }

    pub fn inv(&self, a: Scalar) -> Option<Scalar> {
        match a {
            Scalar::Fp(x) => inv_mod(x, self.characteristic()).map(Scalar::Fp),
            Scalar::C(x) => {
                if x.norm() == 0.0 {
                    None
                } else {
                    Some(Scalar::C(x.inv()))
                }
            }
        }
    }

    pub fn pow(&self, a: Scalar, e: u64) -> Scalar {
        match a {
            Scalar::Fp(x) => Scalar::Fp(pow_mod(x, e, self.characteristic())),
            Scalar::C(x) => Scalar::C(x.powu(e as u32)),
        }
    }

    pub fn is_zero(&self, a: Scalar) -> bool {
        match (a, self) {
            (Scalar::Fp(x), _) => x == 0,
            (Scalar::C(x), FieldCtx::Complex { eps }) => x.norm() <= *eps,
            (Scalar::C(x), _) => x.norm() == 0.0,
        }
    }

    pub(crate) fn ring(&self) -> AnyRing {
        match self.modulus() {
            Some(p) => AnyRing::Mod(Modp { p }),
            None => AnyRing::Cx(Cx {
                eps: match self {
                    FieldCtx::Complex { eps } => *eps,
                    _ => unreachable!(),
                },
            }),
        }
    }
}

/// Dense storage for a run of field elements.
#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Fp(Vec<u64>),
    C(Vec<Complex64>),
}

impl Entries {
    pub fn zeros(ctx: &FieldCtx, len: usize) -> Entries {
        match ctx.modulus() {
            Some(_) => Entries::Fp(vec![0; len]),
            None => Entries::C(vec![Complex64::new(0.0, 0.0); len]),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Entries::Fp(v) => v.len(),
            Entries::C(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self {
            Entries::Fp(v) => Scalar::Fp(v[i]),
            Entries::C(v) => Scalar::C(v[i]),
        }
    }

    pub fn set(&mut self, i: usize, s: Scalar) {
        match (self, s) {
            (Entries::Fp(v), Scalar::Fp(x)) => v[i] = x,
            (Entries::C(v), Scalar::C(x)) => v[i] = x,
            _ => panic!("mixed scalar representations"),
        }
    }

    /// `out[k] = self[src[k]]`.
    pub fn gather(&self, src: &[usize]) -> Entries {
        match self {
            Entries::Fp(v) => Entries::Fp(src.iter().map(|&s| v[s]).collect()),
            Entries::C(v) => Entries::C(src.iter().map(|&s| v[s]).collect()),
        }
    }

    /// Checks that every element belongs to `ctx`.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        match (self, ctx.modulus()) {
            (Entries::Fp(v), Some(p)) => match v.iter().find(|&&x| x >= p) {
                Some(x) => Err(Error::InvalidArgument(format!("entry {x} is not a residue mod {p}"))),
                None => Ok(()),
            },
            (Entries::C(v), None) => {
                if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("non-finite complex entry".into()))
                }
            }
            _ => Err(Error::InvalidArgument(format!("entry representation does not match {ctx}"))),
        }
    }
}

/// Arithmetic over a concrete element type, used by the dense kernels.
pub(crate) trait Ring: Copy + Send + Sync {
    type E: Copy + PartialEq + Send + Sync + fmt::Debug;
    fn zero(&self) -> Self::E;
    fn add(&self, a: Self::E, b: Self::E) -> Self::E;
    fn sub(&self, a: Self::E, b: Self::E) -> Self::E;
    fn mul(&self, a: Self::E, b: Self::E) -> Self::E;
    fn neg(&self, a: Self::E) -> Self::E;
    fn inv(&self, a: Self::E) -> Option<Self::E>;
    fn is_zero(&self, a: Self::E) -> bool;
    fn wrap(&self, v: Vec<Self::E>) -> Entries;
    fn view<'a>(&self, e: &'a Entries) -> &'a [Self::E];
    fn view_mut<'a>(&self, e: &'a mut Entries) -> &'a mut Vec<Self::E>;
    fn scalar(&self, s: Scalar) -> Self::E;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Modp {
    pub p: u64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Cx {
    pub eps: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum AnyRing {
    Mod(Modp),
    Cx(Cx),
}

impl Ring for Modp {
    type E = u64;
    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }
    #[inline]
    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.p)
    }
    #[inline]
    fn is_zero(&self, a: u64) -> bool {
        a == 0
    }
    fn wrap(&self, v: Vec<u64>) -> Entries {
        Entries::Fp(v)
    }
    fn view<'a>(&self, e: &'a Entries) -> &'a [u64] {
        match e {
            Entries::Fp(v) => v,
            Entries::C(_) => panic!("complex entries in a prime-field kernel"),
        }
    }
    fn view_mut<'a>(&self, e: &'a mut Entries) -> &'a mut Vec<u64> {
        match e {
            Entries::Fp(v) => v,
            Entries::C(_) => panic!("complex entries in a prime-field kernel"),
        }
    }
    fn scalar(&self, s: Scalar) -> u64 {
        match s {
            Scalar::Fp(x) => x % self.p,
            Scalar::C(_) => panic!("complex scalar in a prime-field kernel"),
        }
    }
}

impl Ring for Cx {
    type E = Complex64;
    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn add(&self, a: Complex64, b: Complex64) -> Complex64 {
        a + b
    }
    fn sub(&self, a: Complex64, b: Complex64) -> Complex64 {
        a - b
    }
    fn mul(&self, a: Complex64, b: Complex64) -> Complex64 {
        a * b
    }
    fn neg(&self, a: Complex64) -> Complex64 {
        -a
    }
    fn inv(&self, a: Complex64) -> Option<Complex64> {
        if a.norm() == 0.0 {
            None
        } else {
            Some(a.inv())
        }
    }
    fn is_zero(&self, a: Complex64) -> bool {
        a.norm() <= self.eps
    }
    fn wrap(&self, v: Vec<Complex64>) -> Entries {
        Entries::C(v)
    }
    fn view<'a>(&self, e: &'a Entries) -> &'a [Complex64] {
        match e {
            Entries::C(v) => v,
            Entries::Fp(_) => panic!("residues in a complex kernel"),
        }
    }
    fn view_mut<'a>(&self, e: &'a mut Entries) -> &'a mut Vec<Complex64> {
        match e {
            Entries::C(v) => v,
            Entries::Fp(_) => panic!("residues in a complex kernel"),
        }
    }
    fn scalar(&self, s: Scalar) -> Complex64 {
        match s {
            Scalar::C(x) => x,
            Scalar::Fp(_) => panic!("residue in a complex kernel"),
        }
    }
}

/// Runs `$body` with `$r` bound to the concrete ring of `$ctx`.
macro_rules! with_ring {
    ($ctx:expr, |$r:ident| $body:expr) => {
        match $ctx.ring() {
            $crate::fieldlinalg::field::AnyRing::Mod($r) => $body,
            $crate::fieldlinalg::field::AnyRing::Cx($r) => $body,
        }
    };
}
pub(crate) use with_ring;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_and_two_squares() {
        for p in [3u64, 5, 7, 11, 13, 101, 1_000_003] {
            for a in 1..p.min(200) {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!(!is_square_mod(a, p)),
                }
                let (x, y) = two_squares_mod(a, p);
                assert_eq!((x * x + y * y) % p, a);
            }
        }
        assert_eq!(two_squares_mod(2, 5), (1, 1));
    }

    #[test]
    fn context_validation() {
        assert!(FieldCtx::gf(4).is_err());
        assert!(FieldCtx::gf(2).is_ok());
        assert!(FieldCtx::complex(0.0).is_err());
        assert!(FieldCtx::cycmod(11, 5, 3).is_ok());
        assert!(FieldCtx::cycmod(11, 5, 2).is_err());
        assert!(FieldCtx::cycmod(11, 3, 3).is_err());
    }

    #[test]
    fn cycmod_pair_is_above_two_pow_twenty() {
        let (a, b) = FieldCtx::cycmod_pair(5).unwrap();
        let (qa, qb) = (a.modulus().unwrap(), b.modulus().unwrap());
        assert!(qa > 1 << 20 && qb > qa);
        assert_eq!(qa % 5, 1);
        assert_eq!(qb % 5, 1);
    }

    #[test]
    fn inverses() {
        for a in 1..97u64 {
            assert_eq!(a * inv_mod(a, 97).unwrap() % 97, 1);
        }
        assert_eq!(inv_mod(0, 97), None);
    }
}
