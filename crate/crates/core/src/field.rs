//! Coefficient fields of characteristic 2.
//!
//! Two kinds are supported: the finite fields GF(2^m) for m <= 16, stored as
//! residues modulo an irreducible polynomial, and the rational function field
//! GF(2)(t), stored as reduced fractions of GF(2)-polynomials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest polynomial degree allowed in a stored rational function.
pub const RAT_DEGREE_CAP: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field mismatch: {0} vs {1}")]
    SpecMismatch(FieldSpec, FieldSpec),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a square")]
    NotASquare,
    #[error("polynomial degree {0} exceeds the cap of {RAT_DEGREE_CAP}")]
    DegreeOverflow(u32),
    #[error("modulus {0:#x} is not irreducible of degree {1}")]
    Reducible(u32, u32),
    #[error("degree {0} is outside 1..=16")]
    BadDegree(u32),
    #[error("the rational function field is infinite")]
    Infinite,
}

/// Which field the scalars live in. Copyable and compared bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldSpec {
    /// GF(2^m); `modulus` includes the leading bit t^m.
    BinaryExt { m: u32, modulus: u32 },
    /// GF(2)(t).
    RatFunc,
}

/// Degree of a polynomial stored in the low bits of a u32 (deg 0 = -1 sentinel handled by caller).
fn deg32(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn polymod32(mut a: u32, b: u32) -> u32 {
    let db = deg32(b);
    while a != 0 && deg32(a) >= db {
        a ^= b << (deg32(a) - db);
    }
    a
}

fn is_irreducible(modulus: u32, m: u32) -> bool {
    if deg32(modulus) != m as i32 {
        return false;
    }
    // trial division by every polynomial of degree 1..=m/2
    for d in 1..=m / 2 {
        for p in (1u32 << d)..(1u32 << (d + 1)) {
            if polymod32(modulus, p) == 0 {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    pub fn binary_ext(m: u32, modulus: u32) -> Result<Self, FieldError> {
        if !(1..=16).contains(&m) {
            return Err(FieldError::BadDegree(m));
        }
        if !is_irreducible(modulus, m) {
            return Err(FieldError::Reducible(modulus, m));
        }
        Ok(FieldSpec::BinaryExt { m, modulus })
    }

    pub fn gf2() -> Self {
        FieldSpec::BinaryExt { m: 1, modulus: 0b11 }
    }

    /// GF(4) = GF(2)[t]/(t^2+t+1).
    pub fn gf4() -> Self {
        FieldSpec::BinaryExt { m: 2, modulus: 0b111 }
    }

    /// GF(8) = GF(2)[t]/(t^3+t+1).
    pub fn gf8() -> Self {
        FieldSpec::BinaryExt { m: 3, modulus: 0b1011 }
    }

    /// GF(16) = GF(2)[t]/(t^4+t+1).
    pub fn gf16() -> Self {
        FieldSpec::BinaryExt { m: 4, modulus: 0b10011 }
    }

    pub fn ratfunc() -> Self {
        FieldSpec::RatFunc
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSpec::BinaryExt { .. })
    }

    /// Field size for finite fields.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::BinaryExt { m, .. } => Some(1u64 << m),
            FieldSpec::RatFunc => None,
        }
    }

    /// log2 of the field size, if finite.
    pub fn bits(&self) -> Option<u32> {
        match self {
            FieldSpec::BinaryExt { m, .. } => Some(*m),
            FieldSpec::RatFunc => None,
        }
    }

    pub fn zero(&self) -> FieldElement {
        match self {
            FieldSpec::BinaryExt { .. } => FieldElement { spec: *self, repr: Repr::Bin(0) },
            FieldSpec::RatFunc => FieldElement { spec: *self, repr: Repr::Rat(0, 1) },
        }
    }

    pub fn one(&self) -> FieldElement {
        match self {
            FieldSpec::BinaryExt { .. } => FieldElement { spec: *self, repr: Repr::Bin(1) },
            FieldSpec::RatFunc => FieldElement { spec: *self, repr: Repr::Rat(1, 1) },
        }
    }

    /// The generator t (for GF(2) this is t mod t+1 = 1).
    pub fn t(&self) -> FieldElement {
        match self {
            FieldSpec::BinaryExt { modulus, .. } => self.from_code(polymod32(0b10, *modulus) as u64),
            FieldSpec::RatFunc => FieldElement { spec: *self, repr: Repr::Rat(0b10, 1) },
        }
    }

    /// Element from a polynomial bit-code (bit i = coefficient of t^i), reduced.
    pub fn from_code(&self, code: u64) -> FieldElement {
        match self {
            FieldSpec::BinaryExt { modulus, .. } => {
                let mut acc = 0u32;
                // reduce a 64-bit polynomial modulo the modulus
                let mut c = code;
                let mut pow = 1u32; // t^i mod modulus
                while c != 0 {
                    if c & 1 == 1 {
                        acc ^= pow;
                    }
                    c >>= 1;
                    pow = polymod32(pow << 1, *modulus);
                }
                FieldElement { spec: *self, repr: Repr::Bin(acc as u16) }
            }
            FieldSpec::RatFunc => FieldElement { spec: *self, repr: Repr::Rat(code as u128, 1) },
        }
    }

    /// Rational function num/den from polynomial bit-codes.
    pub fn ratio(&self, num: u128, den: u128) -> Result<FieldElement, FieldError> {
        match self {
            FieldSpec::RatFunc => rat_reduce(Wide::from(num), Wide::from(den)),
            FieldSpec::BinaryExt { .. } => {
                let n = self.from_code_u128(num);
                let d = self.from_code_u128(den);
                n.checked_div(&d)
            }
        }
    }

    fn from_code_u128(&self, code: u128) -> FieldElement {
        let lo = self.from_code(code as u64);
        let hi = self.from_code((code >> 64) as u64);
        // t^64 reduced
        let mut t64 = self.one();
        let t = self.t();
        for _ in 0..64 {
            t64 = t64 * t;
        }
        lo + hi * t64
    }

    /// Every element of a finite field in increasing code order.
    pub fn enumerate(&self) -> Result<Vec<FieldElement>, FieldError> {
        match self {
            FieldSpec::BinaryExt { m, .. } => {
                Ok((0..(1u32 << m)).map(|c| FieldElement { spec: *self, repr: Repr::Bin(c as u16) }).collect())
            }
            FieldSpec::RatFunc => Err(FieldError::Infinite),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::BinaryExt { m: 1, .. } => write!(f, "gf2"),
            FieldSpec::BinaryExt { m: 2, .. } => write!(f, "gf4"),
            FieldSpec::BinaryExt { m: 3, modulus: 0b1011 } => write!(f, "gf8"),
            FieldSpec::BinaryExt { m, modulus } => {
                write!(f, "gf{}:{}", 1u64 << m, poly_to_string(*modulus as u128))
            }
            FieldSpec::RatFunc => write!(f, "f2t"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Bin(u16),
    /// numerator, denominator; gcd 1, denominator nonzero
    Rat(u128, u128),
}

/// An element of a [`FieldSpec`]. Equality is representation equality, which
/// is canonical for both kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    spec: FieldSpec,
    repr: Repr,
}

// ---------------------------------------------------------------------------
// GF(2^m) kernels

#[inline]
pub(crate) fn gf_mul(a: u16, b: u16, m: u32, modulus: u32) -> u16 {
    let mut a = a as u32;
    let mut b = b as u32;
    let mut acc = 0u32;
    let top = 1u32 << m;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc as u16
}

pub(crate) fn gf_pow(mut a: u16, mut e: u64, m: u32, modulus: u32) -> u16 {
    let mut r = 1u16;
    while e > 0 {
        if e & 1 == 1 {
            r = gf_mul(r, a, m, modulus);
        }
        a = gf_mul(a, a, m, modulus);
        e >>= 1;
    }
    r
}

pub(crate) fn gf_inv(a: u16, m: u32, modulus: u32) -> u16 {
    // a^(2^m - 2)
    gf_pow(a, (1u64 << m) - 2, m, modulus)
}

pub(crate) fn gf_sqrt(a: u16, m: u32, modulus: u32) -> u16 {
    // a^(2^(m-1))
    let mut r = a;
    for _ in 0..m.saturating_sub(1) {
        r = gf_mul(r, r, m, modulus);
    }
    r
}

/// Absolute trace GF(2^m) -> GF(2).
pub(crate) fn gf_trace(a: u16, m: u32, modulus: u32) -> u16 {
    let mut acc = 0u16;
    let mut x = a;
    for _ in 0..m {
        acc ^= x;
        x = gf_mul(x, x, m, modulus);
    }
    acc
}

// ---------------------------------------------------------------------------
// GF(2)[t] polynomials wide enough for products of two capped operands.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Wide {
    lo: u128,
    hi: u128,
}

impl From<u128> for Wide {
    fn from(lo: u128) -> Self {
        Wide { lo, hi: 0 }
    }
}

impl Wide {
    const ZERO: Wide = Wide { lo: 0, hi: 0 };

    fn is_zero(&self) -> bool {
        self.lo == 0 && self.hi == 0
    }

    /// -1 for the zero polynomial.
    fn deg(&self) -> i32 {
        if self.hi != 0 {
            255 - self.hi.leading_zeros() as i32
        } else if self.lo != 0 {
            127 - self.lo.leading_zeros() as i32
        } else {
            -1
        }
    }

    fn xor(&self, o: &Wide) -> Wide {
        Wide { lo: self.lo ^ o.lo, hi: self.hi ^ o.hi }
    }

    fn shl(&self, k: u32) -> Wide {
        if k == 0 {
            *self
        } else if k >= 128 {
            Wide { lo: 0, hi: self.lo << (k - 128) }
        } else {
            Wide { lo: self.lo << k, hi: (self.hi << k) | (self.lo >> (128 - k)) }
        }
    }

    fn bit(&self, i: u32) -> bool {
        if i < 128 {
            (self.lo >> i) & 1 == 1
        } else {
            (self.hi >> (i - 128)) & 1 == 1
        }
    }

    fn with_bit(&self, i: u32) -> Wide {
        let mut w = *self;
        if i < 128 {
            w.lo |= 1 << i;
        } else {
            w.hi |= 1 << (i - 128);
        }
        w
    }

    /// Product; both operands must have degree < 128.
    fn mul(&self, o: &Wide) -> Wide {
        debug_assert!(self.hi == 0 && o.hi == 0);
        let mut acc = Wide::ZERO;
        let mut b = o.lo;
        let mut i = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc = acc.xor(&Wide::from(self.lo).shl(i));
            }
            b >>= 1;
            i += 1;
        }
        acc
    }

    fn divrem(&self, d: &Wide) -> (Wide, Wide) {
        let dd = d.deg();
        assert!(dd >= 0, "polynomial division by zero");
        let mut q = Wide::ZERO;
        let mut r = *self;
        while r.deg() >= dd {
            let s = (r.deg() - dd) as u32;
            r = r.xor(&d.shl(s));
            q = q.with_bit(s);
        }
        (q, r)
    }

    fn gcd(a: Wide, b: Wide) -> Wide {
        let (mut a, mut b) = (a, b);
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a
    }

    fn narrow(&self) -> Result<u128, FieldError> {
        let d = self.deg();
        if d > RAT_DEGREE_CAP as i32 {
            return Err(FieldError::DegreeOverflow(d as u32));
        }
        Ok(self.lo)
    }
}

fn rat_reduce(num: Wide, den: Wide) -> Result<FieldElement, FieldError> {
    if den.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    let spec = FieldSpec::RatFunc;
    if num.is_zero() {
        return Ok(FieldElement { spec, repr: Repr::Rat(0, 1) });
    }
    let g = Wide::gcd(num, den);
    let (n, _) = num.divrem(&g);
    let (d, _) = den.divrem(&g);
    // over GF(2) every nonzero polynomial is monic
    Ok(FieldElement { spec, repr: Repr::Rat(n.narrow()?, d.narrow()?) })
}

/// Keep the even-degree coefficients of p, halving their degrees.
fn halve_even(p: u128) -> u128 {
    let mut out = 0u128;
    for i in 0..64 {
        if (p >> (2 * i)) & 1 == 1 {
            out |= 1 << i;
        }
    }
    out
}

const ODD_MASK: u128 = 0xAAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAA_AAAAu128;

fn wide_halves(p: &Wide) -> (u128, u128) {
    // returns (even part halved, odd part shifted then halved) for a polynomial of degree <= 255
    let mut even = 0u128;
    let mut odd = 0u128;
    for i in 0..128u32 {
        if p.bit(2 * i) {
            even |= 1 << i;
        }
        if 2 * i + 1 < 256 && p.bit(2 * i + 1) {
            odd |= 1 << i;
        }
    }
    (even, odd)
}

pub(crate) fn poly_to_string(p: u128) -> String {
    if p == 0 {
        return "0".into();
    }
    let mut terms = Vec::new();
    for i in (0..128).rev() {
        if (p >> i) & 1 == 1 {
            terms.push(match i {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            });
        }
    }
    terms.join("+")
}

// ---------------------------------------------------------------------------

impl FieldElement {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Bin(0) | Repr::Rat(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.repr, Repr::Bin(1) | Repr::Rat(1, 1))
    }

    /// Bit-code of a GF(2^m) element.
    pub fn code(&self) -> Option<u16> {
        match self.repr {
            Repr::Bin(c) => Some(c),
            Repr::Rat(..) => None,
        }
    }

    /// Numerator and denominator bit-codes of a rational function.
    pub fn fraction(&self) -> Option<(u128, u128)> {
        match self.repr {
            Repr::Rat(n, d) => Some((n, d)),
            Repr::Bin(_) => None,
        }
    }

    fn same(&self, o: &FieldElement) -> Result<(), FieldError> {
        if self.spec != o.spec {
            Err(FieldError::SpecMismatch(self.spec, o.spec))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(o)?;
        match (self.repr, o.repr) {
            (Repr::Bin(a), Repr::Bin(b)) => Ok(FieldElement { spec: self.spec, repr: Repr::Bin(a ^ b) }),
            (Repr::Rat(an, ad), Repr::Rat(bn, bd)) => {
                if ad == bd {
                    return rat_reduce(Wide::from(an ^ bn), Wide::from(ad));
                }
                let n = Wide::from(an).mul(&Wide::from(bd)).xor(&Wide::from(bn).mul(&Wide::from(ad)));
                let d = Wide::from(ad).mul(&Wide::from(bd));
                rat_reduce(n, d)
            }
            _ => unreachable!(),
        }
    }

    pub fn checked_mul(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(o)?;
        match (self.spec, self.repr, o.repr) {
            (FieldSpec::BinaryExt { m, modulus }, Repr::Bin(a), Repr::Bin(b)) => {
                Ok(FieldElement { spec: self.spec, repr: Repr::Bin(gf_mul(a, b, m, modulus)) })
            }
            (_, Repr::Rat(an, ad), Repr::Rat(bn, bd)) => {
                if an == 0 || bn == 0 {
                    return Ok(self.spec.zero());
                }
                rat_reduce(Wide::from(an).mul(&Wide::from(bn)), Wide::from(ad).mul(&Wide::from(bd)))
            }
            _ => unreachable!(),
        }
    }

    pub fn checked_inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match (self.spec, self.repr) {
            (FieldSpec::BinaryExt { m, modulus }, Repr::Bin(a)) => {
                Ok(FieldElement { spec: self.spec, repr: Repr::Bin(gf_inv(a, m, modulus)) })
            }
            (_, Repr::Rat(n, d)) => Ok(FieldElement { spec: self.spec, repr: Repr::Rat(d, n) }),
            _ => unreachable!(),
        }
    }

    pub fn checked_div(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.checked_mul(&o.checked_inv()?)
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> FieldElement {
        self.checked_inv().expect("inverse of zero")
    }

    pub fn square(&self) -> FieldElement {
        *self * *self
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = *self;
        let mut r = self.spec.one();
        while e > 0 {
            if e & 1 == 1 {
                r = r * base;
            }
            base = base * base;
            e >>= 1;
        }
        r
    }

    /// The unique square root when it exists.
    pub fn sqrt(&self) -> Result<FieldElement, FieldError> {
        match (self.spec, self.repr) {
            (FieldSpec::BinaryExt { m, modulus }, Repr::Bin(a)) => {
                Ok(FieldElement { spec: self.spec, repr: Repr::Bin(gf_sqrt(a, m, modulus)) })
            }
            (_, Repr::Rat(n, d)) => {
                if n & ODD_MASK != 0 || d & ODD_MASK != 0 {
                    return Err(FieldError::NotASquare);
                }
                Ok(FieldElement { spec: self.spec, repr: Repr::Rat(halve_even(n), halve_even(d)) })
            }
            _ => unreachable!(),
        }
    }

    /// Coordinates (h0, h1) with self = h0^2 + t*h1^2.
    pub fn square_class_coordinates(&self) -> (FieldElement, FieldElement) {
        match self.repr {
            Repr::Bin(_) => (self.sqrt().expect("perfect field"), self.spec.zero()),
            Repr::Rat(n, d) => {
                // n/d = n*d / d^2 = (E(t^2) + t*O(t^2)) / d^2
                let nd = Wide::from(n).mul(&Wide::from(d));
                let (even, odd) = wide_halves(&nd);
                let den = FieldElement { spec: self.spec, repr: Repr::Rat(d, 1) };
                let ev = rat_reduce(Wide::from(even), Wide::from(1)).expect("degree within cap");
                let od = rat_reduce(Wide::from(odd), Wide::from(1)).expect("degree within cap");
                (ev / den, od / den)
            }
        }
    }

    /// Absolute trace to GF(2) for finite fields.
    pub fn trace(&self) -> Option<FieldElement> {
        match (self.spec, self.repr) {
            (FieldSpec::BinaryExt { m, modulus }, Repr::Bin(a)) => {
                Some(FieldElement { spec: self.spec, repr: Repr::Bin(gf_trace(a, m, modulus)) })
            }
            _ => None,
        }
    }

    /// Total degree size used by random generators and caps: max(deg num, deg den).
    pub fn height(&self) -> u32 {
        match self.repr {
            Repr::Bin(_) => 0,
            Repr::Rat(n, d) => {
                let dn = 127 - n.leading_zeros().min(127);
                let dd = 127 - d.leading_zeros().min(127);
                dn.max(dd)
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Bin(c) => write!(f, "{}", poly_to_string(c as u128)),
            Repr::Rat(n, 1) => write!(f, "{}", poly_to_string(n)),
            Repr::Rat(n, d) => {
                let ns = poly_to_string(n);
                let ds = poly_to_string(d);
                let wrap = |s: String| if s.contains('+') { format!("({s})") } else { s };
                write!(f, "{}/{}", wrap(ns), wrap(ds))
            }
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: FieldElement) -> FieldElement {
        self.checked_add(&o).expect("field addition")
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: FieldElement) -> FieldElement {
        self + o
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, o: FieldElement) -> FieldElement {
        self.checked_mul(&o).expect("field multiplication")
    }
}

impl Div for FieldElement {
    type Output = FieldElement;
    fn div(self, o: FieldElement) -> FieldElement {
        self.checked_div(&o).expect("field division")
    }
}

pub fn add(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    a.checked_add(b)
}

pub fn mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    a.checked_mul(b)
}

pub fn inv(a: &FieldElement) -> Result<FieldElement, FieldError> {
    a.checked_inv()
}

pub fn sqrt(a: &FieldElement) -> Result<FieldElement, FieldError> {
    a.sqrt()
}

pub fn square_class_coordinates(a: &FieldElement) -> (FieldElement, FieldElement) {
    a.square_class_coordinates()
}

/// Rank over k of the 2-column coordinate matrix; this is the dimension of
/// the k^2-span of `elems`.
pub fn k2_linear_rank(elems: &[FieldElement]) -> usize {
    if elems.is_empty() {
        return 0;
    }
    let spec = elems[0].spec();
    let rows: Vec<Vec<FieldElement>> = elems
        .iter()
        .map(|e| {
            let (h0, h1) = e.square_class_coordinates();
            vec![h0, h1]
        })
        .collect();
    crate::linalg::Mat::from_rows(spec, &rows).rank()
}

pub fn enumerate(spec: &FieldSpec) -> Result<Vec<FieldElement>, FieldError> {
    spec.enumerate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldSpec {
        FieldSpec::gf4()
    }

    fn rat(n: u128, d: u128) -> FieldElement {
        FieldSpec::RatFunc.ratio(n, d).unwrap()
    }

    #[test]
    fn char_two_addition() {
        let k = FieldSpec::gf2();
        assert!((k.one() + k.one()).is_zero());
        let t = gf4().t();
        assert_eq!(t + (t + gf4().one()), gf4().one());
        // t/(t+1) + 1/(t+1) = 1
        assert_eq!(rat(0b10, 0b11) + rat(1, 0b11), FieldSpec::RatFunc.one());
    }

    #[test]
    fn gf4_products() {
        let k = gf4();
        let t = k.t();
        let t1 = t + k.one();
        assert_eq!(t * t, t1);
        assert_eq!(t.inv(), t1);
        assert_eq!(t1.sqrt().unwrap(), t);
    }

    #[test]
    fn ratfunc_inverse_and_roots() {
        // t^2/(t+1) -> (t+1)/t^2
        assert_eq!(rat(0b100, 0b11).inv(), rat(0b11, 0b100));
        assert_eq!(rat(0b101, 1).sqrt().unwrap(), rat(0b11, 1));
        assert_eq!(rat(0b10, 1).sqrt(), Err(FieldError::NotASquare));
    }

    #[test]
    fn coordinates_examples() {
        let k = FieldSpec::RatFunc;
        assert_eq!(rat(0b10, 1).square_class_coordinates(), (k.zero(), k.one()));
        assert_eq!(rat(0b110, 1).square_class_coordinates(), (rat(0b10, 1), k.one()));
        assert_eq!(rat(1, 0b100).square_class_coordinates(), (rat(1, 0b10), k.zero()));
    }

    #[test]
    fn k2_ranks() {
        assert_eq!(k2_linear_rank(&[rat(1, 1), rat(0b10, 1)]), 2);
        assert_eq!(k2_linear_rank(&[rat(1, 1), rat(0b10, 1), rat(0b100, 1)]), 2);
        assert_eq!(k2_linear_rank(&[gf4().one(), gf4().t()]), 1);
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(FieldSpec::gf2().enumerate().unwrap().len(), 2);
        assert_eq!(gf4().enumerate().unwrap().len(), 4);
        assert_eq!(FieldSpec::gf8().enumerate().unwrap().len(), 8);
        assert_eq!(FieldSpec::RatFunc.enumerate(), Err(FieldError::Infinite));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(FieldSpec::binary_ext(2, 0b101).is_err());
        assert!(FieldSpec::binary_ext(4, 0b11111).is_ok());
        assert!(FieldSpec::binary_ext(4, 0b10101).is_err());
    }

    #[test]
    fn perfect_field_roots_and_frobenius() {
        for spec in [FieldSpec::gf2(), gf4(), FieldSpec::gf8(), FieldSpec::gf16()] {
            let all = spec.enumerate().unwrap();
            for a in &all {
                assert_eq!(a.sqrt().unwrap().square(), *a);
                assert!((*a + *a).is_zero());
                for b in &all {
                    assert_eq!((*a + *b).square(), a.square() + b.square());
                }
            }
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let big = FieldSpec::RatFunc.ratio(1u128 << 40, 1).unwrap();
        assert!(big.checked_mul(&big).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(rat(0b100, 0b11).to_string(), "t^2/(t+1)");
        assert_eq!(gf4().t().to_string(), "t");
        assert_eq!(FieldSpec::gf8().to_string(), "gf8");
    }
}
