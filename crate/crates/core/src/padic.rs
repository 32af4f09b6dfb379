//! Truncated arithmetic in `F = Q_p` (odd `p`) and in `E = F(sqrt(zeta))`.
//!
//! A [`PadicElem`] is `p^val * unit` where `unit` is known modulo `p^prec`
//! (relative precision). Zero carries its absolute precision in `val`.
//! All moduli stay below `2^62` so products fit in `u128`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exact::CycloValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field configuration: {0}")]
    InvalidConfig(String),
}

pub type PadicResult<T> = Result<T, PadicError>;

/// `p^k`, panicking on overflow past `2^62`.
pub fn pow_p(p: u64, k: u32) -> u64 {
    let r = p.checked_pow(k).expect("p-adic modulus overflow");
    assert!(r < (1u64 << 62), "p-adic modulus overflow");
    r
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Reduces a signed integer modulo `m`.
pub fn reduce_i(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Legendre symbol of a residue modulo the odd prime `p`; `0` when `p | u`.
pub fn legendre_mod_p(u: i64, p: u64) -> i32 {
    let u = reduce_i(u as i128, p);
    if u == 0 {
        return 0;
    }
    if pow_mod(u, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `x != 0` as `p^v * u` with `p` not dividing `u`.
pub fn split_p(mut x: i128, p: u64) -> (i64, i128) {
    assert!(x != 0);
    let mut v = 0;
    while x % p as i128 == 0 {
        x /= p as i128;
        v += 1;
    }
    (v, x)
}

/// Element of `Q_p` known to finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicElem {
    p: u64,
    /// Valuation, or the absolute precision when the element is zero.
    val: i64,
    /// Unit part modulo `p^prec`; 0 for zero.
    unit: u64,
    prec: u32,
}

impl PadicElem {
    /// `p^val * unit` with `unit` known modulo `p^prec`; extra factors of `p` move into `val`.
    pub fn new(p: u64, val: i64, unit: i128, prec: u32) -> Self {
        if prec == 0 {
            return Self::zero(p, val);
        }
        let m = pow_p(p, prec);
        let u = reduce_i(unit, m);
        if u == 0 {
            return Self::zero(p, val + prec as i64);
        }
        let (v, u2) = split_p(u as i128, p);
        let prec2 = prec - v as u32;
        PadicElem {
            p,
            val: val + v,
            unit: reduce_i(u2, pow_p(p, prec2)),
            prec: prec2,
        }
    }

    /// The zero element known modulo `p^abs_prec`.
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        PadicElem {
            p,
            val: abs_prec,
            unit: 0,
            prec: 0,
        }
    }

    /// An integer, known modulo `p^abs_prec`.
    pub fn from_int(p: u64, x: i128, abs_prec: u32) -> Self {
        if x == 0 {
            return Self::zero(p, abs_prec as i64);
        }
        let (v, u) = split_p(x, p);
        if v >= abs_prec as i64 {
            return Self::zero(p, abs_prec as i64);
        }
        Self::new(p, v, u, abs_prec - v as u32)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    /// Valuation, or `None` for a zero-at-precision element.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Valuation of a nonzero element; `PrecisionExhausted` otherwise.
    pub fn val(&self) -> PadicResult<i64> {
        self.valuation()
            .ok_or_else(|| PadicError::PrecisionExhausted("valuation of zero-at-precision element".into()))
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn rel_prec(&self) -> u32 {
        self.prec
    }

    pub fn abs_prec(&self) -> i64 {
        self.val + self.prec as i64
    }

    /// Residue of the unit part in `F_p`.
    pub fn residue_unit(&self) -> u64 {
        self.unit % self.p
    }

    /// Integer representative modulo `p^k` for an element of `o_F`.
    pub fn to_int_mod(&self, k: u32) -> PadicResult<u64> {
        if k == 0 {
            return Ok(0);
        }
        if self.abs_prec() < k as i64 {
            return Err(PadicError::PrecisionExhausted(format!(
                "need {k} digits, have {}",
                self.abs_prec()
            )));
        }
        if self.is_zero() || self.val >= k as i64 {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(PadicError::PrecisionExhausted("element is not integral".into()));
        }
        let m = pow_p(self.p, k);
        Ok(mul_mod(pow_p(self.p, self.val as u32), self.unit % m, m))
    }

    /// Drops digits beyond absolute precision `a`.
    pub fn truncate(&self, a: i64) -> Self {
        if a >= self.abs_prec() {
            return *self;
        }
        if self.is_zero() || a <= self.val {
            return Self::zero(self.p, a.min(self.abs_prec()));
        }
        let prec = (a - self.val) as u32;
        PadicElem {
            p: self.p,
            val: self.val,
            unit: self.unit % pow_p(self.p, prec),
            prec,
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let m = pow_p(self.p, self.prec);
        PadicElem {
            unit: (m - self.unit) % m,
            ..*self
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let a = self.abs_prec().min(o.abs_prec());
        let x = self.truncate(a);
        let y = o.truncate(a);
        if x.is_zero() {
            return y;
        }
        if y.is_zero() {
            return x;
        }
        let m = x.val.min(y.val);
        let width = (a - m) as u32;
        let md = pow_p(self.p, width);
        let sx = mul_mod(x.unit, pow_p(self.p, (x.val - m) as u32), md);
        let sy = mul_mod(y.unit, pow_p(self.p, (y.val - m) as u32), md);
        Self::new(self.p, m, ((sx + sy) % md) as i128, width)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        match (self.is_zero(), o.is_zero()) {
            (true, true) => Self::zero(self.p, self.val + o.val),
            (true, false) => Self::zero(self.p, self.val + o.val),
            (false, true) => Self::zero(self.p, self.val + o.val),
            (false, false) => {
                let prec = self.prec.min(o.prec);
                let m = pow_p(self.p, prec);
                PadicElem {
                    p: self.p,
                    val: self.val + o.val,
                    unit: mul_mod(self.unit % m, o.unit % m, m),
                    prec,
                }
            }
        }
    }

    pub fn inv(&self) -> PadicResult<Self> {
        if self.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let m = pow_p(self.p, self.prec);
        let u = inv_mod(self.unit, m).expect("unit is invertible");
        Ok(PadicElem {
            p: self.p,
            val: -self.val,
            unit: u,
            prec: self.prec,
        })
    }

    pub fn div(&self, o: &Self) -> PadicResult<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let one = PadicElem::new(self.p, 0, 1, self.prec.max(1));
        (0..e).fold(one, |acc, _| acc.mul(self))
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        PadicElem {
            val: self.val + k,
            ..*self
        }
    }

    /// Legendre symbol of the leading unit.
    pub fn unit_legendre(&self) -> PadicResult<i32> {
        if self.is_zero() {
            return Err(PadicError::PrecisionExhausted("legendre of zero".into()));
        }
        Ok(legendre_mod_p(self.residue_unit() as i64, self.p))
    }

    /// Square class `(val mod 2, legendre(unit))`.
    pub fn square_class(&self) -> PadicResult<(u8, i32)> {
        let v = self.val()?;
        Ok((v.rem_euclid(2) as u8, self.unit_legendre()?))
    }

    /// Equality of the known digits at the common absolute precision.
    pub fn congruent(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Base-`p` digits of the unit part, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let mut u = self.unit;
        (0..self.prec)
            .map(|_| {
                let d = u % self.p;
                u /= self.p;
                d
            })
            .collect()
    }
}

impl fmt::Display for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        if self.val == 0 {
            write!(f, "{} + O({}^{})", self.unit, self.p, self.abs_prec())
        } else {
            write!(f, "{}^{}*{} + O({}^{})", self.p, self.val, self.unit, self.p, self.abs_prec())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PadicJson {
    p: u64,
    val: i64,
    unit_digits: Vec<u64>,
}

impl Serialize for PadicElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PadicJson {
            p: self.p,
            val: self.val,
            unit_digits: self.unit_digits(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PadicJson::deserialize(d)?;
        if !is_odd_prime(j.p) {
            return Err(serde::de::Error::custom("p must be an odd prime"));
        }
        if j.unit_digits.iter().any(|&x| x >= j.p) {
            return Err(serde::de::Error::custom("digit out of range"));
        }
        let mut u: i128 = 0;
        for &dgt in j.unit_digits.iter().rev() {
            u = u * j.p as i128 + dgt as i128;
        }
        Ok(PadicElem::new(j.p, j.val, u, j.unit_digits.len() as u32))
    }
}

/// Square root by Hensel lifting; `None` when `x` is not a square.
pub fn sqrt_hensel(x: &PadicElem) -> PadicResult<Option<PadicElem>> {
    let v = x.val()?;
    if v % 2 != 0 || x.unit_legendre()? != 1 {
        return Ok(None);
    }
    let p = x.p;
    let mut r = (1..p).find(|r| (r * r) % p == x.residue_unit()).expect("residue root");
    let mut k = 1u32;
    while k < x.prec {
        k = (2 * k).min(x.prec);
        let m = pow_p(p, k);
        let u = x.unit % m;
        // r <- r - (r^2 - u) / (2 r)
        let f = (mul_mod(r, r, m) + m - u) % m;
        let d = inv_mod(mul_mod(2, r, m), m).expect("2r is a unit");
        r = (r + m - mul_mod(f, d, m)) % m;
    }
    Ok(Some(PadicElem::new(p, v / 2, r as i128, x.prec)))
}

/// Configuration of the base field `Q_p` and the quadratic extension `E = F(sqrt(zeta))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u64,
    pub precision: u32,
    /// Integer representative of `zeta`; valuation 0 or 1.
    pub zeta: i64,
    pub ram: bool,
}

impl FieldConfig {
    pub fn new(p: u64, zeta: i64, precision: u32) -> PadicResult<Self> {
        if !is_odd_prime(p) {
            return Err(PadicError::InvalidConfig(format!("p = {p} is not an odd prime")));
        }
        if precision == 0 {
            return Err(PadicError::InvalidConfig("precision must be positive".into()));
        }
        if p.checked_pow(precision + 2).is_none_or(|m| m >= 1u64 << 62) {
            return Err(PadicError::InvalidConfig(format!("p^{precision} is too large")));
        }
        if zeta == 0 {
            return Err(PadicError::InvalidConfig("zeta must be nonzero".into()));
        }
        let (v, u) = split_p(zeta as i128, p);
        if v > 1 {
            return Err(PadicError::InvalidConfig("zeta must have valuation 0 or 1".into()));
        }
        if v == 0 && legendre_mod_p(u as i64, p) == 1 {
            return Err(PadicError::InvalidConfig(format!("zeta = {zeta} is a square in Q_{p}")));
        }
        Ok(FieldConfig {
            p,
            precision,
            zeta,
            ram: v == 1,
        })
    }

    /// Smallest positive quadratic nonresidue modulo `p`.
    pub fn nonresidue(&self) -> u64 {
        smallest_nonresidue(self.p)
    }

    /// Representatives of the three quadratic extensions: `u`, `p`, `u p` with `u` the least nonresidue.
    pub fn all_extensions(p: u64, precision: u32) -> PadicResult<Vec<FieldConfig>> {
        let u = smallest_nonresidue(p) as i64;
        [u, p as i64, u * p as i64]
            .into_iter()
            .map(|z| FieldConfig::new(p, z, precision))
            .collect()
    }

    pub fn v_zeta(&self) -> i64 {
        self.ram as i64
    }

    /// The unit part of `zeta`.
    pub fn zeta_unit(&self) -> i64 {
        if self.ram {
            self.zeta / self.p as i64
        } else {
            self.zeta
        }
    }

    /// Ramification index of `E/F`.
    pub fn e(&self) -> u32 {
        if self.ram {
            2
        } else {
            1
        }
    }

    /// Residue field cardinality of `E`.
    pub fn q_e(&self) -> u64 {
        if self.ram {
            self.p
        } else {
            self.p * self.p
        }
    }

    pub fn elem(&self, x: i128) -> PadicElem {
        PadicElem::from_int(self.p, x, self.precision)
    }

    pub fn zeta_elem(&self) -> PadicElem {
        self.elem(self.zeta as i128)
    }

    /// `a + b delta` from integers.
    pub fn ext(&self, a: i128, b: i128) -> QuadExtElem {
        QuadExtElem::new(self.elem(a), self.elem(b))
    }

    pub fn delta(&self) -> QuadExtElem {
        self.ext(0, 1)
    }

    pub fn from_base(&self, a: &PadicElem) -> QuadExtElem {
        QuadExtElem::new(*a, PadicElem::zero(self.p, a.abs_prec().max(self.precision as i64)))
    }

    /// The uniformizer of `E`: `delta` when ramified, `p` otherwise.
    pub fn uniformizer(&self) -> QuadExtElem {
        if self.ram {
            self.delta()
        } else {
            self.ext(self.p as i128, 0)
        }
    }

    pub fn add(&self, x: &QuadExtElem, y: &QuadExtElem) -> QuadExtElem {
        QuadExtElem::new(x.a.add(&y.a), x.b.add(&y.b))
    }

    pub fn sub(&self, x: &QuadExtElem, y: &QuadExtElem) -> QuadExtElem {
        QuadExtElem::new(x.a.sub(&y.a), x.b.sub(&y.b))
    }

    pub fn mul(&self, x: &QuadExtElem, y: &QuadExtElem) -> QuadExtElem {
        let z = self.zeta_elem();
        let a = x.a.mul(&y.a).add(&z.mul(&x.b.mul(&y.b)));
        let b = x.a.mul(&y.b).add(&x.b.mul(&y.a));
        QuadExtElem::new(a, b)
    }

    pub fn scale(&self, c: &PadicElem, x: &QuadExtElem) -> QuadExtElem {
        QuadExtElem::new(c.mul(&x.a), c.mul(&x.b))
    }

    pub fn conj(&self, x: &QuadExtElem) -> QuadExtElem {
        QuadExtElem::new(x.a, x.b.neg())
    }

    pub fn norm(&self, x: &QuadExtElem) -> PadicElem {
        x.a.mul(&x.a).sub(&self.zeta_elem().mul(&x.b.mul(&x.b)))
    }

    pub fn trace(&self, x: &QuadExtElem) -> PadicElem {
        x.a.add(&x.a)
    }

    pub fn inv(&self, x: &QuadExtElem) -> PadicResult<QuadExtElem> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let ni = n.inv()?;
        Ok(self.scale(&ni, &self.conj(x)))
    }

    pub fn div(&self, x: &QuadExtElem, y: &QuadExtElem) -> PadicResult<QuadExtElem> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &QuadExtElem, e: i64) -> PadicResult<QuadExtElem> {
        let base = if e < 0 { self.inv(x)? } else { *x };
        let mut acc = self.ext(1, 0);
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Ok(acc)
    }

    /// Normalized valuation `v_E` (so `v_E(uniformizer) = 1`).
    pub fn v_e(&self, x: &QuadExtElem) -> PadicResult<i64> {
        if self.ram {
            self.norm(x).val()
        } else {
            match (x.a.valuation(), x.b.valuation()) {
                (None, None) => Err(PadicError::PrecisionExhausted("v_E of zero".into())),
                (Some(a), None) if a < x.b.abs_prec() => Ok(a),
                (None, Some(b)) if b < x.a.abs_prec() => Ok(b),
                (Some(a), Some(b)) => Ok(a.min(b)),
                _ => Err(PadicError::PrecisionExhausted("v_E not certified".into())),
            }
        }
    }

    /// `|w|` normalized by `q_E`: `q_E^{-v_E(w)}`.
    pub fn abs_e_normalized(&self, x: &QuadExtElem) -> PadicResult<CycloValue> {
        let v = self.v_e(x)?;
        let q = self.q_e() as i128;
        let r = if v >= 0 {
            num_rational::Ratio::new(1, q.pow(v as u32))
        } else {
            num_rational::Ratio::from_integer(q.pow((-v) as u32))
        };
        Ok(CycloValue::from_rational(r))
    }

    /// The extension of `|.|_F` to `E`: `|N(w)|_F^{1/2}`.
    pub fn abs_e_extended(&self, x: &QuadExtElem) -> PadicResult<CycloValue> {
        let v = self.norm(x).val()?;
        Ok(CycloValue::one().times_sqrtq(self.p, -(v as i32)))
    }

    pub fn is_regular(&self, x: &QuadExtElem) -> bool {
        !x.b.is_zero()
    }

    pub fn ext_arith(&self, w1: &QuadExtElem, w2: &QuadExtElem, op: ExtOp) -> PadicResult<ExtValue> {
        Ok(match op {
            ExtOp::Add => ExtValue::Ext(self.add(w1, w2)),
            ExtOp::Mul => ExtValue::Ext(self.mul(w1, w2)),
            ExtOp::Div => ExtValue::Ext(self.div(w1, w2)?),
            ExtOp::Conj => ExtValue::Ext(self.conj(w1)),
            ExtOp::Norm => ExtValue::Base(self.norm(w1)),
            ExtOp::Trace => ExtValue::Base(self.trace(w1)),
        })
    }

    /// Whether `x` is a norm from `E`, by comparing its square class with
    /// the classes of `a^2 - zeta b^2` over small integers `a, b`.
    pub fn is_norm(&self, x: &PadicElem) -> PadicResult<bool> {
        let cls = x.square_class()?;
        Ok(self.norm_square_classes().contains(&cls))
    }

    /// Square classes `(val mod 2, legendre)` met by norms, found by search.
    pub fn norm_square_classes(&self) -> Vec<(u8, i32)> {
        let p = self.p as i128;
        let bound = p * p;
        let mut out: Vec<(u8, i32)> = Vec::new();
        for a in 0..bound {
            for b in 0..bound {
                let n = a * a - self.zeta as i128 * b * b;
                if n == 0 {
                    continue;
                }
                let (v, u) = split_p(n, self.p);
                let c = ((v % 2) as u8, legendre_mod_p((u % p) as i64, self.p));
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out.sort();
        out
    }
}

/// Smallest positive quadratic nonresidue modulo an odd prime.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&u| legendre_mod_p(u as i64, p) == -1).expect("odd prime has nonresidues")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtOp {
    Add,
    Mul,
    Div,
    Conj,
    Norm,
    Trace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtValue {
    Ext(QuadExtElem),
    Base(PadicElem),
}

/// `a + b delta` with `delta^2 = zeta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadExtElem {
    pub a: PadicElem,
    pub b: PadicElem,
}

impl QuadExtElem {
    pub fn new(a: PadicElem, b: PadicElem) -> Self {
        QuadExtElem { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn congruent(&self, o: &Self) -> bool {
        self.a.congruent(&o.a) && self.b.congruent(&o.b)
    }
}

impl fmt::Display for QuadExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*d", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_basics() {
        let x = PadicElem::from_int(3, 18, 6);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.unit(), 2);
        let y = PadicElem::from_int(3, -18, 6);
        assert!(x.add(&y).is_zero());
        let z = x.mul(&x.inv().unwrap());
        assert!(z.congruent(&PadicElem::from_int(3, 1, 4)));
    }

    #[test]
    fn cancellation_loses_precision() {
        let x = PadicElem::from_int(5, 1, 4);
        let y = PadicElem::from_int(5, 1 + 125, 4);
        let d = y.sub(&x);
        assert_eq!(d.valuation(), Some(3));
        assert_eq!(d.rel_prec(), 1);
    }

    #[test]
    fn norm_of_delta() {
        let cfg = FieldConfig::new(3, 2, 5).unwrap();
        let n = cfg.norm(&cfg.delta());
        assert!(n.congruent(&cfg.elem(-2)));
        let n = cfg.norm(&cfg.ext(1, 1));
        assert!(n.congruent(&cfg.elem(-1)));
    }

    #[test]
    fn conj_fixes_base() {
        let cfg = FieldConfig::new(5, 5, 5).unwrap();
        let w = cfg.ext(7, 0);
        assert!(cfg.conj(&w).congruent(&w));
    }

    #[test]
    fn hensel_roots() {
        let x = PadicElem::from_int(7, 2, 6);
        let r = sqrt_hensel(&x).unwrap().unwrap();
        assert!(r.mul(&r).congruent(&x));
        assert!(r.residue_unit() == 3 || r.residue_unit() == 4);
        assert!(sqrt_hensel(&PadicElem::from_int(7, 7, 6)).unwrap().is_none());
        assert!(sqrt_hensel(&PadicElem::from_int(7, 3, 6)).unwrap().is_none());
        let y = PadicElem::from_int(5, 1 + 5 * 3, 6);
        let r = sqrt_hensel(&y).unwrap().unwrap();
        assert!(r.mul(&r).congruent(&y));
    }

    #[test]
    fn norm_membership() {
        let unr = FieldConfig::new(3, 2, 5).unwrap();
        assert!(!unr.is_norm(&unr.elem(3)).unwrap());
        assert!(unr.is_norm(&unr.elem(2)).unwrap());
        let ram = FieldConfig::new(3, 3, 5).unwrap();
        assert!(ram.is_norm(&ram.elem(-3)).unwrap());
        assert_eq!(ram.norm_square_classes().len(), 2);
    }

    #[test]
    fn config_validation() {
        assert!(FieldConfig::new(3, 1, 4).is_err());
        assert!(FieldConfig::new(4, 3, 4).is_err());
        assert!(FieldConfig::new(3, 9, 4).is_err());
        assert!(FieldConfig::new(5, 10, 4).unwrap().ram);
    }

    #[test]
    fn valuations_on_e() {
        let ram = FieldConfig::new(3, 3, 6).unwrap();
        assert_eq!(ram.v_e(&ram.delta()).unwrap(), 1);
        assert_eq!(ram.v_e(&ram.ext(3, 0)).unwrap(), 2);
        let unr = FieldConfig::new(3, 2, 6).unwrap();
        assert_eq!(unr.v_e(&unr.ext(9, 3)).unwrap(), 1);
    }

    #[test]
    fn json_digits() {
        let x = PadicElem::from_int(3, 2 * 27 + 1 + 9, 4);
        let s = serde_json::to_string(&x).unwrap();
        let back: PadicElem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
