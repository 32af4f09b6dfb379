//! Exact values: finite sums of roots of unity with rational coefficients,
//! optionally carrying a formal factor `q^{k/2}`.
//!
//! Every character value and local constant in the crate lives in this ring.
//! Values are kept in canonical form: all exponents are brought to the level
//! `N = lcm(denominators)` and reduced modulo the `N`-th cyclotomic polynomial,
//! so a value is zero exactly when its term map is empty.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Rational coefficients.
pub type Rat = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("cannot add values carrying different powers of sqrt(q) ({0} vs {1})")]
    MixedScale(String, String),
}

/// `e^{2 pi i num/den}` with `0 <= num < den` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    /// Reduces `num/den` modulo 1 and to lowest terms.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let d = den as i128;
        let n = (num as i128).rem_euclid(d);
        let g = n.gcd(&d);
        let (n, d) = if g == 0 { (0, 1) } else { (n / g, d / g) };
        RootOfUnity {
            num: n as u64,
            den: d as u64,
        }
    }

    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn minus_one() -> Self {
        RootOfUnity { num: 1, den: 2 }
    }

    /// The square root of -1 with positive imaginary part.
    pub fn i() -> Self {
        RootOfUnity { num: 1, den: 4 }
    }

    /// `+1` or `-1`.
    pub fn from_sign(s: i32) -> Self {
        if s >= 0 {
            Self::one()
        } else {
            Self::minus_one()
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    /// `Some(+1)` / `Some(-1)` for real roots, `None` otherwise.
    pub fn as_sign(&self) -> Option<i32> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn inv(self) -> Self {
        RootOfUnity::new(-(self.num as i64), self.den)
    }

    pub fn pow(self, e: i64) -> Self {
        let d = self.den as i128;
        let n = ((self.num as i128) * (e as i128)).rem_euclid(d);
        RootOfUnity::new(n as i64, self.den)
    }

    /// The conjugate root `e^{-2 pi i num/den}`.
    pub fn conj(self) -> Self {
        self.inv()
    }

    pub fn to_complex(self) -> (f64, f64) {
        let t = 2.0 * std::f64::consts::PI * (self.num as f64) / (self.den as f64);
        (t.cos(), t.sin())
    }
}

impl Mul for RootOfUnity {
    type Output = RootOfUnity;
    fn mul(self, o: RootOfUnity) -> RootOfUnity {
        let l = self.den.lcm(&o.den);
        let a = self.num * (l / self.den) + o.num * (l / o.den);
        RootOfUnity::new((a % l) as i64, l)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, d) => write!(f, "E({d})"),
            (n, d) => write!(f, "E({d})^{n}"),
        }
    }
}

/// Exact element of `Q(mu_infinity)[sqrt(q)]`.
#[derive(Clone, Debug)]
pub struct CycloValue {
    terms: BTreeMap<RootOfUnity, Rat>,
    /// Either 0 or 1 once normalized; the value is multiplied by `q^{sqrtq_power/2}`.
    sqrtq_power: i32,
    /// The residue cardinality behind the formal square root; 0 when `sqrtq_power == 0`.
    q: u64,
}

impl CycloValue {
    pub fn zero() -> Self {
        CycloValue {
            terms: BTreeMap::new(),
            sqrtq_power: 0,
            q: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_root(RootOfUnity::one())
    }

    pub fn from_root(r: RootOfUnity) -> Self {
        Self::from_terms([(r, Rat::one())])
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rat::from_integer(n as i128))
    }

    pub fn from_rational(c: Rat) -> Self {
        Self::from_terms([(RootOfUnity::one(), c)])
    }

    /// `+1` or `-1`.
    pub fn sign(s: i32) -> Self {
        Self::from_int(if s >= 0 { 1 } else { -1 })
    }

    /// The formal `q^{1/2}`.
    pub fn sqrt_q(q: u64) -> Self {
        Self::one().times_sqrtq(q, 1)
    }

    /// Builds a canonical value from arbitrary (root, coefficient) pairs.
    pub fn from_terms<I: IntoIterator<Item = (RootOfUnity, Rat)>>(it: I) -> Self {
        let mut raw: BTreeMap<RootOfUnity, Rat> = BTreeMap::new();
        for (r, c) in it {
            *raw.entry(r).or_insert_with(Rat::zero) += c;
        }
        CycloValue {
            terms: canonicalize(raw),
            sqrtq_power: 0,
            q: 0,
        }
    }

    /// Multiplies by `q^{k/2}`; even powers fold into the coefficients.
    pub fn times_sqrtq(mut self, q: u64, k: i32) -> Self {
        if self.is_zero() || k == 0 {
            return self;
        }
        if self.sqrtq_power != 0 {
            assert_eq!(self.q, q, "formal square roots of different q");
        }
        let total = self.sqrtq_power + k;
        let half = total.div_euclid(2);
        let rem = total.rem_euclid(2);
        if half != 0 {
            let f = if half > 0 {
                Rat::from_integer((q as i128).pow(half as u32))
            } else {
                Rat::new(1, (q as i128).pow((-half) as u32))
            };
            for c in self.terms.values_mut() {
                *c *= f;
            }
        }
        self.sqrtq_power = rem;
        self.q = if rem == 0 { 0 } else { q };
        self
    }

    pub fn terms(&self) -> &BTreeMap<RootOfUnity, Rat> {
        &self.terms
    }

    pub fn sqrtq_power(&self) -> i32 {
        self.sqrtq_power
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Cyclotomic level of the canonical form.
    pub fn level(&self) -> u64 {
        self.terms.keys().fold(1u64, |l, r| l.lcm(&r.den))
    }

    /// `Some(r)` when the value is a root of unity (and carries no sqrt(q)).
    pub fn as_root(&self) -> Option<RootOfUnity> {
        if self.sqrtq_power != 0 || self.is_zero() {
            return None;
        }
        if self.terms.len() == 1 {
            let (r, c) = self.terms.iter().next()?;
            if c.is_one() {
                return Some(*r);
            }
            if *c == -Rat::one() {
                return Some(*r * RootOfUnity::minus_one());
            }
        }
        // roots of unity in Q(E(N)) have order dividing lcm(2, N)
        let l = self.level().lcm(&2);
        (0..l)
            .map(|k| RootOfUnity::new(k as i64, l))
            .find(|r| cyclo_eq(self, &CycloValue::from_root(*r)))
    }

    /// `Some(c)` when the value is rational.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.sqrtq_power != 0 {
            return None;
        }
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (r, c) = self.terms.iter().next()?;
                r.is_one().then_some(*c)
            }
            _ => None,
        }
    }

    pub fn checked_add(&self, o: &CycloValue) -> Result<CycloValue, ExactError> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.sqrtq_power != o.sqrtq_power || self.q != o.q {
            return Err(ExactError::MixedScale(self.scale_label(), o.scale_label()));
        }
        let mut raw = self.terms.clone();
        for (r, c) in &o.terms {
            *raw.entry(*r).or_insert_with(Rat::zero) += *c;
        }
        let terms = canonicalize(raw);
        let (p, q) = if terms.is_empty() {
            (0, 0)
        } else {
            (self.sqrtq_power, self.q)
        };
        Ok(CycloValue {
            terms,
            sqrtq_power: p,
            q,
        })
    }

    fn scale_label(&self) -> String {
        if self.sqrtq_power == 0 {
            "1".into()
        } else {
            format!("sqrt({})", self.q)
        }
    }

    pub fn mul_value(&self, o: &CycloValue) -> CycloValue {
        if self.is_zero() || o.is_zero() {
            return CycloValue::zero();
        }
        let mut raw: BTreeMap<RootOfUnity, Rat> = BTreeMap::new();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &o.terms {
                *raw.entry(*r1 * *r2).or_insert_with(Rat::zero) += *c1 * *c2;
            }
        }
        let v = CycloValue {
            terms: canonicalize(raw),
            sqrtq_power: 0,
            q: 0,
        };
        let q = if self.q != 0 { self.q } else { o.q };
        if self.q != 0 && o.q != 0 {
            assert_eq!(self.q, o.q, "formal square roots of different q");
        }
        v.times_sqrtq(q, self.sqrtq_power + o.sqrtq_power)
    }

    pub fn scale(&self, c: Rat) -> CycloValue {
        if c.is_zero() {
            return CycloValue::zero();
        }
        let mut v = self.clone();
        for x in v.terms.values_mut() {
            *x *= c;
        }
        v
    }

    pub fn mul_root(&self, r: RootOfUnity) -> CycloValue {
        self.mul_value(&CycloValue::from_root(r))
    }

    /// Complex conjugation (the formal sqrt(q) is real).
    pub fn conj(&self) -> CycloValue {
        let mut v = CycloValue::from_terms(self.terms.iter().map(|(r, c)| (r.conj(), *c)));
        if self.sqrtq_power != 0 {
            v = v.times_sqrtq(self.q, self.sqrtq_power);
        }
        v
    }

    pub fn pow(&self, e: u32) -> CycloValue {
        let mut acc = CycloValue::one();
        for _ in 0..e {
            acc = acc.mul_value(self);
        }
        acc
    }

    /// Floating-point image under `E(n) -> exp(2 pi i / n)`; for display and sign decisions only.
    pub fn to_complex(&self) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for (r, c) in &self.terms {
            let cf = (*c.numer() as f64) / (*c.denom() as f64);
            let (x, y) = r.to_complex();
            re += cf * x;
            im += cf * y;
        }
        let s = (self.q as f64).powf(self.sqrtq_power as f64 / 2.0);
        if self.sqrtq_power != 0 {
            (re * s, im * s)
        } else {
            (re, im)
        }
    }
}

/// Exact sum.
pub fn cyclo_add(a: &CycloValue, b: &CycloValue) -> Result<CycloValue, ExactError> {
    a.checked_add(b)
}

/// Exact product; formal square-root powers add.
pub fn cyclo_mul(a: &CycloValue, b: &CycloValue) -> CycloValue {
    a.mul_value(b)
}

/// Exact equality: `a - b` canonicalizes to zero and the formal scales agree.
pub fn cyclo_eq(a: &CycloValue, b: &CycloValue) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    if a.sqrtq_power != b.sqrtq_power || a.q != b.q {
        return false;
    }
    match a.checked_add(&b.neg_ref()) {
        Ok(d) => d.is_zero(),
        Err(_) => false,
    }
}

impl CycloValue {
    fn neg_ref(&self) -> CycloValue {
        self.scale(-Rat::one())
    }
}

impl PartialEq for CycloValue {
    fn eq(&self, o: &Self) -> bool {
        cyclo_eq(self, o)
    }
}

impl Eq for CycloValue {}

impl From<RootOfUnity> for CycloValue {
    fn from(r: RootOfUnity) -> Self {
        CycloValue::from_root(r)
    }
}

/// # Panics
/// When the operands carry different formal powers of sqrt(q); use
/// [`cyclo_add`] for a fallible sum.
impl Add for CycloValue {
    type Output = CycloValue;
    fn add(self, o: CycloValue) -> CycloValue {
        self.checked_add(&o).expect("mixed sqrt(q) scales")
    }
}

impl<'a> Add<&'a CycloValue> for &'a CycloValue {
    type Output = CycloValue;
    fn add(self, o: &CycloValue) -> CycloValue {
        self.checked_add(o).expect("mixed sqrt(q) scales")
    }
}

impl Sub for CycloValue {
    type Output = CycloValue;
    fn sub(self, o: CycloValue) -> CycloValue {
        -o + self
    }
}

impl Neg for CycloValue {
    type Output = CycloValue;
    fn neg(self) -> CycloValue {
        self.neg_ref()
    }
}

impl Mul for CycloValue {
    type Output = CycloValue;
    fn mul(self, o: CycloValue) -> CycloValue {
        self.mul_value(&o)
    }
}

impl<'a> Mul<&'a CycloValue> for &'a CycloValue {
    type Output = CycloValue;
    fn mul(self, o: &CycloValue) -> CycloValue {
        self.mul_value(o)
    }
}

impl fmt::Display for CycloValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match (r.is_one(), a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{}", RootPow(*r))?,
                (false, false) => write!(f, "{a}*{}", RootPow(*r))?,
            }
        }
        if self.sqrtq_power != 0 {
            write!(f, " [*sqrt({})]", self.q)?;
        }
        Ok(())
    }
}

/// Displays `E(n)^k` without the `-1` shortcut used by `RootOfUnity`.
struct RootPow(RootOfUnity);

impl fmt::Display for RootPow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.num == 1 {
            write!(f, "E({})", self.0.den)
        } else {
            write!(f, "E({})^{}", self.0.den, self.0.num)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    num: i128,
    den: i128,
    exp_num: u64,
    exp_den: u64,
}

#[derive(Serialize, Deserialize)]
struct CycloJson {
    terms: Vec<TermJson>,
    sqrtq_power: i32,
    #[serde(default, skip_serializing_if = "is_zero_u64")]
    q: u64,
}

fn is_zero_u64(x: &u64) -> bool {
    *x == 0
}

impl Serialize for CycloValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycloJson {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| TermJson {
                    num: *c.numer(),
                    den: *c.denom(),
                    exp_num: r.num,
                    exp_den: r.den,
                })
                .collect(),
            sqrtq_power: self.sqrtq_power,
            q: self.q,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CycloJson::deserialize(d)?;
        if j.terms.iter().any(|t| t.den == 0 || t.exp_den == 0) {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        if j.sqrtq_power != 0 && j.q == 0 {
            return Err(serde::de::Error::custom("sqrtq_power without q"));
        }
        let v = CycloValue::from_terms(j.terms.into_iter().map(|t| {
            (
                RootOfUnity::new(t.exp_num as i64, t.exp_den),
                Rat::new(t.num, t.den),
            )
        }));
        Ok(v.times_sqrtq(j.q, j.sqrtq_power))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.num, self.den].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [n, den] = <[u64; 2]>::deserialize(d)?;
        if den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(RootOfUnity::new(n as i64, den))
    }
}

// ---- canonical form ----

fn canonicalize(raw: BTreeMap<RootOfUnity, Rat>) -> BTreeMap<RootOfUnity, Rat> {
    let raw: Vec<(RootOfUnity, Rat)> = raw.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    if raw.is_empty() {
        return BTreeMap::new();
    }
    let n = raw.iter().fold(1u64, |l, (r, _)| l.lcm(&r.den));
    let table = reduction_table(n);
    let phi = table.phi;
    let mut dense = vec![Rat::zero(); phi];
    for (r, c) in raw {
        let k = (r.num * (n / r.den)) as usize;
        if k < phi {
            dense[k] += c;
        } else {
            for (j, &e) in table.rows[k - phi].iter().enumerate() {
                if e != 0 {
                    dense[j] += c * Rat::from_integer(e as i128);
                }
            }
        }
    }
    dense
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (RootOfUnity::new(k as i64, n), c))
        .collect()
}

struct ReductionTable {
    phi: usize,
    /// `rows[k - phi]` holds the coefficients of `x^k mod Phi_n`.
    rows: Vec<Vec<i64>>,
}

fn reduction_table(n: u64) -> Arc<ReductionTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<ReductionTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache poisoned").get(&n) {
        return t.clone();
    }
    let t = Arc::new(build_table(n));
    cache
        .lock()
        .expect("cache poisoned")
        .entry(n)
        .or_insert(t)
        .clone()
}

fn build_table(n: u64) -> ReductionTable {
    let phi_poly = cyclotomic_poly(n);
    let phi = phi_poly.len() - 1;
    let mut rows = Vec::with_capacity(n as usize - phi);
    // x^phi = -(Phi_n - x^phi)
    let mut cur: Vec<i64> = phi_poly[..phi].iter().map(|c| -c).collect();
    for _ in phi..n as usize {
        rows.push(cur.clone());
        // multiply by x and reduce the overflow coefficient
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
        if top != 0 {
            for j in 0..phi {
                next[j] = next[j]
                    .checked_sub(top * phi_poly[j])
                    .expect("cyclotomic reduction overflow");
            }
        }
        cur = next;
    }
    ReductionTable { phi, rows }
}

/// Coefficients (low degree first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut poly = vec![1i64];
    for &d in &divisors {
        if mobius(n / d) == 1 {
            // multiply by x^d - 1
            let mut out = vec![0i64; poly.len() + d as usize];
            for (i, &c) in poly.iter().enumerate() {
                out[i] -= c;
                out[i + d as usize] += c;
            }
            poly = out;
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            // exact division by x^d - 1: P_i = Q_{i-d} - Q_i
            let d = d as usize;
            let deg_q = poly.len() - 1 - d;
            let mut q = vec![0i64; deg_q + 1];
            for i in 0..=deg_q {
                let prev = if i >= d { q[i - d] } else { 0 };
                q[i] = prev - poly[i];
            }
            poly = q;
        }
    }
    poly
}

fn mobius(mut n: u64) -> i32 {
    let mut m = 1;
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            n /= f;
            if n.is_multiple_of(f) {
                return 0;
            }
            m = -m;
        }
        f += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

// ---- opaque positive scales ----

/// Positive real normalization constants that are tracked symbolically only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OpaqueTag {
    /// Formal degree of the supercuspidal representation.
    DegPi,
    /// Degree of the finite-group representation inflated at depth zero.
    DegSigma,
    /// `c_psi` of the ambient Lie algebra.
    CPsiG,
    /// `c_psi` of the torus Lie algebra.
    CPsiGPrime,
    /// `|eta(alpha)|^{-1/2}`.
    EtaAlphaInvSqrt,
}

/// A product of opaque tags with integer multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpaqueScale {
    tags: BTreeMap<OpaqueTag, i32>,
}

impl OpaqueScale {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn from_tags(tags: &[(OpaqueTag, i32)]) -> Self {
        let mut s = Self::default();
        for &(t, m) in tags {
            s = s.times(t, m);
        }
        s
    }

    pub fn times(mut self, t: OpaqueTag, m: i32) -> Self {
        let e = self.tags.entry(t).or_insert(0);
        *e += m;
        if *e == 0 {
            self.tags.remove(&t);
        }
        self
    }

    pub fn mul(&self, o: &OpaqueScale) -> OpaqueScale {
        o.tags
            .iter()
            .fold(self.clone(), |acc, (t, m)| acc.times(*t, *m))
    }

    pub fn tags(&self) -> &BTreeMap<OpaqueTag, i32> {
        &self.tags
    }
}

impl fmt::Display for OpaqueScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tags.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .tags
            .iter()
            .map(|(t, m)| {
                let name = match t {
                    OpaqueTag::DegPi => "deg(pi)",
                    OpaqueTag::DegSigma => "deg(sigma)",
                    OpaqueTag::CPsiG => "c_psi(g)",
                    OpaqueTag::CPsiGPrime => "c_psi(g')",
                    OpaqueTag::EtaAlphaInvSqrt => "|eta(alpha)|^(-1/2)",
                };
                if *m == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A character-formula value split into an exact part and an opaque positive scale.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedKernel {
    pub value: CycloValue,
    pub scale: OpaqueScale,
}

impl ReducedKernel {
    pub fn new(value: CycloValue, scale: OpaqueScale) -> Self {
        ReducedKernel { value, scale }
    }
}

impl PartialEq for ReducedKernel {
    fn eq(&self, o: &Self) -> bool {
        self.scale == o.scale && cyclo_eq(&self.value, &o.value)
    }
}

impl fmt::Display for ReducedKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) * {}", self.value, self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64, k: i64) -> CycloValue {
        CycloValue::from_root(RootOfUnity::new(k, n))
    }

    #[test]
    fn cube_roots_sum_to_zero() {
        let s = z(3, 1) + z(3, 2) + CycloValue::one();
        assert!(s.is_zero());
    }

    #[test]
    fn zeta8_plus_inverse_squared_is_two() {
        let s = z(8, 1) + z(8, -1);
        assert_eq!(s.pow(2), CycloValue::from_int(2));
    }

    #[test]
    fn i_squared() {
        assert_eq!(z(4, 1) * z(4, 1), CycloValue::from_int(-1));
    }

    #[test]
    fn sqrt_q_squared_is_q() {
        let s = CycloValue::sqrt_q(7);
        let p = s.clone() * s;
        assert_eq!(p.sqrtq_power(), 0);
        assert_eq!(p, CycloValue::from_int(7));
    }

    #[test]
    fn gauss_sum_square_mod_three() {
        // sum over x in F_3^* of leg(x) E(3)^x = E(3) - E(3)^2
        let g = z(3, 1) - z(3, 2);
        assert_eq!(g.pow(2), CycloValue::from_int(-3));
    }

    #[test]
    fn zeta6_is_minus_zeta3_squared() {
        assert_eq!(z(6, 1), -z(3, 2));
        assert_ne!(CycloValue::one(), z(5, 1));
        assert_eq!(CycloValue::zero(), CycloValue::from_terms([]));
    }

    #[test]
    fn roots_are_recognized() {
        assert_eq!(CycloValue::from_int(-1).as_root(), Some(RootOfUnity::minus_one()));
        let r = RootOfUnity::new(7, 9);
        assert_eq!(CycloValue::from_root(r).as_root(), Some(r));
        assert_eq!(CycloValue::from_int(2).as_root(), None);
    }

    #[test]
    fn mixed_scale_is_rejected() {
        let a = CycloValue::sqrt_q(3);
        let b = CycloValue::one();
        assert!(matches!(cyclo_add(&a, &b), Err(ExactError::MixedScale(..))));
        assert_eq!(cyclo_add(&a, &CycloValue::zero()).unwrap(), a);
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() - 1, 48);
        assert!(p105.contains(&-2));
    }

    #[test]
    fn json_round_trip() {
        let v = (z(12, 5) + CycloValue::from_rational(Rat::new(3, 2))).times_sqrtq(5, 3);
        let s = serde_json::to_string(&v).unwrap();
        let back: CycloValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.sqrtq_power(), 1);
    }

    #[test]
    fn display_forms() {
        assert_eq!(CycloValue::zero().to_string(), "0");
        assert_eq!((z(3, 1) * CycloValue::from_int(2)).to_string(), "2*E(3)");
        assert_eq!(CycloValue::from_int(-1).to_string(), "-1");
    }

    #[test]
    fn reduced_kernel_needs_matching_tags() {
        let a = ReducedKernel::new(CycloValue::one(), OpaqueScale::from_tags(&[(OpaqueTag::DegPi, 1)]));
        let b = ReducedKernel::new(CycloValue::one(), OpaqueScale::unit());
        assert_ne!(a, b);
        assert_eq!(a.clone(), a);
    }
}
