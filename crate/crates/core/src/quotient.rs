//! Finite quotients of `E^*` and `F^*` on which characters are specified.
//!
//! `E^*/(<w^M> (1 + p_E^{n+1}))` is modelled as triples `(k mod M, a, b)` meaning
//! `w^k (a + b delta)` with the unit part reduced modulo `1 + p_E^{n+1}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::group::FiniteAbelian;
use crate::padic::{
    inv_mod, legendre_mod_p, mul_mod, pow_p, reduce_i, FieldConfig, PadicElem, PadicError, PadicResult,
    QuadExtElem,
};

/// Element of a finite unit quotient: `w^k (a + b delta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QElem {
    pub k: u32,
    pub a: u64,
    pub b: u64,
}

/// `E^*/(<w^M> (1 + p_E^{n+1}))` with generators, invariant factors and discrete logs.
#[derive(Clone, Debug)]
pub struct UnitQuotient {
    cfg: FieldConfig,
    level: u32,
    m: u32,
    a_prec: u32,
    b_prec: u32,
    a_mod: u64,
    b_mod: u64,
    group: FiniteAbelian<QElem>,
    /// `one_units[i - 1]` lists `1 + w^i beta` for the residue basis `beta`.
    one_units: Vec<Vec<QElem>>,
}

impl UnitQuotient {
    pub fn new(cfg: &FieldConfig, level: u32, m: u32) -> PadicResult<Self> {
        if m == 0 {
            return Err(PadicError::InvalidConfig("uniformizer order must be positive".into()));
        }
        if cfg.ram && m % 2 == 1 {
            return Err(PadicError::InvalidConfig(
                "uniformizer order must be even for ramified E (conjugation stability)".into(),
            ));
        }
        if cfg.precision < level + 2 {
            return Err(PadicError::PrecisionExhausted(format!(
                "level {level} needs precision >= {}, have {}",
                level + 2,
                cfg.precision
            )));
        }
        let (a_prec, b_prec) = if cfg.ram {
            ((level + 2) / 2, level.div_ceil(2))
        } else {
            (level + 1, level + 1)
        };
        let p = cfg.p;
        let mut q = UnitQuotient {
            cfg: cfg.clone(),
            level,
            m,
            a_prec,
            b_prec,
            a_mod: pow_p(p, a_prec),
            b_mod: pow_p(p, b_prec),
            group: FiniteAbelian::generate(QElem { k: 0, a: 1, b: 0 }, &[], |x, _| *x),
            one_units: Vec::new(),
        };
        let mut raw = vec![QElem { k: 1 % m, a: 1 % q.a_mod, b: 0 }];
        raw.push(q.residue_generator());
        for i in 1..=level {
            let mut row = Vec::new();
            for beta_is_delta in [false, true] {
                if beta_is_delta && cfg.ram {
                    continue;
                }
                row.push(q.one_plus_uniformizer_power(i, beta_is_delta));
            }
            raw.extend(row.iter().copied());
            q.one_units.push(row);
        }
        let qq = q.clone();
        q.group = FiniteAbelian::generate(q.identity(), &raw, |x, y| qq.op(x, y));
        let expected = (cfg.q_e() - 1) * cfg.q_e().pow(level) * m as u64;
        assert_eq!(q.group.order(), expected, "unit quotient order mismatch");
        Ok(q)
    }

    pub fn cfg(&self) -> &FieldConfig {
        &self.cfg
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn uniformizer_order(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn invariants(&self) -> &[u64] {
        self.group.invariants()
    }

    pub fn generators(&self) -> &[QElem] {
        self.group.generators()
    }

    pub fn generators_ext(&self) -> Vec<QuadExtElem> {
        self.generators().iter().map(|g| self.to_ext(g)).collect()
    }

    pub fn identity(&self) -> QElem {
        QElem {
            k: 0,
            a: 1 % self.a_mod,
            b: 0,
        }
    }

    pub fn uniformizer(&self) -> QElem {
        QElem {
            k: 1 % self.m,
            a: 1 % self.a_mod,
            b: 0,
        }
    }

    pub fn op(&self, x: &QElem, y: &QElem) -> QElem {
        let z = self.cfg.zeta as i128;
        let a = x.a as i128 * y.a as i128 + z * ((x.b as i128 * y.b as i128) % self.a_mod as i128);
        let b = x.a as i128 * y.b as i128 + x.b as i128 * y.a as i128;
        QElem {
            k: (x.k + y.k) % self.m,
            a: reduce_i(a, self.a_mod),
            b: reduce_i(b, self.b_mod),
        }
    }

    pub fn pow(&self, x: &QElem, e: u64) -> QElem {
        let mut acc = self.identity();
        let mut base = *x;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(&acc, &base);
            }
            base = self.op(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: &QElem) -> QElem {
        self.pow(x, self.order() - 1)
    }

    /// Galois conjugation `delta -> -delta`.
    pub fn conj(&self, x: &QElem) -> QElem {
        let (sa, sb) = if self.cfg.ram && x.k % 2 == 1 { (-1, 1) } else { (1, -1) };
        QElem {
            k: x.k,
            a: reduce_i(sa * x.a as i128, self.a_mod),
            b: reduce_i(sb * x.b as i128, self.b_mod),
        }
    }

    /// Class of `w` in the quotient.
    pub fn reduce(&self, w: &QuadExtElem) -> PadicResult<QElem> {
        let cfg = &self.cfg;
        let k = cfg.v_e(w)?;
        let (ua, ub) = if cfg.ram {
            let (a, b) = if k.rem_euclid(2) == 0 {
                (w.a, w.b)
            } else {
                // w delta = zeta b + a delta
                (cfg.zeta_elem().mul(&w.b), w.a)
            };
            let c = (k + k.rem_euclid(2)) / 2;
            let z = cfg.zeta_elem().pow(c.unsigned_abs() as u32);
            if c >= 0 {
                (a.div(&z)?, b.div(&z)?)
            } else {
                (a.mul(&z), b.mul(&z))
            }
        } else {
            (w.a.shift(-k), w.b.shift(-k))
        };
        Ok(QElem {
            k: k.rem_euclid(self.m as i64) as u32,
            a: ua.to_int_mod(self.a_prec)?,
            b: ub.to_int_mod(self.b_prec)?,
        })
    }

    /// A representative `w^k (a + b delta)` of the class.
    pub fn to_ext(&self, x: &QElem) -> QuadExtElem {
        let cfg = &self.cfg;
        let u = cfg.ext(x.a as i128, x.b as i128);
        let w = cfg.pow(&cfg.uniformizer(), x.k as i64).expect("nonnegative power");
        cfg.mul(&w, &u)
    }

    pub fn from_base(&self, x: &PadicElem) -> PadicResult<QElem> {
        self.reduce(&self.cfg.from_base(x))
    }

    pub fn from_base_int(&self, x: i64) -> PadicResult<QElem> {
        self.reduce(&self.cfg.ext(x as i128, 0))
    }

    pub fn dlog(&self, x: &QElem) -> Option<Vec<u64>> {
        self.group.dlog(x)
    }

    /// Discrete log of an element of `E^*`.
    pub fn dlog_ext(&self, w: &QuadExtElem) -> PadicResult<Vec<u64>> {
        let x = self.reduce(w)?;
        self.dlog(&x)
            .ok_or_else(|| PadicError::PrecisionExhausted(format!("class {x:?} not in quotient")))
    }

    pub fn elements(&self) -> Vec<(QElem, Vec<u64>)> {
        self.group.elements()
    }

    /// Generators `1 + w^i beta` of the filtration step `i` (`1 <= i <= level`).
    pub fn one_unit_generators(&self, i: u32) -> &[QElem] {
        &self.one_units[(i - 1) as usize]
    }

    /// Residue-field generator lifted to a unit.
    pub fn residue_generator(&self) -> QElem {
        let p = self.cfg.p;
        if self.cfg.ram {
            let g = primitive_root(p);
            QElem {
                k: 0,
                a: g % self.a_mod,
                b: 0,
            }
        } else {
            let z = reduce_i(self.cfg.zeta as i128, p);
            let target = p * p - 1;
            for a in 0..p {
                for b in 1..p {
                    if residue_order(a, b, z, p) == target {
                        return QElem {
                            k: 0,
                            a: a % self.a_mod,
                            b: b % self.b_mod,
                        };
                    }
                }
            }
            unreachable!("F_{{p^2}}^* is cyclic")
        }
    }

    fn one_plus_uniformizer_power(&self, i: u32, beta_is_delta: bool) -> QElem {
        let p = self.cfg.p as i128;
        let (a, b) = if self.cfg.ram {
            let z = self.cfg.zeta as i128;
            if i.is_multiple_of(2) {
                (1 + z.pow(i / 2), 0)
            } else {
                (1, z.pow((i - 1) / 2))
            }
        } else if beta_is_delta {
            (1, p.pow(i))
        } else {
            (1 + p.pow(i), 0)
        };
        QElem {
            k: 0,
            a: reduce_i(a, self.a_mod),
            b: reduce_i(b, self.b_mod),
        }
    }

    /// Depth of the unit part: largest `i` with the class in `1 + p_E^i` (capped at `level + 1`).
    pub fn unit_depth(&self, x: &QElem) -> u32 {
        if x.k != 0 {
            return 0;
        }
        (1..=self.level + 1)
            .take_while(|&i| self.in_one_units(x, i))
            .last()
            .unwrap_or(0)
    }

    /// Whether the unit class lies in `1 + p_E^i`.
    pub fn in_one_units(&self, x: &QElem, i: u32) -> bool {
        if x.k != 0 {
            return false;
        }
        let p = self.cfg.p;
        let (ai, bi) = if self.cfg.ram { (i.div_ceil(2), i / 2) } else { (i, i) };
        let am = pow_p(p, ai.min(self.a_prec));
        let bm = pow_p(p, bi.min(self.b_prec));
        (x.a + self.a_mod - 1).is_multiple_of(am) && x.b.is_multiple_of(bm)
    }

    /// Norm to `F^*`, as an element of the matching [`FQuotient`].
    pub fn norm_to(&self, fq: &FQuotient, x: &QElem) -> QElem {
        let n = reduce_i(
            x.a as i128 * x.a as i128 - self.cfg.zeta as i128 * x.b as i128 * x.b as i128,
            fq.unit_mod,
        );
        let k = if self.cfg.ram { x.k } else { 2 * x.k };
        QElem {
            k: k % fq.m,
            a: n,
            b: 0,
        }
    }
}

/// `F^*/(<c^{M_F}> (1 + p^j))` where `c` is `p` (unramified) or `-zeta` (ramified),
/// sized so that the norm from a [`UnitQuotient`] is well defined.
#[derive(Clone, Debug)]
pub struct FQuotient {
    p: u64,
    unif: i64,
    m: u32,
    j: u32,
    unit_mod: u64,
    group: FiniteAbelian<QElem>,
}

impl FQuotient {
    /// The norm target of `uq`.
    pub fn norm_target(uq: &UnitQuotient) -> Self {
        let cfg = uq.cfg();
        let (unif, m, j) = if cfg.ram {
            (-cfg.zeta, uq.m, (uq.level + 2) / 2)
        } else {
            (cfg.p as i64, 2 * uq.m, uq.level + 1)
        };
        Self::new(cfg.p, unif, m, j)
    }

    pub fn new(p: u64, unif: i64, m: u32, j: u32) -> Self {
        let unit_mod = pow_p(p, j);
        let g = primitive_root(p);
        let mut raw = vec![QElem { k: 1 % m, a: 1 % unit_mod, b: 0 }, QElem { k: 0, a: g % unit_mod, b: 0 }];
        if j >= 2 {
            raw.push(QElem { k: 0, a: (1 + p) % unit_mod, b: 0 });
        }
        let op = move |x: &QElem, y: &QElem| QElem {
            k: (x.k + y.k) % m,
            a: mul_mod(x.a, y.a, unit_mod),
            b: 0,
        };
        let group = FiniteAbelian::generate(QElem { k: 0, a: 1 % unit_mod, b: 0 }, &raw, op);
        FQuotient {
            p,
            unif,
            m,
            j,
            unit_mod,
            group,
        }
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn invariants(&self) -> &[u64] {
        self.group.invariants()
    }

    pub fn generators(&self) -> &[QElem] {
        self.group.generators()
    }

    pub fn dlog(&self, x: &QElem) -> Option<Vec<u64>> {
        self.group.dlog(x)
    }

    pub fn unit_level(&self) -> u32 {
        self.j
    }

    /// Class of an integer `x != 0`, written as `c^k u`.
    pub fn reduce_int(&self, x: i128) -> QElem {
        let (v, u) = crate::padic::split_p(x, self.p);
        let (vc, uc) = crate::padic::split_p(self.unif as i128, self.p);
        debug_assert_eq!(vc, 1);
        // x = c^v * u * uc^{-v}
        let ucinv = inv_mod(reduce_i(uc, self.unit_mod), self.unit_mod).expect("unit");
        let mut unit = reduce_i(u, self.unit_mod);
        let step = if v >= 0 { ucinv } else { reduce_i(uc, self.unit_mod) };
        for _ in 0..v.unsigned_abs() {
            unit = mul_mod(unit, step, self.unit_mod);
        }
        QElem {
            k: v.rem_euclid(self.m as i64) as u32,
            a: unit,
            b: 0,
        }
    }

    pub fn legendre(&self, x: &QElem) -> i32 {
        legendre_mod_p(x.a as i64, self.p)
    }
}

/// Least primitive root modulo the odd prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    let n = p - 1;
    let mut fs = Vec::new();
    let mut t = n;
    let mut d = 2;
    while d * d <= t {
        if t.is_multiple_of(d) {
            fs.push(d);
            while t.is_multiple_of(d) {
                t /= d;
            }
        }
        d += 1;
    }
    if t > 1 {
        fs.push(t);
    }
    (2..p)
        .find(|&g| fs.iter().all(|&f| crate::padic::pow_mod(g, n / f, p) != 1))
        .unwrap_or(1)
}

fn residue_order(a: u64, b: u64, z: u64, p: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    let mut n = 1;
    while !(x == 1 && y == 0) {
        let nx = (x * a + z * ((y * b) % p)) % p;
        let ny = (x * b + y * a) % p;
        x = nx;
        y = ny;
        n += 1;
        if n > p * p {
            return 0;
        }
    }
    n
}

/// Quotients are cached per `(cfg, level, M)` since building one enumerates the whole group.
pub fn unit_quotient_structure(cfg: &FieldConfig, level: u32, m: u32) -> PadicResult<Arc<UnitQuotient>> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    type Key = (FieldConfig, u32, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<UnitQuotient>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (cfg.clone(), level, m);
    if let Some(q) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(q.clone());
    }
    let q = Arc::new(UnitQuotient::new(cfg, level, m)?);
    Ok(cache.lock().expect("cache poisoned").entry(key).or_insert(q).clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unramified_level_zero() {
        let cfg = FieldConfig::new(3, 2, 4).unwrap();
        let q = UnitQuotient::new(&cfg, 0, 2).unwrap();
        assert_eq!(q.order(), 16);
        assert_eq!(q.invariants(), &[2, 8]);
    }

    #[test]
    fn ramified_level_zero() {
        let cfg = FieldConfig::new(3, 3, 4).unwrap();
        let q = UnitQuotient::new(&cfg, 0, 4).unwrap();
        assert_eq!(q.order(), 8);
        assert_eq!(q.invariants(), &[2, 4]);
    }

    #[test]
    fn generators_have_standard_logs() {
        for zeta in [2, 3, 6] {
            let cfg = FieldConfig::new(3, zeta, 5).unwrap();
            let q = UnitQuotient::new(&cfg, 2, 4).unwrap();
            for (i, g) in q.generators().iter().enumerate() {
                let mut e = vec![0; q.generators().len()];
                e[i] = 1;
                assert_eq!(q.dlog(g).unwrap(), e);
                assert_eq!(q.dlog_ext(&q.to_ext(g)).unwrap(), e);
            }
        }
    }

    #[test]
    fn precision_guard() {
        let cfg = FieldConfig::new(3, 2, 3).unwrap();
        assert!(matches!(UnitQuotient::new(&cfg, 2, 4), Err(PadicError::PrecisionExhausted(_))));
    }

    #[test]
    fn reduce_is_multiplicative() {
        let cfg = FieldConfig::new(5, 10, 6).unwrap();
        let q = UnitQuotient::new(&cfg, 3, 4).unwrap();
        let w1 = cfg.ext(7, 3);
        let w2 = cfg.ext(10, 1);
        let lhs = q.reduce(&cfg.mul(&w1, &w2)).unwrap();
        let rhs = q.op(&q.reduce(&w1).unwrap(), &q.reduce(&w2).unwrap());
        assert_eq!(lhs, rhs);
        let c = q.reduce(&cfg.conj(&w2)).unwrap();
        assert_eq!(c, q.conj(&q.reduce(&w2).unwrap()));
    }

    #[test]
    fn norm_lands_in_target() {
        for zeta in [2, 3, 6] {
            let cfg = FieldConfig::new(3, zeta, 5).unwrap();
            let q = UnitQuotient::new(&cfg, 2, 4).unwrap();
            let fq = FQuotient::norm_target(&q);
            for (x, _) in q.elements() {
                let n = q.norm_to(&fq, &x);
                assert!(fq.dlog(&n).is_some());
            }
        }
    }
}
