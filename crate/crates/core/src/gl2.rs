//! `GL(2, F_q)` at desk scale: finite fields, conjugacy classes, the classical
//! character table, the Deligne-Lusztig restriction to the elliptic torus, and
//! the depth-zero supercuspidal kernel on `F^* A`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characters::{AdmissiblePair, MultChar};
use crate::cover::{depth_n, discriminant_valuation, CoverError, CoverResult};
use crate::exact::{CycloValue, OpaqueScale, OpaqueTag, ReducedKernel, RootOfUnity};
use crate::padic::{is_odd_prime, legendre_mod_p, FieldConfig, QuadExtElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gl2Error {
    #[error("q = {0} is not an odd prime power up to 49")]
    BadOrder(u64),
    #[error("class is not elliptic regular")]
    NotElliptic,
    #[error("torus character is not regular")]
    NotRegular,
    #[error("element lies in F^*(1 + p_E)")]
    WrongRange,
    #[error("depth-zero kernel needs an unramified extension and a level-zero pair")]
    NotDepthZero,
}

/// `F_q` with `q = p^k`, elements encoded as base-`p` coefficient vectors of
/// polynomials modulo a fixed irreducible; `0` and `1` encode themselves.
#[derive(Clone, Debug)]
pub struct FiniteField {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    add: Vec<u32>,
    mul: Vec<u32>,
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    let mut r = vec![0u64; 2 * k];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    // modulus is monic of degree k
    for d in (k..2 * k).rev() {
        let c = r[d];
        if c == 0 {
            continue;
        }
        for (i, m) in modulus.iter().enumerate() {
            let idx = d - k + i;
            r[idx] = (r[idx] + p * p - c * m % p) % p;
        }
    }
    r.truncate(k);
    r
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self, Gl2Error> {
        let (p, k) = prime_power(q).ok_or(Gl2Error::BadOrder(q))?;
        if p == 2 || q > 49 {
            return Err(Gl2Error::BadOrder(q));
        }
        let modulus = irreducible(p, k);
        let digits = |x: u64| -> Vec<u64> { (0..k).map(|i| x / p.pow(i) % p).collect() };
        let enc = |v: &[u64]| -> u64 { v.iter().enumerate().map(|(i, c)| c * p.pow(i as u32)).sum() };
        let n = q as usize;
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for x in 0..q {
            for y in 0..q {
                let (dx, dy) = (digits(x), digits(y));
                let s: Vec<u64> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x as usize * n + y as usize] = enc(&s) as u32;
                mul[x as usize * n + y as usize] = enc(&poly_mul_mod(&dx, &dy, &modulus, p)) as u32;
            }
        }
        Ok(FiniteField { p, k, q, add, mul })
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.q as usize + y as usize]
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.q as usize + y as usize]
    }

    pub fn neg(&self, x: u32) -> u32 {
        (0..self.q as u32).find(|&y| self.add(x, y) == 0).expect("additive inverse")
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn from_int(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn is_square(&self, x: u32) -> bool {
        (0..self.q as u32).any(|y| self.mul(y, y) == x)
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut k = 0;
    let mut t = q;
    while t.is_multiple_of(p) {
        t /= p;
        k += 1;
    }
    (t == 1 && is_odd_prime(p)).then_some((p, k))
}

/// Monic irreducible of degree `k` over `F_p`, lowest coefficient first, found by
/// checking for roots (enough for `k <= 3`) or, for `k = 1`, just `x`.
fn irreducible(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = p.pow(k);
    for c in 0..count {
        let mut f: Vec<u64> = (0..k).map(|i| c / p.pow(i) % p).collect();
        f.push(1);
        if k <= 3 && (0..p).all(|x| f.iter().rev().fold(0, |acc, a| (acc * x + a) % p) != 0) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist")
}

/// `F_{q^2} = F_q(d)` with `d^2 = z` a nonsquare; `x + y d` encoded as `x + q y`.
/// Discrete logs are taken to a fixed generator `omega`, and `F_q^*` is generated by `omega^{q+1}`.
#[derive(Clone, Debug)]
pub struct QuadField {
    pub base: FiniteField,
    pub z: u32,
    pub omega: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl QuadField {
    pub fn new(base: FiniteField, z: u32) -> Self {
        let q = base.q;
        let n = (q * q) as usize;
        let mut qf = QuadField {
            base,
            z,
            omega: 0,
            exp: Vec::new(),
            log: vec![u32::MAX; n],
        };
        let order = q * q - 1;
        for cand in 1..n as u32 {
            let mut x = 1u32;
            let mut seq = Vec::with_capacity(order as usize);
            for _ in 0..order {
                seq.push(x);
                x = qf.mul(x, cand);
                if x == 1 {
                    break;
                }
            }
            if seq.len() as u64 == order {
                qf.omega = cand;
                for (i, &e) in seq.iter().enumerate() {
                    qf.log[e as usize] = i as u32;
                }
                qf.exp = seq;
                break;
            }
        }
        qf
    }

    pub fn q(&self) -> u64 {
        self.base.q
    }

    pub fn elem(&self, x: u32, y: u32) -> u32 {
        x + self.base.q as u32 * y
    }

    pub fn parts(&self, e: u32) -> (u32, u32) {
        (e % self.base.q as u32, e / self.base.q as u32)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let f = &self.base;
        let (x1, y1) = self.parts(a);
        let (x2, y2) = self.parts(b);
        let x = f.add(f.mul(x1, x2), f.mul(self.z, f.mul(y1, y2)));
        let y = f.add(f.mul(x1, y2), f.mul(y1, x2));
        self.elem(x, y)
    }

    /// `log_omega(e)` for `e != 0`.
    pub fn log(&self, e: u32) -> u64 {
        self.log[e as usize] as u64
    }

    pub fn exp(&self, s: u64) -> u32 {
        self.exp[(s % (self.q() * self.q() - 1)) as usize]
    }
}

/// Conjugacy class types of `GL(2, F_q)`; exponents are logs to `omega^{q+1}` for `F_q^*`
/// and to `omega` for `F_{q^2}^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassKind {
    Central { t: u64 },
    NonSemisimple { t: u64 },
    Split { t1: u64, t2: u64 },
    Elliptic { s: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassInfo {
    pub kind: ClassKind,
    pub size: u64,
    pub centralizer: u64,
}

impl ClassInfo {
    pub fn label(&self) -> String {
        match self.kind {
            ClassKind::Central { t } => format!("z{t}"),
            ClassKind::NonSemisimple { t } => format!("u{t}"),
            ClassKind::Split { t1, t2 } => format!("d{t1}.{t2}"),
            ClassKind::Elliptic { s } => format!("e{s}"),
        }
    }
}

/// Class inventory of `GL(2, F_q)`.
#[derive(Clone, Debug)]
pub struct FiniteGL2 {
    pub fq2: QuadField,
    pub classes: Vec<ClassInfo>,
}

impl FiniteGL2 {
    pub fn q(&self) -> u64 {
        self.fq2.q()
    }

    pub fn order(&self) -> u64 {
        let q = self.q();
        (q * q - 1) * (q * q - q)
    }

    pub fn class_index(&self, kind: &ClassKind) -> Option<usize> {
        self.classes.iter().position(|c| c.kind == *kind)
    }

    /// Canonical elliptic class of `omega^s`.
    pub fn elliptic_kind(&self, s: u64) -> Result<ClassKind, Gl2Error> {
        let q = self.q();
        let n = q * q - 1;
        let s = s % n;
        if s.is_multiple_of(q + 1) {
            return Err(Gl2Error::NotElliptic);
        }
        Ok(ClassKind::Elliptic { s: s.min(s * q % n) })
    }

    /// Class of a matrix `[[a, b], [c, d]]`, by characteristic polynomial and diagonalizability.
    pub fn classify(&self, m: [u32; 4]) -> ClassKind {
        let f = &self.fq2.base;
        let q = self.q();
        let tr = f.add(m[0], m[3]);
        let det = f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2]));
        // eigenvalues: roots of x^2 - tr x + det in F_{q^2}
        let roots: Vec<u32> = (1..(q * q) as u32)
            .filter(|&x| {
                let x2 = self.fq2.mul(x, x);
                let trx = self.fq2.mul(self.fq2.elem(tr, 0), x);
                let (a, b) = self.fq2.parts(x2);
                let (c, d) = self.fq2.parts(trx);
                f.add(f.sub(a, c), det) == 0 && f.sub(b, d) == 0
            })
            .collect();
        let logq = |x: u32| self.fq2.log(self.fq2.elem(x, 0)) / (q + 1);
        if roots.len() == 1 {
            let (lam, _) = self.fq2.parts(roots[0]);
            let t = logq(lam);
            if m[1] == 0 && m[2] == 0 {
                ClassKind::Central { t }
            } else {
                ClassKind::NonSemisimple { t }
            }
        } else if self.fq2.parts(roots[0]).1 == 0 {
            let (a, b) = (logq(self.fq2.parts(roots[0]).0), logq(self.fq2.parts(roots[1]).0));
            ClassKind::Split { t1: a.min(b), t2: a.max(b) }
        } else {
            self.elliptic_kind(self.fq2.log(roots[0])).expect("non-rational eigenvalue")
        }
    }

    /// All elements of `GL(2, F_q)`.
    pub fn elements(&self) -> Vec<[u32; 4]> {
        let f = &self.fq2.base;
        let q = self.q() as u32;
        let mut out = Vec::new();
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        if f.sub(f.mul(a, d), f.mul(b, c)) != 0 {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn mat_mul(&self, x: [u32; 4], y: [u32; 4]) -> [u32; 4] {
        let f = &self.fq2.base;
        let e = |a, b, c, d| f.add(f.mul(a, b), f.mul(c, d));
        [
            e(x[0], y[0], x[1], y[2]),
            e(x[0], y[1], x[1], y[3]),
            e(x[2], y[0], x[3], y[2]),
            e(x[2], y[1], x[3], y[3]),
        ]
    }

    pub fn mat_inv(&self, x: [u32; 4]) -> [u32; 4] {
        let f = &self.fq2.base;
        let det = f.sub(f.mul(x[0], x[3]), f.mul(x[1], x[2]));
        let di = (1..self.q() as u32).find(|&y| f.mul(det, y) == 1).expect("invertible");
        [f.mul(x[3], di), f.mul(f.neg(x[1]), di), f.mul(f.neg(x[2]), di), f.mul(x[0], di)]
    }
}

/// Class inventory with representatives given by eigenvalue data; sizes from centralizer orders.
pub fn class_inventory(q: u64) -> Result<Arc<FiniteGL2>, Gl2Error> {
    let base = FiniteField::new(q)?;
    let z = (1..q as u32).find(|&x| !base.is_square(x)).expect("nonsquare");
    Ok(inventory_with(base, z))
}

type InventoryCache = Mutex<HashMap<(u64, i64), Arc<FiniteGL2>>>;

/// Inventory for `q = p` with `F_{p^2} = F_p(sqrt(zeta mod p))`, matching an unramified `E`.
pub fn class_inventory_for(cfg: &FieldConfig) -> Result<Arc<FiniteGL2>, Gl2Error> {
    static CACHE: OnceLock<InventoryCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (cfg.p, cfg.zeta);
    if let Some(g) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(g.clone());
    }
    if cfg.ram || legendre_mod_p(cfg.zeta, cfg.p) != -1 {
        return Err(Gl2Error::NotDepthZero);
    }
    let base = FiniteField::new(cfg.p)?;
    let z = base.from_int(cfg.zeta);
    let g = inventory_with(base, z);
    cache.lock().expect("cache poisoned").insert(key, g.clone());
    Ok(g)
}

fn inventory_with(base: FiniteField, z: u32) -> Arc<FiniteGL2> {
    let q = base.q;
    let fq2 = QuadField::new(base, z);
    let g_order = (q * q - 1) * (q * q - q);
    let mut classes = Vec::new();
    let mut push = |kind, centralizer: u64| {
        classes.push(ClassInfo {
            kind,
            size: g_order / centralizer,
            centralizer,
        })
    };
    for t in 0..q - 1 {
        push(ClassKind::Central { t }, g_order);
    }
    for t in 0..q - 1 {
        push(ClassKind::NonSemisimple { t }, q * (q - 1));
    }
    for t1 in 0..q - 1 {
        for t2 in t1 + 1..q - 1 {
            push(ClassKind::Split { t1, t2 }, (q - 1) * (q - 1));
        }
    }
    let n = q * q - 1;
    for s in 0..n {
        if s % (q + 1) != 0 && s <= s * q % n {
            push(ClassKind::Elliptic { s }, n);
        }
    }
    Arc::new(FiniteGL2 { fq2, classes })
}

/// A character of `F_{q^2}^*`: `theta(omega) = e^{2 pi i j / (q^2 - 1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteTorusChar {
    pub q: u64,
    pub j: u64,
}

impl FiniteTorusChar {
    pub fn new(q: u64, j: u64) -> Self {
        FiniteTorusChar { q, j: j % (q * q - 1) }
    }

    pub fn is_regular(&self) -> bool {
        !self.j.is_multiple_of(self.q + 1)
    }

    /// `theta^q`.
    pub fn frobenius(&self) -> Self {
        Self::new(self.q, self.j * self.q)
    }

    /// `theta(omega^s)`.
    pub fn eval_log(&self, s: u64) -> RootOfUnity {
        let n = self.q * self.q - 1;
        RootOfUnity::new(((self.j as u128 * s as u128) % n as u128) as i64, n)
    }

    /// `theta` on `F_q^*`, at `(omega^{q+1})^t`.
    pub fn eval_base(&self, t: u64) -> RootOfUnity {
        self.eval_log((self.q + 1) * t)
    }
}

/// A class function, valued in the cyclotomics, indexed like [`FiniteGL2::classes`].
pub type ClassFunction = Vec<CycloValue>;

fn root(r: RootOfUnity) -> CycloValue {
    CycloValue::from_root(r)
}

fn base_char(q: u64, j: u64, t: u64) -> RootOfUnity {
    RootOfUnity::new(((j * t) % (q - 1)) as i64, q - 1)
}

/// `R_{T, theta}(s) = theta(s) + theta(s^q)` on an elliptic regular class.
pub fn dl_restriction(g: &FiniteGL2, theta: &FiniteTorusChar, class: &ClassKind) -> Result<CycloValue, Gl2Error> {
    if !theta.is_regular() {
        return Err(Gl2Error::NotRegular);
    }
    match *class {
        ClassKind::Elliptic { s } => Ok(root(theta.eval_log(s)) + root(theta.eval_log(s * g.q()))),
        _ => Err(Gl2Error::NotElliptic),
    }
}

/// The cuspidal character attached to a regular `theta`.
pub fn cuspidal_oracle(g: &FiniteGL2, theta: &FiniteTorusChar) -> Result<ClassFunction, Gl2Error> {
    if !theta.is_regular() {
        return Err(Gl2Error::NotRegular);
    }
    let q = g.q();
    Ok(g.classes
        .iter()
        .map(|c| match c.kind {
            ClassKind::Central { t } => root(theta.eval_base(t)).scale(Ratio::from_integer(q as i128 - 1)),
            ClassKind::NonSemisimple { t } => -root(theta.eval_base(t)),
            ClassKind::Split { .. } => CycloValue::zero(),
            ClassKind::Elliptic { s } => -(root(theta.eval_log(s)) + root(theta.eval_log(s * q))),
        })
        .collect())
}

/// `Ind_B^G(mu_1 x mu_2)` for characters `mu_i(g^t) = e^{2 pi i j_i t/(q-1)}` of `F_q^*`.
pub fn principal_series(g: &FiniteGL2, j1: u64, j2: u64) -> ClassFunction {
    let q = g.q();
    g.classes
        .iter()
        .map(|c| match c.kind {
            ClassKind::Central { t } => {
                root(base_char(q, j1 + j2, t)).scale(Ratio::from_integer(q as i128 + 1))
            }
            ClassKind::NonSemisimple { t } => root(base_char(q, j1 + j2, t)),
            ClassKind::Split { t1, t2 } => {
                root(base_char(q, j1, t1) * base_char(q, j2, t2)) + root(base_char(q, j1, t2) * base_char(q, j2, t1))
            }
            ClassKind::Elliptic { .. } => CycloValue::zero(),
        })
        .collect()
}

/// `alpha o det`.
pub fn det_character(g: &FiniteGL2, j: u64) -> ClassFunction {
    let q = g.q();
    g.classes
        .iter()
        .map(|c| match c.kind {
            ClassKind::Central { t } | ClassKind::NonSemisimple { t } => root(base_char(q, j, 2 * t)),
            ClassKind::Split { t1, t2 } => root(base_char(q, j, t1 + t2)),
            ClassKind::Elliptic { s } => root(base_char(q, j, s)),
        })
        .collect()
}

/// Steinberg twisted by `alpha o det`.
pub fn steinberg(g: &FiniteGL2, j: u64) -> ClassFunction {
    let q = g.q() as i128;
    det_character(g, j)
        .into_iter()
        .zip(&g.classes)
        .map(|(v, c)| match c.kind {
            ClassKind::Central { .. } => v.scale(Ratio::from_integer(q)),
            ClassKind::NonSemisimple { .. } => CycloValue::zero(),
            ClassKind::Split { .. } => v,
            ClassKind::Elliptic { .. } => -v,
        })
        .collect()
}

/// `<f, h> = |G|^{-1} sum_g f(g) conj(h(g))`.
pub fn inner_product(g: &FiniteGL2, f: &ClassFunction, h: &ClassFunction) -> CycloValue {
    let mut acc = CycloValue::zero();
    for ((c, a), b) in g.classes.iter().zip(f).zip(h) {
        acc = acc + (a * &b.conj()).scale(Ratio::from_integer(c.size as i128));
    }
    acc.scale(Ratio::new(1, g.order() as i128))
}

/// A named row of the assembled character table.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub name: String,
    pub values: ClassFunction,
}

/// One regular `theta` per Frobenius orbit.
pub fn regular_theta_reps(q: u64) -> Vec<FiniteTorusChar> {
    let n = q * q - 1;
    (0..n)
        .map(|j| FiniteTorusChar::new(q, j))
        .filter(|t| t.is_regular() && t.j <= t.frobenius().j)
        .collect()
}

/// The full character table: `alpha o det`, Steinberg twists, principal series, cuspidals.
pub fn character_table(g: &FiniteGL2) -> Vec<TableRow> {
    let q = g.q();
    let mut rows = Vec::new();
    for j in 0..q - 1 {
        rows.push(TableRow {
            name: format!("det^{j}"),
            values: det_character(g, j),
        });
    }
    for j in 0..q - 1 {
        rows.push(TableRow {
            name: format!("St.det^{j}"),
            values: steinberg(g, j),
        });
    }
    for j1 in 0..q - 1 {
        for j2 in j1 + 1..q - 1 {
            rows.push(TableRow {
                name: format!("PS({j1},{j2})"),
                values: principal_series(g, j1, j2),
            });
        }
    }
    for t in regular_theta_reps(q) {
        rows.push(TableRow {
            name: format!("cusp({})", t.j),
            values: cuspidal_oracle(g, &t).expect("regular"),
        });
    }
    rows
}

/// CSV rendering of [`character_table`], one row per character.
pub fn character_table_csv(g: &FiniteGL2) -> String {
    let mut out = String::from("character");
    for c in &g.classes {
        out.push(',');
        out.push_str(&c.label());
    }
    out.push('\n');
    out.push_str("class size");
    for c in &g.classes {
        out.push_str(&format!(",{}", c.size));
    }
    out.push('\n');
    for r in character_table(g) {
        out.push_str(&r.name);
        for v in &r.values {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Certificate that the cuspidal oracle is an irreducible character.
#[derive(Clone, Debug, Serialize)]
pub struct CuspidalCertificate {
    pub theta: u64,
    pub norm_is_one: bool,
    pub orthogonal_to_trivial: bool,
    pub degree: String,
    pub principal_series_integral: bool,
}

impl CuspidalCertificate {
    pub fn ok(&self) -> bool {
        self.norm_is_one && self.orthogonal_to_trivial && self.principal_series_integral
    }
}

pub fn certify_cuspidal(g: &FiniteGL2, theta: &FiniteTorusChar) -> Result<CuspidalCertificate, Gl2Error> {
    let chi = cuspidal_oracle(g, theta)?;
    let q = g.q();
    let one = det_character(g, 0);
    let integral = (0..q - 1).into_par_iter().all(|j1| {
        (0..q - 1).all(|j2| inner_product(g, &chi, &principal_series(g, j1, j2)).as_rational().is_some_and(|r| r.is_integer()))
    });
    let id = g.class_index(&ClassKind::Central { t: 0 }).expect("identity class");
    Ok(CuspidalCertificate {
        theta: theta.j,
        norm_is_one: inner_product(g, &chi, &chi) == CycloValue::one(),
        orthogonal_to_trivial: inner_product(g, &chi, &one).is_zero(),
        degree: chi[id].to_string(),
        principal_series_integral: integral,
    })
}

/// `sum_chi |chi(g)|^2 = |C(g)|` on every class of the assembled table.
pub fn column_orthogonality(g: &FiniteGL2) -> bool {
    let rows = character_table(g);
    g.classes.iter().enumerate().all(|(i, c)| {
        let s = rows
            .iter()
            .fold(CycloValue::zero(), |acc, r| acc + &r.values[i] * &r.values[i].conj());
        s == CycloValue::from_int(c.centralizer as i64)
    })
}

/// Class sizes from enumerating the group and classifying each element.
pub fn brute_force_class_sizes(g: &FiniteGL2) -> HashMap<ClassKind, u64> {
    let mut m = HashMap::new();
    for x in g.elements() {
        *m.entry(g.classify(x)).or_insert(0) += 1;
    }
    m
}

/// Number and sizes of conjugacy classes from orbits of the conjugation action.
pub fn brute_force_orbits(g: &FiniteGL2) -> Vec<u64> {
    let els = g.elements();
    let index: HashMap<[u32; 4], usize> = els.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut seen = vec![false; els.len()];
    let mut sizes = Vec::new();
    for i in 0..els.len() {
        if seen[i] {
            continue;
        }
        let mut n = 0;
        for h in &els {
            let y = g.mat_mul(g.mat_mul(*h, els[i]), g.mat_inv(*h));
            let j = index[&y];
            if !seen[j] {
                seen[j] = true;
                n += 1;
            }
        }
        sizes.push(n);
    }
    sizes.sort_unstable();
    sizes
}

/// Sign used for the finite-group character on elliptic regular classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DlSign {
    /// `+ (theta(s) + theta(s^q))`, the Deligne-Lusztig restriction formula.
    Restriction,
    /// `- (theta(s) + theta(s^q))`, the irreducible cuspidal character.
    Cuspidal,
}

/// `theta` on `F_{q^2}^*` induced by a level-zero character of the unramified `E^*`.
pub fn residual_theta(g: &FiniteGL2, phi: &MultChar) -> CoverResult<FiniteTorusChar> {
    let cfg = phi.cfg();
    let (x, y) = g.fq2.parts(g.fq2.omega);
    let v = phi.eval(&cfg.ext(x as i128, y as i128))?;
    let q = g.q();
    let n = q * q - 1;
    if !n.is_multiple_of(v.den()) {
        return Err(Gl2Error::NotDepthZero.into());
    }
    Ok(FiniteTorusChar::new(q, v.num() * (n / v.den())))
}

/// The depth-zero kernel of `pi_phi`, `phi = chi twist`, at `w = c w_0` with `w_0 in A`:
/// `phi(c) chi_sigma(w_0 mod p)`, carrying the scale `deg(pi)/deg(sigma)`.
pub fn depth_zero_theta_twisted(
    pair: &AdmissiblePair,
    twist: &MultChar,
    w: &QuadExtElem,
    sign: DlSign,
) -> CoverResult<ReducedKernel> {
    let cfg = pair.cfg().clone();
    if cfg.ram || pair.level != 0 {
        return Err(Gl2Error::NotDepthZero.into());
    }
    if depth_n(&cfg, w)? != 0 {
        return Err(Gl2Error::WrongRange.into());
    }
    let g = class_inventory_for(&cfg)?;
    let phi = pair.chi.mul(twist);
    let m = w.b.val()?;
    let c = cfg.elem(cfg.p as i128).pow(m.max(0) as u32);
    let w0 = if m >= 0 {
        cfg.scale(&c.inv()?, w)
    } else {
        cfg.scale(&cfg.elem(cfg.p as i128).pow((-m) as u32), w)
    };
    let central = phi.eval_int(cfg.p as i64)?.pow(m);
    let (a0, b0) = (w0.a.to_int_mod(1)?, w0.b.to_int_mod(1)?);
    let f = &g.fq2.base;
    let lam = g.fq2.elem(f.from_int(a0 as i64), f.from_int(b0 as i64));
    let theta = residual_theta(&g, &phi)?;
    let kind = g.elliptic_kind(g.fq2.log(lam))?;
    let r = dl_restriction(&g, &theta, &kind)?;
    let r = match sign {
        DlSign::Restriction => r,
        DlSign::Cuspidal => -r,
    };
    let value = r.mul_root(central).times_sqrtq(cfg.p, discriminant_valuation(&cfg, w)?);
    Ok(ReducedKernel::new(
        value,
        OpaqueScale::from_tags(&[(OpaqueTag::DegPi, 1), (OpaqueTag::DegSigma, -1)]),
    ))
}

/// The depth-zero kernel of `pi_{chi mu_chi}`.
pub fn depth_zero_theta(pair: &AdmissiblePair, w: &QuadExtElem, sign: DlSign) -> CoverResult<ReducedKernel> {
    let mu = crate::characters::build_mu(pair)?;
    depth_zero_theta_twisted(pair, &mu, w, sign)
}

/// Exhaustive sample of `F^* A` (unramified `E`) modulo `1 + p_E`: `p^n u + v delta` with `n <= 1` and
/// residues `u, v`, `v != 0`, plus translates by `p`.
pub fn depth_zero_sample(cfg: &FieldConfig) -> Vec<QuadExtElem> {
    let p = cfg.p as i128;
    let mut out = Vec::new();
    for n in 0..=1u32 {
        for u in 0..p {
            for v in 1..p {
                let w = cfg.ext(p.pow(n) * u, v);
                out.push(w);
                out.push(cfg.scale(&cfg.elem(p), &w));
            }
        }
    }
    out
}

impl From<Gl2Error> for CoverError {
    fn from(e: Gl2Error) -> Self {
        CoverError::Gl2(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_3_inventory() {
        let g = class_inventory(3).unwrap();
        assert_eq!(g.order(), 48);
        assert_eq!(g.classes.len(), 8);
        assert_eq!(g.classes.iter().map(|c| c.size).sum::<u64>(), 48);
        let central = g.classes.iter().filter(|c| matches!(c.kind, ClassKind::Central { .. })).count();
        assert_eq!(central, 2);
    }

    #[test]
    fn brute_force_agrees_with_inventory() {
        for q in [3u64, 5] {
            let g = class_inventory(q).unwrap();
            let bf = brute_force_class_sizes(&g);
            assert_eq!(bf.len(), g.classes.len());
            for c in &g.classes {
                assert_eq!(bf[&c.kind], c.size, "{:?}", c.kind);
            }
        }
        let g = class_inventory(3).unwrap();
        let mut sizes: Vec<u64> = g.classes.iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        assert_eq!(brute_force_orbits(&g), sizes);
    }

    #[test]
    fn cuspidals_certified() {
        for q in [3u64, 5] {
            let g = class_inventory(q).unwrap();
            let reps = regular_theta_reps(q);
            assert_eq!(reps.len() as u64, q * (q - 1) / 2);
            for t in &reps {
                let c = certify_cuspidal(&g, t).unwrap();
                assert!(c.ok(), "{c:?}");
                assert_eq!(c.degree, (q - 1).to_string());
            }
            for (i, a) in reps.iter().enumerate() {
                for b in &reps[i + 1..] {
                    assert_ne!(cuspidal_oracle(&g, a).unwrap(), cuspidal_oracle(&g, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn q3_column_orthogonality() {
        let g = class_inventory(3).unwrap();
        assert!(column_orthogonality(&g));
    }

    #[test]
    fn restriction_is_minus_cuspidal_on_elliptic() {
        let g = class_inventory(5).unwrap();
        for t in regular_theta_reps(5) {
            let chi = cuspidal_oracle(&g, &t).unwrap();
            for (c, v) in g.classes.iter().zip(&chi) {
                if matches!(c.kind, ClassKind::Elliptic { .. }) {
                    let r = dl_restriction(&g, &t, &c.kind).unwrap();
                    assert_eq!(r, -v.clone());
                    assert_eq!(r, dl_restriction(&g, &t.frobenius(), &c.kind).unwrap());
                }
            }
        }
    }

    #[test]
    fn field_of_nine() {
        let g = class_inventory(9).unwrap();
        assert_eq!(g.classes.len(), 80);
        assert_eq!(g.classes.iter().map(|c| c.size).sum::<u64>(), g.order());
    }
}
