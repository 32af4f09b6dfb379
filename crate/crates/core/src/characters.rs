//! Finite-order characters of `E^*`, admissible pairs, `alpha(chi)`, the
//! twisting character `mu_chi` and extensions of `aleph_{E/F}` to `E^*`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{aleph, langlands_constant, legendre, AdditiveChar, ConstantsError};
use crate::exact::RootOfUnity;
use crate::padic::{inv_mod, pow_p, reduce_i, FieldConfig, PadicElem, PadicError, QuadExtElem};
use crate::quotient::{primitive_root, unit_quotient_structure, FQuotient, QElem, UnitQuotient};

/// Default order of the uniformizer in the quotient; `chi(w)^4 = 1` for every PGL pair.
pub const DEFAULT_UNIFORMIZER_ORDER: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("class not resolvable in the quotient: {0}")]
    UnresolvableClass(String),
    #[error("generator values violate the group relations: {0}")]
    BadValues(String),
    #[error("no alpha satisfies the level identity: {0}")]
    NoSolution(String),
    #[error("alpha is not determined at this precision")]
    AmbiguousBeyondPrecision,
    #[error("not an admissible pair: {0}")]
    NotAdmissible(String),
    #[error("internal mismatch: {0}")]
    InternalMismatch(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

pub type CharResult<T> = Result<T, CharError>;

/// A character of `E^*/(<w^M>(1 + p_E^{L+1}))`, stored as exponents on the
/// Smith-normal-form generators: `chi(g_i) = e^{2 pi i e_i / d_i}`.
#[derive(Clone)]
pub struct MultChar {
    quot: Arc<UnitQuotient>,
    exps: Vec<u64>,
}

fn same_quotient(a: &UnitQuotient, b: &UnitQuotient) -> bool {
    std::ptr::eq(a, b)
        || (a.cfg() == b.cfg() && a.level() == b.level() && a.uniformizer_order() == b.uniformizer_order())
}

impl PartialEq for MultChar {
    fn eq(&self, o: &Self) -> bool {
        same_quotient(&self.quot, &o.quot) && self.exps == o.exps
    }
}

impl Eq for MultChar {}

impl fmt::Debug for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultChar({self})")
    }
}

impl fmt::Display for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .exps
            .iter()
            .zip(self.quot.invariants())
            .map(|(e, d)| format!("{e}/{d}"))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Value `e^{2 pi i sum c_i e_i / d_i}` on a coordinate vector.
fn value_on(invariants: &[u64], exps: &[u64], coords: &[u64]) -> RootOfUnity {
    let l = invariants.iter().fold(1u64, |a, d| a.lcm(d));
    let mut num: u128 = 0;
    for ((&d, &e), &c) in invariants.iter().zip(exps).zip(coords) {
        num += (e as u128 * c as u128 % d as u128) * (l / d) as u128;
    }
    RootOfUnity::new((num % l as u128) as i64, l)
}

impl MultChar {
    pub fn new(quot: Arc<UnitQuotient>, exps: Vec<u64>) -> CharResult<Self> {
        let inv = quot.invariants();
        if exps.len() != inv.len() || exps.iter().zip(inv).any(|(e, d)| e >= d) {
            return Err(CharError::BadValues(format!("exponents {exps:?} for invariants {inv:?}")));
        }
        Ok(MultChar { quot, exps })
    }

    pub fn trivial(quot: Arc<UnitQuotient>) -> Self {
        let n = quot.invariants().len();
        MultChar { quot, exps: vec![0; n] }
    }

    /// The character with the given values on [`UnitQuotient::generators`].
    pub fn from_values(quot: Arc<UnitQuotient>, values: &[RootOfUnity]) -> CharResult<Self> {
        let inv = quot.invariants();
        if values.len() != inv.len() {
            return Err(CharError::BadValues(format!("{} values for {} generators", values.len(), inv.len())));
        }
        let mut exps = Vec::with_capacity(inv.len());
        for (v, &d) in values.iter().zip(inv) {
            if d % v.den() != 0 {
                return Err(CharError::BadValues(format!("{v} has order not dividing {d}")));
            }
            exps.push(v.num() * (d / v.den()));
        }
        Ok(MultChar { quot, exps })
    }

    /// Index of this character in the mixed-radix enumeration of all characters.
    pub fn index(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.quot.invariants())
            .fold(0, |acc, (e, d)| acc * d + e)
    }

    pub fn from_index(quot: Arc<UnitQuotient>, mut idx: u64) -> Self {
        let inv = quot.invariants().to_vec();
        let mut exps = vec![0; inv.len()];
        for (k, &d) in inv.iter().enumerate().rev() {
            exps[k] = idx % d;
            idx /= d;
        }
        MultChar { quot, exps }
    }

    pub fn quotient(&self) -> &Arc<UnitQuotient> {
        &self.quot
    }

    pub fn cfg(&self) -> &FieldConfig {
        self.quot.cfg()
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn values_on_generators(&self) -> Vec<RootOfUnity> {
        self.exps
            .iter()
            .zip(self.quot.invariants())
            .map(|(&e, &d)| RootOfUnity::new(e as i64, d))
            .collect()
    }

    pub fn eval_coords(&self, coords: &[u64]) -> RootOfUnity {
        value_on(self.quot.invariants(), &self.exps, coords)
    }

    pub fn eval_q(&self, x: &QElem) -> CharResult<RootOfUnity> {
        let c = self
            .quot
            .dlog(x)
            .ok_or_else(|| CharError::UnresolvableClass(format!("{x:?}")))?;
        Ok(self.eval_coords(&c))
    }

    /// `chi(w)` for `w in E^*`.
    pub fn eval(&self, w: &QuadExtElem) -> CharResult<RootOfUnity> {
        let x = self.quot.reduce(w)?;
        self.eval_q(&x)
    }

    pub fn eval_int(&self, x: i64) -> CharResult<RootOfUnity> {
        self.eval(&self.cfg().ext(x as i128, 0))
    }

    /// Least `n >= 0` with `chi` trivial on `1 + p_E^{n+1}`.
    pub fn level(&self) -> u32 {
        for i in (1..=self.quot.level()).rev() {
            let nontrivial = self
                .quot
                .one_unit_generators(i)
                .iter()
                .any(|g| !self.eval_q(g).expect("generator in quotient").is_one());
            if nontrivial {
                return i;
            }
        }
        0
    }

    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.quot.invariants())
            .map(|(&e, &d)| d / e.gcd(&d))
            .fold(1, |a, b| a.lcm(&b))
    }

    fn check_same(&self, o: &Self) {
        assert!(same_quotient(&self.quot, &o.quot), "characters live on different quotients");
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_same(o);
        let exps = self
            .exps
            .iter()
            .zip(&o.exps)
            .zip(self.quot.invariants())
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        MultChar { quot: self.quot.clone(), exps }
    }

    pub fn inv(&self) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(self.quot.invariants())
            .map(|(a, d)| (d - a) % d)
            .collect();
        MultChar { quot: self.quot.clone(), exps }
    }

    pub fn pow(&self, k: i64) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(self.quot.invariants())
            .map(|(&a, &d)| (a as i128 * k as i128).rem_euclid(d as i128) as u64)
            .collect();
        MultChar { quot: self.quot.clone(), exps }
    }

    /// `chi^upsilon = chi o conj`.
    pub fn galois_conjugate(&self) -> Self {
        let vals: Vec<RootOfUnity> = self
            .quot
            .generators()
            .iter()
            .map(|g| self.eval_q(&self.quot.conj(g)).expect("conjugate in quotient"))
            .collect();
        Self::from_values(self.quot.clone(), &vals).expect("conjugation preserves relations")
    }

    /// Whether `chi = chi o conj` on `1 + p_E^i` (`i = 0` meaning the units).
    fn galois_invariant_on_units(&self, i: u32) -> bool {
        let q = &self.quot;
        let mut gens: Vec<QElem> = Vec::new();
        if i == 0 {
            gens.push(q.residue_generator());
        }
        for j in i.max(1)..=q.level() {
            gens.extend_from_slice(q.one_unit_generators(j));
        }
        gens.iter()
            .all(|g| self.eval_q(g).ok() == self.eval_q(&q.conj(g)).ok())
    }

    /// Values on generators `p`, a primitive root and `1 + p` of `F^*`.
    pub fn restriction_to_base(&self) -> CharResult<Vec<RootOfUnity>> {
        base_generators(self.cfg())
            .into_iter()
            .map(|x| self.eval_int(x))
            .collect()
    }

    /// Whether `chi|_{F^*} = aleph_{E/F}`.
    pub fn restricts_to_aleph(&self) -> CharResult<bool> {
        let cfg = self.cfg().clone();
        for x in base_generators(&cfg) {
            let a = aleph(&cfg, &cfg.elem(x as i128))?;
            if self.eval_int(x)? != RootOfUnity::from_sign(a) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `eta o N` for a character `eta` of the norm-target quotient given by exponents.
    pub fn from_base_character(quot: Arc<UnitQuotient>, fq: &FQuotient, eta_exps: &[u64]) -> Self {
        let vals: Vec<RootOfUnity> = quot
            .generators()
            .iter()
            .map(|g| {
                let c = fq.dlog(&quot.norm_to(fq, g)).expect("norm lands in target");
                value_on(fq.invariants(), eta_exps, &c)
            })
            .collect();
        Self::from_values(quot, &vals).expect("eta o N respects relations")
    }

    pub fn to_spec(&self, pgl_only: bool) -> PairSpec {
        let cfg = self.cfg();
        PairSpec {
            p: cfg.p,
            zeta: cfg.zeta,
            precision: cfg.precision,
            level: self.quot.level(),
            uniformizer_order: self.quot.uniformizer_order(),
            generator_values: self.values_on_generators(),
            pgl_only,
        }
    }
}

/// Integer generators of `F^*` modulo `1 + p^k` for every `k`: `p`, a primitive root, `1 + p`.
pub fn base_generators(cfg: &FieldConfig) -> Vec<i64> {
    let p = cfg.p as i64;
    vec![p, primitive_root(cfg.p) as i64, 1 + p]
}

/// Serialized form of a character on a named quotient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSpec {
    pub p: u64,
    pub zeta: i64,
    pub precision: u32,
    pub level: u32,
    #[serde(default = "default_m")]
    pub uniformizer_order: u32,
    pub generator_values: Vec<RootOfUnity>,
    #[serde(default)]
    pub pgl_only: bool,
}

fn default_m() -> u32 {
    DEFAULT_UNIFORMIZER_ORDER
}

impl PairSpec {
    pub fn to_char(&self) -> CharResult<MultChar> {
        let cfg = FieldConfig::new(self.p, self.zeta, self.precision)?;
        let q = unit_quotient_structure(&cfg, self.level, self.uniformizer_order)?;
        MultChar::from_values(q, &self.generator_values)
    }
}

/// Whether `chi` factors through the norm on `E^*`, or on `1 + p_E^n` when given
/// (`n = 0` meaning the units): tested as Galois invariance.
pub fn factors_through_norm(chi: &MultChar, subgroup_level: Option<u32>) -> bool {
    match subgroup_level {
        None => chi
            .quot
            .generators()
            .iter()
            .all(|g| chi.eval_q(g).ok() == chi.eval_q(&chi.quot.conj(g)).ok()),
        Some(n) => chi.galois_invariant_on_units(n),
    }
}

/// Whether `chi` is trivial on the kernel of the norm map between finite quotients.
/// Independent of the Galois-invariance test in [`factors_through_norm`].
pub fn factors_through_norm_oracle(chi: &MultChar) -> bool {
    let q = &chi.quot;
    let fq = FQuotient::norm_target(q);
    let target_id = fq.reduce_int(1);
    q.elements()
        .iter()
        .filter(|(x, _)| q.norm_to(&fq, x) == target_id)
        .all(|(_, c)| chi.eval_coords(c).is_one())
}

/// `(k_a, k_b, m_a, m_b)`: `p_E^m / p_E^{n+1}` is spanned by `p^{m_a}` of order `p^{k_a}`
/// and `p^{m_b} delta` of order `p^{k_b}`, with `m = ceil((n+1)/2)`.
fn alpha_lattice(cfg: &FieldConfig, n: u32) -> (u32, u32, u32, u32) {
    let m = (n + 2) / 2;
    if cfg.ram {
        let (ma, mb) = (m.div_ceil(2), m / 2);
        ((n + 2) / 2 - ma, n.div_ceil(2) - mb, ma, mb)
    } else {
        (n + 1 - m, n + 1 - m, m, m)
    }
}

fn extract_exponent(v: RootOfUnity, p: u64, k: u32) -> CharResult<u64> {
    let m = pow_p(p, k);
    if !m.is_multiple_of(v.den()) {
        return Err(CharError::NoSolution(format!("value {v} has order not dividing p^{k}")));
    }
    Ok(v.num() * (m / v.den()))
}

/// `alpha(chi)` with `chi(1 + x) = psi(Tr(alpha x))` for `x in p_E^{ceil((n+1)/2)}`,
/// canonical modulo `p_E^{-floor(n/2)}` (digits beyond that range are zero).
pub fn solve_alpha(chi: &MultChar, psi: &AdditiveChar) -> CharResult<QuadExtElem> {
    let cfg = chi.cfg().clone();
    let n = chi.level();
    if n == 0 {
        return Err(CharError::NoSolution("level zero".into()));
    }
    let p = cfg.p;
    let l = psi.level as i64;
    let (ka, kb, ma, mb) = alpha_lattice(&cfg, n);
    let va = chi.eval(&cfg.ext(1 + pow_p(p, ma) as i128, 0))?;
    let vb = chi.eval(&cfg.ext(1, pow_p(p, mb) as i128))?;
    let sa = extract_exponent(va, p, ka)?;
    let sb = extract_exponent(vb, p, kb)?;
    let a = if ka == 0 {
        PadicElem::zero(p, l - ma as i64)
    } else {
        let modulus = pow_p(p, ka);
        let inv2 = inv_mod(2, modulus).expect("p odd");
        PadicElem::new(p, l - (ma + ka) as i64, (sa as u128 * inv2 as u128 % modulus as u128) as i128, ka)
    };
    let vz = cfg.v_zeta();
    let b = if kb == 0 {
        PadicElem::zero(p, l - vz - mb as i64)
    } else {
        let modulus = pow_p(p, kb);
        let c = inv_mod(reduce_i(2 * cfg.zeta_unit() as i128, modulus), modulus).expect("unit");
        PadicElem::new(
            p,
            l - vz - (mb + kb) as i64,
            (sb as u128 * c as u128 % modulus as u128) as i128,
            kb,
        )
    };
    Ok(QuadExtElem::new(a, b))
}

/// Exhaustive check of `chi(1 + x) = psi(Tr(alpha x))` over `p_E^m / p_E^{n+1}`.
pub fn alpha_identity_holds(chi: &MultChar, psi: &AdditiveChar, alpha: &QuadExtElem) -> CharResult<bool> {
    let cfg = chi.cfg().clone();
    let n = chi.level();
    let (ka, kb, ma, mb) = alpha_lattice(&cfg, n);
    let p = cfg.p as i128;
    for i in 0..pow_p(cfg.p, ka) as i128 {
        for j in 0..pow_p(cfg.p, kb) as i128 {
            let x = cfg.ext(i * p.pow(ma), j * p.pow(mb));
            let lhs = chi.eval(&cfg.add(&cfg.ext(1, 0), &x))?;
            let t = cfg.trace(&cfg.mul(alpha, &x));
            let rhs = psi.eval(&t)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Residue of `beta w^{-v_E(beta)}` for a totally ramified `E`, i.e. the
/// Teichmuller root of unity `Gamma(beta, w)` by its residue in `F_p^*`.
pub fn gamma_root(cfg: &FieldConfig, beta: &QuadExtElem, varpi: &QuadExtElem) -> CharResult<u64> {
    if !cfg.ram {
        return Err(CharError::InternalMismatch("Gamma(beta, w) needs a ramified extension".into()));
    }
    let k = cfg.v_e(beta)?;
    if cfg.v_e(varpi)? != 1 {
        return Err(CharError::InternalMismatch("w is not a uniformizer".into()));
    }
    let u = cfg.mul(beta, &cfg.pow(varpi, -k)?);
    Ok(u.a.to_int_mod(1)?)
}

/// The minimal character `chi'` and `eta o N` with `chi = chi' (eta o N)`.
#[derive(Clone, Debug)]
pub struct MinimalFactor {
    pub chi: MultChar,
    pub eta_n: MultChar,
    pub alpha: Option<QuadExtElem>,
}

/// `(E/F, chi)`: `chi` does not factor through the norm and, when `E/F` is ramified,
/// neither does `chi|_{1 + p_E}`.
#[derive(Clone, Debug)]
pub struct AdmissiblePair {
    pub chi: MultChar,
    pub psi: AdditiveChar,
    pub level: u32,
    pub minimal: bool,
    pub alpha_chi: Option<QuadExtElem>,
    /// `delta`-coefficient of `alpha_chi`.
    pub x_pi: Option<PadicElem>,
    /// Present for non-minimal pairs.
    pub factor: Option<Box<MinimalFactor>>,
}

impl AdmissiblePair {
    pub fn new(chi: MultChar, psi: AdditiveChar) -> CharResult<Self> {
        if factors_through_norm(&chi, None) {
            return Err(CharError::NotAdmissible("chi factors through the norm".into()));
        }
        if chi.cfg().ram && factors_through_norm(&chi, Some(1)) {
            return Err(CharError::NotAdmissible(
                "chi on 1 + p_E factors through the norm but E/F is ramified".into(),
            ));
        }
        let level = chi.level();
        let minimal = !factors_through_norm(&chi, Some(level));
        let alpha_chi = if level >= 1 { Some(solve_alpha(&chi, &psi)?) } else { None };
        let x_pi = alpha_chi.map(|a| a.b);
        let factor = if minimal {
            None
        } else {
            Some(Box::new(minimal_factor(&chi, &psi)?))
        };
        Ok(AdmissiblePair {
            chi,
            psi,
            level,
            minimal,
            alpha_chi,
            x_pi,
            factor,
        })
    }

    pub fn cfg(&self) -> &FieldConfig {
        self.chi.cfg()
    }

    /// The minimal character this pair twists, itself when minimal.
    pub fn minimal_chi(&self) -> &MultChar {
        self.factor.as_ref().map_or(&self.chi, |f| &f.chi)
    }

    /// `alpha` of the minimal character.
    pub fn minimal_alpha(&self) -> Option<QuadExtElem> {
        self.factor.as_ref().map_or(self.alpha_chi, |f| f.alpha)
    }

    pub fn minimal_level(&self) -> u32 {
        self.minimal_chi().level()
    }
}

/// Searches `eta` over characters of `F^*` for `chi (eta o N)^{-1}` of least level,
/// which is then minimal.
pub fn minimal_factor(chi: &MultChar, psi: &AdditiveChar) -> CharResult<MinimalFactor> {
    let q = chi.quot.clone();
    let fq = FQuotient::norm_target(&q);
    let inv = fq.invariants().to_vec();
    let total: u64 = inv.iter().product();
    let best = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut e = vec![0; inv.len()];
            for (k, &d) in inv.iter().enumerate().rev() {
                e[k] = idx % d;
                idx /= d;
            }
            let eta_n = MultChar::from_base_character(q.clone(), &fq, &e);
            let c = chi.mul(&eta_n.inv());
            (c.level(), c.index(), c, eta_n)
        })
        .min_by_key(|(l, i, _, _)| (*l, *i))
        .expect("trivial eta exists");
    let (lvl, _, c, eta_n) = best;
    if factors_through_norm(&c, Some(lvl)) {
        return Err(CharError::InternalMismatch(format!("no minimal factor found for {chi}")));
    }
    let alpha = if lvl >= 1 { Some(solve_alpha(&c, psi)?) } else { None };
    Ok(MinimalFactor { chi: c, eta_n, alpha })
}

/// The twisting character `mu_chi`.
///
/// Unramified: the unramified quadratic character `w -> (-1)^{v_E(w)}`.
/// Ramified: trivial on `1 + p_E`, equal to `aleph` on `F^*`, and
/// `mu(delta) = aleph(Gamma(alpha, delta)) lambda_{E/F}(psi)^n` for the minimal factor.
pub fn build_mu(pair: &AdmissiblePair) -> CharResult<MultChar> {
    let q = pair.chi.quot.clone();
    let cfg = q.cfg().clone();
    let m = q.uniformizer_order();
    if m % 2 == 1 {
        return Err(CharError::BadValues("uniformizer order must be even".into()));
    }
    let mu_varpi = if cfg.ram {
        mu_at_uniformizer(pair)?
    } else {
        RootOfUnity::minus_one()
    };
    if !mu_varpi.pow(m as i64).is_one() {
        return Err(CharError::BadValues(format!("mu(w) = {mu_varpi} has order not dividing {m}")));
    }
    let vals: Vec<RootOfUnity> = q
        .generators()
        .iter()
        .map(|g| {
            let unit = if cfg.ram {
                RootOfUnity::from_sign(legendre((g.a % cfg.p) as i64, cfg.p).expect("unit residue"))
            } else {
                RootOfUnity::one()
            };
            mu_varpi.pow(g.k as i64) * unit
        })
        .collect();
    let mu = MultChar::from_values(q, &vals)?;
    if !mu.restricts_to_aleph()? {
        return Err(CharError::InternalMismatch("mu does not restrict to aleph".into()));
    }
    Ok(mu)
}

/// `mu_chi(delta)` for ramified `E` from the defining formula.
pub fn mu_at_uniformizer(pair: &AdmissiblePair) -> CharResult<RootOfUnity> {
    let cfg = pair.cfg().clone();
    let alpha = pair
        .minimal_alpha()
        .ok_or_else(|| CharError::NotAdmissible("ramified pair of level zero".into()))?;
    let n = pair.minimal_level();
    let g = gamma_root(&cfg, &alpha, &cfg.delta())?;
    let al = aleph(&cfg, &cfg.elem(g as i128))?;
    let lambda = langlands_constant(&cfg, &pair.psi)?;
    Ok(RootOfUnity::from_sign(al) * lambda.pow(n as i64))
}

/// The cross-check value `(x_pi, zeta) gamma_F(zeta, psi)` for `mu(delta)`.
pub fn mu_at_uniformizer_closed_form(pair: &AdmissiblePair) -> CharResult<RootOfUnity> {
    let cfg = pair.cfg().clone();
    let alpha = pair
        .minimal_alpha()
        .ok_or_else(|| CharError::NotAdmissible("level zero".into()))?;
    let s = aleph(&cfg, &alpha.b)?;
    Ok(RootOfUnity::from_sign(s) * crate::constants::weil_index(&cfg.zeta_elem(), &pair.psi)?)
}

/// All characters of `quot` trivial on `1 + p_E` that restrict to `aleph` on `F^*`.
pub fn aleph_extensions(quot: &Arc<UnitQuotient>) -> CharResult<Vec<MultChar>> {
    let cfg = quot.cfg().clone();
    let total = quot.order();
    let out: Vec<MultChar> = (0..total)
        .into_par_iter()
        .map(|i| MultChar::from_index(quot.clone(), i))
        .filter(|c| c.level() == 0 && c.is_level_zero_strict() && c.restricts_to_aleph().unwrap_or(false))
        .collect();
    if out.is_empty() {
        return Err(CharError::InternalMismatch(format!("no extension of aleph for zeta = {}", cfg.zeta)));
    }
    Ok(out)
}

impl MultChar {
    /// Trivial on all of `1 + p_E`.
    fn is_level_zero_strict(&self) -> bool {
        (1..=self.quot.level()).all(|i| {
            self.quot
                .one_unit_generators(i)
                .iter()
                .all(|g| self.eval_q(g).map(|v| v.is_one()).unwrap_or(false))
        })
    }
}

/// An extension `tau~` of `aleph_{E/F}` to `E^*`; `choice` 0 and 1 give two different ones.
pub fn build_tau_tilde(quot: &Arc<UnitQuotient>, choice: usize) -> CharResult<MultChar> {
    let all = aleph_extensions(quot)?;
    let pick = if choice == 0 { all.first() } else { all.last() };
    let t = pick.expect("nonempty").clone();
    if choice != 0 && t == all[0] {
        return Err(CharError::InternalMismatch("only one extension of aleph".into()));
    }
    Ok(t)
}

/// Characters of order a power of two restricting to `aleph`.
pub fn nu_type_characters(quot: &Arc<UnitQuotient>) -> CharResult<Vec<MultChar>> {
    let total = quot.order();
    Ok((0..total)
        .into_par_iter()
        .map(|i| MultChar::from_index(quot.clone(), i))
        .filter(|c| c.order().is_power_of_two() && c.restricts_to_aleph().unwrap_or(false))
        .collect())
}

/// Admissible pairs of level at most `max_level`, one per Galois class `{chi, chi^upsilon}`
/// (the representative with the smaller enumeration index), with the standard `psi`.
pub fn enumerate_pairs(cfg: &FieldConfig, max_level: u32, pgl_only: bool) -> CharResult<Vec<AdmissiblePair>> {
    enumerate_pairs_with(cfg, max_level, pgl_only, &AdditiveChar::standard(cfg.p))
}

pub fn enumerate_pairs_with(
    cfg: &FieldConfig,
    max_level: u32,
    pgl_only: bool,
    psi: &AdditiveChar,
) -> CharResult<Vec<AdmissiblePair>> {
    let q = unit_quotient_structure(cfg, max_level, DEFAULT_UNIFORMIZER_ORDER)?;
    let gens = q.generators().to_vec();
    let dl = |x: &QElem| q.dlog(x).expect("in quotient");
    let gen_coords: Vec<Vec<u64>> = gens.iter().map(dl).collect();
    let conj_coords: Vec<Vec<u64>> = gens.iter().map(|g| dl(&q.conj(g))).collect();
    let base: Vec<(Vec<u64>, RootOfUnity)> = base_generators(cfg)
        .into_iter()
        .map(|x| -> CharResult<_> {
            let c = q.dlog_ext(&cfg.ext(x as i128, 0))?;
            Ok((c, RootOfUnity::from_sign(aleph(cfg, &cfg.elem(x as i128))?)))
        })
        .collect::<CharResult<_>>()?;
    let total = q.order();
    let mut reps: Vec<u64> = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let chi = MultChar::from_index(q.clone(), idx);
            if pgl_only && base.iter().any(|(c, a)| chi.eval_coords(c) != *a) {
                return false;
            }
            let conj_vals: Vec<RootOfUnity> = conj_coords.iter().map(|c| chi.eval_coords(c)).collect();
            let own: Vec<RootOfUnity> = gen_coords.iter().map(|c| chi.eval_coords(c)).collect();
            if conj_vals == own {
                return false;
            }
            let conj = MultChar::from_values(q.clone(), &conj_vals).expect("relations");
            conj.index() >= idx
        })
        .collect();
    reps.sort_unstable();
    let pairs: Vec<CharResult<Option<AdmissiblePair>>> = reps
        .into_par_iter()
        .map(|idx| {
            let chi = MultChar::from_index(q.clone(), idx);
            match AdmissiblePair::new(chi, *psi) {
                Ok(p) => Ok(Some(p)),
                Err(CharError::NotAdmissible(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    pairs.into_iter().filter_map(|r| r.transpose()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfgs(p: u64, prec: u32) -> Vec<FieldConfig> {
        FieldConfig::all_extensions(p, prec).unwrap()
    }

    #[test]
    fn trivial_character_is_one() {
        let cfg = FieldConfig::new(3, 2, 4).unwrap();
        let q = unit_quotient_structure(&cfg, 1, 4).unwrap();
        let t = MultChar::trivial(q);
        assert!(t.eval(&cfg.ext(7, 5)).unwrap().is_one());
        assert_eq!(t.level(), 0);
        assert!(factors_through_norm(&t, None));
    }

    #[test]
    fn evaluation_is_multiplicative() {
        let cfg = FieldConfig::new(5, 10, 5).unwrap();
        let q = unit_quotient_structure(&cfg, 2, 4).unwrap();
        let chi = MultChar::from_index(q.clone(), 12345 % q.order());
        let ws = [cfg.ext(3, 1), cfg.ext(7, 2), cfg.ext(10, 3), cfg.ext(1, 5)];
        for w1 in &ws {
            for w2 in &ws {
                let lhs = chi.eval(&cfg.mul(w1, w2)).unwrap();
                assert_eq!(lhs, chi.eval(w1).unwrap() * chi.eval(w2).unwrap());
            }
        }
    }

    #[test]
    fn level_zero_pgl_count_unramified() {
        for p in [3u64, 5] {
            let cfg = FieldConfig::all_extensions(p, 3).unwrap()[0].clone();
            let pairs = enumerate_pairs(&cfg, 0, true).unwrap();
            assert_eq!(pairs.len() as u64, (p - 1) / 2);
            for pr in &pairs {
                assert_eq!(pr.chi.eval_int(p as i64).unwrap(), RootOfUnity::minus_one());
            }
        }
    }

    #[test]
    fn level_zero_regular_classes_without_central_condition() {
        let cfg = FieldConfig::all_extensions(3, 3).unwrap()[0].clone();
        let pairs = enumerate_pairs(&cfg, 0, false).unwrap();
        let at_p_minus_one = pairs
            .iter()
            .filter(|pr| pr.chi.eval_int(3).unwrap() == RootOfUnity::minus_one())
            .count();
        assert_eq!(at_p_minus_one, 3);
    }

    #[test]
    fn galois_invariance_matches_norm_kernel() {
        for cfg in cfgs(3, 3) {
            let q = unit_quotient_structure(&cfg, 0, 4).unwrap();
            for i in 0..q.order() {
                let chi = MultChar::from_index(q.clone(), i);
                assert_eq!(factors_through_norm(&chi, None), factors_through_norm_oracle(&chi), "{chi}");
            }
        }
    }

    #[test]
    fn alpha_solves_level_identity() {
        for p in [3u64, 5] {
            for cfg in cfgs(p, 5) {
                let psi = AdditiveChar::standard(p);
                for pr in enumerate_pairs(&cfg, 2, true).unwrap() {
                    if let Some(a) = pr.alpha_chi {
                        assert!(alpha_identity_holds(&pr.chi, &psi, &a).unwrap());
                        assert_eq!(cfg.v_e(&a).unwrap(), -(pr.level as i64));
                    }
                    if pr.minimal && pr.level >= 1 {
                        let vb = cfg.v_e(&QuadExtElem::new(PadicElem::zero(p, 20), pr.x_pi.unwrap())).unwrap();
                        assert_eq!(vb, -(pr.level as i64));
                    }
                    if cfg.ram && pr.minimal {
                        assert_eq!(pr.level % 2, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn mu_properties() {
        for p in [3u64, 5] {
            for cfg in cfgs(p, 5) {
                for pr in enumerate_pairs(&cfg, 2, true).unwrap() {
                    let mu = build_mu(&pr).unwrap();
                    assert_eq!(mu.level(), 0);
                    if cfg.ram {
                        assert_eq!(mu_at_uniformizer(&pr).unwrap(), mu_at_uniformizer_closed_form(&pr).unwrap());
                        assert_eq!(mu.eval(&cfg.delta()).unwrap(), mu_at_uniformizer(&pr).unwrap());
                    } else {
                        assert_eq!(mu, mu.inv());
                        assert_eq!(mu.eval_int(p as i64).unwrap(), RootOfUnity::minus_one());
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_root_basics() {
        let cfg = FieldConfig::new(5, 5, 5).unwrap();
        let d = cfg.delta();
        assert_eq!(gamma_root(&cfg, &d, &d).unwrap(), 1);
        let b = cfg.mul(&cfg.ext(3, 0), &cfg.pow(&d, 3).unwrap());
        assert_eq!(gamma_root(&cfg, &b, &d).unwrap(), 3);
    }

    #[test]
    fn two_tau_extensions_differ() {
        for cfg in cfgs(3, 3) {
            let q = unit_quotient_structure(&cfg, 1, 4).unwrap();
            let t0 = build_tau_tilde(&q, 0).unwrap();
            let t1 = build_tau_tilde(&q, 1).unwrap();
            assert_ne!(t0, t1);
            assert!(t0.restricts_to_aleph().unwrap() && t1.restricts_to_aleph().unwrap());
        }
    }
}
