//! Tame local constants over `Q_p`: Legendre and Hilbert symbols, additive
//! characters, Gauss sums, Weil indices, Hasse invariants, the Langlands
//! constant `lambda_{E/F}(psi)` and the index `gamma(alpha, Y)`.
//!
//! Weil indices are determined by square classes. For `psi` of level `l` the
//! residual character is `t -> psi(p^{l-1} t) = e^{2 pi i t/p}` and
//! `gamma_F(psi) = gamma_k(psi_bar)^{l mod 2}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{CycloValue, RootOfUnity};
use crate::padic::{legendre_mod_p, pow_p, FieldConfig, PadicElem, PadicError, QuadExtElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstantsError {
    #[error("zero input")]
    ZeroInput,
    #[error("internal mismatch: {0}")]
    InternalMismatch(String),
    #[error("degenerate quadratic form")]
    DegenerateForm,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type ConstResult<T> = Result<T, ConstantsError>;

/// `psi(x) = e^{2 pi i frac_p(x / p^level)}`: trivial on `p^level`, not on `p^{level-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdditiveChar {
    pub p: u64,
    pub level: i32,
}

impl AdditiveChar {
    pub fn new(p: u64, level: i32) -> Self {
        AdditiveChar { p, level }
    }

    /// The level-one character fixed throughout.
    pub fn standard(p: u64) -> Self {
        Self::new(p, 1)
    }

    pub fn eval(&self, x: &PadicElem) -> ConstResult<RootOfUnity> {
        if x.is_zero() {
            if x.abs_prec() >= self.level as i64 {
                return Ok(RootOfUnity::one());
            }
            return Err(PadicError::PrecisionExhausted("psi of an undetermined element".into()).into());
        }
        let shift = x.val()? - self.level as i64;
        if shift >= 0 {
            return Ok(RootOfUnity::one());
        }
        let k = (-shift) as u32;
        if x.rel_prec() < k {
            return Err(PadicError::PrecisionExhausted(format!("psi needs {k} digits")).into());
        }
        let m = pow_p(self.p, k);
        Ok(RootOfUnity::new((x.unit() % m) as i64, m))
    }

    /// `psi(num / p^k)` for an integer `num`.
    pub fn eval_frac(&self, num: i128, k: i64) -> RootOfUnity {
        let e = k + self.level as i64;
        if e <= 0 {
            return RootOfUnity::one();
        }
        let m = pow_p(self.p, e as u32);
        RootOfUnity::new(num.rem_euclid(m as i128) as i64, m)
    }

    /// `psi_E = psi o Tr_{E/F}`.
    pub fn eval_e(&self, cfg: &FieldConfig, w: &QuadExtElem) -> ConstResult<RootOfUnity> {
        self.eval(&cfg.trace(w))
    }
}

/// A nondegenerate diagonal quadratic form `sum a_i x_i^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagQuadForm {
    pub coeffs: Vec<PadicElem>,
}

impl DiagQuadForm {
    pub fn new(coeffs: Vec<PadicElem>) -> ConstResult<Self> {
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(ConstantsError::DegenerateForm);
        }
        Ok(DiagQuadForm { coeffs })
    }

    pub fn det(&self) -> PadicElem {
        let p = self.coeffs[0].p();
        self.coeffs
            .iter()
            .fold(PadicElem::new(p, 0, 1, self.min_prec()), |acc, c| acc.mul(c))
    }

    fn min_prec(&self) -> u32 {
        self.coeffs.iter().map(|c| c.rel_prec()).min().unwrap_or(1)
    }
}

/// Legendre symbol in `F_p`.
pub fn legendre(u: i64, p: u64) -> ConstResult<i32> {
    match legendre_mod_p(u, p) {
        0 => Err(ConstantsError::ZeroInput),
        s => Ok(s),
    }
}

/// Quadratic character of `k_E`: `F_{p^2} = F_p(delta)` when unramified, `F_p` otherwise.
pub fn legendre_residue_e(cfg: &FieldConfig, a: i64, b: i64) -> ConstResult<i32> {
    if cfg.ram {
        return legendre(a, cfg.p);
    }
    // u is a square in F_{p^2} iff N(u) = u^{p+1} is a square in F_p
    let n = (a as i128) * (a as i128) - (cfg.zeta as i128) * (b as i128) * (b as i128);
    let n = n.rem_euclid(cfg.p as i128) as i64;
    legendre(n, cfg.p)
}

/// Brute-force quadratic Gauss sum `sum_{x in F_p} e^{2 pi i s x^2 / p}`.
pub fn gauss_sum(p: u64, s: i64) -> CycloValue {
    CycloValue::from_terms((0..p).map(|x| {
        let e = (s as i128 * (x * x) as i128).rem_euclid(p as i128);
        (RootOfUnity::new(e as i64, p), crate::exact::Rat::from_integer(1))
    }))
}

/// Weil index of `x -> psi_bar(c x^2)` on `F_p`, where `psi_bar(t) = e^{2 pi i s t/p}`:
/// the Gauss sum divided by `sqrt(p)`, a fourth root of unity.
///
/// `g^2 = leg(-1) p` is checked exactly; the sign of the square root is read off
/// a floating-point evaluation, which is separated from the alternative by at least `2 sqrt(p)`.
pub fn finite_weil_index(p: u64, c: i64, s: i64) -> ConstResult<RootOfUnity> {
    let cs = (c as i128 * s as i128).rem_euclid(p as i128) as i64;
    if cs == 0 {
        return Err(ConstantsError::ZeroInput);
    }
    let g = gauss_sum(p, cs);
    let lm1 = legendre(-1, p)?;
    if g.pow(2) != CycloValue::from_int(lm1 as i64 * p as i64) {
        return Err(ConstantsError::InternalMismatch("Gauss sum square".into()));
    }
    let (re, im) = g.to_complex();
    let r = (p as f64).sqrt();
    let cands: [(RootOfUnity, f64, f64); 4] = [
        (RootOfUnity::one(), r, 0.0),
        (RootOfUnity::minus_one(), -r, 0.0),
        (RootOfUnity::i(), 0.0, r),
        (RootOfUnity::new(3, 4), 0.0, -r),
    ];
    let (root, _, _) = cands
        .iter()
        .filter(|(w, _, _)| w.pow(2) == RootOfUnity::from_sign(lm1))
        .min_by(|a, b| {
            let da = (re - a.1).powi(2) + (im - a.2).powi(2);
            let db = (re - b.1).powi(2) + (im - b.2).powi(2);
            da.total_cmp(&db)
        })
        .copied()
        .expect("two candidates");
    let dist = ((re - root.to_complex().0 * r).powi(2) + (im - root.to_complex().1 * r).powi(2)).sqrt();
    if dist > 0.5 * r {
        return Err(ConstantsError::InternalMismatch("Gauss sum sign undecided".into()));
    }
    Ok(root)
}

/// `gamma_k(psi_bar)` for the standard residual character.
pub fn residual_weil_index(p: u64) -> RootOfUnity {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<u64, RootOfUnity>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("cache poisoned").get(&p) {
        return *r;
    }
    let r = finite_weil_index(p, 1, 1).expect("standard Gauss sum");
    cache.lock().expect("cache poisoned").insert(p, r);
    r
}

/// `gamma_F(psi)`, the Weil index of `x -> psi(x^2)`.
pub fn weil_index_psi(psi: &AdditiveChar) -> RootOfUnity {
    residual_weil_index(psi.p).pow(psi.level.rem_euclid(2) as i64)
}

/// `gamma_F(a psi)`, the Weil index of `x -> psi(a x^2)`.
pub fn weil_index_scaled(a: &PadicElem, psi: &AdditiveChar) -> ConstResult<RootOfUnity> {
    let m = a.val()?;
    let l = psi.level as i64 - m;
    let leg = a.unit_legendre()?;
    let g = RootOfUnity::from_sign(leg) * residual_weil_index(psi.p);
    Ok(g.pow(l.rem_euclid(2)))
}

/// `gamma_F(a, psi) = gamma_F(a psi) / gamma_F(psi)`.
pub fn weil_index(a: &PadicElem, psi: &AdditiveChar) -> ConstResult<RootOfUnity> {
    if a.is_zero() {
        return Err(ConstantsError::ZeroInput);
    }
    Ok(weil_index_scaled(a, psi)? * weil_index_psi(psi).inv())
}

/// `gamma_F(a, psi)` with the residue-field exponent taken to be the level itself
/// (`gamma_k^{l(a psi)}` rather than its parity). Kept for comparison: it breaks the
/// product formula for `p = 3 mod 4` when both arguments have odd valuation.
pub fn weil_index_verbatim(a: &PadicElem, psi: &AdditiveChar) -> ConstResult<RootOfUnity> {
    if a.is_zero() {
        return Err(ConstantsError::ZeroInput);
    }
    let m = a.val()?;
    let l = psi.level as i64;
    let gk = residual_weil_index(psi.p);
    let leg = RootOfUnity::from_sign(a.unit_legendre()?);
    Ok((leg * gk).pow(l - m) * gk.pow(l).inv())
}

/// Tame Hilbert symbol `(a, b)` over `Q_p`.
pub fn hilbert(a: &PadicElem, b: &PadicElem) -> ConstResult<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(ConstantsError::ZeroInput);
    }
    let p = a.p();
    let (al, be) = (a.val()?, b.val()?);
    let eps = if (al * be).rem_euclid(2) == 1 && p % 4 == 3 { -1 } else { 1 };
    let lu = if be.rem_euclid(2) == 1 { a.unit_legendre()? } else { 1 };
    let lv = if al.rem_euclid(2) == 1 { b.unit_legendre()? } else { 1 };
    Ok(eps * lu * lv)
}

/// `aleph_{E/F}(x) = (x, zeta)`.
pub fn aleph(cfg: &FieldConfig, x: &PadicElem) -> ConstResult<i32> {
    hilbert(x, &cfg.zeta_elem())
}

pub fn hasse_invariant(q: &DiagQuadForm) -> ConstResult<i32> {
    let c = &q.coeffs;
    let mut h = 1;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            h *= hilbert(&c[i], &c[j])?;
        }
    }
    Ok(h)
}

/// `gamma(psi o Q) = prod_i gamma_F(a_i psi)` for a diagonal form.
pub fn form_weil_index(q: &DiagQuadForm, psi: &AdditiveChar) -> ConstResult<CycloValue> {
    let mut r = RootOfUnity::one();
    for c in &q.coeffs {
        r = r * weil_index_scaled(c, psi)?;
    }
    Ok(CycloValue::from_root(r))
}

fn as_root(v: &CycloValue) -> ConstResult<RootOfUnity> {
    v.as_root()
        .ok_or_else(|| ConstantsError::InternalMismatch(format!("{v} is not a root of unity")))
}

/// `lambda_{E/F}(psi)`: the Weil index of `psi o N` (form `diag(1, -zeta)`),
/// checked against `gamma_F(zeta, psi) (-1, zeta)`.
pub fn langlands_constant(cfg: &FieldConfig, psi: &AdditiveChar) -> ConstResult<RootOfUnity> {
    let (i, ii) = langlands_constant_routes(cfg, psi)?;
    if i != ii {
        return Err(ConstantsError::InternalMismatch(format!(
            "lambda: quadratic form gives {i}, closed form gives {ii}"
        )));
    }
    Ok(i)
}

/// Both routes for `lambda_{E/F}(psi)`.
pub fn langlands_constant_routes(cfg: &FieldConfig, psi: &AdditiveChar) -> ConstResult<(RootOfUnity, RootOfUnity)> {
    let z = cfg.zeta_elem();
    let q = DiagQuadForm::new(vec![cfg.elem(1), z.neg()])?;
    let i = as_root(&form_weil_index(&q, psi)?)?;
    let ii = weil_index(&z, psi)? * RootOfUnity::from_sign(hilbert(&cfg.elem(-1), &z)?);
    Ok((i, ii))
}

/// Gram matrix of `Q_{(alpha, Y)}` in the basis `A = diag(1,-1)`, `B = antidiag(1,-zeta)`.
pub fn gamma_alpha_y_form(cfg: &FieldConfig, alpha: &QuadExtElem, y: &QuadExtElem) -> ConstResult<DiagQuadForm> {
    let (x, yy) = (alpha.b, y.b);
    if x.is_zero() || yy.is_zero() {
        return Err(ConstantsError::DegenerateForm);
    }
    let z = cfg.zeta_elem();
    let xy4 = x.mul(&yy).mul(&cfg.elem(4));
    DiagQuadForm::new(vec![xy4.mul(&z), xy4.mul(&z).mul(&z).neg()])
}

/// Both routes for `gamma(alpha, Y)`: the Weil index of the Gram form and the
/// closed form `(x, zeta)(y, zeta) gamma_F(zeta, psi)`.
pub fn gamma_alpha_y_routes(
    cfg: &FieldConfig,
    alpha: &QuadExtElem,
    y: &QuadExtElem,
    psi: &AdditiveChar,
) -> ConstResult<(RootOfUnity, RootOfUnity)> {
    let q = gamma_alpha_y_form(cfg, alpha, y)?;
    let i = as_root(&form_weil_index(&q, psi)?)?;
    let z = cfg.zeta_elem();
    let s = hilbert(&alpha.b, &z)? * hilbert(&y.b, &z)?;
    let ii = RootOfUnity::from_sign(s) * weil_index(&z, psi)?;
    Ok((i, ii))
}

pub fn gamma_alpha_y(
    cfg: &FieldConfig,
    alpha: &QuadExtElem,
    y: &QuadExtElem,
    psi: &AdditiveChar,
) -> ConstResult<RootOfUnity> {
    let (i, ii) = gamma_alpha_y_routes(cfg, alpha, y, psi)?;
    if i != ii {
        return Err(ConstantsError::InternalMismatch(format!(
            "gamma(alpha, Y): form gives {i}, closed form gives {ii}"
        )));
    }
    Ok(i)
}

/// Square-class representatives `1, u, p, u p` of `F^*/(F^*)^2`.
pub fn square_class_reps(p: u64, precision: u32) -> Vec<PadicElem> {
    let u = crate::padic::smallest_nonresidue(p) as i128;
    [1, u, p as i128, u * p as i128]
        .into_iter()
        .map(|x| PadicElem::from_int(p, x, precision))
        .collect()
}

/// Table of constants over all square classes, for reporting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub p: u64,
    pub zeta: i64,
    pub psi_level: i32,
    pub class_reps: Vec<i64>,
    pub gamma_psi: RootOfUnity,
    pub gamma_a_psi: Vec<RootOfUnity>,
    pub hilbert: Vec<Vec<i32>>,
    pub lambda: RootOfUnity,
    pub aleph: Vec<i32>,
}

pub fn constants_table(cfg: &FieldConfig, psi: &AdditiveChar) -> ConstResult<ConstantsTable> {
    let reps = square_class_reps(cfg.p, cfg.precision);
    let u = crate::padic::smallest_nonresidue(cfg.p) as i64;
    Ok(ConstantsTable {
        p: cfg.p,
        zeta: cfg.zeta,
        psi_level: psi.level,
        class_reps: vec![1, u, cfg.p as i64, u * cfg.p as i64],
        gamma_psi: weil_index_psi(psi),
        gamma_a_psi: reps.iter().map(|a| weil_index(a, psi)).collect::<ConstResult<_>>()?,
        hilbert: reps
            .iter()
            .map(|a| reps.iter().map(|b| hilbert(a, b)).collect::<ConstResult<Vec<_>>>())
            .collect::<ConstResult<_>>()?,
        lambda: langlands_constant(cfg, psi)?,
        aleph: reps.iter().map(|a| aleph(cfg, a)).collect::<ConstResult<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: u64, x: i128) -> PadicElem {
        PadicElem::from_int(p, x, 6)
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(1, 3).unwrap(), 1);
        assert_eq!(legendre(2, 3).unwrap(), -1);
        assert_eq!(legendre(2, 7).unwrap(), 1);
        assert_eq!(legendre(7, 7), Err(ConstantsError::ZeroInput));
    }

    #[test]
    fn finite_weil_index_small_fields() {
        assert_eq!(finite_weil_index(3, 1, 1).unwrap(), RootOfUnity::i());
        assert_eq!(finite_weil_index(5, 1, 1).unwrap(), RootOfUnity::one());
        for p in [3u64, 5, 7, 11, 13] {
            let g = finite_weil_index(p, 1, 1).unwrap();
            let l = legendre(-1, p).unwrap();
            assert_eq!(g.pow(2), RootOfUnity::from_sign(l));
            assert_eq!(g.pow(4), RootOfUnity::one());
        }
    }

    #[test]
    fn gauss_sum_signs() {
        // sum_x e^{2 pi i x^2/p} = sqrt(p) for p = 1 mod 4 and i sqrt(p) for p = 3 mod 4
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            let expect = if p % 4 == 1 { RootOfUnity::one() } else { RootOfUnity::i() };
            assert_eq!(finite_weil_index(p, 1, 1).unwrap(), expect, "p = {p}");
        }
    }

    #[test]
    fn nonsquare_unit_sign_by_level() {
        for p in [3u64, 5, 7] {
            let u = crate::padic::smallest_nonresidue(p) as i128;
            for l in 0..4 {
                let psi = AdditiveChar::new(p, l);
                let want = RootOfUnity::from_sign(if l % 2 == 0 { 1 } else { -1 });
                assert_eq!(weil_index(&e(p, u), &psi).unwrap(), want);
            }
        }
    }

    #[test]
    fn verbatim_exponent_breaks_product_formula_at_three() {
        let psi = AdditiveChar::standard(3);
        let a = e(3, 3);
        let lhs = weil_index_verbatim(&a.mul(&a), &psi).unwrap();
        let rhs = weil_index_verbatim(&a, &psi).unwrap().pow(2) * RootOfUnity::from_sign(hilbert(&a, &a).unwrap());
        assert_ne!(lhs, rhs);
        let lhs = weil_index(&a.mul(&a), &psi).unwrap();
        let rhs = weil_index(&a, &psi).unwrap().pow(2) * RootOfUnity::from_sign(hilbert(&a, &a).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert(&e(3, 3), &e(3, 3)).unwrap(), -1);
        assert_eq!(hilbert(&e(5, 5), &e(5, 5)).unwrap(), 1);
        assert_eq!(hilbert(&e(7, 3), &e(7, 49)).unwrap(), 1);
        assert_eq!(hilbert(&e(3, 2), &e(3, 3)).unwrap(), -1);
    }

    #[test]
    fn langlands_constant_values() {
        let psi = AdditiveChar::standard(3);
        let unr = FieldConfig::new(3, 2, 5).unwrap();
        assert_eq!(langlands_constant(&unr, &psi).unwrap(), RootOfUnity::minus_one());
        for z in [3, 6] {
            let ram = FieldConfig::new(3, z, 5).unwrap();
            let l = langlands_constant(&ram, &psi).unwrap();
            let s = hilbert(&ram.elem(-1), &ram.zeta_elem()).unwrap();
            assert_eq!(l.pow(2), RootOfUnity::from_sign(s));
        }
        let c = FieldConfig::new(5, 5, 5).unwrap();
        let l = langlands_constant(&c, &AdditiveChar::standard(5)).unwrap();
        assert_eq!(l.pow(2), RootOfUnity::one());
    }

    #[test]
    fn gamma_alpha_y_unit_coefficients() {
        for z in [2, 3, 6] {
            let cfg = FieldConfig::new(3, z, 5).unwrap();
            let psi = AdditiveChar::standard(3);
            let one = cfg.delta();
            let g = gamma_alpha_y(&cfg, &one, &one, &psi).unwrap();
            assert_eq!(g, weil_index(&cfg.zeta_elem(), &psi).unwrap());
            let q = gamma_alpha_y_form(&cfg, &one, &one).unwrap();
            assert!(q.coeffs[0].congruent(&cfg.elem(4 * z as i128)));
            assert!(q.coeffs[1].congruent(&cfg.elem(-4 * (z as i128) * (z as i128))));
        }
        let cfg = FieldConfig::new(3, 2, 5).unwrap();
        let psi = AdditiveChar::standard(3);
        assert_eq!(
            gamma_alpha_y(&cfg, &cfg.ext(1, 0), &cfg.delta(), &psi),
            Err(ConstantsError::DegenerateForm)
        );
    }

    #[test]
    fn additive_char_levels() {
        let psi = AdditiveChar::standard(5);
        assert!(psi.eval(&e(5, 5)).unwrap().is_one());
        assert_eq!(psi.eval(&e(5, 2)).unwrap(), RootOfUnity::new(2, 5));
        let x = PadicElem::new(5, -1, 3, 4);
        assert_eq!(psi.eval(&x).unwrap(), RootOfUnity::new(3, 25));
    }
}
