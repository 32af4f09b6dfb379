//! The torus `E^*/F^*`, its filtration depth `n(w)`, the double cover
//! `E^*/N(E^*)`, and the two character kernels compared on it: the formula
//! `F(chi~)` and the positive-depth kernel of the supercuspidal `pi_phi`.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characters::{base_generators, build_mu, solve_alpha, AdmissiblePair, CharError, MultChar};
use crate::constants::{aleph, gamma_alpha_y, hilbert, weil_index, ConstantsError};
use crate::exact::{CycloValue, OpaqueScale, OpaqueTag, ReducedKernel, RootOfUnity};
use crate::padic::{pow_p, FieldConfig, PadicElem, PadicError, QuadExtElem};
use crate::quotient::{QElem, UnitQuotient};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("element is not regular")]
    NotRegular,
    #[error("element has depth zero")]
    NotPositiveDepth,
    #[error("depth index {k} outside the range 2k <= {level}")]
    OutOfRange { k: u32, level: u32 },
    #[error("character does not restrict to aleph on F^*")]
    NotGenuine,
    #[error("character is Galois invariant")]
    NotRegularChar,
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Gl2(crate::gl2::Gl2Error),
}

pub type CoverResult<T> = Result<T, CoverError>;

/// `n(w)` as the exponent `k` with `w in F^*(1 + p_E^k) \ F^*(1 + p_E^{k+1})`
/// (so the depth is `k / e`); 0 off `F^*(1 + p_E)`.
pub fn depth_n(cfg: &FieldConfig, w: &QuadExtElem) -> CoverResult<u32> {
    if w.b.is_zero() {
        return Err(CoverError::NotRegular);
    }
    if w.a.is_zero() {
        return Ok(0);
    }
    let n = w.a.val()?;
    let m = w.b.val()?;
    Ok(if cfg.ram {
        if n <= m {
            (2 * (m - n) + 1) as u32
        } else {
            0
        }
    } else if n < m {
        (m - n) as u32
    } else {
        0
    })
}

/// Largest `k` with `w / c in 1 + p_E^k` over `c = p^j u`, `u` a unit modulo `p^digits`.
/// An exhaustive search, used to check [`depth_n`]; it resolves `k` up to `e * digits`.
pub fn depth_n_oracle(cfg: &FieldConfig, w: &QuadExtElem, digits: u32) -> CoverResult<u32> {
    let vs: Vec<i64> = [w.a.valuation(), w.b.valuation()].into_iter().flatten().collect();
    let (lo, hi) = (vs.iter().min().copied().unwrap_or(0), vs.iter().max().copied().unwrap_or(0));
    let p = cfg.p;
    let one = cfg.ext(1, 0);
    let mut best = 0i64;
    for j in lo - 1..=hi + 1 {
        for u in 1..pow_p(p, digits) {
            if u % p == 0 {
                continue;
            }
            let c = PadicElem::new(p, j, u as i128, cfg.precision);
            let x = cfg.sub(&cfg.scale(&c.inv()?, w), &one);
            if let Ok(k) = cfg.v_e(&x) {
                best = best.max(k);
            }
        }
    }
    Ok(best.max(0) as u32)
}

/// `w = c (1 + Y)` with `c = a in F^*` and `Y = (b/a) delta`.
pub fn decompose(cfg: &FieldConfig, w: &QuadExtElem) -> CoverResult<(PadicElem, QuadExtElem)> {
    if depth_n(cfg, w)? == 0 {
        return Err(CoverError::NotPositiveDepth);
    }
    let c = w.a;
    let y = QuadExtElem::new(PadicElem::zero(cfg.p, cfg.precision as i64 * 2), w.b.div(&c)?);
    Ok((c, y))
}

/// Whether `n(w)` lies in `0 <= n(w) <= r/2` for a pair of the given level
/// (`r = level / e`, so the condition reads `2k <= level`).
pub fn in_range(k: u32, level: u32) -> bool {
    2 * k <= level
}

/// A point `(z, lambda)` of the cover `{(z, lambda) : tau(z / z-bar) = lambda^2}`,
/// `z` a canonical class in `E^*/F^*` of the finite quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverElem {
    pub z: QElem,
    pub lambda: RootOfUnity,
}

/// Weyl group of the elliptic torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weyl {
    Identity,
    Conj,
}

fn subgroup(q: &UnitQuotient, gens: &[QElem]) -> Vec<QElem> {
    let mut seen: HashSet<QElem> = HashSet::new();
    let id = q.identity();
    seen.insert(id);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = q.op(&x, g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut v: Vec<QElem> = seen.into_iter().collect();
    v.sort();
    v
}

/// The cover `E^*/N(E^*)` modelled on a finite quotient, with the isomorphism
/// `kappa` to `(z, lambda)` pairs determined by an extension `tau~` of `aleph`.
pub struct CoverContext {
    quot: Arc<UnitQuotient>,
    tau: MultChar,
    base_image: Vec<QElem>,
    norm_image: Vec<QElem>,
}

impl CoverContext {
    pub fn new(tau: MultChar) -> CoverResult<Self> {
        let quot = tau.quotient().clone();
        let cfg = quot.cfg().clone();
        if !tau.restricts_to_aleph()? {
            return Err(CoverError::NotGenuine);
        }
        let fg: Vec<QElem> = base_generators(&cfg)
            .into_iter()
            .map(|x| quot.from_base_int(x))
            .collect::<Result<_, _>>()?;
        let ng: Vec<QElem> = quot
            .generators()
            .iter()
            .map(|g| {
                let w = quot.to_ext(g);
                quot.from_base(&cfg.norm(&w))
            })
            .collect::<Result<_, _>>()?;
        Ok(CoverContext {
            base_image: subgroup(&quot, &fg),
            norm_image: subgroup(&quot, &ng),
            quot,
            tau,
        })
    }

    pub fn quotient(&self) -> &Arc<UnitQuotient> {
        &self.quot
    }

    pub fn tau(&self) -> &MultChar {
        &self.tau
    }

    fn canonical(&self, x: &QElem, h: &[QElem]) -> QElem {
        h.iter().map(|y| self.quot.op(x, y)).min().expect("subgroup is nonempty")
    }

    /// Canonical class of `x` in `E^*/F^*`.
    pub fn torus_class(&self, x: &QElem) -> QElem {
        self.canonical(x, &self.base_image)
    }

    /// Canonical class of `x` in `E^*/N(E^*)`.
    pub fn norm_class(&self, x: &QElem) -> QElem {
        self.canonical(x, &self.norm_image)
    }

    /// All classes of `E^*/N(E^*)` in the quotient.
    pub fn norm_classes(&self) -> Vec<QElem> {
        let set: BTreeSet<QElem> = self
            .quot
            .elements()
            .iter()
            .map(|(x, _)| self.norm_class(x))
            .collect();
        set.into_iter().collect()
    }

    /// `[w] -> (z, tau~(w))`.
    pub fn kappa(&self, x: &QElem) -> CoverResult<CoverElem> {
        Ok(CoverElem {
            z: self.torus_class(x),
            lambda: self.tau.eval_q(x)?,
        })
    }

    /// The class `[w]` with `kappa([w]) = c`.
    pub fn kappa_inv(&self, c: &CoverElem) -> CoverResult<QElem> {
        for y in &self.base_image {
            let x = self.quot.op(&c.z, y);
            if self.tau.eval_q(&x)? == c.lambda {
                return Ok(self.norm_class(&x));
            }
        }
        Err(CoverError::NotGenuine)
    }

    pub fn mul(&self, a: &CoverElem, b: &CoverElem) -> CoverElem {
        CoverElem {
            z: self.torus_class(&self.quot.op(&a.z, &b.z)),
            lambda: a.lambda * b.lambda,
        }
    }

    /// The nontrivial deck transformation `(z, lambda) -> (z, -lambda)`.
    pub fn deck(&self, c: &CoverElem) -> CoverElem {
        CoverElem {
            z: c.z,
            lambda: c.lambda * RootOfUnity::minus_one(),
        }
    }

    /// `tau(z / z-bar)`, which must equal `lambda^2` on the cover.
    pub fn two_rho(&self, z: &QElem) -> CoverResult<RootOfUnity> {
        let zb = self.quot.conj(z);
        Ok(self.tau.eval_q(z)? * self.tau.eval_q(&zb)?.inv())
    }

    /// `upsilon (z, lambda) = (z-bar, lambda tau(w-bar / w))`.
    pub fn weyl_act(&self, s: Weyl, c: &CoverElem) -> CoverResult<CoverElem> {
        match s {
            Weyl::Identity => Ok(*c),
            Weyl::Conj => {
                let zb = self.quot.conj(&c.z);
                let t = self.tau.eval_q(&zb)? * self.tau.eval_q(&c.z)?.inv();
                Ok(CoverElem {
                    z: self.torus_class(&zb),
                    lambda: c.lambda * t,
                })
            }
        }
    }

    pub fn conj_class(&self, x: &QElem) -> QElem {
        self.norm_class(&self.quot.conj(x))
    }
}

/// A genuine regular character of the cover: `chi~([w]) = chi(w)` with `chi|_{F^*} = aleph`.
#[derive(Clone, Debug)]
pub struct GenuineChar {
    pub pair: AdmissiblePair,
}

impl GenuineChar {
    pub fn new(pair: AdmissiblePair) -> CoverResult<Self> {
        if !pair.chi.restricts_to_aleph()? {
            return Err(CoverError::NotGenuine);
        }
        if crate::characters::factors_through_norm(&pair.chi, None) {
            return Err(CoverError::NotRegularChar);
        }
        Ok(GenuineChar { pair })
    }

    pub fn chi(&self) -> &MultChar {
        &self.pair.chi
    }

    pub fn eval(&self, x: &QElem) -> CoverResult<RootOfUnity> {
        Ok(self.pair.chi.eval_q(x)?)
    }

    /// `chi~` on the nontrivial element of the kernel `F^*/N(E^*)`.
    pub fn central_value(&self) -> CoverResult<RootOfUnity> {
        let cfg = self.pair.cfg().clone();
        let x = non_norm(&cfg)?;
        Ok(self.pair.chi.eval_int(x)?)
    }
}

/// A base generator that is not a norm from `E`.
pub fn non_norm(cfg: &FieldConfig) -> CoverResult<i64> {
    for x in base_generators(cfg) {
        if aleph(cfg, &cfg.elem(x as i128))? == -1 {
            return Ok(x);
        }
    }
    unreachable!("aleph is nontrivial")
}

/// Choice of positive root for the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositiveRoot {
    Standard,
    Opposite,
}

/// `v_F(D(w))` with `D(w) = (w - w-bar)^2 / (w w-bar)`; `|D(w)|^{-1/2} = sqrt(q)^{v_F(D)}`.
pub fn discriminant_valuation(cfg: &FieldConfig, w: &QuadExtElem) -> CoverResult<i32> {
    Ok((2 * w.b.val()? + cfg.v_zeta() - cfg.norm(w).val()?) as i32)
}

fn positive_depth_scale() -> OpaqueScale {
    OpaqueScale::from_tags(&[
        (OpaqueTag::DegPi, 1),
        (OpaqueTag::CPsiGPrime, 1),
        (OpaqueTag::CPsiG, -1),
        (OpaqueTag::EtaAlphaInvSqrt, 1),
    ])
}

fn depth_zero_scale() -> OpaqueScale {
    OpaqueScale::from_tags(&[(OpaqueTag::DegPi, 1), (OpaqueTag::DegSigma, -1)])
}

/// The scale tags carried by both kernels of a pair.
pub fn kernel_scale(pair: &AdmissiblePair) -> OpaqueScale {
    if pair.minimal_level() == 0 {
        depth_zero_scale()
    } else {
        positive_depth_scale()
    }
}

/// The root-of-unity part of `epsilon(chi~, Delta+, tau)`.
pub fn epsilon_root(pair: &AdmissiblePair, tau: &MultChar, root: PositiveRoot) -> CoverResult<RootOfUnity> {
    let cfg = pair.cfg().clone();
    let mut e = tau.eval(&cfg.ext(0, 2))?;
    if root == PositiveRoot::Opposite {
        e = e * tau.eval_int(-1)?;
    }
    if pair.minimal_level() >= 1 {
        let alpha = pair.minimal_alpha().expect("positive level has alpha");
        let z = cfg.zeta_elem();
        e = e * RootOfUnity::from_sign(hilbert(&alpha.b, &z)?) * weil_index(&z, &pair.psi)?;
    }
    Ok(e)
}

/// `F(chi~)(w) = epsilon (chi(w) + (-1, zeta) chi(w-bar)) / (tau~(+-(w - w-bar)) |D(w)|^{1/2})`.
pub fn formula_f(g: &GenuineChar, w: &QuadExtElem, root: PositiveRoot, tau: &MultChar) -> CoverResult<ReducedKernel> {
    let pair = &g.pair;
    let cfg = pair.cfg().clone();
    let k = depth_n(&cfg, w)?;
    let level = pair.minimal_level();
    if !in_range(k, level) {
        return Err(CoverError::OutOfRange { k, level });
    }
    let chi = &pair.chi;
    let wb = cfg.conj(w);
    let m1 = hilbert(&cfg.elem(-1), &cfg.zeta_elem())?;
    let num = CycloValue::from_root(chi.eval(w)?) + CycloValue::from_root(chi.eval(&wb)? * RootOfUnity::from_sign(m1));
    let diff = match root {
        PositiveRoot::Standard => cfg.sub(w, &wb),
        PositiveRoot::Opposite => cfg.sub(&wb, w),
    };
    let den = tau.eval(&diff)?;
    let eps = epsilon_root(pair, tau, root)?;
    let value = num
        .mul_root(eps * den.inv())
        .times_sqrtq(cfg.p, discriminant_valuation(&cfg, w)?);
    Ok(ReducedKernel::new(value, kernel_scale(pair)))
}

/// `lambda(sigma)`: 1 for ramified `E`, `(-1)^{r+1}` for unramified `E` of level `r`.
pub fn lambda_sigma(cfg: &FieldConfig, level: u32) -> i32 {
    if cfg.ram || level % 2 == 1 {
        1
    } else {
        -1
    }
}

/// The positive-depth supercuspidal kernel of `pi_phi`, `phi = chi twist`:
/// `phi(w) gamma(alpha, Y) + phi(w-bar) gamma(alpha, Y-bar)` when `n(w) > 0`,
/// `lambda(sigma) (phi(w) + phi(w-bar))` when `n(w) = 0`.
pub fn debacker_kernel(pair: &AdmissiblePair, twist: &MultChar, w: &QuadExtElem) -> CoverResult<ReducedKernel> {
    let cfg = pair.cfg().clone();
    let level = pair.minimal_level();
    if level == 0 {
        return Err(CoverError::NotPositiveDepth);
    }
    let k = depth_n(&cfg, w)?;
    if !in_range(k, level) {
        return Err(CoverError::OutOfRange { k, level });
    }
    let phi = pair.chi.mul(twist);
    let wb = cfg.conj(w);
    let value = if k == 0 {
        let s = RootOfUnity::from_sign(lambda_sigma(&cfg, level));
        (CycloValue::from_root(phi.eval(w)?) + CycloValue::from_root(phi.eval(&wb)?)).mul_root(s)
    } else {
        let phi_min = pair.minimal_chi().mul(twist);
        let alpha = solve_alpha(&phi_min, &pair.psi)?;
        let (_, y) = decompose(&cfg, w)?;
        let yb = cfg.conj(&y);
        let g1 = gamma_alpha_y(&cfg, &alpha, &y, &pair.psi)?;
        let g2 = gamma_alpha_y(&cfg, &alpha, &yb, &pair.psi)?;
        CycloValue::from_root(phi.eval(w)? * g1) + CycloValue::from_root(phi.eval(&wb)? * g2)
    };
    let value = value.times_sqrtq(cfg.p, discriminant_valuation(&cfg, w)?);
    Ok(ReducedKernel::new(value, positive_depth_scale()))
}

/// The quadratic character of `F^*` used by [`Twist::MuTimesQuadratic`]: unramified when `E`
/// is ramified, and the Legendre symbol of the unit part (with `eta(p) = 1`) when `E` is unramified.
pub fn eta_quadratic(cfg: &FieldConfig, x: &PadicElem) -> CoverResult<i32> {
    if cfg.ram {
        Ok(if x.val()? % 2 == 0 { 1 } else { -1 })
    } else {
        Ok(x.unit_legendre()?)
    }
}

/// Which twist to put on the representation side.
#[derive(Clone, Debug)]
pub enum Twist {
    Mu,
    Trivial,
    /// `mu (eta o N)` with `eta` a quadratic character of `F^*` nontrivial on `N(E^*)`.
    MuTimesQuadratic,
    Custom(MultChar),
}

impl Twist {
    pub fn resolve(&self, pair: &AdmissiblePair) -> CoverResult<MultChar> {
        let q = pair.chi.quotient().clone();
        Ok(match self {
            Twist::Mu => build_mu(pair)?,
            Twist::Trivial => MultChar::trivial(q),
            Twist::MuTimesQuadratic => {
                let mu = build_mu(pair)?;
                let cfg = pair.cfg();
                let vals = q
                    .generators()
                    .iter()
                    .map(|g| Ok(RootOfUnity::from_sign(eta_quadratic(cfg, &cfg.norm(&q.to_ext(g)))?)))
                    .collect::<CoverResult<Vec<_>>>()?;
                mu.mul(&MultChar::from_values(q, &vals)?)
            }
            Twist::Custom(c) => c.clone(),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Twist::Mu => "mu",
            Twist::Trivial => "trivial",
            Twist::MuTimesQuadratic => "mu-eta",
            Twist::Custom(_) => "custom",
        }
    }
}

/// One sample point of a kernel comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleVerdict {
    pub w: String,
    pub depth_index: u32,
    pub formula: ReducedKernel,
    pub kernel: ReducedKernel,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub samples: Vec<SampleVerdict>,
    pub all_equal: bool,
}

impl ComparisonReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &SampleVerdict> {
        self.samples.iter().filter(|s| !s.equal)
    }
}

/// Kernel on the representation side: the positive-depth kernel, or at level zero
/// the depth-zero kernel from the finite group.
pub fn representation_kernel(pair: &AdmissiblePair, twist: &MultChar, w: &QuadExtElem) -> CoverResult<ReducedKernel> {
    if pair.minimal_level() == 0 {
        crate::gl2::depth_zero_theta_twisted(pair, twist, w, crate::gl2::DlSign::Restriction)
    } else {
        debacker_kernel(pair, twist, w)
    }
}

/// Compares `F(chi~)` with the representation kernel for `phi = chi twist` on `sample`.
pub fn compare_kernels(
    g: &GenuineChar,
    twist: &MultChar,
    tau: &MultChar,
    sample: &[QuadExtElem],
) -> CoverResult<ComparisonReport> {
    let cfg = g.pair.cfg().clone();
    let mut samples = Vec::with_capacity(sample.len());
    for w in sample {
        let f = formula_f(g, w, PositiveRoot::Standard, tau)?;
        let k = representation_kernel(&g.pair, twist, w)?;
        samples.push(SampleVerdict {
            w: w.to_string(),
            depth_index: depth_n(&cfg, w)?,
            equal: f == k,
            formula: f,
            kernel: k,
        });
    }
    let all_equal = samples.iter().all(|s| s.equal);
    Ok(ComparisonReport { samples, all_equal })
}

/// Stratified sample of regular `w` with `0 <= n(w) <= r/2`: `delta` and `1 + t delta` for
/// `t = p^j u` (`u` a unit below `p^digits`), together with their translates by a non-norm of `F^*`.
pub fn sample_points(cfg: &FieldConfig, level: u32, digits: u32) -> CoverResult<Vec<QuadExtElem>> {
    let p = cfg.p as i128;
    let mut base = vec![cfg.delta()];
    let jmax = level as i64;
    for j in -2..=jmax {
        for u in 1..pow_p(cfg.p, digits) as i128 {
            if u % p == 0 {
                continue;
            }
            let t = PadicElem::new(cfg.p, j, u, cfg.precision);
            let w = QuadExtElem::new(cfg.elem(1), t);
            if in_range(depth_n(cfg, &w)?, level) {
                base.push(w);
            }
        }
    }
    let x0 = cfg.elem(non_norm(cfg)? as i128);
    let mut out = base.clone();
    out.extend(base.iter().map(|w| cfg.scale(&x0, w)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{build_tau_tilde, enumerate_pairs};

    #[test]
    fn delta_has_depth_zero() {
        for cfg in FieldConfig::all_extensions(3, 6).unwrap() {
            assert_eq!(depth_n(&cfg, &cfg.delta()).unwrap(), 0);
        }
    }

    #[test]
    fn ramified_one_plus_p_delta() {
        let cfg = FieldConfig::new(3, 3, 6).unwrap();
        let w = cfg.ext(1, 3);
        assert_eq!(depth_n(&cfg, &w).unwrap(), 3);
        assert_eq!(depth_n_oracle(&cfg, &w, 4).unwrap(), 3);
    }

    #[test]
    fn decomposition_reassembles() {
        for cfg in FieldConfig::all_extensions(5, 6).unwrap() {
            let w = cfg.ext(7, 50);
            let (c, y) = decompose(&cfg, &w).unwrap();
            let back = cfg.scale(&c, &cfg.add(&cfg.ext(1, 0), &y));
            assert!(back.congruent(&w));
        }
    }

    #[test]
    fn kappa_round_trip_and_weyl() {
        for cfg in FieldConfig::all_extensions(3, 4).unwrap() {
            let q = crate::quotient::unit_quotient_structure(&cfg, 1, 4).unwrap();
            let tau = build_tau_tilde(&q, 0).unwrap();
            let ctx = CoverContext::new(tau).unwrap();
            for x in ctx.norm_classes() {
                let c = ctx.kappa(&x).unwrap();
                assert_eq!(ctx.kappa_inv(&c).unwrap(), x);
                assert_eq!(c.lambda.pow(2), ctx.two_rho(&c.z).unwrap());
                let lhs = ctx.kappa(&ctx.conj_class(&x)).unwrap();
                assert_eq!(ctx.weyl_act(Weyl::Conj, &c).unwrap(), lhs);
            }
        }
    }

    #[test]
    fn formula_independent_of_choices() {
        for cfg in FieldConfig::all_extensions(3, 5).unwrap() {
            let q = crate::quotient::unit_quotient_structure(&cfg, 2, 4).unwrap();
            let t0 = build_tau_tilde(&q, 0).unwrap();
            let t1 = build_tau_tilde(&q, 1).unwrap();
            for pr in enumerate_pairs(&cfg, 2, true).unwrap() {
                let g = GenuineChar::new(pr).unwrap();
                for w in sample_points(&cfg, g.pair.minimal_level(), 2).unwrap() {
                    let a = formula_f(&g, &w, PositiveRoot::Standard, &t0).unwrap();
                    assert_eq!(a, formula_f(&g, &w, PositiveRoot::Opposite, &t0).unwrap());
                    assert_eq!(a, formula_f(&g, &w, PositiveRoot::Standard, &t1).unwrap());
                }
            }
        }
    }
}
