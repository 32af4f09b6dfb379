//! Suites that run the whole correspondence end to end and collect exact verdicts
//! into a deterministic JSON report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characters::{
    base_generators, build_mu, build_tau_tilde, enumerate_pairs, AdmissiblePair, CharError, MultChar,
};
use crate::constants::{
    aleph, form_weil_index, gamma_alpha_y_routes, hilbert, langlands_constant_routes, square_class_reps, weil_index,
    weil_index_psi, AdditiveChar, ConstantsError, DiagQuadForm,
};
use crate::cover::{
    compare_kernels, depth_n, discriminant_valuation, eta_quadratic, formula_f, non_norm, representation_kernel,
    sample_points, CoverContext, CoverError, GenuineChar, PositiveRoot, Twist, Weyl,
};
use crate::exact::{CycloValue, RootOfUnity};
use crate::gl2::{self, ClassKind, DlSign, Gl2Error};
use crate::padic::{is_odd_prime, smallest_nonresidue, FieldConfig, PadicElem, PadicError, QuadExtElem};
use crate::quotient::unit_quotient_structure;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Gl2(#[from] Gl2Error),
}

pub type VerifyResult<T> = Result<T, VerifyError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    WeilIndex,
    Constants,
    Cover,
    Matching,
    DepthZero,
    Uniqueness,
    NaiveFails,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::WeilIndex,
        Suite::Constants,
        Suite::Cover,
        Suite::Matching,
        Suite::DepthZero,
        Suite::Uniqueness,
        Suite::NaiveFails,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::WeilIndex => "weil-index",
            Suite::Constants => "constants",
            Suite::Cover => "cover",
            Suite::Matching => "matching",
            Suite::DepthZero => "depth-zero",
            Suite::Uniqueness => "uniqueness",
            Suite::NaiveFails => "naive-fails",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| VerifyError::Config(format!("unknown suite {s}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub primes: Vec<u64>,
    /// Restrict to these `zeta`; empty means all three quadratic extensions.
    pub zetas: Vec<i64>,
    pub precision: u32,
    pub max_level: u32,
    pub seed: u64,
    /// Record wall-clock timings (makes the report non-reproducible).
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            primes: vec![3, 5],
            zetas: Vec::new(),
            precision: 6,
            max_level: 2,
            seed: 20,
            timings: false,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> VerifyResult<()> {
        if self.primes.is_empty() {
            return Err(VerifyError::Config("no primes given".into()));
        }
        for &p in &self.primes {
            if !is_odd_prime(p) || p > 13 {
                return Err(VerifyError::Config(format!("p = {p} is not an odd prime up to 13")));
            }
        }
        if self.precision < self.max_level + 3 {
            return Err(VerifyError::Config(format!(
                "precision {} is too small for level {} (need at least {})",
                self.precision,
                self.max_level,
                self.max_level + 3
            )));
        }
        if self.max_level > 3 {
            return Err(VerifyError::Config("max level above 3 is out of desk scale".into()));
        }
        Ok(())
    }

    /// Field configurations for every prime, filtered by `zetas`.
    pub fn fields(&self) -> VerifyResult<Vec<FieldConfig>> {
        let mut out = Vec::new();
        for &p in &self.primes {
            if self.zetas.is_empty() {
                out.extend(FieldConfig::all_extensions(p, self.precision)?);
            } else {
                for &z in &self.zetas {
                    out.push(
                        FieldConfig::new(p, z, self.precision)
                            .map_err(|e| VerifyError::Config(format!("zeta = {z} at p = {p}: {e}")))?,
                    );
                }
            }
        }
        Ok(out)
    }
}

/// One checked statement, with witnesses for failures (or separations, where asked).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<String>,
}

impl Assertion {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }

    fn with_witnesses(mut self, w: Vec<String>) -> Self {
        self.witnesses = w;
        self
    }

    /// Passes iff `failures` is empty; failures become witnesses.
    fn from_failures(name: impl Into<String>, checked: usize, failures: Vec<String>) -> Self {
        let passed = failures.is_empty();
        let detail = format!("{} of {checked} checks failed", failures.len());
        Assertion::new(name, passed, detail).with_witnesses(failures.into_iter().take(8).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
}

impl SuiteReport {
    fn new(suite: Suite, assertions: Vec<Assertion>) -> Self {
        SuiteReport {
            suite,
            passed: assertions.iter().all(|a| a.passed),
            assertions,
            elapsed_ms: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub config: VerifyConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Suite, &Assertion)> {
        self.suites
            .iter()
            .flat_map(|s| s.assertions.iter().map(move |a| (&s.suite, a)))
            .filter(|(_, a)| !a.passed)
    }
}

/// Runs `suite` (or every suite for [`Suite::All`], in parallel) under `config`.
pub fn run_suite(suite: Suite, config: &VerifyConfig) -> VerifyResult<Report> {
    config.validate()?;
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let reports = suites
        .par_iter()
        .map(|s| {
            let t = Instant::now();
            let mut r = match s {
                Suite::WeilIndex => weil_index_suite(config),
                Suite::Constants => constants_suite(config),
                Suite::Cover => cover_suite(config),
                Suite::Matching => matching_suite(config),
                Suite::DepthZero => depth_zero_suite(config),
                Suite::Uniqueness => uniqueness_suite(config),
                Suite::NaiveFails => naive_fails_suite(config),
                Suite::All => unreachable!("expanded above"),
            }?;
            if config.timings {
                r.elapsed_ms = Some(t.elapsed().as_millis() as u64);
            }
            Ok(r)
        })
        .collect::<VerifyResult<Vec<_>>>()?;
    Ok(Report {
        config: config.clone(),
        passed: reports.iter().all(|r| r.passed),
        suites: reports,
    })
}

fn label(cfg: &FieldConfig) -> String {
    format!("p={} zeta={}", cfg.p, cfg.zeta)
}

fn in_mu4(r: RootOfUnity) -> bool {
    4 % r.order() == 0
}

fn random_base_elem(rng: &mut ChaCha8Rng, p: u64, precision: u32, vals: std::ops::RangeInclusive<i64>) -> PadicElem {
    let m = p.pow(3) as i128;
    let u = loop {
        let u = rng.gen_range(1..m);
        if u % p as i128 != 0 {
            break u;
        }
    };
    PadicElem::new(p, rng.gen_range(vals), u, precision)
}

/// Weil-index calculus: multiplicativity up to the Hilbert symbol, square invariance,
/// `gamma(-1) = gamma(psi)^{-2}`, `gamma(a)^2 = (-1, a)`, the level sign on unit nonsquares,
/// and the Hasse invariant of binary forms.
pub fn weil_index_suite(config: &VerifyConfig) -> VerifyResult<SuiteReport> {
    let mut out = Vec::new();
    let mut primes = config.primes.clone();
    primes.dedup();
    for &p in &primes {
        let prec = config.precision;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ p);
        let reps = square_class_reps(p, prec);
        let mut elems = reps.clone();
        elems.extend((0..12).map(|_| random_base_elem(&mut rng, p, prec, 0..=3)));
        elems.push(PadicElem::from_int(p, -1, prec));
        let squares = [
            PadicElem::from_int(p, p as i128, prec),
            PadicElem::from_int(p, 1 + p as i128, prec),
            PadicElem::from_int(p, smallest_nonresidue(p) as i128, prec),
        ];
        let minus_one = PadicElem::from_int(p, -1, prec);
        for level in 0..=2 {
            let psi = AdditiveChar::new(p, level);
            let tag = format!("p={p} level={level}");
            let g = |a: &PadicElem| weil_index(a, &psi);

            let mut fails = Vec::new();
            let mut n = 0;
            for a in &elems {
                for b in &elems {
                    n += 1;
                    let lhs = g(&a.mul(b))?;
                    let rhs = RootOfUnity::from_sign(hilbert(a, b)?) * g(a)? * g(b)?;
                    if lhs != rhs {
                        fails.push(format!("a={a} b={b}: {lhs} vs {rhs}"));
                    }
                }
                for c in &squares {
                    n += 1;
                    if g(&a.mul(&c.mul(c)))? != g(a)? {
                        fails.push(format!("a={a} c={c}: not square invariant"));
                    }
                }
            }
            out.push(Assertion::from_failures(format!("multiplicativity {tag}"), n, fails));

            let lhs = g(&minus_one)?;
            let rhs = weil_index_psi(&psi).pow(-2);
            out.push(Assertion::new(
                format!("gamma(-1) = gamma(psi)^-2 {tag}"),
                lhs == rhs,
                format!("{lhs} vs {rhs}"),
            ));

            let mut fails = Vec::new();
            for a in &reps {
                let v = g(a)?;
                if v.pow(2) != RootOfUnity::from_sign(hilbert(&minus_one, a)?) {
                    fails.push(format!("a={a}: gamma^2 = {}", v.pow(2)));
                }
            }
            out.push(Assertion::from_failures(format!("gamma(a)^2 = (-1, a) {tag}"), reps.len(), fails));

            let u = PadicElem::from_int(p, smallest_nonresidue(p) as i128, prec);
            let v = g(&u)?;
            let want = RootOfUnity::from_sign(if level % 2 == 0 { 1 } else { -1 });
            out.push(Assertion::new(
                format!("unit nonsquare sign (-1)^level {tag}"),
                v == want,
                format!("{v} vs {want}"),
            ));

            let mut fails = Vec::new();
            let mut n = 0;
            for a1 in &elems {
                for a2 in &elems {
                    n += 1;
                    let q = DiagQuadForm::new(vec![*a1, *a2])?;
                    let w = form_weil_index(&q, &psi)?
                        .as_root()
                        .ok_or_else(|| VerifyError::Config("form index not a root".into()))?;
                    let h = w * weil_index_psi(&psi).pow(-2) * g(&q.det())?.inv();
                    let want = RootOfUnity::from_sign(hilbert(a1, a2)?);
                    if h != want || !in_mu4(w) {
                        fails.push(format!("({a1}, {a2}): h = {h}, want {want}"));
                    }
                }
            }
            out.push(Assertion::from_failures(format!("Hasse invariant of binary forms {tag}"), n, fails));

            let all4 = elems.iter().all(|a| g(a).map(in_mu4).unwrap_or(false));
            out.push(Assertion::new(format!("values in mu_4 {tag}"), all4, ""));
        }
    }
    Ok(SuiteReport::new(Suite::WeilIndex, out))
}

/// `lambda_{E/F}(psi)` by both routes, and `gamma(alpha, Y)` by both routes on random inputs.
pub fn constants_suite(config: &VerifyConfig) -> VerifyResult<SuiteReport> {
    let mut out = Vec::new();
    for cfg in config.fields()? {
        let tag = label(&cfg);
        let mut fails = Vec::new();
        for level in 0..=2 {
            let psi = AdditiveChar::new(cfg.p, level);
            let (i, ii) = langlands_constant_routes(&cfg, &psi)?;
            if i != ii {
                fails.push(format!("level {level}: form {i}, closed form {ii}"));
            }
        }
        out.push(Assertion::from_failures(format!("lambda routes agree {tag}"), 3, fails));

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (cfg.p << 8) ^ cfg.zeta as u64);
        let psi = AdditiveChar::standard(cfg.p);
        let mut fails = Vec::new();
        let zero = PadicElem::zero(cfg.p, 2 * cfg.precision as i64);
        let n = 120;
        for _ in 0..n {
            let x = random_base_elem(&mut rng, cfg.p, cfg.precision, -2..=2);
            let y = random_base_elem(&mut rng, cfg.p, cfg.precision, -2..=2);
            let (alpha, yy) = (QuadExtElem::new(zero, x), QuadExtElem::new(zero, y));
            let (i, ii) = gamma_alpha_y_routes(&cfg, &alpha, &yy, &psi)?;
            if i != ii {
                fails.push(format!("x={x} y={y}: form {i}, closed form {ii}"));
            }
        }
        out.push(Assertion::from_failures(format!("gamma(alpha, Y) routes agree {tag}"), n, fails));

        let mut fails = Vec::new();
        for _ in 0..50 {
            let a = rng.gen_range(-500i128..500);
            let b = rng.gen_range(1i128..500);
            let w = cfg.ext(a, b);
            if aleph(&cfg, &cfg.norm(&w))? != 1 {
                fails.push(format!("w={w}"));
            }
        }
        out.push(Assertion::from_failures(format!("aleph trivial on norms {tag}"), 50, fails));
    }
    Ok(SuiteReport::new(Suite::Constants, out))
}

/// `kappa` and its inverse, multiplicativity, Weyl equivariance, genuineness, and
/// independence of `F(chi~)` from the choices of `tau~` and positive root.
pub fn cover_suite(config: &VerifyConfig) -> VerifyResult<SuiteReport> {
    let fields = config.fields()?;
    let parts = fields
        .par_iter()
        .map(|cfg| cover_checks(cfg, config))
        .collect::<VerifyResult<Vec<_>>>()?;
    Ok(SuiteReport::new(Suite::Cover, parts.into_iter().flatten().collect()))
}

fn cover_checks(cfg: &FieldConfig, config: &VerifyConfig) -> VerifyResult<Vec<Assertion>> {
    let tag = label(cfg);
    let level = config.max_level;
    let q = unit_quotient_structure(cfg, level, crate::characters::DEFAULT_UNIFORMIZER_ORDER)?;
    let taus = crate::characters::aleph_extensions(&q)?;
    let (t0, t1) = (build_tau_tilde(&q, 0)?, build_tau_tilde(&q, taus.len() - 1)?);
    let mut out = Vec::new();
    let ctx = CoverContext::new(t0.clone())?;
    let classes = ctx.norm_classes();
    let nn = q.from_base_int(non_norm(cfg)?)?;

    let mut fails = Vec::new();
    for x in &classes {
        let c = ctx.kappa(x)?;
        if ctx.kappa_inv(&c)? != *x {
            fails.push(format!("round trip at {x:?}"));
        }
        if c.lambda.pow(2) != ctx.two_rho(&c.z)? {
            fails.push(format!("lambda^2 != tau(z/z-bar) at {x:?}"));
        }
        if ctx.kappa(&q.op(x, &nn))? != ctx.deck(&c) {
            fails.push(format!("non-norm does not act as the deck transformation at {x:?}"));
        }
        if ctx.weyl_act(Weyl::Conj, &c)? != ctx.kappa(&ctx.conj_class(x))? {
            fails.push(format!("Weyl equivariance at {x:?}"));
        }
        if ctx.weyl_act(Weyl::Conj, &ctx.weyl_act(Weyl::Conj, &c)?)? != c {
            fails.push(format!("Weyl action not an involution at {x:?}"));
        }
    }
    out.push(Assertion::from_failures(
        format!("kappa bijective, Weyl-equivariant {tag}"),
        classes.len(),
        fails,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ cfg.zeta as u64);
    let mut fails = Vec::new();
    for _ in 0..100 {
        let a = classes[rng.gen_range(0..classes.len())];
        let b = classes[rng.gen_range(0..classes.len())];
        let lhs = ctx.kappa(&q.op(&a, &b))?;
        let rhs = ctx.mul(&ctx.kappa(&a)?, &ctx.kappa(&b)?);
        if lhs != rhs {
            fails.push(format!("{a:?} * {b:?}"));
        }
    }
    out.push(Assertion::from_failures(format!("kappa multiplicative {tag}"), 100, fails));

    let pairs = enumerate_pairs(cfg, level, true)?;
    let mut fails = Vec::new();
    let mut checked = 0;
    for pr in pairs {
        let idx = pr.chi.index();
        let g = match GenuineChar::new(pr) {
            Ok(g) => g,
            Err(e) => {
                fails.push(format!("chi#{idx}: {e}"));
                continue;
            }
        };
        if g.central_value()? != RootOfUnity::minus_one() {
            fails.push(format!("chi#{idx}: not genuine"));
        }
        for w in sample_points(cfg, g.pair.minimal_level(), 2)? {
            checked += 1;
            let a = formula_f(&g, &w, PositiveRoot::Standard, &t0)?;
            if a != formula_f(&g, &w, PositiveRoot::Opposite, &t0)? {
                fails.push(format!("chi#{idx} w={w}: positive root flip"));
            }
            if a != formula_f(&g, &w, PositiveRoot::Standard, &t1)? {
                fails.push(format!("chi#{idx} w={w}: tau swap"));
            }
            let u = loop {
                let u = rng.gen_range(1..50i128);
                if u % cfg.p as i128 != 0 {
                    break u;
                }
            };
            let c = cfg.elem(u * (cfg.p as i128).pow(rng.gen_range(0..2)));
            if a != formula_f(&g, &cfg.scale(&c, &w), PositiveRoot::Standard, &t0)? {
                fails.push(format!("chi#{idx} w={w}: rescaling by {c}"));
            }
        }
    }
    out.push(Assertion::from_failures(
        format!("genuine characters, F independent of choices {tag}"),
        checked,
        fails,
    ));
    Ok(out)
}

fn matching_digits(p: u64) -> u32 {
    if p == 3 {
        3
    } else {
        2
    }
}

/// Kernel comparison for one pair and twist on its stratified sample.
pub fn compare_pair(pair: &AdmissiblePair, twist: &Twist) -> VerifyResult<crate::cover::ComparisonReport> {
    let cfg = pair.cfg().clone();
    let g = GenuineChar::new(pair.clone())?;
    let tau = build_tau_tilde(pair.chi.quotient(), 0)?;
    let sample = sample_points(&cfg, pair.minimal_level(), matching_digits(cfg.p))?;
    let tw = twist.resolve(pair)?;
    Ok(compare_kernels(&g, &tw, &tau, &sample)?)
}

/// `F(chi~)` against the representation kernel with the `mu` twist, every PGL pair.
pub fn matching_suite(config: &VerifyConfig) -> VerifyResult<SuiteReport> {
    let mut out = Vec::new();
    for cfg in config.fields()? {
        let pairs = enumerate_pairs(&cfg, config.max_level, true)?;
        let results = pairs
            .par_iter()
            .map(|pr| Ok((pr.chi.index(), pr.minimal, compare_pair(pr, &Twist::Mu)?)))
            .collect::<VerifyResult<Vec<_>>>()?;
        let mut fails = Vec::new();
        let mut points = 0;
        let mut fewest = usize::MAX;
        for (idx, _, r) in &results {
            points += r.samples.len();
            fewest = fewest.min(r.samples.len());
            for m in r.mismatches().take(2) {
                fails.push(format!("chi#{idx} w={}: F={} kernel={}", m.w, m.formula, m.kernel));
            }
        }
        let minimal = results.iter().filter(|r| r.1).count();
        let mut a = Assertion::from_failures(format!("F = kernel with mu twist {}", label(&cfg)), points, fails);
        a.detail = format!(
            "{} pairs ({minimal} minimal), {points} points, at least {} per pair; {}",
            results.len(),
            if fewest == usize::MAX { 0 } else { fewest },
            a.detail
        );
        out.push(a);
        out.push(Assertion::new(
            format!("at least 50 points per pair {}", label(&cfg)),
            fewest >= 50 || results.is_empty(),
            format!("fewest {fewest}"),
        ));
    }
    Ok(SuiteReport::new(Suite::Matching, out))
}

/// With the trivial twist some sample mismatches in every configuration; with `mu (eta o N)` the
/// kernel is the `mu` kernel times `eta(N w)`.
pub fn naive_fails_suite(config: &VerifyConfig) -> VerifyResult<SuiteReport> {
    let mut out = Vec::new();
    for cfg in config.fields()? {
        let pairs = enumerate_pairs(&cfg, config.max_level, true)?;
        let per_pair = pairs
            .par_iter()
            .map(|pr| -> VerifyResult<(Option<String>, Vec<String>, bool)> {
                let r = compare_pair(pr, &Twist::Trivial)?;
                let witness = r
                    .mismatches()
                    .next()
                    .map(|m| format!("chi#{} w={}: F={} kernel={}", pr.chi.index(), m.w, m.formula, m.kernel));
                let mu = Twist::Mu.resolve(pr)?;
                let mu_eta = Twist::MuTimesQuadratic.resolve(pr)?;
                let sample = sample_points(&cfg, pr.minimal_level(), matching_digits(cfg.p))?;
                let mut bad = Vec::new();
                let mut moved = false;
                for w in &sample {
                    let k = representation_kernel(pr, &mu, w)?;
                    let ke = representation_kernel(pr, &mu_eta, w)?;
                    let s = eta_quadratic(&cfg, &cfg.norm(w))?;
                    moved |= s == -1;
                    if ke.value != k.value.clone().mul_root(RootOfUnity::from_sign(s)) {
                        bad.push(format!("chi#{} w={w}", pr.chi.index()));
                    }
                }
                Ok((witness, bad, moved))
            })
            .collect::<VerifyResult<Vec<_>>>()?;
        let witnesses: Vec<String> = per_pair.iter().filter_map(|x| x.0.clone()).collect();
        out.push(
            Assertion::new(
                format!("trivial twist mismatches {}", label(&cfg)),
                !witnesses.is_empty() || pairs.is_empty(),
                format!("{} of {} pairs mismatch", witnesses.len(), pairs.len()),
            )
            .with_witnesses(witnesses.into_iter().take(4).collect()),
        );
        let bad: Vec<String> = per_pair.iter().flat_map(|x| x.1.clone()).collect();
        let moved = per_pair.iter().any(|x| x.2);
        let mut a = Assertion::from_failures(
            format!("quadratic twist multiplies the kernel by eta(N w) {}", label(&cfg)),
            per_pair.len(),
            bad,
        );
        a.passed &= moved || pairs.is_empty();
        out.push(a);
    }
    Ok(SuiteReport::new(Suite::NaiveFails, out))
}

/// The finite group checks for `q` in the configured primes, then `F(chi~)` against the
/// depth-zero kernel on an exhaustive sample of `F^* A` for every level-zero PGL pair.
pub fn depth_zero_suite(config: &VerifyConfig) -> VerifyResult<SuiteReport> {
    let mut out = Vec::new();
    let mut primes = config.primes.clone();
    primes.dedup();
    for &q in &primes {
        let g = gl2::class_inventory(q)?;
        let tag = format!("q={q}");
        let total: u64 = g.classes.iter().map(|c| c.size).sum();
        out.push(Assertion::new(
            format!("class inventory {tag}"),
            total == g.order() && g.classes.len() as u64 == q * q - 1,
            format!("{} classes, sizes sum to {total}", g.classes.len()),
        ));
        if q <= 5 {
            let bf = gl2::brute_force_class_sizes(&g);
            let ok = bf.len() == g.classes.len() && g.classes.iter().all(|c| bf.get(&c.kind) == Some(&c.size));
            out.push(Assertion::new(format!("class sizes by enumeration {tag}"), ok, ""));
        }
        let reps = gl2::regular_theta_reps(q);
        let mut fails = Vec::new();
        for t in &reps {
            let c = gl2::certify_cuspidal(&g, t)?;
            if !c.ok() {
                fails.push(format!("{c:?}"));
            }
        }
        let oracles: Vec<_> = reps.iter().map(|t| gl2::cuspidal_oracle(&g, t)).collect::<Result<_, _>>()?;
        for i in 0..oracles.len() {
            for j in i + 1..oracles.len() {
                if oracles[i] == oracles[j] {
                    fails.push(format!("theta {} and {} give the same character", reps[i].j, reps[j].j));
                }
            }
        }
        if reps.len() as u64 != q * (q - 1) / 2 {
            fails.push(format!("{} Frobenius orbits of regular theta", reps.len()));
        }
        out.push(Assertion::from_failures(format!("cuspidal oracle certified {tag}"), reps.len(), fails));
        out.push(Assertion::new(
            format!("column orthogonality {tag}"),
            gl2::column_orthogonality(&g),
            "",
        ));
        let mut fails = Vec::new();
        let mut n = 0;
        for (t, chi) in reps.iter().zip(&oracles) {
            for (c, v) in g.classes.iter().zip(chi) {
                if let ClassKind::Elliptic { .. } = c.kind {
                    n += 1;
                    let r = gl2::dl_restriction(&g, t, &c.kind)?;
                    if r != -v.clone() || r != gl2::dl_restriction(&g, &t.frobenius(), &c.kind)? {
                        fails.push(format!("theta {} class {}", t.j, c.label()));
                    }
                }
            }
        }
        let mut a = Assertion::from_failures(format!("restriction formula = -cuspidal on elliptic classes {tag}"), n, fails);
        a.detail = format!("sign relation -1; {}", a.detail);
        out.push(a);
    }

    for cfg in config.fields()?.into_iter().filter(|c| !c.ram) {
        let tag = label(&cfg);
        let pairs = enumerate_pairs(&cfg, 0, true)?;
        let sample = gl2::depth_zero_sample(&cfg);
        let mut fails = Vec::new();
        let mut neg_fails = Vec::new();
        let mut side = Vec::new();
        for pr in &pairs {
            let g = GenuineChar::new(pr.clone())?;
            let tau = build_tau_tilde(pr.chi.quotient(), 0)?;
            let mu = build_mu(pr)?;
            let r = compare_kernels(&g, &mu, &tau, &sample)?;
            for m in r.mismatches().take(2) {
                fails.push(format!("chi#{} w={}: F={} kernel={}", pr.chi.index(), m.w, m.formula, m.kernel));
            }
            for (w, s) in sample.iter().zip(&r.samples) {
                let k = gl2::depth_zero_theta(pr, w, DlSign::Cuspidal)?;
                if k.value != -s.formula.value.clone() {
                    neg_fails.push(format!("chi#{} w={w}", pr.chi.index()));
                }
                if depth_n(&cfg, w)? != 0 {
                    side.push(format!("w={w}: positive depth"));
                }
                // w in A: b a unit
                if w.b.val()? == 0 {
                    let d = cfg.sub(w, &cfg.conj(w));
                    let two_delta = cfg.ext(0, 2);
                    let t = tau.eval(&cfg.div(&d, &two_delta)?)?;
                    if discriminant_valuation(&cfg, w)? != 0 || !t.is_one() || !mu.eval(w)?.is_one() {
                        side.push(format!("w={w}: |D|, tau or mu not trivial on A"));
                    }
                }
            }
        }
        let n = pairs.len() * sample.len();
        let mut a = Assertion::from_failures(format!("F = depth-zero kernel on F^*A {tag}"), n, fails);
        a.detail = format!("{} level-zero pairs, {} points each; {}", pairs.len(), sample.len(), a.detail);
        out.push(a);
        out.push(Assertion::from_failures(
            format!("cuspidal-sign kernel = -F on F^*A {tag}"),
            n,
            neg_fails,
        ));
        out.push(Assertion::from_failures(format!("F^*A has depth zero, |D| = tau = mu = 1 on A {tag}"), n, side));
    }
    Ok(SuiteReport::new(Suite::DepthZero, out))
}

/// A Langlands parameter `Ind chi` recorded through its inducing pair.
#[derive(Clone, Debug)]
pub struct WeilParamSpec {
    pub pair: AdmissiblePair,
    /// `det(Ind chi) = chi|_{F^*} aleph` on [`base_generators`].
    pub determinant: Vec<RootOfUnity>,
}

impl WeilParamSpec {
    pub fn new(pair: AdmissiblePair) -> VerifyResult<Self> {
        let determinant = determinant_of_induction(&pair.chi)?;
        Ok(WeilParamSpec { pair, determinant })
    }

    pub fn is_pgl(&self) -> bool {
        self.determinant.iter().all(|r| r.is_one())
    }
}

/// `chi|_{F^*} aleph` on the base generators, from the definitions.
pub fn determinant_of_induction(chi: &MultChar) -> VerifyResult<Vec<RootOfUnity>> {
    let cfg = chi.cfg().clone();
    base_generators(&cfg)
        .into_iter()
        .map(|x| Ok(chi.eval_int(x)? * RootOfUnity::from_sign(aleph(&cfg, &cfg.elem(x as i128))?)))
        .collect()
}

pub fn param_to_genuine(param: &WeilParamSpec) -> VerifyResult<GenuineChar> {
    if !param.is_pgl() {
        return Err(CoverError::NotGenuine.into());
    }
    Ok(GenuineChar::new(param.pair.clone())?)
}

/// Values of `F(chi~)` on a fixed set of depth-zero points.
fn depth_zero_profile(g: &GenuineChar, tau: &MultChar, sample: &[QuadExtElem]) -> VerifyResult<Vec<CycloValue>> {
    sample
        .iter()
        .map(|w| Ok(formula_f(g, w, PositiveRoot::Standard, tau)?.value))
        .collect()
}

fn depth_zero_points(cfg: &FieldConfig) -> VerifyResult<Vec<QuadExtElem>> {
    Ok(sample_points(cfg, 0, matching_digits(cfg.p))?)
}

/// Same-Cartan, cross-Cartan and cross-depth separation, plus the parameter bookkeeping.
pub fn uniqueness_suite(config: &VerifyConfig) -> VerifyResult<SuiteReport> {
    let mut out = Vec::new();
    let level = config.max_level.min(1);
    let fields = config.fields()?;

    for cfg in &fields {
        let tag = label(cfg);
        let pairs = enumerate_pairs(cfg, level, true)?;
        let q = unit_quotient_structure(cfg, level, crate::characters::DEFAULT_UNIFORMIZER_ORDER)?;
        let tau = build_tau_tilde(&q, 0)?;
        let sample = depth_zero_points(cfg)?;
        let gens: Vec<GenuineChar> = pairs
            .iter()
            .map(|p| param_to_genuine(&WeilParamSpec::new(p.clone())?))
            .collect::<VerifyResult<_>>()?;
        let profiles = gens
            .par_iter()
            .map(|g| depth_zero_profile(g, &tau, &sample))
            .collect::<VerifyResult<Vec<_>>>()?;

        let mut fails = Vec::new();
        let mut conj = 0;
        for i in 0..gens.len() {
            let gi = gens[i].chi();
            let pc = depth_zero_profile(&GenuineChar::new(AdmissiblePair::new(gi.galois_conjugate(), gens[i].pair.psi)?)?, &tau, &sample)?;
            if pc == profiles[i] {
                conj += 1;
            } else {
                fails.push(format!("chi#{}: conjugate gives a different kernel", gi.index()));
            }
            for j in i + 1..gens.len() {
                if profiles[i] == profiles[j] && gens[j].chi().galois_conjugate() != *gi {
                    fails.push(format!("chi#{} and chi#{} collide", gi.index(), gens[j].chi().index()));
                }
            }
            if profiles[i].iter().all(|v| v.is_zero()) {
                fails.push(format!("chi#{}: kernel vanishes on every depth-zero point", gi.index()));
            }
        }
        let mut a = Assertion::from_failures(format!("same Cartan: only conjugate collisions {tag}"), gens.len(), fails);
        a.detail = format!(
            "{} pairs of level <= {level}, {} points, {conj} conjugate collisions; {}",
            gens.len(),
            sample.len(),
            a.detail
        );
        out.push(a);

        let mut fails = Vec::new();
        for (pr, g) in pairs.iter().zip(&gens) {
            let det = determinant_of_induction(&pr.chi)?;
            if !det.iter().all(|r| r.is_one()) || g.central_value()? != RootOfUnity::minus_one() {
                fails.push(format!("chi#{}", pr.chi.index()));
            }
        }
        out.push(Assertion::from_failures(format!("determinant of induction trivial {tag}"), pairs.len(), fails));
    }

    for e in &fields {
        for e1 in &fields {
            if e.p != e1.p || e.zeta == e1.zeta {
                continue;
            }
            out.push(cross_cartan(e, e1, level)?);
        }
    }

    for cfg in fields.iter().filter(|c| !c.ram) {
        out.push(cross_depth(cfg, config.max_level.max(1))?);
    }
    Ok(SuiteReport::new(Suite::Uniqueness, out))
}

/// Depth-zero element shapes `p^m v delta`, `p^n u + p^m v delta` with `n = m`, and with `n > m`.
fn shape(w: &QuadExtElem) -> &'static str {
    match (w.a.valuation(), w.b.valuation()) {
        (None, _) => "i",
        (Some(n), Some(m)) if n == m => "ii",
        _ => "iii",
    }
}

/// Native kernels of `E` are somewhere nonzero on `n(w) = 0`, and the determinant
/// obstruction against `E_1` holds where the separation argument uses it.
fn cross_cartan(e: &FieldConfig, e1: &FieldConfig, level: u32) -> VerifyResult<Assertion> {
    let name = format!("cross Cartan zeta={} vs zeta={} at p={}", e.zeta, e1.zeta, e.p);
    let pairs = enumerate_pairs(e, level, true)?;
    let q = unit_quotient_structure(e, level, crate::characters::DEFAULT_UNIFORMIZER_ORDER)?;
    let tau = build_tau_tilde(&q, 0)?;
    let mut sample = depth_zero_points(e)?;
    sample.push(e.ext(0, 1));
    sample.push(e.ext(e.p as i128, e.p as i128));
    sample.retain(|w| depth_n(e, w).is_ok_and(|k| k == 0));
    let z1 = e1.zeta_elem();
    let minus_one = e.elem(-1);
    let split = hilbert(&minus_one, &e.elem(e.p as i128))?;
    let mut witnesses = Vec::new();
    let mut fails = Vec::new();

    let mut obstructed = Vec::new();
    for w in &sample {
        let d = e.norm(w);
        obstructed.push((shape(w), hilbert(&d, &z1)? == -1));
    }
    let case = match (e.ram, e1.ram) {
        (true, false) => "ramified vs unramified",
        (false, true) => "unramified vs ramified",
        _ => "ramified vs ramified",
    };
    match (e.ram, e1.ram) {
        (true, _) => {
            if let Some((s, _)) = obstructed.iter().find(|(_, o)| !o) {
                fails.push(format!("shape {s}: det(w) is a norm from E_1"));
            }
        }
        (false, true) => {
            // shapes (i) and (iii) are obstructed exactly when (-1, p) = 1
            for (s, o) in &obstructed {
                if *s != "ii" && *o != (split == 1) {
                    fails.push(format!("shape {s}: obstruction {o} with (-1,p) = {split}"));
                }
            }
        }
        (false, false) => unreachable!("distinct unramified extensions"),
    }

    for pr in pairs {
        let g = GenuineChar::new(pr)?;
        let hit = sample.iter().find_map(|w| {
            formula_f(&g, w, PositiveRoot::Standard, &tau)
                .ok()
                .filter(|k| !k.value.is_zero())
                .map(|k| (w, k))
        });
        match hit {
            Some((w, k)) => witnesses.push(format!(
                "chi#{} w={w} shape {} F={} (det w, zeta_1) = {}",
                g.chi().index(),
                shape(w),
                k.value,
                hilbert(&e.norm(w), &z1)?
            )),
            None => fails.push(format!("chi#{}: no nonvanishing witness", g.chi().index())),
        }
    }
    let passed = fails.is_empty();
    let detail = format!("{case}, (-1,p) = {split}; {} witnesses; {}", witnesses.len(), fails.join("; "));
    witnesses.truncate(6);
    Ok(Assertion::new(name, passed, detail).with_witnesses(witnesses))
}

/// Level-zero and positive-level kernels on a shared depth-zero sample are never equal,
/// and each pair is inseparable from itself.
fn cross_depth(cfg: &FieldConfig, level: u32) -> VerifyResult<Assertion> {
    let pairs = enumerate_pairs(cfg, level, true)?;
    let q = unit_quotient_structure(cfg, level, crate::characters::DEFAULT_UNIFORMIZER_ORDER)?;
    let tau = build_tau_tilde(&q, 0)?;
    let sample = gl2::depth_zero_sample(cfg);
    let kernels = pairs
        .par_iter()
        .map(|pr| -> VerifyResult<(u32, u64, Vec<crate::exact::ReducedKernel>)> {
            let g = GenuineChar::new(pr.clone())?;
            let ks = sample
                .iter()
                .map(|w| Ok(formula_f(&g, w, PositiveRoot::Standard, &tau)?))
                .collect::<VerifyResult<Vec<_>>>()?;
            Ok((pr.minimal_level(), pr.chi.index(), ks))
        })
        .collect::<VerifyResult<Vec<_>>>()?;
    let mut fails = Vec::new();
    let mut witnesses = Vec::new();
    let mut n = 0;
    for (l0, i0, k0) in kernels.iter().filter(|k| k.0 == 0) {
        for (l1, i1, k1) in kernels.iter().filter(|k| k.0 > 0) {
            n += 1;
            let by_value = k0.iter().zip(k1).position(|(a, b)| a.value != b.value);
            match by_value {
                Some(ix) => {
                    if witnesses.len() < 6 {
                        witnesses.push(format!(
                            "chi#{i0} (level {l0}) vs chi#{i1} (level {l1}) at w={}: {} vs {}",
                            sample[ix], k0[ix], k1[ix]
                        ));
                    }
                }
                None => fails.push(format!("chi#{i0} vs chi#{i1}: equal values")),
            }
        }
    }
    for (_, i, k) in &kernels {
        if k.iter().zip(k.iter()).any(|(a, b)| a != b) {
            fails.push(format!("chi#{i} separated from itself"));
        }
    }
    let passed = fails.is_empty() && n > 0;
    Ok(Assertion::new(
        format!("cross depth {}", label(cfg)),
        passed,
        format!("{n} level-zero/positive-level comparisons; {}", fails.join("; ")),
    )
    .with_witnesses(witnesses))
}

/// CSV of a comparison: `w,depth,formula,kernel,equal`.
pub fn comparison_csv(r: &crate::cover::ComparisonReport) -> String {
    let mut s = String::from("w,depth,formula,kernel,equal\n");
    for v in &r.samples {
        s.push_str(&format!(
            "\"{}\",{},\"{}\",\"{}\",{}\n",
            v.w, v.depth_index, v.formula, v.kernel, v.equal
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            primes: vec![3],
            max_level: 1,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn low_precision_is_a_config_error() {
        let c = VerifyConfig {
            precision: 2,
            ..VerifyConfig::default()
        };
        assert!(matches!(run_suite(Suite::Cover, &c), Err(VerifyError::Config(_))));
    }

    #[test]
    fn weil_index_at_three() {
        let r = run_suite(Suite::WeilIndex, &small()).unwrap();
        assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite(Suite::Constants, &small()).unwrap().to_json();
        let b = run_suite(Suite::Constants, &small()).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn trivial_restriction_is_not_genuine() {
        let cfg = FieldConfig::new(3, 3, 6).unwrap();
        let pr = enumerate_pairs(&cfg, 1, false)
            .unwrap()
            .into_iter()
            .find(|p| p.chi.restriction_to_base().unwrap().iter().all(|r| r.is_one()))
            .expect("pair with trivial restriction");
        let param = WeilParamSpec::new(pr).unwrap();
        assert!(!param.is_pgl());
        assert!(param_to_genuine(&param).is_err());
    }
}
