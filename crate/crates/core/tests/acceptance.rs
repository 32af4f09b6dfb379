use std::io::Write;
use std::time::{Duration, Instant};

use pgl2_llc::cover::{depth_n, depth_n_oracle};
use pgl2_llc::verifier::{run_suite, Report, Suite, VerifyConfig};
use pgl2_llc::{FieldConfig, PadicElem, QuadExtElem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Written past the test harness capture so the verdicts land in the log.
fn verdict(n: u32, title: &str, passed: bool, detail: &str, elapsed: Duration) {
    let word = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n:>2} {word} {title} ({detail}, {:.1}s)",
        elapsed.as_secs_f64()
    );
}

fn suite_criterion(n: u32, title: &str, suite: Suite, config: VerifyConfig, limit: Duration) -> Report {
    let t = Instant::now();
    let report = run_suite(suite, &config).expect("suite runs");
    let elapsed = t.elapsed();
    let assertions: Vec<_> = report.suites.iter().flat_map(|s| &s.assertions).collect();
    let ok = assertions.iter().filter(|a| a.passed).count();
    let passed = report.passed && elapsed < limit;
    verdict(n, title, passed, &format!("{ok}/{} assertions", assertions.len()), elapsed);
    for (s, a) in report.failures() {
        let _ = writeln!(std::io::stderr(), "    {s}: {} ({}) {:?}", a.name, a.detail, a.witnesses);
    }
    assert!(report.passed, "criterion {n} has failing assertions");
    assert!(elapsed < limit, "criterion {n} took {elapsed:?}, limit {limit:?}");
    report
}

fn primes(ps: &[u64]) -> VerifyConfig {
    VerifyConfig {
        primes: ps.to_vec(),
        ..VerifyConfig::default()
    }
}

#[test]
fn criterion_01_weil_index() {
    suite_criterion(
        1,
        "Weil index identities, p in {3,5,7}, psi levels 0..2",
        Suite::WeilIndex,
        primes(&[3, 5, 7]),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_02_langlands_constant() {
    let r = suite_criterion(
        2,
        "Langlands constant by both routes, six (p, E) configurations",
        Suite::Constants,
        primes(&[3, 5]),
        Duration::from_secs(5),
    );
    let lambda = r.suites[0].assertions.iter().filter(|a| a.name.starts_with("lambda")).count();
    assert_eq!(lambda, 6);
}

#[test]
fn criterion_03_gamma_dual_route() {
    let r = suite_criterion(
        3,
        "gamma(alpha, Y) closed form against the form Weil index, 120 inputs per configuration",
        Suite::Constants,
        primes(&[3, 5]),
        Duration::from_secs(30),
    );
    let gamma: Vec<_> = r.suites[0].assertions.iter().filter(|a| a.name.starts_with("gamma")).collect();
    assert_eq!(gamma.len(), 6);
    assert!(gamma.iter().all(|a| a.detail.ends_with("of 120 checks failed")));
}

fn random_regular(rng: &mut ChaCha8Rng, cfg: &FieldConfig) -> QuadExtElem {
    let p = cfg.p as i128;
    let mut unit = || loop {
        let u = rng.gen_range(1..p.pow(4));
        if u % p != 0 {
            break u;
        }
    };
    let (ua, ub) = (unit(), unit());
    let vb = rng.gen_range(-1i64..=3);
    let gap = rng.gen_range(-2i64..=3);
    let b = PadicElem::new(cfg.p, vb, ub, cfg.precision);
    let a = if rng.gen_ratio(1, 10) {
        PadicElem::zero(cfg.p, 2 * cfg.precision as i64)
    } else {
        PadicElem::new(cfg.p, vb - gap, ua, cfg.precision)
    };
    QuadExtElem::new(a, b)
}

#[test]
fn criterion_04_filtration_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut checked = 0;
    let mut positive = 0;
    let mut fails = Vec::new();
    for p in [3u64, 5] {
        for cfg in FieldConfig::all_extensions(p, 6).unwrap() {
            for _ in 0..200 {
                let w = random_regular(&mut rng, &cfg);
                let n = depth_n(&cfg, &w).unwrap();
                let oracle = depth_n_oracle(&cfg, &w, 4).unwrap();
                checked += 1;
                positive += usize::from(n > 0);
                if n != oracle {
                    fails.push(format!("p={p} zeta={} w={w:?}: {n} vs {oracle}", cfg.zeta));
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let passed = fails.is_empty() && elapsed < Duration::from_secs(60);
    let detail = format!("{checked} elements, {positive} of positive depth, {} disagreements", fails.len());
    verdict(4, "depth against coset search, 200 random w per configuration", passed, &detail, elapsed);
    assert!(fails.is_empty(), "{fails:?}");
    assert!(positive > 0 && positive < checked);
    assert!(elapsed < Duration::from_secs(60));
}

#[test]
fn criterion_05_cover() {
    suite_criterion(
        5,
        "cover isomorphism, Weyl action, genuineness, choice independence",
        Suite::Cover,
        primes(&[3, 5]),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_06_positive_depth_matching() {
    let r = suite_criterion(
        6,
        "F against the kernel with the mu twist, level <= 2",
        Suite::Matching,
        primes(&[3, 5]),
        Duration::from_secs(600),
    );
    assert_eq!(r.suites[0].assertions.len(), 12);
}

#[test]
fn criterion_07_twist_necessity() {
    suite_criterion(
        7,
        "trivial twist mismatches in every configuration",
        Suite::NaiveFails,
        primes(&[3, 5]),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_08_depth_zero() {
    suite_criterion(
        8,
        "cuspidal oracle, restriction formula, depth-zero matching, q in {3,5}",
        Suite::DepthZero,
        primes(&[3, 5]),
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_09_uniqueness() {
    let r = suite_criterion(
        9,
        "same-Cartan, cross-Cartan and cross-depth separation",
        Suite::Uniqueness,
        primes(&[3, 5]),
        Duration::from_secs(600),
    );
    let names: Vec<&str> = r.suites[0].assertions.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names.iter().filter(|n| n.starts_with("cross Cartan")).count(), 12);
    assert!(names.iter().any(|n| n.starts_with("cross depth") && n.contains("p=3")));
    assert!(names.iter().any(|n| n.starts_with("cross depth") && n.contains("p=5")));
}

#[test]
fn criterion_10_determinism() {
    let t = Instant::now();
    let config = VerifyConfig::default();
    let first = run_suite(Suite::All, &config).expect("suite runs").to_json();
    let once = t.elapsed();
    let second = run_suite(Suite::All, &config).expect("suite runs").to_json();
    let elapsed = t.elapsed();
    let same = first == second;
    let passed = same && once < Duration::from_secs(30 * 60);
    let detail = format!("{} byte reports identical: {same}, one full run {:.1}s", first.len(), once.as_secs_f64());
    verdict(10, "repeated full runs are byte-identical", passed, &detail, elapsed);
    assert!(same);
    assert!(once < Duration::from_secs(30 * 60));
}
