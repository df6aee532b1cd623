//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_dynamics::heights::{elliptic_height_trace, height_limit_trace, jensen_sum, repulsion_monitor};
use padic_dynamics::local::{
    attracting_check, bound_reports, iterate, lemma_shape_check, BoundOutcome, TruncatedSeries,
};
use padic_dynamics::morphism::FormPair;
use padic_dynamics::par;
use padic_dynamics::poly::QPoly;
use padic_dynamics::projective::{delta, is_unimodular, normalize, ProjPoint};
use padic_dynamics::valuation::{vp, vp_usize};
use padic_dynamics::{Prime, Valuation};

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fmt(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn fmt_list(v: &[BigRational]) -> String {
    v.iter().map(fmt).collect::<Vec<_>>().join(", ")
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let e = start.elapsed();
    (
        e < limit,
        format!("{:.2}s (limit {}s)", e.as_secs_f64(), limit.as_secs()),
    )
}

/// Criterion 1: Squaring-map trace: exact values for x = 1/3 and x = 2 over Q_3.
fn squaring_trace() -> Verdict {
    let p = prime(3);
    let a = jensen_sum(&rat(1, 3), p, 10).unwrap();
    let b = jensen_sum(&int(2), p, 10).unwrap();
    let ok_a = a.rows.len() == 10 && a.rows.iter().all(|r| r.value == int(1) && r.error.is_zero());
    let ok_b = b.rows.len() == 10 && b.rows.iter().all(|r| r.value.is_zero() && r.error.is_zero());
    verdict(
        ok_a && ok_b,
        format!("x=1/3 all value 1: {ok_a}; x=2 all value 0: {ok_b}"),
    )
}

/// Criterion 2: Quadratic maps t^2 + c over Q_5: errors shrink from n = 2 on, and the
/// sixth error is 0 or below 4^-6 in absolute value.
fn quadratic_trace() -> Verdict {
    let start = Instant::now();
    let p = prime(5);
    let cutoff = BigRational::new(BigInt::from(1), BigInt::from(4096));
    let mut pass = true;
    let mut notes = Vec::new();
    for c in [1i64, 2] {
        let phi = FormPair::from_ints(&[1, 0, c], &[0, 0, 1], p).unwrap();
        for x in [rat(1, 5), int(7)] {
            let trace = height_limit_trace(&x, &phi, 6).unwrap();
            let errs: Vec<BigRational> = trace.rows.iter().map(|r| r.error.clone()).collect();
            let monotone = errs[1..].windows(2).all(|w| w[1].abs() <= w[0].abs());
            let last = &errs[5];
            let small = last.is_zero() || last.abs() < cutoff;
            if !(monotone && small) {
                pass = false;
            }
            notes.push(format!("c={c} x={}: errors [{}]", fmt(&x), fmt_list(&errs)));
        }
    }
    let (fast, t) = within(start, Duration::from_secs(1));
    verdict(pass && fast, format!("{}; {t}", notes.join("; ")))
}

fn random_series(rng: &mut ChaCha8Rng, order: usize) -> (Vec<BigRational>, Prime) {
    let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
    let pr = prime(p);
    let unit = |rng: &mut ChaCha8Rng| loop {
        let a: i64 = rng.gen_range(-20..=20);
        if a % p as i64 != 0 {
            return a;
        }
    };
    let den = unit(rng).abs();
    let a1 = if rng.gen_bool(0.5) {
        rat(unit(rng), den)
    } else {
        rat(unit(rng) * p as i64 * rng.gen_range(1..=3), den)
    };
    let mut coeffs = vec![a1];
    let k = rng.gen_range(1..=4);
    loop {
        let rest: Vec<BigRational> = (0..k).map(|_| rat(rng.gen_range(-9..=9), den)).collect();
        if rest.iter().any(|c| !c.is_zero()) {
            coeffs.extend(rest);
            break;
        }
    }
    coeffs.truncate(order);
    (coeffs, pr)
}

/// Criterion 3: Periodic-point norm bound on random series.
fn norm_bound_suite() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let (order, n_max) = (128usize, 12usize);
    let cases: Vec<(Vec<BigRational>, Prime)> = (0..200).map(|_| random_series(&mut rng, order)).collect();
    // (violations, inconclusive, unit-multiplier checks)
    let results = par::map_items(&cases, |(coeffs, p)| {
        let f = TruncatedSeries::polynomial(coeffs, order, *p).unwrap();
        if vp(&f.multiplier(), *p) > Valuation::zero() {
            let isolated = attracting_check(&f, n_max).unwrap();
            return (usize::from(!isolated), 0usize, 0usize);
        }
        let reps = bound_reports(|o| TruncatedSeries::polynomial(coeffs, o, *p), n_max, order, 2 * order).unwrap();
        let viol = reps.iter().filter(|r| r.outcome == BoundOutcome::Violated).count();
        let inc = reps.iter().filter(|r| r.outcome == BoundOutcome::Inconclusive).count();
        (viol, inc, reps.len())
    });
    let violations: usize = results.iter().map(|r| r.0).sum();
    let inconclusive: usize = results.iter().map(|r| r.1).sum();
    let unit_checks: usize = results.iter().map(|r| r.2).sum();
    let unit_series = results.iter().filter(|r| r.2 > 0).count();
    let rate = inconclusive as f64 / unit_checks.max(1) as f64;
    let (fast, t) = within(start, Duration::from_secs(30));
    verdict(
        violations == 0 && rate < 0.05 && fast,
        format!(
            "{unit_series} unit / {} attracting series; violations {violations}; \
             inconclusive {inconclusive}/{unit_checks} unit-multiplier checks ({:.2}%); {t}",
            200 - unit_series,
            rate * 100.0
        ),
    )
}

/// Criterion 4: Iterate shapes: multiplier law, and integrality of the remainder when
/// the multiplier is 1.
fn shape_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut failures = 0;
    let mut parabolic = 0;
    for _ in 0..100 {
        let (mut coeffs, p) = random_series(&mut rng, 32);
        if rng.gen_bool(0.5) {
            coeffs[0] = int(1);
        }
        let f = TruncatedSeries::new(&coeffs, 32, p).unwrap();
        if f.is_identity() {
            continue;
        }
        if f.multiplier() == int(1) {
            parabolic += 1;
        }
        for n in 1..=6 {
            let law = iterate(&f, n).unwrap().multiplier() == num_traits::pow(f.multiplier(), n);
            if !law || !lemma_shape_check(&f, n).unwrap() {
                failures += 1;
            }
        }
    }
    verdict(
        failures == 0,
        format!("{failures} failures; {parabolic} series with multiplier 1"),
    )
}

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_inv(x: u64, p: u64) -> u64 {
    (1..p).find(|y| x * y % p == 1).unwrap()
}

/// Monic gcd over F_p by schoolbook Euclid; ascending coefficients.
fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !b.is_empty() {
        while a.len() >= b.len() {
            let c = a[a.len() - 1] * fp_inv(b[b.len() - 1], p) % p;
            let s = a.len() - b.len();
            for (j, bj) in b.iter().enumerate() {
                a[s + j] = (a[s + j] + p - c * bj % p) % p;
            }
            a = fp_trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Brute force: do the reduced forms share a root in P^1 over an algebraic
/// closure of F_p?
fn brute_force_bad(f: &[BigInt], g: &[BigInt], p: u64) -> bool {
    let pb = BigInt::from(p);
    let red = |v: &[BigInt]| -> Vec<u64> {
        v.iter()
            .map(|c| {
                let r = ((c % &pb) + &pb) % &pb;
                r.to_u64_digits().1.first().copied().unwrap_or(0)
            })
            .collect()
    };
    let (fr, gr) = (red(f), red(g));
    if fr.iter().all(|&c| c == 0) || gr.iter().all(|&c| c == 0) {
        return true;
    }
    // [1 : 0]
    if fr[0] == 0 && gr[0] == 0 {
        return true;
    }
    let d = fr.len() - 1;
    let affine = |v: &[u64]| -> Vec<u64> { (0..=d).map(|k| v[d - k]).collect() };
    let (fa, ga) = (affine(&fr), affine(&gr));
    let eval = |c: &[u64], t: u64| c.iter().rev().fold(0u64, |acc, x| (acc * t + x) % p);
    if (0..p).any(|t| eval(&fa, t) == 0 && eval(&ga, t) == 0) {
        return true;
    }
    fp_gcd(&fa, &ga, p).len() > 1
}

/// Criterion 5: Resultant verdict against the brute-force common-root search.
fn good_reduction_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut checked = 0;
    let mut bad = 0;
    let mut disagreements = 0;
    while checked < 100 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let d = rng.gen_range(1..=4);
        let f: Vec<i64> = (0..=d).map(|_| rng.gen_range(-4..=4)).collect();
        let g: Vec<i64> = (0..=d).map(|_| rng.gen_range(-4..=4)).collect();
        let Ok(phi) = FormPair::from_ints(&f, &g, prime(p)) else {
            continue;
        };
        checked += 1;
        let oracle_bad = brute_force_bad(phi.f(), phi.g(), p);
        bad += usize::from(oracle_bad);
        if phi.good_reduction().good == oracle_bad {
            disagreements += 1;
        }
    }
    verdict(
        disagreements == 0,
        format!("{disagreements} disagreements over {checked} pairs ({bad} bad)"),
    )
}

/// Denominator of the second iterate of the duplication map, built directly
/// from the forms: `G_2 = G(F, G)`.
fn duplication_denominators(a: i64, b: i64) -> (QPoly, QPoly) {
    let q = |c: &[i64]| QPoly::new(c.iter().map(|&x| int(x)).collect());
    let f1 = q(&[a * a, -8 * b, -2 * a, 0, 1]);
    let g1 = q(&[4 * b, 4 * a, 0, 4]);
    let cube = |x: &QPoly| x.mul(x).mul(x);
    let add = |x: &QPoly, y: &QPoly| x.sub(&QPoly::zero().sub(y));
    let inner = add(
        &add(&cube(&f1), &q(&[a]).mul(&f1).mul(&g1).mul(&g1)),
        &q(&[b]).mul(&cube(&g1)),
    );
    let g2 = q(&[4]).mul(&g1).mul(&inner);
    (g1, g2)
}

/// Criterion 6: Duplication map of y^2 = x^3 + x + 1 over Q_5.
fn duplication_trace() -> Verdict {
    let start = Instant::now();
    let p = prime(5);
    let trace = elliptic_height_trace(&int(1), &int(1), &rat(1, 5), p, 5).unwrap();
    // direct evaluation oracle at n = 1, 2
    let (g1, g2) = duplication_denominators(1, 1);
    let x = rat(1, 5);
    let oracle = |g: &QPoly, n: u32| -> BigRational {
        let v = vp(&g.eval(&x), p).expect_finite().clone() - vp(g.lead().unwrap(), p).expect_finite();
        -v / int(4i64.pow(n))
    };
    let oracle_ok = trace.rows[0].value == oracle(&g1, 1) && trace.rows[1].value == oracle(&g2, 2);
    let errs: Vec<BigRational> = trace.rows.iter().map(|r| r.error.clone()).collect();
    let exact = trace.limit == int(1) && errs.iter().all(Zero::is_zero);
    let unit = elliptic_height_trace(&int(1), &int(1), &int(2), p, 5).unwrap();
    let unit_ok = unit.limit.is_zero() && unit.rows.iter().all(|r| r.value.is_zero());
    let (fast, t) = within(start, Duration::from_secs(10));
    verdict(
        oracle_ok && exact && unit_ok && fast,
        format!(
            "xQ=1/5: direct-evaluation oracle agrees at n=1,2: {oracle_ok}; errors [{}] (required all 0); \
             xQ=2 values all 0: {unit_ok}; {t}",
            fmt_list(&errs)
        ),
    )
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

/// Criterion 7: Repulsion monitor for squaring: the running maximum is reached by
/// n = 4 and is not exceeded through n = 10; the CLI exits 0.
fn monitor_suite() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for p in [3u64, 5] {
        let phi = FormPair::from_ints(&[1, 0, 0], &[0, 0, 1], prime(p)).unwrap();
        for x in [0i64, 2] {
            let m = repulsion_monitor(&int(x), &phi, 10).unwrap();
            let by4 = m.running_max_through(4).cloned();
            let by10 = m.running_max_through(10).cloned();
            let ok = by4.is_some() && by4 == by10 && m.rows.last().map(|r| r.n) == Some(10);
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let ps = p.to_string();
            let xs = x.to_string();
            let args = [
                "padyn",
                "monitor",
                "--map",
                &data("squaring_p3.toml"),
                "--prime",
                &ps,
                "--x",
                &xs,
                "--n-max",
                "10",
            ];
            let code = padic_dynamics::cli::run(args, &mut out, &mut err);
            pass &= ok && code == 0;
            notes.push(format!(
                "p={p} x={x}: max by n=4 {} / by n=10 {}, exit {code}",
                by4.as_ref().map(fmt).unwrap_or_default(),
                by10.as_ref().map(fmt).unwrap_or_default()
            ));
        }
    }
    verdict(pass, notes.join("; "))
}

fn random_point(rng: &mut ChaCha8Rng, p: Prime) -> ProjPoint {
    let coord = |rng: &mut ChaCha8Rng| {
        let k: i32 = rng.gen_range(-3..=3);
        let base = rat(rng.gen_range(-50..=50), rng.gen_range(1..=40));
        base * num_traits::Pow::pow(int(p.get() as i64), k)
    };
    loop {
        let (a, b) = (coord(rng), coord(rng));
        if let Ok(pt) = normalize(a, b, p) {
            return pt;
        }
    }
}

/// Criterion 8: Metric axioms on random triples.
fn metric_axioms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut failures = 0;
    for _ in 0..10_000 {
        let p = prime([2u64, 3, 5, 7][rng.gen_range(0..4)]);
        let (x, y, z) = (
            random_point(&mut rng, p),
            random_point(&mut rng, p),
            random_point(&mut rng, p),
        );
        let (xy, yz, xz) = (delta(&x, &y).unwrap(), delta(&y, &z).unwrap(), delta(&x, &z).unwrap());
        let ultra = xz >= xy.clone().min(yz.clone());
        let sym = xy == delta(&y, &x).unwrap();
        let bounded = xy >= Valuation::zero() && yz >= Valuation::zero() && xz >= Valuation::zero();
        let g = loop {
            let e: [i64; 4] = [0; 4].map(|_| rng.gen_range(-20..=20));
            let g = [
                [BigInt::from(e[0]), BigInt::from(e[1])],
                [BigInt::from(e[2]), BigInt::from(e[3])],
            ];
            if is_unimodular(&g, p) {
                break g;
            }
        };
        let iso = delta(&x.transform(&g).unwrap(), &y.transform(&g).unwrap()).unwrap() == xy;
        if !(ultra && sym && bounded && iso) {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("{failures} failures over 10000 triples"))
}

/// Criterion 9: For z + z^2, the z^2 coefficient of f^n - z has valuation v_p(n).
fn double_fixed_point() -> Verdict {
    let mut failures = Vec::new();
    for p in [2u64, 3] {
        let pr = prime(p);
        let f = TruncatedSeries::from_ints(&[1, 1], 16, pr).unwrap();
        for n in 1..=12 {
            let c2 = iterate(&f, n).unwrap().coeff(2);
            if vp(&c2, pr) != Valuation::from_int(vp_usize(n, pr)) {
                failures.push(format!("p={p} n={n}"));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("{} failures {}", failures.len(), failures.join(" ")),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("squaring-map height trace is exact", squaring_trace),
        ("quadratic-map height trace error decay", quadratic_trace),
        ("periodic-point norm bound on random series", norm_bound_suite),
        ("iterate shape identities", shape_suite),
        ("good-reduction verdict matches brute force", good_reduction_oracle),
        ("duplication-map height trace", duplication_trace),
        ("repulsion monitor stays bounded", monitor_suite),
        ("chordal metric axioms", metric_axioms),
        ("double fixed point multiplicity", double_fixed_point),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name} -- {}", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
