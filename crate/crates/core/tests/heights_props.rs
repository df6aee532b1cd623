mod common;

use common::{int, prime, rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use padic_dynamics::heights::{height_limit_trace, jensen_sum, repulsion_monitor};
use padic_dynamics::morphism::FormPair;
use padic_dynamics::newton::{lower_hull, root_valuations, shifted_valuations};
use padic_dynamics::valuation::vp;
use padic_dynamics::Prime;
use proptest::prelude::*;

fn quadratic(c: i64, p: Prime) -> FormPair {
    FormPair::from_ints(&[1, 0, c], &[0, 0, 1], p).unwrap()
}

/// `v(P(x)) = v(lead) + sum over roots of v(x - root)`, read off the polygon
/// of `P(t + x)`.
fn value_from_polygon(phi: &FormPair, x: &BigRational, n: usize) -> BigRational {
    let p = phi.prime();
    let pn = phi.periodic_polynomial(n).unwrap();
    let lead = vp(pn.poly.lead().unwrap(), p).expect_finite().clone();
    let shifted = shifted_valuations(pn.coeffs(), x, p).unwrap();
    let roots = root_valuations(&lower_hull(&shifted).unwrap());
    let sum: BigRational = roots.pairs().iter().map(|(v, m)| v * int(*m as i64)).sum();
    let dn = BigRational::from_integer(num_traits::pow(BigInt::from(phi.form_degree()), n));
    -(lead + sum) / dn
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_matches_polygon_sum(
        c in -3i64..=3,
        p in prop::sample::select(vec![3u64, 5, 7]),
        num in -30i64..=30,
        den in prop::sample::select(vec![1i64, 2, 3, 5, 7, 9, 25, 49]),
    ) {
        let p = prime(p);
        let phi = quadratic(c, p);
        let x = rat(num, den);
        let Ok(trace) = height_limit_trace(&x, &phi, 4) else {
            return Ok(());
        };
        for row in &trace.rows {
            prop_assert_eq!(&row.value, &value_from_polygon(&phi, &x, row.n));
        }
    }

    #[test]
    fn squaring_trace_is_the_direct_sum(
        p in prop::sample::select(vec![3u64, 5, 7]),
        num in -30i64..=30,
        den in 1i64..=30,
    ) {
        let p = prime(p);
        let x = rat(num, den);
        let phi = quadratic(0, p);
        match (jensen_sum(&x, p, 6), height_limit_trace(&x, &phi, 6)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }
}

#[test]
fn nearest_least_period_points_drift_to_unit_distance() {
    // squaring: for non-periodic x in the unit disk the largest v(x - y) over
    // least-period-n points y is 0 from some n on
    for p in [3u64, 5, 7] {
        let p = prime(p);
        let phi = quadratic(0, p);
        for x in [int(2), int(5), rat(1, 2)] {
            if vp(&x, p) < padic_dynamics::Valuation::zero() {
                continue;
            }
            let m = repulsion_monitor(&x, &phi, 8).unwrap();
            let last = m.rows.last().unwrap();
            assert_eq!(last.n, 8);
            assert_eq!(last.v, int(0), "p = {p}, x = {x}: {:?}", m.rows);
            assert!(!m.growing_tail());
        }
    }
}

#[test]
fn monitor_matches_direct_distances_after_inversion() {
    // x = 1/3 under squaring over Q_3 is moved to 3 by t -> 1/t, where the
    // fixed point 0 (infinity before the move) sits at v(3 - 0) = 1
    let p = prime(3);
    let phi = quadratic(0, p);
    let m = repulsion_monitor(&rat(1, 3), &phi, 4).unwrap();
    for row in &m.rows {
        let q = phi.least_period_part(row.n).unwrap();
        let roots = root_valuations(&lower_hull(&shifted_valuations(q.coeffs(), &int(3), p).unwrap()).unwrap());
        let direct = roots
            .pairs()
            .iter()
            .map(|(v, _)| v.clone())
            .filter(|v| *v >= int(0))
            .max();
        assert_eq!(row.v, direct.unwrap_or_else(|| int(0)));
    }
    assert_eq!(m.rows[0].witness, int(1));
    assert_eq!(m.running_max, Some(int(1)));
}
