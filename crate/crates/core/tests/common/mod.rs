#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use padic_dynamics::projective::{normalize, ProjPoint};
use padic_dynamics::Prime;
use proptest::prelude::*;

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn any_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(prime)
}

/// Rationals whose numerator and denominator carry a random power of p.
pub fn rational_near(p: Prime) -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=30, -3i32..=3).prop_map(move |(n, d, k)| {
        let pk = Pow::pow(BigRational::from_integer(BigInt::from(p.get())), k);
        BigRational::new(BigInt::from(n), BigInt::from(d)) * pk
    })
}

pub fn nonzero_rational_near(p: Prime) -> impl Strategy<Value = BigRational> {
    rational_near(p).prop_filter("nonzero", |x| *x != int(0))
}

pub fn point(p: Prime) -> impl Strategy<Value = ProjPoint> {
    (rational_near(p), rational_near(p))
        .prop_filter("not both zero", |(a, b)| *a != int(0) || *b != int(0))
        .prop_map(move |(a, b)| normalize(a, b, p).unwrap())
}

/// Integer polynomial with nonzero constant and leading terms.
pub fn int_poly(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
    (1..=max_deg).prop_flat_map(|d| {
        prop::collection::vec(-30i64..=30, d + 1).prop_filter("nonzero ends", |c| c[0] != 0 && *c.last().unwrap() != 0)
    })
}
