//! Exact p-adic valuations on the rationals.
//!
//! Every norm and logarithm in this crate is carried as a valuation: an exact
//! rational in units of `log p`, with `|x| = p^(-v(x))`. Floats never appear
//! below the CLI display layer.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers in canonical form.
pub type ExactRational = BigRational;

/// A rational prime, checked by trial division at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d.saturating_mul(d) <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A p-adic valuation: an exact rational or `+inf` (the valuation of zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(BigRational),
    Infinite,
}

impl Valuation {
    pub fn zero() -> Self {
        Valuation::Finite(BigRational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        Valuation::Finite(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// The finite value; panics on `+inf`.
    pub fn expect_finite(&self) -> &BigRational {
        self.finite().expect("finite valuation")
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Norm as a float, `p^(-v)`. Display only.
    pub fn norm_f64(&self, p: Prime) -> f64 {
        match self {
            Valuation::Infinite => 0.0,
            Valuation::Finite(v) => (p.get() as f64).powf(-v.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Self) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl Add<&BigRational> for Valuation {
    type Output = Valuation;
    fn add(self, rhs: &BigRational) -> Valuation {
        match self {
            Valuation::Finite(a) => Valuation::Finite(a + rhs),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl Sub<&BigRational> for Valuation {
    type Output = Valuation;
    fn sub(self, rhs: &BigRational) -> Valuation {
        match self {
            Valuation::Finite(a) => Valuation::Finite(a - rhs),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl From<BigRational> for Valuation {
    fn from(v: BigRational) -> Self {
        Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{}", fmt_rational(v)),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

/// Formats a rational as `num/den`, always including the denominator.
pub fn fmt_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("malformed rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exponent of `p` in a nonzero integer; `None` for zero.
pub fn vp_int(x: &BigInt, p: Prime) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let pb = p.to_bigint();
    let mut k = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return Some(k);
        }
        y = q;
        k += 1;
    }
}

/// Exponent of `p` in a nonzero rational, as a signed integer; `None` for zero.
pub fn vp_i64(x: &BigRational, p: Prime) -> Option<i64> {
    let n = vp_int(x.numer(), p)? as i64;
    let d = vp_int(x.denom(), p).expect("nonzero denominator") as i64;
    Some(n - d)
}

/// `v_p(x)`, with `+inf` for zero.
pub fn vp(x: &BigRational, p: Prime) -> Valuation {
    match vp_i64(x, p) {
        Some(v) => Valuation::from_int(v),
        None => Valuation::Infinite,
    }
}

/// `log+ |x|_p` in units of `log p`: `max(0, -v_p(x))`.
pub fn log_plus(x: &BigRational, p: Prime) -> BigRational {
    match vp_i64(x, p) {
        Some(v) if v < 0 => int(-v),
        _ => BigRational::zero(),
    }
}

/// Residue of a p-integral rational modulo p.
pub fn residue_mod_p(x: &BigRational, p: Prime) -> Result<u64> {
    let pb = p.to_bigint();
    if x.denom().mod_floor(&pb).is_zero() {
        return Err(Error::Invalid(format!("{} is not p-integral", fmt_rational(x))));
    }
    let n = x.numer().mod_floor(&pb);
    let d = x.denom().mod_floor(&pb);
    let dinv = d.modpow(&BigInt::from(p.get() - 2), &pb);
    if p.get() == 2 {
        return Ok((n % 2u32).to_u64().unwrap());
    }
    Ok(((n * dinv).mod_floor(&pb)).to_u64().unwrap())
}

fn require_unit(a1: &BigRational, p: Prime) -> Result<()> {
    match vp_i64(a1, p) {
        Some(0) => Ok(()),
        Some(v) => Err(Error::NotAUnit(v.to_string())),
        None => Err(Error::NotAUnit("+inf".into())),
    }
}

/// Strict test `v > 1/(p-1)` for an integer valuation.
fn in_log_region(v: Option<i64>, p: Prime) -> bool {
    match v {
        None => true,
        Some(v) => (v as i128) * (p.get() as i128 - 1) > 1,
    }
}

/// Least `m >= 1` with `v_p(a1^m - 1) > 1/(p-1)`: the multiplicative order of
/// `a1` mod p, multiplied by p until the strict inequality holds.
pub fn stabilizing_power(a1: &BigRational, p: Prime) -> Result<u64> {
    require_unit(a1, p)?;
    let r = residue_mod_p(a1, p)?;
    let mut m = 1u64;
    let mut acc = r;
    while acc != 1 {
        acc = ((acc as u128 * r as u128) % p.get() as u128) as u64;
        m += 1;
    }
    let one = BigRational::one();
    loop {
        let e = u32::try_from(m).map_err(|_| Error::Invalid("stabilizing power overflow".into()))?;
        let d = num_traits::pow::Pow::pow(a1, e) - &one;
        if in_log_region(vp_i64(&d, p), p) {
            return Ok(m);
        }
        m *= p.get();
    }
}

/// `v_p(log_p a1)`. Inside the convergence region the first term of the
/// logarithm series dominates, so this is `v_p(a1 - 1)`; `+inf` iff `a1 = 1`.
pub fn padic_log_valuation(a1: &BigRational, p: Prime) -> Result<Valuation> {
    require_unit(a1, p)?;
    let u = a1 - BigRational::one();
    let v = vp_i64(&u, p);
    if !in_log_region(v, p) {
        return Err(Error::OutsideLogRegion(vp(&u, p).to_string()));
    }
    Ok(vp(&u, p))
}

/// Valuation of the repulsion constant for multiplier `a1`.
///
/// With `m = stabilizing_power(a1)`: if `a1^m != 1` this is the valuation of
/// `log_p(a1^m)`; otherwise the caller-supplied valuation of the first
/// nonlinear coefficient of `f^m(z) - z` is returned unchanged.
pub fn kappa_for_multiplier(a1: &BigRational, aux_coefficient_valuation: &Valuation, p: Prime) -> Result<Valuation> {
    let m = stabilizing_power(a1, p)?;
    let am = num_traits::pow::Pow::pow(a1, m as u32);
    if am.is_one() {
        Ok(aux_coefficient_valuation.clone())
    } else {
        padic_log_valuation(&am, p)
    }
}

/// `v_p(n)` for a positive integer.
pub fn vp_usize(n: usize, p: Prime) -> i64 {
    let mut n = n as u64;
    let mut k = 0;
    while n > 0 && n.is_multiple_of(p.get()) {
        n /= p.get();
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn prime_check() {
        assert!(Prime::new(7).is_ok());
        assert_eq!(Prime::new(9), Err(Error::NotPrime(9)));
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn vp_examples() {
        assert_eq!(vp(&int(0), p(3)), Valuation::Infinite);
        assert_eq!(vp(&rat(1, 9), p(3)), Valuation::from_int(-2));
        assert_eq!(vp(&rat(6, 5), p(3)), Valuation::from_int(1));
    }

    #[test]
    fn log_plus_examples() {
        assert_eq!(log_plus(&rat(1, 9), p(3)), int(2));
        assert_eq!(log_plus(&int(3), p(3)), int(0));
        assert_eq!(log_plus(&int(2), p(3)), int(0));
        assert_eq!(log_plus(&int(0), p(3)), int(0));
    }

    #[test]
    fn stabilizing_power_examples() {
        assert_eq!(stabilizing_power(&int(4), p(3)).unwrap(), 1);
        assert_eq!(stabilizing_power(&int(2), p(3)).unwrap(), 2);
        assert_eq!(stabilizing_power(&int(1), p(5)).unwrap(), 1);
        // p = 2 threshold is v > 1: 3 - 1 = 2 has v = 1, 9 - 1 = 8 has v = 3.
        assert_eq!(stabilizing_power(&int(3), p(2)).unwrap(), 2);
        assert_eq!(stabilizing_power(&int(5), p(2)).unwrap(), 1);
        assert!(matches!(stabilizing_power(&int(3), p(3)), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn stabilizing_power_is_minimal() {
        for &pr in &[2u64, 3, 5, 7] {
            for a in 1..60i64 {
                if a % pr as i64 == 0 {
                    continue;
                }
                let m = stabilizing_power(&int(a), p(pr)).unwrap();
                for k in 1..m {
                    let d = num_traits::pow::Pow::pow(&int(a), k as u32) - int(1);
                    assert!(!in_log_region(vp_i64(&d, p(pr)), p(pr)), "a={a} p={pr} k={k}");
                }
            }
        }
    }

    /// Sum of the first `terms` terms of `log(1 + u) = sum (-1)^(i+1) u^i / i`.
    fn log_series(u: &BigRational, terms: u32) -> BigRational {
        let mut s = BigRational::zero();
        for i in 1..=terms {
            let t = num_traits::pow::Pow::pow(u, i) / int(i as i64);
            if i % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        s
    }

    #[test]
    fn padic_log_examples() {
        assert_eq!(padic_log_valuation(&int(4), p(3)).unwrap(), Valuation::from_int(1));
        assert_eq!(padic_log_valuation(&int(1), p(7)).unwrap(), Valuation::Infinite);
        assert_eq!(padic_log_valuation(&int(26), p(5)).unwrap(), Valuation::from_int(2));
        // series oracle
        assert_eq!(vp(&log_series(&int(25), 10), p(5)), Valuation::from_int(2));
        assert_eq!(vp(&log_series(&int(3), 10), p(3)), Valuation::from_int(1));
        assert!(matches!(
            padic_log_valuation(&int(2), p(3)),
            Err(Error::OutsideLogRegion(_))
        ));
        // p = 2 boundary: v(3 - 1) = 1 is not > 1
        assert!(padic_log_valuation(&int(3), p(2)).is_err());
        assert_eq!(padic_log_valuation(&int(5), p(2)).unwrap(), Valuation::from_int(2));
    }

    #[test]
    fn kappa_examples() {
        let any = Valuation::from_int(17);
        assert_eq!(
            kappa_for_multiplier(&int(4), &any, p(3)).unwrap(),
            Valuation::from_int(1)
        );
        assert_eq!(
            kappa_for_multiplier(&int(1), &Valuation::zero(), p(5)).unwrap(),
            Valuation::zero()
        );
        assert_eq!(
            kappa_for_multiplier(&int(-1), &Valuation::from_int(2), p(3)).unwrap(),
            Valuation::from_int(2)
        );
        assert!(kappa_for_multiplier(&int(6), &any, p(3)).is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational(" -7 ").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
        assert_eq!(fmt_rational(&int(1)), "1/1");
        assert_eq!(Valuation::Infinite.to_string(), "+inf");
    }

    fn nonzero_rational() -> impl Strategy<Value = BigRational> {
        (prop_oneof![-5000i64..-1, 1i64..5000], 1i64..5000).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn vp_multiplicative(x in nonzero_rational(), y in nonzero_rational(), pi in 0usize..4) {
            let pr = p([2, 3, 5, 7][pi]);
            prop_assert_eq!(vp(&(&x * &y), pr), vp(&x, pr) + vp(&y, pr));
        }

        #[test]
        fn vp_ultrametric(x in nonzero_rational(), y in nonzero_rational(), pi in 0usize..4) {
            let pr = p([2, 3, 5, 7][pi]);
            let (vx, vy) = (vp(&x, pr), vp(&y, pr));
            let vs = vp(&(&x + &y), pr);
            prop_assert!(vs >= vx.clone().min(vy.clone()));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }

        #[test]
        fn log_plus_zero_iff_integral(x in nonzero_rational(), pi in 0usize..4) {
            let pr = p([2, 3, 5, 7][pi]);
            prop_assert_eq!(log_plus(&x, pr).is_zero(), vp(&x, pr) >= Valuation::zero());
        }

        #[test]
        fn log_series_dominance(k in 1i64..50, e in 1u32..4, pi in 0usize..4) {
            let pr = p([2, 3, 5, 7][pi]);
            let pe = num_traits::pow::Pow::pow(&int(pr.get() as i64), e + u32::from(pr.get() == 2));
            let u = int(k) * pe;
            if vp(&u, pr) >= Valuation::from_int(1) {
                let a1 = &u + int(1);
                let expected = padic_log_valuation(&a1, pr).unwrap();
                for terms in 2..6 {
                    prop_assert_eq!(vp(&log_series(&u, terms), pr), expected.clone());
                }
            }
        }

        #[test]
        fn stabilizing_power_divides_group_order(a in 1i64..500, pi in 0usize..4) {
            let pr = p([2, 3, 5, 7][pi]);
            prop_assume!(a % pr.get() as i64 != 0);
            let m = stabilizing_power(&int(a), pr).unwrap();
            let order = pr.get() * (pr.get() - 1);
            prop_assert_eq!(order % m, 0, "m={} p={}", m, pr);
        }
    }
}
