//! Rational self-maps of the projective line given by a pair of binary forms.
//!
//! Coefficient index `i` of a degree-`d` form multiplies `X^(d-i) Y^i`. In the
//! affine chart `t = X/Y` the map is `t -> F(t,1) / G(t,1)` and infinity is
//! `[1 : 0]`, which is fixed exactly when `G` has no `X^d` term.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{add_scaled, mul_int, to_scaled_ints, QPoly};
use crate::projective::{is_unimodular, normalize, ProjPoint};
use crate::valuation::{vp_int, Prime, Valuation};

/// A p-normalized pair of integral binary forms of common degree `d >= 1`,
/// with at least one coefficient a p-adic unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormPair {
    f: Vec<BigInt>,
    g: Vec<BigInt>,
    prime: Prime,
}

/// Outcome of the resultant test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub good: bool,
    pub resultant: BigInt,
    pub valuation: Valuation,
}

/// `f_n(t) - t g_n(t)`, or a factor of it, with ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPolynomial {
    pub n: usize,
    pub poly: QPoly,
}

impl PeriodicPolynomial {
    pub fn coeffs(&self) -> &[BigRational] {
        self.poly.coeffs()
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }
}

/// Multiplies by the power of p (and the p-unit denominator) that makes the
/// pair integral with a unit coefficient.
pub fn p_normalize(f: &[BigRational], g: &[BigRational], p: Prime) -> Result<FormPair> {
    if f.len() != g.len() {
        return Err(Error::DegreeMismatch(
            f.len().saturating_sub(1),
            g.len().saturating_sub(1),
        ));
    }
    if f.len() < 2 {
        return Err(Error::Invalid("forms must have degree >= 1".into()));
    }
    let all: Vec<BigRational> = f.iter().chain(g).cloned().collect();
    if all.iter().all(Zero::is_zero) {
        return Err(Error::ZeroForms);
    }
    let (mut ints, _) = to_scaled_ints(&all);
    strip_p_content(&mut ints, p);
    let g = ints.split_off(f.len());
    Ok(FormPair { f: ints, g, prime: p })
}

/// Divides out the largest power of p dividing every entry.
fn strip_p_content(v: &mut [BigInt], p: Prime) {
    let Some(m) = v.iter().filter_map(|c| vp_int(c, p)).min() else {
        return;
    };
    if m > 0 {
        let pm = num_traits::pow(p.to_bigint(), m as usize);
        for c in v.iter_mut() {
            *c /= &pm;
        }
    }
}

/// Sylvester resultant of two degree-`d` binary forms (fraction-free Bareiss).
pub fn sylvester_resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let d = f.len() - 1;
    let n = 2 * d;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for r in 0..d {
        for (j, c) in f.iter().enumerate() {
            m[r][r + j] = c.clone();
        }
        for (j, c) in g.iter().enumerate() {
            m[d + r][r + j] = c.clone();
        }
    }
    bareiss_det(m)
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

impl FormPair {
    /// Builds and p-normalizes a pair from rational coefficients.
    pub fn new(f: &[BigRational], g: &[BigRational], p: Prime) -> Result<Self> {
        p_normalize(f, g, p)
    }

    pub fn from_ints(f: &[i64], g: &[i64], p: Prime) -> Result<Self> {
        let r = |v: &[i64]| -> Vec<BigRational> { v.iter().map(|&x| BigRational::from_integer(x.into())).collect() };
        p_normalize(&r(f), &r(g), p)
    }

    /// Induced map on x-coordinates of the doubling map of `y^2 = x^3 + a x + b`:
    /// `(X^4 - 2aX^2Y^2 - 8bXY^3 + a^2Y^4, 4Y(X^3 + aXY^2 + bY^3))`.
    pub fn duplication(a: &BigRational, b: &BigRational, p: Prime) -> Result<Self> {
        let z = BigRational::zero;
        let c = |k: i64| BigRational::from_integer(k.into());
        let f = vec![c(1), z(), -c(2) * a, -c(8) * b, a * a];
        let g = vec![z(), c(4), z(), c(4) * a, c(4) * b];
        p_normalize(&f, &g, p)
    }

    pub fn f(&self) -> &[BigInt] {
        &self.f
    }

    pub fn g(&self) -> &[BigInt] {
        &self.g
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// Formal degree of the forms.
    pub fn form_degree(&self) -> usize {
        self.f.len() - 1
    }

    /// Resultant test: good reduction iff `v_p(Res(F, G)) = 0`.
    pub fn good_reduction(&self) -> ReductionCertificate {
        let res = sylvester_resultant(&self.f, &self.g);
        let valuation = match vp_int(&res, self.prime) {
            Some(v) => Valuation::from_int(v as i64),
            None => Valuation::Infinite,
        };
        ReductionCertificate {
            good: valuation == Valuation::zero(),
            resultant: res,
            valuation,
        }
    }

    /// Same verdict as [`good_reduction`](Self::good_reduction) computed over
    /// F_p without the resultant, for high-degree iterates.
    pub fn good_reduction_mod_p(&self) -> bool {
        let p = self.prime.get();
        let red = |v: &[BigInt]| -> Vec<u64> {
            let pb = self.prime.to_bigint();
            v.iter()
                .map(|c| {
                    let r = c.mod_floor(&pb);
                    r.iter_u64_digits().next().unwrap_or(0)
                })
                .collect()
        };
        let (fr, gr) = (red(&self.f), red(&self.g));
        if fr[0] == 0 && gr[0] == 0 {
            return false;
        }
        // affine chart: ascending polynomials in t
        let fa: Vec<u64> = fr.iter().rev().copied().collect();
        let ga: Vec<u64> = gr.iter().rev().copied().collect();
        fp_gcd_degree(&fa, &ga, p).is_some_and(|d| d == 0)
    }

    pub fn require_good_reduction(&self) -> Result<()> {
        let cert = self.good_reduction();
        if cert.good {
            Ok(())
        } else {
            Err(Error::BadReduction(cert.valuation.to_string()))
        }
    }

    /// The degree `d`, after checking that `F` and `G` share no common factor.
    pub fn degree(&self) -> Result<usize> {
        if self.f[0].is_zero() && self.g[0].is_zero() {
            return Err(Error::CommonFactor);
        }
        let (fa, ga) = (self.affine_f(), self.affine_g());
        if !fa.gcd(&ga).is_constant() {
            return Err(Error::CommonFactor);
        }
        Ok(self.form_degree())
    }

    /// `F(t, 1)` with ascending coefficients.
    pub fn affine_f(&self) -> QPoly {
        QPoly::from_ints(&self.f.iter().rev().cloned().collect::<Vec<_>>())
    }

    /// `G(t, 1)` with ascending coefficients.
    pub fn affine_g(&self) -> QPoly {
        QPoly::from_ints(&self.g.iter().rev().cloned().collect::<Vec<_>>())
    }

    pub fn fixes_infinity(&self) -> bool {
        self.g[0].is_zero() && !self.f[0].is_zero()
    }

    fn eval_form(c: &[BigInt], x0: &BigRational, x1: &BigRational) -> BigRational {
        let d = c.len() - 1;
        let mut acc = BigRational::zero();
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let term = num_traits::pow(x0.clone(), d - i) * num_traits::pow(x1.clone(), i);
            acc += term * BigRational::from_integer(ci.clone());
        }
        acc
    }

    /// `(F(X0, X1), G(X0, X1))` without normalization.
    pub fn eval_raw(&self, x0: &BigRational, x1: &BigRational) -> (BigRational, BigRational) {
        (Self::eval_form(&self.f, x0, x1), Self::eval_form(&self.g, x0, x1))
    }

    pub fn evaluate(&self, x: &ProjPoint) -> Result<ProjPoint> {
        if x.prime() != self.prime {
            return Err(Error::PrimeMismatch(x.prime().get(), self.prime.get()));
        }
        let (a, b) = self.eval_raw(x.x0(), x.x1());
        normalize(a, b, self.prime).map_err(|_| Error::Undefined)
    }

    /// `self ∘ inner`, p-normalized.
    pub fn compose(&self, inner: &FormPair) -> Result<FormPair> {
        if inner.prime != self.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), inner.prime.get()));
        }
        let d = self.form_degree();
        let mut apow = vec![vec![BigInt::one()]];
        let mut bpow = vec![vec![BigInt::one()]];
        for k in 1..=d {
            apow.push(mul_int(&apow[k - 1], &inner.f));
            bpow.push(mul_int(&bpow[k - 1], &inner.g));
        }
        let len = d * inner.form_degree() + 1;
        let mut f = vec![BigInt::zero(); len];
        let mut g = vec![BigInt::zero(); len];
        for i in 0..=d {
            if self.f[i].is_zero() && self.g[i].is_zero() {
                continue;
            }
            let term = mul_int(&apow[d - i], &bpow[i]);
            if !self.f[i].is_zero() {
                add_scaled(&mut f, &term, &self.f[i]);
            }
            if !self.g[i].is_zero() {
                add_scaled(&mut g, &term, &self.g[i]);
            }
        }
        let mut all = f;
        all.extend(g);
        if all.iter().all(Zero::is_zero) {
            return Err(Error::ZeroForms);
        }
        strip_p_content(&mut all, self.prime);
        let g = all.split_off(len);
        Ok(FormPair {
            f: all,
            g,
            prime: self.prime,
        })
    }

    /// The iterates `phi, phi^2, ..., phi^n`.
    pub fn iterates(&self, n: usize) -> Result<Vec<FormPair>> {
        if n == 0 {
            return Err(Error::Invalid("iteration count must be positive".into()));
        }
        self.require_good_reduction()?;
        let mut out = vec![self.clone()];
        for _ in 1..n {
            let next = self.compose(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }

    /// `phi^n` as a p-normalized pair of degree `d^n`.
    pub fn iterate(&self, n: usize) -> Result<FormPair> {
        Ok(self.iterates(n)?.pop().unwrap())
    }

    /// `f(t) - t g(t)` for this pair.
    pub fn displacement_polynomial(&self) -> QPoly {
        let d = self.form_degree();
        let mut c = vec![BigInt::zero(); d + 2];
        for k in 0..=d {
            c[k] += &self.f[d - k];
            c[k + 1] -= &self.g[d - k];
        }
        QPoly::from_ints(&c)
    }

    /// `P_n = f_n(t) - t g_n(t)`, whose roots are the affine points of period n.
    pub fn periodic_polynomial(&self, n: usize) -> Result<PeriodicPolynomial> {
        Ok(self.periodic_polynomials(n)?.pop().unwrap())
    }

    /// `P_1, ..., P_n`.
    pub fn periodic_polynomials(&self, n: usize) -> Result<Vec<PeriodicPolynomial>> {
        self.iterates(n)?
            .iter()
            .enumerate()
            .map(|(i, it)| {
                let poly = it.displacement_polynomial();
                if poly.is_zero() {
                    Err(Error::ZeroPolynomial)
                } else {
                    Ok(PeriodicPolynomial { n: i + 1, poly })
                }
            })
            .collect()
    }

    /// `P_n / gcd(P_n, prod_{m | n, m < n} P_m)`.
    pub fn least_period_part(&self, n: usize) -> Result<PeriodicPolynomial> {
        let all = self.periodic_polynomials(n)?;
        Ok(strip_lower_periods(&all, n))
    }

    /// Least-period parts for every `n <= n_max`.
    pub fn least_period_parts(&self, n_max: usize) -> Result<Vec<PeriodicPolynomial>> {
        let all = self.periodic_polynomials(n_max)?;
        Ok(crate::par::map_range(1..n_max + 1, |n| strip_lower_periods(&all, n)))
    }

    /// Conjugate `m ∘ phi ∘ m^(-1)` by an integer matrix with p-unit determinant.
    pub fn conjugate(&self, m: &[[BigInt; 2]; 2]) -> Result<FormPair> {
        if !is_unimodular(m, self.prime) {
            return Err(Error::Invalid("conjugating matrix must have unit determinant".into()));
        }
        // adjugate stands in for the inverse projectively
        let adj = [[m[1][1].clone(), -m[0][1].clone()], [-m[1][0].clone(), m[0][0].clone()]];
        let x_lin = vec![adj[0][0].clone(), adj[0][1].clone()];
        let y_lin = vec![adj[1][0].clone(), adj[1][1].clone()];
        let linear = FormPair {
            f: x_lin,
            g: y_lin,
            prime: self.prime,
        };
        let inner = self.compose(&linear)?;
        let mix = |a: &BigInt, b: &BigInt| -> Vec<BigInt> {
            inner.f.iter().zip(&inner.g).map(|(x, y)| a * x + b * y).collect()
        };
        let f = mix(&m[0][0], &m[0][1]);
        let g = mix(&m[1][0], &m[1][1]);
        let mut all = f;
        all.extend(g);
        strip_p_content(&mut all, self.prime);
        let g = all.split_off(inner.f.len());
        Ok(FormPair {
            f: all,
            g,
            prime: self.prime,
        })
    }
}

fn strip_lower_periods(all: &[PeriodicPolynomial], n: usize) -> PeriodicPolynomial {
    let pn = &all[n - 1].poly;
    let mut prod = QPoly::one();
    for m in (1..n).filter(|m| n.is_multiple_of(*m)) {
        prod = prod.mul(&all[m - 1].poly);
    }
    let g = pn.gcd(&prod);
    let (q, r) = pn.div_rem(&g);
    debug_assert!(r.is_zero());
    PeriodicPolynomial { n, poly: q }
}

/// Degree of gcd over F_p of two ascending polynomials; `None` if both vanish.
fn fp_gcd_degree(a: &[u64], b: &[u64], p: u64) -> Option<usize> {
    let trim = |mut v: Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    let inv = |x: u64| -> u64 {
        let mut r = 1u64;
        let (mut base, mut e) = (x % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = (r as u128 * base as u128 % p as u128) as u64;
            }
            base = (base as u128 * base as u128 % p as u128) as u64;
            e >>= 1;
        }
        r
    };
    while !b.is_empty() {
        let il = inv(*b.last().unwrap());
        while a.len() >= b.len() && !a.is_empty() {
            let c = (*a.last().unwrap() as u128 * il as u128 % p as u128) as u64;
            let shift = a.len() - b.len();
            for (j, bj) in b.iter().enumerate() {
                let sub = (c as u128 * *bj as u128 % p as u128) as u64;
                a[shift + j] = (a[shift + j] + p - sub) % p;
            }
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().checked_sub(1)
}

/// Coefficient of `t^k` in an integer form read in the affine chart.
pub fn leading_affine_coefficient(c: &[BigInt]) -> Option<(usize, BigInt)> {
    let d = c.len() - 1;
    c.iter()
        .enumerate()
        .find(|(_, x)| !x.is_zero())
        .map(|(i, x)| (d - i, x.clone()))
}
