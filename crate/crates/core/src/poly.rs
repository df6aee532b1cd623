//! Dense univariate polynomials with exact coefficients.
//!
//! Coefficient vectors are ascending (`c[i]` multiplies `t^i`). Integer
//! convolution is the hot loop for form iteration and series composition and
//! is parallelized over output coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::par;

/// Full product of two integer coefficient vectors.
pub fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    mul_int_truncated(a, b, a.len() + b.len() - 1)
}

/// First `len` coefficients of the product.
pub fn mul_int_truncated(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero(); len];
    }
    let (la, lb) = (a.len(), b.len());
    par::map_range(0..len, |k| {
        let lo = k.saturating_sub(lb - 1);
        let hi = k.min(la - 1);
        let mut acc = BigInt::zero();
        if lo <= hi {
            for i in lo..=hi {
                if !a[i].is_zero() && !b[k - i].is_zero() {
                    acc += &a[i] * &b[k - i];
                }
            }
        }
        acc
    })
}

/// `acc += c * a`, growing `acc` as needed.
pub fn add_scaled(acc: &mut Vec<BigInt>, a: &[BigInt], c: &BigInt) {
    if acc.len() < a.len() {
        acc.resize(a.len(), BigInt::zero());
    }
    for (x, y) in acc.iter_mut().zip(a) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

/// In-place Taylor shift: replaces `P(t)` by `P(t + a)`.
pub fn taylor_shift_int(c: &mut [BigInt], a: &BigInt) {
    let n = c.len();
    if n < 2 || a.is_zero() {
        return;
    }
    for i in 0..n - 1 {
        for j in (i..n - 1).rev() {
            let t = a * &c[j + 1];
            c[j] += t;
        }
    }
}

/// Evaluates an integer polynomial at a rational point.
pub fn eval_int(c: &[BigInt], x: &BigRational) -> BigRational {
    if c.is_empty() {
        return BigRational::zero();
    }
    // Homogeneous Horner on (numer, denom) keeps everything integral.
    let (n, d) = (x.numer(), x.denom());
    let deg = c.len() - 1;
    let mut acc = c[deg].clone();
    let mut dpow = BigInt::one();
    for i in (0..deg).rev() {
        dpow *= d;
        acc = acc * n + &c[i] * &dpow;
    }
    BigRational::new(acc, dpow)
}

/// Content-free integer form of a rational coefficient vector: returns
/// `(ints, scale)` with `coeffs[i] = ints[i] / scale`.
pub fn to_scaled_ints(coeffs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let l = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    (ints, l)
}

/// A polynomial over the rationals, trimmed so the last coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        QPoly::new(c.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly::new(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => QPoly::zero(),
            Some(l) => {
                let inv = l.recip();
                QPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let (a, la) = to_scaled_ints(&self.coeffs);
        let (b, lb) = to_scaled_ints(&other.coeffs);
        let den = la * lb;
        QPoly::new(
            mul_int(&a, &b)
                .into_iter()
                .map(|c| BigRational::new(c, den.clone()))
                .collect(),
        )
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        QPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (QPoly::zero(), QPoly::zero());
        };
        if nd < dd {
            return (QPoly::zero(), self.clone());
        }
        let inv = d.lead().unwrap().recip();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &r[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `P(t + shift)`, exactly.
    pub fn taylor_shift(&self, shift: &BigRational) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let (ints, l) = to_scaled_ints(&self.coeffs);
        let (shifted, scale) = shift_scaled(&ints, shift);
        let den = l * scale;
        QPoly::new(shifted.into_iter().map(|c| BigRational::new(c, den.clone())).collect())
    }

    /// Primitive integer multiple with positive leading coefficient.
    pub fn primitive_ints(&self) -> Vec<BigInt> {
        let (mut ints, _) = to_scaled_ints(&self.coeffs);
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !g.is_zero() {
            let neg = ints.last().is_some_and(|c| c.is_negative());
            for c in &mut ints {
                *c /= &g;
                if neg {
                    *c = -&*c;
                }
            }
        }
        ints
    }
}

/// Shifts an integer polynomial by a rational `a/b`: returns `(c, s)` with
/// `P(t + a/b) = sum c_i t^i / s`, where `s = b^deg`.
pub fn shift_scaled(p: &[BigInt], shift: &BigRational) -> (Vec<BigInt>, BigInt) {
    let (a, b) = (shift.numer(), shift.denom());
    let deg = p.len().saturating_sub(1);
    // b^deg P(u/b) as an integer polynomial in u
    let mut bpow = vec![BigInt::one(); deg + 1];
    for i in 1..=deg {
        bpow[i] = &bpow[i - 1] * b;
    }
    let mut c: Vec<BigInt> = p.iter().enumerate().map(|(i, x)| x * &bpow[deg - i]).collect();
    taylor_shift_int(&mut c, a);
    // substitute u = b t
    for (i, x) in c.iter_mut().enumerate() {
        *x *= &bpow[i];
    }
    (c, bpow[deg].clone())
}
