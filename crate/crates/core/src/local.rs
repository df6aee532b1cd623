//! Truncated power series over the p-adic integers as local models of a map
//! at a fixed point, and the periodic-point norm bound they satisfy.
//!
//! A series `f(z) = a_1 z + a_2 z^2 + ... + a_N z^N` is stored as integer
//! numerators over one common p-unit denominator, so every coefficient has
//! valuation >= 0 by construction and composition stays in integer arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::morphism::FormPair;
use crate::newton::{
    barrier_vertex, certify_truncated_above, root_valuations, NewtonPolygon, RootValuations, ValuedPoly,
};
use crate::poly::{mul_int_truncated, to_scaled_ints};
use crate::projective::{normalize, ProjPoint};
use crate::valuation::{kappa_for_multiplier, stabilizing_power, vp, vp_int, vp_usize, Prime, Valuation};

pub const DEFAULT_ORDER: usize = 64;
pub const DEFAULT_ORDER_CAP: usize = 1024;

/// An element of `z Z_p[[z]]` known to order `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    /// `num[i]` is the numerator of the `z^i` coefficient; `num[0] = 0`.
    num: Vec<BigInt>,
    den: BigInt,
    order: usize,
    prime: Prime,
    /// Every coefficient past `order` is known to be zero.
    exact: bool,
}

impl TruncatedSeries {
    /// The order-`order` truncation of a series whose first coefficients are
    /// `a_1, ..., a_k`; nothing is assumed about coefficients past `order`.
    pub fn new(coeffs: &[BigRational], order: usize, p: Prime) -> Result<Self> {
        if order < 2 {
            return Err(Error::Invalid("truncation order must be at least 2".into()));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if let Valuation::Finite(v) = vp(c, p) {
                if v.is_negative() {
                    return Err(Error::NegativeValuation {
                        index: i + 1,
                        valuation: v.to_string(),
                    });
                }
            }
        }
        let kept: Vec<BigRational> = coeffs.iter().take(order).cloned().collect();
        let (ints, den) = to_scaled_ints(&kept);
        let mut num = vec![BigInt::zero(); order + 1];
        for (i, c) in ints.into_iter().enumerate() {
            num[i + 1] = c;
        }
        Ok(TruncatedSeries {
            num,
            den,
            order,
            prime: p,
            exact: false,
        }
        .reduced())
    }

    /// The polynomial `a_1 z + ... + a_k z^k`, truncated at `order`. When
    /// `k <= order` the series is exact: its omitted coefficients are zero.
    pub fn polynomial(coeffs: &[BigRational], order: usize, p: Prime) -> Result<Self> {
        let k = coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
        let mut f = Self::new(coeffs, order, p)?;
        f.exact = k <= order;
        Ok(f)
    }

    pub fn from_ints(coeffs: &[i64], order: usize, p: Prime) -> Result<Self> {
        let c: Vec<BigRational> = coeffs.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        Self::new(&c, order, p)
    }

    pub fn identity(order: usize, p: Prime) -> Result<Self> {
        Self::polynomial(&[BigRational::one()], order, p)
    }

    /// True when the coefficients past the order are known to vanish.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    fn reduced(mut self) -> Self {
        let g = self.num.iter().fold(self.den.clone(), |g, c| g.gcd(c));
        if !g.is_one() && !g.is_zero() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// Coefficient of `z^i` (zero for `i = 0` or `i > order`).
    pub fn coeff(&self, i: usize) -> BigRational {
        match self.num.get(i) {
            Some(c) => BigRational::new(c.clone(), self.den.clone()),
            None => BigRational::zero(),
        }
    }

    /// `a_1, ..., a_N`.
    pub fn coeffs(&self) -> Vec<BigRational> {
        (1..=self.order).map(|i| self.coeff(i)).collect()
    }

    pub fn multiplier(&self) -> BigRational {
        self.coeff(1)
    }

    pub fn is_identity(&self) -> bool {
        self.num[1] == self.den && self.num[2..].iter().all(Zero::is_zero)
    }

    /// Highest index with a nonzero coefficient.
    fn top_index(&self) -> usize {
        self.num.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Same series truncated at a lower order.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order < 2 || order > self.order {
            return Err(Error::Invalid(format!(
                "cannot truncate order {} to {order}",
                self.order
            )));
        }
        Ok(TruncatedSeries {
            num: self.num[..=order].to_vec(),
            den: self.den.clone(),
            order,
            prime: self.prime,
            exact: self.exact && self.top_index() <= order,
        }
        .reduced())
    }

    /// Evaluates the truncated polynomial at `y`.
    pub fn eval(&self, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.num.iter().rev() {
            acc = acc * y + BigRational::from_integer(c.clone());
        }
        acc / BigRational::from_integer(self.den.clone())
    }
}

/// `f ∘ g` truncated to the common order.
pub fn compose(f: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    if f.prime != g.prime {
        return Err(Error::PrimeMismatch(f.prime.get(), g.prime.get()));
    }
    if f.order != g.order {
        return Err(Error::OrderMismatch(f.order, g.order));
    }
    let len = f.order + 1;
    let k = f.top_index();
    if k == 0 {
        return Ok(TruncatedSeries {
            num: vec![BigInt::zero(); len],
            den: BigInt::one(),
            order: f.order,
            prime: f.prime,
            exact: f.exact,
        });
    }
    // sum_{i=1}^k A_i B^i D^(k-i) / (delta D^k), evaluated Horner-style:
    // S_k = A_k, S_j = A_j D^(k-j) + B S_{j+1}, result = B S_1.
    let mut dpow = vec![BigInt::one(); k + 1];
    for i in 1..=k {
        dpow[i] = &dpow[i - 1] * &g.den;
    }
    let mut s = vec![BigInt::zero(); len];
    s[0] = f.num[k].clone();
    for j in (1..k).rev() {
        s = mul_int_truncated(&g.num, &s, len);
        if !f.num[j].is_zero() {
            s[0] += &f.num[j] * &dpow[k - j];
        }
    }
    let exact = f.exact && g.exact && k * g.top_index() <= f.order;
    let num = mul_int_truncated(&g.num, &s, len);
    Ok(TruncatedSeries {
        num,
        den: &f.den * &dpow[k],
        order: f.order,
        prime: f.prime,
        exact,
    }
    .reduced())
}

/// `f^n`, the n-fold composition.
pub fn iterate(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    IterateCache::new(f.clone()).get(n).cloned()
}

/// Lazily computed iterates `f, f^2, ...` of one series.
#[derive(Clone, Debug)]
pub struct IterateCache {
    iterates: Vec<TruncatedSeries>,
    /// Caches of the same series truncated at lower orders, keyed by order.
    prefixes: Vec<(usize, IterateCache)>,
}

/// Lowest truncation order tried when a certificate may be found early.
const LADDER_START: usize = 16;

impl IterateCache {
    pub fn new(f: TruncatedSeries) -> Self {
        IterateCache {
            iterates: vec![f],
            prefixes: Vec::new(),
        }
    }

    /// The cache of the series truncated at `order` (at most the base order).
    /// Coefficients up to `order` of every iterate agree with the full ones.
    pub fn at_order(&mut self, order: usize) -> Result<&mut IterateCache> {
        if order == self.base().order {
            return Ok(self);
        }
        let pos = match self.prefixes.iter().position(|(o, _)| *o == order) {
            Some(pos) => pos,
            None => {
                let f = self.base().truncate(order)?;
                self.prefixes.push((order, IterateCache::new(f)));
                self.prefixes.len() - 1
            }
        };
        Ok(&mut self.prefixes[pos].1)
    }

    /// Truncation orders `LADDER_START, 2 LADDER_START, ...` up to the base order.
    fn ladder(&self) -> Vec<usize> {
        let full = self.base().order;
        let mut orders = Vec::new();
        let mut o = LADDER_START;
        while o < full {
            orders.push(o);
            o *= 2;
        }
        orders.push(full);
        orders
    }

    pub fn base(&self) -> &TruncatedSeries {
        &self.iterates[0]
    }

    pub fn get(&mut self, n: usize) -> Result<&TruncatedSeries> {
        if n == 0 {
            return Err(Error::Invalid("iteration count must be positive".into()));
        }
        while self.iterates.len() < n {
            let next = compose(&self.iterates[0], self.iterates.last().unwrap())?;
            self.iterates.push(next);
        }
        Ok(&self.iterates[n - 1])
    }

    /// Valued coefficients of `f^n(z) - z`.
    pub fn displacement(&mut self, n: usize) -> Result<ValuedPoly> {
        let it = self.get(n)?;
        let mut num = it.num.clone();
        num[1] -= &it.den;
        Ok(ValuedPoly::from_ints(&num, it.prime))
    }
}

/// Valued coefficients of `f^n(z) - z`; `b_1 = a_1^n - 1`.
pub fn displacement(f: &TruncatedSeries, n: usize) -> Result<ValuedPoly> {
    IterateCache::new(f.clone()).displacement(n)
}

/// Checks the two shape identities for `f^n`:
/// the linear coefficient is exactly `a_1^n`, and when `a_1 = 1`,
/// `f^n(z) - z - n (f(z) - z)` vanishes below `z^(2e-1)` where `e` is the index
/// of the first nonlinear term, leaving an integral remainder.
pub fn lemma_shape_check(f: &TruncatedSeries, n: usize) -> Result<bool> {
    let mut cache = IterateCache::new(f.clone());
    lemma_shape_check_cached(&mut cache, n)
}

pub(crate) fn lemma_shape_check_cached(cache: &mut IterateCache, n: usize) -> Result<bool> {
    let f = cache.base().clone();
    let fnn = cache.get(n)?.clone();
    let a1 = f.multiplier();
    if fnn.coeff(1) != num_traits::pow(a1.clone(), n) {
        return Ok(false);
    }
    if !a1.is_one() {
        return Ok(true);
    }
    if f.is_identity() {
        return Err(Error::Precondition("f = z has no first nonlinear term".into()));
    }
    let e = (2..=f.order).find(|&i| !f.num[i].is_zero()).expect("non-identity");
    let nn = BigRational::from_integer(BigInt::from(n));
    for i in 2..=f.order {
        let r = fnn.coeff(i) - &nn * f.coeff(i);
        if i < 2 * e - 1 {
            if !r.is_zero() {
                return Ok(false);
            }
        } else if vp(&r, f.prime) < Valuation::zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Three-valued outcome of the periodic-norm bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundOutcome {
    Satisfied,
    Violated,
    /// Some polygon needed for the check was not certified at this order.
    Inconclusive,
}

/// Result of checking `|y| >= (kappa |n|)^(1/n)` for the nonzero periodic
/// points of least period `n` in the open unit disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    /// `v_p(kappa)`; `None` when it could not be determined at this order.
    pub kappa_val: Option<Valuation>,
    /// Largest certified root valuation among least-period-n points, i.e. the
    /// smallest norm; `None` when no such root was found.
    pub extremal_valuation: Option<BigRational>,
    /// `(kappa_val + v_p(n)) / n`.
    pub bound_val: Option<BigRational>,
    pub roots: RootValuations,
    pub outcome: BoundOutcome,
    pub order: usize,
}

impl BoundReport {
    pub fn satisfied(&self) -> bool {
        self.outcome == BoundOutcome::Satisfied
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Lower bound for the valuations of the coefficients of `f^n(z) - z` past the
/// truncation; `None` when they all vanish (an exact linear `f`).
///
/// Only `0` is known unless `f` is an exact polynomial. Then, writing
/// `f = a_1 z + p^c h` with `h` integral, induction gives `f^d - a_1^d z` in
/// `p^c Z_p[[z]]`, so `F = f^d` has `F - z` in `p^s` with
/// `s = min(c, v(a_1^d - 1))`. For `s >= 1`, `F^j = z + j p^s k (mod p^(2s))`,
/// hence `F^p - z` lies in `p^(s+1)` and `f^n - z` in `p^(s + v_p(n/d))`
/// whenever `d | n`.
pub fn displacement_tail_floor(f: &TruncatedSeries, n: usize) -> Option<BigRational> {
    if !f.exact {
        return Some(BigRational::zero());
    }
    let den_val = vp_int(&f.den, f.prime).unwrap_or(0) as i64;
    let c = (2..=f.order).filter_map(|i| vp_int(&f.num[i], f.prime)).min()? as i64 - den_val;
    let a1 = f.multiplier();
    let mut best = c;
    for d in divisors(n) {
        let s = match vp(&(num_traits::pow(a1.clone(), d) - BigRational::one()), f.prime) {
            Valuation::Finite(v) => v.to_integer().try_into().map_or(c, |v: i64| v.min(c)),
            Valuation::Infinite => c,
        };
        if s >= 1 {
            best = best.max(s + vp_usize(n / d, f.prime));
        }
    }
    Some(BigRational::from_integer(best.into()))
}

/// Polygon of `f^n - z` and whether it reached a barrier, so that every root
/// of positive valuation is accounted for. Lower truncations are tried first:
/// a certificate found there is also one at the full order.
fn certified_polygon(cache: &mut IterateCache, n: usize) -> Result<(NewtonPolygon, bool)> {
    let floor = displacement_tail_floor(cache.base(), n);
    let ladder = cache.ladder();
    let last = ladder.len() - 1;
    for (k, order) in ladder.into_iter().enumerate() {
        let disp = cache.at_order(order)?.displacement(n)?;
        if disp.is_empty() {
            if k == last {
                // f^n = z to this order: every segment is unknown
                return Ok((
                    NewtonPolygon {
                        vertices: Vec::new(),
                        segments: Vec::new(),
                    },
                    false,
                ));
            }
            continue;
        }
        let floor = match &floor {
            Some(c) => c.clone(),
            None => disp.entries().iter().map(|(_, v)| v.clone()).max().unwrap_or_default(),
        };
        let poly = certify_truncated_above(&disp, order, &floor)?;
        let complete = poly.negative_slopes_certified() && barrier_vertex(&poly, &floor).is_some();
        if complete || k == last {
            return Ok((poly, complete));
        }
    }
    unreachable!("ladder always ends at the base order")
}

/// Valuation of the repulsion constant for the series in `cache`.
fn kappa(cache: &mut IterateCache) -> Result<Option<Valuation>> {
    let f = cache.base().clone();
    let a1 = f.multiplier();
    let m = stabilizing_power(&a1, f.prime)? as usize;
    let am = num_traits::pow(a1.clone(), m);
    let aux = if am.is_one() {
        // the first nonzero coefficient past z is exact at any order that sees it
        let mut found = None;
        for order in cache.ladder() {
            let disp = cache.at_order(order)?.displacement(m)?;
            if let Some((_, v)) = disp.entries().iter().find(|(i, _)| *i >= 2) {
                found = Some(v.clone());
                break;
            }
        }
        match found {
            Some(v) => Valuation::Finite(v),
            None => return Ok(None),
        }
    } else {
        Valuation::Infinite
    };
    kappa_for_multiplier(&a1, &aux, f.prime).map(Some)
}

fn check_unit_multiplier(f: &TruncatedSeries) -> Result<()> {
    match vp(&f.multiplier(), f.prime) {
        v if v == Valuation::zero() => {}
        v => return Err(Error::NotAUnit(v.to_string())),
    }
    if f.is_identity() {
        return Err(Error::Precondition("f = z: every point is fixed".into()));
    }
    Ok(())
}

/// Checks the norm bound at period `n` at the series' own truncation order.
pub fn periodic_norm_bound(f: &TruncatedSeries, n: usize) -> Result<BoundReport> {
    check_unit_multiplier(f)?;
    let mut cache = IterateCache::new(f.clone());
    bound_at(&mut cache, n)
}

fn bound_at(cache: &mut IterateCache, n: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    let order = cache.base().order;
    let p = cache.base().prime;
    let inconclusive = |kappa_val, bound_val| BoundReport {
        n,
        kappa_val,
        extremal_valuation: None,
        bound_val,
        roots: RootValuations::default(),
        outcome: BoundOutcome::Inconclusive,
        order,
    };
    let Some(kappa_val) = kappa(cache)? else {
        return Ok(inconclusive(None, None));
    };
    let Some(k) = kappa_val.finite().cloned() else {
        return Ok(inconclusive(Some(kappa_val), None));
    };
    let bound = (k + BigRational::from_integer(vp_usize(n, p).into())) / BigRational::from_integer(BigInt::from(n));

    // least-period multisets by divisor recursion
    let zero = BigRational::zero();
    let mut least: Vec<(usize, RootValuations)> = Vec::new();
    for d in divisors(n) {
        let (poly, complete) = certified_polygon(cache, d)?;
        if !complete || poly.vertices.is_empty() {
            return Ok(inconclusive(Some(kappa_val), Some(bound)));
        }
        let mut here = root_valuations(&poly).above(&zero);
        for (d2, l) in &least {
            if d % d2 == 0 {
                here = here.subtract(l);
            }
        }
        least.push((d, here));
    }
    let roots = least.pop().unwrap().1;
    let extremal = roots.max_valuation().cloned();
    let outcome = match &extremal {
        Some(v) if *v > bound => BoundOutcome::Violated,
        _ => BoundOutcome::Satisfied,
    };
    Ok(BoundReport {
        n,
        kappa_val: Some(kappa_val),
        extremal_valuation: extremal,
        bound_val: Some(bound),
        roots,
        outcome,
        order,
    })
}

/// Bound reports for every `n <= n_max`, doubling the truncation order (from
/// `start_order` up to `cap`) for periods that come back inconclusive.
/// `source(order)` must produce the same series at any requested order.
pub fn bound_reports<F>(source: F, n_max: usize, start_order: usize, cap: usize) -> Result<Vec<BoundReport>>
where
    F: Fn(usize) -> Result<TruncatedSeries>,
{
    let mut order = start_order;
    let first = source(order)?;
    check_unit_multiplier(&first)?;
    let mut cache = IterateCache::new(first);
    let mut reports: Vec<BoundReport> = (1..=n_max).map(|n| bound_at(&mut cache, n)).collect::<Result<_>>()?;
    while order * 2 <= cap && reports.iter().any(|r| r.outcome == BoundOutcome::Inconclusive) {
        order *= 2;
        let mut cache = IterateCache::new(source(order)?);
        for r in reports.iter_mut().filter(|r| r.outcome == BoundOutcome::Inconclusive) {
            *r = bound_at(&mut cache, r.n)?;
        }
    }
    Ok(reports)
}

/// For an attracting multiplier (`v(a_1) > 0`): true iff no `f^n - z` with
/// `n <= cap` has a negative Newton slope, i.e. 0 is the only periodic point
/// of those periods in the open unit disk.
pub fn attracting_check(f: &TruncatedSeries, cap: usize) -> Result<bool> {
    let v = vp(&f.multiplier(), f.prime);
    if v <= Valuation::zero() {
        return Err(Error::Precondition(format!("multiplier valuation {v} is not positive")));
    }
    let mut cache = IterateCache::new(f.clone());
    for n in 1..=cap {
        let (poly, _) = certified_polygon(&mut cache, n)?;
        if poly.segments.iter().any(|s| s.slope.is_negative()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Local power series of `phi` at a fixed point, in a coordinate `z` that is 0
/// at the point. The point is moved to `[0 : 1]` by an integral matrix with
/// unit determinant, then the unit denominator is inverted as a power series.
pub fn expand_at_fixed_point(phi: &FormPair, fixed: &ProjPoint, order: usize) -> Result<TruncatedSeries> {
    phi.require_good_reduction()?;
    let p = phi.prime();
    if phi.evaluate(fixed)? != *fixed {
        return Err(Error::NotFixed);
    }
    let fixed = normalize(fixed.x0().clone(), fixed.x1().clone(), p)?;
    let (ab, _) = to_scaled_ints(&[fixed.x0().clone(), fixed.x1().clone()]);
    let (a, b) = (ab[0].clone(), ab[1].clone());
    let unit = |x: &BigInt| vp_int(x, p) == Some(0);
    let second_row = if unit(&b) {
        [BigInt::zero(), BigInt::one()]
    } else {
        [BigInt::one(), BigInt::zero()]
    };
    let m = [[b.clone(), -a.clone()], second_row];
    let psi = phi.conjugate(&m)?;
    let num = psi.affine_f();
    let den = psi.affine_g();
    let zero = BigRational::zero();
    if num.coeffs().first().unwrap_or(&zero) != &zero {
        return Err(Error::NotFixed);
    }
    let d0 = den.coeffs().first().cloned().unwrap_or_default();
    if vp(&d0, p) != Valuation::zero() {
        return Err(Error::BadReduction(
            "denominator is not a unit at the fixed point".into(),
        ));
    }
    // 1 / den to order N
    let inv0 = d0.recip();
    let mut inv = vec![BigRational::zero(); order + 1];
    inv[0] = inv0.clone();
    for k in 1..=order {
        let mut s = BigRational::zero();
        for (j, dj) in den.coeffs().iter().enumerate().skip(1).take(k) {
            if !dj.is_zero() {
                s += dj * &inv[k - j];
            }
        }
        inv[k] = -s * &inv0;
    }
    let mut coeffs = vec![BigRational::zero(); order];
    for (i, ni) in num.coeffs().iter().enumerate().skip(1) {
        if ni.is_zero() {
            continue;
        }
        for k in 0..=order.saturating_sub(i) {
            if i + k >= 1 && i + k <= order {
                coeffs[i + k - 1] += ni * &inv[k];
            }
        }
    }
    TruncatedSeries::new(&coeffs, order, p)
}
