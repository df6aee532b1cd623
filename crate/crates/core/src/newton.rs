//! Newton polygons of valued coefficient lists.
//!
//! Points are `(i, v(b_i))`. A hull segment of slope `s` and horizontal length
//! `l` accounts for exactly `l` roots of valuation `-s`. Zero roots are not
//! reported: the polygon starts at the lowest index with a nonzero coefficient.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{shift_scaled, to_scaled_ints};
use crate::valuation::{vp_int, Prime, Valuation};

/// Coefficient valuations of a polynomial or truncated series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedPoly {
    entries: Vec<(usize, BigRational)>,
    prime: Prime,
}

impl ValuedPoly {
    /// Builds from `(index, valuation)` pairs; `+inf` entries are dropped.
    pub fn from_entries(entries: Vec<(usize, Valuation)>, prime: Prime) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        let mut last: Option<usize> = None;
        for (i, v) in entries {
            if last.is_some_and(|l| i <= l) {
                return Err(Error::Invalid("indices must be strictly increasing".into()));
            }
            last = Some(i);
            if let Valuation::Finite(v) = v {
                out.push((i, v));
            }
        }
        Ok(ValuedPoly { entries: out, prime })
    }

    pub fn from_coeffs(coeffs: &[BigRational], prime: Prime) -> Self {
        let entries = coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match crate::valuation::vp(c, prime) {
                Valuation::Finite(v) => Some((i, v)),
                Valuation::Infinite => None,
            })
            .collect();
        ValuedPoly { entries, prime }
    }

    pub fn from_ints(coeffs: &[BigInt], prime: Prime) -> Self {
        let entries = coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| vp_int(c, prime).map(|v| (i, BigRational::from_integer(v.into()))))
            .collect();
        ValuedPoly { entries, prime }
    }

    pub fn entries(&self) -> &[(usize, BigRational)] {
        &self.entries
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Valuation of the coefficient at `index` (`+inf` if absent).
    pub fn valuation_at(&self, index: usize) -> Valuation {
        self.entries
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, v)| Valuation::Finite(v.clone()))
            .unwrap_or(Valuation::Infinite)
    }

    /// Lowest index with a finite valuation.
    pub fn first_index(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    /// Shifts every valuation by `-delta`; used to factor a common scale out.
    fn offset(mut self, delta: &BigRational) -> Self {
        for (_, v) in &mut self.entries {
            *v -= delta;
        }
        self
    }
}

/// One edge of a Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub slope: BigRational,
    pub certified: bool,
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end - self.start
    }
}

/// Lower convex hull of the points `(i, v(b_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, BigRational)>,
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Horizontal span covered by certified segments.
    pub fn certified_span(&self) -> usize {
        self.segments.iter().filter(|s| s.certified).map(Segment::length).sum()
    }

    pub fn all_certified(&self) -> bool {
        self.segments.iter().all(|s| s.certified)
    }

    /// Whether every negative-slope segment is certified.
    pub fn negative_slopes_certified(&self) -> bool {
        self.segments
            .iter()
            .filter(|s| s.slope.is_negative())
            .all(|s| s.certified)
    }
}

/// Multiset of root valuations, one entry per distinct valuation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootValuations {
    pairs: Vec<(BigRational, usize)>,
}

impl RootValuations {
    pub fn new(pairs: impl IntoIterator<Item = (BigRational, usize)>) -> Self {
        let mut out = RootValuations::default();
        for (v, m) in pairs {
            out.insert(v, m);
        }
        out
    }

    pub fn insert(&mut self, v: BigRational, mult: usize) {
        if mult == 0 {
            return;
        }
        match self.pairs.binary_search_by(|(x, _)| x.cmp(&v)) {
            Ok(i) => self.pairs[i].1 += mult,
            Err(i) => self.pairs.insert(i, (v, mult)),
        }
    }

    /// Pairs sorted by increasing valuation.
    pub fn pairs(&self) -> &[(BigRational, usize)] {
        &self.pairs
    }

    pub fn total(&self) -> usize {
        self.pairs.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_valuation(&self) -> Option<&BigRational> {
        self.pairs.last().map(|(v, _)| v)
    }

    pub fn multiplicity(&self, v: &BigRational) -> usize {
        self.pairs.iter().find(|(x, _)| x == v).map(|(_, m)| *m).unwrap_or(0)
    }

    /// Multiset union.
    pub fn union(&self, other: &RootValuations) -> RootValuations {
        let mut out = self.clone();
        for (v, m) in &other.pairs {
            out.insert(v.clone(), *m);
        }
        out
    }

    /// Multiset difference, saturating at zero multiplicity.
    pub fn subtract(&self, other: &RootValuations) -> RootValuations {
        RootValuations {
            pairs: self
                .pairs
                .iter()
                .filter_map(|(v, m)| {
                    let left = m.saturating_sub(other.multiplicity(v));
                    (left > 0).then(|| (v.clone(), left))
                })
                .collect(),
        }
    }

    /// Entries with valuation strictly greater than `floor`.
    pub fn above(&self, floor: &BigRational) -> RootValuations {
        RootValuations {
            pairs: self.pairs.iter().filter(|(v, _)| v > floor).cloned().collect(),
        }
    }
}

/// Cross product sign test: is `b` strictly below the chord from `a` to `c`?
fn strictly_below(a: &(usize, BigRational), b: &(usize, BigRational), c: &(usize, BigRational)) -> bool {
    let (ax, bx, cx) = (a.0 as i64, b.0 as i64, c.0 as i64);
    let lhs = (&b.1 - &a.1) * BigRational::from_integer(BigInt::from(cx - ax));
    let rhs = (&c.1 - &a.1) * BigRational::from_integer(BigInt::from(bx - ax));
    lhs < rhs
}

fn hull_of(points: &[(usize, BigRational)]) -> NewtonPolygon {
    let mut stack: Vec<(usize, BigRational)> = Vec::new();
    for pt in points {
        while stack.len() >= 2 && !strictly_below(&stack[stack.len() - 2], &stack[stack.len() - 1], pt) {
            stack.pop();
        }
        stack.push(pt.clone());
    }
    let segments = stack
        .windows(2)
        .map(|w| Segment {
            start: w[0].0,
            end: w[1].0,
            slope: (&w[1].1 - &w[0].1) / BigRational::from_integer(BigInt::from(w[1].0 - w[0].0)),
            certified: true,
        })
        .collect();
    NewtonPolygon {
        vertices: stack,
        segments,
    }
}

/// Lower convex hull of a finite polynomial; every segment is certified.
pub fn lower_hull(poly: &ValuedPoly) -> Result<NewtonPolygon> {
    if poly.is_empty() {
        return Err(Error::Empty);
    }
    Ok(hull_of(&poly.entries))
}

/// One root-valuation entry per certified segment.
pub fn root_valuations(polygon: &NewtonPolygon) -> RootValuations {
    RootValuations::new(
        polygon
            .segments
            .iter()
            .filter(|s| s.certified)
            .map(|s| (-s.slope.clone(), s.length())),
    )
}

/// Hull of a series truncated at `truncation_order`, with each segment marked
/// certified only when no omitted coefficient can change it.
///
/// All coefficients of the series have valuation >= 0, so once the hull
/// reaches a valuation-0 vertex nothing beyond the truncation can undercut the
/// part to its left. Negative-slope segments ending at or before such a vertex
/// are certified; every other segment is not.
pub fn certify_truncated(poly: &ValuedPoly, truncation_order: usize) -> Result<NewtonPolygon> {
    certify_truncated_above(poly, truncation_order, &BigRational::zero())
}

/// As [`certify_truncated`], for a series whose omitted coefficients are known
/// to have valuation >= `floor`. The barrier is the leftmost vertex of minimal
/// valuation, provided that minimum is at most `floor`.
pub fn certify_truncated_above(
    poly: &ValuedPoly,
    truncation_order: usize,
    floor: &BigRational,
) -> Result<NewtonPolygon> {
    if poly.is_empty() {
        return Err(Error::Empty);
    }
    for (i, v) in &poly.entries {
        if v.is_negative() {
            return Err(Error::NegativeValuation {
                index: *i,
                valuation: crate::valuation::fmt_rational(v),
            });
        }
        if *i > truncation_order {
            return Err(Error::Invalid(format!(
                "index {i} beyond truncation order {truncation_order}"
            )));
        }
    }
    let mut poly_hull = hull_of(&poly.entries);
    let barrier = barrier_vertex(&poly_hull, floor);
    for s in &mut poly_hull.segments {
        s.certified = s.slope.is_negative() && barrier.is_some_and(|b| s.end <= b);
    }
    Ok(poly_hull)
}

/// Index of the leftmost minimal vertex when its valuation is at most `floor`.
pub fn barrier_vertex(polygon: &NewtonPolygon, floor: &BigRational) -> Option<usize> {
    let (i, v) = polygon
        .vertices
        .iter()
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))?;
    (v <= floor).then_some(*i)
}

/// Valuations of the coefficients of `P(z + shift)`. The root valuations of its
/// hull are the multiset `{ v(y - shift) : P(y) = 0 }` with zero distances
/// (roots equal to `shift`) omitted.
pub fn shifted_valuations(coeffs: &[BigRational], shift: &BigRational, p: Prime) -> Result<ValuedPoly> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let (ints, l) = to_scaled_ints(&c);
    let (shifted, scale) = shift_scaled(&ints, shift);
    let denom_val = vp_int(&(l * scale), p).expect("nonzero scale") as i64;
    Ok(ValuedPoly::from_ints(&shifted, p).offset(&BigRational::from_integer(denom_val.into())))
}
