//! Points of the projective line over Q with normalized coordinates, the
//! chordal ultrametric and the reduction map.
//!
//! The affine coordinate is `t = X0 / X1`; `[t : 1]` is the affine point `t`
//! and `[1 : 0]` is the point at infinity.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::valuation::{fmt_rational, log_plus, residue_mod_p, vp, vp_i64, Prime, Valuation};

/// A point `[X0 : X1]` with `min(v(X0), v(X1)) = 0`.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    x0: BigRational,
    x1: BigRational,
    prime: Prime,
}

/// Reduction of a normalized point modulo p. Equality is projective.
#[derive(Clone, Copy, Debug)]
pub struct ResiduePoint {
    pub x0: u64,
    pub x1: u64,
    pub p: u64,
}

impl PartialEq for ResiduePoint {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && (self.x0 as u128 * other.x1 as u128) % self.p as u128
                == (self.x1 as u128 * other.x0 as u128) % self.p as u128
    }
}

impl Eq for ResiduePoint {}

/// Scales `(x0, x1)` by a power of p so the smaller valuation is 0.
pub fn normalize(x0: BigRational, x1: BigRational, p: Prime) -> Result<ProjPoint> {
    let m = match (vp_i64(&x0, p), vp_i64(&x1, p)) {
        (None, None) => return Err(Error::ZeroPoint),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (Some(a), Some(b)) => a.min(b),
    };
    let pb = p.to_bigint();
    let scale = if m >= 0 {
        BigRational::new(BigInt::one(), num_traits::pow(pb, m as usize))
    } else {
        BigRational::from_integer(num_traits::pow(pb, (-m) as usize))
    };
    Ok(ProjPoint {
        x0: x0 * &scale,
        x1: x1 * scale,
        prime: p,
    })
}

impl ProjPoint {
    /// The affine point `t`, i.e. `[t : 1]`.
    pub fn affine(t: BigRational, p: Prime) -> ProjPoint {
        normalize(t, BigRational::one(), p).expect("nonzero second coordinate")
    }

    pub fn infinity(p: Prime) -> ProjPoint {
        ProjPoint {
            x0: BigRational::one(),
            x1: BigRational::zero(),
            prime: p,
        }
    }

    pub fn x0(&self) -> &BigRational {
        &self.x0
    }

    pub fn x1(&self) -> &BigRational {
        &self.x1
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_infinity(&self) -> bool {
        self.x1.is_zero()
    }

    /// Affine coordinate `X0 / X1`, or `None` at infinity.
    pub fn affine_coordinate(&self) -> Option<BigRational> {
        (!self.x1.is_zero()).then(|| &self.x0 / &self.x1)
    }

    /// Image under the integer matrix `g` acting on `(X0, X1)` as a column.
    pub fn transform(&self, g: &[[BigInt; 2]; 2]) -> Result<ProjPoint> {
        let e = |i: usize, j: usize| BigRational::from_integer(g[i][j].clone());
        normalize(
            e(0, 0) * &self.x0 + e(0, 1) * &self.x1,
            e(1, 0) * &self.x0 + e(1, 1) * &self.x1,
            self.prime,
        )
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && &self.x0 * &other.x1 == &self.x1 * &other.x0
    }
}

impl Eq for ProjPoint {}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}]", fmt_rational(&self.x0), fmt_rational(&self.x1))
    }
}

/// `v(X0 Y1 - X1 Y0)` on normalized coordinates, so `Delta = p^(-result)`.
/// Always >= 0; `+inf` iff the points coincide.
pub fn delta(x: &ProjPoint, y: &ProjPoint) -> Result<Valuation> {
    if x.prime != y.prime {
        return Err(Error::PrimeMismatch(x.prime.get(), y.prime.get()));
    }
    Ok(vp(&(&x.x0 * &y.x1 - &x.x1 * &y.x0), x.prime))
}

/// Normalized distance between affine points,
/// `v(x - y) + log+|x| + log+|y|` (valuations add where norms multiply).
pub fn delta_affine(x: &BigRational, y: &BigRational, p: Prime) -> Valuation {
    vp(&(x - y), p) + &log_plus(x, p) + &log_plus(y, p)
}

/// Coordinatewise reduction of a normalized point.
pub fn reduce(x: &ProjPoint) -> ResiduePoint {
    let p = x.prime;
    ResiduePoint {
        x0: residue_mod_p(&x.x0, p).expect("normalized coordinates are p-integral"),
        x1: residue_mod_p(&x.x1, p).expect("normalized coordinates are p-integral"),
        p: p.get(),
    }
}

/// Whether an integer matrix has a p-unit determinant.
pub fn is_unimodular(g: &[[BigInt; 2]; 2], p: Prime) -> bool {
    let det = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
    !det.mod_floor(&p.to_bigint()).is_zero()
}
