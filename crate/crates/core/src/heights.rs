//! Morphic local heights, their limit formulas, and the repulsion monitor for
//! periodic points near a base point.
//!
//! Every value is a valuation-scaled logarithm: a row value `r` stands for
//! `r * log p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::local::{
    attracting_check, bound_reports, expand_at_fixed_point, BoundOutcome, BoundReport, DEFAULT_ORDER, DEFAULT_ORDER_CAP,
};
use crate::morphism::FormPair;
use crate::newton::{lower_hull, root_valuations, shifted_valuations};
use crate::par;
use crate::projective::ProjPoint;
use crate::valuation::{int, log_plus, vp, vp_i64, vp_usize, Prime, Valuation};

/// One step of a limit computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub n: usize,
    pub value: BigRational,
    /// `value - limit`.
    pub error: BigRational,
}

/// Values `value_n` for consecutive `n = 1..`, against a closed-form limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    pub limit: BigRational,
}

impl ConvergenceTrace {
    fn from_values(values: Vec<BigRational>, limit: BigRational) -> Self {
        let rows = values
            .into_iter()
            .enumerate()
            .map(|(i, value)| TraceRow {
                n: i + 1,
                error: &value - &limit,
                value,
            })
            .collect();
        ConvergenceTrace { rows, limit }
    }

    pub fn row(&self, n: usize) -> Option<&TraceRow> {
        self.rows.get(n.checked_sub(1)?)
    }
}

/// One period of the repulsion monitor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorRow {
    pub n: usize,
    /// Largest `v(y - x)` over least-period-n points `y != x` in the unit
    /// disk around `x`, or 0 when there are none.
    pub v: BigRational,
    /// `n v - v_p(n)`; the repulsion bound says this stays bounded.
    pub witness: BigRational,
    /// Running maximum of the witness through this row.
    pub running_max: BigRational,
}

/// Comparison with the local power-series model when the base point is fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalCrossCheck {
    /// Unit multiplier: bound reports of the local model, and whether their
    /// certified extremal valuations match the monitor rows.
    Repelling {
        reports: Vec<BoundReport>,
        consistent: bool,
    },
    /// Attracting multiplier: no other periodic point in the open disk.
    Attracting { isolated: bool, consistent: bool },
    /// The local model is the identity to the computed order.
    Degenerate,
}

impl LocalCrossCheck {
    pub fn consistent(&self) -> bool {
        match self {
            LocalCrossCheck::Repelling { consistent, .. } | LocalCrossCheck::Attracting { consistent, .. } => {
                *consistent
            }
            LocalCrossCheck::Degenerate => true,
        }
    }
}

/// Witness rows for the bound `Delta(x, y) >= (kappa_x |n|)^(1/n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundMonitor {
    pub rows: Vec<MonitorRow>,
    /// Maximum witness over all rows; `v_p` of the empirical `kappa_x`.
    pub running_max: Option<BigRational>,
    /// Least period of the base point, if it is periodic within range.
    pub period: Option<usize>,
    pub local: Option<LocalCrossCheck>,
}

impl BoundMonitor {
    /// Running maximum over rows with index `<= n`.
    pub fn running_max_through(&self, n: usize) -> Option<&BigRational> {
        self.rows.iter().take_while(|r| r.n <= n).last().map(|r| &r.running_max)
    }

    /// True when the last row raised the running maximum, i.e. the witness
    /// was still growing at the end of the range.
    pub fn growing_tail(&self) -> bool {
        match self.rows.as_slice() {
            [.., a, b] => b.running_max > a.running_max,
            _ => false,
        }
    }
}

fn require_height_setting(phi: &FormPair) -> Result<()> {
    phi.require_good_reduction()?;
    if !phi.fixes_infinity() {
        return Err(Error::InfinityNotFixed);
    }
    Ok(())
}

fn pow_int(base: usize, e: usize) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(base), e))
}

/// Local height of `x` for a map with good reduction fixing infinity:
/// `log+ |x|`.
pub fn morphic_local_height(x: &BigRational, phi: &FormPair) -> Result<BigRational> {
    require_height_setting(phi)?;
    Ok(log_plus(x, phi.prime()))
}

/// `value_n = -v(P_n(x)) / d^n`, converging to `log+ |x|`.
pub fn height_limit_trace(x: &BigRational, phi: &FormPair, n_max: usize) -> Result<ConvergenceTrace> {
    require_height_setting(phi)?;
    let p = phi.prime();
    let d = phi.form_degree();
    let polys = phi.periodic_polynomials(n_max)?;
    let vals = par::map_items(&polys, |pn| vp(&pn.poly.eval(x), p));
    let mut values = Vec::with_capacity(n_max);
    for (i, v) in vals.into_iter().enumerate() {
        match v {
            Valuation::Infinite => return Err(Error::Periodic(i + 1)),
            Valuation::Finite(v) => values.push(-v / pow_int(d, i + 1)),
        }
    }
    Ok(ConvergenceTrace::from_values(values, log_plus(x, p)))
}

/// The squaring map's trace computed straight from `x^(2^n) - x`; for
/// `p > 2`.
pub fn jensen_sum(x: &BigRational, p: Prime, n_max: usize) -> Result<ConvergenceTrace> {
    if p.get() == 2 {
        return Err(Error::Precondition("the squaring example needs p > 2".into()));
    }
    let vals = par::map_range(1..n_max + 1, |n| {
        let e = 1usize << n;
        vp_i64(&(num_traits::pow(x.clone(), e) - x), p)
    });
    let mut values = Vec::with_capacity(n_max);
    for (i, v) in vals.into_iter().enumerate() {
        match v {
            None => return Err(Error::Periodic(i + 1)),
            Some(v) => values.push(int(-v) / pow_int(2, i + 1)),
        }
    }
    Ok(ConvergenceTrace::from_values(values, log_plus(x, p)))
}

/// Trace for the duplication map of `y^2 = x^3 + a x + b`:
/// `value_n = -(v(g_n(xQ)) - v(lead g_n)) / 4^n`, where the roots of the
/// denominator `g_n` are the x-coordinates of the nonzero `2^n`-torsion.
pub fn elliptic_height_trace(
    a: &BigRational,
    b: &BigRational,
    x_q: &BigRational,
    p: Prime,
    n_max: usize,
) -> Result<ConvergenceTrace> {
    if p.get() == 2 {
        return Err(Error::Precondition("the elliptic example needs p > 2".into()));
    }
    if vp(a, p) < Valuation::zero() || vp(b, p) < Valuation::zero() {
        return Err(Error::Precondition("curve coefficients must be p-integral".into()));
    }
    let disc = int(4) * a * a * a + int(27) * b * b;
    let dv = vp(&disc, p);
    if dv != Valuation::zero() {
        return Err(Error::BadReduction(format!("v(4a^3 + 27b^2) = {dv}")));
    }
    let phi = FormPair::duplication(a, b, p)?;
    let iterates = phi.iterates(n_max)?;
    let vals = par::map_items(&iterates, |it| {
        let g = it.affine_g();
        let lead = vp(g.lead().expect("nonzero denominator"), p);
        (vp(&g.eval(x_q), p), lead)
    });
    let mut values = Vec::with_capacity(n_max);
    for (i, (v, lead)) in vals.into_iter().enumerate() {
        match (v, lead) {
            (Valuation::Finite(v), Valuation::Finite(l)) => values.push(-(v - l) / pow_int(4, i + 1)),
            _ => return Err(Error::Torsion(i + 1)),
        }
    }
    Ok(ConvergenceTrace::from_values(values, log_plus(x_q, p)))
}

/// Tracks `n v - v_p(n)` where `v` is the largest `v(y - x)` over points `y`
/// of least period `n` in the closed unit disk around `x`.
///
/// A base point outside the unit disk is first moved by the inversion, which
/// preserves the chordal metric. Points with `v(y - x) < 0` are at normalized
/// distance 1 and contribute `v = 0`. Periods whose least-period part is
/// constant have no row.
pub fn repulsion_monitor(x: &BigRational, phi: &FormPair, n_max: usize) -> Result<BoundMonitor> {
    phi.require_good_reduction()?;
    let p = phi.prime();
    let (phi, x) = if vp(x, p) < Valuation::zero() {
        let inv = [[BigInt::zero(), BigInt::one()], [BigInt::one(), BigInt::zero()]];
        (phi.conjugate(&inv)?, x.recip())
    } else {
        (phi.clone(), x.clone())
    };
    let parts = phi.least_period_parts(n_max)?;
    let zero = BigRational::zero();
    let computed = par::map_items(&parts, |q| -> Result<Option<(BigRational, bool)>> {
        if q.poly.is_constant() {
            return Ok(None);
        }
        let at_x = q.poly.eval(&x).is_zero();
        let shifted = shifted_valuations(q.coeffs(), &x, p)?;
        let v = if shifted.is_empty() {
            zero.clone()
        } else {
            let roots = root_valuations(&lower_hull(&shifted)?);
            roots
                .above(&zero)
                .max_valuation()
                .cloned()
                .unwrap_or_else(|| zero.clone())
                .max(zero.clone())
        };
        Ok(Some((v, at_x)))
    });
    let mut rows = Vec::new();
    let mut period = None;
    let mut running: Option<BigRational> = None;
    for (i, entry) in computed.into_iter().enumerate() {
        let n = i + 1;
        let Some((v, at_x)) = entry? else { continue };
        if at_x && period.is_none() {
            period = Some(n);
        }
        let witness = int(n as i64) * &v - int(vp_usize(n, p));
        let rm = match running {
            Some(r) if r >= witness => r,
            _ => witness.clone(),
        };
        running = Some(rm.clone());
        rows.push(MonitorRow {
            n,
            v,
            witness,
            running_max: rm,
        });
    }
    let local = if period == Some(1) {
        Some(cross_check(&phi, &x, n_max, &rows)?)
    } else {
        None
    };
    Ok(BoundMonitor {
        rows,
        running_max: running,
        period,
        local,
    })
}

fn cross_check(phi: &FormPair, x: &BigRational, n_max: usize, rows: &[MonitorRow]) -> Result<LocalCrossCheck> {
    let p = phi.prime();
    let fixed = ProjPoint::affine(x.clone(), p);
    let series = expand_at_fixed_point(phi, &fixed, DEFAULT_ORDER)?;
    if series.is_identity() {
        return Ok(LocalCrossCheck::Degenerate);
    }
    let row_v = |n: usize| rows.iter().find(|r| r.n == n).map(|r| r.v.clone());
    let mult_v = vp(&series.multiplier(), p);
    if mult_v > Valuation::zero() {
        let isolated = attracting_check(&series, n_max)?;
        // no periodic point in the open disk means no row has v > 0
        let none_inside = rows.iter().all(|r| !r.v.is_positive());
        return Ok(LocalCrossCheck::Attracting {
            isolated,
            consistent: isolated == none_inside,
        });
    }
    let reports = bound_reports(
        |order| expand_at_fixed_point(phi, &fixed, order),
        n_max,
        DEFAULT_ORDER,
        DEFAULT_ORDER_CAP,
    )?;
    let consistent = reports.iter().all(|r| {
        if r.outcome == BoundOutcome::Inconclusive {
            return true;
        }
        let monitor = row_v(r.n).unwrap_or_else(BigRational::zero);
        match &r.extremal_valuation {
            Some(e) => *e == monitor,
            None => !monitor.is_positive(),
        }
    });
    Ok(LocalCrossCheck::Repelling { reports, consistent })
}
