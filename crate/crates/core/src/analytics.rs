//! Closed-form kin selection on a 2x2 game.
//!
//! Two settings are covered. At a *single locus* both partners consult the
//! same locus, and a partner carries the focal allele with probability r,
//! otherwise it is drawn from the population. With *roles*, the interaction
//! history puts the focal player in the position of potential altruist while
//! the partner's move comes from a different locus whose cooperation
//! frequency is `f_c_other`.
//!
//! For each setting we give the allele fitnesses, the relatedness threshold
//! above which cooperation is favoured, the interval the threshold sweeps as
//! the frequency runs over [0, 1], and the mixed equilibrium.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::game::{synergy, PayoffMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinContext {
    pub r: f64,
    pub f_c: f64,
}

impl KinContext {
    pub fn new(r: f64, f_c: f64) -> Result<Self> {
        Ok(KinContext {
            r: check_probability("r", r)?,
            f_c: check_probability("f_c", f_c)?,
        })
    }
}

/// A relatedness threshold. Values outside [0, 1] are kept as computed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub in_unit_interval: bool,
}

impl Threshold {
    fn new(value: f64) -> Self {
        Threshold { value, in_unit_interval: (0.0..=1.0).contains(&value) }
    }
}

/// Endpoints of a threshold curve: its values at frequency 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBounds {
    pub at_f0: f64,
    pub at_f1: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ThresholdBounds {
    fn new(at_f0: f64, at_f1: f64) -> Self {
        ThresholdBounds { at_f0, at_f1, lo: at_f0.min(at_f1), hi: at_f0.max(at_f1) }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn strictly_contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    /// `(f_c, r')` samples on a uniform grid including both ends.
    pub points: Vec<(f64, f64)>,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Mixed,
    CooperationFixes,
    DefectionFixes,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub f_star: Option<f64>,
    pub stable: bool,
    /// Open interval of r for which the equilibrium is mixed.
    pub interval_lo: f64,
    pub interval_hi: f64,
    pub outcome: Outcome,
}

impl EquilibriumReport {
    pub fn existence_interval(&self) -> (f64, f64) {
        (self.interval_lo, self.interval_hi)
    }
}

fn nonzero(denominator: f64, f_c: f64) -> Result<f64> {
    if denominator == 0.0 || !denominator.is_finite() {
        Err(Error::UndefinedThreshold { f_c })
    } else {
        Ok(denominator)
    }
}

// ---------------------------------------------------------------------------
// single locus

/// `(w_c, w_d)` of cooperation and defection alleles at a shared locus.
pub fn fitness_single(m: &PayoffMatrix, ctx: &KinContext) -> (f64, f64) {
    let KinContext { r, f_c } = *ctx;
    let (t, rr, p, s) = (m.t(), m.r(), m.p(), m.s());
    let w_c = r * rr + (1.0 - r) * (f_c * rr + (1.0 - f_c) * s);
    let w_d = r * p + (1.0 - r) * (f_c * t + (1.0 - f_c) * p);
    (w_c, w_d)
}

/// Relatedness above which cooperation alleles are favoured at a shared
/// locus, as a function of their frequency.
pub fn threshold_single(m: &PayoffMatrix, f_c: f64) -> Result<Threshold> {
    check_probability("f_c", f_c)?;
    let fd = f_c * synergy(m);
    let denominator = nonzero(fd + m.s() - m.r(), f_c)?;
    Ok(Threshold::new((fd + m.s() - m.p()) / denominator))
}

/// (S - P)/(S - R) at f_c = 0 and (R - T)/(P - T) at f_c = 1.
pub fn threshold_bounds_single(m: &PayoffMatrix) -> Result<ThresholdBounds> {
    let at_f0 = (m.s() - m.p()) / nonzero(m.s() - m.r(), 0.0)?;
    let at_f1 = (m.r() - m.t()) / nonzero(m.p() - m.t(), 1.0)?;
    Ok(ThresholdBounds::new(at_f0, at_f1))
}

pub fn threshold_curve_single(m: &PayoffMatrix, samples: usize) -> Result<ThresholdCurve> {
    let bounds = threshold_bounds_single(m)?;
    let points = sample_curve(samples, |f| threshold_single(m, f))?;
    Ok(ThresholdCurve { points, lo: bounds.lo, hi: bounds.hi })
}

/// Mixed equilibrium frequency of cooperation alleles at a shared locus.
///
/// The equilibrium is stable when d < 0 and unstable when d > 0. For r
/// outside the open interval of [`threshold_bounds_single`] one allele fixes
/// and `f_star` is `None`. An additive matrix has no mixed equilibrium, and
/// the closed form is undefined at r = 1; both are errors.
pub fn equilibrium_single(m: &PayoffMatrix, r: f64) -> Result<EquilibriumReport> {
    check_probability("r", r)?;
    let d = synergy(m);
    if d == 0.0 {
        return Err(Error::AdditiveMatrix);
    }
    if r == 1.0 {
        return Err(Error::FullRelatedness);
    }
    let bounds = threshold_bounds_single(m)?;
    let (f_star, outcome) = if bounds.strictly_contains(r) {
        let f = (m.p() - m.s() - r * (m.r() - m.s())) / ((1.0 - r) * d);
        (Some(f), Outcome::Mixed)
    } else {
        let (w_c, w_d) = fitness_single(m, &KinContext { r, f_c: 0.5 });
        (None, fixation(w_c - w_d))
    };
    Ok(EquilibriumReport {
        f_star,
        stable: f_star.is_some() && d < 0.0,
        interval_lo: bounds.lo,
        interval_hi: bounds.hi,
        outcome,
    })
}

fn fixation(advantage: f64) -> Outcome {
    if advantage > 0.0 {
        Outcome::CooperationFixes
    } else {
        Outcome::DefectionFixes
    }
}

// ---------------------------------------------------------------------------
// roles

/// `(i_c, i_d)` of the allele deciding the potential altruist's move, given
/// the cooperation frequency at the partner's locus.
pub fn inclusive_fitness_roles(m: &PayoffMatrix, r: f64, f_c_other: f64) -> (f64, f64) {
    let f = f_c_other;
    let (t, rr, p, s) = (m.t(), m.r(), m.p(), m.s());
    let i_c = rr * f + s * (1.0 - f) + r * (rr * f + t * (1.0 - f));
    let i_d = t * f + p * (1.0 - f) + r * (s * f + p * (1.0 - f));
    (i_c, i_d)
}

pub fn threshold_roles(m: &PayoffMatrix, f_c_other: f64) -> Result<Threshold> {
    check_probability("f_c_other", f_c_other)?;
    let fd = f_c_other * synergy(m);
    let denominator = nonzero(fd + m.t() - m.p(), f_c_other)?;
    Ok(Threshold::new(-(fd + m.s() - m.p()) / denominator))
}

/// (P - S)/(T - P) at f = 0 and (T - R)/(R - S) at f = 1.
pub fn threshold_bounds_roles(m: &PayoffMatrix) -> Result<ThresholdBounds> {
    let at_f0 = (m.p() - m.s()) / nonzero(m.t() - m.p(), 0.0)?;
    let at_f1 = (m.t() - m.r()) / nonzero(m.r() - m.s(), 1.0)?;
    Ok(ThresholdBounds::new(at_f0, at_f1))
}

pub fn threshold_curve_roles(m: &PayoffMatrix, samples: usize) -> Result<ThresholdCurve> {
    let bounds = threshold_bounds_roles(m)?;
    let points = sample_curve(samples, |f| threshold_roles(m, f))?;
    Ok(ThresholdCurve { points, lo: bounds.lo, hi: bounds.hi })
}

/// Frequency of cooperation at the partner's locus that equalises i_c and
/// i_d: `(P - S - r(T - P)) / ((1 + r) d)`.
///
/// In the coupled two-locus flow the symmetric point built from this value
/// is a saddle, so `stable` is always false.
pub fn equilibrium_roles(m: &PayoffMatrix, r: f64) -> Result<EquilibriumReport> {
    check_probability("r", r)?;
    let d = synergy(m);
    if d == 0.0 {
        return Err(Error::AdditiveMatrix);
    }
    let bounds = threshold_bounds_roles(m)?;
    let (f_star, outcome) = if bounds.strictly_contains(r) {
        let f = (m.p() - m.s() - r * (m.t() - m.p())) / ((1.0 + r) * d);
        (Some(f), Outcome::Mixed)
    } else {
        let (i_c, i_d) = inclusive_fitness_roles(m, r, 0.5);
        (None, fixation(i_c - i_d))
    };
    Ok(EquilibriumReport {
        f_star,
        stable: false,
        interval_lo: bounds.lo,
        interval_hi: bounds.hi,
        outcome,
    })
}

/// Inclusive fitnesses with roles written in cost/benefit/synergy form,
/// with `q` the partner's cooperation frequency.
pub fn cost_benefit_fitness(b: f64, c: f64, d: f64, q: f64, r: f64) -> (f64, f64) {
    (r * (b + q * d) - c + q * (b + d), q * b)
}

/// Hamilton's rule, c/b < r. Requires b > 0.
pub fn hamiltons_rule(b: f64, c: f64, r: f64) -> Result<bool> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::NonPositive { name: "b", value: b });
    }
    Ok(c / b < r)
}

fn sample_curve(
    samples: usize,
    threshold: impl Fn(f64) -> Result<Threshold>,
) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "a threshold curve needs at least 2 samples, got {samples}"
        )));
    }
    let last = (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            let f = i as f64 / last;
            threshold(f).map(|t| (f, t.value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn pm(t: f64, r: f64, p: f64, s: f64) -> PayoffMatrix {
        PayoffMatrix::new(t, r, p, s).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < EPS
    }

    #[test]
    fn single_locus_fitness() {
        let m = PayoffMatrix::canonical();
        for f in [0.0, 0.3, 1.0] {
            assert_eq!(fitness_single(&m, &KinContext::new(1.0, f).unwrap()), (3.0, 1.0));
        }
        assert_eq!(fitness_single(&m, &KinContext::new(0.0, 1.0).unwrap()), (3.0, 5.0));
        let (w_c, w_d) = fitness_single(&m, &KinContext::new(5.0 / 12.0, 3.0 / 7.0).unwrap());
        assert!(close(w_c, w_d));
        assert!(KinContext::new(1.2, 0.5).is_err());
        assert!(KinContext::new(0.5, -0.1).is_err());
    }

    #[test]
    fn single_locus_thresholds() {
        let m = PayoffMatrix::canonical();
        assert!(close(threshold_single(&m, 0.0).unwrap().value, 1.0 / 3.0));
        assert!(close(threshold_single(&m, 1.0).unwrap().value, 0.5));
        let additive = pm(6.0, 4.0, 2.0, 0.0);
        for f in [0.0, 0.25, 0.6, 1.0] {
            assert!(close(threshold_single(&additive, f).unwrap().value, 0.5));
        }
    }

    #[test]
    fn single_locus_bounds() {
        let b = threshold_bounds_single(&PayoffMatrix::canonical()).unwrap();
        assert!(close(b.lo, 1.0 / 3.0) && close(b.hi, 0.5));
        assert!(b.at_f1 > b.at_f0);

        let b = threshold_bounds_single(&pm(6.0, 5.0, 2.0, 0.0)).unwrap();
        assert!(close(b.at_f0, 0.4) && close(b.at_f1, 0.25));
        assert!(b.at_f0 > b.at_f1);
        assert!(close(b.lo, 0.25) && close(b.hi, 0.4));

        let b = threshold_bounds_single(&pm(6.0, 4.0, 2.0, 0.0)).unwrap();
        assert_eq!((b.lo, b.hi), (0.5, 0.5));

        assert!(matches!(
            threshold_bounds_single(&pm(1.0, 2.0, 0.0, 2.0)),
            Err(Error::UndefinedThreshold { .. })
        ));
    }

    #[test]
    fn degenerate_threshold_denominator() {
        // d = -4 and S - R = 1, so f d + S - R vanishes at f = 1/4.
        let m = pm(3.0, 0.0, 0.0, 1.0);
        assert!(matches!(threshold_single(&m, 0.25), Err(Error::UndefinedThreshold { .. })));
        assert!(threshold_single(&m, 1.5).is_err());
    }

    #[test]
    fn out_of_range_threshold_is_flagged() {
        // Chicken-like ordering gives thresholds below zero.
        let t = threshold_single(&pm(2.0, 1.0, -2.0, -1.0), 0.0).unwrap();
        assert!(!t.in_unit_interval);
        assert!(close(t.value, -0.5));
    }

    #[test]
    fn single_locus_equilibrium() {
        let m = PayoffMatrix::canonical();
        let eq = equilibrium_single(&m, 5.0 / 12.0).unwrap();
        assert!(close(eq.f_star.unwrap(), 3.0 / 7.0));
        assert!(eq.stable);
        assert_eq!(eq.outcome, Outcome::Mixed);

        let eq = equilibrium_single(&m, 0.6).unwrap();
        assert_eq!(eq.f_star, None);
        assert_eq!(eq.outcome, Outcome::CooperationFixes);
        let eq = equilibrium_single(&m, 0.2).unwrap();
        assert_eq!(eq.outcome, Outcome::DefectionFixes);

        let positive = pm(6.0, 5.0, 2.0, 0.0);
        let eq = equilibrium_single(&positive, 0.35).unwrap();
        let f = eq.f_star.unwrap();
        assert!(close(f, 5.0 / 13.0));
        assert!(!eq.stable);
        // Fitness advantage of cooperators grows through the equilibrium.
        let diff = |f| {
            let (c, d) = fitness_single(&positive, &KinContext { r: 0.35, f_c: f });
            c - d
        };
        assert!(diff(f + 1e-3) > 0.0 && diff(f - 1e-3) < 0.0);

        assert_eq!(equilibrium_single(&pm(6.0, 4.0, 2.0, 0.0), 0.3), Err(Error::AdditiveMatrix));
        assert_eq!(equilibrium_single(&m, 1.0), Err(Error::FullRelatedness));
    }

    #[test]
    fn roles_fitness() {
        let m = PayoffMatrix::canonical();
        assert_eq!(inclusive_fitness_roles(&m, 0.0, 0.0), (0.0, 1.0));
        let (c, d) = inclusive_fitness_roles(&m, 0.25, 0.0);
        assert!(close(c, 1.25) && close(d, 1.25));
        let (c, d) = inclusive_fitness_roles(&m, 2.0 / 3.0, 1.0);
        assert!(close(c, d));
    }

    #[test]
    fn roles_thresholds() {
        let m = PayoffMatrix::canonical();
        assert!(close(threshold_roles(&m, 0.0).unwrap().value, 0.25));
        assert!(close(threshold_roles(&m, 1.0).unwrap().value, 2.0 / 3.0));
        let b = threshold_bounds_roles(&m).unwrap();
        assert!(close(b.lo, 0.25) && close(b.hi, 2.0 / 3.0));
        let additive = pm(6.0, 4.0, 2.0, 0.0);
        for f in [0.0, 0.4, 1.0] {
            assert!(close(threshold_roles(&additive, f).unwrap().value, 0.5));
        }
    }

    #[test]
    fn roles_equilibrium() {
        let m = PayoffMatrix::canonical();
        let eq = equilibrium_roles(&m, 5.0 / 12.0).unwrap();
        assert!(close(eq.f_star.unwrap(), 8.0 / 17.0));
        assert!(!eq.stable);
        let eq = equilibrium_roles(&pm(6.0, 5.0, 2.0, 0.0), 0.3).unwrap();
        assert!(close(eq.f_star.unwrap(), 8.0 / 13.0));
        let eq = equilibrium_roles(&m, 0.8).unwrap();
        assert_eq!(eq.f_star, None);
        assert_eq!(eq.outcome, Outcome::CooperationFixes);
        assert_eq!(equilibrium_roles(&pm(6.0, 4.0, 2.0, 0.0), 0.3), Err(Error::AdditiveMatrix));
    }

    #[test]
    fn sign_flipped_roles_numerator_leaves_unit_interval() {
        // Numerator P - S - r(P - T) at r = 1/2 on the canonical matrix.
        let (r, m) = (0.5, PayoffMatrix::canonical());
        let flipped = (m.p() - m.s() - r * (m.p() - m.t())) / ((1.0 + r) * synergy(&m));
        assert!(close(flipped, -2.0));
        let f = equilibrium_roles(&m, r).unwrap().f_star.unwrap();
        assert!((0.0..=1.0).contains(&f));
        let (i_c, i_d) = inclusive_fitness_roles(&m, r, f);
        assert!((i_c - i_d).abs() < 1e-10);
    }

    #[test]
    fn cost_benefit_identity_examples() {
        assert_eq!(cost_benefit_fitness(4.0, 1.0, -1.0, 0.0, 0.0), (-1.0, 0.0));
        let (q, r) = (3.0 / 7.0, 5.0 / 12.0);
        let (a1, a2) = cost_benefit_fitness(4.0, 1.0, -1.0, q, r);
        let (i_c, i_d) = inclusive_fitness_roles(&PayoffMatrix::canonical(), r, q);
        assert!(close(a1 - a2, i_c - i_d));
        for q in [0.0, 0.3, 0.9] {
            let (a1, a2) = cost_benefit_fitness(4.0, 2.0, 0.0, q, 0.5);
            assert!(close(a1, a2));
        }
    }

    #[test]
    fn hamilton() {
        assert!(hamiltons_rule(4.0, 2.0, 0.6).unwrap());
        assert!(!hamiltons_rule(4.0, 2.0, 0.5).unwrap());
        assert!(hamiltons_rule(4.0, 1.0, 1.0 / 3.0).unwrap());
        assert!(hamiltons_rule(0.0, 1.0, 0.5).is_err());
        assert!(hamiltons_rule(-1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn curves() {
        let curve = threshold_curve_single(&PayoffMatrix::canonical(), 11).unwrap();
        assert_eq!(curve.points.len(), 11);
        assert_eq!(curve.points[0].0, 0.0);
        assert_eq!(curve.points[10].0, 1.0);
        assert!(curve.points.iter().all(|&(_, r)| curve.lo - EPS <= r && r <= curve.hi + EPS));
        assert!(threshold_curve_roles(&PayoffMatrix::canonical(), 1).is_err());
    }
}
