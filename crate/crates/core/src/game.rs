//! Symmetric 2x2 payoff matrices.
//!
//! A [`PayoffMatrix`] stores the row player's payoffs in the Prisoner's
//! Dilemma labelling (T, R, P, S) with action A of the generic game mapped
//! to Cooperate. From it we derive the cost/benefit/synergy decomposition of
//! the synergistic donation game, the ordinal class among the non-trivial
//! symmetric games, and whether the matrix can stand in for a donation game
//! with strong altruism.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance on |d| for additivity, applied after scaling the matrix
/// to max |payoff| = 1.
pub const DEFAULT_ADDITIVITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Cooperate,
    Defect,
}

impl Action {
    pub fn flip(self) -> Action {
        match self {
            Action::Cooperate => Action::Defect,
            Action::Defect => Action::Cooperate,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Action::Cooperate => 'C',
            Action::Defect => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Action> {
        match c {
            'C' | 'c' => Some(Action::Cooperate),
            'D' | 'd' => Some(Action::Defect),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Row-player payoffs of a symmetric 2x2 game.
///
/// `t`: defect against a cooperator, `r`: mutual cooperation, `p`: mutual
/// defection, `s`: cooperate against a defector. All four are finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPayoffs", into = "RawPayoffs")]
pub struct PayoffMatrix {
    t: f64,
    r: f64,
    p: f64,
    s: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPayoffs {
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "S")]
    s: f64,
}

impl TryFrom<RawPayoffs> for PayoffMatrix {
    type Error = Error;

    fn try_from(raw: RawPayoffs) -> Result<Self> {
        PayoffMatrix::new(raw.t, raw.r, raw.p, raw.s)
    }
}

impl From<PayoffMatrix> for RawPayoffs {
    fn from(m: PayoffMatrix) -> Self {
        RawPayoffs { t: m.t, r: m.r, p: m.p, s: m.s }
    }
}

impl PayoffMatrix {
    pub fn new(t: f64, r: f64, p: f64, s: f64) -> Result<Self> {
        for (name, value) in [("T", t), ("R", r), ("P", p), ("S", s)] {
            if !value.is_finite() {
                return Err(Error::NonFinitePayoff { name, value });
            }
        }
        Ok(PayoffMatrix { t, r, p, s })
    }

    /// The Axelrod matrix T = 5, R = 3, P = 1, S = 0.
    pub fn canonical() -> Self {
        PayoffMatrix { t: 5.0, r: 3.0, p: 1.0, s: 0.0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Payoffs in (T, R, P, S) order.
    pub fn to_array(&self) -> [f64; 4] {
        [self.t, self.r, self.p, self.s]
    }

    /// Payoff to a player choosing `own` against an opponent choosing `opp`.
    pub fn payoff(&self, own: Action, opp: Action) -> f64 {
        match (own, opp) {
            (Action::Cooperate, Action::Cooperate) => self.r,
            (Action::Cooperate, Action::Defect) => self.s,
            (Action::Defect, Action::Cooperate) => self.t,
            (Action::Defect, Action::Defect) => self.p,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Applies `x -> scale * x + offset` to every payoff.
    pub fn affine(&self, scale: f64, offset: f64) -> Result<Self> {
        PayoffMatrix::new(
            scale * self.t + offset,
            scale * self.r + offset,
            scale * self.p + offset,
            scale * self.s + offset,
        )
    }
}

impl fmt::Display for PayoffMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.t, self.r, self.p, self.s)
    }
}

impl FromStr for PayoffMatrix {
    type Err = Error;

    /// Parses a comma-separated `T,R,P,S` quadruple.
    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidArgument(format!(
                "payoffs must be four comma-separated numbers T,R,P,S, got `{text}`"
            )));
        }
        let mut values = [0.0; 4];
        for (slot, part) in values.iter_mut().zip(&parts) {
            *slot = part.parse().map_err(|_| {
                Error::InvalidArgument(format!("payoff `{part}` is not a number"))
            })?;
        }
        PayoffMatrix::new(values[0], values[1], values[2], values[3])
    }
}

/// Cost, benefit and synergy of the synergistic donation game.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DonationDecomposition {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl DonationDecomposition {
    /// The donation-game matrix with the mutual-defection baseline at 0.
    pub fn rebuild(&self) -> PayoffMatrix {
        PayoffMatrix {
            t: self.b,
            r: self.b - self.c + self.d,
            p: 0.0,
            s: -self.c,
        }
    }
}

/// b = T - P, c = P - S, d = R - S - T + P.
pub fn decompose(m: &PayoffMatrix) -> DonationDecomposition {
    DonationDecomposition {
        b: m.t - m.p,
        c: m.p - m.s,
        d: synergy(m),
    }
}

/// Deviation from additivity, R - S - T + P.
pub fn synergy(m: &PayoffMatrix) -> f64 {
    m.r - m.s - m.t + m.p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameClass {
    PrisonersDilemma,
    Chicken,
    BattleOfSexes,
    Apology,
    Degenerate,
    OtherOrTrivial,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GameClass::PrisonersDilemma => "PrisonersDilemma",
            GameClass::Chicken => "Chicken",
            GameClass::BattleOfSexes => "BattleOfSexes",
            GameClass::Apology => "Apology",
            GameClass::Degenerate => "Degenerate",
            GameClass::OtherOrTrivial => "OtherOrTrivial",
        };
        f.write_str(name)
    }
}

/// Ordinal class of the matrix.
///
/// PD: T > R > P > S; Chicken: T > R > S > P; Battle of the Sexes:
/// T > S > R > P; Apology: S > T > R > P. Any tie is degenerate.
pub fn classify_ordinal(m: &PayoffMatrix) -> GameClass {
    let PayoffMatrix { t, r, p, s } = *m;
    let values = [t, r, p, s];
    for i in 0..4 {
        for j in i + 1..4 {
            if values[i] == values[j] {
                return GameClass::Degenerate;
            }
        }
    }
    if t > r && r > p && p > s {
        GameClass::PrisonersDilemma
    } else if t > r && r > s && s > p {
        GameClass::Chicken
    } else if t > s && s > r && r > p {
        GameClass::BattleOfSexes
    } else if s > t && t > r && r > p {
        GameClass::Apology
    } else {
        GameClass::OtherOrTrivial
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PdConstraint {
    /// T > R
    TemptationAboveReward,
    /// R > P
    RewardAbovePunishment,
    /// P > S
    PunishmentAboveSucker,
    /// T + S < 2R
    AlternationBelowReward,
}

impl fmt::Display for PdConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            PdConstraint::TemptationAboveReward => "T > R",
            PdConstraint::RewardAbovePunishment => "R > P",
            PdConstraint::PunishmentAboveSucker => "P > S",
            PdConstraint::AlternationBelowReward => "T + S < 2R",
        };
        f.write_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdCheck {
    pub is_pd: bool,
    pub violations: Vec<PdConstraint>,
}

/// Checks the cardinal Prisoner's Dilemma constraints T > R > P > S and
/// T + S < 2R, listing every one that fails.
pub fn check_pd(m: &PayoffMatrix) -> PdCheck {
    let mut violations = Vec::new();
    if m.t <= m.r {
        violations.push(PdConstraint::TemptationAboveReward);
    }
    if m.r <= m.p {
        violations.push(PdConstraint::RewardAbovePunishment);
    }
    if m.p <= m.s {
        violations.push(PdConstraint::PunishmentAboveSucker);
    }
    if m.t + m.s >= 2.0 * m.r {
        violations.push(PdConstraint::AlternationBelowReward);
    }
    PdCheck { is_pd: violations.is_empty(), violations }
}

/// A way of reading the matrix as a donation game with strong altruism.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AltruismMapping {
    pub altruist_action: Action,
    pub decomposition: DonationDecomposition,
}

/// Tries both action-to-altruist assignments and returns the one that reads
/// as a donation game with strong altruism, if any.
///
/// Each cell is measured against the payoff of two non-altruists: the
/// altruist facing a non-altruist must lose (c > 0), the non-altruist facing
/// an altruist must gain (b > 0), and a pair of altruists must do better
/// than a pair of non-altruists. The last condition is b > c for an
/// additive matrix and b - c + d > 0 in general.
pub fn strong_altruism_map(m: &PayoffMatrix) -> Option<AltruismMapping> {
    [Action::Cooperate, Action::Defect].into_iter().find_map(|altruist| {
        let other = altruist.flip();
        let baseline = m.payoff(other, other);
        let c = baseline - m.payoff(altruist, other);
        let b = m.payoff(other, altruist) - baseline;
        let pair = m.payoff(altruist, altruist) - baseline;
        let d = pair - b + c;
        (c > 0.0 && b > 0.0 && pair > 0.0).then_some(AltruismMapping {
            altruist_action: altruist,
            decomposition: DonationDecomposition { b, c, d },
        })
    })
}

/// Resource value `v` and contest cost `c_cost` of the Hawk-Dove game.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HawkDoveParams {
    pub v: f64,
    pub c_cost: f64,
}

impl HawkDoveParams {
    pub fn new(v: f64, c_cost: f64) -> Result<Self> {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositive { name: "V", value: v });
        }
        if !(c_cost.is_finite() && c_cost >= 0.0) {
            return Err(Error::Negative { name: "C", value: c_cost });
        }
        Ok(HawkDoveParams { v, c_cost })
    }
}

/// Hawk-Dove with averaged payoffs, Dove read as Cooperate:
/// T = V, R = V/2, P = (V - C)/2, S = 0.
pub fn hawk_dove_matrix(params: &HawkDoveParams) -> Result<PayoffMatrix> {
    let HawkDoveParams { v, c_cost } = HawkDoveParams::new(params.v, params.c_cost)?;
    PayoffMatrix::new(v, v / 2.0, (v - c_cost) / 2.0, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdditivityClass {
    #[serde(rename = "additive")]
    Additive,
    #[serde(rename = "positive")]
    PositiveNonAdditive,
    #[serde(rename = "negative")]
    NegativeNonAdditive,
}

impl fmt::Display for AdditivityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            AdditivityClass::Additive => "additive",
            AdditivityClass::PositiveNonAdditive => "positive",
            AdditivityClass::NegativeNonAdditive => "negative",
        };
        f.write_str(text)
    }
}

/// Classifies the synergy d of the matrix scaled to max |payoff| = 1.
pub fn synergy_class(m: &PayoffMatrix, tol: f64) -> Result<AdditivityClass> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Negative { name: "tolerance", value: tol });
    }
    let scale = m.max_abs();
    let d = if scale > 0.0 { synergy(m) / scale } else { 0.0 };
    Ok(if d > tol {
        AdditivityClass::PositiveNonAdditive
    } else if d < -tol {
        AdditivityClass::NegativeNonAdditive
    } else {
        AdditivityClass::Additive
    })
}
