//! Deterministic two-dimensional strategies and exact iterated play.
//!
//! A [`Genome`] carries one allele per interaction context: the opening move
//! and one reply for each joint outcome of the previous round. Because the
//! next joint action depends only on the last one, a match between two
//! genomes is a walk on four states and settles into a cycle within five
//! rounds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, PayoffMatrix};

use Action::{Cooperate as C, Defect as D};

/// Alleles at the five strategy loci.
///
/// | locus      | cooperation allele | defection allele |
/// |------------|--------------------|------------------|
/// | `initial`  | friendly           | suspicious       |
/// | `on_cc`    | constructive       | destructive      |
/// | `on_cd`    | forgiving          | vengeful         |
/// | `on_dc`    | merciful           | exploitative     |
/// | `on_dd`    | dovish             | hawkish          |
///
/// `on_xy` is the reply after the player chose `x` and the opponent `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Genome {
    pub initial: Action,
    pub on_cc: Action,
    pub on_cd: Action,
    pub on_dc: Action,
    pub on_dd: Action,
}

impl Genome {
    pub const ALL_C: Genome = Genome { initial: C, on_cc: C, on_cd: C, on_dc: C, on_dd: C };
    pub const ALL_D: Genome = Genome { initial: D, on_cc: D, on_cd: D, on_dc: D, on_dd: D };
    pub const TIT_FOR_TAT: Genome = Genome { initial: C, on_cc: C, on_cd: D, on_dc: C, on_dd: D };
    pub const PAVLOV: Genome = Genome { initial: C, on_cc: C, on_cd: D, on_dc: D, on_dd: C };

    /// Loci in (initial, cc, cd, dc, dd) order.
    pub fn loci(&self) -> [Action; 5] {
        [self.initial, self.on_cc, self.on_cd, self.on_dc, self.on_dd]
    }

    pub fn from_loci(loci: [Action; 5]) -> Genome {
        let [initial, on_cc, on_cd, on_dc, on_dd] = loci;
        Genome { initial, on_cc, on_cd, on_dc, on_dd }
    }

    /// All 32 genomes, in binary order with Cooperate as 0.
    pub fn all() -> impl Iterator<Item = Genome> {
        (0u8..32).map(|bits| {
            let allele = |i: u8| if bits >> (4 - i) & 1 == 0 { C } else { D };
            Genome::from_loci([allele(0), allele(1), allele(2), allele(3), allele(4)])
        })
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for allele in self.loci() {
            write!(f, "{}", allele.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Genome {
    type Err = Error;

    /// Parses the 5-character form, e.g. `CCDCD` for Tit-for-Tat.
    fn from_str(text: &str) -> Result<Genome> {
        let alleles: Vec<Action> = text
            .chars()
            .map(Action::from_char)
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidGenome(text.to_owned()))?;
        let loci: [Action; 5] =
            alleles.try_into().map_err(|_| Error::InvalidGenome(text.to_owned()))?;
        Ok(Genome::from_loci(loci))
    }
}

impl Serialize for Genome {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Genome {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Looks up one of the named strategies: `AllC`, `AllD`, `TFT`, `Pavlov`.
pub fn named_strategy(name: &str) -> Result<Genome> {
    match name.to_ascii_lowercase().as_str() {
        "allc" => Ok(Genome::ALL_C),
        "alld" => Ok(Genome::ALL_D),
        "tft" | "titfortat" | "tit-for-tat" => Ok(Genome::TIT_FOR_TAT),
        "pavlov" => Ok(Genome::PAVLOV),
        _ => Err(Error::UnknownStrategy(name.to_owned())),
    }
}

/// Accepts either a strategy name or a 5-character genome string.
pub fn parse_strategy(text: &str) -> Result<Genome> {
    named_strategy(text).or_else(|_| text.parse())
}

/// The allele expressed after the previous round `(own_last, opp_last)`.
pub fn next_action(g: &Genome, own_last: Action, opp_last: Action) -> Action {
    match (own_last, opp_last) {
        (C, C) => g.on_cc,
        (C, D) => g.on_cd,
        (D, C) => g.on_dc,
        (D, D) => g.on_dd,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointAction(pub Action, pub Action);

impl fmt::Display for JointAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// Result of an iterated match under limit-of-means payoffs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchOutcome {
    /// Joint actions from the first round through the first full cycle.
    pub transcript: Vec<JointAction>,
    pub cycle_start: usize,
    pub cycle_length: usize,
    /// Long-run average payoff per round, player one first.
    pub mean_payoffs: (f64, f64),
}

impl MatchOutcome {
    pub fn cycle(&self) -> &[JointAction] {
        &self.transcript[self.cycle_start..self.cycle_start + self.cycle_length]
    }

    /// Joint action in round `round` (0-based) of the infinite match.
    pub fn action_at(&self, round: usize) -> JointAction {
        if round < self.cycle_start {
            self.transcript[round]
        } else {
            self.transcript[self.cycle_start + (round - self.cycle_start) % self.cycle_length]
        }
    }
}

pub fn play_match(g1: &Genome, g2: &Genome, m: &PayoffMatrix) -> MatchOutcome {
    let mut transcript = vec![JointAction(g1.initial, g2.initial)];
    loop {
        let JointAction(a1, a2) = *transcript.last().expect("non-empty transcript");
        let next = JointAction(next_action(g1, a1, a2), next_action(g2, a2, a1));
        if let Some(start) = transcript.iter().position(|&state| state == next) {
            let cycle_length = transcript.len() - start;
            let (sum1, sum2) = transcript[start..].iter().fold((0.0, 0.0), |(x, y), s| {
                (x + m.payoff(s.0, s.1), y + m.payoff(s.1, s.0))
            });
            let n = cycle_length as f64;
            return MatchOutcome {
                transcript,
                cycle_start: start,
                cycle_length,
                mean_payoffs: (sum1 / n, sum2 / n),
            };
        }
        transcript.push(next);
    }
}
