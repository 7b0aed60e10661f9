//! Test-only oracles, independent of the closed forms they check.

#![allow(dead_code)]

use coopgame::{GameClass, PayoffMatrix};

/// Root of a continuous function with a sign change on `[lo, hi]`.
pub fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Option<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo * f_hi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Brute-force inclusive fitness: enumerates the partner's two moves and
/// weights focal payoff plus r times partner payoff by their probability.
pub fn enumerated_roles(m: &PayoffMatrix, r: f64, f_other: f64) -> (f64, f64) {
    use coopgame::Action::{Cooperate as C, Defect as D};
    let score = |focal| {
        [(C, f_other), (D, 1.0 - f_other)]
            .iter()
            .map(|&(partner, weight)| weight * (m.payoff(focal, partner) + r * m.payoff(partner, focal)))
            .sum::<f64>()
    };
    (score(C), score(D))
}

/// Brute-force single-locus fitness by enumerating partner identity.
pub fn enumerated_single(m: &PayoffMatrix, r: f64, f_c: f64) -> (f64, f64) {
    use coopgame::Action::{Cooperate as C, Defect as D};
    let score = |focal| {
        let same = r * m.payoff(focal, focal);
        let random = (1.0 - r) * (f_c * m.payoff(focal, C) + (1.0 - f_c) * m.payoff(focal, D));
        same + random
    };
    (score(C), score(D))
}

/// Assigns four strictly decreasing values to (T, R, P, S) according to
/// the ordinal pattern of `class`.
pub fn matrix_with_order(class: GameClass, desc: [f64; 4]) -> PayoffMatrix {
    let [a, b, c, d] = desc;
    let (t, r, p, s) = match class {
        GameClass::PrisonersDilemma => (a, b, c, d),
        GameClass::Chicken => (a, b, d, c),
        GameClass::BattleOfSexes => (a, c, d, b),
        GameClass::Apology => (b, c, d, a),
        other => panic!("no ordering for {other:?}"),
    };
    PayoffMatrix::new(t, r, p, s).unwrap()
}

/// Sorts descending and reports whether all four are distinct.
pub fn sorted_desc(mut values: [f64; 4]) -> Option<[f64; 4]> {
    values.sort_by(|x, y| y.total_cmp(x));
    values.windows(2).all(|w| w[0] - w[1] > 1e-6).then_some(values)
}
