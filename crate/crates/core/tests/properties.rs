mod common;

use coopgame::analytics::{
    cost_benefit_fitness, equilibrium_roles, equilibrium_single, fitness_single, inclusive_fitness_roles,
    threshold_bounds_roles, threshold_bounds_single, threshold_roles, threshold_single,
};
use coopgame::dynamics::{
    analytic_jacobian_two_locus, first_integral, integrate, numerical_jacobian, velocity_single,
    velocity_two_locus, TwoLocus,
};
use coopgame::game::{
    classify_ordinal, decompose, hawk_dove_matrix, strong_altruism_map, synergy, synergy_class,
    AdditivityClass,
};
use coopgame::strategy::{play_match, Genome};
use coopgame::{GameClass, HawkDoveParams, KinContext, PayoffMatrix, TwoLocusState};
use proptest::prelude::*;

use common::{bisect, enumerated_roles, enumerated_single, matrix_with_order, sorted_desc};

fn any_matrix() -> impl Strategy<Value = PayoffMatrix> {
    prop::array::uniform4(-10.0..10.0f64).prop_map(|[t, r, p, s]| PayoffMatrix::new(t, r, p, s).unwrap())
}

fn ordered(class: GameClass) -> impl Strategy<Value = PayoffMatrix> {
    prop::array::uniform4(-10.0..10.0f64)
        .prop_filter_map("distinct payoffs", sorted_desc)
        .prop_map(move |desc| matrix_with_order(class, desc))
}

fn pd() -> impl Strategy<Value = PayoffMatrix> {
    ordered(GameClass::PrisonersDilemma)
}

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn decomposition_rebuilds_up_to_baseline(m in any_matrix()) {
        let dec = decompose(&m);
        let rebuilt = dec.rebuild();
        let p = m.p();
        for (a, b) in m.to_array().iter().zip(rebuilt.to_array()) {
            prop_assert!(rel_close(*a - p, b, 1e-12));
        }
        prop_assert!(rel_close(synergy(&rebuilt), dec.d, 1e-12));
    }

    #[test]
    fn ordinal_class_survives_positive_affine_maps(
        m in any_matrix(),
        scale in 0.01..100.0f64,
        offset in -50.0..50.0f64,
    ) {
        let moved = m.affine(scale, offset).unwrap();
        let before = classify_ordinal(&m);
        // Rounding can merge nearly tied payoffs; skip those.
        let mut sorted = m.to_array();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 1e-9));
        prop_assert_eq!(before, classify_ordinal(&moved));
        prop_assert_eq!(
            synergy_class(&m, 1e-9).unwrap(),
            synergy_class(&moved, 1e-9).unwrap()
        );
    }

    #[test]
    fn strong_altruism_only_for_dilemmas(
        desc in prop::array::uniform4(-10.0..10.0f64).prop_filter_map("distinct", sorted_desc),
    ) {
        prop_assert!(strong_altruism_map(&matrix_with_order(GameClass::PrisonersDilemma, desc)).is_some());
        for class in [GameClass::Chicken, GameClass::Apology, GameClass::BattleOfSexes] {
            prop_assert!(strong_altruism_map(&matrix_with_order(class, desc)).is_none());
        }
    }

    #[test]
    fn altruism_mapping_reads_back_the_matrix(m in pd()) {
        let map = strong_altruism_map(&m).unwrap();
        let dec = map.decomposition;
        prop_assert!(dec.b > 0.0 && dec.c > 0.0);
        prop_assert!(rel_close(dec.d, synergy(&m), 1e-12));
    }

    #[test]
    fn hawk_dove_synergy_is_half_cost(v in 0.01..100.0f64, c in 0.0..100.0f64) {
        let m = hawk_dove_matrix(&HawkDoveParams::new(v, c).unwrap()).unwrap();
        prop_assert!((synergy(&m) + c / 2.0).abs() <= 4.0 * f64::EPSILON * v.max(c));
        let expected = if c > 0.0 { AdditivityClass::NegativeNonAdditive } else { AdditivityClass::Additive };
        prop_assert_eq!(synergy_class(&m, 0.0).unwrap(), expected);
    }

    #[test]
    fn single_fitness_matches_enumeration(m in any_matrix(), r in unit(), f in unit()) {
        let (w_c, w_d) = fitness_single(&m, &KinContext::new(r, f).unwrap());
        let (e_c, e_d) = enumerated_single(&m, r, f);
        prop_assert!(rel_close(w_c, e_c, 1e-12) && rel_close(w_d, e_d, 1e-12));
    }

    #[test]
    fn roles_fitness_matches_enumeration(m in any_matrix(), r in unit(), f in unit()) {
        let (i_c, i_d) = inclusive_fitness_roles(&m, r, f);
        let (e_c, e_d) = enumerated_roles(&m, r, f);
        prop_assert!(rel_close(i_c, e_c, 1e-12) && rel_close(i_d, e_d, 1e-12));
    }

    #[test]
    fn single_threshold_decides_the_sign(m in any_matrix(), r in unit(), f in unit()) {
        let (w_c, w_d) = fitness_single(&m, &KinContext::new(r, f).unwrap());
        let denominator = f * synergy(&m) + m.s() - m.r();
        prop_assume!(denominator.abs() > 1e-6);
        let threshold = threshold_single(&m, f).unwrap().value;
        prop_assume!((r - threshold).abs() > 1e-9);
        // w_c - w_d = -(f d + S - R)(r - r')
        let predicted = -denominator * (r - threshold);
        prop_assert!(rel_close(w_c - w_d, predicted, 1e-9));
        prop_assert_eq!(w_c > w_d, predicted > 0.0);
    }

    #[test]
    fn roles_threshold_decides_the_sign(m in any_matrix(), r in unit(), f in unit()) {
        let (i_c, i_d) = inclusive_fitness_roles(&m, r, f);
        let denominator = f * synergy(&m) + m.t() - m.p();
        prop_assume!(denominator.abs() > 1e-6);
        let threshold = threshold_roles(&m, f).unwrap().value;
        prop_assume!((r - threshold).abs() > 1e-9);
        let predicted = denominator * (r - threshold);
        prop_assert!(rel_close(i_c - i_d, predicted, 1e-9));
        prop_assert_eq!(i_c > i_d, predicted > 0.0);
    }

    #[test]
    fn pd_thresholds_stay_within_their_bounds(m in pd(), f in unit()) {
        let single = threshold_bounds_single(&m).unwrap();
        let roles = threshold_bounds_roles(&m).unwrap();
        let slack = 1e-12;
        let a = threshold_single(&m, f).unwrap().value;
        let b = threshold_roles(&m, f).unwrap().value;
        prop_assert!(single.lo - slack <= a && a <= single.hi + slack);
        prop_assert!(roles.lo - slack <= b && b <= roles.hi + slack);
    }

    #[test]
    fn pd_thresholds_are_monotone(m in pd(), f in 0.0..0.99f64, step in 0.001..0.01f64) {
        let g = f + step;
        let d = synergy(&m);
        let (s0, s1) = (threshold_single(&m, f).unwrap().value, threshold_single(&m, g).unwrap().value);
        let (r0, r1) = (threshold_roles(&m, f).unwrap().value, threshold_roles(&m, g).unwrap().value);
        let slack = 1e-12;
        // Both curves rise with f for d < 0 and fall for d > 0.
        if d < 0.0 {
            prop_assert!(s1 >= s0 - slack && r1 >= r0 - slack);
        } else if d > 0.0 {
            prop_assert!(s1 <= s0 + slack && r1 <= r0 + slack);
        }
    }

    #[test]
    fn additive_thresholds_are_flat(b in 0.1..10.0f64, c in 0.1..10.0f64, p in -5.0..5.0f64, f in unit()) {
        let m = PayoffMatrix::new(p + b, p + b - c, p, p - c).unwrap();
        prop_assume!(synergy(&m).abs() < 1e-12);
        let single = threshold_single(&m, f).unwrap().value;
        let roles = threshold_roles(&m, f).unwrap().value;
        prop_assert!(rel_close(single, c / b, 1e-9));
        prop_assert!(rel_close(roles, c / b, 1e-9));
    }

    #[test]
    fn cost_benefit_identity(m in any_matrix(), q in unit(), r in unit()) {
        let dec = decompose(&m);
        let (a1, a2) = cost_benefit_fitness(dec.b, dec.c, dec.d, q, r);
        let (i_c, i_d) = inclusive_fitness_roles(&m, r, q);
        prop_assert!(((a1 - a2) - (i_c - i_d)).abs() < 1e-10);
    }

    #[test]
    fn single_equilibrium_balances_fitness(m in pd(), u in 0.001..0.999f64) {
        let bounds = threshold_bounds_single(&m).unwrap();
        let hi = bounds.hi.min(0.999);
        prop_assume!(synergy(&m).abs() > 1e-3 && hi > bounds.lo);
        let r = bounds.lo + u * (hi - bounds.lo);
        prop_assume!(bounds.strictly_contains(r));
        let eq = equilibrium_single(&m, r).unwrap();
        let f = eq.f_star.unwrap();
        let gap = |x: f64| {
            let (w_c, w_d) = fitness_single(&m, &KinContext { r, f_c: x });
            w_c - w_d
        };
        prop_assert!(gap(f).abs() < 1e-9 * m.max_abs().max(1.0));
        let root = bisect(0.0, 1.0, gap).unwrap();
        prop_assert!((f - root).abs() < 1e-8);
        prop_assert_eq!(eq.stable, synergy(&m) < 0.0);
        // The sign of the slope of the flow at f* agrees with `stable`.
        let h = 1e-6;
        let slope = velocity_single(&m, r, f + h) - velocity_single(&m, r, f - h);
        prop_assert_eq!(slope < 0.0, eq.stable);
    }

    #[test]
    fn roles_equilibrium_balances_fitness(m in pd(), u in 0.001..0.999f64) {
        let bounds = threshold_bounds_roles(&m).unwrap();
        let hi = bounds.hi.min(0.999);
        prop_assume!(synergy(&m).abs() > 1e-3 && hi > bounds.lo);
        let r = bounds.lo + u * (hi - bounds.lo);
        prop_assume!(bounds.strictly_contains(r));
        let f = equilibrium_roles(&m, r).unwrap().f_star.unwrap();
        let gap = |x: f64| {
            let (i_c, i_d) = inclusive_fitness_roles(&m, r, x);
            i_c - i_d
        };
        prop_assert!(gap(f).abs() < 1e-9 * m.max_abs().max(1.0));
        prop_assert!((f - bisect(0.0, 1.0, gap).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn jacobian_matches_finite_differences(m in any_matrix(), r in unit(), f1 in unit(), f2 in unit()) {
        let s = TwoLocusState::new(f1, f2).unwrap();
        let exact = analytic_jacobian_two_locus(&m, r, s);
        let approx = numerical_jacobian(&TwoLocus::new(m, r).unwrap(), &s.to_array());
        let scale = exact.iter().flatten().fold(1.0f64, |acc, x| acc.max(x.abs()));
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((exact[i][j] - approx[i][j]).abs() <= 1e-5 * scale);
            }
        }
    }

    #[test]
    fn swapping_loci_swaps_the_flow(m in any_matrix(), r in unit(), f1 in unit(), f2 in unit()) {
        let (a1, a2) = velocity_two_locus(&m, r, TwoLocusState::new(f1, f2).unwrap());
        let (b1, b2) = velocity_two_locus(&m, r, TwoLocusState::new(f2, f1).unwrap());
        prop_assert_eq!((a1, a2), (b2, b1));
    }

    #[test]
    fn flow_fixes_the_corners_and_keeps_the_square(m in any_matrix(), r in unit(), f in unit()) {
        for corner in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            let v = velocity_two_locus(&m, r, TwoLocusState::new(corner.0, corner.1).unwrap());
            prop_assert_eq!(v, (0.0, 0.0));
        }
        // Edges are invariant: no velocity normal to them.
        for (edge, normal) in [((0.0, f), 0), ((1.0, f), 0), ((f, 0.0), 1), ((f, 1.0), 1)] {
            let v = velocity_two_locus(&m, r, TwoLocusState::new(edge.0, edge.1).unwrap());
            prop_assert_eq!(if normal == 0 { v.0 } else { v.1 }, 0.0);
        }
    }

    #[test]
    fn rk4_conserves_the_first_integral(
        m in pd(),
        r in 0.0..0.9f64,
        f1 in 0.1..0.9f64,
        f2 in 0.1..0.9f64,
    ) {
        let system = TwoLocus::new(m, r).unwrap();
        let traj = integrate(&system, [f1, f2], 0.01, 5.0).unwrap();
        let h0 = first_integral(&m, r, TwoLocusState::new(f1, f2).unwrap());
        let [e1, e2] = traj.last();
        prop_assume!(e1 > 1e-6 && e1 < 1.0 - 1e-6 && e2 > 1e-6 && e2 < 1.0 - 1e-6);
        let h1 = first_integral(&m, r, TwoLocusState::new(e1, e2).unwrap());
        prop_assert!((h1 - h0).abs() < 1e-6 * h0.abs().max(1.0), "drift {}", h1 - h0);
    }

    #[test]
    fn match_payoffs_are_symmetric(a in 0u8..32, b in 0u8..32, m in any_matrix()) {
        let genomes: Vec<Genome> = Genome::all().collect();
        let (g1, g2) = (genomes[a as usize], genomes[b as usize]);
        let one = play_match(&g1, &g2, &m);
        let two = play_match(&g2, &g1, &m);
        prop_assert!(one.cycle_start + one.cycle_length <= 5);
        prop_assert_eq!(one.mean_payoffs, (two.mean_payoffs.1, two.mean_payoffs.0));
        prop_assert_eq!(play_match(&g1, &g2, &m), one);
    }
}
