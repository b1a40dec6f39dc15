use csinv::rational::{mod_z, Rational};
use csinv::seifert::{
    burns_epstein, canonical_lift_data, central_shift, cs_closed, cs_closed_unreduced,
    cs_pipeline, global_swap, lift_shift, make_random_rep, rep_from_draw, sigma_2_3_11,
    sigma_2_3_11_fixture, solve_b, validate_rep, CentralAngles, GeneratorAngles, RepDraw,
    SeifertPresentation,
};
use proptest::prelude::*;

fn presentations() -> impl Strategy<Value = SeifertPresentation> {
    prop_oneof![
        Just(vec![2, 3, 5]),
        Just(vec![2, 3, 7]),
        Just(vec![2, 3, 11]),
        Just(vec![2, 5, 7]),
        Just(vec![3, 4, 5]),
        Just(vec![2, 3, 5, 7]),
    ]
    .prop_map(|a| SeifertPresentation::from_invariants(a).unwrap())
}

fn draws() -> impl Strategy<Value = (SeifertPresentation, RepDraw)> {
    presentations().prop_flat_map(|pres| {
        let n = pres.n();
        (
            Just(pres),
            (1i64..=12, -40i64..40, -3i64..=3, -3i64..=3, prop::collection::vec(-6i64..=6, n)),
        )
            .prop_map(|(pres, (d, num, po, qo, s))| {
                let draw = RepDraw {
                    r0: Rational::new(num, d),
                    p_offset: po,
                    q_offset: qo,
                    s,
                };
                (pres, draw)
            })
    })
}

proptest! {
    #[test]
    fn solve_b_satisfies_the_defining_identity(pres in presentations()) {
        let b = solve_b(&pres.a).unwrap();
        let total: i64 = pres.a.iter().product();
        let sum: i64 = pres.a.iter().zip(&b).map(|(a, b)| b * (total / a)).sum();
        prop_assert_eq!(sum, 1);
        for (a, b) in pres.a.iter().zip(&b).take(pres.n() - 1) {
            prop_assert!(2 * b >= -a && 2 * b < *a);
        }
    }

    #[test]
    fn generated_data_validates((pres, draw) in draws()) {
        let d = rep_from_draw(&pres, &draw);
        prop_assert!(validate_rep(&pres, &d).unwrap().passed());
    }

    #[test]
    fn pipeline_equals_closed_formula((pres, draw) in draws()) {
        let d = rep_from_draw(&pres, &draw);
        prop_assert_eq!(cs_pipeline(&pres, &d).unwrap(), cs_closed(&pres, &d).unwrap());
    }

    #[test]
    fn lift_shift_changes_cs_by_an_integer((pres, draw) in draws(), i in 0usize..3, k in -4i64..=4) {
        let d = rep_from_draw(&pres, &draw);
        let moved = lift_shift(&pres, &d, i, k);
        prop_assert!(validate_rep(&pres, &moved).unwrap().passed());
        let diff = cs_closed_unreduced(&pres, &moved).unwrap() - cs_closed_unreduced(&pres, &d).unwrap();
        prop_assert!(diff.is_integer());
    }

    #[test]
    fn swap_and_central_shift_leave_cs_unchanged((pres, draw) in draws(), k in -4i64..=4) {
        let d = rep_from_draw(&pres, &draw);
        let cs = cs_closed_unreduced(&pres, &d).unwrap();
        let swapped = global_swap(&d);
        prop_assert!(validate_rep(&pres, &swapped).unwrap().passed());
        prop_assert_eq!(cs_closed_unreduced(&pres, &swapped).unwrap(), cs.clone());
        let shifted = central_shift(&pres, &d, k);
        prop_assert!(validate_rep(&pres, &shifted).unwrap().passed());
        prop_assert_eq!(mod_z(&cs_closed_unreduced(&pres, &shifted).unwrap()), mod_z(&cs));
    }

    #[test]
    fn derived_consequences_hold((pres, draw) in draws()) {
        let d = rep_from_draw(&pres, &draw);
        let a = pres.order();
        let s_over_a: Rational = draw.s.iter().zip(&pres.a).map(|(&s, &ai)| Rational::new(s, ai)).sum();
        prop_assert_eq!(&s_over_a, &(d.sum_p() + &d.p0 / &a));
        prop_assert_eq!(&s_over_a, &(-d.sum_q() - &d.q0 / &a));
        prop_assert_eq!(d.r0.clone(), -(&a * d.sum_r()));
    }

    #[test]
    fn diagonal_representation_has_zero_invariant(shifts in prop::collection::vec(-3i64..=3, 3), k in -3i64..=3) {
        let pres = sigma_2_3_11();
        let z = Rational::zero;
        let gens: Vec<_> = shifts
            .iter()
            .map(|&m| GeneratorAngles::new([Rational::from_integer(m), z(), z()], z(), z()))
            .collect();
        let central = CentralAngles { theta1: z(), theta2: z() };
        let d = central_shift(&pres, &canonical_lift_data(&pres, &gens, &central).unwrap(), k);
        prop_assert_eq!(burns_epstein(&cs_closed(&pres, &d).unwrap()), mod_z(&z()));
    }
}

#[test]
fn moves_on_fixtures() {
    let pres = sigma_2_3_11();
    for case in sigma_2_3_11_fixture() {
        let d = case.lift(&pres).unwrap();
        for moved in [
            lift_shift(&pres, &d, 2, 3),
            lift_shift(&pres, &d, 0, -2),
            global_swap(&d),
            central_shift(&pres, &d, -1),
        ] {
            assert_eq!(cs_closed(&pres, &moved).unwrap(), case.expected);
            assert_eq!(cs_pipeline(&pres, &moved).unwrap(), case.expected);
        }
    }
}

#[test]
fn hundred_random_reps_per_presentation() {
    for a in [vec![2, 3, 5], vec![2, 3, 7], vec![2, 3, 11], vec![2, 5, 7]] {
        let pres = SeifertPresentation::from_invariants(a).unwrap();
        for seed in 0..100 {
            let d = make_random_rep(&pres, seed);
            assert!(validate_rep(&pres, &d).unwrap().passed());
            assert_eq!(cs_pipeline(&pres, &d).unwrap(), cs_closed(&pres, &d).unwrap());
        }
    }
}
