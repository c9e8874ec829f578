use proptest::prelude::*;

use hidden_single_core::agents::simulate_participant;
use hidden_single_core::feedback::{feedback_for, open_distractor_cell, FeedbackMode};
use hidden_single_core::grid::{peers, Coord, Digit, Grid, House, HouseKind};
use hidden_single_core::model::{
    enumerate_paths, forward_response_dist, path_likelihood, path_posterior, path_prior, AggregateParams, Logits,
    StrategyClass, LOGIT_COUNT,
};
use hidden_single_core::puzzle::{
    assign_participant, derive_condition_features_seeded, generate_puzzle, verify_puzzle, ConditionCombo, DigitSet,
    LineKind, PuzzleFeatures, ResponseRole,
};
use hidden_single_core::rng::rng_from;
use hidden_single_core::schedule::{check_schedule, schedule_test};

fn features() -> impl Strategy<Value = PuzzleFeatures> {
    (any::<bool>(), 1u8..=9, 1u8..=9, Just((1..=9).collect::<Vec<u8>>()).prop_shuffle())
        .prop_map(|(row, hi, ci, ds)| {
            let kind = if row { LineKind::Row } else { LineKind::Column };
            PuzzleFeatures::new(kind, hi, ci, DigitSet::from_values([ds[0], ds[1], ds[2], ds[3]]).unwrap()).unwrap()
        })
}

fn house() -> impl Strategy<Value = House> {
    (0usize..3, 1u8..=9).prop_map(|(k, i)| House::new([HouseKind::Row, HouseKind::Column, HouseKind::Box][k], i).unwrap())
}

fn random_grid() -> impl Strategy<Value = Grid> {
    proptest::collection::vec(proptest::option::weighted(0.3, 1u8..=9), 81).prop_map(|cells| {
        let mut g = Grid::empty();
        for (k, v) in cells.into_iter().enumerate() {
            if let Some(v) = v {
                g.place(Coord::new(k as u8 / 9 + 1, k as u8 % 9 + 1).unwrap(), Digit::new(v).unwrap());
            }
        }
        g
    })
}

fn params() -> impl Strategy<Value = AggregateParams> {
    proptest::collection::vec(-3.0f64..3.0, LOGIT_COUNT).prop_map(|v| Logits(v).to_params())
}

#[test]
fn peers_are_twenty_and_symmetric() {
    for c in Coord::all() {
        let p = peers(c);
        assert_eq!(p.len(), 20);
        for q in p {
            assert!(peers(q).contains(&c));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn candidates_are_empty_cells_and_shrink(g in random_grid(), h in house(), d in 1u8..=9, extra in 0usize..81, e in 1u8..=9) {
        let d = Digit::new(d).unwrap();
        let cands = g.candidate_cells(h, d);
        prop_assert!(cands.iter().all(|&c| g.is_empty_at(c) && h.contains(c)));
        let mut more = g.clone();
        let c = Coord::new(extra as u8 / 9 + 1, extra as u8 % 9 + 1).unwrap();
        if more.is_empty_at(c) {
            more.place(c, Digit::new(e).unwrap());
        }
        let fewer = more.candidate_cells(h, d);
        prop_assert!(fewer.iter().all(|x| cands.contains(x)));
    }

    #[test]
    fn contradiction_iff_not_permutation(h in house(), values in proptest::collection::vec(1u8..=9, 9)) {
        let mut g = Grid::empty();
        for (c, v) in h.cells().into_iter().zip(&values) {
            g.place(c, Digit::new(*v).unwrap());
        }
        let mut sorted = values.clone();
        sorted.sort();
        let permutation = sorted == (1..=9).collect::<Vec<u8>>();
        match g.find_contradiction(h) {
            Ok(None) => prop_assert!(permutation),
            Ok(Some((a, b))) => {
                prop_assert!(!permutation);
                prop_assert_eq!(g.get(a), g.get(b));
            }
            // more than one repeated digit
            Err(_) => prop_assert!(!permutation),
        }
    }

    #[test]
    fn generated_puzzles_verify(f in features(), seed in any::<u64>()) {
        let p = generate_puzzle(&f, seed).unwrap();
        let report = verify_puzzle(&p);
        prop_assert!(report.passed, "{:?}", report.failures);
        let sizes: Vec<usize> = ResponseRole::ALL.iter().map(|&r| p.digits_with_role(r).len()).collect();
        // in-house, absent, distractor, target
        prop_assert_eq!(sizes, vec![3, 4, 1, 1]);
        prop_assert_eq!(generate_puzzle(&f, seed).unwrap(), p);
    }

    #[test]
    fn feedback_is_well_formed(f in features(), seed in any::<u64>(), verbatim in any::<bool>()) {
        let p = generate_puzzle(&f, seed).unwrap();
        let mode = if verbatim { FeedbackMode::Verbatim } else { FeedbackMode::Corrected };
        for d in Digit::all() {
            let fb = feedback_for(&p, d, mode);
            prop_assert!(!fb.message.is_empty());
            let mut coords: Vec<Coord> = fb.highlights.iter().map(|h| h.coord).collect();
            let n = coords.len();
            coords.sort();
            coords.dedup();
            prop_assert_eq!(coords.len(), n);
        }
        let open = open_distractor_cell(&p).expect("the distractor is never forced");
        prop_assert!(open != p.goal);
        prop_assert!(p.target_house.contains(open));
        prop_assert!(p.grid.is_legal_placement(open, p.distractor).unwrap());
    }

    #[test]
    fn schedules_balanced(seed in any::<u64>()) {
        let s = schedule_test(seed);
        prop_assert_eq!(check_schedule(&s), Vec::<String>::new());
        prop_assert_eq!(s.trials().iter().filter(|&&c| c == ConditionCombo::CONTROL).count(), 4);
    }

    #[test]
    fn condition_features_follow_flags(seed in any::<u64>(), idx in 0u8..16) {
        let a = assign_participant(seed);
        let c = ConditionCombo::from_index(idx);
        let f = derive_condition_features_seeded(&a, c, seed ^ 1);
        let t = a.training;
        prop_assert_eq!(f.digit_set == t.digit_set, !c.ds_changed);
        prop_assert_eq!(f.house_type == t.house_type, !c.ht_changed);
        prop_assert_eq!(c.goal_position_changed(), f.goal() != t.goal());
    }

    #[test]
    fn simulated_paths_never_regress(p in params(), seed in any::<u64>()) {
        let (path, responses) = simulate_participant(&p, 40, &mut rng_from(seed));
        prop_assert_eq!(responses.len(), 40);
        prop_assert!(path.classes().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn forward_is_a_distribution(p in params(), t in 1usize..60) {
        let d = forward_response_dist(&p, t);
        prop_assert!(d.iter().all(|&x| x >= 0.0));
        prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn posterior_matches_scaled_enumeration(
        p in params(),
        roles in proptest::collection::vec(0usize..4, 1..9),
        log_scale in -200.0f64..200.0,
    ) {
        let responses: Vec<ResponseRole> = roles.iter().map(|&i| ResponseRole::ALL[i]).collect();
        let post = path_posterior(&responses, &p).unwrap();
        // oracle: direct products with every likelihood multiplied by one constant
        let scale = log_scale.exp();
        let paths = enumerate_paths(responses.len());
        let raw: Vec<f64> = paths
            .iter()
            .map(|pi| path_prior(&p, pi) * path_likelihood(&responses, pi, &p).unwrap() * scale)
            .collect();
        let total: f64 = raw.iter().sum();
        prop_assume!(total.is_finite() && total > 0.0);
        for (w, r) in post.weights().iter().zip(&raw) {
            prop_assert!((w - r / total).abs() < 1e-9);
        }
    }

    #[test]
    fn aggregate_identity(p in params(), t in 1usize..=5) {
        // the marginal response distribution at trial t, summed over all paths
        // and earlier responses, equals the forward recursion
        let e = p.effective_emission();
        let mut direct = [0.0; 4];
        for path in enumerate_paths(t) {
            let s = path.classes()[t - 1].index();
            let prior = path_prior(&p, &path);
            for r in 0..4 {
                direct[r] += prior * e[s][r];
            }
        }
        let fwd = forward_response_dist(&p, t);
        for r in 0..4 {
            prop_assert!((direct[r] - fwd[r]).abs() < 1e-9);
        }
    }
}

#[test]
fn pure_strategies_never_move() {
    for s in StrategyClass::ALL {
        let p = AggregateParams::pure(s);
        let (path, _) = simulate_participant(&p, 30, &mut rng_from(3));
        assert!(path.classes().iter().all(|&c| c == s));
    }
}
