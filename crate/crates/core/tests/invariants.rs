use proptest::prelude::*;

use isp_core::graph::{approximate_graph, build_pg_graph, OperatorGraph};
use isp_core::reduced::{
    initial_state, parallel_grover, reduced_grover_register, reduced_iam_register, reduced_oracle,
};
use isp_core::schedule::{run_schedule, OpSpec, Phase};
use isp_core::{enumerate_labels, BasisLabel, InitMode, ProblemParams, ReducedState, Schedule};

fn op_spec(k: usize) -> impl Strategy<Value = OpSpec> {
    prop_oneof![
        Just(OpSpec::Parallel),
        proptest::sample::subsequence((1..=k).collect::<Vec<_>>(), 1..=k).prop_map(OpSpec::Levels),
    ]
}

fn random_state(k: usize) -> impl Strategy<Value = ReducedState> {
    proptest::collection::vec(-1.0f64..1.0, 1 << k)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            ReducedState::from_amplitudes(v.into_iter().map(|x| x / norm).collect()).unwrap()
        })
}

proptest! {
    #[test]
    fn register_operators_are_orthogonal(k in 1usize..=4, n in 1u32..=30) {
        let params = ProblemParams::new(k, n).unwrap();
        prop_assert!(parallel_grover(&params).unwrap().orthogonality_defect() < 1e-12);
        for level in 1..=k {
            prop_assert!(reduced_oracle(level, &params).unwrap().orthogonality_defect() < 1e-12);
            prop_assert!(reduced_iam_register(level, &params).unwrap().orthogonality_defect() < 1e-12);
            prop_assert!(reduced_grover_register(level, &params).unwrap().orthogonality_defect() < 1e-12);
        }
    }

    #[test]
    fn iterations_preserve_norm(
        (k, state) in (1usize..=3).prop_flat_map(|k| (Just(k), random_state(k))),
        n in 4u32..=20,
        t in 0u64..500,
    ) {
        let params = ProblemParams::new(k, n).unwrap();
        let out = parallel_grover(&params).unwrap().power(t).apply(&state).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn label_round_trips(k in 1usize..=8, raw in any::<usize>()) {
        let label = BasisLabel::from_index(raw % (1 << k), k);
        let text = label.to_string();
        prop_assert_eq!(text.parse::<BasisLabel>().unwrap(), label.clone());
        let json = serde_json::to_string(&label).unwrap();
        prop_assert_eq!(serde_json::from_str::<BasisLabel>(&json).unwrap(), label.clone());
        prop_assert_eq!(BasisLabel::from_index(label.index(), k), label);
    }

    #[test]
    fn schedule_json_round_trips(
        n in 2u32..=24,
        phases in proptest::collection::vec((op_spec(3), 0.0f64..1.0, 0u64..50, any::<bool>(), any::<bool>()), 1..6),
    ) {
        let params = ProblemParams::new(3, n).unwrap();
        let phases: Vec<Phase> = phases
            .into_iter()
            .map(|(op, c, r, use_reps, adj)| {
                let p = if use_reps { Phase::reps(op, r) } else { Phase::coeff(op, c) };
                if adj { p.adjoint() } else { p }
            })
            .collect();
        let s = Schedule::new(params, phases).unwrap();
        let back = Schedule::from_json(&s.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.total_iterations(), s.total_iterations());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn schedules_keep_unit_norm(
        n in 4u32..=16,
        phases in proptest::collection::vec((op_spec(3), 0.0f64..0.5, any::<bool>()), 1..5),
    ) {
        let params = ProblemParams::new(3, n).unwrap();
        let phases: Vec<Phase> = phases
            .into_iter()
            .map(|(op, c, adj)| if adj { Phase::coeff(op, c).adjoint() } else { Phase::coeff(op, c) })
            .collect();
        let s = Schedule::new(params, phases).unwrap();
        let traj = run_schedule(&s, &initial_state(&params, InitMode::Exact), 7).unwrap();
        for sample in &traj.samples {
            prop_assert!((sample.state.norm() - 1.0).abs() < 1e-10);
        }
        prop_assert_eq!(traj.samples.last().unwrap().iteration, s.total_iterations());
    }
}

#[test]
fn graphs_round_trip_through_json() {
    for k in 1..=5 {
        let params = ProblemParams::new(k, 10).unwrap();
        let exact = build_pg_graph(&params);
        let approx = approximate_graph(&exact).unwrap();
        for g in [exact, approx] {
            let back = OperatorGraph::from_json(&g.to_json().unwrap()).unwrap();
            assert_eq!(back, g);
        }
    }
}

#[test]
fn labels_enumerate_every_index() {
    for k in 1..=6 {
        let labels = enumerate_labels(k).unwrap();
        assert_eq!(labels.len(), 1 << k);
        for (i, l) in labels.iter().enumerate() {
            assert_eq!(l.index(), i);
        }
    }
}
