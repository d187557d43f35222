//! Property tests for skeleton extraction and the machines.

use proptest::prelude::*;
use skelmad_core::calculus::contexts::is_answer;
use skelmad_core::check::{audited_run, bisimulate, marking_decomposition, same_decomposition};
use skelmad_core::gen;
use skelmad_core::machine::{run_term, Machine, RunOptions, RunOutcome, Variant};
use skelmad_core::skeleton::oracle::skeleton_of;
use skelmad_core::skeleton::{mark_skeleton, white_size};
use skelmad_core::term::{NameSupply, SkTerm, TermStore};

fn value() -> impl Strategy<Value = SkTerm> {
    (any::<u64>(), 2usize..40).prop_map(|(seed, size)| gen::value(&mut gen::rng(seed), size, &["z", "w"]))
}

fn closed() -> impl Strategy<Value = SkTerm> {
    (any::<u64>(), 2usize..16).prop_map(|(seed, size)| gen::closed_term(&mut gen::rng(seed), size))
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Mad), Just(Variant::Smad)]
}

const FUEL: u64 = 2_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn marking_takes_one_step_per_white_node(v in value()) {
        let mut store = TermStore::new();
        let root = store.insert(&v).unwrap();
        let marked = mark_skeleton(&mut store, root).unwrap();
        prop_assert_eq!(marked.steps as usize, white_size(&store, root));
    }

    #[test]
    fn marking_agrees_with_the_recursive_definition(v in value()) {
        let ours = marking_decomposition(&v);
        let reference = skeleton_of(&v, &mut NameSupply::avoiding(&v)).unwrap();
        prop_assert!(same_decomposition(&ours, &reference));
        prop_assert!(ours.recompose().alpha_eq(&v));
    }

    #[test]
    fn skeletons_are_their_own_skeletons(v in value()) {
        let d = marking_decomposition(&v);
        let again = marking_decomposition(&d.skeleton);
        prop_assert!(again.flesh.is_empty());
        prop_assert!(again.skeleton.alpha_eq(&d.skeleton));
    }

    #[test]
    fn initial_states_read_back_to_the_input(t in closed(), v in variant()) {
        let m = Machine::from_term(v, &t).unwrap();
        prop_assert!(m.readback().alpha_eq(&t));
        prop_assert!(m.audit().is_ok());
    }

    #[test]
    fn audits_hold_after_every_transition(t in closed(), v in variant()) {
        if let Some(stats) = audited_run(v, &t, FUEL).map_err(TestCaseError::fail)? {
            prop_assert!(stats.check_entry_bounds().is_ok(), "{:?}", stats);
        }
    }

    #[test]
    fn final_states_read_back_to_answers(t in closed(), v in variant()) {
        let (m, run) = run_term(v, &t, &RunOptions { fuel: FUEL, ..Default::default() }).unwrap();
        if run.outcome == RunOutcome::Final {
            prop_assert!(m.is_final());
            prop_assert!(m.code_term().is_value());
            prop_assert!(is_answer(&m.readback()));
        }
    }

    #[test]
    fn runs_are_deterministic(t in closed(), v in variant()) {
        let opts = RunOptions { fuel: 300, trace: true, labels: true, ..Default::default() };
        let (_, a) = run_term(v, &t, &opts).unwrap();
        let (_, b) = run_term(v, &t, &opts).unwrap();
        prop_assert_eq!(a.labels, b.labels);
        prop_assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn machines_simulate_their_calculi(t in closed(), v in variant()) {
        bisimulate(&t, v).map_err(TestCaseError::fail)?;
    }
}
