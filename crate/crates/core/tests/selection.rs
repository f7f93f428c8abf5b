mod common;

use common::{random_instance, rng};
use proptest::prelude::*;
use tvfrft_core::bandlimit::{joint_bandlimiting, SpectralSupports};
use tvfrft_core::localized::{ideal_kernel, localized_operator};
use tvfrft_core::select::{
    brute_force_select, greedy_select, objective_value, random_plan, ObjectiveForm, SamplingProblem, SelectOptions, Strategy,
};
use tvfrft_core::spectral::MATERIALIZE_BUDGET;

const FAST: SelectOptions = SelectOptions { recompute: false };
const LITERAL: SelectOptions = SelectOptions { recompute: true };

#[test]
fn direct_and_localized_forms_select_identical_sequences() {
    for seed in 0..10 {
        let inst = random_instance(seed, 8);
        let m = inst.band.k_j;
        for s in Strategy::GREEDY {
            let d = greedy_select(s, ObjectiveForm::Direct, &inst.problem, m, &FAST).unwrap();
            let l = greedy_select(s, ObjectiveForm::Localized, &inst.problem, m, &FAST).unwrap();
            assert_eq!(d.indices, l.indices, "seed {seed} {s:?}");
        }
        let a = greedy_select(Strategy::MinTrac, ObjectiveForm::Localized, &inst.problem, m, &FAST).unwrap();
        let b = greedy_select(Strategy::MinPinv, ObjectiveForm::Localized, &inst.problem, m, &FAST).unwrap();
        assert_eq!(a.indices, b.indices);
    }
}

#[test]
fn incremental_engine_matches_full_recompute() {
    for seed in 20..30 {
        let inst = random_instance(seed, 8);
        let m = (inst.band.k_j + 3).min(inst.n * inst.t);
        for form in [ObjectiveForm::Direct, ObjectiveForm::Localized] {
            for s in Strategy::GREEDY {
                let fast = greedy_select(s, form, &inst.problem, m, &FAST).unwrap();
                let slow = greedy_select(s, form, &inst.problem, m, &LITERAL).unwrap();
                assert_eq!(fast.indices, slow.indices, "seed {seed} {s:?} {form:?}");
                for (a, b) in fast.objective_trace.iter().zip(&slow.objective_trace) {
                    assert!((a - b).abs() <= 1e-7 * b.abs().max(1e-12), "seed {seed} {s:?} {form:?}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn each_greedy_step_is_extremal_on_rescan() {
    for seed in 40..46 {
        let inst = random_instance(seed, 8);
        let m = inst.band.k_j + 2;
        for form in [ObjectiveForm::Direct, ObjectiveForm::Localized] {
            for s in Strategy::GREEDY {
                let plan = greedy_select(s, form, &inst.problem, m, &FAST).unwrap();
                for step in 0..m {
                    let prefix = &plan.indices[..step];
                    let chosen = objective_value(s, form, &inst.problem, &plan.indices[..=step]).unwrap();
                    for y in 0..inst.n * inst.t {
                        if plan.indices[..=step].contains(&y) {
                            continue;
                        }
                        let mut set = prefix.to_vec();
                        set.push(y);
                        let v = objective_value(s, form, &inst.problem, &set).unwrap();
                        let tol = 1e-7 * chosen.abs().max(1e-12);
                        if s.maximizes(form) {
                            assert!(v <= chosen + tol, "seed {seed} {s:?} {form:?} step {step}");
                        } else {
                            assert!(v >= chosen - tol, "seed {seed} {s:?} {form:?} step {step}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn full_budget_yields_permutation() {
    let inst = random_instance(3, 6);
    let nt = inst.n * inst.t;
    for s in Strategy::GREEDY {
        let mut idx = greedy_select(s, ObjectiveForm::Direct, &inst.problem, nt, &FAST).unwrap().indices;
        idx.sort_unstable();
        assert_eq!(idx, (0..nt).collect::<Vec<_>>());
    }
}

#[test]
fn maxvol_direct_equals_localized_on_small_case() {
    let mut r = rng(77);
    let f = common::random_factory(&mut r, 4, 3);
    let joint = f.joint(0.7, 1.1).unwrap();
    let band = SpectralSupports::lowest(4, 3, 2, 2).unwrap();
    let p = SamplingProblem::new(&joint, &band).unwrap();
    let d = greedy_select(Strategy::MaxVol, ObjectiveForm::Direct, &p, 4, &FAST).unwrap();
    let l = greedy_select(Strategy::MaxVol, ObjectiveForm::Localized, &p, 4, &FAST).unwrap();
    assert_eq!(d.indices, l.indices);
}

#[test]
fn objective_value_examples() {
    let inst = random_instance(8, 8);
    let nt = inst.n * inst.t;
    let all: Vec<usize> = (0..nt).collect();
    let k = inst.band.k_j as f64;
    let tr = objective_value(Strategy::MaxSig, ObjectiveForm::Localized, &inst.problem, &all).unwrap();
    assert!((tr - k).abs() < 1e-9);
    let b = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap().b;
    for i in 0..nt {
        let v = objective_value(Strategy::MaxVol, ObjectiveForm::Localized, &inst.problem, &[i]).unwrap();
        assert!((v - b[(i, i)].re).abs() < 1e-12);
    }
    let s = objective_value(Strategy::MaxSigMin, ObjectiveForm::Direct, &inst.problem, &all[..inst.band.k_j + 1]).unwrap();
    assert!(s <= 1.0 + 1e-12);
}

#[test]
fn maxsig_trace_is_nondecreasing() {
    for seed in 50..55 {
        let inst = random_instance(seed, 8);
        let plan = greedy_select(Strategy::MaxSig, ObjectiveForm::Localized, &inst.problem, inst.n * inst.t, &FAST).unwrap();
        assert!(plan.objective_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}

#[test]
fn scaling_the_operator_keeps_every_sequence() {
    for seed in 60..64 {
        let inst = random_instance(seed, 8);
        let m = inst.band.k_j + 2;
        let scaled: Vec<f64> = ideal_kernel(&inst.band).iter().map(|h| h * 3.7).collect();
        let op = localized_operator(&inst.joint, &scaled, &inst.band, MATERIALIZE_BUDGET).unwrap();
        let scaled_problem = inst.problem.clone().with_localized(op);
        for s in Strategy::GREEDY {
            let a = greedy_select(s, ObjectiveForm::Localized, &inst.problem, m, &FAST).unwrap();
            let b = greedy_select(s, ObjectiveForm::Localized, &scaled_problem, m, &FAST).unwrap();
            assert_eq!(a.indices, b.indices, "seed {seed} {s:?}");
        }
    }
}

#[test]
fn oracle_dominates_and_agrees_at_one_sample() {
    for seed in 0..6 {
        let mut r = rng(100 + seed);
        let f = common::random_factory(&mut r, 4, 3);
        let joint = f.joint(0.4 + 0.1 * seed as f64, 0.9).unwrap();
        let band = SpectralSupports::lowest(4, 3, 2, 2).unwrap();
        let p = SamplingProblem::new(&joint, &band).unwrap();
        for s in [Strategy::MaxVol, Strategy::MinTrac] {
            let g = greedy_select(s, ObjectiveForm::Localized, &p, 3, &FAST).unwrap();
            let gv = objective_value(s, ObjectiveForm::Localized, &p, &g.indices).unwrap();
            let (_, ov) = brute_force_select(s, ObjectiveForm::Localized, &p, 3).unwrap();
            if s.maximizes(ObjectiveForm::Localized) {
                assert!(ov >= gv * (1.0 - 1e-12));
            } else {
                assert!(ov <= gv * (1.0 + 1e-12));
            }
            let (one, _) = brute_force_select(s, ObjectiveForm::Localized, &p, 1).unwrap();
            assert_eq!(one[0], g.indices[0]);
        }
    }
}

#[test]
fn random_plans_are_seeded() {
    let inst = random_instance(1, 6);
    let a = random_plan(&inst.problem, 5, 9).unwrap();
    assert_eq!(a, random_plan(&inst.problem, 5, 9).unwrap());
    assert_eq!(a.objective_trace.len(), 5);
}

#[test]
fn errors_are_reported() {
    let inst = random_instance(2, 6);
    let nt = inst.n * inst.t;
    assert!(greedy_select(Strategy::MinTrac, ObjectiveForm::Direct, &inst.problem, 0, &FAST).is_err());
    assert!(greedy_select(Strategy::MinTrac, ObjectiveForm::Direct, &inst.problem, nt + 1, &FAST).is_err());
    assert!(greedy_select(Strategy::Random, ObjectiveForm::Direct, &inst.problem, 1, &FAST).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn selection_is_deterministic(seed in 0u64..500) {
        let inst = random_instance(seed, 8);
        for s in Strategy::GREEDY {
            let a = greedy_select(s, ObjectiveForm::Direct, &inst.problem, inst.band.k_j, &FAST).unwrap();
            let b = greedy_select(s, ObjectiveForm::Direct, &inst.problem, inst.band.k_j, &FAST).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn table_equivalence_holds_on_random_instances(seed in 1000u64..5000) {
        let inst = random_instance(seed, 8);
        for s in Strategy::GREEDY {
            let d = greedy_select(s, ObjectiveForm::Direct, &inst.problem, inst.band.k_j, &FAST).unwrap();
            let l = greedy_select(s, ObjectiveForm::Localized, &inst.problem, inst.band.k_j, &FAST).unwrap();
            prop_assert_eq!(d.indices, l.indices);
        }
    }
}

#[test]
fn engine_matches_literal_for_decaying_kernel() {
    use tvfrft_core::localized::exponential_kernel;
    for seed in 70..74 {
        let inst = random_instance(seed, 8);
        let nt = inst.n * inst.t;
        let op = localized_operator(&inst.joint, &exponential_kernel(nt, inst.band.k_j), &inst.band, MATERIALIZE_BUDGET).unwrap();
        let p = inst.problem.clone().with_localized(op);
        let m = (inst.band.k_j + 2).min(nt);
        for s in Strategy::GREEDY {
            let fast = greedy_select(s, ObjectiveForm::Localized, &p, m, &FAST).unwrap();
            let slow = greedy_select(s, ObjectiveForm::Localized, &p, m, &LITERAL).unwrap();
            assert_eq!(fast.indices, slow.indices, "seed {seed} {s:?}");
        }
    }
}
