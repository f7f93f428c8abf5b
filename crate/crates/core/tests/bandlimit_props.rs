mod common;

use common::{frob, random_instance, rng};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::Rng;
use tvfrft_core::bandlimit::{
    check_perfect_localization, factor_projectors, joint_bandlimiting, localized_vector, measure_bandwidth,
    project_bandlimited, synthesize_bandlimited, DiagonalProjector, SpectralSupports, BANDWIDTH_TOL,
};
use tvfrft_core::linalg::{kron, spectral_norm, C64, CMat};
use tvfrft_core::spectral::{TimeVertexSignal, MATERIALIZE_BUDGET};

fn random_support(r: &mut impl Rng, nt: usize, size: usize) -> Vec<usize> {
    let mut s = sample(r, nt, size).into_vec();
    s.sort_unstable();
    s
}

#[test]
fn projectors_annihilate_their_complements() {
    for seed in 0..10 {
        let inst = random_instance(seed, 8);
        let p = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap();
        assert!(frob(&(&p.b * p.complement())) < 1e-9);
        assert!(frob(&(&p.b * &p.b - &p.b)) < 1e-8);
        let mut r = rng(seed);
        let nt = inst.n * inst.t;
        let d = DiagonalProjector::from_indices(nt, &random_support(&mut r, nt, nt / 2)).unwrap();
        let dm = d.matrix();
        assert_eq!(&dm * d.complement().matrix(), CMat::zeros(nt, nt));
        assert_eq!(&dm * &dm, dm);
    }
}

#[test]
fn constructed_localized_vectors_reach_unit_eigenvalue() {
    for seed in 0..20 {
        let inst = random_instance(seed, 8);
        let nt = inst.n * inst.t;
        let b = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap().b;
        let mut r = rng(seed + 100);
        let support = random_support(&mut r, nt, nt - inst.band.k_j + 1);
        let x = localized_vector(&b, &support, 1e-9).unwrap().expect("dimension count guarantees a fixed vector");
        let d = DiagonalProjector::from_indices(nt, &support).unwrap();
        let bdb = &b * d.matrix() * &b;
        let rq = (x.adjoint() * &bdb * &x)[(0, 0)].re / x.norm_squared();
        assert!((rq - 1.0).abs() < 1e-9, "seed {seed}: {rq}");
        let rep = check_perfect_localization(&d, &b).unwrap();
        assert!((rep.lambda_max - 1.0).abs() < 1e-8 && rep.localized);
    }
}

#[test]
fn generic_small_supports_are_not_localized() {
    // A product band admits Kronecker-structured localized vectors on
    // (T - K_T + 1)(N - K_G + 1) entries, so generic supports stay below that.
    let mut checked = 0;
    for seed in 0.. {
        if checked == 20 {
            break;
        }
        let inst = random_instance(seed, 8);
        let (n, t, kt, kg) = (inst.n, inst.t, inst.band.k_t, inst.band.k_g);
        if kt == t || kg == n {
            continue;
        }
        checked += 1;
        let nt = n * t;
        let b = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap().b;
        let mut r = rng(seed + 200);
        let size = ((t - kt + 1) * (n - kg + 1) - 1).min(nt - inst.band.k_j);
        let support = random_support(&mut r, nt, size);
        let rep = check_perfect_localization(&DiagonalProjector::from_indices(nt, &support).unwrap(), &b).unwrap();
        assert!(rep.lambda_max < 1.0 - 1e-6 && !rep.localized, "seed {seed}: {}", rep.lambda_max);
    }
}

#[test]
fn trivial_localization_cases() {
    let inst = random_instance(5, 8);
    let nt = inst.n * inst.t;
    let b = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap().b;
    let all = DiagonalProjector::from_indices(nt, &(0..nt).collect::<Vec<_>>()).unwrap();
    assert!((check_perfect_localization(&all, &b).unwrap().lambda_max - 1.0).abs() < 1e-8);
    let none = DiagonalProjector::from_indices(nt, &[]).unwrap();
    let rep = check_perfect_localization(&none, &b).unwrap();
    assert!(rep.lambda_max.abs() < 1e-12 && !rep.localized);
}

#[test]
fn bandwidth_bounds_hold_on_random_draws() {
    for seed in 0..100 {
        let inst = random_instance(seed % 25, 8);
        let x = synthesize_bandlimited(seed, &inst.joint, &inst.band, 1.0).unwrap();
        let bw = measure_bandwidth(&x, &inst.joint, BANDWIDTH_TOL).unwrap();
        assert!(bw.k_t.max(bw.k_g) <= bw.k_j && bw.k_j <= bw.k_t * bw.k_g, "seed {seed}: {bw:?}");
        assert_eq!((bw.k_t, bw.k_g, bw.k_j), (inst.band.k_t, inst.band.k_g, inst.band.k_j));
    }
}

#[test]
fn projection_of_random_signal_is_band_supported() {
    let mut r = rng(9);
    let inst = random_instance(9, 8);
    let p = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap();
    let x = TimeVertexSignal::from_vec(inst.n, inst.t, &common::random_complex(&mut r, inst.n * inst.t)).unwrap();
    let y = project_bandlimited(&x, &p).unwrap();
    let yh = inst.joint.apply(&y).unwrap();
    let above = yh.vec().iter().filter(|z| z.norm() > 1e-9).count();
    assert!(above <= inst.band.k_j);
    let twice = project_bandlimited(&y, &p).unwrap();
    assert!(frob(&(&twice.data - &y.data)) < 1e-10);
}

#[test]
fn non_product_band_respects_bounds() {
    let inst = random_instance(11, 8);
    let nt = inst.n * inst.t;
    let band = SpectralSupports::joint(inst.n, inst.t, &[0, 1, inst.n + 1, nt - 1]).unwrap();
    assert!(band.k_j <= band.k_t * band.k_g && band.k_j >= band.k_t.max(band.k_g));
    let x = synthesize_bandlimited(3, &inst.joint, &band, 2.0).unwrap();
    assert!((x.energy().sqrt() - 2.0).abs() < 1e-12);
    let bw = measure_bandwidth(&x, &inst.joint, BANDWIDTH_TOL).unwrap();
    assert_eq!((bw.k_t, bw.k_g, bw.k_j), (band.k_t, band.k_g, band.k_j));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spectral_norms_of_bd_and_db_agree(seed in 0u64..10_000) {
        let inst = random_instance(seed, 8);
        let nt = inst.n * inst.t;
        let b = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap().b;
        let mut r = rng(seed);
        let size = r.random_range(1..=nt);
        let d = DiagonalProjector::from_indices(nt, &random_support(&mut r, nt, size)).unwrap().matrix();
        prop_assert!((spectral_norm(&(&b * &d)) - spectral_norm(&(&d * &b))).abs() < 1e-9);
    }

    #[test]
    fn product_band_projector_factors(seed in 0u64..10_000) {
        let inst = random_instance(seed, 8);
        let b = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap().b;
        let (bt, bg) = factor_projectors(&inst.joint, &inst.band).unwrap();
        prop_assert!(frob(&(&b - kron(&bt, &bg))) < 1e-9);
    }

    #[test]
    fn rayleigh_quotient_is_one_on_localized_vectors(seed in 0u64..10_000) {
        let inst = random_instance(seed, 8);
        let nt = inst.n * inst.t;
        let b = joint_bandlimiting(&inst.joint, &inst.band, MATERIALIZE_BUDGET).unwrap().b;
        let mut r = rng(seed ^ 0xabc);
        let extra = r.random_range(1..=inst.band.k_j.min(3));
        let support = random_support(&mut r, nt, (nt - inst.band.k_j + extra).min(nt));
        let x = localized_vector(&b, &support, 1e-9).unwrap().unwrap();
        let d = DiagonalProjector::from_indices(nt, &support).unwrap();
        let dx: Vec<C64> = d.apply(x.as_slice());
        prop_assert!(dx.iter().zip(x.iter()).all(|(a, b)| (a - b).norm() == 0.0));
        let bdb = &b * d.matrix() * &b;
        let rq = (x.adjoint() * &bdb * &x)[(0, 0)].re;
        prop_assert!((rq - 1.0).abs() < 1e-9);
    }
}
