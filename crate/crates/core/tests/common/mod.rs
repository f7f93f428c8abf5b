#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvfrft_core::bandlimit::SpectralSupports;
use tvfrft_core::graph::{build_gaussian_kernel_graph, shift_operator, PointCloud, ShiftKind};
use tvfrft_core::linalg::{C64, CMat};
use tvfrft_core::select::SamplingProblem;
use tvfrft_core::spectral::{JointTransform, SignConvention, TransformFactory};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Laplacian of a complete Gaussian-kernel graph on random planar points.
pub fn random_laplacian(rng: &mut impl Rng, n: usize) -> CMat {
    let points = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    let g = build_gaussian_kernel_graph(&PointCloud { points, kernel_width: 0.5, sparsify_threshold: 0.0 }).unwrap();
    shift_operator(&g, ShiftKind::Laplacian).unwrap()
}

pub fn random_factory(rng: &mut impl Rng, n: usize, t: usize) -> TransformFactory {
    TransformFactory::new(t, &random_laplacian(rng, n), SignConvention::StandardMinus).unwrap()
}

pub struct Instance {
    pub n: usize,
    pub t: usize,
    pub joint: JointTransform,
    pub band: SpectralSupports,
    pub problem: SamplingProblem,
}

/// Random unitary instance with `N, T ≤ 8` and a product band of size ≤ `max_k`.
pub fn random_instance(seed: u64, max_k: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.random_range(3..=8);
    let t = r.random_range(2..=8);
    let f = random_factory(&mut r, n, t);
    let alpha = r.random_range(-2.0..2.0);
    let beta = r.random_range(-2.0..2.0);
    let joint = f.joint(alpha, beta).unwrap();
    let (k_t, k_g) = loop {
        let kt = r.random_range(1..=t.min(3));
        let kg = r.random_range(1..=n.min(4));
        if kt * kg <= max_k && kt * kg >= 2 {
            break (kt, kg);
        }
    };
    let band = SpectralSupports::lowest(n, t, k_t, k_g).unwrap();
    let problem = SamplingProblem::new(&joint, &band).unwrap();
    Instance { n, t, joint, band, problem }
}

pub fn random_complex(rng: &mut impl Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

pub fn frob(m: &CMat) -> f64 {
    m.norm()
}
