//! Localized filtering operator `T = J^{-α,-β} diag(h) J^{α,β}`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bandlimit::SpectralSupports;
use crate::error::{Error, Result};
use crate::linalg::{C64, CMat};
use crate::spectral::JointTransform;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedOperator {
    pub alpha: f64,
    pub beta: f64,
    /// Spectral kernel `h` over the `NT` joint frequencies.
    pub kernel: Vec<f64>,
    pub matrix: CMat,
    /// Operator built from `√h`.
    pub sqrt_matrix: CMat,
    /// Smallest kernel value over the band.
    pub rho: f64,
    /// Kernel is exactly the indicator of the band.
    pub ideal: bool,
}

/// Indicator of the band, the ideal low-pass kernel.
pub fn ideal_kernel(band: &SpectralSupports) -> Vec<f64> {
    let mut h = alloc::vec![0.0; band.size()];
    for &f in &band.joint_band {
        h[f] = 1.0;
    }
    h
}

/// Decaying kernel `exp(-ℓ/K)` over the joint index `ℓ`.
pub fn exponential_kernel(nt: usize, k: usize) -> Vec<f64> {
    let k = k.max(1) as f64;
    (0..nt).map(|l| (-(l as f64) / k).exp()).collect()
}

/// `J^{-α,-β} diag(h) J^{α,β}` accumulated over the nonzero kernel entries.
pub fn spectral_operator(j: &JointTransform, kernel: &[f64]) -> CMat {
    let support: Vec<usize> = (0..kernel.len()).filter(|&l| kernel[l] != 0.0).collect();
    if support.is_empty() {
        return CMat::zeros(j.size(), j.size());
    }
    let mut left = j.inverse_columns(&support);
    for (col, &l) in support.iter().enumerate() {
        let h = C64::new(kernel[l], 0.0);
        left.column_mut(col).iter_mut().for_each(|z| *z *= h);
    }
    left * j.rows(&support)
}

/// Build the localized operator for a kernel over the joint spectrum.
pub fn localized_operator(j: &JointTransform, kernel: &[f64], band: &SpectralSupports, budget: usize) -> Result<LocalizedOperator> {
    let nt = j.size();
    if kernel.len() != nt {
        return Err(Error::DimensionMismatch { expected: nt, found: kernel.len() });
    }
    if nt > budget {
        return Err(Error::BudgetExceeded { size: nt, budget });
    }
    if let Some(bad) = kernel.iter().position(|&h| !(h >= 0.0) || !h.is_finite()) {
        return Err(Error::NegativeKernel(bad));
    }
    let ideal = kernel == ideal_kernel(band).as_slice();
    let rho = band.joint_band.iter().map(|&f| kernel[f]).fold(f64::INFINITY, f64::min);
    let rho = if rho.is_finite() { rho } else { 0.0 };
    if rho == 0.0 && !ideal {
        return Err(Error::ZeroRho);
    }
    let matrix = spectral_operator(j, kernel);
    let sqrt_matrix = if ideal {
        matrix.clone()
    } else {
        let root: Vec<f64> = kernel.iter().map(|h| h.sqrt()).collect();
        spectral_operator(j, &root)
    };
    Ok(LocalizedOperator { alpha: j.alpha, beta: j.beta, kernel: kernel.to_vec(), matrix, sqrt_matrix, rho, ideal })
}

/// The ideal low-pass operator, equal to the bandlimiting projector.
pub fn ideal_localized_operator(j: &JointTransform, band: &SpectralSupports, budget: usize) -> Result<LocalizedOperator> {
    localized_operator(j, &ideal_kernel(band), band, budget)
}

impl LocalizedOperator {
    pub fn size(&self) -> usize {
        self.kernel.len()
    }

    /// Number of nonzero kernel entries, the rank of the operator.
    pub fn rank(&self) -> usize {
        self.kernel.iter().filter(|&&h| h != 0.0).count()
    }

    /// `Tᴴ T`, built from the squared kernel when `J` is unitary.
    pub fn gram(&self, j: &JointTransform) -> CMat {
        if self.ideal {
            self.matrix.clone()
        } else if j.unitary {
            let sq: Vec<f64> = self.kernel.iter().map(|h| h * h).collect();
            spectral_operator(j, &sq)
        } else {
            self.matrix.adjoint() * &self.matrix
        }
    }
}
