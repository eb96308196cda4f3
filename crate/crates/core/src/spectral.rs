//! Hermitian split, eigen-decomposition in the quadrature inner product and
//! the kernels derived from it.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::kernel::{relative_or_absolute, Kernel};

/// Default relative tolerance for reciprocity and Hermiticity checks.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// `Q = σ + iτ` with `σ = (Q + Q†)/2` and `τ = (Q − Q†)/(2i)`.
pub fn hermitian_split(q: &Kernel, tol: f64) -> Result<(Kernel, Kernel)> {
    let defect = q.reciprocity_defect();
    if defect > tol {
        return Err(Error::NotReciprocal { defect });
    }
    let v = q.values();
    let adj = v.adjoint();
    let sigma = (v + &adj).map(|x| x * 0.5);
    let tau = (v - &adj).map(|x| x / Complex64::new(0.0, 2.0));
    Ok((
        Kernel::from_parts(q.grid().clone(), q.omega(), sigma),
        Kernel::from_parts(q.grid().clone(), q.omega(), tau),
    ))
}

/// Eigenvalues `σ_α` (descending) and `δ`-orthonormal eigenvectors `F_α`
/// (columns of `vectors`) of a Hermitian kernel.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<Complex64>,
    grid: Arc<SpatialGrid>,
    omega: f64,
}

pub fn spectral_decompose(sigma: &Kernel, tol: f64) -> Result<SpectralDecomposition> {
    let defect = sigma.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect });
    }
    let m = sigma.symmetrized();
    let h = (&m + m.adjoint()).map(|x| x * 0.5);
    let eig = SymmetricEigen::new(h);
    let n = sigma.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let isw: Vec<f64> = sigma
        .grid()
        .weights()
        .iter()
        .map(|w| 1.0 / w.sqrt())
        .collect();
    let mut vectors = DMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[k]);
        let u = eig.eigenvectors.column(k);
        let mut pivot = 0;
        for i in 1..n {
            if u[i].norm() > u[pivot].norm() * (1.0 + 1e-12) {
                pivot = i;
            }
        }
        let phase = if u[pivot].norm() > 0.0 {
            u[pivot].conj() / u[pivot].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            vectors[(i, col)] = u[i] * phase * isw[i];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
        grid: sigma.grid().clone(),
        omega: sigma.omega(),
    })
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `α` is `F_α(z_i)`.
    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// `1e-12 × max |σ_α|`.
    pub fn default_eps_reg(&self) -> f64 {
        1e-12 * self.max_abs()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `Σ_α f(σ_α) F_α F_α*` over all channels.
    pub fn map_kernel<F: Fn(f64) -> f64>(&self, f: F) -> Kernel {
        self.map_kernel_where(f, |_| true)
    }

    /// Same as [`SpectralDecomposition::map_kernel`] restricted to channels
    /// for which `keep` holds.
    pub fn map_kernel_where<F, P>(&self, f: F, keep: P) -> Kernel
    where
        F: Fn(f64) -> f64,
        P: Fn(usize) -> bool,
    {
        let n = self.grid.len();
        let mut scaled = DMatrix::zeros(n, self.len());
        for (a, &s) in self.eigenvalues.iter().enumerate() {
            if !keep(a) {
                continue;
            }
            let fs = f(s);
            if fs == 0.0 {
                continue;
            }
            scaled
                .column_mut(a)
                .copy_from(&self.vectors.column(a).map(|x| x * fs));
        }
        let values = scaled * self.vectors.adjoint();
        Kernel::from_parts(self.grid.clone(), self.omega, values)
    }

    /// `Σ_α σ_α F_α F_α*`.
    pub fn reconstruct(&self) -> Kernel {
        self.map_kernel(|s| s)
    }

    /// `max_{αβ} |Σ_i w_i F*_α F_β − δ_αβ|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut wf = self.vectors.clone();
        for (i, w) in self.grid.weights().iter().enumerate() {
            wf.row_mut(i).scale_mut(*w);
        }
        let gram = self.vectors.adjoint() * wf;
        let n = gram.nrows();
        (&gram - DMatrix::<Complex64>::identity(n, n)).camax()
    }

    /// `‖Σ_α F_α F_α* − id‖ / ‖id‖` in the operator norm.
    pub fn completeness_defect(&self) -> f64 {
        let sum = Kernel::from_parts(
            self.grid.clone(),
            self.omega,
            &self.vectors * self.vectors.adjoint(),
        );
        sum.relative_distance(&Kernel::identity(self.grid.clone(), self.omega))
    }

    /// Number of channels with `|σ_α| ≤ eps`.
    pub fn zero_count(&self, eps: f64) -> usize {
        self.eigenvalues.iter().filter(|s| s.abs() <= eps).count()
    }
}

/// `true` iff every `σ_α > tol`.
pub fn is_dissipative(spec: &SpectralDecomposition, tol: f64) -> bool {
    !spec.is_empty() && spec.eigenvalues.iter().all(|&s| s > tol)
}

#[derive(Clone, Debug)]
pub struct InverseKernel {
    pub kernel: Kernel,
    /// Channels with `|σ_α| ≤ ε_reg`, replaced by `sgn(σ_α)/ε_reg`.
    pub clamped: Vec<usize>,
}

/// `ρ = Σ_α s(σ_α) F_α F_α*` with `s(σ) = 1/σ` for `|σ| > ε_reg` and
/// `sgn(σ)/ε_reg` otherwise. `None` selects the default cutoff.
pub fn inverse_kernel(spec: &SpectralDecomposition, eps_reg: Option<f64>) -> InverseKernel {
    let eps = eps_reg.unwrap_or_else(|| spec.default_eps_reg());
    let clamped: Vec<usize> = (0..spec.len())
        .filter(|&a| spec.eigenvalues[a].abs() <= eps)
        .collect();
    let kernel = spec.map_kernel(|s| {
        if s.abs() > eps {
            1.0 / s
        } else if eps > 0.0 {
            // sgn(0) is taken as +1 so the clamp never vanishes
            if s < 0.0 {
                -1.0 / eps
            } else {
                1.0 / eps
            }
        } else {
            0.0
        }
    });
    InverseKernel { kernel, clamped }
}

/// `K = Σ_α σ_α^{1/2} F_α F_α*`, defined only for a positive spectrum.
pub fn factor_k(spec: &SpectralDecomposition, tol: f64) -> Result<Kernel> {
    if !is_dissipative(spec, tol) {
        return Err(Error::NonPositiveSpectrum {
            min: spec.min_eigenvalue(),
        });
    }
    Ok(spec.map_kernel(f64::sqrt))
}

/// `Σ_α |σ_α| F_α F_α*`.
pub fn sigma_av(spec: &SpectralDecomposition) -> Kernel {
    spec.map_kernel(f64::abs)
}

/// `P = Σ_α sgn(σ_α) F_α F_α*`. `None` selects the default cutoff.
pub fn parity_kernel(spec: &SpectralDecomposition, eps_reg: Option<f64>) -> Result<Kernel> {
    let eps = eps_reg.unwrap_or_else(|| spec.default_eps_reg());
    let count = spec.zero_count(eps);
    if count > 0 || spec.is_empty() {
        return Err(Error::ZeroEigenvalue {
            count,
            threshold: eps,
        });
    }
    Ok(spec.map_kernel(f64::signum))
}

/// Relative distance between two kernels, for reporting identities.
pub fn kernel_defect(a: &Kernel, b: &Kernel) -> f64 {
    relative_or_absolute((a - b).hs_norm(), b.hs_norm().max(a.hs_norm()))
}
