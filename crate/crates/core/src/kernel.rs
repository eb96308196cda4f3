//! Integral kernels on a spatial grid and their quadrature algebra.
//!
//! A [`Kernel`] stores densities `K(z_i, z_j)`. Quadrature weights are
//! inserted only when kernels act or compose:
//!
//! ```text
//! (K f)_i     = Σ_j K_ij w_j f_j
//! (A ∘ B)_ij  = Σ_k A_ik w_k B_kj
//! identity_ij = δ_ij / w_i
//! ```
//!
//! With this convention the continuum identities used throughout the crate
//! (completeness, inverse kernels, the Green-function integral relation)
//! have exact discrete counterparts.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

#[derive(Clone, Debug)]
pub struct Kernel {
    values: DMatrix<Complex64>,
    grid: Arc<SpatialGrid>,
    omega: f64,
}

impl Kernel {
    pub fn new(grid: Arc<SpatialGrid>, omega: f64, values: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "kernel is {}x{} but grid has {n} nodes",
                values.nrows(),
                values.ncols()
            )));
        }
        Ok(Kernel {
            values,
            grid,
            omega,
        })
    }

    pub(crate) fn from_parts(
        grid: Arc<SpatialGrid>,
        omega: f64,
        values: DMatrix<Complex64>,
    ) -> Self {
        debug_assert_eq!(values.nrows(), grid.len());
        Kernel {
            values,
            grid,
            omega,
        }
    }

    pub fn zeros(grid: Arc<SpatialGrid>, omega: f64) -> Self {
        let n = grid.len();
        Kernel::from_parts(grid, omega, DMatrix::zeros(n, n))
    }

    /// `δ(z - z')` on the grid: `diag(1 / w_i)`.
    pub fn identity(grid: Arc<SpatialGrid>, omega: f64) -> Self {
        let diag = DVector::from_iterator(
            grid.len(),
            grid.weights().iter().map(|w| Complex64::new(1.0 / w, 0.0)),
        );
        Kernel::from_parts(grid, omega, DMatrix::from_diagonal(&diag))
    }

    /// Strictly local kernel `d(z) δ(z - z')`.
    pub fn local(grid: Arc<SpatialGrid>, omega: f64, density: &[Complex64]) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} densities for {} nodes",
                density.len(),
                grid.len()
            )));
        }
        let diag = DVector::from_iterator(
            grid.len(),
            density.iter().zip(grid.weights()).map(|(d, w)| d / w),
        );
        Ok(Kernel::from_parts(
            grid,
            omega,
            DMatrix::from_diagonal(&diag),
        ))
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<Complex64> {
        self.values
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn assert_compatible(&self, other: &Kernel) {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid,
            "kernels live on different grids"
        );
    }

    /// `(self ∘ other)_ij = Σ_k self_ik w_k other_kj`.
    pub fn compose(&self, other: &Kernel) -> Kernel {
        self.assert_compatible(other);
        let mut scaled = other.values.clone();
        for (k, w) in self.grid.weights().iter().enumerate() {
            scaled.row_mut(k).scale_mut(*w);
        }
        Kernel::from_parts(self.grid.clone(), self.omega, &self.values * scaled)
    }

    /// Action on a function sampled at the nodes.
    pub fn apply(&self, f: &DVector<Complex64>) -> DVector<Complex64> {
        let wf = DVector::from_iterator(
            f.len(),
            f.iter().zip(self.grid.weights()).map(|(x, w)| x * *w),
        );
        &self.values * wf
    }

    /// Hermitian adjoint `K†(z, z') = K*(z', z)`.
    pub fn adjoint(&self) -> Kernel {
        Kernel::from_parts(self.grid.clone(), self.omega, self.values.adjoint())
    }

    pub fn transpose(&self) -> Kernel {
        Kernel::from_parts(self.grid.clone(), self.omega, self.values.transpose())
    }

    pub fn conj(&self) -> Kernel {
        Kernel::from_parts(self.grid.clone(), self.omega, self.values.map(|v| v.conj()))
    }

    pub fn scale(&self, factor: f64) -> Kernel {
        Kernel::from_parts(
            self.grid.clone(),
            self.omega,
            self.values.map(|v| v * factor),
        )
    }

    pub fn scale_complex(&self, factor: Complex64) -> Kernel {
        Kernel::from_parts(
            self.grid.clone(),
            self.omega,
            self.values.map(|v| v * factor),
        )
    }

    /// Entrywise real part, as a kernel.
    pub fn re(&self) -> Kernel {
        Kernel::from_parts(
            self.grid.clone(),
            self.omega,
            self.values.map(|v| Complex64::new(v.re, 0.0)),
        )
    }

    /// Entrywise imaginary part, as a kernel.
    pub fn im(&self) -> Kernel {
        Kernel::from_parts(
            self.grid.clone(),
            self.omega,
            self.values.map(|v| Complex64::new(v.im, 0.0)),
        )
    }

    /// `W^{1/2} K W^{1/2}`: the matrix of the operator in an orthonormal basis.
    pub fn symmetrized(&self) -> DMatrix<Complex64> {
        let sw: Vec<f64> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        DMatrix::from_fn(self.len(), self.len(), |i, j| {
            self.values[(i, j)] * (sw[i] * sw[j])
        })
    }

    /// Inverse of [`Kernel::symmetrized`].
    pub fn from_symmetrized(grid: Arc<SpatialGrid>, omega: f64, m: &DMatrix<Complex64>) -> Kernel {
        let isw: Vec<f64> = grid.weights().iter().map(|w| 1.0 / w.sqrt()).collect();
        let values = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (isw[i] * isw[j]));
        Kernel::from_parts(grid, omega, values)
    }

    /// Hilbert–Schmidt norm of the operator, `(Σ_ij w_i w_j |K_ij|²)^{1/2}`.
    pub fn hs_norm(&self) -> f64 {
        let w = self.grid.weights();
        let mut acc = 0.0;
        for j in 0..self.len() {
            for i in 0..self.len() {
                acc += w[i] * w[j] * self.values[(i, j)].norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖self − other‖ / ‖other‖` in the Hilbert–Schmidt norm. Falls back to
    /// the absolute distance when `other` vanishes.
    pub fn relative_distance(&self, other: &Kernel) -> f64 {
        let diff = (self - other).hs_norm();
        let scale = other.hs_norm();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }

    /// `‖K − Kᵀ‖ / ‖K‖`.
    pub fn reciprocity_defect(&self) -> f64 {
        relative_or_absolute(
            (&self.values - self.values.transpose()).norm(),
            self.values.norm(),
        )
    }

    /// `‖K − K†‖ / ‖K‖`.
    pub fn hermiticity_defect(&self) -> f64 {
        relative_or_absolute(
            (&self.values - self.values.adjoint()).norm(),
            self.values.norm(),
        )
    }

    /// `Σ_i w_i K_ii`, the trace of the operator.
    pub fn quadrature_trace(&self) -> Complex64 {
        self.grid
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| self.values[(i, i)] * *w)
            .sum()
    }

    /// Eigenvalues of the Hermitian part of the operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let m = self.symmetrized();
        let h = (&m + m.adjoint()).map(|v| v * 0.5);
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Indices of nodes whose row or column carries a nonzero entry.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let cut = threshold * scale;
        (0..self.len())
            .filter(|&i| {
                scale > 0.0
                    && (self.values.row(i).iter().any(|v| v.norm() > cut)
                        || self.values.column(i).iter().any(|v| v.norm() > cut))
            })
            .collect()
    }

    /// Restriction to a subset of nodes (weights are kept).
    pub fn restrict(&self, indices: &[usize]) -> Result<Kernel> {
        let grid = Arc::new(self.grid.subset(indices)?);
        let m = indices.len();
        let values = DMatrix::from_fn(m, m, |a, b| self.values[(indices[a], indices[b])]);
        Ok(Kernel::from_parts(grid, self.omega, values))
    }
}

pub(crate) fn relative_or_absolute(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

impl Add for &Kernel {
    type Output = Kernel;
    fn add(self, rhs: &Kernel) -> Kernel {
        self.assert_compatible(rhs);
        Kernel::from_parts(self.grid.clone(), self.omega, &self.values + &rhs.values)
    }
}

impl Sub for &Kernel {
    type Output = Kernel;
    fn sub(self, rhs: &Kernel) -> Kernel {
        self.assert_compatible(rhs);
        Kernel::from_parts(self.grid.clone(), self.omega, &self.values - &rhs.values)
    }
}

impl Neg for &Kernel {
    type Output = Kernel;
    fn neg(self) -> Kernel {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Kernel {
    type Output = Kernel;
    fn mul(self, rhs: f64) -> Kernel {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> Arc<SpatialGrid> {
        Arc::new(SpatialGrid::from_nodes(vec![0.0, 0.3, 0.5, 1.2, 1.3]).unwrap())
    }

    fn sample(g: &Arc<SpatialGrid>, seed: f64) -> Kernel {
        let n = g.len();
        let values = DMatrix::from_fn(n, n, |i, j| {
            c(
                (seed * (i + 2 * j) as f64).sin(),
                (seed * (3 * i + j) as f64).cos(),
            )
        });
        Kernel::new(g.clone(), 1.0, values).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let g = grid();
        let k = sample(&g, 0.7);
        let id = Kernel::identity(g.clone(), 1.0);
        assert!(id.compose(&k).relative_distance(&k) < 1e-14);
        assert!(k.compose(&id).relative_distance(&k) < 1e-14);
    }

    #[test]
    fn composition_is_associative() {
        let g = grid();
        let (a, b, d) = (sample(&g, 0.3), sample(&g, 1.1), sample(&g, 2.9));
        let left = a.compose(&b).compose(&d);
        let right = a.compose(&b.compose(&d));
        assert!(left.relative_distance(&right) < 1e-13);
    }

    #[test]
    fn local_kernel_acts_pointwise() {
        let g = grid();
        let d: Vec<Complex64> = (0..g.len()).map(|i| c(i as f64, 1.0)).collect();
        let k = Kernel::local(g.clone(), 1.0, &d).unwrap();
        let f = DVector::from_element(g.len(), c(2.0, 0.0));
        let out = k.apply(&f);
        for i in 0..g.len() {
            assert!((out[i] - d[i] * 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn trace_of_identity_counts_nodes() {
        let g = grid();
        let id = Kernel::identity(g.clone(), 1.0);
        assert!((id.quadrature_trace() - c(g.len() as f64, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn symmetrized_round_trip() {
        let g = grid();
        let k = sample(&g, 1.7);
        let back = Kernel::from_symmetrized(g.clone(), 1.0, &k.symmetrized());
        assert!(back.relative_distance(&k) < 1e-15);
    }

    #[test]
    fn restrict_and_support() {
        let g = grid();
        let d = vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(-2.0, 0.0),
            c(0.0, 0.0),
        ];
        let k = Kernel::local(g, 1.0, &d).unwrap();
        let s = k.support(1e-12);
        assert_eq!(s, vec![1, 3]);
        let r = k.restrict(&s).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.hermitian_eigenvalues(), vec![-2.0, 1.0]);
    }

    #[test]
    fn wrong_shape_rejected() {
        assert!(Kernel::new(grid(), 1.0, DMatrix::zeros(3, 3)).is_err());
    }
}
