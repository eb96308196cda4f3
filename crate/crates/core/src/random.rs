//! Seeded random kernels for property suites.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::grid::SpatialGrid;
use crate::kernel::Kernel;

/// Haar-ish random unitary from the QR factor of a complex matrix with
/// uniform entries.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    a.qr().q()
}

/// Hermitian kernel with the given eigenvalues and random eigenvectors.
pub fn kernel_with_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    grid: Arc<SpatialGrid>,
    omega: f64,
    eigenvalues: &[f64],
) -> Kernel {
    let n = grid.len();
    assert_eq!(eigenvalues.len(), n);
    let u = random_unitary(rng, n);
    let mut scaled = u.clone();
    for (k, s) in eigenvalues.iter().enumerate() {
        scaled.column_mut(k).scale_mut(*s);
    }
    let m = scaled * u.adjoint();
    let m = (&m + m.adjoint()).map(|x| x * 0.5);
    Kernel::from_symmetrized(grid, omega, &m)
}

/// Random eigenvalues with `|σ| ∈ [0.05, 1]`. A channel is positive with
/// probability `(1 + bias)/2`, so `bias = 1` gives a positive spectrum and
/// `bias = −1` a negative one.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, n: usize, bias: f64) -> Vec<f64> {
    let p = (0.5 * (1.0 + bias)).clamp(0.0, 1.0);
    (0..n)
        .map(|_| {
            let mag = rng.random_range(0.05..1.0);
            if rng.random_bool(p) {
                mag
            } else {
                -mag
            }
        })
        .collect()
}

/// Well-conditioned random Hermitian kernel; see [`random_spectrum`].
pub fn random_hermitian<R: Rng + ?Sized>(
    rng: &mut R,
    grid: Arc<SpatialGrid>,
    omega: f64,
    bias: f64,
) -> Kernel {
    let ev = random_spectrum(rng, grid.len(), bias);
    kernel_with_spectrum(rng, grid, omega, &ev)
}

/// Grid with `n` jittered nodes on `[0, 1]` and trapezoid weights.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Arc<SpatialGrid> {
    let mut z = 0.0;
    let nodes: Vec<f64> = (0..n)
        .map(|_| {
            z += rng.random_range(0.5..1.5);
            z
        })
        .collect();
    let len = nodes[n - 1];
    Arc::new(
        SpatialGrid::from_nodes(nodes.into_iter().map(|x| x / len).collect())
            .expect("increasing nodes"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(&mut rng, 10);
        let e = (u.adjoint() * &u - DMatrix::<Complex64>::identity(10, 10)).camax();
        assert!(e < 1e-13);
    }

    #[test]
    fn prescribed_spectrum_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_grid(&mut rng, 6);
        let ev = [-0.7, -0.1, 0.2, 0.3, 0.9, 1.0];
        let k = kernel_with_spectrum(&mut rng, g, 1.0, &ev);
        assert!(k.hermiticity_defect() < 1e-15);
        for (a, b) in k.hermitian_eigenvalues().iter().zip(ev) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = Arc::new(SpatialGrid::uniform(0.0, 1.0, 5).unwrap());
        let a = random_hermitian(&mut ChaCha8Rng::seed_from_u64(9), g.clone(), 1.0, 0.0);
        let b = random_hermitian(&mut ChaCha8Rng::seed_from_u64(9), g, 1.0, 0.0);
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn bias_controls_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(random_spectrum(&mut rng, 50, 1.0).iter().all(|&s| s > 0.0));
        assert!(random_spectrum(&mut rng, 50, -1.0).iter().all(|&s| s < 0.0));
    }
}
