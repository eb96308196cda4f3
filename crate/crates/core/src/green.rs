//! Discrete Maxwell operator of the 1-D transverse problem and its Green
//! function.
//!
//! With `W = diag(w)` and the finite-volume stiffness `S` (discrete `−∂²`),
//! the weighted operator is
//!
//! ```text
//! M(ω) = S − (ω²/c²) W − iμ₀ω W (Q + Q_rad) W
//! ```
//!
//! `Q_rad` is a radiation-conductance sheet `1/(μ₀c)` on each boundary node;
//! it is the exact outgoing closure `g' = ±i(ω/c) g`. The operator kernel is
//! `A = W⁻¹ M W⁻¹` and the Green kernel in density form is simply `M⁻¹`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::kernel::{relative_or_absolute, Kernel};
use crate::media::{conductivity_values, MediumModel};
use crate::units::Constants;

/// Condition numbers above this are treated as a singular operator.
pub const SINGULAR_CONDITION: f64 = 1e14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Outgoing radiation at both ends.
    Outgoing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Tridiagonal,
    DenseLu,
}

/// Finite-volume stiffness matrix: `∫ f' g'` on the piecewise-linear mesh.
pub fn stiffness(grid: &SpatialGrid) -> DMatrix<f64> {
    let n = grid.len();
    let mut s = DMatrix::zeros(n, n);
    for (k, h) in grid.spacings().into_iter().enumerate() {
        let a = 1.0 / h;
        s[(k, k)] += a;
        s[(k + 1, k + 1)] += a;
        s[(k, k + 1)] -= a;
        s[(k + 1, k)] -= a;
    }
    s
}

/// Radiation conductance `1/(μ₀c)` as a kernel concentrated on the two
/// boundary nodes.
pub fn radiation_kernel(grid: &Arc<SpatialGrid>, omega: f64, constants: &Constants) -> Kernel {
    let n = grid.len();
    let g = constants.radiation_conductance();
    let mut v = DMatrix::zeros(n, n);
    for b in [0, n - 1] {
        let w = grid.weights()[b];
        v[(b, b)] = Complex64::new(g / (w * w), 0.0);
    }
    Kernel::from_parts(grid.clone(), omega, v)
}

#[derive(Clone, Debug)]
pub struct MaxwellOperator {
    matrix: DMatrix<Complex64>,
    grid: Arc<SpatialGrid>,
    omega: Complex64,
    boundary: Boundary,
    banded: bool,
}

impl MaxwellOperator {
    fn build(
        grid: &Arc<SpatialGrid>,
        omega: Complex64,
        q: &DMatrix<Complex64>,
        constants: &Constants,
    ) -> Result<Self> {
        if omega.norm() == 0.0 || !omega.re.is_finite() || !omega.im.is_finite() {
            return Err(Error::InvalidInput(format!("bad frequency {omega}")));
        }
        if omega.im < 0.0 {
            return Err(Error::InvalidInput(format!(
                "retarded operator needs Im ω ≥ 0, got {omega}"
            )));
        }
        let n = grid.len();
        let w = grid.weights();
        let k2 = omega * omega / (constants.c * constants.c);
        let mut m = stiffness(grid).map(|x| Complex64::new(x, 0.0));
        let pref = -Complex64::i() * constants.mu0 * omega;
        let mut banded = true;
        for j in 0..n {
            for i in 0..n {
                let qij = q[(i, j)];
                if qij != Complex64::new(0.0, 0.0) {
                    m[(i, j)] += pref * w[i] * qij * w[j];
                    if i.abs_diff(j) > 1 {
                        banded = false;
                    }
                }
            }
            m[(j, j)] -= k2 * w[j];
        }
        let rad = -Complex64::i() * omega / constants.c;
        m[(0, 0)] += rad;
        m[(n - 1, n - 1)] += rad;
        Ok(MaxwellOperator {
            matrix: m,
            grid: grid.clone(),
            omega,
            boundary: Boundary::Outgoing,
            banded,
        })
    }

    /// Operator at real `ω` for an arbitrary conductivity kernel.
    pub fn assemble(q: &Kernel, constants: &Constants) -> Result<Self> {
        Self::build(
            q.grid(),
            Complex64::new(q.omega(), 0.0),
            q.values(),
            constants,
        )
    }

    /// Operator at complex `ω`, using the analytic continuation of the
    /// model's conductivity.
    pub fn from_model(
        model: &MediumModel,
        grid: &Arc<SpatialGrid>,
        omega: Complex64,
        constants: &Constants,
    ) -> Result<Self> {
        model.validate()?;
        model.check_grid(grid)?;
        let q = conductivity_values(model, grid, omega, constants);
        Self::build(grid, omega, &q, constants)
    }

    /// The weighted matrix `M = W A W`.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Operator kernel `A = W⁻¹ M W⁻¹`.
    pub fn kernel(&self) -> Kernel {
        let w = self.grid.weights();
        let v = DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(i, j)] / (w[i] * w[j])
        });
        Kernel::from_parts(self.grid.clone(), self.omega.re, v)
    }

    /// `A ∘ g` for a kernel `g` sampled on the same grid.
    pub fn apply_kernel(&self, g: &DMatrix<Complex64>) -> Kernel {
        let w = self.grid.weights();
        let mg = &self.matrix * g;
        let v = DMatrix::from_fn(mg.nrows(), mg.ncols(), |i, j| mg[(i, j)] / w[i]);
        Kernel::from_parts(self.grid.clone(), self.omega.re, v)
    }

    pub fn reciprocity_defect(&self) -> f64 {
        relative_or_absolute(
            (&self.matrix - self.matrix.transpose()).norm(),
            self.matrix.norm(),
        )
    }

    /// Smallest singular value of `M`.
    pub fn smallest_singular_value(&self) -> f64 {
        self.matrix
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_tridiagonal(&self) -> bool {
        self.banded
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenDiagnostics {
    /// `‖M‖₁ ‖M⁻¹‖₁`.
    pub condition: f64,
    pub boundary: Boundary,
    pub solver: Solver,
    /// `max |M G − I|`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct GreenFunction {
    kernel: Kernel,
    omega: Complex64,
    diagnostics: GreenDiagnostics,
}

impl GreenFunction {
    /// Density values `G(z_i, z_j)`.
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        self.kernel.values()
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn diagnostics(&self) -> &GreenDiagnostics {
        &self.diagnostics
    }

    pub fn reciprocity_defect(&self) -> f64 {
        self.kernel.reciprocity_defect()
    }

    /// Entrywise imaginary part; equals `(G − G†)/(2i)` for reciprocal `G`.
    pub fn im(&self) -> Kernel {
        self.kernel.im()
    }
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse of a tridiagonal matrix column by column (Thomas algorithm,
/// no pivoting). Returns `None` on a vanishing pivot.
fn tridiagonal_inverse(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = m.nrows();
    let zero = Complex64::new(0.0, 0.0);
    let scale = m.amax_complex();
    let mut cp = vec![zero; n];
    let mut piv = vec![zero; n];
    for i in 0..n {
        let lower = if i > 0 { m[(i, i - 1)] } else { zero };
        let d = m[(i, i)] - if i > 0 { lower * cp[i - 1] } else { zero };
        if d.norm() <= 1e-14 * scale {
            return None;
        }
        piv[i] = d;
        if i + 1 < n {
            cp[i] = m[(i, i + 1)] / d;
        }
    }
    let mut inv = DMatrix::zeros(n, n);
    let mut y = vec![zero; n];
    for j in 0..n {
        // forward: y_i = (e_j,i − l_i y_{i−1}) / piv_i, zero before j
        for yi in y.iter_mut().take(j) {
            *yi = zero;
        }
        for i in j..n {
            let rhs = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                zero
            };
            let prev = if i > j {
                m[(i, i - 1)] * y[i - 1]
            } else {
                zero
            };
            y[i] = (rhs - prev) / piv[i];
        }
        let mut col = inv.column_mut(j);
        col[n - 1] = y[n - 1];
        for i in (0..n - 1).rev() {
            col[i] = y[i] - cp[i] * col[i + 1];
        }
    }
    Some(inv)
}

trait AmaxComplex {
    fn amax_complex(&self) -> f64;
}

impl AmaxComplex for DMatrix<Complex64> {
    fn amax_complex(&self) -> f64 {
        self.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

fn residual(m: &DMatrix<Complex64>, inv: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    (m * inv - DMatrix::<Complex64>::identity(n, n)).amax_complex()
}

/// Same as [`residual`] for tridiagonal `m`, in `O(N²)`.
fn banded_residual(m: &DMatrix<Complex64>, inv: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let mut v = m[(i, i)] * inv[(i, j)];
            if i > 0 {
                v += m[(i, i - 1)] * inv[(i - 1, j)];
            }
            if i + 1 < n {
                v += m[(i, i + 1)] * inv[(i + 1, j)];
            }
            if i == j {
                v -= 1.0;
            }
            worst = worst.max(v.norm());
        }
    }
    worst
}

/// `G = M⁻¹`, via the tridiagonal fast path for local media and a dense LU
/// otherwise.
pub fn solve_green(op: &MaxwellOperator) -> Result<GreenFunction> {
    let m = &op.matrix;
    let singular = |condition: f64| Error::SingularOperator {
        omega: op.omega,
        condition,
    };
    let mut solved = None;
    if op.banded {
        if let Some(inv) = tridiagonal_inverse(m) {
            let r = banded_residual(m, &inv);
            if r.is_finite() && r < 1e-9 {
                solved = Some((inv, Solver::Tridiagonal, r));
            }
        }
    }
    let (inv, solver, res) = match solved {
        Some(s) => s,
        None => {
            let inv = m
                .clone()
                .lu()
                .try_inverse()
                .ok_or_else(|| singular(f64::INFINITY))?;
            let r = residual(m, &inv);
            (inv, Solver::DenseLu, r)
        }
    };
    let condition = one_norm(m) * one_norm(&inv);
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(singular(condition));
    }
    Ok(GreenFunction {
        kernel: Kernel::from_parts(op.grid.clone(), op.omega.re, inv),
        omega: op.omega,
        diagnostics: GreenDiagnostics {
            condition,
            boundary: op.boundary,
            solver,
            residual: res,
        },
    })
}

/// `‖μ₀ω G∘σ∘G† − Im G‖ / ‖Im G‖`.
///
/// `sigma` must contain every dissipative channel of the operator,
/// including the radiation conductance (see [`radiation_kernel`]).
pub fn verify_integral_relation(
    g: &GreenFunction,
    sigma: &Kernel,
    omega: f64,
    constants: &Constants,
) -> f64 {
    let lhs = g
        .kernel
        .compose(sigma)
        .compose(&g.kernel.adjoint())
        .scale(constants.mu0 * omega);
    let img = g.im();
    lhs.relative_distance(&img)
}

/// `g₀(z, z') = (ic/2ω) e^{iω|z−z'|/c}` on the grid nodes.
pub fn free_space_green(
    grid: &SpatialGrid,
    omega: f64,
    constants: &Constants,
) -> DMatrix<Complex64> {
    let z = grid.nodes();
    let c = constants.c;
    let pref = Complex64::new(0.0, c / (2.0 * omega));
    DMatrix::from_fn(z.len(), z.len(), |i, j| {
        pref * Complex64::new(0.0, omega * (z[i] - z[j]).abs() / c).exp()
    })
}

/// Discrete `∂/∂z`: central differences inside, one-sided at the ends.
pub fn derivative_matrix(grid: &SpatialGrid) -> DMatrix<f64> {
    let z = grid.nodes();
    let n = z.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let (a, b) = if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let h = z[b] - z[a];
        d[(i, b)] += 1.0 / h;
        d[(i, a)] -= 1.0 / h;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{build_kernel, Layer, Oscillator};
    use crate::spectral::hermitian_split;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn slab(f: f64) -> MediumModel {
        MediumModel::new(vec![Layer::local(
            0.305,
            0.505,
            vec![Oscillator::new(f, 5.0, 0.5, 3.0).unwrap()],
        )])
        .unwrap()
    }

    fn grid(n: usize) -> Arc<SpatialGrid> {
        Arc::new(SpatialGrid::uniform(0.0, 0.01 * (n - 1) as f64, n).unwrap())
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let g = SpatialGrid::from_nodes(vec![0.0, 0.2, 0.5, 0.6, 1.0]).unwrap();
        let s = stiffness(&g);
        for i in 0..5 {
            assert!(s.row(i).sum().abs() < 1e-12);
        }
        assert_eq!(s, s.transpose());
    }

    #[test]
    fn vacuum_matches_free_space() {
        let g = Arc::new(SpatialGrid::uniform(0.0, 1.0, 513).unwrap());
        let k = Constants::NATURAL;
        for omega in [0.25, 0.5, 1.0] {
            let op =
                MaxwellOperator::from_model(&MediumModel::vacuum(), &g, c(omega, 0.0), &k).unwrap();
            let gf = solve_green(&op).unwrap();
            assert_eq!(gf.diagnostics().solver, Solver::Tridiagonal);
            let g0 = free_space_green(&g, omega, &k);
            let n = g.len();
            let mut worst: f64 = 0.0;
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    worst =
                        worst.max((gf.values()[(i, j)] - g0[(i, j)]).norm() / g0[(i, j)].norm());
                }
            }
            assert!(worst < 1e-6, "omega {omega}: {worst}");
        }
    }

    #[test]
    fn imaginary_axis_gives_positive_definite_operator() {
        let g = grid(40);
        let op = MaxwellOperator::from_model(
            &MediumModel::vacuum(),
            &g,
            c(0.0, 2.0),
            &Constants::NATURAL,
        )
        .unwrap();
        let m = op.matrix();
        assert!(m.iter().all(|x| x.im.abs() < 1e-15));
        let re = m.map(|x| x.re);
        assert_eq!(re, re.transpose());
        let ev = nalgebra::SymmetricEigen::new(re).eigenvalues;
        assert!(ev.iter().all(|&e| e > 0.0));
    }

    #[test]
    fn integral_relation_with_radiation_closure() {
        let g = grid(81);
        let k = Constants::NATURAL;
        for (model, omega) in [
            (slab(1.0), 4.7),
            (slab(-0.05), 5.0),
            (MediumModel::vacuum(), 3.0),
        ] {
            let q = build_kernel(&model, &g, omega, &k).unwrap();
            let op = MaxwellOperator::assemble(&q, &k).unwrap();
            assert!(op.reciprocity_defect() < 1e-15);
            let gf = solve_green(&op).unwrap();
            assert!(gf.reciprocity_defect() < 1e-12);
            let (sigma, _) = hermitian_split(&q, 1e-12).unwrap();
            let total = &sigma + &radiation_kernel(&g, omega, &k);
            let r = verify_integral_relation(&gf, &total, omega, &k);
            assert!(r < 1e-10, "residual {r}");
            // the medium alone misses the flux through the boundaries
            assert!(verify_integral_relation(&gf, &sigma, omega, &k) > 1e-3);
        }
    }

    #[test]
    fn operator_inverts_to_identity_kernel() {
        let g = grid(81);
        let k = Constants::NATURAL;
        let q = build_kernel(&slab(1.0), &g, 4.0, &k).unwrap();
        let op = MaxwellOperator::assemble(&q, &k).unwrap();
        let gf = solve_green(&op).unwrap();
        let id = Kernel::identity(g.clone(), 4.0);
        assert!(op.apply_kernel(gf.values()).relative_distance(&id) < 1e-12);
        assert!(op.kernel().compose(gf.kernel()).relative_distance(&id) < 1e-12);
    }

    #[test]
    fn dense_path_agrees_with_tridiagonal() {
        let g = grid(81);
        let k = Constants::NATURAL;
        let q = build_kernel(&slab(1.0), &g, 4.0, &k).unwrap();
        let op = MaxwellOperator::assemble(&q, &k).unwrap();
        let fast = solve_green(&op).unwrap();
        let mut dense = op.clone();
        dense.banded = false;
        let slow = solve_green(&dense).unwrap();
        assert_eq!(slow.diagnostics().solver, Solver::DenseLu);
        assert!(fast.kernel().relative_distance(slow.kernel()) < 1e-12);
    }

    #[test]
    fn nonlocal_medium_uses_dense_solver() {
        let g = grid(60);
        let k = Constants::NATURAL;
        let mut m = slab(1.0);
        m.layers[0].nonlocal_length = 0.02;
        let q = build_kernel(&m, &g, 4.0, &k).unwrap();
        let gf = solve_green(&MaxwellOperator::assemble(&q, &k).unwrap()).unwrap();
        assert_eq!(gf.diagnostics().solver, Solver::DenseLu);
        assert!(gf.reciprocity_defect() < 1e-10);
    }

    #[test]
    fn schwarz_reflection_of_green() {
        let g = grid(60);
        let k = Constants::NATURAL;
        let m = slab(-0.05);
        let plus =
            solve_green(&MaxwellOperator::from_model(&m, &g, c(4.5, 0.0), &k).unwrap()).unwrap();
        let minus =
            solve_green(&MaxwellOperator::from_model(&m, &g, c(-4.5, 0.0), &k).unwrap()).unwrap();
        assert!(minus.kernel().relative_distance(&plus.kernel().conj()) < 1e-12);
    }

    #[test]
    fn high_frequency_limit() {
        let g = grid(128);
        let k = Constants::NATURAL;
        let omega = 1.0e4;
        let q = build_kernel(&slab(1.0), &g, omega, &k).unwrap();
        let gf = solve_green(&MaxwellOperator::assemble(&q, &k).unwrap()).unwrap();
        let id = Kernel::identity(g.clone(), omega);
        let r = (&gf.kernel().scale(omega * omega) + &id).hs_norm() / id.hs_norm();
        assert!(r < 0.05, "{r}");
    }

    #[test]
    fn lower_half_plane_rejected() {
        let g = grid(10);
        assert!(MaxwellOperator::from_model(
            &MediumModel::vacuum(),
            &g,
            c(1.0, -0.1),
            &Constants::NATURAL
        )
        .is_err());
    }

    #[test]
    fn derivative_is_exact_on_linear_functions() {
        let g = SpatialGrid::from_nodes(vec![0.0, 0.1, 0.3, 0.35, 0.8]).unwrap();
        let d = derivative_matrix(&g);
        let f = nalgebra::DVector::from_iterator(5, g.nodes().iter().map(|z| 3.0 * z - 1.0));
        assert!((d * f).iter().all(|v| (v - 3.0).abs() < 1e-12));
    }
}
