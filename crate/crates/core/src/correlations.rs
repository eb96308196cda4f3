//! Vacuum field correlations, the amplification correction and the
//! equal-time commutator integral.
//!
//! Spectral densities (per unit `ω`, zero temperature):
//!
//! ```text
//! EE    = (ħμ₀²/π) ω³ G∘σ_av∘G†
//! BB    = (ħμ₀²/π) ω  D (G∘σ_av∘G†) Dᵀ
//! naive = (ħμ₀/π)  ω² Im G
//! corr  = (ħμ₀²/π) ω³ G∘(σ_av − σ)∘G†
//! ```
//!
//! `σ_av` and `σ` here include the radiation conductance of the open
//! boundaries, which is positive and so enters both identically.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::green::{derivative_matrix, solve_green, GreenFunction, MaxwellOperator};
use crate::grid::SpatialGrid;
use crate::kernel::Kernel;
use crate::media::MediumModel;
use crate::poles::PoleScan;
use crate::quadrature::{integrate_matrix, AdaptiveOptions, FrequencyGrid, MatrixAccumulator};
use crate::units::Constants;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    EE,
    BB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Built from `σ_av`; valid with or without gain.
    Full,
    /// Built from `Im G`; valid for absorbing media only.
    Naive,
    /// `Full − Naive`.
    Correction,
}

#[derive(Clone, Debug)]
pub struct CorrelationTensor {
    values: DMatrix<Complex64>,
    grid: Arc<SpatialGrid>,
    pub field: Field,
    pub variant: Variant,
    /// `Some(ω)` for a spectral density, `None` once integrated.
    pub omega: Option<f64>,
}

impl CorrelationTensor {
    pub fn new(
        values: DMatrix<Complex64>,
        grid: Arc<SpatialGrid>,
        field: Field,
        variant: Variant,
        omega: Option<f64>,
    ) -> Self {
        CorrelationTensor {
            values,
            grid,
            field,
            variant,
            omega,
        }
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn is_integrated(&self) -> bool {
        self.omega.is_none()
    }

    pub fn as_kernel(&self) -> Kernel {
        Kernel::from_parts(
            self.grid.clone(),
            self.omega.unwrap_or(0.0),
            self.values.clone(),
        )
    }

    pub fn norm(&self) -> f64 {
        self.as_kernel().hs_norm()
    }

    /// `‖a − b‖ / max(‖a‖, ‖b‖)` in the operator norm.
    pub fn relative_distance(&self, other: &CorrelationTensor) -> f64 {
        let d = (&self.as_kernel() - &other.as_kernel()).hs_norm();
        let s = self.norm().max(other.norm());
        if s > 0.0 {
            d / s
        } else {
            d
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.as_kernel().hermiticity_defect()
    }

    /// Eigenvalues of the Hermitian part in the quadrature inner product,
    /// descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.as_kernel().symmetrized();
        let h = (&m + m.adjoint()).map(|x| x * 0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Smallest eigenvalue relative to the largest magnitude; `≥ −tol`
    /// means positive semidefinite to tolerance `tol`.
    pub fn min_relative_eigenvalue(&self) -> f64 {
        let ev = self.eigenvalues();
        let scale = ev.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        if scale == 0.0 {
            0.0
        } else {
            ev[ev.len() - 1] / scale
        }
    }

    /// Number of eigenvalues above `tol × max|λ|`.
    pub fn rank(&self, tol: f64) -> usize {
        let ev = self.eigenvalues();
        let scale = ev.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        ev.iter().filter(|e| e.abs() > tol * scale).count()
    }
}

fn sandwich(g: &GreenFunction, k: &Kernel) -> Kernel {
    g.kernel().compose(k).compose(&g.kernel().adjoint())
}

fn outer_derivative(grid: &SpatialGrid, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = derivative_matrix(grid).map(|v| Complex64::new(v, 0.0));
    &d * x * d.transpose()
}

/// `(ħμ₀²/π) ω³ G∘σ_av∘G†`.
pub fn ee_spectral_density(
    g: &GreenFunction,
    sav: &Kernel,
    omega: f64,
    k: &Constants,
) -> CorrelationTensor {
    let pref = k.hbar * k.mu0 * k.mu0 / PI * omega.powi(3);
    let v = sandwich(g, sav).scale(pref).into_values();
    CorrelationTensor::new(
        v,
        g.kernel().grid().clone(),
        Field::EE,
        Variant::Full,
        Some(omega),
    )
}

/// `(ħμ₀²/π) ω D (G∘σ_av∘G†) Dᵀ`.
pub fn bb_spectral_density(
    g: &GreenFunction,
    sav: &Kernel,
    omega: f64,
    k: &Constants,
) -> CorrelationTensor {
    let pref = k.hbar * k.mu0 * k.mu0 / PI * omega;
    let grid = g.kernel().grid().clone();
    let x = sandwich(g, sav).scale(pref).into_values();
    CorrelationTensor::new(
        outer_derivative(&grid, &x),
        grid,
        Field::BB,
        Variant::Full,
        Some(omega),
    )
}

/// `(ħμ₀/π) ω² Im G`: the absorbing-media formula applied regardless of
/// the sign structure. Not physical when gain is present.
pub fn naive_fdt_density(g: &GreenFunction, omega: f64, k: &Constants) -> CorrelationTensor {
    let pref = k.hbar * k.mu0 / PI * omega * omega;
    let v = g.im().scale(pref).into_values();
    CorrelationTensor::new(
        v,
        g.kernel().grid().clone(),
        Field::EE,
        Variant::Naive,
        Some(omega),
    )
}

/// `(ħμ₀/π) D Im G Dᵀ`.
pub fn naive_bb_density(g: &GreenFunction, omega: f64, k: &Constants) -> CorrelationTensor {
    let pref = k.hbar * k.mu0 / PI;
    let grid = g.kernel().grid().clone();
    let x = g.im().scale(pref).into_values();
    CorrelationTensor::new(
        outer_derivative(&grid, &x),
        grid,
        Field::BB,
        Variant::Naive,
        Some(omega),
    )
}

/// `(ħμ₀²/π) ω³ G∘(σ_av − σ)∘G†`.
pub fn amplification_correction(
    g: &GreenFunction,
    sigma: &Kernel,
    sav: &Kernel,
    omega: f64,
    k: &Constants,
) -> CorrelationTensor {
    let pref = k.hbar * k.mu0 * k.mu0 / PI * omega.powi(3);
    let v = sandwich(g, &(sav - sigma)).scale(pref).into_values();
    CorrelationTensor::new(
        v,
        g.kernel().grid().clone(),
        Field::EE,
        Variant::Correction,
        Some(omega),
    )
}

#[derive(Clone, Debug)]
pub struct IntegratedCorrelation {
    pub tensor: CorrelationTensor,
    /// `‖K15 − G7‖` summed over panels.
    pub error_estimate: f64,
}

/// `∫ dω` of a spectral density over a fixed frequency grid.
pub fn integrate_correlation<F>(
    grid: &FrequencyGrid,
    exec: Execution,
    density: F,
) -> Result<IntegratedCorrelation>
where
    F: Fn(f64) -> Result<CorrelationTensor> + Sync + Send,
{
    let panels = exec.try_map(&grid.panels(), |&(a, b)| {
        let mut k: Option<(
            MatrixAccumulator,
            MatrixAccumulator,
            Field,
            Variant,
            Arc<SpatialGrid>,
        )> = None;
        for (w, wk, wg) in crate::quadrature::gk15(a, b) {
            let v = density(w)?;
            let (r, c) = v.values().shape();
            let acc = k.get_or_insert_with(|| {
                (
                    MatrixAccumulator::new(r, c),
                    MatrixAccumulator::new(r, c),
                    v.field,
                    v.variant,
                    v.grid().clone(),
                )
            });
            acc.0.add_scaled(v.values(), wk);
            if wg != 0.0 {
                acc.1.add_scaled(v.values(), wg);
            }
        }
        Ok(k.expect("15 nodes"))
    })?;
    let (field, variant, sgrid) = match panels.first() {
        Some(p) => (p.2, p.3, p.4.clone()),
        None => return Err(Error::InvalidInput("empty frequency grid".into())),
    };
    let n = sgrid.len();
    let mut total = MatrixAccumulator::new(n, n);
    let mut err = 0.0;
    for (k, g, ..) in &panels {
        let kv = k.value();
        err += Kernel::from_parts(sgrid.clone(), 0.0, &kv - g.value()).hs_norm();
        total.add_scaled(&kv, 1.0);
    }
    Ok(IntegratedCorrelation {
        tensor: CorrelationTensor::new(total.value(), sgrid, field, variant, None),
        error_estimate: err,
    })
}

#[derive(Clone, Debug)]
pub struct CommutatorIntegral {
    /// `2 ∫₀^∞ dω ω Im G`.
    pub value: Kernel,
    /// `π c² δ`, i.e. `π c² diag(1/w_i)`.
    pub target: Kernel,
    pub residual: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorOptions {
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for CommutatorOptions {
    fn default() -> Self {
        CommutatorOptions {
            rel_tol: 1e-8,
            max_panels: 20_000,
        }
    }
}

fn omega_im_g(
    model: &MediumModel,
    grid: &Arc<SpatialGrid>,
    omega: f64,
    k: &Constants,
) -> Result<DMatrix<Complex64>> {
    let op = MaxwellOperator::from_model(model, grid, Complex64::new(omega, 0.0), k)?;
    let g = solve_green(&op)?;
    Ok(g.values().map(|v| Complex64::new(2.0 * omega * v.im, 0.0)))
}

/// `2 ∫₀^∞ dω ω Im G(z, z', ω)` compared with `π c² δ(z − z')`.
///
/// The range `[0, Ω_max]` starts from the panels of `frequencies` and is
/// refined adaptively; beyond `Ω_max` the exact discrete Green function is
/// integrated in the variable `t = Ω_max/ω ∈ (0, 1]`, where the integrand
/// stays bounded because `Im G` falls off like `ω⁻³`.
///
/// The contour argument behind the target needs `G` analytic in the upper
/// half-plane, so a clean pole scan is required. In the transverse
/// reduction the target has no curl-free part.
pub fn commutator_integral(
    model: &MediumModel,
    grid: &Arc<SpatialGrid>,
    constants: &Constants,
    frequencies: &FrequencyGrid,
    scan: &PoleScan,
    exec: Execution,
    opts: CommutatorOptions,
) -> Result<CommutatorIntegral> {
    scan.guard(Complex64::new(scan.region.re_min, 0.0))?;
    let big = frequencies.omega_max();
    let target = Kernel::identity(grid.clone(), 0.0).scale(PI * constants.c * constants.c);
    let scale = target.values().norm();
    let adaptive = AdaptiveOptions {
        abs_tol: opts.rel_tol * scale,
        rel_tol: opts.rel_tol,
        max_panels: opts.max_panels,
    };
    let body = integrate_matrix(
        &frequencies.panels(),
        |w| omega_im_g(model, grid, w, constants),
        exec,
        adaptive,
    )?;
    let tail = integrate_matrix(
        &[(0.0, 0.5), (0.5, 1.0)],
        |t| {
            let w = big / t;
            Ok(omega_im_g(model, grid, w, constants)? * Complex64::new(big / (t * t), 0.0))
        },
        exec,
        adaptive,
    )?;
    let value = Kernel::from_parts(grid.clone(), 0.0, body.value + tail.value);
    let residual = value.relative_distance(&target);
    Ok(CommutatorIntegral {
        value,
        target,
        residual,
        error_estimate: (body.error_estimate + tail.error_estimate) / scale,
        evaluations: body.evaluations + tail.evaluations,
    })
}

/// `2 ∫₀^Ω dω ω Im g₀ = c² sin(Ω d / c) / d` for free space, `d = |z − z'|`.
pub fn vacuum_cosine_integral(distance: f64, omega_max: f64, c: f64) -> f64 {
    if distance == 0.0 {
        c * omega_max
    } else {
        c * c * (omega_max * distance / c).sin() / distance
    }
}
