//! Per-frequency pipeline: model → Q → σ → spectrum → channels → G.

use std::sync::Arc;

use num_complex::Complex64;

use crate::correlations::{
    amplification_correction, bb_spectral_density, ee_spectral_density, naive_bb_density,
    naive_fdt_density, CorrelationTensor,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::green::{
    radiation_kernel, solve_green, verify_integral_relation, GreenFunction, MaxwellOperator,
};
use crate::grid::SpatialGrid;
use crate::kernel::Kernel;
use crate::media::{build_kernel, MediumModel};
use crate::quantization::{partition_channels, ChannelPartition};
use crate::spectral::{hermitian_split, spectral_decompose, SpectralDecomposition, STRUCTURE_TOL};
use crate::units::Constants;

#[derive(Clone, Debug)]
pub struct Scene {
    pub model: MediumModel,
    pub grid: Arc<SpatialGrid>,
    pub constants: Constants,
}

#[derive(Clone, Debug)]
pub struct FrequencySample {
    pub omega: f64,
    pub q: Kernel,
    /// Hermitian part of the medium conductivity.
    pub sigma: Kernel,
    /// `σ` plus the radiation conductance of the open ends.
    pub sigma_total: Kernel,
    pub partition: ChannelPartition,
    /// Kept channels with `|σ_α|`, plus the radiation conductance.
    pub sav_total: Kernel,
    pub green: GreenFunction,
}

impl Scene {
    pub fn new(model: MediumModel, grid: Arc<SpatialGrid>, constants: Constants) -> Result<Self> {
        model.validate()?;
        model.check_grid(&grid)?;
        Ok(Scene {
            model,
            grid,
            constants,
        })
    }

    /// Everything needed at one real frequency. `eps_reg = None` uses the
    /// default cutoff relative to the largest `|σ_α|`.
    pub fn sample(&self, omega: f64, eps_reg: Option<f64>) -> Result<FrequencySample> {
        self.build(omega, |_| eps_reg)
    }

    /// Same as [`Scene::sample`] with the cutoff given relative to the
    /// largest `|σ_α|` at this frequency.
    pub fn sample_relative(&self, omega: f64, rel_eps: f64) -> Result<FrequencySample> {
        self.build(omega, |spec| Some(rel_eps * spec.max_abs()))
    }

    fn build<E>(&self, omega: f64, eps: E) -> Result<FrequencySample>
    where
        E: Fn(&SpectralDecomposition) -> Option<f64>,
    {
        let q = build_kernel(&self.model, &self.grid, omega, &self.constants)?;
        let (sigma, _) = hermitian_split(&q, STRUCTURE_TOL)?;
        let spec = spectral_decompose(&sigma, STRUCTURE_TOL)?;
        let partition = partition_channels(&spec, eps(&spec));
        let rad = radiation_kernel(&self.grid, omega, &self.constants);
        let op = MaxwellOperator::assemble(&q, &self.constants)?;
        let green = solve_green(&op)?;
        Ok(FrequencySample {
            omega,
            sigma_total: &sigma + &rad,
            sav_total: &partition.sigma_av() + &rad,
            q,
            sigma,
            partition,
            green,
        })
    }

    pub fn sweep(
        &self,
        omegas: &[f64],
        eps_reg: Option<f64>,
        exec: Execution,
    ) -> Result<Vec<FrequencySample>> {
        exec.try_map(omegas, |&w| self.sample(w, eps_reg))
    }

    /// Green function at a complex frequency.
    pub fn green_at(&self, omega: Complex64) -> Result<GreenFunction> {
        solve_green(&MaxwellOperator::from_model(
            &self.model,
            &self.grid,
            omega,
            &self.constants,
        )?)
    }
}

impl FrequencySample {
    pub fn integral_relation_residual(&self, k: &Constants) -> f64 {
        verify_integral_relation(&self.green, &self.sigma_total, self.omega, k)
    }

    pub fn ee(&self, k: &Constants) -> CorrelationTensor {
        ee_spectral_density(&self.green, &self.sav_total, self.omega, k)
    }

    pub fn bb(&self, k: &Constants) -> CorrelationTensor {
        bb_spectral_density(&self.green, &self.sav_total, self.omega, k)
    }

    pub fn naive_ee(&self, k: &Constants) -> CorrelationTensor {
        naive_fdt_density(&self.green, self.omega, k)
    }

    pub fn naive_bb(&self, k: &Constants) -> CorrelationTensor {
        naive_bb_density(&self.green, self.omega, k)
    }

    pub fn correction(&self, k: &Constants) -> CorrelationTensor {
        amplification_correction(
            &self.green,
            &self.sigma_total,
            &self.sav_total,
            self.omega,
            k,
        )
    }
}
