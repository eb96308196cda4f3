//! Sign-partitioned noise channels.
//!
//! Channels with `σ_α > 0` carry annihilation operators, channels with
//! `σ_α < 0` creation operators. Operator statements are represented by
//! their c-number kernels: vacuum second moments and commutators.

use std::f64::consts::PI;

use nalgebra::DVectorView;

use crate::error::Result;
use crate::kernel::Kernel;
use crate::spectral::{parity_kernel, SpectralDecomposition};
use crate::units::Constants;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    /// `σ_α > 0`: annihilation operator.
    Plus,
    /// `σ_α < 0`: creation operator.
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    pub index: usize,
    pub sigma: f64,
    pub sector: Sector,
    /// `|σ_α|^{1/2}`.
    pub amplitude: f64,
    /// Frequency label of the channel operator; always the positive `ω`.
    pub frequency: f64,
}

#[derive(Clone, Debug)]
pub struct ChannelPartition {
    spec: SpectralDecomposition,
    plus: Vec<usize>,
    minus: Vec<usize>,
    dropped: Vec<usize>,
    eps_reg: f64,
}

/// Splits the spectrum by sign; `|σ_α| ≤ ε_reg` is dropped from both
/// sectors. `None` selects `1e-12 × max|σ_α|`.
pub fn partition_channels(spec: &SpectralDecomposition, eps_reg: Option<f64>) -> ChannelPartition {
    let eps = eps_reg.unwrap_or_else(|| spec.default_eps_reg());
    let (mut plus, mut minus, mut dropped) = (Vec::new(), Vec::new(), Vec::new());
    for (a, &s) in spec.eigenvalues().iter().enumerate() {
        if s.abs() <= eps {
            dropped.push(a);
        } else if s > 0.0 {
            plus.push(a);
        } else {
            minus.push(a);
        }
    }
    ChannelPartition {
        spec: spec.clone(),
        plus,
        minus,
        dropped,
        eps_reg: eps,
    }
}

impl ChannelPartition {
    pub fn omega(&self) -> f64 {
        self.spec.omega()
    }

    pub fn eps_reg(&self) -> f64 {
        self.eps_reg
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spec
    }

    fn channel(&self, a: usize, sector: Sector) -> Channel {
        let s = self.spec.eigenvalues()[a];
        Channel {
            index: a,
            sigma: s,
            sector,
            amplitude: s.abs().sqrt(),
            frequency: self.spec.omega().abs(),
        }
    }

    pub fn plus(&self) -> Vec<Channel> {
        self.plus
            .iter()
            .map(|&a| self.channel(a, Sector::Plus))
            .collect()
    }

    pub fn minus(&self) -> Vec<Channel> {
        self.minus
            .iter()
            .map(|&a| self.channel(a, Sector::Minus))
            .collect()
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn plus_count(&self) -> usize {
        self.plus.len()
    }

    pub fn minus_count(&self) -> usize {
        self.minus.len()
    }

    /// Mode function `F_α` of a channel.
    pub fn vector(&self, channel: &Channel) -> DVectorView<'_, num_complex::Complex64> {
        self.spec.vectors().column(channel.index)
    }

    /// `(ħω/π)^{1/2} |σ_α|^{1/2}`, the amplitude multiplying the bosonic
    /// operator in the noise current.
    pub fn noise_amplitude(&self, channel: &Channel, constants: &Constants) -> f64 {
        (constants.hbar * self.omega() / PI).sqrt() * channel.amplitude
    }

    fn sector_kernel(&self, sector: Sector) -> Kernel {
        let idx = match sector {
            Sector::Plus => &self.plus,
            Sector::Minus => &self.minus,
        };
        let mut keep = vec![false; self.spec.len()];
        for &a in idx {
            keep[a] = true;
        }
        self.spec.map_kernel_where(f64::abs, |a| keep[a])
    }

    /// `Σ_kept |σ_α| F_α F_α*`: the absolute-value kernel without the
    /// dropped channels.
    pub fn sigma_av(&self) -> Kernel {
        let mut keep = vec![true; self.spec.len()];
        for &a in &self.dropped {
            keep[a] = false;
        }
        self.spec.map_kernel_where(f64::abs, |a| keep[a])
    }

    /// `Σ_(−) |σ_α| F_α F_α*`.
    pub fn minus_kernel(&self) -> Kernel {
        self.sector_kernel(Sector::Minus)
    }
}

#[derive(Clone, Debug)]
pub struct NoiseCovariances {
    /// Antinormally ordered vacuum moment, from the annihilator channels.
    pub anti: Kernel,
    /// Normally ordered vacuum moment, from the creator channels.
    pub normal: Kernel,
}

/// `C_anti = (ħω/π) Σ_(+) σ_α F F*` and `C_norm = (ħω/π) Σ_(−) |σ_α| F F*`.
pub fn noise_covariances(part: &ChannelPartition, constants: &Constants) -> NoiseCovariances {
    let pref = constants.hbar * part.omega() / PI;
    NoiseCovariances {
        anti: part.sector_kernel(Sector::Plus).scale(pref),
        normal: part.sector_kernel(Sector::Minus).scale(pref),
    }
}

/// `C_anti − C_norm`, which equals `(ħω/π) σ` whatever the sign structure.
pub fn commutator_kernel(part: &ChannelPartition, constants: &Constants) -> Kernel {
    let c = noise_covariances(part, constants);
    &c.anti - &c.normal
}

/// Equal-frequency commutator kernel of the sign-adjusted field variables:
/// the parity kernel `Σ sgn(σ_α) F F*`.
pub fn parity_commutator_tilde_f(
    spec: &SpectralDecomposition,
    eps_reg: Option<f64>,
) -> Result<Kernel> {
    parity_kernel(spec, eps_reg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpectrum {
    pub omega: f64,
    /// `sgn σ_α` for every kept channel, in spectral order.
    pub signs: Vec<i8>,
    /// `ħω sgn σ_α`.
    pub energies: Vec<f64>,
    /// Some channel contributes negative energy, so the normal-ordered
    /// Hamiltonian is unbounded below.
    pub no_ground_state: bool,
}

pub fn hamiltonian_spectrum(part: &ChannelPartition, constants: &Constants) -> HamiltonianSpectrum {
    let mut signs = Vec::with_capacity(part.plus.len() + part.minus.len());
    for (a, &s) in part.spec.eigenvalues().iter().enumerate() {
        if part.dropped.contains(&a) {
            continue;
        }
        signs.push(if s > 0.0 { 1 } else { -1 });
    }
    let e = constants.hbar * part.omega();
    HamiltonianSpectrum {
        omega: part.omega(),
        energies: signs.iter().map(|&s| e * f64::from(s)).collect(),
        no_ground_state: signs.contains(&-1),
        signs,
    }
}
