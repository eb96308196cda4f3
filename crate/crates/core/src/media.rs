//! Medium models: stacks of Drude–Lorentz layers with optional gain and
//! optional Gaussian nonlocality.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::kernel::Kernel;
use crate::quadrature::FrequencyGrid;
use crate::units::Constants;

/// One term `f ω_p² / (ω_j² − ω² − iγω)` of the susceptibility.
///
/// `f < 0` describes an inverted (amplifying) transition; `ω_j = 0` gives a
/// Drude term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub omega_j: f64,
    pub gamma: f64,
    pub omega_p: f64,
}

impl Oscillator {
    pub fn new(strength: f64, omega_j: f64, gamma: f64, omega_p: f64) -> Result<Self> {
        let o = Oscillator {
            strength,
            omega_j,
            gamma,
            omega_p,
        };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.strength.is_finite() {
            return Err(Error::InvalidModel(
                "oscillator strength must be finite".into(),
            ));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidModel(format!(
                "damping must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.omega_j.is_finite() && self.omega_j >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "resonance must be non-negative, got {}",
                self.omega_j
            )));
        }
        if !(self.omega_p.is_finite() && self.omega_p > 0.0) {
            return Err(Error::InvalidModel(format!(
                "plasma frequency must be positive, got {}",
                self.omega_p
            )));
        }
        Ok(())
    }

    pub fn susceptibility(&self, omega: Complex64) -> Complex64 {
        let num = self.strength * self.omega_p * self.omega_p;
        let den = Complex64::new(self.omega_j * self.omega_j, 0.0)
            - omega * omega
            - Complex64::i() * self.gamma * omega;
        num / den
    }

    pub fn is_gain(&self) -> bool {
        self.strength < 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub z_min: f64,
    pub z_max: f64,
    pub oscillators: Vec<Oscillator>,
    /// Gaussian smearing length; zero means strictly local.
    pub nonlocal_length: f64,
}

impl Layer {
    pub fn local(z_min: f64, z_max: f64, oscillators: Vec<Oscillator>) -> Self {
        Layer {
            z_min,
            z_max,
            oscillators,
            nonlocal_length: 0.0,
        }
    }

    /// Half-open membership `[z_min, z_max)`.
    pub fn contains(&self, z: f64) -> bool {
        z >= self.z_min && z < self.z_max
    }

    pub fn susceptibility(&self, omega: Complex64) -> Complex64 {
        self.oscillators
            .iter()
            .map(|o| o.susceptibility(omega))
            .sum()
    }

    pub fn has_gain(&self) -> bool {
        self.oscillators.iter().any(Oscillator::is_gain)
    }
}

/// Planar stack of layers in vacuum.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MediumModel {
    pub layers: Vec<Layer>,
}

impl MediumModel {
    pub fn vacuum() -> Self {
        MediumModel { layers: Vec::new() }
    }

    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let m = MediumModel { layers };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, layer) in self.layers.iter().enumerate() {
            if !(layer.z_min.is_finite() && layer.z_max.is_finite() && layer.z_min < layer.z_max) {
                return Err(Error::InvalidModel(format!(
                    "layer {k}: bad extent [{}, {}]",
                    layer.z_min, layer.z_max
                )));
            }
            if !(layer.nonlocal_length.is_finite() && layer.nonlocal_length >= 0.0) {
                return Err(Error::InvalidModel(format!(
                    "layer {k}: negative nonlocal length"
                )));
            }
            for o in &layer.oscillators {
                o.validate()
                    .map_err(|e| Error::InvalidModel(format!("layer {k}: {e}")))?;
            }
            if k > 0 && layer.z_min < self.layers[k - 1].z_max {
                return Err(Error::InvalidModel(format!(
                    "layer {k} overlaps or precedes layer {}",
                    k - 1
                )));
            }
        }
        Ok(())
    }

    pub fn is_vacuum(&self) -> bool {
        self.layers.iter().all(|l| l.oscillators.is_empty())
    }

    pub fn has_gain(&self) -> bool {
        self.layers.iter().any(Layer::has_gain)
    }

    pub fn layer_at(&self, z: f64) -> Option<usize> {
        self.layers.iter().position(|l| l.contains(z))
    }

    /// `ε(z, ω) = 1 + Σ_j f_j ω_p² / (ω_j² − ω² − iγ_j ω)`.
    pub fn permittivity(&self, z: f64, omega: Complex64) -> Complex64 {
        match self.layer_at(z) {
            Some(k) => 1.0 + self.layers[k].susceptibility(omega),
            None => Complex64::new(1.0, 0.0),
        }
    }

    /// Multiplies the strength of every gain oscillator by `scale`.
    pub fn scale_gain(&self, scale: f64) -> MediumModel {
        let mut out = self.clone();
        for layer in &mut out.layers {
            for o in &mut layer.oscillators {
                if o.is_gain() {
                    o.strength *= scale;
                }
            }
        }
        out
    }

    /// Highest resonance frequency in the model (the damping rate stands in
    /// for Drude terms).
    pub fn top_resonance(&self) -> Option<f64> {
        self.layers
            .iter()
            .flat_map(|l| &l.oscillators)
            .map(|o| if o.omega_j > 0.0 { o.omega_j } else { o.gamma })
            .reduce(f64::max)
    }

    /// All oscillators, for building frequency grids.
    pub fn oscillators(&self) -> impl Iterator<Item = &Oscillator> {
        self.layers.iter().flat_map(|l| &l.oscillators)
    }

    /// Layers must sit strictly inside the grid so the boundary nodes are
    /// vacuum.
    pub fn check_grid(&self, grid: &SpatialGrid) -> Result<()> {
        for l in &self.layers {
            if l.z_min <= grid.z_min() || l.z_max >= grid.z_max() {
                return Err(Error::GridMismatch {
                    z_min: l.z_min,
                    z_max: l.z_max,
                    grid_min: grid.z_min(),
                    grid_max: grid.z_max(),
                });
            }
        }
        Ok(())
    }
}

/// Unit-integral Gaussian smearing on the nodes of one layer:
/// `N_ij = g(z_i − z_j) / sqrt(s_i s_j)` with `s_i = Σ_k w_k g(z_i − z_k)`.
fn smearing(nodes: &[f64], weights: &[f64], length: f64) -> DMatrix<f64> {
    let m = nodes.len();
    let cut = 6.0 * length;
    let g = DMatrix::from_fn(m, m, |i, j| {
        let d = nodes[i] - nodes[j];
        if d.abs() > cut {
            0.0
        } else {
            (-0.5 * d * d / (length * length)).exp()
        }
    });
    let s: Vec<f64> = (0..m)
        .map(|i| (0..m).map(|k| weights[k] * g[(i, k)]).sum())
        .collect();
    DMatrix::from_fn(m, m, |i, j| g[(i, j)] / (s[i] * s[j]).sqrt())
}

/// Conductivity densities `Q_ij` at a possibly complex frequency.
pub(crate) fn conductivity_values(
    model: &MediumModel,
    grid: &SpatialGrid,
    omega: Complex64,
    constants: &Constants,
) -> DMatrix<Complex64> {
    let n = grid.len();
    let mut q = DMatrix::zeros(n, n);
    let pref = -Complex64::i() * constants.eps0 * omega;
    for layer in &model.layers {
        if layer.oscillators.is_empty() {
            continue;
        }
        let idx: Vec<usize> = (0..n)
            .filter(|&i| layer.contains(grid.nodes()[i]))
            .collect();
        if idx.is_empty() {
            continue;
        }
        let amp = pref * layer.susceptibility(omega);
        if layer.nonlocal_length > 0.0 {
            let nodes: Vec<f64> = idx.iter().map(|&i| grid.nodes()[i]).collect();
            let weights: Vec<f64> = idx.iter().map(|&i| grid.weights()[i]).collect();
            let s = smearing(&nodes, &weights, layer.nonlocal_length);
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    q[(i, j)] = amp * s[(a, b)];
                }
            }
        } else {
            for &i in &idx {
                q[(i, i)] = amp / grid.weights()[i];
            }
        }
    }
    q
}

/// Conductivity kernel `Q = −iε₀ω(ε − 1)` at real `ω`.
pub fn build_kernel(
    model: &MediumModel,
    grid: &Arc<SpatialGrid>,
    omega: f64,
    constants: &Constants,
) -> Result<Kernel> {
    model.validate()?;
    model.check_grid(grid)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidInput(format!(
            "frequency must be positive, got {omega}"
        )));
    }
    let values = conductivity_values(model, grid, Complex64::new(omega, 0.0), constants);
    Ok(Kernel::from_parts(grid.clone(), omega, values))
}

/// `max_z |ε(z, ω) − ε*(z, −ω)| / max_z |ε(z, ω)|` over the grid nodes.
pub fn check_schwarz(model: &MediumModel, grid: &SpatialGrid, omega: f64) -> f64 {
    let w = Complex64::new(omega, 0.0);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &z in grid.nodes() {
        let e = model.permittivity(z, w);
        let r = model.permittivity(z, -w).conj();
        worst = worst.max((e - r).norm());
        scale = scale.max(e.norm());
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// Test frequencies for the Kramers–Kronig check: around every resonance
/// and a few points in between, all below half the grid cutoff.
pub fn kk_test_frequencies(model: &MediumModel, omega_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for o in model.oscillators() {
        let centre = if o.omega_j > 0.0 { o.omega_j } else { o.gamma };
        for k in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            out.push(centre + k * o.gamma);
        }
        out.push(0.3 * centre);
        out.push(2.0 * centre);
    }
    out.retain(|&w| w > 0.0 && w < 0.5 * omega_max);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * b.abs().max(1.0));
    out
}

/// Residual of the Kramers–Kronig relation for every layer:
/// `max_ω |Re χ(ω) − H[Im χ](ω)| / max |χ|`.
///
/// The Hilbert transform is taken on `[0, Ω]` with the singularity
/// subtracted; beyond `Ω` the imaginary part is modelled as `b/ω + a/ω³`
/// (fitted at `Ω` and `2Ω`) and integrated in closed form. Drude poles at
/// the origin are removed first. The quadrature error is estimated from the
/// embedded Gauss rule; `GridTooCoarse` is returned if it exceeds `tolerance`.
pub fn check_kramers_kronig(
    model: &MediumModel,
    grid: &FrequencyGrid,
    test_frequencies: &[f64],
    tolerance: f64,
) -> Result<f64> {
    model.validate()?;
    let big = grid.omega_max();
    let mut worst: f64 = 0.0;
    let mut worst_err: f64 = 0.0;
    for layer in &model.layers {
        if layer.oscillators.is_empty() {
            continue;
        }
        let drude: f64 = layer
            .oscillators
            .iter()
            .filter(|o| o.omega_j == 0.0)
            .map(|o| o.strength * o.omega_p * o.omega_p / o.gamma)
            .sum();
        let chi =
            |w: f64| layer.susceptibility(Complex64::new(w, 0.0)) - Complex64::new(0.0, drude / w);
        let im = |w: f64| chi(w).im;

        let t1 = im(big) * big;
        let t2 = im(2.0 * big) * 2.0 * big;
        // t(Ω) = b + a/Ω², t(2Ω) = b + a/(4Ω²)
        let a = (t1 - t2) * 4.0 * big * big / 3.0;
        let b = t1 - a / (big * big);

        let mut scale: f64 = 0.0;
        let mut rows = Vec::with_capacity(test_frequencies.len());
        for &w in test_frequencies {
            if !(w > 0.0 && w < big) {
                return Err(Error::InvalidInput(format!(
                    "test frequency {w} outside (0, {big})"
                )));
            }
            let x = chi(w);
            scale = scale.max(x.norm());
            let im_w = x.im;
            let integrand = |v: f64| {
                let d = v - w;
                let sub = if d.abs() < 1e-300 {
                    0.0
                } else {
                    (im(v) - im_w) / d
                };
                sub + im(v) / (v + w)
            };
            let (fine, coarse) = grid.integrate_with_estimate(integrand);
            let log_term = im_w * ((big - w) / w).ln();
            let tail = kk_tail(a, b, big, w);
            let hilbert = (fine + log_term) / std::f64::consts::PI + tail;
            let err = (fine - coarse).abs() / std::f64::consts::PI;
            rows.push(((x.re - hilbert).abs(), err));
        }
        if scale > 0.0 {
            for (r, e) in rows {
                worst = worst.max(r / scale);
                worst_err = worst_err.max(e / scale);
            }
        }
    }
    if worst_err > tolerance {
        return Err(Error::GridTooCoarse {
            estimate: worst_err,
            tolerance,
        });
    }
    Ok(worst)
}

/// `(2/π) ∫_Ω^∞ x (b/x + a/x³) / (x² − ω²) dx`.
fn kk_tail(a: f64, b: f64, big: f64, w: f64) -> f64 {
    let r = w / big;
    let log = ((big + w) / (big - w)).ln();
    let b_part = b / w * log;
    let a_part = if r < 1e-2 {
        // ∫ x^-4 (1 + ω²/x² + ω⁴/x⁴) dx, the closed form cancels here
        2.0 * a
            * (1.0 / (3.0 * big.powi(3))
                + w * w / (5.0 * big.powi(5))
                + w.powi(4) / (7.0 * big.powi(7)))
    } else {
        2.0 * a / (w * w) * (log / (2.0 * w) - 1.0 / big)
    };
    (b_part + a_part) / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn slab(f: f64) -> MediumModel {
        MediumModel::new(vec![Layer::local(
            0.3,
            0.6,
            vec![Oscillator::new(f, 5.0, 0.5, 3.0).unwrap()],
        )])
        .unwrap()
    }

    #[test]
    fn vacuum_point_has_unit_permittivity() {
        assert_eq!(slab(1.0).permittivity(0.1, c(5.0, 0.0)), c(1.0, 0.0));
        assert_eq!(slab(1.0).permittivity(0.6, c(5.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn permittivity_at_resonance() {
        let o = Oscillator::new(1.0, 5.0, 0.5, 3.0).unwrap();
        let expect = c(1.0, 9.0 / (0.5 * 5.0));
        let got = slab(1.0).permittivity(0.4, c(o.omega_j, 0.0));
        assert!((got - expect).norm() < 1e-14);
        let gain = slab(-1.0).permittivity(0.4, c(5.0, 0.0));
        assert!((gain.im + 9.0 / 2.5).abs() < 1e-14);
    }

    #[test]
    fn invalid_oscillators_rejected() {
        assert!(Oscillator::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Oscillator::new(1.0, -1.0, 0.1, 1.0).is_err());
        assert!(Oscillator::new(1.0, 1.0, 0.1, 0.0).is_err());
        let o = Oscillator::new(1.0, 1.0, 0.1, 1.0).unwrap();
        assert!(MediumModel::new(vec![Layer::local(0.5, 0.4, vec![o])]).is_err());
        assert!(MediumModel::new(vec![
            Layer::local(0.1, 0.4, vec![o]),
            Layer::local(0.3, 0.6, vec![o])
        ])
        .is_err());
    }

    #[test]
    fn vacuum_kernel_is_zero() {
        let g = Arc::new(SpatialGrid::uniform(0.0, 1.0, 21).unwrap());
        let q = build_kernel(&MediumModel::vacuum(), &g, 2.0, &Constants::NATURAL).unwrap();
        assert_eq!(q.hs_norm(), 0.0);
    }

    #[test]
    fn local_kernel_matches_formula() {
        let g = Arc::new(SpatialGrid::uniform(0.0, 1.0, 21).unwrap());
        let m = slab(1.0);
        let q = build_kernel(&m, &g, 4.0, &Constants::NATURAL).unwrap();
        for i in 0..g.len() {
            let z = g.nodes()[i];
            let eps = m.permittivity(z, c(4.0, 0.0));
            let expect = 4.0 * eps.im / g.weights()[i];
            assert!((q.values()[(i, i)].re - expect).abs() < 1e-12);
            if m.layer_at(z).is_some() {
                assert!(q.values()[(i, i)].re > 0.0);
            }
        }
    }

    #[test]
    fn layer_must_be_inside_grid() {
        let g = Arc::new(SpatialGrid::uniform(0.0, 0.5, 21).unwrap());
        let err = build_kernel(&slab(1.0), &g, 1.0, &Constants::NATURAL).unwrap_err();
        assert_eq!(err.code(), "grid_mismatch");
    }

    #[test]
    fn nonlocal_kernel_is_reciprocal_and_normalized() {
        let g = Arc::new(SpatialGrid::uniform(0.0, 1.0, 81).unwrap());
        let mut m = slab(1.0);
        m.layers[0].nonlocal_length = 0.03;
        let q = build_kernel(&m, &g, 5.0, &Constants::NATURAL).unwrap();
        assert_eq!(q.reciprocity_defect(), 0.0);
        // Interior rows of the smearing integrate to roughly one.
        let chi = m.layers[0].susceptibility(c(5.0, 0.0));
        let amp = -Complex64::i() * 5.0 * chi;
        let mid = 36;
        let row: Complex64 = (0..g.len())
            .map(|j| q.values()[(mid, j)] * g.weights()[j])
            .sum();
        assert!((row / amp - 1.0).norm() < 1e-3);
    }

    #[test]
    fn schwarz_and_kk_on_lorentz_slabs() {
        let g = SpatialGrid::uniform(0.0, 1.0, 21).unwrap();
        let fg = FrequencyGrid::for_model(&slab(1.0), 400.0, 8).unwrap();
        for f in [1.0, -0.3] {
            let m = slab(f);
            assert!(check_schwarz(&m, &g, 4.7) <= 1e-14);
            let tests = kk_test_frequencies(&m, fg.omega_max());
            let r = check_kramers_kronig(&m, &fg, &tests, 1e-3).unwrap();
            assert!(r <= 1e-3, "kk residual {r}");
        }
        let vac = MediumModel::vacuum();
        assert_eq!(check_schwarz(&vac, &g, 1.0), 0.0);
        assert_eq!(check_kramers_kronig(&vac, &fg, &[1.0], 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn kk_handles_drude_terms() {
        let m = MediumModel::new(vec![Layer::local(
            0.3,
            0.6,
            vec![Oscillator::new(1.0, 0.0, 1.0, 4.0).unwrap()],
        )])
        .unwrap();
        let fg = FrequencyGrid::for_model(&m, 400.0, 8).unwrap();
        let r = check_kramers_kronig(&m, &fg, &[0.5, 1.0, 3.0], 1e-3).unwrap();
        assert!(r <= 1e-3, "kk residual {r}");
    }

    #[test]
    fn coarse_grid_is_reported() {
        let m = MediumModel::new(vec![Layer::local(
            0.3,
            0.6,
            vec![Oscillator::new(1.0, 50.0, 0.01, 3.0).unwrap()],
        )])
        .unwrap();
        let fg = FrequencyGrid::uniform(200.0, 2).unwrap();
        let err = check_kramers_kronig(&m, &fg, &[50.0], 1e-6).unwrap_err();
        assert_eq!(err.code(), "grid_too_coarse");
    }

    proptest! {
        #[test]
        fn gain_only_on_gain_nodes(
            f1 in -1.0f64..1.0, f2 in -1.0f64..1.0,
            w1 in 0.5f64..10.0, w2 in 0.5f64..10.0,
            omega in 0.1f64..20.0,
        ) {
            let m = MediumModel::new(vec![
                Layer::local(0.2, 0.4, vec![Oscillator::new(f1, w1, 0.3, 2.0).unwrap()]),
                Layer::local(0.5, 0.8, vec![Oscillator::new(f2, w2, 0.7, 1.5).unwrap()]),
            ]).unwrap();
            let g = Arc::new(SpatialGrid::uniform(0.0, 1.0, 41).unwrap());
            let q = build_kernel(&m, &g, omega, &Constants::NATURAL).unwrap();
            prop_assert_eq!(q.reciprocity_defect(), 0.0);
            for i in 0..g.len() {
                if q.values()[(i, i)].re < 0.0 {
                    let k = m.layer_at(g.nodes()[i]).unwrap();
                    prop_assert!(m.layers[k].has_gain());
                }
            }
            prop_assert!(check_schwarz(&m, &g, omega) <= 1e-14);
        }
    }
}
