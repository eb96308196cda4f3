//! Continuum transfer matrices for planar stacks.
//!
//! The field state is `(E, E')`. Across a homogeneous slab of thickness `d`
//! with wavenumber `k = (ω/c) sqrt(ε)` it evolves with the characteristic
//! matrix `[[cos kd, sin kd / k], [−k sin kd, cos kd]]`. This is independent
//! of the finite-difference operator and serves as its oracle for cavity
//! poles and lasing thresholds. Nonlocal smearing is ignored here.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::media::{Layer, MediumModel};
use crate::units::Constants;

fn layer_chi(layer: &Layer, omega: Complex64, gain_scale: Complex64) -> Complex64 {
    layer
        .oscillators
        .iter()
        .map(|o| {
            let x = o.susceptibility(omega);
            if o.is_gain() {
                x * gain_scale
            } else {
                x
            }
        })
        .sum()
}

fn characteristic(k: Complex64, d: f64) -> Matrix2<Complex64> {
    let kd = k * d;
    let (s, c) = (kd.sin(), kd.cos());
    let sinc = if k.norm() * d.abs() < 1e-8 {
        Complex64::new(d, 0.0)
    } else {
        s / k
    };
    Matrix2::new(c, sinc, -k * s, c)
}

/// Homogeneous segments `(z0, z1, ε)` covering `[a, b]`, vacuum in gaps.
fn segments(
    model: &MediumModel,
    a: f64,
    b: f64,
    omega: Complex64,
    gain_scale: Complex64,
) -> Vec<(f64, f64, Complex64)> {
    let mut out = Vec::new();
    let mut z = a;
    for layer in &model.layers {
        let (l0, l1) = (layer.z_min.max(a), layer.z_max.min(b));
        if l1 <= l0 {
            continue;
        }
        if l0 > z {
            out.push((z, l0, Complex64::new(1.0, 0.0)));
        }
        out.push((l0, l1, 1.0 + layer_chi(layer, omega, gain_scale)));
        z = l1;
    }
    if b > z {
        out.push((z, b, Complex64::new(1.0, 0.0)));
    }
    out
}

/// Transfer matrix carrying `(E, E')` from `a` to `b` (either order).
pub fn propagate(
    model: &MediumModel,
    a: f64,
    b: f64,
    omega: Complex64,
    gain_scale: Complex64,
    constants: &Constants,
) -> Matrix2<Complex64> {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let k0 = omega / constants.c;
    let mut t = Matrix2::identity();
    let segs = segments(model, lo, hi, omega, gain_scale);
    if sign > 0.0 {
        for (z0, z1, eps) in segs {
            t = characteristic(k0 * eps.sqrt(), z1 - z0) * t;
        }
    } else {
        for (z0, z1, eps) in segs.into_iter().rev() {
            t = characteristic(k0 * eps.sqrt(), z0 - z1) * t;
        }
    }
    t
}

fn extent(model: &MediumModel) -> (f64, f64) {
    match (model.layers.first(), model.layers.last()) {
        (Some(f), Some(l)) => (f.z_min, l.z_max),
        _ => (0.0, 0.0),
    }
}

/// Zero exactly at the resonances of the open stack: the left-outgoing
/// solution `(1, −ik₀)` must arrive right-outgoing.
pub fn pole_determinant(
    model: &MediumModel,
    omega: Complex64,
    gain_scale: Complex64,
    constants: &Constants,
) -> Complex64 {
    let (a, b) = extent(model);
    let k0 = omega / constants.c;
    let v = propagate(model, a, b, omega, gain_scale, constants)
        * Vector2::new(Complex64::new(1.0, 0.0), -Complex64::i() * k0);
    v[1] - Complex64::i() * k0 * v[0]
}

/// Reference plane for a mirror cavity: the left face of the first gain
/// layer, provided lossy layers exist on both sides of it.
pub fn cavity_reference(model: &MediumModel) -> Option<f64> {
    let k = model.layers.iter().position(|l| l.has_gain())?;
    let passive = |l: &Layer| !l.oscillators.is_empty() && !l.has_gain();
    let left = model.layers[..k].iter().any(passive);
    let right = model.layers[k + 1..].iter().any(passive);
    (left && right).then_some(model.layers[k].z_min)
}

/// Round-trip factor `r_L r_R` at the vacuum reference plane `z_ref`.
///
/// `r_L` is the reflection of everything left of the plane for a wave
/// travelling left, `r_R` that of everything right of it (gain included).
/// Poles of the stack are exactly the solutions of `r_L r_R = 1`; at real
/// `ω`, `|r_L r_R| ≥ 1` means net gain per round trip.
pub fn round_trip(
    model: &MediumModel,
    z_ref: f64,
    omega: Complex64,
    gain_scale: Complex64,
    constants: &Constants,
) -> Complex64 {
    let (a, b) = extent(model);
    let (a, b) = (a.min(z_ref), b.max(z_ref));
    let ik = Complex64::i() * omega / constants.c;
    let one = Complex64::new(1.0, 0.0);
    let left = propagate(model, a, z_ref, omega, gain_scale, constants) * Vector2::new(one, -ik);
    let right = propagate(model, b, z_ref, omega, gain_scale, constants) * Vector2::new(one, ik);
    let yl = left[1] / left[0];
    let yr = right[1] / right[0];
    let rl = (ik + yl) / (ik - yl);
    let rr = (ik - yr) / (ik + yr);
    rl * rr
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    /// Gain scale at which a pole reaches the real axis.
    pub scale: f64,
    /// Real lasing frequency.
    pub omega: f64,
}

/// Solves `D(ω, s) = 0` for complex `s` at fixed real `ω` by secant steps.
fn scale_at(
    model: &MediumModel,
    omega: f64,
    guess: Complex64,
    constants: &Constants,
) -> Option<Complex64> {
    let w = Complex64::new(omega, 0.0);
    let d = |s: Complex64| pole_determinant(model, w, s, constants);
    let mut s0 = guess;
    let mut s1 = guess * 1.01 + 1e-3;
    let mut f0 = d(s0);
    let mut f1 = d(s1);
    for _ in 0..100 {
        let den = f1 - f0;
        if den.norm() == 0.0 {
            break;
        }
        let s2 = s1 - f1 * (s1 - s0) / den;
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = d(s1);
        if (s1 - s0).norm() <= 1e-14 * s1.norm().max(1e-300) {
            return s1.re.is_finite().then_some(s1);
        }
    }
    None
}

/// Lowest positive gain scale at which the stack acquires a real-frequency
/// pole inside `[omega_lo, omega_hi]`.
///
/// For each real `ω` on a mesh the complex scale `s(ω)` solving
/// `D(ω, s) = 0` is tracked by continuation; sign changes of `Im s` are
/// bisected and the smallest positive `Re s` wins.
pub fn lasing_threshold(
    model: &MediumModel,
    omega_lo: f64,
    omega_hi: f64,
    samples: usize,
    constants: &Constants,
) -> Option<Threshold> {
    let n = samples.max(2);
    let mut prev: Option<(f64, Complex64)> = None;
    let mut guess = Complex64::new(1.0, 0.0);
    let mut best: Option<Threshold> = None;
    for k in 0..n {
        let w = omega_lo + (omega_hi - omega_lo) * k as f64 / (n - 1) as f64;
        let s = match scale_at(model, w, guess, constants)
            .or_else(|| scale_at(model, w, Complex64::new(1.0, 0.0), constants))
        {
            Some(s) => s,
            None => {
                prev = None;
                continue;
            }
        };
        guess = s;
        if let Some((wp, sp)) = prev {
            if sp.im.signum() != s.im.signum() && (s - sp).norm() < 0.5 * (s.norm() + sp.norm()) {
                let (mut a, mut b, mut sa) = (wp, w, sp);
                let mut sm = s;
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    match scale_at(model, m, sa, constants) {
                        Some(x) => sm = x,
                        None => break,
                    }
                    if sm.im.signum() == sa.im.signum() {
                        a = m;
                        sa = sm;
                    } else {
                        b = m;
                    }
                }
                let t = Threshold {
                    scale: sm.re,
                    omega: 0.5 * (a + b),
                };
                if t.scale > 0.0 && best.is_none_or(|bt| t.scale < bt.scale) {
                    best = Some(t);
                }
            }
        }
        prev = Some((w, s));
    }
    best
}
