//! Frequency quadrature: Gauss–Kronrod panels and adaptive integration of
//! matrix-valued integrands.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::media::MediumModel;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) and weights;
// the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes of the 15-point rule on `[a, b]` together with Kronrod and
/// embedded Gauss weights (zero for Kronrod-only nodes).
pub fn gk15(a: f64, b: f64) -> [(f64, f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0, 0.0); 15];
    for k in 0..7 {
        let g = if k % 2 == 1 { WG[k / 2] } else { 0.0 };
        out[2 * k] = (c - h * XGK[k], h * WGK[k], h * g);
        out[2 * k + 1] = (c + h * XGK[k], h * WGK[k], h * g);
    }
    out[14] = (c, h * WGK[7], h * WG[3]);
    out
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Entrywise compensated accumulation of complex matrices.
#[derive(Clone, Debug)]
pub struct MatrixAccumulator {
    re: Vec<CompensatedSum>,
    im: Vec<CompensatedSum>,
    rows: usize,
    cols: usize,
}

impl MatrixAccumulator {
    pub fn new(rows: usize, cols: usize) -> Self {
        MatrixAccumulator {
            re: vec![CompensatedSum::default(); rows * cols],
            im: vec![CompensatedSum::default(); rows * cols],
            rows,
            cols,
        }
    }

    pub fn add_scaled(&mut self, m: &DMatrix<Complex64>, factor: f64) {
        for (k, v) in m.iter().enumerate() {
            self.re[k].add(v.re * factor);
            self.im[k].add(v.im * factor);
        }
    }

    pub fn value(&self) -> DMatrix<Complex64> {
        DMatrix::from_iterator(
            self.rows,
            self.cols,
            self.re
                .iter()
                .zip(&self.im)
                .map(|(r, i)| Complex64::new(r.value(), i.value())),
        )
    }
}

/// Panels on `[0, Ω_max]`, each integrated with the 15-point Kronrod rule.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    breakpoints: Vec<f64>,
}

impl FrequencyGrid {
    pub fn from_breakpoints(mut breakpoints: Vec<f64>) -> Result<Self> {
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        if breakpoints.len() < 2 {
            return Err(Error::InvalidGrid(
                "frequency grid needs at least one panel".into(),
            ));
        }
        if breakpoints[0] < 0.0 || breakpoints.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidGrid(
                "frequency breakpoints must be finite and non-negative".into(),
            ));
        }
        Ok(FrequencyGrid { breakpoints })
    }

    /// `n` equal panels on `[0, Ω_max]`.
    pub fn uniform(omega_max: f64, n: usize) -> Result<Self> {
        if n == 0 || !(omega_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "bad uniform frequency grid ({omega_max}, {n})"
            )));
        }
        Self::from_breakpoints((0..=n).map(|k| omega_max * k as f64 / n as f64).collect())
    }

    /// Panels of width `γ/per_width` within 20 linewidths of every
    /// resonance, geometric panels (ratio 1.25) elsewhere.
    pub fn for_model(model: &MediumModel, omega_max: f64, per_width: usize) -> Result<Self> {
        if !(omega_max > 0.0) || per_width == 0 {
            return Err(Error::InvalidGrid("bad frequency grid request".into()));
        }
        let mut pts = vec![0.0, omega_max];
        for o in model.oscillators() {
            let step = o.gamma / per_width as f64;
            let reach = 20 * per_width as i64;
            for k in -reach..=reach {
                let w = o.omega_j + k as f64 * step;
                if w > 0.0 && w < omega_max {
                    pts.push(w);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
        let mut out = vec![0.0];
        for pair in pts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == 0.0 {
                for div in [64.0, 16.0, 4.0] {
                    out.push(b / div);
                }
            } else {
                let n = ((b / a).ln() / 1.25f64.ln()).ceil().max(1.0) as usize;
                for k in 1..n {
                    out.push(a * (b / a).powf(k as f64 / n as f64));
                }
            }
            out.push(b);
        }
        Self::from_breakpoints(out)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn panels(&self) -> Vec<(f64, f64)> {
        self.breakpoints.windows(2).map(|p| (p[0], p[1])).collect()
    }

    pub fn omega_max(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    /// Every panel split in half.
    pub fn refine(&self) -> FrequencyGrid {
        let mut pts = Vec::with_capacity(2 * self.breakpoints.len());
        for p in self.breakpoints.windows(2) {
            pts.push(p[0]);
            pts.push(0.5 * (p[0] + p[1]));
        }
        pts.push(self.omega_max());
        FrequencyGrid { breakpoints: pts }
    }

    /// Quadrature nodes in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        self.rule().into_iter().map(|(x, _, _)| x).collect()
    }

    /// Kronrod weights matching [`FrequencyGrid::nodes`].
    pub fn weights(&self) -> Vec<f64> {
        self.rule().into_iter().map(|(_, w, _)| w).collect()
    }

    fn rule(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(15 * (self.breakpoints.len() - 1));
        for (a, b) in self.panels() {
            let mut r = gk15(a, b);
            r.sort_by(|x, y| x.0.total_cmp(&y.0));
            out.extend(r);
        }
        out
    }

    /// Kronrod and embedded Gauss results for a scalar integrand.
    pub fn integrate_with_estimate<F: Fn(f64) -> f64>(&self, f: F) -> (f64, f64) {
        let mut k = CompensatedSum::default();
        let mut g = CompensatedSum::default();
        for (x, wk, wg) in self.rule() {
            let v = f(x);
            k.add(wk * v);
            if wg != 0.0 {
                g.add(wg * v);
            }
        }
        (k.value(), g.value())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            abs_tol: 0.0,
            rel_tol: 1e-9,
            max_panels: 4000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MatrixIntegral {
    pub value: DMatrix<Complex64>,
    /// Sum of per-panel `‖K15 − G7‖_F`.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: DMatrix<Complex64>,
    error: f64,
}

/// Globally adaptive Gauss–Kronrod integration of a matrix-valued function.
///
/// Each round evaluates the panels that need work through `exec`, then
/// bisects the panels carrying the largest error until the remaining
/// estimate is below half the target. Summation runs in panel
/// order, so the result does not depend on the execution mode.
pub fn integrate_matrix<F>(
    intervals: &[(f64, f64)],
    f: F,
    exec: Execution,
    opts: AdaptiveOptions,
) -> Result<MatrixIntegral>
where
    F: Fn(f64) -> Result<DMatrix<Complex64>> + Sync + Send,
{
    if intervals.is_empty() {
        return Err(Error::InvalidInput("no integration intervals".into()));
    }
    let mut pending: Vec<(f64, f64)> = intervals.to_vec();
    let mut done: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    loop {
        let fresh = exec.try_map(&pending, |&(a, b)| {
            let rule = gk15(a, b);
            let mut k: Option<MatrixAccumulator> = None;
            let mut g: Option<MatrixAccumulator> = None;
            for (x, wk, wg) in rule {
                let v = f(x)?;
                let (r, c) = v.shape();
                k.get_or_insert_with(|| MatrixAccumulator::new(r, c))
                    .add_scaled(&v, wk);
                if wg != 0.0 {
                    g.get_or_insert_with(|| MatrixAccumulator::new(r, c))
                        .add_scaled(&v, wg);
                }
            }
            let kv = k.expect("15 nodes").value();
            let error = (&kv - g.expect("7 nodes").value()).norm();
            Ok(Panel {
                a,
                b,
                value: kv,
                error,
            })
        })?;
        evaluations += 15 * fresh.len();
        done.extend(fresh);
        done.sort_by(|x, y| x.a.total_cmp(&y.a));
        let shape = done[0].value.shape();
        let mut acc = MatrixAccumulator::new(shape.0, shape.1);
        let mut err = CompensatedSum::default();
        for p in &done {
            acc.add_scaled(&p.value, 1.0);
            err.add(p.error);
        }
        let value = acc.value();
        let error = err.value();
        let tol = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= tol {
            return Ok(MatrixIntegral {
                value,
                error_estimate: error,
                evaluations,
                panels: done.len(),
            });
        }
        if done.len() >= opts.max_panels {
            return Err(Error::GridTooCoarse {
                estimate: error,
                tolerance: tol,
            });
        }
        let mut order: Vec<usize> = (0..done.len()).collect();
        order.sort_by(|&i, &j| done[j].error.total_cmp(&done[i].error));
        let mut remaining = error;
        let mut split = vec![false; done.len()];
        for &i in &order {
            if remaining <= 0.5 * tol {
                break;
            }
            split[i] = true;
            remaining -= done[i].error;
        }
        pending.clear();
        let mut keep = Vec::with_capacity(done.len());
        for (p, s) in done.into_iter().zip(split) {
            if s {
                let m = 0.5 * (p.a + p.b);
                pending.push((p.a, m));
                pending.push((m, p.b));
            } else {
                keep.push(p);
            }
        }
        done = keep;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{Layer, Oscillator};

    #[test]
    fn gk15_is_exact_for_polynomials() {
        let (mut k, mut g) = (0.0, 0.0);
        for (x, wk, wg) in gk15(-1.0, 2.0) {
            k += wk * x.powi(13);
            g += wg * x.powi(13);
        }
        let exact = (2f64.powi(14) - 1.0) / 14.0;
        assert!((k - exact).abs() < 1e-10 * exact);
        assert!((g - exact).abs() < 1e-10 * exact);
        let kw: f64 = gk15(0.0, 3.0).iter().map(|n| n.1).sum();
        let gw: f64 = gk15(0.0, 3.0).iter().map(|n| n.2).sum();
        assert!((kw - 3.0).abs() < 1e-14 && (gw - 3.0).abs() < 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn grid_nodes_and_refinement() {
        let g = FrequencyGrid::uniform(2.0, 4).unwrap();
        assert_eq!(g.nodes().len(), 60);
        assert!(g.nodes().windows(2).all(|p| p[1] > p[0]));
        let w: f64 = g.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        let r = g.refine();
        assert_eq!(r.panels().len(), 8);
        assert_eq!(r.omega_max(), 2.0);
        let (k, _) = r.integrate_with_estimate(|x| x.cos());
        assert!((k - 2f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn model_grid_resolves_resonances() {
        let m = MediumModel::new(vec![Layer::local(
            0.0,
            1.0,
            vec![Oscillator::new(1.0, 5.0, 0.1, 1.0).unwrap()],
        )])
        .unwrap();
        let g = FrequencyGrid::for_model(&m, 100.0, 4).unwrap();
        let near: Vec<_> = g
            .panels()
            .into_iter()
            .filter(|(a, b)| *a >= 4.9 && *b <= 5.1)
            .collect();
        assert!(near.iter().all(|(a, b)| b - a <= 0.025 + 1e-12));
        assert!(near.len() >= 8);
        assert_eq!(g.omega_max(), 100.0);
    }

    #[test]
    fn adaptive_matrix_integral() {
        // ∫_0^10 [1/(1+x²), e^{ix}] dx
        let f = |x: f64| -> Result<DMatrix<Complex64>> {
            Ok(DMatrix::from_row_slice(
                1,
                2,
                &[
                    Complex64::new(1.0 / (1.0 + x * x), 0.0),
                    Complex64::new(0.0, x).exp(),
                ],
            ))
        };
        for exec in [Execution::Sequential, Execution::Parallel] {
            let r = integrate_matrix(&[(0.0, 10.0)], f, exec, AdaptiveOptions::default()).unwrap();
            let exact0 = 10f64.atan();
            let exact1 = (Complex64::new(0.0, 10.0).exp() - 1.0) / Complex64::i();
            assert!((r.value[(0, 0)].re - exact0).abs() < 1e-12);
            assert!((r.value[(0, 1)] - exact1).norm() < 1e-12);
        }
        let a = integrate_matrix(
            &[(0.0, 10.0)],
            f,
            Execution::Sequential,
            AdaptiveOptions::default(),
        )
        .unwrap();
        let b = integrate_matrix(
            &[(0.0, 10.0)],
            f,
            Execution::Parallel,
            AdaptiveOptions::default(),
        )
        .unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn adaptive_gives_up_past_panel_budget() {
        let f = |x: f64| -> Result<DMatrix<Complex64>> {
            Ok(DMatrix::from_element(
                1,
                1,
                Complex64::new(1.0 / x.abs().sqrt().max(1e-300), 0.0),
            ))
        };
        let opts = AdaptiveOptions {
            rel_tol: 1e-15,
            max_panels: 20,
            ..Default::default()
        };
        let err = integrate_matrix(&[(0.0, 1.0)], f, Execution::Sequential, opts).unwrap_err();
        assert_eq!(err.code(), "grid_too_coarse");
    }
}
