//! Upper-half-plane pole search for the Green function.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::green::MaxwellOperator;
use crate::grid::SpatialGrid;
use crate::media::MediumModel;
use crate::transfer::{cavity_reference, round_trip};
use crate::units::Constants;

/// Rectangle `[re_min, re_max] × [im_min, im_max]` with `im_min ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Region {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min > self.im_max || self.im_min < 0.0 {
            return Err(Error::InvalidInput(format!(
                "bad pole-scan region {self:?}"
            )));
        }
        Ok(())
    }

    pub fn contains(&self, w: Complex64) -> bool {
        w.re >= self.re_min && w.re <= self.re_max && w.im >= self.im_min && w.im <= self.im_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub n_re: usize,
    pub n_im: usize,
    /// Candidates below `threshold × median σ_min` are flagged.
    pub threshold: f64,
    pub newton_steps: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            n_re: 61,
            n_im: 7,
            threshold: 1e-6,
            newton_steps: 60,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleCandidate {
    /// Mesh point where the local minimum was found.
    pub start: Complex64,
    /// Position after Newton polishing.
    pub omega: Complex64,
    pub sigma_min: f64,
    pub converged: bool,
    /// `|r_L r_R|` at `Re ω` for mirror cavities.
    pub round_trip_gain: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PoleScan {
    pub region: Region,
    pub mesh_median: f64,
    pub candidates: Vec<PoleCandidate>,
    /// Candidates inside the region whose `σ_min` falls below the threshold.
    pub flagged: Vec<Complex64>,
    /// Largest `|r_L r_R|` along the real edge of the mesh, with its
    /// frequency, for mirror cavities.
    pub max_round_trip: Option<(f64, f64)>,
    pub evaluations: usize,
}

impl PoleScan {
    pub fn is_clean(&self) -> bool {
        self.flagged.is_empty()
    }

    /// `round_trip_gain ≥ 1` anywhere on the real axis of the mesh.
    pub fn round_trip_flag(&self) -> bool {
        self.max_round_trip.is_some_and(|(g, _)| g >= 1.0)
    }

    /// Fails with `AnalyticityViolation` unless the scan is clean and
    /// `omega` lies inside the scanned region.
    pub fn guard(&self, omega: Complex64) -> Result<()> {
        if !self.is_clean() {
            return Err(Error::AnalyticityViolation {
                poles: self.flagged.clone(),
            });
        }
        if omega.im > 0.0 && !self.region.contains(omega) {
            return Err(Error::InvalidInput(format!(
                "frequency {omega} lies outside the scanned region"
            )));
        }
        Ok(())
    }
}

fn sigma_min(
    model: &MediumModel,
    grid: &Arc<SpatialGrid>,
    w: Complex64,
    k: &Constants,
) -> Result<f64> {
    Ok(MaxwellOperator::from_model(model, grid, w, k)?.smallest_singular_value())
}

/// Damped Newton iteration on `det M(ω)`: `ω ← ω − 1/tr(M⁻¹ M')`.
fn polish(
    model: &MediumModel,
    grid: &Arc<SpatialGrid>,
    start: Complex64,
    max_step: f64,
    steps: usize,
    k: &Constants,
) -> Result<(Complex64, bool)> {
    let mut w = start;
    for _ in 0..steps {
        let m = MaxwellOperator::from_model(model, grid, w, k)?;
        let h = 1e-6 * w.norm().max(1.0);
        let lo = w - h;
        // keep the difference stencil in the closed upper half-plane
        let (a, b, span) = if lo.im < 0.0 || (w - Complex64::new(0.0, h)).im < 0.0 {
            (w, w + h, h)
        } else {
            (lo, w + h, 2.0 * h)
        };
        let ma = MaxwellOperator::from_model(model, grid, a, k)?;
        let mb = MaxwellOperator::from_model(model, grid, b, k)?;
        let dm = (mb.matrix() - ma.matrix()) / Complex64::new(span, 0.0);
        let inv = match m.matrix().clone().lu().try_inverse() {
            Some(x) => x,
            None => return Ok((w, true)),
        };
        let tr = (inv * dm).trace();
        if tr.norm() == 0.0 || !tr.re.is_finite() {
            return Ok((w, false));
        }
        let mut step = 1.0 / tr;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        let next = w - step;
        if next.im < 0.0 {
            // the retarded operator is only defined above the real axis
            return Ok((w, false));
        }
        w = next;
        if step.norm() <= 1e-12 * w.norm() {
            return Ok((w, true));
        }
    }
    Ok((w, false))
}

/// Scans `σ_min(M(ω))` on a mesh over `region`, polishes every local
/// minimum with Newton's method and flags those that land inside the region
/// with `σ_min < threshold × median`.
pub fn pole_scan(
    model: &MediumModel,
    grid: &Arc<SpatialGrid>,
    constants: &Constants,
    region: Region,
    opts: ScanOptions,
    exec: Execution,
) -> Result<PoleScan> {
    region.validate()?;
    model.validate()?;
    model.check_grid(grid)?;
    let (nr, ni) = (opts.n_re.max(2), opts.n_im.max(2));
    let dr = (region.re_max - region.re_min) / (nr - 1) as f64;
    let di = (region.im_max - region.im_min) / (ni - 1) as f64;
    let mesh: Vec<Complex64> = (0..ni)
        .flat_map(|b| {
            (0..nr).map(move |a| {
                Complex64::new(region.re_min + dr * a as f64, region.im_min + di * b as f64)
            })
        })
        .collect();
    let values = exec.try_map(&mesh, |&w| sigma_min(model, grid, w, constants))?;
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];

    let at = |a: usize, b: usize| values[b * nr + a];
    let mut starts = Vec::new();
    for b in 0..ni {
        for a in 0..nr {
            let v = at(a, b);
            let mut is_min = true;
            for db in -1i64..=1 {
                for da in -1i64..=1 {
                    let (x, y) = (a as i64 + da, b as i64 + db);
                    if (da, db) == (0, 0) || x < 0 || y < 0 || x >= nr as i64 || y >= ni as i64 {
                        continue;
                    }
                    if at(x as usize, y as usize) < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                starts.push(mesh[b * nr + a]);
            }
        }
    }

    let max_step = 2.0 * dr.max(di);
    let reference = cavity_reference(model);
    let one = Complex64::new(1.0, 0.0);
    let polished = exec.try_map(&starts, |&s| {
        let (w, converged) = polish(model, grid, s, max_step, opts.newton_steps, constants)?;
        let sv = sigma_min(model, grid, w, constants)?;
        let rt = reference
            .map(|z| round_trip(model, z, Complex64::new(w.re, 0.0), one, constants).norm());
        Ok(PoleCandidate {
            start: s,
            omega: w,
            sigma_min: sv,
            converged,
            round_trip_gain: rt,
        })
    })?;

    let cut = opts.threshold * median;
    let mut flagged: Vec<Complex64> = Vec::new();
    for c in &polished {
        if c.sigma_min < cut
            && c.omega.im > 0.0
            && region.contains(c.omega)
            && !flagged
                .iter()
                .any(|f| (f - c.omega).norm() <= 1e-6 * c.omega.norm())
        {
            flagged.push(c.omega);
        }
    }
    flagged.sort_by(|a, b| a.re.total_cmp(&b.re));

    let max_round_trip = reference.map(|z| {
        (0..nr)
            .map(|a| {
                let w = region.re_min + dr * a as f64;
                (
                    round_trip(model, z, Complex64::new(w, 0.0), one, constants).norm(),
                    w,
                )
            })
            .fold(
                (0.0, region.re_min),
                |best, x| if x.0 > best.0 { x } else { best },
            )
    });

    Ok(PoleScan {
        region,
        mesh_median: median,
        candidates: polished,
        flagged,
        max_round_trip,
        evaluations: mesh.len(),
    })
}
