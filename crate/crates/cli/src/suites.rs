//! Verification suites and the orchestrator.

use std::f64::consts::PI;
use std::sync::Arc;

use ampqed::correlations::{
    commutator_integral, integrate_correlation, CommutatorOptions, CorrelationTensor,
};
use ampqed::error::Error;
use ampqed::exec::Execution;
use ampqed::grid::SpatialGrid;
use ampqed::kernel::Kernel;
use ampqed::media::{
    build_kernel, check_kramers_kronig, check_schwarz, kk_test_frequencies, MediumModel,
};
use ampqed::poles::{pole_scan, PoleScan};
use ampqed::quadrature::FrequencyGrid;
use ampqed::quantization::{hamiltonian_spectrum, noise_covariances, parity_commutator_tilde_f};
use ampqed::random::{random_grid, random_hermitian};
use ampqed::scene::{FrequencySample, Scene};
use ampqed::spectral::{
    factor_k, inverse_kernel, is_dissipative, kernel_defect, parity_kernel, sigma_av,
    spectral_decompose, STRUCTURE_TOL,
};
use ampqed::units::Constants;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ScenarioConfig, NEEDS_ANALYTICITY, SUITES};
use crate::report::{
    Analysis, ChannelCount, FlaggedPole, KernelRecord, Provenance, Report, Status,
};
use crate::ConfigError;

/// Randomized kernels checked by the `spectrum` suite.
const RANDOM_TRIALS: usize = 100;
/// Panels of the integrated correlation over the sample band.
const BAND_PANELS: usize = 8;
/// Relative eigenvalue cutoff for the correction rank. Near a cavity mode
/// the correction spans many decades, so this sits just above roundoff.
const RANK_TOL: f64 = 1e-12;

struct Context<'a> {
    cfg: &'a ScenarioConfig,
    scene: Scene,
    k: Constants,
    omegas: Vec<f64>,
    exec: Execution,
    samples: Option<Vec<FrequencySample>>,
    scan: Option<Result<PoleScan, Error>>,
}

impl Context<'_> {
    fn model(&self) -> &MediumModel {
        &self.scene.model
    }

    fn grid(&self) -> &Arc<SpatialGrid> {
        &self.scene.grid
    }

    fn samples(&mut self) -> Result<&[FrequencySample], Error> {
        if self.samples.is_none() {
            let rel = self.cfg.tolerances.eps_reg;
            let scene = &self.scene;
            let s = self
                .exec
                .try_map(&self.omegas, |&w| scene.sample_relative(w, rel))?;
            self.samples = Some(s);
        }
        Ok(self.samples.as_deref().expect("filled above"))
    }

    fn scan(&mut self) -> &Result<PoleScan, Error> {
        if self.scan.is_none() {
            let region = self.cfg.region(&self.scene.model);
            self.scan = Some(match region {
                Ok(r) => pole_scan(
                    &self.scene.model,
                    &self.scene.grid,
                    &self.k,
                    r,
                    self.cfg.scan_options(),
                    self.exec,
                ),
                Err(e) => Err(Error::InvalidInput(e.to_string())),
            });
        }
        self.scan.as_ref().expect("filled above")
    }

    fn analytic(&mut self) -> Result<(), String> {
        match self.scan() {
            Ok(s) if s.is_clean() && !s.round_trip_flag() => Ok(()),
            Ok(s) if !s.is_clean() => Err(format!(
                "{} upper-half-plane pole(s) flagged",
                s.flagged.len()
            )),
            Ok(s) => Err(format!(
                "round-trip gain {:.4} ≥ 1",
                s.max_round_trip.map_or(0.0, |x| x.0)
            )),
            Err(e) => Err(e.to_string()),
        }
    }
}

fn record(
    name: &str,
    omega: Option<f64>,
    nodes: &[f64],
    m: &nalgebra::DMatrix<Complex64>,
) -> KernelRecord {
    let n = nodes.len();
    let mut re = Vec::with_capacity(n * n);
    let mut im = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            re.push(m[(i, j)].re);
            im.push(m[(i, j)].im);
        }
    }
    KernelRecord {
        name: name.to_string(),
        omega,
        nodes: nodes.to_vec(),
        re,
        im,
    }
}

fn error_analysis(name: &str, e: &Error) -> Analysis {
    Analysis::failed(name, e.code(), e.to_string())
}

/// Runs the requested suites in dependency order.
pub fn run(cfg: &ScenarioConfig, exec: Execution) -> Result<Report, ConfigError> {
    cfg.validate()?;
    let k = cfg.constants()?;
    let scene =
        Scene::new(cfg.model()?, cfg.grid()?, k).map_err(|e| ConfigError::Schema(e.to_string()))?;
    let mut ctx = Context {
        cfg,
        scene,
        k,
        omegas: cfg.sample_frequencies(),
        exec,
        samples: None,
        scan: None,
    };
    let mut analyses = Vec::new();
    for suite in SUITES {
        if !cfg.analyses.iter().any(|a| a == suite) {
            continue;
        }
        if NEEDS_ANALYTICITY.contains(&suite) {
            if let Err(why) = ctx.analytic() {
                analyses.push(Analysis::skipped(
                    suite,
                    "analyticity_violation",
                    format!("pole scan failed: {why}"),
                ));
                continue;
            }
        }
        let a = match suite {
            "validate-kernel" => validate_kernel(&mut ctx),
            "spectrum" => spectrum(&mut ctx),
            "pole-scan" => pole_scan_suite(&mut ctx),
            "green-identities" => green_identities(&mut ctx),
            "commutator" => commutator(&mut ctx),
            "correlations" => correlations(&mut ctx),
            "compare-naive" => compare_naive(&mut ctx),
            _ => unreachable!("suite names are validated"),
        };
        analyses.push(a.unwrap_or_else(|e| error_analysis(suite, &e)));
    }
    Ok(Report {
        scenario: cfg.name.clone(),
        provenance: Provenance {
            tool: "ampqed".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            timestamp: None,
        },
        analyses,
    })
}

fn validate_kernel(ctx: &mut Context) -> Result<Analysis, Error> {
    let mut a = Analysis::new("validate-kernel");
    let tol = &ctx.cfg.tolerances;
    let model = ctx.model().clone();
    let grid = ctx.grid().clone();
    let mut recip: f64 = 0.0;
    let mut schwarz: f64 = 0.0;
    let mut misplaced = 0usize;
    for &w in &ctx.omegas {
        let q = build_kernel(&model, &grid, w, &ctx.k)?;
        let r = q.reciprocity_defect();
        let s = check_schwarz(&model, &grid, w);
        for (i, &z) in grid.nodes().iter().enumerate() {
            let in_gain = model
                .layer_at(z)
                .is_some_and(|l| model.layers[l].has_gain());
            if q.values()[(i, i)].re < 0.0 && !in_gain {
                misplaced += 1;
            }
        }
        a.row(Some(w), "q_reciprocity_defect", r);
        a.row(Some(w), "schwarz_residual", s);
        recip = recip.max(r);
        schwarz = schwarz.max(s);
    }
    let top = ctx.cfg.top_frequency(&model);
    let fg = FrequencyGrid::for_model(
        &model,
        ctx.cfg.frequencies.cutoff_factor * top,
        2 * ctx.cfg.frequencies.per_width,
    )?;
    let tests = kk_test_frequencies(&model, fg.omega_max());
    let kk = check_kramers_kronig(&model, &fg, &tests, tol.kramers_kronig)?;
    a.check(
        "max_q_reciprocity_defect",
        recip,
        tol.identity,
        "not_reciprocal",
    );
    a.check(
        "max_schwarz_residual",
        schwarz,
        tol.schwarz,
        "schwarz_violation",
    );
    a.check(
        "kramers_kronig_residual",
        kk,
        tol.kramers_kronig,
        "kramers_kronig_violation",
    );
    a.metrics
        .insert("kk_test_frequencies".into(), tests.len() as f64);
    a.metrics
        .insert("misplaced_gain_nodes".into(), misplaced as f64);
    a.require(
        misplaced == 0,
        "gain_outside_layers",
        format!("{misplaced} node(s) with Re Q < 0 outside gain layers"),
    );
    Ok(a)
}

fn spectrum(ctx: &mut Context) -> Result<Analysis, Error> {
    let mut a = Analysis::new("spectrum");
    let tol = ctx.cfg.tolerances.identity;
    let k = ctx.k;
    let mut worst = [0.0f64; 5];
    let mut channels = Vec::new();
    for x in ctx.samples()? {
        let w = x.omega;
        let spec = x.partition.spectrum();
        let cov = noise_covariances(&x.partition, &k);
        let pref = k.hbar * w / PI;
        let d = [
            kernel_defect(&spec.reconstruct(), &x.sigma),
            spec.orthonormality_defect(),
            spec.completeness_defect(),
            kernel_defect(
                &(&cov.anti + &cov.normal),
                &x.partition.sigma_av().scale(pref),
            )
            .max(kernel_defect(
                &(&cov.anti - &cov.normal),
                &x.sigma.scale(pref),
            )),
            parity_on_support(&x.sigma)?,
        ];
        for (name, v) in [
            "reconstruction",
            "orthonormality",
            "completeness",
            "covariance",
            "parity",
        ]
        .iter()
        .zip(d)
        {
            a.row(Some(w), &format!("{name}_defect"), v);
        }
        for (m, v) in worst.iter_mut().zip(d) {
            *m = m.max(v);
        }
        let h = hamiltonian_spectrum(&x.partition, &k);
        channels.push(ChannelCount {
            omega: w,
            plus: x.partition.plus_count(),
            minus: x.partition.minus_count(),
            dropped: x.partition.dropped().len(),
            no_ground_state: h.no_ground_state,
        });
    }
    a.channels = channels;
    for (name, v) in [
        "reconstruction",
        "orthonormality",
        "completeness",
        "covariance",
        "parity",
    ]
    .iter()
    .zip(worst)
    {
        a.check(&format!("max_{name}_defect"), v, tol, "identity_violation");
    }
    let (random, mismatches) = random_identities(ctx.cfg.seed);
    a.check("random_identity_defect", random, tol, "identity_violation");
    a.metrics
        .insert("random_trials".into(), RANDOM_TRIALS as f64);
    a.metrics
        .insert("factor_k_mismatches".into(), mismatches as f64);
    a.require(
        mismatches == 0,
        "factor_k_mismatch",
        format!("{mismatches} factor_k/is_dissipative mismatches"),
    );
    Ok(a)
}

/// `P∘P = id` and `P∘σ = σ∘P = σ_av` on the nodes where `σ` is nonzero.
fn parity_on_support(sigma: &Kernel) -> Result<f64, Error> {
    let support = sigma.support(1e-12);
    if support.is_empty() {
        return Ok(0.0);
    }
    let sub = sigma.restrict(&support)?;
    let spec = spectral_decompose(&sub, STRUCTURE_TOL)?;
    let p = parity_commutator_tilde_f(&spec, None)?;
    let id = Kernel::identity(sub.grid().clone(), sub.omega());
    let av = sigma_av(&spec);
    Ok(kernel_defect(&p.compose(&p), &id)
        .max(kernel_defect(&p.compose(&sub), &av))
        .max(kernel_defect(&sub.compose(&p), &av)))
}

/// Seeded randomized identities; returns the worst defect and the number
/// of `factor_k` / `is_dissipative` disagreements.
fn random_identities(seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for t in 0..RANDOM_TRIALS {
        let n = rng.random_range(3..20);
        let grid = random_grid(&mut rng, n);
        let bias = if t % 3 == 0 { 1.0 } else { 0.0 };
        let s = random_hermitian(&mut rng, grid.clone(), 1.0, bias);
        let Ok(spec) = spectral_decompose(&s, STRUCTURE_TOL) else {
            return (f64::INFINITY, mismatches);
        };
        let id = Kernel::identity(grid, 1.0);
        let rho = inverse_kernel(&spec, None).kernel;
        worst = worst
            .max(kernel_defect(&rho.compose(&s), &id))
            .max(kernel_defect(&s.compose(&rho), &id));
        if let Ok(p) = parity_kernel(&spec, None) {
            worst = worst.max(kernel_defect(&p.compose(&p), &id));
        }
        let tol = 1e-12 * spec.max_abs();
        match (factor_k(&spec, tol), is_dissipative(&spec, tol)) {
            (Ok(kf), true) => worst = worst.max(kernel_defect(&kf.compose(&kf.adjoint()), &s)),
            (Err(Error::NonPositiveSpectrum { .. }), false) => {}
            _ => mismatches += 1,
        }
    }
    (worst, mismatches)
}

fn pole_scan_suite(ctx: &mut Context) -> Result<Analysis, Error> {
    let mut a = Analysis::new("pole-scan");
    let scan = match ctx.scan() {
        Ok(s) => s.clone(),
        Err(e) => return Err(e.clone()),
    };
    a.metrics
        .insert("mesh_median_sigma_min".into(), scan.mesh_median);
    a.metrics
        .insert("mesh_points".into(), scan.evaluations as f64);
    a.metrics
        .insert("candidates".into(), scan.candidates.len() as f64);
    a.metrics
        .insert("flagged".into(), scan.flagged.len() as f64);
    a.metrics.insert("region_re_min".into(), scan.region.re_min);
    a.metrics.insert("region_re_max".into(), scan.region.re_max);
    a.metrics.insert("region_im_min".into(), scan.region.im_min);
    a.metrics.insert("region_im_max".into(), scan.region.im_max);
    if let Some((g, w)) = scan.max_round_trip {
        a.metrics.insert("max_round_trip_gain".into(), g);
        a.metrics.insert("max_round_trip_omega".into(), w);
    }
    for c in &scan.candidates {
        if scan.flagged.contains(&c.omega) {
            a.poles.push(FlaggedPole {
                re: c.omega.re,
                im: c.omega.im,
                sigma_min: c.sigma_min,
            });
        }
    }
    a.poles.dedup_by(|x, y| x.re == y.re && x.im == y.im);
    if !scan.is_clean() {
        let e = Error::AnalyticityViolation {
            poles: scan.flagged.clone(),
        };
        a.require(false, e.code(), e.to_string());
    }
    a.require(
        !scan.round_trip_flag(),
        "round_trip_gain",
        "cavity round-trip gain reaches 1 on the real axis".into(),
    );
    Ok(a)
}

fn green_identities(ctx: &mut Context) -> Result<Analysis, Error> {
    let mut a = Analysis::new("green-identities");
    let tol = ctx.cfg.tolerances.clone();
    let k = ctx.k;
    let scene = ctx.scene.clone();
    let mut rel: f64 = 0.0;
    let mut recip: f64 = 0.0;
    let mut schwarz: f64 = 0.0;
    for x in ctx.samples()? {
        let w = x.omega;
        let r = x.integral_relation_residual(&k);
        let g = x.green.values();
        let neg = scene.green_at(Complex64::new(-w, 0.0))?;
        let s = (neg.values() - g.map(|v| v.conj())).norm() / g.norm();
        let rc = x.green.reciprocity_defect();
        a.row(Some(w), "integral_relation_residual", r);
        a.row(Some(w), "green_reciprocity_defect", rc);
        a.row(Some(w), "green_schwarz_defect", s);
        a.row(
            Some(w),
            "condition_estimate",
            x.green.diagnostics().condition,
        );
        rel = rel.max(r);
        recip = recip.max(rc);
        schwarz = schwarz.max(s);
    }
    a.check(
        "max_integral_relation_residual",
        rel,
        tol.integral_relation,
        "integral_relation_violation",
    );
    a.check(
        "max_green_reciprocity_defect",
        recip,
        tol.identity,
        "not_reciprocal",
    );
    a.check(
        "max_green_schwarz_defect",
        schwarz,
        tol.identity,
        "schwarz_violation",
    );
    Ok(a)
}

fn commutator(ctx: &mut Context) -> Result<Analysis, Error> {
    let mut a = Analysis::new("commutator");
    let cfg = ctx.cfg;
    let model = ctx.model().clone();
    let top = cfg.top_frequency(&model);
    let big = cfg.frequencies.cutoff_factor * top;
    let fg = FrequencyGrid::for_model(&model, big, cfg.frequencies.per_width)?;
    let scan = ctx.scan().clone()?;
    let opts = CommutatorOptions {
        rel_tol: cfg.tolerances.quadrature,
        ..CommutatorOptions::default()
    };
    let r = commutator_integral(&model, ctx.grid(), &ctx.k, &fg, &scan, ctx.exec, opts)?;
    a.metrics.insert("omega_max".into(), big);
    a.metrics.insert("evaluations".into(), r.evaluations as f64);
    a.metrics
        .insert("quadrature_error_estimate".into(), r.error_estimate);
    let diag = r.value.values().diagonal();
    let target = r.target.values().diagonal();
    let mut diag_dev: f64 = 0.0;
    for (v, t) in diag.iter().zip(target.iter()) {
        diag_dev = diag_dev.max((v - t).norm() / t.norm());
    }
    a.metrics.insert("max_diagonal_deviation".into(), diag_dev);
    a.check(
        "residual",
        r.residual,
        cfg.tolerances.commutator,
        "commutator_mismatch",
    );
    if cfg.output.commutator {
        a.kernels.push(record(
            "commutator_integral",
            None,
            ctx.grid().nodes(),
            r.value.values(),
        ));
    }
    Ok(a)
}

fn correlations(ctx: &mut Context) -> Result<Analysis, Error> {
    let mut a = Analysis::new("correlations");
    let cfg = ctx.cfg;
    let tol = cfg.tolerances.clone();
    let k = ctx.k;
    let scene = ctx.scene.clone();
    let exec = ctx.exec;
    let nodes = ctx.grid().nodes().to_vec();
    let samples = ctx.samples()?;
    let (mut herm, mut psd, mut reg): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut kernels = Vec::new();
    let shifted = exec.try_map(samples, |x| {
        let lo = scene.sample_relative(x.omega, 1e-2 * tol.eps_reg)?;
        let hi = scene.sample_relative(x.omega, 1e2 * tol.eps_reg)?;
        Ok((lo, hi))
    })?;
    for (x, (lo, hi)) in samples.iter().zip(&shifted) {
        let w = x.omega;
        let ee = x.ee(&k);
        let bb = x.bb(&k);
        let h = ee.hermiticity_defect().max(bb.hermiticity_defect());
        let p = ee
            .min_relative_eigenvalue()
            .min(bb.min_relative_eigenvalue());
        let mut r: f64 = 0.0;
        for y in [lo, hi] {
            r = r
                .max(y.ee(&k).relative_distance(&ee))
                .max(y.bb(&k).relative_distance(&bb))
                .max(change(&y.correction(&k), &x.correction(&k), &ee));
        }
        a.row(Some(w), "ee_trace", ee.as_kernel().quadrature_trace().re);
        a.row(Some(w), "ee_norm", ee.norm());
        a.row(Some(w), "bb_norm", bb.norm());
        a.row(Some(w), "hermiticity_defect", h);
        a.row(Some(w), "min_relative_eigenvalue", p);
        a.row(Some(w), "regularizer_change", r);
        herm = herm.max(h);
        psd = psd.min(p);
        reg = reg.max(r);
        if cfg.output.ee_density {
            kernels.push(record("ee_density", Some(w), &nodes, ee.values()));
        }
    }
    a.kernels = kernels;
    a.check(
        "max_hermiticity_defect",
        herm,
        tol.identity,
        "not_hermitian",
    );
    a.check("negative_eigenvalue", -psd, tol.identity, "not_positive");
    a.check(
        "max_regularizer_change",
        reg,
        tol.regularizer,
        "regularizer_sensitive",
    );

    // integrated EE over the sample band, with a refinement check
    let (lo, hi) = (cfg.frequencies.min, cfg.frequencies.max);
    if hi > lo {
        let pts: Vec<f64> = (0..=BAND_PANELS)
            .map(|i| lo + (hi - lo) * i as f64 / BAND_PANELS as f64)
            .collect();
        let fg = FrequencyGrid::from_breakpoints(pts)?;
        let rel = tol.eps_reg;
        let density = |w: f64| -> Result<CorrelationTensor, Error> {
            Ok(scene.sample_relative(w, rel)?.ee(&k))
        };
        let coarse = integrate_correlation(&fg, exec, density)?;
        let fine = integrate_correlation(&fg.refine(), exec, density)?;
        let scale = coarse.tensor.norm();
        let delta = (&coarse.tensor.as_kernel() - &fine.tensor.as_kernel()).hs_norm();
        a.metrics.insert("integrated_ee_norm".into(), scale);
        a.metrics.insert(
            "integrated_ee_error_estimate".into(),
            coarse.error_estimate / scale,
        );
        a.metrics
            .insert("integrated_ee_refinement_change".into(), delta / scale);
        a.require(
            delta <= coarse.error_estimate.max(1e-12 * scale),
            "grid_too_coarse",
            format!(
                "refinement changed the integral by {:.3e}, above the estimate {:.3e}",
                delta, coarse.error_estimate
            ),
        );
        if cfg.output.ee_integrated {
            a.kernels.push(record(
                "ee_integrated",
                None,
                &nodes,
                coarse.tensor.values(),
            ));
        }
    }
    Ok(a)
}

/// Change of a correction kernel relative to the full EE density, so that
/// a vanishing correction does not blow up the ratio.
fn change(a: &CorrelationTensor, b: &CorrelationTensor, scale: &CorrelationTensor) -> f64 {
    let d = (&a.as_kernel() - &b.as_kernel()).hs_norm();
    let s = a.norm().max(b.norm()).max(1e-12 * scale.norm());
    if s > 0.0 {
        d / s
    } else {
        0.0
    }
}

fn compare_naive(ctx: &mut Context) -> Result<Analysis, Error> {
    let mut a = Analysis::new("compare-naive");
    let tol = ctx.cfg.tolerances.clone();
    let k = ctx.k;
    let gain = ctx.model().has_gain();
    let (mut split, mut neg, mut rank_mismatch, mut biggest): (f64, f64, usize, f64) =
        (0.0, 0.0, 0, 0.0);
    let mut absorbing_excess: f64 = 0.0;
    for x in ctx.samples()? {
        let w = x.omega;
        let ee = x.ee(&k);
        let naive = x.naive_ee(&k);
        let corr = x.correction(&k);
        let sum = &naive.as_kernel() + &corr.as_kernel();
        let s = ee.as_kernel().relative_distance(&sum);
        let rel = corr.norm() / ee.norm();
        let minus = x.partition.minus_count();
        // a correction at roundoff level has no meaningful rank or sign
        let negligible = rel <= tol.integral_relation;
        let rank = if negligible { 0 } else { corr.rank(RANK_TOL) };
        let ee_scale = ee.eigenvalues().iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let p = corr.eigenvalues().last().map_or(0.0, |l| l / ee_scale);
        a.row(Some(w), "naive_plus_correction_defect", s);
        a.row(Some(w), "correction_relative_norm", rel);
        a.row(Some(w), "correction_rank", rank as f64);
        a.row(Some(w), "minus_channels", minus as f64);
        a.row(Some(w), "naive_vs_full_ee", naive.relative_distance(&ee));
        a.row(
            Some(w),
            "naive_vs_full_bb",
            x.naive_bb(&k).relative_distance(&x.bb(&k)),
        );
        split = split.max(s);
        neg = neg.min(p);
        biggest = biggest.max(rel);
        if rank != minus {
            rank_mismatch += 1;
        }
        if minus == 0 {
            absorbing_excess = absorbing_excess.max(rel);
        }
    }
    a.metrics
        .insert("max_correction_relative_norm".into(), biggest);
    a.metrics
        .insert("rank_mismatches".into(), rank_mismatch as f64);
    a.check(
        "max_split_defect",
        split,
        tol.integral_relation,
        "two_route_mismatch",
    );
    a.check(
        "correction_negative_eigenvalue",
        -neg,
        tol.identity,
        "not_positive",
    );
    a.check(
        "absorbing_correction",
        absorbing_excess,
        tol.integral_relation,
        "nonzero_absorbing_correction",
    );
    a.require(
        rank_mismatch == 0,
        "rank_mismatch",
        format!(
            "correction rank differs from the minus-channel count at {rank_mismatch} frequencies"
        ),
    );
    if a.status == Status::Pass {
        a.message = if gain {
            "naive absorbing-media formula is not physical here; the correction is reported".into()
        } else {
            "no amplifying channels; naive and full densities coincide".into()
        };
    }
    Ok(a)
}
