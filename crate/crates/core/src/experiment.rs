//! Named experiments driven by a TOML configuration file.
//!
//! A configuration names one experiment and carries lattice, model and
//! numerical parameters. [`validate`] reports every precondition violation
//! without running anything; [`run`] validates, executes, and writes a
//! `manifest.json` plus CSV/JSON artifacts into the output directory. On a
//! solver error it writes `error.json` with a machine-readable record.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dnls::{self, DnlsParams, SolitonBranch};
use crate::dynamics::{orbital_stability_run_with, Scheme, StabilityOptions};
use crate::error::{Error, Result};
use crate::io::{write_atomic, write_csv_rows, write_json};
use crate::kg_breather::{self, BreatherSolution, SolveMode};
use crate::kg_spectrum::{self, SweepOptions};
use crate::lattice::{l2_norm, Boundary, LatticeGrid};
use crate::normal_form::{
    build_scaled_hamiltonian, lie_transform_normal_form, continue_generalized_soliton, Coeff, GaussRational, Monomial,
    NormalFormBudget,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SolveSoliton,
    PowerCurve,
    SolveBreather,
    BoundSweep,
    SpectrumSweep,
    NormalForm,
    StabilityRun,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub dim: usize,
    pub radius: usize,
    pub boundary: Boundary,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { dim: 1, radius: 20, boundary: Boundary::Dirichlet }
    }
}

/// Physical parameters. Give either `omega` (defocusing frame, outside
/// `[-4d, 0]`) or `omega_tilde` (focusing frame, positive); with neither,
/// `omega_tilde = 5`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub p: u32,
    pub omega: Option<f64>,
    pub omega_tilde: Option<f64>,
    pub eps: Option<f64>,
    pub eps_list: Vec<f64>,
    pub omega_tilde_list: Vec<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { p: 1, omega: None, omega_tilde: None, eps: None, eps_list: Vec::new(), omega_tilde_list: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Newton tolerance for soliton and breather solves.
    pub tol: f64,
    /// Breather harmonic cutoff `M`; defaults to `2p + 6`.
    pub harmonics: Option<usize>,
    /// Hill truncation `M_spec`.
    pub m_spec: usize,
    pub dimension_cap: usize,
    /// Normal-form order `r`.
    pub order: usize,
    pub ball_radius: f64,
    /// Shrink `𝔡 ∈ (0, 1/4]`.
    pub shrink: f64,
    /// Exact rational arithmetic for the normal form; defaults to `order <= 4`.
    pub exact: Option<bool>,
    /// Degree cap for normal-form monomials; defaults to `2 + 2p·order`.
    pub degree_cap: Option<usize>,
    pub term_cap: usize,
    pub t_final: f64,
    /// Integration steps per breather period, `h = T/steps_per_period`.
    pub steps_per_period: usize,
    pub delta: f64,
    pub scheme: Scheme,
    pub orbit_samples: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            harmonics: None,
            m_spec: 8,
            dimension_cap: kg_spectrum::DEFAULT_DIMENSION_CAP,
            order: 2,
            ball_radius: 0.5,
            shrink: 0.25,
            exact: None,
            degree_cap: None,
            term_cap: crate::normal_form::lie::DEFAULT_TERM_CAP,
            t_final: 1000.0,
            steps_per_period: 2000,
            delta: 1e-3,
            scheme: Scheme::Strang,
            orbit_samples: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            output: None,
            seed: 0,
            lattice: LatticeConfig::default(),
            model: ModelConfig::default(),
            numerics: NumericsConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// `Ω` in the defocusing frame.
    pub fn omega(&self) -> f64 {
        match (self.model.omega, self.model.omega_tilde) {
            (Some(o), _) => o,
            (None, ot) => -4.0 * self.lattice.dim as f64 - ot.unwrap_or(5.0),
        }
    }

    pub fn harmonics(&self) -> usize {
        self.numerics.harmonics.unwrap_or_else(|| kg_breather::default_harmonics(self.model.p))
    }

    pub fn grid(&self) -> Result<LatticeGrid> {
        LatticeGrid::new(self.lattice.dim, self.lattice.radius, self.lattice.boundary)
    }

    fn params(&self) -> Result<DnlsParams> {
        DnlsParams::new(self.model.p, self.omega(), self.lattice.dim)
    }

    fn degree_cap(&self) -> usize {
        self.numerics.degree_cap.unwrap_or(2 + 2 * self.model.p as usize * self.numerics.order)
    }

    fn exact(&self) -> bool {
        self.numerics.exact.unwrap_or(self.numerics.order <= 4)
    }
}

fn frequency_violation(eps: f64, omega: f64) -> Option<String> {
    let value = 1.0 - eps * omega;
    (value <= 0.0).then(|| format!("InvalidFrequency: 1 - eps*Omega = {value} must be positive (eps = {eps})"))
}

/// Human-readable precondition violations; empty when the config can run.
pub fn validate(cfg: &ExperimentConfig) -> Vec<String> {
    use ExperimentKind::*;
    let mut v = Vec::new();
    let (m, n) = (&cfg.model, &cfg.numerics);
    if cfg.lattice.dim == 0 || cfg.lattice.radius == 0 {
        v.push("lattice dim and radius must be >= 1".to_string());
    }
    if m.p == 0 {
        v.push("p must be >= 1".to_string());
    }
    if m.omega.is_some() && m.omega_tilde.is_some() {
        v.push("give either model.omega or model.omega_tilde, not both".to_string());
    }
    if let Some(ot) = m.omega_tilde {
        if !(ot > 0.0) {
            v.push(format!("omega_tilde must be positive, got {ot}"));
        }
    }
    let omega = cfg.omega();
    let band = 4.0 * cfg.lattice.dim as f64;
    if (-band..=0.0).contains(&omega) || !omega.is_finite() {
        v.push(format!("Omega = {omega} lies in the linear band [-{band}, 0]"));
    }
    if !(n.tol > 0.0) {
        v.push(format!("tol must be positive, got {}", n.tol));
    }
    let needs_eps = matches!(cfg.experiment, SolveBreather | StabilityRun);
    match m.eps {
        Some(e) if !(e > 0.0 && e.is_finite()) => v.push(format!("eps must be positive, got {e}")),
        Some(e) => v.extend(frequency_violation(e, omega)),
        None if needs_eps => v.push(format!("experiment {} needs model.eps", cfg.experiment)),
        None => {}
    }
    if matches!(cfg.experiment, SolveBreather | StabilityRun | BoundSweep | SpectrumSweep) && cfg.harmonics() < 3 {
        v.push(format!("harmonics must be >= 3, got {}", cfg.harmonics()));
    }
    if matches!(cfg.experiment, BoundSweep | SpectrumSweep) {
        if m.eps_list.len() < 2 {
            v.push("eps_list needs at least two values".to_string());
        }
        if m.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            v.push("eps_list must be strictly decreasing".to_string());
        }
        for &e in &m.eps_list {
            if !(e > 0.0 && e < 0.1) {
                v.push(format!("eps_list entry {e} outside (0, 0.1)"));
            }
            v.extend(frequency_violation(e, omega));
        }
    }
    if cfg.experiment == PowerCurve {
        if m.omega_tilde_list.is_empty() {
            v.push("power curve needs model.omega_tilde_list".to_string());
        }
        if m.omega_tilde_list.iter().any(|o| !(*o > 0.0)) {
            v.push("omega_tilde_list entries must be positive".to_string());
        }
    }
    if cfg.experiment == SpectrumSweep && n.m_spec == 0 {
        v.push("m_spec must be >= 1".to_string());
    }
    if cfg.experiment == NormalForm {
        if n.order == 0 {
            v.push("normal form order must be >= 1".to_string());
        }
        if !(n.shrink > 0.0 && n.shrink <= 0.25) {
            v.push(format!("normal-form shrink {} out of range (0, 1/4]", n.shrink));
        }
        if !(n.ball_radius > 0.0) {
            v.push(format!("ball_radius must be positive, got {}", n.ball_radius));
        }
        let need = 2 + 2 * m.p as usize * n.order;
        if cfg.degree_cap() < need {
            v.push(format!("degree_cap {} below 2 + 2p*order = {need}", cfg.degree_cap()));
        }
    }
    if cfg.experiment == StabilityRun {
        if !(n.t_final > 0.0) {
            v.push(format!("t_final must be positive, got {}", n.t_final));
        }
        if n.steps_per_period == 0 {
            v.push("steps_per_period must be >= 1".to_string());
        }
        if !(n.delta >= 0.0) {
            v.push(format!("delta must be nonnegative, got {}", n.delta));
        }
        if n.orbit_samples < 256 {
            v.push(format!("orbit_samples must be >= 256, got {}", n.orbit_samples));
        }
    }
    v
}

/// What a finished run reports back.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: ExperimentKind,
    pub output: PathBuf,
    pub artifacts: Vec<String>,
    pub summary: Value,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }
}

/// Validates and runs `cfg`, writing artifacts below its output directory
/// (default `out/<experiment>`).
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let violations = validate(cfg);
    if !violations.is_empty() {
        return Err(Error::ConfigInvalid(violations));
    }
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("out").join(cfg.experiment.to_string()));
    std::fs::create_dir_all(&dir)?;
    let mut out = Outputs { dir: dir.clone(), files: Vec::new() };
    let start = Instant::now();
    let result = dispatch(cfg, &mut out);
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(summary) => {
            write_atomic(&out.path("config.toml"), cfg.to_toml().as_bytes())?;
            let manifest = json!({
                "experiment": cfg.experiment,
                "status": "ok",
                "version": env!("CARGO_PKG_VERSION"),
                "seed": cfg.seed,
                "config": cfg,
                "seconds": seconds,
                "artifacts": out.files,
                "summary": summary,
            });
            write_json(&dir.join("manifest.json"), &manifest)?;
            let _ = std::fs::remove_file(dir.join("error.json"));
            Ok(RunSummary { experiment: cfg.experiment, output: dir, artifacts: out.files, summary })
        }
        Err(e) => {
            write_error_record(&dir, cfg, &e)?;
            Err(e)
        }
    }
}

/// Writes `error.json` with the error kind, message and exit code.
pub fn write_error_record(dir: &Path, cfg: &ExperimentConfig, e: &Error) -> Result<()> {
    let record = json!({
        "experiment": cfg.experiment,
        "status": "error",
        "kind": e.kind(),
        "message": e.to_string(),
        "exit_code": e.exit_code(),
        "config": cfg,
    });
    write_json(&dir.join("error.json"), &record)
}

fn dispatch(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    match cfg.experiment {
        ExperimentKind::SolveSoliton => run_soliton(cfg, out),
        ExperimentKind::PowerCurve => run_power_curve(cfg, out),
        ExperimentKind::SolveBreather => run_breather(cfg, out),
        ExperimentKind::BoundSweep => run_bounds(cfg, out),
        ExperimentKind::SpectrumSweep => run_spectrum(cfg, out),
        ExperimentKind::NormalForm => run_normal_form(cfg, out),
        ExperimentKind::StabilityRun => run_stability(cfg, out),
    }
}

fn soliton(cfg: &ExperimentConfig) -> Result<SolitonBranch> {
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    dnls::solve_soliton(&params, &grid, &dnls::anticontinuum_seed(&grid, &params), cfg.numerics.tol)
}

fn branch_summary(b: &SolitonBranch) -> Value {
    json!({
        "omega": b.params.omega,
        "omega_tilde": b.params.omega_tilde(),
        "mass": b.mass,
        "energy": b.energy,
        "residual_norm": b.residual_norm,
        "jacobian_min_singular_value": b.jacobian_min_singular_value,
        "iterations": b.iterations,
    })
}

fn run_soliton(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let b = soliton(cfg)?;
    b.save(&out.dir)?;
    out.files.extend(["soliton.json".to_string(), "amplitude.csv".to_string()]);
    Ok(branch_summary(&b))
}

fn run_power_curve(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let grid = cfg.grid()?;
    let points = dnls::power_curve(cfg.model.p, &grid, &cfg.model.omega_tilde_list, cfg.numerics.tol)?;
    write_csv_rows(&out.path("power_curve.csv"), &points)?;
    let monotone = points.windows(2).all(|w| (w[1].mass - w[0].mass) * (w[1].omega_tilde - w[0].omega_tilde) > 0.0);
    Ok(json!({ "points": points.len(), "mass_monotone": monotone }))
}

fn breather(cfg: &ExperimentConfig, branch: &SolitonBranch) -> Result<BreatherSolution> {
    let eps = cfg.model.eps.expect("validated");
    let seed = kg_breather::seed_from_soliton(branch, eps, cfg.harmonics())?;
    kg_breather::solve_breather(&seed, cfg.numerics.tol, SolveMode::FixFrequencyParam)
}

fn run_breather(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let branch = soliton(cfg)?;
    let b = breather(cfg, &branch)?;
    b.save(&out.dir.join("breather"))?;
    out.files.push("breather/".to_string());
    let rows: Vec<HarmonicRow> =
        b.harmonic_norms().iter().enumerate().map(|(m, norm)| HarmonicRow { m, norm: *norm }).collect();
    write_csv_rows(&out.path("harmonic_norms.csv"), &rows)?;
    let (kernel, range) = b.kernel_range_split();
    Ok(json!({
        "eps": b.eps,
        "omega": b.omega,
        "period": b.period(),
        "harmonics": b.num_harmonics(),
        "residual_norm": b.residual_norm,
        "tail_norm": b.tail_norm(),
        "profile_error": l2_norm(&b.harmonics[1].sub(&branch.amplitude)),
        "kernel_norm": kernel,
        "range_norm": range,
        "return_map_error": kg_breather::return_map_error(&b, cfg.numerics.steps_per_period, Scheme::Yoshida4),
    }))
}

#[derive(Serialize)]
struct HarmonicRow {
    m: usize,
    norm: f64,
}

fn run_bounds(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let branch = soliton(cfg)?;
    let report = kg_breather::verify_bounds_with(&branch, &cfg.model.eps_list, cfg.numerics.tol, cfg.harmonics())?;
    report.write_csv(&out.path("bounds.csv"))?;
    write_json(&out.path("bounds.json"), &report)?;
    Ok(json!({
        "slope_omega": report.fitted_slopes[0],
        "slope_profile": report.fitted_slopes[1],
        "slope_tail": report.fitted_slopes[2],
        "partial": report.is_partial(),
    }))
}

fn run_spectrum(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let branch = soliton(cfg)?;
    let pairs = dnls::dnls_spectrum(&branch)?;
    dnls::write_spectrum_csv(&out.path("dnls_spectrum.csv"), &pairs)?;
    let target = dnls::isolated_imaginary_mode(&pairs).ok_or_else(|| {
        Error::InvalidInput(format!(
            "no isolated imaginary eigenvalue off the band at omega_tilde = {}",
            branch.params.omega_tilde()
        ))
    })?;
    let opts = SweepOptions {
        breather_harmonics: cfg.numerics.harmonics,
        m_spec: cfg.numerics.m_spec,
        tol: cfg.numerics.tol,
        dimension_cap: cfg.numerics.dimension_cap,
    };
    let report = kg_spectrum::verify_spectral_bounds(&branch, target, &cfg.model.eps_list, &opts)?;
    report.write_csv(&out.path("spectral_scaling.csv"))?;
    Ok(json!({
        "target_lambda": [target.lambda.re, target.lambda.im],
        "target_krein": target.krein.to_string(),
        "slope_lambda": report.fitted_slopes[0],
        "slope_vector": report.fitted_slopes[1],
        "max_abs_re": report.max_abs_re,
        "krein_sign_constant": report.krein_sign_constant,
    }))
}

#[derive(Serialize)]
struct CoeffRow {
    order: usize,
    eps_power: u16,
    degree: usize,
    monomial: String,
    re: f64,
    im: f64,
}

fn run_normal_form(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    if cfg.exact() {
        normal_form_with::<GaussRational>(cfg, out)
    } else {
        normal_form_with::<faer::c64>(cfg, out)
    }
}

fn normal_form_with<C: Coeff>(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let grid = cfg.grid()?;
    let (p, r, n) = (cfg.model.p, cfg.numerics.order, &cfg.numerics);
    let eps = cfg.model.eps.unwrap_or(0.0);
    let h = build_scaled_hamiltonian::<C>(grid, p, 1.0, cfg.degree_cap())?;
    let mut budget = NormalFormBudget::new(r, n.ball_radius, n.shrink, eps)?.with_term_cap(n.term_cap);
    let nf = lie_transform_normal_form(&h, r, &mut budget)?;

    let mut rows = Vec::new();
    for (s, z) in nf.z.iter().enumerate() {
        write_atomic(&out.path(&format!("z_{}.txt", s + 1)), z.to_text().as_bytes())?;
        write_atomic(&out.path(&format!("chi_{}.txt", s + 1)), nf.chi[s].to_text().as_bytes())?;
        for (m, c) in &z.terms {
            let c = c.to_c64();
            rows.push(CoeffRow { order: s + 1, eps_power: m.eps, degree: m.degree(), monomial: m.label(), re: c.re, im: c.im });
        }
    }
    write_csv_rows(&out.path("z_coefficients.csv"), &rows)?;
    write_json(&out.path("budget.json"), &budget)?;

    // Γ_p from the on-site |ζ|^{2p+2} coefficient at the origin
    let k = p as u16 + 1;
    let onsite = nf.z[0].coeff(&Monomial::new(1, &[(grid.origin(), k, k)]));
    let gamma = onsite * C::ratio(2 * p as i64 + 2, 1);
    let g = crate::normal_form::harmonic_action::<C>(grid, cfg.degree_cap());
    let commutes = g.bracket(&nf.normal_form_part())?.is_empty();
    let mut summary = json!({
        "order": r,
        "exact": cfg.exact(),
        "gamma": gamma.render(),
        "gamma_value": gamma.to_c64().re,
        "homological_residuals": nf.homological_residuals,
        "closure_residuals": nf.closure_residuals,
        "commutes_with_g": commutes,
        "imaginary_defect": nf.imaginary_defect(),
        "terms_z": nf.z.iter().map(|z| z.len()).collect::<Vec<_>>(),
        "terms_chi": nf.chi.iter().map(|z| z.len()).collect::<Vec<_>>(),
        "remainder_norms": nf.remainder_norms,
    });

    if eps > 0.0 {
        let params = cfg.params()?;
        let reference = dnls::solve_soliton(&params, &grid, &dnls::anticontinuum_seed(&grid, &params), n.tol)?;
        let sol = match continue_generalized_soliton(&nf.z, &reference.amplitude, params.omega, eps, n.tol, 0.01) {
            Ok(sol) => sol,
            Err(e) => {
                // the normal form itself is valid; only the truncated branch is missing
                summary["generalized_soliton"] = json!({ "eps": eps, "error": e.kind(), "message": e.to_string() });
                return Ok(summary);
            }
        };
        #[derive(Serialize)]
        struct ProfileRow {
            site: usize,
            generalized: f64,
            dnls: f64,
        }
        let prof: Vec<ProfileRow> = (0..grid.num_sites())
            .map(|i| ProfileRow { site: i, generalized: sol.amplitude.values[i], dnls: reference.amplitude.values[i] })
            .collect();
        write_csv_rows(&out.path("generalized_soliton.csv"), &prof)?;
        summary["generalized_soliton"] = json!({
            "eps": eps,
            "omega": params.omega,
            "residual_norm": sol.residual_norm,
            "distance_to_dnls": l2_norm(&sol.amplitude.sub(&reference.amplitude)),
        });
    }
    Ok(summary)
}

fn run_stability(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let branch = soliton(cfg)?;
    let b = breather(cfg, &branch)?;
    let n = &cfg.numerics;
    let h = b.period() / n.steps_per_period as f64;
    let opts = StabilityOptions { seed: cfg.seed, sample_interval: None, orbit_samples: n.orbit_samples, scheme: n.scheme };
    let trace = orbital_stability_run_with(&b, n.delta, n.t_final, h, &opts)?;
    trace.save(&out.dir.join("trace"))?;
    out.files.push("trace/".to_string());
    let g0 = trace.g_values[0];
    Ok(json!({
        "eps": b.eps,
        "delta": n.delta,
        "t_final": n.t_final,
        "step": h,
        "breather_norm": trace.breather_norm,
        "max_distance": trace.max_distance(),
        "distance_bound": 10.0 * n.delta * (1.0 + trace.breather_norm),
        "max_g_variation_over_eps_g0": trace.max_g_variation() / (b.eps * g0),
        "relative_h_oscillation": trace.relative_h_oscillation(),
        "relative_h_trend": trace.relative_h_trend(),
        "relative_h_drift": trace.relative_h_drift(),
    }))
}
