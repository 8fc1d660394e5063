//! Symplectic integration of the scaled dKG lattice
//! `ü + u + ε u^{2p+1} = ε Δu` and the long-time diagnostics built on it.
//!
//! The Hamiltonian is split as `H = G + F` with the harmonic part
//! `G = ½ Σ (u² + v²)` integrated exactly (a rotation in each `(u_n, v_n)`
//! plane) and `F` depending on `u` only (a kick). The symmetric composition
//! rotation/kick/rotation is second order and time reversible; a fourth-order
//! triple-jump composition of it is available for high-accuracy oracles.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg_breather::BreatherSolution;
use crate::lattice::{LatticeGrid, RealField};

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub u: RealField,
    pub v: RealField,
    pub time: f64,
}

impl PhaseState {
    pub fn new(u: RealField, v: RealField) -> Result<Self> {
        if u.grid != v.grid {
            return Err(Error::InvalidInput("u and v live on different grids".into()));
        }
        Ok(Self { u, v, time: 0.0 })
    }

    pub fn zeros(grid: LatticeGrid) -> Self {
        Self { u: RealField::zeros(grid), v: RealField::zeros(grid), time: 0.0 }
    }

    /// Euclidean norm of `(u, v)`.
    pub fn norm(&self) -> f64 {
        (self.u.dot(&self.u) + self.v.dot(&self.v)).sqrt()
    }

    /// `‖(u, v) - (other.u, other.v)‖`.
    pub fn distance(&self, other: &PhaseState) -> f64 {
        let du: f64 = self.u.values.iter().zip(&other.u.values).map(|(a, b)| (a - b) * (a - b)).sum();
        let dv: f64 = self.v.values.iter().zip(&other.v.values).map(|(a, b)| (a - b) * (a - b)).sum();
        (du + dv).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Rotation/kick/rotation, second order.
    #[default]
    Strang,
    /// Triple-jump composition of `Strang`, fourth order.
    Yoshida4,
}

/// Reusable integrator holding scratch space for the Laplacian.
#[derive(Debug, Clone)]
pub struct Integrator {
    grid: LatticeGrid,
    eps: f64,
    p: u32,
    scheme: Scheme,
    lap: Vec<f64>,
}

impl Integrator {
    pub fn new(grid: LatticeGrid, eps: f64, p: u32, scheme: Scheme) -> Self {
        Self { grid, eps, p, scheme, lap: vec![0.0; grid.num_sites()] }
    }

    fn rotate(u: &mut [f64], v: &mut [f64], angle: f64) {
        let (s, c) = angle.sin_cos();
        for (a, b) in u.iter_mut().zip(v.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = c * x + s * y;
            *b = -s * x + c * y;
        }
    }

    fn kick(&mut self, u: &[f64], v: &mut [f64], h: f64) {
        self.grid.laplacian_into(u, &mut self.lap);
        let p2 = 2 * self.p as i32;
        let he = h * self.eps;
        for i in 0..u.len() {
            v[i] += he * (self.lap[i] - u[i].powi(p2) * u[i]);
        }
    }

    fn strang(&mut self, u: &mut [f64], v: &mut [f64], h: f64) {
        Self::rotate(u, v, 0.5 * h);
        self.kick(u, v, h);
        Self::rotate(u, v, 0.5 * h);
    }

    /// Advances `(u, v)` by one step of length `h` (negative `h` runs backwards).
    pub fn advance(&mut self, u: &mut [f64], v: &mut [f64], h: f64) {
        match self.scheme {
            Scheme::Strang => self.strang(u, v, h),
            Scheme::Yoshida4 => {
                let cbrt2 = 2f64.cbrt();
                let w1 = 1.0 / (2.0 - cbrt2);
                let w0 = -cbrt2 * w1;
                self.strang(u, v, w1 * h);
                self.strang(u, v, w0 * h);
                self.strang(u, v, w1 * h);
            }
        }
    }

    pub fn advance_state(&mut self, state: &mut PhaseState, h: f64, steps: usize) {
        for _ in 0..steps {
            self.advance(&mut state.u.values, &mut state.v.values, h);
        }
        state.time += h * steps as f64;
    }

    /// Linearized step applied to tangent vectors `(du, dv)` about the
    /// base point `(u, v)`, which is advanced as well.
    pub fn advance_tangent(&mut self, u: &mut [f64], v: &mut [f64], du: &mut [f64], dv: &mut [f64], h: f64) {
        let one = |s: &mut Self, u: &mut [f64], v: &mut [f64], du: &mut [f64], dv: &mut [f64], h: f64| {
            Self::rotate(u, v, 0.5 * h);
            Self::rotate(du, dv, 0.5 * h);
            s.grid.laplacian_into(du, &mut s.lap);
            let p2 = 2 * s.p as i32;
            let k = (2 * s.p + 1) as f64;
            for i in 0..u.len() {
                dv[i] += h * s.eps * (s.lap[i] - k * u[i].powi(p2) * du[i]);
            }
            s.kick(u, v, h);
            Self::rotate(u, v, 0.5 * h);
            Self::rotate(du, dv, 0.5 * h);
        };
        match self.scheme {
            Scheme::Strang => one(self, u, v, du, dv, h),
            Scheme::Yoshida4 => {
                let cbrt2 = 2f64.cbrt();
                let w1 = 1.0 / (2.0 - cbrt2);
                let w0 = -cbrt2 * w1;
                one(self, u, v, du, dv, w1 * h);
                one(self, u, v, du, dv, w0 * h);
                one(self, u, v, du, dv, w1 * h);
            }
        }
    }
}

/// One second-order symmetric step of length `h`.
pub fn step(state: &PhaseState, eps: f64, p: u32, h: f64) -> PhaseState {
    let mut out = state.clone();
    Integrator::new(state.u.grid, eps, p, Scheme::Strang).advance_state(&mut out, h, 1);
    out
}

/// `H = ½Σ(u²+v²) + ε/(2p+2) Σ u^{2p+2} + (ε/2) Σ_{bonds} (u_j - u_h)²`,
/// each nearest-neighbour bond counted once (Dirichlet bonds to the
/// off-grid zeros included), so that `-∂H/∂u` is the lattice force.
pub fn hamiltonian(state: &PhaseState, eps: f64, p: u32) -> f64 {
    let g = almost_invariant_g(state);
    let p2 = 2 * p as i32 + 2;
    let pot: f64 = state.u.values.iter().map(|x| x.powi(p2)).sum::<f64>() / (2 * p + 2) as f64;
    let lap = crate::lattice::laplacian(&state.u);
    let coupling = -0.5 * state.u.dot(&lap);
    g + eps * (pot + coupling)
}

/// `G = ½ Σ (u² + v²)`.
pub fn almost_invariant_g(state: &PhaseState) -> f64 {
    0.5 * (state.u.dot(&state.u) + state.v.dot(&state.v))
}

/// Krein quantity `k(w) = i Σ (w ẇ̄ - w̄ ẇ) = 2 Σ Im(w̄ ẇ)` of a complex
/// solution of the linearized equation, given real and imaginary parts.
pub fn linear_krein(w_re: &[f64], w_im: &[f64], wdot_re: &[f64], wdot_im: &[f64]) -> f64 {
    // Im(conj(w) ẇ) = w_re ẇ_im - w_im ẇ_re
    2.0 * (0..w_re.len()).map(|n| w_re[n] * wdot_im[n] - w_im[n] * wdot_re[n]).sum::<f64>()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityOptions {
    pub seed: u64,
    /// Time between recorded samples; defaults to one breather period.
    pub sample_interval: Option<f64>,
    /// Phase samples of the reference orbit (at least 256).
    pub orbit_samples: usize,
    pub scheme: Scheme,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { seed: 0, sample_interval: None, orbit_samples: 256, scheme: Scheme::Strang }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityTrace {
    pub times: Vec<f64>,
    pub h_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub orbital_distance: Vec<f64>,
    pub eps: f64,
    pub p: u32,
    pub omega: f64,
    pub delta: f64,
    pub t_final: f64,
    pub step: f64,
    pub seed: u64,
    pub breather_norm: f64,
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    h: f64,
    g: f64,
    distance: f64,
}

impl StabilityTrace {
    pub fn max_distance(&self) -> f64 {
        self.orbital_distance.iter().cloned().fold(0.0, f64::max)
    }

    /// `max_t |G(t) - G(0)|`.
    pub fn max_g_variation(&self) -> f64 {
        let g0 = self.g_values[0];
        self.g_values.iter().map(|g| (g - g0).abs()).fold(0.0, f64::max)
    }

    /// `max_t |H(t) - H(0)| / |H(0)|`.
    pub fn relative_h_oscillation(&self) -> f64 {
        let h0 = self.h_values[0];
        self.h_values.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max) / h0.abs()
    }

    /// Difference of the mean energy over the last and first tenth of the
    /// run, relative to `|H(0)|`; a secular drift shows up here.
    pub fn relative_h_trend(&self) -> f64 {
        let n = self.h_values.len();
        let k = (n / 10).max(1);
        let first = self.h_values[..k].iter().sum::<f64>() / k as f64;
        let last = self.h_values[n - k..].iter().sum::<f64>() / k as f64;
        (last - first).abs() / self.h_values[0].abs()
    }

    /// Least-squares slope of `H(t)` times the run length, relative to `|H(0)|`.
    pub fn relative_h_drift(&self) -> f64 {
        let n = self.times.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let tm = self.times.iter().sum::<f64>() / n;
        let hm = self.h_values.iter().sum::<f64>() / n;
        let sxy: f64 = self.times.iter().zip(&self.h_values).map(|(t, h)| (t - tm) * (h - hm)).sum();
        let sxx: f64 = self.times.iter().map(|t| (t - tm).powi(2)).sum();
        let span = self.times[self.times.len() - 1] - self.times[0];
        (sxy / sxx * span).abs() / self.h_values[0].abs()
    }

    /// Writes `trace.csv` (t, H, G, distance) and `manifest.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let rows: Vec<TraceRow> = (0..self.times.len())
            .map(|i| TraceRow {
                t: self.times[i],
                h: self.h_values[i],
                g: self.g_values[i],
                distance: self.orbital_distance[i],
            })
            .collect();
        crate::io::write_csv_rows(&dir.join("trace.csv"), &rows)?;
        let manifest = serde_json::json!({
            "eps": self.eps,
            "p": self.p,
            "omega": self.omega,
            "delta": self.delta,
            "t_final": self.t_final,
            "step": self.step,
            "seed": self.seed,
            "breather_norm": self.breather_norm,
            "samples": self.times.len(),
            "max_distance": self.max_distance(),
            "max_g_variation": self.max_g_variation(),
            "relative_h_oscillation": self.relative_h_oscillation(),
        });
        crate::io::write_json(&dir.join("manifest.json"), &manifest)
    }
}

/// Distance from a phase point to the periodic orbit of a breather:
/// coarse search over sampled phases, then golden-section refinement on
/// the exact cosine series around the best sample.
pub struct OrbitDistance<'a> {
    breather: &'a BreatherSolution,
    samples: Vec<(f64, Vec<f64>, Vec<f64>)>,
}

impl<'a> OrbitDistance<'a> {
    pub fn new(breather: &'a BreatherSolution, samples: usize) -> Self {
        let n = samples.max(256);
        let samples = (0..n)
            .map(|k| {
                let tau = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                let (u, v) = breather.phase_point(tau);
                (tau, u, v)
            })
            .collect();
        Self { breather, samples }
    }

    fn dist2(u: &[f64], v: &[f64], ou: &[f64], ov: &[f64]) -> f64 {
        u.iter().zip(ou).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            + v.iter().zip(ov).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    }

    pub fn distance(&self, u: &[f64], v: &[f64]) -> f64 {
        let (best, d2) = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, (_, ou, ov))| (k, Self::dist2(u, v, ou, ov)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        let dtau = 2.0 * std::f64::consts::PI / self.samples.len() as f64;
        let center = self.samples[best].0;
        let f = |tau: f64| {
            let (ou, ov) = self.breather.phase_point(tau);
            Self::dist2(u, v, &ou, &ov)
        };
        let (mut a, mut b) = (center - dtau, center + dtau);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..40 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = f(d);
            }
        }
        d2.min(fc).min(fd).sqrt()
    }
}

/// Random field pair `(du, dv)` with `‖(du, dv)‖ = delta`, deterministic in `seed`.
pub fn random_perturbation(grid: LatticeGrid, delta: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = grid.num_sites();
    let mut du: Vec<f64> = (0..s).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut dv: Vec<f64> = (0..s).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = (du.iter().chain(&dv).map(|x| x * x).sum::<f64>()).sqrt();
    let scale = if n > 0.0 { delta / n } else { 0.0 };
    du.iter_mut().chain(dv.iter_mut()).for_each(|x| *x *= scale);
    (du, dv)
}

pub fn orbital_stability_run(b: &BreatherSolution, delta: f64, t_final: f64, h: f64) -> Result<StabilityTrace> {
    orbital_stability_run_with(b, delta, t_final, h, &StabilityOptions::default())
}

/// Perturbs the breather's initial state by a random field of norm `delta`,
/// integrates to `t_final` and records `H`, `G` and the distance to the
/// breather orbit at regular intervals.
pub fn orbital_stability_run_with(
    b: &BreatherSolution,
    delta: f64,
    t_final: f64,
    h: f64,
    opts: &StabilityOptions,
) -> Result<StabilityTrace> {
    orbital_stability_run_observed(b, delta, t_final, h, opts, |_| {})
}

/// As [`orbital_stability_run_with`], calling `observe` on every recorded state.
pub fn orbital_stability_run_observed(
    b: &BreatherSolution,
    delta: f64,
    t_final: f64,
    h: f64,
    opts: &StabilityOptions,
    mut observe: impl FnMut(&PhaseState),
) -> Result<StabilityTrace> {
    if !(h > 0.0) || !(t_final >= 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidInput("need h > 0, t_final >= 0, delta >= 0".into()));
    }
    let grid = b.grid;
    let mut state = b.initial_state();
    let breather_norm = state.norm();
    let (du, dv) = random_perturbation(grid, delta, opts.seed);
    state.u.values.iter_mut().zip(&du).for_each(|(x, d)| *x += d);
    state.v.values.iter_mut().zip(&dv).for_each(|(x, d)| *x += d);

    let orbit = OrbitDistance::new(b, opts.orbit_samples);
    let mut integ = Integrator::new(grid, b.eps, b.params.p, opts.scheme);
    let interval = opts.sample_interval.unwrap_or(b.period());
    let steps_per_sample = ((interval / h).round() as usize).max(1);
    let total_steps = (t_final / h).round() as usize;

    let mut trace = StabilityTrace {
        times: Vec::new(),
        h_values: Vec::new(),
        g_values: Vec::new(),
        orbital_distance: Vec::new(),
        eps: b.eps,
        p: b.params.p,
        omega: b.omega,
        delta,
        t_final,
        step: h,
        seed: opts.seed,
        breather_norm,
    };
    let mut record = |s: &PhaseState, trace: &mut StabilityTrace| {
        observe(s);
        trace.times.push(s.time);
        trace.h_values.push(hamiltonian(s, b.eps, b.params.p));
        trace.g_values.push(almost_invariant_g(s));
        trace.orbital_distance.push(orbit.distance(&s.u.values, &s.v.values));
    };
    record(&state, &mut trace);
    let mut done = 0;
    while done < total_steps {
        let n = steps_per_sample.min(total_steps - done);
        for _ in 0..n {
            integ.advance(&mut state.u.values, &mut state.v.values, h);
        }
        done += n;
        state.time = done as f64 * h;
        record(&state, &mut trace);
    }
    Ok(trace)
}
