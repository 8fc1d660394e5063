//! dKG breathers as Fourier-cosine series in `τ = ωt`,
//!
//! ```text
//! u_n(t) = U_n(ωt),   U(τ) = A^(0) + 2 Σ_{m≥1} A^(m) cos(mτ),
//! ```
//!
//! solving for each retained harmonic
//!
//! ```text
//! (1 - m²ω²) A^(m) + ε ⟨U^{2p+1}, cos mτ⟩ - ε Δ A^(m) = 0,
//! ```
//!
//! where `⟨f, cos mτ⟩ = (1/2π) ∫ f cos mτ dτ` is evaluated by the trapezoidal
//! rule on enough points to integrate the truncated nonlinearity exactly.

use std::f64::consts::PI;
use std::path::Path;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dnls::{DnlsParams, SolitonBranch, MAX_NEWTON_ITERATIONS};
use crate::dynamics::{Integrator, PhaseState, Scheme};
use crate::error::{Error, Result};
use crate::lattice::{l2_norm, LatticeGrid, RealField};

/// Default Newton tolerance of the breather solver.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Largest harmonic cutoff reached by automatic doubling.
pub const MAX_HARMONICS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SolveMode {
    /// `ω² = 1 - εΩ` with `Ω` fixed.
    #[default]
    FixFrequencyParam,
    /// `ω` held at the seed's value.
    FixPeriod,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BreatherSolution {
    pub grid: LatticeGrid,
    /// `A^(m)` for `m = 0..=M`.
    pub harmonics: Vec<RealField>,
    pub omega: f64,
    pub eps: f64,
    pub params: DnlsParams,
    pub residual_norm: f64,
}

/// Default harmonic cutoff `2p + 6`.
pub fn default_harmonics(p: u32) -> usize {
    2 * p as usize + 6
}

/// `ω = sqrt(1 - εΩ)`.
pub fn breather_frequency(eps: f64, omega_param: f64) -> Result<f64> {
    let value = 1.0 - eps * omega_param;
    if !(value > 0.0) {
        return Err(Error::InvalidFrequency { value });
    }
    Ok(value.sqrt())
}

/// Trapezoidal nodes on `[-π, π)`: the smallest power of two exceeding
/// `(2p+2) M`, which integrates `U^{2p+1} cos mτ` exactly for `m ≤ M`.
pub fn quadrature_points(p: u32, m: usize) -> usize {
    ((2 * p as usize + 2) * m + 1).next_power_of_two()
}

struct Quadrature {
    q: usize,
    /// `cos(m τ_q)` for `m = 0..=M`, row-major `[m][q]`.
    cos: Vec<Vec<f64>>,
}

impl Quadrature {
    fn new(p: u32, m: usize) -> Self {
        let q = quadrature_points(p, m);
        let cos = (0..=m)
            .map(|k| (0..q).map(|j| (k as f64 * tau(j, q)).cos()).collect())
            .collect();
        Self { q, cos }
    }
}

fn tau(j: usize, q: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / q as f64
}

fn weight(m: usize) -> f64 {
    if m == 0 {
        1.0
    } else {
        2.0
    }
}

/// `U_n(τ_q)` for all sites and nodes, row-major `[n][q]`.
fn synthesize(harmonics: &[&[f64]], quad: &Quadrature) -> Vec<Vec<f64>> {
    let s = harmonics[0].len();
    (0..s)
        .map(|n| {
            (0..quad.q)
                .map(|j| harmonics.iter().enumerate().map(|(m, a)| weight(m) * a[n] * quad.cos[m][j]).sum())
                .collect()
        })
        .collect()
}

fn residual_vec(x: &[f64], grid: &LatticeGrid, p: u32, omega: f64, eps: f64, quad: &Quadrature) -> Vec<f64> {
    let s = grid.num_sites();
    let mh = x.len() / s - 1;
    let harmonics: Vec<&[f64]> = x.chunks(s).collect();
    let u = synthesize(&harmonics, quad);
    let p21 = 2 * p as i32 + 1;
    let mut out = vec![0.0; x.len()];
    let mut lap = vec![0.0; s];
    for m in 0..=mh {
        let a = harmonics[m];
        grid.laplacian_into(a, &mut lap);
        let lin = 1.0 - (m * m) as f64 * omega * omega;
        for n in 0..s {
            let proj: f64 = u[n].iter().zip(&quad.cos[m]).map(|(v, c)| v.powi(p21) * c).sum::<f64>() / quad.q as f64;
            out[m * s + n] = lin * a[n] + eps * proj - eps * lap[n];
        }
    }
    out
}

fn jacobian_mat(x: &[f64], grid: &LatticeGrid, p: u32, omega: f64, eps: f64, quad: &Quadrature) -> Mat<f64> {
    let s = grid.num_sites();
    let mh = x.len() / s - 1;
    let harmonics: Vec<&[f64]> = x.chunks(s).collect();
    let u = synthesize(&harmonics, quad);
    let p2 = 2 * p as i32;
    let k = eps * (2 * p + 1) as f64 / quad.q as f64;
    let dim = x.len();
    let mut jac = Mat::<f64>::zeros(dim, dim);
    let lap = crate::lattice::laplacian_matrix(grid);
    for m in 0..=mh {
        let lin = 1.0 - (m * m) as f64 * omega * omega;
        for i in 0..s {
            for j in 0..s {
                let l = lap[(i, j)];
                if l != 0.0 {
                    jac[(m * s + i, m * s + j)] -= eps * l;
                }
            }
            jac[(m * s + i, m * s + i)] += lin;
        }
    }
    for n in 0..s {
        let w: Vec<f64> = u[n].iter().map(|v| v.powi(p2)).collect();
        for m in 0..=mh {
            for kk in 0..=mh {
                let val: f64 = (0..quad.q).map(|j| w[j] * quad.cos[m][j] * quad.cos[kk][j]).sum::<f64>();
                jac[(m * s + n, kk * s + n)] += k * weight(kk) * val;
            }
        }
    }
    jac
}

impl BreatherSolution {
    /// Harmonic cutoff `M`.
    pub fn num_harmonics(&self) -> usize {
        self.harmonics.len() - 1
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    fn flat(&self) -> Vec<f64> {
        self.harmonics.iter().flat_map(|h| h.values.iter().copied()).collect()
    }

    fn with_flat(&self, x: &[f64]) -> Self {
        let s = self.grid.num_sites();
        let harmonics = x.chunks(s).map(|c| RealField { grid: self.grid, values: c.to_vec() }).collect();
        Self { harmonics, ..self.clone() }
    }

    pub fn harmonic_norms(&self) -> Vec<f64> {
        self.harmonics.iter().map(l2_norm).collect()
    }

    /// `max(‖A^(M)‖, ‖A^(M-1)‖)`; both are checked because even harmonics vanish.
    pub fn tail_norm(&self) -> f64 {
        let n = self.harmonic_norms();
        let m = n.len() - 1;
        n[m].max(n[m - 1])
    }

    /// Tail diagnostic `tail_norm < 1e-3 ‖A^(1)‖`.
    pub fn tail_ok(&self) -> bool {
        self.tail_norm() < 1e-3 * l2_norm(&self.harmonics[1])
    }

    /// Kernel/range split: `(‖A^♯‖, ‖A^♭‖)` with `A^♯ = A^(1)` and `A^♭` the
    /// remaining harmonics.
    pub fn kernel_range_split(&self) -> (f64, f64) {
        let n = self.harmonic_norms();
        let flat = n.iter().enumerate().filter(|(m, _)| *m != 1).map(|(_, v)| v * v).sum::<f64>().sqrt();
        (n[1], flat)
    }

    /// `(U(τ), ω U'(τ))`: the phase point of the orbit at `τ = ωt`.
    pub fn phase_point(&self, tau: f64) -> (Vec<f64>, Vec<f64>) {
        let s = self.grid.num_sites();
        let mut u = vec![0.0; s];
        let mut v = vec![0.0; s];
        for (m, a) in self.harmonics.iter().enumerate() {
            let (sn, cs) = (m as f64 * tau).sin_cos();
            let w = weight(m);
            for n in 0..s {
                u[n] += w * a.values[n] * cs;
                v[n] -= w * self.omega * m as f64 * a.values[n] * sn;
            }
        }
        (u, v)
    }

    /// `(u, u̇)` at `t = 0`; `u̇(0) = 0` for the cosine series.
    pub fn initial_state(&self) -> PhaseState {
        let (u, v) = self.phase_point(0.0);
        PhaseState { u: RealField { grid: self.grid, values: u }, v: RealField { grid: self.grid, values: v }, time: 0.0 }
    }

    /// Writes `manifest.json` and `harmonic_<m>.csv` for each retained `m`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let manifest = BreatherManifest {
            eps: self.eps,
            omega: self.omega,
            omega_param: self.params.omega,
            p: self.params.p,
            dim: self.grid.dim,
            radius: self.grid.radius,
            boundary: self.grid.boundary.to_string(),
            harmonics: self.num_harmonics(),
            residual_norm: self.residual_norm,
        };
        crate::io::write_json(&dir.join("manifest.json"), &manifest)?;
        for (m, h) in self.harmonics.iter().enumerate() {
            h.save_csv(&dir.join(format!("harmonic_{m}.csv")))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: BreatherManifest = serde_json::from_slice(&std::fs::read(dir.join("manifest.json"))?)?;
        let grid = LatticeGrid::new(manifest.dim, manifest.radius, manifest.boundary.parse()?)?;
        let harmonics = (0..=manifest.harmonics)
            .map(|m| RealField::load_csv(&dir.join(format!("harmonic_{m}.csv"))))
            .collect::<Result<Vec<_>>>()?;
        if harmonics.iter().any(|h| h.grid != grid) {
            return Err(Error::InvalidInput("harmonic files disagree with the manifest grid".into()));
        }
        Ok(Self {
            grid,
            harmonics,
            omega: manifest.omega,
            eps: manifest.eps,
            params: DnlsParams::new(manifest.p, manifest.omega_param, manifest.dim)?,
            residual_norm: manifest.residual_norm,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct BreatherManifest {
    eps: f64,
    omega: f64,
    omega_param: f64,
    p: u32,
    dim: usize,
    radius: usize,
    boundary: String,
    harmonics: usize,
    residual_norm: f64,
}

/// Residual of the truncated harmonic balance, one field per harmonic.
pub fn breather_residual(b: &BreatherSolution) -> Vec<RealField> {
    let quad = Quadrature::new(b.params.p, b.num_harmonics());
    let r = residual_vec(&b.flat(), &b.grid, b.params.p, b.omega, b.eps, &quad);
    b.with_flat(&r).harmonics
}

pub fn residual_norm(b: &BreatherSolution) -> f64 {
    breather_residual(b).iter().map(|f| f.dot(f)).sum::<f64>().sqrt()
}

/// Dense Jacobian of [`breather_residual`] with respect to all harmonics
/// (block `(m, k)` is `S × S`, ordered by harmonic then site).
pub fn breather_jacobian(b: &BreatherSolution) -> Mat<f64> {
    let quad = Quadrature::new(b.params.p, b.num_harmonics());
    jacobian_mat(&b.flat(), &b.grid, b.params.p, b.omega, b.eps, &quad)
}

/// Largest `|(1/2π) ∫ U^{2p+1} sin mτ dτ|` over sites and harmonics: the
/// part of the nonlinear projection that must vanish for cosine data.
pub fn projection_sine_part(b: &BreatherSolution) -> f64 {
    let mh = b.num_harmonics();
    let quad = Quadrature::new(b.params.p, mh);
    let x = b.flat();
    let s = b.grid.num_sites();
    let harmonics: Vec<&[f64]> = x.chunks(s).collect();
    let u = synthesize(&harmonics, &quad);
    let p21 = 2 * b.params.p as i32 + 1;
    let mut worst: f64 = 0.0;
    for m in 0..=mh {
        for row in &u {
            let v: f64 = (0..quad.q).map(|j| row[j].powi(p21) * (m as f64 * tau(j, quad.q)).sin()).sum::<f64>();
            worst = worst.max((v / quad.q as f64).abs());
        }
    }
    worst
}

/// Seed from the dNLS limit: `ω = sqrt(1 - εΩ)`, `A^(1) = 𝒜`, other harmonics zero.
pub fn seed_from_soliton(branch: &SolitonBranch, eps: f64, m: usize) -> Result<BreatherSolution> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    if m < 3 {
        return Err(Error::InvalidInput("harmonic cutoff M must be at least 3".into()));
    }
    let omega = breather_frequency(eps, branch.params.omega)?;
    let grid = branch.amplitude.grid;
    let mut harmonics = vec![RealField::zeros(grid); m + 1];
    harmonics[1] = branch.amplitude.clone();
    let mut b = BreatherSolution { grid, harmonics, omega, eps, params: branch.params, residual_norm: 0.0 };
    b.residual_norm = residual_norm(&b);
    Ok(b)
}

/// Newton iteration on all retained harmonics at fixed `ω`. In
/// `FixFrequencyParam` mode `ω` is reset to `sqrt(1 - εΩ)` first. The
/// harmonic cutoff is doubled (up to [`MAX_HARMONICS`]) while the tail
/// diagnostic fails.
pub fn solve_breather(seed: &BreatherSolution, tol: f64, mode: SolveMode) -> Result<BreatherSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let mut current = seed.clone();
    if mode == SolveMode::FixFrequencyParam {
        current.omega = breather_frequency(seed.eps, seed.params.omega)?;
    }
    loop {
        let solved = newton_at_fixed_omega(&current, tol)?;
        if solved.tail_ok() || solved.num_harmonics() * 2 > MAX_HARMONICS {
            return Ok(solved);
        }
        let mut grown = solved;
        let m = grown.num_harmonics();
        grown.harmonics.extend((0..m).map(|_| RealField::zeros(grown.grid)));
        current = grown;
    }
}

fn newton_at_fixed_omega(b: &BreatherSolution, tol: f64) -> Result<BreatherSolution> {
    let quad = Quadrature::new(b.params.p, b.num_harmonics());
    let (grid, p, omega, eps) = (b.grid, b.params.p, b.omega, b.eps);
    let (x, rn, _) = crate::dnls::newton(
        b.flat(),
        tol,
        MAX_NEWTON_ITERATIONS,
        |x| residual_vec(x, &grid, p, omega, eps, &quad),
        |x| jacobian_mat(x, &grid, p, omega, eps, &quad),
    )?;
    let mut out = b.with_flat(&x);
    out.residual_norm = rn;
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub eps_list: Vec<f64>,
    /// `|ω(ε) - 1 + εΩ/2|`.
    pub omega_err: Vec<f64>,
    /// `‖A^(1) - 𝒜‖`.
    pub profile_err: Vec<f64>,
    /// `‖A^(0)‖ + Σ_{m≥2} ‖A^(m)‖`.
    pub tail_err: Vec<f64>,
    /// Log-log slopes of the three error columns (NaN when not computable).
    pub fitted_slopes: [f64; 3],
    /// `(ε, error)` for sweep points whose solve failed.
    pub failures: Vec<(f64, String)>,
}

#[derive(Serialize)]
struct BoundRow {
    eps: f64,
    omega_err: f64,
    profile_err: f64,
    tail_err: f64,
}

impl BoundReport {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<BoundRow> = (0..self.eps_list.len())
            .map(|i| BoundRow {
                eps: self.eps_list[i],
                omega_err: self.omega_err[i],
                profile_err: self.profile_err[i],
                tail_err: self.tail_err[i],
            })
            .collect();
        crate::io::write_csv_rows(path, &rows)
    }
}

/// Solves the breather at every `ε` (in parallel) and fits the scaling of
/// the frequency, profile and tail errors against the dNLS reference.
pub fn verify_bounds(branch: &SolitonBranch, eps_list: &[f64], tol: f64) -> Result<BoundReport> {
    verify_bounds_with(branch, eps_list, tol, default_harmonics(branch.params.p))
}

pub fn verify_bounds_with(branch: &SolitonBranch, eps_list: &[f64], tol: f64, m: usize) -> Result<BoundReport> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("eps_list must be strictly decreasing".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0 && *e < 0.1)) {
        return Err(Error::InvalidInput("every eps must lie in (0, 0.1)".into()));
    }
    let results: Vec<(f64, Result<BreatherSolution>)> = eps_list
        .par_iter()
        .map(|&eps| (eps, seed_from_soliton(branch, eps, m).and_then(|s| solve_breather(&s, tol, SolveMode::FixFrequencyParam))))
        .collect();
    let mut report = BoundReport {
        eps_list: Vec::new(),
        omega_err: Vec::new(),
        profile_err: Vec::new(),
        tail_err: Vec::new(),
        fitted_slopes: [f64::NAN; 3],
        failures: Vec::new(),
    };
    for (eps, r) in results {
        match r {
            Ok(b) => {
                let norms = b.harmonic_norms();
                report.eps_list.push(eps);
                report.omega_err.push((b.omega - 1.0 + eps * branch.params.omega / 2.0).abs());
                report.profile_err.push(l2_norm(&b.harmonics[1].sub(&branch.amplitude)));
                report.tail_err.push(norms[0] + norms[2..].iter().sum::<f64>());
            }
            Err(e) => report.failures.push((eps, e.to_string())),
        }
    }
    let slope = |y: &[f64]| crate::fit::loglog_slope(&report.eps_list, y).unwrap_or(f64::NAN);
    report.fitted_slopes = [slope(&report.omega_err), slope(&report.profile_err), slope(&report.tail_err)];
    Ok(report)
}

/// Integrates the dKG lattice over one period from the breather's initial
/// state with the fourth-order splitting at `h = T/2000` and returns
/// `‖z(T) - z(0)‖ / ‖z(0)‖`. Fails if the breather residual exceeds `tol`.
pub fn time_domain_check(b: &BreatherSolution, tol: f64) -> Result<f64> {
    if !(b.residual_norm <= tol) {
        return Err(Error::InvalidInput(format!("breather residual {} exceeds {tol}", b.residual_norm)));
    }
    Ok(return_map_error(b, 2000, Scheme::Yoshida4))
}

/// One-period return-map error with `steps` steps of the given scheme.
pub fn return_map_error(b: &BreatherSolution, steps: usize, scheme: Scheme) -> f64 {
    let z0 = b.initial_state();
    let mut z = z0.clone();
    let h = b.period() / steps as f64;
    Integrator::new(b.grid, b.eps, b.params.p, scheme).advance_state(&mut z, h, steps);
    z.distance(&z0) / z0.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnls::{single_pulse_soliton, solve_focusing_soliton, anticontinuum_focusing_seed};
    use crate::lattice::stagger;

    fn branch(n: usize) -> SolitonBranch {
        single_pulse_soliton(1, 5.0, &LatticeGrid::dirichlet(1, n), 1e-13).unwrap()
    }

    #[test]
    fn frequency_examples() {
        assert!((breather_frequency(0.01, -6.0).unwrap() - 1.06f64.sqrt()).abs() < 1e-15);
        assert!(matches!(breather_frequency(1.0, 2.0), Err(Error::InvalidFrequency { .. })));
        assert_eq!(quadrature_points(1, 8), 64);
    }

    #[test]
    fn uncoupled_harmonic_residual_vanishes() {
        let g = LatticeGrid::dirichlet(1, 4);
        let mut harmonics = vec![RealField::zeros(g); 4];
        harmonics[1] = RealField::from_fn(g, |c| 1.0 + c[0] as f64);
        let params = DnlsParams::new(1, -9.0, 1).unwrap();
        let b = BreatherSolution { grid: g, harmonics, omega: 1.0, eps: 0.0, params, residual_norm: 0.0 };
        assert_eq!(residual_norm(&b), 0.0);
    }

    #[test]
    fn seed_residual_is_the_third_harmonic_forcing() {
        let br = branch(15);
        let eps = 1e-3;
        let seed = seed_from_soliton(&br, eps, 5).unwrap();
        let r = breather_residual(&seed);
        assert!(l2_norm(&r[1]) < 1e-13);
        let cube = br.amplitude.map(|a| eps * a * a * a);
        assert!(l2_norm(&r[3].sub(&cube)) < 1e-15);
        assert!(seed_from_soliton(&br, 0.0, 5).is_err());
        assert!(seed_from_soliton(&br, 0.01, 2).is_err());
    }

    #[test]
    fn converged_breather_properties() {
        let br = branch(15);
        let seed = seed_from_soliton(&br, 0.05, 8).unwrap();
        let b = solve_breather(&seed, 1e-12, SolveMode::FixFrequencyParam).unwrap();
        assert!(b.residual_norm < 1e-12);
        assert!(b.tail_ok());
        for m in (0..=8).step_by(2) {
            assert!(l2_norm(&b.harmonics[m]) < 1e-12, "even harmonic {m}");
        }
        assert!(projection_sine_part(&b) < 1e-14);
        let (sharp, flat) = b.kernel_range_split();
        assert!(flat < 0.02 * sharp);
        // leading order: (1 - 9ω²) A^(3) + ε 𝒜³ ≈ 0
        let lead = 0.05 * l2_norm(&br.amplitude.map(|a| a.powi(3))) / (9.0 * b.omega * b.omega - 1.0);
        assert!((l2_norm(&b.harmonics[3]) / lead - 1.0).abs() < 0.2);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let br = branch(6);
        let mut b = seed_from_soliton(&br, 0.05, 5).unwrap();
        b.harmonics[3] = br.amplitude.scaled(0.1);
        b.harmonics[0] = br.amplitude.scaled(-0.05);
        let jac = breather_jacobian(&b);
        let x = b.flat();
        let dir: Vec<f64> = (0..x.len()).map(|i| ((i * 13 % 7) as f64 - 3.0) / 5.0).collect();
        let jv = crate::linalg::matvec_real(&jac, &dir);
        let quad = Quadrature::new(1, 5);
        let err = |h: f64| {
            let xp: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + h * d).collect();
            let xm: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a - h * d).collect();
            let rp = residual_vec(&xp, &b.grid, 1, b.omega, b.eps, &quad);
            let rm = residual_vec(&xm, &b.grid, 1, b.omega, b.eps, &quad);
            crate::linalg::norm(&(0..x.len()).map(|i| (rp[i] - rm[i]) / (2.0 * h) - jv[i]).collect::<Vec<_>>())
        };
        let order = (err(1e-2) / err(5e-3)).log2();
        assert!(order >= 1.9, "order {order}");
    }

    #[test]
    fn staggered_and_direct_seeds_give_the_same_breather() {
        let g = LatticeGrid::dirichlet(1, 15);
        let tol = 1e-12;
        let direct = branch(15);
        let focus = solve_focusing_soliton(1, 5.0, &g, &anticontinuum_focusing_seed(&g, 1, 5.0), 1e-13).unwrap();
        let mut via = direct.clone();
        via.amplitude = stagger(&focus, 5.0).0;
        let b1 = solve_breather(&seed_from_soliton(&direct, 0.02, 8).unwrap(), tol, SolveMode::FixFrequencyParam).unwrap();
        let b2 = solve_breather(&seed_from_soliton(&via, 0.02, 8).unwrap(), tol, SolveMode::FixFrequencyParam).unwrap();
        let diff: f64 = b1.harmonics.iter().zip(&b2.harmonics).map(|(a, b)| l2_norm(&a.sub(b)).powi(2)).sum::<f64>().sqrt();
        assert!(diff < 2.0 * tol, "{diff}");
    }

    #[test]
    fn fix_period_mode_keeps_omega() {
        let br = branch(12);
        let mut seed = seed_from_soliton(&br, 0.02, 8).unwrap();
        seed.omega = 1.0 - 0.02 * br.params.omega / 2.0;
        let b = solve_breather(&seed, 1e-12, SolveMode::FixPeriod).unwrap();
        assert_eq!(b.omega, seed.omega);
        assert!(b.residual_norm < 1e-12);
    }

    #[test]
    fn periodicity_oracle() {
        let br = branch(15);
        let b = solve_breather(&seed_from_soliton(&br, 0.05, 8).unwrap(), 1e-12, SolveMode::FixFrequencyParam).unwrap();
        let err = time_domain_check(&b, 1e-11).unwrap();
        assert!(err < 1e-6, "{err}");
        let mut bad = b.clone();
        bad.harmonics[1] = bad.harmonics[1].scaled(1.01);
        assert!(return_map_error(&bad, 2000, Scheme::Yoshida4) > 1e-3);
        // uncoupled single harmonic: exact orbit of the rotation
        let mut free = b.clone();
        free.eps = 0.0;
        free.omega = 1.0;
        free.harmonics.iter_mut().skip(2).for_each(|h| *h = RealField::zeros(h.grid));
        free.harmonics[0] = RealField::zeros(free.grid);
        assert!(return_map_error(&free, 2000, Scheme::Strang) < 1e-12);
    }

    #[test]
    fn save_and_load_round_trip() {
        let br = branch(6);
        let b = solve_breather(&seed_from_soliton(&br, 0.02, 5).unwrap(), 1e-12, SolveMode::FixFrequencyParam).unwrap();
        let dir = tempfile::tempdir().unwrap();
        b.save(dir.path()).unwrap();
        let c = BreatherSolution::load(dir.path()).unwrap();
        assert_eq!(c.harmonics, b.harmonics);
        assert_eq!(c.omega, b.omega);
    }
}
