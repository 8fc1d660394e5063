//! Floquet spectrum of a breather by Hill's method.
//!
//! Writing a solution of the linearized lattice equation
//! `ẅ + w + ε(1+2p) U^{2p} w = εΔw` as `w = e^{λt} Σ_m B^(m) e^{imτ}`
//! gives the quadratic eigenvalue problem
//!
//! ```text
//! T(λ) B = λ² B + λ D₁ B + K₀ B = 0,   D₁ = diag(2imω),
//! K₀ = diag(1 - m²ω²) - εΔ + ε(1+2p) C,
//! ```
//!
//! where `C` convolves harmonics with the Fourier coefficients of `U^{2p}`.
//! It is solved through its first companion linearization. A direct
//! integration of the variational equations over one period (monodromy
//! matrix) serves as an independent check.

use std::f64::consts::PI;
use std::path::Path;

use faer::{c64, Mat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dnls::{band_distance, DnlsSpectralPair, SolitonBranch};
use crate::error::{Error, Result};
use crate::kg_breather::{default_harmonics, seed_from_soliton, solve_breather, BreatherSolution, SolveMode};
use crate::lattice::LatticeGrid;
use crate::linalg;

/// Default cap on the companion matrix dimension `2 (2M+1) S`.
pub const DEFAULT_DIMENSION_CAP: usize = 6000;
/// Default cap on `2S` for the monodromy oracle.
pub const DEFAULT_MONODROMY_CAP: usize = 400;

#[derive(Debug, Clone)]
pub struct HillProblem {
    pub grid: LatticeGrid,
    pub omega: f64,
    pub eps: f64,
    pub p: u32,
    /// Harmonics `m = -M..=M` are retained.
    pub m_spec: usize,
    /// `K₀`, size `(2M+1)S`.
    pub k0: Mat<c64>,
    /// `[[0, I], [-K₀, -D₁]]`.
    pub companion: Mat<c64>,
}

impl HillProblem {
    pub fn size(&self) -> usize {
        (2 * self.m_spec + 1) * self.grid.num_sites()
    }

    /// `T(λ) v`.
    pub fn apply(&self, lambda: c64, v: &[c64]) -> Vec<c64> {
        let s = self.grid.num_sites();
        let mut out = linalg::matvec_complex(&self.k0, v);
        for (idx, o) in out.iter_mut().enumerate() {
            let m = (idx / s) as f64 - self.m_spec as f64;
            *o += (lambda * lambda + lambda * c64::new(0.0, 2.0 * m * self.omega)) * v[idx];
        }
        out
    }
}

/// Fourier coefficients `C^(j)_n = (1/2π) ∫ U_n^{2p} e^{-ijτ} dτ` for
/// `j = 0..=jmax` (real and even in `j` for a cosine series).
fn power_coefficients(b: &BreatherSolution, jmax: usize) -> Vec<Vec<f64>> {
    let p = b.params.p;
    let q = (2 * p as usize * b.num_harmonics() + jmax + 1).next_power_of_two();
    let s = b.grid.num_sites();
    let mut out = vec![vec![0.0; s]; jmax + 1];
    for k in 0..q {
        let tau = -PI + 2.0 * PI * k as f64 / q as f64;
        let (u, _) = b.phase_point(tau);
        for n in 0..s {
            let w = u[n].powi(2 * p as i32) / q as f64;
            for (j, row) in out.iter_mut().enumerate() {
                row[n] += w * (j as f64 * tau).cos();
            }
        }
    }
    out
}

pub fn hill_assemble(b: &BreatherSolution, m_spec: usize) -> Result<HillProblem> {
    hill_assemble_capped(b, m_spec, DEFAULT_DIMENSION_CAP)
}

/// Builds `K₀` and the companion matrix. Requires `m_spec ≥ M` of the breather.
pub fn hill_assemble_capped(b: &BreatherSolution, m_spec: usize, cap: usize) -> Result<HillProblem> {
    if m_spec < b.num_harmonics() {
        return Err(Error::InvalidInput(format!(
            "M_spec = {m_spec} is below the breather cutoff {}",
            b.num_harmonics()
        )));
    }
    let s = b.grid.num_sites();
    let nb = 2 * m_spec + 1;
    let n = nb * s;
    if 2 * n > cap {
        return Err(Error::DimensionOverflow { size: 2 * n, cap });
    }
    let coeffs = power_coefficients(b, 2 * m_spec);
    let lap = crate::lattice::laplacian_matrix(&b.grid);
    let eps = b.eps;
    let kc = eps * (1 + 2 * b.params.p) as f64;
    let mut k0 = Mat::<c64>::zeros(n, n);
    for mi in 0..nb {
        let m = mi as f64 - m_spec as f64;
        let lin = 1.0 - m * m * b.omega * b.omega;
        for i in 0..s {
            for j in 0..s {
                let l = lap[(i, j)];
                if l != 0.0 {
                    k0[(mi * s + i, mi * s + j)] -= c64::new(eps * l, 0.0);
                }
            }
            k0[(mi * s + i, mi * s + i)] += c64::new(lin, 0.0);
        }
        for ki in 0..nb {
            let j = (mi as isize - ki as isize).unsigned_abs();
            for site in 0..s {
                k0[(mi * s + site, ki * s + site)] += c64::new(kc * coeffs[j][site], 0.0);
            }
        }
    }
    let mut companion = Mat::<c64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        companion[(i, n + i)] = c64::new(1.0, 0.0);
        let m = (i / s) as f64 - m_spec as f64;
        companion[(n + i, n + i)] = c64::new(0.0, -2.0 * m * b.omega);
        for j in 0..n {
            let v = k0[(i, j)];
            if v != c64::new(0.0, 0.0) {
                companion[(n + i, j)] = -v;
            }
        }
    }
    Ok(HillProblem { grid: b.grid, omega: b.omega, eps, p: b.params.p, m_spec, k0, companion })
}

/// All eigenvalues of the companion matrix.
pub fn hill_eigenvalues(problem: &HillProblem) -> Result<Vec<c64>> {
    linalg::complex_eigenvalues(&problem.companion)
}

/// True when `Im λ ∈ (-ω/2, ω/2]`.
pub fn in_fundamental_strip(lambda: c64, omega: f64) -> bool {
    lambda.im > -0.5 * omega && lambda.im <= 0.5 * omega
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KgSpectralPair {
    pub lambda: c64,
    /// `B^(m)` for `m = -M..=M`, unit total norm.
    pub harmonics: Vec<Vec<c64>>,
    pub krein: f64,
    pub floquet: c64,
    /// `‖T(λ) B‖ / ‖B‖`.
    pub residual: f64,
    /// `2λ/ε` within `1e-3` of the dNLS band (leading-order location of the
    /// dKG continuous spectrum near `λ = 0`).
    pub near_band: bool,
}

impl KgSpectralPair {
    /// `B^(m)` for harmonic `m` (may be negative).
    pub fn harmonic(&self, m: isize) -> &[c64] {
        let mm = (self.harmonics.len() / 2) as isize;
        &self.harmonics[(m + mm) as usize]
    }
}

/// `μ = exp(2πλ/ω)`.
pub fn floquet_multiplier(lambda: c64, omega: f64) -> c64 {
    (lambda * (2.0 * PI / omega)).exp()
}

/// `K = iω Σ (W W̄' - W̄ W') - i(λ - λ̄) Σ |W|²`, averaged over `τ` and
/// evaluated on harmonics: `K = 2 Σ_m (mω + Im λ) ‖B^(m)‖²`.
pub fn krein_quantity(pair: &KgSpectralPair, omega: f64) -> f64 {
    krein_from_harmonics(&pair.harmonics, pair.lambda, omega)
}

fn krein_from_harmonics(h: &[Vec<c64>], lambda: c64, omega: f64) -> f64 {
    let mm = (h.len() / 2) as f64;
    h.iter()
        .enumerate()
        .map(|(k, b)| {
            let m = k as f64 - mm;
            2.0 * (m * omega + lambda.im) * b.iter().map(|x| x.norm_sqr()).sum::<f64>()
        })
        .sum()
}

fn pair_from_eigenvalue(problem: &HillProblem, approx: c64) -> Result<KgSpectralPair> {
    let (v, lambda) = linalg::inverse_iteration(&problem.companion, approx, 3)?;
    let n = problem.size();
    let s = problem.grid.num_sites();
    let mut top = v[..n].to_vec();
    let nrm = linalg::cnorm(&top);
    if nrm == 0.0 {
        return Err(Error::EigenSolverFailure("vanishing eigenvector block".into()));
    }
    top.iter_mut().for_each(|x| *x /= nrm);
    let tb = problem.apply(lambda, &top);
    let residual = linalg::cnorm(&tb);
    let harmonics: Vec<Vec<c64>> = top.chunks(s).map(|c| c.to_vec()).collect();
    let krein = krein_from_harmonics(&harmonics, lambda, problem.omega);
    let near_band = if problem.eps > 0.0 {
        let (lo, hi) = kg_band(problem);
        band_distance(lambda * (2.0 / problem.eps), lo, hi) < 1e-3
    } else {
        false
    };
    Ok(KgSpectralPair {
        lambda,
        harmonics,
        krein,
        floquet: floquet_multiplier(lambda, problem.omega),
        residual,
        near_band,
    })
}

fn kg_band(problem: &HillProblem) -> (f64, f64) {
    let omega_param = (1.0 - problem.omega * problem.omega) / problem.eps;
    let d4 = 4.0 * problem.grid.dim as f64;
    let (a, b) = (omega_param.abs(), (omega_param + d4).abs());
    (a.min(b), a.max(b))
}

/// The `count` eigenvalues of the fundamental strip closest to zero, with
/// eigenvectors (by inverse iteration on the companion matrix), residuals,
/// Krein quantities and Floquet multipliers.
pub fn eigen_near_zero(problem: &HillProblem, count: usize) -> Result<Vec<KgSpectralPair>> {
    let vals = hill_eigenvalues(problem)?;
    let mut strip: Vec<c64> = vals.into_iter().filter(|l| in_fundamental_strip(*l, problem.omega)).collect();
    strip.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    strip.truncate(count);
    strip.iter().map(|&l| pair_from_eigenvalue(problem, l)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Breather harmonic cutoff; defaults to `2p + 6`.
    pub breather_harmonics: Option<usize>,
    pub m_spec: usize,
    pub tol: f64,
    pub dimension_cap: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { breather_harmonics: None, m_spec: 8, tol: 1e-12, dimension_cap: DEFAULT_DIMENSION_CAP }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralScalingReport {
    pub eps_list: Vec<f64>,
    /// `|λ(ε) - εΛ|`.
    pub lambda_err: Vec<f64>,
    /// Distance of the best-scaled dKG eigenvector from `(b_+ + i b_-, b_+ - i b_-)`
    /// in the `m = ±1` harmonics plus the norm of all other harmonics.
    pub vector_err: Vec<f64>,
    pub reference: DnlsSpectralPair,
    pub lambdas: Vec<c64>,
    pub krein: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Slopes of `lambda_err` and `vector_err`.
    pub fitted_slopes: [f64; 2],
    pub max_abs_re: f64,
    pub krein_sign_constant: bool,
    pub near_band: bool,
}

impl SpectralScalingReport {
    /// `Re λ` stays below `1e-8` in magnitude and `K` never changes sign,
    /// as required for an imaginary target with nonzero Krein signature.
    pub fn stays_on_imaginary_axis(&self) -> bool {
        self.max_abs_re < 1e-8 && self.krein_sign_constant
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            eps: f64,
            re_lambda: f64,
            im_lambda: f64,
            lambda_err: f64,
            vector_err: f64,
            krein: f64,
            residual: f64,
        }
        let rows: Vec<Row> = (0..self.eps_list.len())
            .map(|i| Row {
                eps: self.eps_list[i],
                re_lambda: self.lambdas[i].re,
                im_lambda: self.lambdas[i].im,
                lambda_err: self.lambda_err[i],
                vector_err: self.vector_err[i],
                krein: self.krein[i],
                residual: self.residuals[i],
            })
            .collect();
        crate::io::write_csv_rows(path, &rows)
    }
}

/// Error of `pair` against the dNLS eigenvector after optimal complex scaling.
pub fn eigenvector_error(pair: &KgSpectralPair, reference: &DnlsSpectralPair) -> f64 {
    let (r_plus, r_minus) = reference.kg_harmonics();
    let (b_plus, b_minus) = (pair.harmonic(1), pair.harmonic(-1));
    let dot = |x: &[c64], y: &[c64]| x.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<c64>();
    let num = dot(b_plus, &r_plus) + dot(b_minus, &r_minus);
    let den = dot(b_plus, b_plus) + dot(b_minus, b_minus);
    let alpha = num / den;
    let mm = (pair.harmonics.len() / 2) as isize;
    let mut err = 0.0;
    for (k, h) in pair.harmonics.iter().enumerate() {
        let m = k as isize - mm;
        let target: Option<&[c64]> = match m {
            1 => Some(&r_plus),
            -1 => Some(&r_minus),
            _ => None,
        };
        err += h
            .iter()
            .enumerate()
            .map(|(i, x)| (alpha * x - target.map_or(c64::new(0.0, 0.0), |t| t[i])).norm_sqr())
            .sum::<f64>();
    }
    err.sqrt()
}

/// Continues the dNLS eigenvalue `Λ` of `target` into the dKG spectrum for
/// each `ε`, matching the eigenvalue nearest to `εΛ`.
pub fn verify_spectral_bounds(
    branch: &SolitonBranch,
    target: &DnlsSpectralPair,
    eps_list: &[f64],
    opts: &SweepOptions,
) -> Result<SpectralScalingReport> {
    let m_b = opts.breather_harmonics.unwrap_or_else(|| default_harmonics(branch.params.p));
    let solved: Vec<Result<(HillProblem, Vec<c64>)>> = eps_list
        .par_iter()
        .map(|&eps| {
            let b = solve_breather(&seed_from_soliton(branch, eps, m_b)?, opts.tol, SolveMode::FixFrequencyParam)?;
            let problem = hill_assemble_capped(&b, opts.m_spec.max(b.num_harmonics()), opts.dimension_cap)?;
            let vals = hill_eigenvalues(&problem)?;
            Ok((problem, vals))
        })
        .collect();
    let lam = target.lambda;
    let mut report = SpectralScalingReport {
        eps_list: eps_list.to_vec(),
        lambda_err: Vec::new(),
        vector_err: Vec::new(),
        reference: target.clone(),
        lambdas: Vec::new(),
        krein: Vec::new(),
        residuals: Vec::new(),
        fitted_slopes: [f64::NAN; 2],
        max_abs_re: 0.0,
        krein_sign_constant: true,
        near_band: target.near_band,
    };
    let mut previous: Option<(f64, c64)> = None;
    for (&eps, res) in eps_list.iter().zip(solved) {
        let (problem, vals) = res?;
        let predicted = lam * eps;
        let mut cand: Vec<(f64, c64)> = vals
            .iter()
            .filter(|l| in_fundamental_strip(**l, problem.omega))
            .map(|l| ((l - predicted).norm(), *l))
            .collect();
        cand.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (best_d, best) = *cand.first().ok_or_else(|| Error::MatchAmbiguity("empty fundamental strip".into()))?;
        // conjugate partners of a real-axis target are legitimate twins
        if let Some((d2, second)) = cand.get(1) {
            if *d2 - best_d < 1e-3 * eps && (second - best).norm() > 1e-10 {
                return Err(Error::MatchAmbiguity(format!(
                    "two eigenvalues within 1e-3*eps of eps*Lambda at eps = {eps}"
                )));
            }
        }
        if let Some((pe, pl)) = previous {
            let jump = (best - pl).norm();
            let expected = lam.norm() * (eps - pe).abs();
            if jump > 5.0 * expected {
                return Err(Error::MatchAmbiguity(format!(
                    "continuation jump {jump:e} exceeds 5x the predicted increment {expected:e} at eps = {eps}"
                )));
            }
        }
        previous = Some((eps, best));
        let pair = pair_from_eigenvalue(&problem, best)?;
        report.lambda_err.push((pair.lambda - predicted).norm());
        report.vector_err.push(eigenvector_error(&pair, target));
        report.lambdas.push(pair.lambda);
        report.krein.push(pair.krein);
        report.residuals.push(pair.residual);
        report.max_abs_re = report.max_abs_re.max(pair.lambda.re.abs());
    }
    if let Some(first) = report.krein.first() {
        let s = first.signum();
        report.krein_sign_constant = report.krein.iter().all(|k| k.signum() == s && *k != 0.0);
    }
    report.fitted_slopes = [
        crate::fit::loglog_slope(&report.eps_list, &report.lambda_err).unwrap_or(f64::NAN),
        crate::fit::loglog_slope(&report.eps_list, &report.vector_err).unwrap_or(f64::NAN),
    ];
    Ok(report)
}

pub fn monodromy_oracle(b: &BreatherSolution, step: f64) -> Result<Vec<c64>> {
    monodromy_oracle_capped(b, step, DEFAULT_MONODROMY_CAP)
}

/// Integrates the variational equations over one period with classical RK4
/// for all `2S` unit initial conditions and returns the eigenvalues of the
/// monodromy matrix. The step is shrunk so that an integer number of steps
/// spans the period.
pub fn monodromy_oracle_capped(b: &BreatherSolution, step: f64, cap: usize) -> Result<Vec<c64>> {
    let s = b.grid.num_sites();
    if 2 * s > cap {
        return Err(Error::DimensionOverflow { size: 2 * s, cap });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidInput("step must be positive".into()));
    }
    let period = b.period();
    let nsteps = (period / step).ceil() as usize;
    let h = period / nsteps as f64;
    let kc = b.eps * (1 + 2 * b.params.p) as f64;
    let p2 = 2 * b.params.p as i32;
    let potential = |t: f64| -> Vec<f64> {
        let (u, _) = b.phase_point(b.omega * t);
        u.iter().map(|x| 1.0 + kc * x.powi(p2)).collect()
    };
    // columns: state (w, ẇ) of length 2S per initial condition
    let cols = 2 * s;
    let mut x: Vec<Vec<f64>> = (0..cols)
        .map(|k| {
            let mut v = vec![0.0; 2 * s];
            v[k] = 1.0;
            v
        })
        .collect();
    let grid = b.grid;
    let eps = b.eps;
    let rhs = |y: &[f64], pot: &[f64], out: &mut [f64], lap: &mut [f64]| {
        let (w, wd) = y.split_at(s);
        grid.laplacian_into(w, lap);
        out[..s].copy_from_slice(wd);
        for n in 0..s {
            out[s + n] = -pot[n] * w[n] + eps * lap[n];
        }
    };
    let mut lap = vec![0.0; s];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; 2 * s], vec![0.0; 2 * s], vec![0.0; 2 * s], vec![0.0; 2 * s], vec![0.0; 2 * s]);
    for it in 0..nsteps {
        let t = it as f64 * h;
        let (p0, ph, p1) = (potential(t), potential(t + 0.5 * h), potential(t + h));
        for y in x.iter_mut() {
            rhs(y, &p0, &mut k1, &mut lap);
            for i in 0..2 * s {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            rhs(&tmp, &ph, &mut k2, &mut lap);
            for i in 0..2 * s {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            rhs(&tmp, &ph, &mut k3, &mut lap);
            for i in 0..2 * s {
                tmp[i] = y[i] + h * k3[i];
            }
            rhs(&tmp, &p1, &mut k4, &mut lap);
            for i in 0..2 * s {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    let m = Mat::<f64>::from_fn(cols, cols, |i, j| x[j][i]);
    linalg::real_eigenvalues(&m)
}

#[derive(Serialize)]
struct SpectrumRow {
    eps: f64,
    re_lambda: f64,
    im_lambda: f64,
    krein: f64,
    re_mu: f64,
    im_mu: f64,
    residual: f64,
    near_band: bool,
}

/// CSV rows `(ε, Re λ, Im λ, K, Re μ, Im μ, residual, near-band flag)`.
pub fn write_spectrum_csv(path: &Path, eps: f64, pairs: &[KgSpectralPair]) -> Result<()> {
    let rows: Vec<SpectrumRow> = pairs
        .iter()
        .map(|p| SpectrumRow {
            eps,
            re_lambda: p.lambda.re,
            im_lambda: p.lambda.im,
            krein: p.krein,
            re_mu: p.floquet.re,
            im_mu: p.floquet.im,
            residual: p.residual,
            near_band: p.near_band,
        })
        .collect();
    crate::io::write_csv_rows(path, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnls::single_pulse_soliton;
    use crate::lattice::RealField;

    fn breather(n: usize, eps: f64) -> BreatherSolution {
        let br = single_pulse_soliton(1, 5.0, &LatticeGrid::dirichlet(1, n), 1e-13).unwrap();
        solve_breather(&seed_from_soliton(&br, eps, 8).unwrap(), 1e-12, SolveMode::FixFrequencyParam).unwrap()
    }

    fn uncoupled(n: usize) -> BreatherSolution {
        let mut b = breather(n, 0.01);
        b.eps = 0.0;
        b.omega = 1.0;
        b
    }

    #[test]
    fn uncoupled_spectrum_is_the_integer_lattice() {
        let b = uncoupled(2);
        let problem = hill_assemble(&b, 8).unwrap();
        let vals = hill_eigenvalues(&problem).unwrap();
        for l in &vals {
            assert!(l.re.abs() < 1e-9);
            assert!((l.im - l.im.round()).abs() < 1e-9);
            let mu = floquet_multiplier(*l, 1.0);
            assert!((mu - c64::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let b = breather(6, 0.02);
        assert!(matches!(hill_assemble_capped(&b, 8, 100), Err(Error::DimensionOverflow { .. })));
        assert!(hill_assemble(&b, 3).is_err());
    }

    #[test]
    fn spectrum_has_quadruple_and_shift_symmetry() {
        let b = breather(6, 0.05);
        let problem = hill_assemble(&b, 10).unwrap();
        let vals = hill_eigenvalues(&problem).unwrap();
        let has = |t: c64, tol: f64| vals.iter().any(|v| (v - t).norm() < tol);
        for l in vals.iter().filter(|l| l.norm() < 0.5) {
            for t in [-l, l.conj(), -l.conj()] {
                assert!(has(t, 1e-8), "missing partner of {l}");
            }
            assert!(has(l + c64::new(0.0, b.omega), 1e-7), "missing shift of {l}");
        }
    }

    #[test]
    fn near_zero_pairs() {
        let b = breather(10, 0.05);
        let problem = hill_assemble(&b, 8).unwrap();
        let pairs = eigen_near_zero(&problem, 6).unwrap();
        // translation mode and its generalized partner
        assert!(pairs.iter().filter(|p| p.lambda.norm() < 1e-5).count() >= 2);
        for p in &pairs {
            assert!(p.residual < 1e-8, "residual {}", p.residual);
            assert!((p.floquet - floquet_multiplier(p.lambda, b.omega)).norm() < 1e-12);
        }
    }

    #[test]
    fn krein_examples() {
        let omega = 1.1;
        let mk = |lambda: c64, h: Vec<Vec<c64>>| KgSpectralPair {
            lambda,
            harmonics: h,
            krein: 0.0,
            floquet: floquet_multiplier(lambda, omega),
            residual: 0.0,
            near_band: false,
        };
        // real translation mode W = U' with B^(m) = i m A^(m): K = 0
        let a = [0.0, 1.0, 0.0, 0.05];
        let h: Vec<Vec<c64>> = (-3..=3isize)
            .map(|m| vec![c64::new(0.0, m as f64 * a[m.unsigned_abs()])])
            .collect();
        assert!(krein_quantity(&mk(c64::new(0.0, 0.0), h), omega).abs() < 1e-15);
        // limit: K -> 2‖B^(1)‖² - 2‖B^(-1)‖² at ω = 1, λ = 0
        let h2 = vec![vec![c64::new(0.6, 0.0)], vec![c64::new(0.0, 0.0)], vec![c64::new(0.0, 0.8)]];
        let k = krein_quantity(&mk(c64::new(0.0, 0.0), h2), 1.0);
        assert!((k - (2.0 * 0.64 - 2.0 * 0.36)).abs() < 1e-15);
    }

    #[test]
    fn unstable_pairs_have_zero_krein() {
        // the two-site in-phase breather of the staggered frame is unstable
        let g = LatticeGrid::dirichlet(1, 6);
        let params = crate::dnls::DnlsParams::from_focusing(1, 5.0, 1).unwrap();
        let seed = RealField::from_fn(g, |c| match c[0] {
            0 => 1.3,
            1 => 1.3,
            _ => 0.0,
        });
        let seed = crate::lattice::stagger(&seed, 5.0).0;
        let br = crate::dnls::solve_soliton(&params, &g, &seed, 1e-12).unwrap();
        let spec = crate::dnls::dnls_spectrum(&br).unwrap();
        assert!(spec.iter().any(|p| p.lambda.re.abs() > 1e-3));
        let b = solve_breather(&seed_from_soliton(&br, 0.02, 8).unwrap(), 1e-12, SolveMode::FixFrequencyParam).unwrap();
        let pairs = eigen_near_zero(&hill_assemble(&b, 8).unwrap(), 8).unwrap();
        let unstable: Vec<_> = pairs.iter().filter(|p| p.lambda.re.abs() > 1e-5).collect();
        assert!(!unstable.is_empty());
        for p in unstable {
            assert!(p.krein.abs() < 1e-8, "K = {}", p.krein);
        }
    }

    #[test]
    fn uncoupled_monodromy_is_identity() {
        let b = uncoupled(2);
        let mus = monodromy_oracle(&b, 2.0 * PI / 2000.0).unwrap();
        for mu in mus {
            assert!((mu - c64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn monodromy_multipliers_pair_up() {
        let b = breather(5, 0.05);
        let mus = monodromy_oracle(&b, b.period() / 4000.0).unwrap();
        for mu in &mus {
            let partner = c64::new(1.0, 0.0) / mu.conj();
            assert!(mus.iter().any(|m| (m - partner).norm() < 1e-6));
        }
    }
}
