//! Stationary dNLS solitons: residual, Jacobian, Newton solver, continuation
//! in the frequency parameter, conserved quantities and the linearized
//! spectral problem with Krein signatures.
//!
//! The stationary equation is `Ω A + γ_p |A|^{2p} A - Δ A = 0` with
//! `γ_p = binomial(2p+1, p+1)`. Localized real solutions need `Ω ∉ [-4d, 0]`;
//! the single-pulse branch lives at `Ω < -4d` and is obtained by staggering
//! the focusing solution at `Ω̃ = -4d - Ω`.

use std::path::Path;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{l2_norm, laplacian, laplacian_matrix, stagger, LatticeGrid, RealField};
use crate::linalg;

/// Newton iteration cap shared by the stationary solvers.
pub const MAX_NEWTON_ITERATIONS: usize = 50;

/// `binomial(2p+1, p+1)`, exact.
pub fn gamma_p(p: u32) -> u64 {
    let n = 2 * p as u64 + 1;
    let k = p as u64 + 1;
    (1..=k).fold(1u64, |acc, i| acc * (n - k + i) / i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DnlsParams {
    pub p: u32,
    pub omega: f64,
    pub dim: usize,
    pub gamma: f64,
}

impl DnlsParams {
    /// Fails when `p = 0`, `Ω` is not finite or `Ω ∈ [-4d, 0]`.
    pub fn new(p: u32, omega: f64, dim: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("nonlinearity exponent p must be >= 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        if !omega.is_finite() || in_forbidden_band(omega, dim) {
            return Err(Error::InvalidInput(format!(
                "Omega = {omega} lies in [-4d, 0] = [{}, 0]",
                -4.0 * dim as f64
            )));
        }
        Ok(Self { p, omega, dim, gamma: gamma_p(p) as f64 })
    }

    /// Parameters of the defocusing equation obtained by staggering the
    /// focusing problem at `Ω̃`.
    pub fn from_focusing(p: u32, omega_tilde: f64, dim: usize) -> Result<Self> {
        Self::new(p, -4.0 * dim as f64 - omega_tilde, dim)
    }

    pub fn omega_tilde(&self) -> f64 {
        -4.0 * self.dim as f64 - self.omega
    }

    /// Endpoints `(lo, hi)` of `|Im 2Λ|` on the continuous band `±i[Ω, Ω+4d]`.
    pub fn band(&self) -> (f64, f64) {
        let a = self.omega.abs();
        let b = (self.omega + 4.0 * self.dim as f64).abs();
        (a.min(b), a.max(b))
    }
}

pub fn in_forbidden_band(omega: f64, dim: usize) -> bool {
    (-4.0 * dim as f64..=0.0).contains(&omega)
}

/// `Ω A + γ_p |A|^{2p} A - Δ A`.
pub fn dnls_residual(a: &RealField, params: &DnlsParams) -> RealField {
    let lap = laplacian(a);
    let p2 = 2 * params.p as i32;
    let values = a
        .values
        .iter()
        .zip(&lap.values)
        .map(|(&x, &l)| params.omega * x + params.gamma * x.abs().powi(p2) * x - l)
        .collect();
    RealField { grid: a.grid, values }
}

/// `J_Ω = Ω + (1+2p) γ_p |A|^{2p} - Δ` as a dense symmetric matrix.
pub fn jacobian(a: &RealField, params: &DnlsParams) -> Mat<f64> {
    let mut m = laplacian_matrix(&a.grid);
    let p2 = 2 * params.p as i32;
    let k = (1 + 2 * params.p) as f64 * params.gamma;
    let s = a.len();
    for i in 0..s {
        for j in 0..s {
            m[(i, j)] = -m[(i, j)];
        }
        m[(i, i)] += params.omega + k * a.values[i].abs().powi(p2);
    }
    m
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolitonBranch {
    pub params: DnlsParams,
    pub amplitude: RealField,
    pub residual_norm: f64,
    pub jacobian_min_singular_value: f64,
    /// `ν = Σ |A_n|²`.
    pub mass: f64,
    /// `E = Σ_n Σ_{|k-n|=1} |A_k - A_n|² - Σ |A_n|^{2p+2}/(p+1)`.
    pub energy: f64,
    pub iterations: usize,
}

#[derive(Serialize)]
struct BranchManifest<'a> {
    p: u32,
    omega: f64,
    omega_tilde: f64,
    dim: usize,
    radius: usize,
    boundary: String,
    gamma: f64,
    mass: f64,
    energy: f64,
    residual_norm: f64,
    jacobian_min_singular_value: f64,
    iterations: usize,
    field_file: &'a str,
}

impl SolitonBranch {
    /// Writes `soliton.json` and `amplitude.csv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let g = self.amplitude.grid;
        let manifest = BranchManifest {
            p: self.params.p,
            omega: self.params.omega,
            omega_tilde: self.params.omega_tilde(),
            dim: g.dim,
            radius: g.radius,
            boundary: g.boundary.to_string(),
            gamma: self.params.gamma,
            mass: self.mass,
            energy: self.energy,
            residual_norm: self.residual_norm,
            jacobian_min_singular_value: self.jacobian_min_singular_value,
            iterations: self.iterations,
            field_file: "amplitude.csv",
        };
        crate::io::write_json(&dir.join("soliton.json"), &manifest)?;
        self.amplitude.save_csv(&dir.join("amplitude.csv"))
    }
}

/// Generic damped Newton loop on a square system with a dense Jacobian.
/// Halves the step (up to 10 times) whenever the residual norm would grow.
pub(crate) fn newton<R, J>(
    mut x: Vec<f64>,
    tol: f64,
    max_iter: usize,
    residual: R,
    jac: J,
) -> Result<(Vec<f64>, f64, usize)>
where
    R: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Mat<f64>,
{
    let mut r = residual(&x);
    let mut rn = linalg::norm(&r);
    for it in 0..max_iter {
        if rn < tol {
            return Ok((x, rn, it));
        }
        if !rn.is_finite() {
            return Err(Error::NonConvergence { iterations: it, residual: rn });
        }
        let dx = linalg::solve_real(&jac(&x), &r)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=10 {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a - t * d).collect();
            let tr = residual(&trial);
            let tn = linalg::norm(&tr);
            if tn.is_finite() && (tn < rn || tn < tol) {
                x = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // take the full step anyway; the next iterations decide
            x = x.iter().zip(&dx).map(|(a, d)| a - d).collect();
            r = residual(&x);
            rn = linalg::norm(&r);
        }
    }
    if rn < tol {
        return Ok((x, rn, max_iter));
    }
    Err(Error::NonConvergence { iterations: max_iter, residual: rn })
}

/// Newton iteration on [`dnls_residual`] from `seed`.
pub fn solve_soliton(params: &DnlsParams, grid: &LatticeGrid, seed: &RealField, tol: f64) -> Result<SolitonBranch> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if seed.grid != *grid || grid.dim != params.dim {
        return Err(Error::InvalidInput("seed, grid and parameters disagree on the lattice".into()));
    }
    if seed.values.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidInput("zero seed: the trivial solution is excluded".into()));
    }
    let g = *grid;
    let to_field = |x: &[f64]| RealField { grid: g, values: x.to_vec() };
    let (x, rn, iterations) = newton(
        seed.values.clone(),
        tol,
        MAX_NEWTON_ITERATIONS,
        |x| dnls_residual(&to_field(x), params).values,
        |x| jacobian(&to_field(x), params),
    )?;
    let amplitude = to_field(&x);
    if l2_norm(&amplitude) < 1e-8 {
        return Err(Error::NonConvergence { iterations, residual: rn });
    }
    finish_branch(*params, amplitude, rn, iterations)
}

fn finish_branch(params: DnlsParams, amplitude: RealField, residual_norm: f64, iterations: usize) -> Result<SolitonBranch> {
    let eigs = linalg::symmetric_eigenvalues(&jacobian(&amplitude, &params))?;
    let smin = eigs.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let (mass, energy) = mass_and_energy(&amplitude, &params);
    Ok(SolitonBranch {
        params,
        amplitude,
        residual_norm,
        jacobian_min_singular_value: smin,
        mass,
        energy,
        iterations,
    })
}

/// Residual of the focusing equation `Ω̃ Ã - γ_p |Ã|^{2p} Ã - Δ Ã`.
pub fn focusing_residual(a: &RealField, p: u32, omega_tilde: f64) -> RealField {
    let gamma = gamma_p(p) as f64;
    let lap = laplacian(a);
    let p2 = 2 * p as i32;
    let values = a
        .values
        .iter()
        .zip(&lap.values)
        .map(|(&x, &l)| omega_tilde * x - gamma * x.abs().powi(p2) * x - l)
        .collect();
    RealField { grid: a.grid, values }
}

/// Newton solve of the focusing equation. Independent of the defocusing
/// solver; the two are related by [`stagger`].
pub fn solve_focusing_soliton(p: u32, omega_tilde: f64, grid: &LatticeGrid, seed: &RealField, tol: f64) -> Result<RealField> {
    if seed.values.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidInput("zero seed: the trivial solution is excluded".into()));
    }
    let g = *grid;
    let gamma = gamma_p(p) as f64;
    let k = (1 + 2 * p) as f64 * gamma;
    let p2 = 2 * p as i32;
    let lap = laplacian_matrix(grid);
    let to_field = |x: &[f64]| RealField { grid: g, values: x.to_vec() };
    let (x, _, _) = newton(
        seed.values.clone(),
        tol,
        MAX_NEWTON_ITERATIONS,
        |x| focusing_residual(&to_field(x), p, omega_tilde).values,
        |x| {
            let s = x.len();
            Mat::from_fn(s, s, |i, j| {
                let d = if i == j { omega_tilde - k * x[i].abs().powi(p2) } else { 0.0 };
                d - lap[(i, j)]
            })
        },
    )?;
    Ok(to_field(&x))
}

/// Single-site focusing seed with anticontinuum amplitude `(|Ω̃|/γ_p)^{1/2p}`.
pub fn anticontinuum_focusing_seed(grid: &LatticeGrid, p: u32, omega_tilde: f64) -> RealField {
    let a = (omega_tilde.abs() / gamma_p(p) as f64).powf(1.0 / (2 * p) as f64);
    RealField::delta(*grid, a)
}

/// The focusing seed, staggered into the frame of `params`.
pub fn anticontinuum_seed(grid: &LatticeGrid, params: &DnlsParams) -> RealField {
    stagger(&anticontinuum_focusing_seed(grid, params.p, params.omega_tilde()), params.omega_tilde()).0
}

/// Fundamental single-pulse soliton at `Ω̃` (defocusing frame, `Ω = -4d - Ω̃`).
pub fn single_pulse_soliton(p: u32, omega_tilde: f64, grid: &LatticeGrid, tol: f64) -> Result<SolitonBranch> {
    let params = DnlsParams::from_focusing(p, omega_tilde, grid.dim)?;
    solve_soliton(&params, grid, &anticontinuum_seed(grid, &params), tol)
}

/// `(ν, E)` with `ν = Σ|A|²` and the energy evaluated as the ordered double
/// sum over neighbour pairs (off-grid values are zero under Dirichlet).
pub fn mass_and_energy(a: &RealField, params: &DnlsParams) -> (f64, f64) {
    let mass = a.values.iter().map(|v| v * v).sum();
    // Σ_n Σ_{k~n} (A_k - A_n)² = -2 <A, ΔA> on the zero-padded lattice
    let coupling = -2.0 * a.dot(&laplacian(a));
    let p2 = 2 * params.p as i32 + 2;
    let pot: f64 = a.values.iter().map(|v| v.abs().powi(p2)).sum::<f64>() / (params.p as f64 + 1.0);
    (mass, coupling - pot)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerPoint {
    pub omega_tilde: f64,
    pub omega: f64,
    pub mass: f64,
    pub energy: f64,
    pub residual_norm: f64,
    pub amplitude_at_origin: f64,
}

/// Natural-parameter continuation of the single-pulse branch through the
/// given `Ω̃` values, seeding each solve with the previous solution and
/// halving the step on non-convergence. The sweep starts at the largest
/// `Ω̃`, where the single-site seed is accurate; points are returned in the
/// order given.
pub fn power_curve(p: u32, grid: &LatticeGrid, omega_tildes: &[f64], tol: f64) -> Result<Vec<PowerPoint>> {
    let mut order: Vec<usize> = (0..omega_tildes.len()).collect();
    order.sort_by(|&a, &b| omega_tildes[b].total_cmp(&omega_tildes[a]));
    let mut out: Vec<Option<PowerPoint>> = vec![None; omega_tildes.len()];
    let Some(&first) = order.first() else { return Ok(Vec::new()) };
    let mut current = single_pulse_soliton(p, omega_tildes[first], grid, tol)?;
    let point = |b: &SolitonBranch| PowerPoint {
        omega_tilde: b.params.omega_tilde(),
        omega: b.params.omega,
        mass: b.mass,
        energy: b.energy,
        residual_norm: b.residual_norm,
        amplitude_at_origin: b.amplitude.values[grid.origin()],
    };
    out[first] = Some(point(&current));
    for &idx in &order[1..] {
        let target = omega_tildes[idx];
        let mut from = current.params.omega_tilde();
        let mut step = target - from;
        let mut halvings = 0;
        while (target - from).abs() > 0.0 {
            let next = if (target - from).abs() <= step.abs() { target } else { from + step };
            let params = DnlsParams::from_focusing(p, next, grid.dim)?;
            match solve_soliton(&params, grid, &current.amplitude, tol) {
                Ok(b) => {
                    current = b;
                    from = next;
                }
                Err(Error::NonConvergence { .. }) | Err(Error::SingularJacobian(_)) if halvings < 12 => {
                    step *= 0.5;
                    halvings += 1;
                }
                Err(e) => return Err(e),
            }
        }
        out[idx] = Some(point(&current));
    }
    Ok(out.into_iter().map(|p| p.expect("every index visited")).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KreinSign {
    Positive,
    Negative,
    Zero,
}

impl std::fmt::Display for KreinSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KreinSign::Positive => "+",
            KreinSign::Negative => "-",
            KreinSign::Zero => "0",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DnlsSpectralPair {
    /// `Λ`; the block operator eigenvalue is `2Λ`.
    pub lambda: c64,
    pub b_plus: Vec<c64>,
    pub b_minus: Vec<c64>,
    pub krein_value: f64,
    pub krein: KreinSign,
    pub in_band: bool,
    /// Within `1e-3` of the continuous band.
    pub near_band: bool,
    /// Number of eigenvalues (including this one) within `1e-6`.
    pub multiplicity: usize,
    pub residual: f64,
}

impl DnlsSpectralPair {
    /// `b_+ ± i b_-`, the `m = ±1` harmonics of the matching dKG eigenvector.
    pub fn kg_harmonics(&self) -> (Vec<c64>, Vec<c64>) {
        let i = c64::new(0.0, 1.0);
        let plus = self.b_plus.iter().zip(&self.b_minus).map(|(a, b)| a + i * b).collect();
        let minus = self.b_plus.iter().zip(&self.b_minus).map(|(a, b)| a - i * b).collect();
        (plus, minus)
    }
}

/// The block operator `[[0, -L_-], [L_+, 0]]` with
/// `L_+ = J_Ω` and `L_- = Ω + γ_p A^{2p} - Δ`.
pub fn spectral_operator(branch: &SolitonBranch) -> Mat<f64> {
    let a = &branch.amplitude;
    let params = &branch.params;
    let s = a.len();
    let lap = laplacian_matrix(&a.grid);
    let p2 = 2 * params.p as i32;
    let mut m = Mat::<f64>::zeros(2 * s, 2 * s);
    for i in 0..s {
        let w = a.values[i].abs().powi(p2) * params.gamma;
        for j in 0..s {
            let base = if i == j { params.omega } else { 0.0 } - lap[(i, j)];
            let lminus = base + if i == j { w } else { 0.0 };
            let lplus = base + if i == j { (1 + 2 * params.p) as f64 * w } else { 0.0 };
            m[(i, s + j)] = -lminus;
            m[(s + i, j)] = lplus;
        }
    }
    m
}

/// Krein value `8 Im Σ b_+ conj(b_-)` (equal to `2(‖b_+ + i b_-‖² - ‖b_+ - i b_-‖²)`).
pub fn dnls_krein_value(b_plus: &[c64], b_minus: &[c64]) -> f64 {
    8.0 * b_plus.iter().zip(b_minus).map(|(a, b)| (a * b.conj()).im).sum::<f64>()
}

pub fn krein_sign(value: f64, norm_sqr: f64) -> KreinSign {
    if value.abs() < 1e-8 * norm_sqr {
        KreinSign::Zero
    } else if value > 0.0 {
        KreinSign::Positive
    } else {
        KreinSign::Negative
    }
}

/// Full spectrum of the linearization about the soliton, sorted by `|Λ|`.
pub fn dnls_spectrum(branch: &SolitonBranch) -> Result<Vec<DnlsSpectralPair>> {
    let m = spectral_operator(branch);
    let s = branch.amplitude.len();
    let (vals, vecs) = linalg::real_eigen(&m)?;
    let (lo, hi) = branch.params.band();
    let mc = Mat::<c64>::from_fn(2 * s, 2 * s, |i, j| c64::new(m[(i, j)], 0.0));
    let mut out = Vec::with_capacity(2 * s);
    for (k, &mu) in vals.iter().enumerate() {
        let mut v: Vec<c64> = (0..2 * s).map(|i| vecs[(i, k)]).collect();
        let nrm = linalg::cnorm(&v);
        v.iter_mut().for_each(|x| *x /= nrm);
        let mv = linalg::matvec_complex(&mc, &v);
        let residual = mv.iter().zip(&v).map(|(a, b)| (a - mu * b).norm_sqr()).sum::<f64>().sqrt();
        let b_plus = v[..s].to_vec();
        let b_minus = v[s..].to_vec();
        let krein_value = dnls_krein_value(&b_plus, &b_minus);
        let dist = band_distance(mu, lo, hi);
        out.push(DnlsSpectralPair {
            lambda: mu / 2.0,
            b_plus,
            b_minus,
            krein_value,
            krein: krein_sign(krein_value, 1.0),
            in_band: dist < 1e-9,
            near_band: dist < 1e-3,
            multiplicity: vals.iter().filter(|o| (*o - mu).norm() < 1e-6).count(),
            residual,
        });
    }
    out.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()).then(a.lambda.im.total_cmp(&b.lambda.im)));
    Ok(out)
}

/// Distance of `2Λ` from the band `±i[lo, hi]`.
pub fn band_distance(two_lambda: c64, lo: f64, hi: f64) -> f64 {
    let y = two_lambda.im.abs();
    let dy = if y < lo {
        lo - y
    } else if y > hi {
        y - hi
    } else {
        0.0
    };
    (two_lambda.re * two_lambda.re + dy * dy).sqrt()
}

/// First simple, purely imaginary, off-band, non-zero eigenvalue with
/// `Im Λ > 0` and nonzero Krein sign. These are the eigenvalues whose
/// continuation into the dKG spectrum is controlled.
pub fn isolated_imaginary_mode(pairs: &[DnlsSpectralPair]) -> Option<&DnlsSpectralPair> {
    pairs.iter().find(|p| {
        p.lambda.norm() > 1e-4
            && p.lambda.re.abs() < 1e-8
            && p.lambda.im > 0.0
            && !p.near_band
            && p.multiplicity == 1
            && p.krein != KreinSign::Zero
    })
}

/// `‖M (0, A)‖`: the phase (gauge) mode of the block operator.
pub fn phase_mode_residual(branch: &SolitonBranch) -> f64 {
    let m = spectral_operator(branch);
    let s = branch.amplitude.len();
    let mut v = vec![0.0; 2 * s];
    v[s..].copy_from_slice(&branch.amplitude.values);
    linalg::norm(&linalg::matvec_real(&m, &v))
}

#[derive(Serialize)]
struct SpectrumRow {
    re_lambda: f64,
    im_lambda: f64,
    krein_sign: String,
    in_band: bool,
}

pub fn write_spectrum_csv(path: &Path, pairs: &[DnlsSpectralPair]) -> Result<()> {
    let rows: Vec<SpectrumRow> = pairs
        .iter()
        .map(|p| SpectrumRow {
            re_lambda: p.lambda.re,
            im_lambda: p.lambda.im,
            krein_sign: p.krein.to_string(),
            in_band: p.in_band,
        })
        .collect();
    crate::io::write_csv_rows(path, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;

    fn line(n: usize) -> LatticeGrid {
        LatticeGrid::dirichlet(1, n)
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_p(1), 3);
        assert_eq!(gamma_p(2), 10);
        assert_eq!(gamma_p(3), 35);
    }

    #[test]
    fn params_reject_band() {
        assert!(DnlsParams::new(1, -2.0, 1).is_err());
        assert!(DnlsParams::new(1, 0.0, 1).is_err());
        assert!(DnlsParams::new(1, -4.0, 1).is_err());
        assert!(DnlsParams::new(1, -6.0, 1).is_ok());
        assert!(DnlsParams::new(1, 1.0, 2).is_ok());
        assert!(DnlsParams::new(0, -6.0, 1).is_err());
        let p = DnlsParams::from_focusing(1, 2.0, 1).unwrap();
        assert_eq!(p.omega, -6.0);
        assert_eq!(p.band(), (2.0, 6.0));
    }

    #[test]
    fn residual_of_zero_is_zero() {
        let p = DnlsParams::new(1, -6.0, 1).unwrap();
        let r = dnls_residual(&RealField::zeros(line(5)), &p);
        assert!(r.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn residual_single_site() {
        let p = DnlsParams::new(1, -6.0, 1).unwrap();
        let a = 0.7;
        let f = RealField::delta(line(5), a);
        let r = dnls_residual(&f, &p);
        let expected = p.omega * a + 3.0 * a.powi(3) + 2.0 * a;
        assert!((r.values[5] - expected).abs() < 1e-15);
        assert!((r.values[4] + a).abs() < 1e-15);
    }

    #[test]
    fn jacobian_at_zero_periodic_min_eigenvalue() {
        let g = LatticeGrid::new(1, 6, Boundary::Periodic).unwrap();
        let p = DnlsParams::new(1, 1.5, 1).unwrap();
        let eig = linalg::symmetric_eigenvalues(&jacobian(&RealField::zeros(g), &p)).unwrap();
        assert!((eig[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn jacobian_is_symmetric_and_matches_finite_differences() {
        let g = line(6);
        let p = DnlsParams::new(1, -7.0, 1).unwrap();
        let a = RealField::from_fn(g, |c| (-(c[0] as f64).abs()).exp() * if c[0] % 2 == 0 { 1.0 } else { -1.0 });
        let j = jacobian(&a, &p);
        let s = a.len();
        for r in 0..s {
            for c in 0..s {
                assert!((j[(r, c)] - j[(c, r)]).abs() < 1e-12);
            }
        }
        let dir: Vec<f64> = (0..s).map(|i| ((i * 7 % 5) as f64 - 2.0) / 3.0).collect();
        let jv = linalg::matvec_real(&j, &dir);
        let err = |h: f64| {
            let plus = a.zip_with(&RealField { grid: g, values: dir.clone() }, |x, d| x + h * d);
            let minus = a.zip_with(&RealField { grid: g, values: dir.clone() }, |x, d| x - h * d);
            let fd = dnls_residual(&plus, &p).sub(&dnls_residual(&minus, &p)).scaled(0.5 / h);
            linalg::norm(&fd.values.iter().zip(&jv).map(|(a, b)| a - b).collect::<Vec<_>>())
        };
        let order = (err(1e-2) / err(5e-3)).log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn focusing_single_pulse_amplitude() {
        let g = line(20);
        let b = single_pulse_soliton(1, 10.0, &g, 1e-12).unwrap();
        assert_eq!(b.params.omega, -14.0);
        let a0 = b.amplitude.values[g.origin()].abs();
        let lead = (10.0f64 / 3.0).sqrt();
        assert!((a0 - lead).abs() / lead < 0.15, "a0 = {a0}");
        assert!(b.residual_norm < 1e-12);
        assert!(b.jacobian_min_singular_value > 0.1);
        assert!(l2_norm(&dnls_residual(&b.amplitude, &b.params)) < 1e-10);
    }

    #[test]
    fn zero_seed_rejected() {
        let g = line(5);
        let p = DnlsParams::new(1, -9.0, 1).unwrap();
        assert!(solve_soliton(&p, &g, &RealField::zeros(g), 1e-12).is_err());
    }

    #[test]
    fn staggering_equivalence() {
        let g = line(20);
        let tol = 1e-12;
        for wt in [2.0, 5.0, 10.0] {
            let focus = solve_focusing_soliton(1, wt, &g, &anticontinuum_focusing_seed(&g, 1, wt), tol).unwrap();
            let (staggered, omega) = stagger(&focus, wt);
            let direct = single_pulse_soliton(1, wt, &g, tol).unwrap();
            assert_eq!(omega, direct.params.omega);
            assert!(l2_norm(&staggered.sub(&direct.amplitude)) < 2.0 * tol);
        }
    }

    #[test]
    fn mass_and_energy_examples() {
        let p = DnlsParams::new(1, -6.0, 1).unwrap();
        assert_eq!(mass_and_energy(&RealField::zeros(line(3)), &p), (0.0, 0.0));
        let a = 1.3;
        let (nu, e) = mass_and_energy(&RealField::delta(line(3), a), &p);
        assert!((nu - a * a).abs() < 1e-15);
        assert!((e - (4.0 * a * a - a.powi(4) / 2.0)).abs() < 1e-13);
    }

    #[test]
    fn power_curve_is_monotone_for_cubic() {
        let g = line(20);
        let wts: Vec<f64> = (0..8).map(|k| 1.0 + k as f64).collect();
        let curve = power_curve(1, &g, &wts, 1e-11).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].mass > w[0].mass);
        }
    }

    #[test]
    fn power_curve_reaches_wide_solitons_and_keeps_the_given_order() {
        let curve = power_curve(1, &line(20), &[0.5, 5.0, 2.0], 1e-11).unwrap();
        let got: Vec<f64> = curve.iter().map(|p| p.omega_tilde).collect();
        assert_eq!(got, vec![0.5, 5.0, 2.0]);
        assert!(curve.iter().all(|p| p.residual_norm < 1e-10));
    }

    #[test]
    fn spectrum_properties() {
        let g = line(15);
        let b = single_pulse_soliton(1, 2.0, &g, 1e-12).unwrap();
        let spec = dnls_spectrum(&b).unwrap();
        // phase mode
        assert!(phase_mode_residual(&b) < 1e-10);
        assert!(spec[0].lambda.norm() < 1e-5);
        // quadruple symmetry
        for pr in &spec {
            let l = pr.lambda;
            for target in [-l, l.conj(), -l.conj()] {
                assert!(spec.iter().any(|q| (q.lambda - target).norm() < 1e-7));
            }
            assert!(pr.residual < 1e-9);
        }
        // spectral stability away from the generalized kernel
        for pr in spec.iter().filter(|p| p.lambda.norm() > 1e-5) {
            assert!(pr.lambda.re.abs() < 1e-8);
        }
        // band endpoints for Ω = -6
        assert_eq!(b.params.band(), (2.0, 6.0));
        assert!(spec.iter().filter(|p| p.in_band).all(|p| (2.0 * p.lambda.im.abs()) >= 2.0 - 1e-12));
    }

    #[test]
    fn isolated_mode_exists_at_small_omega_tilde() {
        let g = line(25);
        let b = single_pulse_soliton(1, 1.0, &g, 1e-12).unwrap();
        let spec = dnls_spectrum(&b).unwrap();
        let m = isolated_imaginary_mode(&spec).expect("internal mode");
        assert!((2.0 * m.lambda.im - 0.9119).abs() < 1e-3);
    }
}
