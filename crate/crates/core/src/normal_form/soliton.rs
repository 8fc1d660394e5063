//! Stationary profiles of the normal form: the generalized soliton equation.
//!
//! A breather of the truncated normal form is `ζ_j(t) = √2 𝔄_j e^{−iωt}` with
//! a real profile `𝔄`, and the frequency shift `ω = 1 − εΩ/2` turns the
//! stationarity condition into
//! `f(𝔄) = Ω 𝔄 + (√2/ε) Re ∂_ζ̄ Z(√2 𝔄) = 0`. With `Z = Z_1` this is exactly
//! the stationary dNLS equation.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::poly::Poly;
use crate::dnls;
use crate::error::{Error, Result};
use crate::lattice::{LatticeGrid, RealField};

/// Vector field and Jacobian of the generalized soliton equation at fixed ε.
#[derive(Debug, Clone)]
pub struct GeneralizedSoliton {
    pub grid: LatticeGrid,
    pub eps: f64,
    grads: Vec<Poly<c64>>,
    /// For each site `j`: `(k, ∂_ζk g_j + ∂_ζ̄k g_j)` over the support of `g_j = ∂_ζ̄j Z`.
    hess: Vec<Vec<(usize, Poly<c64>)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralizedSolitonSolution {
    pub omega: f64,
    pub eps: f64,
    pub order: usize,
    pub amplitude: RealField,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl GeneralizedSoliton {
    pub fn new<C: Coeff>(z_list: &[Poly<C>], eps: f64) -> Result<Self> {
        let Some(first) = z_list.first() else {
            return Err(Error::InvalidInput("empty normal form".into()));
        };
        if !(eps > 0.0) {
            return Err(Error::InvalidInput(format!("generalized soliton needs eps > 0, got {eps}")));
        }
        let grid = first.grid;
        let mut z = Poly::<c64>::new(grid, first.degree_cap);
        for zs in z_list {
            z.degree_cap = z.degree_cap.max(zs.degree_cap);
            z.add_assign(&zs.specialize(eps));
        }
        let grads: Vec<Poly<c64>> = (0..grid.num_sites()).map(|j| z.derivative(j, true)).collect();
        let hess = grads
            .iter()
            .map(|g| {
                g.support()
                    .into_iter()
                    .map(|k| {
                        let mut d = g.derivative(k, false);
                        d.add_assign(&g.derivative(k, true));
                        (k, d)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { grid, eps, grads, hess })
    }

    fn point(a: &[f64]) -> Vec<c64> {
        a.iter().map(|x| c64::new(std::f64::consts::SQRT_2 * x, 0.0)).collect()
    }

    fn residual_vec(&self, a: &[f64], omega: f64) -> Vec<f64> {
        let z = Self::point(a);
        let s = std::f64::consts::SQRT_2 / self.eps;
        self.grads.iter().zip(a).map(|(g, x)| omega * x + s * g.evaluate(&z, 1.0).re).collect()
    }

    fn jacobian_mat(&self, a: &[f64], omega: f64) -> Mat<f64> {
        let z = Self::point(a);
        let n = a.len();
        let s = 2.0 / self.eps;
        let mut j = Mat::<f64>::zeros(n, n);
        for (row, entries) in self.hess.iter().enumerate() {
            j[(row, row)] += omega;
            for (k, d) in entries {
                j[(row, *k)] += s * d.evaluate(&z, 1.0).re;
            }
        }
        j
    }

    pub fn residual(&self, a: &RealField, omega: f64) -> RealField {
        RealField::from_values(a.grid, self.residual_vec(&a.values, omega)).expect("matching length")
    }

    pub fn jacobian(&self, a: &RealField, omega: f64) -> Mat<f64> {
        self.jacobian_mat(&a.values, omega)
    }

    /// Newton solve of `f(𝔄) = 0` from `seed`.
    pub fn solve(&self, seed: &RealField, omega: f64, tol: f64, order: usize) -> Result<GeneralizedSolitonSolution> {
        if seed.grid != self.grid {
            return Err(Error::InvalidInput("seed lives on a different grid".into()));
        }
        let (x, residual_norm, iterations) = dnls::newton(
            seed.values.clone(),
            tol,
            dnls::MAX_NEWTON_ITERATIONS,
            |x| self.residual_vec(x, omega),
            |x| self.jacobian_mat(x, omega),
        )?;
        let (xn, sn) = (x.iter().map(|v| v * v).sum::<f64>().sqrt(), crate::lattice::l2_norm(seed));
        if xn < 1e-6 * sn {
            // collapsed onto the trivial solution: the branch was lost
            return Err(Error::NonConvergence { iterations, residual: sn });
        }
        Ok(GeneralizedSolitonSolution {
            omega,
            eps: self.eps,
            order,
            amplitude: RealField::from_values(self.grid, x)?,
            residual_norm,
            iterations,
        })
    }
}

/// Solves at `eps` by natural continuation from `ε = 0`, in steps of at most
/// `max_step`, starting from `seed` (typically the dNLS profile).
pub fn continue_generalized_soliton<C: Coeff>(
    z_list: &[Poly<C>],
    seed: &RealField,
    omega: f64,
    eps: f64,
    tol: f64,
    max_step: f64,
) -> Result<GeneralizedSolitonSolution> {
    if !(max_step > 0.0) {
        return Err(Error::InvalidInput(format!("continuation step must be positive, got {max_step}")));
    }
    let steps = (eps / max_step).ceil().max(1.0) as usize;
    let mut current = seed.clone();
    let mut last = None;
    for k in 1..=steps {
        let e = eps * k as f64 / steps as f64;
        let sol = GeneralizedSoliton::new(z_list, e)?.solve(&current, omega, tol, z_list.len())?;
        current = sol.amplitude.clone();
        last = Some(sol);
    }
    Ok(last.expect("at least one step"))
}

/// `f(𝔄) = Ω 𝔄 + (√2/ε) Re ∂_ζ̄ (Σ_s Z_s)(√2 𝔄)`.
pub fn generalized_soliton_equation<C: Coeff>(z_list: &[Poly<C>], a: &RealField, omega: f64, eps: f64) -> Result<RealField> {
    Ok(GeneralizedSoliton::new(z_list, eps)?.residual(a, omega))
}
