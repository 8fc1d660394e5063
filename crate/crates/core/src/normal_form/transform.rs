//! The near-identity change of coordinates generated by `χ_1..χ_r`.

use faer::c64;
use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::poly::{Monomial, Poly};
use crate::error::{Error, Result};

const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Normal-form coordinates to original coordinates.
    Forward,
    /// Original coordinates to normal-form coordinates.
    Inverse,
}

/// The Lie series `T_X ζ_j = Σ_k E_k ζ_j`, with
/// `E_k = Σ_{l=1}^{k} (l/k) {X_l, E_{k−l}·}`, truncated at order `r` in ε and
/// evaluated at a fixed ε.
#[derive(Debug, Clone)]
pub struct CoordinateTransform {
    /// One polynomial per site: the original `ζ_j` in normal-form coordinates.
    pub components: Vec<Poly<c64>>,
}

impl CoordinateTransform {
    pub fn new<C: Coeff>(chi: &[Poly<C>], eps: f64) -> Result<Self> {
        let Some(first) = chi.first() else {
            return Err(Error::InvalidInput("empty generating sequence".into()));
        };
        let grid = first.grid;
        let r = chi.len();
        // generous bound: each bracket with X_l adds deg(X_l) − 2
        let cap = 1 + r * chi.iter().map(|x| x.max_degree()).sum::<usize>();
        let x: Vec<Poly<c64>> = chi
            .iter()
            .map(|q| {
                let mut f = q.specialize(eps);
                f.degree_cap = cap;
                f
            })
            .collect();
        let components = (0..grid.num_sites())
            .map(|j| {
                let mut z0 = Poly::<c64>::new(grid, cap);
                z0.add_term(Monomial::new(0, &[(j, 1, 0)]), c64::new(1.0, 0.0));
                let mut seq = vec![z0.clone()];
                let mut total = z0;
                for k in 1..=r {
                    let mut zk = total.zero_like();
                    for l in 1..=k {
                        zk.add_scaled(&x[l - 1].bracket(&seq[k - l])?, &c64::new(l as f64 / k as f64, 0.0));
                    }
                    total.add_assign(&zk);
                    seq.push(zk);
                }
                Ok(total)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    /// Original coordinates of the normal-form point `z`.
    pub fn forward(&self, z: &[c64]) -> Vec<c64> {
        self.components.iter().map(|c| c.evaluate(z, 1.0)).collect()
    }

    /// Normal-form coordinates of the original point `z`, by fixed-point
    /// iteration `x ← x − (T(x) − z)`.
    pub fn inverse(&self, z: &[c64]) -> Result<Vec<c64>> {
        let mut x = z.to_vec();
        let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        let mut err = f64::INFINITY;
        for _ in 0..INVERSE_MAX_ITER {
            let t = self.forward(&x);
            err = 0.0;
            for ((xi, ti), zi) in x.iter_mut().zip(&t).zip(z) {
                let d = ti - zi;
                let dn = d.norm();
                err = if dn.is_nan() { f64::INFINITY } else { err.max(dn) };
                *xi -= d;
            }
            if !err.is_finite() {
                break;
            }
            if err <= INVERSE_TOL * scale.max(1.0) {
                return Ok(x);
            }
        }
        Err(Error::NonConvergence { iterations: INVERSE_MAX_ITER, residual: err })
    }

    pub fn apply(&self, z: &[c64], direction: Direction) -> Result<Vec<c64>> {
        match direction {
            Direction::Forward => Ok(self.forward(z)),
            Direction::Inverse => self.inverse(z),
        }
    }
}

/// Applies the normal-form change of coordinates (or its inverse) to `z`.
pub fn transform_state<C: Coeff>(chi: &[Poly<C>], eps: f64, z: &[c64], direction: Direction) -> Result<Vec<c64>> {
    CoordinateTransform::new(chi, eps)?.apply(z, direction)
}

/// Complex coordinates `ζ = (u + i v)/√2` of a lattice state.
pub fn to_complex(u: &[f64], v: &[f64]) -> Vec<c64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    u.iter().zip(v).map(|(a, b)| c64::new(a * s, b * s)).collect()
}

/// Inverse of [`to_complex`].
pub fn from_complex(z: &[c64]) -> (Vec<f64>, Vec<f64>) {
    let s = std::f64::consts::SQRT_2;
    (z.iter().map(|c| c.re * s).collect(), z.iter().map(|c| c.im * s).collect())
}
