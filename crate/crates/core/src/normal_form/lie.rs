//! Homological equation, the Lie-transform recursion and its norm budget.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::coeff::Coeff;
use super::poly::{harmonic_action, Poly};
use crate::error::{Error, Result};

/// Default bound on the number of terms of any intermediate polynomial.
pub const DEFAULT_TERM_CAP: usize = 2_000_000;

/// Splits `Ψ` into its resonant part `Z` and the generator `χ` with
/// `{G, χ} + Z = Ψ`: a nonresonant monomial of weight `w` and coefficient
/// `c` contributes `c/(i w)` to `χ`.
pub fn solve_homological<C: Coeff>(psi: &Poly<C>) -> (Poly<C>, Poly<C>) {
    let mut z = psi.zero_like();
    let mut chi = psi.zero_like();
    let minus_i = -C::imag();
    for (m, c) in &psi.terms {
        let w = m.weight();
        if w == 0 {
            z.add_term(m.clone(), c.clone());
        } else {
            chi.add_term(m.clone(), (c.clone() * minus_i.clone()).div_int(w));
        }
    }
    (z, chi)
}

/// Largest coefficient of `{G, χ} + Z − Ψ`.
pub fn homological_residual<C: Coeff>(psi: &Poly<C>, z: &Poly<C>, chi: &Poly<C>) -> Result<f64> {
    let g = harmonic_action::<C>(psi.grid, psi.degree_cap);
    let mut r = g.bracket(chi)?;
    r.add_assign(z);
    Ok(r.sub(psi).max_abs())
}

/// ℓ¹ norms of the order-`s` objects, each weighted by `ε^k R^degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderNorms {
    pub order: usize,
    pub z: f64,
    pub chi: f64,
    pub f: f64,
    pub psi: f64,
    pub terms_z: usize,
    pub terms_chi: usize,
}

/// Diagnostic constants instantiated from the first-order norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetDiagnostics {
    /// `2π Σ |c| deg R^{deg−2}` over the first-order perturbation.
    pub phi: f64,
    /// `φ (2e + 3r)/𝔡`.
    pub m2: f64,
    /// `12 e π ε / 𝔡`.
    pub nf_mu: f64,
    /// `⌊𝔡/(6 e φ)⌋`, reported only.
    pub r_opt: u64,
    /// `(2φ/𝔡) M₂^{s−1}` for `s = 1..=r+1`.
    pub norm_bound: Vec<f64>,
}

/// Truncation order, analyticity radius and shrink of the normal form, and the
/// norms recorded while building it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormBudget {
    pub order: usize,
    pub ball_radius: f64,
    pub shrink: f64,
    /// Value of ε used when converting graded norms to numbers.
    pub eps: f64,
    pub term_cap: usize,
    pub coeff_norms: Vec<OrderNorms>,
    pub diagnostics: Option<BudgetDiagnostics>,
}

impl NormalFormBudget {
    pub fn new(order: usize, ball_radius: f64, shrink: f64, eps: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if order == 0 {
            bad.push("normal form order must be >= 1".to_string());
        }
        if !(ball_radius > 0.0 && ball_radius.is_finite()) {
            bad.push(format!("ball radius must be positive, got {ball_radius}"));
        }
        if !(shrink > 0.0 && shrink <= 0.25) {
            bad.push(format!("shrink must lie in (0, 1/4], got {shrink}"));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            bad.push(format!("eps must be nonnegative, got {eps}"));
        }
        if !bad.is_empty() {
            return Err(Error::ConfigInvalid(bad));
        }
        Ok(Self {
            order,
            ball_radius,
            shrink,
            eps,
            term_cap: DEFAULT_TERM_CAP,
            coeff_norms: Vec::new(),
            diagnostics: None,
        })
    }

    pub fn with_term_cap(mut self, cap: usize) -> Self {
        self.term_cap = cap;
        self
    }

    fn check_terms<C: Coeff>(&self, p: &Poly<C>) -> Result<()> {
        if p.len() > self.term_cap {
            return Err(Error::OrderOverflow { terms: p.len(), cap: self.term_cap });
        }
        Ok(())
    }

    fn diagnose<C: Coeff>(&mut self, f1: &Poly<C>) {
        let (eps, r) = (self.eps, self.ball_radius);
        let phi: f64 = 2.0
            * PI
            * f1.terms
                .iter()
                .map(|(m, c)| {
                    let deg = m.degree() as i32;
                    c.abs() * eps.powi(m.eps as i32) * deg as f64 * r.powi(deg - 2)
                })
                .sum::<f64>();
        let d = self.shrink;
        let m2 = phi * (2.0 * E + 3.0 * self.order as f64) / d;
        let r_opt = if phi > 0.0 { (d / (6.0 * E * phi)).floor() as u64 } else { u64::MAX };
        self.diagnostics = Some(BudgetDiagnostics {
            phi,
            m2,
            nf_mu: 12.0 * E * PI * eps / d,
            r_opt,
            norm_bound: (1..=self.order + 1).map(|s| 2.0 * phi / d * m2.powi(s as i32 - 1)).collect(),
        });
    }
}

/// Output of the Lie-transform recursion up to order `r`.
#[derive(Debug, Clone)]
pub struct NormalForm<C> {
    pub p: u32,
    pub order: usize,
    /// `Z_1..Z_r`, resonant, each homogeneous of degree `s` in ε.
    pub z: Vec<Poly<C>>,
    /// Generating sequence `χ_1..χ_r`.
    pub chi: Vec<Poly<C>>,
    /// `Ψ_1..Ψ_{r+1}`; `Ψ_{r+1}` is the leading term left over after `r` steps.
    pub psi: Vec<Poly<C>>,
    /// `F_1..F_r`, the perturbation transformed by the partial generators.
    pub f: Vec<Poly<C>>,
    /// Largest coefficient of `{G, χ_s} + Z_s − Ψ_s` per order.
    pub homological_residuals: Vec<f64>,
    /// Largest coefficient of `G_s + F_s − Z_s` per order.
    pub closure_residuals: Vec<f64>,
    /// Weighted norms of `Ψ_2..Ψ_{r+1}`: the leading remainder after `s` steps.
    pub remainder_norms: Vec<f64>,
}

impl<C: Coeff> NormalForm<C> {
    /// `Σ_s Z_s`.
    pub fn normal_form_part(&self) -> Poly<C> {
        let mut out = self.z[0].zero_like();
        for z in &self.z {
            out.add_assign(z);
        }
        out
    }

    /// Largest imaginary part among the `Z_s` coefficients (zero for real coefficients).
    pub fn imaginary_defect(&self) -> f64 {
        self.z.iter().flat_map(|z| z.terms.values()).map(|c| c.to_c64().im.abs()).fold(0.0, f64::max)
    }
}

fn ratio<C: Coeff>(l: usize, s: usize) -> C {
    C::ratio(l as i64, s as i64)
}

/// `Σ_{l=lo}^{hi} (l/den) {X_l, seq[s−l]}` where `seq[k]` is the order-`k` element.
fn series_term<C: Coeff>(chi: &[Poly<C>], seq: &[Poly<C>], s: usize, hi: usize, den: usize, zero: &Poly<C>) -> Result<Poly<C>> {
    let mut out = zero.clone();
    for l in 1..=hi {
        if s - l >= seq.len() || l > chi.len() {
            continue;
        }
        out.add_scaled(&chi[l - 1].bracket(&seq[s - l])?, &ratio(l, den));
    }
    Ok(out)
}

/// Runs the Lie-transform recursion on `H = G + F` up to order `r`.
///
/// Per order `s`: `F_s = Σ_{l<s} (l/(s−1)) {X_l, F_{s−l}}`,
/// `Ψ_s = F_s/s + Σ_{l<s} (l/s) {X_l, Z_{s−l}}`, the homological equation
/// `{G, X_s} + Z_s = Ψ_s`, and `G_s = Σ_{l≤s} (l/s) {X_l, G_{s−l}}`; the
/// transformed Hamiltonian then has order-`s` part `G_s + F_s = Z_s`.
pub fn lie_transform_normal_form<C: Coeff>(h: &Poly<C>, r: usize, budget: &mut NormalFormBudget) -> Result<NormalForm<C>> {
    if r == 0 {
        return Err(Error::InvalidInput("normal form order must be >= 1".into()));
    }
    let g0 = h.eps_order(0);
    if g0 != harmonic_action(h.grid, h.degree_cap) {
        return Err(Error::InvalidInput("the ε⁰ part of H must be the harmonic action Σ|ζ_j|²".into()));
    }
    let f1 = h.filter(|m| m.eps > 0);
    if !f1.is_homogeneous(1) {
        return Err(Error::InvalidInput("the perturbation must be of first order in ε".into()));
    }
    let top = f1.max_degree().max(2);
    let p = ((top - 2) / 2).max(1) as u32;
    let need = 2 + 2 * p as usize * r;
    if h.degree_cap < need {
        return Err(Error::DegreeOverflow { degree: need, cap: h.degree_cap });
    }
    // the leftover Ψ_{r+1} needs one more step of degree growth
    let mut zero = h.zero_like();
    zero.degree_cap = need + 2 * p as usize;
    let lift = |q: &Poly<C>| Poly { degree_cap: zero.degree_cap, ..q.clone() };

    let mut g_seq = vec![lift(&g0)];
    let mut f_seq = vec![zero.clone(), lift(&f1)];
    let mut z_seq = vec![zero.clone()];
    let mut chi: Vec<Poly<C>> = Vec::new();
    let mut psi = Vec::new();
    let mut hom = Vec::new();
    let mut closure = Vec::new();
    budget.coeff_norms.clear();
    let (eps, rad) = (budget.eps, budget.ball_radius);

    for s in 1..=r + 1 {
        if s >= 2 {
            let fs = series_term(&chi, &f_seq, s, s - 1, s - 1, &zero)?;
            budget.check_terms(&fs)?;
            f_seq.push(fs);
        }
        let mut ps = f_seq[s].scaled(&ratio(1, s));
        ps.add_assign(&series_term(&chi, &z_seq, s, s - 1, s, &zero)?);
        budget.check_terms(&ps)?;
        psi.push(ps.clone());
        if s == r + 1 {
            break;
        }
        let (zs, xs) = solve_homological(&ps);
        hom.push(homological_residual(&ps, &zs, &xs)?);
        chi.push(xs);
        z_seq.push(zs);
        let gs = series_term(&chi, &g_seq, s, s, s, &zero)?;
        budget.check_terms(&gs)?;
        let mut cl = gs.clone();
        cl.add_assign(&f_seq[s]);
        closure.push(cl.sub(&z_seq[s]).max_abs());
        g_seq.push(gs);
        budget.coeff_norms.push(OrderNorms {
            order: s,
            z: z_seq[s].weighted_norm(eps, rad),
            chi: chi[s - 1].weighted_norm(eps, rad),
            f: f_seq[s].weighted_norm(eps, rad),
            psi: psi[s - 1].weighted_norm(eps, rad),
            terms_z: z_seq[s].len(),
            terms_chi: chi[s - 1].len(),
        });
    }
    budget.diagnose(&f1);

    let restore = |q: &Poly<C>| Poly { degree_cap: h.degree_cap, ..q.clone() };
    let remainder_norms = psi[1..].iter().map(|q| q.weighted_norm(eps, rad)).collect();
    Ok(NormalForm {
        p,
        order: r,
        z: z_seq[1..].iter().map(restore).collect(),
        chi: chi.iter().map(restore).collect(),
        f: f_seq[1..].iter().map(restore).collect(),
        psi,
        homological_residuals: hom,
        closure_residuals: closure,
        remainder_norms,
    })
}
