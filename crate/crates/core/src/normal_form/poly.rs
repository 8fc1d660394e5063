//! Sparse polynomials in the complex coordinates `(ζ, ζ̄)` of a lattice, with
//! the power of ε kept as a symbolic grading.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use faer::c64;
use rayon::prelude::*;

use super::coeff::Coeff;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeGrid};

/// `ε^eps · Π_j ζ_j^{a_j} ζ̄_j^{b_j}`. Factors are sorted by site and never
/// carry a zero exponent pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub eps: u16,
    pub factors: Vec<(u32, u16, u16)>,
}

impl Monomial {
    pub fn one(eps: u16) -> Self {
        Self { eps, factors: Vec::new() }
    }

    /// Builds a monomial from unsorted `(site, a, b)` triples; repeated sites multiply.
    pub fn new(eps: u16, factors: &[(usize, u16, u16)]) -> Self {
        let mut map: BTreeMap<u32, (u16, u16)> = BTreeMap::new();
        for &(j, a, b) in factors {
            let e = map.entry(j as u32).or_default();
            e.0 += a;
            e.1 += b;
        }
        Self {
            eps,
            factors: map.into_iter().filter(|(_, (a, b))| a + b > 0).map(|(j, (a, b))| (j, a, b)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|&(_, a, b)| (a + b) as usize).sum()
    }

    /// `|α| − |β|`; the harmonic flow multiplies the monomial by `e^{i·weight·t}`.
    pub fn weight(&self) -> i64 {
        self.factors.iter().map(|&(_, a, b)| a as i64 - b as i64).sum()
    }

    pub fn exponents(&self, site: usize) -> (u16, u16) {
        match self.factors.binary_search_by_key(&(site as u32), |f| f.0) {
            Ok(k) => (self.factors[k].1, self.factors[k].2),
            Err(_) => (0, 0),
        }
    }

    /// Copy with the exponents at `site` (already present) replaced by `(a, b)`.
    fn with_exponents(&self, site: usize, a: u16, b: u16) -> Self {
        let factors = self
            .factors
            .iter()
            .map(|&f| if f.0 as usize == site { (f.0, a, b) } else { f })
            .filter(|f| f.1 + f.2 > 0)
            .collect();
        Self { eps: self.eps, factors }
    }

    /// The monomial with `ζ` and `ζ̄` exchanged.
    pub fn conjugate(&self) -> Self {
        Self { eps: self.eps, factors: self.factors.iter().map(|&(j, a, b)| (j, b, a)).collect() }
    }

    /// `self · other / (ζ_site ζ̄_site)`.
    fn product_reduced(&self, other: &Self, site: u32) -> Self {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut k) = (0, 0);
        let (x, y) = (&self.factors, &other.factors);
        while i < x.len() || k < y.len() {
            let f = if k >= y.len() || (i < x.len() && x[i].0 < y[k].0) {
                i += 1;
                x[i - 1]
            } else if i >= x.len() || y[k].0 < x[i].0 {
                k += 1;
                y[k - 1]
            } else {
                i += 1;
                k += 1;
                (x[i - 1].0, x[i - 1].1 + y[k - 1].1, x[i - 1].2 + y[k - 1].2)
            };
            let f = if f.0 == site { (f.0, f.1 - 1, f.2 - 1) } else { f };
            if f.1 + f.2 > 0 {
                out.push(f);
            }
        }
        Self { eps: self.eps + other.eps, factors: out }
    }

    /// Value at `z` (with `ζ̄ = conj(z)`), ignoring the ε grading.
    pub fn evaluate(&self, z: &[c64]) -> c64 {
        let mut v = c64::new(1.0, 0.0);
        for &(j, a, b) in &self.factors {
            let zj = z[j as usize];
            if a > 0 {
                v *= zj.powi(a as i32);
            }
            if b > 0 {
                v *= zj.conj().powi(b as i32);
            }
        }
        v
    }

    fn render(&self) -> String {
        format!("eps^{} |{}", self.eps, self.label())
    }

    /// Factors as ` site:a,b` tokens, e.g. ` 3:2,2`.
    pub fn label(&self) -> String {
        let mut s = String::new();
        for &(j, a, b) in &self.factors {
            let _ = write!(s, " {j}:{a},{b}");
        }
        s
    }

    fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad monomial '{text}'"));
        let (head, body) = text.split_once('|').ok_or_else(bad)?;
        let eps = head.trim().strip_prefix("eps^").and_then(|e| e.parse().ok()).ok_or_else(bad)?;
        let mut factors = Vec::new();
        for tok in body.split_whitespace() {
            let (j, ab) = tok.split_once(':').ok_or_else(bad)?;
            let (a, b) = ab.split_once(',').ok_or_else(bad)?;
            factors.push((
                j.parse::<usize>().map_err(|_| bad())?,
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
            ));
        }
        Ok(Self::new(eps, &factors))
    }
}

/// A polynomial Hamiltonian (or generating function) on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C> {
    pub grid: LatticeGrid,
    pub degree_cap: usize,
    pub terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn new(grid: LatticeGrid, degree_cap: usize) -> Self {
        Self { grid, degree_cap, terms: BTreeMap::new() }
    }

    pub fn zero_like(&self) -> Self {
        Self::new(self.grid, self.degree_cap)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Adds `c·m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Adds `c·m` after checking the degree cap.
    pub fn insert_checked(&mut self, m: Monomial, c: C) -> Result<()> {
        let degree = m.degree();
        if degree > self.degree_cap {
            return Err(Error::DegreeOverflow { degree, cap: self.degree_cap });
        }
        self.add_term(m, c);
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &C) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone() * s.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &(-C::one()));
        out
    }

    pub fn scaled(&self, s: &C) -> Self {
        let mut out = self.zero_like();
        out.add_scaled(self, s);
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::new(self.grid, self.degree_cap);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> Poly<c64> {
        self.map_coeffs(|c| c.to_c64())
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            grid: self.grid,
            degree_cap: self.degree_cap,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Terms of weight zero, which commute with `G`.
    pub fn resonant_part(&self) -> Self {
        self.filter(|m| m.weight() == 0)
    }

    /// Terms carrying exactly `ε^s`.
    pub fn eps_order(&self, s: u16) -> Self {
        self.filter(|m| m.eps == s)
    }

    /// True when every term carries exactly `ε^s`.
    pub fn is_homogeneous(&self, s: u16) -> bool {
        self.terms.keys().all(|m| m.eps == s)
    }

    /// Largest `|c(α,β) − conj(c(β,α))|`; zero for a real-valued function.
    pub fn reality_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| (c.clone() - self.coeff(&m.conjugate()).conj()).abs())
            .chain(
                // partners missing entirely
                self.terms.iter().filter(|(m, _)| !self.terms.contains_key(&m.conjugate())).map(|(_, c)| c.abs()),
            )
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(m, c)| self.coeff(&m.conjugate()).conj() == *c)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Coeff::abs).fold(0.0, f64::max)
    }

    /// `Σ |c| ε^k R^deg`, an upper bound of the sup-norm on the polydisc of radius `R`.
    pub fn weighted_norm(&self, eps: f64, radius: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.abs() * eps.powi(m.eps as i32) * radius.powi(m.degree() as i32))
            .sum()
    }

    /// Coefficients multiplied by `ε^k`, grading removed.
    pub fn specialize(&self, eps: f64) -> Poly<c64> {
        let mut out = Poly::new(self.grid, self.degree_cap);
        for (m, c) in &self.terms {
            let scale = eps.powi(m.eps as i32);
            out.add_term(Monomial { eps: 0, factors: m.factors.clone() }, c.to_c64() * scale);
        }
        out
    }

    /// `∂/∂ζ_site` (or `∂/∂ζ̄_site` when `conj`).
    pub fn derivative(&self, site: usize, conj: bool) -> Self {
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let (a, b) = m.exponents(site);
            let e = if conj { b } else { a };
            if e == 0 {
                continue;
            }
            let reduced = if conj { m.with_exponents(site, a, b - 1) } else { m.with_exponents(site, a - 1, b) };
            out.add_term(reduced, c.clone() * C::ratio(e as i64, 1));
        }
        out
    }

    /// Value at `z` with `ε` substituted.
    pub fn evaluate(&self, z: &[c64], eps: f64) -> c64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_c64() * m.evaluate(z) * eps.powi(m.eps as i32))
            .fold(c64::new(0.0, 0.0), |a, b| a + b)
    }

    /// Sites carrying a nonzero exponent in some term.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.terms.keys().flat_map(|m| m.factors.iter().map(|f| f.0 as usize)).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Poisson bracket `{f, g} = i Σ_j (∂_ζ̄j f ∂_ζj g − ∂_ζj f ∂_ζ̄j g)`.
    ///
    /// With this sign `{G, m} = i·w(m)·m` for `G = Σ|ζ_j|²`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("Poisson bracket of polynomials on different grids".into()));
        }
        let cap = self.degree_cap.max(other.degree_cap);
        let g_terms: Vec<(&Monomial, &C)> = other.terms.iter().collect();
        let mut by_site: HashMap<u32, Vec<usize>> = HashMap::new();
        for (k, (m, _)) in g_terms.iter().enumerate() {
            for f in &m.factors {
                by_site.entry(f.0).or_default().push(k);
            }
        }
        let f_terms: Vec<(&Monomial, &C)> = self.terms.iter().collect();
        let i = C::imag();
        let chunks: Vec<Result<Vec<(Monomial, C)>>> = f_terms
            .par_iter()
            .map(|(m1, c1)| {
                let mut local = Vec::new();
                for &(j, a1, b1) in &m1.factors {
                    let Some(list) = by_site.get(&j) else { continue };
                    for &k in list {
                        let (m2, c2) = g_terms[k];
                        let (a2, b2) = m2.exponents(j as usize);
                        let w = b1 as i64 * a2 as i64 - a1 as i64 * b2 as i64;
                        if w == 0 {
                            continue;
                        }
                        let m = m1.product_reduced(m2, j);
                        let degree = m.degree();
                        if degree > cap {
                            return Err(Error::DegreeOverflow { degree, cap });
                        }
                        local.push((m, i.clone() * (*c1).clone() * c2.clone() * C::ratio(w, 1)));
                    }
                }
                Ok(local)
            })
            .collect();
        let mut out = Self::new(self.grid, cap);
        for chunk in chunks {
            for (m, c) in chunk? {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Sorted text form: a header line, then `eps^k | site:a,b ... | re im` per term.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# dim={} radius={} boundary={} degree_cap={}",
            self.grid.dim, self.grid.radius, self.grid.boundary, self.degree_cap
        )?;
        for (m, c) in &self.terms {
            writeln!(w, "{} | {}", m.render(), c.render())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::InvalidInput("empty polynomial file".into()))??;
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for tok in header.trim_start_matches('#').split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                fields.insert(k, v);
            }
        }
        let get = |k: &str| -> Result<&str> {
            fields.get(k).copied().ok_or_else(|| Error::InvalidInput(format!("polynomial header lacks '{k}'")))
        };
        let num = |k: &str| -> Result<usize> {
            get(k)?.parse().map_err(|_| Error::InvalidInput(format!("bad header value for '{k}'")))
        };
        let boundary: Boundary = get("boundary")?.parse()?;
        let grid = LatticeGrid::new(num("dim")?, num("radius")?, boundary)?;
        let mut poly = Self::new(grid, num("degree_cap")?);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (mono, coeff) = line
                .rsplit_once('|')
                .ok_or_else(|| Error::InvalidInput(format!("bad polynomial line '{line}'")))?;
            poly.insert_checked(Monomial::parse(mono)?, C::parse(coeff)?)?;
        }
        Ok(poly)
    }
}

/// `G = Σ_j ζ_j ζ̄_j`, the harmonic action.
pub fn harmonic_action<C: Coeff>(grid: LatticeGrid, degree_cap: usize) -> Poly<C> {
    let mut g = Poly::new(grid, degree_cap);
    for j in 0..grid.num_sites() {
        g.add_term(Monomial::new(0, &[(j, 1, 1)]), C::one());
    }
    g
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1)) as i64
}

/// The scaled lattice Hamiltonian `H = G + F` in complex coordinates
/// `ζ = (u + i v)/√2`, with
/// `F = ε Σ_j u_j^{2p+2}/(2p+2) − (ε/2)⟨u, Δu⟩` and ε kept symbolic.
///
/// The numeric value of `eps` only decides whether `F` is present: `eps = 0`
/// yields `H = G`.
pub fn build_scaled_hamiltonian<C: Coeff>(grid: LatticeGrid, p: u32, eps: f64, degree_cap: usize) -> Result<Poly<C>> {
    if p == 0 {
        return Err(Error::InvalidInput("nonlinearity exponent p must be >= 1".into()));
    }
    let top = 2 * p as usize + 2;
    if top > degree_cap {
        return Err(Error::DegreeOverflow { degree: top, cap: degree_cap });
    }
    let mut h = harmonic_action(grid, degree_cap);
    if eps == 0.0 {
        return Ok(h);
    }
    // u^{2p+2}/(2p+2) = Σ_k C(2p+2,k) ζ^k ζ̄^{2p+2-k} / ((2p+2) 2^{p+1})
    let den = top as i64 * (1i64 << (p + 1));
    for j in 0..grid.num_sites() {
        for k in 0..=top {
            let c = C::ratio(binomial(top as u64, k as u64), den);
            h.add_term(Monomial::new(1, &[(j, k as u16, (top - k) as u16)]), c);
        }
    }
    // ε d Σ u_j² with u² = (ζ² + 2|ζ|² + ζ̄²)/2
    let d = grid.dim as i64;
    for j in 0..grid.num_sites() {
        h.add_term(Monomial::new(1, &[(j, 2, 0)]), C::ratio(d, 2));
        h.add_term(Monomial::new(1, &[(j, 1, 1)]), C::ratio(d, 1));
        h.add_term(Monomial::new(1, &[(j, 0, 2)]), C::ratio(d, 2));
    }
    // −ε Σ_edges u_i u_j with u_i u_j = (ζ_i + ζ̄_i)(ζ_j + ζ̄_j)/2
    for (i, j) in grid.edges() {
        for (ai, bi) in [(1u16, 0u16), (0, 1)] {
            for (aj, bj) in [(1u16, 0u16), (0, 1)] {
                h.add_term(Monomial::new(1, &[(i, ai, bi), (j, aj, bj)]), C::ratio(-1, 2));
            }
        }
    }
    Ok(h)
}
