//! Truncated cubic lattices, real fields on them, the discrete Laplacian and
//! the staggering transform.
//!
//! Sites are `n ∈ {-N..N}^d`, stored row-major with the first coordinate
//! varying slowest. The Laplacian is the nearest-neighbour sum minus `2d`
//! times the centre value, so its spectrum on the infinite lattice is
//! `[-4d, 0]`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Off-grid neighbours are zero.
    #[default]
    Dirichlet,
    /// Each axis wraps around.
    Periodic,
}

impl Boundary {
    fn tag(self) -> u8 {
        match self {
            Boundary::Dirichlet => 0,
            Boundary::Periodic => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Boundary::Dirichlet),
            1 => Ok(Boundary::Periodic),
            t => Err(Error::InvalidInput(format!("unknown boundary tag {t}"))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Dirichlet => write!(f, "dirichlet"),
            Boundary::Periodic => write!(f, "periodic"),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidInput(format!("unknown boundary '{other}'"))),
        }
    }
}

/// A truncated `d`-dimensional cubic lattice of radius `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeGrid {
    pub dim: usize,
    pub radius: usize,
    pub boundary: Boundary,
}

impl LatticeGrid {
    pub fn new(dim: usize, radius: usize, boundary: Boundary) -> Result<Self> {
        if dim == 0 || radius == 0 {
            return Err(Error::InvalidInput(format!(
                "lattice needs dim >= 1 and radius >= 1 (got d={dim}, N={radius})"
            )));
        }
        Ok(Self { dim, radius, boundary })
    }

    pub fn dirichlet(dim: usize, radius: usize) -> Self {
        Self::new(dim, radius, Boundary::Dirichlet).expect("positive lattice size")
    }

    pub fn periodic(dim: usize, radius: usize) -> Self {
        Self::new(dim, radius, Boundary::Periodic).expect("positive lattice size")
    }

    /// Number of sites along one axis, `2N+1`.
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn num_sites(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    /// Linear index of the site with coordinates `coords` (each in `-N..=N`).
    pub fn index(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.dim {
            return None;
        }
        let n = self.radius as i64;
        let side = self.side();
        let mut idx = 0usize;
        for &c in coords {
            if c < -n || c > n {
                return None;
            }
            idx = idx * side + (c + n) as usize;
        }
        Some(idx)
    }

    pub fn coords(&self, mut index: usize) -> Vec<i64> {
        let side = self.side();
        let mut out = vec![0i64; self.dim];
        for k in (0..self.dim).rev() {
            out[k] = (index % side) as i64 - self.radius as i64;
            index /= side;
        }
        out
    }

    pub fn origin(&self) -> usize {
        self.index(&vec![0; self.dim]).expect("origin is on the grid")
    }

    /// Nearest neighbours of `index` that exist under the boundary rule.
    pub fn neighbors(&self, index: usize) -> Vec<usize> {
        let side = self.side();
        let mut out = Vec::with_capacity(2 * self.dim);
        let mut stride = 1usize;
        for _ in 0..self.dim {
            let pos = (index / stride) % side;
            for step in [-1i64, 1] {
                let q = pos as i64 + step;
                let q = if q < 0 || q >= side as i64 {
                    match self.boundary {
                        Boundary::Dirichlet => continue,
                        Boundary::Periodic => q.rem_euclid(side as i64),
                    }
                } else {
                    q
                } as usize;
                out.push(index - pos * stride + q * stride);
            }
            stride *= side;
        }
        out
    }

    /// Neighbour table, one row per site.
    pub fn neighbor_table(&self) -> Vec<Vec<usize>> {
        (0..self.num_sites()).map(|i| self.neighbors(i)).collect()
    }

    /// Undirected nearest-neighbour edges `(i, j)` with `i < j`, each listed once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for i in 0..self.num_sites() {
            for j in self.neighbors(i) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// `(-1)^{n_1+...+n_d}` for the site at `index`.
    pub fn parity(&self, index: usize) -> f64 {
        let s: i64 = self.coords(index).iter().sum();
        if s.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// True when the site lies on the outermost shell (some |n_k| = N).
    pub fn on_boundary_shell(&self, index: usize) -> bool {
        let n = self.radius as i64;
        self.coords(index).iter().any(|c| c.abs() == n)
    }

    /// Writes `(Δf)` into `out`. Both slices have `num_sites()` entries.
    pub fn laplacian_into(&self, f: &[f64], out: &mut [f64]) {
        if self.dim == 1 {
            // hot path for the time integrators
            let s = f.len();
            let periodic = self.boundary == Boundary::Periodic;
            for i in 0..s {
                let left = if i > 0 {
                    f[i - 1]
                } else if periodic {
                    f[s - 1]
                } else {
                    0.0
                };
                let right = if i + 1 < s {
                    f[i + 1]
                } else if periodic {
                    f[0]
                } else {
                    0.0
                };
                out[i] = left + right - 2.0 * f[i];
            }
            return;
        }
        let two_d = 2.0 * self.dim as f64;
        for i in 0..f.len() {
            let sum: f64 = self.neighbors(i).iter().map(|&j| f[j]).sum();
            out[i] = sum - two_d * f[i];
        }
    }
}

/// Real-valued field with one value per lattice site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealField {
    pub grid: LatticeGrid,
    pub values: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: LatticeGrid) -> Self {
        Self { grid, values: vec![0.0; grid.num_sites()] }
    }

    pub fn from_values(grid: LatticeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_sites() {
            return Err(Error::InvalidInput(format!(
                "field has {} values but the grid has {} sites",
                values.len(),
                grid.num_sites()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: LatticeGrid, f: impl Fn(&[i64]) -> f64) -> Self {
        let values = (0..grid.num_sites()).map(|i| f(&grid.coords(i))).collect();
        Self { grid, values }
    }

    /// Kronecker delta at the origin scaled by `amplitude`.
    pub fn delta(grid: LatticeGrid, amplitude: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.values[grid.origin()] = amplitude;
        f
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, coords: &[i64]) -> f64 {
        self.grid.index(coords).map(|i| self.values[i]).unwrap_or(0.0)
    }

    pub fn dot(&self, other: &RealField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> RealField {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn add(&self, other: &RealField) -> RealField {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> RealField {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> RealField {
        debug_assert_eq!(self.grid, other.grid);
        RealField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// ℓ² norm of the values on the outermost shell of the grid.
    pub fn boundary_layer_norm(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.on_boundary_shell(*i))
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Writes the CSV layout: a header record `d,N,boundary`, its values, then
    /// one `value` record per site in row-major order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().flexible(true).from_writer(w);
        wr.write_record(["d", "N", "boundary"])?;
        wr.write_record([
            self.grid.dim.to_string(),
            self.grid.radius.to_string(),
            self.grid.boundary.to_string(),
        ])?;
        wr.write_record(["value"])?;
        for v in &self.values {
            wr.write_record([format!("{v:.17e}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().flexible(true).has_headers(true).from_reader(r);
        let mut records = rd.records();
        let head = records
            .next()
            .ok_or_else(|| Error::InvalidInput("field CSV is missing its header values".into()))??;
        let parse = |k: usize| -> Result<usize> {
            head.get(k)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::InvalidInput("bad field CSV header".into()))
        };
        let grid = LatticeGrid::new(
            parse(0)?,
            parse(1)?,
            head.get(2).unwrap_or("dirichlet").parse()?,
        )?;
        let _ = records.next();
        let mut values = Vec::with_capacity(grid.num_sites());
        for rec in records {
            let rec = rec?;
            let v: f64 = rec
                .get(0)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::InvalidInput("bad field CSV value".into()))?;
            values.push(v);
        }
        RealField::from_values(grid, values)
    }

    /// Binary layout: magic `KGF1`, u32 d, u32 N, u8 boundary, then f64 values (little endian).
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"KGF1")?;
        w.write_all(&(self.grid.dim as u32).to_le_bytes())?;
        w.write_all(&(self.grid.radius as u32).to_le_bytes())?;
        w.write_all(&[self.grid.boundary.tag()])?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"KGF1" {
            return Err(Error::InvalidInput("not a lattice field file".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4)?;
        let radius = u32::from_le_bytes(b4) as usize;
        let mut b1 = [0u8; 1];
        r.read_exact(&mut b1)?;
        let grid = LatticeGrid::new(dim, radius, Boundary::from_tag(b1[0])?)?;
        let mut values = Vec::with_capacity(grid.num_sites());
        let mut b8 = [0u8; 8];
        for _ in 0..grid.num_sites() {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        RealField::from_values(grid, values)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        crate::io::write_atomic(path, &buf)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Discrete Laplacian `(Δf)_n = Σ_{|k-n|=1} f_k - 2d f_n` under the grid's boundary rule.
pub fn laplacian(f: &RealField) -> RealField {
    let mut out = vec![0.0; f.len()];
    f.grid.laplacian_into(&f.values, &mut out);
    RealField { grid: f.grid, values: out }
}

/// Staggering transform: `((-1)^{n_1+...+n_d} f_n, -4d - Ω̃)`.
///
/// Maps solutions of the focusing stationary equation at `Ω̃` to the
/// defocusing form at `Ω`, and back (it is an involution).
pub fn stagger(f: &RealField, omega_tilde: f64) -> (RealField, f64) {
    let grid = f.grid;
    let values = f.values.iter().enumerate().map(|(i, v)| grid.parity(i) * v).collect();
    (RealField { grid, values }, -4.0 * grid.dim as f64 - omega_tilde)
}

pub fn l2_norm(f: &RealField) -> f64 {
    f.values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Dense matrix of the Laplacian (row-major, `S × S`).
pub fn laplacian_matrix(grid: &LatticeGrid) -> faer::Mat<f64> {
    let s = grid.num_sites();
    let two_d = 2.0 * grid.dim as f64;
    let mut m = faer::Mat::<f64>::zeros(s, s);
    for i in 0..s {
        m[(i, i)] -= two_d;
        for j in grid.neighbors(i) {
            m[(i, j)] += 1.0;
        }
    }
    m
}
