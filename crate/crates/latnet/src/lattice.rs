//! Rank-1 lattice point sets, random shifting, and QMC integration.
//!
//! Points are indexed k = 1..N with t_k = {k z / N}, so row N is the
//! origin (equivalently the point usually indexed 0). Fractional parts are
//! computed in exact integer arithmetic (k·z mod N) before dividing by N.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use std::fmt::Write as _;
use std::path::Path;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Modulus N and integer components z_1..z_s of a rank-1 lattice rule.
///
/// Components are stored reduced mod N; for N >= 2 each must lie in
/// Z_N = {z : 1 <= z <= N-1, gcd(z, N) = 1}. N = 1 is the single-point
/// rule (all components reduce to 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingVector {
    n: u64,
    z: Vec<u64>,
}

impl GeneratingVector {
    pub fn new(n: u64, z: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGeneratingVector("modulus N must be >= 1".into()));
        }
        let z: Vec<u64> = z.iter().map(|&zj| zj % n).collect();
        if n > 1 {
            for (j, &zj) in z.iter().enumerate() {
                if zj == 0 {
                    return Err(Error::InvalidGeneratingVector(format!(
                        "component z_{} is 0 mod N",
                        j + 1
                    )));
                }
                if gcd(zj, n) != 1 {
                    return Err(Error::InvalidGeneratingVector(format!(
                        "gcd(z_{} = {}, N = {}) != 1",
                        j + 1,
                        zj,
                        n
                    )));
                }
            }
        }
        Ok(GeneratingVector { n, z })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn components(&self) -> &[u64] {
        &self.z
    }

    /// All units of Z_N (candidate components), ascending.
    pub fn units(n: u64) -> Vec<u64> {
        (1..n.max(2)).filter(|&z| gcd(z, n) == 1).collect()
    }

    /// Load from the plain text format: first non-comment line is N, then
    /// one component per line. Lines starting with '#' are comments; a
    /// trailing '#' comment on a value line is allowed.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let pstr = path.display().to_string();
        let mut numbers: Vec<(usize, u64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|_| Error::Parse {
                path: pstr.clone(),
                line: i + 1,
                msg: format!("expected an integer, got {line:?}"),
            })?;
            numbers.push((i + 1, v));
        }
        let Some(&(_, n)) = numbers.first() else {
            return Err(Error::Parse {
                path: pstr,
                line: 1,
                msg: "empty generating-vector file".into(),
            });
        };
        let z = numbers[1..].iter().map(|&(_, v)| v).collect();
        GeneratingVector::new(n, z)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(out, "# rank-1 lattice generating vector");
        let _ = writeln!(out, "{}", self.n);
        for zj in &self.z {
            let _ = writeln!(out, "{zj}");
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// N x s points in [0,1)^s, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    dim: usize,
}

impl PointSet {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let dim = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * dim);
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch("ragged point rows".into()));
            }
            for &x in r {
                if !(0.0..1.0).contains(&x) {
                    return Err(Error::range(format!("point entry {x} outside [0,1)")));
                }
            }
            data.extend_from_slice(r);
        }
        Ok(PointSet { data, n, dim })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Point with storage index i (0-based; i = k-1 for lattice index k).
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1)).take(self.n)
    }
}

/// A shift vector in [0,1)^s.
#[derive(Debug, Clone, PartialEq)]
pub struct Shift(pub Vec<f64>);

impl Shift {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        for &x in &d {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::range(format!("shift entry {x} outside [0,1)")));
            }
        }
        Ok(Shift(d))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Points t_k = {k z / N}, k = 1..N (row N is the origin).
pub fn lattice_points(gv: &GeneratingVector) -> PointSet {
    let n = gv.modulus();
    let s = gv.dim();
    let mut data = Vec::with_capacity(n as usize * s);
    let nf = n as f64;
    for k in 1..=n {
        for &zj in gv.components() {
            let r = ((k as u128 * zj as u128) % n as u128) as u64;
            data.push(r as f64 / nf);
        }
    }
    PointSet {
        data,
        n: n as usize,
        dim: s,
    }
}

/// Entrywise {p + d} with wrap-around into [0,1).
pub fn shift_points(p: &PointSet, d: &Shift) -> Result<PointSet> {
    if p.dim() != d.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point dim {} vs shift dim {}",
            p.dim(),
            d.dim()
        )));
    }
    let mut data = Vec::with_capacity(p.data.len());
    for row in p.iter() {
        for (x, dj) in row.iter().zip(&d.0) {
            let mut y = x + dj;
            if y >= 1.0 {
                y -= 1.0;
            }
            data.push(y);
        }
    }
    Ok(PointSet {
        data,
        n: p.n,
        dim: p.dim,
    })
}

/// Equal-weight cubature (1/N) sum of f over the point set.
pub fn qmc_integrate(f: impl Fn(&[f64]) -> f64, p: &PointSet) -> f64 {
    let mut acc = 0.0;
    for row in p.iter() {
        acc += f(row);
    }
    acc / p.len() as f64
}

/// s independent uniforms in [0,1).
pub fn random_shift(rng: &mut SplitMix64, s: usize) -> Shift {
    Shift((0..s).map(|_| rng.next_f64()).collect())
}
