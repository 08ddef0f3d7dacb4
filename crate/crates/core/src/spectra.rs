//! Numeric spectra of real nonsymmetric Hamiltonians.
//!
//! Eigenvalues come from a real Schur decomposition. Each one is then
//! certified independently by the normalized residual
//! `|det(lambda I - M)| / (1 + |lambda|)^N`, evaluated through a complex LU
//! factorization, so a root is accepted only if the characteristic polynomial
//! (monic, degree `N`) nearly vanishes there.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{assemble_amended, AmendedCouplingSet};
use crate::lattice::GraphFamilySpec;
use crate::polyring::rational::to_f64;
use crate::polyring::{Matrix, Rational};

pub const DEFAULT_TOL: f64 = 1e-10;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub tol_imag: f64,
    pub n_real: usize,
    pub n_complex_pairs: usize,
    pub all_real: bool,
    /// Some imaginary part or eigenvalue gap lies within two decades of
    /// `tol_imag`, so the real/complex verdict depends on the threshold.
    pub marginal: bool,
    pub max_imag: f64,
}

impl Spectrum {
    pub fn worst_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }

    /// Every eigenvalue has its conjugate in the multiset, within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let conj: Vec<Complex64> = self.eigenvalues.iter().map(|z| z.conj()).collect();
        multiset_distance(&self.eigenvalues, &conj) <= tol
    }

    pub fn to_doc(&self) -> SpectrumDoc {
        SpectrumDoc {
            eigenvalues: self
                .eigenvalues
                .iter()
                .map(|z| ComplexDoc { re: z.re, im: z.im })
                .collect(),
            residuals: self.residuals.clone(),
            all_real: self.all_real,
            marginal: self.marginal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub eigenvalues: Vec<ComplexDoc>,
    pub residuals: Vec<f64>,
    pub all_real: bool,
    pub marginal: bool,
}

pub fn tol_imag_for(tol: f64) -> f64 {
    (tol * 100.0).max(1e-8)
}

/// Residual-certified eigenvalues.
pub fn eigenvalues(m: &Matrix<f64>, tol: f64) -> Result<Spectrum> {
    let s = spectrum_uncertified(m, tol)?;
    let worst = s.worst_residual();
    if worst.is_nan() || worst > tol {
        return Err(Error::Residual { worst, tol });
    }
    Ok(s)
}

/// Same as [`eigenvalues`] but leaves residual checking to the caller.
pub fn spectrum_uncertified(m: &Matrix<f64>, tol: f64) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::domain("eigenvalues of a non-square matrix"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let raw = raw_eigenvalues(m)?;
    let tol_imag = tol_imag_for(tol);
    let (eigenvalues, n_real, n_complex_pairs) = classify(&raw, tol_imag)?;
    let marginal = is_marginal(&raw, tol_imag);
    let residuals = eigenvalues
        .iter()
        .map(|&z| normalized_residual(m, z))
        .collect();
    let max_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(Spectrum {
        eigenvalues,
        residuals,
        tol_imag,
        n_real,
        n_complex_pairs,
        all_real: n_complex_pairs == 0,
        marginal,
        max_imag,
    })
}

/// True when an imaginary part or a gap between two eigenvalues falls in
/// the window `(tol_imag/100, 100 tol_imag)`. A defective coalescence
/// splits by about `sqrt(eps)` and lands there, an exact semisimple
/// degeneracy splits by about `eps` and does not.
fn is_marginal(raw: &[Complex64], tol_imag: f64) -> bool {
    let window = |x: f64| x > tol_imag * 1e-2 && x < tol_imag * 1e2;
    raw.iter().any(|z| window(z.im.abs()))
        || raw
            .iter()
            .enumerate()
            .any(|(i, a)| raw[i + 1..].iter().any(|b| window((a - b).norm())))
}

fn raw_eigenvalues(m: &Matrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.row(0)
        .iter()
        .chain((1..n).flat_map(|i| m.row(i).iter()))
        .any(|x| !x.is_finite())
    {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let dm = DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let schur = Schur::try_new(dm, f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok(quasi_triangular_eigenvalues(&t))
}

/// Eigenvalues of a real quasi-triangular Schur factor. 2x2 blocks are
/// solved with a complex square root, so a discriminant that rounds to a
/// tiny negative number yields a near-real pair rather than NaN.
fn quasi_triangular_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = 0.5 * (a + d);
            let half_diff = 0.5 * (a - d);
            let root = Complex64::new(half_diff * half_diff + b * c, 0.0).sqrt();
            out.push(half_tr + root);
            out.push(half_tr - root);
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    out
}

/// Snaps near-real values to the real axis and pairs the rest into exact
/// conjugates.
fn classify(raw: &[Complex64], tol_imag: f64) -> Result<(Vec<Complex64>, usize, usize)> {
    let mut out = Vec::with_capacity(raw.len());
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &z in raw {
        if z.im.abs() <= tol_imag {
            out.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    let n_real = out.len();
    if upper.len() != lower.len() {
        return Err(Error::NoConvergence);
    }
    for u in upper.iter() {
        let (idx, _) = lower
            .iter()
            .enumerate()
            .map(|(i, l)| (i, (l.conj() - u).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("as many lower as upper values");
        let l = lower.swap_remove(idx);
        let re = 0.5 * (u.re + l.re);
        let im = 0.5 * (u.im - l.im);
        out.push(Complex64::new(re, im));
        out.push(Complex64::new(re, -im));
    }
    sort_spectrum(&mut out);
    Ok((out, n_real, upper.len()))
}

pub fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// `|det(lambda I - M)| / (1 + |lambda|)^N` by LU with partial pivoting.
pub fn normalized_residual(m: &Matrix<f64>, lambda: Complex64) -> f64 {
    let n = m.n();
    let mut a: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let d = if i == j {
                lambda
            } else {
                Complex64::new(0.0, 0.0)
            };
            d - m[(i, j)]
        })
        .collect();
    let scale = 1.0 + lambda.norm();
    // accumulate |det| / scale^N one pivot at a time to avoid overflow
    let mut det = 1.0f64;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
            .expect("nonempty range");
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
        }
        let p = a[col * n + col];
        det *= p.norm() / scale;
        if p.norm() == 0.0 {
            return 0.0;
        }
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let t = a[col * n + j];
                a[r * n + j] -= f * t;
            }
        }
    }
    det
}

/// Roots of `sum c_i x^i` from the eigenvalues of its companion matrix.
pub fn polynomial_roots(coeffs: &[Rational], tol: f64) -> Result<Vec<Complex64>> {
    let mut c: Vec<f64> = coeffs.iter().map(to_f64).collect();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let companion = Matrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -c[deg - 1 - j] / lead
        } else if j + 1 == i {
            1.0
        } else {
            0.0
        }
    });
    Ok(spectrum_uncertified(&companion, tol)?.eigenvalues)
}

/// Largest distance in a greedy nearest-neighbour matching of two multisets.
/// Returns infinity when the sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pool: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for x in a {
        let (idx, d) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("pool has as many entries as a");
        pool.swap_remove(idx);
        worst = worst.max(d);
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealityClass {
    pub all_real: bool,
    pub max_imag: f64,
    pub marginal: bool,
}

pub fn classify_reality(
    spec: &GraphFamilySpec,
    a: &AmendedCouplingSet,
    tol: f64,
) -> Result<RealityClass> {
    let s = eigenvalues(&assemble_amended(spec, a).to_f64(), tol)?;
    Ok(RealityClass {
        all_real: s.all_real,
        max_imag: s.max_imag,
        marginal: s.marginal,
    })
}
