use nalgebra::SymmetricEigen;

use super::{canonical_phase, CMat, CVec, C64, I, ONE, ZERO};
use crate::tolerance;
use crate::{Error, Result};

/// Spectrum of a Hermitian matrix, eigenvalues non-increasing, eigenvectors
/// in the matching columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> CMat {
        let n = self.values.len();
        let mut out = CMat::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * C64::from(lam);
        }
        out
    }
}

/// Pauli matrices, `pauli(0) = I`, then X, Y, Z.
pub fn pauli(k: usize) -> CMat {
    match k {
        0 => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        1 => CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        3 => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * C64::from(0.5)
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.is_square() && frobenius(&(u.adjoint() * u - CMat::identity(u.nrows(), u.nrows()))) <= tol
}

fn hermitian_deviation(h: &CMat) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Two-dimensional inputs use the closed-form quadratic path; larger ones go
/// through nalgebra's symmetric eigensolver. Eigenvectors are phase-fixed so
/// that their first non-negligible component is real positive. A degenerate
/// 2×2 spectrum returns the computational basis.
pub fn eig_hermitian(h: &CMat) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: h.ncols(),
        });
    }
    let dev = hermitian_deviation(h);
    if dev > tolerance::HERMITIAN_INPUT {
        return Err(Error::NotHermitian(dev));
    }
    if h.nrows() == 2 {
        return Ok(eig_2x2(h));
    }
    let sym = SymmetricEigen::new(hermitian_part(h));
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[b].total_cmp(&sym.eigenvalues[a]));
    let mut vectors = CMat::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(sym.eigenvalues[k]);
        vectors.set_column(col, &sym.eigenvectors.column(k));
    }
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= DEGENERACY * values[start].abs().max(1.0) {
            end += 1;
        }
        if end - start > 1 {
            fix_degenerate_block(&mut vectors, start, end);
        }
        start = end;
    }
    for col in 0..n {
        let mut v: CVec = vectors.column(col).into_owned();
        canonical_phase(&mut v);
        vectors.set_column(col, &v);
    }
    Ok(HermitianEigen { values, vectors })
}

const DEGENERACY: f64 = 1e-10;

/// Replaces the eigenvectors of a degenerate block by the Gram–Schmidt
/// orthonormalisation of the projected computational basis, in index order.
fn fix_degenerate_block(vectors: &mut CMat, start: usize, end: usize) {
    let n = vectors.nrows();
    let block = vectors.columns(start, end - start).into_owned();
    let proj = &block * block.adjoint();
    let mut chosen: Vec<CVec> = Vec::with_capacity(end - start);
    for j in 0..n {
        if chosen.len() == end - start {
            break;
        }
        let mut v: CVec = proj.column(j).into_owned();
        for c in &chosen {
            let ov = c.dotc(&v);
            v -= c * ov;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            chosen.push(v / C64::from(norm));
        }
    }
    if chosen.len() == end - start {
        for (k, v) in chosen.iter().enumerate() {
            vectors.set_column(start + k, v);
        }
    }
}

fn eig_2x2(h: &CMat) -> HermitianEigen {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let radius = (half * half + b.norm_sqr()).sqrt();
    let hi = mean + radius;
    let lo = mean - radius;
    let scale = a.abs().max(d.abs()).max(b.norm()).max(f64::MIN_POSITIVE);
    let mut v0 = if radius <= 1e-15 * scale {
        CVec::from_vec(vec![ONE, ZERO])
    } else {
        // (H - hi) v = 0 has two candidate solutions; the longer one is the
        // numerically stable choice.
        let c1 = CVec::from_vec(vec![b, C64::from(hi - a)]);
        let c2 = CVec::from_vec(vec![C64::from(hi - d), b.conj()]);
        if c1.norm() >= c2.norm() {
            c1.normalize()
        } else {
            c2.normalize()
        }
    };
    canonical_phase(&mut v0);
    let mut v1 = CVec::from_vec(vec![-v0[1].conj(), v0[0].conj()]);
    canonical_phase(&mut v1);
    let mut vectors = CMat::zeros(2, 2);
    vectors.set_column(0, &v0);
    vectors.set_column(1, &v1);
    HermitianEigen {
        values: vec![hi, lo],
        vectors,
    }
}

fn spectral_map(h: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let eig = eig_hermitian(h)?;
    let n = h.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &lam) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        out += (v * v.adjoint()) * C64::from(f(lam));
    }
    Ok(out)
}

/// Square root of a positive semidefinite matrix; negative round-off
/// eigenvalues are clamped at zero.
pub fn psd_sqrt(h: &CMat) -> Result<CMat> {
    spectral_map(h, |x| x.max(0.0).sqrt())
}

/// Inverse square root of a positive definite matrix.
pub fn psd_inv_sqrt(h: &CMat) -> Result<CMat> {
    let eig = eig_hermitian(h)?;
    let smallest = *eig.values.last().unwrap_or(&0.0);
    if smallest <= 0.0 {
        return Err(Error::Numerical {
            routine: "psd_inv_sqrt",
            residual: smallest,
        });
    }
    spectral_map(h, |x| 1.0 / x.sqrt())
}
