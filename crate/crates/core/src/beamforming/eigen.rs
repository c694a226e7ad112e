//! Principal eigenvector of a Hermitian positive semidefinite matrix by
//! power iteration.
//!
//! The iteration matrix is squared every [`SQUARING_PERIOD`] steps. Squaring
//! keeps the eigenvectors of a Hermitian PSD matrix and squares the ratio
//! between its two largest eigenvalues, so nearly tied spectra still converge
//! within the iteration budget. Convergence is always judged against the
//! original matrix.

use crate::{CMatrix, CVector, Complex64, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

const SQUARING_PERIOD: usize = 64;
/// Relative eigenvalue gap below which the top eigenspace is reported as
/// degenerate.
const DEGENERACY_GAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Unit-norm eigenvector, first significant entry real and positive.
    pub vector: CVector,
    /// Rayleigh quotient `vᴴ Z v`.
    pub value: f64,
    /// Matrix-vector products spent.
    pub iterations: usize,
    /// True when the second eigenvalue is within a relative 1e-9 of the first;
    /// `vector` is then one arbitrary unit vector of the top eigenspace.
    pub degenerate: bool,
}

pub fn principal_eigenvector(z: &CMatrix, tol: f64, max_iters: usize) -> Result<EigenPair> {
    if !z.is_square() {
        return Err(Error::DimensionMismatch {
            what: "eigenproblem matrix columns",
            expected: z.nrows(),
            actual: z.ncols(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let scale = z.norm();
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::DegenerateMatrix);
    }
    let base = z / Complex64::new(scale, 0.0);
    let mut iter_mat = base.clone();
    let mut v = starting_vector(&base);
    let mut iterations = 0;

    let lambda = loop {
        let bv = &base * &v;
        let lambda = v.dotc(&bv).re;
        let residual = (&bv - &v * Complex64::new(lambda, 0.0)).norm();
        if lambda > 0.0 && residual <= tol * lambda {
            break lambda;
        }
        if iterations >= max_iters {
            return Err(Error::NoConvergence {
                iterations,
                residual: if lambda > 0.0 { residual / lambda } else { f64::INFINITY },
            });
        }
        let w = &iter_mat * &v;
        let norm = w.norm();
        v = if norm > 0.0 {
            w / Complex64::new(norm, 0.0)
        } else {
            // Landed in the null space; restart from a basis vector.
            CVector::from_fn(base.nrows(), |i, _| {
                Complex64::new(if i == iterations % base.nrows() { 1.0 } else { 0.0 }, 0.0)
            })
        };
        iterations += 1;
        if iterations % SQUARING_PERIOD == 0 {
            let sq = &iter_mat * &iter_mat;
            let sq_norm = sq.norm();
            if sq_norm > 0.0 && sq_norm.is_finite() {
                iter_mat = sq / Complex64::new(sq_norm, 0.0);
            }
        }
    };

    let degenerate = second_eigenvalue_estimate(&base, &v, lambda) >= lambda * (1.0 - DEGENERACY_GAP);
    normalize_phase(&mut v);
    let value = v.dotc(&(z * &v)).re;
    Ok(EigenPair {
        vector: v,
        value,
        iterations,
        degenerate,
    })
}

/// Rotates `v` so its first entry with modulus above 1e-9 is real positive.
pub fn normalize_phase(v: &mut CVector) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-9).copied() {
        let rot = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

/// A generic combination of the columns, so it has a component along the
/// top eigenspace unless that eigenspace is orthogonal to every column.
fn starting_vector(a: &CMatrix) -> CVector {
    let n = a.nrows();
    let weights = CVector::from_fn(n, |j, _| {
        Complex64::from_polar(1.0 + 0.37 * j as f64, 0.9 * j as f64 + 0.1)
    });
    let mut v = a * weights;
    let norm = v.norm();
    if norm > 0.0 {
        v /= Complex64::new(norm, 0.0);
        v
    } else {
        let mut e = CVector::zeros(n);
        e[0] = Complex64::new(1.0, 0.0);
        e
    }
}

/// Lower bound on the second eigenvalue: the best Rayleigh quotient of a
/// short power iteration on the deflated matrix.
fn second_eigenvalue_estimate(a: &CMatrix, top: &CVector, lambda: f64) -> f64 {
    let n = a.nrows();
    if n < 2 {
        return 0.0;
    }
    let deflated = a - top * top.adjoint() * Complex64::new(lambda, 0.0);
    let mut v = CVector::from_fn(n, |j, _| Complex64::from_polar(1.0, 1.3 * j as f64 + 0.2));
    // Project out the top direction so the start lies in its complement.
    let overlap = top.dotc(&v);
    v -= top * overlap;
    let mut best: f64 = 0.0;
    for _ in 0..100 {
        let norm = v.norm();
        if norm == 0.0 {
            break;
        }
        v /= Complex64::new(norm, 0.0);
        let w = &deflated * &v;
        best = best.max(v.dotc(&w).re);
        v = w;
    }
    best
}
