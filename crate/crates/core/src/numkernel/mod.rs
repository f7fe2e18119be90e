//! Dense complex linear algebra kernel.
//!
//! Everything here is written against [`ComplexMatrix`] / [`ComplexVector`]:
//! Hermitian inner products, operator norms, exponentials of skew-Hermitian
//! matrices through a cyclic Jacobi eigensolver, rank and nullspace decisions
//! through column-pivoted Householder QR, and determinants by partial-pivot
//! elimination.

mod matrix;
pub mod random;

pub use matrix::{ComplexMatrix, ComplexVector, RealMatrix, C64};
pub(crate) use matrix::{I, ONE, ZERO};

use crate::error::{Error, Result};

/// Relative pivot threshold used for rank decisions unless a caller overrides it.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Relative skew-Hermitian tolerance accepted by [`expm_skew`].
pub const SKEW_TOL: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// `<x, y> = Σ xᵢ·conj(yᵢ)`, linear in the first argument.
pub fn hermitian_inner(x: &ComplexVector, y: &ComplexVector) -> Result<C64> {
    if x.dim() != y.dim() {
        return Err(Error::Usage(format!(
            "inner product of vectors of dimension {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(x.dot(y))
}

/// Largest singular value of a square matrix.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Usage(format!(
            "operator norm needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let gram = &a.adjoint() * a;
    let eig = hermitian_eigen(&gram)?;
    let top = eig.values.iter().copied().fold(0.0, f64::max);
    Ok(top.max(0.0).sqrt())
}

/// Eigen-decomposition `H = V diag(values) V*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

/// Cyclic complex Jacobi on a Hermitian matrix. The input is symmetrized first;
/// sweeps stop once the off-diagonal Frobenius mass drops below `1e-12` times
/// the diagonal mass.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::Usage(
            "eigendecomposition needs a square matrix".into(),
        ));
    }
    let n = h.rows();
    let mut a = (h + &h.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    diag += a[(i, i)].re * a[(i, i)].re;
                } else {
                    off += a[(i, j)].norm_sqr();
                }
            }
        }
        if off == 0.0 || off.sqrt() <= JACOBI_TOL * diag.sqrt() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Internal(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new)] = v[(r, old)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`: `a ← J* a J`, `v ← v J`
/// with `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the (p, q) plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * e * s;
        a[(k, q)] = akp * s + akq * e * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e.conj() * s;
        a[(q, k)] = apk * s + aqk * e.conj() * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * e * s;
        v[(k, q)] = vkp * s + vkq * e * c;
    }
}

/// `exp(t·L)` for skew-Hermitian `L`, through the eigenbasis of the Hermitian `iL`.
pub fn expm_skew(l: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !l.is_square() {
        return Err(Error::Usage(
            "matrix exponential needs a square matrix".into(),
        ));
    }
    let norm = l.frobenius_norm();
    let residual = l.skew_residual();
    if residual > SKEW_TOL * norm {
        return Err(Error::Domain(format!(
            "exponent is not skew-Hermitian: ‖L + L*‖ = {residual:.3e}, ‖L‖ = {norm:.3e}"
        )));
    }
    let n = l.rows();
    if norm == 0.0 || t == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let eig = hermitian_eigen(&l.scale(I))?;
    let v = &eig.vectors;
    // exp(tL) = V diag(exp(-i t μ)) V*
    let mut scaled = v.clone();
    for (j, &mu) in eig.values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -t * mu);
        for r in 0..n {
            scaled[(r, j)] *= phase;
        }
    }
    Ok(&scaled * &v.adjoint())
}

/// Householder QR with column pivoting: `A P = Q R`.
struct PivotedQr {
    /// Upper-triangular factor, `rows x cols`, row-major in pivoted column order.
    r: RealMatrix,
    perm: Vec<usize>,
}

fn pivoted_qr(m: &RealMatrix) -> PivotedQr {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..cols).collect();
    let steps = rows.min(cols);
    for j in 0..steps {
        let (best, best_norm) = (j..cols)
            .map(|c| (c, (j..rows).map(|i| a[(i, c)] * a[(i, c)]).sum::<f64>()))
            .fold((j, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best != j {
            for i in 0..rows {
                let tmp = a[(i, j)];
                a[(i, j)] = a[(i, best)];
                a[(i, best)] = tmp;
            }
            perm.swap(j, best);
        }
        let norm = best_norm.sqrt();
        if norm == 0.0 {
            break;
        }
        let alpha = if a[(j, j)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| a[(i, j)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            v.iter_mut().for_each(|x| *x /= vnorm);
            for c in j + 1..cols {
                let dot: f64 = v.iter().enumerate().map(|(k, vk)| vk * a[(j + k, c)]).sum();
                for (k, vk) in v.iter().enumerate() {
                    a[(j + k, c)] -= 2.0 * vk * dot;
                }
            }
        }
        a[(j, j)] = alpha;
        for i in j + 1..rows {
            a[(i, j)] = 0.0;
        }
    }
    PivotedQr { r: a, perm }
}

fn qr_rank(qr: &PivotedQr, tol: f64) -> usize {
    let steps = qr.r.rows().min(qr.r.cols());
    if steps == 0 {
        return 0;
    }
    let lead = qr.r[(0, 0)].abs();
    if lead == 0.0 {
        return 0;
    }
    (0..steps)
        .take_while(|&j| qr.r[(j, j)].abs() > tol * lead)
        .count()
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Usage(format!(
            "rank tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Numerical rank: pivots larger than `tol` times the leading pivot.
pub fn real_rank(m: &RealMatrix, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    Ok(qr_rank(&pivoted_qr(m), tol))
}

/// Orthonormal basis of the numerical nullspace of a real matrix.
pub fn real_nullspace(m: &RealMatrix, tol: f64) -> Result<Vec<Vec<f64>>> {
    check_tol(tol)?;
    let cols = m.cols();
    let qr = pivoted_qr(m);
    let rank = qr_rank(&qr, tol);
    let r = &qr.r;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols - rank);
    for free in rank..cols {
        // R11 y = -R12[:, free]
        let mut z = vec![0.0; cols];
        z[free] = 1.0;
        for i in (0..rank).rev() {
            let mut acc = -r[(i, free)];
            for k in i + 1..rank {
                acc -= r[(i, k)] * z[k];
            }
            z[i] = acc / r[(i, i)];
        }
        let mut x = vec![0.0; cols];
        for (pos, &orig) in qr.perm.iter().enumerate() {
            x[orig] = z[pos];
        }
        basis.push(x);
    }
    Ok(orthonormalize_real(basis))
}

/// Modified Gram–Schmidt, applied twice. Drops vectors that collapse to zero.
pub(crate) fn orthonormalize_real(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        let original = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for u in &out {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 * original.max(1e-300) {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

/// Complex nullspace of a `p x m` complex system, computed on its realification.
/// Returns an orthonormal (Hermitian) basis.
pub fn complex_nullspace(system: &ComplexMatrix, tol: f64) -> Result<Vec<ComplexVector>> {
    let (p, m) = (system.rows(), system.cols());
    let mut real = RealMatrix::zeros(2 * p, 2 * m);
    for i in 0..p {
        for j in 0..m {
            let z = system[(i, j)];
            real[(i, j)] = z.re;
            real[(i, m + j)] = -z.im;
            real[(p + i, j)] = z.im;
            real[(p + i, m + j)] = z.re;
        }
    }
    let null = real_nullspace(&real, tol)?;
    let target = null.len() / 2;
    let candidates: Vec<ComplexVector> = null
        .iter()
        .map(|v| ComplexVector::from_realified(v))
        .collect();
    Ok(pivoted_complex_span(candidates, target))
}

/// Picks an orthonormal basis of the complex span of `candidates`, greedily taking the
/// candidate with the largest residual at each step, stopping after `limit` vectors.
pub(crate) fn pivoted_complex_span(
    mut candidates: Vec<ComplexVector>,
    limit: usize,
) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(limit);
    while basis.len() < limit && !candidates.is_empty() {
        let (idx, norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm < 1e-6 {
            break;
        }
        let chosen = candidates.swap_remove(idx).scale(C64::new(1.0 / norm, 0.0));
        for c in candidates.iter_mut() {
            for _ in 0..2 {
                let d = c.dot(&chosen);
                c.axpy(-d, &chosen);
            }
        }
        basis.push(chosen);
    }
    basis
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &ComplexMatrix) -> Result<C64> {
    if !m.is_square() {
        return Err(Error::Usage(format!(
            "determinant needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut acc = ONE;
    for j in 0..n {
        let pivot = (j..n)
            .max_by(|&x, &y| a[(x, j)].norm().total_cmp(&a[(y, j)].norm()))
            .unwrap_or(j);
        if a[(pivot, j)] == ZERO {
            return Ok(ZERO);
        }
        if pivot != j {
            for c in 0..n {
                let tmp = a[(j, c)];
                a[(j, c)] = a[(pivot, c)];
                a[(pivot, c)] = tmp;
            }
            acc = -acc;
        }
        let d = a[(j, j)];
        acc *= d;
        for r in j + 1..n {
            let f = a[(r, j)] / d;
            if f == ZERO {
                continue;
            }
            for c in j..n {
                let sub = f * a[(j, c)];
                a[(r, c)] -= sub;
            }
        }
    }
    Ok(acc)
}
