use super::eigen::normalize_column_signs;
use super::{dot, jacobi_eigh, norm2, DenseMatrix};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
/// Singular values below this fraction of the largest are treated as zero.
const SVD_RANK_TOL: f64 = 1e-10;

/// Thin SVD factors recovered from the Gram matrix `BᵀB`.
///
/// `left_vectors` always has as many columns as the input; the first
/// `rank_used` of them come from singular directions above the rank
/// tolerance, the rest complete the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinSvdResult {
    pub left_vectors: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub rank_used: usize,
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Fails with [`Error::RankDeficient`] on the first column whose residual norm
/// falls below `1e-12 * ‖B‖_F`.
pub fn gram_schmidt(b: &DenseMatrix) -> Result<DenseMatrix> {
    let scale = b.frobenius_norm();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        let mut v = b.column(j);
        orthogonalize(&mut v, &basis);
        let pivot = norm2(&v);
        if pivot < PIVOT_TOL * scale || pivot == 0.0 {
            return Err(Error::RankDeficient { column: j, pivot });
        }
        v.iter_mut().for_each(|x| *x /= pivot);
        basis.push(v);
    }
    if basis.is_empty() {
        return Ok(DenseMatrix::zeros(b.rows(), 0));
    }
    DenseMatrix::from_columns(&basis)
}

/// Two passes of modified Gram-Schmidt against an orthonormal basis.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let r = dot(q, v);
            for (x, qi) in v.iter_mut().zip(q) {
                *x -= r * qi;
            }
        }
    }
}

/// Left singular vectors of a tall matrix via the eigendecomposition of `BᵀB`.
///
/// For `B = U Σ Vᵀ`, `BᵀB = V Σ² Vᵀ` and `U = B V Σ⁻¹`. Directions whose
/// singular value falls below `1e-10 * σ₁` are dropped and replaced by the
/// standard basis vectors with the largest component outside the accepted
/// span, so the output always has orthonormal columns.
pub fn thin_svd_via_gram(b: &DenseMatrix) -> Result<ThinSvdResult> {
    let (n, k) = b.shape();
    if n < k {
        return Err(Error::Shape(format!(
            "thin SVD expects a tall matrix, got {n}x{k}"
        )));
    }
    if b.max_abs() == 0.0 {
        return Err(Error::DegenerateRank("input matrix is all zeros".into()));
    }
    let gram = b.t_matmul(b)?;
    let eig = jacobi_eigh(&gram)?;
    let singular_values: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let cutoff = SVD_RANK_TOL * singular_values[0];

    let bv = b.matmul(&eig.eigenvectors)?;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (j, &sigma) in singular_values.iter().enumerate() {
        if sigma < cutoff || sigma == 0.0 {
            break;
        }
        let mut u: Vec<f64> = bv.column(j).into_iter().map(|x| x / sigma).collect();
        orthogonalize(&mut u, &basis);
        let norm = norm2(&u);
        if norm < 0.5 {
            // Squared conditioning of the Gram route lost this direction.
            break;
        }
        u.iter_mut().for_each(|x| *x /= norm);
        basis.push(u);
    }
    let rank_used = basis.len();
    complete_basis(&mut basis, n, k);

    let mut left_vectors = DenseMatrix::from_columns(&basis)?;
    normalize_column_signs(&mut left_vectors);
    Ok(ThinSvdResult {
        left_vectors,
        singular_values,
        rank_used,
    })
}

/// Extends an orthonormal set in Rⁿ to `target` vectors using standard basis
/// vectors, always picking the one with the largest residual.
fn complete_basis(basis: &mut Vec<Vec<f64>>, n: usize, target: usize) {
    while basis.len() < target {
        // Residual of e_i against the basis: 1 - Σ_q q_i².
        let mut best = 0;
        let mut best_resid = f64::NEG_INFINITY;
        for i in 0..n {
            let captured: f64 = basis.iter().map(|q| q[i] * q[i]).sum();
            let resid = 1.0 - captured;
            if resid > best_resid {
                best_resid = resid;
                best = i;
            }
        }
        let mut v = vec![0.0; n];
        v[best] = 1.0;
        orthogonalize(&mut v, basis);
        let norm = norm2(&v);
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
}
