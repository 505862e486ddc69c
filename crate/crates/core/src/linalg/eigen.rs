use serde::Serialize;

use super::DenseMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
/// Above this order `symmetric_eigh` switches from Jacobi to Householder + QL.
const JACOBI_MAX_ORDER: usize = 64;
const QL_MAX_ITER: usize = 60;

/// Eigen-decomposition of a symmetric matrix.
///
/// `eigenvalues` are sorted in descending algebraic order and column `j` of
/// `eigenvectors` pairs with `eigenvalues[j]`. Each eigenvector is signed so
/// that its first entry of largest magnitude is positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EighResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: DenseMatrix,
}

/// Checks squareness and near-symmetry, returning `(A + Aᵀ)/2`.
fn symmetrized(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let scale = a.max_abs();
    let asym = a.asymmetry().unwrap_or(0.0);
    if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) && asym > 0.0 {
        return Err(Error::Parameter(format!(
            "matrix is not symmetric (max |a_ij - a_ji| = {asym:e})"
        )));
    }
    let n = a.rows();
    Ok(DenseMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)])))
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps over every off-diagonal pair until the off-diagonal Frobenius norm
/// drops to `1e-12 * ‖A‖_F`, giving up after 100 sweeps.
pub fn jacobi_eigh(a: &DenseMatrix) -> Result<EighResult> {
    let mut m = symmetrized(a)?;
    let n = m.rows();
    let mut v = DenseMatrix::identity(n);
    let target = OFF_DIAGONAL_TOL * m.frobenius_norm();

    let mut converged = false;
    let mut off = off_diagonal_norm(&m);
    for _ in 0..MAX_SWEEPS {
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
        off = off_diagonal_norm(&m);
    }
    if !converged && off > target {
        return Err(Error::Convergence {
            sweeps: MAX_SWEEPS,
            residual: off,
        });
    }
    Ok(finish(m.diagonal(), v))
}

/// Applies the rotation `A <- Jᵀ A J`, `V <- V J` in the (p, q) plane and
/// zeroes the annihilated pair.
fn rotate(m: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn off_diagonal_norm(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[(i, j)] * m[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Householder tridiagonalization followed by implicit QL.
///
/// Same contract as [`jacobi_eigh`]; O(n³) with a much smaller constant, so it
/// is the route used for graphs with more than a few dozen vertices.
pub fn tridiagonal_eigh(a: &DenseMatrix) -> Result<EighResult> {
    let sym = symmetrized(a)?;
    let n = sym.rows();
    if n == 0 {
        return Ok(EighResult {
            eigenvalues: Vec::new(),
            eigenvectors: DenseMatrix::zeros(0, 0),
        });
    }
    // `vt` holds Vᵀ row-major, so column sweeps over V are contiguous.
    let mut vt = sym.into_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder_tridiagonalize(n, &mut vt, &mut d, &mut e);
    implicit_ql(n, &mut vt, &mut d, &mut e)?;
    // Row j of `vt` is the eigenvector for d[j].
    let v = DenseMatrix::new(n, n, vt)?.transpose();
    Ok(finish(d, v))
}

/// Chooses Jacobi for small matrices and Householder + QL otherwise.
pub fn symmetric_eigh(a: &DenseMatrix) -> Result<EighResult> {
    if a.rows() <= JACOBI_MAX_ORDER {
        jacobi_eigh(a)
    } else {
        tridiagonal_eigh(a)
    }
}

// Index into V stored transposed: V(r, c) lives at vt[c * n + r].
macro_rules! v {
    ($vt:ident, $n:expr, $r:expr, $c:expr) => {
        $vt[($c) * $n + ($r)]
    };
}

fn householder_tridiagonalize(n: usize, vt: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v!(vt, n, n - 1, j);
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v!(vt, n, i - 1, j);
                v!(vt, n, i, j) = 0.0;
                v!(vt, n, j, i) = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e[..i].iter_mut() {
                *ej = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v!(vt, n, j, i) = f;
                let mut g = e[j] + v!(vt, n, j, j) * f;
                let col = &vt[j * n..j * n + n];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let col = &mut vt[j * n..j * n + n];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = col[i - 1];
                col[i] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the transformations.
    for i in 0..n - 1 {
        v!(vt, n, n - 1, i) = v!(vt, n, i, i);
        v!(vt, n, i, i) = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v!(vt, n, k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v!(vt, n, k, i + 1) * v!(vt, n, k, j);
                }
                let col = &mut vt[j * n..j * n + n];
                for k in 0..=i {
                    col[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v!(vt, n, k, i + 1) = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v!(vt, n, n - 1, j);
        v!(vt, n, n - 1, j) = 0.0;
    }
    v!(vt, n, n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

fn implicit_ql(n: usize, vt: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::Convergence {
                        sweeps: iter,
                        residual: e[l].abs(),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = vt.split_at_mut((i + 1) * n);
                    let col_i = &mut lo[i * n..];
                    let col_i1 = &mut hi[..n];
                    for (a, b) in col_i.iter_mut().zip(col_i1.iter_mut()) {
                        let hk = *b;
                        *b = s * *a + c * hk;
                        *a = c * *a - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Sorts eigenpairs descending and applies the sign convention.
fn finish(values: Vec<f64>, vectors: DenseMatrix) -> EighResult {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = DenseMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    normalize_column_signs(&mut eigenvectors);
    EighResult {
        eigenvalues,
        eigenvectors,
    }
}

/// Flips each column so its first entry of largest magnitude is positive.
pub(crate) fn normalize_column_signs(m: &mut DenseMatrix) {
    for j in 0..m.cols() {
        let mut best = 0.0_f64;
        let mut sign = 1.0;
        for i in 0..m.rows() {
            let v = m[(i, j)];
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            for i in 0..m.rows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
}
