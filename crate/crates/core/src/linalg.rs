//! Small dense helpers shared by the geometry modules.

use nalgebra::{DMatrix, DVector};

/// Modified Gram-Schmidt with one re-orthogonalization pass against the
/// inner product `ip`. Vectors whose residual norm is at most
/// `drop_tol · max(1, |v|)` are treated as dependent and skipped.
pub fn gram_schmidt(vectors: &[DVector<f64>], ip: &DMatrix<f64>, drop_tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = inner(ip, v, v).max(0.0).sqrt().max(1.0);
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = inner(ip, &w, q);
                if c != 0.0 {
                    w.axpy(-c, q, 1.0);
                }
            }
        }
        let norm = inner(ip, &w, &w).max(0.0).sqrt();
        if norm > drop_tol * scale && norm > 0.0 {
            out.push(w / norm);
        }
    }
    out
}

#[inline]
pub fn inner(ip: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..y.len() {
        let yj = y[j];
        if yj == 0.0 {
            continue;
        }
        let mut col = 0.0;
        for i in 0..x.len() {
            let xi = x[i];
            if xi != 0.0 {
                col += xi * ip[(i, j)];
            }
        }
        acc += col * yj;
    }
    acc
}

/// Orthonormal basis (Euclidean) of the hyperplane `{u : Σ w_i u_i = 0}`,
/// returned as the columns of a `q × (q−1)` matrix. Built from the
/// Householder reflection that sends `w / |w|` to the first axis.
pub fn hyperplane_basis(w: &[f64]) -> DMatrix<f64> {
    let q = w.len();
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(norm > 0.0, "hyperplane normal must be nonzero");
    let mut v = DVector::from_iterator(q, w.iter().map(|x| x / norm));
    // Reflect onto −sign(v0)·e0 to avoid cancellation.
    let s = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += s;
    let vv = v.dot(&v);
    let h = DMatrix::identity(q, q) - (&v * v.transpose()) * (2.0 / vv);
    h.columns(1, q - 1).into_owned()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigenpairs of a symmetric matrix, ascending by eigenvalue.
pub fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Kernel dimension of `m`: columns minus singular values above `tol`.
pub fn kernel_dimension(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    if m.nrows() == 0 {
        return m.ncols();
    }
    // R from a QR factorisation has the singular values of a tall `m`.
    let sv = if m.nrows() > m.ncols() {
        m.clone().qr().r().singular_values()
    } else {
        m.clone().singular_values()
    };
    m.ncols() - sv.iter().filter(|s| **s > tol).count()
}

/// Dimension of the common kernel of `constraints`, all with `ncols`
/// columns. The kernel is refined one constraint at a time, so later
/// constraints act on an already reduced subspace. Singular values at most
/// `tol` count as zero.
pub fn common_kernel_dimension(constraints: impl IntoIterator<Item = DMatrix<f64>>, ncols: usize, tol: f64) -> usize {
    let mut basis: Option<DMatrix<f64>> = None;
    for c in constraints {
        let restricted = match &basis {
            Some(b) => &c * b,
            None => c,
        };
        if restricted.ncols() == 0 {
            return 0;
        }
        let ker = kernel_basis(restricted, tol);
        basis = Some(match basis {
            Some(b) => b * ker,
            None => ker,
        });
    }
    basis.map_or(ncols, |b| b.ncols())
}

/// Orthonormal basis of the numerical kernel of `m`, as columns.
fn kernel_basis(m: DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    let m = if m.nrows() > n {
        m.qr().r()
    } else {
        m.resize_vertically(n, 0.0)
    };
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let cols: Vec<_> = (0..n)
        .filter(|&i| svd.singular_values[i] <= tol)
        .map(|i| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}
