//! Finite-dimensional real Lie algebras given by structure constants.
//!
//! A [`LieAlgebra`] carries its bracket as a dense rank-3 tensor
//! `[e_i, e_j] = Σ_k C[i][j][k] e_k`, a chosen bi-invariant inner product
//! and the Killing form `B(x, y) = tr(ad x · ad y)` computed from the tensor.
//! The compact classical algebras are produced from explicit matrix
//! realizations in [`matrix`].

pub mod matrix;

use nalgebra::{DMatrix, DVector};

use crate::error::AlgebraError;
use crate::linalg;

pub use matrix::{build_so, build_sp, build_su, build_torus};

/// Dense structure tensor `C[i][j][k]` of an `n`-dimensional algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    dim: usize,
    data: Vec<f64>,
}

impl StructureTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.offset(i, j, k)]
    }

    /// Writes a single entry without touching its antisymmetric partner.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let o = self.offset(i, j, k);
        self.data[o] = value;
    }

    /// Sets `C[i][j][k] = value` and `C[j][i][k] = -value`.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.set(i, j, k, value);
        self.set(j, i, k, -value);
    }

    /// Largest `|C[i][j][k] + C[j][i][k]|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Change of basis: the new basis vectors are the columns of `a`
    /// (`f_a = Σ_i a[(i, a)] e_i`).
    pub fn transform(&self, a: &DMatrix<f64>) -> Result<StructureTensor, AlgebraError> {
        let n = self.dim;
        let a_inv = a
            .clone()
            .try_inverse()
            .ok_or(AlgebraError::SingularChangeOfBasis)?;
        // X_k = Aᵀ C_{··k} A, then C'_{abc} = Σ_k X_k[a][b] · A⁻¹[c][k].
        let mut slices = Vec::with_capacity(n);
        for k in 0..n {
            let ck = DMatrix::from_fn(n, n, |i, j| self.get(i, j, k));
            slices.push(a.transpose() * ck * a);
        }
        let mut out = StructureTensor::zeros(n);
        for x in 0..n {
            for y in 0..n {
                for c in 0..n {
                    let mut acc = 0.0;
                    for (k, slice) in slices.iter().enumerate() {
                        let inv = a_inv[(c, k)];
                        if inv != 0.0 {
                            acc += slice[(x, y)] * inv;
                        }
                    }
                    out.set(x, y, c, acc);
                }
            }
        }
        Ok(out)
    }
}

/// Human-readable name of a basis element plus the set of matrix indices
/// its realization touches. Supports drive block-subalgebra embeddings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisLabel {
    pub name: String,
    pub support: Vec<usize>,
}

impl BasisLabel {
    pub fn new(name: impl Into<String>, support: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            support,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    name: String,
    structure: StructureTensor,
    ip: DMatrix<f64>,
    killing: DMatrix<f64>,
    labels: Vec<BasisLabel>,
    realization_size: usize,
    // Nonzero entries of [e_i, e_j], row-major over (i, j).
    sparse: Vec<Vec<(usize, f64)>>,
}

impl LieAlgebra {
    /// Assembles an algebra from raw structure constants and an inner product.
    ///
    /// Only the inner product is validated here (symmetric positive definite).
    /// Jacobi and bi-invariance are exposed as residuals so that corrupted
    /// input can be diagnosed instead of rejected outright.
    pub fn from_structure(
        name: impl Into<String>,
        structure: StructureTensor,
        ip: DMatrix<f64>,
    ) -> Result<Self, AlgebraError> {
        let n = structure.dim();
        if n == 0 {
            return Err(AlgebraError::EmptyAlgebra);
        }
        if ip.nrows() != n || ip.ncols() != n {
            return Err(AlgebraError::ShapeMismatch {
                expected: n,
                found: ip.nrows(),
            });
        }
        check_positive_definite(&ip)?;
        let labels = (0..n)
            .map(|i| BasisLabel::new(format!("e{i}"), Vec::new()))
            .collect();
        Ok(Self::assemble(name.into(), structure, ip, labels, 0))
    }

    fn assemble(
        name: String,
        structure: StructureTensor,
        ip: DMatrix<f64>,
        labels: Vec<BasisLabel>,
        realization_size: usize,
    ) -> Self {
        let sparse = sparse_brackets(&structure);
        let killing = killing_form(&structure, &sparse);
        Self {
            name,
            structure,
            ip,
            killing,
            labels,
            realization_size,
            sparse,
        }
    }

    pub(crate) fn with_realization(
        mut self,
        labels: Vec<BasisLabel>,
        realization_size: usize,
    ) -> Self {
        assert_eq!(labels.len(), self.dim());
        self.labels = labels;
        self.realization_size = realization_size;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn structure(&self) -> &StructureTensor {
        &self.structure
    }

    pub fn ip(&self) -> &DMatrix<f64> {
        &self.ip
    }

    pub fn killing(&self) -> &DMatrix<f64> {
        &self.killing
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    /// Number of natural (real, complex or quaternionic) matrix indices of the
    /// realization; 0 when the algebra was given by raw structure constants.
    pub fn realization_size(&self) -> usize {
        self.realization_size
    }

    /// Replaces the inner product; bi-invariance is not enforced.
    pub fn with_ip(mut self, ip: DMatrix<f64>) -> Result<Self, AlgebraError> {
        if ip.nrows() != self.dim() || ip.ncols() != self.dim() {
            return Err(AlgebraError::ShapeMismatch {
                expected: self.dim(),
                found: ip.nrows(),
            });
        }
        check_positive_definite(&ip)?;
        self.ip = ip;
        Ok(self)
    }

    /// Returns a copy with `C[i][j][k] = value` and `C[j][i][k] = -value`.
    pub fn with_structure_entry(&self, i: usize, j: usize, k: usize, value: f64) -> Self {
        let mut structure = self.structure.clone();
        structure.set_antisymmetric(i, j, k, value);
        Self::assemble(
            self.name.clone(),
            structure,
            self.ip.clone(),
            self.labels.clone(),
            self.realization_size,
        )
    }

    /// Nonzero coefficients of `[e_i, e_j]`.
    #[inline]
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, f64)] {
        &self.sparse[i * self.dim() + j]
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..n {
                let yj = y[j];
                if yj == 0.0 {
                    continue;
                }
                let w = xi * yj;
                for &(k, c) in self.bracket_basis(i, j) {
                    out[k] += w * c;
                }
            }
        }
        out
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.ip * y)[(0, 0)]
    }

    pub fn killing_value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.killing * y)[(0, 0)]
    }

    /// Matrix of `ad x` in the current basis (column `m` holds `[x, e_m]`).
    pub fn ad_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut ad = DMatrix::zeros(n, n);
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for m in 0..n {
                for &(k, c) in self.bracket_basis(i, m) {
                    ad[(k, m)] += xi * c;
                }
            }
        }
        ad
    }

    /// `max |Σ_l (C_ijl C_lkm + C_jkl C_lim + C_kil C_ljm)|` over all index tuples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        let mut acc = vec![0.0; n];
        // The Jacobi sum is totally antisymmetric in (i, j, k).
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    acc.iter_mut().for_each(|a| *a = 0.0);
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for &(l, cab) in self.bracket_basis(a, b) {
                            for &(m, clc) in self.bracket_basis(l, c) {
                                acc[m] += cab * clc;
                            }
                        }
                    }
                    for v in &acc {
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
        worst
    }

    /// `max |⟨[e_i, e_j], e_k⟩ + ⟨e_j, [e_i, e_k]⟩|` over basis triples.
    pub fn biinvariance_residual(&self) -> f64 {
        let n = self.dim();
        // D[i][j][k] = ⟨[e_i, e_j], e_k⟩
        let mut d = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for &(l, c) in self.bracket_basis(i, j) {
                    for k in 0..n {
                        d[(i * n + j) * n + k] += c * self.ip[(l, k)];
                    }
                }
            }
        }
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let r = d[(i * n + j) * n + k] + d[(i * n + k) * n + j];
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        self.structure.antisymmetry_residual()
    }

    /// `max |ip + killing|`, zero exactly when the product is the standard one.
    pub fn standard_product_residual(&self) -> f64 {
        (&self.ip + &self.killing).abs().max()
    }

    pub fn is_semisimple(&self) -> bool {
        let eig = self.killing.clone().symmetric_eigenvalues();
        let scale = eig.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        eig.iter().all(|v| v.abs() > 1e-10 * scale)
    }

    /// Indices of basis elements whose realization lives in the rows and
    /// columns listed in `indices`.
    pub fn basis_supported_in(&self, indices: &[usize]) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.support.is_empty() && l.support.iter().all(|s| indices.contains(s)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Coordinate vector `e_i`.
    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[i] = 1.0;
        v
    }
}

/// Re-expresses `g` in a basis orthonormal for its inner product.
///
/// Gram-Schmidt runs over the current basis in order, so a diagonal inner
/// product only rescales basis vectors and keeps the labels meaningful.
pub fn orthonormalize(g: &LieAlgebra) -> Result<LieAlgebra, AlgebraError> {
    check_positive_definite(g.ip())?;
    let n = g.dim();
    let basis: Vec<DVector<f64>> = (0..n).map(|i| g.basis_vector(i)).collect();
    let frame = linalg::gram_schmidt(&basis, g.ip(), 0.0);
    if frame.len() != n {
        return Err(AlgebraError::NotPositiveDefinite);
    }
    let a = DMatrix::from_columns(&frame);
    let structure = g.structure.transform(&a)?;
    Ok(LieAlgebra::assemble(
        g.name.clone(),
        structure,
        DMatrix::identity(n, n),
        g.labels.clone(),
        g.realization_size,
    ))
}

/// Direct sum `a ⊕ b`; brackets between the summands vanish.
pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
    let (na, nb) = (a.dim(), b.dim());
    let n = na + nb;
    let mut structure = StructureTensor::zeros(n);
    for i in 0..na {
        for j in 0..na {
            for &(k, c) in a.bracket_basis(i, j) {
                structure.set(i, j, k, c);
            }
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            for &(k, c) in b.bracket_basis(i, j) {
                structure.set(na + i, na + j, na + k, c);
            }
        }
    }
    let mut ip = DMatrix::zeros(n, n);
    ip.view_mut((0, 0), (na, na)).copy_from(a.ip());
    ip.view_mut((na, na), (nb, nb)).copy_from(b.ip());
    let offset = a.realization_size;
    let mut labels = a.labels.clone();
    labels.extend(b.labels.iter().map(|l| BasisLabel {
        name: l.name.clone(),
        support: l.support.iter().map(|s| s + offset).collect(),
    }));
    LieAlgebra::assemble(
        format!("{}+{}", a.name, b.name),
        structure,
        ip,
        labels,
        a.realization_size + b.realization_size,
    )
}

fn check_positive_definite(ip: &DMatrix<f64>) -> Result<(), AlgebraError> {
    let asym = (ip - ip.transpose()).abs().max();
    if asym > 1e-12 * ip.abs().max().max(1.0) {
        return Err(AlgebraError::NotSymmetric(asym));
    }
    if ip.clone().cholesky().is_none() {
        return Err(AlgebraError::NotPositiveDefinite);
    }
    Ok(())
}

fn sparse_brackets(c: &StructureTensor) -> Vec<Vec<(usize, f64)>> {
    let n = c.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(
                (0..n)
                    .filter_map(|k| {
                        let v = c.get(i, j, k);
                        (v != 0.0).then_some((k, v))
                    })
                    .collect(),
            );
        }
    }
    out
}

// B_ij = tr(ad e_i · ad e_j) = Σ_{k,m} C[i][k][m] · C[j][m][k]
fn killing_form(c: &StructureTensor, sparse: &[Vec<(usize, f64)>]) -> DMatrix<f64> {
    let n = c.dim();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for k in 0..n {
                for &(m, cikm) in &sparse[i * n + k] {
                    acc += cikm * c.get(j, m, k);
                }
            }
            b[(i, j)] = acc;
            b[(j, i)] = acc;
        }
    }
    b
}
