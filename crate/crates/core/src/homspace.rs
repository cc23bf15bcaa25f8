//! Reductive pairs `g = h ⊕ p`, block decompositions of `p`, and the
//! triple-bracket tensor `[k; ij]` that feeds every curvature formula.
//!
//! Vectors are coordinate columns in the basis of the ambient algebra and
//! every frame here is orthonormal for the algebra's inner product `⟨·,·⟩`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::error::HomSpaceError;
use crate::linalg::{self, gram_schmidt};

/// Bracket-closure and invariance tolerance.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Orthogonality tolerance for user-supplied frames.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;
/// Killing-form proportionality tolerance on a block.
pub const KILLING_TOL: f64 = 1e-9;
/// Singular values at or below this count as zero in equivariance systems.
pub const RANK_TOL: f64 = 1e-8;

const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HomSpace {
    g: LieAlgebra,
    h_basis: Vec<DVector<f64>>,
    p_basis: Vec<DVector<f64>>,
    closure_residual: f64,
    invariance_residual: f64,
    ineffective_dim: usize,
}

/// Builds `G/H` from `g` and vectors spanning `h`.
///
/// `p` is the `⟨·,·⟩`-orthogonal complement; it is built by projecting the
/// coordinate vectors, so when `h` is spanned by basis vectors and the inner
/// product is diagonal, `p` is spanned by the remaining basis vectors.
pub fn make_homspace(g: LieAlgebra, h_span: &[DVector<f64>]) -> Result<HomSpace, HomSpaceError> {
    let n = g.dim();
    for v in h_span {
        if v.len() != n {
            return Err(HomSpaceError::WrongLength {
                expected: n,
                found: v.len(),
            });
        }
    }
    let h_basis = gram_schmidt(h_span, g.ip(), DEPENDENCE_TOL);
    if h_basis.len() == n {
        return Err(HomSpaceError::SubalgebraIsWhole);
    }
    let closure_residual = leak_residual(&g, &h_basis, &h_basis, &h_basis);
    if closure_residual > STRUCTURE_TOL {
        return Err(HomSpaceError::NotSubalgebra {
            residual: closure_residual,
        });
    }

    let mut candidates = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = g.basis_vector(i);
        for q in &h_basis {
            let c = g.inner(&v, q);
            if c != 0.0 {
                v.axpy(-c, q, 1.0);
            }
        }
        candidates.push(v);
    }
    let p_basis = gram_schmidt(&candidates, g.ip(), DEPENDENCE_TOL);
    debug_assert_eq!(p_basis.len() + h_basis.len(), n);

    let invariance_residual = leak_residual(&g, &h_basis, &p_basis, &p_basis);
    if invariance_residual > STRUCTURE_TOL {
        return Err(HomSpaceError::ComplementNotInvariant {
            residual: invariance_residual,
        });
    }
    let ineffective_dim = ineffective_dimension(&g, &h_basis, &p_basis);
    Ok(HomSpace {
        g,
        h_basis,
        p_basis,
        closure_residual,
        invariance_residual,
        ineffective_dim,
    })
}

impl HomSpace {
    /// The group itself as `G/{e}`.
    pub fn group(g: LieAlgebra) -> Self {
        make_homspace(g, &[]).expect("trivial subalgebra is always valid")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.g
    }

    pub fn h_basis(&self) -> &[DVector<f64>] {
        &self.h_basis
    }

    pub fn p_basis(&self) -> &[DVector<f64>] {
        &self.p_basis
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.len()
    }

    pub fn dim_p(&self) -> usize {
        self.p_basis.len()
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }

    pub fn invariance_residual(&self) -> f64 {
        self.invariance_residual
    }

    /// Dimension of the part of `h` acting trivially on `p`. Such vectors
    /// span an ideal of `g` inside `h`; zero means almost effective.
    pub fn ineffective_dimension(&self) -> usize {
        self.ineffective_dim
    }

    /// `p`-component of `x`.
    pub fn project_p(&self, x: &DVector<f64>) -> DVector<f64> {
        project(&self.g, &self.p_basis, x)
    }

    /// Matrix of `ad y` restricted to the span of `frame`, in that frame.
    pub fn restricted_action(&self, y: &DVector<f64>, frame: &[DVector<f64>]) -> DMatrix<f64> {
        let d = frame.len();
        let mut rho = DMatrix::zeros(d, d);
        for (b, fb) in frame.iter().enumerate() {
            let w = self.g.bracket(y, fb);
            for (a, fa) in frame.iter().enumerate() {
                rho[(a, b)] = self.g.inner(&w, fa);
            }
        }
        rho
    }
}

fn project(g: &LieAlgebra, frame: &[DVector<f64>], x: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(x.len());
    for f in frame {
        let c = g.inner(x, f);
        if c != 0.0 {
            out.axpy(c, f, 1.0);
        }
    }
    out
}

/// Largest norm of the part of `[x, y]` (x ∈ `left`, y ∈ `right`) that lies
/// outside the span of the orthonormal `target`.
fn leak_residual(g: &LieAlgebra, left: &[DVector<f64>], right: &[DVector<f64>], target: &[DVector<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for x in left {
        for y in right {
            let w = g.bracket(x, y);
            let rest = &w - project(g, target, &w);
            worst = worst.max(g.inner(&rest, &rest).max(0.0).sqrt());
        }
    }
    worst
}

fn ineffective_dimension(g: &LieAlgebra, h_basis: &[DVector<f64>], p_basis: &[DVector<f64>]) -> usize {
    if h_basis.is_empty() || p_basis.is_empty() {
        return h_basis.len();
    }
    // Columns: coefficients of x ∈ h; rows: coordinates of [x, p_b] in p.
    let dp = p_basis.len();
    let mut m = DMatrix::zeros(dp * dp, h_basis.len());
    for (c, x) in h_basis.iter().enumerate() {
        for (b, pb) in p_basis.iter().enumerate() {
            let w = g.bracket(x, pb);
            for (a, pa) in p_basis.iter().enumerate() {
                m[(b * dp + a, c)] = g.inner(&w, pa);
            }
        }
    }
    linalg::kernel_dimension(&m, RANK_TOL)
}

/// Ordered list of mutually orthogonal blocks `p_1, …, p_q` of `p`, each
/// carried as an orthonormal frame.
#[derive(Debug, Clone)]
pub struct Decomposition {
    blocks: Vec<Vec<DVector<f64>>>,
}

impl Decomposition {
    /// Orthonormalizes each block's spanning vectors (blocks are not
    /// orthogonalized against each other; see [`validate_decomposition`]).
    pub fn from_spans(hs: &HomSpace, spans: Vec<Vec<DVector<f64>>>) -> Result<Self, HomSpaceError> {
        let n = hs.algebra().dim();
        let mut blocks = Vec::with_capacity(spans.len());
        for (idx, span) in spans.into_iter().enumerate() {
            if span.is_empty() {
                return Err(HomSpaceError::EmptyBlock { block: idx });
            }
            if let Some(v) = span.iter().find(|v| v.len() != n) {
                return Err(HomSpaceError::WrongLength {
                    expected: n,
                    found: v.len(),
                });
            }
            let frame = gram_schmidt(&span, hs.algebra().ip(), DEPENDENCE_TOL);
            if frame.len() != span.len() {
                return Err(HomSpaceError::DependentBlock { block: idx });
            }
            blocks.push(frame);
        }
        Ok(Self { blocks })
    }

    /// Blocks spanned by basis vectors of the ambient algebra.
    pub fn from_basis_indices(hs: &HomSpace, indices: &[Vec<usize>]) -> Result<Self, HomSpaceError> {
        let g = hs.algebra();
        let mut spans = Vec::with_capacity(indices.len());
        for block in indices {
            let mut span = Vec::with_capacity(block.len());
            for &i in block {
                if i >= g.dim() {
                    return Err(HomSpaceError::IndexOutOfRange { index: i });
                }
                span.push(g.basis_vector(i));
            }
            spans.push(span);
        }
        Self::from_spans(hs, spans)
    }

    /// One block per vector of the complement basis.
    pub fn singletons(hs: &HomSpace) -> Self {
        Self {
            blocks: hs.p_basis().iter().map(|v| vec![v.clone()]).collect(),
        }
    }

    /// The whole complement as a single block.
    pub fn whole(hs: &HomSpace) -> Self {
        Self {
            blocks: vec![hs.p_basis().to_vec()],
        }
    }

    pub fn q(&self) -> usize {
        self.blocks.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn block(&self, i: usize) -> &[DVector<f64>] {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Vec<DVector<f64>>] {
        &self.blocks
    }

    /// Replaces the frame of block `i` by `frame · rotation`.
    pub fn rotate_block(&mut self, i: usize, rotation: &DMatrix<f64>) {
        let old = &self.blocks[i];
        let d = old.len();
        assert_eq!(rotation.nrows(), d);
        let rotated = (0..d)
            .map(|c| {
                let mut v = DVector::zeros(old[0].len());
                for (r, f) in old.iter().enumerate() {
                    v.axpy(rotation[(r, c)], f, 1.0);
                }
                v
            })
            .collect();
        self.blocks[i] = rotated;
    }

    /// Merges the listed groups of blocks; `groups` must partition `0..q`.
    pub fn coarsen(&self, groups: &[Vec<usize>]) -> Self {
        Self {
            blocks: groups
                .iter()
                .map(|g| g.iter().flat_map(|&i| self.blocks[i].iter().cloned()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub dims: Vec<usize>,
    /// Largest deviation of the block frames from orthonormality, within and across blocks.
    pub orthogonality_residual: f64,
    /// Largest inner product between a block vector and `h`.
    pub complement_residual: f64,
    /// Per block, largest part of `[h, p_i]` outside `p_i`.
    pub invariance_residuals: Vec<f64>,
}

impl DecompositionReport {
    pub fn max_invariance_residual(&self) -> f64 {
        self.invariance_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.orthogonality_residual <= tol && self.complement_residual <= tol && self.max_invariance_residual() <= tol
    }

    /// First invariance failure as an error, if any.
    pub fn require_invariant(&self, tol: f64) -> Result<(), HomSpaceError> {
        match self
            .invariance_residuals
            .iter()
            .enumerate()
            .find(|(_, r)| **r > tol)
        {
            Some((block, &residual)) => Err(HomSpaceError::BlockNotInvariant { block, residual }),
            None => Ok(()),
        }
    }
}

/// Checks that the blocks partition `p` into orthogonal pieces and reports
/// how far each block is from being `ad(h)`-invariant.
pub fn validate_decomposition(hs: &HomSpace, dec: &Decomposition) -> Result<DecompositionReport, HomSpaceError> {
    let g = hs.algebra();
    let dims = dec.dims();
    let total: usize = dims.iter().sum();

    let mut complement_residual = 0.0_f64;
    for (block, frame) in dec.blocks().iter().enumerate() {
        let worst = frame
            .iter()
            .flat_map(|f| hs.h_basis().iter().map(move |h| g.inner(f, h).abs()))
            .fold(0.0, f64::max);
        if worst > ORTHOGONALITY_TOL {
            return Err(HomSpaceError::BlockNotInComplement { block, residual: worst });
        }
        complement_residual = complement_residual.max(worst);
    }

    let all: Vec<(usize, &DVector<f64>)> = dec
        .blocks()
        .iter()
        .enumerate()
        .flat_map(|(b, frame)| frame.iter().map(move |f| (b, f)))
        .collect();
    let mut within = 0.0_f64;
    let mut across = 0.0_f64;
    for (a, (ba, fa)) in all.iter().enumerate() {
        for (bb, fb) in all.iter().skip(a) {
            let v = g.inner(fa, fb);
            if std::ptr::eq(*fa, *fb) {
                within = within.max((v - 1.0).abs());
            } else if ba == bb {
                within = within.max(v.abs());
            } else {
                across = across.max(v.abs());
            }
        }
    }
    if across > ORTHOGONALITY_TOL {
        return Err(HomSpaceError::OverlappingBlocks { residual: across });
    }
    if total != hs.dim_p() {
        return Err(HomSpaceError::IncompleteBlocks {
            expected: hs.dim_p(),
            found: total,
        });
    }

    let invariance_residuals = dec
        .blocks()
        .iter()
        .map(|frame| leak_residual(g, hs.h_basis(), frame, frame))
        .collect();
    Ok(DecompositionReport {
        dims,
        orthogonality_residual: within.max(across),
        complement_residual,
        invariance_residuals,
    })
}

/// `q × q × q` array of `[k; ij] = Σ ⟨[e_α^i, e_β^j]_p, e_γ^k⟩²`, stored
/// with the upper index first.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleTensor {
    q: usize,
    data: Vec<f64>,
}

impl TripleTensor {
    pub fn zeros(q: usize) -> Self {
        Self {
            q,
            data: vec![0.0; q * q * q],
        }
    }

    pub fn from_fn(q: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(q);
        for k in 0..q {
            for i in 0..q {
                for j in 0..q {
                    t.set(k, i, j, f(k, i, j));
                }
            }
        }
        t
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `[k; ij]`
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.q + i) * self.q + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let q = self.q;
        self.data[(k * q + i) * q + j] = v;
    }

    fn add(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let q = self.q;
        self.data[(k * q + i) * q + j] += v;
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// `Σ_{j,k} [k; ij]`
    pub fn row_sum(&self, i: usize) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.q {
            for j in 0..self.q {
                acc += self.get(k, i, j);
            }
        }
        acc
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lower_symmetry_residual(&self) -> f64 {
        let q = self.q;
        let mut worst = 0.0_f64;
        for k in 0..q {
            for i in 0..q {
                for j in 0..q {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    /// Largest change under any permutation of the three indices.
    pub fn full_symmetry_residual(&self) -> f64 {
        let q = self.q;
        let mut worst = 0.0_f64;
        for k in 0..q {
            for i in 0..q {
                for j in 0..q {
                    let v = self.get(k, i, j);
                    for w in [
                        self.get(k, j, i),
                        self.get(i, k, j),
                        self.get(i, j, k),
                        self.get(j, i, k),
                        self.get(j, k, i),
                    ] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    /// Tensor of the metric `x_i · ⟨·,·⟩` on `p_i`: unit vectors shrink by
    /// `x^{-1/2}`, so each entry picks up `x_k / (x_i x_j)`.
    pub fn rescaled(&self, x: &[f64]) -> Self {
        assert_eq!(x.len(), self.q);
        Self::from_fn(self.q, |k, i, j| self.get(k, i, j) * x[k] / (x[i] * x[j]))
    }
}

pub fn triple_tensor(hs: &HomSpace, dec: &Decomposition) -> TripleTensor {
    let g = hs.algebra();
    let owners: Vec<usize> = dec
        .blocks()
        .iter()
        .enumerate()
        .flat_map(|(b, f)| std::iter::repeat_n(b, f.len()))
        .collect();
    let frame: Vec<&DVector<f64>> = dec.blocks().iter().flatten().collect();
    let total = frame.len();
    // Dual covectors ⟨·, f_γ⟩ as rows.
    let duals = DMatrix::from_fn(total, g.dim(), |gamma, c| (g.ip() * frame[gamma])[c]);
    let mut t = TripleTensor::zeros(dec.q());
    for a in 0..total {
        for b in (a + 1)..total {
            let w = g.bracket(frame[a], frame[b]);
            if w.iter().all(|v| *v == 0.0) {
                continue;
            }
            let coeffs = &duals * &w;
            let (ba, bb) = (owners[a], owners[b]);
            for (gamma, c) in coeffs.iter().enumerate() {
                let v = c * c;
                if v == 0.0 {
                    continue;
                }
                let k = owners[gamma];
                // Ordered pairs (α, β) and (β, α) give the same square.
                t.add(k, ba, bb, v);
                t.add(k, bb, ba, v);
            }
        }
    }
    t
}

/// `b_i = B(v, v)` for a unit vector `v ∈ p_i`, with the default tolerance.
pub fn killing_values(hs: &HomSpace, dec: &Decomposition) -> Result<Vec<f64>, HomSpaceError> {
    killing_values_with_tol(hs, dec, KILLING_TOL)
}

pub fn killing_values_with_tol(hs: &HomSpace, dec: &Decomposition, tol: f64) -> Result<Vec<f64>, HomSpaceError> {
    let g = hs.algebra();
    dec.blocks()
        .iter()
        .enumerate()
        .map(|(block, frame)| {
            let d = frame.len();
            let m = DMatrix::from_fn(d, d, |a, b| g.killing_value(&frame[a], &frame[b]));
            let b = m.trace() / d as f64;
            let residual = (m - DMatrix::identity(d, d) * b).abs().max();
            if residual > tol {
                Err(HomSpaceError::KillingNotScalar { block, residual })
            } else {
                Ok(b)
            }
        })
        .collect()
}

fn block_actions(hs: &HomSpace, frame: &[DVector<f64>]) -> Vec<DMatrix<f64>> {
    hs.h_basis().iter().map(|y| hs.restricted_action(y, frame)).collect()
}

fn check_block(dec: &Decomposition, i: usize) -> Result<(), HomSpaceError> {
    if i >= dec.q() {
        return Err(HomSpaceError::BlockIndexOutOfRange { index: i, count: dec.q() });
    }
    Ok(())
}

/// Dimension of the linear maps `p_i → p_j` commuting with every `ad(y)`,
/// `y ∈ h`.
pub fn hom_dimension(hs: &HomSpace, dec: &Decomposition, i: usize, j: usize) -> Result<usize, HomSpaceError> {
    hom_dimension_with_tol(hs, dec, i, j, RANK_TOL)
}

pub fn hom_dimension_with_tol(
    hs: &HomSpace,
    dec: &Decomposition,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<usize, HomSpaceError> {
    check_block(dec, i)?;
    check_block(dec, j)?;
    let (di, dj) = (dec.block(i).len(), dec.block(j).len());
    if hs.dim_h() == 0 {
        return Ok(di * dj);
    }
    let rho_i = block_actions(hs, dec.block(i));
    let rho_j = block_actions(hs, dec.block(j));
    Ok(hom_from_actions(&rho_i, &rho_j, tol))
}

fn hom_from_actions(rho_i: &[DMatrix<f64>], rho_j: &[DMatrix<f64>], tol: f64) -> usize {
    let (di, dj) = (rho_i[0].nrows(), rho_j[0].nrows());
    // Unknown A is dj×di, vectorized column-major: A[(r, c)] ↦ c·dj + r.
    // Constraint (A ρ_i − ρ_j A)[(r, s)] = 0 for each y.
    let unknowns = di * dj;
    let constraint = |ri: &DMatrix<f64>, rj: &DMatrix<f64>| {
        let mut m = DMatrix::zeros(unknowns, unknowns);
        for s in 0..di {
            for r in 0..dj {
                let row = s * dj + r;
                // Σ_c A[r, c] ρ_i[c, s]
                for c in 0..di {
                    m[(row, c * dj + r)] += ri[(c, s)];
                }
                // −Σ_m ρ_j[r, m] A[m, s]
                for m_ in 0..dj {
                    m[(row, s * dj + m_)] -= rj[(r, m_)];
                }
            }
        }
        m
    };
    let (gi, gj) = (generic_combination(rho_i), generic_combination(rho_j));
    let constraints = std::iter::once(constraint(&gi, &gj)).chain(rho_i.iter().zip(rho_j).map(|(ri, rj)| constraint(ri, rj)));
    linalg::common_kernel_dimension(constraints, unknowns, tol)
}

/// Fixed combination of the generators with irrational-looking weights,
/// applied first so that the kernel shrinks early.
fn generic_combination(rho: &[DMatrix<f64>]) -> DMatrix<f64> {
    let (r, c) = rho[0].shape();
    rho.iter().enumerate().fold(DMatrix::zeros(r, c), |acc, (y, m)| {
        acc + m * (0.5 + ((y as f64 + 1.0) * 0.754_877_666_246_692_7).fract())
    })
}

/// Dimension of the symmetric operators on `p_i` commuting with `ad(h)`;
/// equal to one exactly when every invariant quadratic form on `p_i` is a
/// multiple of `⟨·,·⟩`.
pub fn symmetric_commutant_dimension(hs: &HomSpace, dec: &Decomposition, i: usize) -> Result<usize, HomSpaceError> {
    check_block(dec, i)?;
    let d = dec.block(i).len();
    if hs.dim_h() == 0 {
        return Ok(d * (d + 1) / 2);
    }
    Ok(symmetric_from_actions(&block_actions(hs, dec.block(i))))
}

fn symmetric_from_actions(rho: &[DMatrix<f64>]) -> usize {
    let d = rho[0].nrows();
    let params: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let constraint = |r: &DMatrix<f64>| {
        let mut m = DMatrix::zeros(d * d, params.len());
        for (col, &(a, b)) in params.iter().enumerate() {
            let mut s = DMatrix::zeros(d, d);
            s[(a, b)] = 1.0;
            s[(b, a)] = 1.0;
            let comm = &s * r - r * &s;
            for (idx, v) in comm.iter().enumerate() {
                m[(idx, col)] = *v;
            }
        }
        m
    };
    let constraints = std::iter::once(constraint(&generic_combination(rho))).chain(rho.iter().map(constraint));
    linalg::common_kernel_dimension(constraints, params.len(), RANK_TOL)
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    /// `hom[i][j]` for `i ≠ j`; the diagonal holds the full commutant dimension.
    pub hom: Vec<Vec<usize>>,
    pub symmetric: Vec<usize>,
    /// Dimension of all `ad(h)`-equivariant symmetric operators on `p`.
    pub invariant_symmetric_dimension: usize,
    /// Every invariant metric is diagonal in this decomposition.
    pub diagonal_suffices: bool,
}

pub fn module_equivalence(hs: &HomSpace, dec: &Decomposition) -> Result<EquivalenceReport, HomSpaceError> {
    let q = dec.q();
    let mut hom = vec![vec![0; q]; q];
    let symmetric: Vec<usize>;
    if hs.dim_h() == 0 {
        let d = dec.dims();
        for i in 0..q {
            for j in 0..q {
                hom[i][j] = d[i] * d[j];
            }
        }
        symmetric = d.iter().map(|d| d * (d + 1) / 2).collect();
    } else {
        let actions: Vec<_> = dec.blocks().iter().map(|b| block_actions(hs, b)).collect();
        for i in 0..q {
            for j in i..q {
                let v = hom_from_actions(&actions[i], &actions[j], RANK_TOL);
                hom[i][j] = v;
                hom[j][i] = v;
            }
        }
        symmetric = actions.iter().map(|a| symmetric_from_actions(a)).collect();
    }
    let off: usize = (0..q).flat_map(|i| ((i + 1)..q).map(move |j| (i, j))).map(|(i, j)| hom[i][j]).sum();
    let invariant_symmetric_dimension = symmetric.iter().sum::<usize>() + off;
    Ok(EquivalenceReport {
        hom,
        symmetric,
        invariant_symmetric_dimension,
        diagonal_suffices: invariant_symmetric_dimension == q,
    })
}

/// Splits the span of `frame` into eigenspaces of the symmetric part of
/// `operator` (given in ambient coordinates). Eigenvalues closer than
/// `gap` share a block. An operator commuting with `ad(h)` yields
/// invariant pieces.
pub fn refine_block(
    hs: &HomSpace,
    frame: &[DVector<f64>],
    operator: &DMatrix<f64>,
    gap: f64,
) -> Vec<Vec<DVector<f64>>> {
    let g = hs.algebra();
    let d = frame.len();
    let m = DMatrix::from_fn(d, d, |a, b| g.inner(&frame[a], &(operator * &frame[b])));
    let (vals, vecs) = linalg::sorted_eigen(&m);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (idx, v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(last) if (v - vals[*last.last().unwrap()]).abs() <= gap => last.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    groups
        .into_iter()
        .map(|cols| {
            cols.into_iter()
                .map(|c| {
                    let mut v = DVector::zeros(g.dim());
                    for (r, f) in frame.iter().enumerate() {
                        v.axpy(vecs[(r, c)], f, 1.0);
                    }
                    v
                })
                .collect()
        })
        .collect()
}
