//! Second variation of the scalar curvature functional at an Einstein
//! metric over volume-preserving diagonal variations, and the resulting
//! classification of the critical point.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::{BlockData, VariationVector};
use crate::error::CurvatureError;
use crate::homspace::{EquivalenceReport, TripleTensor};
use crate::linalg;

/// Relative zero tolerance for eigenvalues and singular values of `F`.
pub const ZERO_TOL: f64 = 1e-8;
/// Casimir threshold above which a standard Einstein metric is a local minimum.
pub const CASIMIR_THRESHOLD: f64 = 0.3;
/// Margin above the threshold so that `c = 3/10` up to roundoff does not count.
pub const CASIMIR_GUARD: f64 = 1e-9;

/// Symmetric `q × q` matrix with `uᵀFv = ∂²S/∂t∂s` at the base metric.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix {
    entries: DMatrix<f64>,
    standard: bool,
}

impl FMatrix {
    pub fn from_entries(entries: DMatrix<f64>) -> Self {
        Self {
            entries,
            standard: false,
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn q(&self) -> usize {
        self.entries.nrows()
    }

    /// Built from the simplified formulas valid at standard Einstein metrics.
    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.entries - self.entries.transpose()).abs().max()
    }

    /// `max_i |(F·(1,…,1))_i − r̄ d_i|`
    pub fn fb_residual(&self, d: &[usize], mean_ricci: f64) -> f64 {
        let row_sums = self.entries.column_sum();
        row_sums
            .iter()
            .zip(d)
            .map(|(s, &d)| (s - mean_ricci * d as f64).abs())
            .fold(0.0, f64::max)
    }

    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let u = DVector::from_row_slice(u);
        let v = DVector::from_row_slice(v);
        u.dot(&(&self.entries * v))
    }

    pub fn spectrum(&self) -> Vec<f64> {
        linalg::sorted_eigenvalues(&self.entries)
    }

    /// Largest singular value.
    pub fn norm(&self) -> f64 {
        if self.q() == 0 {
            return 0.0;
        }
        self.entries.clone().singular_values().max()
    }

    fn zero_threshold(&self, tol: f64) -> f64 {
        tol * self.norm().max(1.0)
    }

    /// `Pᵀ F P` for an orthonormal basis `P` of `{u : Σ d_i u_i = 0}`.
    pub fn restricted_matrix(&self, d: &[usize]) -> (DMatrix<f64>, DMatrix<f64>) {
        let w: Vec<f64> = d.iter().map(|&x| x as f64).collect();
        let p = linalg::hyperplane_basis(&w);
        let m = p.transpose() * &self.entries * &p;
        (m, p)
    }
}

/// `f_ii = −b_i d_i/2 − ¼Σ_{j,k}([i;kj] + 2[k;ij]) − ½Σ_j([j;ii] − 2[i;ij])`,
/// `f_ij = ½Σ_k([j;ik] + [i;kj] − [k;ij])`.
pub fn f_matrix(data: &BlockData) -> FMatrix {
    let q = data.q();
    let t = data.tensor();
    let (b, d) = (data.b(), data.d());
    let mut f = DMatrix::zeros(q, q);
    for i in 0..q {
        let mut quarter = 0.0;
        for j in 0..q {
            for k in 0..q {
                quarter += t.get(i, k, j) + 2.0 * t.get(k, i, j);
            }
        }
        let mut half = 0.0;
        for j in 0..q {
            half += t.get(j, i, i) - 2.0 * t.get(i, i, j);
        }
        f[(i, i)] = -b[i] * d[i] as f64 / 2.0 - quarter / 4.0 - half / 2.0;
        for j in 0..q {
            if j == i {
                continue;
            }
            let mut acc = 0.0;
            for k in 0..q {
                acc += t.get(j, i, k) + t.get(i, k, j) - t.get(k, i, j);
            }
            f[(i, j)] = acc / 2.0;
        }
    }
    FMatrix {
        entries: f,
        standard: false,
    }
}

/// Standard-metric form: `f_ii = (6c−1)d_i/4 + ½Σ_j[j;ii]`, `f_ij = ½Σ_k[k;ij]`.
pub fn f_matrix_standard(d: &[usize], t: &TripleTensor, c: f64) -> FMatrix {
    let q = d.len();
    let mut f = DMatrix::zeros(q, q);
    for i in 0..q {
        let mut diag = 0.0;
        for j in 0..q {
            diag += t.get(j, i, i);
        }
        f[(i, i)] = (6.0 * c - 1.0) * d[i] as f64 / 4.0 + diag / 2.0;
        for j in 0..q {
            if j != i {
                let mut acc = 0.0;
                for k in 0..q {
                    acc += t.get(k, i, j);
                }
                f[(i, j)] = acc / 2.0;
            }
        }
    }
    FMatrix {
        entries: f,
        standard: true,
    }
}

/// Eigenvalues of `F` on the volume-preserving hyperplane, ascending.
pub fn restricted_spectrum(f: &FMatrix, d: &[usize]) -> Vec<f64> {
    if f.q() <= 1 {
        return Vec::new();
    }
    linalg::sorted_eigenvalues(&f.restricted_matrix(d).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    LocalMin,
    LocalMax,
    Saddle,
    Degenerate,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::LocalMin => "LocalMin",
            Self::LocalMax => "LocalMax",
            Self::Saddle => "Saddle",
            Self::Degenerate => "Degenerate",
        };
        f.write_str(s)
    }
}

/// Which variations the verdict speaks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scope {
    /// All invariant metrics near the critical point are diagonal in the
    /// decomposition (or a saddle direction has been exhibited).
    FullSpace,
    /// Only variations diagonal in the given decomposition were examined.
    BlockDiagonalOnly,
}

impl std::fmt::Display for Scope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::FullSpace => "FullSpace",
            Self::BlockDiagonalOnly => "BlockDiagonalOnly",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub scope: Scope,
    pub restricted_spectrum: Vec<f64>,
    /// Smallest `|λ|` over the restricted spectrum; absent when `q = 1`.
    pub degeneracy_gap: Option<f64>,
    pub notes: Vec<String>,
}

fn signs(spectrum: &[f64], zero: f64) -> (bool, bool) {
    (spectrum.iter().any(|&l| l > zero), spectrum.iter().any(|&l| l < -zero))
}

fn kind_from_spectrum(spectrum: &[f64], zero: f64) -> VerdictKind {
    let (pos, neg) = signs(spectrum, zero);
    let null = spectrum.iter().any(|&l| l.abs() <= zero);
    match (pos, neg, null) {
        (true, true, _) => VerdictKind::Saddle,
        (_, _, true) => VerdictKind::Degenerate,
        (false, true, false) => VerdictKind::LocalMax,
        _ => VerdictKind::LocalMin,
    }
}

/// Sign pattern of the restricted spectrum, with a block-diagonal scope.
pub fn classify(f: &FMatrix, d: &[usize], tol: f64) -> Verdict {
    classify_with_scope(f, d, tol, None)
}

/// As [`classify`]; the scope is `FullSpace` for saddles and when the
/// equivalence data shows that every invariant metric is diagonal.
pub fn classify_with_scope(f: &FMatrix, d: &[usize], tol: f64, equivalence: Option<&EquivalenceReport>) -> Verdict {
    let spectrum = restricted_spectrum(f, d);
    let zero = f.zero_threshold(tol);
    let kind = kind_from_spectrum(&spectrum, zero);
    let mut notes = Vec::new();
    if spectrum.is_empty() {
        notes.push("single block: no volume-preserving diagonal variation".to_string());
    }
    let scope = match (kind, equivalence) {
        (VerdictKind::Saddle, _) => Scope::FullSpace,
        (_, Some(eq)) if eq.diagonal_suffices => Scope::FullSpace,
        (_, Some(eq)) => {
            notes.push(format!(
                "invariant symmetric operators on p form a space of dimension {} > {} blocks; non-diagonal variations not examined",
                eq.invariant_symmetric_dimension,
                d.len()
            ));
            Scope::BlockDiagonalOnly
        }
        (_, None) => Scope::BlockDiagonalOnly,
    };
    Verdict {
        kind,
        scope,
        degeneracy_gap: spectrum.iter().map(|l| l.abs()).reduce(f64::min),
        restricted_spectrum: spectrum,
        notes,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Degeneracy {
    pub degenerate: bool,
    pub min_singular_value: f64,
    pub norm: f64,
    /// Trace-zero `u` with `Fu = μd`.
    pub witness: Option<Vec<f64>>,
    pub mu: Option<f64>,
    /// `|Fu − μd|` for the witness.
    pub witness_residual: Option<f64>,
}

/// Singularity test for `F`. A kernel vector `p` yields the trace-zero
/// combination `(d·p)(1,…,1) − (Σd) p`, which `F` maps into the line of
/// `d` whenever `F(1,…,1) ∥ d`.
pub fn degeneracy_test(f: &FMatrix, d: &[usize], tol: f64) -> Degeneracy {
    let q = f.q();
    let svd = f.entries().clone().svd(false, true);
    let sv = &svd.singular_values;
    let norm = sv.max();
    let (min_idx, min_sv) = sv.argmin();
    let degenerate = min_sv <= tol * norm;
    if !degenerate {
        return Degeneracy {
            degenerate,
            min_singular_value: min_sv,
            norm,
            witness: None,
            mu: None,
            witness_residual: None,
        };
    }
    let vt = svd.v_t.expect("requested right singular vectors");
    let dv = DVector::from_iterator(q, d.iter().map(|&x| x as f64));
    let total = dv.sum();
    let ones = DVector::from_element(q, 1.0);
    let threshold = tol * norm;
    let mut best: Option<DVector<f64>> = None;
    let mut candidates: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= threshold).collect();
    candidates.sort_by_key(|&i| i != min_idx);
    for i in candidates {
        let p = vt.row(i).transpose();
        let u = &ones * dv.dot(&p) - &p * total;
        if best.as_ref().is_none_or(|b| u.norm() > b.norm()) {
            best = Some(u);
        }
    }
    match best.filter(|u| u.norm() > 1e-12 * total) {
        Some(u) => {
            let u = &u / u.norm();
            let fu = f.entries() * &u;
            let mu = dv.dot(&fu) / dv.dot(&dv);
            let residual = (&fu - &dv * mu).norm();
            Degeneracy {
                degenerate,
                min_singular_value: min_sv,
                norm,
                witness: Some(u.iter().copied().collect()),
                mu: Some(mu),
                witness_residual: Some(residual),
            }
        }
        None => Degeneracy {
            degenerate,
            min_singular_value: min_sv,
            norm,
            witness: None,
            mu: None,
            witness_residual: None,
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CasimirCriterion {
    pub casimir: f64,
    pub applies: bool,
    /// `min_i (f_ii − Σ_{j≠i} |f_ij|)`
    pub margin: f64,
    pub full_spectrum_positive: bool,
    pub local_min: bool,
}

/// Sufficient condition `c > 3/10` for a local minimum, with the diagonal
/// dominance margin that underlies it and a direct eigenvalue check.
pub fn casimir_sufficient_local_min(c: f64, f: &FMatrix, d: &[usize], tol: f64) -> CasimirCriterion {
    let q = f.q();
    let m = f.entries();
    let margin = (0..q)
        .map(|i| m[(i, i)] - (0..q).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let zero = f.zero_threshold(tol);
    CasimirCriterion {
        casimir: c,
        applies: c > CASIMIR_THRESHOLD + CASIMIR_GUARD,
        margin,
        full_spectrum_positive: f.spectrum().iter().all(|&l| l > zero),
        local_min: classify(f, d, tol).kind == VerdictKind::LocalMin,
    }
}

/// `T = (d₁+d₂)(d₁d₂ − 2(d₁+d₂)a)` for a subgroup 2-block split with
/// `a = [1; 22]`; its sign is that of the second variation along the
/// volume-preserving family.
pub fn two_block_t(d1: usize, d2: usize, a: f64) -> f64 {
    let (d1, d2) = (d1 as f64, d2 as f64);
    (d1 + d2) * (d1 * d2 - 2.0 * (d1 + d2) * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenValues {
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
}

/// Scalar curvature along the three-block deformation of the bi-invariant
/// metric on `SU(n)` and its first two derivatives.
pub fn jensen_curve(n: usize, t: f64) -> Result<JensenValues, CurvatureError> {
    if n < 3 {
        return Err(CurvatureError::InvalidParameter {
            name: "n",
            min: 3,
            got: n,
        });
    }
    let nf = n as f64;
    let alpha = 2.0 * (nf - 1.0) / (nf - 2.0);
    let beta = nf / (nf - 2.0);
    let h = (nf - 1.0) * (nf - 2.0) / 4.0 * (2.0 * t / (nf - 2.0)).exp() + (nf - 1.0) * (-t).exp()
        - 0.25
        - (nf - 2.0) / 4.0 * (-alpha * t).exp();
    let g = (beta * t).exp_m1();
    let pref = (nf - 1.0) / 2.0 * (-alpha * t).exp();
    Ok(JensenValues {
        h,
        dh: pref * g * g,
        d2h: pref * (-alpha * g * g + 2.0 * g * beta * (beta * t).exp()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessVerdict {
    pub label: String,
    pub dims: Vec<usize>,
    pub restricted_spectrum: Vec<f64>,
    pub kind: VerdictKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct NullDirectionTest {
    pub null_dimension: usize,
    /// Largest `|∂³S/∂t³|` over the probed null directions.
    pub max_third_derivative: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Assessment {
    pub verdict: Verdict,
    pub primary: Verdict,
    pub witnesses: Vec<WitnessVerdict>,
    pub null_direction_test: Option<NullDirectionTest>,
}

/// Classifies the critical point from the primary decomposition together
/// with any further decompositions of the same space.
///
/// Opposite signs found across decompositions give a saddle. When the
/// primary restricted form is only semidefinite, the cubic term along its
/// null directions is examined: a nonzero cubic means the functional
/// changes sign along that curve, so the point is again a saddle.
pub fn assess(
    primary: &BlockData,
    f: &FMatrix,
    witnesses: &[(String, BlockData)],
    tol: f64,
    equivalence: Option<&EquivalenceReport>,
) -> Result<Assessment, CurvatureError> {
    let d = primary.d();
    let primary_verdict = classify_with_scope(f, d, tol, equivalence);
    let mut verdict = primary_verdict.clone();

    let witness_verdicts: Vec<WitnessVerdict> = witnesses
        .iter()
        .map(|(label, data)| {
            let fw = f_matrix(data);
            let v = classify(&fw, data.d(), tol);
            WitnessVerdict {
                label: label.clone(),
                dims: data.d().to_vec(),
                restricted_spectrum: v.restricted_spectrum,
                kind: v.kind,
            }
        })
        .collect();

    if verdict.kind != VerdictKind::Saddle {
        let (mut pos, mut neg) = signs(&verdict.restricted_spectrum, f.zero_threshold(tol));
        let mut sources = Vec::new();
        for (w, (_, data)) in witness_verdicts.iter().zip(witnesses) {
            let (p, n) = signs(&w.restricted_spectrum, f_matrix(data).zero_threshold(tol));
            if (p && !pos) || (n && !neg) {
                sources.push(w.label.clone());
            }
            pos |= p;
            neg |= n;
        }
        if pos && neg {
            verdict.kind = VerdictKind::Saddle;
            verdict.scope = Scope::FullSpace;
            verdict.notes.push(format!("opposite-sign directions from: {}", sources.join(", ")));
        }
    }

    let mut null_test = None;
    if primary_verdict.kind == VerdictKind::Degenerate {
        let test = null_direction_cubic(primary, f, tol)?;
        if verdict.kind == VerdictKind::Degenerate && test.max_third_derivative > test.threshold {
            verdict.kind = VerdictKind::Saddle;
            verdict.scope = Scope::FullSpace;
            verdict
                .notes
                .push("nonzero third variation along a null direction of the second variation".to_string());
        }
        null_test = Some(test);
    }

    Ok(Assessment {
        verdict,
        primary: primary_verdict,
        witnesses: witness_verdicts,
        null_direction_test: null_test,
    })
}

/// Third derivative of `S` along unit combinations of null directions of
/// the restricted second variation: single vectors, pairwise sums and
/// differences, and triple sums (enough to detect a nonzero cubic form).
pub fn null_direction_cubic(data: &BlockData, f: &FMatrix, tol: f64) -> Result<NullDirectionTest, CurvatureError> {
    let d = data.d();
    let zero = f.zero_threshold(tol);
    let threshold = 1e-7 * f.norm().max(1.0);
    if f.q() <= 1 {
        return Ok(NullDirectionTest {
            null_dimension: 0,
            max_third_derivative: 0.0,
            threshold,
        });
    }
    let (m, p) = f.restricted_matrix(d);
    let (vals, vecs) = linalg::sorted_eigen(&m);
    let null: Vec<DVector<f64>> = vals
        .iter()
        .enumerate()
        .filter(|(_, l)| l.abs() <= zero)
        .map(|(i, _)| &p * vecs.column(i))
        .collect();
    let mut probes: Vec<DVector<f64>> = Vec::new();
    for a in 0..null.len() {
        probes.push(null[a].clone());
        for b in (a + 1)..null.len() {
            probes.push(&null[a] + &null[b]);
            probes.push(&null[a] - &null[b]);
            for c in (b + 1)..null.len() {
                probes.push(&null[a] + &null[b] + &null[c]);
            }
        }
    }
    let zeros = VariationVector::zeros(f.q());
    let mut worst = 0.0_f64;
    for probe in probes {
        let u = VariationVector::new((&probe / probe.norm()).iter().copied().collect());
        worst = worst.max(data.d3_scalar_ttt(&u, &zeros, 0.0, 0.0)?.abs());
    }
    Ok(NullDirectionTest {
        null_dimension: null.len(),
        max_third_derivative: worst,
        threshold,
    })
}
