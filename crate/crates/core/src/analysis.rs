//! End-to-end pipelines behind the command-line tool: full analysis of a
//! space, curve scans and the invariant/oracle verification suite.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{build_so, build_sp, build_su, build_torus, direct_sum, LieAlgebra, StructureTensor};
use crate::catalog::{self, Expected, Instance, Params, Preset, Witness};
use crate::criticality::{
    assess, casimir_sufficient_local_min, degeneracy_test, f_matrix, f_matrix_standard, two_block_t, CasimirCriterion,
    Degeneracy, NullDirectionTest, Verdict, WitnessVerdict, ZERO_TOL,
};
use crate::curvature::{casimir_identity_residual, BlockData, CurvatureData, MetricPoint, VariationVector, EINSTEIN_TOL};
use crate::error::{AlgebraError, AnalysisError, HomSpaceError};
use crate::homspace::{make_homspace, module_equivalence, validate_decomposition, Decomposition, HomSpace, STRUCTURE_TOL};
use crate::oracle::{fd_derivative, fd_mixed, scalar_at_log_scales, OracleReport, DEFAULT_STEP};
use crate::spacefile::{AlgebraSpec, InnerProductSpec, SpaceDescription};

/// A space ready for analysis: catalog instance or parsed description.
#[derive(Debug, Clone)]
pub struct Space {
    pub id: String,
    pub label: String,
    pub params: Option<Params>,
    pub space: HomSpace,
    pub decomposition: Decomposition,
    pub scales: Option<Vec<f64>>,
    pub witnesses: Vec<Witness>,
    pub presets: Vec<Preset>,
    pub expected: Option<Expected>,
}

impl From<Instance> for Space {
    fn from(inst: Instance) -> Self {
        Self {
            id: inst.id,
            label: inst.label,
            params: Some(inst.params),
            space: inst.space,
            decomposition: inst.decomposition,
            scales: None,
            witnesses: inst.witnesses,
            presets: inst.presets,
            expected: Some(inst.expected),
        }
    }
}

impl Space {
    pub fn from_catalog(id: &str, params: &Params) -> Result<Self, AnalysisError> {
        Ok(catalog::instantiate(id, params)?.into())
    }

    pub fn from_description(desc: &SpaceDescription) -> Result<Self, AnalysisError> {
        let g = build_algebra(desc)?;
        let n = g.dim();
        let mut span: Vec<_> = Vec::new();
        for &i in &desc.subalgebra {
            if i >= n {
                return Err(HomSpaceError::IndexOutOfRange { index: i }.into());
            }
            span.push(g.basis_vector(i));
        }
        for v in &desc.subvectors {
            if v.len() != n {
                return Err(HomSpaceError::WrongLength {
                    expected: n,
                    found: v.len(),
                }
                .into());
            }
            span.push(nalgebra::DVector::from_row_slice(v));
        }
        let name = desc.name.clone().unwrap_or_else(|| g.name().to_string());
        let hs = make_homspace(g, &span)?;
        let dec = if desc.blocks.is_empty() {
            Decomposition::singletons(&hs)
        } else {
            Decomposition::from_basis_indices(&hs, &desc.blocks)?
        };
        validate_decomposition(&hs, &dec)?;
        Ok(Self {
            id: name.clone(),
            label: name,
            params: None,
            space: hs,
            decomposition: dec,
            scales: desc.scales.clone(),
            witnesses: Vec::new(),
            presets: Vec::new(),
            expected: None,
        })
    }

    /// Named preset or explicit direction, checked against the block count.
    pub fn direction(&self, preset: Option<&str>, explicit: Option<&[f64]>) -> Result<Vec<f64>, AnalysisError> {
        let q = self.decomposition.q();
        let u = match (preset, explicit) {
            (Some(name), _) => self
                .presets
                .iter()
                .find(|p| p.name == name)
                .map(|p| p.direction.clone())
                .ok_or_else(|| AnalysisError::InvalidScan(format!("no preset '{name}' for {}", self.id)))?,
            (None, Some(u)) => u.to_vec(),
            (None, None) => return Err(AnalysisError::InvalidScan("a direction or preset is required".into())),
        };
        if u.len() != q {
            return Err(AnalysisError::InvalidScan(format!(
                "direction has {} entries for {q} blocks",
                u.len()
            )));
        }
        if u.iter().all(|x| *x == 0.0) || u.iter().any(|x| !x.is_finite()) {
            return Err(AnalysisError::InvalidScan("direction must be finite and nonzero".into()));
        }
        Ok(u)
    }
}

fn build_algebra(desc: &SpaceDescription) -> Result<LieAlgebra, AnalysisError> {
    let g = match &desc.algebra {
        AlgebraSpec::Builders(summands) => {
            let mut acc: Option<LieAlgebra> = None;
            for (family, n) in summands {
                let next = match family.as_str() {
                    "su" => build_su(*n)?,
                    "so" => build_so(*n)?,
                    "sp" => build_sp(*n)?,
                    _ => build_torus(*n)?,
                };
                acc = Some(match acc {
                    None => next,
                    Some(a) => direct_sum(&a, &next),
                });
            }
            acc.ok_or(AlgebraError::EmptyAlgebra)?
        }
        AlgebraSpec::Explicit { dim, brackets } => {
            let mut c = StructureTensor::zeros(*dim);
            for &(i, j, k, v) in brackets {
                c.set_antisymmetric(i, j, k, v);
            }
            LieAlgebra::from_structure("explicit", c, DMatrix::identity(*dim, *dim))?
        }
    };
    let n = g.dim();
    Ok(match &desc.ip {
        None => g,
        Some(InnerProductSpec::Identity) => g.with_ip(DMatrix::identity(n, n))?,
        Some(InnerProductSpec::Killing) => {
            let ip = -g.killing().clone();
            g.with_ip(ip)?
        }
        Some(InnerProductSpec::Diagonal(x)) => {
            if x.len() != n {
                return Err(AlgebraError::ShapeMismatch {
                    expected: n,
                    found: x.len(),
                }
                .into());
            }
            g.with_ip(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(x)))?
        }
    })
}

#[derive(Debug, Clone)]
pub struct Options {
    /// Relative zero tolerance for the spectrum of `F`.
    pub tol: f64,
    pub einstein_tol: f64,
    /// Analyze non-Einstein metrics instead of failing.
    pub force: bool,
    pub oracle_probes: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: ZERO_TOL,
            einstein_tol: EINSTEIN_TOL,
            force: false,
            oracle_probes: 8,
            seed: 20_240_611,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoBlockReport {
    /// `[1; 22]`
    pub a: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub probes: usize,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Hygiene {
    pub jacobi_residual: f64,
    pub biinvariance_residual: f64,
    pub block_invariance_residual: f64,
    pub tensor_lower_symmetry_residual: f64,
    pub tensor_full_symmetry_residual: f64,
    pub f_symmetry_residual: f64,
    pub ineffective_dimension: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceSummary {
    pub invariant_symmetric_dimension: usize,
    pub diagonal_suffices: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub id: String,
    pub label: String,
    pub params: Option<Params>,
    pub dims: Vec<usize>,
    pub scales: Vec<f64>,
    pub killing_values: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    pub mean_ricci: f64,
    pub einstein_residual: f64,
    pub einstein: bool,
    pub standard: bool,
    pub casimir: Option<f64>,
    pub casimir_identity_residual: Option<f64>,
    pub f_matrix: Vec<Vec<f64>>,
    pub f_spectrum: Vec<f64>,
    pub f_standard_residual: Option<f64>,
    pub fb_residual: f64,
    pub restricted_spectrum: Vec<f64>,
    pub verdict: Verdict,
    pub primary_verdict: Verdict,
    pub witnesses: Vec<WitnessVerdict>,
    pub null_direction_test: Option<NullDirectionTest>,
    pub casimir_criterion: Option<CasimirCriterion>,
    pub degeneracy: Degeneracy,
    pub two_block: Option<TwoBlockReport>,
    pub equivalence: EquivalenceSummary,
    pub oracle: OracleSummary,
    pub hygiene: Hygiene,
    pub notes: Vec<String>,
}

/// Curvature data of the space at its metric, plus the base-metric data.
pub struct Evaluated {
    pub base: BlockData,
    pub data: BlockData,
    pub metric: MetricPoint,
    pub curvature: CurvatureData,
}

pub fn evaluate(space: &Space) -> Result<Evaluated, AnalysisError> {
    let hs = &space.space;
    let dec = &space.decomposition;
    let report = validate_decomposition(hs, dec)?;
    report.require_invariant(STRUCTURE_TOL)?;
    let base = BlockData::from_space(hs, dec)?;
    let metric = match &space.scales {
        Some(x) => MetricPoint::new(x.clone(), base.d())?,
        None => MetricPoint::unit(base.q()),
    };
    let data = base.rescaled(&metric)?;
    let curvature = data.curvature();
    Ok(Evaluated {
        base,
        data,
        metric,
        curvature,
    })
}

fn random_vector(rng: &mut ChaCha8Rng, q: usize) -> VariationVector {
    VariationVector::new((0..q).map(|_| rng.random_range(-1.0..1.0)).collect())
}

fn oracle_probe(space: &Space, ev: &Evaluated, rng: &mut ChaCha8Rng) -> Result<OracleReport, AnalysisError> {
    let q = ev.data.q();
    let u = random_vector(rng, q);
    let v = random_vector(rng, q);
    let t = rng.random_range(-0.5..0.5);
    let s = rng.random_range(-0.5..0.5);
    let exps: Vec<f64> = (0..q)
        .map(|i| ev.metric.scales()[i].ln() + u.values()[i] * t + v.values()[i] * s)
        .collect();
    let oracle = scalar_at_log_scales(&space.space, &space.decomposition, &exps)?;
    Ok(OracleReport::new("scalar", ev.data.scalar_scaled(&u, &v, t, s)?, oracle))
}

pub fn analyze(space: &Space, opts: &Options) -> Result<AnalysisReport, AnalysisError> {
    let ev = evaluate(space)?;
    let hs = &space.space;
    let dec = &space.decomposition;
    let data = &ev.data;
    let curv = &ev.curvature;
    let d = data.d();
    let einstein = curv.is_einstein(opts.einstein_tol);
    if !einstein && !opts.force {
        return Err(AnalysisError::NotEinstein {
            residual: curv.einstein_residual,
            tolerance: opts.einstein_tol,
        });
    }
    let mut notes = Vec::new();
    if !einstein {
        notes.push("metric is not Einstein; the classification below assumes a critical point".to_string());
    }
    let standard = data.is_standard(1e-9);

    let f = f_matrix(data);
    let equivalence = module_equivalence(hs, dec)?;
    let witness_data = if space.scales.is_some() {
        if !space.witnesses.is_empty() {
            notes.push("witness decompositions skipped for a rescaled metric".to_string());
        }
        Vec::new()
    } else {
        space
            .witnesses
            .iter()
            .map(|w| Ok((w.label.clone(), BlockData::from_space(hs, &w.decomposition)?)))
            .collect::<Result<Vec<_>, HomSpaceError>>()?
    };
    let assessment = assess(data, &f, &witness_data, opts.tol, Some(&equivalence))?;
    let degeneracy = degeneracy_test(&f, d, opts.tol);

    let standard_einstein = standard && einstein;
    let casimir = standard_einstein.then_some(curv.casimir);
    let casimir_criterion = casimir.map(|c| casimir_sufficient_local_min(c, &f, d, opts.tol));
    let f_standard_residual =
        casimir.map(|c| (f_matrix_standard(d, data.tensor(), c).entries() - f.entries()).abs().max());

    let two_block = (data.q() == 2).then(|| {
        let a = data.tensor().get(0, 1, 1);
        TwoBlockReport {
            a,
            t: two_block_t(d[0], d[1], a),
        }
    });

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_rel = 0.0_f64;
    for _ in 0..opts.oracle_probes {
        max_rel = max_rel.max(oracle_probe(space, &ev, &mut rng)?.rel_error);
    }

    let report = validate_decomposition(hs, dec)?;
    let g = hs.algebra();
    let hygiene = Hygiene {
        jacobi_residual: g.jacobi_residual(),
        biinvariance_residual: g.biinvariance_residual(),
        block_invariance_residual: report.max_invariance_residual(),
        tensor_lower_symmetry_residual: data.tensor().lower_symmetry_residual(),
        tensor_full_symmetry_residual: data.tensor().full_symmetry_residual(),
        f_symmetry_residual: f.symmetry_residual(),
        ineffective_dimension: hs.ineffective_dimension(),
    };
    if hs.ineffective_dimension() > 0 {
        notes.push(format!(
            "subalgebra contains an ideal of dimension {} acting trivially on the complement",
            hs.ineffective_dimension()
        ));
    }

    Ok(AnalysisReport {
        id: space.id.clone(),
        label: space.label.clone(),
        params: space.params.clone(),
        dims: d.to_vec(),
        scales: ev.metric.scales().to_vec(),
        killing_values: data.b().to_vec(),
        ricci: curv.ricci.clone(),
        scalar: curv.scalar,
        mean_ricci: curv.mean_ricci,
        einstein_residual: curv.einstein_residual,
        einstein,
        standard,
        casimir,
        casimir_identity_residual: casimir.map(|c| casimir_identity_residual(d, data.tensor(), c)),
        f_matrix: f.entries().row_iter().map(|r| r.iter().copied().collect()).collect(),
        f_spectrum: f.spectrum(),
        f_standard_residual,
        fb_residual: f.fb_residual(d, curv.mean_ricci),
        restricted_spectrum: assessment.primary.restricted_spectrum.clone(),
        verdict: assessment.verdict,
        primary_verdict: assessment.primary,
        witnesses: assessment.witnesses,
        null_direction_test: assessment.null_direction_test,
        casimir_criterion,
        degeneracy,
        two_block,
        equivalence: EquivalenceSummary {
            invariant_symmetric_dimension: equivalence.invariant_symmetric_dimension,
            diagonal_suffices: equivalence.diagonal_suffices,
        },
        oracle: OracleSummary {
            probes: opts.oracle_probes,
            max_rel_error: max_rel,
        },
        hygiene,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub scalar: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `S`, `S′`, `S″` along `x_i = x_i⁰ e^{u_i t}` on `[from, to]`.
pub fn scan(space: &Space, u: &[f64], from: f64, to: f64, step: f64) -> Result<Vec<ScanRow>, AnalysisError> {
    if step <= 0.0 || !step.is_finite() {
        return Err(AnalysisError::InvalidScan(format!("step must be positive, got {step}")));
    }
    if !from.is_finite() || !to.is_finite() || from > to {
        return Err(AnalysisError::InvalidScan(format!("empty range [{from}, {to}]")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(AnalysisError::InvalidScan(format!("{count} rows requested")));
    }
    let ev = evaluate(space)?;
    let q = ev.data.q();
    if u.len() != q {
        return Err(AnalysisError::InvalidScan(format!("direction has {} entries for {q} blocks", u.len())));
    }
    let u = VariationVector::new(u.to_vec());
    let zero = VariationVector::zeros(q);
    (0..count)
        .map(|i| {
            let t = from + i as f64 * step;
            Ok(ScanRow {
                t,
                scalar: ev.data.scalar_scaled(&u, &zero, t, 0.0)?,
                d1: ev.data.d1_scalar(&u, &zero, t, 0.0)?,
                d2: ev.data.d2_scalar_tt(&u, &zero, t, 0.0)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub space: String,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

/// Number of random probes per randomized verification check.
pub const VERIFY_PROBES: usize = 50;
pub const CRITICAL_PROBES: usize = 100;

/// Invariants, oracle agreement and expected data for one space.
pub fn verify(space: &Space, opts: &Options) -> VerifyReport {
    let mut checks = Vec::new();
    let error = run_checks(space, opts, &mut checks).err().map(|e| e.to_string());
    VerifyReport {
        space: space.id.clone(),
        checks,
        error,
    }
}

/// Verification of a catalog entry, optionally after adding `delta` to one
/// structure constant `C[i][j][k]` of the ambient algebra.
pub fn verify_catalog(id: &str, params: &Params, perturb: Option<(usize, usize, usize, f64)>, opts: &Options) -> VerifyReport {
    let mut ambient: Option<LieAlgebra> = None;
    let built = catalog::instantiate_with(id, params, |g| {
        let g = match perturb {
            Some((i, j, k, delta)) if i < g.dim() && j < g.dim() && k < g.dim() => {
                let old = g.structure().get(i, j, k);
                g.with_structure_entry(i, j, k, old + delta)
            }
            _ => g,
        };
        ambient = Some(g.clone());
        g
    });
    match built {
        Ok(inst) => verify(&inst.into(), opts),
        Err(e) => {
            let mut checks = Vec::new();
            if let Some(g) = ambient {
                checks.push(Check::at_most("jacobi residual", g.jacobi_residual(), 1e-12));
                checks.push(Check::at_most("bi-invariance residual", g.biinvariance_residual(), 1e-12));
            }
            VerifyReport {
                space: id.to_string(),
                checks,
                error: Some(e.to_string()),
            }
        }
    }
}

fn run_checks(space: &Space, opts: &Options, checks: &mut Vec<Check>) -> Result<(), AnalysisError> {
    let hs = &space.space;
    let g = hs.algebra();
    checks.push(Check::at_most("jacobi residual", g.jacobi_residual(), 1e-12));
    checks.push(Check::at_most("bi-invariance residual", g.biinvariance_residual(), 1e-12));
    checks.push(Check::at_most("subalgebra closure", hs.closure_residual(), STRUCTURE_TOL));
    checks.push(Check::at_most("complement invariance", hs.invariance_residual(), STRUCTURE_TOL));

    let ev = evaluate(space)?;
    let data = &ev.data;
    let curv = &ev.curvature;
    let d = data.d();
    let q = data.q();
    let einstein = curv.is_einstein(opts.einstein_tol);
    let standard = data.is_standard(1e-9);
    let f = f_matrix(data);

    checks.push(Check::at_most(
        "tensor symmetry in lower pair",
        data.tensor().lower_symmetry_residual(),
        1e-12,
    ));
    if standard {
        checks.push(Check::at_most(
            "tensor full symmetry (standard metric)",
            data.tensor().full_symmetry_residual(),
            1e-10,
        ));
    }
    checks.push(Check::at_most("S = sum d_k r_k", curv.trace_residual(d), 1e-9));
    checks.push(Check::at_most("F symmetry", f.symmetry_residual(), 1e-10));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let zero = VariationVector::zeros(q);

    let mut worst = 0.0_f64;
    for _ in 0..VERIFY_PROBES {
        let u = random_vector(&mut rng, q);
        let v = random_vector(&mut rng, q);
        let analytic = data.d2_scalar_ts(&u, &v, 0.0, 0.0)?;
        worst = worst.max(OracleReport::new("uFv", analytic, f.bilinear(u.values(), v.values())).rel_error);
    }
    checks.push(Check::at_most("uFv = mixed second derivative", worst, 1e-9));

    // Ricci values against a finite-difference gradient of the oracle.
    let mut worst = 0.0_f64;
    for k in 0..q {
        let path = |t: f64| {
            let exps: Vec<f64> = (0..q)
                .map(|i| ev.metric.scales()[i].ln() + if i == k { t } else { 0.0 })
                .collect();
            scalar_at_log_scales(hs, &space.decomposition, &exps).unwrap_or(f64::NAN)
        };
        let fd = fd_derivative(path, 0.0, 1, DEFAULT_STEP, true)?;
        let analytic = -(d[k] as f64) * curv.ricci[k];
        worst = worst.max(OracleReport::new("ricci", analytic, fd.value).rel_error);
    }
    checks.push(Check::at_most("Ricci = oracle gradient", worst, 1e-6));

    let (mut s_err, mut d1_err, mut ts_err, mut tt_err) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..VERIFY_PROBES {
        let oracle = oracle_probe(space, &ev, &mut rng)?;
        s_err = s_err.max(oracle.rel_error);
        let u = random_vector(&mut rng, q);
        let v = random_vector(&mut rng, q);
        let t = rng.random_range(-0.5..0.5);
        let s = rng.random_range(-0.5..0.5);
        let along_t = |x: f64| data.scalar_scaled(&u, &v, x, s).unwrap_or(f64::NAN);
        let both = |x: f64, y: f64| data.scalar_scaled(&u, &v, x, y).unwrap_or(f64::NAN);
        let fd1 = fd_derivative(along_t, t, 1, DEFAULT_STEP, true)?;
        let fd2 = fd_derivative(along_t, t, 2, DEFAULT_STEP, false)?;
        let fdm = fd_mixed(both, t, s, DEFAULT_STEP, false)?;
        d1_err = d1_err.max(OracleReport::new("d1", data.d1_scalar(&u, &v, t, s)?, fd1.value).rel_error);
        tt_err = tt_err.max(OracleReport::new("d2tt", data.d2_scalar_tt(&u, &v, t, s)?, fd2.value).rel_error);
        ts_err = ts_err.max(OracleReport::new("d2ts", data.d2_scalar_ts(&u, &v, t, s)?, fdm.value).rel_error);
    }
    checks.push(Check::at_most("scalar vs rescaled-frame oracle", s_err, 1e-9));
    checks.push(Check::at_most("first derivative vs finite differences", d1_err, 1e-6));
    checks.push(Check::at_most("mixed derivative vs finite differences", ts_err, 1e-6));
    checks.push(Check::at_most("second derivative vs finite differences", tt_err, 1e-5));

    if einstein {
        checks.push(Check::at_most("F(1,...,1) = r d", f.fb_residual(d, curv.mean_ricci), 1e-9));
        let mut worst = 0.0_f64;
        for _ in 0..CRITICAL_PROBES {
            let u = random_vector(&mut rng, q).trace_free(d);
            worst = worst.max(data.d1_scalar(&u, &zero, 0.0, 0.0)?.abs());
        }
        checks.push(Check::at_most("critical point: first variation", worst, 1e-8));
    }
    if einstein && standard {
        let c = curv.casimir;
        checks.push(Check::holds(
            "1/4 <= r <= 1/2",
            curv.mean_ricci >= 0.25 - 1e-9 && curv.mean_ricci <= 0.5 + 1e-9,
        ));
        checks.push(Check::holds("0 <= c <= 1/2", (-1e-9..=0.5 + 1e-9).contains(&c)));
        checks.push(Check::at_most(
            "Casimir row-sum identity",
            casimir_identity_residual(d, data.tensor(), c),
            1e-9,
        ));
        checks.push(Check::at_most(
            "standard-metric F agrees",
            (f_matrix_standard(d, data.tensor(), c).entries() - f.entries()).abs().max(),
            1e-9,
        ));
        let crit = casimir_sufficient_local_min(c, &f, d, opts.tol);
        if crit.margin > 0.0 {
            checks.push(Check::holds("diagonal dominance implies positive F", crit.full_spectrum_positive));
        }
        if crit.applies {
            checks.push(Check::holds("c > 3/10 gives dominance margin", crit.margin > 0.0));
            checks.push(Check::holds("c > 3/10 gives local minimum", crit.local_min));
        }
    }

    if let Some(expected) = &space.expected {
        expected_checks(space, expected, data, curv, einstein, opts, checks)?;
    }
    Ok(())
}

fn expected_checks(
    space: &Space,
    expected: &Expected,
    data: &BlockData,
    curv: &CurvatureData,
    einstein: bool,
    opts: &Options,
    checks: &mut Vec<Check>,
) -> Result<(), AnalysisError> {
    let d = data.d();
    if let Some(dims) = &expected.dims {
        checks.push(Check::holds("expected dimensions", dims.as_slice() == d));
    }
    checks.push(Check::holds("expected Einstein", einstein == expected.einstein));
    checks.push(Check::holds("expected standard metric", data.is_standard(1e-9) == expected.standard));
    if let Some(c) = expected.casimir {
        checks.push(Check::at_most("expected Casimir constant", (curv.casimir - c).abs(), 1e-9));
    }
    for e in &expected.tensor_entries {
        checks.push(Check::at_most(
            format!("expected [{};{}{}]", e.k + 1, e.i + 1, e.j + 1),
            (data.tensor().get(e.k, e.i, e.j) - e.value).abs(),
            1e-9,
        ));
    }
    if let Some(tb) = &expected.two_block {
        checks.push(Check::holds("expected two-block dimensions", d == [tb.d1, tb.d2]));
        let a = data.tensor().get(0, 1, 1);
        checks.push(Check::at_most("expected a = [1;22]", (a - tb.a).abs(), 1e-9));
        checks.push(Check::at_most(
            "expected T",
            (two_block_t(d[0], d[1], a) - tb.t).abs(),
            1e-9 * tb.t.abs().max(1.0),
        ));
        let u = VariationVector::new(vec![1.0, -(d[0] as f64) / d[1] as f64]);
        let second = data.path_second_derivative(&u, 0.0)?;
        if tb.t.abs() > 1e-6 {
            checks.push(Check::holds("T sign = second variation sign", second.signum() == tb.t.signum()));
        }
    }
    let f = f_matrix(data);
    if let Some(spec) = &expected.full_spectrum {
        let got = f.spectrum();
        let err = spec.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("expected spectrum of F", err, 1e-9));
    }
    if let Some(spec) = &expected.restricted_spectrum {
        let got = crate::criticality::restricted_spectrum(&f, d);
        let err = spec.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("expected restricted spectrum", err, 1e-9));
    }
    if let Some(applies) = expected.casimir_criterion_applies {
        let crit = casimir_sufficient_local_min(curv.casimir, &f, d, opts.tol);
        checks.push(Check::holds("expected c > 3/10 applicability", crit.applies == applies));
    }
    if let Some(kind) = expected.verdict {
        let report = analyze(
            space,
            &Options {
                oracle_probes: 0,
                ..opts.clone()
            },
        )?;
        checks.push(Check::holds(
            format!("expected verdict {kind} (got {})", report.verdict.kind),
            report.verdict.kind == kind,
        ));
    }
    Ok(())
}

/// Rounds to 12 significant digits so that reports are stable across
/// platforms with slightly different floating-point summation.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// JSON value with sorted keys and rounded floats.
pub fn to_stable_json<T: Serialize>(value: &T) -> serde_json::Value {
    fn walk(v: serde_json::Value) -> serde_json::Value {
        use serde_json::Value;
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = round_sig(n.as_f64().unwrap_or(0.0));
                serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
            }
            Value::Array(a) => Value::Array(a.into_iter().map(walk).collect()),
            Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, walk(v))).collect()),
            other => other,
        }
    }
    walk(serde_json::to_value(value).unwrap_or(serde_json::Value::Null))
}
