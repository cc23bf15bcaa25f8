//! Built-in spaces with their decompositions, auxiliary decompositions used
//! as saddle witnesses, named variation presets and expected data.
//!
//! Embeddings are stated in terms of the matrix indices of the classical
//! realizations (see [`crate::algebra::matrix`]): a subalgebra "in rows
//! and columns I" is spanned by the basis elements supported in I.

use serde::Serialize;

use crate::algebra::{build_so, build_sp, build_su, direct_sum, LieAlgebra};
use crate::criticality::VerdictKind;
use crate::error::CatalogError;
use crate::homspace::{make_homspace, refine_block, Decomposition, HomSpace};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub min: usize,
    pub max: usize,
    pub default: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamSpec>,
    /// Accepts `--group su|so|sp`.
    pub takes_group: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub group: Option<String>,
}

impl Params {
    pub fn n(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::default()
        }
    }

    pub fn k(k: usize) -> Self {
        Self {
            k: Some(k),
            ..Self::default()
        }
    }
}

/// `[k; ij]` with zero-based block indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TensorEntry {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Data of a two-block split `p = p_1 ⊕ p_2` where `p_1` is a subalgebra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoBlockExpectation {
    pub d1: usize,
    pub d2: usize,
    /// `[1; 22]`
    pub a: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Expected {
    pub dims: Option<Vec<usize>>,
    pub einstein: bool,
    pub standard: bool,
    pub casimir: Option<f64>,
    pub tensor_entries: Vec<TensorEntry>,
    pub two_block: Option<TwoBlockExpectation>,
    pub verdict: Option<VerdictKind>,
    pub full_spectrum: Option<Vec<f64>>,
    pub restricted_spectrum: Option<Vec<f64>>,
    pub casimir_criterion_applies: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub label: String,
    pub decomposition: Decomposition,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub params: Params,
    pub label: String,
    pub space: HomSpace,
    pub decomposition: Decomposition,
    pub witnesses: Vec<Witness>,
    pub presets: Vec<Preset>,
    pub expected: Expected,
}

impl Instance {
    pub fn preset(&self, name: &str) -> Option<&[f64]> {
        self.presets
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.direction.as_slice())
    }
}

const fn spec(name: &'static str, min: usize, max: usize, default: usize) -> ParamSpec {
    ParamSpec { name, min, max, default }
}

pub fn list() -> Vec<EntryInfo> {
    vec![
        EntryInfo {
            id: "group-su2",
            summary: "SU(2) with its bi-invariant metric, one block per basis vector",
            params: vec![],
            takes_group: false,
        },
        EntryInfo {
            id: "group-torus-witness",
            summary: "compact group G, split into a circle subgroup and its complement",
            params: vec![spec("n", 1, 6, 2)],
            takes_group: true,
        },
        EntryInfo {
            id: "group-nonsimple",
            summary: "SU(n) x SU(n), split into the two simple ideals",
            params: vec![spec("n", 2, 4, 2)],
            takes_group: false,
        },
        EntryInfo {
            id: "group-spn",
            summary: "Sp(n), split into Sp(n-1) and its complement",
            params: vec![spec("n", 2, 6, 2)],
            takes_group: false,
        },
        EntryInfo {
            id: "group-sun",
            summary: "SU(n), three blocks induced by U(n-1)",
            params: vec![spec("n", 3, 6, 3)],
            takes_group: false,
        },
        EntryInfo {
            id: "symmetric-sphere",
            summary: "round sphere SO(n+1)/SO(n)",
            params: vec![spec("n", 2, 6, 2)],
            takes_group: false,
        },
        EntryInfo {
            id: "symmetric-product",
            summary: "product of spheres S^n x S^k as a symmetric space",
            params: vec![spec("n", 2, 5, 2), spec("k", 2, 5, 3)],
            takes_group: false,
        },
        EntryInfo {
            id: "wallach-so",
            summary: "SO(3k)/SO(k)^3 with its standard metric",
            params: vec![spec("k", 1, 4, 3)],
            takes_group: false,
        },
        EntryInfo {
            id: "wallach-su",
            summary: "SU(3k)/S(U(k)^3) with its standard metric",
            params: vec![spec("k", 1, 3, 1)],
            takes_group: false,
        },
        EntryInfo {
            id: "wallach-sp",
            summary: "Sp(3k)/Sp(k)^3 with its standard metric",
            params: vec![spec("k", 1, 2, 1)],
            takes_group: false,
        },
    ]
}

/// Desk-scale parameter sweep over every entry.
pub fn default_sweep() -> Vec<(&'static str, Params)> {
    let mut out = vec![("group-su2", Params::default())];
    for (group, n) in [("su", 2), ("su", 3), ("so", 4), ("sp", 2)] {
        out.push((
            "group-torus-witness",
            Params {
                n: Some(n),
                group: Some(group.to_string()),
                k: None,
            },
        ));
    }
    out.extend([2, 3].map(|n| ("group-nonsimple", Params::n(n))));
    out.extend([2, 3, 4].map(|n| ("group-spn", Params::n(n))));
    out.extend([3, 4, 5].map(|n| ("group-sun", Params::n(n))));
    out.extend([2, 3, 4].map(|n| ("symmetric-sphere", Params::n(n))));
    out.push((
        "symmetric-product",
        Params {
            n: Some(2),
            k: Some(3),
            group: None,
        },
    ));
    out.extend([1, 2, 3, 4].map(|k| ("wallach-so", Params::k(k))));
    out.extend([1, 2].map(|k| ("wallach-su", Params::k(k))));
    out.extend([1, 2].map(|k| ("wallach-sp", Params::k(k))));
    out
}

pub fn instantiate(id: &str, params: &Params) -> Result<Instance, CatalogError> {
    instantiate_with(id, params, |g| g)
}

/// As [`instantiate`], passing the ambient algebra through `adjust` before
/// the space is assembled.
pub fn instantiate_with(
    id: &str,
    params: &Params,
    adjust: impl FnOnce(LieAlgebra) -> LieAlgebra,
) -> Result<Instance, CatalogError> {
    let info = list()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| CatalogError::UnknownId(id.to_string()))?;
    let resolved = resolve(&info, params)?;
    let n = resolved.n.unwrap_or(0);
    let k = resolved.k.unwrap_or(0);
    let g = adjust(ambient(id, &resolved)?);
    let mut inst = match id {
        "group-su2" => group_su2(g)?,
        "group-torus-witness" => torus_witness_entry(g)?,
        "group-nonsimple" => nonsimple(g, n)?,
        "group-spn" => spn(g, n)?,
        "group-sun" => sun(g, n)?,
        "symmetric-sphere" => sphere(g, n)?,
        "symmetric-product" => sphere_product(g, n, k)?,
        "wallach-so" => wallach_so(g, k)?,
        "wallach-su" => wallach_su(g, k)?,
        "wallach-sp" => wallach_sp(g, k)?,
        _ => unreachable!("listed entry without a recipe"),
    };
    inst.id = id.to_string();
    inst.params = resolved;
    Ok(inst)
}

fn resolve(info: &EntryInfo, params: &Params) -> Result<Params, CatalogError> {
    let pick = |name: &'static str, given: Option<usize>| -> Result<Option<usize>, CatalogError> {
        match info.params.iter().find(|p| p.name == name) {
            None => Ok(None),
            Some(p) => {
                let value = given.unwrap_or(p.default);
                if value < p.min || value > p.max {
                    return Err(CatalogError::ParamOutOfRange {
                        name: p.name,
                        value,
                        min: p.min,
                        max: p.max,
                    });
                }
                Ok(Some(value))
            }
        }
    };
    let group = if info.takes_group {
        let g = params.group.clone().unwrap_or_else(|| "su".to_string());
        if !matches!(g.as_str(), "su" | "so" | "sp") {
            return Err(CatalogError::UnknownFamily(g));
        }
        Some(g)
    } else {
        None
    };
    let out = Params {
        n: pick("n", params.n)?,
        k: pick("k", params.k)?,
        group,
    };
    if let (Some(g), Some(n)) = (out.group.as_deref(), out.n) {
        let min = match g {
            "su" => 2,
            "so" => 3,
            _ => 1,
        };
        if n < min {
            return Err(CatalogError::ParamOutOfRange {
                name: "n",
                value: n,
                min,
                max: 6,
            });
        }
    }
    Ok(out)
}

fn ambient(id: &str, p: &Params) -> Result<LieAlgebra, CatalogError> {
    let n = p.n.unwrap_or(0);
    let k = p.k.unwrap_or(0);
    Ok(match id {
        "group-su2" => build_su(2)?,
        "group-torus-witness" => match p.group.as_deref() {
            Some("so") => build_so(n)?,
            Some("sp") => build_sp(n)?,
            _ => build_su(n)?,
        },
        "group-nonsimple" => {
            let a = build_su(n)?;
            direct_sum(&a, &a)
        }
        "group-spn" => build_sp(n)?,
        "group-sun" => build_su(n)?,
        "symmetric-sphere" => build_so(n + 1)?,
        "symmetric-product" => direct_sum(&build_so(n + 1)?, &build_so(k + 1)?),
        "wallach-so" => build_so(3 * k)?,
        "wallach-su" => build_su(3 * k)?,
        "wallach-sp" => build_sp(3 * k)?,
        _ => return Err(CatalogError::UnknownId(id.to_string())),
    })
}

fn bare(label: String, space: HomSpace, decomposition: Decomposition) -> Instance {
    Instance {
        id: String::new(),
        params: Params::default(),
        label,
        space,
        decomposition,
        witnesses: Vec::new(),
        presets: Vec::new(),
        expected: Expected {
            einstein: true,
            standard: true,
            ..Expected::default()
        },
    }
}

fn complement_of(dim: usize, taken: &[usize]) -> Vec<usize> {
    (0..dim).filter(|i| !taken.contains(i)).collect()
}

/// Circle through the first basis vector and its complement.
fn circle_split(hs: &HomSpace) -> Result<Decomposition, CatalogError> {
    let dim = hs.algebra().dim();
    Ok(Decomposition::from_basis_indices(hs, &[vec![0], complement_of(dim, &[0])])?)
}

fn circle_witness(hs: &HomSpace) -> Result<Witness, CatalogError> {
    Ok(Witness {
        label: "circle subgroup split".to_string(),
        decomposition: circle_split(hs)?,
    })
}

fn two_block(d1: usize, d2: usize, a: f64) -> TwoBlockExpectation {
    TwoBlockExpectation {
        d1,
        d2,
        a,
        t: crate::criticality::two_block_t(d1, d2, a),
    }
}

fn group_su2(g: LieAlgebra) -> Result<Instance, CatalogError> {
    let hs = HomSpace::group(g);
    let dec = Decomposition::singletons(&hs);
    let mut inst = bare("SU(2)".to_string(), hs, dec);
    inst.expected.dims = Some(vec![1, 1, 1]);
    inst.expected.casimir = Some(0.0);
    inst.expected.verdict = Some(VerdictKind::LocalMax);
    inst.expected.full_spectrum = Some(vec![-0.5, -0.5, 0.25]);
    inst.expected.restricted_spectrum = Some(vec![-0.5, -0.5]);
    inst.expected.casimir_criterion_applies = Some(false);
    inst.presets.push(Preset {
        name: "stretch".to_string(),
        direction: vec![2.0, -1.0, -1.0],
    });
    Ok(inst)
}

fn torus_witness_entry(g: LieAlgebra) -> Result<Instance, CatalogError> {
    let label = format!("{} with a circle split", g.name());
    let hs = HomSpace::group(g);
    let dec = circle_split(&hs)?;
    let d2 = hs.dim_p() - 1;
    let mut inst = bare(label, hs, dec);
    inst.expected.dims = Some(vec![1, d2]);
    inst.expected.casimir = Some(0.0);
    inst.expected.two_block = Some(two_block(1, d2, 1.0));
    Ok(inst)
}

fn nonsimple(g: LieAlgebra, n: usize) -> Result<Instance, CatalogError> {
    let m = n * n - 1;
    let hs = HomSpace::group(g);
    let dec = Decomposition::from_basis_indices(&hs, &[(0..m).collect(), (m..2 * m).collect()])?;
    let witness = circle_witness(&hs)?;
    let mut inst = bare(format!("SU({n}) x SU({n})"), hs, dec);
    inst.witnesses.push(witness);
    inst.expected.dims = Some(vec![m, m]);
    inst.expected.casimir = Some(0.0);
    inst.expected.two_block = Some(two_block(m, m, 0.0));
    inst.expected.verdict = Some(VerdictKind::Saddle);
    Ok(inst)
}

fn spn(g: LieAlgebra, n: usize) -> Result<Instance, CatalogError> {
    // Sp(n-1) in quaternionic rows and columns 1..n.
    let sub = g.basis_supported_in(&(1..n).collect::<Vec<_>>());
    let rest = complement_of(g.dim(), &sub);
    let hs = HomSpace::group(g);
    let dec = Decomposition::from_basis_indices(&hs, &[sub, rest])?;
    let witness = circle_witness(&hs)?;
    let mut inst = bare(format!("Sp({n})"), hs, dec);
    inst.witnesses.push(witness);
    let d1 = 2 * n * n - 3 * n + 1;
    let d2 = 4 * n - 1;
    inst.expected.dims = Some(vec![d1, d2]);
    inst.expected.casimir = Some(0.0);
    inst.expected.two_block = Some(two_block(d1, d2, d1 as f64 / (n as f64 + 1.0)));
    inst.expected.verdict = Some(VerdictKind::Saddle);
    inst.presets.push(Preset {
        name: "two-block".to_string(),
        direction: vec![1.0, -(d1 as f64) / d2 as f64],
    });
    Ok(inst)
}

fn sun(g: LieAlgebra, n: usize) -> Result<Instance, CatalogError> {
    // Centre of U(n-1) is the last diagonal generator; SU(n-1) sits in rows 1..n.
    let centre = g.dim() - 1;
    let sub = g.basis_supported_in(&(1..n).collect::<Vec<_>>());
    let mut taken = sub.clone();
    taken.push(centre);
    let rest = complement_of(g.dim(), &taken);
    let hs = HomSpace::group(g);
    let dec = Decomposition::from_basis_indices(&hs, &[vec![centre], sub, rest])?;
    let witness = circle_witness(&hs)?;
    let mut inst = bare(format!("SU({n})"), hs, dec);
    inst.witnesses.push(witness);
    inst.expected.dims = Some(vec![1, n * n - 2 * n, 2 * n - 2]);
    inst.expected.casimir = Some(0.0);
    inst.expected.tensor_entries = vec![
        TensorEntry {
            k: 0,
            i: 2,
            j: 2,
            value: 1.0,
        },
        TensorEntry {
            k: 1,
            i: 2,
            j: 2,
            value: n as f64 - 2.0,
        },
    ];
    inst.expected.verdict = Some(VerdictKind::Saddle);
    inst.presets.push(Preset {
        name: "jensen".to_string(),
        direction: vec![2.0, -2.0 / (n as f64 - 2.0), 1.0],
    });
    Ok(inst)
}

fn symmetric_expectations(inst: &mut Instance) {
    inst.expected.casimir = Some(0.5);
    inst.expected.verdict = Some(VerdictKind::LocalMin);
    inst.expected.casimir_criterion_applies = Some(true);
}

fn sphere(g: LieAlgebra, n: usize) -> Result<Instance, CatalogError> {
    // SO(n) fixes the first coordinate.
    let h = g.basis_supported_in(&(1..=n).collect::<Vec<_>>());
    let span: Vec<_> = h.iter().map(|&i| g.basis_vector(i)).collect();
    let hs = make_homspace(g, &span)?;
    let dec = Decomposition::whole(&hs);
    let mut inst = bare(format!("S^{n} = SO({})/SO({n})", n + 1), hs, dec);
    inst.expected.dims = Some(vec![n]);
    symmetric_expectations(&mut inst);
    Ok(inst)
}

fn sphere_product(g: LieAlgebra, n: usize, k: usize) -> Result<Instance, CatalogError> {
    // Factors occupy rows 0..=n and n+1..=n+k+1; each SO fixes its first row.
    let first_dim = (n + 1) * n / 2;
    let mut h = g.basis_supported_in(&(1..=n).collect::<Vec<_>>());
    h.extend(g.basis_supported_in(&(n + 2..=n + k + 1).collect::<Vec<_>>()));
    let p1: Vec<usize> = (0..first_dim).filter(|i| !h.contains(i)).collect();
    let p2: Vec<usize> = (first_dim..g.dim()).filter(|i| !h.contains(i)).collect();
    let span: Vec<_> = h.iter().map(|&i| g.basis_vector(i)).collect();
    let hs = make_homspace(g, &span)?;
    let dec = Decomposition::from_basis_indices(&hs, &[p1, p2])?;
    let mut inst = bare(format!("S^{n} x S^{k}"), hs, dec);
    inst.expected.dims = Some(vec![n, k]);
    symmetric_expectations(&mut inst);
    Ok(inst)
}

/// Basis elements with one index in `a` and one in `b`.
fn mixed_support(g: &LieAlgebra, a: &[usize], b: &[usize]) -> Vec<usize> {
    g.labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| {
            l.support.len() == 2
                && ((a.contains(&l.support[0]) && b.contains(&l.support[1]))
                    || (b.contains(&l.support[0]) && a.contains(&l.support[1])))
        })
        .map(|(i, _)| i)
        .collect()
}

/// Isotropy `K³` on three consecutive index groups of size `k`, and the
/// three blocks joining pairs of groups.
fn three_groups(g: &LieAlgebra, k: usize) -> (Vec<usize>, [Vec<usize>; 3], [Vec<usize>; 3]) {
    let groups: [Vec<usize>; 3] = std::array::from_fn(|a| (a * k..(a + 1) * k).collect());
    let mut h = Vec::new();
    for grp in &groups {
        h.extend(g.basis_supported_in(grp));
    }
    let blocks = [(0, 1), (0, 2), (1, 2)].map(|(a, b)| mixed_support(g, &groups[a], &groups[b]));
    (h, groups, blocks)
}

fn wallach_expectations(inst: &mut Instance, a: f64) {
    let d = inst.expected.dims.as_ref().map(|d| d[0]).unwrap_or(0) as f64;
    inst.expected.casimir = Some(0.5 - a);
    if inst.decomposition.q() == 3 {
        inst.expected.tensor_entries = vec![TensorEntry {
            k: 0,
            i: 1,
            j: 2,
            value: a * d,
        }];
    }
}

fn wallach_so(g: LieAlgebra, k: usize) -> Result<Instance, CatalogError> {
    let (h, groups, blocks) = three_groups(&g, k);
    let span: Vec<_> = h.iter().map(|&i| g.basis_vector(i)).collect();
    let hs = make_homspace(g, &span)?;
    let coarse = Decomposition::from_basis_indices(&hs, blocks.as_ref())?;
    let a = k as f64 / (2.0 * (3.0 * k as f64 - 2.0));
    let label = format!("SO({})/SO({k})^3", 3 * k);
    let mut inst = if k == 2 {
        // Each 4-dimensional block is R^2 ⊗ R^2 under SO(2) x SO(2) and
        // splits into two inequivalent planes; the product of the two
        // circle actions is symmetric and separates them.
        let g = hs.algebra();
        let circle = |grp: &[usize]| g.basis_vector(g.basis_supported_in(grp)[0]);
        let mut pieces = Vec::new();
        for (b, (x, y)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            let op = g.ad_matrix(&circle(&groups[x])) * g.ad_matrix(&circle(&groups[y]));
            pieces.extend(refine_block(&hs, coarse.block(b), &op, 1e-6));
        }
        let fine = Decomposition::from_spans(&hs, pieces)?;
        let mut inst = bare(label, hs, fine);
        inst.witnesses.push(Witness {
            label: "three isotropy summands".to_string(),
            decomposition: coarse,
        });
        inst.expected.dims = Some(vec![2; 6]);
        inst
    } else {
        let mut inst = bare(label, hs, coarse);
        inst.expected.dims = Some(vec![k * k; 3]);
        inst
    };
    wallach_expectations(&mut inst, a);
    inst.expected.verdict = Some(match k {
        1 => VerdictKind::LocalMax,
        2 => VerdictKind::Saddle,
        _ => VerdictKind::LocalMin,
    });
    inst.expected.casimir_criterion_applies = Some(false);
    Ok(inst)
}

fn wallach_su(g: LieAlgebra, k: usize) -> Result<Instance, CatalogError> {
    let (mut h, _, blocks) = three_groups(&g, k);
    // The whole diagonal torus lies in s(u(k)^3).
    let cartan: Vec<usize> = (0..g.dim()).filter(|&i| g.labels()[i].name.starts_with('H')).collect();
    h.extend(cartan.iter().filter(|i| !h.contains(i)).collect::<Vec<_>>());
    let blocks: Vec<Vec<usize>> = blocks
        .into_iter()
        .map(|b| b.into_iter().filter(|i| !cartan.contains(i)).collect())
        .collect();
    let span: Vec<_> = h.iter().map(|&i| g.basis_vector(i)).collect();
    let hs = make_homspace(g, &span)?;
    let dec = Decomposition::from_basis_indices(&hs, &blocks)?;
    let mut inst = bare(format!("SU({})/S(U({k})^3)", 3 * k), hs, dec);
    inst.expected.dims = Some(vec![2 * k * k; 3]);
    wallach_expectations(&mut inst, 1.0 / 6.0);
    inst.expected.verdict = Some(VerdictKind::LocalMin);
    inst.expected.casimir_criterion_applies = Some(true);
    Ok(inst)
}

fn wallach_sp(g: LieAlgebra, k: usize) -> Result<Instance, CatalogError> {
    let (h, _, blocks) = three_groups(&g, k);
    let span: Vec<_> = h.iter().map(|&i| g.basis_vector(i)).collect();
    let hs = make_homspace(g, &span)?;
    let dec = Decomposition::from_basis_indices(&hs, blocks.as_ref())?;
    let mut inst = bare(format!("Sp({})/Sp({k})^3", 3 * k), hs, dec);
    inst.expected.dims = Some(vec![4 * k * k; 3]);
    wallach_expectations(&mut inst, k as f64 / (2.0 * (3.0 * k as f64 + 1.0)));
    inst.expected.verdict = Some(VerdictKind::LocalMin);
    inst.expected.casimir_criterion_applies = Some(true);
    Ok(inst)
}
