//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness and exits nonzero if any criterion fails.

use std::process::ExitCode;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scalvar::analysis::{analyze, AnalysisReport, Options, Space};
use scalvar::catalog::{self, Params};
use scalvar::criticality::{jensen_curve, two_block_t, VerdictKind};
use scalvar::curvature::{BlockData, VariationVector};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

struct Entry {
    name: String,
    space: Space,
    data: BlockData,
    report: AnalysisReport,
}

fn load(id: &str, params: &Params) -> Result<Entry, String> {
    let inst = catalog::instantiate(id, params).map_err(|e| format!("{id}: {e}"))?;
    let space: Space = inst.into();
    let data = BlockData::from_space(&space.space, &space.decomposition).map_err(|e| format!("{id}: {e}"))?;
    let opts = Options {
        force: true,
        ..Options::default()
    };
    let report = analyze(&space, &opts).map_err(|e| format!("{id}: {e}"))?;
    let mut name = id.to_string();
    if let Some(g) = &params.group {
        name.push_str(&format!(" {g}"));
    }
    for v in [params.n, params.k].into_iter().flatten() {
        name.push_str(&format!(" {v}"));
    }
    Ok(Entry {
        name,
        space,
        data,
        report,
    })
}

fn f_of(e: &Entry) -> DMatrix<f64> {
    let q = e.report.f_matrix.len();
    DMatrix::from_fn(q, q, |i, j| e.report.f_matrix[i][j])
}

/// `(⟨[e_a, e_b], e_c⟩, block(a), block(b), block(c))` over the block frame.
struct Frame {
    coeffs: Vec<f64>,
    killing: Vec<f64>,
    block: Vec<usize>,
}

impl Frame {
    fn new(space: &Space) -> Self {
        let g = space.space.algebra();
        let mut vecs = Vec::new();
        let mut block = Vec::new();
        for (i, b) in space.decomposition.blocks().iter().enumerate() {
            for e in b {
                vecs.push(e.clone());
                block.push(i);
            }
        }
        let m = vecs.len();
        let duals: Vec<_> = vecs.iter().map(|e| g.ip() * e).collect();
        let mut coeffs = vec![0.0; m * m * m];
        for a in 0..m {
            for b in 0..m {
                let br = g.bracket(&vecs[a], &vecs[b]);
                for c in 0..m {
                    coeffs[(a * m + b) * m + c] = duals[c].dot(&br);
                }
            }
        }
        let killing = vecs.iter().map(|e| g.killing_value(e, e)).collect();
        Self { coeffs, killing, block }
    }

    /// Scalar curvature of `Σ e^{w_i} ⟨·,·⟩|p_i`.
    fn scalar(&self, w: &[f64]) -> f64 {
        let m = self.block.len();
        let x: Vec<f64> = self.block.iter().map(|&i| w[i]).collect();
        let mut s: f64 = (0..m).map(|a| -0.5 * self.killing[a] * (-x[a]).exp()).sum();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let k = self.coeffs[(a * m + b) * m + c];
                    if k != 0.0 {
                        s -= 0.25 * k * k * (x[c] - x[a] - x[b]).exp();
                    }
                }
            }
        }
        s
    }
}

fn sweep() -> Result<Vec<Entry>, String> {
    catalog::default_sweep().iter().map(|(id, p)| load(id, p)).collect()
}

fn criterion_1() -> Outcome {
    let e = load("group-su2", &Params::default())?;
    let f = f_of(&e);
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { -0.25 } else { 0.25 };
            ensure((f[(i, j)] - want).abs() <= 1e-10, || format!("F[{i}][{j}] = {}", f[(i, j)]))?;
        }
    }
    let eig = SymmetricEigen::new(f);
    let mut pairs: Vec<(f64, usize)> = eig.eigenvalues.iter().copied().zip(0..).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    for (got, want) in values.iter().zip([-0.5, -0.5, 0.25]) {
        ensure((got - want).abs() <= 1e-10, || format!("spectrum {values:?}"))?;
    }
    let top = eig.eigenvectors.column(pairs[2].1);
    let ones = nalgebra::DVector::from_element(3, 1.0 / 3f64.sqrt());
    ensure((top.dot(&ones).abs() - 1.0).abs() <= 1e-10, || format!("1/4-eigenvector {top}"))?;
    let r = &e.report.restricted_spectrum;
    ensure(r.len() == 2 && r.iter().all(|l| (l + 0.5).abs() <= 1e-10), || format!("restricted {r:?}"))?;
    ensure(e.report.verdict.kind == VerdictKind::LocalMax, || format!("verdict {}", e.report.verdict.kind))?;
    Ok("F = (-1/4 diagonal, 1/4 off), spectrum {-1/2, -1/2, 1/4}, LocalMax".into())
}

fn criterion_2(all: &[Entry]) -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for e in all.iter().filter(|e| e.report.einstein) {
        let f = f_of(e);
        let d = e.data.d_f64();
        let ones = nalgebra::DVector::from_element(d.len(), 1.0);
        let fb = &f * ones;
        for (i, di) in d.iter().enumerate() {
            worst = worst.max((fb[i] - e.report.mean_ricci * di).abs());
        }
        count += 1;
    }
    ensure(count > 0, || "no Einstein entries".into())?;
    ensure(worst <= 1e-9, || format!("max residual {worst:e}"))?;
    Ok(format!("{count} Einstein entries, max |F1 - r d| = {worst:.1e}"))
}

fn standard_einstein(all: &[Entry]) -> impl Iterator<Item = &Entry> {
    all.iter().filter(|e| e.report.einstein && e.report.standard)
}

fn criterion_3(all: &[Entry]) -> Outcome {
    let mut count = 0;
    for e in standard_einstein(all) {
        let r = e.report.mean_ricci;
        let c = (4.0 * r - 1.0) / 2.0;
        ensure((0.25 - 1e-9..=0.5 + 1e-9).contains(&r), || format!("{}: mean ricci {r}", e.name))?;
        ensure((-1e-9..=0.5 + 1e-9).contains(&c), || format!("{}: c = {c}", e.name))?;
        count += 1;
    }
    Ok(format!("{count} standard Einstein entries within bounds"))
}

fn criterion_4(all: &[Entry]) -> Outcome {
    let mut worst = 0.0_f64;
    for e in standard_einstein(all) {
        let c = (4.0 * e.report.mean_ricci - 1.0) / 2.0;
        let t = e.data.tensor();
        let q = e.data.q();
        for i in 0..q {
            let row: f64 = (0..q).flat_map(|j| (0..q).map(move |k| (j, k))).map(|(j, k)| t.get(k, i, j)).sum();
            worst = worst.max((row - e.data.d()[i] as f64 * (1.0 - 2.0 * c)).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut t2 = f64::NAN;
    for n in [2usize, 3] {
        let e = load("group-spn", &Params::n(n))?;
        let d = e.data.d();
        let nf = n as f64;
        let d1 = 2 * n * n - 3 * n + 1;
        let a_want = d1 as f64 / (nf + 1.0);
        ensure(d == [d1, 4 * n - 1], || format!("n={n}: dims {d:?}"))?;
        let a = e.data.tensor().get(0, 1, 1);
        ensure((a - a_want).abs() <= 1e-9, || format!("n={n}: a = {a}, want {a_want}"))?;
        let t = two_block_t(d[0], d[1], a);
        let t_want = (2.0 * nf * nf + nf) * (2.0 * nf - 1.0) * (nf - 1.0).powi(2) / (nf + 1.0);
        ensure((t - t_want).abs() <= 1e-9 && t > 0.0, || format!("n={n}: T = {t}, want {t_want}"))?;
        ensure(e.report.verdict.kind == VerdictKind::Saddle, || format!("n={n}: verdict {}", e.report.verdict.kind))?;
        if n == 2 {
            t2 = t;
        }
    }
    ensure((t2 - 10.0).abs() <= 1e-9, || format!("n=2: T = {t2}"))?;
    Ok("n = 2, 3 data match, T(2) = 10, Saddle".into())
}

fn criterion_6() -> Outcome {
    for n in [3usize, 4] {
        let e = load("group-sun", &Params::n(n))?;
        let d = e.data.d();
        ensure(d == [1, n * n - 2 * n, 2 * n - 2], || format!("n={n}: dims {d:?}"))?;
        let t = e.data.tensor();
        let (a, b) = (t.get(0, 2, 2), t.get(1, 2, 2));
        ensure((a - 1.0).abs() <= 1e-9 && (b - (n as f64 - 2.0)).abs() <= 1e-9, || {
            format!("n={n}: [1;33] = {a}, [2;33] = {b}")
        })?;

        let u = VariationVector::new(e.space.presets.iter().find(|p| p.name == "jensen").ok_or("no jensen preset")?.direction.clone());
        let zero = VariationVector::zeros(3);
        let along = |x: f64| e.data.scalar_scaled(&u, &zero, x, 0.0).unwrap();
        for x in [-0.5, -0.2, -0.05, 0.05, 0.2, 0.5] {
            let j = jensen_curve(n, x).map_err(|e| e.to_string())?;
            ensure(j.dh > 0.0, || format!("n={n}: h'({x}) = {}", j.dh))?;
            ensure(rel(j.h, along(x)) <= 1e-12, || format!("n={n}: h({x}) = {} but S = {}", j.h, along(x)))?;
        }
        let h = 1e-4;
        let closed = jensen_curve(n, 0.0).map_err(|e| e.to_string())?.d2h;
        let fd_closed = {
            let hc = |x: f64| jensen_curve(n, x).unwrap().h;
            (hc(h) - 2.0 * hc(0.0) + hc(-h)) / (h * h)
        };
        let fd_space = (along(h) - 2.0 * along(0.0) + along(-h)) / (h * h);
        for (what, v) in [("closed form", closed), ("FD of h", fd_closed), ("FD of S", fd_space)] {
            ensure(v.abs() <= 1e-6, || format!("n={n}: h''(0) by {what} = {v:e}"))?;
        }
        ensure(e.report.verdict.kind == VerdictKind::Saddle, || format!("n={n}: verdict {}", e.report.verdict.kind))?;
    }
    Ok("n = 3, 4 data match, h' > 0 off zero, h''(0) = 0, Saddle".into())
}

fn criterion_7() -> Outcome {
    let p = Params {
        n: Some(2),
        group: Some("su".into()),
        k: None,
    };
    let e = load("group-torus-witness", &p)?;
    let d = e.data.d();
    let a = e.data.tensor().get(0, 1, 1);
    let t = two_block_t(d[0], d[1], a);
    ensure(d[0] == 1 && (a - 1.0).abs() <= 1e-9, || format!("d1 = {}, a = {a}", d[0]))?;
    ensure(t < 0.0, || format!("T = {t}"))?;
    Ok(format!("d1 = a = 1, T = {t}"))
}

fn criterion_8() -> Outcome {
    let e = load("group-nonsimple", &Params::n(2))?;
    let d = e.data.d();
    let a = e.data.tensor().get(0, 1, 1);
    let t = two_block_t(d[0], d[1], a);
    let want = ((d[0] + d[1]) * d[0] * d[1]) as f64;
    ensure(a.abs() <= 1e-9, || format!("a = {a}"))?;
    ensure((t - want).abs() <= 1e-9 && t > 0.0, || format!("T = {t}, want {want}"))?;
    ensure(e.report.verdict.kind == VerdictKind::Saddle, || format!("verdict {}", e.report.verdict.kind))?;
    Ok(format!("a = 0, T = {t}, Saddle"))
}

fn criterion_9() -> Outcome {
    let mut seen = Vec::new();
    for (id, p) in [
        ("symmetric-sphere", Params::n(3)),
        (
            "symmetric-product",
            Params {
                n: Some(2),
                k: Some(3),
                group: None,
            },
        ),
    ] {
        let e = load(id, &p)?;
        let c = (4.0 * e.report.mean_ricci - 1.0) / 2.0;
        ensure((c - 0.5).abs() <= 1e-9, || format!("{id}: c = {c}"))?;
        let f = f_of(&e);
        let q = f.nrows();
        let margin = (0..q)
            .map(|i| f[(i, i)] - (0..q).filter(|&j| j != i).map(|j| f[(i, j)].abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        ensure(margin > 0.0, || format!("{id}: margin {margin}"))?;
        ensure(e.report.verdict.kind == VerdictKind::LocalMin, || format!("{id}: verdict {}", e.report.verdict.kind))?;
        seen.push(format!("{id} margin {margin}"));
    }
    Ok(format!("{}, LocalMin", seen.join(", ")))
}

fn criterion_10(all: &[Entry]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut s_err, mut d1_err, mut ts_err, mut tt_err) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let h = 1e-4;
    for e in all {
        let frame = Frame::new(&e.space);
        let q = e.data.q();
        for _ in 0..50 {
            let mut draw = |r: f64| -> Vec<f64> { (0..q).map(|_| rng.random_range(-r..r)).collect() };
            let (u, v) = (draw(1.0), draw(1.0));
            let ts = draw(0.5);
            let (t, s) = (ts[0], ts[ts.len() - 1] * 0.9);
            let w: Vec<f64> = (0..q).map(|i| u[i] * t + v[i] * s).collect();
            let (uu, vv) = (VariationVector::new(u), VariationVector::new(v));
            let sc = |x: f64, y: f64| e.data.scalar_scaled(&uu, &vv, x, y).unwrap();
            s_err = s_err.max(rel(sc(t, s), frame.scalar(&w)));

            let fd1 = (sc(t + h, s) - sc(t - h, s)) / (2.0 * h);
            let fd2 = (sc(t + h, s) - 2.0 * sc(t, s) + sc(t - h, s)) / (h * h);
            let fdm = (sc(t + h, s + h) - sc(t + h, s - h) - sc(t - h, s + h) + sc(t - h, s - h)) / (4.0 * h * h);
            let err = |x: Result<f64, _>| x.map_err(|e: scalvar::error::CurvatureError| e.to_string());
            d1_err = d1_err.max(rel(err(e.data.d1_scalar(&uu, &vv, t, s))?, fd1));
            tt_err = tt_err.max(rel(err(e.data.d2_scalar_tt(&uu, &vv, t, s))?, fd2));
            ts_err = ts_err.max(rel(err(e.data.d2_scalar_ts(&uu, &vv, t, s))?, fdm));
        }
    }
    let summary = format!("scalar {s_err:.1e}, d/dt {d1_err:.1e}, d2/dtds {ts_err:.1e}, d2/dt2 {tt_err:.1e}");
    ensure(s_err <= 1e-9 && d1_err <= 1e-6 && ts_err <= 1e-6 && tt_err <= 1e-5, || summary.clone())?;
    Ok(format!("{} entries x 50 probes: {summary}", all.len()))
}

fn criterion_11(all: &[Entry]) -> Outcome {
    let (mut jac, mut inv, mut sym, mut fsym) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for e in all {
        let g = e.space.space.algebra();
        jac = jac.max(g.jacobi_residual());
        inv = inv.max(g.biinvariance_residual());
        if e.report.standard {
            let t = e.data.tensor();
            let q = e.data.q();
            for i in 0..q {
                for j in 0..q {
                    for k in 0..q {
                        let x = t.get(k, i, j);
                        for y in [t.get(k, j, i), t.get(i, k, j), t.get(i, j, k), t.get(j, i, k), t.get(j, k, i)] {
                            sym = sym.max((x - y).abs());
                        }
                    }
                }
            }
        }
        let f = f_of(e);
        fsym = fsym.max((&f - f.transpose()).amax());
    }
    let summary = format!("Jacobi {jac:.1e}, bi-invariance {inv:.1e}, tensor symmetry {sym:.1e}, F symmetry {fsym:.1e}");
    ensure(jac <= 1e-12 && inv <= 1e-12 && sym <= 1e-10 && fsym <= 1e-10, || summary.clone())?;
    Ok(summary)
}

fn criterion_12(all: &[Entry]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0_f64;
    let mut count = 0;
    for e in all.iter().filter(|e| e.report.einstein) {
        let q = e.data.q();
        let d = e.data.d();
        let zero = VariationVector::zeros(q);
        for _ in 0..100 {
            let raw: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mean = raw.iter().zip(d).map(|(x, &di)| x * di as f64).sum::<f64>() / d.iter().sum::<usize>() as f64;
            let u = VariationVector::new(raw.iter().map(|x| x - mean).collect());
            let d1 = e.data.d1_scalar(&u, &zero, 0.0, 0.0).map_err(|e| e.to_string())?;
            worst = worst.max(d1.abs());
        }
        count += 1;
    }
    ensure(worst <= 1e-8, || format!("max |dS| = {worst:e}"))?;
    Ok(format!("{count} Einstein entries x 100 directions, max |dS| = {worst:.1e}"))
}

fn criterion_13() -> Outcome {
    let want = [
        VerdictKind::LocalMax,
        VerdictKind::Saddle,
        VerdictKind::LocalMin,
        VerdictKind::LocalMin,
    ];
    let mut got = Vec::new();
    for (k, w) in (1..=4).zip(want) {
        let e = load("wallach-so", &Params::k(k))?;
        let kind = e.report.verdict.kind;
        ensure(kind == w, || format!("k={k}: verdict {kind}, want {w}"))?;
        got.push(format!("k={k} {kind}"));
    }
    Ok(got.join(", "))
}

fn main() -> ExitCode {
    let all = sweep();
    let with_all = |f: fn(&[Entry]) -> Outcome| -> Outcome {
        match &all {
            Ok(entries) => f(entries),
            Err(e) => Err(format!("catalog sweep failed: {e}")),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("su(2) exactness", criterion_1()),
        ("F b = r d identity", with_all(criterion_2)),
        ("mean Ricci and Casimir bounds", with_all(criterion_3)),
        ("Casimir identity", with_all(criterion_4)),
        ("Sp(n) two-block data", criterion_5()),
        ("SU(n) three-block data and Jensen curve", criterion_6()),
        ("torus witness", criterion_7()),
        ("non-simple group", criterion_8()),
        ("c > 3/10 path on symmetric spaces", criterion_9()),
        ("oracle equivalence", with_all(criterion_10)),
        ("algebraic hygiene", with_all(criterion_11)),
        ("critical-point property", with_all(criterion_12)),
        ("SO(3k)/SO(k)^3 verdicts", criterion_13()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
