use std::sync::OnceLock;

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;

use scalvar::algebra::{build_so, build_sp, build_su, orthonormalize};
use scalvar::analysis::Space;
use scalvar::catalog::{self, Params};
use scalvar::criticality::{casimir_sufficient_local_min, classify, f_matrix, restricted_spectrum, two_block_t, FMatrix};
use scalvar::curvature::{BlockData, MetricPoint, VariationVector};
use scalvar::homspace::triple_tensor;

struct Case {
    name: &'static str,
    space: Space,
    data: BlockData,
}

fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let both = Params {
            n: Some(2),
            k: Some(3),
            group: None,
        };
        [
            ("group-su2", Params::default()),
            ("group-nonsimple", Params::n(2)),
            ("group-spn", Params::n(2)),
            ("group-sun", Params::n(3)),
            ("symmetric-product", both),
            ("wallach-su", Params::k(1)),
            ("wallach-sp", Params::k(1)),
            ("wallach-so", Params::k(3)),
        ]
        .into_iter()
        .map(|(name, p)| {
            let space: Space = catalog::instantiate(name, &p).unwrap().into();
            let data = BlockData::from_space(&space.space, &space.decomposition).unwrap();
            Case { name, space, data }
        })
        .collect()
    })
}

fn trace_free(raw: &[f64], d: &[usize]) -> VariationVector {
    VariationVector::new(raw.to_vec()).trace_free(d)
}

fn rotation(seed: &[f64], m: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |i, j| seed[(i * m + j) % seed.len()] + if i == j { 0.5 } else { 0.0 });
    a.qr().q()
}

fn symmetric(entries: &[f64], q: usize) -> FMatrix {
    let a = DMatrix::from_fn(q, q, |i, j| entries[i * q + j]);
    FMatrix::from_entries((&a + a.transpose()) * 0.5)
}

fn fd_rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn block_rotations_leave_tensor_unchanged(
        which in 0..8usize,
        seed in prop::collection::vec(-1.0..1.0f64, 64),
    ) {
        let case = &cases()[which];
        let mut dec = case.space.decomposition.clone();
        for (i, m) in dec.dims().into_iter().enumerate() {
            dec.rotate_block(i, &rotation(&seed[i..], m));
        }
        let rotated = triple_tensor(&case.space.space, &dec);
        let base = case.data.tensor();
        let q = base.q();
        for k in 0..q {
            for i in 0..q {
                for j in 0..q {
                    prop_assert!((rotated.get(k, i, j) - base.get(k, i, j)).abs() <= 1e-9, "{}", case.name);
                }
            }
        }
    }

    #[test]
    fn tensor_lower_pair_symmetry_is_exact(which in 0..8usize) {
        let t = cases()[which].data.tensor();
        prop_assert_eq!(t.lower_symmetry_residual(), 0.0);
    }

    #[test]
    fn uniform_rescaling_is_a_homothety(which in 0..8usize, lambda in -2.0..2.0f64, t in -1.0..1.0f64) {
        let data = &cases()[which].data;
        let q = data.q();
        let u = VariationVector::new(vec![lambda; q]);
        let zero = VariationVector::zeros(q);
        let s = data.scalar_scaled(&u, &zero, t, 0.0).unwrap();
        prop_assert!((s - (-lambda * t).exp() * data.scalar()).abs() <= 1e-10 * s.abs().max(1.0));
    }

    #[test]
    fn analytic_derivatives_match_central_differences(
        which in 0..8usize,
        raw in prop::collection::vec(-1.0..1.0f64, 12),
        t in -0.5..0.5f64,
        s in -0.5..0.5f64,
    ) {
        let data = &cases()[which].data;
        let q = data.q();
        let u = VariationVector::new(raw[..q].to_vec());
        let v = VariationVector::new(raw[6..6 + q].to_vec());
        let f = |x: f64, y: f64| data.scalar_scaled(&u, &v, x, y).unwrap();
        let h = 1e-4;
        let fd1 = (f(t + h, s) - f(t - h, s)) / (2.0 * h);
        let fdm = (f(t + h, s + h) - f(t + h, s - h) - f(t - h, s + h) + f(t - h, s - h)) / (4.0 * h * h);
        let fd2 = (f(t + h, s) - 2.0 * f(t, s) + f(t - h, s)) / (h * h);
        prop_assert!(fd_rel(data.d1_scalar(&u, &v, t, s).unwrap(), fd1) <= 1e-6);
        prop_assert!(fd_rel(data.d2_scalar_ts(&u, &v, t, s).unwrap(), fdm) <= 1e-6);
        prop_assert!(fd_rel(data.d2_scalar_tt(&u, &v, t, s).unwrap(), fd2) <= 1e-5);
    }

    #[test]
    fn quadratic_form_is_the_second_variation(
        which in 0..8usize,
        a in prop::collection::vec(-1.0..1.0f64, 6),
        b in prop::collection::vec(-1.0..1.0f64, 6),
    ) {
        let data = &cases()[which].data;
        let q = data.q();
        let d = data.d();
        let u = trace_free(&a[..q], d);
        let v = trace_free(&b[..q], d);
        let f = f_matrix(data);
        let zero = VariationVector::zeros(q);
        let tt = data.d2_scalar_tt(&u, &zero, 0.0, 0.0).unwrap();
        let ts = data.d2_scalar_ts(&u, &v, 0.0, 0.0).unwrap();
        prop_assert!((f.bilinear(u.values(), u.values()) - tt).abs() <= 1e-9 * tt.abs().max(1.0));
        prop_assert!((f.bilinear(u.values(), v.values()) - ts).abs() <= 1e-9 * ts.abs().max(1.0));
    }

    #[test]
    fn verdict_is_scale_equivariant(which in 0..8usize, lambda in 0.05..20.0f64) {
        let data = &cases()[which].data;
        let q = data.q();
        let scaled = data.rescaled(&MetricPoint::new(vec![lambda; q], data.d()).unwrap()).unwrap();
        let base = classify(&f_matrix(data), data.d(), 1e-8);
        let other = classify(&f_matrix(&scaled), scaled.d(), 1e-8);
        prop_assert_eq!(base.kind, other.kind);
        for (x, y) in base.restricted_spectrum.iter().zip(&other.restricted_spectrum) {
            prop_assert!((x / lambda - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn restricted_spectrum_ignores_block_order(
        entries in prop::collection::vec(-2.0..2.0f64, 25),
        dims in prop::collection::vec(1usize..9, 5),
        shift in 1usize..5,
    ) {
        let q = 5;
        let f = symmetric(&entries, q);
        let perm: Vec<usize> = (0..q).map(|i| (i + shift) % q).collect();
        let g = FMatrix::from_entries(DMatrix::from_fn(q, q, |i, j| f.entries()[(perm[i], perm[j])]));
        let pd: Vec<usize> = perm.iter().map(|&i| dims[i]).collect();
        let a = restricted_spectrum(&f, &dims);
        let b = restricted_spectrum(&g, &pd);
        prop_assert_eq!(a.len(), q - 1);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn restricted_form_agrees_with_projected_bilinear(
        entries in prop::collection::vec(-2.0..2.0f64, 16),
        dims in prop::collection::vec(1usize..9, 4),
        raw in prop::collection::vec(-1.0..1.0f64, 4),
    ) {
        let f = symmetric(&entries, 4);
        let spec = restricted_spectrum(&f, &dims);
        let u = trace_free(&raw, &dims);
        let norm2: f64 = u.values().iter().map(|x| x * x).sum();
        prop_assume!(norm2 > 1e-6);
        let rayleigh = f.bilinear(u.values(), u.values()) / norm2;
        prop_assert!(rayleigh >= spec[0] - 1e-9 && rayleigh <= spec[spec.len() - 1] + 1e-9);
    }

    #[test]
    fn positive_dominance_margin_gives_positive_spectrum(
        entries in prop::collection::vec(-1.0..1.0f64, 16),
        boost in 0.0..5.0f64,
    ) {
        let mut f = symmetric(&entries, 4).entries().clone();
        for i in 0..4 {
            f[(i, i)] += boost;
        }
        let f = FMatrix::from_entries(f);
        let crit = casimir_sufficient_local_min(0.5, &f, &[1, 2, 3, 4], 1e-8);
        if crit.margin > 0.0 {
            prop_assert!(crit.full_spectrum_positive);
            prop_assert!(crit.local_min);
        }
    }

    #[test]
    fn two_block_statistic_has_the_sign_of_the_second_variation(d1 in 1usize..12, d2 in 1usize..12, a in 0.0..3.0f64) {
        let t = two_block_t(d1, d2, a);
        prop_assume!(t.abs() > 1e-6);
        let u = [1.0, -(d1 as f64) / d2 as f64];
        // Second variation of (d1 - a)/(4 x1) + (d2 + 2a)/(4 x2) - a x1/(4 x2^2) along x = e^{u t}.
        let s = |x: f64| {
            let (x1, x2) = ((u[0] * x).exp(), (u[1] * x).exp());
            (d1 as f64 - a) / (4.0 * x1) + (d2 as f64 + 2.0 * a) / (4.0 * x2) - a * x1 / (4.0 * x2 * x2)
        };
        let h = 1e-3;
        let second = (s(h) - 2.0 * s(0.0) + s(-h)) / (h * h);
        prop_assume!(second.abs() > 1e-6);
        prop_assert_eq!(second > 0.0, t > 0.0, "T = {}, S'' = {}", t, second);
    }
}

#[test]
fn two_block_sign_on_catalog_spaces() {
    for (id, p) in [("group-spn", Params::n(2)), ("group-nonsimple", Params::n(2)), ("group-torus-witness", Params::n(3))] {
        let space: Space = catalog::instantiate(id, &p).unwrap().into();
        let data = BlockData::from_space(&space.space, &space.decomposition).unwrap();
        let d = data.d();
        let t = two_block_t(d[0], d[1], data.tensor().get(0, 1, 1));
        let u = VariationVector::new(vec![1.0, -(d[0] as f64) / d[1] as f64]);
        let tt = data.d2_scalar_tt(&u, &VariationVector::zeros(2), 0.0, 0.0).unwrap();
        assert_eq!(t > 0.0, tt > 0.0, "{id}: T = {t}, S'' = {tt}");
    }
}

#[test]
fn orthonormalize_is_idempotent() {
    for g in [build_su(3).unwrap(), build_so(5).unwrap(), build_sp(2).unwrap()] {
        let once = orthonormalize(&g).unwrap();
        let twice = orthonormalize(&once).unwrap();
        let n = g.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_relative_eq!(once.structure().get(i, j, k), twice.structure().get(i, j, k), epsilon = 1e-14);
                }
            }
        }
    }
}

#[test]
fn generated_algebras_satisfy_identities() {
    for g in [
        build_su(2).unwrap(),
        build_su(4).unwrap(),
        build_so(6).unwrap(),
        build_sp(3).unwrap(),
    ] {
        assert!(g.jacobi_residual() <= 1e-12, "{}", g.name());
        assert!(g.biinvariance_residual() <= 1e-12, "{}", g.name());
        assert!(g.antisymmetry_residual() == 0.0, "{}", g.name());
        assert!((g.ip() + g.killing()).amax() <= 1e-10, "{}", g.name());
    }
}
