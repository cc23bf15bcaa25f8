use std::io::Write;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scalvar::algebra::build_su;
use scalvar::analysis::{analyze, verify_catalog, Options, Space};
use scalvar::catalog::{self, Params};
use scalvar::criticality::VerdictKind;
use scalvar::curvature::BlockData;
use scalvar::error::AnalysisError;
use scalvar::oracle::scalar_at_log_scales;
use scalvar::spacefile;

#[test]
fn every_sweep_entry_verifies() {
    let opts = Options::default();
    for (id, params) in catalog::default_sweep() {
        let report = verify_catalog(id, &params, None, &opts);
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| &c.name).collect();
        assert!(report.passed(), "{id} {params:?}: failed {failed:?}, error {:?}", report.error);
    }
}

#[test]
fn two_block_closed_form_matches_frame_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (id, p) in [
        ("group-spn", Params::n(2)),
        ("group-spn", Params::n(3)),
        ("group-nonsimple", Params::n(2)),
        ("group-torus-witness", Params::n(3)),
    ] {
        let space: Space = catalog::instantiate(id, &p).unwrap().into();
        let data = BlockData::from_space(&space.space, &space.decomposition).unwrap();
        let (d1, d2) = (data.d()[0] as f64, data.d()[1] as f64);
        let a = data.tensor().get(0, 1, 1);
        for _ in 0..10 {
            let w = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let (x1, x2) = (f64::exp(w[0]), f64::exp(w[1]));
            let closed = (d1 - a) / (4.0 * x1) + (d2 + 2.0 * a) / (4.0 * x2) - a * x1 / (4.0 * x2 * x2);
            let frame = scalar_at_log_scales(&space.space, &space.decomposition, &w).unwrap();
            assert_relative_eq!(closed, frame, max_relative = 1e-10);
        }
    }
}

fn sun3_description() -> String {
    let g = build_su(3).unwrap();
    let last = g.dim() - 1;
    let inner: Vec<usize> = g.basis_supported_in(&[1, 2]).into_iter().filter(|&i| i != last).collect();
    let rest: Vec<usize> = (0..g.dim()).filter(|i| *i != last && !inner.contains(i)).collect();
    let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    format!(
        "# bi-invariant SU(3) in three blocks\nname su3-three-blocks\nalgebra su 3\nblock {last}\nblock {}\nblock {}\n",
        join(&inner),
        join(&rest)
    )
}

#[test]
fn space_file_reproduces_catalog_entry() {
    let dir = std::env::temp_dir().join(format!("scalvar-catalog-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("su3.space");
    std::fs::File::create(&path)
        .unwrap()
        .write_all(sun3_description().as_bytes())
        .unwrap();

    let from_file = Space::from_description(&spacefile::read(&path).unwrap()).unwrap();
    let from_catalog = Space::from_catalog("group-sun", &Params::n(3)).unwrap();
    let opts = Options::default();
    let a = analyze(&from_file, &opts).unwrap();
    let b = analyze(&from_catalog, &opts).unwrap();
    assert_eq!(a.dims, b.dims);
    assert_relative_eq!(a.scalar, b.scalar, epsilon = 1e-12);
    for (x, y) in a.restricted_spectrum.iter().zip(&b.restricted_spectrum) {
        assert_relative_eq!(x, y, epsilon = 1e-10);
    }
    assert_eq!(a.verdict.kind, VerdictKind::Saddle);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn squashed_metric_from_file_needs_force() {
    let text = "algebra su 2\nblock 0\nblock 1 2\nscales 2 1\n";
    let space = Space::from_description(&spacefile::parse(text).unwrap()).unwrap();
    assert!(matches!(
        analyze(&space, &Options::default()),
        Err(AnalysisError::NotEinstein { .. })
    ));
    let forced = Options {
        force: true,
        ..Options::default()
    };
    let report = analyze(&space, &forced).unwrap();
    assert!(!report.einstein);
    // Berger sphere with d = (1, 2), a = 1: S = 1/x2 - x1/(4 x2^2).
    let (x1, x2) = (2.0, 1.0);
    assert_relative_eq!(report.scalar, 1.0 / x2 - x1 / (4.0 * x2 * x2), epsilon = 1e-12);
}

#[test]
fn malformed_files_report_lines() {
    let err = spacefile::parse("algebra su 3\nblock 0 1\nscales 1 x\n").unwrap_err();
    assert!(err.to_string().contains('3'), "{err}");
    let bad_blocks = spacefile::parse("algebra su 2\nblock 0 1\n").unwrap();
    assert!(Space::from_description(&bad_blocks).is_err());
    let not_sub = spacefile::parse("algebra su 3\nsubalgebra 0 1\n").unwrap();
    assert!(Space::from_description(&not_sub).is_err());
}
