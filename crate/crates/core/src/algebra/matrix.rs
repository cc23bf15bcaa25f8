//! Matrix realizations of the compact classical algebras.
//!
//! Each builder lists a basis of real matrices that is orthogonal for the
//! Frobenius product, reads off the structure constants, and rescales the
//! basis to be orthonormal for `−B`. Complex entries `a + ib` are embedded
//! as `[[a, −b], [b, a]]`, quaternions first as 2×2 complex blocks.
//!
//! Basis ordering (documented because embeddings select by support):
//! * `su(n)`: for `a < b` the pair `E_ab − E_ba`, `i(E_ab + E_ba)`; then
//!   `i·H_m` for `m = 1..n−1` with `H_m = diag(0, …, 0, m, −1, …, −1)` over
//!   the last `m + 1` coordinates. `H_{n−1}` is the only element not
//!   supported in the lower-right `(n−1)×(n−1)` block.
//! * `so(n)`: `E_ab − E_ba` for `a < b`.
//! * `sp(n)`: `i, j, k` on each diagonal slot `a`, then for `a < b` the four
//!   quaternion units `q` placed as `q` at `(a, b)` and `−q̄` at `(b, a)`.

use nalgebra::DMatrix;

use super::{orthonormalize, BasisLabel, LieAlgebra, StructureTensor};
use crate::error::AlgebraError;

struct Generator {
    matrix: DMatrix<f64>,
    label: BasisLabel,
}

/// Real 2n×2n image of the complex entry `(row, col) += re + i·im`.
fn put_complex(m: &mut DMatrix<f64>, n: usize, row: usize, col: usize, re: f64, im: f64) {
    m[(row, col)] += re;
    m[(row + n, col + n)] += re;
    m[(row + n, col)] += im;
    m[(row, col + n)] -= im;
}

pub fn build_su(n: usize) -> Result<LieAlgebra, AlgebraError> {
    if n < 2 {
        return Err(AlgebraError::InvalidParameter {
            builder: "su",
            min: 2,
            got: n,
        });
    }
    let size = 2 * n;
    let mut gens = Vec::with_capacity(n * n - 1);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut re = DMatrix::zeros(size, size);
            put_complex(&mut re, n, a, b, 1.0, 0.0);
            put_complex(&mut re, n, b, a, -1.0, 0.0);
            gens.push(Generator {
                matrix: re,
                label: BasisLabel::new(format!("X{a}{b}"), vec![a, b]),
            });
            let mut im = DMatrix::zeros(size, size);
            put_complex(&mut im, n, a, b, 0.0, 1.0);
            put_complex(&mut im, n, b, a, 0.0, 1.0);
            gens.push(Generator {
                matrix: im,
                label: BasisLabel::new(format!("Y{a}{b}"), vec![a, b]),
            });
        }
    }
    for m in 1..n {
        let first = n - 1 - m;
        let mut h = DMatrix::zeros(size, size);
        put_complex(&mut h, n, first, first, 0.0, m as f64);
        for c in (first + 1)..n {
            put_complex(&mut h, n, c, c, 0.0, -1.0);
        }
        gens.push(Generator {
            matrix: h,
            label: BasisLabel::new(format!("H{m}"), (first..n).collect()),
        });
    }
    from_generators(format!("su({n})"), gens, n)
}

pub fn build_so(n: usize) -> Result<LieAlgebra, AlgebraError> {
    if n < 3 {
        return Err(AlgebraError::InvalidParameter {
            builder: "so",
            min: 3,
            got: n,
        });
    }
    let mut gens = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut m = DMatrix::zeros(n, n);
            m[(a, b)] = 1.0;
            m[(b, a)] = -1.0;
            gens.push(Generator {
                matrix: m,
                label: BasisLabel::new(format!("E{a}{b}"), vec![a, b]),
            });
        }
    }
    from_generators(format!("so({n})"), gens, n)
}

// Quaternion units as 2×2 complex matrices, entries (re, im) row-major.
type Quat2 = [[(f64, f64); 2]; 2];
const Q_ONE: Quat2 = [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]];
const Q_I: Quat2 = [[(0.0, 1.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, -1.0)]];
const Q_J: Quat2 = [[(0.0, 0.0), (1.0, 0.0)], [(-1.0, 0.0), (0.0, 0.0)]];
const Q_K: Quat2 = [[(0.0, 0.0), (0.0, 1.0)], [(0.0, 1.0), (0.0, 0.0)]];

fn conj_transpose(q: &Quat2) -> Quat2 {
    let mut out = [[(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let (re, im) = q[c][r];
            out[r][c] = (re, -im);
        }
    }
    out
}

fn put_quaternion(m: &mut DMatrix<f64>, n: usize, a: usize, b: usize, q: &Quat2, sign: f64) {
    // Complex size is 2n; the real image has size 4n.
    let cn = 2 * n;
    for r in 0..2 {
        for c in 0..2 {
            let (re, im) = q[r][c];
            if re != 0.0 || im != 0.0 {
                put_complex(m, cn, 2 * a + r, 2 * b + c, sign * re, sign * im);
            }
        }
    }
}

pub fn build_sp(n: usize) -> Result<LieAlgebra, AlgebraError> {
    if n < 1 {
        return Err(AlgebraError::InvalidParameter {
            builder: "sp",
            min: 1,
            got: n,
        });
    }
    let size = 4 * n;
    let mut gens = Vec::with_capacity(n * (2 * n + 1));
    for a in 0..n {
        for (unit, q) in [("i", &Q_I), ("j", &Q_J), ("k", &Q_K)] {
            let mut m = DMatrix::zeros(size, size);
            put_quaternion(&mut m, n, a, a, q, 1.0);
            gens.push(Generator {
                matrix: m,
                label: BasisLabel::new(format!("{unit}{a}"), vec![a]),
            });
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for (unit, q) in [("1", &Q_ONE), ("i", &Q_I), ("j", &Q_J), ("k", &Q_K)] {
                let mut m = DMatrix::zeros(size, size);
                put_quaternion(&mut m, n, a, b, q, 1.0);
                put_quaternion(&mut m, n, b, a, &conj_transpose(q), -1.0);
                gens.push(Generator {
                    matrix: m,
                    label: BasisLabel::new(format!("Q{unit}{a}{b}"), vec![a, b]),
                });
            }
        }
    }
    from_generators(format!("sp({n})"), gens, n)
}

/// Abelian algebra of dimension `k`; the Killing form vanishes, so the
/// inner product is the identity.
pub fn build_torus(k: usize) -> Result<LieAlgebra, AlgebraError> {
    if k < 1 {
        return Err(AlgebraError::InvalidParameter {
            builder: "torus",
            min: 1,
            got: k,
        });
    }
    let g = LieAlgebra::from_structure(format!("t({k})"), StructureTensor::zeros(k), DMatrix::identity(k, k))?;
    let labels = (0..k).map(|i| BasisLabel::new(format!("T{i}"), vec![i])).collect();
    Ok(g.with_realization(labels, k))
}

fn frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

fn from_generators(name: String, gens: Vec<Generator>, size: usize) -> Result<LieAlgebra, AlgebraError> {
    let dim = gens.len();
    let norms: Vec<f64> = gens.iter().map(|g| frobenius(&g.matrix, &g.matrix)).collect();
    let mut structure = StructureTensor::zeros(dim);
    let mut closure = 0.0_f64;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let (x, y) = (&gens[i].matrix, &gens[j].matrix);
            let br = x * y - y * x;
            if br.iter().all(|v| *v == 0.0) {
                continue;
            }
            let mut rest = br.clone();
            for k in 0..dim {
                let c = frobenius(&br, &gens[k].matrix) / norms[k];
                if c != 0.0 {
                    structure.set_antisymmetric(i, j, k, c);
                    rest -= &gens[k].matrix * c;
                }
            }
            closure = closure.max(rest.abs().max());
        }
    }
    if closure > 1e-10 {
        return Err(AlgebraError::NotClosed(closure));
    }
    let raw = LieAlgebra::from_structure(name, structure, DMatrix::identity(dim, dim))?;
    // The Frobenius basis is −B-orthogonal for simple algebras; clear
    // roundoff so Gram-Schmidt reduces to a pure rescaling.
    let mut neg_killing = -raw.killing().clone();
    let scale = neg_killing.abs().max();
    neg_killing.iter_mut().for_each(|v| {
        if v.abs() <= 1e-12 * scale {
            *v = 0.0;
        }
    });
    let with_standard = raw.with_ip(neg_killing)?;
    let g = orthonormalize(&with_standard)?;
    // Supports and realization size count natural (complex or quaternionic) indices.
    let labels = gens.into_iter().map(|g| g.label).collect();
    Ok(g.with_realization(labels, size))
}
