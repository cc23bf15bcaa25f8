//! Formula-free cross-checks: scalar curvature recomputed from a literally
//! rescaled frame, and central finite differences.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::VariationVector;
use crate::error::OracleError;
use crate::homspace::{Decomposition, HomSpace};

pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub quantity: String,
    pub analytic: f64,
    pub oracle: f64,
    pub abs_error: f64,
    /// `|a − o| / max(1, |a|, |o|)`
    pub rel_error: f64,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, analytic: f64, oracle: f64) -> Self {
        let abs_error = (analytic - oracle).abs();
        Self {
            quantity: quantity.into(),
            analytic,
            oracle,
            abs_error,
            rel_error: abs_error / 1f64.max(analytic.abs()).max(oracle.abs()),
        }
    }
}

/// Scalar curvature of `(·,·)_{t,s} = Σ e^{u_i t + v_i s} ⟨·,·⟩|p_i`,
/// computed as `−½ Σ_α B(f_α, f_α) − ¼ Σ_{α,β,γ} (f_γ, [f_α, f_β])²_{t,s}`
/// over the frame `f = e^{−(u_i t + v_i s)/2} e` orthonormal for that metric.
pub fn scalar_by_rescaled_frame(
    hs: &HomSpace,
    dec: &Decomposition,
    u: &VariationVector,
    v: &VariationVector,
    t: f64,
    s: f64,
) -> Result<f64, OracleError> {
    let q = dec.q();
    for w in [u, v] {
        if w.len() != q {
            return Err(OracleError::LengthMismatch {
                expected: q,
                found: w.len(),
            });
        }
    }
    let exps: Vec<f64> = (0..q).map(|i| u.values()[i] * t + v.values()[i] * s).collect();
    scalar_at_log_scales(hs, dec, &exps)
}

/// Scalar curvature of `Σ e^{w_i} ⟨·,·⟩|p_i` by the same frame computation.
pub fn scalar_at_log_scales(hs: &HomSpace, dec: &Decomposition, exps: &[f64]) -> Result<f64, OracleError> {
    if exps.len() != dec.q() {
        return Err(OracleError::LengthMismatch {
            expected: dec.q(),
            found: exps.len(),
        });
    }
    let g = hs.algebra();
    let n = g.dim();

    // Metric matrix Σ_i e^{w_i} Π_iᵀ ip Π_i with Π_i the ⟨·,·⟩-projection onto p_i.
    let mut metric = DMatrix::zeros(n, n);
    let mut frame: Vec<DVector<f64>> = Vec::new();
    for (i, block) in dec.blocks().iter().enumerate() {
        let mut proj = DMatrix::zeros(n, n);
        for e in block {
            proj += e * (g.ip() * e).transpose();
        }
        metric += proj.transpose() * g.ip() * &proj * exps[i].exp();
        let shrink = (-exps[i] / 2.0).exp();
        frame.extend(block.iter().map(|e| e * shrink));
    }

    let killing_trace: f64 = frame.iter().map(|f| g.killing_value(f, f)).sum();

    // Column γ holds the covector (f_γ, ·)_{t,s}.
    let duals = DMatrix::from_columns(&frame.iter().map(|f| &metric * f).collect::<Vec<_>>());
    let mut squares = 0.0;
    for fa in &frame {
        for fb in &frame {
            let w = g.bracket(fa, fb);
            let coeffs = duals.transpose() * w;
            squares += coeffs.norm_squared();
        }
    }
    Ok(-killing_trace / 2.0 - squares / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdEstimate {
    pub value: f64,
    /// Difference between the step-`h` and step-`h/2` estimates.
    pub error_estimate: f64,
}

fn check_step(x: f64, step: f64) -> Result<(), OracleError> {
    if step <= 0.0 || !step.is_finite() || x + step == x || x - step == x {
        return Err(OracleError::StepUnderflow { step });
    }
    Ok(())
}

fn central(f: &impl Fn(f64) -> f64, x: f64, h: f64, order: u32) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        _ => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
    }
}

/// Central difference of order 1 or 2 at `x`, optionally refined by one
/// Richardson step `(4 D(h/2) − D(h)) / 3`.
pub fn fd_derivative(f: impl Fn(f64) -> f64, x: f64, order: u32, step: f64, richardson: bool) -> Result<FdEstimate, OracleError> {
    if !(1..=2).contains(&order) {
        return Err(OracleError::UnsupportedOrder(order));
    }
    check_step(x, step / 2.0)?;
    let coarse = central(&f, x, step, order);
    let fine = central(&f, x, step / 2.0, order);
    let value = if richardson { (4.0 * fine - coarse) / 3.0 } else { coarse };
    Ok(FdEstimate {
        value,
        error_estimate: (fine - coarse).abs(),
    })
}

fn central_mixed(f: &impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h)
}

/// Central difference for `∂²f/∂x∂y` at `(x, y)`.
pub fn fd_mixed(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, step: f64, richardson: bool) -> Result<FdEstimate, OracleError> {
    check_step(x, step / 2.0)?;
    check_step(y, step / 2.0)?;
    let coarse = central_mixed(&f, x, y, step);
    let fine = central_mixed(&f, x, y, step / 2.0);
    let value = if richardson { (4.0 * fine - coarse) / 3.0 } else { coarse };
    Ok(FdEstimate {
        value,
        error_estimate: (fine - coarse).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_su;
    use crate::curvature::BlockData;
    use approx::assert_abs_diff_eq;

    #[test]
    fn relative_error_uses_unit_floor() {
        let r = OracleReport::new("x", 1e-3, 2e-3);
        assert_abs_diff_eq!(r.rel_error, 1e-3, epsilon = 1e-18);
        let r = OracleReport::new("x", 100.0, 101.0);
        assert_abs_diff_eq!(r.rel_error, 1.0 / 101.0, epsilon = 1e-15);
    }

    #[test]
    fn fd_of_known_functions() {
        let d1 = fd_derivative(f64::sin, 0.3, 1, DEFAULT_STEP, true).unwrap();
        assert_abs_diff_eq!(d1.value, 0.3f64.cos(), epsilon = 1e-12);
        let d2 = fd_derivative(f64::exp, 0.5, 2, 1e-3, true).unwrap();
        assert_abs_diff_eq!(d2.value, 0.5f64.exp(), epsilon = 1e-8);
        let m = fd_mixed(|x, y| (x * y).sin(), 0.2, 0.7, 1e-3, true).unwrap();
        let exact = (0.14f64).cos() - 0.14 * (0.14f64).sin();
        assert_abs_diff_eq!(m.value, exact, epsilon = 1e-9);
    }

    #[test]
    fn fd_rejects_bad_steps() {
        assert!(matches!(
            fd_derivative(f64::sin, 1e20, 1, 1e-4, false),
            Err(OracleError::StepUnderflow { .. })
        ));
        assert!(fd_derivative(f64::sin, 0.0, 1, 0.0, false).is_err());
        assert!(fd_derivative(f64::sin, 0.0, 3, 1e-4, false).is_err());
    }

    #[test]
    fn su2_frame_oracle_matches_closed_form() {
        let hs = HomSpace::group(build_su(2).unwrap());
        let dec = Decomposition::singletons(&hs);
        let data = BlockData::from_space(&hs, &dec).unwrap();
        let zero = VariationVector::zeros(3);
        let base = scalar_by_rescaled_frame(&hs, &dec, &zero, &zero, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(base, 0.75, epsilon = 1e-14);
        let u = VariationVector::new(vec![0.4, -1.3, 0.9]);
        let oracle = scalar_by_rescaled_frame(&hs, &dec, &u, &zero, 0.37, 0.0).unwrap();
        let analytic = data.scalar_scaled(&u, &zero, 0.37, 0.0).unwrap();
        assert!(OracleReport::new("S", analytic, oracle).rel_error <= 1e-12);
    }
}
