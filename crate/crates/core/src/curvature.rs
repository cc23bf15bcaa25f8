//! Ricci and scalar curvature of diagonal invariant metrics
//! `x_1⟨·,·⟩|p_1 + … + x_q⟨·,·⟩|p_q`, the exponential two-parameter
//! family `x_i = e^{u_i t + v_i s}` and its analytic derivatives.

use log::warn;
use serde::Serialize;

use crate::error::{CurvatureError, HomSpaceError};
use crate::homspace::{killing_values, triple_tensor, Decomposition, HomSpace, TripleTensor};

/// Ricci spread at or below which a metric counts as Einstein.
pub const EINSTEIN_TOL: f64 = 1e-8;

/// Block data of a diagonal metric in an adapted orthonormal frame:
/// Killing values `b_i`, dimensions `d_i` and the tensor `[k; ij]`.
#[derive(Debug, Clone)]
pub struct BlockData {
    b: Vec<f64>,
    d: Vec<usize>,
    tensor: TripleTensor,
}

impl BlockData {
    pub fn new(b: Vec<f64>, d: Vec<usize>, tensor: TripleTensor) -> Result<Self, CurvatureError> {
        let q = d.len();
        if b.len() != q {
            return Err(CurvatureError::LengthMismatch {
                what: "killing values",
                expected: q,
                found: b.len(),
            });
        }
        if tensor.q() != q {
            return Err(CurvatureError::LengthMismatch {
                what: "triple tensor",
                expected: q,
                found: tensor.q(),
            });
        }
        Ok(Self { b, d, tensor })
    }

    /// Data of the metric `⟨·,·⟩|p` itself.
    pub fn from_space(hs: &HomSpace, dec: &Decomposition) -> Result<Self, HomSpaceError> {
        let b = killing_values(hs, dec)?;
        Ok(Self {
            b,
            d: dec.dims(),
            tensor: triple_tensor(hs, dec),
        })
    }

    pub fn q(&self) -> usize {
        self.d.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn d(&self) -> &[usize] {
        &self.d
    }

    pub fn d_f64(&self) -> Vec<f64> {
        self.d.iter().map(|&x| x as f64).collect()
    }

    pub fn tensor(&self) -> &TripleTensor {
        &self.tensor
    }

    /// Data of the metric with scales `x`, in the frame `x_i^{-1/2} e_i`.
    pub fn rescaled(&self, x: &MetricPoint) -> Result<Self, CurvatureError> {
        self.check_len("metric scales", x.scales().len())?;
        let b = self.b.iter().zip(x.scales()).map(|(b, x)| b / x).collect();
        Ok(Self {
            b,
            d: self.d.clone(),
            tensor: self.tensor.rescaled(x.scales()),
        })
    }

    fn check_len(&self, what: &'static str, found: usize) -> Result<(), CurvatureError> {
        if found != self.q() {
            return Err(CurvatureError::LengthMismatch {
                what,
                expected: self.q(),
                found,
            });
        }
        Ok(())
    }

    /// `r_k = −b_k/2 − (2 Σ_{i,j}[j; ki] − Σ_{i,j}[k; ij]) / (4 d_k)`
    pub fn ricci(&self) -> Vec<f64> {
        let q = self.q();
        let t = &self.tensor;
        (0..q)
            .map(|k| {
                let mut upper = 0.0;
                let mut lower = 0.0;
                for i in 0..q {
                    for j in 0..q {
                        upper += t.get(j, k, i);
                        lower += t.get(k, i, j);
                    }
                }
                -self.b[k] / 2.0 - (2.0 * upper - lower) / (4.0 * self.d[k] as f64)
            })
            .collect()
    }

    /// `S = −Σ b_i d_i / 2 − Σ [k; ij] / 4`
    pub fn scalar(&self) -> f64 {
        let killing: f64 = self.b.iter().zip(&self.d).map(|(b, &d)| b * d as f64).sum();
        -killing / 2.0 - self.tensor.total() / 4.0
    }

    /// `∂_t^m ∂_s^n S` along `x_i = e^{u_i t + v_i s}`.
    ///
    /// Every term of `S` is an exponential of a linear form in `(t, s)`,
    /// so each derivative multiplies the term by the matching powers of
    /// the form's coefficients.
    pub fn scaled_derivative(
        &self,
        u: &VariationVector,
        v: &VariationVector,
        t: f64,
        s: f64,
        m: u32,
        n: u32,
    ) -> Result<f64, CurvatureError> {
        self.check_len("u", u.len())?;
        self.check_len("v", v.len())?;
        let (u, v) = (u.values(), v.values());
        let q = self.q();
        let mut acc = 0.0;
        for i in 0..q {
            let coef = -self.b[i] * self.d[i] as f64 / 2.0;
            if coef != 0.0 {
                let (a, c) = (-u[i], -v[i]);
                acc += coef * a.powi(m as i32) * c.powi(n as i32) * (a * t + c * s).exp();
            }
        }
        for k in 0..q {
            for i in 0..q {
                for j in 0..q {
                    let val = self.tensor.get(k, i, j);
                    if val == 0.0 {
                        continue;
                    }
                    let a = u[k] - u[i] - u[j];
                    let c = v[k] - v[i] - v[j];
                    acc -= 0.25 * val * a.powi(m as i32) * c.powi(n as i32) * (a * t + c * s).exp();
                }
            }
        }
        Ok(acc)
    }

    /// `S((·,·)_{t,s})` for `x_i = e^{u_i t + v_i s}`.
    pub fn scalar_scaled(&self, u: &VariationVector, v: &VariationVector, t: f64, s: f64) -> Result<f64, CurvatureError> {
        self.scaled_derivative(u, v, t, s, 0, 0)
    }

    /// `∂S/∂t`
    pub fn d1_scalar(&self, u: &VariationVector, v: &VariationVector, t: f64, s: f64) -> Result<f64, CurvatureError> {
        self.scaled_derivative(u, v, t, s, 1, 0)
    }

    /// `∂²S/∂t∂s`
    pub fn d2_scalar_ts(&self, u: &VariationVector, v: &VariationVector, t: f64, s: f64) -> Result<f64, CurvatureError> {
        self.scaled_derivative(u, v, t, s, 1, 1)
    }

    /// `∂²S/∂t²`
    pub fn d2_scalar_tt(&self, u: &VariationVector, v: &VariationVector, t: f64, s: f64) -> Result<f64, CurvatureError> {
        self.scaled_derivative(u, v, t, s, 2, 0)
    }

    /// `∂³S/∂t³`
    pub fn d3_scalar_ttt(&self, u: &VariationVector, v: &VariationVector, t: f64, s: f64) -> Result<f64, CurvatureError> {
        self.scaled_derivative(u, v, t, s, 3, 0)
    }

    /// Second derivative along the one-parameter path `e^{u t}` at `t`.
    pub fn path_second_derivative(&self, u: &VariationVector, t: f64) -> Result<f64, CurvatureError> {
        self.d2_scalar_tt(u, &VariationVector::zeros(self.q()), t, 0.0)
    }

    pub fn curvature(&self) -> CurvatureData {
        CurvatureData::from_blocks(self)
    }

    /// Metric is the one induced by `−B`: every `b_i = −1`.
    pub fn is_standard(&self, tol: f64) -> bool {
        self.b.iter().all(|b| (b + 1.0).abs() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricPoint {
    scales: Vec<f64>,
    normalized: bool,
}

impl MetricPoint {
    pub fn new(scales: Vec<f64>, d: &[usize]) -> Result<Self, CurvatureError> {
        if scales.len() != d.len() {
            return Err(CurvatureError::LengthMismatch {
                what: "metric scales",
                expected: d.len(),
                found: scales.len(),
            });
        }
        if let Some(&bad) = scales.iter().find(|x| **x <= 0.0 || !x.is_finite()) {
            return Err(CurvatureError::NonPositiveScale(bad));
        }
        let normalized = log_volume(&scales, d).abs() <= 1e-12;
        Ok(Self { scales, normalized })
    }

    pub fn unit(q: usize) -> Self {
        Self {
            scales: vec![1.0; q],
            normalized: true,
        }
    }

    /// `x_i = e^{u_i t + v_i s}`
    pub fn exponential(u: &VariationVector, v: &VariationVector, t: f64, s: f64, d: &[usize]) -> Result<Self, CurvatureError> {
        let scales = u.values().iter().zip(v.values()).map(|(a, b)| (a * t + b * s).exp()).collect();
        Self::new(scales, d)
    }

    /// Homothetic copy with `Π x_i^{d_i} = 1`.
    pub fn normalize(&self, d: &[usize]) -> Self {
        let n: usize = d.iter().sum();
        let shift = (-log_volume(&self.scales, d) / n as f64).exp();
        Self {
            scales: self.scales.iter().map(|x| x * shift).collect(),
            normalized: true,
        }
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
}

fn log_volume(scales: &[f64], d: &[usize]) -> f64 {
    scales.iter().zip(d).map(|(x, &d)| d as f64 * x.ln()).sum()
}

/// Diagonal variation exponents `u_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationVector(Vec<f64>);

impl VariationVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(q: usize) -> Self {
        Self(vec![0.0; q])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ d_i u_i`
    pub fn trace(&self, d: &[usize]) -> f64 {
        self.0.iter().zip(d).map(|(u, &d)| u * d as f64).sum()
    }

    pub fn is_trace_zero(&self, d: &[usize], tol: f64) -> bool {
        self.trace(d).abs() <= tol
    }

    /// Removes the multiple of `(1, …, 1)` that carries the trace.
    pub fn trace_free(&self, d: &[usize]) -> Self {
        let n: usize = d.iter().sum();
        let shift = self.trace(d) / n as f64;
        Self(self.0.iter().map(|u| u - shift).collect())
    }
}

impl From<Vec<f64>> for VariationVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureData {
    pub ricci: Vec<f64>,
    pub scalar: f64,
    /// `d`-weighted mean of the Ricci values.
    pub mean_ricci: f64,
    pub einstein_residual: f64,
    /// `(4 r̄ − 1) / 2`; meaningful for standard Einstein metrics.
    pub casimir: f64,
}

impl CurvatureData {
    pub fn from_blocks(data: &BlockData) -> Self {
        let ricci = data.ricci();
        let n: usize = data.d().iter().sum();
        let mean_ricci = ricci.iter().zip(data.d()).map(|(r, &d)| r * d as f64).sum::<f64>() / n as f64;
        let einstein_residual = ricci.iter().map(|r| (r - mean_ricci).abs()).fold(0.0, f64::max);
        Self {
            scalar: data.scalar(),
            casimir: casimir(mean_ricci),
            ricci,
            mean_ricci,
            einstein_residual,
        }
    }

    pub fn is_einstein(&self, tol: f64) -> bool {
        self.einstein_residual <= tol
    }

    /// Casimir constant, with a warning when the metric is not Einstein.
    pub fn checked_casimir(&self, tol: f64) -> f64 {
        if !self.is_einstein(tol) {
            warn!(
                "Casimir constant requested for a non-Einstein metric (Ricci spread {:.3e})",
                self.einstein_residual
            );
        }
        self.casimir
    }

    /// `|S − Σ d_k r_k|`
    pub fn trace_residual(&self, d: &[usize]) -> f64 {
        let sum: f64 = self.ricci.iter().zip(d).map(|(r, &d)| r * d as f64).sum();
        (self.scalar - sum).abs()
    }
}

/// `c = (4 r̄ − 1) / 2`
pub fn casimir(mean_ricci: f64) -> f64 {
    (4.0 * mean_ricci - 1.0) / 2.0
}

/// `max_i |Σ_{j,k} [k; ij] − d_i (1 − 2c)|`
pub fn casimir_identity_residual(d: &[usize], tensor: &TripleTensor, c: f64) -> f64 {
    d.iter()
        .enumerate()
        .map(|(i, &di)| (tensor.row_sum(i) - di as f64 * (1.0 - 2.0 * c)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn su2() -> BlockData {
        let t = TripleTensor::from_fn(3, |k, i, j| if i != j && j != k && k != i { 0.5 } else { 0.0 });
        BlockData::new(vec![-1.0; 3], vec![1; 3], t).unwrap()
    }

    #[test]
    fn su2_ricci_and_scalar() {
        let data = su2();
        for r in data.ricci() {
            assert_abs_diff_eq!(r, 0.25, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(data.scalar(), 0.75, epsilon = 1e-15);
        let cd = data.curvature();
        assert_abs_diff_eq!(cd.casimir, 0.0, epsilon = 1e-15);
        assert!(cd.is_einstein(EINSTEIN_TOL));
        assert_abs_diff_eq!(casimir_identity_residual(data.d(), data.tensor(), 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(casimir_identity_residual(data.d(), data.tensor(), 0.1), 0.2, epsilon = 1e-14);
    }

    #[test]
    fn abelian_is_flat() {
        let data = BlockData::new(vec![0.0; 2], vec![1, 2], TripleTensor::zeros(2)).unwrap();
        assert_eq!(data.scalar(), 0.0);
        assert_eq!(data.ricci(), vec![0.0, 0.0]);
    }

    #[test]
    fn casimir_reference_values() {
        assert_eq!(casimir(0.25), 0.0);
        assert_eq!(casimir(0.5), 0.5);
    }

    #[test]
    fn scaled_matches_rescaled_data() {
        let data = su2();
        let u = VariationVector::new(vec![2.0, -1.0, -1.0]);
        let v = VariationVector::new(vec![0.5, 0.0, -0.5]);
        let (t, s) = (0.3, -0.2);
        let x = MetricPoint::exponential(&u, &v, t, s, data.d()).unwrap();
        let direct = data.rescaled(&x).unwrap().scalar();
        assert_abs_diff_eq!(data.scalar_scaled(&u, &v, t, s).unwrap(), direct, epsilon = 1e-13);
    }

    #[test]
    fn first_derivative_is_weighted_ricci() {
        let data = su2();
        let u = VariationVector::new(vec![0.3, -0.7, 1.1]);
        let zero = VariationVector::zeros(3);
        let expected: f64 = -data
            .ricci()
            .iter()
            .zip(u.values())
            .zip(data.d())
            .map(|((r, u), &d)| r * u * d as f64)
            .sum::<f64>();
        assert_abs_diff_eq!(data.d1_scalar(&u, &zero, 0.0, 0.0).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn metric_point_validation() {
        assert!(MetricPoint::new(vec![1.0, -1.0], &[1, 1]).is_err());
        assert!(MetricPoint::new(vec![1.0], &[1, 1]).is_err());
        let x = MetricPoint::new(vec![2.0, 3.0], &[1, 2]).unwrap();
        assert!(!x.is_normalized());
        let y = x.normalize(&[1, 2]);
        assert!(y.is_normalized());
        assert!(log_volume(y.scales(), &[1, 2]).abs() <= 1e-12);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let data = su2();
        let u = VariationVector::zeros(2);
        assert!(data.scalar_scaled(&u, &VariationVector::zeros(3), 0.0, 0.0).is_err());
    }
}
