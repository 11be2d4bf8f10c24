//! Chebyshev series on [-1, 1]: Clenshaw evaluation (scalar and matrix) and
//! interpolation at first-kind Chebyshev nodes through an FFT-based DCT-II.

use nalgebra::DVector;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

/// Parity of a polynomial as read off its Chebyshev coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Zero,
    Even,
    Odd,
    Mixed,
}

/// `Σ c_j T_j(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        ChebSeries { coeffs }
    }

    pub fn zero() -> Self {
        ChebSeries { coeffs: Vec::new() }
    }

    /// `T_1(x) = x`.
    pub fn identity() -> Self {
        ChebSeries { coeffs: vec![0.0, 1.0] }
    }

    /// Index of the last nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn parity(&self) -> Parity {
        let even = self.coeffs.iter().step_by(2).any(|&c| c != 0.0);
        let odd = self.coeffs.iter().skip(1).step_by(2).any(|&c| c != 0.0);
        match (even, odd) {
            (false, false) => Parity::Zero,
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, x)
    }

    /// Drops coefficients past `degree`.
    pub fn truncated(&self, degree: usize) -> Self {
        ChebSeries { coeffs: self.coeffs.iter().take(degree + 1).cloned().collect() }
    }

    /// Applies the series to a symmetric operator with spectrum in [-1, 1],
    /// given only through its action `op`.
    pub fn apply_operator<F>(&self, op: F, v: &DVector<f64>) -> DVector<f64>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let n = v.len();
        let mut b1 = DVector::zeros(n);
        let mut b2 = DVector::zeros(n);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = op(&b1) * 2.0 - &b2 + v * *c;
            b2 = b1;
            b1 = b0;
        }
        let c0 = self.coeffs.first().copied().unwrap_or(0.0);
        op(&b1) - b2 + v * c0
    }
}

/// Clenshaw recurrence for `Σ c_j T_j(x)`.
pub fn clenshaw(coeffs: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    let c0 = coeffs.first().copied().unwrap_or(0.0);
    x * b1 - b2 + c0
}

/// First-kind Chebyshev nodes `cos(π (k + 1/2) / n)`, `k = 0..n`.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Coefficients `c_0..c_{n-1}` of the degree `n-1` interpolant of `f` at the
/// `n` first-kind nodes. Exact (up to rounding) when `f` is a polynomial of
/// degree below `n`.
pub fn interpolate<F: Fn(f64) -> f64>(f: F, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let samples: Vec<f64> = nodes(n).into_iter().map(f).collect();
    dct2_coefficients(&samples)
}

/// Chebyshev coefficients from samples at first-kind nodes:
/// `c_j = (2/n) Σ_k f_k cos(π j (k + 1/2) / n)`, with `c_0` halved.
pub fn dct2_coefficients(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex<f64>> = samples
        .iter()
        .chain(samples.iter().rev())
        .map(|&x| Complex::new(x, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(2 * n).process(&mut buf);
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|j| {
            let phase = Complex::from_polar(1.0, -std::f64::consts::PI * j as f64 / (2.0 * n as f64));
            // Y_j = 2 e^{iπj/2n} X_j with X the DCT-II sum
            let x = (phase * buf[j]).re * 0.5;
            let c = 2.0 * scale * x;
            if j == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}
