//! Real polynomial helpers. Coefficients are stored in descending powers.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Drops leading (highest-power) zeros, keeping at least one coefficient.
pub fn trim(c: &[f64]) -> Vec<f64> {
    let first = c.iter().position(|&v| v != 0.0).unwrap_or(c.len().saturating_sub(1));
    let out: Vec<f64> = c[first.min(c.len())..].to_vec();
    if out.is_empty() {
        vec![0.0]
    } else {
        out
    }
}

pub fn degree(c: &[f64]) -> usize {
    trim(c).len() - 1
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![0.0];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &x) in a.iter().enumerate() {
        out[n - a.len() + i] += x;
    }
    for (i, &x) in b.iter().enumerate() {
        out[n - b.len() + i] += x;
    }
    out
}

/// Multiplies by z^k (appends k trailing zeros).
pub fn shift(c: &[f64], k: usize) -> Vec<f64> {
    let mut out = c.to_vec();
    out.extend(std::iter::repeat_n(0.0, k));
    out
}

/// Horner evaluation at a real point.
pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &v| acc * x + v)
}

/// Horner evaluation at a complex point.
pub fn eval_complex(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * z + v)
}

/// Roots via eigenvalues of the companion matrix.
pub fn roots(c: &[f64]) -> Vec<Complex64> {
    let c = trim(c);
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -c[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    let mut r: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    r.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    r
}

/// Monic polynomial with the given real roots.
pub fn from_real_roots(roots: &[f64]) -> Vec<f64> {
    roots.iter().fold(vec![1.0], |acc, &r| mul(&acc, &[1.0, -r]))
}
