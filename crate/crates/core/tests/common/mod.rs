//! Oracles written independently of the library's linear algebra.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Full polynomial features of degree <= 2, constant first, then linear terms,
/// then `u_a u_b` for `a <= b` in row-major order.
pub fn features(u: &[f64], degree: u32) -> Vec<f64> {
    let mut f = vec![1.0];
    if degree >= 1 {
        f.extend_from_slice(u);
    }
    if degree >= 2 {
        for a in 0..u.len() {
            for b in a..u.len() {
                f.push(u[a] * u[b]);
            }
        }
    }
    f
}

pub fn code(v: f64, lo: f64, hi: f64) -> f64 {
    2.0 * (v - lo) / (hi - lo) - 1.0
}

/// Gauss-Jordan inverse with partial pivoting of a dense row-major matrix.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `(X^T X)` for rows `x`.
pub fn gram(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = x[0].len();
    let mut g = vec![vec![0.0; p]; p];
    for row in x {
        for a in 0..p {
            for b in 0..p {
                g[a][b] += row[a] * row[b];
            }
        }
    }
    g
}

/// Explicit normal-equation solve `(X^T X)^-1 X^T y`.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let inv = invert(&gram(x));
    let mut xty = vec![0.0; p];
    for (row, yi) in x.iter().zip(y) {
        for a in 0..p {
            xty[a] += row[a] * yi;
        }
    }
    (0..p).map(|a| (0..p).map(|b| inv[a][b] * xty[b]).sum()).collect()
}

pub fn example2(x1: f64, x2: f64) -> f64 {
    -82.17 - 2.01 * x1 - 1.61 * x2 + 2.4 * x1 * x1 + 3.76 * x2 * x2 - 1.2 * x1 * x2
}

/// Real roots of `a t^2 + b t + c`, ascending.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> (f64, f64) {
    let disc = (b * b - 4.0 * a * c).sqrt();
    let r1 = (-b - disc) / (2.0 * a);
    let r2 = (-b + disc) / (2.0 * a);
    (r1.min(r2), r1.max(r2))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
