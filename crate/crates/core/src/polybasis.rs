//! Full polynomial feature maps and design matrices.
//!
//! Terms are ordered by total degree, and within a degree by exponent vector
//! in descending lexicographic order, so for two inputs and degree two the
//! features are `[1, x1, x2, x1^2, x1*x2, x2^2]`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct BasisSpec {
    degree: u32,
    dim: usize,
    terms: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    degree: u32,
    dim: usize,
    terms: Vec<Vec<u32>>,
}

impl From<BasisSpec> for BasisRepr {
    fn from(b: BasisSpec) -> Self {
        BasisRepr {
            degree: b.degree,
            dim: b.dim,
            terms: b.terms,
        }
    }
}

impl TryFrom<BasisRepr> for BasisSpec {
    type Error = Error;

    fn try_from(r: BasisRepr) -> Result<Self> {
        let basis = BasisSpec::new(r.dim, r.degree)?;
        if basis.terms != r.terms {
            return Err(Error::ModelFormat(
                "basis term list does not match the canonical ordering".into(),
            ));
        }
        Ok(basis)
    }
}

impl BasisSpec {
    /// Complete basis of all monomials with total degree `<= degree`.
    /// Degree 0 gives the intercept-only model.
    pub fn new(dim: usize, degree: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("basis dimension must be >= 1".into()));
        }
        if degree > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "basis degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let mut terms = Vec::with_capacity(binomial(dim as u64 + degree as u64, degree as u64) as usize);
        for total in 0..=degree {
            let mut current = vec![0u32; dim];
            push_exponents(&mut terms, &mut current, 0, total);
        }
        Ok(Self { degree, dim, terms })
    }

    pub fn quadratic(dim: usize) -> Self {
        Self::new(dim, 2).expect("degree 2 is always supported")
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of terms, `C(d + degree, degree)`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Vec<u32>] {
        &self.terms
    }

    /// Human-readable label of term `j`, e.g. `x1^2*x3`.
    pub fn term_name(&self, j: usize, names: &[String]) -> String {
        let parts: Vec<String> = self.terms[j]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| {
                let name = names.get(k).cloned().unwrap_or_else(|| format!("x{}", k + 1));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn expand(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        let mut out = vec![0.0; self.len()];
        self.expand_into(x, &mut out);
        Ok(out)
    }

    /// Writes the features of `x` into `out`. Both lengths must already match.
    pub fn expand_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.len());
        let powers = self.powers(x);
        for (o, alpha) in out.iter_mut().zip(&self.terms) {
            *o = alpha
                .iter()
                .enumerate()
                .fold(1.0, |acc, (k, &e)| acc * powers[k][e as usize]);
        }
    }

    /// Jacobian of the feature map: entry `(j, k)` is `d term_j / d x_k`.
    pub fn gradient(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(x.len())?;
        let powers = self.powers(x);
        let mut jac = DMatrix::zeros(self.len(), self.dim);
        for (j, alpha) in self.terms.iter().enumerate() {
            for k in 0..self.dim {
                if alpha[k] == 0 {
                    continue;
                }
                let mut v = alpha[k] as f64 * powers[k][alpha[k] as usize - 1];
                for (q, &e) in alpha.iter().enumerate() {
                    if q != k {
                        v *= powers[q][e as usize];
                    }
                }
                jac[(j, k)] = v;
            }
        }
        Ok(jac)
    }

    /// Stacks [`BasisSpec::expand`] over the rows of `x` (n x d).
    pub fn build_design(&self, x: &DMatrix<f64>) -> Result<DesignMatrix> {
        self.check_dim(x.ncols())?;
        if x.nrows() == 0 {
            return Err(Error::EmptyData);
        }
        let mut values = DMatrix::zeros(x.nrows(), self.len());
        let mut row = vec![0.0; self.len()];
        let mut xi = vec![0.0; self.dim];
        for i in 0..x.nrows() {
            for k in 0..self.dim {
                xi[k] = x[(i, k)];
            }
            self.expand_into(&xi, &mut row);
            for (j, &v) in row.iter().enumerate() {
                values[(i, j)] = v;
            }
        }
        Ok(DesignMatrix {
            values,
            basis: self.clone(),
        })
    }

    /// Rewrites coefficients of a polynomial in `v` as coefficients of the
    /// same polynomial in `w`, where `v_k = offset_k + slope_k * w_k`.
    pub fn substitute_affine(&self, beta: &[f64], offset: &[f64], slope: &[f64]) -> Result<Vec<f64>> {
        if beta.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: beta.len(),
            });
        }
        self.check_dim(offset.len())?;
        self.check_dim(slope.len())?;
        let index: HashMap<&[u32], usize> = self
            .terms
            .iter()
            .enumerate()
            .map(|(j, t)| (t.as_slice(), j))
            .collect();
        let mut out = vec![0.0; self.len()];
        let mut sub = vec![0u32; self.dim];
        for (alpha, &b) in self.terms.iter().zip(beta) {
            if b == 0.0 {
                continue;
            }
            // Enumerate every sub-multi-index j <= alpha.
            sub.iter_mut().for_each(|s| *s = 0);
            loop {
                let mut coef = b;
                for k in 0..self.dim {
                    let (a, j) = (alpha[k], sub[k]);
                    coef *= binomial(a as u64, j as u64) as f64
                        * offset[k].powi((a - j) as i32)
                        * slope[k].powi(j as i32);
                }
                out[index[sub.as_slice()]] += coef;
                // odometer increment
                let mut k = 0;
                while k < self.dim {
                    if sub[k] < alpha[k] {
                        sub[k] += 1;
                        break;
                    }
                    sub[k] = 0;
                    k += 1;
                }
                if k == self.dim {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn powers(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|&v| {
                let mut p = Vec::with_capacity(self.degree as usize + 1);
                p.push(1.0);
                for e in 1..=self.degree as usize {
                    p.push(p[e - 1] * v);
                }
                p
            })
            .collect()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

fn push_exponents(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, k: usize, remaining: u32) {
    if k + 1 == current.len() {
        current[k] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[k] = e;
        push_exponents(out, current, k + 1, remaining - e);
    }
    current[k] = 0;
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The n x p matrix of feature rows.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    values: DMatrix<f64>,
    basis: BasisSpec,
}

impl DesignMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}
