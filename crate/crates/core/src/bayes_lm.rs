//! Per-output least squares fits and their Gaussian coefficient posterior.
//!
//! Under a flat prior on the coefficients and a Jeffreys prior on the noise
//! variance, the conditional posterior of each output's coefficients is
//! `MVN(beta_hat, sigma^2 (P^T P)^-1)` and the MAP noise variance is
//! `RSS / (n - p)`. Outputs are fitted independently; they share the design
//! matrix and therefore the `(P^T P)^-1` factor.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, ScaledDomain};
use crate::error::{Error, Result};
use crate::polybasis::BasisSpec;
use crate::rng::{self, Purpose};

/// Smallest admissible singular value ratio of the design matrix.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FittedOutput {
    pub name: String,
    pub beta_hat: DVector<f64>,
    pub sigma2_hat: f64,
    pub residual_ss: f64,
    pub total_ss: f64,
    pub r2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    basis: BasisSpec,
    domain: ScaledDomain,
    outputs: Vec<FittedOutput>,
    /// Lower-triangular `L` with `L L^T = (P^T P)^-1`.
    xtx_inv_factor: DMatrix<f64>,
    n: usize,
}

/// How the noise variance enters posterior sampling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SigmaMode {
    /// Fixed at the MAP estimate.
    #[default]
    Map,
    /// Drawn from `Inv-Gamma(n/2, RSS/2)` before each coefficient draw.
    Hierarchical,
}

/// One joint draw of all outputs' coefficient vectors (row `l` is output `l`).
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorDraw {
    pub index: u64,
    pub seed: u64,
    pub betas: DMatrix<f64>,
}

impl FittedModel {
    /// Fits every output of a coded dataset. `domain` is the physical box the
    /// coded inputs came from and is stored for reporting.
    pub fn fit(coded: &Dataset, domain: &ScaledDomain, basis: &BasisSpec) -> Result<Self> {
        let n = coded.n();
        let p = basis.len();
        if domain.dim() != coded.d() {
            return Err(Error::DimensionMismatch {
                expected: coded.d(),
                found: domain.dim(),
            });
        }
        if n <= p {
            return Err(Error::UnderDetermined { n, p });
        }
        let design = basis.build_design(coded.inputs())?;
        let pm = design.values();
        check_rank(pm, basis, coded.input_specs().iter().map(|s| s.name.clone()).collect())?;

        let qr = pm.clone().qr();
        let q = qr.q();
        let r = qr.r();
        let qty = q.transpose() * coded.outputs();
        let betas = r
            .solve_upper_triangular(&qty)
            .ok_or_else(|| Error::Factorization("triangular solve for coefficients".into()))?;

        let r_inv = r
            .solve_upper_triangular(&DMatrix::identity(p, p))
            .ok_or_else(|| Error::Factorization("inverting the R factor".into()))?;
        let mut xtx_inv = &r_inv * r_inv.transpose();
        xtx_inv = (&xtx_inv + xtx_inv.transpose()) * 0.5;
        let chol = xtx_inv
            .cholesky()
            .ok_or_else(|| Error::Factorization("(P^T P)^-1 is not positive definite".into()))?;
        let xtx_inv_factor = chol.l();

        let fitted = pm * &betas;
        let outputs = coded
            .output_names()
            .iter()
            .enumerate()
            .map(|(l, name)| {
                let y = coded.outputs().column(l);
                let mut residual_ss = (y - fitted.column(l)).norm_squared();
                // residuals at rounding level mean the data are interpolated exactly
                let y_max = y.amax();
                if residual_ss <= (64.0 * f64::EPSILON * y_max).powi(2) * n as f64 {
                    residual_ss = 0.0;
                }
                let mean = y.mean();
                let total_ss = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
                let r2 = if total_ss > 0.0 {
                    1.0 - residual_ss / total_ss
                } else {
                    1.0
                };
                FittedOutput {
                    name: name.clone(),
                    beta_hat: betas.column(l).into_owned(),
                    sigma2_hat: residual_ss / (n - p) as f64,
                    residual_ss,
                    total_ss,
                    r2,
                }
            })
            .collect();
        Ok(Self {
            basis: basis.clone(),
            domain: domain.clone(),
            outputs,
            xtx_inv_factor,
            n,
        })
    }

    /// Codes a physical dataset and fits it with the full basis of `degree`.
    pub fn fit_physical(ds: &Dataset, degree: u32) -> Result<Self> {
        let basis = BasisSpec::new(ds.d(), degree)?;
        let (coded, domain) = ds.to_coded();
        Self::fit(&coded, &domain, &basis)
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn domain(&self) -> &ScaledDomain {
        &self.domain
    }

    pub fn outputs(&self) -> &[FittedOutput] {
        &self.outputs
    }

    pub fn output(&self, l: usize) -> Result<&FittedOutput> {
        self.outputs.get(l).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "output index {l} out of range (model has {} outputs)",
                self.outputs.len()
            ))
        })
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|o| o.name == name)
    }

    pub fn output_names(&self) -> Vec<String> {
        self.outputs.iter().map(|o| o.name.clone()).collect()
    }

    pub fn xtx_inv_factor(&self) -> &DMatrix<f64> {
        &self.xtx_inv_factor
    }

    /// Reconstructed `(P^T P)^-1`.
    pub fn xtx_inv(&self) -> DMatrix<f64> {
        &self.xtx_inv_factor * self.xtx_inv_factor.transpose()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.basis.len()
    }

    pub fn d(&self) -> usize {
        self.basis.dim()
    }

    pub fn m(&self) -> usize {
        self.outputs.len()
    }

    /// `m x p` matrix of point estimates.
    pub fn beta_hat_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m(), self.p(), |l, j| self.outputs[l].beta_hat[j])
    }

    /// `p(x)^T beta_hat_l` at a coded point.
    pub fn predict_mean(&self, x_coded: &[f64], l: usize) -> Result<f64> {
        let out = self.output(l)?;
        let feats = self.features(x_coded)?;
        Ok(dot(&feats, out.beta_hat.as_slice()))
    }

    /// `sqrt(sigma2_hat * p(x)^T (P^T P)^-1 p(x))` at a coded point.
    pub fn predict_sd(&self, x_coded: &[f64], l: usize) -> Result<f64> {
        let out = self.output(l)?;
        let feats = self.features(x_coded)?;
        Ok((out.sigma2_hat * self.leverage(&feats)).sqrt())
    }

    /// `p^T (P^T P)^-1 p` for a precomputed feature vector.
    pub fn leverage(&self, feats: &[f64]) -> f64 {
        let l = &self.xtx_inv_factor;
        let p = feats.len();
        let mut acc = 0.0;
        // (L^T f)_j = sum_{i >= j} L_ij f_i
        for j in 0..p {
            let mut s = 0.0;
            for i in j..p {
                s += l[(i, j)] * feats[i];
            }
            acc += s * s;
        }
        acc
    }

    pub fn predict_mean_physical(&self, x: &[f64], l: usize) -> Result<f64> {
        self.predict_mean(&self.domain.to_coded(x)?, l)
    }

    /// Coefficients of output `l` rewritten in physical input units.
    pub fn physical_coefficients(&self, l: usize) -> Result<Vec<f64>> {
        let out = self.output(l)?;
        let h = self.domain.half_widths();
        let c = self.domain.centers();
        let offset: Vec<f64> = c.iter().zip(&h).map(|(c, h)| -c / h).collect();
        let slope: Vec<f64> = h.iter().map(|h| 1.0 / h).collect();
        self.basis
            .substitute_affine(out.beta_hat.as_slice(), &offset, &slope)
    }

    fn features(&self, x_coded: &[f64]) -> Result<Vec<f64>> {
        if x_coded.iter().any(|v| v.abs() > 1.0 + 1e-9) {
            log::warn!("prediction requested outside the coded box: {x_coded:?}");
        }
        self.basis.expand(x_coded)
    }

    /// Posterior sampler for this model.
    pub fn sampler(&self, seed: u64, mode: SigmaMode) -> PosteriorSampler<'_> {
        PosteriorSampler {
            model: self,
            seed,
            mode,
        }
    }

    /// `R` independent posterior draws. Draw `i` depends only on `(seed, i)`.
    pub fn sample_posterior(&self, r: usize, seed: u64, mode: SigmaMode) -> Result<Vec<PosteriorDraw>> {
        if r == 0 {
            return Err(Error::InvalidArgument("number of draws must be >= 1".into()));
        }
        let sampler = self.sampler(seed, mode);
        Ok((0..r as u64).into_par_iter().map(|i| sampler.draw(i)).collect())
    }

    /// Rebuilds a model from its parts, validating shapes.
    pub fn from_parts(
        basis: BasisSpec,
        domain: ScaledDomain,
        outputs: Vec<FittedOutput>,
        xtx_inv_factor: DMatrix<f64>,
        n: usize,
    ) -> Result<Self> {
        let p = basis.len();
        domain.validate()?;
        if domain.dim() != basis.dim() {
            return Err(Error::ModelFormat(format!(
                "domain has {} variables but basis has dimension {}",
                domain.dim(),
                basis.dim()
            )));
        }
        if outputs.is_empty() {
            return Err(Error::ModelFormat("model has no outputs".into()));
        }
        if xtx_inv_factor.shape() != (p, p) {
            return Err(Error::ModelFormat("inverse factor has wrong shape".into()));
        }
        for o in &outputs {
            if o.beta_hat.len() != p {
                return Err(Error::ModelFormat(format!(
                    "output `{}` has {} coefficients, expected {p}",
                    o.name,
                    o.beta_hat.len()
                )));
            }
            if !(o.sigma2_hat >= 0.0) {
                return Err(Error::ModelFormat(format!(
                    "output `{}` has invalid sigma2 {}",
                    o.name, o.sigma2_hat
                )));
            }
        }
        Ok(Self {
            basis,
            domain,
            outputs,
            xtx_inv_factor,
            n,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from(self))? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        file.into_model()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub struct PosteriorSampler<'a> {
    model: &'a FittedModel,
    seed: u64,
    mode: SigmaMode,
}

impl PosteriorSampler<'_> {
    pub fn draw(&self, index: u64) -> PosteriorDraw {
        let model = self.model;
        let p = model.p();
        let mut rng = rng::stream(self.seed, Purpose::Posterior, index);
        let mut betas = DMatrix::zeros(model.m(), p);
        let l_factor = &model.xtx_inv_factor;
        let half_n = model.n as f64 / 2.0;
        for (l, out) in model.outputs.iter().enumerate() {
            let sigma2 = match self.mode {
                SigmaMode::Map => out.sigma2_hat,
                SigmaMode::Hierarchical => {
                    if out.residual_ss > 0.0 {
                        let g: f64 = Gamma::new(half_n, 1.0)
                            .expect("shape n/2 is positive")
                            .sample(&mut rng);
                        out.residual_ss / 2.0 / g
                    } else {
                        0.0
                    }
                }
            };
            let scale = sigma2.sqrt();
            let z: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
            for i in 0..p {
                let mut s = 0.0;
                for j in 0..=i {
                    s += l_factor[(i, j)] * z[j];
                }
                betas[(l, i)] = out.beta_hat[i] + scale * s;
            }
        }
        PosteriorDraw {
            index,
            seed: self.seed,
            betas,
        }
    }
}

fn check_rank(pm: &DMatrix<f64>, basis: &BasisSpec, names: Vec<String>) -> Result<()> {
    let svd = pm.clone().svd(false, true);
    let sv = &svd.singular_values;
    let (imin, smin) = sv
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let smax = sv.max();
    if smax > 0.0 && smin >= RANK_TOLERANCE * smax {
        return Ok(());
    }
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let v = v_t.row(imin);
    let vmax = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let terms = v
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() >= 0.1 * vmax)
        .map(|(j, _)| basis.term_name(j, &names))
        .collect();
    Err(Error::RankDeficient {
        terms,
        ratio: if smax > 0.0 { smin / smax } else { 0.0 },
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An f64 written in scientific notation with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Sci(f64);

impl Serialize for Sci {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!(
                "non-finite value {} in model file",
                self.0
            )));
        }
        let text = format!("{:.16e}", self.0);
        let num: serde_json::Number = text.parse().map_err(serde::ser::Error::custom)?;
        num.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sci {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Sci)
    }
}

const MODEL_FORMAT: &str = "warpband-model";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    basis: BasisSpec,
    domain: ScaledDomain,
    n: usize,
    p: usize,
    /// Rows of the lower-triangular factor; row `i` holds `i + 1` entries.
    xtx_inv_factor: Vec<Vec<Sci>>,
    outputs: Vec<OutputFile>,
}

#[derive(Serialize, Deserialize)]
struct OutputFile {
    name: String,
    beta_hat: Vec<Sci>,
    sigma2_hat: Sci,
    residual_ss: Sci,
    total_ss: Sci,
    r2: Sci,
}

impl From<&FittedModel> for ModelFile {
    fn from(m: &FittedModel) -> Self {
        let p = m.p();
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: 1,
            basis: m.basis.clone(),
            domain: m.domain.clone(),
            n: m.n,
            p,
            xtx_inv_factor: (0..p)
                .map(|i| (0..=i).map(|j| Sci(m.xtx_inv_factor[(i, j)])).collect())
                .collect(),
            outputs: m
                .outputs
                .iter()
                .map(|o| OutputFile {
                    name: o.name.clone(),
                    beta_hat: o.beta_hat.iter().map(|&v| Sci(v)).collect(),
                    sigma2_hat: Sci(o.sigma2_hat),
                    residual_ss: Sci(o.residual_ss),
                    total_ss: Sci(o.total_ss),
                    r2: Sci(o.r2),
                })
                .collect(),
        }
    }
}

impl ModelFile {
    fn into_model(self) -> Result<FittedModel> {
        if self.format != MODEL_FORMAT {
            return Err(Error::ModelFormat(format!("unknown format `{}`", self.format)));
        }
        if self.version != 1 {
            return Err(Error::ModelFormat(format!("unsupported version {}", self.version)));
        }
        let p = self.basis.len();
        if self.p != p || self.xtx_inv_factor.len() != p {
            return Err(Error::ModelFormat("basis size mismatch".into()));
        }
        if self.n <= p {
            return Err(Error::ModelFormat(format!("n = {} must exceed p = {p}", self.n)));
        }
        let mut factor = DMatrix::zeros(p, p);
        for (i, row) in self.xtx_inv_factor.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::ModelFormat(format!(
                    "factor row {i} has {} entries, expected {}",
                    row.len(),
                    i + 1
                )));
            }
            for (j, v) in row.iter().enumerate() {
                factor[(i, j)] = v.0;
            }
        }
        let outputs = self
            .outputs
            .into_iter()
            .map(|o| FittedOutput {
                name: o.name,
                beta_hat: DVector::from_iterator(o.beta_hat.len(), o.beta_hat.iter().map(|s| s.0)),
                sigma2_hat: o.sigma2_hat.0,
                residual_ss: o.residual_ss.0,
                total_ss: o.total_ss.0,
                r2: o.r2.0,
            })
            .collect();
        FittedModel::from_parts(self.basis, self.domain, outputs, factor, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::VariableSpec;

    fn dataset(x: &[f64], y: &[f64], d: usize) -> Dataset {
        let n = y.len();
        let specs = (0..d)
            .map(|k| VariableSpec::new(format!("x{}", k + 1), -1.0, 1.0).unwrap())
            .collect();
        Dataset::new(
            DMatrix::from_row_slice(n, d, x),
            DMatrix::from_row_slice(n, 1, y),
            specs,
            vec!["y".into()],
            true,
        )
        .unwrap()
    }

    #[test]
    fn underdetermined_and_rank_errors() {
        let ds = dataset(&[0.0, 0.5, 1.0], &[1.0, 2.0, 3.0], 1);
        let basis = BasisSpec::quadratic(1);
        let (c, dom) = ds.to_coded();
        let err = FittedModel::fit(&c, &dom, &basis).unwrap_err();
        assert!(err.to_string().contains("under-determined"));
        assert_eq!(err.exit_code(), 2);

        // x2 is a copy of x1, so the x1/x2 columns are collinear.
        let x: Vec<f64> = (0..10).flat_map(|i| {
            let v = -1.0 + 0.2 * i as f64;
            [v, v]
        }).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ds = dataset(&x, &y, 2);
        let (c, dom) = ds.to_coded();
        match FittedModel::fit(&c, &dom, &BasisSpec::new(2, 1).unwrap()) {
            Err(Error::RankDeficient { terms, .. }) => {
                assert!(terms.contains(&"x1".to_string()));
                assert!(terms.contains(&"x2".to_string()));
                assert!(!terms.contains(&"1".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn replicated_row_interpolation_has_zero_sigma() {
        // p = 3, n = 4 with one replicated row of an exactly quadratic response.
        let x = [-1.0, 0.0, 1.0, 1.0];
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 2.0 * v - 0.5 * v * v).collect();
        let ds = dataset(&x, &y, 1);
        let (c, dom) = ds.to_coded();
        let m = FittedModel::fit(&c, &dom, &BasisSpec::quadratic(1)).unwrap();
        let o = &m.outputs()[0];
        assert!(o.residual_ss < 1e-28);
        assert!(o.sigma2_hat < 1e-28);
        for (xi, yi) in x.iter().zip(&y) {
            assert!((m.predict_mean(&[*xi], 0).unwrap() - yi).abs() < 1e-8);
        }
        let draws = m.sample_posterior(1, 3, SigmaMode::Map).unwrap();
        for j in 0..3 {
            assert!((draws[0].betas[(0, j)] - o.beta_hat[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_zero_sigma_draw_equals_beta_hat() {
        let x = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let y = [3.0; 5];
        let ds = dataset(&x, &y, 1);
        let (c, dom) = ds.to_coded();
        let m = FittedModel::fit(&c, &dom, &BasisSpec::new(1, 1).unwrap()).unwrap();
        let mut m = m;
        m.outputs[0].sigma2_hat = 0.0;
        let d = m.sampler(1, SigmaMode::Map).draw(0);
        assert_eq!(d.betas.row(0).iter().copied().collect::<Vec<_>>(), m.outputs[0].beta_hat.iter().copied().collect::<Vec<_>>());
        assert_eq!(m.predict_sd(&[0.3], 0).unwrap(), 0.0);
    }

    #[test]
    fn intercept_only_predicts_mean() {
        let x = [-1.0, -0.2, 0.4, 0.9];
        let y = [1.0, 2.0, 4.0, 9.0];
        let ds = dataset(&x, &y, 1);
        let (c, dom) = ds.to_coded();
        let m = FittedModel::fit(&c, &dom, &BasisSpec::new(1, 0).unwrap()).unwrap();
        for x in [-1.0, 0.0, 0.7] {
            assert!((m.predict_mean(&[x], 0).unwrap() - 4.0).abs() < 1e-12);
        }
        assert!(m.output(1).is_err());
        assert!(m.predict_mean(&[0.0], 1).is_err());
    }

    #[test]
    fn map_identity_and_orthogonality() {
        let x: Vec<f64> = (0..30).map(|i| -1.0 + 2.0 * i as f64 / 29.0).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 0.5 - v + 2.0 * v * v + 0.1 * ((i * 7919 % 13) as f64 - 6.0))
            .collect();
        let ds = dataset(&x, &y, 1);
        let (c, dom) = ds.to_coded();
        let basis = BasisSpec::quadratic(1);
        let m = FittedModel::fit(&c, &dom, &basis).unwrap();
        let o = &m.outputs()[0];
        assert!((o.sigma2_hat * 27.0 - o.residual_ss).abs() <= 1e-12 * o.residual_ss);
        assert!(o.r2 > 0.0 && o.r2 <= 1.0);
        assert!((o.r2 - (1.0 - o.residual_ss / o.total_ss)).abs() < 1e-15);

        let p = basis.build_design(c.inputs()).unwrap();
        let yv = c.outputs().column(0).into_owned();
        let resid = &yv - p.values() * &o.beta_hat;
        let ortho = p.values().transpose() * resid;
        let pty = (p.values().transpose() * &yv).norm();
        assert!(ortho.norm() <= 1e-8 * pty);

        let xtx = p.values().transpose() * p.values();
        let ident = xtx * m.xtx_inv();
        assert!((ident - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-8);
    }

    #[test]
    fn hierarchical_mode_differs_but_is_reproducible() {
        let x: Vec<f64> = (0..12).map(|i| -1.0 + 2.0 * i as f64 / 11.0).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v + if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        let ds = dataset(&x, &y, 1);
        let (c, dom) = ds.to_coded();
        let m = FittedModel::fit(&c, &dom, &BasisSpec::new(1, 1).unwrap()).unwrap();
        let a = m.sampler(5, SigmaMode::Hierarchical).draw(2);
        let b = m.sampler(5, SigmaMode::Hierarchical).draw(2);
        let c = m.sampler(5, SigmaMode::Map).draw(2);
        assert_eq!(a, b);
        assert_ne!(a.betas, c.betas);
    }

    #[test]
    fn sci_formatting() {
        let text = serde_json::to_string(&vec![Sci(0.1), Sci(-82.17), Sci(0.0)]).unwrap();
        assert_eq!(
            text,
            "[1.0000000000000001e-1,-8.2170000000000002e+1,0.0000000000000000e+0]"
        );
        assert!(serde_json::to_string(&Sci(f64::NAN)).is_err());
    }
}
