//! Zero-level sets of fitted response surfaces on 2-D slices, and Monte Carlo
//! confidence bands around them.
//!
//! A grid point `x` is in the band when at least a `1 - alpha` fraction of the
//! posterior draws satisfy `|y_i(x) / sigma_y(x)| <= eps`, where
//! `sigma_y(x) = sqrt(sigma2_hat p(x)^T (P^T P)^-1 p(x))`. The unstandardized
//! variant `|y_i(x)| < eps` is available as [`BandMode::Raw`].

mod contour;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes_lm::{FittedModel, SigmaMode};
use crate::dataset::ScaledDomain;
use crate::error::{Error, Result};
use crate::optimizer::{Objective, Surrogate};
use crate::polybasis::BasisSpec;

pub use contour::march_zero;

/// Minimum grid points per axis.
pub const MIN_RESOLUTION: usize = 16;
pub const DEFAULT_RESOLUTION: usize = 201;

/// Dense `nx x ny` field; `get(i, j)` is point `i` along the first free
/// dimension and `j` along the second.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            values: vec![0.0; nx * ny],
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.nx + i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    fn from_fn_par(nx: usize, ny: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let mut values = vec![0.0; nx * ny];
        values
            .par_chunks_mut(nx)
            .enumerate()
            .for_each(|(j, row)| {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = f(i, j);
                }
            });
        Self { nx, ny, values }
    }
}

/// A 2-D slice of the input box: two free dimensions swept over their full
/// ranges, every other dimension held at a fixed physical value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub free_dims: (usize, usize),
    /// Physical values of the non-free dimensions, in increasing index order.
    pub fixed_values: Vec<f64>,
    pub resolution: (usize, usize),
}

impl SliceSpec {
    pub fn new(
        domain: &ScaledDomain,
        free_dims: (usize, usize),
        fixed_values: Vec<f64>,
        resolution: (usize, usize),
    ) -> Result<Self> {
        let s = Self {
            free_dims,
            fixed_values,
            resolution,
        };
        s.validate(domain)?;
        Ok(s)
    }

    /// Slice over dims `(a, b)` with the other dims taken from `point`.
    pub fn through_point(
        domain: &ScaledDomain,
        free_dims: (usize, usize),
        point: &[f64],
        resolution: (usize, usize),
    ) -> Result<Self> {
        if point.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: point.len(),
            });
        }
        let fixed = (0..domain.dim())
            .filter(|&k| k != free_dims.0 && k != free_dims.1)
            .map(|k| point[k])
            .collect();
        Self::new(domain, free_dims, fixed, resolution)
    }

    pub fn validate(&self, domain: &ScaledDomain) -> Result<()> {
        let d = domain.dim();
        let (a, b) = self.free_dims;
        if d < 2 {
            return Err(Error::InvalidArgument("slices need at least two input dimensions".into()));
        }
        if a == b || a >= d || b >= d {
            return Err(Error::InvalidArgument(format!(
                "free dimensions ({a}, {b}) must be distinct and below {d}"
            )));
        }
        if self.fixed_values.len() != d - 2 {
            return Err(Error::InvalidArgument(format!(
                "expected {} fixed values, got {}",
                d - 2,
                self.fixed_values.len()
            )));
        }
        for (k, v) in self.fixed_dims().into_iter().zip(&self.fixed_values) {
            let s = &domain.specs()[k];
            if !s.contains(*v) {
                return Err(Error::InvalidArgument(format!(
                    "fixed value {v} of `{}` lies outside [{}, {}]",
                    s.name, s.lower, s.upper
                )));
            }
        }
        if self.resolution.0 < MIN_RESOLUTION || self.resolution.1 < MIN_RESOLUTION {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be at least {MIN_RESOLUTION} per axis"
            )));
        }
        Ok(())
    }

    pub fn fixed_dims(&self) -> Vec<usize> {
        let d = self.fixed_values.len() + 2;
        (0..d)
            .filter(|&k| k != self.free_dims.0 && k != self.free_dims.1)
            .collect()
    }

    /// Coded coordinate of grid index `i` along an axis with `n` points.
    pub fn axis_coded(i: usize, n: usize) -> f64 {
        if i + 1 == n {
            1.0
        } else {
            -1.0 + 2.0 * i as f64 / (n - 1) as f64
        }
    }

    /// Full coded input vector at grid point `(i, j)`.
    pub fn coded_point(&self, domain: &ScaledDomain, i: usize, j: usize) -> Vec<f64> {
        let d = domain.dim();
        let mut x = vec![0.0; d];
        for (k, v) in self.fixed_dims().into_iter().zip(&self.fixed_values) {
            x[k] = domain.coded_value(k, *v);
        }
        x[self.free_dims.0] = Self::axis_coded(i, self.resolution.0);
        x[self.free_dims.1] = Self::axis_coded(j, self.resolution.1);
        x
    }

    /// Physical coordinates on the slice plane of fractional grid index `(fi, fj)`.
    pub fn plane_point(&self, domain: &ScaledDomain, fi: f64, fj: f64) -> (f64, f64) {
        let ua = -1.0 + 2.0 * fi / (self.resolution.0 - 1) as f64;
        let ub = -1.0 + 2.0 * fj / (self.resolution.1 - 1) as f64;
        (
            domain.physical_value(self.free_dims.0, ua),
            domain.physical_value(self.free_dims.1, ub),
        )
    }
}

/// Posterior mean surface and prediction standard deviation over a slice.
pub fn eval_slice(model: &FittedModel, l: usize, slice: &SliceSpec) -> Result<(Grid, Grid)> {
    slice.validate(model.domain())?;
    let out = model.output(l)?;
    let basis = model.basis();
    let domain = model.domain();
    let (nx, ny) = slice.resolution;
    let eval = |i: usize, j: usize| {
        let x = slice.coded_point(domain, i, j);
        let f = basis.expand(&x).expect("slice point has model dimension");
        let mean: f64 = f.iter().zip(out.beta_hat.iter()).map(|(a, b)| a * b).sum();
        let sd = (out.sigma2_hat * model.leverage(&f)).sqrt();
        (mean, sd)
    };
    let mean = Grid::from_fn_par(nx, ny, |i, j| eval(i, j).0);
    let sd = Grid::from_fn_par(nx, ny, |i, j| eval(i, j).1);
    Ok((mean, sd))
}

/// Evaluates a polynomial with physical-unit coefficients over the slice.
pub fn eval_slice_physical(
    basis: &BasisSpec,
    coefficients: &[f64],
    domain: &ScaledDomain,
    slice: &SliceSpec,
) -> Result<Grid> {
    slice.validate(domain)?;
    if coefficients.len() != basis.len() || basis.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: coefficients.len(),
        });
    }
    let (nx, ny) = slice.resolution;
    Ok(Grid::from_fn_par(nx, ny, |i, j| {
        let x = domain
            .from_coded(&slice.coded_point(domain, i, j))
            .expect("dimension checked");
        let f = basis.expand(&x).expect("dimension checked");
        f.iter().zip(coefficients).map(|(a, b)| a * b).sum()
    }))
}

/// The objective `G` under the point estimates, over the slice.
pub fn objective_slice(model: &FittedModel, obj: &Objective, slice: &SliceSpec) -> Result<Grid> {
    slice.validate(model.domain())?;
    let betas = model.beta_hat_matrix();
    let problem = Surrogate::new(model.basis(), &betas, obj)?;
    let (nx, ny) = slice.resolution;
    Ok(Grid::from_fn_par(nx, ny, |i, j| {
        problem
            .value(&slice.coded_point(model.domain(), i, j))
            .expect("dimension checked")
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourSource {
    Mean,
    Draw(u64),
    Truth,
    BandEdge,
}

/// Polylines (physical units on the slice plane) of one level set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSet {
    pub level: f64,
    pub source: ContourSource,
    pub polylines: Vec<Vec<(f64, f64)>>,
}

impl ContourSet {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }
}

/// Zero-level set of a grid surface via marching squares.
pub fn zero_contour(surface: &Grid, slice: &SliceSpec, domain: &ScaledDomain, source: ContourSource) -> ContourSet {
    let polylines = march_zero(surface)
        .into_iter()
        .map(|line| {
            line.into_iter()
                .map(|(fi, fj)| slice.plane_point(domain, fi, fj))
                .collect()
        })
        .collect();
    ContourSet {
        level: 0.0,
        source,
        polylines,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Positive,
    Negative,
    NearZero,
}

/// Sign label of every grid value; `NearZero` when within `1e-12` of the
/// surface's largest magnitude.
pub fn sign_regions(surface: &Grid) -> Vec<Region> {
    let tol = 1e-12 * surface.max_abs();
    surface
        .values()
        .iter()
        .map(|&v| {
            if v.abs() <= tol {
                Region::NearZero
            } else if v > 0.0 {
                Region::Positive
            } else {
                Region::Negative
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandMode {
    /// `|y_i(x) / sigma_y(x)| <= eps`.
    #[default]
    Standardized,
    /// `|y_i(x)| < eps`, in response units.
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandSettings {
    pub alpha: f64,
    pub draws: usize,
    pub seed: u64,
    pub mode: BandMode,
    pub sigma_mode: SigmaMode,
    /// Number of posterior draws whose zero contours are returned.
    pub draw_contours: usize,
}

impl Default for BandSettings {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            draws: 1000,
            seed: 0,
            mode: BandMode::Standardized,
            sigma_mode: SigmaMode::Map,
            draw_contours: 20,
        }
    }
}

/// Posterior draws of one output, ready for pointwise coverage queries.
pub struct BandEvaluator<'a> {
    model: &'a FittedModel,
    l: usize,
    sigma2: f64,
    /// `R x p`, row-major.
    draws: Vec<f64>,
    r: usize,
    mode: BandMode,
}

impl<'a> BandEvaluator<'a> {
    pub fn new(model: &'a FittedModel, l: usize, settings: &BandSettings) -> Result<Self> {
        let out = model.output(l)?;
        if settings.mode == BandMode::Standardized && !(out.sigma2_hat > 0.0) {
            return Err(Error::DegeneratePosterior(out.name.clone()));
        }
        if !(settings.alpha > 0.0 && settings.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} must lie in (0, 1)",
                settings.alpha
            )));
        }
        if settings.draws < 100 {
            log::warn!(
                "only {} posterior draws: coverage resolution is coarser than 1%",
                settings.draws
            );
        }
        let draws = model.sample_posterior(settings.draws, settings.seed, settings.sigma_mode)?;
        let p = model.p();
        let mut flat = Vec::with_capacity(draws.len() * p);
        for d in &draws {
            flat.extend(d.betas.row(l).iter());
        }
        Ok(Self {
            model,
            l,
            sigma2: out.sigma2_hat,
            draws: flat,
            r: draws.len(),
            mode: settings.mode,
        })
    }

    pub fn draws(&self) -> usize {
        self.r
    }

    pub fn draw_coefficients(&self, i: usize) -> &[f64] {
        let p = self.model.p();
        &self.draws[i * p..(i + 1) * p]
    }

    /// Per-draw statistic at a coded point: `|y_i / sigma_y|` or `|y_i|`.
    pub fn statistics(&self, x_coded: &[f64]) -> Result<Vec<f64>> {
        let f = self.model.basis().expand(x_coded)?;
        Ok(self.statistics_for_features(&f))
    }

    fn statistics_for_features(&self, f: &[f64]) -> Vec<f64> {
        let p = f.len();
        let scale = match self.mode {
            BandMode::Standardized => (self.sigma2 * self.model.leverage(f)).sqrt(),
            BandMode::Raw => 1.0,
        };
        self.draws
            .chunks_exact(p)
            .map(|b| {
                let y: f64 = b.iter().zip(f).map(|(a, c)| a * c).sum();
                if scale > 0.0 {
                    (y / scale).abs()
                } else if y == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }

    fn inside(&self, t: f64, eps: f64) -> bool {
        match self.mode {
            BandMode::Standardized => t <= eps,
            BandMode::Raw => t < eps,
        }
    }

    /// Fraction of draws inside the tolerance, for each `eps`.
    pub fn coverage(&self, x_coded: &[f64], epsilons: &[f64]) -> Result<Vec<f64>> {
        let t = self.statistics(x_coded)?;
        Ok(self.coverage_of(&t, epsilons))
    }

    fn coverage_of(&self, t: &[f64], epsilons: &[f64]) -> Vec<f64> {
        epsilons
            .iter()
            .map(|&e| t.iter().filter(|&&v| self.inside(v, e)).count() as f64 / self.r as f64)
            .collect()
    }

    pub fn output_index(&self) -> usize {
        self.l
    }
}

/// Band over one slice at one tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct BandGrid {
    pub slice: SliceSpec,
    pub output: String,
    pub mean_surface: Grid,
    pub sd_surface: Grid,
    pub coverage_fraction: Grid,
    pub band_mask: Vec<bool>,
    pub alpha: f64,
    pub epsilon: f64,
    pub draws: usize,
    pub seed: u64,
    pub mode: BandMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandMetadata {
    pub output: String,
    pub alpha: f64,
    pub epsilon: f64,
    pub draws: usize,
    pub seed: u64,
    pub mode: BandMode,
    pub slice: SliceSpec,
    pub free_names: (String, String),
    pub band_cells: usize,
    pub total_cells: usize,
}

impl BandGrid {
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        self.band_mask[j * self.slice.resolution.0 + i]
    }

    pub fn band_cells(&self) -> usize {
        self.band_mask.iter().filter(|b| **b).count()
    }

    pub fn metadata(&self, domain: &ScaledDomain) -> BandMetadata {
        let specs = domain.specs();
        BandMetadata {
            output: self.output.clone(),
            alpha: self.alpha,
            epsilon: self.epsilon,
            draws: self.draws,
            seed: self.seed,
            mode: self.mode,
            slice: self.slice.clone(),
            free_names: (
                specs[self.slice.free_dims.0].name.clone(),
                specs[self.slice.free_dims.1].name.clone(),
            ),
            band_cells: self.band_cells(),
            total_cells: self.band_mask.len(),
        }
    }

    /// CSV with columns `x1_phys, x2_phys, mean, sd, coverage, in_band`.
    pub fn write_csv<W: Write>(&self, domain: &ScaledDomain, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let specs = domain.specs();
        w.write_record([
            specs[self.slice.free_dims.0].name.as_str(),
            specs[self.slice.free_dims.1].name.as_str(),
            "mean",
            "sd",
            "coverage",
            "in_band",
        ])?;
        let (nx, ny) = self.slice.resolution;
        for i in 0..nx {
            for j in 0..ny {
                let (a, b) = self.slice.plane_point(domain, i as f64, j as f64);
                w.write_record([
                    format!("{a}"),
                    format!("{b}"),
                    format!("{}", self.mean_surface.get(i, j)),
                    format!("{}", self.sd_surface.get(i, j)),
                    format!("{}", self.coverage_fraction.get(i, j)),
                    (self.in_band(i, j) as u8).to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn save_csv(&self, domain: &ScaledDomain, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(domain, std::io::BufWriter::new(file))
    }

    /// Outline of the band region (midway between in-band and out-of-band cells).
    pub fn band_outline(&self, domain: &ScaledDomain) -> ContourSet {
        let (nx, ny) = self.slice.resolution;
        let mut g = Grid::zeros(nx, ny);
        for j in 0..ny {
            for i in 0..nx {
                g.set(i, j, if self.in_band(i, j) { 1.0 } else { -1.0 });
            }
        }
        zero_contour(&g, &self.slice, domain, ContourSource::BandEdge)
    }
}

/// A band plus the contours drawn with it.
#[derive(Clone, Debug, PartialEq)]
pub struct BandBundle {
    pub grid: BandGrid,
    pub mean_contour: ContourSet,
    pub draw_contours: Vec<ContourSet>,
}

/// Bands for several tolerances computed from one shared set of posterior draws.
pub fn confidence_bands(
    model: &FittedModel,
    l: usize,
    slice: &SliceSpec,
    epsilons: &[f64],
    settings: &BandSettings,
) -> Result<Vec<BandBundle>> {
    slice.validate(model.domain())?;
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let eval = BandEvaluator::new(model, l, settings)?;
    let domain = model.domain();
    let (mean, sd) = eval_slice(model, l, slice)?;
    let (nx, ny) = slice.resolution;
    let ne = epsilons.len();

    // per row: nx * ne coverage values
    let mut cov = vec![0.0; nx * ny * ne];
    cov.par_chunks_mut(nx * ne).enumerate().for_each(|(j, row)| {
        for i in 0..nx {
            let x = slice.coded_point(domain, i, j);
            let f = model.basis().expand(&x).expect("slice point has model dimension");
            let t = eval.statistics_for_features(&f);
            let c = eval.coverage_of(&t, epsilons);
            row[i * ne..(i + 1) * ne].copy_from_slice(&c);
        }
    });

    let output = model.output(l)?.name.clone();
    let mean_contour = zero_contour(&mean, slice, domain, ContourSource::Mean);
    let k = settings.draw_contours.min(eval.draws());
    let draw_contours: Vec<ContourSet> = (0..k)
        .into_par_iter()
        .map(|i| {
            let beta = eval.draw_coefficients(i);
            let g = Grid::from_fn_par(nx, ny, |a, b| {
                let f = model
                    .basis()
                    .expand(&slice.coded_point(domain, a, b))
                    .expect("slice point has model dimension");
                f.iter().zip(beta).map(|(x, y)| x * y).sum()
            });
            zero_contour(&g, slice, domain, ContourSource::Draw(i as u64))
        })
        .collect();

    let threshold = 1.0 - settings.alpha;
    Ok(epsilons
        .iter()
        .enumerate()
        .map(|(e, &epsilon)| {
            let mut coverage = Grid::zeros(nx, ny);
            for j in 0..ny {
                for i in 0..nx {
                    coverage.set(i, j, cov[(j * nx + i) * ne + e]);
                }
            }
            let band_mask = coverage.values().iter().map(|&c| c >= threshold).collect();
            BandBundle {
                grid: BandGrid {
                    slice: slice.clone(),
                    output: output.clone(),
                    mean_surface: mean.clone(),
                    sd_surface: sd.clone(),
                    coverage_fraction: coverage,
                    band_mask,
                    alpha: settings.alpha,
                    epsilon,
                    draws: settings.draws,
                    seed: settings.seed,
                    mode: settings.mode,
                },
                mean_contour: mean_contour.clone(),
                draw_contours: draw_contours.clone(),
            }
        })
        .collect())
}

pub fn confidence_band(
    model: &FittedModel,
    l: usize,
    slice: &SliceSpec,
    epsilon: f64,
    settings: &BandSettings,
) -> Result<BandBundle> {
    Ok(confidence_bands(model, l, slice, &[epsilon], settings)?.remove(0))
}

pub fn write_contours_json(contours: &[&ContourSet], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(contours)? + "\n";
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
