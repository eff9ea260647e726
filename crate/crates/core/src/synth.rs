//! Synthetic datasets with known ground truth.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Schema, VariableSpec};
use crate::designgen::LhsDesign;
use crate::error::{Error, Result};
use crate::polybasis::BasisSpec;
use crate::rng::{self, Purpose};

/// Coefficients of the two-input benchmark quadratic in canonical basis order
/// `[1, x1, x2, x1^2, x1 x2, x2^2]`.
pub const EXAMPLE2_COEFFICIENTS: [f64; 6] = [-82.17, -2.01, -1.61, 2.4, -1.2, 3.76];

/// Cure-cycle stand-in: deformation `0.02 + 4e-4 (T - 134)^2` over `[125, 145]`.
pub const CURE_RANGE: (f64, f64) = (125.0, 145.0);
pub const CURE_COEFFICIENTS: [f64; 3] = [0.02 + 4e-4 * 134.0 * 134.0, -2.0 * 4e-4 * 134.0, 4e-4];
pub const CURE_NOISE_VARIANCE: f64 = 4e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sigma2", rename_all = "snake_case")]
pub enum NoiseMode {
    /// One `sigma^2 ~ Gamma(shape 2, rate 1)` per dataset.
    #[default]
    Benchmark,
    /// A fresh `sigma^2 ~ Gamma(2, 1)` for every observation.
    PerObservation,
    None,
    Fixed(f64),
}

impl FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "benchmark" => Ok(Self::Benchmark),
            "per-observation" => Ok(Self::PerObservation),
            "none" => Ok(Self::None),
            _ => {
                let v = s
                    .strip_prefix("fixed:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "noise `{s}`: expected benchmark, per-observation, none or fixed:<variance>"
                        ))
                    })?;
                Ok(Self::Fixed(v))
            }
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Benchmark => f.write_str("benchmark"),
            Self::PerObservation => f.write_str("per-observation"),
            Self::None => f.write_str("none"),
            Self::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthOutput {
    pub name: String,
    /// Physical-unit coefficients in canonical basis order.
    pub coefficients: Vec<f64>,
}

/// Ground-truth sidecar written next to every synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub example: String,
    pub n: usize,
    pub seed: u64,
    pub noise: NoiseMode,
    /// The per-dataset variance actually used, when there is one.
    pub sigma2: Option<f64>,
    pub basis: BasisSpec,
    pub inputs: Vec<VariableSpec>,
    pub outputs: Vec<TruthOutput>,
}

impl Truth {
    pub fn eval(&self, l: usize, x: &[f64]) -> Result<f64> {
        let out = self.outputs.get(l).ok_or_else(|| {
            Error::InvalidArgument(format!("truth has {} outputs, asked for {l}", self.outputs.len()))
        })?;
        let f = self.basis.expand(x)?;
        Ok(f.iter().zip(&out.coefficients).map(|(a, b)| a * b).sum())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Synthetic {
    pub dataset: Dataset,
    pub truth: Truth,
}

impl Synthetic {
    pub fn schema(&self) -> Schema {
        self.dataset.schema(true)
    }
}

/// Draws LHS inputs in the box, evaluates each truth output and adds noise.
fn generate(
    example: &str,
    inputs: Vec<VariableSpec>,
    outputs: Vec<TruthOutput>,
    degree: u32,
    n: usize,
    seed: u64,
    noise: NoiseMode,
) -> Result<Synthetic> {
    let d = inputs.len();
    let basis = BasisSpec::new(d, degree)?;
    if n < basis.len() {
        return Err(Error::InvalidArgument(format!(
            "need at least {} runs for a degree-{degree} basis in {d} inputs, got {n}",
            basis.len()
        )));
    }
    let x = LhsDesign::generate(n, d, seed)?.scale_to_box(&inputs)?;

    let mut rng = rng::stream(seed, Purpose::Noise, 0);
    let gamma = Gamma::new(2.0, 1.0).expect("valid gamma parameters");
    let sigma2 = match noise {
        NoiseMode::Benchmark => Some(gamma.sample(&mut rng)),
        NoiseMode::Fixed(v) => Some(v),
        NoiseMode::None | NoiseMode::PerObservation => None,
    };

    let mut y = DMatrix::zeros(n, outputs.len());
    let mut feats = vec![0.0; basis.len()];
    for i in 0..n {
        let row: Vec<f64> = x.row(i).iter().copied().collect();
        basis.expand_into(&row, &mut feats);
        for (l, out) in outputs.iter().enumerate() {
            let mean: f64 = feats.iter().zip(&out.coefficients).map(|(a, b)| a * b).sum();
            let var = match noise {
                NoiseMode::None => 0.0,
                NoiseMode::PerObservation => gamma.sample(&mut rng),
                _ => sigma2.unwrap_or(0.0),
            };
            let z: f64 = if var > 0.0 { StandardNormal.sample(&mut rng) } else { 0.0 };
            y[(i, l)] = mean + var.sqrt() * z;
        }
    }

    let names = outputs.iter().map(|o| o.name.clone()).collect();
    let dataset = Dataset::new(x, y, inputs.clone(), names, true)?;
    Ok(Synthetic {
        dataset,
        truth: Truth {
            example: example.to_string(),
            n,
            seed,
            noise,
            sigma2,
            basis,
            inputs,
            outputs,
        },
    })
}

/// The two-input quadratic benchmark on `[-10, 10]^2`.
pub fn synth_example2(n: usize, seed: u64, noise: NoiseMode) -> Result<Synthetic> {
    generate(
        "example2",
        vec![
            VariableSpec::new("x1", -10.0, 10.0)?,
            VariableSpec::new("x2", -10.0, 10.0)?,
        ],
        vec![TruthOutput {
            name: "y".into(),
            coefficients: EXAMPLE2_COEFFICIENTS.to_vec(),
        }],
        2,
        n,
        seed,
        noise,
    )
}

/// One-input cure-temperature data whose true minimum sits at 134.
pub fn synth_cure(n: usize, seed: u64, noise: NoiseMode) -> Result<Synthetic> {
    generate(
        "cure",
        vec![VariableSpec::new("temperature", CURE_RANGE.0, CURE_RANGE.1)?],
        vec![TruthOutput {
            name: "deformation".into(),
            coefficients: CURE_COEFFICIENTS.to_vec(),
        }],
        2,
        n,
        seed,
        noise,
    )
}

/// Input box of the four-parameter injection molding study.
pub fn im_inputs() -> Vec<VariableSpec> {
    [
        ("mold_temperature", 30.0, 50.0),
        ("injection_speed", 22.5, 67.5),
        ("packing_pressure", 400.0, 600.0),
        ("packing_time", 1.0, 4.5),
    ]
    .into_iter()
    .map(|(n, a, b)| VariableSpec::new(n, a, b).expect("static ranges are valid"))
    .collect()
}

pub const IM_OUTPUTS: [&str; 4] = [
    "horizontal_left",
    "horizontal_right",
    "vertical_up",
    "vertical_down",
];

pub fn im_schema() -> Schema {
    Schema {
        inputs: im_inputs(),
        outputs: IM_OUTPUTS.iter().map(|s| s.to_string()).collect(),
        strict: true,
    }
}

// Invented coded-scale quadratics with displacements in millimetres; each wall
// changes sign inside the box.
const IM_CODED: [[f64; 15]; 4] = [
    [0.20, 0.30, -0.50, 0.60, 0.20, 0.10, 0.0, 0.0, 0.0, 0.15, 0.10, 0.0, 0.20, 0.0, 0.05],
    [0.25, 0.28, -0.45, 0.62, 0.18, 0.08, 0.0, 0.05, 0.0, 0.12, 0.08, 0.0, 0.18, 0.0, 0.04],
    [-0.20, 0.10, -0.30, 0.25, 0.10, -0.05, 0.0, 0.0, 0.0, 0.08, -0.06, 0.0, -0.10, 0.0, 0.02],
    [-0.25, 0.12, -0.28, 0.22, 0.12, -0.04, 0.0, 0.0, 0.02, 0.06, -0.05, 0.0, -0.12, 0.0, 0.03],
];

/// Synthetic data in the injection molding format. The responses are made up;
/// only the column layout and input box follow the real study.
pub fn synth_im(n: usize, seed: u64, noise: NoiseMode) -> Result<Synthetic> {
    let inputs = im_inputs();
    let basis = BasisSpec::quadratic(4);
    let offset: Vec<f64> = inputs
        .iter()
        .map(|s| -(s.lower + s.upper) / (s.upper - s.lower))
        .collect();
    let slope: Vec<f64> = inputs.iter().map(|s| 2.0 / (s.upper - s.lower)).collect();
    let outputs = IM_OUTPUTS
        .iter()
        .zip(IM_CODED.iter())
        .map(|(name, coded)| {
            Ok(TruthOutput {
                name: name.to_string(),
                coefficients: basis.substitute_affine(coded, &offset, &slope)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    generate("im", inputs, outputs, 2, n, seed, noise)
}

/// `k` points on the zero set of a two-input quadratic
/// `[c, b1, b2, a11, a12, a22]` whose level sets are ellipses, spaced evenly in
/// angle about the centre. Errors if the zero set is not a nonempty ellipse.
pub fn ellipse_zero_points(coefficients: &[f64; 6], k: usize) -> Result<Vec<[f64; 2]>> {
    let [c, b1, b2, a11, a12, a22] = *coefficients;
    let det = 4.0 * a11 * a22 - a12 * a12;
    if !(det > 0.0) {
        return Err(Error::InvalidArgument("quadratic form is not definite".into()));
    }
    // stationary point of the quadratic
    let cx = (-b1 * 2.0 * a22 + a12 * b2) / det;
    let cy = (-b2 * 2.0 * a11 + a12 * b1) / det;
    let centre_value = c + b1 * cx + b2 * cy + a11 * cx * cx + a12 * cx * cy + a22 * cy * cy;
    let sign = a11.signum();
    if !(centre_value * sign < 0.0) {
        return Err(Error::InvalidArgument("zero set is empty".into()));
    }
    Ok((0..k)
        .map(|t| {
            let th = std::f64::consts::TAU * t as f64 / k as f64;
            let (s, co) = th.sin_cos();
            let q = a11 * co * co + a12 * co * s + a22 * s * s;
            let r = (-centre_value / q).sqrt();
            [cx + r * co, cy + r * s]
        })
        .collect())
}

/// True zero set of the two-input benchmark.
pub fn example2_boundary_points(k: usize) -> Vec<[f64; 2]> {
    ellipse_zero_points(&EXAMPLE2_COEFFICIENTS, k).expect("benchmark zero set is an ellipse")
}
