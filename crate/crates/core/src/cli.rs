//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bayes_lm::{FittedModel, SigmaMode};
use crate::boundary::{
    confidence_bands, eval_slice_physical, objective_slice, zero_contour, BandMode, BandSettings,
    ContourSet, ContourSource, SliceSpec,
};
use crate::dataset::{load_csv, Schema, ScaledDomain, VariableSpec};
use crate::designgen::LhsDesign;
use crate::error::{Error, Result};
use crate::optimizer::{decision_ensemble, minimize_model, DecisionEnsemble, Objective, OptimResult, OptimSettings};
use crate::svg;
use crate::synth::{self, NoiseMode, Synthetic, Truth};

#[derive(Debug, Parser)]
#[command(name = "warpband", version, about = "Polynomial surrogates with posterior decision and boundary uncertainty")]
pub struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Master seed for every random stream.
    #[arg(long, global = true, env = "WARPBAND_SEED")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one polynomial model per output column.
    Fit(FitArgs),
    /// Minimize the objective under the point-estimate coefficients.
    Optimize(OptimizeArgs),
    /// Optimal decisions under posterior coefficient draws.
    Uq(UqArgs),
    /// Zero-level sets and Monte Carlo confidence bands on a 2-D slice.
    Boundary(BoundaryArgs),
    /// Generate a synthetic dataset with a ground-truth sidecar.
    Synth(SynthArgs),
    /// Write a Latin hypercube design.
    Design(DesignArgs),
    /// fit, optimize, uq and boundary in one go.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// JSON schema naming input ranges and output columns.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct ObjectiveArgs {
    /// Comma-separated per-output weights of the sum of squares.
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct UqArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "R", default_value_t = 1000)]
    pub draws: usize,
    /// Sample the noise variance too instead of fixing it at its estimate.
    #[arg(long)]
    pub hierarchical: bool,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct BandArgs {
    #[arg(long = "R", default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Tolerance in standard deviations (response units with --raw); repeatable.
    #[arg(long = "eps", default_values_t = [2.5])]
    pub eps: Vec<f64>,
    /// `free=a,b fixed=name:value,...`; dims by name or zero-based index.
    #[arg(long)]
    pub slice: Option<String>,
    #[arg(long, default_value_t = crate::boundary::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Number of posterior draw contours drawn on each plot.
    #[arg(long, default_value_t = 20)]
    pub draw_contours: usize,
    /// Restrict to these outputs (default: all).
    #[arg(long = "output")]
    pub outputs: Vec<String>,
    /// Ground-truth sidecar from `synth`, for overlaying the true zero set.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Unstandardized band `|y| < eps`.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub hierarchical: bool,
    /// Also write the objective surface over the slice.
    #[arg(long)]
    pub objective_contour: bool,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub band: BandArgs,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// One-input cure temperature data.
    #[value(name = "1", alias = "cure")]
    Cure,
    /// Two-input quadratic benchmark.
    #[value(name = "2")]
    Quadratic,
    /// Four-input, four-output injection molding layout.
    #[value(name = "im")]
    Im,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value = "2")]
    pub example: Example,
    #[arg(long)]
    pub n: Option<usize>,
    /// benchmark, per-observation, none or fixed:<variance>.
    #[arg(long)]
    pub noise: Option<NoiseMode>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub n: usize,
    /// Schema whose input ranges define the box; defaults to the unit cube.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long, default_value = "design.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[command(flatten)]
    pub band: BandArgs,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Fit(a) => cmd_fit(a).map(|_| ()),
        Command::Optimize(a) => {
            let model = FittedModel::load(&a.model)?;
            cmd_optimize(&model, &a.objective, seed, &a.out).map(|_| ())
        }
        Command::Uq(a) => {
            let model = FittedModel::load(&a.model)?;
            let mode = if a.hierarchical { SigmaMode::Hierarchical } else { SigmaMode::Map };
            cmd_uq(&model, &a.objective, a.draws, mode, seed, &a.out).map(|_| ())
        }
        Command::Boundary(a) => {
            let model = FittedModel::load(&a.model)?;
            let obj = objective(&a.objective, model.m())?;
            let point = minimize_model(&model, &obj, &optim_settings(seed))?;
            cmd_boundary(&model, &a.band, &obj, &point.x_star, seed, &a.out)
        }
        Command::Synth(a) => cmd_synth(a, seed).map(|_| ()),
        Command::Design(a) => cmd_design(a, seed),
        Command::Pipeline(a) => cmd_pipeline(a, seed),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn optim_settings(seed: u64) -> OptimSettings {
    OptimSettings {
        seed,
        ..Default::default()
    }
}

pub fn objective(args: &ObjectiveArgs, m: usize) -> Result<Objective> {
    match &args.weights {
        None => Ok(Objective::sum_of_squares(m)),
        Some(text) => {
            let w = text
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("weight `{t}` is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            if w.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: w.len() });
            }
            Objective::weighted(w)
        }
    }
}

#[derive(Serialize)]
struct CoefficientRow {
    term: String,
    coded: f64,
    physical: f64,
}

#[derive(Serialize)]
struct OutputReport {
    name: String,
    r2: f64,
    sigma2_hat: f64,
    residual_ss: f64,
    coefficients: Vec<CoefficientRow>,
}

#[derive(Serialize)]
struct FitReport {
    n: usize,
    p: usize,
    degree: u32,
    inputs: Vec<VariableSpec>,
    outputs: Vec<OutputReport>,
}

pub fn cmd_fit(a: &FitArgs) -> Result<FittedModel> {
    let schema = Schema::from_json_file(&a.config)?;
    let ds = load_csv(&a.data, &schema)?;
    let model = FittedModel::fit_physical(&ds, a.degree)?;
    ensure_dir(&a.out)?;
    model.save(a.out.join("model.json"))?;
    write_fit_report(&model, &a.out)?;
    Ok(model)
}

fn write_fit_report(model: &FittedModel, out: &Path) -> Result<()> {
    let names: Vec<String> = model.domain().specs().iter().map(|s| s.name.clone()).collect();
    let basis = model.basis();
    let mut outputs = Vec::new();
    for (l, o) in model.outputs().iter().enumerate() {
        let phys = model.physical_coefficients(l)?;
        outputs.push(OutputReport {
            name: o.name.clone(),
            r2: o.r2,
            sigma2_hat: o.sigma2_hat,
            residual_ss: o.residual_ss,
            coefficients: (0..basis.len())
                .map(|j| CoefficientRow {
                    term: basis.term_name(j, &names),
                    coded: o.beta_hat[j],
                    physical: phys[j],
                })
                .collect(),
        });
        println!("{}: R2 = {:.4}, sigma2 = {:.6e}", o.name, o.r2, o.sigma2_hat);
    }
    write_json(
        &out.join("fit_report.json"),
        &FitReport {
            n: model.n(),
            p: model.p(),
            degree: basis.degree(),
            inputs: model.domain().specs().to_vec(),
            outputs,
        },
    )
}

#[derive(Serialize)]
struct OptimumFile<'a> {
    names: Vec<String>,
    weights: &'a [f64],
    seed: u64,
    #[serde(flatten)]
    result: &'a OptimResult,
}

pub fn cmd_optimize(model: &FittedModel, args: &ObjectiveArgs, seed: u64, out: &Path) -> Result<OptimResult> {
    let obj = objective(args, model.m())?;
    let res = minimize_model(model, &obj, &optim_settings(seed))?;
    if !res.converged {
        log::warn!("point-estimate optimization stopped at the iteration limit");
    }
    ensure_dir(out)?;
    let names: Vec<String> = model.domain().specs().iter().map(|s| s.name.clone()).collect();
    for (n, v) in names.iter().zip(&res.x_star) {
        println!("{n} = {v}");
    }
    println!("objective = {:e}", res.objective_value);
    write_json(
        &out.join("optimum.json"),
        &OptimumFile {
            names,
            weights: obj.weights(),
            seed,
            result: &res,
        },
    )?;
    Ok(res)
}

pub fn cmd_uq(
    model: &FittedModel,
    args: &ObjectiveArgs,
    draws: usize,
    mode: SigmaMode,
    seed: u64,
    out: &Path,
) -> Result<(OptimResult, DecisionEnsemble)> {
    let obj = objective(args, model.m())?;
    let settings = optim_settings(seed);
    let point = minimize_model(model, &obj, &settings)?;
    let ens = decision_ensemble(model, &obj, draws, seed, mode, &settings)?;
    ensure_dir(out)?;
    ens.save_csv(out.join("ensemble.csv"))?;
    write_json(&out.join("ensemble_summary.json"), &ens.summary(&point))?;
    for (k, spec) in model.domain().specs().iter().enumerate() {
        let values = ens.converged_column(k);
        let q = ens.summaries[k];
        let svg = svg::histogram(
            &values,
            (spec.lower, spec.upper),
            q.as_ref(),
            &format!("Optimal {} over {} posterior draws", spec.name, draws),
            &spec.name,
        );
        write_text(&out.join(format!("hist_{}.svg", spec.name)), &svg)?;
        if let Some(q) = q {
            println!("{}: median {} (q25 {}, q75 {})", spec.name, q.median, q.q25, q.q75);
        }
    }
    Ok((point, ens))
}

/// Parses `free=a,b fixed=name:value,...`. Dims not listed take their value
/// from `default_point`.
pub fn parse_slice(text: Option<&str>, domain: &ScaledDomain, default_point: &[f64], resolution: usize) -> Result<SliceSpec> {
    let d = domain.dim();
    let dim_of = |t: &str| -> Result<usize> {
        let t = t.trim();
        domain
            .index_of(t)
            .or_else(|| t.parse::<usize>().ok().filter(|k| *k < d))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown input dimension `{t}`")))
    };
    let mut free = (0usize, 1usize);
    let mut point = default_point.to_vec();
    if let Some(text) = text {
        for part in text.split_whitespace() {
            if let Some(v) = part.strip_prefix("free=") {
                let dims: Vec<&str> = v.split(',').collect();
                if dims.len() != 2 {
                    return Err(Error::InvalidArgument(format!("`{part}`: expected two free dims")));
                }
                free = (dim_of(dims[0])?, dim_of(dims[1])?);
            } else if let Some(v) = part.strip_prefix("fixed=") {
                for item in v.split(',').filter(|s| !s.is_empty()) {
                    let (name, value) = item
                        .split_once(':')
                        .ok_or_else(|| Error::InvalidArgument(format!("`{item}`: expected name:value")))?;
                    let k = dim_of(name)?;
                    point[k] = value
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("`{item}`: value is not a number")))?;
                }
            } else {
                return Err(Error::InvalidArgument(format!("unrecognized slice part `{part}`")));
            }
        }
    }
    SliceSpec::through_point(domain, free, &point, (resolution, resolution))
}

fn eps_tag(eps: f64) -> String {
    format!("{eps}")
}

#[derive(Serialize)]
struct BandFileMeta {
    #[serde(flatten)]
    band: crate::boundary::BandMetadata,
    mean_contour_polylines: usize,
    truth_contour_polylines: Option<usize>,
}

/// Bands for each selected output and tolerance through `default_point`.
pub fn cmd_boundary(
    model: &FittedModel,
    a: &BandArgs,
    obj: &Objective,
    default_point: &[f64],
    seed: u64,
    out: &Path,
) -> Result<()> {
    let domain = model.domain();
    let slice = parse_slice(a.slice.as_deref(), domain, default_point, a.resolution)?;
    let settings = BandSettings {
        alpha: a.alpha,
        draws: a.draws,
        seed,
        mode: if a.raw { BandMode::Raw } else { BandMode::Standardized },
        sigma_mode: if a.hierarchical { SigmaMode::Hierarchical } else { SigmaMode::Map },
        draw_contours: a.draw_contours,
    };
    let truth = a.truth.as_ref().map(Truth::load).transpose()?;
    if let Some(t) = &truth {
        if t.inputs.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: t.inputs.len(),
            });
        }
    }
    let outputs: Vec<usize> = if a.outputs.is_empty() {
        (0..model.m()).collect()
    } else {
        a.outputs
            .iter()
            .map(|n| {
                model
                    .output_index(n)
                    .ok_or_else(|| Error::InvalidArgument(format!("model has no output `{n}`")))
            })
            .collect::<Result<_>>()?
    };
    ensure_dir(out)?;
    let specs = domain.specs();
    let (fa, fb) = (&specs[slice.free_dims.0].name, &specs[slice.free_dims.1].name);

    for l in outputs {
        let name = &model.output(l)?.name;
        let truth_contour = match &truth {
            Some(t) => match t.outputs.iter().find(|o| &o.name == name) {
                Some(o) => {
                    let g = eval_slice_physical(&t.basis, &o.coefficients, domain, &slice)?;
                    Some(zero_contour(&g, &slice, domain, ContourSource::Truth))
                }
                None => None,
            },
            None => None,
        };
        let bundles = confidence_bands(model, l, &slice, &a.eps, &settings)?;
        for b in &bundles {
            let tag = format!("{name}_eps{}", eps_tag(b.grid.epsilon));
            b.grid.save_csv(domain, out.join(format!("band_{tag}.csv")))?;
            write_json(
                &out.join(format!("band_{tag}.json")),
                &BandFileMeta {
                    band: b.grid.metadata(domain),
                    mean_contour_polylines: b.mean_contour.polylines.len(),
                    truth_contour_polylines: truth_contour.as_ref().map(|c| c.polylines.len()),
                },
            )?;
            let mut sets: Vec<&ContourSet> = vec![&b.mean_contour];
            if let Some(t) = &truth_contour {
                sets.push(t);
            }
            sets.extend(b.draw_contours.iter());
            crate::boundary::write_contours_json(&sets, out.join(format!("contours_{tag}.json")))?;
            let title = format!(
                "{name}: {:.0}% band, eps = {} over ({fa}, {fb})",
                100.0 * (1.0 - b.grid.alpha),
                b.grid.epsilon
            );
            write_text(
                &out.join(format!("band_{tag}.svg")),
                &svg::band_plot(b, domain, truth_contour.as_ref(), &title),
            )?;
            println!(
                "{name} eps={}: {} of {} grid points in band",
                b.grid.epsilon,
                b.grid.band_cells(),
                b.grid.band_mask.len()
            );
        }
    }

    if a.objective_contour {
        let g = objective_slice(model, obj, &slice)?;
        let mut w = csv::Writer::from_path(out.join(format!("objective_{fa}_{fb}.csv")))?;
        w.write_record([fa.as_str(), fb.as_str(), "objective"])?;
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let (x, y) = slice.plane_point(domain, i as f64, j as f64);
                w.write_record([format!("{x}"), format!("{y}"), format!("{}", g.get(i, j))])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        let marker = (default_point[slice.free_dims.0], default_point[slice.free_dims.1]);
        write_text(
            &out.join(format!("objective_{fa}_{fb}.svg")),
            &svg::heat_map(&g, &slice, domain, Some(marker), &format!("Objective over ({fa}, {fb})")),
        )?;
    }
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs, seed: u64) -> Result<Synthetic> {
    let (stem, s) = match a.example {
        Example::Cure => (
            "cure",
            synth::synth_cure(
                a.n.unwrap_or(25),
                seed,
                a.noise.unwrap_or(NoiseMode::Fixed(synth::CURE_NOISE_VARIANCE)),
            )?,
        ),
        Example::Quadratic => (
            "example2",
            synth::synth_example2(a.n.unwrap_or(500), seed, a.noise.unwrap_or(NoiseMode::Benchmark))?,
        ),
        Example::Im => (
            "im",
            synth::synth_im(a.n.unwrap_or(57), seed, a.noise.unwrap_or(NoiseMode::Fixed(0.0025)))?,
        ),
    };
    ensure_dir(&a.out)?;
    s.dataset.write_csv(a.out.join(format!("{stem}.csv")))?;
    s.schema().write_json(a.out.join(format!("{stem}_schema.json")))?;
    s.truth.save(a.out.join(format!("{stem}_truth.json")))?;
    println!("wrote {} rows to {}", s.dataset.n(), a.out.join(format!("{stem}.csv")).display());
    Ok(s)
}

pub fn cmd_design(a: &DesignArgs, seed: u64) -> Result<()> {
    let specs = match &a.config {
        Some(p) => Schema::from_json_file(p)?.inputs,
        None => (0..a.dims)
            .map(|k| VariableSpec::new(format!("x{}", k + 1), 0.0, 1.0))
            .collect::<Result<_>>()?,
    };
    let des = LhsDesign::generate(a.n, specs.len(), seed)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    des.write_csv(&a.out, &specs)
}

pub fn cmd_pipeline(a: &PipelineArgs, seed: u64) -> Result<()> {
    let model = cmd_fit(&FitArgs {
        data: a.data.clone(),
        config: a.config.clone(),
        degree: a.degree,
        out: a.out.clone(),
    })?;
    cmd_optimize(&model, &a.objective, seed, &a.out)?;
    let mode = if a.band.hierarchical { SigmaMode::Hierarchical } else { SigmaMode::Map };
    let (point, ens) = cmd_uq(&model, &a.objective, a.band.draws, mode, seed, &a.out)?;
    if model.d() < 2 {
        return Ok(());
    }
    let centre: Vec<f64> = ens
        .summaries
        .iter()
        .zip(&point.x_star)
        .map(|(q, x)| q.map_or(*x, |q| q.median))
        .collect();
    let obj = objective(&a.objective, model.m())?;
    cmd_boundary(&model, &a.band, &obj, &centre, seed, &a.out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain() -> ScaledDomain {
        ScaledDomain::new(synth::im_inputs())
    }

    #[test]
    fn slice_parsing() {
        let dom = domain();
        let centre = [40.0, 45.0, 500.0, 2.75];
        let s = parse_slice(
            Some("free=injection_speed,packing_pressure fixed=mold_temperature:43.256,packing_time:4.5"),
            &dom,
            &centre,
            32,
        )
        .unwrap();
        assert_eq!(s.free_dims, (1, 2));
        assert_eq!(s.fixed_values, vec![43.256, 4.5]);
        let s = parse_slice(Some("free=3,0"), &dom, &centre, 16).unwrap();
        assert_eq!(s.free_dims, (3, 0));
        assert_eq!(s.fixed_values, vec![45.0, 500.0]);
        let s = parse_slice(None, &dom, &centre, 16).unwrap();
        assert_eq!(s.fixed_values, vec![500.0, 2.75]);
        assert!(parse_slice(Some("free=1"), &dom, &centre, 16).is_err());
        assert!(parse_slice(Some("free=1,9"), &dom, &centre, 16).is_err());
        assert!(parse_slice(Some("fixed=packing_time:9"), &dom, &centre, 16).is_err());
        assert!(parse_slice(Some("wobble"), &dom, &centre, 16).is_err());
    }

    #[test]
    fn weights_parsing() {
        let a = ObjectiveArgs { weights: Some("1, 2,0.5".into()) };
        assert_eq!(objective(&a, 3).unwrap().weights(), &[1.0, 2.0, 0.5]);
        assert!(objective(&a, 2).is_err());
        let bad = ObjectiveArgs { weights: Some("1,x".into()) };
        assert!(objective(&bad, 2).is_err());
        assert!(objective(&ObjectiveArgs { weights: None }, 4).unwrap().is_unweighted());
    }

    #[test]
    fn help_and_bad_flags() {
        assert_eq!(main_with_args(["warpband", "--help"]), 0);
        assert_eq!(main_with_args(["warpband", "fit", "--bogus"]), 1);
        assert_eq!(main_with_args(["warpband", "optimize", "--model", "/nonexistent/model.json"]), 1);
    }
}
