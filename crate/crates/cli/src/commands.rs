use std::path::Path;

use anyhow::Context;
use grenboot::experiment::{
    band_coverage, inconsistency, l1_clt, pointwise_coverage, rates, BandCoverageConfig,
    InconsistencyConfig, L1CltConfig, PointwiseCoverageConfig, RateConfig,
};
use grenboot::inference::{default_supersample_size, l1_band, smoothed_pointwise_ci};
use grenboot::limit::{estimate_constants, scaling_check, LimitConfig, LimitConstants, ScalingConfig};
use grenboot::{
    grenander_fit, sample_from_analytic, AnalyticDensity, BandwidthRule, Regime, RngStream, Sample,
    SmoothedDensity,
};
use serde::Serialize;

use crate::cli::*;
use crate::data::{format_sample, parse_sample};
use crate::run::{usage, Outcome, Run};

fn density(name: &str) -> Outcome<AnalyticDensity> {
    Ok(name.parse::<AnalyticDensity>()?)
}

fn load_sample(run: &mut Run, path: &Path) -> Outcome<Sample> {
    let text = run.read_input(path)?;
    Ok(parse_sample(&text, &path.display().to_string())?)
}

fn load_constants(run: &mut Run, path: &Path) -> Outcome<LimitConstants> {
    let text = run.read_input(path)?;
    let constants = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a limits.json file", path.display()))?;
    Ok(constants)
}

fn alpha_level(level: f64) -> Outcome<f64> {
    if !(level > 0.0 && level < 1.0) {
        return usage(format!("level must lie in (0, 1), got {level}"));
    }
    Ok(1.0 - level)
}

pub fn gen(args: &GenArgs, run: &mut Run) -> Outcome<()> {
    let g = density(&args.density)?;
    if args.n == 0 {
        return usage("n must be positive");
    }
    let sample = sample_from_analytic(&g, args.n, &mut RngStream::new(args.seed))?;
    run.write("data.txt", &format_sample(&sample))
}

#[derive(Serialize)]
struct SmoothSummary {
    kernel: String,
    bandwidth: f64,
    normalizer: f64,
    zero_crossing: Option<f64>,
}

#[derive(Serialize)]
struct FitSummary<'a> {
    n: usize,
    steps: usize,
    mass: f64,
    breakpoints: &'a [f64],
    heights: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    smooth: Option<SmoothSummary>,
}

pub fn fit(args: &FitArgs, run: &mut Run) -> Outcome<()> {
    let sample = load_sample(run, &args.data)?;
    let fit = grenander_fit(&sample)?;
    run.write("fit.csv", &fit.to_csv())?;
    let smooth = match args.smooth_grid {
        Some(points) => {
            let rule = BandwidthRule::new(args.alpha, 1.0, Regime::Pointwise)?;
            let sd = SmoothedDensity::fit(&sample, args.kernel.kernel(), &rule)?;
            run.write("smooth.csv", &sd.grid_csv(points)?)?;
            Some(SmoothSummary {
                kernel: sd.kernel().name().to_string(),
                bandwidth: sd.bandwidth(),
                normalizer: sd.normalizer(),
                zero_crossing: sd.zero_crossing(),
            })
        }
        None => None,
    };
    run.write_json(
        "fit.json",
        &FitSummary {
            n: sample.len(),
            steps: fit.steps(),
            mass: fit.mass(),
            breakpoints: fit.breakpoints(),
            heights: fit.heights(),
            smooth,
        },
    )
}

pub fn ci(args: &CiArgs, run: &mut Run) -> Outcome<()> {
    let alpha_level = alpha_level(args.level)?;
    let rule = BandwidthRule::new(args.alpha, args.scale, Regime::Pointwise)?;
    let sample = load_sample(run, &args.data)?;
    let result = smoothed_pointwise_ci(
        &sample,
        args.t0,
        alpha_level,
        args.boot,
        &args.kernel.kernel(),
        &rule,
        &RngStream::new(args.seed),
    )?;
    run.write_json("ci.json", &result)?;
    run.write("ci_deviations.csv", &result.deviations_csv())
}

pub fn band(args: &BandArgs, run: &mut Run) -> Outcome<()> {
    let alpha_level = alpha_level(args.level)?;
    let rule = BandwidthRule::new(args.alpha, args.scale, Regime::L1)?;
    let kernel = args.kernel.kernel();
    kernel.require(grenboot::KernelLevel::B6)?;
    let sample = load_sample(run, &args.data)?;
    let m = args
        .m
        .unwrap_or_else(|| default_supersample_size(sample.len(), args.budget));
    let result = l1_band(&sample, alpha_level, args.boot, m, &kernel, &rule, &RngStream::new(args.seed))?;
    if let Some(w) = &result.warning {
        eprintln!("warning: {w}");
    }
    run.write_json("band.json", &result)?;
    run.write("band_replicates.csv", &result.statistics_csv())
}

pub fn limits(args: &LimitsArgs, run: &mut Run) -> Outcome<()> {
    let rng = RngStream::new(args.seed);
    let config = LimitConfig {
        delta: args.delta,
        window: args.window,
        paths: args.paths,
        x_max: args.x_max,
        lag_step: args.lag_step,
        batches: args.batches,
    };
    let constants = estimate_constants(&config, &rng.substream(0))?;
    run.write_json("limits.json", &constants)?;
    if args.check_scaling {
        let config = ScalingConfig {
            delta: args.delta,
            half_width: args.scaling_half_width,
            paths: args.scaling_paths,
        };
        let report = scaling_check(&config, &rng.substream(1))?;
        run.write_json("scaling.json", &report)?;
        if args.dump_draws {
            run.write("draws.csv", &report.draws_csv())?;
        }
    }
    Ok(())
}

pub fn experiment(exp: &Experiment, run: &mut Run) -> Outcome<()> {
    match exp {
        Experiment::Coverage(a) => coverage(a, run),
        Experiment::Inconsistency(a) => {
            let truth = density(&a.common.truth)?;
            let constants = load_constants(run, &a.constants)?;
            let config = InconsistencyConfig::with_constants(truth, a.n, a.t0, a.reps, &constants);
            let result = inconsistency(&config, &RngStream::new(a.common.seed))?;
            run.write("inconsistency.csv", &result.to_csv())?;
            run.write_json("inconsistency.json", &result)
        }
        Experiment::Rate(a) => {
            let config = RateConfig {
                truth: density(&a.common.truth)?,
                sizes: a.sizes.clone(),
                replicates: a.reps,
                kernel: a.kernel.kernel(),
                bandwidth: BandwidthRule::new(a.alpha, 1.0, Regime::Pointwise)?,
                t0: a.t0,
                grid_size: a.grid,
            };
            let result = rates(&config, &RngStream::new(a.common.seed))?;
            run.write("rate.csv", &result.to_csv())?;
            run.write_json("rate.json", &result)
        }
        Experiment::L1clt(a) => {
            let truth = density(&a.common.truth)?;
            let constants = load_constants(run, &a.constants)?;
            let config = L1CltConfig::with_constants(truth, a.n, a.reps, &constants);
            let result = l1_clt(&config, &RngStream::new(a.common.seed))?;
            run.write("l1clt.csv", &result.to_csv())?;
            run.write_json("l1clt.json", &result)
        }
    }
}

fn coverage(a: &CoverageArgs, run: &mut Run) -> Outcome<()> {
    let truth = density(&a.common.truth)?;
    let rng = RngStream::new(a.common.seed);
    match a.mode {
        CoverageMode::Pointwise => {
            let config = PointwiseCoverageConfig {
                truth,
                n: a.n.unwrap_or(500),
                t0: a.t0,
                alpha_level: alpha_level(a.level.unwrap_or(0.90))?,
                bootstrap_replicates: a.boot.unwrap_or(200),
                data_replicates: a.reps,
                kernel: a.kernel.unwrap_or(KernelName::Epanechnikov).kernel(),
                bandwidth: BandwidthRule::new(a.alpha.unwrap_or(0.30), 1.0, Regime::Pointwise)?,
            };
            let result = pointwise_coverage(&config, &rng)?;
            run.write("coverage.csv", &result.to_csv())?;
            run.write_json("coverage.json", &result)
        }
        CoverageMode::Band => {
            let n = a.n.unwrap_or(1000);
            let kernel = a.kernel.unwrap_or(KernelName::Biweight).kernel();
            kernel.require(grenboot::KernelLevel::B6)?;
            let config = BandCoverageConfig {
                truth,
                n,
                alpha_level: alpha_level(a.level.unwrap_or(0.95))?,
                bootstrap_replicates: a.boot.unwrap_or(300),
                supersample: a.m.unwrap_or(20 * n),
                data_replicates: a.reps,
                kernel,
                bandwidth: BandwidthRule::new(a.alpha.unwrap_or(0.18), 1.0, Regime::L1)?,
            };
            let result = band_coverage(&config, &rng)?;
            run.write("coverage.csv", &result.to_csv())?;
            run.write_json("coverage.json", &result)
        }
    }
}
