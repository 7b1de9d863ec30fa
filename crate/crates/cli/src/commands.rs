//! One function per subcommand.

use std::path::Path;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tailmean::axioms::{check_axiom, two_point_coincidence, AxiomId, SampleStatistic};
use tailmean::genmean::{
    limit_scan, mean_ladder_on_grid, multiplier_mean, CaseTag, LimitVerdict, MeanValue, MultiplierFamily,
    PartialMeanSeries, TailDecay,
};
use tailmean::lln::{
    cauchy_stability_demo, mean_vs_single_distance, running_mean_trajectory, wlln_experiment, Sampler,
};
use tailmean::maxent::{maxent_solve_with, MaxEntProblem};
use tailmean::spectral::{
    bridge_analyze, spectral_report, BridgeFamily, DiagonalBridge, HermitianObservable, StateVector,
};
use tailmean::{MeasureDocument, MeasureSpec};

use crate::config::{read_document, RunConfig};
use crate::output::{Artifacts, Csv};
use crate::Outcome;

/// `{"matrix": [[[re, im], ...], ...], "state": [[re, im], ...]}` or `{"bridge": {"family": ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeFamily>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    ExpTilt,
    Window,
}

#[derive(Debug, Args)]
pub struct MultiplierArgs {
    /// Multiplier family; each grid point is used as its parameter.
    #[arg(long, value_enum, default_value = "exp-tilt")]
    family: FamilyArg,
}

#[derive(Debug, Args)]
pub struct LlnArgs {
    /// Value the sample means are compared against.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mean: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Sample sizes, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    replications: usize,
    /// Spacing of the running-mean trajectory.
    #[arg(long, default_value_t = 100)]
    stride: usize,
    #[arg(long, default_value_t = 100)]
    stability_n: usize,
    #[arg(long, default_value_t = 5000)]
    stability_replications: usize,
}

#[derive(Debug, Args)]
pub struct AxiomArgs {
    /// Statistics such as `mean`, `median` or `convex(0.25)`.
    #[arg(long, value_delimiter = ',', default_value = "mean,median")]
    statistics: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
}

fn load_measure(cfg: &RunConfig, input: Option<&Path>) -> Result<MeasureSpec> {
    let doc: MeasureDocument = read_document(input)?;
    Ok(doc.measure.build(&cfg.policies.quadrature)?)
}

fn series_csv(series: &PartialMeanSeries) -> Csv {
    let mut csv = Csv::new("k,M,partial_mean,window_mass");
    for (k, p) in series.points.iter().enumerate() {
        csv.row(&[
            k.to_string(),
            p.m.to_string(),
            p.partial_mean.to_string(),
            p.window_mass.to_string(),
        ]);
    }
    csv
}

fn plain(outcome: impl Serialize, options: serde_json::Value) -> Result<Outcome> {
    Ok(Outcome {
        results: serde_json::to_value(outcome)?,
        options,
        warnings: Vec::new(),
        undetermined: false,
    })
}

pub fn classify(cfg: &RunConfig, input: Option<&Path>, art: &mut Artifacts) -> Result<Outcome> {
    let m = load_measure(cfg, input)?;
    let report = tailmean::genmean::theorem31_classify(&m, &cfg.c_grid, &cfg.schedule, &cfg.policies.verdict)?;
    for (i, cv) in report.per_center.iter().enumerate() {
        let series = limit_scan(&m, cv.center, &cfg.schedule)?;
        art.csv(&format!("scan_{i}.csv"), &series_csv(&series))?;
    }
    let mut warnings: Vec<String> = report
        .per_center
        .iter()
        .filter(|cv| cv.classification.verdict == LimitVerdict::Undetermined)
        .map(|cv| format!("undetermined verdict at center {}", cv.center))
        .collect();
    warnings.extend(report.diagnostics.iter().cloned());
    let undetermined = report.case == CaseTag::Undetermined;
    Ok(Outcome {
        results: serde_json::to_value(&report)?,
        options: json!({}),
        warnings,
        undetermined,
    })
}

pub fn weakmean(cfg: &RunConfig, input: Option<&Path>, art: &mut Artifacts) -> Result<Outcome> {
    let m = load_measure(cfg, input)?;
    let ladder = mean_ladder_on_grid(&m, &cfg.c_grid, &cfg.schedule, &cfg.policies.verdict)?;
    let mut tail = Csv::new("n,n_tail");
    for p in &ladder.tail_curve {
        tail.row(&[p.n.to_string(), p.n_tail.to_string()]);
    }
    art.csv("tail_curve.csv", &tail)?;
    art.csv("symmetric_scan.csv", &series_csv(&limit_scan(&m, 0.0, &cfg.schedule)?))?;

    let rungs = [
        ("ordinary", ladder.ordinary),
        ("weak", ladder.weak),
        ("doubly_weak", ladder.doubly_weak),
    ];
    let mut warnings: Vec<String> = rungs
        .iter()
        .filter(|(_, v)| *v == MeanValue::Undetermined)
        .map(|(name, _)| format!("{name} mean undetermined"))
        .collect();
    if ladder.tail_decay == TailDecay::Undetermined {
        warnings.push("tail decay undetermined".into());
    }
    warnings.extend(ladder.violations.iter().cloned());
    let undetermined = rungs.iter().any(|(_, v)| *v == MeanValue::Undetermined);
    Ok(Outcome {
        results: serde_json::to_value(&ladder)?,
        options: json!({}),
        warnings,
        undetermined,
    })
}

pub fn multiplier(
    cfg: &RunConfig,
    input: Option<&Path>,
    args: &MultiplierArgs,
    art: &mut Artifacts,
) -> Result<Outcome> {
    let m = load_measure(cfg, input)?;
    let mut series = Vec::with_capacity(cfg.c_grid.len());
    let mut warnings = Vec::new();
    for (i, &c) in cfg.c_grid.iter().enumerate() {
        let family = match args.family {
            FamilyArg::ExpTilt => MultiplierFamily::ExpTilt { c },
            FamilyArg::Window => MultiplierFamily::Window { center: c },
        };
        let s = multiplier_mean(
            &m,
            &family,
            &cfg.lambda_schedule,
            &cfg.policies.multiplier,
            &cfg.policies.verdict,
        )?;
        let mut csv = Csv::new("k,lambda,value,weight");
        for (k, p) in s.points.iter().enumerate() {
            csv.row(&[
                k.to_string(),
                p.lambda.to_string(),
                p.value.to_string(),
                p.weight.to_string(),
            ]);
        }
        art.csv(&format!("multiplier_{i}.csv"), &csv)?;
        if s.classification.verdict == LimitVerdict::Undetermined {
            warnings.push(format!("undetermined multiplier limit for parameter {c}"));
        }
        series.push(s);
    }
    let undetermined = !warnings.is_empty();
    let family = match args.family {
        FamilyArg::ExpTilt => "exp_tilt",
        FamilyArg::Window => "window",
    };
    Ok(Outcome {
        results: serde_json::to_value(&series)?,
        options: json!({ "family": family }),
        warnings,
        undetermined,
    })
}

pub fn lln(cfg: &RunConfig, input: Option<&Path>, args: &LlnArgs, art: &mut Artifacts) -> Result<Outcome> {
    let m = load_measure(cfg, input)?;
    let s = Sampler::with_cutoff(&m, cfg.seed, cfg.policies.comb_cutoff_tol)?;
    let wlln = wlln_experiment(&s, args.mean, args.epsilon, &args.ns, args.replications)?;
    let Some(&n_max) = args.ns.last() else {
        bail!("--ns must not be empty");
    };
    let trajectory = running_mean_trajectory(&s, n_max, args.stride, 0)?;
    let mut csv = Csv::new("n,running_mean");
    for p in &trajectory {
        csv.row(&[p.n.to_string(), p.running_mean.to_string()]);
    }
    art.csv("trajectory.csv", &csv)?;
    let stability = if s.is_cauchy() {
        cauchy_stability_demo(&s, args.stability_n, args.stability_replications)?
    } else {
        mean_vs_single_distance(&s, args.stability_n, args.stability_replications)?
    };
    let mut warnings = Vec::new();
    if s.truncation_bias() > 0.0 {
        warnings.push(format!(
            "comb sampling truncated; dropped weight at most {:e}",
            s.truncation_bias()
        ));
    }
    Ok(Outcome {
        results: json!({
            "wlln": wlln,
            "stability": stability,
            "trajectory_points": trajectory.len(),
        }),
        options: json!({
            "mean": args.mean,
            "epsilon": args.epsilon,
            "ns": args.ns,
            "replications": args.replications,
            "stride": args.stride,
            "stability_n": args.stability_n,
            "stability_replications": args.stability_replications,
        }),
        warnings,
        undetermined: false,
    })
}

pub fn maxent(cfg: &RunConfig, input: Option<&Path>) -> Result<Outcome> {
    let problem: MaxEntProblem = read_document(input)?;
    plain(maxent_solve_with(&problem, &cfg.policies.maxent)?, json!({}))
}

pub fn axioms(cfg: &RunConfig, args: &AxiomArgs) -> Result<Outcome> {
    let stats = args
        .statistics
        .iter()
        .map(|s| s.parse::<SampleStatistic>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut reports = Vec::new();
    for stat in &stats {
        for axiom in AxiomId::ALL {
            reports.push(check_axiom(stat, axiom, args.trials, cfg.seed)?);
        }
    }
    let coincidence = match stats.as_slice() {
        [a, b, ..] => Some(two_point_coincidence(a, b, args.trials, cfg.seed)?),
        _ => None,
    };
    plain(
        json!({ "reports": reports, "coincidence": coincidence }),
        json!({ "statistics": args.statistics, "trials": args.trials }),
    )
}

pub fn spectral(cfg: &RunConfig, input: Option<&Path>) -> Result<Outcome> {
    let doc: SpectralDocument = read_document(input)?;
    match doc {
        SpectralDocument {
            matrix: Some(matrix),
            state: Some(state),
            bridge: None,
        } => {
            let a = HermitianObservable::from_pairs(&matrix)?;
            let psi = StateVector::from_pairs(&state)?;
            plain(spectral_report(&a, &psi)?, json!({ "mode": "identities" }))
        }
        SpectralDocument {
            matrix: None,
            state: None,
            bridge: Some(family),
        } => {
            let bridge = DiagonalBridge { family };
            bridge.validate()?;
            let report = bridge_analyze(&bridge, &cfg.schedule, &cfg.policies.verdict)?;
            let warnings = report.inconsistencies.clone();
            Ok(Outcome {
                results: serde_json::to_value(&report)?,
                options: json!({ "mode": "bridge" }),
                warnings,
                undetermined: false,
            })
        }
        _ => bail!("spectral document needs either both \"matrix\" and \"state\" or only \"bridge\""),
    }
}
