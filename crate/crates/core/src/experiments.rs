//! Inference benchmarks over simulated systems: coupled tent map topologies
//! and the Lorenz lag sweep.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ctml_generate, enumerate_topologies, lorenz_sets, CtmlConfig, DependencyGraph, LorenzParams};
use crate::error::{Error, Result};
use crate::estimation::{symbolize_median, SymbolSeries};
use crate::flow::Conditioning;
use crate::rng::{child_seed, stream};
use crate::significance::{infer_graph, score_inference, InferenceReport, InferenceScore, InferenceSettings, PValueMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyBenchConfig {
    pub n_vars: usize,
    pub epsilon: f64,
    pub noise_amplitude: f64,
    pub steps: usize,
    pub burn_in: usize,
    pub order: usize,
    pub lag: usize,
    pub alpha: f64,
    pub n_surrogates: usize,
    pub seed: u64,
    /// Seeded subset of the canonical cases; `None` runs all of them.
    pub case_limit: Option<usize>,
}

impl TopologyBenchConfig {
    pub fn new(n_vars: usize, seed: u64) -> Self {
        TopologyBenchConfig {
            n_vars,
            epsilon: 0.2,
            noise_amplitude: 0.0,
            steps: 100_000,
            burn_in: 1000,
            order: 3,
            lag: 1,
            alpha: crate::significance::DEFAULT_ALPHA,
            n_surrogates: crate::significance::DEFAULT_SURROGATES,
            seed,
            case_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    /// Index into the canonical class list.
    pub case: usize,
    pub truth: DependencyGraph,
    pub mte: InferenceReport,
    pub pte: InferenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyBenchResult {
    pub cases: Vec<CaseResult>,
    pub mte: InferenceScore,
    pub pte: InferenceScore,
}

/// Indices of the cases a run covers: all classes, or a sorted seeded sample.
pub fn select_cases(n_classes: usize, limit: Option<usize>, seed: u64) -> Vec<usize> {
    match limit {
        Some(k) if k < n_classes => {
            let mut picked = sample(&mut stream(seed, &[u64::MAX]), n_classes, k).into_vec();
            picked.sort_unstable();
            picked
        }
        _ => (0..n_classes).collect(),
    }
}

/// Simulates every selected topology and infers it in both modes. Case `k`
/// simulates with seed `(seed, k, 0)` and tests with `(seed, k, 1)`.
pub fn run_topology_bench(config: &TopologyBenchConfig) -> Result<TopologyBenchResult> {
    if config.order == 0 || config.lag == 0 {
        return Err(Error::InvalidParameter("order and lag must be at least 1".into()));
    }
    let classes = enumerate_topologies(config.n_vars)?;
    let selected = select_cases(classes.len(), config.case_limit, config.seed);
    let cases: Vec<CaseResult> = selected
        .par_iter()
        .map(|&k| {
            let truth = classes[k].representative.clone();
            let mut sim = CtmlConfig::new(truth.clone(), config.epsilon, config.steps, child_seed(config.seed, &[k as u64, 0]));
            sim.noise_amplitude = config.noise_amplitude;
            sim.burn_in = config.burn_in;
            let symbols = symbolize_median(&ctml_generate(&sim)?).symbols;
            let settings = |mode| InferenceSettings {
                order: config.order,
                lag: config.lag,
                mode,
                alpha: config.alpha,
                n_surrogates: config.n_surrogates,
                seed: child_seed(config.seed, &[k as u64, 1]),
                method: PValueMethod::Empirical,
            };
            let data = std::slice::from_ref(&symbols);
            Ok(CaseResult {
                case: k,
                mte: infer_graph(data, &settings(Conditioning::Multivariate))?,
                pte: infer_graph(data, &settings(Conditioning::Pairwise))?,
                truth,
            })
        })
        .collect::<Result<_>>()?;
    let truths: Vec<DependencyGraph> = cases.iter().map(|c| c.truth.clone()).collect();
    let graphs = |f: fn(&CaseResult) -> &InferenceReport| cases.iter().map(|c| f(c).graph.clone()).collect::<Vec<_>>();
    Ok(TopologyBenchResult {
        mte: score_inference(&graphs(|c| &c.mte), &truths)?,
        pte: score_inference(&graphs(|c| &c.pte), &truths)?,
        cases,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSweepConfig {
    pub params: LorenzParams,
    pub lags: Vec<f64>,
    pub order: usize,
    pub mode: Conditioning,
    pub alpha: f64,
    pub n_surrogates: usize,
    pub seed: u64,
    pub method: PValueMethod,
}

impl LagSweepConfig {
    pub fn new(mode: Conditioning, seed: u64) -> Self {
        LagSweepConfig {
            params: LorenzParams::default(),
            lags: vec![0.02, 0.04, 0.06, 0.08, 0.10],
            order: 1,
            mode,
            alpha: crate::significance::DEFAULT_ALPHA,
            n_surrogates: crate::significance::DEFAULT_SURROGATES,
            seed,
            method: PValueMethod::Empirical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagResult {
    pub lag: f64,
    pub n_samples: usize,
    pub report: InferenceReport,
}

/// One inference per resampling interval. Each run is symbolized at its own
/// median and the pairs are tested on the pooled windows of all runs. Lag `k`
/// simulates with seed `(seed, k, 0)` and tests with `(seed, k, 1)`.
pub fn run_lag_sweep(config: &LagSweepConfig) -> Result<Vec<LagResult>> {
    config
        .lags
        .iter()
        .enumerate()
        .map(|(k, &lag)| {
            let runs = lorenz_sets(&config.params, lag, child_seed(config.seed, &[k as u64, 0]))?;
            let segments: Vec<SymbolSeries> = runs.iter().map(|r| symbolize_median(r).symbols).collect();
            let settings = InferenceSettings {
                order: config.order,
                lag: 1,
                mode: config.mode,
                alpha: config.alpha,
                n_surrogates: config.n_surrogates,
                seed: child_seed(config.seed, &[k as u64, 1]),
                method: config.method,
            };
            Ok(LagResult {
                lag,
                n_samples: segments.iter().map(SymbolSeries::len).sum(),
                report: infer_graph(&segments, &settings)?,
            })
        })
        .collect()
}
