//! One function per subcommand: merge the config, fill defaults, run, write.

use std::path::{Path, PathBuf};

use infoflow_core::dynamics::{ctml_generate, enumerate_topologies, lorenz_generate, CtmlConfig, DependencyGraph, LorenzParams};
use infoflow_core::estimation::{estimate_network, symbolize_median, symbolize_quantile, RealSeries, SymbolSeries, Symbolization};
use infoflow_core::experiments::{run_lag_sweep, run_topology_bench, LagSweepConfig, TopologyBenchConfig};
use infoflow_core::flow::{verify_network_theorems, Conditioning};
use infoflow_core::io;
use infoflow_core::lattice::{verify_all_lemmas, LatticeSystem, VerificationReport};
use infoflow_core::rng::{child_seed, stream};
use infoflow_core::significance::{infer_graph, InferenceReport, InferenceSettings, DEFAULT_ALPHA, DEFAULT_SURROGATES};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::config::merge;
use crate::error::CliError;
use crate::output::{config_line, number, open, write_csv, write_json};

const REPORT_HEADER: [&str; 6] = ["lag", "from", "to", "statistic_bits", "p_value", "significant"];
/// Subset size for N ≥ 4 benchmark runs unless every case is requested.
const DEFAULT_CASE_LIMIT: usize = 40;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate { system } => match system {
            SimulateCommand::Lorenz(a) => simulate_lorenz(a),
            SimulateCommand::Ctml(a) => simulate_ctml(a),
        },
        Command::Symbolize(a) => symbolize(a),
        Command::Network(a) => network(a),
        Command::Infer(a) => infer(a),
        Command::LagSweep(a) => lag_sweep(a),
        Command::BenchTable1(a) => bench_table1(a),
        Command::Verify(a) => verify(a),
        Command::Topologies(a) => topologies(a),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn write_series_csv<C: Serialize>(path: Option<&Path>, config: &C, series: &RealSeries) -> Result<(), CliError> {
    let out = open(path)?;
    Ok(io::write_series(series, &[config_line(config)], out)?)
}

#[derive(Serialize)]
struct LorenzRun {
    command: &'static str,
    params: LorenzParams,
    dt: f64,
    samples: usize,
    seed: u64,
    output: Option<PathBuf>,
}

fn simulate_lorenz(a: LorenzArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let d = LorenzParams::default();
    let params = LorenzParams {
        sigma: a.sigma.unwrap_or(d.sigma),
        rho: a.rho.unwrap_or(d.rho),
        beta: a.beta.unwrap_or(d.beta),
        initial: d.initial,
        t0: a.t0.unwrap_or(d.t0),
        t1: a.t1.unwrap_or(d.t1),
        dt_integrate: a.dt_integrate.unwrap_or(d.dt_integrate),
    };
    let dt = a.dt.unwrap_or(0.01);
    if !(dt > 0.0) || !(params.t1 > params.t0) {
        return Err(CliError::Usage("need --dt > 0 and t1 > t0".into()));
    }
    let run = LorenzRun {
        command: "simulate lorenz",
        samples: a.samples.unwrap_or_else(|| params.max_samples(dt)),
        params,
        dt,
        seed: a.seed.unwrap_or(0),
        output: a.common.output.clone(),
    };
    let series = lorenz_generate(&run.params, run.dt, run.samples, run.seed)?;
    write_series_csv(run.output.as_deref(), &run, &series)
}

/// `0>1,2>1` style edge lists.
fn parse_edges(n: usize, text: &str) -> Result<DependencyGraph, CliError> {
    let mut edges = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (from, to) = part
            .split_once('>')
            .and_then(|(f, t)| Some((f.trim().parse().ok()?, t.trim().parse().ok()?)))
            .ok_or_else(|| CliError::Usage(format!("bad edge {part:?}; expected from>to")))?;
        edges.push((from, to));
    }
    Ok(DependencyGraph::from_edges(n, edges)?)
}

#[derive(Serialize)]
struct CtmlRun {
    command: &'static str,
    n_vars: usize,
    edges: Vec<(usize, usize)>,
    epsilon: f64,
    noise: f64,
    steps: usize,
    burn_in: usize,
    seed: u64,
    output: Option<PathBuf>,
}

fn simulate_ctml(a: CtmlArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let n = a.n_vars.unwrap_or(3);
    if n == 0 || n > 64 {
        return Err(CliError::Usage("--n-vars must be between 1 and 64".into()));
    }
    let topology = match (&a.edges, a.code) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give --edges or --code, not both".into())),
        (Some(e), None) => parse_edges(n, e)?,
        (None, Some(c)) => {
            if n * (n - 1) < 64 && c >> (n * (n - 1)) != 0 {
                return Err(CliError::Usage(format!("code {c} has bits beyond the {} pairs", n * (n - 1))));
            }
            DependencyGraph::from_code(n, c)
        }
        (None, None) => DependencyGraph::empty(n),
    };
    let run = CtmlRun {
        command: "simulate ctml",
        n_vars: n,
        edges: topology.edges(),
        epsilon: a.epsilon.unwrap_or(0.2),
        noise: a.noise.unwrap_or(0.0),
        steps: a.steps.unwrap_or(100_000),
        burn_in: a.burn_in.unwrap_or(1000),
        seed: a.seed.unwrap_or(0),
        output: a.common.output.clone(),
    };
    let mut cfg = CtmlConfig::new(topology, run.epsilon, run.steps, run.seed);
    cfg.noise_amplitude = run.noise;
    cfg.burn_in = run.burn_in;
    let series = ctml_generate(&cfg)?;
    write_series_csv(run.output.as_deref(), &run, &series)
}

fn symbolize_series(series: &RealSeries, bins: usize) -> Result<SymbolSeries, CliError> {
    let Symbolization {
        symbols,
        constant_variables,
    } = if bins == 2 {
        symbolize_median(series)
    } else {
        symbolize_quantile(series, bins)?
    };
    for v in constant_variables {
        eprintln!("warning: variable {:?} is constant", series.names()[v]);
    }
    Ok(symbols)
}

/// Reads the input as symbols or as real values to be symbolized.
fn load(e: &Estimation) -> Result<(Vec<String>, SymbolSeries), CliError> {
    let path = required(e.input.as_deref(), "input")?;
    if e.symbols {
        Ok(io::read_symbols_file(path)?)
    } else {
        let series = io::read_series_file(path)?;
        let symbols = symbolize_series(&series, e.bins.unwrap_or(2))?;
        Ok((series.names().to_vec(), symbols))
    }
}

#[derive(Serialize)]
struct SymbolizeRun {
    command: &'static str,
    input: PathBuf,
    bins: usize,
    output: Option<PathBuf>,
}

fn symbolize(a: SymbolizeArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let run = SymbolizeRun {
        command: "symbolize",
        input: required(a.input, "input")?,
        bins: a.bins.unwrap_or(2),
        output: a.common.output.clone(),
    };
    let series = io::read_series_file(&run.input)?;
    let symbols = symbolize_series(&series, run.bins)?;
    let out = open(run.output.as_deref())?;
    Ok(io::write_symbols(series.names(), &symbols, &[config_line(&run)], out)?)
}

#[derive(Serialize)]
struct EstimationRun {
    input: PathBuf,
    symbols: bool,
    bins: usize,
    order: usize,
    mode: Mode,
}

impl EstimationRun {
    fn resolve(e: &Estimation) -> Result<Self, CliError> {
        Ok(EstimationRun {
            input: required(e.input.clone(), "input")?,
            symbols: e.symbols,
            bins: e.bins.unwrap_or(2),
            order: e.order.unwrap_or(1),
            mode: e.mode.unwrap_or(Mode::Mte),
        })
    }
}

#[derive(Serialize)]
struct NetworkRun {
    command: &'static str,
    #[serde(flatten)]
    estimation: EstimationRun,
    lag: usize,
    output: Option<PathBuf>,
}

fn network(a: NetworkArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let run = NetworkRun {
        command: "network",
        estimation: EstimationRun::resolve(&a.estimation)?,
        lag: a.lag.unwrap_or(1),
        output: a.common.output.clone(),
    };
    let (names, symbols) = load(&a.estimation)?;
    let net = estimate_network(&symbols, run.estimation.order, run.lag, run.estimation.mode.into())?;
    write_json(run.output.as_deref(), &run, &json!({ "names": names, "network": net }))
}

#[derive(Serialize)]
struct TestingRun {
    alpha: f64,
    surrogates: usize,
    seed: u64,
    method: Method,
}

impl TestingRun {
    fn resolve(t: &Testing) -> Result<Self, CliError> {
        let alpha = t.alpha.unwrap_or(DEFAULT_ALPHA);
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CliError::Usage(format!("--alpha {alpha} outside [0, 1]")));
        }
        Ok(TestingRun {
            alpha,
            surrogates: t.surrogates.unwrap_or(DEFAULT_SURROGATES),
            seed: t.seed.unwrap_or(0),
            method: t.method.unwrap_or(Method::Empirical),
        })
    }

    fn settings(&self, order: usize, lag: usize, mode: Conditioning, seed: u64) -> InferenceSettings {
        InferenceSettings {
            order,
            lag,
            mode,
            alpha: self.alpha,
            n_surrogates: self.surrogates,
            seed,
            method: self.method.into(),
        }
    }
}

fn report_rows(lag: &str, names: &[String], report: &InferenceReport) -> Vec<Vec<String>> {
    report
        .pairs
        .iter()
        .map(|p| {
            vec![
                lag.to_owned(),
                names[p.from].clone(),
                names[p.to].clone(),
                number(p.statistic_bits),
                number(p.p_value),
                p.significant.to_string(),
            ]
        })
        .collect()
}

#[derive(Serialize)]
struct InferRun {
    command: &'static str,
    #[serde(flatten)]
    estimation: EstimationRun,
    #[serde(flatten)]
    testing: TestingRun,
    lag: usize,
    output: Option<PathBuf>,
}

fn infer(a: InferArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let run = InferRun {
        command: "infer",
        estimation: EstimationRun::resolve(&a.estimation)?,
        testing: TestingRun::resolve(&a.testing)?,
        lag: a.lag.unwrap_or(1),
        output: a.common.output.clone(),
    };
    let (names, symbols) = load(&a.estimation)?;
    let settings = run
        .testing
        .settings(run.estimation.order, run.lag, run.estimation.mode.into(), run.testing.seed);
    let report = infer_graph(std::slice::from_ref(&symbols), &settings)?;
    write_csv(run.output.as_deref(), &run, &REPORT_HEADER, &report_rows(&run.lag.to_string(), &names, &report))
}

#[derive(Serialize)]
struct LagSweepRun {
    command: &'static str,
    /// `None` means a Lorenz run with default parameters.
    input: Option<PathBuf>,
    symbols: bool,
    bins: usize,
    order: usize,
    mode: Mode,
    #[serde(flatten)]
    testing: TestingRun,
    lags: Vec<f64>,
    output: Option<PathBuf>,
}

fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("bad lag {s:?}")))
        })
        .collect()
}

/// Lags are steps for file input (one test per lag, seeds `(seed, k)`) and
/// resampling intervals for the built-in Lorenz system.
fn lag_sweep(a: LagSweepArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let e = &a.estimation;
    let run = LagSweepRun {
        command: "lag-sweep",
        input: e.input.clone(),
        symbols: e.symbols,
        bins: e.bins.unwrap_or(2),
        order: e.order.unwrap_or(1),
        mode: e.mode.unwrap_or(Mode::Mte),
        testing: TestingRun::resolve(&a.testing)?,
        lags: match &a.lags {
            Some(text) => parse_list(text)?,
            None if e.input.is_some() => vec![1.0],
            None => vec![0.02, 0.04, 0.06, 0.08, 0.10],
        },
        output: a.common.output.clone(),
    };
    if run.lags.is_empty() {
        return Err(CliError::Usage("--lags is empty".into()));
    }
    let mut rows = Vec::new();
    if run.input.is_some() {
        let (names, symbols) = load(e)?;
        for (k, &lag) in run.lags.iter().enumerate() {
            if lag.fract() != 0.0 {
                return Err(CliError::Usage(format!("lag {lag} must be a whole number of steps for file input")));
            }
            let settings = run
                .testing
                .settings(run.order, lag as usize, run.mode.into(), child_seed(run.testing.seed, &[k as u64]));
            let report = infer_graph(std::slice::from_ref(&symbols), &settings)?;
            rows.extend(report_rows(&(lag as usize).to_string(), &names, &report));
        }
    } else {
        let cfg = LagSweepConfig {
            lags: run.lags.clone(),
            order: run.order,
            alpha: run.testing.alpha,
            n_surrogates: run.testing.surrogates,
            method: run.testing.method.into(),
            ..LagSweepConfig::new(run.mode.into(), run.testing.seed)
        };
        let names: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
        for r in run_lag_sweep(&cfg)? {
            rows.extend(report_rows(&number(r.lag), &names, &r.report));
        }
    }
    write_csv(run.output.as_deref(), &run, &REPORT_HEADER, &rows)
}

fn edge_list(g: &DependencyGraph) -> String {
    g.edges().iter().map(|(j, i)| format!("{j}>{i}")).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct BenchRun {
    command: &'static str,
    #[serde(flatten)]
    bench: TopologyBenchConfig,
    output: Option<PathBuf>,
    cases_output: Option<PathBuf>,
}

fn bench_table1(a: BenchArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let n = a.n_vars.unwrap_or(3);
    let d = TopologyBenchConfig::new(n, a.seed.unwrap_or(0));
    let bench = TopologyBenchConfig {
        epsilon: a.epsilon.unwrap_or(d.epsilon),
        noise_amplitude: a.noise.unwrap_or(d.noise_amplitude),
        steps: a.steps.unwrap_or(d.steps),
        order: a.order.unwrap_or(d.order),
        lag: a.lag.unwrap_or(d.lag),
        alpha: a.alpha.unwrap_or(d.alpha),
        n_surrogates: a.surrogates.unwrap_or(d.n_surrogates),
        case_limit: match (a.case_limit, a.all_cases) {
            (Some(k), _) => Some(k),
            (None, true) => None,
            (None, false) if n >= 4 => Some(DEFAULT_CASE_LIMIT),
            (None, false) => None,
        },
        ..d
    };
    let run = BenchRun {
        command: "bench-table1",
        bench,
        output: a.common.output.clone(),
        cases_output: a.cases_output.clone(),
    };
    let result = run_topology_bench(&run.bench)?;
    let cases: Vec<_> = result
        .cases
        .iter()
        .map(|c| {
            json!({
                "case": c.case,
                "code": c.truth.code(),
                "truth": c.truth,
                "mte": c.mte.graph,
                "pte": c.pte.graph,
            })
        })
        .collect();
    if let Some(path) = &run.cases_output {
        let rows: Vec<Vec<String>> = result
            .cases
            .iter()
            .map(|c| {
                vec![
                    c.case.to_string(),
                    c.truth.code().to_string(),
                    edge_list(&c.truth),
                    edge_list(&c.mte.graph),
                    edge_list(&c.pte.graph),
                    (c.mte.graph == c.truth).to_string(),
                    (c.pte.graph == c.truth).to_string(),
                ]
            })
            .collect();
        write_csv(
            Some(path),
            &run,
            &["case", "code", "truth", "mte", "pte", "mte_correct", "pte_correct"],
            &rows,
        )?;
    }
    write_json(
        run.output.as_deref(),
        &run,
        &json!({ "mte": result.mte, "pte": result.pte, "cases": cases }),
    )
}

#[derive(Serialize)]
struct VerifyRun {
    command: &'static str,
    suite: Suite,
    trials: usize,
    n_vars: usize,
    t_steps: usize,
    seed: u64,
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Trial {
    trial: usize,
    reports: Vec<VerificationReport>,
}

/// Trial `k` draws its system from stream `(seed, k)`. Exit code 3 when any
/// hard check fails; diagnostics are reported but never fail the run.
fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let suite = a.suite.unwrap_or(Suite::Lemmas);
    let run = VerifyRun {
        command: "verify",
        suite,
        trials: a.trials.unwrap_or(200),
        n_vars: a.n_vars.unwrap_or(3),
        t_steps: a.t_steps.unwrap_or(2),
        seed: a.seed.unwrap_or(0),
        output: a.common.output.clone(),
    };
    if run.n_vars == 0 || run.t_steps == 0 || (suite == Suite::Network && run.n_vars < 2) {
        return Err(CliError::Usage("need --n-vars ≥ 1 (≥ 2 for network) and --t-steps ≥ 1".into()));
    }
    let trials: Vec<Trial> = (0..run.trials)
        .map(|k| {
            let system = LatticeSystem::random(run.n_vars, run.t_steps, 2, &mut stream(run.seed, &[k as u64]))?;
            let reports = match suite {
                Suite::Lemmas => verify_all_lemmas(&system)?,
                Suite::Network => verify_network_theorems(&system)?,
            };
            Ok(Trial { trial: k, reports })
        })
        .collect::<Result<_, infoflow_core::Error>>()?;
    let hard: Vec<&VerificationReport> = trials.iter().flat_map(|t| &t.reports).filter(|r| r.hard).collect();
    let failures = hard.iter().filter(|r| !r.passed).count();
    let max_gap = hard.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
    let summary = json!({
        "trials": run.trials,
        "hard_checks": hard.len(),
        "hard_failures": failures,
        "max_hard_gap": max_gap,
        "passed": failures == 0,
    });
    write_json(run.output.as_deref(), &run, &json!({ "summary": summary, "trials": trials }))?;
    if failures > 0 {
        return Err(CliError::Verification(format!("{failures} of {} hard checks failed", hard.len())));
    }
    Ok(())
}

#[derive(Serialize)]
struct TopologiesRun {
    command: &'static str,
    n_vars: usize,
    output: Option<PathBuf>,
}

fn topologies(a: TopologiesArgs) -> Result<(), CliError> {
    let a = merge(a.clone(), a.common.config.as_deref())?;
    let run = TopologiesRun {
        command: "topologies",
        n_vars: a.n_vars.unwrap_or(3),
        output: a.common.output.clone(),
    };
    let classes = enumerate_topologies(run.n_vars)?;
    let listed: Vec<_> = classes
        .iter()
        .enumerate()
        .map(|(k, c)| {
            json!({
                "index": k,
                "code": c.representative.code(),
                "size": c.size,
                "graph": c.representative,
            })
        })
        .collect();
    write_json(
        run.output.as_deref(),
        &run,
        &json!({ "n_vars": run.n_vars, "n_classes": classes.len(), "classes": listed }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_parsing() {
        let g = parse_edges(3, "0>1, 2>1").unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (2, 1)]);
        assert!(matches!(parse_edges(3, "0-1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_edges(3, "1>1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_edges(3, "0>5"), Err(CliError::Usage(_))));
        assert_eq!(edge_list(&g), "0>1 2>1");
    }

    #[test]
    fn lag_lists() {
        assert_eq!(parse_list("0.02, 0.04").unwrap(), vec![0.02, 0.04]);
        assert!(parse_list("0.02,-1").is_err());
        assert!(parse_list("x").is_err());
    }
}
