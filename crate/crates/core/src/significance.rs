//! Surrogate nulls for zero transfer entropy, edge decisions and scoring.
//!
//! A surrogate circularly shifts the source column by a random offset in
//! `[L/4, 3L/4]`, which keeps the source's own dynamics and destroys its
//! timing relative to everything else.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::dynamics::DependencyGraph;
use crate::error::{Error, Result};
use crate::estimation::SymbolSeries;
use crate::flow::Conditioning;
use crate::rng::stream;

/// Nulls need at least this many surrogates.
pub const MIN_SURROGATES: usize = 20;
pub const DEFAULT_SURROGATES: usize = 200;
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Count cells beyond this make the fast evaluator refuse.
const MAX_EVALUATOR_CELLS: u64 = 1 << 26;

/// Surrogate statistics for one directed pair and their gamma fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModel {
    pub statistic_name: String,
    pub samples: Vec<f64>,
    /// Method-of-moments fit; `None` when the samples have zero variance.
    pub gamma_shape: Option<f64>,
    pub gamma_scale: Option<f64>,
    pub n_surrogates: usize,
}

impl NullModel {
    pub fn new(statistic_name: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < MIN_SURROGATES {
            return Err(Error::InvalidParameter(format!(
                "a null needs at least {MIN_SURROGATES} surrogates, got {}",
                samples.len()
            )));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
        let fitted = var > 0.0 && mean > 0.0;
        Ok(NullModel {
            statistic_name: statistic_name.into(),
            n_surrogates: samples.len(),
            gamma_shape: fitted.then(|| mean * mean / var),
            gamma_scale: fitted.then(|| var / mean),
            samples,
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.gamma_shape.is_none()
    }

    /// Largest surrogate statistic.
    pub fn max_sample(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PValueMethod {
    /// `(1 + #{samples ≥ observed}) / (1 + n)`.
    Empirical,
    /// Upper tail of the fitted gamma distribution.
    Gamma,
}

/// Surrogate ties within this distance of the observed statistic count as reaching it.
const TIE_TOLERANCE: f64 = 1e-12;

pub fn p_value(null: &NullModel, observed: f64, method: PValueMethod) -> Result<f64> {
    match method {
        PValueMethod::Empirical => {
            let reached = null.samples.iter().filter(|&&s| s >= observed - TIE_TOLERANCE).count();
            Ok((1 + reached) as f64 / (1 + null.n_surrogates) as f64)
        }
        PValueMethod::Gamma => {
            let (shape, scale) = null
                .gamma_shape
                .zip(null.gamma_scale)
                .ok_or(Error::UnfittedNull)?;
            if observed <= 0.0 {
                return Ok(1.0);
            }
            Ok(gamma_ur(shape, observed / scale))
        }
    }
}

/// Transfer entropy of one directed pair over one or more segments, with the
/// source column optionally rotated per segment.
///
/// Every window is coded as `(conditioning pasts, target present, source past)`;
/// only the source part moves under rotation, so each surrogate is one pass
/// over the data plus a small entropy sum.
#[derive(Debug, Clone)]
pub struct TransferEvaluator {
    /// Per segment: code of `(conditioning, target)` per window, scaled by the source space.
    base: Vec<Vec<u32>>,
    /// Per segment: circular source-past code for every position.
    source_history: Vec<Vec<u32>>,
    /// Per segment: first window position.
    span: usize,
    target_arity: usize,
    source_space: usize,
    cond_space: usize,
    total: f64,
    /// `H(C, a) − H(C)`, unaffected by rotation.
    fixed_part: f64,
}

impl TransferEvaluator {
    pub fn new(
        segments: &[SymbolSeries],
        source: usize,
        target: usize,
        order: usize,
        lag: usize,
        mode: Conditioning,
    ) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidSeries("no segments".into()))?;
        let n = first.n_vars();
        if source >= n || target >= n {
            return Err(Error::IndexOutOfRange(format!("pair ({source}, {target}) with {n} variables")));
        }
        if source == target {
            return Err(Error::SelfPair(source));
        }
        if order == 0 || lag == 0 {
            return Err(Error::InvalidParameter("order and lag must be at least 1".into()));
        }
        if segments.iter().any(|s| s.arities() != first.arities()) {
            return Err(Error::ShapeMismatch("segments differ in arities".into()));
        }
        let span = order * lag;
        for s in segments {
            if s.len() <= span {
                return Err(Error::SeriesTooShort(format!(
                    "length {} leaves no complete window for K = {order}, lag = {lag}",
                    s.len()
                )));
            }
        }
        let arities = first.arities();
        let conditioning: Vec<usize> = match mode {
            Conditioning::Pairwise => vec![target],
            Conditioning::Multivariate => (0..n).filter(|&v| v != source).collect(),
        };
        let pow = |m: usize| (m as u64).checked_pow(order as u32);
        let source_space = pow(arities[source]).ok_or(Error::SystemTooLarge(u128::MAX))?;
        let mut cond_space = 1u64;
        for &v in &conditioning {
            cond_space = cond_space
                .checked_mul(pow(arities[v]).ok_or(Error::SystemTooLarge(u128::MAX))?)
                .ok_or(Error::SystemTooLarge(u128::MAX))?;
        }
        let target_arity = arities[target];
        let cells = cond_space as u128 * target_arity as u128 * source_space as u128;
        if cells > MAX_EVALUATOR_CELLS as u128 {
            return Err(Error::SystemTooLarge(cells));
        }

        let history = |col: &[u32], m: usize, t: usize, len: usize| -> u64 {
            // Circular so rotated columns can reuse it; unrotated windows never wrap.
            (1..=order).fold(0u64, |acc, l| acc * m as u64 + col[(t + len * order * lag - l * lag) % len] as u64)
        };
        let mut base = Vec::with_capacity(segments.len());
        let mut source_history = Vec::with_capacity(segments.len());
        for s in segments {
            let len = s.len();
            let src = s.variable(source);
            source_history.push(
                (0..len)
                    .map(|t| history(src, arities[source], t, len) as u32)
                    .collect(),
            );
            base.push(
                (span..len)
                    .map(|t| {
                        let c = conditioning
                            .iter()
                            .fold(0u64, |acc, &v| acc * pow(arities[v]).unwrap() + history(s.variable(v), arities[v], t, len));
                        ((c * target_arity as u64 + s.variable(target)[t] as u64) * source_space) as u32
                    })
                    .collect::<Vec<u32>>(),
            );
        }
        let total: usize = base.iter().map(Vec::len).sum();

        let mut ca = vec![0u64; (cond_space * target_arity as u64) as usize];
        let mut c_only = vec![0u64; cond_space as usize];
        for seg in &base {
            for &code in seg {
                let ca_code = code as u64 / source_space;
                ca[ca_code as usize] += 1;
                c_only[(ca_code / target_arity as u64) as usize] += 1;
            }
        }
        let total_f = total as f64;
        let fixed_part = count_entropy(&ca, total_f) - count_entropy(&c_only, total_f);
        Ok(TransferEvaluator {
            base,
            source_history,
            span,
            target_arity,
            source_space: source_space as usize,
            cond_space: cond_space as usize,
            total: total_f,
            fixed_part,
        })
    }

    pub fn n_windows(&self) -> usize {
        self.total as usize
    }

    /// Statistic with segment `k`'s source rotated forward by `offsets[k]`
    /// (position `t` reads the source at `t − offset`).
    pub fn evaluate(&self, offsets: &[usize]) -> f64 {
        let mut cab = vec![0u32; self.cond_space * self.target_arity * self.source_space];
        for (k, (seg, hist)) in self.base.iter().zip(&self.source_history).enumerate() {
            let len = hist.len();
            let off = offsets.get(k).copied().unwrap_or(0) % len;
            for (w, &code) in seg.iter().enumerate() {
                let t = w + self.span;
                let u = if t >= off { t - off } else { t + len - off };
                cab[(code + hist[u]) as usize] += 1;
            }
        }
        // H(a | C) − H(a | C, b) = [H(C,a) − H(C)] − [H(C,a,b) − H(C,b)]
        let mut cb = vec![0u64; self.cond_space * self.source_space];
        for c in 0..self.cond_space {
            for a in 0..self.target_arity {
                let row = (c * self.target_arity + a) * self.source_space;
                for b in 0..self.source_space {
                    cb[c * self.source_space + b] += cab[row + b] as u64;
                }
            }
        }
        let h_cab = count_entropy_u32(&cab, self.total);
        let h_cb = count_entropy(&cb, self.total);
        let value = self.fixed_part - (h_cab - h_cb);
        value.max(0.0)
    }

    pub fn observed(&self) -> f64 {
        self.evaluate(&[])
    }

    /// Segment lengths, for drawing rotation offsets.
    pub fn segment_lengths(&self) -> Vec<usize> {
        self.source_history.iter().map(Vec::len).collect()
    }
}

fn count_entropy(counts: &[u64], total: f64) -> f64 {
    let s: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = c as f64;
            c * c.log2()
        })
        .sum();
    total.log2() - s / total
}

fn count_entropy_u32(counts: &[u32], total: f64) -> f64 {
    let s: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = c as f64;
            c * c.log2()
        })
        .sum();
    total.log2() - s / total
}

/// Offsets drawn uniformly from `[L/4, 3L/4]` per segment.
fn draw_offsets<R: Rng>(lengths: &[usize], rng: &mut R) -> Vec<usize> {
    lengths.iter().map(|&len| rng.random_range(len / 4..=3 * len / 4)).collect()
}

pub fn statistic_name(mode: Conditioning) -> &'static str {
    match mode {
        Conditioning::Pairwise => "PTE",
        Conditioning::Multivariate => "MTE",
    }
}

/// Null of zero transfer entropy from `source` to `target` by circular shifts
/// of the source. Surrogate `s` draws from stream `(seed, s)`.
pub fn surrogate_null(
    evaluator: &TransferEvaluator,
    mode: Conditioning,
    n_surrogates: usize,
    seed: u64,
) -> Result<NullModel> {
    if n_surrogates < MIN_SURROGATES {
        return Err(Error::InvalidParameter(format!(
            "a null needs at least {MIN_SURROGATES} surrogates, got {n_surrogates}"
        )));
    }
    let lengths = evaluator.segment_lengths();
    if lengths.iter().any(|&l| l < 4) {
        return Err(Error::SeriesTooShort("surrogate shifts need at least four steps".into()));
    }
    let samples: Vec<f64> = (0..n_surrogates)
        .into_par_iter()
        .map(|s| evaluator.evaluate(&draw_offsets(&lengths, &mut stream(seed, &[s as u64]))))
        .collect();
    NullModel::new(statistic_name(mode), samples)
}

/// Builds the evaluator and the null for one pair of a single series.
pub fn surrogate_null_for_pair(
    symbols: &SymbolSeries,
    source: usize,
    target: usize,
    order: usize,
    lag: usize,
    mode: Conditioning,
    n_surrogates: usize,
    seed: u64,
) -> Result<NullModel> {
    let evaluator = TransferEvaluator::new(std::slice::from_ref(symbols), source, target, order, lag, mode)?;
    surrogate_null(&evaluator, mode, n_surrogates, seed)
}

/// Settings shared by every pair test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceSettings {
    pub order: usize,
    pub lag: usize,
    pub mode: Conditioning,
    pub alpha: f64,
    pub n_surrogates: usize,
    pub seed: u64,
    pub method: PValueMethod,
}

impl InferenceSettings {
    pub fn new(order: usize, lag: usize, mode: Conditioning, seed: u64) -> Self {
        InferenceSettings {
            order,
            lag,
            mode,
            alpha: DEFAULT_ALPHA,
            n_surrogates: DEFAULT_SURROGATES,
            seed,
            method: PValueMethod::Empirical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub from: usize,
    pub to: usize,
    pub statistic_bits: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub graph: DependencyGraph,
    pub pairs: Vec<PairTest>,
}

/// Tests every directed pair; pair `k` (row-major over `(from, to)`) uses the
/// seed derived from `(seed, k)`. An edge is drawn when `p ≤ α`; with the
/// default 200 surrogates and `α = 0.01` no p-value equals `α`, so this is the
/// same decision as `p < α`, and `α = 1` yields the complete graph.
pub fn infer_graph(segments: &[SymbolSeries], settings: &InferenceSettings) -> Result<InferenceReport> {
    let n = segments
        .first()
        .ok_or_else(|| Error::InvalidSeries("no segments".into()))?
        .n_vars();
    if !(0.0..=1.0).contains(&settings.alpha) {
        return Err(Error::InvalidParameter(format!("alpha {} outside [0, 1]", settings.alpha)));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (j, i)))
        .collect();
    let tests: Vec<PairTest> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(from, to))| {
            let evaluator = TransferEvaluator::new(segments, from, to, settings.order, settings.lag, settings.mode)?;
            let observed = evaluator.observed();
            let null = surrogate_null(
                &evaluator,
                settings.mode,
                settings.n_surrogates,
                crate::rng::child_seed(settings.seed, &[k as u64]),
            )?;
            let p = p_value(&null, observed, settings.method)?;
            Ok(PairTest {
                from,
                to,
                statistic_bits: observed,
                p_value: p,
                significant: p <= settings.alpha,
            })
        })
        .collect::<Result<_>>()?;
    let graph = DependencyGraph::from_edges(n, tests.iter().filter(|t| t.significant).map(|t| (t.from, t.to)))?;
    Ok(InferenceReport { graph, pairs: tests })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceScore {
    pub pair_accuracy: f64,
    pub case_accuracy: f64,
    pub confusion: Confusion,
    pub n_cases: usize,
    pub n_pairs: usize,
}

pub fn score_inference(estimated: &[DependencyGraph], truth: &[DependencyGraph]) -> Result<InferenceScore> {
    if estimated.len() != truth.len() || estimated.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "{} estimated graphs for {} true graphs",
            estimated.len(),
            truth.len()
        )));
    }
    let mut confusion = Confusion::default();
    let mut perfect = 0;
    let mut n_pairs = 0;
    for (e, t) in estimated.iter().zip(truth) {
        if e.n_vars() != t.n_vars() {
            return Err(Error::ShapeMismatch("graphs differ in size".into()));
        }
        let mut wrong = 0;
        for j in 0..t.n_vars() {
            for i in (0..t.n_vars()).filter(|&i| i != j) {
                n_pairs += 1;
                match (e.has_edge(j, i), t.has_edge(j, i)) {
                    (true, true) => confusion.true_pos += 1,
                    (true, false) => {
                        confusion.false_pos += 1;
                        wrong += 1;
                    }
                    (false, false) => confusion.true_neg += 1,
                    (false, true) => {
                        confusion.false_neg += 1;
                        wrong += 1;
                    }
                }
            }
        }
        if wrong == 0 {
            perfect += 1;
        }
    }
    Ok(InferenceScore {
        pair_accuracy: (confusion.true_pos + confusion.true_neg) as f64 / n_pairs as f64,
        case_accuracy: perfect as f64 / truth.len() as f64,
        confusion,
        n_cases: truth.len(),
        n_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{count_windows, count_windows_segments, fit_mle};
    use crate::flow::transfer_entropy;

    fn random_symbols(n: usize, len: usize, seed: u64) -> SymbolSeries {
        let mut rng = stream(seed, &[]);
        SymbolSeries::new(
            vec![2; n],
            (0..n).map(|_| (0..len).map(|_| rng.random_range(0..2)).collect()).collect(),
        )
        .unwrap()
    }

    fn copy_pair(len: usize, seed: u64) -> SymbolSeries {
        let mut rng = stream(seed, &[]);
        let x: Vec<u32> = (0..len).map(|_| rng.random_range(0..2)).collect();
        let mut y = vec![0];
        y.extend_from_slice(&x[..len - 1]);
        SymbolSeries::new(vec![2, 2], vec![x, y]).unwrap()
    }

    #[test]
    fn evaluator_matches_table_path() {
        let mut rng = stream(31, &[]);
        // correlated three-variable series with mixed arities
        let len = 3000;
        let a: Vec<u32> = (0..len).map(|_| rng.random_range(0..3)).collect();
        let b: Vec<u32> = (0..len).map(|t| if t > 0 && rng.random_bool(0.7) { a[t - 1] % 2 } else { rng.random_range(0..2) }).collect();
        let c: Vec<u32> = (0..len).map(|t| if t > 1 { (a[t - 2] + b[t - 1]) % 2 } else { 0 }).collect();
        let s = SymbolSeries::new(vec![3, 2, 2], vec![a, b, c]).unwrap();
        for (order, lag) in [(1, 1), (2, 1), (1, 2), (3, 1)] {
            let model = fit_mle(&count_windows(&s, order, lag).unwrap()).unwrap();
            for mode in [Conditioning::Pairwise, Conditioning::Multivariate] {
                for (j, i) in [(0, 1), (1, 2), (2, 0), (0, 2)] {
                    let fast = TransferEvaluator::new(std::slice::from_ref(&s), j, i, order, lag, mode)
                        .unwrap()
                        .observed();
                    let slow = transfer_entropy(&model, j, i, mode).unwrap().max(0.0);
                    assert!((fast - slow).abs() < 1e-12, "{order} {lag} {mode:?} {j}->{i}: {fast} vs {slow}");
                }
            }
        }
    }

    #[test]
    fn evaluator_handles_segments() {
        let a = random_symbols(3, 500, 1);
        let b = random_symbols(3, 700, 2);
        let model = fit_mle(&count_windows_segments(&[a.clone(), b.clone()], 2, 1).unwrap()).unwrap();
        let slow = transfer_entropy(&model, 0, 2, Conditioning::Multivariate).unwrap();
        let fast = TransferEvaluator::new(&[a, b], 0, 2, 2, 1, Conditioning::Multivariate)
            .unwrap()
            .observed();
        assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn rotation_matches_rotated_data() {
        let s = random_symbols(2, 1000, 3);
        let off = 317;
        let src = s.variable(0);
        let rotated: Vec<u32> = (0..1000).map(|t| src[(t + 1000 - off) % 1000]).collect();
        let r = SymbolSeries::new(vec![2, 2], vec![rotated, s.variable(1).to_vec()]).unwrap();
        let e = TransferEvaluator::new(std::slice::from_ref(&s), 0, 1, 2, 1, Conditioning::Pairwise).unwrap();
        let direct = TransferEvaluator::new(std::slice::from_ref(&r), 0, 1, 2, 1, Conditioning::Pairwise).unwrap();
        // Window t of the rotated copy reads src[(t − l − off) mod L], as the evaluator does.
        assert!((e.evaluate(&[off]) - direct.observed()).abs() < 1e-12);
        assert!(e.evaluate(&[0]) == e.observed());
    }

    #[test]
    fn copy_process_beats_every_surrogate() {
        let s = copy_pair(10_000, 4);
        let e = TransferEvaluator::new(std::slice::from_ref(&s), 0, 1, 1, 1, Conditioning::Multivariate).unwrap();
        let null = surrogate_null(&e, Conditioning::Multivariate, 200, 5).unwrap();
        let obs = e.observed();
        assert!(obs > null.max_sample());
        assert_eq!(p_value(&null, obs, PValueMethod::Empirical).unwrap(), 1.0 / 201.0);
        assert!(p_value(&null, obs, PValueMethod::Gamma).unwrap() < 1e-6);
        assert!((p_value(&null, 0.0, PValueMethod::Empirical).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_source_gives_degenerate_null() {
        let mut s = random_symbols(2, 2000, 6).symbols().to_vec();
        s[0] = vec![1; 2000];
        let s = SymbolSeries::new(vec![2, 2], s).unwrap();
        let e = TransferEvaluator::new(std::slice::from_ref(&s), 0, 1, 2, 1, Conditioning::Multivariate).unwrap();
        let null = surrogate_null(&e, Conditioning::Multivariate, 50, 7).unwrap();
        assert!(null.samples.iter().all(|&x| x == 0.0));
        assert!(null.is_degenerate());
        assert_eq!(p_value(&null, e.observed(), PValueMethod::Empirical).unwrap(), 1.0);
        assert_eq!(p_value(&null, 0.1, PValueMethod::Gamma).unwrap_err(), Error::UnfittedNull);
    }

    #[test]
    fn gamma_fit_reproduces_moments() {
        let samples: Vec<f64> = (1..=40).map(|k| 0.001 * k as f64 + 0.0003 * (k % 7) as f64).collect();
        let null = NullModel::new("MTE", samples.clone()).unwrap();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let (k, theta) = (null.gamma_shape.unwrap(), null.gamma_scale.unwrap());
        assert!((k * theta - mean).abs() < 1e-9);
        assert!((k * theta * theta - var).abs() < 1e-9);
        // tail at the mean vs the empirical tail
        let g = p_value(&null, mean, PValueMethod::Gamma).unwrap();
        let emp = samples.iter().filter(|&&s| s >= mean).count() as f64 / n;
        assert!((g - emp).abs() < 0.1);
        assert!(NullModel::new("MTE", vec![0.1; 10]).is_err());
    }

    #[test]
    fn empirical_p_is_monotone() {
        let null = NullModel::new("PTE", (0..50).map(|k| (k as f64).sqrt() * 1e-3).collect()).unwrap();
        let mut last = 1.0;
        for k in 0..100 {
            let p = p_value(&null, k as f64 * 1e-4, PValueMethod::Empirical).unwrap();
            assert!(p <= last);
            last = p;
        }
    }

    #[test]
    fn inference_is_deterministic_and_alpha_one_is_complete() {
        let s = random_symbols(3, 3000, 8);
        let mut settings = InferenceSettings::new(1, 1, Conditioning::Multivariate, 9);
        settings.n_surrogates = 40;
        let a = infer_graph(std::slice::from_ref(&s), &settings).unwrap();
        let b = infer_graph(std::slice::from_ref(&s), &settings).unwrap();
        assert_eq!(a, b);
        settings.alpha = 1.0;
        let c = infer_graph(std::slice::from_ref(&s), &settings).unwrap();
        assert_eq!(c.graph, DependencyGraph::complete(3));
    }

    #[test]
    fn scoring_examples() {
        let classes = crate::dynamics::enumerate_topologies(3).unwrap();
        let truth: Vec<DependencyGraph> = classes.iter().map(|c| c.representative.clone()).collect();
        let s = score_inference(&truth, &truth).unwrap();
        assert_eq!((s.pair_accuracy, s.case_accuracy), (1.0, 1.0));

        let mut est = truth.clone();
        let flip = est[5].has_edge(0, 1);
        est[5].set_edge(0, 1, !flip);
        let s = score_inference(&est, &truth).unwrap();
        assert!((s.pair_accuracy - 95.0 / 96.0).abs() < 1e-15);
        assert!((s.case_accuracy - 15.0 / 16.0).abs() < 1e-15);

        let empty = vec![DependencyGraph::empty(3); 16];
        let edges: usize = truth.iter().map(|g| g.edges().len()).sum();
        let s = score_inference(&empty, &truth).unwrap();
        assert!((s.pair_accuracy - (1.0 - edges as f64 / 96.0)).abs() < 1e-15);
        assert_eq!(s.confusion.false_neg, edges);
        assert!(score_inference(&empty[..3], &truth).is_err());
    }
}
