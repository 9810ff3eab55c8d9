//! From real-valued series to a fitted window model: symbolization, lagged
//! window counting and the multinomial maximum-likelihood fit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{build_network, Conditioning, InfoNetwork, ProcessModel};
use crate::info::{tuple_space, JointTable};

/// Dense count arrays are used up to this many window cells.
const DENSE_COUNT_LIMIT: u64 = 1 << 22;

/// `N` real-valued series of equal length, stored per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSeries {
    names: Vec<String>,
    values: Vec<Vec<f64>>,
    sample_interval: Option<f64>,
}

impl RealSeries {
    pub fn new(names: Vec<String>, values: Vec<Vec<f64>>, sample_interval: Option<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("no variables".into()));
        }
        if names.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} names for {} variables",
                names.len(),
                values.len()
            )));
        }
        let len = values[0].len();
        if values.iter().any(|v| v.len() != len) {
            return Err(Error::InvalidSeries("variables differ in length".into()));
        }
        if len < 2 {
            return Err(Error::SeriesTooShort(format!("length {len} < 2")));
        }
        for (i, v) in values.iter().enumerate() {
            if let Some(t) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidSeries(format!("non-finite value in variable {i} at step {t}")));
            }
        }
        Ok(RealSeries {
            names,
            values,
            sample_interval,
        })
    }

    /// Series with default names `x0, x1, …`.
    pub fn unnamed(values: Vec<Vec<f64>>) -> Result<Self> {
        let names = (0..values.len()).map(|i| format!("x{i}")).collect();
        Self::new(names, values, None)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn variable(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn n_vars(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_interval(&self) -> Option<f64> {
        self.sample_interval
    }
}

/// `N` integer symbol series with a per-variable alphabet size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSeries {
    arities: Vec<usize>,
    symbols: Vec<Vec<u32>>,
}

impl SymbolSeries {
    pub fn new(arities: Vec<usize>, symbols: Vec<Vec<u32>>) -> Result<Self> {
        if symbols.is_empty() || arities.len() != symbols.len() {
            return Err(Error::InvalidSeries(format!(
                "{} arities for {} variables",
                arities.len(),
                symbols.len()
            )));
        }
        let len = symbols[0].len();
        if symbols.iter().any(|s| s.len() != len) {
            return Err(Error::InvalidSeries("variables differ in length".into()));
        }
        for (i, (s, &m)) in symbols.iter().zip(&arities).enumerate() {
            if m == 0 {
                return Err(Error::InvalidSeries(format!("variable {i} has arity 0")));
            }
            if let Some(t) = s.iter().position(|&x| x as usize >= m) {
                return Err(Error::InvalidSeries(format!(
                    "symbol {} of variable {i} at step {t} exceeds arity {m}",
                    s[t]
                )));
            }
        }
        Ok(SymbolSeries { arities, symbols })
    }

    /// Infers each arity as `max symbol + 1`.
    pub fn from_symbols(symbols: Vec<Vec<u32>>) -> Result<Self> {
        let arities = symbols
            .iter()
            .map(|s| s.iter().copied().max().map_or(1, |m| m as usize + 1))
            .collect();
        Self::new(arities, symbols)
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn symbols(&self) -> &[Vec<u32>] {
        &self.symbols
    }

    pub fn variable(&self, i: usize) -> &[u32] {
        &self.symbols[i]
    }

    pub fn n_vars(&self) -> usize {
        self.symbols.len()
    }

    pub fn len(&self) -> usize {
        self.symbols[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Symbolized series plus the variables whose values were all identical.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbolization {
    pub symbols: SymbolSeries,
    pub constant_variables: Vec<usize>,
}

/// Median split: `1` where the value is at least the variable's median.
pub fn symbolize_median(series: &RealSeries) -> Symbolization {
    symbolize_quantile(series, 2).expect("two bins are always valid")
}

/// Equal-frequency bins. The symbol of `v` is the number of bin thresholds
/// it reaches, where threshold `k` is the order statistic at `⌊k·n/m⌋`; for
/// `m = 2` this is exactly `v ≥ median`. Constant variables map to `m − 1`.
pub fn symbolize_quantile(series: &RealSeries, m: usize) -> Result<Symbolization> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("quantile symbolization needs m ≥ 2, got {m}")));
    }
    let n = series.len();
    let mut symbols = Vec::with_capacity(series.n_vars());
    let mut constant_variables = Vec::new();
    for (i, values) in series.values().iter().enumerate() {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted[0] == sorted[n - 1] {
            constant_variables.push(i);
        }
        let thresholds: Vec<f64> = (1..m).map(|k| sorted[k * n / m]).collect();
        symbols.push(
            values
                .iter()
                .map(|&v| thresholds.partition_point(|&th| v >= th) as u32)
                .collect(),
        );
    }
    Ok(Symbolization {
        symbols: SymbolSeries::new(vec![m; series.n_vars()], symbols)?,
        constant_variables,
    })
}

/// Counts of lagged windows. Codes follow the [`ProcessModel`] window layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCounts {
    pub order: usize,
    pub lag: usize,
    pub arities: Vec<usize>,
    pub counts: BTreeMap<u64, u64>,
    pub total_windows: u64,
}

impl WindowCounts {
    pub fn n_vars(&self) -> usize {
        self.arities.len()
    }

    /// Window tuples with their counts, in code order.
    pub fn tuples(&self) -> Vec<(Vec<usize>, u64)> {
        let axis_arities = window_arities(&self.arities, self.order);
        let (strides, _) = tuple_space(&axis_arities).expect("validated when counted");
        self.counts
            .iter()
            .map(|(&code, &c)| {
                let tuple = strides
                    .iter()
                    .zip(&axis_arities)
                    .map(|(&s, &a)| ((code / s) % a as u64) as usize)
                    .collect();
                (tuple, c)
            })
            .collect()
    }
}

fn window_arities(arities: &[usize], order: usize) -> Vec<usize> {
    (0..=order).flat_map(|_| arities.iter().copied()).collect()
}

/// Counts every window `(all variables at t, t−Δ, …, t−KΔ)` for
/// `t ∈ [KΔ, length)`.
pub fn count_windows(symbols: &SymbolSeries, order: usize, lag: usize) -> Result<WindowCounts> {
    count_windows_segments(std::slice::from_ref(symbols), order, lag)
}

/// Sums window counts over independent segments with shared arities.
/// Windows never straddle a segment boundary.
pub fn count_windows_segments(segments: &[SymbolSeries], order: usize, lag: usize) -> Result<WindowCounts> {
    let first = segments
        .first()
        .ok_or_else(|| Error::InvalidSeries("no segments".into()))?;
    if lag == 0 {
        return Err(Error::InvalidParameter("lag must be at least 1".into()));
    }
    let arities = first.arities().to_vec();
    if segments.iter().any(|s| s.arities() != arities.as_slice()) {
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
    let axis_arities = window_arities(&arities, order);
    let (strides, n_cells) = tuple_space(&axis_arities)?;
    let n = arities.len();

    let mut dense = (n_cells <= DENSE_COUNT_LIMIT).then(|| vec![0u64; n_cells as usize]);
    let mut sparse = BTreeMap::new();
    let mut total = 0u64;
    for s in segments {
        for t in span..s.len() {
            let mut code = 0u64;
            for l in 0..=order {
                for v in 0..n {
                    code += s.symbols[v][t - l * lag] as u64 * strides[l * n + v];
                }
            }
            match dense.as_mut() {
                Some(d) => d[code as usize] += 1,
                None => *sparse.entry(code).or_insert(0) += 1,
            }
            total += 1;
        }
    }
    let counts = match dense {
        Some(d) => d
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c > 0)
            .map(|(code, c)| (code as u64, c))
            .collect(),
        None => sparse,
    };
    Ok(WindowCounts {
        order,
        lag,
        arities,
        counts,
        total_windows: total,
    })
}

/// Multinomial maximum-likelihood window model: relative frequencies.
pub fn fit_mle(counts: &WindowCounts) -> Result<ProcessModel> {
    if counts.total_windows == 0 {
        return Err(Error::ZeroTotalCount);
    }
    if counts.order == 0 {
        return Err(Error::InvalidParameter("a process model needs order K ≥ 1".into()));
    }
    let n = counts.n_vars();
    let table = JointTable::from_coded_weights(
        counts.counts.iter().map(|(&code, &c)| (code, c as f64)),
        ProcessModel::window_labels(n, counts.order, counts.lag),
        window_arities(&counts.arities, counts.order),
    )?;
    ProcessModel::new(table, n, counts.order, counts.lag)
}

/// Count, fit and assemble the network from symbols.
pub fn estimate_network(symbols: &SymbolSeries, order: usize, lag: usize, mode: Conditioning) -> Result<InfoNetwork> {
    build_network(&fit_mle(&count_windows(symbols, order, lag)?)?, mode)
}

/// Quantile-symbolize with `bins` bins, then [`estimate_network`].
pub fn estimate_network_real(
    series: &RealSeries,
    order: usize,
    lag: usize,
    bins: usize,
    mode: Conditioning,
) -> Result<InfoNetwork> {
    let symbolization = symbolize_quantile(series, bins)?;
    estimate_network(&symbolization.symbols, order, lag, mode)
}
