use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tuple spaces up to this many cells are stored densely.
pub const DENSE_CELL_LIMIT: u64 = 1 << 24;

/// Tolerance on total mass when validating a table.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Identifies one axis of a joint table: a variable observed at a time offset.
///
/// Offset 0 is the present step, negative offsets are past steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AxisLabel {
    pub variable_id: usize,
    pub time_offset: i64,
}

impl AxisLabel {
    pub const fn new(variable_id: usize, time_offset: i64) -> Self {
        Self {
            variable_id,
            time_offset,
        }
    }
}

/// A sorted, duplicate-free set of axis positions into a [`JointTable`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisSet(Vec<usize>);

impl AxisSet {
    pub fn new(positions: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = positions.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        AxisSet(members)
    }

    pub fn empty() -> Self {
        AxisSet(Vec::new())
    }

    pub fn single(position: usize) -> Self {
        AxisSet(vec![position])
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.0.binary_search(&position).is_ok()
    }

    pub fn union(&self, other: &AxisSet) -> AxisSet {
        AxisSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_disjoint(&self, other: &AxisSet) -> bool {
        self.0.iter().all(|p| !other.contains(*p))
    }
}

impl From<Vec<usize>> for AxisSet {
    fn from(v: Vec<usize>) -> Self {
        AxisSet::new(v)
    }
}

impl<const N: usize> From<[usize; N]> for AxisSet {
    fn from(v: [usize; N]) -> Self {
        AxisSet::new(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cells {
    Dense(Vec<f64>),
    Sparse(BTreeMap<u64, f64>),
}

/// Normalized probability mass over a finite tuple space of labeled axes.
///
/// Cells are addressed by a mixed-radix code with axis 0 most significant.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    axes: Vec<AxisLabel>,
    arities: Vec<usize>,
    strides: Vec<u64>,
    n_cells: u64,
    cells: Cells,
}

pub(crate) fn tuple_space(arities: &[usize]) -> Result<(Vec<u64>, u64)> {
    let mut strides = vec![0u64; arities.len()];
    let mut size: u128 = 1;
    for (k, &a) in arities.iter().enumerate().rev() {
        if a == 0 {
            return Err(Error::InvalidTable("arity must be positive".into()));
        }
        strides[k] = size as u64;
        size *= a as u128;
        if size > u64::MAX as u128 {
            return Err(Error::SystemTooLarge(size));
        }
    }
    Ok((strides, size as u64))
}

fn check_axes(axes: &[AxisLabel], arities: &[usize]) -> Result<()> {
    if axes.len() != arities.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} axis labels but {} arities",
            axes.len(),
            arities.len()
        )));
    }
    let mut seen: Vec<AxisLabel> = axes.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidTable("duplicate axis label".into()));
    }
    Ok(())
}

impl JointTable {
    /// Builds a table by normalizing nonnegative counts.
    pub fn normalize<I>(counts: I, axes: Vec<AxisLabel>, arities: Vec<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        check_axes(&axes, &arities)?;
        let (strides, n_cells) = tuple_space(&arities)?;
        let mut coded = Vec::new();
        for (tuple, c) in counts {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::InvalidTable(format!("count {c} is not a finite nonnegative number")));
            }
            let code = encode(&tuple, &arities, &strides)?;
            coded.push((code, c));
        }
        Self::from_codes(coded, axes, arities, strides, n_cells)
    }

    /// Builds a table from `(cell code, weight)` pairs, normalizing the weights.
    pub fn from_coded_weights<I>(weights: I, axes: Vec<AxisLabel>, arities: Vec<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        check_axes(&axes, &arities)?;
        let (strides, n_cells) = tuple_space(&arities)?;
        let coded: Vec<(u64, f64)> = weights.into_iter().collect();
        for &(code, c) in &coded {
            if code >= n_cells {
                return Err(Error::IndexOutOfRange(format!("cell code {code} >= {n_cells}")));
            }
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::InvalidTable(format!("weight {c} is not a finite nonnegative number")));
            }
        }
        Self::from_codes(coded, axes, arities, strides, n_cells)
    }

    /// Builds a table by evaluating a nonnegative weight for every tuple and normalizing.
    pub fn from_fn<F>(axes: Vec<AxisLabel>, arities: Vec<usize>, mut weight: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> f64,
    {
        check_axes(&axes, &arities)?;
        let (_, n_cells) = tuple_space(&arities)?;
        if n_cells > DENSE_CELL_LIMIT {
            return Err(Error::SystemTooLarge(n_cells as u128));
        }
        let mut tuple = vec![0usize; arities.len()];
        let mut weights = Vec::with_capacity(n_cells as usize);
        for code in 0..n_cells {
            weights.push((code, weight(&tuple)));
            increment(&mut tuple, &arities);
        }
        Self::from_coded_weights(weights, axes, arities)
    }

    fn from_codes(
        coded: Vec<(u64, f64)>,
        axes: Vec<AxisLabel>,
        arities: Vec<usize>,
        strides: Vec<u64>,
        n_cells: u64,
    ) -> Result<Self> {
        let total: f64 = coded.iter().map(|(_, c)| c).sum();
        if total <= 0.0 {
            return Err(Error::ZeroTotalCount);
        }
        let cells = if n_cells <= DENSE_CELL_LIMIT {
            let mut dense = vec![0.0; n_cells as usize];
            for (code, c) in coded {
                dense[code as usize] += c;
            }
            for v in dense.iter_mut() {
                *v /= total;
            }
            Cells::Dense(dense)
        } else {
            let mut sparse = BTreeMap::new();
            for (code, c) in coded {
                if c > 0.0 {
                    *sparse.entry(code).or_insert(0.0) += c;
                }
            }
            for v in sparse.values_mut() {
                *v /= total;
            }
            Cells::Sparse(sparse)
        };
        Ok(JointTable {
            axes,
            arities,
            strides,
            n_cells,
            cells,
        })
    }

    /// Builds a table from already-normalized mass, validating every invariant.
    pub fn from_probabilities<I>(mass: I, axes: Vec<AxisLabel>, arities: Vec<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mass: Vec<(Vec<usize>, f64)> = mass.into_iter().collect();
        let total: f64 = mass.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidTable(format!("total mass {total} is not 1")));
        }
        Self::normalize(mass, axes, arities)
    }

    pub fn axes(&self) -> &[AxisLabel] {
        &self.axes
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn n_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn n_cells(&self) -> u64 {
        self.n_cells
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.cells, Cells::Dense(_))
    }

    pub fn position(&self, label: AxisLabel) -> Option<usize> {
        self.axes.iter().position(|a| *a == label)
    }

    /// All axis positions.
    pub fn all_axes(&self) -> AxisSet {
        AxisSet::new(0..self.axes.len())
    }

    pub fn prob(&self, tuple: &[usize]) -> Result<f64> {
        let code = encode(tuple, &self.arities, &self.strides)?;
        Ok(self.prob_code(code))
    }

    pub(crate) fn prob_code(&self, code: u64) -> f64 {
        match &self.cells {
            Cells::Dense(d) => d[code as usize],
            Cells::Sparse(s) => s.get(&code).copied().unwrap_or(0.0),
        }
    }

    /// Iterates `(code, probability)` over cells with positive mass, in code order.
    pub(crate) fn nonzero(&self) -> Box<dyn Iterator<Item = (u64, f64)> + '_> {
        match &self.cells {
            Cells::Dense(d) => Box::new(
                d.iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(c, p)| (c as u64, *p)),
            ),
            Cells::Sparse(s) => Box::new(s.iter().filter(|(_, p)| **p > 0.0).map(|(c, p)| (*c, *p))),
        }
    }

    /// Iterates `(tuple, probability)` over cells with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.nonzero().map(|(code, p)| (self.decode(code), p))
    }

    pub fn decode(&self, code: u64) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.arities)
            .map(|(&s, &a)| ((code / s) % a as u64) as usize)
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.nonzero().map(|(_, p)| p).sum()
    }

    pub fn validate_set(&self, set: &AxisSet) -> Result<()> {
        for &p in set.members() {
            if p >= self.axes.len() {
                return Err(Error::AxisOutOfRange {
                    position: p,
                    n_axes: self.axes.len(),
                });
            }
        }
        Ok(())
    }

    /// Marginal distribution over `keep`, with axes in their original order.
    pub fn marginalize(&self, keep: &AxisSet) -> Result<JointTable> {
        if keep.is_empty() {
            return Err(Error::EmptyAxisSet);
        }
        self.validate_set(keep)?;
        let axes: Vec<AxisLabel> = keep.members().iter().map(|&p| self.axes[p]).collect();
        let arities: Vec<usize> = keep.members().iter().map(|&p| self.arities[p]).collect();
        let (strides, n_cells) = tuple_space(&arities)?;
        let cells = self.marginal_cells(keep.members(), &strides, n_cells);
        Ok(JointTable {
            axes,
            arities,
            strides,
            n_cells,
            cells,
        })
    }

    fn marginal_cells(&self, keep: &[usize], target_strides: &[u64], n_cells: u64) -> Cells {
        let project = |code: u64| -> u64 {
            keep.iter()
                .zip(target_strides)
                .map(|(&p, &ts)| ((code / self.strides[p]) % self.arities[p] as u64) * ts)
                .sum()
        };
        if n_cells <= DENSE_CELL_LIMIT {
            let mut dense = vec![0.0; n_cells as usize];
            for (code, p) in self.nonzero() {
                dense[project(code) as usize] += p;
            }
            Cells::Dense(dense)
        } else {
            let mut sparse = BTreeMap::new();
            for (code, p) in self.nonzero() {
                *sparse.entry(project(code)).or_insert(0.0) += p;
            }
            Cells::Sparse(sparse)
        }
    }

    /// Entropy in bits of the marginal over `set`; the empty set has entropy 0.
    pub(crate) fn marginal_entropy(&self, set: &AxisSet) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        self.validate_set(set)?;
        if set.len() == self.axes.len() {
            return Ok(entropy_of(self.nonzero().map(|(_, p)| p)));
        }
        let arities: Vec<usize> = set.members().iter().map(|&p| self.arities[p]).collect();
        let (strides, n_cells) = tuple_space(&arities)?;
        Ok(match self.marginal_cells(set.members(), &strides, n_cells) {
            Cells::Dense(d) => entropy_of(d.into_iter()),
            Cells::Sparse(s) => entropy_of(s.into_values()),
        })
    }
}

/// `-Σ p log2 p` with `0 log 0 = 0`.
pub(crate) fn entropy_of(probs: impl Iterator<Item = f64>) -> f64 {
    let mut h = 0.0;
    for p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

fn encode(tuple: &[usize], arities: &[usize], strides: &[u64]) -> Result<u64> {
    if tuple.len() != arities.len() {
        return Err(Error::TupleLength {
            expected: arities.len(),
            got: tuple.len(),
        });
    }
    let mut code = 0u64;
    for ((&s, &a), &st) in tuple.iter().zip(arities).zip(strides) {
        if s >= a {
            return Err(Error::TupleOutOfRange {
                tuple: tuple.to_vec(),
                arities: arities.to_vec(),
            });
        }
        code += s as u64 * st;
    }
    Ok(code)
}

/// Advances a mixed-radix tuple (last axis fastest).
pub(crate) fn increment(tuple: &mut [usize], arities: &[usize]) {
    for k in (0..tuple.len()).rev() {
        tuple[k] += 1;
        if tuple[k] < arities[k] {
            return;
        }
        tuple[k] = 0;
    }
}
