//! Information-lattice terms over an exact `N × T` system and executable
//! verifiers for the identities that decompose joint entropy into them.
//!
//! A lattice term picks one time index (or nothing) per variable and is the
//! conditional co-information of the picked states given each picked
//! variable's own strict past:
//!
//! ```text
//! Ĩ(t₁, …, t_N) = I(X₁^{t₁}; …; X_N^{t_N} | X₁^{<t₁}, …, X_N^{<t_N})
//! ```
//!
//! Summing lattice terms over every time index reproduces the co-information
//! of whole variable histories, and inclusion-exclusion over variable
//! subsets reproduces the joint entropy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{
    combinations, conditional_entropy, conditional_mutual_information, entropy, joint_entropy,
    multivariate_conditional_mi, AxisLabel, AxisSet, JointTable,
};

/// Exhaustive verification is limited to tuple spaces of at most this many cells.
pub const LATTICE_CELL_LIMIT: u64 = 1 << 20;

/// Default tolerance for the lattice identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Outcome of checking one identity or inequality numerically.
///
/// For inequalities `lhs ≥ rhs`, `gap` is the violation `max(0, rhs − lhs)`,
/// so `passed ⇔ |gap| ≤ tolerance` holds for both kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "identity")]
    pub identity_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Whether a failure of this check counts as a hard failure.
    #[serde(skip, default = "default_hard")]
    pub hard: bool,
}

fn default_hard() -> bool {
    true
}

impl VerificationReport {
    pub fn identity(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = lhs - rhs;
        VerificationReport {
            identity_name: name.into(),
            lhs,
            rhs,
            gap,
            tolerance,
            passed: gap.abs() <= tolerance,
            hard: true,
        }
    }

    /// Checks `lhs ≥ rhs` up to `tolerance`.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = (rhs - lhs).max(0.0);
        VerificationReport {
            identity_name: name.into(),
            lhs,
            rhs,
            gap,
            tolerance,
            passed: gap <= tolerance,
            hard: true,
        }
    }

    /// Marks the report as diagnostic: recorded, never a hard failure.
    pub fn diagnostic(mut self) -> Self {
        self.hard = false;
        self
    }
}

/// An exact joint distribution over `N` variables at time indices `1..=T`.
///
/// Time index `t` lives on the axis labeled `(i, t − T)`, so `T` is the present.
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    table: JointTable,
    n_vars: usize,
    t_steps: usize,
    positions: Vec<Vec<usize>>,
}

impl LatticeSystem {
    pub fn new(table: JointTable, n_vars: usize, t_steps: usize) -> Result<Self> {
        if n_vars == 0 || t_steps == 0 {
            return Err(Error::InvalidParameter("system needs at least one variable and one step".into()));
        }
        if table.n_cells() > LATTICE_CELL_LIMIT {
            return Err(Error::SystemTooLarge(table.n_cells() as u128));
        }
        let mut positions = vec![vec![0; t_steps]; n_vars];
        for (i, row) in positions.iter_mut().enumerate() {
            for (t, slot) in row.iter_mut().enumerate() {
                let label = AxisLabel::new(i, t as i64 + 1 - t_steps as i64);
                *slot = table
                    .position(label)
                    .ok_or_else(|| Error::IndexOutOfRange(format!("system lacks axis for variable {i}, step {}", t + 1)))?;
            }
        }
        Ok(LatticeSystem {
            table,
            n_vars,
            t_steps,
            positions,
        })
    }

    /// Axis labels for an `N × T` system, variable-major.
    pub fn labels(n_vars: usize, t_steps: usize) -> Vec<AxisLabel> {
        (0..n_vars)
            .flat_map(|i| (1..=t_steps).map(move |t| AxisLabel::new(i, t as i64 - t_steps as i64)))
            .collect()
    }

    /// Builds a system from a weight function over `(variable, step)` states.
    /// `weight` receives `states[i][t − 1]`.
    pub fn from_fn<F>(n_vars: usize, t_steps: usize, arity: usize, mut weight: F) -> Result<Self>
    where
        F: FnMut(&[Vec<usize>]) -> f64,
    {
        let cells = (arity as u128).pow((n_vars * t_steps) as u32);
        if cells > LATTICE_CELL_LIMIT as u128 {
            return Err(Error::SystemTooLarge(cells));
        }
        let mut states = vec![vec![0; t_steps]; n_vars];
        let table = JointTable::from_fn(Self::labels(n_vars, t_steps), vec![arity; n_vars * t_steps], |tuple| {
            for (i, row) in states.iter_mut().enumerate() {
                row.copy_from_slice(&tuple[i * t_steps..(i + 1) * t_steps]);
            }
            weight(&states)
        })?;
        Self::new(table, n_vars, t_steps)
    }

    /// A random system: cubed uniform weights, with roughly a fifth of cells zeroed.
    /// Draws that zero every cell (likely only for tiny tables) are redrawn.
    pub fn random<R: Rng>(n_vars: usize, t_steps: usize, arity: usize, rng: &mut R) -> Result<Self> {
        loop {
            let drawn = Self::from_fn(n_vars, t_steps, arity, |_| {
                let u: f64 = rng.random();
                if rng.random::<f64>() < 0.2 {
                    0.0
                } else {
                    u * u * u + 1e-3
                }
            });
            match drawn {
                Err(Error::ZeroTotalCount) => continue,
                other => return other,
            }
        }
    }

    pub fn table(&self) -> &JointTable {
        &self.table
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn t_steps(&self) -> usize {
        self.t_steps
    }

    /// Axis of variable `i` at time index `t` (1-based).
    pub fn axis(&self, i: usize, t: usize) -> usize {
        self.positions[i][t - 1]
    }

    /// `X_i^{a..=b}` as an axis set (empty when `a > b`).
    pub fn span(&self, i: usize, a: usize, b: usize) -> AxisSet {
        AxisSet::new((a..=b).map(|t| self.axis(i, t)))
    }

    /// Full history `X̄_i^T`.
    pub fn history(&self, i: usize) -> AxisSet {
        self.span(i, 1, self.t_steps)
    }

    /// Strict past `X_i^{<t}`.
    pub fn past(&self, i: usize, t: usize) -> AxisSet {
        self.span(i, 1, t - 1)
    }

    /// Strict pasts of every variable in `vars` at step `t`.
    pub fn pasts(&self, vars: impl IntoIterator<Item = usize>, t: usize) -> AxisSet {
        vars.into_iter().fold(AxisSet::empty(), |acc, i| acc.union(&self.past(i, t)))
    }

    fn check_index(&self, index: &LatticeIndex) -> Result<()> {
        if index.0.len() != self.n_vars {
            return Err(Error::IndexOutOfRange(format!(
                "lattice index has {} entries for {} variables",
                index.0.len(),
                self.n_vars
            )));
        }
        if index.0.iter().all(Option::is_none) {
            return Err(Error::IndexOutOfRange("lattice index has no entries".into()));
        }
        for t in index.0.iter().flatten() {
            if *t == 0 || *t > self.t_steps {
                return Err(Error::IndexOutOfRange(format!("time index {t} outside 1..={}", self.t_steps)));
            }
        }
        Ok(())
    }
}

/// Per-variable time index (1-based) or `None` for an empty entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeIndex(pub Vec<Option<usize>>);

impl LatticeIndex {
    pub fn new(entries: Vec<Option<usize>>) -> Self {
        LatticeIndex(entries)
    }

    pub fn entries(&self) -> &[Option<usize>] {
        &self.0
    }
}

/// `Ĩ` for one lattice index.
pub fn lattice_term(system: &LatticeSystem, index: &LatticeIndex) -> Result<f64> {
    system.check_index(index)?;
    let mut parts = Vec::new();
    let mut givens = AxisSet::empty();
    for (i, t) in index.0.iter().enumerate() {
        if let Some(t) = *t {
            parts.push(AxisSet::single(system.axis(i, t)));
            givens = givens.union(&system.past(i, t));
        }
    }
    multivariate_conditional_mi(system.table(), &parts, &givens)
}

/// Sum of `Ĩ` over every time index of the variables in `vars`, with every
/// other variable fixed by `fixed` (entries for `vars` are ignored).
fn lattice_sum(system: &LatticeSystem, fixed: &[Option<usize>], vars: &[usize]) -> Result<f64> {
    let mut index = fixed.to_vec();
    let mut total = 0.0;
    let t_steps = system.t_steps();
    let mut times = vec![1usize; vars.len()];
    loop {
        for (v, t) in vars.iter().zip(&times) {
            index[*v] = Some(*t);
        }
        total += lattice_term(system, &LatticeIndex(index.clone()))?;
        let mut k = times.len();
        loop {
            if k == 0 {
                return Ok(total);
            }
            k -= 1;
            times[k] += 1;
            if times[k] <= t_steps {
                break;
            }
            times[k] = 1;
        }
    }
}

/// Co-information of whole histories of `vars`, as the sum of lattice terms.
pub fn lattice_group_information(system: &LatticeSystem, vars: &[usize]) -> Result<f64> {
    if vars.is_empty() {
        return Err(Error::EmptyAxisSet);
    }
    lattice_sum(system, &vec![None; system.n_vars()], vars)
}

/// Sum of lattice terms over all time indices equals the co-information of
/// the full histories computed directly.
pub fn verify_lattice_sum(system: &LatticeSystem, vars: &[usize]) -> Result<VerificationReport> {
    let parts: Vec<AxisSet> = vars.iter().map(|&i| system.history(i)).collect();
    let direct = multivariate_conditional_mi(system.table(), &parts, &AxisSet::empty())?;
    let summed = lattice_group_information(system, vars)?;
    Ok(VerificationReport::identity(
        format!("lattice_sum{vars:?}"),
        direct,
        summed,
        IDENTITY_TOLERANCE,
    ))
}

/// `H(all) = Σᵢ H(axisᵢ | axis₁..ᵢ₋₁)` for the given axis order.
pub fn verify_entropy_chain_rule(table: &JointTable, order: &[usize]) -> Result<VerificationReport> {
    let mut seen = AxisSet::empty();
    let mut rhs = 0.0;
    for &p in order {
        let target = AxisSet::single(p);
        rhs += conditional_entropy(table, &target, &seen)?;
        seen = seen.union(&target);
    }
    let lhs = joint_entropy(table, &seen)?;
    Ok(VerificationReport::identity("entropy_chain_rule", lhs, rhs, 1e-10))
}

/// `I(Y; X₁..Xₙ) = Σᵢ I(Y; Xᵢ | X₁..Xᵢ₋₁)`.
pub fn verify_information_chain_rule(
    table: &JointTable,
    target: &AxisSet,
    sources: &[AxisSet],
) -> Result<VerificationReport> {
    let mut seen = AxisSet::empty();
    let mut rhs = 0.0;
    for s in sources {
        rhs += conditional_mutual_information(table, target, s, &seen)?;
        seen = seen.union(s);
    }
    let lhs = conditional_mutual_information(table, target, &seen, &AxisSet::empty())?;
    Ok(VerificationReport::identity("information_chain_rule", lhs, rhs, 1e-10))
}

/// `I(X₁;…;Xₙ | Y) = I(X₁;…;Xₙ₋₁; {Xₙ, Y}) − I(X₁;…;Xₙ₋₁; Y)`.
pub fn verify_identity_lemma1(
    table: &JointTable,
    parts: &[AxisSet],
    conditioner: &AxisSet,
) -> Result<VerificationReport> {
    if parts.len() < 2 {
        return Err(Error::TooFewParts(parts.len()));
    }
    let lhs = multivariate_conditional_mi(table, parts, conditioner)?;
    let (last, head) = parts.split_last().expect("at least two parts");
    let rhs = if conditioner.is_empty() {
        // I(head; Xₙ) − I(head; ∅) with the second term zero
        let mut with_last = head.to_vec();
        with_last.push(last.clone());
        multivariate_conditional_mi(table, &with_last, &AxisSet::empty())?
    } else {
        let mut joined = head.to_vec();
        joined.push(last.union(conditioner));
        let mut with_y = head.to_vec();
        with_y.push(conditioner.clone());
        multivariate_conditional_mi(table, &joined, &AxisSet::empty())?
            - multivariate_conditional_mi(table, &with_y, &AxisSet::empty())?
    };
    Ok(VerificationReport::identity("conditional_identity", lhs, rhs, IDENTITY_TOLERANCE))
}

/// Chain rule of conditional co-information in its last argument.
///
/// Each group's joint history is one part; the last group is expanded step by
/// step: `I(G₁; …; G_m) = Σ_t I(G₁; …; G_{m−1}; G_m^t | G_m^{<t})`. A single
/// group reduces to the chain rule of entropy.
pub fn verify_chain_rule_lemma2(system: &LatticeSystem, groups: &[Vec<usize>]) -> Result<VerificationReport> {
    if groups.is_empty() || groups.iter().any(Vec::is_empty) {
        return Err(Error::EmptyAxisSet);
    }
    for &i in groups.iter().flatten() {
        if i >= system.n_vars() {
            return Err(Error::IndexOutOfRange(format!("variable {i}")));
        }
    }
    let group_history =
        |g: &[usize]| g.iter().fold(AxisSet::empty(), |acc, &i| acc.union(&system.history(i)));
    let (last, head) = groups.split_last().expect("nonempty");
    let mut parts: Vec<AxisSet> = head.iter().map(|g| group_history(g)).collect();
    parts.push(group_history(last));
    let lhs = multivariate_conditional_mi(system.table(), &parts, &AxisSet::empty())?;

    let mut rhs = 0.0;
    for t in 1..=system.t_steps() {
        let present = last.iter().fold(AxisSet::empty(), |acc, &i| acc.union(&AxisSet::single(system.axis(i, t))));
        let past = system.pasts(last.iter().copied(), t);
        let mut step_parts: Vec<AxisSet> = head.iter().map(|g| group_history(g)).collect();
        step_parts.push(present);
        rhs += multivariate_conditional_mi(system.table(), &step_parts, &past)?;
    }
    Ok(VerificationReport::identity("lattice_chain_rule", lhs, rhs, IDENTITY_TOLERANCE))
}

/// `H(X̄_𝒩) = Σ_k (−1)^{k+1} Σ_{|S|=k} I(X̄_S)` with each `I(X̄_S)` taken as a
/// sum of lattice terms.
pub fn verify_joint_entropy_decomposition(system: &LatticeSystem) -> Result<VerificationReport> {
    let n = system.n_vars();
    if n < 2 {
        return Err(Error::TooFewParts(n));
    }
    let lhs = entropy(system.table());
    let mut rhs = 0.0;
    for k in 1..=n {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        for subset in combinations(n, k) {
            rhs += sign * lattice_group_information(system, &subset)?;
        }
    }
    Ok(VerificationReport::identity("joint_entropy_decomposition", lhs, rhs, IDENTITY_TOLERANCE))
}

/// Partial expansion of the lattice around the first `k` variables.
///
/// With `tᵢ` from `index` (every entry set),
///
/// ```text
/// I(X₁^{t₁}; …; X_k^{t_k} | X₁^{<t₁}, …, X_k^{<t_k}, X̄_{k+1}^{t_{k+1}}, …, X̄_N^{t_N})
///   = Σ_{s ⊆ {k+1..N}} (−1)^{|s|} Σ_{i_s ≤ t_s} Ĩ(t₁, …, t_k, i_s)
/// ```
///
/// where `X̄_j^{t}` is the history of `j` up to and including `t`.
pub fn verify_partial_expansion(system: &LatticeSystem, index: &LatticeIndex, k: usize) -> Result<VerificationReport> {
    let n = system.n_vars();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={n}")));
    }
    system.check_index(index)?;
    let times: Vec<usize> = index
        .0
        .iter()
        .map(|t| t.ok_or_else(|| Error::IndexOutOfRange("partial expansion needs every entry set".into())))
        .collect::<Result<_>>()?;

    let parts: Vec<AxisSet> = (0..k).map(|i| AxisSet::single(system.axis(i, times[i]))).collect();
    let mut givens = AxisSet::empty();
    for (i, &t) in times.iter().enumerate().take(k) {
        givens = givens.union(&system.past(i, t));
    }
    for (j, &t) in times.iter().enumerate().skip(k) {
        givens = givens.union(&system.span(j, 1, t));
    }
    let lhs = multivariate_conditional_mi(system.table(), &parts, &givens)?;

    let rest: Vec<usize> = (k..n).collect();
    let mut base: Vec<Option<usize>> = vec![None; n];
    for (i, &t) in times.iter().enumerate().take(k) {
        base[i] = Some(t);
    }
    let mut rhs = 0.0;
    for m in 0..=rest.len() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for subset in combinations(rest.len(), m) {
            let vars: Vec<usize> = subset.iter().map(|&s| rest[s]).collect();
            rhs += sign * bounded_lattice_sum(system, &base, &vars, &times)?;
        }
    }
    Ok(VerificationReport::identity(
        format!("partial_expansion_k{k}"),
        lhs,
        rhs,
        IDENTITY_TOLERANCE,
    ))
}

/// Like [`lattice_sum`] but variable `v` only ranges over `1..=bounds[v]`.
fn bounded_lattice_sum(
    system: &LatticeSystem,
    fixed: &[Option<usize>],
    vars: &[usize],
    bounds: &[usize],
) -> Result<f64> {
    let mut index = fixed.to_vec();
    let mut times = vec![1usize; vars.len()];
    let mut total = 0.0;
    loop {
        for (v, t) in vars.iter().zip(&times) {
            index[*v] = Some(*t);
        }
        total += lattice_term(system, &LatticeIndex(index.clone()))?;
        let mut k = times.len();
        loop {
            if k == 0 {
                return Ok(total);
            }
            k -= 1;
            times[k] += 1;
            if times[k] <= bounds[vars[k]] {
                break;
            }
            times[k] = 1;
        }
    }
}

/// Runs every lattice verifier on one system: entropy and information chain
/// rules, Lemma-1 identity, Lemma-2 chain rule, Lemma-3 decomposition, the
/// lattice-sum identity and partial expansion for `k = 1, 2, N` at the
/// all-`T` index.
pub fn verify_all_lemmas(system: &LatticeSystem) -> Result<Vec<VerificationReport>> {
    let n = system.n_vars();
    let t_steps = system.t_steps();
    let table = system.table();
    let mut reports = Vec::new();

    let mut order: Vec<usize> = (0..table.n_axes()).collect();
    order.reverse();
    reports.push(verify_entropy_chain_rule(table, &order)?);

    if n >= 2 {
        let target = system.history(0);
        let sources: Vec<AxisSet> = (1..n).map(|i| system.history(i)).collect();
        reports.push(verify_information_chain_rule(table, &target, &sources)?);
    }

    // The conditional identity on presents, conditioned on the first step when there is one.
    if n >= 2 {
        let parts: Vec<AxisSet> = (0..n).map(|i| AxisSet::single(system.axis(i, t_steps))).collect();
        let conditioner = if t_steps >= 2 { system.pasts(0..n, 2) } else { AxisSet::empty() };
        reports.push(verify_identity_lemma1(table, &parts, &conditioner)?);
    }

    reports.push(verify_chain_rule_lemma2(system, &[vec![0]])?);
    if n >= 2 {
        let groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        reports.push(verify_chain_rule_lemma2(system, &groups)?);
        reports.push(verify_joint_entropy_decomposition(system)?);
        let all: Vec<usize> = (0..n).collect();
        reports.push(verify_lattice_sum(system, &all)?);
    }

    let full = LatticeIndex(vec![Some(t_steps); n]);
    let mut ks = vec![1, 2, n];
    ks.retain(|&k| k <= n);
    ks.dedup();
    for k in ks {
        reports.push(verify_partial_expansion(system, &full, k)?);
    }
    Ok(reports)
}
