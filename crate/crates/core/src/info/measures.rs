//! Elementary information measures over a [`JointTable`], all in bits.

use crate::error::{Error, Result};
use crate::info::table::{entropy_of, AxisSet, JointTable};

/// Shannon entropy of the full table.
pub fn entropy(table: &JointTable) -> f64 {
    entropy_of(table.nonzero().map(|(_, p)| p))
}

/// Entropy of the marginal over `set` (0 for the empty set).
pub fn joint_entropy(table: &JointTable, set: &AxisSet) -> Result<f64> {
    table.marginal_entropy(set)
}

fn require_disjoint(a: &AxisSet, b: &AxisSet) -> Result<()> {
    if a.is_disjoint(b) {
        Ok(())
    } else {
        Err(Error::OverlappingAxisSets)
    }
}

fn require_pairwise_disjoint(sets: &[&AxisSet]) -> Result<()> {
    for (k, a) in sets.iter().enumerate() {
        for b in &sets[k + 1..] {
            require_disjoint(a, b)?;
        }
    }
    Ok(())
}

/// `H(targets | givens) = H(targets ∪ givens) − H(givens)`.
pub fn conditional_entropy(table: &JointTable, targets: &AxisSet, givens: &AxisSet) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::EmptyAxisSet);
    }
    require_disjoint(targets, givens)?;
    Ok(table.marginal_entropy(&targets.union(givens))? - table.marginal_entropy(givens)?)
}

/// `I(a; b) = H(a) + H(b) − H(a ∪ b)`.
pub fn mutual_information(table: &JointTable, a: &AxisSet, b: &AxisSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyAxisSet);
    }
    require_disjoint(a, b)?;
    let ha = table.marginal_entropy(a)?;
    let hb = table.marginal_entropy(b)?;
    let hab = table.marginal_entropy(&a.union(b))?;
    Ok(ha + hb - hab)
}

/// `I(a; b | givens) = H(a ∪ g) + H(b ∪ g) − H(g) − H(a ∪ b ∪ g)`.
pub fn conditional_mutual_information(
    table: &JointTable,
    a: &AxisSet,
    b: &AxisSet,
    givens: &AxisSet,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyAxisSet);
    }
    require_pairwise_disjoint(&[a, b, givens])?;
    if givens.is_empty() {
        return mutual_information(table, a, b);
    }
    let hag = table.marginal_entropy(&a.union(givens))?;
    let hbg = table.marginal_entropy(&b.union(givens))?;
    let hg = table.marginal_entropy(givens)?;
    let habg = table.marginal_entropy(&a.union(b).union(givens))?;
    Ok(hag + hbg - hg - habg)
}

fn check_parts(table: &JointTable, parts: &[AxisSet], min_parts: usize) -> Result<()> {
    if parts.len() < min_parts {
        return Err(Error::TooFewParts(parts.len()));
    }
    for p in parts {
        if p.is_empty() {
            return Err(Error::EmptyAxisSet);
        }
        table.validate_set(p)?;
    }
    let refs: Vec<&AxisSet> = parts.iter().collect();
    require_pairwise_disjoint(&refs)
}

/// `C = Σ H(partᵢ) − H(∪ parts)`.
pub fn total_correlation(table: &JointTable, parts: &[AxisSet]) -> Result<f64> {
    check_parts(table, parts, 2)?;
    let mut sum = 0.0;
    let mut all = AxisSet::empty();
    for p in parts {
        sum += table.marginal_entropy(p)?;
        all = all.union(p);
    }
    Ok(sum - table.marginal_entropy(&all)?)
}

/// Signed inclusion-exclusion `Σ_{S ≠ ∅} (−1)^{|S|+1} H(X_S ∪ base)`, subsets
/// enumerated by size then lexicographically.
fn alternating_sum(table: &JointTable, parts: &[AxisSet], base: &AxisSet) -> Result<f64> {
    let n = parts.len();
    let mut total = 0.0;
    for k in 1..=n {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        for subset in combinations(n, k) {
            let mut set = base.clone();
            for &s in &subset {
                set = set.union(&parts[s]);
            }
            total += sign * table.marginal_entropy(&set)?;
        }
    }
    Ok(total)
}

/// Co-information of `parts`; may be negative (synergy).
pub fn multivariate_mutual_information(table: &JointTable, parts: &[AxisSet]) -> Result<f64> {
    check_parts(table, parts, 2)?;
    if parts.len() == 2 {
        return mutual_information(table, &parts[0], &parts[1]);
    }
    alternating_sum(table, parts, &AxisSet::empty())
}

/// Conditional co-information `I(X₁; …; Xₙ | givens)`.
///
/// A single part yields the conditional entropy `H(X₁ | givens)`.
pub fn multivariate_conditional_mi(table: &JointTable, parts: &[AxisSet], givens: &AxisSet) -> Result<f64> {
    check_parts(table, parts, 1)?;
    table.validate_set(givens)?;
    for p in parts {
        require_disjoint(p, givens)?;
    }
    if givens.is_empty() {
        if parts.len() == 1 {
            return table.marginal_entropy(&parts[0]);
        }
        return multivariate_mutual_information(table, parts);
    }
    if parts.len() == 2 {
        return conditional_mutual_information(table, &parts[0], &parts[1], givens);
    }
    // Σ_{S≠∅} (−1)^{|S|+1} H(X_S | g); the H(g) terms sum to exactly one copy.
    Ok(alternating_sum(table, parts, givens)? - table.marginal_entropy(givens)?)
}

/// `D(p ‖ q) = Σ p log2(p / q)`.
pub fn kl_divergence(p: &JointTable, q: &JointTable) -> Result<f64> {
    if p.axes() != q.axes() || p.arities() != q.arities() {
        return Err(Error::ShapeMismatch("p and q must share axes and arities".into()));
    }
    let mut d = 0.0;
    for (code, pp) in p.nonzero() {
        let qq = q.prob_code(code);
        if qq <= 0.0 {
            return Err(Error::AbsoluteContinuityViolation);
        }
        d += pp * (pp / qq).log2();
    }
    Ok(d)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
