//! Exact inference over a single network by factor-based variable elimination.
//!
//! Evidence is handled by slicing factors before elimination rather than by
//! multiplying indicator factors, which keeps the multiplication counts
//! comparable across representations. The elimination order is min-degree on
//! the interaction graph with ties broken by ascending variable id, so every
//! query is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::network::DiscreteNetwork;
use crate::variable::VarId;

/// The order in which variables are summed out of a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder {
    pub sequence: Vec<VarId>,
}

/// A normalized posterior plus the number of scalar multiplications spent in
/// factor products to obtain it.
#[derive(Debug, Clone)]
pub struct Posterior {
    pub factor: Factor,
    pub multiplications: u64,
}

/// The factor carrying a variable's CPT: scope `[parents..., child]`, so the
/// stored row-major rows flatten without reshuffling.
pub(crate) fn cpt_factor(net: &DiscreteNetwork, pos: usize) -> Factor {
    let cpt = net.cpt_at(pos);
    let mut scope: Vec<VarId> = cpt.parents().to_vec();
    let mut cards: Vec<usize> = net
        .parent_positions(pos)
        .iter()
        .map(|&p| net.variable_at(p).cardinality())
        .collect();
    scope.push(net.variable_at(pos).id().clone());
    cards.push(net.variable_at(pos).cardinality());
    let values: Vec<f64> = cpt.rows().iter().flatten().copied().collect();
    Factor::new(scope, cards, values).expect("cpt shape validated at construction")
}

/// Min-degree elimination order over the interaction graph induced by the
/// given factor scopes, restricted to `eliminate`. Deterministic: ties break
/// by ascending variable id.
pub fn min_degree_order(scopes: &[Vec<VarId>], eliminate: &BTreeSet<VarId>) -> EliminationOrder {
    let mut adjacency: BTreeMap<VarId, BTreeSet<VarId>> = BTreeMap::new();
    for scope in scopes {
        for v in scope {
            adjacency.entry(v.clone()).or_default();
        }
        for (i, v) in scope.iter().enumerate() {
            for w in &scope[i + 1..] {
                adjacency.get_mut(v).unwrap().insert(w.clone());
                adjacency.get_mut(w).unwrap().insert(v.clone());
            }
        }
    }
    let mut remaining: BTreeSet<VarId> = eliminate
        .iter()
        .filter(|v| adjacency.contains_key(*v))
        .cloned()
        .collect();
    let mut sequence = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        // BTreeSet iteration is ascending, so the first minimum wins ties.
        let next = remaining
            .iter()
            .min_by_key(|v| adjacency[*v].len())
            .unwrap()
            .clone();
        let neighbors: Vec<VarId> = adjacency[&next].iter().cloned().collect();
        for (i, a) in neighbors.iter().enumerate() {
            adjacency.get_mut(a).unwrap().remove(&next);
            for b in &neighbors[i + 1..] {
                adjacency.get_mut(a).unwrap().insert(b.clone());
                adjacency.get_mut(b).unwrap().insert(a.clone());
            }
        }
        adjacency.remove(&next);
        remaining.remove(&next);
        sequence.push(next);
    }
    EliminationOrder { sequence }
}

/// Run variable elimination over an explicit factor list: slice out the
/// evidence, sum out everything not in `keep`, and fold what remains into a
/// single factor (smallest factors first). The result is unnormalized.
pub(crate) fn eliminate(
    factors: Vec<Factor>,
    evidence: &Assignment,
    keep: &BTreeSet<VarId>,
    multiplications: &mut u64,
) -> Result<Factor> {
    let mut pool: Vec<Factor> = Vec::with_capacity(factors.len());
    for mut f in factors {
        for (var, value) in evidence.iter() {
            if f.contains(var.as_str()) {
                f = f.reduce(var.as_str(), value)?;
            }
        }
        pool.push(f);
    }

    let mut eliminable: BTreeSet<VarId> = BTreeSet::new();
    for f in &pool {
        for v in f.scope() {
            if !keep.contains(v) {
                eliminable.insert(v.clone());
            }
        }
    }
    let scopes: Vec<Vec<VarId>> = pool.iter().map(|f| f.scope().to_vec()).collect();
    let order = min_degree_order(&scopes, &eliminable);

    for var in &order.sequence {
        let (with_var, rest): (Vec<Factor>, Vec<Factor>) = pool
            .into_iter()
            .partition(|f| f.contains(var.as_str()));
        let merged = fold_product(with_var, multiplications);
        pool = rest;
        pool.push(merged.sum_out(var.as_str())?);
    }

    Ok(fold_product(pool, multiplications))
}

/// Multiply a list of factors, smallest result first: factors are folded in
/// ascending order of size (ties by scope, then insertion order), which keeps
/// the multiplication counts small and deterministic.
fn fold_product(mut factors: Vec<Factor>, multiplications: &mut u64) -> Factor {
    if factors.is_empty() {
        return Factor::scalar(1.0);
    }
    factors.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.scope().cmp(b.scope()))
    });
    let mut iter = factors.into_iter();
    let first = iter.next().unwrap();
    iter.fold(first, |acc, f| acc.product(&f, multiplications))
}

fn check_query(
    net: &DiscreteNetwork,
    targets: &[VarId],
    evidence: &Assignment,
) -> Result<BTreeSet<VarId>> {
    if targets.is_empty() {
        return Err(Error::contract("targets must be nonempty"));
    }
    let mut keep = BTreeSet::new();
    for t in targets {
        if !net.contains(t.as_str()) {
            return Err(Error::contract(format!("unknown target variable {t}")));
        }
        if !keep.insert(t.clone()) {
            return Err(Error::contract(format!("target {t} repeated")));
        }
    }
    for (var, value) in evidence.iter() {
        let Some(v) = net.variable(var.as_str()) else {
            return Err(Error::contract(format!("unknown evidence variable {var}")));
        };
        if value >= v.cardinality() {
            return Err(Error::contract(format!("evidence binds {var} out of range")));
        }
        if keep.contains(var) {
            return Err(Error::contract(format!(
                "variable {var} cannot be both target and evidence"
            )));
        }
    }
    Ok(keep)
}

/// P(targets | evidence), normalized, with the target scope in network
/// variable order. Evidence of probability zero is an inconsistent-evidence
/// error.
pub fn marginal(net: &DiscreteNetwork, targets: &[VarId], evidence: &Assignment) -> Result<Factor> {
    Ok(marginal_counted(net, targets, evidence)?.factor)
}

/// Same as [`marginal`], also reporting the multiplication count.
pub fn marginal_counted(
    net: &DiscreteNetwork,
    targets: &[VarId],
    evidence: &Assignment,
) -> Result<Posterior> {
    let keep = check_query(net, targets, evidence)?;
    let factors: Vec<Factor> = (0..net.variables().len())
        .map(|i| cpt_factor(net, i))
        .collect();
    let mut multiplications = 0;
    let raw = eliminate(factors, evidence, &keep, &mut multiplications)?;
    let normalized = raw.normalized().map_err(|_| {
        Error::InconsistentEvidence(format!("evidence {evidence} has probability zero"))
    })?;
    // Canonical scope order: network variable order restricted to targets.
    let order: Vec<VarId> = net
        .variables()
        .iter()
        .map(|v| v.id().clone())
        .filter(|id| keep.contains(id))
        .collect();
    Ok(Posterior {
        factor: normalized.reordered(&order)?,
        multiplications,
    })
}

/// The chain-rule posterior of a single hypothesis variable: identical to
/// `marginal(net, [h], evidence)`, packaged with its multiplication count for
/// cost comparisons across representations.
pub fn posterior_chain(net: &DiscreteNetwork, h: &VarId, evidence: &Assignment) -> Result<Posterior> {
    if evidence.contains(h.as_str()) {
        return Err(Error::contract(format!(
            "hypothesis variable {h} must not be bound in the evidence"
        )));
    }
    marginal_counted(net, std::slice::from_ref(h), evidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variable::ids;

    fn uniform_fork() -> DiscreteNetwork {
        DiscreteNetwork::builder()
            .variable("h", ["w", "v", "s"])
            .variable("g", ["m", "f"])
            .variable("b", ["y", "n"])
            .cpt("h", [] as [&str; 0], [[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]])
            .cpt("g", ["h"], vec![vec![0.5, 0.5]; 3])
            .cpt("b", ["g", "h"], vec![vec![0.5, 0.5]; 6])
            .build()
            .unwrap()
    }

    #[test]
    fn uniform_model_has_uniform_posterior() {
        let net = uniform_fork();
        let p = marginal(&net, &ids(["h"]), &Assignment::new()).unwrap();
        for &v in p.values() {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        let e = net.assignment(&[("g", "m"), ("b", "y")]).unwrap();
        let p = marginal(&net, &ids(["h"]), &e).unwrap();
        for &v in p.values() {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_copy_chain_inverts() {
        let net = DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .variable("b", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("b", ["a"], [[1.0, 0.0], [0.0, 1.0]])
            .build()
            .unwrap();
        let e = Assignment::new().with("b", 1);
        let p = marginal(&net, &ids(["a"]), &e).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0]);
    }

    #[test]
    fn impossible_evidence_is_an_error() {
        let net = DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[1.0, 0.0]])
            .build()
            .unwrap();
        let e = Assignment::new().with("a", 1);
        assert!(matches!(
            marginal(&net, &ids(["a"]), &e),
            Err(Error::Contract(_))
        ));
        // Evidence on a non-target with probability zero.
        let net = DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .variable("b", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[1.0, 0.0]])
            .cpt("b", ["a"], [[0.5, 0.5], [0.5, 0.5]])
            .build()
            .unwrap();
        let e = Assignment::new().with("a", 1);
        assert!(matches!(
            marginal(&net, &ids(["b"]), &e),
            Err(Error::InconsistentEvidence(_))
        ));
    }

    #[test]
    fn posterior_chain_matches_marginal() {
        let net = uniform_fork();
        let e = net.assignment(&[("b", "y")]).unwrap();
        let via_chain = posterior_chain(&net, &"h".into(), &e).unwrap();
        let via_marginal = marginal(&net, &ids(["h"]), &e).unwrap();
        assert_eq!(via_chain.factor.values(), via_marginal.values());
    }
}
