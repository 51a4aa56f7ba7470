//! Reassembling the full joint distribution from a similarity network's
//! pruned parts.
//!
//! A variable pruned from one local network keeps its conditional in some
//! other network of the cover; because it was prunable, the conditional is
//! the same for every hypothesis along the connecting path. Looking it up
//! therefore walks the similarity hypergraph to the nearest network that
//! depicts the variable, swapping the hypothesis point for a shared one at
//! each step.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::assignment::Assignment;
use crate::elimination::marginal;
use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::hypothesis::HypothesisPoint;
use crate::joint::JointTable;
use crate::shape;
use crate::variable::{VarId, Variable};

use super::{recover_priors, SimilarityNetwork};

/// The conditional distribution of `var` given `given`, under hypothesis
/// point `p`, evaluated in the nearest local network that depicts `var`.
///
/// The path is a breadth-first shortest one over edges sharing at least one
/// hypothesis point, ties broken by ascending edge index; at each hop the
/// hypothesis anchor is swapped for the lowest-indexed shared point. The
/// destination network sees only the depicted part of `given`.
///
/// Returns `None` when no local network depicts `var` at all: such a variable
/// cannot alter any posterior and is simply omitted.
pub fn conditional_factor(
    s: &SimilarityNetwork,
    var: &VarId,
    given: &Assignment,
    p: &HypothesisPoint,
) -> Result<Option<Factor>> {
    let path = match shortest_depicting_path(s, var, p)? {
        Some(path) => path,
        None => return Ok(None),
    };
    conditional_factor_via(s, var, given, p, &path)
}

/// Like [`conditional_factor`], but along an explicit hypergraph path (each
/// consecutive pair of edges must share a point; the first edge must contain
/// `p`; the last must depict `var`). Lets path independence be tested rather
/// than assumed.
pub fn conditional_factor_via(
    s: &SimilarityNetwork,
    var: &VarId,
    given: &Assignment,
    p: &HypothesisPoint,
    path: &[usize],
) -> Result<Option<Factor>> {
    let space = s.space();
    space.check_point(p)?;
    if given.contains(var.as_str()) {
        return Err(Error::contract(format!(
            "conditioning assignment must not bind {var}"
        )));
    }
    for (bound, _) in given.iter() {
        if space.contains_var(bound.as_str()) {
            return Err(Error::contract(format!(
                "conditioning assignment must not bind hypothesis variable {bound}"
            )));
        }
    }
    if s.universe_var(var.as_str()).is_none() {
        return Err(Error::contract(format!("unknown variable {var}")));
    }
    let Some(&first) = path.first() else {
        return Err(Error::contract("path must not be empty"));
    };
    let start = space.point_index(p)?;
    if !s.cover().edge(first).contains(&start) {
        return Err(Error::contract(format!(
            "path must start at an edge containing {}",
            space.label(p)
        )));
    }

    // Walk the path, swapping the anchor for the lowest-indexed shared point
    // at each hop.
    let mut anchor = start;
    for window in path.windows(2) {
        let (a, b) = (window[0], window[1]);
        let shared = s.cover().edge(a).intersection(s.cover().edge(b)).next();
        let Some(&shared) = shared else {
            return Err(Error::contract(format!(
                "path edges {a} and {b} share no hypothesis point"
            )));
        };
        anchor = shared;
    }
    let dest = *path.last().unwrap();
    let local = &s.locals()[dest];
    if !local.depicts(var.as_str()) {
        return Err(Error::contract(format!(
            "path must end at a local network depicting {var}"
        )));
    }

    let anchor_point = space.point_at(anchor)?;
    let mut evidence = Assignment::new();
    for (hv, &idx) in space.vars().iter().zip(anchor_point.indices()) {
        evidence.bind(hv.id().clone(), idx);
    }
    for (bound, value) in given.iter() {
        if local.depicts(bound.as_str()) {
            evidence.bind(bound.clone(), value);
        }
    }
    let result = marginal(local.network(), std::slice::from_ref(var), &evidence);
    match result {
        Ok(factor) => Ok(Some(factor)),
        Err(Error::InconsistentEvidence(_)) => Err(Error::UndefinedConditional(format!(
            "conditioning event for {var} has probability zero in local network {dest} \
             (anchor {})",
            space.label(&anchor_point)
        ))),
        Err(e) => Err(e),
    }
}

/// Breadth-first shortest path from any edge containing `p` to an edge
/// depicting `var`; `None` when no edge depicts it.
fn shortest_depicting_path(
    s: &SimilarityNetwork,
    var: &VarId,
    p: &HypothesisPoint,
) -> Result<Option<Vec<usize>>> {
    let space = s.space();
    let start = space.point_index(p)?;
    if s.depicting_edges(var.as_str()).is_empty() {
        return Ok(None);
    }
    let edge_count = s.cover().edge_count();
    let mut parent: Vec<Option<usize>> = vec![None; edge_count];
    let mut seen = vec![false; edge_count];
    let mut queue = VecDeque::new();
    for e in 0..edge_count {
        if s.cover().edge(e).contains(&start) {
            seen[e] = true;
            queue.push_back(e);
        }
    }
    if queue.is_empty() {
        return Err(Error::contract(format!(
            "no cover edge contains {}",
            space.label(p)
        )));
    }
    while let Some(e) = queue.pop_front() {
        if s.locals()[e].depicts(var.as_str()) {
            let mut path = vec![e];
            let mut cur = e;
            while let Some(prev) = parent[cur] {
                path.push(prev);
                cur = prev;
            }
            path.reverse();
            return Ok(Some(path));
        }
        for n in s.cover().neighbors(e) {
            if !seen[n] {
                seen[n] = true;
                parent[n] = Some(e);
                queue.push_back(n);
            }
        }
    }
    // Depicting edges exist but are unreachable: disconnected cover.
    Err(Error::contract(format!(
        "no hypergraph path reaches a network depicting {var}; the cover is disconnected"
    )))
}

/// Rebuild the full joint table encoded by a similarity network: recovered
/// priors times a chain of [`conditional_factor`] lookups under a fixed
/// global ordering (hypothesis variables first, then the clue variables in a
/// topological order of the union of all local arc sets, ties by id).
pub fn reconstruct_joint(s: &SimilarityNetwork) -> Result<JointTable> {
    Ok(reconstruct_joint_counted(s)?.0)
}

/// Like [`reconstruct_joint`], also reporting the number of scalar
/// multiplications spent assembling the table.
pub fn reconstruct_joint_counted(s: &SimilarityNetwork) -> Result<(JointTable, u64)> {
    let space = s.space();
    let priors = recover_priors(s)?;
    let order = chain_order(s)?;
    let scope: Vec<Variable> = space
        .vars()
        .iter()
        .cloned()
        .chain(order.iter().map(|v| s.universe_var(v.as_str()).unwrap().clone()))
        .collect();
    let cards: Vec<usize> = scope.iter().map(|v| v.cardinality()).collect();
    let mut values = vec![0.0; shape::size(&cards)];
    let mut multiplications = 0u64;

    let hyp_count = space.vars().len();
    for (pidx, point) in space.points().into_iter().enumerate() {
        let prior = priors.values()[pidx];
        if prior == 0.0 {
            continue;
        }
        let mut prefix_idx: Vec<usize> = point.indices().to_vec();
        prefix_idx.resize(cards.len(), 0);
        descend(
            s,
            &order,
            &point,
            0,
            prior,
            &mut Assignment::new(),
            &mut prefix_idx,
            hyp_count,
            &cards,
            &mut values,
            &mut multiplications,
        )?;
    }
    Ok((JointTable::new(scope, values)?, multiplications))
}

#[allow(clippy::too_many_arguments)]
fn descend(
    s: &SimilarityNetwork,
    order: &[VarId],
    point: &HypothesisPoint,
    level: usize,
    acc: f64,
    given: &mut Assignment,
    prefix_idx: &mut Vec<usize>,
    hyp_count: usize,
    cards: &[usize],
    values: &mut [f64],
    multiplications: &mut u64,
) -> Result<()> {
    if level == order.len() {
        values[shape::ravel(prefix_idx, cards)] = acc;
        return Ok(());
    }
    let var = &order[level];
    let Some(row) = conditional_factor(s, var, given, point)? else {
        return Err(Error::contract(format!(
            "variable {var} is depicted in no local network"
        )));
    };
    for (value, &p) in row.values().iter().enumerate() {
        let child = acc * p;
        *multiplications += 1;
        if child == 0.0 {
            continue; // every cell below stays zero
        }
        given.bind(var.clone(), value);
        prefix_idx[hyp_count + level] = value;
        descend(
            s,
            order,
            point,
            level + 1,
            child,
            given,
            prefix_idx,
            hyp_count,
            cards,
            values,
            multiplications,
        )?;
    }
    given.remove(var.as_str());
    prefix_idx[hyp_count + level] = 0;
    Ok(())
}

/// The clue variables in a topological order of the union of all local arc
/// sets (non-hypothesis arcs only), ties broken by ascending id.
fn chain_order(s: &SimilarityNetwork) -> Result<Vec<VarId>> {
    let space = s.space();
    let clue_vars: Vec<VarId> = s
        .universe()
        .iter()
        .filter(|v| !space.contains_var(v.id().as_str()))
        .map(|v| v.id().clone())
        .collect();
    let mut arcs: BTreeSet<(VarId, VarId)> = BTreeSet::new();
    for local in s.locals() {
        for (from, to) in local.network().arcs() {
            if !space.contains_var(from.as_str()) && !space.contains_var(to.as_str()) {
                arcs.insert((from, to));
            }
        }
    }
    let mut indegree: BTreeMap<&VarId, usize> = clue_vars.iter().map(|v| (v, 0)).collect();
    for (_, to) in &arcs {
        if let Some(d) = indegree.get_mut(to) {
            *d += 1;
        }
    }
    let mut ready: BTreeSet<&VarId> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut order = Vec::with_capacity(clue_vars.len());
    while let Some(&next) = ready.iter().next() {
        ready.remove(next);
        order.push(next.clone());
        for (from, to) in &arcs {
            if from == next {
                if let Some(d) = indegree.get_mut(to) {
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(to);
                    }
                }
            }
        }
    }
    if order.len() != clue_vars.len() {
        return Err(Error::CyclicNetwork(
            "the union of local arc sets orients the clue variables cyclically".into(),
        ));
    }
    Ok(order)
}
