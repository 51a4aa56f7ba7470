//! Translation of a similarity network into a redundancy-free multinet, and
//! detection of the redundancy that motivates it.

use std::collections::BTreeSet;

use crate::assignment::Assignment;
use crate::elimination::marginal;
use crate::error::{Error, Result};
use crate::hypothesis::HypothesisPoint;
use crate::multinet::{chain_cpts_from_prior, Multinet};
use crate::network::DiscreteNetwork;
use crate::shape;
use crate::table::Cpt;
use crate::variable::{VarId, Variable};

use super::{
    conditional_factor, recover_priors, SimilarityNetwork, COHERENCE_TOLERANCE,
};

/// Convert a similarity network into a joint-equivalent Bayesian multinet.
///
/// Step 1 augments every local network with the variables it does not
/// depict: an added variable's parents are the union of its parents in every
/// other local network where it originally appeared, minus the variables
/// originally in this one, and its CPT rows come from [`conditional_factor`]
/// lookups against the original similarity network.
///
/// Step 2 removes redundant local networks greedily (lowest index first, as
/// long as the remaining edges still cover the domain), assigns every
/// hypothesis point to the first remaining edge containing it, and restricts
/// each surviving network's hypothesis support to its assigned points, with
/// block priors taken from [`recover_priors`].
pub fn convert_to_multinet(s: &SimilarityNetwork) -> Result<Multinet> {
    let space = s.space();
    let priors = recover_priors(s)?;
    for (i, local) in s.locals().iter().enumerate() {
        for hv in space.vars() {
            let closed = local
                .network()
                .parents(hv.id().as_str())
                .iter()
                .all(|p| space.contains_var(p.as_str()));
            if !closed {
                return Err(Error::contract(format!(
                    "conversion requires hypothesis variables to have only hypothesis \
                     parents; {} has clue parents in local network {i}",
                    hv.id()
                )));
            }
        }
    }

    // Step 1: augment every local network to the full universe.
    let mut augmented = Vec::with_capacity(s.locals().len());
    for (i, local) in s.locals().iter().enumerate() {
        augmented.push(augment_local(s, i, local.network())?);
    }

    // Step 2a: drop redundant edges while the rest still cover the domain.
    let mut kept: Vec<usize> = (0..s.cover().edge_count()).collect();
    for i in 0..s.cover().edge_count() {
        let without: BTreeSet<usize> = kept
            .iter()
            .filter(|&&e| e != i)
            .flat_map(|&e| s.cover().edge(e).iter().copied())
            .collect();
        if without.len() == space.domain_size() {
            kept.retain(|&e| e != i);
        }
    }

    // Step 2b: first-containing-edge assignment among the kept edges.
    let mut blocks: Vec<Vec<HypothesisPoint>> = vec![Vec::new(); kept.len()];
    for idx in 0..space.domain_size() {
        let slot = kept
            .iter()
            .position(|&e| s.cover().edge(e).contains(&idx))
            .expect("kept edges cover the domain");
        blocks[slot].push(space.point_at(idx)?);
    }

    // Step 2c: restrict each surviving network's hypothesis support to its
    // block, rebuilding the hypothesis CPTs from the recovered priors.
    let mut locals = Vec::with_capacity(kept.len());
    let mut block_priors = Vec::with_capacity(kept.len());
    for (slot, &e) in kept.iter().enumerate() {
        let block: Vec<usize> = blocks[slot]
            .iter()
            .map(|p| space.point_index(p).unwrap())
            .collect();
        let mass: f64 = block.iter().map(|&p| priors.values()[p]).sum();
        block_priors.push(mass);
        let mut in_block = vec![0.0; space.domain_size()];
        for &p in &block {
            in_block[p] = priors.values()[p] / mass;
        }
        let mut warnings = Vec::new();
        let hyp_cpts = chain_cpts_from_prior(space, &in_block, &mut warnings)?;
        let mut net = augmented[e].clone();
        for cpt in hyp_cpts {
            net = net.with_cpt(cpt)?;
        }
        locals.push(net);
    }

    Multinet::new(space.clone(), blocks, locals, block_priors)
}

/// Add every universe variable missing from one local network, per the
/// union-of-other-parents rule.
fn augment_local(
    s: &SimilarityNetwork,
    edge: usize,
    original: &DiscreteNetwork,
) -> Result<DiscreteNetwork> {
    let space = s.space();
    let originally_depicted: BTreeSet<VarId> = original
        .variables()
        .iter()
        .map(|v| v.id().clone())
        .collect();
    let missing: Vec<&Variable> = s
        .universe()
        .iter()
        .filter(|v| !originally_depicted.contains(v.id()))
        .collect();
    if missing.is_empty() {
        return Ok(original.clone());
    }
    let anchor = {
        let &first = s.cover().edge(edge).iter().next().expect("edges are nonempty");
        space.point_at(first)?
    };
    let mut variables: Vec<Variable> = original.variables().to_vec();
    let mut cpts: Vec<Cpt> = original
        .variables()
        .iter()
        .map(|v| original.cpt(v.id().as_str()).unwrap().clone())
        .collect();
    for var in missing {
        // Union of the variable's parents in every other local network where
        // it originally appeared, excluding what this network already had.
        let mut parents: BTreeSet<VarId> = BTreeSet::new();
        for (j, other) in s.locals().iter().enumerate() {
            if j == edge || !other.depicts(var.id().as_str()) {
                continue;
            }
            for p in other.network().parents(var.id().as_str()) {
                if !originally_depicted.contains(&p) {
                    parents.insert(p);
                }
            }
        }
        let parents: Vec<VarId> = parents.into_iter().collect();
        let parent_cards: Vec<usize> = parents
            .iter()
            .map(|p| {
                s.universe_var(p.as_str())
                    .map(|v| v.cardinality())
                    .ok_or_else(|| Error::contract(format!("unknown parent {p}")))
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(shape::size(&parent_cards));
        for cfg in shape::configurations(&parent_cards) {
            let mut given = Assignment::new();
            for (p, &idx) in parents.iter().zip(&cfg) {
                given.bind(p.clone(), idx);
            }
            let Some(row) = conditional_factor(s, var.id(), &given, &anchor)? else {
                return Err(Error::contract(format!(
                    "variable {} is depicted in no local network",
                    var.id()
                )));
            };
            rows.push(row.values().to_vec());
        }
        variables.push(var.clone());
        cpts.push(Cpt::new(var.id().clone(), parents, rows)?);
    }
    let net = DiscreteNetwork::new(variables, cpts)?;
    if net.topological_order().is_err() {
        return Err(Error::CyclicNetwork(format!(
            "augmenting local network {edge} creates a directed cycle"
        )));
    }
    Ok(net)
}

/// One parameter that two or more local networks both encode: the conditional
/// row of a variable under a shared hypothesis point and conditioning
/// context.
#[derive(Debug, Clone)]
pub struct SharedParameter {
    pub variable: VarId,
    pub point: HypothesisPoint,
    /// The shared conditioning context (variable, value index), ascending.
    pub context: Vec<(VarId, usize)>,
    /// Edges whose local networks define the row, ascending.
    pub edges: Vec<usize>,
    /// The row each of those networks encodes, aligned with `edges`.
    pub values: Vec<Vec<f64>>,
    /// Largest componentwise difference between any two of the rows.
    pub max_discrepancy: f64,
}

/// Every parameter shared by two or more local networks, with discrepancies.
#[derive(Debug, Clone, Default)]
pub struct RedundancyReport {
    pub entries: Vec<SharedParameter>,
}

impl RedundancyReport {
    /// True when some duplicated parameter disagrees beyond
    /// [`COHERENCE_TOLERANCE`] — the networks contradict each other.
    pub fn incoherent(&self) -> bool {
        self.entries
            .iter()
            .any(|e| e.max_discrepancy > COHERENCE_TOLERANCE)
    }
}

/// Find every CPT row that is semantically specified by two or more local
/// networks: same variable, same hypothesis point, same depicted
/// conditioning context. Rows are compared by evaluating each network's
/// conditional; contexts with probability zero in a network are skipped for
/// that network.
pub fn redundancy_report(s: &SimilarityNetwork) -> Result<RedundancyReport> {
    let space = s.space();
    let mut entries = Vec::new();
    for var in s.universe() {
        if space.contains_var(var.id().as_str()) {
            continue;
        }
        let depicting = s.depicting_edges(var.id().as_str());
        if depicting.len() < 2 {
            continue;
        }
        for idx in 0..space.domain_size() {
            let sharing: Vec<usize> = depicting
                .iter()
                .copied()
                .filter(|&e| s.cover().edge(e).contains(&idx))
                .collect();
            if sharing.len() < 2 {
                continue;
            }
            let point = space.point_at(idx)?;
            // The shared conditioning context: union of the variable's
            // non-hypothesis parents across the sharing networks.
            let mut context_vars: BTreeSet<VarId> = BTreeSet::new();
            for &e in &sharing {
                for p in s.locals()[e].network().parents(var.id().as_str()) {
                    if !space.contains_var(p.as_str()) {
                        context_vars.insert(p);
                    }
                }
            }
            let context_vars: Vec<VarId> = context_vars.into_iter().collect();
            let context_cards: Vec<usize> = context_vars
                .iter()
                .map(|v| s.universe_var(v.as_str()).unwrap().cardinality())
                .collect();
            for cfg in shape::configurations(&context_cards) {
                let mut edges = Vec::new();
                let mut values: Vec<Vec<f64>> = Vec::new();
                for &e in &sharing {
                    let local = &s.locals()[e];
                    let mut evidence = Assignment::new();
                    for (hv, &i) in space.vars().iter().zip(point.indices()) {
                        evidence.bind(hv.id().clone(), i);
                    }
                    for (cv, &i) in context_vars.iter().zip(&cfg) {
                        if local.depicts(cv.as_str()) {
                            evidence.bind(cv.clone(), i);
                        }
                    }
                    match marginal(local.network(), std::slice::from_ref(var.id()), &evidence)
                    {
                        Ok(f) => {
                            edges.push(e);
                            values.push(f.values().to_vec());
                        }
                        Err(Error::InconsistentEvidence(_)) => continue,
                        Err(e) => return Err(e),
                    }
                }
                if edges.len() < 2 {
                    continue;
                }
                let mut max_discrepancy: f64 = 0.0;
                for a in 0..values.len() {
                    for b in a + 1..values.len() {
                        for (x, y) in values[a].iter().zip(&values[b]) {
                            max_discrepancy = max_discrepancy.max((x - y).abs());
                        }
                    }
                }
                entries.push(SharedParameter {
                    variable: var.id().clone(),
                    point: point.clone(),
                    context: context_vars.iter().cloned().zip(cfg.iter().copied()).collect(),
                    edges,
                    values,
                    max_discrepancy,
                });
            }
        }
    }
    Ok(RedundancyReport { entries })
}

impl SharedParameter {
    /// Human-readable description, e.g. `P(g | visitor)` or
    /// `P(b | g=male, worker)`.
    pub fn describe(&self, s: &SimilarityNetwork) -> String {
        let point = s.space().label(&self.point);
        let context = context_label(s, &self.context);
        let given = if context.is_empty() {
            point
        } else {
            format!("{context}, {point}")
        };
        format!(
            "P({} | {given}) in local networks {:?} (max discrepancy {:.3e})",
            self.variable, self.edges, self.max_discrepancy
        )
    }
}

/// Label map used by displays; kept here so the CLI and tests agree.
fn context_label(s: &SimilarityNetwork, context: &[(VarId, usize)]) -> String {
    context
        .iter()
        .map(|(v, i)| {
            let label = s
                .universe_var(v.as_str())
                .map(|var| var.values()[*i].clone())
                .unwrap_or_else(|| i.to_string());
            format!("{v}={label}")
        })
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::simnet::{reconstruct_joint, Cover, OrdinaryLocalNetwork, SimilarityNetwork};

    #[test]
    fn chain_simnet_converts_to_the_two_block_multinet_shape() {
        let s = fixtures::chain_simnet();
        let m = convert_to_multinet(&s).unwrap();
        assert_eq!(m.block_count(), 2);
        let space = m.hypothesis();
        let labels = |i: usize| -> Vec<String> {
            m.block_points(i).iter().map(|p| space.label(p)).collect()
        };
        assert_eq!(labels(0), vec!["visitor", "spy"]);
        assert_eq!(labels(1), vec!["worker", "executive"]);

        // Arc structure of the four-way multinet: the spy/visitor block keeps
        // h -> g, h -> b with the limousine isolated; the worker/executive
        // block keeps g -> b and h -> l with gender parentless.
        let expected = fixtures::four_way_multinet();
        for (converted, reference) in m.locals().iter().zip(expected.locals()) {
            assert_eq!(converted.arcs(), reference.arcs());
        }
    }

    #[test]
    fn conversion_preserves_the_joint() {
        let s = fixtures::chain_simnet();
        let m = convert_to_multinet(&s).unwrap();
        let converted = m.union_network().unwrap().network.enumerate_joint().unwrap();
        let source = reconstruct_joint(&s).unwrap();
        assert!(converted.max_abs_difference(&source).unwrap() < 1e-9);
    }

    #[test]
    fn single_edge_partition_converts_to_itself_up_to_prior_refactoring() {
        // A partition cover with one comprehensive network is the degenerate
        // connected case: conversion returns it as a one-block multinet.
        let m = fixtures::split_multinet();
        let union = m.union_network().unwrap().network;
        let space = m.hypothesis().clone();
        let cover = Cover::new(space.clone(), vec![space.points()]).unwrap();
        let s = SimilarityNetwork::new(
            cover,
            vec![OrdinaryLocalNetwork::new(union.clone())],
        )
        .unwrap();
        let converted = convert_to_multinet(&s).unwrap();
        assert_eq!(converted.block_count(), 1);
        assert_eq!(converted.locals()[0].arcs(), union.arcs());
        let a = converted.union_network().unwrap().network.enumerate_joint().unwrap();
        let b = union.enumerate_joint().unwrap();
        assert!(a.max_abs_difference(&b).unwrap() < 1e-12);
    }

    #[test]
    fn disconnected_partition_priors_are_unrecoverable() {
        // A partition with two or more blocks has a disconnected similarity
        // hypergraph, so the priors (and hence conversion) cannot be derived
        // from within-edge conditionals.
        let m = fixtures::four_way_multinet();
        let space = m.hypothesis().clone();
        let cover =
            Cover::new(space, vec![m.block_points(0), m.block_points(1)]).unwrap();
        let locals = m
            .locals()
            .iter()
            .map(|n| OrdinaryLocalNetwork::new(n.clone()))
            .collect();
        let s = SimilarityNetwork::new(cover, locals).unwrap();
        assert!(convert_to_multinet(&s).is_err());
    }

    #[test]
    fn redundancy_report_finds_the_shared_visitor_gender_row() {
        let s = fixtures::chain_simnet();
        let report = redundancy_report(&s).unwrap();
        let space = s.space();
        let visitor = space.point(&["visitor"]).unwrap();
        let entry = report
            .entries
            .iter()
            .find(|e| e.variable.as_str() == "g" && e.point == visitor && e.context.is_empty())
            .expect("P(g | visitor) is specified by both the first and second network");
        assert_eq!(entry.edges, vec![0, 1]);
        assert!(entry.max_discrepancy < 1e-12);
        assert!(!report.incoherent());
    }

    #[test]
    fn partition_multinet_viewed_as_simnet_has_no_redundancy() {
        let m = fixtures::four_way_multinet();
        let space = m.hypothesis().clone();
        let cover =
            Cover::new(space, vec![m.block_points(0), m.block_points(1)]).unwrap();
        let locals = m
            .locals()
            .iter()
            .map(|n| OrdinaryLocalNetwork::new(n.clone()))
            .collect();
        let s = SimilarityNetwork::new(cover, locals).unwrap();
        let report = redundancy_report(&s).unwrap();
        assert!(report.entries.is_empty());
    }

    #[test]
    fn mismatched_duplicate_is_flagged_incoherent() {
        let s = fixtures::chain_simnet();
        // Perturb P(g | visitor) in the second network by 0.1.
        let mut nets: Vec<_> = s.locals().iter().map(|l| l.network().clone()).collect();
        let mut rows = nets[1].cpt("g").unwrap().rows().to_vec();
        rows[2] = vec![0.6, 0.4];
        nets[1] = nets[1]
            .with_cpt(Cpt::new("g", ["h"], rows).unwrap())
            .unwrap();
        let tampered = SimilarityNetwork::new(
            s.cover().clone(),
            nets.into_iter().map(OrdinaryLocalNetwork::new).collect(),
        )
        .unwrap();
        let report = redundancy_report(&tampered).unwrap();
        assert!(report.incoherent());
        let worst = report
            .entries
            .iter()
            .map(|e| e.max_discrepancy)
            .fold(0.0, f64::max);
        assert!((worst - 0.1).abs() < 1e-9);
    }
}
