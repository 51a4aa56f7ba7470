//! Bayesian multinets: a partition of the hypothesis domain with one local
//! network per block.
//!
//! Each local network represents the distribution conditioned on its block,
//! which lets it encode independence that holds only for those hypotheses.
//! Queries combine per-block likelihoods with the hypothesis priors, touching
//! only the small conditioned factors, and the whole model can be flattened
//! back into a single network by taking the union of the local arc sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::assignment::Assignment;
use crate::elimination::{cpt_factor, eliminate, marginal_counted, Posterior};
use crate::error::{Error, Result, Warning};
use crate::factor::Factor;
use crate::hypothesis::{HypothesisPoint, HypothesisSpace};
use crate::joint::JointTable;
use crate::network::DiscreteNetwork;
use crate::report::{ValidationReport, ViolationKind};
use crate::shape;
use crate::table::{Cpt, NORMALIZATION_TOLERANCE};
use crate::variable::{VarId, Variable};

/// A single network equivalent to a multinet, plus uniform-fill warnings for
/// CPT rows whose conditioning context is unreachable under the mixture.
#[derive(Debug, Clone)]
pub struct UnionNetwork {
    pub network: DiscreteNetwork,
    pub warnings: Vec<Warning>,
}

/// A partition of `domain(H)` with one local network per block.
///
/// Block priors are stored separately from the within-block hypothesis
/// conditionals that live in the local networks; the prior of a hypothesis
/// point is their product.
#[derive(Debug, Clone)]
pub struct Multinet {
    hypothesis: HypothesisSpace,
    blocks: Vec<BTreeSet<usize>>,
    locals: Vec<DiscreteNetwork>,
    block_priors: Vec<f64>,
    /// First block containing each point; None when no block covers it.
    owner: Vec<Option<usize>>,
    /// block prior times within-block conditional, one entry per point.
    point_priors: Vec<f64>,
    /// Per local: every hypothesis variable has only hypothesis parents.
    hyp_closed: Vec<bool>,
}

impl Multinet {
    /// Build a multinet. Structural requirements are enforced here (matching
    /// lengths, known points, every local over the same variable set with the
    /// hypothesis variables present); semantic invariants are the business of
    /// [`Multinet::validate`].
    pub fn new(
        hypothesis: HypothesisSpace,
        blocks: Vec<Vec<HypothesisPoint>>,
        locals: Vec<DiscreteNetwork>,
        block_priors: Vec<f64>,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::contract("a multinet needs at least one block"));
        }
        if blocks.len() != locals.len() || blocks.len() != block_priors.len() {
            return Err(Error::contract(format!(
                "{} blocks, {} local networks and {} block priors must all match",
                blocks.len(),
                locals.len(),
                block_priors.len()
            )));
        }
        let mut index_blocks = Vec::with_capacity(blocks.len());
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::contract(format!("block {i} is empty")));
            }
            let mut set = BTreeSet::new();
            for p in block {
                set.insert(hypothesis.point_index(p)?);
            }
            index_blocks.push(set);
        }
        check_shared_universe(&locals, &hypothesis)?;

        let owner = compute_owner(hypothesis.domain_size(), &index_blocks);
        let hyp_closed: Vec<bool> = locals
            .iter()
            .map(|net| hypothesis_closed(net, &hypothesis))
            .collect();
        let point_priors =
            compute_point_priors(&hypothesis, &locals, &block_priors, &owner)?;
        Ok(Multinet {
            hypothesis,
            blocks: index_blocks,
            locals,
            block_priors,
            owner,
            point_priors,
            hyp_closed,
        })
    }

    pub fn hypothesis(&self) -> &HypothesisSpace {
        &self.hypothesis
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_points(&self, i: usize) -> Vec<HypothesisPoint> {
        self.blocks[i]
            .iter()
            .map(|&idx| self.hypothesis.point_at(idx).expect("index validated"))
            .collect()
    }

    pub fn locals(&self) -> &[DiscreteNetwork] {
        &self.locals
    }

    pub fn block_priors(&self) -> &[f64] {
        &self.block_priors
    }

    /// The mixture prior over `domain(H)` in canonical point order.
    pub fn point_priors(&self) -> &[f64] {
        &self.point_priors
    }

    /// Check every semantic invariant: the blocks partition the domain, the
    /// priors normalize, each local network is valid, and no local network
    /// puts hypothesis mass outside its own block.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, block) in self.blocks.iter().enumerate() {
            for &p in block {
                if let Some(&other) = seen.get(&p) {
                    let label = self
                        .hypothesis
                        .label(&self.hypothesis.point_at(p).unwrap());
                    report.push(
                        ViolationKind::NonPartition,
                        format!("hypothesis point {label} appears in blocks {other} and {i}"),
                    );
                } else {
                    seen.insert(p, i);
                }
            }
        }
        for idx in 0..self.hypothesis.domain_size() {
            if !seen.contains_key(&idx) {
                let label = self
                    .hypothesis
                    .label(&self.hypothesis.point_at(idx).unwrap());
                report.push(
                    ViolationKind::NonPartition,
                    format!("hypothesis point {label} is covered by no block"),
                );
            }
        }
        let prior_sum: f64 = self.block_priors.iter().sum();
        if (prior_sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            report.push(
                ViolationKind::PriorNotNormalized,
                format!("block priors sum to {prior_sum}, expected 1"),
            );
        }
        if self
            .block_priors
            .iter()
            .any(|p| !(0.0..=1.0).contains(p) || !p.is_finite())
        {
            report.push(
                ViolationKind::EntryOutOfRange,
                "block priors contain entries outside [0, 1]".to_string(),
            );
        }
        for (i, local) in self.locals.iter().enumerate() {
            report.absorb(&format!("local network {i}"), local.validate());
            match in_block_conditional(local, &self.hypothesis) {
                Ok(q) => {
                    for (idx, &mass) in q.iter().enumerate() {
                        if !self.blocks[i].contains(&idx) && mass.abs() > NORMALIZATION_TOLERANCE {
                            let label = self
                                .hypothesis
                                .label(&self.hypothesis.point_at(idx).unwrap());
                            report.push(
                                ViolationKind::SupportLeak,
                                format!(
                                    "local network {i} puts mass {mass} on {label}, \
                                     outside its block"
                                ),
                            );
                        }
                    }
                }
                Err(e) => report.push(
                    ViolationKind::SupportLeak,
                    format!("local network {i}: hypothesis marginal not computable: {e}"),
                ),
            }
        }
        report
    }

    /// Prior probability of a hypothesis point: its block's prior times the
    /// within-block conditional encoded in that block's local network.
    pub fn hypothesis_prior(&self, p: &HypothesisPoint) -> Result<f64> {
        let idx = self.hypothesis.point_index(p)?;
        if self.owner[idx].is_none() {
            return Err(Error::contract(format!(
                "hypothesis point {} is covered by no block",
                self.hypothesis.label(p)
            )));
        }
        Ok(self.point_priors[idx])
    }

    /// P(evidence | p), computed inside the block containing `p`.
    pub fn likelihood(&self, p: &HypothesisPoint, evidence: &Assignment) -> Result<f64> {
        let idx = self.hypothesis.point_index(p)?;
        let Some(block) = self.owner[idx] else {
            return Err(Error::contract(format!(
                "hypothesis point {} is covered by no block",
                self.hypothesis.label(p)
            )));
        };
        self.check_clue_evidence(evidence)?;
        let mut mults = 0;
        self.likelihood_in_block(block, p, evidence, &mut mults)
    }

    fn likelihood_in_block(
        &self,
        block: usize,
        p: &HypothesisPoint,
        evidence: &Assignment,
        mults: &mut u64,
    ) -> Result<f64> {
        let local = &self.locals[block];
        let q = in_block_conditional(local, &self.hypothesis)?;
        let idx = self.hypothesis.point_index(p)?;
        if q[idx] == 0.0 {
            return Err(Error::UndefinedLikelihood(format!(
                "hypothesis point {} has zero probability inside its block",
                self.hypothesis.label(p)
            )));
        }
        let hyp_evidence = self.point_assignment(p);
        if self.hyp_closed[block] {
            // The hypothesis variables are ancestrally closed, so dropping
            // their CPT factors and conditioning the rest on the point yields
            // P(evidence | p) directly, with no division.
            let factors = self.non_hypothesis_factors(local);
            let combined = hyp_evidence.merged(evidence);
            let result = eliminate(factors, &combined, &BTreeSet::new(), mults)?;
            Ok(result.values()[0])
        } else {
            let all: Vec<Factor> = (0..local.variables().len())
                .map(|i| cpt_factor(local, i))
                .collect();
            let combined = hyp_evidence.merged(evidence);
            let numer = eliminate(all.clone(), &combined, &BTreeSet::new(), mults)?;
            let denom = eliminate(all, &hyp_evidence, &BTreeSet::new(), mults)?;
            let denom = denom.values()[0];
            if denom == 0.0 {
                return Err(Error::UndefinedLikelihood(format!(
                    "hypothesis point {} has zero probability inside its block",
                    self.hypothesis.label(p)
                )));
            }
            Ok(numer.values()[0] / denom)
        }
    }

    /// The posterior over `domain(H)` given clue evidence, per-block
    /// likelihoods combined with the stored priors, along with the number of
    /// multiplications spent — the cost metric compared against the
    /// single-network route.
    pub fn posterior(&self, evidence: &Assignment) -> Result<Posterior> {
        self.posterior_with_priors(&self.point_priors, evidence)
    }

    /// Two-staged inference for hypothesis variables that are not roots:
    /// a separate prior network relates a-priori factors to the hypothesis
    /// variables; its posterior replaces the stored priors before the clue
    /// evidence is weighed by the local networks.
    pub fn staged_posterior(
        &self,
        prior_net: &DiscreteNetwork,
        apriori_evidence: &Assignment,
        clue_evidence: &Assignment,
    ) -> Result<Posterior> {
        for v in self.hypothesis.vars() {
            match prior_net.variable(v.id().as_str()) {
                Some(pv) if pv.values() == v.values() => {}
                Some(_) => {
                    return Err(Error::contract(format!(
                        "prior network defines hypothesis variable {} differently",
                        v.id()
                    )))
                }
                None => {
                    return Err(Error::contract(format!(
                        "prior network is missing hypothesis variable {}",
                        v.id()
                    )))
                }
            }
        }
        let hyp_ids = self.hypothesis.var_ids();
        let revised = marginal_counted(prior_net, &hyp_ids, apriori_evidence)?;
        let ordered = revised.factor.reordered(&hyp_ids)?;
        let mut out = self.posterior_with_priors(ordered.values(), clue_evidence)?;
        out.multiplications += revised.multiplications;
        Ok(out)
    }

    fn posterior_with_priors(&self, priors: &[f64], evidence: &Assignment) -> Result<Posterior> {
        self.check_clue_evidence(evidence)?;
        let hyp_ids = self.hypothesis.var_ids();
        let domain = self.hypothesis.domain_size();
        let mut numerator = vec![0.0; domain];
        let mut mults = 0u64;
        for (i, local) in self.locals.iter().enumerate() {
            let mine: Vec<usize> = (0..domain)
                .filter(|&p| self.owner[p] == Some(i))
                .collect();
            if mine.is_empty() {
                continue;
            }
            if self.hyp_closed[i] {
                let (rnet, kept) = restrict_to_block(local, &self.hypothesis, &self.blocks[i]);
                let factors = self.non_hypothesis_factors(&rnet);
                let keep: BTreeSet<VarId> = hyp_ids.iter().cloned().collect();
                let likelihoods = eliminate(factors, evidence, &keep, &mut mults)?;
                // Prior factor over the block's restricted product domain,
                // masked to the points this block owns.
                let restricted_cards: Vec<usize> = kept.iter().map(|k| k.len()).collect();
                let mut prior_values = vec![0.0; shape::size(&restricted_cards)];
                let full_cards = self.hypothesis.cards();
                for (flat, cfg) in shape::configurations(&restricted_cards).enumerate() {
                    let full: Vec<usize> = cfg.iter().zip(&kept).map(|(&c, k)| k[c]).collect();
                    let global = shape::ravel(&full, &full_cards);
                    if self.owner[global] == Some(i) {
                        prior_values[flat] = priors[global];
                    }
                }
                let prior_factor =
                    Factor::new(hyp_ids.clone(), restricted_cards.clone(), prior_values)?;
                let combined = prior_factor.product(&likelihoods, &mut mults);
                let combined = combined.reordered(&hyp_ids)?;
                for (flat, cfg) in shape::configurations(&restricted_cards).enumerate() {
                    let full: Vec<usize> = cfg.iter().zip(&kept).map(|(&c, k)| k[c]).collect();
                    let global = shape::ravel(&full, &full_cards);
                    if self.owner[global] == Some(i) {
                        numerator[global] = combined.values()[flat];
                    }
                }
            } else {
                for &pidx in &mine {
                    if priors[pidx] == 0.0 {
                        continue;
                    }
                    let p = self.hypothesis.point_at(pidx)?;
                    let lik = self.likelihood_in_block(i, &p, evidence, &mut mults)?;
                    mults += 1;
                    numerator[pidx] = priors[pidx] * lik;
                }
            }
        }
        let total: f64 = numerator.iter().sum();
        if total == 0.0 {
            return Err(Error::InconsistentEvidence(format!(
                "evidence {evidence} has probability zero under every hypothesis"
            )));
        }
        let values: Vec<f64> = numerator.iter().map(|v| v / total).collect();
        let factor = Factor::new(hyp_ids, self.hypothesis.cards(), values)?;
        Ok(Posterior {
            factor,
            multiplications: mults,
        })
    }

    /// Flatten into a single network over the union of all local arc sets.
    ///
    /// Hypothesis variables get CPTs chain-factorized from the mixture prior;
    /// every other variable keeps the union of its local parent sets and
    /// additionally gains hypothesis parents exactly where its conditional
    /// table actually differs across hypothesis points, so independence that
    /// holds for *all* hypotheses stays visible in the topology. Rows whose
    /// conditioning context is unreachable under the mixture are set uniform
    /// and flagged.
    pub fn union_network(&self) -> Result<UnionNetwork> {
        if self.hyp_closed.iter().any(|&c| !c) {
            return Err(Error::contract(
                "union construction requires hypothesis variables to have only \
                 hypothesis parents in every local network",
            ));
        }
        let hyp_ids: BTreeSet<VarId> = self.hypothesis.var_ids().into_iter().collect();

        // Union of the local arc sets must be acyclic before anything else.
        let mut union_arcs: BTreeSet<(VarId, VarId)> = BTreeSet::new();
        for local in &self.locals {
            union_arcs.extend(local.arcs());
        }
        check_acyclic(&union_arcs)?;

        let mut warnings = Vec::new();
        let block_joints: Vec<JointTable> = self
            .locals
            .iter()
            .map(|l| l.enumerate_joint())
            .collect::<Result<_>>()?;

        // Canonical variable order: hypothesis variables first, then the rest
        // ascending by id.
        let template = &self.locals[0];
        let mut variables: Vec<Variable> = self.hypothesis.vars().to_vec();
        let mut rest: Vec<Variable> = template
            .variables()
            .iter()
            .filter(|v| !hyp_ids.contains(v.id()))
            .cloned()
            .collect();
        rest.sort_by(|a, b| a.id().cmp(b.id()));
        variables.extend(rest.iter().cloned());

        let mut cpts = chain_cpts_from_prior(&self.hypothesis, &self.point_priors, &mut warnings)?;
        for var in &rest {
            cpts.push(self.union_cpt_for(var, &union_arcs, &block_joints, &mut warnings)?);
        }
        let network = DiscreteNetwork::new(variables, cpts)?;
        if network.topological_order().is_err() {
            return Err(Error::CyclicNetwork(
                "union of local arc sets plus hypothesis arcs is cyclic".into(),
            ));
        }
        Ok(UnionNetwork { network, warnings })
    }

    fn union_cpt_for(
        &self,
        var: &Variable,
        union_arcs: &BTreeSet<(VarId, VarId)>,
        block_joints: &[JointTable],
        warnings: &mut Vec<Warning>,
    ) -> Result<Cpt> {
        let hyp_ids = self.hypothesis.var_ids();
        let template = &self.locals[0];
        // Link-union parents of this variable.
        let linked: BTreeSet<VarId> = union_arcs
            .iter()
            .filter(|(_, to)| to == var.id())
            .map(|(from, _)| from.clone())
            .collect();
        let context_vars: Vec<VarId> = linked
            .iter()
            .filter(|v| !hyp_ids.contains(v))
            .cloned()
            .collect();
        let context_cards: Vec<usize> = context_vars
            .iter()
            .map(|v| template.variable(v.as_str()).unwrap().cardinality())
            .collect();
        let context_total = shape::size(&context_cards);
        let domain = self.hypothesis.domain_size();

        // Conditional rows per (point, context) from the owning block's joint.
        let mut rows: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; context_total]; domain];
        for pidx in 0..domain {
            let Some(block) = self.owner[pidx] else { continue };
            let point = self.hypothesis.point_at(pidx)?;
            for (cflat, cfg) in shape::configurations(&context_cards).enumerate() {
                let mut context = self.point_assignment(&point);
                for (v, &idx) in context_vars.iter().zip(&cfg) {
                    context.bind(v.clone(), idx);
                }
                rows[pidx][cflat] =
                    conditional_row(&block_joints[block], var.id(), &context)?;
            }
        }

        // A hypothesis variable becomes a parent exactly when two points that
        // differ only in it disagree on some defined row.
        let hyp_cards = self.hypothesis.cards();
        let mut needed: BTreeSet<VarId> = linked
            .iter()
            .filter(|v| hyp_ids.contains(v))
            .cloned()
            .collect();
        for (j, hv) in self.hypothesis.vars().iter().enumerate() {
            if needed.contains(hv.id()) {
                continue;
            }
            'outer: for pidx in 0..domain {
                let mut cfg = vec![0usize; hyp_cards.len()];
                shape::unravel(pidx, &hyp_cards, &mut cfg);
                for alt in 0..hyp_cards[j] {
                    if alt <= cfg[j] {
                        continue;
                    }
                    let mut other = cfg.clone();
                    other[j] = alt;
                    let oidx = shape::ravel(&other, &hyp_cards);
                    for c in 0..context_total {
                        if let (Some(a), Some(b)) = (&rows[pidx][c], &rows[oidx][c]) {
                            if rows_differ(a, b) {
                                needed.insert(hv.id().clone());
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }

        // Final parent list: context plus needed hypothesis vars, ascending id.
        let mut parents: Vec<VarId> = context_vars.clone();
        parents.extend(needed.iter().cloned());
        parents.sort();
        let parent_cards: Vec<usize> = parents
            .iter()
            .map(|v| {
                if let Some(k) = hyp_ids.iter().position(|h| h == v) {
                    hyp_cards[k]
                } else {
                    template.variable(v.as_str()).unwrap().cardinality()
                }
            })
            .collect();

        let mut out_rows = Vec::with_capacity(shape::size(&parent_cards));
        for cfg in shape::configurations(&parent_cards) {
            // Split the parent config into hypothesis coordinates and context.
            let mut partial_hyp: BTreeMap<usize, usize> = BTreeMap::new();
            let mut context_idx = vec![0usize; context_vars.len()];
            for (v, &idx) in parents.iter().zip(&cfg) {
                if let Some(k) = hyp_ids.iter().position(|h| h == v) {
                    partial_hyp.insert(k, idx);
                } else {
                    let k = context_vars.iter().position(|c| c == v).unwrap();
                    context_idx[k] = idx;
                }
            }
            let cflat = shape::ravel(&context_idx, &context_cards);
            // First consistent point (ascending) with a defined row wins; the
            // non-parent test above guarantees consistency among them.
            let mut row = None;
            for pidx in 0..domain {
                let mut pcfg = vec![0usize; hyp_cards.len()];
                shape::unravel(pidx, &hyp_cards, &mut pcfg);
                if partial_hyp.iter().any(|(&k, &v)| pcfg[k] != v) {
                    continue;
                }
                if let Some(r) = &rows[pidx][cflat] {
                    row = Some(r.clone());
                    break;
                }
            }
            match row {
                Some(r) => out_rows.push(r),
                None => {
                    warnings.push(Warning::new(format!(
                        "union network: no reachable context for {} given {:?}; row set uniform",
                        var.id(),
                        cfg
                    )));
                    out_rows.push(vec![1.0 / var.cardinality() as f64; var.cardinality()]);
                }
            }
        }
        Cpt::new(var.id().clone(), parents, out_rows)
    }

    /// Stored parameters: block priors (blocks − 1 free values) plus each
    /// local network's free parameters, with hypothesis variables counted at
    /// the cardinality their block actually uses.
    pub fn parameter_count(&self) -> u64 {
        let mut total = self.blocks.len() as u64 - 1;
        for (i, local) in self.locals.iter().enumerate() {
            let restricted = self.restricted_cards_for_block(i);
            for v in local.variables() {
                let card = restricted
                    .get(v.id().as_str())
                    .copied()
                    .unwrap_or_else(|| v.cardinality());
                let rows: u64 = local
                    .parents(v.id().as_str())
                    .iter()
                    .map(|p| {
                        restricted
                            .get(p.as_str())
                            .copied()
                            .unwrap_or_else(|| local.variable(p.as_str()).unwrap().cardinality())
                            as u64
                    })
                    .product();
                total += (card as u64 - 1) * rows;
            }
        }
        total
    }

    fn restricted_cards_for_block(&self, i: usize) -> BTreeMap<VarId, usize> {
        let mut out = BTreeMap::new();
        for (k, v) in self.hypothesis.vars().iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &pidx in &self.blocks[i] {
                let p = self.hypothesis.point_at(pidx).unwrap();
                seen.insert(p.indices()[k]);
            }
            out.insert(v.id().clone(), seen.len());
        }
        out
    }

    fn point_assignment(&self, p: &HypothesisPoint) -> Assignment {
        let mut a = Assignment::new();
        for (v, &idx) in self.hypothesis.vars().iter().zip(p.indices()) {
            a.bind(v.id().clone(), idx);
        }
        a
    }

    fn non_hypothesis_factors(&self, net: &DiscreteNetwork) -> Vec<Factor> {
        (0..net.variables().len())
            .filter(|&i| !self.hypothesis.contains_var(net.variable_at(i).id().as_str()))
            .map(|i| cpt_factor(net, i))
            .collect()
    }

    fn check_clue_evidence(&self, evidence: &Assignment) -> Result<()> {
        for (var, value) in evidence.iter() {
            if self.hypothesis.contains_var(var.as_str()) {
                return Err(Error::contract(format!(
                    "evidence must not bind hypothesis variable {var}"
                )));
            }
            let Some(v) = self.locals[0].variable(var.as_str()) else {
                return Err(Error::contract(format!("unknown evidence variable {var}")));
            };
            if value >= v.cardinality() {
                return Err(Error::contract(format!("evidence binds {var} out of range")));
            }
        }
        Ok(())
    }
}

/// All locals must share one variable universe and define the hypothesis
/// variables exactly as the space does.
fn check_shared_universe(locals: &[DiscreteNetwork], space: &HypothesisSpace) -> Result<()> {
    if locals.is_empty() {
        return Err(Error::contract("a multinet needs at least one local network"));
    }
    let reference: BTreeMap<&VarId, &Variable> = locals[0]
        .variables()
        .iter()
        .map(|v| (v.id(), v))
        .collect();
    for (i, local) in locals.iter().enumerate() {
        if local.variables().len() != reference.len() {
            return Err(Error::contract(format!(
                "local network {i} has a different variable set"
            )));
        }
        for v in local.variables() {
            match reference.get(v.id()) {
                Some(r) if r.values() == v.values() => {}
                Some(_) => {
                    return Err(Error::contract(format!(
                        "variable {} is defined differently across local networks",
                        v.id()
                    )))
                }
                None => {
                    return Err(Error::contract(format!(
                        "local network {i} has a different variable set ({} is extra)",
                        v.id()
                    )))
                }
            }
        }
    }
    for hv in space.vars() {
        match reference.get(hv.id()) {
            Some(r) if r.values() == hv.values() => {}
            Some(_) => {
                return Err(Error::contract(format!(
                    "hypothesis variable {} is defined differently in the local networks",
                    hv.id()
                )))
            }
            None => {
                return Err(Error::contract(format!(
                    "hypothesis variable {} is missing from the local networks",
                    hv.id()
                )))
            }
        }
    }
    Ok(())
}

fn compute_owner(domain: usize, blocks: &[BTreeSet<usize>]) -> Vec<Option<usize>> {
    (0..domain)
        .map(|p| blocks.iter().position(|b| b.contains(&p)))
        .collect()
}

fn hypothesis_closed(net: &DiscreteNetwork, space: &HypothesisSpace) -> bool {
    space.vars().iter().all(|hv| {
        net.parents(hv.id().as_str())
            .iter()
            .all(|p| space.contains_var(p.as_str()))
    })
}

/// The hypothesis marginal of a local network over the full domain, in
/// canonical point order. This is the within-block conditional P(H | A_i).
pub(crate) fn in_block_conditional(
    net: &DiscreteNetwork,
    space: &HypothesisSpace,
) -> Result<Vec<f64>> {
    let hyp_ids = space.var_ids();
    let factors: Vec<Factor> = (0..net.variables().len())
        .map(|i| cpt_factor(net, i))
        .collect();
    let keep: BTreeSet<VarId> = hyp_ids.iter().cloned().collect();
    let mut mults = 0;
    let raw = eliminate(factors, &Assignment::new(), &keep, &mut mults)?;
    let raw = raw.reordered(&hyp_ids)?;
    let total = raw.total();
    if total == 0.0 {
        return Ok(vec![0.0; space.domain_size()]);
    }
    Ok(raw.values().iter().map(|v| v / total).collect())
}

fn compute_point_priors(
    space: &HypothesisSpace,
    locals: &[DiscreteNetwork],
    block_priors: &[f64],
    owner: &[Option<usize>],
) -> Result<Vec<f64>> {
    let conditionals: Vec<Vec<f64>> = locals
        .iter()
        .map(|l| in_block_conditional(l, space))
        .collect::<Result<_>>()?;
    Ok((0..space.domain_size())
        .map(|p| match owner[p] {
            Some(i) => block_priors[i] * conditionals[i][p],
            None => 0.0,
        })
        .collect())
}

/// Restrict the hypothesis variables of a local network to the values its
/// block actually uses. Returns the restricted network and, per hypothesis
/// variable, the kept full-domain value indices in order.
pub(crate) fn restrict_to_block(
    net: &DiscreteNetwork,
    space: &HypothesisSpace,
    block: &BTreeSet<usize>,
) -> (DiscreteNetwork, Vec<Vec<usize>>) {
    let cards = space.cards();
    let mut kept: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cards.len()];
    for &pidx in block {
        let mut cfg = vec![0usize; cards.len()];
        shape::unravel(pidx, &cards, &mut cfg);
        for (k, &v) in cfg.iter().enumerate() {
            kept[k].insert(v);
        }
    }
    let kept: Vec<Vec<usize>> = kept.into_iter().map(|s| s.into_iter().collect()).collect();
    let keep_map: BTreeMap<&str, &Vec<usize>> = space
        .vars()
        .iter()
        .zip(&kept)
        .map(|(v, k)| (v.id().as_str(), k))
        .collect();

    let variables: Vec<Variable> = net
        .variables()
        .iter()
        .map(|v| match keep_map.get(v.id().as_str()) {
            Some(k) => v.restricted(k),
            None => v.clone(),
        })
        .collect();
    let cpts: Vec<Cpt> = net
        .variables()
        .iter()
        .map(|v| {
            let cpt = net.cpt(v.id().as_str()).unwrap();
            let parent_cards: Vec<usize> = cpt
                .parents()
                .iter()
                .map(|p| net.variable(p.as_str()).unwrap().cardinality())
                .collect();
            let mut rows = Vec::new();
            for cfg in shape::configurations(&parent_cards) {
                let keep_row = cpt.parents().iter().zip(&cfg).all(|(p, &idx)| {
                    keep_map
                        .get(p.as_str())
                        .map_or(true, |k| k.contains(&idx))
                });
                if !keep_row {
                    continue;
                }
                let row = cpt.entry_row(&cfg, &parent_cards);
                let row: Vec<f64> = match keep_map.get(v.id().as_str()) {
                    Some(k) => k.iter().map(|&i| row[i]).collect(),
                    None => row.to_vec(),
                };
                rows.push(row);
            }
            Cpt::new(v.id().clone(), cpt.parents().to_vec(), rows)
                .expect("restriction preserves shape")
        })
        .collect();
    let restricted = DiscreteNetwork::new(variables, cpts).expect("restriction preserves shape");
    (restricted, kept)
}

/// Chain-factorize a prior over the hypothesis domain into CPTs, adding
/// arcs between hypothesis variables only where the conditional actually
/// depends on the earlier variable.
pub(crate) fn chain_cpts_from_prior(
    space: &HypothesisSpace,
    priors: &[f64],
    warnings: &mut Vec<Warning>,
) -> Result<Vec<Cpt>> {
    let cards = space.cards();
    let mut cpts = Vec::with_capacity(cards.len());
    for j in 0..cards.len() {
        let preceding_cards = &cards[..j];
        let var = &space.vars()[j];
        // Full conditional rows over every preceding configuration.
        let mut full_rows: Vec<Option<Vec<f64>>> = Vec::new();
        for cfg in shape::configurations(preceding_cards) {
            let mut row = vec![0.0; cards[j]];
            let mut mass = 0.0;
            for (pidx, &prior) in priors.iter().enumerate() {
                let mut pcfg = vec![0usize; cards.len()];
                shape::unravel(pidx, &cards, &mut pcfg);
                if pcfg[..j] == cfg[..] {
                    row[pcfg[j]] += prior;
                    mass += prior;
                }
            }
            if mass == 0.0 {
                full_rows.push(None);
            } else {
                full_rows.push(Some(row.iter().map(|v| v / mass).collect()));
            }
        }
        // Which preceding variables does the conditional actually depend on?
        let mut needed = Vec::new();
        for k in 0..j {
            let mut depends = false;
            'cfgs: for (flat, cfg) in shape::configurations(preceding_cards).enumerate() {
                for alt in cfg[k] + 1..preceding_cards[k] {
                    let mut other = cfg.clone();
                    other[k] = alt;
                    let oflat = shape::ravel(&other, preceding_cards);
                    if let (Some(a), Some(b)) = (&full_rows[flat], &full_rows[oflat]) {
                        if rows_differ(a, b) {
                            depends = true;
                            break 'cfgs;
                        }
                    }
                }
            }
            if depends {
                needed.push(k);
            }
        }
        let parents: Vec<VarId> = needed
            .iter()
            .map(|&k| space.vars()[k].id().clone())
            .collect();
        let needed_cards: Vec<usize> = needed.iter().map(|&k| cards[k]).collect();
        let mut rows = Vec::new();
        for cfg in shape::configurations(&needed_cards) {
            let mut row = None;
            for (flat, full_cfg) in shape::configurations(preceding_cards).enumerate() {
                if needed.iter().zip(&cfg).any(|(&k, &v)| full_cfg[k] != v) {
                    continue;
                }
                if let Some(r) = &full_rows[flat] {
                    row = Some(r.clone());
                    break;
                }
            }
            match row {
                Some(r) => rows.push(r),
                None => {
                    warnings.push(Warning::new(format!(
                        "prior chain: variable {} has no reachable context for {:?}; \
                         row set uniform",
                        var.id(),
                        cfg
                    )));
                    rows.push(vec![1.0 / cards[j] as f64; cards[j]]);
                }
            }
        }
        cpts.push(Cpt::new(var.id().clone(), parents, rows)?);
    }
    Ok(cpts)
}

fn rows_differ(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .any(|(x, y)| (x - y).abs() > NORMALIZATION_TOLERANCE)
}

/// Normalized conditional row P(x | context) from a joint table; None when
/// the context has probability zero.
pub(crate) fn conditional_row(
    joint: &JointTable,
    x: &VarId,
    context: &Assignment,
) -> Result<Option<Vec<f64>>> {
    let scope = joint.scope();
    let Some(axis) = scope.iter().position(|v| v.id() == x) else {
        return Err(Error::contract(format!("variable {x} not in joint scope")));
    };
    let cards: Vec<usize> = scope.iter().map(|v| v.cardinality()).collect();
    let mut fixed: Vec<Option<usize>> = vec![None; scope.len()];
    for (var, value) in context.iter() {
        if let Some(pos) = scope.iter().position(|v| v.id() == var) {
            fixed[pos] = Some(value);
        }
    }
    let mut row = vec![0.0; cards[axis]];
    let mut total = 0.0;
    let mut idx = vec![0usize; cards.len()];
    for (flat, &v) in joint.values().iter().enumerate() {
        shape::unravel(flat, &cards, &mut idx);
        let consistent = fixed
            .iter()
            .enumerate()
            .all(|(p, f)| p == axis || f.map_or(true, |fv| idx[p] == fv));
        if consistent {
            row[idx[axis]] += v;
            total += v;
        }
    }
    if total == 0.0 {
        return Ok(None);
    }
    Ok(Some(row.iter().map(|v| v / total).collect()))
}

fn check_acyclic(arcs: &BTreeSet<(VarId, VarId)>) -> Result<()> {
    let mut nodes: BTreeSet<&VarId> = BTreeSet::new();
    for (a, b) in arcs {
        nodes.insert(a);
        nodes.insert(b);
    }
    let mut indegree: BTreeMap<&VarId, usize> = nodes.iter().map(|&n| (n, 0)).collect();
    for (_, b) in arcs {
        *indegree.get_mut(b).unwrap() += 1;
    }
    let mut ready: Vec<&VarId> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| n)
        .collect();
    let mut seen = 0;
    while let Some(n) = ready.pop() {
        seen += 1;
        for (a, b) in arcs {
            if a == n {
                let d = indegree.get_mut(b).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(b);
                }
            }
        }
    }
    if seen != nodes.len() {
        return Err(Error::CyclicNetwork(
            "union of local arc sets contains a directed cycle".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::elimination::posterior_chain;

    #[test]
    fn validate_flags_overlapping_blocks() {
        let m = fixtures::split_multinet();
        let space = m.hypothesis().clone();
        let blocks = vec![
            vec![space.point(&["visitor"]).unwrap(), space.point(&["spy"]).unwrap()],
            vec![space.point(&["spy"]).unwrap(), space.point(&["worker"]).unwrap()],
        ];
        let overlapping = Multinet::new(
            space,
            blocks,
            m.locals().to_vec(),
            m.block_priors().to_vec(),
        )
        .unwrap();
        assert!(overlapping.validate().has(ViolationKind::NonPartition));
    }

    #[test]
    fn validate_flags_unnormalized_priors() {
        let m = fixtures::split_multinet();
        let space = m.hypothesis().clone();
        let blocks = vec![
            vec![space.point(&["visitor"]).unwrap(), space.point(&["spy"]).unwrap()],
            vec![space.point(&["worker"]).unwrap()],
        ];
        let bad = Multinet::new(space, blocks, m.locals().to_vec(), vec![0.6, 0.6]).unwrap();
        assert!(bad.validate().has(ViolationKind::PriorNotNormalized));
    }

    #[test]
    fn validate_flags_support_leak() {
        let m = fixtures::split_multinet();
        let space = m.hypothesis().clone();
        // Worker block paired with the spy/visitor network: mass leaks out.
        let blocks = vec![
            vec![space.point(&["visitor"]).unwrap(), space.point(&["spy"]).unwrap()],
            vec![space.point(&["worker"]).unwrap()],
        ];
        let swapped = Multinet::new(
            space,
            blocks,
            vec![m.locals()[0].clone(), m.locals()[0].clone()],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(swapped.validate().has(ViolationKind::SupportLeak));
    }

    #[test]
    fn hypothesis_priors_match_the_story() {
        let m = fixtures::split_multinet();
        let space = m.hypothesis();
        let spy = space.point(&["spy"]).unwrap();
        let worker = space.point(&["worker"]).unwrap();
        assert_eq!(m.hypothesis_prior(&spy).unwrap(), 0.25);
        assert_eq!(m.hypothesis_prior(&worker).unwrap(), 0.5);
        let total: f64 = space
            .points()
            .iter()
            .map(|p| m.hypothesis_prior(p).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn executive_and_worker_likelihoods_are_bit_identical() {
        let m = fixtures::four_way_multinet();
        let space = m.hypothesis();
        let executive = space.point(&["executive"]).unwrap();
        let worker = space.point(&["worker"]).unwrap();
        let net = &m.locals()[1];
        for g in ["male", "female"] {
            for b in ["yes", "no"] {
                let e = net.assignment(&[("g", g), ("b", b)]).unwrap();
                let le = m.likelihood(&executive, &e).unwrap();
                let lw = m.likelihood(&worker, &e).unwrap();
                assert_eq!(le.to_bits(), lw.to_bits(), "same arithmetic path expected");
            }
        }
    }

    #[test]
    fn zero_badge_likelihood_eliminates_visitor() {
        let m = fixtures::four_way_multinet();
        let space = m.hypothesis();
        let net = &m.locals()[0];
        let e = net.assignment(&[("b", "yes")]).unwrap();
        let posterior = m.posterior(&e).unwrap();
        let visitor_idx = space
            .point_index(&space.point(&["visitor"]).unwrap())
            .unwrap();
        assert_eq!(posterior.factor.values()[visitor_idx], 0.0);
    }

    #[test]
    fn impossible_evidence_everywhere_is_an_error() {
        let m = fixtures::split_multinet();
        // Visitors never wear badges, spies always do; make both impossible.
        let space = m.hypothesis().clone();
        let sv = DiscreteNetwork::builder()
            .variable("h", ["worker", "visitor", "spy"])
            .variable("g", ["male", "female"])
            .variable("b", ["yes", "no"])
            .cpt("h", [] as [&str; 0], [[0.0, 0.5, 0.5]])
            .cpt("g", ["h"], [[0.5, 0.5], [0.5, 0.5], [0.875, 0.125]])
            .cpt("b", [] as [&str; 0], [[1.0, 0.0]])
            .build()
            .unwrap();
        let w = DiscreteNetwork::builder()
            .variable("h", ["worker", "visitor", "spy"])
            .variable("g", ["male", "female"])
            .variable("b", ["yes", "no"])
            .cpt("h", [] as [&str; 0], [[1.0, 0.0, 0.0]])
            .cpt("g", [] as [&str; 0], [[0.75, 0.25]])
            .cpt("b", [] as [&str; 0], [[1.0, 0.0]])
            .build()
            .unwrap();
        let blocks = vec![
            vec![space.point(&["visitor"]).unwrap(), space.point(&["spy"]).unwrap()],
            vec![space.point(&["worker"]).unwrap()],
        ];
        let m2 = Multinet::new(space, blocks, vec![sv, w], vec![0.5, 0.5]).unwrap();
        let e = m.locals()[0].assignment(&[("b", "no")]).unwrap();
        assert!(matches!(
            m2.posterior(&e),
            Err(Error::InconsistentEvidence(_))
        ));
    }

    #[test]
    fn union_of_split_multinet_reproduces_single_network() {
        let m = fixtures::split_multinet();
        let union = m.union_network().unwrap();
        let single = fixtures::single_network();
        assert_eq!(union.network.arcs(), single.arcs());
        let a = union.network.enumerate_joint().unwrap();
        let b = single.enumerate_joint().unwrap();
        assert!(a.max_abs_difference(&b).unwrap() < 1e-12);
    }

    #[test]
    fn union_of_single_block_multinet_is_the_local_with_priors_folded() {
        let space = HypothesisSpace::new(vec![
            Variable::new("h", ["worker", "visitor", "spy"]).unwrap()
        ])
        .unwrap();
        let local = fixtures::split_multinet().locals()[0].clone();
        // Rescale the block so it covers everything: use the single network's
        // own conditional as one comprehensive block.
        let local = DiscreteNetwork::builder()
            .variable("h", ["worker", "visitor", "spy"])
            .variable("g", ["male", "female"])
            .variable("b", ["yes", "no"])
            .cpt("h", [] as [&str; 0], [[0.5, 0.25, 0.25]])
            .cpt("g", ["h"], local.cpt("g").unwrap().rows().to_vec())
            .cpt("b", ["h"], local.cpt("b").unwrap().rows().to_vec())
            .build()
            .unwrap();
        let blocks = vec![space.points()];
        let m = Multinet::new(space, blocks, vec![local.clone()], vec![1.0]).unwrap();
        let union = m.union_network().unwrap();
        let a = union.network.enumerate_joint().unwrap();
        let b = local.enumerate_joint().unwrap();
        assert!(a.max_abs_difference(&b).unwrap() < 1e-12);
    }

    #[test]
    fn posterior_matches_union_network_posterior() {
        let m = fixtures::four_way_multinet();
        let union = m.union_network().unwrap().network;
        let net = &m.locals()[0];
        for (g, b) in [("male", "yes"), ("female", "no"), ("male", "no")] {
            let e = net.assignment(&[("g", g), ("b", b)]).unwrap();
            let via_multinet = m.posterior(&e).unwrap();
            let via_union = posterior_chain(&union, &"h".into(), &e).unwrap();
            for (x, y) in via_multinet
                .factor
                .values()
                .iter()
                .zip(via_union.factor.values())
            {
                assert!((x - y).abs() < 1e-9, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn multinet_route_is_cheaper_than_union_route() {
        let m = fixtures::four_way_multinet();
        let union = m.union_network().unwrap().network;
        let e = m.locals()[0].assignment(&[("g", "male"), ("b", "yes")]).unwrap();
        let multinet_cost = m.posterior(&e).unwrap().multiplications;
        let union_cost = posterior_chain(&union, &"h".into(), &e)
            .unwrap()
            .multiplications;
        assert!(
            multinet_cost < union_cost,
            "multinet {multinet_cost} must beat union {union_cost}"
        );
    }

    #[test]
    fn multinet_parameters_beat_union_parameters() {
        let m = fixtures::four_way_multinet();
        let union = m.union_network().unwrap().network;
        assert!(m.parameter_count() < union.free_parameter_count());
    }

    #[test]
    fn hypothesis_specific_independence_shows_in_topology() {
        use crate::variable::ids;
        let m = fixtures::split_multinet();
        let sv = &m.locals()[0];
        let union = m.union_network().unwrap().network;
        assert!(sv
            .d_separated(&ids(["g"]), &ids(["b"]), &ids(["h"]))
            .unwrap());
        assert!(!union
            .d_separated(&ids(["g"]), &ids(["b"]), &ids(["h"]))
            .unwrap());
    }

    #[test]
    fn staged_posterior_with_empty_evidence_matches_plain_posterior() {
        // A prior network whose hypothesis marginal equals the stored priors.
        let m = fixtures::split_multinet();
        let prior_net = DiscreteNetwork::builder()
            .variable("h", ["worker", "visitor", "spy"])
            .cpt("h", [] as [&str; 0], [[0.5, 0.25, 0.25]])
            .build()
            .unwrap();
        let e = m.locals()[0].assignment(&[("g", "male")]).unwrap();
        let staged = m
            .staged_posterior(&prior_net, &Assignment::new(), &e)
            .unwrap();
        let plain = m.posterior(&e).unwrap();
        for (x, y) in staged.factor.values().iter().zip(plain.factor.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn alarming_reports_raise_the_spy_posterior() {
        let m = fixtures::split_multinet();
        let prior_net = fixtures::report_prior_network();
        let clue = m.locals()[0].assignment(&[("g", "male")]).unwrap();
        let apriori = prior_net
            .assignment(&[("r1", "alarming"), ("r2", "alarming")])
            .unwrap();
        let revised = m.staged_posterior(&prior_net, &apriori, &clue).unwrap();
        let baseline = m.posterior(&clue).unwrap();
        let spy_idx = m
            .hypothesis()
            .point_index(&m.hypothesis().point(&["spy"]).unwrap())
            .unwrap();
        assert!(revised.factor.values()[spy_idx] > baseline.factor.values()[spy_idx]);
    }
}
