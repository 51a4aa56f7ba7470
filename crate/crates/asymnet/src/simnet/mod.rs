//! Similarity networks: a connected cover of the hypothesis domain with one
//! ordinary (variable-pruned) local network per cover edge.
//!
//! Where a multinet partitions the hypothesis domain and keeps every variable
//! in every block, a similarity network lets cover edges overlap and lets
//! each local network drop the variables that do not help distinguish the
//! hypotheses it covers. Connectivity of the cover is what makes the full
//! joint distribution recoverable from the pruned parts.

mod convert;
mod priors;
mod reconstruct;

pub use convert::{redundancy_report, RedundancyReport, SharedParameter};
pub use priors::recover_priors;
pub use reconstruct::{
    conditional_factor, conditional_factor_via, reconstruct_joint, reconstruct_joint_counted,
};
pub use convert::convert_to_multinet;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hypothesis::{HypothesisPoint, HypothesisSpace};
use crate::joint::JointTable;
use crate::multinet::{conditional_row, in_block_conditional};
use crate::network::DiscreteNetwork;
use crate::report::{ValidationReport, ViolationKind};
use crate::shape;
use crate::table::{Cpt, NORMALIZATION_TOLERANCE};
use crate::variable::{VarId, Variable};

/// Duplicated parameters elicited independently may disagree by rounding;
/// beyond this tolerance the disagreement counts as a contradiction.
pub const COHERENCE_TOLERANCE: f64 = 1e-6;

/// Disjoint-set union over hypothesis points, used for cover connectivity.
struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != node {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
    }
}

/// A collection of hypothesis subsets (hyperedges) over `domain(H)`.
#[derive(Debug, Clone)]
pub struct Cover {
    space: HypothesisSpace,
    edges: Vec<BTreeSet<usize>>,
}

impl Cover {
    pub fn new(space: HypothesisSpace, edges: Vec<Vec<HypothesisPoint>>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::contract("a cover needs at least one edge"));
        }
        let mut index_edges = Vec::with_capacity(edges.len());
        for (i, edge) in edges.iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::contract(format!("cover edge {i} is empty")));
            }
            let mut set = BTreeSet::new();
            for p in edge {
                set.insert(space.point_index(p)?);
            }
            index_edges.push(set);
        }
        Ok(Cover {
            space,
            edges: index_edges,
        })
    }

    pub fn space(&self) -> &HypothesisSpace {
        &self.space
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn edge(&self, i: usize) -> &BTreeSet<usize> {
        &self.edges[i]
    }

    pub fn edge_points(&self, i: usize) -> Vec<HypothesisPoint> {
        self.edges[i]
            .iter()
            .map(|&idx| self.space.point_at(idx).expect("validated"))
            .collect()
    }

    pub fn covers_domain(&self) -> bool {
        let mut covered = vec![false; self.space.domain_size()];
        for edge in &self.edges {
            for &p in edge {
                covered[p] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }

    /// True iff the similarity hypergraph — hypothesis points as nodes, the
    /// cover's subsets as hyperedges — is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.space.domain_size();
        let mut dsu = DisjointSet::new(n);
        for edge in &self.edges {
            let mut iter = edge.iter();
            if let Some(&first) = iter.next() {
                for &p in iter {
                    dsu.union(first, p);
                }
            }
        }
        let root = dsu.find(0);
        (1..n).all(|p| dsu.find(p) == root)
    }

    /// Edges sharing at least one point with edge `i`, ascending.
    pub(crate) fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&j| j != i && !self.edges[i].is_disjoint(&self.edges[j]))
            .collect()
    }
}

/// True iff the cover's similarity hypergraph is connected.
pub fn is_connected_cover(cover: &Cover) -> bool {
    cover.is_connected()
}

/// A local network over a subset of the variables, covering one cover edge.
#[derive(Debug, Clone)]
pub struct OrdinaryLocalNetwork {
    network: DiscreteNetwork,
    /// Non-hypothesis variables kept on purpose despite being graphically
    /// disconnected from every hypothesis variable.
    deliberately_retained: BTreeSet<VarId>,
}

impl OrdinaryLocalNetwork {
    pub fn new(network: DiscreteNetwork) -> Self {
        OrdinaryLocalNetwork {
            network,
            deliberately_retained: BTreeSet::new(),
        }
    }

    pub fn with_retained(network: DiscreteNetwork, retained: BTreeSet<VarId>) -> Self {
        OrdinaryLocalNetwork {
            network,
            deliberately_retained: retained,
        }
    }

    pub fn network(&self) -> &DiscreteNetwork {
        &self.network
    }

    /// The variables this local network depicts.
    pub fn depicted(&self) -> Vec<VarId> {
        self.network
            .variables()
            .iter()
            .map(|v| v.id().clone())
            .collect()
    }

    pub fn depicts(&self, id: &str) -> bool {
        self.network.contains(id)
    }

    pub fn retained(&self) -> &BTreeSet<VarId> {
        &self.deliberately_retained
    }
}

/// A connected cover with one ordinary local network per edge.
#[derive(Debug, Clone)]
pub struct SimilarityNetwork {
    cover: Cover,
    locals: Vec<OrdinaryLocalNetwork>,
    universe: Vec<Variable>,
}

impl SimilarityNetwork {
    /// Build a similarity network; the variable universe is the union of the
    /// locals' depicted sets. Structural requirements (one local per edge,
    /// hypothesis variables depicted everywhere with matching definitions,
    /// consistent variable definitions across locals) are enforced here;
    /// everything else is reported by [`SimilarityNetwork::validate`].
    pub fn new(cover: Cover, locals: Vec<OrdinaryLocalNetwork>) -> Result<Self> {
        Self::with_universe(cover, locals, Vec::new())
    }

    /// Like [`SimilarityNetwork::new`], declaring extra universe variables
    /// that may not be depicted anywhere (validation will flag them).
    pub fn with_universe(
        cover: Cover,
        locals: Vec<OrdinaryLocalNetwork>,
        declared: Vec<Variable>,
    ) -> Result<Self> {
        if locals.len() != cover.edge_count() {
            return Err(Error::contract(format!(
                "{} local networks for {} cover edges",
                locals.len(),
                cover.edge_count()
            )));
        }
        let space = cover.space();
        for (i, local) in locals.iter().enumerate() {
            for hv in space.vars() {
                match local.network.variable(hv.id().as_str()) {
                    Some(v) if v.values() == hv.values() => {}
                    Some(_) => {
                        return Err(Error::contract(format!(
                            "local network {i} defines hypothesis variable {} differently",
                            hv.id()
                        )))
                    }
                    None => {
                        return Err(Error::contract(format!(
                            "local network {i} does not depict hypothesis variable {}",
                            hv.id()
                        )))
                    }
                }
            }
        }
        let mut universe: BTreeMap<VarId, Variable> = BTreeMap::new();
        for v in declared {
            universe.insert(v.id().clone(), v);
        }
        for (i, local) in locals.iter().enumerate() {
            for v in local.network.variables() {
                match universe.get(v.id()) {
                    Some(seen) if seen.values() == v.values() => {}
                    Some(_) => {
                        return Err(Error::contract(format!(
                            "variable {} is defined differently in local network {i}",
                            v.id()
                        )))
                    }
                    None => {
                        universe.insert(v.id().clone(), v.clone());
                    }
                }
            }
        }
        // Canonical universe order: hypothesis variables first, the rest by id.
        let mut ordered: Vec<Variable> = space.vars().to_vec();
        for (_, v) in universe {
            if !space.contains_var(v.id().as_str()) {
                ordered.push(v);
            }
        }
        Ok(SimilarityNetwork {
            cover,
            locals,
            universe: ordered,
        })
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn space(&self) -> &HypothesisSpace {
        self.cover.space()
    }

    pub fn locals(&self) -> &[OrdinaryLocalNetwork] {
        &self.locals
    }

    /// Hypothesis variables first, then the clue variables ascending by id.
    pub fn universe(&self) -> &[Variable] {
        &self.universe
    }

    pub fn universe_var(&self, id: &str) -> Option<&Variable> {
        self.universe.iter().find(|v| v.id().as_str() == id)
    }

    /// Check every semantic invariant of the similarity-network definition.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        if !self.cover.covers_domain() {
            report.push(
                ViolationKind::IncompleteCover,
                "the cover does not reach every hypothesis point".to_string(),
            );
        }
        if !self.cover.is_connected() {
            report.push(
                ViolationKind::DisconnectedCover,
                "the similarity hypergraph is not connected".to_string(),
            );
        }
        let space = self.space();
        for (i, local) in self.locals.iter().enumerate() {
            report.absorb(&format!("local network {i}"), local.network.validate());
            match in_block_conditional(&local.network, space) {
                Ok(q) => {
                    for (idx, &mass) in q.iter().enumerate() {
                        if !self.cover.edge(i).contains(&idx)
                            && mass.abs() > NORMALIZATION_TOLERANCE
                        {
                            let label = space.label(&space.point_at(idx).unwrap());
                            report.push(
                                ViolationKind::SupportLeak,
                                format!(
                                    "local network {i} puts mass {mass} on {label}, \
                                     outside its cover edge"
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
            // Depicted non-hypothesis variables should be graphically tied to
            // the hypotheses unless deliberately retained.
            let hyp_positions: BTreeSet<usize> = space
                .vars()
                .iter()
                .filter_map(|hv| local.network.position(hv.id().as_str()))
                .collect();
            for v in local.network.variables() {
                if space.contains_var(v.id().as_str())
                    || local.deliberately_retained.contains(v.id())
                {
                    continue;
                }
                let pos = local.network.position(v.id().as_str()).unwrap();
                if !local.network.undirected_reachable(pos, &hyp_positions) {
                    report.push(
                        ViolationKind::DisconnectedVariable,
                        format!(
                            "local network {i} depicts {}, which is disconnected from \
                             every hypothesis variable and not flagged as retained",
                            v.id()
                        ),
                    );
                }
            }
        }
        for v in &self.universe {
            if space.contains_var(v.id().as_str()) {
                continue;
            }
            if !self.locals.iter().any(|l| l.depicts(v.id().as_str())) {
                report.push(
                    ViolationKind::UndepictedVariable,
                    format!("universe variable {} is depicted in no local network", v.id()),
                );
            }
        }
        report
    }

    /// Locals depicting `var`, ascending edge index.
    pub(crate) fn depicting_edges(&self, var: &str) -> Vec<usize> {
        (0..self.locals.len())
            .filter(|&i| self.locals[i].depicts(var))
            .collect()
    }
}

/// Remove from a comprehensive local network the variables that cannot help
/// distinguish the hypotheses of `edge`.
///
/// Two removal rules, both conservative: a non-hypothesis variable goes when
/// it is graphically disconnected from every hypothesis variable, or when its
/// CPT and all of its descendants' CPTs are identical across the edge's
/// hypothesis points (tolerance 1e-9). The removed set is closed under
/// descendants, so no kept variable loses a parent.
pub fn relevance_prune(
    comprehensive: &DiscreteNetwork,
    space: &HypothesisSpace,
    edge: &[HypothesisPoint],
) -> Result<DiscreteNetwork> {
    for hv in space.vars() {
        if !comprehensive.contains(hv.id().as_str()) {
            return Err(Error::contract(format!(
                "comprehensive network does not depict hypothesis variable {}",
                hv.id()
            )));
        }
    }
    for p in edge {
        space.check_point(p)?;
    }
    let n = comprehensive.variables().len();
    let hyp_positions: BTreeSet<usize> = space
        .vars()
        .iter()
        .map(|hv| comprehensive.position(hv.id().as_str()).unwrap())
        .collect();

    // Rule 1: graphical disconnection from all hypothesis variables.
    let mut removable = vec![false; n];
    for pos in 0..n {
        if hyp_positions.contains(&pos) {
            continue;
        }
        if !comprehensive.undirected_reachable(pos, &hyp_positions) {
            removable[pos] = true;
        }
    }

    // Rule 2: the variable and all of its descendants have CPTs that do not
    // distinguish the edge's hypothesis points.
    let insensitive: Vec<bool> = (0..n)
        .map(|pos| {
            !hyp_positions.contains(&pos)
                && cpt_insensitive_to(comprehensive, pos, space, edge)
        })
        .collect();
    for pos in 0..n {
        if hyp_positions.contains(&pos) || removable[pos] {
            continue;
        }
        if insensitive[pos]
            && descendants(comprehensive, pos)
                .into_iter()
                .all(|d| insensitive[d])
        {
            removable[pos] = true;
        }
    }

    let keep: Vec<&Variable> = comprehensive
        .variables()
        .iter()
        .enumerate()
        .filter(|(pos, _)| !removable[*pos])
        .map(|(_, v)| v)
        .collect();
    let mut cpts = Vec::with_capacity(keep.len());
    for v in &keep {
        let cpt = comprehensive.cpt(v.id().as_str()).unwrap();
        for p in cpt.parents() {
            let ppos = comprehensive.position(p.as_str()).unwrap();
            if removable[ppos] {
                return Err(Error::contract(format!(
                    "pruning would orphan {} (parent {} removed)",
                    v.id(),
                    p
                )));
            }
        }
        cpts.push(cpt.clone());
    }
    DiscreteNetwork::new(keep.into_iter().cloned().collect(), cpts)
}

/// Does this variable's CPT treat every hypothesis point of the edge alike?
fn cpt_insensitive_to(
    net: &DiscreteNetwork,
    pos: usize,
    space: &HypothesisSpace,
    edge: &[HypothesisPoint],
) -> bool {
    let cpt = net.cpt_at(pos);
    let hyp_parent_slots: Vec<(usize, usize)> = cpt
        .parents()
        .iter()
        .enumerate()
        .filter_map(|(slot, p)| {
            space
                .vars()
                .iter()
                .position(|hv| hv.id() == p)
                .map(|k| (slot, k))
        })
        .collect();
    if hyp_parent_slots.is_empty() {
        return true;
    }
    let parent_cards: Vec<usize> = net
        .parent_positions(pos)
        .iter()
        .map(|&p| net.variable_at(p).cardinality())
        .collect();
    // For every configuration of the non-hypothesis parents, the rows under
    // any two edge points must agree.
    let reference = &edge[0];
    for cfg in shape::configurations(&parent_cards) {
        // Skip configurations whose hypothesis coordinates do not match the
        // reference point; we overwrite them below anyway.
        if hyp_parent_slots
            .iter()
            .any(|&(slot, k)| cfg[slot] != reference.indices()[k])
        {
            continue;
        }
        let base = cpt.entry_row(&cfg, &parent_cards);
        for point in &edge[1..] {
            let mut other = cfg.clone();
            for &(slot, k) in &hyp_parent_slots {
                other[slot] = point.indices()[k];
            }
            let row = cpt.entry_row(&other, &parent_cards);
            if base
                .iter()
                .zip(row)
                .any(|(a, b)| (a - b).abs() > NORMALIZATION_TOLERANCE)
            {
                return false;
            }
        }
    }
    true
}

fn descendants(net: &DiscreteNetwork, pos: usize) -> BTreeSet<usize> {
    let n = net.variables().len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (child, parents) in (0..n).map(|c| (c, net.parent_positions(c))) {
        for &p in parents {
            children[p].push(child);
        }
    }
    let mut out = BTreeSet::new();
    let mut stack = vec![pos];
    while let Some(u) = stack.pop() {
        for &c in &children[u] {
            if out.insert(c) {
                stack.push(c);
            }
        }
    }
    out
}

/// Build a comprehensive local network for one cover edge from a known joint
/// distribution: condition the joint on the edge, then read every CPT row off
/// the conditioned table. `structure` gives each variable's parent list (it
/// must be acyclic and cover the joint's whole scope). Rows for parent
/// configurations with probability zero under the conditioned joint are set
/// uniform.
pub fn comprehensive_from_joint(
    joint: &JointTable,
    space: &HypothesisSpace,
    edge: &[HypothesisPoint],
    structure: &[(VarId, Vec<VarId>)],
) -> Result<DiscreteNetwork> {
    let restricted = restrict_joint_to_points(joint, space, edge)?;
    let mut variables = Vec::with_capacity(structure.len());
    let mut cpts = Vec::with_capacity(structure.len());
    for (id, parents) in structure {
        let Some(var) = restricted.scope().iter().find(|v| v.id() == id) else {
            return Err(Error::contract(format!("{id} is not in the joint's scope")));
        };
        variables.push(var.clone());
        let parent_cards: Vec<usize> = parents
            .iter()
            .map(|p| {
                restricted
                    .scope()
                    .iter()
                    .find(|v| v.id() == p)
                    .map(|v| v.cardinality())
                    .ok_or_else(|| Error::contract(format!("{p} is not in the joint's scope")))
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::new();
        for cfg in shape::configurations(&parent_cards) {
            let mut context = crate::assignment::Assignment::new();
            for (p, &idx) in parents.iter().zip(&cfg) {
                context.bind(p.clone(), idx);
            }
            match conditional_row(&restricted, id, &context)? {
                Some(row) => rows.push(row),
                None => rows.push(vec![1.0 / var.cardinality() as f64; var.cardinality()]),
            }
        }
        cpts.push(Cpt::new(id.clone(), parents.clone(), rows)?);
    }
    DiscreteNetwork::new(variables, cpts)
}

/// Condition a joint on "the hypothesis configuration lies in this edge".
pub(crate) fn restrict_joint_to_points(
    joint: &JointTable,
    space: &HypothesisSpace,
    edge: &[HypothesisPoint],
) -> Result<JointTable> {
    let scope = joint.scope().to_vec();
    let cards: Vec<usize> = scope.iter().map(|v| v.cardinality()).collect();
    let hyp_slots: Vec<usize> = space
        .vars()
        .iter()
        .map(|hv| {
            scope
                .iter()
                .position(|v| v.id() == hv.id())
                .ok_or_else(|| {
                    Error::contract(format!("hypothesis variable {} not in joint", hv.id()))
                })
        })
        .collect::<Result<_>>()?;
    let allowed: BTreeSet<Vec<usize>> = edge.iter().map(|p| p.indices().to_vec()).collect();
    let mut values = vec![0.0; joint.values().len()];
    let mut idx = vec![0usize; cards.len()];
    let mut total = 0.0;
    for (flat, &v) in joint.values().iter().enumerate() {
        shape::unravel(flat, &cards, &mut idx);
        let coords: Vec<usize> = hyp_slots.iter().map(|&s| idx[s]).collect();
        if allowed.contains(&coords) {
            values[flat] = v;
            total += v;
        }
    }
    if total == 0.0 {
        return Err(Error::contract(
            "the edge has probability zero under the joint",
        ));
    }
    for v in &mut values {
        *v /= total;
    }
    JointTable::new(scope, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn four_space() -> HypothesisSpace {
        HypothesisSpace::new(vec![Variable::new(
            "h",
            ["worker", "executive", "visitor", "spy"],
        )
        .unwrap()])
        .unwrap()
    }

    fn edge(space: &HypothesisSpace, labels: &[&str]) -> Vec<HypothesisPoint> {
        labels.iter().map(|l| space.point(&[l]).unwrap()).collect()
    }

    #[test]
    fn chain_cover_is_connected() {
        let space = four_space();
        let cover = Cover::new(
            space.clone(),
            vec![
                edge(&space, &["spy", "visitor"]),
                edge(&space, &["visitor", "worker"]),
                edge(&space, &["worker", "executive"]),
            ],
        )
        .unwrap();
        assert!(is_connected_cover(&cover));
    }

    #[test]
    fn split_cover_is_not_connected() {
        let space = four_space();
        let cover = Cover::new(
            space.clone(),
            vec![
                edge(&space, &["spy", "visitor"]),
                edge(&space, &["worker", "executive"]),
            ],
        )
        .unwrap();
        assert!(!is_connected_cover(&cover));
    }

    #[test]
    fn hyperedge_cover_is_connected() {
        let space = four_space();
        let cover = Cover::new(
            space.clone(),
            vec![
                edge(&space, &["worker", "executive", "visitor"]),
                edge(&space, &["visitor", "spy"]),
            ],
        )
        .unwrap();
        assert!(is_connected_cover(&cover));
    }

    #[test]
    fn point_outside_domain_is_rejected() {
        let space = four_space();
        let bogus = HypothesisPoint(vec![9]);
        assert!(Cover::new(space, vec![vec![bogus]]).is_err());
    }

    #[test]
    fn chain_simnet_fixture_is_valid() {
        let report = fixtures::chain_simnet().validate();
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn deleting_the_bridge_disconnects_the_cover() {
        let s = fixtures::chain_simnet();
        let space = s.space().clone();
        let cover = Cover::new(
            space.clone(),
            vec![
                edge(&space, &["visitor", "spy"]),
                edge(&space, &["worker", "executive"]),
            ],
        )
        .unwrap();
        let locals = vec![s.locals()[0].clone(), s.locals()[2].clone()];
        let broken = SimilarityNetwork::new(cover, locals).unwrap();
        assert!(broken.validate().has(ViolationKind::DisconnectedCover));
    }

    #[test]
    fn support_leak_is_flagged() {
        let s = fixtures::chain_simnet();
        let space = s.space().clone();
        // The visitor/worker network paired with the spy/visitor edge leaks
        // worker mass outside the edge.
        let cover = Cover::new(
            space.clone(),
            vec![
                edge(&space, &["visitor", "spy"]),
                edge(&space, &["visitor", "worker"]),
                edge(&space, &["worker", "executive"]),
            ],
        )
        .unwrap();
        let locals = vec![
            s.locals()[1].clone(),
            s.locals()[1].clone(),
            s.locals()[2].clone(),
        ];
        let leaky = SimilarityNetwork::new(cover, locals).unwrap();
        assert!(leaky.validate().has(ViolationKind::SupportLeak));
    }

    #[test]
    fn undepicted_universe_variable_is_flagged() {
        let s = fixtures::chain_simnet();
        let cover = s.cover().clone();
        let locals = s.locals().to_vec();
        let extra = Variable::new("smile", ["yes", "no"]).unwrap();
        let with_extra = SimilarityNetwork::with_universe(cover, locals, vec![extra]).unwrap();
        assert!(with_extra.validate().has(ViolationKind::UndepictedVariable));
    }

    #[test]
    fn pruning_the_worker_executive_block_keeps_only_the_limousine() {
        // Comprehensive worker/executive network of the four-way story:
        // gender and badge live in their own component, the limousine hangs
        // off the hypothesis.
        let m = fixtures::four_way_multinet();
        let comprehensive = &m.locals()[1];
        let space = m.hypothesis();
        let edge = vec![
            space.point(&["worker"]).unwrap(),
            space.point(&["executive"]).unwrap(),
        ];
        let pruned = relevance_prune(comprehensive, space, &edge).unwrap();
        let kept: Vec<&str> = pruned.variables().iter().map(|v| v.id().as_str()).collect();
        assert_eq!(kept, vec!["h", "l"]);
    }

    #[test]
    fn pruning_the_spy_visitor_block_drops_the_limousine() {
        let m = fixtures::four_way_multinet();
        let comprehensive = &m.locals()[0];
        let space = m.hypothesis();
        let edge = vec![
            space.point(&["visitor"]).unwrap(),
            space.point(&["spy"]).unwrap(),
        ];
        let pruned = relevance_prune(comprehensive, space, &edge).unwrap();
        let kept: Vec<&str> = pruned.variables().iter().map(|v| v.id().as_str()).collect();
        assert_eq!(kept, vec!["b", "g", "h"]);
    }

    #[test]
    fn nothing_prunable_returns_the_network_unchanged() {
        // Every clue table differs across the edge's hypotheses.
        let net = DiscreteNetwork::builder()
            .variable("h", ["a", "b"])
            .variable("x", ["0", "1"])
            .variable("y", ["0", "1"])
            .cpt("h", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("x", ["h"], [[0.25, 0.75], [0.75, 0.25]])
            .cpt("y", ["h", "x"], [[0.1, 0.9], [0.2, 0.8], [0.3, 0.7], [0.4, 0.6]])
            .build()
            .unwrap();
        let space =
            HypothesisSpace::new(vec![Variable::new("h", ["a", "b"]).unwrap()]).unwrap();
        let edge = vec![space.point(&["a"]).unwrap(), space.point(&["b"]).unwrap()];
        let pruned = relevance_prune(&net, &space, &edge).unwrap();
        assert_eq!(pruned.variables().len(), 3);
    }

    #[test]
    fn downstream_sensitivity_blocks_pruning() {
        // x's own table ignores h, but its child y distinguishes the
        // hypotheses, so x must stay.
        let net = DiscreteNetwork::builder()
            .variable("h", ["a", "b"])
            .variable("x", ["0", "1"])
            .variable("y", ["0", "1"])
            .cpt("h", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("x", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("y", ["h", "x"], [[0.1, 0.9], [0.2, 0.8], [0.3, 0.7], [0.4, 0.6]])
            .build()
            .unwrap();
        let space =
            HypothesisSpace::new(vec![Variable::new("h", ["a", "b"]).unwrap()]).unwrap();
        let edge = vec![space.point(&["a"]).unwrap(), space.point(&["b"]).unwrap()];
        let pruned = relevance_prune(&net, &space, &edge).unwrap();
        assert_eq!(pruned.variables().len(), 3);
        // Making y insensitive as well frees both: x and y go together.
        let net = DiscreteNetwork::builder()
            .variable("h", ["a", "b"])
            .variable("x", ["0", "1"])
            .variable("y", ["0", "1"])
            .cpt("h", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("x", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("y", ["x"], [[0.1, 0.9], [0.2, 0.8]])
            .build()
            .unwrap();
        let pruned = relevance_prune(&net, &space, &edge).unwrap();
        let kept: Vec<&str> = pruned.variables().iter().map(|v| v.id().as_str()).collect();
        assert_eq!(kept, vec!["h"]);
    }
}
