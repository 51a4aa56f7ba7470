//! Directed networks over finite-valued variables: one CPT per node.
//!
//! Networks are immutable after construction and every operation on them is a
//! pure function, so values can be shared freely across threads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::report::{ValidationReport, ViolationKind};
use crate::table::{Cpt, NORMALIZATION_TOLERANCE};
use crate::variable::{VarId, Variable};

/// A directed network: variables plus one CPT per variable.
///
/// Construction enforces *structural* soundness (every variable has exactly
/// one CPT whose shape matches the declared parents), so indexing never goes
/// out of bounds. Semantic invariants — acyclicity, row normalization, entry
/// ranges — are checked by [`DiscreteNetwork::validate`], which reports every
/// violation instead of failing on the first: a parsed model may legitimately
/// be held as a value while being diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNetwork {
    variables: Vec<Variable>,
    index: BTreeMap<VarId, usize>,
    cpts: Vec<Cpt>,                  // aligned with `variables`
    parent_positions: Vec<Vec<usize>>, // aligned; positions into `variables`
}

impl DiscreteNetwork {
    pub fn new(mut variables: Vec<Variable>, cpts: Vec<Cpt>) -> Result<Self> {
        // Canonical storage order is ascending variable id, so structurally
        // equal networks compare equal and serialize byte-identically no
        // matter how they were assembled.
        variables.sort_by(|a, b| a.id().cmp(b.id()));
        let mut index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.id().clone(), i).is_some() {
                return Err(Error::contract(format!("duplicate variable id {}", v.id())));
            }
        }
        let mut slots: Vec<Option<Cpt>> = vec![None; variables.len()];
        for cpt in cpts {
            let Some(&pos) = index.get(cpt.child().as_str()) else {
                return Err(Error::contract(format!(
                    "cpt refers to unknown variable {}",
                    cpt.child()
                )));
            };
            if slots[pos].is_some() {
                return Err(Error::contract(format!(
                    "variable {} has more than one cpt",
                    cpt.child()
                )));
            }
            slots[pos] = Some(cpt);
        }
        let mut cpts = Vec::with_capacity(variables.len());
        for (i, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(c) => cpts.push(c),
                None => {
                    return Err(Error::contract(format!(
                        "variable {} has no cpt",
                        variables[i].id()
                    )))
                }
            }
        }
        let mut parent_positions = Vec::with_capacity(variables.len());
        for (i, cpt) in cpts.iter().enumerate() {
            let mut positions = Vec::with_capacity(cpt.parents().len());
            for p in cpt.parents() {
                let Some(&pos) = index.get(p.as_str()) else {
                    return Err(Error::contract(format!(
                        "cpt for {} names unknown parent {p}",
                        cpt.child()
                    )));
                };
                positions.push(pos);
            }
            let expected_rows: usize = positions
                .iter()
                .map(|&p| variables[p].cardinality())
                .product();
            if cpt.rows().len() != expected_rows {
                return Err(Error::contract(format!(
                    "cpt for {} has {} rows, expected {expected_rows}",
                    cpt.child(),
                    cpt.rows().len()
                )));
            }
            let card = variables[i].cardinality();
            if cpt.rows().iter().any(|r| r.len() != card) {
                return Err(Error::contract(format!(
                    "cpt for {} has rows of width != {card}",
                    cpt.child()
                )));
            }
            parent_positions.push(positions);
        }
        Ok(DiscreteNetwork {
            variables,
            index,
            cpts,
            parent_positions,
        })
    }

    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: &str) -> Option<&Variable> {
        self.index.get(id).map(|&i| &self.variables[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn cpt(&self, id: &str) -> Option<&Cpt> {
        self.index.get(id).map(|&i| &self.cpts[i])
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub(crate) fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn variable_at(&self, pos: usize) -> &Variable {
        &self.variables[pos]
    }

    pub(crate) fn cpt_at(&self, pos: usize) -> &Cpt {
        &self.cpts[pos]
    }

    pub(crate) fn parent_positions(&self, pos: usize) -> &[usize] {
        &self.parent_positions[pos]
    }

    /// The arc set, derived from the CPT parent lists.
    pub fn arcs(&self) -> BTreeSet<(VarId, VarId)> {
        let mut arcs = BTreeSet::new();
        for cpt in &self.cpts {
            for p in cpt.parents() {
                arcs.insert((p.clone(), cpt.child().clone()));
            }
        }
        arcs
    }

    pub fn parents(&self, id: &str) -> Vec<VarId> {
        self.cpt(id)
            .map(|c| c.parents().to_vec())
            .unwrap_or_default()
    }

    pub fn children(&self, id: &str) -> Vec<VarId> {
        let mut out = Vec::new();
        for cpt in &self.cpts {
            if cpt.parents().iter().any(|p| p.as_str() == id) {
                out.push(cpt.child().clone());
            }
        }
        out
    }

    /// Total number of joint configurations.
    pub fn domain_size(&self) -> u128 {
        self.variables
            .iter()
            .map(|v| v.cardinality() as u128)
            .product()
    }

    /// Check every semantic invariant; the report is empty iff the network is
    /// a well-formed Bayesian network.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        if self.topological_order_internal().is_none() {
            report.push(
                ViolationKind::Cycle,
                "the arc set contains a directed cycle".to_string(),
            );
        }
        for (i, cpt) in self.cpts.iter().enumerate() {
            let id = self.variables[i].id();
            for (r, row) in cpt.rows().iter().enumerate() {
                let mut sum = 0.0;
                let mut out_of_range = false;
                for &p in row {
                    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                        out_of_range = true;
                    }
                    sum += p;
                }
                if out_of_range {
                    report.push(
                        ViolationKind::EntryOutOfRange,
                        format!("cpt for {id} row {r} has entries outside [0, 1]"),
                    );
                }
                if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    report.push(
                        ViolationKind::UnnormalizedRow,
                        format!("cpt for {id} row {r} sums to {sum}, expected 1"),
                    );
                }
            }
        }
        report
    }

    fn topological_order_internal(&self) -> Option<Vec<usize>> {
        let n = self.variables.len();
        let mut indegree = vec![0usize; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (child, parents) in self.parent_positions.iter().enumerate() {
            indegree[child] = parents.len();
            for &p in parents {
                children[p].push(child);
            }
        }
        // Ready set keyed by id so ties break by ascending variable id.
        let mut ready: BTreeSet<(&VarId, usize)> = BTreeSet::new();
        for i in 0..n {
            if indegree[i] == 0 {
                ready.insert((self.variables[i].id(), i));
            }
        }
        let mut order = Vec::with_capacity(n);
        while let Some(&(id, i)) = ready.iter().next() {
            ready.remove(&(id, i));
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert((self.variables[c].id(), c));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// A topological order of the variables: every arc goes from an earlier to
    /// a later entry, ties broken by ascending variable id. Deterministic.
    pub fn topological_order(&self) -> Result<Vec<VarId>> {
        self.topological_order_internal()
            .map(|order| {
                order
                    .into_iter()
                    .map(|i| self.variables[i].id().clone())
                    .collect()
            })
            .ok_or_else(|| Error::CyclicNetwork("the arc set contains a directed cycle".into()))
    }

    /// The chain-rule probability of a full assignment: the product over all
    /// variables of the CPT entry selected by the assignment.
    ///
    /// The multiplication order is the network's variable order; the joint
    /// enumeration oracle uses the same arithmetic path, so the two agree
    /// exactly, not merely within tolerance.
    pub fn joint_probability(&self, assignment: &Assignment) -> Result<f64> {
        let mut indices = vec![0usize; self.variables.len()];
        for (i, v) in self.variables.iter().enumerate() {
            let Some(idx) = assignment.get(v.id().as_str()) else {
                return Err(Error::contract(format!(
                    "assignment does not bind variable {}",
                    v.id()
                )));
            };
            if idx >= v.cardinality() {
                return Err(Error::contract(format!(
                    "assignment binds {} to index {idx}, cardinality is {}",
                    v.id(),
                    v.cardinality()
                )));
            }
            indices[i] = idx;
        }
        Ok(self.joint_probability_by_positions(&indices))
    }

    /// Same product, addressed by variable positions. Shared with the oracle.
    pub(crate) fn joint_probability_by_positions(&self, indices: &[usize]) -> f64 {
        let mut product = 1.0;
        for (i, cpt) in self.cpts.iter().enumerate() {
            let positions = &self.parent_positions[i];
            let parent_idx: Vec<usize> = positions.iter().map(|&p| indices[p]).collect();
            let parent_cards: Vec<usize> = positions
                .iter()
                .map(|&p| self.variables[p].cardinality())
                .collect();
            product *= cpt.entry(&parent_idx, &parent_cards, indices[i]);
        }
        product
    }

    /// Free parameters: for each variable, (cardinality − 1) times the product
    /// of its parents' cardinalities. Invariant under relabeling and under
    /// permutation of any node's parent list.
    pub fn free_parameter_count(&self) -> u64 {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let rows: u64 = self.parent_positions[i]
                    .iter()
                    .map(|&p| self.variables[p].cardinality() as u64)
                    .product();
                (v.cardinality() as u64 - 1) * rows
            })
            .sum()
    }

    /// Resolve `(variable, value-label)` pairs into an [`Assignment`].
    pub fn assignment(&self, pairs: &[(&str, &str)]) -> Result<Assignment> {
        let mut a = Assignment::new();
        for (var, label) in pairs {
            let Some(v) = self.variable(var) else {
                return Err(Error::contract(format!("unknown variable {var}")));
            };
            let Some(idx) = v.value_index(label) else {
                return Err(Error::contract(format!(
                    "variable {var} has no value {label:?}"
                )));
            };
            a.bind(v.id().clone(), idx);
        }
        Ok(a)
    }

    /// Iterate all full assignments in the row-major order of the variable
    /// list (last variable fastest), as position-indexed vectors.
    pub(crate) fn cards(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.cardinality()).collect()
    }

    /// True iff an undirected path connects `from` to any of `to`, ignoring
    /// arc directions.
    pub(crate) fn undirected_reachable(&self, from: usize, to: &BTreeSet<usize>) -> bool {
        let n = self.variables.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (child, parents) in self.parent_positions.iter().enumerate() {
            for &p in parents {
                adj[child].insert(p);
                adj[p].insert(child);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if to.contains(&u) {
                return true;
            }
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    /// True iff a directed path leads from `from` to `to`, optionally skipping
    /// one specific arc.
    pub(crate) fn directed_path_exists(
        &self,
        from: usize,
        to: usize,
        skip_arc: Option<(usize, usize)>,
    ) -> bool {
        let n = self.variables.len();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (child, parents) in self.parent_positions.iter().enumerate() {
            for &p in parents {
                if skip_arc == Some((p, child)) {
                    continue;
                }
                children[p].push(child);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if u == to {
                return true;
            }
            for &w in &children[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    /// Rebuild with one CPT replaced (same child; shape revalidated).
    pub(crate) fn with_cpt(&self, cpt: Cpt) -> Result<DiscreteNetwork> {
        let mut cpts = self.cpts.clone();
        let Some(&pos) = self.index.get(cpt.child().as_str()) else {
            return Err(Error::contract(format!(
                "cpt refers to unknown variable {}",
                cpt.child()
            )));
        };
        cpts[pos] = cpt;
        DiscreteNetwork::new(self.variables.clone(), cpts)
    }
}

/// Incremental construction of a [`DiscreteNetwork`].
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    error: Option<Error>,
}

impl NetworkBuilder {
    /// Declare a variable whose name equals its id.
    pub fn variable<I>(mut self, id: &str, values: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        if self.error.is_none() {
            match Variable::new(id, values) {
                Ok(v) => self.variables.push(v),
                Err(e) => self.error = Some(e),
            }
        }
        self
    }

    pub fn named_variable<I>(mut self, id: &str, name: &str, values: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        if self.error.is_none() {
            match Variable::named(id, name, values) {
                Ok(v) => self.variables.push(v),
                Err(e) => self.error = Some(e),
            }
        }
        self
    }

    /// Attach the CPT for `child` given `parents` (rows in row-major parent
    /// order, last parent fastest).
    pub fn cpt<P, R>(mut self, child: &str, parents: P, rows: R) -> Self
    where
        P: IntoIterator,
        P::Item: Into<VarId>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = f64>,
    {
        if self.error.is_none() {
            match Cpt::new(child, parents, rows) {
                Ok(c) => self.cpts.push(c),
                Err(e) => self.error = Some(e),
            }
        }
        self
    }

    pub fn build(self) -> Result<DiscreteNetwork> {
        if let Some(e) = self.error {
            return Err(e);
        }
        DiscreteNetwork::new(self.variables, self.cpts)
    }
}
