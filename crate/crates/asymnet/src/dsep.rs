//! d-separation via the moralized ancestral graph.
//!
//! X and Y are d-separated given Z iff they are disconnected in the moral
//! graph of the ancestral subgraph of X ∪ Y ∪ Z after removing Z. This is
//! equivalent to the path-blocking definition: chains and forks are blocked
//! when the middle node is observed, colliders when neither the collider nor
//! any of its descendants is.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::network::DiscreteNetwork;
use crate::variable::VarId;

impl DiscreteNetwork {
    /// Standard d-separation. `x` and `y` must be nonempty and the three sets
    /// pairwise disjoint.
    pub fn d_separated(&self, x: &[VarId], y: &[VarId], z: &[VarId]) -> Result<bool> {
        let xs = self.resolve_set(x, "X")?;
        let ys = self.resolve_set(y, "Y")?;
        let zs = self.resolve_set(z, "Z")?;
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::contract("X and Y must be nonempty"));
        }
        if !xs.is_disjoint(&ys) || !xs.is_disjoint(&zs) || !ys.is_disjoint(&zs) {
            return Err(Error::contract(
                "X, Y and Z must be pairwise disjoint",
            ));
        }

        let n = self.variables().len();

        // Ancestral closure of X ∪ Y ∪ Z.
        let mut in_ancestral = vec![false; n];
        let mut queue: VecDeque<usize> = xs.iter().chain(&ys).chain(&zs).copied().collect();
        for &s in &queue {
            in_ancestral[s] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &p in self.parent_positions(u) {
                if !in_ancestral[p] {
                    in_ancestral[p] = true;
                    queue.push_back(p);
                }
            }
        }

        // Moralize: connect each node with its parents, marry co-parents.
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for v in 0..n {
            if !in_ancestral[v] {
                continue;
            }
            let parents: Vec<usize> = self
                .parent_positions(v)
                .iter()
                .copied()
                .filter(|&p| in_ancestral[p])
                .collect();
            for &p in &parents {
                adj[v].insert(p);
                adj[p].insert(v);
            }
            for (i, &p) in parents.iter().enumerate() {
                for &q in &parents[i + 1..] {
                    adj[p].insert(q);
                    adj[q].insert(p);
                }
            }
        }

        // BFS from X avoiding Z; separated iff Y is unreachable.
        let mut blocked = vec![false; n];
        for &z in &zs {
            blocked[z] = true;
        }
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = xs.iter().copied().filter(|&v| !blocked[v]).collect();
        for &s in &queue {
            seen[s] = true;
        }
        while let Some(u) = queue.pop_front() {
            if ys.contains(&u) {
                return Ok(false);
            }
            for &w in &adj[u] {
                if !seen[w] && !blocked[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(true)
    }

    fn resolve_set(&self, ids: &[VarId], label: &str) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for id in ids {
            let Some(pos) = self.position(id.as_str()) else {
                return Err(Error::contract(format!(
                    "{label} contains unknown variable {id}"
                )));
            };
            out.insert(pos);
        }
        Ok(out)
    }
}
