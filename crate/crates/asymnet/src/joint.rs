//! Dense joint probability tables — the brute-force oracle every other
//! representation is checked against.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::network::DiscreteNetwork;
use crate::shape;
use crate::variable::{VarId, Variable};

/// Default cap on the number of cells [`DiscreteNetwork::enumerate_joint`]
/// will materialize.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 22;

/// A dense probability table over the full Cartesian domain of its scope,
/// row-major with the last variable fastest.
///
/// A `JointTable` representing a distribution sums to 1 within tolerance;
/// slices produced by [`JointTable::marginalize`] after conditioning on
/// evidence of probability < 1 may sum to less.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    scope: Vec<Variable>,
    values: Vec<f64>,
}

impl JointTable {
    pub fn new(scope: Vec<Variable>, values: Vec<f64>) -> Result<Self> {
        let expected = shape::size(&scope.iter().map(|v| v.cardinality()).collect::<Vec<_>>());
        if values.len() != expected {
            return Err(Error::contract(format!(
                "joint table has {} entries, scope requires {expected}",
                values.len()
            )));
        }
        Ok(JointTable { scope, values })
    }

    pub fn scope(&self) -> &[Variable] {
        &self.scope
    }

    pub fn scope_ids(&self) -> Vec<VarId> {
        self.scope.iter().map(|v| v.id().clone()).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn cards(&self) -> Vec<usize> {
        self.scope.iter().map(|v| v.cardinality()).collect()
    }

    /// Probability of a full assignment over the scope.
    pub fn probability(&self, assignment: &Assignment) -> Result<f64> {
        let mut idx = Vec::with_capacity(self.scope.len());
        for v in &self.scope {
            let Some(i) = assignment.get(v.id().as_str()) else {
                return Err(Error::contract(format!(
                    "assignment does not bind variable {}",
                    v.id()
                )));
            };
            if i >= v.cardinality() {
                return Err(Error::contract(format!(
                    "assignment binds {} out of range",
                    v.id()
                )));
            }
            idx.push(i);
        }
        Ok(self.values[shape::ravel(&idx, &self.cards())])
    }

    /// Sum out every variable not in `keep`; result scope follows the order
    /// of `keep`.
    pub fn marginalize(&self, keep: &[VarId]) -> Result<JointTable> {
        let mut kept_positions = Vec::with_capacity(keep.len());
        for id in keep {
            let Some(pos) = self.scope.iter().position(|v| v.id() == id) else {
                return Err(Error::contract(format!("unknown variable {id} in scope")));
            };
            kept_positions.push(pos);
        }
        let cards = self.cards();
        let out_scope: Vec<Variable> = kept_positions
            .iter()
            .map(|&p| self.scope[p].clone())
            .collect();
        let out_cards: Vec<usize> = kept_positions.iter().map(|&p| cards[p]).collect();
        let mut out = vec![0.0; shape::size(&out_cards)];
        let mut idx = vec![0usize; cards.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            shape::unravel(flat, &cards, &mut idx);
            let out_idx: Vec<usize> = kept_positions.iter().map(|&p| idx[p]).collect();
            out[shape::ravel(&out_idx, &out_cards)] += v;
        }
        JointTable::new(out_scope, out)
    }

    /// Zero out every cell inconsistent with the evidence, then renormalize.
    /// Fails with an inconsistent-evidence error when the evidence has
    /// probability zero.
    pub fn condition(&self, evidence: &Assignment) -> Result<JointTable> {
        let cards = self.cards();
        let mut fixed: Vec<Option<usize>> = vec![None; self.scope.len()];
        for (var, value) in evidence.iter() {
            let Some(pos) = self.scope.iter().position(|v| v.id() == var) else {
                return Err(Error::contract(format!("unknown evidence variable {var}")));
            };
            if value >= cards[pos] {
                return Err(Error::contract(format!("evidence binds {var} out of range")));
            }
            fixed[pos] = Some(value);
        }
        let mut out = vec![0.0; self.values.len()];
        let mut idx = vec![0usize; cards.len()];
        let mut total = 0.0;
        for (flat, &v) in self.values.iter().enumerate() {
            shape::unravel(flat, &cards, &mut idx);
            let consistent = fixed
                .iter()
                .enumerate()
                .all(|(p, f)| f.map_or(true, |fv| idx[p] == fv));
            if consistent {
                out[flat] = v;
                total += v;
            }
        }
        if total == 0.0 {
            return Err(Error::InconsistentEvidence(format!(
                "evidence {evidence} has probability zero"
            )));
        }
        for v in &mut out {
            *v /= total;
        }
        JointTable::new(self.scope.clone(), out)
    }

    /// Reorder the scope; entries are permuted accordingly.
    pub fn reordered(&self, order: &[VarId]) -> Result<JointTable> {
        if order.len() != self.scope.len() {
            return Err(Error::contract(
                "reorder must name every scope variable exactly once",
            ));
        }
        let mut positions = Vec::with_capacity(order.len());
        for id in order {
            let Some(pos) = self.scope.iter().position(|v| v.id() == id) else {
                return Err(Error::contract(format!("unknown variable {id} in scope")));
            };
            if positions.contains(&pos) {
                return Err(Error::contract(format!("variable {id} repeated in reorder")));
            }
            positions.push(pos);
        }
        let cards = self.cards();
        let out_scope: Vec<Variable> = positions.iter().map(|&p| self.scope[p].clone()).collect();
        let out_cards: Vec<usize> = positions.iter().map(|&p| cards[p]).collect();
        let mut out = vec![0.0; self.values.len()];
        let mut idx = vec![0usize; cards.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            shape::unravel(flat, &cards, &mut idx);
            let out_idx: Vec<usize> = positions.iter().map(|&p| idx[p]).collect();
            out[shape::ravel(&out_idx, &out_cards)] = v;
        }
        JointTable::new(out_scope, out)
    }

    /// Largest absolute difference against another table over the same
    /// variables (any scope order).
    pub fn max_abs_difference(&self, other: &JointTable) -> Result<f64> {
        let reordered = other.reordered(&self.scope_ids())?;
        if reordered.cards() != self.cards() {
            return Err(Error::contract(
                "joint tables have different domains",
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(reordered.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl DiscreteNetwork {
    /// Expand the network into its full joint table, capped at
    /// [`DEFAULT_ENUMERATION_CAP`] cells.
    ///
    /// Each entry is computed by the same chain-rule product as
    /// [`DiscreteNetwork::joint_probability`], so the two agree exactly.
    pub fn enumerate_joint(&self) -> Result<JointTable> {
        self.enumerate_joint_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_joint_with_cap(&self, cap: usize) -> Result<JointTable> {
        let cells = self.domain_size();
        if cells > cap as u128 {
            return Err(Error::DomainTooLarge { cells, cap });
        }
        let cards = self.cards();
        let mut values = Vec::with_capacity(cells as usize);
        let mut idx = vec![0usize; cards.len()];
        for flat in 0..cells as usize {
            shape::unravel(flat, &cards, &mut idx);
            values.push(self.joint_probability_by_positions(&idx));
        }
        JointTable::new(self.variables().to_vec(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_binary_node_identity() {
        let net = DiscreteNetwork::builder()
            .variable("x", ["0", "1"])
            .cpt("x", [] as [&str; 0], [[0.3, 0.7]])
            .build()
            .unwrap();
        let joint = net.enumerate_joint().unwrap();
        assert_eq!(joint.values(), &[0.3, 0.7]);
    }

    #[test]
    fn two_independent_uniform_nodes() {
        let net = DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .variable("b", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("b", [] as [&str; 0], [[0.5, 0.5]])
            .build()
            .unwrap();
        let joint = net.enumerate_joint().unwrap();
        assert_eq!(joint.values(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn cap_is_enforced() {
        let net = DiscreteNetwork::builder()
            .variable("a", ["0", "1"])
            .variable("b", ["0", "1"])
            .cpt("a", [] as [&str; 0], [[0.5, 0.5]])
            .cpt("b", [] as [&str; 0], [[0.5, 0.5]])
            .build()
            .unwrap();
        assert!(matches!(
            net.enumerate_joint_with_cap(3),
            Err(Error::DomainTooLarge { cells: 4, cap: 3 })
        ));
    }

    #[test]
    fn conditioning_on_impossible_evidence_fails() {
        let net = DiscreteNetwork::builder()
            .variable("x", ["0", "1"])
            .cpt("x", [] as [&str; 0], [[1.0, 0.0]])
            .build()
            .unwrap();
        let joint = net.enumerate_joint().unwrap();
        let e = Assignment::new().with("x", 1);
        assert!(matches!(
            joint.condition(&e),
            Err(Error::InconsistentEvidence(_))
        ));
    }
}
