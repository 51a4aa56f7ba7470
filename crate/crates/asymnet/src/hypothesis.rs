//! Hypothesis spaces: one or more distinguished variables whose joint value
//! is the object of every query.
//!
//! A single hypothesis variable is the common case; the multi-variable form
//! covers stories with several interacting unknowns (classifying a pair of
//! arrivals at once, say). Both are handled uniformly: the domain is the
//! Cartesian product of the hypothesis variables' value sets, enumerated in
//! row-major order with the last variable fastest.

use crate::error::{Error, Result};
use crate::shape;
use crate::variable::{VarId, Variable};

/// One element of `domain(H)`: a value index per hypothesis variable, in
/// hypothesis-variable order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HypothesisPoint(pub Vec<usize>);

impl HypothesisPoint {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

/// The ordered set of distinguished variables and their joint domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisSpace {
    vars: Vec<Variable>,
}

impl HypothesisSpace {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::contract(
                "a hypothesis space needs at least one variable",
            ));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|u| u.id() == v.id()) {
                return Err(Error::contract(format!(
                    "hypothesis variable {} repeated",
                    v.id()
                )));
            }
        }
        Ok(HypothesisSpace { vars })
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_ids(&self) -> Vec<VarId> {
        self.vars.iter().map(|v| v.id().clone()).collect()
    }

    pub fn contains_var(&self, id: &str) -> bool {
        self.vars.iter().any(|v| v.id().as_str() == id)
    }

    pub fn cards(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.cardinality()).collect()
    }

    /// |domain(H)| — the number of hypothesis points.
    pub fn domain_size(&self) -> usize {
        shape::size(&self.cards())
    }

    /// All hypothesis points in canonical (row-major) order.
    pub fn points(&self) -> Vec<HypothesisPoint> {
        shape::configurations(&self.cards())
            .map(HypothesisPoint)
            .collect()
    }

    /// Canonical index of a point in the domain enumeration.
    pub fn point_index(&self, p: &HypothesisPoint) -> Result<usize> {
        self.check_point(p)?;
        Ok(shape::ravel(&p.0, &self.cards()))
    }

    pub fn point_at(&self, index: usize) -> Result<HypothesisPoint> {
        if index >= self.domain_size() {
            return Err(Error::contract(format!(
                "hypothesis point index {index} out of range"
            )));
        }
        let cards = self.cards();
        let mut idx = vec![0usize; cards.len()];
        shape::unravel(index, &cards, &mut idx);
        Ok(HypothesisPoint(idx))
    }

    pub fn check_point(&self, p: &HypothesisPoint) -> Result<()> {
        if p.0.len() != self.vars.len() {
            return Err(Error::contract(format!(
                "hypothesis point has {} coordinates, expected {}",
                p.0.len(),
                self.vars.len()
            )));
        }
        for (v, &idx) in self.vars.iter().zip(&p.0) {
            if idx >= v.cardinality() {
                return Err(Error::contract(format!(
                    "hypothesis point binds {} out of range",
                    v.id()
                )));
            }
        }
        Ok(())
    }

    /// Build a point from value labels, one per hypothesis variable in order.
    pub fn point(&self, labels: &[&str]) -> Result<HypothesisPoint> {
        if labels.len() != self.vars.len() {
            return Err(Error::contract(format!(
                "expected {} labels, got {}",
                self.vars.len(),
                labels.len()
            )));
        }
        let mut idx = Vec::with_capacity(labels.len());
        for (v, label) in self.vars.iter().zip(labels) {
            let Some(i) = v.value_index(label) else {
                return Err(Error::contract(format!(
                    "variable {} has no value {label:?}",
                    v.id()
                )));
            };
            idx.push(i);
        }
        Ok(HypothesisPoint(idx))
    }

    /// Human-readable label: the bare value for a single hypothesis variable,
    /// `h1=w,h2=v` pairs otherwise.
    pub fn label(&self, p: &HypothesisPoint) -> String {
        if self.vars.len() == 1 {
            return self.vars[0].values()[p.0[0]].clone();
        }
        self.vars
            .iter()
            .zip(&p.0)
            .map(|(v, &i)| format!("{}={}", v.id(), v.values()[i]))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_space() -> HypothesisSpace {
        HypothesisSpace::new(vec![
            Variable::new("h1", ["w", "v", "s"]).unwrap(),
            Variable::new("h2", ["w", "v", "s"]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn domain_is_cartesian_product() {
        let space = pair_space();
        assert_eq!(space.domain_size(), 9);
        assert_eq!(space.points().len(), 9);
    }

    #[test]
    fn point_round_trip() {
        let space = pair_space();
        let p = space.point(&["s", "v"]).unwrap();
        let idx = space.point_index(&p).unwrap();
        assert_eq!(space.point_at(idx).unwrap(), p);
        assert_eq!(space.label(&p), "h1=s,h2=v");
    }

    #[test]
    fn single_variable_labels_are_bare() {
        let space =
            HypothesisSpace::new(vec![Variable::new("h", ["w", "v", "s"]).unwrap()]).unwrap();
        let p = space.point(&["s"]).unwrap();
        assert_eq!(space.label(&p), "s");
    }
}
