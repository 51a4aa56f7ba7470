//! Dense factors over subsets of variables, the carrier for exact inference.

use crate::error::{Error, Result};
use crate::shape;
use crate::variable::VarId;

/// A nonnegative table over the Cartesian domain of its scope (row-major,
/// last variable fastest). Factors need not normalize.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return Err(Error::contract("factor scope and cards differ in length"));
        }
        for (i, v) in scope.iter().enumerate() {
            if scope[..i].contains(v) {
                return Err(Error::contract(format!("factor scope repeats variable {v}")));
            }
        }
        if values.len() != shape::size(&cards) {
            return Err(Error::contract(format!(
                "factor has {} values, scope requires {}",
                values.len(),
                shape::size(&cards)
            )));
        }
        Ok(Factor {
            scope,
            cards,
            values,
        })
    }

    /// The factor with empty scope and a single value.
    pub fn scalar(value: f64) -> Self {
        Factor {
            scope: Vec::new(),
            cards: Vec::new(),
            values: vec![value],
        }
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn contains(&self, var: &str) -> bool {
        self.scope.iter().any(|v| v.as_str() == var)
    }

    fn axis(&self, var: &str) -> Option<usize> {
        self.scope.iter().position(|v| v.as_str() == var)
    }

    /// Value at a full index tuple over the factor's own scope order.
    pub fn value_at(&self, indices: &[usize]) -> f64 {
        self.values[shape::ravel(indices, &self.cards)]
    }

    /// Value at an assignment that binds at least the factor's scope;
    /// variables outside the scope are ignored (broadcast lookup).
    pub fn value_for(&self, bound: &dyn Fn(&str) -> Option<usize>) -> Result<f64> {
        let mut idx = Vec::with_capacity(self.scope.len());
        for v in &self.scope {
            let Some(i) = bound(v.as_str()) else {
                return Err(Error::contract(format!(
                    "lookup does not bind factor variable {v}"
                )));
            };
            idx.push(i);
        }
        Ok(self.value_at(&idx))
    }

    /// Fix `var = value` and drop it from the scope.
    pub fn reduce(&self, var: &str, value: usize) -> Result<Factor> {
        let Some(axis) = self.axis(var) else {
            return Err(Error::contract(format!("factor does not contain {var}")));
        };
        if value >= self.cards[axis] {
            return Err(Error::contract(format!(
                "value index {value} out of range for {var}"
            )));
        }
        let mut out_scope = self.scope.clone();
        out_scope.remove(axis);
        let mut out_cards = self.cards.clone();
        out_cards.remove(axis);
        let mut out = vec![0.0; shape::size(&out_cards)];
        let mut idx = vec![0usize; self.cards.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            shape::unravel(flat, &self.cards, &mut idx);
            if idx[axis] != value {
                continue;
            }
            let mut out_idx = idx.clone();
            out_idx.remove(axis);
            out[shape::ravel(&out_idx, &out_cards)] = v;
        }
        Factor::new(out_scope, out_cards, out)
    }

    /// Sum `var` out of the scope. Sums are not counted as multiplications.
    pub fn sum_out(&self, var: &str) -> Result<Factor> {
        let Some(axis) = self.axis(var) else {
            return Err(Error::contract(format!("factor does not contain {var}")));
        };
        let mut out_scope = self.scope.clone();
        out_scope.remove(axis);
        let mut out_cards = self.cards.clone();
        out_cards.remove(axis);
        let mut out = vec![0.0; shape::size(&out_cards)];
        let mut idx = vec![0usize; self.cards.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            shape::unravel(flat, &self.cards, &mut idx);
            let mut out_idx = idx.clone();
            out_idx.remove(axis);
            out[shape::ravel(&out_idx, &out_cards)] += v;
        }
        Factor::new(out_scope, out_cards, out)
    }

    /// Pointwise product over the union scope. Each scalar multiply performed
    /// increments `multiplications`; this is the single cost metric used for
    /// all inference comparisons.
    pub fn product(&self, other: &Factor, multiplications: &mut u64) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (v, &c) in other.scope.iter().zip(other.cards.iter()) {
            if !scope.contains(v) {
                scope.push(v.clone());
                cards.push(c);
            }
        }
        let self_axes: Vec<usize> = self
            .scope
            .iter()
            .map(|v| scope.iter().position(|s| s == v).unwrap())
            .collect();
        let other_axes: Vec<usize> = other
            .scope
            .iter()
            .map(|v| scope.iter().position(|s| s == v).unwrap())
            .collect();
        let total = shape::size(&cards);
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; cards.len()];
        let mut self_idx = vec![0usize; self.scope.len()];
        let mut other_idx = vec![0usize; other.scope.len()];
        for flat in 0..total {
            shape::unravel(flat, &cards, &mut idx);
            for (k, &a) in self_axes.iter().enumerate() {
                self_idx[k] = idx[a];
            }
            for (k, &a) in other_axes.iter().enumerate() {
                other_idx[k] = idx[a];
            }
            values.push(self.value_at(&self_idx) * other.value_at(&other_idx));
        }
        *multiplications += total as u64;
        Factor {
            scope,
            cards,
            values,
        }
    }

    /// Scale to total mass 1. A zero total means the factor describes an
    /// impossible event and normalization is undefined.
    pub fn normalized(&self) -> Result<Factor> {
        let total = self.total();
        if total == 0.0 {
            return Err(Error::InconsistentEvidence(
                "factor has zero total mass".into(),
            ));
        }
        let values = self.values.iter().map(|v| v / total).collect();
        Ok(Factor {
            scope: self.scope.clone(),
            cards: self.cards.clone(),
            values,
        })
    }

    /// Permute the scope into the given order (must be the same variable set).
    pub fn reordered(&self, order: &[VarId]) -> Result<Factor> {
        if order.len() != self.scope.len() {
            return Err(Error::contract(
                "reorder must name every scope variable exactly once",
            ));
        }
        let mut axes = Vec::with_capacity(order.len());
        for id in order {
            let Some(a) = self.axis(id.as_str()) else {
                return Err(Error::contract(format!("factor does not contain {id}")));
            };
            if axes.contains(&a) {
                return Err(Error::contract(format!("variable {id} repeated in reorder")));
            }
            axes.push(a);
        }
        let out_cards: Vec<usize> = axes.iter().map(|&a| self.cards[a]).collect();
        let mut out = vec![0.0; self.values.len()];
        let mut idx = vec![0usize; self.cards.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            shape::unravel(flat, &self.cards, &mut idx);
            let out_idx: Vec<usize> = axes.iter().map(|&a| idx[a]).collect();
            out[shape::ravel(&out_idx, &out_cards)] = v;
        }
        Factor::new(order.to_vec(), out_cards, out)
    }
}
