//! Conditional probability tables.

use crate::error::{Error, Result};
use crate::variable::VarId;

/// Absolute tolerance used by every normalization check in the crate.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A conditional probability table for one variable.
///
/// Rows are indexed by the joint parent configuration in row-major order over
/// the parent value indices, last parent fastest; each row is a probability
/// vector over the child's values. A parentless variable has exactly one row.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    child: VarId,
    parents: Vec<VarId>,
    rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn new<C, P, R>(child: C, parents: P, rows: R) -> Result<Self>
    where
        C: Into<VarId>,
        P: IntoIterator,
        P::Item: Into<VarId>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = f64>,
    {
        let child = child.into();
        let parents: Vec<VarId> = parents.into_iter().map(Into::into).collect();
        for (i, p) in parents.iter().enumerate() {
            if parents[..i].contains(p) {
                return Err(Error::contract(format!(
                    "cpt for {child} repeats parent {p}"
                )));
            }
            if *p == child {
                return Err(Error::contract(format!("cpt for {child} lists itself as parent")));
            }
        }
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.into_iter().collect()).collect();
        if rows.is_empty() {
            return Err(Error::contract(format!("cpt for {child} has no rows")));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::contract(format!("cpt for {child} has ragged rows")));
        }
        Ok(Cpt {
            child,
            parents,
            rows,
        })
    }

    pub fn child(&self) -> &VarId {
        &self.child
    }

    /// Parent order is canonical: row indexing and serialization rely on it.
    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.rows[index]
    }

    /// Entry for `child = value` given the parent configuration `parent_idx`
    /// (one value index per parent, in canonical parent order).
    pub fn entry(&self, parent_idx: &[usize], parent_cards: &[usize], value: usize) -> f64 {
        self.entry_row(parent_idx, parent_cards)[value]
    }

    /// The probability vector over child values for one parent configuration.
    pub fn entry_row(&self, parent_idx: &[usize], parent_cards: &[usize]) -> &[f64] {
        &self.rows[crate::shape::ravel(parent_idx, parent_cards)]
    }
}
