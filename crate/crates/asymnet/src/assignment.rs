//! Assignments bind variables to value indices.

use std::collections::BTreeMap;

use crate::variable::VarId;

/// A (possibly partial) assignment of value indices to variables.
///
/// Indices refer to each variable's ordered value list. An assignment is
/// "full" for a network when it binds every variable of that network.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: BTreeMap<VarId, usize>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style binding: `Assignment::new().with("g", 0).with("b", 1)`.
    pub fn with(mut self, var: impl Into<VarId>, value_index: usize) -> Self {
        self.bindings.insert(var.into(), value_index);
        self
    }

    pub fn bind(&mut self, var: impl Into<VarId>, value_index: usize) {
        self.bindings.insert(var.into(), value_index);
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.bindings.get(var).copied()
    }

    pub fn remove(&mut self, var: &str) -> Option<usize> {
        self.bindings.remove(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.bindings.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, usize)> {
        self.bindings.iter().map(|(k, &v)| (k, v))
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarId> {
        self.bindings.keys()
    }

    /// Union of two assignments; `other` wins on conflicts.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.bind(k.clone(), v);
        }
        out
    }

    /// The sub-assignment over the given variables.
    pub fn restricted_to<'a, I>(&self, vars: I) -> Assignment
    where
        I: IntoIterator<Item = &'a VarId>,
    {
        let mut out = Assignment::new();
        for v in vars {
            if let Some(idx) = self.get(v.as_str()) {
                out.bind(v.clone(), idx);
            }
        }
        out
    }
}

impl std::fmt::Display for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, v) in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{k}={v}")?;
            first = false;
        }
        Ok(())
    }
}
