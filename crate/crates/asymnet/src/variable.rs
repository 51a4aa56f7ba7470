//! Finite-valued variables and their identifiers.

use crate::error::{Error, Result};

/// Identifier of a variable, unique within a network or model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(String);

impl VarId {
    pub fn new(id: impl Into<String>) -> Self {
        VarId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId(s.to_owned())
    }
}

impl From<String> for VarId {
    fn from(s: String) -> Self {
        VarId(s)
    }
}

impl From<&VarId> for VarId {
    fn from(s: &VarId) -> Self {
        s.clone()
    }
}

impl std::borrow::Borrow<str> for VarId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for VarId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Convenience constructor for a list of [`VarId`]s.
///
/// ```
/// use asymnet::ids;
/// assert_eq!(ids(["g", "b"]).len(), 2);
/// ```
pub fn ids<I>(names: I) -> Vec<VarId>
where
    I: IntoIterator,
    I::Item: Into<VarId>,
{
    names.into_iter().map(Into::into).collect()
}

/// A variable with a finite, ordered set of value labels.
///
/// The value order is fixed at construction and defines table indexing
/// everywhere: CPT columns, factor axes and joint-table strides all follow it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    id: VarId,
    name: String,
    values: Vec<String>,
}

impl Variable {
    /// A variable whose display name equals its id.
    pub fn new<I>(id: impl Into<VarId>, values: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        let id = id.into();
        let name = id.to_string();
        Self::named(id, name, values)
    }

    pub fn named<I>(id: impl Into<VarId>, name: impl Into<String>, values: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        let id = id.into();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(Error::contract(format!(
                "variable {id} must have at least one value"
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::contract(format!(
                    "variable {id} repeats value label {v:?}"
                )));
            }
        }
        Ok(Variable {
            id,
            name: name.into(),
            values,
        })
    }

    pub fn id(&self) -> &VarId {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    /// Number of values (the variable's cardinality). Cardinality 1 is legal;
    /// such a variable is degenerate and contributes no free parameters.
    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }

    /// Same id, restricted to a subset of value indices (order preserved).
    pub(crate) fn restricted(&self, keep: &[usize]) -> Variable {
        Variable {
            id: self.id.clone(),
            name: self.name.clone(),
            values: keep.iter().map(|&i| self.values[i].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_labels() {
        assert!(Variable::new("g", ["male", "male"]).is_err());
    }

    #[test]
    fn rejects_empty_domain() {
        assert!(Variable::new("g", Vec::<String>::new()).is_err());
    }

    #[test]
    fn cardinality_one_is_legal() {
        let v = Variable::new("h", ["worker"]).unwrap();
        assert_eq!(v.cardinality(), 1);
    }
}
