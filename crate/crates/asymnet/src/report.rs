//! Validation reports: a structured list of every invariant a model violates.
//!
//! Validation never aborts on the first problem; the report carries all of
//! them so a modeler can fix a file in one pass.

/// The class of a single violated invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    /// The arc set contains a directed cycle.
    Cycle,
    /// A CPT row does not sum to 1 within tolerance.
    UnnormalizedRow,
    /// A probability entry lies outside [0, 1].
    EntryOutOfRange,
    /// The declared arc set disagrees with the CPT parent lists.
    ArcMismatch,
    /// Multinet blocks overlap or fail to cover the hypothesis domain.
    NonPartition,
    /// Block priors do not sum to 1 within tolerance.
    PriorNotNormalized,
    /// A local network puts probability mass on hypothesis configurations
    /// outside its own block or cover edge.
    SupportLeak,
    /// A local network is itself invalid; details are nested.
    InvalidLocal,
    /// The cover's similarity hypergraph is not connected.
    DisconnectedCover,
    /// The cover does not reach every hypothesis point.
    IncompleteCover,
    /// A variable of the universe is depicted in no local network.
    UndepictedVariable,
    /// A depicted non-hypothesis variable is graphically disconnected from
    /// every hypothesis variable and is not flagged as deliberately retained.
    DisconnectedVariable,
    /// A variable carries different definitions in different local networks.
    InconsistentVariable,
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ViolationKind::Cycle => "cycle",
            ViolationKind::UnnormalizedRow => "unnormalized-row",
            ViolationKind::EntryOutOfRange => "entry-out-of-range",
            ViolationKind::ArcMismatch => "arc-mismatch",
            ViolationKind::NonPartition => "non-partition",
            ViolationKind::PriorNotNormalized => "prior-not-normalized",
            ViolationKind::SupportLeak => "support-leak",
            ViolationKind::InvalidLocal => "invalid-local",
            ViolationKind::DisconnectedCover => "disconnected-cover",
            ViolationKind::IncompleteCover => "incomplete-cover",
            ViolationKind::UndepictedVariable => "undepicted-variable",
            ViolationKind::DisconnectedVariable => "disconnected-variable",
            ViolationKind::InconsistentVariable => "inconsistent-variable",
        };
        f.write_str(name)
    }
}

/// One violated invariant with a human-readable description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.kind, self.detail)
    }
}

/// Every invariant a model violates; empty iff the model is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: ViolationKind, detail: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            detail: detail.into(),
        });
    }

    /// Absorb another report, prefixing each entry with a context label.
    pub fn absorb(&mut self, context: &str, other: ValidationReport) {
        for v in other.violations {
            self.violations.push(Violation {
                kind: v.kind,
                detail: format!("{context}: {}", v.detail),
            });
        }
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
