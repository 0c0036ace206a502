use thiserror::Error;

use crate::spec::{ComponentName, DataType, DeclKind};
use crate::validate::Diagnostic;

fn join(names: &[ComponentName]) -> String {
    names
        .iter()
        .map(ComponentName::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("specification is invalid ({} diagnostic(s))", .0.len())]
    InvalidSpec(Vec<Diagnostic>),
    #[error("`{0}` is not declared as a {1}")]
    UndeclaredComponent(String, &'static str),
    #[error("`{name}` is a {found}, expected a {expected}")]
    WrongKind {
        name: ComponentName,
        expected: &'static str,
        found: DeclKind,
    },
    #[error("runtime is sealed")]
    Sealed,
    #[error("runtime is not sealed")]
    Unsealed,
    #[error("runtime stopped after `{0}` failed")]
    Halted(ComponentName),
    #[error("`{0}` already has an implementation")]
    DuplicateImplementation(ComponentName),
    #[error("`{0}` is already bound")]
    DuplicateBinding(ComponentName),
    #[error("no implementation for {}", join(.0))]
    MissingImplementation(Vec<ComponentName>),
    #[error("no platform binding for {}", join(.0))]
    MissingBinding(Vec<ComponentName>),
    #[error("publish cycle through {}", join(.0))]
    SealCycle(Vec<ComponentName>),
    #[error("`{component}` takes {expected}, got {found}")]
    TypeMismatch {
        component: ComponentName,
        expected: DataType,
        found: DataType,
    },
    #[error("`{component}` broke its contract: {detail}")]
    ContractViolation {
        component: ComponentName,
        detail: String,
    },
    #[error("`{component}` finished without calling a continuation")]
    NoContinuationCalled { component: ComponentName },
    #[error("`{component}` called a second continuation")]
    DoubleContinuation { component: ComponentName },
    #[error("`{component}` pulled `{source_name}` before it had a value")]
    PullBeforeValue {
        component: ComponentName,
        source_name: ComponentName,
    },
    #[error("`{component}` panicked: {message}")]
    ImplementationPanic {
        component: ComponentName,
        message: String,
    },
    #[error("`{component}` used a handle after its activation ended")]
    StaleHandle { component: ComponentName },
}

impl RuntimeError {
    pub fn code(&self) -> &'static str {
        match self {
            RuntimeError::InvalidSpec(_) => "INVALID_SPEC",
            RuntimeError::UndeclaredComponent(..) => "UNDECLARED_COMPONENT",
            RuntimeError::WrongKind { .. } => "WRONG_KIND",
            RuntimeError::Sealed => "SEALED",
            RuntimeError::Unsealed => "UNSEALED",
            RuntimeError::Halted(_) => "HALTED",
            RuntimeError::DuplicateImplementation(_) => "DUPLICATE_IMPLEMENTATION",
            RuntimeError::DuplicateBinding(_) => "DUPLICATE_BINDING",
            RuntimeError::MissingImplementation(_) => "MISSING_IMPLEMENTATION",
            RuntimeError::MissingBinding(_) => "MISSING_BINDING",
            RuntimeError::SealCycle(_) => "SEAL_CYCLE",
            RuntimeError::TypeMismatch { .. } => "TYPE_MISMATCH",
            RuntimeError::ContractViolation { .. } => "CONTRACT_VIOLATION",
            RuntimeError::NoContinuationCalled { .. } => "NO_CONTINUATION_CALLED",
            RuntimeError::DoubleContinuation { .. } => "DOUBLE_CONTINUATION",
            RuntimeError::PullBeforeValue { .. } => "PULL_BEFORE_VALUE",
            RuntimeError::ImplementationPanic { .. } => "IMPLEMENTATION_PANIC",
            RuntimeError::StaleHandle { .. } => "STALE_HANDLE",
        }
    }

    /// The component blamed for the error, when there is one.
    pub fn component(&self) -> Option<&ComponentName> {
        match self {
            RuntimeError::WrongKind { name, .. }
            | RuntimeError::Halted(name)
            | RuntimeError::DuplicateImplementation(name)
            | RuntimeError::DuplicateBinding(name) => Some(name),
            RuntimeError::TypeMismatch { component, .. }
            | RuntimeError::ContractViolation { component, .. }
            | RuntimeError::NoContinuationCalled { component }
            | RuntimeError::DoubleContinuation { component }
            | RuntimeError::PullBeforeValue { component, .. }
            | RuntimeError::ImplementationPanic { component, .. }
            | RuntimeError::StaleHandle { component } => Some(component),
            _ => None,
        }
    }
}
