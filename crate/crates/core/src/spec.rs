//! Abstract syntax for component declarations.
//!
//! A [`Specification`] is an ordered list of [`Declaration`]s. Resources
//! (sources and actions) are supplied by the platform; contexts and
//! controllers are supplied by the application and carry an
//! [`InteractionContract`] describing how they are activated, what they may
//! pull, and whether they publish.
//!
//! Construction never checks cross-references; see [`crate::validate`].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Type of the values a component produces or consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataType {
    Bool,
    Int,
    String,
    Picture,
}

impl DataType {
    pub const ALL: [DataType; 4] = [
        DataType::Bool,
        DataType::Int,
        DataType::String,
        DataType::Picture,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            DataType::Bool => "Bool",
            DataType::Int => "Int",
            DataType::String => "String",
            DataType::Picture => "Picture",
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown type `{0}`")]
pub struct UnknownType(pub String);

impl FromStr for DataType {
    type Err = UnknownType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DataType::ALL
            .into_iter()
            .find(|t| t.keyword() == s)
            .ok_or_else(|| UnknownType(s.to_owned()))
    }
}

/// Identifier of a declared component: `[A-Za-z][A-Za-z0-9_]*`, case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentName(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a valid component name")]
pub struct InvalidName(pub String);

impl ComponentName {
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidName> {
        let text = text.into();
        if is_identifier(&text) {
            Ok(ComponentName(text))
        } else {
            Err(InvalidName(text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for ComponentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ComponentName {
    type Err = InvalidName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ComponentName::new(s)
    }
}

impl AsRef<str> for ComponentName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for ComponentName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PublishSpec {
    NoPublish,
    AlwaysPublish,
    MaybePublish,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Activation {
    /// Activated by another component pulling from it.
    WhenRequired,
    /// Activated whenever the named source or context publishes.
    WhenProvided(ComponentName),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InteractionContract {
    pub activation: Activation,
    pub get: Option<ComponentName>,
    pub publish: PublishSpec,
}

impl InteractionContract {
    pub fn when_required(get: Option<ComponentName>) -> Self {
        InteractionContract {
            activation: Activation::WhenRequired,
            get,
            publish: PublishSpec::NoPublish,
        }
    }

    pub fn when_provided(
        trigger: ComponentName,
        get: Option<ComponentName>,
        publish: PublishSpec,
    ) -> Self {
        InteractionContract {
            activation: Activation::WhenProvided(trigger),
            get,
            publish,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeclKind {
    Source,
    Action,
    Context,
    Controller,
}

impl DeclKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DeclKind::Source => "source",
            DeclKind::Action => "action",
            DeclKind::Context => "context",
            DeclKind::Controller => "controller",
        }
    }
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Declaration {
    Source {
        name: ComponentName,
        out_type: DataType,
    },
    Action {
        name: ComponentName,
        in_type: DataType,
    },
    Context {
        name: ComponentName,
        out_type: DataType,
        contract: InteractionContract,
    },
    Controller {
        name: ComponentName,
        trigger: ComponentName,
        action: ComponentName,
    },
}

impl Declaration {
    pub fn name(&self) -> &ComponentName {
        match self {
            Declaration::Source { name, .. }
            | Declaration::Action { name, .. }
            | Declaration::Context { name, .. }
            | Declaration::Controller { name, .. } => name,
        }
    }

    pub fn kind(&self) -> DeclKind {
        match self {
            Declaration::Source { .. } => DeclKind::Source,
            Declaration::Action { .. } => DeclKind::Action,
            Declaration::Context { .. } => DeclKind::Context,
            Declaration::Controller { .. } => DeclKind::Controller,
        }
    }

    /// The type of values this component publishes or returns, if any.
    pub fn output_type(&self) -> Option<DataType> {
        match self {
            Declaration::Source { out_type, .. } | Declaration::Context { out_type, .. } => {
                Some(*out_type)
            }
            _ => None,
        }
    }

    /// The trigger this component subscribes to, for when-provided
    /// contexts and controllers.
    pub fn trigger(&self) -> Option<&ComponentName> {
        match self {
            Declaration::Context {
                contract:
                    InteractionContract {
                        activation: Activation::WhenProvided(t),
                        ..
                    },
                ..
            } => Some(t),
            Declaration::Controller { trigger, .. } => Some(trigger),
            _ => None,
        }
    }

    pub fn is_when_required(&self) -> bool {
        matches!(
            self,
            Declaration::Context {
                contract: InteractionContract {
                    activation: Activation::WhenRequired,
                    ..
                },
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("component is not declared")]
    NotFound,
    #[error("component is a {0}, which has no such attribute")]
    WrongKind(DeclKind),
}

impl LookupError {
    pub fn code(&self) -> &'static str {
        match self {
            LookupError::NotFound => "NOT_FOUND",
            LookupError::WrongKind(_) => "WRONG_KIND",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Specification {
    pub declarations: Vec<Declaration>,
}

impl Specification {
    pub fn new(declarations: Vec<Declaration>) -> Self {
        Specification { declarations }
    }

    pub fn is_empty(&self) -> bool {
        self.declarations.is_empty()
    }

    /// First declaration with the given name.
    pub fn lookup(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name().as_str() == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.declarations
            .iter()
            .position(|d| d.name().as_str() == name)
    }

    /// Declared output type of a source or context.
    pub fn output_type_of(&self, name: &str) -> Result<DataType, LookupError> {
        let decl = self.lookup(name).ok_or(LookupError::NotFound)?;
        decl.output_type()
            .ok_or(LookupError::WrongKind(decl.kind()))
    }

    /// Declared input type of an action.
    pub fn input_type_of(&self, name: &str) -> Result<DataType, LookupError> {
        match self.lookup(name).ok_or(LookupError::NotFound)? {
            Declaration::Action { in_type, .. } => Ok(*in_type),
            other => Err(LookupError::WrongKind(other.kind())),
        }
    }

    pub fn count(&self, kind: DeclKind) -> usize {
        self.declarations
            .iter()
            .filter(|d| d.kind() == kind)
            .count()
    }
}
