//! Boundary contracts: the call signature every context and controller
//! implementation must follow, derived from its interaction contract.
//!
//! The signature is laid out as activation value, then capability, then
//! continuations, then the result. [`render_contract`] prints it in arrow
//! notation, e.g. `(-> picture? (-> string?) (-> picture? void?) (-> void?) none/c)`.

use crate::spec::{
    Activation, ComponentName, DataType, Declaration, LookupError, PublishSpec, Specification,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CapabilityKind {
    /// Zero-argument pull returning a value of `result`.
    Get { result: DataType },
    /// One-argument command taking `input`, returning nothing.
    Do { input: DataType },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Capability {
    pub kind: CapabilityKind,
    pub target: ComponentName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Continuations {
    None,
    PublishAlways(DataType),
    PublishMaybe(DataType),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResultKind {
    ReturnsValue(DataType),
    ReturnsNothing,
    /// The implementation must leave through a continuation.
    NoReturn,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundaryContract {
    pub activation: Option<DataType>,
    pub capability: Option<Capability>,
    pub continuations: Continuations,
    pub result: ResultKind,
}

/// Derive the boundary contract of the context or controller `name`.
///
/// Referenced components are resolved through `spec`; on an unvalidated
/// spec an unresolved reference surfaces as [`LookupError::NotFound`].
pub fn derive_contract(spec: &Specification, name: &str) -> Result<BoundaryContract, LookupError> {
    match spec.lookup(name).ok_or(LookupError::NotFound)? {
        Declaration::Context {
            out_type, contract, ..
        } => {
            let activation = match &contract.activation {
                Activation::WhenProvided(trigger) => Some(spec.output_type_of(trigger.as_str())?),
                Activation::WhenRequired => None,
            };
            let capability = contract
                .get
                .as_ref()
                .map(|target| {
                    Ok::<_, LookupError>(Capability {
                        kind: CapabilityKind::Get {
                            result: spec.output_type_of(target.as_str())?,
                        },
                        target: target.clone(),
                    })
                })
                .transpose()?;
            let (continuations, result) = match contract.publish {
                PublishSpec::NoPublish => {
                    (Continuations::None, ResultKind::ReturnsValue(*out_type))
                }
                PublishSpec::AlwaysPublish => (
                    Continuations::PublishAlways(*out_type),
                    ResultKind::NoReturn,
                ),
                PublishSpec::MaybePublish => {
                    (Continuations::PublishMaybe(*out_type), ResultKind::NoReturn)
                }
            };
            Ok(BoundaryContract {
                activation,
                capability,
                continuations,
                result,
            })
        }
        Declaration::Controller {
            trigger, action, ..
        } => Ok(BoundaryContract {
            activation: Some(spec.output_type_of(trigger.as_str())?),
            capability: Some(Capability {
                kind: CapabilityKind::Do {
                    input: spec.input_type_of(action.as_str())?,
                },
                target: action.clone(),
            }),
            continuations: Continuations::None,
            result: ResultKind::ReturnsNothing,
        }),
        other => Err(LookupError::WrongKind(other.kind())),
    }
}

fn predicate(t: DataType) -> &'static str {
    match t {
        DataType::Bool => "bool?",
        DataType::Int => "int?",
        DataType::String => "string?",
        DataType::Picture => "picture?",
    }
}

pub fn render_contract(c: &BoundaryContract) -> String {
    let mut parts: Vec<String> = Vec::new();
    if let Some(t) = c.activation {
        parts.push(predicate(t).to_owned());
    }
    match c.capability.as_ref().map(|cap| cap.kind) {
        Some(CapabilityKind::Get { result }) => parts.push(format!("(-> {})", predicate(result))),
        Some(CapabilityKind::Do { input }) => {
            parts.push(format!("(-> {} void?)", predicate(input)))
        }
        None => {}
    }
    match c.continuations {
        Continuations::None => {}
        Continuations::PublishAlways(t) => parts.push(format!("(-> {} void?)", predicate(t))),
        Continuations::PublishMaybe(t) => {
            parts.push(format!("(-> {} void?)", predicate(t)));
            parts.push("(-> void?)".to_owned());
        }
    }
    parts.push(
        match c.result {
            ResultKind::ReturnsValue(t) => predicate(t),
            ResultKind::ReturnsNothing => "void?",
            ResultKind::NoReturn => "none/c",
        }
        .to_owned(),
    );
    format!("(-> {})", parts.join(" "))
}
