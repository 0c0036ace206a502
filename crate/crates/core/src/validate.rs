//! Well-formedness checks over a parsed [`Specification`].
//!
//! Validation never fails; it returns the list of [`Diagnostic`]s, ordered
//! by declaration index. References to a duplicated name are not resolved
//! further (the duplicate itself is reported), which keeps the set of
//! reported codes independent of declaration order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::spec::{Activation, Declaration, PublishSpec, Specification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticCode {
    DupName,
    UnresolvedRef,
    PullNotRequired,
    BadPublishSpec,
    GetCycle,
    BadTriggerKind,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::DupName => "DUP_NAME",
            DiagnosticCode::UnresolvedRef => "UNRESOLVED_REF",
            DiagnosticCode::PullNotRequired => "PULL_NOT_REQUIRED",
            DiagnosticCode::BadPublishSpec => "BAD_PUBLISH_SPEC",
            DiagnosticCode::GetCycle => "GET_CYCLE",
            DiagnosticCode::BadTriggerKind => "BAD_TRIGGER_KIND",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Index of the offending declaration.
    pub index: usize,
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

enum Resolved<'a> {
    Missing,
    Ambiguous,
    Found(&'a Declaration),
}

struct Resolver<'a> {
    by_name: HashMap<&'a str, Vec<usize>>,
    spec: &'a Specification,
}

impl<'a> Resolver<'a> {
    fn new(spec: &'a Specification) -> Self {
        let mut by_name: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, d) in spec.declarations.iter().enumerate() {
            by_name.entry(d.name().as_str()).or_default().push(i);
        }
        Resolver { by_name, spec }
    }

    fn resolve(&self, name: &str) -> Resolved<'a> {
        match self.by_name.get(name).map(Vec::as_slice) {
            None | Some([]) => Resolved::Missing,
            Some([i]) => Resolved::Found(&self.spec.declarations[*i]),
            Some(_) => Resolved::Ambiguous,
        }
    }

    fn unique_index(&self, name: &str) -> Option<usize> {
        match self.by_name.get(name).map(Vec::as_slice) {
            Some([i]) => Some(*i),
            _ => None,
        }
    }
}

/// Check every structural rule of a specification.
pub fn validate(spec: &Specification) -> Vec<Diagnostic> {
    let resolver = Resolver::new(spec);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();

    for (index, decl) in spec.declarations.iter().enumerate() {
        let mut report = |code, message: String| {
            out.push(Diagnostic {
                index,
                code,
                message,
            })
        };
        let name = decl.name();
        if !seen.insert(name.as_str()) {
            report(
                DiagnosticCode::DupName,
                format!("`{name}` is declared more than once"),
            );
        }

        match decl {
            Declaration::Source { .. } | Declaration::Action { .. } => {}
            Declaration::Context { contract, .. } => {
                let publish_ok = match contract.activation {
                    Activation::WhenRequired => contract.publish == PublishSpec::NoPublish,
                    Activation::WhenProvided(_) => contract.publish != PublishSpec::NoPublish,
                };
                if !publish_ok {
                    let message = match contract.activation {
                        Activation::WhenRequired => {
                            format!("when-required context `{name}` cannot have a publish specification")
                        }
                        Activation::WhenProvided(_) => format!(
                            "when-provided context `{name}` needs always_publish or maybe_publish"
                        ),
                    };
                    report(DiagnosticCode::BadPublishSpec, message);
                }

                if let Activation::WhenProvided(trigger) = &contract.activation {
                    match resolver.resolve(trigger.as_str()) {
                        Resolved::Missing => report(
                            DiagnosticCode::UnresolvedRef,
                            format!("`{name}` is triggered by undeclared `{trigger}`"),
                        ),
                        Resolved::Found(
                            Declaration::Source { .. } | Declaration::Context { .. },
                        )
                        | Resolved::Ambiguous => {}
                        Resolved::Found(other) => report(
                            DiagnosticCode::BadTriggerKind,
                            format!(
                                "`{name}` is triggered by `{trigger}`, a {}; only sources and contexts publish",
                                other.kind()
                            ),
                        ),
                    }
                }

                if let Some(target) = &contract.get {
                    match resolver.resolve(target.as_str()) {
                        Resolved::Missing => report(
                            DiagnosticCode::UnresolvedRef,
                            format!("`{name}` gets from undeclared `{target}`"),
                        ),
                        Resolved::Found(Declaration::Source { .. }) | Resolved::Ambiguous => {}
                        Resolved::Found(d) if d.is_when_required() => {}
                        Resolved::Found(other) => report(
                            DiagnosticCode::PullNotRequired,
                            format!(
                                "`{name}` gets from `{target}`, a {} without a when-required contract",
                                other.kind()
                            ),
                        ),
                    }
                }
            }
            Declaration::Controller {
                trigger, action, ..
            } => {
                match resolver.resolve(trigger.as_str()) {
                    Resolved::Missing => report(
                        DiagnosticCode::UnresolvedRef,
                        format!("`{name}` is triggered by undeclared `{trigger}`"),
                    ),
                    Resolved::Found(Declaration::Context { .. }) | Resolved::Ambiguous => {}
                    Resolved::Found(other) => report(
                        DiagnosticCode::BadTriggerKind,
                        format!(
                            "controller `{name}` is triggered by `{trigger}`, a {}; controllers react to contexts",
                            other.kind()
                        ),
                    ),
                }
                match resolver.resolve(action.as_str()) {
                    Resolved::Missing => report(
                        DiagnosticCode::UnresolvedRef,
                        format!("`{name}` acts on undeclared `{action}`"),
                    ),
                    Resolved::Found(Declaration::Action { .. }) | Resolved::Ambiguous => {}
                    Resolved::Found(other) => report(
                        DiagnosticCode::BadTriggerKind,
                        format!(
                            "`{name}` acts on `{action}`, a {}, not an action",
                            other.kind()
                        ),
                    ),
                }
            }
        }
    }

    for index in get_cycle_members(spec, &resolver) {
        out.push(Diagnostic {
            index,
            code: DiagnosticCode::GetCycle,
            message: format!(
                "`{}` takes part in a cycle of get dependencies",
                spec.declarations[index].name()
            ),
        });
    }

    out.sort_by_key(|d| d.index);
    out
}

/// Indices of when-required contexts lying on a cycle of the get relation.
fn get_cycle_members(spec: &Specification, resolver: &Resolver<'_>) -> Vec<usize> {
    let next = |i: usize| -> Option<usize> {
        let d = &spec.declarations[i];
        if !d.is_when_required() {
            return None;
        }
        let Declaration::Context { contract, .. } = d else {
            return None;
        };
        let target = resolver.unique_index(contract.get.as_ref()?.as_str())?;
        spec.declarations[target]
            .is_when_required()
            .then_some(target)
    };

    // Each when-required context has at most one successor, so following the
    // chain for at most n steps decides whether it returns to the start.
    let n = spec.declarations.len();
    (0..n)
        .filter(|&start| {
            if resolver.unique_index(spec.declarations[start].name().as_str()) != Some(start) {
                return false;
            }
            let mut cur = start;
            for _ in 0..n {
                match next(cur) {
                    Some(t) if t == start => return true,
                    Some(t) => cur = t,
                    None => return false,
                }
            }
            false
        })
        .collect()
}
