//! Declaration-driven Sense/Compute/Control kernel.
//!
//! Applications are described by declaring sources, actions, contexts and
//! controllers in the `.scc` language. From those declarations the crate
//! derives a boundary contract per component, a static information-flow
//! graph, and a runtime that only hands each implementation the
//! capabilities its declaration grants, checks every value crossing a
//! component boundary, and tracks which sources every value came from.
//!
//! ```
//! use scc::{parse_str, validate, derive_contract, render_contract};
//!
//! let spec = parse_str(scc::webcam::WEBCAM_SPEC).unwrap();
//! assert!(validate(&spec).is_empty());
//! let c = derive_contract(&spec, "ComposeDisplay").unwrap();
//! assert_eq!(
//!     render_contract(&c),
//!     "(-> picture? (-> string?) (-> picture? void?) (-> void?) none/c)"
//! );
//! ```

pub mod cli;
pub mod contract;
pub mod flow;
pub mod parser;
pub mod runtime;
pub mod sim;
pub mod spec;
pub mod validate;
pub mod value;
pub mod webcam;

pub use contract::{derive_contract, render_contract, BoundaryContract};
pub use flow::{build_flow_graph, export, source_ancestors, ExportFormat, FlowGraph};
pub use parser::{parse, parse_located, parse_str, pretty_print, ParseError, SourceText};
pub use runtime::{create_runtime, Args, Implementation, Outcome, Runtime, RuntimeError};
pub use spec::{ComponentName, DataType, Declaration, Specification};
pub use validate::{validate, Diagnostic, DiagnosticCode};
pub use value::{TaintedValue, Taints, Value};
