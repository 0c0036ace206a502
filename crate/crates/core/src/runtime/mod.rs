//! Contract-checked reactive runtime.
//!
//! A [`Runtime`] is created from a validated specification, receives one
//! [`Implementation`] per context and controller plus one platform binding
//! per source and action, and is then sealed. After sealing, [`Runtime::emit`]
//! feeds a value into a source and dispatches the resulting activations
//! breadth-first, in declaration order, until the queue is empty.
//!
//! Every value carries the set of sources it was derived from. Within one
//! activation the taint accumulator starts with the activation value's taints
//! and grows with every pulled value; anything published, returned, or sent
//! to an action carries the accumulator at that moment.
//!
//! A runtime is single-threaded. Separate instances are independent.

mod error;
mod handles;
mod trace;

use std::any::Any;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};

pub use error::RuntimeError;
pub use handles::{
    Args, CapabilityHandle, ContinuationHandles, DoHandle, GetHandle, Halt, Implementation,
    NoPublishHandle, Outcome, PublishHandle,
};
pub use trace::TraceEvent;

use handles::{Committed, Frame, FrameState};

use crate::contract::{derive_contract, BoundaryContract, ResultKind};
use crate::spec::{ComponentName, DataType, DeclKind, Declaration, Specification};
use crate::validate::validate;
use crate::value::{TaintedValue, Taints, Value};

/// Platform-side provider answering pulls of a source.
pub trait SourceProvider {
    /// The value a pull would observe now, if any has been set.
    fn current(&mut self) -> Option<Value>;
    fn update(&mut self, value: Value);
}

/// Platform-side consumer of an action's commands.
pub trait ActionSink {
    fn deliver(&mut self, value: &Value);
}

/// Counters over all activations so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub activations: u64,
    /// Activations of always/maybe-publish contexts that completed cleanly.
    pub no_return_completed: u64,
    /// Continuations (publish or nopublish) whose effect was committed.
    pub continuations_committed: u64,
    pub deliveries: u64,
}

struct Slot {
    name: ComponentName,
    kind: DeclKind,
    /// Output type of sources and contexts, input type of actions.
    ty: Option<DataType>,
    contract: Option<BoundaryContract>,
    subscribers: Vec<usize>,
}

pub(crate) struct Engine {
    slots: Vec<Slot>,
    index: HashMap<ComponentName, usize>,
    impls: Vec<Option<Implementation>>,
    registered: Vec<bool>,
    sources: Vec<Option<Box<dyn SourceProvider>>>,
    sinks: Vec<Option<Box<dyn ActionSink>>>,
    queue: VecDeque<(usize, TaintedValue)>,
    log: Vec<(ComponentName, TaintedValue)>,
    observer: Option<Observer>,
    stats: Stats,
}

type Observer = Box<dyn FnMut(&TraceEvent)>;

impl Engine {
    fn index_of(&self, name: &ComponentName) -> usize {
        self.index[name]
    }

    fn current_value(&mut self, source: usize) -> Option<Value> {
        self.sources[source].as_mut()?.current()
    }

    fn observe(&mut self, event: TraceEvent) {
        if let Some(obs) = self.observer.as_mut() {
            obs(&event);
        }
    }

    fn deliver(&mut self, controller: &ComponentName, action: &ComponentName, value: TaintedValue) {
        let idx = self.index_of(action);
        if let Some(sink) = self.sinks[idx].as_mut() {
            sink.deliver(&value.value);
        }
        self.stats.deliveries += 1;
        self.observe(TraceEvent::Deliver {
            controller: controller.clone(),
            action: action.clone(),
            value: value.clone(),
        });
        self.log.push((action.clone(), value));
    }

    fn enqueue_subscribers(&mut self, publisher: usize, value: &TaintedValue) {
        for i in 0..self.slots[publisher].subscribers.len() {
            let sub = self.slots[publisher].subscribers[i];
            self.queue.push_back((sub, value.clone()));
        }
    }
}

fn panic_message(payload: &(dyn Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_owned()
    }
}

/// Run one activation of the context or controller at `index` to
/// completion, including any nested pulls.
///
/// Never holds a borrow of the engine while implementation code runs.
fn run_activation(
    cell: &RefCell<Engine>,
    index: usize,
    input: Option<TaintedValue>,
) -> Result<Option<TaintedValue>, RuntimeError> {
    let (name, contract) = {
        let eng = cell.borrow();
        let slot = &eng.slots[index];
        let contract = slot
            .contract
            .clone()
            .expect("only contexts and controllers are activated");
        (slot.name.clone(), contract)
    };

    match (contract.activation, &input) {
        (None, None) => {}
        (Some(t), Some(v)) if v.value.data_type() == t => {}
        (expected, got) => {
            return Err(RuntimeError::ContractViolation {
                component: name,
                detail: format!(
                    "activation value {} does not match {}",
                    got.as_ref()
                        .map_or("absent".to_owned(), |v| v.value.data_type().to_string()),
                    expected.map_or("no argument".to_owned(), |t| t.to_string())
                ),
            })
        }
    }

    {
        let mut eng = cell.borrow_mut();
        eng.stats.activations += 1;
        eng.observe(TraceEvent::Activate {
            component: name.clone(),
            input: input.clone(),
        });
    }

    let Some(mut body) = cell.borrow_mut().impls[index].take() else {
        return Err(RuntimeError::ContractViolation {
            component: name,
            detail: "re-entered while already active".into(),
        });
    };

    let (acc, value) = match input {
        Some(tv) => (tv.taints, Some(tv.value)),
        None => (Taints::new(), None),
    };
    let frame = Frame {
        engine: cell,
        index,
        name: name.clone(),
        contract: contract.clone(),
        state: RefCell::new(FrameState {
            acc,
            continuation: None,
            error: None,
        }),
    };
    let returned = catch_unwind(AssertUnwindSafe(|| (body.0)(Args::new(&frame, value))));
    cell.borrow_mut().impls[index] = Some(body);

    let returned = match returned {
        Ok(r) => r,
        Err(payload) => {
            return Err(RuntimeError::ImplementationPanic {
                component: name,
                message: panic_message(payload.as_ref()),
            })
        }
    };

    let state = frame.state.into_inner();
    if let Some(err) = state.error {
        return Err(err);
    }
    let violation = |detail: String| RuntimeError::ContractViolation {
        component: name.clone(),
        detail,
    };
    match contract.result {
        ResultKind::NoReturn => {
            let committed =
                state
                    .continuation
                    .ok_or_else(|| RuntimeError::NoContinuationCalled {
                        component: name.clone(),
                    })?;
            let mut eng = cell.borrow_mut();
            eng.stats.no_return_completed += 1;
            eng.stats.continuations_committed += 1;
            match committed {
                Committed::Publish(v) => {
                    let tv = TaintedValue::new(v, state.acc);
                    eng.observe(TraceEvent::Publish {
                        component: name.clone(),
                        value: tv.clone(),
                    });
                    eng.enqueue_subscribers(frame.index, &tv);
                }
                Committed::NoPublish => eng.observe(TraceEvent::NoPublish {
                    component: name.clone(),
                }),
            }
            Ok(None)
        }
        ResultKind::ReturnsValue(t) => match returned {
            Ok(Some(v)) if v.data_type() == t => {
                let tv = TaintedValue::new(v, state.acc);
                cell.borrow_mut().observe(TraceEvent::Return {
                    component: name.clone(),
                    value: tv.clone(),
                });
                Ok(Some(tv))
            }
            Ok(Some(v)) => Err(violation(format!(
                "returned {}, contract requires {t}",
                v.data_type()
            ))),
            Ok(None) | Err(_) => Err(violation(format!(
                "returned no value, contract requires {t}"
            ))),
        },
        ResultKind::ReturnsNothing => match returned {
            Ok(None) => Ok(None),
            Ok(Some(v)) => Err(violation(format!(
                "returned {}, controllers return nothing",
                v.data_type()
            ))),
            Err(_) => Err(violation("halted without a cause".into())),
        },
    }
}

pub struct Runtime {
    spec: Specification,
    contracts: BTreeMap<ComponentName, BoundaryContract>,
    engine: RefCell<Engine>,
    sealed: bool,
    halted: Option<ComponentName>,
}

impl std::fmt::Debug for Runtime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Runtime")
            .field("components", &self.spec.declarations.len())
            .field("sealed", &self.sealed)
            .field("halted", &self.halted)
            .finish()
    }
}

impl Runtime {
    /// Build an unsealed runtime, deriving every boundary contract.
    pub fn new(spec: Specification) -> Result<Self, RuntimeError> {
        let diagnostics = validate(&spec);
        if !diagnostics.is_empty() {
            return Err(RuntimeError::InvalidSpec(diagnostics));
        }

        let index: HashMap<ComponentName, usize> = spec
            .declarations
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name().clone(), i))
            .collect();
        let mut contracts = BTreeMap::new();
        let mut slots: Vec<Slot> = spec
            .declarations
            .iter()
            .map(|d| {
                let contract = match d.kind() {
                    DeclKind::Context | DeclKind::Controller => Some(
                        derive_contract(&spec, d.name().as_str())
                            .expect("validated spec has total contracts"),
                    ),
                    _ => None,
                };
                if let Some(c) = &contract {
                    contracts.insert(d.name().clone(), c.clone());
                }
                let ty = match d {
                    Declaration::Action { in_type, .. } => Some(*in_type),
                    other => other.output_type(),
                };
                Slot {
                    name: d.name().clone(),
                    kind: d.kind(),
                    ty,
                    contract,
                    subscribers: Vec::new(),
                }
            })
            .collect();
        for (i, d) in spec.declarations.iter().enumerate() {
            if let Some(trigger) = d.trigger() {
                slots[index[trigger]].subscribers.push(i);
            }
        }

        let n = slots.len();
        Ok(Runtime {
            spec,
            contracts,
            engine: RefCell::new(Engine {
                slots,
                index,
                impls: (0..n).map(|_| None).collect(),
                registered: vec![false; n],
                sources: (0..n).map(|_| None).collect(),
                sinks: (0..n).map(|_| None).collect(),
                queue: VecDeque::new(),
                log: Vec::new(),
                observer: None,
                stats: Stats::default(),
            }),
            sealed: false,
            halted: None,
        })
    }

    pub fn spec(&self) -> &Specification {
        &self.spec
    }

    /// Boundary contracts of all contexts and controllers, by name.
    pub fn contracts(&self) -> &BTreeMap<ComponentName, BoundaryContract> {
        &self.contracts
    }

    pub fn contract(&self, name: &str) -> Option<&BoundaryContract> {
        self.contracts.get(name)
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn stats(&self) -> Stats {
        self.engine.borrow().stats
    }

    /// Every action delivery so far, in delivery order.
    pub fn action_log(&self) -> Vec<(ComponentName, TaintedValue)> {
        self.engine.borrow().log.clone()
    }

    /// Install a callback receiving every [`TraceEvent`] as it happens.
    pub fn set_observer(&mut self, observer: impl FnMut(&TraceEvent) + 'static) {
        self.engine.get_mut().observer = Some(Box::new(observer));
    }

    fn slot_of(&self, name: &str, expected: &'static str) -> Result<usize, RuntimeError> {
        self.spec
            .position(name)
            .ok_or_else(|| RuntimeError::UndeclaredComponent(name.to_owned(), expected))
    }

    fn name_at(&self, i: usize) -> ComponentName {
        self.spec.declarations[i].name().clone()
    }

    fn wrong_kind(&self, i: usize, expected: &'static str) -> RuntimeError {
        RuntimeError::WrongKind {
            name: self.name_at(i),
            expected,
            found: self.spec.declarations[i].kind(),
        }
    }

    pub fn register(
        &mut self,
        name: &str,
        implementation: Implementation,
    ) -> Result<(), RuntimeError> {
        if self.sealed {
            return Err(RuntimeError::Sealed);
        }
        let undeclared =
            || RuntimeError::UndeclaredComponent(name.to_owned(), "context or controller");
        let i = self.spec.position(name).ok_or_else(undeclared)?;
        if !matches!(
            self.spec.declarations[i].kind(),
            DeclKind::Context | DeclKind::Controller
        ) {
            return Err(undeclared());
        }
        let eng = self.engine.get_mut();
        if eng.registered[i] {
            return Err(RuntimeError::DuplicateImplementation(self.name_at(i)));
        }
        eng.registered[i] = true;
        eng.impls[i] = Some(implementation);
        Ok(())
    }

    pub fn bind_source(
        &mut self,
        name: &str,
        provider: impl SourceProvider + 'static,
    ) -> Result<(), RuntimeError> {
        if self.sealed {
            return Err(RuntimeError::Sealed);
        }
        let i = self.slot_of(name, "source")?;
        if self.spec.declarations[i].kind() != DeclKind::Source {
            return Err(self.wrong_kind(i, "source"));
        }
        let slot = &mut self.engine.get_mut().sources[i];
        if slot.is_some() {
            return Err(RuntimeError::DuplicateBinding(self.name_at(i)));
        }
        *slot = Some(Box::new(provider));
        Ok(())
    }

    pub fn bind_action(
        &mut self,
        name: &str,
        sink: impl ActionSink + 'static,
    ) -> Result<(), RuntimeError> {
        if self.sealed {
            return Err(RuntimeError::Sealed);
        }
        let i = self.slot_of(name, "action")?;
        if self.spec.declarations[i].kind() != DeclKind::Action {
            return Err(self.wrong_kind(i, "action"));
        }
        let slot = &mut self.engine.get_mut().sinks[i];
        if slot.is_some() {
            return Err(RuntimeError::DuplicateBinding(self.name_at(i)));
        }
        *slot = Some(Box::new(sink));
        Ok(())
    }

    /// Check completeness and freeze the registry.
    pub fn seal(&mut self) -> Result<(), RuntimeError> {
        if self.sealed {
            return Err(RuntimeError::Sealed);
        }
        let eng = self.engine.get_mut();
        let mut missing_impl = Vec::new();
        let mut missing_binding = Vec::new();
        for (i, d) in self.spec.declarations.iter().enumerate() {
            match d.kind() {
                DeclKind::Context | DeclKind::Controller if !eng.registered[i] => {
                    missing_impl.push(d.name().clone())
                }
                DeclKind::Source if eng.sources[i].is_none() => {
                    missing_binding.push(d.name().clone())
                }
                DeclKind::Action if eng.sinks[i].is_none() => {
                    missing_binding.push(d.name().clone())
                }
                _ => {}
            }
        }
        if !missing_impl.is_empty() {
            return Err(RuntimeError::MissingImplementation(missing_impl));
        }
        if !missing_binding.is_empty() {
            return Err(RuntimeError::MissingBinding(missing_binding));
        }
        let cycle = publish_cycle_members(&self.spec);
        if !cycle.is_empty() {
            return Err(RuntimeError::SealCycle(cycle));
        }
        self.sealed = true;
        Ok(())
    }

    fn ready_source(&self, name: &str, value: &Value) -> Result<usize, RuntimeError> {
        if !self.sealed {
            return Err(RuntimeError::Unsealed);
        }
        if let Some(c) = &self.halted {
            return Err(RuntimeError::Halted(c.clone()));
        }
        let i = self.slot_of(name, "source")?;
        if self.spec.declarations[i].kind() != DeclKind::Source {
            return Err(self.wrong_kind(i, "source"));
        }
        let expected = self.engine.borrow().slots[i].ty.expect("sources are typed");
        if value.data_type() != expected {
            return Err(RuntimeError::TypeMismatch {
                component: self.name_at(i),
                expected,
                found: value.data_type(),
            });
        }
        Ok(i)
    }

    /// Update what pulls of `source` observe, without publishing.
    pub fn set_source(&mut self, source: &str, value: Value) -> Result<(), RuntimeError> {
        let i = self.ready_source(source, &value)?;
        if let Some(p) = self.engine.get_mut().sources[i].as_mut() {
            p.update(value);
        }
        Ok(())
    }

    /// Publish `value` from `source` and dispatch until quiescent.
    pub fn emit(&mut self, source: &str, value: Value) -> Result<(), RuntimeError> {
        let i = self.ready_source(source, &value)?;
        let name = self.name_at(i);
        {
            let eng = self.engine.get_mut();
            if let Some(p) = eng.sources[i].as_mut() {
                p.update(value.clone());
            }
            let tv = TaintedValue::from_source(value, &name);
            eng.observe(TraceEvent::Emit {
                source: name,
                value: tv.clone(),
            });
            eng.enqueue_subscribers(i, &tv);
        }
        self.drain()
    }

    fn drain(&mut self) -> Result<(), RuntimeError> {
        loop {
            let next = self.engine.get_mut().queue.pop_front();
            let Some((index, input)) = next else {
                return Ok(());
            };
            if let Err(err) = run_activation(&self.engine, index, Some(input)) {
                self.engine.get_mut().queue.clear();
                if let RuntimeError::ImplementationPanic { component, .. } = &err {
                    self.halted = Some(component.clone());
                }
                return Err(err);
            }
        }
    }
}

pub fn create_runtime(spec: Specification) -> Result<Runtime, RuntimeError> {
    Runtime::new(spec)
}

/// Contexts lying on a cycle of when-provided triggers.
fn publish_cycle_members(spec: &Specification) -> Vec<ComponentName> {
    let trigger_of = |i: usize| -> Option<usize> {
        match &spec.declarations[i] {
            d @ Declaration::Context { .. } => spec.position(d.trigger()?.as_str()),
            _ => None,
        }
    };
    let n = spec.declarations.len();
    (0..n)
        .filter(|&start| {
            let mut cur = start;
            for _ in 0..n {
                match trigger_of(cur) {
                    Some(t) if t == start => return true,
                    Some(t) => cur = t,
                    None => return false,
                }
            }
            false
        })
        .map(|i| spec.declarations[i].name().clone())
        .collect()
}
