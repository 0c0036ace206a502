//! What an implementation receives when it is activated.
//!
//! An activation is handed an [`Args`]: the activation value, the single
//! capability its contract grants, and its continuations. Handles borrow the
//! activation frame, so they cannot outlive the call. Calling a continuation
//! ends the activation: any later handle use fails with `STALE_HANDLE`, and a
//! second continuation fails with `DOUBLE_CONTINUATION`.

use std::cell::RefCell;
use std::fmt;

use super::{Engine, RuntimeError, TraceEvent};
use crate::contract::{BoundaryContract, CapabilityKind, Continuations};
use crate::spec::{ComponentName, DeclKind};
use crate::value::{TaintedValue, Taints, Value};

/// Proof that an activation stopped early: a continuation was taken or a
/// handle failed. Only the runtime creates these; implementations pass them
/// back out with `?` or `Err`.
pub struct Halt {
    _private: (),
}

impl fmt::Debug for Halt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Halt")
    }
}

/// Return type of every implementation body.
///
/// `Ok(Some(v))` returns `v` (when-required contexts), `Ok(None)` returns
/// nothing (controllers), and `Err(Halt)` leaves through a continuation or
/// propagates a failed handle.
pub type Outcome = Result<Option<Value>, Halt>;

type Body = dyn FnMut(Args<'_>) -> Outcome;

pub struct Implementation(pub(super) Box<Body>);

impl Implementation {
    pub fn new(body: impl FnMut(Args<'_>) -> Outcome + 'static) -> Self {
        Implementation(Box::new(body))
    }
}

impl fmt::Debug for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Implementation")
    }
}

pub(super) enum Committed {
    Publish(Value),
    NoPublish,
}

pub(super) struct FrameState {
    pub(super) acc: Taints,
    pub(super) continuation: Option<Committed>,
    pub(super) error: Option<RuntimeError>,
}

pub(super) struct Frame<'a> {
    pub(super) engine: &'a RefCell<Engine>,
    pub(super) index: usize,
    pub(super) name: ComponentName,
    pub(super) contract: BoundaryContract,
    pub(super) state: RefCell<FrameState>,
}

impl Frame<'_> {
    fn fail(&self, err: RuntimeError) -> Halt {
        let mut st = self.state.borrow_mut();
        if st.error.is_none() {
            st.error = Some(err);
        }
        Halt { _private: () }
    }

    fn violation(&self, detail: impl Into<String>) -> Halt {
        self.fail(RuntimeError::ContractViolation {
            component: self.name.clone(),
            detail: detail.into(),
        })
    }

    /// Fails if the activation already failed or has ended.
    fn live(&self) -> Result<(), Halt> {
        let st = self.state.borrow();
        if st.error.is_some() {
            return Err(Halt { _private: () });
        }
        let ended = st.continuation.is_some();
        drop(st);
        if ended {
            return Err(self.fail(RuntimeError::StaleHandle {
                component: self.name.clone(),
            }));
        }
        Ok(())
    }

    fn pull(&self) -> Result<Value, Halt> {
        self.live()?;
        let Some(cap) = &self.contract.capability else {
            return Err(self.violation("no get capability was granted"));
        };
        let CapabilityKind::Get { result } = cap.kind else {
            return Err(self.violation("no get capability was granted"));
        };
        let target = self.engine.borrow().index_of(&cap.target);
        let target_kind = self.engine.borrow().slots[target].kind;
        let received = match target_kind {
            DeclKind::Source => {
                let current = self.engine.borrow_mut().current_value(target);
                match current {
                    Some(v) => TaintedValue::from_source(v, &cap.target),
                    None => {
                        return Err(self.fail(RuntimeError::PullBeforeValue {
                            component: self.name.clone(),
                            source_name: cap.target.clone(),
                        }))
                    }
                }
            }
            _ => match super::run_activation(self.engine, target, None) {
                Ok(Some(v)) => v,
                Ok(None) => {
                    return Err(self.fail(RuntimeError::ContractViolation {
                        component: cap.target.clone(),
                        detail: "pulled component produced no value".into(),
                    }))
                }
                Err(e) => return Err(self.fail(e)),
            },
        };
        if received.value.data_type() != result {
            return Err(self.fail(RuntimeError::ContractViolation {
                component: cap.target.clone(),
                detail: format!(
                    "pull answered with {}, expected {result}",
                    received.value.data_type()
                ),
            }));
        }
        self.state
            .borrow_mut()
            .acc
            .extend(received.taints.iter().cloned());
        self.engine.borrow_mut().observe(TraceEvent::Pull {
            puller: self.name.clone(),
            target: cap.target.clone(),
            value: received.clone(),
        });
        Ok(received.value)
    }

    fn act(&self, value: Value) -> Result<(), Halt> {
        self.live()?;
        let Some(cap) = &self.contract.capability else {
            return Err(self.violation("no do capability was granted"));
        };
        let CapabilityKind::Do { input } = cap.kind else {
            return Err(self.violation("no do capability was granted"));
        };
        if value.data_type() != input {
            return Err(self.violation(format!(
                "`{}` takes {input}, got {}",
                cap.target,
                value.data_type()
            )));
        }
        let delivered = TaintedValue::new(value, self.state.borrow().acc.clone());
        self.engine
            .borrow_mut()
            .deliver(&self.name, &cap.target, delivered);
        Ok(())
    }

    fn take_continuation(&self, committed: Committed) -> Outcome {
        {
            let st = self.state.borrow();
            if st.error.is_some() {
                return Err(Halt { _private: () });
            }
            if st.continuation.is_some() {
                drop(st);
                return Err(self.fail(RuntimeError::DoubleContinuation {
                    component: self.name.clone(),
                }));
            }
        }
        let granted = match (&committed, self.contract.continuations) {
            (
                Committed::Publish(v),
                Continuations::PublishAlways(t) | Continuations::PublishMaybe(t),
            ) => {
                if v.data_type() != t {
                    return Err(self.violation(format!(
                        "published {}, contract requires {t}",
                        v.data_type()
                    )));
                }
                true
            }
            (Committed::NoPublish, Continuations::PublishMaybe(_)) => true,
            _ => false,
        };
        if !granted {
            let which = match committed {
                Committed::Publish(_) => "publish",
                Committed::NoPublish => "nopublish",
            };
            return Err(self.violation(format!("no {which} continuation was granted")));
        }
        self.state.borrow_mut().continuation = Some(committed);
        Err(Halt { _private: () })
    }
}

/// Everything an activation may touch, in contract order.
pub struct Args<'a> {
    pub activation: Option<Value>,
    pub capability: Option<CapabilityHandle<'a>>,
    pub continuations: ContinuationHandles<'a>,
    frame: &'a Frame<'a>,
}

pub enum CapabilityHandle<'a> {
    Get(GetHandle<'a>),
    Do(DoHandle<'a>),
}

pub enum ContinuationHandles<'a> {
    None,
    Always {
        publish: PublishHandle<'a>,
    },
    Maybe {
        publish: PublishHandle<'a>,
        nopublish: NoPublishHandle<'a>,
    },
}

/// Pull access to one declared component. Takes no arguments.
#[derive(Clone, Copy)]
pub struct GetHandle<'a>(&'a Frame<'a>);

/// Command access to one declared action.
#[derive(Clone, Copy)]
pub struct DoHandle<'a>(&'a Frame<'a>);

#[derive(Clone, Copy)]
pub struct PublishHandle<'a>(&'a Frame<'a>);

#[derive(Clone, Copy)]
pub struct NoPublishHandle<'a>(&'a Frame<'a>);

impl GetHandle<'_> {
    pub fn call(&self) -> Result<Value, Halt> {
        self.0.pull()
    }
}

impl DoHandle<'_> {
    pub fn call(&self, value: Value) -> Result<(), Halt> {
        self.0.act(value)
    }
}

impl PublishHandle<'_> {
    pub fn call(&self, value: Value) -> Outcome {
        self.0.take_continuation(Committed::Publish(value))
    }
}

impl NoPublishHandle<'_> {
    pub fn call(&self) -> Outcome {
        self.0.take_continuation(Committed::NoPublish)
    }
}

impl<'a> Args<'a> {
    pub(super) fn new(frame: &'a Frame<'a>, activation: Option<Value>) -> Self {
        let capability = frame.contract.capability.as_ref().map(|c| match c.kind {
            CapabilityKind::Get { .. } => CapabilityHandle::Get(GetHandle(frame)),
            CapabilityKind::Do { .. } => CapabilityHandle::Do(DoHandle(frame)),
        });
        let continuations = match frame.contract.continuations {
            Continuations::None => ContinuationHandles::None,
            Continuations::PublishAlways(_) => ContinuationHandles::Always {
                publish: PublishHandle(frame),
            },
            Continuations::PublishMaybe(_) => ContinuationHandles::Maybe {
                publish: PublishHandle(frame),
                nopublish: NoPublishHandle(frame),
            },
        };
        Args {
            activation,
            capability,
            continuations,
            frame,
        }
    }

    /// Name of the component being activated.
    pub fn component(&self) -> &ComponentName {
        &self.frame.name
    }

    /// The activation value; fails for components activated by pull.
    pub fn input(&self) -> Result<&Value, Halt> {
        self.activation.as_ref().ok_or_else(|| {
            self.frame
                .violation("no activation value: activated by pull")
        })
    }

    /// Invoke the get capability.
    pub fn get(&self) -> Result<Value, Halt> {
        self.frame.pull()
    }

    /// Invoke the do capability.
    pub fn act(&self, value: Value) -> Result<(), Halt> {
        self.frame.act(value)
    }

    pub fn publish(&self, value: Value) -> Outcome {
        self.frame.take_continuation(Committed::Publish(value))
    }

    pub fn nopublish(&self) -> Outcome {
        self.frame.take_continuation(Committed::NoPublish)
    }
}
