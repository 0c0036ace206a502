use std::cell::RefCell;
use std::rc::Rc;

use crate::runtime::{ActionSink, SourceProvider};
use crate::value::Value;

/// Source whose current value is whatever was last set.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSource {
    current: Option<Value>,
}

impl ScriptedSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_value(v: Value) -> Self {
        ScriptedSource { current: Some(v) }
    }
}

impl SourceProvider for ScriptedSource {
    fn current(&mut self) -> Option<Value> {
        self.current.clone()
    }

    fn update(&mut self, value: Value) {
        self.current = Some(value);
    }
}

/// Action sink that remembers every delivery. Clones share one recording.
#[derive(Debug, Clone, Default)]
pub struct RecordingSink {
    deliveries: Rc<RefCell<Vec<Value>>>,
}

impl RecordingSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn deliveries(&self) -> Vec<Value> {
        self.deliveries.borrow().clone()
    }

    pub fn len(&self) -> usize {
        self.deliveries.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ActionSink for RecordingSink {
    fn deliver(&mut self, value: &Value) {
        self.deliveries.borrow_mut().push(value.clone());
    }
}
