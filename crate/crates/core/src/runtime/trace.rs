use std::fmt;

use crate::spec::ComponentName;
use crate::value::TaintedValue;

/// Something observable that happened while dispatching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Emit {
        source: ComponentName,
        value: TaintedValue,
    },
    Activate {
        component: ComponentName,
        input: Option<TaintedValue>,
    },
    Pull {
        puller: ComponentName,
        target: ComponentName,
        value: TaintedValue,
    },
    Return {
        component: ComponentName,
        value: TaintedValue,
    },
    Publish {
        component: ComponentName,
        value: TaintedValue,
    },
    NoPublish {
        component: ComponentName,
    },
    Deliver {
        controller: ComponentName,
        action: ComponentName,
        value: TaintedValue,
    },
}

impl TraceEvent {
    /// The component that receives a value in this event, with that value.
    pub fn received(&self) -> Option<(&ComponentName, &TaintedValue)> {
        match self {
            TraceEvent::Activate {
                component,
                input: Some(v),
            } => Some((component, v)),
            TraceEvent::Pull { puller, value, .. } => Some((puller, value)),
            TraceEvent::Deliver { action, value, .. } => Some((action, value)),
            _ => None,
        }
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Emit { source, value } => write!(f, "emit {source} <- {value}"),
            TraceEvent::Activate {
                component,
                input: Some(v),
            } => write!(f, "activate {component} <- {v}"),
            TraceEvent::Activate {
                component,
                input: None,
            } => write!(f, "activate {component}"),
            TraceEvent::Pull {
                puller,
                target,
                value,
            } => write!(f, "pull {puller} <- {target}: {value}"),
            TraceEvent::Return { component, value } => write!(f, "return {component}: {value}"),
            TraceEvent::Publish { component, value } => write!(f, "publish {component}: {value}"),
            TraceEvent::NoPublish { component } => write!(f, "nopublish {component}"),
            TraceEvent::Deliver {
                controller,
                action,
                value,
            } => write!(f, "do {controller} -> {action}: {value}"),
        }
    }
}
