//! Random valid specifications, implementations built from a few
//! combinators, and a driver that checks every observed value against the
//! static flow graph.
#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use scc::contract::{Continuations, ResultKind};
use scc::runtime::TraceEvent;
use scc::sim::{PictureData, RecordingSink, ScriptedSource};
use scc::spec::{InteractionContract, PublishSpec};
use scc::{
    build_flow_graph, source_ancestors, validate, ComponentName, DataType, Declaration,
    Implementation, Runtime, Specification, Value,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn name(prefix: &str, i: usize) -> ComponentName {
    ComponentName::new(format!("{prefix}{i}")).unwrap()
}

fn any_type(rng: &mut impl Rng) -> DataType {
    *DataType::ALL.choose(rng).unwrap()
}

/// A valid specification. References only point at earlier declarations,
/// so there are no cycles; the result is shuffled afterwards.
pub fn random_spec(rng: &mut impl Rng) -> Specification {
    let mut decls = Vec::new();
    let mut triggers = Vec::new();
    let mut pullable = Vec::new();
    let mut providers = Vec::new();

    for i in 0..rng.gen_range(1..=3) {
        let n = name("S", i);
        triggers.push(n.clone());
        pullable.push(n.clone());
        decls.push(Declaration::Source {
            name: n,
            out_type: any_type(rng),
        });
    }
    let actions: Vec<_> = (0..rng.gen_range(1..=2)).map(|i| name("A", i)).collect();
    for a in &actions {
        decls.push(Declaration::Action {
            name: a.clone(),
            in_type: any_type(rng),
        });
    }
    for i in 0..rng.gen_range(1..=6) {
        let n = name("C", i);
        let get = if rng.gen_bool(0.6) {
            Some(pullable.choose(rng).unwrap().clone())
        } else {
            None
        };
        let contract = if rng.gen_bool(0.35) {
            pullable.push(n.clone());
            InteractionContract::when_required(get)
        } else {
            let publish = if rng.gen_bool(0.5) {
                PublishSpec::AlwaysPublish
            } else {
                PublishSpec::MaybePublish
            };
            let trigger = triggers.choose(rng).unwrap().clone();
            triggers.push(n.clone());
            providers.push(n.clone());
            InteractionContract::when_provided(trigger, get, publish)
        };
        decls.push(Declaration::Context {
            name: n,
            out_type: any_type(rng),
            contract,
        });
    }
    if !providers.is_empty() {
        for i in 0..rng.gen_range(0..=3) {
            decls.push(Declaration::Controller {
                name: name("K", i),
                trigger: providers.choose(rng).unwrap().clone(),
                action: actions.choose(rng).unwrap().clone(),
            });
        }
    }
    decls.shuffle(rng);
    let spec = Specification::new(decls);
    assert!(
        validate(&spec).is_empty(),
        "generator produced an invalid spec"
    );
    spec
}

fn fingerprint(parts: &[&Value], salt: u64) -> u64 {
    let mut h = DefaultHasher::new();
    salt.hash(&mut h);
    for p in parts {
        p.to_string().hash(&mut h);
    }
    h.finish()
}

/// Deterministically squeeze `parts` into a value of type `t`.
pub fn coerce(parts: &[&Value], salt: u64, t: DataType) -> Value {
    let fp = fingerprint(parts, salt);
    match t {
        DataType::Bool => Value::Bool(fp.is_multiple_of(2)),
        DataType::Int => Value::Int((fp % 1000) as i64 - 500),
        DataType::String => Value::String(format!("s{}", fp % 97)),
        DataType::Picture => Value::Picture(
            PictureData::new(1 + (fp % 64) as u32, 1 + (fp / 64 % 64) as u32, fp % 10_000).unwrap(),
        ),
    }
}

pub fn random_value(rng: &mut impl Rng, t: DataType) -> Value {
    match t {
        DataType::Bool => Value::Bool(rng.gen()),
        DataType::Int => Value::Int(rng.gen_range(-1000..1000)),
        DataType::String => {
            let len = rng.gen_range(0..6);
            Value::String((0..len).map(|_| rng.gen_range('a'..='z')).collect())
        }
        DataType::Picture => Value::Picture(
            PictureData::new(
                rng.gen_range(1..100),
                rng.gen_range(1..100),
                rng.gen_range(0..1000),
            )
            .unwrap(),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Plan {
    Constant,
    PassThrough,
    PullCombine,
    /// Skip publishing (or acting) for about half the inputs.
    Conditional,
}

fn build_implementation(
    spec: &Specification,
    decl: &Declaration,
    rt: &Runtime,
    rng: &mut impl Rng,
) -> Implementation {
    let contract = rt.contract(decl.name().as_str()).unwrap().clone();
    let salt: u64 = rng.gen();
    match decl {
        Declaration::Controller { action, .. } => {
            let input = spec.input_type_of(action.as_str()).unwrap();
            let times = rng.gen_range(0..=2usize);
            let conditional = rng.gen_bool(0.3);
            Implementation::new(move |args| {
                let v = args.input()?.clone();
                if conditional && fingerprint(&[&v], salt).is_multiple_of(2) {
                    return Ok(None);
                }
                for i in 0..times {
                    args.act(coerce(&[&v], salt + i as u64, input))?;
                }
                Ok(None)
            })
        }
        Declaration::Context { out_type, .. } => {
            let out = *out_type;
            let maybe = matches!(contract.continuations, Continuations::PublishMaybe(_));
            let plans: &[Plan] = match (contract.result, maybe) {
                (ResultKind::ReturnsValue(_), _) => &[Plan::Constant, Plan::PullCombine],
                (_, true) => &[
                    Plan::Constant,
                    Plan::PassThrough,
                    Plan::PullCombine,
                    Plan::Conditional,
                ],
                _ => &[Plan::Constant, Plan::PassThrough, Plan::PullCombine],
            };
            let plan = *plans.choose(rng).unwrap();
            let can_pull = contract.capability.is_some();
            let returns = matches!(contract.result, ResultKind::ReturnsValue(_));
            Implementation::new(move |args| {
                let input = args.activation.clone();
                let mut parts: Vec<Value> = input.iter().cloned().collect();
                match plan {
                    Plan::Constant => parts.clear(),
                    Plan::PassThrough => {}
                    Plan::PullCombine | Plan::Conditional => {
                        if let Some(v) = &input {
                            if plan == Plan::Conditional
                                && fingerprint(&[v], salt).is_multiple_of(2)
                            {
                                return args.nopublish();
                            }
                        }
                        if can_pull {
                            parts.push(args.get()?);
                        }
                    }
                }
                let refs: Vec<&Value> = parts.iter().collect();
                let v = coerce(&refs, salt, out);
                if returns {
                    Ok(Some(v))
                } else {
                    args.publish(v)
                }
            })
        }
        _ => unreachable!(),
    }
}

/// A sealed runtime over `spec` with random implementations.
pub fn random_runtime(spec: &Specification, rng: &mut impl Rng) -> Runtime {
    let mut rt = Runtime::new(spec.clone()).unwrap();
    for d in &spec.declarations {
        match d {
            Declaration::Source { name, .. } => rt
                .bind_source(name.as_str(), ScriptedSource::new())
                .unwrap(),
            Declaration::Action { name, .. } => {
                rt.bind_action(name.as_str(), RecordingSink::new()).unwrap()
            }
            _ => {
                let imp = build_implementation(spec, d, &rt, rng);
                rt.register(d.name().as_str(), imp).unwrap();
            }
        }
    }
    rt.seal().unwrap();
    rt
}

#[derive(Debug, Default, Clone)]
pub struct TaintReport {
    pub specs: usize,
    pub emissions: usize,
    pub observations: usize,
    pub deliveries: usize,
    pub violations: Vec<String>,
}

/// Run `specs` random specifications with `emissions` emits each (after
/// every source has been set once), checking each received value's taints
/// against the static ancestors of its receiver, and that every
/// no-return activation ended in exactly one continuation.
pub fn taint_campaign(seed: u64, specs: usize, emissions: usize) -> TaintReport {
    let mut rng = rng(seed);
    let mut report = TaintReport::default();
    for round in 0..specs {
        let spec = random_spec(&mut rng);
        let graph = build_flow_graph(&spec);
        let mut rt = random_runtime(&spec, &mut rng);
        let events = Rc::new(RefCell::new(Vec::<TraceEvent>::new()));
        let sink = Rc::clone(&events);
        rt.set_observer(move |e| sink.borrow_mut().push(e.clone()));

        let sources: Vec<_> = spec
            .declarations
            .iter()
            .filter_map(|d| match d {
                Declaration::Source { name, out_type } => Some((name.clone(), *out_type)),
                _ => None,
            })
            .collect();
        for (s, t) in &sources {
            rt.set_source(s.as_str(), random_value(&mut rng, *t))
                .unwrap();
        }
        for _ in 0..emissions {
            let (s, t) = sources.choose(&mut rng).unwrap();
            if let Err(e) = rt.emit(s.as_str(), random_value(&mut rng, *t)) {
                report
                    .violations
                    .push(format!("spec #{round}: emit failed: {e}"));
            }
            report.emissions += 1;
        }

        let mut activated: BTreeMap<ComponentName, usize> = BTreeMap::new();
        let mut ended: BTreeMap<ComponentName, usize> = BTreeMap::new();
        for ev in events.borrow().iter() {
            if let Some((receiver, tv)) = ev.received() {
                report.observations += 1;
                let allowed = source_ancestors(&graph, receiver.as_str()).unwrap();
                if !tv.taints.is_subset(&allowed) {
                    report
                        .violations
                        .push(format!("spec #{round}: {ev} exceeds ancestors {allowed:?}"));
                }
            }
            match ev {
                TraceEvent::Activate { component, .. }
                    if rt.contract(component.as_str()).unwrap().result == ResultKind::NoReturn =>
                {
                    *activated.entry(component.clone()).or_default() += 1;
                }
                TraceEvent::Publish { component, .. } | TraceEvent::NoPublish { component } => {
                    *ended.entry(component.clone()).or_default() += 1;
                }
                TraceEvent::Deliver { .. } => report.deliveries += 1,
                _ => {}
            }
        }
        if activated != ended {
            report.violations.push(format!(
                "spec #{round}: activations {activated:?} vs continuations {ended:?}"
            ));
        }
        report.specs += 1;
    }
    report
}
