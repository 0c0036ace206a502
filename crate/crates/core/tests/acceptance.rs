//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::cell::RefCell;
use std::process::{Command, ExitCode};
use std::rc::Rc;
use std::time::Instant;

use rand::Rng;

use scc::runtime::TraceEvent;
use scc::sim::{format_scenario, make_picture, run_scenario, PictureData, Scenario, Step};
use scc::spec::{InteractionContract, PublishSpec};
use scc::webcam::{webcam_implementations, webcam_spec, WebcamApp, WEBCAM_SPEC};
use scc::{
    build_flow_graph, derive_contract, export, parse_str, pretty_print, render_contract,
    source_ancestors, validate, ComponentName, DataType, Declaration, ExportFormat, Implementation,
    Runtime, Specification, Value,
};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grammar_fidelity() -> Check {
    let spec = parse_str(WEBCAM_SPEC).map_err(|e| e.to_string())?;
    let diags = validate(&spec);
    ensure(diags.is_empty(), || format!("diagnostics: {diags:?}"))?;
    let again = parse_str(&pretty_print(&spec)).map_err(|e| e.to_string())?;
    ensure(again == spec, || {
        "pretty-print round trip changed the AST".into()
    })?;
    ensure(spec.declarations.len() == 7, || {
        "expected 7 declarations".into()
    })
}

fn contract_fidelity() -> Check {
    let c = derive_contract(&webcam_spec(), "ComposeDisplay").map_err(|e| format!("{e:?}"))?;
    let got = render_contract(&c);
    let want = "(-> picture? (-> string?) (-> picture? void?) (-> void?) none/c)";
    ensure(got == want, || format!("got {got}"))
}

fn validation_rules() -> Check {
    let n = |s: &str| ComponentName::new(s).unwrap();
    let webcam = webcam_spec();
    let replace = |name: &str, decl: Declaration| {
        let mut s = webcam.clone();
        let i = s.position(name).unwrap();
        s.declarations[i] = decl;
        s
    };
    let cases: Vec<(&str, Specification, &str)> = vec![
        (
            "pull target lacking when-required",
            replace(
                "ComposeDisplay",
                Declaration::Context {
                    name: n("ComposeDisplay"),
                    out_type: DataType::Picture,
                    contract: InteractionContract::when_provided(
                        n("ProcessPicture"),
                        Some(n("ProcessPicture")),
                        PublishSpec::MaybePublish,
                    ),
                },
            ),
            "PULL_NOT_REQUIRED",
        ),
        (
            "when-required with a publish spec",
            replace(
                "MakeAd",
                Declaration::Context {
                    name: n("MakeAd"),
                    out_type: DataType::String,
                    contract: InteractionContract {
                        publish: PublishSpec::AlwaysPublish,
                        ..InteractionContract::when_required(Some(n("IP")))
                    },
                },
            ),
            "BAD_PUBLISH_SPEC",
        ),
        (
            "unresolved reference",
            parse_str(
                "(define-source S Int) (define-context C Int [when-provided T always_publish])",
            )
            .unwrap(),
            "UNRESOLVED_REF",
        ),
        (
            "duplicate name",
            parse_str("(define-source Camera Picture) (define-source Camera Picture)").unwrap(),
            "DUP_NAME",
        ),
        (
            "get cycle",
            parse_str(
                "(define-context A Int [when-required get B])
                 (define-context B Int [when-required get A])",
            )
            .unwrap(),
            "GET_CYCLE",
        ),
    ];
    for (what, spec, want) in cases {
        let codes: Vec<_> = validate(&spec).iter().map(|d| d.code.as_str()).collect();
        ensure(
            !codes.is_empty() && codes.iter().all(|c| *c == want),
            || format!("{what}: expected only {want}, got {codes:?}"),
        )?;
    }
    // The text form of the publish rule is refused while parsing.
    let text = "(define-source IP String) (define-context MakeAd String [when-required get IP always_publish])";
    let err = parse_str(text)
        .err()
        .ok_or("publish spec after when-required parsed")?;
    ensure(err.to_string().contains("no publish specification"), || {
        err.to_string()
    })
}

fn demo_run(ad: &str) -> Result<Vec<(ComponentName, scc::TaintedValue)>, String> {
    let mut app = WebcamApp::new();
    app.runtime
        .set_source("IP", Value::from(ad))
        .map_err(|e| e.to_string())?;
    app.runtime
        .emit("Camera", make_picture(640, 480, 7).unwrap())
        .map_err(|e| e.to_string())?;
    Ok(app.runtime.action_log())
}

fn end_to_end_demo() -> Check {
    let log = demo_run("Ads Inc")?;
    ensure(log.len() == 1, || {
        format!("expected one delivery, got {}", log.len())
    })?;
    let (action, tv) = &log[0];
    let overlays = tv.value.as_picture().map(|p| p.overlays().to_vec());
    ensure(action.as_str() == "Screen", || {
        format!("delivered to {action}")
    })?;
    ensure(overlays == Some(vec!["Ads Inc".to_owned()]), || {
        format!("overlays {overlays:?}")
    })?;
    let taints: Vec<_> = tv.taints.iter().map(|t| t.as_str()).collect();
    ensure(taints == ["Camera", "IP"], || format!("taints {taints:?}"))?;
    let log = demo_run("")?;
    ensure(log.is_empty(), || {
        format!("empty ad delivered {} values", log.len())
    })
}

fn webcam_with(name: &str, imp: Implementation) -> Runtime {
    let mut rt = Runtime::new(webcam_spec()).unwrap();
    let mut imp = Some(imp);
    for (n, default) in webcam_implementations() {
        let chosen = if n == name {
            imp.take().unwrap()
        } else {
            default
        };
        rt.register(n, chosen).unwrap();
    }
    rt.bind_source("Camera", scc::sim::ScriptedSource::new())
        .unwrap();
    rt.bind_source(
        "IP",
        scc::sim::ScriptedSource::with_value(Value::from("ad")),
    )
    .unwrap();
    rt.bind_action("Screen", scc::sim::RecordingSink::new())
        .unwrap();
    rt.seal().unwrap();
    rt
}

fn continuation_discipline() -> Check {
    let mut rt = webcam_with("ProcessPicture", Implementation::new(|_| Ok(None)));
    let err = rt
        .emit("Camera", make_picture(4, 4, 1).unwrap())
        .unwrap_err();
    ensure(err.code() == "NO_CONTINUATION_CALLED", || err.to_string())?;

    let mut rt = webcam_with(
        "ProcessPicture",
        Implementation::new(|args| {
            let v = args.input()?.clone();
            let _ = args.publish(v.clone());
            args.publish(v)
        }),
    );
    let err = rt
        .emit("Camera", make_picture(4, 4, 1).unwrap())
        .unwrap_err();
    ensure(err.code() == "DOUBLE_CONTINUATION", || err.to_string())
}

fn completeness_checks() -> Check {
    let mut rt = Runtime::new(webcam_spec()).unwrap();
    for (n, imp) in webcam_implementations() {
        if n != "MakeAd" {
            rt.register(n, imp).unwrap();
        }
    }
    let err = rt.seal().unwrap_err();
    ensure(
        err.code() == "MISSING_IMPLEMENTATION" && err.to_string().contains("MakeAd"),
        || err.to_string(),
    )?;
    ensure(
        err == scc::RuntimeError::MissingImplementation(
            vec![ComponentName::new("MakeAd").unwrap()],
        ),
        || format!("{err:?}"),
    )?;
    let err = rt
        .register("Display", Implementation::new(|_| Ok(None)))
        .unwrap_err();
    ensure(err.code() == "DUPLICATE_IMPLEMENTATION", || err.to_string())
}

fn taint_soundness() -> Check {
    let report = common::taint_campaign(0xacce97, 500, 20);
    ensure(report.specs >= 500 && report.emissions >= 500 * 20, || {
        "campaign too small".into()
    })?;
    ensure(report.violations.is_empty(), || {
        format!(
            "{} violations, first: {}",
            report.violations.len(),
            report.violations[0]
        )
    })?;
    println!(
        "    {} specs, {} emissions, {} received values, {} deliveries checked",
        report.specs, report.emissions, report.observations, report.deliveries
    );
    Ok(())
}

fn random_webcam_scenario(rng: &mut impl Rng, steps: usize) -> Scenario {
    let n = |s: &str| ComponentName::new(s).unwrap();
    let mut out = vec![Step::Set {
        source: n("IP"),
        value: Value::from("Ads Inc"),
    }];
    for _ in 0..steps {
        out.push(if rng.gen_bool(0.3) {
            let ad = if rng.gen_bool(0.3) {
                String::new()
            } else {
                format!("ad {}", rng.gen_range(0..100))
            };
            Step::Set {
                source: n("IP"),
                value: Value::from(ad),
            }
        } else {
            let p = PictureData::new(rng.gen_range(1..2000), rng.gen_range(1..2000), rng.gen())
                .unwrap();
            Step::Emit {
                source: n("Camera"),
                value: Value::Picture(p),
            }
        });
    }
    Scenario { steps: out }
}

fn leak_freedom() -> Check {
    let graph = build_flow_graph(&webcam_spec());
    let ancestors = source_ancestors(&graph, "MakeAd").map_err(|e| e.to_string())?;
    ensure(!ancestors.iter().any(|s| s.as_str() == "Camera"), || {
        format!("static ancestors of MakeAd: {ancestors:?}")
    })?;

    let mut rng = common::rng(8);
    let mut seen = 0;
    for _ in 0..200 {
        let sc = random_webcam_scenario(&mut rng, 25);
        let mut app = WebcamApp::new();
        let events = Rc::new(RefCell::new(Vec::new()));
        let sink = Rc::clone(&events);
        app.runtime
            .set_observer(move |e: &TraceEvent| sink.borrow_mut().push(e.clone()));
        run_scenario(&mut app.runtime, &sc).map_err(|e| e.to_string())?;
        for ev in events.borrow().iter() {
            let reaching = match ev {
                TraceEvent::Pull { puller, value, .. } if puller.as_str() == "MakeAd" => {
                    Some(value)
                }
                TraceEvent::Return { component, value } if component.as_str() == "MakeAd" => {
                    Some(value)
                }
                _ => None,
            };
            if let Some(v) = reaching {
                seen += 1;
                ensure(!v.taints.iter().any(|t| t.as_str() == "Camera"), || {
                    format!("Camera-tainted value at MakeAd: {ev}")
                })?;
            }
        }
    }
    ensure(seen > 0, || "MakeAd was never exercised".into())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = common::rng(9);
    let mut scenarios = vec![None];
    for i in 0..3 {
        let p = dir.path().join(format!("s{i}.scn"));
        std::fs::write(&p, format_scenario(&random_webcam_scenario(&mut rng, 15)))
            .map_err(|e| e.to_string())?;
        scenarios.push(Some(p));
    }
    for sc in &scenarios {
        let mut args = vec!["demo".to_owned(), "--trace".to_owned()];
        if let Some(p) = sc {
            args.push("--scenario".into());
            args.push(p.display().to_string());
        }
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_scc"))
                .args(&args)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        ensure(a.status.success(), || {
            String::from_utf8_lossy(&a.stderr).into_owned()
        })?;
        ensure(a.stdout == b.stdout && a.stderr == b.stderr, || {
            format!("CLI output differs for {args:?}")
        })?;

        if let Some(p) = sc {
            let text = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
            let sc = scc::sim::parse_scenario(&text).map_err(|e| e.to_string())?;
            let log = || {
                let mut app = WebcamApp::new();
                run_scenario(&mut app.runtime, &sc).map(|_| app.runtime.action_log())
            };
            ensure(log() == log(), || "action logs differ".into())?;
        }
    }
    Ok(())
}

fn export_stability() -> Check {
    let g = build_flow_graph(&webcam_spec());
    let dot = export(&g, ExportFormat::Dot);
    let json = export(&g, ExportFormat::Json);
    ensure(dot == include_str!("golden/webcam.dot"), || {
        format!("DOT drifted:\n{dot}")
    })?;
    ensure(json == include_str!("golden/webcam.json"), || {
        format!("JSON drifted:\n{json}")
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("grammar fidelity", grammar_fidelity),
        ("contract fidelity", contract_fidelity),
        ("validation rules", validation_rules),
        ("end-to-end demo", end_to_end_demo),
        ("continuation discipline", continuation_discipline),
        ("completeness checks", completeness_checks),
        ("taint soundness", taint_soundness),
        ("leak-freedom", leak_freedom),
        ("determinism", determinism),
        ("export stability", export_stability),
    ];
    // Panics inside deliberately faulty implementations are expected.
    std::panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = std::panic::catch_unwind(check)
            .unwrap_or_else(|_| Err("criterion panicked".to_owned()));
        let ms = t.elapsed().as_millis();
        match result {
            Ok(()) => println!("criterion {:>2} {name}: PASS ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({ms} ms): {why}", i + 1);
            }
        }
    }
    let total = start.elapsed();
    println!(
        "acceptance: {}/{} passed in {:.2} s",
        criteria.len() - failed,
        criteria.len(),
        total.as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
