//! The bundled webcam application.
//!
//! A camera feeds `ProcessPicture`, which filters each picture and publishes
//! it to `ComposeDisplay`. That context pulls an advertisement from `MakeAd`
//! (which in turn pulls the `IP` network source) and, unless the ad is empty,
//! publishes the picture with the ad drawn on it. `Display` shows the result
//! on `Screen`. The picture never flows into `MakeAd`.

use crate::parser::parse_str;
use crate::runtime::{Implementation, Runtime};
use crate::sim::{overlay, PictureData, RecordingSink, ScriptedSource};
use crate::spec::Specification;
use crate::value::Value;

pub const WEBCAM_SPEC: &str = include_str!("../examples/webcam.scc");
pub const DEFAULT_SCENARIO: &str = include_str!("../examples/default.scn");

pub fn webcam_spec() -> Specification {
    parse_str(WEBCAM_SPEC).expect("bundled webcam spec parses")
}

// Picture content is simulated, so the colour filter leaves it unchanged.
fn filter(p: PictureData) -> PictureData {
    p
}

/// One implementation per context and controller of the webcam spec.
pub fn webcam_implementations() -> Vec<(&'static str, Implementation)> {
    vec![
        ("MakeAd", Implementation::new(|args| Ok(Some(args.get()?)))),
        (
            "ProcessPicture",
            Implementation::new(|args| {
                let pic = args.input()?.as_picture().cloned().expect("Picture input");
                args.publish(Value::Picture(filter(pic)))
            }),
        ),
        (
            "ComposeDisplay",
            Implementation::new(|args| {
                let pic = args.input()?.as_picture().cloned().expect("Picture input");
                let ad = args.get()?;
                let ad_text = ad.as_str().expect("String ad");
                if ad_text.is_empty() {
                    return args.nopublish();
                }
                args.publish(Value::Picture(overlay(&pic, ad_text)))
            }),
        ),
        (
            "Display",
            Implementation::new(|args| {
                args.act(args.input()?.clone())?;
                Ok(None)
            }),
        ),
    ]
}

/// The sealed webcam runtime plus a handle on what reached the screen.
pub struct WebcamApp {
    pub runtime: Runtime,
    pub screen: RecordingSink,
}

impl WebcamApp {
    pub fn new() -> Self {
        let mut runtime = Runtime::new(webcam_spec()).expect("webcam spec validates");
        for (name, imp) in webcam_implementations() {
            runtime.register(name, imp).expect("declared component");
        }
        let screen = RecordingSink::new();
        runtime
            .bind_source("Camera", ScriptedSource::new())
            .and_then(|_| runtime.bind_source("IP", ScriptedSource::new()))
            .and_then(|_| runtime.bind_action("Screen", screen.clone()))
            .and_then(|_| runtime.seal())
            .expect("webcam app is complete");
        WebcamApp { runtime, screen }
    }
}

impl Default for WebcamApp {
    fn default() -> Self {
        Self::new()
    }
}

pub fn build_webcam_app() -> Runtime {
    WebcamApp::new().runtime
}
