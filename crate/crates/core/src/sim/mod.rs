//! Simulated platform: picture values, scripted sources, recording sinks,
//! and the `.scn` scenario driver.

mod picture;
mod resources;
mod scenario;

pub use picture::{make_picture, overlay, BadDimensions, PictureData};
pub use resources::{RecordingSink, ScriptedSource};
pub use scenario::{
    format_scenario, parse_literal, parse_scenario, run_scenario, Scenario, ScenarioError,
    ScenarioParseError, Step,
};
