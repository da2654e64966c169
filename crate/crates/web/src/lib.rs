//! Browser bindings. The `*_impl` functions hold the logic and return plain
//! `Result<String, String>` so they can be tested off the browser.

use attractor_class::dynamics::{integrate, Integration, Reversed, Termination};
use attractor_class::example::{log_grid, y_map, PlanarCubicQuinticSystem, DEFAULT_BUDGET};
use attractor_class::synthesis::{render_portrait, synthesize_configuration, PortraitOptions};
use attractor_class::{
    canonical_feasible_set, decide_equivalence, fixtures, parse_configuration, Configuration,
    FeasibleSet, OrientationChoice,
};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn configuration(text: &str) -> Result<Configuration, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(err)?;
    if value.get("marks").is_some() {
        parse_configuration(text).map_err(err)
    } else {
        Ok(synthesize_configuration(&FeasibleSet::from_json(text).map_err(err)?))
    }
}

pub fn fixture_impl(name: &str) -> Result<String, String> {
    match name {
        "elliptic_saddle" => Ok(fixtures::ELLIPTIC_SADDLE_JSON.to_string()),
        _ => fixtures::feasible_by_name(name)
            .ok_or_else(|| format!("unknown fixture {name}"))?
            .map(|l| l.to_json())
            .map_err(err),
    }
}

pub fn portrait_svg_impl(feasible: &str, samples: usize, step: f64, arc: f64) -> Result<String, String> {
    let l = FeasibleSet::from_json(feasible).map_err(err)?;
    let opts = PortraitOptions {
        samples_per_block: samples,
        step,
        max_arc_length: arc,
        ..Default::default()
    };
    Ok(render_portrait(&l, &opts).map_err(err)?.to_svg())
}

pub fn synthesize_impl(feasible: &str) -> Result<String, String> {
    let l = FeasibleSet::from_json(feasible).map_err(err)?;
    Ok(synthesize_configuration(&l).to_json())
}

pub fn canonical_impl(config: &str, orientation: &str, sigma: &str) -> Result<String, String> {
    let theta: OrientationChoice = orientation.parse().map_err(err)?;
    let cfg = parse_configuration(config).map_err(err)?;
    Ok(canonical_feasible_set(&cfg, theta, sigma).map_err(err)?.to_json())
}

pub fn equivalence_impl(a: &str, b: &str) -> Result<String, String> {
    let eq = decide_equivalence(&configuration(a)?, &configuration(b)?).map_err(err)?;
    serde_json::to_string(&eq).map_err(err)
}

pub fn y_map_impl(from: f64, to: f64, points: usize, step: f64) -> Result<String, String> {
    if !(from > 0.0 && to > from && points >= 1) {
        return Err("need 0 < from < to and at least one point".into());
    }
    let pts = y_map(&log_grid(from, to, points), step, DEFAULT_BUDGET).map_err(err)?;
    serde_json::to_string(&pts).map_err(err)
}

/// Orbit of the example system through `(x, y)`, both directions, as JSON
/// `{"forward": [[x, y], ...], "backward": [...], ...}`.
pub fn trace_orbit_impl(x: f64, y: f64, step: f64, arc: f64) -> Result<String, String> {
    let box_ = Some([-6.0, 6.0, -6.0, 6.0]);
    let mut opts = Integration::new(step, arc, &[]);
    opts.domain = box_;
    let fwd = integrate(&PlanarCubicQuinticSystem, [x, y], &opts).map_err(err)?;
    let bwd = integrate(&Reversed(PlanarCubicQuinticSystem), [x, y], &opts).map_err(err)?;
    let thin = |v: &[[f64; 2]]| -> Vec<[f64; 2]> {
        let k = (v.len() / 2000).max(1);
        v.iter().step_by(k).chain(v.last()).copied().collect()
    };
    let name = |t: Termination| format!("{t:?}");
    serde_json::to_string(&serde_json::json!({
        "forward": thin(&fwd.vertices),
        "backward": thin(&bwd.vertices),
        "forward_end": name(fwd.termination),
        "backward_end": name(bwd.termination),
    }))
    .map_err(err)
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn fixture(name: &str) -> Result<String, JsError> {
    js(fixture_impl(name))
}

#[wasm_bindgen]
pub fn portrait_svg(feasible: &str, samples: usize, step: f64, arc: f64) -> Result<String, JsError> {
    js(portrait_svg_impl(feasible, samples, step, arc))
}

#[wasm_bindgen]
pub fn synthesize(feasible: &str) -> Result<String, JsError> {
    js(synthesize_impl(feasible))
}

#[wasm_bindgen]
pub fn canonical(config: &str, orientation: &str, sigma: &str) -> Result<String, JsError> {
    js(canonical_impl(config, orientation, sigma))
}

#[wasm_bindgen]
pub fn equivalence(a: &str, b: &str) -> Result<String, JsError> {
    js(equivalence_impl(a, b))
}

#[wasm_bindgen]
pub fn crossing_map(from: f64, to: f64, points: usize, step: f64) -> Result<String, JsError> {
    js(y_map_impl(from, to, points, step))
}

#[wasm_bindgen]
pub fn trace_orbit(x: f64, y: f64, step: f64, arc: f64) -> Result<String, JsError> {
    js(trace_orbit_impl(x, y, step, arc))
}
