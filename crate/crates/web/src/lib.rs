//! Browser bindings. Each export returns a JSON string for the page to
//! parse; the computations run single-threaded with a lighter radial grid
//! than the command-line defaults so that the page stays responsive.

use serde_json::json;
use smallstate::experiments;
use smallstate::observables::ObservableSet;
use smallstate::{PacketSpec, QuadratureConfig, RadialProfiles};
use wasm_bindgen::prelude::*;

/// Quadrature settings used by the demo.
pub fn demo_config() -> QuadratureConfig {
    QuadratureConfig {
        radial_nodes: 600,
        ..Default::default()
    }
}

fn profiles(n: f64) -> Result<RadialProfiles, String> {
    let spec = PacketSpec::new(n).map_err(|e| e.to_string())?;
    RadialProfiles::build(&spec, &demo_config()).map_err(|e| e.to_string())
}

/// Current and charge density on the z = 0 plane as parallel arrays.
pub fn slice_json(n: f64, half_extent: f64, resolution: usize) -> Result<String, String> {
    let p = profiles(n)?;
    let s = experiments::current_slice(&p, half_extent, resolution).map_err(|e| e.to_string())?;
    let col = |f: fn(&experiments::SlicePoint) -> f64| s.points.iter().map(f).collect::<Vec<_>>();
    Ok(json!({
        "n": s.n,
        "half_extent": s.half_extent,
        "resolution": s.resolution,
        "peak_current": s.peak_current,
        "compton_radius": s.compton_radius,
        "circulation_radius": s.circulation_radius(),
        "x": col(|p| p.x),
        "y": col(|p| p.y),
        "j_x": col(|p| p.j_x),
        "j_y": col(|p| p.j_y),
        "rho_q": col(|p| p.rho_q),
    })
    .to_string())
}

/// a(r) and b(r) sampled uniformly on [0, r_max_plot].
pub fn profile_json(n: f64, r_max_plot: f64, samples: usize) -> Result<String, String> {
    if !(r_max_plot.is_finite() && r_max_plot > 0.0) || samples < 2 {
        return Err("need a positive plot range and at least two samples".into());
    }
    let p = profiles(n)?;
    let top = r_max_plot.min(p.r_max());
    let mut r = Vec::with_capacity(samples);
    let mut a = Vec::with_capacity(samples);
    let mut b = Vec::with_capacity(samples);
    for k in 0..samples {
        let x = top * k as f64 / (samples - 1) as f64;
        let v = p.values(x).map_err(|e| e.to_string())?;
        r.push(x);
        a.push(v.a);
        b.push(v.b(x));
    }
    Ok(json!({ "n": n, "r": r, "a": a, "b": b }).to_string())
}

/// Every scalar observable for one width, as a flat JSON object.
pub fn observables_json(n: f64) -> Result<String, String> {
    let spec = PacketSpec::new(n).map_err(|e| e.to_string())?;
    let set = ObservableSet::compute_all(&spec, &demo_config()).map_err(|e| e.to_string())?;
    let mut value = serde_json::to_value(&set).map_err(|e| e.to_string())?;
    value["_order"] = json!(set.present().iter().map(|o| o.key()).collect::<Vec<_>>());
    Ok(value.to_string())
}

#[wasm_bindgen(js_name = currentSlice)]
pub fn current_slice(n: f64, half_extent: f64, resolution: usize) -> Result<String, JsError> {
    slice_json(n, half_extent, resolution).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = radialProfile)]
pub fn radial_profile(n: f64, r_max_plot: f64, samples: usize) -> Result<String, JsError> {
    profile_json(n, r_max_plot, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = observables)]
pub fn observables(n: f64) -> Result<String, JsError> {
    observables_json(n).map_err(|e| JsError::new(&e))
}
