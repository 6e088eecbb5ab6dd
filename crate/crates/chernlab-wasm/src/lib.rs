//! Browser bindings for the Haldane-model laboratory.
//!
//! Three interactive surfaces, all pure functions of their arguments so
//! the page can re-render on every slider move:
//!
//! - [`band_path`]: band energies along Γ → K → M → K′ → Γ;
//! - [`curvature_grid`] + [`chern_number`]: the Berry-curvature heatmap
//!   over the Brillouin torus and the link-variable Chern number;
//! - [`phase_map`]: the (φ, M) topological phase diagram.
//!
//! Everything returns flat `f64`/`i32` buffers; the page owns all canvas
//! drawing.

use chernlab::lattice::{build_geometry, kgrid};
use chernlab::model::{standard_k_path, HaldaneParams};
use chernlab::topology::{chern_fhs, curvature_map, phase_diagram, PhaseCell};
use wasm_bindgen::prelude::*;

fn params(t1: f64, t2: f64, phi: f64, m: f64) -> Result<HaldaneParams, JsValue> {
    HaldaneParams::new(t1, t2, phi, m).map_err(to_js)
}

fn to_js(e: chernlab::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Bands along the standard path: `samples` rows of
/// [arclength, e_minus, e_plus], flattened.
#[wasm_bindgen]
pub fn band_path(t1: f64, t2: f64, phi: f64, m: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    let g = build_geometry(1.0).map_err(to_js)?;
    let p = params(t1, t2, phi, m)?;
    let (points, _) = standard_k_path(&g, &p, samples).map_err(to_js)?;
    let mut out = Vec::with_capacity(3 * points.len());
    for pt in points {
        out.push(pt.arclength);
        out.push(pt.bands.e_minus);
        out.push(pt.bands.e_plus);
    }
    Ok(out)
}

/// Arclengths of the path nodes Γ, K, M, K′, Γ (for axis ticks).
#[wasm_bindgen]
pub fn band_path_nodes(t1: f64, t2: f64, phi: f64, m: f64) -> Result<Vec<f64>, JsValue> {
    let g = build_geometry(1.0).map_err(to_js)?;
    let p = params(t1, t2, phi, m)?;
    let (_, nodes) = standard_k_path(&g, &p, 8).map_err(to_js)?;
    Ok(nodes)
}

/// Berry-curvature flux per plaquette on an n×n torus grid, row-major
/// (second fractional index fastest). Sums to 2π·c₁.
#[wasm_bindgen]
pub fn curvature_grid(t1: f64, t2: f64, phi: f64, m: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    let g = build_geometry(1.0).map_err(to_js)?;
    let p = params(t1, t2, phi, m)?;
    let grid = kgrid(&g, n, n).map_err(to_js)?;
    Ok(curvature_map(&p, &grid).map_err(to_js)?.values)
}

/// Link-variable Chern number on an n×n grid.
#[wasm_bindgen]
pub fn chern_number(t1: f64, t2: f64, phi: f64, m: f64, n: usize) -> Result<i32, JsValue> {
    let g = build_geometry(1.0).map_err(to_js)?;
    let p = params(t1, t2, phi, m)?;
    let grid = kgrid(&g, n, n).map_err(to_js)?;
    Ok(chern_fhs(&p, &grid).map_err(to_js)?.c1 as i32)
}

/// Phase diagram over [phi_min, phi_max] × [m_min, m_max]: c₁ per cell,
/// 99 where the sample is gapless. Row-major with M fastest.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn phase_map(
    t1: f64,
    t2: f64,
    phi_min: f64,
    phi_max: f64,
    n_phi: usize,
    m_min: f64,
    m_max: f64,
    n_m: usize,
    grid_n: usize,
) -> Result<Vec<i32>, JsValue> {
    if n_phi < 2 || n_m < 2 {
        return Err(JsValue::from_str("need at least 2 samples per axis"));
    }
    let g = build_geometry(1.0).map_err(to_js)?;
    let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let phis = lin(phi_min, phi_max, n_phi);
    let ms = lin(m_min, m_max, n_m);
    // Single-threaded in the browser.
    let diagram = phase_diagram(&g, t1, t2, &phis, &ms, grid_n, 1).map_err(to_js)?;
    Ok(diagram
        .cells
        .iter()
        .map(|cell| match cell {
            PhaseCell::Gapless => 99,
            PhaseCell::Chern(res) => res.c1 as i32,
        })
        .collect())
}
