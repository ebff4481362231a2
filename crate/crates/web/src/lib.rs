//! wasm-bindgen bindings behind the static page in `www/`.

use palsqf::harmonics::phi_big;
use palsqf::largesieve::{delta_bound, SpacingPoints, DEFAULT_EPSILON};
use palsqf::palsets::residue_histogram;
use wasm_bindgen::prelude::*;

/// Largest block the page will enumerate on the main thread.
pub const BLOCK_CAP: u64 = 2_000_000;
pub const POINTS_CAP: u32 = 20_000;
pub const SPACING_N_CAP: u64 = 2_000;

fn js(e: palsqf::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn check_base(base: u32) -> Result<(), JsError> {
    if !(2..=36).contains(&base) {
        return Err(JsError::new("base must lie in 2..=36"));
    }
    Ok(())
}

/// `Phi_N(k / points)` for `k = 0..points`.
#[wasm_bindgen]
pub fn phi_curve(base: u32, n: u32, points: u32) -> Result<Vec<f64>, JsError> {
    check_base(base)?;
    if points == 0 || points > POINTS_CAP {
        return Err(JsError::new(&format!("points must lie in 1..={POINTS_CAP}")));
    }
    if n > 40 {
        return Err(JsError::new("N must be at most 40"));
    }
    Ok((0..points).map(|k| phi_big(k as f64 / points as f64, base, n)).collect())
}

/// Palindromes of block `L` coprime to the base, counted per residue mod `q`.
#[wasm_bindgen]
pub fn residue_profile(base: u32, l: u32, q: u32) -> Result<Vec<f64>, JsError> {
    check_base(base)?;
    if q == 0 || q > 10_000 {
        return Err(JsError::new("q must lie in 1..=10000"));
    }
    let size = (base as u64)
        .checked_pow(l / 2)
        .and_then(|p| p.checked_mul(base as u64 - 1));
    if size.is_none_or(|s| s > BLOCK_CAP) {
        return Err(JsError::new(&format!("block holds more than {BLOCK_CAP} palindromes")));
    }
    let hist = residue_histogram(base, l, q as u64, true).map_err(js)?;
    Ok(hist.into_iter().map(|c| c as f64).collect())
}

/// `sup / Delta_eps` of the spacing count for `N = 1..=n_max`.
#[wasm_bindgen]
pub fn spacing_profile(d: u32, q: u32, n_max: u32) -> Result<Vec<f64>, JsError> {
    let (d, q, n_max) = (d as u64, q as u64, n_max as u64);
    if n_max == 0 || n_max > SPACING_N_CAP {
        return Err(JsError::new(&format!("N must lie in 1..={SPACING_N_CAP}")));
    }
    if d == 0 || q == 0 {
        return Err(JsError::new("D and q must be positive"));
    }
    let pts = SpacingPoints::new(d, q).map_err(js)?;
    Ok((1..=n_max)
        .map(|n| pts.sup(n) as f64 / delta_bound(d, n, q, DEFAULT_EPSILON))
        .collect())
}
