//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function has a plain Rust counterpart returning
//! `Result<_, String>` so the logic is testable natively.

use serde_json::json;
use wasm_bindgen::prelude::*;

use zetalab::experiments::class_numbers;
use zetalab::fields::unit_rank;
use zetalab::quadratic::{
    fundamental_unit_norm, is_squarefree, real_class_info, split_vector_quadratic, zeta_coeffs_quadratic,
    QuadraticField,
};

/// Widest discriminant window the histogram accepts.
pub const MAX_HISTOGRAM_SPAN: i64 = 200_000;

/// Longest coefficient vector the page may request.
pub const MAX_COEFFICIENTS: usize = 5_000;

fn field_from_d(d: i64) -> Result<QuadraticField, String> {
    if d == 0 || d == 1 || !is_squarefree(d) {
        return Err(format!("{d} is not a squarefree integer other than 0 and 1"));
    }
    QuadraticField::from_squarefree(d).map_err(|e| e.to_string())
}

/// JSON summary of `Q(sqrt(d))`.
pub fn summary(d: i64) -> Result<String, String> {
    let q = field_from_d(d)?;
    let disc = q.discriminant();
    let signature = q.signature();
    let (class_number, narrow, norm) = if disc > 0 {
        let info = real_class_info(disc).map_err(|e| e.to_string())?;
        (info.class_number, Some(info.narrow_class_number), Some(fundamental_unit_norm(disc)))
    } else {
        (q.class_number(), None, None)
    };
    Ok(json!({
        "d": d,
        "discriminant": disc,
        "signature": [signature.0, signature.1],
        "unit_rank": unit_rank(signature),
        "defining_polynomial": q.defining_poly().to_string(),
        "class_number": class_number,
        "narrow_class_number": narrow,
        "fundamental_unit_norm": norm,
    })
    .to_string())
}

/// `(a_1, ..., a_n)` for `Q(sqrt(d))`.
pub fn zeta(d: i64, n: usize) -> Result<Vec<f64>, String> {
    if n == 0 || n > MAX_COEFFICIENTS {
        return Err(format!("length must be between 1 and {MAX_COEFFICIENTS}"));
    }
    let q = field_from_d(d)?;
    let coeffs = zeta_coeffs_quadratic(q.discriminant(), n).map_err(|e| e.to_string())?;
    Ok(coeffs.into_iter().map(|a| a as f64).collect())
}

/// Split-prime indicators over the first `k` primes for `Q(sqrt(d))`.
pub fn split(d: i64, k: usize) -> Result<Vec<u8>, String> {
    if k == 0 || k > MAX_COEFFICIENTS {
        return Err(format!("length must be between 1 and {MAX_COEFFICIENTS}"));
    }
    let q = field_from_d(d)?;
    split_vector_quadratic(q.discriminant(), k).map_err(|e| e.to_string())
}

/// JSON `{"fields": N, "counts": [[h, count], ...]}` over fundamental
/// discriminants in `[lo, hi]`.
pub fn histogram(lo: i64, hi: i64) -> Result<String, String> {
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    if hi - lo > MAX_HISTOGRAM_SPAN {
        return Err(format!("range wider than {MAX_HISTOGRAM_SPAN}"));
    }
    let table = class_numbers(lo, hi, None).map_err(|e| e.to_string())?;
    let mut counts = std::collections::BTreeMap::new();
    for (_, h) in &table {
        *counts.entry(*h).or_insert(0usize) += 1;
    }
    let pairs: Vec<[u64; 2]> = counts.into_iter().map(|(h, c)| [h, c as u64]).collect();
    Ok(json!({ "lo": lo, "hi": hi, "fields": table.len(), "counts": pairs }).to_string())
}

#[wasm_bindgen]
pub fn field_summary(d: i64) -> Result<String, JsError> {
    summary(d).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn zeta_coefficients(d: i64, n: usize) -> Result<Vec<f64>, JsError> {
    zeta(d, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn split_primes(d: i64, k: usize) -> Result<Vec<u8>, JsError> {
    split(d, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn class_number_histogram(lo: i64, hi: i64) -> Result<String, JsError> {
    histogram(lo, hi).map_err(|e| JsError::new(&e))
}
