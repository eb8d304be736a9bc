//! Browser bindings for the explorer page in `www/`.
//!
//! Each export returns a JSON string; the page does the drawing. The
//! `*_json` functions hold the logic and are what the native tests call.

use goldbach_core::bound::{bound_a, Rational};
use goldbach_core::partition::{enumerate_partitions, profile};
use goldbach_core::primes::build_table;
use goldbach_core::scan::compute_records;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `q` the curve view will compute in one call.
pub const CURVE_LIMIT: u64 = 200_000;

/// Largest `q` the partition view will enumerate.
pub const PARTITION_LIMIT: u64 = 20_000;

fn frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn residue_table_json(n1_max: u64, prime_max: u64, q: Option<u64>) -> Result<Value, String> {
    if !(3..=999).contains(&n1_max) || !(3..=199).contains(&prime_max) {
        return Err("n1_max must be in [3, 999] and prime_max in [3, 199]".into());
    }
    let table = build_table(prime_max).map_err(|e| e.to_string())?;
    let primes = table.odd_primes_up_to(prime_max).to_vec();
    let rows: Vec<Value> = (3..=n1_max)
        .step_by(2)
        .map(|n1| {
            let residues: Vec<u64> = primes.iter().map(|p| n1 % p).collect();
            json!({ "n1": n1, "residues": residues })
        })
        .collect();
    // Bad residues {0, q mod p} for highlighting, when a q is chosen.
    let bad: Option<Vec<Vec<u64>>> =
        q.map(|q| primes.iter().map(|&p| if q % p == 0 { vec![0] } else { vec![0, q % p] }).collect());
    Ok(json!({ "primes": primes, "rows": rows, "bad": bad }))
}

pub fn partition_view_json(q: u64) -> Result<Value, String> {
    if !(4..=PARTITION_LIMIT).contains(&q) || q % 2 != 0 {
        return Err(format!("q must be even in [4, {PARTITION_LIMIT}]"));
    }
    let table = build_table(q).map_err(|e| e.to_string())?;
    let prof = profile(q, &table).map_err(|e| e.to_string())?;
    let entries: Vec<Value> = enumerate_partitions(q, &table)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|e| json!([e.n1, e.n2, e.admissible, e.prime_pair]))
        .collect();
    let bound = if q >= 6 {
        let b = bound_a(q, &table).map_err(|e| e.to_string())?;
        json!({
            "cutoff": b.cutoff,
            "shrink": frac(&b.shrink_product),
            "n": b.n,
            "subtractive": b.subtractive,
            "A": frac(&b.a),
            "empty_cutoff": b.is_empty_cutoff(),
        })
    } else {
        Value::Null
    };
    Ok(json!({
        "q": q,
        "n": prof.n,
        "goldbach_ordered": prof.goldbach_ordered,
        "goldbach_unordered": prof.goldbach_unordered,
        "admissible_count": prof.admissible_count,
        "predicate_cutoff": prof.predicate_cutoff,
        "entries": entries,
        "bound": bound,
    }))
}

pub fn bound_curve_json(q_lo: u64, q_hi: u64) -> Result<Value, String> {
    if q_lo < 4 || q_lo % 2 != 0 || q_hi % 2 != 0 || q_hi < q_lo || q_hi > CURVE_LIMIT {
        return Err(format!("need even 4 <= q_lo <= q_hi <= {CURVE_LIMIT}"));
    }
    let table = build_table(q_hi).map_err(|e| e.to_string())?;
    let records = compute_records(&table, q_lo, q_hi, 0).map_err(|e| e.to_string())?;
    let minima: Vec<u64> =
        table.odd_primes_up_to(q_hi.isqrt()).iter().map(|p| p * p + 3).filter(|q| (q_lo..=q_hi).contains(q)).collect();
    Ok(json!({
        "q": records.iter().map(|r| r.q).collect::<Vec<_>>(),
        "goldbach": records.iter().map(|r| r.goldbach_ordered).collect::<Vec<_>>(),
        "admissible": records.iter().map(|r| r.admissible_count).collect::<Vec<_>>(),
        "bound": records.iter().map(|r| r.bound_approx()).collect::<Vec<_>>(),
        "violations": records.iter().filter(|r| !r.conjecture_ok).map(|r| r.q).collect::<Vec<_>>(),
        "minima": minima,
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

/// Residue rows for odd `n1 <= n1_max` against odd primes `<= prime_max`;
/// pass `q = 0` to skip bad-residue highlighting.
#[wasm_bindgen]
pub fn residue_table(n1_max: u32, prime_max: u32, q: u32) -> Result<String, JsValue> {
    to_js(residue_table_json(n1_max.into(), prime_max.into(), (q != 0).then_some(q.into())))
}

#[wasm_bindgen]
pub fn partition_view(q: u32) -> Result<String, JsValue> {
    to_js(partition_view_json(q.into()))
}

#[wasm_bindgen]
pub fn bound_curve(q_lo: u32, q_hi: u32) -> Result<String, JsValue> {
    to_js(bound_curve_json(q_lo.into(), q_hi.into()))
}
