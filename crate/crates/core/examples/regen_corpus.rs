//! Rebuild data/corpus.json from the oracles.
//!
//! cargo run --example regen_corpus > data/corpus.json

use classgroup::corpus::{generate_pure_field, CorpusEntry};
use classgroup::numfield::build_field;
use classgroup::verify::{
    analytic_class_number, analytic_estimate, oracle_imag_quadratic, roots_of_unity, oracle_real_quadratic, oracle_unit_search,
    unit_lattice_regulator,
};
use num_traits::ToPrimitive;

fn entry(poly: &str) -> CorpusEntry {
    let field = build_field(&poly.parse().unwrap()).unwrap();
    let d = field.disc.to_i64().unwrap();
    if field.n == 2 && d < 0 {
        let (h, divisors) = oracle_imag_quadratic(d);
        return CorpusEntry {
            poly: poly.into(),
            h,
            divisors,
            regulator: None,
            provenance: "reduced binary quadratic forms".into(),
            notes: format!("disc {d}"),
        };
    }
    let (r, provenance) = if field.n == 2 {
        (oracle_real_quadratic(d), "continued fraction of the reduced quadratic irrational".to_string())
    } else {
        let mut height = 1;
        loop {
            let units = oracle_unit_search(&field, height);
            if let Ok(r) = unit_lattice_regulator(&field, &units, 192) {
                break (r, format!("unit search with coefficients in [-{height}, {height}]"));
            }
            height += 1;
        }
    };
    let h = analytic_class_number(&field, r, 100_000);
    let e = analytic_estimate(&field, 100_000, roots_of_unity(&field));
    eprintln!("{poly}: R = {r}, E/R = {}", e / r);
    CorpusEntry {
        poly: poly.into(),
        h,
        divisors: cyclic(h),
        regulator: Some(r),
        provenance: format!("{provenance}; h by the analytic formula"),
        notes: format!("disc {d}"),
    }
}

// every non-quadratic corpus class group here has prime or trivial order
fn cyclic(h: u64) -> Vec<u64> {
    if h > 1 {
        vec![h]
    } else {
        vec![]
    }
}

fn main() {
    let mut polys: Vec<String> = ["x^2+1", "x^2+2", "x^2+x+1", "x^2+x+6", "x^2+x+12", "x^2+x+18"]
        .iter()
        .chain(["x^2-x-1", "x^2-2", "x^2-x-3"].iter())
        .map(|s| s.to_string())
        .collect();
    for k in [2, 3, 5, 7, 11] {
        polys.push(generate_pure_field(3, k).unwrap().to_string());
    }
    polys.push(generate_pure_field(5, 2).unwrap().to_string());
    let entries: Vec<CorpusEntry> = polys.iter().map(|p| entry(p)).collect();
    println!("{}", serde_json::to_string_pretty(&entries).unwrap());
}
