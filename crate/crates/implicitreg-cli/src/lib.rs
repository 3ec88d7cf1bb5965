//! Shared machinery behind the `implicitreg` command-line tool: run
//! manifests, the synthetic graph suites, and the scatter experiment.
//! The binary in `main.rs` wires these to subcommands; the acceptance
//! suite drives them directly.

pub mod experiment;
pub mod manifest;
pub mod suites;

/// CSV-stable float rendering: shortest round-trip form for finite values,
/// lowercase `inf`/`nan` otherwise.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        "nan".into()
    }
}

/// Median of the finite values in a slice; `None` when empty.
pub fn median_finite(values: &[f64]) -> Option<f64> {
    let mut finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return None;
    }
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = finite.len() / 2;
    Some(if finite.len() % 2 == 1 {
        finite[mid]
    } else {
        0.5 * (finite[mid - 1] + finite[mid])
    })
}
