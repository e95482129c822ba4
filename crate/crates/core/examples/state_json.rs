//! Write a state to the JSON exchange format, read it back, and show the
//! structured reason when a file does not hold a density matrix.

use qcorr::io::{state_from_json, state_to_json};
use qcorr::states;

fn main() -> qcorr::Result<()> {
    let rho = states::p_family(0.3, 0.4)?;
    let text = state_to_json(&rho);
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("  ...");
    let back = state_from_json(&text)?;
    println!("round trip: source {}, S = {:.6}", back.provenance().source, back.entropy());

    // Inflate the |00><11| coherence past the PSD limit sqrt(rho11 rho44).
    let mut v: serde_json::Value = serde_json::from_str(&text)?;
    v["entries"][3]["re"] = 0.5.into();
    v["entries"][12]["re"] = 0.5.into();
    match state_from_json(&v.to_string()) {
        Err(qcorr::Error::InvalidState(reason)) => println!("rejected: {} ({reason})", reason.reason()),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
