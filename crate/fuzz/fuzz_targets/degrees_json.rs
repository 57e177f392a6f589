//! Degree-sequence JSON parsing: must never panic, and every accepted value
//! must satisfy the type invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;
use planeforest::DegreeSequence;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(s) = serde_json::from_str::<DegreeSequence>(text) else {
        return;
    };
    assert!(s.n() >= 1);
    assert!(s.c() >= 1);
    let weighted: u64 = s.counts().iter().map(|(&d, &c)| d * c).sum();
    assert_eq!(s.n() - s.c(), weighted);
    let d = s.child_vector();
    assert_eq!(d.len() as u64, s.n());
    // parse(serialize(s)) is the identity
    let round: DegreeSequence =
        serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(round, s);
});
