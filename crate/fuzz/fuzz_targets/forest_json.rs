//! Forest JSON parsing: accepted forests satisfy the Lukasiewicz invariants
//! and survive the codec round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use planeforest::forests::decode;
use planeforest::PlaneForest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(forest) = serde_json::from_str::<PlaneForest>(text) else {
        return;
    };
    let s = forest.degree_sequence();
    assert_eq!(forest.trees().len() as u64, s.c());
    let path = forest.encode();
    assert!(path.is_first_passage());
    assert_eq!(decode(&path).unwrap(), forest);
    let sorted = forest.sort_decreasing();
    assert!(sorted
        .trees()
        .windows(2)
        .all(|w| w[0].size() >= w[1].size()));
});
