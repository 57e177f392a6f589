//! Lukasiewicz decoding of arbitrary increment sequences: decode either
//! rejects cleanly or returns a forest that encodes back to the input.

#![no_main]

use libfuzzer_sys::fuzz_target;
use planeforest::forests::decode;
use planeforest::LatticePath;

fuzz_target!(|data: &[u8]| {
    // bytes -> increments in {-1, 0, 1, 2, 3}
    let increments: Vec<i64> = data.iter().map(|&b| (b % 5) as i64 - 1).collect();
    let Ok(path) = LatticePath::new(increments) else {
        return;
    };
    match decode(&path) {
        Ok(forest) => {
            assert!(path.is_first_passage());
            assert_eq!(forest.encode(), path);
            assert_eq!(forest.size() as usize, path.len());
        }
        Err(_) => assert!(!path.is_first_passage()),
    }

    // JSON route must agree with the direct constructor
    if let Ok(json_path) =
        serde_json::from_str::<LatticePath>(&serde_json::to_string(&path).unwrap())
    {
        assert_eq!(json_path, path);
    }
});
