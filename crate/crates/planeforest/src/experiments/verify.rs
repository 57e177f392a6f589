//! Exhaustive small-n verification suites: counting formulas, the n-to-1
//! rotation map, the marked-forest maps, and the codec round-trip, checked
//! over every degree sequence up to a size and degree cap.

use crate::degrees::DegreeSequence;
use crate::experiments::ExperimentError;
use crate::forests::{decode, verify_marked_maps_capped};
use crate::paths::{
    enumerate_bridges_capped, fp_bridge_count, multinomial, verify_n_to_one_capped,
};

/// Every valid degree sequence with `1 <= n(s) <= max_n` and
/// `Delta(s) <= max_degree`, by full enumeration of count vectors.
pub fn degree_sequences_up_to(max_n: u64, max_degree: u64) -> Vec<DegreeSequence> {
    let mut out = Vec::new();
    let mut counts = vec![0u64; max_degree as usize + 1];
    fn recurse(
        counts: &mut Vec<u64>,
        degree: usize,
        remaining: u64,
        out: &mut Vec<DegreeSequence>,
    ) {
        if degree == counts.len() {
            let pairs: Vec<(u64, u64)> = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(d, &c)| (d as u64, c))
                .collect();
            if !pairs.is_empty() {
                if let Ok(s) = DegreeSequence::from_pairs(&pairs) {
                    out.push(s);
                }
            }
            return;
        }
        for take in 0..=remaining {
            counts[degree] = take;
            recurse(counts, degree + 1, remaining - take, out);
        }
        counts[degree] = 0;
    }
    recurse(&mut counts, 0, max_n, &mut out);
    out.sort_by(|a, b| (a.n(), a.counts()).cmp(&(b.n(), b.counts())));
    out
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: String,
    pub pass: bool,
    pub sequences: usize,
    pub detail: String,
}

/// `|Λ(s)| = n!/Π s^(i)!` and `|F(s)| = (c/n) n!/Π s^(i)!`, exactly.
pub fn verify_counting(max_n: u64, max_degree: u64) -> Result<SuiteOutcome, ExperimentError> {
    let sequences = degree_sequences_up_to(max_n, max_degree);
    let mut failures = 0usize;
    for s in &sequences {
        let bridges = enumerate_bridges_capped(s, max_n)?;
        let fp = bridges.iter().filter(|p| p.is_first_passage()).count();
        if bridges.len() as u128 != multinomial(s) || fp as u128 != fp_bridge_count(s) {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "counting_formulas".into(),
        pass: failures == 0,
        sequences: sequences.len(),
        detail: format!("{failures} mismatches"),
    })
}

/// Every first-passage bridge has exactly `n(s)` rotation preimages.
pub fn verify_rotation(max_n: u64, max_degree: u64) -> Result<SuiteOutcome, ExperimentError> {
    let sequences = degree_sequences_up_to(max_n, max_degree);
    let mut failures = 0usize;
    for s in &sequences {
        if !verify_n_to_one_capped(s, max_n)?.ok {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "rotation_n_to_one".into(),
        pass: failures == 0,
        sequences: sequences.len(),
        detail: format!("{failures} mismatches"),
    })
}

/// The marked-forest maps are exactly c-to-1 and n-to-1.
pub fn verify_marked(max_n: u64, max_degree: u64) -> Result<SuiteOutcome, ExperimentError> {
    let sequences = degree_sequences_up_to(max_n, max_degree);
    let mut failures = 0usize;
    for s in &sequences {
        let check = verify_marked_maps_capped(s, max_n)?;
        if !(check.g_c_to_1 && check.h_n_to_1) {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "marked_maps".into(),
        pass: failures == 0,
        sequences: sequences.len(),
        detail: format!("{failures} mismatches"),
    })
}

/// decode∘encode and encode∘decode are identities on all small instances.
pub fn verify_codec(max_n: u64, max_degree: u64) -> Result<SuiteOutcome, ExperimentError> {
    let sequences = degree_sequences_up_to(max_n, max_degree);
    let mut failures = 0usize;
    for s in &sequences {
        for p in enumerate_bridges_capped(s, max_n)? {
            if !p.is_first_passage() {
                continue;
            }
            let forest = decode(&p)?;
            if forest.encode() != p || decode(&forest.encode())? != forest {
                failures += 1;
            }
        }
    }
    Ok(SuiteOutcome {
        name: "codec_round_trip".into(),
        pass: failures == 0,
        sequences: sequences.len(),
        detail: format!("{failures} mismatches"),
    })
}

pub fn run_all_suites(max_n: u64, max_degree: u64) -> Result<Vec<SuiteOutcome>, ExperimentError> {
    Ok(vec![
        verify_counting(max_n, max_degree)?,
        verify_rotation(max_n, max_degree)?,
        verify_marked(max_n, max_degree)?,
        verify_codec(max_n, max_degree)?,
    ])
}
