//! Within-participle permutation test for a pairwise construction contrast.
//!
//! With one row per (participle, construction), permuting the two labels
//! within a participle is a random sign flip of that participle's difference.
//! Replicate `r` draws from its own ChaCha stream of the master seed, so the
//! result does not depend on scheduling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::extract::ConstructionKind;
use crate::stats::lmm::{LmmError, LongRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationResult {
    pub level_a: ConstructionKind,
    pub level_b: ConstructionKind,
    /// Mean within-participle difference a − b.
    pub statistic: f64,
    pub p: f64,
    pub n_groups: usize,
    pub n_perm: u64,
    /// Participles lacking one of the two levels.
    pub dropped: Vec<String>,
}

pub fn permutation_test(
    rows: &[LongRow],
    contrast: (ConstructionKind, ConstructionKind),
    n_perm: u64,
    seed: u64,
) -> Result<PermutationResult, LmmError> {
    let (level_a, level_b) = contrast;
    if level_a == level_b {
        return Err(LmmError::Input("contrast levels must differ".into()));
    }
    let mut by_group: BTreeMap<&str, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for r in rows {
        let e = by_group.entry(r.participle.as_str()).or_default();
        if r.construction == level_a {
            e.0 = Some(r.entropy_bits);
        } else if r.construction == level_b {
            e.1 = Some(r.entropy_bits);
        }
    }
    let mut diffs = Vec::new();
    let mut dropped = Vec::new();
    for (g, pair) in by_group {
        match pair {
            (Some(a), Some(b)) => diffs.push(a - b),
            _ => {
                log::warn!("permutation test {level_a} vs {level_b}: dropping '{g}' (missing level)");
                dropped.push(g.to_string());
            }
        }
    }
    if diffs.is_empty() {
        return Err(LmmError::Input(format!(
            "no participle has both {level_a} and {level_b}"
        )));
    }
    let n = diffs.len() as f64;
    let observed = diffs.iter().sum::<f64>() / n;
    let threshold = observed.abs() - 1e-12 * observed.abs().max(1.0);
    let exceed = (0..n_perm)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r + 1);
            let s: f64 = diffs.iter().map(|&d| if rng.random::<bool>() { d } else { -d }).sum();
            (s / n).abs() >= threshold
        })
        .count() as u64;
    Ok(PermutationResult {
        level_a,
        level_b,
        statistic: observed,
        p: (1 + exceed) as f64 / (1 + n_perm) as f64,
        n_groups: diffs.len(),
        n_perm,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstructionKind::*;

    fn rows(pairs: &[(f64, f64)]) -> Vec<LongRow> {
        pairs
            .iter()
            .enumerate()
            .flat_map(|(i, &(a, b))| {
                let g = format!("g{i:02}");
                [LongRow::new(&g, Passive, a), LongRow::new(&g, Hyphenated, b)]
            })
            .collect()
    }

    #[test]
    fn identical_levels_p_is_one() {
        let r = rows(&[(1.0, 1.0), (2.0, 2.0), (3.5, 3.5)]);
        let res = permutation_test(&r, (Passive, Hyphenated), 500, 1).unwrap();
        assert_eq!(res.p, 1.0);
        assert_eq!(res.statistic, 0.0);
    }

    #[test]
    fn perfect_separation_hits_floor() {
        let pairs: Vec<_> = (0..36).map(|i| (6.0 + 0.01 * i as f64, 2.0)).collect();
        let res = permutation_test(&rows(&pairs), (Passive, Hyphenated), 10_000, 9).unwrap();
        assert_eq!(res.p, 1.0 / 10_001.0);
        assert_eq!(res.n_groups, 36);
    }

    #[test]
    fn missing_level_group_dropped() {
        let mut r = rows(&[(1.0, 0.0), (2.0, 1.0)]);
        r.push(LongRow::new("lonely", Passive, 4.0));
        let res = permutation_test(&r, (Passive, Hyphenated), 100, 3).unwrap();
        assert_eq!(res.dropped, vec!["lonely"]);
        assert_eq!(res.n_groups, 2);
    }

    #[test]
    fn deterministic_for_seed() {
        let pairs: Vec<_> = (0..12).map(|i| (i as f64 * 0.3, (i % 5) as f64)).collect();
        let a = permutation_test(&rows(&pairs), (Passive, Hyphenated), 2000, 77).unwrap();
        let b = permutation_test(&rows(&pairs), (Passive, Hyphenated), 2000, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn same_level_is_error() {
        assert!(permutation_test(&rows(&[(1.0, 1.0)]), (Nvn, Nvn), 10, 0).is_err());
    }
}
