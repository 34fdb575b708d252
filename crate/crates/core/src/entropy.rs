//! Slot samples, inclusion thresholds, seeded downsampling and plug-in
//! Shannon entropy in bits.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::extract::{ConstructionKind, ConstructionMatch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntropyError {
    #[error("entropy of an empty sample is undefined")]
    EmptySample,
    #[error("sample size must be at least 1")]
    ZeroSampleSize,
    #[error("cannot draw {wanted} tokens from a sample of {total}")]
    InsufficientSample { total: u64, wanted: u64 },
}

pub type CellKey = (String, ConstructionKind);

/// Which token field keys α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaKey {
    #[default]
    Lemma,
    Form,
}

impl AlphaKey {
    pub fn key_of(self, m: &ConstructionMatch) -> String {
        let raw = match self {
            AlphaKey::Lemma if !m.alpha_lemma.is_empty() && m.alpha_lemma != "_" => &m.alpha_lemma,
            _ => &m.alpha_form,
        };
        raw.to_lowercase()
    }
}

/// Multiset of α keys for one (participle, construction) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotSample {
    pub participle: String,
    pub kind: ConstructionKind,
    pub alphas: BTreeMap<String, u64>,
}

impl SlotSample {
    pub fn new(participle: impl Into<String>, kind: ConstructionKind) -> Self {
        SlotSample {
            participle: participle.into(),
            kind,
            alphas: BTreeMap::new(),
        }
    }

    pub fn from_counts<'a>(
        participle: &str,
        kind: ConstructionKind,
        counts: impl IntoIterator<Item = (&'a str, u64)>,
    ) -> Self {
        let mut s = SlotSample::new(participle, kind);
        for (k, c) in counts {
            if c > 0 {
                *s.alphas.entry(k.to_string()).or_default() += c;
            }
        }
        s
    }

    pub fn add(&mut self, key: String) {
        *self.alphas.entry(key).or_default() += 1;
    }

    pub fn total(&self) -> u64 {
        self.alphas.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.alphas.len()
    }

    /// Merges another cell's counts into this one.
    pub fn merge(&mut self, other: &SlotSample) {
        for (k, c) in &other.alphas {
            *self.alphas.entry(k.clone()).or_default() += c;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyRecord {
    pub participle: String,
    pub kind: ConstructionKind,
    pub n: u64,
    pub entropy_bits: f64,
}

/// Groups matches by (participle, construction) and counts α keys.
pub fn collect<'a>(
    matches: impl IntoIterator<Item = &'a ConstructionMatch>,
    key: AlphaKey,
) -> BTreeMap<CellKey, SlotSample> {
    let mut cells: BTreeMap<CellKey, SlotSample> = BTreeMap::new();
    for m in matches {
        cells
            .entry((m.participle_lemma.clone(), m.kind))
            .or_insert_with(|| SlotSample::new(m.participle_lemma.clone(), m.kind))
            .add(key.key_of(m));
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Raw,
    Parsed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deficit {
    pub kind: ConstructionKind,
    pub stage: Stage,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InclusionReport {
    pub included: BTreeSet<String>,
    /// Every failed threshold per excluded participle.
    pub excluded: BTreeMap<String, Vec<Deficit>>,
}

impl InclusionReport {
    pub fn excluded_at(&self, stage: Stage) -> Vec<&str> {
        self.excluded
            .iter()
            .filter(|(_, d)| d.iter().any(|d| d.stage == stage))
            .map(|(p, _)| p.as_str())
            .collect()
    }
}

/// A participle survives iff every construction reaches `min_raw` query hits
/// and `min_parsed` validated matches. Bounds are inclusive.
pub fn apply_inclusion(
    raw_counts: &BTreeMap<CellKey, u64>,
    parsed: &BTreeMap<CellKey, SlotSample>,
    min_raw: u64,
    min_parsed: u64,
) -> InclusionReport {
    let participles: BTreeSet<&str> = raw_counts
        .keys()
        .chain(parsed.keys())
        .map(|(p, _)| p.as_str())
        .collect();
    let mut report = InclusionReport::default();
    for p in participles {
        let mut deficits = Vec::new();
        for kind in ConstructionKind::ALL {
            let key = (p.to_string(), kind);
            let raw = raw_counts.get(&key).copied().unwrap_or(0);
            if raw < min_raw {
                deficits.push(Deficit {
                    kind,
                    stage: Stage::Raw,
                    count: raw,
                });
            }
            let valid = parsed.get(&key).map_or(0, SlotSample::total);
            if valid < min_parsed {
                deficits.push(Deficit {
                    kind,
                    stage: Stage::Parsed,
                    count: valid,
                });
            }
        }
        if deficits.is_empty() {
            report.included.insert(p.to_string());
        } else {
            report.excluded.insert(p.to_string(), deficits);
        }
    }
    report
}

/// Stable per-cell seed derived from the master seed, independent of
/// processing order.
pub fn cell_seed(master: u64, participle: &str, kind: ConstructionKind) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(participle.as_bytes());
    h.update([0x1f]);
    h.update(kind.as_str().as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

/// Uniform draw of `n` token instances without replacement.
///
/// Instances are listed by α key then occurrence, and a seeded partial
/// Fisher–Yates shuffle picks the first `n`.
pub fn downsample(sample: &SlotSample, n: u64, seed: u64) -> Result<SlotSample, EntropyError> {
    let total = sample.total();
    if total < n {
        return Err(EntropyError::InsufficientSample { total, wanted: n });
    }
    let mut instances: Vec<&str> = Vec::with_capacity(total as usize);
    for (k, &c) in &sample.alphas {
        instances.extend(std::iter::repeat_n(k.as_str(), c as usize));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = instances.len() as u64;
    for i in 0..n {
        let j = rng.random_range(i..len);
        instances.swap(i as usize, j as usize);
    }
    let mut out = SlotSample::new(sample.participle.clone(), sample.kind);
    for k in &instances[..n as usize] {
        *out.alphas.entry((*k).to_string()).or_default() += 1;
    }
    Ok(out)
}

/// Plug-in entropy, base 2, from a count vector. Zero counts contribute 0.
pub fn entropy_of_counts(counts: impl IntoIterator<Item = u64> + Clone) -> Result<f64, EntropyError> {
    let total: u64 = counts.clone().into_iter().sum();
    if total == 0 {
        return Err(EntropyError::EmptySample);
    }
    let n = total as f64;
    let h: f64 = counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    Ok(h.max(0.0))
}

pub fn entropy(sample: &SlotSample) -> Result<f64, EntropyError> {
    entropy_of_counts(sample.alphas.values().copied())
}

pub fn max_entropy(n: u64) -> Result<f64, EntropyError> {
    if n == 0 {
        return Err(EntropyError::ZeroSampleSize);
    }
    Ok((n as f64).log2())
}

pub const ENTROPY_CSV_HEADER: &str = "participle,construction,n,entropy_bits";

pub fn write_entropy_csv<W: Write>(mut w: W, records: &[EntropyRecord]) -> std::io::Result<()> {
    writeln!(w, "{ENTROPY_CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{},{},{},{}", r.participle, r.kind, r.n, r.entropy_bits)?;
    }
    Ok(())
}

pub fn read_entropy_csv<R: BufRead>(r: R) -> Result<Vec<EntropyRecord>, String> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if i == 0 {
            if line != ENTROPY_CSV_HEADER {
                return Err(format!("expected header '{ENTROPY_CSV_HEADER}'"));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(format!("row {}: expected 4 columns", i + 1));
        }
        out.push(EntropyRecord {
            participle: cols[0].to_string(),
            kind: cols[1].parse().map_err(|e| format!("row {}: {e}", i + 1))?,
            n: cols[2].parse().map_err(|_| format!("row {}: bad n", i + 1))?,
            entropy_bits: cols[3].parse().map_err(|_| format!("row {}: bad entropy", i + 1))?,
        });
    }
    Ok(out)
}
