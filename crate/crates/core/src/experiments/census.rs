use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use super::ExperimentError;
use crate::quadratic::{class_number_imaginary, fundamental_discriminants, real_class_table};

/// Width of one cached block of real class numbers.
pub const CLASS_BLOCK: i64 = 1_000_000;

/// Ranges narrower than this are always computed directly.
const CACHE_MIN_SPAN: i64 = 100_000;

/// `(D, h)` for every fundamental discriminant in `[lo, hi]`, ascending.
///
/// Real discriminants are computed in blocks of [`CLASS_BLOCK`]; with a cache
/// directory each block is stored as `real-class-numbers-<width>-<k>.csv`
/// and reused.
pub fn class_numbers(lo: i64, hi: i64, cache_dir: Option<&Path>) -> Result<Vec<(i64, u64)>, ExperimentError> {
    class_numbers_blocked(lo, hi, cache_dir, CLASS_BLOCK, CACHE_MIN_SPAN)
}

fn class_numbers_blocked(
    lo: i64,
    hi: i64,
    cache_dir: Option<&Path>,
    width: i64,
    min_span: i64,
) -> Result<Vec<(i64, u64)>, ExperimentError> {
    let mut out = Vec::new();
    if lo > hi {
        return Ok(out);
    }
    if lo < 0 {
        let discs = fundamental_discriminants(lo, hi.min(-1));
        let hs: Vec<(i64, u64)> =
            discs.par_iter().map(|&d| (d, class_number_imaginary(d).expect("fundamental by construction"))).collect();
        out.extend(hs);
    }
    if hi >= 5 {
        let lo = lo.max(5);
        match cache_dir {
            Some(dir) if hi - lo >= min_span => {
                let first = (lo - 1) / width;
                let last = (hi - 1) / width;
                for k in first..=last {
                    let block = real_block(k, width, dir)?;
                    out.extend(block.into_iter().filter(|&(d, _)| d >= lo && d <= hi));
                }
            }
            _ => out.extend(real_class_table(lo, hi).into_iter().map(|i| (i.discriminant, i.class_number))),
        }
    }
    Ok(out)
}

fn real_block(k: i64, width: i64, dir: &Path) -> Result<Vec<(i64, u64)>, ExperimentError> {
    let path = dir.join(format!("real-class-numbers-{width}-{k}.csv"));
    if path.exists() {
        return read_block(&path);
    }
    let rows: Vec<(i64, u64)> = real_class_table(k * width + 1, (k + 1) * width)
        .into_iter()
        .map(|i| (i.discriminant, i.class_number))
        .collect();
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("csv.partial");
    {
        let mut w = csv::Writer::from_path(&tmp).map_err(|e| ExperimentError::Cache(e.to_string()))?;
        w.write_record(["discriminant", "class_number"]).map_err(|e| ExperimentError::Cache(e.to_string()))?;
        for (d, h) in &rows {
            w.write_record([d.to_string(), h.to_string()]).map_err(|e| ExperimentError::Cache(e.to_string()))?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(rows)
}

fn read_block(path: &Path) -> Result<Vec<(i64, u64)>, ExperimentError> {
    let bad = |e: String| ExperimentError::Cache(format!("{}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        let row: (i64, u64) = record.map_err(|e| bad(e.to_string()))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Number of real quadratic fields with fundamental discriminant in
/// `[lo, hi]` for each class number in `h_filter` (every class number when
/// the filter is empty).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Census {
    pub lo: i64,
    pub hi: i64,
    pub fields: usize,
    pub counts: BTreeMap<u64, usize>,
}

pub fn census_real_quadratic_range(
    lo: i64,
    hi: i64,
    h_filter: &[u64],
    cache_dir: Option<&Path>,
) -> Result<Census, ExperimentError> {
    if hi < 5 || lo > hi {
        return Err(ExperimentError::Config(format!("census range [{lo}, {hi}] holds no real discriminants")));
    }
    let table = class_numbers(lo.max(1), hi, cache_dir)?;
    let mut counts: BTreeMap<u64, usize> = h_filter.iter().map(|&h| (h, 0)).collect();
    for &(_, h) in &table {
        if h_filter.is_empty() || h_filter.contains(&h) {
            *counts.entry(h).or_insert(0) += 1;
        }
    }
    Ok(Census { lo: lo.max(1), hi, fields: table.len(), counts })
}

/// Census over `(0, max_disc]`.
pub fn census_real_quadratic(
    max_disc: i64,
    h_filter: &[u64],
    cache_dir: Option<&Path>,
) -> Result<Census, ExperimentError> {
    census_real_quadratic_range(1, max_disc, h_filter, cache_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_census() {
        let c = census_real_quadratic(40, &[1], None).unwrap();
        assert_eq!(c.counts[&1], 11);
        assert_eq!(c.fields, 12);
        let all = census_real_quadratic(40, &[], None).unwrap();
        assert_eq!(all.counts, BTreeMap::from([(1, 11), (2, 1)]));
    }

    #[test]
    fn rejects_empty_range() {
        assert!(census_real_quadratic(4, &[1], None).is_err());
    }

    #[test]
    fn imaginary_and_real_tables() {
        let t = class_numbers(-30, 13, None).unwrap();
        let discs: Vec<i64> = t.iter().map(|r| r.0).collect();
        assert_eq!(discs, vec![-24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 5, 8, 12, 13]);
        assert_eq!(t[1], (-23, 3));
        assert_eq!(t[2], (-20, 2));
    }

    #[test]
    fn cached_blocks_match_direct_computation() {
        let dir = tempfile::tempdir().unwrap();
        let direct = class_numbers(8_500, 31_000, None).unwrap();
        let cached = class_numbers_blocked(8_500, 31_000, Some(dir.path()), 10_000, 1).unwrap();
        assert_eq!(direct, cached);
        assert!(dir.path().join("real-class-numbers-10000-3.csv").exists());
        let again = class_numbers_blocked(8_500, 31_000, Some(dir.path()), 10_000, 1).unwrap();
        assert_eq!(direct, again);
    }
}
