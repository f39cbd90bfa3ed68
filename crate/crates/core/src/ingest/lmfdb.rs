//! Minimal client for the LMFDB number-field API.
//!
//! Requests are issued one page at a time. Every query is cached as a
//! snapshot CSV named after a hash of its canonical form, so repeated queries
//! never touch the network.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{read_snapshot, write_snapshot, FieldRecord, IngestError};
use crate::fields::NumberField;

pub const API_ROOT: &str = "https://www.lmfdb.org/api/nf_fields/";
const PAGE_SIZE: usize = 100;

/// Transitive-group labels for the Galois groups used in the experiments.
const GROUPS: [(&str, &str); 10] = [
    ("C2", "2T1"),
    ("C4", "4T1"),
    ("C2xC2", "4T2"),
    ("C6", "6T1"),
    ("S3", "6T2"),
    ("C8", "8T1"),
    ("C4xC2", "8T2"),
    ("C2xC2xC2", "8T3"),
    ("D4", "8T4"),
    ("Q8", "8T5"),
];

pub fn galois_transitive_label(name: &str) -> Option<&'static str> {
    GROUPS.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|&(_, t)| t)
}

fn galois_name(transitive: &str) -> Option<&'static str> {
    GROUPS.iter().find(|(_, t)| *t == transitive).map(|&(n, _)| n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LmfdbQuery {
    pub degree: u32,
    pub galois: String,
    pub signature: Option<(u32, u32)>,
    pub min_abs_disc: Option<u64>,
    pub max_abs_disc: Option<u64>,
    pub limit: usize,
}

impl LmfdbQuery {
    pub fn new(degree: u32, galois: impl Into<String>, limit: usize) -> Self {
        LmfdbQuery { degree, galois: galois.into(), signature: None, min_abs_disc: None, max_abs_disc: None, limit }
    }

    pub fn canonical(&self) -> String {
        let opt = |v: Option<u64>| v.map_or_else(|| "*".to_string(), |x| x.to_string());
        let sig = self.signature.map_or_else(|| "*".to_string(), |(r1, r2)| format!("{r1},{r2}"));
        format!(
            "degree={};galois={};signature={};disc={}..{};limit={}",
            self.degree,
            self.galois,
            sig,
            opt(self.min_abs_disc),
            opt(self.max_abs_disc),
            self.limit
        )
    }

    pub fn cache_path(&self, cache_dir: &Path) -> PathBuf {
        let digest = Sha256::digest(self.canonical().as_bytes());
        let hex: String = digest.iter().take(12).map(|b| format!("{b:02x}")).collect();
        cache_dir.join(format!("lmfdb-{hex}.csv"))
    }

    fn page_url(&self, offset: usize) -> Result<String, IngestError> {
        let group =
            galois_transitive_label(&self.galois).ok_or_else(|| IngestError::UnknownGroup(self.galois.clone()))?;
        let mut url = format!(
            "{API_ROOT}?_format=json&_fields=label,degree,r2,disc_abs,disc_sign,galois_label,class_number,coeffs&degree=i{}&galois_label={}",
            self.degree, group
        );
        if let Some((_, r2)) = self.signature {
            url.push_str(&format!("&r2=i{r2}"));
        }
        url.push_str(&format!("&_offset={offset}"));
        Ok(url)
    }

    fn accepts(&self, field: &NumberField) -> bool {
        let abs = field.discriminant.magnitude();
        self.signature.is_none_or(|s| s == field.signature)
            && self.min_abs_disc.is_none_or(|m| *abs >= m.into())
            && self.max_abs_disc.is_none_or(|m| *abs <= m.into())
    }
}

/// Blocking HTTP GET returning the response body.
pub trait HttpGet {
    fn get(&self, url: &str) -> Result<String, IngestError>;
}

pub struct UreqTransport;

impl HttpGet for UreqTransport {
    fn get(&self, url: &str) -> Result<String, IngestError> {
        let mut response = ureq::get(url).call().map_err(|e| IngestError::Network(e.to_string()))?;
        response.body_mut().read_to_string().map_err(|e| IngestError::Network(e.to_string()))
    }
}

fn int_field(obj: &Value, key: &str) -> Result<i64, IngestError> {
    obj.get(key).and_then(Value::as_i64).ok_or_else(|| IngestError::Schema(format!("missing integer '{key}'")))
}

/// Converts one API page into validated fields. Returns the fields and the
/// number of raw entries on the page.
pub fn normalize_payload(body: &str) -> Result<(Vec<NumberField>, usize), IngestError> {
    let json: Value = serde_json::from_str(body).map_err(|e| IngestError::Schema(e.to_string()))?;
    let data =
        json.get("data").and_then(Value::as_array).ok_or_else(|| IngestError::Schema("no 'data' array".into()))?;
    let mut fields = Vec::with_capacity(data.len());
    for entry in data {
        let label =
            entry.get("label").and_then(Value::as_str).ok_or_else(|| IngestError::Schema("missing 'label'".into()))?;
        let degree = int_field(entry, "degree")? as u32;
        let r2 = int_field(entry, "r2")? as u32;
        let disc_sign = int_field(entry, "disc_sign")?;
        let disc_abs: BigInt = match entry.get("disc_abs") {
            Some(Value::Number(n)) => n.to_string().parse().ok(),
            Some(Value::String(s)) => s.parse().ok(),
            _ => None,
        }
        .ok_or_else(|| IngestError::Schema(format!("{label}: bad 'disc_abs'")))?;
        let galois_label = entry
            .get("galois_label")
            .and_then(Value::as_str)
            .ok_or_else(|| IngestError::Schema(format!("{label}: missing 'galois_label'")))?;
        let galois = galois_name(galois_label).unwrap_or(galois_label);
        let class_number = entry.get("class_number").and_then(Value::as_u64);
        let coeffs = entry
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| IngestError::Schema(format!("{label}: missing 'coeffs'")))?
            .iter()
            .map(|c| match c {
                Value::Number(n) => Ok(n.to_string()),
                Value::String(s) => Ok(s.clone()),
                _ => Err(IngestError::Schema(format!("{label}: non-integer coefficient"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let record = FieldRecord {
            label: label.to_string(),
            degree,
            r1: degree.checked_sub(2 * r2).ok_or_else(|| IngestError::Schema(format!("{label}: r2 too large")))?,
            r2,
            discriminant: (disc_abs * BigInt::from(disc_sign.signum())).to_string(),
            galois: galois.to_string(),
            class_number,
            poly: coeffs.join(" "),
        };
        fields.push(record.to_field().map_err(|e| IngestError::Schema(format!("{label}: {e}")))?);
    }
    Ok((fields, data.len()))
}

/// Runs `query` against the API (or the cache) and returns at most `limit`
/// fields. A fresh result is written to the cache before returning.
pub fn fetch_lmfdb(query: &LmfdbQuery, cache_dir: &Path, http: &dyn HttpGet) -> Result<Vec<NumberField>, IngestError> {
    if query.limit == 0 {
        return Ok(Vec::new());
    }
    let path = query.cache_path(cache_dir);
    if path.exists() {
        return read_snapshot(&path);
    }
    let mut fields = Vec::new();
    let mut offset = 0;
    while fields.len() < query.limit {
        let body = http.get(&query.page_url(offset)?)?;
        let (page, raw) = normalize_payload(&body)?;
        fields.extend(page.into_iter().filter(|f| query.accepts(f)));
        if raw < PAGE_SIZE {
            break;
        }
        offset += raw;
    }
    fields.truncate(query.limit);
    write_snapshot(&path, &fields)?;
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;

    struct FakeApi {
        pages: Vec<String>,
        calls: RefCell<Vec<String>>,
    }

    impl HttpGet for FakeApi {
        fn get(&self, url: &str) -> Result<String, IngestError> {
            let mut calls = self.calls.borrow_mut();
            let i = calls.len();
            calls.push(url.to_string());
            self.pages.get(i).cloned().ok_or_else(|| IngestError::Network("no more pages".into()))
        }
    }

    fn entry(label: &str, disc: i64, r2: u32, coeffs: &str) -> String {
        format!(
            r#"{{"label":"{label}","degree":2,"r2":{r2},"disc_abs":{},"disc_sign":{},"galois_label":"2T1","class_number":1,"coeffs":[{coeffs}]}}"#,
            disc.abs(),
            disc.signum()
        )
    }

    #[test]
    fn zero_limit_makes_no_request() {
        let api = FakeApi { pages: vec![], calls: RefCell::new(vec![]) };
        let dir = tempfile::tempdir().unwrap();
        let out = fetch_lmfdb(&LmfdbQuery::new(8, "C8", 0), dir.path(), &api).unwrap();
        assert!(out.is_empty());
        assert!(api.calls.borrow().is_empty());
    }

    #[test]
    fn fetches_once_then_serves_cache() {
        let page =
            format!(r#"{{"data":[{},{}]}}"#, entry("2.2.5.1", 5, 0, "-1,-1,1"), entry("2.0.4.1", -4, 1, "1,0,1"));
        let api = FakeApi { pages: vec![page], calls: RefCell::new(vec![]) };
        let dir = tempfile::tempdir().unwrap();
        let q = LmfdbQuery::new(2, "C2", 10);
        let first = fetch_lmfdb(&q, dir.path(), &api).unwrap();
        assert_eq!(first.len(), 2);
        assert_eq!(first[1].galois_group, "C2");
        assert!(api.calls.borrow()[0].contains("galois_label=2T1"));
        let second = fetch_lmfdb(&q, dir.path(), &api).unwrap();
        assert_eq!(first, second);
        assert_eq!(api.calls.borrow().len(), 1);
    }

    #[test]
    fn signature_and_bounds_filter() {
        let page = format!(
            r#"{{"data":[{},{},{}]}}"#,
            entry("2.2.5.1", 5, 0, "-1,-1,1"),
            entry("2.0.4.1", -4, 1, "1,0,1"),
            entry("2.2.8.1", 8, 0, "-2,0,1")
        );
        let api = FakeApi { pages: vec![page], calls: RefCell::new(vec![]) };
        let dir = tempfile::tempdir().unwrap();
        let mut q = LmfdbQuery::new(2, "C2", 10);
        q.signature = Some((2, 0));
        q.max_abs_disc = Some(6);
        let out = fetch_lmfdb(&q, dir.path(), &api).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].label, "2.2.5.1");
    }

    #[test]
    fn network_failure_is_surfaced() {
        let api = FakeApi { pages: vec![], calls: RefCell::new(vec![]) };
        let dir = tempfile::tempdir().unwrap();
        let err = fetch_lmfdb(&LmfdbQuery::new(2, "C2", 5), dir.path(), &api).unwrap_err();
        assert!(matches!(err, IngestError::Network(_)));
        assert!(!LmfdbQuery::new(2, "C2", 5).cache_path(dir.path()).exists());
    }

    #[test]
    fn schema_drift_is_rejected() {
        assert!(matches!(normalize_payload(r#"{"rows":[]}"#), Err(IngestError::Schema(_))));
        let missing = r#"{"data":[{"label":"x","degree":2}]}"#;
        assert!(matches!(normalize_payload(missing), Err(IngestError::Schema(_))));
    }

    #[test]
    fn canonical_query_is_stable() {
        let q = LmfdbQuery::new(8, "D4", 6200);
        assert_eq!(q.canonical(), "degree=8;galois=D4;signature=*;disc=*..*;limit=6200");
        let dir = Path::new("/tmp/cache");
        assert_eq!(q.cache_path(dir), q.clone().cache_path(dir));
        assert_ne!(q.cache_path(dir), LmfdbQuery::new(8, "C8", 6200).cache_path(dir));
        assert_eq!(galois_transitive_label("c2xc2xc2"), Some("8T3"));
    }
}
