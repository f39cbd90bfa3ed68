use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::arith::IntPolynomial;
use crate::fields::NumberField;

pub const SNAPSHOT_HEADER: [&str; 8] =
    ["label", "degree", "r1", "r2", "discriminant", "galois", "class_number", "poly"];

/// One row of a snapshot file. `poly` holds ascending coefficients including
/// the leading 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub label: String,
    pub degree: u32,
    pub r1: u32,
    pub r2: u32,
    pub discriminant: String,
    pub galois: String,
    pub class_number: Option<u64>,
    pub poly: String,
}

impl FieldRecord {
    pub fn from_field(field: &NumberField) -> Self {
        FieldRecord {
            label: field.label.clone(),
            degree: field.degree,
            r1: field.signature.0,
            r2: field.signature.1,
            discriminant: field.discriminant.to_string(),
            galois: field.galois_group.clone(),
            class_number: field.class_number,
            poly: field.defining_poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
        }
    }

    pub fn to_field(&self) -> Result<NumberField, String> {
        let coeffs = self
            .poly
            .split_whitespace()
            .map(|t| t.parse::<BigInt>().map_err(|_| format!("bad coefficient '{t}'")))
            .collect::<Result<Vec<_>, _>>()?;
        let poly = IntPolynomial::new(coeffs).map_err(|e| e.to_string())?;
        let disc: BigInt =
            self.discriminant.trim().parse().map_err(|_| format!("bad discriminant '{}'", self.discriminant))?;
        if poly.degree() != self.degree as usize {
            return Err(format!("polynomial degree {} but degree column {}", poly.degree(), self.degree));
        }
        NumberField::new(self.label.clone(), (self.r1, self.r2), disc, self.galois.clone(), self.class_number, poly)
            .map_err(|e| e.to_string())
    }
}

/// Parses snapshot CSV text (with header row) into validated fields.
/// Errors carry the 1-based line number of the offending row.
pub fn parse_records<R: Read>(input: R) -> Result<Vec<NumberField>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let mut fields = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in reader.deserialize::<FieldRecord>().enumerate() {
        let line = i + 2;
        let record = row.map_err(|e| IngestError::Line { line, message: e.to_string() })?;
        let field = record.to_field().map_err(|message| IngestError::Line { line, message })?;
        if !seen.insert(field.label.clone()) {
            return Err(IngestError::DuplicateLabel { line, label: field.label });
        }
        fields.push(field);
    }
    Ok(fields)
}

pub fn serialize_records<W: Write>(fields: &[NumberField], out: W) -> Result<(), IngestError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(SNAPSHOT_HEADER)?;
    for field in fields {
        writer.serialize(FieldRecord::from_field(field))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Vec<NumberField>, IngestError> {
    parse_records(std::fs::File::open(path)?)
}

pub fn write_snapshot(path: &Path, fields: &[NumberField]) -> Result<(), IngestError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    serialize_records(fields, file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::{fundamental_discriminants, QuadraticField};
    use proptest::prelude::*;

    const HEADER: &str = "label,degree,r1,r2,discriminant,galois,class_number,poly\n";

    #[test]
    fn parses_real_quadratic_row() {
        let text = format!("{HEADER}2.2.5.1,2,2,0,5,C2,1,-1 -1 1\n");
        let fields = parse_records(text.as_bytes()).unwrap();
        assert_eq!(fields.len(), 1);
        let f = &fields[0];
        assert_eq!(f.class_number, Some(1));
        assert_eq!(f.defining_poly.to_string(), "x^2 - x - 1");
        assert_eq!(f.signature, (2, 0));
    }

    #[test]
    fn empty_input() {
        assert!(parse_records(HEADER.as_bytes()).unwrap().is_empty());
        assert!(parse_records("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn signature_violation_reports_line() {
        let text = format!("{HEADER}2.2.5.1,2,2,0,5,C2,1,-1 -1 1\n2.0.4.1,2,1,1,-4,C2,1,1 0 1\n");
        match parse_records(text.as_bytes()) {
            Err(IngestError::Line { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_malformed() {
        let text = format!("{HEADER}2.2.5.1,2,2,0,5,C2,1,-1 -1 1\n2.2.5.1,2,2,0,5,C2,1,-1 -1 1\n");
        assert!(matches!(parse_records(text.as_bytes()), Err(IngestError::DuplicateLabel { line: 3, .. })));
        let text = format!("{HEADER}2.2.5.1,2,2,0,5,C2,1\n");
        assert!(matches!(parse_records(text.as_bytes()), Err(IngestError::Line { line: 2, .. })));
        let text = format!("{HEADER}2.2.5.1,2,2,0,five,C2,1,-1 -1 1\n");
        assert!(matches!(parse_records(text.as_bytes()), Err(IngestError::Line { line: 2, .. })));
    }

    #[test]
    fn empty_class_number() {
        let text = format!("{HEADER}2.0.4.1,2,0,1,-4,C2,,1 0 1\n");
        assert_eq!(parse_records(text.as_bytes()).unwrap()[0].class_number, None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(picks in proptest::collection::vec((0usize..2000, any::<bool>()), 0..12)) {
            let discs = fundamental_discriminants(-2000, 2000);
            let mut fields: Vec<NumberField> = Vec::new();
            let mut seen = HashSet::new();
            for (i, with_h) in picks {
                let d = discs[i % discs.len()];
                if !seen.insert(d) { continue; }
                let q = QuadraticField::from_discriminant(d).unwrap();
                fields.push(NumberField::quadratic_with(&q, with_h.then_some(i as u64 % 7 + 1)));
            }
            let mut buf = Vec::new();
            serialize_records(&fields, &mut buf).unwrap();
            prop_assert_eq!(parse_records(buf.as_slice()).unwrap(), fields);
        }
    }
}
