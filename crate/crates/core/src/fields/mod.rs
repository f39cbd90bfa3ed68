//! General Galois number fields and their three feature encodings.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    euler_to_dirichlet, first_primes, primes_up_to, ArithError, IntPolynomial, LocalEulerData, SplittingContext,
};
use crate::quadratic::QuadraticField;

/// Default length of zeta-coefficient vectors.
pub const ZETA_LENGTH: usize = 1000;
/// Default number of primes in split-prime vectors (the 500th prime is 3571).
pub const SPLIT_LENGTH: usize = 500;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("signature ({r1}, {r2}) does not match degree {degree}")]
    Signature { degree: u32, r1: u32, r2: u32 },
    #[error("discriminant sign does not match r2 = {0}")]
    DiscriminantSign(u32),
    #[error("discriminant must be nonzero")]
    ZeroDiscriminant,
    #[error("degree must be at least 2, got {0}")]
    Degree(u32),
    #[error("defining polynomial has degree {poly} but field degree is {field}")]
    PolyDegree { poly: usize, field: u32 },
    #[error("defining polynomial is not monic")]
    NotMonic,
    #[error("coefficient {0} does not fit in 64 bits")]
    CoefficientOverflow(String),
    #[error("unknown encoding '{0}'")]
    UnknownEncoding(String),
    #[error("invalid {encoding} vector: {reason}")]
    InvalidVector { encoding: Encoding, reason: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Identifies a Galois number field `F` together with the invariants the
/// experiments use as labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberField {
    pub label: String,
    pub degree: u32,
    pub signature: (u32, u32),
    pub discriminant: BigInt,
    pub galois_group: String,
    pub class_number: Option<u64>,
    pub defining_poly: IntPolynomial,
}

impl NumberField {
    pub fn new(
        label: impl Into<String>,
        signature: (u32, u32),
        discriminant: BigInt,
        galois_group: impl Into<String>,
        class_number: Option<u64>,
        defining_poly: IntPolynomial,
    ) -> Result<Self, FieldError> {
        let degree = defining_poly.degree() as u32;
        let field = NumberField {
            label: label.into(),
            degree,
            signature,
            discriminant,
            galois_group: galois_group.into(),
            class_number,
            defining_poly,
        };
        field.validate()?;
        Ok(field)
    }

    /// Checks `r1 + 2 r2 = n`, `sgn(disc) = (-1)^r2`, monic polynomial of degree `n >= 2`.
    pub fn validate(&self) -> Result<(), FieldError> {
        let (r1, r2) = self.signature;
        if self.degree < 2 {
            return Err(FieldError::Degree(self.degree));
        }
        if r1 + 2 * r2 != self.degree {
            return Err(FieldError::Signature { degree: self.degree, r1, r2 });
        }
        if self.discriminant.is_zero() {
            return Err(FieldError::ZeroDiscriminant);
        }
        if self.discriminant.is_negative() != (r2 % 2 == 1) {
            return Err(FieldError::DiscriminantSign(r2));
        }
        if self.defining_poly.degree() != self.degree as usize {
            return Err(FieldError::PolyDegree { poly: self.defining_poly.degree(), field: self.degree });
        }
        if !self.defining_poly.is_monic() {
            return Err(FieldError::NotMonic);
        }
        Ok(())
    }

    /// The quadratic field with its LMFDB-style label and exact class number.
    pub fn quadratic(field: &QuadraticField, with_class_number: bool) -> Self {
        Self::quadratic_with(field, with_class_number.then(|| field.class_number()))
    }

    pub fn quadratic_with(field: &QuadraticField, class_number: Option<u64>) -> Self {
        let (r1, r2) = field.signature();
        NumberField {
            label: format!("2.{}.{}.1", r1, field.discriminant().unsigned_abs()),
            degree: 2,
            signature: (r1, r2),
            discriminant: BigInt::from(field.discriminant()),
            galois_group: "C2".to_string(),
            class_number,
            defining_poly: field.defining_poly(),
        }
    }

    pub fn unit_rank(&self) -> u32 {
        unit_rank(self.signature)
    }

    pub fn splitting_context(&self) -> Result<SplittingContext, FieldError> {
        Ok(SplittingContext::new(self.defining_poly.clone(), self.discriminant.clone())?)
    }
}

/// Dirichlet's unit theorem: `r1 + r2 - 1`.
pub fn unit_rank(signature: (u32, u32)) -> u32 {
    let (r1, r2) = signature;
    (r1 + r2).saturating_sub(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Poly,
    Zeta,
    Split,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Poly => "poly",
            Encoding::Zeta => "zeta",
            Encoding::Split => "split",
        })
    }
}

impl FromStr for Encoding {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "poly" => Ok(Encoding::Poly),
            "zeta" => Ok(Encoding::Zeta),
            "split" => Ok(Encoding::Split),
            _ => Err(FieldError::UnknownEncoding(s.to_string())),
        }
    }
}

/// An encoded field. `uncertain_primes` lists primes whose local data could
/// not be read reliably from the defining polynomial (zeta and split only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub encoding: Encoding,
    pub values: Vec<i64>,
    pub uncertain_primes: Vec<u64>,
}

impl FeatureVector {
    pub fn new(encoding: Encoding, values: Vec<i64>) -> Result<Self, FieldError> {
        let invalid = |reason: &str| FieldError::InvalidVector { encoding, reason: reason.to_string() };
        match encoding {
            Encoding::Zeta if values.first() != Some(&1) => return Err(invalid("a_1 must equal 1")),
            Encoding::Split if values.iter().any(|&v| v != 0 && v != 1) => {
                return Err(invalid("entries must be 0 or 1"))
            }
            Encoding::Poly if values.is_empty() => return Err(invalid("empty coefficient vector")),
            _ => {}
        }
        Ok(FeatureVector { encoding, values, uncertain_primes: Vec::new() })
    }

    pub fn is_uncertain(&self) -> bool {
        !self.uncertain_primes.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }
}

/// `(c_0, ..., c_{n-1})`: the defining polynomial without its leading 1.
pub fn poly_vector(field: &NumberField) -> Result<FeatureVector, FieldError> {
    if !field.defining_poly.is_monic() {
        return Err(FieldError::NotMonic);
    }
    let coeffs = field.defining_poly.coeffs();
    let values = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.to_i64().ok_or_else(|| FieldError::CoefficientOverflow(c.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    FeatureVector::new(Encoding::Poly, values)
}

fn local_data(field: &NumberField, primes: &[u64]) -> Result<(Vec<LocalEulerData>, Vec<u64>), FieldError> {
    let mut locals = Vec::with_capacity(primes.len());
    let mut uncertain = Vec::new();
    if field.degree == 2 {
        if let Some(d) = field.discriminant.to_i64() {
            if let Ok(q) = QuadraticField::from_discriminant(d) {
                locals.extend(primes.iter().map(|&p| q.local_data(p)));
                return Ok((locals, uncertain));
            }
        }
    }
    let ctx = field.splitting_context()?;
    for &p in primes {
        let s = ctx.local(p)?;
        if s.uncertain {
            uncertain.push(p);
        }
        locals.push(s.data);
    }
    Ok((locals, uncertain))
}

/// `(a_1, ..., a_cutoff)`, the Dirichlet coefficients of the Dedekind zeta function.
pub fn zeta_vector(field: &NumberField, cutoff: usize) -> Result<FeatureVector, FieldError> {
    let primes = primes_up_to(cutoff as u64);
    let (locals, uncertain) = local_data(field, &primes)?;
    let coeffs = euler_to_dirichlet(&locals, cutoff)?;
    let mut v = FeatureVector::new(Encoding::Zeta, coeffs.into_iter().map(|a| a as i64).collect())?;
    v.uncertain_primes = uncertain;
    Ok(v)
}

/// Zeta coefficients computed only through factorization of the defining
/// polynomial modulo each prime, never through the quadratic shortcut.
pub fn zeta_vector_from_polynomial(field: &NumberField, cutoff: usize) -> Result<FeatureVector, FieldError> {
    let ctx = field.splitting_context()?;
    let mut locals = Vec::new();
    let mut uncertain = Vec::new();
    for p in primes_up_to(cutoff as u64) {
        let s = ctx.local(p)?;
        if s.uncertain {
            uncertain.push(p);
        }
        locals.push(s.data);
    }
    let coeffs = euler_to_dirichlet(&locals, cutoff)?;
    let mut v = FeatureVector::new(Encoding::Zeta, coeffs.into_iter().map(|a| a as i64).collect())?;
    v.uncertain_primes = uncertain;
    Ok(v)
}

/// `(delta_1, ..., delta_k)` with `delta_i = 1` iff the `i`-th prime splits completely.
pub fn split_vector(field: &NumberField, k: usize) -> Result<FeatureVector, FieldError> {
    let primes = first_primes(k);
    let (locals, uncertain) = local_data(field, &primes)?;
    let values = locals.iter().map(|l| i64::from(l.splits_completely() && l.g == field.degree)).collect();
    let mut v = FeatureVector::new(Encoding::Split, values)?;
    v.uncertain_primes = uncertain;
    Ok(v)
}

/// Encodes one field with the default lengths for zeta and split vectors
/// unless `length` overrides them.
pub fn encode(field: &NumberField, encoding: Encoding, length: Option<usize>) -> Result<FeatureVector, FieldError> {
    match encoding {
        Encoding::Poly => poly_vector(field),
        Encoding::Zeta => zeta_vector(field, length.unwrap_or(ZETA_LENGTH)),
        Encoding::Split => split_vector(field, length.unwrap_or(SPLIT_LENGTH)),
    }
}

/// Encodes many fields in parallel; output order follows the input.
pub fn encode_batch(
    fields: &[NumberField],
    encoding: Encoding,
    length: Option<usize>,
) -> Result<Vec<FeatureVector>, FieldError> {
    use rayon::prelude::*;
    fields.par_iter().map(|f| encode(f, encoding, length)).collect()
}
