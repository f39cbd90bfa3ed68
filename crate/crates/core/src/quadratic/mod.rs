//! Quadratic fields generated natively: fundamental discriminants, exact
//! class numbers and the three feature encodings.

mod forms;

pub use forms::{
    class_number_imaginary, class_number_real, continued_fraction_period, fundamental_unit_norm, real_class_info,
    reduced_definite_forms, BinaryQuadraticForm, RealClassEngine, RealClassInfo,
};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    euler_to_dirichlet, first_primes, kronecker, primes_up_to, ArithError, IntPolynomial, LocalEulerData,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadraticError {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("discriminant {0} has the wrong sign for this operation")]
    WrongSign(i64),
    #[error("{0} is not a squarefree integer other than 0 and 1")]
    NotSquarefree(i64),
    #[error("empty range [{0}, {1}]")]
    EmptyRange(i64, i64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    let n = n.unsigned_abs();
    if n.is_multiple_of(4) {
        return false;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 2;
    }
    true
}

pub fn is_fundamental(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => d != 1 && is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Squarefree indicator for `0..=n` (index 0 is false).
fn squarefree_table(n: usize) -> Vec<bool> {
    let mut table = vec![true; n + 1];
    table[0] = false;
    let mut p = 2usize;
    while p * p <= n {
        let sq = p * p;
        let mut j = sq;
        while j <= n {
            table[j] = false;
            j += sq;
        }
        p += 1;
    }
    table
}

/// Every fundamental discriminant in `[lo, hi]`, ascending.
pub fn fundamental_discriminants(lo: i64, hi: i64) -> Vec<i64> {
    if lo > hi {
        return Vec::new();
    }
    let bound = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
    let sqf = squarefree_table(bound);
    let is_sqf = |n: i64| sqf[n.unsigned_abs() as usize];
    (lo..=hi)
        .filter(|&d| match d.rem_euclid(4) {
            1 => d != 1 && is_sqf(d),
            0 => d != 0 && matches!((d / 4).rem_euclid(4), 2 | 3) && is_sqf(d / 4),
            _ => false,
        })
        .collect()
}

/// `Q(sqrt d)` for squarefree `d != 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadraticField {
    squarefree_d: i64,
    discriminant: i64,
}

impl QuadraticField {
    pub fn from_squarefree(d: i64) -> Result<Self, QuadraticError> {
        if d == 1 || !is_squarefree(d) {
            return Err(QuadraticError::NotSquarefree(d));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(QuadraticField { squarefree_d: d, discriminant })
    }

    pub fn from_discriminant(disc: i64) -> Result<Self, QuadraticError> {
        if !is_fundamental(disc) {
            return Err(QuadraticError::NotFundamental(disc));
        }
        let d = if disc.rem_euclid(4) == 1 { disc } else { disc / 4 };
        Ok(QuadraticField { squarefree_d: d, discriminant: disc })
    }

    pub fn squarefree_d(&self) -> i64 {
        self.squarefree_d
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn is_real(&self) -> bool {
        self.discriminant > 0
    }

    /// `(r1, r2)`.
    pub fn signature(&self) -> (u32, u32) {
        if self.is_real() {
            (2, 0)
        } else {
            (0, 1)
        }
    }

    pub fn class_number(&self) -> u64 {
        if self.is_real() { class_number_real(self.discriminant) } else { class_number_imaginary(self.discriminant) }
            .expect("discriminant is fundamental by construction")
    }

    pub fn defining_poly(&self) -> IntPolynomial {
        defining_poly_quadratic(self.squarefree_d).expect("validated on construction")
    }

    pub fn local_data(&self, p: u64) -> LocalEulerData {
        local_data_quadratic(self.discriminant, p)
    }
}

/// Splitting of `p` in the quadratic field of discriminant `disc`, read from the
/// Kronecker symbol.
pub fn local_data_quadratic(disc: i64, p: u64) -> LocalEulerData {
    match kronecker(disc, p as i64) {
        1 => LocalEulerData::new(p, 1, 1, 2),
        -1 => LocalEulerData::new(p, 1, 2, 1),
        _ => LocalEulerData::new(p, 2, 1, 1),
    }
}

/// LMFDB-normalized defining polynomial: `x^2 - x - (d-1)/4` when `d = 1 mod 4`,
/// otherwise `x^2 - d`.
pub fn defining_poly_quadratic(d: i64) -> Result<IntPolynomial, QuadraticError> {
    if d == 1 || !is_squarefree(d) {
        return Err(QuadraticError::NotSquarefree(d));
    }
    let coeffs = if d.rem_euclid(4) == 1 { [-(d - 1) / 4, -1, 1] } else { [-d, 0, 1] };
    Ok(IntPolynomial::monic(coeffs.iter().map(|&c| BigInt::from(c)).collect())?)
}

/// Dedekind zeta coefficients `a_1..a_cutoff`; `result[n - 1] = a_n`.
pub fn zeta_coeffs_quadratic(disc: i64, cutoff: usize) -> Result<Vec<u64>, QuadraticError> {
    if !is_fundamental(disc) {
        return Err(QuadraticError::NotFundamental(disc));
    }
    let locals: Vec<LocalEulerData> =
        primes_up_to(cutoff as u64).into_iter().map(|p| local_data_quadratic(disc, p)).collect();
    Ok(euler_to_dirichlet(&locals, cutoff)?)
}

/// Split-completely indicators over the first `k` primes.
pub fn split_vector_quadratic(disc: i64, k: usize) -> Result<Vec<u8>, QuadraticError> {
    if !is_fundamental(disc) {
        return Err(QuadraticError::NotFundamental(disc));
    }
    Ok(first_primes(k).into_iter().map(|p| u8::from(kronecker(disc, p as i64) == 1)).collect())
}

/// Class data for every real fundamental discriminant in `[lo, hi]`, in
/// discriminant order. Work is spread over the current rayon pool in chunks.
pub fn real_class_table(lo: i64, hi: i64) -> Vec<RealClassInfo> {
    use rayon::prelude::*;

    let discs = fundamental_discriminants(lo.max(5), hi);
    if discs.is_empty() {
        return Vec::new();
    }
    let engine = RealClassEngine::new(hi);
    discs
        .par_chunks(2048)
        .flat_map_iter(|chunk| chunk.iter().map(|&d| engine.info(d).expect("fundamental by construction")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn divisor_sum(disc: i64, n: usize) -> u64 {
        let s: i64 = (1..=n as i64).filter(|d| n as i64 % d == 0).map(|d| i64::from(kronecker(disc, d))).sum();
        s as u64
    }

    #[test]
    fn fundamental_discriminant_ranges() {
        assert_eq!(fundamental_discriminants(1, 40), vec![5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40]);
        assert_eq!(fundamental_discriminants(-10, -1), vec![-8, -7, -4, -3]);
        assert!(fundamental_discriminants(2, 4).is_empty());
        assert!(fundamental_discriminants(5, 4).is_empty());
        let all = fundamental_discriminants(-3000, 3000);
        let brute: Vec<i64> = (-3000..=3000).filter(|&d| is_fundamental(d)).collect();
        assert_eq!(all, brute);
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_coeffs_quadratic(-4, 10).unwrap(), vec![1, 1, 0, 1, 2, 0, 0, 1, 1, 2]);
        assert_eq!(zeta_coeffs_quadratic(5, 5).unwrap(), vec![1, 0, 0, 1, 1]);
        assert_eq!(zeta_coeffs_quadratic(-163, 1).unwrap(), vec![1]);
        assert!(zeta_coeffs_quadratic(20, 10).is_err());
    }

    #[test]
    fn zeta_matches_divisor_sum_small() {
        for disc in fundamental_discriminants(-200, 200) {
            let a = zeta_coeffs_quadratic(disc, 300).unwrap();
            for n in 1..=300 {
                assert_eq!(a[n - 1], divisor_sum(disc, n), "D = {disc}, n = {n}");
            }
        }
    }

    #[test]
    fn split_vectors() {
        assert_eq!(split_vector_quadratic(5, 5).unwrap(), vec![0, 0, 0, 0, 1]);
        assert_eq!(split_vector_quadratic(-4, 6).unwrap(), vec![0, 0, 1, 0, 0, 1]);
        let primes = first_primes(500);
        for disc in [5i64, -4, 8, -163, 12, 221] {
            let v = split_vector_quadratic(disc, 500).unwrap();
            assert_eq!(v.len(), 500);
            for (i, &p) in primes.iter().enumerate() {
                if disc % p as i64 == 0 {
                    assert_eq!(v[i], 0);
                }
            }
        }
    }

    #[test]
    fn defining_polynomials() {
        assert_eq!(defining_poly_quadratic(5).unwrap().to_string(), "x^2 - x - 1");
        assert_eq!(defining_poly_quadratic(2).unwrap().to_string(), "x^2 - 2");
        assert_eq!(defining_poly_quadratic(-1).unwrap().to_string(), "x^2 + 1");
        assert_eq!(defining_poly_quadratic(12), Err(QuadraticError::NotSquarefree(12)));
        assert_eq!(defining_poly_quadratic(1), Err(QuadraticError::NotSquarefree(1)));
        for d in -300i64..300 {
            if d == 1 || !is_squarefree(d) {
                continue;
            }
            let field = QuadraticField::from_squarefree(d).unwrap();
            let disc = field.defining_poly().discriminant();
            assert_eq!(disc, BigInt::from(field.discriminant()));
        }
    }

    #[test]
    fn field_invariants() {
        for disc in fundamental_discriminants(-500, 500) {
            let f = QuadraticField::from_discriminant(disc).unwrap();
            assert!(matches!(disc.rem_euclid(4), 0 | 1));
            let (_, r2) = f.signature();
            assert_eq!(disc.signum(), if r2 % 2 == 0 { 1 } else { -1 });
            assert_eq!(QuadraticField::from_squarefree(f.squarefree_d()).unwrap(), f);
        }
    }

    #[test]
    fn heegner_discriminants() {
        let h1: Vec<i64> = fundamental_discriminants(-200, -1)
            .into_iter()
            .filter(|&d| class_number_imaginary(d).unwrap() == 1)
            .collect();
        assert_eq!(h1, vec![-163, -67, -43, -19, -11, -8, -7, -4, -3]);
    }
}
