use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ArithError;

/// Polynomial with integer coefficients stored in ascending order `c_0..c_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Builds a polynomial from ascending coefficients; trailing zeros are dropped.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, ArithError> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(ArithError::ConstantPolynomial);
        }
        Ok(IntPolynomial { coeffs })
    }

    /// Like [`IntPolynomial::new`] but also requires a leading coefficient of 1.
    pub fn monic(coeffs: Vec<BigInt>) -> Result<Self, ArithError> {
        let p = Self::new(coeffs)?;
        if !p.leading().is_one() {
            return Err(ArithError::NotMonic(p.leading().to_string()));
        }
        Ok(p)
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, ArithError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty by construction")
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn derivative(&self) -> Vec<BigInt> {
        self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
    }

    /// Discriminant `(-1)^(n(n-1)/2) Res(P, P') / lc(P)`.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        if n == 1 {
            return BigInt::one();
        }
        let res = resultant(&self.coeffs, &self.derivative());
        let d = res / self.leading();
        if (n * (n - 1) / 2) % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !abs.is_one() || i == 0;
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Resultant of two polynomials (ascending coefficients) via the Sylvester
/// matrix and fraction-free Bareiss elimination.
fn resultant(p: &[BigInt], q: &[BigInt]) -> BigInt {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (j, c) in p.iter().rev().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in q.iter().rev().enumerate() {
            mat[n + row][row + j] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut mat: Vec<Vec<BigInt>>) -> BigInt {
    let size = mat.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..size {
        if mat[k][k].is_zero() {
            match (k + 1..size).find(|&r| !mat[r][k].is_zero()) {
                Some(r) => {
                    mat.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let v = (&mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j]) / &prev;
                mat[i][j] = v;
            }
        }
        prev = mat[k][k].clone();
    }
    sign * &mat[size - 1][size - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn quadratic_discriminants() {
        assert_eq!(poly(&[-5, 0, 1]).discriminant(), BigInt::from(20));
        assert_eq!(poly(&[-1, -1, 1]).discriminant(), BigInt::from(5));
        assert_eq!(poly(&[1, 0, 1]).discriminant(), BigInt::from(-4));
        // b^2 - 4ac for every small quadratic
        for a in 1..4i64 {
            for b in -6..6i64 {
                for c in -6..6i64 {
                    if c == 0 {
                        continue;
                    }
                    assert_eq!(poly(&[c, b, a]).discriminant(), BigInt::from(b * b - 4 * a * c));
                }
            }
        }
    }

    #[test]
    fn depressed_cubic_discriminant() {
        for p in -5..5i64 {
            for q in -5..5i64 {
                let expected = -4 * p * p * p - 27 * q * q;
                assert_eq!(poly(&[q, p, 0, 1]).discriminant(), BigInt::from(expected));
            }
        }
    }

    #[test]
    fn cyclotomic_discriminants() {
        // disc(Phi_5) = 5^3, disc(Phi_8) = 2^8, disc(Phi_7) = -7^5
        assert_eq!(poly(&[1, 1, 1, 1, 1]).discriminant(), BigInt::from(125));
        assert_eq!(poly(&[1, 0, 0, 0, 1]).discriminant(), BigInt::from(256));
        assert_eq!(poly(&[1, 1, 1, 1, 1, 1, 1]).discriminant(), BigInt::from(-16807));
    }

    #[test]
    fn discriminant_from_roots() {
        // (x-1)(x-2)(x+3)(x-5): product of squared root differences
        let roots = [1i64, 2, -3, 5];
        let mut expected = 1i64;
        for i in 0..4 {
            for j in i + 1..4 {
                expected *= (roots[i] - roots[j]).pow(2);
            }
        }
        // expand
        let mut c = vec![1i64];
        for r in roots {
            let mut next = vec![0i64; c.len() + 1];
            for (i, v) in c.iter().enumerate() {
                next[i + 1] += v;
                next[i] -= r * v;
            }
            c = next;
        }
        assert_eq!(poly(&c).discriminant(), BigInt::from(expected));
    }

    #[test]
    fn rejects_constant_and_non_monic() {
        assert_eq!(IntPolynomial::from_i64(&[3]), Err(ArithError::ConstantPolynomial));
        assert!(matches!(IntPolynomial::monic(vec![BigInt::from(1), BigInt::from(2)]), Err(ArithError::NotMonic(_))));
    }

    #[test]
    fn display() {
        assert_eq!(poly(&[-1, -1, 1]).to_string(), "x^2 - x - 1");
        assert_eq!(poly(&[1, 0, 1]).to_string(), "x^2 + 1");
    }
}
