//! Binary quadratic forms and class numbers of quadratic fields.
//!
//! Imaginary fields count reduced positive-definite forms. Real fields count
//! cycles of reduced indefinite forms under the reduction operator `rho`,
//! which gives the narrow class number `h+`; the norm of the fundamental unit
//! (read from the parity of a continued-fraction period) then decides between
//! `h = h+` and `h = h+ / 2`.

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use super::{is_fundamental, QuadraticError};
use crate::arith::FactorSieve;

/// The form `a x^2 + b x y + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryQuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQuadraticForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Reduced positive definite: `|b| <= a <= c`, and `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced_definite(&self) -> bool {
        self.a > 0
            && self.discriminant() < 0
            && self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// Reduced indefinite: `|sqrt(D) - 2|a|| < b < sqrt(D)`.
    pub fn is_reduced_indefinite(&self) -> bool {
        let d = self.discriminant();
        if d <= 0 {
            return false;
        }
        let s = d.sqrt();
        if s * s == d {
            return false;
        }
        // b < sqrt(D) <=> b <= s;  sqrt(D) - 2|a| < b <=> b + 2|a| >= s + 1;
        // 2|a| - sqrt(D) < b <=> 2|a| - b <= s
        let two_a = 2 * self.a.abs();
        self.b > 0 && self.b <= s && self.b + two_a > s && two_a - self.b <= s
    }

    /// One step of the indefinite reduction operator: `(a, b, c) -> (c, r, (r^2 - D) / 4c)`
    /// with `r = -b mod 2|c|` chosen in the reduced window. `sqrt_floor` is `floor(sqrt(D))`
    /// and `|c| < sqrt(D)` is required, which holds for reduced forms.
    pub fn rho(&self, d: i64, sqrt_floor: i64) -> Self {
        let two_c = 2 * self.c.abs();
        let r = sqrt_floor - (sqrt_floor + self.b).rem_euclid(two_c);
        BinaryQuadraticForm::new(self.c, r, (r * r - d) / (4 * self.c))
    }
}

/// All reduced positive definite forms of discriminant `d < 0`, sorted.
pub fn reduced_definite_forms(d: i64) -> Vec<BinaryQuadraticForm> {
    assert!(d < 0 && d.rem_euclid(4) <= 1);
    let n = -d;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = -a + 1;
        if (b - d).rem_euclid(2) != 0 {
            b += 1;
        }
        while b <= a {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let form = BinaryQuadraticForm::new(a, b, c);
                if form.is_reduced_definite() {
                    out.push(form);
                }
            }
            b += 2;
        }
        a += 1;
    }
    out.sort();
    out
}

/// Class number of the imaginary quadratic field with fundamental discriminant `d < 0`.
pub fn class_number_imaginary(d: i64) -> Result<u64, QuadraticError> {
    if d >= 0 {
        return Err(QuadraticError::WrongSign(d));
    }
    if !is_fundamental(d) {
        return Err(QuadraticError::NotFundamental(d));
    }
    Ok(reduced_definite_forms(d).len() as u64)
}

/// Length of the period of the continued fraction of `omega_D`, where
/// `omega_D = (1 + sqrt D) / 2` for `D = 1 mod 4` and `sqrt(D / 4)` otherwise.
pub fn continued_fraction_period(d: i64) -> usize {
    assert!(d > 1);
    let (radicand, mut p, mut q) = if d % 4 == 1 { (d, 1i64, 2i64) } else { (d / 4, 0, 1) };
    let s = radicand.sqrt();
    assert!(s * s != radicand, "{d} is a square");
    let step = |p: &mut i64, q: &mut i64| {
        let a = (*p + s) / *q;
        *p = a * *q - *p;
        *q = (radicand - *p * *p) / *q;
    };
    step(&mut p, &mut q);
    let start = (p, q);
    let mut len = 0;
    loop {
        step(&mut p, &mut q);
        len += 1;
        if (p, q) == start {
            return len;
        }
    }
}

/// Norm (+1 or -1) of the fundamental unit of the real quadratic field of discriminant `d`.
pub fn fundamental_unit_norm(d: i64) -> i8 {
    if continued_fraction_period(d) % 2 == 1 {
        -1
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealClassInfo {
    pub discriminant: i64,
    pub class_number: u64,
    pub narrow_class_number: u64,
    pub unit_norm: i8,
}

/// Reusable state for computing many real class numbers: a factor sieve for
/// `(D - b^2) / 4` and scratch buffers.
pub struct RealClassEngine {
    sieve: FactorSieve,
    max_disc: i64,
}

impl RealClassEngine {
    pub fn new(max_disc: i64) -> Self {
        let max_disc = max_disc.max(5);
        RealClassEngine { sieve: FactorSieve::new((max_disc / 4) as usize + 1), max_disc }
    }

    pub fn max_disc(&self) -> i64 {
        self.max_disc
    }

    /// Reduced indefinite forms of discriminant `d` with `a > 0`, sorted by `(a, b)`.
    pub fn positive_reduced_forms(&self, d: i64) -> Vec<BinaryQuadraticForm> {
        let mut forms = Vec::new();
        let mut divisors = Vec::new();
        self.collect_positive_forms(d, &mut forms, &mut divisors);
        forms
    }

    fn collect_positive_forms(&self, d: i64, forms: &mut Vec<BinaryQuadraticForm>, divisors: &mut Vec<usize>) {
        assert!(d <= self.max_disc, "discriminant {d} beyond engine bound {}", self.max_disc);
        forms.clear();
        let s = d.sqrt();
        let mut b = if d % 2 == 0 { 2 } else { 1 };
        while b <= s {
            let m = (d - b * b) / 4;
            // need s + 1 - b <= 2a <= s + b
            let lo = (s + 2 - b) / 2;
            let hi = (s + b) / 2;
            if hi >= lo.max(1) {
                self.sieve.divisors_into(m as usize, divisors);
                for &a in divisors.iter() {
                    let a = a as i64;
                    if a >= lo && a <= hi {
                        forms.push(BinaryQuadraticForm::new(a, b, -(m / a)));
                    }
                }
            }
            b += 2;
        }
        forms.sort_unstable_by_key(|f| (f.a, f.b));
    }

    /// Number of `rho`-cycles of reduced forms of discriminant `d`, i.e. `h+`.
    pub fn narrow_class_number(&self, d: i64) -> u64 {
        let forms = self.positive_reduced_forms(d);
        count_cycles(d, &forms)
    }

    pub fn info(&self, d: i64) -> Result<RealClassInfo, QuadraticError> {
        if d <= 0 {
            return Err(QuadraticError::WrongSign(d));
        }
        if !is_fundamental(d) {
            return Err(QuadraticError::NotFundamental(d));
        }
        let narrow = self.narrow_class_number(d);
        let unit_norm = fundamental_unit_norm(d);
        let class_number = if unit_norm == -1 { narrow } else { narrow / 2 };
        Ok(RealClassInfo { discriminant: d, class_number, narrow_class_number: narrow, unit_norm })
    }
}

fn count_cycles(d: i64, forms: &[BinaryQuadraticForm]) -> u64 {
    let s = d.sqrt();
    let mut visited = vec![false; forms.len()];
    let mut cycles = 0;
    for start in 0..forms.len() {
        if visited[start] {
            continue;
        }
        cycles += 1;
        let mut cur = forms[start];
        loop {
            let idx = forms.binary_search_by_key(&(cur.a, cur.b), |f| (f.a, f.b)).expect("rho keeps forms reduced");
            if visited[idx] {
                break;
            }
            visited[idx] = true;
            cur = cur.rho(d, s).rho(d, s);
        }
    }
    cycles
}

/// Class number of the real quadratic field with fundamental discriminant `d > 0`.
pub fn class_number_real(d: i64) -> Result<u64, QuadraticError> {
    real_class_info(d).map(|i| i.class_number)
}

pub fn real_class_info(d: i64) -> Result<RealClassInfo, QuadraticError> {
    if d <= 0 {
        return Err(QuadraticError::WrongSign(d));
    }
    RealClassEngine::new(d).info(d)
}
