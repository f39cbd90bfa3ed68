use serde::{Deserialize, Serialize};

use super::{primes_up_to, ArithError, FactorSieve};

/// Ramification index `e`, residue degree `f` and number of primes `g` above a
/// rational prime `p`. For a Galois field `e * f * g` equals the degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalEulerData {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub g: u32,
}

impl LocalEulerData {
    pub fn new(p: u64, e: u32, f: u32, g: u32) -> Self {
        LocalEulerData { p, e, f, g }
    }

    pub fn split(p: u64, n: u32) -> Self {
        Self::new(p, 1, 1, n)
    }

    pub fn is_ramified(&self) -> bool {
        self.e > 1
    }

    pub fn splits_completely(&self) -> bool {
        self.e == 1 && self.f == 1
    }

    pub fn degree(&self) -> u32 {
        self.e * self.f * self.g
    }
}

/// Number of ideals of norm `p^k` for `k = 0..=max_k`, i.e. the coefficients of
/// `(1 - X^f)^(-g)`: `C(j + g - 1, g - 1)` at `k = f j`, zero elsewhere.
pub fn local_coefficients(local: &LocalEulerData, max_k: u32) -> Result<Vec<u64>, ArithError> {
    let mut out = vec![0u64; max_k as usize + 1];
    let g = u64::from(local.g);
    let mut binom: u64 = 1; // C(j + g - 1, j)
    let mut j: u64 = 0;
    while j * u64::from(local.f) <= u64::from(max_k) {
        out[(j * u64::from(local.f)) as usize] = binom;
        // C(j + g, j + 1) = C(j + g - 1, j) * (j + g) / (j + 1)
        binom = binom.checked_mul(j + g).ok_or(ArithError::Overflow(local.p as usize))? / (j + 1);
        j += 1;
    }
    Ok(out)
}

/// Dirichlet coefficients `a_1..a_cutoff` of the Euler product
/// `prod_p (1 - p^(-f s))^(-g)`. Every prime `p <= cutoff` must have exactly one
/// entry; entries for larger primes are ignored.
///
/// The result is indexed from zero, so `result[n - 1] = a_n`.
pub fn euler_to_dirichlet(locals: &[LocalEulerData], cutoff: usize) -> Result<Vec<u64>, ArithError> {
    if cutoff == 0 {
        return Ok(Vec::new());
    }
    let mut by_prime: Vec<Option<LocalEulerData>> = vec![None; cutoff + 1];
    for l in locals {
        if l.e == 0 || l.f == 0 || l.g == 0 {
            return Err(ArithError::InvalidLocalData { p: l.p, e: l.e, f: l.f, g: l.g });
        }
        if (l.p as usize) <= cutoff {
            let slot = &mut by_prime[l.p as usize];
            if slot.is_some() {
                return Err(ArithError::DuplicatePrime(l.p));
            }
            *slot = Some(*l);
        }
    }
    // coefficients at p^k for each prime p <= cutoff
    let mut local_tables: Vec<Vec<u64>> = vec![Vec::new(); cutoff + 1];
    for p in primes_up_to(cutoff as u64) {
        let local = by_prime[p as usize].ok_or(ArithError::MissingPrime(p))?;
        let mut max_k = 0u32;
        let mut pk = p as usize;
        while pk <= cutoff {
            max_k += 1;
            pk = pk.saturating_mul(p as usize);
        }
        local_tables[p as usize] = local_coefficients(&local, max_k)?;
    }

    let sieve = FactorSieve::new(cutoff);
    let mut a = vec![0u64; cutoff];
    a[0] = 1;
    for n in 2..=cutoff {
        let p = sieve.smallest_factor(n);
        let mut m = n;
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        // a_n = a_{p^k} * a_m with gcd(p, m) = 1
        a[n - 1] = local_tables[p][k].checked_mul(a[m - 1]).ok_or(ArithError::Overflow(n))?;
    }
    Ok(a)
}
