/// All primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// The first `k` rational primes, ascending.
pub fn first_primes(k: usize) -> Vec<u64> {
    if k == 0 {
        return Vec::new();
    }
    // p_k < k (ln k + ln ln k) for k >= 6
    let kf = k.max(6) as f64;
    let bound = (kf * (kf.ln() + kf.ln().ln())).ceil() as u64 + 1;
    let mut primes = primes_up_to(bound);
    primes.truncate(k);
    primes
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest-prime-factor table for fast factorization of integers up to a bound.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(bound: usize) -> Self {
        let n = bound.max(1);
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            let mut j = i.saturating_mul(i);
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        FactorSieve { spf }
    }

    pub fn bound(&self) -> usize {
        self.spf.len() - 1
    }

    /// Prime factorization as `(p, exponent)` pairs, ascending in `p`.
    pub fn factor(&self, mut n: usize) -> Vec<(u64, u32)> {
        assert!(n >= 1 && n <= self.bound(), "{n} outside sieve range");
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    /// Smallest prime factor of `n` (`n >= 2`).
    #[inline]
    pub fn smallest_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    /// Writes every divisor of `n` into `out` (unordered).
    pub fn divisors_into(&self, mut n: usize, out: &mut Vec<usize>) {
        out.clear();
        out.push(1);
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            let len = out.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
    }
}
