//! Factorization shape of a defining polynomial modulo a prime.
//!
//! Only the degrees of the distinct irreducible factors are needed, so the
//! shape is read from successive `gcd(x^(p^d) - x, P mod p)` without a full
//! factorization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{is_prime, ArithError, IntPolynomial, LocalEulerData};

/// Dense polynomial over `F_p`, ascending, no trailing zeros (empty = 0).
type Fp = Vec<u64>;

fn trim(a: &mut Fp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn make_monic(a: &mut Fp, p: u64) {
    if let Some(&lc) = a.last() {
        if lc != 1 {
            let inv = inv_mod(lc, p);
            for c in a.iter_mut() {
                *c = *c * inv % p;
            }
        }
    }
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn rem(a: &Fp, m: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    let dm = m.len() - 1;
    let lc_inv = inv_mod(*m.last().unwrap(), p);
    while r.len() > dm {
        let lead = *r.last().unwrap() * lc_inv % p;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - lead * c % p) % p;
            }
        }
        r.pop();
        trim(&mut r);
    }
    trim(&mut r);
    r
}

/// Exact quotient `a / m` for monic `m` dividing `a`.
fn div_exact(a: &Fp, m: &Fp, p: u64) -> Fp {
    let dm = m.len() - 1;
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - dm];
    for shift in (0..q.len()).rev() {
        let lead = r[shift + dm];
        q[shift] = lead;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - lead * c % p) % p;
            }
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0), "division was not exact");
    trim(&mut q);
    q
}

fn mul_mod(a: &Fp, b: &Fp, m: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    trim(&mut prod);
    rem(&prod, m, p)
}

fn pow_poly_mod(base: &Fp, mut e: u64, m: &Fp, p: u64) -> Fp {
    let mut result = rem(&vec![1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

/// Monic gcd.
fn gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let mut x = a.clone();
    let mut y = b.clone();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        make_monic(&mut y, p);
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    make_monic(&mut x, p);
    x
}

fn sub_x(a: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    if r.len() < 2 {
        r.resize(2, 0);
    }
    r[1] = (r[1] + p - 1) % p;
    trim(&mut r);
    r
}

/// Degrees of the distinct monic irreducible factors of `f` (monic, nonconstant),
/// ascending, one entry per distinct factor. Also reports whether `f` is squarefree.
fn distinct_factor_degrees(f: &Fp, p: u64) -> (Vec<u32>, bool) {
    let total = f.len() - 1;
    let mut rest = f.clone();
    let mut degrees = Vec::new();
    let mut radical_degree = 0;
    let mut frob = vec![0, 1]; // x
    let mut d = 0u32;
    while rest.len() > 1 {
        d += 1;
        frob = pow_poly_mod(&frob, p, &rest, p);
        let g = gcd(&sub_x(&frob, p), &rest, p);
        let gdeg = g.len() - 1;
        if gdeg > 0 {
            for _ in 0..gdeg / d as usize {
                degrees.push(d);
            }
            radical_degree += gdeg;
            loop {
                let common = gcd(&rest, &g, p);
                if common.len() <= 1 {
                    break;
                }
                rest = div_exact(&rest, &common, p);
            }
            if rest.len() > 1 {
                frob = rem(&frob, &rest, p);
            }
        }
    }
    (degrees, radical_degree == total)
}

/// Local data at one prime plus a flag for primes where reading the
/// factorization of the defining polynomial may not reflect the splitting of
/// the ring of integers (the prime divides the index `[O_F : Z[alpha]]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSplitting {
    pub data: LocalEulerData,
    pub uncertain: bool,
}

impl LocalSplitting {
    pub fn splits_completely(&self) -> bool {
        self.data.splits_completely()
    }
}

/// Per-field context that caches the polynomial discriminant so that many
/// primes can be examined cheaply.
#[derive(Debug, Clone)]
pub struct SplittingContext {
    poly: IntPolynomial,
    degree: u32,
    field_disc: BigInt,
    poly_disc: BigInt,
}

impl SplittingContext {
    pub fn new(poly: IntPolynomial, field_disc: BigInt) -> Result<Self, ArithError> {
        if !poly.is_monic() {
            return Err(ArithError::NotMonic(poly.leading().to_string()));
        }
        let poly_disc = poly.discriminant();
        Ok(SplittingContext { degree: poly.degree() as u32, poly, field_disc, poly_disc })
    }

    pub fn poly_discriminant(&self) -> &BigInt {
        &self.poly_disc
    }

    pub fn local(&self, p: u64) -> Result<LocalSplitting, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        let n = self.degree;
        let pb = BigInt::from(p);
        let mut reduced: Fp =
            self.poly.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().expect("residue fits u64")).collect();
        trim(&mut reduced);
        let (degrees, squarefree) = distinct_factor_degrees(&reduced, p);
        let f = degrees[0];
        let equal = degrees.iter().all(|&d| d == f);
        let g = degrees.len() as u32;
        let ramified = (&self.field_disc % &pb).is_zero();
        let index_divisor = valuation(&self.poly_disc, &pb) > valuation(&self.field_disc, &pb);

        if !ramified {
            if squarefree && !index_divisor {
                if !equal {
                    return Err(ArithError::NotGalois { p, degrees });
                }
                if f * g != n {
                    return Err(ArithError::InconsistentSplitting { p, n });
                }
                return Ok(LocalSplitting { data: LocalEulerData::new(p, 1, f, g), uncertain: false });
            }
            // Unramified but P mod p is not squarefree: p divides the index.
            let f = if n.is_multiple_of(f) { f } else { 1 };
            return Ok(LocalSplitting { data: LocalEulerData::new(p, 1, f, n / f), uncertain: true });
        }

        let fg = f * g;
        if equal && n.is_multiple_of(fg) && fg < n {
            return Ok(LocalSplitting { data: LocalEulerData::new(p, n / fg, f, g), uncertain: index_divisor });
        }
        // Ramified prime whose reduction has no repeated factor, or unequal
        // degrees: only possible when p divides the index.
        let (f, g) = if n.is_multiple_of(fg) && fg < n { (f, g) } else { (1, 1) };
        Ok(LocalSplitting { data: LocalEulerData::new(p, n / (f * g), f, g), uncertain: true })
    }
}

fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Splitting type of `p` in the Galois field defined by `poly` with field
/// discriminant `field_disc`.
pub fn splitting_type_mod_p(poly: &IntPolynomial, p: u64, field_disc: &BigInt) -> Result<LocalSplitting, ArithError> {
    SplittingContext::new(poly.clone(), field_disc.clone())?.local(p)
}
