//! Integer and polynomial primitives.

mod euler;
mod kronecker;
mod modp;
mod poly;
mod primes;

pub use euler::{euler_to_dirichlet, local_coefficients, LocalEulerData};
pub use kronecker::{jacobi, kronecker};
pub use modp::{splitting_type_mod_p, LocalSplitting, SplittingContext};
pub use poly::IntPolynomial;
pub use primes::{first_primes, is_prime, primes_up_to, FactorSieve};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no local Euler data for prime {0}")]
    MissingPrime(u64),
    #[error("duplicate local Euler data for prime {0}")]
    DuplicatePrime(u64),
    #[error("invalid local Euler data at {p}: e={e}, f={f}, g={g}")]
    InvalidLocalData { p: u64, e: u32, f: u32, g: u32 },
    #[error("factor degrees {degrees:?} modulo {p} are not all equal; polynomial does not define a Galois field")]
    NotGalois { p: u64, degrees: Vec<u32> },
    #[error("factorization modulo {p} is inconsistent with field degree {n}")]
    InconsistentSplitting { p: u64, n: u32 },
    #[error("Dirichlet coefficient a_{0} overflows 64 bits")]
    Overflow(usize),
}
