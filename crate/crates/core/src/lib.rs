//! Number-field datasets and classifiers.
//!
//! The crate rebuilds three encodings of Galois number fields (defining
//! polynomial coefficients, Dedekind zeta coefficients and split-prime
//! indicators), computes exact class numbers for quadratic fields, and trains
//! random forests and logistic models to predict field invariants from those
//! encodings.
//!
//! Modules are layered bottom-up:
//!
//! - [`arith`]: primes, Kronecker symbols, polynomial discriminants,
//!   factorization shapes modulo `p` and Euler-product expansion.
//! - [`quadratic`]: fundamental discriminants, class numbers via reduced
//!   binary quadratic forms, quadratic feature vectors.
//! - [`fields`]: general Galois fields and the three feature encodings.
//! - [`ingest`]: snapshot CSV files, the optional LMFDB client, balanced
//!   sampling.
//! - [`ml`]: datasets, splits, random forests, logistic regression, metrics.
//! - [`experiments`]: the configuration-driven experiment harness.

pub mod arith;
pub mod experiments;
pub mod fields;
pub mod ingest;
pub mod ml;
pub mod quadratic;
