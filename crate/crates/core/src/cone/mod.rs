//! Cone generators `g_{α,β}`, their nonnegative combinations, Kronecker orbits
//! and numerical independence.

pub mod gram;
pub mod kronecker;
pub mod spec;

pub use gram::{independence_gram_rank, GramReport};
pub use kronecker::{
    covering_radius, discrepancy_estimate, find_sign_pattern, frac_mul, kronecker_orbit, pattern_values,
    trig_identity_check, KroneckerOrbit, SignSearch, TrigCheck,
};
pub use spec::{
    beta_hat, cone_element, first_primes, make_sinlog, prime_root_beta, prime_root_betas, ConeSpec, ConeTerm,
    DEFAULT_ALPHA, GAMMA,
};
