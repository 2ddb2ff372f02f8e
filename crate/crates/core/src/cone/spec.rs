use std::f64::consts::{LN_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::FuncDescriptor;

/// `γ = log ½`.
pub const GAMMA: f64 = -LN_2;

/// Default amplitude of the cone generators.
pub const DEFAULT_ALPHA: f64 = 0.1;

/// `g_{α,β}(t) = t + α·t·sin(β log t)`, carrying bounds `1 ± α(1+β)`; the lower
/// bound (and with it the bi-Lipschitz flag) only when `α(1+β) < 1`.
pub fn make_sinlog(alpha: f64, beta: f64) -> Result<FuncDescriptor> {
    FuncDescriptor::sin_log(alpha, beta)
}

/// `β̂ = −2πβγ = 2πβ log 2`.
pub fn beta_hat(beta: f64) -> f64 {
    -TAU * beta * GAMMA
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeTerm {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Nonnegative combination `Σ λ_j g_{α_j, β̂_j}` of the cone generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ConeSpec {
    terms: Vec<ConeTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    terms: Vec<ConeTerm>,
}

impl TryFrom<RawSpec> for ConeSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        ConeSpec::new(raw.terms)
    }
}

impl From<ConeSpec> for RawSpec {
    fn from(spec: ConeSpec) -> Self {
        RawSpec { terms: spec.terms }
    }
}

impl ConeSpec {
    pub fn new(terms: Vec<ConeTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidCone("at least one term is required".into()));
        }
        for (j, t) in terms.iter().enumerate() {
            if !(t.lambda > 0.0 && t.lambda.is_finite()) {
                return Err(Error::InvalidCone(format!("term {j}: lambda must be positive, got {}", t.lambda)));
            }
            if !(t.alpha > 0.0 && t.alpha.is_finite()) {
                return Err(Error::InvalidCone(format!("term {j}: alpha must be positive, got {}", t.alpha)));
            }
            if !(t.beta > 0.0 && t.beta < 1.0) {
                return Err(Error::InvalidCone(format!("term {j}: beta must lie in (0, 1), got {}", t.beta)));
            }
            if let Some(i) = terms[..j].iter().position(|s| s.beta == t.beta) {
                return Err(Error::InvalidCone(format!("terms {i} and {j} share beta {}", t.beta)));
            }
        }
        let spec = ConeSpec { terms };
        let margin = spec.alpha_max() * (1.0 + beta_hat(spec.beta_max()));
        if !(margin < 1.0) {
            return Err(Error::InvalidCone(format!(
                "alpha (1 + 2 pi beta log 2) = {margin} must be below 1"
            )));
        }
        Ok(spec)
    }

    /// Unit-weight spec with the default amplitude.
    pub fn uniform(betas: &[f64]) -> Result<Self> {
        Self::new(
            betas
                .iter()
                .map(|&beta| ConeTerm {
                    lambda: 1.0,
                    alpha: DEFAULT_ALPHA,
                    beta,
                })
                .collect(),
        )
    }

    pub fn terms(&self) -> &[ConeTerm] {
        &self.terms
    }

    pub fn alpha_max(&self) -> f64 {
        self.terms.iter().map(|t| t.alpha).fold(0.0, f64::max)
    }

    pub fn beta_max(&self) -> f64 {
        self.terms.iter().map(|t| t.beta).fold(0.0, f64::max)
    }

    pub fn lambda_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.lambda).sum()
    }

    /// `λ(1 − α(1 + 2πβ log 2))` with `λ = Σλ_j`, `α`, `β` the maxima.
    pub fn lower_bound(&self) -> f64 {
        self.lambda_sum() * (1.0 - self.alpha_max() * (1.0 + beta_hat(self.beta_max())))
    }

    /// `λ(1 + α(1 + 2πβ log 2))`.
    pub fn upper_bound(&self) -> f64 {
        self.lambda_sum() * (1.0 + self.alpha_max() * (1.0 + beta_hat(self.beta_max())))
    }

    /// Sum of two specs. Terms with equal `(α, β)` add their weights; equal
    /// `β` with different `α` is rejected.
    pub fn merge(&self, other: &ConeSpec) -> Result<ConeSpec> {
        let mut terms = self.terms.clone();
        for t in &other.terms {
            match terms.iter_mut().find(|s| s.beta == t.beta) {
                Some(s) if s.alpha == t.alpha => s.lambda += t.lambda,
                Some(_) => {
                    return Err(Error::InvalidCone(format!(
                        "beta {} appears with two different alphas",
                        t.beta
                    )))
                }
                None => terms.push(*t),
            }
        }
        ConeSpec::new(terms)
    }
}

/// `h = Σ λ_j g_{α_j, β̂_j}` with the analytic bounds of `spec` declared.
pub fn cone_element(spec: &ConeSpec) -> Result<FuncDescriptor> {
    let children = spec
        .terms
        .iter()
        .map(|t| Ok(FuncDescriptor::scale(t.lambda, make_sinlog(t.alpha, beta_hat(t.beta))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FuncDescriptor::sum(children)?.with_declared_bounds(Some(spec.lower_bound()), Some(spec.upper_bound())))
}

pub fn first_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = 2u64;
    while out.len() < count {
        if (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            out.push(p);
        }
        p += 1;
    }
    out
}

/// `frac √p`.
pub fn prime_root_beta(p: u64) -> f64 {
    (p as f64).sqrt().fract()
}

/// `frac √p` for the first `count` primes.
pub fn prime_root_betas(count: usize) -> Vec<f64> {
    first_primes(count).into_iter().map(prime_root_beta).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_sinlog_flags() {
        let g = make_sinlog(0.1, 1.0).unwrap();
        let b = g.bounds();
        assert!((b.lower.unwrap() - 0.8).abs() < 1e-15 && (b.upper.unwrap() - 1.2).abs() < 1e-15);
        assert!(g.is_bi_lipschitz());
        assert!(!make_sinlog(2.0, 1.0).unwrap().is_bi_lipschitz());
        assert_eq!(g.eval(1.0).unwrap().re, 1.0);
        assert!(make_sinlog(0.0, 1.0).is_err());
    }

    #[test]
    fn spec_validation() {
        let t = |lambda, alpha, beta| ConeTerm { lambda, alpha, beta };
        assert!(ConeSpec::new(vec![t(1.0, 0.1, 0.4)]).is_ok());
        assert!(ConeSpec::new(vec![]).is_err());
        assert!(ConeSpec::new(vec![t(0.0, 0.1, 0.4)]).is_err());
        assert!(ConeSpec::new(vec![t(1.0, 0.1, 1.0)]).is_err());
        assert!(ConeSpec::new(vec![t(1.0, 0.1, 0.4), t(2.0, 0.1, 0.4)]).is_err());
        // 0.3·(1 + 2π·0.9·log 2) > 1.
        assert!(ConeSpec::new(vec![t(1.0, 0.3, 0.9)]).is_err());
    }

    #[test]
    fn merge_sums_weights() {
        let a = ConeSpec::uniform(&[0.25, 0.5]).unwrap();
        let b = ConeSpec::uniform(&[0.5, 0.75]).unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.terms().len(), 3);
        assert_eq!(m.terms()[1].lambda, 2.0);
        let c = ConeSpec::new(vec![ConeTerm {
            lambda: 1.0,
            alpha: 0.05,
            beta: 0.5,
        }])
        .unwrap();
        assert!(a.merge(&c).is_err());
    }

    #[test]
    fn json_validates() {
        let s = r#"{"terms":[{"lambda":1.0,"alpha":0.1,"beta":0.41}]}"#;
        let spec: ConeSpec = serde_json::from_str(s).unwrap();
        assert_eq!(serde_json::to_string(&spec).unwrap(), s);
        assert!(serde_json::from_str::<ConeSpec>(r#"{"terms":[{"lambda":1.0,"alpha":0.9,"beta":0.41}]}"#).is_err());
    }

    #[test]
    fn primes_and_betas() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
        let b = prime_root_betas(3);
        assert!((b[0] - (2f64.sqrt() - 1.0)).abs() < 1e-16);
        assert!(b.iter().all(|&x| x > 0.0 && x < 1.0));
    }
}
