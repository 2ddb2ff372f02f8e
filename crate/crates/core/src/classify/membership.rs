use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::funcs::{
    bid_sweep, in_l_bis, lipschitz_bounds, projective_equivalence_test, BidSweep, BisEvidence, FuncDescriptor,
    GrowthConfig, GrowthReport, LipschitzBounds, LipschitzOptions, LogGrid, ProjectiveFit, Verdict,
};
use crate::twist::{dyadic_sweep, growth_lambda_sigma};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassConfig {
    pub grid: LogGrid,
    pub lipschitz: LipschitzOptions,
    /// Bi-Lipschitz when `lower_est > bi_ratio · upper_est`.
    pub bi_ratio: f64,
    /// Vanishing second derivative when the final-window `max |f''| < eps_bis`.
    pub eps_bis: f64,
    /// Dyadic exponents `i` with `n = 2^i` for the difference-quotient sweep.
    pub bid_exponents: (u32, u32),
    pub bid_floor: f64,
}

impl Default for ClassConfig {
    fn default() -> Self {
        ClassConfig {
            grid: LogGrid::default(),
            lipschitz: LipschitzOptions::default(),
            bi_ratio: 1e-3,
            eps_bis: 1e-6,
            bid_exponents: (4, 40),
            bid_floor: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiEvidence {
    pub lower_est: f64,
    pub upper_est: f64,
    pub analytic: LipschitzBounds,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BidEvidence {
    pub sweep: BidSweep,
    pub floor: f64,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub map_name: String,
    pub in_l_bi: BiEvidence,
    pub in_l_bis: BisEvidence,
    pub in_l_bid: BidEvidence,
    pub config: ClassConfig,
}

impl ClassReport {
    pub fn in_l_bids(&self) -> bool {
        self.in_l_bi.verdict && self.in_l_bis.verdict && self.in_l_bid.verdict
    }
}

pub fn class_report(phi: &FuncDescriptor, config: &ClassConfig) -> Result<ClassReport> {
    let est = lipschitz_bounds(phi, &config.grid, config.lipschitz);
    let in_l_bi = BiEvidence {
        lower_est: est.lower,
        upper_est: est.upper,
        analytic: phi.bounds(),
        verdict: est.upper > 0.0 && est.lower > config.bi_ratio * est.upper,
    };
    let in_l_bis = in_l_bis(phi, &config.grid, config.eps_bis)?;
    let sweep = bid_sweep(phi, config.bid_exponents.0, config.bid_exponents.1)?;
    // Real and imaginary parts are judged separately.
    let verdict = sweep.max_re > config.bid_floor || sweep.max_im > config.bid_floor;
    Ok(ClassReport {
        map_name: phi.label(),
        in_l_bi,
        in_l_bis,
        in_l_bid: BidEvidence {
            sweep,
            floor: config.bid_floor,
            verdict,
        },
        config: config.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncomparabilityConfig {
    pub class: ClassConfig,
    pub growth: GrowthConfig,
    /// `n = 2^k` for `k` in this range in the `λ, σ` sweep.
    pub sweep_exponents: (u32, u32),
}

impl Default for IncomparabilityConfig {
    fn default() -> Self {
        IncomparabilityConfig {
            class: ClassConfig::default(),
            growth: GrowthConfig::default(),
            sweep_exponents: (1, 30),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Hypotheses {
    pub phi_in_l_bid: bool,
    pub psi_in_l_bis: bool,
    pub not_projectively_equivalent: bool,
    pub lambda_sigma_growing: bool,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.phi_in_l_bid && self.psi_in_l_bis && self.not_projectively_equivalent && self.lambda_sigma_growing
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncomparabilityReport {
    pub phi: ClassReport,
    pub psi: ClassReport,
    pub projective: ProjectiveFit,
    /// `|φ(log √n) − a_best·ψ(log √n)|` through the vector route over dyadic `n`.
    pub lambda_sigma: GrowthReport,
    pub hypotheses: Hypotheses,
    pub supported: bool,
}

/// Numerical evidence for each hypothesis of the incomparability criterion:
/// `φ` in the difference-quotient class, `ψ` with vanishing second
/// derivative, and the two maps not projectively equivalent.
pub fn incomparability_evidence(
    phi: &FuncDescriptor,
    psi: &FuncDescriptor,
    config: &IncomparabilityConfig,
) -> Result<IncomparabilityReport> {
    let phi_report = class_report(phi, &config.class)?;
    let psi_report = class_report(psi, &config.class)?;
    let projective = projective_equivalence_test(phi, psi, &config.class.grid, None, config.growth)?;
    let a = projective.a_best;
    let lambda_sigma = dyadic_sweep(
        config.sweep_exponents.0,
        config.sweep_exponents.1,
        GrowthConfig {
            axis: crate::funcs::RegressionAxis::LogWindowIndex,
            ..config.growth
        },
        |n| growth_lambda_sigma(phi, psi, Complex64::new(1.0, 0.0), a, n),
    )?;
    let hypotheses = Hypotheses {
        phi_in_l_bid: phi_report.in_l_bi.verdict && phi_report.in_l_bid.verdict,
        psi_in_l_bis: psi_report.in_l_bi.verdict && psi_report.in_l_bis.verdict,
        not_projectively_equivalent: projective.report.verdict == Verdict::Growing,
        lambda_sigma_growing: lambda_sigma.verdict == Verdict::Growing,
    };
    Ok(IncomparabilityReport {
        phi: phi_report,
        psi: psi_report,
        projective,
        lambda_sigma,
        supported: hypotheses.all(),
        hypotheses,
    })
}
