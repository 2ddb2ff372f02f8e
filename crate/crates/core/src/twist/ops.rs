use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sparse::{SparseVec, TwistedVec};
use crate::error::{Error, Result};
use crate::funcs::FuncDescriptor;

const UNDERFLOW_RATIO: f64 = 1e-300;

fn coordinate(phi: &FuncDescriptor, v: Complex64, norm: f64) -> Complex64 {
    let m = v.norm();
    if m / norm < UNDERFLOW_RATIO {
        return Complex64::new(0.0, 0.0);
    }
    v * phi.at((norm / m).ln().max(0.0))
}

/// `Ω_φ(x)_n = x_n·φ(log(‖x‖₂/|x_n|))`, `Ω_φ(0) = 0`.
pub fn omega(phi: &FuncDescriptor, x: &SparseVec) -> SparseVec {
    let norm = x.norm();
    let mut last: Option<(Complex64, Complex64)> = None;
    let entries = x
        .iter()
        .map(|(k, v)| match last {
            Some((u, w)) if u == v => (k, w),
            _ => {
                let w = coordinate(phi, v, norm);
                last = Some((v, w));
                (k, w)
            }
        })
        .collect();
    SparseVec::from_sorted(entries)
}

/// `‖(y, x)‖_φ = ‖y − Ω_φ(x)‖₂ + ‖x‖₂`.
pub fn quasinorm(phi: &FuncDescriptor, v: &TwistedVec) -> f64 {
    v.y.sub(&omega(phi, &v.x)).norm() + v.x.norm()
}

/// `‖Ω(x+y) − Ω(x) − Ω(y)‖₂ / (‖x‖₂ + ‖y‖₂)`.
pub fn quasilinearity_defect(phi: &FuncDescriptor, x: &SparseVec, y: &SparseVec) -> Result<f64> {
    let denom = x.norm() + y.norm();
    if denom == 0.0 {
        return Err(Error::InvalidParameter("quasi-linearity defect needs (x, y) != (0, 0)".into()));
    }
    let d = omega(phi, &x.add(y)).sub(&omega(phi, x)).sub(&omega(phi, y));
    Ok(d.norm() / denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleConstant {
    pub ratio: f64,
    pub samples: usize,
    pub skipped: usize,
}

/// Largest `‖u+v‖_φ / (‖u‖_φ + ‖v‖_φ)` over the sampled pairs. Pairs with a
/// zero denominator are skipped and counted.
pub fn quasinorm_triangle_constant(
    phi: &FuncDescriptor,
    pairs: impl IntoIterator<Item = (TwistedVec, TwistedVec)>,
) -> TriangleConstant {
    let mut out = TriangleConstant {
        ratio: 0.0,
        samples: 0,
        skipped: 0,
    };
    for (u, v) in pairs {
        let denom = quasinorm(phi, &u) + quasinorm(phi, &v);
        if denom == 0.0 {
            out.skipped += 1;
            continue;
        }
        out.ratio = out.ratio.max(quasinorm(phi, &u.add(&v)) / denom);
        out.samples += 1;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    #[default]
    Bilinear,
    /// Conjugates the second argument.
    Sesquilinear,
}

/// `⟨b, c⟩ + ⟨a, d⟩` for `u = (a, b)` and `v = (c, d)`.
pub fn duality_pairing(u: &TwistedVec, v: &TwistedVec, kind: Pairing) -> Complex64 {
    match kind {
        Pairing::Bilinear => u.x.dot(&v.y) + u.y.dot(&v.x),
        Pairing::Sesquilinear => u.x.dot(&v.y.conj()) + u.y.dot(&v.x.conj()),
    }
}

/// Acts on `(y, x)` by `(λy + μx, ηy + σx)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub lambda: Complex64,
    pub mu: Complex64,
    pub eta: Complex64,
    pub sigma: Complex64,
}

impl Matrix2 {
    pub fn new(lambda: Complex64, mu: Complex64, eta: Complex64, sigma: Complex64) -> Self {
        Matrix2 { lambda, mu, eta, sigma }
    }

    pub fn real(lambda: f64, mu: f64, eta: f64, sigma: f64) -> Self {
        let c = |v| Complex64::new(v, 0.0);
        Self::new(c(lambda), c(mu), c(eta), c(sigma))
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0)
    }
}

pub fn matrix_apply(m: &Matrix2, v: &TwistedVec) -> TwistedVec {
    TwistedVec::new(
        v.y.combine(m.lambda, &v.x, m.mu),
        v.y.combine(m.eta, &v.x, m.sigma),
    )
}

/// Vector of `(multiplicity, value)` runs, used to evaluate `Ω` on flat
/// vectors such as `f_n` without materializing `n` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Runs {
    pub runs: Vec<(u64, Complex64)>,
}

impl Runs {
    pub fn flat(n: u64, value: Complex64) -> Self {
        Runs {
            runs: vec![(n, value)],
        }
    }

    pub fn norm(&self) -> f64 {
        let scale = self.runs.iter().map(|r| r.1.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self.runs.iter().map(|&(c, v)| c as f64 * (v.norm() / scale).powi(2)).sum();
        scale * s.sqrt()
    }

    pub fn omega(&self, phi: &FuncDescriptor) -> Runs {
        let norm = self.norm();
        Runs {
            runs: self.runs.iter().map(|&(c, v)| (c, coordinate(phi, v, norm))).collect(),
        }
    }

    /// `a·self + b·other` for runs with identical multiplicities.
    pub fn combine(&self, a: Complex64, other: &Runs, b: Complex64) -> Runs {
        debug_assert!(self.runs.iter().zip(&other.runs).all(|(p, q)| p.0 == q.0));
        Runs {
            runs: self
                .runs
                .iter()
                .zip(&other.runs)
                .map(|(p, q)| (p.0, a * p.1 + b * q.1))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Runs {
        Runs {
            runs: self.runs.iter().map(|&(k, v)| (k, c * v)).collect(),
        }
    }

    pub fn to_sparse(&self) -> SparseVec {
        let mut out = Vec::new();
        let mut k = 1usize;
        for &(c, v) in &self.runs {
            for _ in 0..c {
                out.push((k, v));
                k += 1;
            }
        }
        SparseVec::from_sorted(out)
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    Ok(())
}

/// `‖M(n^{-1/2}(f_n, 0))‖_ψ`.
pub fn growth_eta(psi: &FuncDescriptor, m: &Matrix2, n: u64) -> Result<f64> {
    check_n(n)?;
    let u = Runs::flat(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let y = u.scale(m.lambda);
    let x = u.scale(m.eta);
    let omega_x = x.omega(psi);
    Ok(y.combine(Complex64::new(1.0, 0.0), &omega_x, Complex64::new(-1.0, 0.0)).norm() + x.norm())
}

/// Both evaluations of `n^{-1/2}‖λΩ_φ f_n − σΩ_ψ f_n‖₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaSigmaRoutes {
    /// Through `Ω` applied to `f_n`.
    pub vector: f64,
    /// `|λφ(log √n) − σψ(log √n)|`.
    pub scalar: f64,
}

pub fn growth_lambda_sigma_routes(
    phi: &FuncDescriptor,
    psi: &FuncDescriptor,
    lambda: Complex64,
    sigma: Complex64,
    n: u64,
) -> Result<LambdaSigmaRoutes> {
    check_n(n)?;
    let f = Runs::flat(n, Complex64::new(1.0, 0.0));
    let d = f.omega(phi).combine(lambda, &f.omega(psi), -sigma);
    let vector = d.norm() / (n as f64).sqrt();
    let h = 0.5 * (n as f64).ln();
    let scalar = (lambda * phi.at(h) - sigma * psi.at(h)).norm();
    Ok(LambdaSigmaRoutes { vector, scalar })
}

/// `n^{-1/2}‖λΩ_φ f_n − σΩ_ψ f_n‖₂`, vector route.
pub fn growth_lambda_sigma(
    phi: &FuncDescriptor,
    psi: &FuncDescriptor,
    lambda: Complex64,
    sigma: Complex64,
    n: u64,
) -> Result<f64> {
    growth_lambda_sigma_routes(phi, psi, lambda, sigma, n).map(|r| r.vector)
}

/// Pointwise complex conjugate of `φ`.
pub fn conjugate_map(phi: &FuncDescriptor) -> FuncDescriptor {
    phi.conjugate()
}

pub fn conjugate_vec(v: &TwistedVec) -> TwistedVec {
    TwistedVec::new(v.y.conj(), v.x.conj())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// `(e_n, 0)`.
    Twisted,
    /// `(0, e_n)`.
    Base,
}

pub fn basis_vector(kind: BasisKind, n: usize) -> Result<TwistedVec> {
    let e = SparseVec::basis(n)?;
    Ok(match kind {
        BasisKind::Twisted => TwistedVec::new(e, SparseVec::zero()),
        BasisKind::Base => TwistedVec::new(SparseVec::zero(), e),
    })
}

pub fn f_vector(n: usize) -> Result<SparseVec> {
    SparseVec::f_vector(n)
}
