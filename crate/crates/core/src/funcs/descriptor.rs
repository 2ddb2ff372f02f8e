//! Closed-form Lipschitz maps on `[0, ∞)` built from a small algebra of base
//! families.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One node of a descriptor expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    /// `t ↦ c·t`
    Linear(Complex64),
    /// `t ↦ sin t`
    SinPlain,
    /// `t ↦ t + α·t·sin(β·log t)`
    SinLog { alpha: f64, beta: f64 },
    /// `t ↦ t^{1+iα} = t·e^{iα·log t}`
    PowerPhase { alpha: f64 },
    /// `t ↦ c·f(t)`
    Scale(Complex64, Box<FuncDescriptor>),
    /// `t ↦ Σ f_j(t)`
    Sum(Vec<FuncDescriptor>),
    /// `t ↦ f(t) + i·g(t)`
    Complex {
        re: Box<FuncDescriptor>,
        im: Box<FuncDescriptor>,
    },
}

/// Per-node metadata: optional declared Lipschitz bounds overriding the
/// composed ones, and the highest derivative order the node provides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Meta {
    pub declared_upper: Option<f64>,
    pub declared_lower: Option<f64>,
    pub max_derivative: u8,
}

impl Default for Meta {
    fn default() -> Self {
        Meta {
            declared_upper: None,
            declared_lower: None,
            max_derivative: 2,
        }
    }
}

/// Analytic Lipschitz bounds `lower·|x−y| ≤ |f(x)−f(y)| ≤ upper·|x−y|`.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize)]
pub struct LipschitzBounds {
    pub upper: Option<f64>,
    pub lower: Option<f64>,
}

/// A complex-valued Lipschitz map `φ` with `φ(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncDescriptor {
    node: Node,
    meta: Meta,
}

fn finite_complex(c: Complex64, what: &str) -> Result<()> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be finite")))
    }
}

#[inline]
fn times_i(w: Complex64) -> Complex64 {
    Complex64::new(-w.im, w.re)
}

impl FuncDescriptor {
    pub(crate) fn from_parts(node: Node, meta: Meta) -> Self {
        FuncDescriptor { node, meta }
    }

    pub fn linear(c: impl Into<Complex64>) -> Self {
        Self::from_parts(Node::Linear(c.into()), Meta::default())
    }

    pub fn sin_plain() -> Self {
        Self::from_parts(Node::SinPlain, Meta::default())
    }

    pub fn sin_log(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sinlog alpha must be a finite positive number, got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sinlog beta must be a finite positive number, got {beta}"
            )));
        }
        Ok(Self::from_parts(Node::SinLog { alpha, beta }, Meta::default()))
    }

    pub fn power_phase(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("powerphase alpha must be finite".into()));
        }
        Ok(Self::from_parts(Node::PowerPhase { alpha }, Meta::default()))
    }

    pub fn scale(c: impl Into<Complex64>, child: FuncDescriptor) -> Self {
        Self::from_parts(Node::Scale(c.into(), Box::new(child)), Meta::default())
    }

    pub fn sum(children: Vec<FuncDescriptor>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::InvalidParameter("sum needs at least one child".into()));
        }
        Ok(Self::from_parts(Node::Sum(children), Meta::default()))
    }

    /// `re + i·im`.
    pub fn complex(re: FuncDescriptor, im: FuncDescriptor) -> Self {
        Self::from_parts(
            Node::Complex {
                re: Box::new(re),
                im: Box::new(im),
            },
            Meta::default(),
        )
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    /// Attaches declared Lipschitz bounds which take precedence over the
    /// bounds composed from the children.
    pub fn with_declared_bounds(mut self, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.meta.declared_lower = lower;
        self.meta.declared_upper = upper;
        self
    }

    /// Caps the derivative order this node advertises.
    pub fn with_max_derivative(mut self, order: u8) -> Self {
        self.meta.max_derivative = order.min(2);
        self
    }

    /// Rechecks every parameter in the tree.
    pub fn validate(&self) -> Result<()> {
        match &self.node {
            Node::Linear(c) => finite_complex(*c, "linear coefficient"),
            Node::SinPlain => Ok(()),
            Node::SinLog { alpha, beta } => Self::sin_log(*alpha, *beta).map(|_| ()),
            Node::PowerPhase { alpha } => Self::power_phase(*alpha).map(|_| ()),
            Node::Scale(c, child) => {
                finite_complex(*c, "scale coefficient")?;
                child.validate()
            }
            Node::Sum(children) => {
                if children.is_empty() {
                    return Err(Error::InvalidParameter("sum needs at least one child".into()));
                }
                children.iter().try_for_each(|c| c.validate())
            }
            Node::Complex { re, im } => {
                re.validate()?;
                im.validate()
            }
        }
    }

    /// Value at `t ≥ 0`. Exactly zero at `t = 0`.
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) {
            return Err(Error::NegativeArgument(t));
        }
        if t == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.eval_order(t, 0))
    }

    /// First derivative at `t > 0`.
    pub fn eval_d1(&self, t: f64) -> Result<Complex64> {
        self.derivative(t, 1)
    }

    /// Second derivative at `t > 0`.
    pub fn eval_d2(&self, t: f64) -> Result<Complex64> {
        self.derivative(t, 2)
    }

    fn derivative(&self, t: f64, order: u8) -> Result<Complex64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveArgument(t));
        }
        self.check_derivatives(order, "$")?;
        Ok(self.eval_order(t, order))
    }

    /// Checks every node of the tree for a derivative of the given order and
    /// reports the first node that lacks one.
    pub fn check_derivatives(&self, order: u8, path: &str) -> Result<()> {
        if self.meta.max_derivative < order {
            return Err(Error::DerivativeUnavailable {
                path: path.to_string(),
                order,
            });
        }
        match &self.node {
            Node::Scale(_, child) => child.check_derivatives(order, &format!("{path}.children[0]")),
            Node::Sum(children) => children
                .iter()
                .enumerate()
                .try_for_each(|(i, c)| c.check_derivatives(order, &format!("{path}.children[{i}]"))),
            Node::Complex { re, im } => {
                re.check_derivatives(order, &format!("{path}.children[0]"))?;
                im.check_derivatives(order, &format!("{path}.children[1]"))
            }
            _ => Ok(()),
        }
    }

    // t > 0 here.
    fn eval_order(&self, t: f64, order: u8) -> Complex64 {
        match &self.node {
            Node::Linear(c) => match order {
                0 => c * t,
                1 => *c,
                _ => Complex64::new(0.0, 0.0),
            },
            Node::SinPlain => Complex64::new(
                match order {
                    0 => t.sin(),
                    1 => t.cos(),
                    _ => -t.sin(),
                },
                0.0,
            ),
            Node::SinLog { alpha, beta } => {
                let (s, c) = (beta * t.ln()).sin_cos();
                let v = match order {
                    0 => t + alpha * t * s,
                    1 => 1.0 + alpha * s + alpha * beta * c,
                    _ => (alpha * beta / t) * (c - beta * s),
                };
                Complex64::new(v, 0.0)
            }
            Node::PowerPhase { alpha } => {
                let phase = Complex64::from_polar(1.0, alpha * t.ln());
                let one_plus = Complex64::new(1.0, *alpha);
                match order {
                    0 => phase * t,
                    1 => one_plus * phase,
                    _ => one_plus * Complex64::new(0.0, *alpha) * phase / t,
                }
            }
            Node::Scale(c, child) => c * child.eval_order(t, order),
            Node::Sum(children) => children
                .iter()
                .map(|c| c.eval_order(t, order))
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b),
            Node::Complex { re, im } => re.eval_order(t, order) + times_i(im.eval_order(t, order)),
        }
    }

    /// True when every value of the map is real.
    pub fn is_real(&self) -> bool {
        match &self.node {
            Node::Linear(c) => c.im == 0.0,
            Node::SinPlain | Node::SinLog { .. } => true,
            Node::PowerPhase { alpha } => *alpha == 0.0,
            Node::Scale(c, child) => c.im == 0.0 && child.is_real(),
            Node::Sum(children) => children.iter().all(|c| c.is_real()),
            Node::Complex { .. } => false,
        }
    }

    /// Lipschitz bounds: declared ones if present, otherwise composed from
    /// the children.
    pub fn bounds(&self) -> LipschitzBounds {
        let composed = self.composed_bounds();
        LipschitzBounds {
            upper: self.meta.declared_upper.or(composed.upper),
            lower: self.meta.declared_lower.or(composed.lower),
        }
    }

    fn composed_bounds(&self) -> LipschitzBounds {
        match &self.node {
            Node::Linear(c) => {
                let m = c.norm();
                LipschitzBounds {
                    upper: Some(m),
                    lower: (m > 0.0).then_some(m),
                }
            }
            Node::SinPlain => LipschitzBounds {
                upper: Some(1.0),
                lower: None,
            },
            Node::SinLog { alpha, beta } => {
                let spread = alpha * (1.0 + beta);
                LipschitzBounds {
                    upper: Some(1.0 + spread),
                    lower: (spread < 1.0).then_some(1.0 - spread),
                }
            }
            // |f'| = sqrt(1 + α²) everywhere and ||f(x)| − |f(y)|| = |x − y|.
            Node::PowerPhase { alpha } => LipschitzBounds {
                upper: Some((1.0 + alpha * alpha).sqrt()),
                lower: Some(1.0),
            },
            Node::Scale(c, child) => {
                let b = child.bounds();
                let m = c.norm();
                LipschitzBounds {
                    upper: b.upper.map(|u| m * u),
                    lower: if m > 0.0 { b.lower.map(|l| m * l) } else { None },
                }
            }
            Node::Sum(children) => {
                let upper = children
                    .iter()
                    .map(|c| c.bounds().upper)
                    .try_fold(0.0, |acc, u| u.map(|u| acc + u));
                let lower = if children.len() == 1 {
                    children[0].bounds().lower
                } else {
                    None
                };
                LipschitzBounds { upper, lower }
            }
            Node::Complex { re, im } => {
                let (br, bi) = (re.bounds(), im.bounds());
                let both_real = re.is_real() && im.is_real();
                let upper = match (br.upper, bi.upper) {
                    (Some(a), Some(b)) if both_real => Some(a.hypot(b)),
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
                let lower = if both_real {
                    match (br.lower, bi.lower) {
                        (Some(a), Some(b)) => Some(a.max(b)),
                        (a, b) => a.or(b),
                    }
                } else {
                    None
                };
                LipschitzBounds { upper, lower }
            }
        }
    }

    /// True when a positive analytic lower Lipschitz bound is known.
    pub fn is_bi_lipschitz(&self) -> bool {
        matches!(self.bounds().lower, Some(l) if l > 0.0)
    }

    /// Coefficient of the exact linear term `c·t` carried by the tree.
    pub fn linear_part(&self) -> Complex64 {
        match &self.node {
            Node::Linear(c) => *c,
            Node::SinLog { .. } => Complex64::new(1.0, 0.0),
            Node::SinPlain | Node::PowerPhase { .. } => Complex64::new(0.0, 0.0),
            Node::Scale(c, child) => c * child.linear_part(),
            Node::Sum(children) => children
                .iter()
                .map(|c| c.linear_part())
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b),
            Node::Complex { re, im } => re.linear_part() + times_i(im.linear_part()),
        }
    }

    /// The map `t ↦ conj(φ(t))`.
    pub fn conjugate(&self) -> FuncDescriptor {
        let node = match &self.node {
            Node::Linear(c) => Node::Linear(c.conj()),
            Node::SinPlain => Node::SinPlain,
            Node::SinLog { alpha, beta } => Node::SinLog {
                alpha: *alpha,
                beta: *beta,
            },
            Node::PowerPhase { alpha } => Node::PowerPhase { alpha: -alpha },
            Node::Scale(c, child) => Node::Scale(c.conj(), Box::new(child.conjugate())),
            Node::Sum(children) => Node::Sum(children.iter().map(|c| c.conjugate()).collect()),
            Node::Complex { re, im } => Node::Complex {
                re: Box::new(re.conjugate()),
                im: Box::new(FuncDescriptor::scale(-1.0, im.conjugate())),
            },
        };
        FuncDescriptor::from_parts(node, self.meta)
    }

    /// Short human-readable name used in reports.
    pub fn label(&self) -> String {
        fn c_str(c: &Complex64) -> String {
            if c.im == 0.0 {
                format!("{}", c.re)
            } else {
                format!("({}{:+}i)", c.re, c.im)
            }
        }
        match &self.node {
            Node::Linear(c) => format!("Linear({})", c_str(c)),
            Node::SinPlain => "SinPlain".to_string(),
            Node::SinLog { alpha, beta } => format!("SinLog({alpha}, {beta})"),
            Node::PowerPhase { alpha } => format!("PowerPhase({alpha})"),
            Node::Scale(c, child) => format!("Scale({}, {})", c_str(c), child.label()),
            Node::Sum(children) => format!(
                "Sum({})",
                children.iter().map(|c| c.label()).collect::<Vec<_>>().join(", ")
            ),
            Node::Complex { re, im } => format!("Complex({}, {})", re.label(), im.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_maps_to_zero_exactly() {
        let trees = vec![
            FuncDescriptor::linear(1.0),
            FuncDescriptor::sin_plain(),
            FuncDescriptor::sin_log(0.1, 1.0).unwrap(),
            FuncDescriptor::power_phase(3.0).unwrap(),
            FuncDescriptor::scale(c(2.0, -1.0), FuncDescriptor::sin_plain()),
            FuncDescriptor::complex(FuncDescriptor::linear(1.0), FuncDescriptor::sin_plain()),
        ];
        for f in trees {
            let v = f.eval(0.0).unwrap();
            assert_eq!(v, c(0.0, 0.0), "{}", f.label());
        }
    }

    #[test]
    fn sinlog_at_e() {
        let f = FuncDescriptor::sin_log(0.1, 1.0).unwrap();
        let e = std::f64::consts::E;
        let expected = e * (1.0 + 0.1 * 1f64.sin());
        assert!((f.eval(e).unwrap().re - expected).abs() < 1e-14);
    }

    #[test]
    fn power_phase_at_one() {
        for alpha in [-2.0, 0.5, 7.0] {
            let f = FuncDescriptor::power_phase(alpha).unwrap();
            assert_eq!(f.eval(1.0).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn negative_argument_rejected() {
        let f = FuncDescriptor::linear(1.0);
        assert_eq!(f.eval(-1.0), Err(Error::NegativeArgument(-1.0)));
        assert!(f.eval(f64::NAN).is_err());
        assert!(matches!(f.eval_d1(0.0), Err(Error::NonPositiveArgument(_))));
    }

    #[test]
    fn linear_derivatives() {
        let f = FuncDescriptor::linear(c(2.0, 3.0));
        assert_eq!(f.eval_d1(5.0).unwrap(), c(2.0, 3.0));
        assert_eq!(f.eval_d2(5.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn missing_derivative_reports_node_path() {
        let f = FuncDescriptor::sum(vec![
            FuncDescriptor::linear(1.0),
            FuncDescriptor::sin_plain().with_max_derivative(1),
        ])
        .unwrap();
        assert!(f.eval_d1(1.0).is_ok());
        assert_eq!(
            f.eval_d2(1.0),
            Err(Error::DerivativeUnavailable {
                path: "$.children[1]".into(),
                order: 2
            })
        );
    }

    #[test]
    fn sinlog_bounds_attached_only_when_bi_lipschitz() {
        let f = FuncDescriptor::sin_log(0.1, 1.0).unwrap();
        let b = f.bounds();
        assert!((b.upper.unwrap() - 1.2).abs() < 1e-15);
        assert!((b.lower.unwrap() - 0.8).abs() < 1e-15);
        let g = FuncDescriptor::sin_log(2.0, 1.0).unwrap();
        assert_eq!(g.bounds().lower, None);
        assert!(!g.is_bi_lipschitz());
    }

    #[test]
    fn scale_and_sum_bounds_compose() {
        let f = FuncDescriptor::sin_log(0.1, 1.0).unwrap();
        let s = FuncDescriptor::scale(c(0.0, -3.0), f.clone());
        assert!((s.bounds().upper.unwrap() - 3.6).abs() < 1e-12);
        assert!((s.bounds().lower.unwrap() - 2.4).abs() < 1e-12);
        let sum = FuncDescriptor::sum(vec![f.clone(), FuncDescriptor::sin_plain()]).unwrap();
        assert!((sum.bounds().upper.unwrap() - 2.2).abs() < 1e-12);
        assert_eq!(sum.bounds().lower, None);
    }

    #[test]
    fn conjugate_of_complex_combination() {
        let phi = FuncDescriptor::sin_log(0.1, 2.0).unwrap();
        let psi = FuncDescriptor::sin_plain();
        let z = FuncDescriptor::complex(phi.clone(), psi.clone());
        let zc = z.conjugate();
        let expected = FuncDescriptor::complex(phi, FuncDescriptor::scale(-1.0, psi));
        for t in [0.5, 1.0, 3.0, 1e4] {
            assert_eq!(zc.eval(t).unwrap(), z.eval(t).unwrap().conj());
            assert_eq!(zc.eval(t).unwrap(), expected.eval(t).unwrap());
        }
    }

    #[test]
    fn linear_part_of_cone_like_sum() {
        let f = FuncDescriptor::sum(vec![
            FuncDescriptor::scale(2.0, FuncDescriptor::sin_log(0.1, 1.0).unwrap()),
            FuncDescriptor::scale(0.5, FuncDescriptor::sin_log(0.1, 2.0).unwrap()),
            FuncDescriptor::sin_plain(),
        ])
        .unwrap();
        assert_eq!(f.linear_part(), c(2.5, 0.0));
    }
}
