//! Separated factors and full solution composition.
//!
//! A separated solution is `u = Q * phi0(t) * phi1(w1) * phi2(w2)` with the
//! factors solving the scheme's reduced ODEs for a spectral pair
//! `(lambda1, lambda2)`. `phi0` and `phi1` are exponentials (the `phi0`
//! exponent of the first-order schemes is a quadrature); `phi2` is an
//! exponential, a parabolic cylinder function, or an Airy function depending
//! on the scheme. Everything is composed in log space until the final
//! exponentiation, so steep Gaussian weights do not overflow intermediates.

use serde::{Deserialize, Serialize};

use crate::model::{KramersParams, SchemeTag};
use crate::quad;
use crate::separation::{CoordFrame, CoordinateSystem};
use crate::special;
use crate::timebasis::{RFunction, TimeBasis};
use crate::{Error, Result};

pub use crate::special::{airy, weber_d, AiryKind};

/// Relative tolerance of the `phi0` quadrature.
pub const PHI0_REL_TOL: f64 = 1e-10;

/// The two separation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SpectralPair {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        if !lambda1.is_finite() || !lambda2.is_finite() {
            return Err(Error::Validation(format!(
                "spectral parameters must be finite, got ({lambda1}, {lambda2})"
            )));
        }
        Ok(Self { lambda1, lambda2 })
    }
}

/// Which special function realizes `phi2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phi2Kind {
    Exponential,
    Weber,
    Airy,
}

/// Branch choice for the Airy-kind factor. The default is the recessive
/// solution `Ai`; `Bi` is the second, dominant solution of the same ODE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AiryBranch {
    #[default]
    Ai,
    Bi,
}

/// The reduced ODE satisfied by `phi2`, reported for residual checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi2Ode {
    /// `phi2' = rate * phi2`
    FirstOrder { rate: f64 },
    /// `phi2'' = (c2 w^2 + c1 w + c0) * phi2`
    SecondOrder { c2: f64, c1: f64, c0: f64 },
}

/// Evaluation result with the overflow/underflow flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eval {
    pub value: f64,
    /// True when the final exponentiation was clamped to the float range.
    pub clamped: bool,
}

#[derive(Debug, Clone)]
struct FirstOrderPhi0 {
    /// `lambda1 f1 + lambda2 f2`
    g: TimeBasis,
    w: TimeBasis,
}

#[derive(Debug, Clone)]
enum Phi0Engine {
    /// Quadrature of `nu ((lambda1 f1 + lambda2 f2)/W)^2`.
    FirstOrder(FirstOrderPhi0),
    /// `nu lambda1 (t - t_ref)`
    FreeExponential,
    /// `nu lambda1 integral R^2`
    SpecialR(RFunction),
}

/// A separated solution: coordinate system, spectral pair and factor
/// evaluators, with `t_ref` fixing the free constant of `phi0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SolutionDescriptor", into = "SolutionDescriptor")]
pub struct SeparatedSolution {
    cs: CoordinateSystem,
    lam: SpectralPair,
    t_ref: f64,
    phi2_kind: Phi2Kind,
    airy_branch: AiryBranch,
    #[serde(skip)]
    phi0: Phi0Engine,
}

/// JSON descriptor sufficient to reconstruct bit-identical evaluators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDescriptor {
    pub cs: CoordinateSystem,
    pub lambda: SpectralPair,
    pub t_ref: f64,
    #[serde(default)]
    pub airy_branch: AiryBranch,
}

impl From<SeparatedSolution> for SolutionDescriptor {
    fn from(sol: SeparatedSolution) -> Self {
        Self {
            cs: sol.cs,
            lambda: sol.lam,
            t_ref: sol.t_ref,
            airy_branch: sol.airy_branch,
        }
    }
}

impl TryFrom<SolutionDescriptor> for SeparatedSolution {
    type Error = Error;

    fn try_from(d: SolutionDescriptor) -> Result<Self> {
        let mut sol = build_solution(d.cs.scheme(), d.cs, d.lambda, d.t_ref)?;
        sol.airy_branch = d.airy_branch;
        Ok(sol)
    }
}

/// Wires the factor evaluators for `tag` on an already-built coordinate
/// system: first-order schemes get a quadrature `phi0` and exponential
/// `phi1`, `phi2`; the free second-order scheme gets the parabolic cylinder
/// factor; the special-k second-order scheme gets the Airy factor.
pub fn build_solution(
    tag: SchemeTag,
    cs: CoordinateSystem,
    lam: SpectralPair,
    t_ref: f64,
) -> Result<SeparatedSolution> {
    if cs.scheme() != tag {
        return Err(Error::Validation(format!(
            "coordinate system was built for {}, not {tag}",
            cs.scheme()
        )));
    }
    SpectralPair::new(lam.lambda1, lam.lambda2)?;
    if !cs.t_interval().contains(t_ref) {
        return Err(Error::Validation(format!(
            "t_ref = {t_ref} outside the working interval [{}, {}]",
            cs.t_interval().lo,
            cs.t_interval().hi
        )));
    }
    let (phi0, phi2_kind) = match (tag, cs.sources()) {
        (tag, crate::separation::SystemSources::FirstOrder { f1, f2 })
            if tag.is_first_order() =>
        {
            let g = f1.scale(lam.lambda1).add(&f2.scale(lam.lambda2));
            let w = crate::timebasis::wronskian(f1, f2);
            (
                Phi0Engine::FirstOrder(FirstOrderPhi0 { g, w }),
                Phi2Kind::Exponential,
            )
        }
        (SchemeTag::SecondOrderFree, crate::separation::SystemSources::Free) => {
            (Phi0Engine::FreeExponential, Phi2Kind::Weber)
        }
        (SchemeTag::SecondOrderSpecialK, crate::separation::SystemSources::SpecialK { r }) => {
            (Phi0Engine::SpecialR(*r), Phi2Kind::Airy)
        }
        _ => {
            return Err(Error::Validation(
                "coordinate-system sources do not match the scheme".into(),
            ))
        }
    };
    Ok(SeparatedSolution {
        cs,
        lam,
        t_ref,
        phi2_kind,
        airy_branch: AiryBranch::Ai,
        phi0,
    })
}

impl SeparatedSolution {
    pub fn scheme(&self) -> SchemeTag {
        self.cs.scheme()
    }

    pub fn params(&self) -> &KramersParams {
        self.cs.params()
    }

    pub fn coordinate_system(&self) -> &CoordinateSystem {
        &self.cs
    }

    pub fn lam(&self) -> SpectralPair {
        self.lam
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn phi2_kind(&self) -> Phi2Kind {
        self.phi2_kind
    }

    pub fn airy_branch(&self) -> AiryBranch {
        self.airy_branch
    }

    /// Selects the second (dominant) Airy branch for the special-k factor.
    pub fn with_airy_branch(mut self, branch: AiryBranch) -> Self {
        self.airy_branch = branch;
        self
    }

    /// `ln phi0(t)`, normalized so `phi0(t_ref) = 1`.
    pub fn log_phi0(&self, t: f64) -> Result<f64> {
        self.log_phi0_increment(self.t_ref, t)
    }

    /// `ln phi0(t_b) - ln phi0(t_a)`. Short spans integrate on a single
    /// fixed panel, which varies smoothly with the endpoints; that keeps
    /// finite-difference stencils over `phi0` free of adaptive-subdivision
    /// noise.
    pub fn log_phi0_increment(&self, t_a: f64, t_b: f64) -> Result<f64> {
        let nu = self.params().nu;
        match &self.phi0 {
            Phi0Engine::FirstOrder(data) => {
                let integrand = |tau: f64| {
                    let g = data.g.eval(tau).unwrap_or(f64::NAN);
                    let w = data.w.eval(tau).unwrap_or(f64::NAN);
                    let ratio = g / w;
                    ratio * ratio
                };
                let value = if (t_b - t_a).abs() <= 0.1 {
                    quad::integrate_panel(integrand, t_a, t_b)
                } else {
                    quad::integrate(integrand, t_a, t_b, PHI0_REL_TOL, 1e-14)?.value
                };
                if !value.is_finite() {
                    return Err(Error::Numerical(format!(
                        "phi0 quadrature failed on [{t_a}, {t_b}]"
                    )));
                }
                Ok(nu * value)
            }
            Phi0Engine::FreeExponential => Ok(nu * self.lam.lambda1 * (t_b - t_a)),
            Phi0Engine::SpecialR(r) => Ok(nu * self.lam.lambda1 * r.integral_r2(t_a, t_b)?),
        }
    }

    /// `phi0(t)`.
    pub fn phi0(&self, t: f64) -> Result<f64> {
        Ok(self.log_phi0(t)?.exp())
    }

    /// The coefficient `A0(t)` of the reduced equation `phi0' = A0 phi0`.
    pub fn phi0_rate(&self, t: f64) -> Result<f64> {
        let nu = self.params().nu;
        match &self.phi0 {
            Phi0Engine::FirstOrder(data) => {
                let ratio = data.g.eval(t)? / data.w.eval(t)?;
                Ok(nu * ratio * ratio)
            }
            Phi0Engine::FreeExponential => Ok(nu * self.lam.lambda1),
            Phi0Engine::SpecialR(r) => {
                let rv = r.value(t)?;
                Ok(nu * self.lam.lambda1 * rv * rv)
            }
        }
    }

    /// `(scale, lambda)` of the exponent of `phi1 = exp(scale * lambda * w1)`.
    fn phi1_exponent_parts(&self) -> (f64, f64) {
        match self.phi2_kind {
            Phi2Kind::Exponential => (1.0, self.lam.lambda1),
            Phi2Kind::Weber | Phi2Kind::Airy => (self.params().nu, self.lam.lambda2),
        }
    }

    /// The constant rate of the reduced equation `phi1' = A1 phi1`.
    pub fn phi1_rate(&self) -> f64 {
        let (scale, lam) = self.phi1_exponent_parts();
        scale * lam
    }

    /// `phi1(w1)`.
    pub fn phi1(&self, omega1: f64) -> Result<f64> {
        phi1_exponential(self.phi1_exponent_parts().1, omega1, self.phi1_exponent_parts().0)
    }

    /// `phi2(w2)`.
    pub fn phi2(&self, omega2: f64) -> Result<f64> {
        let lam = self.lam;
        match self.phi2_kind {
            Phi2Kind::Exponential => {
                let v = (lam.lambda2 * omega2).exp();
                if !v.is_finite() {
                    return Err(Error::Numerical(format!(
                        "phi2 exponential overflowed at w2 = {omega2}"
                    )));
                }
                Ok(v)
            }
            Phi2Kind::Weber => {
                // Completing the square maps phi2'' = (w^2/4 + l2 w + l1 - 1/2) phi2
                // onto the Weber equation of order l2^2 - l1 at argument w + 2 l2.
                special::weber_d(
                    lam.lambda2 * lam.lambda2 - lam.lambda1,
                    omega2 + 2.0 * lam.lambda2,
                )
            }
            Phi2Kind::Airy => {
                if lam.lambda2 != 0.0 {
                    let c = lam.lambda2.cbrt();
                    let s = c * omega2 + lam.lambda1 / (c * c);
                    let kind = match self.airy_branch {
                        AiryBranch::Ai => special::AiryKind::Ai,
                        AiryBranch::Bi => special::AiryKind::Bi,
                    };
                    special::airy(kind, s)
                } else if lam.lambda1 > 0.0 {
                    Ok((-(lam.lambda1.sqrt()) * omega2).exp())
                } else if lam.lambda1 < 0.0 {
                    Ok(((-lam.lambda1).sqrt() * omega2).cos())
                } else {
                    Ok(1.0)
                }
            }
        }
    }

    /// The reduced ODE satisfied by `phi2`, for residual checks.
    pub fn phi2_ode(&self) -> Phi2Ode {
        let lam = self.lam;
        match self.phi2_kind {
            Phi2Kind::Exponential => Phi2Ode::FirstOrder { rate: lam.lambda2 },
            Phi2Kind::Weber => Phi2Ode::SecondOrder {
                c2: 0.25,
                c1: lam.lambda2,
                c0: lam.lambda1 - 0.5,
            },
            Phi2Kind::Airy => Phi2Ode::SecondOrder {
                c2: 0.0,
                c1: lam.lambda2,
                c0: lam.lambda1,
            },
        }
    }

    /// Rows of the 3x2 matrix `dU_i/dlambda_j` of the reduced system at a
    /// sample point, with the factor values substituted.
    pub fn lambda_jacobian(&self, t: f64, x: f64, y: f64) -> Result<[[f64; 2]; 3]> {
        let frame = self.cs.frame(t)?;
        let omega1 = frame.omega(0, x, y);
        let omega2 = frame.omega(1, x, y);
        let phi0 = self.phi0(t)?;
        let phi1 = self.phi1(omega1)?;
        let phi2 = self.phi2(omega2)?;
        let nu = self.params().nu;
        Ok(match &self.phi0 {
            Phi0Engine::FirstOrder(data) => {
                let w = data.w.eval(t)?;
                let g = data.g.eval(t)?;
                // U0 = phi0' - nu (g/W)^2 phi0 with g = l1 f1 + l2 f2.
                let (fv1, fv2) = match self.cs.sources() {
                    crate::separation::SystemSources::FirstOrder { f1, f2 } => {
                        (f1.eval(t)?, f2.eval(t)?)
                    }
                    _ => unreachable!(),
                };
                [
                    [
                        -2.0 * nu * g * fv1 / (w * w) * phi0,
                        -2.0 * nu * g * fv2 / (w * w) * phi0,
                    ],
                    [-phi1, 0.0],
                    [0.0, -phi2],
                ]
            }
            Phi0Engine::FreeExponential => [
                [-nu * phi0, 0.0],
                [0.0, -nu * phi1],
                [-phi2, -omega2 * phi2],
            ],
            Phi0Engine::SpecialR(r) => {
                let rv = r.value(t)?;
                [
                    [-nu * rv * rv * phi0, 0.0],
                    [0.0, -nu * phi1],
                    [-phi2, -omega2 * phi2],
                ]
            }
        })
    }

    /// Precomputed evaluation state at a fixed time.
    pub fn slice(&self, t: f64) -> Result<SolutionSlice<'_>> {
        Ok(SolutionSlice {
            sol: self,
            frame: self.cs.frame(t)?,
            log_phi0: self.log_phi0(t)?,
        })
    }

    /// Slice at `t` with `ln phi0` accumulated incrementally from `base`.
    /// For stencil offsets this keeps the quadrature error a smooth function
    /// of `t`, so finite differences over slices converge at full order.
    pub fn slice_from(&self, base: &SolutionSlice<'_>, t: f64) -> Result<SolutionSlice<'_>> {
        Ok(SolutionSlice {
            sol: self,
            frame: self.cs.frame(t)?,
            log_phi0: base.log_phi0 + self.log_phi0_increment(base.frame.t, t)?,
        })
    }

    /// Full solution value at a point.
    pub fn eval(&self, t: f64, x: f64, y: f64) -> Result<Eval> {
        self.slice(t)?.eval(x, y)
    }

    /// Value only, for callers that treat clamping as ordinary saturation.
    pub fn value(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        Ok(self.eval(t, x, y)?.value)
    }
}

/// Evaluation state of one solution at one time: the coordinate frame plus
/// the accumulated `ln phi0`. Point evaluations from a slice cost a handful
/// of flops plus one special-function call.
#[derive(Debug, Clone, Copy)]
pub struct SolutionSlice<'a> {
    sol: &'a SeparatedSolution,
    pub frame: CoordFrame,
    pub log_phi0: f64,
}

impl SolutionSlice<'_> {
    pub fn t(&self) -> f64 {
        self.frame.t
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Eval> {
        let sol = self.sol;
        let omega1 = self.frame.omega(0, x, y);
        let omega2 = self.frame.omega(1, x, y);
        let (scale, lam1) = sol.phi1_exponent_parts();
        let mut exponent = self.frame.ln_q(x, y) + self.log_phi0 + scale * lam1 * omega1;
        let prefactor = match sol.phi2_kind {
            Phi2Kind::Exponential => {
                exponent += sol.lam.lambda2 * omega2;
                1.0
            }
            _ => sol.phi2(omega2)?,
        };
        // ln Q stays in log space until here; only the final product can
        // saturate, and saturation is reported rather than silently inf.
        if exponent > 709.0 {
            return Ok(Eval {
                value: if prefactor == 0.0 {
                    0.0
                } else {
                    prefactor.signum() * f64::MAX
                },
                clamped: prefactor != 0.0,
            });
        }
        let value = prefactor * exponent.exp();
        if !value.is_finite() {
            return Ok(Eval {
                value: value.signum() * f64::MAX,
                clamped: true,
            });
        }
        let clamped = value == 0.0 && prefactor != 0.0 && exponent < -745.0;
        Ok(Eval { value, clamped })
    }
}

/// `phi0` of the first-order schemes as a standalone operation:
/// `exp(nu * integral_{t_ref}^{t} ((f1 l1 + f2 l2) / W)^2 dtau)` by adaptive
/// quadrature to relative tolerance 1e-10.
pub fn phi0_first_order(
    f1: &TimeBasis,
    f2: &TimeBasis,
    lam: SpectralPair,
    params: &KramersParams,
    t_ref: f64,
    t: f64,
) -> Result<f64> {
    let g = f1.scale(lam.lambda1).add(&f2.scale(lam.lambda2));
    let w = crate::timebasis::wronskian(f1, f2);
    let integrand = |tau: f64| {
        let ratio = g.eval(tau).unwrap_or(f64::NAN) / w.eval(tau).unwrap_or(f64::NAN);
        ratio * ratio
    };
    let result = quad::integrate(integrand, t_ref, t, PHI0_REL_TOL, 1e-14)?;
    if !result.value.is_finite() {
        return Err(Error::Numerical(format!(
            "phi0 quadrature failed on [{t_ref}, {t}] (error estimate {:e})",
            result.error_estimate
        )));
    }
    Ok((params.nu * result.value).exp())
}

/// `phi0` of the special-k second-order scheme:
/// `exp(nu * lambda1 * integral_{t_ref}^{t} R^2 dtau)` with the closed-form
/// antiderivative of `R^2`.
pub fn phi0_special(
    r: &RFunction,
    lam: SpectralPair,
    params: &KramersParams,
    t_ref: f64,
    t: f64,
) -> Result<f64> {
    Ok((params.nu * lam.lambda1 * r.integral_r2(t_ref, t)?).exp())
}

/// `exp(scale * lam * omega1)`; scale is 1 for the first-order schemes and
/// `nu` for the second-order ones.
pub fn phi1_exponential(lam_component: f64, omega1: f64, scale: f64) -> Result<f64> {
    let v = (scale * lam_component * omega1).exp();
    if !v.is_finite() {
        return Err(Error::Numerical(format!(
            "phi1 exponential overflowed at w1 = {omega1}"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SchemeTag;
    use crate::separation::{build_coordinate_system, SystemSources, TimeInterval};
    use crate::timebasis::{self, ConstantsAB, RChoice};

    fn params(nu: f64, k: f64) -> KramersParams {
        KramersParams::new(nu, k).unwrap()
    }

    fn lam(l1: f64, l2: f64) -> SpectralPair {
        SpectralPair::new(l1, l2).unwrap()
    }

    fn theorem2_solution(l: SpectralPair) -> SeparatedSolution {
        let p = params(1.0, 0.25);
        let ab = ConstantsAB::new([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]).unwrap();
        let (f1, f2) = timebasis::build_f_pair(SchemeTag::FirstOrderCritical, &ab, &p).unwrap();
        let cs = build_coordinate_system(
            SchemeTag::FirstOrderCritical,
            SystemSources::FirstOrder { f1, f2 },
            &p,
            TimeInterval::new(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        build_solution(SchemeTag::FirstOrderCritical, cs, l, 0.0).unwrap()
    }

    fn maxwellian() -> SeparatedSolution {
        let p = params(1.0, 0.0);
        let cs = build_coordinate_system(
            SchemeTag::SecondOrderFree,
            SystemSources::Free,
            &p,
            TimeInterval::new(-2.0, 2.0).unwrap(),
        )
        .unwrap();
        build_solution(SchemeTag::SecondOrderFree, cs, lam(0.0, 0.0), 0.0).unwrap()
    }

    #[test]
    fn phi0_trivial_cases() {
        let sol = theorem2_solution(lam(0.0, 0.0));
        assert_eq!(sol.phi0(0.7).unwrap(), 1.0);
        let sol = theorem2_solution(lam(0.4, -0.3));
        assert_eq!(sol.phi0(0.0).unwrap(), 1.0); // t = t_ref
        assert!(sol.phi0(0.5).unwrap() > 1.0); // positive integrand
    }

    /// Fixed-step Simpson oracle on a million points.
    fn simpson_oracle<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        let n = 1_000_000; // even
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn phi0_free_family_against_simpson_oracle() {
        // f1 = 1, f2 = sinh t (nu = 1, k = 0), lambda = (1, 0):
        // integrand ((f1)/W)^2 = sech^2, so phi0(1) = exp(tanh 1).
        let p = params(1.0, 0.0);
        let f1 = TimeBasis::constant(1.0);
        let f2 = TimeBasis::sinh(1.0);
        let l = lam(1.0, 0.0);
        let got = phi0_first_order(&f1, &f2, l, &p, 0.0, 1.0).unwrap();
        let oracle = simpson_oracle(|t: f64| (1.0 / t.cosh()).powi(2), 0.0, 1.0).exp();
        assert!((got - oracle).abs() < 1e-8 * oracle, "got {got}, oracle {oracle}");
        assert!((got - 1f64.tanh().exp()).abs() < 1e-10);
    }

    #[test]
    fn phi0_special_closed_forms() {
        let p = params(2.0, -3.0);
        let r = timebasis::build_r(RChoice::ExpMinus, &p, SchemeTag::SecondOrderSpecialK).unwrap();
        assert_eq!(phi0_special(&r, lam(0.0, 5.0), &p, 0.0, 1.0).unwrap(), 1.0);
        let got = phi0_special(&r, lam(1.0, 0.0), &p, 0.0, 0.7).unwrap();
        let exact = (2.0 * (1.0 - (-1.4f64).exp()) / 2.0).exp();
        assert!((got - exact).abs() < 1e-13 * exact);

        let p = params(2.0, 0.75);
        let r = timebasis::build_r(RChoice::Sech, &p, SchemeTag::SecondOrderSpecialK).unwrap();
        let got = phi0_special(&r, lam(1.0, 0.0), &p, 0.0, 1.0).unwrap();
        let quad_ref = crate::quad::integrate(
            |t| r.value(t).unwrap().powi(2),
            0.0,
            1.0,
            1e-12,
            1e-14,
        )
        .unwrap()
        .value;
        assert!((got.ln() - 2.0 * quad_ref).abs() < 1e-10);
    }

    #[test]
    fn phi1_trivial_cases() {
        assert_eq!(phi1_exponential(0.0, 3.0, 1.0).unwrap(), 1.0);
        assert_eq!(phi1_exponential(1.0, 0.0, 1.0).unwrap(), 1.0);
        let e = phi1_exponential(2.0, 0.5, 1.0).unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-15);
        assert!(phi1_exponential(1.0, 1e6, 1.0).is_err());
    }

    #[test]
    fn maxwellian_composition() {
        // SecondOrderFree with lambda = 0: u = e^{-y^2/4} * D_0(y) = e^{-y^2/2}.
        let sol = maxwellian();
        for &(t, x, y) in &[(0.3, -1.0, 0.0), (0.0, 0.5, 1.0), (-1.0, 2.0, -1.5)] {
            let u = sol.value(t, x, y).unwrap();
            let exact = (-y * y / 2.0).exp();
            assert!(
                (u - exact).abs() < 1e-12 * exact.max(1e-6),
                "u({t},{x},{y}) = {u}, want {exact}"
            );
        }
        assert!((sol.value(0.3, -1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_lambda_first_order_is_pure_weight() {
        let sol = theorem2_solution(lam(0.0, 0.0));
        for &(t, x, y) in &[(0.0, 0.4, -0.2), (0.5, -1.0, 0.7)] {
            let u = sol.value(t, x, y).unwrap();
            let q = sol.coordinate_system().ln_q(t, x, y).unwrap().exp();
            assert!((u - q).abs() < 1e-13 * q.abs());
        }
    }

    #[test]
    fn eval_matches_independent_exponent_composition() {
        // Cross-check against a direct reimplementation of the composed
        // exponent using raw sinh/cosh arithmetic and Simpson quadrature.
        let l = lam(0.3, -0.2);
        let sol = theorem2_solution(l);
        let (t, x, y) = (0.5, 0.2, -0.1);
        let got = sol.value(t, x, y).unwrap();

        let (f1, df1) = ((0.5 * t).sinh(), 0.5 * (0.5 * t).cosh());
        let (f2, df2) = ((0.5 * t).cosh(), 0.5 * (0.5 * t).sinh());
        let w = -0.5; // constant for this pair
        let om1 = (f1 * y - df1 * x) / w;
        let om2 = (f2 * y - df2 * x) / w;
        let nu = 1.0;
        let k = 0.25;
        // Time-derivative combinations for the Q coefficients.
        let (ddf1, ddf2) = (0.25 * f1, 0.25 * f2);
        let (d3f1, d3f2) = (0.125 * (0.5 * t).cosh(), 0.125 * (0.5 * t).sinh());
        let qyy = -(ddf2 * f1 - ddf1 * f2) / (4.0 * nu * w) - 0.25;
        let qxy = ((ddf2 * df1 - ddf1 * df2) / w - k) / (2.0 * nu);
        let qxx = (d3f2 * df1 - d3f1 * df2) / (4.0 * nu * w) - k / 4.0;
        let integrand = |tau: f64| {
            let g = l.lambda1 * (0.5 * tau).sinh() + l.lambda2 * (0.5 * tau).cosh();
            (g / w) * (g / w)
        };
        let quad = simpson_oracle(integrand, 0.0, t);
        let exponent = nu * quad
            + l.lambda1 * om1
            + l.lambda2 * om2
            + qyy * y * y
            + qxy * x * y
            + qxx * x * x
            - 0.5 * w.abs().ln()
            + 0.5 * nu * t;
        let oracle = exponent.exp();
        assert!(
            (got - oracle).abs() < 1e-8 * oracle.abs(),
            "got {got}, oracle {oracle}"
        );
    }

    #[test]
    fn eval_is_multiplicative_in_phi_scalings() {
        // Scaling phi0 by c (equivalently shifting t_ref) scales u by the
        // same factor at every point.
        let sol_a = theorem2_solution(lam(0.3, -0.2));
        let p = params(1.0, 0.25);
        let ab = ConstantsAB::new([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]).unwrap();
        let (f1, f2) = timebasis::build_f_pair(SchemeTag::FirstOrderCritical, &ab, &p).unwrap();
        let cs = build_coordinate_system(
            SchemeTag::FirstOrderCritical,
            SystemSources::FirstOrder { f1, f2 },
            &p,
            TimeInterval::new(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        let sol_b =
            build_solution(SchemeTag::FirstOrderCritical, cs, lam(0.3, -0.2), 0.4).unwrap();
        let c = sol_a.phi0(0.4).unwrap();
        for &(t, x, y) in &[(0.1, 0.3, 0.2), (0.6, -0.5, -0.4)] {
            let ua = sol_a.value(t, x, y).unwrap();
            let ub = sol_b.value(t, x, y).unwrap();
            assert!((ua - c * ub).abs() < 1e-10 * ua.abs().max(1e-12));
        }
    }

    #[test]
    fn slice_increment_matches_direct_quadrature() {
        let sol = theorem2_solution(lam(1.0, 1.0));
        let base = sol.slice(0.5).unwrap();
        let stepped = sol.slice_from(&base, 0.52).unwrap();
        let direct = sol.slice(0.52).unwrap();
        assert!((stepped.log_phi0 - direct.log_phi0).abs() < 1e-12);
        let a = stepped.eval(0.3, -0.2).unwrap().value;
        let b = direct.eval(0.3, -0.2).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn airy_phi2_branches() {
        let p = params(2.0, -3.0);
        let r = timebasis::build_r(RChoice::ExpMinus, &p, SchemeTag::SecondOrderSpecialK).unwrap();
        let cs = build_coordinate_system(
            SchemeTag::SecondOrderSpecialK,
            SystemSources::SpecialK { r },
            &p,
            TimeInterval::new(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        // lambda2 = 1, lambda1 = 0: phi2(0) = Ai(0).
        let sol = build_solution(
            SchemeTag::SecondOrderSpecialK,
            cs.clone(),
            lam(0.0, 1.0),
            0.0,
        )
        .unwrap();
        let ai0 = special::airy(special::AiryKind::Ai, 0.0).unwrap();
        assert!((sol.phi2(0.0).unwrap() - ai0).abs() < 1e-15);

        // lambda2 = 0, lambda1 = 1: elementary decaying exponential.
        let sol =
            build_solution(SchemeTag::SecondOrderSpecialK, cs.clone(), lam(1.0, 0.0), 0.0).unwrap();
        assert!((sol.phi2(0.7).unwrap() - (-0.7f64).exp()).abs() < 1e-15);

        // lambda2 = 0, lambda1 = -1: cosine; lambda = 0: constant.
        let sol =
            build_solution(SchemeTag::SecondOrderSpecialK, cs.clone(), lam(-1.0, 0.0), 0.0).unwrap();
        assert!((sol.phi2(0.7).unwrap() - 0.7f64.cos()).abs() < 1e-15);
        let sol =
            build_solution(SchemeTag::SecondOrderSpecialK, cs, lam(0.0, 0.0), 0.0).unwrap();
        assert_eq!(sol.phi2(0.7).unwrap(), 1.0);
    }

    #[test]
    fn weber_phi2_square_completion() {
        let p = params(1.0, 0.0);
        let cs = build_coordinate_system(
            SchemeTag::SecondOrderFree,
            SystemSources::Free,
            &p,
            TimeInterval::new(-2.0, 2.0).unwrap(),
        )
        .unwrap();
        // order = l2^2 - l1 = 1 at l = (0, 1): phi2(y) = D_1(y + 2).
        let sol = build_solution(SchemeTag::SecondOrderFree, cs, lam(0.0, 1.0), 0.0).unwrap();
        let got = sol.phi2(-1.0).unwrap();
        let exact = 1.0 * (-(1.0f64) * 1.0 / 4.0).exp(); // D_1(1) = 1 * e^{-1/4}
        assert!((got - exact).abs() < 1e-12);
    }

    #[test]
    fn clamped_evaluation_is_flagged() {
        let sol = theorem2_solution(lam(0.0, 0.0));
        // Huge |y| drives ln Q to -inf: underflow clamps to zero w/ flag off
        // (prefactor exponential path), still finite.
        let eval = sol.eval(0.0, 0.0, 60.0).unwrap();
        assert!(eval.value.is_finite());
    }

    #[test]
    fn build_solution_validates_inputs() {
        let sol = theorem2_solution(lam(0.0, 0.0));
        let cs = sol.coordinate_system().clone();
        assert!(build_solution(SchemeTag::FirstOrderFree, cs.clone(), lam(0.0, 0.0), 0.0).is_err());
        assert!(build_solution(
            SchemeTag::FirstOrderCritical,
            cs,
            lam(0.0, 0.0),
            5.0 // outside interval
        )
        .is_err());
    }

    #[test]
    fn descriptor_round_trip_is_bit_identical() {
        let sol = theorem2_solution(lam(0.3, -0.2));
        let json = serde_json::to_string(&sol).unwrap();
        let back: SeparatedSolution = serde_json::from_str(&json).unwrap();
        let (t, x, y) = (0.37, 0.21, -0.83);
        assert_eq!(
            sol.value(t, x, y).unwrap().to_bits(),
            back.value(t, x, y).unwrap().to_bits()
        );
    }
}
