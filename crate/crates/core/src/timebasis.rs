//! Exactly-differentiable time functions.
//!
//! The separation coordinate systems are driven by pairs of time functions
//! `f1(t)`, `f2(t)` drawn from the families of the first-order schemes, and
//! by the closed-form `R(t)` family of the special-k schemes. This module
//! represents the `f` functions as canonical sums of terms
//! `coef * t^p * e^{a t} * {1, sin(b t), cos(b t)}`, a class closed under
//! differentiation and multiplication, so Wronskians and the coefficient
//! functions of `ln Q` are computed without truncation error. Hyperbolic
//! factors are expanded into exponentials on construction.
//!
//! `R(t)` is kept as a separate hand-coded family (it is not
//! exponential-polynomial-trigonometric); its derivatives through order four
//! are closed forms.

use serde::{Deserialize, Serialize};

use crate::model::{self, KramersParams, SchemeTag};
use crate::separation;
use crate::{Error, Result};

/// Oscillatory factor of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OscKind {
    None,
    Sin,
    Cos,
}

/// One canonical term `coef * t^power * e^{exp_rate*t} * osc(osc_freq*t)`.
///
/// Canonical form: `osc_freq > 0` when `osc_kind` is `Sin`/`Cos`, and
/// `osc_freq = 0` when it is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub power: u32,
    pub exp_rate: f64,
    pub osc_kind: OscKind,
    pub osc_freq: f64,
}

impl Term {
    fn key(&self) -> (u32, u64, OscKind, u64) {
        // Bit keys are safe here: rates are normalized (-0.0 -> 0.0) and
        // finite by construction.
        (
            self.power,
            self.exp_rate.to_bits(),
            self.osc_kind,
            self.osc_freq.to_bits(),
        )
    }

    fn eval(&self, t: f64) -> f64 {
        let osc = match self.osc_kind {
            OscKind::None => 1.0,
            OscKind::Sin => (self.osc_freq * t).sin(),
            OscKind::Cos => (self.osc_freq * t).cos(),
        };
        self.coef * t.powi(self.power as i32) * (self.exp_rate * t).exp() * osc
    }
}

/// A function of time in the canonical term class.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeBasis {
    terms: Vec<Term>,
}

fn normalize_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl TimeBasis {
    /// The zero function.
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![Term {
            coef: c,
            power: 0,
            exp_rate: 0.0,
            osc_kind: OscKind::None,
            osc_freq: 0.0,
        }])
    }

    /// `c * t^p`.
    pub fn monomial(c: f64, p: u32) -> Self {
        Self::from_terms(vec![Term {
            coef: c,
            power: p,
            exp_rate: 0.0,
            osc_kind: OscKind::None,
            osc_freq: 0.0,
        }])
    }

    /// `e^{a t}`.
    pub fn exp(a: f64) -> Self {
        Self::from_terms(vec![Term {
            coef: 1.0,
            power: 0,
            exp_rate: a,
            osc_kind: OscKind::None,
            osc_freq: 0.0,
        }])
    }

    /// `sinh(a t)` expanded into exponentials.
    pub fn sinh(a: f64) -> Self {
        Self::from_terms(vec![
            Term {
                coef: 0.5,
                power: 0,
                exp_rate: a,
                osc_kind: OscKind::None,
                osc_freq: 0.0,
            },
            Term {
                coef: -0.5,
                power: 0,
                exp_rate: -a,
                osc_kind: OscKind::None,
                osc_freq: 0.0,
            },
        ])
    }

    /// `cosh(a t)` expanded into exponentials.
    pub fn cosh(a: f64) -> Self {
        Self::from_terms(vec![
            Term {
                coef: 0.5,
                power: 0,
                exp_rate: a,
                osc_kind: OscKind::None,
                osc_freq: 0.0,
            },
            Term {
                coef: 0.5,
                power: 0,
                exp_rate: -a,
                osc_kind: OscKind::None,
                osc_freq: 0.0,
            },
        ])
    }

    /// `sin(b t)`.
    pub fn sin(b: f64) -> Self {
        Self::from_terms(vec![Term {
            coef: 1.0,
            power: 0,
            exp_rate: 0.0,
            osc_kind: OscKind::Sin,
            osc_freq: b,
        }])
    }

    /// `cos(b t)`.
    pub fn cos(b: f64) -> Self {
        Self::from_terms(vec![Term {
            coef: 1.0,
            power: 0,
            exp_rate: 0.0,
            osc_kind: OscKind::Cos,
            osc_freq: b,
        }])
    }

    /// Builds a canonical form from arbitrary terms: trig signs folded,
    /// equal keys merged exactly, zero coefficients dropped.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut canon: Vec<Term> = Vec::with_capacity(terms.len());
        for mut t in terms {
            t.exp_rate = normalize_zero(t.exp_rate);
            t.osc_freq = normalize_zero(t.osc_freq);
            match t.osc_kind {
                OscKind::Sin => {
                    if t.osc_freq == 0.0 {
                        continue; // sin(0) == 0
                    }
                    if t.osc_freq < 0.0 {
                        t.osc_freq = -t.osc_freq;
                        t.coef = -t.coef;
                    }
                }
                OscKind::Cos => {
                    if t.osc_freq == 0.0 {
                        t.osc_kind = OscKind::None;
                    } else if t.osc_freq < 0.0 {
                        t.osc_freq = -t.osc_freq;
                    }
                }
                OscKind::None => {
                    t.osc_freq = 0.0;
                }
            }
            if t.coef != 0.0 {
                canon.push(t);
            }
        }
        canon.sort_by_key(Term::key);
        let mut merged: Vec<Term> = Vec::with_capacity(canon.len());
        for t in canon {
            match merged.last_mut() {
                Some(last) if last.key() == t.key() => last.coef += t.coef,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coef != 0.0);
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates the sum at `t`, reporting the offending term on overflow.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::Validation(format!("t must be finite, got {t}")));
        }
        let mut sum = 0.0;
        for term in &self.terms {
            let v = term.eval(t);
            if !v.is_finite() {
                return Err(Error::Numerical(format!(
                    "term {term:?} overflowed at t={t}"
                )));
            }
            sum += v;
        }
        Ok(sum)
    }

    /// Scales every coefficient by `c`.
    pub fn scale(&self, c: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term { coef: c * t.coef, ..*t })
                .collect(),
        )
    }

    /// Exact sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Exact product; trig products are linearized by product-to-sum.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len() * 2);
        for p in &self.terms {
            for q in &other.terms {
                let coef = p.coef * q.coef;
                let power = p.power + q.power;
                let rate = p.exp_rate + q.exp_rate;
                let push = |out: &mut Vec<Term>, coef: f64, kind: OscKind, freq: f64| {
                    out.push(Term {
                        coef,
                        power,
                        exp_rate: rate,
                        osc_kind: kind,
                        osc_freq: freq,
                    });
                };
                match (p.osc_kind, q.osc_kind) {
                    (OscKind::None, OscKind::None) => push(&mut out, coef, OscKind::None, 0.0),
                    (OscKind::None, k) => push(&mut out, coef, k, q.osc_freq),
                    (k, OscKind::None) => push(&mut out, coef, k, p.osc_freq),
                    (OscKind::Sin, OscKind::Sin) => {
                        // sin u sin v = (cos(u-v) - cos(u+v)) / 2
                        push(&mut out, 0.5 * coef, OscKind::Cos, p.osc_freq - q.osc_freq);
                        push(&mut out, -0.5 * coef, OscKind::Cos, p.osc_freq + q.osc_freq);
                    }
                    (OscKind::Cos, OscKind::Cos) => {
                        // cos u cos v = (cos(u-v) + cos(u+v)) / 2
                        push(&mut out, 0.5 * coef, OscKind::Cos, p.osc_freq - q.osc_freq);
                        push(&mut out, 0.5 * coef, OscKind::Cos, p.osc_freq + q.osc_freq);
                    }
                    (OscKind::Sin, OscKind::Cos) => {
                        // sin u cos v = (sin(u+v) + sin(u-v)) / 2
                        push(&mut out, 0.5 * coef, OscKind::Sin, p.osc_freq + q.osc_freq);
                        push(&mut out, 0.5 * coef, OscKind::Sin, p.osc_freq - q.osc_freq);
                    }
                    (OscKind::Cos, OscKind::Sin) => {
                        push(&mut out, 0.5 * coef, OscKind::Sin, p.osc_freq + q.osc_freq);
                        push(&mut out, -0.5 * coef, OscKind::Sin, p.osc_freq - q.osc_freq);
                    }
                }
            }
        }
        Self::from_terms(out)
    }

    fn deriv_once(&self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * 3);
        for t in &self.terms {
            if t.power > 0 {
                out.push(Term {
                    coef: t.coef * t.power as f64,
                    power: t.power - 1,
                    ..*t
                });
            }
            if t.exp_rate != 0.0 {
                out.push(Term {
                    coef: t.coef * t.exp_rate,
                    ..*t
                });
            }
            match t.osc_kind {
                OscKind::None => {}
                OscKind::Sin => out.push(Term {
                    coef: t.coef * t.osc_freq,
                    osc_kind: OscKind::Cos,
                    ..*t
                }),
                OscKind::Cos => out.push(Term {
                    coef: -t.coef * t.osc_freq,
                    osc_kind: OscKind::Sin,
                    ..*t
                }),
            }
        }
        Self::from_terms(out)
    }

    /// Exact derivative of the given order (1 through 3).
    pub fn deriv(&self, order: u32) -> Self {
        assert!((1..=3).contains(&order), "deriv order must be 1..=3");
        let mut f = self.deriv_once();
        for _ in 1..order {
            f = f.deriv_once();
        }
        f
    }
}

/// The Wronskian `f1 * f2' - f1' * f2` as an exact canonical form.
pub fn wronskian(f1: &TimeBasis, f2: &TimeBasis) -> TimeBasis {
    f1.mul(&f2.deriv(1)).sub(&f1.deriv(1).mul(f2))
}

/// The eight family constants `A1..A4`, `B1..B4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsAB {
    #[serde(rename = "A")]
    pub a: [f64; 4],
    #[serde(rename = "B")]
    pub b: [f64; 4],
}

impl ConstantsAB {
    /// Validates finiteness and that neither vector is identically zero
    /// (a zero vector gives `f = 0`, hence a vanishing Wronskian).
    pub fn new(a: [f64; 4], b: [f64; 4]) -> Result<Self> {
        for v in a.iter().chain(b.iter()) {
            if !v.is_finite() {
                return Err(Error::Validation("constants must be finite".into()));
            }
        }
        if a.iter().all(|&v| v == 0.0) || b.iter().all(|&v| v == 0.0) {
            return Err(Error::Validation(
                "constants vectors A, B must not be zero".into(),
            ));
        }
        Ok(Self { a, b })
    }
}

fn combination(parts: &[(f64, TimeBasis)]) -> TimeBasis {
    let mut acc = TimeBasis::zero();
    for (c, f) in parts {
        acc = acc.add(&f.scale(*c));
    }
    acc
}

/// The family member for one constants vector, without constraint checks.
fn family_member(tag: SchemeTag, c: &[f64; 4], params: &KramersParams) -> TimeBasis {
    let nu = params.nu;
    match tag {
        SchemeTag::FirstOrderCritical => {
            let a = nu / 2.0;
            let t = TimeBasis::monomial(1.0, 1);
            combination(&[
                (c[0], t.mul(&TimeBasis::sinh(a))),
                (c[1], t.mul(&TimeBasis::cosh(a))),
                (c[2], TimeBasis::sinh(a)),
                (c[3], TimeBasis::cosh(a)),
            ])
        }
        SchemeTag::FirstOrderOscillatory => {
            let a = nu / 2.0;
            let b = model::subcritical_b(params);
            combination(&[
                (c[0], TimeBasis::sin(b).mul(&TimeBasis::sinh(a))),
                (c[1], TimeBasis::sin(b).mul(&TimeBasis::cosh(a))),
                (c[2], TimeBasis::cos(b).mul(&TimeBasis::sinh(a))),
                (c[3], TimeBasis::cos(b).mul(&TimeBasis::cosh(a))),
            ])
        }
        SchemeTag::FirstOrderGenericSub | SchemeTag::FirstOrderSpecialK => {
            let a = nu / 2.0;
            let b = model::subcritical_b(params);
            combination(&[
                (c[0], TimeBasis::sinh(b).mul(&TimeBasis::sinh(a))),
                (c[1], TimeBasis::sinh(b).mul(&TimeBasis::cosh(a))),
                (c[2], TimeBasis::cosh(b).mul(&TimeBasis::sinh(a))),
                (c[3], TimeBasis::cosh(b).mul(&TimeBasis::cosh(a))),
            ])
        }
        SchemeTag::FirstOrderFree => combination(&[
            (c[0], TimeBasis::sinh(nu)),
            (c[1], TimeBasis::cosh(nu)),
            (c[2], TimeBasis::monomial(1.0, 1)),
            (c[3], TimeBasis::constant(1.0)),
        ]),
        SchemeTag::SecondOrderFree | SchemeTag::SecondOrderSpecialK => {
            unreachable!("second-order schemes have no f pair")
        }
    }
}

/// Builds the `(f1, f2)` pair of a first-order scheme, in canonical expanded
/// form, after validating the scheme's constants constraint.
pub fn build_f_pair(
    tag: SchemeTag,
    ab: &ConstantsAB,
    params: &KramersParams,
) -> Result<(TimeBasis, TimeBasis)> {
    if !tag.is_first_order() {
        return Err(Error::Validation(format!(
            "{tag} has no time-basis pair; only first-order schemes do"
        )));
    }
    let report = separation::check_constraint(tag, ab, params, separation::TOL_CONSTRAINT_DEFAULT)?;
    if !report.satisfied {
        return Err(Error::Validation(format!(
            "constants violate the {tag} constraint {} (residual {:e})",
            report.condition_text, report.residual
        )));
    }
    Ok(build_f_pair_unchecked(tag, ab, params))
}

/// Family construction without the constraint check. Used for
/// negative-control experiments; solutions built from an unchecked pair are
/// generally not solutions of the PDE.
pub fn build_f_pair_unchecked(
    tag: SchemeTag,
    ab: &ConstantsAB,
    params: &KramersParams,
) -> (TimeBasis, TimeBasis) {
    (
        family_member(tag, &ab.a, params),
        family_member(tag, &ab.b, params),
    )
}

/// The four closed forms for `R(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RChoice {
    /// `1 / cosh(a t)`
    #[serde(rename = "sech")]
    Sech,
    /// `1 / sinh(a t)`, undefined at `t = 0`
    #[serde(rename = "csch")]
    Csch,
    /// `e^{a t}`
    #[serde(rename = "exp+")]
    ExpPlus,
    /// `e^{-a t}`
    #[serde(rename = "exp-")]
    ExpMinus,
}

/// `R(t)` with hand-coded derivatives through order four.
///
/// Every choice satisfies `R''/R - 2 (R'/R)^2 = -a^2` on its domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RFunction {
    pub choice: RChoice,
    pub a: f64,
}

impl RFunction {
    pub fn new(choice: RChoice, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Validation(format!("R rate must be positive, got {a}")));
        }
        Ok(Self { choice, a })
    }

    /// True unless `t` sits on the csch pole.
    pub fn admissible(&self, t: f64) -> bool {
        t.is_finite() && !(self.choice == RChoice::Csch && t == 0.0)
    }

    /// True iff the closed interval `[lo, hi]` contains a pole.
    pub fn has_pole_in(&self, lo: f64, hi: f64) -> bool {
        self.choice == RChoice::Csch && lo <= 0.0 && hi >= 0.0
    }

    fn check_admissible(&self, t: f64) -> Result<()> {
        if !self.admissible(t) {
            return Err(Error::Domain(format!(
                "R(t) = 1/sinh(a t) has a pole at t = 0 (requested t = {t})"
            )));
        }
        Ok(())
    }

    /// `d^order R / dt^order` for order 0 through 4.
    pub fn deriv(&self, order: u32, t: f64) -> Result<f64> {
        assert!(order <= 4, "R derivatives are hand-coded through order 4");
        self.check_admissible(t)?;
        let a = self.a;
        let x = a * t;
        Ok(match self.choice {
            RChoice::Sech => {
                let s = 1.0 / x.cosh();
                let th = x.tanh();
                match order {
                    0 => s,
                    1 => -a * s * th,
                    2 => a * a * s * (2.0 * th * th - 1.0),
                    3 => a.powi(3) * s * th * (5.0 - 6.0 * th * th),
                    _ => {
                        let t2 = th * th;
                        a.powi(4) * s * (5.0 - 28.0 * t2 + 24.0 * t2 * t2)
                    }
                }
            }
            RChoice::Csch => {
                let r = 1.0 / x.sinh();
                let c = 1.0 / x.tanh();
                match order {
                    0 => r,
                    1 => -a * r * c,
                    2 => a * a * r * (c * c + r * r),
                    3 => -a.powi(3) * r * c * (c * c + 5.0 * r * r),
                    _ => {
                        let (c2, r2) = (c * c, r * r);
                        a.powi(4) * r * (c2 * c2 + 18.0 * c2 * r2 + 5.0 * r2 * r2)
                    }
                }
            }
            RChoice::ExpPlus => a.powi(order as i32) * x.exp(),
            RChoice::ExpMinus => {
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                sign * a.powi(order as i32) * (-x).exp()
            }
        })
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.deriv(0, t)
    }

    /// Antiderivative of `R^2` evaluated from `t_ref` to `t` in closed form.
    pub fn integral_r2(&self, t_ref: f64, t: f64) -> Result<f64> {
        let (lo, hi) = if t_ref <= t { (t_ref, t) } else { (t, t_ref) };
        if self.has_pole_in(lo, hi) {
            return Err(Error::Domain(format!(
                "R(t) = 1/sinh(a t) has a pole inside [{lo}, {hi}]"
            )));
        }
        let a = self.a;
        let anti = |t: f64| -> f64 {
            match self.choice {
                RChoice::Sech => (a * t).tanh() / a,
                RChoice::Csch => -1.0 / ((a * t).tanh() * a),
                RChoice::ExpPlus => (2.0 * a * t).exp() / (2.0 * a),
                RChoice::ExpMinus => -(-2.0 * a * t).exp() / (2.0 * a),
            }
        };
        Ok(anti(t) - anti(t_ref))
    }
}

/// Builds `R(t)` for a special-k scheme, with the rate implied by `k`.
pub fn build_r(choice: RChoice, params: &KramersParams, tag: SchemeTag) -> Result<RFunction> {
    if !matches!(
        tag,
        SchemeTag::FirstOrderSpecialK | SchemeTag::SecondOrderSpecialK
    ) {
        return Err(Error::Validation(format!(
            "R(t) belongs to the special-k schemes, not {tag}"
        )));
    }
    let (a, _) = model::regime_constants(params, tag)?;
    RFunction::new(choice, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::KramersParams;

    fn p(nu: f64, k: f64) -> KramersParams {
        KramersParams::new(nu, k).unwrap()
    }

    #[test]
    fn sinh_expansion_is_odd() {
        let f = TimeBasis::sinh(0.5);
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        let v = f.eval(0.7).unwrap();
        assert!((v - (0.35f64).sinh()).abs() < 1e-15);
    }

    #[test]
    fn t_cosh_vanishes_at_zero() {
        let f = TimeBasis::monomial(1.0, 1).mul(&TimeBasis::cosh(0.5));
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn cos_times_exp_at_zero() {
        let f = TimeBasis::cos(0.75f64.sqrt()).mul(&TimeBasis::exp(0.5));
        assert!((f.eval(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deriv_of_exp() {
        let f = TimeBasis::exp(0.5);
        let df = f.deriv(1);
        assert_eq!(df, f.scale(0.5));
    }

    #[test]
    fn deriv_product_rule() {
        // d/dt [t e^{t/2}] = e^{t/2} + (t/2) e^{t/2}
        let f = TimeBasis::monomial(1.0, 1).mul(&TimeBasis::exp(0.5));
        let df = f.deriv(1);
        let expected = TimeBasis::exp(0.5).add(&f.scale(0.5));
        assert_eq!(df, expected);
    }

    #[test]
    fn second_deriv_of_sin() {
        let b = 1.3;
        let f = TimeBasis::sin(b);
        assert_eq!(f.deriv(2), f.scale(-b * b));
    }

    #[test]
    fn deriv_composes() {
        let f = TimeBasis::monomial(2.0, 1)
            .mul(&TimeBasis::exp(-0.3))
            .add(&TimeBasis::sin(1.7).mul(&TimeBasis::cosh(0.4)));
        assert_eq!(f.deriv(1).deriv(1), f.deriv(2));
        assert_eq!(f.deriv(2).deriv(1), f.deriv(3));
    }

    #[test]
    fn mul_linearizes_trig_products() {
        // sin^2(bt) = 1/2 - cos(2bt)/2: no Sin terms survive.
        let f = TimeBasis::sin(0.9).mul(&TimeBasis::sin(0.9));
        assert!(f.terms().iter().all(|t| t.osc_kind != OscKind::Sin));
        let t = 0.37;
        assert!((f.eval(t).unwrap() - (0.9 * t).sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn eval_overflow_reports_term() {
        let f = TimeBasis::exp(1.0);
        let err = f.eval(1e6).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn wronskian_of_hyperbolic_pair_is_constant() {
        // W(sinh(t/2), cosh(t/2)) = -1/2 exactly.
        let f1 = TimeBasis::sinh(0.5);
        let f2 = TimeBasis::cosh(0.5);
        let w = wronskian(&f1, &f2);
        assert_eq!(w, TimeBasis::constant(-0.5));
    }

    #[test]
    fn wronskian_trivial_cases() {
        let one = TimeBasis::constant(1.0);
        let t = TimeBasis::monomial(1.0, 1);
        assert_eq!(wronskian(&one, &t), TimeBasis::constant(1.0));
        let f = TimeBasis::sinh(0.3).add(&TimeBasis::monomial(2.0, 1));
        assert!(wronskian(&f, &f).is_zero());
    }

    #[test]
    fn wronskian_antisymmetric_term_for_term() {
        let f1 = TimeBasis::sin(0.8).mul(&TimeBasis::sinh(0.5));
        let f2 = TimeBasis::cos(0.8).mul(&TimeBasis::cosh(0.5));
        assert_eq!(wronskian(&f1, &f2), wronskian(&f2, &f1).scale(-1.0));
    }

    #[test]
    fn theorem2_pair_from_unit_constants() {
        let params = p(1.0, 0.25);
        let ab = ConstantsAB::new([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]).unwrap();
        let (f1, f2) = build_f_pair(SchemeTag::FirstOrderCritical, &ab, &params).unwrap();
        assert_eq!(f1, TimeBasis::sinh(0.5));
        assert_eq!(f2, TimeBasis::cosh(0.5));
    }

    #[test]
    fn theorem5_pair_violating_constraint_is_rejected() {
        let params = p(1.0, 0.0);
        // f1 = 1, f2 = t has nu*C12 - C34 = -1: not a member.
        let ab = ConstantsAB::new([0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]).unwrap();
        let err = build_f_pair(SchemeTag::FirstOrderFree, &ab, &params).unwrap_err();
        assert!(err.to_string().contains("C34"), "got: {err}");
        let (f1, f2) = build_f_pair_unchecked(SchemeTag::FirstOrderFree, &ab, &params);
        assert_eq!(f1, TimeBasis::constant(1.0));
        assert_eq!(f2, TimeBasis::monomial(1.0, 1));
    }

    #[test]
    fn theorem3_expansion_matches_direct_evaluation() {
        let params = p(1.0, 1.0);
        let b = 0.75f64.sqrt();
        let ab = ConstantsAB::new([0.0, 0.0, 0.0, 1.0], [0.0, 1.0, 0.0, 0.0]).unwrap();
        let (f1, f2) = build_f_pair_unchecked(SchemeTag::FirstOrderOscillatory, &ab, &params);
        // f1 = cos(bt) cosh(t/2), f2 = sin(bt) cosh(t/2): compare the
        // canonical expansion against the unexpanded formulas pointwise.
        for i in 0..10 {
            let t = -2.0 + 4.5 * (i as f64) / 9.0;
            let d1 = (b * t).cos() * (0.5 * t).cosh();
            let d2 = (b * t).sin() * (0.5 * t).cosh();
            assert!((f1.eval(t).unwrap() - d1).abs() < 1e-13 * (1.0 + d1.abs()));
            assert!((f2.eval(t).unwrap() - d2).abs() < 1e-13 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn r_function_forms_and_rates() {
        let params = p(2.0, 0.75);
        let r = build_r(RChoice::Sech, &params, SchemeTag::SecondOrderSpecialK).unwrap();
        assert_eq!(r.a, 0.5); // nu/4
        assert!((r.value(1.0).unwrap() - 1.0 / 0.5f64.cosh()).abs() < 1e-15);

        let params = p(2.0, -3.0);
        let r = build_r(RChoice::ExpMinus, &params, SchemeTag::SecondOrderSpecialK).unwrap();
        assert_eq!(r.a, 1.0); // nu/2
        assert!((r.value(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn csch_pole_is_a_domain_error() {
        let params = p(2.0, 0.75);
        let r = build_r(RChoice::Csch, &params, SchemeTag::SecondOrderSpecialK).unwrap();
        assert!(matches!(r.value(0.0), Err(Error::Domain(_))));
        assert!(r.has_pole_in(-1.0, 1.0));
        assert!(!r.has_pole_in(0.5, 1.0));
    }

    #[test]
    fn build_r_rejects_wrong_tag() {
        let params = p(1.0, 0.0);
        assert!(build_r(RChoice::Sech, &params, SchemeTag::FirstOrderFree).is_err());
    }

    #[test]
    fn r_derivatives_match_finite_differences() {
        let params_pos = p(2.0, 0.75);
        let params_neg = p(2.0, -3.0);
        for (choice, params) in [
            (RChoice::Sech, params_pos),
            (RChoice::Csch, params_pos),
            (RChoice::ExpPlus, params_neg),
            (RChoice::ExpMinus, params_neg),
        ] {
            let r = build_r(choice, &params, SchemeTag::SecondOrderSpecialK).unwrap();
            let h = 1e-4;
            for &t in &[0.35, 0.9, 1.6] {
                for order in 1..=4u32 {
                    let lo = r.deriv(order - 1, t - h).unwrap();
                    let hi = r.deriv(order - 1, t + h).unwrap();
                    let fd = (hi - lo) / (2.0 * h);
                    let exact = r.deriv(order, t).unwrap();
                    assert!(
                        (fd - exact).abs() < 1e-6 * (1.0 + exact.abs()),
                        "{choice:?} order {order} at t={t}: fd={fd}, exact={exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn r_log_derivative_identity() {
        // R''/R - 2 (R'/R)^2 + a^2 = 0 on admissible samples.
        let params_pos = p(2.0, 0.75);
        let params_neg = p(2.0, -3.0);
        for (choice, params) in [
            (RChoice::Sech, params_pos),
            (RChoice::Csch, params_pos),
            (RChoice::ExpPlus, params_neg),
            (RChoice::ExpMinus, params_neg),
        ] {
            let r = build_r(choice, &params, SchemeTag::SecondOrderSpecialK).unwrap();
            for i in 0..100 {
                let mut t = -2.0 + 4.0 * (i as f64) / 99.0;
                if choice == RChoice::Csch && t.abs() < 0.05 {
                    t += 0.1;
                }
                let v = r.value(t).unwrap();
                let d1 = r.deriv(1, t).unwrap();
                let d2 = r.deriv(2, t).unwrap();
                let res = d2 / v - 2.0 * (d1 / v).powi(2) + r.a * r.a;
                assert!(res.abs() < 1e-10, "{choice:?} at t={t}: residual {res}");
            }
        }
    }

    #[test]
    fn integral_r2_closed_forms_match_quadrature() {
        let params = p(2.0, 0.75);
        let r = build_r(RChoice::Sech, &params, SchemeTag::SecondOrderSpecialK).unwrap();
        let exact = r.integral_r2(0.0, 1.3).unwrap();
        let quad = crate::quad::integrate(|t| r.value(t).unwrap().powi(2), 0.0, 1.3, 1e-12, 1e-14)
            .unwrap()
            .value;
        assert!((exact - quad).abs() < 1e-10);
        // tanh(a t)/a at a=0.5, t=1.3
        assert!((exact - (0.65f64).tanh() / 0.5).abs() < 1e-14);

        let r = build_r(
            RChoice::ExpMinus,
            &p(2.0, -3.0),
            SchemeTag::SecondOrderSpecialK,
        )
        .unwrap();
        let exact = r.integral_r2(0.0, 0.8).unwrap();
        assert!((exact - (1.0 - (-1.6f64).exp()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn integral_r2_rejects_pole_crossing() {
        let params = p(2.0, 0.75);
        let r = build_r(RChoice::Csch, &params, SchemeTag::SecondOrderSpecialK).unwrap();
        assert!(matches!(
            r.integral_r2(-0.5, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(r.integral_r2(0.2, 1.0).is_ok());
    }

    #[test]
    fn serde_round_trip_preserves_terms() {
        let f = TimeBasis::sin(0.9)
            .mul(&TimeBasis::cosh(0.5))
            .add(&TimeBasis::monomial(-2.0, 1));
        let json = serde_json::to_string(&f).unwrap();
        let back: TimeBasis = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
        assert!(json.contains("osc_kind"));
    }
}
