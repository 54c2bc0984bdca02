//! PDE instance and regime classification.
//!
//! A Kramers equation instance is the pair `(nu, k)`. Separation into three
//! first-order ODEs exists for every `k`; separation into two first-order
//! plus one second-order ODE exists only for `k` in `{0, 3nu^2/16, -3nu^2/4}`.
//! The first-order family itself branches on the sign of `k - nu^2/4`
//! (double root, complex pair, or distinct real pair of the characteristic
//! exponents), which gives the scheme tags below.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default relative tolerance for the k-equality tests, measured against nu^2.
pub const TOL_K_DEFAULT: f64 = 1e-12;

/// The pair `(nu, k)` defining the PDE instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KramersParams {
    pub nu: f64,
    pub k: f64,
}

impl KramersParams {
    /// Validates `nu > 0` and finiteness of both parameters.
    pub fn new(nu: f64, k: f64) -> Result<Self> {
        if !nu.is_finite() || !k.is_finite() {
            return Err(Error::Validation(format!(
                "parameters must be finite, got nu={nu}, k={k}"
            )));
        }
        if nu <= 0.0 {
            return Err(Error::Validation("nu must be positive".into()));
        }
        Ok(Self { nu, k })
    }

    /// `3nu^2/16`, the first distinguished k value.
    pub fn k_special_pos(&self) -> f64 {
        3.0 * self.nu * self.nu / 16.0
    }

    /// `-3nu^2/4`, the second distinguished k value.
    pub fn k_special_neg(&self) -> f64 {
        -3.0 * self.nu * self.nu / 4.0
    }

    /// `nu^2/4`, the boundary between the oscillatory and sub-critical
    /// first-order families.
    pub fn k_critical(&self) -> f64 {
        self.nu * self.nu / 4.0
    }
}

/// Separation scheme tags.
///
/// Exactly one `FirstOrder*` tag applies to any `(nu, k)`; the two
/// `SecondOrder*` tags appear only at the distinguished k values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeTag {
    /// `k = nu^2/4`: polynomial-times-hyperbolic time basis.
    FirstOrderCritical,
    /// `k > nu^2/4`: trigonometric-times-hyperbolic time basis.
    FirstOrderOscillatory,
    /// `k < nu^2/4`, `k` not in `{0, 3nu^2/16, -3nu^2/4}`: product of two
    /// hyperbolic factors.
    FirstOrderGenericSub,
    /// `k = 0`: hyperbolic-plus-linear time basis.
    FirstOrderFree,
    /// `k = 0`: static coordinates `(x, y)` with Gaussian weight; the
    /// second-order factor is a parabolic cylinder function.
    SecondOrderFree,
    /// `k in {3nu^2/16, -3nu^2/4}`: the generic sub-critical family
    /// specialized to the distinguished k.
    FirstOrderSpecialK,
    /// `k in {3nu^2/16, -3nu^2/4}`: coordinates driven by `R(t)`; the
    /// second-order factor is an Airy function.
    SecondOrderSpecialK,
}

impl SchemeTag {
    /// True for the four three-first-order-ODE tags.
    pub fn is_first_order(&self) -> bool {
        matches!(
            self,
            SchemeTag::FirstOrderCritical
                | SchemeTag::FirstOrderOscillatory
                | SchemeTag::FirstOrderGenericSub
                | SchemeTag::FirstOrderFree
                | SchemeTag::FirstOrderSpecialK
        )
    }
}

impl std::fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Classification result: available schemes plus the derived constants used
/// by the time-basis builders.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeReport {
    pub params: KramersParams,
    pub available: Vec<SchemeTag>,
    /// Exponential rate of the time basis (`nu/2` for the hyperbolic
    /// families, `nu` for the free family) or of `R(t)` (`nu/4` or `nu/2`
    /// at the distinguished k values).
    pub a: f64,
    /// Secondary rate `sqrt(|k - nu^2/4|)`, present only for the
    /// oscillatory and generic sub-critical tags.
    pub b: Option<f64>,
}

/// Classifies which separation schemes are available for `params`.
///
/// k-equality tests use the absolute tolerance `tol_k * nu^2`. The result
/// always contains exactly one first-order tag; second-order tags appear iff
/// `k` is within tolerance of `0`, `3nu^2/16` or `-3nu^2/4`.
pub fn classify(params: &KramersParams, tol_k: f64) -> Result<RegimeReport> {
    if !(tol_k > 0.0) {
        return Err(Error::Validation(format!("tol_k must be positive, got {tol_k}")));
    }
    if tol_k >= 1.0 / 32.0 {
        // The distinguished k values are nu^2/4 apart at the closest; a
        // larger tolerance would let the equality tests overlap.
        return Err(Error::Validation(format!(
            "tol_k must be below 1/32 to keep the k tests disjoint, got {tol_k}"
        )));
    }
    let tol = tol_k * params.nu * params.nu;
    let k = params.k;
    let near = |target: f64| (k - target).abs() <= tol;

    let mut available = Vec::new();
    if near(0.0) {
        available.push(SchemeTag::FirstOrderFree);
        available.push(SchemeTag::SecondOrderFree);
    } else if near(params.k_special_pos()) || near(params.k_special_neg()) {
        available.push(SchemeTag::FirstOrderSpecialK);
        available.push(SchemeTag::SecondOrderSpecialK);
    } else if near(params.k_critical()) {
        available.push(SchemeTag::FirstOrderCritical);
    } else if k > params.k_critical() {
        available.push(SchemeTag::FirstOrderOscillatory);
    } else {
        available.push(SchemeTag::FirstOrderGenericSub);
    }

    let (a, b) = constants_for(params, available[0]);
    Ok(RegimeReport {
        params: *params,
        available,
        a,
        b,
    })
}

/// Classification with the default k tolerance.
pub fn classify_default(params: &KramersParams) -> Result<RegimeReport> {
    classify(params, TOL_K_DEFAULT)
}

/// The `(a, b)` pair used by the time-basis builders for `tag`.
///
/// `a = nu/2` for the critical/oscillatory/sub-critical families, `nu` for
/// the free families, and the `R(t)` rate (`nu/4` under `k = 3nu^2/16`,
/// `nu/2` under `k = -3nu^2/4`) for the special-k tags. `b` is present only
/// where the family formulas use it.
pub fn regime_constants(params: &KramersParams, tag: SchemeTag) -> Result<(f64, Option<f64>)> {
    let report_tags = classify_default(params)?.available;
    if !report_tags.contains(&tag) {
        return Err(Error::Validation(format!(
            "scheme {tag} is not available for nu={}, k={}",
            params.nu, params.k
        )));
    }
    Ok(constants_for(params, tag))
}

fn constants_for(params: &KramersParams, tag: SchemeTag) -> (f64, Option<f64>) {
    let nu = params.nu;
    match tag {
        SchemeTag::FirstOrderCritical => (nu / 2.0, None),
        SchemeTag::FirstOrderOscillatory => (nu / 2.0, Some((params.k - params.k_critical()).sqrt())),
        SchemeTag::FirstOrderGenericSub => (nu / 2.0, Some((params.k_critical() - params.k).sqrt())),
        SchemeTag::FirstOrderFree | SchemeTag::SecondOrderFree => (nu, None),
        SchemeTag::FirstOrderSpecialK | SchemeTag::SecondOrderSpecialK => {
            if params.k > 0.0 {
                (nu / 4.0, None)
            } else {
                (nu / 2.0, None)
            }
        }
    }
}

/// The rate `b = sqrt(|k - nu^2/4|)` of the secondary factor in the
/// sub-critical family formulas. Also used by the special-k first-order
/// builder, whose family is the sub-critical one at the distinguished k.
pub(crate) fn subcritical_b(params: &KramersParams) -> f64 {
    (params.k_critical() - params.k).abs().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_params() {
        assert!(KramersParams::new(-1.0, 0.0).is_err());
        assert!(KramersParams::new(0.0, 0.0).is_err());
        assert!(KramersParams::new(1.0, f64::NAN).is_err());
        assert!(KramersParams::new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn classify_free_case() {
        let p = KramersParams::new(1.0, 0.0).unwrap();
        let r = classify_default(&p).unwrap();
        assert_eq!(
            r.available,
            vec![SchemeTag::FirstOrderFree, SchemeTag::SecondOrderFree]
        );
    }

    #[test]
    fn classify_special_k() {
        // 3*2^2/16 = 0.75
        let p = KramersParams::new(2.0, 0.75).unwrap();
        let r = classify_default(&p).unwrap();
        assert_eq!(
            r.available,
            vec![SchemeTag::FirstOrderSpecialK, SchemeTag::SecondOrderSpecialK]
        );
        assert_eq!(r.a, 0.5); // nu/4
    }

    #[test]
    fn classify_oscillatory_only() {
        let p = KramersParams::new(1.0, 1.0).unwrap();
        let r = classify_default(&p).unwrap();
        assert_eq!(r.available, vec![SchemeTag::FirstOrderOscillatory]);
        assert_eq!(r.a, 0.5);
        assert!((r.b.unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn classify_critical_boundary() {
        let p = KramersParams::new(1.0, 0.25).unwrap();
        let r = classify_default(&p).unwrap();
        assert_eq!(r.available, vec![SchemeTag::FirstOrderCritical]);
        assert_eq!(r.b, None);
    }

    #[test]
    fn regime_constants_special_negative() {
        let p = KramersParams::new(2.0, -3.0).unwrap();
        let (a, b) = regime_constants(&p, SchemeTag::FirstOrderSpecialK).unwrap();
        assert_eq!(a, 1.0); // nu/2
        assert_eq!(b, None);
    }

    #[test]
    fn regime_constants_rejects_unavailable_tag() {
        let p = KramersParams::new(1.0, 1.0).unwrap();
        assert!(regime_constants(&p, SchemeTag::SecondOrderFree).is_err());
    }

    #[test]
    fn tolerance_caught_near_special_value() {
        let p = KramersParams::new(2.0, 0.75 + 1e-14).unwrap();
        let r = classify_default(&p).unwrap();
        assert!(r.available.contains(&SchemeTag::SecondOrderSpecialK));
        // Outside tolerance: plain sub-critical.
        let p = KramersParams::new(2.0, 0.75 + 1e-6).unwrap();
        let r = classify_default(&p).unwrap();
        assert_eq!(r.available, vec![SchemeTag::FirstOrderGenericSub]);
    }

    #[test]
    fn huge_tolerance_rejected() {
        let p = KramersParams::new(1.0, 0.0).unwrap();
        assert!(classify(&p, 0.5).is_err());
    }
}
