//! The acceptance matrix.
//!
//! Nine criteria cover classification, the positive-control residual matrix,
//! negative controls (falsifiability), the stationary Maxwellian, the special
//! functions, the `R(t)` identities, the finite-difference cross-validation,
//! the reduced-ODE/rank checks, and byte-level determinism of this report
//! itself. The CLI `selftest` command and the `acceptance` integration test
//! both run through this module.
//!
//! Reports carry no wall-clock data, so two runs of the same build serialize
//! to identical bytes; runtime budgets are enforced by the acceptance test
//! around these calls.

use serde::{Deserialize, Serialize};

use crate::model::{classify_default, KramersParams, SchemeTag};
use crate::reduced::{build_solution, SeparatedSolution, SpectralPair};
use crate::separation::{
    build_coordinate_system, build_coordinate_system_forced, SystemSources, TimeInterval,
};
use crate::special::{airy, gamma, weber_d, AiryKind};
use crate::timebasis::{build_f_pair, build_f_pair_unchecked, ConstantsAB, RChoice, RFunction};
use crate::verify;
use crate::{Result, VERSION};

/// Spectral pairs exercised by the residual and ODE matrices.
pub const LAMBDA_MATRIX: [(f64, f64); 3] = [(0.0, 0.0), (0.3, -0.2), (1.0, 1.0)];

/// One acceptance criterion outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub details: Vec<String>,
}

impl CriterionReport {
    fn new(id: u32, name: &str) -> Self {
        Self {
            id,
            name: name.to_string(),
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.pass = false;
        }
        self.details.push(format!(
            "{} {detail}",
            if ok { "pass:" } else { "FAIL:" }
        ));
    }
}

/// Full acceptance report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfTestReport {
    pub version: String,
    pub all_pass: bool,
    pub criteria: Vec<CriterionReport>,
}

impl SelfTestReport {
    fn from_criteria(criteria: Vec<CriterionReport>) -> Self {
        Self {
            version: VERSION.to_string(),
            all_pass: criteria.iter().all(|c| c.pass),
            criteria,
        }
    }
}

/// How a positive control sources its coordinate system.
#[derive(Debug, Clone, Copy)]
pub enum ControlSources {
    Pair(ConstantsAB),
    R(RChoice),
    Static,
}

/// One entry of the positive-control matrix: a scheme with constants chosen
/// so the Wronskian stays order-one on the window and the solution varies on
/// unit scales (steeper choices would drown the 1e-6 stencil bound in
/// truncation error rather than exercise correctness).
#[derive(Debug, Clone, Copy)]
pub struct ControlSpec {
    pub label: &'static str,
    pub tag: SchemeTag,
    pub nu: f64,
    pub k: f64,
    pub sources: ControlSources,
    /// Working interval of the coordinate system.
    pub interval: [f64; 2],
    /// Scan window in time (inside the interval with stencil margin).
    pub window: [f64; 2],
    /// Half-width of the spatial box.
    pub box_half: f64,
}

impl ControlSpec {
    pub fn params(&self) -> KramersParams {
        KramersParams::new(self.nu, self.k).expect("control params are valid")
    }

    /// Builds the solution for a spectral pair, `t_ref` at the window midpoint.
    pub fn build(&self, lambda: (f64, f64)) -> Result<SeparatedSolution> {
        let params = self.params();
        let interval = TimeInterval::new(self.interval[0], self.interval[1])?;
        let cs = match self.sources {
            ControlSources::Pair(ab) => {
                let (f1, f2) = build_f_pair(self.tag, &ab, &params)?;
                build_coordinate_system(
                    self.tag,
                    SystemSources::FirstOrder { f1, f2 },
                    &params,
                    interval,
                )?
            }
            ControlSources::R(choice) => {
                let r = crate::timebasis::build_r(choice, &params, self.tag)?;
                build_coordinate_system(self.tag, SystemSources::SpecialK { r }, &params, interval)?
            }
            ControlSources::Static => {
                build_coordinate_system(self.tag, SystemSources::Free, &params, interval)?
            }
        };
        let t_ref = 0.5 * (self.window[0] + self.window[1]);
        build_solution(self.tag, cs, SpectralPair::new(lambda.0, lambda.1)?, t_ref)
    }

    /// Scan grid of the residual matrix: 21x21 in space, 5 sample times.
    pub fn grid(&self) -> verify::GridSpec {
        verify::GridSpec::new(
            [-self.box_half, self.box_half],
            [-self.box_half, self.box_half],
            self.window,
            21,
            21,
            5,
        )
        .expect("control grid is valid")
    }
}

fn ab(a: [f64; 4], b: [f64; 4]) -> ControlSources {
    ControlSources::Pair(ConstantsAB::new(a, b).expect("control constants are valid"))
}

/// The positive-control matrix: every scheme tag with two constants choices
/// (two parameter points where the scheme has no free constants).
pub fn positive_controls() -> Vec<ControlSpec> {
    vec![
        ControlSpec {
            label: "critical/sinh-cosh",
            tag: SchemeTag::FirstOrderCritical,
            nu: 1.0,
            k: 0.25,
            sources: ab([0.0, 0.0, 3.0, 0.0], [0.0, 0.0, 0.0, 3.0]),
            interval: [0.1, 0.9],
            window: [0.2, 0.8],
            box_half: 2.0,
        },
        ControlSpec {
            label: "critical/exp-cosh",
            tag: SchemeTag::FirstOrderCritical,
            nu: 1.0,
            k: 0.25,
            sources: ab([0.0, 0.0, 4.0, 4.0], [0.0, 0.0, 0.0, 4.0]),
            interval: [0.1, 0.9],
            window: [0.2, 0.8],
            box_half: 2.0,
        },
        ControlSpec {
            label: "oscillatory/sin.sinh-cos.cosh",
            tag: SchemeTag::FirstOrderOscillatory,
            nu: 1.0,
            k: 1.0,
            sources: ab([3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 3.0]),
            interval: [0.5, 1.3],
            window: [0.6, 1.2],
            box_half: 1.5,
        },
        ControlSpec {
            label: "oscillatory/sin.cosh-cos.sinh",
            tag: SchemeTag::FirstOrderOscillatory,
            nu: 1.0,
            k: 1.0,
            sources: ab([0.0, 4.0, 0.0, 0.0], [0.0, 0.0, 4.0, 0.0]),
            interval: [0.9, 1.7],
            window: [1.0, 1.6],
            box_half: 1.5,
        },
        ControlSpec {
            label: "subcritical/sinh.sinh-cosh.cosh",
            tag: SchemeTag::FirstOrderGenericSub,
            nu: 1.0,
            k: -1.0,
            sources: ab([3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 3.0]),
            interval: [0.9, 1.7],
            window: [1.0, 1.6],
            box_half: 1.5,
        },
        ControlSpec {
            label: "subcritical/sinh.cosh-cosh.sinh",
            tag: SchemeTag::FirstOrderGenericSub,
            nu: 1.0,
            k: -1.0,
            sources: ab([0.0, 3.0, 0.0, 0.0], [0.0, 0.0, 3.0, 0.0]),
            interval: [0.9, 1.7],
            window: [1.0, 1.6],
            box_half: 1.5,
        },
        ControlSpec {
            label: "free1/const-sinh",
            tag: SchemeTag::FirstOrderFree,
            nu: 1.0,
            k: 0.0,
            sources: ab([0.0, 0.0, 0.0, 3.0], [3.0, 0.0, 0.0, 0.0]),
            interval: [0.1, 0.9],
            window: [0.2, 0.8],
            box_half: 1.5,
        },
        ControlSpec {
            label: "free1/mixed",
            tag: SchemeTag::FirstOrderFree,
            nu: 1.0,
            k: 0.0,
            sources: ab([0.0, 3.0, 0.0, 3.0], [3.0, 0.0, 3.0, 0.0]),
            interval: [0.1, 0.9],
            window: [0.2, 0.8],
            box_half: 1.5,
        },
        ControlSpec {
            label: "special-k1/k=3nu2_16",
            tag: SchemeTag::FirstOrderSpecialK,
            nu: 2.0,
            k: 0.75,
            sources: ab([3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 3.0]),
            interval: [0.3, 1.1],
            window: [0.4, 1.0],
            box_half: 1.5,
        },
        ControlSpec {
            label: "special-k1/k=-3nu2_4",
            tag: SchemeTag::FirstOrderSpecialK,
            nu: 1.0,
            k: -0.75,
            sources: ab([3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 3.0]),
            interval: [0.9, 1.7],
            window: [1.0, 1.6],
            box_half: 1.5,
        },
        ControlSpec {
            label: "free2/nu=1",
            tag: SchemeTag::SecondOrderFree,
            nu: 1.0,
            k: 0.0,
            sources: ControlSources::Static,
            interval: [-2.0, 2.0],
            window: [0.2, 0.8],
            box_half: 2.0,
        },
        ControlSpec {
            label: "free2/nu=2",
            tag: SchemeTag::SecondOrderFree,
            nu: 2.0,
            k: 0.0,
            sources: ControlSources::Static,
            interval: [-2.0, 2.0],
            window: [0.2, 0.8],
            box_half: 2.0,
        },
        ControlSpec {
            label: "special-k2/sech",
            tag: SchemeTag::SecondOrderSpecialK,
            nu: 2.0,
            k: 0.75,
            sources: ControlSources::R(RChoice::Sech),
            interval: [0.3, 1.1],
            window: [0.4, 1.0],
            box_half: 1.0,
        },
        ControlSpec {
            label: "special-k2/exp-",
            tag: SchemeTag::SecondOrderSpecialK,
            nu: 2.0,
            k: -3.0,
            sources: ControlSources::R(RChoice::ExpMinus),
            interval: [0.5, 1.3],
            window: [0.6, 1.2],
            box_half: 1.0,
        },
    ]
}

/// Criterion 1: classification sweep reproduces the distinguished k set.
pub fn criterion_1() -> CriterionReport {
    let mut rep = CriterionReport::new(1, "regime classification sweep");
    for nu in [0.5, 1.0, 2.0, 3.7] {
        let nu2 = nu * nu;
        let specials = [0.0, 3.0 * nu2 / 16.0, -3.0 * nu2 / 4.0];
        let sweep = [
            specials[0],
            specials[1],
            specials[2],
            nu2 / 4.0,
            nu2 / 4.0 + 0.1,
            nu2 / 4.0 - 0.1,
            1.0,
            -1.0,
        ];
        for k in sweep {
            let params = KramersParams::new(nu, k).unwrap();
            let report = match classify_default(&params) {
                Ok(r) => r,
                Err(e) => {
                    rep.check(false, format!("classify(nu={nu}, k={k}) failed: {e}"));
                    continue;
                }
            };
            let first: Vec<_> = report
                .available
                .iter()
                .filter(|t| t.is_first_order())
                .collect();
            let second: Vec<_> = report
                .available
                .iter()
                .filter(|t| !t.is_first_order())
                .collect();
            let expect_second = specials.contains(&k);
            rep.check(
                first.len() == 1,
                format!("nu={nu} k={k}: exactly one first-order tag (got {})", first.len()),
            );
            rep.check(
                second.is_empty() != expect_second,
                format!(
                    "nu={nu} k={k}: second-order tags present = {} (expected {})",
                    !second.is_empty(),
                    expect_second
                ),
            );
        }
    }
    rep
}

/// Criterion 2: positive-control residual matrix with h-refinement.
pub fn criterion_2() -> CriterionReport {
    let mut rep = CriterionReport::new(2, "positive-control residual matrix");
    for control in positive_controls() {
        for lambda in LAMBDA_MATRIX {
            let result = control.build(lambda).and_then(|sol| {
                let grid = control.grid();
                let coarse = verify::residual_scan(&sol, &grid, 1e-2)?;
                let fine = verify::residual_scan(&sol, &grid, 5e-3)?;
                Ok((coarse, fine))
            });
            match result {
                Ok((coarse, fine)) => {
                    let ratio = coarse.rel_max / fine.rel_max.max(1e-300);
                    rep.check(
                        coarse.rel_max <= 1e-6,
                        format!(
                            "{} lambda=({},{}) rel_max={:.3e} <= 1e-6",
                            control.label, lambda.0, lambda.1, coarse.rel_max
                        ),
                    );
                    // Fourth-order convergence holds until the residual hits
                    // the floating-point floor of the stencil; a fine-h scan
                    // already below 1e-9 relative (three decades under the
                    // acceptance bound) is at that floor and the ratio test
                    // is vacuous there.
                    let at_floor = fine.rel_max <= 1e-9;
                    rep.check(
                        ratio >= 10.0 || at_floor,
                        format!(
                            "{} lambda=({},{}) refinement ratio {:.1} >= 10 (fine={:.3e})",
                            control.label, lambda.0, lambda.1, ratio, fine.rel_max
                        ),
                    );
                }
                Err(e) => rep.check(false, format!("{} failed: {e}", control.label)),
            }
        }
    }
    rep
}

/// Builds the three negative-control solutions.
fn negative_controls() -> Result<Vec<(&'static str, SeparatedSolution, verify::GridSpec)>> {
    let mut out = Vec::new();

    // (a) Theorem-2 constants violating the constraint (residual -2).
    let params = KramersParams::new(1.0, 0.25)?;
    let bad = ConstantsAB::new([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0])?;
    let (f1, f2) = build_f_pair_unchecked(SchemeTag::FirstOrderCritical, &bad, &params);
    let cs = build_coordinate_system(
        SchemeTag::FirstOrderCritical,
        SystemSources::FirstOrder { f1, f2 },
        &params,
        TimeInterval::new(0.2, 1.0)?,
    )?;
    let sol = build_solution(
        SchemeTag::FirstOrderCritical,
        cs,
        SpectralPair::new(0.3, -0.2)?,
        0.6,
    )?;
    let grid = verify::GridSpec::new([-1.0, 1.0], [-1.0, 1.0], [0.3, 0.9], 21, 21, 5)?;
    out.push(("violated-constraint", sol, grid));

    // (b) Special-k system forced under a non-distinguished k.
    let params = KramersParams::new(2.0, 1.0)?;
    let r = RFunction::new(RChoice::Sech, 0.5)?;
    let cs = build_coordinate_system_forced(
        SchemeTag::SecondOrderSpecialK,
        SystemSources::SpecialK { r },
        &params,
        TimeInterval::new(0.1, 0.9)?,
    )?;
    let sol = build_solution(
        SchemeTag::SecondOrderSpecialK,
        cs,
        SpectralPair::new(0.0, 1.0)?,
        0.5,
    )?;
    let grid = verify::GridSpec::new([-1.0, 1.0], [-1.0, 1.0], [0.2, 0.8], 21, 21, 5)?;
    out.push(("wrong-k-special", sol, grid));

    // (c) ln Q middle term read as "x" instead of "x*y".
    let params = KramersParams::new(1.0, 0.25)?;
    let good = ConstantsAB::new([0.0, 0.0, 3.0, 0.0], [0.0, 0.0, 0.0, 3.0])?;
    let (f1, f2) = build_f_pair(SchemeTag::FirstOrderCritical, &good, &params)?;
    let cs = build_coordinate_system(
        SchemeTag::FirstOrderCritical,
        SystemSources::FirstOrder { f1, f2 },
        &params,
        TimeInterval::new(0.1, 0.9)?,
    )?
    .with_middle_term_x();
    let sol = build_solution(
        SchemeTag::FirstOrderCritical,
        cs,
        SpectralPair::new(0.0, 0.0)?,
        0.5,
    )?;
    let grid = verify::GridSpec::new([-1.0, 1.0], [-1.0, 1.0], [0.2, 0.8], 21, 21, 5)?;
    out.push(("middle-term-x", sol, grid));

    Ok(out)
}

/// Criterion 3: negative controls must fail loudly.
pub fn criterion_3() -> CriterionReport {
    let mut rep = CriterionReport::new(3, "negative controls");
    match negative_controls() {
        Ok(controls) => {
            for (label, sol, grid) in controls {
                match verify::residual_scan(&sol, &grid, 1e-2) {
                    Ok(report) => rep.check(
                        report.rel_max >= 1e-2,
                        format!("{label}: rel_max={:.3e} >= 1e-2", report.rel_max),
                    ),
                    Err(e) => rep.check(false, format!("{label}: scan failed: {e}")),
                }
            }
        }
        Err(e) => rep.check(false, format!("construction failed: {e}")),
    }
    rep
}

/// Criterion 4: the stationary Maxwellian annihilates the operator to the
/// stencil floor.
pub fn criterion_4() -> CriterionReport {
    let mut rep = CriterionReport::new(4, "stationary Maxwellian");
    let build = || -> Result<verify::ResidualReport> {
        let params = KramersParams::new(1.0, 0.0)?;
        let cs = build_coordinate_system(
            SchemeTag::SecondOrderFree,
            SystemSources::Free,
            &params,
            TimeInterval::new(-2.0, 2.0)?,
        )?;
        let sol = build_solution(
            SchemeTag::SecondOrderFree,
            cs,
            SpectralPair::new(0.0, 0.0)?,
            0.0,
        )?;
        let grid = verify::GridSpec::new([-2.0, 2.0], [-2.0, 2.0], [0.2, 0.8], 21, 21, 5)?;
        // h = 4e-3 sits at the crossover of 4th-order truncation and
        // rounding for this field; the residual is analytically zero.
        verify::residual_scan(&sol, &grid, 4e-3)
    };
    match build() {
        Ok(report) => rep.check(
            report.rel_max <= 1e-10,
            format!("rel_max={:.3e} <= 1e-10", report.rel_max),
        ),
        Err(e) => rep.check(false, format!("failed: {e}")),
    }
    rep
}

/// Criterion 5: special-function checks.
pub fn criterion_5() -> CriterionReport {
    let mut rep = CriterionReport::new(5, "special functions");

    // D_0(z) = e^{-z^2/4} and the Hermite reductions D_n, n <= 3, |z| <= 6.
    let hermite = |n: u32, z: f64| -> f64 {
        let x = z / std::f64::consts::SQRT_2;
        let h = match n {
            0 => 1.0,
            1 => 2.0 * x,
            2 => 4.0 * x * x - 2.0,
            _ => 8.0 * x * x * x - 12.0 * x,
        };
        0.5f64.powf(n as f64 / 2.0) * h * (-z * z / 4.0).exp()
    };
    let mut worst = 0.0f64;
    for n in 0..=3u32 {
        for i in 0..=24 {
            let z = -6.0 + 12.0 * i as f64 / 24.0;
            let exact = hermite(n, z);
            match weber_d(n as f64, z) {
                Ok(got) => worst = worst.max((got - exact).abs() / (1.0 + exact.abs())),
                Err(e) => rep.check(false, format!("D_{n}({z}) failed: {e}")),
            }
        }
    }
    rep.check(worst <= 1e-9, format!("Hermite reduction worst={worst:.3e} <= 1e-9"));

    // Airy ODE residual on |s| <= 5 with a 4th-order second difference,
    // normalized by the solution scale (Bi reaches ~650 by s = 5).
    let h = 8e-3;
    let mut worst = 0.0f64;
    for kind in [AiryKind::Ai, AiryKind::Bi] {
        for i in 0..=50 {
            let s = -4.8 + 9.6 * i as f64 / 50.0;
            let f = |x: f64| airy(kind, x).unwrap();
            let d2 = (-f(s + 2.0 * h) + 16.0 * f(s + h) - 30.0 * f(s) + 16.0 * f(s - h)
                - f(s - 2.0 * h))
                / (12.0 * h * h);
            worst = worst.max((d2 - s * f(s)).abs() / f(s).abs().max(1.0));
        }
    }
    rep.check(worst <= 1e-8, format!("Airy ODE residual worst={worst:.3e} <= 1e-8"));

    // Wronskian Ai Bi' - Ai' Bi = 1/pi at five points.
    let mut worst = 0.0f64;
    for s in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let w = airy(AiryKind::Ai, s).unwrap() * airy(AiryKind::BiPrime, s).unwrap()
            - airy(AiryKind::AiPrime, s).unwrap() * airy(AiryKind::Bi, s).unwrap();
        worst = worst.max((w - std::f64::consts::FRAC_1_PI).abs());
    }
    rep.check(worst <= 1e-8, format!("Airy Wronskian worst={worst:.3e} <= 1e-8"));

    // Ai(0) against the closed form through the gamma function.
    let ai0 = airy(AiryKind::Ai, 0.0).unwrap();
    let exact = 3.0f64.powf(-2.0 / 3.0) / gamma(2.0 / 3.0);
    rep.check(
        (ai0 - exact).abs() <= 1e-12,
        format!("Ai(0) matches 3^(-2/3)/Gamma(2/3) to {:.3e}", (ai0 - exact).abs()),
    );
    rep
}

/// Criterion 6: R-identity checks, positive at both distinguished k values
/// and negative at a generic k.
pub fn criterion_6() -> CriterionReport {
    let mut rep = CriterionReport::new(6, "R(t) identities");
    let nu = 2.0;
    for k in [3.0 * nu * nu / 16.0, -3.0 * nu * nu / 4.0] {
        let params = KramersParams::new(nu, k).unwrap();
        for choice in [RChoice::Sech, RChoice::Csch, RChoice::ExpPlus, RChoice::ExpMinus] {
            let result = crate::timebasis::build_r(choice, &params, SchemeTag::SecondOrderSpecialK)
                .and_then(|r| verify::r_identity_checks_default(&r, &params));
            match result {
                Ok(report) => {
                    rep.check(
                        report.ode_residual_max <= 1e-10 && report.scalar_residual.abs() <= 1e-10,
                        format!(
                            "{choice:?} k={k}: ode={:.3e}, scalar={:.3e} <= 1e-10",
                            report.ode_residual_max,
                            report.scalar_residual.abs()
                        ),
                    );
                }
                Err(e) => rep.check(false, format!("{choice:?} k={k} failed: {e}")),
            }
        }
    }
    // Negative control: sech R with the 3nu^2/16 rate against k = 1.
    let params = KramersParams::new(2.0, 1.0).unwrap();
    let r = RFunction::new(RChoice::Sech, 0.5).unwrap();
    match verify::r_identity_checks_default(&r, &params) {
        Ok(report) => rep.check(
            report.ode_residual_max >= 1e-2 && report.scalar_residual.abs() >= 1e-2,
            format!(
                "wrong k: ode={:.3e}, scalar={:.3e} >= 1e-2",
                report.ode_residual_max,
                report.scalar_residual.abs()
            ),
        ),
        Err(e) => rep.check(false, format!("wrong-k check failed: {e}")),
    }
    rep
}

/// The three schemes exercised by the manufactured-solution study.
fn mms_cases() -> Vec<(&'static str, ControlSpec, (f64, f64), [f64; 2])> {
    let controls = positive_controls();
    vec![
        ("critical", controls[0], (0.3, -0.2), [0.2, 0.5]),
        ("free2", controls[10], (0.5, 0.5), [0.2, 0.5]),
        ("special-k2", controls[13], (0.0, 1.0), [0.6, 0.8]),
    ]
}

/// Criterion 7: finite-difference cross-validation with a 32/64/128
/// refinement study.
pub fn criterion_7() -> CriterionReport {
    let mut rep = CriterionReport::new(7, "finite-difference cross-validation");
    for (label, control, lambda, t_span) in mms_cases() {
        let study = || -> Result<(Vec<f64>, Vec<f64>, f64)> {
            let sol = control.build(lambda)?;
            let mut errors = Vec::new();
            let mut spacings = Vec::new();
            let mut analytic_max = 0.0f64;
            for n in [32usize, 64, 128] {
                let grid = verify::GridSpec::new([-1.0, 1.0], [-1.0, 1.0], t_span, n, n, 1)?;
                let result = verify::fd_simulate(&sol, &grid)?;
                errors.push(result.report.error_l2);
                spacings.push(grid.dy());
                analytic_max = result.report.analytic_max;
            }
            Ok((errors, spacings, analytic_max))
        };
        match study() {
            Ok((errors, spacings, analytic_max)) => {
                let mut orders = Vec::new();
                for i in 1..errors.len() {
                    orders.push(
                        (errors[i - 1] / errors[i]).ln() / (spacings[i - 1] / spacings[i]).ln(),
                    );
                }
                let in_band = orders.iter().all(|&p| (p - 2.0).abs() <= 0.3);
                rep.check(
                    in_band,
                    format!(
                        "{label}: spatial orders [{}] within 2.0 +- 0.3",
                        orders
                            .iter()
                            .map(|p| format!("{p:.2}"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                );
                let bound = 1e-3 * analytic_max;
                rep.check(
                    errors[2] <= bound,
                    format!(
                        "{label}: L2 at 128^2 = {:.3e} <= 1e-3 * max|u| = {bound:.3e}",
                        errors[2]
                    ),
                );
            }
            Err(e) => rep.check(false, format!("{label} failed: {e}")),
        }
    }
    rep
}

/// Criterion 8: reduced-ODE residuals and the rank condition on the full
/// positive-control matrix.
pub fn criterion_8() -> CriterionReport {
    let mut rep = CriterionReport::new(8, "reduced-ODE and rank checks");
    for control in positive_controls() {
        for lambda in LAMBDA_MATRIX {
            let result = control.build(lambda).and_then(|sol| {
                let ode = verify::ode_residual_checks(&sol, 50)?;
                let t = 0.5 * (control.window[0] + control.window[1]) + 0.07;
                let rank = verify::rank_condition(&sol, (t, 0.37, -0.41))?;
                Ok((ode, rank))
            });
            match result {
                Ok((ode, rank)) => {
                    let worst = ode.phi0_max.max(ode.phi1_max).max(ode.phi2_max);
                    rep.check(
                        worst <= 1e-6,
                        format!(
                            "{} lambda=({},{}) ode residual {:.3e} <= 1e-6",
                            control.label, lambda.0, lambda.1, worst
                        ),
                    );
                    rep.check(
                        rank,
                        format!(
                            "{} lambda=({},{}) rank condition holds",
                            control.label, lambda.0, lambda.1
                        ),
                    );
                }
                Err(e) => rep.check(false, format!("{} failed: {e}", control.label)),
            }
        }
    }
    rep
}

/// Criteria 1 through 8 (everything except the determinism meta-check).
pub fn run_numeric() -> SelfTestReport {
    SelfTestReport::from_criteria(vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ])
}

/// Criterion 9: two runs of the numeric matrix serialize identically.
pub fn criterion_9(first: &SelfTestReport) -> CriterionReport {
    let mut rep = CriterionReport::new(9, "determinism");
    let second = run_numeric();
    let a = serde_json::to_string(first).expect("report serializes");
    let b = serde_json::to_string(&second).expect("report serializes");
    rep.check(
        a == b,
        format!(
            "two selftest runs byte-identical ({} bytes)",
            a.len().min(b.len())
        ),
    );
    rep
}

/// The full acceptance matrix including the determinism criterion.
pub fn run_all() -> SelfTestReport {
    let numeric = run_numeric();
    let det = criterion_9(&numeric);
    let mut criteria = numeric.criteria;
    criteria.push(det);
    SelfTestReport::from_criteria(criteria)
}
