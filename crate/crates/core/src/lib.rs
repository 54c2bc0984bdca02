//! Separated-variable solution families of the Kramers equation
//!
//! The Kramers equation treated here is the (1+2)-dimensional Fokker-Planck
//! equation with a linear external force,
//!
//! ```text
//! u_t = nu*u_yy - y*u_x + (nu*y + k*x)*u_y + nu*u,
//! ```
//!
//! for a density `u(t, x, y)` and real parameters `nu > 0`, `k`. This crate
//! constructs every solution family of the form
//! `u = Q(t,x,y) * phi0(t) * phi1(w1(t,x,y)) * phi2(w2(t,x,y))` admitted by
//! the equation, evaluates them on space-time grids, and verifies them
//! mechanically:
//!
//! - [`model`] classifies which separation schemes exist for a given `(nu, k)`,
//! - [`timebasis`] holds the exactly-differentiable time functions `f1`, `f2`
//!   and the closed-form `R(t)` family,
//! - [`separation`] validates the constants constraints and builds the
//!   coordinate systems `(w1, w2, ln Q)` with analytic partials,
//! - [`reduced`] evaluates the separated factors (exponentials, parabolic
//!   cylinder functions, Airy functions) and composes full solutions,
//! - [`verify`] applies the PDE operator through finite-difference stencils,
//!   checks the reduced ODEs and rank condition, and cross-validates against
//!   an independent Runge-Kutta/finite-difference time stepper,
//! - [`selftest`] runs the full acceptance matrix and reports per-criterion
//!   pass/fail.
//!
//! All types are immutable after construction and all operations are pure;
//! everything is safe for unrestricted concurrent use. Grid scans and the
//! finite-difference stepper fan out across points with rayon, with results
//! reduced in index order so reports are byte-reproducible.

pub mod model;
pub mod quad;
pub mod reduced;
pub mod selftest;
pub mod separation;
pub mod special;
pub mod timebasis;
pub mod verify;

pub use model::{classify, regime_constants, KramersParams, RegimeReport, SchemeTag};
pub use reduced::{build_solution, SeparatedSolution, SpectralPair};
pub use separation::{CoordinateSystem, SystemSources, TimeInterval};
pub use timebasis::{ConstantsAB, RChoice, RFunction, TimeBasis};

/// Crate version embedded in every serialized report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Error type shared by all modules.
///
/// The three categories map onto the CLI exit codes: validation and domain
/// errors are caller mistakes (exit 1), numerical errors are runtime
/// failures of a computation (exit 2).
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Invalid input: parameter out of range, unavailable scheme, violated
    /// constants constraint, malformed configuration.
    #[error("validation: {0}")]
    Validation(String),
    /// Input outside the admissible domain of an evaluator (pole of R,
    /// vanishing Wronskian, special-function argument out of range).
    #[error("domain: {0}")]
    Domain(String),
    /// A numerical procedure failed: overflow, quadrature non-convergence,
    /// unstable time stepping.
    #[error("numerical: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
