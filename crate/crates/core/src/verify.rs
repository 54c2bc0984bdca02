//! The falsification engine.
//!
//! Candidate solutions are checked only through pointwise value calls: the
//! Kramers operator is applied with centered fourth-order stencils, the
//! reduced ODEs are differenced numerically, and an independent second-order
//! finite-difference / Runge-Kutta time stepper is fed the candidate's
//! initial and boundary data and compared at the final time. None of these
//! paths reuse the analytic derivative formulas of the construction, so a
//! construction bug cannot certify itself.
//!
//! Grid scans fan out across rows with rayon; per-row results are reduced in
//! index order, so reports are byte-identical across thread counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::KramersParams;
use crate::reduced::{Phi2Ode, SeparatedSolution, SolutionSlice};
use crate::timebasis::RFunction;
use crate::{Error, Result};

/// Default stencil step for residual scans.
pub const STENCIL_H_DEFAULT: f64 = 1e-2;

/// Space-time grid specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// `[lo, hi]` in x.
    pub x: [f64; 2],
    /// `[lo, hi]` in y.
    pub y: [f64; 2],
    /// `[t0, t1]`.
    pub t: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(x: [f64; 2], y: [f64; 2], t: [f64; 2], nx: usize, ny: usize, nt: usize) -> Result<Self> {
        let spec = Self { x, y, t, nx, ny, nt };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 || self.ny < 8 {
            return Err(Error::Validation(format!(
                "grid must have nx, ny >= 8, got {}x{}",
                self.nx, self.ny
            )));
        }
        if self.nt < 1 {
            return Err(Error::Validation("grid must have nt >= 1".into()));
        }
        for ([lo, hi], name) in [(self.x, "x"), (self.y, "y")] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Validation(format!(
                    "{name} range must be a non-degenerate interval, got [{lo}, {hi}]"
                )));
            }
        }
        if !(self.t[0].is_finite() && self.t[1].is_finite() && self.t[1] > self.t[0]) {
            return Err(Error::Validation(format!(
                "time range must satisfy t1 > t0, got [{}, {}]",
                self.t[0], self.t[1]
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x[1] - self.x[0]) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y[1] - self.y[0]) / (self.ny - 1) as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x[0] + self.dx() * i as f64
    }

    pub fn y_at(&self, j: usize) -> f64 {
        self.y[0] + self.dy() * j as f64
    }

    /// Scan times: `nt` points from `t0` to `t1` inclusive (just `t0` when
    /// `nt = 1`).
    pub fn times(&self) -> Vec<f64> {
        if self.nt == 1 {
            return vec![self.t[0]];
        }
        (0..self.nt)
            .map(|s| self.t[0] + (self.t[1] - self.t[0]) * s as f64 / (self.nt - 1) as f64)
            .collect()
    }
}

/// Field values on the spatial grid at a single time, row-major in y.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridField {
    pub spec: GridSpec,
    pub time: f64,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// CSV rows `t,x,y,value` with 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(out, "t,x,y,value")?;
        }
        for i in 0..self.spec.nx {
            for j in 0..self.spec.ny {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.time,
                    self.spec.x_at(i),
                    self.spec.y_at(j),
                    self.at(i, j)
                )?;
            }
        }
        Ok(())
    }
}

/// PDE-residual statistics over a scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// `max |L[u]| / max |u|` over the scan; the headline metric, since `u`
    /// spans many orders of magnitude under Gaussian weights.
    pub rel_max: f64,
    /// Root mean square of the residual.
    pub l2: f64,
    pub n_points: usize,
    pub stencil_h: f64,
}

/// Applies the Kramers operator
/// `L[u] = u_t - nu u_yy + y u_x - (nu y + k x) u_y - nu u`
/// to a black-box field with centered fourth-order stencils of step `h`.
pub fn kramers_residual<F>(u: F, params: &KramersParams, point: (f64, f64, f64), h: f64) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::Validation(format!("stencil step must be positive, got {h}")));
    }
    let (t, x, y) = point;
    let c = u(t, x, y)?;
    let d1 = |m2: f64, m1: f64, p1: f64, p2: f64| (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = |m2: f64, m1: f64, p1: f64, p2: f64| {
        (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h)
    };
    let ut = d1(
        u(t - 2.0 * h, x, y)?,
        u(t - h, x, y)?,
        u(t + h, x, y)?,
        u(t + 2.0 * h, x, y)?,
    );
    let ux = d1(
        u(t, x - 2.0 * h, y)?,
        u(t, x - h, y)?,
        u(t, x + h, y)?,
        u(t, x + 2.0 * h, y)?,
    );
    let (ym2, ym1, yp1, yp2) = (
        u(t, x, y - 2.0 * h)?,
        u(t, x, y - h)?,
        u(t, x, y + h)?,
        u(t, x, y + 2.0 * h)?,
    );
    let uy = d1(ym2, ym1, yp1, yp2);
    let uyy = d2(ym2, ym1, yp1, yp2);
    Ok(ut - params.nu * uyy + y * ux - (params.nu * y + params.k * x) * uy - params.nu * c)
}

/// Residual at one grid point from precomputed time slices; identical
/// stencil arithmetic to [`kramers_residual`].
fn residual_from_slices(
    slices: &[SolutionSlice<'_>; 5],
    params: &KramersParams,
    x: f64,
    y: f64,
    h: f64,
) -> Result<(f64, f64)> {
    // slices = [t-2h, t-h, t, t+h, t+2h]
    let center = &slices[2];
    let c = center.eval(x, y)?.value;
    let d1 = |m2: f64, m1: f64, p1: f64, p2: f64| (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let ut = d1(
        slices[0].eval(x, y)?.value,
        slices[1].eval(x, y)?.value,
        slices[3].eval(x, y)?.value,
        slices[4].eval(x, y)?.value,
    );
    let ux = d1(
        center.eval(x - 2.0 * h, y)?.value,
        center.eval(x - h, y)?.value,
        center.eval(x + h, y)?.value,
        center.eval(x + 2.0 * h, y)?.value,
    );
    let (ym2, ym1, yp1, yp2) = (
        center.eval(x, y - 2.0 * h)?.value,
        center.eval(x, y - h)?.value,
        center.eval(x, y + h)?.value,
        center.eval(x, y + 2.0 * h)?.value,
    );
    let uy = d1(ym2, ym1, yp1, yp2);
    let uyy = (-yp2 + 16.0 * yp1 - 30.0 * c + 16.0 * ym1 - ym2) / (12.0 * h * h);
    let res = ut - params.nu * uyy + y * ux - (params.nu * y + params.k * x) * uy - params.nu * c;
    Ok((res, c))
}

/// Scans `L[u]` over the grid at `nt` sample times.
pub fn residual_scan(sol: &SeparatedSolution, grid: &GridSpec, h: f64) -> Result<ResidualReport> {
    grid.validate()?;
    if !(h > 0.0) {
        return Err(Error::Validation(format!("stencil step must be positive, got {h}")));
    }
    let interval = sol.coordinate_system().t_interval();
    if !(interval.contains(grid.t[0] - 2.0 * h) && interval.contains(grid.t[1] + 2.0 * h)) {
        return Err(Error::Validation(format!(
            "scan needs margin 2h: [{}, {}] exceeds the working interval [{}, {}]",
            grid.t[0] - 2.0 * h,
            grid.t[1] + 2.0 * h,
            interval.lo,
            interval.hi
        )));
    }
    let params = *sol.params();
    let mut max_abs = 0.0f64;
    let mut max_u = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut n_points = 0usize;

    for t in grid.times() {
        let center = sol.slice(t)?;
        let slices = [
            sol.slice_from(&center, t - 2.0 * h)?,
            sol.slice_from(&center, t - h)?,
            center,
            sol.slice_from(&center, t + h)?,
            sol.slice_from(&center, t + 2.0 * h)?,
        ];
        // Rows evaluated in parallel, reduced in index order.
        let rows: Vec<Result<(f64, f64, f64)>> = (0..grid.ny)
            .into_par_iter()
            .map(|j| {
                let y = grid.y_at(j);
                let mut row_max = 0.0f64;
                let mut row_u = 0.0f64;
                let mut row_sq = 0.0f64;
                for i in 0..grid.nx {
                    let x = grid.x_at(i);
                    let (res, u) = residual_from_slices(&slices, &params, x, y, h)?;
                    row_max = row_max.max(res.abs());
                    row_u = row_u.max(u.abs());
                    row_sq += res * res;
                }
                Ok((row_max, row_u, row_sq))
            })
            .collect();
        for row in rows {
            let (row_max, row_u, row_sq) = row?;
            max_abs = max_abs.max(row_max);
            max_u = max_u.max(row_u);
            sum_sq += row_sq;
            n_points += grid.nx;
        }
    }
    let rel_max = if max_u > 0.0 { max_abs / max_u } else { max_abs };
    Ok(ResidualReport {
        max_abs,
        rel_max,
        l2: (sum_sq / n_points as f64).sqrt(),
        n_points,
        stencil_h: h,
    })
}

/// Residuals of the three reduced ODEs, each normalized by
/// `max(1, |phi|)` over its samples.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OdeResidualReport {
    pub phi0_max: f64,
    pub phi1_max: f64,
    pub phi2_max: f64,
    pub n_samples: usize,
}

/// Finite-difference residuals of `phi0' = A0 phi0`, `phi1' = A1 phi1` and
/// the `phi2` equation at `n_samples` points of the admissible ranges.
pub fn ode_residual_checks(sol: &SeparatedSolution, n_samples: usize) -> Result<OdeResidualReport> {
    if n_samples < 2 {
        return Err(Error::Validation("need at least 2 samples".into()));
    }
    let h = 1e-3;
    let interval = sol.coordinate_system().t_interval();
    let pad = 2.0 * h + 1e-9 * (interval.hi - interval.lo);
    let (t_lo, t_hi) = (interval.lo + pad, interval.hi - pad);

    let d1 = |m2: f64, m1: f64, p1: f64, p2: f64| (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);

    // phi0: stencil over incrementally accumulated exponents, so the
    // quadrature error varies smoothly across the stencil.
    let mut phi0_max = 0.0f64;
    for s in 0..n_samples {
        let t = t_lo + (t_hi - t_lo) * s as f64 / (n_samples - 1) as f64;
        let base = sol.log_phi0(t)?;
        let at = |dt: f64| -> Result<f64> {
            Ok((base + sol.log_phi0_increment(t, t + dt)?).exp())
        };
        let deriv = d1(at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
        let phi0 = base.exp();
        let res = deriv - sol.phi0_rate(t)? * phi0;
        phi0_max = phi0_max.max(res.abs() / phi0.max(1.0));
    }

    // phi1 over w1 in [-2, 2].
    let mut phi1_max = 0.0f64;
    let rate1 = sol.phi1_rate();
    for s in 0..n_samples {
        let w = -2.0 + 4.0 * s as f64 / (n_samples - 1) as f64;
        let f = |o: f64| sol.phi1(o);
        let deriv = d1(f(w - 2.0 * h)?, f(w - h)?, f(w + h)?, f(w + 2.0 * h)?);
        let v = sol.phi1(w)?;
        let res = deriv - rate1 * v;
        phi1_max = phi1_max.max(res.abs() / v.abs().max(1.0));
    }

    // phi2 over w2 in [-3.9, 3.9]; first or second order by scheme. The
    // range keeps the whole stencil on one side of the special-function
    // series/asymptotic seams, whose error-floor jump would otherwise
    // dominate the second difference.
    let mut phi2_max = 0.0f64;
    let ode = sol.phi2_ode();
    for s in 0..n_samples {
        let w = -3.9 + 7.8 * s as f64 / (n_samples - 1) as f64;
        let f = |o: f64| sol.phi2(o);
        let v = f(w)?;
        let res = match ode {
            Phi2Ode::FirstOrder { rate } => {
                d1(f(w - 2.0 * h)?, f(w - h)?, f(w + h)?, f(w + 2.0 * h)?) - rate * v
            }
            Phi2Ode::SecondOrder { c2, c1, c0 } => {
                let d2 = (-f(w + 2.0 * h)? + 16.0 * f(w + h)? - 30.0 * v + 16.0 * f(w - h)?
                    - f(w - 2.0 * h)?)
                    / (12.0 * h * h);
                d2 - (c2 * w * w + c1 * w + c0) * v
            }
        };
        phi2_max = phi2_max.max(res.abs() / v.abs().max(1.0));
    }

    Ok(OdeResidualReport {
        phi0_max,
        phi1_max,
        phi2_max,
        n_samples,
    })
}

/// True iff the 3x2 matrix `dU_i/dlambda_j` has rank 2 at the sample point.
pub fn rank_condition(sol: &SeparatedSolution, sample: (f64, f64, f64)) -> Result<bool> {
    let rows = sol.lambda_jacobian(sample.0, sample.1, sample.2)?;
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::Validation(
            "all reduced-equation rows vanish at the sample point".into(),
        ));
    }
    let minor = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
    let m01 = minor(rows[0], rows[1]);
    let m02 = minor(rows[0], rows[2]);
    let m12 = minor(rows[1], rows[2]);
    let tol = 1e-12 * scale * scale;
    Ok(m01.abs() > tol || m02.abs() > tol || m12.abs() > tol)
}

/// Residuals of the two consistency identities satisfied by `R(t)` at the
/// distinguished k values (both with the quadratic source constant zero).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RIdentityReport {
    /// Max over samples of `R''/R - 2 (R'/R)^2 + nu^2/10 - k/5`.
    pub ode_residual_max: f64,
    /// The k-only scalar `nu^4/100 + k^2/25 - nu^2 k/25 - k^2/9`.
    pub scalar_residual: f64,
    pub n_samples: usize,
}

/// Checks the `R(t)` identities on `n` samples of `[t_lo, t_hi]`.
pub fn r_identity_checks(
    r: &RFunction,
    params: &KramersParams,
    t_lo: f64,
    t_hi: f64,
    n: usize,
) -> Result<RIdentityReport> {
    if !(t_lo < t_hi) || n < 2 {
        return Err(Error::Validation("bad sample range for R identities".into()));
    }
    if r.has_pole_in(t_lo, t_hi) {
        return Err(Error::Domain(format!(
            "R has a pole inside the sample range [{t_lo}, {t_hi}]"
        )));
    }
    let nu = params.nu;
    let k = params.k;
    let mut ode_max = 0.0f64;
    for s in 0..n {
        let t = t_lo + (t_hi - t_lo) * s as f64 / (n - 1) as f64;
        let v = r.value(t)?;
        let d1 = r.deriv(1, t)?;
        let d2 = r.deriv(2, t)?;
        let res = d2 / v - 2.0 * (d1 / v).powi(2) + nu * nu / 10.0 - k / 5.0;
        ode_max = ode_max.max(res.abs());
    }
    let nu2 = nu * nu;
    let scalar = nu2 * nu2 / 100.0 + k * k / 25.0 - nu2 * k / 25.0 - k * k / 9.0;
    Ok(RIdentityReport {
        ode_residual_max: ode_max,
        scalar_residual: scalar,
        n_samples: n,
    })
}

/// Default sample range for the R identities: `[-2, 2]`, shifted off the
/// pole for the csch form.
pub fn r_identity_checks_default(r: &RFunction, params: &KramersParams) -> Result<RIdentityReport> {
    if r.has_pole_in(-2.0, 2.0) {
        r_identity_checks(r, params, 0.05, 2.0, 100)
    } else {
        r_identity_checks(r, params, -2.0, 2.0, 100)
    }
}

/// Outcome of the manufactured-solution cross-validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FdReport {
    pub error_l2: f64,
    pub error_max: f64,
    pub analytic_max: f64,
    pub n_steps: usize,
    pub dt: f64,
}

/// Full result including both final-time fields.
#[derive(Debug, Clone)]
pub struct FdResult {
    pub report: FdReport,
    pub numeric: GridField,
    pub analytic: GridField,
}

/// Samples the analytic solution onto the spatial grid at time `t`.
fn analytic_field(sol: &SeparatedSolution, grid: &GridSpec, t: f64) -> Result<GridField> {
    let slice = sol.slice(t)?;
    let mut values = vec![0.0; grid.nx * grid.ny];
    let rows: Vec<Result<Vec<f64>>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.y_at(j);
            (0..grid.nx)
                .map(|i| Ok(slice.eval(grid.x_at(i), y)?.value))
                .collect()
        })
        .collect();
    for (j, row) in rows.into_iter().enumerate() {
        values[j * grid.nx..(j + 1) * grid.nx].copy_from_slice(&row?);
    }
    Ok(GridField {
        spec: *grid,
        time: t,
        values,
    })
}

/// Samples the analytic solution at every scan time (CSV export path).
pub fn sample_solution(sol: &SeparatedSolution, grid: &GridSpec) -> Result<Vec<GridField>> {
    grid.validate()?;
    grid.times()
        .into_iter()
        .map(|t| analytic_field(sol, grid, t))
        .collect()
}

/// Spatial part of the Kramers operator with second-order centered stencils,
/// interior points only.
fn fd_rhs(
    field: &[f64],
    grid: &GridSpec,
    params: &KramersParams,
    out: &mut [f64],
) {
    let nx = grid.nx;
    let ny = grid.ny;
    let dx = grid.dx();
    let dy = grid.dy();
    let nu = params.nu;
    let k = params.k;
    out.par_chunks_mut(nx)
        .enumerate()
        .for_each(|(j, out_row)| {
            if j == 0 || j == ny - 1 {
                out_row.fill(0.0);
                return;
            }
            let y = grid.y_at(j);
            out_row[0] = 0.0;
            out_row[nx - 1] = 0.0;
            let row = &field[j * nx..(j + 1) * nx];
            let below = &field[(j - 1) * nx..j * nx];
            let above = &field[(j + 1) * nx..(j + 2) * nx];
            for i in 1..nx - 1 {
                let x = grid.x_at(i);
                let uyy = (above[i] - 2.0 * row[i] + below[i]) / (dy * dy);
                let ux = (row[i + 1] - row[i - 1]) / (2.0 * dx);
                let uy = (above[i] - below[i]) / (2.0 * dy);
                out_row[i] = nu * uyy - y * ux + (nu * y + k * x) * uy + nu * row[i];
            }
        });
}

/// Writes analytic boundary values at time `t` into the field edges.
fn fill_boundary(
    sol: &SeparatedSolution,
    grid: &GridSpec,
    t: f64,
    field: &mut [f64],
) -> Result<()> {
    let slice = sol.slice(t)?;
    let nx = grid.nx;
    let ny = grid.ny;
    for i in 0..nx {
        let x = grid.x_at(i);
        field[i] = slice.eval(x, grid.y_at(0))?.value;
        field[(ny - 1) * nx + i] = slice.eval(x, grid.y_at(ny - 1))?.value;
    }
    for j in 1..ny - 1 {
        let y = grid.y_at(j);
        field[j * nx] = slice.eval(grid.x_at(0), y)?.value;
        field[j * nx + nx - 1] = slice.eval(grid.x_at(nx - 1), y)?.value;
    }
    Ok(())
}

/// Method-of-manufactured-solutions cross-check: advances the PDE from the
/// candidate's initial data with RK4 in time and second-order space stencils,
/// Dirichlet boundaries fed by the candidate, and compares at `t1`.
pub fn fd_simulate(sol: &SeparatedSolution, grid: &GridSpec) -> Result<FdResult> {
    grid.validate()?;
    let params = *sol.params();
    let (t0, t1) = (grid.t[0], grid.t[1]);
    let interval = sol.coordinate_system().t_interval();
    if !(interval.contains(t0) && interval.contains(t1)) {
        return Err(Error::Validation(format!(
            "simulation window [{t0}, {t1}] exceeds the working interval [{}, {}]",
            interval.lo, interval.hi
        )));
    }

    // CFL bound: diffusive in y, advective in x and y.
    let max_abs_y = grid.y[0].abs().max(grid.y[1].abs());
    let max_drift = [grid.x[0], grid.x[1]]
        .iter()
        .flat_map(|&x| [grid.y[0], grid.y[1]].map(|y| (params.nu * y + params.k * x).abs()))
        .fold(0.0f64, f64::max);
    let dy = grid.dy();
    let dx = grid.dx();
    let mut dt_bound = dy * dy / (2.0 * params.nu);
    if max_abs_y > 0.0 {
        dt_bound = dt_bound.min(dx / max_abs_y);
    }
    if max_drift > 0.0 {
        dt_bound = dt_bound.min(dy / max_drift);
    }
    let dt_target = 0.4 * dt_bound;
    let n_steps = ((t1 - t0) / dt_target).ceil().max(1.0) as usize;
    let dt = (t1 - t0) / n_steps as f64;

    let initial = analytic_field(sol, grid, t0)?;
    let final_analytic = analytic_field(sol, grid, t1)?;
    let growth_base = initial.max_abs().max(final_analytic.max_abs());

    let n = grid.nx * grid.ny;
    let mut u = initial.values.clone();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    for step in 0..n_steps {
        let t = t0 + dt * step as f64;
        fd_rhs(&u, grid, &params, &mut k1);

        for i in 0..n {
            stage[i] = u[i] + 0.5 * dt * k1[i];
        }
        fill_boundary(sol, grid, t + 0.5 * dt, &mut stage)?;
        fd_rhs(&stage, grid, &params, &mut k2);

        for i in 0..n {
            stage[i] = u[i] + 0.5 * dt * k2[i];
        }
        fill_boundary(sol, grid, t + 0.5 * dt, &mut stage)?;
        fd_rhs(&stage, grid, &params, &mut k3);

        for i in 0..n {
            stage[i] = u[i] + dt * k3[i];
        }
        fill_boundary(sol, grid, t + dt, &mut stage)?;
        fd_rhs(&stage, grid, &params, &mut k4);

        for i in 0..n {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        fill_boundary(sol, grid, t + dt, &mut u)?;

        let max_now = u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let allowed = 10.0 * growth_base * (params.nu * (t + dt - t0)).exp();
        if !max_now.is_finite() || max_now > allowed {
            return Err(Error::Numerical(format!(
                "time stepping unstable at step {step}: field max {max_now:e} \
                 exceeds 10x the analytic scale {allowed:e}"
            )));
        }
    }

    let mut err_max = 0.0f64;
    let mut err_sq = 0.0f64;
    for i in 0..n {
        let e = u[i] - final_analytic.values[i];
        err_max = err_max.max(e.abs());
        err_sq += e * e;
    }
    let report = FdReport {
        error_l2: (err_sq / n as f64).sqrt(),
        error_max: err_max,
        analytic_max: final_analytic.max_abs(),
        n_steps,
        dt,
    };
    Ok(FdResult {
        report,
        numeric: GridField {
            spec: *grid,
            time: t1,
            values: u,
        },
        analytic: final_analytic,
    })
}
