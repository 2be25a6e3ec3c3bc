//! Numerical dynamics of the scalar periodic equation dr/dθ = R(θ, r):
//! trajectory integration, the period-2π return map and its derivative,
//! location and classification of fixed points (limit cycles of the planar
//! system), and a certified quadrature for sign decisions on integrals.
//!
//! The integrator is an embedded Dormand–Prince 5(4) pair with PI-free
//! step control and first-same-as-last reuse. The variational state
//! u(θ) = ln(∂r(θ)/∂r₀) is co-integrated, so a single pass yields both the
//! return map H(r₀) and its derivative exp(u(2π)) without finite
//! differences. Trajectories that approach the excluded curve
//! b_n + b_m r = 0 are stopped at a relative margin and reported as domain
//! exits, never silently integrated across.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::transforms::PolarOde;
use crate::Stability;

/// Relative band around multiplier 1 inside which a fixed point is
/// reported as near-degenerate rather than classified.
pub const DEGENERACY_BAND: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainExitReason {
    /// |b_n + b_m r| fell below the relative margin.
    DenominatorMargin,
    /// r reached zero or below.
    NonPositiveRadius,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrajectoryExit {
    /// The trajectory reached the requested final angle.
    Completed,
    /// The trajectory hit the domain boundary at the given angle.
    LeftDomain { theta: f64, reason: DomainExitReason },
    /// r exceeded the blowup threshold at the given angle.
    Blowup { theta: f64 },
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("initial point r = {r0:.6e} violates the domain margin at θ = 0")]
    DomainViolationAtStart { r0: f64 },
    #[error("trajectory stopped before the requested angle: {exit:?}")]
    NotCompleted { exit: TrajectoryExit },
    #[error("step budget exhausted after {steps} accepted steps")]
    MaxStepsExceeded { steps: usize },
    #[error("denominator changes sign along the cycle; orientation is undefined")]
    MixedOrientation,
    #[error("fixed point at r = {r0:.6e} has multiplier {multiplier} inside the degeneracy band")]
    DegenerateCycle { r0: f64, multiplier: f64 },
    #[error("quadrature error bound {achieved:.3e} exceeds the requested tolerance")]
    ToleranceNotMet { achieved: f64 },
}

/// Tunables for the embedded-pair integrator.
#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Accepted-step budget per trajectory.
    pub max_steps: usize,
    /// Upper bound on the step in θ (bounds sample spacing).
    pub max_step: f64,
    /// Relative margin kept from the excluded curve b_n + b_m r = 0.
    pub domain_margin: f64,
    /// r threshold above which the trajectory is declared blown up.
    pub blowup: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 200_000,
            max_step: 2.0 * PI,
            domain_margin: 1e-9,
            blowup: 1e12,
        }
    }
}

/// Integrated trajectory with the co-integrated variational state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// (θ, r) at every accepted step, starting with (0, r₀).
    pub samples: Vec<(f64, f64)>,
    pub exit: TrajectoryExit,
    /// ln(∂r(θ_final)/∂r₀); the return-map derivative is its exponential.
    pub log_mult: f64,
}

impl Trajectory {
    pub fn final_r(&self) -> f64 {
        self.samples.last().expect("trajectory has at least the start").1
    }
}

// Dormand–Prince 5(4) coefficients. The seventh stage sits at the step end
// with the fifth-order weights, so it doubles as the first stage of the
// next step.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates dr/dθ = R(θ, r) from (0, r₀) to θ = `theta_end`, co-integrating
/// the log-variational state u′ = ∂R/∂r along the solution.
pub fn integrate(
    ode: &PolarOde,
    r0: f64,
    theta_end: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory, DynamicsError> {
    assert!(theta_end > 0.0, "integration runs forward in θ");
    let inside = |th: f64, r: f64| {
        r > 0.0
            && ode.denominator(th, r).abs()
                > opts.domain_margin * ode.denominator_scale(th, r)
    };
    if !r0.is_finite() || !inside(0.0, r0) {
        return Err(DynamicsError::DomainViolationAtStart { r0 });
    }
    let rhs = |th: f64, r: f64| -> (f64, f64) { (ode.rhs(th, r), ode.rhs_r(th, r)) };

    let mut th = 0.0f64;
    let mut r = r0;
    let mut u = 0.0f64;
    let mut samples = vec![(th, r)];
    let mut k: [(f64, f64); 7] = [(0.0, 0.0); 7];
    k[0] = rhs(th, r);
    let h_floor = 1e-13 * theta_end.max(1.0);
    let mut h = (theta_end / 256.0).min(opts.max_step);
    let mut steps = 0usize;

    while th < theta_end {
        if steps >= opts.max_steps {
            return Err(DynamicsError::MaxStepsExceeded { steps });
        }
        h = h.min(opts.max_step).min(theta_end - th);
        if h < h_floor {
            let r_probe = r + h_floor * k[0].0;
            let reason = if r_probe <= 0.0 {
                DomainExitReason::NonPositiveRadius
            } else {
                DomainExitReason::DenominatorMargin
            };
            return Ok(Trajectory {
                samples,
                exit: TrajectoryExit::LeftDomain { theta: th, reason },
                log_mult: u,
            });
        }

        // stages 2..=7; stage 7 evaluates at the candidate endpoint
        let mut stage_ok = true;
        for (i, row) in [
            &A2[..], &A3[..], &A4[..], &A5[..], &A6[..], &B5[..],
        ]
        .iter()
        .enumerate()
        {
            let mut acc = 0.0;
            for (j, a) in row.iter().enumerate() {
                acc += a * k[j].0;
            }
            let r_stage = r + h * acc;
            let ki = rhs(th + C[i + 1] * h, r_stage);
            if !ki.0.is_finite() || !ki.1.is_finite() {
                stage_ok = false;
                break;
            }
            k[i + 1] = ki;
        }
        if !stage_ok {
            h *= 0.5;
            continue;
        }

        let mut dr = 0.0;
        let mut du = 0.0;
        for i in 0..6 {
            dr += B5[i] * k[i].0;
            du += B5[i] * k[i].1;
        }
        let r_new = r + h * dr;
        let u_new = u + h * du;
        let (mut er, mut eu) = (0.0, 0.0);
        for i in 0..7 {
            er += E[i] * k[i].0;
            eu += E[i] * k[i].1;
        }
        let sc_r = opts.atol + opts.rtol * r.abs().max(r_new.abs());
        let sc_u = opts.atol + opts.rtol * u.abs().max(u_new.abs());
        let err = ((h * er / sc_r).abs()).max((h * eu / sc_u).abs());

        if !err.is_finite() {
            h *= 0.5;
            continue;
        }
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            continue;
        }
        if r_new > opts.blowup {
            return Ok(Trajectory {
                samples,
                exit: TrajectoryExit::Blowup { theta: th + h },
                log_mult: u,
            });
        }
        if !inside(th + h, r_new) {
            // localize the domain wall by shrinking toward it
            h *= 0.5;
            continue;
        }

        th += h;
        r = r_new;
        u = u_new;
        k[0] = k[6];
        samples.push((th, r));
        steps += 1;
        if theta_end - th < h_floor {
            th = theta_end;
        }
        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= grow;
    }

    Ok(Trajectory {
        samples,
        exit: TrajectoryExit::Completed,
        log_mult: u,
    })
}

/// H(r₀): the value of the solution through (0, r₀) after one full turn.
pub fn return_map(
    ode: &PolarOde,
    r0: f64,
    opts: &IntegrationOptions,
) -> Result<f64, DynamicsError> {
    let traj = integrate(ode, r0, 2.0 * PI, opts)?;
    match traj.exit {
        TrajectoryExit::Completed => Ok(traj.final_r()),
        exit => Err(DynamicsError::NotCompleted { exit }),
    }
}

/// (H(r₀), H′(r₀)) from one integration pass.
pub fn return_map_with_derivative(
    ode: &PolarOde,
    r0: f64,
    opts: &IntegrationOptions,
) -> Result<(f64, f64), DynamicsError> {
    let traj = integrate(ode, r0, 2.0 * PI, opts)?;
    match traj.exit {
        TrajectoryExit::Completed => Ok((traj.final_r(), traj.log_mult.exp())),
        exit => Err(DynamicsError::NotCompleted { exit }),
    }
}

/// Stability of a fixed point of the return map, decided by its multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapStability {
    Stable,
    Unstable,
    /// Multiplier within [`DEGENERACY_BAND`] of 1; hyperbolicity cannot be
    /// asserted at working precision.
    NearDegenerate,
}

pub fn classify_multiplier(multiplier: f64) -> MapStability {
    if (multiplier - 1.0).abs() <= DEGENERACY_BAND {
        MapStability::NearDegenerate
    } else if multiplier < 1.0 {
        MapStability::Stable
    } else {
        MapStability::Unstable
    }
}

/// A located fixed point of the return map.
#[derive(Clone, Copy, Debug)]
pub struct Cycle {
    /// Radius of the cycle on the section θ = 0.
    pub r0: f64,
    /// Return-map derivative H′(r₀).
    pub multiplier: f64,
    pub stability: MapStability,
    /// |H(r₀) − r₀| at the reported radius.
    pub residual: f64,
}

/// Outcome of a cycle scan over a radial grid.
#[derive(Clone, Debug)]
pub struct CycleReport {
    pub cycles: Vec<Cycle>,
    pub grid_points: usize,
    /// Grid trajectories that completed a full turn.
    pub completed: usize,
    /// Grid trajectories stopped at the domain boundary (including starts
    /// already inside the margin).
    pub domain_exits: usize,
    pub blowups: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct FindCycleOptions {
    pub r_lo: f64,
    pub r_hi: f64,
    /// Number of geometrically spaced grid points.
    pub grid: usize,
    /// Displacement tolerance: accept r* once |H(r*) − r*| ≤ tol·max(1, r*).
    pub tol: f64,
    /// Relative radius gap under which two roots are considered the same.
    pub dedupe: f64,
    pub integration: IntegrationOptions,
}

impl Default for FindCycleOptions {
    fn default() -> Self {
        // cycles of interest sit at r = O(1); the wide log-spaced grid
        // covers scale uncertainty in both directions cheaply
        FindCycleOptions {
            r_lo: 1e-3,
            r_hi: 1e3,
            grid: 256,
            tol: 1e-9,
            dedupe: 1e-7,
            integration: IntegrationOptions::default(),
        }
    }
}

enum GridEval {
    Displacement(f64),
    DomainExit,
    Blowup,
    Failed,
}

fn grid_eval(ode: &PolarOde, r0: f64, opts: &IntegrationOptions) -> GridEval {
    match return_map(ode, r0, opts) {
        Ok(h) => GridEval::Displacement(h - r0),
        Err(DynamicsError::NotCompleted {
            exit: TrajectoryExit::Blowup { .. },
        }) => GridEval::Blowup,
        Err(DynamicsError::NotCompleted { .. })
        | Err(DynamicsError::DomainViolationAtStart { .. }) => GridEval::DomainExit,
        Err(_) => GridEval::Failed,
    }
}

fn bisect_bracket(
    ode: &PolarOde,
    opts: &FindCycleOptions,
    mut a: f64,
    mut ga: f64,
    mut b: f64,
) -> Option<(f64, f64)> {
    let mut best = (a, ga.abs());
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let g = match return_map(ode, mid, &opts.integration) {
            Ok(h) => h - mid,
            Err(_) => return None,
        };
        if g.abs() < best.1 {
            best = (mid, g.abs());
        }
        if g.abs() <= opts.tol * mid.abs().max(1.0) {
            return Some((mid, g.abs()));
        }
        if g.signum() == ga.signum() {
            a = mid;
            ga = g;
        } else {
            b = mid;
        }
        if b - a <= f64::EPSILON * 4.0 * mid.abs().max(1.0) {
            break;
        }
    }
    // bracket exhausted; report the best point seen with its residual
    Some(best)
}

/// Scans a geometric grid of starting radii for fixed points of the return
/// map, refines each sign change by bisection, and classifies the
/// multipliers. Grid trajectories run in parallel; the report is
/// deterministic for fixed options.
pub fn find_cycles(ode: &PolarOde, opts: &FindCycleOptions) -> CycleReport {
    assert!(opts.grid >= 2 && opts.r_lo > 0.0 && opts.r_hi > opts.r_lo);
    let n = opts.grid;
    let ratio = opts.r_hi / opts.r_lo;
    let grid: Vec<f64> = (0..n)
        .map(|i| opts.r_lo * ratio.powf(i as f64 / (n - 1) as f64))
        .collect();
    let evals: Vec<GridEval> = grid
        .par_iter()
        .map(|&r0| grid_eval(ode, r0, &opts.integration))
        .collect();

    let mut completed = 0usize;
    let mut domain_exits = 0usize;
    let mut blowups = 0usize;
    for e in &evals {
        match e {
            GridEval::Displacement(_) => completed += 1,
            GridEval::DomainExit => domain_exits += 1,
            GridEval::Blowup => blowups += 1,
            GridEval::Failed => {}
        }
    }

    let mut roots: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        if let GridEval::Displacement(g) = evals[i] {
            if g == 0.0 {
                roots.push((grid[i], 0.0));
            }
        }
        if i + 1 < n {
            if let (GridEval::Displacement(ga), GridEval::Displacement(gb)) =
                (&evals[i], &evals[i + 1])
            {
                if ga.signum() * gb.signum() < 0.0 {
                    if let Some(root) =
                        bisect_bracket(ode, opts, grid[i], *ga, grid[i + 1])
                    {
                        roots.push(root);
                    }
                }
            }
        }
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    roots.dedup_by(|next, kept| (next.0 - kept.0).abs() <= opts.dedupe * kept.0.max(1.0));

    let cycles = roots
        .into_iter()
        .filter_map(|(r0, residual)| {
            let (_, multiplier) =
                return_map_with_derivative(ode, r0, &opts.integration).ok()?;
            Some(Cycle {
                r0,
                multiplier,
                stability: classify_multiplier(multiplier),
                residual,
            })
        })
        .collect();

    CycleReport {
        cycles,
        grid_points: n,
        completed,
        domain_exits,
        blowups,
    }
}

/// Stability of the cycle as a planar orbit. On the component of the
/// domain where b_n + b_m r > 0 the angle increases along orbits and map
/// stability is plane stability; where the denominator is negative the
/// turn runs backward in time, so the classification flips.
pub fn plane_stability(
    ode: &PolarOde,
    cycle: &Cycle,
    opts: &IntegrationOptions,
) -> Result<Stability, DynamicsError> {
    if cycle.stability == MapStability::NearDegenerate {
        return Err(DynamicsError::DegenerateCycle {
            r0: cycle.r0,
            multiplier: cycle.multiplier,
        });
    }
    let traj = integrate(ode, cycle.r0, 2.0 * PI, opts)?;
    if traj.exit != TrajectoryExit::Completed {
        return Err(DynamicsError::NotCompleted { exit: traj.exit });
    }
    let mut sign = 0i8;
    for &(th, r) in &traj.samples {
        let s = if ode.denominator(th, r) > 0.0 { 1i8 } else { -1i8 };
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return Err(DynamicsError::MixedOrientation);
        }
    }
    let map_stable = cycle.stability == MapStability::Stable;
    let plane_stable = if sign >= 0 { map_stable } else { !map_stable };
    Ok(if plane_stable {
        Stability::Stable
    } else {
        Stability::Unstable
    })
}

/// Definite integral with a certified error bound.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error_bound: f64,
}

const QUAD_MAX_DEPTH: u32 = 60;
// Levels of forced subdivision before a small Richardson estimate may stop
// the recursion: a periodic integrand can vanish on every sample of the
// first few dyadic grids, and convergence claimed without having seen the
// function's mass would be spurious.
const QUAD_MIN_DEPTH: u32 = 8;
const QUAD_NODE_BUDGET: usize = 500_000;

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
    abs_sum: &mut f64,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let d = (left + right - whole) / 15.0;
    let deep_enough = depth <= QUAD_MAX_DEPTH - QUAD_MIN_DEPTH;
    if depth == 0 || *budget == 0 || (deep_enough && d.abs() <= tol) {
        *abs_sum += left.abs() + right.abs();
        return (left + right + d, d.abs());
    }
    *budget -= 1;
    let (lv, le) = adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1, budget, abs_sum);
    let (rv, re) = adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1, budget, abs_sum);
    (lv + rv, le + re)
}

/// Adaptive Simpson quadrature of `f` over [a, b]. The returned bound is
/// the accumulated Richardson estimate plus a roundoff floor proportional
/// to the mass of |f|: a cancelling integral can never be certified to a
/// value below what summation noise supports. Succeeds only when the bound
/// stays within `tol`; the bound is returned so callers can decide sign
/// questions honestly.
pub fn certified_quadrature<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Quadrature, DynamicsError> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    let mut budget = QUAD_NODE_BUDGET;
    let mut abs_sum = 0.0f64;
    let (value, truncation) = adapt(
        &f,
        a,
        fa,
        b,
        fb,
        fm,
        whole,
        tol,
        QUAD_MAX_DEPTH,
        &mut budget,
        &mut abs_sum,
    );
    let roundoff = f64::EPSILON * QUAD_MAX_DEPTH as f64 * abs_sum;
    let error_bound = truncation + roundoff;
    // tol governs the adaptive refinement, so only the truncation estimate
    // is held to it; the roundoff floor is information the integrand's
    // magnitude makes unavoidable, and it stays in the returned bound.
    if !(truncation <= tol) {
        return Err(DynamicsError::ToleranceNotMet {
            achieved: error_bound,
        });
    }
    Ok(Quadrature { value, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery;
    use crate::transforms::polar_equation;
    use crate::vectorfield::radial_coefficients;

    fn ode_of(sys: &crate::vectorfield::QHSystem) -> PolarOde {
        polar_equation(&radial_coefficients(sys))
    }

    #[test]
    fn return_map_matches_separable_closed_form() {
        // dr/dθ = 2r(1−r)/(1+r) integrates to r/(1−r)² = C e^{2θ}
        let ode = ode_of(&battery::rotation_family(1, 0));
        let opts = IntegrationOptions::default();
        let h = return_map(&ode, 0.5, &opts).unwrap();
        let k = 2.0 * (4.0 * PI).exp();
        let want = ((2.0 * k + 1.0) - (4.0 * k + 1.0).sqrt()) / (2.0 * k);
        assert!(
            (h - want).abs() < 1e-10,
            "H(0.5) = {h}, closed form = {want}"
        );
    }

    #[test]
    fn variational_derivative_matches_finite_difference() {
        let ode = ode_of(&battery::linear_cubic());
        let opts = IntegrationOptions::default();
        let r0 = 0.3;
        let (_, deriv) = return_map_with_derivative(&ode, r0, &opts).unwrap();
        let h = 1e-6;
        let fd = (return_map(&ode, r0 + h, &opts).unwrap()
            - return_map(&ode, r0 - h, &opts).unwrap())
            / (2.0 * h);
        assert!(
            (deriv - fd).abs() < 1e-5 * (1.0 + fd.abs()),
            "variational {deriv} vs finite difference {fd}"
        );
    }

    #[test]
    fn rotation_family_cycle_and_multiplier() {
        let ode = ode_of(&battery::rotation_family(1, 0));
        let report = find_cycles(&ode, &FindCycleOptions::default());
        assert_eq!(report.cycles.len(), 1, "report: {report:?}");
        let c = &report.cycles[0];
        assert!((c.r0 - 1.0).abs() < 1e-9);
        assert!((c.multiplier - (-2.0 * PI).exp()).abs() < 1e-10);
        assert_eq!(c.stability, MapStability::Stable);
        // denominator 1 + r > 0: map stability is plane stability
        let s = plane_stability(&ode, c, &FindCycleOptions::default().integration).unwrap();
        assert_eq!(s, Stability::Stable);
    }

    #[test]
    fn skewed_family_multiplier_hits_closed_form() {
        let ode = ode_of(&battery::skewed_family(1, 0));
        let report = find_cycles(&ode, &FindCycleOptions::default());
        assert_eq!(report.cycles.len(), 1);
        let c = &report.cycles[0];
        let want = (-2.0 * std::f64::consts::SQRT_2 * PI).exp();
        assert!((c.r0 - 1.0).abs() < 1e-9);
        assert!(
            (c.multiplier - want).abs() < 1e-10 * want.max(1.0),
            "multiplier {} vs {want}",
            c.multiplier
        );
    }

    #[test]
    fn linear_cubic_has_one_stable_cycle() {
        let ode = ode_of(&battery::linear_cubic());
        let mut opts = FindCycleOptions::default();
        opts.tol = 1e-11;
        let report = find_cycles(&ode, &opts);
        assert_eq!(report.cycles.len(), 1, "report: {report:?}");
        let c = &report.cycles[0];
        assert!(
            (c.r0 - 0.40556106974086226).abs() < 1e-6,
            "cycle radius {}",
            c.r0
        );
        assert!(c.residual < 1e-11 * 1.0f64.max(c.r0));
        assert!(c.multiplier > 0.0 && c.multiplier < 0.1);
        assert_eq!(c.stability, MapStability::Stable);
        assert_eq!(
            plane_stability(&ode, c, &opts.integration).unwrap(),
            Stability::Stable
        );
    }

    #[test]
    fn sign_changing_denominator_reports_domain_exits() {
        let ode = ode_of(&battery::quintic_sextic());
        let opts = FindCycleOptions {
            r_lo: 0.05,
            r_hi: 5.0,
            grid: 16,
            ..FindCycleOptions::default()
        };
        let report = find_cycles(&ode, &opts);
        assert!(report.cycles.is_empty());
        assert_eq!(report.completed, 0);
        assert_eq!(report.domain_exits, report.grid_points);
    }

    #[test]
    fn rigid_center_reports_degenerate_continuum() {
        let ode = ode_of(&battery::rigid_center());
        let opts = FindCycleOptions {
            grid: 8,
            r_lo: 0.5,
            r_hi: 2.0,
            ..FindCycleOptions::default()
        };
        let report = find_cycles(&ode, &opts);
        // every radius is a fixed point of the identity return map
        assert_eq!(report.cycles.len(), 8);
        for c in &report.cycles {
            assert_eq!(c.stability, MapStability::NearDegenerate);
            assert!((c.multiplier - 1.0).abs() < 1e-12);
            match plane_stability(&ode, c, &opts.integration) {
                Err(DynamicsError::DegenerateCycle { .. }) => {}
                other => panic!("expected DegenerateCycle, got {other:?}"),
            }
        }
    }

    #[test]
    fn start_inside_margin_is_rejected() {
        let ode = ode_of(&battery::quintic_sextic());
        match integrate(&ode, 1e-12, 2.0 * PI, &IntegrationOptions::default()) {
            Err(DynamicsError::DomainViolationAtStart { .. }) => {}
            other => panic!("expected DomainViolationAtStart, got {other:?}"),
        }
    }

    #[test]
    fn step_budget_is_enforced() {
        let ode = ode_of(&battery::linear_cubic());
        let opts = IntegrationOptions {
            max_steps: 5,
            ..IntegrationOptions::default()
        };
        match integrate(&ode, 0.3, 2.0 * PI, &opts) {
            Err(DynamicsError::MaxStepsExceeded { .. }) => {}
            other => panic!("expected MaxStepsExceeded, got {other:?}"),
        }
    }

    #[test]
    fn domain_exit_is_localized() {
        let ode = ode_of(&battery::quintic_sextic());
        let traj = integrate(&ode, 0.2, 2.0 * PI, &IntegrationOptions::default()).unwrap();
        match traj.exit {
            TrajectoryExit::LeftDomain { theta, reason } => {
                assert_eq!(reason, DomainExitReason::DenominatorMargin);
                // the wall for this start lies in the second quadrant
                assert!(theta > 1.5 && theta < 2.5, "exit angle {theta}");
                let (th_last, r_last) = *traj.samples.last().unwrap();
                let rel = ode.denominator(th_last, r_last).abs()
                    / ode.denominator_scale(th_last, r_last);
                assert!(rel < 1e-6, "stopped far from the wall: {rel}");
            }
            other => panic!("expected LeftDomain, got {other:?}"),
        }
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let q = certified_quadrature(|x: f64| 1.0 / (2.0 + x.cos()), 0.0, 2.0 * PI, 1e-12)
            .unwrap();
        assert!((q.value - 2.0 * PI / 3.0f64.sqrt()).abs() < 1e-11);
        // truncation within tol plus the roundoff floor for this mass
        assert!(q.error_bound <= 1e-12 + 1e-13);
        let q = certified_quadrature(|x: f64| x.sin(), 0.0, 2.0 * PI, 1e-12).unwrap();
        assert!(q.value.abs() < 1e-12);
    }

    #[test]
    fn quadrature_refuses_unresolvable_integrand() {
        match certified_quadrature(|x: f64| (1.0 / (x * x + 1e-9)).sin(), -1.0, 1.0, 1e-13) {
            Err(DynamicsError::ToleranceNotMet { achieved }) => {
                assert!(achieved > 1e-13);
            }
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }
}
