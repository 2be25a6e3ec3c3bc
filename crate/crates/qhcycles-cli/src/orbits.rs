//! Orbit export: integrates the scalar equation from a list of starting
//! radii and writes the samples as CSV, reconstructing plane coordinates
//! through the generalized-polar map
//!   x = r^{p/(m−n)} cos θ,  y = r^{q/(m−n)} sin θ.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use qhcycles::dynamics::{integrate, DomainExitReason, DynamicsError, IntegrationOptions, TrajectoryExit};
use qhcycles::transforms::polar_equation;
use qhcycles::vectorfield::{radial_coefficients, QHSystem};

/// Number of full turns to follow each orbit. Enough for convergence toward
/// a hyperbolic cycle to show in a plot.
const TURNS: f64 = 6.0;

pub struct OrbitSummary {
    pub blocks: usize,
    pub rows: usize,
}

fn exit_status(exit: &TrajectoryExit) -> &'static str {
    match exit {
        TrajectoryExit::Completed => "completed",
        TrajectoryExit::LeftDomain { reason: DomainExitReason::DenominatorMargin, .. } => {
            "left-domain-margin"
        }
        TrajectoryExit::LeftDomain { reason: DomainExitReason::NonPositiveRadius, .. } => {
            "left-domain-radius"
        }
        TrajectoryExit::Blowup { .. } => "blowup",
    }
}

/// Integrates each starting radius and renders the CSV body. One block per
/// radius, blocks separated by a blank line; every row carries `ok` except
/// the last row of a block, which carries the exit status.
pub fn render_orbits(sys: &QHSystem, r0_list: &[f64], steps_per_turn: usize) -> (String, OrbitSummary) {
    let rs = radial_coefficients(sys);
    let ode = polar_equation(&rs);
    let mn = (sys.m() - sys.n()) as f64;
    let ex = sys.weight.p as f64 / mn;
    let ey = sys.weight.q as f64 / mn;

    let mut opts = IntegrationOptions::default();
    opts.max_step = 2.0 * PI / steps_per_turn.max(1) as f64;

    let mut out = String::from("theta,r,x,y,status\n");
    let mut rows = 0usize;
    for (block, &r0) in r0_list.iter().enumerate() {
        if block > 0 {
            out.push('\n');
        }
        match integrate(&ode, r0, TURNS * 2.0 * PI, &opts) {
            Ok(traj) => {
                let last = traj.samples.len() - 1;
                for (i, &(th, r)) in traj.samples.iter().enumerate() {
                    let status = if i == last { exit_status(&traj.exit) } else { "ok" };
                    push_row(&mut out, th, r, ex, ey, status);
                    rows += 1;
                }
            }
            Err(DynamicsError::DomainViolationAtStart { .. }) => {
                push_row(&mut out, 0.0, r0, ex, ey, "left-domain-at-start");
                rows += 1;
            }
            Err(DynamicsError::MaxStepsExceeded { .. }) => {
                push_row(&mut out, 0.0, r0, ex, ey, "failed-max-steps");
                rows += 1;
            }
            Err(_) => {
                push_row(&mut out, 0.0, r0, ex, ey, "failed");
                rows += 1;
            }
        }
    }
    (out, OrbitSummary { blocks: r0_list.len(), rows })
}

fn push_row(out: &mut String, th: f64, r: f64, ex: f64, ey: f64, status: &str) {
    let x = r.powf(ex) * th.cos();
    let y = r.powf(ey) * th.sin();
    writeln!(out, "{th:.12e},{r:.12e},{x:.12e},{y:.12e},{status}").expect("write to String");
}

/// Writes `content` to `path` atomically: a sibling temp file is written
/// first and renamed into place, so a reader never sees a partial file.
pub fn write_atomic(path: &Path, content: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content)
        .with_context(|| format!("writing temporary file {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", path.display()))?;
    Ok(())
}
