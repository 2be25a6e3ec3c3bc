//! Shared analysis pipeline: criteria, Abel reduction, identity checks and
//! the cycle scan, assembled into an [`AnalysisReport`]. The same identity
//! suite backs both `analyze` and `selftest`.

use std::f64::consts::PI;
use std::sync::Arc;

use qhcycles::criteria::{
    classical_criteria, corollary1, existence_prop13, theorem1, CriteriaError,
};
use qhcycles::dynamics::{find_cycles, FindCycleOptions};
use qhcycles::transforms::{
    check_identity_12, check_identity_19, check_identity_prop26, cherkas, default_eps,
    divergence_transfer_check, eps_expansion_sign_check, polar_equation, sample_box,
    sample_cylinder, script_f, AuxFunction, Diffeo, PeriodicCurve, PlanarField, SAMPLE_MARGIN,
};
use qhcycles::vectorfield::{radial_coefficients, QHSystem, RadialSystem};

use crate::input::SystemSpec;
use crate::report::{
    radial_repr, verdict_str, AbelRepr, AnalysisReport, CycleScanRepr, DecompositionRepr,
    IdentityRow, VerdictRepr,
};

/// Sample count for the residual checks. Residuals are maxima, so more
/// samples only tighten the check.
const IDENTITY_SAMPLES: usize = 200;

/// Constant curve levels for the curve-pair transport check. Arbitrary
/// nonzero, disjoint levels; the identity holds for any admissible pair.
const CURVE_LEVELS: (f64, f64) = (1.0, 0.25);

fn residual_row(name: &str, outcome: Result<f64, String>) -> IdentityRow {
    match outcome {
        Ok(res) => IdentityRow {
            name: name.to_string(),
            max_residual: Some(res),
            verdict: None,
            skipped: None,
        },
        Err(reason) => IdentityRow {
            name: name.to_string(),
            max_residual: None,
            verdict: None,
            skipped: Some(reason),
        },
    }
}

/// Runs every pointwise identity check the system admits. Checks whose
/// hypotheses fail (a coefficient with a zero, a failed reduction) come back
/// as skipped rows with the reason, never as silent omissions.
pub fn run_identity_suite(rs: &RadialSystem, seed: u64) -> Vec<IdentityRow> {
    let mut rows = Vec::new();
    let cyl = sample_cylinder(rs, IDENTITY_SAMPLES, seed, 0.3, 3.0);
    let abel = cherkas(rs);

    rows.push(residual_row(
        "abel-transport",
        match &abel {
            Ok(ab) => Ok(qhcycles::transforms::cherkas_transport_residual(ab, rs, &cyl)),
            Err(e) => Err(e.to_string()),
        },
    ));

    rows.push(residual_row(
        "curve-pair-transport",
        match &abel {
            Ok(ab) => {
                let l1 = PeriodicCurve::constant(CURVE_LEVELS.0);
                let l2 = PeriodicCurve::constant(CURVE_LEVELS.1);
                let samples = sample_box(
                    IDENTITY_SAMPLES,
                    seed.wrapping_add(1),
                    (0.0, 1.0),
                    (-1.5, 1.5),
                    &[0.0, CURVE_LEVELS.0, CURVE_LEVELS.1],
                    SAMPLE_MARGIN,
                );
                check_identity_12(ab, &l1, &l2, &samples).map_err(|e| e.to_string())
            }
            Err(e) => Err(e.to_string()),
        },
    ));

    rows.push(residual_row(
        "cylinder-transport",
        check_identity_19(rs, &cyl).map_err(|e| e.to_string()),
    ));

    rows.push(residual_row(
        "divergence-density",
        check_identity_prop26(rs, &cyl).map_err(|e| e.to_string()),
    ));

    rows.push(residual_row(
        "divergence-transfer-polar",
        polar_transfer_residual(rs, &cyl),
    ));

    rows.push(match &abel {
        Ok(ab) => {
            let report = eps_expansion_sign_check(ab, &default_eps());
            IdentityRow {
                name: "eps-expansion-sign".to_string(),
                max_residual: None,
                verdict: Some(verdict_str(report.verdict).to_string()),
                skipped: None,
            }
        }
        Err(e) => IdentityRow {
            name: "eps-expansion-sign".to_string(),
            max_residual: None,
            verdict: None,
            skipped: Some(e.to_string()),
        },
    });

    rows
}

/// Divergence transfer under the polar map (θ, r) → (r cos θ, r sin θ),
/// with the scalar cylinder field as Q and its auxiliary function pulled to
/// the plane. Samples near the atan2 branch cut are filtered out.
pub fn polar_transfer_residual(
    rs: &RadialSystem,
    cylinder_samples: &[(f64, f64)],
) -> Result<f64, String> {
    let aux_cyl = script_f(rs).map_err(|e| e.to_string())?;
    let ode = polar_equation(rs);
    let diffeo = Diffeo {
        fwd: Arc::new(|th: f64, r: f64| (r * th.cos(), r * th.sin())),
        inv: Arc::new(|x: f64, y: f64| {
            let r = (x * x + y * y).sqrt();
            (y.atan2(x), r)
        }),
        jac: Arc::new(|th: f64, r: f64| [[-r * th.sin(), th.cos()], [r * th.cos(), th.sin()]]),
    };
    let aux_plane = AuxFunction {
        f: {
            let f = aux_cyl.f.clone();
            Arc::new(move |x: f64, y: f64| {
                let r = (x * x + y * y).sqrt();
                f(y.atan2(x), r)
            })
        },
        f_t: Arc::new(|_, _| 0.0),
        f_x: Arc::new(|_, _| 0.0),
        domain: "plane off the excluded rays",
    };
    let q_field = PlanarField {
        f: Arc::new(move |th: f64, r: f64| (1.0, ode.rhs(th, r))),
    };
    let samples: Vec<(f64, f64)> = cylinder_samples
        .iter()
        .copied()
        .filter(|&(th, _)| th > 0.2 && th < PI - 0.2)
        .collect();
    if samples.len() < 20 {
        return Err("too few samples clear of the branch cut".to_string());
    }
    divergence_transfer_check(&diffeo, &aux_plane, &q_field, &samples).map_err(|e| e.to_string())
}

pub struct AnalyzeOptions {
    pub find: FindCycleOptions,
    pub quad_tol: f64,
    pub seed: u64,
}

/// Runs the full pipeline on a validated system and assembles the report.
pub fn analyze(spec: SystemSpec, sys: &QHSystem, opts: &AnalyzeOptions) -> AnalysisReport {
    let rs = radial_coefficients(sys);
    let mut notes: Vec<String> = Vec::new();

    let mut criteria = vec![theorem1(&rs)];
    criteria.extend(classical_criteria(&rs));
    criteria.push(corollary1(sys));
    match existence_prop13(&rs, opts.quad_tol) {
        Ok(v) => criteria.push(v),
        Err(CriteriaError::InconclusiveQuadrature { label, value, bound }) => {
            notes.push(format!(
                "existence test inconclusive: {label} = {value:.3e} with error bound {bound:.3e} \
                 does not certify a sign"
            ));
        }
        Err(e) => notes.push(format!("existence test failed: {e}")),
    }

    let (abel, abel_skipped) = match cherkas(&rs) {
        Ok(ab) => (Some(AbelRepr::from_abel(&ab)), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let identities = run_identity_suite(&rs, opts.seed);

    let ode = polar_equation(&rs);
    let cycle_report = find_cycles(&ode, &opts.find);
    if cycle_report.completed == 0 {
        notes.push(
            "no scanned trajectory completes a full turn; the scalar equation leaves its \
             domain or blows up from every grid radius, so the scan asserts nothing"
                .to_string(),
        );
    }
    if cycle_report
        .cycles
        .iter()
        .any(|c| matches!(c.stability, qhcycles::dynamics::MapStability::NearDegenerate))
    {
        notes.push(
            "a fixed point of the return map has multiplier within the degeneracy band of 1; \
             it may belong to a continuum of periodic orbits"
                .to_string(),
        );
    }

    let weight = sys.weight;
    AnalysisReport {
        input: spec,
        decomposition: DecompositionRepr {
            weight: [weight.p, weight.q],
            low_degree: sys.n(),
            high_degree: sys.m(),
            r_exponent: qhcycles::trigpoly::rat_to_f64(&rs.r_exponent()),
        },
        radial: radial_repr(&rs),
        criteria: criteria.iter().map(VerdictRepr::from_verdict).collect(),
        abel,
        abel_skipped,
        identities,
        cycle_scan: CycleScanRepr::from_report(&ode, &cycle_report, &opts.find),
        notes,
    }
}
