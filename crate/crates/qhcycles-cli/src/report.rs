//! Serializable analysis report.
//!
//! Every field is either a plain value or a `Vec`, never a map, so the JSON
//! field order is fixed by the struct declaration and two runs on the same
//! input produce byte-identical output.

use qhcycles::criteria::{Conclusion, CriterionStatus, CriterionVerdict, Evidence};
use qhcycles::dynamics::{Cycle, CycleReport, FindCycleOptions, MapStability};
use qhcycles::transforms::{AbelEquation, PolarOde};
use qhcycles::trigpoly::{SignReport, SignVerdict, TrigPoly};
use qhcycles::vectorfield::RadialSystem;
use qhcycles::Stability;
use serde::Serialize;

use crate::input::SystemSpec;

/// Exact trig polynomial rendered with rational coefficients as strings.
/// `cos[k-1]` and `sin[k-1]` hold the coefficients of cos(kθ), sin(kθ).
#[derive(Debug, Serialize)]
pub struct TrigPolyRepr {
    pub constant: String,
    pub cos: Vec<String>,
    pub sin: Vec<String>,
    pub display: String,
}

impl TrigPolyRepr {
    pub fn from_poly(f: &TrigPoly) -> Self {
        TrigPolyRepr {
            constant: f.constant_term().to_string(),
            cos: f.cos_coeffs().iter().map(|c| c.to_string()).collect(),
            sin: f.sin_coeffs().iter().map(|c| c.to_string()).collect(),
            display: f.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DecompositionRepr {
    pub weight: [u32; 2],
    pub low_degree: u32,
    pub high_degree: u32,
    /// Exponent e = (n−1)/(m−n) of the radial factor in the cylinder field.
    pub r_exponent: f64,
}

#[derive(Debug, Serialize)]
pub struct RadialRepr {
    pub a_n: TrigPolyRepr,
    pub a_m: TrigPolyRepr,
    pub b_n: TrigPolyRepr,
    pub b_m: TrigPolyRepr,
    pub phi_numerator: TrigPolyRepr,
}

#[derive(Debug, Serialize)]
pub struct SignReportRepr {
    pub verdict: String,
    /// Isolating intervals for the distinct zeros, ascending in (−π, π].
    pub zeros: Vec<[f64; 2]>,
    pub positive_witness: Option<[f64; 2]>,
    pub negative_witness: Option<[f64; 2]>,
}

impl SignReportRepr {
    pub fn from_report(r: &SignReport) -> Self {
        SignReportRepr {
            verdict: verdict_str(r.verdict).to_string(),
            zeros: r
                .zeros
                .iter()
                .map(|z| {
                    let (lo, hi) = z.bounds_f64();
                    [lo, hi]
                })
                .collect(),
            positive_witness: r.positive_witness.map(|w| [w.theta, w.value]),
            negative_witness: r.negative_witness.map(|w| [w.theta, w.value]),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EvidenceRepr {
    pub kind: String,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<SignReportRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vanishes: Option<bool>,
}

impl EvidenceRepr {
    fn from_evidence(e: &Evidence) -> Self {
        match e {
            Evidence::Sign { label, report } => EvidenceRepr {
                kind: "sign".to_string(),
                label: label.clone(),
                sign: Some(SignReportRepr::from_report(report)),
                value: None,
                error_bound: None,
                vanishes: None,
            },
            Evidence::Integral { label, value, error_bound } => EvidenceRepr {
                kind: "integral".to_string(),
                label: label.clone(),
                sign: None,
                value: Some(*value),
                error_bound: Some(*error_bound),
                vanishes: None,
            },
            Evidence::ExactZeroTest { label, vanishes } => EvidenceRepr {
                kind: "exact-zero-test".to_string(),
                label: label.clone(),
                sign: None,
                value: None,
                error_bound: None,
                vanishes: Some(*vanishes),
            },
            Evidence::Note { text } => EvidenceRepr {
                kind: "note".to_string(),
                label: text.clone(),
                sign: None,
                value: None,
                error_bound: None,
                vanishes: None,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictRepr {
    pub criterion: String,
    pub status: String,
    pub conclusion: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_cycles: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<String>,
    pub evidence: Vec<EvidenceRepr>,
}

impl VerdictRepr {
    pub fn from_verdict(v: &CriterionVerdict) -> Self {
        let status = match v.status {
            CriterionStatus::Applies => "applies",
            CriterionStatus::HypothesisFails => "hypothesis-fails",
            CriterionStatus::NotApplicable => "not-applicable",
        };
        let (max_cycles, min_cycles, stability) = match &v.conclusion {
            Conclusion::AtMost { cycles, stability, .. } => {
                (Some(*cycles), None, stability.map(stability_str))
            }
            Conclusion::AtLeast { cycles, .. } => (None, Some(*cycles), None),
            Conclusion::NoAssertion => (None, None, None),
        };
        VerdictRepr {
            criterion: v.id.to_string(),
            status: status.to_string(),
            conclusion: v.conclusion.to_string(),
            max_cycles,
            min_cycles,
            stability,
            evidence: v.evidence.iter().map(EvidenceRepr::from_evidence).collect(),
        }
    }
}

fn stability_str(s: Stability) -> String {
    match s {
        Stability::Stable => "stable".to_string(),
        Stability::Unstable => "unstable".to_string(),
    }
}

#[derive(Debug, Serialize)]
pub struct AbelRepr {
    /// Coefficient numerators over the common denominator b_n·b_m, scaled by
    /// 2π: alpha_k = 2π·alpha{k}_num/(b_n·b_m) as a function of τ = θ/2π.
    pub alpha3_num: TrigPolyRepr,
    pub alpha2_num: TrigPolyRepr,
    pub alpha1_num: TrigPolyRepr,
    pub den: TrigPolyRepr,
}

impl AbelRepr {
    pub fn from_abel(a: &AbelEquation) -> Self {
        AbelRepr {
            alpha3_num: TrigPolyRepr::from_poly(&a.alpha3_num),
            alpha2_num: TrigPolyRepr::from_poly(&a.alpha2_num),
            alpha1_num: TrigPolyRepr::from_poly(&a.alpha1_num),
            den: TrigPolyRepr::from_poly(&a.den),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct IdentityRow {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    /// Exact sign verdict, for the checks that certify a sign instead of
    /// measuring a residual.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

pub fn verdict_str(v: SignVerdict) -> &'static str {
    match v {
        SignVerdict::Positive => "positive",
        SignVerdict::Negative => "negative",
        SignVerdict::NonNegativeWithZeros => "non-negative-with-zeros",
        SignVerdict::NonPositiveWithZeros => "non-positive-with-zeros",
        SignVerdict::IdenticallyZero => "identically-zero",
        SignVerdict::ChangesSign => "changes-sign",
    }
}

#[derive(Debug, Serialize)]
pub struct CycleRepr {
    pub r: f64,
    pub multiplier: f64,
    pub map_stability: String,
    pub residual: f64,
    /// Stability in the plane; absent when the angular orientation is mixed
    /// or the cycle is too close to degenerate to classify.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane_stability: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CycleScanRepr {
    pub r_lo: f64,
    pub r_hi: f64,
    pub grid_points: usize,
    pub completed: usize,
    pub domain_exits: usize,
    pub blowups: usize,
    pub cycles: Vec<CycleRepr>,
}

impl CycleScanRepr {
    pub fn from_report(ode: &PolarOde, report: &CycleReport, opts: &FindCycleOptions) -> Self {
        let cycles = report
            .cycles
            .iter()
            .map(|c| cycle_repr(ode, c, opts))
            .collect();
        CycleScanRepr {
            r_lo: opts.r_lo,
            r_hi: opts.r_hi,
            grid_points: opts.grid,
            completed: report.completed,
            domain_exits: report.domain_exits,
            blowups: report.blowups,
            cycles,
        }
    }
}

fn cycle_repr(ode: &PolarOde, c: &Cycle, opts: &FindCycleOptions) -> CycleRepr {
    let map_stability = match c.stability {
        MapStability::Stable => "stable",
        MapStability::Unstable => "unstable",
        MapStability::NearDegenerate => "near-degenerate",
    };
    let plane_stability = qhcycles::dynamics::plane_stability(ode, c, &opts.integration)
        .ok()
        .map(stability_str);
    CycleRepr {
        r: c.r0,
        multiplier: c.multiplier,
        map_stability: map_stability.to_string(),
        residual: c.residual,
        plane_stability,
    }
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub input: SystemSpec,
    pub decomposition: DecompositionRepr,
    pub radial: RadialRepr,
    pub criteria: Vec<VerdictRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abel: Option<AbelRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abel_skipped: Option<String>,
    pub identities: Vec<IdentityRow>,
    pub cycle_scan: CycleScanRepr,
    pub notes: Vec<String>,
}

pub fn radial_repr(rs: &RadialSystem) -> RadialRepr {
    RadialRepr {
        a_n: TrigPolyRepr::from_poly(&rs.a_n),
        a_m: TrigPolyRepr::from_poly(&rs.a_m),
        b_n: TrigPolyRepr::from_poly(&rs.b_n),
        b_m: TrigPolyRepr::from_poly(&rs.b_m),
        phi_numerator: TrigPolyRepr::from_poly(&rs.phi_numerator()),
    }
}
