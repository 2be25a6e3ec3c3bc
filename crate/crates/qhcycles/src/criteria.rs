//! Certified verdicts for the limit-cycle criteria.
//!
//! Every hypothesis here is a sign condition on an exact trigonometric
//! polynomial, decided by the certified sign engine; the only numerical
//! ingredient is the quadrature pair in the existence test, which carries
//! its own error bound. A verdict therefore never rests on sampling.
//!
//! The central object is the uniqueness function
//! Φ(θ) = a_n/b_m − (b_n/b_m)′ = (a_n·b_m − b_n′·b_m + b_n·b_m′)/b_m².
//! When b_m and the numerator both keep a strict sign, the system has at
//! most one limit cycle (with multiplicity), surrounding the origin and
//! hyperbolic, stable exactly when b_m·Φ > 0. The classical tests decide
//! weaker hypotheses on the same radial data and are evaluated alongside
//! for comparison.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::dynamics::{certified_quadrature, DynamicsError};
use crate::trigpoly::{sign_analysis, SignReport, SignVerdict, TrigPoly};
use crate::transforms::TrigEval;
use crate::vectorfield::{radial_coefficients, QHSystem, RadialSystem, Weight};
use crate::{rat, Rat, Stability};

/// Absolute tolerance requested from the existence-test quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Tightened tolerance used for one retry when a sign cannot be certified.
const QUAD_RETRY_TOL: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error(
        "integral of {label} could not be certified: |{value:.6e}| does not \
         exceed the error bound {bound:.3e}"
    )]
    InconclusiveQuadrature {
        label: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("quadrature failed for {label}: {source}")]
    QuadratureFailed {
        label: &'static str,
        source: DynamicsError,
    },
}

/// The uniqueness function in certified form: Φ = numerator / b_m², so
/// sign(b_m·Φ) = sign(numerator)·sign(b_m) pointwise where b_m ≠ 0.
#[derive(Clone, Debug)]
pub struct PhiData {
    /// a_n·b_m − (b_n′·b_m − b_n·b_m′)
    pub numerator: TrigPoly,
    pub bm: TrigPoly,
}

pub fn phi_data(rs: &RadialSystem) -> PhiData {
    PhiData {
        numerator: rs.phi_numerator(),
        bm: rs.b_m.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CriterionId {
    /// Uniqueness-function criterion with stability.
    Thm1,
    /// Sign of a_m·b_n − a_n·b_m.
    I,
    /// Sign of b_m·(a_m·b_n − a_n·b_m).
    II,
    /// Rigid low-degree rotation, sign of a_m·b_n − 2a_n·b_m − b_m′.
    III,
    /// Rigid low-degree rotation, identical-vanishing alternatives.
    IV,
    /// ψ-criterion for a rigid low-degree rotation.
    Cor1,
    /// Existence via the opposite-sign integral pair.
    Prop13,
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CriterionId::Thm1 => "Thm1",
            CriterionId::I => "I",
            CriterionId::II => "II",
            CriterionId::III => "III",
            CriterionId::IV => "IV",
            CriterionId::Cor1 => "Cor1",
            CriterionId::Prop13 => "Prop13",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriterionStatus {
    /// All hypotheses certified; the conclusion holds.
    Applies,
    /// A hypothesis was checked and does not hold for this system.
    HypothesisFails,
    /// The criterion's structural preconditions exclude this system.
    NotApplicable,
}

impl fmt::Display for CriterionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CriterionStatus::Applies => "applies",
            CriterionStatus::HypothesisFails => "hypothesis fails",
            CriterionStatus::NotApplicable => "not applicable",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conclusion {
    AtMost {
        cycles: u32,
        surrounds_origin: bool,
        /// Count includes multiplicity (a reported bound of 1 then also
        /// implies hyperbolicity when stability is asserted).
        with_multiplicity: bool,
        stability: Option<Stability>,
    },
    AtLeast { cycles: u32, surrounds_origin: bool },
    NoAssertion,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::AtMost {
                cycles,
                surrounds_origin,
                with_multiplicity,
                stability,
            } => {
                write!(f, "at most {cycles} limit cycle{}", plural(*cycles))?;
                if *with_multiplicity {
                    write!(f, " counted with multiplicity")?;
                }
                if *surrounds_origin {
                    write!(f, ", surrounding the origin if it exists")?;
                }
                if let Some(s) = stability {
                    let word = match s {
                        Stability::Stable => "stable",
                        Stability::Unstable => "unstable",
                    };
                    write!(f, "; hyperbolic and {word} if it exists")?;
                }
                Ok(())
            }
            Conclusion::AtLeast {
                cycles,
                surrounds_origin,
            } => {
                write!(f, "at least {cycles} limit cycle{}", plural(*cycles))?;
                if *surrounds_origin {
                    write!(f, " surrounding the origin")?;
                }
                Ok(())
            }
            Conclusion::NoAssertion => f.write_str("no conclusion"),
        }
    }
}

fn plural(n: u32) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

/// A piece of checked input a verdict rests on.
#[derive(Clone, Debug)]
pub enum Evidence {
    Sign { label: String, report: SignReport },
    Integral {
        label: String,
        value: f64,
        error_bound: f64,
    },
    ExactZeroTest { label: String, vanishes: bool },
    Note { text: String },
}

#[derive(Clone, Debug)]
pub struct CriterionVerdict {
    pub id: CriterionId,
    pub status: CriterionStatus,
    pub conclusion: Conclusion,
    pub evidence: Vec<Evidence>,
}

impl CriterionVerdict {
    fn new(id: CriterionId, status: CriterionStatus, conclusion: Conclusion) -> Self {
        CriterionVerdict {
            id,
            status,
            conclusion,
            evidence: Vec::new(),
        }
    }

    fn with(mut self, e: Evidence) -> Self {
        self.evidence.push(e);
        self
    }
}

fn sign_evidence(label: &str, report: &SignReport) -> Evidence {
    Evidence::Sign {
        label: label.to_string(),
        report: report.clone(),
    }
}

/// Uniqueness-function criterion. Requires b_m strictly one-signed (the
/// function divides by b_m²) and the numerator strictly one-signed; then
/// the system has at most one limit cycle counted with multiplicity, it
/// surrounds the origin if it exists, and it is hyperbolic with stability
/// given by sign(b_m·Φ) = sign(numerator)·sign(b_m): stable when positive.
pub fn theorem1(rs: &RadialSystem) -> CriterionVerdict {
    let phi = phi_data(rs);
    let bm_report = sign_analysis(&phi.bm);
    let num_report = sign_analysis(&phi.numerator);
    let verdict = match (bm_report.strict_sign(), num_report.strict_sign()) {
        (Some(sb), Some(sn)) => {
            let stability = if sb * sn > 0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            CriterionVerdict::new(
                CriterionId::Thm1,
                CriterionStatus::Applies,
                Conclusion::AtMost {
                    cycles: 1,
                    surrounds_origin: true,
                    with_multiplicity: true,
                    stability: Some(stability),
                },
            )
        }
        (None, _) => CriterionVerdict::new(
            CriterionId::Thm1,
            CriterionStatus::HypothesisFails,
            Conclusion::NoAssertion,
        )
        .with(Evidence::Note {
            text: "b_m has zeros on the circle, so the uniqueness function \
                   is undefined there"
                .to_string(),
        }),
        (Some(_), None) => CriterionVerdict::new(
            CriterionId::Thm1,
            CriterionStatus::HypothesisFails,
            Conclusion::NoAssertion,
        ),
    };
    verdict
        .with(sign_evidence("b_m", &bm_report))
        .with(sign_evidence(
            "Φ numerator a_n·b_m − b_n′·b_m + b_n·b_m′",
            &num_report,
        ))
}

/// True exactly when the low component is the rigid rotation
/// X_n = (a·x − y, x + a·y) with weight (1, 1); returns a. In radial terms
/// this is n = 1, b_n ≡ 1 and a_n constant, which pins the four linear
/// coefficients uniquely.
fn rigid_rotation_coefficient(rs: &RadialSystem) -> Option<Rat> {
    if rs.n != 1 || rs.weight != Weight::new(1, 1).expect("unit weight") {
        return None;
    }
    if rs.b_n != TrigPoly::one() || !rs.a_n.is_constant() {
        return None;
    }
    // a_n = (m − n)·a for this structure
    Some(rs.a_n.constant_term() / rat((rs.m - rs.n) as i64, 1))
}

/// The four classical sign tests, in order (I), (II), (III), (IV).
///
/// (I)  a_m·b_n − a_n·b_m ≢ 0 of one sign ⇒ at most 1 limit cycle,
///      surrounding the origin if it exists.
/// (II) b_m·(a_m·b_n − a_n·b_m) ≢ 0 of one sign ⇒ at most 2 limit cycles
///      surrounding the origin.
/// (III) rigid low rotation and a_m·b_n − 2a_n·b_m − b_m′ ≢ 0 of one
///      sign ⇒ at most 2 limit cycles surrounding the origin.
/// (IV) rigid low rotation and either expression of (III) ≡ 0 or the
///      expression of (II) ≡ 0 ⇒ at most 1 limit cycle surrounding the
///      origin.
///
/// "Of one sign" permits zeros, so a report with isolated zeros but no
/// crossing still satisfies (I)–(III).
pub fn classical_criteria(rs: &RadialSystem) -> Vec<CriterionVerdict> {
    let e1 = &(&rs.a_m * &rs.b_n) - &(&rs.a_n * &rs.b_m);
    let e2 = &rs.b_m * &e1;
    let two = rat(2, 1);
    let e3 = &(&(&rs.a_m * &rs.b_n) - &(&rs.a_n * &rs.b_m).scale(&two)) - &rs.b_m_dot;
    let rigid = rigid_rotation_coefficient(rs);

    let one_signed = |report: &SignReport| {
        !matches!(
            report.verdict,
            SignVerdict::ChangesSign | SignVerdict::IdenticallyZero
        )
    };

    let r1 = sign_analysis(&e1);
    let v1 = CriterionVerdict::new(
        CriterionId::I,
        if one_signed(&r1) {
            CriterionStatus::Applies
        } else {
            CriterionStatus::HypothesisFails
        },
        if one_signed(&r1) {
            Conclusion::AtMost {
                cycles: 1,
                surrounds_origin: true,
                with_multiplicity: false,
                stability: None,
            }
        } else {
            Conclusion::NoAssertion
        },
    )
    .with(sign_evidence("a_m·b_n − a_n·b_m", &r1));

    let r2 = sign_analysis(&e2);
    let v2 = CriterionVerdict::new(
        CriterionId::II,
        if one_signed(&r2) {
            CriterionStatus::Applies
        } else {
            CriterionStatus::HypothesisFails
        },
        if one_signed(&r2) {
            Conclusion::AtMost {
                cycles: 2,
                surrounds_origin: true,
                with_multiplicity: false,
                stability: None,
            }
        } else {
            Conclusion::NoAssertion
        },
    )
    .with(sign_evidence("b_m·(a_m·b_n − a_n·b_m)", &r2));

    let structural_note = || Evidence::Note {
        text: "requires weight (1, 1) and low component (a·x − y, x + a·y)"
            .to_string(),
    };

    let v3 = if rigid.is_none() {
        CriterionVerdict::new(
            CriterionId::III,
            CriterionStatus::NotApplicable,
            Conclusion::NoAssertion,
        )
        .with(structural_note())
    } else {
        let r3 = sign_analysis(&e3);
        CriterionVerdict::new(
            CriterionId::III,
            if one_signed(&r3) {
                CriterionStatus::Applies
            } else {
                CriterionStatus::HypothesisFails
            },
            if one_signed(&r3) {
                Conclusion::AtMost {
                    cycles: 2,
                    surrounds_origin: true,
                    with_multiplicity: false,
                    stability: None,
                }
            } else {
                Conclusion::NoAssertion
            },
        )
        .with(sign_evidence("a_m·b_n − 2a_n·b_m − b_m′", &r3))
    };

    let v4 = if rigid.is_none() {
        CriterionVerdict::new(
            CriterionId::IV,
            CriterionStatus::NotApplicable,
            Conclusion::NoAssertion,
        )
        .with(structural_note())
    } else {
        let z3 = e3.is_zero();
        let z2 = e2.is_zero();
        CriterionVerdict::new(
            CriterionId::IV,
            if z3 || z2 {
                CriterionStatus::Applies
            } else {
                CriterionStatus::HypothesisFails
            },
            if z3 || z2 {
                Conclusion::AtMost {
                    cycles: 1,
                    surrounds_origin: true,
                    with_multiplicity: false,
                    stability: None,
                }
            } else {
                Conclusion::NoAssertion
            },
        )
        .with(Evidence::ExactZeroTest {
            label: "a_m·b_n − 2a_n·b_m − b_m′".to_string(),
            vanishes: z3,
        })
        .with(Evidence::ExactZeroTest {
            label: "b_m·(a_m·b_n − a_n·b_m)".to_string(),
            vanishes: z2,
        })
    };

    vec![v1, v2, v3, v4]
}

/// ψ-criterion for systems whose low component is the rigid rotation
/// (a·x − y, x + a·y) with weight (1, 1): with
/// ψ(θ) = cos θ·Q_m(cos θ, sin θ) − sin θ·P_m(cos θ, sin θ), if
/// (m−1)·a·ψ + ψ′ keeps a strict sign the system has at most one limit
/// cycle, stable when ((m−1)·a·ψ + ψ′)·ψ > 0. For this structure b_n ≡ 1
/// and ψ = b_m, so the expression is exactly the uniqueness-function
/// numerator; a strict sign of the expression also forces ψ to be strictly
/// one-signed (a sign change of ψ would need crossings of both slopes).
pub fn corollary1(sys: &QHSystem) -> CriterionVerdict {
    let structure = 'structure: {
        if sys.weight != Weight::new(1, 1).expect("unit weight") || sys.n() != 1 {
            break 'structure None;
        }
        let mut a_from_p: Option<Rat> = None;
        for ((i, j), c) in sys.low.p.terms() {
            match (i, j) {
                (1, 0) => a_from_p = Some(c.clone()),
                (0, 1) if *c == rat(-1, 1) => {}
                _ => break 'structure None,
            }
        }
        let mut a_from_q: Option<Rat> = None;
        for ((i, j), c) in sys.low.q.terms() {
            match (i, j) {
                (0, 1) => a_from_q = Some(c.clone()),
                (1, 0) if *c == rat(1, 1) => {}
                _ => break 'structure None,
            }
        }
        let zero = rat(0, 1);
        let a = a_from_p.unwrap_or_else(|| zero.clone());
        if a != a_from_q.unwrap_or(zero) {
            break 'structure None;
        }
        // the linear part must actually rotate: Q must contain x, P must
        // contain −y
        if sys.low.q.terms().all(|(e, _)| e != (1, 0))
            || sys.low.p.terms().all(|(e, _)| e != (0, 1))
        {
            break 'structure None;
        }
        Some(a)
    };
    let Some(a) = structure else {
        return CriterionVerdict::new(
            CriterionId::Cor1,
            CriterionStatus::NotApplicable,
            Conclusion::NoAssertion,
        )
        .with(Evidence::Note {
            text: "requires weight (1, 1) and low component (a·x − y, x + a·y)"
                .to_string(),
        });
    };

    let rs = radial_coefficients(sys);
    // ψ = cos θ·Q_m − sin θ·P_m = b_m for weight (1, 1)
    let psi = rs.b_m.clone();
    let m1a = rat((sys.m() - 1) as i64, 1) * &a;
    let expr = &psi.scale(&m1a) + &psi.differentiate();
    debug_assert_eq!(
        expr,
        rs.phi_numerator(),
        "ψ-criterion expression must equal the uniqueness-function numerator"
    );
    let expr_report = sign_analysis(&expr);
    let psi_report = sign_analysis(&psi);
    let verdict = match (expr_report.strict_sign(), psi_report.strict_sign()) {
        (Some(se), Some(sp)) => {
            let stability = if se * sp > 0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            CriterionVerdict::new(
                CriterionId::Cor1,
                CriterionStatus::Applies,
                Conclusion::AtMost {
                    cycles: 1,
                    surrounds_origin: true,
                    with_multiplicity: true,
                    stability: Some(stability),
                },
            )
        }
        _ => CriterionVerdict::new(
            CriterionId::Cor1,
            CriterionStatus::HypothesisFails,
            Conclusion::NoAssertion,
        ),
    };
    verdict
        .with(sign_evidence("(m−1)·a·ψ + ψ′", &expr_report))
        .with(sign_evidence("ψ", &psi_report))
        .with(Evidence::Note {
            text: format!("rigid rotation coefficient a = {a}"),
        })
}

fn certified_integral(
    num: &TrigPoly,
    den: &TrigPoly,
    label: &'static str,
    tol: f64,
) -> Result<(f64, f64), CriteriaError> {
    let num_ev = TrigEval::new(num);
    let den_ev = TrigEval::new(den);
    let integrand = move |th: f64| num_ev.eval(th) / den_ev.eval(th);
    let mut attempt_tol = tol;
    for round in 0..2 {
        match certified_quadrature(&integrand, 0.0, 2.0 * PI, attempt_tol) {
            Ok(q) => {
                if q.value.abs() > q.error_bound {
                    return Ok((q.value, q.error_bound));
                }
                if round == 1 || attempt_tol <= QUAD_RETRY_TOL {
                    return Err(CriteriaError::InconclusiveQuadrature {
                        label,
                        value: q.value,
                        bound: q.error_bound,
                    });
                }
            }
            Err(e) => {
                if round == 1 || attempt_tol <= QUAD_RETRY_TOL {
                    return Err(CriteriaError::QuadratureFailed { label, source: e });
                }
            }
        }
        attempt_tol = QUAD_RETRY_TOL;
    }
    unreachable!("both quadrature rounds return")
}

/// Existence test: when b_n·b_m is strictly positive on the circle and the
/// period integrals of a_n/b_n and a_m/b_m have certified opposite signs,
/// the system has at least one limit cycle surrounding the origin.
pub fn existence_prop13(
    rs: &RadialSystem,
    quad_tol: f64,
) -> Result<CriterionVerdict, CriteriaError> {
    let product = &rs.b_n * &rs.b_m;
    let product_report = sign_analysis(&product);
    if product_report.strict_sign() != Some(1) {
        return Ok(CriterionVerdict::new(
            CriterionId::Prop13,
            CriterionStatus::HypothesisFails,
            Conclusion::NoAssertion,
        )
        .with(sign_evidence("b_n·b_m", &product_report)));
    }
    let (i_n, e_n) = certified_integral(&rs.a_n, &rs.b_n, "a_n/b_n", quad_tol)?;
    let (i_m, e_m) = certified_integral(&rs.a_m, &rs.b_m, "a_m/b_m", quad_tol)?;
    let opposite = i_n.signum() * i_m.signum() < 0.0;
    let verdict = CriterionVerdict::new(
        CriterionId::Prop13,
        if opposite {
            CriterionStatus::Applies
        } else {
            CriterionStatus::HypothesisFails
        },
        if opposite {
            Conclusion::AtLeast {
                cycles: 1,
                surrounds_origin: true,
            }
        } else {
            Conclusion::NoAssertion
        },
    );
    Ok(verdict
        .with(sign_evidence("b_n·b_m", &product_report))
        .with(Evidence::Integral {
            label: "∫ a_n/b_n dθ".to_string(),
            value: i_n,
            error_bound: e_n,
        })
        .with(Evidence::Integral {
            label: "∫ a_m/b_m dθ".to_string(),
            value: i_m,
            error_bound: e_m,
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery;
    use crate::trigpoly::SignVerdict;
    use crate::vectorfield::{decompose, make_system, PolyXY};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn verdict_of<'a>(
        verdicts: &'a [CriterionVerdict],
        id: CriterionId,
    ) -> &'a CriterionVerdict {
        verdicts.iter().find(|v| v.id == id).unwrap()
    }

    #[test]
    fn phi_numerator_matches_quotient_rule_at_random_angles() {
        // Φ·b_m² against a five-point stencil for (b_n/b_m)′, evaluated in
        // floating point, independent of the symbolic product code.
        let rs = radial_coefficients(&battery::linear_cubic());
        let phi = phi_data(&rs);
        let (num, bm) = (TrigEval::new(&phi.numerator), TrigEval::new(&phi.bm));
        let (an, bn) = (TrigEval::new(&rs.a_n), TrigEval::new(&rs.b_n));
        let quot = |th: f64| bn.eval(th) / bm.eval(th);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let h = 1e-3;
        for _ in 0..100 {
            let th = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            if bm.eval(th).abs() < 0.1 {
                continue;
            }
            let dq = (quot(th - 2.0 * h) - 8.0 * quot(th - h) + 8.0 * quot(th + h)
                - quot(th + 2.0 * h))
                / (12.0 * h);
            let want = (an.eval(th) / bm.eval(th) - dq) * bm.eval(th) * bm.eval(th);
            let got = num.eval(th);
            assert!(
                (got - want).abs() < 1e-10 * (1.0 + want.abs()),
                "numerator mismatch at θ = {th}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn theorem1_applies_stable_for_linear_cubic() {
        let rs = radial_coefficients(&battery::linear_cubic());
        let v = theorem1(&rs);
        assert_eq!(v.status, CriterionStatus::Applies);
        assert_eq!(
            v.conclusion,
            Conclusion::AtMost {
                cycles: 1,
                surrounds_origin: true,
                with_multiplicity: true,
                stability: Some(Stability::Stable),
            }
        );
    }

    #[test]
    fn theorem1_applies_to_quintic_sextic() {
        // b_m = (2cos²θ + sin⁴θ)² is strictly positive even though b_n
        // changes sign; the numerator keeps a strict sign as well.
        let rs = radial_coefficients(&battery::quintic_sextic());
        let v = theorem1(&rs);
        assert_eq!(v.status, CriterionStatus::Applies, "evidence: {:?}", v.evidence);
        match v.conclusion {
            Conclusion::AtMost {
                cycles: 1,
                stability: Some(Stability::Stable),
                ..
            } => {}
            other => panic!("unexpected conclusion {other:?}"),
        }
    }

    #[test]
    fn theorem1_fails_for_vanishing_phi() {
        let rs = radial_coefficients(&battery::rigid_center());
        let v = theorem1(&rs);
        assert_eq!(v.status, CriterionStatus::HypothesisFails);
        let num_report = v.evidence.iter().find_map(|e| match e {
            Evidence::Sign { label, report } if label.starts_with("Φ numerator") => {
                Some(report)
            }
            _ => None,
        });
        assert_eq!(num_report.unwrap().verdict, SignVerdict::IdenticallyZero);
    }

    #[test]
    fn classical_tests_fail_for_linear_cubic() {
        // the showcase system defeats all four classical hypotheses while
        // the uniqueness-function criterion still applies
        let rs = radial_coefficients(&battery::linear_cubic());
        let vs = classical_criteria(&rs);
        for id in [CriterionId::I, CriterionId::II, CriterionId::III, CriterionId::IV] {
            assert_eq!(
                verdict_of(&vs, id).status,
                CriterionStatus::HypothesisFails,
                "{id}"
            );
        }
    }

    #[test]
    fn classical_iii_iv_require_unit_weight() {
        let rs = radial_coefficients(&battery::quintic_sextic());
        let vs = classical_criteria(&rs);
        assert_eq!(verdict_of(&vs, CriterionId::I).status, CriterionStatus::HypothesisFails);
        assert_eq!(verdict_of(&vs, CriterionId::II).status, CriterionStatus::HypothesisFails);
        assert_eq!(verdict_of(&vs, CriterionId::III).status, CriterionStatus::NotApplicable);
        assert_eq!(verdict_of(&vs, CriterionId::IV).status, CriterionStatus::NotApplicable);
    }

    #[test]
    fn classical_tests_on_constant_rotation_family() {
        // a_m·b_n − a_n·b_m = −4: (I) applies; (II) −4 likewise; (III)
        // gate passes with a = 1 and the expression −6; (IV) fails, no
        // expression vanishes identically.
        let rs = radial_coefficients(&battery::rotation_family(1, 0));
        let vs = classical_criteria(&rs);
        assert_eq!(verdict_of(&vs, CriterionId::I).status, CriterionStatus::Applies);
        assert_eq!(
            verdict_of(&vs, CriterionId::I).conclusion,
            Conclusion::AtMost {
                cycles: 1,
                surrounds_origin: true,
                with_multiplicity: false,
                stability: None,
            }
        );
        assert_eq!(verdict_of(&vs, CriterionId::II).status, CriterionStatus::Applies);
        assert_eq!(verdict_of(&vs, CriterionId::III).status, CriterionStatus::Applies);
        assert_eq!(
            verdict_of(&vs, CriterionId::III).conclusion,
            Conclusion::AtMost {
                cycles: 2,
                surrounds_origin: true,
                with_multiplicity: false,
                stability: None,
            }
        );
        assert_eq!(verdict_of(&vs, CriterionId::IV).status, CriterionStatus::HypothesisFails);
    }

    #[test]
    fn corollary_matches_uniqueness_criterion_on_linear_cubic() {
        let sys = battery::linear_cubic();
        let v = corollary1(&sys);
        assert_eq!(v.status, CriterionStatus::Applies);
        assert_eq!(
            v.conclusion,
            Conclusion::AtMost {
                cycles: 1,
                surrounds_origin: true,
                with_multiplicity: true,
                stability: Some(Stability::Stable),
            }
        );
        // ψ-expression = 2·(2 + cos 2θ) + (−2 sin 2θ) = 4 + 2cos2θ − 2sin2θ
        let rs = radial_coefficients(&sys);
        let expr_report = v.evidence.iter().find_map(|e| match e {
            Evidence::Sign { label, report } if label.starts_with("(m−1)") => Some(report),
            _ => None,
        });
        assert_eq!(expr_report.unwrap().verdict, SignVerdict::Positive);
        assert_eq!(theorem1(&rs).conclusion, v.conclusion);
    }

    #[test]
    fn corollary_requires_rigid_rotation_structure() {
        assert_eq!(
            corollary1(&battery::quintic_sextic()).status,
            CriterionStatus::NotApplicable
        );
        // rigid rotation against a radial high component: ψ ≡ 0
        let p = PolyXY::monomial(0, 1, rat(-1, 1))
            .add(&PolyXY::monomial(3, 0, rat(1, 1)))
            .add(&PolyXY::monomial(1, 2, rat(1, 1)));
        let q = PolyXY::monomial(1, 0, rat(1, 1))
            .add(&PolyXY::monomial(2, 1, rat(1, 1)))
            .add(&PolyXY::monomial(0, 3, rat(1, 1)));
        let w = Weight::new(1, 1).unwrap();
        let sys = make_system(decompose(&p, &q, w).unwrap(), w).unwrap();
        let v = corollary1(&sys);
        assert_eq!(v.status, CriterionStatus::HypothesisFails);
    }

    #[test]
    fn existence_applies_to_linear_cubic_with_pinned_integrals() {
        let rs = radial_coefficients(&battery::linear_cubic());
        let v = existence_prop13(&rs, DEFAULT_QUAD_TOL).unwrap();
        assert_eq!(v.status, CriterionStatus::Applies);
        let ints: Vec<(f64, f64)> = v
            .evidence
            .iter()
            .filter_map(|e| match e {
                Evidence::Integral { value, error_bound, .. } => Some((*value, *error_bound)),
                _ => None,
            })
            .collect();
        assert_eq!(ints.len(), 2);
        // ∫ 2 dθ = 4π and ∫ (−2 + 8sin2θ)/(2 + cos2θ) dθ = −4π/√3
        assert!((ints[0].0 - 4.0 * PI).abs() < 1e-9);
        assert!((ints[1].0 + 4.0 * PI / 3.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn existence_applies_to_rotation_family() {
        let rs = radial_coefficients(&battery::rotation_family(1, 0));
        let v = existence_prop13(&rs, DEFAULT_QUAD_TOL).unwrap();
        assert_eq!(v.status, CriterionStatus::Applies);
    }

    #[test]
    fn existence_needs_strictly_positive_denominator_product() {
        // b_n·b_m = cos²θ: nonnegative with zeros is not enough
        let rs = radial_coefficients(&battery::skewed_family(1, 0));
        let v = existence_prop13(&rs, DEFAULT_QUAD_TOL).unwrap();
        assert_eq!(v.status, CriterionStatus::HypothesisFails);
        match &v.evidence[0] {
            Evidence::Sign { report, .. } => {
                assert_eq!(report.verdict, SignVerdict::NonNegativeWithZeros)
            }
            other => panic!("expected sign evidence, got {other:?}"),
        }
    }

    #[test]
    fn existence_reports_inconclusive_zero_integral() {
        // a_n = sin 2θ integrates to exactly zero; its sign can never be
        // certified, and the error must say so rather than guess
        let base = radial_coefficients(&battery::rotation_family(1, 0));
        let rs = RadialSystem {
            a_n: TrigPoly::sin_harmonic(2, rat(1, 1)),
            ..base
        };
        match existence_prop13(&rs, DEFAULT_QUAD_TOL) {
            Err(CriteriaError::InconclusiveQuadrature { label, .. }) => {
                assert_eq!(label, "a_n/b_n");
            }
            other => panic!("expected InconclusiveQuadrature, got {other:?}"),
        }
    }

    #[test]
    fn rigid_gate_demands_constant_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let sys = battery::random_system(&mut rng);
            let rs = radial_coefficients(&sys);
            if rigid_rotation_coefficient(&rs).is_some() {
                assert_eq!(rs.n, 1);
                assert_eq!(rs.b_n, TrigPoly::one());
                assert!(rs.a_n.is_constant());
            }
        }
    }
}
