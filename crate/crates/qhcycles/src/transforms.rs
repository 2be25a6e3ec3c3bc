//! Coordinate changes linking the planar system, the scalar periodic
//! equation on the cylinder, and its Abel form, plus sampling-based
//! checkers for the structural identities behind the uniqueness criteria.
//!
//! The scalar reduction: in generalized polar coordinates
//! x = r^p cos θ, y = r^q sin θ the two-component system becomes
//!
//!   dr/dθ = R(θ, r) = (a_n(θ) r + a_m(θ) r²) / (b_n(θ) + b_m(θ) r)
//!
//! on the region where the denominator keeps its sign. When b_n and b_m are
//! both nonvanishing, ρ = b_m r / (b_n + b_m r), τ = θ/2π turns the
//! quadratic-over-linear equation into an Abel equation
//! dρ/dτ = α₃(τ)ρ³ + α₂(τ)ρ² + α₁(τ)ρ whose coefficients share the common
//! denominator b_n b_m.
//!
//! Identity checkers evaluate both sides on sample sets and report the
//! worst relative residual. Derivatives entering divergence-style checks
//! are finite differences on purpose: the verifier must not reuse the
//! closed forms it is checking.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::trigpoly::{rat_to_f64, sign_analysis, SignReport, TrigPoly};
use crate::vectorfield::RadialSystem;
use crate::Rat;

/// Central finite-difference step used by the divergence checkers.
pub const FD_STEP: f64 = 1e-5;
/// Margin keeping samples away from excluded curves.
pub const SAMPLE_MARGIN: f64 = 1e-6;

/// Default inner level ε for the canonical pair of invariant levels (1, ε)
/// of the Abel equation.
pub fn default_eps() -> Rat {
    Rat::new(1.into(), 4.into())
}

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("coefficient {name} vanishes on the circle; the transformation is undefined")]
    CoefficientUndefined { name: &'static str },
    #[error("invalid curve pair: {reason}")]
    InvalidCurves { reason: String },
    #[error("Jacobian is singular at sample ({x:.6}, {y:.6}): |det| = {det:.3e}")]
    SingularJacobian { x: f64, y: f64, det: f64 },
}

/// Fixed-coefficient f64 evaluator for a trigonometric polynomial. Uses the
/// rotation recurrence (one sin/cos call per evaluation), so it is cheap
/// enough for integration right-hand sides.
#[derive(Clone, Debug)]
pub struct TrigEval {
    c0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigEval {
    pub fn new(t: &TrigPoly) -> Self {
        TrigEval {
            c0: rat_to_f64(t.constant_term()),
            cos: t.cos_coeffs().iter().map(rat_to_f64).collect(),
            sin: t.sin_coeffs().iter().map(rat_to_f64).collect(),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.c0;
        if self.cos.is_empty() {
            return acc;
        }
        let (s1, c1) = theta.sin_cos();
        let (mut ck, mut sk) = (c1, s1);
        for k in 0..self.cos.len() {
            acc += self.cos[k] * ck + self.sin[k] * sk;
            let c_next = ck * c1 - sk * s1;
            let s_next = sk * c1 + ck * s1;
            ck = c_next;
            sk = s_next;
        }
        acc
    }
}

/// The scalar periodic equation dr/dθ = R(θ, r) together with the exact
/// radial data it came from.
#[derive(Clone, Debug)]
pub struct PolarOde {
    pub radial: RadialSystem,
    a_n: TrigEval,
    a_m: TrigEval,
    b_n: TrigEval,
    b_m: TrigEval,
    b_n_dot: TrigEval,
    b_m_dot: TrigEval,
}

impl PolarOde {
    pub fn a_n(&self, th: f64) -> f64 {
        self.a_n.eval(th)
    }

    pub fn a_m(&self, th: f64) -> f64 {
        self.a_m.eval(th)
    }

    pub fn b_n(&self, th: f64) -> f64 {
        self.b_n.eval(th)
    }

    pub fn b_m(&self, th: f64) -> f64 {
        self.b_m.eval(th)
    }

    pub fn b_n_dot(&self, th: f64) -> f64 {
        self.b_n_dot.eval(th)
    }

    pub fn b_m_dot(&self, th: f64) -> f64 {
        self.b_m_dot.eval(th)
    }

    /// b_n + b_m r, the factor whose zero set bounds the domain.
    pub fn denominator(&self, th: f64, r: f64) -> f64 {
        self.b_n.eval(th) + self.b_m.eval(th) * r
    }

    /// Scale for relative margin tests on the denominator.
    pub fn denominator_scale(&self, th: f64, r: f64) -> f64 {
        self.b_n.eval(th).abs() + self.b_m.eval(th).abs() * r.abs() + 1.0
    }

    /// R(θ, r).
    pub fn rhs(&self, th: f64, r: f64) -> f64 {
        let num = self.a_n.eval(th) * r + self.a_m.eval(th) * r * r;
        num / self.denominator(th, r)
    }

    /// ∂R/∂r, used by the variational equation of the return map.
    pub fn rhs_r(&self, th: f64, r: f64) -> f64 {
        let a_n = self.a_n.eval(th);
        let a_m = self.a_m.eval(th);
        let b_m = self.b_m.eval(th);
        let den = self.denominator(th, r);
        ((a_n + 2.0 * a_m * r) * den - (a_n * r + a_m * r * r) * b_m) / (den * den)
    }
}

/// Builds the scalar periodic equation from exact radial data.
pub fn polar_equation(rs: &RadialSystem) -> PolarOde {
    PolarOde {
        a_n: TrigEval::new(&rs.a_n),
        a_m: TrigEval::new(&rs.a_m),
        b_n: TrigEval::new(&rs.b_n),
        b_m: TrigEval::new(&rs.b_m),
        b_n_dot: TrigEval::new(&rs.b_n_dot),
        b_m_dot: TrigEval::new(&rs.b_m_dot),
        radial: rs.clone(),
    }
}

/// The full polar vector field (before eliminating time):
///   dr/dt = (a_n + a_m r)/(p cos²θ + q sin²θ) · r^{1+(n−1)/(m−n)}
///   dθ/dt = (b_n + b_m r)/(p cos²θ + q sin²θ) · r^{(n−1)/(m−n)}
#[derive(Clone, Debug)]
pub struct PolarSystem {
    ode: PolarOde,
    weight_form: TrigEval,
    exponent: f64,
}

impl PolarSystem {
    pub fn r_dot(&self, th: f64, r: f64) -> f64 {
        let num = self.ode.a_n.eval(th) + self.ode.a_m.eval(th) * r;
        num / self.weight_form.eval(th) * r.powf(1.0 + self.exponent)
    }

    pub fn theta_dot(&self, th: f64, r: f64) -> f64 {
        let num = self.ode.b_n.eval(th) + self.ode.b_m.eval(th) * r;
        num / self.weight_form.eval(th) * r.powf(self.exponent)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// Builds the time-parameterized polar system.
pub fn polar_system(rs: &RadialSystem) -> PolarSystem {
    PolarSystem {
        ode: polar_equation(rs),
        weight_form: TrigEval::new(&rs.weight_form()),
        exponent: rat_to_f64(&rs.r_exponent()),
    }
}

/// Abel equation dρ/dτ = α₃ρ³ + α₂ρ² + α₁ρ with
///   α₃ = 2π (a_n b_m − a_m b_n) / (b_n b_m)
///   α₂ = 2π (a_m b_n − 2 a_n b_m + W(b_m, b_n)) / (b_n b_m)
///   α₁ = 2π (a_n b_m − W(b_m, b_n)) / (b_n b_m)
/// where W(f, g) = f·g′ − f′·g. The numerators and the common denominator
/// are kept exactly; note α₃ + α₂ + α₁ ≡ 0 (ρ = 1 is invariant) and the
/// α₁ numerator equals the uniqueness-function numerator a_n b_m − b_n′ b_m
/// + b_n b_m′.
#[derive(Clone, Debug)]
pub struct AbelEquation {
    pub alpha3_num: TrigPoly,
    pub alpha2_num: TrigPoly,
    pub alpha1_num: TrigPoly,
    pub den: TrigPoly,
    n3: TrigEval,
    n2: TrigEval,
    n1: TrigEval,
    d: TrigEval,
    b_n: TrigEval,
    b_m: TrigEval,
}

impl AbelEquation {
    fn alpha(&self, num: &TrigEval, tau: f64) -> f64 {
        let th = 2.0 * PI * tau;
        2.0 * PI * num.eval(th) / self.d.eval(th)
    }

    pub fn alpha3(&self, tau: f64) -> f64 {
        self.alpha(&self.n3, tau)
    }

    pub fn alpha2(&self, tau: f64) -> f64 {
        self.alpha(&self.n2, tau)
    }

    pub fn alpha1(&self, tau: f64) -> f64 {
        self.alpha(&self.n1, tau)
    }

    /// Right-hand side S(τ, ρ).
    pub fn rhs(&self, tau: f64, rho: f64) -> f64 {
        ((self.alpha3(tau) * rho + self.alpha2(tau)) * rho + self.alpha1(tau)) * rho
    }

    /// ∂S/∂ρ.
    pub fn rhs_rho(&self, tau: f64, rho: f64) -> f64 {
        (3.0 * self.alpha3(tau) * rho + 2.0 * self.alpha2(tau)) * rho + self.alpha1(tau)
    }

    /// ρ(θ, r) = b_m r / (b_n + b_m r).
    pub fn rho_from(&self, th: f64, r: f64) -> f64 {
        let bm = self.b_m.eval(th);
        bm * r / (self.b_n.eval(th) + bm * r)
    }

    /// Inverse map r(θ, ρ) = (b_n/b_m) ρ/(1−ρ).
    pub fn r_from(&self, th: f64, rho: f64) -> f64 {
        self.b_n.eval(th) / self.b_m.eval(th) * rho / (1.0 - rho)
    }
}

/// Builds the Abel form. Requires both b_n and b_m to be strictly
/// one-signed on the circle: otherwise the substitution ρ = b_m r/(b_n+b_m r)
/// degenerates and the coefficients are undefined.
pub fn cherkas(rs: &RadialSystem) -> Result<AbelEquation, TransformError> {
    if sign_analysis(&rs.b_n).strict_sign().is_none() {
        return Err(TransformError::CoefficientUndefined { name: "b_n" });
    }
    if sign_analysis(&rs.b_m).strict_sign().is_none() {
        return Err(TransformError::CoefficientUndefined { name: "b_m" });
    }
    // W(b_m, b_n) = b_m·b_n′ − b_m′·b_n
    let wron = &(&rs.b_m * &rs.b_n_dot) - &(&rs.b_m_dot * &rs.b_n);
    let an_bm = &rs.a_n * &rs.b_m;
    let am_bn = &rs.a_m * &rs.b_n;
    let alpha3_num = &an_bm - &am_bn;
    let two = Rat::new(2.into(), 1.into());
    let alpha2_num = &(&am_bn - &an_bm.scale(&two)) + &wron;
    let alpha1_num = &an_bm - &wron;
    let den = &rs.b_n * &rs.b_m;
    debug_assert!(
        (&(&alpha3_num + &alpha2_num) + &alpha1_num).is_zero(),
        "α numerators must sum to zero (ρ = 1 invariant)"
    );
    debug_assert_eq!(
        alpha1_num,
        rs.phi_numerator(),
        "α₁ numerator must be the uniqueness-function numerator"
    );
    Ok(AbelEquation {
        n3: TrigEval::new(&alpha3_num),
        n2: TrigEval::new(&alpha2_num),
        n1: TrigEval::new(&alpha1_num),
        d: TrigEval::new(&den),
        b_n: TrigEval::new(&rs.b_n),
        b_m: TrigEval::new(&rs.b_m),
        alpha3_num,
        alpha2_num,
        alpha1_num,
        den,
    })
}

/// 1-periodic scalar curve with its derivative.
#[derive(Clone)]
pub struct PeriodicCurve {
    pub value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub deriv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl PeriodicCurve {
    pub fn constant(c: f64) -> Self {
        PeriodicCurve {
            value: Arc::new(move |_| c),
            deriv: Arc::new(|_| 0.0),
        }
    }
}

/// Scalar auxiliary function with closed-form partial derivatives.
#[derive(Clone)]
pub struct AuxFunction {
    pub f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub f_t: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub f_x: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// Human-readable description of the excluded set.
    pub domain: &'static str,
}

fn validate_curves(l1: &PeriodicCurve, l2: &PeriodicCurve) -> Result<(), TransformError> {
    let bad = |reason: String| TransformError::InvalidCurves { reason };
    for i in 0..=64 {
        let t = i as f64 / 64.0;
        let v1 = (l1.value)(t);
        let v2 = (l2.value)(t);
        if !v1.is_finite() || !v2.is_finite() {
            return Err(bad(format!("curve not finite at t = {t}")));
        }
        if v1 == 0.0 || v2 == 0.0 {
            return Err(bad(format!("curve vanishes at t = {t}")));
        }
        if v1 == v2 {
            return Err(bad(format!("curves collide at t = {t}")));
        }
    }
    for c in [l1, l2] {
        let d = ((c.value)(1.0) - (c.value)(0.0)).abs();
        if d > 1e-12 * (1.0 + (c.value)(0.0).abs()) {
            return Err(bad(format!("curve is not 1-periodic (gap {d:.3e})")));
        }
    }
    Ok(())
}

/// Auxiliary function F(t, x) = −ln |(x−λ₁)(x−λ₂)x / (λ₁λ₂)| for a pair of
/// nonvanishing, disjoint, 1-periodic curves. Its partials are closed-form:
///   F_t = λ₁′/(x−λ₁) + λ₂′/(x−λ₂) + λ₁′/λ₁ + λ₂′/λ₂
///   F_x = −(1/(x−λ₁) + 1/(x−λ₂) + 1/x).
pub fn abel_aux(
    l1: &PeriodicCurve,
    l2: &PeriodicCurve,
) -> Result<AuxFunction, TransformError> {
    validate_curves(l1, l2)?;
    let (v1, d1) = (l1.value.clone(), l1.deriv.clone());
    let (v2, d2) = (l2.value.clone(), l2.deriv.clone());
    let f = {
        let (v1, v2) = (v1.clone(), v2.clone());
        Arc::new(move |t: f64, x: f64| {
            let (a, b) = (v1(t), v2(t));
            -((x - a) * (x - b) * x / (a * b)).abs().ln()
        })
    };
    let f_t = {
        let (v1, v2) = (v1.clone(), v2.clone());
        Arc::new(move |t: f64, x: f64| {
            let (a, b) = (v1(t), v2(t));
            let (da, db) = (d1(t), d2(t));
            da / (x - a) + db / (x - b) + da / a + db / b
        })
    };
    let f_x = Arc::new(move |t: f64, x: f64| {
        let (a, b) = (v1(t), v2(t));
        -(1.0 / (x - a) + 1.0 / (x - b) + 1.0 / x)
    });
    Ok(AuxFunction {
        f,
        f_t,
        f_x,
        domain: "x outside {0, λ₂(t), λ₁(t)}",
    })
}

/// Auxiliary function for the cylinder equation itself:
///   𝓕(θ, r) = −ln|b_m(θ)| + ln|b_n(θ) + b_m(θ) r| − 2 ln r − ln 2π,
/// defined for r > 0 off the curve b_n + b_m r = 0. Requires b_m
/// nonvanishing.
pub fn script_f(rs: &RadialSystem) -> Result<AuxFunction, TransformError> {
    if sign_analysis(&rs.b_m).strict_sign().is_none() {
        return Err(TransformError::CoefficientUndefined { name: "b_m" });
    }
    let ode = polar_equation(rs);
    let o1 = ode.clone();
    let o2 = ode.clone();
    let f = Arc::new(move |th: f64, r: f64| {
        -o1.b_m(th).abs().ln() + o1.denominator(th, r).abs().ln() - 2.0 * r.ln()
            - (2.0 * PI).ln()
    });
    let f_t = Arc::new(move |th: f64, r: f64| {
        -o2.b_m_dot(th) / o2.b_m(th)
            + (o2.b_n_dot(th) + o2.b_m_dot(th) * r) / o2.denominator(th, r)
    });
    let f_x = Arc::new(move |th: f64, r: f64| {
        ode.b_m(th) / ode.denominator(th, r) - 2.0 / r
    });
    Ok(AuxFunction {
        f,
        f_t,
        f_x,
        domain: "r > 0 with b_n(θ) + b_m(θ)·r ≠ 0",
    })
}

fn rel_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

/// Checks the transport identity of the Abel right-hand side S against the
/// auxiliary function of a curve pair (λ₁, λ₂):
///   S_x + F_t + F_x·S = f(x)·I_S / (λ₁ − λ₂),  f(x) = (x−λ₁)(x−λ₂)x,
///   I_S = −(S(τ,λ₁)−λ₁′)/λ₁/(x−λ₁)² + (S(τ,λ₂)−λ₂′)/λ₂/(x−λ₂)²
///         + W(λ₁,λ₂)/(λ₁λ₂(x−λ₁)(x−λ₂)),  W(λ₁,λ₂) = λ₁λ₂′ − λ₁′λ₂.
/// Returns the maximum relative residual over the samples (τ, x).
pub fn check_identity_12(
    ab: &AbelEquation,
    l1: &PeriodicCurve,
    l2: &PeriodicCurve,
    samples: &[(f64, f64)],
) -> Result<f64, TransformError> {
    let aux = abel_aux(l1, l2)?;
    let mut worst: f64 = 0.0;
    for &(tau, x) in samples {
        let a = (l1.value)(tau);
        let b = (l2.value)(tau);
        let da = (l1.deriv)(tau);
        let db = (l2.deriv)(tau);
        let s = ab.rhs(tau, x);
        let lhs = ab.rhs_rho(tau, x) + (aux.f_t)(tau, x) + (aux.f_x)(tau, x) * s;
        let wron = a * db - da * b;
        let i_s = -(ab.rhs(tau, a) - da) / a / ((x - a) * (x - a))
            + (ab.rhs(tau, b) - db) / b / ((x - b) * (x - b))
            + wron / (a * b * (x - a) * (x - b));
        let rhs = (x - a) * (x - b) * x * i_s / (a - b);
        worst = worst.max(rel_residual(lhs, rhs));
    }
    Ok(worst)
}

/// Checks the cylinder transport identity
///   R_r + 𝓕_θ + 𝓕_r·R = −b_m·Φ/(b_n + b_m r),
/// where Φ = (a_n b_m − b_n′ b_m + b_n b_m′)/b_m². Returns the maximum
/// relative residual over the samples (θ, r).
pub fn check_identity_19(
    rs: &RadialSystem,
    samples: &[(f64, f64)],
) -> Result<f64, TransformError> {
    let aux = script_f(rs)?;
    let ode = polar_equation(rs);
    let phi_num = TrigEval::new(&rs.phi_numerator());
    let mut worst: f64 = 0.0;
    for &(th, r) in samples {
        let lhs = ode.rhs_r(th, r) + (aux.f_t)(th, r) + (aux.f_x)(th, r) * ode.rhs(th, r);
        let bm = ode.b_m(th);
        let phi = phi_num.eval(th) / (bm * bm);
        let rhs = -bm * phi / ode.denominator(th, r);
        worst = worst.max(rel_residual(lhs, rhs));
    }
    Ok(worst)
}

/// Checks div(g·X̄) = −Φ/r² for the polar field X̄ and the density
/// g = (p cos²θ + q sin²θ)/(b_m · r^{2+(n−1)/(m−n)}). The divergence is
/// computed by central finite differences with step [`FD_STEP`]. Returns
/// the maximum relative residual over the samples (θ, r).
pub fn check_identity_prop26(
    rs: &RadialSystem,
    samples: &[(f64, f64)],
) -> Result<f64, TransformError> {
    if sign_analysis(&rs.b_m).strict_sign().is_none() {
        return Err(TransformError::CoefficientUndefined { name: "b_m" });
    }
    let sys = polar_system(rs);
    let ode = polar_equation(rs);
    let wf = TrigEval::new(&rs.weight_form());
    let phi_num = TrigEval::new(&rs.phi_numerator());
    let expo = rat_to_f64(&rs.r_exponent());
    let g = move |th: f64, r: f64| wf.eval(th) / (ode.b_m(th) * r.powf(2.0 + expo));
    let g_theta_dot = {
        let sys = sys.clone();
        let g = g.clone();
        move |th: f64, r: f64| g(th, r) * sys.theta_dot(th, r)
    };
    let g_r_dot = {
        let sys = sys.clone();
        let g = g.clone();
        move |th: f64, r: f64| g(th, r) * sys.r_dot(th, r)
    };
    let ode2 = polar_equation(rs);
    let mut worst: f64 = 0.0;
    for &(th, r) in samples {
        let h = FD_STEP;
        let div = (g_theta_dot(th + h, r) - g_theta_dot(th - h, r)) / (2.0 * h)
            + (g_r_dot(th, r + h) - g_r_dot(th, r - h)) / (2.0 * h);
        let bm = ode2.b_m(th);
        let phi = phi_num.eval(th) / (bm * bm);
        let rhs = -phi / (r * r);
        worst = worst.max(rel_residual(div, rhs));
    }
    Ok(worst)
}

/// Planar diffeomorphism with its Jacobian, for the divergence-transfer
/// checker.
#[derive(Clone)]
pub struct Diffeo {
    pub fwd: Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>,
    pub inv: Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>,
    /// Jacobian of `fwd` at a source point.
    pub jac: Arc<dyn Fn(f64, f64) -> [[f64; 2]; 2] + Send + Sync>,
}

/// Planar vector field as a closure.
#[derive(Clone)]
pub struct PlanarField {
    pub f: Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>,
}

/// Checks the divergence transfer law under a diffeomorphism T:
/// with P ∘ T = DT·Q and F̄ = ln|det DT| + F∘T,
///   (div P + D_P F) ∘ T = div Q + D_Q F̄.
/// All derivatives (divergences and directional derivatives alike) are
/// central finite differences with step [`FD_STEP`], keeping the checker
/// independent of any closed-form partials. Samples are source-side points;
/// returns the maximum relative residual.
pub fn divergence_transfer_check(
    t: &Diffeo,
    f: &AuxFunction,
    q: &PlanarField,
    samples: &[(f64, f64)],
) -> Result<f64, TransformError> {
    let h = FD_STEP;
    // P(y) = DT(T⁻¹y) · Q(T⁻¹y)
    let p_field = {
        let inv = t.inv.clone();
        let jac = t.jac.clone();
        let q = q.f.clone();
        move |y1: f64, y2: f64| -> (f64, f64) {
            let (x1, x2) = inv(y1, y2);
            let j = jac(x1, x2);
            let (q1, q2) = q(x1, x2);
            (j[0][0] * q1 + j[0][1] * q2, j[1][0] * q1 + j[1][1] * q2)
        }
    };
    let det = |j: &[[f64; 2]; 2]| j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let mut worst: f64 = 0.0;
    for &(x1, x2) in samples {
        let j = (t.jac)(x1, x2);
        let d = det(&j);
        if d.abs() < 1e-12 {
            return Err(TransformError::SingularJacobian { x: x1, y: x2, det: d });
        }
        let (y1, y2) = (t.fwd)(x1, x2);
        // left side, evaluated at T(x)
        let div_p = (p_field(y1 + h, y2).0 - p_field(y1 - h, y2).0) / (2.0 * h)
            + (p_field(y1, y2 + h).1 - p_field(y1, y2 - h).1) / (2.0 * h);
        let (p1, p2) = p_field(y1, y2);
        let fgrad = (
            ((f.f)(y1 + h, y2) - (f.f)(y1 - h, y2)) / (2.0 * h),
            ((f.f)(y1, y2 + h) - (f.f)(y1, y2 - h)) / (2.0 * h),
        );
        let lhs = div_p + p1 * fgrad.0 + p2 * fgrad.1;
        // right side, evaluated at x
        let fbar = {
            let fwd = t.fwd.clone();
            let jac = t.jac.clone();
            let ff = f.f.clone();
            move |x1: f64, x2: f64| {
                let j = jac(x1, x2);
                let (y1, y2) = fwd(x1, x2);
                (j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs().ln() + ff(y1, y2)
            }
        };
        let (q1, q2) = (q.f)(x1, x2);
        let div_q = ((q.f)(x1 + h, x2).0 - (q.f)(x1 - h, x2).0) / (2.0 * h)
            + ((q.f)(x1, x2 + h).1 - (q.f)(x1, x2 - h).1) / (2.0 * h);
        let fbar_grad = (
            (fbar(x1 + h, x2) - fbar(x1 - h, x2)) / (2.0 * h),
            (fbar(x1, x2 + h) - fbar(x1, x2 - h)) / (2.0 * h),
        );
        let rhs = div_q + q1 * fbar_grad.0 + q2 * fbar_grad.1;
        worst = worst.max(rel_residual(lhs, rhs));
    }
    Ok(worst)
}

/// Pointwise consistency of the Abel reduction along the flow: with
/// ρ(θ, r) = b_m r/(b_n + b_m r), the chain rule along dr/dθ = R demands
///   2π (ρ_θ + ρ_r·R) = S(θ/2π, ρ).
/// Returns the maximum relative residual over samples (θ, r).
pub fn cherkas_transport_residual(
    ab: &AbelEquation,
    rs: &RadialSystem,
    samples: &[(f64, f64)],
) -> f64 {
    let ode = polar_equation(rs);
    let mut worst: f64 = 0.0;
    for &(th, r) in samples {
        let bn = ode.b_n(th);
        let bm = ode.b_m(th);
        let bnd = ode.b_n_dot(th);
        let bmd = ode.b_m_dot(th);
        let den = bn + bm * r;
        let rho = bm * r / den;
        let rho_r = bm * bn / (den * den);
        let rho_th = r * (bmd * bn - bm * bnd) / (den * den);
        let lhs = 2.0 * PI * (rho_th + rho_r * ode.rhs(th, r));
        let rhs = ab.rhs(th / (2.0 * PI), rho);
        worst = worst.max(rel_residual(lhs, rhs));
    }
    worst
}

/// Exact sign certificate for the ε-level expansion question: does
/// sign S(τ, ε) = sign(ε·(b_m/b_n)·Φ) hold for all τ at this fixed ε?
/// Writing S(τ, ε) = ε·2π·T_ε(θ)/(b_n b_m) with
/// T_ε = α₃-num·ε² + α₂-num·ε + α₁-num, the signs agree everywhere iff
/// T_ε·Φ-num is strictly positive on the circle, which is decidable
/// exactly. Returns that product's sign report.
pub fn eps_expansion_sign_check(ab: &AbelEquation, eps: &Rat) -> SignReport {
    let eps2 = eps * eps;
    let t_eps = &(&ab.alpha3_num.scale(&eps2) + &ab.alpha2_num.scale(eps)) + &ab.alpha1_num;
    sign_analysis(&(&t_eps * &ab.alpha1_num))
}

/// Draws (θ, r) samples on the cylinder with r log-uniform in
/// [r_lo, r_hi], rejecting points within the relative margin of the
/// excluded curve b_n + b_m r = 0. Deterministic for a fixed seed.
pub fn sample_cylinder(
    rs: &RadialSystem,
    count: usize,
    seed: u64,
    r_lo: f64,
    r_hi: f64,
) -> Vec<(f64, f64)> {
    let ode = polar_equation(rs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 200 {
        attempts += 1;
        let th = rng.gen_range(0.0..2.0 * PI);
        let r = r_lo * (r_hi / r_lo).powf(rng.gen_range(0.0..1.0));
        if ode.denominator(th, r).abs() > SAMPLE_MARGIN * ode.denominator_scale(th, r)
            && r > SAMPLE_MARGIN
        {
            out.push((th, r));
        }
    }
    out
}

/// Draws (t, x) samples in a box, keeping |x − a| > margin for every
/// excluded level a. Deterministic for a fixed seed.
pub fn sample_box(
    count: usize,
    seed: u64,
    t_range: (f64, f64),
    x_range: (f64, f64),
    avoid: &[f64],
    margin: f64,
) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 200 {
        attempts += 1;
        let t = rng.gen_range(t_range.0..t_range.1);
        let x = rng.gen_range(x_range.0..x_range.1);
        if avoid.iter().all(|a| (x - a).abs() > margin) {
            out.push((t, x));
        }
    }
    out
}
