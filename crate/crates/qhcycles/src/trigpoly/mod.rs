//! Trigonometric polynomials with exact rational coefficients, plus a sign
//! certification engine.
//!
//! Everything the uniqueness criteria consume is a finite Fourier sum
//! `c0 + Σ_k (c_k cos kθ + s_k sin kθ)` over `BigRational`. Products are
//! expanded back into canonical Fourier form, so equality of coefficients is
//! equality of functions. [`sign_analysis`] decides the sign of such a sum on
//! the whole circle exactly; see [`sign`] for the method.

mod sign;
mod unipoly;

pub use sign::{sign_analysis, SignReport, SignVerdict, Witness, ZeroInterval};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{ToPrimitive, Zero};

use crate::vectorfield::PolyXY;
use crate::Rat;

/// Converts a rational to f64, guarding against numerator and denominator
/// both overflowing f64 range (which would give inf/inf = NaN). Keeps at
/// least 96 bits on the smaller operand, so the result is correct to well
/// below 1e-20 relative error whenever it is representable at all.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().min(d.bits()).saturating_sub(96);
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

/// Trigonometric polynomial in canonical form.
///
/// `cos[k-1]` and `sin[k-1]` hold the coefficients of `cos(kθ)` and
/// `sin(kθ)`. Invariant: both vectors have the same length and the top
/// harmonic has at least one nonzero entry, so `==` compares functions.
#[derive(Clone, PartialEq, Eq)]
pub struct TrigPoly {
    constant: Rat,
    cos: Vec<Rat>,
    sin: Vec<Rat>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly {
            constant: Rat::zero(),
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        TrigPoly {
            constant: c,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rat::from_integer(1.into()))
    }

    /// `c · cos(kθ)`; `k = 0` folds into the constant term.
    pub fn cos_harmonic(k: usize, c: Rat) -> Self {
        let mut t = TrigPoly::zero();
        t.add_cos(k, c);
        t.normalize();
        t
    }

    /// `c · sin(kθ)`; `sin(0θ)` is dropped.
    pub fn sin_harmonic(k: usize, c: Rat) -> Self {
        let mut t = TrigPoly::zero();
        t.add_sin(k, c);
        t.normalize();
        t
    }

    /// Highest harmonic present; 0 for constants.
    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.cos.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.cos.is_empty()
    }

    pub fn constant_term(&self) -> &Rat {
        &self.constant
    }

    /// Coefficient of `cos(kθ)` for `k ≥ 1` (zero when absent).
    pub fn cos_coeff(&self, k: usize) -> Rat {
        assert!(k >= 1, "harmonic index starts at 1");
        self.cos.get(k - 1).cloned().unwrap_or_else(Rat::zero)
    }

    /// Coefficient of `sin(kθ)` for `k ≥ 1` (zero when absent).
    pub fn sin_coeff(&self, k: usize) -> Rat {
        assert!(k >= 1, "harmonic index starts at 1");
        self.sin.get(k - 1).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn cos_coeffs(&self) -> &[Rat] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[Rat] {
        &self.sin
    }

    fn add_cos(&mut self, k: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        if k == 0 {
            self.constant += c;
            return;
        }
        self.grow(k);
        self.cos[k - 1] += c;
    }

    fn add_sin(&mut self, k: usize, c: Rat) {
        if k == 0 || c.is_zero() {
            return;
        }
        self.grow(k);
        self.sin[k - 1] += c;
    }

    fn grow(&mut self, k: usize) {
        while self.cos.len() < k {
            self.cos.push(Rat::zero());
            self.sin.push(Rat::zero());
        }
    }

    fn normalize(&mut self) {
        while let (Some(c), Some(s)) = (self.cos.last(), self.sin.last()) {
            if c.is_zero() && s.is_zero() {
                self.cos.pop();
                self.sin.pop();
            } else {
                break;
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> TrigPoly {
        if c.is_zero() {
            return TrigPoly::zero();
        }
        TrigPoly {
            constant: &self.constant * c,
            cos: self.cos.iter().map(|x| x * c).collect(),
            sin: self.sin.iter().map(|x| x * c).collect(),
        }
    }

    /// Termwise derivative: d/dθ (c cos kθ + s sin kθ) = ks cos kθ − kc sin kθ.
    pub fn differentiate(&self) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (i, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = i + 1;
            let kr = Rat::from_integer(k.into());
            out.add_cos(k, s * &kr);
            out.add_sin(k, -(c * &kr));
        }
        out.normalize();
        out
    }

    /// Floating-point evaluation. Coefficients are converted on each call;
    /// hot loops should precompute an evaluator (see `transforms`).
    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = rat_to_f64(&self.constant);
        for (i, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = (i + 1) as f64;
            acc += rat_to_f64(c) * (k * theta).cos() + rat_to_f64(s) * (k * theta).sin();
        }
        acc
    }

    /// Exact value at θ = π: sin terms vanish, cos(kπ) = (−1)^k.
    pub fn eval_at_pi(&self) -> Rat {
        let mut acc = self.constant.clone();
        for (i, c) in self.cos.iter().enumerate() {
            if (i + 1) % 2 == 0 {
                acc += c;
            } else {
                acc -= c;
            }
        }
        acc
    }

    /// Iterates harmonics as (k, cos coeff, sin coeff) with k = 0 first.
    fn harmonics(&self) -> impl Iterator<Item = (usize, &Rat, &Rat)> {
        static ZERO_HOLDER: std::sync::OnceLock<Rat> = std::sync::OnceLock::new();
        let zero = ZERO_HOLDER.get_or_init(Rat::zero);
        std::iter::once((0usize, &self.constant, zero)).chain(
            self.cos
                .iter()
                .zip(&self.sin)
                .enumerate()
                .map(|(i, (c, s))| (i + 1, c, s)),
        )
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        out.constant += &rhs.constant;
        for (i, (c, s)) in rhs.cos.iter().zip(&rhs.sin).enumerate() {
            out.add_cos(i + 1, c.clone());
            out.add_sin(i + 1, s.clone());
        }
        out.normalize();
        out
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        TrigPoly {
            constant: -self.constant.clone(),
            cos: self.cos.iter().map(|c| -c.clone()).collect(),
            sin: self.sin.iter().map(|s| -s.clone()).collect(),
        }
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;

    /// Product-to-sum expansion. For harmonics j and k:
    ///   cos j cos k = ½[cos(j−k) + cos(j+k)]
    ///   sin j sin k = ½[cos(j−k) − cos(j+k)]
    ///   sin j cos k = ½[sin(j+k) + sin(j−k)]
    /// with cos(−u) = cos u and sin(−u) = −sin u folding negative indices.
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let half = Rat::new(1.into(), 2.into());
        let mut out = TrigPoly::zero();
        for (j, aj, bj) in self.harmonics() {
            for (k, ck, dk) in rhs.harmonics() {
                let sum = j + k;
                let (diff, diff_flip) = if j >= k { (j - k, false) } else { (k - j, true) };
                if !aj.is_zero() && !ck.is_zero() {
                    let v = aj * ck * &half;
                    out.add_cos(diff, v.clone());
                    out.add_cos(sum, v);
                }
                if !bj.is_zero() && !dk.is_zero() {
                    let v = bj * dk * &half;
                    out.add_cos(diff, v.clone());
                    out.add_cos(sum, -v);
                }
                if !bj.is_zero() && !ck.is_zero() {
                    // sin j cos k: sin(j−k) keeps the sign of j−k.
                    let v = bj * ck * &half;
                    out.add_sin(sum, v.clone());
                    out.add_sin(diff, if diff_flip { -v } else { v });
                }
                if !aj.is_zero() && !dk.is_zero() {
                    // cos j sin k = ½[sin(j+k) − sin(j−k)]
                    let v = aj * dk * &half;
                    out.add_sin(sum, v.clone());
                    out.add_sin(diff, if diff_flip { v } else { -v });
                }
            }
        }
        out.normalize();
        out
    }
}

/// Restriction of a polynomial in (x, y) to the unit circle, expanded into
/// canonical Fourier form: x^i y^j ↦ cos^i θ sin^j θ.
pub fn from_poly_on_circle(p: &PolyXY) -> TrigPoly {
    let cos1 = TrigPoly::cos_harmonic(1, Rat::from_integer(1.into()));
    let sin1 = TrigPoly::sin_harmonic(1, Rat::from_integer(1.into()));
    let max_i = p.terms().map(|((i, _), _)| i).max().unwrap_or(0) as usize;
    let max_j = p.terms().map(|((_, j), _)| j).max().unwrap_or(0) as usize;
    let mut cos_pows = Vec::with_capacity(max_i + 1);
    let mut sin_pows = Vec::with_capacity(max_j + 1);
    cos_pows.push(TrigPoly::one());
    sin_pows.push(TrigPoly::one());
    for i in 1..=max_i {
        let next = &cos_pows[i - 1] * &cos1;
        cos_pows.push(next);
    }
    for j in 1..=max_j {
        let next = &sin_pows[j - 1] * &sin1;
        sin_pows.push(next);
    }
    let mut out = TrigPoly::zero();
    for ((i, j), c) in p.terms() {
        let term = &cos_pows[i as usize] * &sin_pows[j as usize];
        out = &out + &term.scale(c);
    }
    out
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        let mut put = |f: &mut fmt::Formatter<'_>, coeff: &Rat, unit: &str| -> fmt::Result {
            if coeff.is_zero() {
                return Ok(());
            }
            let neg = coeff < &Rat::zero();
            let mag = if neg { -coeff.clone() } else { coeff.clone() };
            if wrote {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            wrote = true;
            if unit.is_empty() {
                write!(f, "{mag}")
            } else if mag == Rat::from_integer(1.into()) {
                write!(f, "{unit}")
            } else {
                write!(f, "{mag}·{unit}")
            }
        };
        put(f, &self.constant, "")?;
        for (i, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = i + 1;
            put(f, c, &format!("cos({k}θ)"))?;
            put(f, s, &format!("sin({k}θ)"))?;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TrigPoly {
    // Debug formatting shared with Display keeps assertion diffs readable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn tp_cos(k: usize, n: i64, d: i64) -> TrigPoly {
        TrigPoly::cos_harmonic(k, rat(n, d))
    }

    fn tp_sin(k: usize, n: i64, d: i64) -> TrigPoly {
        TrigPoly::sin_harmonic(k, rat(n, d))
    }

    /// Dense float comparison against direct evaluation of a closure.
    fn assert_matches_fn(t: &TrigPoly, f: impl Fn(f64) -> f64, tol: f64) {
        for i in 0..64 {
            let th = 2.0 * std::f64::consts::PI * (i as f64) / 64.0 + 0.0137;
            let got = t.eval(th);
            let want = f(th);
            assert!(
                (got - want).abs() <= tol * (1.0 + want.abs()),
                "mismatch at θ={th}: got {got}, want {want}\n poly: {t}"
            );
        }
    }

    #[test]
    fn product_to_sum_cos_squared() {
        // cos²θ = 1/2 + 1/2 cos 2θ
        let c = tp_cos(1, 1, 1);
        let sq = &c * &c;
        let want = &TrigPoly::constant(rat(1, 2)) + &tp_cos(2, 1, 2);
        assert_eq!(sq, want);
    }

    #[test]
    fn product_to_sum_sin_cos() {
        // sinθ cosθ = 1/2 sin 2θ
        let prod = &tp_sin(1, 1, 1) * &tp_cos(1, 1, 1);
        assert_eq!(prod, tp_sin(2, 1, 2));
        // order must not matter
        let prod2 = &tp_cos(1, 1, 1) * &tp_sin(1, 1, 1);
        assert_eq!(prod2, tp_sin(2, 1, 2));
    }

    #[test]
    fn product_mixed_harmonics() {
        // sin 3θ cos 2θ = 1/2 (sin 5θ + sin θ); cos 2θ sin 3θ identical.
        let want = &tp_sin(5, 1, 2) + &tp_sin(1, 1, 2);
        assert_eq!(&tp_sin(3, 1, 1) * &tp_cos(2, 1, 1), want);
        // sin 2θ cos 3θ = 1/2 (sin 5θ + sin(−θ)) = 1/2 sin 5θ − 1/2 sin θ
        let want2 = &tp_sin(5, 1, 2) - &tp_sin(1, 1, 2);
        assert_eq!(&tp_sin(2, 1, 1) * &tp_cos(3, 1, 1), want2);
    }

    #[test]
    fn mul_matches_pointwise_product() {
        let a = &(&tp_cos(2, 3, 4) + &tp_sin(1, -2, 3)) + &TrigPoly::constant(rat(1, 5));
        let b = &(&tp_sin(3, 7, 2) + &tp_cos(1, 1, 6)) + &TrigPoly::constant(rat(-4, 7));
        let prod = &a * &b;
        let (ac, bc) = (a.clone(), b.clone());
        assert_matches_fn(&prod, move |th| ac.eval(th) * bc.eval(th), 1e-12);
    }

    #[test]
    fn sin_fourth_power_reduction() {
        // sin⁴θ = 3/8 − 1/2 cos 2θ + 1/8 cos 4θ
        let s = tp_sin(1, 1, 1);
        let s4 = &(&s * &s) * &(&s * &s);
        let want = &(&TrigPoly::constant(rat(3, 8)) - &tp_cos(2, 1, 2)) + &tp_cos(4, 1, 8);
        assert_eq!(s4, want);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let t = &(&tp_cos(3, 2, 1) + &tp_sin(5, -1, 3)) + &TrigPoly::constant(rat(9, 2));
        let d = t.differentiate();
        let h = 1e-6;
        let tc = t.clone();
        assert_matches_fn(&d, move |th| (tc.eval(th + h) - tc.eval(th - h)) / (2.0 * h), 1e-8);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(TrigPoly::constant(rat(7, 3)).differentiate().is_zero());
    }

    #[test]
    fn eval_at_pi_exact() {
        // 1 + 2cosθ − 3cos2θ + 5sin7θ at π: 1 − 2 − 3 = −4
        let t = &(&(&TrigPoly::one() + &tp_cos(1, 2, 1)) - &tp_cos(2, 3, 1)) + &tp_sin(7, 5, 1);
        assert_eq!(t.eval_at_pi(), rat(-4, 1));
        assert!((t.eval(std::f64::consts::PI) - (-4.0)).abs() < 1e-12);
    }

    #[test]
    fn normalization_strips_cancelled_top_harmonic() {
        let a = &tp_cos(5, 1, 1) + &tp_cos(2, 1, 3);
        let b = tp_cos(5, 1, 1);
        let diff = &a - &b;
        assert_eq!(diff.degree(), 2);
        assert_eq!(diff, tp_cos(2, 1, 3));
    }

    #[test]
    fn circle_restriction_power_reduction() {
        // 2x² + y⁴ on the circle: 11/8 + 1/2 cos 2θ + 1/8 cos 4θ.
        // Cross-checked against direct substitution below.
        let p = PolyXY::from_terms(vec![((2, 0), rat(2, 1)), ((0, 4), rat(1, 1))]);
        let t = from_poly_on_circle(&p);
        let want = &(&TrigPoly::constant(rat(11, 8)) + &tp_cos(2, 1, 2)) + &tp_cos(4, 1, 8);
        assert_eq!(t, want);
        assert_matches_fn(
            &t,
            |th| 2.0 * th.cos().powi(2) + th.sin().powi(4),
            1e-12,
        );
    }

    #[test]
    fn circle_restriction_of_odd_poly() {
        // x³ − xy: cos³θ − cosθ sinθ = 3/4 cosθ + 1/4 cos3θ − 1/2 sin2θ
        let p = PolyXY::from_terms(vec![((3, 0), rat(1, 1)), ((1, 1), rat(-1, 1))]);
        let t = from_poly_on_circle(&p);
        assert_matches_fn(&t, |th| th.cos().powi(3) - th.cos() * th.sin(), 1e-12);
        assert_eq!(t.cos_coeff(1), rat(3, 4));
        assert_eq!(t.cos_coeff(3), rat(1, 4));
        assert_eq!(t.sin_coeff(2), rat(-1, 2));
    }

    #[test]
    fn display_roundtrips_signs() {
        let t = &(&TrigPoly::constant(rat(-1, 2)) + &tp_cos(2, 1, 1)) - &tp_sin(3, 5, 4);
        assert_eq!(format!("{t}"), "-1/2 + cos(2θ) - 5/4·sin(3θ)");
    }
}
