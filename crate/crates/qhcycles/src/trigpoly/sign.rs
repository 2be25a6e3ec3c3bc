//! Exact sign certification for trigonometric polynomials on the circle.
//!
//! The half-angle substitution t = tan(θ/2) maps θ ∈ (−π, π) to the real
//! line: with cos kθ + i sin kθ = (1+it)^{2k} / (1+t²)^k, a degree-d sum f
//! satisfies f(θ(t)) · (1+t²)^d = N(t) for a polynomial N with the same
//! rational coefficients arithmetic. Since (1+t²)^d > 0, signs and zeros of
//! f on (−π, π) are exactly those of N on ℝ, which Sturm sequences decide.
//! θ = π is handled separately: f(π) is an alternating coefficient sum, and
//! the sign change across π is the parity of deg N (the sign of N at +∞
//! versus −∞).
//!
//! Zeros are reported as isolating rational θ-intervals of width < 2⁻²⁰;
//! angles are taken modulo 2π in (−π, π]. Witness angles carry an exactly
//! certified sign even when the floating-point value underflows.

use num_traits::{Signed, Zero};

use super::unipoly::{isolate_real_roots, RootRegion, UniPoly};
use super::{rat_to_f64, TrigPoly};
use crate::Rat;

/// Sign of a trigonometric polynomial over the whole circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignVerdict {
    IdenticallyZero,
    Positive,
    Negative,
    NonNegativeWithZeros,
    NonPositiveWithZeros,
    ChangesSign,
}

/// Isolating interval for one zero. `crossing` records whether the function
/// changes sign there (odd multiplicity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroInterval {
    pub theta_lo: Rat,
    pub theta_hi: Rat,
    pub crossing: bool,
}

impl ZeroInterval {
    /// Interval bounds rounded to f64, for display and reports.
    pub fn bounds_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.theta_lo), rat_to_f64(&self.theta_hi))
    }
}

/// Sample angle together with the function value there. The *sign* of the
/// witness is certified exactly; the value is informational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub verdict: SignVerdict,
    /// Disjoint isolating intervals, one per distinct zero, ascending in
    /// (−π, π].
    pub zeros: Vec<ZeroInterval>,
    pub positive_witness: Option<Witness>,
    pub negative_witness: Option<Witness>,
}

impl SignReport {
    /// +1 / −1 when the function is strictly one-signed, None otherwise.
    pub fn strict_sign(&self) -> Option<i8> {
        match self.verdict {
            SignVerdict::Positive => Some(1),
            SignVerdict::Negative => Some(-1),
            _ => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        matches!(
            self.verdict,
            SignVerdict::Positive | SignVerdict::NonNegativeWithZeros | SignVerdict::IdenticallyZero
        )
    }

    pub fn changes_sign(&self) -> bool {
        self.verdict == SignVerdict::ChangesSign
    }
}

/// f(θ(t)) · (1+t²)^d expanded in t. The coefficient of t^{2d} equals f(π),
/// so the degree drops exactly when π is a zero.
fn half_angle_numerator(f: &TrigPoly) -> UniPoly {
    let d = f.degree();
    let one_t2 = UniPoly::new(vec![Rat::from_integer(1.into()), Rat::zero(), Rat::from_integer(1.into())]);
    let mut pw = Vec::with_capacity(d + 1);
    pw.push(UniPoly::one());
    for i in 1..=d {
        let next = pw[i - 1].mul(&one_t2);
        pw.push(next);
    }
    let mut acc = pw[d].scale(f.constant_term());
    // (re, im) of (1+it)^j, advanced two powers per harmonic:
    // re ← re − t·im, im ← im + t·re.
    let mut re = UniPoly::one();
    let mut im = UniPoly::zero();
    for k in 1..=d {
        for _ in 0..2 {
            let re2 = re.add(&im.shift_up().scale(&-Rat::from_integer(1.into())));
            let im2 = im.add(&re.shift_up());
            re = re2;
            im = im2;
        }
        let ck = f.cos_coeff(k);
        let sk = f.sin_coeff(k);
        if !ck.is_zero() {
            acc = acc.add(&re.scale(&ck).mul(&pw[d - k]));
        }
        if !sk.is_zero() {
            acc = acc.add(&im.scale(&sk).mul(&pw[d - k]));
        }
    }
    acc
}

fn sign_of(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// One isolated t-root under refinement. Exact roots shrink a symmetric
/// window; cells bisect on the square-free polynomial, whose endpoint signs
/// always differ across a simple root.
enum TRoot {
    Exact { c: Rat, w: Rat },
    Cell { lo: Rat, hi: Rat, sign_lo: i8 },
}

impl TRoot {
    fn lo(&self) -> Rat {
        match self {
            TRoot::Exact { c, w } => c - w,
            TRoot::Cell { lo, .. } => lo.clone(),
        }
    }

    fn hi(&self) -> Rat {
        match self {
            TRoot::Exact { c, w } => c + w,
            TRoot::Cell { hi, .. } => hi.clone(),
        }
    }

    fn refine(&mut self, nsf: &UniPoly) {
        let two = Rat::from_integer(2.into());
        match self {
            TRoot::Exact { w, .. } => *w = &*w / &two,
            TRoot::Cell { lo, hi, sign_lo } => {
                let mid = (&*lo + &*hi) / &two;
                let sm = sign_of(&nsf.eval(&mid));
                if sm == 0 {
                    let w = (&mid - &*lo).min(&*hi - &mid) / &two;
                    *self = TRoot::Exact { c: mid, w };
                } else if sm != *sign_lo {
                    *hi = mid;
                } else {
                    *lo = mid;
                }
            }
        }
    }

    fn theta_lo_f64(&self) -> f64 {
        2.0 * rat_to_f64(&self.lo()).atan()
    }

    fn theta_hi_f64(&self) -> f64 {
        2.0 * rat_to_f64(&self.hi()).atan()
    }
}

/// Target width of reported θ-intervals.
const THETA_WIDTH: f64 = 1.0 / (1 << 21) as f64;
/// Outward padding absorbing rational→float→rational rounding (≤ a few ulp
/// of values bounded by π, so 2⁻⁴⁰ is generous).
const PAD_LOG2: i64 = 40;

fn pad_rat(log2: i64) -> Rat {
    debug_assert!((0..63).contains(&log2));
    Rat::new(1.into(), num_bigint::BigInt::from(1u64 << log2))
}

fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// Decides the sign of `f` over the whole circle, exactly.
pub fn sign_analysis(f: &TrigPoly) -> SignReport {
    if f.is_zero() {
        return SignReport {
            verdict: SignVerdict::IdenticallyZero,
            zeros: Vec::new(),
            positive_witness: None,
            negative_witness: None,
        };
    }
    let d = f.degree();
    let n = half_angle_numerator(f);
    let f_pi = f.eval_at_pi();
    debug_assert!(
        (n.degree() == Some(2 * d)) == !f_pi.is_zero(),
        "leading coefficient of the half-angle numerator must equal f(π)"
    );
    debug_assert!(!n.is_zero(), "nonzero f cannot vanish on all of (−π, π)");

    // Isolate and refine the t-roots.
    let mut roots: Vec<TRoot> = Vec::new();
    let nsf = n.square_free();
    if nsf.degree().map_or(false, |deg| deg >= 1) {
        let regions = isolate_real_roots(&nsf);
        let bound = nsf.cauchy_bound();
        let far_lo = -(&bound + Rat::from_integer(1.into()));
        let far_hi = &bound + Rat::from_integer(1.into());
        let lo_of = |r: &RootRegion| match r {
            RootRegion::Exact(c) => c.clone(),
            RootRegion::Cell { lo, .. } => lo.clone(),
        };
        let hi_of = |r: &RootRegion| match r {
            RootRegion::Exact(c) => c.clone(),
            RootRegion::Cell { hi, .. } => hi.clone(),
        };
        for (i, reg) in regions.iter().enumerate() {
            match reg {
                RootRegion::Exact(c) => {
                    let left = if i == 0 { far_lo.clone() } else { hi_of(&regions[i - 1]) };
                    let right = if i + 1 == regions.len() {
                        far_hi.clone()
                    } else {
                        lo_of(&regions[i + 1])
                    };
                    let w = (c - &left).min(&right - c) / Rat::from_integer(2.into());
                    debug_assert!(w.is_positive());
                    roots.push(TRoot::Exact { c: c.clone(), w });
                }
                RootRegion::Cell { lo, hi } => {
                    let sign_lo = sign_of(&nsf.eval(lo));
                    debug_assert!(sign_lo != 0);
                    roots.push(TRoot::Cell {
                        lo: lo.clone(),
                        hi: hi.clone(),
                        sign_lo,
                    });
                }
            }
        }
    }
    for r in roots.iter_mut() {
        while r.theta_hi_f64() - r.theta_lo_f64() >= THETA_WIDTH {
            r.refine(&nsf);
        }
    }

    // Push reported intervals apart until they are disjoint after padding.
    // True roots are distinct reals, so this terminates; the cap only guards
    // adversarial coefficient sizes.
    let pad_f = 1.0 / (1u64 << PAD_LOG2) as f64;
    let mut pi_pad_log2 = PAD_LOG2;
    for _ in 0..500 {
        let mut any = false;
        for i in 1..roots.len() {
            if roots[i].theta_lo_f64() - roots[i - 1].theta_hi_f64() <= 2.0 * pad_f {
                roots[i - 1].refine(&nsf);
                roots[i].refine(&nsf);
                any = true;
            }
        }
        if f_pi.is_zero() {
            if let Some(last) = roots.last_mut() {
                let pi_lo = std::f64::consts::PI - 2.0 / (1u64 << pi_pad_log2) as f64;
                if last.theta_hi_f64() + pad_f >= pi_lo {
                    last.refine(&nsf);
                    if pi_pad_log2 < 48 {
                        pi_pad_log2 += 1;
                    }
                    any = true;
                }
            }
        }
        if !any {
            break;
        }
    }

    // Sign regions: gaps between consecutive roots plus the two unbounded
    // ends, which meet at θ = π.
    let mut region_tests: Vec<Rat> = Vec::new();
    if roots.is_empty() {
        region_tests.push(Rat::zero());
    } else {
        region_tests.push(roots[0].lo() - Rat::from_integer(1.into()));
        for i in 1..roots.len() {
            region_tests.push((roots[i - 1].hi() + roots[i].lo()) / Rat::from_integer(2.into()));
        }
        region_tests.push(roots[roots.len() - 1].hi() + Rat::from_integer(1.into()));
    }

    let mut has_pos = false;
    let mut has_neg = false;
    let mut positive_witness: Option<Witness> = None;
    let mut negative_witness: Option<Witness> = None;
    let mut consider = |sign: i8, theta: f64, value: f64| {
        let slot = if sign > 0 {
            has_pos = true;
            &mut positive_witness
        } else {
            has_neg = true;
            &mut negative_witness
        };
        if slot.as_ref().map_or(true, |w| value.abs() > w.value.abs()) {
            *slot = Some(Witness { theta, value });
        }
    };
    for t in &region_tests {
        let s = sign_of(&n.eval(t));
        debug_assert!(s != 0, "region test point landed on a root");
        let theta = 2.0 * rat_to_f64(t).atan();
        consider(s, theta, f.eval(theta));
    }
    let s_pi = sign_of(&f_pi);
    if s_pi != 0 {
        consider(s_pi, std::f64::consts::PI, rat_to_f64(&f_pi));
    }

    // Zero list: θ-intervals for t-roots, then π if f(π) = 0.
    let pad = pad_rat(PAD_LOG2);
    let mut zeros: Vec<ZeroInterval> = Vec::new();
    for r in &roots {
        let n_lo = sign_of(&n.eval(&r.lo()));
        let n_hi = sign_of(&n.eval(&r.hi()));
        debug_assert!(n_lo != 0 && n_hi != 0);
        zeros.push(ZeroInterval {
            theta_lo: rat_from_f64(r.theta_lo_f64()) - &pad,
            theta_hi: rat_from_f64(r.theta_hi_f64()) + &pad,
            crossing: n_lo != n_hi,
        });
    }
    if f_pi.is_zero() {
        let deg = n.degree().expect("nonzero numerator");
        let pi_rat = rat_from_f64(std::f64::consts::PI);
        let pi_pad = pad_rat(pi_pad_log2);
        zeros.push(ZeroInterval {
            theta_lo: &pi_rat - &pi_pad,
            theta_hi: &pi_rat + &pi_pad,
            // sign(N) at +∞ vs −∞ differs exactly when deg N is odd
            crossing: deg % 2 == 1,
        });
    }

    let verdict = match (has_pos, has_neg, zeros.is_empty()) {
        (true, true, _) => SignVerdict::ChangesSign,
        (true, false, true) => SignVerdict::Positive,
        (true, false, false) => SignVerdict::NonNegativeWithZeros,
        (false, true, true) => SignVerdict::Negative,
        (false, true, false) => SignVerdict::NonPositiveWithZeros,
        (false, false, _) => unreachable!("nonzero trig polynomial with no signed region"),
    };
    debug_assert!(
        (verdict == SignVerdict::ChangesSign) == zeros.iter().any(|z| z.crossing),
        "crossing flags must agree with the two-sided verdict"
    );

    SignReport {
        verdict,
        zeros,
        positive_witness,
        negative_witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn tp(constant: (i64, i64), cos: &[(usize, i64, i64)], sin: &[(usize, i64, i64)]) -> TrigPoly {
        let mut t = TrigPoly::constant(rat(constant.0, constant.1));
        for &(k, n, d) in cos {
            t = &t + &TrigPoly::cos_harmonic(k, rat(n, d));
        }
        for &(k, n, d) in sin {
            t = &t + &TrigPoly::sin_harmonic(k, rat(n, d));
        }
        t
    }

    fn assert_zero_located(report: &SignReport, theta_star: f64) {
        let hit = report.zeros.iter().any(|z| {
            rat_to_f64(&z.theta_lo) <= theta_star && theta_star <= rat_to_f64(&z.theta_hi)
        });
        assert!(hit, "no isolating interval contains θ = {theta_star}\n{report:?}");
    }

    #[test]
    fn constant_signs() {
        assert_eq!(sign_analysis(&tp((3, 1), &[], &[])).verdict, SignVerdict::Positive);
        assert_eq!(sign_analysis(&tp((-2, 7), &[], &[])).verdict, SignVerdict::Negative);
        assert_eq!(sign_analysis(&TrigPoly::zero()).verdict, SignVerdict::IdenticallyZero);
    }

    #[test]
    fn strictly_positive_with_harmonics() {
        // 2 + cos 2θ ≥ 1
        let r = sign_analysis(&tp((2, 1), &[(2, 1, 1)], &[]));
        assert_eq!(r.verdict, SignVerdict::Positive);
        assert!(r.zeros.is_empty());
        let w = r.positive_witness.expect("positive witness");
        assert!(w.value > 0.0);
        assert!(r.negative_witness.is_none());
    }

    #[test]
    fn positive_with_mixed_harmonics() {
        // 4 + 2cos2θ − 2sin2θ has minimum 4 − 2√2 > 0
        let r = sign_analysis(&tp((4, 1), &[(2, 2, 1)], &[(2, -2, 1)]));
        assert_eq!(r.verdict, SignVerdict::Positive);
    }

    #[test]
    fn changes_sign_when_amplitude_dominates() {
        // −10 + 10sin2θ − 4cos2θ attains −10 ± √116
        let r = sign_analysis(&tp((-10, 1), &[(2, -4, 1)], &[(2, 10, 1)]));
        assert_eq!(r.verdict, SignVerdict::ChangesSign);
        assert!(r.positive_witness.is_some() && r.negative_witness.is_some());
        let wp = r.positive_witness.unwrap();
        let wn = r.negative_witness.unwrap();
        assert!(wp.value > 0.0 && wn.value < 0.0);
        // four crossings of a degree-2 harmonic over the circle
        assert_eq!(r.zeros.len(), 4);
        assert!(r.zeros.iter().all(|z| z.crossing));
    }

    #[test]
    fn touch_zero_at_pi_is_not_a_crossing() {
        // 1 + cos θ vanishes only at π, to second order
        let r = sign_analysis(&tp((1, 1), &[(1, 1, 1)], &[]));
        assert_eq!(r.verdict, SignVerdict::NonNegativeWithZeros);
        assert_eq!(r.zeros.len(), 1);
        assert!(!r.zeros[0].crossing);
        assert_zero_located(&r, std::f64::consts::PI);
    }

    #[test]
    fn touch_zero_at_origin() {
        // cos θ − 1 ≤ 0 with a touch zero at θ = 0
        let r = sign_analysis(&tp((-1, 1), &[(1, 1, 1)], &[]));
        assert_eq!(r.verdict, SignVerdict::NonPositiveWithZeros);
        assert_eq!(r.zeros.len(), 1);
        assert!(!r.zeros[0].crossing);
        assert_zero_located(&r, 0.0);
    }

    #[test]
    fn squared_offset_cosine_touches_twice() {
        // (cos θ − 1/2)² = 3/4 − cos θ + 1/2·cos 2θ: zeros at ±π/3
        let r = sign_analysis(&tp((3, 4), &[(1, -1, 1), (2, 1, 2)], &[]));
        assert_eq!(r.verdict, SignVerdict::NonNegativeWithZeros);
        assert_eq!(r.zeros.len(), 2);
        assert!(r.zeros.iter().all(|z| !z.crossing));
        assert_zero_located(&r, -std::f64::consts::FRAC_PI_3);
        assert_zero_located(&r, std::f64::consts::FRAC_PI_3);
    }

    #[test]
    fn sine_crosses_at_zero_and_pi() {
        let r = sign_analysis(&tp((0, 1), &[], &[(1, 1, 1)]));
        assert_eq!(r.verdict, SignVerdict::ChangesSign);
        assert_eq!(r.zeros.len(), 2);
        assert!(r.zeros.iter().all(|z| z.crossing));
        assert_zero_located(&r, 0.0);
        assert_zero_located(&r, std::f64::consts::PI);
    }

    #[test]
    fn intervals_are_narrow_disjoint_and_ordered() {
        let r = sign_analysis(&tp((0, 1), &[(3, 1, 1)], &[(2, -1, 2)]));
        assert_eq!(r.verdict, SignVerdict::ChangesSign);
        let max_width = rat(1, 1 << 20);
        for z in &r.zeros {
            assert!(&z.theta_hi - &z.theta_lo < max_width, "interval too wide");
        }
        for pair in r.zeros.windows(2) {
            assert!(pair[0].theta_hi < pair[1].theta_lo, "intervals overlap");
        }
    }

    #[test]
    fn grid_sign_changes_never_exceed_certified_crossings() {
        // dense-evaluation consistency on a changing-sign example
        let f = tp((1, 2), &[(2, -2, 1)], &[(1, 1, 3)]);
        let r = sign_analysis(&f);
        let crossings = r.zeros.iter().filter(|z| z.crossing).count();
        let mut grid_changes = 0;
        let mut last = 0i8;
        for i in 0..=4096 {
            let th = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (i as f64) / 4096.0;
            let v = f.eval(th);
            let s = if v > 1e-12 {
                1
            } else if v < -1e-12 {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    grid_changes += 1;
                }
                last = s;
            }
        }
        assert!(
            grid_changes <= crossings,
            "grid saw {grid_changes} sign changes but only {crossings} certified"
        );
        assert!(crossings > 0);
    }

    #[test]
    fn rational_symmetric_zeros_isolated() {
        // sin 2θ has four zeros: 0, ±π/2, π
        let r = sign_analysis(&tp((0, 1), &[], &[(2, 1, 1)]));
        assert_eq!(r.zeros.len(), 4);
        assert!(r.zeros.iter().all(|z| z.crossing));
        for th in [-std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            assert_zero_located(&r, th);
        }
    }
}
