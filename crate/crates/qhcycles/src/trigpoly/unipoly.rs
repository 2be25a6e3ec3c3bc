//! Exact univariate polynomials over the rationals: just enough arithmetic
//! for Sturm sequences, square-free parts, and real root isolation.
//!
//! Coefficients ascend; the zero polynomial is the empty vector. Sturm
//! sequences rescale every remainder to a primitive integer polynomial
//! (positive factor only, so sign data is preserved) to keep coefficient
//! growth polynomial instead of exponential.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rat;

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly {
            coeffs: vec![Rat::one()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rat::from_integer(i.into()))
            .collect();
        UniPoly::new(coeffs)
    }

    pub fn add(&self, rhs: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by t (coefficient shift).
    pub fn shift_up(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rat::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs }
    }

    pub fn mul(&self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division; panics if `div` is zero.
    pub fn div_rem(&self, div: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = div.degree().expect("division by zero polynomial");
        let lead = div.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            if !factor.is_zero() {
                for (i, c) in div.coeffs.iter().enumerate() {
                    let delta = &factor * c;
                    rem[k + i] -= delta;
                }
                quot[k] = factor;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Rescales by a positive rational so coefficients become coprime
    /// integers. Signs at every point are unchanged.
    pub fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in &self.coeffs {
            num_gcd = num_gcd.gcd(&(c.numer() * &den_lcm / c.denom()));
        }
        let scale = Rat::new(den_lcm, num_gcd);
        debug_assert!(scale.is_positive());
        UniPoly::new(self.coeffs.iter().map(|c| c * &scale).collect())
    }

    /// 1 + max |c_i| / |c_lead|: every real root lies strictly inside
    /// (−bound, bound).
    pub fn cauchy_bound(&self) -> Rat {
        let lead = self.leading().expect("root bound of zero polynomial").abs();
        let mut m = Rat::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let v = c.abs() / &lead;
            if v > m {
                m = v;
            }
        }
        m + Rat::one()
    }

    /// Largest square-free divisor: self / gcd(self, self'). Roots and their
    /// order on the line are preserved; multiplicities collapse to one.
    pub fn square_free(&self) -> UniPoly {
        match self.degree() {
            None | Some(0) => return self.clone(),
            Some(1) => return self.clone(),
            _ => {}
        }
        let g = gcd(self, &self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        let (q, r) = self.div_rem(&g);
        debug_assert!(r.is_zero());
        q
    }
}

fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut a = a.primitive();
    let mut b = b.primitive();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = std::mem::replace(&mut b, r.primitive());
    }
    a
}

/// Canonical Sturm chain: p, p', then negated primitive remainders.
pub(crate) fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let mut seq = vec![p.primitive()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d.primitive());
    loop {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            return seq;
        }
        let neg = UniPoly::new(r.coeffs.iter().map(|c| -c.clone()).collect()).primitive();
        seq.push(neg);
    }
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

fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Sign variations of the chain at a point.
pub(crate) fn variations_at(seq: &[UniPoly], x: &Rat) -> usize {
    count_changes(seq.iter().map(|p| sign_of(&p.eval(x))))
}

/// Distinct real roots of `seq[0]` in the open interval (a, b).
/// Requires seq[0](a) ≠ 0 and seq[0](b) ≠ 0.
#[cfg(test)]
pub(crate) fn count_roots_between(seq: &[UniPoly], a: &Rat, b: &Rat) -> usize {
    debug_assert!(a < b);
    debug_assert!(!seq[0].eval(a).is_zero() && !seq[0].eval(b).is_zero());
    variations_at(seq, a) - variations_at(seq, b)
}

/// Location of one real root of a square-free polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RootRegion {
    /// Rational root found exactly.
    Exact(Rat),
    /// Open cell (lo, hi) containing exactly one root; endpoints are not
    /// roots.
    Cell { lo: Rat, hi: Rat },
}

impl RootRegion {
    pub fn position(&self) -> &Rat {
        match self {
            RootRegion::Exact(c) => c,
            RootRegion::Cell { lo, .. } => lo,
        }
    }
}

/// Isolates all real roots of a square-free, nonconstant polynomial by
/// Sturm bisection. Output is sorted left to right.
pub(crate) fn isolate_real_roots(p: &UniPoly) -> Vec<RootRegion> {
    assert!(
        p.degree().map_or(false, |d| d >= 1),
        "root isolation needs a nonconstant polynomial"
    );
    let seq = sturm_sequence(p);
    let bound = p.cauchy_bound();
    let a = -bound.clone();
    let b = bound;
    let two = Rat::from_integer(2.into());
    let va = variations_at(&seq, &a);
    let vb = variations_at(&seq, &b);
    let mut out = Vec::new();
    let mut stack = vec![(a, b, va, vb)];
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va - vb;
        if count == 0 {
            continue;
        }
        if count == 1 {
            out.push(RootRegion::Cell { lo: a, hi: b });
            continue;
        }
        let mid = (&a + &b) / &two;
        if p.eval(&mid).is_zero() {
            // Exact root at the midpoint. Carve out a symmetric window that
            // contains only this root, then recurse on the two sides.
            let mut delta = (&b - &a) / Rat::from_integer(4.into());
            loop {
                let lo = &mid - &delta;
                let hi = &mid + &delta;
                if !p.eval(&lo).is_zero() && !p.eval(&hi).is_zero() {
                    let vl = variations_at(&seq, &lo);
                    let vh = variations_at(&seq, &hi);
                    if vl - vh == 1 {
                        out.push(RootRegion::Exact(mid.clone()));
                        stack.push((a, lo, va, vl));
                        stack.push((hi, b, vh, vb));
                        break;
                    }
                }
                delta = delta / &two;
            }
        } else {
            let vm = variations_at(&seq, &mid);
            stack.push((a, mid.clone(), va, vm));
            stack.push((mid, b, vm, vb));
        }
    }
    out.sort_by(|x, y| x.position().cmp(y.position()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn poly(cs: &[(i64, i64)]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn ipoly(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&n| rat(n, 1)).collect())
    }

    #[test]
    fn division_recomposes() {
        // (x² + 1)(3x − 2) + (x + 7)
        let d = ipoly(&[1, 0, 1]);
        let q = ipoly(&[-2, 3]);
        let r = ipoly(&[7, 1]);
        let n = d.mul(&q).add(&r);
        let (q2, r2) = n.div_rem(&d);
        assert_eq!(q2, q);
        assert_eq!(r2, r);
    }

    #[test]
    fn primitive_scales_positively() {
        let p = poly(&[(2, 3), (-4, 3), (8, 3)]);
        let prim = p.primitive();
        assert_eq!(prim, ipoly(&[1, -2, 4]));
        // sign at a sample point unchanged
        let x = rat(5, 7);
        assert_eq!(p.eval(&x).is_positive(), prim.eval(&x).is_positive());
    }

    #[test]
    fn sturm_counts_roots_of_cubic() {
        // x³ − 2x = x(x−√2)(x+√2): three real roots
        let p = ipoly(&[0, -2, 0, 1]);
        let seq = sturm_sequence(&p);
        let roots = count_roots_between(&seq, &rat(-10, 1), &rat(10, 1));
        assert_eq!(roots, 3);
        assert_eq!(count_roots_between(&seq, &rat(1, 1), &rat(10, 1)), 1);
    }

    #[test]
    fn sturm_counts_distinct_roots_despite_multiplicity() {
        // (x − 1)²(x + 2): two distinct real roots
        let p = ipoly(&[2, -3, 0, 1]);
        let seq = sturm_sequence(&p);
        assert_eq!(count_roots_between(&seq, &rat(-10, 1), &rat(10, 1)), 2);
    }

    #[test]
    fn no_real_roots() {
        let p = ipoly(&[1, 0, 1]); // x² + 1
        let seq = sturm_sequence(&p);
        assert_eq!(count_roots_between(&seq, &rat(-10, 1), &rat(10, 1)), 0);
    }

    #[test]
    fn square_free_collapses_multiplicity() {
        // (x − 1)²(x + 2) → degree 2 with roots {1, −2}
        let p = ipoly(&[2, -3, 0, 1]);
        let sf = p.square_free();
        assert_eq!(sf.degree(), Some(2));
        assert!(sf.eval(&rat(1, 1)).is_zero());
        assert!(sf.eval(&rat(-2, 1)).is_zero());
    }

    #[test]
    fn isolation_finds_exact_and_irrational_roots() {
        // x³ − 2x: roots −√2, 0, √2; 0 is hit exactly by bisection
        let p = ipoly(&[0, -2, 0, 1]);
        let regions = isolate_real_roots(&p);
        assert_eq!(regions.len(), 3);
        assert_eq!(regions[1], RootRegion::Exact(rat(0, 1)));
        match (&regions[0], &regions[2]) {
            (RootRegion::Cell { lo, hi }, RootRegion::Cell { lo: lo2, hi: hi2 }) => {
                let s2 = 2f64.sqrt();
                assert!(crate::trigpoly::rat_to_f64(lo) < -s2);
                assert!(crate::trigpoly::rat_to_f64(hi) > -s2);
                assert!(crate::trigpoly::rat_to_f64(lo2) < s2);
                assert!(crate::trigpoly::rat_to_f64(hi2) > s2);
            }
            other => panic!("expected cells around ±√2, got {other:?}"),
        }
    }

    #[test]
    fn isolation_separates_close_roots() {
        // (x − 1/128)(x − 1/127) · (x + 3)
        let r1 = rat(1, 128);
        let r2 = rat(1, 127);
        let p = UniPoly::new(vec![-r1.clone(), Rat::one()])
            .mul(&UniPoly::new(vec![-r2.clone(), Rat::one()]))
            .mul(&ipoly(&[3, 1]));
        let regions = isolate_real_roots(&p);
        assert_eq!(regions.len(), 3);
        // each region contains exactly one of the three roots
        let contains = |reg: &RootRegion, r: &Rat| match reg {
            RootRegion::Exact(c) => c == r,
            RootRegion::Cell { lo, hi } => lo < r && r < hi,
        };
        assert!(contains(&regions[0], &rat(-3, 1)));
        assert!(contains(&regions[1], &r1));
        assert!(contains(&regions[2], &r2));
    }

    #[test]
    fn cauchy_bound_contains_roots() {
        let p = ipoly(&[-6, 11, -6, 1]); // (x−1)(x−2)(x−3)
        let b = p.cauchy_bound();
        assert!(b > rat(3, 1));
        let seq = sturm_sequence(&p);
        assert_eq!(count_roots_between(&seq, &-b.clone(), &b), 3);
    }
}
