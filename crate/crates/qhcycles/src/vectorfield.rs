//! Planar polynomial vector fields, quasi-homogeneous components, and the
//! reduction to radial coefficient data on the circle.
//!
//! A component X = (P, Q) is quasi-homogeneous of degree s for the weight
//! (p, q) when P(λ^p x, λ^q y) = λ^{p+s−1} P(x, y) and
//! Q(λ^p x, λ^q y) = λ^{q+s−1} Q(x, y); monomial-wise, x^i y^j may appear in
//! P only if p·i + q·j = p + s − 1 and in Q only if p·i + q·j = q + s − 1.
//! The analysis pipeline accepts sums of exactly two such components with
//! distinct degrees n < m.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::trigpoly::{from_poly_on_circle, rat_to_f64, TrigPoly};
use crate::Rat;

/// Polynomial in (x, y) with exact rational coefficients. Only nonzero
/// terms are stored; the map key is the exponent pair (i, j).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PolyXY {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl PolyXY {
    pub fn zero() -> Self {
        PolyXY::default()
    }

    pub fn monomial(i: u32, j: u32, c: Rat) -> Self {
        let mut p = PolyXY::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms(terms: Vec<((u32, u32), Rat)>) -> Self {
        let mut p = PolyXY::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms in exponent-lexicographic order (deterministic).
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rat)> + '_ {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn add(&self, rhs: &PolyXY) -> PolyXY {
        let mut out = self.clone();
        for ((i, j), c) in rhs.terms() {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> PolyXY {
        if c.is_zero() {
            return PolyXY::zero();
        }
        PolyXY {
            terms: self
                .terms
                .iter()
                .map(|(&e, v)| (e, v * c))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &PolyXY) -> PolyXY {
        let mut out = PolyXY::zero();
        for ((i1, j1), c1) in self.terms() {
            for ((i2, j2), c2) in rhs.terms() {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| rat_to_f64(c) * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }
}

impl fmt::Display for PolyXY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // graded order: total degree first, then x-power descending
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|&((i, j), _)| (i + j, std::cmp::Reverse(i)));
        let mut first = true;
        for ((i, j), c) in terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let unit = match (i, j) {
                (0, 0) => String::new(),
                (1, 0) => "x".into(),
                (0, 1) => "y".into(),
                (i, 0) => format!("x^{i}"),
                (0, j) => format!("y^{j}"),
                (1, j) => format!("x·y^{j}"),
                (i, 1) => format!("x^{i}·y"),
                (i, j) => format!("x^{i}·y^{j}"),
            };
            if unit.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == Rat::from_integer(1.into()) {
                write!(f, "{unit}")?;
            } else {
                write!(f, "{mag}·{unit}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyXY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Positive integer weight pair (p, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Weight {
    pub p: u32,
    pub q: u32,
}

impl Weight {
    pub fn new(p: u32, q: u32) -> Result<Self, VectorFieldError> {
        if p == 0 || q == 0 {
            return Err(VectorFieldError::InvalidWeight { p, q });
        }
        Ok(Weight { p, q })
    }
}

/// Which coordinate polynomial of a component a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSel {
    P,
    Q,
}

impl fmt::Display for FieldSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSel::P => write!(f, "P"),
            FieldSel::Q => write!(f, "Q"),
        }
    }
}

/// A monomial that breaks the quasi-homogeneity constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffendingMonomial {
    pub field: FieldSel,
    pub exponents: (u32, u32),
    pub weighted_degree: i64,
    pub required: i64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorFieldError {
    #[error("weights must be positive integers, got ({p}, {q})")]
    InvalidWeight { p: u32, q: u32 },
    #[error(
        "monomial x^{i}·y^{j} in {field} has weighted degree {found}, \
         which implies a negative component degree for weight ({p}, {q})"
    )]
    InvalidWeightedDegree {
        field: FieldSel,
        i: u32,
        j: u32,
        found: i64,
        p: u32,
        q: u32,
    },
    #[error("expected exactly two quasi-homogeneous components, found degrees {degrees:?}")]
    NotTwoComponents { degrees: Vec<u32> },
}

/// One quasi-homogeneous component X_s = (P, Q) of degree `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QHComponent {
    pub p: PolyXY,
    pub q: PolyXY,
    pub degree: u32,
}

/// Checks the monomial-wise weighted degree constraint; the component is
/// quasi-homogeneous of degree `s` iff the returned list is empty.
pub fn validate_component(
    p: &PolyXY,
    q: &PolyXY,
    w: Weight,
    s: u32,
) -> Vec<OffendingMonomial> {
    let mut out = Vec::new();
    let wp = w.p as i64;
    let wq = w.q as i64;
    let s = s as i64;
    for ((i, j), _) in p.terms() {
        let found = wp * i as i64 + wq * j as i64;
        let required = wp + s - 1;
        if found != required {
            out.push(OffendingMonomial {
                field: FieldSel::P,
                exponents: (i, j),
                weighted_degree: found,
                required,
            });
        }
    }
    for ((i, j), _) in q.terms() {
        let found = wp * i as i64 + wq * j as i64;
        let required = wq + s - 1;
        if found != required {
            out.push(OffendingMonomial {
                field: FieldSel::Q,
                exponents: (i, j),
                weighted_degree: found,
                required,
            });
        }
    }
    out
}

/// Splits (P, Q) into quasi-homogeneous components for the weight `w`,
/// sorted by ascending degree. Every monomial determines its component
/// degree uniquely; a monomial implying a negative degree is rejected.
pub fn decompose(
    p: &PolyXY,
    q: &PolyXY,
    w: Weight,
) -> Result<Vec<QHComponent>, VectorFieldError> {
    let wp = w.p as i64;
    let wq = w.q as i64;
    let mut by_degree: BTreeMap<i64, (PolyXY, PolyXY)> = BTreeMap::new();
    for ((i, j), c) in p.terms() {
        let found = wp * i as i64 + wq * j as i64;
        let s = found - wp + 1;
        if s < 0 {
            return Err(VectorFieldError::InvalidWeightedDegree {
                field: FieldSel::P,
                i,
                j,
                found,
                p: w.p,
                q: w.q,
            });
        }
        by_degree
            .entry(s)
            .or_insert_with(|| (PolyXY::zero(), PolyXY::zero()))
            .0
            .add_term(i, j, c.clone());
    }
    for ((i, j), c) in q.terms() {
        let found = wp * i as i64 + wq * j as i64;
        let s = found - wq + 1;
        if s < 0 {
            return Err(VectorFieldError::InvalidWeightedDegree {
                field: FieldSel::Q,
                i,
                j,
                found,
                p: w.p,
                q: w.q,
            });
        }
        by_degree
            .entry(s)
            .or_insert_with(|| (PolyXY::zero(), PolyXY::zero()))
            .1
            .add_term(i, j, c.clone());
    }
    let components = by_degree
        .into_iter()
        .map(|(s, (p, q))| {
            debug_assert!(validate_component(&p, &q, w, s as u32).is_empty());
            QHComponent {
                p,
                q,
                degree: s as u32,
            }
        })
        .collect();
    Ok(components)
}

/// System X_n + X_m of exactly two quasi-homogeneous components, n < m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QHSystem {
    pub weight: Weight,
    pub low: QHComponent,
    pub high: QHComponent,
}

impl QHSystem {
    pub fn n(&self) -> u32 {
        self.low.degree
    }

    pub fn m(&self) -> u32 {
        self.high.degree
    }
}

/// Accepts exactly two components (any other count is out of scope) and
/// orders them by degree. Components are revalidated against the weight so
/// hand-built inputs cannot smuggle in a mismatched degree.
pub fn make_system(
    components: Vec<QHComponent>,
    w: Weight,
) -> Result<QHSystem, VectorFieldError> {
    if components.len() != 2 {
        return Err(VectorFieldError::NotTwoComponents {
            degrees: components.iter().map(|c| c.degree).collect(),
        });
    }
    for c in &components {
        if let Some(bad) = validate_component(&c.p, &c.q, w, c.degree).into_iter().next() {
            return Err(VectorFieldError::InvalidWeightedDegree {
                field: bad.field,
                i: bad.exponents.0,
                j: bad.exponents.1,
                found: bad.weighted_degree,
                p: w.p,
                q: w.q,
            });
        }
    }
    let mut it = components.into_iter();
    let a = it.next().unwrap();
    let b = it.next().unwrap();
    let (low, high) = if a.degree < b.degree { (a, b) } else { (b, a) };
    debug_assert!(low.degree < high.degree);
    Ok(QHSystem {
        weight: w,
        low,
        high,
    })
}

/// Radial coefficient data of the system on the unit circle:
///   a_i(θ) = (m−n)·(cos θ · P_i(cos θ, sin θ) + sin θ · Q_i(cos θ, sin θ))
///   b_i(θ) = p·cos θ · Q_i(cos θ, sin θ) − q·sin θ · P_i(cos θ, sin θ)
/// together with the cached derivatives of b_n, b_m used throughout the
/// uniqueness machinery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialSystem {
    pub weight: Weight,
    pub n: u32,
    pub m: u32,
    pub a_n: TrigPoly,
    pub a_m: TrigPoly,
    pub b_n: TrigPoly,
    pub b_m: TrigPoly,
    pub b_n_dot: TrigPoly,
    pub b_m_dot: TrigPoly,
}

impl RadialSystem {
    /// Numerator of Φ = a_n/b_m − (b_n/b_m)′ over the common denominator
    /// b_m²: a_n·b_m − b_n′·b_m + b_n·b_m′. The sign data of Φ off the
    /// zeros of b_m is exactly the sign data of this polynomial times b_m².
    pub fn phi_numerator(&self) -> TrigPoly {
        let t1 = &self.a_n * &self.b_m;
        let t2 = &self.b_n_dot * &self.b_m;
        let t3 = &self.b_n * &self.b_m_dot;
        &(&t1 - &t2) + &t3
    }

    /// p·cos²θ + q·sin²θ, the angular factor of the generalized polar
    /// change of variables.
    pub fn weight_form(&self) -> TrigPoly {
        let p = Rat::from_integer(self.weight.p.into());
        let q = Rat::from_integer(self.weight.q.into());
        let two = Rat::from_integer(2.into());
        let avg = (&p + &q) / &two;
        let diff = (&p - &q) / &two;
        &TrigPoly::constant(avg) + &TrigPoly::cos_harmonic(2, diff)
    }

    /// Exponent (n−1)/(m−n) of the radial power in the polar vector field.
    pub fn r_exponent(&self) -> Rat {
        Rat::new(
            (self.n as i64 - 1).into(),
            (self.m as i64 - self.n as i64).into(),
        )
    }
}

/// Computes the radial coefficients of a two-component system exactly.
pub fn radial_coefficients(sys: &QHSystem) -> RadialSystem {
    let cos1 = TrigPoly::cos_harmonic(1, Rat::from_integer(1.into()));
    let sin1 = TrigPoly::sin_harmonic(1, Rat::from_integer(1.into()));
    let factor = Rat::from_integer((sys.m() as i64 - sys.n() as i64).into());
    let p = Rat::from_integer(sys.weight.p.into());
    let q = Rat::from_integer(sys.weight.q.into());
    let radial_pair = |comp: &QHComponent| {
        let pc = from_poly_on_circle(&comp.p);
        let qc = from_poly_on_circle(&comp.q);
        let a = (&(&cos1 * &pc) + &(&sin1 * &qc)).scale(&factor);
        let b = &(&cos1 * &qc).scale(&p) - &(&sin1 * &pc).scale(&q);
        (a, b)
    };
    let (a_n, b_n) = radial_pair(&sys.low);
    let (a_m, b_m) = radial_pair(&sys.high);
    let b_n_dot = b_n.differentiate();
    let b_m_dot = b_m.differentiate();
    RadialSystem {
        weight: sys.weight,
        n: sys.n(),
        m: sys.m(),
        a_n,
        a_m,
        b_n,
        b_m,
        b_n_dot,
        b_m_dot,
    }
}
