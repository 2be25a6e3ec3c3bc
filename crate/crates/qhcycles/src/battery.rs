//! Built-in systems used by the self-test battery, integration tests, and
//! documentation examples. Each constructor returns a validated
//! two-component system; the radial data these produce is pinned down in
//! tests, so treat the coefficients as frozen.

use rand::Rng;

use crate::vectorfield::{
    decompose, make_system, radial_coefficients, PolyXY, QHSystem, RadialSystem, Weight,
};
use crate::{rat, Rat};

fn poly(terms: &[(u32, u32, i64, i64)]) -> PolyXY {
    PolyXY::from_terms(
        terms
            .iter()
            .map(|&(i, j, n, d)| ((i, j), rat(n, d)))
            .collect(),
    )
}

/// (x² + y²)^k as an exact polynomial.
fn circle_pow(k: u32) -> PolyXY {
    let base = poly(&[(2, 0, 1, 1), (0, 2, 1, 1)]);
    let mut out = PolyXY::monomial(0, 0, rat(1, 1));
    for _ in 0..k {
        out = out.mul(&base);
    }
    out
}

fn system_from(p: PolyXY, q: PolyXY, w: Weight) -> QHSystem {
    make_system(
        decompose(&p, &q, w).expect("built-in system decomposes"),
        w,
    )
    .expect("built-in system has exactly two components")
}

/// Weight (2, 1) system with component degrees 5 and 6:
///   X_5 = (4x³ + xy⁴, 3x²y + y⁵)
///   X_6 = (−(2x² + y⁴)(8x + y²)y, (2x² + y⁴)(x − 4y²)).
/// Its angular coefficient b_5 changes sign, so the scalar reduction only
/// lives on sign-invariant subregions; the uniqueness criteria are expected
/// to report hypothesis failures here.
pub fn quintic_sextic() -> QHSystem {
    let p5 = poly(&[(3, 0, 4, 1), (1, 4, 1, 1)]);
    let q5 = poly(&[(2, 1, 3, 1), (0, 5, 1, 1)]);
    // (2x² + y⁴)(8x + y²)y = 16x³y + 2x²y³ + 8xy⁵ + y⁷
    let p6 = poly(&[(3, 1, -16, 1), (2, 3, -2, 1), (1, 5, -8, 1), (0, 7, -1, 1)]);
    // (2x² + y⁴)(x − 4y²) = 2x³ − 8x²y² + xy⁴ − 4y⁶
    let q6 = poly(&[(3, 0, 2, 1), (2, 2, -8, 1), (1, 4, 1, 1), (0, 6, -4, 1)]);
    let w = Weight::new(2, 1).unwrap();
    system_from(p5.add(&p6), q5.add(&q6), w)
}

/// Weight (1, 1) system with a linear rotation plus a cubic part:
///   X_1 = (x − y, x + y)
///   X_3 = (−x³ + 5x²y − xy² − y³, 3x³ − x²y + 9xy² − y³).
/// The scalar reduction is globally defined and carries exactly one limit
/// cycle (stable).
pub fn linear_cubic() -> QHSystem {
    let p = poly(&[
        (1, 0, 1, 1),
        (0, 1, -1, 1),
        (3, 0, -1, 1),
        (2, 1, 5, 1),
        (1, 2, -1, 1),
        (0, 3, -1, 1),
    ]);
    let q = poly(&[
        (1, 0, 1, 1),
        (0, 1, 1, 1),
        (3, 0, 3, 1),
        (2, 1, -1, 1),
        (1, 2, 9, 1),
        (0, 3, -1, 1),
    ]);
    system_from(p, q, Weight::new(1, 1).unwrap())
}

/// Rigid rotation family, weight (1, 1), degrees n = 2l+1 < m = 2k+1:
///   X_n = ((x − y)(x² + y²)^l, (x + y)(x² + y²)^l)
///   X_m = (−(x + y)(x² + y²)^k, (x − y)(x² + y²)^k).
/// Radially a_n = 2(k−l), a_m = −2(k−l), b_n = b_m = 1, so r = 1 is the
/// unique cycle and the return-map multiplier is exp(−2π(k−l)) exactly.
pub fn rotation_family(k: u32, l: u32) -> QHSystem {
    assert!(k > l, "family requires k > l");
    let low = circle_pow(l);
    let high = circle_pow(k);
    let p = poly(&[(1, 0, 1, 1), (0, 1, -1, 1)])
        .mul(&low)
        .add(&poly(&[(1, 0, -1, 1), (0, 1, -1, 1)]).mul(&high));
    let q = poly(&[(1, 0, 1, 1), (0, 1, 1, 1)])
        .mul(&low)
        .add(&poly(&[(1, 0, 1, 1), (0, 1, -1, 1)]).mul(&high));
    system_from(p, q, Weight::new(1, 1).unwrap())
}

/// Angularly skewed family, weight (1, 1), degrees n = 2l+3 < m = 2k+3:
///   X_n = ((x³ − x²y + xy²)(x² + y²)^l, (x³ + x²y + y³)(x² + y²)^l)
///   X_m = (−(x + y)(x² + y²)^{k+1}, (x − y)(x² + y²)^{k+1}).
/// Radially a_n = 2(k−l), a_m = −2(k−l), b_n = cos²θ, b_m = 1: the unique
/// cycle r = 1 has multiplier exp(−2√2·π(k−l)), and b_n vanishes at ±π/2
/// without breaking the criteria (only b_m must be nonvanishing).
pub fn skewed_family(k: u32, l: u32) -> QHSystem {
    assert!(k > l, "family requires k > l");
    let low = circle_pow(l);
    let high = circle_pow(k + 1);
    let p = poly(&[(3, 0, 1, 1), (2, 1, -1, 1), (1, 2, 1, 1)])
        .mul(&low)
        .add(&poly(&[(1, 0, -1, 1), (0, 1, -1, 1)]).mul(&high));
    let q = poly(&[(3, 0, 1, 1), (2, 1, 1, 1), (0, 3, 1, 1)])
        .mul(&low)
        .add(&poly(&[(1, 0, 1, 1), (0, 1, -1, 1)]).mul(&high));
    system_from(p, q, Weight::new(1, 1).unwrap())
}

/// Two stacked rotations: X_1 = (−y, x), X_3 = (−y(x² + y²), x(x² + y²)).
/// Here a_1 = a_3 = 0 and b_1 = b_3 = 1, so the uniqueness function Φ is
/// identically zero and every circle is periodic (a center).
pub fn rigid_center() -> QHSystem {
    let p = poly(&[(0, 1, -1, 1), (2, 1, -1, 1), (0, 3, -1, 1)]);
    let q = poly(&[(1, 0, 1, 1), (3, 0, 1, 1), (1, 2, 1, 1)]);
    system_from(p, q, Weight::new(1, 1).unwrap())
}

/// All built-in systems with stable names, for self-tests and reports.
pub fn catalog() -> Vec<(&'static str, QHSystem)> {
    vec![
        ("quintic-sextic", quintic_sextic()),
        ("linear-cubic", linear_cubic()),
        ("rotation-family-k1", rotation_family(1, 0)),
        ("rotation-family-k2", rotation_family(2, 0)),
        ("skewed-family-k1", skewed_family(1, 0)),
        ("skewed-family-k2", skewed_family(2, 0)),
        ("rigid-center", rigid_center()),
    ]
}

/// Draws a random two-component system for consistency sweeps. Components
/// are built monomial-wise from the weighted-degree constraint, so every
/// draw is structurally valid; draws whose high-degree angular coefficient
/// b_m vanishes identically are rejected and retried.
pub fn random_system(rng: &mut impl Rng) -> QHSystem {
    // (1,1) dominates the draw; skewed weights exercise the general formulas
    const WEIGHTS: [(u32, u32); 5] = [(1, 1), (1, 1), (1, 1), (2, 1), (1, 2)];
    loop {
        let (p, q) = WEIGHTS[rng.gen_range(0..WEIGHTS.len())];
        let w = Weight::new(p, q).unwrap();
        let n = rng.gen_range(1..=3u32);
        let m = n + rng.gen_range(1..=3u32);
        let (pn, qn) = random_component(rng, w, n);
        let (pm, qm) = random_component(rng, w, m);
        if (pn.is_zero() && qn.is_zero()) || (pm.is_zero() && qm.is_zero()) {
            continue;
        }
        let p_total = pn.add(&pm);
        let q_total = qn.add(&qm);
        let comps = match decompose(&p_total, &q_total, w) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let sys = match make_system(comps, w) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let rs = radial_coefficients(&sys);
        if rs.b_m.is_zero() {
            continue;
        }
        return sys;
    }
}

/// Radial data of a random system, for callers that need both.
pub fn random_radial(rng: &mut impl Rng) -> RadialSystem {
    radial_coefficients(&random_system(rng))
}

/// Draws a random weight-(1, 1) system biased so the uniqueness criteria
/// have a real chance to apply: both components are rigid rotations
/// (x² + y²)^j·(ax − y, x + ay) plus a damped random part of matching
/// degree. The angular coefficients then sit near ±1 and the Φ-numerator
/// near a nonzero constant, so a sizable fraction of draws is one-signed;
/// fully random coefficients almost never are. The verdicts themselves
/// stay with the caller.
pub fn random_rotational_system(rng: &mut impl Rng) -> QHSystem {
    // degree-(2j+1) component scale·(x² + y²)^j·(ax − y, x + ay) plus a
    // damped random part of the same degree
    fn rigid(rng: &mut impl Rng, j: u32, twist: &Rat, scale: &Rat) -> (PolyXY, PolyXY) {
        let w = Weight::new(1, 1).unwrap();
        let damp = rat(1, 8);
        let core = circle_pow(j).scale(scale);
        let p = poly(&[(1, 0, 1, 1)]).scale(twist).add(&poly(&[(0, 1, -1, 1)])).mul(&core);
        let q = poly(&[(0, 1, 1, 1)]).scale(twist).add(&poly(&[(1, 0, 1, 1)])).mul(&core);
        let (pert_p, pert_q) = random_component(rng, w, 2 * j + 1);
        (p.add(&pert_p.scale(&damp)), q.add(&pert_q.scale(&damp)))
    }
    let w = Weight::new(1, 1).unwrap();
    loop {
        let k = rng.gen_range(1..=2u32);
        let m = 2 * k + 1;
        let n = if m == 3 { 1 } else { 2 * rng.gen_range(0..=1u32) + 1 };
        // low twist a ∈ ±{1/2, 1, 3/2, 2}; the high part twists gently or
        // not at all, and may reverse orientation
        let low_twist = rat(
            rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 },
            2,
        );
        let high_twist = rat(rng.gen_range(-1..=1), 2);
        let high_sign = rat(if rng.gen_bool(0.5) { 1 } else { -1 }, 1);
        let (pn, qn) = rigid(rng, (n - 1) / 2, &low_twist, &rat(1, 1));
        let (pm, qm) = rigid(rng, k, &high_twist, &high_sign);
        let comps = match decompose(&pn.add(&pm), &qn.add(&qm), w) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let sys = match make_system(comps, w) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if sys.n() != n || sys.m() != m {
            continue;
        }
        return sys;
    }
}

fn coeff(rng: &mut impl Rng) -> Rat {
    let n = rng.gen_range(-6i64..=6);
    let d = if rng.gen_bool(0.5) { 1 } else { 2 };
    rat(n, d)
}

fn random_component(rng: &mut impl Rng, w: Weight, s: u32) -> (PolyXY, PolyXY) {
    let mut p = PolyXY::zero();
    let mut q = PolyXY::zero();
    let target_p = (w.p + s - 1) as i64;
    let target_q = (w.q + s - 1) as i64;
    for i in 0..=(target_p / w.p as i64) {
        let rem = target_p - w.p as i64 * i;
        if rem >= 0 && rem % w.q as i64 == 0 {
            let j = rem / w.q as i64;
            p.add_term(i as u32, j as u32, coeff(rng));
        }
    }
    for i in 0..=(target_q / w.p as i64) {
        let rem = target_q - w.p as i64 * i;
        if rem >= 0 && rem % w.q as i64 == 0 {
            let j = rem / w.q as i64;
            q.add_term(i as u32, j as u32, coeff(rng));
        }
    }
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::TrigPoly;
    use crate::vectorfield::radial_coefficients;
    use rand::SeedableRng;

    #[test]
    fn gallery_degrees_and_weights() {
        let qs = quintic_sextic();
        assert_eq!((qs.n(), qs.m()), (5, 6));
        assert_eq!((qs.weight.p, qs.weight.q), (2, 1));
        let lc = linear_cubic();
        assert_eq!((lc.n(), lc.m()), (1, 3));
        assert_eq!((rotation_family(2, 1).n(), rotation_family(2, 1).m()), (3, 5));
        assert_eq!((skewed_family(1, 0).n(), skewed_family(1, 0).m()), (3, 5));
        assert_eq!((skewed_family(2, 0).n(), skewed_family(2, 0).m()), (3, 7));
    }

    #[test]
    fn rotation_family_radial_data_is_constant() {
        for (k, l) in [(1u32, 0u32), (2, 0), (3, 1)] {
            let rs = radial_coefficients(&rotation_family(k, l));
            let kl = 2 * (k - l) as i64;
            assert_eq!(rs.a_n, TrigPoly::constant(rat(kl, 1)));
            assert_eq!(rs.a_m, TrigPoly::constant(rat(-kl, 1)));
            assert_eq!(rs.b_n, TrigPoly::one());
            assert_eq!(rs.b_m, TrigPoly::one());
        }
    }

    #[test]
    fn skewed_family_radial_data() {
        let rs = radial_coefficients(&skewed_family(1, 0));
        assert_eq!(rs.a_n, TrigPoly::constant(rat(2, 1)));
        assert_eq!(rs.a_m, TrigPoly::constant(rat(-2, 1)));
        // cos²θ = 1/2 + 1/2 cos 2θ
        let want = &TrigPoly::constant(rat(1, 2)) + &TrigPoly::cos_harmonic(2, rat(1, 2));
        assert_eq!(rs.b_n, want);
        assert_eq!(rs.b_m, TrigPoly::one());
    }

    #[test]
    fn rigid_center_has_vanishing_phi() {
        let rs = radial_coefficients(&rigid_center());
        assert!(rs.a_n.is_zero());
        assert!(rs.phi_numerator().is_zero());
    }

    #[test]
    fn quintic_sextic_radial_samples() {
        // direct Eq-style sampling cross-check of the (2,1)-weighted system
        let sys = quintic_sextic();
        let rs = radial_coefficients(&sys);
        for i in 0..32 {
            let th: f64 = 0.19 * i as f64;
            let (c, s) = (th.cos(), th.sin());
            let base = 2.0 * c * c + s.powi(4);
            let a5_direct = 2.0 * c * c + s.powi(4) + (1.0 + c * c) * c * c;
            let a6_direct = -base * (8.0 - 4.0 * s * s - c.powi(3)) * s;
            let b5_direct = base * c * s;
            let b6_direct = base * base;
            assert!((rs.a_n.eval(th) - a5_direct).abs() < 1e-10);
            assert!((rs.a_m.eval(th) - a6_direct).abs() < 1e-10);
            assert!((rs.b_n.eval(th) - b5_direct).abs() < 1e-10);
            assert!((rs.b_m.eval(th) - b6_direct).abs() < 1e-10);
        }
    }

    #[test]
    fn random_systems_are_well_formed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let sys = random_system(&mut rng);
            assert!(sys.n() < sys.m());
            let rs = radial_coefficients(&sys);
            assert!(!rs.b_m.is_zero());
        }
    }

    #[test]
    fn random_systems_are_deterministic_per_seed() {
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            assert_eq!(random_system(&mut r1), random_system(&mut r2));
        }
    }
}
