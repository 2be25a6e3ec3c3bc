//! Input document: a JSON description of the planar system with exact
//! rational coefficients. Decimal floats are rejected on purpose; a
//! coefficient that cannot be written as "num/den" has already lost the
//! exactness the sign certificates depend on.

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

use qhcycles::vectorfield::{decompose, make_system, PolyXY, QHSystem, Weight};
use qhcycles::Rat;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Weight pair [p, q] of the quasi-homogeneous grading.
    pub weight: [u32; 2],
    /// Monomials of the first component P.
    #[serde(rename = "P")]
    pub p: Vec<MonomialSpec>,
    /// Monomials of the second component Q.
    #[serde(rename = "Q")]
    pub q: Vec<MonomialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<Overrides>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    /// Exact rational coefficient, e.g. "-3/4" or "2".
    pub coef: String,
    pub dx: u32,
    pub dy: u32,
}

/// Optional analysis settings carried in the input document. Command-line
/// flags take precedence over these.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
}

pub fn parse_rational(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| anyhow!("coefficient {s:?} is not an exact rational ({e}); write it as \"num/den\" or an integer string"))
}

fn poly_from_monomials(kind: &str, monomials: &[MonomialSpec]) -> Result<PolyXY> {
    let mut poly = PolyXY::zero();
    for m in monomials {
        let c = parse_rational(&m.coef)
            .with_context(|| format!("in component {kind}, monomial x^{} y^{}", m.dx, m.dy))?;
        poly.add_term(m.dx, m.dy, c);
    }
    Ok(poly)
}

impl SystemSpec {
    pub fn polynomials(&self) -> Result<(PolyXY, PolyXY)> {
        Ok((
            poly_from_monomials("P", &self.p)?,
            poly_from_monomials("Q", &self.q)?,
        ))
    }

    /// Builds the two-component system. The Err side is a scope failure
    /// (exit code 2 territory): the polynomials parsed fine but do not
    /// form a valid pair of quasi-homogeneous components.
    pub fn build_system(&self) -> Result<std::result::Result<QHSystem, String>> {
        let weight = match Weight::new(self.weight[0], self.weight[1]) {
            Ok(w) => w,
            Err(e) => return Ok(Err(e.to_string())),
        };
        let (p, q) = self.polynomials()?;
        let components = match decompose(&p, &q, weight) {
            Ok(c) => c,
            Err(e) => return Ok(Err(e.to_string())),
        };
        match make_system(components, weight) {
            Ok(sys) => Ok(Ok(sys)),
            Err(e) => Ok(Err(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example2_json() -> &'static str {
        r#"{
          "weight": [1, 1],
          "P": [
            {"coef": "1", "dx": 1, "dy": 0},
            {"coef": "-1", "dx": 0, "dy": 1},
            {"coef": "-1", "dx": 3, "dy": 0},
            {"coef": "5", "dx": 2, "dy": 1},
            {"coef": "-1", "dx": 1, "dy": 2},
            {"coef": "-1", "dx": 0, "dy": 3}
          ],
          "Q": [
            {"coef": "1", "dx": 1, "dy": 0},
            {"coef": "1", "dx": 0, "dy": 1},
            {"coef": "3", "dx": 3, "dy": 0},
            {"coef": "-1", "dx": 2, "dy": 1},
            {"coef": "9", "dx": 1, "dy": 2},
            {"coef": "-1", "dx": 0, "dy": 3}
          ]
        }"#
    }

    #[test]
    fn parses_and_builds_two_components() {
        let spec: SystemSpec = serde_json::from_str(example2_json()).unwrap();
        let sys = spec.build_system().unwrap().unwrap();
        assert_eq!(sys.n(), 1);
        assert_eq!(sys.m(), 3);
    }

    #[test]
    fn roundtrip_preserves_the_system() {
        let spec: SystemSpec = serde_json::from_str(example2_json()).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let again: SystemSpec = serde_json::from_str(&json).unwrap();
        let a = spec.build_system().unwrap().unwrap();
        let b = again.build_system().unwrap().unwrap();
        assert_eq!(a.low.p, b.low.p);
        assert_eq!(a.high.q, b.high.q);
    }

    #[test]
    fn rejects_decimal_coefficients() {
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational("-7/2").is_ok());
        assert!(parse_rational("4").is_ok());
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = r#"{"weight": [1,1], "P": [], "Q": [], "extra": 1}"#;
        assert!(serde_json::from_str::<SystemSpec>(bad).is_err());
    }

    #[test]
    fn three_components_are_out_of_scope() {
        let json = r#"{
          "weight": [1, 1],
          "P": [
            {"coef": "1", "dx": 1, "dy": 0},
            {"coef": "1", "dx": 2, "dy": 0},
            {"coef": "1", "dx": 3, "dy": 0}
          ],
          "Q": [{"coef": "1", "dx": 0, "dy": 1}]
        }"#;
        let spec: SystemSpec = serde_json::from_str(json).unwrap();
        let scope = spec.build_system().unwrap();
        assert!(scope.is_err(), "expected scope failure, got {scope:?}");
    }
}
