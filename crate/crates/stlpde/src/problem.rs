//! The problem file: one JSON document tying a PDE system, a mesh, and a
//! formula together.
//!
//! ```json
//! {
//!   "kind": "heat", "L": 100.0, "tmax": 5.0, "g0": 300.0,
//!   "u0": {"const": 300.0},
//!   "materials": [{"end": 100.0, "rho": 4e-6, "c": 4e8, "kappa": 1.5e6}],
//!   "q_max": 1e6,
//!   "grid": {"nx": 20, "nt": 100},
//!   "stl": {
//!     "regions": {"A": {"x_lo": 30, "x_hi": 60, "cmp": "<", "a": 0.25, "b": 303}},
//!     "cspec": "(G_[4, 5] (A))"
//!   }
//! }
//! ```
//!
//! Regions may be given as predicate objects (above) or as the textual form
//! `"[30, 60], \"<\", 0.25 * x + 303"`.  Optional keys and their defaults:
//! `g0` (300 heat / 0 wave), `u0` (constant `g0` heat / zero wave), `q_max`
//! (1e6 heat / 50 wave), `grid` (20×100), `u_lo`/`u_hi` (see
//! [`PdeSystem::state_bounds`]), `lumped_mass` (false).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fem::{
    Discretization, FemError, InitialProfile, MaterialSegment, PdeKind, PdeSystem,
    DEFAULT_Q_MAX_HEAT, DEFAULT_Q_MAX_WAVE,
};
use crate::stl::{
    parse_cspec, validate, LinearPredicate, RegionMap, StlError, StlFormula, ValidityReport,
};

pub const DEFAULT_G0_HEAT: f64 = 300.0;

/// A fully-resolved problem: system, mesh, and formula.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub system: PdeSystem,
    pub disc: Discretization,
    pub formula: StlFormula,
    pub regions: RegionMap,
    pub cspec: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read problem file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed problem JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Stl(#[from] StlError),
    #[error(transparent)]
    Model(#[from] FemError),
}

/// Raw file shape before defaults are resolved.
#[derive(Serialize, Deserialize)]
struct ProblemFile {
    kind: PdeKind,
    #[serde(rename = "L")]
    length: f64,
    tmax: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u0: Option<InitialProfile>,
    materials: Vec<MaterialSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u_hi: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    lumped_mass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<Discretization>,
    stl: StlSection,
}

#[derive(Serialize, Deserialize)]
struct StlSection {
    regions: BTreeMap<String, RegionSpec>,
    cspec: String,
}

/// A region is either the predicate object or its textual form.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RegionSpec {
    Pred(LinearPredicate),
    Text(String),
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Problem, ProblemError> {
        let raw: ProblemFile = serde_json::from_str(text)?;

        let mut regions = RegionMap::new();
        for (label, spec) in raw.stl.regions {
            let pred = match spec {
                RegionSpec::Pred(p) => p,
                RegionSpec::Text(t) => LinearPredicate::parse_text(&t)?,
            };
            regions.insert(label, pred);
        }
        let formula = parse_cspec(&regions, &raw.stl.cspec)?;

        let g0 = raw.g0.unwrap_or(match raw.kind {
            PdeKind::Heat => DEFAULT_G0_HEAT,
            PdeKind::Wave => 0.0,
        });
        let system = PdeSystem {
            kind: raw.kind,
            length: raw.length,
            tmax: raw.tmax,
            g0,
            u0: raw.u0.unwrap_or(match raw.kind {
                PdeKind::Heat => InitialProfile::Const(g0),
                PdeKind::Wave => InitialProfile::Const(0.0),
            }),
            materials: raw.materials,
            q_max: raw.q_max.unwrap_or(match raw.kind {
                PdeKind::Heat => DEFAULT_Q_MAX_HEAT,
                PdeKind::Wave => DEFAULT_Q_MAX_WAVE,
            }),
            u_lo: raw.u_lo,
            u_hi: raw.u_hi,
            lumped_mass: raw.lumped_mass,
        };
        system.validate()?;

        let disc = raw.grid.unwrap_or_else(|| Discretization::default_for(&system));
        disc.validate()?;

        Ok(Problem { system, disc, formula, regions, cspec: raw.stl.cspec })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Problem, ProblemError> {
        let text = std::fs::read_to_string(path)?;
        Problem::from_json(&text)
    }

    /// Serialize back to the file schema (regions as predicate objects).
    pub fn to_json(&self) -> String {
        let file = ProblemFile {
            kind: self.system.kind,
            length: self.system.length,
            tmax: self.system.tmax,
            g0: Some(self.system.g0),
            u0: Some(self.system.u0.clone()),
            materials: self.system.materials.clone(),
            q_max: Some(self.system.q_max),
            u_lo: self.system.u_lo,
            u_hi: self.system.u_hi,
            lumped_mass: self.system.lumped_mass,
            grid: Some(self.disc),
            stl: StlSection {
                regions: self
                    .regions
                    .iter()
                    .map(|(k, v)| (k.clone(), RegionSpec::Pred(*v)))
                    .collect(),
                cspec: self.cspec.clone(),
            },
        };
        serde_json::to_string_pretty(&file).expect("problem schema serializes")
    }

    /// Build a problem from parts, regenerating the region map and cspec
    /// from the formula.
    pub fn new(system: PdeSystem, disc: Discretization, formula: StlFormula) -> Problem {
        let (regions, cspec) = crate::stl::print_cspec(&formula);
        Problem { system, disc, formula, regions, cspec }
    }

    /// Domain validity of the formula against this problem's rod and horizon.
    pub fn validity(&self) -> ValidityReport {
        validate(&self.formula, &self.system)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::TemporalOp;

    const BAND_CAP: &str = r#"{
      "kind": "heat", "L": 100.0, "tmax": 5.0,
      "materials": [{"end": 100.0, "rho": 4e-6, "c": 4e8, "kappa": 1.5e6}],
      "stl": {
        "regions": {
          "A": {"x_lo": 30, "x_hi": 60, "cmp": "<", "a": 0.25, "b": 303},
          "B": "[30, 60], \">\", 0.25 * x + 297",
          "C": {"x_lo": 100, "x_hi": 100, "cmp": "<", "a": 0, "b": 345}
        },
        "cspec": "(((G_[4, 5] (A)) & (G_[4, 5] (B))) & (G_[0, 5] (C)))"
      }
    }"#;

    #[test]
    fn defaults_fill_in_for_a_minimal_heat_file() {
        let p = Problem::from_json(BAND_CAP).unwrap();
        assert_eq!(p.system.g0, 300.0);
        assert_eq!(p.system.u0, InitialProfile::Const(300.0));
        assert_eq!(p.system.q_max, 1e6);
        assert_eq!(p.disc, Discretization::new(20, 100));
        assert!(!p.system.lumped_mass);
        assert_eq!(p.formula.atoms().len(), 3);
        assert_eq!(p.formula.atoms()[0].op, TemporalOp::Globally);
        assert!(p.validity().valid);
    }

    #[test]
    fn textual_and_object_regions_agree() {
        let p = Problem::from_json(BAND_CAP).unwrap();
        let a = &p.regions["A"];
        let b = &p.regions["B"];
        assert_eq!((a.x_lo, a.x_hi), (b.x_lo, b.x_hi));
        assert_eq!(a.slope, b.slope);
        assert_eq!(b.intercept, 297.0);
    }

    #[test]
    fn json_round_trips_through_to_json() {
        let p = Problem::from_json(BAND_CAP).unwrap();
        let back = Problem::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn bad_files_report_the_right_layer() {
        assert!(matches!(
            Problem::from_json("{"),
            Err(ProblemError::Json(_))
        ));
        let bad_label = BAND_CAP.replace("(G_[0, 5] (C))", "(G_[0, 5] (D))");
        assert!(matches!(
            Problem::from_json(&bad_label),
            Err(ProblemError::Stl(_))
        ));
        let bad_material = BAND_CAP.replace("\"kappa\": 1.5e6", "\"kappa\": -1");
        assert!(matches!(
            Problem::from_json(&bad_material),
            Err(ProblemError::Model(_))
        ));
    }

    #[test]
    fn wave_defaults_differ() {
        let text = r#"{
          "kind": "wave", "L": 100000, "tmax": 1.0,
          "materials": [{"end": 100000, "rho": 7.8e-6, "E": 2.2e8}],
          "stl": {
            "regions": {"A": {"x_lo": 0, "x_hi": 50000, "cmp": "<", "a": 0, "b": 2}},
            "cspec": "(G_[0, 1] (A))"
          }
        }"#;
        let p = Problem::from_json(text).unwrap();
        assert_eq!(p.system.g0, 0.0);
        assert_eq!(p.system.u0, InitialProfile::Const(0.0));
        assert_eq!(p.system.q_max, 50.0);
        assert_eq!(p.system.state_bounds(), (-10.0, 10.0));
    }
}
