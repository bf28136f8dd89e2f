//! JSON file formats for problems, residue systems, polytope lists and
//! polynomials.
//!
//! Complex numbers are `[re, im]` pairs and polynomials are arrays of
//! `[exponents, [re, im]]` terms. Indices are 0-based.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{GermGraph, MultiPoly};
use crate::curves::{CurveFamily, ParamPoint};
use crate::polytope::LatticePolytope;
use crate::reconstruct::{ClassSpec, DivisorSpec};
use crate::residues::SquareSystem;
use crate::traces::{TraceProblem, Tolerances};

/// Indented JSON that keeps short arrays on one line.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out
}

const INLINE_WIDTH: usize = 72;

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(items) => {
            let compact = v.to_string();
            if items.is_empty() || (compact.len() <= INLINE_WIDTH && !compact.contains('{')) {
                out.push_str(&compact);
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        _ => out.push_str(&v.to_string()),
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl ToString) -> ProblemError {
    ProblemError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

/// One polynomial term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term(pub Vec<u32>, pub [f64; 2]);

pub fn c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn terms_of(p: &MultiPoly) -> Vec<Term> {
    p.terms().map(|(e, c)| Term(e.clone(), pair(*c))).collect()
}

pub fn poly_of(num_vars: usize, terms: &[Term], field: &str) -> Result<MultiPoly, ProblemError> {
    MultiPoly::from_terms(num_vars, terms.iter().map(|t| (t.0.clone(), c64(t.1)))).map_err(|e| invalid(field, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    /// Exponent vectors of `S_k`, one list per curve equation.
    pub supports: Vec<Vec<Vec<u32>>>,
    /// `a⁰_k0`.
    pub constants: Vec<[f64; 2]>,
    /// `a⁰'_k`, aligned with `supports`.
    pub coefficients: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermFile {
    pub base_point: Vec<[f64; 2]>,
    pub graph_coordinate: usize,
    pub series: Vec<Term>,
    pub truncation_order: u32,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorFile {
    pub polytope: Vec<Vec<i64>>,
    pub section: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpecFile {
    pub alpha: Vec<Vec<i64>>,
    pub divisors: Vec<DivisorFile>,
    #[serde(default)]
    pub bundles: Vec<Vec<Vec<i64>>>,
}

/// Optional overrides of [`Tolerances`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversality: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_probe_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<f64>,
}

impl ToleranceFile {
    pub fn apply(&self, mut t: Tolerances) -> Tolerances {
        if let Some(v) = self.fit {
            t.fit = v;
        }
        if let Some(v) = self.transversality {
            t.transversality = v;
        }
        if let Some(v) = self.steps {
            t.steps = v;
        }
        if let Some(v) = self.grid_size {
            t.grid_size = v;
        }
        if let Some(v) = self.grid_radius {
            t.grid_radius = Some(v);
        }
        if let Some(v) = self.max_probe_degree {
            t.max_probe_degree = v;
        }
        if let Some(v) = self.validation {
            t.validation = v;
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub family: FamilyFile,
    pub germs: Vec<GermFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_spec: Option<ClassSpecFile>,
    #[serde(default)]
    pub tolerances: ToleranceFile,
    #[serde(default)]
    pub seed: u64,
}

fn polytope(n: usize, vertices: &[Vec<i64>], field: &str) -> Result<LatticePolytope, ProblemError> {
    LatticePolytope::from_points(n, vertices).map_err(|e| invalid(field, e))
}

fn vertices_of(p: &LatticePolytope) -> Vec<Vec<i64>> {
    p.vertices().to_vec()
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_text(&serde_json::to_value(self).expect("problem files serialize"))
    }

    pub fn family(&self) -> Result<CurveFamily, ProblemError> {
        let f = &self.family;
        let base = ParamPoint::new(
            f.constants.iter().copied().map(c64).collect(),
            f.coefficients
                .iter()
                .map(|row| row.iter().copied().map(c64).collect())
                .collect(),
        );
        CurveFamily::new(self.dimension, f.supports.clone(), base).map_err(|e| invalid("family", e))
    }

    pub fn germs(&self) -> Result<Vec<GermGraph>, ProblemError> {
        let n = self.dimension;
        self.germs
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let field = format!("germs[{j}]");
                if n < 2 {
                    return Err(invalid("dimension", "must be at least 2"));
                }
                let series = poly_of(n - 1, &g.series, &format!("{field}.series"))?;
                GermGraph::new(
                    g.base_point.iter().copied().map(c64).collect(),
                    g.graph_coordinate,
                    series,
                    g.truncation_order,
                    g.radius,
                )
                .map_err(|e| invalid(field, e))
            })
            .collect()
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.apply(Tolerances::default())
    }

    /// Builds the trace problem with extra tolerance overrides on top of the
    /// file's own.
    pub fn problem(&self, overrides: &ToleranceFile) -> Result<TraceProblem, ProblemError> {
        let tol = overrides.apply(self.tolerances());
        TraceProblem::new(self.family()?, self.germs()?, tol).map_err(|e| invalid("germs", e))
    }

    pub fn class_spec(&self) -> Result<Option<ClassSpec>, ProblemError> {
        let Some(spec) = &self.class_spec else {
            return Ok(None);
        };
        let n = self.dimension;
        let alpha = polytope(n, &spec.alpha, "class_spec.alpha")?;
        let divisors = spec
            .divisors
            .iter()
            .enumerate()
            .map(|(j, d)| {
                Ok(DivisorSpec {
                    polytope: polytope(n, &d.polytope, &format!("class_spec.divisors[{j}].polytope"))?,
                    section: poly_of(n, &d.section, &format!("class_spec.divisors[{j}].section"))?,
                })
            })
            .collect::<Result<Vec<_>, ProblemError>>()?;
        let bundles = spec
            .bundles
            .iter()
            .enumerate()
            .map(|(k, b)| polytope(n, b, &format!("class_spec.bundles[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        ClassSpec::new(alpha, divisors, bundles)
            .map(Some)
            .map_err(|e| invalid("class_spec", e))
    }

    /// File describing an existing problem.
    pub fn from_problem(prob: &TraceProblem, class_spec: Option<&ClassSpec>, seed: u64) -> Self {
        let fam = prob.family();
        let base = fam.base();
        Self {
            dimension: prob.dim(),
            family: FamilyFile {
                supports: fam.supports().to_vec(),
                constants: base.constants.iter().copied().map(pair).collect(),
                coefficients: base
                    .coefficients
                    .iter()
                    .map(|r| r.iter().copied().map(pair).collect())
                    .collect(),
            },
            germs: prob
                .germs()
                .iter()
                .map(|g| GermFile {
                    base_point: g.base_point().iter().copied().map(pair).collect(),
                    graph_coordinate: g.graph_coordinate(),
                    series: terms_of(g.series()),
                    truncation_order: g.truncation_order(),
                    radius: g.radius(),
                })
                .collect(),
            class_spec: class_spec.map(|s| ClassSpecFile {
                alpha: vertices_of(s.alpha()),
                divisors: s
                    .divisors()
                    .iter()
                    .map(|d| DivisorFile {
                        polytope: vertices_of(&d.polytope),
                        section: terms_of(&d.section),
                    })
                    .collect(),
                bundles: s.bundles().iter().map(vertices_of).collect(),
            }),
            tolerances: ToleranceFile::default(),
            seed,
        }
    }
}

/// Input of the residue check: `Σ h/J` over the zeros of the equations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidueFile {
    pub dimension: usize,
    pub numerator: Vec<Term>,
    pub equations: Vec<Vec<Term>>,
    #[serde(default)]
    pub toric: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<Vec<[f64; 2]>>>,
}

impl ResidueFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn numerator(&self) -> Result<MultiPoly, ProblemError> {
        poly_of(self.dimension, &self.numerator, "numerator")
    }

    pub fn equations(&self) -> Result<Vec<MultiPoly>, ProblemError> {
        self.equations
            .iter()
            .enumerate()
            .map(|(i, e)| poly_of(self.dimension, e, &format!("equations[{i}]")))
            .collect()
    }

    pub fn system(&self) -> Result<SquareSystem, ProblemError> {
        let eqs = self.equations()?;
        match &self.zeros {
            None => SquareSystem::new(eqs),
            Some(z) => SquareSystem::with_zeros(
                eqs,
                z.iter().map(|p| p.iter().copied().map(c64).collect()).collect(),
            ),
        }
        .map_err(|e| invalid("equations", e))
    }
}

/// Input of the mixed-volume command: one vertex list per polytope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeListFile {
    pub dimension: usize,
    pub polytopes: Vec<Vec<Vec<i64>>>,
}

impl PolytopeListFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn polytopes(&self) -> Result<Vec<LatticePolytope>, ProblemError> {
        self.polytopes
            .iter()
            .enumerate()
            .map(|(i, p)| polytope(self.dimension, p, &format!("polytopes[{i}]")))
            .collect()
    }
}

/// A polynomial written by the interpolation command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub num_vars: usize,
    pub terms: Vec<Term>,
}

impl PolyFile {
    pub fn new(p: &MultiPoly) -> Self {
        Self {
            num_vars: p.num_vars(),
            terms: terms_of(p),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_text(&serde_json::to_value(self).expect("polynomials serialize"))
    }

    pub fn poly(&self) -> Result<MultiPoly, ProblemError> {
        poly_of(self.num_vars, &self.terms, "terms")
    }
}
