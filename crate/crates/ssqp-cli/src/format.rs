//! On-disk formats: the problem JSON schema, the report JSON, and the trace
//! CSV.
//!
//! Problem files are plain JSON with row-major matrices. Bound entries may be
//! the strings `"inf"` / `"-inf"`; everything else is a number. Files
//! round-trip losslessly (shortest-round-trip float formatting on write,
//! exact parse on read).

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use ssqp_core::driver::{SolveResult, TraceRecord};
use ssqp_core::kkt::KktReport;
use ssqp_core::{ClarkeReport, HSpec, Mat, Polyhedron, ProblemSpec};

/// A bound value that serializes infinities as strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound(pub f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Bound(v)),
            Raw::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(Bound(f64::INFINITY)),
                "-inf" => Ok(Bound(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!(
                    "bound must be a number, \"inf\", or \"-inf\", got {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "P")]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XFile {
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "G")]
    pub rows: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
}

/// The problem-file schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub q: f64,
    pub h: HFile,
    #[serde(rename = "X")]
    pub x_set: XFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

fn matrix_to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

impl ProblemFile {
    pub fn from_spec(spec: &ProblemSpec) -> Self {
        let h = match spec.h() {
            HSpec::Zero => HFile {
                kind: "zero".into(),
                c: None,
                p: None,
                lipschitz: None,
            },
            HSpec::Linear(c) => HFile {
                kind: "linear".into(),
                c: Some(c.clone()),
                p: None,
                lipschitz: None,
            },
            HSpec::Quadratic { p, c, lipschitz } => HFile {
                kind: "quadratic".into(),
                c: Some(c.clone()),
                p: Some(matrix_to_rows(p)),
                lipschitz: Some(*lipschitz),
            },
        };
        let set = spec.set();
        let x_set = XFile {
            lower: set.lower().iter().map(|v| Bound(*v)).collect(),
            upper: set.upper().iter().map(|v| Bound(*v)).collect(),
            rows: (set.rows().rows() > 0).then(|| matrix_to_rows(set.rows())),
            g: (set.rows().rows() > 0).then(|| set.rhs().to_vec()),
        };
        ProblemFile {
            a: matrix_to_rows(spec.matrix()),
            b: spec.offsets().to_vec(),
            q: spec.q(),
            h,
            x_set,
            x0: spec.x0().map(<[f64]>::to_vec),
        }
    }

    pub fn into_spec(self) -> Result<ProblemSpec> {
        let a = Mat::from_rows(&self.a).map_err(|e| anyhow!("field A: {e}"))?;
        let h = match self.h.kind.as_str() {
            "zero" => HSpec::Zero,
            "linear" => HSpec::Linear(
                self.h
                    .c
                    .ok_or_else(|| anyhow!("linear h requires the field c"))?,
            ),
            "quadratic" => {
                let rows = self
                    .h
                    .p
                    .ok_or_else(|| anyhow!("quadratic h requires the field P"))?;
                let p = Mat::from_rows(&rows).map_err(|e| anyhow!("field P: {e}"))?;
                let n = p.cols();
                HSpec::Quadratic {
                    c: self.h.c.unwrap_or_else(|| vec![0.0; n]),
                    lipschitz: self
                        .h
                        .lipschitz
                        .ok_or_else(|| anyhow!("quadratic h requires the field lipschitz"))?,
                    p,
                }
            }
            other => return Err(anyhow!("unknown h kind {other:?}")),
        };
        let n = a.cols();
        let rows = match self.x_set.rows {
            Some(rows) => Mat::from_rows(&rows).map_err(|e| anyhow!("field G: {e}"))?,
            None => Mat::zeros(0, n),
        };
        let set = Polyhedron::new(
            self.x_set.lower.into_iter().map(|b| b.0).collect(),
            self.x_set.upper.into_iter().map(|b| b.0).collect(),
            rows,
            self.x_set.g.unwrap_or_default(),
        )
        .map_err(|e| anyhow!("field X: {e}"))?;
        let spec = ProblemSpec::new(a, self.b, self.q, h, set)?;
        match self.x0 {
            Some(x0) => Ok(spec.with_x0(x0)?),
            None => Ok(spec),
        }
    }
}

pub fn read_problem(path: &std::path::Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read problem file {}", path.display()))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse problem file {}", path.display()))?;
    file.into_spec()
}

pub fn write_problem(path: &std::path::Path, spec: &ProblemSpec) -> Result<()> {
    let file = ProblemFile::from_spec(spec);
    let text = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("cannot write problem file {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SetsJson {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub k: Vec<usize>,
    pub tau: f64,
}

#[derive(Debug, Serialize)]
pub struct KktJson {
    pub epsilon: f64,
    pub pass: bool,
    pub projected_residual: f64,
    pub complementarity_max: f64,
    pub sets: SetsJson,
    pub multipliers: Vec<f64>,
}

impl KktJson {
    pub fn from_report(r: &KktReport) -> Self {
        KktJson {
            epsilon: r.epsilon,
            pass: r.pass,
            projected_residual: r.projected_residual,
            complementarity_max: r.complementarity_max,
            sets: SetsJson {
                i: r.sets.i.clone(),
                j: r.sets.j.clone(),
                k: r.sets.k.clone(),
                tau: r.sets.tau,
            },
            multipliers: r.multipliers.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClarkeJson {
    pub epsilon: f64,
    pub mu: f64,
    pub pass: bool,
    pub residual: f64,
}

impl ClarkeJson {
    pub fn from_report(r: &ClarkeReport) -> Self {
        ClarkeJson {
            epsilon: r.epsilon,
            mu: r.mu,
            pass: r.pass,
            residual: r.residual,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveReportJson {
    pub x_final: Vec<f64>,
    pub mu_final: f64,
    pub qp_solves: u64,
    pub bound: u64,
    pub kkt: KktJson,
}

impl SolveReportJson {
    pub fn from_result(r: &SolveResult) -> Self {
        SolveReportJson {
            x_final: r.x_final.clone(),
            mu_final: r.mu_final,
            qp_solves: r.qp_solves,
            bound: r.bound,
            kkt: KktJson::from_report(&r.kkt),
        }
    }
}

pub const TRACE_HEADER: &str = "qp_solve,outer_i,mu,F_tilde,decrease,residual_norm,r_k,L_hk";

pub fn write_trace(path: &std::path::Path, trace: &[TraceRecord]) -> Result<()> {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for t in trace {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            t.qp_solve, t.outer_i, t.mu, t.f_tilde, t.decrease, t.residual_norm, t.r_k, t.l_hk
        ));
    }
    std::fs::write(path, out)
        .with_context(|| format!("cannot write trace file {}", path.display()))?;
    Ok(())
}
