//! Report types. The JSON layout is described by `schema/report.schema.json`.

use std::fmt::Write;

use jetnorm::groups::GroupElementJson;
use jetnorm::jets::MatrixJetJson;
use jetnorm::normalform::{CertificateCheck, DegreeLog};
use jetnorm::{DeterminacyReport, Error, GroupElementJet, MatrixJet, PdeReport};
use serde::Serialize;
use serde_json::json;

use crate::args::Common;

#[derive(Serialize)]
pub struct MatrixOut {
    pub text: String,
    pub jet: MatrixJetJson,
}

impl MatrixOut {
    pub fn new(a: &MatrixJet, vars: &[String]) -> Self {
        MatrixOut { text: a.to_text(vars), jet: a.to_json() }
    }
}

#[derive(Serialize)]
pub struct CertOut {
    #[serde(rename = "U")]
    pub u: String,
    #[serde(rename = "V")]
    pub v: String,
    pub element: GroupElementJson,
}

impl CertOut {
    pub fn new(g: &GroupElementJet, vars: &[String]) -> Self {
        CertOut { u: g.u().to_text(vars), v: g.v().to_text(vars), element: g.to_json() }
    }
}

#[derive(Serialize)]
pub struct NfOut {
    pub normal_form: MatrixOut,
    pub certificate: CertOut,
    pub preprocessing: Option<CertOut>,
    pub full_certificate: Option<CertOut>,
    pub log: Vec<DegreeLog>,
    pub certificate_check: CertificateCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explain: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct PdeOut {
    pub checked: MatrixOut,
    pub report: PdeReport,
}

#[derive(Serialize)]
pub struct EquivOut {
    pub j: u32,
    pub found: bool,
    pub verified: bool,
    pub witness: Option<CertOut>,
}

#[derive(Serialize)]
pub struct SmithOut {
    pub normal_form: MatrixOut,
    #[serde(rename = "U")]
    pub u: MatrixOut,
    #[serde(rename = "V")]
    pub v: MatrixOut,
    /// `null` marks an entry that is zero at this truncation.
    pub orders: Vec<Option<u32>>,
    pub verified: bool,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum ResultBody {
    Nf(NfOut),
    Pde(PdeOut),
    Determinacy(DeterminacyReport),
    Equiv(EquivOut),
    Smith(SmithOut),
}

#[derive(Serialize)]
pub struct InputEcho {
    pub group: String,
    pub vars: Vec<String>,
    pub order: u32,
    pub field: String,
    pub matrices: Vec<MatrixOut>,
}

#[derive(Serialize)]
pub struct Report {
    pub command: &'static str,
    pub input: InputEcho,
    pub warnings: Vec<String>,
    pub result: ResultBody,
}

impl Report {
    pub fn new(
        command: &'static str,
        common: &Common,
        vars: &[String],
        matrices: Vec<MatrixOut>,
        warnings: Vec<String>,
        result: ResultBody,
    ) -> Self {
        Report {
            command,
            input: InputEcho {
                group: common.group.as_str().into(),
                vars: vars.to_vec(),
                order: common.order,
                field: common.field.as_str().into(),
                matrices,
            },
            warnings,
            result,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let i = &self.input;
        let _ = writeln!(s, "{} ({}, vars {}, N = {}, {})", self.command, i.group, i.vars.join(", "), i.order, i.field);
        match &self.result {
            ResultBody::Nf(r) => {
                let _ = writeln!(s, "B = {}", r.normal_form.text);
                if let Some(h) = &r.preprocessing {
                    let _ = writeln!(s, "constant preprocessing:\n  U = {}\n  V = {}", h.u, h.v);
                }
                let _ = writeln!(s, "certificate (unipotent, U.A.V^-1 = B):\n  U = {}\n  V = {}", r.certificate.u, r.certificate.v);
                if let Some(g) = &r.full_certificate {
                    let _ = writeln!(s, "composite element:\n  U = {}\n  V = {}", g.u, g.v);
                }
                let _ = writeln!(s, "degree  dim V  dim W  removed |v|^2");
                for d in &r.log {
                    let _ = writeln!(s, "{:>6}  {:>5}  {:>5}  {}", d.degree, d.dim_v, d.dim_w, d.removed_norm2);
                }
                if r.certificate_check.ok {
                    let _ = writeln!(s, "certificate verified");
                } else {
                    let _ = writeln!(s, "certificate FAILED: {}", r.certificate_check.issues.join("; "));
                }
                for e in r.explain.iter().flatten() {
                    let _ = writeln!(s, "{e}");
                }
            }
            ResultBody::Pde(r) => {
                let p = &r.report;
                let _ = writeln!(s, "B = {}", r.checked.text);
                let _ = write!(s, "leading degree k = {}", p.k);
                if let Some(l) = &p.lambda {
                    let _ = write!(s, ", scalar part {l} removed");
                }
                let _ = writeln!(s);
                for c in &p.checks {
                    let verdict = if c.passed { "ok".to_string() } else { format!("FAIL at {}", c.first_nonzero.as_deref().unwrap_or("?")) };
                    let _ = writeln!(s, "  degree {:>2}  {:<10}  {verdict}", c.degree, c.relation);
                }
                let _ = writeln!(s, "{}", if p.passed { "all relations hold" } else { "relations violated" });
            }
            ResultBody::Determinacy(r) => {
                let _ = writeln!(s, "degree  reached/total  verdict");
                for d in &r.degrees {
                    let mut verdict = if d.contained { "contained".to_string() } else { "NOT contained".to_string() };
                    if d.trace_obstruction {
                        verdict.push_str(" (trace obstruction: identity directions unreachable)");
                    }
                    let _ = writeln!(s, "{:>6}  {:>7}/{:<5}  {verdict}", d.degree, d.dim_reached, d.dim_space);
                    if !d.contained && d.obstructions.len() <= 8 {
                        for o in &d.obstructions {
                            let _ = writeln!(s, "          missed: {o}");
                        }
                    }
                }
                let _ = writeln!(s, "{}", r.note);
            }
            ResultBody::Equiv(r) => {
                match &r.witness {
                    Some(g) => {
                        let _ = writeln!(s, "equivalent through degree {}:\n  U = {}\n  V = {}", r.j, g.u, g.v);
                    }
                    None => {
                        let _ = writeln!(s, "no invertible witness found through degree {}", r.j);
                    }
                }
            }
            ResultBody::Smith(r) => {
                let _ = writeln!(s, "B = {}", r.normal_form.text);
                let _ = writeln!(s, "U = {}\nV = {}", r.u.text, r.v.text);
                let orders: Vec<String> =
                    r.orders.iter().map(|o| o.map_or("0 at this truncation".into(), |k| k.to_string())).collect();
                let _ = writeln!(s, "orders: {}", orders.join(", "));
                let _ = writeln!(s, "{}", if r.verified { "witness verified" } else { "witness FAILED" });
            }
        }
        s
    }
}

pub fn error_json(command: &str, kind: &str, e: &Error) -> serde_json::Value {
    let mut err = json!({ "kind": kind, "message": e.to_string() });
    if let Error::Parse { line, col, .. } = e {
        err["line"] = json!(line);
        err["col"] = json!(col);
    }
    json!({ "command": command, "error": err })
}
