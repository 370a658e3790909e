//! `jetnorm` command-line tool.
//!
//! Exit codes: 0 when the computation finished (whatever its verdict), 2 when
//! the column guardrail stopped it, 3 on invalid input, 1 on an internal
//! failure.

mod args;
mod report;

use std::io::Read;
use std::process::ExitCode;

use clap::Parser;
use jetnorm::gradedlin::{Limits, DEFAULT_MAX_COLUMNS};
use jetnorm::normalform::scalar_constant;
use jetnorm::{
    check_pde, determinacy_report, jet_equivalence, normal_form, one_variable_nf, parse_poly_matrix,
    verify_certificate, Error, GroupElementJet, GroupKind, MatrixJet, NormalFormOptions, ParseOptions,
};

use args::{Cli, Command, Common, Source};
use report::{CertOut, EquivOut, MatrixOut, NfOut, PdeOut, Report, ResultBody, SmithOut};

/// What went wrong, with the exit code it maps to.
struct Failure {
    code: u8,
    kind: &'static str,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let (code, kind) = match &error {
            Error::Guardrail { .. } => (2, "guardrail"),
            Error::Parse { .. } => (3, "parse"),
            Error::NotInSubspace(_) | Error::NonzeroConstantTerm | Error::NotUnipotent => (1, "internal"),
            _ => (3, "invalid-input"),
        };
        Failure { code, kind, error }
    }
}

fn read_source(arg: &str) -> Result<String, Failure> {
    let io = |e: std::io::Error| Failure::from(Error::InvalidInput(format!("cannot read '{arg}': {e}")));
    match Source::from_arg(arg) {
        Source::Inline(s) => Ok(s),
        Source::Stdin => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(io)?;
            Ok(s)
        }
        Source::File(p) => std::fs::read_to_string(p).map_err(io),
    }
}

struct Context {
    opts: ParseOptions,
    limits: Limits,
    warnings: Vec<String>,
}

impl Context {
    fn new(common: &Common) -> Result<Self, Failure> {
        let vars: Vec<String> = common.vars.iter().map(|v| v.trim().to_string()).collect();
        let opts = ParseOptions::new(vars, common.order, common.field)?;
        let limits = Limits { max_columns: common.max_columns.unwrap_or(DEFAULT_MAX_COLUMNS) };
        Ok(Context { opts, limits, warnings: Vec::new() })
    }

    fn matrix(&mut self, arg: &str) -> Result<MatrixJet, Failure> {
        let text = read_source(arg)?;
        let parsed = parse_poly_matrix(&text, &self.opts)?;
        self.warnings.extend(parsed.warnings);
        Ok(parsed.matrix)
    }

    fn out(&self, a: &MatrixJet) -> MatrixOut {
        MatrixOut::new(a, &self.opts.vars)
    }

    fn cert(&self, g: &GroupElementJet) -> CertOut {
        CertOut::new(g, &self.opts.vars)
    }
}

fn run(cmd: &Command) -> Result<Report, Failure> {
    let common = cmd.common();
    let mut cx = Context::new(common)?;
    let kind = common.group;
    let mut inputs = Vec::new();
    let body = match cmd {
        Command::Nf { explain, full_g, matrix, .. } => {
            let a = cx.matrix(matrix)?;
            inputs.push(cx.out(&a));
            let opts = NormalFormOptions { limits: cx.limits, explain: *explain, full_g: *full_g };
            let r = normal_form(&a, kind, &opts)?;
            cx.warnings.extend(r.warnings.iter().cloned());
            let check = verify_certificate(&r);
            let full = match &r.preprocessing {
                Some(_) => Some(cx.cert(&r.full_certificate()?)),
                None => None,
            };
            ResultBody::Nf(NfOut {
                normal_form: cx.out(&r.normal_form),
                certificate: cx.cert(&r.certificate),
                preprocessing: r.preprocessing.as_ref().map(|h| cx.cert(h)),
                full_certificate: full,
                log: r.log.clone(),
                certificate_check: check,
                explain: explain.then(|| r.explain.clone()),
            })
        }
        Command::VerifyPde { k, normalize, matrix, .. } => {
            let a = cx.matrix(matrix)?;
            inputs.push(cx.out(&a));
            let b = if *normalize {
                let r = normal_form(&a, kind, &NormalFormOptions { limits: cx.limits, ..Default::default() })?;
                r.normal_form
            } else {
                a
            };
            let k = match k {
                Some(k) => *k,
                None => leading_degree(&b, kind),
            };
            let report = check_pde(&b, k, kind)?.with_names(&cx.opts.vars);
            ResultBody::Pde(PdeOut { checked: cx.out(&b), report })
        }
        Command::Determinacy { k, j_max, matrix, .. } => {
            let a = cx.matrix(matrix)?;
            inputs.push(cx.out(&a));
            let j_max = j_max.unwrap_or(a.truncation());
            ResultBody::Determinacy(determinacy_report(&a, kind, *k, j_max, &cx.limits)?.with_names(&cx.opts.vars))
        }
        Command::Equiv { j, a, b, .. } => {
            let a = cx.matrix(a)?;
            let b = cx.matrix(b)?;
            inputs.push(cx.out(&a));
            inputs.push(cx.out(&b));
            let j = j.unwrap_or(a.truncation());
            let g = jet_equivalence(&a, &b, kind, j)?;
            let verified = match &g {
                Some(g) => g.act(&a.truncate(j))? == b.truncate(j),
                None => false,
            };
            ResultBody::Equiv(EquivOut { j, found: g.is_some(), verified, witness: g.as_ref().map(|g| cx.cert(g)) })
        }
        Command::Smith { matrix, .. } => {
            let a = cx.matrix(matrix)?;
            inputs.push(cx.out(&a));
            if kind != GroupKind::TwoSided {
                cx.warnings.push(format!("smith always uses two-sided equivalence; --group {kind} is ignored"));
            }
            let r = one_variable_nf(&a)?;
            let g = GroupElementJet::new(GroupKind::TwoSided, r.u.clone(), r.v.clone())?;
            let verified = g.act(&a)? == r.normal_form;
            ResultBody::Smith(SmithOut {
                normal_form: cx.out(&r.normal_form),
                u: cx.out(&r.u),
                v: cx.out(&r.v),
                orders: r.orders.clone(),
                verified,
            })
        }
    };
    Ok(Report::new(cmd.name(), common, &cx.opts.vars, inputs, cx.warnings, body))
}

/// Lowest degree carrying something besides the scalar part removed for
/// conjugacy; 0 for a matrix with a nonzero constant term.
fn leading_degree(b: &MatrixJet, kind: GroupKind) -> u32 {
    let shifted = match (kind, scalar_constant(b)) {
        (GroupKind::Conjugacy, Some(l)) => {
            b.sub(&MatrixJet::identity(b.rows(), b.nvars(), b.truncation()).scale(&l)).unwrap_or_else(|_| b.clone())
        }
        _ => b.clone(),
    };
    shifted.valuation().unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let json = cli.command.common().json;
    match run(&cli.command) {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            } else {
                for w in &r.warnings {
                    eprintln!("warning: {w}");
                }
                print!("{}", r.to_text());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report::error_json(cli.command.name(), f.kind, &f.error)).unwrap());
            }
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
