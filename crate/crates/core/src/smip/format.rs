//! Versioned plain-text instance files.
//!
//! Tokens are whitespace separated; blank lines and lines starting with `#`
//! are ignored. Reals are written with Rust's shortest round-trip
//! formatting, so `parse_instance(&serialize_instance(i)) == i` holds bit for
//! bit.
//!
//! ```text
//! lotus-instance 1
//! type production
//! resources <R>
//! furniture <F>
//! c <R reals>
//! u <R reals>
//! cap <R reals>
//! q <F reals>
//! f <F reals>
//! batch <F reals>
//! w <nnz>
//! <r> <f> <value>                  (nnz lines)
//! scenarios <S>
//! scenario <p> <F demands>         (S lines)
//! end
//! ```
//!
//! A `type general` body states the full two-stage data:
//!
//! ```text
//! coupling equality|inequality
//! first_vars <n>
//! var <lower> <upper> <kind>       (n lines)
//! c <n reals>
//! first_rows <m>
//! senses <m senses>
//! b <m reals>
//! a <nnz>
//! <row> <col> <value>
//! second_vars <k>
//! var <lower> <upper> <kind>       (k lines)
//! scenarios <S>
//! scenario <p>                     (then, per scenario:)
//! xi <reals>
//! q <k reals>
//! rows <m_s>
//! senses <m_s senses>
//! h <m_s reals>
//! t <nnz>
//! <row> <col> <value>
//! w <nnz>
//! <row> <col> <value>
//! end
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::FormatError;
use crate::mip::{RowSense, VarKind, VariableSpec};
use crate::scalar::Real;
use crate::smip::{
    Coupling, ProductionInstance, ProductionScenario, ScenarioData, SparseMatrix, TwoStageProblem,
};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "lotus-instance";

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceFile<T> {
    Production(ProductionInstance<T>),
    General(TwoStageProblem<T>),
}

impl<T: Real> InstanceFile<T> {
    pub fn to_problem(&self) -> Result<TwoStageProblem<T>, crate::error::ModelError> {
        match self {
            InstanceFile::Production(p) => crate::smip::build_production_problem(p),
            InstanceFile::General(p) => Ok(p.clone()),
        }
    }

    /// `|F|` for production instances, otherwise the length of `ξ`.
    pub fn default_omega(&self) -> usize {
        match self {
            InstanceFile::Production(p) => p.num_furniture(),
            InstanceFile::General(p) => p.scenarios.first().map_or(0, |s| s.xi.len()),
        }
    }
}

fn push_vec<T: Real>(out: &mut String, key: &str, v: &[T]) {
    out.push_str(key);
    for x in v {
        let _ = write!(out, " {x}");
    }
    out.push('\n');
}

fn push_matrix<T: Real>(out: &mut String, key: &str, m: &SparseMatrix<T>) {
    let _ = writeln!(out, "{key} {}", m.entries.len());
    for (r, c, v) in &m.entries {
        let _ = writeln!(out, "{r} {c} {v}");
    }
}

fn push_vars<T: Real>(out: &mut String, key: &str, vars: &[VariableSpec<T>]) {
    let _ = writeln!(out, "{key} {}", vars.len());
    for v in vars {
        let _ = writeln!(out, "var {} {} {}", v.lower, v.upper, v.kind.as_str());
    }
}

fn push_senses(out: &mut String, senses: &[RowSense]) {
    out.push_str("senses");
    for s in senses {
        out.push(' ');
        out.push_str(s.as_str());
    }
    out.push('\n');
}

pub fn serialize_instance<T: Real>(instance: &InstanceFile<T>) -> String {
    let mut out = format!("{MAGIC} {FORMAT_VERSION}\n");
    match instance {
        InstanceFile::Production(p) => {
            out.push_str("type production\n");
            let _ = writeln!(out, "resources {}", p.num_resources());
            let _ = writeln!(out, "furniture {}", p.num_furniture());
            push_vec(&mut out, "c", &p.c);
            push_vec(&mut out, "u", &p.u);
            push_vec(&mut out, "cap", &p.cap);
            push_vec(&mut out, "q", &p.q);
            push_vec(&mut out, "f", &p.f);
            push_vec(&mut out, "batch", &p.batch);
            push_matrix(&mut out, "w", &p.w);
            let _ = writeln!(out, "scenarios {}", p.scenarios.len());
            for sc in &p.scenarios {
                let _ = write!(out, "scenario {}", sc.probability);
                for d in &sc.demand {
                    let _ = write!(out, " {d}");
                }
                out.push('\n');
            }
        }
        InstanceFile::General(p) => {
            out.push_str("type general\n");
            let _ = writeln!(out, "coupling {}", p.coupling.as_str());
            push_vars(&mut out, "first_vars", &p.first_stage);
            push_vec(&mut out, "c", &p.c);
            let _ = writeln!(out, "first_rows {}", p.b.len());
            push_senses(&mut out, &p.a_senses);
            push_vec(&mut out, "b", &p.b);
            push_matrix(&mut out, "a", &p.a);
            push_vars(&mut out, "second_vars", &p.second_stage);
            let _ = writeln!(out, "scenarios {}", p.scenarios.len());
            for sc in &p.scenarios {
                let _ = writeln!(out, "scenario {}", sc.probability);
                push_vec(&mut out, "xi", &sc.xi);
                push_vec(&mut out, "q", &sc.q);
                let _ = writeln!(out, "rows {}", sc.h.len());
                push_senses(&mut out, &sc.senses);
                push_vec(&mut out, "h", &sc.h);
                push_matrix(&mut out, "t", &sc.t);
                push_matrix(&mut out, "w", &sc.w);
            }
        }
    }
    out.push_str("end\n");
    out
}

struct Reader<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a>>,
    last: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
                .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#')),
        );
        Self { lines: it.peekable(), last: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> FormatError {
        FormatError::Parse { line: self.last, msg: msg.into() }
    }

    fn next_line(&mut self) -> Result<Vec<&'a str>, FormatError> {
        match self.lines.next() {
            Some((n, toks)) => {
                self.last = n;
                Ok(toks)
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    /// Next line, which must start with `key`; returns the remaining tokens.
    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, FormatError> {
        let toks = self.next_line()?;
        if toks[0] != key {
            return Err(self.err(format!("expected `{key}`, found `{}`", toks[0])));
        }
        Ok(toks[1..].to_vec())
    }

    fn parse<V: FromStr>(&self, tok: &str) -> Result<V, FormatError> {
        tok.parse().map_err(|_| self.err(format!("cannot parse `{tok}`")))
    }

    fn count(&mut self, key: &str) -> Result<usize, FormatError> {
        let toks = self.keyed(key)?;
        if toks.len() != 1 {
            return Err(self.err(format!("`{key}` takes one count")));
        }
        self.parse(toks[0])
    }

    fn reals<T: Real>(&self, toks: &[&str], len: Option<usize>, what: &str) -> Result<Vec<T>, FormatError> {
        if let Some(n) = len {
            if toks.len() != n {
                return Err(self.err(format!("`{what}` needs {n} values, found {}", toks.len())));
            }
        }
        toks.iter()
            .map(|t| {
                let v: T = self.parse(t)?;
                if v.is_nan() {
                    return Err(self.err("NaN is not allowed"));
                }
                Ok(v)
            })
            .collect()
    }

    fn vector<T: Real>(&mut self, key: &str, len: Option<usize>) -> Result<Vec<T>, FormatError> {
        let toks = self.keyed(key)?;
        self.reals(&toks, len, key)
    }

    fn senses(&mut self, len: usize) -> Result<Vec<RowSense>, FormatError> {
        let toks = self.keyed("senses")?;
        if toks.len() != len {
            return Err(self.err(format!("`senses` needs {len} values, found {}", toks.len())));
        }
        toks.iter().map(|t| RowSense::from_str(t).map_err(|e| self.err(e))).collect()
    }

    fn matrix<T: Real>(&mut self, key: &str, rows: usize, cols: usize) -> Result<SparseMatrix<T>, FormatError> {
        let nnz = self.count(key)?;
        let mut entries = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let toks = self.next_line()?;
            if toks.len() != 3 {
                return Err(self.err("matrix entry needs `row col value`"));
            }
            let r: usize = self.parse(toks[0])?;
            let c: usize = self.parse(toks[1])?;
            let v: T = self.reals(&toks[2..], None, key)?[0];
            if r >= rows || c >= cols {
                return Err(self.err(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            entries.push((r, c, v));
        }
        let m = SparseMatrix { rows, cols, entries };
        m.check_sorted().map_err(|e| self.err(e.to_string()))?;
        Ok(m)
    }

    fn vars<T: Real>(&mut self, key: &str) -> Result<Vec<VariableSpec<T>>, FormatError> {
        let n = self.count(key)?;
        (0..n)
            .map(|_| {
                let toks = self.keyed("var")?;
                if toks.len() != 3 {
                    return Err(self.err("`var` takes lower, upper and kind"));
                }
                let b: Vec<T> = self.reals(&toks[..2], Some(2), "var")?;
                let kind = VarKind::from_str(toks[2]).map_err(|e| self.err(e))?;
                Ok(VariableSpec { lower: b[0], upper: b[1], kind })
            })
            .collect()
    }
}

fn parse_production<T: Real>(rd: &mut Reader<'_>) -> Result<ProductionInstance<T>, FormatError> {
    let nr = rd.count("resources")?;
    let nf = rd.count("furniture")?;
    let c = rd.vector("c", Some(nr))?;
    let u = rd.vector("u", Some(nr))?;
    let cap = rd.vector("cap", Some(nr))?;
    let q = rd.vector("q", Some(nf))?;
    let f = rd.vector("f", Some(nf))?;
    let batch = rd.vector("batch", Some(nf))?;
    let w = rd.matrix("w", nr, nf)?;
    let ns = rd.count("scenarios")?;
    let mut scenarios = Vec::with_capacity(ns);
    for _ in 0..ns {
        let toks = rd.keyed("scenario")?;
        let vals: Vec<T> = rd.reals(&toks, Some(nf + 1), "scenario")?;
        scenarios.push(ProductionScenario { probability: vals[0], demand: vals[1..].to_vec() });
    }
    let inst = ProductionInstance { c, u, cap, q, f, batch, w, scenarios };
    inst.validate()?;
    Ok(inst)
}

fn parse_general<T: Real>(rd: &mut Reader<'_>) -> Result<TwoStageProblem<T>, FormatError> {
    let toks = rd.keyed("coupling")?;
    let coupling = match toks.as_slice() {
        ["equality"] => Coupling::Equality,
        ["inequality"] => Coupling::Inequality,
        _ => return Err(rd.err("coupling must be `equality` or `inequality`")),
    };
    let first_stage = rd.vars("first_vars")?;
    let n = first_stage.len();
    let c = rd.vector("c", Some(n))?;
    let m = rd.count("first_rows")?;
    let a_senses = rd.senses(m)?;
    let b = rd.vector("b", Some(m))?;
    let a = rd.matrix("a", m, n)?;
    let second_stage = rd.vars("second_vars")?;
    let k = second_stage.len();
    let ns = rd.count("scenarios")?;
    let mut scenarios = Vec::with_capacity(ns);
    for _ in 0..ns {
        let toks = rd.keyed("scenario")?;
        let probability = rd.reals::<T>(&toks, Some(1), "scenario")?[0];
        let xi = rd.vector("xi", None)?;
        let q = rd.vector("q", Some(k))?;
        let rows = rd.count("rows")?;
        let senses = rd.senses(rows)?;
        let h = rd.vector("h", Some(rows))?;
        let t = rd.matrix("t", rows, n)?;
        let w = rd.matrix("w", rows, k)?;
        scenarios.push(ScenarioData { probability, q, t, w, senses, h, xi });
    }
    let p = TwoStageProblem { first_stage, c, a, a_senses, b, second_stage, scenarios, coupling };
    p.validate()?;
    Ok(p)
}

pub fn parse_instance<T: Real>(text: &str) -> Result<InstanceFile<T>, FormatError> {
    let mut rd = Reader::new(text);
    let header = rd.next_line()?;
    if header.len() != 2 || header[0] != MAGIC {
        return Err(rd.err(format!("expected `{MAGIC} {FORMAT_VERSION}` header")));
    }
    if header[1] != FORMAT_VERSION.to_string() {
        return Err(FormatError::UnsupportedVersion(header.join(" ")));
    }
    let kind = rd.keyed("type")?;
    let out = match kind.as_slice() {
        ["production"] => InstanceFile::Production(parse_production(&mut rd)?),
        ["general"] => InstanceFile::General(parse_general(&mut rd)?),
        _ => return Err(rd.err("type must be `production` or `general`")),
    };
    let end = rd.next_line()?;
    if end != ["end"] {
        return Err(rd.err("expected `end`"));
    }
    if rd.lines.peek().is_some() {
        rd.next_line()?;
        return Err(rd.err("content after `end`"));
    }
    Ok(out)
}
