//! Report documents and where they go.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use meslab_core::geometry::{IncidenceTable, Line};
use meslab_core::mes::{MesBasis, OverlapMatrix};
use meslab_core::mub::MubTable;
use meslab_core::protocols::{Deduction, SimReport};
use meslab_core::verify::Suite;
use meslab_core::{Dimension, ModInt, SuiteReport};
use serde::Serialize;
use serde_json::{Map, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

/// A finished report, ready to be written.
#[derive(Debug)]
pub struct Document {
    command: &'static str,
    d: Dimension,
    ext: &'static str,
    bytes: Vec<u8>,
}

impl Document {
    /// Provenance keys first, then the body's own fields.
    pub fn json(command: &'static str, d: Dimension, seed: Option<u64>, body: &impl Serialize) -> Result<Self> {
        let mut doc = Map::new();
        doc.insert("tool_version".into(), TOOL_VERSION.into());
        doc.insert("command".into(), command.into());
        doc.insert("d".into(), d.get().into());
        doc.insert("seed".into(), seed.map_or(Value::Null, Value::from));
        match serde_json::to_value(body)? {
            Value::Object(fields) => {
                for (k, v) in fields {
                    doc.entry(k).or_insert(v);
                }
            }
            other => {
                doc.insert("report".into(), other);
            }
        }
        let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc))?;
        bytes.push(b'\n');
        Ok(Self {
            command,
            d,
            ext: "json",
            bytes,
        })
    }

    pub fn csv(command: &'static str, d: Dimension, bytes: Vec<u8>) -> Self {
        Self {
            command,
            d,
            ext: "csv",
            bytes,
        }
    }

    pub fn text(command: &'static str, d: Dimension, text: String) -> Self {
        Self {
            command,
            d,
            ext: "txt",
            bytes: text.into_bytes(),
        }
    }

    pub fn dot(command: &'static str, d: Dimension, text: String) -> Self {
        Self {
            command,
            d,
            ext: "dot",
            bytes: text.into_bytes(),
        }
    }
}

/// Resolves `--out` and `MESLAB_OUT`.
pub struct Sink {
    out: Option<String>,
    env_dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<String>) -> Self {
        let env_dir = std::env::var_os("MESLAB_OUT").filter(|v| !v.is_empty()).map(PathBuf::from);
        Self { out, env_dir }
    }

    fn target(&self, doc: &Document) -> Option<PathBuf> {
        match self.out.as_deref() {
            Some("-") => None,
            Some(path) => Some(PathBuf::from(path)),
            None => self
                .env_dir
                .as_ref()
                .map(|dir| dir.join(format!("{}-d{}.{}", doc.command, doc.d, doc.ext))),
        }
    }

    pub fn write(&self, doc: &Document) -> Result<()> {
        match self.target(doc) {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&doc.bytes)?;
                stdout.flush()?;
            }
            Some(path) => {
                if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                fs::write(&path, &doc.bytes).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
        }
        Ok(())
    }
}

fn csv_bytes(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn mub_csv(t: &MubTable) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["b", "m", "n", "exponent", "cb_index"])?;
        for basis in &t.bases {
            for s in &basis.states {
                match (&s.exponents, s.cb_index) {
                    (Some(e), _) => {
                        for (n, k) in e.iter().enumerate() {
                            w.write_record([basis.b.to_string(), s.m.to_string(), n.to_string(), k.to_string(), String::new()])?;
                        }
                    }
                    (None, Some(i)) => {
                        w.write_record([basis.b.to_string(), s.m.to_string(), String::new(), String::new(), i.to_string()])?;
                    }
                    (None, None) => {}
                }
            }
        }
        Ok(())
    })
}

pub fn mub_text(t: &MubTable) -> String {
    let mut out = format!("<n|m;b> = w^e(n) / sqrt({})\n", t.d);
    for basis in &t.bases {
        out.push_str(&format!("\nbasis {}\n", basis.b));
        for s in &basis.states {
            match (&s.exponents, s.cb_index) {
                (Some(e), _) => {
                    let row: Vec<String> = e.iter().map(ModInt::to_string).collect();
                    out.push_str(&format!("  m={:<3} e = [{}]\n", s.m, row.join(" ")));
                }
                (None, Some(i)) => out.push_str(&format!("  m={:<3} |{i}>\n", s.m)),
                (None, None) => {}
            }
        }
    }
    out
}

pub fn geometry_csv(t: &IncidenceTable) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["line_m_dd", "line_m0", "point_m", "point_b"])?;
        for e in &t.lines {
            for p in &e.points {
                w.write_record([e.line.m_dd.to_string(), e.line.m0.to_string(), p.m.to_string(), csv_basis(p.b)])?;
            }
        }
        Ok(())
    })
}

fn csv_basis(b: meslab_core::BasisLabel) -> String {
    if b.is_cb() {
        "cb".into()
    } else {
        b.to_string()
    }
}

#[derive(Serialize)]
pub struct PhaseTerm {
    pub n1: ModInt,
    pub n2: ModInt,
    pub phase: ModInt,
}

/// Nonzero amplitudes of one normalized line state, each `ω^phase/√d`.
#[derive(Serialize)]
pub struct LinePhases {
    pub line: Line,
    pub terms: Vec<PhaseTerm>,
}

pub fn line_phase_tables(basis: &MesBasis) -> Vec<LinePhases> {
    let dim = basis.dim();
    basis
        .lines()
        .iter()
        .map(|ls| {
            let terms = dim
                .elements()
                .flat_map(|n1| dim.elements().map(move |n2| (n1, n2)))
                .filter_map(|(n1, n2)| {
                    let a = ls.ket.amp(n1, n2);
                    (!a.is_zero()).then(|| PhaseTerm {
                        n1,
                        n2,
                        phase: a.mul_sqrt_d_pow(1).as_root().expect("line amplitudes are roots of unity over √d"),
                    })
                })
                .collect();
            LinePhases { line: ls.line, terms }
        })
        .collect()
}

#[derive(Serialize)]
pub struct MesDocument {
    pub line_states: Vec<LinePhases>,
    pub overlaps: OverlapMatrix,
}

impl MesDocument {
    pub fn new(basis: &MesBasis) -> Self {
        Self {
            line_states: line_phase_tables(basis),
            overlaps: basis.overlap_matrix(),
        }
    }
}

pub fn line_states_csv(tables: &[LinePhases]) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["line_m_dd", "line_m0", "n1", "n2", "phase"])?;
        for t in tables {
            for term in &t.terms {
                w.write_record([
                    t.line.m_dd.to_string(),
                    t.line.m0.to_string(),
                    term.n1.to_string(),
                    term.n2.to_string(),
                    term.phase.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn overlaps_csv(m: &OverlapMatrix) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["point_m", "point_b", "line_m_dd", "line_m0", "probability"])?;
        for (p, row) in m.points.iter().zip(&m.probabilities) {
            for (j, prob) in m.lines.iter().zip(row) {
                w.write_record([
                    p.m.to_string(),
                    csv_basis(p.b),
                    j.m_dd.to_string(),
                    j.m0.to_string(),
                    prob.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

#[derive(Serialize)]
pub struct VerifyDocument {
    pub suite: Suite,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn verify_csv(v: &VerifyDocument) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["suite", "check", "passed", "cases", "violations"])?;
        for s in &v.suites {
            for c in &s.checks {
                w.write_record([
                    s.suite.clone(),
                    c.name.clone(),
                    c.passed.to_string(),
                    c.cases.to_string(),
                    c.violation_count.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn verify_text(v: &VerifyDocument) -> String {
    let mut out = String::new();
    for s in &v.suites {
        for c in &s.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {:<10} {} ({} cases)\n", s.suite, c.name, c.cases));
            for msg in &c.violations {
                out.push_str(&format!("       {msg}\n"));
            }
        }
    }
    out.push_str(if v.passed { "all checks passed\n" } else { "some checks FAILED\n" });
    out
}

/// Per-basis summary rows, or the transcript when one was kept.
pub fn sim_csv(r: &SimReport) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        if let Some(records) = &r.records {
            w.write_record(["trial", "b", "king_m", "alice_m_dd", "alice_m0", "deduction", "verdict"])?;
            for rec in records {
                let deduction = match rec.deduction() {
                    Deduction::Outcome(m) => m.to_string(),
                    Deduction::Basis(b) => csv_basis(b),
                    Deduction::Undetermined => "undetermined".into(),
                };
                w.write_record([
                    rec.trial.to_string(),
                    csv_basis(rec.king.basis),
                    rec.king.outcome.to_string(),
                    rec.alice.m_dd.to_string(),
                    rec.alice.m0.to_string(),
                    deduction,
                    format!("{:?}", rec.verdict()).to_lowercase(),
                ])?;
            }
            return Ok(());
        }
        w.write_record([
            "b",
            "trials",
            "correct",
            "undetermined",
            "error",
            "exact_correct",
            "exact_undetermined",
            "exact_error",
        ])?;
        for (counts, exact) in r.empirical.per_basis.iter().zip(&r.exact.per_basis) {
            w.write_record([
                csv_basis(counts.b),
                counts.counts.trials.to_string(),
                counts.counts.correct.to_string(),
                counts.counts.undetermined.to_string(),
                counts.counts.error.to_string(),
                exact.mass.correct.to_string(),
                exact.mass.undetermined.to_string(),
                exact.mass.error.to_string(),
            ])?;
        }
        w.write_record([
            "all".to_string(),
            r.trials.to_string(),
            r.empirical.success_count.to_string(),
            r.empirical.undetermined_count.to_string(),
            r.empirical.error_count.to_string(),
            r.exact.overall.correct.to_string(),
            r.exact.overall.undetermined.to_string(),
            r.exact.overall.error.to_string(),
        ])?;
        Ok(())
    })
}
