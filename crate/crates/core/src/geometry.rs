//! The dual affine plane realization used to label states.
//!
//! Points form a `d × (d+1)` array: row `m`, column `b ∈ {ö, 0, …, d−1}`.
//! A line is named by the two points it has in columns `ö` and `0`,
//! `j = (m̈, m₀)`, and passes through row
//!
//! ```text
//! m(b) = m₀ + (b/2)(2m̈ − 1)   for b ≠ ö,     m(ö) = m̈
//! ```
//!
//! in every column. [`Line::row_at`] is the only place that formula lives.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{Dimension, ModInt};
use crate::mub::BasisLabel;
use crate::report::{Check, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Point {
    pub m: ModInt,
    pub b: BasisLabel,
}

impl Point {
    pub fn new(m: ModInt, b: BasisLabel) -> Self {
        Self { m, b }
    }

    pub fn dim(self) -> Dimension {
        self.m.dim()
    }

    /// All `d(d+1)` points, column by column.
    pub fn all(dim: Dimension) -> impl Iterator<Item = Point> {
        BasisLabel::all(dim).flat_map(move |b| dim.elements().map(move |m| Point::new(m, b)))
    }

    /// Dense index in `0..d(d+1)`, matching the order of [`Point::all`].
    pub fn index(self) -> usize {
        self.b.column() * self.dim().size() + self.m.index()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.m, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Line {
    /// Row in the `ö` column.
    pub m_dd: ModInt,
    /// Row in the `b = 0` column.
    pub m0: ModInt,
}

impl Line {
    pub fn new(m_dd: ModInt, m0: ModInt) -> Self {
        Self { m_dd, m0 }
    }

    pub fn dim(self) -> Dimension {
        self.m0.dim()
    }

    /// All `d²` lines, `m̈` major.
    pub fn all(dim: Dimension) -> impl Iterator<Item = Line> {
        dim.elements().flat_map(move |m_dd| dim.elements().map(move |m0| Line::new(m_dd, m0)))
    }

    pub fn index(self) -> usize {
        self.m_dd.index() * self.dim().size() + self.m0.index()
    }

    /// The line equation.
    pub fn row_at(self, b: BasisLabel) -> ModInt {
        match b {
            BasisLabel::Cb => self.m_dd,
            BasisLabel::Standard(b) => {
                let dim = self.dim();
                self.m0 + dim.half() * b * (dim.elem(2) * self.m_dd - ModInt::one(dim))
            }
        }
    }

    pub fn contains(self, p: Point) -> bool {
        self.row_at(p.b) == p.m
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.m_dd, self.m0)
    }
}

pub fn line_points(j: Line) -> Vec<Point> {
    BasisLabel::all(j.dim()).map(|b| Point::new(j.row_at(b), b)).collect()
}

pub fn lines_through_point(p: Point) -> Vec<Line> {
    let dim = p.dim();
    match p.b {
        BasisLabel::Cb => dim.elements().map(|m0| Line::new(p.m, m0)).collect(),
        BasisLabel::Standard(b) => dim
            .elements()
            .map(|m_dd| {
                let slope = dim.half() * b * (dim.elem(2) * m_dd - ModInt::one(dim));
                Line::new(m_dd, p.m - slope)
            })
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum JoinError {
    #[error("the two points coincide")]
    SamePoint,
    /// Same-column points belong to one parallel class; no line joins them.
    #[error("points share column {0}; no line joins them")]
    Parallel(BasisLabel),
}

/// The unique line through two points in different columns.
pub fn line_through(p: Point, q: Point) -> Result<Line, JoinError> {
    if p == q {
        return Err(JoinError::SamePoint);
    }
    if p.b == q.b {
        return Err(JoinError::Parallel(p.b));
    }
    let dim = p.dim();
    let h = dim.half();
    let one = ModInt::one(dim);
    let (m_dd, anchor, b) = match (p.b, q.b) {
        (BasisLabel::Cb, BasisLabel::Standard(b)) => (p.m, q.m, b),
        (BasisLabel::Standard(b), BasisLabel::Cb) => (q.m, p.m, b),
        (BasisLabel::Standard(b), BasisLabel::Standard(b2)) => {
            // m − m′ = (b − b′)/2 · (2m̈ − 1)  ⇒  m̈ = (m − m′)/(b − b′) + 1/2
            let ratio = (p.m - q.m) * (b - b2).inv().expect("distinct columns");
            (ratio + h, p.m, b)
        }
        (BasisLabel::Cb, BasisLabel::Cb) => unreachable!("same column handled above"),
    };
    let m0 = anchor - h * b * (dim.elem(2) * m_dd - one);
    Ok(Line::new(m_dd, m0))
}

/// Where two distinct lines meet. Lines sharing `m̈` meet in the `ö` column;
/// otherwise in column `b = (m₀′ − m₀)/(m̈ − m̈′)`.
pub fn intersection(j: Line, k: Line) -> Option<Point> {
    if j == k {
        return None;
    }
    if j.m_dd == k.m_dd {
        return Some(Point::new(j.m_dd, BasisLabel::Cb));
    }
    let b = (k.m0 - j.m0) * (j.m_dd - k.m_dd).inv().expect("distinct m̈");
    let b = BasisLabel::Standard(b);
    Some(Point::new(j.row_at(b), b))
}

/// Point-by-line incidence computed by brute force from [`line_points`].
pub struct Incidence {
    dim: Dimension,
    /// `on[line][point]`.
    on: Vec<Vec<bool>>,
}

impl Incidence {
    pub fn new(dim: Dimension) -> Self {
        let points = dim.size() * (dim.size() + 1);
        let on = Line::all(dim)
            .map(|j| {
                let mut row = vec![false; points];
                for p in line_points(j) {
                    row[p.index()] = true;
                }
                row
            })
            .collect();
        Self { dim, on }
    }

    pub fn contains(&self, j: Line, p: Point) -> bool {
        self.on[j.index()][p.index()]
    }

    pub fn lines_containing(&self, p: Point) -> impl Iterator<Item = Line> + '_ {
        Line::all(self.dim).filter(move |&j| self.contains(j, p))
    }
}

/// Checks the five incidence axioms by enumeration.
pub fn verify_dapg(dim: Dimension) -> SuiteReport {
    let d = dim.size();
    let points: Vec<Point> = Point::all(dim).collect();
    let lines: Vec<Line> = Line::all(dim).collect();
    let inc = Incidence::new(dim);

    let mut counts = Check::new("(a) counts");
    counts.case(lines.len() == d * d, || format!("{} lines, expected {}", lines.len(), d * d));
    counts.case(points.len() == d * (d + 1), || {
        format!("{} points, expected {}", points.len(), d * (d + 1))
    });
    let distinct: BTreeSet<Vec<Point>> = lines.iter().map(|&j| line_points(j)).collect();
    counts.case(distinct.len() == d * d, || "two line names give the same point set".into());

    let mut lines_meet = Check::new("(b) distinct lines share exactly one point");
    let mut formula = Check::new("(b) intersection formula");
    for (i, &j) in lines.iter().enumerate() {
        for &k in &lines[i + 1..] {
            let shared: Vec<Point> = points.iter().copied().filter(|&p| inc.contains(j, p) && inc.contains(k, p)).collect();
            lines_meet.case(shared.len() == 1, || format!("{j} and {k} share {} points", shared.len()));
            formula.case(shared.first().copied() == intersection(j, k), || {
                format!("{j} ∩ {k}: formula {:?}, enumeration {shared:?}", intersection(j, k))
            });
        }
    }

    let mut joined = Check::new("(b,e) cross-column points lie on exactly one line");
    let mut join_formula = Check::new("line_through agrees with enumeration");
    let mut disjoint = Check::new("(d) same-column points share no line");
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            let common: Vec<Line> = inc.lines_containing(p).filter(|&j| inc.contains(j, q)).collect();
            if p.b == q.b {
                disjoint.case(common.is_empty(), || format!("{p} and {q} share {} lines", common.len()));
                join_formula.case(line_through(p, q) == Err(JoinError::Parallel(p.b)), || {
                    format!("line_through({p}, {q}) should be parallel")
                });
            } else {
                joined.case(common.len() == 1, || format!("{p} and {q} lie on {} common lines", common.len()));
                join_formula.case(common.first().map(|&j| Ok(j)) == Some(line_through(p, q)), || {
                    format!("line_through({p}, {q}) = {:?}, enumeration {common:?}", line_through(p, q))
                });
            }
        }
    }

    let mut degrees = Check::new("(c) d lines per point, d+1 points per line");
    let mut through = Check::new("(c) lines_through_point agrees with enumeration");
    for &p in &points {
        let on: Vec<Line> = inc.lines_containing(p).collect();
        degrees.case(on.len() == d, || format!("{p} is on {} lines", on.len()));
        let mut listed = lines_through_point(p);
        listed.sort();
        through.case(listed == on, || format!("lines_through_point({p}) = {listed:?}"));
    }
    for &j in &lines {
        let n = points.iter().filter(|&&p| inc.contains(j, p)).count();
        degrees.case(n == d + 1, || format!("{j} has {n} points"));
        let mut cols: Vec<usize> = line_points(j).iter().map(|p| p.b.column()).collect();
        cols.sort_unstable();
        degrees.case(cols == (0..=d).collect::<Vec<_>>(), || format!("{j} misses a column"));
    }

    let mut classes = Check::new("(d) columns partition the points");
    let mut seen = vec![0usize; points.len()];
    for b in BasisLabel::all(dim) {
        let class: Vec<Point> = points.iter().copied().filter(|p| p.b == b).collect();
        classes.case(class.len() == d, || format!("column {b} has {} points", class.len()));
        for p in class {
            seen[p.index()] += 1;
        }
    }
    classes.case(seen.iter().all(|&c| c == 1), || "columns overlap or miss points".into());

    let mut double = Check::new("double counting");
    let by_lines: usize = lines.iter().map(|&j| line_points(j).len()).sum();
    let by_points: usize = points.iter().map(|&p| lines_through_point(p).len()).sum();
    double.case(by_lines == d * d * (d + 1) && by_points == by_lines, || {
        format!("Σ|points| = {by_lines}, Σ|lines| = {by_points}")
    });

    SuiteReport::new(
        "geometry",
        dim.get(),
        vec![
            counts.finish(),
            lines_meet.finish(),
            formula.finish(),
            joined.finish(),
            join_formula.finish(),
            degrees.finish(),
            through.finish(),
            disjoint.finish(),
            classes.finish(),
            double.finish(),
        ],
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct LineEntry {
    pub line: Line,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IncidenceTable {
    pub d: Dimension,
    pub points: usize,
    pub lines: Vec<LineEntry>,
}

pub fn incidence_table(dim: Dimension) -> IncidenceTable {
    IncidenceTable {
        d: dim,
        points: dim.size() * (dim.size() + 1),
        lines: Line::all(dim).map(|line| LineEntry { line, points: line_points(line) }).collect(),
    }
}

/// Plain-text grid: one row per line, the row `m(b)` in each column.
pub fn incidence_text(dim: Dimension) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>8} |", "line");
    for b in BasisLabel::all(dim) {
        let _ = write!(out, " {b:>3}");
    }
    out.push('\n');
    out.push_str(&"-".repeat(10 + 4 * (dim.size() + 1)));
    out.push('\n');
    for j in Line::all(dim) {
        let _ = write!(out, "{:>8} |", j.to_string());
        for b in BasisLabel::all(dim) {
            let _ = write!(out, " {:>3}", j.row_at(b));
        }
        out.push('\n');
    }
    out
}

/// Graphviz source: points clustered by column, each line drawn as a path
/// through its points in column order with its own color.
pub fn incidence_dot(dim: Dimension) -> String {
    let mut out = String::from("graph dapg {\n  node [shape=circle fontsize=10];\n");
    for b in BasisLabel::all(dim) {
        let _ = writeln!(out, "  subgraph cluster_col{} {{\n    label=\"b={b}\";", b.column());
        for m in dim.elements() {
            let p = Point::new(m, b);
            let _ = writeln!(out, "    p{} [label=\"{p}\"];", p.index());
        }
        out.push_str("  }\n");
    }
    let n = Line::all(dim).count() as f64;
    for (i, j) in Line::all(dim).enumerate() {
        let hue = i as f64 / n;
        let pts = line_points(j);
        for w in pts.windows(2) {
            let _ = writeln!(
                out,
                "  p{} -- p{} [color=\"{hue:.3} 0.8 0.8\" tooltip=\"{j}\"];",
                w[0].index(),
                w[1].index()
            );
        }
    }
    out.push_str("}\n");
    out
}
