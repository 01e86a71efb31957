//! Point states, line states and the balance term of the two-qudit space.
//!
//! A geometry point `α = (m, b)` carries the product state
//! `|A_α⟩ = |m,b⟩₁|m̃,b̃⟩₂`. Summing a column gives the royal state
//! `|R⟩ = Σ_n |n⟩|n⟩`, the same for every column. A line `j = (m̈, m₀)`
//! carries the maximally entangled state
//!
//! ```text
//! |P_j⟩ = Σ_{α∈j} |A_α⟩ − |R⟩                                   (unnormalized)
//!       = √d · d^{-1/2} Σ_{n+n'=2m̈} ω^{−(n−n')m₀} |n⟩|n'⟩
//!       = √d · |m̈⟩_c ⊗ |2m₀⟩_r
//! ```
//!
//! [`line_state`] builds all three forms and refuses to return unless they
//! agree exactly. The normalized state is the unnormalized one divided by `√d`.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{CycNum, Dimension, ModInt};
use crate::collective::{collective_mub_state, CollectiveMode};
use crate::error::{Error, Result};
use crate::geometry::{line_points, lines_through_point, Line, Point};
use crate::hilbert::{Ket, PairKet};
use crate::mub::{mub_state, tilde, BasisLabel, MubLabel};
use crate::report::{ratio_vec_str, Check, SuiteReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointState {
    pub point: Point,
    pub ket: PairKet,
}

pub fn point_state(p: Point) -> PointState {
    let l = MubLabel::new(p.m, p.b);
    let ket = mub_state(l).tensor(&mub_state(tilde(l))).expect("same dimension");
    PointState { point: p, ket }
}

/// `Σ_n |n⟩₁|n⟩₂`, norm² `d`.
pub fn royal_state(dim: Dimension) -> PairKet {
    dim.elements()
        .map(|n| Ket::cb(n).tensor(&Ket::cb(n)).expect("same dimension"))
        .try_fold(PairKet::zero(dim, crate::hilbert::Labeling::Particle), |acc, k| acc.try_add(&k))
        .expect("scale 0 throughout")
}

/// `|R⟩/√d`.
pub fn royal_state_normalized(dim: Dimension) -> PairKet {
    royal_state(dim).mul_sqrt_d_pow(-1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineState {
    pub line: Line,
    pub ket: PairKet,
    pub normalized: bool,
}

impl LineState {
    pub fn normalized(&self) -> PairKet {
        if self.normalized {
            self.ket.clone()
        } else {
            self.ket.mul_sqrt_d_pow(-1)
        }
    }

    pub fn unnormalized(&self) -> PairKet {
        if self.normalized {
            self.ket.mul_sqrt_d_pow(1)
        } else {
            self.ket.clone()
        }
    }
}

/// `d^{-1/2} Σ_{n+n'=2m̈} ω^{−(n−n')m₀} |n⟩|n'⟩` (normalized).
pub fn line_state_explicit(j: Line) -> PairKet {
    let dim = j.dim();
    let two = dim.elem(2);
    let mut amps = vec![CycNum::zero(dim); dim.size() * dim.size()];
    for n in dim.elements() {
        let n2 = two * j.m_dd - n;
        amps[n.index() * dim.size() + n2.index()] = CycNum::root(-((n - n2) * j.m0)).mul_sqrt_d_pow(-1);
    }
    PairKet::from_amplitudes(dim, amps, crate::hilbert::Labeling::Particle).expect("uniform scale")
}

/// `|m̈⟩_c ⊗ |2m₀⟩_r`, returned in particle labeling (normalized).
pub fn line_state_collective(j: Line) -> PairKet {
    let dim = j.dim();
    let relative = collective_mub_state(
        CollectiveMode::R,
        MubLabel::new(dim.elem(2) * j.m0, BasisLabel::Standard(ModInt::zero(dim))),
    );
    let center = collective_mub_state(CollectiveMode::C, MubLabel::new(j.m_dd, BasisLabel::Cb));
    PairKet::collective_product(&relative, &center)
        .expect("same dimension")
        .to_particle()
}

/// `ω^{2m̈m₀} d^{-1/2} Σ_n |n⟩₁ ⊗ X^{2m̈} Z^{2m₀} I |n⟩₂` (normalized).
pub fn line_state_shifted(j: Line) -> PairKet {
    let dim = j.dim();
    let two = dim.elem(2);
    let sum = dim
        .elements()
        .map(|n| {
            let second = Ket::cb(n).inverted().z_pow(two * j.m0).x_pow(two * j.m_dd);
            Ket::cb(n).tensor(&second).expect("same dimension")
        })
        .try_fold(PairKet::zero(dim, crate::hilbert::Labeling::Particle), |acc, k| acc.try_add(&k))
        .expect("scale 0 throughout");
    sum.scaled(&CycNum::root(two * j.m_dd * j.m0)).mul_sqrt_d_pow(-1)
}

/// `Σ_{α∈j} |A_α⟩ − |R⟩` from supplied point states (unnormalized).
fn line_state_from_points(j: Line, point: impl Fn(Point) -> PairKet, royal: &PairKet) -> Result<PairKet> {
    line_points(j)
        .into_iter()
        .try_fold(PairKet::zero(j.dim(), crate::hilbert::Labeling::Particle), |acc, p| acc.try_add(&point(p)))?
        .try_sub(royal)
}

fn checked_line_state(j: Line, point: impl Fn(Point) -> PairKet, royal: &PairKet) -> Result<LineState> {
    let from_points = line_state_from_points(j, point, royal)?;
    let explicit = line_state_explicit(j);
    let collective = line_state_collective(j);
    if !from_points.try_eq(&explicit.mul_sqrt_d_pow(1))? {
        return Err(Error::Consistency(format!(
            "line {j}: point sum minus |R⟩ differs from √d times the explicit form"
        )));
    }
    if !explicit.try_eq(&collective)? {
        return Err(Error::Consistency(format!(
            "line {j}: explicit form differs from the collective product"
        )));
    }
    Ok(LineState {
        line: j,
        ket: explicit,
        normalized: true,
    })
}

/// The normalized line state, after checking its three constructions agree.
pub fn line_state(j: Line) -> Result<LineState> {
    checked_line_state(j, |p| point_state(p).ket, &royal_state(j.dim()))
}

/// Dense `d × d` matrix of exact entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycMatrix {
    dim: Dimension,
    entries: Vec<CycNum>,
}

impl CycMatrix {
    pub fn from_fn(dim: Dimension, f: impl Fn(ModInt, ModInt) -> CycNum) -> Self {
        let entries = dim
            .elements()
            .flat_map(|r| dim.elements().map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self { dim, entries }
    }

    pub fn identity(dim: Dimension) -> Self {
        Self::from_fn(dim, |r, c| CycNum::from_int(dim, (r == c) as i64))
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &Ket) -> Self {
        let amps = v.amps();
        Self::from_fn(v.dim(), |r, c| &amps[r.index()] * &amps[c.index()].conj())
    }

    pub fn get(&self, r: ModInt, c: ModInt) -> &CycNum {
        &self.entries[r.index() * self.dim.size() + c.index()]
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(Self { dim: self.dim, entries })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_>>()?;
        Ok(Self { dim: self.dim, entries })
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        let dim = self.dim;
        let entries = dim
            .elements()
            .flat_map(|r| dim.elements().map(move |c| (r, c)))
            .map(|(r, c)| {
                dim.elements()
                    .try_fold(CycNum::zero(dim), |acc, k| acc.try_add(&(self.get(r, k) * rhs.get(k, c))))
            })
            .collect::<Result<_>>()?;
        Ok(Self { dim, entries })
    }

    pub fn trace(&self) -> Result<CycNum> {
        self.dim
            .elements()
            .try_fold(CycNum::zero(self.dim), |acc, n| acc.try_add(self.get(n, n)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineOperator {
    pub line: Line,
    pub matrix: CycMatrix,
}

/// `⟨n|P̂_j|n'⟩ = δ_{n+n',2m̈} ω^{−(n−n')m₀}`.
pub fn line_operator_explicit(j: Line) -> CycMatrix {
    let dim = j.dim();
    let two = dim.elem(2);
    CycMatrix::from_fn(dim, |n, n2| {
        if n + n2 == two * j.m_dd {
            CycNum::root(-((n - n2) * j.m0))
        } else {
            CycNum::zero(dim)
        }
    })
}

/// `P̂_j = Σ_{α∈j} |m,b⟩⟨b,m| − I`, checked against the closed form.
pub fn line_operator(j: Line) -> Result<LineOperator> {
    let dim = j.dim();
    let summed = line_points(j)
        .into_iter()
        .map(|p| CycMatrix::projector(&mub_state(MubLabel::new(p.m, p.b))))
        .try_fold(CycMatrix::from_fn(dim, |_, _| CycNum::zero(dim)), |acc, m| acc.try_add(&m))?
        .try_sub(&CycMatrix::identity(dim))?;
    let explicit = line_operator_explicit(j);
    if summed != explicit {
        return Err(Error::Consistency(format!(
            "line {j}: projector sum differs from the closed-form matrix"
        )));
    }
    Ok(LineOperator { line: j, matrix: explicit })
}

impl LineOperator {
    pub fn squares_to_identity(&self) -> Result<bool> {
        Ok(self.matrix.try_mul(&self.matrix)? == CycMatrix::identity(self.matrix.dim))
    }

    /// `tr(P̂_j P̂_k)`.
    pub fn trace_product(&self, other: &LineOperator) -> Result<CycNum> {
        let dim = self.matrix.dim;
        dim.elements()
            .flat_map(|r| dim.elements().map(move |c| (r, c)))
            .filter(|&(r, c)| !self.matrix.get(r, c).is_zero())
            .try_fold(CycNum::zero(dim), |acc, (r, c)| {
                acc.try_add(&(self.matrix.get(r, c) * other.matrix.get(c, r)))
            })
    }
}

/// `⟨A_α|P_j⟩` against the normalized line state.
pub fn overlap_point_line(p: Point, j: Line) -> Result<CycNum> {
    point_state(p).ket.inner(&line_state(j)?.ket)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeakyMarginal {
    /// `⟨b,m|₁ P_j⟩`, a particle-2 ket.
    pub chi: Ket,
    pub norm2: CycNum,
    /// `b̃`, the basis `chi` lies along.
    pub basis: BasisLabel,
    /// The unique `m′` with `⟨m′,b̃|chi⟩ ≠ 0`.
    pub m_prime: ModInt,
}

fn leaky_from(l: MubLabel, line: &PairKet) -> Result<LeakyMarginal> {
    let dim = l.m.dim();
    let chi = line.partial_inner_1(&mub_state(l))?;
    let norm2 = chi.norm2();
    let inv_d = CycNum::from_ratio(dim, 1, 1);
    if norm2 != inv_d {
        return Err(Error::Consistency(format!("leaky marginal for {l}: norm² {norm2}, expected 1/d")));
    }
    let basis = tilde(l).b;
    let mut hit = None;
    for m in dim.elements() {
        let p = mub_state(MubLabel::new(m, basis)).inner(&chi)?.abs2();
        if p == inv_d && hit.is_none() {
            hit = Some(m);
        } else if !p.is_zero() {
            return Err(Error::Consistency(format!(
                "leaky marginal for {l} is not a single basis-{basis} state ({m}: {p})"
            )));
        }
    }
    let m_prime = hit.ok_or_else(|| Error::Consistency(format!("leaky marginal for {l} has no basis-{basis} support")))?;
    Ok(LeakyMarginal {
        chi,
        norm2,
        basis,
        m_prime,
    })
}

/// Particle 2 after projecting particle 1 of `|P_j⟩` onto `|m,b⟩`.
pub fn leaky_marginal(l: MubLabel, j: Line) -> Result<LeakyMarginal> {
    leaky_from(l, &line_state(j)?.ket)
}

/// Every point and line state of one dimension, built once.
#[derive(Clone, Debug)]
pub struct MesBasis {
    dim: Dimension,
    royal: PairKet,
    points: Vec<PointState>,
    lines: Vec<LineState>,
}

impl MesBasis {
    pub fn new(dim: Dimension) -> Result<Self> {
        let all_points: Vec<Point> = Point::all(dim).collect();
        let points: Vec<PointState> = all_points.par_iter().map(|&p| point_state(p)).collect();
        let royal = royal_state(dim);
        let all_lines: Vec<Line> = Line::all(dim).collect();
        let lines = all_lines
            .par_iter()
            .map(|&j| checked_line_state(j, |p| points[p.index()].ket.clone(), &royal))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim,
            royal,
            points,
            lines,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn royal(&self) -> &PairKet {
        &self.royal
    }

    pub fn point(&self, p: Point) -> &PointState {
        &self.points[p.index()]
    }

    pub fn line(&self, j: Line) -> &LineState {
        &self.lines[j.index()]
    }

    pub fn points(&self) -> &[PointState] {
        &self.points
    }

    pub fn lines(&self) -> &[LineState] {
        &self.lines
    }

    /// `|⟨A_α|P_j⟩|²` for every point (rows) and line (columns).
    pub fn overlap_matrix(&self) -> OverlapMatrix {
        let probabilities = self
            .points
            .par_iter()
            .map(|ps| {
                self.lines
                    .iter()
                    .map(|ls| {
                        let ip = ps.ket.inner(&ls.ket).expect("particle labeling");
                        ip.abs2().to_rational().expect("overlap probabilities are rational")
                    })
                    .collect()
            })
            .collect();
        OverlapMatrix {
            d: self.dim,
            points: self.points.iter().map(|p| p.point).collect(),
            lines: self.lines.iter().map(|l| l.line).collect(),
            probabilities,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapMatrix {
    pub d: Dimension,
    pub points: Vec<Point>,
    pub lines: Vec<Line>,
    #[serde(serialize_with = "ratio_rows")]
    pub probabilities: Vec<Vec<Ratio<i64>>>,
}

fn ratio_rows<S: serde::Serializer>(rows: &[Vec<Ratio<i64>>], s: S) -> std::result::Result<S::Ok, S::Error> {
    struct Row<'a>(&'a [Ratio<i64>]);
    impl Serialize for Row<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ratio_vec_str(self.0, s)
        }
    }
    s.collect_seq(rows.iter().map(|r| Row(r)))
}

/// Line-state identities: the alternative constructions, orthonormality
/// of the `d²` states and uniform single-particle marginals.
pub fn verify_line_states(basis: &MesBasis) -> SuiteReport {
    let dim = basis.dim;
    let one = CycNum::one(dim);
    let zero = CycNum::zero(dim);
    let inv_d = CycNum::from_ratio(dim, 1, 1);

    let mut forms = Check::new("line-state forms agree");
    let mut gram = Check::new("line states orthonormal");
    let mut marginals = Check::new("uniform particle-1 marginals");
    for ls in &basis.lines {
        let j = ls.line;
        let from_points = line_state_from_points(j, |p| basis.point(p).ket.clone(), &basis.royal);
        forms.case(from_points.as_ref().is_ok_and(|k| *k == ls.unnormalized()), || {
            format!("{j}: point-sum form differs")
        });
        forms.case(line_state_collective(j) == ls.ket, || format!("{j}: collective form differs"));
        forms.case(line_state_shifted(j) == ls.ket, || format!("{j}: shifted form differs"));
        let m = ls.ket.particle1_marginals().expect("particle labeling");
        marginals.case(m.iter().all(|w| *w == inv_d), || format!("{j}: marginals {m:?}"));
    }
    let rows: Vec<Vec<(Line, Line, CycNum)>> = basis
        .lines
        .par_iter()
        .map(|a| {
            basis
                .lines
                .iter()
                .map(|b| (a.line, b.line, a.ket.inner(&b.ket).expect("particle labeling")))
                .collect()
        })
        .collect();
    for (a, b, ip) in rows.into_iter().flatten() {
        let want = if a == b { &one } else { &zero };
        gram.case(&ip == want, || format!("⟨P_{a}|P_{b}⟩ = {ip}"));
    }
    SuiteReport::new("mes", dim.get(), vec![forms.finish(), gram.finish(), marginals.finish()])
}

/// `|⟨A_α|P_j⟩| = 1/√d` exactly when `α ∈ j` and 0 otherwise.
pub fn verify_overlaps(basis: &MesBasis) -> SuiteReport {
    let dim = basis.dim;
    let d = dim.get() as i64;
    let amp_on = CycNum::inv_sqrt_d(dim);
    let p_on = Ratio::new(1, d);
    let zero = Ratio::from_integer(0);

    let mut amplitude = Check::new("overlap amplitude 1/√d on the line, 0 off it");
    let mut probability = Check::new("overlap probability 1/d on the line, 0 off it");
    let mut sums = Check::new("per-line probability sum (d+1)/d");
    let mut line_sums = vec![Ratio::from_integer(0); basis.lines.len()];
    for ps in &basis.points {
        for ls in &basis.lines {
            let on = line_points(ls.line).contains(&ps.point);
            let ip = ps.ket.inner(&ls.ket).expect("particle labeling");
            let want = if on { amp_on.clone() } else { CycNum::zero(dim) };
            amplitude.case(ip == want, || format!("⟨A_{}|P_{}⟩ = {ip}", ps.point, ls.line));
            let p = ip.abs2().to_rational();
            probability.case(p == Some(if on { p_on } else { zero }), || {
                format!("|⟨A_{}|P_{}⟩|² = {p:?}", ps.point, ls.line)
            });
            if on {
                line_sums[ls.line.index()] += p.unwrap_or(zero);
            }
        }
    }
    for (ls, s) in basis.lines.iter().zip(&line_sums) {
        sums.case(*s == Ratio::new(d + 1, d), || format!("line {}: Σ = {s}", ls.line));
    }
    SuiteReport::new("mes", dim.get(), vec![amplitude.finish(), probability.finish(), sums.finish()])
}

/// Each particle alone is equally likely along every line.
pub fn verify_leaky(basis: &MesBasis) -> SuiteReport {
    let dim = basis.dim;
    let mut check = Check::new("leaky-particle norm² 1/d along basis b̃");
    for l in MubLabel::all(dim) {
        for ls in &basis.lines {
            let r = leaky_from(l, &ls.ket);
            check.case(r.is_ok(), || format!("{l} on {}: {}", ls.line, r.unwrap_err()));
        }
    }
    SuiteReport::new("mes", dim.get(), vec![check.finish()])
}

/// Closed form of `P̂_j`, `P̂_j² = I` and `tr(P̂_j P̂_k) = d δ_{jk}`.
pub fn verify_operators(dim: Dimension) -> SuiteReport {
    let mut formula = Check::new("P_j projector sum matches closed form");
    let mut square = Check::new("P_j squared is identity");
    let mut traces = Check::new("tr(P_j P_k) = d·δ");
    let ops: Vec<LineOperator> = Line::all(dim)
        .filter_map(|j| {
            let op = line_operator(j);
            formula.case(op.is_ok(), || format!("{j}: {}", op.as_ref().unwrap_err()));
            op.ok()
        })
        .collect();
    for op in &ops {
        square.case(op.squares_to_identity().unwrap_or(false), || format!("{}: P² ≠ I", op.line));
    }
    let d = CycNum::from_int(dim, dim.get() as i64);
    for a in &ops {
        for b in &ops {
            let t = a.trace_product(b);
            let want = if a.line == b.line { d.clone() } else { CycNum::zero(dim) };
            traces.case(t.as_ref().is_ok_and(|t| *t == want), || {
                format!("tr(P_{} P_{}) = {t:?}", a.line, b.line)
            });
        }
    }
    SuiteReport::new("mes", dim.get(), vec![formula.finish(), square.finish(), traces.finish()])
}

/// The balance identities: column sums, the sum over all lines, and point
/// reconstruction from the `d` lines through it.
pub fn verify_balance(basis: &MesBasis) -> SuiteReport {
    let dim = basis.dim;
    let inv_d = CycNum::from_ratio(dim, 1, 1);
    let zero_pair = || PairKet::zero(dim, crate::hilbert::Labeling::Particle);

    let mut columns = Check::new("column sums equal |R⟩");
    for b in BasisLabel::all(dim) {
        let sum = dim
            .elements()
            .try_fold(zero_pair(), |acc, m| acc.try_add(&basis.point(Point::new(m, b)).ket));
        columns.case(sum.as_ref().is_ok_and(|s| *s == basis.royal), || format!("column {b}"));
    }

    let mut all_lines = Check::new("(1/d) Σ_j |P_j⟩ equals |R⟩");
    let sum = basis
        .lines
        .iter()
        .try_fold(zero_pair(), |acc, ls| acc.try_add(&ls.unnormalized()))
        .map(|s| s.scaled(&inv_d));
    all_lines.case(sum.as_ref().is_ok_and(|s| *s == basis.royal), || "line sum".into());

    let mut reconstruction = Check::new("|A_α⟩ = (1/d) Σ_{j∋α} |P_j⟩");
    for ps in &basis.points {
        let sum = lines_through_point(ps.point)
            .into_iter()
            .try_fold(zero_pair(), |acc, j| acc.try_add(&basis.line(j).unnormalized()))
            .map(|s| s.scaled(&inv_d));
        reconstruction.case(sum.as_ref().is_ok_and(|s| *s == ps.ket), || format!("point {}", ps.point));
    }
    SuiteReport::new(
        "balance",
        dim.get(),
        vec![columns.finish(), all_lines.finish(), reconstruction.finish()],
    )
}
