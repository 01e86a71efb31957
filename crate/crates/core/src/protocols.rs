//! The Mean King retrodiction game and its basis-tracking variant.
//!
//! Both protocols share one shape: prepare a two-qudit state, let the King
//! measure particle 1 in basis `b`, let Alice measure the pair in the line
//! basis, then deduce. In the Mean King game the preparation is `|R⟩/√d` and
//! Alice, told `b`, names the King's outcome `m` as the row of her line at
//! column `b`. In tracking the preparation is a line state `|P_j⟩` and Alice,
//! told nothing, names `b` from how her line meets `j`.
//!
//! Every probability involved is exact. A [`BranchTable`] holds the full tree
//! of King and Alice outcomes with their probabilities; the exhaustive
//! oracles read it directly and the Monte Carlo runner samples from it with
//! integer weights.

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{Dimension, ModInt};
use crate::error::{Error, Result};
use crate::geometry::{lines_through_point, Line, Point};
use crate::hilbert::PairKet;
use crate::mes::{royal_state_normalized, MesBasis};
use crate::mub::{mub_state, BasisLabel, MubLabel};
use crate::report::{ratio_str, Check, SuiteReport};

pub type Prob = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KingChoice {
    pub basis: BasisLabel,
    pub outcome: ModInt,
}

/// A line-basis outcome `(m̈′, m₀″)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AliceOutcome {
    pub m_dd: ModInt,
    pub m0: ModInt,
}

impl AliceOutcome {
    pub fn line(self) -> Line {
        Line::new(self.m_dd, self.m0)
    }
}

impl From<Line> for AliceOutcome {
    fn from(j: Line) -> Self {
        Self { m_dd: j.m_dd, m0: j.m0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Mkp,
    Track,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preparation {
    /// `|R⟩/√d`.
    Royal,
    Line(Line),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Deduction {
    Outcome(ModInt),
    Basis(BasisLabel),
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Undetermined,
    Error,
}

/// How the King picks his basis each round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisPolicy {
    Fixed(BasisLabel),
    /// Each of the `d+1` labels with probability `1/(d+1)`.
    #[default]
    Uniform,
}

impl BasisPolicy {
    fn bases(self, dim: Dimension) -> Vec<BasisLabel> {
        match self {
            BasisPolicy::Fixed(b) => vec![b],
            BasisPolicy::Uniform => BasisLabel::all(dim).collect(),
        }
    }
}

/// Which game is played; fixes both the preparation and the deduction rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    Mkp,
    Track(Line),
}

impl Scenario {
    pub fn protocol(self) -> Protocol {
        match self {
            Scenario::Mkp => Protocol::Mkp,
            Scenario::Track(_) => Protocol::Track,
        }
    }

    pub fn preparation(self) -> Preparation {
        match self {
            Scenario::Mkp => Preparation::Royal,
            Scenario::Track(j) => Preparation::Line(j),
        }
    }

    fn prepared_state(self, basis: &MesBasis) -> PairKet {
        match self {
            Scenario::Mkp => royal_state_normalized(basis.dim()),
            Scenario::Track(j) => basis.line(j).normalized(),
        }
    }

    /// The deduction and how it compares with what the King did.
    pub fn judge(self, king: KingChoice, alice: AliceOutcome) -> (Deduction, Verdict) {
        match self {
            Scenario::Mkp => {
                let m = mkp_deduce(alice, king.basis);
                let v = if m == king.outcome { Verdict::Correct } else { Verdict::Error };
                (Deduction::Outcome(m), v)
            }
            Scenario::Track(j) => match track_deduce(j, alice) {
                None => (Deduction::Undetermined, Verdict::Undetermined),
                Some(b) => {
                    let v = if b == king.basis { Verdict::Correct } else { Verdict::Error };
                    (Deduction::Basis(b), v)
                }
            },
        }
    }
}

/// One simulated round. The verdict is derived from the other fields when
/// serialized, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub trial: u64,
    pub scenario: Scenario,
    pub king: KingChoice,
    pub alice: AliceOutcome,
}

impl MeasurementRecord {
    pub fn deduction(&self) -> Deduction {
        self.scenario.judge(self.king, self.alice).0
    }

    pub fn verdict(&self) -> Verdict {
        self.scenario.judge(self.king, self.alice).1
    }
}

impl Serialize for MeasurementRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (deduction, verdict) = self.scenario.judge(self.king, self.alice);
        let mut st = s.serialize_struct("MeasurementRecord", 7)?;
        st.serialize_field("trial", &self.trial)?;
        st.serialize_field("protocol", &self.scenario.protocol())?;
        st.serialize_field("preparation", &self.scenario.preparation())?;
        st.serialize_field("king", &self.king)?;
        st.serialize_field("alice", &self.alice)?;
        st.serialize_field("deduction", &deduction)?;
        st.serialize_field("verdict", &verdict)?;
        st.end()
    }
}

/// The row of Alice's line at the revealed column.
pub fn mkp_deduce(a: AliceOutcome, b: BasisLabel) -> ModInt {
    a.line().row_at(b)
}

/// The King's basis from Alice's line `j′` and the prepared line `j`;
/// `None` when `j′ = j`.
pub fn track_deduce(prepared: Line, a: AliceOutcome) -> Option<BasisLabel> {
    if a.m_dd != prepared.m_dd {
        let slope = (prepared.m_dd - a.m_dd).inv().expect("nonzero difference");
        Some(BasisLabel::Standard((a.m0 - prepared.m0) * slope))
    } else if a.m0 != prepared.m0 {
        Some(BasisLabel::Cb)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KingBranch {
    pub outcome: ModInt,
    pub probability: Prob,
    /// `|m,b⟩₁ ⊗ χ/‖χ‖`.
    pub post: PairKet,
}

/// `1/√p` as a power of `√d`, for `p = d^{-k}`.
fn inverse_sqrt_power(p: Prob, d: i64) -> Option<i32> {
    if *p.numer() != 1 {
        return None;
    }
    let (mut den, mut k) = (*p.denom(), 0);
    while den % d == 0 {
        den /= d;
        k += 1;
    }
    (den == 1).then_some(k)
}

/// Every King outcome in basis `b` with its exact probability and post-state.
/// Zero-probability outcomes are omitted.
pub fn king_distribution(psi: &PairKet, b: BasisLabel) -> Result<Vec<KingBranch>> {
    let dim = psi.dim();
    let psi = psi.to_particle();
    if !psi.is_normalized() {
        return Err(Error::InvalidConfig("King measurement needs a normalized state".into()));
    }
    let mut out = Vec::new();
    let mut total = Prob::from_integer(0);
    for m in dim.elements() {
        let phi = mub_state(MubLabel::new(m, b));
        let chi = psi.partial_inner_1(&phi)?;
        if chi.is_zero() {
            continue;
        }
        let p = chi.norm2().to_rational().ok_or_else(|| {
            Error::NotExactlyNormalizable(format!("outcome {m} in basis {b} has irrational probability"))
        })?;
        let k = inverse_sqrt_power(p, dim.get() as i64)
            .ok_or_else(|| Error::NotExactlyNormalizable(format!("outcome {m} in basis {b} has probability {p}")))?;
        let post = phi.tensor(&chi.mul_sqrt_d_pow(k))?;
        total += p;
        out.push(KingBranch {
            outcome: m,
            probability: p,
            post,
        });
    }
    if total != Prob::from_integer(1) {
        return Err(Error::Consistency(format!("King outcome probabilities in basis {b} sum to {total}")));
    }
    Ok(out)
}

/// Samples the King's outcome; returns it with the post-measurement state.
pub fn king_measure(psi: &PairKet, b: BasisLabel, rng: &mut impl Rng) -> Result<(ModInt, PairKet)> {
    let branches = king_distribution(psi, b)?;
    let i = Sampler::new(branches.iter().map(|k| k.probability)).sample(rng);
    let k = branches.into_iter().nth(i).expect("index in range");
    Ok((k.outcome, k.post))
}

/// Alice's line-basis outcome probabilities. Zero-probability outcomes are
/// omitted.
pub fn alice_distribution(basis: &MesBasis, psi: &PairKet) -> Result<Vec<(AliceOutcome, Prob)>> {
    let psi = psi.to_particle();
    let mut out = Vec::new();
    let mut total = Prob::from_integer(0);
    for ls in basis.lines() {
        let ip = ls.ket.inner(&psi)?;
        if ip.is_zero() {
            continue;
        }
        let p = ip
            .abs2()
            .to_rational()
            .ok_or_else(|| Error::Consistency(format!("line {} has irrational probability", ls.line)))?;
        total += p;
        out.push((AliceOutcome::from(ls.line), p));
    }
    if total != Prob::from_integer(1) {
        return Err(Error::Consistency(format!("line-basis probabilities sum to {total}")));
    }
    Ok(out)
}

pub fn alice_measure(basis: &MesBasis, psi: &PairKet, rng: &mut impl Rng) -> Result<AliceOutcome> {
    let dist = alice_distribution(basis, psi)?;
    let i = Sampler::new(dist.iter().map(|(_, p)| *p)).sample(rng);
    Ok(dist[i].0)
}

/// Draws an index with exact rational weights summing to 1.
#[derive(Clone, Debug)]
struct Sampler {
    cumulative: Vec<u64>,
}

impl Sampler {
    fn new(weights: impl Iterator<Item = Prob> + Clone) -> Self {
        let den = weights.clone().fold(1i64, |acc, w| acc.lcm(w.denom()));
        let mut acc = 0u64;
        let cumulative = weights
            .map(|w| {
                acc += (w.numer() * (den / w.denom())) as u64;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("at least one outcome");
        let x = rng.gen_range(0..total);
        self.cumulative.partition_point(|&c| c <= x)
    }
}

#[derive(Clone, Debug)]
struct KingNode {
    outcome: ModInt,
    probability: Prob,
    alice: Vec<(AliceOutcome, Prob)>,
    alice_sampler: Sampler,
}

#[derive(Clone, Debug)]
struct BasisNode {
    basis: BasisLabel,
    kings: Vec<KingNode>,
    king_sampler: Sampler,
}

/// The exact outcome tree of one scenario, for every King basis.
#[derive(Clone, Debug)]
pub struct BranchTable {
    dim: Dimension,
    scenario: Scenario,
    bases: Vec<BasisNode>,
}

/// One leaf of the outcome tree. `probability` is conditional on the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub king: KingChoice,
    pub alice: AliceOutcome,
    #[serde(serialize_with = "ratio_str")]
    pub probability: Prob,
    pub deduction: Deduction,
    pub verdict: Verdict,
}

impl BranchTable {
    pub fn build(basis: &MesBasis, scenario: Scenario) -> Result<Self> {
        let dim = basis.dim();
        let psi = scenario.prepared_state(basis);
        let labels: Vec<BasisLabel> = BasisLabel::all(dim).collect();
        let bases = labels
            .par_iter()
            .map(|&b| {
                let kings = king_distribution(&psi, b)?
                    .into_iter()
                    .map(|k| {
                        let alice = alice_distribution(basis, &k.post)?;
                        let alice_sampler = Sampler::new(alice.iter().map(|(_, p)| *p));
                        Ok(KingNode {
                            outcome: k.outcome,
                            probability: k.probability,
                            alice,
                            alice_sampler,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let king_sampler = Sampler::new(kings.iter().map(|k| k.probability));
                Ok(BasisNode {
                    basis: b,
                    kings,
                    king_sampler,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim, scenario, bases })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    fn node(&self, b: BasisLabel) -> &BasisNode {
        &self.bases[b.column()]
    }

    /// All leaves under basis `b`, King outcome major.
    pub fn branches(&self, b: BasisLabel) -> Vec<Branch> {
        let node = self.node(b);
        node.kings
            .iter()
            .flat_map(|k| {
                k.alice.iter().map(move |&(alice, p)| {
                    let king = KingChoice {
                        basis: b,
                        outcome: k.outcome,
                    };
                    let (deduction, verdict) = self.scenario.judge(king, alice);
                    Branch {
                        king,
                        alice,
                        probability: k.probability * p,
                        deduction,
                        verdict,
                    }
                })
            })
            .collect()
    }

    pub fn verdict_mass(&self, b: BasisLabel) -> VerdictMass {
        let mut mass = VerdictMass::default();
        for br in self.branches(b) {
            mass.add(br.verdict, br.probability);
        }
        mass
    }

    /// King outcome probabilities in basis `b`, indexed by outcome.
    pub fn king_probabilities(&self, b: BasisLabel) -> Vec<Prob> {
        let mut out = vec![Prob::from_integer(0); self.dim.size()];
        for k in &self.node(b).kings {
            out[k.outcome.index()] = k.probability;
        }
        out
    }

    fn sample(&self, b: BasisLabel, rng: &mut impl Rng) -> (KingChoice, AliceOutcome) {
        let node = self.node(b);
        let k = &node.kings[node.king_sampler.sample(rng)];
        let alice = k.alice[k.alice_sampler.sample(rng)].0;
        (KingChoice { basis: b, outcome: k.outcome }, alice)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictMass {
    #[serde(serialize_with = "ratio_str")]
    pub correct: Prob,
    #[serde(serialize_with = "ratio_str")]
    pub undetermined: Prob,
    #[serde(serialize_with = "ratio_str")]
    pub error: Prob,
}

impl Default for VerdictMass {
    fn default() -> Self {
        let z = Prob::from_integer(0);
        Self {
            correct: z,
            undetermined: z,
            error: z,
        }
    }
}

impl VerdictMass {
    fn add(&mut self, v: Verdict, p: Prob) {
        match v {
            Verdict::Correct => self.correct += p,
            Verdict::Undetermined => self.undetermined += p,
            Verdict::Error => self.error += p,
        }
    }

    pub fn total(&self) -> Prob {
        self.correct + self.undetermined + self.error
    }

    pub fn get(&self, v: Verdict) -> Prob {
        match v {
            Verdict::Correct => self.correct,
            Verdict::Undetermined => self.undetermined,
            Verdict::Error => self.error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisEnumeration {
    pub b: BasisLabel,
    pub mass: VerdictMass,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    pub d: Dimension,
    pub protocol: Protocol,
    pub preparation: Preparation,
    pub per_basis: Vec<BasisEnumeration>,
    pub checks: SuiteReport,
}

impl EnumerationReport {
    pub fn passed(&self) -> bool {
        self.checks.passed
    }

    pub fn basis(&self, b: BasisLabel) -> &BasisEnumeration {
        &self.per_basis[b.column()]
    }
}

fn enumerate(table: &BranchTable) -> EnumerationReport {
    let dim = table.dim;
    let d = dim.get() as i64;
    let one = Prob::from_integer(1);
    let per_basis: Vec<BasisEnumeration> = BasisLabel::all(dim)
        .map(|b| BasisEnumeration {
            b,
            mass: table.verdict_mass(b),
            branches: table.branches(b),
        })
        .collect();

    let mut total = Check::new("total mass 1 per basis");
    for e in &per_basis {
        total.case(e.mass.total() == one, || format!("basis {}: {}", e.b, e.mass.total()));
    }
    let mut checks = vec![total];
    match table.scenario {
        Scenario::Mkp => {
            let mut correct = Check::new("every branch retrodicts the King's outcome");
            let mut uniform = Check::new("Alice uniform on the lines through the King's point");
            for e in &per_basis {
                for br in &e.branches {
                    correct.case(br.verdict == Verdict::Correct, || format!("{br:?}"));
                }
            }
            for node in &table.bases {
                for k in &node.kings {
                    let mut want = lines_through_point(Point::new(k.outcome, node.basis));
                    want.sort();
                    let got: Vec<Line> = k.alice.iter().map(|(a, _)| a.line()).collect();
                    let flat = k.alice.iter().all(|(_, p)| *p == Prob::new(1, d));
                    uniform.case(flat && got == want, || format!("King {}({}): {:?}", k.outcome, node.basis, k.alice));
                }
            }
            checks.extend([correct, uniform]);
        }
        Scenario::Track(j) => {
            let mut errors = Check::new("no error branches");
            let mut undetermined = Check::new("undetermined mass 1/d");
            let mut correct = Check::new("correct mass (d-1)/d");
            let mut feasible = Check::new("Alice's lines obey the tracking constraint");
            for e in &per_basis {
                errors.case(e.mass.error.numer() == &0, || format!("basis {}: error mass {}", e.b, e.mass.error));
                undetermined.case(e.mass.undetermined == Prob::new(1, d), || {
                    format!("basis {}: {}", e.b, e.mass.undetermined)
                });
                correct.case(e.mass.correct == Prob::new(d - 1, d), || format!("basis {}: {}", e.b, e.mass.correct));
            }
            for node in &table.bases {
                for k in &node.kings {
                    let ok = k.alice.len() == dim.size()
                        && k.alice.iter().all(|&(a, p)| {
                            let on = match node.basis {
                                BasisLabel::Cb => a.m_dd == j.m_dd,
                                BasisLabel::Standard(b) => a.m0 - j.m0 == b * (j.m_dd - a.m_dd),
                            };
                            on && p == Prob::new(1, d)
                        });
                    feasible.case(ok, || format!("King {}({}): {:?}", k.outcome, node.basis, k.alice));
                }
            }
            checks.extend([errors, undetermined, correct, feasible]);
        }
    }
    EnumerationReport {
        d: dim,
        protocol: table.scenario.protocol(),
        preparation: table.scenario.preparation(),
        per_basis,
        checks: SuiteReport::new("protocols", dim.get(), checks.into_iter().map(Check::finish).collect()),
    }
}

/// Exhaustive oracle for the Mean King game.
pub fn enumerate_mkp(basis: &MesBasis) -> Result<EnumerationReport> {
    Ok(enumerate(&BranchTable::build(basis, Scenario::Mkp)?))
}

/// Exhaustive oracle for tracking from prepared line `j`.
pub fn enumerate_track(basis: &MesBasis, j: Line) -> Result<EnumerationReport> {
    Ok(enumerate(&BranchTable::build(basis, Scenario::Track(j))?))
}

/// The Mean King oracle plus tracking oracles for every line (`d ≤ 7`) or
/// for the `d` lines `(k, k)` otherwise, folded into one report.
pub fn verify_protocols(basis: &MesBasis) -> SuiteReport {
    let dim = basis.dim();
    let lines: Vec<Line> = if dim.get() <= 7 {
        Line::all(dim).collect()
    } else {
        dim.elements().map(|k| Line::new(k, k)).collect()
    };
    let mut reports = vec![enumerate_mkp(basis)];
    reports.extend(lines.par_iter().map(|&j| enumerate_track(basis, j)).collect::<Vec<_>>());

    let mut merged: Vec<Check> = Vec::new();
    for (i, r) in reports.into_iter().enumerate() {
        let prefix = if i == 0 { "mkp" } else { "track" };
        match r {
            Err(e) => {
                let mut c = Check::new(format!("{prefix}: branch table"));
                c.case(false, || e.to_string());
                merged.push(c);
            }
            Ok(r) => {
                for outcome in r.checks.checks {
                    let name = format!("{prefix}: {}", outcome.name);
                    let idx = match merged.iter().position(|c| c.name() == name) {
                        Some(i) => i,
                        None => {
                            merged.push(Check::new(name));
                            merged.len() - 1
                        }
                    };
                    let context = match r.preparation {
                        Preparation::Royal => "royal".to_string(),
                        Preparation::Line(j) => format!("line {j}"),
                    };
                    merged[idx].absorb(&outcome, &context);
                }
            }
        }
    }
    SuiteReport::new("protocols", dim.get(), merged.into_iter().map(Check::finish).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub policy: BasisPolicy,
    /// Keep the per-trial transcript in the report.
    pub keep_records: bool,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, policy: BasisPolicy) -> Self {
        Self {
            trials,
            seed,
            policy,
            keep_records: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisRate {
    pub b: BasisLabel,
    #[serde(flatten)]
    pub mass: VerdictMass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactRates {
    #[serde(flatten)]
    pub overall: VerdictMass,
    pub per_basis: Vec<BasisRate>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub trials: u64,
    pub correct: u64,
    pub undetermined: u64,
    pub error: u64,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        self.trials += 1;
        match v {
            Verdict::Correct => self.correct += 1,
            Verdict::Undetermined => self.undetermined += 1,
            Verdict::Error => self.error += 1,
        }
    }

    fn merge(mut self, o: &Self) -> Self {
        self.trials += o.trials;
        self.correct += o.correct;
        self.undetermined += o.undetermined;
        self.error += o.error;
        self
    }

    pub fn get(&self, v: Verdict) -> u64 {
        match v {
            Verdict::Correct => self.correct,
            Verdict::Undetermined => self.undetermined,
            Verdict::Error => self.error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisCounts {
    pub b: BasisLabel,
    #[serde(flatten)]
    pub counts: VerdictCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Empirical {
    pub success_count: u64,
    pub undetermined_count: u64,
    pub error_count: u64,
    pub success_rate: f64,
    pub undetermined_rate: f64,
    pub error_rate: f64,
    pub per_basis: Vec<BasisCounts>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub d: Dimension,
    pub protocol: Protocol,
    pub preparation: Preparation,
    pub policy: BasisPolicy,
    pub trials: u64,
    pub seed: u64,
    pub exact: ExactRates,
    pub empirical: Empirical,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<MeasurementRecord>>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stream seed for one trial: `splitmix64(seed ⊕ splitmix64(trial))`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(seed ^ splitmix64(trial))
}

fn run_trial(table: &BranchTable, cfg: &SimConfig, trial: u64) -> MeasurementRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial));
    let b = match cfg.policy {
        BasisPolicy::Fixed(b) => b,
        BasisPolicy::Uniform => {
            let col = rng.gen_range(0..=table.dim.size());
            BasisLabel::all(table.dim).nth(col).expect("column in range")
        }
    };
    let (king, alice) = table.sample(b, &mut rng);
    MeasurementRecord {
        trial,
        scenario: table.scenario,
        king,
        alice,
    }
}

/// Monte Carlo over a prebuilt table. Trials run in parallel; each draws from
/// its own stream, so results do not depend on scheduling.
pub fn simulate(table: &BranchTable, cfg: &SimConfig) -> Result<SimReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if let BasisPolicy::Fixed(b) = cfg.policy {
        if b.column() > table.dim.size() || matches!(b, BasisLabel::Standard(m) if m.dim() != table.dim) {
            return Err(Error::InvalidConfig(format!("basis {b} is not a label for d = {}", table.dim)));
        }
    }
    let dim = table.dim;
    let n_bases = dim.size() + 1;
    let fresh = || vec![VerdictCounts::default(); n_bases];
    let per_column = (0..cfg.trials)
        .into_par_iter()
        .fold(fresh, |mut acc, t| {
            let r = run_trial(table, cfg, t);
            acc[r.king.basis.column()].add(r.verdict());
            acc
        })
        .reduce(fresh, |a, b| a.iter().zip(&b).map(|(x, y)| x.merge(y)).collect());
    let records = cfg.keep_records.then(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(table, cfg, t))
            .collect::<Vec<_>>()
    });

    let bases = cfg.policy.bases(dim);
    let weight = Prob::new(1, bases.len() as i64);
    let mut overall = VerdictMass::default();
    let per_basis_exact: Vec<BasisRate> = bases
        .iter()
        .map(|&b| {
            let mass = table.verdict_mass(b);
            for v in [Verdict::Correct, Verdict::Undetermined, Verdict::Error] {
                overall.add(v, mass.get(v) * weight);
            }
            BasisRate { b, mass }
        })
        .collect();

    let total = per_column.iter().fold(VerdictCounts::default(), |a, c| a.merge(c));
    let n = cfg.trials as f64;
    Ok(SimReport {
        d: dim,
        protocol: table.scenario.protocol(),
        preparation: table.scenario.preparation(),
        policy: cfg.policy,
        trials: cfg.trials,
        seed: cfg.seed,
        exact: ExactRates {
            overall,
            per_basis: per_basis_exact,
        },
        empirical: Empirical {
            success_count: total.correct,
            undetermined_count: total.undetermined,
            error_count: total.error,
            success_rate: total.correct as f64 / n,
            undetermined_rate: total.undetermined as f64 / n,
            error_rate: total.error as f64 / n,
            per_basis: bases
                .iter()
                .map(|&b| BasisCounts {
                    b,
                    counts: per_column[b.column()],
                })
                .collect(),
        },
        records,
    })
}

pub fn run_mkp(dim: Dimension, cfg: &SimConfig) -> Result<SimReport> {
    let basis = MesBasis::new(dim)?;
    simulate(&BranchTable::build(&basis, Scenario::Mkp)?, cfg)
}

pub fn run_track(dim: Dimension, j: Line, cfg: &SimConfig) -> Result<SimReport> {
    if j.dim() != dim {
        return Err(Error::DimensionMismatch(dim.get(), j.dim().get()));
    }
    let basis = MesBasis::new(dim)?;
    simulate(&BranchTable::build(&basis, Scenario::Track(j))?, cfg)
}
