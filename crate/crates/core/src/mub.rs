//! The `d+1` mutually unbiased bases of one qudit.
//!
//! Basis `b ∈ Z_d` holds the states
//! `|m;b⟩ = d^{-1/2} Σ_n ω^{(b/2)n(n−1) − nm} |n⟩`, with `b/2` computed as
//! `b·(d+1)/2` in `Z_d`. The computational basis is the extra label
//! [`BasisLabel::Cb`], written `ö` in the column scheme. It is not a number,
//! so no arithmetic is defined on it.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{CycNum, Dimension, ModInt};
use crate::error::{Error, Result};
use crate::hilbert::Ket;
use crate::report::{Check, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    /// The computational basis, column `ö`.
    Cb,
    Standard(ModInt),
}

impl BasisLabel {
    /// `ö, 0, 1, …, d−1` in column order.
    pub fn all(dim: Dimension) -> impl Iterator<Item = BasisLabel> + Clone {
        std::iter::once(BasisLabel::Cb).chain(dim.elements().map(BasisLabel::Standard))
    }

    /// Parses `cb`, `ö`, `o` or an integer reduced mod `d`.
    pub fn parse(dim: Dimension, s: &str) -> Result<Self> {
        match s.trim() {
            "cb" | "CB" | "ö" | "o" => Ok(BasisLabel::Cb),
            other => other
                .parse::<i64>()
                .map(|b| BasisLabel::Standard(dim.elem(b)))
                .map_err(|_| Error::InvalidConfig(format!("unrecognised basis label {other:?}"))),
        }
    }

    pub fn is_cb(self) -> bool {
        matches!(self, BasisLabel::Cb)
    }

    /// Column index in `0..=d`: `ö` is 0, basis `b` is `b+1`.
    pub fn column(self) -> usize {
        match self {
            BasisLabel::Cb => 0,
            BasisLabel::Standard(b) => b.index() + 1,
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Cb => write!(f, "ö"),
            BasisLabel::Standard(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for BasisLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BasisLabel::Cb => s.serialize_str("cb"),
            BasisLabel::Standard(b) => s.serialize_u64(b.value()),
        }
    }
}

/// A state label `(m, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MubLabel {
    pub m: ModInt,
    pub b: BasisLabel,
}

impl MubLabel {
    pub fn new(m: ModInt, b: BasisLabel) -> Self {
        Self { m, b }
    }

    /// All `d(d+1)` labels, basis by basis.
    pub fn all(dim: Dimension) -> impl Iterator<Item = MubLabel> {
        BasisLabel::all(dim).flat_map(move |b| dim.elements().map(move |m| MubLabel::new(m, b)))
    }
}

impl fmt::Display for MubLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.b)
    }
}

/// Exponent `e_n` of `⟨n|m;b⟩ = ω^{e_n}/√d` for a standard basis.
fn phase_exponent(m: ModInt, b: ModInt, n: ModInt) -> ModInt {
    let dim = m.dim();
    b * dim.half() * n * (n - ModInt::one(dim)) - n * m
}

pub fn mub_state(l: MubLabel) -> Ket {
    match l.b {
        BasisLabel::Cb => Ket::cb(l.m),
        BasisLabel::Standard(b) => {
            let dim = l.m.dim();
            let amps = dim
                .elements()
                .map(|n| CycNum::root(phase_exponent(l.m, b, n)).mul_sqrt_d_pow(-1))
                .collect();
            Ket::from_amplitudes(dim, amps).expect("uniform scale")
        }
    }
}

/// All `d` states of basis `b`, ordered by `m`.
pub fn basis_states(dim: Dimension, b: BasisLabel) -> Vec<Ket> {
    dim.elements().map(|m| mub_state(MubLabel::new(m, b))).collect()
}

/// The conjugation partner `(m̃, b̃) = (−m, −b)`; computational labels are fixed.
pub fn tilde(l: MubLabel) -> MubLabel {
    match l.b {
        BasisLabel::Cb => l,
        BasisLabel::Standard(b) => MubLabel::new(-l.m, BasisLabel::Standard(-b)),
    }
}

/// Orthonormality within each basis and `|⟨u|v⟩|² = 1/d` across bases.
pub fn verify_unbiased(dim: Dimension) -> SuiteReport {
    let labels: Vec<MubLabel> = MubLabel::all(dim).collect();
    let states: Vec<Ket> = labels.iter().map(|&l| mub_state(l)).collect();
    let one = CycNum::one(dim);
    let zero = CycNum::zero(dim);
    let inv_d = CycNum::from_ratio(dim, 1, 1);

    let mut ortho = Check::new("orthonormal bases");
    let mut unbiased = Check::new("cross-basis overlaps 1/d");
    for (i, (li, si)) in labels.iter().zip(&states).enumerate() {
        for (lj, sj) in labels.iter().zip(&states).skip(i) {
            let ip = si.inner(sj).expect("same dimension");
            if li.b == lj.b {
                let want = if li.m == lj.m { &one } else { &zero };
                ortho.case(&ip == want, || format!("⟨{li}|{lj}⟩ = {ip}"));
            } else {
                let p = ip.abs2();
                unbiased.case(p == inv_d, || format!("|⟨{li}|{lj}⟩|² = {p}"));
            }
        }
    }
    SuiteReport::new("mub", dim.get(), vec![ortho.finish(), unbiased.finish()])
}

/// `X Z^b |m;b⟩ = ω^m |m;b⟩`, and `Z|n⟩ = ω^n|n⟩` for the computational basis.
pub fn verify_eigen(dim: Dimension) -> SuiteReport {
    let mut check = Check::new("eigen relation");
    let one = ModInt::one(dim);
    for l in MubLabel::all(dim) {
        let psi = mub_state(l);
        let (lhs, rhs) = match l.b {
            BasisLabel::Cb => (psi.z_pow(one), psi.scaled(&CycNum::root(l.m))),
            BasisLabel::Standard(b) => (psi.z_pow(b).x_pow(one), psi.scaled(&CycNum::root(l.m))),
        };
        check.case(lhs == rhs, || format!("eigen relation fails for {l}"));
    }
    SuiteReport::new("mub", dim.get(), vec![check.finish()])
}

/// Entrywise conjugation maps `|m,b⟩` to `|m̃,b̃⟩`, and `tilde` is an involution.
pub fn verify_conjugation(dim: Dimension) -> SuiteReport {
    let mut closure = Check::new("conjugation closure");
    let mut involution = Check::new("tilde involution");
    for l in MubLabel::all(dim) {
        let t = tilde(l);
        closure.case(mub_state(l).tau() == mub_state(t), || format!("conj {l} ≠ {t}"));
        involution.case(tilde(t) == l, || format!("tilde(tilde({l})) ≠ {l}"));
    }
    SuiteReport::new("mub", dim.get(), vec![closure.finish(), involution.finish()])
}

/// `Σ_m ⟨m;b|n⟩ |m;b⟩ = |n⟩` for every basis and every `n`.
pub fn verify_completeness(dim: Dimension) -> SuiteReport {
    let mut check = Check::new("basis completeness");
    for b in BasisLabel::all(dim) {
        let basis = basis_states(dim, b);
        for n in dim.elements() {
            let e = Ket::cb(n);
            let rebuilt = basis
                .iter()
                .try_fold(Ket::zero(dim), |acc, s| acc.try_add(&s.scaled(&s.inner(&e)?)))
                .expect("matched parity");
            check.case(rebuilt == e, || format!("basis {b} does not resolve |{n}⟩"));
        }
    }
    SuiteReport::new("mub", dim.get(), vec![check.finish()])
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StateExponents {
    pub m: ModInt,
    /// `e_n` with `⟨n|m;b⟩ = ω^{e_n}/√d`; absent for the computational basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<ModInt>>,
    /// For the computational basis, the single index carrying amplitude 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cb_index: Option<ModInt>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BasisExponents {
    pub b: BasisLabel,
    pub states: Vec<StateExponents>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MubTable {
    pub d: Dimension,
    pub bases: Vec<BasisExponents>,
}

/// The full exponent table, read back from the constructed states.
pub fn exponent_table(dim: Dimension) -> MubTable {
    let bases = BasisLabel::all(dim)
        .map(|b| {
            let states = dim
                .elements()
                .map(|m| {
                    let psi = mub_state(MubLabel::new(m, b));
                    match b {
                        BasisLabel::Cb => StateExponents {
                            m,
                            exponents: None,
                            cb_index: Some(m),
                        },
                        BasisLabel::Standard(_) => StateExponents {
                            m,
                            exponents: Some(
                                psi.amps()
                                    .iter()
                                    .map(|a| {
                                        a.mul_sqrt_d_pow(1)
                                            .as_root()
                                            .expect("MUB amplitudes are roots of unity over √d")
                                    })
                                    .collect(),
                            ),
                            cb_index: None,
                        },
                    }
                })
                .collect();
            BasisExponents { b, states }
        })
        .collect();
    MubTable { d: dim, bases }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn std(dim: Dimension, m: i64, b: i64) -> MubLabel {
        MubLabel::new(dim.elem(m), BasisLabel::Standard(dim.elem(b)))
    }

    #[test]
    fn d3_states() {
        let d3 = dim(3);
        let s = CycNum::inv_sqrt_d(d3);
        let w = |k| CycNum::root(d3.elem(k)).mul_sqrt_d_pow(-1);
        assert_eq!(mub_state(std(d3, 0, 0)).amps(), vec![s.clone(), s.clone(), s]);
        assert_eq!(mub_state(std(d3, 1, 0)).amps(), vec![w(0), w(2), w(1)]);
        for m in d3.elements() {
            assert_eq!(mub_state(MubLabel::new(m, BasisLabel::Cb)), Ket::cb(m));
        }
    }

    #[test]
    fn tilde_examples() {
        let d3 = dim(3);
        assert_eq!(tilde(std(d3, 1, 2)), std(d3, 2, 1));
        assert_eq!(tilde(std(d3, 0, 0)), std(d3, 0, 0));
        let cb = MubLabel::new(d3.elem(2), BasisLabel::Cb);
        assert_eq!(tilde(cb), cb);
    }

    #[test]
    fn label_counts() {
        for d in [3, 5, 7] {
            let dm = dim(d);
            assert_eq!(BasisLabel::all(dm).count() as u64, d + 1);
            assert_eq!(MubLabel::all(dm).count() as u64, d * (d + 1));
        }
    }

    #[test]
    fn unbiased_small() {
        for d in [3, 7] {
            let r = verify_unbiased(dim(d));
            assert!(r.passed, "{r:?}");
            // within-basis pairs with i ≤ j, and cross-basis pairs
            let dd = d * (d + 1);
            let ortho = (d + 1) * d * (d + 1) / 2;
            assert_eq!(r.check("orthonormal bases").unwrap().cases, ortho);
            assert_eq!(r.check("cross-basis overlaps 1/d").unwrap().cases, dd * (dd + 1) / 2 - ortho);
        }
    }

    #[test]
    fn eigen_d3_example() {
        let d3 = dim(3);
        let psi = mub_state(std(d3, 1, 0));
        assert_eq!(psi.x_pow(d3.elem(1)), psi.scaled(&CycNum::root(d3.elem(1))));
    }

    #[test]
    fn eigen_and_closure() {
        for d in [3, 5] {
            assert!(verify_eigen(dim(d)).passed);
            assert!(verify_conjugation(dim(d)).passed);
            assert!(verify_completeness(dim(d)).passed);
        }
        assert_eq!(verify_eigen(dim(5)).checks[0].cases, 30);
    }

    #[test]
    fn parse_labels() {
        let d5 = dim(5);
        assert_eq!(BasisLabel::parse(d5, "cb").unwrap(), BasisLabel::Cb);
        assert_eq!(BasisLabel::parse(d5, "ö").unwrap(), BasisLabel::Cb);
        assert_eq!(BasisLabel::parse(d5, "7").unwrap(), BasisLabel::Standard(d5.elem(2)));
        assert!(BasisLabel::parse(d5, "x").is_err());
    }

    #[test]
    fn table_matches_formula() {
        let d5 = dim(5);
        let t = exponent_table(d5);
        assert_eq!(t.bases.len(), 6);
        assert_eq!(t.bases[0].b, BasisLabel::Cb);
        for be in &t.bases[1..] {
            let BasisLabel::Standard(b) = be.b else { panic!() };
            for st in &be.states {
                let want: Vec<ModInt> = d5.elements().map(|n| phase_exponent(st.m, b, n)).collect();
                assert_eq!(st.exponents.as_ref().unwrap(), &want);
            }
        }
        let json = serde_json::to_value(exponent_table(dim(3))).unwrap();
        assert_eq!(json["bases"][0]["b"], "cb");
        assert_eq!(json["bases"][1]["states"][1]["exponents"], serde_json::json!([0, 2, 1]));
    }
}
