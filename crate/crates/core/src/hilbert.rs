//! Dense exact state vectors.
//!
//! A [`Ket`] lives in `C^d`, a [`PairKet`] in `C^d ⊗ C^d`. Both store integer
//! cyclotomic coefficients over one shared `√d` scale. Pair kets are indexed
//! row-major, `n₁` major and `n₂` minor; a collective-labeled pair ket uses
//! `n_r` major and `n_c` minor.
//!
//! `X` and `Z` never become matrices: `Z^k` is a phase per index and `X^k` a
//! cyclic shift of indices.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{lift, CycInt, CycNum, Dimension, ModInt};
use crate::collective::CollectiveIndex;
use crate::error::{Error, Result};

/// Coefficient storage shared by `Ket` and `PairKet`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Amplitudes {
    dim: Dimension,
    scale: u32,
    coeffs: Vec<CycInt>,
}

impl Amplitudes {
    fn zero(dim: Dimension, len: usize) -> Self {
        Self {
            dim,
            scale: 0,
            coeffs: vec![CycInt::zero(dim); len],
        }
    }

    fn from_values(dim: Dimension, values: Vec<CycNum>) -> Result<Self> {
        let mut scale: Option<u32> = None;
        for v in values.iter().filter(|v| !v.is_zero()) {
            scale = Some(match scale {
                None => v.scale(),
                Some(s) if (s + v.scale()) % 2 != 0 => {
                    return Err(Error::IncommensurableScale(s, v.scale()))
                }
                Some(s) => s.max(v.scale()),
            });
        }
        let scale = scale.unwrap_or(0);
        let coeffs = values
            .iter()
            .map(|v| {
                if v.is_zero() {
                    Ok(CycInt::zero(dim))
                } else {
                    v.lifted(scale)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::reduced(dim, scale, coeffs))
    }

    fn reduced(dim: Dimension, mut scale: u32, mut coeffs: Vec<CycInt>) -> Self {
        let d = dim.get() as i64;
        if coeffs.iter().all(CycInt::is_zero) {
            scale = 0;
        }
        while scale >= 2 && coeffs.iter().all(|c| c.coeffs().iter().all(|&x| x % d == 0)) {
            for c in &mut coeffs {
                *c = CycInt::from_coeffs(dim, c.coeffs().iter().map(|&x| x / d).collect())
                    .expect("length preserved");
            }
            scale -= 2;
        }
        Self { dim, scale, coeffs }
    }

    fn get(&self, i: usize) -> CycNum {
        CycNum::new(self.coeffs[i].clone(), self.scale)
    }

    fn values(&self) -> Vec<CycNum> {
        (0..self.coeffs.len()).map(|i| self.get(i)).collect()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CycInt::is_zero)
    }

    fn check(&self, rhs: &Self) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(self.dim.get(), rhs.dim.get()));
        }
        if self.coeffs.len() != rhs.coeffs.len() {
            return Err(Error::DimensionMismatch(
                self.coeffs.len() as u64,
                rhs.coeffs.len() as u64,
            ));
        }
        Ok(())
    }

    fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if !(self.scale + rhs.scale).is_multiple_of(2) {
            return Err(Error::IncommensurableScale(self.scale, rhs.scale));
        }
        let s = self.scale.max(rhs.scale);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| Ok(&lift(a, self.scale, s)? + &lift(b, rhs.scale, s)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::reduced(self.dim, s, coeffs))
    }

    fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            scale: self.scale,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn scaled(&self, c: &CycNum) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim, self.coeffs.len());
        }
        let coeffs = self.coeffs.iter().map(|a| a * c.numerator()).collect();
        Self::reduced(self.dim, self.scale + c.scale(), coeffs)
    }

    fn mul_sqrt_d_pow(&self, k: i32) -> Self {
        let target = self.scale as i64 - k as i64;
        if target >= 0 {
            return Self::reduced(self.dim, target as u32, self.coeffs.clone());
        }
        let t = ((-target) + 1) / 2;
        let factor = (self.dim.get() as i64).pow(t as u32);
        let coeffs = self.coeffs.iter().map(|c| c.mul_int(factor)).collect();
        Self::reduced(self.dim, (target + 2 * t) as u32, coeffs)
    }

    fn inner(&self, rhs: &Self) -> Result<CycNum> {
        self.check(rhs)?;
        let mut acc = CycInt::zero(self.dim);
        for (a, b) in self.coeffs.iter().zip(&rhs.coeffs) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = &acc + &(&a.conj() * b);
        }
        Ok(CycNum::new(acc, self.scale + rhs.scale))
    }

    fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            scale: self.scale,
            coeffs: self.coeffs.iter().map(CycInt::conj).collect(),
        }
    }

    /// `out[f(i)] = self[i]` for a permutation `f`.
    fn permuted(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut coeffs = vec![CycInt::zero(self.dim); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[f(i)] = c.clone();
        }
        Self {
            dim: self.dim,
            scale: self.scale,
            coeffs,
        }
    }

    fn mapped(&self, f: impl Fn(usize, &CycInt) -> CycInt) -> Self {
        Self {
            dim: self.dim,
            scale: self.scale,
            coeffs: self.coeffs.iter().enumerate().map(|(i, c)| f(i, c)).collect(),
        }
    }

    fn serialize_coeffs(&self) -> Vec<&[i64]> {
        self.coeffs.iter().map(CycInt::coeffs).collect()
    }
}

/// A single-particle state vector of length `d`.
///
/// Equality is structural on the reduced form, which coincides with value
/// equality whenever the two scales share a parity. Use [`Ket::try_eq`] where
/// a parity mismatch should be an error rather than `false`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ket {
    amps: Amplitudes,
}

impl Ket {
    pub fn from_amplitudes(dim: Dimension, values: Vec<CycNum>) -> Result<Self> {
        if values.len() != dim.size() {
            return Err(Error::DimensionMismatch(dim.get(), values.len() as u64));
        }
        Ok(Self {
            amps: Amplitudes::from_values(dim, values)?,
        })
    }

    pub fn zero(dim: Dimension) -> Self {
        Self {
            amps: Amplitudes::zero(dim, dim.size()),
        }
    }

    /// Computational basis state `|n⟩`; `n` is already reduced mod `d`.
    pub fn cb(n: ModInt) -> Self {
        let dim = n.dim();
        let mut amps = Amplitudes::zero(dim, dim.size());
        amps.coeffs[n.index()] = CycInt::from_int(dim, 1);
        Self { amps }
    }

    pub fn dim(&self) -> Dimension {
        self.amps.dim
    }

    pub fn scale(&self) -> u32 {
        self.amps.scale
    }

    pub fn amp(&self, n: ModInt) -> CycNum {
        self.amps.get(n.index())
    }

    pub fn amps(&self) -> Vec<CycNum> {
        self.amps.values()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_zero()
    }

    /// `Z^k`: multiplies the amplitude at `n` by `ω^{kn}`.
    pub fn z_pow(&self, k: ModInt) -> Self {
        let dim = self.dim();
        Self {
            amps: self.amps.mapped(|n, c| c.mul_root(k * dim.elem(n as i64))),
        }
    }

    /// `X^k`: `|n⟩ ↦ |n+k⟩`.
    pub fn x_pow(&self, k: ModInt) -> Self {
        let d = self.dim().size();
        Self {
            amps: self.amps.permuted(|n| (n + k.index()) % d),
        }
    }

    /// The inversion `|n⟩ ↦ |−n⟩`.
    pub fn inverted(&self) -> Self {
        let d = self.dim().size();
        Self {
            amps: self.amps.permuted(|n| (d - n) % d),
        }
    }

    /// The antiunitary `τ`: complex conjugation of the computational-basis
    /// amplitudes.
    pub fn tau(&self) -> Self {
        Self {
            amps: self.amps.conj(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<CycNum> {
        self.amps.inner(&other.amps)
    }

    pub fn norm2(&self) -> CycNum {
        self.amps.inner(&self.amps).expect("same shape")
    }

    pub fn is_normalized(&self) -> bool {
        self.norm2() == CycNum::one(self.dim())
    }

    pub fn scaled(&self, c: &CycNum) -> Self {
        Self {
            amps: self.amps.scaled(c),
        }
    }

    pub fn mul_sqrt_d_pow(&self, k: i32) -> Self {
        Self {
            amps: self.amps.mul_sqrt_d_pow(k),
        }
    }

    pub fn try_add(&self, other: &Ket) -> Result<Self> {
        Ok(Self {
            amps: self.amps.try_add(&other.amps)?,
        })
    }

    pub fn try_sub(&self, other: &Ket) -> Result<Self> {
        Ok(Self {
            amps: self.amps.try_add(&other.amps.neg())?,
        })
    }

    pub fn try_eq(&self, other: &Ket) -> Result<bool> {
        Ok(self.try_sub(other)?.is_zero())
    }

    /// `|self⟩ ⊗ |other⟩` in particle labeling.
    pub fn tensor(&self, other: &Ket) -> Result<PairKet> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim().get(), other.dim().get()));
        }
        Ok(PairKet::product(self, other, Labeling::Particle))
    }
}

impl Serialize for Ket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Ket", 3)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("scale", &self.scale())?;
        st.serialize_field("amps", &self.amps.serialize_coeffs())?;
        st.end()
    }
}

/// How the `d²` indices of a [`PairKet`] are to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Labeling {
    /// `(n₁, n₂)`.
    Particle,
    /// `(n_r, n_c)`.
    Collective,
}

impl Labeling {
    fn name(self) -> &'static str {
        match self {
            Labeling::Particle => "particle",
            Labeling::Collective => "collective",
        }
    }
}

/// Which particle a local operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Particle {
    First,
    Second,
}

/// A two-particle state vector of length `d²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairKet {
    amps: Amplitudes,
    labeling: Labeling,
}

impl PairKet {
    pub fn zero(dim: Dimension, labeling: Labeling) -> Self {
        Self {
            amps: Amplitudes::zero(dim, dim.size() * dim.size()),
            labeling,
        }
    }

    /// Builds from `d²` row-major amplitudes.
    pub fn from_amplitudes(dim: Dimension, values: Vec<CycNum>, labeling: Labeling) -> Result<Self> {
        let d = dim.size();
        if values.len() != d * d {
            return Err(Error::DimensionMismatch((d * d) as u64, values.len() as u64));
        }
        Ok(Self {
            amps: Amplitudes::from_values(dim, values)?,
            labeling,
        })
    }

    /// `|major⟩ ⊗ |minor⟩` with the major factor on the slow index.
    fn product(major: &Ket, minor: &Ket, labeling: Labeling) -> Self {
        let dim = major.dim();
        let mut coeffs = Vec::with_capacity(dim.size() * dim.size());
        for a in &major.amps.coeffs {
            for b in &minor.amps.coeffs {
                coeffs.push(if a.is_zero() || b.is_zero() {
                    CycInt::zero(dim)
                } else {
                    a * b
                });
            }
        }
        Self {
            amps: Amplitudes::reduced(dim, major.scale() + minor.scale(), coeffs),
            labeling,
        }
    }

    /// `|r⟩_r ⊗ |c⟩_c` in collective labeling.
    pub fn collective_product(relative: &Ket, center: &Ket) -> Result<Self> {
        if relative.dim() != center.dim() {
            return Err(Error::DimensionMismatch(relative.dim().get(), center.dim().get()));
        }
        Ok(Self::product(relative, center, Labeling::Collective))
    }

    pub fn dim(&self) -> Dimension {
        self.amps.dim
    }

    pub fn scale(&self) -> u32 {
        self.amps.scale
    }

    pub fn labeling(&self) -> Labeling {
        self.labeling
    }

    fn index(&self, major: ModInt, minor: ModInt) -> usize {
        major.index() * self.dim().size() + minor.index()
    }

    /// Amplitude at `(major, minor)` in this ket's own labeling.
    pub fn amp(&self, major: ModInt, minor: ModInt) -> CycNum {
        self.amps.get(self.index(major, minor))
    }

    pub fn amps(&self) -> Vec<CycNum> {
        self.amps.values()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_zero()
    }

    /// Number of nonzero amplitudes.
    pub fn support(&self) -> usize {
        self.amps.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn require(&self, labeling: Labeling) -> Result<()> {
        if self.labeling != labeling {
            return Err(Error::LabelingMismatch {
                expected: labeling.name(),
                found: self.labeling.name(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, other: &PairKet) -> Result<CycNum> {
        other.require(self.labeling)?;
        self.amps.inner(&other.amps)
    }

    pub fn norm2(&self) -> CycNum {
        self.amps.inner(&self.amps).expect("same shape")
    }

    pub fn is_normalized(&self) -> bool {
        self.norm2() == CycNum::one(self.dim())
    }

    pub fn scaled(&self, c: &CycNum) -> Self {
        Self {
            amps: self.amps.scaled(c),
            labeling: self.labeling,
        }
    }

    pub fn mul_sqrt_d_pow(&self, k: i32) -> Self {
        Self {
            amps: self.amps.mul_sqrt_d_pow(k),
            labeling: self.labeling,
        }
    }

    pub fn try_add(&self, other: &PairKet) -> Result<Self> {
        other.require(self.labeling)?;
        Ok(Self {
            amps: self.amps.try_add(&other.amps)?,
            labeling: self.labeling,
        })
    }

    pub fn try_sub(&self, other: &PairKet) -> Result<Self> {
        other.require(self.labeling)?;
        Ok(Self {
            amps: self.amps.try_add(&other.amps.neg())?,
            labeling: self.labeling,
        })
    }

    pub fn try_eq(&self, other: &PairKet) -> Result<bool> {
        Ok(self.try_sub(other)?.is_zero())
    }

    /// Switches between particle and collective labeling without changing
    /// the state.
    pub fn relabel(&self) -> Self {
        let dim = self.dim();
        let d = dim.size();
        let split = |i: usize| (dim.elem((i / d) as i64), dim.elem((i % d) as i64));
        let amps = match self.labeling {
            Labeling::Particle => self.amps.permuted(|i| {
                let (n1, n2) = split(i);
                let c = CollectiveIndex::from_particles(n1, n2);
                c.n_r.index() * d + c.n_c.index()
            }),
            Labeling::Collective => self.amps.permuted(|i| {
                let (n_r, n_c) = split(i);
                let (n1, n2) = CollectiveIndex { n_r, n_c }.to_particles();
                n1.index() * d + n2.index()
            }),
        };
        let labeling = match self.labeling {
            Labeling::Particle => Labeling::Collective,
            Labeling::Collective => Labeling::Particle,
        };
        Self { amps, labeling }
    }

    pub fn to_particle(&self) -> Self {
        match self.labeling {
            Labeling::Particle => self.clone(),
            Labeling::Collective => self.relabel(),
        }
    }

    pub fn to_collective(&self) -> Self {
        match self.labeling {
            Labeling::Collective => self.clone(),
            Labeling::Particle => self.relabel(),
        }
    }

    /// The particle-2 ket `Σ_{n₁} conj(φ[n₁]) Ψ[n₁, n₂]`.
    pub fn partial_inner_1(&self, phi: &Ket) -> Result<Ket> {
        self.require(Labeling::Particle)?;
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(phi.dim().get(), self.dim().get()));
        }
        let dim = self.dim();
        let d = dim.size();
        let mut out = vec![CycInt::zero(dim); d];
        for (n1, a) in phi.amps.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            let ca = a.conj();
            for (n2, slot) in out.iter_mut().enumerate() {
                let b = &self.amps.coeffs[n1 * d + n2];
                if !b.is_zero() {
                    *slot = &*slot + &(&ca * b);
                }
            }
        }
        Ok(Ket {
            amps: Amplitudes::reduced(dim, phi.scale() + self.scale(), out),
        })
    }

    /// `τ` on both particles, i.e. conjugation of the particle-labeled
    /// amplitudes. Collective input is converted and the result converted back.
    pub fn tau(&self) -> Self {
        match self.labeling {
            Labeling::Particle => Self {
                amps: self.amps.conj(),
                labeling: Labeling::Particle,
            },
            Labeling::Collective => self.relabel().tau().relabel(),
        }
    }

    /// A Weyl operator `Z^k` or `X^k` on one particle. Requires particle labeling.
    pub fn apply_local(&self, on: Particle, op: Weyl, k: ModInt) -> Result<Self> {
        self.require(Labeling::Particle)?;
        let dim = self.dim();
        let d = dim.size();
        let amps = match op {
            Weyl::Z => self.amps.mapped(|i, c| {
                let n = match on {
                    Particle::First => i / d,
                    Particle::Second => i % d,
                };
                c.mul_root(k * dim.elem(n as i64))
            }),
            Weyl::X => self.amps.permuted(|i| {
                let (n1, n2) = (i / d, i % d);
                match on {
                    Particle::First => ((n1 + k.index()) % d) * d + n2,
                    Particle::Second => n1 * d + (n2 + k.index()) % d,
                }
            }),
        };
        Ok(Self {
            amps,
            labeling: Labeling::Particle,
        })
    }

    /// `Σ_{n₂} |Ψ[n₁, n₂]|²` for each `n₁` (particle labeling).
    pub fn particle1_marginals(&self) -> Result<Vec<CycNum>> {
        self.require(Labeling::Particle)?;
        let dim = self.dim();
        let d = dim.size();
        Ok((0..d)
            .map(|n1| {
                let row = Amplitudes {
                    dim,
                    scale: self.scale(),
                    coeffs: self.amps.coeffs[n1 * d..(n1 + 1) * d].to_vec(),
                };
                row.inner(&row).expect("same shape")
            })
            .collect())
    }

    // Internal access for operators that permute or rephase in bulk.
    pub(crate) fn map_indexed(&self, f: impl Fn(usize, &CycInt) -> CycInt) -> Self {
        Self {
            amps: self.amps.mapped(f),
            labeling: self.labeling,
        }
    }

    pub(crate) fn permute_indexed(&self, f: impl Fn(usize) -> usize) -> Self {
        Self {
            amps: self.amps.permuted(f),
            labeling: self.labeling,
        }
    }
}

impl Serialize for PairKet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PairKet", 4)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("labeling", &self.labeling)?;
        st.serialize_field("scale", &self.scale())?;
        st.serialize_field("amps", &self.amps.serialize_coeffs())?;
        st.end()
    }
}

/// The two generators of the Weyl–Heisenberg group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weyl {
    Z,
    X,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{mub_state, BasisLabel, MubLabel};
    use proptest::prelude::*;

    fn dim(d: u64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn computational_basis() {
        let d3 = dim(3);
        let k = Ket::cb(d3.elem(0));
        let one = CycNum::one(d3);
        let zero = CycNum::zero(d3);
        assert_eq!(k.amps(), vec![one.clone(), zero.clone(), zero]);
        assert_eq!(Ket::cb(d3.elem(3)), k);
        assert!(Ket::cb(d3.elem(1)).inner(&Ket::cb(d3.elem(2))).unwrap().is_zero());
        assert!(k.is_normalized());
    }

    #[test]
    fn z_and_x_actions() {
        let d5 = dim(5);
        for n in d5.elements() {
            let k = Ket::cb(n);
            assert_eq!(k.z_pow(d5.elem(1)), k.scaled(&CycNum::root(n)));
            assert_eq!(k.x_pow(d5.elem(2)), Ket::cb(n + d5.elem(2)));
        }
        let psi = mub_state(MubLabel::new(d5.elem(3), BasisLabel::Standard(d5.elem(2))));
        let mut x = psi.clone();
        for _ in 0..5 {
            x = x.x_pow(d5.elem(1));
        }
        assert_eq!(x, psi);
    }

    #[test]
    fn xz_commutation_d3() {
        // With Z|n⟩ = ω^n|n⟩ and X|n⟩ = |n+1⟩: XZ|0⟩ = |1⟩, ZX|0⟩ = ω|1⟩,
        // so ZX = ω XZ.
        let d3 = dim(3);
        let one = d3.elem(1);
        let psi = Ket::cb(d3.elem(0));
        let xz = psi.z_pow(one).x_pow(one);
        let zx = psi.x_pow(one).z_pow(one);
        assert_eq!(xz, Ket::cb(one));
        assert_eq!(zx, Ket::cb(one).scaled(&CycNum::root(one)));
        assert_eq!(zx, xz.scaled(&CycNum::root(one)));
    }

    #[test]
    fn weyl_commutation_exhaustive() {
        for d in [3, 5, 7] {
            let dm = dim(d);
            for n in dm.elements() {
                let psi = Ket::cb(n);
                for k in dm.elements() {
                    for l in dm.elements() {
                        // X^k Z^l ψ versus ω^{-kl} Z^l X^k ψ
                        let lhs = psi.z_pow(l).x_pow(k);
                        let rhs = psi.x_pow(k).z_pow(l).scaled(&CycNum::root(-(k * l)));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_products() {
        let d3 = dim(3);
        let p = Ket::cb(d3.elem(0)).tensor(&Ket::cb(d3.elem(0))).unwrap();
        assert_eq!(p.amp(d3.elem(0), d3.elem(0)), CycNum::one(d3));
        assert_eq!(p.support(), 1);

        let a = mub_state(MubLabel::new(d3.elem(1), BasisLabel::Standard(d3.elem(2))));
        let b = mub_state(MubLabel::new(d3.elem(0), BasisLabel::Standard(d3.elem(1))));
        let t = a.tensor(&b).unwrap();
        let ninth = CycNum::from_ratio(d3, 1, 2);
        for amp in t.amps() {
            assert_eq!(amp.abs2(), ninth);
        }
        assert_eq!(t.norm2(), &a.norm2() * &b.norm2());
    }

    #[test]
    fn inversion_and_tau() {
        let d5 = dim(5);
        assert_eq!(Ket::cb(d5.elem(0)).inverted(), Ket::cb(d5.elem(0)));
        assert_eq!(Ket::cb(d5.elem(2)).inverted(), Ket::cb(d5.elem(3)));
        for m in d5.elements() {
            for b in d5.elements() {
                let l = MubLabel::new(m, BasisLabel::Standard(b));
                let psi = mub_state(l);
                assert_eq!(psi.tau(), mub_state(MubLabel::new(-m, BasisLabel::Standard(-b))));
                assert_eq!(psi.tau().tau(), psi);
                assert_eq!(psi.inverted().inverted(), psi);
            }
        }
    }

    #[test]
    fn unbiased_overlap_d3() {
        let d3 = dim(3);
        let u = mub_state(MubLabel::new(d3.elem(0), BasisLabel::Standard(d3.elem(0))));
        let v = mub_state(MubLabel::new(d3.elem(0), BasisLabel::Standard(d3.elem(1))));
        assert_eq!(u.inner(&v).unwrap().abs2(), CycNum::from_ratio(d3, 1, 1));
        assert_eq!(u.inner(&u).unwrap(), CycNum::one(d3));
    }

    #[test]
    fn mismatches() {
        let a = Ket::cb(dim(3).elem(0));
        let b = Ket::cb(dim(5).elem(0));
        assert_eq!(a.inner(&b), Err(Error::DimensionMismatch(3, 5)));
        let d3 = dim(3);
        let p = a.tensor(&a).unwrap();
        let c = p.relabel();
        assert!(matches!(p.inner(&c), Err(Error::LabelingMismatch { .. })));
        assert!(matches!(c.partial_inner_1(&a), Err(Error::LabelingMismatch { .. })));
        let _ = d3;
    }

    #[test]
    fn partial_inner_of_product() {
        let d5 = dim(5);
        let phi = mub_state(MubLabel::new(d5.elem(1), BasisLabel::Standard(d5.elem(3))));
        let chi = mub_state(MubLabel::new(d5.elem(4), BasisLabel::Standard(d5.elem(2))));
        let p = phi.tensor(&chi).unwrap();
        assert_eq!(p.partial_inner_1(&phi).unwrap(), chi);
        let other = mub_state(MubLabel::new(d5.elem(2), BasisLabel::Standard(d5.elem(3))));
        assert!(p.partial_inner_1(&other).unwrap().is_zero());
    }

    #[test]
    fn ket_json_shape() {
        let d3 = dim(3);
        let k = mub_state(MubLabel::new(d3.elem(1), BasisLabel::Standard(d3.elem(0))));
        let v = serde_json::to_value(&k).unwrap();
        assert_eq!(v["dim"], 3);
        assert_eq!(v["scale"], 1);
        // (1, ω², ω) canonical: 1 → [1,0,0]; ω² → [-1,-1,0]; ω → [0,1,0]
        assert_eq!(v["amps"], serde_json::json!([[1, 0, 0], [-1, -1, 0], [0, 1, 0]]));
    }

    fn arb_ket(d: u64) -> impl Strategy<Value = Ket> {
        prop::collection::vec((prop::collection::vec(-4i64..4, d as usize), 0u32..2), d as usize)
            .prop_map(move |v| {
                let dm = dim(d);
                // even scales only, so amplitudes share a parity
                let amps = v
                    .into_iter()
                    .map(|(c, s)| CycNum::from_coeffs(dm, c, 2 * s).unwrap())
                    .collect();
                Ket::from_amplitudes(dm, amps).unwrap()
            })
    }

    fn arb_pair(d: u64) -> impl Strategy<Value = PairKet> {
        prop::collection::vec(prop::collection::vec(-3i64..3, d as usize), (d * d) as usize).prop_map(
            move |v| {
                let dm = dim(d);
                let amps = v.into_iter().map(|c| CycNum::from_coeffs(dm, c, 1).unwrap()).collect();
                PairKet::from_amplitudes(dm, amps, Labeling::Particle).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inner_is_hermitian(a in arb_ket(5), b in arb_ket(5)) {
            prop_assert_eq!(a.inner(&b).unwrap(), b.inner(&a).unwrap().conj());
        }

        #[test]
        fn tensor_norm_multiplies(a in arb_ket(3), b in arb_ket(3)) {
            let t = a.tensor(&b).unwrap();
            prop_assert!(t.norm2().try_eq(&(&a.norm2() * &b.norm2())).unwrap());
        }

        #[test]
        fn partial_inner_linear_antilinear(
            phi in arb_ket(3), psi1 in arb_pair(3), psi2 in arb_pair(3), c in prop::collection::vec(-3i64..3, 3)
        ) {
            let dm = dim(3);
            let c = CycNum::from_coeffs(dm, c, 0).unwrap();
            // linear in Ψ
            let sum = psi1.try_add(&psi2.scaled(&c)).unwrap();
            let lhs = sum.partial_inner_1(&phi).unwrap();
            let rhs = psi1.partial_inner_1(&phi).unwrap()
                .try_add(&psi2.partial_inner_1(&phi).unwrap().scaled(&c)).unwrap();
            prop_assert!(lhs.try_eq(&rhs).unwrap());
            // antilinear in φ
            let lhs = psi1.partial_inner_1(&phi.scaled(&c)).unwrap();
            let rhs = psi1.partial_inner_1(&phi).unwrap().scaled(&c.conj());
            prop_assert!(lhs.try_eq(&rhs).unwrap());
        }

        #[test]
        fn inversion_involution(a in arb_ket(7)) {
            prop_assert_eq!(a.inverted().inverted(), a);
        }

        #[test]
        fn relabel_involution(p in arb_pair(5)) {
            prop_assert_eq!(p.relabel().relabel(), p);
        }
    }
}
