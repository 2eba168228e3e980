//! Baths and their generalized Gibbs states `π = e^{−Σᵢ λᵢQᵢ}/Z`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::matlin::{comm_norm, herm_eig, CMatrix, HermEig};

/// Commutator norms at or below this count as commuting.
pub const ABELIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Charge {
    pub label: String,
    pub matrix: CMatrix,
}

impl Charge {
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Self {
        Charge {
            label: label.into(),
            matrix,
        }
    }
}

/// A set of Hermitian charges on one subsystem together with their
/// affinities.
#[derive(Debug, Clone, PartialEq)]
pub struct Bath {
    dim: usize,
    charges: Vec<Charge>,
    affinities: Vec<f64>,
}

impl Bath {
    pub fn new(charges: Vec<Charge>, affinities: Vec<f64>) -> Result<Self> {
        let first = charges
            .first()
            .ok_or_else(|| Error::InvalidBath("at least one charge is required".into()))?;
        let dim = first.matrix.dim();
        if affinities.len() != charges.len() {
            return Err(Error::InvalidBath(format!(
                "{} charges but {} affinities",
                charges.len(),
                affinities.len()
            )));
        }
        if let Some(k) = affinities.iter().position(|a| !a.is_finite()) {
            return Err(Error::InvalidBath(format!("affinity {k} is not finite")));
        }
        for q in &charges {
            if q.matrix.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: q.matrix.dim(),
                });
            }
            if !q.matrix.is_finite() {
                return Err(Error::NonFinite);
            }
            q.matrix.check_hermitian()?;
        }
        Ok(Bath {
            dim,
            charges,
            affinities,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_charges(&self) -> usize {
        self.charges.len()
    }

    pub fn charges(&self) -> &[Charge] {
        &self.charges
    }

    pub fn charge(&self, i: usize) -> Result<&CMatrix> {
        self.charges
            .get(i)
            .map(|q| &q.matrix)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.charges.len(),
            })
    }

    pub fn affinities(&self) -> &[f64] {
        &self.affinities
    }

    pub fn with_affinities(&self, affinities: Vec<f64>) -> Result<Self> {
        Bath::new(self.charges.clone(), affinities)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.charges.iter().map(|q| q.label.as_str())
    }
}

/// `𝓗 = Σᵢ λᵢQᵢ`.
pub fn exchange_hamiltonian(bath: &Bath) -> CMatrix {
    bath.charges
        .iter()
        .zip(&bath.affinities)
        .fold(CMatrix::zeros(bath.dim), |acc, (q, &l)| {
            &acc + &q.matrix.scale_real(l)
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    /// The exchange operator `𝓗`.
    pub hop: CMatrix,
    pub eig: HermEig,
    /// Partition function `tr e^{−𝓗}`.
    pub z: f64,
    pub rho: CMatrix,
}

impl GibbsState {
    /// Occupation `e^{−hₙ}/Z` of eigenvector `n` of `𝓗`.
    pub fn population(&self, n: usize) -> f64 {
        math::exp(-self.eig.values[n]) / self.z
    }
}

pub fn gibbs_state(bath: &Bath) -> GibbsState {
    let hop = exchange_hamiltonian(bath);
    // charges were validated Hermitian and finite, so this cannot fail
    let eig = herm_eig(&hop).expect("exchange operator of a valid bath is Hermitian");
    let weights: Vec<f64> = eig.values.iter().map(|&h| math::exp(-h)).collect();
    let z: f64 = weights.iter().sum();
    let rho = eig.map_spectrum(|h| Complex64::new(math::exp(-h) / z, 0.0));
    GibbsState { hop, eig, z, rho }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CommutationReport {
    /// `(i, j, ‖[Qᵢ, Qⱼ]‖_F)` for every unordered pair `i < j`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub abelian: bool,
}

pub fn commutation_report(bath: &Bath) -> CommutationReport {
    let n = bath.n_charges();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let norm = comm_norm(&bath.charges[i].matrix, &bath.charges[j].matrix)
                .expect("charges share the bath dimension");
            pairs.push((i, j, norm));
        }
    }
    let abelian = pairs.iter().all(|&(_, _, c)| c < ABELIAN_TOL);
    CommutationReport { pairs, abelian }
}

/// Both baths must carry the same charges in the same order: same count and
/// labels. Dimensions may differ.
pub fn check_compatible(a: &Bath, b: &Bath) -> Result<()> {
    if a.n_charges() != b.n_charges() {
        return Err(Error::IncompatibleBaths(format!(
            "bath A has {} charges, bath B has {}",
            a.n_charges(),
            b.n_charges()
        )));
    }
    for (k, (la, lb)) in a.labels().zip(b.labels()).enumerate() {
        if la != lb {
            return Err(Error::IncompatibleBaths(format!(
                "charge {k} is labelled {la:?} on A but {lb:?} on B"
            )));
        }
    }
    Ok(())
}

/// `δλᵢ = λᵢ^A − λᵢ^B`.
pub fn affinity_shift(a: &Bath, b: &Bath) -> Result<Vec<f64>> {
    check_compatible(a, b)?;
    Ok(a.affinities
        .iter()
        .zip(&b.affinities)
        .map(|(la, lb)| la - lb)
        .collect())
}
