//! Charge-preserving interactions: certificates for `[U, Qᵢ^A + Qᵢ^B] = 0`,
//! the full real vector space of allowed interaction Hamiltonians, and the
//! generalized SWAP family of the two-qubit example.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gibbs::{check_compatible, Bath};
use crate::math;
use crate::matlin::{commutator, kron, real_nullspace, unitary_exp, CMatrix, RMatrix, I};

/// Largest commutator residual accepted as charge preserving.
pub const CERTIFICATE_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for the commutant nullspace.
pub const NULLSPACE_TOL: f64 = 1e-9;

/// Per-charge residuals `‖[U, Qᵢ^A⊗𝟙 + 𝟙⊗Qᵢ^B]‖_F`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Certificate {
    pub residuals: Vec<f64>,
    pub pass: bool,
}

impl Certificate {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// A collision unitary on `A⊗B`, optionally with the constant Hamiltonian
/// and duration it was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub hint: Option<CMatrix>,
    pub u: CMatrix,
    pub tau: Option<f64>,
}

impl Interaction {
    pub fn from_unitary(u: CMatrix) -> Result<Self> {
        u.check_unitary()?;
        Ok(Interaction {
            hint: None,
            u,
            tau: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn certify(&self, a: &Bath, b: &Bath) -> Result<Certificate> {
        verify_charge_preserving(&self.u, a, b)
    }
}

/// `Qᵢ^A⊗𝟙 + 𝟙⊗Qᵢ^B`.
pub fn total_charge(a: &Bath, b: &Bath, i: usize) -> Result<CMatrix> {
    let qa = a.charge(i)?;
    let qb = b.charge(i)?;
    Ok(&kron(qa, &CMatrix::identity(b.dim())) + &kron(&CMatrix::identity(a.dim()), qb))
}

pub fn verify_charge_preserving(u: &CMatrix, a: &Bath, b: &Bath) -> Result<Certificate> {
    check_compatible(a, b)?;
    let dim = a.dim() * b.dim();
    if u.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u.dim(),
        });
    }
    u.check_unitary()?;
    let residuals = (0..a.n_charges())
        .map(|i| {
            let t = total_charge(a, b, i)?;
            Ok(commutator(u, &t)?.frob_norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let pass = residuals.iter().all(|&r| r <= CERTIFICATE_TOL);
    Ok(Certificate { residuals, pass })
}

/// Orthonormal (Hilbert–Schmidt) Hermitian basis of dimension `d²`: the
/// normalized identity, then for each `j < k` the symmetric and antisymmetric
/// off-diagonal generators, then the traceless diagonal generators.
pub fn gell_mann_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    basis.push(CMatrix::identity(d).scale_real(1.0 / math::sqrt(d as f64)));
    let r = core::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = CMatrix::zeros(d);
            s[(j, k)] = Complex64::new(r, 0.0);
            s[(k, j)] = Complex64::new(r, 0.0);
            basis.push(s);
            let mut a = CMatrix::zeros(d);
            a[(j, k)] = -I * r;
            a[(k, j)] = I * r;
            basis.push(a);
        }
    }
    for l in 1..d {
        let norm = 1.0 / math::sqrt((l * (l + 1)) as f64);
        let mut g = CMatrix::zeros(d);
        for m in 0..l {
            g[(m, m)] = Complex64::new(norm, 0.0);
        }
        g[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        basis.push(g);
    }
    basis
}

/// Real coordinates of a Hermitian matrix in [`gell_mann_basis`] order.
pub fn hermitian_coordinates(h: &CMatrix) -> Vec<f64> {
    let d = h.dim();
    let mut out = Vec::with_capacity(d * d);
    out.push(h.trace().re / math::sqrt(d as f64));
    let s2 = core::f64::consts::SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let hjk = h[(j, k)];
            out.push(s2 * hjk.re);
            out.push(-s2 * hjk.im);
        }
    }
    for l in 1..d {
        let norm = 1.0 / math::sqrt((l * (l + 1)) as f64);
        let partial: f64 = (0..l).map(|m| h[(m, m)].re).sum();
        out.push(norm * (partial - l as f64 * h[(l, l)].re));
    }
    out
}

pub fn from_hermitian_coordinates(d: usize, coords: &[f64]) -> CMatrix {
    gell_mann_basis(d)
        .iter()
        .zip(coords)
        .fold(CMatrix::zeros(d), |acc, (g, &c)| {
            if c == 0.0 {
                acc
            } else {
                &acc + &g.scale_real(c)
            }
        })
}

/// Real matrix of the linear map `X ↦ (i[X, Tᵢ])ᵢ` in Gell-Mann coordinates,
/// with one row block per charge.
pub fn commutator_map(a: &Bath, b: &Bath) -> Result<RMatrix> {
    check_compatible(a, b)?;
    let d = a.dim() * b.dim();
    let basis = gell_mann_basis(d);
    let totals = (0..a.n_charges())
        .map(|i| total_charge(a, b, i))
        .collect::<Result<Vec<_>>>()?;
    let dd = d * d;
    let mut map = RMatrix::zeros(totals.len() * dd, dd);
    for (col, g) in basis.iter().enumerate() {
        for (i, t) in totals.iter().enumerate() {
            let c = commutator(g, t)?.scale(I);
            for (row, x) in hermitian_coordinates(&c).into_iter().enumerate() {
                map[(i * dd + row, col)] = x;
            }
        }
    }
    Ok(map)
}

/// Basis of every Hermitian `X` on `A⊗B` commuting with all total charges,
/// orthonormal in the Hilbert–Schmidt inner product. The identity always
/// commutes, so the basis is never empty.
pub fn solve_allowed_interactions(a: &Bath, b: &Bath) -> Result<Vec<CMatrix>> {
    let map = commutator_map(a, b)?;
    let d = a.dim() * b.dim();
    Ok(real_nullspace(&map, NULLSPACE_TOL)
        .iter()
        .map(|coords| from_hermitian_coordinates(d, coords))
        .collect())
}

/// Two-qubit generalized SWAP:
///
/// ```text
/// ⎡ e^{iα}    0       0      0    ⎤
/// ⎢   0     cos α  i sin α   0    ⎥
/// ⎢   0   i sin α   cos α    0    ⎥
/// ⎣   0       0       0    e^{iα} ⎦
/// ```
pub fn generalized_swap(alpha: f64) -> CMatrix {
    let (c, s) = (math::cos(alpha), math::sin(alpha));
    let corner = Complex64::new(c, s);
    let mut u = CMatrix::zeros(4);
    u[(0, 0)] = corner;
    u[(3, 3)] = corner;
    u[(1, 1)] = Complex64::new(c, 0.0);
    u[(2, 2)] = Complex64::new(c, 0.0);
    u[(1, 2)] = Complex64::new(0.0, s);
    u[(2, 1)] = Complex64::new(0.0, s);
    u
}

/// `U = e^{−iτH}` for an interaction switched on suddenly for a time `τ`.
pub fn unitary_from_interaction(hint: &CMatrix, tau: f64) -> Result<Interaction> {
    let u = unitary_exp(hint, tau)?;
    Ok(Interaction {
        hint: Some(hint.clone()),
        u,
        tau: Some(tau),
    })
}

/// `dim − |tr(U†V)|`: zero iff `U` and `V` agree up to a global phase.
pub fn phase_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    u.dim() as f64 - u.hs_inner(v).norm()
}

/// Component of `x` outside the span of an orthonormal Hermitian basis,
/// in Frobenius norm.
pub fn projection_residual(basis: &[CMatrix], x: &CMatrix) -> f64 {
    let proj = basis.iter().fold(CMatrix::zeros(x.dim()), |acc, b| {
        &acc + &b.scale(b.hs_inner(x))
    });
    (x - &proj).frob_norm()
}

/// `Σ_{k} σ_k⊗σ_k` over the three Pauli matrices.
pub fn heisenberg_exchange() -> CMatrix {
    let xx = kron(&CMatrix::pauli_x(), &CMatrix::pauli_x());
    let yy = kron(&CMatrix::pauli_y(), &CMatrix::pauli_y());
    let zz = kron(&CMatrix::pauli_z(), &CMatrix::pauli_z());
    &(&xx + &yy) + &zz
}
