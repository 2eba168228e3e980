//! Exhaustive two-point-measurement statistics of a single collision.
//!
//! Both units are measured in the eigenbases of their exchange operators
//! `𝓗_A`, `𝓗_B`, evolve under `U`, and are measured again. A trajectory is
//! the outcome tuple `(n, ν, m, μ)`; the table holds all `d_A²·d_B²` of them.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::commutant::Interaction;
use crate::error::{Error, Result, Side};
use crate::gibbs::{affinity_shift, gibbs_state, Bath, GibbsState};
use crate::matlin::{herm_eig, kron, CMatrix, HermEig};

/// Largest `reversibility_residual` for which reversed trajectories are
/// governed by the forward unitary.
pub const REVERSIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationOptions {
    /// Rows with probability below this are kept but marked unsupported.
    pub support_threshold: f64,
    /// Minimum eigenvalue gap of `𝓗`, relative to its spectral range.
    pub degeneracy_tol: f64,
    /// `⟨h_{m,μ}|H_int|h_{n,ν}⟩` below this (relative to `‖H_int‖_F`) makes
    /// the explicit correction formula inapplicable.
    pub overlap_tol: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            support_threshold: 1e-14,
            degeneracy_tol: 1e-9,
            overlap_tol: 1e-12,
        }
    }
}

/// Value of the closed-form correction, which needs the interaction
/// Hamiltonian and a nonvanishing matrix element to divide by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExplicitDelta {
    /// Real part of the formula plus the imaginary part it left behind.
    Applicable {
        value: f64,
        imag: f64,
    },
    Inapplicable,
    /// Only a unitary was supplied.
    Unavailable,
}

impl ExplicitDelta {
    pub fn value(&self) -> Option<f64> {
        match *self {
            ExplicitDelta::Applicable { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub nu: usize,
    pub m: usize,
    pub mu: usize,
    pub prob: f64,
    /// `h^A_m − h^A_n`
    pub dh_a: f64,
    /// `h^B_μ − h^B_ν`
    pub dh_b: f64,
    /// `ΔQᵢ(n→m)` measured on A, one entry per charge.
    pub dq: Vec<f64>,
    /// Correction `Δ(γ)`, defined as the residual of the conservation
    /// relation `Δh^A + Δh^B = Σᵢ δλᵢ ΔQᵢ + Δ`.
    pub delta: f64,
    pub delta_explicit: ExplicitDelta,
    pub supported: bool,
}

impl Trajectory {
    /// `σ(γ) = Σᵢ δλᵢ ΔQᵢ + Δ(γ)`.
    pub fn entropy(&self, deltas_lambda: &[f64]) -> f64 {
        weighted(deltas_lambda, &self.dq) + self.delta
    }

    pub fn is_diagonal(&self) -> bool {
        self.n == self.m && self.nu == self.mu
    }
}

fn weighted(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// `Δ(γ) = (Δh^A + Δh^B) − Σᵢ δλᵢ ΔQᵢ`.
pub fn delta_residual(dh_a: f64, dh_b: f64, dq: &[f64], deltas_lambda: &[f64]) -> f64 {
    (dh_a + dh_b) - weighted(deltas_lambda, dq)
}

#[derive(Debug, Clone)]
pub struct TrajectoryTable {
    pub bath_a: Bath,
    pub bath_b: Bath,
    pub interaction: Interaction,
    pub gibbs_a: GibbsState,
    pub gibbs_b: GibbsState,
    /// `δλᵢ = λᵢ^A − λᵢ^B`
    pub deltas_lambda: Vec<f64>,
    /// Sorted lexicographically by `(n, ν, m, μ)`.
    pub rows: Vec<Trajectory>,
    /// `max |(|U_{ab}|² − |U_{ba}|²)|` in the product eigenbasis; zero when
    /// the backward process coincides with the forward one.
    pub reversibility_residual: f64,
    pub options: EnumerationOptions,
    charges_a: Vec<CMatrix>,
    hint_eig: Option<CMatrix>,
}

impl TrajectoryTable {
    pub fn dims(&self) -> (usize, usize) {
        (self.bath_a.dim(), self.bath_b.dim())
    }

    pub fn index_of(&self, n: usize, nu: usize, m: usize, mu: usize) -> usize {
        let (da, db) = self.dims();
        ((n * db + nu) * da + m) * db + mu
    }

    pub fn row(&self, n: usize, nu: usize, m: usize, mu: usize) -> &Trajectory {
        &self.rows[self.index_of(n, nu, m, mu)]
    }

    /// The reversed trajectory `γ̃ = {(m, μ), (n, ν)}`.
    pub fn reverse(&self, row: &Trajectory) -> &Trajectory {
        self.row(row.m, row.mu, row.n, row.nu)
    }

    pub fn supported(&self) -> impl Iterator<Item = &Trajectory> {
        self.rows.iter().filter(|r| r.supported)
    }

    pub fn total_probability(&self) -> f64 {
        self.rows.iter().map(|r| r.prob).sum()
    }

    /// Closed-form correction for the row at `(n, ν, m, μ)`.
    pub fn delta_explicit(
        &self,
        n: usize,
        nu: usize,
        m: usize,
        mu: usize,
    ) -> Result<ExplicitDelta> {
        let h = self
            .hint_eig
            .as_ref()
            .ok_or(Error::MissingInteractionHamiltonian)?;
        let hint_norm = self
            .interaction
            .hint
            .as_ref()
            .map_or(0.0, |x| x.frob_norm());
        Ok(explicit_correction(
            &self.charges_a,
            h,
            hint_norm,
            &self.deltas_lambda,
            self.dims(),
            (n, nu, m, mu),
            self.options.overlap_tol,
        ))
    }

    /// `ρ₀ = π_A ⊗ π_B`.
    pub fn initial_state(&self) -> CMatrix {
        kron(&self.gibbs_a.rho, &self.gibbs_b.rho)
    }

    /// `Uρ₀U†`.
    pub fn final_state(&self) -> CMatrix {
        let u = &self.interaction.u;
        &(u * &self.initial_state()) * &u.adjoint()
    }
}

/// Rejects spectra whose smallest gap is not above `tol` times the spectral
/// range.
pub fn check_nondegenerate(eig: &HermEig, side: Side, tol: f64) -> Result<()> {
    if eig.dim() < 2 {
        return Ok(());
    }
    let gap = eig.min_gap();
    if gap.is_nan() || gap <= tol * eig.spectral_range() || gap <= 0.0 {
        return Err(Error::DegenerateSpectrum { side, gap });
    }
    Ok(())
}

/// `ΔQᵢ(n→m) = ⟨h_m|Qᵢ|h_m⟩ − ⟨h_n|Qᵢ|h_n⟩` in the eigenbasis of the bath's
/// exchange operator.
pub fn charge_change(bath: &Bath, i: usize, n: usize, m: usize) -> Result<f64> {
    let q = bath.charge(i)?;
    let eig = herm_eig(&crate::gibbs::exchange_hamiltonian(bath))?;
    for &k in &[n, m] {
        if k >= bath.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: bath.dim(),
            });
        }
    }
    let (vn, vm) = (eig.vector(n), eig.vector(m));
    Ok(q.sandwich(&vm, &vm).re - q.sandwich(&vn, &vn).re)
}

/// Closed-form double sum for the correction:
///
/// `Σᵢ δλᵢ [ Σ_{k≠m} ⟨m|Qᵢ|k⟩ H_{kμ,nν} − Σ_{k≠n} H_{mμ,kν} ⟨k|Qᵢ|n⟩ ] / H_{mμ,nν}`
///
/// with every operator expressed in the measurement eigenbasis.
fn explicit_correction(
    charges_a: &[CMatrix],
    h: &CMatrix,
    hint_norm: f64,
    deltas_lambda: &[f64],
    (da, db): (usize, usize),
    (n, nu, m, mu): (usize, usize, usize, usize),
    overlap_tol: f64,
) -> ExplicitDelta {
    let idx = |a: usize, b: usize| a * db + b;
    let denom = h[(idx(m, mu), idx(n, nu))];
    if denom.norm() <= overlap_tol * hint_norm {
        return ExplicitDelta::Inapplicable;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (q, &dl) in charges_a.iter().zip(deltas_lambda) {
        if dl == 0.0 {
            continue;
        }
        let mut term = Complex64::new(0.0, 0.0);
        for k in 0..da {
            if k != m {
                term += q[(m, k)] * h[(idx(k, mu), idx(n, nu))];
            }
            if k != n {
                term -= h[(idx(m, mu), idx(k, nu))] * q[(k, n)];
            }
        }
        acc += term * dl;
    }
    let z = acc / denom;
    ExplicitDelta::Applicable {
        value: z.re,
        imag: z.im,
    }
}

/// Builds every trajectory of one collision with
/// `P(γ) = e^{−(h_n^A + h_ν^B)}/Z · |⟨h_{m,μ}|U|h_{n,ν}⟩|²`.
pub fn enumerate_trajectories(
    bath_a: &Bath,
    bath_b: &Bath,
    interaction: &Interaction,
    options: EnumerationOptions,
) -> Result<TrajectoryTable> {
    let deltas_lambda = affinity_shift(bath_a, bath_b)?;
    let cert = interaction.certify(bath_a, bath_b)?;
    if !cert.pass {
        return Err(Error::CertificateFailure {
            worst: cert.worst(),
        });
    }
    let gibbs_a = gibbs_state(bath_a);
    let gibbs_b = gibbs_state(bath_b);
    check_nondegenerate(&gibbs_a.eig, Side::A, options.degeneracy_tol)?;
    check_nondegenerate(&gibbs_b.eig, Side::B, options.degeneracy_tol)?;

    let (da, db) = (bath_a.dim(), bath_b.dim());
    let basis = kron(&gibbs_a.eig.vectors, &gibbs_b.eig.vectors);
    let u_eig = interaction.u.in_basis(&basis);
    let hint_eig = interaction.hint.as_ref().map(|h| h.in_basis(&basis));
    let hint_norm = interaction.hint.as_ref().map_or(0.0, |h| h.frob_norm());
    let charges_a: Vec<CMatrix> = bath_a
        .charges()
        .iter()
        .map(|q| q.matrix.in_basis(&gibbs_a.eig.vectors))
        .collect();
    let ha = &gibbs_a.eig.values;
    let hb = &gibbs_b.eig.values;

    let d = da * db;
    let mut reversibility_residual: f64 = 0.0;
    for x in 0..d {
        for y in 0..d {
            let r = (u_eig[(x, y)].norm_sqr() - u_eig[(y, x)].norm_sqr()).abs();
            reversibility_residual = reversibility_residual.max(r);
        }
    }

    let mut rows = Vec::with_capacity(d * d);
    for n in 0..da {
        for nu in 0..db {
            let p0 = gibbs_a.population(n) * gibbs_b.population(nu);
            for m in 0..da {
                let dq: Vec<f64> = charges_a
                    .iter()
                    .map(|q| q[(m, m)].re - q[(n, n)].re)
                    .collect();
                for mu in 0..db {
                    let amp = u_eig[(m * db + mu, n * db + nu)];
                    let prob = p0 * amp.norm_sqr();
                    let dh_a = ha[m] - ha[n];
                    let dh_b = hb[mu] - hb[nu];
                    let delta = delta_residual(dh_a, dh_b, &dq, &deltas_lambda);
                    let delta_explicit = match &hint_eig {
                        Some(h) => explicit_correction(
                            &charges_a,
                            h,
                            hint_norm,
                            &deltas_lambda,
                            (da, db),
                            (n, nu, m, mu),
                            options.overlap_tol,
                        ),
                        None => ExplicitDelta::Unavailable,
                    };
                    rows.push(Trajectory {
                        n,
                        nu,
                        m,
                        mu,
                        prob,
                        dh_a,
                        dh_b,
                        dq: dq.clone(),
                        delta,
                        delta_explicit,
                        supported: prob >= options.support_threshold,
                    });
                }
            }
        }
    }

    Ok(TrajectoryTable {
        bath_a: bath_a.clone(),
        bath_b: bath_b.clone(),
        interaction: interaction.clone(),
        gibbs_a,
        gibbs_b,
        deltas_lambda,
        rows,
        reversibility_residual,
        options,
        charges_a,
        hint_eig,
    })
}
