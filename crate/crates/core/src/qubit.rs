//! Two spin-1/2 baths with charges `σ_z` and `σ_x` (affinities `β`, `χ`)
//! coupled by a generalized SWAP, plus one-parameter sweeps over the model
//! and current-inversion detection.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::collision::{enumerate_trajectories, EnumerationOptions, TrajectoryTable};
use crate::commutant::{generalized_swap, Interaction};
use crate::error::{Error, Result, Side};
use crate::gibbs::{Bath, Charge};
use crate::math;
use crate::matlin::CMatrix;
use crate::statistics::{
    averages, build_distribution, detailed_ft_report, integral_ft, integral_ft_report,
    naive_integral_ft, relative_entropy_report, second_law_report, tail_bound_report, tur_report,
    Tolerances, DEFAULT_EPS, DEFAULT_ZETAS,
};

/// Minimum `√(β² + χ²)` per bath.
pub const DEGENERACY_GUARD: f64 = 1e-9;
/// A sign product must fall below `−INVERSION_TOL` to count as an inversion.
pub const INVERSION_TOL: f64 = 1e-12;
/// Bath B's `χ` in the default grids.
pub const CHI_B_DEFAULT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QubitModelParams {
    pub beta_a: f64,
    pub chi_a: f64,
    pub beta_b: f64,
    pub chi_b: f64,
    /// Swap angle.
    pub alpha: f64,
}

impl QubitModelParams {
    pub fn new(beta_a: f64, chi_a: f64, beta_b: f64, chi_b: f64, alpha: f64) -> Self {
        QubitModelParams {
            beta_a,
            chi_a,
            beta_b,
            chi_b,
            alpha,
        }
    }

    pub fn delta_beta(&self) -> f64 {
        self.beta_a - self.beta_b
    }

    pub fn delta_chi(&self) -> f64 {
        self.chi_a - self.chi_b
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.beta_a, self.chi_a, self.beta_b, self.chi_b, self.alpha];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        for (side, b, c) in [
            (Side::A, self.beta_a, self.chi_a),
            (Side::B, self.beta_b, self.chi_b),
        ] {
            let r = math::sqrt(b * b + c * c);
            if r <= DEGENERACY_GUARD {
                return Err(Error::DegenerateSpectrum { side, gap: 2.0 * r });
            }
        }
        Ok(())
    }
}

impl Default for QubitModelParams {
    fn default() -> Self {
        QubitModelParams::new(0.5, 0.8, 0.5, 0.2, 1.0)
    }
}

/// Which pair of charges both baths carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChargeSet {
    /// `{σ_z, σ_x}`.
    #[default]
    NonAbelian,
    /// `{σ_z, σ_z}`: a commuting control with the same affinity layout.
    CommutingControl,
}

pub fn qubit_bath(charges: ChargeSet, beta: f64, chi: f64) -> Result<Bath> {
    let second = match charges {
        ChargeSet::NonAbelian => CMatrix::pauli_x(),
        ChargeSet::CommutingControl => CMatrix::pauli_z(),
    };
    Bath::new(
        vec![
            Charge::new("sigma_z", CMatrix::pauli_z()),
            Charge::new("sigma_x", second),
        ],
        vec![beta, chi],
    )
}

/// The two-qubit permutation `|ab⟩ ↦ |ba⟩`.
pub fn swap_permutation() -> CMatrix {
    let mut p = CMatrix::zeros(4);
    p[(0, 0)] = Complex64::new(1.0, 0.0);
    p[(1, 2)] = Complex64::new(1.0, 0.0);
    p[(2, 1)] = Complex64::new(1.0, 0.0);
    p[(3, 3)] = Complex64::new(1.0, 0.0);
    p
}

/// Generalized SWAP with its generator attached: `SWAP[α] = e^{iα P}` for
/// the permutation `P`, i.e. `H = P` and `τ = −α`.
pub fn swap_interaction(alpha: f64) -> Interaction {
    Interaction {
        hint: Some(swap_permutation()),
        u: generalized_swap(alpha),
        tau: Some(-alpha),
    }
}

pub fn build_qubit_model(params: &QubitModelParams) -> Result<(Bath, Bath, Interaction)> {
    build_qubit_model_with(params, ChargeSet::NonAbelian)
}

pub fn build_qubit_model_with(
    params: &QubitModelParams,
    charges: ChargeSet,
) -> Result<(Bath, Bath, Interaction)> {
    params.validate()?;
    let a = qubit_bath(charges, params.beta_a, params.chi_a)?;
    let b = qubit_bath(charges, params.beta_b, params.chi_b)?;
    let inter = swap_interaction(params.alpha);
    let cert = inter.certify(&a, &b)?;
    if !cert.pass {
        return Err(Error::CertificateFailure {
            worst: cert.worst(),
        });
    }
    Ok((a, b, inter))
}

pub fn qubit_table(params: &QubitModelParams, charges: ChargeSet) -> Result<TrajectoryTable> {
    let (a, b, inter) = build_qubit_model_with(params, charges)?;
    enumerate_trajectories(&a, &b, &inter, EnumerationOptions::default())
}

/// Settings shared by every point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub eps: f64,
    pub zetas: Vec<f64>,
    pub tolerances: Tolerances,
    pub enumeration: EnumerationOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            eps: DEFAULT_EPS,
            zetas: DEFAULT_ZETAS.to_vec(),
            tolerances: Tolerances::default(),
            enumeration: EnumerationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub params: QubitModelParams,
    pub avg_dq_z: f64,
    pub avg_dq_x: f64,
    pub avg_delta: f64,
    pub sigma_avg: f64,
    pub integral_ft: f64,
    pub naive_ft: f64,
    /// `δβ⟨Δσ_z⟩ + δχ⟨Δσ_x⟩`, the second-law value without `⟨Δ⟩`.
    pub uncorrected_second_law: f64,
    pub inversion_z: bool,
    pub inversion_x: bool,
    pub double_inversion: bool,
    /// Smallest `ratio − bound` over the non-degenerate currents; `None` when
    /// both are degenerate.
    pub tur_min_margin: Option<f64>,
    pub detailed_ft_residual: f64,
    /// `|⟨σ⟩ − S(Uρ₀U†‖ρ₀)|`.
    pub relative_entropy_residual: f64,
    pub tail_bound_ok: bool,
    pub flags: Vec<String>,
    pub error: Option<Error>,
}

impl SweepPoint {
    fn failed(params: QubitModelParams, err: Error) -> Self {
        SweepPoint {
            params,
            avg_dq_z: f64::NAN,
            avg_dq_x: f64::NAN,
            avg_delta: f64::NAN,
            sigma_avg: f64::NAN,
            integral_ft: f64::NAN,
            naive_ft: f64::NAN,
            uncorrected_second_law: f64::NAN,
            inversion_z: false,
            inversion_x: false,
            double_inversion: false,
            tur_min_margin: None,
            detailed_ft_residual: f64::NAN,
            relative_entropy_residual: f64::NAN,
            tail_bound_ok: false,
            flags: vec![format!("error: {err}")],
            error: Some(err),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Sets the inversion flags from the averages and the affinity biases.
pub fn detect_inversions(point: &mut SweepPoint) {
    let (db, dc) = (point.params.delta_beta(), point.params.delta_chi());
    point.inversion_z = db != 0.0 && point.avg_dq_z * db < -INVERSION_TOL;
    point.inversion_x = dc != 0.0 && point.avg_dq_x * dc < -INVERSION_TOL;
    point.double_inversion = point.inversion_z && point.inversion_x;
}

pub fn evaluate_point(
    params: &QubitModelParams,
    charges: ChargeSet,
    opts: &EvalOptions,
) -> SweepPoint {
    match try_evaluate(params, charges, opts) {
        Ok(p) => p,
        Err(e) => SweepPoint::failed(*params, e),
    }
}

fn try_evaluate(
    params: &QubitModelParams,
    charges: ChargeSet,
    opts: &EvalOptions,
) -> Result<SweepPoint> {
    let (a, b, inter) = build_qubit_model_with(params, charges)?;
    let table = enumerate_trajectories(&a, &b, &inter, opts.enumeration)?;
    let dist = build_distribution(&table, opts.eps);
    let avg = averages(&table);
    let tol = &opts.tolerances;

    let mut flags = Vec::new();
    let mut tur_min: Option<f64> = None;
    for (j, name) in ["z", "x"].iter().enumerate() {
        let r = tur_report(&dist, j, tol)?;
        if r.degenerate() {
            flags.push(format!("tur_{name}_degenerate"));
        } else if let Some(m) = r.details.num("margin") {
            tur_min = Some(tur_min.map_or(m, |t: f64| t.min(m)));
        }
    }
    let detailed = detailed_ft_report(&dist, tol);
    let integral = integral_ft_report(&dist, tol);
    let second = second_law_report(&avg, tol);
    let rel = relative_entropy_report(&table, &avg, tol);
    let tail = tail_bound_report(&table, &opts.zetas, tol);
    for (ok, name) in [
        (detailed.pass, "detailed_ft_fail"),
        (integral.pass, "integral_ft_fail"),
        (second.pass, "second_law_fail"),
        (tur_min.is_none_or(|m| m >= -tol.tur), "tur_fail"),
        (rel.pass, "relative_entropy_fail"),
        (tail.pass, "tail_bound_fail"),
    ] {
        if !ok {
            flags.push(name.to_string());
        }
    }

    let mut point = SweepPoint {
        params: *params,
        avg_dq_z: avg.avg_dq[0],
        avg_dq_x: avg.avg_dq[1],
        avg_delta: avg.avg_delta,
        sigma_avg: avg.sigma_avg,
        integral_ft: integral_ft(&dist),
        naive_ft: naive_integral_ft(&dist),
        uncorrected_second_law: avg.uncorrected,
        inversion_z: false,
        inversion_x: false,
        double_inversion: false,
        tur_min_margin: tur_min,
        detailed_ft_residual: detailed.residual,
        relative_entropy_residual: rel.residual,
        tail_bound_ok: tail.pass,
        flags,
        error: None,
    };
    detect_inversions(&mut point);
    Ok(point)
}

/// The parameter a sweep varies. `DeltaChi` and `DeltaBeta` move bath A's
/// affinity relative to bath B's fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    BetaA,
    ChiA,
    BetaB,
    ChiB,
    Alpha,
    DeltaChi,
    DeltaBeta,
}

impl SweepVar {
    pub const ALL: [SweepVar; 7] = [
        SweepVar::BetaA,
        SweepVar::ChiA,
        SweepVar::BetaB,
        SweepVar::ChiB,
        SweepVar::Alpha,
        SweepVar::DeltaChi,
        SweepVar::DeltaBeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVar::BetaA => "betaA",
            SweepVar::ChiA => "chiA",
            SweepVar::BetaB => "betaB",
            SweepVar::ChiB => "chiB",
            SweepVar::Alpha => "alpha",
            SweepVar::DeltaChi => "dchi",
            SweepVar::DeltaBeta => "dbeta",
        }
    }

    pub fn apply(self, base: &QubitModelParams, v: f64) -> QubitModelParams {
        let mut p = *base;
        match self {
            SweepVar::BetaA => p.beta_a = v,
            SweepVar::ChiA => p.chi_a = v,
            SweepVar::BetaB => p.beta_b = v,
            SweepVar::ChiB => p.chi_b = v,
            SweepVar::Alpha => p.alpha = v,
            SweepVar::DeltaChi => p.chi_a = p.chi_b + v,
            SweepVar::DeltaBeta => p.beta_a = p.beta_b + v,
        }
        p
    }

    /// Value of this variable at `p`.
    pub fn read(self, p: &QubitModelParams) -> f64 {
        match self {
            SweepVar::BetaA => p.beta_a,
            SweepVar::ChiA => p.chi_a,
            SweepVar::BetaB => p.beta_b,
            SweepVar::ChiB => p.chi_b,
            SweepVar::Alpha => p.alpha,
            SweepVar::DeltaChi => p.delta_chi(),
            SweepVar::DeltaBeta => p.delta_beta(),
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        SweepVar::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = SweepVar::ALL.iter().map(|v| v.name()).collect();
                format!(
                    "unknown sweep variable {s:?} (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Values of the parameters that are not swept.
    pub base: QubitModelParams,
    pub charges: ChargeSet,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidBath("grid needs at least one point".into()));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Grid node `k` of `count` evenly spaced values from `start` to `stop`
    /// inclusive.
    pub fn value(&self, k: usize) -> f64 {
        if self.count <= 1 {
            return self.start;
        }
        if k + 1 == self.count {
            return self.stop;
        }
        let t = k as f64 / (self.count - 1) as f64;
        self.start + t * (self.stop - self.start)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.value(k)).collect()
    }

    pub fn params(&self, k: usize) -> QubitModelParams {
        self.var.apply(&self.base, self.value(k))
    }
}

/// Default grids: `δχ ∈ [−2, 2]` at 201 points with `χ_B = 2`, `α = 1`,
/// first with `β_A = β_B = 0.5`, then with `β_A = 0.3 < β_B = 0.8`.
pub fn default_grids() -> [GridSpec; 2] {
    let grid = |beta_a, beta_b| GridSpec {
        var: SweepVar::DeltaChi,
        start: -2.0,
        stop: 2.0,
        count: 201,
        base: QubitModelParams::new(beta_a, CHI_B_DEFAULT, beta_b, CHI_B_DEFAULT, 1.0),
        charges: ChargeSet::NonAbelian,
    };
    [grid(0.5, 0.5), grid(0.3, 0.8)]
}

/// One point per grid node in grid order. Failing points are kept, flagged,
/// and carry their error.
pub fn sweep_fig2(grid: &GridSpec, opts: &EvalOptions) -> Result<Vec<SweepPoint>> {
    grid.validate()?;
    Ok((0..grid.count)
        .map(|k| evaluate_point(&grid.params(k), grid.charges, opts))
        .collect())
}
