//! Joint current distribution `P(ΔQ₁,…,ΔQ_N; Δ)` and the relations it
//! satisfies: detailed and integral exchange fluctuation theorems, second
//! law, uncertainty relation, exponential tail bound, and the contrast
//! function identity linking trajectory averages to divergences between
//! `Uρ₀U†` and `ρ₀`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::collision::TrajectoryTable;
use crate::error::{Error, Result};
use crate::math;
use crate::matlin::{herm_eig, kron, CMatrix};

/// Default quantization step for distribution keys.
pub const DEFAULT_EPS: f64 = 1e-9;
/// Default thresholds for the tail bound.
pub const DEFAULT_ZETAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];

const DEGENERATE_TUR: f64 = 1e-12;
const SINGULAR_STATE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Tolerances {
    /// Bin-pair log-ratio residual.
    pub detailed_ft: f64,
    pub integral_ft: f64,
    pub second_law: f64,
    /// Agreement of the average entropy production with `S(Uρ₀U†‖ρ₀)`.
    pub relative_entropy: f64,
    pub tur: f64,
    pub tail_bound: f64,
    /// Bins below this probability are excluded from ratio tests.
    pub support: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            detailed_ft: 1e-8,
            integral_ft: 1e-10,
            second_law: 1e-10,
            relative_entropy: 1e-10,
            tur: 1e-9,
            tail_bound: 1e-12,
            support: 1e-14,
        }
    }
}

/// Values carried in a report's `details`.
#[derive(Debug, Clone, PartialEq)]
pub enum Detail {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Nums(Vec<f64>),
    Keys(Vec<Vec<f64>>),
}

/// Ordered key/value details; serializes as a map in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Details(pub Vec<(String, Detail)>);

impl Details {
    fn push(&mut self, key: &str, value: Detail) {
        self.0.push((key.to_string(), value));
    }

    pub fn get(&self, key: &str) -> Option<&Detail> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn num(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(Detail::Num(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn flag(&self, key: &str) -> Option<bool> {
        match self.get(key) {
            Some(Detail::Bool(b)) => Some(*b),
            _ => None,
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Detail {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            Detail::Num(x) => s.serialize_f64(*x),
            Detail::Int(x) => s.serialize_i64(*x),
            Detail::Bool(b) => s.serialize_bool(*b),
            Detail::Text(t) => s.serialize_str(t),
            Detail::Nums(v) => v.serialize(s),
            Detail::Keys(v) => v.serialize(s),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Details {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Outcome of checking one relation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FTReport {
    pub relation: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub details: Details,
}

impl FTReport {
    fn new(relation: &str, residual: f64, tolerance: f64, details: Details) -> Self {
        FTReport {
            relation: relation.to_string(),
            pass: residual.is_finite() && residual <= tolerance,
            residual,
            tolerance,
            details,
        }
    }

    /// True when the relation could not be evaluated (e.g. the uncertainty
    /// relation with vanishing current or entropy production).
    pub fn degenerate(&self) -> bool {
        self.details.flag("degenerate").unwrap_or(false)
    }
}

/// Probability mass of one key together with the exact values of the first
/// trajectory that landed in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub prob: f64,
    pub dq: Vec<f64>,
    pub delta: f64,
}

/// Joint distribution of `(ΔQ₁,…,ΔQ_N, Δ)` with keys quantized to multiples
/// of `eps` (round to nearest, halves away from zero, so `key(−x) = −key(x)`).
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentDistribution {
    pub eps: f64,
    pub deltas_lambda: Vec<f64>,
    bins: BTreeMap<Vec<i64>, Bin>,
}

impl CurrentDistribution {
    pub fn quantize(&self, values: &[f64]) -> Vec<i64> {
        quantize(values, self.eps)
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.bins.values().map(|b| b.prob).sum()
    }

    pub fn get(&self, key: &[i64]) -> Option<&Bin> {
        self.bins.get(key)
    }

    /// Probability at `key`; absent keys have probability zero.
    pub fn prob(&self, key: &[i64]) -> f64 {
        self.bins.get(key).map_or(0.0, |b| b.prob)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Bin)> {
        self.bins.iter()
    }

    /// `σ = Σᵢ δλᵢ ΔQᵢ + Δ` of a bin.
    pub fn entropy(&self, bin: &Bin) -> f64 {
        self.exchange_term(bin) + bin.delta
    }

    /// `Σᵢ δλᵢ ΔQᵢ` of a bin.
    pub fn exchange_term(&self, bin: &Bin) -> f64 {
        self.deltas_lambda
            .iter()
            .zip(&bin.dq)
            .map(|(l, q)| l * q)
            .sum()
    }
}

pub fn negate_key(key: &[i64]) -> Vec<i64> {
    key.iter().map(|k| -k).collect()
}

fn quantize(values: &[f64], eps: f64) -> Vec<i64> {
    values
        .iter()
        .map(|&x| math::round(x / eps) as i64)
        .collect()
}

/// Groups the supported trajectories by their quantized `(ΔQ, Δ)`.
/// Unsupported rows (probability below the table's support threshold) are
/// left out.
pub fn build_distribution(table: &TrajectoryTable, eps: f64) -> CurrentDistribution {
    let mut bins: BTreeMap<Vec<i64>, Bin> = BTreeMap::new();
    for row in table.supported() {
        let mut values = row.dq.clone();
        values.push(row.delta);
        let key = quantize(&values, eps);
        bins.entry(key)
            .and_modify(|b| b.prob += row.prob)
            .or_insert_with(|| Bin {
                prob: row.prob,
                dq: row.dq.clone(),
                delta: row.delta,
            });
    }
    CurrentDistribution {
        eps,
        deltas_lambda: table.deltas_lambda.clone(),
        bins,
    }
}

/// Checks `P(v)/P(−v) = e^{Σᵢ δλᵢ ΔQᵢ + Δ}` on every key whose negation is
/// also supported. Supported keys without a supported mirror are listed as
/// one-sided.
pub fn detailed_ft_report(dist: &CurrentDistribution, tol: &Tolerances) -> FTReport {
    let mut worst: f64 = 0.0;
    let mut pairs = 0i64;
    let mut one_sided = Vec::new();
    for (key, bin) in dist.iter() {
        if bin.prob <= tol.support {
            continue;
        }
        let mirror = dist.prob(&negate_key(key));
        if mirror <= tol.support {
            let mut v = bin.dq.clone();
            v.push(bin.delta);
            one_sided.push(v);
            continue;
        }
        pairs += 1;
        let r = (math::ln(bin.prob / mirror) - dist.entropy(bin)).abs();
        worst = worst.max(r);
    }
    let mut d = Details::default();
    d.push("keys", Detail::Int(dist.len() as i64));
    d.push("bin_pairs", Detail::Int(pairs));
    d.push("one_sided", Detail::Keys(one_sided));
    FTReport::new("detailed_ft", worst, tol.detailed_ft, d)
}

/// `⟨e^{−Σᵢ δλᵢ ΔQᵢ − Δ}⟩`.
pub fn integral_ft(dist: &CurrentDistribution) -> f64 {
    dist.iter()
        .map(|(_, b)| b.prob * math::exp(-dist.entropy(b)))
        .sum()
}

/// `⟨e^{−Σᵢ δλᵢ ΔQᵢ}⟩`, the commuting-charge form with the correction left
/// out of the exponent.
pub fn naive_integral_ft(dist: &CurrentDistribution) -> f64 {
    dist.iter()
        .map(|(_, b)| b.prob * math::exp(-dist.exchange_term(b)))
        .sum()
}

/// `Σ_v P(−v)` over keys with a supported mirror: the integral relation
/// rebuilt from the detailed one.
pub fn integral_ft_from_detailed(dist: &CurrentDistribution, tol: &Tolerances) -> f64 {
    dist.iter()
        .filter(|(k, b)| b.prob > tol.support && dist.prob(&negate_key(k)) > tol.support)
        .map(|(k, _)| dist.prob(&negate_key(k)))
        .sum()
}

pub fn integral_ft_report(dist: &CurrentDistribution, tol: &Tolerances) -> FTReport {
    let value = integral_ft(dist);
    let mut d = Details::default();
    d.push("value", Detail::Num(value));
    d.push("naive_value", Detail::Num(naive_integral_ft(dist)));
    d.push("total_probability", Detail::Num(dist.total()));
    FTReport::new("integral_ft", (value - 1.0).abs(), tol.integral_ft, d)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Averages {
    /// `⟨ΔQᵢ⟩` over the trajectory distribution.
    pub avg_dq: Vec<f64>,
    /// `⟨Δ⟩ = ⟨Δh^A⟩ + ⟨Δh^B⟩ − Σᵢ δλᵢ⟨ΔQᵢ⟩`
    pub avg_delta: f64,
    /// `⟨σ⟩ = Σᵢ δλᵢ⟨ΔQᵢ⟩ + ⟨Δ⟩`
    pub sigma_avg: f64,
    /// `Σᵢ δλᵢ⟨ΔQᵢ⟩`
    pub uncorrected: f64,
    /// `tr[(Qᵢ^A⊗𝟙)(Uρ₀U† − ρ₀)]`; only available from a table.
    pub operator_dq: Option<Vec<f64>>,
}

impl Averages {
    /// `|⟨ΔQᵢ⟩ − tr[(Qᵢ^A⊗𝟙)(Uρ₀U† − ρ₀)]|`. The two agree when `Qᵢ^A` is
    /// diagonal in the eigenbasis of `𝓗_A` and can differ otherwise, since
    /// the trajectory average only sees the dephased charge.
    pub fn operator_gap(&self) -> Option<Vec<f64>> {
        self.operator_dq.as_ref().map(|op| {
            op.iter()
                .zip(&self.avg_dq)
                .map(|(a, b)| (a - b).abs())
                .collect()
        })
    }
}

pub fn averages(table: &TrajectoryTable) -> Averages {
    let n = table.deltas_lambda.len();
    let mut avg_dq = vec![0.0; n];
    let (mut dh_a, mut dh_b) = (0.0, 0.0);
    for r in &table.rows {
        for (acc, q) in avg_dq.iter_mut().zip(&r.dq) {
            *acc += r.prob * q;
        }
        dh_a += r.prob * r.dh_a;
        dh_b += r.prob * r.dh_b;
    }
    let uncorrected: f64 = table
        .deltas_lambda
        .iter()
        .zip(&avg_dq)
        .map(|(l, q)| l * q)
        .sum();
    let avg_delta = dh_a + dh_b - uncorrected;

    let change = &table.final_state() - &table.initial_state();
    let id_b = CMatrix::identity(table.bath_b.dim());
    let operator_dq = table
        .bath_a
        .charges()
        .iter()
        .map(|q| (&kron(&q.matrix, &id_b) * &change).trace().re)
        .collect();

    Averages {
        avg_dq,
        avg_delta,
        sigma_avg: uncorrected + avg_delta,
        uncorrected,
        operator_dq: Some(operator_dq),
    }
}

pub fn averages_from_distribution(dist: &CurrentDistribution) -> Averages {
    let n = dist.deltas_lambda.len();
    let mut avg_dq = vec![0.0; n];
    let mut avg_delta = 0.0;
    for (_, b) in dist.iter() {
        for (acc, q) in avg_dq.iter_mut().zip(&b.dq) {
            *acc += b.prob * q;
        }
        avg_delta += b.prob * b.delta;
    }
    let uncorrected: f64 = dist
        .deltas_lambda
        .iter()
        .zip(&avg_dq)
        .map(|(l, q)| l * q)
        .sum();
    Averages {
        avg_dq,
        avg_delta,
        sigma_avg: uncorrected + avg_delta,
        uncorrected,
        operator_dq: None,
    }
}

/// `Σᵢ δλᵢ⟨ΔQᵢ⟩ + ⟨Δ⟩ ≥ 0`. Also flags an apparent violation when the
/// uncorrected sum alone is negative.
pub fn second_law_report(avg: &Averages, tol: &Tolerances) -> FTReport {
    let mut d = Details::default();
    d.push("corrected", Detail::Num(avg.sigma_avg));
    d.push("uncorrected", Detail::Num(avg.uncorrected));
    d.push("avg_delta", Detail::Num(avg.avg_delta));
    d.push(
        "apparent_violation",
        Detail::Bool(avg.uncorrected < -tol.second_law),
    );
    if let Some(gap) = avg.operator_gap() {
        d.push("operator_current_gap", Detail::Nums(gap));
    }
    FTReport::new("second_law", (-avg.sigma_avg).max(0.0), tol.second_law, d)
}

/// `⟨σ⟩ = S(Uρ₀U†‖ρ₀)`, with the relative entropy evaluated from the
/// spectral decompositions of both states.
pub fn relative_entropy_report(
    table: &TrajectoryTable,
    avg: &Averages,
    tol: &Tolerances,
) -> FTReport {
    let mut d = Details::default();
    match contrast_divergence(
        Contrast::NegLog,
        &table.final_state(),
        &table.initial_state(),
    ) {
        Ok(s) => {
            d.push("relative_entropy", Detail::Num(s));
            d.push("sigma_avg", Detail::Num(avg.sigma_avg));
            FTReport::new(
                "relative_entropy",
                (s - avg.sigma_avg).abs(),
                tol.relative_entropy,
                d,
            )
        }
        Err(e) => {
            d.push("error", Detail::Text(alloc::format!("{e}")));
            FTReport::new("relative_entropy", f64::INFINITY, tol.relative_entropy, d)
        }
    }
}

/// `Var[ΔQⱼ]/⟨ΔQⱼ⟩² ≥ 2/(e^{⟨σ⟩} − 1)`. Vanishing current or entropy
/// production makes the bound undefined; the report is then flagged
/// degenerate and passes vacuously.
pub fn tur_report(dist: &CurrentDistribution, j: usize, tol: &Tolerances) -> Result<FTReport> {
    let n = dist.deltas_lambda.len();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let (mut m1, mut m2, mut sigma) = (0.0, 0.0, 0.0);
    for (_, b) in dist.iter() {
        let q = b.dq[j];
        m1 += b.prob * q;
        m2 += b.prob * q * q;
        sigma += b.prob * dist.entropy(b);
    }
    let mut d = Details::default();
    d.push("charge", Detail::Int(j as i64));
    d.push("mean", Detail::Num(m1));
    d.push("sigma_avg", Detail::Num(sigma));
    if m1.abs() < DEGENERATE_TUR || sigma < DEGENERATE_TUR {
        d.push("degenerate", Detail::Bool(true));
        return Ok(FTReport::new("tur", 0.0, tol.tur, d));
    }
    let var = m2 - m1 * m1;
    let ratio = var / (m1 * m1);
    let bound = 2.0 / math::expm1(sigma);
    d.push("degenerate", Detail::Bool(false));
    d.push("ratio", Detail::Num(ratio));
    d.push("bound", Detail::Num(bound));
    d.push("margin", Detail::Num(ratio - bound));
    Ok(FTReport::new("tur", (bound - ratio).max(0.0), tol.tur, d))
}

/// `P(σ < −ζ) ≤ e^{−ζ}` for each `ζ`, summed over supported trajectories.
pub fn tail_bound_report(table: &TrajectoryTable, zetas: &[f64], tol: &Tolerances) -> FTReport {
    let dl = &table.deltas_lambda;
    let mut worst: f64 = 0.0;
    let mut lhs = Vec::with_capacity(zetas.len());
    let mut rhs = Vec::with_capacity(zetas.len());
    for &zeta in zetas {
        let p: f64 = table
            .rows
            .iter()
            .filter(|r| r.supported && r.entropy(dl) < -zeta)
            .map(|r| r.prob)
            .sum();
        let bound = math::exp(-zeta);
        worst = worst.max(p - bound);
        lhs.push(p);
        rhs.push(bound);
    }
    let mut d = Details::default();
    d.push("zeta", Detail::Nums(zetas.to_vec()));
    d.push("probability", Detail::Nums(lhs));
    d.push("bound", Detail::Nums(rhs));
    FTReport::new("tail_bound", worst.max(0.0), tol.tail_bound, d)
}

/// The two contrast functions `g` exercised here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contrast {
    /// `g(x) = x`; the divergence is `tr σ = 1`.
    Identity,
    /// `g(x) = −ln x`; the divergence is the relative entropy.
    NegLog,
}

impl Contrast {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Contrast::Identity => x,
            Contrast::NegLog => -math::ln(x),
        }
    }
}

/// `S_g(ρ‖σ) = Σᵢⱼ ρᵢ g(σⱼ/ρᵢ) |⟨σⱼ|ρᵢ⟩|²`.
pub fn contrast_divergence(g: Contrast, rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let er = herm_eig(rho)?;
    let es = herm_eig(sigma)?;
    if er.dim() != es.dim() {
        return Err(Error::DimensionMismatch {
            expected: er.dim(),
            found: es.dim(),
        });
    }
    let min_sigma = es.values.first().copied().unwrap_or(0.0);
    if min_sigma < SINGULAR_STATE {
        return Err(Error::SingularState {
            min_eigenvalue: min_sigma,
        });
    }
    let n = er.dim();
    let mut total = 0.0;
    for i in 0..n {
        let ri = er.values[i];
        let vi = er.vector(i);
        for j in 0..n {
            let sj = es.values[j];
            let vj = es.vector(j);
            let overlap: f64 = vj
                .iter()
                .zip(&vi)
                .map(|(a, b)| a.conj() * b)
                .sum::<num_complex::Complex64>()
                .norm_sqr();
            // ρᵢ → 0 limits: ρᵢ·(σⱼ/ρᵢ) → σⱼ and ρᵢ·ln(ρᵢ/σⱼ) → 0
            let term = if ri > 0.0 {
                ri * g.eval(sj / ri)
            } else {
                match g {
                    Contrast::Identity => sj,
                    Contrast::NegLog => 0.0,
                }
            };
            total += term * overlap;
        }
    }
    Ok(total)
}

/// `Σ_γ P(γ) g(e^{−(Δh^A + Δh^B)})`, the trajectory side of the contrast
/// identity for `S_g(Uρ₀U†‖ρ₀)`.
pub fn trajectory_contrast(table: &TrajectoryTable, g: Contrast) -> f64 {
    table
        .rows
        .iter()
        .filter(|r| r.prob > 0.0)
        .map(|r| r.prob * g.eval(math::exp(-(r.dh_a + r.dh_b))))
        .sum()
}

/// Every relation report for one table: detailed and integral fluctuation
/// theorems, second law, relative-entropy identity, one uncertainty relation
/// per charge, and the tail bound.
pub fn verify_all(
    table: &TrajectoryTable,
    eps: f64,
    zetas: &[f64],
    tol: &Tolerances,
) -> Vec<FTReport> {
    let dist = build_distribution(table, eps);
    let avg = averages(table);
    let mut out = vec![
        detailed_ft_report(&dist, tol),
        integral_ft_report(&dist, tol),
        second_law_report(&avg, tol),
        relative_entropy_report(table, &avg, tol),
    ];
    for j in 0..table.deltas_lambda.len() {
        out.push(tur_report(&dist, j, tol).expect("charge index in range"));
    }
    out.push(tail_bound_report(table, zetas, tol));
    out
}
