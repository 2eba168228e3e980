//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ncxft_core::collision::{
    enumerate_trajectories, EnumerationOptions, ExplicitDelta, TrajectoryTable,
};
use ncxft_core::commutant::{
    projection_residual, solve_allowed_interactions, unitary_from_interaction,
};
use ncxft_core::gibbs::{Bath, Charge};
use ncxft_core::matlin::CMatrix;
use ncxft_core::qubit::{
    default_grids, qubit_table, sweep_fig2, ChargeSet, EvalOptions, GridSpec, QubitModelParams,
};
use ncxft_core::statistics::{
    build_distribution, detailed_ft_report, integral_ft, naive_integral_ft, Tolerances, DEFAULT_EPS,
};
use ncxft_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INTEGRAL_TOL: f64 = 1e-10;
const DETAILED_TOL: f64 = 1e-8;
const EXPLICIT_TOL: f64 = 1e-8;
const IMAG_TOL: f64 = 1e-9;
const REVERSAL_TOL: f64 = 1e-9;
const COMMUTING_DELTA_TOL: f64 = 1e-10;
const NONCOMMUTING_DELTA_MIN: f64 = 1e-6;
const SECOND_LAW_TOL: f64 = 1e-10;
const REL_ENTROPY_TOL: f64 = 1e-10;
const TUR_TOL: f64 = 1e-9;
const TAIL_TOL: f64 = 1e-12;
const ZETAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];
const PROJECTION_TOL: f64 = 1e-9;
const NAIVE_DEVIATION_MIN: f64 = 1e-3;
const INVERSION_TOL: f64 = 1e-12;
const DEGENERATE_MEAN: f64 = 1e-12;
const DEGENERATE_SIGMA: f64 = 1e-12;

const GRID_BUDGET: Duration = Duration::from_secs(10);
const FIG_BUDGET: Duration = Duration::from_secs(30);
const RANDOM_BUDGET: Duration = Duration::from_secs(60);

// ---------------------------------------------------------------------------
// Independent dense oracle: plain row-major complex matrices, Taylor-series
// exponentials with scaling and squaring. No eigendecompositions.

#[derive(Clone)]
struct M {
    n: usize,
    a: Vec<Complex64>,
}

impl M {
    fn from(c: &CMatrix) -> M {
        M {
            n: c.dim(),
            a: c.as_slice().to_vec(),
        }
    }
    fn zeros(n: usize) -> M {
        M {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }
    fn eye(n: usize) -> M {
        let mut m = M::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }
    fn mul(&self, o: &M) -> M {
        let n = self.n;
        let mut r = M::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.at(i, k);
                for j in 0..n {
                    r.a[i * n + j] += x * o.at(k, j);
                }
            }
        }
        r
    }
    fn add(&self, o: &M) -> M {
        M {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }
    fn scale(&self, s: Complex64) -> M {
        M {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }
    fn dagger(&self) -> M {
        let n = self.n;
        let mut r = M::zeros(n);
        for i in 0..n {
            for j in 0..n {
                r.a[j * n + i] = self.at(i, j).conj();
            }
        }
        r
    }
    fn kron(&self, o: &M) -> M {
        let (p, q) = (self.n, o.n);
        let mut r = M::zeros(p * q);
        for i in 0..p {
            for j in 0..p {
                for k in 0..q {
                    for l in 0..q {
                        r.a[(i * q + k) * p * q + j * q + l] = self.at(i, j) * o.at(k, l);
                    }
                }
            }
        }
        r
    }
    fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }
    fn norm(&self) -> f64 {
        self.a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
    /// `e^{self}` by Taylor series on `self/2^s`, then squaring.
    fn exp(&self) -> M {
        let mut s = 0;
        while self.norm() / f64::powi(2.0, s) > 0.25 {
            s += 1;
        }
        let x = self.scale(Complex64::new(f64::powi(2.0, -s), 0.0));
        let mut term = M::eye(self.n);
        let mut sum = M::eye(self.n);
        for k in 1..30 {
            term = term.mul(&x).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }
}

fn exchange_op(bath: &Bath) -> M {
    bath.charges()
        .iter()
        .zip(bath.affinities())
        .fold(M::zeros(bath.dim()), |acc, (q, &l)| {
            acc.add(&M::from(&q.matrix).scale(Complex64::new(l, 0.0)))
        })
}

fn gibbs_oracle(bath: &Bath) -> M {
    let e = exchange_op(bath).scale(Complex64::new(-1.0, 0.0)).exp();
    let z = e.trace().re;
    e.scale(Complex64::new(1.0 / z, 0.0))
}

/// `S(Uρ₀U†‖ρ₀) = tr[(Uρ₀U† − ρ₀)(𝓗_A⊗𝟙 + 𝟙⊗𝓗_B)]`, using that `Uρ₀U†` and
/// `ρ₀` share a spectrum and `ln ρ₀ = −𝓗_tot − ln Z`.
fn relative_entropy_oracle(a: &Bath, b: &Bath, u: &M) -> f64 {
    let rho0 = gibbs_oracle(a).kron(&gibbs_oracle(b));
    let rho1 = u.mul(&rho0).mul(&u.dagger());
    let htot = exchange_op(a)
        .kron(&M::eye(b.dim()))
        .add(&M::eye(a.dim()).kron(&exchange_op(b)));
    let diff = rho1.add(&rho0.scale(Complex64::new(-1.0, 0.0)));
    diff.mul(&htot).trace().re
}

/// `e^{−iτH}` from the series.
fn unitary_oracle(h: &CMatrix, tau: f64) -> M {
    M::from(h).scale(Complex64::new(0.0, -tau)).exp()
}

// ---------------------------------------------------------------------------
// Row-level statistics computed directly from the trajectory table.

fn entropy(t: &TrajectoryTable, k: usize) -> f64 {
    let r = &t.rows[k];
    t.deltas_lambda
        .iter()
        .zip(&r.dq)
        .map(|(l, q)| l * q)
        .sum::<f64>()
        + r.delta
}

struct RowStats {
    sigma_avg: f64,
    /// Per charge `(mean, variance)`.
    moments: Vec<(f64, f64)>,
    tails: Vec<f64>,
}

fn row_stats(t: &TrajectoryTable) -> RowStats {
    let nq = t.deltas_lambda.len();
    let mut sigma_avg = 0.0;
    let mut m1 = vec![0.0; nq];
    let mut m2 = vec![0.0; nq];
    let mut tails = vec![0.0; ZETAS.len()];
    for (k, r) in t.rows.iter().enumerate() {
        if !r.supported {
            continue;
        }
        let s = entropy(t, k);
        sigma_avg += r.prob * s;
        for j in 0..nq {
            m1[j] += r.prob * r.dq[j];
            m2[j] += r.prob * r.dq[j] * r.dq[j];
        }
        for (z, tail) in ZETAS.iter().zip(tails.iter_mut()) {
            if s < -z {
                *tail += r.prob;
            }
        }
    }
    RowStats {
        sigma_avg,
        moments: m1.iter().zip(&m2).map(|(a, b)| (*a, b - a * a)).collect(),
        tails,
    }
}

/// Worst violation of the uncertainty relation over non-degenerate charges,
/// as `bound − ratio` (positive means violated).
fn tur_violation(s: &RowStats) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for &(mean, var) in &s.moments {
        if mean.abs() < DEGENERATE_MEAN || s.sigma_avg < DEGENERATE_SIGMA {
            continue;
        }
        let v = 2.0 / s.sigma_avg.exp_m1() - var / (mean * mean);
        worst = Some(worst.map_or(v, |w: f64| w.max(v)));
    }
    worst
}

fn tail_violation(s: &RowStats) -> f64 {
    ZETAS
        .iter()
        .zip(&s.tails)
        .map(|(z, p)| p - (-z).exp())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Relation checks shared by criteria 1, 2, 5, 6, 7 and 10.
#[derive(Default)]
struct Worst {
    points: usize,
    integral: f64,
    detailed: f64,
    second_law: f64,
    rel_entropy: f64,
    tur: f64,
    tur_points: usize,
    tail: f64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            second_law: f64::INFINITY,
            tur: f64::NEG_INFINITY,
            tail: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    fn absorb(&mut self, t: &TrajectoryTable, u: &M) {
        let tol = Tolerances::default();
        let dist = build_distribution(t, DEFAULT_EPS);
        self.points += 1;
        self.integral = self.integral.max((integral_ft(&dist) - 1.0).abs());
        self.detailed = self.detailed.max(detailed_ft_report(&dist, &tol).residual);
        let s = row_stats(t);
        self.second_law = self.second_law.min(s.sigma_avg);
        let rel = relative_entropy_oracle(&t.bath_a, &t.bath_b, u);
        self.rel_entropy = self.rel_entropy.max((s.sigma_avg - rel).abs());
        if let Some(v) = tur_violation(&s) {
            self.tur = self.tur.max(v);
            self.tur_points += 1;
        }
        self.tail = self.tail.max(tail_violation(&s));
    }
}

// ---------------------------------------------------------------------------

struct Report {
    lines: Vec<String>,
    failed: usize,
}

impl Report {
    fn record(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        let line = format!(
            "criterion {id:>2} {name:<28} {} {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        if !pass {
            self.failed += 1;
        }
        self.lines.push(line);
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn pauli_bath(labels: &[(&str, CMatrix)], aff: &[f64]) -> Bath {
    Bath::new(
        labels
            .iter()
            .map(|(l, m)| Charge::new(*l, m.clone()))
            .collect(),
        aff.to_vec(),
    )
    .unwrap()
}

fn grid_points() -> Vec<QubitModelParams> {
    let chis = linspace(-1.5, 1.5, 20);
    let mut out = Vec::with_capacity(800);
    for &(ba, bb) in &[(0.5, 0.5), (0.3, 0.8)] {
        for &ca in &chis {
            for &cb in &chis {
                out.push(QubitModelParams::new(ba, ca, bb, cb, 1.0));
            }
        }
    }
    out
}

fn grid_criteria(rep: &mut Report) {
    let start = Instant::now();
    let mut w = Worst::new();
    let mut errors = 0;
    for p in grid_points() {
        match qubit_table(&p, ChargeSet::NonAbelian) {
            Ok(t) => {
                let u = M::from(&t.interaction.u);
                w.absorb(&t, &u);
            }
            Err(_) => errors += 1,
        }
    }
    let elapsed = start.elapsed();
    let all = w.points == 800 && errors == 0;
    rep.record(
        "1",
        "integral FT (grid)",
        all && w.integral <= INTEGRAL_TOL && elapsed < GRID_BUDGET,
        format!(
            "points={} max|<e^-s>-1|={:.2e} tol={INTEGRAL_TOL:e} time={:.2}s budget={}s",
            w.points,
            w.integral,
            elapsed.as_secs_f64(),
            GRID_BUDGET.as_secs()
        ),
    );
    rep.record(
        "2",
        "detailed FT (grid)",
        all && w.detailed < DETAILED_TOL,
        format!(
            "max log-ratio residual={:.2e} tol={DETAILED_TOL:e}",
            w.detailed
        ),
    );
    rep.record(
        "5",
        "second law + rel. entropy",
        all && w.second_law >= -SECOND_LAW_TOL && w.rel_entropy <= REL_ENTROPY_TOL,
        format!(
            "min <s>={:.3e} (>= -{SECOND_LAW_TOL:e}) max|<s>-S|={:.2e} tol={REL_ENTROPY_TOL:e}",
            w.second_law, w.rel_entropy
        ),
    );
    rep.record(
        "6",
        "uncertainty relation (grid)",
        all && w.tur <= TUR_TOL,
        format!(
            "non-degenerate points={} max(bound-ratio)={:.3e} tol={TUR_TOL:e}",
            w.tur_points, w.tur
        ),
    );
    rep.record(
        "7",
        "tail bound (grid)",
        all && w.tail <= TAIL_TOL,
        format!("max(P(s<-z)-e^-z)={:.3e} tol={TAIL_TOL:e}", w.tail),
    );
}

fn delta_consistency(rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let (mut worst_explicit, mut worst_imag, mut worst_rev) = (0.0f64, 0.0f64, 0.0f64);
    let (mut applicable, mut draws) = (0usize, 0usize);
    while draws < 50 {
        let p = QubitModelParams::new(
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-3.0..3.0),
        );
        let Ok(t) = qubit_table(&p, ChargeSet::NonAbelian) else {
            continue;
        };
        draws += 1;
        for r in &t.rows {
            if let ExplicitDelta::Applicable { value, imag } =
                t.delta_explicit(r.n, r.nu, r.m, r.mu).unwrap()
            {
                applicable += 1;
                worst_explicit = worst_explicit.max((value - r.delta).abs());
                worst_imag = worst_imag.max(imag.abs());
            }
            worst_rev = worst_rev.max((t.reverse(r).delta + r.delta).abs());
        }
    }
    rep.record(
        "3",
        "correction consistency",
        applicable > 0
            && worst_explicit < EXPLICIT_TOL
            && worst_imag < IMAG_TOL
            && worst_rev < REVERSAL_TOL,
        format!(
            "draws={draws} applicable rows={applicable} max|explicit-residual|={worst_explicit:.2e} max|imag|={worst_imag:.2e} max|D(rev)+D|={worst_rev:.2e}"
        ),
    );
}

fn commuting_reduction(rep: &mut Report) {
    let z = CMatrix::pauli_z();
    let z2 = &z.scale_real(2.0) + &CMatrix::identity(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let (mut max_delta, mut max_naive) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let la: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lb: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let charges = [("z", z.clone()), ("w", z2.clone())];
        let a = pauli_bath(&charges, &la);
        let b = pauli_bath(&charges, &lb);
        let inter = ncxft_core::qubit::swap_interaction(rng.gen_range(-3.0..3.0));
        let Ok(t) = enumerate_trajectories(&a, &b, &inter, EnumerationOptions::default()) else {
            continue;
        };
        // Δ is only meaningful on realized trajectories
        for r in t.supported() {
            max_delta = max_delta.max(r.delta.abs());
        }
        let dist = build_distribution(&t, DEFAULT_EPS);
        max_naive = max_naive.max((naive_integral_ft(&dist) - 1.0).abs());
    }
    let t = qubit_table(
        &QubitModelParams::new(0.5, 0.8, 0.5, 0.2, 1.0),
        ChargeSet::NonAbelian,
    )
    .unwrap();
    let noncommuting = t.supported().map(|r| r.delta.abs()).fold(0.0, f64::max);
    rep.record(
        "4",
        "commuting reduction",
        max_delta < COMMUTING_DELTA_TOL
            && max_naive <= INTEGRAL_TOL
            && noncommuting > NONCOMMUTING_DELTA_MIN,
        format!(
            "commuting: max|D|={max_delta:.2e} max|naive-1|={max_naive:.2e}; non-commuting max|D|={noncommuting:.3}"
        ),
    );
}

// Commutant oracle: Pauli-product basis, real coefficient map, rank by
// Gaussian elimination with partial pivoting.

fn paulis() -> [CMatrix; 4] {
    [
        CMatrix::identity(2),
        CMatrix::pauli_x(),
        CMatrix::pauli_y(),
        CMatrix::pauli_z(),
    ]
}

fn pauli_products() -> Vec<M> {
    let p = paulis();
    let mut out = Vec::new();
    for a in &p {
        for b in &p {
            out.push(M::from(a).kron(&M::from(b)).scale(Complex64::new(0.5, 0.0)));
        }
    }
    out
}

fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) =
            (r..rows.len()).max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs()))
        else {
            break;
        };
        if rows[piv][c].abs() <= tol {
            continue;
        }
        rows.swap(r, piv);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c] / pivot[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * p;
                }
            }
        }
        r += 1;
    }
    r
}

fn brute_force_commutant_dim(charges: &[CMatrix]) -> usize {
    let basis = pauli_products();
    let mut rows = Vec::new();
    for q in charges {
        let t = M::from(q)
            .kron(&M::eye(2))
            .add(&M::eye(2).kron(&M::from(q)));
        // column j: coordinates of i[B_j, T] in the same basis
        let cols: Vec<Vec<f64>> = basis
            .iter()
            .map(|bj| {
                let c = bj.mul(&t).add(&t.mul(bj).scale(Complex64::new(-1.0, 0.0)));
                let c = c.scale(Complex64::new(0.0, 1.0));
                basis
                    .iter()
                    .map(|bk| bk.dagger().mul(&c).trace().re)
                    .collect()
            })
            .collect();
        for k in 0..basis.len() {
            rows.push(cols.iter().map(|col| col[k]).collect());
        }
    }
    basis.len() - rank(rows, 1e-9)
}

fn commutant(rep: &mut Report) {
    let charges = [CMatrix::pauli_z(), CMatrix::pauli_x()];
    let a = pauli_bath(
        &[("z", charges[0].clone()), ("x", charges[1].clone())],
        &[0.5, 0.8],
    );
    let b = pauli_bath(
        &[("z", charges[0].clone()), ("x", charges[1].clone())],
        &[0.5, 0.2],
    );
    let basis = solve_allowed_interactions(&a, &b).unwrap();
    let mut heis = CMatrix::zeros(4);
    for p in &paulis()[1..] {
        heis = &heis + &ncxft_core::matlin::kron(p, p);
    }
    let targets = [
        CMatrix::identity(4).scale_real(0.5),
        heis.scale_real(1.0 / 12f64.sqrt()),
    ];
    let resid = targets
        .iter()
        .map(|x| projection_residual(&basis, x))
        .fold(0.0, f64::max);
    let oracle = brute_force_commutant_dim(&charges);
    rep.record(
        "8",
        "commutant",
        basis.len() == 2 && resid < PROJECTION_TOL && oracle == 2,
        format!(
            "solver dim={} oracle dim={oracle} max projection residual={resid:.2e} tol={PROJECTION_TOL:e}",
            basis.len()
        ),
    );
}

fn fig2_features(rep: &mut Report) {
    let start = Instant::now();
    let opts = EvalOptions::default();
    let grid = default_grids()[1].clone();
    let pts = sweep_fig2(&grid, &opts).unwrap();
    let control = GridSpec {
        charges: ChargeSet::CommutingControl,
        ..grid.clone()
    };
    let ctl = sweep_fig2(&control, &opts).unwrap();
    let elapsed = start.elapsed();

    let naive = pts
        .iter()
        .filter(|p| p.is_ok())
        .map(|p| (p.naive_ft - 1.0).abs())
        .fold(0.0, f64::max);
    let apparent = pts
        .iter()
        .filter(|p| p.uncorrected_second_law < 0.0 && p.sigma_avg >= 0.0)
        .count();
    // recomputed from the averages rather than read from the flags
    let double = |p: &ncxft_core::qubit::SweepPoint| {
        p.is_ok()
            && p.avg_dq_z * p.params.delta_beta() < -INVERSION_TOL
            && p.avg_dq_x * p.params.delta_chi() < -INVERSION_TOL
    };
    let doubles = pts.iter().filter(|p| double(p)).count();
    let flagged = pts.iter().filter(|p| p.double_inversion).count();
    let ctl_doubles = ctl
        .iter()
        .filter(|p| double(p) || p.double_inversion)
        .count();
    rep.record(
        "9",
        "sweep qualitative features",
        naive > NAIVE_DEVIATION_MIN
            && apparent > 0
            && doubles > 0
            && doubles == flagged
            && ctl_doubles == 0
            && elapsed < FIG_BUDGET,
        format!(
            "points={} max|naive-1|={naive:.3} apparent violations={apparent} double inversions={doubles} control double inversions={ctl_doubles} time={:.2}s budget={}s",
            pts.len(),
            elapsed.as_secs_f64(),
            FIG_BUDGET.as_secs()
        ),
    );
}

fn spin(d: usize) -> (CMatrix, CMatrix) {
    match d {
        2 => (
            CMatrix::pauli_z().scale_real(0.5),
            CMatrix::pauli_x().scale_real(0.5),
        ),
        3 => {
            let s = 0.5f64.sqrt();
            (
                CMatrix::diag_real(&[1.0, 0.0, -1.0]),
                CMatrix::from_real(3, &[0.0, s, 0.0, s, 0.0, s, 0.0, s, 0.0]),
            )
        }
        _ => unreachable!(),
    }
}

fn random_models(rep: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let mut w = Worst::new();
    let mut redraws = 0;
    let mut unitary_gap = 0.0f64;
    let mut dims_seen = [[0usize; 2]; 2];
    while w.points < 100 {
        let (da, db) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let mix: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        if (mix[0] * mix[3] - mix[1] * mix[2]).abs() < 0.3 {
            continue;
        }
        let charges = |d: usize| {
            let (jz, jx) = spin(d);
            vec![
                Charge::new("q1", &jz.scale_real(mix[0]) + &jx.scale_real(mix[1])),
                Charge::new("q2", &jz.scale_real(mix[2]) + &jx.scale_real(mix[3])),
            ]
        };
        let aff = |rng: &mut ChaCha8Rng| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let a = Bath::new(charges(da), aff(&mut rng)).unwrap();
        let b = Bath::new(charges(db), aff(&mut rng)).unwrap();
        let basis = solve_allowed_interactions(&a, &b).unwrap();
        let x = basis.iter().fold(CMatrix::zeros(da * db), |acc, bk| {
            &acc + &bk.scale_real(rng.gen_range(-1.0..1.0))
        });
        let h = (&x + &x.conj()).scale_real(0.5);
        let tau = rng.gen_range(0.2..2.0);
        let inter = unitary_from_interaction(&h, tau).unwrap();
        let t = match enumerate_trajectories(&a, &b, &inter, EnumerationOptions::default()) {
            Ok(t) => t,
            Err(_) => {
                redraws += 1;
                continue;
            }
        };
        let u = unitary_oracle(&h, tau);
        let lib_u = M::from(&inter.u);
        unitary_gap = unitary_gap.max(u.add(&lib_u.scale(Complex64::new(-1.0, 0.0))).norm());
        dims_seen[da - 2][db - 2] += 1;
        w.absorb(&t, &u);
    }
    let elapsed = start.elapsed();
    let pass = w.integral <= INTEGRAL_TOL
        && w.detailed < DETAILED_TOL
        && w.second_law >= -SECOND_LAW_TOL
        && w.rel_entropy <= REL_ENTROPY_TOL
        && w.tur <= TUR_TOL
        && w.tail <= TAIL_TOL
        && unitary_gap < 1e-10
        && elapsed < RANDOM_BUDGET;
    rep.record(
        "10",
        "randomized models",
        pass,
        format!(
            "models={} (dims 2x2:{} 2x3:{} 3x2:{} 3x3:{}, redraws={redraws}) integral={:.1e} detailed={:.1e} min<s>={:.2e} rel.entropy={:.1e} tur={:.2e} ({} pts) tail={:.2e} |U-U_oracle|={unitary_gap:.1e} time={:.2}s budget={}s",
            w.points,
            dims_seen[0][0],
            dims_seen[0][1],
            dims_seen[1][0],
            dims_seen[1][1],
            w.integral,
            w.detailed,
            w.second_law,
            w.rel_entropy,
            w.tur,
            w.tur_points,
            w.tail,
            elapsed.as_secs_f64(),
            RANDOM_BUDGET.as_secs()
        ),
    );
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--list`; only run the suite
    // when no filter excludes it.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut rep = Report {
        lines: Vec::new(),
        failed: 0,
    };
    grid_criteria(&mut rep);
    delta_consistency(&mut rep);
    commuting_reduction(&mut rep);
    commutant(&mut rep);
    fig2_features(&mut rep);
    random_models(&mut rep);
    println!(
        "acceptance: {} of {} criteria passed",
        rep.lines.len() - rep.failed,
        rep.lines.len()
    );
    if rep.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
