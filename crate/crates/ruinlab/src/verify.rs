//! The acceptance checks.
//!
//! Each criterion is a self-contained function returning a pass/fail
//! verdict with measured numbers; the `verify` subcommand and the
//! acceptance test suite both drive these. Eigen solves are memoized in
//! process so overlapping criteria do not repeat work.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use serde::Serialize;

use crate::absorption::{absorption_row, AbsorptionRow};
use crate::analysis::{fit_power_law, ratio_report, successive_exponents};
use crate::error::Result;
use crate::kernel::KernelOperator;
use crate::montecarlo::{estimate_face_probability, simulate_with, SimOptions};
use crate::profile::{phi0_formula_k3, phi0_formula_tau, ProfileConstants};
use crate::simplex::{ChipConfig, SimplexIndex};
use crate::spectral::{center_value, perron_frobenius, EigenPair, PowerSettings};
use crate::sphereig::{dirichlet_lambda, octant_triangle, tetrahedral_triangle};

/// Verdict for one acceptance criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub elapsed_s: f64,
}

impl CriterionResult {
    fn finish(id: u32, name: &'static str, passed: bool, details: String, t0: Instant) -> Self {
        Self {
            id,
            name,
            passed,
            details,
            elapsed_s: t0.elapsed().as_secs_f64(),
        }
    }

    /// The one-line form printed by the acceptance driver.
    pub fn line(&self) -> String {
        format!(
            "criterion {} ({}): {} — {} [{:.1}s]",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.details,
            self.elapsed_s
        )
    }
}

struct EigenState {
    index: Arc<SimplexIndex>,
    op: KernelOperator,
    pair: EigenPair,
}

type EigenMemo = Mutex<HashMap<(usize, u64), Arc<EigenState>>>;

fn memo() -> &'static EigenMemo {
    static MEMO: OnceLock<EigenMemo> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn eigen_state(k: usize, n: u64) -> Result<Arc<EigenState>> {
    if let Some(state) = memo().lock().unwrap().get(&(k, n)) {
        return Ok(Arc::clone(state));
    }
    let index = Arc::new(SimplexIndex::new(k, n)?);
    let op = KernelOperator::build(Arc::clone(&index));
    let pair = perron_frobenius(&op, &PowerSettings::default())?;
    let state = Arc::new(EigenState { index, op, pair });
    memo()
        .lock()
        .unwrap()
        .insert((k, n), Arc::clone(&state));
    Ok(state)
}

fn cfg(chips: &[u64]) -> ChipConfig {
    ChipConfig::new(chips.to_vec()).expect("static test configuration")
}

const SWEEP_K3: [u64; 10] = [12, 16, 20, 24, 28, 32, 36, 40, 44, 48];
const SWEEP_K4: [u64; 6] = [12, 16, 20, 24, 28, 32];
const SWEEP_EXPONENT: [u64; 7] = [8, 12, 16, 20, 24, 28, 32];
// The seed is fixed, so the simulation checks are deterministic: once
// green, always green. Under reseeding, a 4-sigma two-sided band would
// fail by chance ~6e-5 per comparison (~30 comparisons below).
const MC_SEED: u64 = 20260809;
const MC_RUNS: u64 = 1_000_000;

/// 1. Spectral-gap scaling: the fitted log-log slope of `1 - beta0`
///    against N lies in [-2.1, -1.9] for k=3, N=12..48, within two minutes.
pub fn criterion_argtral_gap() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let mut points = Vec::new();
    for &n in &SWEEP_K3 {
        let st = eigen_state(3, n)?;
        points.push((n as f64, 1.0 - st.pair.beta0));
    }
    let fit = fit_power_law(&points)?;
    let in_band = (-2.1..=-1.9).contains(&fit.slope);
    let in_time = t0.elapsed().as_secs_f64() <= 120.0;
    let details = format!(
        "k=3 N=12..48: slope {:.4} (band [-2.1,-1.9], r2 {:.6}), {:.1}s of 120s budget",
        fit.slope,
        fit.r_squared,
        t0.elapsed().as_secs_f64()
    );
    Ok(CriterionResult::finish(
        1,
        "spectral gap scaling",
        in_band && in_time,
        details,
        t0,
    ))
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// 2. Center-value scaling: `phi0(o_N) N^{(k-1)/2}` has max/min spread
///    at most 3 over the k=3 sweep and at most 5 for k=4, N=12..32.
pub fn criterion_center_value() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let mut k3 = Vec::new();
    for &n in &SWEEP_K3 {
        let st = eigen_state(3, n)?;
        k3.push(center_value(&st.pair, &st.index) * n as f64);
    }
    let mut k4 = Vec::new();
    for &n in &SWEEP_K4 {
        let st = eigen_state(4, n)?;
        k4.push(center_value(&st.pair, &st.index) * (n as f64).powf(1.5));
    }
    let (s3, s4) = (spread(&k3), spread(&k4));
    let passed = s3 <= 3.0 && s4 <= 5.0;
    let details = format!(
        "center scaling spread: k=3 {:.3} (limit 3), k=4 {:.3} (limit 5)",
        s3, s4
    );
    Ok(CriterionResult::finish(2, "center-value scaling", passed, details, t0))
}

fn k3_formula_spread(n: u64) -> Result<f64> {
    let st = eigen_state(3, n)?;
    let items = st.index.interior_states().iter().enumerate().map(|(i, s)| {
        (
            s.clone(),
            st.pair.phi0[i],
            phi0_formula_k3(s).expect("interior k=3 state"),
        )
    });
    Ok(ratio_report(&format!("k=3 N={n} interior"), items)?.spread)
}

/// 3. Three-player closed form: exact phi0 against
///    `N^{-7}(s1+s2)(s1+s3)(s2+s3)s1s2s3` has spread at most 10 over the
///    full interior at N=36, and the N=48 spread at most twice the N=24
///    spread.
pub fn criterion_k3_closed_form() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let s24 = k3_formula_spread(24)?;
    let s36 = k3_formula_spread(36)?;
    let s48 = k3_formula_spread(48)?;
    let passed = s36 <= 10.0 && s48 <= 2.0 * s24;
    let details = format!(
        "ratio spreads N=24/36/48: {:.3}/{:.3}/{:.3} (N=36 limit 10, N=48 limit 2x N=24)",
        s24, s36, s48
    );
    Ok(CriterionResult::finish(3, "k=3 closed-form comparator", passed, details, t0))
}

fn k4_tau_spread(n: u64, constants: &ProfileConstants) -> Result<f64> {
    let st = eigen_state(4, n)?;
    let items = st
        .index
        .interior_states()
        .iter()
        .enumerate()
        .filter(|(_, s)| 4 * s.chips()[3] >= n)
        .map(|(i, s)| {
            (
                s.clone(),
                st.pair.phi0[i],
                phi0_formula_tau(s, constants).expect("interior k=4 state"),
            )
        });
    Ok(ratio_report(&format!("k=4 N={n} corner x4>=N/4"), items)?.spread)
}

/// 4. Four-player comparator: exact phi0 against the tau display over
///    the corner region `x4 >= N/4` has spread at most 1000 at N=24 and
///    grows at most twofold from N=16 to N=24.
pub fn criterion_k4_tau_comparator() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let constants = ProfileConstants::default_for(4)?;
    let s16 = k4_tau_spread(16, &constants)?;
    let s20 = k4_tau_spread(20, &constants)?;
    let s24 = k4_tau_spread(24, &constants)?;
    let passed = s24 <= 1e3 && s24 <= 2.0 * s16;
    let details = format!(
        "corner ratio spreads N=16/20/24: {:.2}/{:.2}/{:.2} (N=24 limit 1e3 and 2x N=16)",
        s16, s20, s24
    );
    Ok(CriterionResult::finish(4, "k=4 tau comparator", passed, details, t0))
}

fn dominant_face_sweep(k: usize, face: usize) -> Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for &n in &SWEEP_EXPONENT {
        let index = Arc::new(SimplexIndex::new(k, n)?);
        let op = KernelOperator::build(index);
        let mut chips = vec![1u64; k];
        chips[k - 1] = n - (k as u64 - 1);
        let row = absorption_row(&op, &cfg(&chips), 1e-13)?;
        points.push((n as f64, row.face_hit_probability(face)?));
    }
    Ok(points)
}

/// 5. Dominant-player exponent: exact ruin probabilities of the very
///    dominant player have local log-slopes that increase monotonically
///    with final magnitude in [4.8, 6.2] for k=4 (asymptote near 5.7
///    approached from below) and in [2.7, 3.2] for k=3.
pub fn criterion_dominant_exponent() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let p4 = dominant_face_sweep(4, 3)?;
    let e4: Vec<f64> = successive_exponents(&p4)?
        .into_iter()
        .map(|(_, s)| -s)
        .collect();
    let monotone = e4.windows(2).all(|w| w[1] > w[0] - 1e-9);
    let final4 = *e4.last().expect("nonempty sweep");

    let p3 = dominant_face_sweep(3, 2)?;
    let e3: Vec<f64> = successive_exponents(&p3)?
        .into_iter()
        .map(|(_, s)| -s)
        .collect();
    let final3 = *e3.last().expect("nonempty sweep");

    let passed = monotone && (4.8..=6.2).contains(&final4) && (2.7..=3.2).contains(&final3);
    let details = format!(
        "k=4 local exponents {:?} (monotone {}, final {:.3} in [4.8,6.2]); k=3 final {:.3} in [2.7,3.2]",
        e4.iter().map(|e| (e * 1e3).round() / 1e3).collect::<Vec<_>>(),
        monotone,
        final4,
        final3
    );
    Ok(CriterionResult::finish(5, "dominant-player exponent", passed, details, t0))
}

/// Dense LU with partial pivoting; the oracle-side solver for criterion 6.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty column");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let d = a[col][col];
        for row in (col + 1)..n {
            let f = a[row][col] / d;
            if f == 0.0 {
                continue;
            }
            let (head, tail) = a.split_at_mut(row);
            let pivot_row = &head[col];
            for (x, &y) in tail[0][col..n].iter_mut().zip(&pivot_row[col..n]) {
                *x -= f * y;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Boundary law via a dense LU solve, sharing no code with the CG path.
fn dense_absorption_law(index: &SimplexIndex, start: &ChipConfig) -> Vec<f64> {
    let n = index.interior_count();
    let p = 1.0 / (index.k() * (index.k() - 1)) as f64;
    let mut a = vec![vec![0.0; n]; n];
    for (i, x) in index.interior_states().iter().enumerate() {
        a[i][i] = 1.0;
        for (_, t) in x.neighbors() {
            let t = t.expect("interior donor");
            if let Some(j) = index.interior_index(&t) {
                a[i][j] -= p;
            }
        }
    }
    let mut b = vec![0.0; n];
    b[index.interior_index(start).expect("interior start")] = 1.0;
    let g = dense_solve(a, b);
    index
        .boundary_states()
        .iter()
        .map(|z| {
            z.interior_neighbors_of_boundary()
                .expect("boundary state")
                .iter()
                .map(|y| g[index.interior_index(y).expect("interior neighbor")])
                .sum::<f64>()
                * p
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// 6. Absorption correctness: exact boundary laws sum to one, match a
///    dense LU oracle, and agree with seeded Monte Carlo within four
///    standard errors.
pub fn criterion_absorption_correctness() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let starts: Vec<(usize, u64, ChipConfig)> = vec![
        (3, 4, cfg(&[1, 1, 2])),
        (3, 9, cfg(&[2, 3, 4])),
        (3, 9, cfg(&[3, 3, 3])),
        (4, 8, cfg(&[2, 2, 2, 2])),
        (4, 12, cfg(&[1, 1, 1, 9])),
        (2, 10, cfg(&[3, 7])),
    ];

    let mut worst_sum = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut rows: HashMap<(usize, u64, Vec<u64>), AbsorptionRow> = HashMap::new();
    for (k, n, s) in &starts {
        let index = Arc::new(SimplexIndex::new(*k, *n)?);
        let op = KernelOperator::build(Arc::clone(&index));
        let row = absorption_row(&op, s, 1e-12)?;
        worst_sum = worst_sum.max((row.total() - 1.0).abs());
        let oracle = dense_absorption_law(&index, s);
        worst_oracle = worst_oracle.max(max_abs_diff(&row.probabilities, &oracle));
        rows.insert((*k, *n, s.chips().to_vec()), row);
    }
    let sums_ok = worst_sum <= 1e-10;
    let oracle_ok = worst_oracle <= 1e-9;

    // Monte Carlo, fixed seed: full boundary law for k=3, N=9.
    let exact = &rows[&(3usize, 9u64, vec![2, 3, 4])];
    let stats = simulate_with(&cfg(&[2, 3, 4]), MC_RUNS, MC_SEED, &SimOptions::default())?;
    let mut mc_ok = true;
    let mut worst_mc_sigma = 0.0f64;
    for (zi, z) in exact.index().boundary_states().iter().enumerate() {
        let p = exact.probabilities[zi];
        let count = stats.boundary_counts.get(z).copied().unwrap_or(0);
        let freq = count as f64 / MC_RUNS as f64;
        let sigma = (p * (1.0 - p) / MC_RUNS as f64).sqrt();
        let pull = (freq - p).abs() / sigma;
        worst_mc_sigma = worst_mc_sigma.max(pull);
        if pull > 4.0 {
            mc_ok = false;
        }
    }

    // ... and face probabilities for k=4, N=12.
    let exact4 = &rows[&(4usize, 12u64, vec![1, 1, 1, 9])];
    let stats4 = simulate_with(
        &cfg(&[1, 1, 1, 9]),
        MC_RUNS,
        MC_SEED,
        &SimOptions {
            histogram: false,
            ..SimOptions::default()
        },
    )?;
    for face in 0..4 {
        let p = exact4.face_hit_probability(face)?;
        let (est, _) = estimate_face_probability(&stats4, face)?;
        let sigma = (p * (1.0 - p) / MC_RUNS as f64).sqrt();
        let pull = (est - p).abs() / sigma;
        worst_mc_sigma = worst_mc_sigma.max(pull);
        if pull > 4.0 {
            mc_ok = false;
        }
    }

    let passed = sums_ok && oracle_ok && mc_ok;
    let details = format!(
        "law sums within {:.1e} (limit 1e-10); dense-oracle max diff {:.1e} (limit 1e-9); MC worst pull {:.2} sigma (limit 4)",
        worst_sum, worst_oracle, worst_mc_sigma
    );
    Ok(CriterionResult::finish(6, "absorption correctness", passed, details, t0))
}

/// 7. Spherical eigenvalue: the octant triangle extrapolates to 12
///    within 0.5%, the corner-cone triangle to [37.5, 39.5] with observed
///    order in [1.7, 2.3], and the derived exponent lies in [5.55, 5.85].
pub fn criterion_spherical_eigenvalue() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let levels = 6;
    let (oct, _) = dirichlet_lambda(&octant_triangle(), levels)?;
    let oct_err = (oct.extrapolated_lambda - 12.0).abs() / 12.0;

    // Observed convergence order from errors against the known eigenvalue.
    let errors: Vec<f64> = oct
        .level_lambdas
        .iter()
        .map(|(_, l)| (l - 12.0).abs())
        .collect();
    let orders: Vec<f64> = errors
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect();
    let final_order = *orders.last().expect("at least two levels");

    let (tet, _) = dirichlet_lambda(&tetrahedral_triangle(), levels)?;
    let lambda4 = tet.extrapolated_lambda;
    let alpha = crate::profile::alpha_from_lambda(4, lambda4)?;

    let in_time = t0.elapsed().as_secs_f64() <= 600.0;
    let passed = oct_err <= 5e-3
        && (1.7..=2.3).contains(&final_order)
        && (37.5..=39.5).contains(&lambda4)
        && (5.55..=5.85).contains(&alpha)
        && in_time;
    let details = format!(
        "octant lambda {:.4} (err {:.3}%, limit 0.5%), order {:.2} in [1.7,2.3]; corner lambda {:.3} in [37.5,39.5], alpha {:.4} in [5.55,5.85]; {:.0}s of 600s",
        oct.extrapolated_lambda,
        100.0 * oct_err,
        final_order,
        lambda4,
        alpha,
        t0.elapsed().as_secs_f64()
    );
    Ok(CriterionResult::finish(7, "spherical eigenvalue", passed, details, t0))
}

/// 8. Small-case oracles: beta0 = 1/3 at (k=3, N=4), the hand-solved
///    5/28 boundary probability, and the exactly uniform one-step law.
pub fn criterion_small_case_oracles() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let st = eigen_state(3, 4)?;
    let beta_err = (st.pair.beta0 - 1.0 / 3.0).abs();

    let row = absorption_row(&st.op, &cfg(&[1, 1, 2]), 1e-12)?;
    let zi = st.index.boundary_index(&cfg(&[0, 1, 3])).expect("boundary state");
    let p_err = (row.probabilities[zi] - 5.0 / 28.0).abs();

    let st3 = eigen_state(3, 3)?;
    let row3 = absorption_row(&st3.op, &cfg(&[1, 1, 1]), 1e-12)?;
    let uniform_exact = row3.probabilities.iter().all(|&p| p == 1.0 / 6.0);

    let passed = beta_err <= 1e-12 && p_err <= 1e-12 && uniform_exact;
    let details = format!(
        "beta0 err {:.1e} (limit 1e-12); P((0,1,3)|(1,1,2)) err {:.1e} (limit 1e-12); one-step law exactly uniform: {}",
        beta_err, p_err, uniform_exact
    );
    Ok(CriterionResult::finish(8, "small-case oracles", passed, details, t0))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

fn phi0_permutation_asymmetry(k: usize, n: u64) -> Result<f64> {
    let st = eigen_state(k, n)?;
    let mut worst = 0.0f64;
    for perm in permutations(k) {
        for (i, s) in st.index.interior_states().iter().enumerate() {
            let permuted: Vec<u64> = perm.iter().map(|&j| s.chips()[j]).collect();
            let pi = st
                .index
                .interior_index(&ChipConfig::new(permuted).expect("permuted state"))
                .expect("permutation preserves the simplex");
            worst = worst.max((st.pair.phi0[i] - st.pair.phi0[pi]).abs());
        }
    }
    Ok(worst)
}

/// 9. Symmetry suite: eigenvector permutation invariance within 1e-10,
///    byte-identical seeded simulation, and exact scale invariance of
///    ratio spreads.
pub fn criterion_symmetry_suite() -> Result<CriterionResult> {
    let t0 = Instant::now();
    let asym3 = phi0_permutation_asymmetry(3, 24)?;
    let asym4 = phi0_permutation_asymmetry(4, 16)?;
    let sym_ok = asym3 <= 1e-10 && asym4 <= 1e-10;

    // Monte Carlo determinism, byte for byte.
    let opts = SimOptions::default();
    let a = simulate_with(&cfg(&[2, 2, 2]), 50_000, 11, &opts)?;
    let b = simulate_with(&cfg(&[2, 2, 2]), 50_000, 11, &opts)?;
    let mut bytes_a = Vec::new();
    let mut bytes_b = Vec::new();
    a.write_csv(&mut bytes_a)?;
    b.write_csv(&mut bytes_b)?;
    let mc_ok = a == b && bytes_a == bytes_b;

    // Ratio-spread scale invariance: scaling the formula by a power of two
    // must reproduce the spread bit for bit.
    let st = eigen_state(3, 12)?;
    let items: Vec<(usize, f64, f64)> = st
        .index
        .interior_states()
        .iter()
        .enumerate()
        .map(|(i, s)| (i, st.pair.phi0[i], phi0_formula_k3(s).expect("interior")))
        .collect();
    let base = ratio_report("base", items.clone())?;
    let scaled = ratio_report(
        "scaled",
        items.into_iter().map(|(i, e, f)| (i, e, f * 8.0)),
    )?;
    let scale_ok = base.spread == scaled.spread
        && base.argmin == scaled.argmin
        && base.argmax == scaled.argmax;

    let passed = sym_ok && mc_ok && scale_ok;
    let details = format!(
        "phi0 asymmetry k=3/k=4: {:.1e}/{:.1e} (limit 1e-10); MC byte-identical: {}; spread scale-invariant: {}",
        asym3, asym4, mc_ok, scale_ok
    );
    Ok(CriterionResult::finish(9, "symmetry suite", passed, details, t0))
}

/// Run all criteria, or the quick subset (1, 3, 8, 9).
pub fn run_all(quick: bool) -> Result<Vec<CriterionResult>> {
    type Criterion = fn() -> Result<CriterionResult>;
    let all: Vec<(u32, Criterion)> = vec![
        (1, criterion_argtral_gap),
        (2, criterion_center_value),
        (3, criterion_k3_closed_form),
        (4, criterion_k4_tau_comparator),
        (5, criterion_dominant_exponent),
        (6, criterion_absorption_correctness),
        (7, criterion_spherical_eigenvalue),
        (8, criterion_small_case_oracles),
        (9, criterion_symmetry_suite),
    ];
    let quick_set = [1u32, 3, 8, 9];
    let mut out = Vec::new();
    for (id, f) in all {
        if quick && !quick_set.contains(&id) {
            continue;
        }
        out.push(f()?);
    }
    Ok(out)
}
