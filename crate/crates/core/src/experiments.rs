//! Reproducible studies built on the library: the two-state Grover chain
//! checked against its closed forms, hitting-time scaling sweeps, and
//! collision search on small Johnson chains.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::findmarked::{decision_procedure, CostLedger, DecisionConfig, DecisionOutcome, Prices, QuantumDetector};
use crate::linalg::{normal_eigen, phase, real_multiset_distance, symmetric_eigen, unit_multiset_distance, CVec};
use crate::markov::{
    binomial, eigenvalue_gap, grover_chain, half_discriminant, johnson_chain, johnson_states, lazy_cycle_chords,
    uniform_chain, unmarked_block, MarkedSet, StochasticMatrix,
};
use crate::spectral::{decompose, lift, tau, ReflectionPair};
use crate::walk::{walk_unitary, BipartiteWalk};

/// Tolerance for the closed-form Grover checks.
pub const GROVER_TOL: f64 = 1e-12;
/// `c1 sqrt(p) <= |theta| <= c2 sqrt(p)` is checked for `p <= THETA_P_MAX`.
pub const THETA_C1: f64 = 1.0;
pub const THETA_C2: f64 = 3.0;
pub const THETA_P_MAX: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub diff: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    fn close(name: &str, expected: f64, actual: f64, tol: f64) -> Self {
        let diff = (expected - actual).abs();
        Self { name: name.into(), expected, actual, diff, tol, passed: diff <= tol }
    }

    fn at_most(name: &str, value: f64, tol: f64) -> Self {
        Self { name: name.into(), expected: 0.0, actual: value, diff: value, tol, passed: value <= tol }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverCase {
    pub p: f64,
    /// Eigenphase of `v1`.
    pub theta: f64,
    pub checks: Vec<Check>,
}

impl GroverCase {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverReport {
    pub cases: Vec<GroverCase>,
    pub all_passed: bool,
}

impl GroverReport {
    /// One row per check: `p, check, expected, actual, diff, tol, passed`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["p", "check", "expected", "actual", "diff", "tol", "passed"])?;
        for case in &self.cases {
            for c in &case.checks {
                wtr.serialize((case.p, &c.name, c.expected, c.actual, c.diff, c.tol, c.passed))?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// The two-state chain `[[1-p, p], [0, 1]]` against its closed forms.
pub fn grover_case(p: f64) -> Result<GroverCase> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
    }
    let chain = grover_chain(p)?;
    let walk = BipartiteWalk::from_chain(&chain)?;
    let mut checks = Vec::new();

    let (d_eig, _) = symmetric_eigen(&half_discriminant(&chain)?)?;
    let d_dist = real_multiset_distance(&d_eig, &[1.0 - p, 1.0]).unwrap_or(f64::INFINITY);
    checks.push(Check::at_most("D eigenvalues {1-p, 1}", d_dist, GROVER_TOL));

    let s = (2.0 * p - p * p).sqrt();
    let re = 1.0 - 4.0 * p + 2.0 * p * p;
    let im = 2.0 * (1.0 - p) * s;
    let expected = [Complex64::new(re, im), Complex64::new(re, -im), Complex64::from(1.0)];
    let lifted = lift(&walk)?;
    let busy = lifted.busy_eigenvalues();
    let dist = unit_multiset_distance(&busy, &expected).unwrap_or(f64::INFINITY);
    checks.push(Check::at_most("nu busy eigenvalues", dist, GROVER_TOL));

    let op = walk_unitary(walk.clone(), 16)?;
    let mu = op.dense_mu().expect("two-state walk is materialized");
    let brute = normal_eigen(mu)?.values;
    let mut all_expected = expected.to_vec();
    all_expected.push(Complex64::from(1.0));
    let brute_dist = unit_multiset_distance(&brute, &all_expected).unwrap_or(f64::INFINITY);
    checks.push(Check::at_most("nu eigenvalues (brute force)", brute_dist, 1e-9));

    // v1, v2 lift (e0, e0), the eigenvector of D for 1 - p
    let lambda = 1.0 - p;
    let e0 = CVec::from_vec(vec![Complex64::from(1.0), Complex64::from(0.0)]);
    let zero = CVec::zeros(2);
    let a_t = walk.tilde(&e0, &zero)?;
    let b_t = walk.tilde(&zero, &e0)?;
    let v1 = tau(lambda, 1.0, &a_t, &b_t);
    let v2 = tau(lambda, -1.0, &a_t, &b_t);
    checks.push(Check::close("|v1|^2", 4.0 * p - 2.0 * p * p, v1.norm_squared(), GROVER_TOL));
    checks.push(Check::close("|v2|^2", 4.0 * p - 2.0 * p * p, v2.norm_squared(), GROVER_TOL));
    let z1 = Complex64::new(re, -im);
    let resid = (mu * &v1 - &v1 * z1).norm();
    checks.push(Check::at_most("v1 eigenvector residual", resid, 1e-12));

    // u = sqrt(pi) (x) sqrt(pi) for pi = (1-p, p); u' = b~ of e0
    let sq = [(1.0 - p).sqrt(), p.sqrt()];
    let u = CVec::from_fn(4, |k, _| Complex64::from(sq[k / 2] * sq[k % 2]));
    checks.push(Check::close("|u|", 1.0, u.norm(), GROVER_TOL));
    let u1 = b_t.clone();
    checks.push(Check::close("<u, u'>", (1.0 - p).sqrt(), u.dotc(&u1).re, GROVER_TOL));

    let theta = phase(z1);
    let scale1 = Complex64::new(0.0, -1.0) / (2f64.sqrt() * v1.norm());
    let scale2 = Complex64::new(0.0, 1.0) / (2f64.sqrt() * v2.norm());
    let mut y = u1.clone();
    let mut worst: f64 = 0.0;
    for k in 1..=20u32 {
        y = mu * y;
        let kf = k as f64;
        let formula = &v1 * (scale1 * Complex64::from_polar(1.0, theta * kf))
            + &v2 * (scale2 * Complex64::from_polar(1.0, -theta * kf));
        worst = worst.max((&y - formula).norm());
    }
    checks.push(Check::at_most("u' nu^K closed form, K <= 20", worst, 1e-11));

    if p <= THETA_P_MAX {
        let ratio = theta.abs() / p.sqrt();
        checks.push(Check {
            name: format!("{THETA_C1} <= |theta|/sqrt(p) <= {THETA_C2}"),
            expected: THETA_C1,
            actual: ratio,
            diff: 0.0,
            tol: 0.0,
            passed: (THETA_C1..=THETA_C2).contains(&ratio),
        });
    }
    Ok(GroverCase { p, theta, checks })
}

pub fn grover_regression(p_values: &[f64]) -> Result<GroverReport> {
    let cases = p_values.iter().map(|&p| grover_case(p)).collect::<Result<Vec<_>>>()?;
    let all_passed = cases.iter().all(GroverCase::passed);
    Ok(GroverReport { cases, all_passed })
}

/// `count` values of `p` evenly spread over `[lo, hi]`.
pub fn grover_grid(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Default quantum hitting threshold on `|(u + nu^K u) / 2|^2`.
pub const HITTING_THRESHOLD: f64 = 9.0 / 16.0;
/// Largest `K` tried before giving up.
pub const DEFAULT_K_CAP: u64 = 100_000;
/// State-vector cap for scaling sweeps; they never materialize `nu`.
pub const SCALING_STATE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ChainFamily {
    /// `J / n` with `epsilon n` marked states; `delta = 1`.
    Uniform { n: usize },
    /// Lazy cycles with chords of each size; `delta` shrinks with `n`.
    CycleChords { sizes: Vec<usize> },
}

impl ChainFamily {
    pub fn label(&self) -> String {
        match self {
            ChainFamily::Uniform { n } => format!("uniform-{n}"),
            ChainFamily::CycleChords { .. } => "cycle-chords".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub marked: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub k_hit_quantum: u64,
    /// Real `K` in `(k_hit_quantum - 1, k_hit_quantum]` where the spectral
    /// form of `|(u + nu^K u) / 2|^2` reaches the threshold.
    pub k_cross_quantum: f64,
    /// Smallest `K` whose classical failure probability is below threshold.
    pub k_hit_classical: u64,
    /// Marked-set tests that classical run performs, `K + 1`.
    pub classical_tests: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Fit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FittedExponents {
    pub quantum: f64,
    pub classical: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub chain_family: String,
    pub threshold: f64,
    pub points: Vec<ScalingPoint>,
    /// Slopes of `log cost` against `log 1/(delta epsilon)`: the quantum cost
    /// is the real crossing time, the classical cost the number of tests.
    pub fitted_exponents: FittedExponents,
    pub quantum_fit: Fit,
    /// Same fit on the integer quantum `K`.
    pub quantum_k_fit: Fit,
    pub classical_fit: Fit,
    /// Same fit on the raw classical `K`.
    pub classical_k_fit: Fit,
}

impl ScalingReport {
    /// Columns `n, marked, epsilon, delta, k_hit_quantum, k_cross_quantum,
    /// k_hit_classical, classical_tests`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for p in &self.points {
            wtr.serialize(p)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Least-squares line through `(x, y)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<Fit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter("a fit needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - exponent * a).powi(2)).sum();
    Ok(Fit { exponent, intercept, residual: (ss / n).sqrt() })
}

/// Smallest `K >= 1` with `|(u + nu^K u) / 2|^2 <= threshold`.
pub fn quantum_hitting_time(det: &QuantumDetector, threshold: f64, k_cap: u64) -> Result<u64> {
    let mut y = det.u().clone();
    for k in 1..=k_cap {
        det.nu().step(&mut y);
        if det.control_zero_probability(&y) <= threshold {
            return Ok(k);
        }
    }
    Err(Error::NoHitWithinCap(k_cap as usize))
}

/// `|(u + nu^K u) / 2|^2` for real `K`, from the eigen-expansion of `u`.
pub fn control_zero_curve(det: &QuantumDetector) -> Result<impl Fn(f64) -> f64> {
    let dec = decompose(det.nu(), det.u())?;
    let norm_sq = det.u().norm_squared();
    Ok(move |k: f64| {
        let overlap: f64 = dec.components.iter().map(|(z, c)| c.norm_sqr() * (z.arg() * k).cos()).sum::<f64>()
            + dec.idle_norm_sq;
        (norm_sq + overlap) / 2.0
    })
}

/// Bisects for the threshold crossing in `(k_hit - 1, k_hit]`.
pub fn quantum_crossing_time(det: &QuantumDetector, threshold: f64, k_hit: u64) -> Result<f64> {
    let f = control_zero_curve(det)?;
    let (mut lo, mut hi) = (k_hit as f64 - 1.0, k_hit as f64);
    if f(lo) <= threshold {
        return Ok(lo.max(0.0));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `K >= 1` whose classical failure probability is `<= threshold`.
pub fn classical_hitting_time(p: &StochasticMatrix, g: &MarkedSet, threshold: f64, k_cap: u64) -> Result<u64> {
    let n = p.rows() as f64;
    let p1 = unmarked_block(p, g)?;
    let mut x = nalgebra::DVector::from_element(p1.nrows(), 1.0);
    for k in 1..=k_cap {
        x = &p1 * x;
        if x.sum() / n <= threshold {
            return Ok(k);
        }
    }
    Err(Error::NoHitWithinCap(k_cap as usize))
}

fn scaling_point(p: &StochasticMatrix, marked: usize, threshold: f64, k_cap: u64) -> Result<ScalingPoint> {
    let n = p.rows();
    let g = MarkedSet::new(n, 0..marked)?;
    let delta = eigenvalue_gap(p)?.gap;
    let det = QuantumDetector::new(p, &g, SCALING_STATE_CAP)?;
    let k_hit_quantum = quantum_hitting_time(&det, threshold, k_cap)?;
    let k_cross_quantum = quantum_crossing_time(&det, threshold, k_hit_quantum)?;
    let k_hit_classical = classical_hitting_time(p, &g, threshold, k_cap)?;
    Ok(ScalingPoint {
        n,
        marked,
        epsilon: g.fraction(),
        delta,
        k_hit_quantum,
        k_cross_quantum,
        k_hit_classical,
        classical_tests: k_hit_classical + 1,
    })
}

fn marked_count(n: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    Ok(((epsilon * n as f64).round() as usize).clamp(1, n))
}

/// Hitting times over a grid, with power-law fits against `1/(delta epsilon)`.
pub fn hitting_scaling(family: &ChainFamily, epsilons: &[f64], threshold: f64, k_cap: u64) -> Result<ScalingReport> {
    let mut points = Vec::new();
    match family {
        ChainFamily::Uniform { n } => {
            let p = uniform_chain(*n)?;
            for &eps in epsilons {
                points.push(scaling_point(&p, marked_count(*n, eps)?, threshold, k_cap)?);
            }
        }
        ChainFamily::CycleChords { sizes } => {
            for &n in sizes {
                let p = lazy_cycle_chords(n)?;
                for &eps in epsilons {
                    points.push(scaling_point(&p, marked_count(n, eps)?, threshold, k_cap)?);
                }
            }
        }
    }
    let x: Vec<f64> = points.iter().map(|p| (1.0 / (p.delta * p.epsilon)).ln()).collect();
    let log = |v: &dyn Fn(&ScalingPoint) -> f64| points.iter().map(|p| v(p).ln()).collect::<Vec<_>>();
    let quantum_fit = fit_line(&x, &log(&|p| p.k_cross_quantum))?;
    let quantum_k_fit = fit_line(&x, &log(&|p| p.k_hit_quantum as f64))?;
    let classical_fit = fit_line(&x, &log(&|p| p.classical_tests as f64))?;
    let classical_k_fit = fit_line(&x, &log(&|p| p.k_hit_classical as f64))?;
    Ok(ScalingReport {
        chain_family: family.label(),
        threshold,
        fitted_exponents: FittedExponents { quantum: quantum_fit.exponent, classical: classical_fit.exponent },
        points,
        quantum_fit,
        quantum_k_fit,
        classical_fit,
        classical_k_fit,
    })
}

/// `2^-2, ..., 2^-7`.
pub fn default_epsilons() -> Vec<f64> {
    (2..=7).map(|e| 0.5f64.powi(e)).collect()
}

/// Largest Johnson chain the demo will build.
pub const JOHNSON_MAX_STATES: usize = 5000;

#[derive(Debug, Clone, Serialize)]
pub struct JohnsonReport {
    pub universe: usize,
    pub subset_size: usize,
    pub states: usize,
    pub collision: Option<(usize, usize)>,
    pub marked: usize,
    /// Exact marked fraction.
    pub epsilon: f64,
    /// Promised fraction handed to the decision procedure.
    pub epsilon_promise: f64,
    /// `1 - max |lambda|` over non-principal eigenvalues.
    pub delta: f64,
    /// `1 - lambda_2`.
    pub one_sided_gap: f64,
    /// `N / (k (N - k))`.
    pub gap_closed_form: f64,
    pub gap_error: f64,
    pub decision: DecisionOutcome,
    pub ledger: CostLedger,
}

/// Prices for the Johnson walk: setup queries every element of `H`, an
/// update swaps one element in and one out, tests read only stored values.
pub fn johnson_prices(subset_size: usize) -> Prices {
    Prices { p0: subset_size as f64, p1: 2.0, p2: 0.0 }
}

/// Collision search on `k`-subsets of `[0, N)` for the function that is the
/// identity except that the collision pair, if any, shares a value.
pub fn johnson_demo(
    universe: usize,
    subset_size: usize,
    collision: Option<(usize, usize)>,
    cfg: &DecisionConfig,
    cap: usize,
) -> Result<JohnsonReport> {
    let states = binomial(universe, subset_size);
    if states > JOHNSON_MAX_STATES {
        return Err(Error::TooLarge { size: states, cap: JOHNSON_MAX_STATES });
    }
    if subset_size < 2 || subset_size >= universe {
        return Err(Error::InvalidParameter(format!("need 2 <= k < N, got k={subset_size}, N={universe}")));
    }
    let mut f: Vec<usize> = (0..universe).collect();
    if let Some((a, b)) = collision {
        for x in [a, b] {
            if x >= universe {
                return Err(Error::IndexOutOfRange { index: x, size: universe });
            }
        }
        if a == b {
            return Err(Error::InvalidParameter("collision pair must be two distinct elements".into()));
        }
        f[b] = f[a];
    }
    let subsets = johnson_states(universe, subset_size);
    let has_collision = |h: &Vec<usize>| {
        h.iter().enumerate().any(|(x, &i)| h[x + 1..].iter().any(|&j| f[i] == f[j]))
    };
    let p = johnson_chain(universe, subset_size, JOHNSON_MAX_STATES)?;
    let analysis = eigenvalue_gap(&p)?;
    let gap_closed_form = universe as f64 / (subset_size * (universe - subset_size)) as f64;
    let g = MarkedSet::from_predicate(states, |s| has_collision(&subsets[s]));
    let epsilon_promise = binomial(universe - 2, subset_size - 2) as f64 / states as f64;
    let run_cfg = DecisionConfig { epsilon: epsilon_promise, prices: johnson_prices(subset_size), ..*cfg };
    let decision = decision_procedure(&p, |s| has_collision(&subsets[s]), &run_cfg, cap)?;
    Ok(JohnsonReport {
        universe,
        subset_size,
        states,
        collision,
        marked: g.len(),
        epsilon: g.fraction(),
        epsilon_promise,
        delta: analysis.gap,
        one_sided_gap: analysis.one_sided_gap,
        gap_closed_form,
        gap_error: (analysis.one_sided_gap - gap_closed_form).abs(),
        ledger: decision.ledger,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::findmarked::Decision;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grover_half() {
        let case = grover_case(0.5).unwrap();
        assert!(case.passed(), "{:?}", case.failures().collect::<Vec<_>>());
        let v1 = case.checks.iter().find(|c| c.name == "|v1|^2").unwrap();
        assert_abs_diff_eq!(v1.actual, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(case.theta.cos(), -0.5, epsilon = 1e-12);
    }

    #[test]
    fn grover_point_three_overlap() {
        let case = grover_case(0.3).unwrap();
        assert!(case.passed());
        let ov = case.checks.iter().find(|c| c.name == "<u, u'>").unwrap();
        assert_abs_diff_eq!(ov.actual, 0.7f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn grover_small_p_eigenvalues_near_one() {
        let case = grover_case(1e-6).unwrap();
        assert!(case.passed());
        assert!(case.theta.abs() < 1e-2);
        assert!(grover_case(0.0).is_err());
    }

    #[test]
    fn fit_recovers_slope() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + 2.0).collect();
        let f = fit_line(&x, &y).unwrap();
        assert_abs_diff_eq!(f.exponent, 0.5, epsilon = 1e-14);
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn classical_hitting_matches_closed_form() {
        let p = uniform_chain(64).unwrap();
        for marked in [1, 4, 16] {
            let g = MarkedSet::new(64, 0..marked).unwrap();
            let eps = marked as f64 / 64.0;
            let k = classical_hitting_time(&p, &g, HITTING_THRESHOLD, 10_000).unwrap();
            let oracle = (1..).find(|&k| (1.0 - eps).powi(k + 1) <= HITTING_THRESHOLD + 1e-15).unwrap();
            assert_eq!(k, oracle as u64);
        }
    }

    #[test]
    fn everything_marked() {
        // nu = I fixes u, so the control never fires; detection comes from
        // the marked-register rule alone
        let p = uniform_chain(8).unwrap();
        let g = MarkedSet::full(8);
        assert_eq!(classical_hitting_time(&p, &g, HITTING_THRESHOLD, 100).unwrap(), 1);
        let det = QuantumDetector::new(&p, &g, 4096).unwrap();
        assert!(matches!(quantum_hitting_time(&det, HITTING_THRESHOLD, 100), Err(Error::NoHitWithinCap(100))));
        assert_abs_diff_eq!(det.run(1).unwrap().p_output1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn crossing_lies_in_bracket() {
        let p = uniform_chain(32).unwrap();
        let g = MarkedSet::new(32, 0..2).unwrap();
        let det = QuantumDetector::new(&p, &g, 4096).unwrap();
        let k = quantum_hitting_time(&det, HITTING_THRESHOLD, 1000).unwrap();
        let t = quantum_crossing_time(&det, HITTING_THRESHOLD, k).unwrap();
        assert!(t > (k - 1) as f64 && t <= k as f64);
        let f = control_zero_curve(&det).unwrap();
        assert_abs_diff_eq!(f(k as f64), det.control_zero_probability(&det.evolve(k)), epsilon = 1e-12);
        assert_abs_diff_eq!(f(t), HITTING_THRESHOLD, epsilon = 1e-9);
    }

    #[test]
    fn johnson_injective_is_empty() {
        let cfg = DecisionConfig { rounds: 50, rule_constant: 10.0, ..Default::default() };
        let r = johnson_demo(5, 2, None, &cfg, 4096).unwrap();
        assert_eq!(r.marked, 0);
        assert_eq!(r.decision.decision, Decision::Empty);
        assert_abs_diff_eq!(r.one_sided_gap, 5.0 / 6.0, epsilon = 1e-9);
        assert!(r.gap_error < 1e-9);
    }

    #[test]
    fn johnson_one_collision() {
        let cfg = DecisionConfig { seed: 3, ..Default::default() };
        let r = johnson_demo(6, 2, Some((1, 4)), &cfg, 4096).unwrap();
        assert_eq!(r.marked, 1);
        assert_abs_diff_eq!(r.epsilon, 1.0 / 15.0, epsilon = 1e-15);
        assert_eq!(r.decision.decision, Decision::Large);
        assert_eq!(r.ledger.p2_price, 0.0);
        assert!(matches!(johnson_demo(30, 15, None, &cfg, 4096), Err(Error::TooLarge { .. })));
    }
}
