//! Classical and quantum FindMarked.
//!
//! The quantum detector starts from the stationary state `u` of a symmetric
//! chain `P`, walks with `nu`, the quantization of the chain `P'` in which
//! every marked state is absorbing, and interferes `u` with `nu^K u` through a
//! control qubit. If nothing is marked `nu = mu` fixes `u` and the detector
//! never fires.
//!
//! Register layout for the full simulation is `[control, left, right]`, with
//! the control bit most significant.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_cap, phase, CMat, CVec, ZERO};
use crate::markov::{
    eigenvalue_gap, perturb_absorbing, unmarked_block, MarkedSet, StochasticMatrix, SYMMETRY_TOL,
};
use crate::spectral::{decompose, for_each_lifted, LiftKind, ReflectionPair};
use crate::walk::{stationary_state, walk_unitary, BipartiteWalk, QuantumState, WalkOperator, WalkSpectrum};

/// Prices of the three priced routines: setup, one diffusion, one marked test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prices {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Default for Prices {
    fn default() -> Self {
        Self { p0: 1.0, p1: 1.0, p2: 1.0 }
    }
}

/// Counts of priced operations performed by a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    pub p0_count: u64,
    pub p1_count: u64,
    pub p2_count: u64,
    pub p0_price: f64,
    pub p1_price: f64,
    pub p2_price: f64,
}

impl CostLedger {
    pub fn new(prices: Prices) -> Self {
        Self { p0_count: 0, p1_count: 0, p2_count: 0, p0_price: prices.p0, p1_price: prices.p1, p2_price: prices.p2 }
    }

    pub fn prices(&self) -> Prices {
        Prices { p0: self.p0_price, p1: self.p1_price, p2: self.p2_price }
    }

    pub fn setup(&mut self, count: u64) {
        self.p0_count += count;
    }

    pub fn step(&mut self, count: u64) {
        self.p1_count += count;
    }

    pub fn test(&mut self, count: u64) {
        self.p2_count += count;
    }

    /// Adds another ledger's counts; prices are kept from `self`.
    pub fn absorb(&mut self, other: &CostLedger) {
        self.p0_count += other.p0_count;
        self.p1_count += other.p1_count;
        self.p2_count += other.p2_count;
    }

    pub fn total(&self) -> f64 {
        self.p0_count as f64 * self.p0_price + self.p1_count as f64 * self.p1_price + self.p2_count as f64 * self.p2_price
    }
}

/// A measured basis label `|b>|i>|j>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub control: u8,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FindMarkedOutcome {
    pub output_bit: u8,
    /// For the classical walker `control` is 0 and `right == left`.
    pub final_sample: Sample,
    pub k_used: u64,
    pub ledger: CostLedger,
}

/// Classical walker with per-row samplers built once.
#[derive(Debug, Clone)]
pub struct ClassicalWalker {
    rows: Vec<WeightedIndex<f64>>,
    mask: Vec<bool>,
}

impl ClassicalWalker {
    pub fn new(p: &StochasticMatrix, g: &MarkedSet) -> Result<Self> {
        let n = p.require_symmetric(SYMMETRY_TOL)?;
        if g.universe_size() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.universe_size() });
        }
        let rows = (0..n)
            .map(|i| {
                WeightedIndex::new(p.matrix().row(i).iter().copied())
                    .map_err(|e| Error::InvalidParameter(format!("row {i}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { rows, mask: g.mask() })
    }

    /// Uniform start, then `k` rounds of test-then-step, then a final test.
    pub fn run<R: Rng>(&self, k: u64, prices: Prices, rng: &mut R) -> FindMarkedOutcome {
        let mut ledger = CostLedger::new(prices);
        ledger.setup(1);
        let mut i = rng.gen_range(0..self.mask.len());
        for _ in 0..k {
            ledger.test(1);
            if self.mask[i] {
                continue;
            }
            ledger.step(1);
            i = self.rows[i].sample(rng);
        }
        ledger.test(1);
        FindMarkedOutcome {
            output_bit: self.mask[i] as u8,
            final_sample: Sample { control: 0, left: i, right: i },
            k_used: k,
            ledger,
        }
    }
}

pub fn classical_find_marked(p: &StochasticMatrix, g: &MarkedSet, k: u64, seed: u64) -> Result<FindMarkedOutcome> {
    let walker = ClassicalWalker::new(p, g)?;
    Ok(walker.run(k, Prices::default(), &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Exact probability that the classical walker outputs 0: all `k + 1` tests
/// see an unmarked state, i.e. `(1/n) 1^T P1^k 1` over the unmarked block.
pub fn classical_failure_probability(p: &StochasticMatrix, g: &MarkedSet, k: u64) -> Result<f64> {
    let n = p.require_square()?;
    let p1 = unmarked_block(p, g)?;
    let mut x = nalgebra::DVector::from_element(p1.nrows(), 1.0);
    for _ in 0..k {
        x = &p1 * x;
    }
    Ok(x.sum() / n as f64)
}

/// `nu`: the walk of `(P', P')` with `P'` absorbing on `g`.
pub fn perturbed_walk(p: &StochasticMatrix, g: &MarkedSet) -> Result<BipartiteWalk> {
    p.require_symmetric(SYMMETRY_TOL)?;
    BipartiteWalk::from_chain(&perturb_absorbing(p, g)?)
}

pub fn perturbed_walk_unitary(p: &StochasticMatrix, g: &MarkedSet, cap: usize) -> Result<WalkOperator> {
    walk_unitary(perturbed_walk(p, g)?, cap)
}

/// `nu` built from the unperturbed amplitudes `sqrt(P[i, .])` and a one-bit
/// ancilla, on registers `[left, right, ancilla]`.
///
/// Each diffusion computes `g(i)` into the ancilla, reflects about
/// `sqrt(p_i)` when it is 0 and about `|i>` (the row of an absorbing state)
/// when it is 1, then uncomputes `g(i)`.
#[derive(Debug, Clone)]
pub struct AncillaWalk {
    sqrt_p: DMatrix<f64>,
    mask: Vec<bool>,
}

impl AncillaWalk {
    pub fn new(p: &StochasticMatrix, g: &MarkedSet) -> Result<Self> {
        let n = p.require_symmetric(SYMMETRY_TOL)?;
        if g.universe_size() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.universe_size() });
        }
        Ok(Self { sqrt_p: p.matrix().map(f64::sqrt), mask: g.mask() })
    }

    pub fn n(&self) -> usize {
        self.mask.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.n() * self.n()
    }

    fn at(&self, i: usize, j: usize, a: usize) -> usize {
        (i * self.n() + j) * 2 + a
    }

    fn toggle(&self, x: &mut CVec, marked: impl Fn(usize, usize) -> bool) {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if marked(i, j) {
                    x.swap_rows(self.at(i, j, 0), self.at(i, j, 1));
                }
            }
        }
    }

    /// One diffusion on the right register, conditioned on the left label.
    pub fn diffuse_left(&self, x: &mut CVec) {
        let n = self.n();
        self.toggle(x, |i, _| self.mask[i]);
        for i in 0..n {
            for a in 0..2 {
                if a == 0 {
                    let mut s = ZERO;
                    for j in 0..n {
                        s += x[self.at(i, j, a)] * self.sqrt_p[(i, j)];
                    }
                    for j in 0..n {
                        let k = self.at(i, j, a);
                        x[k] = s * (2.0 * self.sqrt_p[(i, j)]) - x[k];
                    }
                } else {
                    for j in 0..n {
                        if j != i {
                            let k = self.at(i, j, a);
                            x[k] = -x[k];
                        }
                    }
                }
            }
        }
        self.toggle(x, |i, _| self.mask[i]);
    }

    /// One diffusion on the left register, conditioned on the right label.
    pub fn diffuse_right(&self, x: &mut CVec) {
        let n = self.n();
        self.toggle(x, |_, j| self.mask[j]);
        for j in 0..n {
            let mut s = ZERO;
            for i in 0..n {
                s += x[self.at(i, j, 0)] * self.sqrt_p[(j, i)];
            }
            for i in 0..n {
                let k = self.at(i, j, 0);
                x[k] = s * (2.0 * self.sqrt_p[(j, i)]) - x[k];
                if i != j {
                    let k1 = self.at(i, j, 1);
                    x[k1] = -x[k1];
                }
            }
        }
        self.toggle(x, |_, j| self.mask[j]);
    }

    pub fn step(&self, x: &mut CVec) {
        self.diffuse_left(x);
        self.diffuse_right(x);
    }

    /// Dense matrix of one step.
    pub fn unitary(&self, cap: usize) -> Result<CMat> {
        let dim = self.dim();
        check_cap(dim, cap)?;
        let mut out = CMat::zeros(dim, dim);
        for k in 0..dim {
            let mut e = CVec::zeros(dim);
            e[k] = Complex64::from(1.0);
            self.step(&mut e);
            out.set_column(k, &e);
        }
        Ok(out)
    }

    /// Embeds a walk vector as the ancilla-0 component.
    pub fn embed(&self, x: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim());
        for (k, z) in x.iter().enumerate() {
            out[2 * k] = *z;
        }
        out
    }

    /// `(ancilla-0 part, norm of the ancilla-1 part)`.
    pub fn project(&self, x: &CVec) -> (CVec, f64) {
        let half = self.dim() / 2;
        let zero = CVec::from_fn(half, |k, _| x[2 * k]);
        let one: f64 = (0..half).map(|k| x[2 * k + 1].norm_sqr()).sum();
        (zero, one.sqrt())
    }
}

/// Exact simulation of the quantum detector for one instance.
#[derive(Debug, Clone)]
pub struct QuantumDetector {
    n: usize,
    nu: BipartiteWalk,
    u: CVec,
    mask: Vec<bool>,
}

/// Final state and output probability of one quantum run.
#[derive(Debug, Clone)]
pub struct ExactRun {
    pub k: u64,
    pub p_output1: f64,
    pub p_control1: f64,
    pub final_state: QuantumState,
}

impl QuantumDetector {
    /// Refuses instances with `n^2 > cap`.
    pub fn new(p: &StochasticMatrix, g: &MarkedSet, cap: usize) -> Result<Self> {
        let n = p.require_symmetric(SYMMETRY_TOL)?;
        check_cap(n * n, cap)?;
        let nu = perturbed_walk(p, g)?;
        let u = stationary_state(p)?.into_amplitudes();
        Ok(Self { n, nu, u, mask: g.mask() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> &BipartiteWalk {
        &self.nu
    }

    pub fn u(&self) -> &CVec {
        &self.u
    }

    /// `nu^k u` by repeated structured steps.
    pub fn evolve(&self, k: u64) -> CVec {
        let mut y = self.u.clone();
        for _ in 0..k {
            self.nu.step(&mut y);
        }
        y
    }

    /// `Pr[b = 1] + Pr[b = 0, i in G]` given `y = nu^K u`.
    pub fn output_probability(&self, y: &CVec) -> f64 {
        let n = self.n;
        let mut p = 0.0;
        for k in 0..n * n {
            let plus = (self.u[k] + y[k]) * 0.5;
            let minus = (self.u[k] - y[k]) * 0.5;
            p += minus.norm_sqr();
            if self.mask[k / n] {
                p += plus.norm_sqr();
            }
        }
        p
    }

    /// `|(u + nu^K u) / 2|^2 = Pr[b = 0]`.
    pub fn control_zero_probability(&self, y: &CVec) -> f64 {
        ((&self.u + y) * Complex64::from(0.5)).norm_squared()
    }

    /// Output probabilities for `K = 0..=k_max`.
    pub fn curve(&self, k_max: u64) -> Vec<f64> {
        let mut out = Vec::with_capacity(k_max as usize + 1);
        let mut y = self.u.clone();
        out.push(self.output_probability(&y));
        for _ in 0..k_max {
            self.nu.step(&mut y);
            out.push(self.output_probability(&y));
        }
        out
    }

    /// Eigenbasis of `nu` for large single `K`.
    pub fn spectrum(&self) -> Result<WalkSpectrum> {
        WalkOperator::structured(self.nu.clone()).spectrum()
    }

    /// Gate-by-gate run: `H` on control, controlled `nu^K`, `H` again.
    pub fn run(&self, k: u64) -> Result<ExactRun> {
        let d = self.n * self.n;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut state = CVec::zeros(2 * d);
        state.rows_mut(0, d).copy_from(&self.u);
        hadamard_control(&mut state, d, h);
        let mut upper = state.rows(d, d).into_owned();
        for _ in 0..k {
            self.nu.step(&mut upper);
        }
        state.rows_mut(d, d).copy_from(&upper);
        hadamard_control(&mut state, d, h);

        let p_control1: f64 = state.rows(d, d).norm_squared();
        let marked: f64 = (0..d).filter(|&x| self.mask[x / self.n]).map(|x| state[x].norm_sqr()).sum();
        Ok(ExactRun {
            k,
            p_output1: p_control1 + marked,
            p_control1,
            final_state: QuantumState::new(vec![2, self.n, self.n], state)?,
        })
    }

    /// Measures a run and applies the output rule.
    pub fn sample<R: Rng>(&self, run: &ExactRun, prices: Prices, rng: &mut R) -> Result<FindMarkedOutcome> {
        let amps = run.final_state.amplitudes();
        let weights: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::EigensolverFailure(e.to_string()))?;
        let labels = run.final_state.labels(dist.sample(rng));
        let s = Sample { control: labels[0] as u8, left: labels[1], right: labels[2] };
        let output_bit = (s.control == 1 || self.mask[s.left]) as u8;
        Ok(FindMarkedOutcome { output_bit, final_sample: s, k_used: run.k, ledger: quantum_round_cost(run.k, prices) })
    }
}

fn hadamard_control(state: &mut CVec, d: usize, h: f64) {
    for x in 0..d {
        let (a, b) = (state[x], state[x + d]);
        state[x] = (a + b) * h;
        state[x + d] = (a - b) * h;
    }
}

/// Cost of one quantum round with `K` walk steps: setup once, two
/// diffusions per step each computing and uncomputing `g`, one final test.
pub fn quantum_round_cost(k: u64, prices: Prices) -> CostLedger {
    let mut ledger = CostLedger::new(prices);
    ledger.setup(1);
    ledger.step(2 * k);
    ledger.test(4 * k + 1);
    ledger
}

/// Exact final state and output-1 probability after `K` steps.
pub fn quantum_find_marked_exact(p: &StochasticMatrix, g: &MarkedSet, k: u64, cap: usize) -> Result<ExactRun> {
    QuantumDetector::new(p, g, cap)?.run(k)
}

/// One sampled quantum run.
pub fn quantum_find_marked(
    p: &StochasticMatrix,
    g: &MarkedSet,
    k: u64,
    seed: u64,
    cap: usize,
) -> Result<FindMarkedOutcome> {
    let det = QuantumDetector::new(p, g, cap)?;
    let run = det.run(k)?;
    det.sample(&run, Prices::default(), &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `u' = sum_{i not in G, j} sqrt(P[i,j] / n) |i>|j>`.
pub fn unmarked_state(p: &StochasticMatrix, g: &MarkedSet) -> Result<CVec> {
    let n = p.require_symmetric(SYMMETRY_TOL)?;
    let u = stationary_state(p)?.into_amplitudes();
    let mask = g.mask();
    Ok(CVec::from_fn(n * n, |k, _| if mask[k / n] { ZERO } else { u[k] }))
}

#[derive(Debug, Clone, Serialize)]
pub struct AmpCurve {
    pub k_values: Vec<u64>,
    /// `sum_k |gamma_k|^2 |1 + e^{i theta_k K}|^2`.
    pub amp: Vec<f64>,
    /// `|u' + nu^K u'|^2` by direct evolution.
    pub amp_direct: Vec<f64>,
    pub gamma_sq: Vec<f64>,
    pub thetas: Vec<f64>,
    /// Weight of `u'` outside the busy subspace.
    pub idle_weight: f64,
    /// `<u, u'>`.
    pub overlap: f64,
}

impl AmpCurve {
    pub fn max_discrepancy(&self) -> f64 {
        self.amp.iter().zip(&self.amp_direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Spectral and direct `amp_K` for `K = 1..=k_max`.
pub fn amp_curve(p: &StochasticMatrix, g: &MarkedSet, k_max: u64) -> Result<AmpCurve> {
    if g.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let nu = perturbed_walk(p, g)?;
    let u = stationary_state(p)?.into_amplitudes();
    let u1 = unmarked_state(p, g)?;
    let dec = decompose(&nu, &u1)?;
    let mut y = u1.clone();
    let mut k_values = Vec::new();
    let mut amp = Vec::new();
    let mut amp_direct = Vec::new();
    for k in 1..=k_max {
        nu.step(&mut y);
        k_values.push(k);
        amp.push(dec.interference(k));
        amp_direct.push((&u1 + &y).norm_squared());
    }
    Ok(AmpCurve {
        k_values,
        amp,
        amp_direct,
        gamma_sq: dec.components.iter().map(|(_, c)| c.norm_sqr()).collect(),
        thetas: dec.components.iter().map(|(z, _)| phase(*z)).collect(),
        idle_weight: dec.idle_norm_sq,
        overlap: u.dotc(&u1).re,
    })
}

/// Fraction of `K in 1..=k_max` with `amp_K <= 3`, from the spectral formula.
pub fn low_amp_fraction(p: &StochasticMatrix, g: &MarkedSet, k_max: u64) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let dec = decompose(&perturbed_walk(p, g)?, &unmarked_state(p, g)?)?;
    let low = (1..=k_max).filter(|&k| dec.interference(k) <= 3.0).count();
    Ok(low as f64 / k_max as f64)
}

/// One lifted eigenphase of `nu`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseEntry {
    pub lambda: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseSeparation {
    pub delta: f64,
    pub epsilon: f64,
    /// `sqrt(delta * epsilon)`.
    pub bound: f64,
    /// Busy eigenphases lifted from `lambda <= 1 - delta * epsilon / 2`.
    pub checked: Vec<PhaseEntry>,
    pub min_abs_theta: f64,
}

impl PhaseSeparation {
    pub fn holds(&self, tol: f64) -> bool {
        self.checked.iter().all(|e| e.theta.abs() >= self.bound - tol)
    }
}

/// Eigenphases of `nu` that the spectral-radius bound constrains.
pub fn phase_separation(p: &StochasticMatrix, g: &MarkedSet) -> Result<PhaseSeparation> {
    let delta = eigenvalue_gap(p)?.gap;
    let epsilon = g.fraction();
    let nu = perturbed_walk(p, g)?;
    let cutoff = 1.0 - delta * epsilon / 2.0 + 1e-12;
    let mut checked = Vec::new();
    for_each_lifted(&nu.discriminant(), &nu, |e| {
        if e.kind != LiftKind::Intersection && e.lambda <= cutoff {
            checked.extend(e.mu_eigenvalues.iter().map(|z| PhaseEntry { lambda: e.lambda, theta: phase(*z) }));
        }
        Ok(())
    })?;
    let min_abs_theta = checked.iter().map(|e| e.theta.abs()).fold(f64::INFINITY, f64::min);
    Ok(PhaseSeparation { delta, epsilon, bound: (delta * epsilon).sqrt(), checked, min_abs_theta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Empty,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionConfig {
    /// Promised lower bound on the marked fraction when it is nonzero.
    pub epsilon: f64,
    pub rule_constant: f64,
    pub rounds: usize,
    pub seed: u64,
    pub prices: Prices,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        Self { epsilon: 0.25, rule_constant: 1000.0, rounds: 3000, seed: 0, prices: Prices::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecisionOutcome {
    pub decision: Decision,
    pub delta: f64,
    /// `K` is drawn from `1..=k_range`.
    pub k_range: u64,
    pub rounds_run: usize,
    pub first_hit: Option<(usize, u64)>,
    /// Output-1 probability of a single round, averaged exactly over `K`.
    pub round_probability: f64,
    pub ledger: CostLedger,
}

/// `ceil(rule_constant / sqrt(delta * epsilon))`.
pub fn k_range(delta: f64, epsilon: f64, rule_constant: f64) -> Result<u64> {
    if delta <= 0.0 {
        return Err(Error::DegenerateGap);
    }
    // negated so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(epsilon > 0.0 && epsilon <= 1.0) || !(rule_constant > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon}, rule constant {rule_constant}")));
    }
    let k = (rule_constant / (delta * epsilon).sqrt()).ceil();
    if k > 1e8 {
        return Err(Error::InvalidParameter(format!("K range {k} too large")));
    }
    Ok((k as u64).max(1))
}

/// Decides whether the marked set is empty or at least `epsilon n`.
///
/// The exact output-1 probability of every `K` in range is computed once;
/// each round then draws `K` and the output bit from it, which has the same
/// distribution as measuring the simulated final state. Every round is
/// charged its full cost.
pub fn decision_procedure(
    p: &StochasticMatrix,
    oracle: impl Fn(usize) -> bool,
    cfg: &DecisionConfig,
    cap: usize,
) -> Result<DecisionOutcome> {
    let n = p.require_symmetric(SYMMETRY_TOL)?;
    let g = MarkedSet::from_predicate(n, oracle);
    let delta = eigenvalue_gap(p)?.gap;
    let k_max = k_range(delta, cfg.epsilon, cfg.rule_constant)?;
    let det = QuantumDetector::new(p, &g, cap)?;
    let curve = det.curve(k_max);
    let round_probability = curve[1..].iter().sum::<f64>() / k_max as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ledger = CostLedger::new(cfg.prices);
    let mut first_hit = None;
    let mut rounds_run = 0;
    for round in 0..cfg.rounds {
        let k = rng.gen_range(1..=k_max);
        let hit = rng.gen::<f64>() < curve[k as usize];
        ledger.absorb(&quantum_round_cost(k, cfg.prices));
        rounds_run = round + 1;
        if hit {
            first_hit = Some((round, k));
            break;
        }
    }
    Ok(DecisionOutcome {
        decision: if first_hit.is_some() { Decision::Large } else { Decision::Empty },
        delta,
        k_range: k_max,
        rounds_run,
        first_hit,
        round_probability,
        ledger,
    })
}

/// One line of a findmarked JSONL export.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunRecord {
    pub chain_id: String,
    pub n: usize,
    pub marked: Vec<usize>,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: u64,
    pub p_output1: f64,
    pub amp: Vec<f64>,
    pub cost_total: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, normal_eigen, unit_multiset_distance};
    use crate::markov::{johnson_chain, lazy_cycle_chords, uniform_chain};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ledger_totals() {
        let mut l = CostLedger::new(Prices { p0: 3.0, p1: 2.0, p2: 0.5 });
        l.setup(1);
        l.step(4);
        l.test(6);
        assert_eq!(l.total(), 3.0 + 8.0 + 3.0);
        let q = quantum_round_cost(5, Prices::default());
        assert_eq!((q.p0_count, q.p1_count, q.p2_count), (1, 10, 21));
    }

    #[test]
    fn classical_empty_and_full() {
        let p = uniform_chain(6).unwrap();
        for seed in 0..50 {
            let out = classical_find_marked(&p, &MarkedSet::empty(6), 10, seed).unwrap();
            assert_eq!(out.output_bit, 0);
            assert_eq!((out.ledger.p0_count, out.ledger.p1_count, out.ledger.p2_count), (1, 10, 11));
            let full = classical_find_marked(&p, &MarkedSet::full(6), 10, seed).unwrap();
            assert_eq!(full.output_bit, 1);
            assert_eq!(full.ledger.p1_count, 0);
        }
    }

    #[test]
    fn classical_failure_closed_form_on_uniform() {
        let p = uniform_chain(8).unwrap();
        let g = MarkedSet::new(8, [2, 5]).unwrap();
        for k in [0, 1, 7, 30] {
            let exact = classical_failure_probability(&p, &g, k).unwrap();
            assert_abs_diff_eq!(exact, 0.75f64.powi(k as i32 + 1), epsilon = 1e-14);
        }
    }

    #[test]
    fn empty_marked_set_nu_is_mu() {
        let p = lazy_cycle_chords(5).unwrap();
        let nu = perturbed_walk_unitary(&p, &MarkedSet::empty(5), 4096).unwrap();
        let mu = walk_unitary(BipartiteWalk::from_chain(&p).unwrap(), 4096).unwrap();
        assert!(max_abs(&(nu.dense_mu().unwrap() - mu.dense_mu().unwrap())) < 1e-15);
    }

    #[test]
    fn full_marked_set_fixes_diagonal() {
        let p = uniform_chain(4).unwrap();
        let nu = perturbed_walk_unitary(&p, &MarkedSet::full(4), 4096).unwrap();
        let mu = nu.dense_mu().unwrap();
        for i in 0..4 {
            let e = i * 4 + i;
            let mut x = CVec::zeros(16);
            x[e] = Complex64::from(1.0);
            assert!(((mu * &x) - &x).norm() < 1e-14);
        }
    }

    #[test]
    fn ancilla_walk_matches_nu() {
        let p = lazy_cycle_chords(5).unwrap();
        let g = MarkedSet::new(5, [1, 3]).unwrap();
        let nu = perturbed_walk_unitary(&p, &g, 4096).unwrap();
        let anc = AncillaWalk::new(&p, &g).unwrap();
        let big = anc.unitary(4096).unwrap();
        let nu_mat = nu.dense_mu().unwrap();
        for k in 0..25 {
            let mut e = CVec::zeros(25);
            e[k] = Complex64::from(1.0);
            let (zero, leak) = anc.project(&(&big * anc.embed(&e)));
            assert!(leak < 1e-14);
            assert!((zero - nu_mat.column(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_marked_phases_are_separated() {
        let p = uniform_chain(4).unwrap();
        let g = MarkedSet::new(4, [3]).unwrap();
        let sep = phase_separation(&p, &g).unwrap();
        assert!(!sep.checked.is_empty());
        assert!(sep.holds(1e-9), "{sep:?}");
        let nu = perturbed_walk_unitary(&p, &g, 4096).unwrap();
        let eig = normal_eigen(nu.dense_mu().unwrap()).unwrap();
        for z in eig.values {
            let t = phase(z).abs();
            assert!(t < 1e-9 || t >= sep.bound - 1e-9);
        }
    }

    #[test]
    fn exact_run_matches_control_algebra() {
        let p = lazy_cycle_chords(6).unwrap();
        let g = MarkedSet::new(6, [0]).unwrap();
        let det = QuantumDetector::new(&p, &g, 4096).unwrap();
        for k in [0, 1, 5, 17] {
            let run = det.run(k).unwrap();
            let y = det.evolve(k);
            let d = 36;
            let amps = run.final_state.amplitudes();
            let plus = (det.u() + &y) * Complex64::from(0.5);
            let minus = (det.u() - &y) * Complex64::from(0.5);
            assert!((amps.rows(0, d) - plus).norm() < 1e-12);
            assert!((amps.rows(d, d) - minus).norm() < 1e-12);
            assert_abs_diff_eq!(run.p_output1, det.output_probability(&y), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(det.run(0).unwrap().p_output1, 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_set_never_fires() {
        let p = lazy_cycle_chords(7).unwrap();
        let det = QuantumDetector::new(&p, &MarkedSet::empty(7), 4096).unwrap();
        assert!(det.curve(300).iter().all(|&x| x <= 1e-12));
    }

    #[test]
    fn spectral_fast_path_agrees() {
        let p = uniform_chain(5).unwrap();
        let g = MarkedSet::new(5, [4]).unwrap();
        let det = QuantumDetector::new(&p, &g, 4096).unwrap();
        let spec = det.spectrum().unwrap();
        for k in [3, 40, 211] {
            assert!((spec.apply_power_vec(det.u(), k) - det.evolve(k)).norm() < 1e-10);
        }
        let vals: Vec<_> = spec.values.clone();
        let nu = perturbed_walk_unitary(&p, &g, 4096).unwrap();
        let mut brute = normal_eigen(nu.dense_mu().unwrap()).unwrap().values;
        brute.retain(|z| (z - Complex64::from(1.0)).norm() > 1e-6);
        let mut lifted = vals;
        lifted.retain(|z| (z - Complex64::from(1.0)).norm() > 1e-6);
        assert!(unit_multiset_distance(&lifted, &brute).unwrap() < 1e-8);
    }

    #[test]
    fn amp_curve_agrees_and_overlap() {
        let p = johnson_chain(5, 2, 5000).unwrap();
        let g = MarkedSet::new(10, [0]).unwrap();
        let c = amp_curve(&p, &g, 120).unwrap();
        assert!(c.max_discrepancy() < 1e-9);
        assert_abs_diff_eq!(c.overlap, 0.9, epsilon = 1e-12);
        assert!(c.amp.iter().all(|&a| (-1e-12..=4.0 + 1e-12).contains(&a)));
        assert!(matches!(amp_curve(&p, &MarkedSet::empty(10), 3), Err(Error::EmptyMarkedSet)));
    }

    #[test]
    fn decision_examples() {
        let p = uniform_chain(16).unwrap();
        let cfg = DecisionConfig { epsilon: 0.25, rounds: 200, ..Default::default() };
        let empty = decision_procedure(&p, |_| false, &cfg, 4096).unwrap();
        assert_eq!(empty.decision, Decision::Empty);
        assert_eq!(empty.rounds_run, 200);
        let large = decision_procedure(&p, |i| i % 4 == 0, &cfg, 4096).unwrap();
        assert_eq!(large.decision, Decision::Large);
        assert!(large.round_probability > 1e-3);
        let all = decision_procedure(&p, |_| true, &DecisionConfig { epsilon: 1.0, ..cfg }, 4096).unwrap();
        assert_eq!(all.first_hit.map(|h| h.0), Some(0));

        let id = StochasticMatrix::new(DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(decision_procedure(&id, |_| true, &cfg, 4096), Err(Error::DegenerateGap)));
    }

    #[test]
    fn run_record_json_keys() {
        let r = RunRecord {
            chain_id: "uniform-4".into(),
            n: 4,
            marked: vec![1],
            epsilon: 0.25,
            delta: 1.0,
            k: 3,
            p_output1: 0.5,
            amp: vec![],
            cost_total: 17.0,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"K\":3"));
    }
}
