//! Quantized bipartite walks.
//!
//! A walk `(c, r)` with `c: n x m` and `r: m x n` stochastic lives on the
//! `n * m` dimensional space spanned by `|i>|j>`, flattened as `i * m + j`.
//! `C` projects onto the span of `sqrt(c_i) = sum_j sqrt(c[i,j]) |i>|j>` and
//! `R` onto the span of `sqrt(r_j) = sum_i sqrt(r[j,i]) |i>|j>`; one walk step
//! is `mu = (2R - I)(2C - I)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_cap, to_complex, CMat, CVec, ZERO};
use crate::markov::{StochasticMatrix, SYMMETRY_TOL};
use crate::spectral::{lift, Discriminant, OrthonormalSystem, ReflectionPair};

/// Walks up to this ambient dimension keep a dense copy of `mu`.
pub const MATERIALIZE_LIMIT: usize = 256;

/// A pair of stochastic maps between a left set of size `n` and a right set
/// of size `m`.
#[derive(Debug, Clone)]
pub struct BipartiteWalk {
    c: StochasticMatrix,
    r: StochasticMatrix,
    sqrt_c: DMatrix<f64>,
    sqrt_r: DMatrix<f64>,
}

impl BipartiteWalk {
    pub fn new(c: StochasticMatrix, r: StochasticMatrix) -> Result<Self> {
        if r.rows() != c.cols() {
            return Err(Error::DimensionMismatch { expected: c.cols(), found: r.rows() });
        }
        if r.cols() != c.rows() {
            return Err(Error::DimensionMismatch { expected: c.rows(), found: r.cols() });
        }
        let sqrt_c = c.matrix().map(f64::sqrt);
        let sqrt_r = r.matrix().map(f64::sqrt);
        Ok(Self { c, r, sqrt_c, sqrt_r })
    }

    /// The walk `(P, P)` of a square chain.
    pub fn from_chain(p: &StochasticMatrix) -> Result<Self> {
        p.require_square()?;
        Self::new(p.clone(), p.clone())
    }

    pub fn n(&self) -> usize {
        self.c.rows()
    }

    pub fn m(&self) -> usize {
        self.c.cols()
    }

    pub fn c(&self) -> &StochasticMatrix {
        &self.c
    }

    pub fn r(&self) -> &StochasticMatrix {
        &self.r
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.m() + j
    }

    /// `{sqrt(c_i)}` as an explicit system.
    pub fn left_system(&self) -> OrthonormalSystem {
        let (n, m) = (self.n(), self.m());
        let mut v = CMat::zeros(n * m, n);
        for i in 0..n {
            for j in 0..m {
                v[(i * m + j, i)] = Complex64::from(self.sqrt_c[(i, j)]);
            }
        }
        OrthonormalSystem::named(v, "left").expect("rows of a stochastic matrix give orthonormal amplitudes")
    }

    /// `{sqrt(r_j)}` as an explicit system.
    pub fn right_system(&self) -> OrthonormalSystem {
        let (n, m) = (self.n(), self.m());
        let mut v = CMat::zeros(n * m, m);
        for j in 0..m {
            for i in 0..n {
                v[(i * m + j, j)] = Complex64::from(self.sqrt_r[(j, i)]);
            }
        }
        OrthonormalSystem::named(v, "right").expect("rows of a stochastic matrix give orthonormal amplitudes")
    }

    /// `x <- (2C - I) x`.
    pub fn reflect_left(&self, x: &mut CVec) {
        let m = self.m();
        for i in 0..self.n() {
            let row = i * m;
            let mut s = ZERO;
            for j in 0..m {
                s += x[row + j] * self.sqrt_c[(i, j)];
            }
            for j in 0..m {
                x[row + j] = s * (2.0 * self.sqrt_c[(i, j)]) - x[row + j];
            }
        }
    }

    /// `x <- (2R - I) x`.
    pub fn reflect_right(&self, x: &mut CVec) {
        let (n, m) = (self.n(), self.m());
        for j in 0..m {
            let mut s = ZERO;
            for i in 0..n {
                s += x[i * m + j] * self.sqrt_r[(j, i)];
            }
            for i in 0..n {
                x[i * m + j] = s * (2.0 * self.sqrt_r[(j, i)]) - x[i * m + j];
            }
        }
    }

    /// `x <- mu x` without materializing `mu`.
    pub fn step(&self, x: &mut CVec) {
        self.reflect_left(x);
        self.reflect_right(x);
    }
}

impl ReflectionPair for BipartiteWalk {
    fn left_len(&self) -> usize {
        self.n()
    }

    fn right_len(&self) -> usize {
        self.m()
    }

    fn ambient_dim(&self) -> usize {
        self.n() * self.m()
    }

    /// `((0, sqrt(c o r^T)), (sqrt(r o c^T), 0))`.
    fn discriminant(&self) -> Discriminant {
        let cross = DMatrix::from_fn(self.n(), self.m(), |i, j| self.sqrt_c[(i, j)] * self.sqrt_r[(j, i)]);
        Discriminant::from_real_block(&cross)
    }

    fn tilde(&self, a: &CVec, b: &CVec) -> Result<CVec> {
        let (n, m) = (self.n(), self.m());
        if a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.len() });
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: b.len() });
        }
        Ok(CVec::from_fn(n * m, |k, _| {
            let (i, j) = (k / m, k % m);
            a[i] * self.sqrt_c[(i, j)] + b[j] * self.sqrt_r[(j, i)]
        }))
    }
}

/// Projectors `(C, R)` as dense real matrices.
pub fn build_projectors(walk: &BipartiteWalk, cap: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (n, m) = (walk.n(), walk.m());
    let dim = n * m;
    check_cap(dim, cap)?;
    let mut c_proj = DMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..m {
            for j2 in 0..m {
                c_proj[(i * m + j, i * m + j2)] = walk.sqrt_c[(i, j)] * walk.sqrt_c[(i, j2)];
            }
        }
    }
    let mut r_proj = DMatrix::zeros(dim, dim);
    for j in 0..m {
        for i in 0..n {
            for i2 in 0..n {
                r_proj[(i * m + j, i2 * m + j)] = walk.sqrt_r[(j, i)] * walk.sqrt_r[(j, i2)];
            }
        }
    }
    Ok((c_proj, r_proj))
}

/// Amplitude vector over a tensor product of registers; the last register
/// varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    dims: Vec<usize>,
    amplitudes: CVec,
}

impl QuantumState {
    pub fn new(dims: Vec<usize>, amplitudes: CVec) -> Result<Self> {
        let size: usize = dims.iter().product();
        if size != amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: size, found: amplitudes.len() });
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn basis(dims: Vec<usize>, labels: &[usize]) -> Result<Self> {
        let size: usize = dims.iter().product();
        let idx = flat_index(&dims, labels)?;
        let mut amplitudes = CVec::zeros(size);
        amplitudes[idx] = Complex64::from(1.0);
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn amplitude(&self, labels: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[flat_index(&self.dims, labels)?])
    }

    /// Register labels of a flat index.
    pub fn labels(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn to_json(&self) -> StateJson {
        if self.len() > STATE_JSON_LIMIT {
            let mut order: Vec<usize> = (0..self.len()).collect();
            order.sort_by(|&a, &b| self.amplitudes[b].norm().total_cmp(&self.amplitudes[a].norm()).then(a.cmp(&b)));
            StateJson::Summary {
                dims: self.dims.clone(),
                norm: self.norm(),
                top: order
                    .into_iter()
                    .take(16)
                    .map(|k| TopAmplitude { index: k, re: self.amplitudes[k].re, im: self.amplitudes[k].im })
                    .collect(),
            }
        } else {
            StateJson::Full {
                dims: self.dims.clone(),
                re: self.amplitudes.iter().map(|z| z.re).collect(),
                im: self.amplitudes.iter().map(|z| z.im).collect(),
            }
        }
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        match j {
            StateJson::Full { dims, re, im } => {
                if re.len() != im.len() {
                    return Err(Error::DimensionMismatch { expected: re.len(), found: im.len() });
                }
                let amps = CVec::from_iterator(re.len(), re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)));
                Self::new(dims.clone(), amps)
            }
            StateJson::Summary { .. } => {
                Err(Error::InvalidParameter("summary state export cannot be reloaded".into()))
            }
        }
    }
}

/// States with more amplitudes than this export only a summary.
pub const STATE_JSON_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TopAmplitude {
    pub index: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StateJson {
    Full { dims: Vec<usize>, re: Vec<f64>, im: Vec<f64> },
    Summary { dims: Vec<usize>, norm: f64, top: Vec<TopAmplitude> },
}

fn flat_index(dims: &[usize], labels: &[usize]) -> Result<usize> {
    if dims.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: dims.len(), found: labels.len() });
    }
    let mut idx = 0;
    for (&d, &l) in dims.iter().zip(labels) {
        if l >= d {
            return Err(Error::IndexOutOfRange { index: l, size: d });
        }
        idx = idx * d + l;
    }
    Ok(idx)
}

/// The walk unitary `mu`, dense when small enough.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    walk: BipartiteWalk,
    mu: Option<CMat>,
}

impl WalkOperator {
    /// Structured operator; never materializes `mu`.
    pub fn structured(walk: BipartiteWalk) -> Self {
        Self { walk, mu: None }
    }

    pub fn walk(&self) -> &BipartiteWalk {
        &self.walk
    }

    pub fn n(&self) -> usize {
        self.walk.n()
    }

    pub fn m(&self) -> usize {
        self.walk.m()
    }

    pub fn dim(&self) -> usize {
        self.walk.n() * self.walk.m()
    }

    pub fn dense_mu(&self) -> Option<&CMat> {
        self.mu.as_ref()
    }

    /// Dense `mu`, building it if it was not kept.
    pub fn to_dense(&self, cap: usize) -> Result<CMat> {
        if let Some(mu) = &self.mu {
            return Ok(mu.clone());
        }
        check_cap(self.dim(), cap)?;
        Ok(materialize(&self.walk))
    }

    /// Dense projectors `(C, R)`.
    pub fn projectors(&self, cap: usize) -> Result<(CMat, CMat)> {
        let (c, r) = build_projectors(&self.walk, cap)?;
        Ok((to_complex(&c), to_complex(&r)))
    }

    /// `mu x`.
    pub fn apply_vec(&self, x: &CVec) -> CVec {
        match &self.mu {
            Some(mu) => mu * x,
            None => {
                let mut y = x.clone();
                self.walk.step(&mut y);
                y
            }
        }
    }

    fn check_state(&self, state: &QuantumState) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: state.len() });
        }
        Ok(())
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        self.check_state(state)?;
        QuantumState::new(state.dims.clone(), self.apply_vec(&state.amplitudes))
    }

    /// `mu^k` applied by repeated multiplication.
    pub fn apply_power(&self, state: &QuantumState, k: u64) -> Result<QuantumState> {
        self.check_state(state)?;
        let start = state.norm();
        let mut x = state.amplitudes.clone();
        for _ in 0..k {
            x = match &self.mu {
                Some(mu) => mu * &x,
                None => {
                    self.walk.step(&mut x);
                    x
                }
            };
        }
        let drift = (x.norm() - start).abs();
        debug_assert!(drift <= (k as f64 + 1.0) * 1e-12 * start.max(1.0), "norm drift {drift} after {k} steps");
        QuantumState::new(state.dims.clone(), x)
    }

    /// Eigendecomposition of `mu` from the lifted discriminant spectrum.
    pub fn spectrum(&self) -> Result<WalkSpectrum> {
        let lifted = lift(&self.walk)?;
        let (values, basis) = lifted.unit_basis();
        Ok(WalkSpectrum { values, basis, idle_dim: lifted.idle_dim })
    }
}

fn materialize(walk: &BipartiteWalk) -> CMat {
    let dim = walk.n() * walk.m();
    let mut mu = CMat::zeros(dim, dim);
    for k in 0..dim {
        let mut e = CVec::zeros(dim);
        e[k] = Complex64::from(1.0);
        walk.step(&mut e);
        mu.set_column(k, &e);
    }
    mu
}

/// Builds the walk operator, keeping a dense `mu` up to
/// [`MATERIALIZE_LIMIT`] and refusing ambient dimensions above `cap`.
pub fn walk_unitary(walk: BipartiteWalk, cap: usize) -> Result<WalkOperator> {
    let dim = walk.n() * walk.m();
    check_cap(dim, cap)?;
    let mu = (dim <= MATERIALIZE_LIMIT).then(|| materialize(&walk));
    Ok(WalkOperator { walk, mu })
}

/// Busy eigenvectors of `mu` as an orthonormal basis; `mu` is the identity on
/// their orthogonal complement.
#[derive(Debug, Clone)]
pub struct WalkSpectrum {
    pub values: Vec<Complex64>,
    pub basis: CMat,
    pub idle_dim: usize,
}

impl WalkSpectrum {
    /// `mu^k x = x + sum_z (theta_z^k - 1) <z, x> z`.
    pub fn apply_power_vec(&self, x: &CVec, k: u64) -> CVec {
        let coeffs = self.basis.adjoint() * x;
        let scaled = CVec::from_fn(coeffs.len(), |i, _| {
            let z = self.values[i];
            (Complex64::from_polar(1.0, z.arg() * k as f64) - 1.0) * coeffs[i]
        });
        x + &self.basis * scaled
    }

    pub fn apply_power(&self, state: &QuantumState, k: u64) -> Result<QuantumState> {
        if state.len() != self.basis.nrows() {
            return Err(Error::DimensionMismatch { expected: self.basis.nrows(), found: state.len() });
        }
        QuantumState::new(state.dims.clone(), self.apply_power_vec(&state.amplitudes, k))
    }
}

/// `u = sum_ij sqrt(P[i,j] / n) |i>|j>`, fixed by the walk of a symmetric `P`.
pub fn stationary_state(p: &StochasticMatrix) -> Result<QuantumState> {
    let n = p.require_symmetric(SYMMETRY_TOL)?;
    let amps = CVec::from_fn(n * n, |k, _| Complex64::from((p.get(k / n, k % n) / n as f64).sqrt()));
    QuantumState::new(vec![n, n], amps)
}
