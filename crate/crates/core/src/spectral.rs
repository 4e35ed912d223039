//! Spectra of products of two reflections.
//!
//! Given orthonormal systems `{v_i}` spanning `A` and `{w_j}` spanning `B`,
//! the operator `mu = ref_B ref_A` is determined on `A + B` by the
//! Hermitian discriminant matrix `M = Gram(v, w) - I`:
//!
//! | eigenvalue of `M` | eigenvalue of `mu` | eigenvector of `mu` |
//! |---|---|---|
//! | `1` | `1` | `a~` (equal to `b~`) |
//! | `0 < l < 1` | `2l^2 - 1 - 2il sqrt(1-l^2)` | `a~ - l b~ + i sqrt(1-l^2) b~` |
//! | `0 < l < 1` | `2l^2 - 1 + 2il sqrt(1-l^2)` | `a~ - l b~ - i sqrt(1-l^2) b~` |
//! | `0` | `-1` | `a~` and `b~` separately |
//!
//! Outside `A + B` (the idle subspace) `mu` is the identity.
//!
//! Convention: vectors are plain amplitude columns and `mu x` means "reflect
//! about `A`, then about `B`". For real systems (every walk built from a
//! stochastic matrix) this is the same matrix as the row-vector convention
//! `x (2C - I)(2R - I)` transposed, so spectra and eigenvectors agree.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{
    check_cap, clusters, column_span_basis, hermitian_eigen, max_abs, normal_eigen, normalize_phase,
    phase, CMat, CVec, UnitaryEigen, ONE, ZERO,
};

/// Tolerance for orthonormality of input systems.
pub const ORTHO_TOL: f64 = 1e-10;
/// Discriminant eigenvalues within this of each other share an eigenspace.
pub const GROUP_TOL: f64 = 1e-8;
/// Eigenvalues above `1 - ENDPOINT_TOL` are 1, below `ENDPOINT_TOL` in
/// magnitude are 0.
pub const ENDPOINT_TOL: f64 = 1e-8;

/// A finite list of orthonormal vectors in a common ambient space, stored as
/// the columns of a matrix.
#[derive(Debug, Clone)]
pub struct OrthonormalSystem {
    vectors: CMat,
}

impl OrthonormalSystem {
    /// Checks pairwise inner products against the identity within `1e-10`.
    pub fn new(vectors: CMat) -> Result<Self> {
        Self::named(vectors, "system")
    }

    pub fn named(vectors: CMat, system: &'static str) -> Result<Self> {
        let gram = vectors.adjoint() * &vectors;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { ONE } else { ZERO };
                let dev = (gram[(i, j)] - target).norm();
                if dev > ORTHO_TOL {
                    return Err(Error::NotOrthonormal { system, i, j, value: gram[(i, j)].norm() });
                }
            }
        }
        Ok(Self { vectors })
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self { vectors: CMat::zeros(ambient_dim, 0) }
    }

    /// Standard basis vectors `e_k` for the listed `k`.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        let mut v = CMat::zeros(ambient_dim, indices.len());
        for (c, &k) in indices.iter().enumerate() {
            if k >= ambient_dim {
                return Err(Error::IndexOutOfRange { index: k, size: ambient_dim });
            }
            v[(k, c)] = ONE;
        }
        Self::new(v)
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    pub fn vector(&self, i: usize) -> CVec {
        self.vectors.column(i).into_owned()
    }

    pub fn matrix(&self) -> &CMat {
        &self.vectors
    }

    /// `sum_i coeffs[i] v_i`.
    pub fn combine(&self, coeffs: &CVec) -> Result<CVec> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: coeffs.len() });
        }
        Ok(&self.vectors * coeffs)
    }
}

/// Anything that supplies two orthonormal systems in a common space: the
/// discriminant and the tilde map are all the lifting needs.
pub trait ReflectionPair {
    fn left_len(&self) -> usize;
    fn right_len(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn discriminant(&self) -> Discriminant;
    /// `(a, b)~ = sum a_i v_i + sum b_j w_j`.
    fn tilde(&self, a: &CVec, b: &CVec) -> Result<CVec>;
}

/// Borrowed pair of explicit systems.
#[derive(Debug, Clone, Copy)]
pub struct Systems<'a> {
    pub a: &'a OrthonormalSystem,
    pub b: &'a OrthonormalSystem,
}

impl<'a> Systems<'a> {
    pub fn new(a: &'a OrthonormalSystem, b: &'a OrthonormalSystem) -> Result<Self> {
        if a.ambient_dim() != b.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: a.ambient_dim(), found: b.ambient_dim() });
        }
        Ok(Self { a, b })
    }
}

impl ReflectionPair for Systems<'_> {
    fn left_len(&self) -> usize {
        self.a.len()
    }

    fn right_len(&self) -> usize {
        self.b.len()
    }

    fn ambient_dim(&self) -> usize {
        self.a.ambient_dim()
    }

    fn discriminant(&self) -> Discriminant {
        let (n, m) = (self.a.len(), self.b.len());
        let cross = self.a.matrix().adjoint() * self.b.matrix();
        Discriminant::from_cross_block(&cross, n, m)
    }

    fn tilde(&self, a: &CVec, b: &CVec) -> Result<CVec> {
        Ok(self.a.combine(a)? + self.b.combine(b)?)
    }
}

/// Hermitian `(n+m) x (n+m)` matrix with zero diagonal blocks.
#[derive(Debug, Clone)]
pub struct Discriminant {
    m: CMat,
    split: (usize, usize),
}

impl Discriminant {
    /// Builds `((0, G), (G*, 0))` from the `n x m` block `G[i,j] = <v_i, w_j>`.
    pub fn from_cross_block(cross: &CMat, n: usize, m: usize) -> Self {
        let mut full = CMat::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..m {
                full[(i, n + j)] = cross[(i, j)];
                full[(n + j, i)] = cross[(i, j)].conj();
            }
        }
        Self { m: full, split: (n, m) }
    }

    /// Real form `((0, X), (X^T, 0))`.
    pub fn from_real_block(cross: &DMatrix<f64>) -> Self {
        let (n, m) = cross.shape();
        Self::from_cross_block(&cross.map(Complex64::from), n, m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn block_split(&self) -> (usize, usize) {
        self.split
    }

    pub fn cross_block(&self) -> CMat {
        let (n, m) = self.split;
        self.m.view((0, n), (n, m)).into_owned()
    }

    /// Eigenvalues ascending with orthonormal eigenvectors.
    pub fn eigen(&self) -> Result<(Vec<f64>, CMat)> {
        hermitian_eigen(&self.m)
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    /// Largest entry inside the two diagonal blocks.
    pub fn diagonal_block_max(&self) -> f64 {
        let (n, m) = self.split;
        let a = self.m.view((0, 0), (n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let b = self.m.view((n, n), (m, m)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        a.max(b)
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        let (vals, _) = self.eigen()?;
        Ok(vals.iter().map(|x| x.abs()).fold(0.0, f64::max))
    }
}

/// Discriminant of an explicit pair of systems.
pub fn gram_discriminant(a_sys: &OrthonormalSystem, b_sys: &OrthonormalSystem) -> Result<Discriminant> {
    Ok(Systems::new(a_sys, b_sys)?.discriminant())
}

/// `(a, b)~` for explicit systems.
pub fn tilde(a: &CVec, b: &CVec, a_sys: &OrthonormalSystem, b_sys: &OrthonormalSystem) -> Result<CVec> {
    Systems::new(a_sys, b_sys)?.tilde(a, b)
}

/// `2 V V* - I`, the reflection fixing the span of `sys`.
pub fn reflection(sys: &OrthonormalSystem) -> CMat {
    let v = sys.matrix();
    let n = sys.ambient_dim();
    (v * v.adjoint()).scale(2.0) - CMat::identity(n, n)
}

/// Which row of the lifting table an entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    /// `lambda = 1`: a vector of `A ∩ B`.
    Intersection,
    /// `0 < lambda < 1`: the two `tau` images.
    Rotation,
    /// `lambda = 0`, left part `(a, 0)`.
    SplitLeft,
    /// `lambda = 0`, right part `(0, b)`.
    SplitRight,
}

/// One eigenvector of the discriminant and what it lifts to.
#[derive(Debug, Clone)]
pub struct LiftedEntry {
    pub lambda: f64,
    pub kind: LiftKind,
    /// Unit eigenvector `(a, b)` of the discriminant.
    pub eigvec_m: CVec,
    pub mu_eigenvalues: Vec<Complex64>,
    /// Unnormalized lifted vectors, matching `mu_eigenvalues`.
    pub mu_eigenvectors: Vec<CVec>,
}

/// Eigenpairs of `mu` on the busy subspace, derived from the discriminant.
#[derive(Debug, Clone)]
pub struct LiftedSpectrum {
    pub entries: Vec<LiftedEntry>,
    pub ambient_dim: usize,
    pub busy_dim: usize,
    pub idle_dim: usize,
    /// Dimension of the `lambda = 1` eigenspace of the discriminant.
    pub intersection_dim: usize,
}

/// `e^{i theta}` for `tau_+` (sign = +1) or `tau_-` (sign = -1).
pub fn lifted_eigenvalue(lambda: f64, sign: f64) -> Complex64 {
    let s = (1.0 - lambda * lambda).max(0.0).sqrt();
    Complex64::new(2.0 * lambda * lambda - 1.0, -sign * 2.0 * lambda * s)
}

/// `tau_+-(a, b) = a~ - lambda b~ +- i sqrt(1 - lambda^2) b~`.
pub fn tau(lambda: f64, sign: f64, a_tilde: &CVec, b_tilde: &CVec) -> CVec {
    let s = (1.0 - lambda * lambda).max(0.0).sqrt();
    let coef = Complex64::new(-lambda, sign * s);
    a_tilde + b_tilde * coef
}

/// Norm of a lifted vector; for a unit `(a, b)` with `0 <= lambda < 1`
/// this equals `sqrt(1 - lambda^2)`.
pub fn tau_norm_check(_lambda: f64, _pair: (&CVec, &CVec), lifted: &CVec) -> f64 {
    lifted.norm()
}

fn split(v: &CVec, n: usize, m: usize) -> (CVec, CVec) {
    (v.rows(0, n).into_owned(), v.rows(n, m).into_owned())
}

fn stack(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() + b.len());
    out.rows_mut(0, a.len()).copy_from(a);
    out.rows_mut(a.len(), b.len()).copy_from(b);
    out
}

/// Visits every lifted entry without collecting them.
pub fn for_each_lifted<P: ReflectionPair + ?Sized>(
    disc: &Discriminant,
    pair: &P,
    mut visit: impl FnMut(LiftedEntry) -> Result<()>,
) -> Result<()> {
    let (n, m) = disc.block_split();
    if n != pair.left_len() || m != pair.right_len() {
        return Err(Error::DimensionMismatch { expected: n + m, found: pair.left_len() + pair.right_len() });
    }
    let (vals, vecs) = disc.eigen()?;
    for group in clusters(&vals, GROUP_TOL) {
        let mean = vals[group.clone()].iter().sum::<f64>() / group.len() as f64;
        if mean < -ENDPOINT_TOL {
            continue;
        }
        if mean.abs() < ENDPOINT_TOL {
            let cols = vecs.columns(group.start, group.len());
            let a_parts = cols.rows(0, n).into_owned();
            let b_parts = cols.rows(n, m).into_owned();
            for (basis, kind) in [
                (column_span_basis(&a_parts, 1e-6), LiftKind::SplitLeft),
                (column_span_basis(&b_parts, 1e-6), LiftKind::SplitRight),
            ] {
                for k in 0..basis.ncols() {
                    let part = basis.column(k).into_owned();
                    let (a, b) = match kind {
                        LiftKind::SplitLeft => (part, CVec::zeros(m)),
                        _ => (CVec::zeros(n), part),
                    };
                    let mut eigvec = stack(&a, &b);
                    normalize_phase(&mut eigvec);
                    let (a, b) = split(&eigvec, n, m);
                    let lifted = pair.tilde(&a, &b)?;
                    visit(LiftedEntry {
                        lambda: 0.0,
                        kind,
                        eigvec_m: eigvec,
                        mu_eigenvalues: vec![-ONE],
                        mu_eigenvectors: vec![lifted],
                    })?;
                }
            }
            continue;
        }
        for k in group.clone() {
            let mut eigvec = vecs.column(k).into_owned();
            normalize_phase(&mut eigvec);
            let (a, b) = split(&eigvec, n, m);
            let zero_a = CVec::zeros(n);
            let zero_b = CVec::zeros(m);
            let a_t = pair.tilde(&a, &zero_b)?;
            if mean > 1.0 - ENDPOINT_TOL {
                visit(LiftedEntry {
                    lambda: 1.0,
                    kind: LiftKind::Intersection,
                    eigvec_m: eigvec,
                    mu_eigenvalues: vec![ONE],
                    mu_eigenvectors: vec![a_t],
                })?;
                continue;
            }
            let lambda = vals[k];
            let b_t = pair.tilde(&zero_a, &b)?;
            visit(LiftedEntry {
                lambda,
                kind: LiftKind::Rotation,
                eigvec_m: eigvec,
                mu_eigenvalues: vec![lifted_eigenvalue(lambda, 1.0), lifted_eigenvalue(lambda, -1.0)],
                mu_eigenvectors: vec![tau(lambda, 1.0, &a_t, &b_t), tau(lambda, -1.0, &a_t, &b_t)],
            })?;
        }
    }
    Ok(())
}

/// Lifts every eigenpair of `disc` (built from `pair`) to eigenpairs of `mu`.
pub fn lift_spectrum<P: ReflectionPair + ?Sized>(disc: &Discriminant, pair: &P) -> Result<LiftedSpectrum> {
    let mut entries = Vec::new();
    for_each_lifted(disc, pair, |e| {
        entries.push(e);
        Ok(())
    })?;
    let busy_dim = entries.iter().map(|e| e.mu_eigenvectors.len()).sum();
    let intersection_dim = entries.iter().filter(|e| e.kind == LiftKind::Intersection).count();
    let ambient_dim = pair.ambient_dim();
    Ok(LiftedSpectrum {
        entries,
        ambient_dim,
        busy_dim,
        idle_dim: ambient_dim.saturating_sub(busy_dim),
        intersection_dim,
    })
}

/// Builds the discriminant of `pair` and lifts it.
pub fn lift<P: ReflectionPair + ?Sized>(pair: &P) -> Result<LiftedSpectrum> {
    lift_spectrum(&pair.discriminant(), pair)
}

impl LiftedSpectrum {
    /// `mu` eigenvalues on the busy subspace.
    pub fn busy_eigenvalues(&self) -> Vec<Complex64> {
        self.entries.iter().flat_map(|e| e.mu_eigenvalues.iter().copied()).collect()
    }

    /// All `mu` eigenvalues including the idle eigenvalue 1.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut v = self.busy_eigenvalues();
        v.extend(std::iter::repeat_n(ONE, self.idle_dim));
        v
    }

    /// `(eigenvalue, unnormalized vector)` for every busy eigenvector.
    pub fn pairs(&self) -> impl Iterator<Item = (Complex64, &CVec)> {
        self.entries
            .iter()
            .flat_map(|e| e.mu_eigenvalues.iter().copied().zip(e.mu_eigenvectors.iter()))
    }

    /// Busy eigenvectors normalized to unit length, as columns.
    pub fn unit_basis(&self) -> (Vec<Complex64>, CMat) {
        let mut vals = Vec::with_capacity(self.busy_dim);
        let mut cols = CMat::zeros(self.ambient_dim, self.busy_dim);
        for (k, (val, v)) in self.pairs().enumerate() {
            vals.push(val);
            cols.set_column(k, &(v / Complex64::from(v.norm())));
        }
        (vals, cols)
    }

    /// Flat eigenvalue table rows.
    pub fn table(&self) -> Vec<SpectrumRow> {
        self.entries
            .iter()
            .flat_map(|e| {
                e.mu_eigenvalues.iter().zip(&e.mu_eigenvectors).map(move |(z, v)| SpectrumRow {
                    lambda: e.lambda,
                    kind: e.kind,
                    mu_re: z.re,
                    mu_im: z.im,
                    theta: phase(*z),
                    norm: v.norm(),
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> SpectrumJson {
        SpectrumJson {
            ambient_dim: self.ambient_dim,
            busy_dim: self.busy_dim,
            idle_dim: self.idle_dim,
            entries: self
                .table()
                .into_iter()
                .map(|r| SpectrumJsonEntry { lambda: r.lambda, kind: r.kind, theta: r.theta, mu_eig: [r.mu_re, r.mu_im], norm: r.norm })
                .collect(),
        }
    }

    /// CSV with columns `lambda, re_mu, im_mu, theta, norm`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["lambda", "re_mu", "im_mu", "theta", "norm"])?;
        for r in self.table() {
            wtr.serialize((r.lambda, r.mu_re, r.mu_im, r.theta, r.norm))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub lambda: f64,
    pub kind: LiftKind,
    pub mu_re: f64,
    pub mu_im: f64,
    pub theta: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumJsonEntry {
    pub lambda: f64,
    pub kind: LiftKind,
    pub theta: f64,
    pub mu_eig: [f64; 2],
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumJson {
    pub ambient_dim: usize,
    pub busy_dim: usize,
    pub idle_dim: usize,
    pub entries: Vec<SpectrumJsonEntry>,
}

/// A vector written in the eigenbasis of `mu`: busy components plus the
/// squared norm of what is left in the idle subspace.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `(eigenvalue, coefficient on the unit eigenvector)`.
    pub components: Vec<(Complex64, Complex64)>,
    pub idle_norm_sq: f64,
}

impl Decomposition {
    /// `|x + mu^k x|^2`, using that `mu` fixes the idle part.
    pub fn interference(&self, k: u64) -> f64 {
        let busy: f64 = self
            .components
            .iter()
            .map(|(z, c)| c.norm_sqr() * (ONE + Complex64::from_polar(1.0, z.arg() * k as f64)).norm_sqr())
            .sum();
        busy + 4.0 * self.idle_norm_sq
    }
}

/// Projects `x` onto every lifted eigenvector of `pair` without keeping the
/// vectors, so it works for ambient spaces too large to hold a full basis.
pub fn decompose<P: ReflectionPair + ?Sized>(pair: &P, x: &CVec) -> Result<Decomposition> {
    if x.len() != pair.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: pair.ambient_dim(), found: x.len() });
    }
    let disc = pair.discriminant();
    let mut components = Vec::new();
    let mut busy_sq = 0.0;
    for_each_lifted(&disc, pair, |e| {
        for (z, v) in e.mu_eigenvalues.iter().zip(&e.mu_eigenvectors) {
            let nrm = v.norm();
            if nrm == 0.0 {
                continue;
            }
            let coeff = v.dotc(x) / nrm;
            busy_sq += coeff.norm_sqr();
            components.push((*z, coeff));
        }
        Ok(())
    })?;
    let idle_norm_sq = (x.norm_squared() - busy_sq).max(0.0);
    Ok(Decomposition { components, idle_norm_sq })
}

/// Materializes `mu = ref_B ref_A` and diagonalizes it directly. This is
/// the oracle the lifted spectrum is checked against.
pub fn brute_force_mu(
    a_sys: &OrthonormalSystem,
    b_sys: &OrthonormalSystem,
    cap: usize,
) -> Result<(CMat, UnitaryEigen)> {
    Systems::new(a_sys, b_sys)?;
    check_cap(a_sys.ambient_dim(), cap)?;
    let mu = reflection(b_sys) * reflection(a_sys);
    let eig = normal_eigen(&mu)?;
    Ok((mu, eig))
}

/// Random unitary built by orthonormalizing a matrix of uniform entries.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    if dim == 0 {
        return CMat::zeros(0, 0);
    }
    let g = CMat::from_fn(dim, dim, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    g.qr().q()
}

/// Shape of a random pair of systems.
#[derive(Debug, Clone, Copy)]
pub struct PairShape {
    pub ambient: usize,
    pub n: usize,
    pub m: usize,
    /// Dimensions of `B` placed inside `A`.
    pub shared: usize,
    /// Dimensions of `B` placed orthogonal to `A`.
    pub orthogonal: usize,
}

/// Random pair of complex orthonormal systems with prescribed intersection
/// and orthogonal parts; remaining directions of `B` are generic.
pub fn random_system_pair<R: Rng>(shape: PairShape, rng: &mut R) -> Result<(OrthonormalSystem, OrthonormalSystem)> {
    let PairShape { ambient, n, m, shared, orthogonal } = shape;
    if n > ambient || m > ambient || shared > n.min(m) || shared + orthogonal > m || n + orthogonal > ambient {
        return Err(Error::InvalidParameter(format!("infeasible system shape {shape:?}")));
    }
    let q = random_unitary(ambient, rng);
    let a_span = q.columns(0, n).into_owned();
    let a = &a_span * random_unitary(n, rng);

    let mut b_cols = CMat::zeros(ambient, m);
    let mix = random_unitary(n.max(1), rng);
    for k in 0..shared {
        b_cols.set_column(k, &(&a_span * mix.column(k)));
    }
    for k in 0..orthogonal {
        b_cols.set_column(shared + k, &q.column(n + k));
    }
    for k in shared + orthogonal..m {
        let g = CVec::from_fn(ambient, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        b_cols.set_column(k, &g);
    }
    // Gram-Schmidt keeps the first `shared + orthogonal` columns' spans intact
    let b_basis = gram_schmidt(&b_cols);
    let b = &b_basis * random_unitary(m, rng);
    Ok((OrthonormalSystem::named(a, "a")?, OrthonormalSystem::named(b, "b")?))
}

fn gram_schmidt(cols: &CMat) -> CMat {
    let mut out = cols.clone();
    for k in 0..out.ncols() {
        for _ in 0..2 {
            for j in 0..k {
                let prev = out.column(j).into_owned();
                let proj = prev.dotc(&out.column(k));
                let upd = out.column(k) - prev * proj;
                out.set_column(k, &upd);
            }
        }
        let nrm = out.column(k).norm();
        let unit = out.column(k) / Complex64::from(nrm);
        out.set_column(k, &unit);
    }
    out
}
