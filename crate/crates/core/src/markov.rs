//! Classical Markov chains: validation, spectra, marked-set perturbation and
//! the named chain families used throughout the crate.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// Row sums must be within this of 1.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Symmetry tolerance for chains handed to symmetric-only operations.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues closer than this to 1 count as principal.
pub const EIGEN_TOL: f64 = 1e-9;

/// A nonnegative matrix whose rows each sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    m: DMatrix<f64>,
}

impl StochasticMatrix {
    /// Validates `m` and wraps it.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        for r in 0..m.nrows() {
            let mut sum = 0.0;
            for c in 0..m.ncols() {
                let x = m[(r, c)];
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
                if x < 0.0 {
                    return Err(Error::NegativeEntry { row: r, col: c, value: x });
                }
                sum += x;
            }
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::RowSumViolation { row: r, sum });
            }
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch { expected: ncols, found: bad.len() });
        }
        Self::new(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.m[(r, c)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows()).map(|r| self.m.row(r).iter().copied().collect()).collect()
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare { rows: self.rows(), cols: self.cols() })
        }
    }

    /// Errors with the worst offending pair unless `|P - P^T| <= tol` entrywise.
    pub fn require_symmetric(&self, tol: f64) -> Result<usize> {
        let n = self.require_square()?;
        let mut worst = (0, 0, 0.0);
        for r in 0..n {
            for c in r + 1..n {
                let d = (self.m[(r, c)] - self.m[(c, r)]).abs();
                if d > worst.2 {
                    worst = (r, c, d);
                }
            }
        }
        if worst.2 > tol {
            Err(Error::NotSymmetric { row: worst.0, col: worst.1, diff: worst.2 })
        } else {
            Ok(n)
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.require_symmetric(SYMMETRY_TOL).is_ok()
    }

    /// Writes the matrix as CSV, one row per line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for r in 0..self.rows() {
            wtr.serialize(self.m.row(r).iter().collect::<Vec<_>>())?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<Vec<f64>>() {
            rows.push(rec?);
        }
        Self::from_rows(&rows)
    }

    pub fn to_json(&self) -> ChainJson {
        ChainJson { n: self.rows(), rows: self.to_rows() }
    }

    pub fn from_json(j: &ChainJson) -> Result<Self> {
        if j.rows.len() != j.n {
            return Err(Error::DimensionMismatch { expected: j.n, found: j.rows.len() });
        }
        Self::from_rows(&j.rows)
    }
}

/// JSON form of a chain: `{"n": int, "rows": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChainJson {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

/// Validates a raw matrix as a stochastic matrix.
pub fn validate_stochastic(m: DMatrix<f64>) -> Result<StochasticMatrix> {
    StochasticMatrix::new(m)
}

/// A subset of `[0, n)`, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedSet {
    universe_size: usize,
    members: Vec<usize>,
}

impl MarkedSet {
    pub fn new(universe_size: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for i in members {
            if i >= universe_size {
                return Err(Error::IndexOutOfRange { index: i, size: universe_size });
            }
            if !seen.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(Self { universe_size, members: seen.into_iter().collect() })
    }

    pub fn empty(universe_size: usize) -> Self {
        Self { universe_size, members: Vec::new() }
    }

    pub fn full(universe_size: usize) -> Self {
        Self { universe_size, members: (0..universe_size).collect() }
    }

    /// Marks every index for which `oracle` answers true.
    pub fn from_predicate(universe_size: usize, oracle: impl Fn(usize) -> bool) -> Self {
        Self { universe_size, members: (0..universe_size).filter(|&i| oracle(i)).collect() }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Marked fraction `|G| / n`.
    pub fn fraction(&self) -> f64 {
        if self.universe_size == 0 {
            0.0
        } else {
            self.members.len() as f64 / self.universe_size as f64
        }
    }

    /// Indicator vector over the universe.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.universe_size];
        for &i in &self.members {
            m[i] = true;
        }
        m
    }

    /// Unmarked indices in increasing order.
    pub fn complement(&self) -> Vec<usize> {
        let mask = self.mask();
        (0..self.universe_size).filter(|&i| !mask[i]).collect()
    }

    fn check_universe(&self, n: usize) -> Result<()> {
        if self.universe_size != n {
            Err(Error::DimensionMismatch { expected: n, found: self.universe_size })
        } else {
            Ok(())
        }
    }
}

/// Spectrum summary of a symmetric chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChainAnalysis {
    /// Eigenvalues in decreasing order.
    pub eigenvalues: Vec<f64>,
    /// `1 - max |lambda|` over the non-principal eigenvalues; zero when the
    /// eigenvalue 1 is degenerate.
    pub gap: f64,
    /// `1 - lambda_2`, the one-sided gap.
    pub one_sided_gap: f64,
    pub is_symmetric: bool,
}

/// Eigenvalue gap of a symmetric chain.
pub fn eigenvalue_gap(p: &StochasticMatrix) -> Result<ChainAnalysis> {
    p.require_symmetric(SYMMETRY_TOL)?;
    let sym = (p.matrix() + p.matrix().transpose()) * 0.5;
    let (mut eigenvalues, _) = symmetric_eigen(&sym)?;
    eigenvalues.reverse();
    let top = eigenvalues.first().copied().unwrap_or(1.0);
    if (top - 1.0).abs() > EIGEN_TOL {
        return Err(Error::EigensolverFailure(format!("top eigenvalue {top} is not 1")));
    }
    let (gap, one_sided_gap) = match eigenvalues.get(1) {
        None => (1.0, 1.0),
        Some(&second) if second > 1.0 - EIGEN_TOL => (0.0, 0.0),
        Some(&second) => {
            let worst = eigenvalues[1..].iter().map(|x| x.abs()).fold(0.0, f64::max);
            ((1.0 - worst).max(0.0), 1.0 - second)
        }
    };
    Ok(ChainAnalysis { eigenvalues, gap, one_sided_gap, is_symmetric: true })
}

/// Makes every marked state absorbing.
pub fn perturb_absorbing(p: &StochasticMatrix, g: &MarkedSet) -> Result<StochasticMatrix> {
    let n = p.require_square()?;
    g.check_universe(n)?;
    let mut m = p.matrix().clone();
    for &i in g.members() {
        m.row_mut(i).fill(0.0);
        m[(i, i)] = 1.0;
    }
    StochasticMatrix::new(m)
}

/// `D[i,j] = sqrt(P[i,j] * P[j,i])`.
pub fn half_discriminant(p: &StochasticMatrix) -> Result<DMatrix<f64>> {
    let n = p.require_square()?;
    Ok(DMatrix::from_fn(n, n, |i, j| (p.get(i, j) * p.get(j, i)).sqrt()))
}

/// Principal submatrix of `p` on the unmarked indices.
pub fn unmarked_block(p: &StochasticMatrix, g: &MarkedSet) -> Result<DMatrix<f64>> {
    let n = p.require_square()?;
    g.check_universe(n)?;
    let keep = g.complement();
    Ok(DMatrix::from_fn(keep.len(), keep.len(), |a, b| p.get(keep[a], keep[b])))
}

/// Spectral radius of the unmarked block `P1`; zero when every state is marked.
pub fn spectral_radius_restricted(p: &StochasticMatrix, g: &MarkedSet) -> Result<f64> {
    p.require_symmetric(SYMMETRY_TOL)?;
    if g.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let p1 = unmarked_block(p, g)?;
    if p1.nrows() == 0 {
        return Ok(0.0);
    }
    let sym = (&p1 + p1.transpose()) * 0.5;
    let (vals, _) = symmetric_eigen(&sym)?;
    Ok(vals.iter().map(|x| x.abs()).fold(0.0, f64::max))
}

/// Binomial coefficient, saturating at `usize::MAX`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// All `k`-subsets of `[0, universe)` in lexicographic order; the position in
/// this list is the state index used by [`johnson_chain`].
pub fn johnson_states(universe: usize, subset_size: usize) -> Vec<Vec<usize>> {
    (0..universe).combinations(subset_size).collect()
}

/// Walk on the `k`-subsets of an `N`-set that swaps one element in and one
/// out, uniformly over the `k(N-k)` possible swaps.
pub fn johnson_chain(universe: usize, subset_size: usize, max_states: usize) -> Result<StochasticMatrix> {
    if subset_size == 0 || subset_size >= universe {
        return Err(Error::InvalidParameter(format!(
            "johnson chain needs 0 < k < N, got N={universe} k={subset_size}"
        )));
    }
    let count = binomial(universe, subset_size);
    if count > max_states {
        return Err(Error::TooLarge { size: count, cap: max_states });
    }
    if universe > 128 {
        return Err(Error::InvalidParameter("johnson universe above 128".into()));
    }
    let states = johnson_states(universe, subset_size);
    let masks: Vec<u128> = states.iter().map(|s| s.iter().fold(0u128, |m, &i| m | 1u128 << i)).collect();
    let w = 1.0 / (subset_size * (universe - subset_size)) as f64;
    let mut m = DMatrix::zeros(count, count);
    for a in 0..count {
        for b in 0..count {
            if (masks[a] ^ masks[b]).count_ones() == 2 {
                m[(a, b)] = w;
            }
        }
    }
    StochasticMatrix::new(m)
}

/// Closed-form Johnson spectrum `((k-j)(N-k-j) - j) / (k(N-k))` for
/// `j = 0..=min(k, N-k)`, each with multiplicity `C(N,j) - C(N,j-1)`.
pub fn johnson_spectrum(universe: usize, subset_size: usize) -> Vec<(f64, usize)> {
    let (n, k) = (universe as f64, subset_size as f64);
    (0..=subset_size.min(universe - subset_size))
        .map(|j| {
            let jf = j as f64;
            let value = ((k - jf) * (n - k - jf) - jf) / (k * (n - k));
            let mult = binomial(universe, j) - if j == 0 { 0 } else { binomial(universe, j - 1) };
            (value, mult)
        })
        .collect()
}

/// Uniform chain `J / n`.
pub fn uniform_chain(n: usize) -> Result<StochasticMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("uniform chain needs n > 0".into()));
    }
    StochasticMatrix::new(DMatrix::from_element(n, n, 1.0 / n as f64))
}

/// Two-state chain `[[1-p, p], [0, 1]]`: state 0 unmarked, state 1 marked.
pub fn grover_chain(p: f64) -> Result<StochasticMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("grover p must be in [0,1], got {p}")));
    }
    StochasticMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0 - p, p, 0.0, 1.0]))
}

/// Lazy walk on a cycle with antipodal chords: stay with probability 1/2,
/// otherwise move uniformly to one of `i +- 1`, `i +- floor(n/2)`.
pub fn lazy_cycle_chords(n: usize) -> Result<StochasticMatrix> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
    }
    let half = n / 2;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let nbrs: BTreeSet<usize> =
            [(i + 1) % n, (i + n - 1) % n, (i + half) % n, (i + n - half) % n].into_iter().collect();
        m[(i, i)] += 0.5;
        let w = 0.5 / nbrs.len() as f64;
        for j in nbrs {
            m[(i, j)] += w;
        }
    }
    StochasticMatrix::new(m)
}

/// Random symmetric doubly stochastic chain on `n` states.
///
/// Starts from a random symmetric weight matrix supported on a ring plus
/// random chords and a positive diagonal, then alternates symmetric
/// diagonal scaling until every row sum is within `1e-12` of one.
pub fn random_symmetric_chain<R: Rng>(n: usize, density: f64, rng: &mut R) -> Result<StochasticMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("random chain needs n > 0".into()));
    }
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = rng.gen_range(0.05..1.0);
        if n > 1 {
            let j = (i + 1) % n;
            let w = rng.gen_range(0.05..1.0);
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        for j in i + 1..n {
            if a[(i, j)] == 0.0 && rng.gen_bool(density.clamp(0.0, 1.0)) {
                let w = rng.gen_range(0.0..1.0);
                a[(i, j)] = w;
                a[(j, i)] = w;
            }
        }
    }
    for _ in 0..10_000 {
        let sums: Vec<f64> = (0..n).map(|r| a.row(r).sum()).collect();
        if sums.iter().all(|s| (s - 1.0).abs() <= 1e-13) {
            break;
        }
        let d: Vec<f64> = sums.iter().map(|s| 1.0 / s.sqrt()).collect();
        for i in 0..n {
            for j in i..n {
                let v = d[i] * a[(i, j)] * d[j];
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
    }
    // fold the residual into the diagonal; it is far below the entry scale
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
        a[(i, i)] = (1.0 - off).max(0.0);
    }
    StochasticMatrix::new(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validate_accepts_uniform_and_grover() {
        assert!(validate_stochastic(DMatrix::from_element(2, 2, 0.5)).is_ok());
        assert!(grover_chain(0.3).is_ok());
    }

    #[test]
    fn validate_rejects_bad_row_sum() {
        let err = validate_stochastic(DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0])).unwrap_err();
        match err {
            Error::RowSumViolation { row, sum } => {
                assert_eq!(row, 0);
                assert_abs_diff_eq!(sum, 1.1, epsilon = 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_negative_and_nan() {
        let err = validate_stochastic(DMatrix::from_row_slice(2, 2, &[1.2, -0.2, 0.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { row: 0, col: 1, .. }));
        let err = validate_stochastic(DMatrix::from_row_slice(1, 1, &[f64::NAN])).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn marked_set_validation() {
        assert!(matches!(MarkedSet::new(3, [3]), Err(Error::IndexOutOfRange { index: 3, size: 3 })));
        assert!(matches!(MarkedSet::new(3, [1, 1]), Err(Error::DuplicateIndex(1))));
        let g = MarkedSet::new(4, [2, 0]).unwrap();
        assert_eq!(g.members(), &[0, 2]);
        assert_eq!(g.complement(), vec![1, 3]);
        assert_abs_diff_eq!(g.fraction(), 0.5);
    }

    #[test]
    fn gap_of_uniform_and_identity() {
        let a = eigenvalue_gap(&uniform_chain(2).unwrap()).unwrap();
        assert_abs_diff_eq!(a.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.eigenvalues[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.gap, 1.0, epsilon = 1e-12);

        let id = StochasticMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(eigenvalue_gap(&id).unwrap().gap, 0.0);
    }

    #[test]
    fn gap_rejects_asymmetric() {
        assert!(matches!(eigenvalue_gap(&grover_chain(0.3).unwrap()), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn perturb_examples() {
        let p = uniform_chain(2).unwrap();
        assert_eq!(perturb_absorbing(&p, &MarkedSet::empty(2)).unwrap(), p);
        let q = perturb_absorbing(&p, &MarkedSet::new(2, [1]).unwrap()).unwrap();
        assert_eq!(q.matrix(), &DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.0, 1.0]));
        let full = perturb_absorbing(&uniform_chain(3).unwrap(), &MarkedSet::full(3)).unwrap();
        assert_eq!(full.matrix(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn half_discriminant_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_symmetric_chain(6, 0.5, &mut rng).unwrap();
        assert_eq!(&half_discriminant(&p).unwrap(), p.matrix());

        let cyc = StochasticMatrix::new(DMatrix::from_fn(4, 4, |i, j| if j == (i + 1) % 4 { 1.0 } else { 0.0 })).unwrap();
        assert_eq!(half_discriminant(&cyc).unwrap(), DMatrix::zeros(4, 4));

        let p = uniform_chain(4).unwrap();
        let g = MarkedSet::new(4, [3]).unwrap();
        let d = half_discriminant(&perturb_absorbing(&p, &g).unwrap()).unwrap();
        let expected = DMatrix::from_fn(4, 4, |i, j| match (i < 3, j < 3) {
            (true, true) => 0.25,
            (false, false) => 1.0,
            _ => 0.0,
        });
        assert_eq!(d, expected);
    }

    #[test]
    fn restricted_radius_examples() {
        let p = uniform_chain(4).unwrap();
        let r = spectral_radius_restricted(&p, &MarkedSet::new(4, [0]).unwrap()).unwrap();
        assert_abs_diff_eq!(r, 0.75, epsilon = 1e-12);
        assert_eq!(spectral_radius_restricted(&p, &MarkedSet::full(4)).unwrap(), 0.0);
        assert!(matches!(spectral_radius_restricted(&p, &MarkedSet::empty(4)), Err(Error::EmptyMarkedSet)));
    }

    #[test]
    fn johnson_small_cases() {
        let j = johnson_chain(3, 1, 100).unwrap();
        let expected = DMatrix::from_fn(3, 3, |i, k| if i == k { 0.0 } else { 0.5 });
        assert_eq!(j.matrix(), &expected);
        assert!(matches!(johnson_chain(10, 5, 100), Err(Error::TooLarge { size: 252, cap: 100 })));
        assert!(johnson_chain(4, 0, 100).is_err());
        assert_eq!(johnson_states(4, 2)[0], vec![0, 1]);
        assert_eq!(johnson_states(4, 2)[5], vec![2, 3]);
    }

    #[test]
    fn johnson_five_two_spectrum() {
        let j = johnson_chain(5, 2, 100).unwrap();
        let a = eigenvalue_gap(&j).unwrap();
        // explicit multiplicities from the numerical spectrum
        let count = |v: f64| a.eigenvalues.iter().filter(|x| (*x - v).abs() < 1e-9).count();
        assert_eq!(count(1.0), 1);
        assert_eq!(count(1.0 / 6.0), 4);
        assert_eq!(count(-1.0 / 3.0), 5);
        assert_abs_diff_eq!(a.one_sided_gap, 5.0 / 6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.gap, 2.0 / 3.0, epsilon = 1e-9);
        assert_eq!(johnson_spectrum(5, 2), vec![(1.0, 1), (1.0 / 6.0, 4), (-1.0 / 3.0, 5)]);
    }

    #[test]
    fn random_chain_is_symmetric_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 17, 32] {
            let p = random_symmetric_chain(n, 0.3, &mut rng).unwrap();
            assert!(p.is_symmetric());
        }
    }

    #[test]
    fn csv_and_json_round_trip() {
        let p = lazy_cycle_chords(5).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(StochasticMatrix::read_csv(buf.as_slice()).unwrap(), p);
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back: ChainJson = serde_json::from_str(&j).unwrap();
        assert_eq!(StochasticMatrix::from_json(&back).unwrap(), p);
    }

    #[test]
    fn cycle_chords_is_symmetric() {
        for n in 3..10 {
            assert!(lazy_cycle_chords(n).unwrap().is_symmetric(), "n={n}");
        }
    }
}
