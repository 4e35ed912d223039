//! Dense linear-algebra helpers shared by the spectral, walk and detection code.

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default cap on the ambient dimension of dense operators.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Dense-matrix cap, overridable through `WALK_SIZE_CAP`.
pub fn size_cap() -> usize {
    std::env::var("WALK_SIZE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

pub fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::TooLarge { size, cap })
    } else {
        Ok(())
    }
}

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::EigensolverFailure(format!("symmetric {n}x{n}: {e:?}")))?;
    let (s, u) = (eig.S(), eig.U());
    Ok(((0..n).map(|k| s[k]).collect(), DMatrix::from_fn(n, n, |r, c| u[(r, c)])))
}

/// Eigenpairs of a complex Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let fm = faer::Mat::<Complex64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let eig = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::EigensolverFailure(format!("hermitian {n}x{n}: {e:?}")))?;
    let (s, u) = (eig.S(), eig.U());
    Ok(((0..n).map(|k| s[k].re).collect(), CMat::from_fn(n, n, |r, c| u[(r, c)])))
}

/// Makes the first component of largest magnitude real and positive.
pub fn normalize_phase(v: &mut CVec) {
    let Some(top) = v.iter().map(|z| z.norm()).fold(None, |acc: Option<f64>, x| {
        Some(acc.map_or(x, |a| a.max(x)))
    }) else {
        return;
    };
    if top == 0.0 {
        return;
    }
    // first entry within rounding of the maximum, so ties resolve deterministically
    let pivot = v.iter().position(|z| z.norm() >= top * (1.0 - 1e-12)).unwrap();
    let phase = v[pivot] / v[pivot].norm();
    v.iter_mut().for_each(|z| *z /= phase);
}

/// Orthonormal basis of the column span of `cols`, dropping directions with
/// singular value below `tol`.
pub fn column_span_basis(cols: &CMat, tol: f64) -> CMat {
    if cols.ncols() == 0 || cols.nrows() == 0 {
        return CMat::zeros(cols.nrows(), 0);
    }
    let svd = SVD::new(cols.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol)
        .collect();
    CMat::from_fn(cols.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Numerical rank of a set of column vectors.
pub fn numerical_rank(cols: &CMat, tol: f64) -> usize {
    if cols.ncols() == 0 || cols.nrows() == 0 {
        return 0;
    }
    SVD::new(cols.clone(), false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Full eigendecomposition of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub values: Vec<Complex64>,
    /// Orthonormal eigenvectors, one per column.
    pub vectors: CMat,
}

/// Eigendecomposition of a normal (in practice unitary) matrix using only
/// Hermitian solvers: diagonalize the real part, split each cluster with the
/// imaginary part, then resolve what remains after rotating the cluster onto
/// the positive real axis.
pub fn normal_eigen(u: &CMat) -> Result<UnitaryEigen> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: u.ncols() });
    }
    let adj = u.adjoint();
    let re_part = (u + &adj).scale(0.5);
    let im_part = (u - &adj).map(|z| z / (2.0 * I));

    let mut vectors = CMat::zeros(n, n);
    let mut col = 0;
    let (a_vals, a_vecs) = hermitian_eigen(&re_part)?;
    for a_cluster in clusters(&a_vals, 1e-6) {
        let qa = a_vecs.columns(a_cluster.start, a_cluster.len()).into_owned();
        let b_small = qa.adjoint() * &im_part * &qa;
        let (b_vals, b_vecs) = hermitian_eigen(&hermitize(&b_small))?;
        for b_cluster in clusters(&b_vals, 1e-6) {
            let qb = &qa * b_vecs.columns(b_cluster.start, b_cluster.len());
            let u_small = qb.adjoint() * u * &qb;
            let tr = u_small.trace();
            let rot = if tr.norm() > 0.0 { tr / tr.norm() } else { ONE };
            let w = u_small.map(|z| z / rot);
            let w_im = (&w - w.adjoint()).map(|z| z / (2.0 * I));
            let (_, c_vecs) = hermitian_eigen(&hermitize(&w_im))?;
            let block = &qb * c_vecs;
            for k in 0..block.ncols() {
                let mut v = block.column(k).into_owned();
                let nrm = v.norm();
                v /= Complex64::from(nrm);
                normalize_phase(&mut v);
                vectors.set_column(col, &v);
                col += 1;
            }
        }
    }
    debug_assert_eq!(col, n);
    let values = (0..n)
        .map(|k| {
            let v = vectors.column(k);
            (v.adjoint() * u * v)[(0, 0)]
        })
        .collect();
    Ok(UnitaryEigen { values, vectors })
}

fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Consecutive runs of sorted values whose neighbours differ by at most `tol`.
pub fn clusters(sorted: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] - sorted[k - 1] > tol {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

/// Angle of a unit-modulus number, mapped into (-pi, pi] with values within
/// `1e-9` of -pi folded onto +pi.
pub fn phase(z: Complex64) -> f64 {
    let t = z.arg();
    if t <= -std::f64::consts::PI + 1e-9 {
        t + 2.0 * std::f64::consts::PI
    } else {
        t
    }
}

/// Largest pairwise distance between two multisets of unit-circle points
/// after sorting both by phase; `None` when the sizes differ.
pub fn unit_multiset_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let sort = |v: &[Complex64]| {
        let mut s = v.to_vec();
        s.sort_by(|x, y| phase(*x).total_cmp(&phase(*y)));
        s
    };
    let (sa, sb) = (sort(a), sort(b));
    // points near -1 land at either end of the phase order, so try every rotation
    let n = sa.len();
    let best = (0..n.max(1))
        .map(|shift| (0..n).map(|k| (sa[k] - sb[(k + shift) % n]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    Some(if n == 0 { 0.0 } else { best })
}

/// Largest distance between two sorted real multisets; `None` on size mismatch.
pub fn real_multiset_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    Some(sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(Complex64::from)
}

/// Largest entrywise modulus of `m`.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let g = CMat::from_fn(n, n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        g.qr().q()
    }

    #[test]
    fn normal_eigen_recovers_random_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 12] {
            let u = random_unitary(n, &mut rng);
            let eig = normal_eigen(&u).unwrap();
            for k in 0..n {
                let v = eig.vectors.column(k);
                let res = (&u * v - v * eig.values[k]).norm();
                assert!(res < 1e-10, "n={n} k={k} residual {res}");
                assert!((eig.values[k].norm() - 1.0).abs() < 1e-10);
            }
            let gram = eig.vectors.adjoint() * &eig.vectors;
            assert!(max_abs(&(gram - CMat::identity(n, n))) < 1e-10);
        }
    }

    #[test]
    fn normal_eigen_handles_degenerate_and_conjugate_pairs() {
        // diag(1, 1, i, -i, -1) in a random basis
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_unitary(5, &mut rng);
        let d = CMat::from_diagonal(&CVec::from_vec(vec![ONE, ONE, I, -I, -ONE]));
        let u = &q * d * q.adjoint();
        let eig = normal_eigen(&u).unwrap();
        let expected = [ONE, ONE, I, -I, -ONE];
        assert!(unit_multiset_distance(&eig.values, &expected).unwrap() < 1e-10);
    }

    #[test]
    fn phase_normalization_is_deterministic() {
        let mut v = CVec::from_vec(vec![Complex64::new(0.0, 0.5), Complex64::new(0.0, -0.5)]);
        normalize_phase(&mut v);
        assert!((v[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn clusters_split_on_gaps() {
        let c = clusters(&[0.0, 1e-9, 0.5, 0.5, 1.0], 1e-6);
        assert_eq!(c, vec![0..2, 2..4, 4..5]);
        assert!(clusters(&[], 1e-6).is_empty());
    }

    #[test]
    fn span_basis_drops_dependent_columns() {
        let m = CMat::from_row_slice(3, 3, &[ONE, ONE, ZERO, ZERO, ZERO, ZERO, ZERO, ZERO, ONE]);
        assert_eq!(column_span_basis(&m, 1e-10).ncols(), 2);
        assert_eq!(numerical_rank(&m, 1e-10), 2);
    }
}
