use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use quantized_walk::findmarked::{
    classical_failure_probability, quantum_round_cost, unmarked_state, CostLedger, Prices, QuantumDetector,
};
use quantized_walk::linalg::{numerical_rank, unit_multiset_distance, CMat, CVec, DEFAULT_SIZE_CAP};
use quantized_walk::markov::{
    perturb_absorbing, random_symmetric_chain, MarkedSet, StochasticMatrix,
};
use quantized_walk::spectral::{
    brute_force_mu, decompose, lift, random_system_pair, reflection, PairShape, ReflectionPair, Systems,
};
use quantized_walk::walk::{stationary_state, walk_unitary, BipartiteWalk, QuantumState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rectangular_chain(rows: usize, cols: usize, seed: u64) -> StochasticMatrix {
    let mut r = rng(seed);
    let mut m = DMatrix::from_fn(rows, cols, |_, _| if r.gen_bool(0.6) { r.gen::<f64>() } else { 0.0 });
    for i in 0..rows {
        m[(i, r.gen_range(0..cols))] += 0.5;
        let s: f64 = m.row(i).sum();
        m.row_mut(i).scale_mut(1.0 / s);
    }
    StochasticMatrix::new(m).unwrap()
}

fn symmetric_chain(n: usize, seed: u64) -> StochasticMatrix {
    let mut r = rng(seed);
    let density = r.gen_range(0.0..1.0);
    random_symmetric_chain(n, density, &mut r).unwrap()
}

fn marked(n: usize, bits: u64) -> MarkedSet {
    MarkedSet::from_predicate(n, |i| bits >> (i % 64) & 1 == 1)
}

fn random_vec(dim: usize, seed: u64) -> CVec {
    let mut r = rng(seed);
    CVec::from_fn(dim, |_, _| Complex64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5))
}

fn unit_vec(dim: usize, seed: u64) -> CVec {
    let v = random_vec(dim, seed);
    let n = v.norm();
    v / Complex64::from(n)
}

fn max_dev_from_identity(m: &CMat) -> f64 {
    (m - CMat::identity(m.nrows(), m.ncols())).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_off_by_a_factor_are_rejected(rows in 1usize..6, cols in 1usize..6, seed: u64, factor in 1.01f64..2.0) {
        let p = rectangular_chain(rows, cols, seed);
        let mut m = p.matrix().clone();
        m.row_mut(0).scale_mut(factor);
        prop_assert!(StochasticMatrix::new(m).is_err());
    }

    #[test]
    fn negative_entries_are_rejected(n in 2usize..6, seed: u64) {
        let mut m = symmetric_chain(n, seed).into_matrix();
        m[(0, 0)] -= 0.25;
        m[(0, 1)] += 0.25;
        if m[(0, 0)] < 0.0 {
            prop_assert!(StochasticMatrix::new(m).is_err());
        }
    }

    #[test]
    fn perturbation_absorbs_marked_rows_only(n in 1usize..10, seed: u64, bits: u64) {
        let p = symmetric_chain(n, seed);
        let g = marked(n, bits);
        let q = perturb_absorbing(&p, &g).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = if g.contains(i) { if i == j { 1.0 } else { 0.0 } } else { p.get(i, j) };
                prop_assert_eq!(q.get(i, j), expected);
            }
        }
    }

    #[test]
    fn chain_csv_and_json_round_trip(rows in 1usize..7, cols in 1usize..7, seed: u64) {
        let p = rectangular_chain(rows, cols, seed);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        prop_assert_eq!(StochasticMatrix::read_csv(buf.as_slice()).unwrap(), p.clone());
        let text = serde_json::to_string(&p.to_json()).unwrap();
        let back = StochasticMatrix::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn marked_set_json_round_trip(n in 0usize..40, bits: u64) {
        let g = marked(n, bits);
        let back: MarkedSet = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        prop_assert_eq!(g.len() + g.complement().len(), n);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn state_json_round_trip(a in 1usize..5, b in 1usize..5, seed: u64) {
        let s = QuantumState::new(vec![a, b], random_vec(a * b, seed)).unwrap();
        let text = serde_json::to_string(&s.to_json()).unwrap();
        let back = QuantumState::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back.dims(), s.dims());
        prop_assert_eq!(back.amplitudes(), s.amplitudes());
    }

    #[test]
    fn walk_systems_are_orthonormal(n in 1usize..6, m in 1usize..6, s1: u64, s2: u64) {
        let walk = BipartiteWalk::new(rectangular_chain(n, m, s1), rectangular_chain(m, n, s2)).unwrap();
        for sys in [walk.left_system(), walk.right_system()] {
            let gram = sys.matrix().adjoint() * sys.matrix();
            prop_assert!(max_dev_from_identity(&gram) < 1e-12);
        }
    }

    #[test]
    fn reflections_are_hermitian_involutions(ambient in 1usize..20, seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(0..=ambient);
        let shape = PairShape { ambient, n, m: 0, shared: 0, orthogonal: 0 };
        let (a, _) = random_system_pair(shape, &mut r).unwrap();
        let refl = reflection(&a);
        prop_assert!((&refl - refl.adjoint()).norm() < 1e-12);
        prop_assert!(max_dev_from_identity(&(&refl * &refl)) < 1e-12);
        prop_assert!(((refl.trace().re) - (2.0 * n as f64 - ambient as f64)).abs() < 1e-10);
    }

    #[test]
    fn discriminant_is_hermitian_contraction(n in 1usize..6, m in 1usize..6, s1: u64, s2: u64) {
        let walk = BipartiteWalk::new(rectangular_chain(n, m, s1), rectangular_chain(m, n, s2)).unwrap();
        let disc = walk.discriminant();
        prop_assert!(disc.hermitian_defect() < 1e-12);
        prop_assert!(disc.diagonal_block_max() == 0.0);
        prop_assert!(disc.spectral_norm().unwrap() <= 1.0 + 1e-12);
        prop_assert_eq!(disc.block_split(), (n, m));
    }

    #[test]
    fn tilde_norm_matches_discriminant_form(n in 1usize..6, m in 1usize..6, s1: u64, s2: u64, s3: u64) {
        let walk = BipartiteWalk::new(rectangular_chain(n, m, s1), rectangular_chain(m, n, s2)).unwrap();
        let x = random_vec(n + m, s3);
        let a = x.rows(0, n).into_owned();
        let b = x.rows(n, m).into_owned();
        let t = walk.tilde(&a, &b).unwrap();
        let form = x.norm_squared() + (x.adjoint() * walk.discriminant().matrix() * &x)[(0, 0)].re;
        prop_assert!((t.norm_squared() - form).abs() < 1e-10);
    }

    #[test]
    fn walk_step_preserves_norm(n in 1usize..8, m in 1usize..8, s1: u64, s2: u64, s3: u64) {
        let walk = BipartiteWalk::new(rectangular_chain(n, m, s1), rectangular_chain(m, n, s2)).unwrap();
        let mut x = unit_vec(n * m, s3);
        for _ in 0..5 {
            walk.step(&mut x);
        }
        prop_assert!((x.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_walk_is_unitary(n in 1usize..5, m in 1usize..5, s1: u64, s2: u64) {
        let walk = BipartiteWalk::new(rectangular_chain(n, m, s1), rectangular_chain(m, n, s2)).unwrap();
        let mu = walk_unitary(walk, DEFAULT_SIZE_CAP).unwrap().to_dense(DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(max_dev_from_identity(&(mu.adjoint() * &mu)) < 1e-12);
    }

    #[test]
    fn stationary_state_is_fixed(n in 1usize..10, seed: u64) {
        let p = symmetric_chain(n, seed);
        let u = stationary_state(&p).unwrap().into_amplitudes();
        prop_assert!((u.norm() - 1.0).abs() < 1e-12);
        let mut y = u.clone();
        BipartiteWalk::from_chain(&p).unwrap().step(&mut y);
        prop_assert!((y - u).norm() < 1e-10);
    }

    #[test]
    fn lifted_spectrum_matches_dense_walk(n in 1usize..5, m in 1usize..5, s1: u64, s2: u64) {
        let walk = BipartiteWalk::new(rectangular_chain(n, m, s1), rectangular_chain(m, n, s2)).unwrap();
        let lifted = lift(&walk).unwrap();
        prop_assert_eq!(lifted.busy_dim + lifted.idle_dim, n * m);
        prop_assert_eq!(lifted.busy_dim, n + m - lifted.intersection_dim);
        let (_, eig) = brute_force_mu(&walk.left_system(), &walk.right_system(), DEFAULT_SIZE_CAP).unwrap();
        let d = unit_multiset_distance(&lifted.eigenvalues(), &eig.values).unwrap();
        prop_assert!(d < 1e-8, "distance {}", d);
    }

    #[test]
    fn system_pairs_count_busy_dimensions(ambient in 1usize..16, seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(0..=ambient);
        let m = r.gen_range(0..=ambient);
        let shared = r.gen_range(0..=n.min(m));
        let orthogonal = r.gen_range(0..=(m - shared).min(ambient - n));
        let shape = PairShape { ambient, n, m, shared, orthogonal };
        let (a, b) = random_system_pair(shape, &mut r).unwrap();
        let lifted = lift(&Systems::new(&a, &b).unwrap()).unwrap();
        let joined = CMat::from_fn(ambient, n + m, |r, c| if c < n { a.matrix()[(r, c)] } else { b.matrix()[(r, c - n)] });
        let sum_dim = numerical_rank(&joined, 1e-8);
        prop_assert!(lifted.intersection_dim >= shared);
        prop_assert_eq!(lifted.intersection_dim, n + m - sum_dim);
        prop_assert_eq!(lifted.busy_dim, n + m - lifted.intersection_dim);
        prop_assert_eq!(lifted.busy_dim + lifted.idle_dim, ambient);
    }

    #[test]
    fn decomposition_weights_sum_to_norm(n in 1usize..5, m in 1usize..5, s1: u64, s2: u64, s3: u64, k in 0u64..12) {
        let walk = BipartiteWalk::new(rectangular_chain(n, m, s1), rectangular_chain(m, n, s2)).unwrap();
        let x = random_vec(n * m, s3);
        let dec = decompose(&walk, &x).unwrap();
        let busy: f64 = dec.components.iter().map(|(_, c)| c.norm_sqr()).sum();
        prop_assert!((busy + dec.idle_norm_sq - x.norm_squared()).abs() < 1e-10);

        let mut y = x.clone();
        for _ in 0..k {
            walk.step(&mut y);
        }
        prop_assert!(((&x + &y).norm_squared() - dec.interference(k)).abs() < 1e-8);
    }

    #[test]
    fn unmarked_overlap_is_unmarked_fraction(n in 1usize..12, seed: u64, bits: u64) {
        let p = symmetric_chain(n, seed);
        let g = marked(n, bits);
        let u = stationary_state(&p).unwrap().into_amplitudes();
        let u_prime = unmarked_state(&p, &g).unwrap();
        let overlap = u.dotc(&u_prime).re;
        prop_assert!((overlap - (n - g.len()) as f64 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn empty_marked_set_never_fires(n in 1usize..8, seed: u64, k in 0u64..40) {
        let p = symmetric_chain(n, seed);
        let det = QuantumDetector::new(&p, &MarkedSet::empty(n), DEFAULT_SIZE_CAP).unwrap();
        prop_assert!(det.curve(k).into_iter().all(|x| x <= 1e-12));
        prop_assert!((classical_failure_probability(&p, &MarkedSet::empty(n), k).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn control_register_probabilities(n in 1usize..8, seed: u64, bits: u64, k in 0u64..30) {
        let p = symmetric_chain(n, seed);
        let g = marked(n, bits);
        let det = QuantumDetector::new(&p, &g, DEFAULT_SIZE_CAP).unwrap();
        let y = det.evolve(k);
        let zero = det.control_zero_probability(&y);
        let one = ((det.u() - &y) * Complex64::from(0.5)).norm_squared();
        prop_assert!((zero + one - 1.0).abs() < 1e-10);
        let out = det.output_probability(&y);
        prop_assert!(out >= one - 1e-12 && out <= 1.0 + 1e-12);
        if g.len() == n {
            prop_assert!((out - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ledger_totals(c0 in 0u64..1000, c1 in 0u64..1000, c2 in 0u64..1000, p0 in 0.0f64..10.0, p1 in 0.0f64..10.0, p2 in 0.0f64..10.0, k in 0u64..500) {
        let prices = Prices { p0, p1, p2 };
        let mut ledger = CostLedger::new(prices);
        ledger.setup(c0);
        ledger.step(c1);
        ledger.test(c2);
        let expected = c0 as f64 * p0 + c1 as f64 * p1 + c2 as f64 * p2;
        prop_assert!((ledger.total() - expected).abs() <= 1e-9 * expected.max(1.0));

        let round = quantum_round_cost(k, prices);
        prop_assert_eq!((round.p0_count, round.p1_count, round.p2_count), (1, 2 * k, 4 * k + 1));
        ledger.absorb(&round);
        prop_assert!((ledger.total() - expected - round.total()).abs() <= 1e-9 * ledger.total().max(1.0));
    }
}

#[test]
fn reflection_pair_on_random_systems_matches_dense() {
    let mut r = rng(5);
    for _ in 0..10 {
        let shape = PairShape { ambient: 9, n: 4, m: 3, shared: 1, orthogonal: 1 };
        let (a, b) = random_system_pair(shape, &mut r).unwrap();
        let (mu, _) = brute_force_mu(&a, &b, DEFAULT_SIZE_CAP).unwrap();
        assert!(max_dev_from_identity(&(mu.adjoint() * &mu)) < 1e-12);
    }
}
