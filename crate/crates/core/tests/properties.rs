//! Cross-module invariants as property tests.

use hdqi_core::combinatorics::binomial_big;
use hdqi_core::decoders::LookupDecoder;
use hdqi_core::dequant::{apply_gates, coset_count, diagonalize_commuting, Gate};
use hdqi_core::ensembles::{greedy_commuting, spin_glass, SpinGlassParams};
use hdqi_core::noncommuting::{alpha_dp, AnticommGraph};
use hdqi_core::poly::a_table;
use hdqi_core::sim::{bell_transform, bell_transform_inverse, is_density_matrix, rho_direct, DenseState};
use hdqi_core::{BitMatrix, BitVec, PauliHamiltonian, PauliWord, SignedTerm, SymplecticCode, SyndromeDecoder};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(seed: u64, rows: usize, cols: usize) -> BitMatrix {
    BitMatrix::random(rows, cols, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn random_words(seed: u64, n: usize, m: usize) -> PauliHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = (0..m)
        .map(|_| {
            let mut w = PauliWord::random(n, &mut rng);
            while w.is_identity() {
                w = PauliWord::random(n, &mut rng);
            }
            SignedTerm::new(if rng.gen_bool(0.5) { 1 } else { -1 }, w).unwrap()
        })
        .collect();
    PauliHamiltonian::new(n, terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(seed in any::<u64>(), rows in 1usize..12, cols in 1usize..12) {
        let b = random_matrix(seed, rows, cols);
        let null = b.nullspace();
        prop_assert_eq!(b.rank() + null.len(), cols);
        for v in &null {
            prop_assert!(b.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn lookup_corrects_every_error_inside_the_radius(seed in any::<u64>(), n in 2usize..5, m in 2usize..8) {
        let h = random_words(seed, n, m);
        let code = SymplecticCode::from_hamiltonian(&h);
        let d = code.min_distance_bruteforce(m).unwrap();
        let ell = (1..=3).rev().find(|&l| d.supports_radius(l));
        prop_assume!(ell.is_some());
        let ell = ell.unwrap();
        let dec = LookupDecoder::build(&code, ell).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..20 {
            let w = rng.gen_range(0..=ell.min(m));
            let support = rand::seq::index::sample(&mut rng, m, w).into_vec();
            let y = BitVec::from_indices(m, &support);
            let r = dec.decode(&code.syndrome(&y).unwrap());
            prop_assert!(r.is_decoded());
            prop_assert_eq!(r.error, y);
        }
    }

    #[test]
    fn a_table_rows_count_all_sequences(m in 1usize..10, ell in 0usize..8) {
        // Σ_r C(m,r)·a(m,ℓ,r) = m^ℓ
        let tab = a_table(m, ell);
        let total: BigInt = (0..=ell.min(m))
            .map(|r| BigInt::from(binomial_big(m, r)) * tab[ell].get(r).cloned().unwrap_or_default())
            .sum();
        prop_assert_eq!(total, BigInt::from(m).pow(ell as u32));
    }

    #[test]
    fn alpha_is_a_bounded_average(seed in any::<u64>(), m in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if rng.gen_bool(0.4) {
                    edges.push((i, j));
                }
            }
        }
        let g = AnticommGraph::from_edges(m, &edges).unwrap();
        let mu: Vec<usize> = (0..m).map(|_| rng.gen_range(0..3)).collect();
        let a = alpha_dp(&g, &mu).unwrap();
        prop_assert!(a.abs() <= BigRational::one());
        let empty = AnticommGraph::from_edges(m, &[]).unwrap();
        prop_assert_eq!(alpha_dp(&empty, &mu).unwrap(), BigRational::one());
    }

    #[test]
    fn coset_counts_partition_each_weight_class(seed in any::<u64>(), k in 1usize..5, m in 1usize..10) {
        let b = random_matrix(seed, k, m);
        for w in 0..=m {
            let total: BigUint = (0u64..1 << k).map(|z| coset_count(&b, w, &BitVec::from_u64(k, z)).unwrap()).sum();
            prop_assert_eq!(total, binomial_big(m, w));
        }
    }

    #[test]
    fn gate_conjugation_inverts(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates: Vec<Gate> = (0..12)
            .map(|_| {
                let q = rng.gen_range(0..n);
                match rng.gen_range(0..3) {
                    0 => Gate::H(q),
                    1 => Gate::S(q),
                    _ if n > 1 => Gate::Cx(q, (q + rng.gen_range(1..n)) % n),
                    _ => Gate::H(q),
                }
            })
            .collect();
        let w = PauliWord::random(n, &mut rng);
        let (s, image) = apply_gates(&gates, 1, &w);
        // the inverse sequence of a single gate is that gate cubed (S) or itself (H, CX)
        let inverse: Vec<Gate> = gates
            .iter()
            .rev()
            .flat_map(|&g| match g {
                Gate::S(q) => vec![Gate::S(q); 3],
                other => vec![other],
            })
            .collect();
        let (s2, back) = apply_gates(&inverse, s, &image);
        prop_assert_eq!(back, w);
        prop_assert_eq!(s2, 1);
    }

    #[test]
    fn diagonalisation_yields_z_words(seed in any::<u64>(), n in 2usize..7, m in 1usize..10) {
        let h = greedy_commuting(n, 2.min(n), m.min(n * 2), seed, 10_000);
        prop_assume!(h.is_ok());
        let h = h.unwrap();
        let d = diagonalize_commuting(&h).unwrap();
        for (i, t) in h.terms().iter().enumerate() {
            let (s, w) = d.conjugate(t.sign, &t.word);
            prop_assert!(w.is_z_type());
            prop_assert_eq!(w.z_part(), &d.a_vectors[i]);
            prop_assert_eq!(s, d.folded_signs[i]);
        }
    }

    #[test]
    fn bell_transform_round_trips(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..1 << (2 * n)).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let orig = DenseState::from_amplitudes(2 * n, amps).unwrap();
        let mut st = orig.clone();
        let b: Vec<usize> = (0..n).collect();
        let c: Vec<usize> = (n..2 * n).collect();
        bell_transform(&mut st, &b, &c);
        bell_transform_inverse(&mut st, &b, &c);
        for (x, y) in st.amplitudes().iter().zip(orig.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn direct_filter_is_a_density_matrix(seed in any::<u64>(), n in 1usize..4, m in 1usize..6, c in prop::collection::vec(-1.0f64..1.0, 1..4)) {
        let h = random_words(seed, n, m);
        if let Ok(rho) = rho_direct(&h, &c) {
            prop_assert!(is_density_matrix(&rho, 1e-9));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generators_are_pure_functions_of_the_seed(seed in any::<u64>()) {
        let params = SpinGlassParams { a: 3, b: 4, m: 40, p: 0.1 };
        prop_assert_eq!(spin_glass(&params, seed).unwrap(), spin_glass(&params, seed).unwrap());
        prop_assert_eq!(greedy_commuting(12, 3, 20, seed, 100_000).unwrap(), greedy_commuting(12, 3, 20, seed, 100_000).unwrap());
    }
}
