use proptest::prelude::*;
use ptrank_core::io::{field_descriptor, parse_field, Json};
use ptrank_core::ptcore::{
    all_kappas, kron_act, partial_transpose, pt_rank_exact, pt_rank_search, transpose_rank, verify_pt_certificate,
    Kappa, Strategy as Search,
};
use ptrank_core::soslink::{pt_to_sos, verify_sos};
use ptrank_core::{DenseMatrix, FieldCtx, HyperMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Small prime, n and d with n^d ≤ 9.
fn shape() -> impl Strategy<Value = (u64, usize, usize)> {
    (prop::sample::select(vec![2u64, 3, 5, 7]), prop::sample::select(vec![(2usize, 1usize), (2, 2), (2, 3), (3, 1), (3, 2)]))
        .prop_map(|(p, (n, d))| (p, n, d))
}

fn matrix(p: u64, n: usize, d: usize, seed: u64) -> HyperMatrix {
    let ctx = FieldCtx::gf(p).unwrap();
    let dim = n.pow(d as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HyperMatrix::new(n, d, DenseMatrix::random(dim, dim, ctx, &mut rng).unwrap()).unwrap()
}

fn kappa(d: usize, mask: u64) -> Kappa {
    Kappa::from_mask(d, mask & ((1 << d) - 1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transposes_compose_by_symmetric_difference((p, n, d) in shape(), seed: u64, a: u64, b: u64) {
        let m = matrix(p, n, d, seed);
        let (ka, kb) = (kappa(d, a), kappa(d, b));
        let twice = partial_transpose(&partial_transpose(&m, &ka).unwrap(), &kb).unwrap();
        prop_assert_eq!(&twice, &partial_transpose(&m, &ka.sym_diff(&kb)).unwrap());
        prop_assert_eq!(&partial_transpose(&partial_transpose(&m, &ka).unwrap(), &ka).unwrap(), &m);
    }

    #[test]
    fn full_transpose_is_the_ordinary_one((p, n, d) in shape(), seed: u64) {
        let m = matrix(p, n, d, seed);
        prop_assert_eq!(partial_transpose(&m, &Kappa::full(d)).unwrap(), m.transpose());
        prop_assert_eq!(partial_transpose(&m, &Kappa::empty(d)).unwrap(), m);
    }

    #[test]
    fn complement_keeps_the_rank((p, n, d) in shape(), seed: u64, mask: u64) {
        let m = matrix(p, n, d, seed);
        let k = kappa(d, mask);
        prop_assert_eq!(transpose_rank(&m, &k).unwrap(), transpose_rank(&m, &k.complement()).unwrap());
    }

    #[test]
    fn local_changes_of_basis_keep_transpose_ranks((p, n, d) in shape(), seed: u64) {
        let m = matrix(p, n, d, seed);
        let bs: Vec<DenseMatrix> =
            (0..d).map(|i| DenseMatrix::random_nonsingular(n, *m.ctx(), seed ^ i as u64).unwrap()).collect();
        let (moved, _) = kron_act(&m, &bs, None).unwrap();
        for k in all_kappas(d) {
            prop_assert_eq!(transpose_rank(&m, &k).unwrap(), transpose_rank(&moved, &k).unwrap());
        }
    }

    #[test]
    fn search_certificates_verify((p, n, d) in shape(), seed: u64, pick in 0usize..3) {
        let m = matrix(p, n, d, seed);
        let strategy = [Search::SingleKappa, Search::GreedyPeel, Search::RestartLocal][pick];
        let cert = pt_rank_search(&m, strategy, seed).unwrap();
        let v = verify_pt_certificate(&cert).unwrap();
        prop_assert!(v >= usize::from(!m.is_zero()));
        prop_assert!(v <= m.rank());
    }

    #[test]
    fn json_round_trips((p, n, d) in shape(), seed: u64) {
        let m = matrix(p, n, d, seed);
        prop_assert_eq!(&HyperMatrix::from_json(&m.to_json()).unwrap(), &m);
        let cert = pt_rank_search(&m, Search::GreedyPeel, seed).unwrap();
        let back = ptrank_core::ptcore::PTCertificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(back, cert);
        let ctx = parse_field(&field_descriptor(m.ctx())).unwrap();
        prop_assert_eq!(&ctx, m.ctx());
    }

    #[test]
    fn odd_characteristic_certificates_become_sums_of_squares(p in prop::sample::select(vec![3u64, 5, 7]), seed: u64) {
        let m = matrix(p, 2, 2, seed);
        let sym = m.add(&m.transpose()).unwrap();
        let cert = pt_rank_search(&sym, Search::GreedyPeel, seed).unwrap();
        let v = verify_pt_certificate(&cert).unwrap();
        let sos = pt_to_sos(&cert).unwrap();
        prop_assert!(verify_sos(&sym, &sos).unwrap());
        prop_assert!(sos.len() <= 4 * v + 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_value_sits_below_every_heuristic(seed: u64) {
        let m = matrix(2, 2, 2, seed);
        let (exact, cert) = pt_rank_exact(&m).unwrap();
        prop_assert_eq!(verify_pt_certificate(&cert).unwrap(), exact);
        for s in [Search::SingleKappa, Search::GreedyPeel, Search::RestartLocal] {
            let upper = verify_pt_certificate(&pt_rank_search(&m, s, seed).unwrap()).unwrap();
            prop_assert!(exact <= upper, "{} > {} ({:?})", exact, upper, s);
        }
    }

    #[test]
    fn parse_field_never_panics(s in "\\PC{0,24}") {
        let _ = parse_field(&s);
    }
}
