use ptrank_core::abpformula::{abp_eval, abp_for_imm, abp_for_imm_slice, abp_to_pt_cert};
use ptrank_core::candidates::{build_wt, cauchy_t, cyclic_t, wt_kappa_rank_scan, Policy};
use ptrank_core::pathmeasures::rho_pt_identity_check;
use ptrank_core::ptcore::{
    identity_split, is_pt_basic, partial_transpose, pt_rank_exact, swap_matrix, verify_pt_certificate, Kappa,
};
use ptrank_core::soslink::{compose_sos, pt_to_sos, sos_to_pt, verify_sos};
use ptrank_core::tensorspace::imm_tensor;
use ptrank_core::{FieldCtx, HyperMatrix, Scalar};

/// Partial transpose straight from the index definition, for n = 3, d = 2.
fn swap_blocks(m: &HyperMatrix, block: usize) -> HyperMatrix {
    let (n, d) = (m.n(), m.d());
    HyperMatrix::from_fn(n, d, *m.ctx(), |i, j| {
        let (mut i, mut j) = (i.to_vec(), j.to_vec());
        std::mem::swap(&mut i[block - 1], &mut j[block - 1]);
        m.get(&i, &j)
    })
    .unwrap()
}

#[test]
fn swap_matrix_against_index_definition() {
    let ctx = FieldCtx::gf(5).unwrap();
    let s = swap_matrix(3, ctx).unwrap();
    for i in 0..9 {
        for j in 0..9 {
            let (a, b) = (i / 3, i % 3);
            let expect = u64::from(j == b * 3 + a);
            assert_eq!(s.body().get(i, j), Scalar::Fp(expect), "({i}, {j})");
        }
    }
    let k = Kappa::new(2, &[1]).unwrap();
    let flipped = partial_transpose(&s, &k).unwrap();
    assert_eq!(flipped, swap_blocks(&s, 1));
    assert_eq!(flipped.rank(), 1);
    assert_eq!(is_pt_basic(&s), (true, Some(k)));
}

#[test]
fn one_block_matrices_have_pt_rank_equal_to_rank() {
    let ctx = FieldCtx::gf(2).unwrap();
    for bits in 0..16i64 {
        let vals: Vec<i64> = (0..4).map(|k| bits >> k & 1).collect();
        let m = HyperMatrix::from_ints(2, 1, ctx, &vals).unwrap();
        let (v, cert) = pt_rank_exact(&m).unwrap();
        assert_eq!(v, m.rank(), "{vals:?}");
        assert_eq!(verify_pt_certificate(&cert).unwrap(), v);
    }
}

#[test]
fn identity_split_matches_the_oracle() {
    let ctx = FieldCtx::gf(2).unwrap();
    let i4 = HyperMatrix::identity(2, 2, ctx).unwrap();
    let (v, _) = pt_rank_exact(&i4).unwrap();
    let split = identity_split(ctx).unwrap();
    assert_eq!(split.target(), &i4);
    assert_eq!(verify_pt_certificate(&split).unwrap(), v);
}

#[test]
fn composed_identity_survives_both_conversions() {
    for p in [3, 5, 7] {
        let ctx = FieldCtx::gf(p).unwrap();
        for d in [2, 4] {
            let i = HyperMatrix::identity(2, d, ctx).unwrap();
            let sos = compose_sos(2, d, ctx).unwrap();
            assert!(verify_sos(&i, &sos).unwrap(), "p = {p}, d = {d}");
            let pt = sos_to_pt(&i, &sos).unwrap();
            let v = verify_pt_certificate(&pt).unwrap();
            assert!(v <= 1 << d);
            let back = pt_to_sos(&pt).unwrap();
            assert!(verify_sos(&i, &back).unwrap());
            assert!(back.len() <= 4 * v + 2);
        }
    }
}

#[test]
fn imm_programs_and_middle_cut() {
    let ctx = FieldCtx::gf(3).unwrap();
    for d in 1..=3 {
        assert_eq!(abp_eval(&abp_for_imm(2, d, ctx).unwrap()).unwrap(), imm_tensor(2, d, ctx).unwrap());
    }
    let i = HyperMatrix::identity(2, 2, ctx).unwrap();
    let bound = abp_to_pt_cert(&abp_for_imm_slice(2, 3, ctx).unwrap(), &i, None).unwrap();
    let v = verify_pt_certificate(&bound.certificate).unwrap();
    assert!(v <= bound.claimed_bound, "{v} > {}", bound.claimed_bound);
}

#[test]
fn candidate_ranks_agree_between_exact_and_floating_contexts() {
    let (qa, _) = FieldCtx::cycmod_pair(5).unwrap();
    let cx = FieldCtx::complex(1e-9).unwrap();
    for t in [cauchy_t(2, 5, Policy::Strict).unwrap(), cyclic_t(5, 2, Policy::Strict).unwrap()] {
        let exact: Vec<usize> = wt_kappa_rank_scan(&build_wt(&t, qa).unwrap()).into_iter().map(|x| x.1).collect();
        let float: Vec<usize> = wt_kappa_rank_scan(&build_wt(&t, cx).unwrap()).into_iter().map(|x| x.1).collect();
        assert_eq!(exact, float);
    }
}

#[test]
fn rho_identity_on_small_matrices() {
    let ctx = FieldCtx::gf(2).unwrap();
    for vals in [[1, 0, 0, 0], [1, 0, 0, 1], [0, 1, 1, 0], [1, 1, 1, 1]] {
        let m = HyperMatrix::from_ints(2, 1, ctx, &vals).unwrap();
        let rep = rho_pt_identity_check(&m, 1 << 24).unwrap();
        assert!(rep.holds(), "{vals:?}");
        assert_eq!(rep.pt_rank, m.rank());
    }
}
