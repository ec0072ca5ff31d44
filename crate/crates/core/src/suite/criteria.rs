//! Runners for the individual criteria. A step that errors counts as failed
//! and keeps the error text as its detail.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abpformula::{abp_eval, abp_for_imm, abp_for_imm_slice, abp_to_pt_cert, imm_formula, main_theorem_check, main_theorem_harness};
use crate::candidates::{
    build_wt, cauchy_t, cyclic_rank1_cert, cyclic_t, lambda_full_rank, wt_kappa_rank_scan, wt_lambda_flatten_rank,
    Policy,
};
use crate::error::Result;
use crate::fieldlinalg::{DenseMatrix, FieldCtx};
use crate::io::{roundtrip_census, RATIONAL_PRIME};
use crate::pathmeasures::{lemma_suite, rho_pt_identity_check, LemmaReport};
use crate::ptcore::{
    identity_split, is_pt_basic, partial_transpose, pt_rank_exact, pt_rank_exact_with_budget, ptrank_census,
    swap_matrix, verify_pt_certificate, CensusMode, Kappa, Population, SWAP_3,
};
use crate::soslink::hurwitz::compose_with;
use crate::soslink::{base_identity, pt_to_sos, sos_to_pt, verify_sos, SoSCertificate};
use crate::tensorspace::{imm_tensor, HyperMatrix};

use super::ptlemmas::pt_lemma_suite;
use super::{Fault, Step, SuiteConfig};

struct Steps(Vec<Step>);

impl Steps {
    fn check(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        let (passed, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.0.push(Step { name: name.into(), passed, detail });
    }
}

fn gf(p: u64) -> Result<FieldCtx> {
    FieldCtx::gf(p)
}

/// The built-in identity over `[n]²` with one coefficient changed.
pub fn corrupt_base_identity(n: usize, ctx: FieldCtx) -> Result<SoSCertificate> {
    let base = base_identity(n, ctx)?;
    let mut terms = base.terms().to_vec();
    let bumped = ctx.add(terms[0].get(0), ctx.one());
    terms[0].set(0, bumped);
    SoSCertificate::new(n, 2, ctx, terms, "corrupted composition identity")
}

fn base_for(cfg: &SuiteConfig, n: usize, ctx: FieldCtx) -> Result<SoSCertificate> {
    match cfg.fault {
        Some(Fault::CorruptBaseIdentity) => corrupt_base_identity(n, ctx),
        None => base_identity(n, ctx),
    }
}

pub(super) fn run(id: u8, cfg: &SuiteConfig) -> Vec<Step> {
    let mut s = Steps(Vec::new());
    match id {
        1 => identity_pt_rank(&mut s),
        2 => swap_pt_basic(&mut s),
        3 => sos_compose(&mut s, cfg),
        4 => pt_to_sos_counts(&mut s, cfg),
        5 => cyclic_rank_one(&mut s),
        6 => cauchy_full_rank(&mut s),
        7 => lemmas(&mut s, cfg),
        8 => rho_identity(&mut s, cfg),
        9 => census(&mut s, cfg),
        10 => abp_pipeline(&mut s, cfg),
        11 => formula_harness(&mut s, cfg),
        12 => round_trip(&mut s, cfg),
        _ => s.check("criterion", || Ok((false, format!("no criterion {id}")))),
    }
    s.0
}

fn identity_pt_rank(s: &mut Steps) {
    s.check("exact oracle", || {
        let id = HyperMatrix::identity(2, 2, gf(2)?)?;
        let (v, cert) = pt_rank_exact(&id)?;
        let checked = verify_pt_certificate(&cert)?;
        Ok((v == 2 && checked == 2, format!("value {v}, witness verifies with {checked}; {}", cert.metadata())))
    });
    s.check("explicit split mod 2", || {
        let cert = identity_split(gf(2)?)?;
        let v = verify_pt_certificate(&cert)?;
        Ok((v == 2, format!("{} parts, value {v}", cert.parts().len())))
    });
}

fn swap_pt_basic(s: &mut Steps) {
    s.check("literal matches construction", || {
        let ctx = gf(2)?;
        let flat: Vec<i64> = SWAP_3.iter().flatten().copied().collect();
        let m = HyperMatrix::from_ints(3, 2, ctx, &flat)?;
        Ok((m == swap_matrix(3, ctx)?, "9×9 array vs swap on [3]²".into()))
    });
    for p in [2, 3, RATIONAL_PRIME] {
        s.check(format!("PT-basic and rank over GF({p})"), || {
            let m = swap_matrix(3, gf(p)?)?;
            let (basic, k) = is_pt_basic(&m);
            let want = Kappa::new(2, &[1])?;
            let rank = m.rank();
            let kt = partial_transpose(&m, &want)?.rank();
            let shown = k.map_or("none".to_string(), |k| k.to_string());
            Ok((basic && k == Some(want) && rank == 9 && kt == 1, format!("witness {shown}, rank {rank}, rank(M^⊤{{1}}) {kt}")))
        });
    }
}

fn sos_compose(s: &mut Steps, cfg: &SuiteConfig) {
    for (name, p) in [("GF(3)", 3), ("rational", RATIONAL_PRIME)] {
        for d in [2, 4] {
            let mut composed = None;
            s.check(format!("sos-to-pt chain: compose d = {d} over {name}"), || {
                let ctx = gf(p)?;
                let sos = compose_with(&base_for(cfg, 2, ctx)?, d)?;
                let ok = verify_sos(&HyperMatrix::identity(2, d, ctx)?, &sos)?;
                let terms = sos.len();
                composed = Some(sos);
                Ok((ok && terms == 2, format!("{terms} terms, verifier {}", if ok { "accepts" } else { "rejects" })))
            });
            s.check(format!("sos-to-pt chain: certificate d = {d} over {name}"), || {
                let ctx = gf(p)?;
                let sos = match composed.take() {
                    Some(x) => x,
                    None => compose_with(&base_for(cfg, 2, ctx)?, d)?,
                };
                let cert = sos_to_pt(&HyperMatrix::identity(2, d, ctx)?, &sos)?;
                let v = verify_pt_certificate(&cert)?;
                let bound = (1 << (d - 1)) * 2;
                Ok((v <= bound, format!("value {v} ≤ {bound}")))
            });
        }
    }
}

fn pt_to_sos_counts(s: &mut Steps, cfg: &SuiteConfig) {
    let run = |cert: crate::ptcore::PTCertificate| -> Result<(bool, String)> {
        let v = verify_pt_certificate(&cert)?;
        let sos = pt_to_sos(&cert)?;
        let ok = verify_sos(cert.target(), &sos)?;
        let bound = 4 * v + 2;
        Ok((ok && sos.len() <= bound, format!("value {v}: {} terms ≤ {bound}, verifier {ok}", sos.len())))
    };
    s.check("exhaustive GF(3) certificate", || {
        let id = HyperMatrix::identity(2, 2, gf(3)?)?;
        let (v, cert) = pt_rank_exact_with_budget(&id, cfg.budget.max(1 << 26))?;
        let (ok, detail) = run(cert.clone())?;
        Ok((ok && v == 2, format!("oracle value {v}; {detail}; {}", cert.metadata())))
    });
    s.check("explicit split over GF(3)", || run(identity_split(gf(3)?)?));
}

fn candidate_contexts() -> Result<Vec<(String, FieldCtx)>> {
    let (a, b) = FieldCtx::cycmod_pair(5)?;
    Ok(vec![("complex".into(), FieldCtx::complex(1e-9)?), (a.to_string(), a), (b.to_string(), b)])
}

fn cyclic_rank_one(s: &mut Steps) {
    let ctxs = match candidate_contexts() {
        Ok(c) => c,
        Err(e) => return s.check("contexts", || Err(e)),
    };
    for (name, ctx) in ctxs {
        s.check(format!("rank-one transpose in {name}"), || {
            let cert = cyclic_rank1_cert(5, 2, ctx, Policy::Strict)?;
            let w = build_wt(&cyclic_t(5, 2, Policy::Strict)?, ctx)?;
            let k1 = Kappa::new(2, &[1])?;
            let t = partial_transpose(&w, &k1)?;
            let rank = t.rank();
            let mut ok = cert.kappa == k1 && cert.rank == 1 && rank == 1;
            let mut detail = format!("rank(W^⊤{{1}}) = {rank}");
            if ctx.is_finite() {
                let exact = t.body() == &DenseMatrix::outer(&cert.u, &cert.v, ctx);
                ok &= exact;
                detail.push_str(&format!(", u vᵀ entrywise {}", if exact { "exact" } else { "different" }));
            }
            Ok((ok, detail))
        });
    }
}

fn cauchy_full_rank(s: &mut Steps) {
    let ctxs = match candidate_contexts() {
        Ok(c) => c,
        Err(e) => return s.check("contexts", || Err(e)),
    };
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for (name, ctx) in ctxs {
        let mut ranks = Vec::new();
        s.check(format!("ranks in {name}"), || {
            let w = build_wt(&cauchy_t(2, 5, Policy::Strict)?, ctx)?;
            let scan: Vec<usize> = wt_kappa_rank_scan(&w).into_iter().map(|(_, r)| r).collect();
            let mut ok = scan.iter().all(|&r| r == 25);
            let mut lambda = Vec::new();
            for l in [vec![], vec![1], vec![2], vec![1, 2]] {
                let r = wt_lambda_flatten_rank(&w, &l)?;
                ok &= r == lambda_full_rank(5, 2, l.len());
                lambda.push(r);
            }
            ranks = scan.iter().chain(&lambda).copied().collect();
            Ok((ok, format!("κ ranks {scan:?}, λ ranks {lambda:?}")))
        });
        seen.push(ranks);
    }
    s.check("contexts agree", || {
        let agree = seen.windows(2).all(|w| w[0] == w[1]) && seen.iter().all(|r| !r.is_empty());
        Ok((agree, format!("{} contexts", seen.len())))
    });
}

fn lemma_step(s: &mut Steps, reports: Result<Vec<LemmaReport>>) {
    match reports {
        Ok(rs) => {
            for r in rs {
                let detail = r.to_string();
                let witness = r.witness.clone().map(|w| format!("; first witness: {w}")).unwrap_or_default();
                s.0.push(Step { name: r.lemma.clone(), passed: r.passed(), detail: format!("{detail}{witness}") });
            }
        }
        Err(e) => s.check("lemma suite", || Err(e)),
    }
}

fn lemmas(s: &mut Steps, cfg: &SuiteConfig) {
    lemma_step(s, pt_lemma_suite(cfg.seed, cfg.lemma_trials));
    lemma_step(s, lemma_suite(cfg.seed, cfg.lemma_trials));
}

fn rho_identity(s: &mut Steps, cfg: &SuiteConfig) {
    s.check("all 16 GF(2) 2×2 matrices", || {
        let ctx = gf(2)?;
        let mut bad = Vec::new();
        for mask in 0..16i64 {
            let vals: Vec<i64> = (0..4).map(|k| mask >> k & 1).collect();
            let m = HyperMatrix::from_ints(2, 1, ctx, &vals)?;
            let r = rho_pt_identity_check(&m, cfg.budget)?;
            if !(r.holds() && r.scaled_rho() == m.rank() as u128) {
                bad.push(mask);
            }
        }
        Ok((bad.is_empty(), format!("n²·ρ = rank on {} of 16; mismatches {bad:?}", 16 - bad.len())))
    });
    s.check("20 random GF(2) matrices, n = d = 2", || {
        let ctx = gf(2)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut bad = Vec::new();
        let mut routes = Vec::new();
        for k in 0..20 {
            let m = HyperMatrix::new(2, 2, DenseMatrix::random(4, 4, ctx, &mut rng)?)?;
            let r = rho_pt_identity_check(&m, cfg.budget)?;
            let (v, _) = pt_rank_exact(&m)?;
            if !(r.holds() && r.scaled_rho() == v as u128) {
                bad.push(k);
            }
            routes.push(r.route.name());
        }
        routes.dedup();
        Ok((bad.is_empty(), format!("n³·ρ = PT-rank on {} of 20 via {routes:?}; mismatches {bad:?}", 20 - bad.len())))
    });
}

fn census(s: &mut Steps, cfg: &SuiteConfig) {
    s.check("exhaustive histogram", || {
        let c = ptrank_census(2, 2, gf(2)?, CensusMode::Exhaustive, Population::All, cfg.budget)?;
        let total = c.evaluated;
        let high = c.count_at_least(2);
        let ok = total == 65_536 && c.count(0) == 1 && 2 * high > total;
        Ok((ok, format!("{total} matrices, histogram {:?}, {high} with PT-rank ≥ 2", c.histogram)))
    });
}

fn abp_pipeline(s: &mut Steps, cfg: &SuiteConfig) {
    for d in 1..=4 {
        s.check(format!("IMM program d = {d}"), || {
            let ctx = gf(2)?;
            let got = abp_eval(&abp_for_imm(2, d, ctx)?)?;
            let want = imm_tensor(2, d, ctx)?;
            Ok((got == want, format!("{} entries, {} nonzero", want.len(), want.nnz())))
        });
    }
    for fine_d in [2, 4] {
        s.check(format!("sos-to-pt chain via middle cut, I over [2]^{fine_d}"), || {
            let ctx = gf(3)?;
            let side = 1 << (fine_d / 2);
            let provider = base_for(cfg, side, ctx)?;
            let abp = abp_for_imm_slice(2, fine_d + 1, ctx)?;
            let m = HyperMatrix::identity(2, fine_d, ctx)?;
            let b = abp_to_pt_cert(&abp, &m, Some(&provider))?;
            let v = verify_pt_certificate(&b.certificate)?;
            Ok((v <= b.claimed_bound, format!("value {v} ≤ {}; {}", b.claimed_bound, b.certificate.metadata())))
        });
    }
}

fn formula_harness(s: &mut Steps, cfg: &SuiteConfig) {
    s.check("50 random formulas", || {
        let h = main_theorem_harness(50, cfg.seed, cfg.budget)?;
        let bad: Vec<u64> = h.violations().iter().map(|t| t.seed).collect();
        let tight = h.trials.iter().map(|t| t.report.margin()).fold(f64::INFINITY, f64::min);
        Ok((bad.is_empty() && h.trials.len() == 50, format!("{} trials, smallest margin {tight:.3}, violations {bad:?}", h.trials.len())))
    });
    s.check("IMM formula", || {
        let f = imm_formula(2, 2, gf(2)?)?;
        let r = main_theorem_check(&f, cfg.budget)?;
        let shifted = r.shifted.as_ref().map_or("none".into(), |c| format!("PT-rank {} bound {:.3}", c.pt_rank, c.bound));
        Ok((r.holds(), format!("{} leaves, ρ bound {:.3}, shifted {shifted}", r.leaves, r.bound)))
    });
}

fn round_trip(s: &mut Steps, cfg: &SuiteConfig) {
    match roundtrip_census(cfg.seed, 100) {
        Ok(rs) => {
            for r in rs {
                s.0.push(Step {
                    name: r.kind.clone(),
                    passed: r.failures == 0,
                    detail: format!("{} of {} round trips exact", r.trials - r.failures, r.trials),
                });
            }
        }
        Err(e) => s.check("round trips", || Err(e)),
    }
}
