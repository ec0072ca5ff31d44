//! Randomized emit/parse round trips for every JSON type.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abpformula::{random_formula, OrderedABP};
use crate::candidates::{ExponentMatrix, Policy, TriangularReport};
use crate::error::Result;
use crate::fieldlinalg::{DenseMatrix, Entries, FieldCtx, Scalar};
use crate::pathmeasures::{LemmaMode, LemmaReport, PathGraph};
use crate::ptcore::{Kappa, PTCertificate};
use crate::soslink::SoSCertificate;
use crate::tensorspace::{HyperMatrix, Tensor};

use super::wire::{CandidateSpec, Json};

pub const JSON_KINDS: [&str; 10] = [
    "hypermatrix",
    "tensor",
    "pt-certificate",
    "sos-certificate",
    "path-graph",
    "abp",
    "formula",
    "candidate",
    "lemma-report",
    "triangular-report",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub kind: String,
    pub trials: usize,
    pub failures: usize,
}

fn random_ctx<R: Rng>(rng: &mut R) -> FieldCtx {
    match rng.gen_range(0..4) {
        0 => FieldCtx::gf(2).expect("prime"),
        1 => FieldCtx::gf(3).expect("prime"),
        2 => FieldCtx::gf(super::RATIONAL_PRIME).expect("prime"),
        _ => FieldCtx::complex(rng.gen_range(1e-12..1e-6)).expect("positive"),
    }
}

fn random_scalar<R: Rng>(rng: &mut R, ctx: &FieldCtx) -> Scalar {
    match ctx.modulus() {
        Some(p) => Scalar::Fp(rng.gen_range(0..p)),
        None => Scalar::C(num_complex::Complex64::new(rng.gen_range(-1e3..1e3), rng.gen::<f64>() / 7.0)),
    }
}

fn random_entries<R: Rng>(rng: &mut R, ctx: &FieldCtx, len: usize) -> Entries {
    let mut e = Entries::zeros(ctx, len);
    for k in 0..len {
        e.set(k, random_scalar(rng, ctx));
    }
    e
}

fn random_matrix<R: Rng>(rng: &mut R, ctx: FieldCtx, n: usize, d: usize) -> HyperMatrix {
    let dim = n.pow(d as u32);
    let body = DenseMatrix::new(dim, dim, ctx, random_entries(rng, &ctx, dim * dim)).expect("shape");
    HyperMatrix::new(n, d, body).expect("shape")
}

fn one<T: Json + PartialEq>(x: &T) -> bool {
    let text = x.to_json();
    match T::from_json(&text) {
        Ok(back) => back == *x && back.to_json() == text,
        Err(_) => false,
    }
}

fn sample<R: Rng>(kind: &str, rng: &mut R) -> Result<bool> {
    let ctx = random_ctx(rng);
    let (n, d) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
    Ok(match kind {
        "hypermatrix" => one(&random_matrix(rng, ctx, n, d)),
        "tensor" => {
            let order = rng.gen_range(0..=3);
            let labels: Vec<i64> = (0..order).map(|k| k * 3 - rng.gen_range(0..3)).collect();
            let len = n.pow(order as u32);
            one(&Tensor::new(n, labels, ctx, random_entries(rng, &ctx, len))?)
        }
        "pt-certificate" => {
            let target = random_matrix(rng, ctx, n, d);
            let parts = (0..rng.gen_range(0..3))
                .map(|_| (Kappa::from_mask(d, rng.gen_range(0..1 << d)).expect("mask"), random_matrix(rng, ctx, n, d)))
                .collect();
            one(&PTCertificate::new(target, parts, format!("seed \"{}\"\n", rng.gen::<u32>()))?)
        }
        "sos-certificate" => {
            let len = n.pow(d as u32);
            let terms = (0..rng.gen_range(0..4)).map(|_| random_entries(rng, &ctx, len)).collect();
            one(&SoSCertificate::new(n, d, ctx, terms, "ü ⊗ terms")?)
        }
        "path-graph" => {
            let edges: Vec<i64> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(-20..20)).collect();
            one(&PathGraph::new(edges)?)
        }
        "abp" => {
            let layers = rng.gen_range(1..4);
            let widths: Vec<usize> = (0..=layers).map(|_| rng.gen_range(1..3)).collect();
            let q = n * n;
            let forms =
                (0..layers).map(|k| (0..widths[k] * widths[k + 1]).map(|_| random_entries(rng, &ctx, q)).collect()).collect();
            let v1 = random_entries(rng, &ctx, widths[0]);
            let v2 = random_entries(rng, &ctx, widths[layers]);
            one(&OrderedABP::new(q, ctx, widths, forms, v1, v2)?)
        }
        "formula" => {
            let finite = if ctx.is_finite() { ctx } else { FieldCtx::gf(5)? };
            let blocks: Vec<i64> = (1..=rng.gen_range(1..5)).collect();
            let alphabet = rng.gen_range(1..5);
            one(&random_formula(rng, &blocks, alphabet, finite, 4)?)
        }
        "candidate" => {
            let (n, d) = ([5u64, 7, 11][rng.gen_range(0..3)], 2);
            let t = ExponentMatrix::new(n, d, (0..4).map(|_| rng.gen_range(0..n)).collect(), Policy::Strict)?;
            let spec = CandidateSpec {
                t,
                ctx: FieldCtx::cycmod_above(n, 1 << 20)?,
                policy: if rng.gen() { Policy::Strict } else { Policy::Relaxed },
            };
            one(&spec)
        }
        "lemma-report" => one(&LemmaReport {
            lemma: format!("lemma-{}", rng.gen::<u8>()),
            trials: rng.gen_range(0..500),
            failures: rng.gen_range(0..5),
            witness: rng.gen::<bool>().then(|| format!("{:?}", rng.gen::<[u8; 4]>())),
            mode: if rng.gen() { LemmaMode::Asserted } else { LemmaMode::Observational },
            note: String::new(),
        }),
        "triangular-report" => one(&TriangularReport {
            n,
            d,
            cut_rank: rng.gen_range(0..30),
            bound: n * n,
            abp_width: n,
            abp_pairs: rng.gen::<bool>().then(|| rng.gen_range(0..9)),
            certificate: rng.gen::<bool>().then(|| (rng.gen_range(0..9), rng.gen_range(0..9))),
            note: "x".into(),
        }),
        other => unreachable!("unknown kind {other}"),
    })
}

/// `count` random objects of every kind, emitted, parsed and re-emitted.
pub fn roundtrip_census(seed: u64, count: usize) -> Result<Vec<RoundTrip>> {
    JSON_KINDS
        .iter()
        .enumerate()
        .map(|(k, kind)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let mut failures = 0;
            for _ in 0..count {
                failures += usize::from(!sample(kind, &mut rng)?);
            }
            Ok(RoundTrip { kind: kind.to_string(), trials: count, failures })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_round_trips() {
        for r in roundtrip_census(11, 25).unwrap() {
            assert_eq!(r.failures, 0, "{}", r.kind);
        }
    }
}
