use std::path::{Path, PathBuf};
use std::str::FromStr;

use ptrank_core::abpformula::{abp_eval, abp_to_pt_cert, OrderedABP};
use ptrank_core::candidates::{
    build_wt, cauchy_t, check_params, cyclic_rank1_cert, cyclic_t, identity_t, lambda_full_rank,
    triangular_flattening_check, triangular_t, wt_kappa_rank_scan, wt_lambda_flatten_rank, zero_t, ExponentMatrix,
    Policy,
};
use ptrank_core::io::{field_descriptor, parse_field, CandidateSpec, Json};
use ptrank_core::pathmeasures::{lemma_suite, rho_exact, rho_pt_identity_check, PathGraph, RelValue};
use ptrank_core::ptcore::{
    identity_split, is_pt_basic, partial_transpose, pt_rank_exact_with_budget, pt_rank_search, ptrank_census,
    swap_matrix, symmetric_orbits, transpose_rank_scan, verify_pt_certificate, CensusMode, Kappa, PTCertificate,
    Population, Strategy, DEFAULT_BUDGET,
};
use ptrank_core::soslink::{compose_sos, pt_to_sos, sos_to_pt, verify_sos, SoSCertificate};
use ptrank_core::suite::{run_suite, Fault, SuiteConfig};
use ptrank_core::tensorspace::edge_of_label;
use ptrank_core::{DenseMatrix, Entries, Error, FieldCtx, HyperMatrix, Tensor};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{write_text, CliError, Outcome, Report};
use crate::{AbpCmd, CandidatesCmd, Family, GenArgs, Global, PtCmd, RhoCmd, SosCmd, TFamily, VerifyArgs};

fn field_or(g: &Global, default: &str) -> Result<FieldCtx, CliError> {
    Ok(parse_field(g.field.as_deref().unwrap_or(default))?)
}

fn budget(g: &Global) -> u128 {
    g.budget.unwrap_or(DEFAULT_BUDGET)
}

fn policy(g: &Global) -> Policy {
    if g.relax {
        Policy::Relaxed
    } else {
        Policy::Strict
    }
}

fn parse<T: Json>(r: &mut Report, path: &Path) -> Result<T, CliError> {
    let text = r.read(path)?;
    Ok(T::from_json(&text)?)
}

fn rel(v: &RelValue) -> Value {
    json!({ "rank": v.rank.to_string(), "n": v.n, "exp": v.exp, "text": v.to_string(), "approx": v.to_f64() })
}

fn kappa_list(k: &Kappa) -> Value {
    json!(k.members())
}

/// Writes the certificate next to the report when a path is given,
/// otherwise embeds it.
fn attach_cert(result: &mut Value, cert_json: String, cert_out: Option<&PathBuf>) -> Result<(), CliError> {
    match cert_out {
        Some(p) => {
            write_text(Some(p), &cert_json)?;
            result["certificate_path"] = json!(p.display().to_string());
        }
        None => {
            result["certificate"] = serde_json::from_str(&cert_json).expect("emitted JSON parses");
        }
    }
    Ok(())
}

fn exponent_matrix(family: TFamily, n: usize, d: usize, policy: Policy) -> Result<ExponentMatrix, CliError> {
    let n = n as u64;
    Ok(match family {
        TFamily::Zero => zero_t(n, d, policy)?,
        TFamily::Identity => identity_t(n, d, policy)?,
        TFamily::Cyclic => cyclic_t(n, d, policy)?,
        TFamily::Triangular => triangular_t(n, d, policy)?,
        TFamily::Cauchy => cauchy_t(d, n, policy)?,
    })
}

fn family_name(f: TFamily) -> &'static str {
    match f {
        TFamily::Zero => "zero",
        TFamily::Identity => "identity",
        TFamily::Cyclic => "cyclic",
        TFamily::Triangular => "triangular",
        TFamily::Cauchy => "cauchy",
    }
}

pub fn gen(g: &Global, a: &GenArgs) -> Result<Outcome, CliError> {
    let ctx = field_or(g, "gf2")?;
    let (n, d) = (a.n, a.d);
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let text = match a.family {
        Family::Identity => HyperMatrix::identity(n, d, ctx)?.to_json(),
        Family::Random => {
            let dim = HyperMatrix::zeros(n, d, ctx)?.dim();
            HyperMatrix::new(n, d, DenseMatrix::random(dim, dim, ctx, &mut rng)?)?.to_json()
        }
        Family::RandomFullySymmetric => {
            let p = ctx.require_finite()?;
            let dim = HyperMatrix::zeros(n, d, ctx)?.dim();
            let mut data = vec![0u64; dim * dim];
            for orbit in symmetric_orbits(n, d) {
                let x = rand_chacha::rand_core::RngCore::next_u64(&mut rng) % p;
                for pos in orbit {
                    data[pos] = x;
                }
            }
            HyperMatrix::new(n, d, DenseMatrix::new(dim, dim, ctx, Entries::Fp(data))?)?.to_json()
        }
        Family::Example3Squared => swap_matrix(3, ctx)?.to_json(),
        Family::ExampleIdentityDecomposition => identity_split(ctx)?.to_json(),
        Family::Wt => build_wt(&exponent_matrix(a.t_family, n, d, policy(g))?, ctx)?.to_json(),
    };
    Ok(Outcome::Object(text))
}

pub fn pt(g: &Global, c: PtCmd) -> Result<Outcome, CliError> {
    let b = budget(g);
    match c {
        PtCmd::Rank { input } => {
            let mut r = Report::new("pt rank", g, b);
            let m: HyperMatrix = parse(&mut r, &input)?;
            r.set_field(field_descriptor(m.ctx()));
            let scan: Vec<Value> =
                transpose_rank_scan(&m).iter().map(|(k, rk)| json!({ "kappa": kappa_list(k), "rank": rk })).collect();
            let (basic, witness) = is_pt_basic(&m);
            let result = json!({
                "n": m.n(), "d": m.d(), "rank": m.rank(), "transpose_ranks": scan,
                "pt_basic": basic, "witness": witness.map(|k| kappa_list(&k)),
            });
            Ok(r.finish(true, result))
        }
        PtCmd::Transpose { input, kappa } => {
            let mut r = Report::new("pt transpose", g, b);
            let m: HyperMatrix = parse(&mut r, &input)?;
            let k = Kappa::new(m.d(), &kappa)?;
            Ok(Outcome::Object(partial_transpose(&m, &k)?.to_json()))
        }
        PtCmd::Exact { input, cert_out } => {
            let mut r = Report::new("pt exact", g, b);
            let m: HyperMatrix = parse(&mut r, &input)?;
            r.set_field(field_descriptor(m.ctx()));
            let (value, cert) = pt_rank_exact_with_budget(&m, b)?;
            let checked = verify_pt_certificate(&cert)?;
            let mut result = json!({ "value": value, "verified_value": checked, "metadata": cert.metadata() });
            attach_cert(&mut result, cert.to_json(), cert_out.as_ref())?;
            Ok(r.finish(checked == value, result))
        }
        PtCmd::Search { input, strategy, cert_out } => {
            let strategy = Strategy::from_str(&strategy).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut r = Report::new("pt search", g, b);
            let m: HyperMatrix = parse(&mut r, &input)?;
            r.set_field(field_descriptor(m.ctx()));
            let cert = pt_rank_search(&m, strategy, g.seed)?;
            let value = verify_pt_certificate(&cert)?;
            let mut result = json!({ "strategy": strategy.name(), "upper_bound": value, "metadata": cert.metadata() });
            attach_cert(&mut result, cert.to_json(), cert_out.as_ref())?;
            Ok(r.finish(true, result))
        }
        PtCmd::Census { n, d, sample, fully_symmetric } => {
            let ctx = field_or(g, "gf2")?;
            let mut r = Report::new("pt census", g, b);
            r.set_field(field_descriptor(&ctx));
            let mode = match sample {
                Some(count) => CensusMode::Sample { count, seed: g.seed },
                None => CensusMode::Exhaustive,
            };
            let population = if fully_symmetric { Population::FullySymmetric } else { Population::All };
            let c = ptrank_census(n, d, ctx, mode, population, b)?;
            let histogram: serde_json::Map<String, Value> =
                c.histogram.iter().map(|(v, k)| (v.to_string(), json!(k))).collect();
            let result = json!({
                "n": n, "d": d,
                "mode": if sample.is_some() { "sample" } else { "exhaustive" },
                "population": population.to_string(),
                "population_size": c.population_size.to_string(),
                "evaluated": c.evaluated,
                "histogram": histogram,
                "zero_count": c.count(0),
                "at_least_two": c.count_at_least(2),
                "identity_value": c.identity_value,
            });
            Ok(r.finish(true, result))
        }
        PtCmd::Verify { cert } => {
            let mut r = Report::new("pt verify", g, b);
            let cert: PTCertificate = parse(&mut r, &cert)?;
            r.set_field(field_descriptor(cert.target().ctx()));
            match verify_pt_certificate(&cert) {
                Ok(v) => Ok(r.finish(true, json!({ "valid": true, "value": v }))),
                Err(e @ (Error::InvalidCertificate(_) | Error::VerificationFailed(_))) => {
                    Ok(r.finish(false, json!({ "valid": false, "reason": e.to_string() })))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn matrix_or_identity(r: &mut Report, path: Option<&PathBuf>, sos: &SoSCertificate) -> Result<HyperMatrix, CliError> {
    match path {
        Some(p) => parse(r, p),
        None => Ok(HyperMatrix::identity(sos.n(), sos.d(), *sos.ctx())?),
    }
}

pub fn sos(g: &Global, c: SosCmd) -> Result<Outcome, CliError> {
    let b = budget(g);
    match c {
        SosCmd::Compose { n, d } => {
            let ctx = field_or(g, "gf:3")?;
            Ok(Outcome::Object(compose_sos(n, d, ctx)?.to_json()))
        }
        SosCmd::Verify { cert, matrix } => {
            let mut r = Report::new("sos verify", g, b);
            let sos: SoSCertificate = parse(&mut r, &cert)?;
            r.set_field(field_descriptor(sos.ctx()));
            let m = matrix_or_identity(&mut r, matrix.as_ref(), &sos)?;
            let accepted = verify_sos(&m, &sos)?;
            let result = json!({
                "accepted": accepted, "terms": sos.len(), "n": sos.n(), "d": sos.d(),
                "against": if matrix.is_some() { "input matrix" } else { "identity" },
            });
            Ok(r.finish(accepted, result))
        }
        SosCmd::ToPt { cert, matrix } => {
            let mut r = Report::new("sos to-pt", g, b);
            let sos: SoSCertificate = parse(&mut r, &cert)?;
            let m = matrix_or_identity(&mut r, matrix.as_ref(), &sos)?;
            let pt = sos_to_pt(&m, &sos)?;
            verify_pt_certificate(&pt)?;
            Ok(Outcome::Object(pt.to_json()))
        }
        SosCmd::FromPt { cert } => {
            let mut r = Report::new("sos from-pt", g, b);
            let pt: PTCertificate = parse(&mut r, &cert)?;
            verify_pt_certificate(&pt)?;
            let sos = pt_to_sos(&pt)?;
            if !verify_sos(pt.target(), &sos)? {
                return Err(Error::VerificationFailed("converted SoS certificate does not verify".into()).into());
            }
            Ok(Outcome::Object(sos.to_json()))
        }
    }
}

pub fn rho(g: &Global, c: RhoCmd) -> Result<Outcome, CliError> {
    let b = budget(g);
    match c {
        RhoCmd::Exact { input, edges } => {
            let mut r = Report::new("rho exact", g, b);
            let a: Tensor = parse(&mut r, &input)?;
            r.set_field(field_descriptor(a.ctx()));
            let edges = if edges.is_empty() { a.labels().iter().map(|&l| edge_of_label(l)).collect() } else { edges };
            let graph = PathGraph::new(edges)?;
            let rho = rho_exact(&a, &graph, b)?;
            let result = json!({
                "edges": graph.edges(), "longest": graph.longest(), "rho": rel(&rho.value),
                "per_gamma": rho.per_gamma.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "worst_gamma": rho.worst_gamma,
            });
            Ok(r.finish(true, result))
        }
        RhoCmd::CheckIdentity { input } => {
            let mut r = Report::new("rho check-identity", g, b);
            let m: HyperMatrix = parse(&mut r, &input)?;
            r.set_field(field_descriptor(m.ctx()));
            let rep = rho_pt_identity_check(&m, b)?;
            let result = json!({
                "n": rep.n, "d": rep.d, "pt_rank": rep.pt_rank, "rho": rel(&rep.rho),
                "scaled_rho": rep.scaled_rho().to_string(), "route": rep.route.name(),
                "certificate_bound": rel(&rep.certificate_bound),
                "search_bound": rep.search_bound.as_ref().map(rel),
                "holds": rep.holds(),
            });
            Ok(r.finish(rep.holds(), result))
        }
        RhoCmd::LemmaSuite { trials } => {
            let r = Report::new("rho lemma-suite", g, b);
            let reports = lemma_suite(g.seed, trials)?;
            let ok = reports.iter().all(|l| l.passed());
            for l in &reports {
                eprintln!("{l}");
            }
            Ok(r.finish(ok, json!({ "trials": trials, "lemmas": reports })))
        }
    }
}

pub fn abp(g: &Global, c: AbpCmd) -> Result<Outcome, CliError> {
    let b = budget(g);
    match c {
        AbpCmd::Eval { input } => {
            let mut r = Report::new("abp eval", g, b);
            let abp: OrderedABP = parse(&mut r, &input)?;
            Ok(Outcome::Object(abp_eval(&abp)?.to_json()))
        }
        AbpCmd::ToPt { abp, matrix, provider, cert_out } => {
            let mut r = Report::new("abp to-pt", g, b);
            let program: OrderedABP = parse(&mut r, &abp)?;
            let m: HyperMatrix = parse(&mut r, &matrix)?;
            r.set_field(field_descriptor(m.ctx()));
            let provider: Option<SoSCertificate> = provider.as_ref().map(|p| parse(&mut r, p)).transpose()?;
            let mut fields = vec![program.ctx(), m.ctx()];
            fields.extend(provider.as_ref().map(|s| s.ctx()));
            if fields.iter().any(|f| *f != m.ctx()) {
                let names: Vec<String> = fields.iter().map(|f| field_descriptor(f)).collect();
                return Err(CliError::Usage(format!("inputs are over different fields: {}", names.join(", "))));
            }
            let bound = abp_to_pt_cert(&program, &m, provider.as_ref())?;
            let value = verify_pt_certificate(&bound.certificate)?;
            let mut result = json!({
                "value": value,
                "claimed_bound": bound.claimed_bound,
                "provider_value": bound.provider_value,
                "cut": {
                    "layer": bound.cut.layer, "terms": bound.cut.terms,
                    "term_bound": bound.cut.term_bound, "pairs": bound.cut.pairs.len(),
                },
                "chain": bound.certificate.metadata(),
            });
            attach_cert(&mut result, bound.certificate.to_json(), cert_out.as_ref())?;
            Ok(r.finish(value <= bound.claimed_bound, result))
        }
    }
}

/// κ ranks in lexicographic order, then (λ, rank) for every λ ⊆ [d].
type RankScan = (Vec<usize>, Vec<(Vec<usize>, usize)>);

fn scan_ranks(w: &HyperMatrix) -> Result<RankScan, CliError> {
    let kappa: Vec<usize> = wt_kappa_rank_scan(w).into_iter().map(|(_, r)| r).collect();
    let d = w.d();
    let mut lambda = Vec::new();
    for mask in 0..1u64 << d {
        let l: Vec<usize> = (1..=d).filter(|k| mask >> (k - 1) & 1 == 1).collect();
        let rank = wt_lambda_flatten_rank(w, &l)?;
        lambda.push((l, rank));
    }
    Ok((kappa, lambda))
}

pub fn candidates(g: &Global, c: CandidatesCmd) -> Result<Outcome, CliError> {
    let b = budget(g);
    let CandidatesCmd::Scan { spec, t_family, n, d } = c;
    let mut r = Report::new("candidates scan", g, b);
    let (t, ctx, policy, family) = match spec {
        Some(p) => {
            let s: CandidateSpec = parse(&mut r, &p)?;
            (s.t, s.ctx, s.policy, "custom".to_string())
        }
        None => {
            let policy = policy(g);
            check_params(n as u64, d, policy)?;
            (exponent_matrix(t_family, n, d, policy)?, field_or(g, "complex")?, policy, family_name(t_family).to_string())
        }
    };
    r.set_field(field_descriptor(&ctx));
    let (n, d) = (t.n() as usize, t.d());
    let w = build_wt(&t, ctx)?;
    let (kappa, lambda) = scan_ranks(&w)?;
    let full = n.pow(d as u32);
    let lambda_json: Vec<Value> = lambda
        .iter()
        .map(|(l, rank)| json!({ "lambda": l, "rank": rank, "full": lambda_full_rank(n, d, l.len()) }))
        .collect();
    let mut result = json!({
        "family": family, "n": n, "d": d, "T": t.entries(),
        "kappa_ranks": kappa, "full_rank": full,
        "all_kappa_full": kappa.iter().all(|&x| x == full),
        "lambda_ranks": lambda_json,
    });
    let mut ok = true;
    if !ctx.is_finite() {
        // Floating-point ranks are confirmed in two cyclotomic contexts.
        let (qa, qb) = FieldCtx::cycmod_pair(n as u64)?;
        let mut confirmations = Vec::new();
        for q in [qa, qb] {
            let ranks = scan_ranks(&build_wt(&t, q)?)?;
            let agree = ranks.0 == kappa && ranks.1 == lambda;
            ok &= agree;
            confirmations.push(json!({ "field": field_descriptor(&q), "agree": agree }));
        }
        result["confirmations"] = json!(confirmations);
    }
    if family == "cyclic" && d % 2 == 0 {
        let cert = cyclic_rank1_cert(n, d, ctx, policy)?;
        result["cyclic"] = json!({ "kappa": kappa_list(&cert.kappa), "rank": cert.rank });
    }
    if family == "triangular" {
        result["triangular"] = serde_json::to_value(triangular_flattening_check(n, d, ctx, policy)?)
            .expect("report serializes");
    }
    Ok(r.finish(ok, result))
}

pub fn verify_paper(g: &Global, a: &VerifyArgs) -> Result<Outcome, CliError> {
    let fault = match &a.inject_fault {
        Some(s) => Some(Fault::parse(s).map_err(|e| CliError::Usage(e.to_string()))?),
        None => None,
    };
    let cfg = SuiteConfig { seed: g.seed, budget: budget(g), lemma_trials: a.trials, only: a.only.clone(), fault };
    let r = Report::new("verify-paper", g, cfg.budget);
    let report = run_suite(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    for o in &report.outcomes {
        eprintln!("{o}");
    }
    let matrix: serde_json::Map<String, Value> =
        report.outcomes.iter().map(|o| (format!("{}.{}", o.group, o.key), json!(o.passed))).collect();
    let ok = report.passed();
    let mut result = serde_json::to_value(&report).expect("suite report serializes");
    result["matrix"] = Value::Object(matrix);
    Ok(r.finish(ok, result))
}
