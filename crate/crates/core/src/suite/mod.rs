//! The end-to-end verification suite: twelve criteria, each a list of named
//! steps, with optional fault injection.

mod criteria;
mod ptlemmas;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ptcore::DEFAULT_BUDGET;

pub use criteria::corrupt_base_identity;
pub use ptlemmas::{pt_lemma_check, pt_lemma_suite, PT_LEMMAS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip one coefficient of the built-in composition identity before it
    /// is used.
    CorruptBaseIdentity,
}

impl Fault {
    pub fn parse(s: &str) -> Result<Fault> {
        match s {
            "corrupt-base-identity" => Ok(Fault::CorruptBaseIdentity),
            _ => Err(Error::InvalidArgument(format!("unknown fault {s:?}; known: corrupt-base-identity"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub budget: u128,
    pub lemma_trials: u64,
    /// Group names or criterion numbers; empty runs everything.
    pub only: Vec<String>,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 1, budget: DEFAULT_BUDGET, lemma_trials: 200, only: Vec::new(), fault: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub id: u8,
    pub group: &'static str,
    pub key: &'static str,
    pub claim: &'static str,
}

pub const GROUPS: [&str; 7] = ["pt", "sos", "candidates", "lemmas", "rho", "abp", "io"];

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, group: "pt", key: "identity-pt-rank", claim: "I_4 over GF(2) has PT-rank 2; the two-part split verifies" },
    Criterion { id: 2, group: "pt", key: "swap-pt-basic", claim: "the 9×9 swap matrix is PT-basic via κ = {1} and has rank 9" },
    Criterion { id: 3, group: "sos", key: "sos-compose", claim: "two-term SoS for I over [2]^d, d ∈ {2, 4}; SoS → PT value ≤ 2^d" },
    Criterion { id: 4, group: "sos", key: "pt-to-sos", claim: "PT certificates of I_4 over GF(3) give SoS certificates with ≤ 4v + 2 terms" },
    Criterion { id: 5, group: "candidates", key: "cyclic-rank-one", claim: "cyclic W_T at n = 5, d = 2 has rank(W^⊤{1}) = 1 with exact u vᵀ" },
    Criterion { id: 6, group: "candidates", key: "cauchy-full-rank", claim: "Cauchy W_T at n = 5, d = 2 has full partial-transpose and λ-flattening ranks" },
    Criterion { id: 7, group: "lemmas", key: "lemma-suite", claim: "randomized lemma checks report zero failures" },
    Criterion { id: 8, group: "rho", key: "rho-pt-identity", claim: "n^{d+1}·ρ(Padded(M)) equals the PT-rank of M" },
    Criterion { id: 9, group: "pt", key: "census", claim: "exhaustive GF(2) census at n = d = 2: one zero, majority ≥ 2" },
    Criterion { id: 10, group: "abp", key: "abp-pipeline", claim: "IMM programs evaluate correctly; the middle cut yields verified PT certificates" },
    Criterion { id: 11, group: "abp", key: "formula-harness", claim: "random formulas and the IMM formula meet both leaf-count bounds" },
    Criterion { id: 12, group: "io", key: "round-trip", claim: "every JSON kind round-trips on 100 random objects" },
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub group: String,
    pub key: String,
    pub claim: String,
    pub passed: bool,
    pub steps: Vec<Step>,
    pub millis: u64,
}

impl CriterionOutcome {
    pub fn failed_steps(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| !s.passed)
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}.{}: {} ({} ms)", self.id, self.group, self.key, self.claim, self.millis)?;
        for s in self.failed_steps() {
            write!(f, "\n       failed step {}: {}", s.name, s.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub fault: Option<Fault>,
    pub outcomes: Vec<CriterionOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failed(&self) -> Vec<&CriterionOutcome> {
        self.outcomes.iter().filter(|o| !o.passed).collect()
    }

    /// The report with every timing field zeroed.
    pub fn without_timing(&self) -> SuiteReport {
        let mut r = self.clone();
        for o in &mut r.outcomes {
            o.millis = 0;
        }
        r
    }
}

/// Criteria matching `only` (group names or numbers), in numeric order.
pub fn select(only: &[String]) -> Result<Vec<Criterion>> {
    if only.is_empty() {
        return Ok(CRITERIA.to_vec());
    }
    let mut picked = Vec::new();
    for sel in only {
        let hits: Vec<Criterion> = match sel.parse::<u8>() {
            Ok(id) => CRITERIA.iter().filter(|c| c.id == id).copied().collect(),
            Err(_) => CRITERIA.iter().filter(|c| c.group == sel || c.key == sel).copied().collect(),
        };
        if hits.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no criterion matches {sel:?}; use 1-12, a key, or one of {}",
                GROUPS.join(", ")
            )));
        }
        picked.extend(hits);
    }
    picked.sort_by_key(|c| c.id);
    picked.dedup();
    Ok(picked)
}

pub fn run_criterion(c: &Criterion, cfg: &SuiteConfig) -> CriterionOutcome {
    let start = Instant::now();
    let steps = criteria::run(c.id, cfg);
    CriterionOutcome {
        id: c.id,
        group: c.group.to_string(),
        key: c.key.to_string(),
        claim: c.claim.to_string(),
        passed: !steps.is_empty() && steps.iter().all(|s| s.passed),
        steps,
        millis: start.elapsed().as_millis() as u64,
    }
}

/// Runs the selected criteria in parallel; outcomes are in numeric order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let chosen = select(&cfg.only)?;
    let outcomes = chosen.par_iter().map(|c| run_criterion(c, cfg)).collect();
    Ok(SuiteReport { seed: cfg.seed, fault: cfg.fault, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection() {
        assert_eq!(select(&[]).unwrap().len(), 12);
        let pt: Vec<u8> = select(&["pt".into()]).unwrap().iter().map(|c| c.id).collect();
        assert_eq!(pt, vec![1, 2, 9]);
        let mixed: Vec<u8> = select(&["12".into(), "sos".into(), "3".into()]).unwrap().iter().map(|c| c.id).collect();
        assert_eq!(mixed, vec![3, 4, 12]);
        assert!(select(&["nope".into()]).is_err());
        assert!(select(&["13".into()]).is_err());
        for g in GROUPS {
            assert!(!select(&[g.to_string()]).unwrap().is_empty());
        }
    }

    #[test]
    fn fault_names() {
        assert_eq!(Fault::parse("corrupt-base-identity").unwrap(), Fault::CorruptBaseIdentity);
        assert!(Fault::parse("x").is_err());
    }

    #[test]
    fn fault_hits_only_the_sos_chain() {
        let mut cfg = SuiteConfig { only: vec!["sos".into(), "10".into()], ..SuiteConfig::default() };
        let clean = run_suite(&cfg).unwrap();
        assert!(clean.passed(), "{:?}", clean.failed());
        cfg.fault = Some(Fault::CorruptBaseIdentity);
        let hurt = run_suite(&cfg).unwrap();
        let failed: Vec<u8> = hurt.failed().iter().map(|o| o.id).collect();
        assert_eq!(failed, vec![3, 10]);
        for o in hurt.failed() {
            assert!(o.failed_steps().all(|s| s.name.starts_with("sos-to-pt chain")), "{o}");
        }
    }

    #[test]
    fn reports_repeat_without_timing() {
        let cfg = SuiteConfig { only: vec!["1".into(), "2".into(), "5".into()], ..SuiteConfig::default() };
        let a = run_suite(&cfg).unwrap().without_timing();
        let b = run_suite(&cfg).unwrap().without_timing();
        assert_eq!(a, b);
        assert!(a.passed());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<SuiteReport>(&json).unwrap(), a);
    }
}
