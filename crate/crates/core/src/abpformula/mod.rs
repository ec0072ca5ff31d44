//! Ordered branching programs, set-multilinear formulas, and the bounds
//! connecting them to PT-rank and ρ.

mod abp;
mod cut;
mod formula;
mod harness;

pub use abp::{abp_eval, abp_for_imm, abp_for_imm_slice, OrderedABP};
pub use cut::{abp_middle_cut, abp_to_pt_cert, AbpBound, MiddleCut};
pub use formula::{formula_eval, imm_formula, imm_slice_formula, random_formula, SmFormula, SmNode};
pub use harness::{
    main_theorem_check, main_theorem_harness, trial_seed, HarnessReport, HarnessTrial, MainTheoremReport,
    ShiftedCheck, HARNESS_SHAPES,
};
