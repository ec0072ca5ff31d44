#![no_main]

use libfuzzer_sys::fuzz_target;
use ptrank_core::abpformula::{abp_eval, formula_eval, OrderedABP, SmFormula};
use ptrank_core::io::Json;
use ptrank_core::pathmeasures::PathGraph;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = OrderedABP::from_json(s) {
        assert_eq!(OrderedABP::from_json(&p.to_json()).unwrap(), p);
        if s.len() < 2048 {
            let _ = abp_eval(&p);
        }
    }
    if let Ok(f) = SmFormula::from_json(s) {
        assert_eq!(SmFormula::from_json(&f.to_json()).unwrap(), f);
        if s.len() < 2048 {
            let _ = formula_eval(&f);
        }
    }
    if let Ok(g) = PathGraph::from_json(s) {
        assert_eq!(PathGraph::from_json(&g.to_json()).unwrap(), g);
    }
});
