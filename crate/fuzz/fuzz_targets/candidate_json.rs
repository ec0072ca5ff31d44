#![no_main]

use libfuzzer_sys::fuzz_target;
use ptrank_core::candidates::{build_wt, TriangularReport};
use ptrank_core::io::{CandidateSpec, Json};
use ptrank_core::pathmeasures::LemmaReport;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = CandidateSpec::from_json(s) {
        let again = CandidateSpec::from_json(&c.to_json()).unwrap();
        assert_eq!(again.t, c.t);
        if c.t.n().pow(c.t.d() as u32) <= 64 {
            let _ = build_wt(&c.t, c.ctx);
        }
    }
    let _ = LemmaReport::from_json(s);
    let _ = TriangularReport::from_json(s);
});
