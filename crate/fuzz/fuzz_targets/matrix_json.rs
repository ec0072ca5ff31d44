#![no_main]

use libfuzzer_sys::fuzz_target;
use ptrank_core::io::Json;
use ptrank_core::ptcore::transpose_rank_scan;
use ptrank_core::{HyperMatrix, Tensor};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = HyperMatrix::from_json(s) {
        assert_eq!(HyperMatrix::from_json(&m.to_json()).unwrap(), m);
        if m.dim() <= 16 {
            let _ = transpose_rank_scan(&m);
        }
    }
    if let Ok(t) = Tensor::from_json(s) {
        assert_eq!(Tensor::from_json(&t.to_json()).unwrap(), t);
    }
});
