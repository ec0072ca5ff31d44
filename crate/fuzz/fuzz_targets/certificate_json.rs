#![no_main]

use libfuzzer_sys::fuzz_target;
use ptrank_core::io::Json;
use ptrank_core::ptcore::{verify_pt_certificate, PTCertificate};
use ptrank_core::soslink::{verify_sos, SoSCertificate};
use ptrank_core::HyperMatrix;

// Verifiers must reject bad certificates with an error, never a panic.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = PTCertificate::from_json(s) {
        assert_eq!(PTCertificate::from_json(&c.to_json()).unwrap(), c);
        if c.target().dim() <= 16 {
            let _ = verify_pt_certificate(&c);
        }
    }
    if let Ok(c) = SoSCertificate::from_json(s) {
        assert_eq!(SoSCertificate::from_json(&c.to_json()).unwrap(), c);
        if c.n().checked_pow(c.d() as u32).is_some_and(|dim| dim <= 16) {
            if let Ok(i) = HyperMatrix::identity(c.n(), c.d(), *c.ctx()) {
                let _ = verify_sos(&i, &c);
            }
        }
    }
});
