use crate::error::{Error, Result};
use crate::fieldlinalg::FieldCtx;

/// Modulus of the exact stand-in for rational arithmetic: `2^31 - 1`.
pub const RATIONAL_PRIME: u64 = (1 << 31) - 1;

const DEFAULT_EPS: f64 = 1e-9;

/// Keeps the prime search behind `cycmod:<n>` short.
const MAX_SHORTHAND_ORDER: u64 = 1 << 16;

/// Canonical descriptor: `gf:<p>`, `complex:<eps>` or `cycmod:<q>:<n>:<omega>`.
pub fn field_descriptor(ctx: &FieldCtx) -> String {
    match *ctx {
        FieldCtx::Prime { p } => format!("gf:{p}"),
        FieldCtx::Complex { eps } => format!("complex:{eps:?}"),
        FieldCtx::CycMod { q, n, omega } => format!("cycmod:{q}:{n}:{omega}"),
    }
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

/// Accepts canonical descriptors and the shorthands `gf<p>`, `rational`,
/// `complex` and `cycmod:<n>` (the first context above 2^20).
pub fn parse_field(s: &str) -> Result<FieldCtx> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    match parts.as_slice() {
        ["rational"] | ["q"] => FieldCtx::gf(RATIONAL_PRIME),
        ["complex"] => FieldCtx::complex(DEFAULT_EPS),
        ["complex", eps] => FieldCtx::complex(number(eps, "tolerance")?),
        ["gf", p] => FieldCtx::gf(number(p, "modulus")?),
        ["cycmod", n] => {
            let n: u64 = number(n, "root order")?;
            if n > MAX_SHORTHAND_ORDER {
                return Err(Error::Parse(format!("root order {n} is too large for automatic search")));
            }
            FieldCtx::cycmod_above(n, 1 << 20)
        }
        ["cycmod", q, n, w] => FieldCtx::cycmod(number(q, "modulus")?, number(n, "root order")?, number(w, "root")?),
        [one] if one.starts_with("gf") && one.len() > 2 => FieldCtx::gf(number(&one[2..], "modulus")?),
        _ => Err(Error::Parse(format!("unknown field descriptor {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        let ctxs = [
            FieldCtx::gf(2).unwrap(),
            FieldCtx::gf(RATIONAL_PRIME).unwrap(),
            FieldCtx::complex(1e-9).unwrap(),
            FieldCtx::complex(0.1 + 0.2).unwrap(),
            FieldCtx::cycmod_above(5, 1 << 20).unwrap(),
        ];
        for ctx in ctxs {
            assert_eq!(parse_field(&field_descriptor(&ctx)).unwrap(), ctx);
        }
    }

    #[test]
    fn shorthands_and_errors() {
        assert_eq!(parse_field("gf3").unwrap(), FieldCtx::gf(3).unwrap());
        assert_eq!(parse_field("rational").unwrap(), FieldCtx::gf(RATIONAL_PRIME).unwrap());
        assert!(matches!(parse_field("complex").unwrap(), FieldCtx::Complex { .. }));
        assert!(matches!(parse_field("cycmod:5").unwrap(), FieldCtx::CycMod { n: 5, .. }));
        assert!(parse_field("cycmod:4294967295").is_err());
        for bad in ["", "gf", "gf4", "gf:x", "cycmod:7:5:2", "complex:-1", "real", "gf:2:3"] {
            assert!(parse_field(bad).is_err(), "{bad}");
        }
    }
}
