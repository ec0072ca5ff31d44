use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abpformula::{OrderedABP, SmFormula, SmNode};
use crate::candidates::{ExponentMatrix, Policy, TriangularReport};
use crate::error::{Error, Result};
use crate::fieldlinalg::{DenseMatrix, Entries, FieldCtx, Scalar};
use crate::pathmeasures::{LemmaReport, PathGraph};
use crate::ptcore::{Kappa, PTCertificate};
use crate::soslink::SoSCertificate;
use crate::tensorspace::{HyperMatrix, Tensor};

use super::field::{field_descriptor, parse_field};

/// Largest matrix (in cells) whose size is implied rather than spelled out
/// entry by entry in the input.
const IMPLIED_CELLS: usize = 1 << 24;

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// JSON emission and validated parsing.
pub trait Json: Sized {
    fn to_value(&self) -> Value;
    fn from_value(v: Value) -> Result<Self>;

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("JSON values always serialize")
    }

    fn from_json(s: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(s).map_err(parse_err)?)
    }
}

fn decode<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(parse_err)
}

fn encode<T: Serialize>(w: &T) -> Value {
    serde_json::to_value(w).expect("wire types serialize")
}

fn check_kind(found: &str, want: &str) -> Result<()> {
    if found != want {
        return Err(Error::Parse(format!("expected kind {want:?}, found {found:?}")));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntriesWire {
    Fp(Vec<u64>),
    C(Vec<[f64; 2]>),
}

impl EntriesWire {
    fn from_entries(e: &Entries) -> Self {
        match e {
            Entries::Fp(v) => EntriesWire::Fp(v.clone()),
            Entries::C(v) => EntriesWire::C(v.iter().map(|z| [z.re, z.im]).collect()),
        }
    }

    fn len(&self) -> usize {
        match self {
            EntriesWire::Fp(v) => v.len(),
            EntriesWire::C(v) => v.len(),
        }
    }

    fn into_entries(self, ctx: &FieldCtx, len: usize) -> Result<Entries> {
        if self.len() != len {
            return Err(Error::Dimension(format!("expected {len} entries, got {}", self.len())));
        }
        let e = match (self, ctx.is_finite()) {
            (EntriesWire::Fp(v), true) => Entries::Fp(v),
            (EntriesWire::C(v), false) => Entries::C(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()),
            (w, false) if w.len() == 0 => Entries::C(Vec::new()),
            _ => return Err(Error::Parse(format!("entry representation does not match {ctx}"))),
        };
        e.validate(ctx)?;
        Ok(e)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarWire {
    Fp(u64),
    C([f64; 2]),
}

impl ScalarWire {
    fn from_scalar(s: Scalar) -> Self {
        match s {
            Scalar::Fp(v) => ScalarWire::Fp(v),
            Scalar::C(z) => ScalarWire::C([z.re, z.im]),
        }
    }

    fn into_scalar(self, ctx: &FieldCtx) -> Result<Scalar> {
        let s = match self {
            ScalarWire::Fp(v) => Scalar::Fp(v),
            ScalarWire::C([re, im]) => Scalar::C(Complex64::new(re, im)),
        };
        ctx.check_scalar(s)?;
        Ok(s)
    }
}

fn square_cells(n: usize, d: usize) -> Result<usize> {
    let dim = crate::tensorspace::tensor::checked_volume(n, d)?;
    dim.checked_mul(dim).ok_or_else(|| Error::OutOfRange(format!("[{n}]^{d} matrix is too large")))
}

fn matrix_from(n: usize, d: usize, ctx: FieldCtx, entries: EntriesWire) -> Result<HyperMatrix> {
    let cells = square_cells(n, d)?;
    let dim = crate::tensorspace::tensor::checked_volume(n, d)?;
    let body = DenseMatrix::new(dim, dim, ctx, entries.into_entries(&ctx, cells)?)?;
    HyperMatrix::new(n, d, body)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixWire {
    kind: String,
    field: String,
    n: usize,
    d: usize,
    entries: EntriesWire,
}

impl Json for HyperMatrix {
    fn to_value(&self) -> Value {
        encode(&MatrixWire {
            kind: "hypermatrix".into(),
            field: field_descriptor(self.ctx()),
            n: self.n(),
            d: self.d(),
            entries: EntriesWire::from_entries(self.body().entries()),
        })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: MatrixWire = decode(v)?;
        check_kind(&w.kind, "hypermatrix")?;
        matrix_from(w.n, w.d, parse_field(&w.field)?, w.entries)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorWire {
    kind: String,
    field: String,
    n: usize,
    labels: Vec<i64>,
    entries: EntriesWire,
}

impl Json for Tensor {
    fn to_value(&self) -> Value {
        encode(&TensorWire {
            kind: "tensor".into(),
            field: field_descriptor(self.ctx()),
            n: self.n(),
            labels: self.labels().to_vec(),
            entries: EntriesWire::from_entries(self.entries()),
        })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: TensorWire = decode(v)?;
        check_kind(&w.kind, "tensor")?;
        let ctx = parse_field(&w.field)?;
        let len = crate::tensorspace::tensor::checked_volume(w.n, w.labels.len())?;
        Tensor::new(w.n, w.labels, ctx, w.entries.into_entries(&ctx, len)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartWire {
    kappa: Vec<usize>,
    entries: EntriesWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PtCertWire {
    kind: String,
    field: String,
    n: usize,
    d: usize,
    target: EntriesWire,
    parts: Vec<PartWire>,
    value: usize,
    metadata: String,
}

impl Json for PTCertificate {
    fn to_value(&self) -> Value {
        let t = self.target();
        encode(&PtCertWire {
            kind: "pt-certificate".into(),
            field: field_descriptor(t.ctx()),
            n: t.n(),
            d: t.d(),
            target: EntriesWire::from_entries(t.body().entries()),
            parts: self
                .parts()
                .iter()
                .map(|(k, p)| PartWire { kappa: k.members(), entries: EntriesWire::from_entries(p.body().entries()) })
                .collect(),
            value: self.value(),
            metadata: self.metadata().to_string(),
        })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: PtCertWire = decode(v)?;
        check_kind(&w.kind, "pt-certificate")?;
        let ctx = parse_field(&w.field)?;
        let target = matrix_from(w.n, w.d, ctx, w.target)?;
        let parts = w
            .parts
            .into_iter()
            .map(|p| Ok((Kappa::new(w.d, &p.kappa)?, matrix_from(w.n, w.d, ctx, p.entries)?)))
            .collect::<Result<Vec<_>>>()?;
        PTCertificate::with_claimed_value(target, parts, w.value, w.metadata)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SosWire {
    kind: String,
    field: String,
    n: usize,
    d: usize,
    terms: Vec<EntriesWire>,
    metadata: String,
}

impl Json for SoSCertificate {
    fn to_value(&self) -> Value {
        encode(&SosWire {
            kind: "sos-certificate".into(),
            field: field_descriptor(self.ctx()),
            n: self.n(),
            d: self.d(),
            terms: self.terms().iter().map(EntriesWire::from_entries).collect(),
            metadata: self.metadata().to_string(),
        })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: SosWire = decode(v)?;
        check_kind(&w.kind, "sos-certificate")?;
        let ctx = parse_field(&w.field)?;
        if square_cells(w.n, w.d)? > IMPLIED_CELLS {
            return Err(Error::OutOfRange(format!("[{}]^{} is too large to load", w.n, w.d)));
        }
        let len = crate::tensorspace::tensor::checked_volume(w.n, w.d)?;
        let terms = w.terms.into_iter().map(|t| t.into_entries(&ctx, len)).collect::<Result<Vec<_>>>()?;
        SoSCertificate::new(w.n, w.d, ctx, terms, w.metadata)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphWire {
    kind: String,
    edges: Vec<i64>,
}

impl Json for PathGraph {
    fn to_value(&self) -> Value {
        encode(&GraphWire { kind: "path-graph".into(), edges: self.edges() })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: GraphWire = decode(v)?;
        check_kind(&w.kind, "path-graph")?;
        let mut sorted = w.edges.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != w.edges.len() {
            return Err(Error::Parse("repeated edge".into()));
        }
        PathGraph::new(w.edges)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AbpWire {
    kind: String,
    field: String,
    alphabet: usize,
    widths: Vec<usize>,
    layers: Vec<Vec<EntriesWire>>,
    v1: EntriesWire,
    v2: EntriesWire,
}

impl Json for OrderedABP {
    fn to_value(&self) -> Value {
        encode(&AbpWire {
            kind: "abp".into(),
            field: field_descriptor(self.ctx()),
            alphabet: self.alphabet(),
            widths: self.widths().to_vec(),
            layers: self.layers().iter().map(|l| l.iter().map(EntriesWire::from_entries).collect()).collect(),
            v1: EntriesWire::from_entries(self.v1()),
            v2: EntriesWire::from_entries(self.v2()),
        })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: AbpWire = decode(v)?;
        check_kind(&w.kind, "abp")?;
        let ctx = parse_field(&w.field)?;
        let layers = w
            .layers
            .into_iter()
            .map(|l| l.into_iter().map(|f| f.into_entries(&ctx, w.alphabet)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let first = w.widths.first().copied().unwrap_or(0);
        let last = w.widths.last().copied().unwrap_or(0);
        let v1 = w.v1.into_entries(&ctx, first)?;
        let v2 = w.v2.into_entries(&ctx, last)?;
        OrderedABP::new(w.alphabet, ctx, w.widths, layers, v1, v2)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum NodeWire {
    Leaf { block: i64, var: usize, coeff: ScalarWire },
    Plus(Vec<NodeWire>),
    Times(Box<NodeWire>, Box<NodeWire>),
}

impl NodeWire {
    fn from_node(node: &SmNode) -> Self {
        match node {
            SmNode::Leaf { block, var, coeff } => {
                NodeWire::Leaf { block: *block, var: *var, coeff: ScalarWire::from_scalar(*coeff) }
            }
            SmNode::Plus(children) => NodeWire::Plus(children.iter().map(NodeWire::from_node).collect()),
            SmNode::Times(a, b) => NodeWire::Times(Box::new(NodeWire::from_node(a)), Box::new(NodeWire::from_node(b))),
        }
    }

    fn into_node(self, ctx: &FieldCtx) -> Result<SmNode> {
        Ok(match self {
            NodeWire::Leaf { block, var, coeff } => SmNode::Leaf { block, var, coeff: coeff.into_scalar(ctx)? },
            NodeWire::Plus(children) => {
                SmNode::Plus(children.into_iter().map(|c| c.into_node(ctx)).collect::<Result<Vec<_>>>()?)
            }
            NodeWire::Times(a, b) => SmNode::times(a.into_node(ctx)?, b.into_node(ctx)?),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormulaWire {
    kind: String,
    field: String,
    alphabet: usize,
    root: NodeWire,
}

impl Json for SmFormula {
    fn to_value(&self) -> Value {
        encode(&FormulaWire {
            kind: "formula".into(),
            field: field_descriptor(self.ctx()),
            alphabet: self.alphabet(),
            root: NodeWire::from_node(self.root()),
        })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: FormulaWire = decode(v)?;
        check_kind(&w.kind, "formula")?;
        let ctx = parse_field(&w.field)?;
        SmFormula::new(w.alphabet, ctx, w.root.into_node(&ctx)?)
    }
}

/// A `W_T` candidate: exponent matrix, context and parameter policy.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSpec {
    pub t: ExponentMatrix,
    pub ctx: FieldCtx,
    pub policy: Policy,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateWire {
    family: String,
    #[serde(rename = "T")]
    t: Vec<Vec<u64>>,
    n: u64,
    d: usize,
    ctx: String,
    #[serde(default)]
    relax: bool,
}

impl Json for CandidateSpec {
    fn to_value(&self) -> Value {
        let d = self.t.d();
        encode(&CandidateWire {
            family: "wt".into(),
            t: self.t.entries().chunks(d).map(<[u64]>::to_vec).collect(),
            n: self.t.n(),
            d,
            ctx: field_descriptor(&self.ctx),
            relax: self.policy == Policy::Relaxed,
        })
    }

    fn from_value(v: Value) -> Result<Self> {
        let w: CandidateWire = decode(v)?;
        check_kind(&w.family, "wt")?;
        if w.t.len() != w.d || w.t.iter().any(|r| r.len() != w.d) {
            return Err(Error::Dimension(format!("T must be {0}×{0}", w.d)));
        }
        let policy = if w.relax { Policy::Relaxed } else { Policy::Strict };
        let t = ExponentMatrix::new(w.n, w.d, w.t.concat(), policy)?;
        Ok(CandidateSpec { t, ctx: parse_field(&w.ctx)?, policy })
    }
}

/// Plain serde types.
macro_rules! serde_json_object {
    ($($t:ty),* $(,)?) => {$(
        impl Json for $t {
            fn to_value(&self) -> Value {
                encode(self)
            }

            fn from_value(v: Value) -> Result<Self> {
                decode(v)
            }
        }
    )*};
}

serde_json_object!(LemmaReport, TriangularReport);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_format() {
        let m = HyperMatrix::identity(2, 1, FieldCtx::gf(3).unwrap()).unwrap();
        let v = m.to_value();
        assert_eq!(v["kind"], "hypermatrix");
        assert_eq!(v["field"], "gf:3");
        assert_eq!(v["entries"], serde_json::json!([1, 0, 0, 1]));
    }

    #[test]
    fn rejects_malformed_input() {
        let bad = [
            r#"{"kind":"tensor","field":"gf:3","n":2,"d":1,"entries":[1,0,0,1]}"#,
            r#"{"kind":"hypermatrix","field":"gf:3","n":2,"d":1,"entries":[1,0,0]}"#,
            r#"{"kind":"hypermatrix","field":"gf:3","n":2,"d":1,"entries":[1,0,0,3]}"#,
            r#"{"kind":"hypermatrix","field":"gf:4","n":2,"d":1,"entries":[1,0,0,1]}"#,
            r#"{"kind":"hypermatrix","field":"complex","n":1,"d":1,"entries":[1]}"#,
            r#"{"kind":"hypermatrix","field":"gf:3","n":65536,"d":30,"entries":[]}"#,
            r#"{"kind":"hypermatrix","field":"gf:3","n":1,"d":1,"entries":[0],"extra":1}"#,
            r#"[1,2"#,
        ];
        for s in bad {
            assert!(HyperMatrix::from_json(s).is_err(), "{s}");
        }
        assert!(SoSCertificate::from_json(
            r#"{"kind":"sos-certificate","field":"gf:3","n":4096,"d":2,"terms":[],"metadata":""}"#
        )
        .is_err());
        assert!(PathGraph::from_json(r#"{"kind":"path-graph","edges":[1,1]}"#).is_err());
        assert!(PathGraph::from_json(r#"{"kind":"path-graph","edges":[]}"#).is_err());
        let overlap = r#"{"kind":"formula","field":"gf:2","alphabet":2,
            "root":{"times":[{"leaf":{"block":1,"var":0,"coeff":1}},{"leaf":{"block":1,"var":1,"coeff":1}}]}}"#;
        assert!(SmFormula::from_json(overlap).is_err());
        let spec = r#"{"family":"wt","T":[[1,0],[0,1]],"n":4,"d":2,"ctx":"cycmod:4"}"#;
        assert!(CandidateSpec::from_json(spec).is_err());
        let relaxed = r#"{"family":"wt","T":[[1,0],[0,1]],"n":4,"d":2,"ctx":"cycmod:4","relax":true}"#;
        assert_eq!(CandidateSpec::from_json(relaxed).unwrap().policy, Policy::Relaxed);
    }

    #[test]
    fn empty_complex_entries() {
        let ctx = FieldCtx::complex(1e-9).unwrap();
        let sos = SoSCertificate::new(1, 1, ctx, vec![Entries::zeros(&ctx, 1)], "").unwrap();
        assert_eq!(SoSCertificate::from_json(&sos.to_json()).unwrap(), sos);
        let t = Tensor::new(2, vec![], ctx, Entries::zeros(&ctx, 1)).unwrap();
        assert_eq!(Tensor::from_json(&t.to_json()).unwrap(), t);
    }
}
