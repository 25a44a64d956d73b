//! Program-context assumptions and the specialization lattice.
//!
//! A `ValueSpec` pins a value site at one of five levels, ordered
//! Value ⊑ Shape ⊑ PartialShape ⊑ Kind ⊑ Top. `join` computes the least
//! upper bound, `matches` checks a live value against a spec, and `relax`
//! widens a failed assumption by joining in the offending observation.
//! Because the lattice height is 4, any site relaxes at most 4 times.

use crate::frontend::SiteId;
use crate::runtime::{deep_eq_bits, FunctionId, ObsKey, Value, ValueKind};

/// One dimension of a partially-known shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Known(usize),
    Unknown,
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dim::Known(d) => write!(f, "{d}"),
            Dim::Unknown => write!(f, "?"),
        }
    }
}

/// A claim about how specialized a value site is. The variants encode the
/// legal level/kind/shape/constant combinations directly: `Value` carries
/// the constant, shape levels apply only to tensors, and `PartialShape`
/// always holds at least one unknown dimension.
#[derive(Debug, Clone)]
pub enum ValueSpec {
    Value(Value),
    Shape(Vec<usize>),
    PartialShape(Vec<Dim>),
    Kind(ValueKind),
    Top,
}

impl ValueSpec {
    pub fn kind(&self) -> Option<ValueKind> {
        match self {
            ValueSpec::Value(v) => Some(v.kind()),
            ValueSpec::Shape(_) | ValueSpec::PartialShape(_) => Some(ValueKind::Tensor),
            ValueSpec::Kind(k) => Some(*k),
            ValueSpec::Top => None,
        }
    }

    pub fn level_name(&self) -> &'static str {
        match self {
            ValueSpec::Value(_) => "value",
            ValueSpec::Shape(_) => "shape",
            ValueSpec::PartialShape(_) => "partial-shape",
            ValueSpec::Kind(_) => "kind",
            ValueSpec::Top => "top",
        }
    }

    /// Lattice height below this spec: the number of strict widenings
    /// possible before reaching Top.
    pub fn headroom(&self) -> u32 {
        match self {
            ValueSpec::Value(_) => 4,
            ValueSpec::Shape(_) => 3,
            ValueSpec::PartialShape(_) => 2,
            ValueSpec::Kind(_) => 1,
            ValueSpec::Top => 0,
        }
    }
}

impl std::fmt::Display for ValueSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValueSpec::Value(v) => match v {
                Value::Int(x) => write!(f, "value:int({x})"),
                Value::Float(x) => write!(f, "value:float({x})"),
                Value::Bool(x) => write!(f, "value:bool({x})"),
                Value::Str(s) => write!(f, "value:string({s:?})"),
                Value::Tensor(t) => write!(f, "value:tensor{:?}", &*t.shape),
                Value::List(id) => write!(f, "value:list#{}", id.0),
                Value::Record(id) => write!(f, "value:record#{}", id.0),
                Value::Fn(id) => write!(f, "value:fn#{}", id.0),
                Value::Nil => write!(f, "value:nil"),
            },
            ValueSpec::Shape(dims) => {
                let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                write!(f, "shape({})", parts.join(","))
            }
            ValueSpec::PartialShape(dims) => {
                let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                write!(f, "shape({})", parts.join(","))
            }
            ValueSpec::Kind(k) => write!(f, "kind({})", k.name()),
            ValueSpec::Top => write!(f, "top"),
        }
    }
}

/// Lattice equality. `Value` specs compare constants bit-exactly.
impl PartialEq for ValueSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ValueSpec::Value(a), ValueSpec::Value(b)) => deep_eq_bits(a, b),
            (ValueSpec::Shape(a), ValueSpec::Shape(b)) => a == b,
            (ValueSpec::PartialShape(a), ValueSpec::PartialShape(b)) => a == b,
            (ValueSpec::Kind(a), ValueSpec::Kind(b)) => a == b,
            (ValueSpec::Top, ValueSpec::Top) => true,
            _ => false,
        }
    }
}

/// The most specific description of a value: level Value with the constant
/// itself (reference identity is the "value" for lists and records).
pub fn spec_of(v: &Value) -> ValueSpec {
    ValueSpec::Value(v.clone())
}

fn shape_dims(spec: &ValueSpec) -> Option<Vec<Dim>> {
    match spec {
        ValueSpec::Value(Value::Tensor(t)) => {
            Some(t.shape.iter().map(|&d| Dim::Known(d)).collect())
        }
        ValueSpec::Shape(dims) => Some(dims.iter().map(|&d| Dim::Known(d)).collect()),
        ValueSpec::PartialShape(dims) => Some(dims.clone()),
        _ => None,
    }
}

/// Least upper bound of two specs.
pub fn join(a: &ValueSpec, b: &ValueSpec) -> ValueSpec {
    if a == b {
        return a.clone();
    }
    let (ka, kb) = match (a.kind(), b.kind()) {
        (Some(ka), Some(kb)) => (ka, kb),
        _ => return ValueSpec::Top,
    };
    if ka != kb {
        return ValueSpec::Top;
    }
    if ka == ValueKind::Tensor {
        if let (Some(da), Some(db)) = (shape_dims(a), shape_dims(b)) {
            if da.len() == db.len() {
                let joined: Vec<Dim> = da
                    .iter()
                    .zip(db.iter())
                    .map(|(x, y)| if x == y { *x } else { Dim::Unknown })
                    .collect();
                return if joined.iter().all(|d| matches!(d, Dim::Known(_))) {
                    ValueSpec::Shape(
                        joined
                            .into_iter()
                            .map(|d| match d {
                                Dim::Known(v) => v,
                                Dim::Unknown => unreachable!(),
                            })
                            .collect(),
                    )
                } else {
                    ValueSpec::PartialShape(joined)
                };
            }
        }
        // Rank mismatch, or one side already at kind level.
        return ValueSpec::Kind(ValueKind::Tensor);
    }
    // Same non-tensor kind with unequal payloads.
    ValueSpec::Kind(ka)
}

/// Does a live value conform to a spec?
pub fn matches(spec: &ValueSpec, v: &Value) -> bool {
    match spec {
        ValueSpec::Value(c) => deep_eq_bits(c, v),
        ValueSpec::Shape(dims) => match v {
            Value::Tensor(t) => t.shape.len() == dims.len() && t.shape.iter().eq(dims.iter()),
            _ => false,
        },
        ValueSpec::PartialShape(dims) => match v {
            Value::Tensor(t) => {
                t.shape.len() == dims.len()
                    && t.shape.iter().zip(dims.iter()).all(|(&d, spec_d)| match spec_d {
                        Dim::Known(k) => d == *k,
                        Dim::Unknown => true,
                    })
            }
            _ => false,
        },
        ValueSpec::Kind(k) => v.kind() == *k,
        ValueSpec::Top => true,
    }
}

/// Whether every value matching `a` also matches `b` (a is at least as
/// specific). Used to order cache entries most-specific-first.
pub fn spec_implies(a: &ValueSpec, b: &ValueSpec) -> bool {
    if a == b {
        return true;
    }
    match (a, b) {
        (_, ValueSpec::Top) => true,
        (ValueSpec::Value(c), _) => matches(b, c),
        (ValueSpec::Shape(_), ValueSpec::Kind(ValueKind::Tensor)) => true,
        (ValueSpec::PartialShape(_), ValueSpec::Kind(ValueKind::Tensor)) => true,
        (ValueSpec::Shape(da), ValueSpec::PartialShape(db)) => {
            da.len() == db.len()
                && da.iter().zip(db.iter()).all(|(&d, spec_d)| match spec_d {
                    Dim::Known(k) => d == *k,
                    Dim::Unknown => true,
                })
        }
        (ValueSpec::PartialShape(da), ValueSpec::PartialShape(db)) => {
            da.len() == db.len()
                && da.iter().zip(db.iter()).all(|(x, y)| match y {
                    Dim::Unknown => true,
                    Dim::Known(_) => x == y,
                })
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Assumptions
// ---------------------------------------------------------------------------

/// Stable identifier: a hash of (site, payload) so the same claim always
/// gets the same id across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssumptionId(pub u64);

impl std::fmt::Display for AssumptionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "a{:016x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssumptionPayload {
    BranchStable { site: SiteId, arm: bool },
    TripCount { site: SiteId, n: u64 },
    CalleeStable { site: SiteId, callee: FunctionId },
    ValueSpecAt { key: ObsKey, spec: ValueSpec },
}

impl AssumptionPayload {
    pub fn site(&self) -> SiteId {
        match self {
            AssumptionPayload::BranchStable { site, .. }
            | AssumptionPayload::TripCount { site, .. }
            | AssumptionPayload::CalleeStable { site, .. } => *site,
            AssumptionPayload::ValueSpecAt { key, .. } => match key {
                ObsKey::Site(s) => *s,
                ObsKey::LoopVar(s, _) => *s,
            },
        }
    }

    /// Category name used for per-site relaxation bookkeeping and stats.
    pub fn category(&self) -> &'static str {
        match self {
            AssumptionPayload::BranchStable { .. } => "branch",
            AssumptionPayload::TripCount { .. } => "trip_count",
            AssumptionPayload::CalleeStable { .. } => "callee",
            AssumptionPayload::ValueSpecAt { .. } => "value_spec",
        }
    }
}

impl std::fmt::Display for AssumptionPayload {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AssumptionPayload::BranchStable { arm, .. } => {
                write!(f, "branch={}", if *arm { "then" } else { "else" })
            }
            AssumptionPayload::TripCount { n, .. } => write!(f, "trips={n}"),
            AssumptionPayload::CalleeStable { callee, .. } => write!(f, "callee={callee}"),
            AssumptionPayload::ValueSpecAt { spec, .. } => write!(f, "spec={spec}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidationMode {
    /// Validatable from arguments before execution, when retrieving a graph
    /// from the cache.
    DispatchChecked,
    /// Needs an Assert node in the graph.
    RuntimeAsserted,
}

impl ValidationMode {
    pub fn letter(self) -> char {
        match self {
            ValidationMode::DispatchChecked => 'D',
            ValidationMode::RuntimeAsserted => 'R',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assumption {
    pub id: AssumptionId,
    pub payload: AssumptionPayload,
    pub mode: ValidationMode,
}

impl Assumption {
    /// Builds an assumption, computing its stable id. Only value-spec
    /// payloads may be dispatch-checked; control-flow payloads are always
    /// runtime-asserted.
    pub fn new(payload: AssumptionPayload, mode: ValidationMode) -> Assumption {
        if mode == ValidationMode::DispatchChecked {
            assert!(
                matches!(payload, AssumptionPayload::ValueSpecAt { .. }),
                "only value specs are dispatch-checked"
            );
        }
        let id = AssumptionId(hash_payload(&payload));
        Assumption { id, payload, mode }
    }

    /// Stats rendering: `site=<id> payload=<text> mode=<D|R> fails=<n>`.
    pub fn render(&self, fails: u64) -> String {
        format!(
            "site={} payload={} mode={} fails={}",
            self.payload.site().0,
            self.payload,
            self.mode.letter(),
            fails
        )
    }
}

/// Outcome of relaxing a failed assumption.
#[derive(Debug, Clone, PartialEq)]
pub enum RelaxOutcome {
    Relaxed(Assumption),
    /// The site can no longer be specialized: control-flow constructs are
    /// regenerated with dynamic ops, value sites read the live environment.
    Drop,
}

/// The value observed when the assumption failed.
#[derive(Debug, Clone)]
pub enum Observed {
    Value(Value),
    Arm(bool),
    Trips(u64),
    Callee(FunctionId),
}

/// Widens a failed assumption one lattice level toward the observation.
pub fn relax(a: &Assumption, observed: &Observed) -> RelaxOutcome {
    match (&a.payload, observed) {
        (AssumptionPayload::ValueSpecAt { key, spec }, Observed::Value(v)) => {
            let widened = join(spec, &spec_of(v));
            if let ValueSpec::Top = widened {
                RelaxOutcome::Drop
            } else {
                RelaxOutcome::Relaxed(Assumption::new(
                    AssumptionPayload::ValueSpecAt { key: *key, spec: widened },
                    a.mode,
                ))
            }
        }
        _ => RelaxOutcome::Drop,
    }
}

// ---------------------------------------------------------------------------
// Assumption sets
// ---------------------------------------------------------------------------

/// The set of assumptions a graph was built under, with an order-independent
/// fingerprint. At most one assumption per (site, payload category).
#[derive(Debug, Clone, Default)]
pub struct AssumptionSet {
    assumptions: Vec<Assumption>,
    fingerprint: u64,
}

impl AssumptionSet {
    pub fn new(mut assumptions: Vec<Assumption>) -> AssumptionSet {
        assumptions.sort_by_key(|a| a.id);
        assumptions.dedup_by_key(|a| a.id);
        if cfg!(debug_assertions) {
            let mut keys: Vec<(SiteId, &str, Option<&ObsKey>)> = assumptions
                .iter()
                .map(|a| {
                    let key = match &a.payload {
                        AssumptionPayload::ValueSpecAt { key, .. } => Some(key),
                        _ => None,
                    };
                    (a.payload.site(), a.payload.category(), key)
                })
                .collect();
            let before = keys.len();
            keys.sort_by_key(|(s, c, k)| (*s, *c, k.map(|k| format!("{k}"))));
            keys.dedup();
            debug_assert_eq!(before, keys.len(), "one assumption per (site, category)");
        }
        let fingerprint = fingerprint_of(&assumptions);
        AssumptionSet { assumptions, fingerprint }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Assumption> {
        self.assumptions.iter()
    }

    pub fn len(&self) -> usize {
        self.assumptions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assumptions.is_empty()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn get(&self, id: AssumptionId) -> Option<&Assumption> {
        self.assumptions.iter().find(|a| a.id == id)
    }

    pub fn runtime_asserted(&self) -> impl Iterator<Item = &Assumption> {
        self.assumptions.iter().filter(|a| a.mode == ValidationMode::RuntimeAsserted)
    }

    pub fn dispatch_checked(&self) -> impl Iterator<Item = &Assumption> {
        self.assumptions.iter().filter(|a| a.mode == ValidationMode::DispatchChecked)
    }
}

fn fingerprint_of(sorted: &[Assumption]) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(sorted.len() as u64);
    for a in sorted {
        h.write_u64(a.id.0);
        h.write_u8(match a.mode {
            ValidationMode::DispatchChecked => 0,
            ValidationMode::RuntimeAsserted => 1,
        });
    }
    h.finish()
}

// ---------------------------------------------------------------------------
// Stable hashing (FNV-1a 64): deterministic across runs and platforms.
// ---------------------------------------------------------------------------

pub(crate) struct Fnv(u64);

impl Fnv {
    pub fn new() -> Fnv {
        Fnv(0xcbf29ce484222325)
    }

    pub fn write_u8(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x100000001b3);
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u8(b);
        }
    }

    pub fn write_u32(&mut self, v: u32) {
        self.write_bytes(&v.to_le_bytes());
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write_bytes(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

fn hash_obs_key(h: &mut Fnv, key: &ObsKey) {
    match key {
        ObsKey::Site(s) => {
            h.write_u8(0);
            h.write_u32(s.0);
        }
        ObsKey::LoopVar(s, slot) => {
            h.write_u8(1);
            h.write_u32(s.0);
            h.write_u32(*slot as u32);
        }
    }
}

fn hash_value(h: &mut Fnv, v: &Value) {
    match v {
        Value::Int(x) => {
            h.write_u8(0);
            h.write_u64(*x as u64);
        }
        Value::Float(x) => {
            h.write_u8(1);
            h.write_u64(x.to_bits());
        }
        Value::Bool(x) => {
            h.write_u8(2);
            h.write_u8(*x as u8);
        }
        Value::Str(s) => {
            h.write_u8(3);
            h.write_u64(s.len() as u64);
            h.write_bytes(s.as_bytes());
        }
        Value::Tensor(t) => {
            h.write_u8(4);
            h.write_u64(t.shape.len() as u64);
            for &d in t.shape.iter() {
                h.write_u64(d as u64);
            }
            for &x in t.data.iter() {
                h.write_u64(x.to_bits());
            }
        }
        Value::List(id) => {
            h.write_u8(5);
            h.write_u32(id.0);
        }
        Value::Record(id) => {
            h.write_u8(6);
            h.write_u32(id.0);
        }
        Value::Fn(id) => {
            h.write_u8(7);
            h.write_u32(id.0);
        }
        Value::Nil => h.write_u8(8),
    }
}

fn hash_spec(h: &mut Fnv, spec: &ValueSpec) {
    match spec {
        ValueSpec::Value(v) => {
            h.write_u8(0);
            hash_value(h, v);
        }
        ValueSpec::Shape(dims) => {
            h.write_u8(1);
            h.write_u64(dims.len() as u64);
            for &d in dims {
                h.write_u64(d as u64);
            }
        }
        ValueSpec::PartialShape(dims) => {
            h.write_u8(2);
            h.write_u64(dims.len() as u64);
            for d in dims {
                match d {
                    Dim::Known(v) => {
                        h.write_u8(0);
                        h.write_u64(*v as u64);
                    }
                    Dim::Unknown => h.write_u8(1),
                }
            }
        }
        ValueSpec::Kind(k) => {
            h.write_u8(3);
            h.write_u8(*k as u8);
        }
        ValueSpec::Top => h.write_u8(4),
    }
}

fn hash_payload(p: &AssumptionPayload) -> u64 {
    let mut h = Fnv::new();
    match p {
        AssumptionPayload::BranchStable { site, arm } => {
            h.write_u8(0);
            h.write_u32(site.0);
            h.write_u8(*arm as u8);
        }
        AssumptionPayload::TripCount { site, n } => {
            h.write_u8(1);
            h.write_u32(site.0);
            h.write_u64(*n);
        }
        AssumptionPayload::CalleeStable { site, callee } => {
            h.write_u8(2);
            h.write_u32(site.0);
            h.write_u32(callee.0);
        }
        AssumptionPayload::ValueSpecAt { key, spec } => {
            h.write_u8(3);
            hash_obs_key(&mut h, key);
            hash_spec(&mut h, spec);
        }
    }
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::{HeapId, Tensor};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn shape(dims: &[usize]) -> ValueSpec {
        ValueSpec::Shape(dims.to_vec())
    }

    fn pshape(dims: &[Option<usize>]) -> ValueSpec {
        ValueSpec::PartialShape(
            dims.iter().map(|d| d.map(Dim::Known).unwrap_or(Dim::Unknown)).collect(),
        )
    }

    fn tensor(dims: &[usize]) -> Value {
        Value::Tensor(Tensor::filled(dims.to_vec(), 1.0))
    }

    #[test]
    fn spec_of_examples() {
        match spec_of(&tensor(&[4, 8])) {
            ValueSpec::Value(Value::Tensor(t)) => assert_eq!(&*t.shape, &[4, 8]),
            other => panic!("{other:?}"),
        }
        assert_eq!(spec_of(&Value::Int(7)), ValueSpec::Value(Value::Int(7)));
        assert_eq!(
            spec_of(&Value::Record(HeapId(12))),
            ValueSpec::Value(Value::Record(HeapId(12)))
        );
    }

    #[test]
    fn join_examples() {
        assert_eq!(join(&shape(&[4, 8]), &shape(&[3, 8])), pshape(&[None, Some(8)]));
        assert_eq!(join(&pshape(&[None, Some(8)]), &shape(&[2, 8])), pshape(&[None, Some(8)]));
        // Rank mismatch: no common shape template exists.
        assert_eq!(join(&shape(&[4, 8]), &shape(&[4, 8, 2])), ValueSpec::Kind(ValueKind::Tensor));
        // Same kind, different constants, non-tensor: kind level.
        assert_eq!(
            join(&spec_of(&Value::Int(1)), &spec_of(&Value::Int(2))),
            ValueSpec::Kind(ValueKind::Int)
        );
        // Different kinds: top.
        assert_eq!(
            join(&ValueSpec::Kind(ValueKind::Int), &ValueSpec::Kind(ValueKind::Float)),
            ValueSpec::Top
        );
        // Equal value specs stay at value level.
        assert_eq!(
            join(&spec_of(&Value::Int(1)), &spec_of(&Value::Int(1))),
            spec_of(&Value::Int(1))
        );
        // Two tensors, same shape, different data: shape level.
        let a = Value::Tensor(Tensor::filled(vec![4, 8], 1.0));
        let b = Value::Tensor(Tensor::filled(vec![4, 8], 2.0));
        assert_eq!(join(&spec_of(&a), &spec_of(&b)), shape(&[4, 8]));
    }

    #[test]
    fn matches_examples() {
        assert!(matches(&pshape(&[None, Some(8)]), &tensor(&[6, 8])));
        assert!(!matches(&shape(&[4, 8]), &tensor(&[3, 8])));
        assert!(!matches(&ValueSpec::Kind(ValueKind::Int), &Value::Float(1.0)));
        assert!(matches(&ValueSpec::Top, &Value::Nil));
        assert!(matches(&spec_of(&Value::Record(HeapId(2))), &Value::Record(HeapId(2))));
        assert!(!matches(&spec_of(&Value::Record(HeapId(2))), &Value::Record(HeapId(3))));
    }

    #[test]
    fn relax_examples() {
        let a = Assumption::new(
            AssumptionPayload::ValueSpecAt {
                key: ObsKey::Site(SiteId(2)),
                spec: shape(&[4, 8]),
            },
            ValidationMode::RuntimeAsserted,
        );
        match relax(&a, &Observed::Value(tensor(&[3, 8]))) {
            RelaxOutcome::Relaxed(r) => match r.payload {
                AssumptionPayload::ValueSpecAt { spec, .. } => {
                    assert_eq!(spec, pshape(&[None, Some(8)]))
                }
                _ => panic!(),
            },
            RelaxOutcome::Drop => panic!("expected relaxed"),
        }

        let t = Assumption::new(
            AssumptionPayload::TripCount { site: SiteId(9), n: 3 },
            ValidationMode::RuntimeAsserted,
        );
        assert_eq!(relax(&t, &Observed::Trips(4)), RelaxOutcome::Drop);

        let k = Assumption::new(
            AssumptionPayload::ValueSpecAt {
                key: ObsKey::Site(SiteId(5)),
                spec: ValueSpec::Kind(ValueKind::Int),
            },
            ValidationMode::RuntimeAsserted,
        );
        assert_eq!(relax(&k, &Observed::Value(Value::Float(1.0))), RelaxOutcome::Drop);
    }

    fn arbitrary_spec(rng: &mut StdRng) -> ValueSpec {
        match rng.gen_range(0..5) {
            0 => spec_of(&arbitrary_value(rng)),
            1 => ValueSpec::Shape((0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..4)).collect()),
            2 => {
                let n = rng.gen_range(1..4);
                let mut dims: Vec<Dim> = (0..n)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            Dim::Unknown
                        } else {
                            Dim::Known(rng.gen_range(0..4))
                        }
                    })
                    .collect();
                dims[0] = Dim::Unknown; // keep the invariant: at least one unknown
                ValueSpec::PartialShape(dims)
            }
            3 => ValueSpec::Kind(arbitrary_value(rng).kind()),
            _ => ValueSpec::Top,
        }
    }

    fn arbitrary_value(rng: &mut StdRng) -> Value {
        match rng.gen_range(0..8) {
            0 => Value::Int(rng.gen_range(-3..4)),
            1 => Value::Float(rng.gen_range(-2..3) as f64 * 0.5),
            2 => Value::Bool(rng.gen_bool(0.5)),
            3 => Value::str(if rng.gen_bool(0.5) { "a" } else { "b" }),
            4 => {
                let rank = rng.gen_range(0..3);
                let dims: Vec<usize> = (0..rank).map(|_| rng.gen_range(0..4)).collect();
                Value::Tensor(Tensor::filled(dims, rng.gen_range(0..3) as f64))
            }
            5 => Value::List(HeapId(rng.gen_range(0..3))),
            6 => Value::Record(HeapId(rng.gen_range(0..3))),
            _ => Value::Nil,
        }
    }

    #[test]
    fn lattice_laws_over_generated_corpus() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..10_000 {
            let a = arbitrary_spec(&mut rng);
            let b = arbitrary_spec(&mut rng);
            let c = arbitrary_spec(&mut rng);
            // Commutativity, associativity, idempotence.
            assert_eq!(join(&a, &b), join(&b, &a), "commutativity: {a} {b}");
            assert_eq!(
                join(&join(&a, &b), &c),
                join(&a, &join(&b, &c)),
                "associativity: {a} {b} {c}"
            );
            assert_eq!(join(&a, &a), a, "idempotence: {a}");
            // Upper bound: anything matching a or b matches their join.
            let v = arbitrary_value(&mut rng);
            if matches(&a, &v) || matches(&b, &v) {
                assert!(matches(&join(&a, &b), &v), "upper bound: {a} {b} {v:?}");
            }
            // spec_implies agrees with the lattice order.
            let ab = join(&a, &b);
            assert!(spec_implies(&a, &ab), "a implies join(a,b): {a} {ab}");
            assert!(spec_implies(&b, &ab), "b implies join(a,b): {b} {ab}");
        }
    }

    #[test]
    fn relaxation_chains_terminate_within_lattice_height() {
        let mut rng = StdRng::seed_from_u64(0xfeed);
        for _ in 0..2_000 {
            let start = arbitrary_spec(&mut rng);
            if matches!(start, ValueSpec::Top) {
                continue; // Top never fails, nothing to relax
            }
            let mut a = Assumption::new(
                AssumptionPayload::ValueSpecAt { key: ObsKey::Site(SiteId(1)), spec: start },
                ValidationMode::RuntimeAsserted,
            );
            let mut steps = 0;
            let mut attempts = 0;
            loop {
                let v = arbitrary_value(&mut rng);
                attempts += 1;
                if attempts > 10_000 {
                    panic!("could not find a failing observation");
                }
                let already = match &a.payload {
                    AssumptionPayload::ValueSpecAt { spec, .. } => matches(spec, &v),
                    _ => unreachable!(),
                };
                if already {
                    continue; // not a failure; try another observation
                }
                steps += 1;
                assert!(steps <= 4, "relaxation chain exceeded lattice height");
                match relax(&a, &Observed::Value(v.clone())) {
                    RelaxOutcome::Drop => break,
                    RelaxOutcome::Relaxed(next) => {
                        // Monotone: the widened spec matches the observation.
                        match &next.payload {
                            AssumptionPayload::ValueSpecAt { spec, .. } => {
                                assert!(matches(spec, &v), "relax not monotone")
                            }
                            _ => unreachable!(),
                        }
                        a = next;
                    }
                }
            }
        }
    }

    #[test]
    fn fingerprint_is_order_independent_and_set_keyed() {
        let a = Assumption::new(
            AssumptionPayload::BranchStable { site: SiteId(1), arm: true },
            ValidationMode::RuntimeAsserted,
        );
        let b = Assumption::new(
            AssumptionPayload::TripCount { site: SiteId(2), n: 3 },
            ValidationMode::RuntimeAsserted,
        );
        let s1 = AssumptionSet::new(vec![a.clone(), b.clone()]);
        let s2 = AssumptionSet::new(vec![b.clone(), a.clone()]);
        assert_eq!(s1.fingerprint(), s2.fingerprint());
        let s3 = AssumptionSet::new(vec![a]);
        assert_ne!(s1.fingerprint(), s3.fingerprint());
    }

    #[test]
    fn assumption_ids_stable_and_distinct() {
        let mk = || {
            Assumption::new(
                AssumptionPayload::TripCount { site: SiteId(9), n: 3 },
                ValidationMode::RuntimeAsserted,
            )
        };
        assert_eq!(mk().id, mk().id);
        let other = Assumption::new(
            AssumptionPayload::TripCount { site: SiteId(9), n: 4 },
            ValidationMode::RuntimeAsserted,
        );
        assert_ne!(mk().id, other.id);
    }
}
