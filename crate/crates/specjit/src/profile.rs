//! Runtime profiling: per-site observation histograms collected from
//! interpreted executions, and their summary into stability facts.
//!
//! Observations are collected at function entry (each argument), each
//! attribute/subscript read, each call-expression result, each global name
//! read, and each loop-carried local at loop entry. A site is Stable only
//! when every recorded observation agrees; there are no majority thresholds.

use std::collections::HashMap;

use crate::assume::{join, spec_of, ValueSpec};
use crate::frontend::{Program, SiteId, SourceSpan};
use crate::runtime::{
    interpret_call, ExecHooks, FunctionId, ObsKey, RtEnv, RtError, Value, ValueKind,
};

/// Default number of profiled calls before the first graph is generated.
pub const DEFAULT_WARMUP: u64 = 3;

#[derive(Debug, Clone, Default)]
pub struct BranchHist {
    pub then_count: u64,
    pub else_count: u64,
}

#[derive(Debug, Clone, Default)]
pub struct FunctionProfile {
    pub calls: u64,
    pub branches: HashMap<SiteId, BranchHist>,
    pub trips: HashMap<SiteId, HashMap<u64, u64>>,
    pub callees: HashMap<SiteId, HashMap<FunctionId, u64>>,
    /// Ordered observations, deduplicated under lattice equality.
    pub values: HashMap<ObsKey, Vec<ValueSpec>>,
}

/// All per-function observation logs for one runtime instance.
#[derive(Debug, Clone, Default)]
pub struct ProfileStore {
    fns: HashMap<FunctionId, FunctionProfile>,
}

impl ProfileStore {
    pub fn new() -> ProfileStore {
        ProfileStore::default()
    }

    pub fn function(&self, f: FunctionId) -> Option<&FunctionProfile> {
        self.fns.get(&f)
    }

    fn entry(&mut self, f: FunctionId) -> &mut FunctionProfile {
        self.fns.entry(f).or_default()
    }

    pub fn record_call_entered(&mut self, f: FunctionId, param_sites: &[SiteId], args: &[Value]) {
        let p = self.entry(f);
        p.calls += 1;
        for (site, arg) in param_sites.iter().zip(args.iter()) {
            push_obs(&mut p.values, ObsKey::Site(*site), arg);
        }
    }

    pub fn record_branch(&mut self, f: FunctionId, site: SiteId, arm: bool) {
        let hist = self.entry(f).branches.entry(site).or_default();
        if arm {
            hist.then_count += 1;
        } else {
            hist.else_count += 1;
        }
    }

    pub fn record_loop_done(&mut self, f: FunctionId, site: SiteId, trips: u64) {
        *self.entry(f).trips.entry(site).or_default().entry(trips).or_insert(0) += 1;
    }

    pub fn record_value_at(&mut self, f: FunctionId, key: ObsKey, v: &Value) {
        push_obs(&mut self.entry(f).values, key, v);
    }

    pub fn record_callee_at(&mut self, f: FunctionId, site: SiteId, callee: FunctionId) {
        *self.entry(f).callees.entry(site).or_default().entry(callee).or_insert(0) += 1;
    }

    /// Per-site histograms for the stats report.
    pub fn to_json(&self, f: FunctionId) -> serde_json::Value {
        let Some(p) = self.fns.get(&f) else {
            return serde_json::json!({ "calls": 0 });
        };
        let mut branches: Vec<_> = p
            .branches
            .iter()
            .map(|(s, h)| {
                serde_json::json!({ "site": s.0, "then": h.then_count, "else": h.else_count })
            })
            .collect();
        branches.sort_by_key(|v| v["site"].as_u64());
        let mut trips: Vec<_> = p
            .trips
            .iter()
            .map(|(s, h)| {
                let mut counts: Vec<_> = h.iter().collect();
                counts.sort();
                serde_json::json!({
                    "site": s.0,
                    "counts": counts
                        .into_iter()
                        .map(|(t, c)| serde_json::json!([t, c]))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        trips.sort_by_key(|v| v["site"].as_u64());
        let mut values: Vec<_> = p
            .values
            .iter()
            .map(|(k, specs)| {
                serde_json::json!({
                    "key": k.to_string(),
                    "specs": specs.iter().map(|s| s.to_string()).collect::<Vec<_>>()
                })
            })
            .collect();
        values.sort_by_key(|v| v["key"].as_str().map(str::to_string));
        serde_json::json!({
            "calls": p.calls,
            "branches": branches,
            "trips": trips,
            "values": values,
        })
    }
}

fn push_obs(values: &mut HashMap<ObsKey, Vec<ValueSpec>>, key: ObsKey, v: &Value) {
    let spec = spec_of(v);
    let list = values.entry(key).or_default();
    if !list.iter().any(|s| s == &spec) {
        list.push(spec);
    }
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability<T> {
    Stable(T),
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueFact {
    pub joined: ValueSpec,
    /// Exactly one observation, at value level, of a promotable kind
    /// (int, float, bool, or scalar tensor).
    pub const_eligible: bool,
}

/// The unanimous per-site facts summarize() distills from a profile.
#[derive(Debug, Clone, Default)]
pub struct StabilityFacts {
    pub calls: u64,
    pub branches: HashMap<SiteId, Stability<bool>>,
    pub trips: HashMap<SiteId, Stability<u64>>,
    pub callees: HashMap<SiteId, Stability<FunctionId>>,
    pub values: HashMap<ObsKey, ValueFact>,
}

impl StabilityFacts {
    pub fn branch(&self, site: SiteId) -> Option<&Stability<bool>> {
        self.branches.get(&site)
    }

    pub fn trip(&self, site: SiteId) -> Option<&Stability<u64>> {
        self.trips.get(&site)
    }

    pub fn callee(&self, site: SiteId) -> Option<&Stability<FunctionId>> {
        self.callees.get(&site)
    }

    pub fn value(&self, key: &ObsKey) -> Option<&ValueFact> {
        self.values.get(key)
    }

    /// Forgets everything profiled about a site: the next generation treats
    /// it as unstable / unspecializable. Used when an assumption at the site
    /// has repeatedly broken.
    pub fn pin_unspecialized(&mut self, site: SiteId) {
        if let Some(b) = self.branches.get_mut(&site) {
            *b = Stability::Unstable;
        }
        if let Some(t) = self.trips.get_mut(&site) {
            *t = Stability::Unstable;
        }
        if let Some(c) = self.callees.get_mut(&site) {
            *c = Stability::Unstable;
        }
        for (key, fact) in self.values.iter_mut() {
            let key_site = match key {
                ObsKey::Site(s) => *s,
                ObsKey::LoopVar(s, _) => *s,
            };
            if key_site == site {
                fact.joined = ValueSpec::Top;
                fact.const_eligible = false;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum SummarizeResult {
    NotReady { calls: u64, warmup: u64 },
    Ready(StabilityFacts),
}

/// Distills a function's profile into stability facts; `NotReady` until the
/// function has been profiled `warmup` times. Pure: equal inputs give equal
/// facts.
pub fn summarize(store: &ProfileStore, f: FunctionId, warmup: u64) -> SummarizeResult {
    let empty = FunctionProfile::default();
    let p = store.function(f).unwrap_or(&empty);
    if p.calls < warmup {
        return SummarizeResult::NotReady { calls: p.calls, warmup };
    }
    SummarizeResult::Ready(facts_of(p))
}

/// Facts from whatever has been observed so far, regardless of warmup. Used
/// for callee bodies inlined into a caller being generated.
pub fn facts_so_far(store: &ProfileStore, f: FunctionId) -> StabilityFacts {
    store.function(f).map(facts_of).unwrap_or_default()
}

fn facts_of(p: &FunctionProfile) -> StabilityFacts {
    let mut facts = StabilityFacts { calls: p.calls, ..Default::default() };
    for (site, hist) in &p.branches {
        let st = match (hist.then_count, hist.else_count) {
            (n, 0) if n > 0 => Stability::Stable(true),
            (0, n) if n > 0 => Stability::Stable(false),
            _ => Stability::Unstable,
        };
        facts.branches.insert(*site, st);
    }
    for (site, hist) in &p.trips {
        let st = if hist.len() == 1 {
            Stability::Stable(*hist.keys().next().expect("non-empty"))
        } else {
            Stability::Unstable
        };
        facts.trips.insert(*site, st);
    }
    for (site, hist) in &p.callees {
        let st = if hist.len() == 1 {
            Stability::Stable(*hist.keys().next().expect("non-empty"))
        } else {
            Stability::Unstable
        };
        facts.callees.insert(*site, st);
    }
    for (key, specs) in &p.values {
        let joined = specs
            .iter()
            .skip(1)
            .fold(specs[0].clone(), |acc, s| join(&acc, s));
        let const_eligible = specs.len() == 1 && promotable(&specs[0]);
        facts.values.insert(*key, ValueFact { joined, const_eligible });
    }
    facts
}

fn promotable(spec: &ValueSpec) -> bool {
    match spec {
        ValueSpec::Value(v) => match v.kind() {
            ValueKind::Int | ValueKind::Float | ValueKind::Bool => true,
            ValueKind::Tensor => match v {
                Value::Tensor(t) => t.len() == 1,
                _ => unreachable!(),
            },
            _ => false,
        },
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// A standalone recording hook: profiles while interpreting directly.
// ---------------------------------------------------------------------------

/// Interprets every call recursively while recording to a `ProfileStore`.
/// The orchestrator has its own hooks; this one serves profiling tests and
/// warmup-only scenarios.
#[derive(Default)]
pub struct RecordingHooks {
    pub store: ProfileStore,
}

impl ExecHooks for RecordingHooks {
    fn profiling(&self) -> bool {
        true
    }

    fn on_call_entered(&mut self, f: FunctionId, param_sites: &[SiteId], args: &[Value]) {
        self.store.record_call_entered(f, param_sites, args);
    }

    fn on_branch(&mut self, f: FunctionId, site: SiteId, arm: bool) {
        self.store.record_branch(f, site, arm);
    }

    fn on_loop_done(&mut self, f: FunctionId, site: SiteId, trips: u64) {
        self.store.record_loop_done(f, site, trips);
    }

    fn on_value_at(&mut self, f: FunctionId, key: ObsKey, v: &Value) {
        self.store.record_value_at(f, key, v);
    }

    fn on_callee_at(&mut self, f: FunctionId, site: SiteId, callee: FunctionId) {
        self.store.record_callee_at(f, site, callee);
    }

    fn route(
        &mut self,
        program: &Program,
        env: &mut RtEnv,
        callee: FunctionId,
        args: Vec<Value>,
        span: SourceSpan,
    ) -> Result<Value, RtError> {
        interpret_call(program, env, self, callee, args, Some(span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assume::Dim;
    use crate::frontend::load_program;
    use crate::runtime::{run_program, DirectHooks, Tensor};

    #[test]
    fn branch_histograms_and_unanimity() {
        let mut store = ProfileStore::new();
        let f = FunctionId(0);
        for _ in 0..3 {
            store.record_branch(f, SiteId(7), true);
        }
        store.record_call_entered(f, &[], &[]);
        store.record_call_entered(f, &[], &[]);
        store.record_call_entered(f, &[], &[]);
        match summarize(&store, f, 3) {
            SummarizeResult::Ready(facts) => {
                assert_eq!(facts.branch(SiteId(7)), Some(&Stability::Stable(true)));
            }
            _ => panic!("warmup met"),
        }
        store.record_branch(f, SiteId(7), false);
        match summarize(&store, f, 3) {
            SummarizeResult::Ready(facts) => {
                assert_eq!(facts.branch(SiteId(7)), Some(&Stability::Unstable));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn not_ready_until_warmup() {
        let mut store = ProfileStore::new();
        let f = FunctionId(0);
        store.record_call_entered(f, &[], &[]);
        assert!(matches!(summarize(&store, f, 3), SummarizeResult::NotReady { calls: 1, warmup: 3 }));
    }

    #[test]
    fn trip_histogram() {
        let mut store = ProfileStore::new();
        let f = FunctionId(0);
        for _ in 0..4 {
            store.record_loop_done(f, SiteId(9), 3);
            store.record_call_entered(f, &[], &[]);
        }
        match summarize(&store, f, 3) {
            SummarizeResult::Ready(facts) => {
                assert_eq!(facts.trip(SiteId(9)), Some(&Stability::Stable(3)));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn shape_observations_join_to_partial_shape() {
        let mut store = ProfileStore::new();
        let f = FunctionId(0);
        let key = ObsKey::Site(SiteId(2));
        store.record_value_at(f, key, &Value::Tensor(Tensor::filled(vec![4, 8], 0.0)));
        store.record_value_at(f, key, &Value::Tensor(Tensor::filled(vec![3, 8], 0.0)));
        for _ in 0..3 {
            store.record_call_entered(f, &[], &[]);
        }
        match summarize(&store, f, 3) {
            SummarizeResult::Ready(facts) => {
                let fact = facts.value(&key).unwrap();
                assert_eq!(
                    fact.joined,
                    ValueSpec::PartialShape(vec![Dim::Unknown, Dim::Known(8)])
                );
                assert!(!fact.const_eligible);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn observations_deduplicate_under_lattice_equality() {
        let mut store = ProfileStore::new();
        let f = FunctionId(0);
        let key = ObsKey::Site(SiteId(2));
        for _ in 0..10 {
            store.record_value_at(f, key, &Value::Int(7));
        }
        assert_eq!(store.function(f).unwrap().values[&key].len(), 1);
        store.record_value_at(f, key, &Value::Int(8));
        assert_eq!(store.function(f).unwrap().values[&key].len(), 2);
    }

    #[test]
    fn constant_eligibility() {
        let mut store = ProfileStore::new();
        let f = FunctionId(0);
        store.record_value_at(f, ObsKey::Site(SiteId(1)), &Value::Float(0.5));
        store.record_value_at(f, ObsKey::Site(SiteId(2)), &Value::Tensor(Tensor::scalar(1.0)));
        store.record_value_at(f, ObsKey::Site(SiteId(3)), &Value::Tensor(Tensor::filled(vec![2], 0.0)));
        store.record_value_at(f, ObsKey::Site(SiteId(4)), &Value::List(crate::runtime::HeapId(5)));
        for _ in 0..3 {
            store.record_call_entered(f, &[], &[]);
        }
        let facts = match summarize(&store, f, 3) {
            SummarizeResult::Ready(f) => f,
            _ => panic!(),
        };
        assert!(facts.value(&ObsKey::Site(SiteId(1))).unwrap().const_eligible);
        assert!(facts.value(&ObsKey::Site(SiteId(2))).unwrap().const_eligible, "scalar tensor");
        assert!(!facts.value(&ObsKey::Site(SiteId(3))).unwrap().const_eligible, "multi-element");
        assert!(!facts.value(&ObsKey::Site(SiteId(4))).unwrap().const_eligible, "list never");
    }

    #[test]
    fn summarize_is_pure() {
        let mut store = ProfileStore::new();
        let f = FunctionId(0);
        for _ in 0..3 {
            store.record_call_entered(f, &[SiteId(1)], &[Value::Int(1)]);
            store.record_branch(f, SiteId(5), true);
        }
        let a = match summarize(&store, f, 3) {
            SummarizeResult::Ready(x) => x,
            _ => panic!(),
        };
        let b = match summarize(&store, f, 3) {
            SummarizeResult::Ready(x) => x,
            _ => panic!(),
        };
        assert_eq!(format!("{:?}", a.branches), format!("{:?}", b.branches));
        assert_eq!(a.values[&ObsKey::Site(SiteId(1))], b.values[&ObsKey::Site(SiteId(1))]);
    }

    #[test]
    fn recording_does_not_change_semantics() {
        let src = "let g = record { total: 0 }\n\
            fn tally(xs) {\n\
              let s = 0\n\
              for x in xs {\n\
                if x > 2 { s = s + x } else { s = s - x }\n\
              }\n\
              g.total = g.total + s\n\
              return s\n\
            }\n\
            print(tally([1, 2, 3]))\nprint(tally([4, 5, 6]))\nprint(g.total)";
        let program = load_program(src).unwrap();
        let mut env_plain = RtEnv::new();
        run_program(&program, &mut env_plain, &mut DirectHooks).unwrap();
        let mut env_prof = RtEnv::new();
        let mut hooks = RecordingHooks::default();
        run_program(&program, &mut env_prof, &mut hooks).unwrap();
        assert_eq!(env_plain.transcript, env_prof.transcript);
        // The profile actually accumulated: tally ran twice with loop trips 3.
        let tally = FunctionId(0);
        let p = hooks.store.function(tally).unwrap();
        assert_eq!(p.calls, 2);
        let trip_hist = p.trips.values().next().unwrap();
        assert_eq!(trip_hist.get(&3), Some(&2));
    }
}
