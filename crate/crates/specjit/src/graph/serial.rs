//! Deterministic graph serialization: JSON (round-trippable) and DOT.
//!
//! Nodes serialize in id order and map keys sort, so equal graphs produce
//! byte-equal output. Floats and tensor elements encode as hex bit patterns
//! to round-trip exactly (a display value accompanies floats for humans).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value as Json};

use super::{AssertCheck, Graph, GraphBuilder, GraphId, Node, NodeId, NodeKind, Port};
use crate::assume::{
    Assumption, AssumptionPayload, AssumptionSet, Dim, ValidationMode, ValueSpec,
};
use crate::frontend::{BinOpKind, SiteId, UnOpKind};
use crate::runtime::{Builtin, FunctionId, HeapId, ObsKey, Tensor, Value, ValueKind};

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string_pretty(&graph_json(g)).expect("serialization is infallible")
}

pub fn from_json(text: &str) -> Result<Graph, String> {
    let v: Json = serde_json::from_str(text).map_err(|e| e.to_string())?;
    graph_from(&v)
}

/// Structural equality via the deterministic serialization.
pub fn structurally_equal(a: &Graph, b: &Graph) -> bool {
    graph_json(a) == graph_json(b)
}

fn graph_json(g: &Graph) -> Json {
    let subgraphs: Map<String, Json> =
        g.subgraphs.iter().map(|(id, sub)| (id.0.to_string(), graph_json(sub))).collect();
    json!({
        "id": g.id.0,
        "nodes": g.nodes.iter().map(node_json).collect::<Vec<_>>(),
        "outputs": g.outputs.iter().map(|(n, p)| json!([n.0, p])).collect::<Vec<_>>(),
        "subgraphs": subgraphs,
        "assumptions": g.assumptions.iter().map(assumption_json).collect::<Vec<_>>(),
    })
}

fn node_json(n: &Node) -> Json {
    json!({
        "id": n.id.0,
        "kind": n.kind.name(),
        "attrs": attrs_json(&n.kind),
        "inputs": n.inputs.iter().map(|(p, o)| json!([p.0, o])).collect::<Vec<_>>(),
        "ctrl": n.ctrl.iter().map(|c| c.0).collect::<Vec<_>>(),
    })
}

fn attrs_json(kind: &NodeKind) -> Json {
    match kind {
        NodeKind::Const(v) => json!({ "value": value_json(v) }),
        NodeKind::Arg(i) => json!({ "index": i }),
        NodeKind::BinOp(op) => json!({ "op": format!("{op:?}") }),
        NodeKind::UnOp(op) => json!({ "op": format!("{op:?}") }),
        NodeKind::Builtin(b) => json!({ "name": b.name() }),
        NodeKind::ListMake(n) => json!({ "n": n }),
        NodeKind::Enter(frame) => json!({ "frame": frame }),
        NodeKind::Invoke { target, seq } => json!({ "target": target.0, "seq": seq }),
        NodeKind::GetAttr(name) => json!({ "name": name }),
        NodeKind::SetAttr { name, seq } => json!({ "name": name, "seq": seq }),
        NodeKind::SetSubscr { seq } => json!({ "seq": seq }),
        NodeKind::ListAppend { seq } => json!({ "seq": seq }),
        NodeKind::Print { seq } => json!({ "seq": seq }),
        NodeKind::Assert { assumption, check } => {
            json!({ "assumption": format!("{:016x}", assumption.0), "check": check_json(check) })
        }
        _ => json!({}),
    }
}

fn check_json(c: &AssertCheck) -> Json {
    match c {
        AssertCheck::EqInt(n) => json!({ "t": "eq_int", "n": n }),
        AssertCheck::EqArm(arm) => json!({ "t": "eq_arm", "arm": arm }),
        AssertCheck::ShapeMatch(spec) => json!({ "t": "shape_match", "spec": spec_json(spec) }),
        AssertCheck::RefEq(v) => json!({ "t": "ref_eq", "v": value_json(v) }),
        AssertCheck::ValueEq(v) => json!({ "t": "value_eq", "v": value_json(v) }),
    }
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Int(x) => json!({ "t": "int", "v": x }),
        Value::Float(x) => {
            json!({ "t": "float", "bits": format!("{:016x}", x.to_bits()), "v": format!("{x}") })
        }
        Value::Bool(b) => json!({ "t": "bool", "v": b }),
        Value::Str(s) => json!({ "t": "str", "v": &**s }),
        Value::Tensor(t) => json!({
            "t": "tensor",
            "shape": t.shape.iter().copied().collect::<Vec<usize>>(),
            "bits": t.data.iter().map(|x| format!("{:016x}", x.to_bits())).collect::<Vec<_>>(),
        }),
        Value::List(id) => json!({ "t": "list", "id": id.0 }),
        Value::Record(id) => json!({ "t": "record", "id": id.0 }),
        Value::Fn(id) => json!({ "t": "fn", "id": id.0 }),
        Value::Nil => json!({ "t": "nil" }),
    }
}

fn spec_json(s: &ValueSpec) -> Json {
    match s {
        ValueSpec::Value(v) => json!({ "level": "value", "v": value_json(v) }),
        ValueSpec::Shape(dims) => json!({ "level": "shape", "dims": dims }),
        ValueSpec::PartialShape(dims) => json!({
            "level": "partial_shape",
            "dims": dims
                .iter()
                .map(|d| match d {
                    Dim::Known(v) => json!(v),
                    Dim::Unknown => Json::Null,
                })
                .collect::<Vec<_>>(),
        }),
        ValueSpec::Kind(k) => json!({ "level": "kind", "kind": format!("{k:?}") }),
        ValueSpec::Top => json!({ "level": "top" }),
    }
}

fn assumption_json(a: &Assumption) -> Json {
    let payload = match &a.payload {
        AssumptionPayload::BranchStable { site, arm } => {
            json!({ "t": "branch", "site": site.0, "arm": arm })
        }
        AssumptionPayload::TripCount { site, n } => json!({ "t": "trip", "site": site.0, "n": n }),
        AssumptionPayload::CalleeStable { site, callee } => {
            json!({ "t": "callee", "site": site.0, "fn": callee.0 })
        }
        AssumptionPayload::ValueSpecAt { key, spec } => {
            let key_json = match key {
                ObsKey::Site(s) => json!({ "t": "site", "site": s.0 }),
                ObsKey::LoopVar(s, slot) => json!({ "t": "loop_var", "site": s.0, "slot": slot }),
            };
            json!({ "t": "value_spec", "key": key_json, "spec": spec_json(spec) })
        }
    };
    json!({
        "id": format!("{:016x}", a.id.0),
        "mode": a.mode.letter().to_string(),
        "payload": payload,
    })
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

fn field<'a>(v: &'a Json, name: &str) -> Result<&'a Json, String> {
    v.get(name).ok_or_else(|| format!("missing field `{name}`"))
}

fn as_u64(v: &Json) -> Result<u64, String> {
    v.as_u64().ok_or_else(|| format!("expected unsigned integer, got {v}"))
}

fn as_str<'a>(v: &'a Json) -> Result<&'a str, String> {
    v.as_str().ok_or_else(|| format!("expected string, got {v}"))
}

fn bits_f64(v: &Json) -> Result<f64, String> {
    let s = as_str(v)?;
    u64::from_str_radix(s, 16).map(f64::from_bits).map_err(|e| e.to_string())
}

fn graph_from(v: &Json) -> Result<Graph, String> {
    let id = GraphId(as_u64(field(v, "id")?)? as u32);
    let mut b = GraphBuilder::new();
    for (i, nv) in field(v, "nodes")?.as_array().ok_or("nodes must be an array")?.iter().enumerate()
    {
        let nid = as_u64(field(nv, "id")?)? as usize;
        if nid != i {
            return Err(format!("node ids must be dense and ordered, got {nid} at {i}"));
        }
        let kind = kind_from(as_str(field(nv, "kind")?)?, field(nv, "attrs")?)?;
        let inputs = ports_from(field(nv, "inputs")?)?;
        let added = b.add(kind, inputs);
        for c in field(nv, "ctrl")?.as_array().ok_or("ctrl must be an array")? {
            let dep = NodeId(as_u64(c)? as u32);
            b.nodes[added.index()].ctrl.push(dep);
        }
    }
    let outputs = ports_from(field(v, "outputs")?)?;
    let mut subgraphs = BTreeMap::new();
    for (key, sub) in field(v, "subgraphs")?.as_object().ok_or("subgraphs must be an object")? {
        let sub_id: u32 = key.parse().map_err(|_| "bad subgraph key")?;
        subgraphs.insert(GraphId(sub_id), graph_from(sub)?);
    }
    let mut assumptions = Vec::new();
    for av in field(v, "assumptions")?.as_array().ok_or("assumptions must be an array")? {
        assumptions.push(assumption_from(av)?);
    }
    Ok(b.finish(id, outputs, subgraphs, AssumptionSet::new(assumptions)))
}

fn ports_from(v: &Json) -> Result<Vec<Port>, String> {
    let mut out = Vec::new();
    for p in v.as_array().ok_or("expected array of ports")? {
        let pair = p.as_array().ok_or("port must be [node, out]")?;
        if pair.len() != 2 {
            return Err("port must be [node, out]".to_string());
        }
        out.push((NodeId(as_u64(&pair[0])? as u32), as_u64(&pair[1])? as u8));
    }
    Ok(out)
}

fn kind_from(name: &str, attrs: &Json) -> Result<NodeKind, String> {
    Ok(match name {
        "Const" => NodeKind::Const(value_from(field(attrs, "value")?)?),
        "Arg" => NodeKind::Arg(as_u64(field(attrs, "index")?)? as u32),
        "BinOp" => NodeKind::BinOp(binop_from(as_str(field(attrs, "op")?)?)?),
        "UnOp" => NodeKind::UnOp(match as_str(field(attrs, "op")?)? {
            "Neg" => UnOpKind::Neg,
            "Not" => UnOpKind::Not,
            other => return Err(format!("unknown unop {other}")),
        }),
        "Builtin" => NodeKind::Builtin(
            Builtin::from_name(as_str(field(attrs, "name")?)?)
                .ok_or_else(|| "unknown builtin".to_string())?,
        ),
        "TensorFromList" => NodeKind::TensorFromList,
        "ListMake" => NodeKind::ListMake(as_u64(field(attrs, "n")?)? as u32),
        "Switch" => NodeKind::Switch,
        "Merge" => NodeKind::Merge,
        "Enter" => NodeKind::Enter(as_str(field(attrs, "frame")?)?.to_string()),
        "Exit" => NodeKind::Exit,
        "NextIteration" => NodeKind::NextIteration,
        "LoopCond" => NodeKind::LoopCond,
        "Invoke" => NodeKind::Invoke {
            target: GraphId(as_u64(field(attrs, "target")?)? as u32),
            seq: as_u64(field(attrs, "seq")?)? as u32,
        },
        "GetAttr" => NodeKind::GetAttr(as_str(field(attrs, "name")?)?.to_string()),
        "SetAttr" => NodeKind::SetAttr {
            name: as_str(field(attrs, "name")?)?.to_string(),
            seq: as_u64(field(attrs, "seq")?)? as u32,
        },
        "GetSubscr" => NodeKind::GetSubscr,
        "SetSubscr" => NodeKind::SetSubscr { seq: as_u64(field(attrs, "seq")?)? as u32 },
        "ListAppend" => NodeKind::ListAppend { seq: as_u64(field(attrs, "seq")?)? as u32 },
        "Print" => NodeKind::Print { seq: as_u64(field(attrs, "seq")?)? as u32 },
        "Assert" => {
            let id = u64::from_str_radix(as_str(field(attrs, "assumption")?)?, 16)
                .map_err(|e| e.to_string())?;
            NodeKind::Assert {
                assumption: crate::assume::AssumptionId(id),
                check: check_from(field(attrs, "check")?)?,
            }
        }
        "Identity" => NodeKind::Identity,
        other => return Err(format!("unknown node kind {other}")),
    })
}

fn binop_from(s: &str) -> Result<BinOpKind, String> {
    Ok(match s {
        "Add" => BinOpKind::Add,
        "Sub" => BinOpKind::Sub,
        "Mul" => BinOpKind::Mul,
        "Div" => BinOpKind::Div,
        "Mod" => BinOpKind::Mod,
        "Pow" => BinOpKind::Pow,
        "Eq" => BinOpKind::Eq,
        "Ne" => BinOpKind::Ne,
        "Lt" => BinOpKind::Lt,
        "Le" => BinOpKind::Le,
        "Gt" => BinOpKind::Gt,
        "Ge" => BinOpKind::Ge,
        "And" => BinOpKind::And,
        "Or" => BinOpKind::Or,
        other => return Err(format!("unknown binop {other}")),
    })
}

fn check_from(v: &Json) -> Result<AssertCheck, String> {
    Ok(match as_str(field(v, "t")?)? {
        "eq_int" => AssertCheck::EqInt(field(v, "n")?.as_i64().ok_or("bad n")?),
        "eq_arm" => AssertCheck::EqArm(field(v, "arm")?.as_bool().ok_or("bad arm")?),
        "shape_match" => AssertCheck::ShapeMatch(spec_from(field(v, "spec")?)?),
        "ref_eq" => AssertCheck::RefEq(value_from(field(v, "v")?)?),
        "value_eq" => AssertCheck::ValueEq(value_from(field(v, "v")?)?),
        other => return Err(format!("unknown check {other}")),
    })
}

pub fn value_from(v: &Json) -> Result<Value, String> {
    Ok(match as_str(field(v, "t")?)? {
        "int" => Value::Int(field(v, "v")?.as_i64().ok_or("bad int")?),
        "float" => Value::Float(bits_f64(field(v, "bits")?)?),
        "bool" => Value::Bool(field(v, "v")?.as_bool().ok_or("bad bool")?),
        "str" => Value::Str(Arc::from(as_str(field(v, "v")?)?)),
        "tensor" => {
            let shape: Vec<usize> = field(v, "shape")?
                .as_array()
                .ok_or("bad shape")?
                .iter()
                .map(|d| as_u64(d).map(|x| x as usize))
                .collect::<Result<_, _>>()?;
            let data: Vec<f64> = field(v, "bits")?
                .as_array()
                .ok_or("bad bits")?
                .iter()
                .map(bits_f64)
                .collect::<Result<_, _>>()?;
            Value::Tensor(Tensor::new(shape, data))
        }
        "list" => Value::List(HeapId(as_u64(field(v, "id")?)? as u32)),
        "record" => Value::Record(HeapId(as_u64(field(v, "id")?)? as u32)),
        "fn" => Value::Fn(FunctionId(as_u64(field(v, "id")?)? as u32)),
        "nil" => Value::Nil,
        other => return Err(format!("unknown value tag {other}")),
    })
}

fn spec_from(v: &Json) -> Result<ValueSpec, String> {
    Ok(match as_str(field(v, "level")?)? {
        "value" => ValueSpec::Value(value_from(field(v, "v")?)?),
        "shape" => ValueSpec::Shape(
            field(v, "dims")?
                .as_array()
                .ok_or("bad dims")?
                .iter()
                .map(|d| as_u64(d).map(|x| x as usize))
                .collect::<Result<_, _>>()?,
        ),
        "partial_shape" => ValueSpec::PartialShape(
            field(v, "dims")?
                .as_array()
                .ok_or("bad dims")?
                .iter()
                .map(|d| {
                    if d.is_null() {
                        Ok(Dim::Unknown)
                    } else {
                        as_u64(d).map(|x| Dim::Known(x as usize))
                    }
                })
                .collect::<Result<_, _>>()?,
        ),
        "kind" => ValueSpec::Kind(match as_str(field(v, "kind")?)? {
            "Int" => ValueKind::Int,
            "Float" => ValueKind::Float,
            "Bool" => ValueKind::Bool,
            "Str" => ValueKind::Str,
            "Tensor" => ValueKind::Tensor,
            "List" => ValueKind::List,
            "Record" => ValueKind::Record,
            "Fn" => ValueKind::Fn,
            "Nil" => ValueKind::Nil,
            other => return Err(format!("unknown kind {other}")),
        }),
        "top" => ValueSpec::Top,
        other => return Err(format!("unknown spec level {other}")),
    })
}

fn assumption_from(v: &Json) -> Result<Assumption, String> {
    let mode = match as_str(field(v, "mode")?)? {
        "D" => ValidationMode::DispatchChecked,
        "R" => ValidationMode::RuntimeAsserted,
        other => return Err(format!("unknown mode {other}")),
    };
    let p = field(v, "payload")?;
    let payload = match as_str(field(p, "t")?)? {
        "branch" => AssumptionPayload::BranchStable {
            site: SiteId(as_u64(field(p, "site")?)? as u32),
            arm: field(p, "arm")?.as_bool().ok_or("bad arm")?,
        },
        "trip" => AssumptionPayload::TripCount {
            site: SiteId(as_u64(field(p, "site")?)? as u32),
            n: as_u64(field(p, "n")?)?,
        },
        "callee" => AssumptionPayload::CalleeStable {
            site: SiteId(as_u64(field(p, "site")?)? as u32),
            callee: FunctionId(as_u64(field(p, "fn")?)? as u32),
        },
        "value_spec" => {
            let key = field(p, "key")?;
            let obs = match as_str(field(key, "t")?)? {
                "site" => ObsKey::Site(SiteId(as_u64(field(key, "site")?)? as u32)),
                "loop_var" => ObsKey::LoopVar(
                    SiteId(as_u64(field(key, "site")?)? as u32),
                    as_u64(field(key, "slot")?)? as u16,
                ),
                other => return Err(format!("unknown key {other}")),
            };
            AssumptionPayload::ValueSpecAt { key: obs, spec: spec_from(field(p, "spec")?)? }
        }
        other => return Err(format!("unknown payload {other}")),
    };
    Ok(Assumption::new(payload, mode))
}

// ---------------------------------------------------------------------------
// DOT
// ---------------------------------------------------------------------------

/// Renders the graph in Graphviz DOT: data edges solid, control edges
/// dashed, Assert nodes as diamonds. Subgraphs become clusters.
pub fn to_dot(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph g{} {{\n", g.id.0));
    dot_body(g, "", &mut out);
    for sub in g.subgraphs.values() {
        out.push_str(&format!("  subgraph cluster_g{} {{\n    label=\"g{}\";\n", sub.id.0, sub.id.0));
        dot_body(sub, &format!("g{}_", sub.id.0), &mut out);
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

fn dot_body(g: &Graph, prefix: &str, out: &mut String) {
    for n in &g.nodes {
        let shape = if matches!(n.kind, NodeKind::Assert { .. }) { "diamond" } else { "box" };
        let label = node_label(&n.kind);
        out.push_str(&format!(
            "  {prefix}n{} [label=\"{}\" shape={shape}];\n",
            n.id.0,
            label.replace('"', "\\\"")
        ));
    }
    for n in &g.nodes {
        for (p, port) in &n.inputs {
            out.push_str(&format!(
                "  {prefix}n{} -> {prefix}n{} [style=solid taillabel=\"{port}\"];\n",
                p.0, n.id.0
            ));
        }
        for c in &n.ctrl {
            out.push_str(&format!("  {prefix}n{} -> {prefix}n{} [style=dashed];\n", c.0, n.id.0));
        }
    }
    for (i, (p, port)) in g.outputs.iter().enumerate() {
        out.push_str(&format!("  {prefix}out{i} [label=\"out{i}\" shape=plaintext];\n"));
        out.push_str(&format!("  {prefix}n{} -> {prefix}out{i} [taillabel=\"{port}\"];\n", p.0));
    }
}

fn node_label(kind: &NodeKind) -> String {
    match kind {
        NodeKind::Const(v) => format!("Const {}", short_value(v)),
        NodeKind::Arg(i) => format!("Arg {i}"),
        NodeKind::BinOp(op) => format!("{:?}", op),
        NodeKind::UnOp(op) => format!("{:?}", op),
        NodeKind::Builtin(b) => b.name().to_string(),
        NodeKind::Enter(f) => format!("Enter {f}"),
        NodeKind::Invoke { target, .. } => format!("Invoke g{}", target.0),
        NodeKind::GetAttr(a) => format!("GetAttr .{a}"),
        NodeKind::SetAttr { name, seq } => format!("SetAttr .{name} #{seq}"),
        NodeKind::SetSubscr { seq } => format!("SetSubscr #{seq}"),
        NodeKind::ListAppend { seq } => format!("Append #{seq}"),
        NodeKind::Print { seq } => format!("Print #{seq}"),
        NodeKind::Assert { check, .. } => match check {
            AssertCheck::EqInt(n) => format!("Assert =={n}"),
            AssertCheck::EqArm(a) => format!("Assert arm={a}"),
            AssertCheck::ShapeMatch(s) => format!("Assert {s}"),
            AssertCheck::RefEq(v) => format!("Assert ref=={}", short_value(v)),
            AssertCheck::ValueEq(v) => format!("Assert =={}", short_value(v)),
        },
        other => other.name().to_string(),
    }
}

fn short_value(v: &Value) -> String {
    match v {
        Value::Int(x) => x.to_string(),
        Value::Float(x) => format!("{x}"),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => format!("{s:?}"),
        Value::Tensor(t) => format!("tensor{:?}", &*t.shape),
        Value::List(id) => format!("list#{}", id.0),
        Value::Record(id) => format!("record#{}", id.0),
        Value::Fn(id) => format!("fn#{}", id.0),
        Value::Nil => "nil".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;


    fn sample_graph() -> Graph {
        let mut b = GraphBuilder::new();
        let x = b.add(NodeKind::Arg(0), vec![]);
        let c = b.add(NodeKind::Const(Value::Float(0.5)), vec![]);
        let mul = b.add(NodeKind::BinOp(BinOpKind::Mul), vec![(c, 0), (x, 0)]);
        let trip = Assumption::new(
            AssumptionPayload::TripCount { site: SiteId(9), n: 3 },
            ValidationMode::RuntimeAsserted,
        );
        let assert = b.add(
            NodeKind::Assert { assumption: trip.id, check: AssertCheck::EqInt(3) },
            vec![(x, 0)],
        );
        let p = b.add(NodeKind::Print { seq: 0 }, vec![(mul, 0)]);
        b.add_ctrl(p, assert);
        b.finish(GraphId(7), vec![(mul, 0)], BTreeMap::new(), AssumptionSet::new(vec![trip]))
    }

    #[test]
    fn json_round_trip() {
        let g = sample_graph();
        let text = to_json(&g);
        let back = from_json(&text).unwrap();
        assert!(structurally_equal(&g, &back));
        // Determinism: serializing twice gives byte-equal output.
        assert_eq!(text, to_json(&back));
    }

    #[test]
    fn empty_graph_serializes() {
        let g = Graph::default();
        let text = to_json(&g);
        assert!(text.contains("\"nodes\": []"));
        assert!(text.contains("\"outputs\": []"));
        let back = from_json(&text).unwrap();
        assert!(structurally_equal(&g, &back));
    }

    #[test]
    fn float_bits_round_trip_exactly() {
        let mut b = GraphBuilder::new();
        b.add(NodeKind::Const(Value::Float(f64::NAN)), vec![]);
        b.add(NodeKind::Const(Value::Float(-0.0)), vec![]);
        let g = b.finish(GraphId(0), vec![], BTreeMap::new(), AssumptionSet::default());
        let back = from_json(&to_json(&g)).unwrap();
        match (&back.nodes[0].kind, &back.nodes[1].kind) {
            (NodeKind::Const(Value::Float(a)), NodeKind::Const(Value::Float(b))) => {
                assert!(a.is_nan());
                assert_eq!(b.to_bits(), (-0.0f64).to_bits());
            }
            _ => panic!(),
        }
    }

    #[test]
    fn dot_marks_assert_as_diamond_and_ctrl_as_dashed() {
        let dot = to_dot(&sample_graph());
        assert!(dot.contains("shape=diamond"));
        assert!(dot.contains("style=dashed"));
        assert!(dot.contains("style=solid"));
    }

    #[test]
    fn tensor_values_round_trip() {
        let mut b = GraphBuilder::new();
        b.add(NodeKind::Const(Value::Tensor(Tensor::new(vec![2], vec![1.5, -2.5]))), vec![]);
        let g = b.finish(GraphId(0), vec![], BTreeMap::new(), AssumptionSet::default());
        let back = from_json(&to_json(&g)).unwrap();
        assert!(structurally_equal(&g, &back));
    }
}
