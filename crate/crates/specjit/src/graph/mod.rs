//! The symbolic dataflow graph.
//!
//! Vertices are pure compute nodes, control-flow primitives (switch/merge
//! and Enter/Exit/NextIteration loop frames), state-access nodes, and
//! assertion nodes. Data edges carry values between output ports and input
//! slots; control edges only order execution (they never gate deadness,
//! which flows through data edges). Effectful nodes carry a unique seq
//! index; seq order is program order.

pub mod serial;
pub mod validate;

use std::collections::BTreeMap;

use crate::assume::{AssumptionId, AssumptionSet, ValueSpec};
use crate::frontend::{BinOpKind, UnOpKind};
use crate::runtime::{Builtin, Value};

pub use validate::{validate, StructuralError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A producer output: (node, output port).
pub type Port = (NodeId, u8);

/// Comparator attached to an Assert node.
#[derive(Debug, Clone, PartialEq)]
pub enum AssertCheck {
    EqInt(i64),
    EqArm(bool),
    ShapeMatch(ValueSpec),
    /// Reference identity against an expected handle (or function value).
    RefEq(Value),
    /// Bit-exact deep comparison against an expected constant.
    ValueEq(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Const(Value),
    Arg(u32),
    BinOp(BinOpKind),
    UnOp(UnOpKind),
    Builtin(Builtin),
    TensorFromList,
    ListMake(u32),
    Switch,
    Merge,
    Enter(String),
    Exit,
    NextIteration,
    LoopCond,
    Invoke { target: GraphId, seq: u32 },
    GetAttr(String),
    SetAttr { name: String, seq: u32 },
    GetSubscr,
    SetSubscr { seq: u32 },
    ListAppend { seq: u32 },
    Print { seq: u32 },
    Assert { assumption: AssumptionId, check: AssertCheck },
    Identity,
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Const(_) => "Const",
            NodeKind::Arg(_) => "Arg",
            NodeKind::BinOp(_) => "BinOp",
            NodeKind::UnOp(_) => "UnOp",
            NodeKind::Builtin(_) => "Builtin",
            NodeKind::TensorFromList => "TensorFromList",
            NodeKind::ListMake(_) => "ListMake",
            NodeKind::Switch => "Switch",
            NodeKind::Merge => "Merge",
            NodeKind::Enter(_) => "Enter",
            NodeKind::Exit => "Exit",
            NodeKind::NextIteration => "NextIteration",
            NodeKind::LoopCond => "LoopCond",
            NodeKind::Invoke { .. } => "Invoke",
            NodeKind::GetAttr(_) => "GetAttr",
            NodeKind::SetAttr { .. } => "SetAttr",
            NodeKind::GetSubscr => "GetSubscr",
            NodeKind::SetSubscr { .. } => "SetSubscr",
            NodeKind::ListAppend { .. } => "ListAppend",
            NodeKind::Print { .. } => "Print",
            NodeKind::Assert { .. } => "Assert",
            NodeKind::Identity => "Identity",
        }
    }

    /// Required input count; `None` means variadic (checked elsewhere).
    pub fn in_arity(&self) -> Option<usize> {
        Some(match self {
            NodeKind::Const(_) | NodeKind::Arg(_) => 0,
            NodeKind::BinOp(_) | NodeKind::GetSubscr => 2,
            NodeKind::UnOp(_)
            | NodeKind::TensorFromList
            | NodeKind::Enter(_)
            | NodeKind::Exit
            | NodeKind::NextIteration
            | NodeKind::LoopCond
            | NodeKind::GetAttr(_)
            | NodeKind::Identity
            | NodeKind::Assert { .. } => 1,
            NodeKind::Switch | NodeKind::SetAttr { .. } | NodeKind::ListAppend { .. } => 2,
            NodeKind::SetSubscr { .. } => 3,
            NodeKind::Builtin(b) => match b {
                Builtin::Matmul => 2,
                _ => 1,
            },
            NodeKind::ListMake(n) => *n as usize,
            NodeKind::Merge | NodeKind::Invoke { .. } | NodeKind::Print { .. } => return None,
        })
    }

    /// Number of output ports consumers may reference.
    pub fn out_arity(&self) -> usize {
        match self {
            NodeKind::SetAttr { .. }
            | NodeKind::SetSubscr { .. }
            | NodeKind::ListAppend { .. }
            | NodeKind::Print { .. }
            | NodeKind::Assert { .. } => 0,
            NodeKind::Switch | NodeKind::Merge => 2,
            _ => 1,
        }
    }

    /// The seq index for nodes participating in program-order effects.
    /// Invoke carries one because its subgraph may contain effects.
    pub fn seq(&self) -> Option<u32> {
        match self {
            NodeKind::SetAttr { seq, .. }
            | NodeKind::SetSubscr { seq }
            | NodeKind::ListAppend { seq }
            | NodeKind::Print { seq }
            | NodeKind::Invoke { seq, .. } => Some(*seq),
            _ => None,
        }
    }

    pub fn is_effect(&self) -> bool {
        matches!(
            self,
            NodeKind::SetAttr { .. }
                | NodeKind::SetSubscr { .. }
                | NodeKind::ListAppend { .. }
                | NodeKind::Print { .. }
        )
    }

    /// Reads heap state when fired (must be ordered after writes).
    pub fn reads_state(&self) -> bool {
        match self {
            NodeKind::GetAttr(_) | NodeKind::GetSubscr | NodeKind::TensorFromList => true,
            NodeKind::Builtin(b) => b.reads_heap(),
            _ => false,
        }
    }

    /// Allocates a fresh heap object per firing; never folded or merged.
    pub fn allocates(&self) -> bool {
        match self {
            NodeKind::ListMake(_) => true,
            NodeKind::Builtin(b) => b.allocates(),
            _ => false,
        }
    }

    pub fn is_control_flow(&self) -> bool {
        matches!(
            self,
            NodeKind::Switch
                | NodeKind::Merge
                | NodeKind::Enter(_)
                | NodeKind::Exit
                | NodeKind::NextIteration
                | NodeKind::LoopCond
        )
    }

    /// Pure compute: safe to evaluate speculatively, no state, no effects.
    pub fn is_pure_compute(&self) -> bool {
        matches!(
            self,
            NodeKind::Const(_)
                | NodeKind::BinOp(_)
                | NodeKind::UnOp(_)
                | NodeKind::Identity
        ) || matches!(self, NodeKind::Builtin(b) if !b.reads_heap() && !b.allocates() && !b.is_effectful())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub inputs: Vec<Port>,
    /// Ordering-only control dependencies.
    pub ctrl: Vec<NodeId>,
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    pub id: GraphId,
    pub nodes: Vec<Node>,
    /// Ordered return-value ports.
    pub outputs: Vec<Port>,
    /// Invoke targets by graph id. A self-recursive Invoke names this
    /// graph's own id and is not stored here.
    pub subgraphs: BTreeMap<GraphId, Graph>,
    pub assumptions: AssumptionSet,
}

impl Default for GraphId {
    fn default() -> Self {
        GraphId(0)
    }
}

impl Graph {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total node count including subgraphs.
    pub fn total_nodes(&self) -> usize {
        self.nodes.len() + self.subgraphs.values().map(Graph::total_nodes).sum::<usize>()
    }

    pub fn arg_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Arg(_))).count()
    }

    pub fn count_kind(&self, name: &str) -> usize {
        self.nodes.iter().filter(|n| n.kind.name() == name).count()
    }

    /// Rebuilds the graph keeping only nodes where `keep` holds, renumbering
    /// ids densely and remapping edges. Callers must keep every node that a
    /// kept node consumes. Dropped control deps are removed.
    pub fn retain_nodes(&self, keep: impl Fn(&Node) -> bool) -> Graph {
        let mut remap: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut nodes = Vec::new();
        for n in &self.nodes {
            if keep(n) {
                let new_id = NodeId(nodes.len() as u32);
                remap[n.id.index()] = Some(new_id);
                nodes.push(Node { id: new_id, kind: n.kind.clone(), inputs: Vec::new(), ctrl: Vec::new() });
            }
        }
        for n in &self.nodes {
            let Some(new_id) = remap[n.id.index()] else { continue };
            let inputs: Vec<Port> = n
                .inputs
                .iter()
                .map(|(p, out)| {
                    (remap[p.index()].expect("kept node consumes a dropped node"), *out)
                })
                .collect();
            let ctrl: Vec<NodeId> =
                n.ctrl.iter().filter_map(|c| remap[c.index()]).collect();
            let slot = &mut nodes[new_id.index()];
            slot.inputs = inputs;
            slot.ctrl = ctrl;
        }
        let outputs = self
            .outputs
            .iter()
            .map(|(p, out)| (remap[p.index()].expect("output node dropped"), *out))
            .collect();
        Graph {
            id: self.id,
            nodes,
            outputs,
            subgraphs: self.subgraphs.clone(),
            assumptions: self.assumptions.clone(),
        }
    }
}

/// Removes every Assert node (and the runtime-asserted assumptions they
/// check). Benchmark utility for measuring assertion overhead; the result
/// still validates.
pub fn strip_asserts(g: &Graph) -> Graph {
    let mut out = g.retain_nodes(|n| !matches!(n.kind, NodeKind::Assert { .. }));
    let kept: Vec<crate::assume::Assumption> =
        g.assumptions.dispatch_checked().cloned().collect();
    out.assumptions = AssumptionSet::new(kept);
    out.subgraphs = g.subgraphs.iter().map(|(id, sub)| (*id, strip_asserts(sub))).collect();
    out
}

/// Incremental graph construction with dense node ids.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    pub nodes: Vec<Node>,
}

impl GraphBuilder {
    pub fn new() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn add(&mut self, kind: NodeKind, inputs: Vec<Port>) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node { id, kind, inputs, ctrl: Vec::new() });
        id
    }

    pub fn add_ctrl(&mut self, node: NodeId, dep: NodeId) {
        let n = &mut self.nodes[node.index()];
        if !n.ctrl.contains(&dep) && node != dep {
            n.ctrl.push(dep);
        }
    }

    pub fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id.index()].kind
    }

    pub fn finish(
        self,
        id: GraphId,
        outputs: Vec<Port>,
        subgraphs: BTreeMap<GraphId, Graph>,
        assumptions: AssumptionSet,
    ) -> Graph {
        Graph { id, nodes: self.nodes, outputs, subgraphs, assumptions }
    }
}
