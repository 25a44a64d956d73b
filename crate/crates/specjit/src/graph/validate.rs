//! Structural validation. Returns a list of errors; an empty list means the
//! graph is well-formed.

use std::collections::HashSet;

use super::{Graph, Node, NodeId, NodeKind};

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralError {
    pub node: Option<NodeId>,
    pub message: String,
}

impl std::fmt::Display for StructuralError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.node {
            Some(n) => write!(f, "node {}: {}", n.0, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

fn err(node: Option<NodeId>, message: impl Into<String>) -> StructuralError {
    StructuralError { node, message: message.into() }
}

pub fn validate(g: &Graph) -> Vec<StructuralError> {
    let mut errors = Vec::new();
    validate_one(g, &mut errors);
    for sub in g.subgraphs.values() {
        let mut sub_errors = Vec::new();
        validate_one(sub, &mut sub_errors);
        for mut e in sub_errors {
            e.message = format!("subgraph {}: {}", sub.id.0, e.message);
            errors.push(e);
        }
        // Nested Invoke targets resolve against the parent's table too.
        for n in &sub.nodes {
            if let NodeKind::Invoke { target, .. } = &n.kind {
                if *target != sub.id && *target != g.id && !g.subgraphs.contains_key(target) {
                    errors.push(err(Some(n.id), format!("invoke target {} missing", target.0)));
                }
            }
        }
    }
    errors
}

fn validate_one(g: &Graph, errors: &mut Vec<StructuralError>) {
    // Dense ids.
    for (i, n) in g.nodes.iter().enumerate() {
        if n.id.index() != i {
            errors.push(err(Some(n.id), format!("node id {} at position {i}", n.id.0)));
        }
    }
    let in_range = |p: NodeId| p.index() < g.nodes.len();

    // Arity, port validity, control refs.
    for n in &g.nodes {
        if let Some(want) = n.kind.in_arity() {
            if n.inputs.len() != want {
                errors.push(err(
                    Some(n.id),
                    format!("{} takes {} input(s), has {}", n.kind.name(), want, n.inputs.len()),
                ));
            }
        }
        if matches!(n.kind, NodeKind::Merge) && n.inputs.len() < 2 {
            errors.push(err(Some(n.id), "Merge needs at least 2 inputs"));
        }
        for (p, out) in &n.inputs {
            if !in_range(*p) {
                errors.push(err(Some(n.id), format!("input references missing node {}", p.0)));
                continue;
            }
            let producer = &g.nodes[p.index()];
            if (*out as usize) >= producer.kind.out_arity() {
                errors.push(err(
                    Some(n.id),
                    format!(
                        "input references port {} of {} (has {})",
                        out,
                        producer.kind.name(),
                        producer.kind.out_arity()
                    ),
                ));
            }
        }
        for c in &n.ctrl {
            if !in_range(*c) {
                errors.push(err(Some(n.id), format!("control dep references missing node {}", c.0)));
            }
        }
    }

    // Arg indices dense from 0.
    let mut arg_indices: Vec<u32> = g
        .nodes
        .iter()
        .filter_map(|n| match n.kind {
            NodeKind::Arg(i) => Some(i),
            _ => None,
        })
        .collect();
    arg_indices.sort_unstable();
    for (want, got) in arg_indices.iter().enumerate() {
        if *got != want as u32 {
            errors.push(err(None, format!("arg indices not dense: expected {want}, found {got}")));
            break;
        }
    }

    // Unique seq indices.
    let mut seqs = HashSet::new();
    for n in &g.nodes {
        if let Some(s) = n.kind.seq() {
            if !seqs.insert(s) {
                errors.push(err(Some(n.id), format!("duplicate seq index {s}")));
            }
        }
    }

    // Invoke targets exist (self-recursion allowed).
    for n in &g.nodes {
        if let NodeKind::Invoke { target, .. } = &n.kind {
            if *target != g.id && !g.subgraphs.contains_key(target) {
                errors.push(err(Some(n.id), format!("invoke target {} missing", target.0)));
            }
        }
    }

    // Output ports valid.
    for (p, out) in &g.outputs {
        if !in_range(*p) {
            errors.push(err(None, format!("output references missing node {}", p.0)));
        } else if (*out as usize) >= g.nodes[p.index()].kind.out_arity() {
            errors.push(err(None, format!("output references invalid port {out} of node {}", p.0)));
        }
    }

    // Asserts have no data consumers.
    for n in &g.nodes {
        for (p, _) in &n.inputs {
            if in_range(*p) && matches!(g.nodes[p.index()].kind, NodeKind::Assert { .. }) {
                errors.push(err(Some(n.id), "consumes data from an Assert node"));
            }
        }
    }

    // Assert <-> runtime-asserted assumption bijection.
    let assert_ids: Vec<_> = g
        .nodes
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::Assert { assumption, .. } => Some(*assumption),
            _ => None,
        })
        .collect();
    let mut seen = HashSet::new();
    for id in &assert_ids {
        if !seen.insert(*id) {
            errors.push(err(None, format!("assumption {id} has multiple Assert nodes")));
        }
        if g.assumptions.get(*id).is_none() {
            errors.push(err(None, format!("Assert checks unknown assumption {id}")));
        }
    }
    for a in g.assumptions.runtime_asserted() {
        if !assert_ids.contains(&a.id) {
            errors.push(err(None, format!("runtime-asserted assumption {} has no Assert node", a.id)));
        }
    }
    for a in g.assumptions.dispatch_checked() {
        if assert_ids.contains(&a.id) {
            errors.push(err(None, format!("dispatch-checked assumption {} has an Assert node", a.id)));
        }
    }

    // No cycles except through NextIteration: with NextIteration nodes
    // removed, the data+control graph must be a DAG.
    if errors.is_empty() {
        if let Some(cycle_node) = find_cycle(&g.nodes) {
            errors.push(err(Some(cycle_node), "data/control cycle not passing through NextIteration"));
        }
    }
}

/// Kahn's algorithm over all edges, skipping NextIteration nodes entirely.
fn find_cycle(nodes: &[Node]) -> Option<NodeId> {
    let n = nodes.len();
    let skip: Vec<bool> = nodes.iter().map(|x| matches!(x.kind, NodeKind::NextIteration)).collect();
    let mut indegree = vec![0usize; n];
    let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for node in nodes {
        if skip[node.id.index()] {
            continue;
        }
        let deps = node.inputs.iter().map(|(p, _)| *p).chain(node.ctrl.iter().copied());
        for dep in deps {
            if skip[dep.index()] {
                continue;
            }
            indegree[node.id.index()] += 1;
            consumers[dep.index()].push(node.id.index());
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| !skip[i] && indegree[i] == 0).collect();
    let mut done = 0;
    let total = (0..n).filter(|&i| !skip[i]).count();
    while let Some(i) = ready.pop() {
        done += 1;
        for &c in &consumers[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    if done == total {
        None
    } else {
        (0..n).find(|&i| !skip[i] && indegree[i] > 0).map(|i| nodes[i].id)
    }
}
