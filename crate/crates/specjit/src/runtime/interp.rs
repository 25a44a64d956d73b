//! The tree-walking imperative executor.
//!
//! This is both the profiling path and the fallback path: it applies effects
//! eagerly (deferral exists only in graph execution) and reports profilable
//! events through `ExecHooks`. Evaluation is strict, left to right.
//! Recording never changes semantics.

use std::collections::HashMap;
use std::sync::Arc;

use crate::frontend::{
    Binding, CaptureSource, Expr, ExprKind, Literal, Program, SiteId, SourceSpan, Stmt, StmtKind,
};

use super::binop::{apply_binop, apply_unop};
use super::builtins::{eval_pure, Builtin};
use super::error::{RtError, RtErrorKind};
use super::heap::{Heap, HeapObject};
use super::render::render_value;
use super::value::{FunctionId, Value};

/// Maximum interpreter call depth. Deep enough for desk-scale programs and
/// shallow enough to fail cleanly before the native stack does, even in
/// unoptimized builds on 2 MiB test threads.
pub const RECURSION_LIMIT: u32 = 64;

/// Sentinel function id for top-level code (never profiled into facts).
pub const TOP_LEVEL: FunctionId = FunctionId(u32::MAX);

/// A function value created when its `fn` statement executed. Nested
/// definitions capture enclosing locals by value at that moment.
#[derive(Debug, Clone)]
pub struct FunctionInstance {
    pub def: crate::frontend::FnDefId,
    pub name: String,
    pub captures: Vec<Value>,
}

/// Everything a running program owns: heap, function instances, and the
/// print transcript.
pub struct RtEnv {
    pub heap: Heap,
    pub functions: Vec<FunctionInstance>,
    pub transcript: String,
    /// Mirror appended transcript text to stdout (CLI mode).
    pub echo: bool,
    pub depth: u32,
    loop_assigned: HashMap<SiteId, Arc<[u16]>>,
}

impl Default for RtEnv {
    fn default() -> Self {
        Self::new()
    }
}

impl RtEnv {
    pub fn new() -> RtEnv {
        RtEnv {
            heap: Heap::new(),
            functions: Vec::new(),
            transcript: String::new(),
            echo: false,
            depth: 0,
            loop_assigned: HashMap::new(),
        }
    }

    pub fn append_transcript(&mut self, text: &str) {
        self.transcript.push_str(text);
        if self.echo {
            print!("{text}");
        }
    }

    pub fn function(&self, id: FunctionId) -> Option<&FunctionInstance> {
        self.functions.get(id.0 as usize)
    }
}

/// Which observation a profiled value belongs to: an expression site, or a
/// loop-carried local observed at loop entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObsKey {
    Site(SiteId),
    LoopVar(SiteId, u16),
}

impl std::fmt::Display for ObsKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObsKey::Site(s) => write!(f, "{s}"),
            ObsKey::LoopVar(s, slot) => write!(f, "{s}/v{slot}"),
        }
    }
}

/// Interpreter callbacks: profiling events plus call routing. The
/// orchestrator implements this to intercept every user-function call for
/// dispatch; `DirectHooks` interprets everything recursively.
pub trait ExecHooks {
    fn profiling(&self) -> bool {
        false
    }
    fn on_call_entered(&mut self, _f: FunctionId, _param_sites: &[SiteId], _args: &[Value]) {}
    fn on_branch(&mut self, _f: FunctionId, _site: SiteId, _arm: bool) {}
    fn on_loop_done(&mut self, _f: FunctionId, _site: SiteId, _trips: u64) {}
    fn on_value_at(&mut self, _f: FunctionId, _key: ObsKey, _v: &Value) {}
    fn on_callee_at(&mut self, _f: FunctionId, _site: SiteId, _callee: FunctionId) {}
    fn route(
        &mut self,
        program: &Program,
        env: &mut RtEnv,
        callee: FunctionId,
        args: Vec<Value>,
        span: SourceSpan,
    ) -> Result<Value, RtError>;
}

/// Plain recursive interpretation with no profiling.
pub struct DirectHooks;

impl ExecHooks for DirectHooks {
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

struct Frame {
    fnid: FunctionId,
    locals: Vec<Option<Value>>,
    captures: Vec<Value>,
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Value),
}

/// Runs the top-level statements of a program.
pub fn run_program(
    program: &Program,
    env: &mut RtEnv,
    hooks: &mut dyn ExecHooks,
) -> Result<(), RtError> {
    let mut frame = Frame { fnid: TOP_LEVEL, locals: Vec::new(), captures: Vec::new() };
    match exec_block(program, env, hooks, &mut frame, &program.body)? {
        Flow::Normal => Ok(()),
        _ => unreachable!("resolver rejects return/break/continue at top level"),
    }
}

/// Calls a function instance with SL semantics applied eagerly.
pub fn interpret_call(
    program: &Program,
    env: &mut RtEnv,
    hooks: &mut dyn ExecHooks,
    fnid: FunctionId,
    args: Vec<Value>,
    call_span: Option<SourceSpan>,
) -> Result<Value, RtError> {
    let err_span = |mut e: RtError| {
        if let Some(span) = call_span {
            e = e.with_span(span);
        }
        e
    };
    if env.depth >= RECURSION_LIMIT {
        return Err(err_span(RtError::new(
            RtErrorKind::RecursionLimit,
            format!("call depth exceeds {RECURSION_LIMIT}"),
        )));
    }
    let instance = env
        .function(fnid)
        .ok_or_else(|| err_span(RtError::new(RtErrorKind::TypeMismatch, "dangling function reference")))?
        .clone();
    let def = program
        .fn_def(instance.def)
        .ok_or_else(|| err_span(RtError::new(RtErrorKind::TypeMismatch, "missing function definition")))?;
    if args.len() != def.params.len() {
        return Err(err_span(RtError::new(
            RtErrorKind::Arity,
            format!("{} takes {} argument(s), got {}", def.name, def.params.len(), args.len()),
        )));
    }
    if hooks.profiling() {
        let param_sites: Vec<SiteId> = def.params.iter().map(|p| p.site).collect();
        hooks.on_call_entered(fnid, &param_sites, &args);
    }
    let mut locals: Vec<Option<Value>> = vec![None; def.local_count as usize];
    for (slot, arg) in args.into_iter().enumerate() {
        locals[slot] = Some(arg);
    }
    let mut frame = Frame { fnid, locals, captures: instance.captures.clone() };
    env.depth += 1;
    let result = exec_block(program, env, hooks, &mut frame, &def.body);
    env.depth -= 1;
    match result? {
        Flow::Return(v) => Ok(v),
        Flow::Normal => Ok(Value::Nil),
        _ => unreachable!("resolver rejects break/continue outside loops"),
    }
}

fn exec_block(
    program: &Program,
    env: &mut RtEnv,
    hooks: &mut dyn ExecHooks,
    frame: &mut Frame,
    stmts: &[Stmt],
) -> Result<Flow, RtError> {
    for s in stmts {
        match exec_stmt(program, env, hooks, frame, s)? {
            Flow::Normal => {}
            other => return Ok(other),
        }
    }
    Ok(Flow::Normal)
}

fn exec_stmt(
    program: &Program,
    env: &mut RtEnv,
    hooks: &mut dyn ExecHooks,
    frame: &mut Frame,
    s: &Stmt,
) -> Result<Flow, RtError> {
    match &s.kind {
        StmtKind::FnDef(def) => {
            let mut captures = Vec::with_capacity(def.captures.len());
            for src in &def.captures {
                captures.push(match src {
                    CaptureSource::EnclosingLocal(slot) => {
                        frame.locals[*slot as usize].clone().ok_or_else(|| {
                            RtError::new(
                                RtErrorKind::UnboundLocal,
                                format!("captured variable unassigned when defining `{}`", def.name),
                            )
                            .with_span(s.span)
                        })?
                    }
                    CaptureSource::EnclosingCapture(i) => frame.captures[*i as usize].clone(),
                });
            }
            let fid = FunctionId(env.functions.len() as u32);
            env.functions.push(FunctionInstance {
                def: def.id,
                name: def.name.clone(),
                captures,
            });
            store(env, frame, &def.name, def.name_binding, Value::Fn(fid));
            Ok(Flow::Normal)
        }
        StmtKind::Let { name, value } | StmtKind::Assign { name, value } => {
            let v = eval_expr(program, env, hooks, frame, value)?;
            store(env, frame, &name.name, name.binding, v);
            Ok(Flow::Normal)
        }
        StmtKind::AttrAssign { object, attr, value } => {
            let obj = eval_expr(program, env, hooks, frame, object)?;
            let v = eval_expr(program, env, hooks, frame, value)?;
            match obj {
                Value::Record(id) => match env.heap.object_mut(id) {
                    HeapObject::Record(fields) => {
                        fields.insert(attr.clone(), v);
                        Ok(Flow::Normal)
                    }
                    HeapObject::List(_) => unreachable!(),
                },
                other => Err(RtError::new(
                    RtErrorKind::TypeMismatch,
                    format!("attribute write on {}", other.kind().name()),
                )
                .with_span(s.span)),
            }
        }
        StmtKind::SubscrAssign { object, index, value } => {
            let obj = eval_expr(program, env, hooks, frame, object)?;
            let idx = eval_expr(program, env, hooks, frame, index)?;
            let v = eval_expr(program, env, hooks, frame, value)?;
            subscr_assign(env, obj, idx, v).map_err(|e| e.with_span(s.span))?;
            Ok(Flow::Normal)
        }
        StmtKind::GlobalDecl { .. } => Ok(Flow::Normal),
        StmtKind::If { cond, then_body, else_body } => {
            let arm = eval_condition(program, env, hooks, frame, cond)?;
            if hooks.profiling() {
                hooks.on_branch(frame.fnid, s.site, arm);
            }
            if arm {
                exec_block(program, env, hooks, frame, then_body)
            } else if let Some(els) = else_body {
                exec_block(program, env, hooks, frame, els)
            } else {
                Ok(Flow::Normal)
            }
        }
        StmtKind::While { cond, body } => {
            observe_loop_entry(program, env, hooks, frame, s);
            let mut trips: u64 = 0;
            let flow = loop {
                if !eval_condition(program, env, hooks, frame, cond)? {
                    break Flow::Normal;
                }
                trips += 1;
                match exec_block(program, env, hooks, frame, body)? {
                    Flow::Normal | Flow::Continue => {}
                    Flow::Break => break Flow::Normal,
                    Flow::Return(v) => break Flow::Return(v),
                }
            };
            if hooks.profiling() {
                hooks.on_loop_done(frame.fnid, s.site, trips);
            }
            Ok(flow)
        }
        StmtKind::ForIn { var, iterable, body } => {
            let seq = eval_expr(program, env, hooks, frame, iterable)?;
            let id = match seq {
                Value::List(id) => id,
                other => {
                    return Err(RtError::new(
                        RtErrorKind::TypeMismatch,
                        format!("for-in iterates lists, got {}", other.kind().name()),
                    )
                    .with_span(s.span))
                }
            };
            observe_loop_entry(program, env, hooks, frame, s);
            // The trip count is the length at entry; element reads are live.
            let n = match env.heap.object(id) {
                HeapObject::List(items) => items.len(),
                HeapObject::Record(_) => unreachable!(),
            };
            let mut trips: u64 = 0;
            let mut flow = Flow::Normal;
            for i in 0..n {
                let item = match env.heap.object(id) {
                    HeapObject::List(items) => items.get(i).cloned().ok_or_else(|| {
                        RtError::new(RtErrorKind::IndexOutOfRange, "list shrank during iteration")
                            .with_span(s.span)
                    })?,
                    HeapObject::Record(_) => unreachable!(),
                };
                store(env, frame, &var.name, var.binding, item);
                trips += 1;
                match exec_block(program, env, hooks, frame, body)? {
                    Flow::Normal | Flow::Continue => {}
                    Flow::Break => break,
                    Flow::Return(v) => {
                        flow = Flow::Return(v);
                        break;
                    }
                }
            }
            if hooks.profiling() {
                hooks.on_loop_done(frame.fnid, s.site, trips);
            }
            Ok(flow)
        }
        StmtKind::Return { value } => {
            let v = match value {
                Some(e) => eval_expr(program, env, hooks, frame, e)?,
                None => Value::Nil,
            };
            Ok(Flow::Return(v))
        }
        StmtKind::Break => Ok(Flow::Break),
        StmtKind::Continue => Ok(Flow::Continue),
        StmtKind::Assert { cond } => {
            let ok = eval_condition(program, env, hooks, frame, cond)?;
            if ok {
                Ok(Flow::Normal)
            } else {
                Err(RtError::new(RtErrorKind::AssertStmtFailed, "assert failed").with_span(s.span))
            }
        }
        StmtKind::Expr { value } => {
            eval_expr(program, env, hooks, frame, value)?;
            Ok(Flow::Normal)
        }
    }
}

/// Records the value of every loop-carried local at loop entry.
fn observe_loop_entry(
    program: &Program,
    env: &mut RtEnv,
    hooks: &mut dyn ExecHooks,
    frame: &Frame,
    loop_stmt: &Stmt,
) {
    if !hooks.profiling() {
        return;
    }
    let slots = env
        .loop_assigned
        .entry(loop_stmt.site)
        .or_insert_with(|| {
            let body = match &loop_stmt.kind {
                StmtKind::While { body, .. } => body,
                StmtKind::ForIn { body, .. } => body,
                _ => unreachable!(),
            };
            crate::frontend::ast::assigned_local_slots(body).into()
        })
        .clone();
    let _ = program;
    for slot in slots.iter() {
        if let Some(v) = &frame.locals.get(*slot as usize).and_then(|v| v.clone()) {
            hooks.on_value_at(frame.fnid, ObsKey::LoopVar(loop_stmt.site, *slot), v);
        }
    }
}

fn store(env: &mut RtEnv, frame: &mut Frame, name: &str, binding: Binding, v: Value) {
    match binding {
        Binding::Local(slot) | Binding::Param(slot) => frame.locals[slot as usize] = Some(v),
        Binding::Global => env.heap.set_global(name, v),
        Binding::Captured(_) | Binding::Builtin(_) | Binding::Unresolved => {
            unreachable!("resolver rejects assignment to `{name}` with binding {binding:?}")
        }
    }
}

fn subscr_assign(env: &mut RtEnv, obj: Value, idx: Value, v: Value) -> Result<(), RtError> {
    let id = match obj {
        Value::List(id) => id,
        other => {
            return Err(RtError::new(
                RtErrorKind::TypeMismatch,
                format!("subscript write on {}", other.kind().name()),
            ))
        }
    };
    let i = match idx {
        Value::Int(i) => i,
        other => {
            return Err(RtError::new(
                RtErrorKind::TypeMismatch,
                format!("list index must be an int, got {}", other.kind().name()),
            ))
        }
    };
    match env.heap.object_mut(id) {
        HeapObject::List(items) => {
            if i < 0 || i as usize >= items.len() {
                return Err(RtError::new(
                    RtErrorKind::IndexOutOfRange,
                    format!("index {} out of range for list of length {}", i, items.len()),
                ));
            }
            items[i as usize] = v;
            Ok(())
        }
        HeapObject::Record(_) => unreachable!(),
    }
}

fn eval_condition(
    program: &Program,
    env: &mut RtEnv,
    hooks: &mut dyn ExecHooks,
    frame: &mut Frame,
    cond: &Expr,
) -> Result<bool, RtError> {
    match eval_expr(program, env, hooks, frame, cond)? {
        Value::Bool(b) => Ok(b),
        other => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("condition must be a bool, got {}", other.kind().name()),
        )
        .with_span(cond.span)),
    }
}

fn eval_expr(
    program: &Program,
    env: &mut RtEnv,
    hooks: &mut dyn ExecHooks,
    frame: &mut Frame,
    e: &Expr,
) -> Result<Value, RtError> {
    match &e.kind {
        ExprKind::Literal(lit) => Ok(match lit {
            Literal::Int(v) => Value::Int(*v),
            Literal::Float(v) => Value::Float(*v),
            Literal::Bool(v) => Value::Bool(*v),
            Literal::Str(s) => Value::str(s),
            Literal::Nil => Value::Nil,
        }),
        ExprKind::ListLit(items) => {
            let mut vals = Vec::with_capacity(items.len());
            for it in items {
                vals.push(eval_expr(program, env, hooks, frame, it)?);
            }
            Ok(Value::List(env.heap.alloc_list(vals)))
        }
        ExprKind::RecordLit(fields) => {
            let mut map = std::collections::BTreeMap::new();
            for (name, val) in fields {
                let v = eval_expr(program, env, hooks, frame, val)?;
                map.insert(name.clone(), v);
            }
            Ok(Value::Record(env.heap.alloc_record(map)))
        }
        ExprKind::Name(ident) => match ident.binding {
            Binding::Local(slot) | Binding::Param(slot) => {
                frame.locals[slot as usize].clone().ok_or_else(|| {
                    RtError::new(
                        RtErrorKind::UnboundLocal,
                        format!("`{}` read before assignment", ident.name),
                    )
                    .with_span(e.span)
                })
            }
            Binding::Captured(i) => Ok(frame.captures[i as usize].clone()),
            Binding::Global => {
                let v = env.heap.get_global(&ident.name).ok_or_else(|| {
                    RtError::new(
                        RtErrorKind::UnknownAttr,
                        format!("undefined global `{}`", ident.name),
                    )
                    .with_span(e.span)
                })?;
                if hooks.profiling() {
                    hooks.on_value_at(frame.fnid, ObsKey::Site(e.site), &v);
                }
                Ok(v)
            }
            Binding::Builtin(_) | Binding::Unresolved => {
                unreachable!("resolver rejects builtin-as-value and unresolved names")
            }
        },
        ExprKind::BinOp { op, lhs, rhs } => {
            let a = eval_expr(program, env, hooks, frame, lhs)?;
            let b = eval_expr(program, env, hooks, frame, rhs)?;
            apply_binop(*op, &a, &b).map_err(|err| err.with_span(e.span))
        }
        ExprKind::UnOp { op, operand } => {
            let v = eval_expr(program, env, hooks, frame, operand)?;
            apply_unop(*op, &v).map_err(|err| err.with_span(e.span))
        }
        ExprKind::AttrGet { object, attr } => {
            let obj = eval_expr(program, env, hooks, frame, object)?;
            let v = match obj {
                Value::Record(id) => match env.heap.object(id) {
                    HeapObject::Record(fields) => fields.get(attr).cloned().ok_or_else(|| {
                        RtError::new(RtErrorKind::UnknownAttr, format!("no attribute `{attr}`"))
                            .with_span(e.span)
                    })?,
                    HeapObject::List(_) => unreachable!(),
                },
                other => {
                    return Err(RtError::new(
                        RtErrorKind::TypeMismatch,
                        format!("attribute read on {}", other.kind().name()),
                    )
                    .with_span(e.span))
                }
            };
            if hooks.profiling() {
                hooks.on_value_at(frame.fnid, ObsKey::Site(e.site), &v);
            }
            Ok(v)
        }
        ExprKind::SubscrGet { object, index } => {
            let obj = eval_expr(program, env, hooks, frame, object)?;
            let idx = eval_expr(program, env, hooks, frame, index)?;
            let v = subscr_get(env, obj, idx).map_err(|err| err.with_span(e.span))?;
            if hooks.profiling() {
                hooks.on_value_at(frame.fnid, ObsKey::Site(e.site), &v);
            }
            Ok(v)
        }
        ExprKind::Call { callee, args } => {
            if let ExprKind::Name(ident) = &callee.kind {
                if let Binding::Builtin(b) = ident.binding {
                    let mut argv = Vec::with_capacity(args.len());
                    for a in args {
                        argv.push(eval_expr(program, env, hooks, frame, a)?);
                    }
                    let v = call_builtin(env, b, argv).map_err(|err| err.with_span(e.span))?;
                    if hooks.profiling() {
                        hooks.on_value_at(frame.fnid, ObsKey::Site(e.site), &v);
                    }
                    return Ok(v);
                }
            }
            let cv = eval_expr(program, env, hooks, frame, callee)?;
            let mut argv = Vec::with_capacity(args.len());
            for a in args {
                argv.push(eval_expr(program, env, hooks, frame, a)?);
            }
            match cv {
                Value::Fn(fid) => {
                    if hooks.profiling() {
                        hooks.on_callee_at(frame.fnid, e.site, fid);
                    }
                    let v = hooks.route(program, env, fid, argv, e.span)?;
                    if hooks.profiling() {
                        hooks.on_value_at(frame.fnid, ObsKey::Site(e.site), &v);
                    }
                    Ok(v)
                }
                other => Err(RtError::new(
                    RtErrorKind::TypeMismatch,
                    format!("{} is not callable", other.kind().name()),
                )
                .with_span(e.span)),
            }
        }
    }
}

fn subscr_get(env: &RtEnv, obj: Value, idx: Value) -> Result<Value, RtError> {
    let i = match idx {
        Value::Int(i) => i,
        other => {
            return Err(RtError::new(
                RtErrorKind::TypeMismatch,
                format!("index must be an int, got {}", other.kind().name()),
            ))
        }
    };
    match obj {
        Value::List(id) => match env.heap.object(id) {
            HeapObject::List(items) => {
                if i < 0 || i as usize >= items.len() {
                    return Err(RtError::new(
                        RtErrorKind::IndexOutOfRange,
                        format!("index {} out of range for list of length {}", i, items.len()),
                    ));
                }
                Ok(items[i as usize].clone())
            }
            HeapObject::Record(_) => unreachable!(),
        },
        Value::Tensor(t) => {
            if t.rank() == 0 {
                return Err(RtError::new(RtErrorKind::TypeMismatch, "subscript of scalar tensor"));
            }
            if i < 0 || i as usize >= t.shape[0] {
                return Err(RtError::new(
                    RtErrorKind::IndexOutOfRange,
                    format!("index {} out of range for first dim {}", i, t.shape[0]),
                ));
            }
            Ok(Value::Tensor(t.index_first(i as usize).expect("bounds checked")))
        }
        other => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("subscript of {}", other.kind().name()),
        )),
    }
}

/// Evaluates one builtin call with eager effects (interpreter path).
pub fn call_builtin(env: &mut RtEnv, b: Builtin, args: Vec<Value>) -> Result<Value, RtError> {
    match b {
        Builtin::Append => {
            if args.len() != 2 {
                return Err(RtError::new(
                    RtErrorKind::Arity,
                    format!("append takes 2 arguments, got {}", args.len()),
                ));
            }
            let id = match &args[0] {
                Value::List(id) => *id,
                other => {
                    return Err(RtError::new(
                        RtErrorKind::TypeMismatch,
                        format!("append target must be a list, got {}", other.kind().name()),
                    ))
                }
            };
            match env.heap.object_mut(id) {
                HeapObject::List(items) => items.push(args[1].clone()),
                HeapObject::Record(_) => unreachable!(),
            }
            Ok(Value::Nil)
        }
        Builtin::Print => {
            let text = render_print(&args, &env.heap);
            env.append_transcript(&text);
            Ok(Value::Nil)
        }
        _ => eval_pure(b, &args, &mut env.heap),
    }
}

/// Shared by the interpreter and the graph executor's Print node: arguments
/// rendered space-separated with a trailing newline.
pub fn render_print(args: &[Value], heap: &dyn super::heap::HeapRead) -> String {
    let mut text = String::new();
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(&render_value(a, heap));
    }
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_program;

    fn run(src: &str) -> (RtEnv, Result<(), RtError>) {
        let program = load_program(src).unwrap();
        let mut env = RtEnv::new();
        let r = run_program(&program, &mut env, &mut DirectHooks);
        (env, r)
    }

    fn call1(src: &str, fname: &str, args: Vec<Value>) -> (RtEnv, Result<Value, RtError>) {
        let program = load_program(src).unwrap();
        let mut env = RtEnv::new();
        run_program(&program, &mut env, &mut DirectHooks).unwrap();
        let fid = match env.heap.get_global(fname).unwrap() {
            Value::Fn(f) => f,
            _ => panic!("{fname} is not a function"),
        };
        let r = interpret_call(&program, &mut env, &mut DirectHooks, fid, args, None);
        (env, r)
    }

    const P1: &str = "fn loss_fn(x, y) {\n  let y_ = 0.5 * x + 1.5\n  return (y_ - y) ** 2\n}";

    const P2: &str = "let model = record { state: 0.0 }\n\
        fn step(seq) {\n\
          let s = model.state\n\
          let out = 0.0\n\
          for item in seq {\n\
            s = s + item\n\
            out = out + s\n\
          }\n\
          model.state = s\n\
          return out\n\
        }";

    #[test]
    fn p1_loss_fn() {
        let (_, r) = call1(P1, "loss_fn", vec![Value::Float(1.0), Value::Float(2.0)]);
        assert!(matches!(r.unwrap(), Value::Float(x) if x == 0.0));
    }

    #[test]
    fn p2_state_carried_across_calls() {
        let program = load_program(P2).unwrap();
        let mut env = RtEnv::new();
        run_program(&program, &mut env, &mut DirectHooks).unwrap();
        let fid = match env.heap.get_global("step").unwrap() {
            Value::Fn(f) => f,
            _ => panic!(),
        };
        let mk_list = |env: &mut RtEnv, xs: &[f64]| {
            let items: Vec<Value> = xs.iter().map(|&x| Value::Float(x)).collect();
            Value::List(env.heap.alloc_list(items))
        };
        let a1 = mk_list(&mut env, &[1.0, 2.0, 3.0]);
        let r1 = interpret_call(&program, &mut env, &mut DirectHooks, fid, vec![a1], None).unwrap();
        assert!(matches!(r1, Value::Float(x) if x == 10.0));
        let model = env.heap.get_global("model").unwrap();
        let state = match model {
            Value::Record(id) => match env.heap.object(id) {
                HeapObject::Record(f) => f.get("state").cloned().unwrap(),
                _ => panic!(),
            },
            _ => panic!(),
        };
        assert!(matches!(state, Value::Float(x) if x == 6.0));

        let a2 = mk_list(&mut env, &[1.0, 1.0, 1.0]);
        let r2 = interpret_call(&program, &mut env, &mut DirectHooks, fid, vec![a2], None).unwrap();
        assert!(matches!(r2, Value::Float(x) if x == 24.0));
        let model = env.heap.get_global("model").unwrap();
        let state = match model {
            Value::Record(id) => match env.heap.object(id) {
                HeapObject::Record(f) => f.get("state").cloned().unwrap(),
                _ => panic!(),
            },
            _ => panic!(),
        };
        assert!(matches!(state, Value::Float(x) if x == 9.0));
    }

    #[test]
    fn reference_semantics_shared_records() {
        let (env, r) = run("let a = record { x: 1 }\nlet b = a\nb.x = 5\nprint(a.x)");
        r.unwrap();
        assert_eq!(env.transcript, "5\n");
    }

    #[test]
    fn print_transcript_formats() {
        let (env, r) = run(
            "print(1, 2.5, true, nil, \"hi\")\nprint([1, [2]], record { b: 2, a: 1 })\nprint(tensor([[1, 2], [3, 4]]))",
        );
        r.unwrap();
        assert_eq!(env.transcript, "1 2.5 true nil hi\n[1, [2]] record{a: 1, b: 2}\n[[1, 2], [3, 4]]\n");
    }

    #[test]
    fn recursion_fact() {
        let src = "fn fact(n) { if n <= 1 { return 1 } return n * fact(n - 1) }";
        let (_, r) = call1(src, "fact", vec![Value::Int(10)]);
        assert!(matches!(r.unwrap(), Value::Int(3628800)));
    }

    #[test]
    fn recursion_limit() {
        let src = "fn spin(n) { return spin(n + 1) }";
        let (_, r) = call1(src, "spin", vec![Value::Int(0)]);
        assert_eq!(r.unwrap_err().kind, RtErrorKind::RecursionLimit);
    }

    #[test]
    fn assert_statement() {
        let (_, r) = run("assert 1 < 2");
        r.unwrap();
        let (_, r) = run("assert 2 < 1");
        assert_eq!(r.unwrap_err().kind, RtErrorKind::AssertStmtFailed);
        let (_, r) = run("assert 1 + 1");
        assert_eq!(r.unwrap_err().kind, RtErrorKind::TypeMismatch);
    }

    #[test]
    fn closures_capture_by_value() {
        let (env, r) = run(
            "fn outer() {\n  let a = 1\n  fn inner() { return a }\n  a = 2\n  return inner()\n}\nprint(outer())",
        );
        r.unwrap();
        // Capture happened at definition time, before a = 2.
        assert_eq!(env.transcript, "1\n");
    }

    #[test]
    fn determinism_with_and_without_profiling_sink() {
        // A sink that records everything but routes identically.
        struct CountingHooks(u64);
        impl ExecHooks for CountingHooks {
            fn profiling(&self) -> bool {
                true
            }
            fn on_value_at(&mut self, _f: FunctionId, _k: ObsKey, _v: &Value) {
                self.0 += 1;
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
        let src = "let g = record { n: 0 }\n\
            fn bump(k) { g.n = g.n + k return g.n }\n\
            print(bump(2))\nprint(bump(3))";
        let program = load_program(src).unwrap();
        let mut env1 = RtEnv::new();
        run_program(&program, &mut env1, &mut DirectHooks).unwrap();
        let mut env2 = RtEnv::new();
        let mut hooks = CountingHooks(0);
        run_program(&program, &mut env2, &mut hooks).unwrap();
        assert_eq!(env1.transcript, env2.transcript);
        assert!(hooks.0 > 0, "sink saw observations");
        let g1 = render_value(&env1.heap.get_global("g").unwrap(), &env1.heap);
        let g2 = render_value(&env2.heap.get_global("g").unwrap(), &env2.heap);
        assert_eq!(g1, g2);
    }

    #[test]
    fn for_in_len_snapshot_at_entry() {
        // Appending inside the loop must not extend this iteration.
        let (env, r) = run(
            "let xs = [1, 2]\nfor x in xs { append(xs, x) }\nprint(len(xs))",
        );
        r.unwrap();
        assert_eq!(env.transcript, "4\n");
    }

    #[test]
    fn runtime_error_kinds() {
        let (_, r) = run("let x = [1][2]");
        assert_eq!(r.unwrap_err().kind, RtErrorKind::IndexOutOfRange);
        let (_, r) = run("let x = record { a: 1 }.b");
        assert_eq!(r.unwrap_err().kind, RtErrorKind::UnknownAttr);
        let (_, r) = run("let x = 1 + \"s\"");
        assert_eq!(r.unwrap_err().kind, RtErrorKind::TypeMismatch);
        let (_, r) = run("if 1 { }");
        assert_eq!(r.unwrap_err().kind, RtErrorKind::TypeMismatch);
        let (_, r) = run("let x = nosuch");
        assert_eq!(r.unwrap_err().kind, RtErrorKind::UnknownAttr);
    }
}
