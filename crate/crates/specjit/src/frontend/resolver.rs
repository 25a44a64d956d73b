//! Name resolution for SL.
//!
//! Classifies every name as Local, Param, Captured, Global, or Builtin.
//! A name assigned anywhere in a function body is a local of that function,
//! unless a `global` declaration for it appears earlier in the body. Free
//! names bind to enclosing function locals (captured by value at definition
//! time, read-only), then to builtins, then to globals. Top-level assignments
//! are globals.

use std::collections::HashMap;

use super::ast::*;
use super::token::SourceSpan;
use crate::runtime::Builtin;

#[derive(Debug, Clone, PartialEq)]
pub struct ResolveError {
    pub span: SourceSpan,
    pub message: String,
}

impl std::fmt::Display for ResolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "resolve error at {}: {}", self.span, self.message)
    }
}

impl std::error::Error for ResolveError {}

pub fn resolve(mut program: Program) -> Result<Program, ResolveError> {
    let mut scopes: Vec<FnScope> = Vec::new();
    resolve_block(&mut program.body, &mut scopes, Ctx { in_fn: false, loop_depth: 0 })?;
    Ok(program)
}

/// Statement-position context: loop depth resets at function boundaries.
#[derive(Clone, Copy)]
struct Ctx {
    in_fn: bool,
    loop_depth: u32,
}

impl Ctx {
    fn in_loop(self) -> Ctx {
        Ctx { in_fn: self.in_fn, loop_depth: self.loop_depth + 1 }
    }
}

struct FnScope {
    locals: HashMap<String, (u16, bool)>, // name -> (slot, is_param)
    declared_global: HashMap<String, SiteId>,
    captures: Vec<CaptureSource>,
    capture_names: HashMap<String, u16>,
    next_slot: u16,
}

impl FnScope {
    fn new() -> Self {
        FnScope {
            locals: HashMap::new(),
            declared_global: HashMap::new(),
            captures: Vec::new(),
            capture_names: HashMap::new(),
            next_slot: 0,
        }
    }
}

/// First pass over a function body: find `global` declarations and the first
/// assignment position of every name, without descending into nested `fn`s.
fn scan_body(
    body: &[Stmt],
    globals: &mut HashMap<String, SiteId>,
    first_assign: &mut HashMap<String, SiteId>,
) {
    for s in body {
        match &s.kind {
            StmtKind::GlobalDecl { name } => {
                globals.entry(name.clone()).or_insert(s.site);
            }
            StmtKind::Let { name, .. } | StmtKind::Assign { name, .. } => {
                first_assign.entry(name.name.clone()).or_insert(name.site);
            }
            StmtKind::ForIn { var, body, .. } => {
                first_assign.entry(var.name.clone()).or_insert(var.site);
                scan_body(body, globals, first_assign);
            }
            StmtKind::FnDef(def) => {
                first_assign.entry(def.name.clone()).or_insert(s.site);
            }
            StmtKind::If { then_body, else_body, .. } => {
                scan_body(then_body, globals, first_assign);
                if let Some(e) = else_body {
                    scan_body(e, globals, first_assign);
                }
            }
            StmtKind::While { body, .. } => scan_body(body, globals, first_assign),
            _ => {}
        }
    }
}

fn resolve_fn(def: &mut FnDef, scopes: &mut Vec<FnScope>) -> Result<(), ResolveError> {
    let mut scope = FnScope::new();
    for p in &mut def.params {
        if scope.locals.contains_key(&p.name) {
            return Err(ResolveError {
                span: p.span,
                message: format!("duplicate parameter `{}`", p.name),
            });
        }
        let slot = scope.next_slot;
        scope.next_slot += 1;
        scope.locals.insert(p.name.clone(), (slot, true));
        p.binding = Binding::Param(slot);
    }

    let mut globals = HashMap::new();
    let mut first_assign = HashMap::new();
    scan_body(&def.body, &mut globals, &mut first_assign);
    for (name, decl_site) in &globals {
        if let Some((_, true)) = scope.locals.get(name) {
            return Err(ResolveError {
                span: def.params.iter().find(|p| &p.name == name).map(|p| p.span).unwrap_or_default_span(),
                message: format!("`global {name}` names a parameter"),
            });
        }
        if let Some(assign_site) = first_assign.get(name) {
            if assign_site < decl_site {
                return Err(ResolveError {
                    span: SourceSpan::new(1, 1, 0),
                    message: format!("`global {name}` appears after an assignment to `{name}`"),
                });
            }
        }
    }
    for (name, site) in &globals {
        scope.declared_global.insert(name.clone(), *site);
    }

    // Locals get slots in first-assignment order (pre-order site order) so
    // slot numbering is deterministic.
    let mut assigned: Vec<(&String, &SiteId)> =
        first_assign.iter().filter(|(n, _)| !globals.contains_key(*n)).collect();
    assigned.sort_by_key(|(_, site)| **site);
    for (name, _) in assigned {
        if scope.locals.contains_key(name) {
            continue; // a parameter reassigned in the body keeps its slot
        }
        // Assigning a name that is a local of an enclosing function would
        // mutate (or shadow) a captured variable; captures are read-only.
        if lookup_enclosing(scopes, name).is_some() {
            return Err(ResolveError {
                span: SourceSpan::new(1, 1, 0),
                message: format!("cannot assign to `{name}`: it is captured from an enclosing function"),
            });
        }
        let slot = scope.next_slot;
        scope.next_slot += 1;
        scope.locals.insert(name.clone(), (slot, false));
    }

    scopes.push(scope);
    resolve_block(&mut def.body, scopes, Ctx { in_fn: true, loop_depth: 0 })?;
    let scope = scopes.pop().expect("scope stack");
    def.local_count = scope.next_slot;
    def.captures = scope.captures;
    Ok(())
}

/// Does any enclosing *function* scope hold this name as a local or capture?
fn lookup_enclosing(scopes: &[FnScope], name: &str) -> Option<usize> {
    for (i, sc) in scopes.iter().enumerate().rev() {
        if sc.declared_global.contains_key(name) {
            return None; // explicitly global there, not capturable
        }
        if sc.locals.contains_key(name) || sc.capture_names.contains_key(name) {
            return Some(i);
        }
    }
    None
}

/// Resolve a free name in the innermost scope, threading captures through
/// every intermediate function.
fn capture_through(scopes: &mut [FnScope], found_at: usize, name: &str) -> u16 {
    let depth = scopes.len();
    for level in (found_at + 1)..depth {
        if scopes[level].capture_names.contains_key(name) {
            continue;
        }
        let source = {
            let outer = &scopes[level - 1];
            if let Some((slot, _)) = outer.locals.get(name) {
                CaptureSource::EnclosingLocal(*slot)
            } else {
                CaptureSource::EnclosingCapture(outer.capture_names[name])
            }
        };
        let idx = scopes[level].captures.len() as u16;
        scopes[level].captures.push(source);
        scopes[level].capture_names.insert(name.to_string(), idx);
    }
    scopes[depth - 1].capture_names[name]
}

fn resolve_block(body: &mut [Stmt], scopes: &mut Vec<FnScope>, ctx: Ctx) -> Result<(), ResolveError> {
    for s in body {
        resolve_stmt(s, scopes, ctx)?;
    }
    Ok(())
}

fn resolve_stmt(s: &mut Stmt, scopes: &mut Vec<FnScope>, ctx: Ctx) -> Result<(), ResolveError> {
    match &mut s.kind {
        StmtKind::FnDef(def) => {
            def.name_binding = assign_binding(scopes, &def.name);
            resolve_fn(def, scopes)?;
        }
        StmtKind::Let { name, value } | StmtKind::Assign { name, value } => {
            resolve_expr(value, scopes, false)?;
            name.binding = assign_binding(scopes, &name.name);
        }
        StmtKind::AttrAssign { object, value, .. } => {
            resolve_expr(object, scopes, false)?;
            resolve_expr(value, scopes, false)?;
        }
        StmtKind::SubscrAssign { object, index, value } => {
            resolve_expr(object, scopes, false)?;
            resolve_expr(index, scopes, false)?;
            resolve_expr(value, scopes, false)?;
        }
        StmtKind::GlobalDecl { .. } => {}
        StmtKind::If { cond, then_body, else_body } => {
            resolve_expr(cond, scopes, false)?;
            resolve_block(then_body, scopes, ctx)?;
            if let Some(e) = else_body {
                resolve_block(e, scopes, ctx)?;
            }
        }
        StmtKind::While { cond, body } => {
            resolve_expr(cond, scopes, false)?;
            resolve_block(body, scopes, ctx.in_loop())?;
        }
        StmtKind::ForIn { var, iterable, body } => {
            resolve_expr(iterable, scopes, false)?;
            var.binding = assign_binding(scopes, &var.name);
            resolve_block(body, scopes, ctx.in_loop())?;
        }
        StmtKind::Return { value } => {
            if !ctx.in_fn {
                return Err(ResolveError {
                    span: s.span,
                    message: "`return` outside a function".to_string(),
                });
            }
            if let Some(v) = value {
                resolve_expr(v, scopes, false)?;
            }
        }
        StmtKind::Break | StmtKind::Continue => {
            if ctx.loop_depth == 0 {
                let what = if matches!(s.kind, StmtKind::Break) { "break" } else { "continue" };
                return Err(ResolveError {
                    span: s.span,
                    message: format!("`{what}` outside a loop"),
                });
            }
        }
        StmtKind::Assert { cond } => resolve_expr(cond, scopes, false)?,
        StmtKind::Expr { value } => resolve_expr(value, scopes, false)?,
    }
    Ok(())
}

fn assign_binding(scopes: &[FnScope], name: &str) -> Binding {
    match scopes.last() {
        None => Binding::Global,
        Some(sc) => {
            if sc.declared_global.contains_key(name) {
                Binding::Global
            } else if let Some((slot, is_param)) = sc.locals.get(name) {
                if *is_param {
                    Binding::Param(*slot)
                } else {
                    Binding::Local(*slot)
                }
            } else {
                // scan_body pre-registered every assigned name.
                unreachable!("assignment target `{name}` missing from scope")
            }
        }
    }
}

fn resolve_expr(e: &mut Expr, scopes: &mut Vec<FnScope>, is_callee: bool) -> Result<(), ResolveError> {
    match &mut e.kind {
        ExprKind::Literal(_) => {}
        ExprKind::ListLit(items) => {
            for it in items {
                resolve_expr(it, scopes, false)?;
            }
        }
        ExprKind::RecordLit(fields) => {
            for (_, v) in fields {
                resolve_expr(v, scopes, false)?;
            }
        }
        ExprKind::Name(ident) => {
            ident.binding = name_binding(scopes, &ident.name);
            if let Binding::Builtin(_) = ident.binding {
                if !is_callee {
                    return Err(ResolveError {
                        span: ident.span,
                        message: format!("builtin `{}` used as a value", ident.name),
                    });
                }
            }
        }
        ExprKind::BinOp { lhs, rhs, .. } => {
            resolve_expr(lhs, scopes, false)?;
            resolve_expr(rhs, scopes, false)?;
        }
        ExprKind::UnOp { operand, .. } => resolve_expr(operand, scopes, false)?,
        ExprKind::Call { callee, args } => {
            resolve_expr(callee, scopes, true)?;
            for a in args {
                resolve_expr(a, scopes, false)?;
            }
        }
        ExprKind::AttrGet { object, .. } => resolve_expr(object, scopes, false)?,
        ExprKind::SubscrGet { object, index } => {
            resolve_expr(object, scopes, false)?;
            resolve_expr(index, scopes, false)?;
        }
    }
    Ok(())
}

fn name_binding(scopes: &mut Vec<FnScope>, name: &str) -> Binding {
    if let Some(sc) = scopes.last() {
        if sc.declared_global.contains_key(name) {
            return Binding::Global;
        }
        if let Some((slot, is_param)) = sc.locals.get(name) {
            return if *is_param { Binding::Param(*slot) } else { Binding::Local(*slot) };
        }
        if let Some(idx) = sc.capture_names.get(name) {
            return Binding::Captured(*idx);
        }
        // Free in this function: an enclosing function local becomes a
        // capture; otherwise builtin, then global.
        let outer_depth = scopes.len() - 1;
        if let Some(found) = lookup_enclosing(&scopes[..outer_depth], name) {
            let idx = capture_through(scopes, found, name);
            return Binding::Captured(idx);
        }
    }
    if let Some(b) = Builtin::from_name(name) {
        return Binding::Builtin(b);
    }
    Binding::Global
}

trait SpanFallback {
    fn unwrap_or_default_span(self) -> SourceSpan;
}

impl SpanFallback for Option<SourceSpan> {
    fn unwrap_or_default_span(self) -> SourceSpan {
        self.unwrap_or(SourceSpan { line: 1, column: 1, length: 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::parse_source;

    fn resolve_src(src: &str) -> Result<Program, ResolveError> {
        resolve(parse_source(src).unwrap())
    }

    fn find_fn<'a>(p: &'a Program, name: &str) -> &'a FnDef {
        fn walk<'a>(stmts: &'a [Stmt], name: &str) -> Option<&'a FnDef> {
            for s in stmts {
                if let StmtKind::FnDef(d) = &s.kind {
                    if d.name == name {
                        return Some(d);
                    }
                    if let Some(f) = walk(&d.body, name) {
                        return Some(f);
                    }
                }
            }
            None
        }
        walk(&p.body, name).expect("fn not found")
    }

    #[test]
    fn p2_scoping() {
        let p = resolve_src(
            "let model = record { state: 0.0 }\n\
             fn step(seq) {\n\
               let s = model.state\n\
               let out = 0.0\n\
               for item in seq {\n\
                 s = s + item\n\
                 out = out + s\n\
               }\n\
               model.state = s\n\
               return out\n\
             }",
        )
        .unwrap();
        let step = find_fn(&p, "step");
        assert_eq!(step.local_count, 4); // seq, s, out, item
        // model resolves Global; s/out/item resolve Local.
        fn check(stmts: &[Stmt]) {
            for s in stmts {
                match &s.kind {
                    StmtKind::Let { name, value } | StmtKind::Assign { name, value } => {
                        if name.name == "s" || name.name == "out" {
                            assert!(matches!(name.binding, Binding::Local(_)), "{}", name.name);
                        }
                        check_expr(value);
                    }
                    StmtKind::ForIn { var, body, .. } => {
                        assert!(matches!(var.binding, Binding::Local(_)));
                        check(body);
                    }
                    StmtKind::AttrAssign { object, .. } => check_expr(object),
                    _ => {}
                }
            }
        }
        fn check_expr(e: &Expr) {
            match &e.kind {
                ExprKind::Name(id) if id.name == "model" => {
                    assert_eq!(id.binding, Binding::Global)
                }
                ExprKind::AttrGet { object, .. } => check_expr(object),
                ExprKind::BinOp { lhs, rhs, .. } => {
                    check_expr(lhs);
                    check_expr(rhs);
                }
                _ => {}
            }
        }
        check(&step.body);
    }

    #[test]
    fn late_bound_global_function() {
        let p = resolve_src("fn f() { return g() }\nfn g() { return 1 }").unwrap();
        let f = find_fn(&p, "f");
        match &f.body[0].kind {
            StmtKind::Return { value: Some(v) } => match &v.kind {
                ExprKind::Call { callee, .. } => match &callee.kind {
                    ExprKind::Name(id) => assert_eq!(id.binding, Binding::Global),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            },
            _ => unreachable!(),
        }
    }

    #[test]
    fn break_outside_loop_is_error() {
        let err = resolve_src("fn f() { break }").unwrap_err();
        assert!(err.message.contains("`break` outside a loop"));
        assert!(resolve_src("fn f() { while true { break } }").is_ok());
    }

    #[test]
    fn return_outside_function_is_error() {
        let err = resolve_src("return 1").unwrap_err();
        assert!(err.message.contains("outside a function"));
    }

    #[test]
    fn global_naming_parameter_is_error() {
        let err = resolve_src("fn f(x) { global x }").unwrap_err();
        assert!(err.message.contains("names a parameter"));
    }

    #[test]
    fn global_decl_after_assignment_is_error() {
        let err = resolve_src("fn f() { x = 1 global x }").unwrap_err();
        assert!(err.message.contains("after an assignment"));
    }

    #[test]
    fn global_decl_makes_assignment_global() {
        let p = resolve_src("fn f() { global g g = 1 }").unwrap();
        let f = find_fn(&p, "f");
        match &f.body[1].kind {
            StmtKind::Assign { name, .. } => assert_eq!(name.binding, Binding::Global),
            _ => unreachable!(),
        }
        assert_eq!(f.local_count, 0);
    }

    #[test]
    fn nested_fn_captures_enclosing_local() {
        let p = resolve_src("fn outer() { let a = 1 fn inner() { return a } return inner() }")
            .unwrap();
        let inner = find_fn(&p, "inner");
        assert_eq!(inner.captures.len(), 1);
        assert_eq!(inner.captures[0], CaptureSource::EnclosingLocal(0));
    }

    #[test]
    fn assigning_captured_variable_is_error() {
        let err =
            resolve_src("fn outer() { let a = 1 fn inner() { a = 2 } return inner() }").unwrap_err();
        assert!(err.message.contains("captured"), "{}", err.message);
    }

    #[test]
    fn builtin_as_value_is_error() {
        let err = resolve_src("let p = print").unwrap_err();
        assert!(err.message.contains("used as a value"));
        assert!(resolve_src("print(1)").is_ok());
    }

    #[test]
    fn builtin_name_shadowed_by_local() {
        // A local named `len` shadows the builtin inside its function.
        let p = resolve_src("fn f() { let len = 3 return len }").unwrap();
        let f = find_fn(&p, "f");
        match &f.body[1].kind {
            StmtKind::Return { value: Some(v) } => match &v.kind {
                ExprKind::Name(id) => assert!(matches!(id.binding, Binding::Local(_))),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        }
    }
}
