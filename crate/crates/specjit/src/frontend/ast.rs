//! Abstract syntax tree for SL.
//!
//! Every statement, expression, and parameter carries a `SiteId`: a stable
//! integer assigned in pre-order over the whole program. Site ids key the
//! profiler histograms, assumptions, and graph-generation facts, so they must
//! be deterministic for identical source text.

use super::token::SourceSpan;

/// Stable per-node identifier, assigned in pre-order after parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteId(pub u32);

impl std::fmt::Display for SiteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Index of a `fn` definition in pre-order over the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnDefId(pub u32);

/// How a name resolved. Filled in by the resolver; `Unresolved` before.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Unresolved,
    /// Function-local variable, including parameters, by slot index.
    Local(u16),
    /// Parameter, by slot index (parameters occupy the first local slots).
    Param(u16),
    /// Value captured from an enclosing function at definition time.
    Captured(u16),
    /// Attribute of the distinguished globals record.
    Global,
    /// One of the whitelisted builtin functions.
    Builtin(crate::runtime::Builtin),
}

#[derive(Debug, Clone)]
pub struct Ident {
    pub name: String,
    pub site: SiteId,
    pub span: SourceSpan,
    pub binding: Binding,
}

impl Ident {
    pub fn new(name: String, span: SourceSpan) -> Self {
        Ident { name, site: SiteId(u32::MAX), span, binding: Binding::Unresolved }
    }
}

#[derive(Debug, Clone)]
pub struct Program {
    pub body: Vec<Stmt>,
    /// Flat pre-order list of every `fn` definition, for lookup by id.
    pub fn_count: u32,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub site: SiteId,
    pub span: SourceSpan,
    pub kind: StmtKind,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    FnDef(FnDef),
    Let { name: Ident, value: Expr },
    Assign { name: Ident, value: Expr },
    AttrAssign { object: Expr, attr: String, value: Expr },
    SubscrAssign { object: Expr, index: Expr, value: Expr },
    GlobalDecl { name: String },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Option<Vec<Stmt>> },
    While { cond: Expr, body: Vec<Stmt> },
    ForIn { var: Ident, iterable: Expr, body: Vec<Stmt> },
    Return { value: Option<Expr> },
    Break,
    Continue,
    Assert { cond: Expr },
    Expr { value: Expr },
}

#[derive(Debug, Clone)]
pub struct FnDef {
    pub id: FnDefId,
    pub name: String,
    /// Binding of the function name in the *enclosing* scope (Global at the
    /// top level, Local inside another function). Set by the resolver.
    pub name_binding: Binding,
    pub params: Vec<Ident>,
    pub body: Vec<Stmt>,
    /// Number of local slots (params first), set by the resolver.
    pub local_count: u16,
    /// Names captured by value from enclosing scopes, set by the resolver.
    pub captures: Vec<CaptureSource>,
}

/// Where a captured value is read from in the *enclosing* frame at the moment
/// the nested `fn` statement executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaptureSource {
    EnclosingLocal(u16),
    EnclosingCapture(u16),
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub site: SiteId,
    pub span: SourceSpan,
    pub kind: ExprKind,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Literal(Literal),
    ListLit(Vec<Expr>),
    RecordLit(Vec<(String, Expr)>),
    Name(Ident),
    BinOp { op: BinOpKind, lhs: Box<Expr>, rhs: Box<Expr> },
    UnOp { op: UnOpKind, operand: Box<Expr> },
    Call { callee: Box<Expr>, args: Vec<Expr> },
    AttrGet { object: Box<Expr>, attr: String },
    SubscrGet { object: Box<Expr>, index: Box<Expr> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    Nil,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BinOpKind {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOpKind::Add => "+",
            BinOpKind::Sub => "-",
            BinOpKind::Mul => "*",
            BinOpKind::Div => "/",
            BinOpKind::Mod => "%",
            BinOpKind::Pow => "**",
            BinOpKind::Eq => "==",
            BinOpKind::Ne => "!=",
            BinOpKind::Lt => "<",
            BinOpKind::Le => "<=",
            BinOpKind::Gt => ">",
            BinOpKind::Ge => ">=",
            BinOpKind::And => "and",
            BinOpKind::Or => "or",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum UnOpKind {
    Neg,
    Not,
}

impl UnOpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOpKind::Neg => "-",
            UnOpKind::Not => "not",
        }
    }
}

impl Program {
    /// Find a function definition by id anywhere in the program.
    pub fn fn_def(&self, id: FnDefId) -> Option<&FnDef> {
        fn in_stmts(stmts: &[Stmt], id: FnDefId) -> Option<&FnDef> {
            for s in stmts {
                if let Some(d) = in_stmt(s, id) {
                    return Some(d);
                }
            }
            None
        }
        fn in_stmt(s: &Stmt, id: FnDefId) -> Option<&FnDef> {
            match &s.kind {
                StmtKind::FnDef(def) => {
                    if def.id == id {
                        return Some(def);
                    }
                    in_stmts(&def.body, id)
                }
                StmtKind::If { then_body, else_body, .. } => in_stmts(then_body, id)
                    .or_else(|| else_body.as_deref().and_then(|b| in_stmts(b, id))),
                StmtKind::While { body, .. } | StmtKind::ForIn { body, .. } => in_stmts(body, id),
                _ => None,
            }
        }
        in_stmts(&self.body, id)
    }
}

/// Local slots assigned anywhere in a statement list, not descending into
/// nested function definitions. Sorted and deduplicated.
pub fn assigned_local_slots(stmts: &[Stmt]) -> Vec<u16> {
    fn walk(stmts: &[Stmt], out: &mut Vec<u16>) {
        for s in stmts {
            match &s.kind {
                StmtKind::Let { name, .. } | StmtKind::Assign { name, .. } => {
                    if let Binding::Local(slot) | Binding::Param(slot) = name.binding {
                        out.push(slot);
                    }
                }
                StmtKind::ForIn { var, body, .. } => {
                    if let Binding::Local(slot) | Binding::Param(slot) = var.binding {
                        out.push(slot);
                    }
                    walk(body, out);
                }
                StmtKind::While { body, .. } => walk(body, out),
                StmtKind::If { then_body, else_body, .. } => {
                    walk(then_body, out);
                    if let Some(e) = else_body {
                        walk(e, out);
                    }
                }
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    walk(stmts, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// Assigns pre-order site ids to every statement, expression, and parameter,
/// and pre-order ids to every `fn` definition. Returns the fn count.
pub fn assign_sites(body: &mut [Stmt]) -> u32 {
    let mut next_site = 0u32;
    let mut next_fn = 0u32;
    for s in body.iter_mut() {
        visit_stmt(s, &mut next_site, &mut next_fn);
    }
    next_fn
}

fn fresh(next: &mut u32) -> SiteId {
    let id = SiteId(*next);
    *next += 1;
    id
}

fn visit_stmt(s: &mut Stmt, site: &mut u32, fns: &mut u32) {
    s.site = fresh(site);
    match &mut s.kind {
        StmtKind::FnDef(def) => {
            def.id = FnDefId(*fns);
            *fns += 1;
            for p in &mut def.params {
                p.site = fresh(site);
            }
            for st in &mut def.body {
                visit_stmt(st, site, fns);
            }
        }
        StmtKind::Let { name, value } | StmtKind::Assign { name, value } => {
            name.site = fresh(site);
            visit_expr(value, site);
        }
        StmtKind::AttrAssign { object, value, .. } => {
            visit_expr(object, site);
            visit_expr(value, site);
        }
        StmtKind::SubscrAssign { object, index, value } => {
            visit_expr(object, site);
            visit_expr(index, site);
            visit_expr(value, site);
        }
        StmtKind::GlobalDecl { .. } | StmtKind::Break | StmtKind::Continue => {}
        StmtKind::If { cond, then_body, else_body } => {
            visit_expr(cond, site);
            for st in then_body {
                visit_stmt(st, site, fns);
            }
            if let Some(els) = else_body {
                for st in els {
                    visit_stmt(st, site, fns);
                }
            }
        }
        StmtKind::While { cond, body } => {
            visit_expr(cond, site);
            for st in body {
                visit_stmt(st, site, fns);
            }
        }
        StmtKind::ForIn { var, iterable, body } => {
            var.site = fresh(site);
            visit_expr(iterable, site);
            for st in body {
                visit_stmt(st, site, fns);
            }
        }
        StmtKind::Return { value } => {
            if let Some(v) = value {
                visit_expr(v, site);
            }
        }
        StmtKind::Assert { cond } => visit_expr(cond, site),
        StmtKind::Expr { value } => visit_expr(value, site),
    }
}

fn visit_expr(e: &mut Expr, site: &mut u32) {
    e.site = fresh(site);
    match &mut e.kind {
        ExprKind::Literal(_) => {}
        ExprKind::ListLit(items) => {
            for it in items {
                visit_expr(it, site);
            }
        }
        ExprKind::RecordLit(fields) => {
            for (_, v) in fields {
                visit_expr(v, site);
            }
        }
        ExprKind::Name(ident) => ident.site = e.site,
        ExprKind::BinOp { lhs, rhs, .. } => {
            visit_expr(lhs, site);
            visit_expr(rhs, site);
        }
        ExprKind::UnOp { operand, .. } => visit_expr(operand, site),
        ExprKind::Call { callee, args } => {
            visit_expr(callee, site);
            for a in args {
                visit_expr(a, site);
            }
        }
        ExprKind::AttrGet { object, .. } => visit_expr(object, site),
        ExprKind::SubscrGet { object, index } => {
            visit_expr(object, site);
            visit_expr(index, site);
        }
    }
}
