//! Recursive-descent parser for SL.
//!
//! Operator precedence, loosest first: `or`, `and`, `not`, comparisons,
//! `+ -`, `* / %`, unary `-`, `**` (right-associative), then call / attribute
//! / subscript. Site ids are assigned in pre-order once the tree is built.

use super::ast::*;
use super::lexer::tokenize;
use super::token::{SourceSpan, Token, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at {}: {}", self.span, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse(tokens: Vec<Token>) -> Result<Program, ParseError> {
    let mut p = Parser { tokens, pos: 0 };
    let mut body = Vec::new();
    while !p.at(&TokenKind::Eof) {
        body.push(p.statement()?);
    }
    let fn_count = assign_sites(&mut body);
    Ok(Program { body, fn_count })
}

/// Lex and parse in one step. Lex errors surface as parse errors.
pub fn parse_source(source: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source).map_err(|e| ParseError { span: e.span, message: e.message })?;
    parse(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.peek().kind.describe())))
        }
    }

    fn error(&self, message: String) -> ParseError {
        ParseError { span: self.peek().span, message }
    }

    fn name(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        let span = self.peek().span;
        match self.peek().kind.clone() {
            TokenKind::Name(n) => {
                self.bump();
                Ok((n, span))
            }
            other => Err(self.error(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let span = self.peek().span;
        let kind = match self.peek().kind.clone() {
            TokenKind::Fn => return self.fn_def(),
            TokenKind::Let => {
                self.bump();
                let (n, nspan) = self.name("variable name after `let`")?;
                self.expect(TokenKind::Eq, "`=` in `let`")?;
                let value = self.expr()?;
                StmtKind::Let { name: Ident::new(n, nspan), value }
            }
            TokenKind::Global => {
                self.bump();
                let (name, _) = self.name("variable name after `global`")?;
                StmtKind::GlobalDecl { name }
            }
            TokenKind::If => return self.if_stmt(),
            TokenKind::While => {
                self.bump();
                let cond = self.expr()?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            TokenKind::For => {
                self.bump();
                let (n, nspan) = self.name("loop variable after `for`")?;
                self.expect(TokenKind::In, "`in`")?;
                let iterable = self.expr()?;
                let body = self.block()?;
                StmtKind::ForIn { var: Ident::new(n, nspan), iterable, body }
            }
            TokenKind::Return => {
                self.bump();
                let value = if self.starts_expr() { Some(self.expr()?) } else { None };
                StmtKind::Return { value }
            }
            TokenKind::Break => {
                self.bump();
                StmtKind::Break
            }
            TokenKind::Continue => {
                self.bump();
                StmtKind::Continue
            }
            TokenKind::Assert => {
                self.bump();
                StmtKind::Assert { cond: self.expr()? }
            }
            _ => {
                let target = self.expr()?;
                if self.eat(&TokenKind::Eq) {
                    let value = self.expr()?;
                    match target.kind {
                        ExprKind::Name(ident) => StmtKind::Assign { name: ident, value },
                        ExprKind::AttrGet { object, attr } => {
                            StmtKind::AttrAssign { object: *object, attr, value }
                        }
                        ExprKind::SubscrGet { object, index } => {
                            StmtKind::SubscrAssign { object: *object, index: *index, value }
                        }
                        _ => {
                            return Err(ParseError {
                                span: target.span,
                                message: "invalid assignment target (expected name, attribute, or subscript)"
                                    .to_string(),
                            })
                        }
                    }
                } else {
                    StmtKind::Expr { value: target }
                }
            }
        };
        Ok(Stmt { site: SiteId(u32::MAX), span, kind })
    }

    fn fn_def(&mut self) -> Result<Stmt, ParseError> {
        let span = self.peek().span;
        self.bump(); // fn
        let (name, _) = self.name("function name")?;
        self.expect(TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            loop {
                let (p, pspan) = self.name("parameter name")?;
                params.push(Ident::new(p, pspan));
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        let body = self.block()?;
        Ok(Stmt {
            site: SiteId(u32::MAX),
            span,
            kind: StmtKind::FnDef(FnDef {
                id: FnDefId(u32::MAX),
                name,
                name_binding: Binding::Unresolved,
                params,
                body,
                local_count: 0,
                captures: Vec::new(),
            }),
        })
    }

    fn if_stmt(&mut self) -> Result<Stmt, ParseError> {
        let span = self.peek().span;
        self.bump(); // if
        let cond = self.expr()?;
        let then_body = self.block()?;
        let else_body = if self.eat(&TokenKind::Else) { Some(self.block()?) } else { None };
        Ok(Stmt { site: SiteId(u32::MAX), span, kind: StmtKind::If { cond, then_body, else_body } })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            if self.at(&TokenKind::Eof) {
                return Err(self.error("expected `}`, found end of input".to_string()));
            }
            stmts.push(self.statement()?);
        }
        self.bump();
        Ok(stmts)
    }

    fn starts_expr(&self) -> bool {
        matches!(
            self.peek().kind,
            TokenKind::Int(_)
                | TokenKind::Float(_)
                | TokenKind::Str(_)
                | TokenKind::Name(_)
                | TokenKind::True
                | TokenKind::False
                | TokenKind::Nil
                | TokenKind::Record
                | TokenKind::LParen
                | TokenKind::LBracket
                | TokenKind::Minus
                | TokenKind::Not
        )
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn mk(&self, span: SourceSpan, kind: ExprKind) -> Expr {
        Expr { site: SiteId(u32::MAX), span, kind }
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.at(&TokenKind::Or) {
            let span = self.bump().span;
            let rhs = self.and_expr()?;
            lhs = self.mk(span, ExprKind::BinOp { op: BinOpKind::Or, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.not_expr()?;
        while self.at(&TokenKind::And) {
            let span = self.bump().span;
            let rhs = self.not_expr()?;
            lhs = self.mk(span, ExprKind::BinOp { op: BinOpKind::And, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, ParseError> {
        if self.at(&TokenKind::Not) {
            let span = self.bump().span;
            let operand = self.not_expr()?;
            return Ok(self.mk(span, ExprKind::UnOp { op: UnOpKind::Not, operand: Box::new(operand) }));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.add_expr()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::EqEq => BinOpKind::Eq,
                TokenKind::BangEq => BinOpKind::Ne,
                TokenKind::Lt => BinOpKind::Lt,
                TokenKind::Le => BinOpKind::Le,
                TokenKind::Gt => BinOpKind::Gt,
                TokenKind::Ge => BinOpKind::Ge,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.add_expr()?;
            lhs = self.mk(span, ExprKind::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOpKind::Add,
                TokenKind::Minus => BinOpKind::Sub,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.mul_expr()?;
            lhs = self.mk(span, ExprKind::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOpKind::Mul,
                TokenKind::Slash => BinOpKind::Div,
                TokenKind::Percent => BinOpKind::Mod,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.unary_expr()?;
            lhs = self.mk(span, ExprKind::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> Result<Expr, ParseError> {
        if self.at(&TokenKind::Minus) {
            let span = self.bump().span;
            let operand = self.unary_expr()?;
            return Ok(self.mk(span, ExprKind::UnOp { op: UnOpKind::Neg, operand: Box::new(operand) }));
        }
        self.pow_expr()
    }

    fn pow_expr(&mut self) -> Result<Expr, ParseError> {
        let base = self.postfix_expr()?;
        if self.at(&TokenKind::StarStar) {
            let span = self.bump().span;
            // Right-associative; the exponent may carry a unary minus.
            let rhs = self.unary_expr()?;
            return Ok(self.mk(
                span,
                ExprKind::BinOp { op: BinOpKind::Pow, lhs: Box::new(base), rhs: Box::new(rhs) },
            ));
        }
        Ok(base)
    }

    fn postfix_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary_expr()?;
        loop {
            match self.peek().kind {
                TokenKind::LParen => {
                    let span = self.bump().span;
                    let mut args = Vec::new();
                    if !self.at(&TokenKind::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat(&TokenKind::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(TokenKind::RParen, "`)`")?;
                    e = self.mk(span, ExprKind::Call { callee: Box::new(e), args });
                }
                TokenKind::Dot => {
                    let span = self.bump().span;
                    let (attr, _) = self.name("attribute name after `.`")?;
                    e = self.mk(span, ExprKind::AttrGet { object: Box::new(e), attr });
                }
                TokenKind::LBracket => {
                    let span = self.bump().span;
                    let index = self.expr()?;
                    self.expect(TokenKind::RBracket, "`]`")?;
                    e = self.mk(span, ExprKind::SubscrGet { object: Box::new(e), index: Box::new(index) });
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary_expr(&mut self) -> Result<Expr, ParseError> {
        let span = self.peek().span;
        let kind = match self.peek().kind.clone() {
            TokenKind::Int(v) => {
                self.bump();
                ExprKind::Literal(Literal::Int(v))
            }
            TokenKind::Float(v) => {
                self.bump();
                ExprKind::Literal(Literal::Float(v))
            }
            TokenKind::Str(s) => {
                self.bump();
                ExprKind::Literal(Literal::Str(s))
            }
            TokenKind::True => {
                self.bump();
                ExprKind::Literal(Literal::Bool(true))
            }
            TokenKind::False => {
                self.bump();
                ExprKind::Literal(Literal::Bool(false))
            }
            TokenKind::Nil => {
                self.bump();
                ExprKind::Literal(Literal::Nil)
            }
            TokenKind::Name(n) => {
                self.bump();
                ExprKind::Name(Ident::new(n, span))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                return Ok(inner);
            }
            TokenKind::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if !self.at(&TokenKind::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RBracket, "`]`")?;
                ExprKind::ListLit(items)
            }
            TokenKind::Record => {
                self.bump();
                self.expect(TokenKind::LBrace, "`{` after `record`")?;
                let mut fields = Vec::new();
                if !self.at(&TokenKind::RBrace) {
                    loop {
                        let (name, _) = self.name("field name")?;
                        self.expect(TokenKind::Colon, "`:`")?;
                        fields.push((name, self.expr()?));
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RBrace, "`}`")?;
                ExprKind::RecordLit(fields)
            }
            other => {
                return Err(self.error(format!("expected expression, found {}", other.describe())))
            }
        };
        Ok(self.mk(span, kind))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> Program {
        parse_source(src).unwrap()
    }

    #[test]
    fn loss_fn_shape() {
        // The two-statement linear model: a let of 0.5 * x + 1.5 and a return
        // of (y_ - y) ** 2.
        let p = parse_ok("fn loss_fn(x, y) {\n  let y_ = 0.5 * x + 1.5\n  return (y_ - y) ** 2\n}");
        let def = match &p.body[0].kind {
            StmtKind::FnDef(d) => d,
            other => panic!("expected fn def, got {other:?}"),
        };
        assert_eq!(def.name, "loss_fn");
        assert_eq!(def.params.len(), 2);
        assert_eq!(def.body.len(), 2);
        match &def.body[0].kind {
            StmtKind::Let { name, value } => {
                assert_eq!(name.name, "y_");
                // (0.5 * x) + 1.5
                match &value.kind {
                    ExprKind::BinOp { op: BinOpKind::Add, lhs, .. } => match &lhs.kind {
                        ExprKind::BinOp { op: BinOpKind::Mul, .. } => {}
                        other => panic!("expected mul on lhs, got {other:?}"),
                    },
                    other => panic!("expected add, got {other:?}"),
                }
            }
            other => panic!("expected let, got {other:?}"),
        }
        match &def.body[1].kind {
            StmtKind::Return { value: Some(v) } => match &v.kind {
                ExprKind::BinOp { op: BinOpKind::Pow, lhs, .. } => match &lhs.kind {
                    ExprKind::BinOp { op: BinOpKind::Sub, .. } => {}
                    other => panic!("expected sub base, got {other:?}"),
                },
                other => panic!("expected pow, got {other:?}"),
            },
            other => panic!("expected return, got {other:?}"),
        }
    }

    #[test]
    fn pow_is_right_associative() {
        let p = parse_ok("let z = 2 ** 3 ** 2");
        match &p.body[0].kind {
            StmtKind::Let { value, .. } => match &value.kind {
                ExprKind::BinOp { op: BinOpKind::Pow, lhs, rhs } => {
                    assert!(matches!(lhs.kind, ExprKind::Literal(Literal::Int(2))));
                    assert!(matches!(rhs.kind, ExprKind::BinOp { op: BinOpKind::Pow, .. }));
                }
                other => panic!("expected pow, got {other:?}"),
            },
            other => panic!("expected let, got {other:?}"),
        }
    }

    #[test]
    fn if_requires_condition() {
        let err = parse_source("if { }").unwrap_err();
        assert!(err.message.contains("expected expression"), "{}", err.message);
    }

    #[test]
    fn unary_minus_binds_looser_than_pow() {
        // -2 ** 2 parses as -(2 ** 2)
        let p = parse_ok("let z = -2 ** 2");
        match &p.body[0].kind {
            StmtKind::Let { value, .. } => {
                assert!(matches!(value.kind, ExprKind::UnOp { op: UnOpKind::Neg, .. }));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn not_binds_looser_than_comparison() {
        // not a == b parses as not (a == b)
        let p = parse_ok("let z = not a == b");
        match &p.body[0].kind {
            StmtKind::Let { value, .. } => match &value.kind {
                ExprKind::UnOp { op: UnOpKind::Not, operand } => {
                    assert!(matches!(operand.kind, ExprKind::BinOp { op: BinOpKind::Eq, .. }));
                }
                other => panic!("expected not, got {other:?}"),
            },
            _ => unreachable!(),
        }
    }

    #[test]
    fn assignment_targets() {
        let p = parse_ok("x = 1 o.a = 2 xs[0] = 3");
        assert!(matches!(p.body[0].kind, StmtKind::Assign { .. }));
        assert!(matches!(p.body[1].kind, StmtKind::AttrAssign { .. }));
        assert!(matches!(p.body[2].kind, StmtKind::SubscrAssign { .. }));
        let err = parse_source("f(x) = 1").unwrap_err();
        assert!(err.message.contains("invalid assignment target"));
    }

    #[test]
    fn site_ids_are_preorder_and_deterministic() {
        let src = "fn f(a) { return a + 1 }\nlet y = f(2)";
        let p1 = parse_ok(src);
        let p2 = parse_ok(src);
        let mut sites1 = Vec::new();
        collect_sites(&p1.body, &mut sites1);
        let mut sites2 = Vec::new();
        collect_sites(&p2.body, &mut sites2);
        assert_eq!(sites1, sites2);
        let mut sorted = sites1.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), sites1.len(), "site ids must be unique");
    }

    fn collect_sites(stmts: &[Stmt], out: &mut Vec<u32>) {
        for s in stmts {
            out.push(s.site.0);
            match &s.kind {
                StmtKind::FnDef(d) => {
                    for p in &d.params {
                        out.push(p.site.0);
                    }
                    collect_sites(&d.body, out);
                }
                StmtKind::If { then_body, else_body, .. } => {
                    collect_sites(then_body, out);
                    if let Some(e) = else_body {
                        collect_sites(e, out);
                    }
                }
                StmtKind::While { body, .. } | StmtKind::ForIn { body, .. } => {
                    collect_sites(body, out)
                }
                _ => {}
            }
        }
    }

    #[test]
    fn record_literal_and_call_chain() {
        let p = parse_ok("let r = record { a: 1, b: [1, 2] }\nlet v = f(1)(2).x[0]");
        assert!(matches!(
            p.body[0].kind,
            StmtKind::Let { value: Expr { kind: ExprKind::RecordLit(_), .. }, .. }
        ));
    }
}
