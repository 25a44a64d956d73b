//! AST pretty-printer. `parse(print(parse(s)))` is structurally equal to
//! `parse(s)`; the round trip is checked in tests.

use super::ast::*;

pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.body {
        print_stmt(s, 0, &mut out);
    }
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn print_block(body: &[Stmt], level: usize, out: &mut String) {
    out.push_str("{\n");
    for s in body {
        print_stmt(s, level + 1, out);
    }
    indent(level, out);
    out.push('}');
}

fn print_stmt(s: &Stmt, level: usize, out: &mut String) {
    indent(level, out);
    match &s.kind {
        StmtKind::FnDef(def) => {
            out.push_str("fn ");
            out.push_str(&def.name);
            out.push('(');
            for (i, p) in def.params.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&p.name);
            }
            out.push_str(") ");
            print_block(&def.body, level, out);
        }
        StmtKind::Let { name, value } => {
            out.push_str("let ");
            out.push_str(&name.name);
            out.push_str(" = ");
            print_expr(value, out);
        }
        StmtKind::Assign { name, value } => {
            out.push_str(&name.name);
            out.push_str(" = ");
            print_expr(value, out);
        }
        StmtKind::AttrAssign { object, attr, value } => {
            print_expr_prec(object, Prec::Postfix, out);
            out.push('.');
            out.push_str(attr);
            out.push_str(" = ");
            print_expr(value, out);
        }
        StmtKind::SubscrAssign { object, index, value } => {
            print_expr_prec(object, Prec::Postfix, out);
            out.push('[');
            print_expr(index, out);
            out.push_str("] = ");
            print_expr(value, out);
        }
        StmtKind::GlobalDecl { name } => {
            out.push_str("global ");
            out.push_str(name);
        }
        StmtKind::If { cond, then_body, else_body } => {
            out.push_str("if ");
            print_expr(cond, out);
            out.push(' ');
            print_block(then_body, level, out);
            if let Some(els) = else_body {
                out.push_str(" else ");
                print_block(els, level, out);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str("while ");
            print_expr(cond, out);
            out.push(' ');
            print_block(body, level, out);
        }
        StmtKind::ForIn { var, iterable, body } => {
            out.push_str("for ");
            out.push_str(&var.name);
            out.push_str(" in ");
            print_expr(iterable, out);
            out.push(' ');
            print_block(body, level, out);
        }
        StmtKind::Return { value } => {
            out.push_str("return");
            if let Some(v) = value {
                out.push(' ');
                print_expr(v, out);
            }
        }
        StmtKind::Break => out.push_str("break"),
        StmtKind::Continue => out.push_str("continue"),
        StmtKind::Assert { cond } => {
            out.push_str("assert ");
            print_expr(cond, out);
        }
        StmtKind::Expr { value } => print_expr(value, out),
    }
    out.push('\n');
}

/// Precedence levels, loosest to tightest, for parenthesization.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Or,
    And,
    Not,
    Cmp,
    Add,
    Mul,
    Unary,
    Pow,
    Postfix,
}

fn binop_prec(op: BinOpKind) -> Prec {
    match op {
        BinOpKind::Or => Prec::Or,
        BinOpKind::And => Prec::And,
        BinOpKind::Eq | BinOpKind::Ne | BinOpKind::Lt | BinOpKind::Le | BinOpKind::Gt
        | BinOpKind::Ge => Prec::Cmp,
        BinOpKind::Add | BinOpKind::Sub => Prec::Add,
        BinOpKind::Mul | BinOpKind::Div | BinOpKind::Mod => Prec::Mul,
        BinOpKind::Pow => Prec::Pow,
    }
}

fn print_expr(e: &Expr, out: &mut String) {
    print_expr_prec(e, Prec::Or, out)
}

fn print_expr_prec(e: &Expr, min: Prec, out: &mut String) {
    let prec = match &e.kind {
        ExprKind::BinOp { op, .. } => binop_prec(*op),
        ExprKind::UnOp { op: UnOpKind::Not, .. } => Prec::Not,
        ExprKind::UnOp { op: UnOpKind::Neg, .. } => Prec::Unary,
        _ => Prec::Postfix,
    };
    let parens = prec < min;
    if parens {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Literal(lit) => match lit {
            Literal::Int(v) => out.push_str(&v.to_string()),
            Literal::Float(v) => {
                let s = format!("{v}");
                out.push_str(&s);
                if !s.contains('.') && !s.contains("inf") && !s.contains("NaN") {
                    out.push_str(".0");
                }
            }
            Literal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Literal::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        other => out.push(other),
                    }
                }
                out.push('"');
            }
            Literal::Nil => out.push_str("nil"),
        },
        ExprKind::ListLit(items) => {
            out.push('[');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_expr(it, out);
            }
            out.push(']');
        }
        ExprKind::RecordLit(fields) => {
            out.push_str("record { ");
            for (i, (n, v)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(n);
                out.push_str(": ");
                print_expr(v, out);
            }
            out.push_str(" }");
        }
        ExprKind::Name(id) => out.push_str(&id.name),
        ExprKind::BinOp { op, lhs, rhs } => {
            // Left-associative operators need parens on an equal-precedence
            // rhs; `**` is right-associative and needs them on the lhs.
            let (lmin, rmin) = if *op == BinOpKind::Pow {
                (Prec::Postfix, Prec::Unary)
            } else {
                (prec, next_tighter(prec))
            };
            print_expr_prec(lhs, lmin, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            print_expr_prec(rhs, rmin, out);
        }
        ExprKind::UnOp { op, operand } => {
            out.push_str(op.symbol());
            if *op == UnOpKind::Not {
                out.push(' ');
                print_expr_prec(operand, Prec::Not, out);
            } else {
                print_expr_prec(operand, Prec::Unary, out);
            }
        }
        ExprKind::Call { callee, args } => {
            print_expr_prec(callee, Prec::Postfix, out);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_expr(a, out);
            }
            out.push(')');
        }
        ExprKind::AttrGet { object, attr } => {
            print_expr_prec(object, Prec::Postfix, out);
            out.push('.');
            out.push_str(attr);
        }
        ExprKind::SubscrGet { object, index } => {
            print_expr_prec(object, Prec::Postfix, out);
            out.push('[');
            print_expr(index, out);
            out.push(']');
        }
    }
    if parens {
        out.push(')');
    }
}

fn next_tighter(p: Prec) -> Prec {
    match p {
        Prec::Or => Prec::And,
        Prec::And => Prec::Not,
        Prec::Not => Prec::Cmp,
        Prec::Cmp => Prec::Add,
        Prec::Add => Prec::Mul,
        Prec::Mul => Prec::Unary,
        Prec::Unary => Prec::Pow,
        Prec::Pow => Prec::Postfix,
        Prec::Postfix => Prec::Postfix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::parse_source;

    fn structurally_equal(a: &Program, b: &Program) -> bool {
        // Spans differ after reprinting; structure and the pre-order site
        // assignment must not. The printer output is a faithful function of
        // the structure, so print-equality plus site-sequence equality is an
        // exact structural check.
        print_program(a) == print_program(b) && site_seq(a) == site_seq(b)
    }

    fn site_seq(p: &Program) -> Vec<u32> {
        fn walk(stmts: &[Stmt], out: &mut Vec<u32>) {
            for s in stmts {
                out.push(s.site.0);
                match &s.kind {
                    StmtKind::FnDef(d) => walk(&d.body, out),
                    StmtKind::If { then_body, else_body, .. } => {
                        walk(then_body, out);
                        if let Some(e) = else_body {
                            walk(e, out);
                        }
                    }
                    StmtKind::While { body, .. } | StmtKind::ForIn { body, .. } => walk(body, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&p.body, &mut out);
        out
    }

    #[test]
    fn round_trip_stability() {
        let sources = [
            "fn loss_fn(x, y) { let y_ = 0.5 * x + 1.5 return (y_ - y) ** 2 }",
            "let r = record { a: 1, b: [1, 2, 3] }\nr.a = r.a + 1\nr.b[0] = 9",
            "fn f(n) { if n <= 1 { return 1 } return n * f(n - 1) }",
            "fn g(xs) { let s = 0 for x in xs { s = s + x if s > 10 { break } } return s }",
            "let z = -2 ** 3 ** 2 + (1 - 2) * 3 % 4 / 5",
            "let w = not (a and b) or c == d and e < f",
            "while i < 10 { i = i + 1 continue }",
            "assert len([1]) == 1 print(\"hi\\n\", 1, 2.5, true, nil)",
        ];
        for src in sources {
            let once = parse_source(src).unwrap();
            let printed = print_program(&once);
            let twice = parse_source(&printed).unwrap();
            assert!(
                structurally_equal(&once, &twice),
                "round trip failed for {src:?}\nprinted: {printed}"
            );
            // Printing is a fixed point after one round.
            assert_eq!(printed, print_program(&twice));
        }
    }
}
