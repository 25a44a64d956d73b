//! The shared operator semantics table. The interpreter and the graph
//! executor both evaluate through these functions, so their arithmetic is
//! bit-identical by construction.
//!
//! Numeric rules: Int∘Int stays Int (wrapping on overflow) except `/`, which
//! is float division; any Float operand promotes the result to Float.
//! Tensor∘scalar broadcasts elementwise; Tensor∘Tensor requires identical
//! shapes. `==`/`!=` are defined on all kinds (reference identity for lists
//! and records); ordering is defined on numbers and strings only. `and`/`or`
//! are strict boolean operators, not short-circuiting.

use crate::frontend::{BinOpKind, UnOpKind};

use super::error::{RtError, RtErrorKind};
use super::value::{sl_eq, wrapping_ipow, Tensor, Value};

fn type_mismatch(op: BinOpKind, a: &Value, b: &Value) -> RtError {
    RtError::new(
        RtErrorKind::TypeMismatch,
        format!("`{}` not defined on {} and {}", op.symbol(), a.kind().name(), b.kind().name()),
    )
}

pub fn apply_binop(op: BinOpKind, a: &Value, b: &Value) -> Result<Value, RtError> {
    use BinOpKind::*;
    match op {
        Eq => return Ok(Value::Bool(sl_eq(a, b))),
        Ne => return Ok(Value::Bool(!sl_eq(a, b))),
        Lt | Le | Gt | Ge => return compare(op, a, b),
        And | Or => {
            return match (a, b) {
                (Value::Bool(x), Value::Bool(y)) => Ok(Value::Bool(match op {
                    And => *x && *y,
                    Or => *x || *y,
                    _ => unreachable!(),
                })),
                _ => Err(type_mismatch(op, a, b)),
            }
        }
        _ => {}
    }
    // Arithmetic.
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => int_arith(op, *x, *y),
        (Value::Int(x), Value::Float(y)) => float_arith(op, *x as f64, *y),
        (Value::Float(x), Value::Int(y)) => float_arith(op, *x, *y as f64),
        (Value::Float(x), Value::Float(y)) => float_arith(op, *x, *y),
        (Value::Tensor(t), other) if scalar_f64(other).is_some() => {
            let s = scalar_f64(other).unwrap();
            Ok(Value::Tensor(t.map(|x| float_op(op, x, s))))
        }
        (other, Value::Tensor(t)) if scalar_f64(other).is_some() => {
            let s = scalar_f64(other).unwrap();
            Ok(Value::Tensor(t.map(|x| float_op(op, s, x))))
        }
        (Value::Tensor(x), Value::Tensor(y)) => {
            if x.shape != y.shape {
                return Err(RtError::new(
                    RtErrorKind::ShapeMismatch,
                    format!(
                        "`{}` on tensors of shapes {:?} and {:?}",
                        op.symbol(),
                        &*x.shape,
                        &*y.shape
                    ),
                ));
            }
            let data: Vec<f64> =
                x.data.iter().zip(y.data.iter()).map(|(&p, &q)| float_op(op, p, q)).collect();
            Ok(Value::Tensor(Tensor { shape: x.shape.clone(), data: data.into() }))
        }
        _ => Err(type_mismatch(op, a, b)),
    }
}

fn scalar_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Int(x) => Some(*x as f64),
        Value::Float(x) => Some(*x),
        _ => None,
    }
}

fn int_arith(op: BinOpKind, x: i64, y: i64) -> Result<Value, RtError> {
    use BinOpKind::*;
    Ok(match op {
        Add => Value::Int(x.wrapping_add(y)),
        Sub => Value::Int(x.wrapping_sub(y)),
        Mul => Value::Int(x.wrapping_mul(y)),
        Div => {
            if y == 0 {
                return Err(RtError::new(RtErrorKind::DivByZero, format!("{x} / 0")));
            }
            Value::Float(x as f64 / y as f64)
        }
        Mod => {
            if y == 0 {
                return Err(RtError::new(RtErrorKind::DivByZero, format!("{x} % 0")));
            }
            Value::Int(x.wrapping_rem(y))
        }
        Pow => {
            if y < 0 {
                return Err(RtError::new(
                    RtErrorKind::TypeMismatch,
                    format!("negative integer exponent {y}"),
                ));
            }
            Value::Int(wrapping_ipow(x, y))
        }
        _ => unreachable!("non-arithmetic op in int_arith"),
    })
}

fn float_arith(op: BinOpKind, x: f64, y: f64) -> Result<Value, RtError> {
    Ok(Value::Float(float_op(op, x, y)))
}

fn float_op(op: BinOpKind, x: f64, y: f64) -> f64 {
    use BinOpKind::*;
    match op {
        Add => x + y,
        Sub => x - y,
        Mul => x * y,
        Div => x / y,
        Mod => x % y,
        Pow => x.powf(y),
        _ => unreachable!("non-arithmetic op in float_op"),
    }
}

fn compare(op: BinOpKind, a: &Value, b: &Value) -> Result<Value, RtError> {
    use std::cmp::Ordering;
    let ord = match (a, b) {
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Str(x), Value::Str(y)) => x.cmp(y),
        _ => match (scalar_f64(a), scalar_f64(b)) {
            (Some(x), Some(y)) => match x.partial_cmp(&y) {
                Some(o) => o,
                // NaN comparisons are false for every ordering operator.
                None => return Ok(Value::Bool(false)),
            },
            _ => return Err(type_mismatch(op, a, b)),
        },
    };
    Ok(Value::Bool(match op {
        BinOpKind::Lt => ord == Ordering::Less,
        BinOpKind::Le => ord != Ordering::Greater,
        BinOpKind::Gt => ord == Ordering::Greater,
        BinOpKind::Ge => ord != Ordering::Less,
        _ => unreachable!(),
    }))
}

pub fn apply_unop(op: UnOpKind, v: &Value) -> Result<Value, RtError> {
    match (op, v) {
        (UnOpKind::Neg, Value::Int(x)) => Ok(Value::Int(x.wrapping_neg())),
        (UnOpKind::Neg, Value::Float(x)) => Ok(Value::Float(-x)),
        (UnOpKind::Neg, Value::Tensor(t)) => Ok(Value::Tensor(t.map(|x| -x))),
        (UnOpKind::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        _ => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("`{}` not defined on {}", op.symbol(), v.kind().name()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_plus_int() {
        let v = apply_binop(BinOpKind::Add, &Value::Int(2), &Value::Int(3)).unwrap();
        assert!(matches!(v, Value::Int(5)));
    }

    #[test]
    fn tensor_times_scalar_broadcasts() {
        let t = Value::Tensor(Tensor::new(vec![2], vec![1.0, 2.0]));
        let v = apply_binop(BinOpKind::Mul, &t, &Value::Float(0.5)).unwrap();
        match v {
            Value::Tensor(t) => assert_eq!(&*t.data, &[0.5, 1.0]),
            _ => panic!(),
        }
    }

    #[test]
    fn tensor_shape_mismatch() {
        let a = Value::Tensor(Tensor::filled(vec![2, 2], 1.0));
        let b = Value::Tensor(Tensor::filled(vec![3, 2], 1.0));
        let err = apply_binop(BinOpKind::Add, &a, &b).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::ShapeMismatch);
    }

    #[test]
    fn division_semantics() {
        // Int / Int is float division; zero divisor on ints is an error.
        let v = apply_binop(BinOpKind::Div, &Value::Int(1), &Value::Int(2)).unwrap();
        assert!(matches!(v, Value::Float(x) if x == 0.5));
        let err = apply_binop(BinOpKind::Div, &Value::Int(1), &Value::Int(0)).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::DivByZero);
        // Floats follow IEEE.
        let v = apply_binop(BinOpKind::Div, &Value::Float(1.0), &Value::Float(0.0)).unwrap();
        assert!(matches!(v, Value::Float(x) if x == f64::INFINITY));
        let err = apply_binop(BinOpKind::Mod, &Value::Int(5), &Value::Int(0)).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::DivByZero);
    }

    #[test]
    fn integer_overflow_wraps() {
        let v = apply_binop(BinOpKind::Add, &Value::Int(i64::MAX), &Value::Int(1)).unwrap();
        assert!(matches!(v, Value::Int(x) if x == i64::MIN));
        let v = apply_binop(BinOpKind::Pow, &Value::Int(2), &Value::Int(64)).unwrap();
        assert!(matches!(v, Value::Int(0)));
    }

    #[test]
    fn ordering_rules() {
        assert!(matches!(
            apply_binop(BinOpKind::Lt, &Value::Int(1), &Value::Float(1.5)).unwrap(),
            Value::Bool(true)
        ));
        assert!(matches!(
            apply_binop(BinOpKind::Lt, &Value::str("a"), &Value::str("b")).unwrap(),
            Value::Bool(true)
        ));
        let err = apply_binop(BinOpKind::Lt, &Value::str("a"), &Value::Int(1)).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::TypeMismatch);
        let t = Value::Tensor(Tensor::scalar(1.0));
        assert_eq!(
            apply_binop(BinOpKind::Lt, &t, &t).unwrap_err().kind,
            RtErrorKind::TypeMismatch
        );
    }

    #[test]
    fn boolean_ops_are_strict_and_typed() {
        assert!(matches!(
            apply_binop(BinOpKind::And, &Value::Bool(true), &Value::Bool(false)).unwrap(),
            Value::Bool(false)
        ));
        let err = apply_binop(BinOpKind::And, &Value::Bool(true), &Value::Int(1)).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::TypeMismatch);
    }

    #[test]
    fn negative_int_exponent_rejected() {
        let err = apply_binop(BinOpKind::Pow, &Value::Int(2), &Value::Int(-1)).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::TypeMismatch);
    }
}
