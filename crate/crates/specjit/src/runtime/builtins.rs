//! The whitelisted builtin library.
//!
//! `append` and `print` are effectful and handled by each executor; the rest
//! are pure given a heap view (and may allocate fresh lists, which is not an
//! observable effect).

use super::error::{RtError, RtErrorKind};
use super::heap::{HeapCtx, HeapObject};
use super::value::{Tensor, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Tensor,
    Zeros,
    Ones,
    Matmul,
    Sum,
    Mean,
    Tanh,
    Relu,
    Exp,
    Shape,
    Len,
    Range,
    Append,
    Print,
}

pub const ALL_BUILTINS: [Builtin; 14] = [
    Builtin::Tensor,
    Builtin::Zeros,
    Builtin::Ones,
    Builtin::Matmul,
    Builtin::Sum,
    Builtin::Mean,
    Builtin::Tanh,
    Builtin::Relu,
    Builtin::Exp,
    Builtin::Shape,
    Builtin::Len,
    Builtin::Range,
    Builtin::Append,
    Builtin::Print,
];

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "tensor" => Builtin::Tensor,
            "zeros" => Builtin::Zeros,
            "ones" => Builtin::Ones,
            "matmul" => Builtin::Matmul,
            "sum" => Builtin::Sum,
            "mean" => Builtin::Mean,
            "tanh" => Builtin::Tanh,
            "relu" => Builtin::Relu,
            "exp" => Builtin::Exp,
            "shape" => Builtin::Shape,
            "len" => Builtin::Len,
            "range" => Builtin::Range,
            "append" => Builtin::Append,
            "print" => Builtin::Print,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Tensor => "tensor",
            Builtin::Zeros => "zeros",
            Builtin::Ones => "ones",
            Builtin::Matmul => "matmul",
            Builtin::Sum => "sum",
            Builtin::Mean => "mean",
            Builtin::Tanh => "tanh",
            Builtin::Relu => "relu",
            Builtin::Exp => "exp",
            Builtin::Shape => "shape",
            Builtin::Len => "len",
            Builtin::Range => "range",
            Builtin::Append => "append",
            Builtin::Print => "print",
        }
    }

    pub fn is_effectful(self) -> bool {
        matches!(self, Builtin::Append | Builtin::Print)
    }

    /// Whether this builtin reads heap objects (so graph execution must
    /// order it against writes).
    pub fn reads_heap(self) -> bool {
        matches!(self, Builtin::Tensor | Builtin::Zeros | Builtin::Ones | Builtin::Len)
    }

    /// Whether this builtin allocates fresh heap objects. Allocating nodes
    /// must not be folded or deduplicated: each evaluation has its own
    /// identity.
    pub fn allocates(self) -> bool {
        matches!(self, Builtin::Shape | Builtin::Range)
    }
}

fn arity(b: Builtin, args: &[Value], n: usize) -> Result<(), RtError> {
    if args.len() != n {
        return Err(RtError::new(
            RtErrorKind::Arity,
            format!("{} takes {} argument(s), got {}", b.name(), n, args.len()),
        ));
    }
    Ok(())
}

/// Evaluates a pure builtin. `append`/`print` are rejected here.
pub fn eval_pure(b: Builtin, args: &[Value], heap: &mut impl HeapCtx) -> Result<Value, RtError> {
    match b {
        Builtin::Tensor => {
            arity(b, args, 1)?;
            tensor_from(&args[0], heap)
        }
        Builtin::Zeros => {
            arity(b, args, 1)?;
            Ok(Value::Tensor(Tensor::filled(dims_from(&args[0], heap)?, 0.0)))
        }
        Builtin::Ones => {
            arity(b, args, 1)?;
            Ok(Value::Tensor(Tensor::filled(dims_from(&args[0], heap)?, 1.0)))
        }
        Builtin::Matmul => {
            arity(b, args, 2)?;
            matmul(&args[0], &args[1])
        }
        Builtin::Sum | Builtin::Mean => {
            arity(b, args, 1)?;
            let t = tensor_arg(b, &args[0])?;
            let total: f64 = t.data.iter().sum();
            let v = if b == Builtin::Sum { total } else { total / t.len() as f64 };
            Ok(Value::Tensor(Tensor::scalar(v)))
        }
        Builtin::Tanh => elementwise(b, args, f64::tanh),
        Builtin::Relu => elementwise(b, args, |x| if x > 0.0 { x } else { 0.0 }),
        Builtin::Exp => elementwise(b, args, f64::exp),
        Builtin::Shape => {
            arity(b, args, 1)?;
            let t = tensor_arg(b, &args[0])?;
            let dims: Vec<Value> = t.shape.iter().map(|&d| Value::Int(d as i64)).collect();
            Ok(Value::List(heap.alloc_list(dims)))
        }
        Builtin::Len => {
            arity(b, args, 1)?;
            let n = match &args[0] {
                Value::List(id) => match heap.object(*id) {
                    HeapObject::List(items) => items.len(),
                    HeapObject::Record(_) => {
                        return Err(RtError::new(RtErrorKind::TypeMismatch, "len of record"))
                    }
                },
                Value::Str(s) => s.chars().count(),
                Value::Tensor(t) if t.rank() >= 1 => t.shape[0],
                other => {
                    return Err(RtError::new(
                        RtErrorKind::TypeMismatch,
                        format!("len not defined on {}", other.kind().name()),
                    ))
                }
            };
            Ok(Value::Int(n as i64))
        }
        Builtin::Range => {
            arity(b, args, 1)?;
            match &args[0] {
                Value::Int(n) => {
                    if *n < 0 {
                        return Err(RtError::new(RtErrorKind::NegativeRange, format!("range({n})")));
                    }
                    let items: Vec<Value> = (0..*n).map(Value::Int).collect();
                    Ok(Value::List(heap.alloc_list(items)))
                }
                other => Err(RtError::new(
                    RtErrorKind::TypeMismatch,
                    format!("range takes an int, got {}", other.kind().name()),
                )),
            }
        }
        Builtin::Append | Builtin::Print => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("{} is effectful and not pure-evaluable", b.name()),
        )),
    }
}

fn elementwise(b: Builtin, args: &[Value], f: impl Fn(f64) -> f64) -> Result<Value, RtError> {
    arity(b, args, 1)?;
    match &args[0] {
        Value::Int(x) => Ok(Value::Float(f(*x as f64))),
        Value::Float(x) => Ok(Value::Float(f(*x))),
        Value::Tensor(t) => Ok(Value::Tensor(t.map(f))),
        other => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("{} not defined on {}", b.name(), other.kind().name()),
        )),
    }
}

fn tensor_arg(b: Builtin, v: &Value) -> Result<Tensor, RtError> {
    match v {
        Value::Tensor(t) => Ok(t.clone()),
        other => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("{} takes a tensor, got {}", b.name(), other.kind().name()),
        )),
    }
}

fn dims_from(v: &Value, heap: &impl HeapCtx) -> Result<Vec<usize>, RtError> {
    let id = match v {
        Value::List(id) => *id,
        other => {
            return Err(RtError::new(
                RtErrorKind::TypeMismatch,
                format!("shape argument must be a list of ints, got {}", other.kind().name()),
            ))
        }
    };
    let items = match heap.object(id) {
        HeapObject::List(items) => items.clone(),
        HeapObject::Record(_) => {
            return Err(RtError::new(RtErrorKind::TypeMismatch, "shape argument must be a list"))
        }
    };
    let mut dims = Vec::with_capacity(items.len());
    for it in items {
        match it {
            Value::Int(d) if d >= 0 => dims.push(d as usize),
            Value::Int(d) => {
                return Err(RtError::new(RtErrorKind::TypeMismatch, format!("negative dimension {d}")))
            }
            other => {
                return Err(RtError::new(
                    RtErrorKind::TypeMismatch,
                    format!("dimension must be an int, got {}", other.kind().name()),
                ))
            }
        }
    }
    Ok(dims)
}

/// `tensor(x)`: converts a scalar or a nested, rectangular, numeric list into
/// a dense float tensor.
fn tensor_from(v: &Value, heap: &impl HeapCtx) -> Result<Value, RtError> {
    match v {
        Value::Int(x) => Ok(Value::Tensor(Tensor::scalar(*x as f64))),
        Value::Float(x) => Ok(Value::Tensor(Tensor::scalar(*x))),
        Value::Tensor(t) => Ok(Value::Tensor(t.clone())),
        Value::List(_) => {
            let mut shape = Vec::new();
            let mut data = Vec::new();
            collect_nested(v, heap, 0, &mut shape, &mut data)?;
            Ok(Value::Tensor(Tensor::new(shape, data)))
        }
        other => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("tensor() takes a number or nested list, got {}", other.kind().name()),
        )),
    }
}

fn collect_nested(
    v: &Value,
    heap: &impl HeapCtx,
    depth: usize,
    shape: &mut Vec<usize>,
    data: &mut Vec<f64>,
) -> Result<(), RtError> {
    match v {
        Value::Int(x) => {
            if depth != shape.len() {
                return Err(RtError::new(RtErrorKind::TypeMismatch, "ragged nested list"));
            }
            data.push(*x as f64);
            Ok(())
        }
        Value::Float(x) => {
            if depth != shape.len() {
                return Err(RtError::new(RtErrorKind::TypeMismatch, "ragged nested list"));
            }
            data.push(*x);
            Ok(())
        }
        Value::List(id) => {
            let items = match heap.object(*id) {
                HeapObject::List(items) => items.clone(),
                HeapObject::Record(_) => {
                    return Err(RtError::new(RtErrorKind::TypeMismatch, "tensor() of record"))
                }
            };
            if depth == shape.len() {
                shape.push(items.len());
            } else if shape[depth] != items.len() {
                return Err(RtError::new(RtErrorKind::TypeMismatch, "ragged nested list"));
            }
            if items.is_empty() && depth + 1 < shape.len() {
                return Err(RtError::new(RtErrorKind::TypeMismatch, "ragged nested list"));
            }
            for it in &items {
                collect_nested(it, heap, depth + 1, shape, data)?;
            }
            Ok(())
        }
        other => Err(RtError::new(
            RtErrorKind::TypeMismatch,
            format!("tensor() element must be numeric, got {}", other.kind().name()),
        )),
    }
}

fn matmul(a: &Value, b: &Value) -> Result<Value, RtError> {
    let (x, y) = match (a, b) {
        (Value::Tensor(x), Value::Tensor(y)) => (x, y),
        _ => {
            return Err(RtError::new(
                RtErrorKind::TypeMismatch,
                format!("matmul takes tensors, got {} and {}", a.kind().name(), b.kind().name()),
            ))
        }
    };
    if x.rank() != 2 || y.rank() != 2 {
        return Err(RtError::new(
            RtErrorKind::ShapeMismatch,
            format!("matmul requires rank-2 operands, got ranks {} and {}", x.rank(), y.rank()),
        ));
    }
    let (m, k) = (x.shape[0], x.shape[1]);
    let (k2, n) = (y.shape[0], y.shape[1]);
    if k != k2 {
        return Err(RtError::new(
            RtErrorKind::ShapeMismatch,
            format!("matmul inner dims differ: {k} vs {k2}"),
        ));
    }
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            let mut acc = 0.0;
            for p in 0..k {
                acc += x.data[i * k + p] * y.data[p * n + j];
            }
            out[i * n + j] = acc;
        }
    }
    Ok(Value::Tensor(Tensor::new(vec![m, n], out)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::heap::Heap;

    #[test]
    fn matmul_1x2_2x1() {
        let a = Value::Tensor(Tensor::new(vec![1, 2], vec![1.0, 2.0]));
        let b = Value::Tensor(Tensor::new(vec![2, 1], vec![3.0, 4.0]));
        match eval_pure(Builtin::Matmul, &[a, b], &mut Heap::new()).unwrap() {
            Value::Tensor(t) => {
                assert_eq!(&*t.shape, &[1, 1]);
                assert_eq!(&*t.data, &[11.0]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn tensor_from_nested_list() {
        let mut heap = Heap::new();
        let row1 = heap.alloc_list(vec![Value::Int(1), Value::Int(2)]);
        let row2 = heap.alloc_list(vec![Value::Int(3), Value::Int(4)]);
        let outer = heap.alloc_list(vec![Value::List(row1), Value::List(row2)]);
        match eval_pure(Builtin::Tensor, &[Value::List(outer)], &mut heap).unwrap() {
            Value::Tensor(t) => {
                assert_eq!(&*t.shape, &[2, 2]);
                assert_eq!(&*t.data, &[1.0, 2.0, 3.0, 4.0]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn ragged_nested_list_is_type_mismatch() {
        let mut heap = Heap::new();
        let row1 = heap.alloc_list(vec![Value::Int(1)]);
        let row2 = heap.alloc_list(vec![Value::Int(2), Value::Int(3)]);
        let outer = heap.alloc_list(vec![Value::List(row1), Value::List(row2)]);
        let err = eval_pure(Builtin::Tensor, &[Value::List(outer)], &mut heap).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::TypeMismatch);
    }

    #[test]
    fn len_on_lists_strings_tensors() {
        let mut heap = Heap::new();
        let xs = heap.alloc_list(vec![Value::Int(1), Value::Int(2)]);
        assert!(matches!(
            eval_pure(Builtin::Len, &[Value::List(xs)], &mut heap).unwrap(),
            Value::Int(2)
        ));
        assert!(matches!(
            eval_pure(Builtin::Len, &[Value::str("abc")], &mut heap).unwrap(),
            Value::Int(3)
        ));
        let t = Value::Tensor(Tensor::filled(vec![4, 2], 0.0));
        assert!(matches!(eval_pure(Builtin::Len, &[t], &mut heap).unwrap(), Value::Int(4)));
        let scalar = Value::Tensor(Tensor::scalar(1.0));
        assert!(eval_pure(Builtin::Len, &[scalar], &mut heap).is_err());
    }

    #[test]
    fn range_and_negative_range() {
        let mut heap = Heap::new();
        match eval_pure(Builtin::Range, &[Value::Int(3)], &mut heap).unwrap() {
            Value::List(id) => match heap.object(id) {
                HeapObject::List(items) => assert_eq!(items.len(), 3),
                _ => panic!(),
            },
            _ => panic!(),
        }
        let err = eval_pure(Builtin::Range, &[Value::Int(-1)], &mut heap).unwrap_err();
        assert_eq!(err.kind, RtErrorKind::NegativeRange);
    }

    #[test]
    fn reductions_produce_scalar_tensors() {
        let t = Value::Tensor(Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]));
        let mut heap = Heap::new();
        match eval_pure(Builtin::Sum, &[t.clone()], &mut heap).unwrap() {
            Value::Tensor(s) => {
                assert_eq!(s.rank(), 0);
                assert_eq!(s.data[0], 10.0);
            }
            _ => panic!(),
        }
        match eval_pure(Builtin::Mean, &[t], &mut heap).unwrap() {
            Value::Tensor(s) => assert_eq!(s.data[0], 2.5),
            _ => panic!(),
        }
    }
}
