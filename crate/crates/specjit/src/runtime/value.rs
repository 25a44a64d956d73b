//! Runtime values.
//!
//! Scalars and tensors are immutable values; lists and records live on the
//! heap and are referenced by id. Tensors hold 64-bit floats in row-major
//! order behind an `Arc`, so cloning a value is always cheap.

use std::sync::Arc;

/// Identifies a heap object. Ids are allocated monotonically and never
/// reused within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeapId(pub u32);

/// Identifies a function instance created at definition time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionId(pub u32);

impl std::fmt::Display for FunctionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "f{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(Arc<str>),
    Tensor(Tensor),
    List(HeapId),
    Record(HeapId),
    Fn(FunctionId),
    Nil,
}

/// The nine value kinds, used as the coarsest level of the specialization
/// lattice and in error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum ValueKind {
    Int,
    Float,
    Bool,
    Str,
    Tensor,
    List,
    Record,
    Fn,
    Nil,
}

impl ValueKind {
    pub fn name(self) -> &'static str {
        match self {
            ValueKind::Int => "int",
            ValueKind::Float => "float",
            ValueKind::Bool => "bool",
            ValueKind::Str => "string",
            ValueKind::Tensor => "tensor",
            ValueKind::List => "list",
            ValueKind::Record => "record",
            ValueKind::Fn => "function",
            ValueKind::Nil => "nil",
        }
    }
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Int(_) => ValueKind::Int,
            Value::Float(_) => ValueKind::Float,
            Value::Bool(_) => ValueKind::Bool,
            Value::Str(_) => ValueKind::Str,
            Value::Tensor(_) => ValueKind::Tensor,
            Value::List(_) => ValueKind::List,
            Value::Record(_) => ValueKind::Record,
            Value::Fn(_) => ValueKind::Fn,
            Value::Nil => ValueKind::Nil,
        }
    }

    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    /// The heap id behind a list or record reference, if any.
    pub fn heap_ref(&self) -> Option<HeapId> {
        match self {
            Value::List(id) | Value::Record(id) => Some(*id),
            _ => None,
        }
    }
}

/// SL `==`: numeric kinds compare by promoted value, tensors compare deep
/// (shape and IEEE element equality), references compare by identity, and
/// remaining cross-kind comparisons are false.
pub fn sl_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Float(x), Value::Float(y)) => x == y,
        (Value::Int(x), Value::Float(y)) | (Value::Float(y), Value::Int(x)) => (*x as f64) == *y,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Tensor(x), Value::Tensor(y)) => {
            x.shape == y.shape && x.data.iter().zip(y.data.iter()).all(|(p, q)| p == q)
        }
        (Value::List(x), Value::List(y)) => x == y,
        (Value::Record(x), Value::Record(y)) => x == y,
        (Value::Fn(x), Value::Fn(y)) => x == y,
        (Value::Nil, Value::Nil) => true,
        _ => false,
    }
}

/// Bit-exact equality, used for constant assertions and cache keys: floats
/// and tensor elements compare by bit pattern, references by identity.
pub fn deep_eq_bits(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Float(x), Value::Float(y)) => x.to_bits() == y.to_bits(),
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Tensor(x), Value::Tensor(y)) => {
            x.shape == y.shape
                && x.data.iter().zip(y.data.iter()).all(|(p, q)| p.to_bits() == q.to_bits())
        }
        (Value::List(x), Value::List(y)) => x == y,
        (Value::Record(x), Value::Record(y)) => x == y,
        (Value::Fn(x), Value::Fn(y)) => x == y,
        (Value::Nil, Value::Nil) => true,
        _ => false,
    }
}

/// Dense row-major float tensor. An empty shape is a scalar (one element).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub shape: Arc<[usize]>,
    pub data: Arc<[f64]>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Tensor {
        let expect: usize = shape.iter().product();
        assert_eq!(data.len(), expect, "tensor data length must match shape product");
        Tensor { shape: shape.into(), data: data.into() }
    }

    pub fn scalar(v: f64) -> Tensor {
        Tensor { shape: Arc::from([]), data: Arc::from([v]) }
    }

    pub fn filled(shape: Vec<usize>, v: f64) -> Tensor {
        let n: usize = shape.iter().product();
        Tensor { shape: shape.into(), data: vec![v; n].into() }
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Applies `f` to every element, preserving shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Tensor { shape: self.shape.clone(), data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// The `i`-th slice along the first dimension; rank drops by one.
    pub fn index_first(&self, i: usize) -> Option<Tensor> {
        if self.rank() == 0 {
            return None;
        }
        let n = self.shape[0];
        if i >= n {
            return None;
        }
        let stride: usize = self.shape[1..].iter().product();
        let start = i * stride;
        Some(Tensor {
            shape: self.shape[1..].to_vec().into(),
            data: self.data[start..start + stride].to_vec().into(),
        })
    }
}

/// Integer `**` with two's-complement wrapping; exponent must be >= 0.
pub fn wrapping_ipow(base: i64, exp: i64) -> i64 {
    debug_assert!(exp >= 0);
    let mut acc: i64 = 1;
    let mut b = base;
    let mut e = exp as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.wrapping_mul(b);
        }
        b = b.wrapping_mul(b);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_tensor_has_one_element() {
        let t = Tensor::scalar(3.5);
        assert_eq!(t.rank(), 0);
        assert_eq!(t.len(), 1);
        assert_eq!(t.data[0], 3.5);
    }

    #[test]
    fn index_first_slices_rows() {
        let t = Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        let row = t.index_first(1).unwrap();
        assert_eq!(&*row.shape, &[2]);
        assert_eq!(&*row.data, &[3.0, 4.0]);
        assert!(t.index_first(2).is_none());
    }

    #[test]
    fn cross_kind_equality() {
        assert!(sl_eq(&Value::Int(1), &Value::Float(1.0)));
        assert!(!sl_eq(&Value::Int(1), &Value::Bool(true)));
        assert!(!sl_eq(&Value::Nil, &Value::Int(0)));
        assert!(sl_eq(&Value::List(HeapId(3)), &Value::List(HeapId(3))));
        assert!(!sl_eq(&Value::List(HeapId(3)), &Value::List(HeapId(4))));
    }

    #[test]
    fn nan_is_not_sl_equal_but_is_bit_equal() {
        let nan = Value::Float(f64::NAN);
        assert!(!sl_eq(&nan, &nan));
        assert!(deep_eq_bits(&nan, &nan));
    }

    #[test]
    fn wrapping_pow() {
        assert_eq!(wrapping_ipow(2, 10), 1024);
        assert_eq!(wrapping_ipow(2, 0), 1);
        assert_eq!(wrapping_ipow(i64::MAX, 2), i64::MAX.wrapping_mul(i64::MAX));
    }
}
