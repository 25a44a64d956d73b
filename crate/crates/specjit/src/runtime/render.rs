//! Deterministic value rendering for the print transcript.
//!
//! Ints and floats render in shortest round-trip decimal, bools as
//! `true`/`false`, tensors as nested bracketed lists, records as
//! `record{name: ...}` with names sorted, lists bracketed. Cyclic structures
//! render the back-reference as `...`.

use std::collections::HashSet;

use super::heap::{HeapObject, HeapRead};
use super::value::{HeapId, Tensor, Value};

pub fn render_value(v: &Value, heap: &dyn HeapRead) -> String {
    let mut out = String::new();
    let mut seen = HashSet::new();
    write_value(v, heap, &mut seen, &mut out);
    out
}

fn write_value(v: &Value, heap: &dyn HeapRead, seen: &mut HashSet<HeapId>, out: &mut String) {
    match v {
        Value::Int(x) => out.push_str(&x.to_string()),
        Value::Float(x) => out.push_str(&format!("{x}")),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Str(s) => out.push_str(s),
        Value::Tensor(t) => write_tensor(t, 0, 0, out),
        Value::Nil => out.push_str("nil"),
        Value::Fn(_) => out.push_str("<fn>"),
        Value::List(id) => {
            if !seen.insert(*id) {
                out.push_str("[...]");
                return;
            }
            match heap.object(*id) {
                HeapObject::List(items) => {
                    out.push('[');
                    for (i, it) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_value(it, heap, seen, out);
                    }
                    out.push(']');
                }
                HeapObject::Record(_) => unreachable!("list id points at record"),
            }
            seen.remove(id);
        }
        Value::Record(id) => {
            if !seen.insert(*id) {
                out.push_str("record{...}");
                return;
            }
            match heap.object(*id) {
                HeapObject::Record(fields) => {
                    out.push_str("record{");
                    for (i, (name, val)) in fields.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(name);
                        out.push_str(": ");
                        write_value(val, heap, seen, out);
                    }
                    out.push('}');
                }
                HeapObject::List(_) => unreachable!("record id points at list"),
            }
            seen.remove(id);
        }
    }
}

fn write_tensor(t: &Tensor, dim: usize, offset: usize, out: &mut String) {
    if dim == t.rank() {
        out.push_str(&format!("{}", t.data[offset]));
        return;
    }
    let stride: usize = t.shape[dim + 1..].iter().product();
    out.push('[');
    for i in 0..t.shape[dim] {
        if i > 0 {
            out.push_str(", ");
        }
        write_tensor(t, dim + 1, offset + i * stride, out);
    }
    out.push(']');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::heap::Heap;
    use std::collections::BTreeMap;

    #[test]
    fn scalars_and_tensors() {
        let heap = Heap::new();
        assert_eq!(render_value(&Value::Int(5), &heap), "5");
        assert_eq!(render_value(&Value::Float(0.5), &heap), "0.5");
        assert_eq!(render_value(&Value::Bool(true), &heap), "true");
        assert_eq!(render_value(&Value::Nil, &heap), "nil");
        let t = Value::Tensor(Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]));
        assert_eq!(render_value(&t, &heap), "[[1, 2], [3, 4]]");
        let s = Value::Tensor(Tensor::scalar(2.5));
        assert_eq!(render_value(&s, &heap), "2.5");
    }

    #[test]
    fn record_names_sorted() {
        let mut heap = Heap::new();
        let mut fields = BTreeMap::new();
        fields.insert("b".to_string(), Value::Int(2));
        fields.insert("a".to_string(), Value::Int(1));
        let id = heap.alloc_record(fields);
        assert_eq!(render_value(&Value::Record(id), &heap), "record{a: 1, b: 2}");
    }

    #[test]
    fn cycles_terminate() {
        let mut heap = Heap::new();
        let id = heap.alloc_record(BTreeMap::new());
        match heap.object_mut(id) {
            HeapObject::Record(fields) => {
                fields.insert("me".to_string(), Value::Record(id));
            }
            _ => unreachable!(),
        }
        assert_eq!(render_value(&Value::Record(id), &heap), "record{me: record{...}}");
    }
}
