//! Mutable heap for lists and records, plus the deferred-effect event type.
//!
//! Global variables are attributes of a distinguished globals record created
//! at heap id 0. Heap entries are never reclaimed during a run.

use std::collections::BTreeMap;

use super::error::{RtError, RtErrorKind};
use super::value::{HeapId, Value};

#[derive(Debug, Clone)]
pub enum HeapObject {
    List(Vec<Value>),
    Record(BTreeMap<String, Value>),
}

#[derive(Debug, Clone)]
pub struct Heap {
    entries: Vec<HeapObject>,
    pub globals: HeapId,
}

impl Default for Heap {
    fn default() -> Self {
        Self::new()
    }
}

impl Heap {
    pub fn new() -> Heap {
        let mut heap = Heap { entries: Vec::new(), globals: HeapId(0) };
        let id = heap.alloc(HeapObject::Record(BTreeMap::new()));
        debug_assert_eq!(id, HeapId(0));
        heap
    }

    pub fn alloc(&mut self, obj: HeapObject) -> HeapId {
        let id = HeapId(self.entries.len() as u32);
        self.entries.push(obj);
        id
    }

    pub fn alloc_list(&mut self, items: Vec<Value>) -> HeapId {
        self.alloc(HeapObject::List(items))
    }

    pub fn alloc_record(&mut self, fields: BTreeMap<String, Value>) -> HeapId {
        self.alloc(HeapObject::Record(fields))
    }

    pub fn object(&self, id: HeapId) -> &HeapObject {
        &self.entries[id.0 as usize]
    }

    pub fn object_mut(&mut self, id: HeapId) -> &mut HeapObject {
        &mut self.entries[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_global(&self, name: &str) -> Option<Value> {
        match self.object(self.globals) {
            HeapObject::Record(fields) => fields.get(name).cloned(),
            HeapObject::List(_) => unreachable!("globals is a record"),
        }
    }

    pub fn set_global(&mut self, name: &str, value: Value) {
        let globals = self.globals;
        match self.object_mut(globals) {
            HeapObject::Record(fields) => {
                fields.insert(name.to_string(), value);
            }
            HeapObject::List(_) => unreachable!("globals is a record"),
        }
    }
}

/// Read access to heap objects, implemented by the real heap and by the
/// executor's local-copy overlay.
pub trait HeapRead {
    fn object(&self, id: HeapId) -> &HeapObject;
}

impl HeapRead for Heap {
    fn object(&self, id: HeapId) -> &HeapObject {
        Heap::object(self, id)
    }
}

/// Heap access needed by builtin evaluation: reads plus list allocation
/// (allocation is not an observable effect; orphaned objects are simply
/// never referenced again).
pub trait HeapCtx: HeapRead {
    fn alloc_list(&mut self, items: Vec<Value>) -> HeapId;
}

impl HeapCtx for Heap {
    fn alloc_list(&mut self, items: Vec<Value>) -> HeapId {
        Heap::alloc_list(self, items)
    }
}

/// Ordering key for a deferred effect: the static seq index of the effect
/// node, prefixed by the seq indices of enclosing subgraph invocations.
/// Lexicographic order over keys is program order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EffectSeq(pub Vec<u32>);

impl std::fmt::Display for EffectSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

#[derive(Debug, Clone)]
pub enum EffectKind {
    SetAttr { target: HeapId, name: String, value: Value },
    SetSubscr { target: HeapId, index: i64, value: Value },
    ListAppend { target: HeapId, value: Value },
    Print(String),
}

#[derive(Debug, Clone)]
pub struct EffectEvent {
    pub seq: EffectSeq,
    pub kind: EffectKind,
}

impl EffectEvent {
    /// Applies this event to the real heap and transcript. Targets were
    /// validated when the event was logged, so application cannot fail.
    pub fn apply(&self, heap: &mut Heap, transcript: &mut String) -> Result<(), RtError> {
        match &self.kind {
            EffectKind::SetAttr { target, name, value } => match heap.object_mut(*target) {
                HeapObject::Record(fields) => {
                    fields.insert(name.clone(), value.clone());
                    Ok(())
                }
                HeapObject::List(_) => Err(RtError::new(
                    RtErrorKind::TypeMismatch,
                    "attribute write target is not a record",
                )),
            },
            EffectKind::SetSubscr { target, index, value } => match heap.object_mut(*target) {
                HeapObject::List(items) => {
                    let i = *index as usize;
                    if *index < 0 || i >= items.len() {
                        return Err(RtError::new(
                            RtErrorKind::IndexOutOfRange,
                            format!("index {} out of range for list of length {}", index, items.len()),
                        ));
                    }
                    items[i] = value.clone();
                    Ok(())
                }
                HeapObject::Record(_) => Err(RtError::new(
                    RtErrorKind::TypeMismatch,
                    "subscript write target is not a list",
                )),
            },
            EffectKind::ListAppend { target, value } => match heap.object_mut(*target) {
                HeapObject::List(items) => {
                    items.push(value.clone());
                    Ok(())
                }
                HeapObject::Record(_) => {
                    Err(RtError::new(RtErrorKind::TypeMismatch, "append target is not a list"))
                }
            },
            EffectKind::Print(text) => {
                transcript.push_str(text);
                Ok(())
            }
        }
    }
}
