//! Runtime value model, heap, builtin library, and the tree-walking
//! executor. The interpreter alone is the semantic oracle for every other
//! module: graph execution delegates arithmetic to the same tables.

pub mod binop;
pub mod builtins;
pub mod error;
pub mod heap;
pub mod interp;
pub mod render;
pub mod value;

pub use binop::{apply_binop, apply_unop};
pub use builtins::{eval_pure, Builtin, ALL_BUILTINS};
pub use error::{RtError, RtErrorKind};
pub use heap::{EffectEvent, EffectKind, EffectSeq, Heap, HeapCtx, HeapObject, HeapRead};
pub use interp::{
    call_builtin, interpret_call, render_print, run_program, DirectHooks, ExecHooks,
    FunctionInstance, ObsKey, RtEnv, RECURSION_LIMIT, TOP_LEVEL,
};
pub use render::render_value;
pub use value::{deep_eq_bits, sl_eq, wrapping_ipow, FunctionId, HeapId, Tensor, Value, ValueKind};
