//! specjit: a speculative just-in-time graph compiler and runtime for SL, a
//! small imperative tensor scripting language.
//!
//! Programs first run on a profiling interpreter. Hot functions are
//! converted into an optimized symbolic dataflow graph under profiled
//! assumptions (stable branches, trip counts, callees, and value specs),
//! executed with dataflow scheduling and deferred side effects, and
//! deoptimized back to the interpreter when an assumption fails. State
//! updates commit all-or-nothing, so a fallback re-runs the call on the
//! interpreter with no duplicated effects.

pub mod assume;
pub mod frontend;
pub mod graph;
pub mod profile;
pub mod runtime;
