//! Per-agent cognitive state: memory bank with embedding retrieval, the
//! economic sentiment index and confidence-gated decision adjustment, and the
//! persona record.

mod embed;
mod memory;
mod persona;
mod sentiment;

pub use embed::{cosine, Encoder, HashingEncoder, DEFAULT_DIM};
pub use memory::{MemoryBank, MemoryError, MemoryRecord};
pub use persona::{Persona, TRAITS_BUDGET};
pub use sentiment::{adjust_decision, logit, sigmoid, AdjustMode, SentimentParams, SentimentState};
