use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use super::embed::{cosine, Encoder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MemoryError {
    #[error("out-of-order memory timestamp: {got} is earlier than the newest stored record ({newest})")]
    OutOfOrder { got: u32, newest: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryRecord {
    pub timestamp: u32,
    pub summary: String,
    pub embedding: Vec<f32>,
    pub stored_esi: f64,
    /// Insertion order; larger is newer.
    pub seq: u64,
}

/// Long-term store of embedded event summaries plus a short ring of raw context.
#[derive(Debug, Clone)]
pub struct MemoryBank {
    long_term: VecDeque<MemoryRecord>,
    short_term: VecDeque<String>,
    capacity: usize,
    short_capacity: usize,
    next_seq: u64,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    agent: usize,
    t: u32,
    esi: f64,
    summary: &'a str,
}

impl MemoryBank {
    pub fn new(capacity: usize, short_capacity: usize) -> Self {
        Self {
            long_term: VecDeque::with_capacity(capacity.min(1024)),
            short_term: VecDeque::with_capacity(short_capacity),
            capacity,
            short_capacity,
            next_seq: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.long_term.len()
    }

    pub fn is_empty(&self) -> bool {
        self.long_term.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &MemoryRecord> {
        self.long_term.iter()
    }

    pub fn short_term(&self) -> impl Iterator<Item = &str> {
        self.short_term.iter().map(String::as_str)
    }

    pub fn store_event(&mut self, encoder: &dyn Encoder, t: u32, summary: &str, esi: f64) -> Result<(), MemoryError> {
        if let Some(newest) = self.long_term.back() {
            if t < newest.timestamp {
                return Err(MemoryError::OutOfOrder { got: t, newest: newest.timestamp });
            }
        }
        if self.capacity > 0 {
            if self.long_term.len() == self.capacity {
                self.long_term.pop_front();
            }
            self.long_term.push_back(MemoryRecord {
                timestamp: t,
                summary: summary.to_owned(),
                embedding: encoder.embed(summary),
                stored_esi: esi,
                seq: self.next_seq,
            });
            self.next_seq += 1;
        }
        if self.short_capacity > 0 {
            if self.short_term.len() == self.short_capacity {
                self.short_term.pop_front();
            }
            self.short_term.push_back(summary.to_owned());
        }
        Ok(())
    }

    /// Top-`k` records by cosine similarity to `query`, newest first on ties.
    pub fn retrieve(&self, encoder: &dyn Encoder, query: &str, k: usize) -> Vec<&MemoryRecord> {
        if k == 0 {
            return Vec::new();
        }
        self.retrieve_vector(&encoder.embed(query), k)
    }

    pub fn retrieve_vector(&self, query: &[f32], k: usize) -> Vec<&MemoryRecord> {
        if k == 0 || self.long_term.is_empty() {
            return Vec::new();
        }
        if query.iter().all(|&x| x == 0.0) {
            return self.long_term.iter().rev().take(k).collect();
        }
        let mut scored: Vec<(f64, &MemoryRecord)> =
            self.long_term.iter().map(|r| (cosine(query, &r.embedding), r)).collect();
        let rank = |a: &(f64, &MemoryRecord), b: &(f64, &MemoryRecord)| {
            b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(b.1.seq.cmp(&a.1.seq))
        };
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, rank);
            scored.truncate(k);
        }
        scored.sort_by(rank);
        scored.into_iter().map(|(_, r)| r).collect()
    }

    /// One JSON object per line: agent, timestamp, stored ESI, summary.
    pub fn to_jsonl(&self, agent: usize) -> String {
        let mut out = String::new();
        for r in &self.long_term {
            let line = RecordLine { agent, t: r.timestamp, esi: r.stored_esi, summary: &r.summary };
            out.push_str(&serde_json::to_string(&line).expect("memory record serializes"));
            out.push('\n');
        }
        out
    }
}
