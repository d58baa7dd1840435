/// Default embedding dimension.
pub const DEFAULT_DIM: usize = 256;

const BUCKET_SEED: u64 = 0x6D61_6372_6F73_696D;
const SIGN_SEED: u64 = 0x7369_676E_6861_7368;

/// Text encoder contract: equal text must map to equal vectors, and every
/// output has unit norm or is exactly zero.
pub trait Encoder: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Vec<f32>;
}

/// Signed feature hashing over lowercase alphanumeric tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashingEncoder {
    dim: usize,
}

impl Default for HashingEncoder {
    fn default() -> Self {
        Self { dim: DEFAULT_DIM }
    }
}

impl HashingEncoder {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self { dim }
    }
}

// FNV-1a, 64-bit, with the offset basis perturbed by a seed.
fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325 ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

impl Encoder for HashingEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Vec<f32> {
        let mut acc = vec![0f64; self.dim];
        let lower = text.to_lowercase();
        for token in lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
            let bucket = (fnv1a(BUCKET_SEED, token.as_bytes()) % self.dim as u64) as usize;
            let sign = if fnv1a(SIGN_SEED, token.as_bytes()) & 1 == 0 { 1.0 } else { -1.0 };
            acc[bucket] += sign;
        }
        let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            // Empty token set, or signed collisions that cancel exactly.
            return vec![0.0; self.dim];
        }
        acc.iter().map(|v| (v / norm) as f32).collect()
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = 0f64;
    let mut na = 0f64;
    let mut nb = 0f64;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (*x as f64, *y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn self_similarity_is_one() {
        let e = HashingEncoder::default();
        let v = e.embed("wage cut savings");
        assert_abs_diff_eq!(cosine(&v, &v), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn empty_text_is_zero_vector() {
        let e = HashingEncoder::default();
        let z = e.embed("");
        assert_eq!(z.len(), DEFAULT_DIM);
        assert!(z.iter().all(|&x| x == 0.0));
        assert_eq!(cosine(&z, &e.embed("anything")), 0.0);
        assert!(e.embed("  ,;! ").iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tokenization_ignores_case_and_punctuation() {
        let e = HashingEncoder::default();
        assert_eq!(e.embed("Wage, CUT; savings!"), e.embed("wage cut savings"));
    }

    #[test]
    fn known_vector_is_stable() {
        // Pinned so an accidental change to the hash or tokenizer is caught.
        let v = HashingEncoder::new(8).embed("price");
        let nonzero: Vec<(usize, f32)> = v.iter().copied().enumerate().filter(|(_, x)| *x != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].1.abs(), 1.0);
        assert_eq!(v, HashingEncoder::new(8).embed("PRICE"));
    }

    proptest! {
        #[test]
        fn embedding_is_deterministic_and_normalized(text in ".{0,80}") {
            let e = HashingEncoder::default();
            let a = e.embed(&text);
            prop_assert_eq!(&a, &e.embed(&text));
            let n: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
            prop_assert!(n == 0.0 || (n - 1.0).abs() < 1e-5);
        }
    }
}
