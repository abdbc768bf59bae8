use serde::{Deserialize, Serialize};

use super::descriptor::binomial;
use crate::error::{Error, Result};

/// `2^24 + 43`, the smallest prime above `2^24`.
pub const DEFAULT_HASH_SIZE: u32 = 16_777_259;

/// Equal-frequency quantiles of the area-ratio invariant for 16 levels,
/// fitted on rendered pages from the `synth` module (see the
/// `fit_bin_edges` example).
pub const DEFAULT_BIN_EDGES: [f64; 15] = [
    0.084678, 0.178518, 0.263543, 0.347244, 0.451015, 0.553718, 0.693424, 0.867746, 1.025532,
    1.289482, 1.667827, 2.165675, 3.000458, 4.510546, 9.183257,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlahParams {
    /// Nearest neighbours considered around each feature point.
    pub n: usize,
    /// Neighbours per descriptor (`4 <= m <= n`).
    pub m: usize,
    pub q_levels: u32,
    /// `q_levels - 1` strictly ascending edges; bins are right-open.
    pub bin_edges: Vec<f64>,
    /// Hash table size; must be prime.
    pub hash_size: u32,
    pub k_base: u32,
    /// Retrieval is declared failed below this many votes.
    pub min_votes: u32,
    /// Gaussian sigma applied before feature-point extraction, in pixels.
    /// Large enough to merge the letters of a word into one blob at 300 dpi.
    pub feature_sigma: f64,
    /// Blobs smaller than this are treated as noise, not feature points.
    pub min_blob_pixels: u32,
}

impl Default for LlahParams {
    fn default() -> Self {
        LlahParams {
            n: 8,
            m: 7,
            q_levels: 16,
            bin_edges: DEFAULT_BIN_EDGES.to_vec(),
            hash_size: DEFAULT_HASH_SIZE,
            k_base: 16,
            min_votes: 10,
            feature_sigma: 4.0,
            min_blob_pixels: 20,
        }
    }
}

fn is_prime(v: u32) -> bool {
    if v < 2 {
        return false;
    }
    let v = v as u64;
    (2..).take_while(|d| d * d <= v).all(|d| v % d != 0)
}

impl LlahParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(4 <= self.m && self.m <= self.n) {
            return bad(format!("need 4 <= m <= n, got m={} n={}", self.m, self.n));
        }
        if self.n > 16 {
            return bad(format!("n={} is too large", self.n));
        }
        if self.q_levels < 2 || self.q_levels > 256 {
            return bad(format!("q_levels must be in [2, 256], got {}", self.q_levels));
        }
        if self.bin_edges.len() != self.q_levels as usize - 1 {
            return bad(format!(
                "{} bin edges given for {} levels",
                self.bin_edges.len(),
                self.q_levels
            ));
        }
        if !self.bin_edges.windows(2).all(|w| w[0] < w[1])
            || !self.bin_edges.iter().all(|e| e.is_finite())
        {
            return bad("bin edges must be finite and strictly ascending".into());
        }
        if !is_prime(self.hash_size) {
            return bad(format!("hash_size {} is not prime", self.hash_size));
        }
        if self.k_base < 2 {
            return bad("k_base must be at least 2".into());
        }
        if !(self.feature_sigma > 0.0) {
            return bad("feature_sigma must be positive".into());
        }
        Ok(())
    }

    /// Number of invariants per descriptor, `C(m, 4)`.
    pub fn dims(&self) -> usize {
        binomial(self.m, 4)
    }

    /// Descriptors per feature point, `C(n, m)`.
    pub fn subsets(&self) -> usize {
        binomial(self.n, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = LlahParams::default();
        p.validate().unwrap();
        assert_eq!(p.dims(), 35);
        assert_eq!(p.subsets(), 8);
        assert!(is_prime(DEFAULT_HASH_SIZE));
        assert_eq!(DEFAULT_HASH_SIZE, (1 << 24) + 43);
    }

    #[test]
    fn rejects_bad_params() {
        let base = LlahParams::default();
        let mut p = base.clone();
        p.m = 9;
        assert!(p.validate().is_err());
        let mut p = base.clone();
        p.m = 3;
        p.n = 3;
        assert!(p.validate().is_err());
        let mut p = base.clone();
        p.hash_size = 1 << 24;
        assert!(p.validate().is_err());
        let mut p = base.clone();
        p.bin_edges[3] = p.bin_edges[2];
        assert!(p.validate().is_err());
        let mut p = base;
        p.q_levels = 8;
        assert!(p.validate().is_err());
    }
}
