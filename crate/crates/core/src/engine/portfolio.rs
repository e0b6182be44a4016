//! Weighted sampling without replacement.
//!
//! The reference method gives every pool index `j` the key `E_j / w_j` with
//! `E_j ~ Exp(1)` and keeps the `n` smallest keys. That costs one draw per
//! pool entry, which is wasteful when a fund holds a few hundred of 60,000
//! deals. Selecting the smallest exponential key is the same as one weighted
//! draw, and the keys of the remaining items stay exponential, so drawing
//! indices proportionally to weight and discarding repeats yields exactly the
//! same distribution. Sparse draws use that; dense draws (and sparse draws
//! that keep hitting taken indices) fall back to the key method over the
//! indices not yet taken.

use rand::Rng;

use super::pool::DealPool;
use super::weights::SelectionWeights;
use crate::error::{config_err, Result};

/// Draws with `4 * n > pool` go straight to the key method.
const DENSE_FACTOR: usize = 4;

/// Reusable scratch for portfolio draws over one pool.
#[derive(Debug, Clone)]
pub struct PortfolioSampler {
    taken: Vec<u64>,
    keys: Vec<(f64, usize)>,
}

impl PortfolioSampler {
    pub fn new(pool_len: usize) -> Self {
        Self {
            taken: vec![0; pool_len.div_ceil(64)],
            keys: Vec::new(),
        }
    }

    #[inline]
    fn is_taken(&self, j: usize) -> bool {
        self.taken[j >> 6] & (1u64 << (j & 63)) != 0
    }

    #[inline]
    fn set_taken(&mut self, j: usize) {
        self.taken[j >> 6] |= 1u64 << (j & 63);
    }

    /// Fills `out` with `n` distinct indices into a pool of `weights.len()`.
    pub fn draw<R: Rng + ?Sized>(
        &mut self,
        weights: &SelectionWeights,
        n: usize,
        rng: &mut R,
        out: &mut Vec<usize>,
    ) -> Result<()> {
        let len = weights.len();
        if n == 0 || n > len {
            return Err(config_err(format!(
                "portfolio size {n} must lie in 1..={len} (the pool size)"
            )));
        }
        if self.taken.len() < len.div_ceil(64) {
            self.taken.resize(len.div_ceil(64), 0);
        }
        out.clear();

        if n * DENSE_FACTOR <= len {
            let max_attempts = 16 * n + 64;
            let mut attempts = 0;
            while out.len() < n && attempts < max_attempts {
                let j = weights.pick(rng);
                attempts += 1;
                if !self.is_taken(j) {
                    self.set_taken(j);
                    out.push(j);
                }
            }
        }
        if out.len() < n {
            for &j in out.iter() {
                self.set_taken(j);
            }
            self.complete_by_keys(weights, n, rng, out);
        }

        for &j in out.iter() {
            self.taken[j >> 6] = 0;
        }
        Ok(())
    }

    fn complete_by_keys<R: Rng + ?Sized>(
        &mut self,
        weights: &SelectionWeights,
        n: usize,
        rng: &mut R,
        out: &mut Vec<usize>,
    ) {
        let need = n - out.len();
        self.keys.clear();
        for j in 0..weights.len() {
            if self.is_taken(j) {
                continue;
            }
            let u: f64 = rng.random();
            let e = -(-u).ln_1p();
            self.keys.push((e / weights.weight(j), j));
        }
        if need < self.keys.len() {
            self.keys
                .select_nth_unstable_by(need - 1, |a, b| a.0.total_cmp(&b.0));
            self.keys.truncate(need);
        }
        self.keys.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out.extend(self.keys.iter().map(|&(_, j)| j));
    }
}

/// `n` distinct pool indices drawn without replacement, proportionally to
/// `weights`.
pub fn draw_portfolio<R: Rng + ?Sized>(
    pool: &DealPool,
    n: usize,
    weights: &SelectionWeights,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if weights.len() != pool.len() {
        return Err(config_err(format!(
            "weights cover {} deals but the pool holds {}",
            weights.len(),
            pool.len()
        )));
    }
    let mut sampler = PortfolioSampler::new(pool.len());
    let mut out = Vec::with_capacity(n);
    sampler.draw(weights, n, rng, &mut out)?;
    Ok(out)
}
