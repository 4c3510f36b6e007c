use crate::error::{param, Result};

/// Stage-2 matching threshold as a fraction of the stage-1 `match_tau`.
pub const WIENER_TAU_FACTOR: f64 = 0.4;

/// Matching threshold used when σ = 0, so only exact replicas group.
pub const EXACT_MATCH_EPS: f64 = 1e-12;

/// Configuration of the collaborative denoiser. Triples are ordered
/// (x, y, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BMParams {
    pub block: [usize; 3],
    pub step: [usize; 3],
    pub search_radius: [usize; 3],
    /// Power of two, at most 32.
    pub max_group: usize,
    /// Block-distance threshold in units of σ².
    pub match_tau: f64,
    /// Hard threshold in units of σ.
    pub lambda_hard: f64,
    /// Noise standard deviation in volts.
    pub sigma: f64,
}

impl Default for BMParams {
    fn default() -> Self {
        Self {
            block: [4, 4, 8],
            step: [2, 2, 4],
            search_radius: [5, 5, 8],
            max_group: 16,
            match_tau: 2.5,
            lambda_hard: 2.7,
            sigma: 0.0,
        }
    }
}

impl BMParams {
    pub fn with_sigma(sigma: f64) -> Self {
        Self {
            sigma,
            ..Self::default()
        }
    }

    pub fn validate(&self, dims: (usize, usize, usize)) -> Result<()> {
        let dims = [dims.0, dims.1, dims.2];
        for axis in 0..3 {
            if self.block[axis] == 0 || self.block[axis] > dims[axis] {
                return param(format!(
                    "block {:?} does not fit volume {:?}",
                    self.block, dims
                ));
            }
            if self.step[axis] == 0 || self.step[axis] > self.block[axis] {
                return param(format!(
                    "steps {:?} must lie between 1 and the block size {:?}",
                    self.step, self.block
                ));
            }
        }
        if !self.max_group.is_power_of_two() || self.max_group > 32 {
            return param(format!(
                "max_group must be one of 1, 2, 4, 8, 16, 32; got {}",
                self.max_group
            ));
        }
        if !(self.match_tau.is_finite() && self.match_tau > 0.0) {
            return param("match_tau must be positive");
        }
        if !(self.lambda_hard.is_finite() && self.lambda_hard > 0.0) {
            return param("lambda_hard must be positive");
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return param("sigma must be finite and nonnegative");
        }
        Ok(())
    }

    /// Maximum block distance accepted into a group.
    pub fn match_threshold(&self, tau: f64) -> f64 {
        if self.sigma > 0.0 {
            tau * self.sigma * self.sigma
        } else {
            tau * EXACT_MATCH_EPS
        }
    }

    pub fn block_len(&self) -> usize {
        self.block.iter().product()
    }
}
