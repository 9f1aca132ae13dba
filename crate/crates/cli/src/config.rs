use serde::Serialize;

use padic_mra::error::{MraError, Result};
use padic_mra::function::{grid_cap, grid_size};
use padic_mra::padic::check_prime;

/// Largest prime accepted without changing the policy.
pub const MAX_PRIME: u32 = 17;

/// Everything a verdict depends on, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobConfig {
    pub command: String,
    pub p: Option<u32>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    #[serde(rename = "M")]
    pub m: Option<i32>,
    pub tol: f64,
    pub grid_cap: usize,
    pub sphere_range: (i32, i32),
    pub inputs: Vec<String>,
    pub output: Option<String>,
    pub seed: u64,
}

impl JobConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(MraError::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.sphere_range.0 > self.sphere_range.1 {
            return Err(MraError::InvalidArgument(format!(
                "empty sphere range {}..{}",
                self.sphere_range.0, self.sphere_range.1
            )));
        }
        if let Some(p) = self.p {
            self.check_p(p)?;
            if let (Some(n), Some(m)) = (self.n, self.m) {
                self.check_frame(p, n, m)?;
            }
        }
        Ok(())
    }

    pub fn check_p(&self, p: u32) -> Result<()> {
        check_prime(p)?;
        if p > MAX_PRIME {
            return Err(MraError::InvalidArgument(format!(
                "p = {p} exceeds the supported maximum {MAX_PRIME}"
            )));
        }
        Ok(())
    }

    /// `p^(N+M+2)` must fit in the grid cap.
    pub fn check_frame(&self, p: u32, n: u32, m: i32) -> Result<()> {
        let size = grid_size(p, n as i32, m + 2)?;
        debug_assert!(size <= grid_cap());
        Ok(())
    }

    pub fn p(&self) -> Result<u32> {
        let p = self
            .p
            .ok_or_else(|| MraError::InvalidArgument("--p is required".into()))?;
        self.check_p(p)?;
        Ok(p)
    }

    pub fn n(&self) -> Result<u32> {
        self.n
            .ok_or_else(|| MraError::InvalidArgument("--N is required".into()))
    }

    pub fn m(&self) -> Result<i32> {
        self.m
            .ok_or_else(|| MraError::InvalidArgument("--M is required".into()))
    }
}
