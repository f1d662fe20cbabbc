//! Parameter set (α, ρ, T) for a strictly stable process observed up to a
//! fixed horizon.
//!
//! α ∈ (0,2) is the stability index and ρ = P(X₁ > 0) the positivity
//! parameter, constrained to [1 − 1/α, 1/α] ∩ (0,1); the endpoints are the
//! spectrally one-sided processes. ω = π(ρ − 1/2) is the angle that appears
//! throughout the explicit marginal law, and ζ = 1 − 1/α the exponent tying
//! an exponential length to a stable increment. α = 1 (the Cauchy case with
//! drift) is valid but handled by dedicated code paths: several ζ-powers
//! degenerate there, so [`StableParams::is_cauchy`] gates the variant.

use crate::error::{Error, Result};

/// Validated parameter triple (α, ρ, T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    alpha: f64,
    rho: f64,
    t: f64,
}

/// Admissible range of ρ for a given α: [1 − 1/α, 1/α] ∩ (0, 1).
pub fn rho_range(alpha: f64) -> (f64, f64) {
    let lo = (1.0 - 1.0 / alpha).max(0.0);
    let hi = (1.0 / alpha).min(1.0);
    (lo, hi)
}

impl StableParams {
    /// Validate and construct. The closed endpoints of the ρ-range are
    /// admitted when they are interior to (0, 1), i.e. for α > 1.
    pub fn new(alpha: f64, rho: f64, t: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 2.0 {
            return Err(Error::OutOfRange(alpha));
        }
        let (lo, hi) = rho_range(alpha);
        let ok = if alpha > 1.0 {
            rho >= lo && rho <= hi
        } else {
            rho > lo && rho < hi
        };
        if !(rho.is_finite() && ok && rho > 0.0 && rho < 1.0) {
            return Err(Error::DegenerateRho { alpha, rho, lo, hi });
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::NonPositiveT(t));
        }
        Ok(Self { alpha, rho, t })
    }

    /// Same parameters with a different horizon.
    pub fn with_t(self, t: f64) -> Result<Self> {
        Self::new(self.alpha, self.rho, t)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// ω = π(ρ − 1/2).
    pub fn omega(&self) -> f64 {
        std::f64::consts::PI * (self.rho - 0.5)
    }

    /// ζ = 1 − 1/α. Negative for α < 1, zero at the Cauchy point.
    pub fn zeta(&self) -> f64 {
        1.0 - 1.0 / self.alpha
    }

    pub fn is_cauchy(&self) -> bool {
        self.alpha == 1.0
    }

    /// Smallest admissible truncation base: κ^α ≥ ρ ∨ (1 − ρ).
    pub fn min_kappa(&self) -> f64 {
        self.rho.max(1.0 - self.rho).powf(1.0 / self.alpha)
    }

    /// Check a truncation base κ ∈ (0, 1) against κ^α ≥ ρ ∨ (1 − ρ), the
    /// condition under which the level-n remainder dominates the discarded
    /// sticks in probability.
    pub fn check_kappa(&self, kappa: f64) -> Result<()> {
        let min_kappa = self.min_kappa();
        if !(kappa.is_finite() && kappa > 0.0 && kappa < 1.0 && kappa >= min_kappa) {
            return Err(Error::KappaTooSmall { kappa, min_kappa });
        }
        Ok(())
    }

    /// A κ slightly above the admissibility floor, clamped away from 1.
    pub fn default_kappa(&self) -> f64 {
        (self.min_kappa() + 0.01).max(0.95).min(0.999)
    }
}
