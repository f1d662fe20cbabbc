//! The rational kernel family q^{(k)} behind the Cauchy-case weights.
//!
//! At α = 1 integrating a positive coordinate y ∈ {η_±, [Sᵢ]^±} by parts
//! against y∂_y produces the multiplier −y c′(y)/c(y), with c the Cauchy
//! density that coordinate sees: centered at μ = sinω on the + side and at
//! −μ on the − side (η₋ and [Sᵢ]⁻ are magnitudes of reflected variables).
//! One formula covers both sides,
//!
//!   q_±(x) = 2[x]⁺(x ∓ sinω) / (cos²ω + (x ∓ sinω)²),
//!
//! so q_− is q_+ with ρ ↔ 1 − ρ. Each further application of the scaling
//! derivative x∂ₓ produces q^{(k+1)} = x ∂ₓ q^{(k)}. Writing q^{(k)} =
//! N_k / D^k with the fixed quadratic D(x) = x² ∓ 2 sinω·x + 1 (note
//! cos²ω + sin²ω = 1), the recurrence is polynomial:
//!
//!   N_{k+1} = x (N_k′ D − k N_k D′),   N_1 = 2x(x ∓ sinω).
//!
//! Every N_k keeps an explicit factor x (so q^{(k)}(0) = 0) and degree
//! deg N_k = 2k = deg D^k, hence each q^{(k)} is bounded on [0, ∞) — D has
//! no real roots for ρ ∈ (0,1). On the closed negative half-line the kernels
//! are identically zero, matching the positive-part arguments they receive.

use crate::chi::Side;

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    while out.last() == Some(&0.0) {
        out.pop();
    }
    out
}

fn poly_shift_up(a: &[f64]) -> Vec<f64> {
    // multiply by x
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(0.0);
    out.extend_from_slice(a);
    out
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// One kernel q^{(k)} = num / den_base^k, supported on the open positive
/// half-line and zero elsewhere.
#[derive(Debug, Clone)]
pub struct RationalFn {
    /// numerator coefficients, lowest degree first
    pub num: Vec<f64>,
    /// base quadratic D; the denominator is D^den_pow
    pub den_base: Vec<f64>,
    /// k in q^{(k)}
    pub den_pow: u32,
}

impl RationalFn {
    /// Evaluate; arguments on the closed negative half-line give 0, matching
    /// the positive-part magnitudes the kernels are applied to.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        horner(&self.num, x) / horner(&self.den_base, x).powi(self.den_pow as i32)
    }

    /// Numerical supremum of |q^{(k)}| over [0, ∞), by a dense compactified
    /// grid with local refinement. The function is a bounded rational with a
    /// finite limit at ∞, so the grid maximum is sharp to well below the
    /// tolerance of any test that consumes it.
    pub fn sup_norm(&self) -> f64 {
        let value = |t: f64| {
            // x = t/(1-t) maps (0,1) onto (0,∞)
            let x = t / (1.0 - t);
            self.eval(x).abs()
        };
        let n = 20_000;
        let mut best_t = 0.5;
        let mut best = 0.0_f64;
        for i in 1..n {
            let t = i as f64 / n as f64;
            let v = value(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        // golden-section refinement around the grid argmax
        let (mut lo, mut hi) = ((best_t - 2.0 / n as f64).max(0.0), (best_t + 2.0 / n as f64).min(1.0 - 1e-12));
        let phi = 0.618_033_988_749_894_9;
        for _ in 0..80 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if value(m1) < value(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        // include the limit at infinity (ratio of top coefficients when
        // degrees match, zero otherwise)
        let deg_den = (self.den_base.len() - 1) * self.den_pow as usize;
        let lim = if self.num.len() - 1 == deg_den {
            (self.num.last().unwrap() / self.den_base.last().unwrap().powi(self.den_pow as i32)).abs()
        } else {
            0.0
        };
        best.max(value(0.5 * (lo + hi))).max(lim)
    }
}

/// Exact symbolic construction of q^{(k)} for the given side and positivity
/// parameter ρ; k is 1-based with q^{(1)} = q.
pub fn q_rational(k: u32, side: Side, rho: f64) -> RationalFn {
    assert!(k >= 1, "kernel order is 1-based");
    q_family(k, side, rho).pop().expect("non-empty family")
}

/// q^{(1)}, …, q^{(k_max)} in one pass of the recurrence.
pub fn q_family(k_max: u32, side: Side, rho: f64) -> Vec<RationalFn> {
    assert!(k_max >= 1);
    let omega = std::f64::consts::PI * (rho - 0.5);
    let mu = omega.sin();
    let sign = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    // D(x) = x^2 ∓ 2μx + 1, N_1(x) = 2x^2 ∓ 2μx
    let den: Vec<f64> = vec![1.0, -2.0 * sign * mu, 1.0];
    let den_d = poly_derivative(&den);
    let mut num: Vec<f64> = vec![0.0, -2.0 * sign * mu, 2.0];
    let mut out = Vec::with_capacity(k_max as usize);
    out.push(RationalFn { num: num.clone(), den_base: den.clone(), den_pow: 1 });
    for k in 1..k_max {
        let kd = poly_mul(&poly_derivative(&num), &den);
        let nd = poly_mul(&num, &den_d);
        let scaled: Vec<f64> = nd.iter().map(|c| c * k as f64).collect();
        num = poly_shift_up(&poly_sub(&kd, &scaled));
        debug_assert!(num.len() <= 2 * (k as usize + 1) + 1, "kernel degree exceeds denominator degree");
        out.push(RationalFn { num: num.clone(), den_base: den.clone(), den_pow: k + 1 });
    }
    out
}
