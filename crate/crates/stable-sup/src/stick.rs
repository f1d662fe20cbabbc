//! Stick breaking of the horizon [0, T] and its closed-form moments.
//!
//! From i.i.d. uniforms U_i ∈ (0,1): L_0 = T, ℓ_i = L_{i−1}(1 − U_i),
//! L_i = L_{i−1} U_i. The lengths come from sampling the faces of the concave
//! majorant of the process in a size-biased way, and every moment we need is
//! a product of beta functions:
//!
//! E[∏ ℓ_k^{p_k}] = T^{q_0} ∏ B(1 + p_k, 1 + q_k),   q_k = Σ_{i>k} p_i.
//!
//! The triple-moment helper additionally exposes the geometric bound
//! C θ^{p+q} (1+r)^{−n}, θ = (1+r+p∨q)/(1+r+p+q), with an explicit constant
//! obtained by maximising the exact value over the admissible indices.

use crate::error::{Error, Result};
use crate::gamma::beta;
use crate::rng::{open01, StreamRng};

/// One stick-breaking draw: lengths ℓ_1..ℓ_n, remainder L_n, and the
/// uniforms that generated them.
#[derive(Debug, Clone)]
pub struct StickPath {
    pub t: f64,
    pub lengths: Vec<f64>,
    pub remainder: f64,
    pub uniforms: Vec<f64>,
}

/// Break [0, T] n times. The subtraction form ℓ_i = L_{i−1} − L_i makes the
/// path identity Σℓ_i + L_n = T exact in floating point.
pub fn sample_stick(t: f64, n: usize, rng: &mut StreamRng) -> StickPath {
    assert!(t > 0.0 && n >= 1, "need T > 0 and n >= 1");
    let mut lengths = Vec::with_capacity(n);
    let mut uniforms = Vec::with_capacity(n);
    let mut rem = t;
    for _ in 0..n {
        loop {
            let u = open01(rng);
            let next = rem * u;
            let len = rem - next;
            if len > 0.0 && next > 0.0 {
                uniforms.push(u);
                lengths.push(len);
                rem = next;
                break;
            }
        }
    }
    StickPath { t, lengths, remainder: rem, uniforms }
}

/// E[ℓ_k^q] = T^q (1+q)^{−k}.
pub fn stick_moment(t: f64, q: f64, k: usize) -> Result<f64> {
    if q <= -1.0 {
        return Err(Error::MomentDoesNotExist { q, range: "(-1, inf)" });
    }
    assert!(t > 0.0 && k >= 1);
    Ok(t.powf(q) * (1.0 + q).powi(-(k as i32)))
}

/// E[ℓ_1^{p_1} ⋯ ℓ_n^{p_n}] as a product of beta functions. Exponents and
/// all tail sums must exceed −1.
pub fn joint_stick_moment(t: f64, exponents: &[f64]) -> Result<f64> {
    assert!(t > 0.0 && !exponents.is_empty());
    let mut tail = 0.0;
    // walk from the back so each tail sum q_k is available
    let mut value = 1.0;
    for &p in exponents.iter().rev() {
        if p <= -1.0 {
            return Err(Error::MomentDoesNotExist { q: p, range: "(-1, inf)" });
        }
        if tail <= -1.0 {
            return Err(Error::MomentDoesNotExist { q: tail, range: "(-1, inf)" });
        }
        value *= beta(1.0 + p, 1.0 + tail);
        tail += p;
    }
    if tail <= -1.0 {
        return Err(Error::MomentDoesNotExist { q: tail, range: "(-1, inf)" });
    }
    Ok(t.powf(tail) * value)
}

/// Exact value and geometric upper bound for E[ℓ_j^p ℓ_k^q ℓ_n^r].
#[derive(Debug, Clone, Copy)]
pub struct TripleMoment {
    pub exact: f64,
    pub bound: f64,
    /// Constant in front of θ^{p+q}(1+r)^{−n}, uniform over 1 ≤ j ≤ k ≤ n.
    pub constant: f64,
    pub theta: f64,
}

/// E[ℓ_j^p ℓ_k^q ℓ_n^r] for 1 ≤ j ≤ k ≤ n and p,q,r ≥ 0, split over the
/// four coincidence patterns of (j,k,n), together with the bound
/// C T^{p+q+r} θ^{p+q} (1+r)^{−n}.
pub fn stick_moment_triple(
    t: f64,
    p: f64,
    q: f64,
    r: f64,
    j: usize,
    k: usize,
    n: usize,
) -> Result<TripleMoment> {
    if !(1 <= j && j <= k && k <= n) {
        return Err(Error::IndexOrder { j, k, n });
    }
    assert!(t > 0.0 && p >= 0.0 && q >= 0.0 && r >= 0.0);
    let pow = |b: f64, e: i64| b.powi(e as i32);
    let scale = t.powf(p + q + r);
    let (sj, sk, sn) = (j as i64, k as i64, n as i64);
    let exact = scale
        * if j < k && k < n {
            pow(1.0 + p + q + r, 1 - sj)
                * beta(1.0 + p, 1.0 + q + r)
                * pow(1.0 + q + r, sj - sk + 1)
                * beta(1.0 + q, 1.0 + r)
                * pow(1.0 + r, sk - sn)
        } else if j < k {
            // k == n
            pow(1.0 + p + q + r, 1 - sj) * beta(1.0 + p, 1.0 + q + r) * pow(1.0 + q + r, sj - sn)
        } else if k < n {
            // j == k
            pow(1.0 + p + q + r, 1 - sj) * beta(1.0 + p + q, 1.0 + r) * pow(1.0 + r, sj - sn)
        } else {
            pow(1.0 + p + q + r, -sj)
        };
    let theta = (1.0 + r + p.max(q)) / (1.0 + r + p + q);
    // the exact value times (1+r)^n / θ^{p+q} is maximised at the smallest
    // admissible indices in each case; take the worst case as the constant
    let c1 = beta(1.0 + p, 1.0 + q + r) * beta(1.0 + q, 1.0 + r) * (1.0 + r).powi(2);
    let c2 = beta(1.0 + p, 1.0 + q + r) * (1.0 + r).powi(2) / (1.0 + q + r);
    let c3 = beta(1.0 + p + q, 1.0 + r) * (1.0 + r);
    let c4 = (1.0 + r) / (1.0 + p + q + r);
    let constant = (c1.max(c2).max(c3).max(c4)) / theta.powf(p + q);
    let bound = constant * scale * theta.powf(p + q) * pow(1.0 + r, -sn);
    Ok(TripleMoment { exact, bound, constant, theta })
}

/// E[L_{k−1}^p ℓ_k^q ℓ_1^r] for k ≥ 2, in closed form:
/// T^{p+q+r} B(1+p+q, 1+r) (1+q)^{−1} (1+p+q)^{2−k}.
pub fn remainder_stick_moment(t: f64, p: f64, q: f64, r: f64, k: usize) -> Result<f64> {
    assert!(t > 0.0 && k >= 2);
    for (v, name) in [(p + q, "p+q"), (q, "q"), (r, "r")] {
        if v <= -1.0 {
            let _ = name;
            return Err(Error::MomentDoesNotExist { q: v, range: "(-1, inf)" });
        }
    }
    Ok(t.powf(p + q + r) * beta(1.0 + p + q, 1.0 + r) / (1.0 + q)
        * (1.0 + p + q).powi(2 - k as i32))
}
