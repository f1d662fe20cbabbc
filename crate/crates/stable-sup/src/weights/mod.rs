//! Symbolic integration-by-parts weights for the coupled approximations
//! (X₊,ₙ, X₋,ₙ).
//!
//! The driving identity is
//!
//!   E[∂_± f(X₊,ₙ, X₋,ₙ) Φ] = E[f(X₊,ₙ, X₋,ₙ) H^±_{n,m}(Φ)],   m ≥ n ≥ 1,
//!
//! where the one-sided operator acts through the scaling derivative
//! D^±_m = η_± ∂_{η_±} + Σ_{i≤m} E_i 1{[G_i]^± > 0} ∂_{E_i}, under which
//!
//!   D^±[Σ^±] = Σ^±,   D^±[σ^±] = 0,   D^±[X_{±,n}^p] = (1 − 1/α) p X_{±,n}^p,
//!
//! with Σ^±_m = η_± + Σ E_i 1{[G_i]^± > 0} and σ^±_m = 1 + #{i ≤ m : [G_i]^± > 0},
//! and cross-side derivatives vanish. Hence
//!
//!   H^±_{n,m}(Φ) = (α/(α−1)) X_{±,n}^{-1} ((Σ^±_m − σ^±_m + 1 − 1/α) Φ − D^±_m[Φ]).
//!
//! Monomials Σ^a σ^b X^{-p} are D-eigenvectors with eigenvalue
//! a + p(1/α − 1), so iterating H stays inside the algebra generated by
//! Σ^±, σ^±, X_±^{-1} with coefficients in ℚ(α). At α = 1 the same identity
//! holds with D^±_m = η_± ∂_{η_±} ± Σ_k [S_k]^± ∂_{S_k}, under which
//! D^±[X_±^p] = p X_±^p and the multiplier collects one bounded kernel
//! (see [`qfun`]) per coordinate plus the count of coordinates whose own
//! linear factor got differentiated:
//!
//!   Z^±_{1,m} = q_±(η_±) + Σ_{i≤m} q_±([S_i]^±) − #{i ≤ m : [S_i]^± > 0}.
//!
//! Each D application shifts kernels up (q^{(k)} → q^{(k+1)}) and kills the
//! locally constant count, so D^±[Z^±_k] = Z^±_{k+1} with
//! Z^±_{k,m} = q^{(k)}_±(η_±) + Σ_{i≤m} q^{(k)}_±([S_i]^±) for k ≥ 2, and
//! the Cauchy algebra is generated by X_±^{-1} and the Z^±_{k,m} with
//! rational coefficients. (For test functions that do not vanish on the
//! axes, the Cauchy identity also carries an explicit η-boundary term on
//! the empty-series event; see [`verify_ibp_identity`].)
//!
//! Expressions are kept canonical — like monomials merged, coefficients
//! exact — so operator identities (commutativity of H^+ and H^-, agreement
//! with an independent expansion) are literal structural equalities. The
//! n-dependence of every monomial sits entirely in its X_±^{-1} factors,
//! which is why weight · X₊^{k₊} X₋^{k₋} is the same random variable at
//! every level n ≤ m.

pub mod qfun;
pub mod ratfn;

use std::collections::BTreeMap;

use crate::chi::{build_chi, ChiApprox, NoiseRecord, Side};
use crate::error::{Error, Result};
use crate::params::StableParams;
use crate::stats::mean_stderr;
pub use qfun::{q_family, q_rational, RationalFn};
pub use ratfn::{Poly, RatFn};

/// Which operator algebra an expression lives in: α ≠ 1 or the Cauchy case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Standard,
    Cauchy,
}

/// Multiplicative generators of the weight algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gen {
    /// Σ^±_m = η_± + Σ_{i≤m} E_i 1{[G_i]^± > 0} (standard mode)
    Sigma(Side),
    /// σ^±_m = 1 + #{i ≤ m : [G_i]^± > 0} (standard mode)
    Count(Side),
    /// Z^±_{k,m} = q^{(k)}_±(η_±) + Σ_{i≤m} q^{(k)}_±([S_i]^±), minus
    /// #{i ≤ m : [S_i]^± > 0} when k = 1 (Cauchy mode)
    Z(Side, u32),
    /// X_{±,n}^{-1}
    InvX(Side),
}

type Exps = BTreeMap<Gen, u32>;

/// coeff · Π generator^exponent, exponents strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: RatFn,
    pub exps: Exps,
}

/// A sum of monomials in canonical form: terms sorted by their exponent
/// maps, like terms merged, zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightExpr {
    mode: Mode,
    terms: Vec<Monomial>,
}

enum DRule {
    Eigen(RatFn),
    Shift(Gen),
    Zero,
}

fn d_rule(mode: Mode, gen: Gen, side: Side) -> DRule {
    match gen {
        Gen::Sigma(s) if s == side => DRule::Eigen(RatFn::from_int(1)),
        Gen::InvX(s) if s == side => match mode {
            Mode::Standard => DRule::Eigen(RatFn::inv_alpha_minus_one()),
            Mode::Cauchy => DRule::Eigen(RatFn::from_int(-1)),
        },
        Gen::Z(s, k) if s == side => DRule::Shift(Gen::Z(s, k + 1)),
        _ => DRule::Zero,
    }
}

impl WeightExpr {
    pub fn one(mode: Mode) -> WeightExpr {
        WeightExpr { mode, terms: vec![Monomial { coeff: RatFn::from_int(1), exps: Exps::new() }] }
    }

    pub fn from_terms(mode: Mode, terms: Vec<Monomial>) -> WeightExpr {
        Self::canonical(mode, terms)
    }

    fn canonical(mode: Mode, terms: Vec<Monomial>) -> WeightExpr {
        let mut map: BTreeMap<Exps, RatFn> = BTreeMap::new();
        for t in terms {
            let mut exps = t.exps;
            exps.retain(|_, e| *e > 0);
            map.entry(exps)
                .and_modify(|c| *c = c.add(&t.coeff))
                .or_insert(t.coeff);
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(exps, coeff)| Monomial { coeff, exps })
            .collect();
        WeightExpr { mode, terms }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &WeightExpr) -> WeightExpr {
        assert!(self.mode == other.mode, "mixed-mode expression arithmetic");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::canonical(self.mode, terms)
    }

    pub fn sub(&self, other: &WeightExpr) -> WeightExpr {
        self.add(&other.scale(&RatFn::from_int(-1)))
    }

    pub fn scale(&self, c: &RatFn) -> WeightExpr {
        Self::canonical(
            self.mode,
            self.terms
                .iter()
                .map(|t| Monomial { coeff: t.coeff.mul(c), exps: t.exps.clone() })
                .collect(),
        )
    }

    /// Multiply every term by one generator.
    pub fn mul_gen(&self, gen: Gen) -> WeightExpr {
        Self::canonical(
            self.mode,
            self.terms
                .iter()
                .map(|t| {
                    let mut exps = t.exps.clone();
                    *exps.entry(gen).or_insert(0) += 1;
                    Monomial { coeff: t.coeff.clone(), exps }
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &WeightExpr) -> WeightExpr {
        assert!(self.mode == other.mode, "mixed-mode expression arithmetic");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut exps = a.exps.clone();
                for (&g, &e) in &b.exps {
                    *exps.entry(g).or_insert(0) += e;
                }
                terms.push(Monomial { coeff: a.coeff.mul(&b.coeff), exps });
            }
        }
        Self::canonical(self.mode, terms)
    }

    /// The scaling derivative D^±_m acting by the Leibniz rule. Eigen
    /// generators contribute exponent·eigenvalue to a single term; each
    /// Z_k factor spawns one term with Z_k replaced (once) by Z_{k+1}.
    pub fn apply_d(&self, side: Side) -> WeightExpr {
        let mut out: Vec<Monomial> = Vec::new();
        for t in &self.terms {
            let mut lambda = RatFn::zero();
            for (&g, &e) in &t.exps {
                match d_rule(self.mode, g, side) {
                    DRule::Eigen(l) => lambda = lambda.add(&l.mul_int(e as i64)),
                    DRule::Shift(g2) => {
                        let mut exps = t.exps.clone();
                        let e_cur = exps.get_mut(&g).expect("factor present");
                        *e_cur -= 1;
                        if *e_cur == 0 {
                            exps.remove(&g);
                        }
                        *exps.entry(g2).or_insert(0) += 1;
                        out.push(Monomial { coeff: t.coeff.mul_int(e as i64), exps });
                    }
                    DRule::Zero => {}
                }
            }
            if !lambda.is_zero() {
                out.push(Monomial { coeff: t.coeff.mul(&lambda), exps: t.exps.clone() });
            }
        }
        Self::canonical(self.mode, out)
    }

    /// One application of the one-sided weight operator:
    /// H^±(Φ) = (α/(α−1)) X_±^{-1}((Σ^± − σ^± + 1 − 1/α)Φ − D^±[Φ]) for
    /// α ≠ 1, and X_±^{-1}(Z^±_1 Φ − D^±[Φ]) in the Cauchy case.
    pub fn apply_h(&self, side: Side) -> WeightExpr {
        let d = self.apply_d(side);
        let inner = match self.mode {
            Mode::Standard => self
                .mul_gen(Gen::Sigma(side))
                .sub(&self.mul_gen(Gen::Count(side)))
                .add(&self.scale(&RatFn::one_minus_inv_alpha()))
                .sub(&d),
            Mode::Cauchy => self.mul_gen(Gen::Z(side, 1)).sub(&d),
        };
        let shifted = inner.mul_gen(Gen::InvX(side));
        match self.mode {
            Mode::Standard => shifted.scale(&RatFn::alpha_over_alpha_minus_one()),
            Mode::Cauchy => shifted,
        }
    }

    /// H^{+,k₊}(H^{−,k₋}(1)), the weight attached to the mixed derivative
    /// ∂₊^{k₊}∂₋^{k₋}. The two one-sided operators commute, so the order
    /// is a convention, not a choice.
    pub fn iterate_h(k_plus: u32, k_minus: u32, mode: Mode) -> WeightExpr {
        let mut expr = WeightExpr::one(mode);
        for _ in 0..k_minus {
            expr = expr.apply_h(Side::Minus);
        }
        for _ in 0..k_plus {
            expr = expr.apply_h(Side::Plus);
        }
        expr
    }

    /// The (X₊^{-1}, X₋^{-1}) exponents if they are the same in every
    /// monomial — they always are for iterated weights, which is exactly
    /// why the weight · X₊^{k₊} X₋^{k₋} product does not depend on the
    /// approximation level n.
    pub fn inv_x_degrees(&self) -> Option<(u32, u32)> {
        let degs = |t: &Monomial| {
            (
                t.exps.get(&Gen::InvX(Side::Plus)).copied().unwrap_or(0),
                t.exps.get(&Gen::InvX(Side::Minus)).copied().unwrap_or(0),
            )
        };
        let mut it = self.terms.iter();
        let first = degs(it.next()?);
        it.all(|t| degs(t) == first).then_some(first)
    }

    /// Freeze the α-dependent coefficients (and, in Cauchy mode, the
    /// kernel family for this ρ) for repeated evaluation.
    pub fn compile(&self, p: &StableParams) -> Result<CompiledWeight> {
        let cauchy = p.is_cauchy();
        if cauchy != (self.mode == Mode::Cauchy) {
            return Err(Error::CauchyModeMismatch);
        }
        let alpha = p.alpha();
        let mut kmax = [0u32; 2];
        for t in &self.terms {
            for (&g, _) in &t.exps {
                if let Gen::Z(s, k) = g {
                    kmax[s.idx()] = kmax[s.idx()].max(k);
                }
            }
        }
        let qfam = [
            if kmax[0] > 0 { q_family(kmax[0], Side::Plus, p.rho()) } else { Vec::new() },
            if kmax[1] > 0 { q_family(kmax[1], Side::Minus, p.rho()) } else { Vec::new() },
        ];
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let c = t.coeff.eval(alpha);
                let factors: Vec<(Gen, u32)> = t.exps.iter().map(|(&g, &e)| (g, e)).collect();
                (c, factors)
            })
            .collect();
        Ok(CompiledWeight { cauchy, terms, qfam, inv_x: self.inv_x_degrees() })
    }

    /// Compile-and-evaluate convenience; see [`CompiledWeight::eval`].
    pub fn eval(&self, chi: &ChiApprox, noise: &NoiseRecord, m: usize) -> Result<f64> {
        self.compile(&chi.params)?.eval(chi, noise, m)
    }
}

/// A weight with coefficients evaluated at a fixed (α, ρ).
#[derive(Debug, Clone)]
pub struct CompiledWeight {
    cauchy: bool,
    terms: Vec<(f64, Vec<(Gen, u32)>)>,
    /// per side, the kernels q^{(1)}, …, q^{(kmax)} (Cauchy mode only)
    qfam: [Vec<RationalFn>; 2],
    inv_x: Option<(u32, u32)>,
}

impl CompiledWeight {
    /// Evaluate on one realization: the approximation χ_n supplies the
    /// X_±^{-1} factors, the record supplies everything indexed by the
    /// weight level m. Requires m ≥ n ≥ 1.
    pub fn eval(&self, chi: &ChiApprox, noise: &NoiseRecord, m: usize) -> Result<f64> {
        if self.cauchy != noise.is_cauchy() {
            return Err(Error::CauchyModeMismatch);
        }
        if chi.n < 1 || m < chi.n {
            return Err(Error::LevelOrder { n: chi.n, m });
        }
        if m > noise.capacity() {
            return Err(Error::CapacityExceeded { capacity: noise.capacity(), requested: m });
        }
        let inv_x = [1.0 / chi.x_plus, 1.0 / chi.x_minus];
        Ok(self.sum_terms(inv_x, noise, m))
    }

    fn sum_terms(&self, inv_x: [f64; 2], noise: &NoiseRecord, m: usize) -> f64 {
        let z_vals = self.z_values(noise, m);
        let mut total = 0.0;
        for (c, factors) in &self.terms {
            let mut prod = *c;
            for &(g, e) in factors {
                let v = match g {
                    Gen::Sigma(s) => noise.eta(s) + noise.e_sum(s, m),
                    Gen::Count(s) => 1.0 + noise.count(s, m) as f64,
                    Gen::InvX(s) => inv_x[s.idx()],
                    Gen::Z(s, k) => z_vals[s.idx()][(k - 1) as usize],
                };
                prod *= v.powi(e as i32);
            }
            total += prod;
        }
        total
    }

    fn z_values(&self, noise: &NoiseRecord, m: usize) -> [Vec<f64>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for side in [Side::Plus, Side::Minus] {
            let fam = &self.qfam[side.idx()];
            if fam.is_empty() {
                continue;
            }
            let sign = if side == Side::Plus { 1.0 } else { -1.0 };
            let vals: Vec<f64> = fam
                .iter()
                .enumerate()
                .map(|(idx, q)| {
                    let mut z = q.eval(noise.eta(side));
                    for i in 1..=m {
                        z += q.eval(sign * noise.s(i));
                    }
                    if idx == 0 {
                        // only Z_1 carries the differentiated-factor count
                        z -= noise.count(side, m) as f64;
                    }
                    z
                })
                .collect();
            out[side.idx()] = vals;
        }
        out
    }

    /// weight(n, m) · X₊,ₙ^{k₊} X₋,ₙ^{k₋} with (k₊, k₋) the uniform
    /// X^{-1} degrees. The X factors cancel symbolically, so the product is
    /// computed without ever forming them — the result is bit-identical at
    /// every level n ≤ m, not merely equal up to rounding; `chi` enters only
    /// through the level checks.
    pub fn level_product(&self, chi: &ChiApprox, noise: &NoiseRecord, m: usize) -> Result<f64> {
        self.inv_x
            .ok_or(Error::PreconditionViolated("weight has non-uniform X^{-1} degrees"))?;
        if self.cauchy != noise.is_cauchy() {
            return Err(Error::CauchyModeMismatch);
        }
        if chi.n < 1 || m < chi.n {
            return Err(Error::LevelOrder { n: chi.n, m });
        }
        if m > noise.capacity() {
            return Err(Error::CapacityExceeded { capacity: noise.capacity(), requested: m });
        }
        Ok(self.sum_terms([1.0, 1.0], noise, m))
    }
}

/// Pointwise majorant for |weight · X₊^{k₊} X₋^{k₋}|: each |Σ^±_m| is at
/// most Z_m = η₊ + η₋ + Σ_{i≤m} E_i and each σ^±_m at most 1 + m, giving
/// Σ |c(α)| Z_m^{deg Σ} (1+m)^{deg σ} in standard mode. In Cauchy mode the
/// kernels are bounded, so |Z^±_{k,m}| ≤ (‖q^{(k)}‖_∞ + 1{k=1})(1+m) — the
/// count in Z_1 contributes at most m — and the bound is polynomial in m
/// alone.
#[derive(Debug, Clone)]
pub struct WeightMajorant {
    /// (constant, power of Z_m, power of 1+m)
    pairs: Vec<(f64, u32, u32)>,
}

impl WeightMajorant {
    pub fn eval(&self, z: f64, m: usize) -> f64 {
        self.pairs
            .iter()
            .map(|&(c, zd, md)| c * z.powi(zd as i32) * ((1 + m) as f64).powi(md as i32))
            .sum()
    }
}

/// Build the majorant for an iterated weight at fixed parameters. The
/// expression must have uniform X^{-1} degrees (iterated weights do).
pub fn weight_majorant(expr: &WeightExpr, p: &StableParams) -> Result<WeightMajorant> {
    if p.is_cauchy() != (expr.mode == Mode::Cauchy) {
        return Err(Error::CauchyModeMismatch);
    }
    expr.inv_x_degrees()
        .ok_or(Error::PreconditionViolated("weight has non-uniform X^{-1} degrees"))?;
    let mut sups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut pairs = Vec::with_capacity(expr.terms.len());
    for t in &expr.terms {
        let mut c = t.coeff.eval(p.alpha()).abs();
        let mut zd = 0u32;
        let mut md = 0u32;
        for (&g, &e) in &t.exps {
            match g {
                Gen::Sigma(_) => zd += e,
                Gen::Count(_) => md += e,
                Gen::InvX(_) => {}
                Gen::Z(s, k) => {
                    let fam = &mut sups[s.idx()];
                    while fam.len() < k as usize {
                        let next = fam.len() as u32 + 1;
                        fam.push(q_rational(next, s, p.rho()).sup_norm());
                    }
                    let bound = fam[(k - 1) as usize] + if k == 1 { 1.0 } else { 0.0 };
                    c *= bound.powi(e as i32);
                    md += e;
                }
            }
        }
        pairs.push((c, zd, md));
    }
    Ok(WeightMajorant { pairs })
}

/// Outcome of a Monte Carlo check of the integration-by-parts identity.
#[derive(Debug, Clone)]
pub struct IbpCheck {
    pub side: Side,
    pub n: usize,
    pub m: usize,
    pub lhs_mean: f64,
    pub rhs_mean: f64,
    pub diff_mean: f64,
    pub diff_stderr: f64,
    pub z_score: f64,
    pub samples: usize,
}

/// Monte Carlo verification of E[∂_± f(χ_n) Φ] = E[f(χ_n) H^±(Φ)] with
/// common random numbers: both sides are evaluated on the same realization
/// and the z-score is for the per-sample difference.
///
/// `f` returns (f, ∂₊f, ∂₋f) at a point (x₊, x₋). With `phi = None` the
/// test function is Φ ≡ 1. Otherwise Φ = φ(χ_n) and the right-hand weight
/// uses the chain rule for the scaling derivative, which reduces to
/// H^±(φ(χ)) = H^±(1) φ(χ) − ∂_±φ(χ) in both modes.
///
/// In Cauchy mode the operator identity as displayed holds for f vanishing
/// on the side's axis. A general f picks up a boundary term: on the event
/// that every [S_i]^± with i ≤ n vanishes, X_{±,n} = a_n η_± and the η_±
/// density is positive at 0 (unlike the η^{1−1/α} remainder for α ≠ 1), so
/// integrating the η coordinate by parts leaves
///
///   E[∂_± f Φ] + (c_±(0)/a_n) E[1{empty ± series} (f Φ)|_{X_± = 0}]
///     = E[f H^±(Φ)],
///
/// with c_±(0) = cos(ω)/(πρ) resp. cos(ω)/(π(1−ρ)) the conditioned Cauchy
/// density at 0. The check verifies this exact form; every density or
/// survival application uses test functions supported away from the axes,
/// where the correction is identically zero.
#[allow(clippy::too_many_arguments)]
pub fn verify_ibp_identity(
    f: &dyn Fn(f64, f64) -> (f64, f64, f64),
    side: Side,
    n: usize,
    m: usize,
    p: &StableParams,
    kappa: f64,
    samples: usize,
    seed: u64,
    phi: Option<&dyn Fn(f64, f64) -> (f64, f64, f64)>,
) -> Result<IbpCheck> {
    if n < 1 || m < n {
        return Err(Error::LevelOrder { n, m });
    }
    let mode = if p.is_cauchy() { Mode::Cauchy } else { Mode::Standard };
    let (kp, km) = match side {
        Side::Plus => (1, 0),
        Side::Minus => (0, 1),
    };
    let weight = WeightExpr::iterate_h(kp, km, mode).compile(p)?;
    let mut diffs = Vec::with_capacity(samples);
    let mut lhs_sum = 0.0;
    let mut rhs_sum = 0.0;
    let c0 = if p.is_cauchy() {
        let mass = match side {
            Side::Plus => p.rho(),
            Side::Minus => 1.0 - p.rho(),
        };
        p.omega().cos() / (std::f64::consts::PI * mass)
    } else {
        0.0
    };
    for i in 0..samples {
        let noise = NoiseRecord::generate(p, seed, i as u64, m);
        let chi = build_chi(&noise, n, p, kappa)?;
        let w = weight.eval(&chi, &noise, m)?;
        let (fv, fx, fy) = f(chi.x_plus, chi.x_minus);
        let df = match side {
            Side::Plus => fx,
            Side::Minus => fy,
        };
        let at_axis = |g: &dyn Fn(f64, f64) -> (f64, f64, f64)| match side {
            Side::Plus => g(0.0, chi.x_minus).0,
            Side::Minus => g(chi.x_plus, 0.0).0,
        };
        let boundary = if p.is_cauchy() && noise.count(side, n) == 0 {
            c0 / chi.a_n * at_axis(f) * phi.map_or(1.0, at_axis)
        } else {
            0.0
        };
        let (lhs, rhs) = match phi {
            None => (df + boundary, fv * w),
            Some(ph) => {
                let (pv, px, py) = ph(chi.x_plus, chi.x_minus);
                let dphi = match side {
                    Side::Plus => px,
                    Side::Minus => py,
                };
                (df * pv + boundary, fv * (w * pv - dphi))
            }
        };
        lhs_sum += lhs;
        rhs_sum += rhs;
        diffs.push(lhs - rhs);
    }
    let (diff_mean, diff_stderr) = mean_stderr(&diffs);
    let z_score = if diff_stderr > 0.0 { diff_mean / diff_stderr } else { 0.0 };
    Ok(IbpCheck {
        side,
        n,
        m,
        lhs_mean: lhs_sum / samples as f64,
        rhs_mean: rhs_sum / samples as f64,
        diff_mean,
        diff_stderr,
        z_score,
        samples,
    })
}

impl std::fmt::Display for Gen {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gen::Sigma(Side::Plus) => write!(f, "Σ+"),
            Gen::Sigma(Side::Minus) => write!(f, "Σ-"),
            Gen::Count(Side::Plus) => write!(f, "σ+"),
            Gen::Count(Side::Minus) => write!(f, "σ-"),
            Gen::InvX(Side::Plus) => write!(f, "X+"),
            Gen::InvX(Side::Minus) => write!(f, "X-"),
            Gen::Z(Side::Plus, k) => write!(f, "Z+_{k}"),
            Gen::Z(Side::Minus, k) => write!(f, "Z-_{k}"),
        }
    }
}

impl std::fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.num_leading_negative();
            let coeff = if neg { t.coeff.neg() } else { t.coeff.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote = false;
            if !coeff.is_one() || t.exps.is_empty() {
                if coeff.needs_parens_in_product() {
                    write!(f, "({coeff})")?;
                } else {
                    write!(f, "{coeff}")?;
                }
                wrote = true;
            }
            for (&g, &e) in &t.exps {
                if wrote {
                    write!(f, "*")?;
                }
                wrote = true;
                match g {
                    Gen::InvX(_) => write!(f, "{g}^-{e}")?,
                    _ if e == 1 => write!(f, "{g}")?,
                    _ => write!(f, "{g}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chi::NoiseRecord;

    fn mono(coeff: RatFn, gens: &[(Gen, u32)]) -> Monomial {
        Monomial { coeff, exps: gens.iter().copied().collect() }
    }

    fn beta() -> RatFn {
        RatFn::alpha_over_alpha_minus_one()
    }

    #[test]
    fn first_order_weight_closed_form() {
        // H^+(1) = (α/(α−1)) Σ+ X+^{-1} − (α/(α−1)) σ+ X+^{-1} + X+^{-1}
        let h = WeightExpr::iterate_h(1, 0, Mode::Standard);
        let want = WeightExpr::from_terms(
            Mode::Standard,
            vec![
                mono(beta(), &[(Gen::Sigma(Side::Plus), 1), (Gen::InvX(Side::Plus), 1)]),
                mono(beta().neg(), &[(Gen::Count(Side::Plus), 1), (Gen::InvX(Side::Plus), 1)]),
                mono(RatFn::from_int(1), &[(Gen::InvX(Side::Plus), 1)]),
            ],
        );
        assert_eq!(h, want);
        assert_eq!(h.to_string(), "a/(a - 1)*Σ+*X+^-1 - a/(a - 1)*σ+*X+^-1 + X+^-1");
        assert_eq!(h.inv_x_degrees(), Some((1, 0)));
    }

    #[test]
    fn second_order_weight_closed_form() {
        // Expanding H^{+,2}(1) by hand:
        //   β²Σ²X^{-2} − 2β²ΣσX^{-2} + β²σ²X^{-2}
        //   + α(2α−3)/(α−1)² ΣX^{-2} − 3β σX^{-2} + 2X^{-2}
        let h2 = WeightExpr::iterate_h(2, 0, Mode::Standard);
        let b2 = beta().mul(&beta());
        let s = Gen::Sigma(Side::Plus);
        let c = Gen::Count(Side::Plus);
        let x = Gen::InvX(Side::Plus);
        let mid = RatFn::new(
            Poly::from_coeffs(&[0, -3, 2]), // 2a² − 3a
            Poly::from_coeffs(&[1, -2, 1]), // (a−1)²
        );
        let want = WeightExpr::from_terms(
            Mode::Standard,
            vec![
                mono(b2.clone(), &[(s, 2), (x, 2)]),
                mono(b2.mul_int(-2), &[(s, 1), (c, 1), (x, 2)]),
                mono(b2, &[(c, 2), (x, 2)]),
                mono(mid, &[(s, 1), (x, 2)]),
                mono(beta().mul_int(-3), &[(c, 1), (x, 2)]),
                mono(RatFn::from_int(2), &[(x, 2)]),
            ],
        );
        assert_eq!(h2, want);
        assert_eq!(h2.num_terms(), 6);
        assert_eq!(h2.inv_x_degrees(), Some((2, 0)));
    }

    #[test]
    fn one_sided_operators_commute() {
        for mode in [Mode::Standard, Mode::Cauchy] {
            for (kp, km) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
                let mut via_minus_first = WeightExpr::one(mode);
                for _ in 0..km {
                    via_minus_first = via_minus_first.apply_h(Side::Minus);
                }
                for _ in 0..kp {
                    via_minus_first = via_minus_first.apply_h(Side::Plus);
                }
                let mut via_plus_first = WeightExpr::one(mode);
                for _ in 0..kp {
                    via_plus_first = via_plus_first.apply_h(Side::Plus);
                }
                for _ in 0..km {
                    via_plus_first = via_plus_first.apply_h(Side::Minus);
                }
                assert_eq!(via_minus_first, via_plus_first, "mode {mode:?} order ({kp},{km})");
                assert_eq!(via_minus_first.inv_x_degrees(), Some((kp, km)));
            }
        }
    }

    #[test]
    fn cauchy_first_order_form() {
        // D[1] = 0, so H(1) = X^{-1}(Z₁·1 − 0) = Z₁X^{-1}
        let h = WeightExpr::iterate_h(1, 0, Mode::Cauchy);
        let want = WeightExpr::from_terms(
            Mode::Cauchy,
            vec![mono(RatFn::from_int(1), &[(Gen::Z(Side::Plus, 1), 1), (Gen::InvX(Side::Plus), 1)])],
        );
        assert_eq!(h, want);
        assert_eq!(h.to_string(), "Z+_1*X+^-1");

        // H²(1) = X^{-1}(Z₁·Z₁X^{-1} − D[Z₁X^{-1}])
        //       = Z₁²X^{-2} − Z₂X^{-2} + Z₁X^{-2}
        let h2 = WeightExpr::iterate_h(2, 0, Mode::Cauchy);
        let z1 = Gen::Z(Side::Plus, 1);
        let z2 = Gen::Z(Side::Plus, 2);
        let x = Gen::InvX(Side::Plus);
        let want2 = WeightExpr::from_terms(
            Mode::Cauchy,
            vec![
                mono(RatFn::from_int(1), &[(z1, 2), (x, 2)]),
                mono(RatFn::from_int(-1), &[(z2, 1), (x, 2)]),
                mono(RatFn::from_int(1), &[(z1, 1), (x, 2)]),
            ],
        );
        assert_eq!(h2, want2);
    }

    #[test]
    fn d_satisfies_leibniz_on_products() {
        // D[uv] = D[u]v + uD[v] for random monomial pairs, both modes
        let gens_std = [
            Gen::Sigma(Side::Plus),
            Gen::Sigma(Side::Minus),
            Gen::Count(Side::Plus),
            Gen::InvX(Side::Plus),
            Gen::InvX(Side::Minus),
        ];
        let gens_cauchy = [
            Gen::Z(Side::Plus, 1),
            Gen::Z(Side::Plus, 2),
            Gen::Z(Side::Minus, 1),
            Gen::InvX(Side::Plus),
            Gen::InvX(Side::Minus),
        ];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for (mode, gens) in [(Mode::Standard, &gens_std), (Mode::Cauchy, &gens_cauchy)] {
            for _ in 0..50 {
                let pick = |next: &mut dyn FnMut() -> u64| {
                    let mut exps = Exps::new();
                    for &g in gens.iter() {
                        let e = (next() % 3) as u32;
                        if e > 0 {
                            exps.insert(g, e);
                        }
                    }
                    let c = RatFn::from_int((next() % 7) as i64 - 3);
                    WeightExpr::from_terms(mode, vec![Monomial { coeff: c, exps }])
                };
                let u = pick(&mut next);
                let v = pick(&mut next);
                for side in [Side::Plus, Side::Minus] {
                    let lhs = u.mul(&v).apply_d(side);
                    let rhs = u.apply_d(side).mul(&v).add(&u.mul(&v.apply_d(side)));
                    assert_eq!(lhs, rhs, "mode {mode:?} side {side:?}");
                }
            }
        }
    }

    #[test]
    fn eval_matches_direct_formula() {
        let p = StableParams::new(1.5, 0.5, 1.0).unwrap();
        let kappa = p.default_kappa();
        let noise = NoiseRecord::generate(&p, 7, 3, 12);
        let chi = build_chi(&noise, 4, &p, kappa).unwrap();
        let m = 9;
        let w = WeightExpr::iterate_h(1, 0, Mode::Standard).eval(&chi, &noise, m).unwrap();
        let alpha = p.alpha();
        let beta = alpha / (alpha - 1.0);
        let sigma = noise.eta(Side::Plus) + noise.e_sum(Side::Plus, m);
        let count = 1.0 + noise.count(Side::Plus, m) as f64;
        let zeta = 1.0 - 1.0 / alpha;
        let direct = beta / chi.x_plus * (sigma - count + zeta);
        assert!((w - direct).abs() < 1e-13 * direct.abs().max(1.0), "{w} vs {direct}");
    }

    #[test]
    fn cauchy_eval_matches_direct_formula() {
        let p = StableParams::new(1.0, 0.42, 1.0).unwrap();
        let kappa = p.default_kappa();
        let noise = NoiseRecord::generate(&p, 11, 2, 10);
        let chi = build_chi(&noise, 3, &p, kappa).unwrap();
        let m = 7;
        for side in [Side::Plus, Side::Minus] {
            let (kp, km) = if side == Side::Plus { (1, 0) } else { (0, 1) };
            let w = WeightExpr::iterate_h(kp, km, Mode::Cauchy).eval(&chi, &noise, m).unwrap();
            let q = q_rational(1, side, p.rho());
            let sign = if side == Side::Plus { 1.0 } else { -1.0 };
            let mut z = q.eval(noise.eta(side)) - noise.count(side, m) as f64;
            for i in 1..=m {
                z += q.eval(sign * noise.s(i));
            }
            let x = if side == Side::Plus { chi.x_plus } else { chi.x_minus };
            let direct = z / x;
            assert!((w - direct).abs() < 1e-13 * direct.abs().max(1.0), "{side:?}: {w} vs {direct}");
        }
    }

    #[test]
    fn cauchy_kernel_carries_side_mass() {
        // ∫₀^∞ q_±(x) c(±x) dx = P(±S > 0): per coordinate, integration by
        // parts with f = Φ = 1 forces E[q_±([S]^±)] = E[1{[S]^± > 0}] and
        // E[q_±(η_±)] = 1 — the identities that make E[Z^±_1] = 1 below
        for &rho in &[0.42, 0.5, 0.63] {
            let p = StableParams::new(1.0, rho, 1.0).unwrap();
            for (side, mass) in [(Side::Plus, rho), (Side::Minus, 1.0 - rho)] {
                let q = q_rational(1, side, rho);
                let sign = if side == Side::Plus { 1.0 } else { -1.0 };
                let got = crate::quad::integrate_to_inf(
                    |x| q.eval(x) * crate::stable::cauchy_density(sign * x, &p).unwrap(),
                    0.0,
                    1e-10,
                )
                .unwrap();
                assert!((got - mass).abs() < 1e-8, "{side:?} ρ={rho}: {got} vs {mass}");
            }
        }
    }

    #[test]
    fn cauchy_z1_has_unit_mean() {
        // E[Z^±_{1,m}] = 1 for every m: η_± contributes 1 and each S_i pair
        // (kernel, count) cancels in expectation
        let m = 6;
        let samples = 4000;
        for &rho in &[0.42, 0.58] {
            let p = StableParams::new(1.0, rho, 1.0).unwrap();
            let kappa = p.default_kappa();
            for side in [Side::Plus, Side::Minus] {
                let (kp, km) = if side == Side::Plus { (1, 0) } else { (0, 1) };
                let w = WeightExpr::iterate_h(kp, km, Mode::Cauchy).compile(&p).unwrap();
                let vals: Vec<f64> = (0..samples)
                    .map(|i| {
                        let noise = NoiseRecord::generate(&p, 0x21a1, i as u64, m);
                        let chi = build_chi(&noise, 1, &p, kappa).unwrap();
                        // weight is Z₁X^{-1}; undo the X factor to isolate Z₁
                        let x = if side == Side::Plus { chi.x_plus } else { chi.x_minus };
                        w.eval(&chi, &noise, m).unwrap() * x
                    })
                    .collect();
                let (mean, stderr) = mean_stderr(&vals);
                let z = (mean - 1.0) / stderr;
                assert!(z.abs() < 4.0, "{side:?} ρ={rho}: mean {mean} stderr {stderr} z {z}");
            }
        }
    }

    #[test]
    fn level_product_is_independent_of_n() {
        // the same weight·X₊^{k₊}X₋^{k₋} at levels n and n′ agrees exactly
        // per-realization — the X factors never enter the computation — and
        // the eval route recovers it once the X factors are multiplied back
        for (p, mode) in [
            (StableParams::new(1.5, 0.5, 2.0).unwrap(), Mode::Standard),
            (StableParams::new(0.7, 0.6, 1.0).unwrap(), Mode::Standard),
            (StableParams::new(1.0, 0.42, 1.0).unwrap(), Mode::Cauchy),
        ] {
            let kappa = p.default_kappa();
            let w = WeightExpr::iterate_h(1, 1, mode).compile(&p).unwrap();
            for seed in 0..20 {
                let noise = NoiseRecord::generate(&p, 100 + seed, 0, 12);
                let m = 10;
                let products: Vec<f64> = [1usize, 3, 6, 10]
                    .iter()
                    .map(|&n| {
                        let chi = build_chi(&noise, n, &p, kappa).unwrap();
                        let lp = w.level_product(&chi, &noise, m).unwrap();
                        let via_eval = w.eval(&chi, &noise, m).unwrap() * chi.x_plus * chi.x_minus;
                        assert!((via_eval - lp).abs() <= 1e-9 * lp.abs().max(1.0));
                        lp
                    })
                    .collect();
                for v in &products[1..] {
                    assert!(v == &products[0], "level products differ: {products:?}");
                }
            }
        }
    }

    #[test]
    fn majorant_dominates_per_realization() {
        let p = StableParams::new(1.4, 0.55, 1.0).unwrap();
        let kappa = p.default_kappa();
        let expr = WeightExpr::iterate_h(2, 1, Mode::Standard);
        let maj = weight_majorant(&expr, &p).unwrap();
        let w = expr.compile(&p).unwrap();
        let m = 8;
        for seed in 0..200 {
            let noise = NoiseRecord::generate(&p, seed, 5, m);
            let chi = build_chi(&noise, 2, &p, kappa).unwrap();
            let prod = w.level_product(&chi, &noise, m).unwrap();
            let z = noise.eta(Side::Plus)
                + noise.eta(Side::Minus)
                + (1..=m).map(|i| noise.exp(i)).sum::<f64>();
            assert!(prod.abs() <= maj.eval(z, m) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn cauchy_majorant_dominates_per_realization() {
        let p = StableParams::new(1.0, 0.42, 1.0).unwrap();
        let kappa = p.default_kappa();
        let expr = WeightExpr::iterate_h(1, 1, Mode::Cauchy);
        let maj = weight_majorant(&expr, &p).unwrap();
        let w = expr.compile(&p).unwrap();
        let m = 8;
        for seed in 0..200 {
            let noise = NoiseRecord::generate(&p, seed, 5, m);
            let chi = build_chi(&noise, 2, &p, kappa).unwrap();
            let prod = w.level_product(&chi, &noise, m).unwrap();
            assert!(prod.abs() <= maj.eval(1.0, m) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn eval_rejects_bad_levels_and_modes() {
        let p = StableParams::new(1.5, 0.5, 1.0).unwrap();
        let kappa = p.default_kappa();
        let noise = NoiseRecord::generate(&p, 1, 0, 8);
        let chi = build_chi(&noise, 5, &p, kappa).unwrap();
        let w = WeightExpr::iterate_h(1, 0, Mode::Standard).compile(&p).unwrap();
        assert!(matches!(w.eval(&chi, &noise, 3), Err(Error::LevelOrder { n: 5, m: 3 })));
        let chi0 = build_chi(&noise, 0, &p, kappa).unwrap();
        assert!(matches!(w.eval(&chi0, &noise, 3), Err(Error::LevelOrder { n: 0, m: 3 })));
        assert!(matches!(w.eval(&chi, &noise, 20), Err(Error::CapacityExceeded { .. })));
        assert!(matches!(
            WeightExpr::iterate_h(1, 0, Mode::Cauchy).compile(&p),
            Err(Error::CauchyModeMismatch)
        ));
    }

    #[test]
    fn mixed_weight_display_is_stable() {
        let h = WeightExpr::iterate_h(1, 1, Mode::Standard);
        let s = h.to_string();
        // 3 × 3 monomials from the two commuting one-sided factors
        assert_eq!(h.num_terms(), 9);
        assert!(s.contains("Σ+"), "{s}");
        assert!(s.contains("Σ-"), "{s}");
        assert!(s.contains("X+^-1*X-^-1"), "{s}");
    }
}
