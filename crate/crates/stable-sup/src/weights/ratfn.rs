//! Exact univariate rational functions over ℚ, used for weight coefficients
//! that depend on the stability index α.
//!
//! Everything the iterated weights produce lives in ℚ(α): the building
//! blocks are α/(α−1) and (α−1)/α and integer combinations thereof. Keeping
//! coefficients exact makes canonical-form comparisons (commutativity,
//! cross-implementation agreement) true equalities instead of float
//! tolerances. Degrees stay tiny (a handful per iteration order), so
//! classical Euclidean reduction is plenty.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense polynomial in one variable over ℚ; coefficient i belongs to α^i.
/// Canonical form stores no trailing zeros (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<BigRational>);

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    pub fn from_int(n: i64) -> Poly {
        Poly::constant(big(n))
    }

    /// The variable α itself.
    pub fn var() -> Poly {
        Poly(vec![big(0), big(1)])
    }

    /// Build from integer coefficients, lowest degree first.
    pub fn from_coeffs(cs: &[i64]) -> Poly {
        let mut p = Poly(cs.iter().map(|&c| big(c)).collect());
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut p = Poly(out);
        p.trim();
        p
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut p = Poly(self.0.iter().map(|x| x * c).collect());
        p.trim();
        p
    }

    /// Division with remainder; the divisor must be nonzero.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero());
        let mut rem = self.clone();
        let mut quo = vec![BigRational::zero(); self.0.len().saturating_sub(div.0.len()) + 1];
        let dlead = div.leading();
        while !rem.is_zero() && rem.degree() >= div.degree() && !(rem.degree() == 0 && div.degree() > 0) {
            if rem.0.len() < div.0.len() {
                break;
            }
            let shift = rem.0.len() - div.0.len();
            let c = rem.leading() / dlead.clone();
            quo[shift] += &c;
            // rem -= c * x^shift * div
            for (i, d) in div.0.iter().enumerate() {
                rem.0[i + shift] -= &c * d;
            }
            rem.trim();
        }
        let mut q = Poly(quo);
        q.trim();
        (q, rem)
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.scale(&(BigRational::one() / lead))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    pub fn nonzero_terms(&self) -> usize {
        self.0.iter().filter(|c| !c.is_zero()).count()
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // exact for all coefficients arising here (small numerators and powers)
    let num = r.numer();
    let den = r.denom();
    bigint_to_f64(num) / bigint_to_f64(den)
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().expect("coefficient fits in f64 range")
}

/// Reduced rational function num/den with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    fn reduced(num: Poly, den: Poly) -> RatFn {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn { num, den: Poly::from_int(1) };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() > 0 || !g.is_zero() {
            (num.divrem(&g).0, den.divrem(&g).0)
        } else {
            (num, den)
        };
        // normalise to a monic denominator
        let lead = den.leading();
        let inv = BigRational::one() / lead;
        RatFn { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn new(num: Poly, den: Poly) -> RatFn {
        RatFn::reduced(num, den)
    }

    pub fn zero() -> RatFn {
        RatFn { num: Poly::zero(), den: Poly::from_int(1) }
    }

    pub fn from_int(n: i64) -> RatFn {
        RatFn { num: Poly::from_int(n), den: Poly::from_int(1) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// α/(α−1), the prefactor of the one-sided weight for α ≠ 1.
    pub fn alpha_over_alpha_minus_one() -> RatFn {
        RatFn::new(Poly::var(), Poly::from_coeffs(&[-1, 1]))
    }

    /// 1 − 1/α = (α−1)/α.
    pub fn one_minus_inv_alpha() -> RatFn {
        RatFn::new(Poly::from_coeffs(&[-1, 1]), Poly::var())
    }

    /// 1/α − 1 = (1−α)/α, the per-power eigenvalue of X^{−1} under D.
    pub fn inv_alpha_minus_one() -> RatFn {
        RatFn::new(Poly::from_coeffs(&[1, -1]), Poly::var())
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        RatFn::reduced(num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn mul_int(&self, n: i64) -> RatFn {
        RatFn { num: self.num.scale(&big(n)), den: self.den.clone() }
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        self.num.eval_f64(alpha) / self.den.eval_f64(alpha)
    }

    pub fn is_one(&self) -> bool {
        self == &RatFn::from_int(1)
    }

    pub fn den_is_one(&self) -> bool {
        self.den == Poly::from_int(1)
    }

    /// Sign convention for display: the denominator is monic, so the sign
    /// of the leading numerator coefficient is the natural "sign" to pull
    /// out in front of a term.
    pub fn num_leading_negative(&self) -> bool {
        self.num.leading().is_negative()
    }

    /// True when the printed form is a bare sum (multi-term numerator over
    /// denominator 1) that would be ambiguous inside a product.
    pub fn needs_parens_in_product(&self) -> bool {
        self.den_is_one() && self.num.nonzero_terms() > 1
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if i > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "a")?;
                if i > 1 {
                    write!(f, "^{i}")?;
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for RatFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den_is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.nonzero_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if self.den.nonzero_terms() > 1 {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}
