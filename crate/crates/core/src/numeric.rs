//! Exact integer and rational primitives.
//!
//! Every decision made elsewhere in the crate goes through the predicates in
//! this module. The two roots that matter are
//!
//! * `β`, the largest real root of `x^m - x - s` (the positive fixed point of
//!   `x ↦ x^m - s`), and
//! * `γ = (s - β)^(1/m)`, the left end of the window `[γ, β]` of non-negative
//!   points whose image stays inside `[-β, β]`.
//!
//! Both are irrational in general. They are never approximated when a
//! classification is decided: comparisons reduce to the sign of a polynomial
//! evaluated at an integer or rational point. [`DecimalApprox`] exists only for
//! reports and plots.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{domain, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// `⌊√n⌋`.
pub fn isqrt(n: &Int) -> Result<Int> {
    if n.is_negative() {
        return domain(format!("isqrt of negative value {n}"));
    }
    Ok(n.sqrt())
}

/// `⌊n^(1/m)⌋` for `n ≥ 0`, `m ≥ 1`.
pub fn iroot(n: &Int, m: u32) -> Result<Int> {
    if m < 1 {
        return domain("iroot needs m >= 1");
    }
    if n.is_negative() {
        return domain(format!("iroot of negative value {n}"));
    }
    Ok(n.nth_root(m))
}

/// The non-negative square root of `n` when `n` is a perfect square.
pub fn perfect_square_root(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn ensure_degree(m: u32) -> Result<()> {
    if m < 2 {
        return domain(format!("root predicates need m >= 2, got {m}"));
    }
    Ok(())
}

fn sign_to_ordering(v: &Int) -> Ordering {
    match v.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Orders the integer `x ≥ 1` against `β`, the positive root of `x^m - x - k`.
///
/// On `x ≥ 1` the polynomial is strictly increasing, so its sign at `x` is
/// the answer.
pub fn compare_to_beta(x: &Int, m: u32, k: &Int) -> Result<Ordering> {
    ensure_degree(m)?;
    if !k.is_positive() {
        return domain(format!("compare_to_beta needs k >= 1, got {k}"));
    }
    if !x.is_positive() {
        return domain(format!(
            "compare_to_beta is only defined for x >= 1, got {x}"
        ));
    }
    let value = Pow::pow(x, m) - x - k;
    Ok(sign_to_ordering(&value))
}

/// Orders the integer `x ≥ 0` against `γ = (k - β)^(1/m)`.
///
/// `x ≥ γ ⟺ x^m ≥ k - β ⟺ β ≥ k - x^m`, which is a comparison of the integer
/// `t = k - x^m` against `β`. When `t ≤ 0` the answer is immediate since
/// `β > 1`.
pub fn compare_to_gamma(x: &Int, m: u32, k: &Int) -> Result<Ordering> {
    ensure_degree(m)?;
    if x.is_negative() {
        return domain(format!("compare_to_gamma needs x >= 0, got {x}"));
    }
    if compare_to_beta(k, m, k)? == Ordering::Less {
        return domain(format!("gamma is not real for m={m}, k={k} (k < beta)"));
    }
    let t = k - Pow::pow(x, m);
    if !t.is_positive() {
        return Ok(Ordering::Greater);
    }
    Ok(compare_to_beta(&t, m, k)?.reverse())
}

/// `⌊β⌋` for `x^m - x - k`, `k ≥ 1`.
pub fn floor_beta(m: u32, k: &Int) -> Result<Int> {
    ensure_degree(m)?;
    let mut hi = iroot(&k.abs(), m)? + 2u32;
    while compare_to_beta(&hi, m, k)? != Ordering::Greater {
        hi *= 2u32;
    }
    // largest x in [1, hi) with x <= beta; x = 1 always qualifies since k >= 1
    let mut lo = Int::one();
    while &hi - &lo > Int::one() {
        let mid: Int = (&lo + &hi) >> 1;
        if compare_to_beta(&mid, m, k)? == Ordering::Greater {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// Rational analogue of [`compare_to_beta`] for an arbitrary rational shift.
///
/// `β` is taken as the largest root of `x^m - x - shift`. Past the threshold
/// `τ` (`1/2` for `m = 2`, `1` otherwise) the polynomial is increasing, and
/// the root exists there exactly when the polynomial is non-positive at `τ`.
pub fn rat_compare_to_beta(t: &Rat, m: u32, shift: &Rat) -> Result<Ordering> {
    ensure_degree(m)?;
    let tau = if m == 2 {
        Rat::new(Int::one(), Int::from(2))
    } else {
        Rat::one()
    };
    let at = |x: &Rat| -> Rat { Pow::pow(x, m) - x - shift };
    if at(&tau).is_positive() {
        return domain(format!(
            "x^{m} - x - ({shift}) has no real root at or beyond {tau}"
        ));
    }
    if *t < tau {
        return Ok(Ordering::Less);
    }
    Ok(at(t).cmp(&Rat::zero()))
}

/// Rational analogue of [`compare_to_gamma`]; `x ≥ 0`.
pub fn rat_compare_to_gamma(x: &Rat, m: u32, shift: &Rat) -> Result<Ordering> {
    if x.is_negative() {
        return domain(format!("gamma comparison needs x >= 0, got {x}"));
    }
    if rat_compare_to_beta(shift, m, shift)? == Ordering::Less {
        return domain(format!("gamma is not real for m={m}, shift={shift}"));
    }
    let t = shift - Pow::pow(x, m);
    Ok(rat_compare_to_beta(&t, m, shift)?.reverse())
}

/// Which root to approximate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSpec {
    /// Positive fixed point of `x^m - k`.
    Beta { m: u32, k: Int },
    /// `(k - β)^(1/m)`.
    Gamma { m: u32, k: Int },
    /// Positive fixed point `(1 + √(1+4q))/2` of `x² - q`.
    Bq(Rat),
    /// `√(q - B_q)`.
    Cq(Rat),
}

impl RootSpec {
    fn degree_and_shift(&self) -> (u32, Rat, bool) {
        match self {
            RootSpec::Beta { m, k } => (*m, Rat::from_integer(k.clone()), false),
            RootSpec::Gamma { m, k } => (*m, Rat::from_integer(k.clone()), true),
            RootSpec::Bq(q) => (2, q.clone(), false),
            RootSpec::Cq(q) => (2, q.clone(), true),
        }
    }
}

/// A truncated decimal with a certified error bound.
///
/// The true value lies in `[lower, lower + error_bound)` where `lower` is the
/// printed value read as an exact rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalApprox {
    pub value: String,
    pub digits: u32,
    pub error_bound: Rat,
    lower: Rat,
}

impl DecimalApprox {
    pub fn lower(&self) -> &Rat {
        &self.lower
    }

    pub fn upper(&self) -> Rat {
        &self.lower + &self.error_bound
    }

    /// Lossy, for plotting.
    pub fn to_f64(&self) -> f64 {
        self.value.parse().unwrap_or(f64::NAN)
    }

    /// Builds an approximation from an exact rational, truncating toward −∞.
    pub fn from_rat(x: &Rat, digits: u32) -> DecimalApprox {
        let scale = Pow::pow(Int::from(10), digits);
        let scaled = (x * Rat::from_integer(scale.clone())).floor().to_integer();
        DecimalApprox {
            value: format_scaled(&scaled, digits),
            digits,
            error_bound: Rat::new(Int::one(), scale.clone()),
            lower: Rat::new(scaled, scale),
        }
    }
}

impl fmt::Display for DecimalApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

fn format_scaled(scaled: &Int, digits: u32) -> String {
    let negative = scaled.is_negative();
    let magnitude = scaled.abs().to_string();
    let digits = digits as usize;
    let padded = if magnitude.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - magnitude.len()), magnitude)
    } else {
        magnitude
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

type AtOrBelow<'a> = dyn Fn(&Rat) -> Result<bool> + 'a;

/// Certified decimal approximation of `β`, `γ`, `B_q` or `C_q` by integer
/// bisection on the defining polynomial.
pub fn approx_root(spec: &RootSpec, digits: u32) -> Result<DecimalApprox> {
    let (m, shift, is_gamma) = spec.degree_and_shift();
    ensure_degree(m)?;
    if m > 2 && shift.is_negative() {
        return domain(format!("no positive fixed point for m={m}, k={shift}"));
    }
    // at or below the root
    let below: Box<AtOrBelow> = if is_gamma {
        if rat_compare_to_beta(&shift, m, &shift)? == Ordering::Less {
            return domain(format!("gamma is not real for m={m}, shift={shift}"));
        }
        Box::new(|x: &Rat| Ok(rat_compare_to_gamma(x, m, &shift)? != Ordering::Greater))
    } else {
        // surface the no-root error before bisecting
        rat_compare_to_beta(&Rat::zero(), m, &shift)?;
        Box::new(|x: &Rat| Ok(rat_compare_to_beta(x, m, &shift)? != Ordering::Greater))
    };

    let scale = Pow::pow(Int::from(10), digits);
    let to_rat = |n: &Int| Rat::new(n.clone(), scale.clone());
    let ceiling = shift.abs().ceil().to_integer() + 2u32;
    let mut lo = Int::zero();
    let mut hi = &ceiling * &scale;
    debug_assert!(!below(&to_rat(&hi))?);
    while &hi - &lo > Int::one() {
        let mid: Int = (&lo + &hi) >> 1;
        if below(&to_rat(&mid))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DecimalApprox {
        value: format_scaled(&lo, digits),
        digits,
        error_bound: Rat::new(Int::one(), scale.clone()),
        lower: to_rat(&lo),
    })
}

/// An element `rational + coeff·√radicand` of a real quadratic field.
///
/// Used to check interval statements about `β = (1 + √(1+4k))/2` with exact
/// signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    pub rational: Rat,
    pub coeff: Rat,
    pub radicand: Int,
}

impl QuadSurd {
    pub fn from_rat(x: Rat, radicand: &Int) -> QuadSurd {
        QuadSurd {
            rational: x,
            coeff: Rat::zero(),
            radicand: radicand.clone(),
        }
    }

    /// `β` for `x² - k`, i.e. `(1 + √(1+4k))/2`.
    pub fn beta(k: &Int) -> QuadSurd {
        let half = Rat::new(Int::one(), Int::from(2));
        QuadSurd {
            rational: half.clone(),
            coeff: half,
            radicand: 4 * k + 1u32,
        }
    }

    pub fn signum(&self) -> Ordering {
        let zero = Rat::zero();
        let u = self.rational.cmp(&zero);
        let v = if self.radicand.is_zero() {
            Ordering::Equal
        } else {
            self.coeff.cmp(&zero)
        };
        match (u, v) {
            (Ordering::Equal, Ordering::Equal) => Ordering::Equal,
            (a, b) if a != Ordering::Less && b != Ordering::Less => Ordering::Greater,
            (a, b) if a != Ordering::Greater && b != Ordering::Greater => Ordering::Less,
            (a, b) => {
                let u2 = &self.rational * &self.rational;
                let v2d = &self.coeff * &self.coeff * Rat::from_integer(self.radicand.clone());
                match u2.cmp(&v2d) {
                    Ordering::Greater => a,
                    Ordering::Less => b,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    fn check(&self, other: &QuadSurd) {
        assert_eq!(self.radicand, other.radicand, "mixed quadratic fields");
    }
}

impl Add for &QuadSurd {
    type Output = QuadSurd;
    fn add(self, rhs: &QuadSurd) -> QuadSurd {
        self.check(rhs);
        QuadSurd {
            rational: &self.rational + &rhs.rational,
            coeff: &self.coeff + &rhs.coeff,
            radicand: self.radicand.clone(),
        }
    }
}

impl Sub for &QuadSurd {
    type Output = QuadSurd;
    fn sub(self, rhs: &QuadSurd) -> QuadSurd {
        self + &(-rhs)
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd {
            rational: -&self.rational,
            coeff: -&self.coeff,
            radicand: self.radicand.clone(),
        }
    }
}

impl Mul for &QuadSurd {
    type Output = QuadSurd;
    fn mul(self, rhs: &QuadSurd) -> QuadSurd {
        self.check(rhs);
        let d = Rat::from_integer(self.radicand.clone());
        QuadSurd {
            rational: &self.rational * &rhs.rational + &self.coeff * &rhs.coeff * d,
            coeff: &self.rational * &rhs.coeff + &self.coeff * &rhs.rational,
            radicand: self.radicand.clone(),
        }
    }
}
