//! The iterated map families, the affine conjugacy that reduces every integer
//! quadratic to `x² - q`, and the integral-lattice test for rational
//! polynomials.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::numeric::{Int, Rat};

/// `x ↦ x^m - k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerMap {
    m: u32,
    k: Int,
}

impl PowerMap {
    pub fn new(m: u32, k: impl Into<Int>) -> Result<PowerMap> {
        if m < 1 {
            return domain("power map degree must be at least 1");
        }
        Ok(PowerMap { m, k: k.into() })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> &Int {
        &self.k
    }

    pub fn eval(&self, x: &Int) -> Int {
        Pow::pow(x, self.m) - &self.k
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        Pow::pow(x, self.m) - Rat::from_integer(self.k.clone())
    }
}

impl fmt::Display for PowerMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.k.is_negative() { '+' } else { '-' };
        write!(f, "x^{} {} {}", self.m, sign, self.k.abs())
    }
}

/// `x ↦ a·x² + b·x + c` with `a ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadMap {
    a: Int,
    b: Int,
    c: Int,
}

impl QuadMap {
    pub fn new(a: impl Into<Int>, b: impl Into<Int>, c: impl Into<Int>) -> Result<QuadMap> {
        let a = a.into();
        if a.is_zero() {
            return domain("quadratic map needs a != 0");
        }
        Ok(QuadMap {
            a,
            b: b.into(),
            c: c.into(),
        })
    }

    pub fn a(&self) -> &Int {
        &self.a
    }

    pub fn b(&self) -> &Int {
        &self.b
    }

    pub fn c(&self) -> &Int {
        &self.c
    }

    pub fn eval(&self, x: &Int) -> Int {
        &self.a * x * x + &self.b * x + &self.c
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let a = Rat::from_integer(self.a.clone());
        let b = Rat::from_integer(self.b.clone());
        let c = Rat::from_integer(self.c.clone());
        a * x * x + b * x + c
    }
}

impl fmt::Display for QuadMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |v: &Int| {
            if v.is_negative() {
                format!(" - {}", v.abs())
            } else {
                format!(" + {v}")
            }
        };
        write!(f, "{}x^2{}x{}", self.a, term(&self.b), term(&self.c))
    }
}

/// Either integer map family, for code that iterates without caring which.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntegerMap {
    Power(PowerMap),
    Quad(QuadMap),
}

impl IntegerMap {
    pub fn eval(&self, x: &Int) -> Int {
        match self {
            IntegerMap::Power(p) => p.eval(x),
            IntegerMap::Quad(q) => q.eval(x),
        }
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        match self {
            IntegerMap::Power(p) => p.eval_rat(x),
            IntegerMap::Quad(q) => q.eval_rat(x),
        }
    }
}

impl From<PowerMap> for IntegerMap {
    fn from(p: PowerMap) -> Self {
        IntegerMap::Power(p)
    }
}

impl From<QuadMap> for IntegerMap {
    fn from(q: QuadMap) -> Self {
        IntegerMap::Quad(q)
    }
}

impl fmt::Display for IntegerMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegerMap::Power(p) => p.fmt(f),
            IntegerMap::Quad(q) => q.fmt(f),
        }
    }
}

/// Parses `p/q`, `-p/q` or a plain integer into a canonical rational.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = Int::from_str(num.trim()).map_err(|_| bad())?;
    let den = Int::from_str(den.trim()).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// `a_0 + a_1 x + … + a_m x^m` with rational coefficients and `a_m ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rat>,
}

impl RationalPoly {
    /// Coefficients in ascending order of degree.
    pub fn new(coeffs: Vec<Rat>) -> Result<RationalPoly> {
        match coeffs.last() {
            None => domain("polynomial needs at least one coefficient"),
            Some(lead) if lead.is_zero() && coeffs.len() > 1 => {
                domain("leading coefficient must be nonzero")
            }
            Some(_) => Ok(RationalPoly { coeffs }),
        }
    }

    pub fn parse(literals: &[impl AsRef<str>]) -> Result<RationalPoly> {
        let coeffs = literals
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        RationalPoly::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    /// Same value as [`eval`](Self::eval) at an integer point, computed over
    /// a common denominator so only one reduction happens.
    pub fn eval_int(&self, x: &Int) -> Rat {
        let den = self
            .coeffs
            .iter()
            .fold(Int::one(), |acc, c| acc.lcm(c.denom()));
        let num = self.coeffs.iter().rev().fold(Int::zero(), |acc, c| {
            acc * x + c.numer() * (&den / c.denom())
        });
        Rat::new(num, den)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "({mag})x")?,
                _ => write!(f, "({mag})x^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// The affine change of variables `r = scale·s + offset` carrying orbits of an
/// integer quadratic onto orbits of `x² - q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjugacy {
    pub scale: Rat,
    pub offset: Rat,
    pub q: Rat,
}

impl Conjugacy {
    pub fn push_forward(&self, s: &Rat) -> Rat {
        &self.scale * s + &self.offset
    }

    pub fn pull_back(&self, r: &Rat) -> Rat {
        (r - &self.offset) / &self.scale
    }

    /// The normal form `x² - q`.
    pub fn translation(&self, r: &Rat) -> Rat {
        r * r - &self.q
    }
}

/// `Q(x) = ax² + bx + c` is conjugate to `x² - q` with
/// `q = b(b-2)/4 - ac` through `r = a·s + b/2`.
pub fn conjugacy_of_quad(quad: &QuadMap) -> Conjugacy {
    let a = Rat::from_integer(quad.a.clone());
    let b = Rat::from_integer(quad.b.clone());
    let two = Rat::from_integer(Int::from(2));
    let four = Rat::from_integer(Int::from(4));
    let q = &b * (&b - &two) / four - &a * Rat::from_integer(quad.c.clone());
    Conjugacy {
        scale: a,
        offset: b / two,
        q,
    }
}

/// A quadratic in vertex form `a(x + b)² + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexQuadratic {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl VertexQuadratic {
    pub fn new(a: Rat, b: Rat, c: Rat) -> VertexQuadratic {
        VertexQuadratic { a, b, c }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let shifted = x + &self.b;
        &self.a * &shifted * &shifted + &self.c
    }
}

/// `h(x) = alpha·x + beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub alpha: Rat,
    pub beta: Rat,
}

impl AffineMap {
    pub fn eval(&self, x: &Rat) -> Rat {
        &self.alpha * x + &self.beta
    }
}

/// Finds `h` with `h ∘ f1 = f2 ∘ h`, when `a1(b1 + c1) = a2(b2 + c2)`.
///
/// The linear coefficient is forced to `a1/a2` and the shift to
/// `(a1·b1 - a2·b2)/a2`; the remaining coefficient identity is the stated
/// condition.
pub fn general_conjugacy(f1: &VertexQuadratic, f2: &VertexQuadratic) -> Result<Option<AffineMap>> {
    if f1.a.is_zero() || f2.a.is_zero() {
        return domain("conjugacy needs nonzero leading coefficients");
    }
    if &f1.a * (&f1.b + &f1.c) != &f2.a * (&f2.b + &f2.c) {
        return Ok(None);
    }
    Ok(Some(AffineMap {
        alpha: &f1.a / &f2.a,
        beta: (&f1.a * &f1.b - &f2.a * &f2.b) / &f2.a,
    }))
}

/// Outcome of [`lattice_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCert {
    /// `lcm` of the denominators of `a_2 … a_m`.
    pub l: Int,
    pub holds: bool,
    pub reason: String,
}

/// Tests whether a rational polynomial maps `lZ` into itself, where `l` is
/// the lcm of the denominators of the coefficients of degree ≥ 2. The
/// sufficient condition is `a_1 ∈ Z` and `a_0 / l ∈ Z`.
pub fn lattice_check(poly: &RationalPoly) -> Result<LatticeCert> {
    if poly.degree() < 2 {
        return domain(format!(
            "lattice check needs degree >= 2, got {}",
            poly.degree()
        ));
    }
    let coeffs = poly.coeffs();
    let l = coeffs[2..]
        .iter()
        .fold(Int::one(), |acc, c| acc.lcm(c.denom()));
    let a1 = &coeffs[1];
    let a0_over_l = &coeffs[0] / Rat::from_integer(l.clone());
    let (holds, reason) = if !a1.is_integer() {
        (false, format!("linear coefficient {a1} is not an integer"))
    } else if !a0_over_l.is_integer() {
        (
            false,
            format!("constant term {} is not divisible by l = {l}", coeffs[0]),
        )
    } else {
        (true, format!("maps {l}Z into itself"))
    };
    Ok(LatticeCert { l, holds, reason })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(int(n), int(d))
    }

    fn ri(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(PowerMap::new(2, 3).unwrap().eval(&int(1)), int(-2));
        assert_eq!(QuadMap::new(1, 1, -2).unwrap().eval(&int(-2)), int(0));
        assert_eq!(PowerMap::new(4, 2).unwrap().eval(&int(0)), int(-2));
    }

    #[test]
    fn constructors_reject_degenerate_maps() {
        assert!(PowerMap::new(0, 3).is_err());
        assert!(QuadMap::new(0, 1, 1).is_err());
        assert!(RationalPoly::new(vec![ri(1), ri(0)]).is_err());
        assert!(RationalPoly::new(vec![]).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(PowerMap::new(2, 7).unwrap().to_string(), "x^2 - 7");
        assert_eq!(PowerMap::new(3, -4).unwrap().to_string(), "x^3 + 4");
        assert_eq!(QuadMap::new(1, 1, -2).unwrap().to_string(), "1x^2 + 1x - 2");
        let p = RationalPoly::parse(&["2", "1", "1/2"]).unwrap();
        assert_eq!(p.to_string(), "(1/2)x^2 + (1)x + 2");
    }

    #[test]
    fn conjugacy_examples() {
        let c = conjugacy_of_quad(&QuadMap::new(1, 0, -5).unwrap());
        assert_eq!(c.q, ri(5));
        assert_eq!(c.push_forward(&ri(5)), ri(5));

        let c = conjugacy_of_quad(&QuadMap::new(1, 2, -9).unwrap());
        assert_eq!(c.q, ri(9));

        let c = conjugacy_of_quad(&QuadMap::new(1, 1, -2).unwrap());
        // (1·(-1))/4 + 2
        assert_eq!(c.q, rat(-1, 4) + ri(2));
        assert_eq!(c.q, rat(7, 4));
        assert_eq!(c.push_forward(&ri(-2)), rat(-3, 2));
        assert_eq!(c.pull_back(&rat(-3, 2)), ri(-2));
    }

    #[test]
    fn four_q_is_integral_and_q_integral_iff_b_even() {
        for a in [-3i64, -1, 1, 2, 5] {
            for b in -7i64..=7 {
                for c in [-11i64, -1, 0, 4] {
                    let conj = conjugacy_of_quad(&QuadMap::new(a, b, c).unwrap());
                    assert!((&conj.q * ri(4)).is_integer());
                    assert_eq!(conj.q.is_integer(), b % 2 == 0, "a={a} b={b} c={c}");
                }
            }
        }
    }

    /// Independent check: evaluate both sides of `h ∘ f1 = f2 ∘ h` at
    /// several rational points.
    fn commutes(h: &AffineMap, f1: &VertexQuadratic, f2: &VertexQuadratic) -> bool {
        [ri(-3), rat(-1, 2), ri(0), rat(2, 7), ri(5)]
            .iter()
            .all(|x| h.eval(&f1.eval(x)) == f2.eval(&h.eval(x)))
    }

    #[test]
    fn general_conjugacy_examples() {
        let f = VertexQuadratic::new(ri(1), ri(0), ri(-2));
        let h = general_conjugacy(&f, &f).unwrap().unwrap();
        assert_eq!(
            h,
            AffineMap {
                alpha: ri(1),
                beta: ri(0)
            }
        );

        let f1 = VertexQuadratic::new(ri(1), rat(1, 2), rat(-9, 4));
        let f2 = VertexQuadratic::new(ri(1), ri(0), rat(-7, 4));
        let h = general_conjugacy(&f1, &f2).unwrap().unwrap();
        assert_eq!(
            h,
            AffineMap {
                alpha: ri(1),
                beta: rat(1, 2)
            }
        );
        assert!(commutes(&h, &f1, &f2));
        // f1 really is x² + x - 2
        let quad = QuadMap::new(1, 1, -2).unwrap();
        for x in -4..=4 {
            assert_eq!(f1.eval(&ri(x)), quad.eval_rat(&ri(x)));
        }

        let g1 = VertexQuadratic::new(ri(1), ri(0), ri(0));
        let g2 = VertexQuadratic::new(ri(1), ri(0), ri(1));
        assert_eq!(general_conjugacy(&g1, &g2).unwrap(), None);

        let zero = VertexQuadratic::new(ri(0), ri(0), ri(1));
        assert!(general_conjugacy(&zero, &g2).is_err());
    }

    #[test]
    fn general_conjugacy_satisfies_coefficient_identities() {
        let cases = [
            (ri(2), ri(0), ri(0), ri(1), ri(0), ri(0)),
            (ri(3), rat(1, 3), ri(1), ri(1), ri(2), ri(2)),
            (rat(-1, 2), ri(4), ri(-2), ri(1), ri(0), ri(-1)),
        ];
        for (a1, b1, c1, a2, b2, c2) in cases {
            let f1 = VertexQuadratic::new(a1.clone(), b1.clone(), c1.clone());
            let f2 = VertexQuadratic::new(a2.clone(), b2.clone(), c2.clone());
            let h = general_conjugacy(&f1, &f2)
                .unwrap()
                .expect("condition holds");
            assert_eq!(&h.alpha * &a1, &a2 * &h.alpha * &h.alpha);
            assert_eq!(b1, (&b2 + &h.beta) / &h.alpha);
            assert_eq!(&h.alpha * &c1 + &h.beta, c2);
            assert!(commutes(&h, &f1, &f2));
        }
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("7").unwrap(), ri(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn lattice_examples() {
        let p = RationalPoly::parse(&["2", "1", "1/2"]).unwrap();
        let cert = lattice_check(&p).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.l, int(2));
        for x in [-4, -2, 0, 2, 4] {
            let y = p.eval(&ri(x));
            assert!(y.is_integer() && y.to_integer().is_even(), "P({x}) = {y}");
        }
        assert_eq!(p.eval(&ri(2)), ri(6));

        let cert = lattice_check(&RationalPoly::parse(&["-5", "0", "1"]).unwrap()).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.l, int(1));

        let p = RationalPoly::parse(&["1", "1", "1/2"]).unwrap();
        let cert = lattice_check(&p).unwrap();
        assert!(!cert.holds);
        assert_eq!(p.eval(&ri(2)), ri(5));

        let cert = lattice_check(&RationalPoly::parse(&["0", "1/3", "1"]).unwrap()).unwrap();
        assert!(!cert.holds);

        assert!(lattice_check(&RationalPoly::parse(&["1", "2"]).unwrap()).is_err());
    }

    #[test]
    fn lattice_orbits_stay_in_ideal() {
        let polys = [
            vec!["2", "1", "1/2"],
            vec!["6", "-1", "1/2", "1/3"],
            vec!["0", "3", "5/4", "0", "-1/2"],
            vec!["-12", "2", "7/6"],
        ];
        for lits in polys {
            let p = RationalPoly::parse(&lits).unwrap();
            let cert = lattice_check(&p).unwrap();
            assert!(cert.holds, "{p}");
            let l = Rat::from_integer(cert.l.clone());
            for t in [-2i64, -1, 0, 1] {
                let mut x = &l * ri(t);
                for _ in 0..6 {
                    x = p.eval(&x);
                    assert!((&x / &l).is_integer(), "{p}: left lZ at {x}");
                }
            }
        }
    }
}
