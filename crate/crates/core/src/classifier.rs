//! Complete periodic-orbit answers for `x^m - k` and `ax² + bx + c`, decided
//! with exact arithmetic, together with the window computations on `[γ, β]`
//! that the answers rest on.
//!
//! Every answer is re-verified by substitution before it is returned.
//!
//! Two facts are reported differently from how a quick reading of the
//! literature might suggest:
//!
//! * For every even `m ≥ 4` the map `x^m - 1` has the 2-cycle `{-1, 0}`. It is
//!   reported as a genuine cycle.
//! * Orbits that are eventually periodic but not periodic (e.g. `0 → -2 → 2`
//!   under `x² - 2`) are not cycles and are not listed; per-seed behaviour is
//!   available from [`crate::oracle::iterate_with_escape`].

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::maps::{conjugacy_of_quad, IntegerMap, PowerMap, QuadMap};
use crate::numeric::{
    approx_root, compare_to_gamma, floor_beta, iroot, perfect_square_root, rat_compare_to_beta,
    rat_compare_to_gamma, DecimalApprox, Int, QuadSurd, Rat, RootSpec,
};

/// A periodic orbit stored in canonical rotation (smallest point first).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    points: Vec<Int>,
}

impl Cycle {
    /// Builds a cycle from consecutive orbit points, rotating to canonical
    /// form. Points must be pairwise distinct.
    pub fn new(mut points: Vec<Int>) -> Result<Cycle> {
        if points.is_empty() {
            return domain("a cycle needs at least one point");
        }
        let mut sorted = points.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != points.len() {
            return domain("cycle points must be pairwise distinct");
        }
        let start = points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        points.rotate_left(start);
        Ok(Cycle { points })
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Int] {
        &self.points
    }

    /// Checks `map(points[i]) = points[i + 1 mod period]`.
    pub fn verify(&self, map: &IntegerMap) -> bool {
        let n = self.points.len();
        (0..n).all(|i| map.eval(&self.points[i]) == self.points[(i + 1) % n])
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// What integer orbits that are not periodic do.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Behavior {
    DivergesToPlusInf,
    DivergesToMinusInf,
    /// To `+∞` above the real fixed point, to `-∞` below it.
    DivergesSignSplit,
    AllSeedsFixed,
}

impl Behavior {
    pub fn as_str(&self) -> &'static str {
        match self {
            Behavior::DivergesToPlusInf => "diverges_to_plus_inf",
            Behavior::DivergesToMinusInf => "diverges_to_minus_inf",
            Behavior::DivergesSignSplit => "diverges_sign_split",
            Behavior::AllSeedsFixed => "all_seeds_fixed",
        }
    }

    pub fn parse(s: &str) -> Option<Behavior> {
        [
            Behavior::DivergesToPlusInf,
            Behavior::DivergesToMinusInf,
            Behavior::DivergesSignSplit,
            Behavior::AllSeedsFixed,
        ]
        .into_iter()
        .find(|b| b.as_str() == s)
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The arithmetic condition that produced a classification.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    /// `k` (or `q`) equals `j(j+1)`.
    Pronic { j: Int },
    /// `k` (or `q`) equals `j(j+1) + 1`.
    PronicPlusOne { j: Int },
    /// Odd `b`: `((b-1)/2)² - ac = j²`.
    OddSquare { j: Int },
    /// Odd `b`: `((b-1)/2)² - ac = j² + 1`.
    OddSquarePlusOne { j: Int },
    /// `k = j^m - j` for each listed fixed point `j`.
    FixedPointEquation,
    /// Even `m ≥ 4`, `k = 1`: the cycle `{-1, 0}`.
    UnitShiftTwoCycle,
    /// `m = 1`, `k = 0`.
    IdentityMap,
}

impl Witness {
    pub fn rule(&self) -> &'static str {
        match self {
            Witness::Pronic { .. } => "pronic",
            Witness::PronicPlusOne { .. } => "pronic_plus_one",
            Witness::OddSquare { .. } => "odd_b_square",
            Witness::OddSquarePlusOne { .. } => "odd_b_square_plus_one",
            Witness::FixedPointEquation => "fixed_point_equation",
            Witness::UnitShiftTwoCycle => "unit_shift_two_cycle",
            Witness::IdentityMap => "identity_map",
        }
    }

    pub fn j(&self) -> Option<&Int> {
        match self {
            Witness::Pronic { j }
            | Witness::PronicPlusOne { j }
            | Witness::OddSquare { j }
            | Witness::OddSquarePlusOne { j } => Some(j),
            _ => None,
        }
    }

    /// Inverse of [`rule`](Self::rule) plus [`j`](Self::j).
    pub fn from_parts(rule: &str, j: Option<Int>) -> Option<Witness> {
        Some(match (rule, j) {
            ("pronic", Some(j)) => Witness::Pronic { j },
            ("pronic_plus_one", Some(j)) => Witness::PronicPlusOne { j },
            ("odd_b_square", Some(j)) => Witness::OddSquare { j },
            ("odd_b_square_plus_one", Some(j)) => Witness::OddSquarePlusOne { j },
            ("fixed_point_equation", None) => Witness::FixedPointEquation,
            ("unit_shift_two_cycle", None) => Witness::UnitShiftTwoCycle,
            ("identity_map", None) => Witness::IdentityMap,
            _ => return None,
        })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.j() {
            Some(j) => write!(f, "{} (j = {j})", self.rule()),
            None => f.write_str(self.rule()),
        }
    }
}

/// All periodic integer orbits of a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClassification {
    pub fixed_points: Vec<Int>,
    pub two_cycles: Vec<Cycle>,
    /// Empty for every classifier answer; only the brute-force oracle can
    /// populate it.
    pub higher_cycles: Vec<Cycle>,
    pub behavior: Behavior,
    pub witness: Option<Witness>,
}

impl OrbitClassification {
    pub fn has_cycles(&self) -> bool {
        !self.fixed_points.is_empty()
            || !self.two_cycles.is_empty()
            || !self.higher_cycles.is_empty()
    }

    /// Same fixed points and cycles, ignoring behaviour and witness.
    pub fn same_cycles(&self, other: &OrbitClassification) -> bool {
        self.fixed_points == other.fixed_points
            && self.two_cycles == other.two_cycles
            && self.higher_cycles == other.higher_cycles
    }

    fn normalize(&mut self) {
        self.fixed_points.sort();
        self.fixed_points.dedup();
        self.two_cycles.sort();
        self.two_cycles.dedup();
        self.higher_cycles.sort();
        self.higher_cycles.dedup();
    }

    /// Substitution check of every listed point and cycle.
    pub fn verify(&self, map: &IntegerMap) -> Result<()> {
        for p in &self.fixed_points {
            if map.eval(p) != *p {
                return Err(Error::Unsound(format!("{p} is not fixed by {map}")));
            }
        }
        for c in self.two_cycles.iter().chain(&self.higher_cycles) {
            if !c.verify(map) {
                return Err(Error::Unsound(format!("{c} is not a cycle of {map}")));
            }
        }
        if self.two_cycles.iter().any(|c| c.period() != 2)
            || self.higher_cycles.iter().any(|c| c.period() <= 2)
        {
            return Err(Error::Unsound("cycle listed under the wrong period".into()));
        }
        Ok(())
    }
}

/// Fate of integer orbits that are not periodic, from the leading term.
pub fn asymptotic_behavior(map: &IntegerMap) -> Behavior {
    match map {
        IntegerMap::Power(p) if p.m() == 1 => match p.k().sign() {
            num_bigint::Sign::NoSign => Behavior::AllSeedsFixed,
            num_bigint::Sign::Plus => Behavior::DivergesToMinusInf,
            num_bigint::Sign::Minus => Behavior::DivergesToPlusInf,
        },
        IntegerMap::Power(p) if p.m() % 2 == 1 => Behavior::DivergesSignSplit,
        IntegerMap::Power(_) => Behavior::DivergesToPlusInf,
        IntegerMap::Quad(q) if q.a().is_positive() => Behavior::DivergesToPlusInf,
        IntegerMap::Quad(_) => Behavior::DivergesToMinusInf,
    }
}

/// Smallest `x` in `[lo, hi]` with `g(x) = target` for increasing `g`.
fn search_increasing(
    target: &Int,
    mut lo: Int,
    mut hi: Int,
    g: impl Fn(&Int) -> Int,
) -> Option<Int> {
    while lo <= hi {
        let mid: Int = (&lo + &hi) >> 1;
        match g(&mid).cmp(target) {
            Ordering::Equal => return Some(mid),
            Ordering::Less => lo = mid + 1u32,
            Ordering::Greater => hi = mid - 1u32,
        }
    }
    None
}

/// All integers `j` with `j^m - j = k`.
///
/// `j^m - j` is strictly monotone on `j ≥ 1` and on `j ≤ -1`, so each branch
/// is a binary search; `{-1, 0, 1}` are checked directly. For `m = 1` the
/// equation is `0 = k`, which has no isolated solutions.
pub fn integer_fixed_points_power(f: &PowerMap) -> Vec<Int> {
    let m = f.m();
    let k = f.k();
    if m == 1 {
        return Vec::new();
    }
    let g = |j: &Int| -> Int { Pow::pow(j, m) - j };
    let mut found: Vec<Int> = [-1i32, 0, 1]
        .into_iter()
        .map(Int::from)
        .filter(|j| g(j) == *k)
        .collect();
    let hi = iroot(&k.abs(), m).expect("nonnegative") + 2u32;
    let two = Int::from(2);
    if k.is_positive() {
        found.extend(search_increasing(k, two.clone(), hi.clone(), g));
    }
    if m.is_multiple_of(2) {
        // j = -t: t^m + t, increasing and positive
        if k.is_positive() {
            let neg = search_increasing(k, two, hi, |t: &Int| Pow::pow(t, m) + t);
            found.extend(neg.map(|t| -t));
        }
    } else if k.is_negative() {
        // j = -t: -(t^m - t), so solve t^m - t = -k
        let target = -k;
        let neg = search_increasing(&target, two, hi, |t: &Int| Pow::pow(t, m) - t);
        found.extend(neg.map(|t| -t));
    }
    found.sort();
    found.dedup();
    found
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PronicKind {
    Pronic,
    PronicPlusOne,
}

/// The unique `j ≥ 0` with `k = j(j+1)` or `k = j(j+1) + 1`.
pub fn solve_pronic(k: &Int) -> Option<(Int, PronicKind)> {
    if k.is_negative() {
        return None;
    }
    let root = (k * 4u32 + 1u32).sqrt();
    let j0: Int = (root - 1u32) >> 1;
    let lower = if j0.is_positive() {
        &j0 - 1u32
    } else {
        j0.clone()
    };
    let mut j = lower;
    while j <= j0 {
        let pronic = &j * (&j + 1u32);
        if pronic == *k {
            return Some((j, PronicKind::Pronic));
        }
        if pronic + 1u32 == *k {
            return Some((j, PronicKind::PronicPlusOne));
        }
        j += 1u32;
    }
    None
}

fn two_cycle_of(x: Int, y: Int) -> Cycle {
    Cycle::new(vec![x, y]).expect("distinct points")
}

/// Classifies every periodic integer orbit of `x^m - k`.
pub fn classify_power(f: &PowerMap) -> Result<OrbitClassification> {
    let map = IntegerMap::Power(f.clone());
    let m = f.m();
    let k = f.k();
    let mut out = OrbitClassification {
        fixed_points: Vec::new(),
        two_cycles: Vec::new(),
        higher_cycles: Vec::new(),
        behavior: asymptotic_behavior(&map),
        witness: None,
    };
    match m {
        0 => return domain("power map degree must be at least 1"),
        1 => {
            if k.is_zero() {
                out.witness = Some(Witness::IdentityMap);
            }
        }
        2 => match solve_pronic(k) {
            Some((j, PronicKind::Pronic)) => {
                out.fixed_points = vec![-&j, &j + 1u32];
                out.witness = Some(Witness::Pronic { j });
            }
            Some((j, PronicKind::PronicPlusOne)) => {
                out.two_cycles = vec![two_cycle_of(-(&j + 1u32), j.clone())];
                out.witness = Some(Witness::PronicPlusOne { j });
            }
            None => {}
        },
        _ => {
            out.fixed_points = integer_fixed_points_power(f);
            if !out.fixed_points.is_empty() {
                out.witness = Some(Witness::FixedPointEquation);
            }
            if m.is_multiple_of(2) && k.is_one() {
                out.two_cycles = vec![two_cycle_of(Int::from(-1), Int::zero())];
                out.witness = Some(Witness::UnitShiftTwoCycle);
            }
        }
    }
    out.normalize();
    out.verify(&map)?;
    Ok(out)
}

fn integral(x: Rat) -> Option<Int> {
    x.is_integer().then(|| x.to_integer())
}

/// Classifies every periodic integer orbit of `ax² + bx + c`.
///
/// The candidates come from the conjugacy with `x² - q`; each is kept only
/// if it is an integer and survives substitution. For even `b`, `q` is an
/// integer and the pronic tests apply to `q` directly. For odd `b` the tests
/// apply to `w = ((b-1)/2)² - ac = q + 1/4`.
pub fn classify_quad(quad: &QuadMap) -> Result<OrbitClassification> {
    let map = IntegerMap::Quad(quad.clone());
    let a = Rat::from_integer(quad.a().clone());
    let b = Rat::from_integer(quad.b().clone());
    let one = Rat::one();
    let two = Rat::from_integer(Int::from(2));
    let two_a = &two * &a;
    let mut out = OrbitClassification {
        fixed_points: Vec::new(),
        two_cycles: Vec::new(),
        higher_cycles: Vec::new(),
        behavior: asymptotic_behavior(&map),
        witness: None,
    };

    let mut fixed_candidates: Vec<Rat> = Vec::new();
    let mut cycle_candidates: Vec<(Rat, Rat)> = Vec::new();

    if quad.b().is_even() {
        let q = conjugacy_of_quad(quad).q.to_integer();
        match solve_pronic(&q) {
            Some((j, PronicKind::Pronic)) => {
                let jr = Rat::from_integer(j.clone());
                fixed_candidates.push(&jr / &a - (&b - &two) / &two_a);
                fixed_candidates.push(-&jr / &a - &b / &two_a);
                out.witness = Some(Witness::Pronic { j });
            }
            Some((j, PronicKind::PronicPlusOne)) => {
                let jr = Rat::from_integer(j.clone());
                cycle_candidates.push((&jr / &a - &b / &two_a, -&jr / &a - (&b + &two) / &two_a));
                out.witness = Some(Witness::PronicPlusOne { j });
            }
            None => {}
        }
    } else {
        let half_b_minus_one = (quad.b() - 1u32) / 2u32;
        let w = &half_b_minus_one * &half_b_minus_one - quad.a() * quad.c();
        if let Some(j) = perfect_square_root(&w) {
            let jr = Rat::from_integer(j.clone());
            fixed_candidates.push(&jr / &a - (&b - &one) / &two_a);
            fixed_candidates.push(-&jr / &a - (&b - &one) / &two_a);
            out.witness = Some(Witness::OddSquare { j });
        }
        if let Some(j) = perfect_square_root(&(&w - 1u32)) {
            let jr = Rat::from_integer(j.clone());
            cycle_candidates.push((
                -&jr / &a - (&b + &one) / &two_a,
                &jr / &a - (&b + &one) / &two_a,
            ));
            if out.witness.is_none() {
                out.witness = Some(Witness::OddSquarePlusOne { j });
            }
        }
    }

    for cand in fixed_candidates {
        if let Some(p) = integral(cand) {
            if quad.eval(&p) == p {
                out.fixed_points.push(p);
            }
        }
    }
    for (x, y) in cycle_candidates {
        if let (Some(x), Some(y)) = (integral(x), integral(y)) {
            // j = 0 with w = 1 collapses onto a fixed point
            if x != y && quad.eval(&x) == y && quad.eval(&y) == x {
                out.two_cycles.push(two_cycle_of(x, y));
            }
        }
    }
    out.normalize();
    out.verify(&map)?;
    Ok(out)
}

/// Dispatches on the map family.
pub fn classify(map: &IntegerMap) -> Result<OrbitClassification> {
    match map {
        IntegerMap::Power(p) => classify_power(p),
        IntegerMap::Quad(q) => classify_quad(q),
    }
}

/// Integers `n ≥ 0` with `γ ≤ n ≤ β` for `x^m - k`, `m` even, `k ≥ 2`.
pub fn interval_integers(m: u32, k: &Int) -> Result<Vec<Int>> {
    if m < 2 || m % 2 == 1 {
        return domain(format!("interval_integers needs even m >= 2, got {m}"));
    }
    if *k < Int::from(2) {
        return domain(format!("interval_integers needs k >= 2, got {k}"));
    }
    let mut n = floor_beta(m, k)?;
    let mut out = Vec::new();
    while !n.is_negative() && compare_to_gamma(&n, m, k)? != Ordering::Less {
        out.push(n.clone());
        n -= 1u32;
    }
    out.reverse();
    Ok(out)
}

/// Result of [`beta_gamma_gap_checks`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub k_max: Int,
    pub checked: u64,
    pub first_violation: Option<(Int, &'static str)>,
}

impl GapReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `β - 2 ≤ γ < β - 1` for `x² - k` at every `k ∈ [2, k_max]`.
///
/// `β = (1 + √(1+4k))/2` is handled as an exact element of `Q(√(1+4k))`, and
/// the statements about `γ = √(k - β) ≥ 0` are squared out after checking
/// the signs that make squaring valid.
pub fn beta_gamma_gap_checks(k_max: &Int) -> GapReport {
    let mut report = GapReport {
        k_max: k_max.clone(),
        checked: 0,
        first_violation: None,
    };
    let mut k = Int::from(2);
    while k <= *k_max {
        if let Some(statement) = gap_violation(&k) {
            report.first_violation = Some((k, statement));
            return report;
        }
        report.checked += 1;
        k += 1u32;
    }
    report
}

fn gap_violation(k: &Int) -> Option<&'static str> {
    let beta = QuadSurd::beta(k);
    let d = beta.radicand.clone();
    let c = |v: i64| QuadSurd::from_rat(Rat::from_integer(Int::from(v)), &d);
    let k_s = QuadSurd::from_rat(Rat::from_integer(k.clone()), &d);
    let gamma_sq = &k_s - &beta;
    if gamma_sq.signum() == Ordering::Less {
        return Some("gamma is real");
    }
    // γ ≥ β - 2
    let b2 = &beta - &c(2);
    if b2.signum() != Ordering::Less && (&gamma_sq - &(&b2 * &b2)).signum() == Ordering::Less {
        return Some("gamma >= beta - 2");
    }
    // γ < β - 1
    let b1 = &beta - &c(1);
    if b1.signum() != Ordering::Greater || (&gamma_sq - &(&b1 * &b1)).signum() != Ordering::Less {
        return Some("gamma < beta - 1");
    }
    None
}

/// `(lower, upper)` bounds on `β - γ` for `x^m - k` from certified decimals.
pub fn certified_gap(m: u32, k: &Int, digits: u32) -> Result<(Rat, Rat)> {
    let beta = approx_root(&RootSpec::Beta { m, k: k.clone() }, digits)?;
    let gamma = approx_root(&RootSpec::Gamma { m, k: k.clone() }, digits)?;
    Ok((beta.lower() - gamma.upper(), beta.upper() - gamma.lower()))
}

/// Whether `β - γ` for `x² - k` provably does not increase along `ks`
/// (sorted ascending), and exceeds 1 at each sample.
///
/// Consecutive samples pass when the upper bound at the later `k` is below
/// the lower bound at the earlier one, i.e. the decimal estimates are
/// separated by more than twice the error bound.
pub fn monotone_gap_check(ks: &[Int], digits: u32) -> Result<Vec<(Int, Rat, Rat, bool)>> {
    let mut rows = Vec::with_capacity(ks.len());
    let mut prev_lower: Option<Rat> = None;
    for k in ks {
        let (lower, upper) = certified_gap(2, k, digits)?;
        let gap_above_one = gap_violation(k).is_none();
        let decreasing = prev_lower.as_ref().is_none_or(|p| upper < *p);
        prev_lower = Some(lower.clone());
        rows.push((k.clone(), lower, upper, decreasing && gap_above_one));
    }
    Ok(rows)
}

/// Parameter family for [`bounds_profile`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Power {
        m: u32,
        k: Int,
    },
    /// `x² - q` with rational `q`.
    Translation {
        q: Rat,
    },
}

/// Exact and approximate data about `β`, `γ` (or `B_q`, `C_q`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsProfile {
    pub family: Family,
    pub beta_floor: Int,
    /// Lattice points `n ≥ 0` with `γ ≤ n ≤ β`: integers, or half-integers
    /// when `q ∈ Z - 1/4`.
    pub interval_points: Vec<Rat>,
    pub beta_approx: DecimalApprox,
    /// Absent when `γ` is not real.
    pub gamma_approx: Option<DecimalApprox>,
    /// `(α, β)` or `(A_q, B_q)` when both are rational.
    pub fixed_point_pair: Option<(Rat, Rat)>,
    /// The real 2-cycle, when its points are rational.
    pub two_cycle: Option<(Rat, Rat)>,
}

fn rat_sqrt(x: &Rat) -> Option<Rat> {
    let n = perfect_square_root(x.numer())?;
    let d = perfect_square_root(x.denom())?;
    Some(Rat::new(n, d))
}

/// Lattice points `offset + n ≥ 0` inside `[γ, β]`.
fn window_points(m: u32, shift: &Rat, offset: &Rat, beta_floor: &Rat) -> Result<Vec<Rat>> {
    if rat_compare_to_beta(shift, m, shift)? == Ordering::Less {
        return Ok(Vec::new());
    }
    let mut x = (beta_floor - offset).floor() + offset + Rat::one();
    while !x.is_negative() && rat_compare_to_beta(&x, m, shift)? == Ordering::Greater {
        x -= Rat::one();
    }
    let mut out = Vec::new();
    while !x.is_negative() && rat_compare_to_gamma(&x, m, shift)? != Ordering::Less {
        out.push(x.clone());
        x -= Rat::one();
    }
    out.reverse();
    Ok(out)
}

/// Profiles the window `[γ, β]` for a power map or a translation `x² - q`.
pub fn bounds_profile(family: &Family, digits: u32) -> Result<BoundsProfile> {
    let (m, shift) = match family {
        Family::Power { m, k } => (*m, Rat::from_integer(k.clone())),
        Family::Translation { q } => (2, q.clone()),
    };
    if m < 2 {
        return domain("bounds need m >= 2");
    }
    let four = Rat::from_integer(Int::from(4));
    if m == 2 && (&four * &shift + Rat::one()).is_negative() {
        return domain(format!("fixed points of x^2 - ({shift}) are complex"));
    }
    if m > 2 && shift.is_negative() {
        return domain(format!("x^{m} - ({shift}) has no positive fixed point"));
    }
    let (beta_spec, gamma_spec) = match family {
        Family::Power { m, k } => (
            RootSpec::Beta {
                m: *m,
                k: k.clone(),
            },
            RootSpec::Gamma {
                m: *m,
                k: k.clone(),
            },
        ),
        Family::Translation { q } => (RootSpec::Bq(q.clone()), RootSpec::Cq(q.clone())),
    };
    let beta_approx = approx_root(&beta_spec, digits)?;
    let gamma_real = rat_compare_to_beta(&shift, m, &shift)? != Ordering::Less;
    let gamma_approx = if gamma_real {
        Some(approx_root(&gamma_spec, digits)?)
    } else {
        None
    };
    let beta_floor = beta_approx.lower().floor().to_integer();

    let interval_points = match family {
        Family::Power { m, k } if m % 2 == 0 && *k >= Int::from(2) => interval_integers(*m, k)?
            .into_iter()
            .map(Rat::from_integer)
            .collect(),
        _ => {
            let quarter = Rat::new(Int::one(), Int::from(4));
            let offset = if shift.is_integer() {
                Some(Rat::zero())
            } else if (&shift + &quarter).is_integer() {
                Some(Rat::new(Int::one(), Int::from(2)))
            } else {
                None
            };
            match offset {
                Some(off) => window_points(m, &shift, &off, beta_approx.lower())?,
                None => Vec::new(),
            }
        }
    };

    let (fixed_point_pair, two_cycle) = if m == 2 {
        let half = Rat::new(Int::one(), Int::from(2));
        let pair = rat_sqrt(&(&four * &shift + Rat::one())).map(|r| {
            (
                &half - &r / Rat::from_integer(Int::from(2)),
                &half + &r / Rat::from_integer(Int::from(2)),
            )
        });
        // 2-cycles of x² - s solve x² + x + 1 - s = 0
        let disc = &four * &shift - Rat::from_integer(Int::from(3));
        let cycle = if disc.is_positive() {
            rat_sqrt(&disc).map(|r| {
                let two = Rat::from_integer(Int::from(2));
                ((-&half) - &r / &two, (-&half) + &r / &two)
            })
        } else {
            None
        };
        (pair, cycle)
    } else {
        let power = PowerMap::new(m, shift.to_integer())?;
        let roots = integer_fixed_points_power(&power);
        let alpha = roots.iter().find(|j| j.is_negative()).cloned();
        let beta = roots.iter().find(|j| j.is_positive()).cloned();
        let pair = alpha
            .zip(beta)
            .map(|(a, b)| (Rat::from_integer(a), Rat::from_integer(b)));
        let cycle =
            (m % 2 == 0 && shift.is_one()).then(|| (Rat::from_integer(Int::from(-1)), Rat::zero()));
        (pair, cycle)
    };

    let eval = |x: &Rat| Pow::pow(x, m) - &shift;
    if let Some((a, b)) = &fixed_point_pair {
        if eval(a) != *a || eval(b) != *b {
            return Err(Error::Unsound(format!(
                "fixed-point pair ({a}, {b}) fails substitution"
            )));
        }
    }
    if let Some((x, y)) = &two_cycle {
        if eval(x) != *y || eval(y) != *x {
            return Err(Error::Unsound(format!(
                "2-cycle ({x}, {y}) fails substitution"
            )));
        }
    }

    Ok(BoundsProfile {
        family: family.clone(),
        beta_floor,
        interval_points,
        beta_approx,
        gamma_approx,
        fixed_point_pair,
        two_cycle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::conjugacy_of_quad;
    use proptest::prelude::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().copied().map(Int::from).collect()
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(int(n), int(d))
    }

    fn power(m: u32, k: i64) -> PowerMap {
        PowerMap::new(m, k).unwrap()
    }

    fn quad(a: i64, b: i64, c: i64) -> QuadMap {
        QuadMap::new(a, b, c).unwrap()
    }

    fn cycle(v: &[i64]) -> Cycle {
        Cycle::new(ints(v)).unwrap()
    }

    #[test]
    fn cycle_canonical_rotation() {
        assert_eq!(cycle(&[1, -2]).points(), ints(&[-2, 1]).as_slice());
        assert_eq!(
            cycle(&[3, 5, -1, 0]).points(),
            ints(&[-1, 0, 3, 5]).as_slice()
        );
        assert!(Cycle::new(vec![]).is_err());
        assert!(Cycle::new(ints(&[1, 2, 1])).is_err());
    }

    #[test]
    fn fixed_point_search_examples() {
        assert_eq!(integer_fixed_points_power(&power(3, 6)), ints(&[2]));
        assert_eq!(integer_fixed_points_power(&power(4, 2)), ints(&[-1]));
        assert_eq!(integer_fixed_points_power(&power(2, 5)), ints(&[]));
        assert_eq!(integer_fixed_points_power(&power(3, 0)), ints(&[-1, 0, 1]));
        assert_eq!(integer_fixed_points_power(&power(4, 0)), ints(&[0, 1]));
        assert_eq!(integer_fixed_points_power(&power(3, -6)), ints(&[-2]));
        assert_eq!(integer_fixed_points_power(&power(1, 0)), ints(&[]));
    }

    /// Brute-force oracle: scan j over a window wide enough to contain every
    /// solution of j^m - j = k.
    fn fixed_point_scan(m: u32, k: i64, radius: i64) -> Vec<Int> {
        (-radius..=radius)
            .map(Int::from)
            .filter(|j| Pow::pow(j, m) - j == int(k))
            .collect()
    }

    #[test]
    fn fixed_point_search_matches_scan() {
        assert_eq!(fixed_point_scan(2, 5, 5), ints(&[]));
        assert_eq!(fixed_point_scan(5, 30, 4), ints(&[2]));
        for m in 2..=7u32 {
            for k in -300i64..=300 {
                assert_eq!(
                    integer_fixed_points_power(&power(m, k)),
                    fixed_point_scan(m, k, 20),
                    "m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn solve_pronic_examples() {
        assert_eq!(solve_pronic(&int(6)), Some((int(2), PronicKind::Pronic)));
        assert_eq!(
            solve_pronic(&int(7)),
            Some((int(2), PronicKind::PronicPlusOne))
        );
        assert_eq!(solve_pronic(&int(8)), None);
        assert_eq!(solve_pronic(&int(0)), Some((int(0), PronicKind::Pronic)));
        assert_eq!(
            solve_pronic(&int(1)),
            Some((int(0), PronicKind::PronicPlusOne))
        );
        assert_eq!(solve_pronic(&int(-3)), None);
    }

    #[test]
    fn solve_pronic_matches_scan() {
        for k in -5i64..2000 {
            let scan = (0..=50i64).find_map(|j| {
                if j * (j + 1) == k {
                    Some((int(j), PronicKind::Pronic))
                } else if j * (j + 1) + 1 == k {
                    Some((int(j), PronicKind::PronicPlusOne))
                } else {
                    None
                }
            });
            assert_eq!(solve_pronic(&int(k)), scan, "k={k}");
        }
    }

    #[test]
    fn classify_power_examples() {
        let c = classify_power(&power(2, 6)).unwrap();
        assert_eq!(c.fixed_points, ints(&[-2, 3]));
        assert!(c.two_cycles.is_empty());
        assert_eq!(c.witness, Some(Witness::Pronic { j: int(2) }));

        let c = classify_power(&power(2, 3)).unwrap();
        assert!(c.fixed_points.is_empty());
        assert_eq!(c.two_cycles, vec![cycle(&[-2, 1])]);

        let c = classify_power(&power(6, 1)).unwrap();
        assert_eq!(c.two_cycles, vec![cycle(&[-1, 0])]);
        assert!(c.fixed_points.is_empty());

        let c = classify_power(&power(5, 30)).unwrap();
        assert_eq!(c.fixed_points, ints(&[2]));
        assert_eq!(c.behavior, Behavior::DivergesSignSplit);

        let c = classify_power(&power(4, 3)).unwrap();
        assert!(!c.has_cycles());
        assert_eq!(c.behavior, Behavior::DivergesToPlusInf);
    }

    #[test]
    fn classify_power_special_cases() {
        let c = classify_power(&power(1, 0)).unwrap();
        assert_eq!(c.behavior, Behavior::AllSeedsFixed);
        assert_eq!(c.witness, Some(Witness::IdentityMap));
        assert_eq!(
            classify_power(&power(1, 3)).unwrap().behavior,
            Behavior::DivergesToMinusInf
        );
        assert_eq!(
            classify_power(&power(1, -3)).unwrap().behavior,
            Behavior::DivergesToPlusInf
        );

        assert_eq!(
            classify_power(&power(2, 0)).unwrap().fixed_points,
            ints(&[0, 1])
        );
        assert_eq!(
            classify_power(&power(2, 1)).unwrap().two_cycles,
            vec![cycle(&[-1, 0])]
        );
        assert_eq!(
            classify_power(&power(2, 2)).unwrap().fixed_points,
            ints(&[-1, 2])
        );
        assert!(!classify_power(&power(2, -4)).unwrap().has_cycles());
        assert!(!classify_power(&power(4, -1)).unwrap().has_cycles());
        assert_eq!(
            classify_power(&power(3, 0)).unwrap().fixed_points,
            ints(&[-1, 0, 1])
        );
        assert_eq!(
            classify_power(&power(4, 0)).unwrap().fixed_points,
            ints(&[0, 1])
        );
    }

    #[test]
    fn m2_trichotomy() {
        for k in -20i64..3000 {
            let c = classify_power(&power(2, k)).unwrap();
            assert!(
                c.fixed_points.is_empty() || c.two_cycles.is_empty(),
                "k={k}"
            );
        }
    }

    #[test]
    fn classify_quad_examples() {
        let c = classify_quad(&quad(1, 2, -6)).unwrap();
        assert_eq!(c.fixed_points, ints(&[-3, 2]));

        let c = classify_quad(&quad(1, 2, -7)).unwrap();
        assert_eq!(c.two_cycles, vec![cycle(&[1, -4])]);

        let c = classify_quad(&quad(-2, 2, 1)).unwrap();
        assert_eq!(c.fixed_points, ints(&[1]));
        assert!(c.two_cycles.is_empty());
        assert_eq!(c.behavior, Behavior::DivergesToMinusInf);

        let c = classify_quad(&quad(1, 1, -1)).unwrap();
        assert_eq!(c.fixed_points, ints(&[-1, 1]));

        let c = classify_quad(&quad(1, 1, -2)).unwrap();
        assert_eq!(c.two_cycles, vec![cycle(&[-2, 0])]);
        assert_eq!(c.witness, Some(Witness::OddSquarePlusOne { j: int(1) }));

        assert!(QuadMap::new(0, 1, 1).is_err());
    }

    #[test]
    fn odd_b_degenerate_cycle_collapses() {
        // w = ((b-1)/2)² - ac = 1 satisfies both j² (j=1) and j²+1 (j=0)
        let c = classify_quad(&quad(1, 1, -1)).unwrap();
        assert!(c.two_cycles.is_empty());
        assert_eq!(c.witness, Some(Witness::OddSquare { j: int(1) }));
        // w = 0: double fixed point
        let c = classify_quad(&quad(1, 1, 0)).unwrap();
        assert_eq!(c.fixed_points, ints(&[0]));
    }

    #[test]
    fn gex1_family() {
        for j in 1i64..40 {
            let c = classify_quad(&quad(1, 2, -j * (j + 1))).unwrap();
            assert_eq!(c.fixed_points, ints(&[-j - 1, j]));
            let c = classify_quad(&quad(1, 2, -j * (j + 1) - 1)).unwrap();
            assert_eq!(c.two_cycles, vec![cycle(&[j - 1, -j - 2])]);
        }
    }

    #[test]
    fn corollary_formulas_match_pull_back() {
        // the explicit candidate formulas are the pull-backs of the cycles of x² - q
        for (a, b, c) in [(1, 2, -7), (-2, 2, 1), (3, 4, -5), (1, 1, -2), (-1, 3, 2)] {
            let qm = quad(a, b, c);
            let conj = conjugacy_of_quad(&qm);
            let cls = classify_quad(&qm).unwrap();
            for p in &cls.fixed_points {
                let r = conj.push_forward(&Rat::from_integer(p.clone()));
                assert_eq!(conj.translation(&r), r);
            }
            for cy in &cls.two_cycles {
                let r0 = conj.push_forward(&Rat::from_integer(cy.points()[0].clone()));
                let r1 = conj.push_forward(&Rat::from_integer(cy.points()[1].clone()));
                assert_eq!(conj.translation(&r0), r1);
                assert_eq!(conj.translation(&r1), r0);
            }
        }
    }

    #[test]
    fn scale_coherence() {
        for k in -30i64..500 {
            assert_eq!(
                classify_power(&power(2, k)).unwrap(),
                classify_quad(&quad(1, 0, -k)).unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn interval_examples() {
        assert_eq!(interval_integers(2, &int(2)).unwrap(), ints(&[0, 1, 2]));
        assert_eq!(interval_integers(2, &int(6)).unwrap(), ints(&[2, 3]));
        assert_eq!(interval_integers(2, &int(4)).unwrap(), ints(&[2]));
        assert_eq!(interval_integers(4, &int(14)).unwrap(), ints(&[2]));
        assert!(interval_integers(3, &int(6)).is_err());
        assert!(interval_integers(2, &int(1)).is_err());
    }

    /// Decimal oracle for `[γ, β]` membership: bisect β and γ on f64-free
    /// scaled integers, then test integer membership with a 10⁻⁶ margin.
    fn interval_oracle(m: u32, k: i64) -> Vec<Int> {
        let six = 6;
        let beta = approx_root(&RootSpec::Beta { m, k: int(k) }, six).unwrap();
        let gamma = approx_root(&RootSpec::Gamma { m, k: int(k) }, six).unwrap();
        let lo = gamma.lower().ceil().to_integer();
        let hi = beta.lower().floor().to_integer();
        let mut out = Vec::new();
        let mut n = lo.max(int(0));
        while n <= hi {
            out.push(n.clone());
            n += 1u32;
        }
        out
    }

    #[test]
    fn interval_matches_decimal_oracle() {
        // exact endpoints (γ = 0, β integral, γ integral) are excluded from the oracle's domain
        for k in 3i64..400 {
            let got = interval_integers(2, &int(k)).unwrap();
            let beta_int =
                solve_pronic(&int(k)).is_some_and(|(_, kind)| kind == PronicKind::Pronic);
            if !beta_int {
                assert_eq!(got, interval_oracle(2, k), "k={k}");
            }
        }
        assert_eq!(interval_oracle(2, 4), ints(&[2]));
    }

    #[test]
    fn interval_sizes_follow_window_lemma() {
        for k in 2i64..3000 {
            let n = interval_integers(2, &int(k)).unwrap().len();
            let expected = if k == 2 {
                3
            } else if solve_pronic(&int(k)).is_some() {
                2
            } else {
                1
            };
            assert_eq!(n, expected, "k={k}");
        }
        for m in [4u32, 6, 8] {
            for k in 4i64..2000 {
                assert!(
                    interval_integers(m, &int(k)).unwrap().len() <= 1,
                    "m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn gap_checks_pass() {
        assert!(beta_gamma_gap_checks(&int(2)).passed());
        let r = beta_gamma_gap_checks(&int(1000));
        assert!(r.passed());
        assert_eq!(r.checked, 999);
    }

    #[test]
    fn gap_checks_agree_with_decimals() {
        // oracle: certified decimal bounds at 10⁻⁹ must sit inside (1, 2]
        for k in (2i64..1000).step_by(37) {
            let (lower, upper) = certified_gap(2, &int(k), 9).unwrap();
            assert!(upper > Rat::from_integer(int(1)), "k={k}");
            assert!(lower <= Rat::from_integer(int(2)), "k={k}");
        }
    }

    #[test]
    fn monotone_gap_spot_checks() {
        let ks = ints(&[2, 3, 10, 50, 100, 1000]);
        let rows = monotone_gap_check(&ks, 9).unwrap();
        assert!(rows.iter().all(|r| r.3));
    }

    #[test]
    fn bounds_profile_examples() {
        let p = bounds_profile(&Family::Power { m: 2, k: int(6) }, 3).unwrap();
        assert_eq!(p.beta_floor, int(3));
        assert_eq!(p.interval_points, vec![rat(2, 1), rat(3, 1)]);
        assert_eq!(p.fixed_point_pair, Some((rat(-2, 1), rat(3, 1))));
        assert_eq!(p.gamma_approx.unwrap().value, "1.732");

        let p = bounds_profile(&Family::Translation { q: rat(15, 4) }, 3).unwrap();
        assert_eq!(p.fixed_point_pair, Some((rat(-3, 2), rat(5, 2))));
        assert_eq!(p.beta_approx.value, "2.500");

        let p = bounds_profile(&Family::Translation { q: rat(19, 4) }, 3).unwrap();
        assert_eq!(p.two_cycle, Some((rat(-5, 2), rat(3, 2))));
        assert_eq!(p.fixed_point_pair, None);
        assert!(p.interval_points.contains(&rat(3, 2)));

        assert!(bounds_profile(&Family::Translation { q: rat(-1, 2) }, 3).is_err());
        assert!(bounds_profile(&Family::Power { m: 2, k: int(-1) }, 3).is_err());
        assert!(bounds_profile(&Family::Power { m: 4, k: int(-1) }, 3).is_err());
    }

    #[test]
    fn bounds_profile_power_pairs() {
        let p = bounds_profile(&Family::Power { m: 4, k: int(2) }, 3).unwrap();
        assert_eq!(p.fixed_point_pair, None);
        assert_eq!(p.beta_floor, int(1));
        let p = bounds_profile(&Family::Power { m: 4, k: int(1) }, 3).unwrap();
        assert_eq!(p.two_cycle, Some((rat(-1, 1), rat(0, 1))));
        assert_eq!(p.gamma_approx, None);
        let p = bounds_profile(&Family::Power { m: 2, k: int(7) }, 3).unwrap();
        assert_eq!(p.two_cycle, Some((rat(-3, 1), rat(2, 1))));
        let p = bounds_profile(&Family::Power { m: 2, k: int(0) }, 3).unwrap();
        assert_eq!(p.fixed_point_pair, Some((rat(0, 1), rat(1, 1))));
    }

    #[test]
    fn window_points_agree_with_interval_integers() {
        for k in 2i64..300 {
            let p = bounds_profile(&Family::Translation { q: rat(k, 1) }, 2).unwrap();
            let expected: Vec<Rat> = interval_integers(2, &int(k))
                .unwrap()
                .into_iter()
                .map(Rat::from_integer)
                .collect();
            assert_eq!(p.interval_points, expected, "k={k}");
        }
    }

    proptest! {
        #[test]
        fn classify_quad_is_substitution_sound(a in -4i64..=4, b in -9i64..=9, c in -200i64..=200) {
            prop_assume!(a != 0);
            let qm = quad(a, b, c);
            let cls = classify_quad(&qm).unwrap();
            let map = IntegerMap::Quad(qm.clone());
            for p in &cls.fixed_points {
                prop_assert_eq!(qm.eval(p), p.clone());
            }
            for cy in &cls.two_cycles {
                prop_assert!(cy.verify(&map));
            }
            prop_assert!(cls.higher_cycles.is_empty());
        }

        #[test]
        fn conjugacy_coherence(a in -4i64..=4, b in -9i64..=9, c in -200i64..=200) {
            prop_assume!(a != 0);
            let qm = quad(a, b, c);
            let conj = conjugacy_of_quad(&qm);
            let cls = classify_quad(&qm).unwrap();
            for cy in &cls.two_cycles {
                let r: Vec<Rat> = cy.points().iter().map(|p| conj.push_forward(&Rat::from_integer(p.clone()))).collect();
                prop_assert_eq!(conj.translation(&r[0]), r[1].clone());
                prop_assert_eq!(conj.translation(&r[1]), r[0].clone());
            }
        }
    }
}
