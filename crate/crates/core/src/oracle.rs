//! Brute-force ground truth for the classifier.
//!
//! Every periodic integer point of a map lies inside a certified bound `B`.
//! The oracle iterates every seed in `[-B, B]` with exact arithmetic until it
//! either repeats a value or leaves the bound, and reports every cycle it
//! meets, of every period. It shares nothing with the classifier beyond map
//! evaluation and the bound.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::classifier::{asymptotic_behavior, classify, Behavior, Cycle, OrbitClassification};
use crate::error::{domain, Result};
use crate::maps::IntegerMap;
use crate::numeric::{floor_beta, iroot, perfect_square_root, Int};

/// Largest bound the oracle will enumerate.
pub const MAX_SEED_BOUND: i64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Justification {
    /// Even degree: beyond `β` the map is increasing and above the diagonal.
    Lemma1BetaFloor,
    /// Quadratic: pulled back from `[-B_q, B_q]` through the conjugacy.
    ConjugacyPullback,
    /// Odd degree: beyond the bound every orbit moves monotonically away.
    OddMMonotone,
    /// No real fixed point: every orbit is strictly increasing (in the
    /// conjugate coordinate), so nothing is periodic.
    EmptyNoRealFixedPoint,
}

impl Justification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Justification::Lemma1BetaFloor => "lemma1_beta_floor",
            Justification::ConjugacyPullback => "conjugacy_pullback",
            Justification::OddMMonotone => "odd_m_monotone",
            Justification::EmptyNoRealFixedPoint => "empty_no_real_fixed_point",
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every periodic integer point `x` of the map satisfies `|x| ≤ bound`, and
/// an orbit that leaves `[-bound, bound]` never returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscapeBound {
    pub bound: Int,
    pub justification: Justification,
}

/// Computes the certified bound for a map.
///
/// For even `m` and `k ≥ 1` the bound is `⌊β⌋`. Since orbit points are
/// integers, `|x| > ⌊β⌋` is the same as `|x| > β` unless `β` is itself an
/// integer, in which case `x = β` is a fixed point and is caught as a cycle
/// before the escape test matters.
pub fn escape_bound(map: &IntegerMap) -> Result<EscapeBound> {
    match map {
        IntegerMap::Power(p) => {
            let (m, k) = (p.m(), p.k());
            if m % 2 == 1 {
                return Ok(EscapeBound {
                    bound: iroot(&k.abs(), m)? + 2u32,
                    justification: Justification::OddMMonotone,
                });
            }
            if k.is_positive() {
                Ok(EscapeBound {
                    bound: floor_beta(m, k)?,
                    justification: Justification::Lemma1BetaFloor,
                })
            } else if k.is_zero() {
                Ok(EscapeBound {
                    bound: Int::from(1),
                    justification: Justification::Lemma1BetaFloor,
                })
            } else {
                Ok(EscapeBound {
                    bound: Int::from(1),
                    justification: Justification::EmptyNoRealFixedPoint,
                })
            }
        }
        IntegerMap::Quad(q) => {
            // 1 + 4q = (b-1)² - 4ac; periodic s satisfy |a·s + b/2| ≤ B_q,
            // so |s| ≤ (1 + |b| + √(1+4q)) / (2|a|)
            let b1 = q.b() - 1u32;
            let disc = &b1 * &b1 - q.a() * q.c() * 4u32;
            if disc.is_negative() {
                return Ok(EscapeBound {
                    bound: Int::from(1),
                    justification: Justification::EmptyNoRealFixedPoint,
                });
            }
            let den = q.a().abs() * 2u32;
            let base = q.b().abs() + 1u32;
            let bound = match perfect_square_root(&disc) {
                Some(r) => {
                    let num = base + r;
                    let (quot, rem) = (&num / &den, &num % &den);
                    if rem.is_zero() {
                        quot
                    } else {
                        quot + 1u32
                    }
                }
                None => (base + disc.sqrt()) / &den + 1u32,
            };
            Ok(EscapeBound {
                bound,
                justification: Justification::ConjugacyPullback,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceOutcome {
    EntersCycle {
        cycle: Cycle,
        tail_length: usize,
    },
    Escapes {
        step: usize,
        certificate: String,
    },
    /// Cap reached before either event; impossible with an adequate cap.
    Truncated {
        cap: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTrace {
    pub seed: Int,
    /// `points[i + 1] = map(points[i])`; ends at the first repeated value or
    /// the first point outside the bound.
    pub points: Vec<Int>,
    pub outcome: TraceOutcome,
}

/// Iterates `map` from `seed` with the map's own escape bound.
pub fn iterate_with_escape(map: &IntegerMap, seed: &Int, cap: usize) -> Result<OrbitTrace> {
    if cap < 1 {
        return domain("iteration cap must be at least 1");
    }
    let bound = escape_bound(map)?;
    Ok(iterate_within(map, &bound, seed, cap))
}

/// Iterates `map` from `seed` until a repeat, an escape past `bound`, or
/// `cap` applications of the map.
pub fn iterate_within(map: &IntegerMap, bound: &EscapeBound, seed: &Int, cap: usize) -> OrbitTrace {
    let mut points = vec![seed.clone()];
    let mut seen: HashMap<Int, usize> = HashMap::new();
    let mut step = 0usize;
    loop {
        let x = &points[step];
        if x.abs() > bound.bound {
            let certificate = format!("|{x}| > {} ({})", bound.bound, bound.justification);
            return OrbitTrace {
                seed: seed.clone(),
                outcome: TraceOutcome::Escapes { step, certificate },
                points,
            };
        }
        if let Some(&first) = seen.get(x) {
            let cycle = Cycle::new(points[first..step].to_vec())
                .expect("values between repeats are distinct");
            return OrbitTrace {
                seed: seed.clone(),
                outcome: TraceOutcome::EntersCycle {
                    cycle,
                    tail_length: first,
                },
                points,
            };
        }
        if step == cap {
            return OrbitTrace {
                seed: seed.clone(),
                outcome: TraceOutcome::Truncated { cap },
                points,
            };
        }
        seen.insert(x.clone(), step);
        let next = map.eval(x);
        points.push(next);
        step += 1;
    }
}

/// A cap that can never truncate inside `bound`: at most `2B + 1` distinct
/// values fit, plus one step to repeat or escape.
pub fn safe_cap(bound: &EscapeBound) -> usize {
    bound
        .bound
        .to_usize()
        .map_or(usize::MAX, |b| b.saturating_mul(4).saturating_add(4))
}

/// Every cycle reachable from a seed in `[-B, B]`, partitioned by period.
pub fn oracle_cycles(map: &IntegerMap) -> Result<OrbitClassification> {
    let bound = escape_bound(map)?;
    let b = match bound.bound.to_i64() {
        Some(b) if b <= MAX_SEED_BOUND => b,
        _ => {
            return domain(format!(
                "escape bound {} is too large to enumerate",
                bound.bound
            ))
        }
    };
    let cap = safe_cap(&bound);
    let cycles: BTreeSet<Cycle> = (0..(2 * b + 1) as usize)
        .into_par_iter()
        .with_min_len(512)
        .filter_map(
            |i| match iterate_within(map, &bound, &Int::from(i as i64 - b), cap).outcome {
                TraceOutcome::EntersCycle { cycle, .. } => Some(cycle),
                _ => None,
            },
        )
        .collect();

    let mut out = OrbitClassification {
        fixed_points: Vec::new(),
        two_cycles: Vec::new(),
        higher_cycles: Vec::new(),
        behavior: asymptotic_behavior(map),
        witness: None,
    };
    for c in cycles {
        match c.period() {
            1 => out.fixed_points.push(c.points()[0].clone()),
            2 => out.two_cycles.push(c),
            _ => out.higher_cycles.push(c),
        }
    }
    out.fixed_points.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub map: IntegerMap,
    pub agree: bool,
    pub classifier: OrbitClassification,
    pub oracle: OrbitClassification,
    /// Human-readable differences; empty when `agree`.
    pub diff: Vec<String>,
}

fn render_points(points: &[Int]) -> String {
    let parts: Vec<String> = points.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn render_cycles(cycles: &[Cycle]) -> String {
    let parts: Vec<String> = cycles.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Compares the classifier with the oracle on one map.
///
/// Any cycle of period ≥ 3 found by the oracle is always reported. When the
/// classifier says every seed is fixed, agreement means the oracle saw only
/// fixed points, one per seed.
pub fn cross_check(map: &IntegerMap) -> Result<CrossCheck> {
    let classifier = classify(map)?;
    let oracle = oracle_cycles(map)?;
    let mut diff = Vec::new();
    if !oracle.higher_cycles.is_empty() {
        diff.push(format!(
            "oracle found cycles of period >= 3: {}",
            render_cycles(&oracle.higher_cycles)
        ));
    }
    if classifier.behavior == Behavior::AllSeedsFixed {
        let bound = escape_bound(map)?.bound;
        let expected = 2 * bound.to_usize().unwrap_or(0) + 1;
        if oracle.fixed_points.len() != expected || !oracle.two_cycles.is_empty() {
            diff.push(format!(
                "expected every seed fixed, oracle found fixed points {} and 2-cycles {}",
                render_points(&oracle.fixed_points),
                render_cycles(&oracle.two_cycles)
            ));
        }
    } else {
        if classifier.fixed_points != oracle.fixed_points {
            diff.push(format!(
                "fixed points: classifier {} oracle {}",
                render_points(&classifier.fixed_points),
                render_points(&oracle.fixed_points)
            ));
        }
        if classifier.two_cycles != oracle.two_cycles {
            diff.push(format!(
                "2-cycles: classifier {} oracle {}",
                render_cycles(&classifier.two_cycles),
                render_cycles(&oracle.two_cycles)
            ));
        }
        if classifier.higher_cycles != oracle.higher_cycles && oracle.higher_cycles.is_empty() {
            diff.push("classifier lists cycles of period >= 3".to_string());
        }
    }
    Ok(CrossCheck {
        map: map.clone(),
        agree: diff.is_empty(),
        classifier,
        oracle,
        diff,
    })
}

/// [`cross_check`] over many maps in parallel; results keep input order.
pub fn cross_check_grid(maps: &[IntegerMap]) -> Result<Vec<CrossCheck>> {
    maps.par_iter().map(cross_check).collect()
}
