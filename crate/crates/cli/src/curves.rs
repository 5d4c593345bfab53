//! Bounding curves `β`, `γ` and `β - 1` over a parameter range, as CSV or
//! as a self-contained SVG chart.

use std::fmt::Write as _;

use num_traits::{One, Signed};
use serde::Serialize;

use orbitforge::classifier::{bounds_profile, solve_pronic};
use orbitforge::numeric::perfect_square_root;
use orbitforge::{DecimalApprox, Family, Int, Rat, Result};

/// One parameter value on the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePoint {
    /// The integer grid value.
    pub k: Int,
    /// `k`, or `k - 1/4` in odd-b mode.
    pub param: Rat,
    pub beta: DecimalApprox,
    /// Absent while `γ` is not real.
    pub gamma: Option<DecimalApprox>,
    pub beta_minus_one: DecimalApprox,
    /// Lattice points of the window `[γ, β]`.
    pub band: Vec<Rat>,
    /// Set exactly on the highlighted parameters.
    pub witness: Option<Int>,
}

impl CurvePoint {
    pub fn marked(&self) -> bool {
        self.witness.is_some()
    }
}

fn witness(k: &Int, odd_b: bool) -> Option<Int> {
    if !odd_b {
        return solve_pronic(k).map(|(j, _)| j);
    }
    if k.is_negative() {
        return None;
    }
    perfect_square_root(k).or_else(|| perfect_square_root(&(k - 1u32)))
}

/// Curve data for `x² - k`, or for `x² - (k - 1/4)` when `odd_b` is set.
pub fn curve_points(ks: &[Int], odd_b: bool, digits: u32) -> Result<Vec<CurvePoint>> {
    let quarter = Rat::new(Int::one(), Int::from(4));
    ks.iter()
        .map(|k| {
            let (param, family) = if odd_b {
                let q = Rat::from_integer(k.clone()) - &quarter;
                (q.clone(), Family::Translation { q })
            } else {
                (
                    Rat::from_integer(k.clone()),
                    Family::Power { m: 2, k: k.clone() },
                )
            };
            let profile = bounds_profile(&family, digits)?;
            let beta_minus_one =
                DecimalApprox::from_rat(&(profile.beta_approx.lower() - Rat::one()), digits);
            Ok(CurvePoint {
                k: k.clone(),
                param,
                beta: profile.beta_approx,
                gamma: profile.gamma_approx,
                beta_minus_one,
                band: profile.interval_points,
                witness: witness(k, odd_b),
            })
        })
        .collect()
}

fn param_name(odd_b: bool) -> &'static str {
    if odd_b {
        "q"
    } else {
        "k"
    }
}

fn opt(d: &Option<DecimalApprox>) -> String {
    d.as_ref().map(|d| d.value.clone()).unwrap_or_default()
}

pub fn curves_csv(points: &[CurvePoint], odd_b: bool) -> String {
    let mut out = format!(
        "{},beta,gamma,beta_minus_one,band_points,marked,j\n",
        param_name(odd_b)
    );
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.param,
            p.beta,
            opt(&p.gamma),
            p.beta_minus_one,
            p.band.len(),
            p.marked(),
            p.witness.as_ref().map(Int::to_string).unwrap_or_default()
        );
    }
    out
}

pub fn curves_table(points: &[CurvePoint], odd_b: bool) -> String {
    let mut out = format!(
        "{:>10}  {:>14}  {:>14}  {:>14}  band\n",
        param_name(odd_b),
        "beta",
        "gamma",
        "beta-1"
    );
    for p in points {
        let band: Vec<String> = p.band.iter().map(Rat::to_string).collect();
        let mark = match &p.witness {
            Some(j) => format!("  * j = {j}"),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{:>10}  {:>14}  {:>14}  {:>14}  [{}]{mark}",
            p.param.to_string(),
            p.beta.value,
            opt(&p.gamma),
            p.beta_minus_one.value,
            band.join(", ")
        );
    }
    out
}

#[derive(Serialize)]
struct CurveDoc {
    param: String,
    beta: String,
    gamma: Option<String>,
    beta_minus_one: String,
    band: Vec<String>,
    marked: bool,
    j: Option<String>,
}

pub fn curves_json(points: &[CurvePoint]) -> String {
    let docs: Vec<CurveDoc> = points
        .iter()
        .map(|p| CurveDoc {
            param: p.param.to_string(),
            beta: p.beta.value.clone(),
            gamma: p.gamma.as_ref().map(|g| g.value.clone()),
            beta_minus_one: p.beta_minus_one.value.clone(),
            band: p.band.iter().map(Rat::to_string).collect(),
            marked: p.marked(),
            j: p.witness.as_ref().map(Int::to_string),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&docs).expect("plain data serializes");
    s.push('\n');
    s
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 44.0;

fn rat_f64(r: &Rat) -> f64 {
    DecimalApprox::from_rat(r, 6).to_f64()
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 10.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
        .max(1.0)
}

struct Frame {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - v / self.y1 * (HEIGHT - TOP - BOTTOM)
    }
}

fn polyline(frame: &Frame, pts: &[(f64, f64)], style: &str) -> String {
    let coords: Vec<String> = pts
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*y)))
        .collect();
    format!(
        "<polyline fill=\"none\" {style} points=\"{}\"/>\n",
        coords.join(" ")
    )
}

/// Deterministic SVG: solid `β` and `γ` curves, dashed `β - 1`, and dots
/// with labels at the lattice points of each marked parameter.
pub fn curves_svg(points: &[CurvePoint], odd_b: bool) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    if points.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }

    let xs: Vec<f64> = points.iter().map(|p| rat_f64(&p.param)).collect();
    let (mut x0, mut x1) = (xs[0], xs[0]);
    for &x in &xs {
        x0 = x0.min(x);
        x1 = x1.max(x);
    }
    if x1 - x0 < 1.0 {
        x1 = x0 + 1.0;
    }
    let top = points
        .iter()
        .map(|p| p.beta.to_f64())
        .fold(1.0_f64, f64::max)
        .ceil();
    let frame = Frame { x0, x1, y1: top };

    // axes and ticks
    let (ax, ay) = (frame.x(x0), frame.y(0.0));
    let _ = writeln!(
        svg,
        "<g stroke=\"black\" stroke-width=\"1\"><line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{:.2}\" y2=\"{ay:.2}\"/><line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{ax:.2}\" y2=\"{:.2}\"/></g>",
        frame.x(x1),
        frame.y(top)
    );
    svg.push_str("<g font-size=\"10\" fill=\"black\">\n");
    let xstep = tick_step(x1 - x0);
    let mut t = (x0 / xstep).ceil() * xstep;
    while t <= x1 + 1e-9 {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{t}</text>",
            frame.x(t),
            ay + 14.0
        );
        t += xstep;
    }
    let ystep = tick_step(top);
    let mut t = 0.0;
    while t <= top + 1e-9 {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{t}</text>",
            ax - 6.0,
            frame.y(t) + 3.0
        );
        t += ystep;
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        frame.x((x0 + x1) / 2.0),
        HEIGHT - 8.0,
        param_name(odd_b)
    );
    svg.push_str("</g>\n");

    let beta: Vec<(f64, f64)> = points
        .iter()
        .zip(&xs)
        .map(|(p, &x)| (x, p.beta.to_f64()))
        .collect();
    let shifted: Vec<(f64, f64)> = points
        .iter()
        .zip(&xs)
        .map(|(p, &x)| (x, p.beta_minus_one.to_f64()))
        .collect();
    svg.push_str(&polyline(
        &frame,
        &beta,
        "stroke=\"#1f4e9c\" stroke-width=\"1.5\"",
    ));
    svg.push_str(&polyline(
        &frame,
        &shifted,
        "stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"6 4\"",
    ));
    // γ is drawn in runs of consecutive rows where it is real
    let mut run: Vec<(f64, f64)> = Vec::new();
    for (p, &x) in points.iter().zip(&xs) {
        match &p.gamma {
            Some(g) => run.push((x, g.to_f64())),
            None if !run.is_empty() => {
                svg.push_str(&polyline(
                    &frame,
                    &run,
                    "stroke=\"#2e7d32\" stroke-width=\"1.5\"",
                ));
                run.clear();
            }
            None => {}
        }
    }
    if !run.is_empty() {
        svg.push_str(&polyline(
            &frame,
            &run,
            "stroke=\"#2e7d32\" stroke-width=\"1.5\"",
        ));
    }

    svg.push_str("<g fill=\"#c62828\">\n");
    for (p, &x) in points.iter().zip(&xs) {
        if !p.marked() {
            continue;
        }
        for y in &p.band {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\"/>",
                frame.x(x),
                frame.y(rat_f64(y))
            );
        }
        let label_y = p.band.iter().map(rat_f64).fold(p.beta.to_f64(), f64::max);
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            frame.x(x),
            frame.y(label_y) - 8.0,
            p.param
        );
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(lo: i64, hi: i64) -> Vec<Int> {
        (lo..=hi).map(Int::from).collect()
    }

    #[test]
    fn k6_row() {
        let pts = curve_points(&ks(6, 6), false, 3).unwrap();
        let p = &pts[0];
        assert_eq!(p.beta.value, "3.000");
        assert_eq!(p.gamma.as_ref().unwrap().value, "1.732");
        assert_eq!(p.beta_minus_one.value, "2.000");
        assert_eq!(p.witness, Some(Int::from(2)));
        assert_eq!(p.band.len(), 2);
    }

    #[test]
    fn k5_row_is_unmarked_with_one_integer() {
        let p = &curve_points(&ks(5, 5), false, 3).unwrap()[0];
        assert!(!p.marked());
        assert_eq!(p.band.len(), 1);
    }

    #[test]
    fn small_k_rows_have_beta_only() {
        let pts = curve_points(&ks(0, 2), false, 3).unwrap();
        assert!(pts[0].gamma.is_none() && pts[1].gamma.is_none());
        assert!(pts[2].gamma.is_some());
        assert_eq!(pts[0].beta.value, "1.000");
    }

    #[test]
    fn odd_b_mode() {
        let pts = curve_points(&ks(4, 5), true, 4).unwrap();
        // q = 15/4: fixed points 5/2 and -3/2
        assert_eq!(pts[0].param, Rat::new(Int::from(15), Int::from(4)));
        assert_eq!(pts[0].beta.value, "2.5000");
        assert_eq!(pts[0].witness, Some(Int::from(2)));
        // q = 19/4: the 2-cycle point 5/2 sits just below B_q
        let p = &pts[1];
        assert_eq!(p.param, Rat::new(Int::from(19), Int::from(4)));
        assert_eq!(p.witness, Some(Int::from(2)));
        assert!(p.band.contains(&Rat::new(Int::from(5), Int::from(2))));
        assert!(p.beta.lower() > &Rat::new(Int::from(5), Int::from(2)));
        let q6 = &curve_points(&ks(6, 6), true, 4).unwrap()[0];
        assert!(!q6.marked());
    }

    #[test]
    fn marks_follow_the_pronic_rule() {
        let pts = curve_points(&ks(2, 60), false, 2).unwrap();
        for p in &pts {
            let pronic = (0..10).any(|j: i64| {
                let v = Int::from(j * (j + 1));
                p.k == v || p.k == v + 1
            });
            assert_eq!(p.marked(), pronic, "k = {}", p.k);
            // two lattice points exactly at the marked k (and three at k = 2)
            let expected = if p.k == Int::from(2) {
                3
            } else if pronic {
                2
            } else {
                1
            };
            assert_eq!(p.band.len(), expected, "k = {}", p.k);
        }
    }

    #[test]
    fn csv_layout() {
        let csv = curves_csv(&curve_points(&ks(5, 6), false, 3).unwrap(), false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,beta,gamma,beta_minus_one,band_points,marked,j");
        assert_eq!(lines[2], "6,3.000,1.732,2.000,2,true,2");
        assert!(lines[1].starts_with("5,2.791,1.486,1.791,1,false,"));
    }

    #[test]
    fn svg_is_deterministic_and_dashed() {
        let pts = curve_points(&ks(0, 45), false, 3).unwrap();
        let a = curves_svg(&pts, false);
        let b = curves_svg(&curve_points(&ks(0, 45), false, 3).unwrap(), false);
        assert_eq!(a, b);
        assert!(a.contains("stroke-dasharray"));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        let dots = a.matches("<circle").count();
        let expected: usize = pts
            .iter()
            .filter(|p| p.marked())
            .map(|p| p.band.len())
            .sum();
        assert_eq!(dots, expected);
    }
}
