//! Text and JSON renderings of core results.
//!
//! Integers are always written as full decimal strings so that JSON
//! consumers never see a rounded float.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use orbitforge::classifier::Cycle;
use orbitforge::oracle::{CrossCheck, OrbitTrace, TraceOutcome};
use orbitforge::{Behavior, Int, IntegerMap, OrbitClassification, PowerMap, QuadMap, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
}

impl MapDoc {
    pub fn new(map: &IntegerMap) -> MapDoc {
        match map {
            IntegerMap::Power(p) => MapDoc {
                family: "power".into(),
                m: Some(p.m().to_string()),
                k: Some(p.k().to_string()),
                a: None,
                b: None,
                c: None,
            },
            IntegerMap::Quad(q) => MapDoc {
                family: "quad".into(),
                m: None,
                k: None,
                a: Some(q.a().to_string()),
                b: Some(q.b().to_string()),
                c: Some(q.c().to_string()),
            },
        }
    }

    pub fn to_map(&self) -> Result<IntegerMap, String> {
        let field = |v: &Option<String>, name: &str| {
            v.as_deref()
                .ok_or_else(|| format!("map is missing {name:?}"))
                .and_then(parse_int)
        };
        match self.family.as_str() {
            "power" => {
                let m = field(&self.m, "m")?;
                let m = u32::try_from(&m).map_err(|_| format!("degree out of range: {m}"))?;
                PowerMap::new(m, field(&self.k, "k")?)
                    .map(Into::into)
                    .map_err(|e| e.to_string())
            }
            "quad" => QuadMap::new(
                field(&self.a, "a")?,
                field(&self.b, "b")?,
                field(&self.c, "c")?,
            )
            .map(Into::into)
            .map_err(|e| e.to_string()),
            other => Err(format!("unknown map family {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
}

/// JSON form of a classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationDoc {
    pub map: MapDoc,
    pub fixed_points: Vec<String>,
    pub two_cycles: Vec<Vec<String>>,
    pub higher_cycles: Vec<Vec<String>>,
    pub verdict: String,
    pub witness: Option<WitnessDoc>,
}

fn parse_int(s: &str) -> Result<Int, String> {
    Int::from_str(s).map_err(|_| format!("not an integer: {s:?}"))
}

fn strings(points: &[Int]) -> Vec<String> {
    points.iter().map(Int::to_string).collect()
}

fn cycle_strings(cycles: &[Cycle]) -> Vec<Vec<String>> {
    cycles.iter().map(|c| strings(c.points())).collect()
}

fn parse_cycles(cycles: &[Vec<String>]) -> Result<Vec<Cycle>, String> {
    cycles
        .iter()
        .map(|c| {
            let pts = c
                .iter()
                .map(|s| parse_int(s))
                .collect::<Result<Vec<_>, _>>()?;
            Cycle::new(pts).map_err(|e| e.to_string())
        })
        .collect()
}

impl ClassificationDoc {
    pub fn new(map: &IntegerMap, c: &OrbitClassification) -> ClassificationDoc {
        ClassificationDoc {
            map: MapDoc::new(map),
            fixed_points: strings(&c.fixed_points),
            two_cycles: cycle_strings(&c.two_cycles),
            higher_cycles: cycle_strings(&c.higher_cycles),
            verdict: c.behavior.as_str().to_string(),
            witness: c.witness.as_ref().map(|w| WitnessDoc {
                rule: w.rule().to_string(),
                j: w.j().map(Int::to_string),
            }),
        }
    }

    pub fn to_domain(&self) -> Result<(IntegerMap, OrbitClassification), String> {
        let map = self.map.to_map()?;
        let fixed_points = self
            .fixed_points
            .iter()
            .map(|s| parse_int(s))
            .collect::<Result<Vec<_>, _>>()?;
        let behavior = Behavior::parse(&self.verdict)
            .ok_or_else(|| format!("unknown verdict {:?}", self.verdict))?;
        let witness = match &self.witness {
            None => None,
            Some(w) => {
                let j = w.j.as_deref().map(parse_int).transpose()?;
                Some(
                    Witness::from_parts(&w.rule, j)
                        .ok_or_else(|| format!("malformed witness {:?}", w.rule))?,
                )
            }
        };
        Ok((
            map,
            OrbitClassification {
                fixed_points,
                two_cycles: parse_cycles(&self.two_cycles)?,
                higher_cycles: parse_cycles(&self.higher_cycles)?,
                behavior,
                witness,
            },
        ))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ClassificationDoc, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

fn list(points: &[Int]) -> String {
    let parts: Vec<String> = points.iter().map(Int::to_string).collect();
    parts.join(", ")
}

fn cycles_text(cycles: &[Cycle]) -> String {
    if cycles.is_empty() {
        return "none".into();
    }
    let parts: Vec<String> = cycles.iter().map(Cycle::to_string).collect();
    parts.join(" ")
}

pub fn classification_table(map: &IntegerMap, c: &OrbitClassification) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "map:           {map}");
    if c.behavior == Behavior::AllSeedsFixed {
        let _ = writeln!(out, "fixed points:  every integer");
    } else if c.fixed_points.is_empty() {
        let _ = writeln!(out, "fixed points:  none");
    } else {
        let _ = writeln!(out, "fixed points:  {}", list(&c.fixed_points));
    }
    let _ = writeln!(out, "2-cycles:      {}", cycles_text(&c.two_cycles));
    if !c.higher_cycles.is_empty() {
        let _ = writeln!(out, "other cycles:  {}", cycles_text(&c.higher_cycles));
    }
    let _ = writeln!(out, "verdict:       {}", c.behavior);
    match &c.witness {
        Some(w) => {
            let _ = writeln!(out, "witness:       {w}");
        }
        None => {
            let _ = writeln!(out, "witness:       none");
        }
    }
    out
}

fn outcome_text(outcome: &TraceOutcome) -> String {
    match outcome {
        TraceOutcome::EntersCycle { cycle, tail_length } => {
            let kind = match cycle.period() {
                1 => "fixed point".to_string(),
                p => format!("{p}-cycle"),
            };
            format!("enters {kind} {cycle} after a tail of {tail_length}")
        }
        TraceOutcome::Escapes { step, certificate } => {
            format!("escapes at step {step}: {certificate}")
        }
        TraceOutcome::Truncated { cap } => format!("undecided after {cap} steps"),
    }
}

pub fn trace_table(map: &IntegerMap, trace: &OrbitTrace) -> String {
    format!(
        "map:      {map}\nseed:     {}\norbit:    {}\noutcome:  {}\n",
        trace.seed,
        list(&trace.points),
        outcome_text(&trace.outcome)
    )
}

pub fn trace_json(map: &IntegerMap, trace: &OrbitTrace) -> String {
    let outcome = match &trace.outcome {
        TraceOutcome::EntersCycle { cycle, tail_length } => serde_json::json!({
            "kind": "enters_cycle",
            "cycle": strings(cycle.points()),
            "tail_length": tail_length,
        }),
        TraceOutcome::Escapes { step, certificate } => serde_json::json!({
            "kind": "escapes",
            "step": step,
            "certificate": certificate,
        }),
        TraceOutcome::Truncated { cap } => serde_json::json!({ "kind": "truncated", "cap": cap }),
    };
    let doc = serde_json::json!({
        "map": MapDoc::new(map),
        "seed": trace.seed.to_string(),
        "points": strings(&trace.points),
        "outcome": outcome,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

fn map_params(map: &IntegerMap) -> [String; 5] {
    match map {
        IntegerMap::Power(p) => [
            p.m().to_string(),
            p.k().to_string(),
            String::new(),
            String::new(),
            String::new(),
        ],
        IntegerMap::Quad(q) => [
            String::new(),
            String::new(),
            q.a().to_string(),
            q.b().to_string(),
            q.c().to_string(),
        ],
    }
}

/// One line per checked map, then the diff lines of any disagreement.
pub fn cross_check_table(checks: &[CrossCheck], skipped: usize) -> String {
    let mut out = String::new();
    for c in checks {
        let status = if c.agree { "agree" } else { "DISAGREE" };
        let _ = writeln!(
            out,
            "{status:<8} {:<24} fixed [{}] 2-cycles {}",
            c.map.to_string(),
            list(&c.oracle.fixed_points),
            cycles_text(&c.oracle.two_cycles)
        );
        for d in &c.diff {
            let _ = writeln!(out, "         {d}");
        }
    }
    let _ = writeln!(out, "{}", cross_check_summary(checks, skipped));
    out
}

pub fn cross_check_summary(checks: &[CrossCheck], skipped: usize) -> String {
    let agree = checks.iter().filter(|c| c.agree).count();
    let mut s = format!(
        "checked {} maps: {agree} agree, {} disagree",
        checks.len(),
        checks.len() - agree
    );
    if skipped > 0 {
        let _ = write!(s, " ({skipped} skipped with a = 0)");
    }
    s
}

pub fn cross_check_csv(checks: &[CrossCheck]) -> String {
    let mut out = String::from("family,m,k,a,b,c,agree,fixed_points,two_cycles,higher_cycles\n");
    let join = |cs: &[Cycle]| {
        cs.iter()
            .map(|c| {
                c.points()
                    .iter()
                    .map(Int::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(";")
    };
    for c in checks {
        let family = match c.map {
            IntegerMap::Power(_) => "power",
            IntegerMap::Quad(_) => "quad",
        };
        let p = map_params(&c.map);
        let fixed: Vec<String> = c.oracle.fixed_points.iter().map(Int::to_string).collect();
        let _ = writeln!(
            out,
            "{family},{},{},{},{},{},{},{},{},{}",
            p[0],
            p[1],
            p[2],
            p[3],
            p[4],
            c.agree,
            fixed.join(" "),
            join(&c.oracle.two_cycles),
            join(&c.oracle.higher_cycles)
        );
    }
    out
}

#[derive(Serialize)]
struct CheckDoc {
    map: MapDoc,
    agree: bool,
    fixed_points: Vec<String>,
    two_cycles: Vec<Vec<String>>,
    higher_cycles: Vec<Vec<String>>,
    diff: Vec<String>,
}

#[derive(Serialize)]
struct CrossCheckReport {
    checked: usize,
    agree: usize,
    disagree: usize,
    skipped: usize,
    results: Vec<CheckDoc>,
}

pub fn cross_check_json(checks: &[CrossCheck], skipped: usize) -> String {
    let agree = checks.iter().filter(|c| c.agree).count();
    let report = CrossCheckReport {
        checked: checks.len(),
        agree,
        disagree: checks.len() - agree,
        skipped,
        results: checks
            .iter()
            .map(|c| CheckDoc {
                map: MapDoc::new(&c.map),
                agree: c.agree,
                fixed_points: strings(&c.oracle.fixed_points),
                two_cycles: cycle_strings(&c.oracle.two_cycles),
                higher_cycles: cycle_strings(&c.oracle.higher_cycles),
                diff: c.diff.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("plain data serializes");
    s.push('\n');
    s
}
