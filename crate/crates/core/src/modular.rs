//! Cycle structure of the maps over `Z/MZ`.
//!
//! Every orbit in a finite ring is eventually periodic. [`functional_graph`]
//! measures the whole graph `x → f(x) mod M` in linear time: successor table,
//! peeling of in-degree-zero nodes, then a walk over the remaining cycles.
//! [`naive_graph_oracle`] computes the same summary one node at a time with
//! big-integer evaluation and serves as the independent check.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::maps::IntegerMap;
use crate::numeric::Int;

/// Largest modulus whose successor table fits `u32` node ids.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalGraphSummary {
    pub modulus: u64,
    pub node_count: u64,
    pub cycle_count: u64,
    /// Sorted ascending, one entry per cycle.
    pub cycle_lengths: Vec<u64>,
    pub max_cycle_length: u64,
    pub max_tail_length: u64,
    pub nodes_on_cycles: u64,
}

impl FunctionalGraphSummary {
    fn from_parts(modulus: u64, mut cycle_lengths: Vec<u64>, max_tail_length: u64) -> Self {
        cycle_lengths.sort_unstable();
        FunctionalGraphSummary {
            modulus,
            node_count: modulus,
            cycle_count: cycle_lengths.len() as u64,
            max_cycle_length: cycle_lengths.last().copied().unwrap_or(0),
            nodes_on_cycles: cycle_lengths.iter().sum(),
            cycle_lengths,
            max_tail_length,
        }
    }
}

fn reduce(v: &Int, modulus: u64) -> u64 {
    v.mod_floor(&Int::from(modulus))
        .to_u64()
        .expect("residue fits the modulus")
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u32, m: u64) -> u64 {
    let mut acc = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A map with its coefficients reduced mod `M`, evaluated on machine words.
#[derive(Clone, Debug)]
pub struct ModularMap {
    modulus: u64,
    kind: Reduced,
}

#[derive(Clone, Debug)]
enum Reduced {
    Power { m: u32, neg_k: u64 },
    Quad { a: u64, b: u64, c: u64 },
}

impl ModularMap {
    pub fn new(map: &IntegerMap, modulus: u64) -> Result<ModularMap> {
        if modulus < 2 {
            return domain(format!("modulus must be at least 2, got {modulus}"));
        }
        let kind = match map {
            IntegerMap::Power(p) => Reduced::Power {
                m: p.m(),
                neg_k: reduce(&-p.k(), modulus),
            },
            IntegerMap::Quad(q) => Reduced::Quad {
                a: reduce(q.a(), modulus),
                b: reduce(q.b(), modulus),
                c: reduce(q.c(), modulus),
            },
        };
        Ok(ModularMap { modulus, kind })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `f(x) mod M` for a residue `x < M`.
    pub fn apply(&self, x: u64) -> u64 {
        let m = self.modulus;
        match self.kind {
            Reduced::Power { m: deg, neg_k } => {
                ((pow_mod(x, deg, m) as u128 + neg_k as u128) % m as u128) as u64
            }
            Reduced::Quad { a, b, c } => {
                let ax = mul_mod(a, x, m);
                let t = (ax as u128 + b as u128) % m as u128;
                ((t * x as u128 + c as u128) % m as u128) as u64
            }
        }
    }
}

/// Successor table `x → f(x) mod M`, built in parallel chunks.
pub fn successor_table(map: &ModularMap) -> Vec<u32> {
    let n = map.modulus as usize;
    let mut succ = vec![0u32; n];
    succ.par_chunks_mut(1 << 14)
        .enumerate()
        .for_each(|(chunk, out)| {
            let base = chunk << 14;
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = map.apply((base + i) as u64) as u32;
            }
        });
    succ
}

/// Exact summary of the functional graph of `map` on `Z/MZ`.
pub fn functional_graph(map: &IntegerMap, modulus: u64) -> Result<FunctionalGraphSummary> {
    if modulus > MAX_MODULUS {
        return domain(format!("modulus {modulus} exceeds {MAX_MODULUS}"));
    }
    let reduced = ModularMap::new(map, modulus)?;
    let succ = successor_table(&reduced);
    Ok(summarize_table(modulus, &succ))
}

fn summarize_table(modulus: u64, succ: &[u32]) -> FunctionalGraphSummary {
    let n = succ.len();
    let mut indeg = vec![0u32; n];
    for &s in succ {
        indeg[s as usize] += 1;
    }

    // peel: `order` lists non-periodic nodes, each before its successor
    let mut order: Vec<u32> = (0..n as u32).filter(|&x| indeg[x as usize] == 0).collect();
    let mut head = 0;
    while head < order.len() {
        let s = succ[order[head] as usize] as usize;
        indeg[s] -= 1;
        if indeg[s] == 0 {
            order.push(s as u32);
        }
        head += 1;
    }

    let mut removed = vec![false; n];
    for &x in &order {
        removed[x as usize] = true;
    }
    let mut visited = vec![false; n];
    let mut cycle_lengths = Vec::new();
    for start in 0..n {
        if removed[start] || visited[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !visited[x] {
            visited[x] = true;
            len += 1;
            x = succ[x] as usize;
        }
        cycle_lengths.push(len);
    }

    let mut depth = vec![0u32; n];
    let mut max_tail = 0u32;
    for &x in order.iter().rev() {
        let d = depth[succ[x as usize] as usize] + 1;
        depth[x as usize] = d;
        max_tail = max_tail.max(d);
    }
    FunctionalGraphSummary::from_parts(modulus, cycle_lengths, u64::from(max_tail))
}

/// Per-node iteration with big-integer evaluation. Quadratic in `M`; meant
/// for `M ≤ 10_000`.
pub fn naive_graph_oracle(map: &IntegerMap, modulus: u64) -> Result<FunctionalGraphSummary> {
    if modulus < 2 {
        return domain(format!("modulus must be at least 2, got {modulus}"));
    }
    let step = |x: u64| reduce(&map.eval(&Int::from(x)), modulus);
    let mut cycles: BTreeMap<u64, u64> = BTreeMap::new();
    let mut max_tail = 0u64;
    for start in 0..modulus {
        let mut seen: HashMap<u64, u64> = HashMap::new();
        let mut path = Vec::new();
        let mut x = start;
        while !seen.contains_key(&x) {
            seen.insert(x, path.len() as u64);
            path.push(x);
            x = step(x);
        }
        let first = seen[&x];
        max_tail = max_tail.max(first);
        let cycle = &path[first as usize..];
        let rep = *cycle.iter().min().expect("nonempty cycle");
        cycles.insert(rep, cycle.len() as u64);
    }
    Ok(FunctionalGraphSummary::from_parts(
        modulus,
        cycles.into_values().collect(),
        max_tail,
    ))
}

/// Moduli `lo, lo + stride, …` not exceeding `hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModulusRange {
    pub lo: u64,
    pub hi: u64,
    pub stride: u64,
}

impl ModulusRange {
    pub fn new(lo: u64, hi: u64, stride: u64) -> Result<ModulusRange> {
        if stride == 0 {
            return domain("stride must be positive");
        }
        if lo < 2 {
            return domain(format!("moduli start at 2, got {lo}"));
        }
        Ok(ModulusRange { lo, hi, stride })
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (self.lo..=self.hi).step_by(self.stride as usize)
    }

    fn contains(&self, m: u64) -> bool {
        m >= self.lo && m <= self.hi && (m - self.lo).is_multiple_of(self.stride)
    }
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub modulus: u64,
    pub max_cycle_length: u64,
    pub cycle_count: u64,
    pub nodes_on_cycles: u64,
    pub max_tail_length: u64,
    /// Zero for rows restored from a checkpoint.
    pub elapsed: Duration,
}

impl ScanRow {
    fn from_summary(s: &FunctionalGraphSummary, elapsed: Duration) -> ScanRow {
        ScanRow {
            modulus: s.modulus,
            max_cycle_length: s.max_cycle_length,
            cycle_count: s.cycle_count,
            nodes_on_cycles: s.nodes_on_cycles,
            max_tail_length: s.max_tail_length,
            elapsed,
        }
    }

    /// Everything except timing.
    pub fn same_result(&self, other: &ScanRow) -> bool {
        self.modulus == other.modulus
            && self.max_cycle_length == other.max_cycle_length
            && self.cycle_count == other.cycle_count
            && self.nodes_on_cycles == other.nodes_on_cycles
            && self.max_tail_length == other.max_tail_length
    }
}

pub const CSV_HEADER: &str = "modulus,max_cycle_length,cycle_count,nodes_on_cycles,max_tail_length";

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.modulus, r.max_cycle_length, r.cycle_count, r.nodes_on_cycles, r.max_tail_length
        );
    }
    out
}

fn map_params(map: &IntegerMap) -> (&'static str, Vec<String>) {
    match map {
        IntegerMap::Power(p) => ("power", vec![p.m().to_string(), p.k().to_string()]),
        IntegerMap::Quad(q) => (
            "quad",
            vec![q.a().to_string(), q.b().to_string(), q.c().to_string()],
        ),
    }
}

fn checkpoint_header(map: &IntegerMap) -> String {
    let (family, params) = map_params(map);
    format!("# orbitforge checkpoint {family} {}\n", params.join(" "))
}

/// Reads completed rows from a checkpoint.
///
/// Format: a header line `# orbitforge checkpoint <family> <params…>`, then
/// one line per completed modulus: `<params…> M max_cycle cycle_count
/// nodes_on_cycles max_tail`. A final line without a newline is a torn write
/// and is dropped.
pub fn read_checkpoint(path: &Path, map: &IntegerMap) -> Result<BTreeMap<u64, ScanRow>> {
    let text = fs::read_to_string(path)?;
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    let (_, params) = map_params(map);
    let mut rows = BTreeMap::new();
    let mut lines = complete.lines();
    match lines.next() {
        Some(h) if format!("{h}\n") == checkpoint_header(map) => {}
        Some(h) => {
            return Err(Error::Checkpoint(format!(
                "header {h:?} does not match map {map}"
            )))
        }
        None => return Ok(rows),
    }
    for (lineno, line) in lines.enumerate() {
        let bad = |why: &str| Error::Checkpoint(format!("line {}: {why}: {line:?}", lineno + 2));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != params.len() + 5 {
            return Err(bad("wrong field count"));
        }
        if fields[..params.len()] != params.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            return Err(bad("parameters do not match the scanned map"));
        }
        let nums: Vec<u64> = fields[params.len()..]
            .iter()
            .map(|f| f.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("malformed number"))?;
        let row = ScanRow {
            modulus: nums[0],
            max_cycle_length: nums[1],
            cycle_count: nums[2],
            nodes_on_cycles: nums[3],
            max_tail_length: nums[4],
            elapsed: Duration::ZERO,
        };
        rows.insert(row.modulus, row);
    }
    if complete.len() != text.len() {
        fs::write(path, complete)?;
    }
    Ok(rows)
}

/// One row per modulus in `range`, in modulus order.
///
/// With a checkpoint path, rows already recorded there are reused and each
/// new row is appended as soon as it is computed, so an interrupted scan
/// resumes where it stopped and produces the same rows.
pub fn max_cycle_scan(
    map: &IntegerMap,
    range: &ModulusRange,
    checkpoint: Option<&Path>,
) -> Result<Vec<ScanRow>> {
    let mut done = BTreeMap::new();
    let mut sink = None;
    if let Some(path) = checkpoint {
        if path.exists() {
            done = read_checkpoint(path, map)?;
            if let Some(m) = done.keys().find(|m| !range.contains(**m)) {
                return Err(Error::Checkpoint(format!(
                    "checkpoint holds modulus {m} outside the requested range"
                )));
            }
        }
        let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            file.write_all(checkpoint_header(map).as_bytes())?;
        }
        sink = Some(file);
    }
    let (_, params) = map_params(map);
    let prefix = params.join(" ");

    let mut rows = Vec::new();
    for modulus in range.iter() {
        if let Some(row) = done.remove(&modulus) {
            rows.push(row);
            continue;
        }
        let start = Instant::now();
        let summary = functional_graph(map, modulus)?;
        let row = ScanRow::from_summary(&summary, start.elapsed());
        if let Some(file) = sink.as_mut() {
            writeln!(
                file,
                "{prefix} {} {} {} {} {}",
                row.modulus,
                row.max_cycle_length,
                row.cycle_count,
                row.nodes_on_cycles,
                row.max_tail_length
            )?;
            file.flush()?;
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{PowerMap, QuadMap};

    fn power(m: u32, k: i64) -> IntegerMap {
        PowerMap::new(m, k).unwrap().into()
    }

    #[test]
    fn squaring_mod_two() {
        let s = functional_graph(&power(2, 0), 2).unwrap();
        assert_eq!(s.cycle_lengths, vec![1, 1]);
        assert_eq!(s.max_tail_length, 0);
        assert_eq!(s.nodes_on_cycles, 2);
    }

    #[test]
    fn x2_minus_1_mod_3() {
        // 0 → 2, 2 → 0, 1 → 0
        let s = functional_graph(&power(2, 1), 3).unwrap();
        assert_eq!(s.cycle_lengths, vec![2]);
        assert_eq!(s.cycle_count, 1);
        assert_eq!(s.max_tail_length, 1);
        assert_eq!(s, naive_graph_oracle(&power(2, 1), 3).unwrap());
    }

    #[test]
    fn small_cases_match_oracle() {
        let maps = [
            power(2, 3),
            power(3, 1),
            QuadMap::new(1, 1, -2).unwrap().into(),
        ];
        for (map, m) in maps.iter().zip([5u64, 7, 4]) {
            assert_eq!(
                functional_graph(map, m).unwrap(),
                naive_graph_oracle(map, m).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(functional_graph(&power(2, 1), 1).is_err());
        assert!(naive_graph_oracle(&power(2, 1), 0).is_err());
        assert!(ModulusRange::new(1, 10, 1).is_err());
        assert!(ModulusRange::new(2, 10, 0).is_err());
    }

    #[test]
    fn modular_apply_matches_big_int() {
        let maps = [
            power(2, 1),
            power(5, -17),
            power(8, 123_456_789),
            QuadMap::new(-3, 7, -11).unwrap().into(),
        ];
        for map in &maps {
            for modulus in [2u64, 97, 1 << 20, (1 << 61) - 1] {
                let mm = ModularMap::new(map, modulus).unwrap();
                for x in [0u64, 1, 2, modulus / 3, modulus - 1] {
                    assert_eq!(mm.apply(x), reduce(&map.eval(&Int::from(x)), modulus));
                }
            }
        }
    }

    #[test]
    fn scan_rows_and_csv() {
        let range = ModulusRange::new(2, 12, 5).unwrap();
        let rows = max_cycle_scan(&power(2, 1), &range, None).unwrap();
        assert_eq!(
            rows.iter().map(|r| r.modulus).collect::<Vec<_>>(),
            vec![2, 7, 12]
        );
        let csv = scan_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
        let empty = ModulusRange::new(10, 5, 1).unwrap();
        assert!(max_cycle_scan(&power(2, 1), &empty, None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn checkpoint_resume_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let map = power(2, 1);
        let full = ModulusRange::new(2, 80, 1).unwrap();
        let reference = scan_csv(&max_cycle_scan(&map, &full, None).unwrap());

        let partial = ModulusRange::new(2, 40, 1).unwrap();
        max_cycle_scan(&map, &partial, Some(&path)).unwrap();
        // simulate a crash mid-write
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("2 1 41 3");
        fs::write(&path, text).unwrap();

        let resumed = max_cycle_scan(&map, &full, Some(&path)).unwrap();
        assert_eq!(scan_csv(&resumed), reference);
        let restored = read_checkpoint(&path, &map).unwrap();
        assert_eq!(restored.len(), 79);
    }

    #[test]
    fn checkpoint_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        let map = power(2, 1);
        let range = ModulusRange::new(2, 10, 1).unwrap();

        fs::write(&path, "# orbitforge checkpoint power 2 1\n2 1 x 1 1 1 1\n").unwrap();
        assert!(matches!(
            max_cycle_scan(&map, &range, Some(&path)),
            Err(Error::Checkpoint(_))
        ));

        fs::write(&path, "# orbitforge checkpoint power 2 5\n").unwrap();
        assert!(matches!(
            max_cycle_scan(&map, &range, Some(&path)),
            Err(Error::Checkpoint(_))
        ));

        fs::write(&path, "# orbitforge checkpoint power 2 1\n2 1 99 1 1 1 0\n").unwrap();
        assert!(matches!(
            max_cycle_scan(&map, &range, Some(&path)),
            Err(Error::Checkpoint(_))
        ));
    }
}
