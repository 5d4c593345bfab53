//! Parameter grids: `lo..hi` (inclusive), single values, and comma lists of
//! either, e.g. `-10..5000` or `4,6,8` or `1..3,10`.

use std::str::FromStr;

use orbitforge::Int;

/// Refuses grids that would not fit in memory anyway.
pub const MAX_GRID_LEN: u64 = 50_000_000;

fn parse_int(s: &str) -> Result<Int, String> {
    Int::from_str(s.trim()).map_err(|_| format!("not an integer: {s:?}"))
}

/// Expands a grid into its values, in the order written.
pub fn parse_grid(spec: &str) -> Result<Vec<Int>, String> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(format!("empty item in grid {spec:?}"));
        }
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse_int(lo)?, parse_int(hi)?);
                if lo > hi {
                    return Err(format!("empty range {item:?}"));
                }
                u64::try_from(&(&hi - &lo + 1u32))
                    .ok()
                    .filter(|n| out.len() as u64 + n <= MAX_GRID_LEN)
                    .ok_or_else(|| format!("grid {spec:?} has more than {MAX_GRID_LEN} values"))?;
                let mut v = lo;
                while v <= hi {
                    out.push(v.clone());
                    v += 1u32;
                }
            }
            None => out.push(parse_int(item)?),
        }
    }
    Ok(out)
}

/// A single inclusive `lo..hi` range (or one value) of machine integers.
pub fn parse_range_u64(spec: &str) -> Result<(u64, u64), String> {
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| format!("not a non-negative integer: {s:?}"))
    };
    let (lo, hi) = match spec.split_once("..") {
        Some((lo, hi)) => (num(lo)?, num(hi)?),
        None => {
            let v = num(spec)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {spec:?}"));
    }
    Ok((lo, hi))
}
