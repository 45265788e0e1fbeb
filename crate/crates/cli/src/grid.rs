//! Parsing of grid ranges, scalar lists and bindings given on the command
//! line.

use std::collections::BTreeMap;

use qforge::exact_arith::ExactScalar;

use crate::UsageError;

/// Splits on commas outside brackets and parentheses, so cyclotomic
/// literals such as `cyclo(3)[0, 1]` stay whole.
pub fn split_top_level(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts
}

/// `M=0..6,N=2` into named inclusive ranges, in the order given.
pub fn parse_grid(text: &str) -> Result<Vec<(String, i64, i64)>, UsageError> {
    let mut out: Vec<(String, i64, i64)> = Vec::new();
    for part in split_top_level(text) {
        let (name, range) = part.split_once('=').ok_or_else(|| UsageError(format!("grid entry `{part}` needs the form sym=lo..hi")))?;
        let name = name.trim().to_string();
        let int = |s: &str| s.trim().parse::<i64>().map_err(|_| UsageError(format!("bad integer `{s}` in grid entry `{part}`")));
        let (lo, hi) = match range.split_once("..") {
            Some((lo, hi)) => (int(lo)?, int(hi.trim_start_matches('='))?),
            None => {
                let v = int(range)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(UsageError(format!("empty range in grid entry `{part}`")));
        }
        if out.iter().any(|(n, _, _)| *n == name) {
            return Err(UsageError(format!("grid symbol `{name}` given twice")));
        }
        out.push((name, lo, hi));
    }
    Ok(out)
}

/// Every point of the grid, last symbol varying fastest.
pub fn grid_cells(grid: &[(String, i64, i64)]) -> Vec<BTreeMap<String, i64>> {
    let mut cells = vec![BTreeMap::new()];
    for (name, lo, hi) in grid {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                (*lo..=*hi).map(move |v| {
                    let mut c = cell.clone();
                    c.insert(name.clone(), v);
                    c
                })
            })
            .collect();
    }
    cells
}

pub fn parse_scalar(text: &str) -> Result<ExactScalar, UsageError> {
    let t = text.trim();
    let zeta = t.strip_prefix("zeta").or_else(|| t.strip_prefix("ζ"));
    if let Some(order) = zeta {
        let n: u32 = order.parse().map_err(|_| UsageError(format!("bad root of unity `{t}`")))?;
        if n == 0 {
            return Err(UsageError("zeta0 is not a root of unity".into()));
        }
        return Ok(ExactScalar::zeta(n));
    }
    t.parse().map_err(|e| UsageError(format!("bad scalar `{t}`: {e}")))
}

pub fn parse_scalar_list(text: &str) -> Result<Vec<ExactScalar>, UsageError> {
    split_top_level(text).iter().map(|s| parse_scalar(s)).collect()
}

/// `a=2,b=zeta3` into named scalars.
pub fn parse_bindings(text: &str) -> Result<BTreeMap<String, ExactScalar>, UsageError> {
    let mut out = BTreeMap::new();
    for part in split_top_level(text) {
        let (name, value) = part.split_once('=').ok_or_else(|| UsageError(format!("binding `{part}` needs the form sym=value")))?;
        out.insert(name.trim().to_string(), parse_scalar(value)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ranges_and_cells() {
        let g = parse_grid("M=0..2,N=5").unwrap();
        assert_eq!(g, vec![("M".into(), 0, 2), ("N".into(), 5, 5)]);
        let cells = grid_cells(&g);
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[2]["M"], 2);
        assert_eq!(grid_cells(&[]).len(), 1);
    }

    #[test]
    fn grid_errors() {
        assert!(parse_grid("M=3..1").is_err());
        assert!(parse_grid("M").is_err());
        assert!(parse_grid("M=0..x").is_err());
        assert!(parse_grid("M=0..1,M=2").is_err());
    }

    #[test]
    fn scalar_lists_keep_cyclotomic_literals() {
        let v = parse_scalar_list("1/2, cyclo(3)[0, 1], zeta4, -3").unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v[1], ExactScalar::zeta(3));
        assert_eq!(v[2], ExactScalar::zeta(4));
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn bindings() {
        let b = parse_bindings("a=3,c=1/7").unwrap();
        assert_eq!(b["c"].to_string(), "1/7");
        assert!(parse_bindings("a").is_err());
    }
}
