//! Plain-text sparse dump of an [`SdpProblem`] for offline cross-checking.
//!
//! Layout (SDPA-like, 1-based indices, `*` starts a comment line):
//!
//! ```text
//! m                      number of constraints
//! nblocks                number of PSD blocks
//! d_1 d_2 ... d_nblocks  block dimensions
//! nfree                  number of free scalar variables
//! b_1 b_2 ... b_m        right-hand sides
//! k blk i j value        one line per nonzero, upper triangle (i ≤ j)
//! ```
//!
//! Row `k = 0` is the objective. Block index `0` denotes the free variables,
//! in which case `i` is the variable index and `j` is unused (`0`).

use std::fmt::Write as _;

use super::{Constraint, SdpProblem, SparseSym};
use crate::error::{Error, Result};

pub fn write_sdpa(p: &SdpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "* vclone sdp dump");
    let _ = writeln!(out, "{}", p.constraints.len());
    let _ = writeln!(out, "{}", p.block_dims.len());
    let dims: Vec<String> = p.block_dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "{}", dims.join(" "));
    let _ = writeln!(out, "{}", p.free_count());
    let rhs: Vec<String> = p.constraints.iter().map(|c| format!("{:e}", c.rhs)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    let mut emit = |k: usize, blocks: &[(usize, SparseSym)], free: &[(usize, f64)]| {
        for (b, a) in blocks {
            for &(i, j, v) in &a.entries {
                let _ = writeln!(out, "{} {} {} {} {:e}", k, b + 1, i + 1, j + 1, v);
            }
        }
        for &(j, v) in free {
            let _ = writeln!(out, "{} 0 {} 0 {:e}", k, j + 1, v);
        }
    };
    let obj_blocks: Vec<(usize, SparseSym)> = p.objective.iter().cloned().enumerate().collect();
    let obj_free: Vec<(usize, f64)> =
        p.free_objective.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
    emit(0, &obj_blocks, &obj_free);
    for (k, c) in p.constraints.iter().enumerate() {
        emit(k + 1, &c.blocks, &c.free);
    }
    out
}

pub fn read_sdpa(text: &str) -> Result<SdpProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('*'));
    let mut header = |what: &str| {
        lines.next().map(|(n, l)| (n, l.to_string())).ok_or_else(|| Error::Parse(format!("missing {what}")))
    };
    let parse_usize = |(n, s): (usize, String)| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse(format!("line {n}: expected integer, got '{s}'")))
    };
    let m = parse_usize(header("constraint count")?)?;
    let nblocks = parse_usize(header("block count")?)?;
    let (n, dims_line) = header("block dimensions")?;
    let dims: Vec<usize> = dims_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {n}: bad block size '{t}'"))))
        .collect::<Result<_>>()?;
    if dims.len() != nblocks {
        return Err(Error::Parse(format!("line {n}: expected {nblocks} block sizes")));
    }
    let nfree = parse_usize(header("free count")?)?;
    let (n, rhs_line) = if m > 0 { header("right-hand sides")? } else { (0, String::new()) };
    let rhs: Vec<f64> = rhs_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {n}: bad rhs '{t}'"))))
        .collect::<Result<_>>()?;
    if rhs.len() != m {
        return Err(Error::Parse(format!("line {n}: expected {m} right-hand sides")));
    }
    let mut p = SdpProblem::new(dims.clone(), nfree);
    p.constraints = rhs.into_iter().map(|r| Constraint { rhs: r, ..Default::default() }).collect();
    for (n, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 5 {
            return Err(Error::Parse(format!("line {n}: expected 5 fields")));
        }
        let bad = |f: &str| Error::Parse(format!("line {n}: bad field '{f}'"));
        let k: usize = t[0].parse().map_err(|_| bad(t[0]))?;
        let b: usize = t[1].parse().map_err(|_| bad(t[1]))?;
        let i: usize = t[2].parse().map_err(|_| bad(t[2]))?;
        let j: usize = t[3].parse().map_err(|_| bad(t[3]))?;
        let v: f64 = t[4].parse().map_err(|_| bad(t[4]))?;
        if k > m || b > nblocks || i == 0 {
            return Err(Error::Parse(format!("line {n}: index out of range")));
        }
        if b == 0 {
            if i > nfree {
                return Err(Error::Parse(format!("line {n}: free index out of range")));
            }
            if k == 0 {
                p.free_objective[i - 1] = v;
            } else {
                p.constraints[k - 1].free.push((i - 1, v));
            }
            continue;
        }
        if j == 0 || i > dims[b - 1] || j > dims[b - 1] {
            return Err(Error::Parse(format!("line {n}: entry out of range")));
        }
        if k == 0 {
            p.objective[b - 1].push(i - 1, j - 1, v);
        } else {
            let con = &mut p.constraints[k - 1];
            match con.blocks.iter_mut().find(|(bb, _)| *bb == b - 1) {
                Some((_, a)) => a.push(i - 1, j - 1, v),
                None => {
                    let mut a = SparseSym::new(dims[b - 1]);
                    a.push(i - 1, j - 1, v);
                    con.blocks.push((b - 1, a));
                }
            }
        }
    }
    Ok(p)
}
