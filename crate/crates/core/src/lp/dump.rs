//! Plain-text dump of an [`LpProblem`] for cross-checking with external solvers.
//!
//! ```text
//! # morphbox lp v1
//! vars 2 rows 1
//! c -1 -1
//! lower 0 free
//! 1 1 <= 1
//! ```
//!
//! Numbers use Rust's shortest round-trip decimal notation, which never
//! switches to exponent form, so a dump reads back bit-exactly. Each
//! constraint occupies one line: its `vars` coefficients, `<=`, and the
//! right-hand side.

use std::io::{self, BufRead, Write};

use super::{LpError, LpProblem};

const HEADER: &str = "# morphbox lp v1";

pub fn write_dump<W: Write>(problem: &LpProblem, mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "vars {} rows {}", problem.n_vars(), problem.n_constraints())?;
    write!(out, "c")?;
    for c in problem.objective() {
        write!(out, " {c}")?;
    }
    writeln!(out)?;
    write!(out, "lower")?;
    for l in problem.var_lower() {
        match l {
            Some(v) => write!(out, " {v}")?,
            None => write!(out, " free")?,
        }
    }
    writeln!(out)?;
    for i in 0..problem.n_constraints() {
        let mut first = true;
        for a in problem.row(i) {
            if !first {
                write!(out, " ")?;
            }
            write!(out, "{a}")?;
            first = false;
        }
        writeln!(out, " <= {}", problem.rhs()[i])?;
    }
    Ok(())
}

fn bad(line: usize, message: impl Into<String>) -> LpError {
    LpError::Dump {
        line,
        message: message.into(),
    }
}

fn number(line: usize, tok: &str) -> Result<f64, LpError> {
    tok.parse().map_err(|_| bad(line, format!("not a number: {tok:?}")))
}

pub fn read_dump<R: BufRead>(input: R) -> Result<LpProblem, LpError> {
    let lines: Vec<String> = input
        .lines()
        .collect::<io::Result<_>>()
        .map_err(|e| bad(0, e.to_string()))?;
    if lines.first().map(String::as_str) != Some(HEADER) {
        return Err(bad(1, "missing header"));
    }
    let dims: Vec<&str> = lines
        .get(1)
        .ok_or_else(|| bad(2, "missing dimensions"))?
        .split_whitespace()
        .collect();
    let (vars, rows) = match dims.as_slice() {
        ["vars", v, "rows", r] => (
            v.parse::<usize>().map_err(|_| bad(2, "bad var count"))?,
            r.parse::<usize>().map_err(|_| bad(2, "bad row count"))?,
        ),
        _ => return Err(bad(2, "expected `vars <V> rows <R>`")),
    };

    let keyed = |idx: usize, key: &str| -> Result<Vec<String>, LpError> {
        let line = lines
            .get(idx)
            .ok_or_else(|| bad(idx + 1, format!("missing `{key}` line")))?;
        let mut toks = line.split_whitespace();
        if toks.next() != Some(key) {
            return Err(bad(idx + 1, format!("expected `{key}`")));
        }
        let rest: Vec<String> = toks.map(str::to_owned).collect();
        if rest.len() != vars {
            return Err(bad(idx + 1, format!("expected {vars} entries")));
        }
        Ok(rest)
    };

    let c = keyed(2, "c")?
        .iter()
        .map(|t| number(3, t))
        .collect::<Result<Vec<_>, _>>()?;
    let lower = keyed(3, "lower")?
        .iter()
        .map(|t| match t.as_str() {
            "free" => Ok(None),
            t => number(4, t).map(Some),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut a = Vec::with_capacity(rows * vars);
    let mut b = Vec::with_capacity(rows);
    for i in 0..rows {
        let lineno = i + 5;
        let line = lines.get(i + 4).ok_or_else(|| bad(lineno, "missing constraint"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != vars + 2 || toks[vars] != "<=" {
            return Err(bad(lineno, "expected coefficients followed by `<= rhs`"));
        }
        for t in &toks[..vars] {
            a.push(number(lineno, t)?);
        }
        b.push(number(lineno, toks[vars + 1])?);
    }
    LpProblem::new(c, a, b, lower)
}
