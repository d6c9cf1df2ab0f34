//! Line-oriented solution files.
//!
//! ```text
//! # comment
//! dim 3
//! kind wdvv
//! eta 0 0 1  0 1 0  1 0 0
//! F x1^2*x3/2 + x1*x2^2/2
//! ```
//!
//! `kind oae` files give one `K<α> <expr>` line per component instead of
//! `eta` and `F`.

use std::fmt::Write as _;
use std::str::FromStr;

use oae_core::spectral::Seeds;
use oae_core::{
    parse_polynomial, Chart, DisplacementField, Error as CoreError, Metric, Polynomial, Prepotential, Rational,
    RationalMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Oae,
    Wdvv,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Oae => "oae",
            Kind::Wdvv => "wdvv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Oae(DisplacementField),
    Wdvv(Prepotential),
}

impl Solution {
    pub fn kind(&self) -> Kind {
        match self {
            Solution::Oae(_) => Kind::Oae,
            Solution::Wdvv(_) => Kind::Wdvv,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Solution::Oae(k) => k.dim(),
            Solution::Wdvv(f) => f.chart().dim(),
        }
    }

    /// The displacement itself, or the gradient reduction of `F`.
    pub fn displacement(&self) -> DisplacementField {
        match self {
            Solution::Oae(k) => k.clone(),
            Solution::Wdvv(f) => oae_core::gradient_reduce(f),
        }
    }

    pub fn prepotential(&self) -> Option<&Prepotential> {
        match self {
            Solution::Oae(_) => None,
            Solution::Wdvv(f) => Some(f),
        }
    }
}

struct Line<'a> {
    number: usize,
    // byte column of `rest` within the raw line
    rest_col: usize,
    keyword: &'a str,
    rest: &'a str,
}

fn split_lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let lead = content.len() - trimmed.len();
        let kw_end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let after = &trimmed[kw_end..];
        let rest = after.trim_start();
        out.push(Line {
            number: i + 1,
            rest_col: lead + kw_end + (after.len() - rest.len()),
            keyword: &trimmed[..kw_end],
            rest: rest.trim_end(),
        });
    }
    out
}

fn expr(line: &Line<'_>, chart: Chart) -> Result<Polynomial, FormatError> {
    parse_polynomial(line.rest, chart).map_err(|e| match e {
        CoreError::Syntax { offset, message } => err(line.number, line.rest_col + offset + 1, message),
        CoreError::UnknownVariable { name, offset } => err(
            line.number,
            line.rest_col + offset + 1,
            format!("unknown variable `{name}`"),
        ),
        other => err(line.number, line.rest_col + 1, other.to_string()),
    })
}

pub fn parse_solution(text: &str) -> Result<Solution, FormatError> {
    let lines = split_lines(text);
    let mut dim: Option<(usize, Chart)> = None;
    let mut kind: Option<Kind> = None;
    let mut eta: Option<(usize, Vec<Rational>)> = None;
    let mut f: Option<Polynomial> = None;
    let mut ks: Vec<Option<Polynomial>> = Vec::new();
    for line in &lines {
        let col = line.rest_col + 1;
        match line.keyword {
            "dim" => {
                if dim.is_some() {
                    return Err(err(line.number, 1, "duplicate `dim`"));
                }
                let n: usize = line
                    .rest
                    .parse()
                    .map_err(|_| err(line.number, col, "expected a positive integer"))?;
                let chart = Chart::new(n).map_err(|e| err(line.number, col, e.to_string()))?;
                ks = vec![None; n];
                dim = Some((n, chart));
            }
            "kind" => {
                if kind.is_some() {
                    return Err(err(line.number, 1, "duplicate `kind`"));
                }
                kind = Some(match line.rest {
                    "oae" => Kind::Oae,
                    "wdvv" => Kind::Wdvv,
                    _ => return Err(err(line.number, col, "expected `oae` or `wdvv`")),
                });
            }
            "eta" => {
                if eta.is_some() {
                    return Err(err(line.number, 1, "duplicate `eta`"));
                }
                let mut values = Vec::new();
                for tok in line.rest.split_whitespace() {
                    let v = Rational::from_str(tok)
                        .map_err(|_| err(line.number, col, format!("`{tok}` is not a rational number")))?;
                    values.push(v);
                }
                eta = Some((line.number, values));
            }
            "F" => {
                let (_, chart) = dim.ok_or_else(|| err(line.number, 1, "`dim` must come first"))?;
                if f.is_some() {
                    return Err(err(line.number, 1, "duplicate `F`"));
                }
                f = Some(expr(line, chart)?);
            }
            kw if kw.starts_with('K') => {
                let (n, chart) = dim.ok_or_else(|| err(line.number, 1, "`dim` must come first"))?;
                let idx: usize = kw[1..]
                    .parse()
                    .ok()
                    .filter(|&i| (1..=n).contains(&i))
                    .ok_or_else(|| err(line.number, 2, format!("component index must be 1..={n}")))?;
                if ks[idx - 1].is_some() {
                    return Err(err(line.number, 1, format!("duplicate `{kw}`")));
                }
                ks[idx - 1] = Some(expr(line, chart)?);
            }
            other => return Err(err(line.number, 1, format!("unknown keyword `{other}`"))),
        }
    }
    let last = lines.last().map(|l| l.number).unwrap_or(1);
    let (n, chart) = dim.ok_or_else(|| err(last, 1, "missing `dim`"))?;
    match kind.ok_or_else(|| err(last, 1, "missing `kind`"))? {
        Kind::Oae => {
            if f.is_some() || eta.is_some() {
                return Err(err(last, 1, "`F` and `eta` belong to `kind wdvv`"));
            }
            let comps = ks
                .into_iter()
                .enumerate()
                .map(|(i, k)| k.ok_or_else(|| err(last, 1, format!("missing `K{}`", i + 1))))
                .collect::<Result<Vec<_>, _>>()?;
            let k = DisplacementField::new(chart, comps).map_err(|e| err(last, 1, e.to_string()))?;
            Ok(Solution::Oae(k))
        }
        Kind::Wdvv => {
            if ks.iter().any(Option::is_some) {
                return Err(err(last, 1, "`K<i>` lines belong to `kind oae`"));
            }
            let (eta_line, values) = eta.ok_or_else(|| err(last, 1, "missing `eta`"))?;
            if values.len() != n * n {
                return Err(err(
                    eta_line,
                    1,
                    format!("`eta` needs {} entries, got {}", n * n, values.len()),
                ));
            }
            let matrix = RationalMatrix::from_row_major(values).map_err(|e| err(eta_line, 1, e.to_string()))?;
            let metric = Metric::new(matrix).map_err(|e| err(eta_line, 1, e.to_string()))?;
            let f = f.ok_or_else(|| err(last, 1, "missing `F`"))?;
            let pre = Prepotential::new(chart, f, metric).map_err(|e| err(last, 1, e.to_string()))?;
            Ok(Solution::Wdvv(pre))
        }
    }
}

/// Canonical text; parsing it gives back the same solution.
pub fn write_solution(solution: &Solution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim {}", solution.dim());
    let _ = writeln!(out, "kind {}", solution.kind().name());
    match solution {
        Solution::Oae(k) => {
            for (i, c) in k.components().iter().enumerate() {
                let _ = writeln!(out, "K{} {}", i + 1, c);
            }
        }
        Solution::Wdvv(f) => {
            let eta: Vec<String> = f.metric().upper().row_major().iter().map(|r| r.to_string()).collect();
            let _ = writeln!(out, "eta {}", eta.join(" "));
            let _ = writeln!(out, "F {}", f.potential());
        }
    }
    out
}

/// Spectral seeds, one per line: `h <k> <n rationals>`, `b <k> <rational>`,
/// `d <k> <n rationals>`. Unlisted seeds are zero.
pub fn parse_seeds(text: &str, dim: usize, order: usize) -> Result<Seeds, FormatError> {
    let mut seeds = Seeds::zero(dim, order);
    for line in split_lines(text) {
        let mut toks = line.rest.split_whitespace();
        let level: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(line.number, line.rest_col + 1, "expected a level"))?;
        if level > order {
            return Err(err(
                line.number,
                line.rest_col + 1,
                format!("level {level} exceeds order {order}"),
            ));
        }
        let values = toks
            .map(|t| {
                Rational::from_str(t).map_err(|_| {
                    err(
                        line.number,
                        line.rest_col + 1,
                        format!("`{t}` is not a rational number"),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let want = if line.keyword == "b" { 1 } else { dim };
        if values.len() != want {
            return Err(err(
                line.number,
                line.rest_col + 1,
                format!("expected {want} values, got {}", values.len()),
            ));
        }
        match line.keyword {
            "h" => seeds.h[level] = values,
            "d" => seeds.d[level] = values,
            "b" => seeds.b[level] = values[0].clone(),
            other => return Err(err(line.number, 1, format!("unknown keyword `{other}`"))),
        }
    }
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# x\ndim 2\nkind oae\nK2 x1*x2\nK1 x1^2/2  # unit\n";
        let s = parse_solution(text).unwrap();
        assert_eq!(write_solution(&s), "dim 2\nkind oae\nK1 x1^2/2\nK2 x1*x2\n");
        assert_eq!(parse_solution(&write_solution(&s)).unwrap(), s);
    }

    #[test]
    fn wdvv_round_trip() {
        let text = "dim 2\nkind wdvv\neta 0 1 1 0\nF x1^2*x2/2\n";
        let s = parse_solution(text).unwrap();
        assert_eq!(write_solution(&s), text);
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_solution("dim 2\nkind oae\nK1 x1 +\nK2 x2\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_solution("dim 2\nkind oae\nK1 x3\nK2 x2\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 4));
        let e = parse_solution("dim 2\nkind oae\nK1 x1\n").unwrap_err();
        assert!(e.message.contains("K2"));
        let e = parse_solution("dim 2\nkind wdvv\neta 1 0 0\nF x1\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_solution("dim 2\nkind wdvv\neta 1 2 3 1\nF x1\n").unwrap_err();
        assert!(e.message.contains("symmetric"));
        let e = parse_solution("dims 2\n").unwrap_err();
        assert!(e.message.contains("unknown keyword"));
    }

    #[test]
    fn seeds_file() {
        let s = parse_seeds("h 0 1 0\nd 1 1/2 -1\nb 2 3\n", 2, 3).unwrap();
        assert_eq!(
            s.h[0],
            vec![Rational::from_integer(1.into()), Rational::from_integer(0.into())]
        );
        assert_eq!(s.d[1][0], Rational::new(1.into(), 2.into()));
        assert_eq!(s.b[2], Rational::from_integer(3.into()));
        assert_eq!(parse_seeds("h 4 1 0\n", 2, 3).unwrap_err().line, 1);
        assert!(parse_seeds("d 0 1\n", 2, 3).is_err());
    }
}
