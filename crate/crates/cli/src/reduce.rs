use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use retro_core::base::circuit::Circuit;
use retro_core::reductions::{
    brute_3sum, brute_csat, brute_minplus, solve_3sum_retro, solve_csat_retro, solve_online_minplus,
    ReductionError, VectorStream,
};
use retro_core::StrategyConfig;

use crate::{path_context, write_out, CliError, StrategyArg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Minplus,
    #[value(name = "3sum")]
    ThreeSum,
    Csat,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(value_enum)]
    pub problem: Problem,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub strategy: StrategyArg,
    /// Cross-check the answer against brute force.
    #[arg(long)]
    pub check: bool,
}

fn parse_err(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{}: {msg}", path.display()))
}

fn parse_ints(line: &str, lineno: usize) -> Result<Vec<i64>, String> {
    line.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| format!("line {lineno}: bad integer `{tok}`")))
        .collect()
}

/// A matrix or a list of vectors, one row per entry.
pub type Rows = Vec<Vec<i64>>;

/// `n`, then `n` matrix rows, then `n` vectors, all whitespace-separated
/// integers. Blank lines are ignored.
pub fn parse_minplus(text: &str) -> Result<(Rows, Rows), String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, first) = lines.next().ok_or("empty input")?;
    let n: usize = first.parse().map_err(|_| format!("line 1: bad dimension `{first}`"))?;
    let mut rows = Vec::with_capacity(2 * n);
    for (lineno, line) in lines.by_ref().take(2 * n) {
        let row = parse_ints(line, lineno)?;
        if row.len() != n {
            return Err(format!("line {lineno}: expected {n} integers, found {}", row.len()));
        }
        rows.push(row);
    }
    if rows.len() != 2 * n {
        return Err(format!("expected {} rows after the dimension, found {}", 2 * n, rows.len()));
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(format!("line {lineno}: unexpected trailing data"));
    }
    let vectors = rows.split_off(n);
    Ok((rows, vectors))
}

/// Exactly three lines `A`, `B`, `C` of equally many integers.
pub fn parse_3sum(text: &str) -> Result<[Vec<i64>; 3], String> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let lines: Vec<&str> = body.split('\n').map(|l| l.trim_end_matches('\r')).collect();
    if lines.len() != 3 {
        return Err(format!("expected exactly 3 lines, found {}", lines.len()));
    }
    let sets = [
        parse_ints(lines[0], 1)?,
        parse_ints(lines[1], 2)?,
        parse_ints(lines[2], 3)?,
    ];
    if sets[1].len() != sets[0].len() || sets[2].len() != sets[0].len() {
        return Err(format!(
            "sets have different sizes {}, {}, {}",
            sets[0].len(),
            sets[1].len(),
            sets[2].len()
        ));
    }
    Ok(sets)
}

fn reduction_err(path: &Path, e: ReductionError) -> CliError {
    // Every driver failure on a parsed file comes from the input itself.
    parse_err(path, e)
}

pub fn cmd_reduce(args: &ReduceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let strategy = args.strategy.single()?;
    let config = StrategyConfig::new(strategy);
    let path = args.input.as_path();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path_context("reading", path), e))?;
    let mismatch = || CliError::CheckFailed("answer differs from brute force".into());
    match args.problem {
        Problem::Minplus => {
            let (matrix, vectors) = parse_minplus(&text).map_err(|m| parse_err(path, m))?;
            let mut stream = VectorStream::new(vectors.clone());
            let report = solve_online_minplus(&matrix, &mut stream, &config).map_err(|e| reduction_err(path, e))?;
            for product in &report.answer {
                let line: Vec<String> = product.iter().map(i64::to_string).collect();
                write_out(out, format_args!("{}", line.join(" ")))?;
            }
            if args.check {
                let expected: Vec<Vec<i64>> = vectors.iter().map(|v| brute_minplus(&matrix, v)).collect();
                if expected != report.answer {
                    return Err(mismatch());
                }
            }
        }
        Problem::ThreeSum => {
            let [a, b, c] = parse_3sum(&text).map_err(|m| parse_err(path, m))?;
            let report = solve_3sum_retro(&a, &b, &c, &config).map_err(|e| reduction_err(path, e))?;
            write_out(out, format_args!("{}", if report.answer { "TRUE" } else { "FALSE" }))?;
            if args.check && brute_3sum(&a, &b, &c) != report.answer {
                return Err(mismatch());
            }
        }
        Problem::Csat => {
            let circuit: Circuit = text.parse().map_err(|e| parse_err(path, e))?;
            let report = solve_csat_retro(&circuit, &config).map_err(|e| reduction_err(path, e))?;
            write_out(out, format_args!("{}", if report.answer { "SAT" } else { "UNSAT" }))?;
            if args.check && brute_csat(&circuit).map_err(|e| reduction_err(path, e))? != report.answer {
                return Err(mismatch());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minplus_format() {
        let (m, v) = parse_minplus("1\n2\n3\n").unwrap();
        assert_eq!(m, vec![vec![2]]);
        assert_eq!(v, vec![vec![3]]);
        let (m, v) = parse_minplus("2\n1 2\n3 4\n\n5 6\n7 8").unwrap();
        assert_eq!(m, vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(v, vec![vec![5, 6], vec![7, 8]]);
        assert!(parse_minplus("2\n1 2\n3 4\n5 6\n").is_err());
        assert!(parse_minplus("1\n2\n3\n4\n").is_err());
        assert!(parse_minplus("1\n2 x\n3\n").is_err());
        assert!(parse_minplus("").is_err());
    }

    #[test]
    fn threesum_format() {
        assert_eq!(parse_3sum("-3\n1\n2").unwrap(), [vec![-3], vec![1], vec![2]]);
        assert_eq!(parse_3sum("1 2\n3 4\r\n5 6\n").unwrap()[1], vec![3, 4]);
        assert!(parse_3sum("1\n2\n").is_err());
        assert!(parse_3sum("1\n2\n3\n4\n").is_err());
        assert!(parse_3sum("1 2\n3\n4 5\n").is_err());
    }
}
