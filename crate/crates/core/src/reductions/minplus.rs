use thiserror::Error;

use crate::base::MinPlusSum;
use crate::full::StrategyConfig;
use crate::timeline::{RetroOp, TimeKey};

use super::{Driver, ReductionError, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamEvent {
    /// Vector `i` was handed out.
    Read(usize),
    /// The product for vector `i` was submitted.
    Emit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OnlineError {
    #[error("vector {next} requested before the product for vector {pending} was emitted")]
    ReadBeforeEmit { next: usize, pending: usize },
    #[error("result emitted without an outstanding vector")]
    EmitWithoutRead,
}

/// Reveals vectors one at a time: the next vector is only available after
/// the product for the previous one has been emitted. Every access is
/// logged.
#[derive(Clone, Debug)]
pub struct VectorStream {
    vectors: Vec<Vec<i64>>,
    next: usize,
    pending: Option<usize>,
    log: Vec<StreamEvent>,
    results: Vec<Vec<i64>>,
}

impl VectorStream {
    pub fn new(vectors: Vec<Vec<i64>>) -> Self {
        VectorStream {
            vectors,
            next: 0,
            pending: None,
            log: Vec::new(),
            results: Vec::new(),
        }
    }

    pub fn next_vector(&mut self) -> Result<Option<Vec<i64>>, OnlineError> {
        if let Some(pending) = self.pending {
            return Err(OnlineError::ReadBeforeEmit {
                next: self.next,
                pending,
            });
        }
        let Some(v) = self.vectors.get(self.next).cloned() else {
            return Ok(None);
        };
        self.log.push(StreamEvent::Read(self.next));
        self.pending = Some(self.next);
        self.next += 1;
        Ok(Some(v))
    }

    pub fn emit(&mut self, product: Vec<i64>) -> Result<(), OnlineError> {
        let i = self.pending.take().ok_or(OnlineError::EmitWithoutRead)?;
        self.log.push(StreamEvent::Emit(i));
        self.results.push(product);
        Ok(())
    }

    pub fn log(&self) -> &[StreamEvent] {
        &self.log
    }

    pub fn results(&self) -> &[Vec<i64>] {
        &self.results
    }

    /// `Read(0), Emit(0), Read(1), Emit(1), ...` covering every vector.
    pub fn strictly_alternating(&self) -> bool {
        self.log.len() == 2 * self.vectors.len()
            && self.log.chunks(2).enumerate().all(|(i, pair)| {
                pair == [StreamEvent::Read(i), StreamEvent::Emit(i)]
            })
    }
}

/// `(A ⋄ v)_j = min_k (A[j][k] + v[k])`.
pub fn brute_minplus(matrix: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, x)| a + x)
                .min()
                .expect("non-empty row")
        })
        .collect()
}

/// Computes `A ⋄ v^i` for every vector of `stream`, online, using only
/// fully retroactive operations on a min-plus structure.
///
/// `L1` is set to the current vector at the earliest times; row `j` of `A`
/// is written into `L2` after it, ending at time `t_j`. The query at `t_j`
/// therefore sees `L1 = v` and `L2 = a_j`. Changing the vector only
/// replaces the first `n` operations.
pub fn solve_online_minplus(
    matrix: &[Vec<i64>],
    stream: &mut VectorStream,
    config: &StrategyConfig,
) -> Result<Report<Vec<Vec<i64>>>, ReductionError> {
    let n = matrix.len();
    if let Some((j, row)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(ReductionError::DimensionMismatch(format!(
            "row {j} has {} entries, expected {n}",
            row.len()
        )));
    }
    let mut driver = Driver::new(config, &MinPlusSum::new());
    let vector_times: Vec<TimeKey> = (0..n)
        .map(|k| driver.append(RetroOp::set(1, k, Some(0))))
        .collect::<Result<_, _>>()?;
    let mut row_ends = Vec::with_capacity(n);
    for row in matrix {
        let mut last = TimeKey(0);
        for (k, a) in row.iter().enumerate() {
            last = driver.append(RetroOp::set(2, k, Some(*a)))?;
        }
        row_ends.push(last);
    }

    let mut products = Vec::new();
    let mut i = 0;
    while let Some(v) = stream.next_vector()? {
        if v.len() != n {
            return Err(ReductionError::DimensionMismatch(format!(
                "vector {i} has {} entries, expected {n}",
                v.len()
            )));
        }
        for t in &vector_times {
            driver.delete(*t)?;
        }
        for (k, (t, x)) in vector_times.iter().zip(&v).enumerate() {
            driver.insert(*t, RetroOp::set(1, k, Some(*x)))?;
        }
        let product: Vec<i64> = row_ends
            .iter()
            .map(|t| driver.query(*t).expect("both lists fully set"))
            .collect();
        stream.emit(product.clone())?;
        products.push(product);
        i += 1;
    }
    Ok(Report {
        answer: products,
        census: driver.census,
    })
}
