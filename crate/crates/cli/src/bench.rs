use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retro_core::workload::{CircuitPairFamily, Family, MinPlusFamily, ThreeSumFamily};
use retro_core::{BaseStructure, MeterSnapshot, Strategy, StrategyConfig, TimeKey};
use serde::{Deserialize, Serialize};

use crate::{path_context, write_out, CliError, Instance, StrategyArg};

pub const CSV_HEADER: &str =
    "family,strategy,n,m,updates,queries,base_apply_calls,base_eval_calls,wall_ns,seed";

/// Spacing of the initial sequential inserts; leaves room for retroactive
/// inserts between them.
const STRIDE: i64 = 16;

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub instance: Instance,
    /// Timeline lengths `LO:HI`, both powers of two; every doubling is run.
    #[arg(long, value_name = "LO:HI")]
    pub m_range: String,
    #[arg(long, value_enum, default_value = "all")]
    pub strategy: StrategyArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "RETRO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Slots the workload touches, bounding the structure size.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
}

/// One CSV row. The call counts cover the query phase only; `base_eval_calls`
/// includes entries read while extracting states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub family: String,
    pub strategy: String,
    pub n: usize,
    pub m: usize,
    pub updates: u64,
    pub queries: u64,
    pub base_apply_calls: u64,
    pub base_eval_calls: u64,
    pub wall_ns: u64,
    pub seed: u64,
}

impl BenchRecord {
    pub fn calls_per_query(&self) -> f64 {
        (self.base_apply_calls + self.base_eval_calls) as f64 / self.queries.max(1) as f64
    }
}

pub fn parse_m_range(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("--m-range must be LO:HI with powers of two, LO <= HI; got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if !lo.is_power_of_two() || !hi.is_power_of_two() || lo > hi {
        return Err(bad());
    }
    Ok(std::iter::successors(Some(lo), |m| m.checked_mul(2))
        .take_while(|m| *m <= hi)
        .collect())
}

/// `m` sequential inserts, then `m/4` rounds of one random retroactive insert
/// or delete followed by one random-time query. The workload depends only on
/// `(seed, m)`, so every strategy sees the same operations.
pub fn bench_cell<F: Family>(family: &F, strategy: Strategy, n: usize, m: usize, seed: u64) -> BenchRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (m as u64).rotate_left(32));
    let proto = family.proto();
    let meter = proto.meter().clone();
    let mut retro = StrategyConfig::new(strategy).build(&proto);
    let mut times: Vec<TimeKey> = Vec::with_capacity(m + m / 4);
    for i in 0..m {
        let t = TimeKey(i as i64 * STRIDE);
        retro.fr_insert(t, family.random_op(n, &mut rng)).expect("fresh time");
        times.push(t);
    }
    let horizon = m as i64 * STRIDE;
    let rounds = m / 4;
    let mut spent = MeterSnapshot::default();
    let mut wall_ns = 0u64;
    for _ in 0..rounds {
        if times.is_empty() || rng.gen_bool(0.5) {
            let t = loop {
                let t = TimeKey(rng.gen_range(0..horizon));
                if !retro.timeline().contains(t) {
                    break t;
                }
            };
            retro.fr_insert(t, family.random_op(n, &mut rng)).expect("fresh time");
            times.push(t);
        } else {
            let t = times.swap_remove(rng.gen_range(0..times.len()));
            retro.fr_delete(t).expect("time present");
        }
        let t = TimeKey(rng.gen_range(0..horizon));
        let before = meter.snapshot();
        let started = Instant::now();
        std::hint::black_box(retro.fr_query(t));
        wall_ns += started.elapsed().as_nanos() as u64;
        let d = meter.snapshot().since(&before);
        spent.base_applies += d.base_applies;
        spent.base_evals += d.base_evals;
        spent.base_reads += d.base_reads;
    }
    BenchRecord {
        family: family.name().to_string(),
        strategy: strategy.name().to_string(),
        n,
        m,
        updates: (m + rounds) as u64,
        queries: rounds as u64,
        base_apply_calls: spent.base_applies,
        base_eval_calls: spent.base_evals + spent.base_reads,
        wall_ns,
        seed,
    }
}

pub fn run_bench(
    instance: Instance,
    strategies: &[Strategy],
    n: usize,
    ms: &[usize],
    seed: u64,
) -> Vec<BenchRecord> {
    let mut records = Vec::new();
    for &m in ms {
        for &strategy in strategies {
            records.push(match instance {
                Instance::Minplus => bench_cell(&MinPlusFamily, strategy, n, m, seed),
                Instance::ThreeSum => bench_cell(&ThreeSumFamily, strategy, n, m, seed),
                Instance::Csat => bench_cell(&CircuitPairFamily::default(), strategy, n, m, seed),
            });
        }
    }
    records
}

/// Appends `records`, writing the header only when the file is new or empty.
pub fn append_records(path: &std::path::Path, records: &[BenchRecord]) -> Result<(), CliError> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path_context("opening", path), e))?;
    let empty = file
        .metadata()
        .map_err(|e| CliError::io(path_context("reading", path), e))?
        .len()
        == 0;
    let mut w = csv::WriterBuilder::new().has_headers(empty).from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path_context("writing", path), e))
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ms = parse_m_range(&args.m_range)?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let records = run_bench(args.instance, &args.strategy.strategies(), args.n, &ms, args.seed);
    append_records(&args.out, &records)?;
    for r in &records {
        write_out(
            out,
            format_args!(
                "{} {:<10} m={:<6} calls/query={:.1}",
                r.family,
                r.strategy,
                r.m,
                r.calls_per_query()
            ),
        )?;
    }
    Ok(())
}
