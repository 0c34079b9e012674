use std::io::Write;

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retro_core::workload::{
    run_equivalence, CircuitPairFamily, EquivalenceOutcome, EquivalenceParams, Family, MinPlusFamily,
    ThreeSumFamily,
};
use retro_core::{Strategy, StrategyConfig};

use crate::{write_out, CliError, Instance, StrategyArg};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub instance: Instance,
    /// Retroactive edits per strategy.
    #[arg(long, default_value_t = 1000)]
    pub ops: usize,
    /// Random-time queries per strategy.
    #[arg(long, default_value_t = 200)]
    pub queries: usize,
    #[arg(long, env = "RETRO_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "all")]
    pub strategy: StrategyArg,
    /// Total list slots the random edits touch.
    #[arg(long, default_value_t = 16)]
    pub slots: usize,
}

fn run_one<F: Family>(family: &F, strategy: Strategy, args: &VerifyArgs) -> EquivalenceOutcome {
    let params = EquivalenceParams {
        edits: args.ops,
        queries: args.queries,
        slots: args.slots.max(1),
        check_invariants: true,
        check_purity: true,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    run_equivalence(family, &StrategyConfig::new(strategy), &params, &mut rng)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut failed = Vec::new();
    for strategy in args.strategy.strategies() {
        let o = match args.instance {
            Instance::Minplus => run_one(&MinPlusFamily, strategy, args),
            Instance::ThreeSum => run_one(&ThreeSumFamily, strategy, args),
            Instance::Csat => run_one(&CircuitPairFamily::default(), strategy, args),
        };
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        write_out(
            out,
            format_args!(
                "{verdict} {} {strategy}: edits={} queries={} mismatches={} invariant_failures={} impure_queries={} frugal={}",
                args.instance.name(),
                o.edits,
                o.queries,
                o.mismatches,
                o.invariant_failures.len(),
                o.impure_queries,
                !o.frugality_violated,
            ),
        )?;
        for line in o.examples.iter().chain(o.invariant_failures.iter().take(5)) {
            write_out(out, format_args!("  {line}"))?;
        }
        if !o.passed() {
            failed.push(strategy.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "verification failed for {}",
            failed.join(", ")
        )))
    }
}
