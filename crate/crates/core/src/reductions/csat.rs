use std::sync::Arc;

use crate::base::circuit::{Bits, Circuit};
use crate::base::{CircuitPair, CircuitPairEntry};
use crate::full::StrategyConfig;
use crate::timeline::{RetroOp, TimeKey};

use super::{Driver, ReductionError, Report};

/// Largest input count the drivers accept; the lists hold `2^(u/2)` entries
/// and the brute-force check enumerates `2^u` assignments.
pub const MAX_CSAT_INPUTS: usize = 30;

/// Satisfiability by enumerating all `2^u` inputs.
pub fn brute_csat(circuit: &Circuit) -> Result<bool, ReductionError> {
    let u = circuit.num_inputs();
    if u > MAX_CSAT_INPUTS {
        return Err(ReductionError::TooManyInputs(u));
    }
    circuit.validate()?;
    for x in 0..1u64 << u {
        if circuit.eval(&Bits::lexicographic(x, u).0)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Decides satisfiability of a circuit with an even number `u` of inputs
/// through a fully retroactive circuit-pair structure.
///
/// Both lists `A = B` enumerate `(C, w)` over all `w` of length `u/2`,
/// split into `l = 2^ceil(u/4)` groups. Groups of `B` are appended to `L2`
/// ending at times `q_j`; each group of `A` replaces the idle placeholders
/// at the earlier times `t_k`, after which every `q_j` is queried.
pub fn solve_csat_retro(circuit: &Circuit, config: &StrategyConfig) -> Result<Report<bool>, ReductionError> {
    let u = circuit.num_inputs();
    if u % 2 == 1 {
        return Err(ReductionError::OddInputCount(u));
    }
    if u > MAX_CSAT_INPUTS {
        return Err(ReductionError::TooManyInputs(u));
    }
    circuit.validate()?;
    let half = u / 2;
    let shared = Arc::new(circuit.clone());
    let entries: Vec<CircuitPairEntry> = (0..1u64 << half)
        .map(|i| CircuitPairEntry::new(shared.clone(), Bits::lexicographic(i, half)))
        .collect();
    let groups = 1usize << u.div_ceil(4);
    let group_len = entries.len().div_ceil(groups);

    let mut driver = Driver::new(config, &CircuitPair::new(circuit.size()));
    let placeholders: Vec<TimeKey> = (0..group_len)
        .map(|k| driver.append(RetroOp::set(1, k, None)))
        .collect::<Result<_, _>>()?;
    let mut group_ends = Vec::new();
    for group in entries.chunks(group_len) {
        let mut last = TimeKey(0);
        for k in 0..group_len {
            last = driver.append(RetroOp::set(2, k, group.get(k).cloned()))?;
        }
        group_ends.push(last);
    }

    let mut found = false;
    for group in entries.chunks(group_len) {
        for (k, t) in placeholders.iter().enumerate() {
            driver.replace(*t, RetroOp::set(1, k, group.get(k).cloned()))?;
        }
        for q in &group_ends {
            found |= driver.query(*q);
        }
    }
    Ok(Report {
        answer: found,
        census: driver.census,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::circuit::Gate;
    use crate::full::Strategy;

    fn solve(c: &Circuit) -> Report<bool> {
        solve_csat_retro(c, &StrategyConfig::new(Strategy::Auto)).unwrap()
    }

    #[test]
    fn and_is_satisfiable() {
        let c = Circuit::new(2, vec![Gate::Input(0), Gate::Input(1), Gate::And(0, 1)]);
        assert!(solve(&c).answer);
        assert!(brute_csat(&c).unwrap());
    }

    #[test]
    fn padded_contradiction() {
        let c = Circuit::new(
            2,
            vec![
                Gate::Input(0),
                Gate::Not(0),
                Gate::And(0, 1),
                Gate::Const(true),
                Gate::And(2, 3),
            ],
        );
        assert!(!solve(&c).answer);
        assert!(!brute_csat(&c).unwrap());
    }

    #[test]
    fn single_satisfying_assignment() {
        // x0 AND NOT x1 AND x2 AND NOT x3: only 1010.
        let c = Circuit::new(
            4,
            vec![
                Gate::Input(0),
                Gate::Input(1),
                Gate::Input(2),
                Gate::Input(3),
                Gate::Not(1),
                Gate::Not(3),
                Gate::And(0, 4),
                Gate::And(2, 5),
                Gate::And(6, 7),
            ],
        );
        assert!(solve(&c).answer);
    }

    #[test]
    fn odd_inputs_rejected() {
        let c = Circuit::new(1, vec![Gate::Input(0)]);
        assert!(matches!(
            solve_csat_retro(&c, &StrategyConfig::default()),
            Err(ReductionError::OddInputCount(1))
        ));
    }

    #[test]
    fn census_quadratic_in_groups() {
        for u in [2usize, 4, 6, 8, 10] {
            let mut gates: Vec<Gate> = (0..u).map(Gate::Input).collect();
            gates.push(Gate::And(0, 1));
            let r = solve(&Circuit::new(u, gates));
            let l = 1u64 << u.div_ceil(4);
            assert_eq!(r.census.queries, l * l);
            assert!(r.census.total() <= 5 * l * l, "u={u}: {:?}", r.census);
        }
    }
}
