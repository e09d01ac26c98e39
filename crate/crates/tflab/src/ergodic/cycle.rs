//! Exhaustive functional-graph oracle over `Z/2^n`.
//!
//! Everything the criteria modules claim is ultimately checked against this:
//! full cycle decomposition of the induced map on all `2^n` states.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::TExpr;

/// Default cap on the number of states an exhaustive run may touch.
pub const DEFAULT_ORACLE_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("state space of 2^{bits} states exceeds the oracle cap of {cap} states")]
    OverCap { bits: u32, cap: u64 },
    #[error("evaluation failed during exhaustive scan: {0}")]
    Eval(String),
}

/// Exhaustive-search configuration.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub cap: u64,
    /// Worker threads for building successor tables.
    pub jobs: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            cap: DEFAULT_ORACLE_CAP,
            jobs: 1,
        }
    }
}

/// Full decomposition of the functional graph of a map on `2^bits` states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    /// log2 of the state count.
    pub bits: u32,
    pub bijective: bool,
    pub single_cycle: bool,
    pub cycle_count: u64,
    /// Terminal cycle length -> multiplicity.
    pub cycle_lengths: BTreeMap<u64, u64>,
    /// Two distinct states with equal image, when not bijective.
    pub collision: Option<(u64, u64)>,
}

impl Oracle {
    pub fn check_cap(&self, bits: u32) -> Result<(), OracleError> {
        if bits >= 63 || (1u64 << bits) > self.cap {
            return Err(OracleError::OverCap {
                bits,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Successor table of `f` on all `2^bits` states.
    pub fn successor_table(
        &self,
        f: &(impl Fn(u64) -> Result<u64, String> + Sync),
        bits: u32,
    ) -> Result<Vec<u64>, OracleError> {
        self.check_cap(bits)?;
        let n = 1usize << bits;
        let jobs = self.jobs.max(1).min(n);
        if jobs == 1 {
            let mut table = Vec::with_capacity(n);
            for x in 0..n as u64 {
                table.push(f(x).map_err(OracleError::Eval)?);
            }
            return Ok(table);
        }
        let mut table = vec![0u64; n];
        let chunk = n.div_ceil(jobs);
        let mut failure: Option<String> = None;
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (ci, slot) in table.chunks_mut(chunk).enumerate() {
                let f = &f;
                handles.push(scope.spawn(move || -> Result<(), String> {
                    let base = (ci * chunk) as u64;
                    for (i, s) in slot.iter_mut().enumerate() {
                        *s = f(base + i as u64)?;
                    }
                    Ok(())
                }));
            }
            for h in handles {
                if let Err(e) = h.join().expect("worker panicked") {
                    failure.get_or_insert(e);
                }
            }
        });
        match failure {
            Some(e) => Err(OracleError::Eval(e)),
            None => Ok(table),
        }
    }

    /// Cycle decomposition from an explicit successor table.
    pub fn cycle_structure_table(&self, table: &[u64]) -> CycleReport {
        let n = table.len();
        let bits = n.trailing_zeros();
        debug_assert_eq!(1usize << bits, n);

        // bijectivity and a collision witness
        let mut seen = vec![false; n];
        let mut first_preimage = vec![u64::MAX; n];
        let mut collision = None;
        for (x, &y) in table.iter().enumerate() {
            let y = y as usize;
            if seen[y] {
                if collision.is_none() {
                    collision = Some((first_preimage[y], x as u64));
                }
            } else {
                seen[y] = true;
                first_preimage[y] = x as u64;
            }
        }
        let bijective = collision.is_none();

        // terminal cycles of the functional graph
        let mut color = vec![0u8; n]; // 0 new, 1 on current path, 2 done
        let mut pos = vec![0u32; n];
        let mut cycle_lengths: BTreeMap<u64, u64> = BTreeMap::new();
        let mut cycle_count = 0u64;
        let mut path: Vec<usize> = Vec::new();
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            path.clear();
            let mut cur = start;
            while color[cur] == 0 {
                color[cur] = 1;
                pos[cur] = path.len() as u32;
                path.push(cur);
                cur = table[cur] as usize;
            }
            if color[cur] == 1 {
                // new cycle closed within this walk
                let len = path.len() as u64 - pos[cur] as u64;
                *cycle_lengths.entry(len).or_insert(0) += 1;
                cycle_count += 1;
            }
            for &v in &path {
                color[v] = 2;
            }
        }

        CycleReport {
            bits,
            bijective,
            single_cycle: bijective && cycle_count == 1,
            cycle_count,
            cycle_lengths,
            collision,
        }
    }

    pub fn cycle_structure_fn(
        &self,
        f: impl Fn(u64) -> Result<u64, String> + Sync,
        bits: u32,
    ) -> Result<CycleReport, OracleError> {
        let table = self.successor_table(&f, bits)?;
        Ok(self.cycle_structure_table(&table))
    }

    /// Cycle decomposition of a univariate expression modulo `2^width`.
    pub fn cycle_structure(&self, f: &TExpr, width: u32) -> Result<CycleReport, OracleError> {
        self.cycle_structure_fn(|x| f.eval1(x, width).map_err(|e| e.to_string()), width)
    }

    /// Single walk from 0: the map is transitive modulo `2^width` iff the
    /// orbit of 0 has length exactly `2^width`.
    pub fn is_transitive(&self, f: &TExpr, width: u32) -> Result<bool, OracleError> {
        self.check_cap(width)?;
        let n = 1u64 << width;
        let mut seen = vec![false; n as usize];
        let mut cur = 0u64;
        for _ in 0..n {
            if seen[cur as usize] {
                return Ok(false);
            }
            seen[cur as usize] = true;
            cur = f
                .eval1(cur, width)
                .map_err(|e| OracleError::Eval(e.to_string()))?;
        }
        Ok(cur == 0)
    }

    pub fn is_bijective(&self, f: &TExpr, width: u32) -> Result<bool, OracleError> {
        self.check_cap(width)?;
        let n = 1u64 << width;
        let mut seen = vec![false; n as usize];
        for x in 0..n {
            let y = f
                .eval1(x, width)
                .map_err(|e| OracleError::Eval(e.to_string()))? as usize;
            if seen[y] {
                return Ok(false);
            }
            seen[y] = true;
        }
        Ok(true)
    }
}

/// Cycle decomposition with the default oracle settings.
pub fn cycle_structure(f: &TExpr, width: u32) -> Result<CycleReport, OracleError> {
    Oracle::default().cycle_structure(f, width)
}

/// State-keyed cycle finding for arbitrary replayable automata: returns
/// (preperiod, period) of the orbit of `state` under `step`, Brent's method.
pub fn brent_cycle<S: Clone + PartialEq>(
    mut state: S,
    step: impl Fn(&S) -> S,
    cap: u64,
) -> Option<(u64, u64)> {
    // find the period first
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = state.clone();
    let mut hare = step(&state);
    let mut steps = 1u64;
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = step(&hare);
        lam += 1;
        steps += 1;
        if steps > cap {
            return None;
        }
    }
    // find the preperiod
    let mut front = state.clone();
    for _ in 0..lam {
        front = step(&front);
    }
    let mut mu = 0u64;
    while state != front {
        state = step(&state);
        front = step(&front);
        mu += 1;
        if mu > cap {
            return None;
        }
    }
    Some((mu, lam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn successor_is_one_four_cycle() {
        let f = parse("x + 1").unwrap();
        let r = cycle_structure(&f, 2).unwrap();
        assert!(r.bijective && r.single_cycle);
        assert_eq!(r.cycle_count, 1);
        assert_eq!(r.cycle_lengths.get(&4), Some(&1));
    }

    #[test]
    fn rc6_quadratic_is_bijective_mod_4() {
        // x + 2x^2 maps 0,1,2,3 to 0,3,2,1
        let f = parse("x + 2*x*x").unwrap();
        let table: Vec<u64> = (0..4).map(|x| f.eval1(x, 2).unwrap()).collect();
        assert_eq!(table, vec![0, 3, 2, 1]);
        let r = cycle_structure(&f, 2).unwrap();
        assert!(r.bijective);
        assert!(!r.single_cycle);
    }

    #[test]
    fn x_plus_x_squared_collides_mod_2() {
        let f = parse("x + x*x").unwrap();
        let r = cycle_structure(&f, 1).unwrap();
        assert!(!r.bijective);
        assert_eq!(r.collision, Some((0, 1)));
    }

    #[test]
    fn parallel_table_matches_serial() {
        let f = parse("x + (x*x | 5)").unwrap();
        let serial = Oracle {
            cap: 1 << 24,
            jobs: 1,
        };
        let par = Oracle {
            cap: 1 << 24,
            jobs: 4,
        };
        let eval = |x: u64| f.eval1(x, 10).map_err(|e| e.to_string());
        assert_eq!(
            serial.successor_table(&eval, 10).unwrap(),
            par.successor_table(&eval, 10).unwrap()
        );
    }

    #[test]
    fn cap_is_enforced() {
        let f = parse("x + 1").unwrap();
        let tiny = Oracle {
            cap: 1 << 8,
            jobs: 1,
        };
        assert!(matches!(
            tiny.cycle_structure(&f, 9),
            Err(OracleError::OverCap { .. })
        ));
    }

    #[test]
    fn brent_finds_preperiod_and_period() {
        // rho shape: 0->1->2->3->4->2
        let step = |s: &u64| -> u64 {
            match s {
                0 => 1,
                1 => 2,
                2 => 3,
                3 => 4,
                _ => 2,
            }
        };
        assert_eq!(brent_cycle(0u64, |s| step(s), 100), Some((2, 3)));
        // constant map
        assert_eq!(brent_cycle(7u64, |_| 3u64, 100), Some((1, 1)));
        assert_eq!(brent_cycle(3u64, |_| 3u64, 100), Some((0, 1)));
    }
}
