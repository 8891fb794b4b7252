//! The improvement loop: search the derived matrix of the current
//! derangement, compose the cycle found into it, repeat until the engine
//! finds nothing. Also the trace formats and their verifier.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::cost::{CostMatrix, DerivedMatrix};
use crate::engine::{candidates, EngineConfig, IterationRecord, Policy};
use crate::error::{Error, Result};
use crate::oracle::{min_derangement, DEFAULT_ORACLE_LIMIT};
use crate::permutation::{CycleForm, DerangementMode, Permutation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopConfig {
    pub mode: DerangementMode,
    pub engine: EngineConfig,
    pub max_iter: usize,
    /// Candidate cycles tried per step before giving up on the step.
    pub retry_limit: usize,
    pub oracle_check: bool,
    pub oracle_limit: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            mode: DerangementMode::Assignment,
            engine: EngineConfig::default(),
            max_iter: 1000,
            retry_limit: 16,
            oracle_check: false,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// The engine found no admissible negative cycle. Not a proof of optimality.
    EngineFixedPoint,
    OracleCertifiedOptimal,
    OracleRefuted,
    IterationCap,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::EngineFixedPoint => "engine-fixed-point",
            Status::OracleCertifiedOptimal => "oracle-certified-optimal",
            Status::OracleRefuted => "oracle-refuted",
            Status::IterationCap => "iteration-cap",
        })
    }
}

/// One derangement visited by the loop and the cycle that left it, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub index: usize,
    pub derangement: Permutation,
    pub cost: i64,
    pub cycle: Option<CycleForm>,
    pub weight: Option<i64>,
    /// Columns the search at this derangement spent.
    pub columns_used: u64,
    /// Engine candidates rejected because they broke the mode.
    pub rejected: usize,
    pub search: Vec<IterationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementTrace {
    pub n: usize,
    pub mode: DerangementMode,
    pub policy: Policy,
    pub steps: Vec<Step>,
    pub status: Status,
    pub oracle_optimum: Option<i64>,
}

impl ImprovementTrace {
    pub fn final_step(&self) -> &Step {
        self.steps.last().expect("a trace records at least its start")
    }

    pub fn final_derangement(&self) -> &Permutation {
        &self.final_step().derangement
    }

    pub fn final_cost(&self) -> i64 {
        self.final_step().cost
    }

    /// Number of cycles applied.
    pub fn improvements(&self) -> usize {
        self.steps.iter().filter(|s| s.cycle.is_some()).count()
    }

    pub fn records(&self) -> Vec<TraceRecord> {
        let mut out: Vec<TraceRecord> = self
            .steps
            .iter()
            .map(|s| TraceRecord::Step {
                step: s.index,
                derangement: s.derangement.to_string(),
                cost: s.cost,
                cycle: s.cycle.as_ref().map(CycleForm::to_string),
                weight: s.weight,
                columns_used: s.columns_used,
            })
            .collect();
        out.push(TraceRecord::Summary {
            n: self.n,
            mode: self.mode,
            policy: self.policy,
            restart: "every-vertex".into(),
            steps: self.improvements(),
            final_derangement: self.final_derangement().to_string(),
            final_cost: self.final_cost(),
            status: self.status,
            oracle_optimum: self.oracle_optimum,
        });
        out
    }

    /// Machine trace: one JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json::to_string(&r).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }

    /// Human trace: each derangement in row form, the engine rounds under
    /// Roman numerals, each applied cycle in cycle notation.
    pub fn render(&self) -> String {
        let mut out = format!(
            "mode {}, policy {}, {} points\n",
            self.mode, self.policy, self.n
        );
        for s in &self.steps {
            writeln!(out, "\nD_{}  cost {}", s.index, s.cost).unwrap();
            writeln!(out, "{}", s.derangement.row_form()).unwrap();
            for r in &s.search {
                writeln!(out, "  {}", r.render()).unwrap();
            }
            match (&s.cycle, s.weight) {
                (Some(c), Some(w)) => {
                    writeln!(out, "C_{} = {c}  weight {w}", s.index + 1).unwrap();
                }
                _ => writeln!(out, "no admissible negative cycle").unwrap(),
            }
            if s.rejected > 0 {
                writeln!(out, "  ({} candidates rejected by mode)", s.rejected).unwrap();
            }
        }
        write!(out, "\nfinal cost {}, status {}", self.final_cost(), self.status).unwrap();
        if let Some(opt) = self.oracle_optimum {
            write!(out, " (oracle optimum {opt})").unwrap();
        }
        out.push('\n');
        out
    }
}

/// One line of the machine trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceRecord {
    Step {
        step: usize,
        derangement: String,
        cost: i64,
        cycle: Option<String>,
        weight: Option<i64>,
        columns_used: u64,
    },
    Summary {
        n: usize,
        mode: DerangementMode,
        policy: Policy,
        restart: String,
        steps: usize,
        final_derangement: String,
        final_cost: i64,
        status: Status,
        oracle_optimum: Option<i64>,
    },
}

/// `d ∘ c`, provided the result is still a derangement of the given mode.
pub fn apply_cycle(d: &Permutation, c: &CycleForm, mode: DerangementMode) -> Result<Permutation> {
    if c.n() != d.n() {
        return Err(Error::SizeMismatch {
            left: d.n(),
            right: c.n(),
        });
    }
    let next = d.compose(&Permutation::from_cycles(c))?;
    if let Some(vertex) = next.fixed_point() {
        return Err(Error::CreatesFixedPoint { vertex });
    }
    if mode == DerangementMode::TwoFactor {
        if let Some((a, b)) = next.two_cycle() {
            return Err(Error::CreatesTwoCycle { a, b });
        }
    }
    Ok(next)
}

fn violation(msg: String) -> Error {
    Error::InvariantViolation(msg)
}

/// Runs the loop from `d0`.
pub fn improve(m: &CostMatrix, d0: &Permutation, config: &LoopConfig) -> Result<ImprovementTrace> {
    let n = m.n();
    if d0.n() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: d0.n(),
        });
    }
    if !d0.is_derangement(config.mode) {
        return Err(Error::InvalidStart {
            mode: config.mode.to_string(),
        });
    }

    let mut steps = Vec::new();
    let mut current = d0.clone();
    let mut cost = m.permutation_cost(&current)?;
    let mut status = Status::IterationCap;

    for index in 0..=config.max_iter {
        if index == config.max_iter {
            steps.push(Step {
                index,
                derangement: current.clone(),
                cost,
                cycle: None,
                weight: None,
                columns_used: 0,
                rejected: 0,
                search: Vec::new(),
            });
            break;
        }
        let dm = DerivedMatrix::new(m, &current)?;
        let outcome = candidates(&dm, &config.engine, config.retry_limit.max(1));
        let mut rejected = 0;
        let mut chosen = None;
        for cand in &outcome.cycles {
            match apply_cycle(&current, &cand.cycle, config.mode) {
                Ok(next) => {
                    chosen = Some((cand, next));
                    break;
                }
                Err(Error::CreatesFixedPoint { .. } | Error::CreatesTwoCycle { .. }) => {
                    rejected += 1
                }
                Err(e) => return Err(e),
            }
        }
        let Some((cand, next)) = chosen else {
            steps.push(Step {
                index,
                derangement: current.clone(),
                cost,
                cycle: None,
                weight: None,
                columns_used: outcome.columns.get(),
                rejected,
                search: outcome.iterations,
            });
            status = Status::EngineFixedPoint;
            break;
        };

        let recomputed = dm.cycle_weight(&cand.cycle)?;
        let next_cost = m.permutation_cost(&next)?;
        if recomputed != cand.weight || next_cost - cost != cand.weight {
            return Err(violation(format!(
                "step {index}: cycle {} reports weight {}, recomputed {recomputed}, cost change {}",
                cand.cycle,
                cand.weight,
                next_cost - cost
            )));
        }
        if next_cost >= cost {
            return Err(violation(format!(
                "step {index}: cost did not decrease ({cost} -> {next_cost})"
            )));
        }
        if !next.is_derangement(config.mode) {
            return Err(violation(format!("step {index}: left {} mode", config.mode)));
        }
        steps.push(Step {
            index,
            derangement: current,
            cost,
            cycle: Some(cand.cycle.clone()),
            weight: Some(cand.weight),
            columns_used: outcome.columns.get(),
            rejected,
            search: outcome.iterations.clone(),
        });
        current = next;
        cost = next_cost;
    }

    let mut oracle_optimum = None;
    if config.oracle_check && n <= config.oracle_limit {
        let opt = min_derangement(m, config.mode, config.oracle_limit)?.optimum_value;
        if cost < opt {
            return Err(violation(format!(
                "final cost {cost} is below the oracle minimum {opt}"
            )));
        }
        status = if cost == opt {
            Status::OracleCertifiedOptimal
        } else {
            Status::OracleRefuted
        };
        oracle_optimum = Some(opt);
    }

    Ok(ImprovementTrace {
        n,
        mode: config.mode,
        policy: config.engine.policy,
        steps,
        status,
        oracle_optimum,
    })
}

/// What [`verify_trace`] checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyReport {
    pub steps: usize,
    pub final_cost: i64,
}

/// Re-checks a machine trace against the matrix: every cost, every cycle
/// weight, every composition and the strict decrease. Malformed input is a
/// parse error; arithmetic that does not hold is an invariant violation.
pub fn verify_trace(m: &CostMatrix, text: &str) -> Result<VerifyReport> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TraceRecord = serde_json::from_str(line)
            .map_err(|e| Error::Parse(format!("trace line {}: {e}", i + 1)))?;
        records.push(record);
    }
    let Some(TraceRecord::Summary {
        n,
        mode,
        steps: applied,
        final_derangement,
        final_cost,
        ..
    }) = records.pop()
    else {
        return Err(Error::Parse("trace must end with a summary record".into()));
    };
    if n != m.n() {
        return Err(Error::SizeMismatch { left: m.n(), right: n });
    }

    let mut states = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let TraceRecord::Step {
            step,
            derangement,
            cost,
            cycle,
            weight,
            ..
        } = r
        else {
            return Err(Error::Parse("summary record before the end of the trace".into()));
        };
        if *step != i {
            return Err(violation(format!("step {step} recorded at position {i}")));
        }
        let d: Permutation = derangement.parse()?;
        let cycle = match cycle {
            Some(c) => Some(CycleForm::parse(c, n)?),
            None => None,
        };
        states.push((d, *cost, cycle, *weight));
    }
    if states.is_empty() {
        return Err(Error::Parse("trace has no steps".into()));
    }

    for (i, (d, cost, cycle, weight)) in states.iter().enumerate() {
        if d.n() != n || !d.is_derangement(mode) {
            return Err(violation(format!("step {i}: {d} is not a {mode} derangement")));
        }
        let actual = m.permutation_cost(d)?;
        if actual != *cost {
            return Err(violation(format!("step {i}: recorded cost {cost}, actual {actual}")));
        }
        let last = i + 1 == states.len();
        match (cycle, weight) {
            (Some(c), Some(w)) => {
                let Some((next, next_cost, _, _)) = states.get(i + 1) else {
                    return Err(violation(format!("step {i}: cycle without a successor")));
                };
                let dm = DerivedMatrix::new(m, d)?;
                let recomputed = dm
                    .cycle_weight(c)
                    .map_err(|e| violation(format!("step {i}: {e}")))?;
                if recomputed != *w {
                    return Err(violation(format!(
                        "step {i}: recorded weight {w}, recomputed {recomputed}"
                    )));
                }
                if *w >= 0 || next_cost >= cost {
                    return Err(violation(format!("step {i}: cost does not strictly decrease")));
                }
                if &d.compose(&Permutation::from_cycles(c))? != next {
                    return Err(violation(format!("step {i}: next derangement is not D∘C")));
                }
                if *cost + w != *next_cost {
                    return Err(violation(format!("step {i}: cost change differs from weight")));
                }
            }
            (None, None) if last => {}
            _ => return Err(violation(format!("step {i}: inconsistent cycle record"))),
        }
    }

    let (last_d, last_cost, _, _) = states.last().unwrap();
    if applied != states.len() - 1
        || final_cost != *last_cost
        || final_derangement != last_d.to_string()
    {
        return Err(violation("summary disagrees with the recorded steps".into()));
    }
    Ok(VerifyReport {
        steps: applied,
        final_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w4() -> CostMatrix {
        CostMatrix::parse("4\n0 10 1 1\n10 0 1 1\n1 1 0 10\n1 1 10 0").unwrap()
    }

    fn t3() -> CostMatrix {
        CostMatrix::parse("3\n0 5 2\n5 0 4\n2 4 0").unwrap()
    }

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_mapping(v).unwrap()
    }

    #[test]
    fn apply_cycle_examples() {
        let c = CycleForm::parse("(1 3 2 4)", 4).unwrap();
        let next = apply_cycle(&perm(&[2, 1, 4, 3]), &c, DerangementMode::Assignment).unwrap();
        assert_eq!(next, perm(&[4, 3, 1, 2]));
        assert_eq!(next.cycles().to_string(), "(1 4 2 3)");

        let d = perm(&[3, 4, 5, 1, 2]);
        assert_eq!(apply_cycle(&d, &CycleForm::empty(5), DerangementMode::TwoFactor), Ok(d));

        let c = CycleForm::parse("(1 2)", 3).unwrap();
        assert_eq!(
            apply_cycle(&perm(&[2, 3, 1]), &c, DerangementMode::Assignment),
            Err(Error::CreatesFixedPoint { vertex: 2 })
        );
    }

    #[test]
    fn apply_cycle_two_cycle_depends_on_mode() {
        // (1 2 3 4) composed with (1 3) gives (1 4)(2 3)
        let c = CycleForm::parse("(1 3)", 4).unwrap();
        let d = Permutation::n_cycle(4);
        assert_eq!(
            apply_cycle(&d, &c, DerangementMode::TwoFactor),
            Err(Error::CreatesTwoCycle { a: 1, b: 4 })
        );
        assert_eq!(
            apply_cycle(&d, &c, DerangementMode::Assignment).unwrap().to_string(),
            "4 3 2 1"
        );
    }

    #[test]
    fn w4_improves_in_one_step() {
        let config = LoopConfig {
            oracle_check: true,
            ..LoopConfig::default()
        };
        let trace = improve(&w4(), &perm(&[2, 1, 4, 3]), &config).unwrap();
        assert_eq!(trace.improvements(), 1);
        let first = &trace.steps[0];
        assert_eq!(first.cycle.as_ref().unwrap().to_string(), "(1 3 2 4)");
        assert_eq!(first.weight, Some(-36));
        assert_eq!(trace.final_derangement(), &perm(&[4, 3, 1, 2]));
        assert_eq!(trace.final_cost(), 4);
        assert_eq!(trace.status, Status::OracleCertifiedOptimal);

        let plain = improve(&w4(), &perm(&[2, 1, 4, 3]), &LoopConfig::default()).unwrap();
        assert_eq!(plain.status, Status::EngineFixedPoint);
    }

    #[test]
    fn t3_is_already_optimal() {
        let config = LoopConfig {
            oracle_check: true,
            ..LoopConfig::default()
        };
        let trace = improve(&t3(), &Permutation::n_cycle(3), &config).unwrap();
        assert_eq!(trace.improvements(), 0);
        assert_eq!(trace.final_cost(), 11);
        assert_eq!(trace.status, Status::OracleCertifiedOptimal);
        assert_eq!(trace.oracle_optimum, Some(11));
    }

    #[test]
    fn flat_costs_never_move() {
        let m = CostMatrix::new(6, vec![5; 36]).unwrap();
        let trace = improve(&m, &perm(&[2, 3, 1, 5, 6, 4]), &LoopConfig::default()).unwrap();
        assert_eq!(trace.improvements(), 0);
        assert_eq!(trace.status, Status::EngineFixedPoint);
    }

    #[test]
    fn invalid_start_rejected() {
        let config = LoopConfig {
            mode: DerangementMode::TwoFactor,
            ..LoopConfig::default()
        };
        assert!(matches!(
            improve(&w4(), &perm(&[2, 1, 4, 3]), &config),
            Err(Error::InvalidStart { .. })
        ));
        assert!(matches!(
            improve(&w4(), &Permutation::identity(4), &LoopConfig::default()),
            Err(Error::InvalidStart { .. })
        ));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let config = LoopConfig {
            max_iter: 0,
            ..LoopConfig::default()
        };
        let trace = improve(&w4(), &perm(&[2, 1, 4, 3]), &config).unwrap();
        assert_eq!(trace.status, Status::IterationCap);
        assert_eq!(trace.final_cost(), 40);
        assert!(verify_trace(&w4(), &trace.to_jsonl()).is_ok());
    }

    #[test]
    fn jsonl_shape() {
        let trace = improve(&w4(), &perm(&[2, 1, 4, 3]), &LoopConfig::default()).unwrap();
        let text = trace.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with(
            r#"{"kind":"step","step":0,"derangement":"2 1 4 3","cost":40,"cycle":"(1 3 2 4)","weight":-36,"#
        ));
        assert!(lines[2].contains(r#""status":"engine-fixed-point""#));
        assert_eq!(
            verify_trace(&w4(), &text),
            Ok(VerifyReport {
                steps: 1,
                final_cost: 4
            })
        );
    }

    #[test]
    fn verify_rejects_tampering() {
        let trace = improve(&w4(), &perm(&[2, 1, 4, 3]), &LoopConfig::default()).unwrap();
        let text = trace.to_jsonl();
        let bad = text.replace(r#""weight":-36"#, r#""weight":-35"#);
        assert!(verify_trace(&w4(), &bad).unwrap_err().is_invariant_violation());
        let bad = text.replace(r#""cost":40"#, r#""cost":41"#);
        assert!(verify_trace(&w4(), &bad).unwrap_err().is_invariant_violation());
        assert!(matches!(verify_trace(&w4(), "{not json"), Err(Error::Parse(_))));
        let truncated: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(matches!(verify_trace(&w4(), &truncated), Err(Error::Parse(_))));
    }

    #[test]
    fn human_rendering_mentions_every_step() {
        let trace = improve(&w4(), &perm(&[2, 1, 4, 3]), &LoopConfig::default()).unwrap();
        let text = trace.render();
        assert!(text.contains("D_0  cost 40\n1 2 3 4\n2 1 4 3\n"));
        assert!(text.contains("  I. attempted"));
        assert!(text.contains("C_1 = (1 3 2 4)  weight -36"));
        assert!(text.contains("D_1  cost 4\n1 2 3 4\n4 3 1 2\n"));
        assert!(text.ends_with("final cost 4, status engine-fixed-point\n"));
    }
}
