//! Exhaustive ground truth for small instances.
//!
//! Everything here is plain enumeration so it can be trusted independently
//! of the engine. Ties resolve to the lexicographically smallest witness.

use crate::cost::{CostMatrix, DerivedMatrix};
use crate::engine::{admissible_rotation, ColumnCounter, NegativeCycle, Provenance};
use crate::error::{Error, Result};
use crate::permutation::{CycleForm, DerangementMode, Permutation};

pub const DEFAULT_ORACLE_LIMIT: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum_value: i64,
    /// A permutation achieving the optimum; for tours, the tour as an n-cycle.
    pub witness: Permutation,
    pub instances_examined: u64,
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::OracleLimit { n, limit });
    }
    Ok(())
}

/// Minimum `|p|` over every permutation valid for `mode`.
pub fn min_derangement(
    m: &CostMatrix,
    mode: DerangementMode,
    limit: usize,
) -> Result<OracleResult> {
    let n = m.n();
    check_limit(n, limit)?;
    let two_factor = mode == DerangementMode::TwoFactor;
    let mut images = vec![0usize; n];
    let mut used = vec![false; n];
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut examined = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn go(
        x: usize,
        partial: i64,
        m: &CostMatrix,
        two_factor: bool,
        images: &mut [usize],
        used: &mut [bool],
        best: &mut Option<(i64, Vec<usize>)>,
        examined: &mut u64,
    ) {
        let n = images.len();
        if x > n {
            *examined += 1;
            if best.as_ref().is_none_or(|(b, _)| partial < *b) {
                *best = Some((partial, images.to_vec()));
            }
            return;
        }
        for y in 1..=n {
            if y == x || used[y - 1] {
                continue;
            }
            // y < x is already placed, so (x y) would close a 2-cycle
            if two_factor && y < x && images[y - 1] == x {
                continue;
            }
            used[y - 1] = true;
            images[x - 1] = y;
            go(x + 1, partial + m.cost(x, y), m, two_factor, images, used, best, examined);
            used[y - 1] = false;
        }
        images[x - 1] = 0;
    }

    go(1, 0, m, two_factor, &mut images, &mut used, &mut best, &mut examined);
    let (optimum_value, images) = best.ok_or_else(|| Error::Infeasible {
        n,
        mode: mode.to_string(),
    })?;
    let witness = Permutation::from_mapping(&images)?;
    debug_assert!(witness.is_derangement(mode));
    if m.permutation_cost(&witness)? != optimum_value {
        return Err(Error::InvariantViolation(
            "oracle witness does not achieve its value".into(),
        ));
    }
    Ok(OracleResult {
        optimum_value,
        witness,
        instances_examined: examined,
    })
}

/// Minimum Hamiltonian cycle cost, each undirected tour evaluated once.
pub fn min_tour(m: &CostMatrix, limit: usize) -> Result<OracleResult> {
    let n = m.n();
    if n < 3 {
        return Err(Error::Range(format!("tours need at least 3 points, got {n}")));
    }
    check_limit(n, limit)?;
    let mut order: Vec<usize> = (2..=n).collect();
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut examined = 0u64;
    loop {
        if order[0] < order[n - 2] {
            examined += 1;
            let mut total = m.cost(1, order[0]) + m.cost(order[n - 2], 1);
            total += order.windows(2).map(|w| m.cost(w[0], w[1])).sum::<i64>();
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, order.clone()));
            }
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    let (optimum_value, order) = best.expect("n >= 3 has at least one tour");
    let mut tour = vec![1];
    tour.extend(order);
    let witness = Permutation::from_cycles(&CycleForm::single(n, tour)?);
    if m.permutation_cost(&witness)? != optimum_value {
        return Err(Error::InvariantViolation(
            "tour witness does not achieve its value".into(),
        ));
    }
    Ok(OracleResult {
        optimum_value,
        witness,
        instances_examined: examined,
    })
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `visit(cycle, weight)` for every simple cycle of at least two arcs
/// over non-forbidden arcs, each once, rotated to start at its smallest vertex.
fn for_each_cycle(dm: &DerivedMatrix, mut visit: impl FnMut(&[usize], i64)) {
    let n = dm.n();
    let mut on_path = vec![false; n];
    let mut path = Vec::with_capacity(n);

    fn go(
        dm: &DerivedMatrix,
        value: i64,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        visit: &mut dyn FnMut(&[usize], i64),
    ) {
        let start = path[0];
        let end = *path.last().unwrap();
        if path.len() >= 2 {
            if let Some(back) = dm.delta(end, start) {
                visit(path, value + back);
            }
        }
        for next in start + 1..=dm.n() {
            if on_path[next - 1] {
                continue;
            }
            let Some(delta) = dm.delta(end, next) else {
                continue;
            };
            on_path[next - 1] = true;
            path.push(next);
            go(dm, value + delta, path, on_path, visit);
            path.pop();
            on_path[next - 1] = false;
        }
    }

    for start in 1..=n {
        path.push(start);
        on_path[start - 1] = true;
        go(dm, 0, &mut path, &mut on_path, &mut visit);
        on_path[start - 1] = false;
        path.pop();
    }
}

fn keep_min(best: &mut Option<(i64, Vec<usize>)>, cycle: &[usize], weight: i64) {
    let better = match best {
        None => true,
        Some((w, c)) => (weight, cycle) < (*w, c.as_slice()),
    };
    if better {
        *best = Some((weight, cycle.to_vec()));
    }
}

fn as_negative_cycle(dm: &DerivedMatrix, best: Option<(i64, Vec<usize>)>) -> Option<NegativeCycle> {
    best.map(|(weight, cycle)| NegativeCycle {
        cycle: CycleForm::single(dm.n(), cycle.clone()).expect("enumerated cycle is valid"),
        weight,
        columns_used: ColumnCounter::new(),
        provenance: Provenance::Exhaustive,
        route: cycle.iter().copied().chain([cycle[0]]).collect(),
    })
}

/// Minimum-weight negative cycle that passes the admissibility predicate
/// from some rotation and keeps the composed permutation valid for `mode`.
/// `None` proves no such cycle exists.
pub fn exhaustive_negative_cycle(
    dm: &DerivedMatrix,
    mode: DerangementMode,
    limit: usize,
) -> Result<Option<NegativeCycle>> {
    check_limit(dm.n(), limit)?;
    let base = dm.base();
    let mut best = None;
    for_each_cycle(dm, |cycle, weight| {
        if weight >= 0 || admissible_rotation(dm, cycle).is_none() {
            return;
        }
        let c = Permutation::from_cycles(&CycleForm::single(dm.n(), cycle.to_vec()).unwrap());
        if base.compose(&c).unwrap().is_derangement(mode) {
            keep_min(&mut best, cycle, weight);
        }
    });
    Ok(as_negative_cycle(dm, best))
}

/// Minimum-weight negative cycle with no admissibility filter. `None` means
/// the base derangement is an optimal assignment.
pub fn exhaustive_negative_cycle_unrestricted(
    dm: &DerivedMatrix,
    limit: usize,
) -> Result<Option<NegativeCycle>> {
    check_limit(dm.n(), limit)?;
    let mut best = None;
    for_each_cycle(dm, |cycle, weight| {
        if weight < 0 {
            keep_min(&mut best, cycle, weight);
        }
    });
    Ok(as_negative_cycle(dm, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use DerangementMode::*;

    fn t3() -> CostMatrix {
        CostMatrix::parse("3\n0 5 2\n5 0 4\n2 4 0").unwrap()
    }

    fn w4() -> CostMatrix {
        CostMatrix::parse("4\n0 10 1 1\n10 0 1 1\n1 1 0 10\n1 1 10 0").unwrap()
    }

    #[test]
    fn min_derangement_w4() {
        let r = min_derangement(&w4(), Assignment, 9).unwrap();
        assert_eq!(r.optimum_value, 4);
        assert_eq!(r.instances_examined, 9);
        // lexicographically first optimum is the 2-cycle pair (1 3)(2 4)
        assert_eq!(r.witness.cycles().to_string(), "(1 3)(2 4)");

        let r = min_derangement(&w4(), TwoFactor, 9).unwrap();
        assert_eq!(r.optimum_value, 4);
        assert_eq!(r.witness.cycles().cycles().len(), 1);
    }

    #[test]
    fn min_derangement_t3() {
        for mode in [Assignment, TwoFactor] {
            let r = min_derangement(&t3(), mode, 9).unwrap();
            assert_eq!((r.optimum_value, r.instances_examined), (11, 2));
        }
    }

    #[test]
    fn infeasible_and_limit() {
        let one = CostMatrix::new(1, vec![0]).unwrap();
        assert!(matches!(min_derangement(&one, Assignment, 9), Err(Error::Infeasible { .. })));
        let two = CostMatrix::new(2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(min_derangement(&two, Assignment, 9).unwrap().optimum_value, 2);
        assert!(matches!(min_derangement(&two, TwoFactor, 9), Err(Error::Infeasible { .. })));
        assert_eq!(
            min_derangement(&w4(), Assignment, 3),
            Err(Error::OracleLimit { n: 4, limit: 3 })
        );
    }

    #[test]
    fn min_tour_examples() {
        let r = min_tour(&w4(), 9).unwrap();
        assert_eq!((r.optimum_value, r.instances_examined), (4, 3));
        assert_eq!(r.witness.cycles().to_string(), "(1 3 2 4)");
        assert_eq!(min_tour(&t3(), 9).unwrap().optimum_value, 11);
        let flat = CostMatrix::new(3, vec![7; 9]).unwrap();
        assert_eq!(min_tour(&flat, 9).unwrap().optimum_value, 21);
        assert!(matches!(min_tour(&CostMatrix::new(2, vec![0; 4]).unwrap(), 9), Err(Error::Range(_))));
    }

    #[test]
    fn tour_count_is_half_factorial() {
        let m = CostMatrix::new(7, vec![1; 49]).unwrap();
        assert_eq!(min_tour(&m, 9).unwrap().instances_examined, 360);
    }

    #[test]
    fn exhaustive_cycles_w4_t3() {
        let d0 = Permutation::from_mapping(&[2, 1, 4, 3]).unwrap();
        let dm = DerivedMatrix::new(&w4(), &d0).unwrap();
        let c = exhaustive_negative_cycle(&dm, Assignment, 9).unwrap().unwrap();
        assert_eq!((c.cycle.to_string(), c.weight), ("(1 3 2 4)".into(), -36));

        let dm = DerivedMatrix::new(&t3(), &Permutation::n_cycle(3)).unwrap();
        assert_eq!(exhaustive_negative_cycle(&dm, Assignment, 9).unwrap(), None);
        assert_eq!(exhaustive_negative_cycle_unrestricted(&dm, 9).unwrap(), None);
    }

    #[test]
    fn optimal_assignment_has_no_negative_cycle() {
        let opt = min_derangement(&w4(), Assignment, 9).unwrap();
        let dm = DerivedMatrix::new(&w4(), &opt.witness).unwrap();
        assert_eq!(exhaustive_negative_cycle_unrestricted(&dm, 9).unwrap(), None);
    }

    #[test]
    fn cycle_enumeration_count() {
        // complete digraph on 4 vertices minus forbidden arcs, counted by hand:
        // base (1 2 3 4) forbids i -> i and i -> i-1
        let m = CostMatrix::new(4, vec![0; 16]).unwrap();
        let dm = DerivedMatrix::new(&m, &Permutation::n_cycle(4)).unwrap();
        let mut count = 0;
        for_each_cycle(&dm, |_, _| count += 1);
        let mut brute = 0;
        let allowed = |i: usize, j: usize| dm.delta(i, j).is_some();
        // 2-cycles
        for a in 1..=4 {
            for b in a + 1..=4 {
                brute += usize::from(allowed(a, b) && allowed(b, a));
            }
        }
        // 3- and 4-cycles rooted at their minimum
        let mut perms = vec![];
        for a in 1..=4 {
            for b in 1..=4 {
                for c in 1..=4 {
                    perms.push(vec![a, b, c]);
                    for d in 1..=4 {
                        perms.push(vec![a, b, c, d]);
                    }
                }
            }
        }
        for p in perms {
            let distinct = (0..p.len()).all(|i| !p[i + 1..].contains(&p[i]));
            let rooted = p.iter().all(|&v| v >= p[0]);
            let closed = (0..p.len()).all(|i| allowed(p[i], p[(i + 1) % p.len()]));
            brute += usize::from(distinct && rooted && closed);
        }
        assert_eq!(count, brute);
    }
}
