//! Label-extension search for admissible negative cycles in a derived matrix.
//!
//! Every source keeps a path matrix: for each endpoint, up to `K` admissible
//! paths ordered by value. One round extends every retained path by every
//! candidate column in ascending order. A path closing back at its source
//! with negative value is a negative cycle; in the non-simple flavor a path
//! that revisits an interior vertex yields the loop it closes.
//!
//! Work is measured in columns: one column per candidate endpoint examined.

mod path;
mod trace;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost::DerivedMatrix;
use crate::error::{Error, Result};
use crate::permutation::{canonical_rotation, CycleForm};

pub use path::{
    admissible_extension, admissible_rotation, cycle_admissible_from, extract_cycle, Extension,
    PathFlavor, SearchPath,
};
pub use trace::{roman, IterationRecord};

/// Which negative cycle a search reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// The first cycle discovered, sources tried in ascending order.
    First,
    /// Minimum weight over all sources; ties go to the smaller canonical cycle.
    #[default]
    Best,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::First => "first",
            Policy::Best => "best",
        })
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Policy::First),
            "best" => Ok(Policy::Best),
            other => Err(Error::Parse(format!(
                "unknown policy {other:?} (expected first or best)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub policy: Policy,
    /// Labels kept per (source, endpoint) cell.
    pub labels: usize,
    /// Drop partial paths whose value is not negative.
    pub prune_nonnegative: bool,
    /// Only traverse arcs with a negative delta.
    pub negative_arcs_only: bool,
    pub flavor: PathFlavor,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            policy: Policy::Best,
            labels: 4,
            prune_nonnegative: true,
            negative_arcs_only: false,
            flavor: PathFlavor::Simple,
        }
    }
}

/// Monotone count of examined columns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnCounter(u64);

impl ColumnCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn tick(&mut self) {
        self.0 += 1;
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedAtSource,
    ExtractedFromNonsimple,
    /// Found by exhaustive enumeration rather than the engine.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCycle {
    /// A single cycle in canonical rotation.
    pub cycle: CycleForm,
    pub weight: i64,
    /// Counter value when the cycle was discovered.
    pub columns_used: ColumnCounter,
    pub provenance: Provenance,
    /// Discovering walk: starts at the search source, ends at the vertex the
    /// final arc returns to (the source, or the revisited vertex).
    pub route: Vec<usize>,
}

impl NegativeCycle {
    pub fn vertices(&self) -> &[usize] {
        &self.cycle.cycles()[0]
    }

    pub fn len(&self) -> usize {
        self.vertices().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn order_key(&self) -> (i64, &[usize]) {
        (self.weight, self.vertices())
    }
}

/// The per-round table of retained paths, one cell per (source, endpoint).
#[derive(Debug, Clone)]
pub struct PathMatrix {
    n: usize,
    iteration: usize,
    cells: Vec<Vec<SearchPath>>,
    /// Negative cycles discovered in the round that produced this matrix.
    closed: Vec<NegativeCycle>,
    attempted: u64,
}

impl PathMatrix {
    /// Round zero: the empty path at each source.
    pub fn initial(n: usize, sources: &[usize]) -> Self {
        let mut pm = PathMatrix::empty(n, 0);
        for &s in sources {
            assert!((1..=n).contains(&s), "source {s} outside 1..{n}");
            pm.cells[(s - 1) * n + (s - 1)] = vec![SearchPath::start(s)];
        }
        pm
    }

    fn empty(n: usize, iteration: usize) -> Self {
        PathMatrix {
            n,
            iteration,
            cells: vec![Vec::new(); n * n],
            closed: Vec::new(),
            attempted: 0,
        }
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn cell(&self, source: usize, end: usize) -> &[SearchPath] {
        &self.cells[(source - 1) * self.n + (end - 1)]
    }

    /// Retained paths in cell order.
    pub fn labels(&self) -> impl Iterator<Item = &SearchPath> {
        self.cells.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }

    pub fn closed(&self) -> &[NegativeCycle] {
        &self.closed
    }

    pub fn attempted(&self) -> u64 {
        self.attempted
    }

    fn retain_only(&mut self, keep: &[usize]) {
        let n = self.n;
        let cell = (keep[0] - 1) * n + (keep[keep.len() - 1] - 1);
        for (i, labels) in self.cells.iter_mut().enumerate() {
            if i == cell {
                labels.retain(|p| p.vertices() == keep);
            } else {
                labels.clear();
            }
        }
    }

    /// Inserts `parent + a` if it ranks among the cell's `k` best labels.
    fn offer(&mut self, k: usize, parent: &SearchPath, a: usize, dm: &DerivedMatrix, value: i64) {
        let cell = &mut self.cells[(parent.source() - 1) * self.n + (a - 1)];
        if cell.len() >= k && value > cell[k - 1].value() {
            return;
        }
        let path = parent.extended(dm, a);
        assert!(
            path.edge_count_holds(),
            "retained path {:?} creates a repeated edge",
            path.vertices()
        );
        let pos = cell.partition_point(|p| (p.value(), p.vertices()) < (path.value(), path.vertices()));
        if pos < k {
            cell.insert(pos, path);
            cell.truncate(k);
        }
    }
}

/// One extension round. Every retained path scans candidate columns in
/// ascending order; each scanned column ticks `counter`.
pub fn extend_iteration(
    pm: &PathMatrix,
    dm: &DerivedMatrix,
    counter: &mut ColumnCounter,
    config: &EngineConfig,
) -> PathMatrix {
    let n = pm.n;
    assert_eq!(n, dm.n(), "path matrix and derived matrix sizes differ");
    assert!(config.labels >= 1, "at least one label per cell");
    let mut next = PathMatrix::empty(n, pm.iteration + 1);
    for path in pm.labels() {
        let end = path.end();
        for a in 1..=n {
            if a == end {
                continue;
            }
            counter.tick();
            let Some(delta) = dm.delta(end, a) else {
                continue;
            };
            if config.negative_arcs_only && delta >= 0 {
                continue;
            }
            next.attempted += 1;
            let step = path
                .classify(dm, a, config.flavor)
                .expect("candidate arc was checked non-forbidden");
            let value = path.value() + delta;
            match step {
                None => {}
                Some(Extension::Open) => {
                    if !(config.prune_nonnegative && value >= 0) {
                        next.offer(config.labels, path, a, dm, value);
                    }
                }
                Some(Extension::Close) => {
                    if value < 0 {
                        let closing = path.extended(dm, a);
                        assert!(closing.edge_count_holds(), "closed cycle repeats an edge");
                        next.closed.push(found(
                            dm,
                            path.vertices(),
                            value,
                            *counter,
                            Provenance::ClosedAtSource,
                            closing.vertices().to_vec(),
                        ));
                    }
                }
                Some(Extension::Revisit(pos)) => {
                    let cycle = &path.vertices()[pos..];
                    let weight = dm
                        .sequence_weight(cycle)
                        .expect("loop arcs lie on an admissible path");
                    if weight < 0 && cycle_admissible_from(dm, cycle, 0) {
                        let mut route = path.vertices().to_vec();
                        route.push(a);
                        next.closed.push(found(
                            dm,
                            cycle,
                            weight,
                            *counter,
                            Provenance::ExtractedFromNonsimple,
                            route,
                        ));
                    }
                }
            }
        }
    }
    next
}

fn found(
    dm: &DerivedMatrix,
    cycle: &[usize],
    weight: i64,
    counter: ColumnCounter,
    provenance: Provenance,
    route: Vec<usize>,
) -> NegativeCycle {
    assert_eq!(
        dm.sequence_weight(cycle),
        Ok(weight),
        "cycle weight disagrees with its recomputation"
    );
    assert!(weight < 0);
    NegativeCycle {
        cycle: CycleForm::single(dm.n(), canonical_rotation(cycle)).expect("valid cycle"),
        weight,
        columns_used: counter,
        provenance,
        route,
    }
}

/// Result of searching one derived matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Distinct cycles in policy order.
    pub cycles: Vec<NegativeCycle>,
    pub columns: ColumnCounter,
    pub iterations: Vec<IterationRecord>,
}

/// Runs up to `n` rounds from each source in the given order, restarting the
/// path matrix per source, and keeps at most `limit` distinct cycles.
///
/// Under [`Policy::First`] the search stops once `limit` cycles are known;
/// under [`Policy::Best`] every source runs to completion.
pub fn search(
    dm: &DerivedMatrix,
    config: &EngineConfig,
    sources: &[usize],
    limit: usize,
) -> SearchOutcome {
    let n = dm.n();
    let mut counter = ColumnCounter::new();
    let mut cycles: Vec<NegativeCycle> = Vec::new();
    let mut seen = HashSet::new();
    // (attempted, retained, columns) per round
    let mut rounds = vec![(0u64, 0usize, 0u64); n];
    let mut deepest = 0;

    'sources: for &source in sources {
        let mut pm = PathMatrix::initial(n, &[source]);
        for round in 1..=n {
            let before = counter.get();
            pm = extend_iteration(&pm, dm, &mut counter, config);
            let r = &mut rounds[round - 1];
            r.0 += pm.attempted;
            r.1 += pm.len();
            r.2 += counter.get() - before;
            deepest = deepest.max(round);
            for cycle in pm.closed.drain(..) {
                if seen.insert(cycle.vertices().to_vec()) {
                    cycles.push(cycle);
                }
            }
            if config.policy == Policy::First && cycles.len() >= limit {
                break 'sources;
            }
            if pm.is_empty() {
                break;
            }
        }
    }

    if config.policy == Policy::Best {
        cycles.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    }
    cycles.truncate(limit);

    let mut total = 0;
    let iterations = rounds[..deepest]
        .iter()
        .enumerate()
        .map(|(i, &(attempted, retained, columns))| {
            total += columns;
            IterationRecord {
                iteration: i + 1,
                attempted,
                retained,
                columns: total,
            }
        })
        .collect();
    SearchOutcome {
        cycles,
        columns: counter,
        iterations,
    }
}

/// Up to `limit` candidate cycles in policy order, every vertex tried as source.
pub fn candidates(dm: &DerivedMatrix, config: &EngineConfig, limit: usize) -> SearchOutcome {
    let sources: Vec<usize> = (1..=dm.n()).collect();
    search(dm, config, &sources, limit)
}

/// The policy's preferred admissible negative cycle. `None` is a heuristic
/// verdict: the label limit can hide cycles.
pub fn find_negative_cycle(dm: &DerivedMatrix, config: &EngineConfig) -> Option<NegativeCycle> {
    candidates(dm, config, 1).cycles.into_iter().next()
}

/// Columns spent when the engine is forced along one walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteReplay {
    pub columns: ColumnCounter,
    pub cycle: NegativeCycle,
}

/// Replays `route` (source first, ending at the vertex its last arc returns
/// to) through [`extend_iteration`], keeping only the label that follows the
/// route after every round. Pruning is disabled so the route is never
/// dropped for its value.
pub fn replay_route(
    dm: &DerivedMatrix,
    route: &[usize],
    config: &EngineConfig,
) -> Result<RouteReplay> {
    if route.len() < 3 {
        return Err(Error::Parse(format!("route {route:?} is too short to close a cycle")));
    }
    let forced = EngineConfig {
        prune_nonnegative: false,
        negative_arcs_only: false,
        ..config.clone()
    };
    let last = route.len() - 1;
    let mut counter = ColumnCounter::new();
    let mut pm = PathMatrix::initial(dm.n(), &route[..1]);
    for i in 1..=last {
        pm = extend_iteration(&pm, dm, &mut counter, &forced);
        let inadmissible = Error::InadmissibleArc {
            from: route[i - 1],
            to: route[i],
        };
        if i == last {
            let cycle = pm
                .closed
                .into_iter()
                .find(|c| c.route == route)
                .ok_or(inadmissible)?;
            return Ok(RouteReplay {
                columns: counter,
                cycle,
            });
        }
        pm.retain_only(&route[..=i]);
        if pm.is_empty() {
            return Err(inadmissible);
        }
    }
    unreachable!("loop returns on its last round")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnComparison {
    /// Forced replay of the whole non-simple walk from its outside source.
    pub path_columns: u64,
    /// Forced replay of the extracted loop from its first vertex on the walk.
    pub cycle_columns: u64,
}

/// Compares the columns needed to reach a loop through a non-simple walk
/// with those needed to build the loop on its own, starting from the vertex
/// where the walk first enters it.
pub fn column_dominance(
    dm: &DerivedMatrix,
    found: &NegativeCycle,
    config: &EngineConfig,
) -> Result<ColumnComparison> {
    let route = &found.route;
    let entry = *route.last().ok_or(Error::NotNonSimple)?;
    let pos = route.iter().position(|&v| v == entry).unwrap();
    if pos == 0 {
        return Err(Error::NotNonSimple);
    }
    let walk = replay_route(
        dm,
        route,
        &EngineConfig {
            flavor: PathFlavor::NonSimple,
            ..config.clone()
        },
    )?;
    let alone = replay_route(
        dm,
        &route[pos..],
        &EngineConfig {
            flavor: PathFlavor::Simple,
            ..config.clone()
        },
    )?;
    if walk.cycle.cycle != alone.cycle.cycle {
        return Err(Error::InvariantViolation(
            "replays closed different cycles".into(),
        ));
    }
    Ok(ColumnComparison {
        path_columns: walk.columns.get(),
        cycle_columns: alone.columns.get(),
    })
}
