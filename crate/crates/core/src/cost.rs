//! Symmetric cost matrices, permutation costs, undirected edge accounting and
//! the derived matrix whose negative cycles are improving moves.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::permutation::{CycleForm, Permutation};

/// Largest accepted |cost|. Keeps every path sum inside an `i64` for any
/// instance that fits in memory.
pub const MAX_ABS_COST: i64 = 1 << 40;

/// Symmetric `n × n` integer costs. Diagonal entries are stored but never read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    cost: Vec<i64>,
}

impl CostMatrix {
    /// Builds from row-major values, checking symmetry and magnitude off the diagonal.
    pub fn new(n: usize, cost: Vec<i64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("matrix size must be at least 1".into()));
        }
        if cost.len() != n * n {
            return Err(Error::SizeMismatch {
                left: cost.len(),
                right: n * n,
            });
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let value = cost[i * n + j];
                if value.abs() > MAX_ABS_COST {
                    return Err(Error::CostOutOfRange {
                        i: i + 1,
                        j: j + 1,
                        value,
                        limit: MAX_ABS_COST,
                    });
                }
                if j > i && value != cost[j * n + i] {
                    return Err(Error::Asymmetry {
                        i: i + 1,
                        j: j + 1,
                        ij: value,
                        ji: cost[j * n + i],
                    });
                }
            }
        }
        Ok(CostMatrix { n, cost })
    }

    /// Reads the instance format: `n` on the first line, then `n` rows of `n`
    /// whitespace-separated integers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing size line".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad size line {header:?}")))?;
        let mut cost = Vec::with_capacity(n * n);
        for row in 1..=n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {row} of {n}")))?;
            let before = cost.len();
            for token in line.split_whitespace() {
                let v: i64 = token
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer {token:?} in row {row}")))?;
                cost.push(v);
            }
            if cost.len() - before != n {
                return Err(Error::Parse(format!(
                    "row {row} has {} entries, expected {n}",
                    cost.len() - before
                )));
            }
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("unexpected trailing line {extra:?}")));
        }
        CostMatrix::new(n, cost)
    }

    /// Emits the instance format read by [`CostMatrix::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.cost.chunks(self.n) {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cost of the edge `{i, j}`, 1-indexed, `i != j`.
    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> i64 {
        debug_assert!(i != j, "diagonal entries are never read");
        self.cost[(i - 1) * self.n + (j - 1)]
    }

    /// `|p| = Σ cost(x, p(x))`. A 2-cycle pays for its edge twice.
    pub fn permutation_cost(&self, p: &Permutation) -> Result<i64> {
        self.check_size(p)?;
        if let Some(vertex) = p.fixed_point() {
            return Err(Error::FixedPointCost { vertex });
        }
        Ok((1..=self.n).map(|x| self.cost(x, p.apply(x))).sum())
    }

    fn check_size(&self, p: &Permutation) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        Ok(())
    }
}

/// Undirected edge `{a, b}` stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(usize, usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        debug_assert!(a != b);
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn ends(self) -> (usize, usize) {
        (self.0, self.1)
    }
}

/// Multiset of undirected edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet {
    edges: BTreeMap<Edge, usize>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// One edge `{x, p(x)}` per arc of `p`.
    pub fn of_permutation(p: &Permutation) -> Result<Self> {
        if let Some(vertex) = p.fixed_point() {
            return Err(Error::FixedPointCost { vertex });
        }
        Ok((1..=p.n()).map(|x| Edge::new(x, p.apply(x))).collect())
    }

    pub fn insert(&mut self, e: Edge) {
        *self.edges.entry(e).or_insert(0) += 1;
    }

    pub fn multiplicity(&self, e: Edge) -> usize {
        self.edges.get(&e).copied().unwrap_or(0)
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn distinct_len(&self) -> usize {
        self.edges.len()
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> usize {
        self.edges.values().sum()
    }

    /// Every stored edge has multiplicity one.
    pub fn is_edge_distinct(&self) -> bool {
        self.edges.values().all(|&m| m == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, usize)> + '_ {
        self.edges.iter().map(|(&e, &m)| (e, m))
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        let mut set = EdgeSet::new();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

/// Cost deltas of rerouting against a base derangement `D`.
///
/// Entry `(i, j)` is `cost(i, D(j)) - cost(i, D(i))`: arc `(i, j)` replaces
/// the edge `{i, D(i)}` by `{i, D(j)}`. An entry is `None` (forbidden) when
/// `j == i` or `D(j) == i`, since the reroute would fix `i`. Composing `D`
/// with a cycle of arcs changes `|D|` by exactly the cycle's weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedMatrix {
    n: usize,
    delta: Vec<Option<i64>>,
    base: Permutation,
    base_inverse: Permutation,
}

impl DerivedMatrix {
    pub fn new(m: &CostMatrix, base: &Permutation) -> Result<Self> {
        m.check_size(base)?;
        if let Some(vertex) = base.fixed_point() {
            return Err(Error::FixedPointCost { vertex });
        }
        let n = m.n();
        let mut delta = Vec::with_capacity(n * n);
        for i in 1..=n {
            let current = m.cost(i, base.apply(i));
            for j in 1..=n {
                let target = base.apply(j);
                delta.push((j != i && target != i).then(|| m.cost(i, target) - current));
            }
        }
        Ok(DerivedMatrix {
            n,
            delta,
            base: base.clone(),
            base_inverse: base.inverse(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `None` marks a forbidden arc.
    #[inline]
    pub fn delta(&self, i: usize, j: usize) -> Option<i64> {
        self.delta[(i - 1) * self.n + (j - 1)]
    }

    pub fn base(&self) -> &Permutation {
        &self.base
    }

    pub fn base_inverse(&self) -> &Permutation {
        &self.base_inverse
    }

    /// Weight of the closed walk `v0 → v1 → … → v0`.
    pub fn sequence_weight(&self, cycle: &[usize]) -> Result<i64> {
        let k = cycle.len();
        let mut total = 0i64;
        for t in 0..k {
            let (from, to) = (cycle[t], cycle[(t + 1) % k]);
            total += self
                .delta(from, to)
                .ok_or(Error::ForbiddenArc { from, to })?;
        }
        Ok(total)
    }

    /// Sum of [`Self::sequence_weight`] over the cycles of `c`.
    pub fn cycle_weight(&self, c: &CycleForm) -> Result<i64> {
        if c.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: c.n(),
            });
        }
        c.cycles().iter().map(|cy| self.sequence_weight(cy)).sum()
    }

    /// Instance-style dump with forbidden entries rendered as `x`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 1..=self.n {
            for j in 1..=self.n {
                if j > 1 {
                    out.push(' ');
                }
                match self.delta(i, j) {
                    Some(v) => write!(out, "{v}").unwrap(),
                    None => out.push('x'),
                }
            }
            out.push('\n');
        }
        out
    }
}
