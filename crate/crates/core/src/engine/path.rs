//! Search paths and the admissibility predicate for extending them.

use crate::cost::{DerivedMatrix, Edge, EdgeSet};
use crate::error::{Error, Result};
use crate::permutation::{canonical_rotation, CycleForm};

/// Which revisits a search may make.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathFlavor {
    /// Paths stay simple; cycles only close back at the source.
    #[default]
    Simple,
    /// A path may revisit one interior vertex; the loop it closes is
    /// extracted as an independent cycle.
    NonSimple,
}

/// An admissible path `source → … → end` in the derived graph.
///
/// Each arc `(x, y)` creates the cost-matrix edge `{x, D(y)}`; those edges
/// are kept pairwise distinct, so there are exactly as many as arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPath {
    vertices: Vec<usize>,
    value: i64,
    new_edges: Vec<Edge>,
}

/// How an admissible arc `(end, a)` relates to the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// `a` is a new vertex.
    Open,
    /// `a` is the source: the path closes into a cycle.
    Close,
    /// `a` is the interior vertex at this position (non-simple flavor only).
    Revisit(usize),
}

impl SearchPath {
    pub fn start(source: usize) -> Self {
        SearchPath {
            vertices: vec![source],
            value: 0,
            new_edges: Vec::new(),
        }
    }

    /// Builds a simple path arc by arc, failing on the first inadmissible arc.
    pub fn from_vertices(dm: &DerivedMatrix, vertices: &[usize]) -> Result<Self> {
        let (&source, rest) = vertices
            .split_first()
            .ok_or_else(|| Error::Parse("empty path".into()))?;
        let mut path = SearchPath::start(source);
        for &a in rest {
            match path.classify(dm, a, PathFlavor::Simple)? {
                Some(Extension::Open) => path = path.extended(dm, a),
                _ => {
                    return Err(Error::InadmissibleArc {
                        from: path.end(),
                        to: a,
                    })
                }
            }
        }
        Ok(path)
    }

    pub fn source(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    pub fn arcs(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn new_edges(&self) -> EdgeSet {
        self.new_edges.iter().copied().collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    fn has_arc(&self, from: usize, to: usize) -> bool {
        self.vertices.windows(2).any(|w| w[0] == from && w[1] == to)
    }

    /// Distinct created edges equal the arc count.
    pub fn edge_count_holds(&self) -> bool {
        let e = &self.new_edges;
        e.len() == self.arcs() && (0..e.len()).all(|i| !e[i + 1..].contains(&e[i]))
    }

    /// Applies the admissibility predicate to the arc `(end, a)`.
    ///
    /// With `e = {end, D(a)}` the arc is admissible when: `a` keeps the path
    /// simple (or closes at the source, or is the single allowed revisit);
    /// if `e` is an edge of `D` then `D(a)` already lies on the path; the arc
    /// `(D(a), D⁻¹(end))`, which would have created `e` before, is not on the
    /// path; and `e` is not among the edges the path already created.
    pub fn classify(
        &self,
        dm: &DerivedMatrix,
        a: usize,
        flavor: PathFlavor,
    ) -> Result<Option<Extension>> {
        let end = self.end();
        if dm.delta(end, a).is_none() {
            return Err(Error::ForbiddenArc { from: end, to: a });
        }
        let step = if a == self.source() {
            Extension::Close
        } else if let Some(pos) = self.vertices.iter().position(|&v| v == a) {
            match flavor {
                PathFlavor::Simple => return Ok(None),
                PathFlavor::NonSimple => Extension::Revisit(pos),
            }
        } else {
            Extension::Open
        };

        let base = dm.base();
        let image = base.apply(a);
        if base.apply(image) == end && !self.contains(image) {
            return Ok(None);
        }
        if self.has_arc(image, dm.base_inverse().apply(end)) {
            return Ok(None);
        }
        if self.new_edges.contains(&Edge::new(end, image)) {
            return Ok(None);
        }
        Ok(Some(step))
    }

    /// Copy of the path with the arc `(end, a)` appended. Does not re-check
    /// admissibility.
    pub(crate) fn extended(&self, dm: &DerivedMatrix, a: usize) -> SearchPath {
        let end = self.end();
        let delta = dm.delta(end, a).expect("extension along a forbidden arc");
        let mut vertices = Vec::with_capacity(self.vertices.len() + 1);
        vertices.extend_from_slice(&self.vertices);
        vertices.push(a);
        let mut new_edges = Vec::with_capacity(self.new_edges.len() + 1);
        new_edges.extend_from_slice(&self.new_edges);
        new_edges.push(Edge::new(end, dm.base().apply(a)));
        SearchPath {
            vertices,
            value: self.value + delta,
            new_edges,
        }
    }
}

/// True when `q` may be extended by `a` into a longer simple path or a
/// closed cycle.
pub fn admissible_extension(q: &SearchPath, dm: &DerivedMatrix, a: usize) -> Result<bool> {
    Ok(q.classify(dm, a, PathFlavor::Simple)?.is_some())
}

/// Whether the cyclic sequence passes the predicate arc by arc when built
/// from the vertex at `start`.
pub fn cycle_admissible_from(dm: &DerivedMatrix, cycle: &[usize], start: usize) -> bool {
    let k = cycle.len();
    if k < 2 {
        return false;
    }
    let mut path = SearchPath::start(cycle[start]);
    for t in 1..k {
        let a = cycle[(start + t) % k];
        match path.classify(dm, a, PathFlavor::Simple) {
            Ok(Some(Extension::Open)) => path = path.extended(dm, a),
            _ => return false,
        }
    }
    matches!(
        path.classify(dm, cycle[start], PathFlavor::Simple),
        Ok(Some(Extension::Close))
    )
}

/// First rotation of the cycle from which it is admissible.
pub fn admissible_rotation(dm: &DerivedMatrix, cycle: &[usize]) -> Option<usize> {
    (0..cycle.len()).find(|&s| cycle_admissible_from(dm, cycle, s))
}

/// Extracts the loop of a path whose endpoint repeats an earlier vertex.
pub fn extract_cycle(n: usize, path: &[usize]) -> Result<CycleForm> {
    let mut repeated = None;
    for (i, v) in path.iter().enumerate() {
        if let Some(j) = path[..i].iter().position(|u| u == v) {
            if repeated.is_some() {
                return Err(Error::MultipleRepeats);
            }
            repeated = Some((j, i));
        }
    }
    let (first, second) = repeated.ok_or(Error::NotNonSimple)?;
    if second != path.len() - 1 {
        return Err(Error::MisplacedRepeat {
            vertex: path[second],
        });
    }
    CycleForm::single(n, canonical_rotation(&path[first..second]))
}
