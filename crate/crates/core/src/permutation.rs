//! Permutations on `{1..n}`: validation, inversion, composition, cycle
//! decomposition and the two-row "row form".
//!
//! Every public interface speaks 1-indexed vertices. Text forms are exact:
//! the one-line mapping `2 1 4 3` and cycle notation `(1 2)(3 4)` use single
//! spaces and no leading zeros, and are rejected otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which permutations count as feasible derangements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerangementMode {
    /// No fixed points. 2-cycles are allowed (their edge is used twice).
    Assignment,
    /// No fixed points and no 2-cycles, so every arc is a distinct undirected edge.
    TwoFactor,
}

impl DerangementMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DerangementMode::Assignment => "assignment",
            DerangementMode::TwoFactor => "two-factor",
        }
    }
}

impl fmt::Display for DerangementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DerangementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assignment" => Ok(DerangementMode::Assignment),
            "two-factor" => Ok(DerangementMode::TwoFactor),
            other => Err(Error::Parse(format!(
                "unknown mode {other:?} (expected assignment or two-factor)"
            ))),
        }
    }
}

/// A bijection on `{1..n}`. `images[x - 1]` is the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Validates a 1-indexed one-line mapping.
    pub fn from_mapping(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::NotABijection {
                n,
                detail: "empty mapping".into(),
            });
        }
        let mut seen = vec![false; n];
        for (i, &y) in images.iter().enumerate() {
            if y == 0 || y > n {
                return Err(Error::NotABijection {
                    n,
                    detail: format!("image {y} of {} is out of range", i + 1),
                });
            }
            if std::mem::replace(&mut seen[y - 1], true) {
                return Err(Error::NotABijection {
                    n,
                    detail: format!("value {y} appears twice"),
                });
            }
        }
        Ok(Permutation {
            images: images.to_vec(),
        })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutations need at least one point");
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// The single n-cycle `(1 2 ... n)`.
    pub fn n_cycle(n: usize) -> Self {
        assert!(n >= 1, "permutations need at least one point");
        Permutation {
            images: (1..=n).map(|x| x % n + 1).collect(),
        }
    }

    pub fn from_cycles(cycles: &CycleForm) -> Self {
        let mut images: Vec<usize> = (1..=cycles.n).collect();
        for cycle in &cycles.cycles {
            for (t, &v) in cycle.iter().enumerate() {
                images[v - 1] = cycle[(t + 1) % cycle.len()];
            }
        }
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-indexed point `x`.
    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &y) in self.images.iter().enumerate() {
            inv[y - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&y| self.apply(y)).collect(),
        })
    }

    /// Canonical disjoint-cycle form: each cycle starts at its smallest
    /// vertex, cycles ordered by that vertex, fixed points omitted.
    pub fn cycles(&self) -> CycleForm {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if seen[start - 1] || self.apply(start) == start {
                seen[start - 1] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x - 1] {
                seen[x - 1] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            cycles.push(cycle);
        }
        CycleForm { n, cycles }
    }

    pub fn fixed_point(&self) -> Option<usize> {
        (1..=self.n()).find(|&x| self.apply(x) == x)
    }

    /// The first 2-cycle `(a b)` with `a < b`, if any.
    pub fn two_cycle(&self) -> Option<(usize, usize)> {
        (1..=self.n()).find_map(|a| {
            let b = self.apply(a);
            (b > a && self.apply(b) == a).then_some((a, b))
        })
    }

    pub fn is_derangement(&self, mode: DerangementMode) -> bool {
        if self.fixed_point().is_some() {
            return false;
        }
        match mode {
            DerangementMode::Assignment => true,
            DerangementMode::TwoFactor => self.two_cycle().is_none(),
        }
    }

    pub fn row_form(&self) -> RowForm {
        RowForm {
            top: (1..=self.n()).collect(),
            bottom: self.images.clone(),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.images)
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let images = parse_vertex_list(s)?;
        Permutation::from_mapping(&images)
    }
}

/// Disjoint cycles on `{1..n}`; every cycle has at least two vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleForm {
    n: usize,
    cycles: Vec<Vec<usize>>,
}

impl CycleForm {
    pub fn new(n: usize, cycles: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for cycle in &cycles {
            if cycle.len() < 2 {
                return Err(Error::CycleTooShort(cycle.clone()));
            }
            for &v in cycle {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if std::mem::replace(&mut seen[v - 1], true) {
                    return Err(Error::OverlappingCycles { vertex: v });
                }
            }
        }
        Ok(CycleForm { n, cycles })
    }

    pub fn single(n: usize, cycle: Vec<usize>) -> Result<Self> {
        CycleForm::new(n, vec![cycle])
    }

    pub fn empty(n: usize) -> Self {
        CycleForm {
            n,
            cycles: Vec::new(),
        }
    }

    /// Parses `(a b c)(d e)`; `()` is the empty cycle list.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        if text == "()" {
            return Ok(CycleForm::empty(n));
        }
        let mut cycles = Vec::new();
        let mut rest = text;
        if rest.is_empty() {
            return Err(Error::Parse("empty cycle notation".into()));
        }
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?;
            cycles.push(parse_vertex_list(&body[..close])?);
            rest = &body[close + 1..];
        }
        CycleForm::new(n, cycles)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Number of points moved.
    pub fn support_len(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    pub fn canonical(&self) -> CycleForm {
        let mut cycles: Vec<Vec<usize>> =
            self.cycles.iter().map(|c| canonical_rotation(c)).collect();
        cycles.sort();
        CycleForm { n: self.n, cycles }
    }
}

impl fmt::Display for CycleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in &self.cycles {
            f.write_str("(")?;
            write_joined(f, cycle)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Rotates a cyclic sequence so it starts at its smallest vertex.
pub fn canonical_rotation(cycle: &[usize]) -> Vec<usize> {
    let Some(pos) = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| *v)
        .map(|(i, _)| i)
    else {
        return Vec::new();
    };
    cycle[pos..].iter().chain(&cycle[..pos]).copied().collect()
}

/// Two-row presentation: `top` is `1..n`, `bottom` the images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowForm {
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
}

impl RowForm {
    pub fn to_permutation(&self) -> Result<Permutation> {
        if self.top.iter().enumerate().any(|(i, &t)| t != i + 1) {
            return Err(Error::Parse("row form top row must be 1..n".into()));
        }
        Permutation::from_mapping(&self.bottom)
    }
}

impl fmt::Display for RowForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<usize> = self
            .top
            .iter()
            .zip(&self.bottom)
            .map(|(t, b)| t.to_string().len().max(b.to_string().len()))
            .collect();
        for (row, values) in [&self.top, &self.bottom].into_iter().enumerate() {
            if row > 0 {
                writeln!(f)?;
            }
            for (i, (v, w)) in values.iter().zip(&widths).enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v:>w$}")?;
            }
        }
        Ok(())
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, values: &[usize]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Single-space separated positive integers without leading zeros.
fn parse_vertex_list(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Err(Error::Parse("empty vertex list".into()));
    }
    s.split(' ').map(parse_vertex).collect()
}

fn parse_vertex(token: &str) -> Result<usize> {
    let well_formed = !token.is_empty()
        && token.bytes().all(|b| b.is_ascii_digit())
        && !token.starts_with('0');
    if !well_formed {
        return Err(Error::Parse(format!("bad vertex token {token:?}")));
    }
    token
        .parse()
        .map_err(|_| Error::Parse(format!("vertex {token:?} does not fit")))
}
