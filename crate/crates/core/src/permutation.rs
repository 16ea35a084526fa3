//! Permutations of `E_n = {1, ..., n}` and their disjoint-cycle decomposition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QsoError, Result};
use crate::simplex::IndexSet;

/// A bijection of `{1, ..., n}` stored by images: `images[k - 1] = π(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (1..=n).collect(),
        }
    }

    /// Validates a 1-based image list.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i == 0 || i > n {
                return Err(QsoError::IndexOutOfRange { index: i, max: n });
            }
            if std::mem::replace(&mut seen[i - 1], true) {
                return Err(QsoError::NotABijection(format!("{i} appears twice")));
            }
        }
        Ok(Self { images })
    }

    /// Builds a permutation of `{1, ..., n}` from cycles; later cycles act first.
    pub fn from_cycles(cycles: &[Vec<usize>], n: usize) -> Result<Self> {
        let mut perm = Self::identity(n);
        for cycle in cycles {
            for &i in cycle {
                if i == 0 || i > n {
                    return Err(QsoError::IndexOutOfRange { index: i, max: n });
                }
            }
            let mut seen = cycle.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != cycle.len() {
                return Err(QsoError::NotABijection(format!(
                    "cycle {cycle:?} repeats an element"
                )));
            }
            let mut c = Self::identity(n);
            for (pos, &i) in cycle.iter().enumerate() {
                c.images[i - 1] = cycle[(pos + 1) % cycle.len()];
            }
            perm = perm.compose(&c);
        }
        Ok(perm)
    }

    /// Number of elements acted on.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `π(k)` for `1 <= k <= n`.
    pub fn apply(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.len() {
            return Err(QsoError::IndexOutOfRange {
                index: k,
                max: self.len(),
            });
        }
        Ok(self.images[k - 1])
    }

    /// 0-based image, for hot loops with trusted indices.
    #[inline]
    pub(crate) fn image0(&self, k0: usize) -> usize {
        self.images[k0] - 1
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different size");
        Self {
            images: other.images.iter().map(|&k| self.images[k - 1]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (k, &v) in self.images.iter().enumerate() {
            images[v - 1] = k + 1;
        }
        Self { images }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::identity(self.len());
        for _ in 0..n {
            out = self.compose(&out);
        }
        out
    }

    /// Elements moved by the permutation.
    pub fn support(&self) -> IndexSet {
        IndexSet::from_sorted(
            self.images
                .iter()
                .enumerate()
                .filter(|(i, &v)| v != i + 1)
                .map(|(i, _)| i + 1)
                .collect(),
        )
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = decompose(self);
        if d.cycles.is_empty() {
            return write!(f, "Id");
        }
        for c in &d.cycles {
            write!(f, "(")?;
            for (n, i) in c.iter().enumerate() {
                if n > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Disjoint cycles `τ_1 ... τ_q` (each of length >= 2) plus the fixed points.
///
/// Canonical form: every cycle starts at its smallest element and cycles are
/// sorted by that element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    pub n: usize,
    pub cycles: Vec<Vec<usize>>,
    pub fixed_points: IndexSet,
}

impl CycleDecomposition {
    /// Number of genuine cycles `q`.
    pub fn num_cycles(&self) -> usize {
        self.cycles.len()
    }

    /// Sorted support of cycle `i` (1-based).
    pub fn cycle_support(&self, i: usize) -> IndexSet {
        let mut v = self.cycles[i - 1].clone();
        v.sort_unstable();
        IndexSet::from_sorted(v)
    }

    /// `ord(τ_i)`.
    pub fn cycle_order(&self, i: usize) -> usize {
        self.cycles[i - 1].len()
    }

    /// Union of the cycle supports, i.e. `supp(π)`.
    pub fn support(&self) -> IndexSet {
        let mut v: Vec<usize> = self.cycles.iter().flatten().copied().collect();
        v.sort_unstable();
        IndexSet::from_sorted(v)
    }

    /// Multiplies the cycles back into a permutation.
    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_cycles(&self.cycles, self.n)
            .expect("canonical decomposition is always valid")
    }
}

/// Traces orbits to split `p` into disjoint cycles.
pub fn decompose(p: &Permutation) -> CycleDecomposition {
    let n = p.len();
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    let mut fixed = Vec::new();
    for start in 1..=n {
        if visited[start - 1] {
            continue;
        }
        let mut cycle = vec![start];
        visited[start - 1] = true;
        let mut k = p.images[start - 1];
        while k != start {
            visited[k - 1] = true;
            cycle.push(k);
            k = p.images[k - 1];
        }
        if cycle.len() == 1 {
            fixed.push(start);
        } else {
            cycles.push(cycle);
        }
    }
    // scanning starts in increasing order already yields canonical form
    CycleDecomposition {
        n,
        cycles,
        fixed_points: IndexSet::from_sorted(fixed),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `s = lcm(ord(τ_1), ..., ord(τ_q))`, and 1 for the identity.
pub fn composite_order(d: &CycleDecomposition) -> usize {
    d.cycles
        .iter()
        .map(Vec::len)
        .fold(1, |acc, t| acc / gcd(acc, t) * t)
}

/// Parses `Id`, cycle notation `(1 2)(3,4)` or an image list `2,1,4,3`.
pub fn parse_permutation(text: &str, n: usize) -> Result<Permutation> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("id") {
        return Ok(Permutation::identity(n));
    }
    if t.starts_with('(') {
        let cycles = parse_cycles(t)?;
        return Permutation::from_cycles(&cycles, n);
    }
    let images = parse_ints(t)?;
    if images.len() != n {
        return Err(QsoError::Parse(format!(
            "image list has {} entries, expected {n}",
            images.len()
        )));
    }
    Permutation::from_images(images)
}

fn parse_ints(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| QsoError::Parse(format!("bad integer {tok:?}")))
        })
        .collect()
}

fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| QsoError::Parse(format!("expected '(' at {rest:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| QsoError::Parse("unclosed cycle".into()))?;
        let inner = &body[..close];
        if inner.contains('(') {
            return Err(QsoError::Parse("nested '('".into()));
        }
        let elems = parse_ints(inner)?;
        if elems.is_empty() {
            return Err(QsoError::Parse("empty cycle".into()));
        }
        cycles.push(elems);
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

impl FromStr for Permutation {
    type Err = QsoError;

    /// Parses cycle notation or an image list; the size is inferred from
    /// the largest element mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('(') {
            let cycles = parse_cycles(t)?;
            let n = cycles.iter().flatten().copied().max().unwrap_or(0);
            Permutation::from_cycles(&cycles, n)
        } else {
            Permutation::from_images(parse_ints(t)?)
        }
    }
}
