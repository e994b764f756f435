//! Three-partite, three-uniform networks.
//!
//! Every part has the same number of nodes `n`. Nodes and triads are 0-based
//! inside the library; the 1-based convention of data files is converted at
//! the boundary by [`Triad::from_one_based`] and [`NodeId::from_one_based`].
//!
//! Storage is sparse first: a hash set of formed triads plus three secondary
//! indexes. When `n³` fits in the configured bit budget a dense membership
//! bitset and per-`(j, k)` column bitsets over part 1 are also materialized;
//! the enumerators use them when present.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bit budget for the optional dense structures (2^24 bits).
pub const DEFAULT_DENSE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    One,
    Two,
    Three,
}

impl Part {
    pub fn from_number(part: u8) -> Result<Self> {
        match part {
            1 => Ok(Part::One),
            2 => Ok(Part::Two),
            3 => Ok(Part::Three),
            other => Err(Error::InvalidArgument(format!("part {other} is not 1, 2 or 3"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub part: Part,
    /// 0-based index within the part.
    pub index: u32,
}

impl NodeId {
    pub fn new(part: Part, index: u32) -> Self {
        NodeId { part, index }
    }

    pub fn from_one_based(part: Part, index: u32, n: u32) -> Result<Self> {
        if index == 0 || index > n {
            return Err(Error::InvalidArgument(format!(
                "node index {index} outside [1, {n}]"
            )));
        }
        Ok(NodeId { part, index: index - 1 })
    }
}

/// An ordered triple `(i, j, k)` with one node from each part, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triad {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl Triad {
    pub const fn new(i: u32, j: u32, k: u32) -> Self {
        Triad { i, j, k }
    }

    pub fn from_one_based(i: u32, j: u32, k: u32, n: u32) -> Result<Self> {
        for (name, v) in [("i", i), ("j", j), ("k", k)] {
            if v == 0 || v > n {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {v} outside [1, {n}]"
                )));
            }
        }
        Ok(Triad::new(i - 1, j - 1, k - 1))
    }

    pub fn to_one_based(self) -> (u32, u32, u32) {
        (self.i + 1, self.j + 1, self.k + 1)
    }

    pub fn is_valid(self, n: u32) -> bool {
        self.i < n && self.j < n && self.k < n
    }

    #[inline]
    pub(crate) fn index_unchecked(self, n: u32) -> usize {
        let n = n as usize;
        (self.i as usize * n + self.j as usize) * n + self.k as usize
    }
}

impl fmt::Display for Triad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.to_one_based();
        write!(f, "({i},{j},{k})")
    }
}

/// Row-major position of `t` in `[0, n³)`.
pub fn triad_linear_index(t: Triad, n: u32) -> Result<usize> {
    if !t.is_valid(n) {
        return Err(Error::InvalidArgument(format!("triad {t} invalid for n = {n}")));
    }
    Ok(t.index_unchecked(n))
}

pub fn triad_from_linear_index(index: usize, n: u32) -> Result<Triad> {
    let nn = n as usize;
    if index >= nn * nn * nn {
        return Err(Error::InvalidArgument(format!(
            "linear index {index} outside [0, {})",
            nn * nn * nn
        )));
    }
    Ok(Triad::new(
        (index / (nn * nn)) as u32,
        ((index / nn) % nn) as u32,
        (index % nn) as u32,
    ))
}

/// Covariate generator: writes the `p` covariates of a triad into the buffer.
pub type CovariateFn = Arc<dyn Fn(Triad, &mut [f64]) + Send + Sync>;

/// Per-triad covariates, stored densely or computed on demand.
#[derive(Clone)]
pub enum Covariates {
    /// `values[linear_index * p + d]`.
    Dense { p: usize, values: Vec<f64> },
    Generated { p: usize, generator: CovariateFn },
}

impl fmt::Debug for Covariates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Covariates::Dense { p, values } => f
                .debug_struct("Dense")
                .field("p", p)
                .field("len", &values.len())
                .finish(),
            Covariates::Generated { p, .. } => f.debug_struct("Generated").field("p", p).finish(),
        }
    }
}

impl Covariates {
    pub fn dense(p: usize, values: Vec<f64>) -> Self {
        Covariates::Dense { p, values }
    }

    pub fn generated(
        p: usize,
        generator: impl Fn(Triad, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Covariates::Generated {
            p,
            generator: Arc::new(generator),
        }
    }

    pub fn p(&self) -> usize {
        match self {
            Covariates::Dense { p, .. } | Covariates::Generated { p, .. } => *p,
        }
    }

    /// Writes `X_t` into `out` (length `p`).
    pub fn write(&self, t: Triad, n: u32, out: &mut [f64]) {
        match self {
            Covariates::Dense { p, values } => {
                let start = t.index_unchecked(n) * p;
                out.copy_from_slice(&values[start..start + p]);
            }
            Covariates::Generated { generator, .. } => generator(t, out),
        }
    }

    /// `acc += coef * X_t`. `scratch` must have length `p`; it is only used
    /// by generated covariates.
    #[inline]
    pub fn add_scaled(&self, t: Triad, n: u32, coef: f64, acc: &mut [f64], scratch: &mut [f64]) {
        match self {
            Covariates::Dense { p, values } => {
                let start = t.index_unchecked(n) * p;
                for (a, x) in acc.iter_mut().zip(&values[start..start + p]) {
                    *a += coef * x;
                }
            }
            Covariates::Generated { generator, .. } => {
                generator(t, scratch);
                for (a, x) in acc.iter_mut().zip(scratch.iter()) {
                    *a += coef * x;
                }
            }
        }
    }
}

/// Bitset over `n³` triads in row-major order.
#[derive(Clone, Debug)]
struct TriadBits {
    words: Vec<u64>,
}

impl TriadBits {
    fn new(len: usize) -> Self {
        TriadBits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    fn set(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    #[inline]
    fn get(&self, idx: usize) -> bool {
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }
}

/// For every `(j, k)`, a bitset over the part-1 nodes `i` with `Y_ijk = 1`.
#[derive(Clone, Debug)]
pub struct ColumnBits {
    n: u32,
    words_per_column: usize,
    words: Vec<u64>,
}

impl ColumnBits {
    fn new(n: u32) -> Self {
        let words_per_column = (n as usize).div_ceil(64);
        ColumnBits {
            n,
            words_per_column,
            words: vec![0; (n as usize) * (n as usize) * words_per_column],
        }
    }

    fn set(&mut self, t: Triad) {
        let base = (t.j as usize * self.n as usize + t.k as usize) * self.words_per_column;
        self.words[base + t.i as usize / 64] |= 1 << (t.i % 64);
    }

    pub fn words_per_column(&self) -> usize {
        self.words_per_column
    }

    #[inline]
    pub fn column(&self, j: u32, k: u32) -> &[u64] {
        let base = (j as usize * self.n as usize + k as usize) * self.words_per_column;
        &self.words[base..base + self.words_per_column]
    }
}

/// Dyad-level fixed effects `A_ij`, `B_jk`, `C_ik`.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedEffects {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl FixedEffects {
    pub fn zeros(n: usize) -> Self {
        FixedEffects {
            a: DMatrix::zeros(n, n),
            b: DMatrix::zeros(n, n),
            c: DMatrix::zeros(n, n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        for (name, m) in [("A", &self.a), ("B", &self.b), ("C", &self.c)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidArgument(format!("{name} is not {n}x{n}")));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} has non-finite entries")));
            }
        }
        Ok(())
    }

    /// `A_ij + B_jk + C_ik`.
    #[inline]
    pub fn index(&self, t: Triad) -> f64 {
        let (i, j, k) = (t.i as usize, t.j as usize, t.k as usize);
        self.a[(i, j)] + self.b[(j, k)] + self.c[(i, k)]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NetworkOptions {
    /// Bit budget for the dense membership bitset and column bitsets.
    pub dense_budget: u64,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        NetworkOptions {
            dense_budget: DEFAULT_DENSE_BUDGET,
        }
    }
}

type PairIndex = HashMap<(u32, u32), Vec<u32>>;

/// A realized network: formed hyperedges plus covariates on every triad.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct TriadicNetwork {
    n: u32,
    edges: Vec<Triad>,
    members: HashSet<Triad>,
    bits: Option<TriadBits>,
    columns: Option<ColumnBits>,
    index_jk: PairIndex,
    index_ik: PairIndex,
    index_ij: PairIndex,
    covariates: Covariates,
}

impl TriadicNetwork {
    pub fn new(
        n: u32,
        edges: impl IntoIterator<Item = Triad>,
        covariates: Covariates,
    ) -> Result<Self> {
        Self::with_options(n, edges, covariates, NetworkOptions::default())
    }

    pub fn with_options(
        n: u32,
        edges: impl IntoIterator<Item = Triad>,
        covariates: Covariates,
        options: NetworkOptions,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("part size must be positive".into()));
        }
        let n_triads = (n as u64).pow(3);
        if let Covariates::Dense { p, values } = &covariates {
            if *p == 0 {
                return Err(Error::InvalidArgument("covariate dimension must be positive".into()));
            }
            if values.len() as u64 != n_triads * *p as u64 {
                return Err(Error::InvalidArgument(format!(
                    "expected {} covariate values, got {}",
                    n_triads * *p as u64,
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("covariates must be finite".into()));
            }
        } else if covariates.p() == 0 {
            return Err(Error::InvalidArgument("covariate dimension must be positive".into()));
        }

        let mut members = HashSet::new();
        let mut list = Vec::new();
        for t in edges {
            if !t.is_valid(n) {
                return Err(Error::InvalidArgument(format!("triad {t} invalid for n = {n}")));
            }
            if !members.insert(t) {
                return Err(Error::InvalidArgument(format!("duplicate triad {t}")));
            }
            list.push(t);
        }
        list.sort_unstable();

        let use_dense = n_triads <= options.dense_budget;
        let mut bits = use_dense.then(|| TriadBits::new(n_triads as usize));
        let column_bits = (n as u64).pow(2) * (n as u64).div_ceil(64) * 64;
        let mut columns = (column_bits <= options.dense_budget).then(|| ColumnBits::new(n));

        let mut index_jk = PairIndex::new();
        let mut index_ik = PairIndex::new();
        let mut index_ij = PairIndex::new();
        // `list` is sorted by (i, j, k), so every index row comes out sorted.
        for &t in &list {
            if let Some(b) = bits.as_mut() {
                b.set(t.index_unchecked(n));
            }
            if let Some(c) = columns.as_mut() {
                c.set(t);
            }
            index_jk.entry((t.j, t.k)).or_default().push(t.i);
            index_ik.entry((t.i, t.k)).or_default().push(t.j);
            index_ij.entry((t.i, t.j)).or_default().push(t.k);
        }

        Ok(TriadicNetwork {
            n,
            edges: list,
            members,
            bits,
            columns,
            index_jk,
            index_ik,
            index_ij,
            covariates,
        })
    }

    /// Network with no hyperedges and all-zero scalar covariates.
    pub fn empty(n: u32) -> Result<Self> {
        let len = (n as usize).pow(3);
        Self::new(n, [], Covariates::dense(1, vec![0.0; len]))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> usize {
        self.covariates.p()
    }

    /// Formed hyperedges in row-major order.
    pub fn edges(&self) -> &[Triad] {
        &self.edges
    }

    pub fn n_links(&self) -> usize {
        self.edges.len()
    }

    pub fn covariates(&self) -> &Covariates {
        &self.covariates
    }

    pub fn covariate(&self, t: Triad) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        self.covariates.write(t, self.n, &mut out);
        out
    }

    #[inline]
    pub fn contains(&self, t: Triad) -> bool {
        match &self.bits {
            Some(b) => t.is_valid(self.n) && b.get(t.index_unchecked(self.n)),
            None => self.members.contains(&t),
        }
    }

    #[inline]
    pub(crate) fn y(&self, i: u32, j: u32, k: u32) -> bool {
        self.contains(Triad::new(i, j, k))
    }

    pub fn has_dense_bits(&self) -> bool {
        self.bits.is_some()
    }

    pub fn column_bits(&self) -> Option<&ColumnBits> {
        self.columns.as_ref()
    }

    /// Part-1 nodes `i` with `(i, j, k)` formed, ascending.
    pub fn index_jk(&self, j: u32, k: u32) -> &[u32] {
        self.index_jk.get(&(j, k)).map_or(&[], Vec::as_slice)
    }

    /// Part-2 nodes `j` with `(i, j, k)` formed, ascending.
    pub fn index_ik(&self, i: u32, k: u32) -> &[u32] {
        self.index_ik.get(&(i, k)).map_or(&[], Vec::as_slice)
    }

    /// Part-3 nodes `k` with `(i, j, k)` formed, ascending.
    pub fn index_ij(&self, i: u32, j: u32) -> &[u32] {
        self.index_ij.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    /// Number of formed hyperedges containing `v`.
    pub fn degree(&self, v: NodeId) -> Result<usize> {
        if v.index >= self.n {
            return Err(Error::InvalidArgument(format!(
                "node index {} invalid for n = {}",
                v.index + 1,
                self.n
            )));
        }
        let rows = (0..self.n).map(|other| match v.part {
            Part::One => self.index_ij(v.index, other).len(),
            Part::Two => self.index_jk(v.index, other).len(),
            Part::Three => self.index_ik(other, v.index).len(),
        });
        Ok(rows.sum())
    }

    /// `(N² ρ̂, ρ̂)` with `ρ̂ = |edges| / N³`.
    pub fn average_degree_and_density(&self) -> (f64, f64) {
        let n = self.n as f64;
        let rho = self.edges.len() as f64 / (n * n * n);
        (n * n * rho, rho)
    }
}
