//! Plastic towers, perfect hash families built from `(R, M, q)`, exhaustive
//! separation checks, rainbow cycles and the closed-form bounds.

use std::fmt;
use std::ops::ControlFlow;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arrays::{array_from_sequence, equations_of_set, BipartiteArray};
use crate::error::{Error, Result};
use crate::json;
use crate::scalar::{iterated_log_map, Int, LogBase, Real};
use crate::sequences::PermSeq;

/// Sorted set `b_1 < … < b_t` of distinct nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlasticSet<T>(Vec<T>);

impl<T: Int> PlasticSet<T> {
    pub fn new(mut elements: Vec<T>) -> Result<Self> {
        elements.sort();
        if elements.len() < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 elements, got {}", elements.len())));
        }
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedEntry(w[0].to_string()));
        }
        if elements[0].is_negative() {
            return Err(Error::NegativeEntry(elements[0].to_string()));
        }
        Ok(PlasticSet(elements))
    }

    pub fn from_i64s(v: &[i64]) -> Result<Self> {
        Self::new(v.iter().map(|&x| T::from_i64_lossless(x)).collect())
    }

    pub fn elements(&self) -> &[T] {
        &self.0
    }

    pub fn t(&self) -> usize {
        self.0.len()
    }

    /// `b_t - b_1`.
    pub fn rank(&self) -> T {
        self.0[self.0.len() - 1].clone() - self.0[0].clone()
    }

    /// All equations `L(U)` for permutation sequences of this set.
    pub fn equations(&self) -> Result<Vec<BipartiteArray<T>>> {
        equations_of_set(&self.0)
    }
}

impl<T: Int> Serialize for PlasticSet<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json::int_vec::serialize(&self.0, s)
    }
}

impl<'de, T: Int> Deserialize<'de> for PlasticSet<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PlasticSet::new(json::int_vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl<T: Int> fmt::Display for PlasticSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// `b_t = ⌊2^{√log m}⌋` and `b_i = ⌊2^{√log b_{i+1}}⌋` below it.
pub fn plastic_tower<T: Int>(m: &T, t: usize) -> Result<PlasticSet<T>> {
    plastic_tower_in(m, t, LogBase::Two)
}

pub fn plastic_tower_in<T: Int>(m: &T, t: usize, base: LogBase) -> Result<PlasticSet<T>> {
    if t < 3 {
        return Err(Error::InvalidParameter(format!("tower height t={t} must be at least 3")));
    }
    let two = T::from_i64_lossless(2);
    let mut levels: Vec<T> = Vec::with_capacity(t);
    let mut above = m.clone();
    for level in (1..=t).rev() {
        let b = iterated_log_map(&above, 0.5, base).ok_or(Error::Overflow("tower level"))?;
        if b < two || b >= above {
            return Err(Error::TowerCollision { level, value: b.to_string() });
        }
        levels.push(b.clone());
        above = b;
    }
    levels.reverse();
    PlasticSet::new(levels)
}

/// Multiset of positive part sizes `w_1 <= … <= w_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ShfType(Vec<usize>);

impl ShfType {
    pub fn new(mut weights: Vec<usize>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidParameter("a type needs at least two weights".into()));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidParameter("weights must be positive".into()));
        }
        weights.sort_unstable();
        Ok(ShfType(weights))
    }

    /// `{1, …, 1}` with `t` parts: the perfect-hashing case.
    pub fn all_ones(t: usize) -> Result<Self> {
        Self::new(vec![1; t])
    }

    pub fn weights(&self) -> &[usize] {
        &self.0
    }

    pub fn t(&self) -> usize {
        self.0.len()
    }

    pub fn u(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_perfect(&self) -> bool {
        self.0.iter().all(|&w| w == 1)
    }
}

impl TryFrom<Vec<usize>> for ShfType {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        ShfType::new(v)
    }
}

impl From<ShfType> for Vec<usize> {
    fn from(t: ShfType) -> Self {
        t.0
    }
}

impl fmt::Display for ShfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// `(R, M)` a matrix was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub r: Vec<u64>,
    pub m: Vec<u64>,
    pub m_verified: bool,
}

/// `N × n` array over `Z_q`, one row per hash function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct HashFamilyMatrix {
    q: u64,
    rows: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

#[derive(Deserialize)]
struct RawMatrix {
    q: u64,
    rows: Vec<Vec<u64>>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

impl TryFrom<RawMatrix> for HashFamilyMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        let mut a = HashFamilyMatrix::new(raw.q, raw.rows)?;
        if let Some(p) = raw.provenance {
            a = a.with_provenance(p)?;
        }
        Ok(a)
    }
}

impl HashFamilyMatrix {
    pub fn new(q: u64, rows: Vec<Vec<u64>>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("alphabet size q must be positive".into()));
        }
        if rows.is_empty() {
            return Err(Error::Malformed("matrix has no rows".into()));
        }
        let n = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("row {i} has {} cells, expected {n}", row.len())));
            }
            if let Some(v) = row.iter().find(|&&v| v >= q) {
                return Err(Error::OutOfRange { value: v.to_string(), lo: "0".into(), hi: (q - 1).to_string() });
            }
        }
        Ok(HashFamilyMatrix { q, rows, provenance: None })
    }

    /// Attaches `(R, M)` after checking the cells match `(y + b_i m) mod q`.
    pub fn with_provenance(mut self, p: Provenance) -> Result<Self> {
        if p.r.len() != self.n_rows() || (self.q as u128) * (p.m.len() as u128) != self.n_cols() as u128 {
            return Err(Error::Malformed("provenance does not match the matrix shape".into()));
        }
        let expected = phf_rows(&p.r, &p.m, self.q);
        if expected != self.rows {
            return Err(Error::Malformed("cells do not match the provenance".into()));
        }
        self.provenance = Some(p);
        Ok(self)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn cell(&self, row: usize, col: usize) -> u64 {
        self.rows[row][col]
    }

    pub fn column(&self, col: usize) -> Vec<u64> {
        self.rows.iter().map(|r| r[col]).collect()
    }

    /// `(y, m)` of a column of a constructed matrix.
    pub fn column_label(&self, col: usize) -> Option<(u64, u64)> {
        let p = self.provenance.as_ref()?;
        Some((col as u64 % self.q, p.m[col / self.q as usize]))
    }

    /// CSV with one line per row, preceded by `#`-prefixed header lines.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# q={}\n", self.q);
        if let Some(p) = &self.provenance {
            out.push_str(&format!("# r={}\n", p.r.iter().join(",")));
            out.push_str(&format!("# m={}\n", p.m.iter().join(",")));
            out.push_str(&format!("# m_verified={}\n", p.m_verified));
        }
        for row in &self.rows {
            out.push_str(&row.iter().join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut q = None;
        let (mut r, mut m, mut verified) = (None, None, false);
        let mut rows = Vec::new();
        let list = |v: &str| -> Result<Vec<u64>> {
            if v.trim().is_empty() {
                return Ok(Vec::new());
            }
            v.split(',').map(|x| x.trim().parse().map_err(|_| Error::Malformed(format!("bad number {x:?}")))).collect()
        };
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(header) = line.strip_prefix('#') {
                let Some((key, value)) = header.trim().split_once('=') else {
                    continue;
                };
                match key.trim() {
                    "q" => q = Some(value.trim().parse().map_err(|_| Error::Malformed(format!("bad q {value:?}")))?),
                    "r" => r = Some(list(value)?),
                    "m" => m = Some(list(value)?),
                    "m_verified" => verified = value.trim() == "true",
                    _ => {}
                }
            } else {
                rows.push(list(line)?);
            }
        }
        let q = q.ok_or_else(|| Error::Malformed("missing `# q=` header".into()))?;
        if rows.is_empty() {
            if let Some(r) = &r {
                rows = vec![Vec::new(); r.len()];
            }
        }
        let a = HashFamilyMatrix::new(q, rows)?;
        match (r, m) {
            (Some(r), Some(m)) => a.with_provenance(Provenance { r, m, m_verified: verified }),
            _ => Ok(a),
        }
    }
}

fn phf_rows(r: &[u64], m: &[u64], q: u64) -> Vec<Vec<u64>> {
    r.iter()
        .map(|&b| {
            m.iter()
                .flat_map(|&mv| {
                    let shift = ((b as u128 * mv as u128) % q as u128) as u64;
                    (0..q).map(move |y| ((y as u128 + shift as u128) % q as u128) as u64)
                })
                .collect()
        })
        .collect()
}

/// Largest number of cells a constructed matrix may hold.
pub const MAX_CELLS: u128 = 200_000_000;

fn to_u64<T: Int>(v: &T, what: &str) -> Result<u64> {
    v.to_u64().ok_or_else(|| Error::InvalidParameter(format!("{what} {v} does not fit in 64 bits")))
}

/// The `t × q|M|` matrix with columns `(y + b_1 m, …, y + b_t m) mod q`,
/// ordered lexicographically by `(m, y)`.
pub fn build_phf<T: Int>(r: &PlasticSet<T>, m_set: &[T], q: &T, m_verified: bool) -> Result<HashFamilyMatrix> {
    let qv = to_u64(q, "q")?;
    if qv == 0 {
        return Err(Error::InvalidParameter("alphabet size q must be positive".into()));
    }
    let hi_r = qv - 1;
    let r_vals: Vec<u64> = r
        .elements()
        .iter()
        .map(|b| match b.to_u64() {
            Some(v) if v <= hi_r => Ok(v),
            _ => Err(Error::OutOfRange { value: b.to_string(), lo: "0".into(), hi: hi_r.to_string() }),
        })
        .collect::<Result<_>>()?;
    let rank = r_vals[r_vals.len() - 1] - r_vals[0];
    let hi_m = hi_r / rank;
    let mut m_vals: Vec<u64> = m_set
        .iter()
        .map(|v| match v.to_u64() {
            Some(x) if x <= hi_m => Ok(x),
            _ => Err(Error::OutOfRange { value: v.to_string(), lo: "0".into(), hi: hi_m.to_string() }),
        })
        .collect::<Result<_>>()?;
    m_vals.sort_unstable();
    m_vals.dedup();
    let cells = r_vals.len() as u128 * qv as u128 * m_vals.len() as u128;
    if cells > MAX_CELLS {
        return Err(Error::OutputCap { size: cells.to_string(), cap: MAX_CELLS as u64 });
    }
    let rows = phf_rows(&r_vals, &m_vals, qv);
    Ok(HashFamilyMatrix { q: qv, rows, provenance: Some(Provenance { r: r_vals, m: m_vals, m_verified }) })
}

/// Largest `X` such that every `L(U)` of `r` evaluated on `[0, X]` stays
/// strictly between `-q` and `q`, so a collision modulo `q` is a collision over
/// the integers. Equals `⌊(q-1)/rank⌋` for three-element sets and can be
/// smaller for larger ones.
pub fn integer_lift_bound<T: Int>(r: &PlasticSet<T>, q: &T) -> Result<T> {
    let widest = r
        .equations()?
        .iter()
        .map(|e| e.pos_sum())
        .max()
        .unwrap_or_else(|| r.rank());
    Ok((q.clone() - T::one()) / widest)
}

/// Outcome of a separation check; `witness` lists the column groups of the
/// first family no row separates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShfReport {
    pub separated: bool,
    pub families: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<usize>>>,
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Number of families enumerated once groups of equal weight are taken up to
/// order.
pub fn family_count(n: usize, ty: &ShfType) -> BigInt {
    let mut left = n;
    let mut total = BigInt::one();
    for &w in ty.weights() {
        if w > left {
            return BigInt::from(0);
        }
        total *= binomial(left, w);
        left -= w;
    }
    for (_, group) in &ty.weights().iter().chunk_by(|w| **w) {
        let g = group.count();
        total /= (1..=g).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    }
    total
}

fn separates(row: &[u64], groups: &[&[usize]]) -> bool {
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            if a.iter().any(|&x| b.iter().any(|&y| row[x] == row[y])) {
                return false;
            }
        }
    }
    true
}

struct FamilyWalk<'a> {
    a: &'a HashFamilyMatrix,
    weights: &'a [usize],
    used: Vec<bool>,
    groups: Vec<Vec<usize>>,
}

impl FamilyWalk<'_> {
    fn unseparated(&self) -> bool {
        let groups: Vec<&[usize]> = self.groups.iter().map(Vec::as_slice).collect();
        !self.a.rows.iter().any(|row| separates(row, &groups))
    }

    /// Fills group `g` with a `w_g`-subset of unused columns; combinations are
    /// visited in lexicographic order.
    fn walk(&mut self, g: usize) -> ControlFlow<Vec<Vec<usize>>> {
        if g == self.weights.len() {
            return if self.unseparated() { ControlFlow::Break(self.groups.clone()) } else { ControlFlow::Continue(()) };
        }
        // equal-weight neighbours are ordered by their smallest column
        let floor = match g {
            0 => 0,
            _ if self.weights[g] == self.weights[g - 1] => self.groups[g - 1][0] + 1,
            _ => 0,
        };
        self.choose(g, floor)
    }

    fn choose(&mut self, g: usize, from: usize) -> ControlFlow<Vec<Vec<usize>>> {
        if self.groups[g].len() == self.weights[g] {
            return self.walk(g + 1);
        }
        for c in from..self.a.n_cols() {
            if self.used[c] {
                continue;
            }
            self.used[c] = true;
            self.groups[g].push(c);
            let flow = self.choose(g, c + 1);
            self.groups[g].pop();
            self.used[c] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Checks that every family of disjoint column groups with sizes given by `ty`
/// is separated by some row. Families are sharded by their first column; the
/// reported witness is the first unseparated family in enumeration order.
pub fn verify_shf(a: &HashFamilyMatrix, ty: &ShfType, max_families: u128) -> Result<ShfReport> {
    let n = a.n_cols();
    if ty.u() > n {
        return Err(Error::InvalidParameter(format!("type {ty} needs {} columns, matrix has {n}", ty.u())));
    }
    let count = family_count(n, ty);
    if count > BigInt::from(max_families) {
        return Err(Error::SearchCap { needed: count.to_string(), cap: max_families });
    }
    let weights = ty.weights();
    let witness = if ty.is_perfect() {
        let t = ty.t();
        (0..n).into_par_iter().find_map_first(|first| {
            (first + 1..n).combinations(t - 1).find_map(|rest| {
                let cols: Vec<usize> = std::iter::once(first).chain(rest).collect();
                let distinct = |row: &Vec<u64>| cols.iter().map(|&c| row[c]).all_unique();
                (!a.rows.iter().any(distinct)).then(|| cols.iter().map(|&c| vec![c]).collect())
            })
        })
    } else {
        (0..n).into_par_iter().find_map_first(|first| {
            let mut walk = FamilyWalk { a, weights, used: vec![false; n], groups: vec![Vec::new(); weights.len()] };
            walk.used[first] = true;
            walk.groups[0].push(first);
            match walk.choose(0, first + 1) {
                ControlFlow::Break(w) => Some(w),
                ControlFlow::Continue(()) => None,
            }
        })
    };
    Ok(ShfReport { separated: witness.is_none(), families: count.to_string(), witness })
}

/// Columns `c_1 … c_k` and distinct rows `j_1 … j_k` with `c_i`, `c_{i+1}`
/// agreeing in row `j_{i+1}` and `c_k`, `c_1` agreeing in row `j_1`.
/// `rows[0]` is `j_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowCycle {
    pub columns: Vec<usize>,
    pub rows: Vec<usize>,
}

impl RainbowCycle {
    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn holds_in(&self, a: &HashFamilyMatrix) -> bool {
        let k = self.k();
        k >= 2
            && self.rows.len() == k
            && self.columns.iter().all_unique()
            && self.rows.iter().all_unique()
            && (0..k).all(|i| {
                let (prev, cur) = (self.columns[(i + k - 1) % k], self.columns[i]);
                a.cell(self.rows[i], prev) == a.cell(self.rows[i], cur)
            })
    }
}

struct CycleSearch<'a> {
    a: &'a HashFamilyMatrix,
    k: usize,
    budget: u128,
    columns: Vec<usize>,
    rows: Vec<usize>,
    row_used: Vec<bool>,
    col_used: Vec<bool>,
}

impl CycleSearch<'_> {
    fn step(&mut self) -> Result<ControlFlow<RainbowCycle>> {
        self.budget = self.budget.checked_sub(1).ok_or(Error::SearchCap { needed: "more".into(), cap: 0 })?;
        let first = self.columns[0];
        let last = *self.columns.last().expect("cycle has a first column");
        if self.columns.len() == self.k {
            for j in 0..self.a.n_rows() {
                if !self.row_used[j] && self.a.cell(j, last) == self.a.cell(j, first) {
                    let mut rows = vec![j];
                    rows.extend_from_slice(&self.rows);
                    return Ok(ControlFlow::Break(RainbowCycle { columns: self.columns.clone(), rows }));
                }
            }
            return Ok(ControlFlow::Continue(()));
        }
        for j in 0..self.a.n_rows() {
            if self.row_used[j] {
                continue;
            }
            let value = self.a.cell(j, last);
            for c in first + 1..self.a.n_cols() {
                if self.col_used[c] || self.a.cell(j, c) != value {
                    continue;
                }
                self.row_used[j] = true;
                self.col_used[c] = true;
                self.rows.push(j);
                self.columns.push(c);
                let flow = self.step()?;
                self.columns.pop();
                self.rows.pop();
                self.col_used[c] = false;
                self.row_used[j] = false;
                if flow.is_break() {
                    return Ok(flow);
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// First rainbow k-cycle for `k = 2, …, max_k`, with the smallest column first
/// and columns and rows tried in increasing order.
pub fn find_rainbow_cycle(a: &HashFamilyMatrix, max_k: usize, max_nodes: u128) -> Result<Option<RainbowCycle>> {
    if max_k > a.n_rows() {
        return Err(Error::InvalidParameter(format!("max_k={max_k} exceeds the {} rows", a.n_rows())));
    }
    let mut budget = max_nodes;
    for k in 2..=max_k {
        for first in 0..a.n_cols() {
            let mut search = CycleSearch {
                a,
                k,
                budget,
                columns: vec![first],
                rows: Vec::new(),
                row_used: vec![false; a.n_rows()],
                col_used: vec![false; a.n_cols()],
            };
            search.col_used[first] = true;
            let flow = search.step().map_err(|_| Error::SearchCap { needed: format!("> {max_nodes}"), cap: max_nodes })?;
            if let ControlFlow::Break(c) = flow {
                return Ok(Some(c));
            }
            budget = search.budget;
        }
    }
    Ok(None)
}

/// The equation a rainbow cycle of a constructed matrix forces on `M`: with
/// `u_i = b_{j_{i+1}}` the values `m_i` of the cycle's columns satisfy `L(U)`
/// modulo `q`, and over the integers when `M` respects the range bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionEquation {
    pub sequence: Vec<u64>,
    pub values: Vec<u64>,
    pub equation: BipartiteArray<i128>,
    pub residual: i128,
    pub holds_mod_q: bool,
    pub nontrivial: bool,
}

impl CollisionEquation {
    /// A nontrivial integer solution of `L(U)` over `M`.
    pub fn contradicts_freeness(&self) -> bool {
        self.residual == 0 && self.nontrivial
    }
}

pub fn collision_equation(a: &HashFamilyMatrix, cycle: &RainbowCycle) -> Result<CollisionEquation> {
    let p = a.provenance().ok_or_else(|| Error::InvalidParameter("matrix has no provenance".into()))?;
    if !cycle.holds_in(a) {
        return Err(Error::InvalidParameter("not a rainbow cycle of this matrix".into()));
    }
    let k = cycle.k();
    if k < 3 {
        return Err(Error::SequenceTooShort { need: 3, got: k });
    }
    let sequence: Vec<u64> = (0..k).map(|i| p.r[cycle.rows[(i + 1) % k]]).collect();
    let values: Vec<u64> = cycle.columns.iter().map(|&c| a.column_label(c).expect("provenance").1).collect();
    let u = PermSeq::<i128>::new(sequence.iter().map(|&v| v as i128).collect())?;
    let equation = array_from_sequence(&u)?;
    let residual: i128 = (0..k)
        .map(|i| {
            let prev = sequence[(i + k - 1) % k] as i128;
            (sequence[i] as i128 - prev) * values[i] as i128
        })
        .sum();
    Ok(CollisionEquation {
        holds_mod_q: residual.rem_euclid(a.q() as i128) == 0,
        nontrivial: values.iter().any(|&v| v != values[0]),
        sequence,
        values,
        equation,
        residual,
    })
}

/// `γ · q^⌈N/(u-1)⌉` with `γ = w_1 w_2 + u - w_1 - w_2` for the two smallest
/// weights.
pub fn bound_upper<T: Int>(n_rows: u64, q: &T, ty: &ShfType) -> Result<T> {
    let u = ty.u() as u64;
    if u < 2 {
        return Err(Error::InvalidParameter(format!("u={u} must be at least 2")));
    }
    let (w1, w2) = (ty.weights()[0] as u64, ty.weights()[1] as u64);
    let gamma = T::from_u64(w1 * w2 + u - w1 - w2).ok_or(Error::Overflow("bound_upper"))?;
    let exponent = n_rows.div_ceil(u - 1);
    let mut power = T::one();
    for _ in 0..exponent {
        power = power.checked_mul(q).ok_or(Error::Overflow("bound_upper"))?;
    }
    gamma.checked_mul(&power).ok_or(Error::Overflow("bound_upper"))
}

/// `(1/2^u) · (q / C(u,2))^{N/(u-1)}`.
pub fn bound_lower_lll<F: Real>(n_rows: u64, q: u64, u: u64) -> Result<F> {
    if u < 2 {
        return Err(Error::InvalidParameter(format!("u={u} must be at least 2")));
    }
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let f = |v: u64| F::from_u64(v).expect("finite");
    let pairs = u * (u - 1) / 2;
    let base = f(q) / f(pairs);
    let exponent = f(n_rows) / f(u - 1);
    Ok(base.powf(exponent) / f(2).powf(f(u)))
}
