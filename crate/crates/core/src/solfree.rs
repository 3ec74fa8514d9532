//! Solution-free sets: exhaustive and meet-in-the-middle verification, greedy
//! and exact-maximum search, the sphere construction for one-sided equations,
//! the digit-expansion lift through an ancestor, and the per-equation pipeline.
//!
//! A solution is *trivial* when every variable takes the same value. All
//! searches return the lexicographically least nontrivial assignment, with
//! slots ordered positive side first (coefficients ascending) and values
//! ordered ascending, independently of how the work is split across threads.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrays::{algorithm1_in, ancestor, AncestorKind, AncestorString, BipartiteArray};
use crate::error::{Error, Result};
use crate::json;
use crate::scalar::{Int, LogBase, Real};
use crate::sequences::PermSeq;

/// Caps on exhaustive work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchLimits {
    pub max_arity: usize,
    /// Elementary checks allowed for a single verification.
    pub max_checks: u128,
    /// Largest `m` accepted by the exact maximum search.
    pub exact_cap: u64,
    /// Largest set any construction will materialize.
    pub output_cap: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_arity: 6, max_checks: 1_000_000_000, exact_cap: 64, output_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Pos,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct SlotValue<T> {
    pub side: Side,
    #[serde(with = "json::int")]
    pub coefficient: T,
    #[serde(with = "json::int")]
    pub value: T,
}

/// A nontrivial assignment satisfying an equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct SolutionWitness<T> {
    pub assignment: Vec<SlotValue<T>>,
    #[serde(with = "json::int")]
    pub lhs_value: T,
    #[serde(with = "json::int")]
    pub rhs_value: T,
}

impl<T: Int> SolutionWitness<T> {
    pub fn values(&self) -> Vec<T> {
        self.assignment.iter().map(|s| s.value.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    MeetInMiddle,
    /// Too large to machine-check; freeness follows from the construction.
    ByConstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct LinkParams<T> {
    #[serde(with = "json::int")]
    pub base: T,
    pub digit_count: usize,
    #[serde(with = "json::int_vec")]
    pub digit_set: Vec<T>,
    pub side: AncestorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct LevelRecord<T> {
    pub level: usize,
    #[serde(with = "json::int")]
    pub location: T,
    pub method: String,
    pub size: usize,
}

/// How a certified set was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int", tag = "kind", rename_all = "kebab-case")]
pub enum Construction<T> {
    Given,
    Greedy { lo: u64, hi: u64 },
    Exact { m: u64 },
    Behrend { base: u64, digit_bound: u64, digits: u32, shell: u64 },
    GreedyFallback { m: u64, reason: String },
    Link(LinkParams<T>),
    Pipeline { string: AncestorString<T>, levels: Vec<LevelRecord<T>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct FailedEquation<T> {
    pub equation: usize,
    pub witness: SolutionWitness<T>,
}

/// A finite set with the equations it was checked against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct SolutionFreeCert<T> {
    #[serde(rename = "set", with = "json::int_vec")]
    pub set_m: Vec<T>,
    pub equations: Vec<BipartiteArray<T>>,
    pub method: Method,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<FailedEquation<T>>,
    pub construction: Construction<T>,
}

impl<T: Int> SolutionFreeCert<T> {
    pub fn len(&self) -> usize {
        self.set_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set_m.is_empty()
    }

    /// Newline-delimited decimal rendering of the set.
    pub fn set_text(&self) -> String {
        self.set_m.iter().map(|v| format!("{v}\n")).collect()
    }
}

fn sorted_values<T: Int>(set: &[T]) -> Vec<T> {
    let mut v = set.to_vec();
    v.sort();
    v.dedup();
    v
}

fn pow_u128(n: usize, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(n as u128))
}

/// Method and number of elementary checks a verification would take.
pub fn verification_cost(a: &BipartiteArray<impl Int>, set_len: usize) -> (Method, u128) {
    let (s, r) = a.kind();
    if s + r <= 4 {
        (Method::Exhaustive, pow_u128(set_len, s + r))
    } else {
        (Method::MeetInMiddle, pow_u128(set_len, s).saturating_add(pow_u128(set_len, r)))
    }
}

fn check_limits(a: &BipartiteArray<impl Int>, set_len: usize, limits: &SearchLimits) -> Result<Method> {
    if a.arity() > limits.max_arity {
        return Err(Error::ArityCap { k: a.arity(), cap: limits.max_arity });
    }
    let (method, cost) = verification_cost(a, set_len);
    if cost > limits.max_checks {
        return Err(Error::SearchCap { needed: cost.to_string(), cap: limits.max_checks });
    }
    Ok(method)
}

/// Products `coefficient * value` for every slot of one side.
fn product_table<T: Int>(coeffs: &[T], values: &[T]) -> Vec<Vec<T>> {
    coeffs.iter().map(|c| values.iter().map(|v| c.clone() * v.clone()).collect()).collect()
}

/// Writes the base-`n` digits of `idx` into `out`, most significant first.
fn decode(mut idx: usize, n: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = idx % n;
        idx /= n;
    }
}

fn tuple_sum<T: Int>(table: &[Vec<T>], digits: &[usize]) -> T {
    table.iter().zip(digits).fold(T::zero(), |acc, (row, &d)| acc + row[d].clone())
}

fn all_same(a: &[usize], b: &[usize]) -> bool {
    let first = a.first().or(b.first()).copied();
    a.iter().chain(b).all(|&d| Some(d) == first)
}

fn make_witness<T: Int>(a: &BipartiteArray<T>, values: &[T], pd: &[usize], nd: &[usize]) -> SolutionWitness<T> {
    let mut assignment = Vec::with_capacity(a.arity());
    for (c, &d) in a.pos().iter().zip(pd) {
        assignment.push(SlotValue { side: Side::Pos, coefficient: c.clone(), value: values[d].clone() });
    }
    for (c, &d) in a.neg().iter().zip(nd) {
        assignment.push(SlotValue { side: Side::Neg, coefficient: c.clone(), value: values[d].clone() });
    }
    let lhs_value = tuple_sum(&product_table(a.pos(), values), pd);
    let rhs_value = tuple_sum(&product_table(a.neg(), values), nd);
    SolutionWitness { assignment, lhs_value, rhs_value }
}

/// Lexicographically least nontrivial solution of `a` over `m_set`, if any.
///
/// Equations of arity at most 4 are searched exhaustively; longer ones hash the
/// negative side's value table and probe it from the positive side.
pub fn find_solution<T: Int>(
    a: &BipartiteArray<T>,
    m_set: &[T],
    limits: &SearchLimits,
) -> Result<Option<SolutionWitness<T>>> {
    let values = sorted_values(m_set);
    if values.len() < 2 {
        return Ok(None);
    }
    let method = check_limits(a, values.len(), limits)?;
    Ok(match method {
        Method::MeetInMiddle => search_split(a, &values),
        _ => search_exhaustive(a, &values),
    })
}

fn search_exhaustive<T: Int>(a: &BipartiteArray<T>, values: &[T]) -> Option<SolutionWitness<T>> {
    let n = values.len();
    let (s, r) = a.kind();
    let pos_t = product_table(a.pos(), values);
    let neg_t = product_table(a.neg(), values);
    let neg_count = n.pow(r as u32);
    (0..n.pow(s as u32)).into_par_iter().find_map_first(|pi| {
        let mut pd = vec![0; s];
        decode(pi, n, &mut pd);
        let lhs = tuple_sum(&pos_t, &pd);
        let mut nd = vec![0; r];
        (0..neg_count).find_map(|ni| {
            decode(ni, n, &mut nd);
            (tuple_sum(&neg_t, &nd) == lhs && !all_same(&pd, &nd)).then(|| make_witness(a, values, &pd, &nd))
        })
    })
}

fn search_split<T: Int>(a: &BipartiteArray<T>, values: &[T]) -> Option<SolutionWitness<T>> {
    let n = values.len();
    let (s, r) = a.kind();
    let pos_t = product_table(a.pos(), values);
    let neg_t = product_table(a.neg(), values);
    let mut by_sum: HashMap<T, Vec<usize>> = HashMap::new();
    let mut nd = vec![0; r];
    for ni in 0..n.pow(r as u32) {
        decode(ni, n, &mut nd);
        by_sum.entry(tuple_sum(&neg_t, &nd)).or_default().push(ni);
    }
    (0..n.pow(s as u32)).into_par_iter().find_map_first(|pi| {
        let mut pd = vec![0; s];
        decode(pi, n, &mut pd);
        let candidates = by_sum.get(&tuple_sum(&pos_t, &pd))?;
        let mut nd = vec![0; r];
        candidates.iter().find_map(|&ni| {
            decode(ni, n, &mut nd);
            (!all_same(&pd, &nd)).then(|| make_witness(a, values, &pd, &nd))
        })
    })
}

/// Checks `m_set` against every equation; the first witness found is kept.
pub fn verify_solution_free<T: Int>(
    m_set: &[T],
    equations: &[BipartiteArray<T>],
    limits: &SearchLimits,
) -> Result<SolutionFreeCert<T>> {
    let set_m = sorted_values(m_set);
    let mut method = Method::Exhaustive;
    let mut witness = None;
    for (i, eq) in equations.iter().enumerate() {
        if verification_cost(eq, set_m.len()).0 == Method::MeetInMiddle {
            method = Method::MeetInMiddle;
        }
        if let Some(w) = find_solution(eq, &set_m, limits)? {
            witness = Some(FailedEquation { equation: i, witness: w });
            break;
        }
    }
    Ok(SolutionFreeCert {
        verified: witness.is_none(),
        set_m,
        equations: equations.to_vec(),
        method,
        witness,
        construction: Construction::Given,
    })
}

/// Verifies when the work fits the caps, otherwise records the set as free by
/// construction.
fn certify<T: Int>(
    set_m: Vec<T>,
    equations: Vec<BipartiteArray<T>>,
    construction: Construction<T>,
    limits: &SearchLimits,
) -> Result<SolutionFreeCert<T>> {
    let fits = equations.iter().all(|eq| {
        eq.arity() <= limits.max_arity && verification_cost(eq, set_m.len()).1 <= limits.max_checks
    });
    if fits {
        let mut cert = verify_solution_free(&set_m, &equations, limits)?;
        cert.construction = construction;
        Ok(cert)
    } else {
        Ok(SolutionFreeCert { set_m, equations, method: Method::ByConstruction, verified: true, witness: None, construction })
    }
}

/// Whether adding `x` to `kept` (all smaller than `x`) creates a nontrivial
/// solution that uses `x` at least once.
fn creates_solution<T: Int>(a: &BipartiteArray<T>, kept: &[T], x: &T) -> bool {
    let mut values = kept.to_vec();
    values.push(x.clone());
    let n = values.len();
    let xi = n - 1;
    let (s, r) = a.kind();
    let pos_t = product_table(a.pos(), &values);
    let neg_t = product_table(a.neg(), &values);

    #[derive(Default)]
    struct Bucket {
        total: u32,
        with_x: u32,
        all_x: bool,
    }
    let mut buckets: HashMap<T, Bucket> = HashMap::new();
    let mut d = vec![0; r];
    for ni in 0..n.pow(r as u32) {
        decode(ni, n, &mut d);
        let b = buckets.entry(tuple_sum(&neg_t, &d)).or_default();
        b.total += 1;
        if d.contains(&xi) {
            b.with_x += 1;
        }
        if d.iter().all(|&v| v == xi) {
            b.all_x = true;
        }
    }
    let mut d = vec![0; s];
    (0..n.pow(s as u32)).any(|pi| {
        decode(pi, n, &mut d);
        let Some(b) = buckets.get(&tuple_sum(&pos_t, &d)) else {
            return false;
        };
        if d.iter().all(|&v| v == xi) {
            b.total > u32::from(b.all_x)
        } else if d.contains(&xi) {
            b.total > 0
        } else {
            b.with_x > 0
        }
    })
}

fn check_incremental(equations: &[BipartiteArray<impl Int>], n: usize, limits: &SearchLimits) -> Result<()> {
    for eq in equations {
        if eq.arity() > limits.max_arity {
            return Err(Error::ArityCap { k: eq.arity(), cap: limits.max_arity });
        }
        let (s, r) = eq.kind();
        let cost = pow_u128(n, s).saturating_add(pow_u128(n, r));
        if cost > limits.max_checks {
            return Err(Error::SearchCap { needed: cost.to_string(), cap: limits.max_checks });
        }
    }
    Ok(())
}

fn compatible<T: Int>(equations: &[BipartiteArray<T>], kept: &[T], x: &T) -> bool {
    equations.iter().all(|eq| !creates_solution(eq, kept, x))
}

fn int_of<T: Int>(v: u64) -> Result<T> {
    T::from_u64(v).ok_or(Error::Overflow("integer conversion"))
}

/// Scans `1..=m`, keeping each value that creates no nontrivial solution with
/// the values kept so far.
pub fn greedy_solution_free<T: Int>(
    m: u64,
    equations: &[BipartiteArray<T>],
    limits: &SearchLimits,
) -> Result<SolutionFreeCert<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter("greedy search needs m >= 1".into()));
    }
    greedy_solution_free_in(1, m, equations, limits)
}

/// Greedy scan of `lo..=hi`. Invariant equations are translation invariant,
/// so the result over `[0, m-1]` is the result over `[m]` shifted down by one.
pub fn greedy_solution_free_in<T: Int>(
    lo: u64,
    hi: u64,
    equations: &[BipartiteArray<T>],
    limits: &SearchLimits,
) -> Result<SolutionFreeCert<T>> {
    check_incremental(equations, 1, limits)?;
    let mut kept: Vec<T> = Vec::new();
    for x in lo..=hi {
        check_incremental(equations, kept.len() + 1, limits)?;
        let x = int_of::<T>(x)?;
        if compatible(equations, &kept, &x) {
            kept.push(x);
        }
    }
    Ok(SolutionFreeCert {
        set_m: kept,
        equations: equations.to_vec(),
        method: Method::Exhaustive,
        verified: true,
        witness: None,
        construction: Construction::Greedy { lo, hi },
    })
}

/// Largest solution-free subset of `[m]` by branch and bound; among maximum
/// sets the lexicographically smallest is returned.
pub fn max_solution_free_exact<T: Int>(
    m: u64,
    equations: &[BipartiteArray<T>],
    limits: &SearchLimits,
) -> Result<SolutionFreeCert<T>> {
    if m > limits.exact_cap {
        return Err(Error::ExactCap { m, cap: limits.exact_cap });
    }
    if m == 0 {
        return Err(Error::InvalidParameter("exact search needs m >= 1".into()));
    }
    let greedy = greedy_solution_free(m, equations, limits)?;
    let candidates: Vec<T> = (1..=m).map(int_of).collect::<Result<_>>()?;

    struct Search<'a, T> {
        equations: &'a [BipartiteArray<T>],
        candidates: &'a [T],
        best: Vec<T>,
        current: Vec<T>,
    }

    impl<T: Int> Search<'_, T> {
        // include-first order visits sets of equal size in lexicographic order,
        // so only a strictly larger set replaces the incumbent
        fn run(&mut self, i: usize) {
            if self.current.len() + (self.candidates.len() - i) <= self.best.len() {
                return;
            }
            if i == self.candidates.len() {
                self.best = self.current.clone();
                return;
            }
            let x = &self.candidates[i];
            if compatible(self.equations, &self.current, x) {
                self.current.push(x.clone());
                self.run(i + 1);
                self.current.pop();
            }
            self.run(i + 1);
        }
    }

    let mut search = Search { equations, candidates: &candidates, best: greedy.set_m, current: Vec::new() };
    search.run(0);
    Ok(SolutionFreeCert {
        set_m: search.best,
        equations: equations.to_vec(),
        method: Method::Exhaustive,
        verified: true,
        witness: None,
        construction: Construction::Exact { m },
    })
}

/// `(singleton, others)` for a one-sided invariant equation.
fn one_sided<T: Int>(a: &BipartiteArray<T>) -> Result<(T, &[T])> {
    let (single, others) = match a.kind() {
        (1, _) => (a.pos()[0].clone(), a.neg()),
        (_, 1) => (a.neg()[0].clone(), a.pos()),
        _ => return Err(Error::NotOneSided(a.to_string())),
    };
    let total = others.iter().fold(T::zero(), |acc, v| acc + v.clone());
    if total != single {
        return Err(Error::NotOneSided(a.to_string()));
    }
    Ok((single, others))
}

/// Sphere construction for `a_1 x_1 + … + a_k x_k = σ y`.
///
/// Digits in base `d = max(2σ, ⌈2^{√log₂ m}⌉)` are bounded by `⌊(d-1)/σ⌋`, so
/// the left side never carries; vectors on a common squared-norm shell cannot
/// have one of them equal to a proper convex combination of the others. Each
/// vector `v` is encoded as `1 + Σ v_j d^j`.
pub fn behrend_base<T: Int>(a: &BipartiteArray<T>, m: u64, limits: &SearchLimits) -> Result<SolutionFreeCert<T>> {
    let (sigma, _) = one_sided(a)?;
    let two = T::from_i64_lossless(2);
    if sigma < two {
        return Err(Error::InvalidParameter(format!("coefficient sum {sigma} must be at least 2")));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("sphere construction needs m >= 2".into()));
    }
    let equations = vec![a.clone()];
    let spread = ((m as f64).log2().sqrt().exp2().ceil()) as u64;
    let sigma_u = match sigma.to_u64() {
        Some(s) if s <= m => s,
        // base exceeds m: no digit fits, a singleton is all that remains
        _ => return certify(vec![T::one()], equations, Construction::Behrend { base: 0, digit_bound: 0, digits: 0, shell: 0 }, limits),
    };
    let base = std::cmp::max(2 * sigma_u, spread);
    let digit_bound = (base - 1) / sigma_u;
    if digit_bound == 0 {
        let mut cert = greedy_solution_free(m, &equations, limits)?;
        cert.construction = Construction::GreedyFallback { m, reason: "digit bound is zero".into() };
        return Ok(cert);
    }
    let mut digits = 0u32;
    while (base as u128).pow(digits + 1) <= m as u128 {
        digits += 1;
    }
    let count = pow_u128(digit_bound as usize + 1, digits as usize);
    if count > limits.output_cap as u128 {
        return Err(Error::OutputCap { size: count.to_string(), cap: limits.output_cap });
    }

    let width = digit_bound as usize + 1;
    let vectors = || {
        (0..count as usize).map(move |idx| {
            let mut v = vec![0usize; digits as usize];
            decode(idx, width, &mut v);
            v
        })
    };
    let norm = |v: &[usize]| v.iter().map(|&x| (x * x) as u64).sum::<u64>();
    let mut shells: HashMap<u64, usize> = HashMap::new();
    for v in vectors() {
        *shells.entry(norm(&v)).or_default() += 1;
    }
    let (&shell, _) = shells
        .iter()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0)))
        .expect("at least the zero vector");
    let mut set: Vec<T> = vectors()
        .filter(|v| norm(v) == shell)
        .map(|v| {
            // v[0] is the most significant digit
            let value = v.iter().fold(0u64, |acc, &x| acc * base + x as u64);
            int_of::<T>(value + 1)
        })
        .collect::<Result<_>>()?;
    set.sort();
    certify(set, equations, Construction::Behrend { base, digit_bound, digits, shell }, limits)
}

/// Lifts a set `B` that is free of the `which`-type ancestor of `a` by `theta`
/// to a set free of `a`: all positive integers whose `digit_count` base-β
/// digits lie in `B - 1`, with β = min(α, α') ± θ.
pub fn link_construct<T: Int>(
    b_set: &[T],
    a: &BipartiteArray<T>,
    theta: &T,
    which: AncestorKind,
    digit_count: usize,
    limits: &SearchLimits,
) -> Result<SolutionFreeCert<T>> {
    if digit_count == 0 {
        return Err(Error::InvalidParameter("digit count must be at least 1".into()));
    }
    let anc = ancestor(a, theta, which)?;
    let sigma = anc.pos_sum();
    let low = a.min_max().clone();
    let limit = low.clone() / sigma.clone();
    let b = sorted_values(b_set);
    if let Some(bad) = b.iter().find(|v| !v.is_positive() || **v > limit) {
        return Err(Error::DigitOutOfRange { value: bad.to_string(), limit: limit.to_string() });
    }
    let base = match which {
        AncestorKind::First => low + theta.clone(),
        AncestorKind::Second => low - theta.clone(),
    };
    if base < T::from_i64_lossless(2) {
        return Err(Error::InvalidParameter(format!("base {base} is below 2")));
    }
    let carry = (limit - T::one()) * sigma;
    if carry >= base {
        return Err(Error::CarryCondition { lhs: carry.to_string(), base: base.to_string() });
    }
    let fits = anc.arity() <= limits.max_arity && verification_cost(&anc, b.len()).1 <= limits.max_checks;
    if fits && find_solution(&anc, &b, limits)?.is_some() {
        return Err(Error::DigitSetNotFree);
    }
    let size = pow_u128(b.len(), digit_count);
    if size > limits.output_cap as u128 {
        return Err(Error::OutputCap { size: size.to_string(), cap: limits.output_cap });
    }

    let digit_set: Vec<T> = b.iter().map(|v| v.clone() - T::one()).collect();
    let mut set = Vec::with_capacity(size as usize);
    let mut d = vec![0usize; digit_count];
    for idx in 0..size as usize {
        decode(idx, digit_set.len(), &mut d);
        let value = d.iter().fold(T::zero(), |acc, &i| acc * base.clone() + digit_set[i].clone());
        if !value.is_zero() {
            set.push(value);
        }
    }
    set.sort();
    let params = LinkParams { base, digit_count, digit_set, side: which };
    certify(set, vec![a.clone()], Construction::Link(params), limits)
}

/// Caps for the per-equation pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub limits: SearchLimits,
    /// Largest location at which the base set is materialized.
    pub behrend_cap: u64,
    /// Largest range scanned by a greedy fallback.
    pub greedy_cap: u64,
    pub log_base: LogBase,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { limits: SearchLimits::default(), behrend_cap: 100_000, greedy_cap: 300, log_base: LogBase::Two }
    }
}

fn capped<T: Int>(v: &T, cap: u64) -> u64 {
    v.to_u64().map_or(cap, |x| x.min(cap))
}

/// Largest `ℓ` with `base^ℓ <= target`.
fn max_digits<T: Int>(base: &T, target: &T) -> usize {
    let mut l = 0;
    let mut power = base.clone();
    while power <= *target {
        l += 1;
        power = power * base.clone();
    }
    l
}

fn greedy_fallback<T: Int>(
    a: &BipartiteArray<T>,
    location: &T,
    reason: String,
    config: &PipelineConfig,
) -> Result<SolutionFreeCert<T>> {
    let m = capped(location, config.greedy_cap);
    if m == 0 {
        return Ok(SolutionFreeCert {
            set_m: Vec::new(),
            equations: vec![a.clone()],
            method: Method::Exhaustive,
            verified: true,
            witness: None,
            construction: Construction::GreedyFallback { m, reason },
        });
    }
    let mut cert = greedy_solution_free(m, std::slice::from_ref(a), &config.limits)?;
    cert.construction = Construction::GreedyFallback { m, reason };
    Ok(cert)
}

/// Builds an `L(u)`-free subset of `[m]`: ancestor string, base set at the
/// monotonic end, then one digit-expansion lift per link back to `A(u)`.
/// Any level that cannot be built, including a broken string, is replaced by a
/// greedy scan recorded in the certificate.
pub fn pipeline_single_equation<T: Int, F: Real>(
    u: &PermSeq<T>,
    a_param: F,
    m: &T,
    config: &PipelineConfig,
) -> Result<SolutionFreeCert<T>> {
    if !m.is_positive() {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let string = match algorithm1_in(u, a_param, config.log_base) {
        Ok(s) => s,
        Err(e @ Error::StringBroken { .. }) => {
            let a = crate::arrays::array_from_sequence(u)?;
            let cert = greedy_fallback(&a, m, e.to_string(), config)?;
            return certify(cert.set_m, vec![a], cert.construction, &config.limits);
        }
        Err(e) => return Err(e),
    };
    let tau = string.tau();
    let location = |i: usize| if i == 0 { m.clone() } else { string.locations[i - 1].clone() };
    let mut levels = Vec::with_capacity(tau + 1);

    let terminal = string.terminal();
    let base_loc = location(tau);
    let base_m = capped(&base_loc, config.behrend_cap);
    let mut current = match behrend_base(terminal, base_m, &config.limits) {
        Ok(cert) if !cert.is_empty() => cert,
        Ok(_) => greedy_fallback(terminal, &base_loc, "empty sphere set".into(), config)?,
        Err(e) => greedy_fallback(terminal, &base_loc, e.to_string(), config)?,
    };
    levels.push(LevelRecord { level: tau, location: base_loc, method: method_name(&current.construction), size: current.len() });

    for i in (1..=tau).rev() {
        let target = location(i - 1);
        let prev = &string.arrays[i - 1];
        let theta = &string.thetas[i - 1];
        let which = AncestorKind::from_bit(string.choices[i - 1]);
        let base = match which {
            AncestorKind::First => prev.min_max().clone() + theta.clone(),
            AncestorKind::Second => prev.min_max().clone() - theta.clone(),
        };
        let mut digits = max_digits(&base, &target);
        while digits > 0 && pow_u128(current.len(), digits) > config.limits.output_cap as u128 {
            digits -= 1;
        }
        let lifted = if digits == 0 {
            Err(Error::InvalidParameter(format!("location {target} holds no digit of base {base}")))
        } else {
            link_construct(&current.set_m, prev, theta, which, digits, &config.limits)
        };
        current = match lifted {
            Ok(cert) if !cert.is_empty() => cert,
            Ok(_) => greedy_fallback(prev, &target, "empty lift".into(), config)?,
            Err(e) => greedy_fallback(prev, &target, e.to_string(), config)?,
        };
        levels.push(LevelRecord { level: i - 1, location: target, method: method_name(&current.construction), size: current.len() });
    }

    let equations = vec![string.arrays[0].clone()];
    let set = std::mem::take(&mut current.set_m);
    certify(set, equations, Construction::Pipeline { string, levels }, &config.limits)
}

fn method_name<T>(c: &Construction<T>) -> String {
    match c {
        Construction::Given => "given",
        Construction::Greedy { .. } => "greedy",
        Construction::Exact { .. } => "exact",
        Construction::Behrend { .. } => "behrend",
        Construction::GreedyFallback { .. } => "greedy-fallback",
        Construction::Link(_) => "link",
        Construction::Pipeline { .. } => "pipeline",
    }
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr(p: &[i64], n: &[i64]) -> BipartiteArray<i64> {
        BipartiteArray::from_i64s(p, n).unwrap()
    }

    fn ap3() -> BipartiteArray<i64> {
        arr(&[1, 1], &[2])
    }

    fn limits() -> SearchLimits {
        SearchLimits::default()
    }

    #[test]
    fn finds_lexicographically_least_witness() {
        let w = find_solution(&ap3(), &[1, 2, 3], &limits()).unwrap().unwrap();
        assert_eq!(w.values(), vec![1, 3, 2]);
        assert_eq!((w.lhs_value, w.rhs_value), (4, 4));
        assert_eq!(find_solution(&ap3(), &[1, 2, 4, 5], &limits()).unwrap(), None);
        assert_eq!(find_solution(&ap3(), &[7], &limits()).unwrap(), None);
        assert_eq!(find_solution(&ap3(), &[], &limits()).unwrap(), None);
    }

    #[test]
    fn split_and_exhaustive_routes_agree() {
        let a = arr(&[1, 2, 4], &[3, 4]);
        let set = [1, 3, 8, 9, 14];
        let values = sorted_values(&set);
        assert_eq!(search_split(&a, &values), search_exhaustive(&a, &values));
        assert!(search_split(&a, &values).is_some());
    }

    #[test]
    fn caps_are_enforced() {
        let wide = arr(&[1, 1, 1, 1], &[1, 1, 1, 1]);
        assert!(matches!(find_solution(&wide, &[1, 2], &limits()), Err(Error::ArityCap { k: 8, cap: 6 })));
        let tight = SearchLimits { max_checks: 10, ..limits() };
        assert!(matches!(find_solution(&ap3(), &[1, 2, 3], &tight), Err(Error::SearchCap { .. })));
    }

    #[test]
    fn verification_reports_first_witness() {
        let eqs = vec![ap3(), arr(&[2], &[1, 1])];
        let ok = verify_solution_free(&[1, 2, 4, 5], &eqs, &limits()).unwrap();
        assert!(ok.verified && ok.witness.is_none());
        let bad = verify_solution_free(&[1, 2, 3], &eqs, &limits()).unwrap();
        assert!(!bad.verified);
        assert_eq!(bad.witness.unwrap().equation, 0);
        assert!(verify_solution_free::<i64>(&[], &eqs, &limits()).unwrap().verified);
    }

    #[test]
    fn greedy_examples() {
        let eqs = vec![ap3(), arr(&[2], &[1, 1])];
        assert_eq!(greedy_solution_free(20, &eqs, &limits()).unwrap().set_m, vec![1, 2, 4, 5, 10, 11, 13, 14]);
        assert_eq!(greedy_solution_free(1, &eqs, &limits()).unwrap().set_m, vec![1]);
        assert_eq!(greedy_solution_free(3, &[ap3()], &limits()).unwrap().set_m, vec![1, 2]);
        let shifted = greedy_solution_free_in(0, 19, &eqs, &limits()).unwrap();
        assert_eq!(shifted.set_m, vec![0, 1, 3, 4, 9, 10, 12, 13]);
    }

    #[test]
    fn exact_examples() {
        assert_eq!(max_solution_free_exact(4, &[ap3()], &limits()).unwrap().set_m, vec![1, 2, 4]);
        assert_eq!(max_solution_free_exact(1, &[ap3()], &limits()).unwrap().set_m, vec![1]);
        assert_eq!(max_solution_free_exact(9, &[ap3()], &limits()).unwrap().set_m, vec![1, 2, 4, 8, 9]);
        assert!(matches!(max_solution_free_exact(100, &[ap3()], &limits()), Err(Error::ExactCap { .. })));
    }

    #[test]
    fn behrend_small_cases() {
        let cert = behrend_base(&ap3(), 2, &limits()).unwrap();
        assert_eq!(cert.set_m, vec![1]);
        assert!(matches!(behrend_base(&arr(&[1, 2], &[2, 1]), 100, &limits()), Err(Error::NotOneSided(_))));
        assert!(matches!(behrend_base(&arr(&[1, 1], &[3]), 100, &limits()), Err(Error::NotOneSided(_))));
        assert!(behrend_base(&arr(&[1], &[1]), 100, &limits()).is_err());
    }

    #[test]
    fn behrend_ten_thousand() {
        let cert = behrend_base(&ap3(), 10_000, &limits()).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.method, Method::Exhaustive);
        assert_eq!(
            cert.set_m,
            vec![58, 70, 202, 250, 358, 418, 564, 682, 720, 732, 742, 850, 898, 1030, 1042]
        );
        assert_eq!(cert.construction, Construction::Behrend { base: 13, digit_bound: 6, digits: 3, shell: 41 });
    }

    #[test]
    fn link_example_with_degenerate_digit_set() {
        let a = arr(&[2, 3, 95], &[1, 99]);
        let anc = ancestor(&a, &2, AncestorKind::First).unwrap();
        assert_eq!(anc, arr(&[2, 3], &[1, 2, 2]));
        // every two-element set solves 2x+3y = z+2w+2v, so B = {1}
        let b = max_solution_free_exact(19, &[anc], &limits()).unwrap();
        assert_eq!(b.set_m, vec![1]);
        let m = link_construct(&b.set_m, &a, &2, AncestorKind::First, 2, &limits()).unwrap();
        assert!(m.set_m.is_empty());
        match m.construction {
            Construction::Link(p) => assert_eq!(p.base, 97),
            other => panic!("unexpected construction {other:?}"),
        }
    }

    #[test]
    fn link_lifts_a_nontrivial_set() {
        let a = arr(&[10, 30], &[12, 28]);
        let anc = ancestor(&a, &1, AncestorKind::First).unwrap();
        assert_eq!(anc, arr(&[10, 1, 1], &[12]));
        let limit = 28 / anc.pos_sum();
        let b = max_solution_free_exact(limit as u64, &[anc], &limits()).unwrap();
        for digits in 1..=2 {
            let m = link_construct(&b.set_m, &a, &1, AncestorKind::First, digits, &limits()).unwrap();
            assert!(m.verified, "{digits} digits");
            assert_eq!(m.len(), b.len().pow(digits as u32) - usize::from(b.set_m.contains(&1)));
            assert!(m.set_m.iter().all(|&v| v >= 1 && v < 29i64.pow(digits as u32)));
        }
    }

    #[test]
    fn link_checks_preconditions() {
        let a = arr(&[10, 30], &[12, 28]);
        assert!(matches!(
            link_construct(&[3], &a, &1, AncestorKind::First, 1, &limits()),
            Err(Error::DigitOutOfRange { .. })
        ));
        let b = arr(&[2, 3, 95], &[1, 99]);
        assert!(matches!(
            link_construct(&[1, 2], &b, &2, AncestorKind::First, 1, &limits()),
            Err(Error::DigitSetNotFree)
        ));
        assert!(link_construct(&[1], &a, &1, AncestorKind::First, 0, &limits()).is_err());
    }

    #[test]
    fn pipeline_on_monotonic_sequence_is_the_sphere_set() {
        let u = PermSeq::from_i64s(&[0, 1, 2]).unwrap();
        let cert = pipeline_single_equation(&u, 0.5f64, &10_000i64, &PipelineConfig::default()).unwrap();
        let direct = behrend_base(&ap3(), 10_000, &limits()).unwrap();
        assert_eq!(cert.set_m, direct.set_m);
        assert!(cert.verified);
    }

    #[test]
    fn certificate_json_shape() {
        let cert = verify_solution_free(&[1, 2, 3], &[ap3()], &limits()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["method"], "exhaustive");
        assert_eq!(v["set"], serde_json::json!([1, 2, 3]));
        assert_eq!(v["witness"]["witness"]["assignment"][0]["side"], "pos");
        let back: SolutionFreeCert<i64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, cert);
        assert_eq!(cert.set_text(), "1\n2\n3\n");
    }
}
