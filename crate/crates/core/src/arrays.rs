//! Bipartite arrays (invariant linear equations), ancestors, θ schedules and
//! the ancestor-string construction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::scalar::{iterated_log_map, log_is_approximate, Int, LogBase, Real};
use crate::sequences::{analyze, enumerate_sequences, PermSeq};

/// The equation `Σ pos_i x_i = Σ neg_j y_j`, stored as two sorted multisets of
/// positive coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: Int", try_from = "RawArray<T>")]
pub struct BipartiteArray<T> {
    #[serde(with = "json::int_vec")]
    pos: Vec<T>,
    #[serde(with = "json::int_vec")]
    neg: Vec<T>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Int")]
struct RawArray<T> {
    #[serde(with = "json::int_vec")]
    pos: Vec<T>,
    #[serde(with = "json::int_vec")]
    neg: Vec<T>,
}

impl<T: Int> TryFrom<RawArray<T>> for BipartiteArray<T> {
    type Error = Error;

    fn try_from(raw: RawArray<T>) -> Result<Self> {
        BipartiteArray::new(raw.pos, raw.neg)
    }
}

impl<T: Int> BipartiteArray<T> {
    pub fn new(mut pos: Vec<T>, mut neg: Vec<T>) -> Result<Self> {
        if pos.is_empty() || neg.is_empty() {
            return Err(Error::EmptySide);
        }
        if let Some(bad) = pos.iter().chain(&neg).find(|v| !v.is_positive()) {
            return Err(Error::NonPositiveElement(bad.to_string()));
        }
        pos.sort();
        neg.sort();
        Ok(BipartiteArray { pos, neg })
    }

    pub fn from_i64s(pos: &[i64], neg: &[i64]) -> Result<Self> {
        let conv = |v: &[i64]| v.iter().map(|&x| T::from_i64_lossless(x)).collect();
        Self::new(conv(pos), conv(neg))
    }

    pub fn pos(&self) -> &[T] {
        &self.pos
    }

    pub fn neg(&self) -> &[T] {
        &self.neg
    }

    /// `(s, r)`: number of positive and negative coefficients.
    pub fn kind(&self) -> (usize, usize) {
        (self.pos.len(), self.neg.len())
    }

    pub fn arity(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn pos_sum(&self) -> T {
        self.pos.iter().fold(T::zero(), |acc, v| acc + v.clone())
    }

    pub fn neg_sum(&self) -> T {
        self.neg.iter().fold(T::zero(), |acc, v| acc + v.clone())
    }

    pub fn is_invariant(&self) -> bool {
        self.pos_sum() == self.neg_sum()
    }

    fn require_invariant(&self) -> Result<()> {
        if self.is_invariant() {
            Ok(())
        } else {
            Err(Error::NotInvariant {
                pos: self.pos_sum().to_string(),
                neg: self.neg_sum().to_string(),
            })
        }
    }

    /// Largest positive coefficient.
    pub fn alpha(&self) -> &T {
        self.pos.last().expect("nonempty side")
    }

    /// Largest negative coefficient.
    pub fn alpha_prime(&self) -> &T {
        self.neg.last().expect("nonempty side")
    }

    /// The smaller of the two side maxima.
    pub fn min_max(&self) -> &T {
        std::cmp::min(self.alpha(), self.alpha_prime())
    }

    /// Type `(s, 1)` or `(1, s)`.
    pub fn is_monotonic(&self) -> bool {
        self.pos.len() == 1 || self.neg.len() == 1
    }

    /// All coefficients, positive side first.
    pub fn elements(&self) -> impl Iterator<Item = &T> {
        self.pos.iter().chain(&self.neg)
    }

    pub fn contains(&self, v: &T) -> bool {
        self.pos.binary_search(v).is_ok() || self.neg.binary_search(v).is_ok()
    }

    /// Removes one copy of each value (from whichever side holds it, positive
    /// side first). `None` if a value is missing or a side would become empty.
    pub fn remove_values(&self, values: &[T]) -> Option<BipartiteArray<T>> {
        let mut pos = self.pos.clone();
        let mut neg = self.neg.clone();
        for v in values {
            if let Ok(i) = pos.binary_search(v) {
                pos.remove(i);
            } else if let Ok(i) = neg.binary_search(v) {
                neg.remove(i);
            } else {
                return None;
            }
        }
        BipartiteArray::new(pos, neg).ok()
    }

    /// Same type and every sorted coefficient within `scale` of its partner.
    pub fn approximates(&self, other: &BipartiteArray<T>, scale: &T) -> bool {
        let close = |a: &[T], b: &[T]| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).abs() <= *scale)
        };
        close(&self.pos, &other.pos) && close(&self.neg, &other.neg)
    }
}

impl<T: Int> fmt::Display for BipartiteArray<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({}; {})", join(&self.pos), join(&self.neg))
    }
}

/// Coefficients `u_i - u_{i-1}` (cyclic) split by sign.
pub fn array_from_sequence<T: Int>(u: &PermSeq<T>) -> Result<BipartiteArray<T>> {
    let e = u.entries();
    let k = e.len();
    if k < 3 {
        return Err(Error::SequenceTooShort { need: 3, got: k });
    }
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for i in 0..k {
        let c = e[i].clone() - e[(i + k - 1) % k].clone();
        if c.is_positive() {
            pos.push(c);
        } else {
            neg.push(-c);
        }
    }
    BipartiteArray::new(pos, neg)
}

/// The distinct equations `L(U)` over all k-permutation sequences of `r`,
/// `3 <= k <= |r|`. An equation and its mirror (sides swapped) have the same
/// solutions, so only the first of the two is kept.
pub fn equations_of_set<T: Int>(r: &[T]) -> Result<Vec<BipartiteArray<T>>> {
    let mut out: Vec<BipartiteArray<T>> = Vec::new();
    let n = {
        let mut v = r.to_vec();
        v.sort();
        v.dedup();
        v.len()
    };
    for k in 3..=n {
        for u in enumerate_sequences(r, k)? {
            let a = array_from_sequence(&u)?;
            let mirror = BipartiteArray { pos: a.neg.clone(), neg: a.pos.clone() };
            if !out.iter().any(|b| *b == a || *b == mirror) {
                out.push(a);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "T: Int")]
pub struct ArrayDiagnostics<T> {
    #[serde(with = "json::int")]
    pub alpha: T,
    #[serde(with = "json::int")]
    pub alpha_prime: T,
    #[serde(with = "json::int")]
    pub gap: T,
    #[serde(with = "json::int")]
    pub delta: T,
    #[serde(with = "json::int_vec")]
    pub z_set: Vec<T>,
    pub mutually_unequal: bool,
}

pub fn diagnostics<T: Int>(a: &BipartiteArray<T>) -> Result<ArrayDiagnostics<T>> {
    let alpha = a.alpha().clone();
    let alpha_prime = a.alpha_prime().clone();
    let gap = (alpha.clone() - alpha_prime.clone()).abs();

    let mut values: Vec<T> = a.elements().cloned().collect();
    values.sort();
    let mutually_unequal = values.windows(2).all(|w| w[0] != w[1]);
    values.dedup();
    // smallest positive pairwise gap is between sorted neighbours
    let min_gap = values.windows(2).map(|w| w[1].clone() - w[0].clone()).min();
    let delta = match min_gap {
        Some(g) if g < values[0] => g,
        _ => values[0].clone(),
    };

    let mut z_set: Vec<T> = a.elements().cloned().collect();
    z_set.push(gap.clone());
    for m in [&alpha, &alpha_prime] {
        let i = z_set.iter().position(|v| v == m).expect("maxima are elements");
        z_set.remove(i);
    }
    z_set.sort();

    Ok(ArrayDiagnostics { alpha, alpha_prime, gap, delta, z_set, mutually_unequal })
}

/// Parameters `(a, b, t)` with `0 < b <= a^t < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasticParams<F> {
    pub a: F,
    pub b: F,
    pub t: usize,
}

impl<F: Real> PlasticParams<F> {
    pub fn new(a: F, b: F, t: usize) -> Result<Self> {
        let at = a.powi(t as i32);
        if t < 3 || !(a > F::zero() && b > F::zero() && b <= at && at < F::one()) {
            return Err(Error::InvalidParameter(format!(
                "need t >= 3 and 0 < b <= a^t < 1 (a={a}, b={b}, t={t})"
            )));
        }
        Ok(PlasticParams { a, b, t })
    }
}

/// Finite-size measurements of the asymptotic feasibility conditions.
/// Ratios that stay bounded as `m` grows are what feasibility asks for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport<F> {
    pub mutually_unequal: bool,
    /// `|α - α'| / max(α, α')`, should tend to 0.
    pub gap_ratio: F,
    /// `log α / log^a m`.
    pub alpha_growth: F,
    /// `min_{w ∈ Z} log w / log^b m`, should stay bounded away from 0.
    pub z_lower: F,
    /// `max_{w ∈ Z} log w / log^a α`, should stay bounded.
    pub z_upper: F,
}

pub fn feasibility_report<T: Int, F: Real>(
    a: &BipartiteArray<T>,
    m: &T,
    params: &PlasticParams<F>,
) -> Result<FeasibilityReport<F>> {
    let d = diagnostics(a)?;
    let f = |x: f64| F::from_f64(x).unwrap_or_else(F::nan);
    let (pa, pb) = (params.a.to_f64().unwrap_or(f64::NAN), params.b.to_f64().unwrap_or(f64::NAN));
    let top = std::cmp::max(&d.alpha, &d.alpha_prime).log2();
    let log_m = m.log2();
    let log_alpha = d.alpha.log2();
    let z_logs: Vec<f64> = d.z_set.iter().map(|w| w.log2()).collect();
    let z_min = z_logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let z_max = z_logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FeasibilityReport {
        mutually_unequal: d.mutually_unequal,
        gap_ratio: f((d.gap.log2() - top).exp2()),
        alpha_growth: f(log_alpha / log_m.powf(pa)),
        z_lower: f(z_min / log_m.powf(pb)),
        z_upper: f(z_max / log_alpha.powf(pa)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum AncestorKind {
    First,
    Second,
}

impl AncestorKind {
    /// Choice made from a deletion-character bit: 0 selects the first type.
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            AncestorKind::First
        } else {
            AncestorKind::Second
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            AncestorKind::First => 0,
            AncestorKind::Second => 1,
        }
    }
}

impl From<AncestorKind> for u8 {
    fn from(k: AncestorKind) -> u8 {
        k.bit() + 1
    }
}

impl TryFrom<u8> for AncestorKind {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(AncestorKind::First),
            2 => Ok(AncestorKind::Second),
            _ => Err(Error::InvalidParameter(format!("ancestor type must be 1 or 2, got {v}"))),
        }
    }
}

/// First or second type ancestor of `a` by `theta`.
///
/// With `α = max pos`, `α' = max neg` and `α' > α`:
///   first  = (pos - α; neg - α' + {α'-α-θ, θ})
///   second = (pos - α + {θ}; neg - α' + {α'-α+θ})
/// and symmetrically when `α' < α`.
pub fn ancestor<T: Int>(a: &BipartiteArray<T>, theta: &T, which: AncestorKind) -> Result<BipartiteArray<T>> {
    a.require_invariant()?;
    if !theta.is_positive() {
        return Err(Error::BadTheta(theta.to_string()));
    }
    let alpha = a.alpha().clone();
    let alpha_prime = a.alpha_prime().clone();
    if alpha == alpha_prime {
        return Err(Error::TiedMaxima(alpha.to_string()));
    }
    let mut pos = a.pos.clone();
    let mut neg = a.neg.clone();
    pos.pop();
    neg.pop();

    // "small" side loses its max; the other side's max becomes the gap term
    let (small, large) = if alpha_prime > alpha { (&mut pos, &mut neg) } else { (&mut neg, &mut pos) };
    let gap = (alpha_prime - alpha).abs();
    let new_term = match which {
        AncestorKind::First => {
            large.push(theta.clone());
            gap - theta.clone()
        }
        AncestorKind::Second => {
            small.push(theta.clone());
            gap + theta.clone()
        }
    };
    if !new_term.is_positive() {
        return Err(Error::AncestorNotPositive { theta: theta.to_string(), value: new_term.to_string() });
    }
    large.push(new_term);
    BipartiteArray::new(pos, neg)
}

/// `θ₁ = ⌊2^{(log₂ min_u)^a}⌋`, `θ_{j+1} = ⌊2^{(log₂ θ_j)^a}⌋`.
pub fn theta_schedule<T: Int, F: Real>(min_u: &T, a: F, steps: usize) -> Result<Vec<T>> {
    theta_schedule_in(min_u, a, steps, LogBase::Two)
}

pub fn theta_schedule_in<T: Int, F: Real>(min_u: &T, a: F, steps: usize, base: LogBase) -> Result<Vec<T>> {
    let a = a.to_f64().unwrap_or(f64::NAN);
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!("a must lie in (0, 1), got {a}")));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("theta schedule needs at least one step".into()));
    }
    let two = T::from_i64_lossless(2);
    if *min_u < two {
        return Err(Error::InvalidParameter(format!("min U must be at least 2, got {min_u}")));
    }
    let mut out: Vec<T> = Vec::with_capacity(steps);
    let mut x = min_u.clone();
    for j in 0..steps {
        if j > 0 && x == two {
            return Err(Error::ScheduleStalled(j));
        }
        let next = iterated_log_map(&x, a, base).ok_or(Error::Overflow("theta schedule"))?;
        if next < two {
            return Err(Error::ScheduleStalled(j));
        }
        out.push(next.clone());
        x = next;
    }
    Ok(out)
}

/// Chain `A_[0] = A(U), …, A_[τ]` where each array is an ancestor of the
/// previous one, with the θ values, the choice bits (0 = first type) and the
/// locations `⌊α_{i-1} / σ_i⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct AncestorString<T> {
    pub arrays: Vec<BipartiteArray<T>>,
    #[serde(with = "json::int_vec")]
    pub thetas: Vec<T>,
    pub choices: Vec<u8>,
    #[serde(with = "json::int_vec")]
    pub locations: Vec<T>,
    /// Set when θ₁ was computed from a value above 2^53, where the floors may
    /// be off by one.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate_logs: bool,
}

impl<T: Int> AncestorString<T> {
    pub fn tau(&self) -> usize {
        self.thetas.len()
    }

    pub fn terminal(&self) -> &BipartiteArray<T> {
        self.arrays.last().expect("string is never empty")
    }

    /// `arrays[i]` with one copy of each of `θ₁ … θ_i` removed.
    pub fn residue(&self, i: usize) -> Option<BipartiteArray<T>> {
        self.arrays[i].remove_values(&self.thetas[..i])
    }
}

/// Builds the ancestor string of `A(U)` following the deletion character of `U`.
///
/// Each θ must stay below δ of the array it is applied to; a monotonic `U`
/// yields the one-element string `[A(U)]`.
pub fn algorithm1<T: Int, F: Real>(u: &PermSeq<T>, a: F) -> Result<AncestorString<T>> {
    algorithm1_in(u, a, LogBase::Two)
}

pub fn algorithm1_in<T: Int, F: Real>(u: &PermSeq<T>, a: F, base: LogBase) -> Result<AncestorString<T>> {
    let analysis = analyze(u)?;
    let first = array_from_sequence(u)?;
    let mut string = AncestorString {
        arrays: vec![first],
        thetas: Vec::new(),
        choices: Vec::new(),
        locations: Vec::new(),
        approximate_logs: log_is_approximate(u.min()),
    };
    if analysis.tau == 0 {
        return Ok(string);
    }
    let thetas = theta_schedule_in(u.min(), a, analysis.tau, base).map_err(|e| match e {
        Error::ScheduleStalled(j) => Error::StringBroken { step: j + 1, reason: Box::new(e) },
        other => Error::StringBroken { step: 1, reason: Box::new(other) },
    })?;
    for (i, (theta, &bit)) in thetas.iter().zip(&analysis.chi).enumerate() {
        let step = i + 1;
        let broken = |e: Error| Error::StringBroken { step, reason: Box::new(e) };
        let prev = string.arrays.last().expect("nonempty");
        let delta = diagnostics(prev)?.delta;
        if *theta >= delta {
            return Err(broken(Error::ThetaNotBelowDelta { theta: theta.to_string(), delta: delta.to_string() }));
        }
        let next = ancestor(prev, theta, AncestorKind::from_bit(bit)).map_err(broken)?;
        let location = prev.min_max().clone() / next.pos_sum();
        string.arrays.push(next);
        string.thetas.push(theta.clone());
        string.choices.push(bit);
        string.locations.push(location);
    }
    Ok(string)
}
