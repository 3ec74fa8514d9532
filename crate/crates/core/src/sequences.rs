//! Permutation sequences: cyclic monotonicity, deletion of the maximum,
//! terminating numbers and deletion characters.

use std::collections::HashSet;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::json;
use crate::scalar::Int;

/// Ordered tuple of distinct nonnegative integers, read cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermSeq<T>(Vec<T>);

impl<T: Int> PermSeq<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::SequenceTooShort { need: 1, got: 0 });
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            if e.is_negative() {
                return Err(Error::NegativeEntry(e.to_string()));
            }
            if !seen.insert(e) {
                return Err(Error::RepeatedEntry(e.to_string()));
            }
        }
        Ok(PermSeq(entries))
    }

    pub fn from_i64s(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&v| T::from_i64_lossless(v)).collect())
    }

    pub fn entries(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn require_len(&self, need: usize) -> Result<()> {
        if self.len() < need {
            Err(Error::SequenceTooShort { need, got: self.len() })
        } else {
            Ok(())
        }
    }

    fn argmax(&self) -> usize {
        self.0.iter().position_max().expect("nonempty")
    }

    pub fn max(&self) -> &T {
        &self.0[self.argmax()]
    }

    pub fn min(&self) -> &T {
        self.0.iter().min().expect("nonempty")
    }

    /// Cyclic monotonicity. A sequence is cyclically increasing iff it has
    /// exactly one cyclic descent, decreasing iff exactly one cyclic ascent.
    pub fn monotonicity(&self) -> Result<Monotonicity> {
        self.require_len(2)?;
        let k = self.len();
        let descents = (0..k).filter(|&i| self.0[i] > self.0[(i + 1) % k]).count();
        Ok(Monotonicity {
            increasing: descents == 1,
            decreasing: k - descents == 1,
        })
    }

    pub fn is_monotonic(&self) -> Result<bool> {
        self.monotonicity().map(|m| m.increasing || m.decreasing)
    }

    /// Removes the maximum, keeping the order of the remaining entries.
    pub fn delete_max(&self) -> Result<PermSeq<T>> {
        self.require_len(2)?;
        let mut entries = self.0.clone();
        entries.remove(self.argmax());
        Ok(PermSeq(entries))
    }

    /// Rotation starting at the maximum entry.
    pub fn canonical_rotation(&self) -> PermSeq<T> {
        let mut entries = self.0.clone();
        entries.rotate_left(self.argmax());
        PermSeq(entries)
    }

    /// Cyclic predecessor and successor of the maximum.
    fn max_neighbors(&self) -> (&T, &T) {
        let k = self.len();
        let i = self.argmax();
        (&self.0[(i + k - 1) % k], &self.0[(i + 1) % k])
    }
}

impl<T: Int> Serialize for PermSeq<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json::int_vec::serialize(&self.0, s)
    }
}

impl<'de, T: Int> Deserialize<'de> for PermSeq<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = json::int_vec::deserialize(d)?;
        PermSeq::new(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub increasing: bool,
    pub decreasing: bool,
}

/// Deletion chain of a sequence together with its terminating number `tau`,
/// terminal direction `epsilon` (1 = increasing) and deletion character `chi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Int")]
pub struct SeqAnalysis<T> {
    pub tau: usize,
    pub epsilon: u8,
    pub chi: Vec<u8>,
    pub deletions: Vec<PermSeq<T>>,
}

impl<T: Int> SeqAnalysis<T> {
    pub fn terminal(&self) -> &PermSeq<T> {
        self.deletions.last().expect("deletion chain is never empty")
    }
}

pub fn analyze<T: Int>(u: &PermSeq<T>) -> Result<SeqAnalysis<T>> {
    u.require_len(3)?;
    let mut deletions = vec![u.clone()];
    loop {
        let last = deletions.last().expect("nonempty");
        // every 3-sequence is monotonic, so this stops by length 3
        if last.is_monotonic()? {
            break;
        }
        let next = last.delete_max()?;
        deletions.push(next);
    }
    let tau = deletions.len() - 1;
    let epsilon = u8::from(deletions[tau].monotonicity()?.increasing);
    let chi = deletions[..tau]
        .iter()
        .map(|d| {
            let (before, after) = d.max_neighbors();
            if before < after {
                (1 + epsilon) % 2
            } else {
                epsilon
            }
        })
        .collect();
    Ok(SeqAnalysis { tau, epsilon, chi, deletions })
}

/// All k-permutation sequences of `r` up to cyclic rotation, each starting at
/// its maximum. Order is deterministic (lexicographic in sorted-`r` positions).
pub fn enumerate_sequences<T: Int>(r: &[T], k: usize) -> Result<Vec<PermSeq<T>>> {
    let set: Vec<T> = r.iter().cloned().sorted().dedup().collect();
    if k < 3 || k > set.len() {
        return Err(Error::SequenceLength { k, n: set.len() });
    }
    if let Some(neg) = set.iter().find(|v| v.is_negative()) {
        return Err(Error::NegativeEntry(neg.to_string()));
    }
    Ok(set
        .iter()
        .permutations(k)
        .filter(|p| p.iter().skip(1).all(|v| *v < p[0]))
        .map(|p| PermSeq(p.into_iter().cloned().collect()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(v: &[i64]) -> PermSeq<i64> {
        PermSeq::from_i64s(v).unwrap()
    }

    #[test]
    fn monotonicity_examples() {
        let m = seq(&[3, 4, 5, 1, 2]).monotonicity().unwrap();
        assert!(m.increasing && !m.decreasing);
        let m = seq(&[1, 2, 3]).monotonicity().unwrap();
        assert!(m.increasing && !m.decreasing);
        let m = seq(&[2, 1, 3, 4]).monotonicity().unwrap();
        assert!(!m.increasing && !m.decreasing);
        assert!(seq(&[4]).monotonicity().is_err());
    }

    #[test]
    fn delete_max_examples() {
        assert_eq!(seq(&[3, 6, 8, 4, 5, 1, 7, 2]).delete_max().unwrap(), seq(&[3, 6, 4, 5, 1, 7, 2]));
        assert_eq!(seq(&[5, 9, 2]).delete_max().unwrap(), seq(&[5, 2]));
        assert_eq!(seq(&[1, 2]).delete_max().unwrap(), seq(&[1]));
        assert!(seq(&[1]).delete_max().is_err());
    }

    #[test]
    fn worked_example_chain() {
        let a = analyze(&seq(&[3, 6, 8, 4, 5, 1, 7, 2])).unwrap();
        assert_eq!(a.tau, 3);
        assert_eq!(a.epsilon, 1);
        assert_eq!(a.chi, vec![1, 0, 0]);
        assert_eq!(a.deletions[1], seq(&[3, 6, 4, 5, 1, 7, 2]));
        assert_eq!(a.deletions[2], seq(&[3, 6, 4, 5, 1, 2]));
        assert_eq!(a.deletions[3], seq(&[3, 4, 5, 1, 2]));
    }

    #[test]
    fn small_analyses() {
        let a = analyze(&seq(&[1, 2, 3, 4])).unwrap();
        assert_eq!((a.tau, a.epsilon, a.chi.clone()), (0, 1, vec![]));
        let a = analyze(&seq(&[2, 1, 3, 4])).unwrap();
        assert_eq!((a.tau, a.epsilon, a.chi.clone()), (1, 0, vec![0]));
        assert!(analyze(&seq(&[1, 2])).is_err());
    }

    #[test]
    fn constructor_rejects_bad_entries() {
        assert!(matches!(PermSeq::<i64>::from_i64s(&[1, 1, 2]), Err(Error::RepeatedEntry(_))));
        assert!(matches!(PermSeq::<i64>::from_i64s(&[1, -1, 2]), Err(Error::NegativeEntry(_))));
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_sequences(&[0i64, 1, 2], 3).unwrap();
        assert_eq!(e, vec![seq(&[2, 0, 1]), seq(&[2, 1, 0])]);
        assert!(enumerate_sequences(&[1i64, 2], 3).is_err());
        assert_eq!(enumerate_sequences(&[0i64, 1, 2, 3], 3).unwrap().len(), 8);
    }

    #[test]
    fn serializes_as_json_arrays() {
        let a = analyze(&seq(&[2, 1, 3, 4])).unwrap();
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"tau":1,"epsilon":0,"chi":[0],"deletions":[[2,1,3,4],[2,1,3]]}"#);
        let back: SeqAnalysis<i64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    fn distinct_seq(max_len: usize) -> impl Strategy<Value = PermSeq<i64>> {
        proptest::sample::subsequence((0..40i64).collect::<Vec<_>>(), 3..=max_len)
            .prop_shuffle()
            .prop_map(|v| PermSeq::new(v).unwrap())
    }

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    proptest! {
        #[test]
        fn tau_is_at_most_k_minus_3(u in distinct_seq(9)) {
            let a = analyze(&u).unwrap();
            prop_assert!(a.tau + 3 <= u.len());
            prop_assert_eq!(a.chi.len(), a.tau);
            prop_assert!(a.terminal().is_monotonic().unwrap());
            for d in &a.deletions[..a.tau] {
                prop_assert!(!d.is_monotonic().unwrap());
            }
        }

        #[test]
        fn deleting_the_max_shortens_the_chain(u in distinct_seq(9)) {
            let a = analyze(&u).unwrap();
            prop_assume!(a.tau >= 1);
            let b = analyze(&u.delete_max().unwrap()).unwrap();
            prop_assert_eq!(b.tau, a.tau - 1);
            prop_assert_eq!(&b.chi[..], &a.chi[1..]);
        }

        #[test]
        fn three_sequences_are_monotonic(u in distinct_seq(3)) {
            let m = u.monotonicity().unwrap();
            prop_assert!(m.increasing ^ m.decreasing);
        }

        #[test]
        fn monotonicity_is_rotation_invariant(u in distinct_seq(8), shift in 0usize..8) {
            let mut v = u.entries().to_vec();
            let len = v.len();
            v.rotate_left(shift % len);
            prop_assert_eq!(PermSeq::new(v).unwrap().monotonicity().unwrap(), u.monotonicity().unwrap());
        }

        #[test]
        fn enumeration_count(n in 3usize..7, k in 3usize..7) {
            prop_assume!(k <= n);
            let r: Vec<i64> = (0..n as i64).collect();
            let e = enumerate_sequences(&r, k).unwrap();
            prop_assert_eq!(e.len(), factorial(n) / (factorial(n - k) * k));
        }
    }
}
