//! Dense integer sets and sumset kernels.
//!
//! [`IntegerSet`] stores one bit per integer in `[0, N]` with a cached
//! cardinality. Sumsets are computed as bit-parallel shift-ORs; for sets that
//! are unions of arithmetic progressions the shift side collapses to a few
//! doubling passes (see [`sumset_progressions`]), which is what makes the
//! `N = 10^7` scans cheap.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::residues::ResidueProfile;

const WORD_BITS: u64 = 64;

/// Immutable bitset over `[0, bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSet {
    bound: u64,
    words: Vec<u64>,
    cardinality: u64,
}

/// The arithmetic progression `start, start + gap, start + 2·gap, …`
/// (a single point when `gap == 0`). Used to describe the shift side of a
/// sumset in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progression {
    pub start: u64,
    pub gap: u64,
}

fn words_for(bound: u64) -> usize {
    (bound / WORD_BITS + 1) as usize
}

fn mask_tail(words: &mut [u64], bound: u64) {
    let tail = (bound + 1) % WORD_BITS;
    if tail != 0 {
        let last = words.len() - 1;
        words[last] &= (1u64 << tail) - 1;
    }
}

impl IntegerSet {
    pub fn empty(bound: u64) -> Self {
        IntegerSet { bound, words: vec![0; words_for(bound)], cardinality: 0 }
    }

    pub fn from_members(members: &[u64], bound: u64) -> Result<Self> {
        let mut words = vec![0u64; words_for(bound)];
        for &m in members {
            if m > bound {
                return Err(Error::Range { value: m, bound });
            }
            words[(m / WORD_BITS) as usize] |= 1 << (m % WORD_BITS);
        }
        Ok(Self::from_words(bound, words))
    }

    /// Membership by predicate over `[0, bound]`.
    pub fn from_predicate<F: Fn(u64) -> bool>(bound: u64, pred: F) -> Self {
        let mut words = vec![0u64; words_for(bound)];
        for n in 0..=bound {
            if pred(n) {
                words[(n / WORD_BITS) as usize] |= 1 << (n % WORD_BITS);
            }
        }
        Self::from_words(bound, words)
    }

    /// Union of arithmetic progressions, truncated at `bound`. Progressions
    /// start at `start` (members below 1 are kept as given; callers that want
    /// positive sets should use positive starts).
    pub fn from_progressions(progs: &[Progression], bound: u64) -> Self {
        let mut words = vec![0u64; words_for(bound)];
        for p in progs {
            let mut v = p.start;
            loop {
                if v > bound {
                    break;
                }
                words[(v / WORD_BITS) as usize] |= 1 << (v % WORD_BITS);
                if p.gap == 0 {
                    break;
                }
                v += p.gap;
            }
        }
        Self::from_words(bound, words)
    }

    fn from_words(bound: u64, mut words: Vec<u64>) -> Self {
        mask_tail(&mut words, bound);
        let cardinality = words.iter().map(|w| w.count_ones() as u64).sum();
        IntegerSet { bound, words, cardinality }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.bound && (self.words[(n / WORD_BITS) as usize] >> (n % WORD_BITS)) & 1 == 1
    }

    /// Ascending member iterator.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * WORD_BITS;
            BitIter { word: w, base }
        })
    }

    /// Number of members in `[lo, hi]`.
    pub fn count_range(&self, lo: u64, hi: u64) -> u64 {
        if lo > hi || lo > self.bound {
            return 0;
        }
        let hi = hi.min(self.bound);
        let mut count = 0u64;
        let (wl, wh) = ((lo / WORD_BITS) as usize, (hi / WORD_BITS) as usize);
        for (i, &w) in self.words[wl..=wh].iter().enumerate() {
            let mut w = w;
            let idx = wl + i;
            if idx == wl {
                w &= !0u64 << (lo % WORD_BITS);
            }
            if idx == wh {
                let t = hi % WORD_BITS;
                if t != 63 {
                    w &= (1u64 << (t + 1)) - 1;
                }
            }
            count += w.count_ones() as u64;
        }
        count
    }

    /// Largest member `<= hi` missing from the set, restricted to members of
    /// `filter` when given.
    pub fn largest_absent(&self, hi: u64, filter: impl Fn(u64) -> bool) -> Option<u64> {
        let hi = hi.min(self.bound);
        (1..=hi).rev().find(|&n| filter(n) && !self.contains(n))
    }

    /// Copy truncated to a (possibly smaller) bound.
    pub fn truncated(&self, bound: u64) -> Self {
        let n_words = words_for(bound);
        let mut words = vec![0u64; n_words];
        let copy = n_words.min(self.words.len());
        words[..copy].copy_from_slice(&self.words[..copy]);
        Self::from_words(bound, words)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Members shared with a raw word mask (e.g. a squarefree table), as a
    /// count plus the least common member.
    pub(crate) fn intersect_words(&self, other: &[u64]) -> (u64, Option<u64>) {
        let mut count = 0u64;
        let mut least = None;
        for (i, (&a, &b)) in self.words.iter().zip(other.iter()).enumerate() {
            let w = a & b;
            if w != 0 {
                if least.is_none() {
                    least = Some(i as u64 * WORD_BITS + w.trailing_zeros() as u64);
                }
                count += w.count_ones() as u64;
            }
        }
        (count, least)
    }
}

struct BitIter {
    word: u64,
    base: u64,
}

impl Iterator for BitIter {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as u64;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

/// OR `src << shift` into `dst`. The arrays may have different lengths; the
/// word just past the end of the shifted source still receives its carried
/// high bits.
fn or_shift_into(dst: &mut [u64], src: &[u64], shift: u64) {
    let wq = (shift / WORD_BITS) as usize;
    let r = shift % WORD_BITS;
    let n = dst.len();
    if wq >= n {
        return;
    }
    if r == 0 {
        let end = n.min(wq + src.len());
        for j in wq..end {
            dst[j] |= src[j - wq];
        }
    } else {
        let end = n.min(wq + src.len() + 1);
        for j in wq..end {
            let s = j - wq;
            let lo = if s < src.len() { src[s] << r } else { 0 };
            let hi = if s > 0 { src[s - 1] >> (WORD_BITS - r) } else { 0 };
            dst[j] |= lo | hi;
        }
    }
}

/// Same, but restricted to the destination window `[w0, w0 + out.len())` of
/// the conceptual full-length output. Used by the chunk-parallel kernel.
fn or_shift_into_window(out: &mut [u64], w0: usize, src: &[u64], shift: u64) {
    let wq = (shift / WORD_BITS) as usize;
    let r = shift % WORD_BITS;
    for (k, slot) in out.iter_mut().enumerate() {
        let j = w0 + k;
        if j < wq {
            continue;
        }
        let s = j - wq;
        if r == 0 {
            if s < src.len() {
                *slot |= src[s];
            }
        } else {
            if s > src.len() {
                continue;
            }
            let lo = if s < src.len() { src[s] << r } else { 0 };
            let hi = if s > 0 { src[s - 1] >> (WORD_BITS - r) } else { 0 };
            *slot |= lo | hi;
        }
    }
}

/// Sumset `{a + b : a ∈ A, b ∈ B, a + b <= n}`. Repetition `a + a` is
/// included when the arguments alias the same set.
pub fn sumset(a: &IntegerSet, b: &IntegerSet, n: u64) -> IntegerSet {
    // Shift by the smaller side.
    let (shifts, base) = if a.cardinality() <= b.cardinality() { (a, b) } else { (b, a) };
    let shift_vals: Vec<u64> = shifts.iter().collect();
    let n_words = words_for(n);
    let src = &base.words[..base.words.len().min(n_words)];

    const PAR_CHUNK: usize = 1 << 13;
    let mut words = vec![0u64; n_words];
    if n_words >= PAR_CHUNK && shift_vals.len() > 16 {
        words
            .par_chunks_mut(PAR_CHUNK)
            .enumerate()
            .for_each(|(ci, chunk)| {
                let w0 = ci * PAR_CHUNK;
                for &s in &shift_vals {
                    or_shift_into_window(chunk, w0, src, s);
                }
            });
    } else {
        for &s in &shift_vals {
            or_shift_into(&mut words, src, s);
        }
    }
    IntegerSet::from_words(n, words)
}

/// `OR_{t >= 0} (x << t·gap)` truncated at `bound`, by binary doubling.
fn or_multiples(x: &IntegerSet, gap: u64, bound: u64) -> IntegerSet {
    debug_assert!(gap > 0);
    let n_words = words_for(bound);
    let mut words = vec![0u64; n_words];
    let copy = n_words.min(x.words.len());
    words[..copy].copy_from_slice(&x.words[..copy]);
    mask_tail(&mut words, bound);
    let mut covered = 1u64; // shifts t in [0, covered) are ORed in
    while covered.saturating_mul(gap) <= bound {
        let shift = covered * gap;
        let snapshot = words.clone();
        or_shift_into(&mut words, &snapshot, shift);
        mask_tail(&mut words, bound);
        covered *= 2;
    }
    IntegerSet::from_words(bound, words)
}

/// Sumset of `B` with a shift side given in closed form as a union of
/// arithmetic progressions. Equivalent to
/// `sumset(IntegerSet::from_progressions(shifts, n), b, n)` but needs only
/// `O(Σ log(n/gap))` full-vector passes. The progressions are truncated at
/// the output bound, so the shift set must be intended at bound `n` (built at
/// the same bound), not at some smaller one.
pub fn sumset_progressions(shifts: &[Progression], b: &IntegerSet, n: u64) -> IntegerSet {
    let mut words = vec![0u64; words_for(n)];
    let base = b.truncated(n);
    for p in shifts {
        if p.start > n {
            continue;
        }
        if p.gap == 0 {
            or_shift_into(&mut words, base.words(), p.start);
        } else {
            let reach = or_multiples(&base, p.gap, n);
            or_shift_into(&mut words, reach.words(), p.start);
        }
        mask_tail(&mut words, n);
    }
    IntegerSet::from_words(n, words)
}

/// Word-wise union, truncated at `n`.
pub fn union(a: &IntegerSet, b: &IntegerSet, n: u64) -> IntegerSet {
    let n_words = words_for(n);
    let mut words = vec![0u64; n_words];
    for (i, slot) in words.iter_mut().enumerate() {
        if i < a.words.len() {
            *slot |= a.words[i];
        }
        if i < b.words.len() {
            *slot |= b.words[i];
        }
    }
    IntegerSet::from_words(n, words)
}

/// `h`-fold iterated sumset with repetition, truncated at `n`.
pub fn h_fold_sumset(a: &IntegerSet, h: u32, n: u64) -> Result<IntegerSet> {
    if h == 0 {
        return Err(Error::Parameter("fold count must be at least 1".into()));
    }
    let base = a.truncated(n);
    let mut acc = base.clone();
    for _ in 1..h {
        acc = sumset(&acc, &base, n);
    }
    Ok(acc)
}

/// Sums of nonempty subsets of `A` (each element used at most once),
/// truncated at `bound`; shift-OR dynamic programming.
pub fn subset_sums(a: &IntegerSet, bound: u64) -> Result<IntegerSet> {
    if bound == 0 {
        return Err(Error::Parameter("subset-sum bound must be positive".into()));
    }
    let n_words = words_for(bound);
    let mut words = vec![0u64; n_words];
    words[0] = 1; // empty subset
    for m in a.iter() {
        if m == 0 || m > bound {
            continue;
        }
        let snapshot = words.clone();
        or_shift_into(&mut words, &snapshot, m);
        mask_tail(&mut words, bound);
    }
    // The empty sum is not a subset sum; 0 stays only if 0 ∈ A.
    if !a.contains(0) {
        words[0] &= !1u64;
    }
    Ok(IntegerSet::from_words(bound, words))
}

/// `|A ∩ [1, window]| / window`.
pub fn density(a: &IntegerSet, window: u64) -> Result<f64> {
    if window == 0 || window > a.bound() {
        return Err(Error::Parameter(format!(
            "window must lie in [1, {}]",
            a.bound()
        )));
    }
    Ok(a.count_range(1, window) as f64 / window as f64)
}

/// Local densities of `A` modulo `m` over `[1, window]`.
pub fn profile(a: &IntegerSet, m: u64, window: u64) -> Result<ResidueProfile> {
    if m == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    if window == 0 || window > a.bound() {
        return Err(Error::Parameter(format!(
            "window must lie in [1, {}]",
            a.bound()
        )));
    }
    let mut counts = vec![0u64; m as usize];
    for v in a.iter() {
        if v == 0 {
            continue;
        }
        if v > window {
            break;
        }
        counts[(v % m) as usize] += 1;
    }
    Ok(ResidueProfile::new(m, window, counts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(members: &[u64], bound: u64) -> IntegerSet {
        IntegerSet::from_members(members, bound).unwrap()
    }

    fn brute_sumset(a: &[u64], b: &[u64], n: u64) -> Vec<u64> {
        let mut out: Vec<u64> = a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| x + y))
            .filter(|&s| s <= n)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn from_members_collapses_duplicates() {
        let s = set(&[1, 2, 2], 4);
        assert_eq!(s.cardinality(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 2]);
        assert!(IntegerSet::from_members(&[], 10).unwrap().is_empty());
        assert_eq!(set(&[764], 764).iter().collect::<Vec<_>>(), vec![764]);
        assert!(IntegerSet::from_members(&[11], 10).is_err());
    }

    #[test]
    fn sumset_basics() {
        let s = set(&[1, 2], 10);
        let ss = sumset(&s, &s, 10);
        assert_eq!(ss.iter().collect::<Vec<_>>(), vec![2, 3, 4]);

        let empty = IntegerSet::empty(10);
        assert!(sumset(&s, &empty, 10).is_empty());
    }

    #[test]
    fn sumset_matches_brute_force() {
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..50 {
            let bound = 200 + rng() % 300;
            let a: Vec<u64> = (0..(rng() % 20)).map(|_| rng() % bound).collect();
            let b: Vec<u64> = (0..(rng() % 20)).map(|_| rng() % bound).collect();
            let n = rng() % (2 * bound) + 1;
            let sa = set(&a, bound);
            let sb = set(&b, bound);
            let got: Vec<u64> = sumset(&sa, &sb, n).iter().collect();
            assert_eq!(got, brute_sumset(&a, &b, n));
            // commutativity
            let rev: Vec<u64> = sumset(&sb, &sa, n).iter().collect();
            assert_eq!(got, rev);
        }
    }

    #[test]
    fn sumset_monotone() {
        let a = set(&[3, 7, 11], 100);
        let a2 = set(&[3, 7, 11, 20], 100);
        let b = set(&[0, 5], 100);
        let s1 = sumset(&a, &b, 100);
        let s2 = sumset(&a2, &b, 100);
        for v in s1.iter() {
            assert!(s2.contains(v));
        }
    }

    #[test]
    fn h_fold_basics() {
        let a = set(&[0, 1], 3);
        assert!(h_fold_sumset(&a, 0, 3).is_err());
        let h1 = h_fold_sumset(&a, 1, 3).unwrap();
        assert_eq!(h1, a);
        let h3 = h_fold_sumset(&a, 3, 3).unwrap();
        assert_eq!(h3.iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn h_fold_splits() {
        let a = set(&[2, 5, 9], 60);
        for (h1, h2) in [(1u32, 2u32), (2, 2), (1, 3)] {
            let whole = h_fold_sumset(&a, h1 + h2, 60).unwrap();
            let left = h_fold_sumset(&a, h1, 60).unwrap();
            let right = h_fold_sumset(&a, h2, 60).unwrap();
            assert_eq!(whole, sumset(&left, &right, 60));
        }
    }

    #[test]
    fn subset_sums_examples() {
        let a = set(&[1, 2, 4], 7);
        let s = subset_sums(&a, 7).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6, 7]);

        let b = set(&[36, 100], 300);
        let s = subset_sums(&b, 300).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![36, 100, 136]);
    }

    #[test]
    fn subset_sums_zero_membership() {
        let with_zero = set(&[0, 3], 10);
        let s = subset_sums(&with_zero, 10).unwrap();
        assert!(s.contains(0));
        let without = set(&[3], 10);
        let s = subset_sums(&without, 10).unwrap();
        assert!(!s.contains(0));
    }

    #[test]
    fn subset_sums_matches_enumeration() {
        let members = [3u64, 5, 6, 11, 14, 17, 20, 23, 29, 31, 40, 41];
        let a = set(&members, 300);
        let s = subset_sums(&a, 300).unwrap();
        let mut brute = vec![false; 301];
        for mask in 1u32..(1 << members.len()) {
            let total: u64 = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .sum();
            if total <= 300 {
                brute[total as usize] = true;
            }
        }
        for v in 0..=300u64 {
            assert_eq!(s.contains(v), brute[v as usize], "at {v}");
        }
    }

    #[test]
    fn density_examples() {
        let evens = IntegerSet::from_predicate(40, |n| n > 0 && n % 2 == 0);
        assert_eq!(density(&evens, 40).unwrap(), 0.5);
        assert!(density(&evens, 0).is_err());
        assert!(density(&evens, 41).is_err());
    }

    #[test]
    fn profile_full_class() {
        let mult4 = IntegerSet::from_predicate(4000, |n| n > 0 && n % 4 == 0);
        let p = profile(&mult4, 4, 4000).unwrap();
        assert_eq!(p.delta(0), 1.0);
        assert_eq!(p.delta(1), 0.0);
        assert_eq!(p.delta(2), 0.0);
    }

    #[test]
    fn profile_density_consistency() {
        let s = set(&[1, 5, 8, 13, 14, 32, 33, 34, 90], 100);
        for m in [2u64, 3, 5, 36] {
            let p = profile(&s, m, 100).unwrap();
            let total: f64 = (0..m).map(|a| p.delta(a)).sum::<f64>() / m as f64;
            assert!((total - density(&s, 100).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn progressions_expand_and_sum() {
        let progs = [Progression { start: 36, gap: 36 }, Progression { start: 100, gap: 100 }];
        let direct = IntegerSet::from_predicate(5000, |n| n > 0 && (n % 36 == 0 || n % 100 == 0));
        assert_eq!(IntegerSet::from_progressions(&progs, 5000), direct);

        let b = set(&[1, 7, 50, 333], 5000);
        let fast = sumset_progressions(&progs, &b, 5000);
        let slow = sumset(&direct, &b, 5000);
        assert_eq!(fast, slow);
    }

    #[test]
    fn truncation_drops_large_sums() {
        let a = set(&[5, 9], 20);
        let s = sumset(&a, &a, 12);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![10]);
    }

    #[test]
    fn count_range_words() {
        let s = set(&[0, 1, 63, 64, 65, 127, 128, 200], 256);
        assert_eq!(s.count_range(1, 256), 7);
        assert_eq!(s.count_range(0, 256), 8);
        assert_eq!(s.count_range(64, 128), 4);
        assert_eq!(s.count_range(201, 256), 0);
    }
}
