//! Residue-class machinery modulo 36: the class set Q (classes containing no
//! squarefree integer), local-density profiles, the derived class sets U and
//! V, and the structural classifier for sumset-avoiding sets.

use crate::analytic;
use crate::error::{Error, Result};
use crate::report::{Claim, ClaimStatus};
use crate::sets::{self, IntegerSet};
use crate::sieve::{is_squarefree_trial_division, SquarefreeTable};

/// Local densities `δ_a` of a set modulo `m` over a window, stored as exact
/// (count, window) pairs; conversion to a real happens at comparison time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueProfile {
    modulus: u64,
    window: u64,
    counts: Vec<u64>,
}

impl ResidueProfile {
    pub(crate) fn new(modulus: u64, window: u64, counts: Vec<u64>) -> Self {
        debug_assert_eq!(counts.len() as u64, modulus);
        ResidueProfile { modulus, window, counts }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn count(&self, a: u64) -> u64 {
        self.counts[a as usize]
    }

    /// `δ_a = m·#{n ∈ A, n <= window, n ≡ a (mod m)} / window`.
    pub fn delta(&self, a: u64) -> f64 {
        (self.modulus * self.counts[a as usize]) as f64 / self.window as f64
    }

    pub fn exceeds(&self, a: u64, threshold: f64) -> bool {
        self.delta(a) > threshold
    }
}

/// Structural classification of a sumset-avoiding set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureClass {
    /// Subset of the multiples of 4.
    Subset4N,
    /// Subset of 4ℕ + 2.
    Subset4N2,
    /// Subset of the multiples of 9.
    Subset9N,
    /// All members even, with membership in 2 mod 4 tied to residue `a`
    /// mod 9 and membership in 0 mod 4 tied to `-a` mod 9.
    PairedMod36(u8),
    Other,
}

fn has_square_divisor(mut n: u64) -> bool {
    if n == 0 {
        return true;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return true;
            }
        }
        p += 1;
    }
    false
}

/// Default witness-scan cutoff for [`compute_q_with_bound`].
pub fn default_witness_bound(m: u64) -> u64 {
    100 * m * m
}

/// Residue classes mod `m` that contain no squarefree integer.
///
/// Decided two ways and cross-checked: algebraically (`a` is excluded iff
/// some prime square divides `gcd(a, m)`, with `gcd(0, m) = m`) and by
/// locating a squarefree witness in every class claimed to contain one. A
/// missing witness is an internal-consistency error.
pub fn compute_q(m: u64) -> Result<Vec<u64>> {
    compute_q_with_bound(m, default_witness_bound(m))
}

pub fn compute_q_with_bound(m: u64, witness_bound: u64) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    let mut q = Vec::new();
    for a in 0..m {
        let g = if a == 0 { m } else { gcd(a, m) };
        if has_square_divisor(g) {
            q.push(a);
        } else {
            // Dual route: this class must contain a squarefree integer.
            let mut n = if a == 0 { m } else { a };
            let mut found = false;
            while n <= witness_bound {
                if is_squarefree_trial_division(n) {
                    found = true;
                    break;
                }
                n += m;
            }
            if !found {
                return Err(Error::Inconsistency(format!(
                    "class {a} mod {m} has squarefree gcd but no squarefree witness below {witness_bound}"
                )));
            }
        }
    }
    Ok(q)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Classes with `δ_a > 1 - 9/π² + ε/100`. The threshold is specific to
/// modulus 36 (the squarefree density within an admissible class mod 36), so
/// other moduli are rejected.
pub fn compute_u(profile: &ResidueProfile, epsilon: f64) -> Result<Vec<u64>> {
    if profile.modulus() != 36 {
        return Err(Error::Parameter(format!(
            "U is defined for modulus 36, got {}",
            profile.modulus()
        )));
    }
    if epsilon <= 0.0 {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    let threshold = analytic::constants().one_minus_nine_over_pi2 + epsilon / 100.0;
    Ok((0..36).filter(|&a| profile.exceeds(a, threshold)).collect())
}

/// Classes with `δ_a > 0`.
pub fn compute_v(profile: &ResidueProfile) -> Vec<u64> {
    (0..profile.modulus()).filter(|&a| profile.count(a) > 0).collect()
}

/// Checks `U + V ⊆ Q` (mod 36) for a sumset-avoiding set.
///
/// The avoidance precondition is verified defensively; when it fails the
/// check is inapplicable and the claim is inconclusive with the offending
/// squarefree sum as witness. When avoidance holds but some `u + v` escapes
/// Q, the window was too small for the chosen ε, which is also reported as
/// inconclusive rather than a refutation.
pub fn check_u_plus_v_in_q(a: &IntegerSet, epsilon: f64, table: &SquarefreeTable) -> Claim {
    let window = a.bound().min(table.bound());
    let base = |status| {
        Claim::new("u-plus-v-in-q", status)
            .param("epsilon", epsilon)
            .param("window", window)
    };

    let ss = sets::sumset(a, a, window);
    let (hits, least) = ss.intersect_words(table_words(table));
    if hits > 0 {
        return base(ClaimStatus::Inconclusive)
            .witness(vec![least.unwrap()])
            .note("precondition violated: the sumset contains a squarefree integer");
    }

    let profile = match sets::profile(a, 36, window) {
        Ok(p) => p,
        Err(e) => return base(ClaimStatus::Inconclusive).note(format!("profile failed: {e}")),
    };
    let u = match compute_u(&profile, epsilon) {
        Ok(u) => u,
        Err(e) => return base(ClaimStatus::Inconclusive).note(format!("{e}")),
    };
    let v = compute_v(&profile);
    let q = match compute_q(36) {
        Ok(q) => q,
        Err(e) => return base(ClaimStatus::Inconclusive).note(format!("{e}")),
    };
    for &x in &u {
        for &y in &v {
            if !q.contains(&((x + y) % 36)) {
                return base(ClaimStatus::Inconclusive)
                    .witness(vec![x, y])
                    .note("U+V escaped Q: window too small relative to epsilon");
            }
        }
    }
    base(ClaimStatus::Pass)
        .param("u_size", u.len())
        .param("v_size", v.len())
}

pub(crate) fn table_words(table: &SquarefreeTable) -> &[u64] {
    table.words()
}

/// Classifies a nonempty set, testing tags in a fixed precedence order
/// (the families overlap on small sets, e.g. {36} lies in both 4ℕ and 9ℕ).
pub fn classify_structure(a: &IntegerSet) -> Result<StructureClass> {
    if a.is_empty() {
        return Err(Error::Parameter("cannot classify the empty set".into()));
    }
    if a.iter().all(|n| n % 4 == 0) {
        return Ok(StructureClass::Subset4N);
    }
    if a.iter().all(|n| n % 4 == 2) {
        return Ok(StructureClass::Subset4N2);
    }
    if a.iter().all(|n| n % 9 == 0) {
        return Ok(StructureClass::Subset9N);
    }
    'outer: for cand in 1..=8u8 {
        let c = cand as u64;
        for n in a.iter() {
            if n % 2 == 1 {
                return Ok(StructureClass::Other);
            }
            let first = (n % 4 == 2) == (n % 9 == c);
            let second = (n % 4 == 0) == (n % 9 == (9 - c) % 9);
            if !(first && second) {
                continue 'outer;
            }
        }
        return Ok(StructureClass::PairedMod36(cand));
    }
    Ok(StructureClass::Other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct;
    use crate::sieve::build_squarefree_table;

    #[test]
    fn q_mod_36() {
        assert_eq!(
            compute_q(36).unwrap(),
            vec![0, 4, 8, 9, 12, 16, 18, 20, 24, 27, 28, 32]
        );
    }

    #[test]
    fn q_small_moduli() {
        assert_eq!(compute_q(4).unwrap(), vec![0]);
        assert_eq!(compute_q(9).unwrap(), vec![0]);
        assert_eq!(compute_q(2).unwrap(), Vec::<u64>::new());
        assert_eq!(compute_q(1).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn q_36_parity_structure() {
        let q = compute_q(36).unwrap();
        assert_eq!(q.len(), 12);
        let odd: Vec<u64> = q.iter().copied().filter(|a| a % 2 == 1).collect();
        assert_eq!(odd, vec![9, 27]);
    }

    #[test]
    fn q_witnesses_up_to_1000() {
        // compute_q itself performs the witness scan; it returning Ok is the
        // assertion. Full sweep of every modulus.
        for m in 1..=1000u64 {
            compute_q(m).unwrap();
        }
    }

    #[test]
    fn u_and_v_basics() {
        let empty = IntegerSet::empty(1000);
        let p = sets::profile(&empty, 36, 1000).unwrap();
        assert!(compute_u(&p, 0.01).unwrap().is_empty());
        assert!(compute_v(&p).is_empty());

        let paired = construct::build_paired(1, 36_000).unwrap();
        let p = sets::profile(&paired, 36, 36_000).unwrap();
        assert_eq!(p.delta(8), 1.0);
        assert_eq!(p.delta(10), 1.0);
        assert_eq!(compute_u(&p, 0.01).unwrap(), vec![8, 10]);
        assert_eq!(compute_v(&p), vec![8, 10]);
    }

    #[test]
    fn u_requires_modulus_36() {
        let s = IntegerSet::empty(100);
        let p = sets::profile(&s, 4, 100).unwrap();
        assert!(compute_u(&p, 0.01).is_err());
    }

    #[test]
    fn u_and_v_of_construction() {
        // Computed directly from the definition: the class 0 mod 36 is
        // entirely inside the set (every multiple of 36 is a member), so it
        // is the unique class above the U threshold; V consists of the 12
        // classes that coincide with Q.
        let a = construct::build_a(3, 900_000).unwrap();
        let p = sets::profile(&a, 36, 900_000).unwrap();
        assert_eq!(compute_u(&p, 0.01).unwrap(), vec![0]);
        assert_eq!(compute_v(&p), compute_q(36).unwrap());
        assert_eq!(p.delta(0), 1.0);
        assert!((p.delta(4) - 0.04).abs() < 1e-12);
    }

    #[test]
    fn u_plus_v_cases() {
        let table = build_squarefree_table(40_000).unwrap();

        let paired = construct::build_paired(1, 36_000).unwrap();
        let claim = check_u_plus_v_in_q(&paired, 0.01, &table);
        assert_eq!(claim.status, ClaimStatus::Pass);

        let mult4 = IntegerSet::from_predicate(36_000, |n| n > 0 && n % 4 == 0);
        let claim = check_u_plus_v_in_q(&mult4, 0.01, &table);
        assert_eq!(claim.status, ClaimStatus::Pass);

        let all = IntegerSet::from_predicate(1000, |n| n >= 1);
        let claim = check_u_plus_v_in_q(&all, 0.01, &table);
        assert_eq!(claim.status, ClaimStatus::Inconclusive);
        assert_eq!(claim.witness, Some(vec![2]));
    }

    #[test]
    fn classify_examples() {
        let s = IntegerSet::from_members(&[4, 8, 400], 400).unwrap();
        assert_eq!(classify_structure(&s).unwrap(), StructureClass::Subset4N);

        let s = IntegerSet::from_members(&[9, 18, 27], 27).unwrap();
        assert_eq!(classify_structure(&s).unwrap(), StructureClass::Subset9N);

        let s = IntegerSet::from_members(&[2, 6, 10], 10).unwrap();
        assert_eq!(classify_structure(&s).unwrap(), StructureClass::Subset4N2);

        for a in 1..=8u8 {
            let paired = construct::build_paired(a, 10_000).unwrap();
            assert_eq!(
                classify_structure(&paired).unwrap(),
                StructureClass::PairedMod36(a)
            );
        }

        let s = IntegerSet::from_members(&[1, 2], 2).unwrap();
        assert_eq!(classify_structure(&s).unwrap(), StructureClass::Other);
        assert!(classify_structure(&IntegerSet::empty(5)).is_err());
    }

    #[test]
    fn classify_subsets_of_paired() {
        // Subsets of a paired set may degrade only to the congruence-
        // compatible tags, never to a conflicting one.
        let paired = construct::build_paired(3, 5000).unwrap();
        let members: Vec<u64> = paired.iter().collect();
        let mut seed = 41u64;
        for _ in 0..40 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let sub: Vec<u64> = members
                .iter()
                .copied()
                .enumerate()
                .filter(|(i, _)| (seed >> (i % 60)) & 1 == 1)
                .map(|(_, v)| v)
                .collect();
            if sub.is_empty() {
                continue;
            }
            let s = IntegerSet::from_members(&sub, 5000).unwrap();
            let tag = classify_structure(&s).unwrap();
            assert!(
                matches!(
                    tag,
                    StructureClass::PairedMod36(3)
                        | StructureClass::Subset4N
                        | StructureClass::Subset4N2
                ),
                "unexpected tag {tag:?}"
            );
        }
    }
}
