//! The two explicit sumset-avoiding constructions: the prime-square union
//! `A(k)` whose density approaches `1/4 - 2/π²`, and the paired two-class
//! sets of density `1/18`.

use crate::error::{Error, Result};
use crate::sets::{IntegerSet, Progression};
use crate::sieve::nth_prime;

/// Parameters of the principal construction: `q = Π_{i=2}^k p_i²` (odd
/// perfect square; 9 for k=2, 225 for k=3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionParams {
    pub k: u32,
    pub q: u64,
    pub n: u64,
}

/// `q = Π_{i=2}^k p_i²` with `p_1 = 2`, so the product starts at `p_2 = 3`.
pub fn q_of(k: u32) -> Result<u64> {
    if k < 2 {
        return Err(Error::Parameter("construction needs k >= 2".into()));
    }
    let mut q: u64 = 1;
    for i in 2..=k {
        let p = nth_prime(i)?;
        q = q
            .checked_mul(p)
            .and_then(|v| v.checked_mul(p))
            .ok_or_else(|| Error::Sizing(format!("q overflows 64 bits at k={k}")))?;
    }
    Ok(q)
}

impl ConstructionParams {
    /// `k >= 3`: with `k = 2` the union lacks the multiples of 100 that the
    /// covering argument leans on, so that case sits behind
    /// [`ConstructionParams::with_k2_override`].
    pub fn new(k: u32, n: u64) -> Result<Self> {
        if k < 3 {
            return Err(Error::Parameter(
                "k = 2 drops the multiples of 100 from the union and breaks the covering \
                 claims; use with_k2_override to build it anyway"
                    .into(),
            ));
        }
        Ok(ConstructionParams { k, q: q_of(k)?, n })
    }

    pub fn with_k2_override(k: u32, n: u64) -> Result<Self> {
        Ok(ConstructionParams { k, q: q_of(k)?, n })
    }
}

/// The membership condition `(4|n and gcd(n, q) not squarefree) or q|n`
/// unfolds into a union of arithmetic progressions: `gcd(n, q)` is
/// non-squarefree exactly when some `p_i²` divides `n`, so the first branch
/// is `∪_i multiples of 4·p_i²` and the second is the multiples of `q`.
pub fn progressions_a(params: &ConstructionParams) -> Result<Vec<Progression>> {
    let mut progs = Vec::new();
    for i in 2..=params.k {
        let p = nth_prime(i)?;
        let m = 4u64
            .checked_mul(p * p)
            .ok_or_else(|| Error::Sizing("progression modulus overflow".into()))?;
        progs.push(Progression { start: m, gap: m });
    }
    progs.push(Progression { start: params.q, gap: params.q });
    Ok(progs)
}

/// Builds `A(k)` on `[1, n]`. Periodic mod `4q` whenever `n` reaches a full
/// period; for `n < 4q` (large `k`) it is simply the truncation, and the
/// second branch may be empty.
pub fn build_a(k: u32, n: u64) -> Result<IntegerSet> {
    build_a_from(&ConstructionParams::new(k, n)?)
}

pub fn build_a_from(params: &ConstructionParams) -> Result<IntegerSet> {
    if params.n == 0 {
        return Err(Error::Parameter("bound must be positive".into()));
    }
    Ok(IntegerSet::from_progressions(&progressions_a(params)?, params.n))
}

/// The two residue classes mod 36 of the paired set with parameter `a`:
/// the solution of `n ≡ 2 (mod 4), n ≡ a (mod 9)` and of
/// `n ≡ 0 (mod 4), n ≡ -a (mod 9)`.
pub fn paired_residues(a: u8) -> Result<(u64, u64)> {
    if !(1..=8).contains(&a) {
        return Err(Error::Parameter(format!("pair parameter {a} outside 1..=8")));
    }
    let solve = |m4: u64, m9: u64| -> u64 {
        (0..36).find(|r| r % 4 == m4 && r % 9 == m9).expect("CRT solution mod 36")
    };
    let r1 = solve(2, a as u64 % 9);
    let r2 = solve(0, (9 - a as u64) % 9);
    Ok((r1.min(r2), r1.max(r2)))
}

pub fn progressions_paired(a: u8) -> Result<Vec<Progression>> {
    let (r1, r2) = paired_residues(a)?;
    // Classes starting at the least positive member.
    let start = |r: u64| if r == 0 { 36 } else { r };
    Ok(vec![
        Progression { start: start(r1), gap: 36 },
        Progression { start: start(r2), gap: 36 },
    ])
}

/// Builds the paired set for parameter `a` on `[1, n]`: all even `n` whose
/// residue mod 4 determines the residue mod 9 as in [`paired_residues`].
/// Exactly two classes mod 36, density exactly `1/18` on full periods.
pub fn build_paired(a: u8, n: u64) -> Result<IntegerSet> {
    if n == 0 {
        return Err(Error::Parameter("bound must be positive".into()));
    }
    Ok(IntegerSet::from_progressions(&progressions_paired(a)?, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets;

    #[test]
    fn q_values() {
        assert_eq!(q_of(2).unwrap(), 9);
        assert_eq!(q_of(3).unwrap(), 225);
        assert_eq!(q_of(4).unwrap(), 11025);
        assert!(q_of(1).is_err());
        assert!(q_of(40).is_err()); // overflow
    }

    #[test]
    fn members_match_definition() {
        let a = build_a(3, 250).unwrap();
        assert_eq!(
            a.iter().collect::<Vec<_>>(),
            vec![36, 72, 100, 108, 144, 180, 200, 216, 225]
        );
        assert!(!a.contains(4));
        let a = build_a(3, 225).unwrap();
        assert!(a.contains(225));
    }

    #[test]
    fn progression_form_equals_definition() {
        // The union-of-progressions build must agree with a literal
        // evaluation of the membership condition.
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        for k in [3u32, 4] {
            let q = q_of(k).unwrap();
            let n = 30_000;
            let a = build_a(k, n).unwrap();
            let direct = IntegerSet::from_predicate(n, |m| {
                if m == 0 {
                    return false;
                }
                let g = gcd(m, q);
                (m % 4 == 0 && !crate::sieve::is_squarefree_trial_division(g)) || m % q == 0
            });
            assert_eq!(a, direct, "k={k}");
        }
    }

    #[test]
    fn periodicity() {
        let q = q_of(3).unwrap();
        let period = 4 * q;
        let a = build_a(3, period * 5).unwrap();
        let per_period = a.count_range(1, period);
        assert_eq!(per_period, 36);
        for m in 1..=5 {
            assert_eq!(a.count_range(1, period * m), per_period * m);
        }
    }

    #[test]
    fn density_matches_analytic() {
        for k in [3u32, 4] {
            let q = q_of(k).unwrap();
            let a = build_a(k, 4 * q * 3).unwrap();
            let expected = crate::analytic::a_density(k).unwrap().total;
            for m in 1..=3u64 {
                let d = sets::density(&a, 4 * q * m).unwrap();
                assert_eq!(d, expected, "k={k}, m={m}");
            }
        }
    }

    #[test]
    fn k2_gate() {
        assert!(build_a(2, 1000).is_err());
        let params = ConstructionParams::with_k2_override(2, 1000).unwrap();
        let a = build_a_from(&params).unwrap();
        // 100 is not a member when k=2 (gcd(100, 9) = 1 is squarefree).
        assert!(!a.contains(100));
        assert!(a.contains(36));
        assert!(a.contains(9 * 3)); // 27 ∈ multiples of q = 9
    }

    #[test]
    fn paired_residue_classes() {
        assert_eq!(paired_residues(1).unwrap(), (8, 10));
        assert_eq!(paired_residues(2).unwrap(), (2, 16));
        assert_eq!(paired_residues(8).unwrap(), (26, 28));
        assert!(paired_residues(0).is_err());
        assert!(paired_residues(9).is_err());

        let a = build_paired(1, 100).unwrap();
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![8, 10, 44, 46, 80, 82]);
    }

    #[test]
    fn paired_counts_exact() {
        for a in 1..=8u8 {
            let s = build_paired(a, 36 * 50).unwrap();
            assert_eq!(s.cardinality(), 2 * 50);
            assert_eq!(sets::density(&s, 36 * 50).unwrap(), 1.0 / 18.0);
        }
    }

    #[test]
    fn paired_sum_classes_avoid_squarefree_classes() {
        let q = crate::residues::compute_q(36).unwrap();
        for a in 1..=8u8 {
            let (r1, r2) = paired_residues(a).unwrap();
            for s in [2 * r1, r1 + r2, 2 * r2] {
                assert!(q.contains(&(s % 36)), "a={a}: {s} escapes");
            }
        }
    }

    #[test]
    fn paired_members_satisfy_both_equivalences() {
        for a in 1..=8u8 {
            let s = build_paired(a, 3600).unwrap();
            for n in s.iter() {
                assert_eq!(n % 2, 0);
                assert_eq!(n % 4 == 2, n % 9 == a as u64);
                assert_eq!(n % 4 == 0, n % 9 == (9 - a as u64) % 9);
            }
        }
    }
}
