//! Search over periodic residue sets `S mod M` with `S + S` confined to
//! classes containing no squarefree integer.
//!
//! Such a set is a certificate: the integer set it induces has a sumset free
//! of squarefree numbers, for every expansion bound. Residues are vertices of
//! a compatibility graph (`r ~ s` iff `(r+s) mod M` is such a class, with
//! `r ~ r` required as self-compatibility); inclusion-maximal valid sets are
//! exactly the maximal cliques among self-compatible vertices, enumerated by
//! pivoting branch-and-bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::residues::compute_q;
use crate::sets::IntegerSet;

/// Default largest modulus for exact enumeration.
pub const DEFAULT_EXACT_LIMIT: u64 = 72;

/// A union of residue classes mod `modulus`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicSet {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

/// Search strategy for [`max_density`].
#[derive(Debug, Clone)]
pub enum SearchMode {
    /// Complete enumeration; exact optimum.
    Exact,
    /// Deterministic greedy insertion by degree plus 1-swap local search.
    Greedy,
    /// Verify a starting certificate, then extend it greedily.
    Seeded(PeriodicSet),
}

impl PeriodicSet {
    pub fn new(modulus: u64, mut residues: Vec<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Parameter("modulus must be positive".into()));
        }
        residues.sort_unstable();
        residues.dedup();
        if let Some(&r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(Error::Range { value: r, bound: modulus - 1 });
        }
        Ok(PeriodicSet { modulus, residues })
    }

    pub fn density(&self) -> f64 {
        self.residues.len() as f64 / self.modulus as f64
    }

    /// Expands to the induced integer set on `[1, n]`.
    pub fn expand(&self, n: u64) -> IntegerSet {
        let in_class = |v: u64| self.residues.binary_search(&(v % self.modulus)).is_ok();
        IntegerSet::from_predicate(n, |v| v >= 1 && in_class(v))
    }

    /// Periodic residues of an integer set, assuming it is (a truncation of)
    /// a union of classes mod `modulus`.
    pub fn from_integer_set(set: &IntegerSet, modulus: u64) -> Result<Self> {
        let mut residues: Vec<u64> = set.iter().map(|v| v % modulus).collect();
        residues.sort_unstable();
        residues.dedup();
        PeriodicSet::new(modulus, residues)
    }
}

fn q_mask(m: u64) -> Result<Vec<bool>> {
    let q = compute_q(m)?;
    let mut mask = vec![false; m as usize];
    for r in q {
        mask[r as usize] = true;
    }
    Ok(mask)
}

/// Checks the validity predicate `∀ r, s ∈ S: (r+s) mod M ∈ Q(M)` in
/// `O(|S|²)`; `Err` carries the first violating pair, scanning
/// self-compatibility before cross pairs.
pub fn verify_periodic(s: &PeriodicSet) -> Result<std::result::Result<(), (u64, u64)>> {
    let mask = q_mask(s.modulus)?;
    for &r in &s.residues {
        if !mask[((2 * r) % s.modulus) as usize] {
            return Ok(Err((r, r)));
        }
    }
    for (i, &r) in s.residues.iter().enumerate() {
        for &t in &s.residues[i + 1..] {
            if !mask[((r + t) % s.modulus) as usize] {
                return Ok(Err((r, t)));
            }
        }
    }
    Ok(Ok(()))
}

/// Bitset over at most 128 residues; enough for the exact-enumeration range.
type Mask = u128;

struct CliqueContext<'a> {
    adj: &'a [Mask],
    out: Vec<Mask>,
}

fn bron_kerbosch_pivot(ctx: &mut CliqueContext, r: Mask, p: Mask, x: Mask) {
    if p == 0 && x == 0 {
        ctx.out.push(r);
        return;
    }
    // Pivot on the candidate/excluded vertex with most candidate neighbours.
    let pivot = {
        let mut best = usize::MAX;
        let mut best_deg = 0u32;
        let mut scan = p | x;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            let deg = (ctx.adj[v] & p).count_ones();
            if best == usize::MAX || deg > best_deg {
                best = v;
                best_deg = deg;
            }
        }
        best
    };
    let mut todo = p & !ctx.adj[pivot];
    let mut p = p;
    let mut x = x;
    while todo != 0 {
        let v = todo.trailing_zeros() as usize;
        let vbit = 1u128 << v;
        todo &= todo - 1;
        bron_kerbosch_pivot(ctx, r | vbit, p & ctx.adj[v], x & ctx.adj[v]);
        p &= !vbit;
        x |= vbit;
    }
}

/// Complete, duplicate-free list of inclusion-maximal valid residue sets mod
/// `m`, ordered by density descending then lexicographically.
pub fn enumerate_maximal(m: u64, exact_limit: u64) -> Result<Vec<PeriodicSet>> {
    if m == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    if m > exact_limit || m > 128 {
        return Err(Error::Sizing(format!(
            "modulus {m} beyond the exact-enumeration limit {}; use the greedy or seeded \
             search instead",
            exact_limit.min(128)
        )));
    }
    let mask = q_mask(m)?;
    // Self-compatible residues only: r + r must already land in Q.
    let verts: Vec<u64> = (0..m).filter(|&r| mask[((2 * r) % m) as usize]).collect();
    let mut adj = vec![0 as Mask; verts.len()];
    for (i, &r) in verts.iter().enumerate() {
        for (j, &s) in verts.iter().enumerate() {
            if i != j && mask[((r + s) % m) as usize] {
                adj[i] |= 1 << j;
            }
        }
    }
    let mut ctx = CliqueContext { adj: &adj, out: Vec::new() };
    let all: Mask = if verts.len() == 128 { !0 } else { (1u128 << verts.len()) - 1 };
    if all != 0 {
        bron_kerbosch_pivot(&mut ctx, 0, all, 0);
    }
    let mut sets: Vec<PeriodicSet> = ctx
        .out
        .iter()
        .map(|&clique| {
            let mut residues = Vec::with_capacity(clique.count_ones() as usize);
            let mut scan = clique;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                residues.push(verts[v]);
            }
            residues.sort_unstable();
            PeriodicSet { modulus: m, residues }
        })
        .collect();
    sets.sort_by(|a, b| {
        b.residues
            .len()
            .cmp(&a.residues.len())
            .then_with(|| a.residues.cmp(&b.residues))
    });
    Ok(sets)
}

fn compatible_with_all(r: u64, chosen: &[u64], m: u64, mask: &[bool]) -> bool {
    mask[((2 * r) % m) as usize] && chosen.iter().all(|&s| mask[((r + s) % m) as usize])
}

fn greedy_extend(chosen: &mut Vec<u64>, m: u64, mask: &[bool], order: &[u64]) {
    loop {
        let mut added = false;
        for &r in order {
            if !chosen.contains(&r) && compatible_with_all(r, chosen, m, mask) {
                chosen.push(r);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    chosen.sort_unstable();
}

/// Candidate insertion order: degree in the compatibility graph descending,
/// then residue ascending. Computed only for moduli where the quadratic
/// degree scan is cheap; larger moduli fall back to ascending residues.
fn insertion_order(m: u64, mask: &[bool]) -> Vec<u64> {
    let verts: Vec<u64> = (0..m).filter(|&r| mask[((2 * r) % m) as usize]).collect();
    if m > 4096 {
        return verts;
    }
    let mut with_deg: Vec<(u64, u64)> = verts
        .iter()
        .map(|&r| {
            let deg = verts
                .iter()
                .filter(|&&s| s != r && mask[((r + s) % m) as usize])
                .count() as u64;
            (r, deg)
        })
        .collect();
    with_deg.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    with_deg.into_iter().map(|(r, _)| r).collect()
}

fn one_swap_improve(chosen: &mut Vec<u64>, m: u64, mask: &[bool], order: &[u64]) {
    if m > 4096 {
        return;
    }
    loop {
        let mut improved = false;
        'scan: for drop_idx in 0..chosen.len() {
            let mut trial: Vec<u64> = chosen.clone();
            trial.remove(drop_idx);
            let mut gains = Vec::new();
            for &r in order {
                if !trial.contains(&r) && compatible_with_all(r, &trial, m, mask) {
                    trial.push(r);
                    gains.push(r);
                }
            }
            if trial.len() > chosen.len() {
                trial.sort_unstable();
                *chosen = trial;
                improved = true;
                break 'scan;
            }
        }
        if !improved {
            break;
        }
    }
}

/// Densest valid residue set mod `m` found by the chosen strategy, with its
/// certificate. The certificate always passes [`verify_periodic`].
pub fn max_density(m: u64, mode: SearchMode) -> Result<(f64, PeriodicSet)> {
    let result = match mode {
        SearchMode::Exact => {
            let sets = enumerate_maximal(m, DEFAULT_EXACT_LIMIT)?;
            sets.into_iter()
                .next()
                .unwrap_or(PeriodicSet { modulus: m, residues: Vec::new() })
        }
        SearchMode::Greedy => {
            // Degree-greedy alone stalls on the small dense families (mod 36
            // it walks into {0, 9, 18, 27} and cannot leave by single swaps),
            // so run one greedy pass per admissible starting vertex and keep
            // the best outcome. Deterministic: ties break toward the
            // lexicographically least residue list.
            let mask = q_mask(m)?;
            let order = insertion_order(m, &mask);
            let starts: &[u64] = if m > 4096 { &order[..order.len().min(1)] } else { &order };
            let mut best: Vec<u64> = Vec::new();
            for &start in starts {
                let mut chosen = vec![start];
                greedy_extend(&mut chosen, m, &mask, &order);
                one_swap_improve(&mut chosen, m, &mask, &order);
                if chosen.len() > best.len() || (chosen.len() == best.len() && chosen < best) {
                    best = chosen;
                }
            }
            PeriodicSet { modulus: m, residues: best }
        }
        SearchMode::Seeded(seed) => {
            if seed.modulus != m {
                return Err(Error::Parameter(format!(
                    "seed modulus {} does not match {m}",
                    seed.modulus
                )));
            }
            if let Err((r, s)) = verify_periodic(&seed)? {
                return Err(Error::Parameter(format!(
                    "seed certificate is invalid: residues {r} + {s} land outside the \
                     squarefree-free classes"
                )));
            }
            let mask = q_mask(m)?;
            let order: Vec<u64> = (0..m).collect();
            let mut chosen = seed.residues.clone();
            greedy_extend(&mut chosen, m, &mask, &order);
            one_swap_improve(&mut chosen, m, &mask, &insertion_order(m, &mask));
            PeriodicSet { modulus: m, residues: chosen }
        }
    };
    debug_assert!(matches!(verify_periodic(&result), Ok(Ok(()))));
    Ok((result.density(), result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct;
    use crate::sets;
    use crate::sieve::build_squarefree_table;

    #[test]
    fn verify_examples() {
        let mult4 = PeriodicSet::new(36, (0..9).map(|i| 4 * i).collect()).unwrap();
        assert_eq!(verify_periodic(&mult4).unwrap(), Ok(()));

        let paired = PeriodicSet::new(36, vec![8, 10]).unwrap();
        assert_eq!(verify_periodic(&paired).unwrap(), Ok(()));

        let bad = PeriodicSet::new(36, vec![0, 1]).unwrap();
        assert_eq!(verify_periodic(&bad).unwrap(), Err((1, 1)));
    }

    /// Plain recursive enumeration without pivoting; the independent oracle
    /// for the branch-and-bound implementation.
    fn enumerate_plain(m: u64) -> Vec<Vec<u64>> {
        let q = compute_q(m).unwrap();
        let mask: Vec<bool> = (0..m).map(|r| q.contains(&r)).collect();
        let verts: Vec<u64> = (0..m).filter(|&r| mask[((2 * r) % m) as usize]).collect();
        let compat =
            |r: u64, s: u64| -> bool { mask[((r + s) % m) as usize] };
        let mut out: Vec<Vec<u64>> = Vec::new();
        let n = verts.len();
        fn rec(
            verts: &[u64],
            compat: &dyn Fn(u64, u64) -> bool,
            current: &mut Vec<u64>,
            start: usize,
            out: &mut Vec<Vec<u64>>,
        ) {
            // Maximality: no vertex outside `current` is compatible with all.
            let extendable = verts.iter().any(|&v| {
                !current.contains(&v) && current.iter().all(|&c| compat(v, c)) && compat(v, v)
            });
            if !extendable && !current.is_empty() {
                let mut c = current.clone();
                c.sort_unstable();
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            for i in start..verts.len() {
                let v = verts[i];
                if current.iter().all(|&c| compat(v, c)) {
                    current.push(v);
                    rec(verts, compat, current, i + 1, out);
                    current.pop();
                }
            }
        }
        let mut current = Vec::new();
        if n > 0 {
            rec(&verts, &compat, &mut current, 0, &mut out);
        }
        out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        out
    }

    #[test]
    fn exact_enumeration_tiny_moduli() {
        let sets = enumerate_maximal(4, 72).unwrap();
        let residues: Vec<Vec<u64>> = sets.iter().map(|s| s.residues.clone()).collect();
        assert_eq!(residues, vec![vec![0], vec![2]]);

        let sets = enumerate_maximal(9, 72).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].residues, vec![0]);
    }

    #[test]
    fn exact_enumeration_mod_36() {
        let sets = enumerate_maximal(36, 72).unwrap();
        assert_eq!(sets.len(), 11);
        let residues: Vec<Vec<u64>> = sets.iter().map(|s| s.residues.clone()).collect();
        assert_eq!(residues[0], vec![0, 4, 8, 12, 16, 20, 24, 28, 32]);
        assert_eq!(residues[1], vec![2, 6, 10, 14, 18, 22, 26, 30, 34]);
        assert_eq!(residues[2], vec![0, 9, 18, 27]);
        // The eight two-class pairs, and nothing else.
        let pairs: Vec<Vec<u64>> = residues[3..].to_vec();
        let expected: Vec<Vec<u64>> = (1..=8u8)
            .map(|a| {
                let (r1, r2) = construct::paired_residues(a).unwrap();
                vec![r1, r2]
            })
            .collect();
        for p in &expected {
            assert!(pairs.contains(p), "missing pair {p:?}");
        }
        assert_eq!(pairs.len(), 8);
        // Density profile of the maximal families.
        let densities: Vec<f64> = sets.iter().map(|s| s.density()).collect();
        assert_eq!(densities[0], 0.25);
        for d in &densities {
            assert!(
                [0.25, 1.0 / 9.0, 1.0 / 18.0].iter().any(|t| (d - t).abs() < 1e-12),
                "unexpected maximal density {d}"
            );
        }
    }

    #[test]
    fn enumeration_matches_plain_oracle() {
        for m in [4u64, 9, 12, 18, 24, 36, 40, 45, 48, 72] {
            let fast: Vec<Vec<u64>> = enumerate_maximal(m, 72)
                .unwrap()
                .iter()
                .map(|s| s.residues.clone())
                .collect();
            let plain = enumerate_plain(m);
            assert_eq!(fast, plain, "mismatch at m={m}");
        }
    }

    #[test]
    fn exact_limit_enforced() {
        assert!(matches!(enumerate_maximal(73, 72), Err(Error::Sizing(_))));
        assert!(matches!(enumerate_maximal(200, 500), Err(Error::Sizing(_))));
    }

    #[test]
    fn max_density_exact_mod_36() {
        let (d, cert) = max_density(36, SearchMode::Exact).unwrap();
        assert_eq!(d, 0.25);
        assert_eq!(cert.residues, vec![0, 4, 8, 12, 16, 20, 24, 28, 32]);
    }

    #[test]
    fn greedy_is_valid_and_decent() {
        for m in [36u64, 100, 900] {
            let (d, cert) = max_density(m, SearchMode::Greedy).unwrap();
            assert_eq!(verify_periodic(&cert).unwrap(), Ok(()));
            assert!(d > 0.0);
            if m == 36 {
                assert_eq!(d, 0.25);
            }
        }
    }

    #[test]
    fn seeded_with_construction_residues() {
        let a = construct::build_a(3, 900).unwrap();
        let seed = PeriodicSet::from_integer_set(&a, 900).unwrap();
        assert_eq!(seed.residues.len(), 36);
        let (d, cert) = max_density(900, SearchMode::Seeded(seed)).unwrap();
        assert!(d >= 0.04);
        assert_eq!(verify_periodic(&cert).unwrap(), Ok(()));
    }

    #[test]
    fn seeded_rejects_invalid() {
        let bad = PeriodicSet::new(36, vec![0, 1]).unwrap();
        assert!(max_density(36, SearchMode::Seeded(bad)).is_err());
        let wrong_mod = PeriodicSet::new(36, vec![8, 10]).unwrap();
        assert!(max_density(72, SearchMode::Seeded(wrong_mod)).is_err());
    }

    #[test]
    fn certificates_are_sound() {
        let table = build_squarefree_table(100_000).unwrap();
        for cert in enumerate_maximal(36, 72).unwrap() {
            let set = cert.expand(100_000);
            let ss = sets::sumset(&set, &set, 100_000);
            let (hits, least) = ss.intersect_words(crate::residues::table_words(&table));
            assert_eq!(hits, 0, "certificate {:?} leaks at {:?}", cert.residues, least);
        }
    }

    #[test]
    fn lift_preserves_validity_and_density() {
        for (m, m2) in [(36u64, 72u64), (36, 900)] {
            for cert in enumerate_maximal(m, 72).unwrap() {
                let lifted: Vec<u64> = cert
                    .residues
                    .iter()
                    .flat_map(|&r| (0..m2 / m).map(move |t| r + t * m))
                    .collect();
                let lifted = PeriodicSet::new(m2, lifted).unwrap();
                assert_eq!(verify_periodic(&lifted).unwrap(), Ok(()), "lift of {:?}", cert.residues);
                assert!((lifted.density() - cert.density()).abs() < 1e-12);
            }
        }
    }
}
