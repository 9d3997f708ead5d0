//! Bit-packed squarefree sieve.
//!
//! One bit per integer in `[0, N]`: bit `n` is set iff no prime square
//! divides `n`. By convention 0 is non-squarefree and 1 is squarefree.
//! Construction marks multiples of `p^2` for primes `p <= sqrt(N)` and runs
//! segment-parallel; the result is independent of segment size and thread
//! count.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest supported table bound (bits of memory budget, ~2 GiB of bits).
pub const MAX_BOUND: u64 = 1 << 34;

/// Default segment size in bits for the segmented sieve.
pub const DEFAULT_SEGMENT_BITS: u64 = 1 << 20;

/// Squarefree indicator table on `[0, bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeTable {
    bound: u64,
    words: Vec<u64>,
    count: u64,
}

/// Simple prime sieve, used for `p^2` marking and for the analytic module's
/// Euler products.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    is_prime[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if is_prime[p] {
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    is_prime
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

/// The `k`-th prime with `p_1 = 2`.
pub fn nth_prime(k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::Parameter("prime index starts at 1".into()));
    }
    // p_k < k (ln k + ln ln k) for k >= 6; pad generously for small k.
    let k64 = k as u64;
    let mut limit = 64u64.max((k64 as f64 * ((k64 as f64).ln() + (k64 as f64).ln().ln().max(1.0)) * 1.3) as u64);
    loop {
        let primes = primes_up_to(limit);
        if primes.len() >= k as usize {
            return Ok(primes[k as usize - 1]);
        }
        limit *= 2;
    }
}

pub fn build_squarefree_table(n: u64) -> Result<SquarefreeTable> {
    build_squarefree_table_segmented(n, DEFAULT_SEGMENT_BITS)
}

/// Segmented construction with an explicit segment size, exposed so tests can
/// assert that segmentation does not change the result.
pub fn build_squarefree_table_segmented(n: u64, segment_bits: u64) -> Result<SquarefreeTable> {
    if n == 0 {
        return Err(Error::Sizing("table bound must be positive".into()));
    }
    if n > MAX_BOUND {
        return Err(Error::Sizing(format!(
            "table bound {n} exceeds supported maximum {MAX_BOUND}"
        )));
    }
    if segment_bits < 64 {
        return Err(Error::Sizing("segment size must be at least 64 bits".into()));
    }
    let root = (n as f64).sqrt() as u64 + 1;
    let primes = primes_up_to(root);
    let n_words = (n / 64 + 1) as usize;
    let mut words = vec![!0u64; n_words];

    let seg_words = (segment_bits / 64) as usize;
    words
        .par_chunks_mut(seg_words)
        .enumerate()
        .for_each(|(chunk_idx, chunk)| {
            let lo = (chunk_idx * seg_words) as u64 * 64;
            let hi = lo + chunk.len() as u64 * 64; // exclusive
            for &p in &primes {
                let p2 = p * p;
                if p2 >= hi {
                    break;
                }
                let mut m = lo.div_ceil(p2) * p2;
                while m < hi {
                    let bit = m - lo;
                    chunk[(bit / 64) as usize] &= !(1u64 << (bit % 64));
                    m += p2;
                }
            }
        });

    // 0 is non-squarefree; bits beyond the bound are cleared.
    words[0] &= !1u64;
    let tail_bits = (n + 1) % 64;
    if tail_bits != 0 {
        let last = words.len() - 1;
        words[last] &= (1u64 << tail_bits) - 1;
    }

    let count = words.iter().map(|w| w.count_ones() as u64).sum();
    Ok(SquarefreeTable { bound: n, words, count })
}

impl SquarefreeTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Number of squarefree integers in `[0, bound]`.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        if n > self.bound {
            return Err(Error::Range { value: n, bound: self.bound });
        }
        Ok(self.words[(n / 64) as usize] >> (n % 64) & 1 == 1)
    }

    /// Number of squarefree `n <= limit` with `n ≡ a (mod m)`.
    pub fn count_squarefree_in_class(&self, a: u64, m: u64, limit: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::Parameter("modulus must be positive".into()));
        }
        if a >= m {
            return Err(Error::Range { value: a, bound: m - 1 });
        }
        if limit > self.bound {
            return Err(Error::Range { value: limit, bound: self.bound });
        }
        let mut count = 0;
        let mut n = if a == 0 { m } else { a };
        while n <= limit {
            count += (self.words[(n / 64) as usize] >> (n % 64)) & 1;
            n += m;
        }
        Ok(count)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Raw membership bits, least-significant-bit first within each byte:
    /// bit `i` of byte `j` encodes the integer `8j + i`. Exactly
    /// `(bound + 1).div_ceil(8)` bytes.
    pub fn to_bit_bytes(&self) -> Vec<u8> {
        let n_bytes = ((self.bound + 1).div_ceil(8)) as usize;
        let mut out = Vec::with_capacity(n_bytes);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(n_bytes);
        out
    }

    /// Rebuild a table from bytes produced by [`Self::to_bit_bytes`].
    pub fn from_bit_bytes(bound: u64, bytes: &[u8]) -> Result<Self> {
        if bound == 0 || bound > MAX_BOUND {
            return Err(Error::Sizing(format!("unsupported bound {bound}")));
        }
        let expect = ((bound + 1).div_ceil(8)) as usize;
        if bytes.len() != expect {
            return Err(Error::Parameter(format!(
                "expected {expect} bytes for bound {bound}, got {}",
                bytes.len()
            )));
        }
        let n_words = (bound / 64 + 1) as usize;
        let mut words = vec![0u64; n_words];
        for (i, b) in bytes.iter().enumerate() {
            words[i / 8] |= (*b as u64) << (8 * (i % 8));
        }
        let tail_bits = (bound + 1) % 64;
        if tail_bits != 0 {
            let last = words.len() - 1;
            words[last] &= (1u64 << tail_bits) - 1;
        }
        let count = words.iter().map(|w| w.count_ones() as u64).sum();
        Ok(SquarefreeTable { bound, words, count })
    }
}

/// Trial-division squarefree test; the independent oracle the sieve is
/// checked against.
pub fn is_squarefree_trial_division(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}
