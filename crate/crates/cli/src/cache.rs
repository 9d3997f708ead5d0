//! Sieve cache file format.
//!
//! Layout (bit-exact): magic bytes `SQF1`, unsigned 64-bit little-endian
//! bound `N`, then `⌈(N+1)/8⌉` membership bytes with bit `i` of byte `j`
//! encoding the integer `8j + i`, least-significant-bit first.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sqfs_core::SquarefreeTable;

const MAGIC: &[u8; 4] = b"SQF1";

pub fn write_cache(path: &Path, table: &SquarefreeTable) -> Result<()> {
    let bits = table.to_bit_bytes();
    let mut out = Vec::with_capacity(12 + bits.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&table.bound().to_le_bytes());
    out.extend_from_slice(&bits);
    fs::write(path, out).with_context(|| format!("writing sieve cache {}", path.display()))?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<SquarefreeTable> {
    let data = fs::read(path).with_context(|| format!("reading sieve cache {}", path.display()))?;
    if data.len() < 12 || &data[..4] != MAGIC {
        bail!("{} is not a sieve cache (bad magic)", path.display());
    }
    let bound = u64::from_le_bytes(data[4..12].try_into().expect("8 bytes"));
    let table = SquarefreeTable::from_bit_bytes(bound, &data[12..])
        .with_context(|| format!("decoding sieve cache {}", path.display()))?;
    Ok(table)
}
