//! Content hashing shared by every persisted artifact.
//!
//! Artifacts reference each other by hash (the index manifest records the
//! corpus hash it was built from, and so on), so a stale or mismatched
//! artifact combination is detected before any scoring happens.

use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    format!("sha256:{}", hex_string(&digest))
}

/// Hash several byte chunks as one stream.
pub fn sha256_hex_chunks<'a>(chunks: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut hasher = Sha256::new();
    for chunk in chunks {
        hasher.update(chunk);
    }
    format!("sha256:{}", hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Compare a dependent artifact's recorded hash against the hash of the
/// artifact actually loaded.
pub fn check_hash(expected: &str, actual: &str, what: &str) -> crate::Result<()> {
    if expected != actual {
        return Err(crate::Error::Integrity(format!(
            "{what} hash mismatch: expected {expected}, found {actual}"
        )));
    }
    Ok(())
}
