//! Versioned binary checkpoint format for weight sets.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic "WBPCKPT\0"
//! 8       4     format version (currently 1)
//! 12      32    SHA-256 of the code's canonical alist form
//! 44      4     iterations L
//! 48      1     multiloss flag (0/1)
//! 49      4     n
//! 53      4     number of edges E
//! 57      8     number of (e, e') pairs
//! 65      8     total weight count
//! 73      8·cnt weights as f64, canonical flat order
//! ```
//!
//! Loading validates the magic, version, code hash and every dimension
//! before accepting the values, so a checkpoint can never be applied to a
//! different matrix or trellis depth.

use super::weights::{WeightLayout, WeightSet};
use crate::error::{Error, Result};
use std::io::{Read, Write};

const MAGIC: &[u8; 8] = b"WBPCKPT\0";
const VERSION: u32 = 1;

/// Serialize `weights` together with the owning code's hash.
pub fn checkpoint_save(weights: &WeightSet, code_hash: &[u8; 32], w: &mut impl Write) -> Result<()> {
    let layout = weights.layout();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(code_hash)?;
    w.write_all(&(layout.iterations() as u32).to_le_bytes())?;
    w.write_all(&[u8::from(layout.multiloss())])?;
    w.write_all(&(layout.n() as u32).to_le_bytes())?;
    w.write_all(&(layout.num_edges() as u32).to_le_bytes())?;
    w.write_all(&(layout.vn_total() as u64).to_le_bytes())?;
    w.write_all(&(weights.len() as u64).to_le_bytes())?;
    for v in weights.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn map_eof(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::CheckpointTruncated
    } else {
        Error::Io(e)
    }
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(map_eof)
}

/// Load a checkpoint without any expectations; returns the weights and the
/// embedded code hash. Used for inspection.
pub fn checkpoint_load_any(r: &mut impl Read) -> Result<(WeightSet, [u8; 32])> {
    let mut magic = [0u8; 8];
    read_exact(r, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::CheckpointCorrupt("bad magic bytes".into()));
    }
    let mut b4 = [0u8; 4];
    read_exact(r, &mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::CheckpointVersion {
            found: version,
            expected: VERSION,
        });
    }
    let mut hash = [0u8; 32];
    read_exact(r, &mut hash)?;
    read_exact(r, &mut b4)?;
    let iterations = u32::from_le_bytes(b4) as usize;
    let mut b1 = [0u8; 1];
    read_exact(r, &mut b1)?;
    let multiloss = match b1[0] {
        0 => false,
        1 => true,
        other => {
            return Err(Error::CheckpointCorrupt(format!(
                "multiloss flag must be 0 or 1, found {other}"
            )))
        }
    };
    read_exact(r, &mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    read_exact(r, &mut b4)?;
    let num_edges = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    read_exact(r, &mut b8)?;
    let vn_total = u64::from_le_bytes(b8) as usize;
    read_exact(r, &mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;

    let layout = WeightLayout::from_parts(iterations, n, num_edges, vn_total, multiloss);
    if count != layout.total() {
        return Err(Error::CheckpointCorrupt(format!(
            "weight count {count} disagrees with the layout total {}",
            layout.total()
        )));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        read_exact(r, &mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    let weights = WeightSet::from_values(layout, values)?;
    Ok((weights, hash))
}

/// Load a checkpoint and require it to match `expected` and `code_hash`.
pub fn checkpoint_load(
    r: &mut impl Read,
    expected: &WeightLayout,
    code_hash: &[u8; 32],
) -> Result<WeightSet> {
    let (weights, hash) = checkpoint_load_any(r)?;
    if &hash != code_hash {
        return Err(Error::CodeHashMismatch);
    }
    if weights.layout() != expected {
        return Err(Error::LayoutMismatch(format!(
            "checkpoint layout (L={}, multiloss={}) differs from the requested one (L={}, multiloss={})",
            weights.layout().iterations(),
            weights.layout().multiloss(),
            expected.iterations(),
            expected.multiloss()
        )));
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_graph::{compile_trellis, construct_bch};
    use crate::neural::{WeightInit, WeightSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_weights() -> (WeightSet, [u8; 32], WeightLayout) {
        let code = construct_bch(4, 1).unwrap();
        let trellis = compile_trellis(&code, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let weights = WeightSet::init(
            &trellis,
            false,
            WeightInit::Normal { mean: 1.0, std: 0.2 },
            &mut rng,
        );
        let layout = weights.layout().clone();
        (weights, code.hash(), layout)
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let (weights, hash, layout) = sample_weights();
        let mut buf = Vec::new();
        checkpoint_save(&weights, &hash, &mut buf).unwrap();
        let loaded = checkpoint_load(&mut buf.as_slice(), &layout, &hash).unwrap();
        assert_eq!(loaded, weights);
        for (a, b) in loaded.values().iter().zip(weights.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn wrong_code_hash_is_rejected() {
        let (weights, hash, layout) = sample_weights();
        let mut buf = Vec::new();
        checkpoint_save(&weights, &hash, &mut buf).unwrap();
        let other = construct_bch(6, 3).unwrap().hash();
        let err = checkpoint_load(&mut buf.as_slice(), &layout, &other).unwrap_err();
        assert!(matches!(err, Error::CodeHashMismatch));
    }

    #[test]
    fn truncation_is_detected() {
        let (weights, hash, layout) = sample_weights();
        let mut buf = Vec::new();
        checkpoint_save(&weights, &hash, &mut buf).unwrap();
        for cut in [4usize, 40, 70, buf.len() - 1] {
            let err = checkpoint_load(&mut &buf[..cut], &layout, &hash).unwrap_err();
            assert!(matches!(err, Error::CheckpointTruncated), "cut at {cut}");
        }
    }

    #[test]
    fn bad_magic_and_version_are_rejected() {
        let (weights, hash, layout) = sample_weights();
        let mut buf = Vec::new();
        checkpoint_save(&weights, &hash, &mut buf).unwrap();

        let mut garbled = buf.clone();
        garbled[0] ^= 0xff;
        assert!(matches!(
            checkpoint_load(&mut garbled.as_slice(), &layout, &hash).unwrap_err(),
            Error::CheckpointCorrupt(_)
        ));

        let mut versioned = buf.clone();
        versioned[8] = 99;
        assert!(matches!(
            checkpoint_load(&mut versioned.as_slice(), &layout, &hash).unwrap_err(),
            Error::CheckpointVersion { found: 99, .. }
        ));
    }

    #[test]
    fn layout_mismatch_is_rejected() {
        let (weights, hash, _) = sample_weights();
        let mut buf = Vec::new();
        checkpoint_save(&weights, &hash, &mut buf).unwrap();
        let code = construct_bch(4, 1).unwrap();
        let other_layout = WeightLayout::new(&compile_trellis(&code, 3), false);
        let err = checkpoint_load(&mut buf.as_slice(), &other_layout, &hash).unwrap_err();
        assert!(matches!(err, Error::LayoutMismatch(_)));
    }
}
