//! Internal raw volume format (`.srgvol`).
//!
//! Layout, all little-endian:
//!
//! | offset | size | field                              |
//! |--------|------|------------------------------------|
//! | 0      | 4    | magic `SRGV`                       |
//! | 4      | 2    | version (u16, = 1)                 |
//! | 6      | 1    | kind (0 = scalar, 1 = label)       |
//! | 7      | 12   | dims, 3 × u32                      |
//! | 19     | 24   | spacing, 3 × f64                   |
//! | 43     | ...  | f64 (scalar) or u32 (label) voxels |

use crate::error::{Result, SrgError};
use crate::volume::{Geometry, LabelVolume, ScalarVolume};

use super::{Decoded, Payload};

pub const MAGIC: &[u8; 4] = b"SRGV";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 43;

const KIND_SCALAR: u8 = 0;
const KIND_LABEL: u8 = 1;

pub fn is_raw(bytes: &[u8]) -> bool {
    bytes.len() >= 4 && &bytes[..4] == MAGIC
}

fn header(out: &mut Vec<u8>, kind: u8, geometry: &Geometry) -> Result<()> {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind);
    for &d in &geometry.dims {
        let d = u32::try_from(d)
            .map_err(|_| SrgError::InvalidVolume(format!("dimension {d} exceeds u32")))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    for &s in &geometry.spacing {
        out.extend_from_slice(&s.to_le_bytes());
    }
    Ok(())
}

pub fn encode_scalar(vol: &ScalarVolume) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * vol.len());
    header(&mut out, KIND_SCALAR, vol.geometry())?;
    for v in vol.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn encode_labels(vol: &LabelVolume) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * vol.len());
    header(&mut out, KIND_LABEL, vol.geometry())?;
    for v in vol.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], off: usize) -> f64 {
    f64::from_le_bytes(b[off..off + 8].try_into().unwrap())
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Decoded> {
    if !is_raw(bytes) {
        return Err(SrgError::UnsupportedFormat("missing SRGV magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(SrgError::CorruptHeader(format!(
            "file is {} bytes, header needs {HEADER_LEN}",
            bytes.len()
        )));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(SrgError::UnsupportedFormat(format!(
            "raw format version {version}"
        )));
    }
    let kind = bytes[6];
    let dims = [u32_at(bytes, 7), u32_at(bytes, 11), u32_at(bytes, 15)];
    if dims.contains(&0) {
        return Err(SrgError::CorruptHeader(format!("dims {dims:?}")));
    }
    let spacing = [f64_at(bytes, 19), f64_at(bytes, 27), f64_at(bytes, 35)];
    let geometry = Geometry::new(dims.map(|d| d as usize), spacing)
        .map_err(|e| SrgError::CorruptHeader(e.to_string()))?;
    let n = geometry.len();
    let payload = &bytes[HEADER_LEN..];
    let elem = match kind {
        KIND_SCALAR => 8,
        KIND_LABEL => 4,
        other => {
            return Err(SrgError::CorruptHeader(format!(
                "unknown kind byte {other}"
            )))
        }
    };
    if n.checked_mul(elem) != Some(payload.len()) {
        return Err(SrgError::CorruptHeader(format!(
            "declared {n} voxels of {elem} bytes, payload is {} bytes",
            payload.len()
        )));
    }
    let payload = if kind == KIND_SCALAR {
        Payload::F64(
            payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        )
    } else {
        Payload::U32(
            payload
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        )
    };
    Ok(Decoded { geometry, payload })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{decode_labels, decode_scalar};

    #[test]
    fn uniform_scalar_payload() {
        let g = Geometry::isotropic([2, 2, 2]).unwrap();
        let v = ScalarVolume::filled(g, 7.0).unwrap();
        let bytes = encode_scalar(&v).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 64);
        let back = decode_scalar(&bytes).unwrap();
        assert_eq!(back.data(), &[7.0; 8]);
    }

    #[test]
    fn label_enumeration() {
        let g = Geometry::isotropic([4, 1, 1]).unwrap();
        let v = LabelVolume::new(g, vec![0, 1, 1, 2]).unwrap();
        let back = decode_labels(&encode_labels(&v).unwrap()).unwrap();
        assert_eq!(back.distinct_labels(), vec![1, 2]);
    }

    #[test]
    fn truncated_payload_is_corrupt() {
        let g = Geometry::isotropic([2, 2, 2]).unwrap();
        let v = ScalarVolume::filled(g, 1.0).unwrap();
        let mut bytes = encode_scalar(&v).unwrap();
        bytes.pop();
        assert!(matches!(decode(&bytes), Err(SrgError::CorruptHeader(_))));
    }

    #[test]
    fn zero_dim_is_corrupt() {
        let g = Geometry::isotropic([2, 2, 2]).unwrap();
        let v = ScalarVolume::filled(g, 1.0).unwrap();
        let mut bytes = encode_scalar(&v).unwrap();
        bytes[7..11].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(decode(&bytes), Err(SrgError::CorruptHeader(_))));
    }

    #[test]
    fn bad_magic_is_unsupported() {
        assert!(matches!(
            decode(b"XXXX\x01\x00"),
            Err(SrgError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn nan_rejected_on_scalar_load() {
        let g = Geometry::isotropic([2, 1, 1]).unwrap();
        let v = ScalarVolume::filled(g, 1.0).unwrap();
        let mut bytes = encode_scalar(&v).unwrap();
        bytes[HEADER_LEN + 8..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            decode_scalar(&bytes),
            Err(SrgError::NonFiniteData { index: 1 })
        ));
    }
}
