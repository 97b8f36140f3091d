//! Minimal single-file NIfTI-1 (`.nii`) reader and writer.
//!
//! Only little-endian, uncompressed, 3D files with datatype uint8, int16 or
//! float32 are supported. Orientation (qform/sform) is ignored; `pixdim[1..=3]`
//! supplies the voxel spacing.

use crate::error::{Result, SrgError};
use crate::volume::Geometry;

use super::{Decoded, Payload};

pub const HEADER_SIZE: usize = 348;
/// Header plus the 4-byte extension flag.
pub const DEFAULT_VOX_OFFSET: usize = 352;
pub const MAGIC: &[u8; 4] = b"n+1\0";

const OFF_DIM: usize = 40;
const OFF_DATATYPE: usize = 70;
const OFF_BITPIX: usize = 72;
const OFF_PIXDIM: usize = 76;
const OFF_VOX_OFFSET: usize = 108;
const OFF_SCL_SLOPE: usize = 112;
const OFF_SCL_INTER: usize = 116;
const OFF_XYZT_UNITS: usize = 123;
const OFF_MAGIC: usize = 344;

const UNITS_MM: u8 = 2;

/// On-disk voxel type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiftiDatatype {
    U8,
    I16,
    F32,
}

impl NiftiDatatype {
    pub fn code(self) -> i16 {
        match self {
            NiftiDatatype::U8 => 2,
            NiftiDatatype::I16 => 4,
            NiftiDatatype::F32 => 16,
        }
    }

    pub fn from_code(code: i16) -> Option<Self> {
        match code {
            2 => Some(NiftiDatatype::U8),
            4 => Some(NiftiDatatype::I16),
            16 => Some(NiftiDatatype::F32),
            _ => None,
        }
    }

    pub fn bytes(self) -> usize {
        match self {
            NiftiDatatype::U8 => 1,
            NiftiDatatype::I16 => 2,
            NiftiDatatype::F32 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NiftiDatatype::U8 => "uint8",
            NiftiDatatype::I16 => "int16",
            NiftiDatatype::F32 => "float32",
        }
    }
}

pub fn is_nifti(bytes: &[u8]) -> bool {
    bytes.len() >= HEADER_SIZE
        && i32::from_le_bytes(bytes[0..4].try_into().unwrap()) == HEADER_SIZE as i32
        && &bytes[OFF_MAGIC..OFF_MAGIC + 4] == MAGIC
}

fn i16_at(b: &[u8], off: usize) -> i16 {
    i16::from_le_bytes([b[off], b[off + 1]])
}

fn f32_at(b: &[u8], off: usize) -> f32 {
    f32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

/// Parsed header fields this reader cares about.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Header {
    pub geometry: Geometry,
    pub datatype: NiftiDatatype,
    pub vox_offset: usize,
    pub scl_slope: f32,
    pub scl_inter: f32,
}

pub(crate) fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < HEADER_SIZE {
        return Err(SrgError::UnsupportedFormat(format!(
            "{} bytes is too short for a NIfTI-1 header",
            bytes.len()
        )));
    }
    let sizeof_hdr = i32::from_le_bytes(bytes[0..4].try_into().unwrap());
    if sizeof_hdr != HEADER_SIZE as i32 {
        let hint = if sizeof_hdr.swap_bytes() == HEADER_SIZE as i32 {
            " (big-endian files are not supported)"
        } else {
            ""
        };
        return Err(SrgError::UnsupportedFormat(format!(
            "sizeof_hdr = {sizeof_hdr}{hint}"
        )));
    }
    if &bytes[OFF_MAGIC..OFF_MAGIC + 4] != MAGIC {
        return Err(SrgError::UnsupportedFormat(
            "NIfTI magic is not single-file `n+1`".into(),
        ));
    }
    let ndim = i16_at(bytes, OFF_DIM);
    if ndim != 3 {
        return Err(SrgError::UnsupportedFormat(format!(
            "dim[0] = {ndim}, only 3D volumes are supported"
        )));
    }
    let raw_dims = [
        i16_at(bytes, OFF_DIM + 2),
        i16_at(bytes, OFF_DIM + 4),
        i16_at(bytes, OFF_DIM + 6),
    ];
    if raw_dims.iter().any(|&d| d <= 0) {
        return Err(SrgError::CorruptHeader(format!("dims {raw_dims:?}")));
    }
    let code = i16_at(bytes, OFF_DATATYPE);
    let datatype = NiftiDatatype::from_code(code)
        .ok_or_else(|| SrgError::UnsupportedFormat(format!("NIfTI datatype code {code}")))?;
    let bitpix = i16_at(bytes, OFF_BITPIX);
    if bitpix as usize != datatype.bytes() * 8 {
        return Err(SrgError::CorruptHeader(format!(
            "bitpix {bitpix} disagrees with datatype {}",
            datatype.name()
        )));
    }
    let spacing = [
        f32_at(bytes, OFF_PIXDIM + 4) as f64,
        f32_at(bytes, OFF_PIXDIM + 8) as f64,
        f32_at(bytes, OFF_PIXDIM + 12) as f64,
    ];
    let geometry = Geometry::new(raw_dims.map(|d| d as usize), spacing)
        .map_err(|e| SrgError::CorruptHeader(e.to_string()))?;
    let vox_offset = f32_at(bytes, OFF_VOX_OFFSET);
    if !(vox_offset.is_finite() && vox_offset >= HEADER_SIZE as f32 && vox_offset.fract() == 0.0) {
        return Err(SrgError::CorruptHeader(format!("vox_offset {vox_offset}")));
    }
    Ok(Header {
        geometry,
        datatype,
        vox_offset: vox_offset as usize,
        scl_slope: f32_at(bytes, OFF_SCL_SLOPE),
        scl_inter: f32_at(bytes, OFF_SCL_INTER),
    })
}

/// Decodes header and payload. Intensity scaling is reported separately so
/// label reads can ignore it.
pub(crate) fn decode(bytes: &[u8]) -> Result<(Decoded, Option<(f64, f64)>)> {
    let header = parse_header(bytes)?;
    let n = header.geometry.len();
    let expected = n * header.datatype.bytes();
    let payload = bytes.get(header.vox_offset..).unwrap_or(&[]);
    if header.vox_offset > bytes.len() || payload.len() != expected {
        return Err(SrgError::CorruptHeader(format!(
            "declared {n} voxels of {} ({expected} bytes) at offset {}, file holds {} payload bytes",
            header.datatype.name(),
            header.vox_offset,
            bytes.len().saturating_sub(header.vox_offset)
        )));
    }
    let payload = match header.datatype {
        NiftiDatatype::U8 => Payload::U8(payload.to_vec()),
        NiftiDatatype::I16 => Payload::I16(
            payload
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]))
                .collect(),
        ),
        NiftiDatatype::F32 => Payload::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
    };
    let slope = header.scl_slope as f64;
    let inter = header.scl_inter as f64;
    let scaling =
        (slope.is_finite() && slope != 0.0 && inter.is_finite() && (slope, inter) != (1.0, 0.0))
            .then_some((slope, inter));
    Ok((
        Decoded {
            geometry: header.geometry,
            payload,
        },
        scaling,
    ))
}

/// Serializes a volume whose voxels are already converted to the target type.
pub(crate) fn encode(
    geometry: &Geometry,
    datatype: NiftiDatatype,
    payload: &[u8],
) -> Result<Vec<u8>> {
    let mut dims = [0i16; 3];
    for (out, &d) in dims.iter_mut().zip(&geometry.dims) {
        *out = i16::try_from(d).map_err(|_| {
            SrgError::InvalidVolume(format!("dimension {d} exceeds the NIfTI-1 limit"))
        })?;
    }
    let mut h = vec![0u8; DEFAULT_VOX_OFFSET];
    h[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    let dim: [i16; 8] = [3, dims[0], dims[1], dims[2], 1, 1, 1, 1];
    for (i, d) in dim.iter().enumerate() {
        h[OFF_DIM + 2 * i..OFF_DIM + 2 * i + 2].copy_from_slice(&d.to_le_bytes());
    }
    h[OFF_DATATYPE..OFF_DATATYPE + 2].copy_from_slice(&datatype.code().to_le_bytes());
    h[OFF_BITPIX..OFF_BITPIX + 2].copy_from_slice(&((datatype.bytes() * 8) as i16).to_le_bytes());
    let pixdim: [f32; 8] = [
        1.0,
        geometry.spacing[0] as f32,
        geometry.spacing[1] as f32,
        geometry.spacing[2] as f32,
        0.0,
        0.0,
        0.0,
        0.0,
    ];
    for (i, p) in pixdim.iter().enumerate() {
        h[OFF_PIXDIM + 4 * i..OFF_PIXDIM + 4 * i + 4].copy_from_slice(&p.to_le_bytes());
    }
    h[OFF_VOX_OFFSET..OFF_VOX_OFFSET + 4]
        .copy_from_slice(&(DEFAULT_VOX_OFFSET as f32).to_le_bytes());
    h[OFF_SCL_SLOPE..OFF_SCL_SLOPE + 4].copy_from_slice(&1.0f32.to_le_bytes());
    h[OFF_XYZT_UNITS] = UNITS_MM;
    h[OFF_MAGIC..OFF_MAGIC + 4].copy_from_slice(MAGIC);
    h.extend_from_slice(payload);
    Ok(h)
}
