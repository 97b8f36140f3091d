//! Volume loading and saving.
//!
//! Two on-disk formats are understood: the internal raw `.srgvol` format,
//! which round-trips bit-exactly, and uncompressed little-endian NIfTI-1.
//! The format of an input file is detected from its leading bytes, never
//! from its extension.

pub mod nifti;
pub mod raw;

use std::fs;
use std::path::Path;

use crate::error::{Result, SrgError};
use crate::volume::{Geometry, LabelVolume, ScalarVolume, Volume};

pub use nifti::NiftiDatatype;

/// What a caller expects a file to contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeKind {
    Scalar,
    Label,
}

/// Either kind of volume.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyVolume {
    Scalar(ScalarVolume),
    Label(LabelVolume),
}

impl AnyVolume {
    pub fn geometry(&self) -> &Geometry {
        match self {
            AnyVolume::Scalar(v) => v.geometry(),
            AnyVolume::Label(v) => v.geometry(),
        }
    }
}

/// Output encoding for [`save_volume`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeFormat {
    Raw,
    /// NIfTI-1; `None` picks float32 for scalars and the narrowest integer
    /// type that holds every label for label volumes.
    Nifti(Option<NiftiDatatype>),
}

impl VolumeFormat {
    /// Picks a format from a file name: `.nii` is NIfTI, anything else raw.
    /// Compressed `.nii.gz` output is refused.
    pub fn from_path(path: &Path) -> Result<Self> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        if name.ends_with(".nii.gz") || name.ends_with(".gz") {
            return Err(SrgError::UnsupportedFormat(
                "compressed NIfTI (.nii.gz) is not supported".into(),
            ));
        }
        if name.ends_with(".nii") {
            Ok(VolumeFormat::Nifti(None))
        } else {
            Ok(VolumeFormat::Raw)
        }
    }
}

/// Voxel payload as stored on disk, before widening.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Payload {
    U8(Vec<u8>),
    I16(Vec<i16>),
    F32(Vec<f32>),
    F64(Vec<f64>),
    U32(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Decoded {
    pub geometry: Geometry,
    pub payload: Payload,
}

fn is_gzip(bytes: &[u8]) -> bool {
    bytes.len() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b
}

enum Source {
    Raw,
    Nifti(Option<(f64, f64)>),
}

fn decode_any(bytes: &[u8]) -> Result<(Decoded, Source)> {
    if is_gzip(bytes) {
        return Err(SrgError::UnsupportedFormat(
            "gzip-compressed input (.nii.gz) is not supported; decompress it first".into(),
        ));
    }
    if raw::is_raw(bytes) {
        return Ok((raw::decode(bytes)?, Source::Raw));
    }
    let (decoded, scaling) = nifti::decode(bytes)?;
    Ok((decoded, Source::Nifti(scaling)))
}

fn widen(payload: Payload) -> Vec<f64> {
    match payload {
        Payload::U8(v) => v.into_iter().map(f64::from).collect(),
        Payload::I16(v) => v.into_iter().map(f64::from).collect(),
        Payload::F32(v) => v.into_iter().map(f64::from).collect(),
        Payload::F64(v) => v,
        Payload::U32(v) => v.into_iter().map(f64::from).collect(),
    }
}

fn float_to_label(value: f64, index: usize) -> Result<u32> {
    if value.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&value) {
        Ok(value as u32)
    } else {
        Err(SrgError::KindMismatch(format!(
            "voxel {index} holds {value}, which is not a valid label"
        )))
    }
}

fn narrow_to_labels(payload: Payload) -> Result<Vec<u32>> {
    match payload {
        Payload::U8(v) => Ok(v.into_iter().map(u32::from).collect()),
        Payload::U32(v) => Ok(v),
        Payload::I16(v) => v
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                u32::try_from(x).map_err(|_| {
                    SrgError::KindMismatch(format!("voxel {i} holds negative label {x}"))
                })
            })
            .collect(),
        Payload::F32(v) => v
            .into_iter()
            .enumerate()
            .map(|(i, x)| float_to_label(x as f64, i))
            .collect(),
        Payload::F64(v) => v
            .into_iter()
            .enumerate()
            .map(|(i, x)| float_to_label(x, i))
            .collect(),
    }
}

/// Decodes a scalar volume from file bytes in either supported format.
/// Integer payloads are widened losslessly; NIfTI intensity scaling is applied.
pub fn decode_scalar(bytes: &[u8]) -> Result<ScalarVolume> {
    let (decoded, source) = decode_any(bytes)?;
    let mut data = widen(decoded.payload);
    if let Source::Nifti(Some((slope, inter))) = source {
        data.iter_mut().for_each(|v| *v = *v * slope + inter);
    }
    Volume::new(decoded.geometry, data)
}

/// Decodes a label volume. Floating payloads must hold non-negative integers.
pub fn decode_labels(bytes: &[u8]) -> Result<LabelVolume> {
    let (decoded, _) = decode_any(bytes)?;
    Volume::new(decoded.geometry, narrow_to_labels(decoded.payload)?)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| SrgError::io(path, e))
}

pub fn load_volume(path: impl AsRef<Path>, kind: VolumeKind) -> Result<AnyVolume> {
    let bytes = read(path.as_ref())?;
    Ok(match kind {
        VolumeKind::Scalar => AnyVolume::Scalar(decode_scalar(&bytes)?),
        VolumeKind::Label => AnyVolume::Label(decode_labels(&bytes)?),
    })
}

pub fn load_scalar(path: impl AsRef<Path>) -> Result<ScalarVolume> {
    decode_scalar(&read(path.as_ref())?)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelVolume> {
    decode_labels(&read(path.as_ref())?)
}

fn encode_nifti_scalar(vol: &ScalarVolume, datatype: NiftiDatatype) -> Result<Vec<u8>> {
    let mut payload = Vec::with_capacity(vol.len() * datatype.bytes());
    for &v in vol.data() {
        match datatype {
            NiftiDatatype::F32 => payload.extend_from_slice(&(v as f32).to_le_bytes()),
            NiftiDatatype::U8 => {
                let x = exact_integer::<u8>(v, datatype)?;
                payload.push(x);
            }
            NiftiDatatype::I16 => {
                let x = exact_integer::<i16>(v, datatype)?;
                payload.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    nifti::encode(vol.geometry(), datatype, &payload)
}

fn exact_integer<T: TryFrom<i64>>(v: f64, datatype: NiftiDatatype) -> Result<T> {
    let err = || SrgError::Unrepresentable {
        value: v,
        datatype: datatype.name(),
    };
    if v.fract() != 0.0 || v.abs() > i64::MAX as f64 {
        return Err(err());
    }
    T::try_from(v as i64).map_err(|_| err())
}

fn encode_nifti_labels(vol: &LabelVolume, datatype: Option<NiftiDatatype>) -> Result<Vec<u8>> {
    let max = vol.max_label();
    let datatype = datatype.unwrap_or(if max <= u8::MAX as u32 {
        NiftiDatatype::U8
    } else {
        NiftiDatatype::I16
    });
    let mut payload = Vec::with_capacity(vol.len() * datatype.bytes());
    for &l in vol.data() {
        let unrepresentable = || SrgError::Unrepresentable {
            value: l as f64,
            datatype: datatype.name(),
        };
        match datatype {
            NiftiDatatype::U8 => payload.push(u8::try_from(l).map_err(|_| unrepresentable())?),
            NiftiDatatype::I16 => payload.extend_from_slice(
                &i16::try_from(l)
                    .map_err(|_| unrepresentable())?
                    .to_le_bytes(),
            ),
            NiftiDatatype::F32 => {
                if l > 1 << 24 {
                    return Err(unrepresentable());
                }
                payload.extend_from_slice(&(l as f32).to_le_bytes())
            }
        }
    }
    nifti::encode(vol.geometry(), datatype, &payload)
}

/// Volumes that know how to serialize themselves.
pub trait Encodable {
    fn encode(&self, format: VolumeFormat) -> Result<Vec<u8>>;
}

impl Encodable for ScalarVolume {
    fn encode(&self, format: VolumeFormat) -> Result<Vec<u8>> {
        match format {
            VolumeFormat::Raw => raw::encode_scalar(self),
            VolumeFormat::Nifti(dt) => encode_nifti_scalar(self, dt.unwrap_or(NiftiDatatype::F32)),
        }
    }
}

impl Encodable for LabelVolume {
    fn encode(&self, format: VolumeFormat) -> Result<Vec<u8>> {
        match format {
            VolumeFormat::Raw => raw::encode_labels(self),
            VolumeFormat::Nifti(dt) => encode_nifti_labels(self, dt),
        }
    }
}

impl Encodable for AnyVolume {
    fn encode(&self, format: VolumeFormat) -> Result<Vec<u8>> {
        match self {
            AnyVolume::Scalar(v) => v.encode(format),
            AnyVolume::Label(v) => v.encode(format),
        }
    }
}

/// Writes `vol` to `path`.
pub fn save_volume(
    vol: &impl Encodable,
    path: impl AsRef<Path>,
    format: VolumeFormat,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = vol.encode(format)?;
    fs::write(path, bytes).map_err(|e| SrgError::io(path, e))
}

/// Writes `vol`, choosing the format from the file extension.
pub fn save_auto(vol: &impl Encodable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    save_volume(vol, path, VolumeFormat::from_path(path)?)
}
