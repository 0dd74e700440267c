//! Byte-level codecs: PPM (P6), STL-10 binary records and labels, label
//! maps as PGM/JSON, and the builtin model's `LVM1` weight file.

use limevis_core::predictor::BuiltinModel;
use limevis_core::{RgbImage, SuperpixelMap};
use serde::{Deserialize, Serialize};

use crate::error::{LimevisError, Result};

pub const STL10_SIDE: usize = 96;
pub const STL10_PLANE: usize = STL10_SIDE * STL10_SIDE;
pub const STL10_RECORD: usize = STL10_PLANE * 3;

pub const STL10_CLASS_NAMES: [&str; 10] =
    ["airplane", "bird", "car", "cat", "deer", "dog", "horse", "monkey", "ship", "truck"];

const MODEL_MAGIC: &[u8; 4] = b"LVM1";

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&[u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token().ok_or_else(|| LimevisError::TruncatedData(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LimevisError::UnsupportedFormat(format!("bad {what} in header")))
    }
}

/// Decodes a binary P6 PPM with maxval 255.
pub fn read_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let mut cur = HeaderCursor { bytes, pos: 0 };
    match cur.token() {
        Some(b"P6") => {}
        Some(other) => {
            return Err(LimevisError::UnsupportedFormat(format!(
                "magic {:?} is not P6",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(LimevisError::TruncatedData("empty PPM".into())),
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(LimevisError::UnsupportedFormat(format!("maxval {maxval} (only 255 is supported)")));
    }
    if width == 0 || height == 0 {
        return Err(LimevisError::UnsupportedFormat("zero image dimension".into()));
    }
    // Exactly one whitespace byte separates the header from the payload.
    let start = cur.pos + 1;
    let need = width * height * 3;
    let payload = bytes.get(start..).unwrap_or(&[]);
    if payload.len() < need {
        return Err(LimevisError::TruncatedData(format!("{} of {need} payload bytes", payload.len())));
    }
    Ok(RgbImage::from_rgb_bytes(width, height, &payload[..need])?)
}

pub fn write_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.to_rgb_bytes());
    out
}

pub fn stl10_record_count(bytes: &[u8]) -> Result<usize> {
    if !bytes.len().is_multiple_of(STL10_RECORD) {
        return Err(LimevisError::MalformedFile(format!(
            "STL-10 image file length {} is not a multiple of {STL10_RECORD}",
            bytes.len()
        )));
    }
    Ok(bytes.len() / STL10_RECORD)
}

/// Decodes record `index`: channel-planar R, G, B, each plane column-major.
pub fn read_stl10_record(bytes: &[u8], index: usize) -> Result<RgbImage> {
    let count = stl10_record_count(bytes)?;
    if index >= count {
        return Err(LimevisError::IndexOutOfRange { index, count });
    }
    let rec = &bytes[index * STL10_RECORD..(index + 1) * STL10_RECORD];
    Ok(RgbImage::from_fn(STL10_SIDE, STL10_SIDE, |x, y| {
        let at = x * STL10_SIDE + y;
        [rec[at], rec[STL10_PLANE + at], rec[2 * STL10_PLANE + at]]
    }))
}

/// Inverse of [`read_stl10_record`] for a 96x96 image.
pub fn write_stl10_record(image: &RgbImage) -> Result<Vec<u8>> {
    if image.width() != STL10_SIDE || image.height() != STL10_SIDE {
        return Err(LimevisError::MalformedFile("STL-10 records are 96x96".into()));
    }
    let mut out = vec![0u8; STL10_RECORD];
    for y in 0..STL10_SIDE {
        for x in 0..STL10_SIDE {
            let p = image.get(x, y);
            for c in 0..3 {
                out[c * STL10_PLANE + x * STL10_SIDE + y] = p[c];
            }
        }
    }
    Ok(out)
}

/// One byte per record, values 1..=10, returned as 0-based labels.
pub fn read_stl10_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    bytes
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if (1..=10).contains(&b) {
                Ok(b as usize - 1)
            } else {
                Err(LimevisError::MalformedFile(format!("label byte {b} at offset {i} outside 1..=10")))
            }
        })
        .collect()
}

/// Gray label image: 8-bit samples when every id fits, 16-bit big-endian otherwise.
pub fn write_label_pgm(map: &SuperpixelMap) -> Vec<u8> {
    let wide = map.num_segments() > 256;
    let maxval = if wide { 65535 } else { 255 };
    let mut out = format!("P5\n{} {}\n{maxval}\n", map.width(), map.height()).into_bytes();
    for &l in map.labels() {
        if wide {
            out.extend((l as u16).to_be_bytes());
        } else {
            out.push(l as u8);
        }
    }
    out
}

/// Sidecar line written next to a label PGM.
pub fn label_sidecar(map: &SuperpixelMap) -> String {
    format!("num_segments={}\n", map.num_segments())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperpixelMapJson {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub num_segments: usize,
}

impl From<&SuperpixelMap> for SuperpixelMapJson {
    fn from(m: &SuperpixelMap) -> Self {
        SuperpixelMapJson { width: m.width(), height: m.height(), labels: m.labels().to_vec(), num_segments: m.num_segments() }
    }
}

impl TryFrom<SuperpixelMapJson> for SuperpixelMap {
    type Error = LimevisError;

    fn try_from(j: SuperpixelMapJson) -> Result<Self> {
        Ok(SuperpixelMap::new(j.width, j.height, j.labels, j.num_segments)?)
    }
}

/// `LVM1`, class count and feature dim as u32 LE, then weights and biases as f64 LE.
pub fn write_model(model: &BuiltinModel) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * (model.weights.len() + model.bias.len()));
    out.extend_from_slice(MODEL_MAGIC);
    out.extend((model.class_count() as u32).to_le_bytes());
    out.extend((model.feature_dim as u32).to_le_bytes());
    for v in model.weights.iter().chain(&model.bias) {
        out.extend(v.to_le_bytes());
    }
    out
}

/// Parses an `LVM1` file. Class names are not stored in the file; when
/// `class_names` is `None` they default to `class_0..`.
pub fn read_model(bytes: &[u8], class_names: Option<Vec<String>>) -> Result<BuiltinModel> {
    if bytes.len() < 12 || &bytes[..4] != MODEL_MAGIC {
        return Err(LimevisError::UnsupportedFormat("missing LVM1 magic".into()));
    }
    let classes = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let floats = classes
        .checked_mul(dim)
        .and_then(|n| n.checked_add(classes))
        .ok_or_else(|| LimevisError::MalformedFile("model dimensions overflow".into()))?;
    let body = &bytes[12..];
    if body.len() != floats * 8 {
        return Err(LimevisError::TruncatedData(format!("model body is {} bytes, expected {}", body.len(), floats * 8)));
    }
    let values: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let names = match class_names {
        Some(n) if n.len() == classes => n,
        Some(n) => {
            return Err(LimevisError::MalformedFile(format!("model has {classes} classes, dataset has {}", n.len())))
        }
        None => (0..classes).map(|i| format!("class_{i}")).collect(),
    };
    let (weights, bias) = values.split_at(classes * dim);
    Ok(BuiltinModel::from_parts(weights.to_vec(), bias.to_vec(), dim, names)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_ppm() {
        let mut bytes = b"P6 1 1 255\n".to_vec();
        bytes.extend([255, 0, 0]);
        let img = read_ppm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.get(0, 0), [255, 0, 0]);
    }

    #[test]
    fn ppm_with_comments_and_two_pixels() {
        let mut bytes = b"P6\n# made by hand\n2 1 # trailing\n255\n".to_vec();
        bytes.extend([0, 0, 0, 255, 255, 255]);
        let img = read_ppm(&bytes).unwrap();
        assert_eq!(img.get(0, 0), [0, 0, 0]);
        assert_eq!(img.get(1, 0), [255, 255, 255]);
    }

    #[test]
    fn ppm_errors() {
        assert!(matches!(read_ppm(b"P5 1 1 255\n\0"), Err(LimevisError::UnsupportedFormat(_))));
        assert!(matches!(read_ppm(b"P6 1 1 65535\n\0\0\0\0\0\0"), Err(LimevisError::UnsupportedFormat(_))));
        assert!(matches!(read_ppm(b"P6 2 2 255\n\0\0\0"), Err(LimevisError::TruncatedData(_))));
    }

    #[test]
    fn ppm_encoding_is_exact() {
        let img = RgbImage::filled(1, 1, [255, 0, 0]);
        assert_eq!(write_ppm(&img), b"P6\n1 1\n255\n\xff\x00\x00".to_vec());
    }

    #[test]
    fn stl10_layout() {
        let bytes: Vec<u8> = (0..STL10_RECORD).map(|k| (k % 256) as u8).collect();
        let img = read_stl10_record(&bytes, 0).unwrap();
        assert_eq!(img.get(0, 0)[0], 0);
        assert_eq!(img.get(0, 1)[0], 1);
        assert_eq!(img.get(1, 0)[0], 96);
        // Green plane starts at 9216 = 36 * 256.
        assert_eq!(img.get(0, 0)[1], (9216 % 256) as u8);
        assert_eq!(write_stl10_record(&img).unwrap(), bytes);
    }

    #[test]
    fn stl10_errors() {
        let bytes = vec![0u8; STL10_RECORD + 1];
        assert!(matches!(read_stl10_record(&bytes, 0), Err(LimevisError::MalformedFile(_))));
        let two = vec![0u8; 2 * STL10_RECORD];
        assert!(matches!(read_stl10_record(&two, 2), Err(LimevisError::IndexOutOfRange { index: 2, count: 2 })));
        assert!(matches!(read_stl10_labels(&[1, 0, 3]), Err(LimevisError::MalformedFile(_))));
        assert!(matches!(read_stl10_labels(&[11]), Err(LimevisError::MalformedFile(_))));
        assert_eq!(read_stl10_labels(&[1, 10]).unwrap(), vec![0, 9]);
    }

    #[test]
    fn label_pgm_layout() {
        let m = SuperpixelMap::from_raw_labels(3, 1, &[0, 1, 1]);
        assert_eq!(write_label_pgm(&m), b"P5\n3 1\n255\n\x00\x01\x01".to_vec());
        assert_eq!(label_sidecar(&m), "num_segments=2\n");
        let j = SuperpixelMapJson::from(&m);
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"{"width":3,"height":1,"labels":[0,1,1],"num_segments":2}"#);
        assert_eq!(SuperpixelMap::try_from(j).unwrap(), m);
    }

    #[test]
    fn model_file_layout() {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let mut m = BuiltinModel::zeros(names.clone());
        m.weights[5] = 1.5;
        m.bias[1] = -0.25;
        let bytes = write_model(&m);
        assert_eq!(&bytes[..4], b"LVM1");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &768u32.to_le_bytes());
        assert_eq!(bytes.len(), 12 + 8 * (2 * 768 + 2));
        assert_eq!(read_model(&bytes, Some(names)).unwrap(), m);
        assert!(read_model(&bytes[..20], None).is_err());
        assert!(read_model(b"LVM2........", None).is_err());
    }
}
