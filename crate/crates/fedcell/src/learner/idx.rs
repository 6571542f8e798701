//! Big-endian IDX file parsing (the MNIST on-disk format).

use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::learner::data::Dataset;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

/// Load an image/label file pair into a [`Dataset`]. Pixels are unsigned
/// bytes scaled by 1/255; the sample counts of the two files must match.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let (count, rows, cols, pixels) = read_images(images_path)?;
    let labels = read_labels(labels_path)?;
    if count != labels.len() {
        return Err(Error::IdxCountMismatch {
            images: count,
            labels: labels.len(),
        });
    }
    for &label in &labels {
        if label > 9 {
            return Err(Error::InvalidLabel(label));
        }
    }
    let features = rows * cols;
    let inputs = Array2::from_shape_vec(
        (count, features),
        pixels.iter().map(|&b| f32::from(b) / 255.0).collect(),
    )
    .expect("pixel count checked against header");
    Dataset::new(inputs, labels)
}

fn read_images(path: &Path) -> Result<(usize, usize, usize, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let mut cur = Cursor::new(&bytes);
    let magic = read_header_u32(&mut cur, path)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::IdxMagic {
            path: path.to_path_buf(),
            expected: IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = read_header_u32(&mut cur, path)? as usize;
    let rows = read_header_u32(&mut cur, path)? as usize;
    let cols = read_header_u32(&mut cur, path)? as usize;
    let expected = count * rows * cols;
    let offset = cur.position() as usize;
    let payload = &bytes[offset..];
    if payload.len() < expected {
        return Err(Error::IdxTruncated {
            path: path.to_path_buf(),
            expected,
            found: payload.len(),
        });
    }
    Ok((count, rows, cols, payload[..expected].to_vec()))
}

fn read_labels(path: &Path) -> Result<Vec<u8>> {
    let bytes = fs::read(path)?;
    let mut cur = Cursor::new(&bytes);
    let magic = read_header_u32(&mut cur, path)?;
    if magic != LABELS_MAGIC {
        return Err(Error::IdxMagic {
            path: path.to_path_buf(),
            expected: LABELS_MAGIC,
            found: magic,
        });
    }
    let count = read_header_u32(&mut cur, path)? as usize;
    let offset = cur.position() as usize;
    let payload = &bytes[offset..];
    if payload.len() < count {
        return Err(Error::IdxTruncated {
            path: path.to_path_buf(),
            expected: count,
            found: payload.len(),
        });
    }
    Ok(payload[..count].to_vec())
}

fn read_header_u32(cur: &mut Cursor<&Vec<u8>>, path: &Path) -> Result<u32> {
    cur.read_u32::<BigEndian>().map_err(|_| Error::IdxTruncated {
        path: path.to_path_buf(),
        expected: 4,
        found: 0,
    })
}
