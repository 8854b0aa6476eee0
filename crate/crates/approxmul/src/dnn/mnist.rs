//! IDX-format image/label files (big-endian headers, raw bytes, optional
//! gzip), the storage format of the MNIST handwriting set.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// A labeled image set with row-major `rows x cols` byte images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub images: Vec<u8>,
    pub labels: Vec<u8>,
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Dataset {
    pub fn image(&self, i: usize) -> &[u8] {
        let len = self.rows * self.cols;
        &self.images[i * len..(i + 1) * len]
    }

    /// The leading `n` items as a borrowed view-by-copy subset.
    pub fn take(&self, n: usize) -> Dataset {
        let n = n.min(self.count);
        Dataset {
            images: self.images[..n * self.rows * self.cols].to_vec(),
            labels: self.labels[..n].to_vec(),
            count: n,
            rows: self.rows,
            cols: self.cols,
        }
    }

    /// Split off the trailing fraction as a held-out set.
    pub fn split_holdout(&self, fraction: f64) -> (Dataset, Dataset) {
        let hold = ((self.count as f64 * fraction) as usize).clamp(1, self.count - 1);
        let fit = self.count - hold;
        let len = self.rows * self.cols;
        (
            Dataset {
                images: self.images[..fit * len].to_vec(),
                labels: self.labels[..fit].to_vec(),
                count: fit,
                rows: self.rows,
                cols: self.cols,
            },
            Dataset {
                images: self.images[fit * len..].to_vec(),
                labels: self.labels[fit..].to_vec(),
                count: hold,
                rows: self.rows,
                cols: self.cols,
            },
        )
    }
}

fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>> {
    let raw = fs::read(path)?;
    if raw.len() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b {
        let mut out = Vec::new();
        flate2::read::GzDecoder::new(&raw[..]).read_to_end(&mut out).map_err(|e| {
            Error::Parse { offset: 0, message: format!("gzip decode failed: {e}") }
        })?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(Error::Parse {
            offset: offset as u64,
            message: format!("file truncated: need 4 bytes at offset {offset}"),
        })
}

/// Parse an IDX image file: magic, count, rows, cols, then raw pixels.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(Vec<u8>, usize, usize, usize)> {
    let magic = be_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::Parse {
            offset: 0,
            message: format!("bad image magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}"),
        });
    }
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let need = 16 + count * rows * cols;
    if bytes.len() != need {
        return Err(Error::Parse {
            offset: bytes.len().min(need) as u64,
            message: format!(
                "image payload has {} bytes, header promises {need}",
                bytes.len()
            ),
        });
    }
    Ok((bytes[16..].to_vec(), count, rows, cols))
}

/// Parse an IDX label file: magic, count, then raw labels.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = be_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(Error::Parse {
            offset: 0,
            message: format!("bad label magic {magic:#010x}, expected {LABEL_MAGIC:#010x}"),
        });
    }
    let count = be_u32(bytes, 4)? as usize;
    let need = 8 + count;
    if bytes.len() != need {
        return Err(Error::Parse {
            offset: bytes.len().min(need) as u64,
            message: format!("label payload has {} bytes, header promises {need}", bytes.len()),
        });
    }
    Ok(bytes[8..].to_vec())
}

/// Load one image/label file pair into a validated dataset.
pub fn load_pair(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let (images, count, rows, cols) = parse_idx_images(&read_maybe_gzip(images_path)?)?;
    let labels = parse_idx_labels(&read_maybe_gzip(labels_path)?)?;
    if labels.len() != count {
        return Err(Error::Parse {
            offset: 8,
            message: format!("{count} images but {} labels", labels.len()),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l > 9) {
        return Err(Error::Parse {
            offset: 8,
            message: format!("label {bad} out of range 0..9"),
        });
    }
    Ok(Dataset { images, labels, count, rows, cols })
}

fn find_file(dir: &Path, stem: &str) -> Result<PathBuf> {
    // Both common naming styles, optionally gzipped.
    let candidates = [
        format!("{stem}-ubyte"),
        format!("{stem}-ubyte.gz"),
        format!("{}.{}-ubyte", &stem[..stem.len() - 5], &stem[stem.len() - 4..]),
        format!("{}.{}-ubyte.gz", &stem[..stem.len() - 5], &stem[stem.len() - 4..]),
    ];
    for c in &candidates {
        let p = dir.join(c);
        if p.exists() {
            return Ok(p);
        }
    }
    Err(Error::Format(format!(
        "no `{}` file found in {} (tried {})",
        stem,
        dir.display(),
        candidates.join(", ")
    )))
}

/// Load the train and test splits from a directory holding the four standard
/// files (`train-images-idx3-ubyte` etc., `-` or `.` separated, plain or
/// `.gz`).
pub fn load_mnist(dir: &Path) -> Result<(Dataset, Dataset)> {
    let train = load_pair(
        &find_file(dir, "train-images-idx3")?,
        &find_file(dir, "train-labels-idx1")?,
    )?;
    let test = load_pair(
        &find_file(dir, "t10k-images-idx3")?,
        &find_file(dir, "t10k-labels-idx1")?,
    )?;
    Ok((train, test))
}

pub fn idx_image_bytes(images: &[u8], count: usize, rows: usize, cols: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len());
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(count as u32).to_be_bytes());
    out.extend_from_slice(&(rows as u32).to_be_bytes());
    out.extend_from_slice(&(cols as u32).to_be_bytes());
    out.extend_from_slice(images);
    out
}

pub fn idx_label_bytes(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// Write a dataset as an IDX image/label file pair.
pub fn write_pair(data: &Dataset, images_path: &Path, labels_path: &Path) -> Result<()> {
    fs::write(images_path, idx_image_bytes(&data.images, data.count, data.rows, data.cols))?;
    fs::write(labels_path, idx_label_bytes(&data.labels))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dataset() -> Dataset {
        Dataset {
            images: (0..3 * 4 * 4).map(|i| i as u8).collect(),
            labels: vec![0, 4, 9],
            count: 3,
            rows: 4,
            cols: 4,
        }
    }

    #[test]
    fn idx_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = tiny_dataset();
        let ip = dir.path().join("train-images-idx3-ubyte");
        let lp = dir.path().join("train-labels-idx1-ubyte");
        write_pair(&d, &ip, &lp).unwrap();
        let back = load_pair(&ip, &lp).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn gzip_round_trip() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let d = tiny_dataset();
        let ip = dir.path().join("imgs.gz");
        let lp = dir.path().join("lbls.gz");
        for (path, bytes) in [
            (&ip, idx_image_bytes(&d.images, d.count, d.rows, d.cols)),
            (&lp, idx_label_bytes(&d.labels)),
        ] {
            let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
            enc.write_all(&bytes).unwrap();
            fs::write(path, enc.finish().unwrap()).unwrap();
        }
        assert_eq!(load_pair(&ip, &lp).unwrap(), d);
    }

    #[test]
    fn bad_magic_rejected() {
        let mut bytes = idx_image_bytes(&[0; 16], 1, 4, 4);
        bytes[3] = 0x07;
        let err = parse_idx_images(&bytes).unwrap_err();
        assert!(err.to_string().contains("magic"));
    }

    #[test]
    fn truncation_names_the_offset() {
        let bytes = idx_image_bytes(&[0; 32], 2, 4, 4);
        let err = parse_idx_images(&bytes[..20]).unwrap_err();
        match err {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 20);
                assert!(message.contains("48"), "{message}");
            }
            other => panic!("unexpected error {other}"),
        }
        let err2 = parse_idx_images(&bytes[..10]).unwrap_err();
        assert!(matches!(err2, Error::Parse { offset: 8, .. }));
    }

    #[test]
    fn count_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let d = tiny_dataset();
        let ip = dir.path().join("i");
        let lp = dir.path().join("l");
        fs::write(&ip, idx_image_bytes(&d.images, d.count, d.rows, d.cols)).unwrap();
        fs::write(&lp, idx_label_bytes(&[1, 2])).unwrap();
        let err = load_pair(&ip, &lp).unwrap_err();
        assert!(err.to_string().contains("3 images but 2 labels"));
    }

    #[test]
    fn holdout_split_partitions() {
        let d = tiny_dataset();
        let (fit, hold) = d.split_holdout(0.34);
        assert_eq!(fit.count, 2);
        assert_eq!(hold.count, 1);
        assert_eq!(hold.labels, vec![9]);
        assert_eq!(fit.image(1), d.image(1));
        assert_eq!(hold.image(0), d.image(2));
    }
}
