use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::Alphabet;
use crate::region::RelayChannelSpec;

/// Row-sum tolerance for kernels read from disk. Rows inside it are rescaled
/// to sum to exactly 1.
pub const FILE_ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabets {
    pub x1: usize,
    pub x2: usize,
    pub y2: usize,
    pub y3: usize,
}

/// On-disk channel: `alphabets` plus `kernel[x1][x2][y2][y3]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub alphabets: Alphabets,
    pub kernel: Vec<Vec<Vec<Vec<f64>>>>,
}

impl ChannelFile {
    pub fn from_spec(spec: &RelayChannelSpec) -> Self {
        let alphabets = Alphabets {
            x1: spec.alph_x1.size(),
            x2: spec.alph_x2.size(),
            y2: spec.alph_y2.size(),
            y3: spec.alph_y3.size(),
        };
        let kernel = (0..alphabets.x1)
            .map(|x1| {
                (0..alphabets.x2)
                    .map(|x2| {
                        spec.row(x1, x2)
                            .chunks(alphabets.y3)
                            .map(<[f64]>::to_vec)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { alphabets, kernel }
    }

    /// Validates shape and row sums, rescaling rows within
    /// [`FILE_ROW_TOLERANCE`].
    pub fn to_spec(&self) -> Result<RelayChannelSpec> {
        let a = self.alphabets;
        let alph = |name: &str, n: usize| {
            Alphabet::new(n)
                .map_err(|_| Error::AlphabetMismatch(format!("alphabet `{name}` has size 0")))
        };
        let (ax1, ax2, ay2, ay3) = (
            alph("x1", a.x1)?,
            alph("x2", a.x2)?,
            alph("y2", a.y2)?,
            alph("y3", a.y3)?,
        );
        let shape_err = |what: String| Error::AlphabetMismatch(format!("kernel shape: {what}"));
        if self.kernel.len() != a.x1 {
            return Err(shape_err(format!(
                "{} x1 entries, expected {}",
                self.kernel.len(),
                a.x1
            )));
        }
        let mut flat = Vec::with_capacity(a.x1 * a.x2 * a.y2 * a.y3);
        for (x1, by_x2) in self.kernel.iter().enumerate() {
            if by_x2.len() != a.x2 {
                return Err(shape_err(format!(
                    "x1={x1} has {} x2 entries, expected {}",
                    by_x2.len(),
                    a.x2
                )));
            }
            for (x2, rows) in by_x2.iter().enumerate() {
                if rows.len() != a.y2 || rows.iter().any(|r| r.len() != a.y3) {
                    return Err(shape_err(format!(
                        "(x1={x1}, x2={x2}) is not a {}x{} table",
                        a.y2, a.y3
                    )));
                }
                let sum: f64 = rows.iter().flatten().sum();
                if !sum.is_finite() || (sum - 1.0).abs() > FILE_ROW_TOLERANCE {
                    return Err(Error::KernelRowSum { x1, x2, sum });
                }
                flat.extend(rows.iter().flatten().map(|p| p / sum));
            }
        }
        RelayChannelSpec::new(ax1, ax2, ay2, ay3, flat)
    }
}

pub fn load_channel_file(path: impl AsRef<Path>) -> Result<RelayChannelSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ChannelFile = serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    file.to_spec().map_err(|e| Error::ChannelFile {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn save_channel_file(spec: &RelayChannelSpec, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(&ChannelFile::from_spec(spec))
        .expect("channel file serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{make_channel, ChannelRecipe};

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn loads_hand_written_file() {
        let dir = tempfile::tempdir().unwrap();
        // Y2 = X1, Y3 = X2
        let p = write(
            &dir,
            "det.json",
            r#"{"alphabets":{"x1":2,"x2":2,"y2":2,"y3":2},
                "kernel":[[[[1,0],[0,0]],[[0,1],[0,0]]],[[[0,0],[1,0]],[[0,0],[0,1]]]]}"#,
        );
        let spec = load_channel_file(&p).unwrap();
        assert_eq!(spec, make_channel(&ChannelRecipe::Deterministic).unwrap());
    }

    #[test]
    fn row_sum_error_names_the_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "bad.json",
            r#"{"alphabets":{"x1":1,"x2":2,"y2":1,"y3":2},"kernel":[[[[0.5,0.5]],[[0.5,0.49]]]]}"#,
        );
        let err = load_channel_file(&p).unwrap_err().to_string();
        assert!(err.contains("x1=0, x2=1"), "{err}");
        assert!(err.contains("bad.json"), "{err}");
    }

    #[test]
    fn rejects_empty_alphabet_and_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "zero.json",
            r#"{"alphabets":{"x1":0,"x2":1,"y2":1,"y3":1},"kernel":[]}"#,
        );
        assert!(load_channel_file(&p)
            .unwrap_err()
            .to_string()
            .contains("size 0"));
        let p = write(&dir, "junk.json", "{ not json");
        assert!(matches!(load_channel_file(&p), Err(Error::Parse { .. })));
        let missing = dir.path().join("missing.json");
        let err = load_channel_file(&missing).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("missing.json"));
    }

    #[test]
    fn small_row_drift_is_accepted_and_rescaled() {
        let f = ChannelFile {
            alphabets: Alphabets {
                x1: 1,
                x2: 1,
                y2: 1,
                y3: 2,
            },
            kernel: vec![vec![vec![vec![0.5, 0.5 + 5e-10]]]],
        };
        let spec = f.to_spec().unwrap();
        assert!((spec.row(0, 0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn export_roundtrip_of_primitive() {
        let dir = tempfile::tempdir().unwrap();
        let spec = make_channel(&ChannelRecipe::Primitive { p3: 0.1, r0: 1.0 }).unwrap();
        let p = dir.path().join("prim.json");
        save_channel_file(&spec, &p).unwrap();
        assert_eq!(load_channel_file(&p).unwrap(), spec);
    }
}
