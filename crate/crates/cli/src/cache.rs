//! On-disk matrix dumps keyed by a fingerprint of the inputs and settings.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use famrec_core::simcore::{read_matrix, write_matrix, SimilarityMatrix};
use sha2::{Digest, Sha256};

const MANIFEST: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Serialized form of a matrix, as written to the cache.
pub fn matrix_bytes(m: &SimilarityMatrix) -> Vec<u8> {
    let mut buf = Vec::new();
    write_matrix(&mut buf, m).expect("writing to memory");
    buf
}

pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MatrixCache { dir: dir.into() }
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.frsm"))
    }

    /// The dumped matrices if the manifest matches `fingerprint` and every
    /// file still has its recorded digest.
    pub fn load(&self, fingerprint: &str) -> Option<Vec<(String, SimilarityMatrix)>> {
        let manifest = fs::read_to_string(self.dir.join(MANIFEST)).ok()?;
        let mut lines = manifest.lines();
        if lines.next()? != format!("fingerprint {fingerprint}") {
            return None;
        }
        let mut out = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let (Some("matrix"), Some(name), Some(digest), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return None;
            };
            let bytes = fs::read(self.file(name)).ok()?;
            if sha256_hex(&bytes) != digest {
                return None;
            }
            out.push((name.to_string(), read_matrix(bytes.as_slice()).ok()?));
        }
        Some(out)
    }

    pub fn store(&self, fingerprint: &str, matrices: &[(String, SimilarityMatrix)]) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut manifest = format!("fingerprint {fingerprint}\n");
        for (name, m) in matrices {
            let bytes = matrix_bytes(m);
            write_file(&self.file(name), &bytes)?;
            manifest.push_str(&format!("matrix {name} {}\n", sha256_hex(&bytes)));
        }
        write_file(&self.dir.join(MANIFEST), manifest.as_bytes())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write;
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(bytes)?;
    w.flush()
}
