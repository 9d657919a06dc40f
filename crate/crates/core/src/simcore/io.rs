//! Binary matrix dump: magic, tag, actor count, length-prefixed UTF-8 keys,
//! then the packed upper triangle as little-endian `f64` bit patterns.

use std::io::{Read, Write};
use std::sync::Arc;

use super::{packed_len, KeyIndex, SimTag, SimilarityMatrix};
use crate::error::{Error, Result};

const MAGIC: &[u8; 6] = b"FRSM\x00\x01";

fn bad(msg: impl Into<String>) -> Error {
    Error::BadMatrixFile(msg.into())
}

pub fn write_matrix(mut w: impl Write, m: &SimilarityMatrix) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    let tag = m.tag().as_str().as_bytes();
    w.write_all(&[tag.len() as u8])?;
    w.write_all(tag)?;
    w.write_all(&(m.len() as u64).to_le_bytes())?;
    for k in m.keys() {
        w.write_all(&(k.len() as u32).to_le_bytes())?;
        w.write_all(k.as_bytes())?;
    }
    for v in m.packed() {
        w.write_all(&v.to_bits().to_le_bytes())?;
    }
    w.flush()
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| bad(e.to_string()))?;
    Ok(buf)
}

pub fn read_matrix(mut r: impl Read) -> Result<SimilarityMatrix> {
    if &read_exact::<6>(&mut r)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let [tag_len] = read_exact::<1>(&mut r)?;
    let mut tag = vec![0u8; tag_len as usize];
    r.read_exact(&mut tag).map_err(|e| bad(e.to_string()))?;
    let tag: SimTag = std::str::from_utf8(&tag)
        .map_err(|_| bad("tag is not UTF-8"))?
        .parse()
        .map_err(|_| bad("unknown tag"))?;
    let n = u64::from_le_bytes(read_exact::<8>(&mut r)?) as usize;
    let mut keys = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let len = u32::from_le_bytes(read_exact::<4>(&mut r)?) as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf).map_err(|e| bad(e.to_string()))?;
        keys.push(String::from_utf8(buf).map_err(|_| bad("key is not UTF-8"))?);
    }
    let index = Arc::new(KeyIndex::new(keys).map_err(|_| bad("duplicate key"))?);
    let mut data = Vec::with_capacity(packed_len(n));
    for _ in 0..packed_len(n) {
        data.push(f64::from_bits(u64::from_le_bytes(read_exact::<8>(&mut r)?)));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(|e| bad(e.to_string()))? != 0 {
        return Err(bad("trailing bytes"));
    }
    SimilarityMatrix::from_packed(index, tag, data)
}
