//! On-disk cache of multiplication tables.
//!
//! Layout: magic "MIPK", version u16, order u32, then order^2 row-major u16
//! entries, everything little-endian. The layout has no field for generator
//! images, so the file name carries them: the first 16 hex digits of the
//! SHA-256 of the rendered presentation, then one decimal image per
//! generator, dash-separated, extension .mipk.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::groups::{realize, FiniteGroup, GroupError};
use crate::presentation::{render_word, Presentation};

pub const MAGIC: [u8; 4] = *b"MIPK";
pub const VERSION: u16 = 1;
/// Largest order the cache will store; matches the in-memory table limit.
pub const MAX_CACHED_ORDER: usize = 4096;

const HEADER_LEN: usize = 10;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported cache version {0}")]
    BadVersion(u16),
    #[error("cached order {0} out of range")]
    OrderOutOfRange(u64),
    #[error("expected {expected} bytes, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("entry at ({row}, {col}) is {value}, outside the group")]
    EntryOutOfRange { row: usize, col: usize, value: u16 },
    #[error("row {0} is not a permutation")]
    RowNotPermutation(usize),
    #[error("column {0} is not a permutation")]
    ColumnNotPermutation(usize),
    #[error("row or column of the identity is wrong")]
    BadIdentity,
    #[error("file name does not encode one image per generator")]
    BadFileName,
    #[error("generator image {0} is out of range")]
    ImageOutOfRange(usize),
    #[error("generator images do not generate the cached group")]
    DoesNotGenerate,
    #[error("cached table is not associative")]
    NotAssociative,
    #[error("cached group violates relation {0}")]
    RelationViolation(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A structurally validated table: a Latin square whose row and column at
/// index 0 are the identity. Group axioms beyond that are checked when a
/// group is rebuilt from it.
#[derive(Debug, Clone)]
pub struct CachedTable {
    order: usize,
    entries: Vec<u16>,
}

impl CachedTable {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mult(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.order + j] as usize
    }
}

pub fn encode(g: &FiniteGroup) -> Vec<u8> {
    let n = g.order();
    assert!(n <= MAX_CACHED_ORDER, "order {n} too large to cache");
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * n * n);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for i in 0..n {
        for j in 0..n {
            out.extend_from_slice(&(g.mult(i, j) as u16).to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<CachedTable, CacheError> {
    if bytes.len() < HEADER_LEN {
        return Err(CacheError::LengthMismatch { expected: HEADER_LEN, found: bytes.len() });
    }
    if bytes[..4] != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(CacheError::BadVersion(version));
    }
    let order = u32::from_le_bytes([bytes[6], bytes[7], bytes[8], bytes[9]]) as u64;
    if order == 0 || order > MAX_CACHED_ORDER as u64 {
        return Err(CacheError::OrderOutOfRange(order));
    }
    let n = order as usize;
    let expected = HEADER_LEN + 2 * n * n;
    if bytes.len() != expected {
        return Err(CacheError::LengthMismatch { expected, found: bytes.len() });
    }
    let entries: Vec<u16> = bytes[HEADER_LEN..]
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect();
    for (k, &v) in entries.iter().enumerate() {
        if (v as usize) >= n {
            return Err(CacheError::EntryOutOfRange { row: k / n, col: k % n, value: v });
        }
    }
    let mut seen = vec![false; n];
    for i in 0..n {
        seen.fill(false);
        for j in 0..n {
            if std::mem::replace(&mut seen[entries[i * n + j] as usize], true) {
                return Err(CacheError::RowNotPermutation(i));
            }
        }
    }
    for j in 0..n {
        seen.fill(false);
        for i in 0..n {
            if std::mem::replace(&mut seen[entries[i * n + j] as usize], true) {
                return Err(CacheError::ColumnNotPermutation(j));
            }
        }
    }
    for k in 0..n {
        if entries[k] as usize != k || entries[k * n] as usize != k {
            return Err(CacheError::BadIdentity);
        }
    }
    Ok(CachedTable { order: n, entries })
}

/// Rebuilds a group from a validated table and generator images. Checks that
/// the images generate and that the table is associative (Light's test over
/// the images suffices once every element is a product of them), so a file
/// that decodes but is not a group is rejected rather than trusted.
pub fn table_to_group(t: &CachedTable, images: &[usize]) -> Result<FiniteGroup, CacheError> {
    for &img in images {
        if img >= t.order {
            return Err(CacheError::ImageOutOfRange(img));
        }
    }
    let mut seen = vec![false; t.order];
    seen[0] = true;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &img in images {
            let y = t.mult(x, img);
            if !std::mem::replace(&mut seen[y], true) {
                queue.push(y);
            }
        }
    }
    if queue.len() != t.order {
        return Err(CacheError::DoesNotGenerate);
    }
    for &g in images {
        for a in 0..t.order {
            let ag = t.mult(a, g);
            for b in 0..t.order {
                if t.mult(ag, b) != t.mult(a, t.mult(g, b)) {
                    return Err(CacheError::NotAssociative);
                }
            }
        }
    }
    Ok(FiniteGroup::from_mult_fn(t.order, images.to_vec(), |i, j| t.mult(i, j)))
}

fn canonical_text(p: &Presentation) -> String {
    let gens: Vec<&str> = p.generators().iter().map(|g| g.name.as_str()).collect();
    let rels: Vec<String> = p
        .relations()
        .iter()
        .map(|r| format!("{}={}", render_word(p, &r.lhs), render_word(p, &r.rhs)))
        .collect();
    format!("<{}| {}>", gens.join(","), rels.join(", "))
}

fn hash_prefix(p: &Presentation) -> String {
    let digest = Sha256::digest(canonical_text(p).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_name(p: &Presentation, images: &[usize]) -> String {
    let imgs: Vec<String> = images.iter().map(|i| i.to_string()).collect();
    format!("{}-{}.mipk", hash_prefix(p), imgs.join("-"))
}

pub fn store(dir: &Path, p: &Presentation, g: &FiniteGroup) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file_name(p, g.gen_images()));
    fs::write(&path, encode(g))?;
    Ok(path)
}

/// Looks the presentation up in the cache directory. `Ok(None)` means a
/// clean miss; errors mean a candidate file exists but failed validation.
pub fn load(dir: &Path, p: &Presentation) -> Result<Option<FiniteGroup>, CacheError> {
    let prefix = format!("{}-", hash_prefix(p));
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(middle) = name.strip_prefix(&prefix).and_then(|s| s.strip_suffix(".mipk"))
        else {
            continue;
        };
        let images: Vec<usize> = middle
            .split('-')
            .map(|s| s.parse::<usize>().map_err(|_| CacheError::BadFileName))
            .collect::<Result<_, _>>()?;
        if images.len() != p.ngens() {
            return Err(CacheError::BadFileName);
        }
        let t = decode(&fs::read(entry.path())?)?;
        let g = table_to_group(&t, &images)?;
        for r in p.relations() {
            if g.eval_word(&r.lhs) != g.eval_word(&r.rhs) {
                return Err(CacheError::RelationViolation(format!(
                    "{}={}",
                    render_word(p, &r.lhs),
                    render_word(p, &r.rhs)
                )));
            }
        }
        return Ok(Some(g));
    }
    Ok(None)
}

/// Realizes through the cache when a directory is given: a valid cached
/// table is reused, anything else falls back to enumeration and the result
/// is stored best-effort (a miss must never fail the computation).
pub fn realize_with_cache(
    p: &Presentation,
    max_cosets: usize,
    dir: Option<&Path>,
) -> Result<FiniteGroup, GroupError> {
    let Some(dir) = dir else { return realize(p, max_cosets) };
    if let Ok(Some(g)) = load(dir, p) {
        return Ok(g);
    }
    let g = realize(p, max_cosets)?;
    if g.order() <= MAX_CACHED_ORDER {
        let _ = store(dir, p, &g);
    }
    Ok(g)
}
