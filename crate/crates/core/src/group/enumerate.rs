//! Canonical enumeration of SL_d(F_p) and its on-disk cache.
//!
//! Cache file layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SLEN"
//! 4       2     format version (1)
//! 6       2     d
//! 8       4     p
//! 12      8     count
//! 20      2·count·d²  entries, u16, matrix after matrix, row-major
//! ```

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use super::element::SlMatrix;
use super::field::{self, check_prime};
use crate::error::{Error, Result};

pub const DEFAULT_SL_CAP: u64 = 1_000_000;

const MAGIC: &[u8; 4] = b"SLEN";
const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 20;

/// |SL_d(F_p)| = p^{d(d−1)/2} · Π_{i=2..d} (p^i − 1).
pub fn sl_order(d: usize, p: u32) -> u128 {
    let p = p as u128;
    let mut order = p.pow((d * (d - 1) / 2) as u32);
    for i in 2..=d {
        order *= p.pow(i as u32) - 1;
    }
    order
}

/// All of SL_d(F_p), in row-major lexicographic order of the entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlEnumeration {
    p: u32,
    d: usize,
    /// `len() · d²` entries, matrix after matrix.
    entries: Vec<u32>,
}

impl SlEnumeration {
    /// Enumerates SL_d(F_p) by scanning all p^{d²} matrices.
    pub fn compute(d: usize, p: u32, cap: u64) -> Result<Self> {
        check_prime(p)?;
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        let count = sl_order(d, p);
        if count > cap as u128 {
            return Err(Error::EnumerationCap { d, p, count, cap });
        }
        let n2 = d * d;
        let mut entries = Vec::with_capacity(count as usize * n2);
        let mut current = vec![0u32; n2];
        loop {
            if field::det_mod(&current, d, p) == 1 % p {
                entries.extend_from_slice(&current);
            }
            // Odometer increment, last entry least significant.
            let mut pos = n2;
            loop {
                if pos == 0 {
                    debug_assert_eq!(entries.len() / n2, count as usize);
                    return Ok(SlEnumeration { p, d, entries });
                }
                pos -= 1;
                current[pos] += 1;
                if current[pos] < p {
                    break;
                }
                current[pos] = 0;
            }
        }
    }

    /// Loads the enumeration from `dir` if a valid cache file exists, otherwise computes it
    /// and writes the file.
    pub fn load_or_compute(d: usize, p: u32, cap: u64, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else {
            return Self::compute(d, p, cap);
        };
        let path = cache_path(dir, d, p);
        if path.exists() {
            match Self::read_file(&path) {
                Ok(e) if e.d == d && e.p == p && e.len() as u128 == sl_order(d, p) => return Ok(e),
                Ok(_) => log::warn!("{} does not match (d={d}, p={p}); recomputing", path.display()),
                Err(err) => log::warn!("ignoring unreadable cache {}: {err}", path.display()),
            }
        }
        let e = Self::compute(d, p, cap)?;
        if let Err(err) = e.write_file(&path) {
            log::warn!("could not write SL cache {}: {err}", path.display());
        }
        Ok(e)
    }

    /// Process-wide memoized enumeration.
    pub fn shared(d: usize, p: u32, cap: u64, dir: Option<&Path>) -> Result<Arc<Self>> {
        static MEMO: OnceLock<Mutex<HashMap<(usize, u32), Arc<SlEnumeration>>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        if let Some(e) = memo.lock().expect("memo lock").get(&(d, p)) {
            return Ok(Arc::clone(e));
        }
        let e = Arc::new(Self::load_or_compute(d, p, cap, dir)?);
        memo.lock().expect("memo lock").insert((d, p), Arc::clone(&e));
        Ok(e)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.entries.len() / (self.d * self.d)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn raw(&self, i: usize) -> &[u32] {
        let n2 = self.d * self.d;
        &self.entries[i * n2..(i + 1) * n2]
    }

    pub fn matrix(&self, i: usize) -> SlMatrix {
        SlMatrix::from_trusted(self.p, self.d, self.raw(i).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = SlMatrix> + '_ {
        (0..self.len()).map(|i| self.matrix(i))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 2 * self.entries.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.d as u16).to_le_bytes());
        out.extend_from_slice(&self.p.to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for &e in &self.entries {
            out.extend_from_slice(&(e as u16).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[0..4] != MAGIC {
            return Err(Error::CacheFormat("missing SLEN header".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::CacheFormat(format!("unsupported version {version}")));
        }
        let d = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
        let p = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
        let count = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
        check_prime(p).map_err(|_| Error::CacheFormat(format!("bad modulus {p}")))?;
        let n = count * d * d;
        if bytes.len() != HEADER_LEN + 2 * n {
            return Err(Error::CacheFormat(format!(
                "expected {} entry bytes, found {}",
                2 * n,
                bytes.len() - HEADER_LEN
            )));
        }
        let entries: Vec<u32> =
            bytes[HEADER_LEN..].chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as u32).collect();
        if entries.iter().any(|&e| e >= p) {
            return Err(Error::CacheFormat("entry not reduced mod p".into()));
        }
        Ok(SlEnumeration { p, d, entries })
    }

    fn read_file(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    fn write_file(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

pub fn cache_path(dir: &Path, d: usize, p: u32) -> PathBuf {
    dir.join(format!("sl_d{d}_p{p}.slen"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(d: usize, p: u32) -> usize {
        let n2 = d * d;
        let total = (p as usize).pow(n2 as u32);
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let mut m = vec![0u32; n2];
                for slot in m.iter_mut().rev() {
                    *slot = (c % p as usize) as u32;
                    c /= p as usize;
                }
                if d == 2 {
                    (m[0] as i64 * m[3] as i64 - m[1] as i64 * m[2] as i64).rem_euclid(p as i64) == 1 % p as i64
                } else {
                    field::det_mod(&m, d, p) == 1 % p
                }
            })
            .count()
    }

    #[test]
    fn counts_match_brute_force_and_formula() {
        for (d, p, expected) in [(2, 2, 6), (2, 3, 24), (2, 5, 120), (2, 7, 336)] {
            let e = SlEnumeration::compute(d, p, DEFAULT_SL_CAP).unwrap();
            assert_eq!(e.len(), expected);
            assert_eq!(brute_force_count(d, p), expected);
            assert_eq!(sl_order(d, p), expected as u128);
            assert_eq!(expected as u32, p * (p * p - 1));
        }
        assert_eq!(sl_order(3, 3), 5616);
        assert_eq!(SlEnumeration::compute(3, 2, DEFAULT_SL_CAP).unwrap().len(), 168);
    }

    #[test]
    fn order_is_lexicographic() {
        let e = SlEnumeration::compute(2, 3, DEFAULT_SL_CAP).unwrap();
        let mats: Vec<_> = e.iter().collect();
        assert!(mats.windows(2).all(|w| w[0].entries() < w[1].entries()));
        assert_eq!(mats[0].entries(), &[0, 1, 2, 0]);
    }

    #[test]
    fn cap_is_a_hard_error() {
        assert!(matches!(SlEnumeration::compute(2, 11, 100), Err(Error::EnumerationCap { count: 1320, .. })));
    }

    #[test]
    fn cache_roundtrip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let fresh = SlEnumeration::load_or_compute(2, 5, DEFAULT_SL_CAP, Some(dir.path())).unwrap();
        let path = cache_path(dir.path(), 2, 5);
        let bytes = fs::read(&path).unwrap();
        assert_eq!(&bytes[0..4], b"SLEN");
        assert_eq!(bytes.len(), HEADER_LEN + 2 * 120 * 4);
        let loaded = SlEnumeration::load_or_compute(2, 5, DEFAULT_SL_CAP, Some(dir.path())).unwrap();
        assert_eq!(fresh, loaded);
    }

    #[test]
    fn corrupt_cache_is_rejected_and_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let path = cache_path(dir.path(), 2, 3);
        fs::write(&path, b"SLEN garbage").unwrap();
        assert!(SlEnumeration::from_bytes(&fs::read(&path).unwrap()).is_err());
        let e = SlEnumeration::load_or_compute(2, 3, DEFAULT_SL_CAP, Some(dir.path())).unwrap();
        assert_eq!(e.len(), 24);
        assert_eq!(SlEnumeration::from_bytes(&fs::read(&path).unwrap()).unwrap(), e);
    }
}
