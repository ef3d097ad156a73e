//! Trained-memory file (`.hdm`).
//!
//! All integers little-endian:
//!
//! ```text
//! magic       8 bytes  "MOLHDMEM"
//! version     u32      FORMAT_VERSION
//! backend     u8       vsa tag
//! d           u64
//! strategy    u8
//! threshold   f64
//! classes     u64      class count
//! mis_count   u64
//! mis_sum     f64
//! encoder     u8       encoder tag
//! keying      u8       keying tag
//! seed        u64      codebook seed
//! then per class, ascending label:
//!   label     i64
//!   vector    canonical hypervector serialization
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{AssociativeMemory, LearnError, MisStats, Strategy};
use crate::encode::{EncoderConfig, EncoderKind, NodeKeying};
use crate::vsa::{Backend, Hypervector, Space};

pub const MAGIC: &[u8; 8] = b"MOLHDMEM";
pub const FORMAT_VERSION: u32 = 1;

/// A trained memory plus what is needed to encode queries consistently.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub memory: AssociativeMemory,
    pub encoder: EncoderConfig,
    pub seed: u64,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], LearnError> {
        let out = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or_else(|| LearnError::Format(format!("truncated at byte {}", self.pos)))?;
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, LearnError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, LearnError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, LearnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64, LearnError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, LearnError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl Model {
    pub fn to_bytes(&self) -> Vec<u8> {
        let m = &self.memory;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(m.space.backend().tag());
        out.extend_from_slice(&(m.space.dimensions() as u64).to_le_bytes());
        out.push(m.strategy.tag());
        out.extend_from_slice(&m.threshold.to_le_bytes());
        out.extend_from_slice(&(m.classes.len() as u64).to_le_bytes());
        out.extend_from_slice(&m.mis_stats.count.to_le_bytes());
        out.extend_from_slice(&m.mis_stats.sum.to_le_bytes());
        out.push(self.encoder.kind.tag());
        out.push(self.encoder.keying.tag());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for (label, hv) in &m.classes {
            out.extend_from_slice(&label.to_le_bytes());
            hv.write_to(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LearnError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(LearnError::Format("not a molhd memory file".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(LearnError::Format(format!("unsupported format version {version}")));
        }
        let backend_tag = r.u8()?;
        let backend = Backend::from_tag(backend_tag)
            .ok_or_else(|| LearnError::Format(format!("unknown backend tag {backend_tag}")))?;
        let space = Space::new(backend, r.u64()? as usize)?;
        let strategy_tag = r.u8()?;
        let strategy = Strategy::from_tag(strategy_tag)
            .ok_or_else(|| LearnError::Format(format!("unknown strategy tag {strategy_tag}")))?;
        let threshold = r.f64()?;
        let class_count = r.u64()?;
        let mis_stats = MisStats {
            count: r.u64()?,
            sum: r.f64()?,
        };
        let encoder_tag = r.u8()?;
        let kind = EncoderKind::from_tag(encoder_tag)
            .ok_or_else(|| LearnError::Format(format!("unknown encoder tag {encoder_tag}")))?;
        let keying_tag = r.u8()?;
        let keying = NodeKeying::from_tag(keying_tag)
            .ok_or_else(|| LearnError::Format(format!("unknown keying tag {keying_tag}")))?;
        let seed = r.u64()?;

        let mut classes = BTreeMap::new();
        for _ in 0..class_count {
            let label = r.i64()?;
            let (hv, used) = Hypervector::read_from(&bytes[r.pos..])?;
            r.pos += used;
            if hv.backend() != backend || hv.dimensions() != space.dimensions() {
                return Err(LearnError::Format(format!(
                    "class {label} vector does not match the header space"
                )));
            }
            if classes.insert(label, hv).is_some() {
                return Err(LearnError::Format(format!("class {label} listed twice")));
            }
        }
        if r.pos != bytes.len() {
            return Err(LearnError::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let memory = AssociativeMemory::new(space, strategy, threshold)?;
        Ok(Model {
            memory: AssociativeMemory::from_parts(memory.space, strategy, threshold, classes, mis_stats),
            encoder: EncoderConfig { kind, keying },
            seed,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), LearnError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, LearnError> {
        Self::from_bytes(&fs::read(path)?)
    }
}
