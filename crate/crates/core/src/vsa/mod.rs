//! Hypervector spaces and the four HDC primitives.
//!
//! Three vector symbolic architectures share one [`Hypervector`] type:
//!
//! - **MAP**: real components, atomic vectors drawn from {-1, +1}; binding is
//!   the elementwise product.
//! - **FHRR**: complex phasors; binding adds phases (elementwise complex
//!   product), unbinding multiplies by the conjugate.
//! - **VTB**: real components with `d = m * m`; binding applies the `m x m`
//!   matrix reshaped from the second operand to every length-`m` block of the
//!   first operand.
//!
//! Bundling is plain elementwise addition for all three and the zero vector
//! is the empty bundle. Similarity is cosine (for FHRR: the real part of the
//! normalized Hermitian inner product).

mod codebook;
mod vtb;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use codebook::{Codebook, Token};

/// Smallest supported dimensionality.
pub const MIN_DIMENSIONS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VsaError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("backend mismatch: {left} vs {right}")]
    BackendMismatch { left: Backend, right: Backend },
    #[error("invalid dimensionality {d} for {backend}: {reason}")]
    InvalidDimension {
        d: usize,
        backend: Backend,
        reason: &'static str,
    },
    #[error("similarity is undefined for a zero-norm hypervector")]
    ZeroNorm,
    #[error("malformed hypervector encoding: {0}")]
    Decode(String),
}

/// Vector symbolic architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Map,
    Fhrr,
    Vtb,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Map, Backend::Fhrr, Backend::Vtb];

    /// One-byte tag used in the canonical serialization.
    pub fn tag(self) -> u8 {
        match self {
            Backend::Map => 1,
            Backend::Fhrr => 2,
            Backend::Vtb => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(Backend::Map),
            2 => Some(Backend::Fhrr),
            3 => Some(Backend::Vtb),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Map => "map",
            Backend::Fhrr => "fhrr",
            Backend::Vtb => "vtb",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "map" => Ok(Backend::Map),
            "fhrr" => Ok(Backend::Fhrr),
            "vtb" => Ok(Backend::Vtb),
            other => Err(format!("unknown VSA backend '{other}' (expected map, fhrr or vtb)")),
        }
    }
}

/// A validated (backend, dimensionality) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    backend: Backend,
    dimensions: usize,
}

impl Space {
    pub fn new(backend: Backend, dimensions: usize) -> Result<Self, VsaError> {
        if dimensions < MIN_DIMENSIONS {
            return Err(VsaError::InvalidDimension {
                d: dimensions,
                backend,
                reason: "at least 4 dimensions are required",
            });
        }
        if backend == Backend::Vtb && vtb::exact_sqrt(dimensions).is_none() {
            return Err(VsaError::InvalidDimension {
                d: dimensions,
                backend,
                reason: "VTB requires a perfect-square dimensionality",
            });
        }
        Ok(Self { backend, dimensions })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn dimensions(&self) -> usize {
        self.dimensions
    }
}

/// A point in a hyperspace.
#[derive(Clone, Debug, PartialEq)]
pub enum Hypervector {
    Map(Vec<f64>),
    Fhrr(Vec<Complex64>),
    Vtb(Vec<f64>),
}

impl Hypervector {
    /// The neutral element of bundling.
    pub fn zero(space: Space) -> Self {
        let d = space.dimensions();
        match space.backend() {
            Backend::Map => Hypervector::Map(vec![0.0; d]),
            Backend::Fhrr => Hypervector::Fhrr(vec![Complex64::new(0.0, 0.0); d]),
            Backend::Vtb => Hypervector::Vtb(vec![0.0; d]),
        }
    }

    /// The neutral element of binding.
    pub fn identity(space: Space) -> Self {
        let d = space.dimensions();
        match space.backend() {
            Backend::Map => Hypervector::Map(vec![1.0; d]),
            Backend::Fhrr => Hypervector::Fhrr(vec![Complex64::new(1.0, 0.0); d]),
            Backend::Vtb => Hypervector::Vtb(vtb::identity(d)),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Hypervector::Map(_) => Backend::Map,
            Hypervector::Fhrr(_) => Backend::Fhrr,
            Hypervector::Vtb(_) => Backend::Vtb,
        }
    }

    pub fn dimensions(&self) -> usize {
        match self {
            Hypervector::Map(v) | Hypervector::Vtb(v) => v.len(),
            Hypervector::Fhrr(v) => v.len(),
        }
    }

    fn check_compatible(&self, other: &Hypervector) -> Result<(), VsaError> {
        if self.backend() != other.backend() {
            return Err(VsaError::BackendMismatch {
                left: self.backend(),
                right: other.backend(),
            });
        }
        if self.dimensions() != other.dimensions() {
            return Err(VsaError::DimensionMismatch {
                left: self.dimensions(),
                right: other.dimensions(),
            });
        }
        Ok(())
    }

    /// Binds `self` with `other`. For VTB, `other` supplies the transform.
    pub fn bind(&self, other: &Hypervector) -> Result<Hypervector, VsaError> {
        let mut out = self.clone();
        out.bind_assign(other)?;
        Ok(out)
    }

    /// In-place [`bind`](Self::bind).
    pub fn bind_assign(&mut self, other: &Hypervector) -> Result<(), VsaError> {
        self.check_compatible(other)?;
        match (self, other) {
            (Hypervector::Map(a), Hypervector::Map(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x *= y);
            }
            (Hypervector::Fhrr(a), Hypervector::Fhrr(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x *= y);
            }
            (Hypervector::Vtb(a), Hypervector::Vtb(b)) => {
                *a = vtb::bind(a, b, false);
            }
            _ => unreachable!("compatibility checked above"),
        }
        Ok(())
    }

    /// Inverse of [`bind`](Self::bind): recovers `x` from `bind(x, b)`.
    ///
    /// Exact for MAP and for FHRR binders of unit modulus; for VTB the
    /// transpose of the binding transform is applied, which is exact only
    /// when that transform is orthogonal.
    pub fn unbind(&self, other: &Hypervector) -> Result<Hypervector, VsaError> {
        self.check_compatible(other)?;
        Ok(match (self, other) {
            (Hypervector::Map(a), Hypervector::Map(b)) => {
                Hypervector::Map(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (Hypervector::Fhrr(a), Hypervector::Fhrr(b)) => {
                Hypervector::Fhrr(a.iter().zip(b).map(|(x, y)| x * y.conj()).collect())
            }
            (Hypervector::Vtb(a), Hypervector::Vtb(b)) => Hypervector::Vtb(vtb::bind(a, b, true)),
            _ => unreachable!("compatibility checked above"),
        })
    }

    /// Superposition (elementwise sum).
    pub fn bundle(&self, other: &Hypervector) -> Result<Hypervector, VsaError> {
        let mut out = self.clone();
        out.add_scaled(other, 1.0)?;
        Ok(out)
    }

    /// `self += weight * other`; the accumulator update used by the learner.
    pub fn add_scaled(&mut self, other: &Hypervector, weight: f64) -> Result<(), VsaError> {
        self.check_compatible(other)?;
        match (self, other) {
            (Hypervector::Map(a), Hypervector::Map(b)) | (Hypervector::Vtb(a), Hypervector::Vtb(b)) => {
                if weight == 1.0 {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                } else {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += weight * y);
                }
            }
            (Hypervector::Fhrr(a), Hypervector::Fhrr(b)) => {
                if weight == 1.0 {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                } else {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y * weight);
                }
            }
            _ => unreachable!("compatibility checked above"),
        }
        Ok(())
    }

    /// Additive inverse.
    pub fn negate(&self) -> Hypervector {
        self.scale(-1.0)
    }

    pub fn scale(&self, factor: f64) -> Hypervector {
        match self {
            Hypervector::Map(v) => Hypervector::Map(v.iter().map(|x| x * factor).collect()),
            Hypervector::Vtb(v) => Hypervector::Vtb(v.iter().map(|x| x * factor).collect()),
            Hypervector::Fhrr(v) => Hypervector::Fhrr(v.iter().map(|x| x * factor).collect()),
        }
    }

    /// Cyclic rotation: component `i` moves to `i + shift (mod d)`.
    pub fn permute(&self, shift: i64) -> Hypervector {
        let d = self.dimensions() as i64;
        let k = shift.rem_euclid(d) as usize;
        match self {
            Hypervector::Map(v) => {
                let mut out = v.clone();
                out.rotate_right(k);
                Hypervector::Map(out)
            }
            Hypervector::Vtb(v) => {
                let mut out = v.clone();
                out.rotate_right(k);
                Hypervector::Vtb(out)
            }
            Hypervector::Fhrr(v) => {
                let mut out = v.clone();
                out.rotate_right(k);
                Hypervector::Fhrr(out)
            }
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Hypervector::Map(v) | Hypervector::Vtb(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Hypervector::Fhrr(v) => v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Hypervector::Map(v) | Hypervector::Vtb(v) => v.iter().all(|x| *x == 0.0),
            Hypervector::Fhrr(v) => v.iter().all(|x| x.re == 0.0 && x.im == 0.0),
        }
    }

    /// Real part of the inner product (Hermitian for FHRR).
    pub fn dot(&self, other: &Hypervector) -> Result<f64, VsaError> {
        self.check_compatible(other)?;
        Ok(match (self, other) {
            (Hypervector::Map(a), Hypervector::Map(b)) | (Hypervector::Vtb(a), Hypervector::Vtb(b)) => {
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            }
            (Hypervector::Fhrr(a), Hypervector::Fhrr(b)) => {
                a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
            }
            _ => unreachable!("compatibility checked above"),
        })
    }

    /// Cosine similarity in [-1, 1].
    pub fn similarity(&self, other: &Hypervector) -> Result<f64, VsaError> {
        let dot = self.dot(other)?;
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return Err(VsaError::ZeroNorm);
        }
        Ok((dot / denom).clamp(-1.0, 1.0))
    }

    /// Components as `f64`s in serialization order (FHRR interleaves re, im).
    pub fn flat_components(&self) -> Vec<f64> {
        match self {
            Hypervector::Map(v) | Hypervector::Vtb(v) => v.clone(),
            Hypervector::Fhrr(v) => v.iter().flat_map(|c| [c.re, c.im]).collect(),
        }
    }

    /// Canonical serialization: backend tag (1 byte), `d` (u64 LE), then the
    /// components as little-endian f64.
    pub fn to_bytes(&self) -> Vec<u8> {
        let flat = self.flat_components();
        let mut out = Vec::with_capacity(9 + flat.len() * 8);
        self.write_to(&mut out);
        out
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.push(self.backend().tag());
        out.extend_from_slice(&(self.dimensions() as u64).to_le_bytes());
        for x in self.flat_components() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }

    /// Decodes one canonical hypervector from the front of `bytes`,
    /// returning it with the number of bytes consumed.
    pub fn read_from(bytes: &[u8]) -> Result<(Hypervector, usize), VsaError> {
        if bytes.len() < 9 {
            return Err(VsaError::Decode("truncated header".into()));
        }
        let backend = Backend::from_tag(bytes[0])
            .ok_or_else(|| VsaError::Decode(format!("unknown backend tag {}", bytes[0])))?;
        let d = u64::from_le_bytes(bytes[1..9].try_into().unwrap()) as usize;
        let per = if backend == Backend::Fhrr { 2 } else { 1 };
        let n = d
            .checked_mul(per * 8)
            .ok_or_else(|| VsaError::Decode("dimension overflow".into()))?;
        let body = bytes
            .get(9..9 + n)
            .ok_or_else(|| VsaError::Decode(format!("expected {n} component bytes")))?;
        let flat: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let hv = match backend {
            Backend::Map => Hypervector::Map(flat),
            Backend::Vtb => Hypervector::Vtb(flat),
            Backend::Fhrr => Hypervector::Fhrr(
                flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
            ),
        };
        Ok((hv, 9 + n))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Hypervector, VsaError> {
        let (hv, used) = Self::read_from(bytes)?;
        if used != bytes.len() {
            return Err(VsaError::Decode(format!("{} trailing bytes", bytes.len() - used)));
        }
        Ok(hv)
    }
}
