//! Seeded token -> atomic hypervector map.
//!
//! Atomic vectors are a pure function of `(seed, backend, d, token)`:
//!
//! 1. The token is serialized (`0x01 | len:u64 LE | utf8` for strings,
//!    `0x02 | i64 LE` for integers).
//! 2. SHA-256 over `"molhd/codebook/v1\0" | seed:u64 LE | token bytes`
//!    gives a 32-byte key for a ChaCha20 stream ([`rand_chacha::ChaCha20Rng`]).
//! 3. Components are drawn from that stream with `next_u64`:
//!    - MAP: one word per 64 components, bit `i` set means `+1`, clear `-1`.
//!    - FHRR: phase `2 pi * (w >> 11) / 2^53` per component.
//!    - VTB: an `m x m` standard-normal matrix (Box-Muller on pairs of words),
//!      rows orthonormalized, then scaled by `1 / sqrt(m)` so that the vector
//!      has unit norm and its binding transform is orthogonal.
//!
//! This recipe is part of the trained-model file contract; changing it
//! invalidates stored memories.

use std::f64::consts::TAU;
use std::sync::Arc;

use dashmap::DashMap;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::{vtb, Backend, Hypervector, Space};

const DOMAIN: &[u8] = b"molhd/codebook/v1\0";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Str(String),
    Int(i64),
}

impl Token {
    fn write_bytes(&self, out: &mut Vec<u8>) {
        match self {
            Token::Str(s) => {
                out.push(0x01);
                out.extend_from_slice(&(s.len() as u64).to_le_bytes());
                out.extend_from_slice(s.as_bytes());
            }
            Token::Int(i) => {
                out.push(0x02);
                out.extend_from_slice(&i.to_le_bytes());
            }
        }
    }
}

impl From<&str> for Token {
    fn from(s: &str) -> Self {
        Token::Str(s.to_owned())
    }
}

impl From<String> for Token {
    fn from(s: String) -> Self {
        Token::Str(s)
    }
}

impl From<i64> for Token {
    fn from(i: i64) -> Self {
        Token::Int(i)
    }
}

/// Memoizing, thread-safe codebook.
#[derive(Debug)]
pub struct Codebook {
    space: Space,
    seed: u64,
    entries: DashMap<Token, Arc<Hypervector>>,
}

impl Codebook {
    pub fn new(space: Space, seed: u64) -> Self {
        Self {
            space,
            seed,
            entries: DashMap::new(),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of memoized tokens.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The atomic vector for `token`, generated on first request.
    pub fn get(&self, token: impl Into<Token>) -> Arc<Hypervector> {
        let token = token.into();
        if let Some(hv) = self.entries.get(&token) {
            return Arc::clone(hv.value());
        }
        let fresh = Arc::new(self.generate(&token));
        // Concurrent first access: whichever insert lands first is returned to everyone.
        Arc::clone(self.entries.entry(token).or_insert(fresh).value())
    }

    /// Generates the atomic vector for `token` without memoizing it.
    pub fn generate(&self, token: &Token) -> Hypervector {
        let mut rng = self.stream(token);
        let d = self.space.dimensions();
        match self.space.backend() {
            Backend::Map => {
                let mut out = Vec::with_capacity(d);
                while out.len() < d {
                    let word = rng.next_u64();
                    let take = (d - out.len()).min(64);
                    out.extend((0..take).map(|i| if word >> i & 1 == 1 { 1.0 } else { -1.0 }));
                }
                Hypervector::Map(out)
            }
            Backend::Fhrr => Hypervector::Fhrr(
                (0..d)
                    .map(|_| Complex64::from_polar(1.0, TAU * unit_interval(rng.next_u64())))
                    .collect(),
            ),
            Backend::Vtb => {
                let m = vtb::exact_sqrt(d).expect("VTB space is square");
                let mut a = Vec::with_capacity(d + 1);
                while a.len() < d {
                    let (z0, z1) = box_muller(&mut rng);
                    a.push(z0);
                    a.push(z1);
                }
                a.truncate(d);
                vtb::orthonormalize_rows(&mut a, m);
                let s = 1.0 / (m as f64).sqrt();
                a.iter_mut().for_each(|v| *v *= s);
                Hypervector::Vtb(a)
            }
        }
    }

    fn stream(&self, token: &Token) -> ChaCha20Rng {
        let mut material = Vec::with_capacity(64);
        material.extend_from_slice(DOMAIN);
        material.extend_from_slice(&self.seed.to_le_bytes());
        token.write_bytes(&mut material);
        let key: [u8; 32] = Sha256::digest(&material).into();
        ChaCha20Rng::from_seed(key)
    }
}

/// Uniform in [0, 1) from the top 53 bits.
fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(rng: &mut ChaCha20Rng) -> (f64, f64) {
    // (0, 1] keeps the logarithm finite.
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = unit_interval(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    (r * (TAU * u2).cos(), r * (TAU * u2).sin())
}
