//! Seed derivation and the two generator families used by the engine.
//!
//! Sequential streams (walk increments, Lévy increments, bootstrap draws) are
//! ChaCha8 generators whose 256-bit seed is derived from the master seed, a
//! stream domain and up to two indices (replica, copy). Scenery values are
//! produced by a counter-based Philox4x32-10 generator keyed on
//! (master seed, replica, copy) with the site as part of the counter, so a
//! site's value never depends on the order in which sites are visited.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator type for sequential per-replica streams.
pub type SimRng = ChaCha8Rng;

/// Stream domains. Every generator in the engine is tagged with one of these so
/// that different kinds of randomness never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Walk = 1,
    Scenery = 2,
    Levy = 3,
    LevyScenery = 4,
    Oracle = 5,
    Bootstrap = 6,
    Sweep = 7,
    Direct = 8,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes an ordered tuple of words into a single 64-bit value.
pub fn mix_words(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C909, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Derives a child master seed, e.g. for independent sample sets of one experiment.
pub fn child_seed(master: u64, tag: u64) -> u64 {
    mix_words(&[master, 0xC41D, tag])
}

fn derive_seed(parts: &[u64]) -> [u8; 32] {
    let mut seed = [0u8; 32];
    let mut state = mix_words(parts);
    for chunk in seed.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    seed
}

/// Sequential generator for `(master, stream, replica, copy)`.
pub fn stream_rng(master: u64, stream: Stream, replica: u64, copy: u64) -> SimRng {
    SimRng::from_seed(derive_seed(&[master, stream as u64, replica, copy]))
}

/// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

/// The Philox4x32 bijection with 10 rounds.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0];
    }
    ctr
}

/// Keyed counter-based stream for one integer site.
///
/// The 128-bit counter is `(site_lo, site_hi, domain, draw)`; successive
/// blocks increment `draw`. Two streams with the same key and site are
/// identical regardless of when they are created.
#[derive(Debug, Clone)]
pub struct SiteStream {
    key: [u32; 2],
    site: u64,
    draw: u32,
    buf: [u32; 4],
    used: usize,
}

/// Folds a signed site onto the naturals: 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...
#[inline]
pub fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

const SITE_DOMAIN: u32 = 0x5CE7_E1A7;

impl SiteStream {
    pub fn new(key: u64, site: i64) -> Self {
        Self {
            key: [key as u32, (key >> 32) as u32],
            site: zigzag(site),
            draw: 0,
            buf: [0; 4],
            used: 4,
        }
    }

    fn refill(&mut self) {
        let ctr = [
            self.site as u32,
            (self.site >> 32) as u32,
            SITE_DOMAIN,
            self.draw,
        ];
        self.buf = philox4x32_10(ctr, self.key);
        self.draw = self.draw.wrapping_add(1);
        self.used = 0;
    }
}

impl RngCore for SiteStream {
    fn next_u32(&mut self) -> u32 {
        if self.used >= 4 {
            self.refill();
        }
        let v = self.buf[self.used];
        self.used += 1;
        v
    }

    fn next_u64(&mut self) -> u64 {
        if self.used > 2 {
            self.refill();
        }
        let lo = self.buf[self.used] as u64;
        let hi = self.buf[self.used + 1] as u64;
        self.used += 2;
        lo | (hi << 32)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(4) {
            let bytes = self.next_u32().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
