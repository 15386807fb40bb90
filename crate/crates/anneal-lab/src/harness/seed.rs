//! Stable 64-bit seed derivation. Every RNG in an experiment is seeded from
//! the master seed plus a label path, so results do not depend on worker
//! count or scheduling order.

/// splitmix64 finalizer; the fixed mixing primitive behind every derived
/// seed. Published constants, stable across platforms.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Builder-style hash over labeled fields:
/// `SeedMixer::new(master).str("gauge").str(id).u64(g).finish()`.
#[derive(Debug, Clone, Copy)]
pub struct SeedMixer(u64);

impl SeedMixer {
    pub fn new(master: u64) -> Self {
        SeedMixer(mix(master))
    }

    pub fn u64(self, v: u64) -> Self {
        SeedMixer(mix(self.0 ^ v))
    }

    /// Absorb UTF-8 bytes in 8-byte little-endian chunks, then the length,
    /// so "ab" + "c" and "a" + "bc" land on different seeds.
    pub fn str(self, s: &str) -> Self {
        let mut m = self;
        for chunk in s.as_bytes().chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            m = m.u64(u64::from_le_bytes(buf));
        }
        m.u64(s.len() as u64)
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}
