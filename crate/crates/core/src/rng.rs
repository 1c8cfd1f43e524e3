//! Seeded, hierarchically addressed random streams.
//!
//! A stream is named by a master seed and a path of indices. The generator
//! state is a pure function of that name, so `substream(i)` gives the same
//! output no matter how much of the parent has been consumed or in what
//! order parallel work is scheduled.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    path: Vec<u64>,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_key(seed: u64, path: &[u64]) -> [u8; 32] {
    let mut h = splitmix64(seed);
    for (depth, &idx) in path.iter().enumerate() {
        h = splitmix64(h ^ splitmix64(idx ^ ((depth as u64 + 1) << 56)));
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        h = splitmix64(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    key
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::at(seed, Vec::new())
    }

    fn at(seed: u64, path: Vec<u64>) -> Self {
        let inner = ChaCha8Rng::from_seed(derive_key(seed, &path));
        RngStream { seed, path, inner }
    }

    /// Child stream `index`, independent of this stream's consumed state.
    pub fn substream(&self, index: u64) -> RngStream {
        let mut path = self.path.clone();
        path.push(index);
        Self::at(self.seed, path)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn open01(&mut self) -> f64 {
        self.inner.sample(Open01)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(rng: &mut RngStream, k: usize) -> Vec<u64> {
        (0..k).map(|_| rng.next_u64()).collect()
    }

    #[test]
    fn same_name_same_sequence() {
        let a = draws(&mut RngStream::new(7).substream(3), 16);
        let b = draws(&mut RngStream::new(7).substream(3), 16);
        assert_eq!(a, b);
        assert_ne!(a, draws(&mut RngStream::new(7).substream(4), 16));
        assert_ne!(a, draws(&mut RngStream::new(8).substream(3), 16));
    }

    #[test]
    fn substream_ignores_parent_consumption() {
        let mut parent = RngStream::new(1);
        let before = draws(&mut parent.substream(0), 4);
        draws(&mut parent, 100);
        assert_eq!(before, draws(&mut parent.substream(0), 4));
    }

    #[test]
    fn paths_do_not_collide_across_depths() {
        let root = RngStream::new(0);
        let a = draws(&mut root.substream(0), 4);
        let b = draws(&mut root.substream(0).substream(0), 4);
        let c = draws(&mut root.clone(), 4);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
    }

    #[test]
    fn open_unit_interval() {
        let mut rng = RngStream::new(5);
        for _ in 0..10_000 {
            let u = rng.open01();
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
