/// Counter-based 64-bit stream. The whole state is two words, so it
/// serializes trivially and replays exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamRng {
    key: u64,
    counter: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        StreamRng {
            key: mix(seed ^ 0x6A09_E667_F3BC_C908),
            counter: 0,
        }
    }

    pub(crate) fn from_parts(key: u64, counter: u64) -> Self {
        StreamRng { key, counter }
    }

    pub(crate) fn parts(&self) -> (u64, u64) {
        (self.key, self.counter)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform integer in `0..n`. `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Independent child stream; does not advance `self`.
    pub fn split(&self, stream: u64) -> StreamRng {
        StreamRng::new(mix(self.key ^ mix(stream.wrapping_add(self.counter))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = StreamRng::new(7);
        let mut b = StreamRng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(StreamRng::new(7).next_u64(), StreamRng::new(8).next_u64());
    }

    #[test]
    fn below_is_roughly_uniform() {
        let mut r = StreamRng::new(1);
        let mut counts = [0u32; 5];
        for _ in 0..50_000 {
            counts[r.below(5) as usize] += 1;
        }
        for c in counts {
            assert!((9_000..11_000).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn split_does_not_advance_parent() {
        let r = StreamRng::new(3);
        let before = r.parts();
        let _child = r.split(1);
        assert_eq!(r.parts(), before);
        assert_ne!(r.split(1).parts(), r.split(2).parts());
    }
}
