//! Counter-style reproducible random streams.
//!
//! A stream is addressed by `(seed, stream_id)`. The pair is expanded with
//! SplitMix64 into a xoshiro256++ state, so the output of a stream depends on
//! nothing else: not on the thread that drives it, nor on which other streams
//! were drawn before it.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 generator, used only to expand seeds.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

/// xoshiro256++ keyed by `(seed, stream_id)`, with a Marsaglia polar normal
/// sampler on top.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    state: [u64; 4],
    spare_normal: Option<f64>,
}

impl RandomStream {
    /// The expander is seeded with `seed ^ splitmix(stream_id)`; for a fixed
    /// seed this is a bijection of the stream id, so distinct streams never
    /// share a starting state.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = SplitMix64::new(stream_id).next_u64();
        let mut expander = SplitMix64::new(seed ^ key);
        let mut state = [0u64; 4];
        for word in &mut state {
            *word = expander.next_u64();
        }
        if state == [0; 4] {
            state[0] = GOLDEN_GAMMA;
        }
        Self::from_state(seed, stream_id, state)
    }

    /// A stream with an explicit xoshiro state. The all-zero state is a fixed
    /// point of the generator and must not be used.
    pub fn from_state(seed: u64, stream_id: u64, state: [u64; 4]) -> Self {
        Self {
            seed,
            stream_id,
            state,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the Marsaglia polar method.
    ///
    /// Each accepted pair `(u, v)` with `0 < u² + v² < 1` yields two normals;
    /// the first is returned and the second is handed out by the next call.
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * m);
                return u * m;
            }
        }
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for z in out {
            *z = self.next_normal();
        }
    }
}
