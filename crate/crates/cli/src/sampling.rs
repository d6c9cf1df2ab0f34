//! Seeded random choices: sample points and spectral seeds.

use oae_core::rational::rat;
use oae_core::spectral::Seeds;
use oae_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// `p/q` with `|p| ≤ 6`, `1 ≤ q ≤ 4`.
    pub fn rational(&mut self) -> Rational {
        rat(self.rng.gen_range(-6..=6), self.rng.gen_range(1..=4))
    }

    pub fn point(&mut self, dim: usize) -> Vec<Rational> {
        (0..dim).map(|_| self.rational()).collect()
    }

    /// `count` distinct points: the small integer lattice first, then random
    /// rationals.
    pub fn points(&mut self, dim: usize, count: usize) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = Vec::with_capacity(count);
        let lattice = 3usize.pow(dim.min(6) as u32);
        for i in 0..lattice.min(count / 2) {
            let mut j = i;
            out.push(
                (0..dim)
                    .map(|_| {
                        let v = (j % 3) as i64 - 1;
                        j /= 3;
                        rat(v, 1)
                    })
                    .collect(),
            );
        }
        while out.len() < count {
            let p = self.point(dim);
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Random `h`, `b` and `d` for every level up to `order`.
    pub fn seeds(&mut self, dim: usize, order: usize) -> Seeds {
        let mut s = Seeds::zero(dim, order);
        for j in 0..=order {
            s.h[j] = self.point(dim);
            s.d[j] = self.point(dim);
            s.b[j] = self.rational();
        }
        s
    }
}
