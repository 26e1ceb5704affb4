//! Digitally-shifted Sobol sequence for up to 13 dimensions, built from
//! the classic direction-number table (degree <= 5 primitive polynomials).
//! Gray-code stepping keeps point generation O(dims) per point.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dimensions the direction-number table covers; beyond this callers fall
/// back to plain seeded-uniform sampling.
pub const MAX_DIMS: usize = 13;

const BITS: usize = 32;

/// (s, a, m) rows for dimensions 2..=13: polynomial degree, coefficient
/// bits, initial odd direction integers.
const TABLE: [(u32, u32, &[u32]); 12] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
];

fn direction_numbers(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = 1 << (BITS - 1 - i);
        }
        return v;
    }
    let (s, a, m) = TABLE[dim - 1];
    let s = s as usize;
    for i in 0..BITS {
        if i < s {
            v[i] = m[i] << (BITS - 1 - i);
        } else {
            let mut value = v[i - s] ^ (v[i - s] >> s);
            for k in 1..s {
                if (a >> (s - 1 - k)) & 1 == 1 {
                    value ^= v[i - k];
                }
            }
            v[i] = value;
        }
    }
    v
}

/// Sequential Sobol point generator with a per-dimension digital shift
/// drawn from the seed. Points lie strictly inside the unit cube.
pub struct SobolSequence {
    v: Vec<[u32; BITS]>,
    state: Vec<u32>,
    shift: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    /// `dims` must be at most [`MAX_DIMS`].
    pub fn new(dims: usize, seed: u64) -> SobolSequence {
        assert!(dims <= MAX_DIMS, "Sobol table covers {MAX_DIMS} dims, asked for {dims}");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dims).map(|_| rng.gen::<u32>()).collect();
        SobolSequence {
            v: (0..dims).map(direction_numbers).collect(),
            state: vec![0; dims],
            shift,
            index: 0,
        }
    }

    pub fn next_point(&mut self, out: &mut [f64]) {
        assert_eq!(out.len(), self.state.len());
        if self.index > 0 {
            // Gray-code step: flip along the lowest zero bit of n-1.
            let c = (self.index - 1).trailing_ones() as usize;
            debug_assert!(c < BITS, "sequence exhausted 2^32 points");
            for (d, x) in self.state.iter_mut().enumerate() {
                *x ^= self.v[d][c];
            }
        }
        self.index += 1;
        for (d, slot) in out.iter_mut().enumerate() {
            let bits = self.state[d] ^ self.shift[d];
            *slot = (bits as f64 + 0.5) / (1u64 << BITS) as f64;
        }
    }

    pub fn take(&mut self, n: usize) -> Vec<Vec<f64>> {
        let dims = self.state.len();
        (0..n)
            .map(|_| {
                let mut p = vec![0.0; dims];
                self.next_point(&mut p);
                p
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let (ma, mb) = (mean(a), mean(b));
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for (x, y) in a.iter().zip(b.iter()) {
            cov += (x - ma) * (y - mb);
            va += (x - ma).powi(2);
            vb += (y - mb).powi(2);
        }
        cov / (va.sqrt() * vb.sqrt())
    }

    #[test]
    fn points_stay_inside_the_open_unit_cube() {
        let mut seq = SobolSequence::new(MAX_DIMS, 1);
        for p in seq.take(4096) {
            for x in p {
                assert!(x > 0.0 && x < 1.0);
            }
        }
    }

    #[test]
    fn marginals_are_stratified() {
        let n = 1024;
        let mut seq = SobolSequence::new(MAX_DIMS, 9);
        let points = seq.take(n);
        for d in 0..MAX_DIMS {
            let column: Vec<f64> = points.iter().map(|p| p[d]).collect();
            let err = (mean(&column) - 0.5).abs();
            assert!(err < 3.0 / (n as f64).sqrt(), "dim {d}: mean off by {err}");
        }
    }

    #[test]
    fn pairwise_correlations_are_negligible() {
        let n = 4096;
        let mut seq = SobolSequence::new(MAX_DIMS, 17);
        let points = seq.take(n);
        for i in 0..MAX_DIMS {
            for j in (i + 1)..MAX_DIMS {
                let a: Vec<f64> = points.iter().map(|p| p[i]).collect();
                let b: Vec<f64> = points.iter().map(|p| p[j]).collect();
                let r = pearson(&a, &b).abs();
                assert!(r < 0.05, "dims ({i},{j}): |corr| = {r}");
            }
        }
    }

    #[test]
    fn unshifted_prefix_matches_the_classic_sequence() {
        // With the shift removed, the first dimensions follow the known
        // van der Corput / Sobol pattern 0.5, 0.75, 0.25, ...
        let mut seq = SobolSequence::new(2, 0);
        for s in seq.shift.iter_mut() {
            *s = 0;
        }
        let pts = seq.take(4);
        let eps = 0.5 / (1u64 << BITS) as f64;
        let expected = [[0.0, 0.0], [0.5, 0.5], [0.75, 0.25], [0.25, 0.75]];
        for (p, e) in pts.iter().zip(expected.iter()) {
            for (x, y) in p.iter().zip(e.iter()) {
                assert!((x - (y + eps)).abs() < 1e-12, "{pts:?}");
            }
        }
    }

    #[test]
    fn same_seed_reproduces_and_seeds_differ() {
        let a = SobolSequence::new(5, 42).take(16);
        let b = SobolSequence::new(5, 42).take(16);
        let c = SobolSequence::new(5, 43).take(16);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn low_discrepancy_beats_iid_on_box_counts() {
        // Count points in [0, 0.5)^2 over the first 2048 points; the Sobol
        // net keeps the count within a handful of the exact quarter.
        let n = 2048;
        let mut seq = SobolSequence::new(2, 5);
        let hits = seq
            .take(n)
            .iter()
            .filter(|p| p[0] < 0.5 && p[1] < 0.5)
            .count() as f64;
        let err = (hits / n as f64 - 0.25).abs();
        assert!(err < 0.01, "box count off by {err}");
    }
}
