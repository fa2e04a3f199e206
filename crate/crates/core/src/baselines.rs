//! Classical reference points: the extended Hamming (8,4) code with BPSK,
//! maximum-likelihood decoding over arbitrary codebooks, and the union bound
//! built from the Gaussian Q-function.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView1};

use crate::channel::ebn0_to_sigma2;
use crate::message::to_bits;
use crate::models::Codebook;
use crate::{Error, Result};

/// Binary linear block code given by its generator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBlockCode {
    k: usize,
    n: usize,
    generator: Vec<Vec<u8>>,
    weight_enumerator: BTreeMap<usize, usize>,
}

impl LinearBlockCode {
    pub fn new(generator: Vec<Vec<u8>>) -> Result<Self> {
        let k = generator.len();
        if k == 0 || k > 20 {
            return Err(Error::config("generator must have 1..=20 rows"));
        }
        let n = generator[0].len();
        if generator.iter().any(|r| r.len() != n || r.iter().any(|&b| b > 1)) {
            return Err(Error::config("generator rows must be binary and of equal length"));
        }
        if gf2_rank(&generator) != k {
            return Err(Error::config("generator rows are linearly dependent over GF(2)"));
        }
        let mut code = Self {
            k,
            n,
            generator,
            weight_enumerator: BTreeMap::new(),
        };
        for m in 0..(1usize << k) {
            let w = code.encode(m).iter().filter(|&&b| b == 1).count();
            *code.weight_enumerator.entry(w).or_insert(0) += 1;
        }
        Ok(code)
    }

    /// Extended Hamming [8,4,4]: `G = [I₄ | P]`, P rows 0111, 1011, 1101, 1110.
    pub fn extended_hamming_84() -> Self {
        let parity = [[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]];
        let generator = (0..4)
            .map(|i| {
                let mut row = vec![0u8; 8];
                row[i] = 1;
                row[4..].copy_from_slice(&parity[i]);
                row
            })
            .collect();
        Self::new(generator).expect("extended Hamming generator is valid")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generator(&self) -> &[Vec<u8>] {
        &self.generator
    }

    pub fn weight_enumerator(&self) -> &BTreeMap<usize, usize> {
        &self.weight_enumerator
    }

    /// Codeword bits for message index `m` (big-endian message bits).
    pub fn encode(&self, m: usize) -> Vec<u8> {
        let bits = to_bits(m, self.k);
        let mut word = vec![0u8; self.n];
        for (bit, row) in bits.iter().zip(&self.generator) {
            if *bit == 1 {
                for (w, g) in word.iter_mut().zip(row) {
                    *w ^= g;
                }
            }
        }
        word
    }

    /// BPSK image of the code (bit `b` ↦ `1 − 2b`), one row per message.
    pub fn bpsk_codebook(&self) -> Codebook {
        let count = 1usize << self.k;
        let mut rows = Array2::zeros((count, self.n));
        for m in 0..count {
            for (d, b) in self.encode(m).into_iter().enumerate() {
                rows[[m, d]] = 1.0 - 2.0 * f64::from(b);
            }
        }
        Codebook::new(self.k, rows).expect("row count is 2^k")
    }
}

fn gf2_rank(rows: &[Vec<u8>]) -> usize {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] == 1) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && m[r][c] == 1 {
                let pivot_row = m[rank].clone();
                for (x, p) in m[r].iter_mut().zip(pivot_row) {
                    *x ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The 16 × 8 BPSK codebook of the extended Hamming (8,4) code.
pub fn hamming84_codebook() -> Codebook {
    LinearBlockCode::extended_hamming_84().bpsk_codebook()
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest codeword in Euclidean distance; ties go to the lowest index.
/// `sigma2` does not affect the decision.
pub fn ml_decode(y: ArrayView1<f64>, codebook: &Codebook, _sigma2: f64) -> usize {
    nearest_row(y, codebook.rows())
}

pub(crate) fn nearest_row(y: ArrayView1<f64>, rows: &Array2<f64>) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, row) in rows.rows().into_iter().enumerate() {
        let d = squared_distance(y, row);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Gaussian tail `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `(1/2^k)·Σᵢ Σ_{j≠i} Q(‖zᵢ−zⱼ‖ / 2σ)` at each Eb/N0 of the grid.
pub fn classical_union_bound(codebook: &Codebook, ebn0_grid: &[f64], rate: f64) -> Result<Vec<f64>> {
    if ebn0_grid.is_empty() {
        return Err(Error::config("Eb/N0 grid is empty"));
    }
    let rows = codebook.rows();
    let m = rows.nrows();
    let mut distances = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            distances.push(squared_distance(rows.row(i), rows.row(j)).sqrt());
        }
    }
    ebn0_grid
        .iter()
        .map(|&e| {
            let sigma = ebn0_to_sigma2(e, rate)?.sqrt();
            // each unordered pair counted for both i and j
            let total: f64 = distances.iter().map(|d| 2.0 * q_function(d / (2.0 * sigma))).sum();
            Ok(total / m as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::standard_normal;
    use ndarray::Array1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_message_maps_to_all_plus_one() {
        let c = hamming84_codebook();
        assert!(c.rows().row(0).iter().all(|&v| v == 1.0));
        assert_eq!((c.len(), c.n()), (16, 8));
    }

    #[test]
    fn weight_enumerator_by_exhaustion() {
        let code = LinearBlockCode::extended_hamming_84();
        // independent enumeration from the generator
        let mut counts = BTreeMap::new();
        for m in 0..16usize {
            let mut word = [0u8; 8];
            for i in 0..4 {
                if (m >> (3 - i)) & 1 == 1 {
                    for d in 0..8 {
                        word[d] ^= code.generator()[i][d];
                    }
                }
            }
            *counts.entry(word.iter().map(|&b| b as usize).sum::<usize>()).or_insert(0) += 1;
        }
        assert_eq!(counts, BTreeMap::from([(0, 1), (4, 14), (8, 1)]));
        assert_eq!(code.weight_enumerator(), &counts);
    }

    #[test]
    fn bpsk_rows_have_full_energy_and_min_distance_sixteen() {
        let c = hamming84_codebook();
        for row in c.rows().rows() {
            assert_eq!(row.dot(&row), 8.0);
        }
        let mut min = f64::INFINITY;
        for i in 0..16 {
            for j in (i + 1)..16 {
                min = min.min(squared_distance(c.rows().row(i), c.rows().row(j)));
            }
        }
        assert_eq!(min, 16.0);
    }

    #[test]
    fn dependent_generator_rejected() {
        assert!(LinearBlockCode::new(vec![vec![1, 1, 0], vec![1, 1, 0]]).is_err());
        assert!(LinearBlockCode::new(vec![vec![1, 2, 0]]).is_err());
    }

    #[test]
    fn ml_decode_exact_and_ties() {
        let c = hamming84_codebook();
        assert_eq!(ml_decode(c.rows().row(7), &c, 1.0), 7);

        let mut rows = Array2::zeros((4, 2));
        rows[[2, 0]] = 1.0;
        rows[[3, 0]] = -1.0;
        rows[[0, 1]] = 5.0;
        rows[[1, 1]] = 6.0;
        let book = Codebook::new(2, rows).unwrap();
        // equidistant from rows 2 and 3
        assert_eq!(ml_decode(Array1::from(vec![0.0, 0.0]).view(), &book, 1.0), 2);
    }

    #[test]
    fn ml_decode_tie_between_rows_two_and_nine() {
        let mut rows = Array2::from_elem((16, 2), 100.0);
        for i in 0..16 {
            rows[[i, 1]] = 100.0 + i as f64;
        }
        rows.row_mut(2).assign(&Array1::from(vec![1.0, 0.0]));
        rows.row_mut(9).assign(&Array1::from(vec![-1.0, 0.0]));
        let book = Codebook::new(4, rows).unwrap();
        assert_eq!(ml_decode(Array1::from(vec![0.0, 0.0]).view(), &book, 1.0), 2);
    }

    #[test]
    fn ml_decode_matches_log_likelihood_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let book = Codebook::new(4, standard_normal(16, 8, &mut rng)).unwrap();
        let sigma2: f64 = 0.7;
        for _ in 0..10_000 {
            let m = rng.random_range(0..16);
            let noise = standard_normal(1, 8, &mut rng) * sigma2.sqrt();
            let y = &book.rows().row(m) + &noise.row(0);
            let mut best = 0;
            let mut best_ll = f64::NEG_INFINITY;
            for i in 0..16 {
                let mut ll = -4.0 * (2.0 * std::f64::consts::PI * sigma2).ln();
                for d in 0..8 {
                    let diff = y[d] - book.rows()[[i, d]];
                    ll -= diff * diff / (2.0 * sigma2);
                }
                if ll > best_ll {
                    best_ll = ll;
                    best = i;
                }
            }
            assert_eq!(ml_decode(y.view(), &book, sigma2), best);
        }
    }

    #[test]
    fn ml_decode_is_translation_invariant_and_matches_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let book = hamming84_codebook();
        let shift = standard_normal(1, 8, &mut rng);
        let shifted = Codebook::new(4, book.rows() + &shift).unwrap();
        for _ in 0..10_000 {
            let y = standard_normal(1, 8, &mut rng) * 1.5;
            let a = ml_decode(y.row(0), &book, 1.0);
            let ys = &y + &shift;
            assert_eq!(a, ml_decode(ys.row(0), &shifted, 1.0));

            let mut best = 0;
            let mut best_c = f64::NEG_INFINITY;
            for (i, row) in book.rows().rows().into_iter().enumerate() {
                let c = row.dot(&y.row(0));
                if c > best_c {
                    best_c = c;
                    best = i;
                }
            }
            assert_eq!(a, best);
        }
    }

    #[test]
    fn union_bound_hamming_at_four_db() {
        let b = classical_union_bound(&hamming84_codebook(), &[4.0], 0.5).unwrap()[0];
        let sigma2 = 1.0 / (2.0 * 0.5 * 10f64.powf(0.4));
        let sigma = sigma2.sqrt();
        let expected = 14.0 * q_function(4.0 / (2.0 * sigma)) + q_function(32f64.sqrt() / (2.0 * sigma));
        assert!((b - expected).abs() < 1e-15);
        assert!((4.0 / (2.0 * sigma) - 3.170).abs() < 1e-3);
        assert!((b - 1.07e-2).abs() < 0.01e-2, "{b}");
    }

    #[test]
    fn union_bound_edge_cases() {
        let single = Codebook::new(0, ndarray::array![[1.0, 1.0]]).unwrap();
        assert_eq!(classical_union_bound(&single, &[3.0], 0.5).unwrap()[0], 0.0);
        assert!(classical_union_bound(&hamming84_codebook(), &[], 0.5).is_err());

        let grid: Vec<f64> = (0..13).map(f64::from).collect();
        let b = classical_union_bound(&hamming84_codebook(), &grid, 0.5).unwrap();
        assert!(b.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn q_function_reference_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-16);
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((q_function(3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-17);
    }
}
