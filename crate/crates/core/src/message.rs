//! Message indices and their one-hot and bit views.
//!
//! Messages are integers in `[0, 2^k)`. The bit view is big-endian: bit 0 is
//! the most significant of the `k` bits. This convention is used everywhere,
//! including bit-error counting.

use ndarray::Array2;

use crate::{Error, Result};

/// Number of messages `2^k`, rejecting block sizes that do not fit.
pub fn message_count(k: usize) -> Result<usize> {
    if k == 0 || k > 20 {
        return Err(Error::config(format!("k must be in 1..=20, got {k}")));
    }
    Ok(1 << k)
}

/// One-hot rows for the given indices, each of width `count`.
pub fn one_hot(messages: &[usize], count: usize) -> Result<Array2<f64>> {
    let mut out = Array2::zeros((messages.len(), count));
    for (row, &m) in messages.iter().enumerate() {
        if m >= count {
            return Err(Error::config(format!(
                "message index {m} out of range for {count} messages"
            )));
        }
        out[[row, m]] = 1.0;
    }
    Ok(out)
}

/// Big-endian bit vector of `m` with `k` bits.
pub fn to_bits(m: usize, k: usize) -> Vec<u8> {
    (0..k).map(|j| ((m >> (k - 1 - j)) & 1) as u8).collect()
}

/// Inverse of [`to_bits`].
pub fn from_bits(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b & 1))
}

/// Number of differing bits between two messages.
pub fn bit_errors(sent: usize, decided: usize) -> u32 {
    (sent ^ decided).count_ones()
}

/// All messages `0..count` in order.
pub fn all_messages(count: usize) -> Vec<usize> {
    (0..count).collect()
}
