//! Enumeration of small test sequences shared by the integration tests.

#![allow(dead_code)]

/// Number of sequences of length `n` over `0..4` without consecutive
/// repeats.
pub fn count(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    4 * 3usize.pow(n as u32 - 1)
}

/// The `j`-th such sequence: the first value is `j % 4`, and each later
/// value steps forward from its predecessor by 1, 2 or 3 (mod 4).
pub fn sequence(n: usize, mut j: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut current = j % 4;
    j /= 4;
    v.push(current as f64);
    for _ in 1..n {
        current = (current + 1 + j % 3) % 4;
        j /= 3;
        v.push(current as f64);
    }
    v
}
