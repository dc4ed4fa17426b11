//! Prime-field arithmetic and rank by Gaussian elimination.

use crate::error::{Error, Result};

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= at_least` (and `>= 2`).
pub fn next_prime(at_least: u64) -> u64 {
    let mut q = at_least.max(2);
    while !is_prime(q) {
        q += 1;
    }
    q
}

pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero element via Fermat's little theorem.
pub fn inv_mod(a: u64, q: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(q));
    pow_mod(a, q - 2, q)
}

/// `(1, α, α², …, α^{k−1}) mod q`.
pub fn vandermonde_row(alpha: u64, k: usize, q: u64) -> Vec<u64> {
    let mut row = Vec::with_capacity(k);
    let mut p = 1 % q;
    for _ in 0..k {
        row.push(p);
        p = mul_mod(p, alpha, q);
    }
    row
}

/// Rank over GF(q). Rows may have any common length; entries are reduced mod `q`.
pub fn gf_rank(rows: &[Vec<u64>], q: u64) -> Result<usize> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let width = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::invalid(
            format!("rows[{i}]"),
            format!("expected length {width}"),
        ));
    }
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x % q).collect())
        .collect();
    Ok(rank_in_place(&mut m, q))
}

/// Row-reduces `m` (entries already in `[0, q)`) and returns its rank.
pub(crate) fn rank_in_place(m: &mut [Vec<u64>], q: u64) -> usize {
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = inv_mod(m[rank][col], q);
        for x in m[rank][col..].iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
        let (top, bottom) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            let factor = row[col];
            if factor == 0 {
                continue;
            }
            for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = (*x + q - mul_mod(factor, p, q)) % q;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
