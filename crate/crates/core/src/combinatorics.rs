//! Small counting helpers shared by the enumerating routines.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::One;

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

pub fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Pascal triangle of `BigUint` binomials up to row `n`.
pub fn pascal_big(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut row = vec![BigUint::one(); r + 1];
        for c in 1..r {
            row[c] = &rows[r - 1][c - 1] + &rows[r - 1][c];
        }
        rows.push(row);
    }
    rows
}

/// `Σ_{j ≤ k} C(n, j)`, saturating.
pub fn ball_size(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |acc, j| acc.saturating_add(binomial_u128(n, j)))
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination<B>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    if k > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if let ControlFlow::Break(b) = f(&idx) {
            return Some(b);
        }
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return None;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_agree() {
        for n in 0..40 {
            for k in 0..=n {
                assert_eq!(BigUint::from(binomial_u128(n, k)), binomial_big(n, k));
                assert_eq!(pascal_big(n)[n][k], binomial_big(n, k));
            }
        }
        assert_eq!(binomial_u128(3, 5), 0);
    }

    #[test]
    fn combinations_are_counted_and_ordered() {
        let mut seen = Vec::new();
        for_each_combination::<()>(5, 3, |c| {
            seen.push(c.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(sorted, seen);
        let mut count = 0;
        for_each_combination::<()>(4, 0, |c| {
            assert!(c.is_empty());
            count += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(count, 1);
    }
}
