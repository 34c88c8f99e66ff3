//! Index-set enumeration helpers shared by the parameter estimators: bitmask
//! subsets, fixed-size combinations via Gosper's hack, and a ternary codec
//! for signed sets (each coordinate is out / +1 / -1).

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Indices of the set bits of `mask`, ascending.
pub fn mask_indices(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Visit every subset of `{0..n}` of size exactly `k`, as bitmasks in
/// ascending numeric order.
pub fn for_each_subset_of_size(n: usize, k: usize, mut f: impl FnMut(u64)) {
    debug_assert!(n < 63);
    if k == 0 {
        f(0);
        return;
    }
    if k > n {
        return;
    }
    let limit = 1u64 << n;
    let mut mask = (1u64 << k) - 1;
    while mask < limit {
        f(mask);
        // Gosper's hack: next mask with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
        if c == 0 {
            break;
        }
    }
}

/// Powers of three up to `3^n`, for the signed-set codec.
pub fn pow3_table(n: usize) -> Vec<u64> {
    let mut t = Vec::with_capacity(n + 1);
    let mut v = 1u64;
    for _ in 0..=n {
        t.push(v);
        v = v.saturating_mul(3);
    }
    t
}

/// Signed-set codes are base-3 numbers: digit 0 = coordinate absent,
/// 1 = sign +1, 2 = sign -1.
pub fn signed_set_coefficients(code: u64, n: usize, out: &mut [f64]) {
    debug_assert_eq!(out.len(), n);
    let mut c = code;
    for slot in out.iter_mut() {
        *slot = match c % 3 {
            0 => 0.0,
            1 => 1.0,
            _ => -1.0,
        };
        c /= 3;
    }
}

/// Support and signs of a signed-set code, ascending by index.
pub fn signed_set_members(code: u64, n: usize) -> (Vec<usize>, Vec<i8>) {
    let mut indices = Vec::new();
    let mut signs = Vec::new();
    let mut c = code;
    for i in 0..n {
        match c % 3 {
            1 => {
                indices.push(i);
                signs.push(1);
            }
            2 => {
                indices.push(i);
                signs.push(-1);
            }
            _ => {}
        }
        c /= 3;
    }
    (indices, signs)
}

pub fn signed_set_cardinality(code: u64) -> u32 {
    let mut c = code;
    let mut count = 0;
    while c > 0 {
        if c % 3 != 0 {
            count += 1;
        }
        c /= 3;
    }
    count
}

/// All greedy sets of cardinality `m` for the given coefficient vector:
/// indices with magnitude strictly above the cutoff are mandatory, the
/// remainder is any choice from the tie group at the cutoff magnitude.
///
/// Sets are returned sorted ascending; the first one is the canonical
/// (ascending-tie-rule) greedy set. Errors on more than `cap` sets.
pub fn all_greedy_sets(coeffs: &[f64], m: usize, cap: u64) -> Result<Vec<Vec<usize>>> {
    let n = coeffs.len();
    if m > n {
        return Err(Error::RankTooLarge { m, dim: n });
    }
    if m == 0 {
        return Ok(alloc::vec![Vec::new()]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        crate::math::abs(coeffs[b])
            .total_cmp(&crate::math::abs(coeffs[a]))
            .then(a.cmp(&b))
    });
    let cutoff = crate::math::abs(coeffs[order[m - 1]]);
    let mandatory: Vec<usize> = (0..n)
        .filter(|&i| crate::math::abs(coeffs[i]) > cutoff)
        .collect();
    let ties: Vec<usize> = (0..n)
        .filter(|&i| crate::math::abs(coeffs[i]) == cutoff)
        .collect();
    let take = m - mandatory.len();
    let count = binomial(ties.len() as u64, take as u64);
    if count > cap {
        return Err(Error::Capacity {
            what: "greedy-set tie enumeration",
            needed: count,
            cap,
        });
    }
    let mut sets = Vec::with_capacity(count as usize);
    for_each_subset_of_size(ties.len(), take, |mask| {
        let mut s = mandatory.clone();
        for (pos, &idx) in ties.iter().enumerate() {
            if mask >> pos & 1 == 1 {
                s.push(idx);
            }
        }
        s.sort_unstable();
        sets.push(s);
    });
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gosper_enumerates_all_combinations() {
        let mut seen = Vec::new();
        for_each_subset_of_size(5, 2, |m| seen.push(m));
        assert_eq!(seen.len(), 10);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        assert!(seen.iter().all(|m| m.count_ones() == 2));
    }

    #[test]
    fn signed_codec_round_trip() {
        let n = 4;
        let pow3 = pow3_table(n);
        let mut buf = vec![0.0; n];
        for code in 0..pow3[n] {
            signed_set_coefficients(code, n, &mut buf);
            let (indices, signs) = signed_set_members(code, n);
            assert_eq!(indices.len() as u32, signed_set_cardinality(code));
            for (&i, &s) in indices.iter().zip(&signs) {
                assert_eq!(buf[i], s as f64);
            }
            let support: Vec<usize> =
                (0..n).filter(|&i| buf[i] != 0.0).collect();
            assert_eq!(support, indices);
        }
    }

    #[test]
    fn greedy_set_ties_enumerate_choices() {
        let sets = all_greedy_sets(&[1.0, -1.0, 0.5, 1.0], 2, 100).unwrap();
        assert_eq!(sets, vec![vec![0, 1], vec![0, 3], vec![1, 3]]);
        let unique = all_greedy_sets(&[3.0, 1.0, 2.0], 2, 100).unwrap();
        assert_eq!(unique, vec![vec![0, 2]]);
    }
}
