//! Lexicographic enumeration and ranking of m-subsets of {1..n}.
//!
//! Dissimilarity vectors and min-plus points are both indexed by m-subsets
//! in lexicographic order; keeping the enumeration in one place guarantees
//! the two stay aligned.

/// Binomial coefficient C(n, k) as a usize. Panics on overflow, which cannot
/// happen for the tree sizes this crate targets.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).expect("binomial coefficient overflows usize")
}

/// All m-subsets of {1..n} in lexicographic order, each sorted ascending.
pub fn enumerate(n: usize, m: usize) -> Vec<Vec<u32>> {
    if m > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, m));
    let mut current: Vec<u32> = (1..=m as u32).collect();
    loop {
        out.push(current.clone());
        // advance to the lexicographic successor
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < (n - m + i + 1) as u32 {
                current[i] += 1;
                for j in i + 1..m {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of a sorted m-subset within `enumerate(n, m)`.
pub fn lex_rank(sigma: &[u32], n: usize) -> usize {
    let m = sigma.len();
    let mut rank = 0;
    let mut prev = 0u32;
    for (t, &v) in sigma.iter().enumerate() {
        for skipped in prev + 1..v {
            rank += binomial(n - skipped as usize, m - t - 1);
        }
        prev = v;
    }
    rank
}
