//! Suffix array construction (SA-IS, linear time over an integer alphabet)
//! and Kasai LCP.
//!
//! Symbols are `u32` in `0..=upper`. Indices are `u32`, which caps a single
//! array at `u32::MAX - 1` symbols; at 120M characters the text, suffix array
//! and LCP array together take about 1.5 GB.

const NONE: u32 = u32::MAX;
const NAIVE_THRESHOLD: usize = 10;

/// Suffix array of `s`, every symbol `<= upper`.
pub fn suffix_array(s: &[u32], upper: u32) -> Vec<u32> {
    assert!(s.len() < NONE as usize, "text too long for u32 suffix array");
    debug_assert!(s.iter().all(|&c| c <= upper));
    if (upper as usize) <= s.len() {
        return sa_is(s, upper as usize);
    }
    // sparse alphabet: remap to dense ranks so bucket arrays stay O(n)
    let mut used = vec![false; upper as usize + 1];
    for &c in s {
        used[c as usize] = true;
    }
    let mut rank = vec![0u32; upper as usize + 1];
    let mut next = 0u32;
    for (c, &u) in used.iter().enumerate() {
        if u {
            rank[c] = next;
            next += 1;
        }
    }
    let dense: Vec<u32> = s.iter().map(|&c| rank[c as usize]).collect();
    sa_is(&dense, next.saturating_sub(1) as usize)
}

fn sa_naive(s: &[u32]) -> Vec<u32> {
    let mut sa: Vec<u32> = (0..s.len() as u32).collect();
    sa.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
    sa
}

fn sa_is(s: &[u32], upper: usize) -> Vec<u32> {
    let n = s.len();
    match n {
        0 => return Vec::new(),
        1 => return vec![0],
        2 => return if s[0] < s[1] { vec![0, 1] } else { vec![1, 0] },
        _ if n < NAIVE_THRESHOLD => return sa_naive(s),
        _ => {}
    }

    // ls[i]: suffix i is S-type
    let mut ls = vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if s[i] == s[i + 1] { ls[i + 1] } else { s[i] < s[i + 1] };
    }

    let mut sum_l = vec![0u32; upper + 1];
    let mut sum_s = vec![0u32; upper + 1];
    for i in 0..n {
        if !ls[i] {
            sum_s[s[i] as usize] += 1;
        } else {
            sum_l[s[i] as usize + 1] += 1;
        }
    }
    for i in 0..=upper {
        sum_s[i] += sum_l[i];
        if i < upper {
            sum_l[i + 1] += sum_s[i];
        }
    }

    let mut sa = vec![NONE; n];
    let mut buf = vec![0u32; upper + 1];
    let induce = |lms: &[u32], sa: &mut [u32], buf: &mut [u32]| {
        sa.fill(NONE);
        buf.copy_from_slice(&sum_s);
        for &d in lms {
            let d = d as usize;
            if d == n {
                continue;
            }
            let c = s[d] as usize;
            sa[buf[c] as usize] = d as u32;
            buf[c] += 1;
        }
        buf.copy_from_slice(&sum_l);
        let c = s[n - 1] as usize;
        sa[buf[c] as usize] = (n - 1) as u32;
        buf[c] += 1;
        for i in 0..n {
            let v = sa[i];
            if v != NONE && v >= 1 && !ls[v as usize - 1] {
                let c = s[v as usize - 1] as usize;
                sa[buf[c] as usize] = v - 1;
                buf[c] += 1;
            }
        }
        buf.copy_from_slice(&sum_l);
        for i in (0..n).rev() {
            let v = sa[i];
            if v != NONE && v >= 1 && ls[v as usize - 1] {
                let c = s[v as usize - 1] as usize + 1;
                buf[c] -= 1;
                sa[buf[c] as usize] = v - 1;
            }
        }
    };

    let mut lms_map = vec![NONE; n + 1];
    let mut lms = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms_map[i] = lms.len() as u32;
            lms.push(i as u32);
        }
    }
    let m = lms.len();
    induce(&lms, &mut sa, &mut buf);

    if m > 0 {
        let mut sorted_lms: Vec<u32> = sa
            .iter()
            .copied()
            .filter(|&v| v != NONE && lms_map[v as usize] != NONE)
            .collect();
        let mut rec_s = vec![0u32; m];
        let mut rec_upper = 0u32;
        rec_s[lms_map[sorted_lms[0] as usize] as usize] = 0;
        for i in 1..m {
            let mut l = sorted_lms[i - 1] as usize;
            let mut r = sorted_lms[i] as usize;
            let next = |p: usize| {
                let k = lms_map[p] as usize + 1;
                if k < m {
                    lms[k] as usize
                } else {
                    n
                }
            };
            let end_l = next(l);
            let end_r = next(r);
            let mut same = true;
            if end_l - l != end_r - r {
                same = false;
            } else {
                while l < end_l {
                    if s[l] != s[r] {
                        break;
                    }
                    l += 1;
                    r += 1;
                }
                if l == n || r == n || s[l] != s[r] {
                    same = false;
                }
            }
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i] as usize] as usize] = rec_upper;
        }
        let rec_sa = sa_is(&rec_s, rec_upper as usize);
        for (slot, &r) in sorted_lms.iter_mut().zip(&rec_sa) {
            *slot = lms[r as usize];
        }
        induce(&sorted_lms, &mut sa, &mut buf);
    }
    sa
}

/// Kasai LCP: `lcp[i]` is the common prefix length of suffixes `sa[i - 1]`
/// and `sa[i]`; `lcp[0] == 0`.
pub fn lcp_array(s: &[u32], sa: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut rank = vec![0u32; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p as usize] = i as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_lcp(s: &[u32], sa: &[u32]) -> Vec<u32> {
        let mut out = vec![0; sa.len()];
        for i in 1..sa.len() {
            let a = &s[sa[i - 1] as usize..];
            let b = &s[sa[i] as usize..];
            out[i] = a.iter().zip(b).take_while(|(x, y)| x == y).count() as u32;
        }
        out
    }

    #[test]
    fn small_cases() {
        assert!(suffix_array(&[], 0).is_empty());
        assert_eq!(suffix_array(&[5], 5), vec![0]);
        assert_eq!(suffix_array(&[2, 1], 2), vec![1, 0]);
        // "mississippi"
        let s: Vec<u32> = "mississippi".bytes().map(u32::from).collect();
        assert_eq!(
            suffix_array(&s, 255),
            vec![10, 7, 4, 1, 0, 9, 8, 6, 3, 5, 2]
        );
    }

    proptest! {
        #[test]
        fn matches_naive_sort(s in prop::collection::vec(0u32..4, 0..300)) {
            let sa = suffix_array(&s, 3);
            prop_assert_eq!(&sa, &sa_naive(&s));
            prop_assert_eq!(lcp_array(&s, &sa), naive_lcp(&s, &sa));
        }

        #[test]
        fn matches_naive_sort_wide_alphabet(s in prop::collection::vec(0u32..2000, 0..200)) {
            let sa = suffix_array(&s, 1999);
            prop_assert_eq!(sa, sa_naive(&s));
        }
    }
}
