//! Merge-based operations on ascending, duplicate-free slices.

use std::cmp::Ordering;

/// Calls `f` on each element shared by `a` and `b`.
#[inline]
pub fn for_each_common(a: &[usize], b: &[usize], mut f: impl FnMut(usize)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                f(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

#[inline]
pub fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let mut n = 0;
    for_each_common(a, b, |_| n += 1);
    n
}

#[inline]
pub fn union_size(a: &[usize], b: &[usize]) -> usize {
    a.len() + b.len() - intersection_size(a, b)
}

/// Sorts and deduplicates in place.
pub fn normalize(v: &mut Vec<usize>) {
    v.sort_unstable();
    v.dedup();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_counts() {
        assert_eq!(intersection_size(&[1, 3, 5], &[2, 3, 5, 8]), 2);
        assert_eq!(union_size(&[1, 3, 5], &[2, 3, 5, 8]), 5);
        assert_eq!(union_size(&[], &[]), 0);
    }
}
