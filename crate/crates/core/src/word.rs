//! Helpers for eventually periodic words `prefix · period^ω` over any alphabet.

/// Length of the primitive root of `word`: the least `p` dividing `|word|` such that
/// `word` is a power of `word[..p]`.
pub fn primitive_root_len<T: Eq>(word: &[T]) -> usize {
    let n = word.len();
    (1..=n)
        .filter(|p| n.is_multiple_of(*p))
        .find(|&p| (p..n).all(|i| word[i] == word[i - p]))
        .unwrap_or(n)
}

/// Canonical `(prefix, period)` for the infinite word `prefix · period^ω`: the period is
/// primitive and the prefix is as short as possible. Two descriptions denote the same
/// infinite word iff their canonical forms are identical.
///
/// Panics if `period` is empty.
pub fn canonical<T: Eq + Clone>(prefix: &[T], period: &[T]) -> (Vec<T>, Vec<T>) {
    assert!(!period.is_empty(), "period must be nonempty");
    let mut period: Vec<T> = period[..primitive_root_len(period)].to_vec();
    let mut prefix = prefix.to_vec();
    while let (Some(a), Some(b)) = (prefix.last(), period.last()) {
        if a != b {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
    (prefix, period)
}

/// Letter at 0-based index `i` of `prefix · period^ω`.
pub fn letter_at<'a, T>(prefix: &'a [T], period: &'a [T], i: usize) -> &'a T {
    if i < prefix.len() {
        &prefix[i]
    } else {
        &period[(i - prefix.len()) % period.len()]
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(primitive_root_len(b"0101"), 2);
        assert_eq!(primitive_root_len(b"010"), 3);
        assert_eq!(primitive_root_len(b"0"), 1);
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical(b"0", b"0"), (vec![], b"0".to_vec()));
        assert_eq!(canonical(b"01", b"0101"), (vec![], b"01".to_vec()));
        assert_eq!(canonical(b"11", b"01"), (b"1".to_vec(), b"10".to_vec()));
        assert_eq!(canonical(b"10", b"1"), (b"10".to_vec(), b"1".to_vec()));
    }
}
