//! Sort-filter skyline over fixed-width ordinal vectors.

/// `a` dominates `b`: at least as good everywhere and strictly better somewhere.
pub fn dominates<const N: usize>(a: &[u8; N], b: &[u8; N]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        strictly |= x > y;
    }
    strictly
}

/// Indices of the non-dominated points, ascending.
///
/// Points are visited in decreasing coordinate sum. A dominator always has a
/// strictly larger sum, so each point only needs checking against the
/// skyline members already accepted.
pub fn skyline_indices<const N: usize>(points: &[[u8; N]]) -> Vec<usize> {
    let sum = |p: &[u8; N]| p.iter().map(|&v| u32::from(v)).sum::<u32>();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(sum(&points[i])));

    let mut window: Vec<usize> = Vec::new();
    for i in order {
        if !window.iter().any(|&w| dominates(&points[w], &points[i])) {
            window.push(i);
        }
    }
    window.sort_unstable();
    window
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(points: &[[u8; 3]]) -> Vec<usize> {
        (0..points.len())
            .filter(|&i| {
                !(0..points.len())
                    .any(|j| j != i && points[j].iter().zip(&points[i]).all(|(a, b)| a >= b) && points[j] != points[i])
            })
            .collect()
    }

    #[test]
    fn dominance_definition() {
        assert!(dominates(&[3, 3], &[2, 2]));
        assert!(dominates(&[3, 2], &[2, 2]));
        assert!(!dominates(&[2, 2], &[2, 2]));
        assert!(!dominates(&[3, 2], &[2, 3]));
    }

    #[test]
    fn equal_points_both_survive() {
        assert_eq!(skyline_indices(&[[1, 1], [1, 1], [0, 1]]), [0, 1]);
        assert!(skyline_indices::<2>(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn matches_brute_force(points in prop::collection::vec(prop::array::uniform3(0u8..4), 0..10)) {
            prop_assert_eq!(skyline_indices(&points), brute_force(&points));
        }
    }
}
