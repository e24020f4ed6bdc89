/// Calls `f` on every permutation of `0..n` in lexicographic order.
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        f(&perm);
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).expect("pivot exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_in_order() {
        let mut all = Vec::new();
        for_each_permutation(3, |p| all.push(p.to_vec()));
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        let mut count = 0;
        for_each_permutation(0, |_| count += 1);
        assert_eq!(count, 1);
    }
}
