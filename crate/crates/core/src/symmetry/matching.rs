use nalgebra::Vector3;

/// Bottleneck distance between two equal-size point sets: the smallest `d`
/// such that a perfect matching exists using only pairs closer than `d`.
///
/// Returns `f64::INFINITY` when the sets differ in size.
pub fn bottleneck_distance(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    let n = a.len();
    if n != b.len() {
        return f64::INFINITY;
    }
    if n == 0 {
        return 0.0;
    }
    let dist: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| (x - y).norm())).collect();
    // fast path: nearest-neighbour assignment is already a permutation
    let greedy: Vec<usize> = (0..n)
        .map(|i| {
            (0..n)
                .min_by(|&j, &k| dist[i * n + j].total_cmp(&dist[i * n + k]))
                .unwrap()
        })
        .collect();
    let mut seen = vec![false; n];
    if greedy.iter().all(|&j| !std::mem::replace(&mut seen[j], true)) {
        return (0..n).map(|i| dist[i * n + greedy[i]]).fold(0.0, f64::max);
    }
    let mut levels = dist.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(n, &dist, levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    levels[lo]
}

fn has_perfect_matching(n: usize, dist: &[f64], thr: f64) -> bool {
    let mut match_of_b = vec![usize::MAX; n];
    for i in 0..n {
        let mut visited = vec![false; n];
        if !augment(i, n, dist, thr, &mut visited, &mut match_of_b) {
            return false;
        }
    }
    true
}

fn augment(i: usize, n: usize, dist: &[f64], thr: f64, visited: &mut [bool], match_of_b: &mut [usize]) -> bool {
    for j in 0..n {
        if dist[i * n + j] <= thr && !visited[j] {
            visited[j] = true;
            if match_of_b[j] == usize::MAX || augment(match_of_b[j], n, dist, thr, visited, match_of_b) {
                match_of_b[j] = i;
                return true;
            }
        }
    }
    false
}
