//! Bipartite matching primitives.

/// Maximum-cardinality matching by augmenting paths, left vertices processed
/// in index order and neighbours in list order. Returns the partner of each
/// left vertex.
pub fn max_bipartite_matching(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let mut right_of: Vec<Option<usize>> = vec![None; adj.len()];
    let mut left_of: Vec<Option<usize>> = vec![None; n_right];
    for u in 0..adj.len() {
        let mut seen = vec![false; n_right];
        augment(u, adj, &mut seen, &mut right_of, &mut left_of);
    }
    right_of
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    seen: &mut [bool],
    right_of: &mut [Option<usize>],
    left_of: &mut [Option<usize>],
) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match left_of[v] {
            None => true,
            Some(w) => augment(w, adj, seen, right_of, left_of),
        };
        if free {
            right_of[u] = Some(v);
            left_of[v] = Some(u);
            return true;
        }
    }
    false
}

/// Minimum-cost assignment of every row to a distinct column
/// (`rows <= cols`), Hungarian method with potentials. Returns the column of
/// each row.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "more rows than columns");
    const INF: i64 = i64::MAX / 4;
    // 1-based with a virtual column 0
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn augmenting_path_reassigns() {
        // left 0 grabs right 0 first; left 1 only likes 0
        let adj = vec![vec![0, 1], vec![0]];
        assert_eq!(max_bipartite_matching(&adj, 2), vec![Some(1), Some(0)]);
        let adj = vec![vec![0], vec![0]];
        let m = max_bipartite_matching(&adj, 1);
        assert_eq!(m.iter().filter(|x| x.is_some()).count(), 1);
    }

    fn brute(cost: &[Vec<i64>]) -> i64 {
        fn rec(i: usize, cost: &[Vec<i64>], used: &mut Vec<bool>) -> i64 {
            if i == cost.len() {
                return 0;
            }
            let mut best = i64::MAX;
            for j in 0..cost[0].len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[i][j] + rec(i + 1, cost, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(0, cost, &mut vec![false; cost[0].len()])
    }

    #[test]
    fn hungarian_matches_enumeration() {
        let cost = vec![vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let a = min_cost_assignment(&cost);
        let total: i64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, brute(&cost));
        let rect = vec![vec![7, 3, 9, 1], vec![2, 8, 4, 6]];
        let a = min_cost_assignment(&rect);
        let total: i64 = a.iter().enumerate().map(|(i, &j)| rect[i][j]).sum();
        assert_eq!(total, brute(&rect));
    }
}
