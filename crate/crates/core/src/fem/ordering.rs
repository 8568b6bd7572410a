//! Bandwidth-reducing permutation.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Reverse Cuthill–McKee ordering of a symmetric adjacency structure.
/// `order[new] = old`. Every connected component starts from a
/// pseudo-peripheral vertex found by repeated breadth-first sweeps.
pub(crate) fn reverse_cuthill_mckee(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let start = peripheral(adjacency, seed, &mut level);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (adjacency[u].len(), u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

fn peripheral(adjacency: &[Vec<usize>], seed: usize, level: &mut [usize]) -> usize {
    let mut root = seed;
    let mut depth = 0;
    loop {
        let (far, d, touched) = bfs_levels(adjacency, root, level);
        for &v in &touched {
            level[v] = usize::MAX;
        }
        if d <= depth {
            return root;
        }
        depth = d;
        root = far;
    }
}

/// Returns a minimum-degree vertex of the last level, the eccentricity and the
/// touched vertices.
fn bfs_levels(adjacency: &[Vec<usize>], root: usize, level: &mut [usize]) -> (usize, usize, Vec<usize>) {
    let mut touched = vec![root];
    level[root] = 0;
    let mut head = 0;
    while head < touched.len() {
        let v = touched[head];
        head += 1;
        for &u in &adjacency[v] {
            if level[u] == usize::MAX {
                level[u] = level[v] + 1;
                touched.push(u);
            }
        }
    }
    let depth = level[*touched.last().expect("root is touched")];
    let far = touched
        .iter()
        .copied()
        .filter(|&v| level[v] == depth)
        .min_by_key(|&v| (adjacency[v].len(), v))
        .expect("last level is non-empty");
    (far, depth, touched)
}

/// Row envelope profile `sum_i (i - first_i)` under a permutation, for tests
/// and diagnostics.
#[cfg(test)]
pub(crate) fn profile(adjacency: &[Vec<usize>], order: &[usize]) -> usize {
    let mut pos = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    (0..adjacency.len())
        .map(|old| {
            let i = pos[old];
            let first = adjacency[old].iter().map(|&u| pos[u]).filter(|&j| j < i).min().unwrap_or(i);
            i - first
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nx: usize, ny: usize) -> Vec<Vec<usize>> {
        let id = |i: usize, j: usize| j * nx + i;
        let mut adj = vec![Vec::new(); nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                if i + 1 < nx {
                    adj[id(i, j)].push(id(i + 1, j));
                    adj[id(i + 1, j)].push(id(i, j));
                }
                if j + 1 < ny {
                    adj[id(i, j)].push(id(i, j + 1));
                    adj[id(i, j + 1)].push(id(i, j));
                }
            }
        }
        adj
    }

    #[test]
    fn is_a_permutation() {
        let adj = grid(7, 5);
        let mut order = reverse_cuthill_mckee(&adj);
        order.sort_unstable();
        assert_eq!(order, (0..35).collect::<Vec<_>>());
    }

    #[test]
    fn shrinks_a_scrambled_profile() {
        let n = 12;
        let adj = grid(n, n);
        // Scramble with a fixed multiplicative permutation.
        let perm: Vec<usize> = (0..n * n).map(|i| (i * 37) % (n * n)).collect();
        let rcm = reverse_cuthill_mckee(&adj);
        assert!(profile(&adj, &rcm) < profile(&adj, &perm));
        assert!(profile(&adj, &rcm) <= n * n * (n + 1));
    }

    #[test]
    fn handles_disconnected_components() {
        let adj = vec![vec![1], vec![0], vec![], vec![4], vec![3]];
        assert_eq!(reverse_cuthill_mckee(&adj).len(), 5);
    }
}
