//! Approximate minimum degree ordering.
//!
//! Elimination is simulated on a quotient graph: each eliminated pivot becomes
//! an element whose variable set is its reach, and elements adjacent to the
//! pivot are absorbed into it. Degrees are the approximate external degrees
//!
//! ```text
//! d(i) = min( d_old(i) + |Lp \ i|,
//!             |Ai \ i| + |Lp \ i| + Σ_{e ∈ Ei, e ≠ p} |Le \ Lp|,
//!             remaining - 1 )
//! ```
//!
//! with `|Le \ Lp|` obtained by the usual per-element counter sweep. Ties go
//! to the lowest original index, so the ordering is deterministic.

use std::collections::BTreeSet;

use crate::sparse::CsrMatrix;

/// Returns a fill-reducing permutation: position `k` holds the original index
/// eliminated `k`-th. Non-square or unsymmetric patterns are symmetrized
/// (`M + Mᵀ`) first; the diagonal is ignored.
pub fn amd_ordering(pattern: &CsrMatrix) -> Vec<usize> {
    let n = pattern.nrows().max(pattern.ncols());
    if n == 0 {
        return Vec::new();
    }

    // Structural neighbour lists of M + Mᵀ without the diagonal.
    let mut adj_vars: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..pattern.nrows() {
        for &j in pattern.row(i).0 {
            if i != j {
                adj_vars[i].push(j);
                adj_vars[j].push(i);
            }
        }
    }
    for a in adj_vars.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }

    let mut adj_elems: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut elem_vars: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut eliminated = vec![false; n];
    let mut degree: Vec<usize> = adj_vars.iter().map(|a| a.len()).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|i| (degree[i], i)).collect();

    let mut mark = vec![usize::MAX; n];
    let mut w = vec![usize::MAX; n];
    let mut w_stamp = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut reach: Vec<usize> = Vec::new();

    for step in 0..n {
        let (_, p) = queue.pop_first().expect("queue holds every live variable");
        order.push(p);
        eliminated[p] = true;

        // Lp: live variables adjacent to p directly or through its elements.
        reach.clear();
        mark[p] = step;
        for &j in &adj_vars[p] {
            if !eliminated[j] && mark[j] != step {
                mark[j] = step;
                reach.push(j);
            }
        }
        let absorbed = std::mem::take(&mut adj_elems[p]);
        for &e in &absorbed {
            for &j in &elem_vars[e] {
                if !eliminated[j] && mark[j] != step {
                    mark[j] = step;
                    reach.push(j);
                }
            }
            elem_vars[e].clear();
        }
        reach.sort_unstable();
        adj_vars[p].clear();
        elem_vars[p] = reach.clone();

        let absorbed_set: BTreeSet<usize> = absorbed.iter().copied().collect();
        for &i in &reach {
            adj_elems[i].retain(|e| !absorbed_set.contains(e));
            adj_elems[i].push(p);
            // Edges inside Lp are now represented by element p.
            adj_vars[i].retain(|&j| !eliminated[j] && mark[j] != step);
        }

        // |Le \ Lp| for every element sharing a variable with Lp.
        for &i in &reach {
            for &e in &adj_elems[i] {
                if e == p {
                    continue;
                }
                if w_stamp[e] != step {
                    w_stamp[e] = step;
                    w[e] = elem_vars[e].len();
                }
                w[e] -= 1;
            }
        }

        let remaining = n - step - 1;
        let lp_ext = reach.len().saturating_sub(1);
        for &i in &reach {
            let mut bound = adj_vars[i].len() + lp_ext;
            for &e in &adj_elems[i] {
                if e != p {
                    bound += w[e];
                }
            }
            let d = bound
                .min(degree[i] + lp_ext)
                .min(remaining.saturating_sub(1));
            if d != degree[i] {
                queue.remove(&(degree[i], i));
                degree[i] = d;
                queue.insert((d, i));
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_gives_identity() {
        let d = CsrMatrix::identity(7);
        assert_eq!(amd_ordering(&d), (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn arrowhead_puts_hub_last() {
        let n = 6;
        let mut t = vec![];
        for i in 0..n {
            t.push((i, i, 1.0));
            if i > 0 {
                t.push((0, i, 1.0));
                t.push((i, 0, 1.0));
            }
        }
        let m = CsrMatrix::from_triplets(n, n, &t).unwrap();
        let p = amd_ordering(&m);
        // Once only the hub and one leaf remain the two are tied, and the
        // lower index wins; every other leaf goes first.
        assert_eq!(p, vec![1, 2, 3, 4, 0, 5]);
    }

    #[test]
    fn unsymmetric_input_is_symmetrized() {
        let m = CsrMatrix::from_triplets(3, 3, &[(0, 2, 1.0), (1, 1, 1.0)]).unwrap();
        let mut p = amd_ordering(&m);
        p.sort_unstable();
        assert_eq!(p, vec![0, 1, 2]);
    }
}
