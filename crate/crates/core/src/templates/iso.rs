//! Small-instance hypergraph isomorphism by backtracking.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Searches for a vertex bijection mapping the edge set of `f` onto the edge
/// set of `g`; returns the witness permutation (f-vertex -> g-vertex) if one
/// exists. Both hypergraphs must be simple and have at most `cap` vertices.
pub fn are_isomorphic(f: &Hypergraph, g: &Hypergraph, cap: usize) -> Result<Option<Vec<usize>>> {
    for h in [f, g] {
        if h.edges().iter().any(|e| e.windows(2).any(|w| w[0] == w[1])) {
            return Err(Error::Invalid(
                "isomorphism search requires simple hypergraphs".into(),
            ));
        }
    }
    if f.n() > cap || g.n() > cap {
        return Err(Error::CapExceeded {
            what: "isomorphism vertex count".into(),
            needed: f.n().max(g.n()),
            cap,
        });
    }
    if f.n() != g.n() || f.k() != g.k() || f.edge_count() != g.edge_count() {
        return Ok(None);
    }
    let deg_f = degrees(f);
    let deg_g = degrees(g);
    let mut sorted_f = deg_f.clone();
    let mut sorted_g = deg_g.clone();
    sorted_f.sort_unstable();
    sorted_g.sort_unstable();
    if sorted_f != sorted_g {
        return Ok(None);
    }

    // order f's vertices so each new one shares an edge with placed ones
    let order = search_order(f, &deg_f);
    let g_edge_prefixes: HashSet<Vec<usize>> = g
        .edges()
        .iter()
        .flat_map(|e| sub_multisets(e))
        .collect();

    let mut image = vec![usize::MAX; f.n()];
    let mut used = vec![false; g.n()];
    let ok = assign(
        f,
        g,
        &order,
        0,
        &deg_f,
        &deg_g,
        &g_edge_prefixes,
        &mut image,
        &mut used,
    );
    Ok(ok.then_some(image))
}

fn degrees(h: &Hypergraph) -> Vec<usize> {
    let mut deg = vec![0usize; h.n()];
    for e in h.edges() {
        for &v in e {
            deg[v] += 1;
        }
    }
    deg
}

fn search_order(h: &Hypergraph, deg: &[usize]) -> Vec<usize> {
    let n = h.n();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for _ in 0..n {
        // most placed-incident edges first, degree as tie-break
        let mut best: Option<((usize, usize), usize)> = None;
        for v in 0..n {
            if placed[v] {
                continue;
            }
            let incident = h
                .edges()
                .iter()
                .filter(|e| e.contains(&v) && e.iter().any(|&u| placed[u]))
                .count();
            let key = (incident, deg[v]);
            if best.is_none_or(|(bk, _)| key > bk) {
                best = Some((key, v));
            }
        }
        let v = best.unwrap().1;
        placed[v] = true;
        order.push(v);
    }
    order
}

fn sub_multisets(edge: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &v in edge {
        let mut extended: Vec<Vec<usize>> = out.to_vec();
        for s in &mut extended {
            s.push(v);
        }
        out.extend(extended);
    }
    for s in &mut out {
        s.sort_unstable();
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn assign(
    f: &Hypergraph,
    g: &Hypergraph,
    order: &[usize],
    depth: usize,
    deg_f: &[usize],
    deg_g: &[usize],
    g_prefixes: &HashSet<Vec<usize>>,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    'candidates: for w in 0..g.n() {
        if used[w] || deg_f[v] != deg_g[w] {
            continue;
        }
        image[v] = w;
        used[w] = true;
        for e in f.edges().iter().filter(|e| e.contains(&v)) {
            let mapped: Vec<usize> = e.iter().filter(|&&u| image[u] != usize::MAX).map(|&u| image[u]).collect();
            let mut sorted = mapped.clone();
            sorted.sort_unstable();
            if mapped.len() == e.len() {
                if !g.has_edge_sorted(&sorted) {
                    used[w] = false;
                    image[v] = usize::MAX;
                    continue 'candidates;
                }
            } else if !g_prefixes.contains(&sorted) {
                used[w] = false;
                image[v] = usize::MAX;
                continue 'candidates;
            }
        }
        if assign(f, g, order, depth + 1, deg_f, deg_g, g_prefixes, image, used) {
            return true;
        }
        used[w] = false;
        image[v] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::{build_cycle4_direct, build_cycle_ordered, OrderedPartition};

    #[test]
    fn triangle_vs_path_differ() {
        let k3 = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], false).unwrap();
        let p3 = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2]], false).unwrap();
        assert!(are_isomorphic(&k3, &p3, 16).unwrap().is_none());
    }

    #[test]
    fn relabeled_graph_matches_itself() {
        let h = Hypergraph::new(3, 5, vec![vec![0, 1, 2], vec![2, 3, 4]], false).unwrap();
        let relabeled =
            Hypergraph::new(3, 5, vec![vec![4, 3, 2], vec![2, 1, 0]], false).unwrap();
        let witness = are_isomorphic(&h, &relabeled, 16).unwrap().unwrap();
        for e in h.edges() {
            let mut img: Vec<usize> = e.iter().map(|&v| witness[v]).collect();
            img.sort_unstable();
            assert!(relabeled.has_edge_sorted(&img));
        }
    }

    #[test]
    fn cycle_orderings_are_isomorphic() {
        let a = build_cycle_ordered(&OrderedPartition::new(vec![1, 2]).unwrap(), 2).unwrap();
        let b = build_cycle_ordered(&OrderedPartition::new(vec![2, 1]).unwrap(), 2).unwrap();
        assert!(are_isomorphic(&a.graph, &b.graph, 16).unwrap().is_some());
    }

    #[test]
    fn direct_four_cycle_matches_step_construction() {
        for parts in [vec![1, 1], vec![1, 1, 1], vec![2, 1]] {
            let pi = OrderedPartition::new(parts.clone()).unwrap();
            let direct = build_cycle4_direct(&pi);
            let viasteps = crate::templates::build_cycle(&parts, 2).unwrap();
            assert!(
                are_isomorphic(&direct.graph, &viasteps.graph, 16)
                    .unwrap()
                    .is_some(),
                "direct C4 for {pi} should match the step-built cycle"
            );
        }
    }

    #[test]
    fn cap_is_enforced() {
        let h = Hypergraph::new(2, 20, vec![vec![0, 1]], false).unwrap();
        assert!(matches!(
            are_isomorphic(&h, &h, 16),
            Err(Error::CapExceeded { .. })
        ));
    }
}
