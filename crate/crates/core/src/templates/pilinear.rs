//! pi-linearity certification.
//!
//! A hypergraph is pi-linear when its edges admit an ordering E_1..E_m such
//! that each E_i splits into parts of sizes k_1..k_t with every earlier
//! edge's intersection with E_i inside a single part. The search runs
//! depth-first over edge orderings, memoizing infeasible used-edge sets; the
//! per-edge partition is found by merging intersection-forced vertex groups
//! and packing them into the part sizes.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::templates::OrderedPartition;

/// A certificate: `edge_order[i]` is an original edge index, and
/// `partitions[i][s]` lists the vertices of part s (size k_s) of that edge.
#[derive(Clone, Debug)]
pub struct PiLinearWitness {
    pub edge_order: Vec<usize>,
    pub partitions: Vec<Vec<Vec<usize>>>,
}

/// Searches for a pi-linearity witness. `f` must be simple with at most
/// `cap` edges.
pub fn is_pi_linear(
    f: &Hypergraph,
    pi: &OrderedPartition,
    cap: usize,
) -> Result<Option<PiLinearWitness>> {
    if pi.k() != f.k() {
        return Err(Error::ArityMismatch {
            expected: f.k(),
            found: pi.k(),
        });
    }
    if f.edges().iter().any(|e| e.windows(2).any(|w| w[0] == w[1])) {
        return Err(Error::Invalid(
            "pi-linearity is defined for simple hypergraphs".into(),
        ));
    }
    let m = f.edge_count();
    if m > cap {
        return Err(Error::CapExceeded {
            what: "pi-linearity edge count".into(),
            needed: m,
            cap,
        });
    }
    if m == 0 {
        return Ok(Some(PiLinearWitness {
            edge_order: vec![],
            partitions: vec![],
        }));
    }

    let mut order = Vec::new();
    let mut parts_acc = Vec::new();
    let mut dead: HashSet<u64> = HashSet::new();
    let found = extend(f, pi, 0, &mut order, &mut parts_acc, &mut dead);
    Ok(found.then_some(PiLinearWitness {
        edge_order: order,
        partitions: parts_acc,
    }))
}

fn extend(
    f: &Hypergraph,
    pi: &OrderedPartition,
    used: u64,
    order: &mut Vec<usize>,
    parts_acc: &mut Vec<Vec<Vec<usize>>>,
    dead: &mut HashSet<u64>,
) -> bool {
    let m = f.edge_count();
    if order.len() == m {
        return true;
    }
    if dead.contains(&used) {
        return false;
    }
    for i in 0..m {
        if used >> i & 1 == 1 {
            continue;
        }
        if let Some(partition) = admissible_partition(f, pi, i, used) {
            order.push(i);
            parts_acc.push(partition);
            if extend(f, pi, used | 1 << i, order, parts_acc, dead) {
                return true;
            }
            order.pop();
            parts_acc.pop();
        }
    }
    dead.insert(used);
    false
}

/// Finds a split of edge `i` into parts of the pi sizes such that each
/// already-used edge intersects edge `i` inside one part, if possible.
fn admissible_partition(
    f: &Hypergraph,
    pi: &OrderedPartition,
    i: usize,
    used: u64,
) -> Option<Vec<Vec<usize>>> {
    let edge = &f.edges()[i];
    let k = edge.len();
    let pos = |v: usize| edge.iter().position(|&u| u == v).unwrap();

    // union-find over edge positions: every earlier intersection is glued
    let mut parent: Vec<usize> = (0..k).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (j, other) in f.edges().iter().enumerate() {
        if used >> j & 1 == 0 {
            continue;
        }
        let inter: Vec<usize> = other.iter().copied().filter(|v| edge.contains(v)).collect();
        if inter.len() < 2 {
            continue;
        }
        let first = root(&mut parent, pos(inter[0]));
        for &v in &inter[1..] {
            let r = root(&mut parent, pos(v));
            parent[r] = first;
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    {
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for p in 0..k {
            let r = root(&mut parent, p);
            by_root.entry(r).or_default().push(edge[p]);
        }
        groups.extend(by_root.into_values());
    }
    groups.sort_by_key(|g| std::cmp::Reverse(g.len()));

    // pack groups into parts with exact sizes
    let mut room: Vec<usize> = pi.parts().to_vec();
    let mut assignment: Vec<Vec<usize>> = vec![Vec::new(); room.len()];
    fn pack(
        groups: &[Vec<usize>],
        idx: usize,
        room: &mut Vec<usize>,
        assignment: &mut Vec<Vec<usize>>,
    ) -> bool {
        if idx == groups.len() {
            return true;
        }
        let g = &groups[idx];
        let mut tried = std::collections::BTreeSet::new();
        for s in 0..room.len() {
            if room[s] >= g.len() && tried.insert(room[s]) {
                room[s] -= g.len();
                assignment[s].extend_from_slice(g);
                if pack(groups, idx + 1, room, assignment) {
                    return true;
                }
                for _ in 0..g.len() {
                    assignment[s].pop();
                }
                room[s] += g.len();
            }
        }
        false
    }
    pack(&groups, 0, &mut room, &mut assignment).then(|| {
        for part in &mut assignment {
            part.sort_unstable();
        }
        assignment
    })
}

/// Replays a witness against the definition.
pub fn verify_pi_linear_witness(
    f: &Hypergraph,
    pi: &OrderedPartition,
    w: &PiLinearWitness,
) -> bool {
    let m = f.edge_count();
    if w.edge_order.len() != m || w.partitions.len() != m {
        return false;
    }
    let mut seen = vec![false; m];
    for (&e, parts) in w.edge_order.iter().zip(&w.partitions) {
        if e >= m || seen[e] {
            return false;
        }
        seen[e] = true;
        if parts.len() != pi.t() {
            return false;
        }
        let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != f.edges()[e] {
            return false;
        }
        for (part, &size) in parts.iter().zip(pi.parts()) {
            if part.len() != size {
                return false;
            }
        }
    }
    for (i, &e) in w.edge_order.iter().enumerate() {
        for &earlier in &w.edge_order[..i] {
            let inter: Vec<usize> = f.edges()[earlier]
                .iter()
                .copied()
                .filter(|v| f.edges()[e].contains(v))
                .collect();
            if inter.is_empty() {
                continue;
            }
            let inside_one_part = w.partitions[i]
                .iter()
                .any(|part| inter.iter().all(|v| part.contains(v)));
            if !inside_one_part {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates::{build_cycle, build_step};

    fn pl(f: &Hypergraph, parts: &[usize]) -> Option<PiLinearWitness> {
        let pi = OrderedPartition::canonical(parts.to_vec()).unwrap();
        let w = is_pi_linear(f, &pi, 12).unwrap();
        if let Some(ref w) = w {
            assert!(verify_pi_linear_witness(f, &pi, w));
        }
        w
    }

    #[test]
    fn single_edge_always_linear() {
        let h = Hypergraph::new(3, 3, vec![vec![0, 1, 2]], false).unwrap();
        assert!(pl(&h, &[1, 2]).is_some());
        assert!(pl(&h, &[1, 1, 1]).is_some());
    }

    #[test]
    fn every_graph_is_one_one_linear() {
        let k3 = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], false).unwrap();
        assert!(pl(&k3, &[1, 1]).is_some());
        let k4 = crate::hypergraph::gen_random(2, 4, 1.0, 0).unwrap();
        assert!(pl(&k4, &[1, 1]).is_some());
    }

    #[test]
    fn cycles_are_linear_for_their_own_pi() {
        for parts in [vec![1, 1], vec![1, 2], vec![1, 1, 1]] {
            let c = build_cycle(&parts, 2).unwrap();
            assert!(pl(&c.graph, &parts).is_some(), "C_{{{parts:?}}} must be pi-linear");
        }
    }

    #[test]
    fn steps_are_linear_for_their_own_pi() {
        for parts in [vec![1, 2], vec![1, 1, 1]] {
            let pi = OrderedPartition::new(parts.clone()).unwrap();
            let s = build_step(&pi);
            assert!(pl(&s.graph, &parts).is_some());
        }
    }

    #[test]
    fn tight_pair_is_not_fully_split_linear() {
        // two 3-edges sharing two vertices: (1+2)-linear but not (1+1+1)-linear
        let h = Hypergraph::new(3, 4, vec![vec![0, 1, 2], vec![0, 1, 3]], false).unwrap();
        assert!(pl(&h, &[1, 2]).is_some());
        assert!(pl(&h, &[1, 1, 1]).is_none());
    }

    #[test]
    fn refinement_implies_coarser_linearity() {
        // pi'-linear with pi' refining pi implies pi-linear
        let h = Hypergraph::new(
            3,
            6,
            vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]],
            false,
        )
        .unwrap();
        assert!(pl(&h, &[1, 1, 1]).is_some());
        assert!(pl(&h, &[1, 2]).is_some());
    }

    #[test]
    fn cap_enforced() {
        let big = crate::hypergraph::gen_random(2, 8, 1.0, 0).unwrap();
        let pi = OrderedPartition::new(vec![1, 1]).unwrap();
        assert!(matches!(
            is_pi_linear(&big, &pi, 12),
            Err(Error::CapExceeded { .. })
        ));
    }
}
