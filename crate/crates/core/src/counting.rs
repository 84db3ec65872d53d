//! Exact counting: labeled copies, homomorphism-style maps, circuits via
//! matrix traces, partite edge counts, and the extension recursion.
//!
//! Degenerate-map semantics: a vertex map preserves an edge when the image,
//! taken as a multiset, is an edge of the host. Simple hosts therefore admit
//! no degenerate images, while loop-bearing hosts can, which is what makes
//! the trace identity an exact integer statement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::multilinear::{adjacency_map, flatten_matrix, tuple_index, FlatMatrix};
use crate::templates::{build_cycle, build_partial_step, is_pi_linear, OrderedPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Trace,
    Backtracking,
    BruteForce,
    Extension,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountResult {
    pub count: u64,
    pub method: CountMethod,
}

/// Ordered subset families (S_1, ..., S_t); S_i holds sorted k_i-multisets.
#[derive(Clone, Debug)]
pub struct SubsetFamily {
    parts: Vec<Vec<Vec<usize>>>,
}

impl SubsetFamily {
    pub fn new(pi: &OrderedPartition, n: usize, parts: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if parts.len() != pi.t() {
            return Err(Error::ArityMismatch {
                expected: pi.t(),
                found: parts.len(),
            });
        }
        for (list, &size) in parts.iter().zip(pi.parts()) {
            for m in list {
                if m.len() != size {
                    return Err(Error::EdgeArity {
                        edge: m.clone(),
                        expected: size,
                        found: m.len(),
                    });
                }
                if m.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::Invalid(format!("multiset {m:?} is not sorted")));
                }
                if let Some(&v) = m.iter().find(|&&v| v >= n) {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
        }
        Ok(SubsetFamily { parts })
    }

    pub fn parts(&self) -> &[Vec<Vec<usize>>] {
        &self.parts
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.len()).collect()
    }
}

/// Number of edge-preserving injections V(F) -> V(H).
pub fn count_labeled_copies(f: &Hypergraph, h: &Hypergraph, cap: usize) -> Result<u64> {
    count_maps(f, h, &[], true, cap)
}

/// Number of edge-preserving maps V(F) -> V(H), not necessarily injective.
pub fn count_homomorphisms(f: &Hypergraph, h: &Hypergraph, cap: usize) -> Result<u64> {
    count_maps(f, h, &[], false, cap)
}

/// Homomorphism count with some template vertices pinned to host vertices.
pub fn count_homomorphisms_pinned(
    f: &Hypergraph,
    h: &Hypergraph,
    pins: &[(usize, usize)],
    cap: usize,
) -> Result<u64> {
    count_maps(f, h, pins, false, cap)
}

fn count_maps(
    f: &Hypergraph,
    h: &Hypergraph,
    pins: &[(usize, usize)],
    injective: bool,
    cap: usize,
) -> Result<u64> {
    if f.k() != h.k() {
        return Err(Error::ArityMismatch {
            expected: h.k(),
            found: f.k(),
        });
    }
    if f.n() > cap {
        return Err(Error::CapExceeded {
            what: "template vertex count".into(),
            needed: f.n(),
            cap,
        });
    }
    if injective && f.n() > h.n() {
        return Ok(0);
    }
    let mut assignment = vec![usize::MAX; f.n()];
    let mut used = vec![false; h.n()];
    for &(v, img) in pins {
        if v >= f.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: f.n() });
        }
        if img >= h.n() {
            return Err(Error::VertexOutOfRange { vertex: img, n: h.n() });
        }
        assignment[v] = img;
        used[img] = true;
    }

    let edges_of: Vec<Vec<usize>> = {
        let mut by_vertex = vec![Vec::new(); f.n()];
        for (ei, e) in f.edges().iter().enumerate() {
            for &v in e {
                if by_vertex[v].last() != Some(&ei) {
                    by_vertex[v].push(ei);
                }
            }
        }
        by_vertex
    };

    // order unpinned vertices so each new one closes as many edges as possible
    let mut order = Vec::new();
    {
        let mut placed: Vec<bool> = assignment.iter().map(|&a| a != usize::MAX).collect();
        while order.len() + pins.len() < f.n() {
            let mut best: Option<((usize, usize), usize)> = None;
            for v in 0..f.n() {
                if placed[v] {
                    continue;
                }
                let mut closing = 0;
                let mut touching = 0;
                for &ei in &edges_of[v] {
                    let unplaced = f.edges()[ei].iter().filter(|&&u| !placed[u]).count();
                    if unplaced == 1 {
                        closing += 1;
                    }
                    if f.edges()[ei].iter().any(|&u| placed[u]) {
                        touching += 1;
                    }
                }
                let key = (closing, touching);
                if best.is_none_or(|(bk, _)| key > bk) {
                    best = Some((key, v));
                }
            }
            let v = best.expect("an unplaced vertex exists").1;
            placed[v] = true;
            order.push(v);
        }
    }

    // partial-image index: every sub-multiset of a host edge, and for the
    // (k-1)-sized ones the list of completing vertices
    let mut prefixes: std::collections::HashSet<Vec<usize>> = Default::default();
    let mut completions: std::collections::HashMap<Vec<usize>, Vec<usize>> = Default::default();
    for e in h.edges() {
        for sub in all_sub_multisets(e) {
            if sub.len() + 1 == h.k() {
                // the completing vertex is the multiset difference
                let mut rest = e.clone();
                for v in &sub {
                    let pos = rest.iter().position(|x| x == v).unwrap();
                    rest.remove(pos);
                }
                let entry = completions.entry(sub.clone()).or_default();
                if !entry.contains(&rest[0]) {
                    entry.push(rest[0]);
                }
            }
            prefixes.insert(sub);
        }
    }
    for list in completions.values_mut() {
        list.sort_unstable();
    }

    // pinned vertices can already violate edges
    for (ei, e) in f.edges().iter().enumerate() {
        let _ = ei;
        let imgs: Vec<usize> = e
            .iter()
            .filter(|&&u| assignment[u] != usize::MAX)
            .map(|&u| assignment[u])
            .collect();
        if imgs.is_empty() {
            continue;
        }
        let mut sorted = imgs.clone();
        sorted.sort_unstable();
        if imgs.len() == e.len() {
            if !h.has_edge_sorted(&sorted) {
                return Ok(0);
            }
        } else if !prefixes.contains(&sorted) {
            return Ok(0);
        }
    }

    let ctx = SearchContext {
        f,
        h,
        order,
        edges_of,
        prefixes,
        completions,
        injective,
    };
    let mut count = 0u64;
    let mut scratch = Vec::with_capacity(f.k());
    descend(&ctx, 0, &mut assignment, &mut used, &mut scratch, &mut count);
    Ok(count)
}

struct SearchContext<'a> {
    f: &'a Hypergraph,
    h: &'a Hypergraph,
    order: Vec<usize>,
    edges_of: Vec<Vec<usize>>,
    prefixes: std::collections::HashSet<Vec<usize>>,
    completions: std::collections::HashMap<Vec<usize>, Vec<usize>>,
    injective: bool,
}

impl SearchContext<'_> {
    /// When some incident edge is one slot short of complete, its
    /// completions are the only viable images for `v`.
    fn candidate_list(&self, v: usize, assignment: &[usize], scratch: &mut Vec<usize>) -> Option<&[usize]> {
        'edges: for &ei in &self.edges_of[v] {
            let e = &self.f.edges()[ei];
            if e.iter().filter(|&&u| u == v).count() != 1 {
                continue;
            }
            scratch.clear();
            for &u in e {
                if u == v {
                    continue;
                }
                if assignment[u] == usize::MAX {
                    continue 'edges;
                }
                scratch.push(assignment[u]);
            }
            scratch.sort_unstable();
            return Some(
                self.completions
                    .get(scratch.as_slice())
                    .map(|list| list.as_slice())
                    .unwrap_or(&[]),
            );
        }
        None
    }

    /// Every incident edge of `v` must stay viable under assignment[v] = c:
    /// complete edges must be host edges, partial ones host sub-multisets.
    fn edges_viable(&self, v: usize, assignment: &[usize], scratch: &mut Vec<usize>) -> bool {
        for &ei in &self.edges_of[v] {
            let e = &self.f.edges()[ei];
            scratch.clear();
            let mut complete = true;
            for &u in e {
                if assignment[u] == usize::MAX {
                    complete = false;
                } else {
                    scratch.push(assignment[u]);
                }
            }
            scratch.sort_unstable();
            let viable = if complete {
                self.h.has_edge_sorted(scratch)
            } else {
                self.prefixes.contains(scratch.as_slice())
            };
            if !viable {
                return false;
            }
        }
        true
    }
}

fn descend(
    ctx: &SearchContext<'_>,
    depth: usize,
    assignment: &mut Vec<usize>,
    used: &mut Vec<bool>,
    scratch: &mut Vec<usize>,
    count: &mut u64,
) {
    if depth == ctx.order.len() {
        *count += 1;
        return;
    }
    let v = ctx.order[depth];
    let last = depth + 1 == ctx.order.len();
    let narrowed = ctx.candidate_list(v, assignment, scratch);
    let all;
    let candidates: &[usize] = match narrowed {
        Some(list) => list,
        None => {
            all = (0..ctx.h.n()).collect::<Vec<usize>>();
            &all
        }
    };
    for &c in candidates {
        if ctx.injective && used[c] {
            continue;
        }
        assignment[v] = c;
        if !ctx.edges_viable(v, assignment, scratch) {
            assignment[v] = usize::MAX;
            continue;
        }
        if last {
            *count += 1;
            assignment[v] = usize::MAX;
            continue;
        }
        used[c] = ctx.injective;
        descend(ctx, depth + 1, assignment, used, scratch, count);
        used[c] = false;
        assignment[v] = usize::MAX;
    }
}

fn all_sub_multisets(edge: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &v in edge {
        let mut extended = out.clone();
        for s in &mut extended {
            s.push(v);
        }
        out.extend(extended);
    }
    for s in &mut out {
        s.sort_unstable();
    }
    out.sort();
    out.dedup();
    out
}

/// Number of labeled circuits of type pi and length 2*ell, via the trace of
/// the ell-th power of the flattened matrix. Equals the brute-force
/// homomorphism count of the cycle template.
pub fn count_circuits_trace(
    h: &Hypergraph,
    pi_unordered: &[usize],
    ell: usize,
    matrix_cap: usize,
) -> Result<u64> {
    let pi = OrderedPartition::canonical(pi_unordered.to_vec())?;
    count_circuits_trace_ordered(h, &pi, ell, matrix_cap)
}

/// Trace-based circuit count under a specific ordering of pi; the result is
/// ordering-independent, which the test suite exercises directly.
pub fn count_circuits_trace_ordered(
    h: &Hypergraph,
    pi: &OrderedPartition,
    ell: usize,
    matrix_cap: usize,
) -> Result<u64> {
    if ell < 2 {
        return Err(Error::Invalid("circuit length needs ell >= 2".into()));
    }
    let tau = adjacency_map(h);
    let flat = flatten_matrix(&tau, &pi, matrix_cap)?;
    let trace = if flat.dim() <= 512 {
        // entries are counts, so exact integer powering is available
        let entries = flat.to_integer(1e-6)?;
        integer_power_trace(&entries, flat.dim(), ell)
    } else {
        let mut power = flat.clone();
        for _ in 1..ell {
            power = power.matmul(&flat);
        }
        let t = power.trace();
        let rounded = t.round();
        if (t - rounded).abs() > 1e-6 {
            return Err(Error::RoundingResidual((t - rounded).abs()));
        }
        rounded as i128
    };
    if trace < 0 {
        return Err(Error::Invalid(format!(
            "negative circuit trace {trace}; numerical failure"
        )));
    }
    u64::try_from(trace).map_err(|_| Error::Invalid("circuit count exceeds u64".into()))
}

fn integer_power_trace(entries: &[i128], dim: usize, ell: usize) -> i128 {
    let mut power = entries.to_vec();
    for _ in 1..ell {
        let mut next = vec![0i128; dim * dim];
        for i in 0..dim {
            for l in 0..dim {
                let a = power[i * dim + l];
                if a == 0 {
                    continue;
                }
                for j in 0..dim {
                    next[i * dim + j] += a * entries[l * dim + j];
                }
            }
        }
        power = next;
    }
    (0..dim).map(|i| power[i * dim + i]).sum()
}

/// e(S_1, ..., S_t): ordered tuples whose multiset union is an edge.
pub fn count_partite_edges(h: &Hypergraph, family: &SubsetFamily) -> Result<u64> {
    let mut count = 0u64;
    let t = family.parts.len();
    let mut picks = vec![0usize; t];
    if family.parts.iter().any(|p| p.is_empty()) {
        return Ok(0);
    }
    loop {
        let mut union: Vec<usize> = Vec::with_capacity(h.k());
        for (i, &pick) in picks.iter().enumerate() {
            union.extend_from_slice(&family.parts[i][pick]);
        }
        if union.len() != h.k() {
            return Err(Error::ArityMismatch {
                expected: h.k(),
                found: union.len(),
            });
        }
        union.sort_unstable();
        if h.has_edge_sorted(&union) {
            count += 1;
        }
        // odometer
        let mut axis = t;
        loop {
            if axis == 0 {
                return Ok(count);
            }
            axis -= 1;
            picks[axis] += 1;
            if picks[axis] < family.parts[axis].len() {
                break;
            }
            picks[axis] = 0;
        }
    }
}

/// Counts labeled copies of a pi-linear template by the extension recursion:
/// enumerate embeddings of F minus its last witness edge, build the extension
/// families S_i, and sum e(S_1,...,S_t) * prod Delta_i.
pub fn count_via_extension(
    f: &Hypergraph,
    pi_unordered: &[usize],
    h: &Hypergraph,
    caps: &crate::Caps,
) -> Result<u64> {
    let pi = OrderedPartition::canonical(pi_unordered.to_vec())?;
    let witness = is_pi_linear(f, &pi, caps.pilinear_edges)?
        .ok_or_else(|| Error::NotPiLinear(pi.to_string()))?;
    if f.n() > caps.count_vertices {
        return Err(Error::CapExceeded {
            what: "template vertex count".into(),
            needed: f.n(),
            cap: caps.count_vertices,
        });
    }
    if f.edge_count() == 0 {
        return count_labeled_copies(f, h, caps.count_vertices);
    }

    let last_pos = witness.edge_order.len() - 1;
    let last_edge_idx = witness.edge_order[last_pos];
    let last_parts = &witness.partitions[last_pos];
    let last_edge = &f.edges()[last_edge_idx];

    // residual template: delete the last edge's vertices
    let mut new_id = vec![usize::MAX; f.n()];
    let mut residual_vertices = 0usize;
    for v in 0..f.n() {
        if !last_edge.contains(&v) {
            new_id[v] = residual_vertices;
            residual_vertices += 1;
        }
    }
    let mut residual_edges = Vec::new();
    let mut attached: Vec<Vec<usize>> = vec![Vec::new(); pi.t()]; // R_s edge indices
    for (ei, e) in f.edges().iter().enumerate() {
        if ei == last_edge_idx {
            continue;
        }
        let inter: Vec<usize> = e.iter().copied().filter(|v| last_edge.contains(v)).collect();
        if inter.is_empty() {
            residual_edges.push(e.iter().map(|&v| new_id[v]).collect::<Vec<usize>>());
        } else {
            let s = last_parts
                .iter()
                .position(|part| inter.iter().all(|v| part.contains(v)))
                .expect("pi-linearity witness covers every earlier edge");
            attached[s].push(ei);
        }
    }
    let residual = Hypergraph::new(
        f.k(),
        residual_vertices.max(1),
        residual_edges,
        f.loops_allowed(),
    )?;
    // a degenerate residual with zero vertices still admits exactly one
    // (empty) embedding; Hypergraph needs n >= 1, so track the true count
    let residual_is_empty = residual_vertices == 0;

    // Delta_s: relabelings of A_s fixing the residual and preserving R_s
    let deltas: Vec<u64> = (0..pi.t())
        .map(|s| count_relabelings(f, &last_parts[s], &attached[s]))
        .collect();
    let delta_product: u64 = deltas.iter().product();

    let mut total = 0u64;
    let mut embedding = vec![usize::MAX; residual_vertices];
    let mut used = vec![false; h.n()];
    enumerate_embeddings(
        &residual,
        residual_is_empty,
        h,
        0,
        &mut embedding,
        &mut used,
        &mut |emb, used| {
            let e_count = extension_edge_count(f, h, pi.t(), last_parts, &attached, &new_id, emb, used);
            total += e_count * delta_product;
        },
    );
    Ok(total)
}

/// Permutations of `part` (inside the last edge) that map every attached
/// edge onto an attached edge while fixing all other vertices.
fn count_relabelings(f: &Hypergraph, part: &[usize], attached: &[usize]) -> u64 {
    let mut perm: Vec<usize> = (0..part.len()).collect();
    let mut count = 0u64;
    permute_all(&mut perm, 0, &mut |perm| {
        let map = |v: usize| -> usize {
            match part.iter().position(|&p| p == v) {
                Some(i) => part[perm[i]],
                None => v,
            }
        };
        for &ei in attached {
            let mut image: Vec<usize> = f.edges()[ei].iter().map(|&v| map(v)).collect();
            image.sort_unstable();
            let ok = attached
                .iter()
                .any(|&ej| f.edges()[ej] == image);
            if !ok {
                return false;
            }
        }
        true
    }, &mut count);
    count
}

fn permute_all(
    perm: &mut Vec<usize>,
    from: usize,
    accept: &mut impl FnMut(&[usize]) -> bool,
    count: &mut u64,
) {
    if from == perm.len() {
        if accept(perm) {
            *count += 1;
        }
        return;
    }
    for i in from..perm.len() {
        perm.swap(from, i);
        permute_all(perm, from + 1, accept, count);
        perm.swap(from, i);
    }
}

fn enumerate_embeddings(
    residual: &Hypergraph,
    residual_is_empty: bool,
    h: &Hypergraph,
    depth: usize,
    embedding: &mut Vec<usize>,
    used: &mut Vec<bool>,
    callback: &mut impl FnMut(&[usize], &[bool]),
) {
    if residual_is_empty || depth == embedding.len() {
        callback(embedding, used);
        return;
    }
    'candidates: for c in 0..h.n() {
        if used[c] {
            continue;
        }
        embedding[depth] = c;
        for e in residual.edges() {
            if !e.contains(&depth) || e.iter().any(|&u| u > depth) {
                continue; // incomplete edges are checked once their last vertex lands
            }
            let mut imgs: Vec<usize> = e.iter().map(|&u| embedding[u]).collect();
            imgs.sort_unstable();
            if !h.has_edge_sorted(&imgs) {
                embedding[depth] = usize::MAX;
                continue 'candidates;
            }
        }
        used[c] = true;
        enumerate_embeddings(residual, false, h, depth + 1, embedding, used, callback);
        used[c] = false;
        embedding[depth] = usize::MAX;
    }
}

/// The number of ways to extend one residual embedding by an edge of H:
/// ordered tuples of pairwise disjoint sets (Y_1, ..., Y_t), Y_s usable for
/// part s, whose union is an edge avoiding the embedded image.
#[allow(clippy::too_many_arguments)]
fn extension_edge_count(
    f: &Hypergraph,
    h: &Hypergraph,
    t: usize,
    last_parts: &[Vec<usize>],
    attached: &[Vec<usize>],
    new_id: &[usize],
    embedding: &[usize],
    used: &[bool],
) -> u64 {
    let available: Vec<usize> = (0..h.n()).filter(|&v| !used[v]).collect();
    let mut families: Vec<Vec<Vec<usize>>> = Vec::with_capacity(t);
    for s in 0..t {
        let part = &last_parts[s];
        let mut family = Vec::new();
        let mut subset = vec![0usize; part.len()];
        combinations(&available, part.len(), &mut subset, 0, 0, &mut |y| {
            if part_usable(f, h, part, &attached[s], new_id, embedding, y) {
                family.push(y.to_vec());
            }
        });
        if family.is_empty() {
            return 0;
        }
        families.push(family);
    }
    // ordered tuples of pairwise disjoint picks whose union is an edge
    let mut count = 0u64;
    let mut picks = vec![0usize; t];
    loop {
        let mut union: Vec<usize> = Vec::new();
        for (s, &p) in picks.iter().enumerate() {
            union.extend_from_slice(&families[s][p]);
        }
        union.sort_unstable();
        let disjoint = union.windows(2).all(|w| w[0] != w[1]);
        if disjoint && h.has_edge_sorted(&union) {
            count += 1;
        }
        let mut axis = t;
        loop {
            if axis == 0 {
                return count;
            }
            axis -= 1;
            picks[axis] += 1;
            if picks[axis] < families[axis].len() {
                break;
            }
            picks[axis] = 0;
        }
    }
}

/// Does some bijection part -> y extend the embedding edge-preservingly on
/// the attached edges?
fn part_usable(
    f: &Hypergraph,
    h: &Hypergraph,
    part: &[usize],
    attached: &[usize],
    new_id: &[usize],
    embedding: &[usize],
    y: &[usize],
) -> bool {
    if attached.is_empty() {
        return true;
    }
    let mut perm: Vec<usize> = (0..part.len()).collect();
    let mut found = 0u64;
    permute_all(&mut perm, 0, &mut |perm| {
        for &ei in attached {
            let mut image = Vec::with_capacity(f.k());
            for &v in &f.edges()[ei] {
                match part.iter().position(|&p| p == v) {
                    Some(i) => image.push(y[perm[i]]),
                    None => image.push(embedding[new_id[v]]),
                }
            }
            image.sort_unstable();
            if !h.has_edge_sorted(&image) {
                return false;
            }
        }
        true
    }, &mut found);
    found > 0
}

fn combinations(
    pool: &[usize],
    size: usize,
    scratch: &mut Vec<usize>,
    depth: usize,
    from: usize,
    callback: &mut impl FnMut(&[usize]),
) {
    if depth == size {
        callback(scratch);
        return;
    }
    for i in from..pool.len() {
        scratch[depth] = pool[i];
        combinations(pool, size, scratch, depth + 1, i + 1, callback);
    }
}

/// Both routes of the partial-step extension count: brute-force pinned
/// homomorphisms and the tensor-power coefficient. `delta` gives, per
/// A-block, the host images in (code, expansion) order.
pub fn count_extension_oracle(
    pi: &OrderedPartition,
    s: usize,
    h: &Hypergraph,
    delta: &[Vec<usize>],
    caps: &crate::Caps,
) -> Result<(u64, u64)> {
    let template = build_partial_step(pi, s)?;
    let a_blocks = template.a_blocks();
    if delta.len() != a_blocks.len() {
        return Err(Error::ArityMismatch {
            expected: a_blocks.len(),
            found: delta.len(),
        });
    }
    let mut pins = Vec::new();
    for (block, images) in a_blocks.iter().zip(delta) {
        if block.len() != images.len() {
            return Err(Error::DimMismatch(format!(
                "A-block of size {} given {} images",
                block.len(),
                images.len()
            )));
        }
        for (&v, &img) in block.iter().zip(images) {
            pins.push((v, img));
        }
    }
    let brute = count_homomorphisms_pinned(&template.graph, h, &pins, caps.count_vertices.max(template.graph.n()))?;

    let grouped = adjacency_map(h).group(pi)?;
    let budget = caps.matrix_dim.saturating_mul(caps.matrix_dim);
    let mut size = 1usize;
    for (i, &d) in grouped.dims().iter().enumerate().take(pi.t() - s) {
        let _ = i;
        size = size
            .checked_mul(d.checked_pow(1 << s).ok_or_else(|| {
                Error::DimMismatch("power tensor dimension overflows".into())
            })?)
            .ok_or_else(|| Error::DimMismatch("power tensor size overflows".into()))?;
    }
    if size > budget {
        return Err(Error::CapExceeded {
            what: "power tensor size".into(),
            needed: size,
            cap: budget,
        });
    }
    let power = grouped.power(s)?;
    let idx: Vec<usize> = delta.iter().map(|tuple| tuple_index(tuple, h.n())).collect();
    let value = power.coeff(&idx);
    let rounded = value.round();
    if (value - rounded).abs() > 1e-6 {
        return Err(Error::RoundingResidual((value - rounded).abs()));
    }
    Ok((brute, rounded as u64))
}

/// Walk counts with both attach tuples pinned: the (r, c) entry of the
/// ell-th power of the flat matrix.
pub fn walk_matrix(h: &Hypergraph, pi: &OrderedPartition, ell: usize, cap: usize) -> Result<FlatMatrix> {
    let tau = adjacency_map(h);
    let flat = flatten_matrix(&tau, pi, cap)?;
    let mut power = flat.clone();
    for _ in 1..ell {
        power = power.matmul(&flat);
    }
    Ok(power)
}

/// Homomorphism count of the cycle template, the brute-force side of the
/// trace identity.
pub fn count_circuits_brute(
    h: &Hypergraph,
    pi_unordered: &[usize],
    ell: usize,
    cap: usize,
) -> Result<u64> {
    let cycle = build_cycle(pi_unordered, ell)?;
    count_homomorphisms(&cycle.graph, h, cap.max(cycle.graph.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{factorial, gen_coregular_sum, gen_random, Hypergraph};
    use crate::templates::build_path;

    fn k3() -> Hypergraph {
        Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], false).unwrap()
    }

    fn path3() -> Hypergraph {
        Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2]], false).unwrap()
    }

    #[test]
    fn single_edge_copies_count_orderings() {
        let f = Hypergraph::new(3, 3, vec![vec![0, 1, 2]], false).unwrap();
        let h = gen_random(3, 6, 0.5, 5).unwrap();
        let copies = count_labeled_copies(&f, &h, 12).unwrap();
        assert_eq!(copies, factorial(3) * h.edge_count() as u64);
    }

    #[test]
    fn path_in_triangle() {
        assert_eq!(count_labeled_copies(&path3(), &k3(), 12).unwrap(), 6);
    }

    #[test]
    fn four_cycle_in_k4() {
        let c4 = build_cycle(&[1, 1], 2).unwrap();
        let k4 = gen_random(2, 4, 1.0, 0).unwrap();
        assert_eq!(count_labeled_copies(&c4.graph, &k4, 12).unwrap(), 24);
    }

    #[test]
    fn homomorphism_examples() {
        let edge = Hypergraph::new(2, 2, vec![vec![0, 1]], false).unwrap();
        assert_eq!(count_homomorphisms(&edge, &k3(), 12).unwrap(), 6);

        let c4 = build_cycle(&[1, 1], 2).unwrap();
        assert_eq!(count_homomorphisms(&c4.graph, &k3(), 12).unwrap(), 18);

        let empty = Hypergraph::empty(2, 4, false).unwrap();
        assert_eq!(count_homomorphisms(&c4.graph, &empty, 12).unwrap(), 0);
    }

    #[test]
    fn injections_bounded_by_homomorphisms() {
        let f = path3();
        for seed in 0..5 {
            let h = gen_random(2, 5, 0.5, seed).unwrap();
            let inj = count_labeled_copies(&f, &h, 12).unwrap();
            let hom = count_homomorphisms(&f, &h, 12).unwrap();
            assert!(inj <= hom);
        }
    }

    #[test]
    fn trace_matches_brute_force_on_triangle() {
        let circuits = count_circuits_trace(&k3(), &[1, 1], 2, 4096).unwrap();
        assert_eq!(circuits, 18);
        assert_eq!(count_circuits_brute(&k3(), &[1, 1], 2, 12).unwrap(), 18);

        let empty = Hypergraph::empty(2, 4, false).unwrap();
        assert_eq!(count_circuits_trace(&empty, &[1, 1], 2, 4096).unwrap(), 0);
    }

    #[test]
    fn trace_matches_brute_force_on_loop_hypergraph() {
        let h = gen_coregular_sum(3, 5, &[0]).unwrap();
        let via_trace = count_circuits_trace(&h, &[1, 2], 2, 4096).unwrap();
        let via_brute = count_circuits_brute(&h, &[1, 2], 2, 12).unwrap();
        assert_eq!(via_trace, via_brute);
    }

    #[test]
    fn partite_edges_examples() {
        let pi = OrderedPartition::new(vec![1, 1]).unwrap();
        let family = SubsetFamily::new(
            &pi,
            3,
            vec![vec![vec![0]], vec![vec![1], vec![2]]],
        )
        .unwrap();
        assert_eq!(count_partite_edges(&k3(), &family).unwrap(), 2);

        let empty_family = SubsetFamily::new(&pi, 3, vec![vec![], vec![vec![1]]]).unwrap();
        assert_eq!(count_partite_edges(&k3(), &empty_family).unwrap(), 0);
    }

    #[test]
    fn partite_edges_matches_tensor_evaluation() {
        // double-count oracle: e(S_1, S_2) equals the grouped adjacency map
        // evaluated on indicator tensors
        let h = gen_coregular_sum(3, 4, &[0]).unwrap();
        let pi = OrderedPartition::new(vec![1, 2]).unwrap();
        let s1: Vec<Vec<usize>> = (0..4).map(|v| vec![v]).collect();
        let s2: Vec<Vec<usize>> = crate::hypergraph::enumerate_multisets(4, 2);
        let family = SubsetFamily::new(&pi, 4, vec![s1.clone(), s2.clone()]).unwrap();
        let direct = count_partite_edges(&h, &family).unwrap();

        let grouped = adjacency_map(&h).group(&pi).unwrap();
        let mut chi1 = vec![0.0; 4];
        for m in &s1 {
            chi1[m[0]] = 1.0;
        }
        let mut chi2 = vec![0.0; 16];
        for m in &s2 {
            chi2[tuple_index(m, 4)] = 1.0;
        }
        let via_tensor = grouped.evaluate(&[&chi1, &chi2]).unwrap();
        assert_eq!(direct as f64, via_tensor);
    }

    #[test]
    fn extension_count_single_edge() {
        let f = Hypergraph::new(2, 2, vec![vec![0, 1]], false).unwrap();
        let h = gen_random(2, 6, 0.5, 1).unwrap();
        let via_ext = count_via_extension(&f, &[1, 1], &h, &crate::Caps::default()).unwrap();
        assert_eq!(via_ext, 2 * h.edge_count() as u64);
    }

    #[test]
    fn extension_count_matches_direct() {
        let caps = crate::Caps::default();
        let cases: Vec<(Hypergraph, Vec<usize>, Hypergraph)> = vec![
            (path3(), vec![1, 1], k3()),
            (
                build_cycle(&[1, 1], 2).unwrap().graph,
                vec![1, 1],
                gen_random(2, 4, 1.0, 0).unwrap(),
            ),
            (
                build_path(&OrderedPartition::new(vec![1, 2]).unwrap(), 2).unwrap().graph,
                vec![1, 2],
                gen_random(3, 6, 0.6, 3).unwrap(),
            ),
        ];
        for (f, pi, h) in cases {
            let direct = count_labeled_copies(&f, &h, 12).unwrap();
            let via_ext = count_via_extension(&f, &pi, &h, &caps).unwrap();
            assert_eq!(direct, via_ext, "pi = {pi:?}");
        }
    }

    #[test]
    fn extension_rejects_non_linear() {
        let f = Hypergraph::new(3, 4, vec![vec![0, 1, 2], vec![0, 1, 3]], false).unwrap();
        let h = gen_random(3, 5, 0.5, 1).unwrap();
        assert!(matches!(
            count_via_extension(&f, &[1, 1, 1], &h, &crate::Caps::default()),
            Err(Error::NotPiLinear(_))
        ));
    }

    #[test]
    fn oracle_base_case_is_edge_indicator() {
        let pi = OrderedPartition::new(vec![1, 2]).unwrap();
        let h = gen_coregular_sum(3, 4, &[0]).unwrap();
        let caps = crate::Caps::default();
        // delta assigns all of D_{pi,0}'s vertices (a single edge)
        for edge in h.edges().iter().take(3) {
            let delta = vec![vec![edge[0]], vec![edge[1], edge[2]]];
            let (brute, tensor) = count_extension_oracle(&pi, 0, &h, &delta, &caps).unwrap();
            assert_eq!(brute, 1);
            assert_eq!(tensor, 1);
        }
        let delta = vec![vec![0], vec![0, 1]];
        let is_edge = h.has_edge(&[0, 0, 1]);
        let (brute, tensor) = count_extension_oracle(&pi, 0, &h, &delta, &caps).unwrap();
        assert_eq!(brute, u64::from(is_edge));
        assert_eq!(tensor, brute);
    }

    #[test]
    fn oracle_full_step_matches_flat_matrix() {
        let pi = OrderedPartition::new(vec![1, 1]).unwrap();
        let h = k3();
        let caps = crate::Caps::default();
        let flat = walk_matrix(&h, &pi, 1, 4096).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                let delta = vec![vec![u, v]];
                let (brute, tensor) = count_extension_oracle(&pi, 1, &h, &delta, &caps).unwrap();
                assert_eq!(brute, tensor);
                assert_eq!(brute as f64, flat.get(u, v));
            }
        }
    }

    #[test]
    fn walk_counts_match_pinned_homomorphisms() {
        let pi = OrderedPartition::new(vec![1, 1]).unwrap();
        let h = gen_random(2, 4, 0.7, 9).unwrap();
        let ell = 2;
        let power = walk_matrix(&h, &pi, ell, 4096).unwrap();
        let path = build_path(&pi, ell).unwrap();
        let [start, end] = path.attach.clone().unwrap();
        for u in 0..4 {
            for v in 0..4 {
                let pins = vec![(start[0], u), (end[0], v)];
                let brute =
                    count_homomorphisms_pinned(&path.graph, &h, &pins, 12).unwrap();
                assert_eq!(brute as f64, power.get(u, v), "walk ({u}, {v})");
            }
        }
    }
}
