//! Pattern hypergraphs built from binary-code labelings.
//!
//! A step of type (k_1,...,k_t) has an A-block of 2^(t-1) coded vertex groups
//! and B-blocks B_2..B_t of 2^(t-2) coded groups; the edge through an A-code
//! picks the B_j group whose code is the A-code with bit j-1 removed (1-based).
//! Paths glue consecutive steps along their attach tuples, cycles close the
//! path up, and partial steps interpolate between a single edge (s = 0) and
//! the full step (s = t-1). Attach tuples list A-vertices with final code bit
//! 0 (resp. 1) in lexicographic code order, ties broken by expansion index.

mod iso;
mod pilinear;

pub use iso::are_isomorphic;
pub use pilinear::{is_pi_linear, verify_pi_linear_witness, PiLinearWitness};

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// An ordered proper partition (k_1, ..., k_t) of k, t >= 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct OrderedPartition {
    parts: Vec<usize>,
}

impl OrderedPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least two parts, got {parts:?}"
            )));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "parts must be positive, got {parts:?}"
            )));
        }
        Ok(OrderedPartition { parts })
    }

    /// Canonical (nondecreasing) ordering of an unordered partition.
    pub fn canonical(mut parts: Vec<usize>) -> Result<Self> {
        parts.sort_unstable();
        OrderedPartition::new(parts)
    }

    /// Parses the `1+2` CLI syntax, keeping the written order.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<usize>, _> =
            s.split('+').map(|w| w.trim().parse::<usize>()).collect();
        match parts {
            Ok(parts) => OrderedPartition::new(parts),
            Err(_) => Err(Error::InvalidPartition(format!("cannot parse '{s}'"))),
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn t(&self) -> usize {
        self.parts.len()
    }

    /// All distinct orderings of this partition's multiset of parts.
    pub fn orderings(&self) -> Vec<OrderedPartition> {
        let mut sorted = self.parts.clone();
        sorted.sort_unstable();
        let mut out = std::collections::BTreeSet::new();
        permute_distinct(&mut sorted, 0, &mut out);
        out.into_iter()
            .map(|parts| OrderedPartition { parts })
            .collect()
    }

    /// All proper partitions of k in canonical nondecreasing form.
    pub fn all_proper(k: usize) -> Vec<OrderedPartition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(remaining: usize, min: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if remaining == 0 {
                if current.len() >= 2 {
                    out.push(current.clone());
                }
                return;
            }
            for part in min..=remaining {
                current.push(part);
                rec(remaining - part, part, current, out);
                current.pop();
            }
        }
        let mut raw = Vec::new();
        rec(k, 1, &mut current, &mut raw);
        raw.sort();
        for parts in raw {
            out.push(OrderedPartition { parts });
        }
        out
    }

    /// True when self's parts can be grouped so the group sums are exactly
    /// the parts of `coarse` (both read as unordered partitions).
    pub fn refines(&self, coarse: &OrderedPartition) -> bool {
        if self.k() != coarse.k() {
            return false;
        }
        let mut fine = self.parts.clone();
        fine.sort_unstable_by(|a, b| b.cmp(a));
        let mut room = coarse.parts.clone();
        fn place(fine: &[usize], room: &mut Vec<usize>) -> bool {
            let Some((&first, rest)) = fine.split_first() else {
                return room.iter().all(|&r| r == 0);
            };
            let mut seen = std::collections::BTreeSet::new();
            for i in 0..room.len() {
                if room[i] >= first && seen.insert(room[i]) {
                    room[i] -= first;
                    if place(rest, room) {
                        return true;
                    }
                    room[i] += first;
                }
            }
            false
        }
        place(&fine, &mut room)
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", words.join("+"))
    }
}

fn permute_distinct(parts: &mut Vec<usize>, from: usize, out: &mut std::collections::BTreeSet<Vec<usize>>) {
    if from == parts.len() {
        out.insert(parts.clone());
        return;
    }
    for i in from..parts.len() {
        parts.swap(from, i);
        permute_distinct(parts, from + 1, out);
        parts.swap(from, i);
    }
}

/// A labeled pattern hypergraph.
#[derive(Clone, Debug, Serialize)]
pub struct TemplateVertex {
    pub part: String,
    pub code: String,
    pub expansion: usize,
}

#[derive(Clone, Debug)]
pub struct Template {
    pub name: String,
    pub pi: OrderedPartition,
    pub graph: Hypergraph,
    pub vertices: Vec<TemplateVertex>,
    /// Attach tuples where defined (steps, paths, full partial steps).
    pub attach: Option<[Vec<usize>; 2]>,
    blocks: BTreeMap<String, Vec<usize>>,
}

impl Template {
    fn assemble(
        name: String,
        pi: OrderedPartition,
        k: usize,
        vertices: Vec<TemplateVertex>,
        edges: Vec<Vec<usize>>,
        attach: Option<[Vec<usize>; 2]>,
    ) -> Result<Template> {
        let mut blocks: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (id, v) in vertices.iter().enumerate() {
            blocks.entry(v.part.clone()).or_default().push(id);
        }
        let graph = Hypergraph::new(k, vertices.len(), edges, false)?;
        Ok(Template {
            name,
            pi,
            graph,
            vertices,
            attach,
            blocks,
        })
    }

    /// Vertex ids of one part, in (code, expansion) order.
    pub fn block(&self, part: &str) -> Option<&[usize]> {
        self.blocks.get(part).map(|v| v.as_slice())
    }

    /// The A-type blocks in index order ("A" alone, or "A1", "A2", ...).
    pub fn a_blocks(&self) -> Vec<&[usize]> {
        if let Some(b) = self.block("A") {
            return vec![b];
        }
        let mut named: Vec<(usize, &[usize])> = self
            .blocks
            .iter()
            .filter_map(|(name, ids)| {
                let idx: usize = name.strip_prefix('A')?.parse().ok()?;
                Some((idx, ids.as_slice()))
            })
            .collect();
        named.sort_by_key(|(idx, _)| *idx);
        named.into_iter().map(|(_, ids)| ids).collect()
    }

    /// JSON sidecar with the labels and attach tuples.
    pub fn sidecar_json(&self) -> String {
        let value = serde_json::json!({
            "name": self.name,
            "pi": self.pi.parts(),
            "k": self.graph.k(),
            "vertices": self.vertices,
            "attach": self.attach,
        });
        serde_json::to_string_pretty(&value).unwrap()
    }
}

/// All binary strings of the given length in lexicographic order.
fn binary_codes(len: usize) -> Vec<String> {
    (0..1usize << len)
        .map(|x| {
            (0..len)
                .map(|i| {
                    if x >> (len - 1 - i) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect()
        })
        .collect()
}

fn delete_bit(code: &str, pos: usize) -> String {
    code.char_indices()
        .filter_map(|(i, c)| (i != pos).then_some(c))
        .collect()
}

/// The step of the given type, with its two attach tuples.
pub fn build_step(pi: &OrderedPartition) -> Template {
    let t = pi.t();
    let parts = pi.parts();
    let mut vertices = Vec::new();
    let mut index: BTreeMap<(String, String, usize), usize> = BTreeMap::new();
    let push = |vertices: &mut Vec<TemplateVertex>,
                    index: &mut BTreeMap<(String, String, usize), usize>,
                    part: String,
                    code: String,
                    expansion: usize| {
        index.insert((part.clone(), code.clone(), expansion), vertices.len());
        vertices.push(TemplateVertex {
            part,
            code,
            expansion,
        });
    };
    for code in binary_codes(t - 1) {
        for z in 1..=parts[0] {
            push(&mut vertices, &mut index, "A".into(), code.clone(), z);
        }
    }
    for j in 2..=t {
        for code in binary_codes(t - 2) {
            for z in 1..=parts[j - 1] {
                push(&mut vertices, &mut index, format!("B{j}"), code.clone(), z);
            }
        }
    }
    let mut edges = Vec::new();
    for code in binary_codes(t - 1) {
        let mut edge = Vec::new();
        for z in 1..=parts[0] {
            edge.push(index[&("A".into(), code.clone(), z)]);
        }
        for j in 2..=t {
            let b_code = delete_bit(&code, j - 2);
            for z in 1..=parts[j - 1] {
                edge.push(index[&(format!("B{j}"), b_code.clone(), z)]);
            }
        }
        edges.push(edge);
    }
    let attach = attach_tuples(&vertices);
    Template::assemble(
        format!("step_{pi}"),
        pi.clone(),
        pi.k(),
        vertices,
        edges,
        Some(attach),
    )
    .expect("step construction is always valid")
}

/// Attach tuples of a step-like vertex list: A-vertices whose code ends in
/// '0' (resp. '1'), lexicographic by code and then by expansion index.
fn attach_tuples(vertices: &[TemplateVertex]) -> [Vec<usize>; 2] {
    let mut ends = [Vec::new(), Vec::new()];
    for (id, v) in vertices.iter().enumerate() {
        if v.part == "A" {
            match v.code.chars().last() {
                Some('0') => ends[0].push(id),
                Some('1') => ends[1].push(id),
                _ => {}
            }
        }
    }
    ends
}

/// The partial step D_{pi,s}: a single edge at s = 0, the full step at s = t-1.
pub fn build_partial_step(pi: &OrderedPartition, s: usize) -> Result<Template> {
    let t = pi.t();
    if s > t - 1 {
        return Err(Error::Invalid(format!(
            "expansion stage s = {s} out of range 0..={}",
            t - 1
        )));
    }
    let parts = pi.parts();
    let a_count = t - s;
    let a_name = |i: usize| {
        if a_count == 1 {
            "A".to_string()
        } else {
            format!("A{i}")
        }
    };
    let mut vertices = Vec::new();
    let mut index: BTreeMap<(String, String, usize), usize> = BTreeMap::new();
    for i in 1..=a_count {
        for code in binary_codes(s) {
            for z in 1..=parts[i - 1] {
                let part = a_name(i);
                index.insert((part.clone(), code.clone(), z), vertices.len());
                vertices.push(TemplateVertex {
                    part,
                    code: code.clone(),
                    expansion: z,
                });
            }
        }
    }
    for j in a_count + 1..=t {
        for code in binary_codes(s - 1) {
            for z in 1..=parts[j - 1] {
                let part = format!("B{j}");
                index.insert((part.clone(), code.clone(), z), vertices.len());
                vertices.push(TemplateVertex {
                    part,
                    code: code.clone(),
                    expansion: z,
                });
            }
        }
    }
    let mut edges = Vec::new();
    for code in binary_codes(s) {
        let mut edge = Vec::new();
        for i in 1..=a_count {
            for z in 1..=parts[i - 1] {
                edge.push(index[&(a_name(i), code.clone(), z)]);
            }
        }
        for jj in 1..=s {
            let j = a_count + jj;
            let b_code = delete_bit(&code, jj - 1);
            for z in 1..=parts[j - 1] {
                edge.push(index[&(format!("B{j}"), b_code.clone(), z)]);
            }
        }
        edges.push(edge);
    }
    let attach = (s == t - 1).then(|| attach_tuples(&vertices));
    Template::assemble(
        format!("partial_{pi}_s{s}"),
        pi.clone(),
        pi.k(),
        vertices,
        edges,
        attach,
    )
}

/// The path of type pi and length 2*ell: ell steps glued along attach tuples.
pub fn build_path(pi: &OrderedPartition, ell: usize) -> Result<Template> {
    if ell < 1 {
        return Err(Error::Invalid("path length parameter ell must be >= 1".into()));
    }
    build_chain(pi, ell, false, format!("path_{pi}_len{}", 2 * ell))
}

/// The cycle of type pi and length 2*ell, using the canonical ordering of pi.
pub fn build_cycle(pi_unordered: &[usize], ell: usize) -> Result<Template> {
    let pi = OrderedPartition::canonical(pi_unordered.to_vec())?;
    build_cycle_ordered(&pi, ell)
}

/// The cycle built from a specific ordering of pi (isomorphic across orderings).
pub fn build_cycle_ordered(pi: &OrderedPartition, ell: usize) -> Result<Template> {
    if ell < 2 {
        return Err(Error::Invalid(
            "cycles need ell >= 2; the 2-step case is not defined".into(),
        ));
    }
    build_chain(pi, ell, true, format!("cycle_{pi}_len{}", 2 * ell))
}

/// Shared construction for paths and cycles.
///
/// Interface r holds the shared A-vertices between consecutive steps, keyed
/// by (prefix code, expansion); a full A-code of step i with last bit b lives
/// on interface i-1+b. Identification of successive attach tuples is then
/// automatic because both tuples are ordered by (prefix, expansion).
fn build_chain(pi: &OrderedPartition, ell: usize, cyclic: bool, name: String) -> Result<Template> {
    let t = pi.t();
    let parts = pi.parts();
    let k1 = parts[0];
    let prefixes = binary_codes(t - 2);
    let interfaces = if cyclic { ell } else { ell + 1 };

    let mut vertices = Vec::new();
    let mut iface_ids: BTreeMap<(usize, String, usize), usize> = BTreeMap::new();
    let mut b_ids: BTreeMap<(usize, usize, String, usize), usize> = BTreeMap::new();
    for r in 0..interfaces {
        for code in &prefixes {
            for z in 1..=k1 {
                iface_ids.insert((r, code.clone(), z), vertices.len());
                vertices.push(TemplateVertex {
                    part: format!("A[{r}]"),
                    code: code.clone(),
                    expansion: z,
                });
            }
        }
        // B-vertices of step r+1 follow interface r
        let copy = r + 1;
        if copy <= ell {
            for j in 2..=t {
                for code in binary_codes(t - 2) {
                    for z in 1..=parts[j - 1] {
                        b_ids.insert((copy, j, code.clone(), z), vertices.len());
                        vertices.push(TemplateVertex {
                            part: format!("B{j}[{copy}]"),
                            code: code.clone(),
                            expansion: z,
                        });
                    }
                }
            }
        }
    }
    let mut edges = Vec::new();
    for copy in 1..=ell {
        for code in binary_codes(t - 1) {
            let last_one = code.ends_with('1');
            let prefix = code[..t - 2].to_string();
            let mut r = copy - 1 + usize::from(last_one);
            if cyclic {
                r %= ell;
            }
            let mut edge = Vec::new();
            for z in 1..=k1 {
                edge.push(iface_ids[&(r, prefix.clone(), z)]);
            }
            for j in 2..=t {
                let b_code = delete_bit(&code, j - 2);
                for z in 1..=parts[j - 1] {
                    edge.push(b_ids[&(copy, j, b_code.clone(), z)]);
                }
            }
            edges.push(edge);
        }
    }

    let attach = (!cyclic).then(|| {
        let tuple = |r: usize| -> Vec<usize> {
            let mut ids = Vec::new();
            for code in &prefixes {
                for z in 1..=k1 {
                    ids.push(iface_ids[&(r, code.clone(), z)]);
                }
            }
            ids
        };
        [tuple(0), tuple(ell)]
    });
    Template::assemble(name, pi.clone(), pi.k(), vertices, edges, attach)
}

/// The direct four-cycle construction from t coded blocks D_1..D_t.
pub fn build_cycle4_direct(pi: &OrderedPartition) -> Template {
    let t = pi.t();
    let parts = pi.parts();
    let mut vertices = Vec::new();
    let mut index: BTreeMap<(usize, String, usize), usize> = BTreeMap::new();
    for i in 1..=t {
        for code in binary_codes(t - 1) {
            for z in 1..=parts[i - 1] {
                index.insert((i, code.clone(), z), vertices.len());
                vertices.push(TemplateVertex {
                    part: format!("D{i}"),
                    code: code.clone(),
                    expansion: z,
                });
            }
        }
    }
    let mut edges = Vec::new();
    for s in binary_codes(t) {
        let mut edge = Vec::new();
        for i in 1..=t {
            let code = delete_bit(&s, i - 1);
            for z in 1..=parts[i - 1] {
                edge.push(index[&(i, code.clone(), z)]);
            }
        }
        edges.push(edge);
    }
    Template::assemble(
        format!("cycle4direct_{pi}"),
        pi.clone(),
        pi.k(),
        vertices,
        edges,
        None,
    )
    .expect("direct cycle construction is always valid")
}
