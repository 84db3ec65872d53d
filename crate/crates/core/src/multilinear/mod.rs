//! Dense real multilinear maps and their product algebra.
//!
//! A map of arity t over dimensions (d_1, ..., d_t) stores its coefficients
//! on basis tuples in row-major order and is extended multilinearly. The star
//! product contracts two t-linear maps over their shared last argument into a
//! (t-1)-linear map on squared spaces; iterating the star square produces the
//! 2^s powers, and the 2^(t-1) power reindexes into a square symmetric matrix
//! whose row/column tuples interleave into the power's single argument as
//! u_1 v_1 u_2 v_2 ... — the bijection every counting identity relies on.

mod eig;
mod hopm;

pub use eig::{jacobi_eigen, symmetric_eigs};
pub use hopm::{hopm_estimate, HopmParams, HopmResult};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::templates::OrderedPartition;

#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearMap {
    dims: Vec<usize>,
    coeffs: Vec<f64>,
}

impl MultilinearMap {
    pub fn new(dims: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        let expected = checked_product(&dims)?;
        if coeffs.len() != expected {
            return Err(Error::DimMismatch(format!(
                "coefficient array has length {}, dims {:?} require {}",
                coeffs.len(),
                dims,
                expected
            )));
        }
        Ok(MultilinearMap { dims, coeffs })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = checked_product(&dims)?;
        Ok(MultilinearMap {
            dims,
            coeffs: vec![0.0; len],
        })
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut flat = 0;
        for (i, &d) in idx.iter().zip(&self.dims) {
            debug_assert!(*i < d);
            flat = flat * d + i;
        }
        flat
    }

    pub fn coeff(&self, idx: &[usize]) -> f64 {
        self.coeffs[self.flat_index(idx)]
    }

    pub fn set_coeff(&mut self, idx: &[usize], value: f64) {
        let flat = self.flat_index(idx);
        self.coeffs[flat] = value;
    }

    /// Multilinear extension: contracts each argument against the
    /// coefficient array.
    pub fn evaluate(&self, args: &[&[f64]]) -> Result<f64> {
        self.check_args(args)?;
        let mut current = self.coeffs.clone();
        for (axis, x) in args.iter().enumerate().rev() {
            current = contract_last(&current, self.dims[axis], x);
        }
        Ok(current[0])
    }

    /// The gradient slice in argument `skip`: component j is the evaluation
    /// with e_j substituted there.
    pub fn contract_all_but(&self, args: &[&[f64]], skip: usize) -> Result<Vec<f64>> {
        self.check_args(args)?;
        let t = self.arity();
        let mut current = self.coeffs.clone();
        for axis in (skip + 1..t).rev() {
            current = contract_last(&current, self.dims[axis], args[axis]);
        }
        for axis in 0..skip {
            current = contract_first(&current, self.dims[axis], args[axis]);
        }
        Ok(current)
    }

    fn check_args(&self, args: &[&[f64]]) -> Result<()> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        for (i, (x, &d)) in args.iter().zip(&self.dims).enumerate() {
            if x.len() != d {
                return Err(Error::DimMismatch(format!(
                    "argument {i} has length {}, expected {d}",
                    x.len()
                )));
            }
        }
        Ok(())
    }

    /// Regroups a k-linear map over equal dimensions n into a t-linear map
    /// over dimensions n^{k_i}. A pure reshape: the coefficient array is
    /// unchanged, so the grouping is bit-exact.
    pub fn group(&self, pi: &OrderedPartition) -> Result<MultilinearMap> {
        if pi.k() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: pi.k(),
            });
        }
        let n = self.dims[0];
        if self.dims.iter().any(|&d| d != n) {
            return Err(Error::DimMismatch(
                "grouping requires equal dimensions in every argument".into(),
            ));
        }
        let mut dims = Vec::with_capacity(pi.t());
        for &part in pi.parts() {
            dims.push(checked_pow(n, part)?);
        }
        Ok(MultilinearMap {
            dims,
            coeffs: self.coeffs.clone(),
        })
    }

    pub fn scaled(&self, factor: f64) -> MultilinearMap {
        MultilinearMap {
            dims: self.dims.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn sub(&self, other: &MultilinearMap) -> Result<MultilinearMap> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch("subtraction needs equal shapes".into()));
        }
        Ok(MultilinearMap {
            dims: self.dims.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Star product: contracts `self` and `other` over the shared last
    /// argument, yielding a (t-1)-linear map on squared spaces. On a simple
    /// tensor pair the value is sum_j self(u.., b_j) * other(v.., b_j) over
    /// the standard basis of the last space; the value does not depend on
    /// which orthonormal basis is used.
    pub fn star_product(&self, other: &MultilinearMap) -> Result<MultilinearMap> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch(
                "star product needs identical shapes".into(),
            ));
        }
        let t = self.arity();
        if t < 2 {
            return Err(Error::Invalid(
                "star product needs arity at least 2".into(),
            ));
        }
        let head = &self.dims[..t - 1];
        let d_last = self.dims[t - 1];
        let rows = checked_product(head)?;
        let result_dims: Vec<usize> = head
            .iter()
            .map(|&d| checked_pow(d, 2))
            .collect::<Result<_>>()?;
        let result_len = checked_product(&result_dims)?;
        let mut coeffs = vec![0.0; result_len];

        // Position of a digit pair (a_i, b_i) inside V_i (x) V_i is
        // a_i * d_i + b_i, so the flat result index splits into a row
        // contribution and a column contribution that simply add.
        let mut base_a = vec![0usize; rows];
        let mut base_b = vec![0usize; rows];
        let mut digits = vec![0usize; head.len()];
        for r in 0..rows {
            let mut x = r;
            for (slot, &d) in digits.iter_mut().zip(head).rev() {
                *slot = x % d;
                x /= d;
            }
            let mut a_part = 0usize;
            let mut b_part = 0usize;
            for (&digit, &d) in digits.iter().zip(head) {
                a_part = a_part * d * d + digit * d;
                b_part = b_part * d * d + digit;
            }
            base_a[r] = a_part;
            base_b[r] = b_part;
        }

        for a in 0..rows {
            let row_a = &self.coeffs[a * d_last..(a + 1) * d_last];
            for b in 0..rows {
                let row_b = &other.coeffs[b * d_last..(b + 1) * d_last];
                let dot: f64 = row_a.iter().zip(row_b).map(|(x, y)| x * y).sum();
                coeffs[base_a[a] + base_b[b]] = dot;
            }
        }
        Ok(MultilinearMap {
            dims: result_dims,
            coeffs,
        })
    }

    /// The 2^s power by repeated star squaring; arity drops to t - s.
    pub fn power(&self, s: usize) -> Result<MultilinearMap> {
        let t = self.arity();
        if s + 1 > t {
            return Err(Error::Invalid(format!(
                "power exponent 2^{s} undefined for arity {t}; need s <= t-1"
            )));
        }
        let mut current = self.clone();
        for _ in 0..s {
            current = current.star_product(&current)?;
        }
        Ok(current)
    }

    /// Reindexes the 2^(t-1) power of this arity-t map as a square matrix.
    ///
    /// Row r and column c each decompose into 2^(t-2) base-d_1 digits
    /// (most significant first); the matrix entry is the power's coefficient
    /// at the interleaved digit string r_1 c_1 r_2 c_2 ...
    pub fn flatten(&self) -> Result<FlatMatrix> {
        let t = self.arity();
        if t < 2 {
            return Err(Error::Invalid("flatten needs arity at least 2".into()));
        }
        let d1 = self.dims[0];
        let m = 1usize << (t - 2);
        let side = checked_pow(d1, m)?;
        let power = self.power(t - 1)?;
        let mut entries = vec![0.0; side * side];
        let mut digits_r = vec![0usize; m];
        let mut digits_c = vec![0usize; m];
        for r in 0..side {
            decompose(r, d1, &mut digits_r);
            for c in 0..side {
                decompose(c, d1, &mut digits_c);
                let mut idx = 0usize;
                for i in 0..m {
                    idx = idx * d1 + digits_r[i];
                    idx = idx * d1 + digits_c[i];
                }
                entries[r * side + c] = power.coeffs[idx];
            }
        }
        Ok(FlatMatrix { dim: side, entries })
    }
}

impl MultilinearMap {
    /// Debug dump: one JSON header line with the shape, then the raw
    /// little-endian coefficient array.
    pub fn write_dump(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut bytes = serde_json::json!({ "dims": self.dims }).to_string().into_bytes();
        bytes.push(b'\n');
        for c in &self.coeffs {
            bytes.extend_from_slice(&c.to_le_bytes());
        }
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn read_dump(path: impl AsRef<std::path::Path>) -> Result<MultilinearMap> {
        let bytes = std::fs::read(path)?;
        let newline = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Invalid("dump has no header line".into()))?;
        let header: serde_json::Value = serde_json::from_slice(&bytes[..newline])
            .map_err(|e| Error::Invalid(format!("bad dump header: {e}")))?;
        let dims: Vec<usize> = header["dims"]
            .as_array()
            .ok_or_else(|| Error::Invalid("dump header lacks dims".into()))?
            .iter()
            .map(|v| v.as_u64().map(|x| x as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Invalid("dump dims are not integers".into()))?;
        let payload = &bytes[newline + 1..];
        if payload.len() % 8 != 0 {
            return Err(Error::Invalid("dump payload is not f64-aligned".into()));
        }
        let coeffs: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        MultilinearMap::new(dims, coeffs)
    }
}

/// The adjacency map of a hypergraph: a symmetric k-linear map whose value on
/// basis tuples indicates whether the vertex multiset is an edge.
pub fn adjacency_map(h: &Hypergraph) -> MultilinearMap {
    let k = h.k();
    let n = h.n();
    let mut map = MultilinearMap::zeros(vec![n; k]).expect("desk-scale dims");
    let mut tuple = vec![0usize; k];
    for edge in h.edges() {
        set_permutations(&mut map, edge, &mut tuple, 0, &mut vec![false; k]);
    }
    map
}

fn set_permutations(
    map: &mut MultilinearMap,
    edge: &[usize],
    tuple: &mut Vec<usize>,
    depth: usize,
    used: &mut Vec<bool>,
) {
    let k = edge.len();
    if depth == k {
        map.set_coeff(tuple, 1.0);
        return;
    }
    let mut last: Option<usize> = None;
    for i in 0..k {
        if used[i] || last == Some(edge[i]) {
            continue;
        }
        last = Some(edge[i]);
        used[i] = true;
        tuple[depth] = edge[i];
        set_permutations(map, edge, tuple, depth + 1, used);
        used[i] = false;
    }
}

/// The all-ones k-linear map over W^k with dim(W) = n.
pub fn all_ones_map(k: usize, n: usize) -> MultilinearMap {
    let len = n.pow(k as u32);
    MultilinearMap {
        dims: vec![n; k],
        coeffs: vec![1.0; len],
    }
}

/// Groups the adjacency map, computes its flattening, and enforces the
/// matrix-side cap up front.
pub fn flatten_matrix(
    phi: &MultilinearMap,
    pi: &OrderedPartition,
    cap: usize,
) -> Result<FlatMatrix> {
    let grouped = phi.group(pi)?;
    let side = flat_side(grouped.dims()[0], pi.t())?;
    if side > cap {
        return Err(Error::CapExceeded {
            what: "flat matrix side".into(),
            needed: side,
            cap,
        });
    }
    grouped.flatten()
}

/// Matrix side d_1^(2^(t-2)) for a grouped map with first dimension d_1.
pub fn flat_side(d1: usize, t: usize) -> Result<usize> {
    checked_pow(d1, 1usize << (t - 2))
}

fn decompose(mut x: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = x % base;
        x /= base;
    }
}

fn contract_last(coeffs: &[f64], d: usize, x: &[f64]) -> Vec<f64> {
    let rows = coeffs.len() / d;
    let mut out = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = &coeffs[r * d..(r + 1) * d];
        out.push(row.iter().zip(x).map(|(c, v)| c * v).sum());
    }
    out
}

fn contract_first(coeffs: &[f64], d: usize, x: &[f64]) -> Vec<f64> {
    let rest = coeffs.len() / d;
    let mut out = vec![0.0; rest];
    for j in 0..d {
        let block = &coeffs[j * rest..(j + 1) * rest];
        let xj = x[j];
        for (o, c) in out.iter_mut().zip(block) {
            *o += xj * c;
        }
    }
    out
}

fn checked_product(dims: &[usize]) -> Result<usize> {
    dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d)
            .ok_or_else(|| Error::DimMismatch("dimension product overflows".into()))
    })
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    let mut acc = 1usize;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .ok_or_else(|| Error::DimMismatch("dimension power overflows".into()))?;
    }
    Ok(acc)
}

/// Dense square symmetric matrix produced by flattening.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl FlatMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch(format!(
                "matrix of side {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(FlatMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        FlatMatrix {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = FlatMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Largest |a_ij - a_ji|.
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                defect = defect.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        defect
    }

    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.dim {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            let dot: f64 = row.iter().zip(y).map(|(a, b)| a * b).sum();
            total += x[i] * dot;
        }
        total
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                self.entries[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn matmul(&self, other: &FlatMatrix) -> FlatMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = FlatMatrix::zeros(d);
        for i in 0..d {
            for l in 0..d {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.get(l, j);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim..(i + 1) * self.dim].iter().sum())
            .collect()
    }

    /// Integer view with certified rounding: every entry must sit within
    /// `tol` of an integer.
    pub fn to_integer(&self, tol: f64) -> Result<Vec<i128>> {
        let mut out = Vec::with_capacity(self.entries.len());
        for &v in &self.entries {
            let rounded = v.round();
            if (v - rounded).abs() > tol {
                return Err(Error::RoundingResidual((v - rounded).abs()));
            }
            out.push(rounded as i128);
        }
        Ok(out)
    }
}

/// Standard basis vector e_i of the given dimension.
pub fn basis_vector(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// All-ones vector scaled to unit length.
pub fn unit_all_ones(dim: usize) -> Vec<f64> {
    vec![1.0 / (dim as f64).sqrt(); dim]
}

/// Kronecker product of two vectors.
pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Row-major flat index of a vertex tuple over base n.
pub fn tuple_index(tuple: &[usize], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &v| acc * base + v)
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
