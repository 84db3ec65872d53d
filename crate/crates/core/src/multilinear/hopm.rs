//! Alternating higher-order power method.
//!
//! Estimates the spectral norm sup |phi(x_1,...,x_t)| over unit vectors from
//! below: each pass replaces one argument with its normalized gradient slice,
//! which never decreases the value. Restarts are seeded independently from
//! (seed, restart index), so runs are reproducible and restarts could be
//! evaluated in any order.

use crate::multilinear::{norm, MultilinearMap};
use crate::rng::Stream;

#[derive(Clone, Debug)]
pub struct HopmParams {
    pub restarts: usize,
    pub iters: usize,
    pub tol: f64,
}

impl Default for HopmParams {
    fn default() -> Self {
        HopmParams {
            restarts: 32,
            iters: 200,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HopmResult {
    /// Best converged |phi| value; always a lower bound on the spectral norm.
    pub value: f64,
    /// Unit-length maximizing arguments for the best restart.
    pub witnesses: Vec<Vec<f64>>,
    /// False when some restart hit the iteration limit before stabilizing.
    pub converged: bool,
}

pub fn hopm_estimate(phi: &MultilinearMap, params: &HopmParams, seed: u64) -> HopmResult {
    let t = phi.arity();
    if t == 1 {
        // the norm of a linear functional is the norm of its coefficients
        let value = norm(phi.coeffs());
        let witness = if value > 0.0 {
            phi.coeffs().iter().map(|c| c / value).collect()
        } else {
            unit_start(phi.dims()[0])
        };
        return HopmResult {
            value,
            witnesses: vec![witness],
            converged: true,
        };
    }

    let mut best_value = 0.0f64;
    let mut best_witnesses: Option<Vec<Vec<f64>>> = None;
    let mut all_converged = true;

    for restart in 0..params.restarts.max(1) {
        let mut stream = Stream::new(seed, restart as u64);
        let mut xs: Vec<Vec<f64>> = phi
            .dims()
            .iter()
            .map(|&d| {
                let mut v: Vec<f64> = (0..d).map(|_| stream.next_symmetric()).collect();
                let nv = norm(&v);
                if nv > 0.0 {
                    for x in &mut v {
                        *x /= nv;
                    }
                } else {
                    v = unit_start(d);
                }
                v
            })
            .collect();

        let mut previous = f64::NEG_INFINITY;
        let mut value = 0.0;
        let mut converged = false;
        for _ in 0..params.iters {
            for axis in 0..t {
                let args: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
                let gradient = phi
                    .contract_all_but(&args, axis)
                    .expect("arguments match the map's shape");
                let g_norm = norm(&gradient);
                if g_norm > 0.0 {
                    xs[axis] = gradient.iter().map(|g| g / g_norm).collect();
                    value = g_norm;
                } else {
                    value = 0.0;
                }
            }
            if (value - previous).abs() < params.tol {
                converged = true;
                break;
            }
            previous = value;
        }
        all_converged &= converged;
        if value > best_value || best_witnesses.is_none() {
            best_value = value;
            best_witnesses = Some(xs);
        }
    }

    HopmResult {
        value: best_value,
        witnesses: best_witnesses.unwrap_or_default(),
        converged: all_converged,
    }
}

fn unit_start(dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::{adjacency_map, all_ones_map};
    use crate::templates::OrderedPartition;

    #[test]
    fn determinism_across_calls() {
        let h = crate::hypergraph::gen_random(2, 6, 0.5, 4).unwrap();
        let tau = adjacency_map(&h)
            .group(&OrderedPartition::new(vec![1, 1]).unwrap())
            .unwrap();
        let a = hopm_estimate(&tau, &HopmParams::default(), 9);
        let b = hopm_estimate(&tau, &HopmParams::default(), 9);
        assert_eq!(a.value, b.value);
        assert_eq!(a.witnesses, b.witnesses);
    }

    #[test]
    fn converges_on_rank_one_map() {
        // J restricted so the optimum is known exactly
        let j = all_ones_map(3, 4);
        let result = hopm_estimate(&j, &HopmParams::default(), 2);
        assert!((result.value - 8.0).abs() < 1e-8, "norm of J over n=4, k=3 is n^(3/2)");
        assert!(result.converged);
    }
}
