//! Residual-based checkers for the equivalent quasirandom properties.
//!
//! Each checker turns an asymptotic o(.) statement into a scale-free finite
//! score by normalizing with the matching power of n, so one threshold works
//! across sizes. Verdicts compare residuals against a caller threshold; the
//! cycle properties are one-sided (only an excess of cycles fails), so their
//! signed residuals feed a one-sided test. Reports carry no wall-clock data:
//! identical config and seed produce byte-identical JSON.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::counting::{
    count_circuits_trace, count_labeled_copies, count_partite_edges, SubsetFamily,
};
use crate::error::{Error, Result};
use crate::hypergraph::{binomial, enumerate_multisets, Hypergraph};
use crate::rng::Stream;
use crate::spectra::{spectral_report, SpectraOptions};
use crate::templates::{build_cycle, is_pi_linear, OrderedPartition};
use crate::Caps;

/// The checkable properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Prop {
    Disc,
    Expand,
    Count,
    Cycle4,
    Cycle4L,
    Eig,
}

impl Prop {
    pub fn all() -> Vec<Prop> {
        vec![
            Prop::Disc,
            Prop::Expand,
            Prop::Count,
            Prop::Cycle4,
            Prop::Cycle4L,
            Prop::Eig,
        ]
    }

    pub fn parse(word: &str) -> Result<Prop> {
        match word.trim().to_ascii_lowercase().as_str() {
            "disc" => Ok(Prop::Disc),
            "expand" => Ok(Prop::Expand),
            "count" => Ok(Prop::Count),
            "cycle4" => Ok(Prop::Cycle4),
            "cycle4l" => Ok(Prop::Cycle4L),
            "eig" => Ok(Prop::Eig),
            other => Err(Error::Invalid(format!("unknown property '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Prop::Disc => "disc",
            Prop::Expand => "expand",
            Prop::Count => "count",
            Prop::Cycle4 => "cycle4",
            Prop::Cycle4L => "cycle4l",
            Prop::Eig => "eig",
        }
    }
}

/// Subset discrepancy: max over sampled U of |E(H[U])| - p*C(|U|, k),
/// normalized by n^k. U is sampled at sizes n/4, n/2, 3n/4 and uniformly.
pub fn check_disc(h: &Hypergraph, p: f64, samples: usize, seed: u64) -> f64 {
    let n = h.n();
    let k = h.k();
    let scale = (n as f64).powi(k as i32);
    let mut stream = Stream::new(seed, 0xD15C);
    let mut worst = 0.0f64;
    for i in 0..samples.max(3) {
        let size = match i {
            0 => (n / 4).max(1),
            1 => (n / 2).max(1),
            2 => (3 * n / 4).max(1),
            _ => 1 + stream.next_below(n),
        };
        let subset = stream.sample_distinct(n, size);
        let induced = h.induced_edge_count(&subset) as f64;
        let expected = p * binomial(size, k) as f64;
        worst = worst.max((induced - expected).abs() / scale);
    }
    worst
}

/// Partite expansion: max over sampled families of
/// |e(S_1,...,S_t) - p * prod |S_i||, normalized by n^k. Family sizes are
/// drawn log-uniformly.
pub fn check_expand(
    h: &Hypergraph,
    pi: &OrderedPartition,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let n = h.n();
    let scale = (n as f64).powi(h.k() as i32);
    let pools: Vec<Vec<Vec<usize>>> = pi
        .parts()
        .iter()
        .map(|&size| enumerate_multisets(n, size))
        .collect();
    let mut stream = Stream::new(seed, 0xE8BA);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut parts = Vec::with_capacity(pi.t());
        for pool in &pools {
            let max = pool.len();
            let size = log_uniform(max, &mut stream);
            let chosen = stream.sample_distinct(max, size);
            parts.push(chosen.into_iter().map(|i| pool[i].clone()).collect());
        }
        let family = SubsetFamily::new(pi, n, parts)?;
        let e = count_partite_edges(h, &family)? as f64;
        let product: f64 = family.sizes().iter().map(|&s| s as f64).product();
        worst = worst.max((e - p * product).abs() / scale);
    }
    Ok(worst)
}

fn log_uniform(max: usize, stream: &mut Stream) -> usize {
    let u = stream.next_unit();
    let value = (max as f64).powf(u);
    (value.round() as usize).clamp(1, max)
}

/// Labeled-copy residuals per template: |#copies - p^m n^f| / n^f.
/// Templates must certify as pi-linear.
pub fn check_count(
    h: &Hypergraph,
    pi: &OrderedPartition,
    p: f64,
    templates: &[(String, Hypergraph)],
    caps: &Caps,
) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (name, f) in templates {
        if is_pi_linear(f, pi, caps.pilinear_edges)?.is_none() {
            return Err(Error::NotPiLinear(pi.to_string()));
        }
        let copies = count_labeled_copies(f, h, caps.count_vertices)? as f64;
        let m = f.edge_count() as i32;
        let fv = f.n() as i32;
        let scale = (h.n() as f64).powi(fv);
        let expected = p.powi(m) * scale;
        out.insert(name.clone(), (copies - expected).abs() / scale);
    }
    Ok(out)
}

/// Cycle residuals for C_{pi, 2*steps}: signed (count - p^m n^{mk/2})/n^{mk/2}
/// for both the circuit (trace) count and, when the template fits the cap,
/// the injective copy count.
#[derive(Clone, Debug, Serialize)]
pub struct CycleCheck {
    pub steps: usize,
    pub circuits: u64,
    pub circuit_residual: f64,
    pub copies: Option<u64>,
    pub copy_residual: Option<f64>,
}

pub fn check_cycle(
    h: &Hypergraph,
    pi: &OrderedPartition,
    p: f64,
    steps: usize,
    caps: &Caps,
) -> Result<CycleCheck> {
    if steps < 2 || !steps.is_multiple_of(2) {
        return Err(Error::Invalid(
            "cycle checks need an even step count >= 2 (length 4L)".into(),
        ));
    }
    let m = steps << (pi.t() - 1);
    let vertices = m * pi.k() / 2;
    let scale = (h.n() as f64).powi(vertices as i32);
    let expected = p.powi(m as i32) * scale;
    let circuits = count_circuits_trace(h, pi.parts(), steps, caps.matrix_dim)?;
    let circuit_residual = (circuits as f64 - expected) / scale;
    let (copies, copy_residual) = if vertices <= caps.count_vertices {
        let template = build_cycle(pi.parts(), steps)?;
        let copies = count_labeled_copies(&template.graph, h, caps.count_vertices)?;
        (Some(copies), Some((copies as f64 - expected) / scale))
    } else {
        (None, None)
    };
    Ok(CycleCheck {
        steps,
        circuits,
        circuit_residual,
        copies,
        copy_residual,
    })
}

/// Eigenvalue residuals: (|lambda_1/n^{k/2} - p|, lambda_2/n^{k/2}), using
/// the certified value for coregular inputs and the interval midpoint
/// otherwise (interval width reported alongside).
#[derive(Clone, Debug, Serialize)]
pub struct EigCheck {
    pub lambda1_residual: f64,
    pub lambda2_residual: f64,
    pub lambda1_interval_width: f64,
    pub lambda2_certified: bool,
}

pub fn check_eig(
    h: &Hypergraph,
    pi: &OrderedPartition,
    p: f64,
    opts: &SpectraOptions,
) -> Result<EigCheck> {
    let report = spectral_report(h, pi, opts)?;
    let half_power = (h.n() as f64).powf(h.k() as f64 / 2.0);
    let lambda1_best = 0.5 * (report.lambda1_lower + report.lambda1_upper);
    let (lambda2_best, certified) = match report.lambda2_upper {
        Some(upper) => (upper, true),
        None => (report.lambda2_lower, false),
    };
    Ok(EigCheck {
        lambda1_residual: (lambda1_best / half_power - p).abs(),
        lambda2_residual: lambda2_best / half_power,
        lambda1_interval_width: report.lambda1_upper - report.lambda1_lower,
        lambda2_certified: certified,
    })
}

/// Everything the runner needs; echoed verbatim into the report.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub p: f64,
    pub eps: f64,
    pub seed: u64,
    pub samples: usize,
    /// L in the length-4L cycle property.
    pub ell: usize,
    /// Partitions to check; None means every proper partition of k.
    pub pis: Option<Vec<Vec<usize>>>,
    pub props: Vec<Prop>,
    #[serde(skip)]
    pub caps: Caps,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            p: 0.5,
            eps: 0.15,
            seed: 0,
            samples: 200,
            ell: 2,
            pis: None,
            props: Prop::all(),
            caps: Caps::default(),
        }
    }
}

/// Residuals and verdicts for one (H, pi) pair.
#[derive(Clone, Debug, Serialize)]
pub struct QuasiReport {
    pub pi: Vec<usize>,
    pub p: f64,
    pub eps: f64,
    pub disc_residual: Option<f64>,
    pub expand_residual: Option<f64>,
    pub count_residuals: BTreeMap<String, f64>,
    pub cycle4: Option<CycleCheck>,
    pub cycle4l: BTreeMap<usize, CycleCheck>,
    pub eig: Option<EigCheck>,
    pub verdicts: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub k: usize,
    pub n: usize,
    pub edge_count: usize,
    pub q: f64,
    pub config: ExperimentConfig,
    pub matrix_cap: usize,
    pub reports: Vec<QuasiReport>,
    pub all_pass: bool,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the selected checks for each requested partition of k.
pub fn run_experiment(h: &Hypergraph, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let pis: Vec<OrderedPartition> = match &cfg.pis {
        Some(list) => list
            .iter()
            .map(|parts| OrderedPartition::canonical(parts.clone()))
            .collect::<Result<_>>()?,
        None => OrderedPartition::all_proper(h.k()),
    };
    let mut reports = Vec::new();
    let mut all_pass = true;
    for pi in &pis {
        let report = check_all(h, pi, cfg)?;
        all_pass &= report.verdicts.values().all(|&v| v);
        reports.push(report);
    }
    Ok(ExperimentReport {
        k: h.k(),
        n: h.n(),
        edge_count: h.edge_count(),
        q: h.edge_density_q(),
        config: cfg.clone(),
        matrix_cap: cfg.caps.matrix_dim,
        reports,
        all_pass,
    })
}

fn check_all(h: &Hypergraph, pi: &OrderedPartition, cfg: &ExperimentConfig) -> Result<QuasiReport> {
    let mut report = QuasiReport {
        pi: pi.parts().to_vec(),
        p: cfg.p,
        eps: cfg.eps,
        disc_residual: None,
        expand_residual: None,
        count_residuals: BTreeMap::new(),
        cycle4: None,
        cycle4l: BTreeMap::new(),
        eig: None,
        verdicts: BTreeMap::new(),
        notes: Vec::new(),
    };
    for prop in &cfg.props {
        match prop {
            Prop::Disc => {
                let r = check_disc(h, cfg.p, cfg.samples, cfg.seed);
                report.verdicts.insert("disc".into(), r <= cfg.eps);
                report.disc_residual = Some(r);
            }
            Prop::Expand => {
                let r = check_expand(h, pi, cfg.p, cfg.samples, cfg.seed)?;
                report.verdicts.insert("expand".into(), r <= cfg.eps);
                report.expand_residual = Some(r);
            }
            Prop::Count => {
                let templates = default_count_templates(h, pi, &cfg.caps, &mut report.notes)?;
                let residuals = check_count(h, pi, cfg.p, &templates, &cfg.caps)?;
                let pass = residuals.values().all(|&r| r <= cfg.eps);
                report.verdicts.insert("count".into(), pass);
                report.count_residuals = residuals;
            }
            Prop::Cycle4 => {
                let c = check_cycle(h, pi, cfg.p, 2, &cfg.caps)?;
                // one-sided: only an excess of cycles refutes quasirandomness
                report
                    .verdicts
                    .insert("cycle4".into(), c.circuit_residual <= cfg.eps);
                report.cycle4 = Some(c);
            }
            Prop::Cycle4L => {
                let steps = 2 * cfg.ell;
                let c = check_cycle(h, pi, cfg.p, steps, &cfg.caps)?;
                report
                    .verdicts
                    .insert("cycle4l".into(), c.circuit_residual <= cfg.eps);
                report.cycle4l.insert(cfg.ell, c);
            }
            Prop::Eig => {
                let opts = SpectraOptions {
                    matrix_cap: cfg.caps.matrix_dim,
                    seed: cfg.seed,
                    ..Default::default()
                };
                let e = check_eig(h, pi, cfg.p, &opts)?;
                let pass = e.lambda1_residual <= cfg.eps && e.lambda2_residual <= cfg.eps;
                report.verdicts.insert("eig".into(), pass);
                report.eig = Some(e);
            }
        }
    }
    Ok(report)
}

/// Single edge plus the four-cycle of type pi, skipping templates over the
/// vertex cap.
fn default_count_templates(
    h: &Hypergraph,
    pi: &OrderedPartition,
    caps: &Caps,
    notes: &mut Vec<String>,
) -> Result<Vec<(String, Hypergraph)>> {
    let k = h.k();
    let edge = Hypergraph::new(k, k, vec![(0..k).collect()], false)?;
    let mut out = vec![("single_edge".to_string(), edge)];
    let cycle = build_cycle(pi.parts(), 2)?;
    if cycle.graph.n() <= caps.count_vertices {
        out.push((cycle.name.clone(), cycle.graph));
    } else {
        notes.push(format!(
            "skipped count template {} ({} vertices over cap {})",
            cycle.name,
            cycle.graph.n(),
            caps.count_vertices
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{gen_coregular_sum, gen_random};

    fn op(parts: &[usize]) -> OrderedPartition {
        OrderedPartition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn empty_hypergraph_is_perfectly_sparse() {
        let h = Hypergraph::empty(2, 8, false).unwrap();
        assert_eq!(check_disc(&h, 0.0, 50, 1), 0.0);
        assert_eq!(check_expand(&h, &op(&[1, 1]), 0.0, 50, 1).unwrap(), 0.0);
        let c = check_cycle(&h, &op(&[1, 1]), 0.0, 2, &Caps::default()).unwrap();
        assert_eq!(c.circuits, 0);
        assert_eq!(c.circuit_residual, 0.0);
        let e = check_eig(&h, &op(&[1, 1]), 0.0, &SpectraOptions::default()).unwrap();
        assert_eq!(e.lambda1_residual, 0.0);
        assert_eq!(e.lambda2_residual, 0.0);
    }

    #[test]
    fn complete_with_loops_is_perfectly_dense() {
        let h = gen_coregular_sum(2, 5, &[0, 1, 2, 3, 4]).unwrap();
        let e = check_eig(&h, &op(&[1, 1]), 1.0, &SpectraOptions::default()).unwrap();
        assert!(e.lambda1_residual < 1e-9);
        assert!(e.lambda2_residual < 1e-9);
        // the simple complete graph has zero discrepancy at p = 1
        let complete = gen_random(2, 5, 1.0, 0).unwrap();
        assert_eq!(check_disc(&complete, 1.0, 30, 5), 0.0);
        // loop edges add o(n^k) induced mass, nonzero at finite n
        assert!(check_disc(&h, 1.0, 30, 5) <= 5.0 / 25.0 + 1e-12);
    }

    #[test]
    fn triangle_cycle_residual_is_negative() {
        // 18 circuits vs n^4 = 81: small instances sit far below the target
        let k3 = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], false).unwrap();
        let c = check_cycle(&k3, &op(&[1, 1]), 1.0, 2, &Caps::default()).unwrap();
        assert_eq!(c.circuits, 18);
        assert!(c.circuit_residual < 0.0);
        assert!((c.circuit_residual - (18.0 - 81.0) / 81.0).abs() < 1e-12);
    }

    #[test]
    fn coregular_eig_residual_matches_density_gap() {
        let h = gen_coregular_sum(2, 16, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let e = check_eig(&h, &op(&[1, 1]), 0.5, &SpectraOptions::default()).unwrap();
        // d/n = 8/16 = 0.5 exactly
        assert!(e.lambda1_residual < 1e-9, "{}", e.lambda1_residual);
        assert_eq!(e.lambda1_interval_width, 0.0);
        // off-target p: the residual is exactly |d/n - p|
        let off = check_eig(&h, &op(&[1, 1]), 0.3, &SpectraOptions::default()).unwrap();
        assert!((off.lambda1_residual - 0.2).abs() < 1e-12);
    }

    #[test]
    fn pi_linearity_coarsens_on_the_template_corpus() {
        // every cycle certified pi-linear also certifies for each coarser
        // partition (the direction the refinement remark rests on)
        for k in 2..=4usize {
            for pi in OrderedPartition::all_proper(k) {
                let cycle = crate::templates::build_cycle(pi.parts(), 2).unwrap();
                if cycle.graph.edge_count() > 12 {
                    continue;
                }
                assert!(
                    is_pi_linear(&cycle.graph, &pi, 12).unwrap().is_some(),
                    "C_{{{pi},4}} must certify for its own partition"
                );
                for coarse in OrderedPartition::all_proper(k) {
                    if pi.refines(&coarse) {
                        assert!(
                            is_pi_linear(&cycle.graph, &coarse, 12).unwrap().is_some(),
                            "C_{{{pi},4}} must also certify for {coarse}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bipartite_block_structure_fails_expansion() {
        // complete bipartite graph: families concentrated on one side witness
        // a constant residual
        let n = 24;
        let mut edges = Vec::new();
        for u in 0..n / 2 {
            for v in n / 2..n {
                edges.push(vec![u, v]);
            }
        }
        let h = Hypergraph::new(2, n, edges, false).unwrap();
        let p = h.edge_density_q();
        let pi = op(&[1, 1]);
        let left: Vec<Vec<usize>> = (0..n / 2).map(|v| vec![v]).collect();
        let family = SubsetFamily::new(&pi, n, vec![left.clone(), left]).unwrap();
        let e = count_partite_edges(&h, &family).unwrap();
        let residual = (e as f64 - p * 144.0).abs() / (n as f64 * n as f64);
        assert_eq!(e, 0);
        assert!(residual > 0.12, "expected a constant witness, got {residual}");
    }

    #[test]
    fn random_graph_residuals_are_small() {
        let h = gen_random(2, 24, 0.5, 1).unwrap();
        assert!(check_disc(&h, 0.5, 200, 1) < 0.05);
        let pi = op(&[1, 1]);
        let c4 = crate::templates::build_cycle(&[1, 1], 2).unwrap();
        let residuals = check_count(
            &h,
            &pi,
            0.5,
            &[("c4".into(), c4.graph)],
            &Caps::default(),
        )
        .unwrap();
        assert!(residuals["c4"] < 0.1, "{}", residuals["c4"]);
    }

    #[test]
    fn experiment_reports_are_byte_identical() {
        let h = gen_random(2, 12, 0.5, 3).unwrap();
        let cfg = ExperimentConfig {
            samples: 40,
            ..Default::default()
        };
        let a = run_experiment(&h, &cfg).unwrap().to_json();
        let b = run_experiment(&h, &cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn experiment_covers_all_proper_partitions() {
        let h = gen_random(3, 6, 0.5, 1).unwrap();
        let cfg = ExperimentConfig {
            props: vec![Prop::Disc, Prop::Eig],
            samples: 20,
            ..Default::default()
        };
        let report = run_experiment(&h, &cfg).unwrap();
        let pis: Vec<String> = report
            .reports
            .iter()
            .map(|r| {
                r.pi.iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect();
        assert_eq!(pis, vec!["1+1+1", "1+2"]);
    }

    #[test]
    fn count_check_requires_linearity() {
        let h = gen_random(3, 6, 0.5, 1).unwrap();
        let tight = Hypergraph::new(3, 4, vec![vec![0, 1, 2], vec![0, 1, 3]], false).unwrap();
        let err = check_count(
            &h,
            &op(&[1, 1, 1]),
            0.5,
            &[("tight".into(), tight)],
            &Caps::default(),
        );
        assert!(matches!(err, Err(Error::NotPiLinear(_))));
    }

    #[test]
    fn prop_parsing_round_trips() {
        for p in Prop::all() {
            assert_eq!(Prop::parse(p.name()).unwrap(), p);
        }
        assert!(Prop::parse("bogus").is_err());
    }
}
