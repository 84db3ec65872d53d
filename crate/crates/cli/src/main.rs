//! hyperquasi: generate hypergraphs, build templates, count substructures,
//! compute spectral bounds, and score quasirandom properties.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hyperquasi::counting::{
    count_circuits_trace, count_homomorphisms, count_labeled_copies, count_via_extension,
    CountMethod, CountResult,
};
use hyperquasi::hypergraph::{gen_coregular_sum, gen_random, read_hypergraph, write_hypergraph};
use hyperquasi::quasicheck::{run_experiment, ExperimentConfig, Prop};
use hyperquasi::spectra::{spectral_report, SpectraOptions};
use hyperquasi::templates::{
    build_cycle, build_cycle4_direct, build_partial_step, build_path, build_step,
    OrderedPartition, Template,
};
use hyperquasi::{Caps, Hypergraph};

#[derive(Parser)]
#[command(name = "hyperquasi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a hypergraph and write it in the text format.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run quasirandom property checks and emit a JSON report.
    Check(CheckArgs),
    /// Compute eigenvalue bounds for one partition.
    Spectra(SpectraArgs),
    /// Count copies, homomorphisms, or circuits of a template.
    Count(CountArgs),
    /// List the proper partitions of k.
    Partitions(PartitionsArgs),
    /// Template utilities.
    #[command(subcommand)]
    Templates(TemplatesCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Binomial random hypergraph G^(k)(n, p).
    Random(GenRandomArgs),
    /// d-coregular sum construction (edges with prescribed residue sums).
    Coregular(GenCoregularArgs),
}

#[derive(Args)]
struct GenRandomArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenCoregularArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Number of residues (the coregularity degree).
    #[arg(long)]
    d: usize,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    /// Partition such as 1+2; defaults to every proper partition of k.
    #[arg(long)]
    pi: Option<String>,
    /// Target density; defaults to the input's empirical density.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.15)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// L in the length-4L cycle property.
    #[arg(long, default_value_t = 2)]
    ell: usize,
    /// Comma-separated subset of disc,expand,count,cycle4,cycle4l,eig.
    #[arg(long)]
    props: Option<String>,
    /// Matrix-side cap (also via HYPERQUASI_CAP).
    #[arg(long)]
    cap: Option<usize>,
    /// Report file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectraArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    pi: String,
    /// Override the density used for lambda_2 (tau - p*J).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    pi: String,
    /// Template kind: edge, step, path, cycle, cycle4direct, partial,
    /// or a path to a hypergraph file.
    #[arg(long, default_value = "cycle")]
    template: String,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    /// Expansion stage for partial templates.
    #[arg(long, default_value_t = 0)]
    s: usize,
    /// copies (injective), homs (brute force), trace (circuits), extension.
    #[arg(long, default_value = "copies")]
    mode: String,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionsArgs {
    #[arg(long)]
    k: usize,
}

#[derive(Subcommand)]
enum TemplatesCommand {
    /// Write a template in the text format plus its JSON label sidecar.
    Export(TemplatesExportArgs),
}

#[derive(Args)]
struct TemplatesExportArgs {
    #[arg(long)]
    pi: String,
    /// step, path, cycle, cycle4direct, or partial.
    #[arg(long, default_value = "cycle")]
    kind: String,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    #[arg(long, default_value_t = 0)]
    s: usize,
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn caps_with(cap: Option<usize>) -> Caps {
    let mut caps = Caps::from_env();
    if let Some(c) = cap {
        caps.matrix_dim = c;
    }
    caps
}

fn parse_pi(text: &str) -> Result<OrderedPartition> {
    OrderedPartition::parse(text).with_context(|| format!("cannot parse partition '{text}'"))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{payload}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(GenCommand::Random(a)) => {
            let h = gen_random(a.k, a.n, a.p, a.seed)?;
            write_hypergraph(&h, &a.out)?;
            eprintln!(
                "wrote G^({})({}, {}) with {} edges to {}",
                a.k,
                a.n,
                a.p,
                h.edge_count(),
                a.out.display()
            );
            Ok(0)
        }
        Command::Gen(GenCommand::Coregular(a)) => {
            if a.d == 0 || a.d > a.n {
                bail!("need 1 <= d <= n");
            }
            let residues: Vec<usize> = (0..a.d).collect();
            let h = gen_coregular_sum(a.k, a.n, &residues)?;
            write_hypergraph(&h, &a.out)?;
            eprintln!(
                "wrote {}-coregular {}-uniform hypergraph on {} vertices ({} edges) to {}",
                a.d,
                a.k,
                a.n,
                h.edge_count(),
                a.out.display()
            );
            Ok(0)
        }
        Command::Check(a) => {
            let h = read_hypergraph(&a.input)?;
            let props = match &a.props {
                Some(list) => list
                    .split(',')
                    .map(Prop::parse)
                    .collect::<hyperquasi::Result<Vec<_>>>()?,
                None => Prop::all(),
            };
            let cfg = ExperimentConfig {
                p: a.p.unwrap_or_else(|| h.edge_density_q()),
                eps: a.eps,
                seed: a.seed,
                samples: a.samples,
                ell: a.ell,
                pis: a.pi.as_deref().map(parse_pi).transpose()?.map(|pi| vec![pi.parts().to_vec()]),
                props,
                caps: caps_with(a.cap),
            };
            let started = Instant::now();
            let report = run_experiment(&h, &cfg)?;
            eprintln!(
                "checked {} partition(s) in {:.2} s",
                report.reports.len(),
                started.elapsed().as_secs_f64()
            );
            let pass = report.all_pass;
            emit(&a.out, &report.to_json())?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Spectra(a) => {
            let h = read_hypergraph(&a.input)?;
            let pi = parse_pi(&a.pi)?;
            let opts = SpectraOptions {
                matrix_cap: caps_with(a.cap).matrix_dim,
                seed: a.seed,
                density_override: a.p,
                ..Default::default()
            };
            let report = spectral_report(&h, &pi, &opts)?;
            emit(&a.out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
        Command::Count(a) => {
            let h = read_hypergraph(&a.input)?;
            let pi = parse_pi(&a.pi)?;
            let caps = caps_with(a.cap);
            let started = Instant::now();
            let (count, method) = match a.mode.as_str() {
                "trace" => (
                    count_circuits_trace(&h, pi.parts(), a.ell, caps.matrix_dim)?,
                    CountMethod::Trace,
                ),
                "copies" => {
                    let f = resolve_template(&a.template, &pi, a.ell, a.s)?;
                    (
                        count_labeled_copies(&f, &h, caps.count_vertices)?,
                        CountMethod::Backtracking,
                    )
                }
                "homs" => {
                    let f = resolve_template(&a.template, &pi, a.ell, a.s)?;
                    (
                        count_homomorphisms(&f, &h, caps.count_vertices)?,
                        CountMethod::BruteForce,
                    )
                }
                "extension" => {
                    let f = resolve_template(&a.template, &pi, a.ell, a.s)?;
                    (
                        count_via_extension(&f, pi.parts(), &h, &caps)?,
                        CountMethod::Extension,
                    )
                }
                other => bail!("unknown mode '{other}' (copies|homs|trace|extension)"),
            };
            let result = CountResult { count, method };
            let mut value = serde_json::to_value(&result)?;
            value["millis"] =
                serde_json::json!((started.elapsed().as_secs_f64() * 1e3).round() as u64);
            emit(&a.out, &serde_json::to_string_pretty(&value)?)?;
            Ok(0)
        }
        Command::Partitions(a) => {
            for pi in OrderedPartition::all_proper(a.k) {
                println!("{pi}");
            }
            Ok(0)
        }
        Command::Templates(TemplatesCommand::Export(a)) => {
            let pi = parse_pi(&a.pi)?;
            let template = build_named_template(&a.kind, &pi, a.ell, a.s)?;
            std::fs::create_dir_all(&a.out)?;
            let text_path = a.out.join(format!("{}.txt", template.name));
            let sidecar_path = a.out.join(format!("{}.labels.json", template.name));
            write_hypergraph(&template.graph, &text_path)?;
            std::fs::write(&sidecar_path, template.sidecar_json())?;
            eprintln!(
                "wrote {} and {}",
                text_path.display(),
                sidecar_path.display()
            );
            Ok(0)
        }
    }
}

fn build_named_template(kind: &str, pi: &OrderedPartition, ell: usize, s: usize) -> Result<Template> {
    Ok(match kind {
        "step" => build_step(pi),
        "path" => build_path(pi, ell)?,
        "cycle" => build_cycle(pi.parts(), ell)?,
        "cycle4direct" => build_cycle4_direct(pi),
        "partial" => build_partial_step(pi, s)?,
        other => bail!("unknown template kind '{other}'"),
    })
}

fn resolve_template(spec: &str, pi: &OrderedPartition, ell: usize, s: usize) -> Result<Hypergraph> {
    match spec {
        "edge" => {
            let k = pi.k();
            Ok(Hypergraph::new(k, k, vec![(0..k).collect()], false)?)
        }
        "step" | "path" | "cycle" | "cycle4direct" | "partial" => {
            Ok(build_named_template(spec, pi, ell, s)?.graph)
        }
        path => {
            let file = PathBuf::from(path);
            if file.exists() {
                Ok(read_hypergraph(&file)?)
            } else {
                bail!("template '{path}' is neither a known kind nor a file");
            }
        }
    }
}
