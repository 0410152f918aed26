mod manifest;
mod tables;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ftle_core::adjacency::build_adjacency;
use ftle_core::field::{compute_ftle_decoupled, compute_ftle_naive, FtleField};
use ftle_core::fixtures::{self, Flow};
use ftle_core::format::{self, Format};
use ftle_core::mesh::Dim;
use ftle_core::neighbors::{precompute_neighbors, slot_name, validate_neighbor_list};
use ftle_core::perf::lookup_tech;
use ftle_core::pipeline::{estimate_runtime, naive_throughput, pipelined_throughput, AcceleratorConfig};

use manifest::{FileDigest, RunManifest};

#[derive(Parser, Debug)]
#[command(
    name = "ftle",
    version,
    about = "FTLE fields on simplicial meshes and an accelerator throughput model"
)]
struct Cli {
    /// Worker threads for the field computation (0 = all cores).
    #[arg(long, global = true, env = "FTLE_THREADS")]
    threads: Option<usize>,

    /// Where to write the run manifest. Defaults to `<output>.manifest.json`
    /// for commands that write files and to stderr for reports.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Decoupled,
    Naive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Table {
    Table1,
    Table2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeshKind {
    Grid,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowKind {
    Identity,
    Linear,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Precompute the per-axis neighbor list of a mesh.
    Neighbors {
        mesh: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compute the FTLE field of a flow map.
    Ftle {
        mesh: PathBuf,
        flowmap: PathBuf,
        /// Precomputed neighbor list; computed on the fly when absent.
        #[arg(long)]
        neighbors: Option<PathBuf>,
        /// Integration horizon T of the flow map.
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_enum, default_value_t = Mode::Decoupled)]
        mode: Mode,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print the synthesis (table1) or memory feasibility (table2) table.
    Model {
        #[arg(value_enum)]
        table: Table,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Predict accelerator throughput against a memory technology.
    Simulate {
        #[arg(long, value_parser = parse_dim)]
        dim: Dim,
        /// Clock frequency in Hz; defaults to the synthesized maximum.
        #[arg(long)]
        freq: Option<f64>,
        /// Memory technology name, e.g. 2ch-ddr4-2400.
        #[arg(long)]
        mem: String,
        /// Fraction of peak bandwidth achieved by the access pattern, in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        /// Initiation interval in cycles.
        #[arg(long, default_value_t = 1)]
        ii: u32,
        /// Bank count for the bank-limited design; defaults to the technology's.
        #[arg(long)]
        banks: Option<u32>,
        /// Also estimate the runtime for this many points.
        #[arg(long)]
        points: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Write a deterministic mesh and flow map.
    Gen {
        #[arg(long, value_enum)]
        kind: MeshKind,
        #[arg(long, value_parser = parse_dim)]
        dim: Dim,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FlowKind::Identity)]
        flow: FlowKind,
        /// Row-major matrix for the linear flow, e.g. 2,0,0,0.5.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        matrix: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long)]
        out_dir: PathBuf,
        /// Write CSV instead of binary.
        #[arg(long)]
        csv: bool,
    },
}

fn parse_dim(s: &str) -> Result<Dim, String> {
    s.parse::<usize>()
        .ok()
        .and_then(Dim::from_usize)
        .ok_or_else(|| format!("dimension must be 2 or 3, got {s}"))
}

fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

fn manifest_path(explicit: &Option<PathBuf>, out: &Path) -> PathBuf {
    explicit.clone().unwrap_or_else(|| {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    })
}

fn write_manifest(m: &RunManifest, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let text = serde_json::to_string_pretty(m)? + "\n";
            fs::write(p, text).with_context(|| format!("writing manifest {}", p.display()))
        }
        None => {
            eprintln!("manifest: {}", serde_json::to_string(m)?);
            Ok(())
        }
    }
}

fn digest(path: &Path) -> anyhow::Result<FileDigest> {
    FileDigest::of(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let start = Instant::now();
    match cli.command {
        Command::Neighbors { mesh, out } => {
            let m = format::load_mesh(&mesh, Format::from_path(&mesh))?;
            if m.n_faces() == 0 {
                warn("mesh has no faces; every neighbor entry is missing");
            }
            let nl = precompute_neighbors(&m, &build_adjacency(&m))?;
            format::save_neighbors(&out, &nl, Format::from_path(&out))?;
            println!("points {}", nl.n_points());
            for (slot, missing) in nl.missing_per_slot().into_iter().enumerate() {
                println!("missing {:<3} {missing}", slot_name(slot));
            }
            let mut man = RunManifest::new("neighbors", json!({}));
            man.inputs.push(digest(&mesh)?);
            man.outputs.push(digest(&out)?);
            man.finish(start.elapsed());
            write_manifest(&man, Some(&manifest_path(&cli.manifest, &out)))
        }
        Command::Ftle {
            mesh,
            flowmap,
            neighbors,
            horizon,
            mode,
            out,
        } => {
            let m = format::load_mesh(&mesh, Format::from_path(&mesh))?;
            let fm = format::load_flowmap(&flowmap, Format::from_path(&flowmap), horizon)?;
            let field: FtleField = match mode {
                Mode::Decoupled => {
                    let nl = match &neighbors {
                        Some(p) => {
                            let nl = format::load_neighbors(p, Format::from_path(p))?;
                            let violations = validate_neighbor_list(&m, &nl);
                            if let Some(first) = violations.first() {
                                bail!(ftle_core::Error::InvalidParameter(format!(
                                    "invalid neighbor list {} ({} violations, first: {first})",
                                    p.display(),
                                    violations.len()
                                )));
                            }
                            nl
                        }
                        None => {
                            warn("no --neighbors given; computing the neighbor list on the fly");
                            precompute_neighbors(&m, &build_adjacency(&m))?
                        }
                    };
                    compute_ftle_decoupled(&m, &fm, &nl)?
                }
                Mode::Naive => {
                    if neighbors.is_some() {
                        warn("naive mode ignores --neighbors");
                    }
                    compute_ftle_naive(&m, &fm)?
                }
            };
            format::save_field(&out, &field, Format::from_path(&out))?;
            let s = field.stats();
            let show = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| format!("{v:.17e}"));
            println!("points {} finite {}", s.points, s.finite);
            println!("min {}", show(s.min));
            println!("max {}", show(s.max));
            println!("mean {}", show(s.mean));
            let mode_name = match mode {
                Mode::Decoupled => "decoupled",
                Mode::Naive => "naive",
            };
            let mut man = RunManifest::new("ftle", json!({ "horizon": horizon, "mode": mode_name }));
            man.inputs.push(digest(&mesh)?);
            man.inputs.push(digest(&flowmap)?);
            if let (Mode::Decoupled, Some(p)) = (mode, &neighbors) {
                man.inputs.push(digest(p)?);
            }
            man.outputs.push(digest(&out)?);
            man.finish(start.elapsed());
            write_manifest(&man, Some(&manifest_path(&cli.manifest, &out)))
        }
        Command::Model { table, format } => {
            let (name, text) = match table {
                Table::Table1 => ("table1", tables::render_table1(format)),
                Table::Table2 => ("table2", tables::render_table2(format)),
            };
            print!("{text}");
            let mut man = RunManifest::new("model", json!({ "table": name, "format": format_name(format) }));
            man.report_sha256 = Some(manifest::sha256_hex(text.as_bytes()));
            man.finish(start.elapsed());
            write_manifest(&man, cli.manifest.as_deref())
        }
        Command::Simulate {
            dim,
            freq,
            mem,
            efficiency,
            ii,
            banks,
            points,
            format,
        } => {
            let tech = lookup_tech(&mem)?;
            let reference = AcceleratorConfig::reference(dim);
            let cfg = AcceleratorConfig::new(
                dim,
                freq.unwrap_or(reference.freq_hz),
                ii,
                reference.latency_cycles,
                reference.data_bits_per_point,
                reference.index_bits_per_point,
            )?;
            let memory = tech.memory_system(efficiency)?;
            let t = pipelined_throughput(&cfg, &memory);
            let values = cfg.data_bits_per_point / 64;
            let indexes = cfg.index_bits_per_point / 32;
            let banks = banks.unwrap_or(tech.banks);
            let naive = naive_throughput(values, indexes, banks, cfg.freq_hz)?;
            let runtime = points
                .map(|n| estimate_runtime(n, t.rate, cfg.latency_cycles, cfg.freq_hz))
                .transpose()?;
            let report = json!({
                "rate": t.rate,
                "bound": t.bound,
                "cycles_per_point": t.cycles_per_point,
                "bytes_per_point": cfg.bytes_per_point(),
                "memory": { "name": tech.name, "peak_gbps": tech.peak_gbps, "efficiency": efficiency, "banks": banks },
                "config": cfg,
                "naive": {
                    "values_per_point": values,
                    "indexes_per_point": indexes,
                    "cycles_per_point": naive.cycles_per_point,
                    "points_per_cycle": naive.points_per_cycle,
                    "points_per_sec": naive.points_per_sec,
                    "note": "bank-limited design: one read per bank per cycle",
                },
                "points": points,
                "runtime_secs": runtime,
            });
            let text = match format {
                OutputFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
                OutputFormat::Csv => format!(
                    "rate,bound,cycles_per_point,naive_points_per_sec,naive_cycles_per_point,runtime_secs\n{},{},{},{},{},{}\n",
                    t.rate,
                    t.bound,
                    t.cycles_per_point,
                    naive.points_per_sec,
                    naive.cycles_per_point,
                    runtime.map_or(String::new(), |r| r.to_string())
                ),
                OutputFormat::Text => {
                    let mut s = format!(
                        "{}D @ {:.0} MHz on {} (efficiency {efficiency})\n",
                        dim.get(),
                        cfg.freq_hz / 1e6,
                        tech.label
                    );
                    s += &format!("pipelined: {:.4e} points/s, {}-bound, {:.4} cycles/point\n", t.rate, t.bound, t.cycles_per_point);
                    s += &format!(
                        "bank-limited: {:.4e} points/s, {} cycles/point over {banks} banks\n",
                        naive.points_per_sec, naive.cycles_per_point
                    );
                    if let (Some(n), Some(r)) = (points, runtime) {
                        s += &format!("runtime for {n} points: {r:.6e} s\n");
                    }
                    s
                }
            };
            print!("{text}");
            let mut man = RunManifest::new(
                "simulate",
                json!({
                    "dim": dim.get(), "freq": cfg.freq_hz, "mem": tech.name, "efficiency": efficiency,
                    "ii": ii, "banks": banks, "points": points, "format": format_name(format),
                }),
            );
            man.report_sha256 = Some(manifest::sha256_hex(text.as_bytes()));
            man.finish(start.elapsed());
            write_manifest(&man, cli.manifest.as_deref())
        }
        Command::Gen {
            kind,
            dim,
            n,
            flow,
            matrix,
            seed,
            horizon,
            out_dir,
            csv,
        } => {
            let m = match kind {
                MeshKind::Grid => fixtures::grid_mesh(dim, n)?,
                MeshKind::Random => fixtures::random_mesh(dim, n, seed)?,
            };
            let flow = match flow {
                FlowKind::Identity => Flow::Identity,
                FlowKind::Linear => Flow::Linear(matrix.clone()),
                FlowKind::Random => Flow::Random,
            };
            let fm = fixtures::flow_map(&m, &flow, horizon, seed)?;
            fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let (fmt, ext) = if csv {
                (Format::Csv, "csv")
            } else {
                (Format::Binary, "bin")
            };
            let mesh_out = out_dir.join(format!("mesh.{ext}"));
            let fm_out = out_dir.join(format!("flowmap.{ext}"));
            format::save_mesh(&mesh_out, &m, fmt)?;
            format::save_flowmap(&fm_out, &fm, fmt)?;
            println!("points {} faces {}", m.n_points(), m.n_faces());
            let mut man = RunManifest::new(
                "gen",
                json!({
                    "kind": format!("{kind:?}").to_lowercase(), "dim": dim.get(), "n": n,
                    "flow": format!("{flow:?}"), "seed": seed, "horizon": horizon, "csv": csv,
                }),
            );
            man.outputs.push(digest(&mesh_out)?);
            man.outputs.push(digest(&fm_out)?);
            man.finish(start.elapsed());
            let path = cli.manifest.clone().unwrap_or_else(|| out_dir.join("manifest.json"));
            write_manifest(&man, Some(&path))
        }
    }
}

fn format_name(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Text => "text",
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn configure_threads(threads: Option<usize>) -> anyhow::Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    #[cfg(not(feature = "parallel"))]
    if threads.is_some_and(|n| n > 1) {
        warn("built without the parallel feature; --threads is ignored");
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ftle_core::Error>() {
        Some(e) if e.is_validation() => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|()| run(cli));
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
