mod render;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tanglegram::oracle::brute_crossing_number_limited;
use tanglegram::{
    all_planar_layouts, census, census_csv, count_crossings, crtei_all, flip_graph, insert_edge, irreducible_series,
    is_planar, iterated_insertion_report, modified_untangle, multi_insertion_report, parse_h_file, random_tanglegram,
    solve_f, IndexSet, Layout, Tanglegram,
};

use render::{render_svg, RenderSpec};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: tanglegram::Error },
    #[error(transparent)]
    Core(#[from] tanglegram::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let core = match self {
            CliError::Io { .. } => return 1,
            CliError::Input { source, .. } | CliError::Core(source) => source,
        };
        match core {
            tanglegram::Error::Parse { .. } => 2,
            tanglegram::Error::Precondition(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "tangle", version, about = "Tanglegram layouts, edge insertion and planar census")]
struct Cli {
    /// Worker threads for enumeration and exhaustive sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print `planar` or `not planar`.
    CheckPlanar { file: PathBuf },
    /// Layout from the refinement algorithm, with its leaf-matched pairs.
    Untangle { file: PathBuf },
    /// Every crossing-free layout.
    Layouts { file: PathBuf },
    /// Crossing-free layouts joined by single paired flips.
    FlipGraph { file: PathBuf },
    /// Put one matched leaf pair back into the planar rest with the fewest crossings.
    Insert {
        #[arg(long)]
        remove: u32,
        file: PathBuf,
    },
    /// Add the labels outside `--keep` one at a time.
    IteratedInsert {
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<u32>,
        file: PathBuf,
    },
    /// Add the labels outside `--keep` together with the fewest crossings.
    MultiInsert {
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<u32>,
        file: PathBuf,
    },
    /// Best layout found by the polynomial algorithms, or the true minimum with `--exact`.
    CrossingNumber {
        #[arg(long)]
        exact: bool,
        /// Largest size the exhaustive search accepts.
        #[arg(long, default_value_t = 10)]
        limit: usize,
        file: PathBuf,
    },
    /// Planar classes of one size counted by leaf-matched pairs, as CSV.
    Census {
        #[arg(long)]
        size: usize,
    },
    /// Generating function coefficients as CSV.
    Series {
        #[arg(long)]
        max_degree: usize,
        /// Irreducible counts `n value` per line, overriding or extending the census.
        #[arg(long)]
        h_file: Option<PathBuf>,
    },
    /// Draw a layout as SVG.
    Render {
        #[arg(long)]
        layout: PathBuf,
        file: PathBuf,
        #[arg(long, default_value_t = 30.0)]
        unit: f64,
        #[arg(long, default_value_t = 40.0)]
        depth_px: f64,
    },
    /// A random tanglegram in `.tgl` form.
    Random {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<Tanglegram, CliError> {
    Tanglegram::parse_tgl(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut String, tg: &Tanglegram, ly: &Layout) -> Result<(), CliError> {
    let c = count_crossings(tg, ly)?;
    writeln!(out, "{ly}\ncrossings: {c}").unwrap();
    Ok(())
}

fn keep_set(tg: &Tanglegram, keep: &[u32]) -> Result<IndexSet, CliError> {
    let set: IndexSet = keep.iter().copied().collect();
    tg.check_labels(&set)?;
    Ok(set)
}

fn require_planar(tg: &Tanglegram) -> Result<(), CliError> {
    if is_planar(tg) {
        Ok(())
    } else {
        Err(tanglegram::Error::Precondition("tanglegram is not planar".into()).into())
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let threads = Some(cli.threads.max(1));
    let mut out = String::new();
    match cli.command {
        Command::CheckPlanar { file } => {
            let tg = load(&file)?;
            out.push_str(if is_planar(&tg) { "planar\n" } else { "not planar\n" });
        }
        Command::Untangle { file } => {
            let tg = load(&file)?;
            let (ly, pairs) = modified_untangle(&tg, &tg.label_set())?;
            emit(&mut out, &tg, &ly)?;
            for p in pairs {
                let t: Vec<String> = tg.t().leaf_labels(p.u).iter().map(|l| l.to_string()).collect();
                let s: Vec<String> = tg.s().leaf_labels(p.v).iter().map(|l| l.to_string()).collect();
                writeln!(out, "pair: {} | {}", t.join(" "), s.join(" ")).unwrap();
            }
        }
        Command::Layouts { file } => {
            let tg = load(&file)?;
            require_planar(&tg)?;
            let all = all_planar_layouts(&tg)?;
            writeln!(out, "layouts: {}", all.len()).unwrap();
            for ly in &all {
                out.push('\n');
                emit(&mut out, &tg, ly)?;
            }
        }
        Command::FlipGraph { file } => {
            let tg = load(&file)?;
            require_planar(&tg)?;
            let g = flip_graph(&tg)?;
            writeln!(out, "nodes: {}\nedges: {}", g.nodes.len(), g.edge_count()).unwrap();
            out.push_str(&g.to_text());
        }
        Command::Insert { remove, file } => {
            let tg = load(&file)?;
            let ly = insert_edge(&tg, remove)?;
            emit(&mut out, &tg, &ly)?;
        }
        Command::IteratedInsert { keep, file } => {
            let tg = load(&file)?;
            let active = keep_set(&tg, &keep)?;
            let report = iterated_insertion_report(&tg, &active)?;
            emit(&mut out, &tg, &report.layout)?;
            for s in &report.steps {
                writeln!(out, "step: label {} added {}", s.label, s.added).unwrap();
            }
        }
        Command::MultiInsert { keep, file } => {
            let tg = load(&file)?;
            let active = keep_set(&tg, &keep)?;
            let report = multi_insertion_report(&tg, &active)?;
            emit(&mut out, &tg, &report.layout)?;
            writeln!(out, "passes: {}", report.passes).unwrap();
        }
        Command::CrossingNumber { exact, limit, file } => {
            let tg = load(&file)?;
            let ly = if exact {
                brute_crossing_number_limited(&tg, limit)?.witness
            } else {
                best_known_layout(&tg)?
            };
            emit(&mut out, &tg, &ly)?;
            writeln!(out, "{}", if exact { "exact: yes" } else { "exact: no (upper bound)" }).unwrap();
        }
        Command::Census { size } => {
            out.push_str(&census_csv(&[census(size, threads)?]));
        }
        Command::Series { max_degree, h_file } => {
            let overrides = match h_file {
                Some(path) => parse_h_file(&read(&path)?).map_err(|source| CliError::Input { path, source })?,
                None => BTreeMap::new(),
            };
            let h = irreducible_series(max_degree, &overrides, threads)?;
            out.push_str(&solve_f(&h)?.to_csv()?);
        }
        Command::Render {
            layout,
            file,
            unit,
            depth_px,
        } => {
            let tg = load(&file)?;
            let ly = Layout::parse(&read(&layout)?).map_err(|source| CliError::Input { path: layout, source })?;
            count_crossings(&tg, &ly)?;
            if !(unit > 0.0 && depth_px > 0.0) {
                return Err(tanglegram::Error::InvalidArgument("dimensions must be positive".into()).into());
            }
            let spec = RenderSpec {
                unit,
                tree_depth_px: depth_px,
                ..RenderSpec::default()
            };
            out.push_str(&render_svg(&tg, &ly, &spec));
        }
        Command::Random { size, seed } => {
            if size == 0 {
                return Err(tanglegram::Error::InvalidArgument("size must be positive".into()).into());
            }
            let tg = random_tanglegram(size, &mut ChaCha8Rng::seed_from_u64(seed))?;
            out.push_str(&tg.to_tgl());
        }
    }
    Ok(out)
}

/// Fewest crossings among the untangled layout and every valid single insertion.
fn best_known_layout(tg: &Tanglegram) -> Result<Layout, CliError> {
    let (mut best, _) = modified_untangle(tg, &tg.label_set())?;
    let mut best_c = count_crossings(tg, &best)?;
    if tg.size() >= 2 {
        for (i, c) in crtei_all(tg)? {
            if c < best_c {
                best = insert_edge(tg, i)?;
                best_c = c;
            }
        }
    }
    Ok(best)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.max(1);
    let result = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p.install(|| run(cli)),
        Err(e) => Err(tanglegram::Error::Internal(e.to_string()).into()),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
