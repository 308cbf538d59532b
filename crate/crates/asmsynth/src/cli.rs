//! Command-line front end. Exit codes: 0 success, 1 failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use asmsynth_core::assembly::replay;
use asmsynth_core::kinematics::{dof, forward_kinematics};
use asmsynth_core::{Catalog, Hierarchy, TaxonomyContext};
use clap::{Parser, Subcommand};

use crate::data::DataDir;
use crate::export::export_urdf;
use crate::formats;
use crate::pipeline::{compile_doc, synthesize, CompiledResult};
use crate::toy_arm;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "asmsynth", version, about = "Typed synthesis of mechanical assemblies")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check or print the subtype hierarchies of a data directory.
    Taxonomy {
        #[command(subcommand)]
        action: TaxonomyAction,
    },
    /// Check the part files of a data directory.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Synthesize assemblies for a request.
    Synth {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        request: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the request's limit.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Replay an assembly program and write the posed scene.
    Assemble {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated joint angles in radians; zeros when omitted.
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
    },
    /// Write one synthesized result as URDF.
    ExportUrdf {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        result: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "assembly")]
        name: String,
    },
    /// Run the bundled toy arm end to end.
    Demo {
        /// Also write the catalog and all outputs here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "CLSCAD_DATA")]
        data: PathBuf,
        /// Concurrent synthesis jobs; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum TaxonomyAction {
    Validate { dir: PathBuf },
    Show { dir: PathBuf },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    Validate { dir: PathBuf },
}

type CmdResult = Result<(), String>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return usage_exit(&e);
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}

/// Help and version requests are not errors.
fn usage_exit(e: &clap::Error) -> i32 {
    if e.use_stderr() {
        EXIT_USAGE
    } else {
        EXIT_OK
    }
}

fn execute(command: Command) -> CmdResult {
    match command {
        Command::Taxonomy { action: TaxonomyAction::Validate { dir } } => {
            let ctx = load_taxonomies(&dir)?;
            for tax in ctx.taxonomies() {
                eprintln!("{}: {} nodes, {} edges", tax.hierarchy(), tax.len(), tax.edges().count());
            }
            Ok(())
        }
        Command::Taxonomy { action: TaxonomyAction::Show { dir } } => {
            print!("{}", render_taxonomies(&load_taxonomies(&dir)?));
            Ok(())
        }
        Command::Catalog { action: CatalogAction::Validate { dir } } => catalog_validate(&dir),
        Command::Synth { data, request, out, limit } => synth(&data, &request, &out, limit),
        Command::Assemble { program, data, out, angles } => assemble(&program, &data, &out, angles.as_deref()),
        Command::ExportUrdf { data, results, result, out, name } => {
            let catalog = load_catalog(&data)?;
            let docs = formats::load_results(&read(&results)?).map_err(|e| format!("{}: {e}", results.display()))?;
            let doc = docs
                .get(result)
                .ok_or_else(|| format!("result {result} out of range; {} results", docs.len()))?;
            let compiled = compile_doc(&catalog, doc).map_err(|e| e.to_string())?;
            let posed = compiled.pose(&catalog, &vec![0.0; dof(&compiled.tree)]).map_err(|e| e.to_string())?;
            write(&out, &export_urdf(&catalog, &compiled.tree, &compiled.partition, &posed, &name))
        }
        Command::Demo { out } => demo(out.as_deref()),
        Command::Serve { port, data, workers } => serve(port, data, workers),
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_taxonomies(dir: &Path) -> Result<TaxonomyContext, String> {
    DataDir::new(dir).load_taxonomies().map_err(|e| e.to_string())
}

fn load_catalog(dir: &Path) -> Result<Catalog, String> {
    DataDir::new(dir).load_catalog().map_err(|e| e.to_string())
}

/// Indented tree per hierarchy; nodes with several parents appear under
/// each of them.
pub fn render_taxonomies(ctx: &TaxonomyContext) -> String {
    fn walk(tax: &asmsynth_core::Taxonomy, node: &str, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(node);
        out.push('\n');
        let mut children: Vec<&str> = tax.children(node).collect();
        children.sort();
        for c in children {
            walk(tax, c, depth + 1, out);
        }
    }
    let mut out = String::new();
    for h in Hierarchy::ALL {
        let tax = ctx.taxonomy(h);
        out.push_str(&format!("{h}:\n"));
        let mut roots: Vec<&str> = tax.nodes().filter(|n| tax.parents(n).next().is_none()).collect();
        roots.sort();
        for r in roots {
            walk(tax, r, 1, &mut out);
        }
    }
    out
}

fn catalog_validate(dir: &Path) -> CmdResult {
    let data = DataDir::new(dir);
    let ctx = data.load_taxonomies().map_err(|e| e.to_string())?;
    let findings = data.check_catalog(&ctx).map_err(|e| e.to_string())?;
    let mut errors = 0;
    for f in &findings {
        let part = f.part_id.as_deref().map(|p| format!("{p}: ")).unwrap_or_default();
        eprintln!("{}: {part}{}", f.file.display(), f.message);
        errors += usize::from(f.is_error());
    }
    if errors > 0 {
        return Err(format!("{errors} error(s)"));
    }
    let catalog = data.load_catalog().map_err(|e| e.to_string())?;
    eprintln!("{} parts, {} configurations", catalog.len(), catalog.configurations().len());
    Ok(())
}

fn write_results(out: &Path, results: &[CompiledResult]) -> CmdResult {
    let docs: Vec<_> = results.iter().map(CompiledResult::doc).collect();
    write(&out.join("results.json"), &formats::save_results(&docs))?;
    for (i, r) in results.iter().enumerate() {
        write(&out.join(format!("program-{i}.json")), &formats::save_program(&r.program))?;
        write(&out.join(format!("bom-{i}.json")), &formats::save_bom(&r.bom))?;
    }
    Ok(())
}

fn synth(data: &Path, request: &Path, out: &Path, limit: Option<usize>) -> CmdResult {
    let catalog = load_catalog(data)?;
    let mut request = formats::load_request(&read(request)?).map_err(|e| format!("{}: {e}", request.display()))?;
    if let Some(limit) = limit {
        request = request.with_limit(limit);
    }
    let results = synthesize(&catalog, &request).map_err(|e| e.to_string())?;
    write_results(out, &results)?;
    eprintln!("{} results written to {}", results.len(), out.display());
    Ok(())
}

/// Comma-separated radians; the empty string is the empty vector.
pub fn parse_angles(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|a| {
            let v: f64 = a.trim().parse().map_err(|_| format!("invalid angle {a:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("invalid angle {a:?}"))
            }
        })
        .collect()
}

fn assemble(program: &Path, data: &Path, out: &Path, angles: Option<&str>) -> CmdResult {
    let catalog = load_catalog(data)?;
    let program = formats::load_program(&read(program)?).map_err(|e| format!("{}: {e}", program.display()))?;
    let (tree, _) = replay(&catalog, &program).map_err(|e| e.to_string())?;
    let angles = match angles {
        Some(s) => parse_angles(s)?,
        None => vec![0.0; dof(&tree)],
    };
    let posed = forward_kinematics(&catalog, &tree, &program, &angles).map_err(|e| e.to_string())?;
    write(out, &formats::save_scene(&formats::scene_entries(&posed)))
}

fn demo(out: Option<&Path>) -> CmdResult {
    let catalog = toy_arm::catalog();
    let request = toy_arm::self_rotate_request();
    let results = synthesize(&catalog, &request).map_err(|e| e.to_string())?;
    eprintln!("toy arm: {} parts, request {}", catalog.len(), formats::save_request(&request).replace('\n', " "));
    for (i, r) in results.iter().take(5).enumerate() {
        let cost = r.bom.total_known_cost.to_f64();
        let n = dof(&r.tree);
        eprintln!("  #{i}: {} parts, {} DoF, cost {cost}{}", r.part_count, n, if r.bom.cost_complete { "" } else { "+" });
    }
    eprintln!("{} results", results.len());
    if let Some(out) = out {
        DataDir::new(out.join("data")).write_catalog(&catalog).map_err(|e| e.to_string())?;
        write(&out.join("request.json"), &formats::save_request(&request))?;
        write_results(out, &results)?;
        if let Some(first) = results.first() {
            let posed = first.pose(&catalog, &vec![0.0; dof(&first.tree)]).map_err(|e| e.to_string())?;
            write(&out.join("scene-0.json"), &formats::save_scene(&formats::scene_entries(&posed)))?;
            write(&out.join("result-0.urdf"), &export_urdf(&catalog, &first.tree, &first.partition, &posed, "toy-arm"))?;
        }
    }
    Ok(())
}

fn serve(port: u16, data: PathBuf, workers: Option<usize>) -> CmdResult {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .try_init();
    let data = DataDir::new(data);
    let catalog = data.load_catalog().map_err(|e| e.to_string())?;
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
    let state = crate::server::AppState::new(catalog, Some(data), workers);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await.map_err(|e| e.to_string())?;
        tracing::info!("listening on {}", listener.local_addr().map_err(|e| e.to_string())?);
        axum::serve(listener, crate::server::router(state)).await.map_err(|e| e.to_string())
    })
}
