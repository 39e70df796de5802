//! `carpetlab` command-line interface.
//!
//! Exit codes: 0 when everything ran and every check passed, 1 when a check
//! failed, 2 on usage or input errors (unknown check, malformed manifest or
//! report, unreadable files).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use carpetlab::boundary::{boundary_circle_check, boundary_components, default_exhaustion, ends, rank, ComponentSpace};
use carpetlab::constructions::{from_space, Disk};
use carpetlab::gluing::{fill_slits, glue, GluingInstance};
use carpetlab::harness::{
    loglog_svg, merge_reports, split_check, verify, Builder, ConstructionSpec, Entry, Expected,
    Mode, Report, VerifyManifest,
};
use carpetlab::metric::io::{read_mesh, write_mesh};
use carpetlab::{CheckReport, DiscreteSpace, VertexId};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "carpetlab", version, about = "Slit domains, slit carpets, gluing and geometric-constant checks")]
struct Cli {
    /// Manifest-level random seed (overrides the manifest's own seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).  Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory that relative output paths are written into.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "Q")]
    Q,
    #[value(name = "R")]
    R,
    #[value(name = "Qinf")]
    Qinf,
    #[value(name = "carpet")]
    Carpet,
    #[value(name = "circles")]
    Circles,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh and write it as JSON.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Generation N.
        #[arg(long = "gen", default_value_t = 0)]
        generation: u32,
        /// Resolution exponent m (mesh pitch 2^-m).
        #[arg(long)]
        res: u32,
        /// JSON list of disks `[x, y, r]` for the `circles` family.
        #[arg(long)]
        disks: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run checks on a mesh and write a CSV report (plus a JSON sibling).
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated checks, e.g. `llc1,ahlfors:2,porosity:outer`.
        #[arg(long, value_delimiter = ',', required = true)]
        checks: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        /// Absolute radius window (both bounds required); the estimator
        /// default is a fraction of the diameter.
        #[arg(long, requires = "r_max")]
        r_min: Option<f64>,
        #[arg(long, requires = "r_min")]
        r_max: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Exit 1 if any check's own verdict is a failure.
        #[arg(long)]
        expect: bool,
    },
    /// Glue patches onto a base mesh.
    Glue {
        #[arg(long)]
        base: PathBuf,
        /// `mesh.json:map.json`; the map holds `pairs` (base id, patch id)
        /// and the declared `lipschitz` constant.
        #[arg(long)]
        patch: Vec<String>,
        /// Close every slit of the base with a hemispherical cap first.
        #[arg(long)]
        fill_slits: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Boundary components, ends, rank and boundary circles of a mesh.
    Boundary {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        ends: bool,
        #[arg(long)]
        rank: bool,
        #[arg(long)]
        circles: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification manifest; writes `<out>.csv` and `<out>.json`.
    Verify {
        manifest: PathBuf,
        /// Output path stem.
        #[arg(long, default_value = "verify")]
        out: PathBuf,
    },
    /// Merge report JSON files deterministically.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the merged rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write one log-log SVG per Ahlfors series into this directory.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
}

/// Error carrying the process exit code.
struct Failure(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(2, e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = |p: &Path| -> anyhow::Result<PathBuf> {
        let path = match &cli.out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        };
        if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        Ok(path)
    };
    let builder = Builder::from_env();
    match &cli.command {
        Command::Generate { family, generation, res, disks, out: dest } => {
            let spec = generate_spec(*family, *generation, *res, disks.as_deref())?;
            let built = builder.build(&spec)?;
            let space = built.space().ok_or_else(|| anyhow!("{spec} has no mesh"))?;
            write_mesh(space, &out(dest)?)?;
            println!("{}", json!({"construction": spec.to_string(), "vertices": space.len()}));
            Ok(())
        }
        Command::Analyze { input, checks, samples, r_min, r_max, out: dest, expect } => {
            let manifest = VerifyManifest {
                seed: cli.seed.unwrap_or(0),
                entries: checks
                    .iter()
                    .map(|c| Entry {
                        construction: format!("file({})", input.display()),
                        check: c.trim().to_string(),
                        expected: Expected::Flag(true),
                        mode: Mode::Flag,
                        tolerance: 0.0,
                        paper_ref: String::new(),
                        provenance: String::new(),
                        samples: *samples,
                        r_min: *r_min,
                        r_max: *r_max,
                    })
                    .collect(),
            };
            manifest.validate()?;
            let report = verify(&manifest, &builder)?;
            let csv_path = out(dest)?;
            fs::write(&csv_path, report.to_csv()?)?;
            fs::write(csv_path.with_extension("json"), report.to_json()?)?;
            if *expect && !report.all_pass() {
                return Err(Failure(1, anyhow!("{} check(s) failed", failed(&report))));
            }
            Ok(())
        }
        Command::Glue { base, patch, fill_slits: fill, out: dest } => {
            let mut space: DiscreteSpace<f64> = read_mesh(base)?;
            let mut declared = 1.0f64;
            if *fill {
                let filled = fill_slits(&from_space(space)?)?;
                declared = filled.lipschitz;
                space = filled.space;
            }
            if !patch.is_empty() {
                let mut maps = Vec::new();
                for p in patch {
                    let (mesh, map) =
                        p.rsplit_once(':').ok_or_else(|| anyhow!("--patch {p:?} is not mesh.json:map.json"))?;
                    let (pairs, l) = read_map(Path::new(map))?;
                    declared = declared.max(l);
                    maps.push((read_mesh::<f64>(Path::new(mesh))?, pairs));
                }
                let mut instance = GluingInstance::new(space, declared)?;
                for (mesh, pairs) in maps {
                    instance.add_patch(mesh, pairs)?;
                }
                let glued = glue(&instance)?;
                declared = glued.lipschitz;
                space = glued.space;
            }
            write_mesh(&space, &out(dest)?)?;
            println!("{}", json!({"vertices": space.len(), "lipschitz": declared, "label": space.label()}));
            Ok(())
        }
        Command::Boundary { input, ends: want_ends, rank: want_rank, circles, out: dest } => {
            let space: DiscreteSpace<f64> = read_mesh(input)?;
            let components = boundary_components(&space)?;
            let mut report = json!({ "components": components });
            if *want_ends {
                let (base, radii) = default_exhaustion(&space)?;
                report["ends"] = serde_json::to_value(ends(&space, base, &radii)?)?;
            }
            if *want_rank {
                report["rank"] = json!(rank(&ComponentSpace::from_marked_sets(&space))?);
            }
            if *circles {
                let reports: Vec<CheckReport> = space
                    .boundary_sets()
                    .into_iter()
                    .map(|m| {
                        boundary_circle_check(&space, m).unwrap_or_else(|e| {
                            let mut r = CheckReport::new(&m.name, "boundary circle");
                            r.fail(&[], e.to_string());
                            r
                        })
                    })
                    .collect();
                report["circles"] = serde_json::to_value(reports)?;
            }
            fs::write(out(dest)?, serde_json::to_string_pretty(&report)? + "\n")?;
            Ok(())
        }
        Command::Verify { manifest, out: stem } => {
            let text = fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let mut m = VerifyManifest::from_json(&text)?;
            if let Some(seed) = cli.seed {
                m.seed = seed;
            }
            let report = verify(&m, &builder)?;
            let stem = out(stem)?;
            fs::write(stem.with_extension("csv"), report.to_csv()?)?;
            fs::write(stem.with_extension("json"), report.to_json()?)?;
            if !report.all_pass() {
                return Err(Failure(1, anyhow!("{} of {} entries failed", failed(&report), report.rows.len())));
            }
            Ok(())
        }
        Command::Report { inputs, out: dest, csv, plot_dir } => {
            let mut texts = Vec::new();
            let mut reports = Vec::new();
            for p in inputs {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                reports.push(Report::from_json(&text).with_context(|| p.display().to_string())?);
                texts.push(text);
            }
            let merged = merge_reports(&reports)?;
            let body = if texts.len() == 1 { texts.remove(0) } else { merged.to_json()? };
            fs::write(out(dest)?, body)?;
            if let Some(c) = csv {
                fs::write(out(c)?, merged.to_csv()?)?;
            }
            if let Some(dir) = plot_dir {
                for s in merged.series.iter().filter(|s| split_check(&s.check).0 == "ahlfors") {
                    let name: String = format!("{}_{}_{}", s.construction, s.check, s.seed)
                        .chars()
                        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
                        .collect();
                    fs::write(out(&dir.join(format!("{name}.svg")))?, loglog_svg(s))?;
                }
            }
            Ok(())
        }
    }
}

fn failed(report: &Report) -> usize {
    report.rows.iter().filter(|r| !r.passed()).count()
}

fn generate_spec(family: FamilyArg, n: u32, m: u32, disks: Option<&Path>) -> anyhow::Result<ConstructionSpec> {
    use carpetlab::harness::SlitFamily;
    let slit = |family| Ok(ConstructionSpec::Slit { family, n, m });
    match family {
        FamilyArg::Q => slit(SlitFamily::Q),
        FamilyArg::R => slit(SlitFamily::R),
        FamilyArg::Qinf => slit(SlitFamily::Qinf),
        FamilyArg::Carpet => slit(SlitFamily::Carpet),
        FamilyArg::Circles => {
            let disks: Vec<Disk> = match disks {
                Some(p) => serde_json::from_str(&fs::read_to_string(p)?)
                    .with_context(|| format!("{} is not a list of [x, y, r]", p.display()))?,
                None => Vec::new(),
            };
            Ok(ConstructionSpec::Circles { m, disks })
        }
    }
}

/// Reads a gluing map: `{"pairs": [[base, patch], …], "lipschitz": L}`.
fn read_map(path: &Path) -> anyhow::Result<(Vec<(VertexId, VertexId)>, f64)> {
    #[derive(serde::Deserialize)]
    struct Map {
        pairs: Vec<(VertexId, VertexId)>,
        lipschitz: f64,
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: Map = serde_json::from_str(&text).with_context(|| format!("{} is not a gluing map", path.display()))?;
    if !(map.lipschitz >= 1.0) {
        bail!("{}: declared lipschitz constant must be >= 1", path.display());
    }
    Ok((map.pairs, map.lipschitz))
}
