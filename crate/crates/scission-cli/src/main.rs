//! Command-line front end: validation, class-group reports, congruence
//! queries, induced maps, property suites, and the example builders.
//!
//! Exit codes: 0 success / true, 1 domain-negative (invalid complex, not
//! congruent, counterexample found), 2 usage or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scission::builders::{self, GroupTable};
use scission::complex::{
    load_complex_with_cap, load_functor, save_complex, save_functor, validate, validate_functor,
    PolytopeComplex,
};
use scission::k0::{self, group_display, K0Class};
use scission::twist::TwObject;
use scission::waldhausen::check_waldhausen;

/// Cover-saturation cap override, in down-set members.
const CAP_ENV: &str = "SCISSION_COVER_CAP";

#[derive(Parser)]
#[command(name = "scission", version, about = "Cut-and-move congruence at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the five complex axioms; print a report.
    Validate { path: PathBuf },
    /// Compute the class group: rank, invariant factors, generator classes.
    K0 {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the class of a family, given as names joined by '+'.
    Class {
        path: PathBuf,
        family: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decide whether two families are congruent (same class).
    Congruent {
        path: PathBuf,
        family_a: String,
        family_b: String,
    },
    /// Compute the induced class-group map of a functor document.
    MapK0 {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the seeded structural property suite.
    CheckWaldhausen {
        path: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a bundled example complex.
    Example {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Args)]
struct OutArg {
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Example {
    /// Two objects, no structure.
    Sphere {
        #[command(flatten)]
        out: OutArg,
    },
    /// A finite group acting on a point.
    Sg {
        /// c2, c3, c4, ... or s3.
        #[arg(long, default_value = "c2")]
        group: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Unions of grid cells of width 1/q inside [0, m].
    Interval {
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Divisibility on (1)..(n).
    Rationals {
        #[arg(long, default_value_t = 12)]
        n: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Ideals of a quadratic field with norm at most n.
    Quadratic {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 25)]
        n: u64,
        /// Also write source.json, target.json and functor.json for the
        /// inclusion of the divisibility complex, into this directory.
        #[arg(long)]
        inclusion_dir: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Shared-bottom sum of complex files.
    Wedge {
        /// Input complex files; repeat the flag.
        #[arg(short, long = "input", required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cap_override() -> Result<Option<usize>, String> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("{CAP_ENV} must be an integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

fn load(path: &PathBuf) -> Result<PolytopeComplex, String> {
    load_complex_with_cap(path, cap_override()?).map_err(|e| e.to_string())
}

fn parse_family(cx: &PolytopeComplex, text: &str) -> Result<TwObject, String> {
    let mut components = Vec::new();
    for name in text.split('+') {
        let name = name.trim();
        let x = cx
            .object_by_name(name)
            .ok_or_else(|| format!("unknown object `{name}`"))?;
        components.push(x);
    }
    TwObject::new(cx, components).map_err(|e| e.to_string())
}

fn class_json(c: &K0Class) -> serde_json::Value {
    serde_json::json!({
        "free": c.free.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "torsion": c.torsion.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    })
}

fn class_text(c: &K0Class) -> String {
    let free: Vec<String> = c.free.iter().map(|x| x.to_string()).collect();
    let torsion: Vec<String> = c.torsion.iter().map(|x| x.to_string()).collect();
    if torsion.is_empty() {
        format!("({})", free.join(", "))
    } else {
        format!("({}; torsion {})", free.join(", "), torsion.join(", "))
    }
}

fn emit(out: &OutArg, text: String) -> Result<ExitCode, String> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string())?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { path } => {
            let cx = load(&path)?;
            let report = validate(&cx);
            print!("{report}");
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::K0 { path, format } => {
            let cx = load(&path)?;
            let report = validate(&cx);
            if !report.passed() {
                return Err(format!(
                    "complex fails validation: {}",
                    report
                        .failed_axioms()
                        .iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
            }
            let k = k0::k0(&cx);
            match format {
                Format::Text => {
                    println!("group: {}", group_display(&k.group));
                    println!("rank: {}", k.group.rank);
                    let torsion: Vec<String> = k
                        .group
                        .invariant_factors
                        .iter()
                        .map(|d| d.to_string())
                        .collect();
                    println!(
                        "invariant factors: {}",
                        if torsion.is_empty() {
                            "none".to_string()
                        } else {
                            torsion.join(", ")
                        }
                    );
                    println!("generator classes:");
                    for &g in &k.presentation.generators {
                        let class = k.generator_class(g).expect("generator");
                        println!("  {:<16} {}", cx.name(g), class_text(&class));
                    }
                }
                Format::Json => {
                    let classes: serde_json::Map<String, serde_json::Value> = k
                        .presentation
                        .generators
                        .iter()
                        .map(|&g| {
                            (
                                cx.name(g).to_string(),
                                class_json(&k.generator_class(g).expect("generator")),
                            )
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "version": env!("CARGO_PKG_VERSION"),
                        "group": group_display(&k.group),
                        "rank": k.group.rank,
                        "invariant_factors": k.group.invariant_factors.iter()
                            .map(|d| d.to_string()).collect::<Vec<_>>(),
                        "generator_classes": classes,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Class { path, family, format } => {
            let cx = load(&path)?;
            let k = k0::k0(&cx);
            let fam = parse_family(&cx, &family)?;
            let class = k.class_of(&fam);
            match format {
                Format::Text => println!("{}", class_text(&class)),
                Format::Json => {
                    let doc = serde_json::json!({
                        "version": env!("CARGO_PKG_VERSION"),
                        "class": class_json(&class),
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Congruent {
            path,
            family_a,
            family_b,
        } => {
            let cx = load(&path)?;
            let k = k0::k0(&cx);
            let a = parse_family(&cx, &family_a)?;
            let b = parse_family(&cx, &family_b)?;
            if k.equal_in_k0(&a, &b) {
                println!("congruent");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("not congruent");
                Ok(ExitCode::from(1))
            }
        }
        Command::MapK0 { path, format } => {
            let f = load_functor(&path).map_err(|e| e.to_string())?;
            let report = validate_functor(&f);
            if !report.passed() {
                print!("{report}");
                return Ok(ExitCode::from(1));
            }
            let src_k0 = k0::k0(f.source());
            let tgt_k0 = k0::k0(f.target());
            let map = k0::induced_k0_map(&f, &src_k0, &tgt_k0).map_err(|e| e.to_string())?;
            match format {
                Format::Text => {
                    println!("target group: {}", group_display(&tgt_k0.group));
                    for (g, col) in map.source_generators.iter().zip(&map.columns) {
                        println!(
                            "  {:<16} -> {}",
                            f.source().name(*g),
                            class_text(col)
                        );
                    }
                }
                Format::Json => {
                    let columns: serde_json::Map<String, serde_json::Value> = map
                        .source_generators
                        .iter()
                        .zip(&map.columns)
                        .map(|(g, col)| (f.source().name(*g).to_string(), class_json(col)))
                        .collect();
                    let doc = serde_json::json!({
                        "version": env!("CARGO_PKG_VERSION"),
                        "target_group": group_display(&tgt_k0.group),
                        "columns": columns,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckWaldhausen {
            path,
            samples,
            seed,
        } => {
            let cx = load(&path)?;
            let report = check_waldhausen(&cx, samples, seed);
            print!("{report}");
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Example { which } => run_example(which),
    }
}

fn group_by_name(name: &str) -> Result<GroupTable, String> {
    let lower = name.to_lowercase();
    if lower == "s3" {
        return Ok(GroupTable::symmetric_3());
    }
    if let Some(n) = lower.strip_prefix('c') {
        let n: usize = n
            .parse()
            .map_err(|_| format!("unknown group `{name}` (use cN or s3)"))?;
        if n == 0 {
            return Err("cyclic order must be positive".into());
        }
        return Ok(GroupTable::cyclic(n));
    }
    Err(format!("unknown group `{name}` (use cN or s3)"))
}

fn run_example(which: Example) -> Result<ExitCode, String> {
    match which {
        Example::Sphere { out } => emit(&out, save_complex(&builders::sphere())),
        Example::Sg { group, out } => {
            let table = group_by_name(&group)?;
            let cx = builders::s_g(&table).map_err(|e| e.to_string())?;
            emit(&out, save_complex(&cx))
        }
        Example::Interval { q, m, out } => {
            let cx = builders::interval_line(q, m).map_err(|e| e.to_string())?;
            emit(&out, save_complex(&cx))
        }
        Example::Rationals { n, out } => {
            let cx = builders::rationals(n).map_err(|e| e.to_string())?;
            emit(&out, save_complex(&cx))
        }
        Example::Quadratic {
            d,
            n,
            inclusion_dir,
            out,
        } => {
            let q = builders::quadratic(d, n).map_err(|e| e.to_string())?;
            if let Some(dir) = inclusion_dir {
                let f = builders::inclusion_functor(d, n).map_err(|e| e.to_string())?;
                std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                std::fs::write(dir.join("source.json"), save_complex(f.source()))
                    .map_err(|e| e.to_string())?;
                std::fs::write(dir.join("target.json"), save_complex(f.target()))
                    .map_err(|e| e.to_string())?;
                std::fs::write(
                    dir.join("functor.json"),
                    save_functor(&f, "source.json", "target.json"),
                )
                .map_err(|e| e.to_string())?;
            }
            emit(&out, save_complex(&q.complex))
        }
        Example::Wedge { inputs, out } => {
            let mut summands = Vec::new();
            for path in &inputs {
                summands.push(load(path)?);
            }
            let cx = builders::wedge(&summands).map_err(|e| e.to_string())?;
            emit(&out, save_complex(&cx))
        }
    }
}
