//! Command-line interface over the quadratic-module toolkit.
//!
//! Exit codes: 0 on success (and for positive verdicts), 1 for negative
//! isomorphism/equivalence verdicts, 2 for validation, guard, or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qm_core::blocks::decompose;
use qm_core::classify::{enumerate_fqm, equivalent, Verdict};
use qm_core::discriminant::discriminant_module;
use qm_core::error::{Error, Result};
use qm_core::fqm::FiniteQuadraticModule;
use qm_core::guards::Guards;
use qm_core::io;
use qm_core::lattice::GramMatrix;
use qm_core::modular::{modular_data, state_space_dim};
use qm_core::realize::{realize, RealizationCache};

#[derive(Parser)]
#[command(name = "qm", about = "Finite quadratic modules of even lattices", version)]
struct Cli {
    /// Override the size guards (module order and enumeration order).
    #[arg(long, global = true)]
    size_guard: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModuleInput {
    /// Gram matrix JSON file.
    #[arg(long, conflicts_with = "fqm")]
    gram: Option<PathBuf>,
    /// Finite quadratic module JSON file.
    #[arg(long)]
    fqm: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant module of a Gram matrix, with generator lifts.
    Disc {
        #[arg(long)]
        gram: PathBuf,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a module into indecomposable blocks.
    Decompose {
        #[arg(long)]
        fqm: PathBuf,
    },
    /// Find an even lattice whose discriminant module is the given one.
    Realize {
        #[arg(long)]
        fqm: PathBuf,
        /// Persistent cache of verified block realizations.
        #[arg(long)]
        realization_cache: Option<PathBuf>,
    },
    /// Decide isomorphism of two modules; prints a witness when one exists.
    Isom {
        a: PathBuf,
        b: PathBuf,
    },
    /// Decide equivalence of two lattice presentations.
    Equivalent {
        k1: PathBuf,
        k2: PathBuf,
    },
    /// Genus-one modular data (S, T, c) and state-space dimensions.
    Modular {
        #[command(flatten)]
        input: ModuleInput,
        #[arg(long, value_enum, default_value = "exact")]
        format: Format,
        /// Comma-separated genera for the dimension formula.
        #[arg(long, value_delimiter = ',')]
        genus: Vec<u32>,
    },
    /// Enumerate all nondegenerate modules of a given order up to isomorphism.
    Enumerate {
        #[arg(long)]
        order: u64,
        /// Write one JSON file per class into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn guards_from(cli_guard: Option<u64>) -> Guards {
    match cli_guard {
        Some(limit) => Guards {
            max_module_order: limit,
            max_enum_order: limit,
        },
        None => Guards::default(),
    }
}

fn read_gram(path: &PathBuf) -> Result<GramMatrix> {
    io::gram_from_json(&io::read_json_file(path)?)
}

fn read_fqm(path: &PathBuf) -> Result<FiniteQuadraticModule> {
    io::fqm_from_json(&io::read_json_file(path)?)
}

fn load_module(input: &ModuleInput) -> Result<FiniteQuadraticModule> {
    match (&input.gram, &input.fqm) {
        (Some(g), None) => Ok(discriminant_module(&read_gram(g)?)?.module),
        (None, Some(f)) => read_fqm(f),
        _ => Err(Error::Parse(
            "exactly one of --gram or --fqm is required".into(),
        )),
    }
}

fn emit(v: &Value, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => io::write_json_file(path, v),
        None => {
            println!("{v:#}");
            Ok(())
        }
    }
}

/// Ok(true) = success, Ok(false) = negative verdict (exit 1).
fn run(cli: Cli) -> Result<bool> {
    let guards = guards_from(cli.size_guard);
    match cli.command {
        Command::Disc { gram, out } => {
            let k = read_gram(&gram)?;
            let disc = discriminant_module(&k)?;
            emit(&io::disc_to_json(&disc.module, &disc.generator_lifts), out.as_ref())?;
            Ok(true)
        }
        Command::Decompose { fqm } => {
            let m = read_fqm(&fqm)?;
            let blocks = decompose(&m, &guards)?;
            emit(&io::blocks_to_json(&blocks), None)?;
            Ok(true)
        }
        Command::Realize {
            fqm,
            realization_cache,
        } => {
            let m = read_fqm(&fqm)?;
            let mut cache = match &realization_cache {
                Some(path) => RealizationCache::load(path)?,
                None => RealizationCache::in_memory(),
            };
            let k = realize(&m, &guards, &mut cache)?;
            cache.save()?;
            emit(&io::gram_to_json(&k), None)?;
            Ok(true)
        }
        Command::Isom { a, b } => {
            let ma = read_fqm(&a)?;
            let mb = read_fqm(&b)?;
            match ma.is_isomorphic(&mb, &guards)? {
                Some(witness) => {
                    emit(&io::witness_to_json(&witness), None)?;
                    Ok(true)
                }
                None => {
                    println!("{:#}", json!({ "isomorphic": false }));
                    Ok(false)
                }
            }
        }
        Command::Equivalent { k1, k2 } => {
            let a = read_gram(&k1)?;
            let b = read_gram(&k2)?;
            match equivalent(&a, &b, &guards)? {
                Verdict::Equivalent { witness } => {
                    let v = json!({
                        "verdict": "equivalent",
                        "witness": io::witness_to_json(&witness),
                    });
                    emit(&v, None)?;
                    Ok(true)
                }
                Verdict::Inequivalent { reason } => {
                    let v = json!({
                        "verdict": "inequivalent",
                        "reason": reason.to_string(),
                    });
                    emit(&v, None)?;
                    Ok(false)
                }
            }
        }
        Command::Modular {
            input,
            format,
            genus,
        } => {
            let m = load_module(&input)?;
            let data = modular_data(&m, &guards)?;
            let mut v = match format {
                Format::Exact => io::modular_to_json_exact(&data),
                Format::Float => io::modular_to_json_float(&data),
            };
            if !genus.is_empty() {
                let dims: Value = genus
                    .iter()
                    .map(|&g| (g.to_string(), json!(state_space_dim(&m, g).to_string())))
                    .collect::<serde_json::Map<String, Value>>()
                    .into();
                v["dims"] = dims;
            }
            emit(&v, None)?;
            Ok(true)
        }
        Command::Enumerate { order, out } => {
            let classes = enumerate_fqm(order, &guards)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| {
                    Error::Internal(format!("cannot create {dir:?}: {e}"))
                })?;
                let mut files = Vec::new();
                for (i, m) in classes.iter().enumerate() {
                    let name = format!("order{order}_class{i:03}.json");
                    io::write_json_file(&dir.join(&name), &io::fqm_to_json(m))?;
                    files.push(name);
                }
                emit(
                    &json!({ "order": order, "classes": classes.len(), "files": files }),
                    None,
                )?;
            } else {
                let v = json!({
                    "order": order,
                    "classes": classes.len(),
                    "modules": classes.iter().map(io::fqm_to_json).collect::<Vec<_>>(),
                });
                emit(&v, None)?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
