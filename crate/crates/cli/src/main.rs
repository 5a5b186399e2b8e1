//! Batch front door for the ramification calculator: read JSON descriptions,
//! run the computations and validators, write breakpoint CSV, JSON and SVG.
//!
//! Exit codes: 0 success; 1 validation failure (the violated invariant is
//! named on stderr); 2 malformed input. All numeric output is exact `a/b`.

// failures carry full messages; nothing here is on a hot path
#![allow(clippy::result_large_err)]

mod svg;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use ramicalc_core::galois::GaloisDecomposition;
use ramicalc_core::gl::{pairing_varsigma, varsigma_table, EndoClassProfile};
use ramicalc_core::herbrand::{
    reconstruct_psi, transfer_radius, verify_psi_samples, HerbrandBundle, TwistSample,
};
use ramicalc_core::json::{
    DecompositionJson, LabeledProfileJson, ProfileJson, SampleJson, TableJson,
};
use ramicalc_core::rat::{format_rat, parse_rat, Rat};
use ramicalc_core::ultrametric::UltrametricTable;
use ramicalc_core::{Error, PlFunction};

#[derive(Parser)]
#[command(
    name = "ramicalc",
    version,
    about = "Exact-rational calculator for decomposition, structure and Herbrand functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decomposition function of a Galois-side component file.
    Sigma {
        #[arg(long)]
        decomp: PathBuf,
        /// Breakpoint CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structure function of an endo-class profile.
    Phi {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Herbrand function of a profile/decomposition pair.
    Psi {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full bundle export: inputs as JSON, the four functions as CSV
        /// blocks, and the exclusion set.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Tame lift: scale a profile (JSON out) or a function CSV by e.
    Lift {
        #[arg(long)]
        e: u64,
        #[arg(long, conflicts_with = "func")]
        profile: Option<PathBuf>,
        /// Breakpoint CSV of any function: applies x -> e*f(x/e).
        #[arg(long)]
        func: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radius transfer: delta = psi(eps) for the bundle's Herbrand function.
    Transfer {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
        /// Galois-side radius, a rational `a/b`.
        #[arg(long)]
        eps: String,
    },
    /// Reconstruct a Herbrand function from twist samples, or verify the
    /// samples against a reference function CSV.
    Interpolate {
        /// JSON array of {"e":, "k":, "value": "a/b"}.
        #[arg(long)]
        samples: PathBuf,
        /// Level m, a rational `a/b` (reconstruction mode).
        #[arg(long)]
        m: Option<String>,
        /// Excluded abscissa, repeatable.
        #[arg(long = "exclude")]
        exclude: Vec<String>,
        /// Reference function CSV: verification mode.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate inputs; exit 1 with a report naming each violated invariant.
    Validate {
        #[arg(long)]
        ultrametric: Option<PathBuf>,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        decomp: Option<PathBuf>,
    },
    /// Pairing values: two profiles at a distance, or a whole catalog table.
    Pair {
        /// Profile JSON, given twice for pair mode.
        #[arg(long)]
        profile: Vec<PathBuf>,
        /// Declared distance `a/b` (pair mode).
        #[arg(long)]
        at: Option<String>,
        /// `[{"label":, "profile":}, ...]` (catalog mode).
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Distance table on the catalog labels (catalog mode).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deterministic SVG overlay of function CSVs.
    Plot {
        /// `label=path.csv`, repeatable.
        #[arg(long = "func", required = true)]
        funcs: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Right edge of the plot, a rational `a/b`.
        #[arg(long)]
        xmax: Option<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BadRational(_) => Failure::malformed(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Optional guard against pathological inputs, read from RAMICALC_MAX_DENOM.
fn max_denom() -> Result<Option<u64>, Failure> {
    match std::env::var("RAMICALC_MAX_DENOM") {
        Ok(v) => v
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Failure::malformed(format!("RAMICALC_MAX_DENOM is not an integer: {v}"))),
        Err(_) => Ok(None),
    }
}

fn guard_rationals<'a>(
    rats: impl IntoIterator<Item = &'a Rat>,
    limit: Option<u64>,
) -> Result<(), Failure> {
    let Some(limit) = limit else { return Ok(()) };
    for r in rats {
        let fits = u64::try_from(r.denom())
            .map(|d| d <= limit)
            .unwrap_or(false);
        if !fits {
            return Err(Failure::malformed(format!(
                "denominator of {} exceeds RAMICALC_MAX_DENOM = {limit}",
                format_rat(r)
            )));
        }
    }
    Ok(())
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn load_profile(path: &Path, limit: Option<u64>) -> Result<EndoClassProfile, Failure> {
    let p = load_json::<ProfileJson>(path)?.into_domain()?;
    guard_rationals(p.jumps().iter().chain(p.k0()).chain([p.m()]), limit)?;
    Ok(p)
}

fn load_decomposition(path: &Path) -> Result<GaloisDecomposition, Failure> {
    Ok(load_json::<DecompositionJson>(path)?.into_domain()?)
}

fn load_table(path: &Path, limit: Option<u64>) -> Result<UltrametricTable, Failure> {
    let t = load_json::<TableJson>(path)?.into_domain()?;
    guard_rationals(t.rows().iter().flatten(), limit)?;
    Ok(t)
}

fn load_samples(path: &Path, limit: Option<u64>) -> Result<Vec<TwistSample>, Failure> {
    let raw: Vec<SampleJson> = load_json(path)?;
    let samples = raw
        .into_iter()
        .map(|s| s.into_domain())
        .collect::<ramicalc_core::Result<Vec<_>>>()?;
    guard_rationals(samples.iter().map(|s| &s.value), limit)?;
    Ok(samples)
}

fn load_function_csv(path: &Path) -> Result<PlFunction, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    PlFunction::from_csv(&text).map_err(|e| Failure::malformed(e.to_string()))
}

fn parse_flag_rat(s: &str, limit: Option<u64>) -> Result<Rat, Failure> {
    let r = parse_rat(s).map_err(|e| Failure::malformed(e.to_string()))?;
    guard_rationals([&r], limit)?;
    Ok(r)
}

/// Writes atomically: temp file in the same directory, then rename.
fn write_artifact(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = path.with_file_name(format!(
        "{}.tmp",
        path.file_name()
            .map(|s| s.to_string_lossy())
            .unwrap_or_default()
    ));
    fs::write(&tmp, contents)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_artifact(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn bundle(profile: &Path, decomp: &Path, limit: Option<u64>) -> Result<HerbrandBundle, Failure> {
    let profile = load_profile(profile, limit)?;
    let decomposition = load_decomposition(decomp)?;
    Ok(HerbrandBundle::new(profile, decomposition)?)
}

/// Single-document bundle dump: the inputs as JSON, the four functions as
/// breakpoint CSV blocks, and the sampling exclusion set.
fn export_bundle(b: &HerbrandBundle) -> Result<String, Failure> {
    let mut out = String::from("# ramicalc bundle\n");
    out.push_str("## profile\n");
    out.push_str(
        &serde_json::to_string_pretty(&ProfileJson::from(b.profile()))
            .map_err(|e| Failure::malformed(e.to_string()))?,
    );
    out.push_str("\n## decomposition\n");
    out.push_str(
        &serde_json::to_string_pretty(&DecompositionJson::from(b.decomposition()))
            .map_err(|e| Failure::malformed(e.to_string()))?,
    );
    out.push('\n');
    let psi_inverse = b.psi().invert()?;
    for (name, f) in [
        ("phi", b.phi()),
        ("sigma", b.sigma()),
        ("psi", b.psi()),
        ("psi_inverse", &psi_inverse),
    ] {
        out.push_str(&format!("## {name}\n"));
        out.push_str(&f.to_csv());
    }
    out.push_str("## exclusions\n");
    let xs: Vec<String> = b.exclusions().iter().map(format_rat).collect();
    out.push_str(&xs.join(","));
    out.push('\n');
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let limit = max_denom()?;
    match cli.command {
        Command::Sigma { decomp, out } => {
            let sigma = load_decomposition(&decomp)?.sigma_function();
            emit(out.as_ref(), &sigma.to_csv())
        }
        Command::Phi { profile, out } => {
            let phi = load_profile(&profile, limit)?.structure_function();
            emit(out.as_ref(), &phi.to_csv())
        }
        Command::Psi {
            profile,
            decomp,
            out,
            bundle: bundle_out,
        } => {
            let b = bundle(&profile, &decomp, limit)?;
            for x in b.cancelled_sigma_jumps() {
                eprintln!(
                    "note: sigma' jumps at {} but psi' is continuous there",
                    format_rat(x)
                );
            }
            if let Some(path) = &bundle_out {
                write_artifact(path, &export_bundle(&b)?)?;
            }
            emit(out.as_ref(), &b.psi().to_csv())
        }
        Command::Lift {
            e,
            profile,
            func,
            out,
        } => match (profile, func) {
            (Some(profile), None) => {
                let lifted = load_profile(&profile, limit)?.tame_lift(e)?;
                let mut text = serde_json::to_string_pretty(&ProfileJson::from(&lifted))
                    .map_err(|e| Failure::malformed(e.to_string()))?;
                text.push('\n');
                emit(out.as_ref(), &text)
            }
            (None, Some(func)) => {
                let lifted = load_function_csv(&func)?.scale_conj(e)?;
                emit(out.as_ref(), &lifted.to_csv())
            }
            _ => Err(Failure::malformed(
                "lift needs exactly one of --profile or --func",
            )),
        },
        Command::Transfer {
            profile,
            decomp,
            eps,
        } => {
            let b = bundle(&profile, &decomp, limit)?;
            let eps = parse_flag_rat(&eps, limit)?;
            let delta = transfer_radius(b.psi(), &eps)?;
            println!("{}", format_rat(&delta));
            Ok(())
        }
        Command::Interpolate {
            samples,
            m,
            exclude,
            reference,
            out,
        } => {
            let samples = load_samples(&samples, limit)?;
            let exclusions: BTreeSet<Rat> = exclude
                .iter()
                .map(|s| parse_flag_rat(s, limit))
                .collect::<Result<_, _>>()?;
            match reference {
                Some(reference) => {
                    let reference = load_function_csv(&reference)?;
                    let report = verify_psi_samples(&samples, &exclusions, &reference)?;
                    for x in &report.skipped {
                        println!("skipped sample at excluded abscissa {}", format_rat(x));
                    }
                    if report.is_ok() {
                        println!("verified {} samples", report.checked);
                        Ok(())
                    } else {
                        for m in &report.mismatches {
                            println!(
                                "mismatch at k/e = {}: expected {}, sample gives {}",
                                format_rat(&m.abscissa),
                                format_rat(&m.expected),
                                format_rat(&m.actual)
                            );
                        }
                        Err(Failure::invalid(format!(
                            "{} of {} samples disagree with the reference",
                            report.mismatches.len(),
                            report.checked
                        )))
                    }
                }
                None => {
                    let m = m.ok_or_else(|| {
                        Failure::malformed("reconstruction needs --m (or pass --reference)")
                    })?;
                    let m = parse_flag_rat(&m, limit)?;
                    let psi = reconstruct_psi(&samples, &m, &exclusions)?;
                    emit(out.as_ref(), &psi.to_csv())
                }
            }
        }
        Command::Validate {
            ultrametric,
            profile,
            decomp,
        } => {
            if ultrametric.is_none() && profile.is_none() && decomp.is_none() {
                return Err(Failure::malformed(
                    "validate needs --ultrametric, --profile or --decomp",
                ));
            }
            let mut failures = Vec::new();
            if let Some(path) = ultrametric {
                let t = load_table(&path, limit)?;
                let report = t.validate();
                if report.is_valid() {
                    println!("{}: valid ultrametric", path.display());
                } else {
                    failures.push(format!("{}:\n{}", path.display(), report.describe()));
                }
            }
            if let Some(path) = profile {
                // conversion runs the full invariant check
                load_profile(&path, limit).map_err(|f| Failure {
                    code: if f.code == 2 { 2 } else { 1 },
                    message: format!("{}: {}", path.display(), f.message),
                })?;
                println!("{}: valid profile", path.display());
            }
            if let Some(path) = decomp {
                load_decomposition(&path).map_err(|f| Failure {
                    code: if f.code == 2 { 2 } else { 1 },
                    message: format!("{}: {}", path.display(), f.message),
                })?;
                println!("{}: valid decomposition", path.display());
            }
            if failures.is_empty() {
                Ok(())
            } else {
                Err(Failure::invalid(failures.join("\n")))
            }
        }
        Command::Pair {
            profile,
            at,
            catalog,
            table,
            out,
        } => match (catalog, table) {
            (Some(catalog), Some(table)) => {
                let entries: Vec<LabeledProfileJson> = load_json(&catalog)?;
                let entries = entries
                    .into_iter()
                    .map(|e| Ok((e.label, e.profile.into_domain()?)))
                    .collect::<ramicalc_core::Result<Vec<_>>>()?;
                let t = load_table(&table, limit)?;
                let v = varsigma_table(&entries, &t)?;
                let mut text = serde_json::to_string_pretty(&TableJson::from(&v))
                    .map_err(|e| Failure::malformed(e.to_string()))?;
                text.push('\n');
                emit(out.as_ref(), &text)
            }
            (None, None) => {
                if profile.len() != 2 {
                    return Err(Failure::malformed(
                        "pair mode needs --profile twice and --at, or --catalog with --table",
                    ));
                }
                let at = at.ok_or_else(|| Failure::malformed("pair mode needs --at"))?;
                let at = parse_flag_rat(&at, limit)?;
                let p1 = load_profile(&profile[0], limit)?;
                let p2 = load_profile(&profile[1], limit)?;
                let v = pairing_varsigma(&p1, &p2, &at)?;
                println!("{}", format_rat(&v));
                Ok(())
            }
            _ => Err(Failure::malformed(
                "pair needs either --catalog with --table, or neither",
            )),
        },
        Command::Plot { funcs, out, xmax } => {
            let mut labeled = Vec::new();
            for entry in &funcs {
                let (label, path) = entry.split_once('=').ok_or_else(|| {
                    Failure::malformed(format!("--func wants label=path.csv, got `{entry}`"))
                })?;
                labeled.push((label.to_string(), load_function_csv(Path::new(path))?));
            }
            let xmax = xmax.map(|s| parse_flag_rat(&s, limit)).transpose()?;
            let doc =
                svg::render(&labeled, xmax).ok_or_else(|| Failure::invalid("nothing to plot"))?;
            write_artifact(&out, &doc)
        }
    }
}
