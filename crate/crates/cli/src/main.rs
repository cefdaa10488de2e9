//! coxgrowth: exact growth computations for Coxeter groups.
//!
//! Exit codes: 0 success/certified, 1 usage or parse error, 2 cap
//! truncation, 3 falsification (a check that would contradict a theorem
//! failed), 4 inconclusive.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coxgrowth_core::diagram::Diagram;
use coxgrowth_core::embed;
use coxgrowth_core::error::Error;
use coxgrowth_core::growth::{self, GrowthTable};
use coxgrowth_core::reflquot::{self, ReflQuotVerdict};
use coxgrowth_core::rootspace::RootVector;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_TRUNCATED: u8 = 2;
const EXIT_FALSIFIED: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "coxgrowth",
    about = "Exact growth functions and exponential-growth certificates for Coxeter groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct CommonArgs {
    /// Diagram file (text "u v m" lines or JSON)
    #[arg(long, value_name = "PATH")]
    diagram: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write output here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify each connected component as Finite, Affine, or Indefinite
    Classify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Growth table of the group, a parabolic quotient (--J), or a
    /// reflection-subgroup quotient (--roots)
    Growth {
        #[command(flatten)]
        common: CommonArgs,
        /// Parabolic subset as comma-separated node names
        #[arg(long = "J", value_name = "n1,n2,...", conflicts_with = "roots")]
        j: Option<String>,
        /// File of generator roots (JSON array of integer arrays, or one
        /// whitespace-separated vector per line)
        #[arg(long, value_name = "FILE")]
        roots: Option<PathBuf>,
        /// Maximum word length to enumerate
        #[arg(long, default_value_t = 10)]
        max_len: usize,
        /// Element cap for the enumeration
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Construct the embedded universal reflection subgroup for a
    /// parabolic J (or for an affine subdiagram when --J is omitted) and
    /// emit its certificate
    Embed {
        #[command(flatten)]
        common: CommonArgs,
        /// Parabolic subset as comma-separated node names
        #[arg(long = "J", value_name = "n1,n2,...")]
        j: Option<String>,
        /// Deepest witness level k to certify
        #[arg(long, default_value_t = 5)]
        k_max: usize,
    },
    /// Full verification: the parabolic quotient witness, and the
    /// reflection-subgroup report when --roots is given
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Parabolic subset as comma-separated node names (default: empty)
        #[arg(long = "J", value_name = "n1,n2,...")]
        j: Option<String>,
        /// File of generator roots for the reflection-subgroup report
        #[arg(long, value_name = "FILE")]
        roots: Option<PathBuf>,
        /// Deepest witness level k to certify
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        /// BFS depth for cross-check tables
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Element cap for enumerations
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        /// Depth bound for the gamma search
        #[arg(long, default_value_t = 6)]
        depth_bound: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Falsification(_) | Error::Internal(_) => EXIT_FALSIFIED,
        Error::CapExceeded { .. } | Error::Overflow(_) => EXIT_TRUNCATED,
        Error::FreenessUnverified { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_USAGE,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Classify { common } => cmd_classify(&common),
        Command::Growth { common, j, roots, max_len, cap } => {
            cmd_growth(&common, j.as_deref(), roots.as_deref(), max_len, cap)
        }
        Command::Embed { common, j, k_max } => cmd_embed(&common, j.as_deref(), k_max),
        Command::Verify { common, j, roots, k_max, max_len, cap, depth_bound } => cmd_verify(
            &common,
            j.as_deref(),
            roots.as_deref(),
            k_max,
            max_len,
            cap,
            depth_bound,
        ),
    }
}

fn load_diagram(common: &CommonArgs) -> Result<Diagram, Error> {
    let source = fs::read_to_string(&common.diagram).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", common.diagram.display()),
    })?;
    Diagram::parse(&source)
}

fn parse_j(diagram: &Diagram, j: Option<&str>) -> Result<Vec<usize>, Error> {
    match j {
        None => Ok(Vec::new()),
        Some(list) => {
            let names: Vec<&str> =
                list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            diagram.resolve_nodes(&names)
        }
    }
}

fn load_roots(diagram: &Diagram, path: &std::path::Path) -> Result<Vec<RootVector>, Error> {
    let source = fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    let n = diagram.n();
    let mut out = Vec::new();
    if source.trim_start().starts_with('[') {
        let value: serde_json::Value = serde_json::from_str(&source).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        let rows = value.as_array().ok_or_else(|| Error::Parse {
            line: 0,
            msg: "expected a JSON array of integer arrays".into(),
        })?;
        for (i, row) in rows.iter().enumerate() {
            let coords: Vec<i128> = row
                .as_array()
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("root {i} is not an array"),
                })?
                .iter()
                .map(|v| {
                    v.as_i64().map(i128::from).ok_or_else(|| Error::Parse {
                        line: 0,
                        msg: format!("root {i} has a non-integer coordinate"),
                    })
                })
                .collect::<Result<_, _>>()?;
            push_root(n, coords, &mut out)?;
        }
    } else {
        for (lineno, raw) in source.lines().enumerate() {
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let coords: Vec<i128> = text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i128>().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad integer {tok:?}"),
                    })
                })
                .collect::<Result<_, _>>()?;
            push_root(n, coords, &mut out)?;
        }
    }
    if out.is_empty() {
        return Err(Error::Precondition("roots file contains no vectors".into()));
    }
    Ok(out)
}

fn push_root(n: usize, coords: Vec<i128>, out: &mut Vec<RootVector>) -> Result<(), Error> {
    if coords.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: coords.len() });
    }
    out.push(RootVector::new(coords)?);
    Ok(())
}

fn emit(common: &CommonArgs, rendered: String) -> Result<(), Error> {
    match &common.out {
        Some(path) => fs::write(path, rendered).map_err(|e| Error::Precondition(format!(
            "cannot write {}: {e}",
            path.display()
        ))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn json_string(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_classify(common: &CommonArgs) -> Result<u8, Error> {
    let diagram = load_diagram(common)?;
    let components = diagram.connected_components();
    let mut rows = Vec::new();
    for comp in &components {
        let class = diagram.classify_subset(comp)?;
        let names: Vec<&str> = comp.iter().map(|&i| diagram.node_name(i)).collect();
        rows.push((names, class));
    }
    let rendered = match common.format {
        Format::Json => json_string(&serde_json::json!(rows
            .iter()
            .map(|(names, class)| serde_json::json!({
                "nodes": names,
                "class": class.to_string(),
            }))
            .collect::<Vec<_>>())),
        Format::Csv => {
            let mut s = String::from("nodes,class\n");
            for (names, class) in &rows {
                s.push_str(&format!("{},{class}\n", names.join(" ")));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (names, class) in &rows {
                s.push_str(&format!("{{{}}}: {class}\n", names.join(", ")));
            }
            s
        }
    };
    emit(common, rendered)?;
    Ok(EXIT_OK)
}

fn render_table(common: &CommonArgs, table: &GrowthTable, header: &str) -> String {
    match common.format {
        Format::Json => json_string(&table.to_json()),
        Format::Csv => table.to_csv(),
        Format::Text => {
            let mut s = format!("{header}\n");
            s.push_str(&table.to_csv());
            if table.truncated() {
                s.push_str("warning: enumeration truncated by the element cap\n");
            }
            s
        }
    }
}

fn cmd_growth(
    common: &CommonArgs,
    j: Option<&str>,
    roots: Option<&std::path::Path>,
    max_len: usize,
    cap: usize,
) -> Result<u8, Error> {
    let diagram = load_diagram(common)?;
    let (table, header) = if let Some(path) = roots {
        let roots = load_roots(&diagram, path)?;
        let subgroup = reflquot::make_subgroup(&diagram, &roots)?;
        let table = reflquot::minimal_coset_reps_refl(&diagram, &subgroup, max_len, cap)?;
        (table, "growth of the reflection-subgroup quotient (Dyer representatives)".to_string())
    } else if j.is_some() {
        let j = parse_j(&diagram, j)?;
        let table = growth::quotient_growth_parabolic(&diagram, &j, max_len, cap)?;
        (table, "growth of the parabolic quotient W^J".to_string())
    } else {
        let gens = coxgrowth_core::elements::standard_generators(&diagram)?;
        let table = growth::enumerate_ball(&diagram, &gens, max_len, cap)?;
        (table, "growth of W".to_string())
    };
    let truncated = table.truncated();
    emit(common, render_table(common, &table, &header))?;
    Ok(if truncated { EXIT_TRUNCATED } else { EXIT_OK })
}

fn cmd_embed(common: &CommonArgs, j: Option<&str>, k_max: usize) -> Result<u8, Error> {
    let diagram = load_diagram(common)?;
    let j = parse_j(&diagram, j)?;
    let emb = if j.is_empty() {
        embed::construct_w3_in_group(&diagram)?
    } else {
        embed::construct_w3_embedding(&diagram, &j)?
    };
    let mainprop = embed::verify_mainprop(&diagram, &j, k_max)?;
    let certificate = serde_json::json!({
        "embedding": emb.to_json(&diagram),
        "mainprop": mainprop.to_json(&diagram),
    });
    let rendered = match common.format {
        Format::Json | Format::Csv => json_string(&certificate),
        Format::Text => {
            let mut s = String::new();
            s.push_str(&format!(
                "universal reflection subgroup certified to depth {}\n",
                emb.free_checked_depth
            ));
            for (i, beta) in emb.betas.iter().enumerate() {
                s.push_str(&format!("beta_{} = {:?}\n", i + 1, beta.coords()));
            }
            s.push_str(&format!("M = max generator length = {}\n", emb.m_bound));
            for level in &mainprop.per_k {
                s.push_str(&format!(
                    "k = {}: {} reflections (need {}), lengths <= {} (bound {}), ok = {}\n",
                    level.k,
                    level.count,
                    level.required,
                    level.max_length,
                    level.length_bound,
                    level.ok()
                ));
            }
            s.push_str(&format!("certified: {}\n", mainprop.ok));
            s
        }
    };
    emit(common, rendered)?;
    Ok(if mainprop.ok { EXIT_OK } else { EXIT_FALSIFIED })
}

fn cmd_verify(
    common: &CommonArgs,
    j: Option<&str>,
    roots: Option<&std::path::Path>,
    k_max: usize,
    max_len: usize,
    cap: usize,
    depth_bound: usize,
) -> Result<u8, Error> {
    let diagram = load_diagram(common)?;
    let j = parse_j(&diagram, j)?;
    let quotient = embed::verify_quotient_exponential(&diagram, &j, k_max, max_len, cap)?;
    let mut code = if quotient.ok { EXIT_OK } else { EXIT_FALSIFIED };
    let mut sections = vec![("parabolic_quotient", quotient.to_json(&diagram))];
    let mut text = String::new();
    text.push_str(&format!(
        "parabolic quotient: certified = {}, M = {}, rate bound 2^(1/(3M)) = {} > 1\n",
        quotient.ok, quotient.m_bound, quotient.rate_bound_decimal
    ));
    for level in &quotient.per_k {
        text.push_str(&format!(
            "  k = {}: {} distinct cosets of length <= {} (need {})\n",
            level.k, level.distinct_reps, level.length_bound, level.required
        ));
    }
    for entry in &quotient.cross_checks {
        text.push_str(&format!(
            "  BFS cross-check k = {}: gamma({}) = {} >= {} is {}\n",
            entry.k, entry.length, entry.gamma, entry.required, entry.ok
        ));
    }

    if let Some(path) = roots {
        let roots = load_roots(&diagram, path)?;
        let subgroup = reflquot::make_subgroup(&diagram, &roots)?;
        let report = reflquot::quotient_refl_exponential_report(
            &diagram,
            &subgroup,
            max_len,
            cap,
            k_max,
            depth_bound,
        )?;
        text.push_str(&format!(
            "reflection-subgroup quotient: verdict = {}, subgroup class = {}\n",
            report.verdict.as_str(),
            report.subgroup_class
        ));
        if let Some(rate) = &report.b_rate {
            text.push_str(&format!("  rate estimate from the quotient table: {}\n", rate.decimal()));
        }
        for note in &report.notes {
            text.push_str(&format!("  note: {note}\n"));
        }
        match report.verdict {
            ReflQuotVerdict::Exponential | ReflQuotVerdict::NotExponentialTrivial => {}
            ReflQuotVerdict::Unknown => code = code.max(EXIT_INCONCLUSIVE),
        }
        if !report.ok && report.verdict != ReflQuotVerdict::Unknown {
            code = code.max(EXIT_FALSIFIED);
        }
        sections.push(("reflection_subgroup_quotient", report.to_json(&diagram)));
    }

    let rendered = match common.format {
        Format::Json | Format::Csv => {
            let mut obj = serde_json::Map::new();
            for (key, value) in sections {
                obj.insert(key.to_string(), value);
            }
            json_string(&serde_json::Value::Object(obj))
        }
        Format::Text => text,
    };
    emit(common, rendered)?;
    Ok(code)
}
