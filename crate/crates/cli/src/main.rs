use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use scalvar::analysis::{self, round_sig, to_stable_json, AnalysisReport, Options, Space, VerifyReport};
use scalvar::catalog::{self, Params};
use scalvar::error::{AnalysisError, SpaceFileError};
use scalvar::spacefile;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NOT_EINSTEIN: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "scalvar", version, about = "Scalar curvature second variation on homogeneous spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog entries.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Curvature, second variation matrix and classification of a space.
    Analyze {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        json: bool,
        /// Analyze a non-Einstein metric anyway.
        #[arg(long)]
        force: bool,
        /// Relative zero tolerance for eigenvalues.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Tabulate S, S' and S'' along a diagonal variation.
    Scan {
        #[command(flatten)]
        space: SpaceArgs,
        /// Comma-separated exponents u_i, one per block.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        direction: Option<Vec<f64>>,
        /// Named direction from the catalog entry (e.g. jensen).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
        from: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        to: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.1)]
        step: f64,
        /// Comma-separated output (the default).
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run invariant and oracle checks.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        /// Verify the whole default catalog sweep.
        #[arg(long, conflicts_with_all = ["id", "file"])]
        all: bool,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Add DELTA to structure constant C[i][j][k]: "i,j,k,delta".
        #[arg(long, hide = true, allow_hyphen_values = true)]
        perturb: Option<String>,
    },
}

#[derive(Args)]
struct SpaceArgs {
    /// Catalog id (see `scalvar list`).
    id: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Group family for entries that take one: su, so or sp.
    #[arg(long)]
    group: Option<String>,
    /// Space-description file instead of a catalog id.
    #[arg(long, visible_alias = "blocks", conflicts_with = "id")]
    file: Option<PathBuf>,
}

impl SpaceArgs {
    fn params(&self) -> Params {
        Params {
            n: self.n,
            k: self.k,
            group: self.group.clone(),
        }
    }

    fn load(&self) -> Result<Space> {
        match (&self.file, &self.id) {
            (Some(path), _) => {
                let desc = spacefile::read(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(Space::from_description(&desc)?)
            }
            (None, Some(id)) => Ok(Space::from_catalog(id, &self.params())?),
            (None, None) => bail!(UsageError("give a catalog id or --file".into())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<SpaceFileError>().is_some() || cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
        if let Some(AnalysisError::NotEinstein { .. }) = cause.downcast_ref::<AnalysisError>() {
            return EXIT_NOT_EINSTEIN;
        }
    }
    EXIT_VALIDATION
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::List { json } => {
            let entries = catalog::list();
            if json {
                println!("{}", serde_json::to_string_pretty(&to_stable_json(&entries))?);
            } else {
                for e in entries {
                    let params: Vec<String> = e
                        .params
                        .iter()
                        .map(|p| format!("--{} {}..{} (default {})", p.name, p.min, p.max, p.default))
                        .chain(e.takes_group.then(|| "--group su|so|sp".to_string()))
                        .collect();
                    println!("{:<20} {}", e.id, e.summary);
                    if !params.is_empty() {
                        println!("{:<20} {}", "", params.join(", "));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            space,
            json,
            force,
            tol,
        } => {
            let space = space.load()?;
            let opts = Options {
                tol,
                force,
                ..Options::default()
            };
            let report = analysis::analyze(&space, &opts)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&to_stable_json(&report))?);
            } else {
                print!("{}", render_report(&report));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            space,
            direction,
            preset,
            from,
            to,
            step,
            csv: _,
            json,
        } => {
            let space = space.load()?;
            let u = space.direction(preset.as_deref(), direction.as_deref())?;
            let rows = analysis::scan(&space, &u, from, to, step)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&to_stable_json(&rows))?);
            } else {
                println!("t,S,dS,d2S");
                for r in rows {
                    println!("{},{},{},{}", num(r.t), num(r.scalar), num(r.d1), num(r.d2));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            space,
            all,
            json,
            tol,
            perturb,
        } => {
            let opts = Options {
                tol,
                ..Options::default()
            };
            let perturb = perturb.as_deref().map(parse_perturbation).transpose()?;
            let reports: Vec<VerifyReport> = if all {
                catalog::default_sweep()
                    .into_iter()
                    .map(|(id, params)| {
                        let mut r = analysis::verify_catalog(id, &params, perturb, &opts);
                        r.space = describe(id, &params);
                        r
                    })
                    .collect()
            } else if let (Some(id), None) = (&space.id, &space.file) {
                let params = space.params();
                let mut r = analysis::verify_catalog(id, &params, perturb, &opts);
                r.space = describe(id, &params);
                vec![r]
            } else {
                vec![analysis::verify(&space.load()?, &opts)]
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&to_stable_json(&reports))?);
            } else {
                for r in &reports {
                    print!("{}", render_verify(r));
                }
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            if !json {
                println!("{} of {} spaces passed", reports.len() - failed, reports.len());
            }
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            })
        }
    }
}

fn parse_perturbation(s: &str) -> Result<(usize, usize, usize, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!(UsageError(format!("--perturb expects i,j,k,delta, got '{s}'")));
    }
    let idx = |p: &str| p.parse::<usize>().map_err(|_| UsageError(format!("bad index '{p}'")));
    let delta = parts[3]
        .parse::<f64>()
        .map_err(|_| UsageError(format!("bad delta '{}'", parts[3])))?;
    Ok((idx(parts[0])?, idx(parts[1])?, idx(parts[2])?, delta))
}

fn describe(id: &str, p: &Params) -> String {
    let mut s = id.to_string();
    if let Some(g) = &p.group {
        let _ = write!(s, " --group {g}");
    }
    if let Some(n) = p.n {
        let _ = write!(s, " --n {n}");
    }
    if let Some(k) = p.k {
        let _ = write!(s, " --k {k}");
    }
    s
}

fn num(x: f64) -> String {
    let x = round_sig(x);
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e9) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn nums(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

fn render_report(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(out, "space               {} ({})", r.label, r.id);
    let _ = writeln!(
        out,
        "dims                {}",
        r.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
    );
    if r.scales.iter().any(|x| *x != 1.0) {
        let _ = writeln!(out, "scales              {}", nums(&r.scales));
    }
    let _ = writeln!(out, "killing values      {}", nums(&r.killing_values));
    let _ = writeln!(out, "ricci               {}", nums(&r.ricci));
    let _ = writeln!(out, "scalar curvature    {}", num(r.scalar));
    let _ = writeln!(
        out,
        "einstein            {} (spread {}, mean ricci {})",
        yes_no(r.einstein),
        num(r.einstein_residual),
        num(r.mean_ricci)
    );
    let _ = writeln!(out, "standard metric     {}", yes_no(r.standard));
    if let Some(c) = r.casimir {
        let _ = writeln!(out, "casimir constant    {}", num(c));
    }
    let _ = writeln!(out, "F");
    for row in &r.f_matrix {
        let _ = writeln!(out, "    {}", nums(row));
    }
    let _ = writeln!(out, "F spectrum          {}", nums(&r.f_spectrum));
    let _ = writeln!(out, "restricted spectrum {}", nums(&r.restricted_spectrum));
    let _ = writeln!(out, "F(1..1) - r d       {}", num(r.fb_residual));
    if let Some(tb) = &r.two_block {
        let _ = writeln!(out, "two-block a, T      {} {}", num(tb.a), num(tb.t));
    }
    for w in &r.witnesses {
        let _ = writeln!(
            out,
            "witness             {}: restricted {} ({})",
            w.label,
            nums(&w.restricted_spectrum),
            w.kind
        );
    }
    if let Some(c) = &r.casimir_criterion {
        let _ = writeln!(
            out,
            "c > 3/10 criterion  {} (dominance margin {})",
            if c.applies { "applies" } else { "does not apply" },
            num(c.margin)
        );
    }
    let _ = writeln!(
        out,
        "degenerate F        {} (min singular value {})",
        yes_no(r.degeneracy.degenerate),
        num(r.degeneracy.min_singular_value)
    );
    let _ = writeln!(out, "verdict             {} ({})", r.verdict.kind, r.verdict.scope);
    for note in r.verdict.notes.iter().chain(&r.notes) {
        let _ = writeln!(out, "note                {note}");
    }
    let _ = writeln!(
        out,
        "oracle              {} probes, max relative error {}",
        r.oracle.probes,
        num(r.oracle.max_rel_error)
    );
    out
}

fn render_verify(r: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== {}", r.space);
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{} {:<45} {} (tolerance {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            num(c.value),
            num(c.tolerance)
        );
    }
    if let Some(e) = &r.error {
        let _ = writeln!(out, "FAIL {e}");
    }
    out
}
