use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncmart::error::{Error, Result};
use ncmart::harness::{
    extremal_search, fmt_f64, kfunc_curve, parse_shapes, run_suite, write_report, CheckKind, CheckReport,
    ExperimentConfig, Exponent, Format, SearchCheck, SearchResult,
};
use ncmart::kfunc::KFunctionalCurve;

#[derive(Parser)]
#[command(name = "ncmart", version, about = "Numerical checks of noncommutative martingale inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Davis decompositions: type 1, type 2, martingale, previsible, quasi-Banach and the row lemma.
    CheckDavis(Common),
    /// Lépingle-Yor inequality.
    CheckLepingle(Common),
    /// Burkholder/Rosenthal inequalities and the p = 2 identities.
    CheckBurkholder(Common),
    /// Φ-moment Davis and Burkholder ratios.
    CheckPhi(Common),
    /// Stein projection ratios.
    CheckStein(Common),
    /// K-functional curve of one operator.
    KfuncCurve {
        #[command(flatten)]
        common: Common,
        /// Lower exponent of the couple.
        #[arg(long)]
        p: Option<Exponent>,
        /// Upper exponent of the couple (`inf` allowed).
        #[arg(long)]
        q: Option<Exponent>,
    },
    /// Hill-climbing search for a large ratio.
    SearchExtremal {
        #[command(flatten)]
        common: Common,
        /// lepingle, davis-type1, davis-type2, martingale-davis, p2-identity or stein.
        #[arg(long)]
        check: Option<SearchCheck>,
    },
    /// Every check selected in the configuration.
    RunSuite(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory; reports go to stdout when absent.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Number of random instances.
    #[arg(long, value_name = "N")]
    instances: Option<usize>,
    /// Filtration shapes, e.g. `tensor:2x2x2,partition:16x4`. For
    /// kfunc-curve, the matrix dimension.
    #[arg(long, value_name = "SPEC")]
    dims: Option<String>,
    /// Report format.
    #[arg(long, value_name = "csv|json")]
    format: Option<Format>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(n) = self.instances {
            c.instances = n;
        }
        if let Some(f) = self.format {
            c.output.format = f;
        }
        if let Some(dir) = &self.out {
            c.output.dir = Some(dir.clone());
        }
        Ok(c)
    }

    fn load_with_shapes(&self) -> Result<ExperimentConfig> {
        let mut c = self.load()?;
        if let Some(spec) = &self.dims {
            c.filtrations = parse_shapes(spec)?;
        }
        c.validate()?;
        Ok(c)
    }
}

const DAVIS: &[CheckKind] = &[
    CheckKind::DavisType1,
    CheckKind::DavisType2,
    CheckKind::MartingaleDavis,
    CheckKind::Previsible,
    CheckKind::QuasiDavis,
    CheckKind::RowLemma,
];

fn suite(common: &Common, checks: Option<&[CheckKind]>) -> Result<bool> {
    let mut c = common.load_with_shapes()?;
    if let Some(k) = checks {
        c.checks = k.to_vec();
    }
    let report = run_suite(&c)?;
    emit_report(&report, &c)?;
    Ok(report.passed())
}

fn emit_report(report: &CheckReport, c: &ExperimentConfig) -> Result<()> {
    let s = &report.summary;
    match &c.output.dir {
        Some(dir) => write_report(report, dir, c.output.format)?,
        None => {
            let out = io::stdout().lock();
            match c.output.format {
                Format::Csv => report.write_csv(out)?,
                Format::Json => report.write_json(out)?,
            }
        }
    }
    let mut err = io::stderr().lock();
    for f in &s.failures {
        writeln!(
            err,
            "FAIL {} instance {} seed {} ({} {}): lhs {} rhs {} ratio {}",
            f.check.name,
            f.instance_id,
            f.seed,
            f.filtration,
            f.family,
            fmt_f64(f.check.lhs),
            fmt_f64(f.check.rhs),
            fmt_f64(f.check.ratio)
        )?;
    }
    writeln!(
        err,
        "{} instances, {} rows, {} failures, {:.2}s",
        s.instances,
        s.rows,
        s.failures.len(),
        s.runtime_seconds
    )?;
    Ok(())
}

fn write_kfunc_csv<W: Write>(k: &KFunctionalCurve, w: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "k"]).map_err(io)?;
    for (t, v) in k.t.iter().zip(&k.values) {
        out.write_record([fmt_f64(*t), fmt_f64(*v)]).map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

fn kfunc_json(k: &KFunctionalCurve) -> serde_json::Value {
    serde_json::json!({
        "p": k.couple.p(),
        "q": Exponent(k.couple.q()),
        "method": k.method,
        "all_converged": k.all_converged,
        "t": k.t,
        "k": k.values,
    })
}

fn kfunc(common: &Common, p: Option<Exponent>, q: Option<Exponent>) -> Result<bool> {
    let mut c = common.load()?;
    if let Some(d) = &common.dims {
        c.kfunc.dim = d
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("--dims: expected a dimension, got {d:?}")))?;
    }
    if let Some(p) = p {
        c.kfunc.p = p;
    }
    if let Some(q) = q {
        c.kfunc.q = q;
    }
    c.validate()?;
    let k = kfunc_curve(&c)?;
    let write = |w: &mut dyn Write| -> Result<()> {
        match c.output.format {
            Format::Csv => write_kfunc_csv(&k, w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &kfunc_json(&k)).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w)?;
                Ok(())
            }
        }
    };
    match &c.output.dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let name = match c.output.format {
                Format::Csv => "kfunc.csv",
                Format::Json => "kfunc.json",
            };
            write(&mut fs::File::create(dir.join(name))?)?;
        }
        None => write(&mut io::stdout().lock())?,
    }
    if !k.all_converged {
        eprintln!("warning: solver did not converge at every t");
    }
    Ok(true)
}

fn write_search(r: &SearchResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    r.write_trace_csv(fs::File::create(dir.join("trace.csv"))?)?;
    let mut f = fs::File::create(dir.join("search.json"))?;
    serde_json::to_writer_pretty(&mut f, r).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(f)?;
    Ok(())
}

fn search(common: &Common, check: Option<SearchCheck>) -> Result<bool> {
    let mut c = common.load()?;
    if let Some(k) = check {
        c.search.check = k;
    }
    if let Some(spec) = &common.dims {
        let mut shapes = parse_shapes(spec)?;
        if shapes.len() != 1 {
            return Err(Error::Config("--dims: search takes a single filtration".into()));
        }
        c.search.filtration = shapes.pop();
    }
    c.validate()?;
    let r = extremal_search(&c)?;
    match &c.output.dir {
        Some(dir) => write_search(&r, dir)?,
        None => {
            let mut out = io::stdout().lock();
            match c.output.format {
                Format::Csv => r.write_trace_csv(out)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &r).map_err(|e| Error::Io(e.to_string()))?;
                    writeln!(out)?;
                }
            }
        }
    }
    eprintln!(
        "{:?} on {}: best ratio {} (restart {}, {})",
        r.check,
        r.filtration,
        fmt_f64(r.best_ratio),
        r.best_restart,
        if r.best_row.pass { "pass" } else { "FAIL" }
    );
    Ok(r.best_row.pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::CheckDavis(c) => suite(&c, Some(DAVIS)),
        Command::CheckLepingle(c) => suite(&c, Some(&[CheckKind::Lepingle])),
        Command::CheckBurkholder(c) => suite(&c, Some(&[CheckKind::Burkholder, CheckKind::P2Identity])),
        Command::CheckPhi(c) => suite(&c, Some(&[CheckKind::PhiDavis, CheckKind::PhiBurkholder])),
        Command::CheckStein(c) => suite(&c, Some(&[CheckKind::Stein])),
        Command::KfuncCurve { common, p, q } => kfunc(&common, p, q),
        Command::SearchExtremal { common, check } => search(&common, check),
        Command::RunSuite(c) => suite(&c, None),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
