//! Batch front end for preperiodic-point surveys over quadratic fields.

mod config;
mod survey;

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use preper::curves::{chabauty_bounds, count_points_mod_p, hasse_weil_holds, parity_tighten, verify_point, CurveSystem, HyperellipticModel, Parity};
use preper::dynamics::{preperiodic_points, survey as run_survey, survey_record, SurveyRecord};
use preper::fixtures::{aux_curve, verify_all_fixtures};
use preper::param::instantiate;
use preper::portraits::Catalogue;
use qarith::counting::{asymptotic_constant, count_rationals};
use qarith::exactnum::fmt_rational;
use qarith::{make_field, QuadElement};

use config::{number, Config, Schedule};
use survey::{fields_up_to, parse_fields, Bounds, Cache};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Failed(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "dynq", about = "Preperiodic points of z² + c over quadratic fields")]
struct Cli {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides cache_dir and DYNQ_CACHE_DIR
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: config worker_count, else all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// PrePer(z² + c) for every c of bounded height, one JSON line per nonempty set
    Survey(SurveyArgs),
    /// PrePer(z² + c) for a single parameter
    Preper {
        #[arg(long, allow_hyphen_values = true)]
        field: i64,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Label frequencies of survey records; --records re-emits them
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        records: bool,
        /// Recompute every record and fail on disagreement
        #[arg(long)]
        recompute: bool,
    },
    /// A parameter c whose portrait contains a given type
    Parametrize {
        #[arg(long = "type")]
        ty: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    #[command(subcommand)]
    Curve(CurveCommand),
    /// Nonzero rationals of height ≤ T in [alpha, beta]
    Count {
        #[arg(long = "T")]
        t: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        alpha: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        beta: String,
    },
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Args)]
struct SurveyArgs {
    /// Survey every quadratic field with |disc| ≤ N
    #[arg(long)]
    disc_bound: Option<u64>,
    /// Comma-separated squarefree d, instead of --disc-bound
    #[arg(long, allow_hyphen_values = true)]
    fields: Option<String>,
    /// Bound on H_K(c) for every field
    #[arg(long)]
    height_bound: Option<String>,
    /// Extra rational c up to this relative height H_K(c) = H(c)²
    #[arg(long)]
    rational_height_bound: Option<String>,
    /// Reuse completed fields from the cache
    #[arg(long)]
    resume: bool,
}

#[derive(Args)]
struct ModelArgs {
    /// Coefficients from the leading term down, comma separated
    #[arg(long, allow_hyphen_values = true)]
    model: Option<String>,
    /// Model scale s in s·y² = f(x)
    #[arg(long, allow_hyphen_values = true)]
    scale: Option<String>,
    /// A fixture curve such as aux:12(4)
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Subcommand)]
enum CurveCommand {
    /// #X(F_p) for a smooth model
    CountFp {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Chabauty-type bounds on #X(Q) or #X(K)
    Bound {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long)]
        rank: Option<u32>,
        #[arg(long)]
        p: Option<u64>,
        /// Degree of the points counted
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        count: Option<u64>,
        #[arg(long, value_parser = ["odd", "even"])]
        parity: Option<String>,
    },
    /// Whether a point lies on a model or on a family's square conditions
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Family type whose square conditions define the curve
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        field: i64,
        /// Coordinates x,y,… in the field
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Recheck every shipped fixture
    Verify,
}

struct Out {
    format: Format,
    lock: io::StdoutLock<'static>,
}

impl Out {
    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.lock, "{s}")?;
        self.lock.flush()?;
        Ok(())
    }

    fn value(&mut self, v: &Value) -> Result<()> {
        match self.format {
            Format::Json => self.line(&v.to_string()),
            _ => {
                let obj = v.as_object().expect("object output");
                let w = obj.keys().map(|k| k.len()).max().unwrap_or(0);
                for (k, x) in obj {
                    let s = x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string());
                    self.line(&format!("{k:<w$}  {s}"))?;
                }
                Ok(())
            }
        }
    }

    fn record(&mut self, r: &SurveyRecord) -> Result<()> {
        match self.format {
            Format::Json => self.line(&serde_json::to_string(r).unwrap()),
            _ => self.line(&format!("{:<16} {:<28} {:<12} {:>3}  {}", r.field, r.c, r.label, r.count, r.points.join(" "))),
        }
    }
}

fn rational(s: &str) -> Result<BigRational> {
    number(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn element(d: i64, s: &str) -> Result<QuadElement> {
    let k = make_field(d).map_err(|e| CliError::Usage(format!("field {d}: {e}")))?;
    k.parse(s).map_err(|e| CliError::Usage(format!("{s:?}: {e}")))
}

fn survey(args: SurveyArgs, cfg: &Config, cache_dir: PathBuf, out: &mut Out) -> Result<()> {
    let fields = match (&args.fields, args.disc_bound.or(cfg.disc_bound)) {
        (Some(f), _) => parse_fields(f)?,
        (None, Some(n)) => fields_up_to(n).into_iter().map(|d| make_field(d).unwrap()).collect(),
        (None, None) => return Err(CliError::Usage("survey needs --fields or --disc-bound".into())),
    };
    let max_disc = fields.iter().map(|k| k.disc().unsigned_abs()).max().unwrap_or(1);
    let bounds = match (&args.height_bound, &args.rational_height_bound) {
        (None, None) if cfg.height_schedule.is_none() => Bounds {
            height: Schedule::linear(1000, 2200, max_disc),
            rational: Some(cfg.rational_height_schedule.clone().unwrap_or_else(|| Schedule::linear(300 * 300, 600 * 600, max_disc))),
        },
        (h, r) => Bounds {
            height: match h {
                Some(h) => Schedule::constant(rational(h)?),
                None => cfg.height_schedule.clone().unwrap_or_else(|| Schedule::linear(1000, 2200, max_disc)),
            },
            rational: match r {
                Some(r) => Some(Schedule::constant(rational(r)?)),
                None => cfg.rational_height_schedule.clone(),
            },
        },
    };
    let cache = Cache::new(&cache_dir)?;
    for k in fields {
        let (b, rb) = bounds.for_field(&k);
        let path = cache.path(&k, &b, rb.as_ref());
        let cached = if args.resume { cache.get(&path) } else { None };
        let body = match cached {
            Some(body) => {
                eprintln!("{k} B = {}: cached", fmt_rational(&b));
                body
            }
            None => {
                let outcome = run_survey(&k, &b, rb.as_ref(), Catalogue::embedded());
                let s = &outcome.summary;
                eprintln!(
                    "{k} B = {}: {} parameters, {} inadmissible, {} empty, {} records",
                    fmt_rational(&b),
                    s.parameters,
                    s.inadmissible,
                    s.empty,
                    s.nonempty
                );
                let body: String = outcome.records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
                cache.put(&path, &body)?;
                body
            }
        };
        for line in body.lines() {
            match out.format {
                Format::Json => out.line(line)?,
                _ => out.record(&serde_json::from_str(line).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?)?,
            }
        }
    }
    Ok(())
}

fn classify(input: PathBuf, records: bool, recompute: bool, out: &mut Out) -> Result<()> {
    let file = io::BufReader::new(std::fs::File::open(&input)?);
    let mut freq: BTreeMap<String, usize> = BTreeMap::new();
    let mut bad = 0;
    for (n, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: SurveyRecord =
            serde_json::from_str(&line).map_err(|e| CliError::Failed(format!("{}:{}: {e}", input.display(), n + 1)))?;
        if recompute {
            let d = r.field.trim_start_matches("Q(sqrt(").trim_end_matches("))").parse::<i64>().map_err(|_| CliError::Failed(format!("line {}: bad field {}", n + 1, r.field)))?;
            let again = survey_record(&preperiodic_points(&element(d, &r.c)?), Catalogue::embedded());
            if again != r {
                eprintln!("line {}: {} c = {} recomputes as {} ({} points)", n + 1, r.field, r.c, again.label, again.count);
                bad += 1;
            }
        }
        *freq.entry(r.label.clone()).or_default() += 1;
        if records {
            out.record(&r)?;
        }
    }
    if !records {
        match out.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(vec![]);
                w.write_record(["label", "count"]).map_err(|e| CliError::Failed(e.to_string()))?;
                for (l, c) in &freq {
                    w.write_record([l, &c.to_string()]).map_err(|e| CliError::Failed(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
                out.lock.write_all(&bytes)?;
            }
            Format::Json => {
                for (l, c) in &freq {
                    out.line(&json!({"label": l, "count": c}).to_string())?;
                }
            }
            Format::Text => {
                for (l, c) in &freq {
                    out.line(&format!("{l:<12} {c:>6}"))?;
                }
            }
        }
    }
    if bad > 0 {
        return Err(CliError::Failed(format!("{bad} records disagree with recomputation")));
    }
    Ok(())
}

fn model_of(m: &ModelArgs) -> Result<Option<(HyperellipticModel, Option<preper::fixtures::AuxCurve>)>> {
    if let Some(a) = &m.fixture {
        let aux = aux_curve(a).ok_or_else(|| CliError::Usage(format!("no fixture curve {a}")))?;
        return Ok(Some((aux.model(), Some(aux))));
    }
    let Some(desc) = &m.model else { return Ok(None) };
    let coeffs: Vec<i64> = desc
        .split(',')
        .map(|c| c.trim().parse().map_err(|_| CliError::Usage(format!("bad coefficient {c:?}"))))
        .collect::<Result<_>>()?;
    let mut model = HyperellipticModel::from_desc(&coeffs);
    if let Some(s) = &m.scale {
        model = model.twisted(rational(s)?);
    }
    Ok(Some((model, None)))
}

fn curve(cmd: CurveCommand, out: &mut Out) -> Result<()> {
    let need = |what: &str| CliError::Usage(format!("missing --{what}"));
    match cmd {
        CurveCommand::CountFp { model, p } => {
            let (m, aux) = model_of(&model)?.ok_or_else(|| need("model or --fixture"))?;
            let p = p.or(aux.as_ref().and_then(|a| a.fp.as_ref().map(|f| f.p))).ok_or_else(|| need("p"))?;
            let n = count_points_mod_p(&m, p).map_err(|e| CliError::Failed(e.to_string()))?;
            out.value(&json!({"p": p, "genus": m.genus(), "count": n, "hasse_weil": hasse_weil_holds(n, p, m.genus())}))
        }
        CurveCommand::Bound { model, genus, rank, p, d, count, parity } => {
            let (m, aux) = match model_of(&model)? {
                Some((m, aux)) => (Some(m), aux),
                None => (None, None),
            };
            let genus = genus.or(m.as_ref().map(|m| m.genus())).ok_or_else(|| need("genus"))?;
            let rank = rank.or(aux.as_ref().and_then(|a| a.rank)).ok_or_else(|| need("rank"))?;
            let fp = aux.as_ref().and_then(|a| a.fp.clone());
            let p = p.or(fp.as_ref().map(|f| f.p)).ok_or_else(|| need("p"))?;
            let d = d.or(aux.as_ref().and_then(|a| a.bound.as_ref().map(|b| b.d))).unwrap_or(1);
            let count = match (count, &m) {
                (Some(n), _) => n,
                (None, Some(m)) => count_points_mod_p(m, p).map_err(|e| CliError::Failed(e.to_string()))?,
                (None, None) => return Err(need("count")),
            };
            let parity = match parity.as_deref() {
                Some("odd") => Some(Parity::Odd),
                Some("even") => Some(Parity::Even),
                _ => m.as_ref().and_then(|m| m.forced_parity()),
            };
            let b = chabauty_bounds(genus, rank, p, d, count).map_err(|e| CliError::Failed(e.to_string()))?;
            let tight = |v: Option<i64>| v.map(|v| parity.map_or(v, |par| parity_tighten(v, par)));
            let lt = b.lorenzini_tucker.as_ref();
            out.value(&json!({
                "genus": genus, "rank": rank, "p": p, "d": d, "count": count,
                "parity": parity.map(|p| format!("{p:?}").to_lowercase()),
                "coleman": b.coleman,
                "lorenzini_tucker_exact": lt.map(|(x, _)| fmt_rational(x)),
                "lorenzini_tucker": lt.map(|(_, v)| v),
                "stoll": b.stoll,
                "tightened": {
                    "coleman": tight(b.coleman),
                    "lorenzini_tucker": tight(lt.map(|(_, v)| *v)),
                    "stoll": tight(b.stoll),
                },
            }))
        }
        CurveCommand::Verify { model, ty, field, point } => {
            let system = match (&ty, model_of(&model)?) {
                (Some(t), _) => CurveSystem::family(t).ok_or_else(|| CliError::Usage(format!("no family {t}")))?,
                (None, Some((m, _))) => CurveSystem::single(m),
                (None, None) => return Err(need("type, --model or --fixture")),
            };
            let pt: Vec<QuadElement> = point.split(',').map(|s| element(field, s.trim())).collect::<Result<_>>()?;
            if pt.len() != system.arity() {
                return Err(CliError::Usage(format!("expected {} coordinates, got {}", system.arity(), pt.len())));
            }
            let k = pt[0].field();
            out.value(&json!({"field": k.to_string(), "point": pt.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "on_curve": verify_point(&system, &pt)}))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(n) = cli.workers.or(cfg.worker_count) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("DYNQ_CACHE_DIR").map(PathBuf::from))
        .or(cfg.cache_dir.clone())
        .unwrap_or_else(|| PathBuf::from(".dynq-cache"));
    let mut out = Out { format: cli.format, lock: io::stdout().lock() };
    match cli.command {
        Command::Survey(args) => survey(args, &cfg, cache_dir, &mut out),
        Command::Preper { field, c } => {
            let c = element(field, &c)?;
            out.record(&survey_record(&preperiodic_points(&c), Catalogue::embedded()))
        }
        Command::Classify { input, records, recompute } => classify(input, records, recompute, &mut out),
        Command::Parametrize { ty, x } => {
            let xv = rational(&x)?;
            let v = instantiate(&ty, &xv, Catalogue::embedded()).map_err(|e| CliError::Failed(format!("{ty} at x = {x}: {e}")))?;
            let inst = &v.instance;
            let points: BTreeMap<&str, String> = inst.points.iter().map(|(n, p)| (*n, p.to_string())).collect();
            out.value(&json!({
                "type": ty, "x": fmt_rational(&xv), "field": inst.field.to_string(), "d": inst.field.d,
                "c": inst.c.to_string(), "portrait": v.label, "equals_type": v.equals_type,
                "contains": v.contains, "points": points,
            }))
        }
        Command::Curve(cmd) => curve(cmd, &mut out),
        Command::Count { t, alpha, beta } => {
            let (tv, a, b) = (rational(&t)?, rational(&alpha)?, rational(&beta)?);
            if a >= b || tv <= BigRational::zero() {
                return Err(CliError::Usage("need T > 0 and alpha < beta".into()));
            }
            let n = count_rationals(&tv, &a, &b);
            let t2 = tv.to_f64().unwrap().powi(2);
            let k = asymptotic_constant(&a, &b);
            out.value(&json!({"T": fmt_rational(&tv), "count": n, "ratio": n as f64 / t2, "constant": k.to_f64(), "constant_exact": k.to_string()}))
        }
        Command::Fixtures(FixturesCommand::Verify) => {
            let report = verify_all_fixtures();
            for e in &report.entries {
                match out.format {
                    Format::Json => out.line(&serde_json::to_string(e).unwrap())?,
                    _ => out.line(&format!("{} {:<36} {}", if e.pass { "ok  " } else { "FAIL" }, e.anchor, e.detail))?,
                }
            }
            let failed = report.failures().len();
            eprintln!("{} entries, {failed} failed, manifest {}", report.entries.len(), if report.manifest_ok { "ok" } else { "MISMATCH" });
            if report.all_pass() {
                Ok(())
            } else {
                Err(CliError::Failed("fixture verification failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, CliError::Usage(_)) { 2 } else { 1 })
        }
    }
}
