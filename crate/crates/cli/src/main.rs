use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use tlk_core::catalog::{self, CType, CatalogKind};
use tlk_core::classify::{classify_bs222, classify_s43, pretabularity_report, Bs222Class};
use tlk_core::enumeration::{enumerate_frames, Bounds, EnumSpec};
use tlk_core::formulas::parse;
use tlk_core::frames::{Closure, Frame, PointSet};
use tlk_core::io::{read_frame, to_dot, write_frame};
use tlk_core::jankov::{jankov_formula, negated_jankov};
use tlk_core::morphisms::{find_k_t_morphism, find_tmorphism_onto, isomorphic};
use tlk_core::papercheck::{run_suite, Suite, DEFAULT_SEED};
use tlk_core::semantics::{omega_lambda, omega_valid, valid, valid_at, CounterModel, Options, Validity};
use tlk_core::sequences::{dissimilarity_witness, embeddings, gtm, BitSeq};
use tlk_core::umbrella::{umbrella, umbrella_check};

/// Finite frames for tense logic: validity, t-morphisms, Jankov formulas,
/// pre-skeletons, garlands, hoops and umbrellas.
///
/// Exit status: 0 when the queried property holds, 1 when it fails, 2 on
/// input errors. `TLK_BUDGET` raises or lowers the valuation budget.
#[derive(Parser)]
#[command(name = "tlk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarise a frame: clusters, rootedness and metrics
    Frame(FrameArgs),
    /// Check a formula at a point, on the whole frame, or on the omega blow-up
    Check(CheckArgs),
    /// Search for t-morphisms
    #[command(subcommand)]
    Morphism(MorphismCommand),
    /// Print the bounded Jankov formula of a point
    Jankov(JankovArgs),
    /// Build catalogue frames and pre-skeletons
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Classify a rooted frame among linear frames or garlands and hoops
    Classify(ClassifyArgs),
    /// Decide c-irreducibility of the blow-up at a point
    Pretab(PretabArgs),
    /// List small frames up to isomorphism
    Enumerate(EnumerateArgs),
    /// Anchored bit sequences
    #[command(subcommand)]
    Seq(SeqCommand),
    /// Build the umbrella frame of a bit sequence
    Umbrella(UmbrellaArgs),
    /// Run a verification suite
    Papercheck(PapercheckArgs),
    /// Convert a frame to DOT or normalised JSON
    Export(ExportArgs),
}

#[derive(Args)]
struct FrameArgs {
    /// Frame JSON file, `-` for stdin
    #[arg(long)]
    frame: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    formula: String,
    /// Validity at this point
    #[arg(long, conflicts_with_all = ["valid", "omega"])]
    at: Option<String>,
    /// Validity at every point (the default)
    #[arg(long)]
    valid: bool,
    /// Validity on the frame with `--root` blown up into an infinite cluster
    #[arg(long, requires = "root")]
    omega: bool,
    #[arg(long)]
    root: Option<String>,
}

#[derive(Subcommand)]
enum MorphismCommand {
    /// Find a surjective t-morphism, an isomorphism, or a k-t-morphism
    Find(FindArgs),
}

#[derive(Args)]
struct FindArgs {
    #[arg(long)]
    from: PathBuf,
    #[arg(long)]
    to: PathBuf,
    /// Degree of a local k-t-morphism; needs `--root` and `--target-root`
    #[arg(long, requires_all = ["root", "target_root"])]
    k: Option<u32>,
    #[arg(long)]
    root: Option<String>,
    #[arg(long)]
    target_root: Option<String>,
    /// Surjective t-morphism (the default)
    #[arg(long, conflicts_with = "iso")]
    onto: bool,
    #[arg(long)]
    iso: bool,
}

#[derive(Args)]
struct JankovArgs {
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    root: String,
    #[arg(long)]
    degree: u32,
    #[arg(long)]
    negate: bool,
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// `chain N`, `cluster L`, `ct o|+|-|+- L`, `garland N`, `co-garland N`,
    /// `hoop N`, `window I J`, `fig1`, `fig2`
    Make {
        kind: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Blow a point of a skeleton up into a cluster of `lambda + 1` points
    Preskeleton {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        mark: String,
        #[arg(long, default_value_t = 1)]
        lambda: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Logic {
    S43,
    Bs222,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    frame: PathBuf,
    /// Only this classification; both by default
    #[arg(long, value_enum)]
    logic: Option<Logic>,
}

#[derive(Args)]
struct PretabArgs {
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    mark: String,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, default_value_t = 3)]
    max: usize,
    #[arg(long)]
    dep: Option<u32>,
    #[arg(long)]
    widf: Option<u32>,
    #[arg(long)]
    widb: Option<u32>,
    #[arg(long)]
    zdg: Option<u32>,
    #[arg(long)]
    gir: Option<u32>,
    #[arg(long)]
    rooted: bool,
    #[arg(long)]
    skeleton: bool,
    /// Arbitrary relations instead of preorders (at most 4 points)
    #[arg(long)]
    raw: bool,
    /// Print each frame as a JSON document
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqFormat {
    Bits,
    Json,
}

#[derive(Subcommand)]
enum SeqCommand {
    /// Stage of the generalized Thue-Morse sequence for a function given by its first bits
    Gtm {
        #[arg(long)]
        bits: String,
        #[arg(long)]
        stage: usize,
        #[arg(long, value_enum, default_value_t = SeqFormat::Bits)]
        format: SeqFormat,
    },
    /// Translations embedding one anchored sequence (`bits@anchor`) in another
    Embed {
        #[arg(long, allow_hyphen_values = true)]
        needle: String,
        #[arg(long, allow_hyphen_values = true)]
        hay: String,
    },
    /// Dissimilarity witness of two functions; g needs i + 4 bits past the first difference i
    Witness {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
}

#[derive(Args)]
struct UmbrellaArgs {
    #[arg(long, allow_hyphen_values = true)]
    bits: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct PapercheckArgs {
    /// jankov, bounds, s43, bs222, sequences, umbrella or all
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    frame: PathBuf,
    #[arg(long, value_enum, default_value_t = ExportFormat::Dot)]
    format: ExportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! out {
    ($($t:tt)*) => {
        writeln!(std::io::stdout(), $($t)*)
    };
}

/// Outcome of a command that succeeded in running.
enum Status {
    Holds,
    Fails,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Status::Holds) => ExitCode::SUCCESS,
        Ok(Status::Fails) => ExitCode::from(1),
        Err(e) if closed_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn closed_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn run(cmd: Command) -> Result<Status> {
    match cmd {
        Command::Frame(a) => frame_summary(a),
        Command::Check(a) => check(a),
        Command::Morphism(MorphismCommand::Find(a)) => morphism_find(a),
        Command::Jankov(a) => jankov(a),
        Command::Catalog(c) => catalog_cmd(c),
        Command::Classify(a) => classify(a),
        Command::Pretab(a) => pretab(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Seq(c) => seq(c),
        Command::Umbrella(a) => umbrella_cmd(a),
        Command::Papercheck(a) => papercheck(a),
        Command::Export(a) => export(a),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> Result<(Frame, Option<String>)> {
    read_frame(&read_input(path)?).with_context(|| format!("in {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            if text.ends_with('\n') {
                write!(std::io::stdout(), "{text}")?;
            } else {
                out!("{text}")?;
            }
            Ok(())
        }
    }
}

fn names(frame: &Frame, set: PointSet) -> Vec<&str> {
    set.iter().map(|x| frame.name(x)).collect()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialise")
}

fn frame_summary(a: FrameArgs) -> Result<Status> {
    let (f, root) = load(&a.frame)?;
    let closed = if f.is_closed() { f.clone() } else { f.closed() };
    let clusters: Vec<Vec<&str>> = closed.clusters().into_iter().map(|c| names(&f, c)).collect();
    let per_point: Map<String, Value> = closed
        .point_metrics()
        .into_iter()
        .enumerate()
        .map(|(x, m)| (f.name(x).to_string(), json!(m)))
        .collect();
    let v = json!({
        "points": f.len(),
        "edges": f.edge_count(),
        "root": root,
        "closed": f.is_closed(),
        "rooted": f.is_rooted(),
        "skeleton": closed.is_skeleton(),
        "clusters": clusters,
        "metrics": closed.metrics(),
        "per_point": per_point,
    });
    out!("{}", pretty(&v))?;
    Ok(Status::Holds)
}

fn counter_json(frame: &Frame, cm: &CounterModel) -> Value {
    let val: Map<String, Value> = cm
        .valuation
        .iter()
        .map(|(v, s)| (format!("p{v}"), json!(names(frame, *s))))
        .collect();
    json!({ "point": frame.name(cm.point), "valuation": val })
}

fn check(a: CheckArgs) -> Result<Status> {
    let (f, _) = load(&a.frame)?;
    let phi = parse(&a.formula).map_err(|e| anyhow!("formula: {e}"))?;
    let opts = Options::default();
    let (result, frame) = if let Some(at) = &a.at {
        (valid_at(&f, f.point(at)?, &phi, opts)?, f)
    } else if a.omega {
        let root = a.root.as_deref().expect("clap enforces --root");
        let x = f.point(root)?;
        let blown = catalog::preskeleton(&f, x, omega_lambda(&phi))?;
        (omega_valid(&f, x, &phi, opts)?, blown)
    } else {
        (valid(&f, &phi, opts)?, f)
    };
    match result {
        Validity::Valid => {
            out!("valid")?;
            Ok(Status::Holds)
        }
        Validity::Refuted(cm) => {
            out!("{}", pretty(&counter_json(&frame, &cm)))?;
            Ok(Status::Fails)
        }
    }
}

fn map_json(from: &Frame, to: &Frame, pairs: impl Iterator<Item = (usize, usize)>) -> Value {
    Value::Object(
        pairs
            .map(|(x, y)| (from.name(x).to_string(), json!(to.name(y))))
            .collect(),
    )
}

fn morphism_find(a: FindArgs) -> Result<Status> {
    let (from, _) = load(&a.from)?;
    let (to, _) = load(&a.to)?;
    let found = if let Some(k) = a.k {
        let x = from.point(a.root.as_deref().expect("clap enforces --root"))?;
        let y = to.point(a.target_root.as_deref().expect("clap enforces --target-root"))?;
        find_k_t_morphism(&from, x, &to, y, k)?
            .map(|m| map_json(&from, &to, m.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y)))))
    } else {
        let m = if a.iso {
            isomorphic(&from, &to)
        } else {
            find_tmorphism_onto(&from, &to)
        };
        m.map(|m| map_json(&from, &to, m.into_iter().enumerate()))
    };
    out!("{}", pretty(&found.clone().unwrap_or(Value::Null)))?;
    Ok(if found.is_some() { Status::Holds } else { Status::Fails })
}

fn jankov(a: JankovArgs) -> Result<Status> {
    let (f, _) = load(&a.frame)?;
    let y = f.point(&a.root)?;
    let j = if a.negate {
        negated_jankov(&f, y, a.degree)?
    } else {
        jankov_formula(&f, y, a.degree)?
    };
    for (i, x) in j.enumeration.iter().enumerate() {
        eprintln!("p{i} = {}", f.name(*x));
    }
    out!("{}", j.formula.render())?;
    Ok(Status::Holds)
}

fn num<T: std::str::FromStr>(params: &[String], i: usize, what: &str) -> Result<T> {
    params
        .get(i)
        .ok_or_else(|| anyhow!("missing {what}"))?
        .parse()
        .map_err(|_| anyhow!("{what} `{}` is not a number", params[i]))
}

fn catalog_kind(kind: &str, p: &[String]) -> Result<CatalogKind> {
    let want = |n: usize| -> Result<()> {
        if p.len() != n {
            bail!("`{kind}` takes {n} parameter(s), got {}", p.len());
        }
        Ok(())
    };
    Ok(match kind.to_ascii_lowercase().as_str() {
        "chain" => {
            want(1)?;
            CatalogKind::Chain(num(p, 0, "n")?)
        }
        "cluster" => {
            want(1)?;
            CatalogKind::Cluster(num(p, 0, "lambda")?)
        }
        "ct" => {
            want(2)?;
            let t = CType::ALL
                .into_iter()
                .find(|t| t.symbol() == p[0])
                .ok_or_else(|| anyhow!("type `{}` is not one of o, +, -, +-", p[0]))?;
            CatalogKind::Ct(t, num(p, 1, "lambda")?)
        }
        "garland" => {
            want(1)?;
            CatalogKind::Garland(num(p, 0, "n")?)
        }
        "co-garland" | "cogarland" => {
            want(1)?;
            CatalogKind::CoGarland(num(p, 0, "n")?)
        }
        "hoop" => {
            want(1)?;
            CatalogKind::Hoop(num(p, 0, "n")?)
        }
        "window" => {
            want(2)?;
            CatalogKind::GarlandWindow(num(p, 0, "i")?, num(p, 1, "j")?)
        }
        "fig1" => {
            want(0)?;
            CatalogKind::Fig1
        }
        "fig2" => {
            want(0)?;
            CatalogKind::Fig2
        }
        other => bail!("unknown catalogue family `{other}`"),
    })
}

fn catalog_cmd(c: CatalogCommand) -> Result<Status> {
    match c {
        CatalogCommand::Make { kind, params, out } => {
            let f = catalog::make(catalog_kind(&kind, &params)?)?;
            emit(&write_frame(&f, None), out.as_deref())?;
        }
        CatalogCommand::Preskeleton {
            frame,
            mark,
            lambda,
            out,
        } => {
            let (f, _) = load(&frame)?;
            let x = f.point(&mark)?;
            let p = catalog::preskeleton(&f, x, lambda)?;
            emit(&write_frame(&p, None), out.as_deref())?;
        }
    }
    Ok(Status::Holds)
}

fn classify(a: ClassifyArgs) -> Result<Status> {
    let (f, _) = load(&a.frame)?;
    let mut member = false;
    if matches!(a.logic, None | Some(Logic::S43)) {
        let c = classify_s43(&f);
        member |= !matches!(c, tlk_core::classify::S43Class::NotApplicable(_));
        out!("s43: {c}")?;
    }
    if matches!(a.logic, None | Some(Logic::Bs222)) {
        let c = classify_bs222(&f);
        match &c {
            Bs222Class::Member(fam) => {
                member = true;
                out!("bs222: {fam}")?;
            }
            Bs222Class::NotApplicable(why) => out!("bs222: not applicable: {why}")?,
        }
    }
    Ok(if member { Status::Holds } else { Status::Fails })
}

fn pretab(a: PretabArgs) -> Result<Status> {
    let (f, _) = load(&a.frame)?;
    let x = f.point(&a.mark)?;
    let r = pretabularity_report(&f, x)?;
    out!("{}", pretty(&json!(r)))?;
    Ok(if r.pretabular { Status::Holds } else { Status::Fails })
}

fn enumerate(a: EnumerateArgs) -> Result<Status> {
    let spec = EnumSpec {
        max_points: a.max,
        bounds: Bounds {
            dep: a.dep,
            wid_f: a.widf,
            wid_b: a.widb,
            zdg: a.zdg,
            gir: a.gir,
        },
        rooted_only: a.rooted,
        skeleton_only: a.skeleton,
        closure: if a.raw {
            Closure::None
        } else {
            Closure::ReflexiveTransitive
        },
    };
    let frames = enumerate_frames(&spec)?;
    for f in &frames {
        if a.json {
            out!(
                "{}",
                serde_json::to_string(&serde_json::from_str::<Value>(&write_frame(f, None))?)?
            )?;
        } else {
            let edges: Vec<String> = tlk_core::io::generating_edges(f)
                .into_iter()
                .map(|(x, y)| format!("{x}>{y}"))
                .collect();
            out!("{} [{}]", f.len(), edges.join(" "))?;
        }
    }
    eprintln!("{} frames", frames.len());
    Ok(Status::Holds)
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    Ok(BitSeq::from_bits(s)?.bits)
}

fn seq(c: SeqCommand) -> Result<Status> {
    match c {
        SeqCommand::Gtm { bits, stage, format } => {
            let s = gtm(&parse_bits(&bits)?, stage)?;
            match format {
                SeqFormat::Bits => out!("{s}")?,
                SeqFormat::Json => out!("{}", pretty(&json!(s)))?,
            }
            Ok(Status::Holds)
        }
        SeqCommand::Embed { needle, hay } => {
            let (n, h): (BitSeq, BitSeq) = (needle.parse()?, hay.parse()?);
            let offs = embeddings(&n, &h);
            out!("{}", json!(offs))?;
            Ok(if offs.is_empty() { Status::Fails } else { Status::Holds })
        }
        SeqCommand::Witness { f, g } => {
            let (f, g) = (parse_bits(&f)?, parse_bits(&g)?);
            let d = dissimilarity_witness(&f, &g, f.len().min(g.len()))?;
            out!("{}", pretty(&json!(d)))?;
            Ok(if d.absent { Status::Holds } else { Status::Fails })
        }
    }
}

fn umbrella_cmd(a: UmbrellaArgs) -> Result<Status> {
    let z = umbrella(&a.bits.parse()?)?;
    let report = umbrella_check(&z.frame, Options::default())?;
    let json_text = write_frame(&z.frame, Some(z.frame.name(0)));
    match &a.out {
        Some(p) => emit(&json_text, Some(p))?,
        None if a.dot.is_none() => out!("{json_text}")?,
        None => {}
    }
    if let Some(p) = &a.dot {
        emit(&to_dot(&z.frame), Some(p))?;
    }
    eprintln!("{}", pretty(&json!(report)));
    Ok(if report.passed() { Status::Holds } else { Status::Fails })
}

fn papercheck(a: PapercheckArgs) -> Result<Status> {
    let suite: Suite = a.suite.parse()?;
    let report = run_suite(suite, a.seed);
    if a.json {
        out!("{}", pretty(&json!(report)))?;
    } else {
        for c in &report.cases {
            out!("{c}")?;
        }
        out!("{}: {} passed, {} failed", report.suite, report.passed, report.failed)?;
    }
    Ok(if report.all_passed() {
        Status::Holds
    } else {
        Status::Fails
    })
}

fn export(a: ExportArgs) -> Result<Status> {
    let (f, root) = load(&a.frame)?;
    let text = match a.format {
        ExportFormat::Dot => to_dot(&f),
        ExportFormat::Json => write_frame(&f, root.as_deref()),
    };
    emit(&text, a.out.as_deref())?;
    Ok(Status::Holds)
}
