use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use vassiliev::basis::{BasisError, CanonicalBasis, ElementRef};
use vassiliev::factorization::{
    derive_theorem1, element_label, extract_alphas, resum_all, verify_factorization, CheckStatus, ExtractionResult, FactorizationError,
    FactorizationReport, KnotInput, SKEIN_CONVENTION,
};
use vassiliev::knots::{homfly, jones, knot_by_name, BraidWord, HomflyBudget, KnotError, PlanarDiagram};
use vassiliev::rational::{fmt_q, q};
use vassiliev::relations::dimension;
use vassiliev::weights::{render_weight, weight_sun, WeightConfig};
use vassiliev::Diagram;

/// Largest degree the basis commands accept.
const DEGREE_LIMIT: usize = 7;

#[derive(Parser)]
#[command(name = "vassiliev", version, about = "Exact diagram algebra and primitive finite-type invariants from knot polynomials")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalOpts {
    /// Highest degree (default depends on the command).
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Quotient by isolated chords (the default).
    #[arg(long, global = true, conflicts_with = "unreduced")]
    reduced: bool,
    /// Keep isolated chords (framing-extended basis).
    #[arg(long, global = true)]
    unreduced: bool,
    /// Comma-separated su(N) ranks; the last one is held out.
    #[arg(long, global = true, value_delimiter = ',', default_value = "2,3,4,5")]
    probes: Vec<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for the basis cache; without it the basis is rebuilt.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct KnotArgs {
    /// Table name such as 3_1, 4_1*, granny or 3_1#4_1.
    #[arg(long)]
    knot: Option<String>,
    /// Inline PD code, e.g. "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]".
    #[arg(long)]
    pd: Option<String>,
    /// Braid word as signed generators, e.g. "[1,1,1]".
    #[arg(long)]
    braid: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimensions d_i and connected counts per degree.
    Dims,
    /// The canonical basis with element diagrams.
    Basis,
    /// su(N) weight of a diagram.
    Weight {
        /// File with one diagram per line.
        #[arg(long, conflicts_with_all = ["diagram", "random"])]
        file: Option<PathBuf>,
        /// Inline diagram, e.g. "L=3 T=1 : 1-V1.1 2-V1.2 3-V1.3".
        #[arg(long, conflicts_with = "random")]
        diagram: Option<String>,
        /// Random diagram of this degree (uses --seed).
        #[arg(long)]
        random: Option<usize>,
        /// Evaluate at this rank instead of printing the polynomial.
        #[arg(long)]
        n: Option<i64>,
    },
    /// Jones polynomial (local convention, t -> t^-1 from the usual tables).
    Jones(KnotArgs),
    /// HOMFLY polynomial in (a, z).
    Homfly(KnotArgs),
    /// Coefficients in the canonical basis from the su(N) slices.
    Extract(KnotArgs),
    /// Extraction plus the composite and exponential checks.
    Verify(KnotArgs),
    /// Composite coefficients from the product-group identity.
    DeriveTheorem1,
}

#[derive(Clone, Serialize)]
struct RunConfig {
    command: String,
    max_degree: usize,
    reduced: bool,
    weight_normalization: String,
    skein_convention: String,
    probes: Vec<i64>,
    cache_dir: Option<String>,
    format: Format,
    seed: u64,
}

impl RunConfig {
    fn header(&self) -> String {
        format!(
            "# command: {}\n# max degree: {}, {}\n# weights: {}\n# skein: {}\n# probes: {:?}, seed: {}\n",
            self.command,
            self.max_degree,
            if self.reduced { "reduced" } else { "unreduced" },
            self.weight_normalization,
            self.skein_convention,
            self.probes,
            self.seed
        )
    }
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<KnotError> for Failure {
    fn from(e: KnotError) -> Self {
        match e {
            KnotError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<FactorizationError> for Failure {
    fn from(e: FactorizationError) -> Self {
        match e {
            FactorizationError::Knot(k) => k.into(),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<BasisError> for Failure {
    fn from(e: BasisError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

fn default_degree(cmd: &Cmd) -> usize {
    match cmd {
        Cmd::Dims | Cmd::Basis | Cmd::DeriveTheorem1 => 6,
        Cmd::Extract(_) | Cmd::Verify(_) => 3,
        _ => 0,
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Dims => "dims",
        Cmd::Basis => "basis",
        Cmd::Weight { .. } => "weight",
        Cmd::Jones(_) => "jones",
        Cmd::Homfly(_) => "homfly",
        Cmd::Extract(_) => "extract",
        Cmd::Verify(_) => "verify",
        Cmd::DeriveTheorem1 => "derive-theorem1",
    }
}

fn load_basis(cfg: &RunConfig) -> Result<CanonicalBasis, Failure> {
    if cfg.max_degree > DEGREE_LIMIT {
        return Err(Failure::Usage(format!("--max-degree {} exceeds the supported {DEGREE_LIMIT}", cfg.max_degree)));
    }
    match &cfg.cache_dir {
        Some(dir) => {
            let (b, hit) = CanonicalBasis::load_or_build(dir.as_ref(), cfg.max_degree, cfg.reduced)?;
            eprintln!("basis cache {}", if hit { "hit" } else { "miss" });
            Ok(b)
        }
        None => Ok(CanonicalBasis::build(cfg.max_degree, cfg.reduced)?),
    }
}

fn knot_input(a: &KnotArgs) -> Result<KnotInput, Failure> {
    match (&a.knot, &a.pd, &a.braid) {
        (Some(name), None, None) => Ok(KnotInput::new(name, knot_by_name(name)?.pd)),
        (None, Some(pd), None) => Ok(KnotInput::new(pd.trim(), PlanarDiagram::parse(pd)?)),
        (None, None, Some(b)) => Ok(KnotInput::new(b.trim(), BraidWord::parse(b)?.to_pd()?)),
        _ => Err(Failure::Usage("give exactly one of --knot, --pd, --braid".into())),
    }
}

fn emit(cfg: &RunConfig, text: String, value: serde_json::Value) -> String {
    match cfg.format {
        Format::Text => format!("{}{}", cfg.header(), text),
        Format::Json => {
            let doc = json!({ "config": cfg, "result": value });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    }
}

fn cmd_dims(cfg: &RunConfig) -> Outcome {
    let b = load_basis(cfg)?;
    let mut text = String::from("degree  d_i  connected\n");
    let mut rows = Vec::new();
    for n in 0..=cfg.max_degree {
        let d = dimension(n, cfg.reduced);
        let c = b.degree(n).connected;
        writeln!(text, "{n:>6}  {d:>3}  {c:>9}").unwrap();
        rows.push(json!({ "degree": n, "dimension": d, "connected": c }));
    }
    Ok((emit(cfg, text, json!({ "basis_version": b.version, "degrees": rows })), true))
}

fn cmd_basis(cfg: &RunConfig) -> Outcome {
    let b = load_basis(cfg)?;
    let mut text = format!("basis version {}\n", b.version);
    let mut degrees = Vec::new();
    for n in 0..=cfg.max_degree {
        let db = b.degree(n);
        writeln!(text, "degree {n}: {} elements, {} connected", db.dim(), db.connected).unwrap();
        let mut elems = Vec::new();
        for (index, e) in db.elements.iter().enumerate() {
            let label = element_label(&b, ElementRef { degree: n, index });
            writeln!(text, "  {label}: {}", e.diagram).unwrap();
            elems.push(json!({ "label": label, "connected": e.is_connected(), "diagram": e.diagram.to_string() }));
        }
        degrees.push(json!({ "degree": n, "connected": db.connected, "elements": elems }));
    }
    Ok((emit(cfg, text, json!({ "basis_version": b.version, "degrees": degrees })), true))
}

fn cmd_weight(cfg: &RunConfig, file: &Option<PathBuf>, diagram: &Option<String>, random: Option<usize>, n: Option<i64>) -> Outcome {
    let diagrams: Vec<Diagram> = match (file, diagram, random) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
            lines.map(|l| l.parse::<Diagram>().map_err(|e| Failure::Usage(format!("{l}: {e}")))).collect::<Result<_, _>>()?
        }
        (None, Some(s), _) => vec![s.parse::<Diagram>().map_err(|e| Failure::Usage(e.to_string()))?],
        (None, None, Some(0)) => return Err(Failure::Usage("--random needs a degree of at least 1".into())),
        (None, None, Some(d)) => vec![Diagram::random(&mut ChaCha8Rng::seed_from_u64(cfg.seed), d, false)],
        (None, None, None) => return Err(Failure::Usage("give --file, --diagram or --random".into())),
    };
    if let Some(n) = n {
        if n < 2 {
            return Err(Failure::Usage(format!("rank N = {n} is below 2")));
        }
    }
    let wc = WeightConfig::default();
    let mut text = String::new();
    let mut out = Vec::new();
    for d in &diagrams {
        let w = weight_sun(d, &wc);
        let shown = match n {
            Some(n) => fmt_q(&w.eval(&q(n))),
            None => render_weight(&w),
        };
        writeln!(text, "{d}\n  weight = {shown}").unwrap();
        out.push(json!({ "diagram": d.to_string(), "degree": d.degree(), "weight": shown, "rank": n }));
    }
    Ok((emit(cfg, text, json!(out)), true))
}

fn cmd_poly(cfg: &RunConfig, a: &KnotArgs, which: &str) -> Outcome {
    let k = knot_input(a)?;
    let p = if which == "jones" { jones(&k.pd)?.to_string() } else { homfly(&k.pd, HomflyBudget::default())?.to_string() };
    let text = format!("{}: {which} = {p}\n", k.label);
    Ok((emit(cfg, text, json!({ "knot": k.label, "crossings": k.pd.crossing_count(), which: p })), true))
}

fn extraction_text(e: &ExtractionResult) -> String {
    let mut s = format!("knot {}, basis {}, held-out probe {:?}\n", e.knot, e.basis_version, e.held_out);
    for d in &e.degrees {
        match &d.alpha {
            Some(a) => {
                let parts: Vec<String> = d.elements.iter().zip(a).map(|(l, x)| format!("{l} = {}", fmt_q(x))).collect();
                let held = match d.held_out_consistent {
                    Some(true) => ", held-out ok",
                    Some(false) => ", held-out MISMATCH",
                    None => "",
                };
                writeln!(s, "degree {}: {}{held}", d.degree, if parts.is_empty() { "(empty)".into() } else { parts.join(", ") }).unwrap();
            }
            None => {
                writeln!(s, "degree {}: rank {} of {}, coefficients not determined by these probes", d.degree, d.training_rank, d.elements.len()).unwrap();
            }
        }
    }
    s
}

fn cmd_extract(cfg: &RunConfig, a: &KnotArgs) -> Outcome {
    let k = knot_input(a)?;
    let b = load_basis(cfg)?;
    let e = extract_alphas(&k, &b, cfg.max_degree, &cfg.probes)?;
    let ok = e.degrees.iter().all(|d| d.held_out_consistent != Some(false));
    Ok((emit(cfg, extraction_text(&e), serde_json::to_value(&e).expect("serializable")), ok))
}

fn status(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Undetermined => "undetermined",
    }
}

fn verify_text(r: &FactorizationReport) -> String {
    let mut s = extraction_text(&r.extraction);
    for c in &r.theorem1 {
        writeln!(s, "composite {}: {}", c.element, status(c.status)).unwrap();
    }
    for c in &r.reconstruction {
        writeln!(s, "reconstruction N = {}: {}", c.probe, status(c.status)).unwrap();
    }
    if !r.full_rank {
        writeln!(s, "rank-deficient degrees (degree, rank, dim): {:?}", r.deficient_degrees).unwrap();
        let d = &r.primitive_diagnostic;
        let rec = d.reconstruction.iter().all(|c| c.status == CheckStatus::Pass);
        writeln!(s, "connected-only extraction determined through degree {}, reconstruction {}", d.through_degree, if rec { "pass" } else { "FAIL" }).unwrap();
    }
    writeln!(s, "verify: {}", if r.passed { "PASS" } else { "FAIL" }).unwrap();
    s
}

fn cmd_verify(cfg: &RunConfig, a: &KnotArgs) -> Outcome {
    let k = knot_input(a)?;
    let b = load_basis(cfg)?;
    let r = verify_factorization(&k, &b, cfg.max_degree, &cfg.probes)?;
    Ok((emit(cfg, verify_text(&r), serde_json::to_value(&r).expect("serializable")), r.passed))
}

fn cmd_derive(cfg: &RunConfig) -> Outcome {
    let b = load_basis(cfg)?;
    let der = derive_theorem1(&b, cfg.max_degree)?;
    let gen = if cfg.reduced { ElementRef { degree: 2, index: 0 } } else { ElementRef { degree: 1, index: 0 } };
    let resum = if cfg.max_degree >= gen.degree { Some(resum_all(&b, &der, gen, cfg.max_degree)?) } else { None };
    let mut text = String::new();
    for id in &der.identities {
        writeln!(text, "{}: derived {} | expected {} | {}", id.label, id.derived, id.expected, if id.holds { "holds" } else { "FAILS" }).unwrap();
    }
    if let Some(r) = &resum {
        writeln!(text, "resummation in {} to order {}: {}", r.generator, r.order, if r.holds { "holds" } else { "FAILS" }).unwrap();
    }
    let ok = der.all_hold() && resum.as_ref().is_none_or(|r| r.holds);
    Ok((emit(cfg, text, json!({ "basis_version": b.version, "identities": der.identities, "resummation": resum })), ok))
}

fn run(cli: &Cli) -> Outcome {
    let o = &cli.opts;
    let cfg = RunConfig {
        command: command_name(&cli.cmd).into(),
        max_degree: o.max_degree.unwrap_or_else(|| default_degree(&cli.cmd)),
        reduced: o.reduced || !o.unreduced,
        weight_normalization: WeightConfig::default().describe(),
        skein_convention: SKEIN_CONVENTION.into(),
        probes: o.probes.clone(),
        cache_dir: o.cache_dir.as_ref().map(|p| p.display().to_string()),
        format: o.format,
        seed: o.seed,
    };
    match &cli.cmd {
        Cmd::Dims => cmd_dims(&cfg),
        Cmd::Basis => cmd_basis(&cfg),
        Cmd::Weight { file, diagram, random, n } => cmd_weight(&cfg, file, diagram, *random, *n),
        Cmd::Jones(a) => cmd_poly(&cfg, a, "jones"),
        Cmd::Homfly(a) => cmd_poly(&cfg, a, "homfly"),
        Cmd::Extract(a) => cmd_extract(&cfg, a),
        Cmd::Verify(a) => cmd_verify(&cfg, a),
        Cmd::DeriveTheorem1 => cmd_derive(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
