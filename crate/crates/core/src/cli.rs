//! Command-line front end.
//!
//! Every subcommand reads one configuration file (see [`crate::config`]) and
//! prints a [`Report`]. Component and node indices on the command line are
//! 1-based; node `i` is the intersection of `Cᵢ` and `C_{i+1}`.
//!
//! Exit status: 0 on success, 1 on other failures (including an oracle
//! mismatch), 2 on parse or validation diagnostics, 3 on the `inconsistent`
//! verdict.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::birational::{self, SurgeryError};
use crate::config::{BaseSpec, ConfigError, ConfigFile};
use crate::cycles::{self, CycleConfig, CycleError};
use crate::fixtures::{corpus, generate_fixtures, render_fixtures};
use crate::pic0::{FamilyProfile, Order, PicZeroFamily};
use crate::qform;
use crate::report::{self, Report};
use crate::twistor::{self, TwistorError, TwistorPencil, Verdict};
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_DIAGNOSTICS: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "anticycle",
    version,
    about = "Zariski decompositions of anti-canonical cycles and twistor pencils"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FileArgs {
    #[arg(long)]
    pub file: PathBuf,
    /// Structured output instead of `key: value` lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zariski decomposition of the anti-canonical cycle.
    Zariski(FileArgs),
    /// Anti-Kodaira dimension class of a member.
    Classify(FileArgs),
    /// Blow up a node (conjugate pair on real cycles) or a smooth point.
    Blowup {
        #[command(flatten)]
        io: FileArgs,
        #[arg(long, conflicts_with = "smooth")]
        node: Option<usize>,
        #[arg(long)]
        component: Option<usize>,
        #[arg(long, requires = "component")]
        smooth: bool,
        #[arg(long)]
        drop_reality: bool,
    },
    /// Contract a (−1)-component (with its conjugate on real cycles).
    Blowdown {
        #[command(flatten)]
        io: FileArgs,
        #[arg(long)]
        component: usize,
        #[arg(long)]
        drop_reality: bool,
    },
    /// Contract (−1)-components until the cycle is nef.
    Contract(FileArgs),
    /// Reducible members of the pencil.
    Fibers(FileArgs),
    /// Degrees of M(r, rho) on the cycle over the first reducible member.
    Intnums {
        #[command(flatten)]
        io: FileArgs,
        #[arg(long, allow_negative_numbers = true)]
        rho: i64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        r: i64,
    },
    /// Derivation that E is a fixed component of |M(r, rho)|.
    Fixed {
        #[command(flatten)]
        io: FileArgs,
        #[arg(long, allow_negative_numbers = true)]
        rho: i64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        r: i64,
    },
    /// Dimension of |M(r, nu tau)| for a constant family of finite order tau.
    Pluri {
        #[command(flatten)]
        io: FileArgs,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long, allow_negative_numbers = true)]
        nu: i64,
    },
    /// Algebraic dimension verdict.
    Adim(FileArgs),
    /// Compare the greedy decomposition with the subset-enumeration oracle.
    OracleCheck {
        /// Check one file instead of the seeded corpus.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print a deterministic corpus of generated configurations.
    Fixtures {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Diagnostics(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Diagnostics(_) => EXIT_DIAGNOSTICS,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Diagnostics(e.to_string())
    }
}

impl From<CycleError> for CliError {
    fn from(e: CycleError) -> Self {
        match e {
            CycleError::Invalid(_) | CycleError::DivisorLength { .. } | CycleError::NotEffective => {
                CliError::Diagnostics(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<TwistorError> for CliError {
    fn from(e: TwistorError) -> Self {
        match e {
            TwistorError::Invalid(_) => CliError::Diagnostics(e.to_string()),
            TwistorError::Cycle(c) => c.into(),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<SurgeryError> for CliError {
    fn from(e: SurgeryError) -> Self {
        match e {
            SurgeryError::Cycle(c) => c.into(),
            other => CliError::Failure(other.to_string()),
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(cli: Cli) -> Outcome {
    match dispatch(cli.command) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Failure(format!("cannot read {}: {e}", path.display())))?;
    ConfigFile::parse(&text).map_err(|e| CliError::Diagnostics(format!("{}: {e}", path.display())))
}

fn load_cycle(path: &Path) -> Result<(ConfigFile, CycleConfig), CliError> {
    let file = load(path)?;
    let Some(c) = file.cycle_config().cloned() else {
        return Err(CliError::Diagnostics("this command needs a cycle base".into()));
    };
    c.validate().map_err(CycleError::Invalid)?;
    Ok((file, c))
}

fn load_pencil(path: &Path) -> Result<TwistorPencil, CliError> {
    Ok(TwistorPencil::from_config(&load(path)?)?)
}

fn family_order(family: Option<&PicZeroFamily>) -> Option<Order> {
    match family?.profile().ok()? {
        FamilyProfile::ConstantFinite(t) => Some(Order::Finite(t)),
        FamilyProfile::ConstantInfinite => Some(Order::Infinite),
        FamilyProfile::Nonconstant => None,
    }
}

fn to_zero_based(i: usize, what: &str) -> Result<usize, CliError> {
    i.checked_sub(1)
        .ok_or_else(|| CliError::Diagnostics(format!("{what} indices are 1-based, got 0")))
}

fn ok(r: Report, json: bool) -> Result<(i32, String), CliError> {
    Ok((EXIT_OK, r.render(json)))
}

fn dispatch(cmd: Command) -> Result<(i32, String), CliError> {
    match cmd {
        Command::Zariski(io) => zariski(&io),
        Command::Classify(io) => classify(&io),
        Command::Blowup {
            io,
            node,
            component,
            smooth,
            drop_reality,
        } => blowup(&io, node, component, smooth, drop_reality),
        Command::Blowdown {
            io,
            component,
            drop_reality,
        } => blowdown(&io, component, drop_reality),
        Command::Contract(io) => contract(&io),
        Command::Fibers(io) => fibers(&io),
        Command::Intnums { io, rho, r } => intnums(&io, r, rho),
        Command::Fixed { io, rho, r } => fixed(&io, r, rho),
        Command::Pluri { io, r, nu } => pluri(&io, r, nu),
        Command::Adim(io) => adim(&io),
        Command::OracleCheck {
            file,
            seed,
            count,
            json,
        } => oracle_check(file.as_deref(), seed, count, json),
        Command::Fixtures { seed, count, json } => fixtures(seed, count, json),
    }
}

fn zariski(io: &FileArgs) -> Result<(i32, String), CliError> {
    let (file, c) = load_cycle(&io.file)?;
    let z = cycles::zariski_decompose::<Rational>(&c)?;
    let order = family_order(file.family.as_ref());
    let mut r = Report::new();
    r.insert("config", report::config(&c));
    r.insert("ambient_n", c.ambient_n().map_or(Value::Null, Value::from));
    r.insert(
        "definiteness",
        qform::classify::<Rational>(&c.intersection_matrix()).as_str(),
    );
    report::add_decomposition(&mut r, &z);
    if let Ok((m0, _)) = z.m0_coefficients() {
        let m0n = z.n_part.scaled(&Rational::from_integer(m0));
        r.insert("fixed_part_of_m0C", report::divisor(&m0n));
    }
    r.insert(
        "kodaira",
        cycles::classify_from_decomposition(&z, order.as_ref()).as_str(),
    );
    ok(r, io.json)
}

fn classify(io: &FileArgs) -> Result<(i32, String), CliError> {
    let (file, c) = load_cycle(&io.file)?;
    let z = cycles::zariski_decompose::<Rational>(&c)?;
    let order = family_order(file.family.as_ref());
    let kodaira = cycles::classify_from_decomposition(&z, order.as_ref());
    let mut r = Report::new();
    r.insert("kodaira", kodaira.as_str());
    r.insert("value", kodaira.value().map_or(Value::Null, Value::from));
    r.insert("d", report::rational(&z.d));
    r.insert("p_is_zero", z.p_is_zero());
    r.insert("order", order.map_or(Value::Null, |o| Value::from(o.to_string())));
    ok(r, io.json)
}

fn blowup(
    io: &FileArgs,
    node: Option<usize>,
    component: Option<usize>,
    smooth: bool,
    drop_reality: bool,
) -> Result<(i32, String), CliError> {
    let (_, c) = load_cycle(&io.file)?;
    let mut r = Report::new();
    r.insert("before", report::config(&c));
    if smooth {
        let i = to_zero_based(component.expect("clap enforces --component"), "component")?;
        let after = birational::blow_up_smooth(&c, i)?;
        let z = cycles::zariski_decompose::<Rational>(&after)?;
        r.insert("operation", format!("blow_up_smooth({})", i + 1));
        r.insert("after", report::config(&after));
        r.insert("p_is_zero", z.p_is_zero());
        return ok(r, io.json);
    }
    let Some(node) = node else {
        return Err(CliError::Diagnostics(
            "blowup needs --node or --smooth --component".into(),
        ));
    };
    let node = to_zero_based(node, "node")?;
    let up = if c.is_real() && !drop_reality {
        r.insert("operation", format!("blow_up_node_pair({})", node + 1));
        birational::blow_up_node_pair(&c, node)?
    } else {
        r.insert("operation", format!("blow_up_node({})", node + 1));
        birational::blow_up_node(&c, node, true)?
    };
    r.insert("after", report::config(&up.config));
    r.insert("inserted", report::one_based(&up.inserted));
    r.insert(
        "transported_l",
        up.transported_l.as_deref().map_or(Value::Null, report::integers),
    );
    ok(r, io.json)
}

fn blowdown(io: &FileArgs, component: usize, drop_reality: bool) -> Result<(i32, String), CliError> {
    let (_, c) = load_cycle(&io.file)?;
    let i = to_zero_based(component, "component")?;
    let mut r = Report::new();
    r.insert("before", report::config(&c));
    let after = if c.is_real() && !drop_reality {
        r.insert("operation", format!("blow_down_pair({})", i + 1));
        birational::blow_down_pair(&c, i)?
    } else {
        r.insert("operation", format!("blow_down({})", i + 1));
        birational::blow_down(&c, i, true)?
    };
    r.insert("after", report::config(&after));
    ok(r, io.json)
}

fn contract(io: &FileArgs) -> Result<(i32, String), CliError> {
    let (_, c) = load_cycle(&io.file)?;
    let mut r = Report::new();
    r.insert("before", report::config(&c));
    match birational::contract_to_nef_model(&c)? {
        Some((model, steps)) => {
            r.insert("found", true);
            r.insert("model", report::config(&model));
            r.insert(
                "steps",
                Value::Array(steps.iter().map(|s| Value::from(s.kind.to_string())).collect()),
            );
        }
        None => {
            r.insert("found", false);
            r.insert("model", Value::Null);
            r.insert("steps", Value::Array(Vec::new()));
        }
    }
    ok(r, io.json)
}

fn fibers(io: &FileArgs) -> Result<(i32, String), CliError> {
    let p = load_pencil(&io.file)?;
    let fibres = twistor::reducible_fibers(&p);
    let mut r = Report::new();
    r.insert("count", fibres.len());
    r.insert("fibers", serde_json::to_value(&fibres).expect("descriptors serialize"));
    ok(r, io.json)
}

fn intnums(io: &FileArgs, r_twist: i64, rho: i64) -> Result<(i32, String), CliError> {
    let p = load_pencil(&io.file)?;
    let model = twistor::build_resolved_model(&p)?;
    let degrees = twistor::m_class_intersections(&model, r_twist, rho);
    let mut r = Report::new();
    r.insert("r", r_twist);
    r.insert("rho", rho);
    r.insert("m0", report::integer(model.m0()));
    r.insert("l", report::integers(model.l()));
    for c in model.cycle() {
        r.insert(&c.to_string(), report::integer(&degrees[c]));
    }
    r.insert(&twistor::Curve::L.to_string(), "undetermined");
    let closed = twistor::closed_forms(&model, rho).iter().all(|(c, v)| &degrees[c] == v);
    r.insert("closed_forms_hold", closed);
    ok(r, io.json)
}

fn fixed(io: &FileArgs, r_twist: i64, rho: i64) -> Result<(i32, String), CliError> {
    let p = load_pencil(&io.file)?;
    let model = twistor::build_resolved_model(&p)?;
    let d = twistor::prove_e_fixed(&model, r_twist, rho);
    let mut r = Report::new();
    if let Value::Object(map) = report::derivation(&d) {
        for (k, v) in map {
            r.insert(&k, v);
        }
    }
    ok(r, io.json)
}

fn pluri(io: &FileArgs, r_twist: i64, nu: i64) -> Result<(i32, String), CliError> {
    let p = load_pencil(&io.file)?;
    let dim = twistor::pluri_system_dim(&p, r_twist, nu)?;
    let mut r = Report::new();
    r.insert("r", r_twist);
    r.insert("nu", nu);
    r.insert("dimension", dim);
    ok(r, io.json)
}

fn adim(io: &FileArgs) -> Result<(i32, String), CliError> {
    let p = load_pencil(&io.file)?;
    let a = twistor::algebraic_dimension(&p)?;
    let code = if a.verdict == Verdict::Inconsistent {
        EXIT_INCONSISTENT
    } else {
        EXIT_OK
    };
    Ok((code, report::adim(&a, p.n()).render(io.json)))
}

fn oracle_check(file: Option<&Path>, seed: u64, count: usize, json: bool) -> Result<(i32, String), CliError> {
    let mut inputs: Vec<(String, CycleConfig)> = match file {
        Some(path) => vec![(path.display().to_string(), load_cycle(path)?.1)],
        None => corpus(seed, count, count),
    };
    inputs.sort_by(|a, b| a.0.cmp(&b.0));
    let mut mismatches = Vec::new();
    let mut skipped = Vec::new();
    for (name, c) in &inputs {
        if c.m() > cycles::ORACLE_LIMIT {
            skipped.push(Value::from(name.as_str()));
            continue;
        }
        let greedy = cycles::zariski_decompose::<Rational>(c);
        let oracle = cycles::zariski_oracle(c);
        match (greedy, oracle) {
            (Ok(g), Ok(o)) if g == o => {}
            (g, o) => mismatches.push(json!({
                "name": name,
                "greedy": g.map(|z| z.p.to_string()).unwrap_or_else(|e| e.to_string()),
                "oracle": o.map(|z| z.p.to_string()).unwrap_or_else(|e| e.to_string()),
            })),
        }
    }
    let mut r = Report::new();
    r.insert("checked", inputs.len() - skipped.len());
    r.insert("agree", mismatches.is_empty());
    r.insert("skipped", Value::Array(skipped));
    let code = if mismatches.is_empty() { EXIT_OK } else { EXIT_FAILURE };
    r.insert("mismatches", Value::Array(mismatches));
    Ok((code, r.render(json)))
}

fn fixtures(seed: u64, count: usize, json: bool) -> Result<(i32, String), CliError> {
    let generated = generate_fixtures(seed, count);
    if !json {
        return Ok((EXIT_OK, render_fixtures(&generated)));
    }
    let items: Vec<Value> = generated
        .iter()
        .map(|g| {
            let c = match &g.file.base {
                BaseSpec::Cycle(c) => report::config(c),
                BaseSpec::Elliptic { .. } => Value::Null,
            };
            json!({ "name": g.name, "config": c, "text": g.file.render() })
        })
        .collect();
    let mut r = Report::new();
    r.insert("seed", seed);
    r.insert("fixtures", Value::Array(items));
    ok(r, true)
}
