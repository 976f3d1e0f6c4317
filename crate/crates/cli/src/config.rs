use std::fmt;
use std::path::{Path, PathBuf};

use bdflow::harness::{CaseId, DemoId};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "bdflow", version, about = "Coupled Brinkman-Darcy flow and transport solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Refinement study of a manufactured case.
    Convergence(Flags),
    /// Solve the flow problem once and dump the fields.
    SolveFlow(Flags),
    /// Solve a manufactured case including transport on one mesh.
    RunTransport(Flags),
    /// Run a groundwater demo (ex3 or ex4).
    Demo(Flags),
    /// Ingest and validate a mesh file.
    CheckMesh(Flags),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Convergence(_) => CommandKind::Convergence,
            Command::SolveFlow(_) => CommandKind::SolveFlow,
            Command::RunTransport(_) => CommandKind::RunTransport,
            Command::Demo(_) => CommandKind::Demo,
            Command::CheckMesh(_) => CommandKind::CheckMesh,
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Convergence(f)
            | Command::SolveFlow(f)
            | Command::RunTransport(f)
            | Command::Demo(f)
            | Command::CheckMesh(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Convergence,
    SolveFlow,
    RunTransport,
    Demo,
    CheckMesh,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Convergence => "convergence",
            CommandKind::SolveFlow => "solve-flow",
            CommandKind::RunTransport => "run-transport",
            CommandKind::Demo => "demo",
            CommandKind::CheckMesh => "check-mesh",
        }
    }

    /// Keys that mean something for this command.
    fn accepts(self, key: &str) -> bool {
        let common = ["out", "assert"];
        let flow = ["case", "k", "ladder", "epsilon", "alpha", "kdarcy", "mesh"];
        let time = ["kdiff", "dt", "tfinal"];
        common.contains(&key)
            || match self {
                CommandKind::Convergence => flow.contains(&key) || time.contains(&key),
                CommandKind::SolveFlow => flow.contains(&key),
                CommandKind::RunTransport | CommandKind::Demo => {
                    flow.contains(&key) || time.contains(&key) || key == "dump-stride"
                }
                CommandKind::CheckMesh => key == "mesh",
            }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Command-line flags. Every flag except `--config` has a config-file key of
/// the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ex1, ex2 (manufactured) or ex3, ex4 (demos).
    #[arg(long)]
    pub case: Option<String>,
    /// Primal mesh file.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Polynomial degree.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<i64>,
    /// Comma-separated values of 1/h.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub ladder: Option<Vec<i64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Diffusion coefficient K of the transport equation.
    #[arg(long, allow_negative_numbers = true)]
    pub kdiff: Option<f64>,
    /// Darcy permeability K_D.
    #[arg(long, allow_negative_numbers = true)]
    pub kdarcy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tfinal: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a field dump every this many steps (0: snapshots only).
    #[arg(long, allow_negative_numbers = true)]
    pub dump_stride: Option<i64>,
    /// Exit with status 5 if an acceptance check fails.
    #[arg(long)]
    pub assert: bool,
}

/// The config file. Field names are the flag names.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub case: Option<String>,
    pub mesh: Option<PathBuf>,
    pub k: Option<i64>,
    pub ladder: Option<Vec<i64>>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub kdiff: Option<f64>,
    pub kdarcy: Option<f64>,
    pub dt: Option<f64>,
    pub tfinal: Option<f64>,
    pub out: Option<PathBuf>,
    pub dump_stride: Option<i64>,
    pub assert: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let key = e.span().and_then(|span| key_at(text, span.start));
            let msg = e.message().trim().to_string();
            match key {
                Some(key) if !msg.contains(&format!("`{key}`")) => CliError::config(&key, msg),
                _ => CliError::Config(format!("config file: {msg}")),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config: cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Keys present in the file.
    fn keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut add = |present: bool, key| {
            if present {
                keys.push(key)
            }
        };
        add(self.case.is_some(), "case");
        add(self.mesh.is_some(), "mesh");
        add(self.k.is_some(), "k");
        add(self.ladder.is_some(), "ladder");
        add(self.epsilon.is_some(), "epsilon");
        add(self.alpha.is_some(), "alpha");
        add(self.kdiff.is_some(), "kdiff");
        add(self.kdarcy.is_some(), "kdarcy");
        add(self.dt.is_some(), "dt");
        add(self.tfinal.is_some(), "tfinal");
        add(self.out.is_some(), "out");
        add(self.dump_stride.is_some(), "dump-stride");
        add(self.assert.is_some(), "assert");
        keys
    }

    /// Flags override the file.
    fn overlay(self, f: &Flags) -> Self {
        Self {
            case: f.case.clone().or(self.case),
            mesh: f.mesh.clone().or(self.mesh),
            k: f.k.or(self.k),
            ladder: f.ladder.clone().or(self.ladder),
            epsilon: f.epsilon.or(self.epsilon),
            alpha: f.alpha.or(self.alpha),
            kdiff: f.kdiff.or(self.kdiff),
            kdarcy: f.kdarcy.or(self.kdarcy),
            dt: f.dt.or(self.dt),
            tfinal: f.tfinal.or(self.tfinal),
            out: f.out.clone().or(self.out),
            dump_stride: f.dump_stride.or(self.dump_stride),
            assert: if f.assert { Some(true) } else { self.assert },
        }
    }
}

/// The key on the line containing byte `pos`, if that line is `key = ...`.
fn key_at(text: &str, pos: usize) -> Option<String> {
    let start = text[..pos.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
    let line = text[start..].lines().next()?;
    let (key, _) = line.split_once('=')?;
    let key = key.trim().trim_matches('"');
    (!key.is_empty()).then(|| key.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Manufactured(CaseId),
    Demo(DemoId),
}

impl Case {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "ex1" => Some(Case::Manufactured(CaseId::Ex1)),
            "ex2" => Some(Case::Manufactured(CaseId::Ex2)),
            "ex3" => Some(Case::Demo(DemoId::Ex3)),
            "ex4" => Some(Case::Demo(DemoId::Ex4)),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Manufactured(c) => c.name(),
            Case::Demo(d) => d.name(),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub case: Option<Case>,
    pub mesh: Option<PathBuf>,
    pub k: usize,
    pub ladder: Vec<usize>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub kdiff: Option<f64>,
    pub kdarcy: Option<f64>,
    pub dt: f64,
    pub tfinal: f64,
    pub out: PathBuf,
    pub dump_stride: usize,
    pub assert: bool,
}

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_TFINAL: f64 = 0.1;
pub const DEFAULT_LADDER: [usize; 5] = [2, 4, 8, 16, 32];
pub const DEFAULT_LEVEL: usize = 16;

fn positive(key: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::config(key, format!("must be positive and finite, got {x}"))),
        _ => Ok(()),
    }
}

/// Merges the config file (if any) with the flags and validates the result.
pub fn parse_config(command: &Command) -> Result<RunConfig, CliError> {
    let flags = command.flags();
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    validate(command.kind(), file.overlay(flags))
}

pub fn validate(kind: CommandKind, opts: FileConfig) -> Result<RunConfig, CliError> {
    if let Some(key) = opts.keys().into_iter().find(|k| !kind.accepts(k)) {
        return Err(CliError::config(key, format!("not used by `{kind}`")));
    }

    let case = match opts.case.as_deref() {
        Some(s) => Some(Case::parse(s).ok_or_else(|| CliError::config("case", format!("unknown case `{s}` (expected ex1, ex2, ex3 or ex4)")))?),
        None => None,
    };
    match (kind, case) {
        (CommandKind::CheckMesh, _) => {}
        (_, None) => return Err(CliError::config("case", format!("required by `{kind}`"))),
        (CommandKind::Convergence | CommandKind::RunTransport, Some(Case::Demo(d))) => {
            return Err(CliError::config("case", format!("`{kind}` needs a manufactured case (ex1 or ex2), got {d}")))
        }
        (CommandKind::Demo, Some(Case::Manufactured(c))) => {
            return Err(CliError::config("case", format!("`demo` needs ex3 or ex4, got {c}")))
        }
        _ => {}
    }

    let needs_mesh = kind == CommandKind::CheckMesh || case == Some(Case::Demo(DemoId::Ex4));
    match (&opts.mesh, needs_mesh) {
        (None, true) => {
            let what = if kind == CommandKind::CheckMesh { "`check-mesh`".to_string() } else { "case ex4".to_string() };
            return Err(CliError::config("mesh", format!("required by {what}")));
        }
        (Some(_), false) => {
            let c = case.map_or("this case", |c| c.name());
            return Err(CliError::config("mesh", format!("not used by {c}; the mesh is generated")));
        }
        _ => {}
    }

    let k = opts.k.unwrap_or(1);
    if !(1..=3).contains(&k) {
        return Err(CliError::config("k", format!("must be 1, 2 or 3, got {k}")));
    }

    let single_level = kind != CommandKind::Convergence;
    if opts.ladder.is_some() && case == Some(Case::Demo(DemoId::Ex4)) {
        return Err(CliError::config("ladder", "not used by case ex4; the mesh is read from file"));
    }
    let ladder: Vec<usize> = match &opts.ladder {
        Some(l) => {
            if l.is_empty() {
                return Err(CliError::config("ladder", "must not be empty"));
            }
            if let Some(&n) = l.iter().find(|&&n| n < 2 || n % 2 != 0) {
                return Err(CliError::config("ladder", format!("entries are 1/h and must be even and at least 2, got {n}")));
            }
            if l.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::config("ladder", format!("must be increasing, got {l:?}")));
            }
            if single_level && l.len() != 1 {
                return Err(CliError::config("ladder", format!("`{kind}` solves one level; give a single entry, got {l:?}")));
            }
            l.iter().map(|&n| n as usize).collect()
        }
        None if single_level => vec![DEFAULT_LEVEL],
        None => DEFAULT_LADDER.to_vec(),
    };

    positive("epsilon", opts.epsilon)?;
    positive("kdiff", opts.kdiff)?;
    positive("kdarcy", opts.kdarcy)?;
    if let Some(a) = opts.alpha {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(CliError::config("alpha", format!("must be non-negative and finite, got {a}")));
        }
    }
    positive("dt", opts.dt)?;
    positive("tfinal", opts.tfinal)?;
    let dt = opts.dt.unwrap_or(DEFAULT_DT);
    let tfinal = opts.tfinal.unwrap_or(match case {
        Some(Case::Demo(DemoId::Ex3)) => 6.0,
        Some(Case::Demo(DemoId::Ex4)) => 20.0,
        _ => DEFAULT_TFINAL,
    });
    if tfinal < dt {
        return Err(CliError::config("tfinal", format!("must be at least dt = {dt}, got {tfinal}")));
    }
    let steps = tfinal / dt;
    if (steps - steps.round()).abs() > 0.01 {
        return Err(CliError::config("tfinal", format!("tfinal/dt = {steps} is not within 1% of an integer")));
    }

    let dump_stride = match opts.dump_stride {
        Some(s) if s < 0 => return Err(CliError::config("dump-stride", format!("must be non-negative, got {s}"))),
        Some(s) => s as usize,
        None => 0,
    };

    Ok(RunConfig {
        command: kind,
        case,
        mesh: opts.mesh,
        k: k as usize,
        ladder,
        epsilon: opts.epsilon,
        alpha: opts.alpha,
        kdiff: opts.kdiff,
        kdarcy: opts.kdarcy,
        dt,
        tfinal,
        out: opts.out.unwrap_or_else(|| PathBuf::from("out")),
        dump_stride,
        assert: opts.assert.unwrap_or(false),
    })
}
