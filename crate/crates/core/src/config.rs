//! Experiment description and its line-oriented text format.
//!
//! ```text
//! # 17-arm triangle
//! horizon = 10000
//! runs = 50
//! seed = 7
//! checkpoints = 1000, 10000      # optional; log-spaced by default
//!
//! [environment]
//! kind = stationary              # stationary | moving_triangle | continuous_triangle
//! graph = line(17)               # or: edges = [[1,2],[2,3]] with arms = 3
//! means = 0.1, 0.2, 0.3
//!
//! [policy]
//! name = osub
//! c = 3
//! ```
//!
//! Arms are numbered from 1 in this format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{BanditError, Result};
use crate::graph::UnimodalGraph;
use crate::policy::PolicyKind;

/// Default number of independent runs averaged per policy.
pub const DEFAULT_RUNS: u64 = 50;
pub const DEFAULT_C: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Line(usize),
    /// 1-based edge list over `arms` arms.
    Edges { arms: usize, edges: Vec<(usize, usize)> },
}

impl GraphSpec {
    pub fn build(&self) -> Result<UnimodalGraph> {
        match self {
            GraphSpec::Line(k) => UnimodalGraph::line(*k),
            GraphSpec::Edges { arms, edges } => {
                let mut zero_based = Vec::with_capacity(edges.len());
                for &(a, b) in edges {
                    if a == 0 || b == 0 {
                        return Err(BanditError::Config("arm numbers start at 1".into()));
                    }
                    zero_based.push((a - 1, b - 1));
                }
                UnimodalGraph::from_edges(*arms, &zero_based)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    Stationary { graph: GraphSpec, means: Vec<f64> },
    MovingTriangle { arms: usize, sigma: f64 },
    /// Piecewise-linear mean through `knots`; `None` is the symmetric triangle.
    ContinuousTriangle { knots: Option<Vec<(f64, f64)>> },
}

impl EnvSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EnvSpec::Stationary { .. } => "stationary",
            EnvSpec::MovingTriangle { .. } => "moving_triangle",
            EnvSpec::ContinuousTriangle { .. } => "continuous_triangle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub c: Option<f64>,
    /// UCB exploration coefficient.
    pub rho: Option<f64>,
    pub tau: Option<u64>,
    pub alpha: Option<f64>,
    /// Name used in result tables; defaults to the policy name.
    pub label: Option<String>,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            c: None,
            rho: None,
            tau: None,
            alpha: None,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.name().to_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub environment: EnvSpec,
    pub policies: Vec<PolicySpec>,
    pub horizon: u64,
    pub checkpoints: Vec<u64>,
    pub runs: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

/// `ceil(10^(j/4))` for `j >= 1` up to `horizon`, plus `horizon` itself.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..)
        .map(|j| {
            let v = 10f64.powf(j as f64 / 4.0);
            // exact powers of ten must not round up past themselves
            let v = if (v - v.round()).abs() < 1e-9 { v.round() } else { v.ceil() };
            v as u64
        })
        .take_while(|&cp| cp < horizon)
        .collect();
    out.dedup();
    if horizon >= 1 {
        out.push(horizon);
    }
    out
}

impl ExperimentConfig {
    pub fn new(environment: EnvSpec, policies: Vec<PolicySpec>, horizon: u64) -> Self {
        Self {
            environment,
            policies,
            horizon,
            checkpoints: default_checkpoints(horizon),
            runs: DEFAULT_RUNS,
            seed: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(BanditError::Config("horizon must be >= 1".into()));
        }
        if self.runs < 1 {
            return Err(BanditError::Config("runs must be >= 1".into()));
        }
        if self.policies.is_empty() {
            return Err(BanditError::Config("no [policy] blocks".into()));
        }
        if self.checkpoints.is_empty() {
            return Err(BanditError::Config("no checkpoints".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BanditError::Config("checkpoints must be strictly increasing".into()));
        }
        if self.checkpoints[0] < 1 || *self.checkpoints.last().unwrap() > self.horizon {
            return Err(BanditError::Config(format!(
                "checkpoints must lie in 1..={}",
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                BanditError::Config(format!("config not found: {}", path.display()))
            } else {
                BanditError::Io(format!("{}: {e}", path.display()))
            }
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::default().parse(text)
    }

    /// Renders the config in the text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "horizon = {}", self.horizon);
        let _ = writeln!(s, "runs = {}", self.runs);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "checkpoints = {}", join(&self.checkpoints));
        if let Some(out) = &self.output {
            let _ = writeln!(s, "out = {}", out.display());
        }
        let _ = writeln!(s, "\n[environment]\nkind = {}", self.environment.kind_name());
        match &self.environment {
            EnvSpec::Stationary { graph, means } => {
                match graph {
                    GraphSpec::Line(k) => {
                        let _ = writeln!(s, "graph = line({k})");
                    }
                    GraphSpec::Edges { arms, edges } => {
                        let list: Vec<String> = edges.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
                        let _ = writeln!(s, "arms = {arms}\nedges = [{}]", list.join(","));
                    }
                }
                let _ = writeln!(s, "means = {}", join(means));
            }
            EnvSpec::MovingTriangle { arms, sigma } => {
                let _ = writeln!(s, "arms = {arms}\nsigma = {sigma}");
            }
            EnvSpec::ContinuousTriangle { knots } => {
                if let Some(knots) = knots {
                    let list: Vec<String> = knots.iter().map(|(x, y)| format!("{x}:{y}")).collect();
                    let _ = writeln!(s, "knots = {}", list.join(", "));
                }
            }
        }
        for p in &self.policies {
            let _ = writeln!(s, "\n[policy]\nname = {}", p.kind);
            if let Some(c) = p.c {
                let _ = writeln!(s, "c = {c}");
            }
            if let Some(rho) = p.rho {
                let _ = writeln!(s, "rho = {rho}");
            }
            if let Some(tau) = p.tau {
                let _ = writeln!(s, "tau = {tau}");
            }
            if let Some(alpha) = p.alpha {
                let _ = writeln!(s, "alpha = {alpha}");
            }
            if let Some(label) = &p.label {
                let _ = writeln!(s, "label = {label}");
            }
        }
        s
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Environment,
    Policy,
}

#[derive(Default)]
struct EnvFields {
    kind: Option<String>,
    graph: Option<GraphSpec>,
    arms: Option<usize>,
    edges: Option<Vec<(usize, usize)>>,
    means: Option<Vec<f64>>,
    sigma: Option<f64>,
    knots: Option<Vec<(f64, f64)>>,
}

#[derive(Default)]
struct Parser {
    horizon: Option<u64>,
    runs: Option<u64>,
    seed: Option<u64>,
    checkpoints: Option<Vec<u64>>,
    output: Option<PathBuf>,
    env: EnvFields,
    env_seen: bool,
    policies: Vec<(usize, PartialPolicy)>,
}

#[derive(Default)]
struct PartialPolicy {
    name: Option<PolicyKind>,
    c: Option<f64>,
    rho: Option<f64>,
    tau: Option<u64>,
    alpha: Option<f64>,
    label: Option<String>,
}

fn at(line: usize, msg: impl std::fmt::Display) -> BanditError {
    BanditError::Config(format!("line {line}: {msg}"))
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| at(line, format!("invalid value '{value}' for '{key}'")))
}

fn list<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(line, key, s))
        .collect()
}

fn parse_edges(line: usize, value: &str) -> Result<Vec<(usize, usize)>> {
    let compact: String = value.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| at(line, "edges must look like [[1,2],[2,3]]"))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let inner = inner
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| at(line, "edges must look like [[1,2],[2,3]]"))?;
    inner
        .split("],[")
        .map(|pair| {
            let ends: Vec<usize> = list(line, "edges", pair)?;
            match ends[..] {
                [a, b] => Ok((a, b)),
                _ => Err(at(line, format!("edge '[{pair}]' needs two arms"))),
            }
        })
        .collect()
}

fn parse_graph(line: usize, value: &str) -> Result<GraphSpec> {
    let v = value.trim();
    let k = v
        .strip_prefix("line(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| at(line, format!("unknown graph '{v}'; use line(K) or an edges list")))?;
    Ok(GraphSpec::Line(num(line, "graph", k)?))
}

fn parse_knots(line: usize, value: &str) -> Result<Vec<(f64, f64)>> {
    value
        .split(',')
        .map(|pair| {
            let (x, y) = pair
                .split_once(':')
                .ok_or_else(|| at(line, format!("knot '{pair}' must be x:y")))?;
            Ok((num(line, "knots", x)?, num(line, "knots", y)?))
        })
        .collect()
}

impl Parser {
    fn parse(mut self, text: &str) -> Result<ExperimentConfig> {
        let mut section = Section::Top;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') && content.ends_with(']') && !content.contains('=') {
                section = match &content[1..content.len() - 1] {
                    "environment" => {
                        if self.env_seen {
                            return Err(at(line, "duplicate [environment] block"));
                        }
                        self.env_seen = true;
                        Section::Environment
                    }
                    "policy" => {
                        self.policies.push((line, PartialPolicy::default()));
                        Section::Policy
                    }
                    other => return Err(at(line, format!("unknown section [{other}]"))),
                };
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| at(line, format!("expected key = value, got '{content}'")))?;
            self.assign(section, line, key.trim(), value.trim())?;
        }
        self.finish()
    }

    fn assign(&mut self, section: Section, line: usize, key: &str, value: &str) -> Result<()> {
        match section {
            Section::Top => match key {
                "horizon" => self.horizon = Some(num(line, key, value)?),
                "runs" => self.runs = Some(num(line, key, value)?),
                "seed" => self.seed = Some(num(line, key, value)?),
                "checkpoints" => self.checkpoints = Some(list(line, key, value)?),
                "out" => self.output = Some(PathBuf::from(value)),
                _ => return Err(at(line, format!("unknown key '{key}'"))),
            },
            Section::Environment => {
                let env = &mut self.env;
                match key {
                    "kind" => env.kind = Some(value.to_owned()),
                    "graph" => env.graph = Some(parse_graph(line, value)?),
                    "arms" => env.arms = Some(num(line, key, value)?),
                    "edges" => env.edges = Some(parse_edges(line, value)?),
                    "means" => env.means = Some(list(line, key, value)?),
                    "sigma" => env.sigma = Some(num(line, key, value)?),
                    "knots" => env.knots = Some(parse_knots(line, value)?),
                    _ => return Err(at(line, format!("unknown key '{key}' in [environment]"))),
                }
            }
            Section::Policy => {
                let p = &mut self.policies.last_mut().expect("inside a policy block").1;
                match key {
                    "name" => p.name = Some(value.parse().map_err(|e: BanditError| at(line, e))?),
                    "c" => p.c = Some(num(line, key, value)?),
                    "rho" => p.rho = Some(num(line, key, value)?),
                    "tau" => p.tau = Some(num(line, key, value)?),
                    "alpha" => p.alpha = Some(num(line, key, value)?),
                    "label" => p.label = Some(value.to_owned()),
                    _ => return Err(at(line, format!("unknown key '{key}' in [policy]"))),
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<ExperimentConfig> {
        let horizon = self
            .horizon
            .ok_or_else(|| BanditError::Config("missing 'horizon'".into()))?;
        if !self.env_seen {
            return Err(BanditError::Config("missing [environment] block".into()));
        }
        let environment = self.env.build()?;
        let policies = self
            .policies
            .into_iter()
            .map(|(line, p)| {
                Ok(PolicySpec {
                    kind: p.name.ok_or_else(|| at(line, "[policy] block without 'name'"))?,
                    c: p.c,
                    rho: p.rho,
                    tau: p.tau,
                    alpha: p.alpha,
                    label: p.label,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = ExperimentConfig {
            environment,
            policies,
            horizon,
            checkpoints: self.checkpoints.unwrap_or_else(|| default_checkpoints(horizon)),
            runs: self.runs.unwrap_or(DEFAULT_RUNS),
            seed: self.seed.unwrap_or(0),
            output: self.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl EnvFields {
    fn build(self) -> Result<EnvSpec> {
        let missing = |k: &str| BanditError::Config(format!("[environment] missing '{k}'"));
        let kind = self.kind.ok_or_else(|| missing("kind"))?;
        match kind.as_str() {
            "stationary" => {
                let graph = match (self.graph, self.edges) {
                    (Some(_), Some(_)) => {
                        return Err(BanditError::Config(
                            "[environment] give either 'graph' or 'edges', not both".into(),
                        ))
                    }
                    (Some(g), None) => g,
                    (None, Some(edges)) => GraphSpec::Edges {
                        arms: self.arms.ok_or_else(|| missing("arms"))?,
                        edges,
                    },
                    (None, None) => return Err(missing("graph")),
                };
                let means = self.means.ok_or_else(|| missing("means"))?;
                Ok(EnvSpec::Stationary { graph, means })
            }
            "moving_triangle" => Ok(EnvSpec::MovingTriangle {
                arms: self.arms.ok_or_else(|| missing("arms"))?,
                sigma: self.sigma.ok_or_else(|| missing("sigma"))?,
            }),
            "continuous_triangle" => Ok(EnvSpec::ContinuousTriangle { knots: self.knots }),
            other => Err(BanditError::Config(format!(
                "unknown environment kind '{other}'; expected stationary, moving_triangle or continuous_triangle"
            ))),
        }
    }
}
