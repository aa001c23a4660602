//! Experiment configuration files.
//!
//! Line-based format: `[section]` headers, `key = value` pairs, `#` comments.
//! Lists are comma separated. Unknown sections and keys are rejected; a
//! repeated key keeps its last value and records a warning.
//!
//! ```text
//! [model]
//! c2 = 1
//! delta = 0.1
//! tau = 0.01
//! k = 1
//! beta = 0
//!
//! [signal]
//! amplitude = 0.5
//! omega = 4
//! power = 5
//! decay = 1
//!
//! [discretization]
//! dt = 0.01
//! t_final = 2
//! n_modes = 16
//!
//! [experiment]
//! variant = full
//! bc = neumann
//! tau_sweep = 1e-1, 1e-2, 1e-3
//! ```

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::integrate::BoundaryMode;
use crate::model::{default_eval_grid, default_quad_points, ModelParams, SolverConfig, WindowedSignal};
use crate::nonlinear::NonlinearVariant;

pub const DEFAULT_MMS_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub signal: WindowedSignal,
    pub solver: SolverConfig,
    pub length: f64,
    pub variant: NonlinearVariant,
    pub bc: BoundaryMode,
    pub tau_sweep: Vec<f64>,
    /// Number of successive `dt` halvings in the manufactured-solution study.
    pub mms_levels: usize,
    pub output: Option<PathBuf>,
}

/// One problem found while reading a config; `line` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(k) = &self.key {
            write!(f, "`{k}`: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["c2", "delta", "tau", "k", "beta"]),
    ("signal", &["amplitude", "omega", "power", "decay", "cutoff"]),
    (
        "discretization",
        &[
            "dt",
            "t_final",
            "n_modes",
            "quad_points",
            "picard_tol",
            "picard_max",
            "eval_grid",
            "length",
        ],
    ),
    ("experiment", &["variant", "bc", "tau_sweep", "mms_levels", "output"]),
];

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
}

struct Reader {
    entries: HashMap<(String, String), Entry>,
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn issue(&mut self, line: Option<usize>, key: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            line,
            key: Some(key.to_string()),
            message: message.into(),
        });
    }

    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(|e| e.line)
    }

    fn raw(&self, section: &str, key: &str) -> Option<(String, usize)> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(|e| (e.value.clone(), e.line))
    }

    fn parse<T: std::str::FromStr>(&mut self, section: &str, key: &str, kind: &str) -> Option<T> {
        let (value, line) = self.raw(section, key)?;
        match value.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.issue(Some(line), key, format!("expected {kind}, got `{value}`"));
                None
            }
        }
    }

    fn required<T: std::str::FromStr>(&mut self, section: &str, key: &str, kind: &str) -> Option<T> {
        if self.raw(section, key).is_none() {
            self.issue(None, key, format!("missing required key in [{section}]"));
            return None;
        }
        self.parse(section, key, kind)
    }

    fn float(&mut self, section: &str, key: &str) -> Option<f64> {
        self.required(section, key, "a number")
    }

    /// Reports a constructor failure against the key it names.
    fn constraint(&mut self, section: &str, err: Error) {
        match err {
            Error::InvalidParameter { name, rule, value } => {
                let line = self.line_of(section, name);
                self.issue(line, name, format!("must be {rule} (got {value})"));
            }
            other => self.issues.push(ConfigIssue {
                line: None,
                key: None,
                message: other.to_string(),
            }),
        }
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<ParsedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        issues: vec![ConfigIssue {
            line: None,
            key: None,
            message: format!("cannot read {}: {e}", path.display()),
        }],
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ParsedConfig, ConfigError> {
    let mut r = Reader {
        entries: HashMap::new(),
        issues: Vec::new(),
    };
    let mut warnings = Vec::new();
    let mut section: Option<&'static str> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            match SECTIONS.iter().find(|(s, _)| *s == name) {
                Some((s, _)) => section = Some(s),
                None => {
                    r.issues.push(ConfigIssue {
                        line: Some(line),
                        key: None,
                        message: format!("unknown section [{name}]"),
                    });
                    section = None;
                }
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            r.issues.push(ConfigIssue {
                line: Some(line),
                key: None,
                message: format!("expected `key = value`, got `{content}`"),
            });
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section else {
            r.issue(Some(line), key, "key outside a known section");
            continue;
        };
        let allowed = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            r.issue(Some(line), key, format!("unknown key in [{sec}]"));
            continue;
        }
        let slot = (sec.to_string(), key.to_string());
        if let Some(prev) = r.entries.get(&slot) {
            warnings.push(format!(
                "line {line}: `{key}` repeats line {}; last value wins",
                prev.line
            ));
        }
        r.entries.insert(
            slot,
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }

    let c2 = r.float("model", "c2");
    let delta = r.float("model", "delta");
    let tau = r.float("model", "tau");
    let k = r.float("model", "k");
    let beta = r.float("model", "beta");
    let model = match (c2, delta, tau, k, beta) {
        (Some(c2), Some(d), Some(t), Some(k), Some(b)) => ModelParams::new(c2, d, t, k, b)
            .map_err(|e| r.constraint("model", e))
            .ok(),
        _ => None,
    };

    let amplitude = r.float("signal", "amplitude");
    let omega = r.float("signal", "omega");
    let power = r.required::<u32>("signal", "power", "a non-negative integer");
    let decay = r.float("signal", "decay");
    let cutoff = r.parse::<f64>("signal", "cutoff", "a number");
    let signal = match (amplitude, omega, power, decay) {
        (Some(a), Some(o), Some(p), Some(d)) => WindowedSignal::new(a, o, p, d)
            .and_then(|s| match cutoff {
                Some(c) => s.with_cutoff(c),
                None => Ok(s),
            })
            .map_err(|e| r.constraint("signal", e))
            .ok(),
        _ => None,
    };

    let dt = r.float("discretization", "dt");
    let t_final = r.float("discretization", "t_final");
    let n_modes = r.required::<usize>("discretization", "n_modes", "a positive integer");
    let quad = r.parse::<usize>("discretization", "quad_points", "a positive integer");
    let tol = r.parse::<f64>("discretization", "picard_tol", "a number");
    let pmax = r.parse::<usize>("discretization", "picard_max", "a positive integer");
    let grid = r.parse::<usize>("discretization", "eval_grid", "a positive integer");
    let length = r
        .parse::<f64>("discretization", "length", "a number")
        .unwrap_or(std::f64::consts::PI);
    if !(length.is_finite() && length > 0.0) {
        let line = r.line_of("discretization", "length");
        r.issue(line, "length", format!("must be > 0 (got {length})"));
    }
    let solver = match (dt, t_final, n_modes) {
        (Some(dt), Some(tf), Some(n)) => {
            let cfg = SolverConfig {
                dt,
                t_final: tf,
                n_modes: n,
                quad_points: quad.unwrap_or(default_quad_points(n)),
                picard_tol: tol.unwrap_or(1e-10),
                picard_max: pmax.unwrap_or(50),
                eval_grid: grid.unwrap_or(default_eval_grid(n)),
            };
            cfg.validate()
                .map(|_| cfg)
                .map_err(|e| r.constraint("discretization", e))
                .ok()
        }
        _ => None,
    };

    let variant = match r.raw("experiment", "variant") {
        None => Some(NonlinearVariant::FullJmgt),
        Some((v, line)) => v.parse().map_err(|e: String| r.issue(Some(line), "variant", e)).ok(),
    };
    let bc = match r.raw("experiment", "bc") {
        None => Some(BoundaryMode::PureNeumann),
        Some((v, line)) => v.parse().map_err(|e: String| r.issue(Some(line), "bc", e)).ok(),
    };
    let tau_sweep = match r.raw("experiment", "tau_sweep") {
        None => Vec::new(),
        Some((v, line)) => {
            let items: Result<Vec<f64>, _> = v.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match items {
                Err(_) => {
                    r.issue(
                        Some(line),
                        "tau_sweep",
                        format!("expected a comma-separated list of numbers, got `{v}`"),
                    );
                    Vec::new()
                }
                Ok(list) => {
                    if list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                        r.issue(Some(line), "tau_sweep", "entries must be > 0");
                    } else if list.windows(2).any(|w| w[1] >= w[0]) {
                        r.issue(Some(line), "tau_sweep", "entries must be strictly decreasing");
                    }
                    list
                }
            }
        }
    };
    let mms_levels = r
        .parse::<usize>("experiment", "mms_levels", "a positive integer")
        .unwrap_or(DEFAULT_MMS_LEVELS);
    if mms_levels < 2 {
        let line = r.line_of("experiment", "mms_levels");
        r.issue(line, "mms_levels", "must be >= 2");
    }
    let output = r.raw("experiment", "output").map(|(v, _)| PathBuf::from(v));

    if !r.issues.is_empty() {
        r.issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
        return Err(ConfigError { issues: r.issues });
    }
    Ok(ParsedConfig {
        config: ExperimentConfig {
            model: model.expect("validated"),
            signal: signal.expect("validated"),
            solver: solver.expect("validated"),
            length,
            variant: variant.expect("validated"),
            bc: bc.expect("validated"),
            tau_sweep,
            mms_levels,
            output,
        },
        warnings,
    })
}

/// Serializes a config so that [`parse_config_str`] reproduces it exactly.
pub fn write_config(c: &ExperimentConfig) -> String {
    let mut s = String::new();
    let m = &c.model;
    let _ = writeln!(s, "[model]");
    let _ = writeln!(
        s,
        "c2 = {:?}\ndelta = {:?}\ntau = {:?}\nk = {:?}\nbeta = {:?}",
        m.c2(),
        m.delta(),
        m.tau(),
        m.k(),
        m.beta()
    );
    let g = &c.signal;
    let _ = writeln!(s, "\n[signal]");
    let _ = writeln!(
        s,
        "amplitude = {:?}\nomega = {:?}\npower = {}\ndecay = {:?}",
        g.amplitude, g.omega, g.power, g.decay
    );
    if let Some(tc) = g.cutoff {
        let _ = writeln!(s, "cutoff = {tc:?}");
    }
    let d = &c.solver;
    let _ = writeln!(s, "\n[discretization]");
    let _ = writeln!(
        s,
        "dt = {:?}\nt_final = {:?}\nn_modes = {}\nquad_points = {}\npicard_tol = {:?}\npicard_max = {}\neval_grid = {}\nlength = {:?}",
        d.dt, d.t_final, d.n_modes, d.quad_points, d.picard_tol, d.picard_max, d.eval_grid, c.length
    );
    let _ = writeln!(s, "\n[experiment]");
    let _ = writeln!(
        s,
        "variant = {}\nbc = {}\nmms_levels = {}",
        c.variant, c.bc, c.mms_levels
    );
    if !c.tau_sweep.is_empty() {
        let list: Vec<String> = c.tau_sweep.iter().map(|t| format!("{t:?}")).collect();
        let _ = writeln!(s, "tau_sweep = {}", list.join(", "));
    }
    if let Some(out) = &c.output {
        let _ = writeln!(s, "output = {}", out.display());
    }
    s
}
