//! Benchmark grid configuration.
//!
//! A line-oriented `key = value` file. `#` starts a comment.
//!
//! ```text
//! procedures = insertion swap2 opt2     # default: all three
//! backends   = matrix indirect delta    # default: all three
//! seeds      = 1..10                    # inclusive range or a list; default 1..10
//! repetitions = 1
//!
//! set = small                           # starts a new instance set
//! instance = example6.txt                 # relative to the config file
//! generate = 40 40 0.2 7                # rows cols density seed
//! generate = 400 400 0.05 1 x3          # three instances, seeds 1, 2, 3
//! ```
//!
//! `instance` and `generate` lines before any `set` line go to a set named
//! `default`.

use std::path::{Path, PathBuf};

use colperm_core::search::{Backend, Procedure};
use colperm_core::Instance;
use thiserror::Error;

use crate::format::{self, FileError};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Instance(#[from] FileError),
    #[error("cannot read grid file {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    File(PathBuf),
    Generated {
        rows: usize,
        cols: usize,
        density: f64,
        seed: u64,
    },
}

impl InstanceSpec {
    pub fn id(&self) -> String {
        match self {
            InstanceSpec::File(p) => p
                .file_stem()
                .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()),
            InstanceSpec::Generated {
                rows,
                cols,
                density,
                seed,
            } => format!("gen-{rows}x{cols}-d{density}-s{seed}"),
        }
    }

    pub fn load(&self) -> Result<Instance, FileError> {
        match self {
            InstanceSpec::File(p) => format::read_instance(p),
            &InstanceSpec::Generated {
                rows,
                cols,
                density,
                seed,
            } => Ok(Instance::generate(rows, cols, density, seed)),
        }
    }

    /// CLI arguments selecting this instance.
    pub fn cli_args(&self) -> String {
        match self {
            InstanceSpec::File(p) => format!("--instance {}", p.display()),
            InstanceSpec::Generated {
                rows,
                cols,
                density,
                seed,
            } => format!("--gen {rows},{cols},{density},{seed}"),
        }
    }

    /// Parses `rows,cols,density,seed`.
    pub fn parse_generated(s: &str) -> Option<Self> {
        let parts: Vec<&str> = s.split([',', ' ']).filter(|p| !p.is_empty()).collect();
        let [r, c, d, seed] = parts[..] else {
            return None;
        };
        let density: f64 = d.parse().ok()?;
        if !(0.0..=1.0).contains(&density) {
            return None;
        }
        Some(InstanceSpec::Generated {
            rows: r.parse().ok().filter(|&v| v > 0)?,
            cols: c.parse().ok().filter(|&v| v > 0)?,
            density,
            seed: seed.parse().ok()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSet {
    pub name: String,
    pub instances: Vec<InstanceSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub sets: Vec<InstanceSet>,
    pub procedures: Vec<Procedure>,
    pub backends: Vec<Backend>,
    pub seeds: Vec<u64>,
    pub repetitions: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            sets: Vec::new(),
            procedures: Procedure::ALL.to_vec(),
            backends: Backend::ALL.to_vec(),
            seeds: (1..=10).collect(),
            repetitions: 1,
        }
    }
}

impl GridConfig {
    pub fn read(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| GridError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, GridError> {
        let mut cfg = GridConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| GridError::Syntax { line, msg };
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected `key = value`".into()))?;
            match key {
                "set" => cfg.sets.push(InstanceSet {
                    name: value.to_owned(),
                    instances: Vec::new(),
                }),
                "instance" => {
                    let p = Path::new(value);
                    let p = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
                    cfg.current_set().instances.push(InstanceSpec::File(p));
                }
                "generate" => {
                    let (spec, count) = match value.rsplit_once(" x") {
                        Some((head, n)) => (head, n.trim().parse::<u64>().map_err(|e| err(e.to_string()))?),
                        None => (value, 1),
                    };
                    let Some(InstanceSpec::Generated {
                        rows,
                        cols,
                        density,
                        seed,
                    }) = InstanceSpec::parse_generated(spec)
                    else {
                        return Err(err("expected `rows cols density seed [xCOUNT]`".into()));
                    };
                    for k in 0..count {
                        cfg.current_set().instances.push(InstanceSpec::Generated {
                            rows,
                            cols,
                            density,
                            seed: seed + k,
                        });
                    }
                }
                "procedures" => {
                    cfg.procedures = parse_list(value).map_err(err)?;
                }
                "backends" => {
                    cfg.backends = parse_list(value).map_err(err)?;
                }
                "seeds" => cfg.seeds = parse_seeds(value).ok_or_else(|| err("bad seed list".into()))?,
                "repetitions" => {
                    cfg.repetitions = value
                        .parse()
                        .ok()
                        .filter(|&r| r > 0)
                        .ok_or_else(|| err("repetitions must be a positive integer".into()))?
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        Ok(cfg)
    }

    fn current_set(&mut self) -> &mut InstanceSet {
        if self.sets.is_empty() {
            self.sets.push(InstanceSet {
                name: "default".into(),
                instances: Vec::new(),
            });
        }
        self.sets.last_mut().unwrap()
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    value
        .split([' ', ','])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_seeds(value: &str) -> Option<Vec<u64>> {
    if let Some((a, b)) = value.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (a <= b).then(|| (a..=b).collect());
    }
    value
        .split([' ', ','])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().ok())
        .collect()
}
