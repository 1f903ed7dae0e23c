//! Experiment configuration.
//!
//! Configs are flat `key = value` text split into `[section]` blocks; `#`
//! starts a comment. Every experiment kind has built-in defaults, so a
//! config file only needs the keys it changes. A `[method.<name>]` section
//! in a file replaces the whole default method list with the sections in
//! that file, in file order.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use softqn::penalty::{EigenBounds, SoftQnPenaltyMode};
use softqn::problems::CUTEST_SUBSET;
use softqn::solver::{ArmijoParams, Budget, DirectionMethod, StepPolicy};
use softqn::{SoftQnPenaltyPolicy, SpBfgsPenaltyPolicy};

use crate::error::BenchError;

/// Minibatch size and sample count of the full ijcnn1 data; the default
/// batch keeps the same sampling fraction on smaller data sets.
pub const IJCNN1_BATCH: usize = 1000;
pub const IJCNN1_SAMPLES: usize = 49_990;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Logreg,
    Qp,
    Cutest,
    Toy,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Logreg => "logreg",
            ExperimentKind::Qp => "qp",
            ExperimentKind::Cutest => "cutest",
            ExperimentKind::Toy => "toy",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logreg" => Ok(Self::Logreg),
            "qp" => Ok(Self::Qp),
            "cutest" => Ok(Self::Cutest),
            "toy" => Ok(Self::Toy),
            other => Err(BenchError::Config(format!("unknown experiment {other:?}"))),
        }
    }
}

/// SP-BFGS penalty as configured. `StepNorm` with `per_eg` divides the
/// coefficient by the problem's gradient-noise radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSetting {
    Constant(f64),
    StepNorm { coeff: f64, floor: f64, per_eg: bool },
    Relaxed { beta: f64, relax: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSetting {
    SoftQn(SoftQnPenaltyPolicy),
    SpBfgs(BetaSetting),
    Bfgs,
    Sgd,
    Newton,
    SaddleFree,
}

impl MethodSetting {
    /// Solver method for a problem with gradient-noise radius `e_g`.
    pub fn resolve(&self, e_g: f64) -> DirectionMethod {
        match *self {
            MethodSetting::SoftQn(p) => DirectionMethod::SoftQN(p),
            MethodSetting::SpBfgs(b) => DirectionMethod::SPBFGS(match b {
                BetaSetting::Constant(v) => SpBfgsPenaltyPolicy::Constant(v),
                BetaSetting::StepNorm { coeff, floor, per_eg } => SpBfgsPenaltyPolicy::StepNormScaled {
                    coeff: if per_eg { coeff / e_g } else { coeff },
                    floor,
                },
                BetaSetting::Relaxed { beta, relax } => SpBfgsPenaltyPolicy::CurvatureRelaxed {
                    constant_beta: beta,
                    relax_factor: relax,
                },
            }),
            MethodSetting::Bfgs => DirectionMethod::StochasticBFGS,
            MethodSetting::Sgd => DirectionMethod::SGD,
            MethodSetting::Newton => DirectionMethod::NewtonExact,
            MethodSetting::SaddleFree => DirectionMethod::SaddleFreeNewton,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub name: String,
    pub setting: MethodSetting,
}

/// Step policy as configured. The Armijo noise allowance is the problem's
/// function-noise bound `e_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSetting {
    Fixed(f64),
    Diminishing(f64),
    Armijo { eta0: f64, c: f64, tau: f64, max_backtracks: usize },
}

impl StepSetting {
    pub fn resolve(&self, e_f: f64) -> StepPolicy {
        match *self {
            StepSetting::Fixed(v) => StepPolicy::Fixed(v),
            StepSetting::Diminishing(v) => StepPolicy::Diminishing(v),
            StepSetting::Armijo { eta0, c, tau, max_backtracks } => StepPolicy::ArmijoNoisy(ArmijoParams {
                eta0,
                c,
                tau,
                max_backtracks,
                eps_tol: e_f,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub trials: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub methods: Vec<MethodSpec>,
    pub step: StepSetting,
    pub budget: Budget,
    /// QP dimension.
    pub n: usize,
    /// Variance of the Gaussian gradient noise (qp).
    pub grad_noise: f64,
    /// Noise bounds relative to `|φ(x₀)|` and `‖∇φ(x₀)‖` (cutest).
    pub noise_rel: f64,
    pub problems: Vec<String>,
    pub dataset: Option<PathBuf>,
    pub rho: f64,
    /// Minibatch size; `None` scales the ijcnn1 fraction to the data set.
    pub batch: Option<usize>,
}

fn soft(alpha: f64) -> MethodSetting {
    MethodSetting::SoftQn(SoftQnPenaltyPolicy::constant(alpha))
}

fn spec(name: &str, setting: MethodSetting) -> MethodSpec {
    MethodSpec {
        name: name.to_string(),
        setting,
    }
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            kind,
            trials: 1,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            methods: Vec::new(),
            step: StepSetting::Fixed(0.1),
            budget: Budget::Iterations(100),
            n: 50,
            grad_noise: 1.0,
            noise_rel: 1e-4,
            problems: Vec::new(),
            dataset: None,
            rho: 0.1,
            batch: None,
        };
        match kind {
            ExperimentKind::Logreg => ExperimentConfig {
                trials: 10,
                step: StepSetting::Fixed(0.1),
                budget: Budget::Iterations(300),
                dataset: Some(PathBuf::from("crates/bench/fixtures/ijcnn1_synthetic.libsvm")),
                methods: vec![
                    spec("softqn", soft(0.5)),
                    spec(
                        "spbfgs",
                        MethodSetting::SpBfgs(BetaSetting::StepNorm {
                            coeff: 0.1,
                            floor: 1e-10,
                            per_eg: false,
                        }),
                    ),
                    spec("sgd", MethodSetting::Sgd),
                    spec("bfgs", MethodSetting::Bfgs),
                ],
                ..base
            },
            ExperimentKind::Qp => ExperimentConfig {
                trials: 20,
                step: StepSetting::Diminishing(1.0),
                budget: Budget::Iterations(1000),
                methods: vec![
                    spec("newton", MethodSetting::Newton),
                    spec("softqn", soft(1e-4)),
                    spec(
                        "spbfgs",
                        MethodSetting::SpBfgs(BetaSetting::Relaxed { beta: 1e-2, relax: 0.9 }),
                    ),
                    spec("sgd", MethodSetting::Sgd),
                    spec("bfgs", MethodSetting::Bfgs),
                ],
                ..base
            },
            ExperimentKind::Cutest => ExperimentConfig {
                trials: 30,
                step: StepSetting::Armijo {
                    eta0: 1.0,
                    c: 1e-4,
                    tau: 0.5,
                    max_backtracks: 45,
                },
                budget: Budget::FunEvals(2000),
                problems: CUTEST_SUBSET.iter().map(|(n, _)| n.to_string()).collect(),
                methods: vec![
                    spec("softqn", soft(1e6)),
                    spec(
                        "spbfgs",
                        MethodSetting::SpBfgs(BetaSetting::StepNorm {
                            coeff: 1e8,
                            floor: 1e-10,
                            per_eg: true,
                        }),
                    ),
                ],
                ..base
            },
            ExperimentKind::Toy => ExperimentConfig {
                trials: 1,
                step: StepSetting::Fixed(0.01),
                budget: Budget::Iterations(500),
                methods: vec![spec("softqn", soft(8e5)), spec("saddlefree", MethodSetting::SaddleFree)],
                ..base
            },
        }
    }

    /// Reads a config file on top of the defaults for its experiment. The
    /// `[experiment] kind` key picks the defaults; `fallback` is used when
    /// the file does not name one.
    pub fn from_file(path: &Path, fallback: ExperimentKind) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string(), fallback)
    }

    pub fn parse(text: &str, source: &str, fallback: ExperimentKind) -> Result<Self, BenchError> {
        let sections = parse_sections(text, source)?;
        let kind = sections
            .iter()
            .filter(|s| s.name == "experiment")
            .flat_map(|s| s.entries.iter())
            .find(|e| e.key == "kind")
            .map(|e| e.value.parse())
            .transpose()?
            .unwrap_or(fallback);
        let mut cfg = Self::defaults(kind);
        let mut methods = Vec::new();
        for sec in &sections {
            if let Some(name) = sec.name.strip_prefix("method.") {
                methods.push(parse_method(name, sec, source)?);
                continue;
            }
            for e in &sec.entries {
                cfg.apply(&sec.name, e, source)?;
            }
        }
        if !methods.is_empty() {
            cfg.methods = methods;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, section: &str, e: &Entry, source: &str) -> Result<(), BenchError> {
        let bad = |msg: String| BenchError::ConfigSyntax {
            path: source.to_string(),
            line: e.line,
            msg,
        };
        match (section, e.key.as_str()) {
            ("experiment", "kind") => {}
            ("experiment", "trials") => self.trials = e.parse(source)?,
            ("experiment", "seed") => self.base_seed = e.parse(source)?,
            ("experiment", "out") => self.output_dir = PathBuf::from(&e.value),
            ("budget", "iterations") => self.budget = Budget::Iterations(e.parse(source)?),
            ("budget", "fun_evals") => self.budget = Budget::FunEvals(e.parse(source)?),
            ("step", "kind") => {
                self.step = match e.value.as_str() {
                    "fixed" => StepSetting::Fixed(0.1),
                    "diminishing" => StepSetting::Diminishing(1.0),
                    "armijo" => StepSetting::Armijo {
                        eta0: 1.0,
                        c: 1e-4,
                        tau: 0.5,
                        max_backtracks: 45,
                    },
                    other => return Err(bad(format!("unknown step kind {other:?}"))),
                }
            }
            ("step", key) => {
                let v: f64 = e.parse(source)?;
                match (&mut self.step, key) {
                    (StepSetting::Fixed(s) | StepSetting::Diminishing(s), "eta") => *s = v,
                    (StepSetting::Armijo { eta0, .. }, "eta0") => *eta0 = v,
                    (StepSetting::Armijo { c, .. }, "c") => *c = v,
                    (StepSetting::Armijo { tau, .. }, "tau") => *tau = v,
                    (StepSetting::Armijo { max_backtracks, .. }, "max_backtracks") => {
                        *max_backtracks = e.parse(source)?
                    }
                    _ => return Err(bad(format!("key {key:?} does not apply to step {:?}", self.step))),
                }
            }
            ("problem", "n") => self.n = e.parse(source)?,
            ("problem", "grad_noise") => self.grad_noise = e.parse(source)?,
            ("problem", "noise_rel") => self.noise_rel = e.parse(source)?,
            ("problem", "names") => {
                self.problems = e.value.split(',').map(|s| s.trim().to_ascii_uppercase()).collect()
            }
            ("problem", "dataset") => self.dataset = Some(PathBuf::from(&e.value)),
            ("problem", "rho") => self.rho = e.parse(source)?,
            ("problem", "batch") => self.batch = Some(e.parse(source)?),
            (s, k) => return Err(bad(format!("unknown key {k:?} in section [{s}]"))),
        }
        Ok(())
    }

    /// Keeps only the named methods, in the order given.
    pub fn select_methods(&mut self, names: &[String]) -> Result<(), BenchError> {
        let mut picked = Vec::new();
        for n in names {
            let m = self
                .methods
                .iter()
                .find(|m| &m.name == n)
                .ok_or_else(|| BenchError::Config(format!("method {n:?} is not configured")))?;
            picked.push(m.clone());
        }
        self.methods = picked;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let err = |m: String| Err(BenchError::Config(m));
        if self.trials == 0 {
            return err("trials must be at least 1".into());
        }
        if self.methods.is_empty() {
            return err("no methods configured".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].iter().any(|o| o.name == m.name) {
                return err(format!("method {:?} listed twice", m.name));
            }
            m.setting
                .resolve(1.0)
                .validate()
                .map_err(|e| BenchError::Config(format!("method {}: {e}", m.name)))?;
        }
        self.step
            .resolve(0.0)
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        match self.budget {
            Budget::Iterations(0) | Budget::FunEvals(0) => return err("budget must be positive".into()),
            Budget::FunEvals(_) if !matches!(self.step, StepSetting::Armijo { .. }) => {
                return err("a fun_evals budget needs step kind = armijo".into())
            }
            _ => {}
        }
        match self.kind {
            ExperimentKind::Qp if self.n < 2 => return err("qp needs n >= 2".into()),
            ExperimentKind::Cutest if self.problems.is_empty() => return err("no cutest problems".into()),
            ExperimentKind::Cutest => {
                for p in &self.problems {
                    if !CUTEST_SUBSET.iter().any(|(n, _)| n == p) {
                        return err(format!("unknown cutest problem {p:?}"));
                    }
                }
            }
            ExperimentKind::Logreg if self.dataset.is_none() => return err("logreg needs a dataset".into()),
            _ => {}
        }
        if !(self.grad_noise >= 0.0 && self.noise_rel >= 0.0 && self.rho > 0.0) {
            return err("noise levels must be >= 0 and rho > 0".into());
        }
        if self.batch == Some(0) {
            return err("batch must be at least 1".into());
        }
        Ok(())
    }
}

fn parse_method(name: &str, sec: &Section, source: &str) -> Result<MethodSpec, BenchError> {
    if name.is_empty() {
        return Err(BenchError::ConfigSyntax {
            path: source.to_string(),
            line: sec.line,
            msg: "empty method name".into(),
        });
    }
    let kind = sec
        .entries
        .iter()
        .find(|e| e.key == "kind")
        .map(|e| e.value.as_str())
        .unwrap_or(name);
    let get = |key: &str| -> Result<Option<f64>, BenchError> {
        sec.entries.iter().find(|e| e.key == key).map(|e| e.parse(source)).transpose()
    };
    let allowed: &[&str] = match kind {
        "softqn" => &["kind", "alpha", "bias", "psi", "psi_upper", "alpha_cap"],
        "spbfgs" => &["kind", "beta", "relax", "beta_coeff", "beta_coeff_per_eg", "beta_floor"],
        "bfgs" | "sgd" | "newton" | "saddlefree" => &["kind"],
        other => {
            return Err(BenchError::ConfigSyntax {
                path: source.to_string(),
                line: sec.line,
                msg: format!("unknown method kind {other:?}"),
            })
        }
    };
    if let Some(e) = sec.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
        return Err(BenchError::ConfigSyntax {
            path: source.to_string(),
            line: e.line,
            msg: format!("key {:?} does not apply to {kind}", e.key),
        });
    }
    let setting = match kind {
        "softqn" => {
            let bias = get("bias")?.unwrap_or(0.0);
            let mode = match (get("psi")?, get("psi_upper")?) {
                (Some(lo), Some(hi)) => SoftQnPenaltyMode::Lemma1Bounded {
                    bounds: EigenBounds::new(lo, hi).map_err(|e| BenchError::Config(format!("method {name}: {e}")))?,
                    alpha_cap: get("alpha_cap")?.unwrap_or(f64::MAX),
                },
                (None, None) => SoftQnPenaltyMode::Constant(get("alpha")?.unwrap_or(1.0)),
                _ => return Err(BenchError::Config(format!("method {name}: psi and psi_upper go together"))),
            };
            MethodSetting::SoftQn(SoftQnPenaltyPolicy { mode, bias_lambda: bias })
        }
        "spbfgs" => {
            let floor = get("beta_floor")?.unwrap_or(1e-10);
            let beta = match (get("beta_coeff")?, get("beta_coeff_per_eg")?, get("beta")?) {
                (Some(c), None, None) => BetaSetting::StepNorm { coeff: c, floor, per_eg: false },
                (None, Some(c), None) => BetaSetting::StepNorm { coeff: c, floor, per_eg: true },
                (None, None, Some(b)) => match get("relax")? {
                    Some(r) => BetaSetting::Relaxed { beta: b, relax: r },
                    None => BetaSetting::Constant(b),
                },
                _ => {
                    return Err(BenchError::Config(format!(
                        "method {name}: set exactly one of beta, beta_coeff, beta_coeff_per_eg"
                    )))
                }
            };
            MethodSetting::SpBfgs(beta)
        }
        "bfgs" => MethodSetting::Bfgs,
        "sgd" => MethodSetting::Sgd,
        "newton" => MethodSetting::Newton,
        _ => MethodSetting::SaddleFree,
    };
    Ok(MethodSpec {
        name: name.to_string(),
        setting,
    })
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

impl Entry {
    fn parse<T: FromStr>(&self, source: &str) -> Result<T, BenchError>
    where
        T::Err: std::fmt::Display,
    {
        self.value.parse().map_err(|e: T::Err| BenchError::ConfigSyntax {
            path: source.to_string(),
            line: self.line,
            msg: format!("{} = {:?}: {e}", self.key, self.value),
        })
    }
}

#[derive(Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

fn parse_sections(text: &str, source: &str) -> Result<Vec<Section>, BenchError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: &str| BenchError::ConfigSyntax {
            path: source.to_string(),
            line,
            msg: msg.to_string(),
        };
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| err("unterminated section header"))?.trim();
            if out.iter().any(|s| s.name == name) {
                return Err(err(&format!("duplicate section [{name}]")));
            }
            out.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| err("expected key = value"))?;
        let sec = out.last_mut().ok_or_else(|| err("key outside of a section"))?;
        let key = k.trim().to_string();
        if sec.entries.iter().any(|e| e.key == key) {
            return Err(err(&format!("duplicate key {key:?}")));
        }
        sec.entries.push(Entry {
            key,
            value: v.trim().to_string(),
            line,
        });
    }
    Ok(out)
}
