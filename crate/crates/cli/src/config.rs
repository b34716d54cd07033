//! Run configuration: command-line flags layered over an optional JSON file,
//! layered over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use extreme_fpt::mc::Sampler;
use extreme_fpt::models::{ShortTimeParams, SurvivalModel, TailClass};
use extreme_fpt::RescalingVariant;
use serde::Deserialize;

use crate::format::{parse_count, parse_count_list};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Point1d,
    Robin1d,
    Sphere3d,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerChoice {
    Auto,
    Exact,
    Inverse,
    Tabulated,
}

impl From<SamplerChoice> for Sampler {
    fn from(s: SamplerChoice) -> Self {
        match s {
            SamplerChoice::Auto => Sampler::Auto,
            SamplerChoice::Exact => Sampler::Exact,
            SamplerChoice::Inverse => Sampler::Inverse,
            SamplerChoice::Tabulated => Sampler::Tabulated,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Survival model
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// Distance to the target (default 1)
    #[arg(long = "L", value_name = "L")]
    pub l: Option<f64>,
    /// Diffusivity (default 1)
    #[arg(long = "D", value_name = "D")]
    pub d: Option<f64>,
    /// Reactivity of a robin1d target
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Short-time prefactor A in 1 - S(t) ~ A t^p exp(-C/t)
    #[arg(long = "A", value_name = "A")]
    pub a: Option<f64>,
    /// Short-time power p
    #[arg(long = "p", value_name = "p", allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Short-time rate C
    #[arg(long = "C", value_name = "C")]
    pub c: Option<f64>,
    /// CSV file with columns t,S for a tabulated model
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Long-time tail of a tabulated model: `exponential` or `power:<alpha>`
    #[arg(long)]
    pub tail: Option<String>,
    /// Rescaling variant(s): lambertw, elementary, numeric (comma separated)
    #[arg(long)]
    pub variant: Option<String>,
    /// Number(s) of searchers, comma separated; 1e6 style accepted
    #[arg(long = "N", value_name = "N")]
    pub n: Option<String>,
    /// Order statistic(s) k, comma separated
    #[arg(long)]
    pub k: Option<String>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo replicates
    #[arg(long)]
    pub replicates: Option<String>,
    /// Worker threads
    #[arg(long)]
    pub workers: Option<usize>,
    /// Single-time sampler for Monte Carlo runs
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerChoice>,
    /// Skip the quadrature columns of `stats`
    #[arg(long)]
    pub no_exact: bool,
    /// Write output here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON file supplying any of the above; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// A count or list of counts in a JSON config: `1000`, `"1e6"` or `[100, "1e4"]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum CountSpec {
    One(CountItem),
    Many(Vec<CountItem>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum CountItem {
    Int(u64),
    Float(f64),
    Text(String),
}

impl CountItem {
    fn resolve(&self, field: &str) -> Result<u64, CliError> {
        match self {
            CountItem::Int(v) => Ok(*v),
            CountItem::Float(v) if v.fract() == 0.0 && *v >= 0.0 && *v < 9.007_199_254_740_992e15 => {
                Ok(*v as u64)
            }
            CountItem::Float(v) => Err(CliError::usage(format!("{field}: {v} is not an integer count"))),
            CountItem::Text(s) => parse_count(s).map_err(|e| CliError::usage(format!("{field}: {e}"))),
        }
    }
}

impl CountSpec {
    fn resolve(&self, field: &str) -> Result<Vec<u64>, CliError> {
        match self {
            CountSpec::One(CountItem::Text(s)) => {
                parse_count_list(s).map_err(|e| CliError::usage(format!("{field}: {e}")))
            }
            CountSpec::One(item) => Ok(vec![item.resolve(field)?]),
            CountSpec::Many(items) => items.iter().map(|i| i.resolve(field)).collect(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<ModelChoice>,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "D")]
    d: Option<f64>,
    kappa: Option<f64>,
    #[serde(rename = "A")]
    a: Option<f64>,
    p: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    table: Option<PathBuf>,
    tail: Option<String>,
    variant: Option<String>,
    #[serde(rename = "N")]
    n: Option<CountSpec>,
    k: Option<CountSpec>,
    seed: Option<u64>,
    replicates: Option<CountItem>,
    workers: Option<usize>,
    sampler: Option<SamplerChoice>,
    no_exact: Option<bool>,
    output: Option<PathBuf>,
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("config: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("config: {}: {e}", path.display())))
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Option<ModelChoice>,
    pub l: f64,
    pub d: f64,
    pub kappa: Option<f64>,
    pub stp_override: Option<ShortTimeParams>,
    pub table: Option<PathBuf>,
    pub tail: Option<TailClass>,
    pub variants: Option<Vec<RescalingVariant>>,
    pub ns: Option<Vec<u64>>,
    pub ks: Option<Vec<u32>>,
    pub seed: u64,
    pub replicates: u64,
    pub workers: usize,
    pub sampler: Sampler,
    pub no_exact: bool,
    pub output: Option<PathBuf>,
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("{field} must be a positive number, got {v}")))
    }
}

fn parse_tail(s: &str) -> Result<TailClass, CliError> {
    let s = s.trim();
    if s == "exponential" {
        return Ok(TailClass::Exponential);
    }
    let alpha = s
        .strip_prefix("power:")
        .and_then(|a| a.parse::<f64>().ok())
        .ok_or_else(|| CliError::usage(format!("tail: expected `exponential` or `power:<alpha>`, got `{s}`")))?;
    Ok(TailClass::Power(positive("tail exponent", alpha)?))
}

fn parse_variants(s: &str) -> Result<Vec<RescalingVariant>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse::<RescalingVariant>().map_err(|e| CliError::usage(format!("variant: {e}"))))
        .collect()
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let ns = match &flags.n {
            Some(s) => Some(parse_count_list(s).map_err(|e| CliError::usage(format!("N: {e}")))?),
            None => file.n.as_ref().map(|n| n.resolve("N")).transpose()?,
        };
        let ks = match &flags.k {
            Some(s) => Some(parse_count_list(s).map_err(|e| CliError::usage(format!("k: {e}")))?),
            None => file.k.as_ref().map(|k| k.resolve("k")).transpose()?,
        };
        let ks = ks
            .map(|ks| {
                ks.into_iter()
                    .map(|k| match u32::try_from(k) {
                        Ok(k) if k >= 1 => Ok(k),
                        _ => Err(CliError::usage(format!("k must be between 1 and {}, got {k}", u32::MAX))),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let replicates = match &flags.replicates {
            Some(s) => parse_count(s).map_err(|e| CliError::usage(format!("replicates: {e}")))?,
            None => file.replicates.as_ref().map(|r| r.resolve("replicates")).transpose()?.unwrap_or(1000),
        };

        let l = positive("L", flags.l.or(file.l).unwrap_or(1.0))?;
        let d = positive("D", flags.d.or(file.d).unwrap_or(1.0))?;
        let kappa = flags.kappa.or(file.kappa).map(|k| positive("kappa", k)).transpose()?;
        let (a, p, c) = (flags.a.or(file.a), flags.p.or(file.p), flags.c.or(file.c));
        let stp_override = match (a, p, c) {
            (None, None, None) => None,
            (Some(a), Some(p), Some(c)) => Some(
                ShortTimeParams::new(a, p, c).map_err(|e| CliError::usage(format!("A/p/C: {e}")))?,
            ),
            _ => {
                let missing: Vec<&str> =
                    [("A", a), ("p", p), ("C", c)].iter().filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
                return Err(CliError::usage(format!(
                    "short-time parameters need all of A, p and C; missing {}",
                    missing.join(", ")
                )));
            }
        };
        let model = flags.model.or(file.model);
        if kappa.is_some() && model != Some(ModelChoice::Robin1d) {
            return Err(CliError::usage("kappa: only the robin1d model takes a reactivity"));
        }
        if model == Some(ModelChoice::Robin1d) && kappa.is_none() {
            return Err(CliError::usage("kappa: the robin1d model needs --kappa"));
        }
        let table = flags.table.clone().or(file.table);
        let tail = flags.tail.clone().or(file.tail).map(|t| parse_tail(&t)).transpose()?;
        if model == Some(ModelChoice::Tabulated) {
            if table.is_none() {
                return Err(CliError::usage("table: the tabulated model needs --table"));
            }
            if stp_override.is_none() {
                return Err(CliError::usage("A/p/C: the tabulated model needs --A, --p and --C"));
            }
            if tail.is_none() {
                return Err(CliError::usage("tail: the tabulated model needs --tail"));
            }
        } else if table.is_some() || tail.is_some() {
            return Err(CliError::usage("table/tail: only the tabulated model reads a table"));
        }
        let workers = flags.workers.or(file.workers).unwrap_or(1);
        if workers < 1 {
            return Err(CliError::usage("workers must be at least 1"));
        }
        Ok(Self {
            model,
            l,
            d,
            kappa,
            stp_override,
            table,
            tail,
            variants: flags.variant.clone().or(file.variant).map(|v| parse_variants(&v)).transpose()?,
            ns,
            ks,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            replicates,
            workers,
            sampler: flags.sampler.or(file.sampler).map(Sampler::from).unwrap_or_default(),
            no_exact: flags.no_exact || file.no_exact.unwrap_or(false),
            output: flags.output.clone().or(file.output),
        })
    }

    /// The survival model; `--A/--p/--C` are only accepted with `tabulated`.
    pub fn survival_model(&self) -> Result<SurvivalModel, CliError> {
        let model = self.model.ok_or_else(|| CliError::usage("model: --model is required"))?;
        if self.stp_override.is_some() && model != ModelChoice::Tabulated {
            return Err(CliError::usage(
                "A/p/C: overrides apply to the tabulated model or to the rescale and regime commands",
            ));
        }
        let built = match model {
            ModelChoice::Point1d => SurvivalModel::point_1d(self.l, self.d),
            ModelChoice::Robin1d => SurvivalModel::robin_1d(self.l, self.d, self.kappa.unwrap_or_default()),
            ModelChoice::Sphere3d => SurvivalModel::sphere_3d(self.l, self.d),
            ModelChoice::Tabulated => {
                let path = self.table.as_ref().expect("checked in resolve");
                SurvivalModel::from_csv(path, self.stp_override.expect("checked"), self.tail.expect("checked"))
            }
        };
        built.map_err(|e| CliError::usage(format!("model: {e}")))
    }

    /// Short-time constants: the explicit override when given, else the model's.
    pub fn short_time(&self) -> Result<ShortTimeParams, CliError> {
        if let Some(stp) = self.stp_override {
            return Ok(stp);
        }
        if self.model.is_none() {
            return Err(CliError::usage("model: give --model or all of --A, --p and --C"));
        }
        Ok(*self.survival_model()?.short_time())
    }

    pub fn ns(&self) -> Result<&[u64], CliError> {
        self.ns.as_deref().ok_or_else(|| CliError::usage("N: --N is required"))
    }

    pub fn single_n(&self) -> Result<u64, CliError> {
        match self.ns()? {
            [n] => Ok(*n),
            _ => Err(CliError::usage("N: this command takes a single value of N")),
        }
    }

    pub fn ks(&self) -> Vec<u32> {
        self.ks.clone().unwrap_or_else(|| vec![1])
    }

    pub fn single_k(&self) -> Result<u32, CliError> {
        match self.ks().as_slice() {
            [k] => Ok(*k),
            _ => Err(CliError::usage("k: this command takes a single value of k")),
        }
    }

    pub fn single_variant(&self) -> Result<RescalingVariant, CliError> {
        match self.variants.as_deref() {
            None => Ok(RescalingVariant::LambertW),
            Some([v]) => Ok(*v),
            Some(_) => Err(CliError::usage("variant: this command takes a single variant")),
        }
    }
}
