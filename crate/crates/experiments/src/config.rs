//! Flat experiment configuration: TOML tables flatten to dotted keys, and
//! `--set key=value` overrides are parsed with the same value grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rabi_core::Error as CoreError;
use serde::Serialize;

use crate::error::{ExperimentError, Result};

/// A configuration value: a number, a list of numbers or a word.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ConfigValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl fmt::Display for ConfigValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigValue::Number(x) => write!(f, "{x}"),
            ConfigValue::List(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            ConfigValue::Text(s) => write!(f, "{s}"),
        }
    }
}

fn convert(key: &str, value: &toml::Value) -> Result<ConfigValue> {
    let number = |v: &toml::Value| match v {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(x) => Some(*x),
        toml::Value::Boolean(b) => Some(if *b { 1.0 } else { 0.0 }),
        _ => None,
    };
    match value {
        toml::Value::String(s) => Ok(ConfigValue::Text(s.clone())),
        toml::Value::Array(items) => items
            .iter()
            .map(|v| number(v).ok_or_else(|| ExperimentError::bad_value(key, "lists must hold numbers")))
            .collect::<Result<Vec<f64>>>()
            .map(ConfigValue::List),
        other => number(other)
            .map(ConfigValue::Number)
            .ok_or_else(|| ExperimentError::bad_value(key, format!("unsupported value {other}"))),
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, ConfigValue>) -> Result<()> {
    for (name, value) in table {
        let key = if prefix.is_empty() {
            name.clone()
        } else {
            format!("{prefix}.{name}")
        };
        match value {
            toml::Value::Table(inner) => flatten(&key, inner, out)?,
            v => {
                out.insert(key.clone(), convert(&key, v)?);
            }
        }
    }
    Ok(())
}

/// Parsed configuration keyed by dotted names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, ConfigValue>,
}

impl Config {
    pub fn new() -> Config {
        Config::default()
    }

    pub fn from_toml_str(text: &str) -> Result<Config> {
        let table: toml::Table = text.parse()?;
        let mut values = BTreeMap::new();
        flatten("", &table, &mut values)?;
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        Config::from_toml_str(&text)
    }

    pub fn set(&mut self, key: &str, value: ConfigValue) {
        self.values.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&ConfigValue> {
        self.values.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|k| k.as_str())
    }

    /// Applies `key=value`. The value is read as a TOML value (number, list
    /// or quoted string); anything else is taken as a bare word.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| ExperimentError::BadOverride(assignment.to_string()))?;
        let (key, raw) = (key.trim(), raw.trim());
        if key.is_empty() {
            return Err(ExperimentError::BadOverride(assignment.to_string()));
        }
        let value = match format!("v = {raw}").parse::<toml::Table>() {
            Ok(table) => convert(key, &table["v"])?,
            Err(_) => ConfigValue::Text(raw.to_string()),
        };
        self.set(key, value);
        Ok(())
    }
}

/// Fallback used when a key is absent.
#[derive(Debug, Clone, PartialEq)]
pub enum Fallback {
    Number(f64),
    List(Vec<f64>),
    Text(&'static str),
    /// Computed by the runner from other values.
    Derived,
    /// Absent means unset; the runner decides.
    Optional,
}

/// One accepted key of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct KeySpec {
    pub key: &'static str,
    pub fallback: Fallback,
    /// The fallback is a choice of this tool rather than a stated figure
    /// parameter; recorded in metadata when used.
    pub inferred: bool,
}

impl KeySpec {
    pub fn stated(key: &'static str, fallback: Fallback) -> KeySpec {
        KeySpec {
            key,
            fallback,
            inferred: false,
        }
    }

    pub fn inferred(key: &'static str, fallback: Fallback) -> KeySpec {
        KeySpec {
            key,
            fallback,
            inferred: true,
        }
    }
}

/// Configuration checked against an experiment's key table with fallbacks
/// filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    values: BTreeMap<String, ConfigValue>,
    /// Keys whose value came from an inferred fallback.
    pub inferred: BTreeSet<String>,
}

impl Resolved {
    pub fn new(config: &Config, table: &[KeySpec]) -> Result<Resolved> {
        for key in config.keys() {
            if !table.iter().any(|s| s.key == key) {
                return Err(CoreError::UnknownKey(key.to_string()).into());
            }
        }
        let mut values = BTreeMap::new();
        let mut inferred = BTreeSet::new();
        for spec in table {
            if let Some(v) = config.get(spec.key) {
                values.insert(spec.key.to_string(), v.clone());
                continue;
            }
            let value = match &spec.fallback {
                Fallback::Number(x) => ConfigValue::Number(*x),
                Fallback::List(xs) => ConfigValue::List(xs.clone()),
                Fallback::Text(s) => ConfigValue::Text(s.to_string()),
                Fallback::Derived | Fallback::Optional => continue,
            };
            if spec.inferred {
                inferred.insert(spec.key.to_string());
            }
            values.insert(spec.key.to_string(), value);
        }
        Ok(Resolved { values, inferred })
    }

    /// Records a value computed by the runner.
    pub fn derive(&mut self, key: &str, value: f64, inferred: bool) {
        self.values.insert(key.to_string(), ConfigValue::Number(value));
        if inferred {
            self.inferred.insert(key.to_string());
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn values(&self) -> &BTreeMap<String, ConfigValue> {
        &self.values
    }

    pub fn opt_number(&self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(ConfigValue::Number(x)) if x.is_finite() => Ok(Some(*x)),
            Some(ConfigValue::Number(_)) => Err(CoreError::NonFiniteValue { key: key.into() }.into()),
            Some(ConfigValue::List(xs)) if xs.len() == 1 => Ok(Some(xs[0])),
            Some(other) => Err(ExperimentError::bad_value(key, format!("expected a number, got {other}"))),
        }
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        self.opt_number(key)?
            .ok_or_else(|| CoreError::MissingKey(key.to_string()).into())
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        to_count(key, self.number(key)?)
    }

    pub fn opt_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(ConfigValue::Number(x)) => Ok(Some(vec![*x])),
            Some(ConfigValue::List(xs)) => {
                if xs.iter().any(|x| !x.is_finite()) {
                    return Err(CoreError::NonFiniteValue { key: key.into() }.into());
                }
                Ok(Some(xs.clone()))
            }
            Some(other) => Err(ExperimentError::bad_value(key, format!("expected a list, got {other}"))),
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.opt_list(key)?
            .ok_or_else(|| CoreError::MissingKey(key.to_string()).into())
    }

    pub fn text(&self, key: &str) -> Result<&str> {
        match self.values.get(key) {
            Some(ConfigValue::Text(s)) => Ok(s),
            Some(other) => Err(ExperimentError::bad_value(key, format!("expected a word, got {other}"))),
            None => Err(CoreError::MissingKey(key.to_string()).into()),
        }
    }
}

/// Non-negative integer view of a number.
pub fn to_count(key: &str, x: f64) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(ExperimentError::bad_value(key, format!("expected a non-negative integer, got {x}")))
    }
}

/// Experiments offered by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Rabi,
    Fidelity,
    Qfi,
    Cfi,
    Sweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::Fig1,
        ExperimentKind::Fig2,
        ExperimentKind::Fig3,
        ExperimentKind::Fig4,
        ExperimentKind::Rabi,
        ExperimentKind::Fidelity,
        ExperimentKind::Qfi,
        ExperimentKind::Cfi,
        ExperimentKind::Sweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Fig3 => "fig3",
            ExperimentKind::Fig4 => "fig4",
            ExperimentKind::Rabi => "rabi",
            ExperimentKind::Fidelity => "fidelity",
            ExperimentKind::Qfi => "qfi",
            ExperimentKind::Cfi => "cfi",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub config: Config,
    pub out_dir: PathBuf,
    pub plot: bool,
    pub workers: usize,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, out_dir: impl Into<PathBuf>) -> ExperimentSpec {
        ExperimentSpec {
            kind,
            config: Config::new(),
            out_dir: out_dir.into(),
            plot: false,
            workers: 1,
        }
    }

    /// Builder-style override, parsed like `--set`.
    pub fn with(mut self, assignment: &str) -> Result<ExperimentSpec> {
        self.config.apply_override(assignment)?;
        Ok(self)
    }

    pub fn with_workers(mut self, workers: usize) -> ExperimentSpec {
        self.workers = workers.max(1);
        self
    }

    pub fn with_plot(mut self, plot: bool) -> ExperimentSpec {
        self.plot = plot;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_flatten_to_dotted_keys() {
        let cfg = Config::from_toml_str("sigma_p = 2\n[panels]\ndelta0 = [-0.5, -7]\nname = \"x\"\n").unwrap();
        assert_eq!(cfg.get("sigma_p"), Some(&ConfigValue::Number(2.0)));
        assert_eq!(cfg.get("panels.delta0"), Some(&ConfigValue::List(vec![-0.5, -7.0])));
        assert_eq!(cfg.get("panels.name"), Some(&ConfigValue::Text("x".into())));
        assert!(Config::from_toml_str("a = [\"x\"]").is_err());
    }

    #[test]
    fn overrides() {
        let mut cfg = Config::new();
        cfg.apply_override("n = 3").unwrap();
        cfg.apply_override("axes.n=[0,1,2]").unwrap();
        cfg.apply_override("readout=rotation").unwrap();
        cfg.apply_override("label=\"a b\"").unwrap();
        assert_eq!(cfg.get("n"), Some(&ConfigValue::Number(3.0)));
        assert_eq!(cfg.get("axes.n"), Some(&ConfigValue::List(vec![0.0, 1.0, 2.0])));
        assert_eq!(cfg.get("readout"), Some(&ConfigValue::Text("rotation".into())));
        assert_eq!(cfg.get("label"), Some(&ConfigValue::Text("a b".into())));
        assert!(matches!(cfg.apply_override("novalue"), Err(ExperimentError::BadOverride(_))));
        assert!(matches!(cfg.apply_override("=1"), Err(ExperimentError::BadOverride(_))));
    }

    #[test]
    fn resolution_fills_and_flags_fallbacks() {
        let table = [
            KeySpec::stated("a", Fallback::Number(1.0)),
            KeySpec::inferred("b", Fallback::List(vec![1.0, 2.0])),
            KeySpec::stated("c", Fallback::Optional),
            KeySpec::inferred("d", Fallback::Derived),
        ];
        let mut cfg = Config::new();
        cfg.apply_override("a=4").unwrap();
        let mut r = Resolved::new(&cfg, &table).unwrap();
        assert_eq!(r.number("a").unwrap(), 4.0);
        assert_eq!(r.list("b").unwrap(), vec![1.0, 2.0]);
        assert_eq!(r.opt_number("c").unwrap(), None);
        assert!(r.inferred.contains("b") && !r.inferred.contains("a"));
        r.derive("d", 0.5, true);
        assert!(r.inferred.contains("d"));
        assert_eq!(r.list("a").unwrap(), vec![4.0]);
        assert!(r.text("a").is_err());
        assert!(r.count("d").is_err());

        cfg.apply_override("zzz=1").unwrap();
        let err = Resolved::new(&cfg, &table).unwrap_err();
        assert_eq!(err.kind(), "UnknownKey");
    }
}
