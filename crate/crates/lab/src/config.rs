//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. List values are
//! comma-separated strategy specs such as `identity, linear(2)`. Command-line
//! overrides are applied after parsing and before validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use stochlab_core::adaptive::{DEFAULT_CONTESTANT_BUDGET, DEFAULT_WITNESS_CAP};
use stochlab_core::counting::DEFAULT_BLOCK_CEILING;
use stochlab_core::density::DEFAULT_N_MIN;
use stochlab_core::nonadaptive::DEFAULT_BUDGET;
use stochlab_core::{catalog, BlockParams, Rational};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ConstructH,
    NonadaptiveGame,
    AdaptiveGame,
    WeakStochasticTrace,
    CountBig,
    BuildX,
    AlphaShift,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::ConstructH,
        ExperimentKind::NonadaptiveGame,
        ExperimentKind::AdaptiveGame,
        ExperimentKind::WeakStochasticTrace,
        ExperimentKind::CountBig,
        ExperimentKind::BuildX,
        ExperimentKind::AlphaShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ConstructH => "construct-h",
            ExperimentKind::NonadaptiveGame => "nonadaptive-game",
            ExperimentKind::AdaptiveGame => "adaptive-game",
            ExperimentKind::WeakStochasticTrace => "weak-stochastic-trace",
            ExperimentKind::CountBig => "count-big",
            ExperimentKind::BuildX => "build-x",
            ExperimentKind::AlphaShift => "alpha-shift",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown experiment kind {s:?}"))
    }
}

/// How the increasing part of each disordered block is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sizing {
    Largeness,
    Fixed(u64),
}

impl Sizing {
    pub fn params(self) -> BlockParams {
        match self {
            Sizing::Largeness => BlockParams::default(),
            Sizing::Fixed(k) => BlockParams::fixed(k),
        }
    }
}

impl FromStr for Sizing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "largeness" {
            return Ok(Sizing::Largeness);
        }
        let k = s
            .strip_prefix("fixed(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("expected \"largeness\" or \"fixed(k)\", found {s:?}"))?;
        let k: u64 = k.trim().parse().map_err(|_| format!("fixed(k) needs an integer, found {k:?}"))?;
        if k == 0 {
            return Err("fixed(k) needs k ≥ 1".into());
        }
        Ok(Sizing::Fixed(k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub stages: u64,
    /// Blocks in the host for the adaptive game; defaults to `stages`.
    pub host_stages: Option<u64>,
    pub sizing: Sizing,
    /// Selector, contestant, skip-rule or permutation specs, by experiment.
    pub strategies: Vec<String>,
    pub seed: Option<u64>,
    pub budget: u64,
    pub contestant_budget: u64,
    pub witness_cap: usize,
    pub n_min: u64,
    pub n: u32,
    pub ceiling: u32,
    pub prefix_len: u64,
    pub join: bool,
    pub input: Option<PathBuf>,
    pub trials: u64,
    pub size: u64,
    pub q: Rational,
    pub alpha: Rational,
    pub k: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            stages: 1,
            host_stages: None,
            sizing: Sizing::Largeness,
            strategies: Vec::new(),
            seed: None,
            budget: DEFAULT_BUDGET,
            contestant_budget: DEFAULT_CONTESTANT_BUDGET,
            witness_cap: DEFAULT_WITNESS_CAP,
            n_min: DEFAULT_N_MIN,
            n: 2,
            ceiling: DEFAULT_BLOCK_CEILING,
            prefix_len: 1 << 12,
            join: false,
            input: None,
            trials: 100,
            size: 64,
            q: Rational::new(1, 4),
            alpha: Rational::new(1, 2),
            k: 0,
        }
    }
}

fn parse_value<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| format!("{value:?}: {e}"))
}

fn parse_rational(value: &str) -> Result<Rational, String> {
    let (p, q) = value.split_once('/').unwrap_or((value, "1"));
    let p: i64 = p.trim().parse().map_err(|_| format!("{value:?} is not a fraction p/q"))?;
    let q: i64 = q.trim().parse().map_err(|_| format!("{value:?} is not a fraction p/q"))?;
    if q <= 0 {
        return Err(format!("{value:?} has a non-positive denominator"));
    }
    Ok(Rational::new(p, q))
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, found {value:?}")),
    }
}

impl ExperimentConfig {
    /// Sets one key; the error message does not carry a line number.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "kind" => self.kind = Some(value.parse()?),
            "stages" => self.stages = parse_value(value)?,
            "host-stages" => self.host_stages = Some(parse_value(value)?),
            "sizing" => self.sizing = value.parse()?,
            "family" | "contestants" | "perms" | "permutation" | "rule" => {
                self.strategies = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            }
            "seed" => self.seed = Some(parse_value(value)?),
            "budget" => self.budget = parse_value(value)?,
            "contestant-budget" => self.contestant_budget = parse_value(value)?,
            "witness-cap" => self.witness_cap = parse_value(value)?,
            "nmin" => self.n_min = parse_value(value)?,
            "n" => self.n = parse_value(value)?,
            "ceiling" => self.ceiling = parse_value(value)?,
            "prefix-len" => self.prefix_len = parse_value(value)?,
            "join" => self.join = parse_bool(value)?,
            "input" => self.input = Some(PathBuf::from(value)),
            "trials" => self.trials = parse_value(value)?,
            "size" => self.size = parse_value(value)?,
            "q" => self.q = parse_rational(value)?,
            "alpha" => self.alpha = parse_rational(value)?,
            "k" => self.k = parse_value(value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> LabResult<Self> {
        let mut config = Self::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| LabError::Config { line, message: format!("expected key = value, found {trimmed:?}") })?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(first) = seen.insert(key.to_string(), line) {
                return Err(LabError::Config { line, message: format!("{key:?} already set on line {first}") });
            }
            config.set(key, value).map_err(|message| LabError::Config { line, message })?;
        }
        Ok(config)
    }

    pub fn host_stages(&self) -> u64 {
        self.host_stages.unwrap_or(self.stages)
    }

    pub fn kind(&self) -> LabResult<ExperimentKind> {
        self.kind.ok_or_else(|| LabError::Invalid("no experiment kind given".into()))
    }

    /// Strategy specs, or the experiment's default family.
    pub fn strategies(&self) -> Vec<String> {
        if !self.strategies.is_empty() {
            return self.strategies.clone();
        }
        let defaults: &[&str] = match self.kind {
            Some(ExperimentKind::NonadaptiveGame) => &["identity"],
            Some(ExperimentKind::AdaptiveGame) => &["oblivious-all"],
            Some(ExperimentKind::WeakStochasticTrace) => &["next-door"],
            Some(ExperimentKind::CountBig) => &["identity"],
            Some(ExperimentKind::BuildX) => &["identity", "swap-pairs", "block-reversal"],
            _ => &[],
        };
        defaults.iter().map(|s| s.to_string()).collect()
    }

    /// Checks caps and resolves every strategy name against the catalog.
    pub fn validate(&self) -> LabResult<()> {
        let kind = self.kind()?;
        let positive = [
            ("budget", self.budget),
            ("contestant-budget", self.contestant_budget),
            ("witness-cap", self.witness_cap as u64),
            ("nmin", self.n_min),
            ("ceiling", self.ceiling as u64),
            ("trials", self.trials),
            ("size", self.size),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(LabError::Invalid(format!("{name} must be positive")));
        }
        let needs_stages = matches!(
            kind,
            ExperimentKind::ConstructH | ExperimentKind::NonadaptiveGame | ExperimentKind::AdaptiveGame | ExperimentKind::BuildX
        );
        if needs_stages && self.stages == 0 {
            return Err(LabError::Invalid("stages must be positive".into()));
        }
        let specs = self.strategies();
        let check = |r: stochlab_core::Result<()>, spec: &str| {
            r.map_err(|e| LabError::Invalid(format!("strategy {spec:?}: {e}")))
        };
        for spec in &specs {
            match kind {
                ExperimentKind::NonadaptiveGame => check(catalog::selector(spec).map(drop), spec)?,
                ExperimentKind::AdaptiveGame => check(catalog::contestant(spec).map(drop), spec)?,
                ExperimentKind::WeakStochasticTrace => check(catalog::skip_rule(spec).map(drop), spec)?,
                ExperimentKind::CountBig => check(catalog::permutation(spec, 1).map(drop), spec)?,
                ExperimentKind::BuildX => check(catalog::fragment(spec, 2).map(drop), spec)?,
                ExperimentKind::ConstructH | ExperimentKind::AlphaShift => {
                    return Err(LabError::Invalid(format!("{kind} takes no strategies")));
                }
            }
        }
        if kind == ExperimentKind::WeakStochasticTrace && specs.len() != 1 {
            return Err(LabError::Invalid("weak-stochastic-trace runs exactly one rule".into()));
        }
        if kind == ExperimentKind::CountBig && self.n == 0 {
            return Err(LabError::Invalid("count-big needs n ≥ 1".into()));
        }
        let generated = match kind {
            ExperimentKind::WeakStochasticTrace => self.input.is_none(),
            ExperimentKind::AlphaShift => true,
            _ => false,
        };
        if generated && self.seed.is_none() {
            return Err(LabError::Invalid(format!("{kind} generates random inputs and needs a seed")));
        }
        if kind == ExperimentKind::AlphaShift && self.q <= Rational::from_integer(0) {
            return Err(LabError::Invalid("q must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = ExperimentConfig::parse("# demo\nkind = count-big\n\nn = 3\nperms = identity, reversal\nq = 1/8\n").unwrap();
        assert_eq!(c.kind, Some(ExperimentKind::CountBig));
        assert_eq!(c.n, 3);
        assert_eq!(c.strategies, vec!["identity", "reversal"]);
        assert_eq!(c.q, Rational::new(1, 8));
    }

    #[test]
    fn errors_cite_the_line() {
        let e = ExperimentConfig::parse("kind = count-big\nn = three\n").unwrap_err();
        assert!(matches!(e, LabError::Config { line: 2, .. }), "{e}");
        let e = ExperimentConfig::parse("kind = count-big\nbogus\n").unwrap_err();
        assert!(matches!(e, LabError::Config { line: 2, .. }));
        let e = ExperimentConfig::parse("n = 2\nn = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 1"));
    }

    #[test]
    fn sizing_values() {
        assert_eq!("largeness".parse::<Sizing>(), Ok(Sizing::Largeness));
        assert_eq!("fixed(3)".parse::<Sizing>(), Ok(Sizing::Fixed(3)));
        assert!("fixed(0)".parse::<Sizing>().is_err());
    }

    #[test]
    fn validation_rejects_unknown_strategies_and_missing_seeds() {
        let mut c = ExperimentConfig::parse("kind = nonadaptive-game\nfamily = identity, cubic\n").unwrap();
        assert!(c.validate().is_err());
        c.strategies = vec!["identity".into()];
        c.validate().unwrap();
        let c = ExperimentConfig::parse("kind = alpha-shift\n").unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::parse("kind = nonadaptive-game\nbudget = 0\n").unwrap();
        assert!(c.validate().is_err());
    }
}
