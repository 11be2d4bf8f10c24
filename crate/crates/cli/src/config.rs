//! Run configuration: command-line flags layered over an optional
//! `key = value` file. Flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hodgeq_core::qtsp::DEFAULT_GAMMA_G;
use hodgeq_core::{Mode, Subspace, TomographyAccess};

#[derive(Parser, Debug)]
#[command(name = "hodgeq", version, about = "Classical and simulated quantum k-HodgeRank")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Exact HodgeRank scores and consistency measures
    Rank(Flags),
    /// Simulated quantum HodgeRank with certified bounds
    Qsim(Flags),
    /// Sampling estimators: consistency, relative ranking, tomography
    Estimate(Flags),
    /// Property suite on built-in and seeded random complexes
    Verify(Flags),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// key = value file; any flag below may appear as a key
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// pairwise comparisons, CSV rows `voter,i,j,value`
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// graph as an edge list, one `u v` pair per line
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// one value per k-simplex in canonical order
    #[arg(long)]
    pub signal: Option<PathBuf>,
    /// previously written rank JSON to re-rank
    #[arg(long)]
    pub from_result: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub gamma_g: Option<f64>,
    /// pick epsilon so the output state is this close to the exact one
    #[arg(long)]
    pub target_distance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// comma-separated epsilons; switches the output to a CSV sweep
    #[arg(long, value_delimiter = ',')]
    pub sweep_epsilons: Option<Vec<f64>>,
    /// comma-separated seeds for estimator sweeps and random complexes
    #[arg(long, value_delimiter = ',')]
    pub sweep_seeds: Option<Vec<u64>>,
    /// comma-separated vertex counts of the random complexes in `verify`
    #[arg(long, value_delimiter = ',')]
    pub sweep_n: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorChoice>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeChoice>,
    #[arg(long, value_enum)]
    pub access: Option<AccessChoice>,
    /// comma-separated (k-1)-simplex indices for relative ranking
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<usize>>,
    /// test hook: drop the Jordan-Wigner signs from the Dirac encoding
    #[arg(long)]
    pub inject_dirac_sign_flip: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorChoice {
    ConsistencyG,
    ConsistencyC,
    Relative,
    Tomography,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Hadamard,
    Ae,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AccessChoice {
    Controlled,
    Copies,
}

impl From<ModeChoice> for Mode {
    fn from(m: ModeChoice) -> Mode {
        match m {
            ModeChoice::Hadamard => Mode::HadamardSampling,
            ModeChoice::Ae => Mode::AmplitudeEstimationModel,
        }
    }
}

impl From<AccessChoice> for TomographyAccess {
    fn from(a: AccessChoice) -> TomographyAccess {
        match a {
            AccessChoice::Controlled => TomographyAccess::Controlled,
            AccessChoice::Copies => TomographyAccess::CopiesOnly,
        }
    }
}

impl EstimatorChoice {
    pub fn subspace(self) -> Option<Subspace> {
        match self {
            EstimatorChoice::ConsistencyG => Some(Subspace::G),
            EstimatorChoice::ConsistencyC => Some(Subspace::C),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Rank,
    Qsim,
    Estimate,
    Verify,
}

/// Where the input data comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Pairs(PathBuf),
    EdgesAndSignal { edges: PathBuf, signal: PathBuf },
    RankResult(PathBuf),
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Input,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub kappa: Option<f64>,
    pub gamma_g: f64,
    pub target_distance: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub sweep_epsilons: Vec<f64>,
    pub sweep_seeds: Vec<u64>,
    pub sweep_n: Vec<usize>,
    pub estimator: EstimatorChoice,
    pub mode: Mode,
    pub access: TomographyAccess,
    pub subset: Option<Vec<usize>>,
    pub inject_dirac_sign_flip: bool,
}

const KEYS: &[&str] = &[
    "pairs",
    "edges",
    "signal",
    "from-result",
    "k",
    "epsilon",
    "delta",
    "kappa",
    "gamma-g",
    "target-distance",
    "seed",
    "out",
    "sweep-epsilons",
    "sweep-seeds",
    "sweep-n",
    "estimator",
    "mode",
    "access",
    "subset",
    "inject-dirac-sign-flip",
];

/// Parses `key = value` lines; `#` starts a comment. Keys use the flag
/// spelling, with `_` accepted for `-`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key = value", i + 1))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key {key:?}", i + 1);
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            bail!("config line {}: duplicate key {key:?}", i + 1);
        }
    }
    Ok(map)
}

struct Layer<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Layer<'_> {
    fn scalar<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
            .transpose()
    }

    fn list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
                    .collect::<Result<Vec<T>>>()
            })
            .transpose()
    }

    fn choice<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.file
            .get(key)
            .map(|v| T::from_str(v, true).map_err(|e| anyhow!("config key {key}: {e}")))
            .transpose()
    }

    fn path(&self, flag: Option<PathBuf>, key: &str, base: &Path) -> Option<PathBuf> {
        flag.or_else(|| self.file.get(key).map(|v| base.join(v)))
    }
}

impl RunConfig {
    /// Merges flags with the config file (if any) and validates the result.
    pub fn resolve(command: Command, flags: Flags) -> Result<Self> {
        let (file, base) = match &flags.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (parse_config_file(&text).with_context(|| path.display().to_string())?, base)
            }
            None => (BTreeMap::new(), PathBuf::new()),
        };
        let layer = Layer { file: &file };

        let pairs = layer.path(flags.pairs, "pairs", &base);
        let edges = layer.path(flags.edges, "edges", &base);
        let signal = layer.path(flags.signal, "signal", &base);
        let from_result = layer.path(flags.from_result, "from-result", &base);
        let input = match (pairs, edges, signal, from_result) {
            (Some(p), None, None, None) => Input::Pairs(p),
            (None, Some(edges), Some(signal), None) => Input::EdgesAndSignal { edges, signal },
            (None, None, None, Some(r)) => Input::RankResult(r),
            (None, None, None, None) => Input::None,
            (None, Some(_), None, None) | (None, None, Some(_), None) => {
                bail!("--edges and --signal must be given together")
            }
            _ => bail!("give exactly one input: --pairs, --edges with --signal, or --from-result"),
        };

        let default_eps = match command {
            Command::Estimate => 0.05,
            _ => 1e-3,
        };
        let inject = flags.inject_dirac_sign_flip
            || layer.scalar::<bool>(None, "inject-dirac-sign-flip")?.unwrap_or(false);
        let cfg = RunConfig {
            command,
            input,
            k: layer.scalar(flags.k, "k")?.unwrap_or(1),
            epsilon: layer.scalar(flags.epsilon, "epsilon")?.unwrap_or(default_eps),
            delta: layer.scalar(flags.delta, "delta")?.unwrap_or(0.05),
            kappa: layer.scalar(flags.kappa, "kappa")?,
            gamma_g: layer.scalar(flags.gamma_g, "gamma-g")?.unwrap_or(DEFAULT_GAMMA_G),
            target_distance: layer.scalar(flags.target_distance, "target-distance")?,
            seed: layer.scalar(flags.seed, "seed")?.unwrap_or(0),
            out: layer.path(flags.out, "out", &base),
            sweep_epsilons: layer.list(flags.sweep_epsilons, "sweep-epsilons")?.unwrap_or_default(),
            sweep_seeds: layer.list(flags.sweep_seeds, "sweep-seeds")?.unwrap_or_default(),
            sweep_n: layer.list(flags.sweep_n, "sweep-n")?.unwrap_or_default(),
            estimator: layer.choice(flags.estimator, "estimator")?.unwrap_or(EstimatorChoice::ConsistencyG),
            mode: layer.choice(flags.mode, "mode")?.unwrap_or(ModeChoice::Hadamard).into(),
            access: layer.choice(flags.access, "access")?.unwrap_or(AccessChoice::Controlled).into(),
            subset: layer.list(flags.subset, "subset")?,
            inject_dirac_sign_flip: inject,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let needs_data = matches!(self.command, Command::Rank | Command::Qsim | Command::Estimate);
        if needs_data && self.input == Input::None {
            bail!("no input: give --pairs or --edges with --signal");
        }
        if self.command != Command::Rank && matches!(self.input, Input::RankResult(_)) {
            bail!("--from-result only applies to rank");
        }
        if self.command == Command::Verify && self.input != Input::None {
            bail!("verify runs on built-in fixtures and takes no input files");
        }
        if self.k == 0 {
            bail!("k must be at least 1");
        }
        for &e in std::iter::once(&self.epsilon).chain(&self.sweep_epsilons) {
            if !(e > 0.0 && e < 1.0) {
                bail!("epsilon must lie in (0, 1), got {e}");
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            bail!("delta must lie in (0, 1), got {}", self.delta);
        }
        if !(self.gamma_g > 0.0 && self.gamma_g <= 1.0) {
            bail!("gamma-g must lie in (0, 1], got {}", self.gamma_g);
        }
        if let Some(t) = self.target_distance {
            if !(t > 0.0) {
                bail!("target-distance must be positive, got {t}");
            }
        }
        if self.sweep_n.iter().any(|&n| !(2..=hodgeq_core::dirac::MAX_QUBITS).contains(&n)) {
            bail!("sweep-n values must lie in 2..={}", hodgeq_core::dirac::MAX_QUBITS);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_fills_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# sweep\nepsilon = 0.01\nseed=7\nsweep_epsilons = 0.1, 0.05\npairs = data.csv\n").unwrap();
        let flags = Flags { config: Some(path), seed: Some(9), ..Flags::default() };
        let cfg = RunConfig::resolve(Command::Qsim, flags).unwrap();
        assert_eq!(cfg.epsilon, 0.01);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.sweep_epsilons, vec![0.1, 0.05]);
        assert_eq!(cfg.input, Input::Pairs(dir.path().join("data.csv")));
    }

    #[test]
    fn config_errors_name_the_line() {
        let err = parse_config_file("k = 1\nnonsense\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_config_file("colour = red").unwrap_err();
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn inputs_must_be_unambiguous() {
        let flags = Flags { edges: Some("g.txt".into()), ..Flags::default() };
        assert!(RunConfig::resolve(Command::Rank, flags).is_err());
        assert!(RunConfig::resolve(Command::Rank, Flags::default()).is_err());
        assert!(RunConfig::resolve(Command::Verify, Flags::default()).is_ok());
    }

    #[test]
    fn parameters_are_range_checked() {
        let flags = Flags { pairs: Some("p.csv".into()), epsilon: Some(1.5), ..Flags::default() };
        assert!(RunConfig::resolve(Command::Qsim, flags).is_err());
        let flags = Flags { pairs: Some("p.csv".into()), k: Some(0), ..Flags::default() };
        assert!(RunConfig::resolve(Command::Qsim, flags).is_err());
    }
}
