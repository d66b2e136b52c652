//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # loop 1
//! system.1.num = 0.5
//! system.1.den = 1,-0.9
//! controller.1.num = 0.3797,-0.34173
//! controller.1.den = 1,-1
//! N = 2000
//! M = 100
//! snr_db = 10          # or 1:50:1, or 1,5,10,20, or inf
//! runs = 1
//! seed = 0
//! estimator = tc       # or ls
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use irnorm_core::benchmarks::Loop;
use irnorm_core::{RngSeed, TransferFunction};

use crate::error::{HarnessError, Result};

/// IR estimator used by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    RegularizedTc,
    PlainLs,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::RegularizedTc => "regularized-tc",
            Estimator::PlainLs => "plain-ls",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "tc" | "regularized-tc" => Ok(Estimator::RegularizedTc),
            "ls" | "plain-ls" => Ok(Estimator::PlainLs),
            other => Err(format!("unknown estimator `{other}` (expected tc or ls)")),
        }
    }
}

/// Noise levels an experiment visits. `None` entries are noise-free.
#[derive(Debug, Clone, PartialEq)]
pub enum SnrSpec {
    Points(Vec<Option<f64>>),
    Sweep { start: f64, stop: f64, step: f64 },
}

impl SnrSpec {
    pub fn points(&self) -> Vec<Option<f64>> {
        match self {
            SnrSpec::Points(p) => p.clone(),
            SnrSpec::Sweep { start, stop, step } => {
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|k| Some(start + step * k as f64)).collect()
            }
        }
    }
}

impl FromStr for SnrSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse_point = |t: &str| -> std::result::Result<Option<f64>, String> {
            let t = t.trim();
            if t.eq_ignore_ascii_case("inf") {
                return Ok(None);
            }
            let v: f64 = t.parse().map_err(|_| format!("invalid SNR value `{t}`"))?;
            if v.is_finite() {
                Ok(Some(v))
            } else {
                Err(format!("invalid SNR value `{t}`"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, step] => {
                let num = |t: &str| {
                    parse_point(t)?.ok_or_else(|| "sweep bounds must be finite".to_string())
                };
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if !(step > 0.0) {
                    return Err("sweep step must be positive".into());
                }
                if stop < start {
                    return Err("sweep stop is below start".into());
                }
                Ok(SnrSpec::Sweep { start, stop, step })
            }
            [single] => Ok(SnrSpec::Points(
                single.split(',').map(parse_point).collect::<std::result::Result<_, _>>()?,
            )),
            _ => Err(format!("invalid snr_db `{s}`")),
        }
    }
}

/// One loop of the experiment with its config index.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemEntry {
    pub id: usize,
    pub system: Loop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub systems: Vec<SystemEntry>,
    pub samples: usize,
    pub order: usize,
    pub snr: SnrSpec,
    pub runs: usize,
    pub master_seed: RngSeed,
    pub estimator: Estimator,
}

impl ExperimentConfig {
    /// Defaults of the paper-scale setup around the given loops.
    pub fn new(systems: Vec<SystemEntry>) -> Self {
        Self {
            systems,
            samples: 2000,
            order: 100,
            snr: SnrSpec::Points(vec![Some(10.0)]),
            runs: 1,
            master_seed: RngSeed(0),
            estimator: Estimator::RegularizedTc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.systems.is_empty() {
            return bad("no systems configured");
        }
        if self.order < 1 {
            return bad("M must be at least 1");
        }
        if self.samples <= self.order {
            return bad("N must exceed M");
        }
        if self.runs < 1 {
            return bad("runs must be at least 1");
        }
        if self.snr.points().is_empty() {
            return bad("snr_db selects no points");
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        text.parse()
    }
}

fn coefficients(line: usize, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| HarnessError::Parse {
                line,
                message: format!("invalid coefficient `{}`", t.trim()),
            })
        })
        .collect()
}

#[derive(Default)]
struct PartialLoop {
    plant_num: Option<Vec<f64>>,
    plant_den: Option<Vec<f64>>,
    ctrl_num: Option<Vec<f64>>,
    ctrl_den: Option<Vec<f64>>,
}

impl FromStr for ExperimentConfig {
    type Err = HarnessError;

    fn from_str(text: &str) -> Result<Self> {
        let mut loops: BTreeMap<usize, PartialLoop> = BTreeMap::new();
        let mut config = ExperimentConfig::new(Vec::new());
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| HarnessError::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let parse_err = |message: String| HarnessError::Parse { line, message };
            let int = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| parse_err(format!("`{key}` expects a nonnegative integer")))
            };
            match key {
                "N" => config.samples = int(value)?,
                "M" => config.order = int(value)?,
                "runs" => config.runs = int(value)?,
                "seed" => {
                    config.master_seed = RngSeed(
                        value
                            .parse()
                            .map_err(|_| parse_err("`seed` expects an unsigned 64-bit integer".into()))?,
                    )
                }
                "snr_db" => config.snr = value.parse().map_err(parse_err)?,
                "estimator" => config.estimator = value.parse().map_err(parse_err)?,
                _ => {
                    let parts: Vec<&str> = key.split('.').collect();
                    let [block, id, field] = parts.as_slice() else {
                        return Err(parse_err(format!("unknown key `{key}`")));
                    };
                    let id: usize = id
                        .parse()
                        .map_err(|_| parse_err(format!("invalid system index in `{key}`")))?;
                    let entry = loops.entry(id).or_default();
                    let coeffs = Some(coefficients(line, value)?);
                    match (*block, *field) {
                        ("system", "num") => entry.plant_num = coeffs,
                        ("system", "den") => entry.plant_den = coeffs,
                        ("controller", "num") => entry.ctrl_num = coeffs,
                        ("controller", "den") => entry.ctrl_den = coeffs,
                        _ => return Err(parse_err(format!("unknown key `{key}`"))),
                    }
                }
            }
        }
        for (id, partial) in loops {
            let missing = |what: &str| HarnessError::Config(format!("system {id}: missing {what}"));
            let tf = |num: Option<Vec<f64>>, den: Option<Vec<f64>>, which: &str| -> Result<TransferFunction> {
                let num = num.ok_or_else(|| missing(&format!("{which}.{id}.num")))?;
                let den = den.ok_or_else(|| missing(&format!("{which}.{id}.den")))?;
                TransferFunction::new(num, den).map_err(|source| HarnessError::System { system: id, source })
            };
            let plant = tf(partial.plant_num, partial.plant_den, "system")?;
            let controller = tf(partial.ctrl_num, partial.ctrl_den, "controller")?;
            config.systems.push(SystemEntry {
                id,
                system: Loop { plant, controller },
            });
        }
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_LOOP: &str = "system.1.num = 0.5\nsystem.1.den = 1,-0.9\ncontroller.1.num = 0.3797, -0.34173\ncontroller.1.den = 1,-1\n";

    #[test]
    fn parses_minimal_config_with_defaults() {
        let c: ExperimentConfig = ONE_LOOP.parse().unwrap();
        assert_eq!(c.systems.len(), 1);
        assert_eq!(c.systems[0].id, 1);
        assert_eq!(c.systems[0].system.plant.den(), &[1.0, -0.9]);
        assert_eq!((c.samples, c.order, c.runs), (2000, 100, 1));
        assert_eq!(c.snr.points(), vec![Some(10.0)]);
        assert_eq!(c.estimator, Estimator::RegularizedTc);
    }

    #[test]
    fn parses_every_scalar_key() {
        let text = format!("{ONE_LOOP}N = 500 # comment\nM=20\nsnr_db = 1:5:2\nruns = 3\nseed = 42\nestimator = ls\n");
        let c: ExperimentConfig = text.parse().unwrap();
        assert_eq!((c.samples, c.order, c.runs), (500, 20, 3));
        assert_eq!(c.master_seed, RngSeed(42));
        assert_eq!(c.estimator, Estimator::PlainLs);
        assert_eq!(c.snr.points(), vec![Some(1.0), Some(3.0), Some(5.0)]);
    }

    #[test]
    fn snr_forms() {
        assert_eq!("inf".parse::<SnrSpec>().unwrap().points(), vec![None]);
        assert_eq!(
            "1,5,10,20".parse::<SnrSpec>().unwrap().points(),
            vec![Some(1.0), Some(5.0), Some(10.0), Some(20.0)]
        );
        assert_eq!("1:50:1".parse::<SnrSpec>().unwrap().points().len(), 50);
        assert_eq!("0.1:50:0.1".parse::<SnrSpec>().unwrap().points().len(), 500);
        assert!("1:5:0".parse::<SnrSpec>().is_err());
        assert!("5:1:1".parse::<SnrSpec>().is_err());
        assert!("loud".parse::<SnrSpec>().is_err());
    }

    #[test]
    fn errors_name_the_line() {
        let err = format!("{ONE_LOOP}N = many\n").parse::<ExperimentConfig>().unwrap_err();
        assert!(matches!(err, HarnessError::Parse { line: 5, .. }), "{err}");
        let err = "system.1.num = 1,x\n".parse::<ExperimentConfig>().unwrap_err();
        assert!(matches!(err, HarnessError::Parse { line: 1, .. }));
        let err = "bogus = 1\n".parse::<ExperimentConfig>().unwrap_err();
        assert!(matches!(err, HarnessError::Parse { line: 1, .. }));
    }

    #[test]
    fn invariants_enforced() {
        assert!(format!("{ONE_LOOP}N = 100\nM = 100\n").parse::<ExperimentConfig>().is_err());
        assert!(format!("{ONE_LOOP}runs = 0\n").parse::<ExperimentConfig>().is_err());
        assert!("".parse::<ExperimentConfig>().is_err());
        assert!("system.1.num = 1\nsystem.1.den = 1\n".parse::<ExperimentConfig>().is_err());
    }
}
