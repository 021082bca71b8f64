//! Plain-text run configuration: one `key = value` per line, `#` starts a comment.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};

use crate::dynamics::{OBParams, OBState};
use crate::error::{Error, Result};
use crate::spectral::ModeIndex;
use crate::subspace::{sample_midpoints, SProfiles};

/// Every key any command accepts.
pub const KNOWN_KEYS: &[&str] = &[
    "pr", "ra", "d", "dt", "t_end", "m_max", "n_max", "k", "nr", "seeds", "seed", "amplitude", "initial",
    "sample_every", "output_dir", "kmin", "kmax", "count",
];

/// Keys of `simulate` / `decompose` configurations.
pub const SIMULATION_KEYS: &[&str] =
    &["pr", "ra", "dt", "t_end", "m_max", "n_max", "initial", "seed", "amplitude", "sample_every", "output_dir"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl RunConfig {
    /// Parses with the full key set.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, KNOWN_KEYS)
    }

    /// Parses, rejecting keys outside `allowed`, duplicates and malformed lines.
    pub fn parse_with(text: &str, allowed: &[&str]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return config_err(format!("line {}: expected `key = value`", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return config_err(format!("line {}: bad key `{key}`", lineno + 1));
            }
            if !allowed.contains(&key) {
                return config_err(format!("line {}: unknown key `{key}`", lineno + 1));
            }
            if value.is_empty() {
                return config_err(format!("line {}: empty value for `{key}`", lineno + 1));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return config_err(format!("line {}: duplicate key `{key}`", lineno + 1));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path, allowed: &[&str]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse_with(&text, allowed)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => config_err(format!("`{key}` must be a finite number, got `{v}`")),
            },
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().or_else(|_| config_err(format!("`{key}` must be a non-negative integer, got `{v}`"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().or_else(|_| config_err(format!("`{key}` must be a non-negative integer, got `{v}`"))),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }
}

/// Named initial conditions for the layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Zero,
    /// `A = cos(pi z) + cos(2 pi z)`, `T = sin(pi z)`: data in the x-independent subspace.
    SModes,
    /// `SModes` plus a roll of size `amplitude`.
    Mixed,
    /// Stream-function `amplitude cos(2 pi x) sin(pi z)`.
    Roll,
    /// Seeded uniform coefficients of size `amplitude` on modes `m, n <= 3`.
    Random,
}

impl Preset {
    pub const ALL: [(&'static str, Preset); 5] = [
        ("zero", Preset::Zero),
        ("s_modes", Preset::SModes),
        ("mixed", Preset::Mixed),
        ("roll", Preset::Roll),
        ("random", Preset::Random),
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|(_, p)| *p)
    }
}

/// Initial data: a preset or a JSON state file.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Preset(Preset),
    File(String),
}

impl InitialSpec {
    pub fn parse(value: &str) -> Result<Self> {
        match Preset::from_name(value) {
            Some(p) => Ok(InitialSpec::Preset(p)),
            None if value.ends_with(".json") => Ok(InitialSpec::File(value.to_string())),
            None => config_err(format!("`initial` must be a preset (zero, s_modes, mixed, roll, random) or a .json file, got `{value}`")),
        }
    }
}

/// The x-independent profiles of the `s_modes` preset.
pub fn s_mode_profiles(n_max: usize, pr: f64, ra: f64) -> Result<SProfiles> {
    let nz = 2 * n_max + 2;
    let f = sample_midpoints(nz, |z| (PI * z).cos() + (2.0 * PI * z).cos());
    let g = sample_midpoints(nz, |z| (PI * z).sin());
    SProfiles::from_samples(&f, &g, n_max, pr, ra)
}

pub fn preset_state(preset: Preset, m_max: usize, n_max: usize, amplitude: f64, seed: u64, pr: f64, ra: f64) -> Result<OBState> {
    let mut s = OBState::zeros(m_max, n_max);
    let roll = |s: &mut OBState| -> Result<()> {
        if m_max >= 1 {
            s.stream.set(ModeIndex::cos(1, 1), amplitude)?;
            s.temperature.set(ModeIndex::sin(1, 1)?, amplitude)?;
        }
        Ok(())
    };
    match preset {
        Preset::Zero => {}
        Preset::SModes => s = s_mode_profiles(n_max, pr, ra)?.to_state(m_max, n_max)?,
        Preset::Mixed => {
            s = s_mode_profiles(n_max, pr, ra)?.to_state(m_max, n_max)?;
            roll(&mut s)?;
        }
        Preset::Roll => s.stream.set(ModeIndex::cos(1, 1), amplitude)?,
        Preset::Random => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for m in 0..=m_max.min(3) {
                for n in 1..=n_max.min(3) {
                    s.stream.set(ModeIndex::cos(m, n), amplitude * rng.gen_range(-1.0..1.0))?;
                    s.temperature.set(ModeIndex::cos(m, n), amplitude * rng.gen_range(-1.0..1.0))?;
                    if m >= 1 {
                        s.stream.set(ModeIndex::sin(m, n)?, amplitude * rng.gen_range(-1.0..1.0))?;
                        s.temperature.set(ModeIndex::sin(m, n)?, amplitude * rng.gen_range(-1.0..1.0))?;
                    }
                }
            }
        }
    }
    Ok(s)
}

/// Parsed `simulate` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub params: OBParams,
    pub initial: InitialSpec,
    pub amplitude: f64,
    pub seed: u64,
    pub sample_every: usize,
    pub output_dir: String,
}

impl SimulationConfig {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let pr = cfg.f64_or("pr", 1.0)?;
        let ra = cfg.f64_or("ra", 1000.0)?;
        let dt = cfg.f64_or("dt", 1e-3)?;
        let t_end = cfg.f64_or("t_end", 1.0)?;
        let m_max = cfg.usize_or("m_max", 8)?;
        let n_max = cfg.usize_or("n_max", 8)?;
        let params = OBParams::new(pr, ra, dt, t_end, m_max, n_max).map_err(|e| Error::Config(e.to_string()))?;
        let sample_every = cfg.usize_or("sample_every", 10)?;
        if sample_every == 0 {
            return config_err("`sample_every` must be at least 1");
        }
        Ok(Self {
            params,
            initial: InitialSpec::parse(cfg.str_or("initial", "s_modes"))?,
            amplitude: cfg.f64_or("amplitude", 1e-2)?,
            seed: cfg.u64_or("seed", 0)?,
            sample_every,
            output_dir: cfg.str_or("output_dir", "out").to_string(),
        })
    }

    /// Initial state; relative file paths resolve against `base_dir`.
    pub fn initial_state(&self, base_dir: &Path) -> Result<OBState> {
        let p = &self.params;
        let s = match &self.initial {
            InitialSpec::Preset(preset) => preset_state(*preset, p.m_max, p.n_max, self.amplitude, self.seed, p.pr, p.ra)?,
            InitialSpec::File(f) => {
                let path = base_dir.join(f);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                OBState::from_json(&text)?
            }
        };
        if s.m_max() != p.m_max || s.n_max() != p.n_max {
            return config_err(format!(
                "initial state truncation ({}, {}) differs from m_max = {}, n_max = {}",
                s.m_max(),
                s.n_max(),
                p.m_max,
                p.n_max
            ));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let c = RunConfig::parse("# run\npr = 0.7   # Prandtl\n\n  ra=500\ninitial = mixed\n").unwrap();
        assert_eq!(c.f64_or("pr", 0.0).unwrap(), 0.7);
        assert_eq!(c.f64_or("ra", 0.0).unwrap(), 500.0);
        assert_eq!(c.str_or("initial", ""), "mixed");
        assert_eq!(c.f64_or("dt", 0.25).unwrap(), 0.25);
    }

    #[test]
    fn rejects_bad_lines() {
        for text in ["pr 1", "bogus = 1", "pr = 1\npr = 2", "pr =", "Pr = 1", "= 3"] {
            assert!(matches!(RunConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
        let c = RunConfig::parse("ra = nan\nm_max = -1").unwrap();
        assert!(c.f64_or("ra", 0.0).is_err());
        assert!(c.usize_or("m_max", 0).is_err());
        assert!(RunConfig::parse_with("k = 3", SIMULATION_KEYS).is_err());
    }

    #[test]
    fn simulation_config_validates_ranges() {
        let ok = RunConfig::parse("pr = 1\nra = 3100\ndt = 0.005\nt_end = 1\ninitial = roll").unwrap();
        let s = SimulationConfig::from_config(&ok).unwrap();
        assert_eq!(s.initial, InitialSpec::Preset(Preset::Roll));
        let bad = RunConfig::parse("ra = 3100\ndt = 0.01").unwrap();
        assert!(matches!(SimulationConfig::from_config(&bad), Err(Error::Config(_))));
        let bad = RunConfig::parse("initial = swirl").unwrap();
        assert!(SimulationConfig::from_config(&bad).is_err());
    }

    #[test]
    fn presets() {
        let s = preset_state(Preset::SModes, 4, 4, 0.1, 0, 1.0, 10.0).unwrap();
        assert_eq!(s.max_fluctuating_coeff(), 0.0);
        assert!((s.mean_flow).abs() < 1e-15);
        let v = s.velocity();
        assert!((v.eval(0.3, 0.2).0 - ((PI * 0.2).cos() + (2.0 * PI * 0.2).cos())).abs() < 1e-12);
        let r = preset_state(Preset::Random, 4, 4, 0.1, 3, 1.0, 10.0).unwrap();
        assert_eq!(r, preset_state(Preset::Random, 4, 4, 0.1, 3, 1.0, 10.0).unwrap());
        assert!(r.max_fluctuating_coeff() > 0.0);
        assert_eq!(preset_state(Preset::Zero, 2, 2, 1.0, 0, 1.0, 1.0).unwrap(), OBState::zeros(2, 2));
    }
}
