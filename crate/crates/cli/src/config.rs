//! Training run configuration, resolved from defaults, an optional
//! `key=value` file and command-line flags, in increasing precedence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use checkers_core::env::RewardScheme;
use checkers_core::ppo::{PpoConfig, SharingConfig, TrainConfig};
use checkers_core::rules::default_turn_limit;
use checkers_core::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub eval_games: usize,
    pub eval_turn_limit: u32,
    /// Evaluate every this many iterations; 0 disables evaluation.
    pub eval_every: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { train: TrainConfig::default(), eval_games: 30, eval_turn_limit: 150, eval_every: 1 }
    }
}

/// Keys in the order they are written.
pub const KEYS: &[&str] = &[
    "n",
    "sharing",
    "scheme",
    "iterations",
    "steps",
    "epochs",
    "minibatch",
    "lr",
    "clip",
    "gamma",
    "lambda",
    "entropy-coef",
    "value-coef",
    "turn-limit",
    "seed",
    "envs",
    "eval-games",
    "eval-turn-limit",
    "eval-every",
];

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key=value, got '{line}'") })?;
        let k = normalize(k);
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::Parse { line: i + 1, msg: format!("unknown key '{k}'") });
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: '{v}' is not a valid number")))
}

impl RunConfig {
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let t = &self.train;
        let p = &t.ppo;
        let vals = [
            t.n.to_string(),
            t.sharing.name().to_string(),
            t.scheme.name().to_string(),
            p.iterations.to_string(),
            p.steps_per_iteration.to_string(),
            p.epochs.to_string(),
            p.minibatch_size.to_string(),
            p.learning_rate.to_string(),
            p.clip_eps.to_string(),
            p.gamma.to_string(),
            p.gae_lambda.to_string(),
            p.entropy_coef.to_string(),
            p.value_coef.to_string(),
            t.turn_limit.to_string(),
            t.seed.to_string(),
            t.num_envs.to_string(),
            self.eval_games.to_string(),
            self.eval_turn_limit.to_string(),
            self.eval_every.to_string(),
        ];
        KEYS.iter().map(|k| k.to_string()).zip(vals).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Defaults, then `file`, then `flags`. A turn limit left unset follows
    /// the board size.
    pub fn resolve(file: &[(String, String)], flags: &[(String, String)]) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in file.iter().chain(flags) {
            let k = normalize(k);
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key '{k}'")));
            }
            map.insert(k, v.clone());
        }
        let mut c = RunConfig::default();
        let get = |k: &str| map.get(k).map(String::as_str);
        if let Some(v) = get("n") {
            c.train.n = num("n", v)?;
        }
        c.train.turn_limit = default_turn_limit(c.train.n);
        let t = &mut c.train;
        let p: &mut PpoConfig = &mut t.ppo;
        for (k, v) in &map {
            let v = v.as_str();
            match k.as_str() {
                "n" => {}
                "sharing" => t.sharing = v.parse::<SharingConfig>()?,
                "scheme" => t.scheme = v.parse::<RewardScheme>()?,
                "iterations" => p.iterations = num(k, v)?,
                "steps" => p.steps_per_iteration = num(k, v)?,
                "epochs" => p.epochs = num(k, v)?,
                "minibatch" => p.minibatch_size = num(k, v)?,
                "lr" => p.learning_rate = num(k, v)?,
                "clip" => p.clip_eps = num(k, v)?,
                "gamma" => p.gamma = num(k, v)?,
                "lambda" => p.gae_lambda = num(k, v)?,
                "entropy-coef" => p.entropy_coef = num(k, v)?,
                "value-coef" => p.value_coef = num(k, v)?,
                "turn-limit" => t.turn_limit = num(k, v)?,
                "seed" => t.seed = num(k, v)?,
                "envs" => t.num_envs = num(k, v)?,
                "eval-games" => c.eval_games = num(k, v)?,
                "eval-turn-limit" => c.eval_turn_limit = num(k, v)?,
                "eval-every" => c.eval_every = num(k, v)?,
                _ => unreachable!("keys were checked"),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.eval_every > 0 && (self.eval_games == 0 || self.eval_turn_limit == 0) {
            return Err(Error::Config("eval-games and eval-turn-limit must be positive".into()));
        }
        Ok(())
    }

    pub fn load_pairs(path: &Path) -> Result<Vec<(String, String)>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        parse_pairs(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let file = kv(&[("iterations", "7"), ("seed", "3")]);
        let flags = kv(&[("seed", "9")]);
        let c = RunConfig::resolve(&file, &flags).unwrap();
        assert_eq!(c.train.ppo.iterations, 7);
        assert_eq!(c.train.seed, 9);
        assert_eq!(c.train.ppo.steps_per_iteration, 4000);
    }

    #[test]
    fn text_roundtrip() {
        let c = RunConfig::resolve(&kv(&[("entropy-coef", "0.005"), ("sharing", "independent")]), &[]).unwrap();
        let back = RunConfig::resolve(&parse_pairs(&c.to_text()).unwrap(), &[]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn turn_limit_follows_board() {
        let c = RunConfig::resolve(&kv(&[("n", "4")]), &[]).unwrap();
        assert_eq!(c.train.turn_limit, 1000);
    }

    #[test]
    fn bad_input() {
        assert!(parse_pairs("bogus=1\n").is_err());
        assert!(matches!(parse_pairs("a b\n"), Err(Error::Parse { line: 1, .. })));
        assert!(RunConfig::resolve(&kv(&[("clip", "2")]), &[]).is_err());
        assert!(RunConfig::resolve(&kv(&[("steps", "x")]), &[]).is_err());
    }
}
