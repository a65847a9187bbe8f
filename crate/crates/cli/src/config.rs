//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! topology = 6-10-1
//! algorithms = trainlm,traingd
//! replicates = 20
//! ```
//!
//! Every key has a default, so an empty file is a complete configuration.
//! [`manifest_entries`] writes the resolved values back in the same syntax,
//! which makes a manifest a valid config file.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use bpselect::harness::ExperimentConfig;
use bpselect::network::{Activation, InitScheme, Topology};
use bpselect::optimizers::AlgorithmId;

use crate::CliError;

/// Recognised keys, in manifest order.
pub const KEYS: &[&str] = &[
    "dataset",
    "normalization",
    "topology",
    "activations",
    "init_scheme",
    "goal_metric",
    "algorithms",
    "replicates",
    "match_tolerance",
    "alpha",
    "seed",
    "max_epochs",
    "goal",
    "learning_rate",
    "min_gradient",
    "mc",
    "lr_inc",
    "lr_dec",
    "max_perf_inc",
    "rp_delta0",
    "rp_inc",
    "rp_dec",
    "rp_delta_min",
    "rp_delta_max",
    "mu0",
    "mu_inc",
    "mu_dec",
    "mu_max",
    "scg_sigma",
    "scg_lambda0",
    "ls_c1",
    "cg_c2",
    "qn_c2",
    "ls_max_iter",
];

/// `dataset` value meaning the sample compiled into the binary.
pub const BUNDLED: &str = "bundled";

/// Only min-max scaling to [-1, 1] is implemented; the key exists so the
/// choice shows up in manifests.
const NORMALIZATION: &str = "minmax_symmetric";
const GOAL_METRIC: &str = "mse";

fn invalid(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {msg}"))
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| invalid(key, format!("cannot parse `{value}`")))
}

/// Splits config text into key/value pairs. Duplicate keys within one file
/// are rejected since they are almost always editing mistakes.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, found `{line}`", i + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(CliError::Config(format!("line {}: `{key}` given twice", i + 1)));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Builds a config from file text, then applies `overrides` in order.
/// Invariants are checked on the final result only, so an override may fix
/// a value the file got wrong.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig, CliError> {
    let mut values: BTreeMap<String, String> = parse_entries(text)?.into_iter().collect();
    for (key, value) in overrides {
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        values.insert(key.clone(), value.trim().to_string());
    }

    let mut cfg = ExperimentConfig::default();
    let mut sizes = cfg.topology.layer_sizes().to_vec();
    let mut activations: Option<Vec<Activation>> = None;
    for (key, value) in &values {
        let v = value.as_str();
        let h = &mut cfg.hyper;
        match key.as_str() {
            "dataset" => cfg.dataset = if v == BUNDLED { None } else { Some(PathBuf::from(v)) },
            "normalization" if v != NORMALIZATION => return Err(invalid(key, format!("only `{NORMALIZATION}` is supported"))),
            "goal_metric" if v != GOAL_METRIC => return Err(invalid(key, format!("only `{GOAL_METRIC}` is supported"))),
            "normalization" | "goal_metric" => {}
            "topology" => sizes = Topology::parse_sizes(v).map_err(|e| invalid(key, e))?,
            "activations" => {
                activations = Some(
                    v.split(',').map(|a| a.parse::<Activation>()).collect::<Result<_, _>>().map_err(|e| invalid(key, e))?,
                )
            }
            "init_scheme" => cfg.init_scheme = v.parse::<InitScheme>().map_err(|e| invalid(key, e))?,
            "algorithms" => cfg.algorithms = AlgorithmId::parse_list(v).map_err(|e| invalid(key, e))?,
            "replicates" => cfg.replicates = parse_value(key, v)?,
            "match_tolerance" => cfg.match_tolerance = parse_value(key, v)?,
            "alpha" => cfg.alpha = parse_value(key, v)?,
            "seed" => cfg.master_seed = parse_value(key, v)?,
            "max_epochs" => cfg.train.max_epochs = parse_value(key, v)?,
            "goal" => cfg.train.goal = parse_value(key, v)?,
            "learning_rate" => cfg.train.learning_rate = parse_value(key, v)?,
            "min_gradient" => cfg.train.min_gradient = parse_value(key, v)?,
            "mc" => h.mc = parse_value(key, v)?,
            "lr_inc" => h.lr_inc = parse_value(key, v)?,
            "lr_dec" => h.lr_dec = parse_value(key, v)?,
            "max_perf_inc" => h.max_perf_inc = parse_value(key, v)?,
            "rp_delta0" => h.rp_delta0 = parse_value(key, v)?,
            "rp_inc" => h.rp_inc = parse_value(key, v)?,
            "rp_dec" => h.rp_dec = parse_value(key, v)?,
            "rp_delta_min" => h.rp_delta_min = parse_value(key, v)?,
            "rp_delta_max" => h.rp_delta_max = parse_value(key, v)?,
            "mu0" => h.mu0 = parse_value(key, v)?,
            "mu_inc" => h.mu_inc = parse_value(key, v)?,
            "mu_dec" => h.mu_dec = parse_value(key, v)?,
            "mu_max" => h.mu_max = parse_value(key, v)?,
            "scg_sigma" => h.scg_sigma = parse_value(key, v)?,
            "scg_lambda0" => h.scg_lambda0 = parse_value(key, v)?,
            "ls_c1" => h.ls_c1 = parse_value(key, v)?,
            "cg_c2" => h.cg_c2 = parse_value(key, v)?,
            "qn_c2" => h.qn_c2 = parse_value(key, v)?,
            "ls_max_iter" => h.ls_max_iter = parse_value(key, v)?,
            other => unreachable!("key `{other}` listed in KEYS but not handled"),
        }
    }
    cfg.topology = match activations {
        Some(a) => Topology::new(sizes, a),
        None => Topology::with_default_activations(sizes),
    }
    .map_err(|e| invalid("topology", e))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Every effective parameter as `(key, value)`, in [`KEYS`] order. Floats
/// use the shortest form that parses back to the same value.
pub fn manifest_entries(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let t = &cfg.train;
    let h = &cfg.hyper;
    let dataset = match &cfg.dataset {
        Some(p) => p.display().to_string(),
        None => BUNDLED.to_string(),
    };
    let activations: Vec<&str> = cfg.topology.activations().iter().map(|a| a.name()).collect();
    let algorithms: Vec<&str> = cfg.algorithms.iter().map(|a| a.name()).collect();
    let values = [
        dataset,
        NORMALIZATION.to_string(),
        cfg.topology.sizes_string(),
        activations.join(","),
        cfg.init_scheme.name().to_string(),
        GOAL_METRIC.to_string(),
        algorithms.join(","),
        cfg.replicates.to_string(),
        cfg.match_tolerance.to_string(),
        cfg.alpha.to_string(),
        cfg.master_seed.to_string(),
        t.max_epochs.to_string(),
        t.goal.to_string(),
        t.learning_rate.to_string(),
        t.min_gradient.to_string(),
        h.mc.to_string(),
        h.lr_inc.to_string(),
        h.lr_dec.to_string(),
        h.max_perf_inc.to_string(),
        h.rp_delta0.to_string(),
        h.rp_inc.to_string(),
        h.rp_dec.to_string(),
        h.rp_delta_min.to_string(),
        h.rp_delta_max.to_string(),
        h.mu0.to_string(),
        h.mu_inc.to_string(),
        h.mu_dec.to_string(),
        h.mu_max.to_string(),
        h.scg_sigma.to_string(),
        h.scg_lambda0.to_string(),
        h.ls_c1.to_string(),
        h.cg_c2.to_string(),
        h.qn_c2.to_string(),
        h.ls_max_iter.to_string(),
    ];
    KEYS.iter().map(|k| k.to_string()).zip(values).collect()
}

pub fn manifest_text(cfg: &ExperimentConfig, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    for (k, v) in manifest_entries(cfg) {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("", &[]).unwrap();
        assert_eq!(cfg.train.max_epochs, 1000);
        assert_eq!(cfg.train.goal, 0.001);
        assert_eq!(cfg.train.learning_rate, 0.05);
        assert_eq!(cfg.replicates, 20);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.algorithms.len(), 12);
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn two_algorithm_run() {
        let cfg = parse_config("algorithms = trainlm,traingd\n", &[]).unwrap();
        assert_eq!(cfg.algorithms, [AlgorithmId::Trainlm, AlgorithmId::Traingd]);
    }

    #[test]
    fn single_replicate_is_rejected() {
        let err = parse_config("replicates = 1", &[]).unwrap_err().to_string();
        assert!(err.contains("replicates ≥ 2"), "{err}");
    }

    #[test]
    fn unknown_and_malformed_lines() {
        assert!(parse_config("learning_rat = 0.1", &[]).unwrap_err().to_string().contains("unknown key"));
        assert!(parse_config("replicates 20", &[]).is_err());
        assert!(parse_config("replicates = twenty", &[]).unwrap_err().to_string().contains("replicates"));
        assert!(parse_config("seed = 1\nseed = 2", &[]).is_err());
        assert!(parse_config("goal_metric = sse", &[]).is_err());
        assert!(parse_config("", &ov(&[("nope", "1")])).is_err());
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config("# header\n\n  seed = 9   # trailing\n", &[]).unwrap();
        assert_eq!(cfg.master_seed, 9);
    }

    #[test]
    fn overrides_win_over_file() {
        let cfg = parse_config("replicates = 1\nalpha = 0.1", &ov(&[("replicates", "5")])).unwrap();
        assert_eq!(cfg.replicates, 5);
        assert_eq!(cfg.alpha, 0.1);
    }

    #[test]
    fn topology_and_activations() {
        let cfg = parse_config("topology = 6-4-3-1\n", &[]).unwrap();
        assert_eq!(cfg.topology.layer_sizes(), [6, 4, 3, 1]);
        let cfg = parse_config("topology = 6-4-1\nactivations = logsig,purelin", &[]).unwrap();
        assert_eq!(cfg.topology.activations(), [Activation::SigmoidLogistic, Activation::Linear]);
        assert!(parse_config("topology = 5-4-1", &[]).is_err());
        assert!(parse_config("topology = 6-4-1\nactivations = linear", &[]).is_err());
    }

    #[test]
    fn manifest_parses_back_to_the_same_config() {
        let text = "dataset = data/items.csv\ntopology = 6-7-1\nalgorithms = trainscg,trainrp\nreplicates = 3\n\
                    match_tolerance = 0.1\nseed = 18446744073709551615\ngoal = 0.00012345678901234567\nmu_max = 1e12\n";
        let cfg = parse_config(text, &[]).unwrap();
        let manifest = manifest_text(&cfg, &["written by a test".to_string()]);
        assert_eq!(parse_config(&manifest, &[]).unwrap(), cfg);
        assert_eq!(manifest.lines().filter(|l| !l.starts_with('#')).count(), KEYS.len());
    }
}
