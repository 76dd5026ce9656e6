//! Plain-text configuration: one `key = value` pair per line, `#` comments.
//!
//! Grammar:
//!
//! ```text
//! file    := line*
//! line    := ws* (comment | pair)? ws* "\n"
//! comment := "#" any*
//! pair    := key ws* "=" ws* value
//! ```
//!
//! Recognized keys mirror the CLI flags: `mode`, `a-min`, `a-max`,
//! `a-count`, `t-min`, `t-max`, `t-count`, `chi`, `gamma`, `n-trunc`,
//! `nonlinear-conjugate`, `embedding`, `tau`, `dim`, `max-tau`, `mi-bins`,
//! `max-embed-dim`, `fnn-r-tol`, `fnn-threshold`, `estimator-samples`,
//! `subsample`, `seed`, `transient-periods`, `total-periods`,
//! `samples-per-period`, `bin-width`, `bin-stride`, `trajectories`,
//! `max-simplices`. Unknown keys are errors; later values override earlier
//! ones; CLI flags override the file.

use thiserror::Error;

use super::{EmbeddingPolicy, Mode, SweepConfig};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_bool(value: &str, line: usize) -> Result<bool, ConfigError> {
    match value {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(err(line, format!("expected on/off, got {other:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| err(line, format!("invalid value {value:?} for {key}")))
}

/// Applies `key = value` lines to `config` in order.
pub fn apply_config_text(config: &mut SweepConfig, text: &str) -> Result<(), ConfigError> {
    // `embedding = fixed` combines with `tau` / `dim` lines regardless of
    // their order, so collect the pieces first.
    let mut fixed_embedding = matches!(config.embedding, EmbeddingPolicy::Fixed { .. });
    let (mut tau, mut dim) = match config.embedding {
        EmbeddingPolicy::Fixed { tau, dim } => (tau, dim),
        EmbeddingPolicy::Auto => (20, 2),
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(line_no, format!("expected `key = value`, got {line:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "mode" => {
                config.mode = Mode::parse(value).ok_or_else(|| {
                    err(
                        line_no,
                        format!(
                            "unknown mode {value:?} (classical, quantum-x, quantum-photon-count)"
                        ),
                    )
                })?;
            }
            "a-min" => config.a_grid.min = parse_num(value, line_no, key)?,
            "a-max" => config.a_grid.max = parse_num(value, line_no, key)?,
            "a-count" => config.a_grid.count = parse_num(value, line_no, key)?,
            "t-min" => config.t_grid.min = parse_num(value, line_no, key)?,
            "t-max" => config.t_grid.max = parse_num(value, line_no, key)?,
            "t-count" => config.t_grid.count = parse_num(value, line_no, key)?,
            "chi" => config.chi = parse_num(value, line_no, key)?,
            "gamma" => config.gamma = parse_num(value, line_no, key)?,
            "n-trunc" => config.n_trunc = parse_num(value, line_no, key)?,
            "nonlinear-conjugate" => config.nonlinear_conjugate = parse_bool(value, line_no)?,
            "embedding" => match value {
                "auto" => fixed_embedding = false,
                "fixed" => fixed_embedding = true,
                other => {
                    return Err(err(line_no, format!("embedding must be auto or fixed, got {other:?}")))
                }
            },
            "tau" => tau = parse_num(value, line_no, key)?,
            "dim" => dim = parse_num(value, line_no, key)?,
            "max-tau" => config.max_tau = parse_num(value, line_no, key)?,
            "mi-bins" => config.mi_bins = parse_num(value, line_no, key)?,
            "max-embed-dim" => config.max_embed_dim = parse_num(value, line_no, key)?,
            "fnn-r-tol" => config.fnn_r_tol = parse_num(value, line_no, key)?,
            "fnn-threshold" => config.fnn_threshold = parse_num(value, line_no, key)?,
            "estimator-samples" => config.estimator_samples = parse_num(value, line_no, key)?,
            "subsample" => config.subsample = parse_num(value, line_no, key)?,
            "seed" => config.seed = parse_num(value, line_no, key)?,
            "transient-periods" => config.transient_periods = parse_num(value, line_no, key)?,
            "total-periods" => config.total_periods = parse_num(value, line_no, key)?,
            "samples-per-period" => config.samples_per_period = parse_num(value, line_no, key)?,
            "bin-width" => config.bin_width = parse_num(value, line_no, key)?,
            "bin-stride" => config.bin_stride = parse_num(value, line_no, key)?,
            "trajectories" => config.trajectories = parse_num(value, line_no, key)?,
            "max-simplices" => config.max_simplices = parse_num(value, line_no, key)?,
            other => return Err(err(line_no, format!("unknown key {other:?}"))),
        }
    }

    config.embedding = if fixed_embedding {
        EmbeddingPolicy::Fixed { tau, dim }
    } else {
        EmbeddingPolicy::Auto
    };
    Ok(())
}

/// Canonical `key = value` rendering; reparsing it reproduces the config,
/// and its hash names the artifacts of a run.
pub fn canonical_config_string(config: &SweepConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    kv("mode", config.mode.as_str().to_string());
    kv("a-min", format!("{:?}", config.a_grid.min));
    kv("a-max", format!("{:?}", config.a_grid.max));
    kv("a-count", config.a_grid.count.to_string());
    kv("t-min", format!("{:?}", config.t_grid.min));
    kv("t-max", format!("{:?}", config.t_grid.max));
    kv("t-count", config.t_grid.count.to_string());
    kv("chi", format!("{:?}", config.chi));
    kv("gamma", format!("{:?}", config.gamma));
    kv("n-trunc", config.n_trunc.to_string());
    kv(
        "nonlinear-conjugate",
        if config.nonlinear_conjugate { "on" } else { "off" }.to_string(),
    );
    match config.embedding {
        EmbeddingPolicy::Auto => kv("embedding", "auto".to_string()),
        EmbeddingPolicy::Fixed { tau, dim } => {
            kv("embedding", "fixed".to_string());
            kv("tau", tau.to_string());
            kv("dim", dim.to_string());
        }
    }
    kv("max-tau", config.max_tau.to_string());
    kv("mi-bins", config.mi_bins.to_string());
    kv("max-embed-dim", config.max_embed_dim.to_string());
    kv("fnn-r-tol", format!("{:?}", config.fnn_r_tol));
    kv("fnn-threshold", format!("{:?}", config.fnn_threshold));
    kv("estimator-samples", config.estimator_samples.to_string());
    kv("subsample", config.subsample.to_string());
    kv("seed", config.seed.to_string());
    kv("transient-periods", format!("{:?}", config.transient_periods));
    kv("total-periods", format!("{:?}", config.total_periods));
    kv("samples-per-period", config.samples_per_period.to_string());
    kv("bin-width", format!("{:?}", config.bin_width));
    kv("bin-stride", format!("{:?}", config.bin_stride));
    kv("trajectories", config.trajectories.to_string());
    kv("max-simplices", config.max_simplices.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_ignores_comments() {
        let mut config = SweepConfig::desk();
        apply_config_text(
            &mut config,
            "# phase sweep\nmode = quantum-x\n\n  seed = 99\nn-trunc = 150\nnonlinear-conjugate = on\n",
        )
        .unwrap();
        assert_eq!(config.mode, Mode::QuantumX);
        assert_eq!(config.seed, 99);
        assert_eq!(config.n_trunc, 150);
        assert!(config.nonlinear_conjugate);
    }

    #[test]
    fn fixed_embedding_combines_tau_and_dim() {
        let mut config = SweepConfig::desk();
        apply_config_text(&mut config, "tau = 7\nembedding = fixed\ndim = 3\n").unwrap();
        assert_eq!(config.embedding, EmbeddingPolicy::Fixed { tau: 7, dim: 3 });
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let mut config = SweepConfig::desk();
        let e = apply_config_text(&mut config, "mode = classical\nbogus = 3\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::Parse {
                line: 2,
                message: "unknown key \"bogus\"".into()
            }
        );
    }

    #[test]
    fn canonical_string_round_trips() {
        let mut config = SweepConfig::full();
        config.mode = Mode::QuantumPhotonCount;
        config.embedding = EmbeddingPolicy::Fixed { tau: 6, dim: 2 };
        config.seed = 1234;
        let text = canonical_config_string(&config);
        let mut reparsed = SweepConfig::desk();
        apply_config_text(&mut reparsed, &text).unwrap();
        assert_eq!(reparsed, config);
    }
}
