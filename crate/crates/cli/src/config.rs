use std::fmt;
use std::path::PathBuf;

use fdo_core::potential::PotentialSpec;
use fdo_core::spectral::{build_grid, Grid};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Bounds,
    Phasespace,
    Verify,
    Asymptotics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Bounds => "bounds",
            Command::Phasespace => "phasespace",
            Command::Verify => "verify",
            Command::Asymptotics => "asymptotics",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    p: f64,
    beta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    potential: RawPotential,
    grid: RawGrid,
    lambdas: Vec<f64>,
    #[serde(default)]
    a_override: Option<f64>,
    #[serde(default)]
    epsilon_override: Option<f64>,
    #[serde(default)]
    command: Option<Command>,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    emit_svg: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub grid: Grid,
    pub lambdas: Vec<f64>,
    pub a_override: Option<f64>,
    pub epsilon_override: Option<f64>,
    pub command: Option<Command>,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config at {}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.into(),
    }
}

pub fn parse_config(text: &[u8]) -> Result<RunConfig, ConfigError> {
    let text = std::str::from_utf8(text).map_err(|e| invalid("", format!("not UTF-8: {e}")))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        invalid(path, e.into_inner().to_string())
    })?;

    let potential = PotentialSpec::new(raw.potential.p, raw.potential.beta)
        .map_err(|e| invalid("potential", e.to_string()))?;

    if !(raw.grid.l > 0.0 && raw.grid.l.is_finite()) {
        return Err(invalid(
            "grid.L",
            format!("must be positive, got {}", raw.grid.l),
        ));
    }
    if raw.grid.n % 2 != 0 || raw.grid.n < 8 {
        return Err(invalid(
            "grid.N",
            format!("must be even and at least 8, got {}", raw.grid.n),
        ));
    }
    let grid = build_grid(raw.grid.l, raw.grid.n).map_err(|e| invalid("grid", e.to_string()))?;

    if raw.lambdas.is_empty() {
        return Err(invalid("lambdas", "must not be empty"));
    }
    for (i, lam) in raw.lambdas.iter().enumerate() {
        if !(*lam > 0.0 && lam.is_finite()) {
            return Err(invalid(
                format!("lambdas[{i}]"),
                format!("must be positive and finite, got {lam}"),
            ));
        }
        if i > 0 && *lam <= raw.lambdas[i - 1] {
            return Err(invalid(
                format!("lambdas[{i}]"),
                "lambdas must be strictly increasing",
            ));
        }
    }
    if let Some(a) = raw.a_override {
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid("a_override", format!("must be positive, got {a}")));
        }
    }
    if let Some(eps) = raw.epsilon_override {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid(
                "epsilon_override",
                format!("must lie in (0, 1], got {eps}"),
            ));
        }
    }

    Ok(RunConfig {
        potential,
        grid,
        lambdas: raw.lambdas,
        a_override: raw.a_override,
        epsilon_override: raw.epsilon_override,
        command: raw.command,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        emit_svg: raw.emit_svg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOUNDS: &str = r#"{"potential":{"p":2,"beta":0},"grid":{"L":40,"N":1024},"lambdas":[25,50,100],"command":"bounds","output_dir":"out"}"#;

    #[test]
    fn schema_instance() {
        let c = parse_config(BOUNDS.as_bytes()).unwrap();
        assert_eq!(c.command, Some(Command::Bounds));
        assert_eq!(c.grid.len(), 1024);
        assert_eq!(c.lambdas, vec![25.0, 50.0, 100.0]);
        assert!(!c.emit_svg);
    }

    #[test]
    fn odd_n_names_its_path() {
        let err = parse_config(BOUNDS.replace("1024", "1023").as_bytes()).unwrap_err();
        assert_eq!(err.path, "grid.N");
    }

    #[test]
    fn degenerate_potential_rejected() {
        let err = parse_config(BOUNDS.replace(r#""p":2"#, r#""p":0"#).as_bytes()).unwrap_err();
        assert_eq!(err.path, "potential");
    }

    #[test]
    fn unknown_key_rejected() {
        let err =
            parse_config(BOUNDS.replace(r#""L":40"#, r#""L":40,"M":3"#).as_bytes()).unwrap_err();
        assert_eq!(err.path, "grid.M");
        assert!(err.message.contains("unknown field"));
    }

    #[test]
    fn missing_key_and_type_errors() {
        let err = parse_config(br#"{"potential":{"p":2},"grid":{"L":4,"N":8},"lambdas":[1]}"#)
            .unwrap_err();
        assert_eq!(err.path, "potential");
        assert!(err.message.contains("beta"));
        let err =
            parse_config(br#"{"potential":{"p":2,"beta":0},"grid":{"L":4,"N":"8"},"lambdas":[1]}"#)
                .unwrap_err();
        assert_eq!(err.path, "grid.N");
        assert!(parse_config(b"{").is_err());
    }

    #[test]
    fn lambdas_strictly_increasing() {
        let err =
            parse_config(BOUNDS.replace("[25,50,100]", "[25,25,100]").as_bytes()).unwrap_err();
        assert_eq!(err.path, "lambdas[1]");
        let err = parse_config(BOUNDS.replace("[25,50,100]", "[]").as_bytes()).unwrap_err();
        assert_eq!(err.path, "lambdas");
    }
}
