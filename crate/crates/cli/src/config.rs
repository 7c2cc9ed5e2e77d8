//! Plain-text `key=value` run configuration.

use std::fmt::Write as _;
use std::str::FromStr;

use pilotwave::radiation::PhotonSampling;
use pilotwave::wavefield::ExperimentConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: cannot parse {key} = {value:?}")]
    Value { line: usize, key: String, value: String },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Everything a command needs besides the command itself.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub seed: u64,
    pub n_samples: usize,
    pub canyon: i32,
    /// Spectrum range in units of 1/τ_n.
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_omega: usize,
    /// Wavefield sweep position and resolution.
    pub field_x_cm: f64,
    pub field_ny: usize,
    /// Potential surface resolution and transverse half-extent (default:
    /// four fringe spacings at the screen).
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub grid_y_cm: f64,
    /// Cross-section position and resolution.
    pub section_x_cm: f64,
    pub section_ny: usize,
    /// Trajectories exported individually by `trajectories`.
    pub n_trajectories: usize,
    pub photon_sampling: PhotonSampling,
}

const REQUIRED: [&str; 5] = ["a_cm", "b_cm", "vx_cm_s", "T_s", "screen_x_cm"];
const OPTIONAL: [&str; 16] = [
    "X_cm",
    "seed",
    "n_samples",
    "canyon",
    "omega_min",
    "omega_max",
    "n_omega",
    "field_x_cm",
    "field_ny",
    "grid_nx",
    "grid_ny",
    "grid_y_cm",
    "section_x_cm",
    "section_ny",
    "n_trajectories",
    "photon_sampling",
];

fn sampling_label(s: PhotonSampling) -> &'static str {
    match s {
        PhotonSampling::Analog => "analog",
        PhotonSampling::Forced => "forced",
    }
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn parse_value<T: FromStr>(e: &Entry) -> Result<T, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::Value {
        line: e.line,
        key: e.key.clone(),
        value: e.value.clone(),
    })
}

/// Parses and validates a configuration. Blank lines and lines starting
/// with `#` are ignored.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let Some((k, v)) = s.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: s.to_string(),
            });
        };
        let key = k.trim().to_string();
        if !REQUIRED.contains(&key.as_str()) && !OPTIONAL.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line, key });
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(ConfigError::Duplicate { line, key });
        }
        entries.push(Entry {
            line,
            key,
            value: v.trim().to_string(),
        });
    }
    let get = |key: &str| entries.iter().find(|e| e.key == key);
    let required = |key: &'static str| -> Result<f64, ConfigError> {
        parse_value(get(key).ok_or(ConfigError::Missing(key))?)
    };
    fn optional<T: FromStr>(e: Option<&Entry>, default: T) -> Result<T, ConfigError> {
        e.map(parse_value).unwrap_or(Ok(default))
    }

    let (a, b, vx, big_t, screen) = (
        required("a_cm")?,
        required("b_cm")?,
        required("vx_cm_s")?,
        required("T_s")?,
        required("screen_x_cm")?,
    );
    let mut experiment =
        ExperimentConfig::new(a, b, big_t, vx, screen).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if let Some(e) = get("X_cm") {
        experiment = experiment
            .with_source_distance(parse_value(e)?)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    }
    let photon_sampling = match get("photon_sampling") {
        None => PhotonSampling::Forced,
        Some(e) => match e.value.as_str() {
            "analog" => PhotonSampling::Analog,
            "forced" => PhotonSampling::Forced,
            _ => {
                return Err(ConfigError::Value {
                    line: e.line,
                    key: e.key.clone(),
                    value: e.value.clone(),
                })
            }
        },
    };
    let cfg = RunConfig {
        experiment,
        seed: optional(get("seed"), 1)?,
        n_samples: optional(get("n_samples"), 10_000)?,
        canyon: optional(get("canyon"), 1)?,
        omega_min: optional(get("omega_min"), 0.01)?,
        omega_max: optional(get("omega_max"), 10.0)?,
        n_omega: optional(get("n_omega"), 200)?,
        field_x_cm: optional(get("field_x_cm"), screen)?,
        field_ny: optional(get("field_ny"), 1024)?,
        grid_nx: optional(get("grid_nx"), 48)?,
        grid_ny: optional(get("grid_ny"), 256)?,
        grid_y_cm: optional(get("grid_y_cm"), 4.0 * experiment.fringe_spacing(screen))?,
        section_x_cm: optional(get("section_x_cm"), 13f64.min(screen))?,
        section_ny: optional(get("section_ny"), 2048)?,
        n_trajectories: optional(get("n_trajectories"), 20)?,
        photon_sampling,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Checks the invariants beyond those of the experiment itself.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        for (name, v) in [
            ("omega_min", self.omega_min),
            ("omega_max", self.omega_max),
            ("field_x_cm", self.field_x_cm),
            ("grid_y_cm", self.grid_y_cm),
            ("section_x_cm", self.section_x_cm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} > 0 required, got {v}"));
            }
        }
        if self.omega_max <= self.omega_min {
            return invalid(format!("omega_max ({}) must exceed omega_min ({})", self.omega_max, self.omega_min));
        }
        for (name, v) in [
            ("n_omega", self.n_omega),
            ("field_ny", self.field_ny),
            ("grid_nx", self.grid_nx),
            ("grid_ny", self.grid_ny),
            ("section_ny", self.section_ny),
        ] {
            if v < 8 {
                return invalid(format!("{name} >= 8 required, got {v}"));
            }
        }
        if self.n_samples == 0 {
            return invalid("n_samples >= 1 required".into());
        }
        if self.canyon == 0 {
            return invalid("canyon index must be non-zero".into());
        }
        Ok(())
    }

    /// Canonical text form; parsing it yields an identical config.
    pub fn serialize(&self) -> String {
        let e = &self.experiment;
        let mut s = String::new();
        let pairs: [(&str, String); 21] = [
            ("a_cm", e.a.to_string()),
            ("b_cm", e.b.to_string()),
            ("vx_cm_s", e.vx.to_string()),
            ("T_s", e.source_time.to_string()),
            ("screen_x_cm", e.screen_x.to_string()),
            ("X_cm", e.source_distance.to_string()),
            ("seed", self.seed.to_string()),
            ("n_samples", self.n_samples.to_string()),
            ("canyon", self.canyon.to_string()),
            ("omega_min", self.omega_min.to_string()),
            ("omega_max", self.omega_max.to_string()),
            ("n_omega", self.n_omega.to_string()),
            ("field_x_cm", self.field_x_cm.to_string()),
            ("field_ny", self.field_ny.to_string()),
            ("grid_nx", self.grid_nx.to_string()),
            ("grid_ny", self.grid_ny.to_string()),
            ("grid_y_cm", self.grid_y_cm.to_string()),
            ("section_x_cm", self.section_x_cm.to_string()),
            ("section_ny", self.section_ny.to_string()),
            ("n_trajectories", self.n_trajectories.to_string()),
            ("photon_sampling", sampling_label(self.photon_sampling).to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "a_cm=1e-4\nb_cm=1e-6\nvx_cm_s=1.3e10\nT_s=1e-8\nscreen_x_cm=13";

    #[test]
    fn showcase_parses() {
        let c = parse_config(EXAMPLE).unwrap();
        assert_eq!(c.experiment, ExperimentConfig::showcase());
        assert_eq!(c.canyon, 1);
    }

    #[test]
    fn negative_a_is_rejected() {
        let e = parse_config("a_cm=-1\nb_cm=1e-6\nvx_cm_s=1.3e10\nT_s=1e-8\nscreen_x_cm=13").unwrap_err();
        assert!(matches!(&e, ConfigError::Invalid(m) if m.contains("a > 0")), "{e}");
        assert_eq!(parse_config("a_cm=-1").unwrap_err(), ConfigError::Missing("b_cm"));
    }

    #[test]
    fn round_trip_is_identical() {
        let c = parse_config(&format!("{EXAMPLE}\nseed=9\nomega_max=4.5\nphoton_sampling=analog\nX_cm=200")).unwrap();
        let again = parse_config(&c.serialize()).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.serialize(), c.serialize());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = format!("# header\n{EXAMPLE}\n\nbogus=1");
        assert_eq!(
            parse_config(&text).unwrap_err(),
            ConfigError::UnknownKey {
                line: 8,
                key: "bogus".into()
            }
        );
        assert!(matches!(
            parse_config(&format!("{EXAMPLE}\nseed=x")).unwrap_err(),
            ConfigError::Value { line: 6, .. }
        ));
        assert!(matches!(
            parse_config(&format!("{EXAMPLE}\nnonsense")).unwrap_err(),
            ConfigError::Syntax { line: 6, .. }
        ));
        assert!(matches!(
            parse_config(&format!("{EXAMPLE}\na_cm=2e-4")).unwrap_err(),
            ConfigError::Duplicate { line: 6, .. }
        ));
    }

    #[test]
    fn option_invariants() {
        for extra in ["grid_nx=4", "omega_min=5\nomega_max=1", "canyon=0", "n_samples=0"] {
            assert!(matches!(
                parse_config(&format!("{EXAMPLE}\n{extra}")).unwrap_err(),
                ConfigError::Invalid(_)
            ));
        }
    }
}
