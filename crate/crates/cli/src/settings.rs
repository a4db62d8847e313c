//! Resolution of flags and config-file entries into a validated [`RunConfig`].
//!
//! Every value carries its origin (`--flag` or `file:line`) so that errors
//! point at the exact entry that is wrong.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use wqed_core::model::effective_coupling;
use wqed_core::{HoppingSign, ModelParams};

use crate::args::{FigureId, PacketArgs, ParamArgs};
use crate::error::CliError;

pub const DEFAULT_OMEGA: f64 = 5.0;
pub const DEFAULT_OMEGA_A: f64 = 8.0;
pub const DEFAULT_COUPLING: f64 = 3.0;
pub const DEFAULT_K_MIN: f64 = 0.01 * PI;
pub const DEFAULT_K_MAX: f64 = 0.99 * PI;
pub const DEFAULT_K_COUNT: usize = 1001;

const KEYS: [&str; 13] = [
    "omega",
    "g",
    "Omega",
    "G",
    "n-atoms",
    "xi",
    "zeta-file",
    "k-min",
    "k-max",
    "k-count",
    "convention",
    "out",
    "format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Occupations,
    Bound,
    Verify,
    Figure,
    Wavepacket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Evenly spaced wavenumbers, endpoints included, in the reporting convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            start: DEFAULT_K_MIN,
            stop: DEFAULT_K_MAX,
            count: DEFAULT_K_COUNT,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::validation(format!("k-count must be >= 2, got {}", self.count)));
        }
        if !(self.start > 0.0 && self.stop < PI && self.start < self.stop) {
            return Err(CliError::validation(format!(
                "k grid [{}, {}] must satisfy 0 < k-min < k-max < pi",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    /// `None` writes to stdout.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Normalized to `g = 1`; `hopping_sign` is the reporting convention.
    pub params: ModelParams,
    pub grid: GridSpec,
    pub output: OutputSpec,
    pub figure_id: Option<FigureId>,
    pub packet: Option<PacketArgs>,
}

impl RunConfig {
    pub fn convention(&self) -> HoppingSign {
        self.params.hopping_sign
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: String,
}

impl Entry {
    fn err(&self, key: &str, what: &str) -> CliError {
        CliError::validation(format!("{}: {key} {what}, got '{}'", self.origin, self.value))
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        match self.value.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(key, "expects a finite number")),
        }
    }

    fn count(&self, key: &str) -> Result<usize, CliError> {
        self.value
            .trim()
            .parse::<usize>()
            .map_err(|_| self.err(key, "expects a non-negative integer"))
    }
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// skipped; keys may be written with or without the leading `--`.
pub fn parse_config_text(text: &str, source: &str) -> Result<Vec<(String, String, usize)>, CliError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::validation(format!(
                "{source}:{line_no}: expected `key = value`, got '{line}'"
            )));
        };
        let key = key.trim().trim_start_matches("--");
        if !KEYS.contains(&key) {
            return Err(CliError::validation(format!(
                "{source}:{line_no}: unknown key '{key}' (expected one of {})",
                KEYS.join(", ")
            )));
        }
        if entries.iter().any(|(k, _, _): &(String, String, usize)| k == key) {
            return Err(CliError::validation(format!("{source}:{line_no}: duplicate key '{key}'")));
        }
        entries.push((key.to_string(), value.trim().to_string(), line_no));
    }
    Ok(entries)
}

/// Parses a list of complex couplings, one `re im` pair per line.
pub fn parse_zeta_text(text: &str, source: &str) -> Result<Vec<Complex64>, CliError> {
    let mut zeta = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        match parsed.as_deref() {
            Some(&[re, im]) if re.is_finite() && im.is_finite() => zeta.push(Complex64::new(re, im)),
            _ => {
                return Err(CliError::validation(format!(
                    "{source}:{}: expected `re im`, got '{line}'",
                    i + 1
                )))
            }
        }
    }
    if zeta.is_empty() {
        return Err(CliError::validation(format!("{source}: no couplings listed")));
    }
    Ok(zeta)
}

fn collect(args: &ParamArgs) -> Result<BTreeMap<&'static str, Entry>, CliError> {
    let mut map = BTreeMap::new();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        let source = path.display().to_string();
        for (key, value, line) in parse_config_text(&text, &source)? {
            let key = KEYS.iter().find(|k| **k == key).expect("key checked");
            map.insert(
                *key,
                Entry {
                    value,
                    origin: format!("{source}:{line}"),
                },
            );
        }
    }
    let flags = [
        ("omega", &args.omega),
        ("g", &args.g),
        ("Omega", &args.omega_a),
        ("G", &args.coupling),
        ("n-atoms", &args.n_atoms),
        ("xi", &args.xi),
        ("zeta-file", &args.zeta_file),
        ("k-min", &args.k_min),
        ("k-max", &args.k_max),
        ("k-count", &args.k_count),
        ("convention", &args.convention),
        ("out", &args.out),
        ("format", &args.format),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            map.insert(
                key,
                Entry {
                    value: value.clone(),
                    origin: format!("--{key}"),
                },
            );
        }
    }
    Ok(map)
}

fn resolve_coupling(
    map: &BTreeMap<&'static str, Entry>,
    config_dir: Option<&Path>,
) -> Result<f64, CliError> {
    let coupling = map.get("G");
    let n_atoms = map.get("n-atoms");
    let zeta_file = map.get("zeta-file");
    let xi = map.get("xi");

    if let Some(g) = coupling {
        if let Some(other) = n_atoms.or(zeta_file).or(xi) {
            return Err(CliError::validation(format!(
                "{}: G cannot be combined with the ensemble description at {}",
                g.origin, other.origin
            )));
        }
        return g.f64("G");
    }
    if n_atoms.is_some() && zeta_file.is_some() {
        return Err(CliError::validation("n-atoms and zeta-file are mutually exclusive"));
    }
    if n_atoms.is_none() && zeta_file.is_none() {
        return match xi {
            Some(xi) => Err(CliError::validation(format!(
                "{}: xi needs n-atoms or zeta-file",
                xi.origin
            ))),
            None => Ok(DEFAULT_COUPLING),
        };
    }
    let Some(xi) = xi else {
        return Err(CliError::validation("n-atoms/zeta-file need xi"));
    };
    let xi_value = xi.f64("xi")?;
    if xi_value < 0.0 {
        return Err(xi.err("xi", "must be >= 0"));
    }
    if let Some(n) = n_atoms {
        let count = n.count("n-atoms")?;
        if count == 0 {
            return Err(n.err("n-atoms", "must be >= 1"));
        }
        return Ok(xi_value * (count as f64).sqrt());
    }
    let entry = zeta_file.expect("checked above");
    let mut path = PathBuf::from(&entry.value);
    // Relative paths in a config file are taken relative to that file.
    if path.is_relative() && !entry.origin.starts_with("--") {
        if let Some(dir) = config_dir {
            path = dir.join(path);
        }
    }
    let text = fs::read_to_string(&path).map_err(|e| {
        CliError::validation(format!("{}: cannot read zeta file {}: {e}", entry.origin, path.display()))
    })?;
    let zeta = parse_zeta_text(&text, &path.display().to_string())?;
    effective_coupling(xi_value, &zeta).map_err(|e| CliError::from_core("model", e))
}

/// Resolves flags and an optional config file; flags win over file entries.
pub fn resolve(
    command: CommandKind,
    figure_id: Option<FigureId>,
    args: &ParamArgs,
) -> Result<RunConfig, CliError> {
    let map = collect(args)?;
    let num = |key: &str, default: f64| map.get(key).map_or(Ok(default), |e| e.f64(key));

    let g = num("g", 1.0)?;
    if g <= 0.0 {
        return Err(map["g"].err("g", "must be > 0"));
    }
    let omega = num("omega", DEFAULT_OMEGA * g)?;
    let omega_a = num("Omega", DEFAULT_OMEGA_A * g)?;
    let config_dir = args.config.as_deref().and_then(Path::parent);
    let coupling = resolve_coupling(&map, config_dir)?;
    if coupling < 0.0 {
        return Err(CliError::validation(format!("G must be >= 0, got {coupling}")));
    }

    let convention = match map.get("convention") {
        None => HoppingSign::Plus,
        Some(e) => match e.value.trim() {
            "plus" => HoppingSign::Plus,
            "minus" => HoppingSign::Minus,
            _ => return Err(e.err("convention", "expects plus or minus")),
        },
    };
    let format = match map.get("format") {
        None => Format::Csv,
        Some(e) => match e.value.trim() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            _ => return Err(e.err("format", "expects csv or json")),
        },
    };

    let params = ModelParams::new(omega / g, 1.0, omega_a / g, coupling / g)
        .map_err(|e| CliError::from_core("model", e))?
        .with_sign(convention);

    let grid = GridSpec {
        start: num("k-min", DEFAULT_K_MIN)?,
        stop: num("k-max", DEFAULT_K_MAX)?,
        count: map.get("k-count").map_or(Ok(DEFAULT_K_COUNT), |e| e.count("k-count"))?,
    };
    grid.validate()?;

    Ok(RunConfig {
        command,
        params,
        grid,
        output: OutputSpec {
            path: map.get("out").map(|e| PathBuf::from(&e.value)),
            format,
        },
        figure_id,
        packet: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_matches_contract() {
        let pts = GridSpec::default().points();
        assert_eq!(pts.len(), 1001);
        assert_eq!(pts[0], 0.01 * PI);
        assert_eq!(pts[1000], 0.99 * PI);
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn config_lines_report_position() {
        let err = parse_config_text("omega = 3\n\nbogus\n", "run.cfg").unwrap_err();
        assert!(err.to_string().starts_with("run.cfg:3:"), "{err}");
        let err = parse_config_text("# c\nspeed = 3\n", "run.cfg").unwrap_err();
        assert!(err.to_string().contains("run.cfg:2: unknown key 'speed'"), "{err}");
        let ok = parse_config_text("--G = 2 # comment\nomega=1", "x").unwrap();
        assert_eq!(ok[0], ("G".into(), "2".into(), 1));
        assert_eq!(ok[1], ("omega".into(), "1".into(), 2));
    }

    #[test]
    fn zeta_lines_parse() {
        let z = parse_zeta_text("1 0\n0 -0.5\n", "z").unwrap();
        assert_eq!(z, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -0.5)]);
        assert!(parse_zeta_text("1\n", "z").unwrap_err().to_string().starts_with("z:1:"));
    }

    #[test]
    fn energies_are_normalized_by_g() {
        let args = ParamArgs {
            omega: Some("10".into()),
            g: Some("2".into()),
            omega_a: Some("16".into()),
            coupling: Some("6".into()),
            ..Default::default()
        };
        let cfg = resolve(CommandKind::Spectrum, None, &args).unwrap();
        assert_eq!(
            (cfg.params.omega, cfg.params.g, cfg.params.omega_a, cfg.params.coupling),
            (5.0, 1.0, 8.0, 3.0)
        );
    }

    #[test]
    fn ensemble_coupling() {
        let args = ParamArgs {
            xi: Some("1.5".into()),
            n_atoms: Some("4".into()),
            ..Default::default()
        };
        let cfg = resolve(CommandKind::Spectrum, None, &args).unwrap();
        assert_eq!(cfg.params.coupling, 3.0);

        let clash = ParamArgs {
            coupling: Some("1".into()),
            n_atoms: Some("4".into()),
            ..Default::default()
        };
        assert!(resolve(CommandKind::Spectrum, None, &clash).is_err());
    }

    #[test]
    fn field_errors_name_the_flag() {
        let args = ParamArgs {
            k_count: Some("1".into()),
            ..Default::default()
        };
        assert!(resolve(CommandKind::Spectrum, None, &args).is_err());
        let args = ParamArgs {
            omega: Some("abc".into()),
            ..Default::default()
        };
        let err = resolve(CommandKind::Spectrum, None, &args).unwrap_err();
        assert_eq!(err.to_string(), "--omega: omega expects a finite number, got 'abc'");
    }
}
