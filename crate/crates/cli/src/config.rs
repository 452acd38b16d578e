//! Command-line and `key = value` file configuration.
//!
//! Every subcommand has a fixed table of keys. Values from the file are
//! overridden by flags, then the merged map is validated as a whole so that
//! all problems are reported together.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, Command};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Spectrum,
    Ep,
    Jordan,
    Dynamics,
    Generic,
    Figures,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Subcommand::Spectrum,
        Subcommand::Ep,
        Subcommand::Jordan,
        Subcommand::Dynamics,
        Subcommand::Generic,
        Subcommand::Figures,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Spectrum => "spectrum",
            Subcommand::Ep => "ep",
            Subcommand::Jordan => "jordan",
            Subcommand::Dynamics => "dynamics",
            Subcommand::Generic => "generic",
            Subcommand::Figures => "figures",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Subcommand::Spectrum => "Discrete states at one epsilon_d, or a scan of the near-edge states",
            Subcommand::Ep => "Exceptional-point locations, or the eigenvalue sheet over complex epsilon_d",
            Subcommand::Jordan => "Exact Jordan structure of the threshold pencil",
            Subcommand::Dynamics => "Emitter survival amplitude and probability",
            Subcommand::Generic => "Self-energy of a generic threshold model: quadrature vs closed form",
            Subcommand::Figures => "Write CSV data and gnuplot scripts for the figure presets",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name || (name == "jordan-check" && *s == Subcommand::Jordan))
    }

    pub fn keys(self) -> &'static [KeySpec] {
        match self {
            Subcommand::Spectrum => SPECTRUM_KEYS,
            Subcommand::Ep => EP_KEYS,
            Subcommand::Jordan => &[],
            Subcommand::Dynamics => DYNAMICS_KEYS,
            Subcommand::Generic => GENERIC_KEYS,
            Subcommand::Figures => FIGURES_KEYS,
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "f32" | "single" => Some(Precision::F32),
            "f64" | "double" => Some(Precision::F64),
            _ => None,
        }
    }
}

/// Accepted form of a parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Real,
    NonNegative,
    Positive,
    /// Integer in the inclusive range.
    Int(i64, i64),
    Flag,
    Choice(&'static [&'static str]),
    Text,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> KeySpec {
    KeySpec { name, kind, default, help }
}

const SPECTRUM_KEYS: &[KeySpec] = &[
    key("g", Kind::NonNegative, Some("0.5"), "emitter-chain coupling"),
    key("eps_d", Kind::Real, Some("-2"), "emitter energy (single point)"),
    key("eps_min", Kind::Real, None, "scan start; needs eps_max"),
    key("eps_max", Kind::Real, None, "scan end; needs eps_min"),
    key("step", Kind::Positive, Some("0.001"), "scan step"),
];

const EP_KEYS: &[KeySpec] = &[
    key("g", Kind::NonNegative, Some("0.1"), "emitter-chain coupling"),
    key("n", Kind::Int(-1, 1), None, "branch index; all three when omitted"),
    key("sheet", Kind::Flag, None, "emit the eigenvalue sheet over complex epsilon_d instead"),
    key("eps_re_min", Kind::Real, Some("-2.15"), "sheet: smallest Re epsilon_d"),
    key("eps_re_max", Kind::Real, Some("-1.85"), "sheet: largest Re epsilon_d"),
    key("n_re", Kind::Int(1, 100_000), Some("61"), "sheet: points along Re epsilon_d"),
    key("eps_im_min", Kind::Real, Some("-0.15"), "sheet: smallest Im epsilon_d"),
    key("eps_im_max", Kind::Real, Some("0.15"), "sheet: largest Im epsilon_d"),
    key("n_im", Kind::Int(1, 100_000), Some("61"), "sheet: points along Im epsilon_d"),
];

pub const METHODS: &[&str] = &["oracle", "bessel", "intermediate", "longtime", "all"];

const DYNAMICS_KEYS: &[KeySpec] = &[
    key("g", Kind::NonNegative, Some("0.02"), "emitter-chain coupling"),
    key("eps_d", Kind::Real, Some("-2"), "emitter energy"),
    key("t_max", Kind::NonNegative, Some("600"), "last time"),
    key("step", Kind::Positive, Some("0.1"), "time step"),
    key("method", Kind::Choice(METHODS), Some("oracle"), "survival method"),
    key("n", Kind::Int(1, 100_000_000), None, "chain half-length for the oracle (default: smallest admissible)"),
];

pub const MODELS: &[&str] = &["main-text", "const", "lorentzian", "singular"];

const GENERIC_KEYS: &[KeySpec] = &[
    key("model", Kind::Choice(MODELS), Some("main-text"), "threshold model"),
    key("g", Kind::NonNegative, Some("0.1"), "coupling"),
    key("e_min", Kind::Real, None, "first energy (default: threshold - 4)"),
    key("e_max", Kind::Real, None, "last energy (default: threshold - 0.01)"),
    key("points", Kind::Int(1, 10_000_000), Some("200"), "number of energies"),
];

pub const FIGURES: &[&str] = &["all", "fig1", "fig3", "fig4", "fig5"];

const FIGURES_KEYS: &[KeySpec] = &[
    key("name", Kind::Choice(FIGURES), Some("all"), "preset to emit"),
    key("out_dir", Kind::Text, Some("figures"), "directory for CSV and gnuplot files"),
];

/// Keys accepted in a file for every subcommand, besides the table entries.
const GLOBAL_FILE_KEYS: &[&str] = &["output", "precision"];

/// Validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    /// Merged values, keys in underscore form, defaults filled in.
    pub params: BTreeMap<String, String>,
    pub output: Option<PathBuf>,
    pub precision: Precision,
}

impl RunConfig {
    fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    /// Numeric value of a validated key. Panics on keys outside the table.
    pub fn real(&self, key: &str) -> Option<f64> {
        self.raw(key).map(|v| v.parse().expect("validated real"))
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        self.raw(key).map(|v| v.parse().expect("validated integer"))
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.raw(key)
    }

    pub fn flag(&self, key: &str) -> bool {
        self.raw(key).is_some_and(|v| matches!(v, "true" | "yes" | "1"))
    }
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

fn flag_name(k: &str) -> String {
    k.replace('_', "-")
}

/// The clap command tree, generated from the key tables.
pub fn command() -> Command {
    let mut cmd = Command::new("threshold-ep")
        .about("Threshold exceptional points of an emitter at a tight-binding band edge")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(Arg::new("config").long("config").short('c').global(true).value_name("FILE").help("key = value file"))
        .arg(Arg::new("output").long("output").short('o').global(true).value_name("PATH").help("output file (stdout if omitted)"))
        .arg(Arg::new("precision").long("precision").global(true).value_name("f32|f64").help("floating-point precision [default: f64]"));
    for sub in Subcommand::ALL {
        let mut sc = Command::new(sub.name()).about(sub.about());
        if sub == Subcommand::Jordan {
            sc = sc.alias("jordan-check");
        }
        for spec in sub.keys() {
            let mut arg = Arg::new(spec.name).long(flag_name(spec.name)).help(spec.help);
            arg = match spec.kind {
                Kind::Flag => arg.action(ArgAction::SetTrue),
                _ => {
                    let arg = arg.allow_hyphen_values(true).value_name("VALUE");
                    match spec.default {
                        Some(d) => arg.help(format!("{} [default: {d}]", spec.help)),
                        None => arg,
                    }
                }
            };
            sc = sc.arg(arg);
        }
        cmd = cmd.subcommand(sc);
    }
    cmd
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone)]
enum Origin {
    File(PathBuf, usize),
    Flag(String),
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File(p, line) => write!(f, "{}:{line}", p.display()),
            Origin::Flag(name) => write!(f, "--{name}"),
            Origin::Default => f.write_str("default"),
        }
    }
}

/// Reads `key = value` lines. Blank lines and `#` comments are skipped.
/// Returns the entries with their line numbers, or all syntax errors.
pub fn parse_config_text(text: &str) -> std::result::Result<Vec<(usize, String, String)>, Vec<String>> {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
                let k = normalize_key(k);
                if entries.iter().any(|(_, prev, _)| *prev == k) {
                    errors.push(format!("line {line_no}: duplicate key `{k}`"));
                } else {
                    entries.push((line_no, k, v.trim().to_string()));
                }
            }
            Some(_) => errors.push(format!("line {line_no}: expected `key = value`, got `{line}`")),
            None => errors.push(format!("line {line_no}: missing `=` in `{line}`")),
        }
    }
    if errors.is_empty() {
        Ok(entries)
    } else {
        Err(errors)
    }
}

fn check_value(kind: Kind, value: &str) -> std::result::Result<String, String> {
    let real = |v: &str| -> std::result::Result<f64, String> {
        let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("`{v}` is not finite"))
        }
    };
    match kind {
        Kind::Real => real(value).map(|_| value.to_string()),
        Kind::NonNegative => match real(value)? {
            x if x >= 0.0 => Ok(value.to_string()),
            _ => Err(format!("must be >= 0, got {value}")),
        },
        Kind::Positive => match real(value)? {
            x if x > 0.0 => Ok(value.to_string()),
            _ => Err(format!("must be > 0, got {value}")),
        },
        Kind::Int(lo, hi) => {
            let n: i64 = value.parse().map_err(|_| format!("`{value}` is not an integer"))?;
            if (lo..=hi).contains(&n) {
                Ok(value.to_string())
            } else {
                Err(format!("must lie in [{lo}, {hi}], got {n}"))
            }
        }
        Kind::Flag => match value {
            "true" | "yes" | "1" => Ok("true".into()),
            "false" | "no" | "0" => Ok("false".into()),
            _ => Err(format!("`{value}` is not a boolean")),
        },
        Kind::Choice(options) => {
            if options.contains(&value) {
                Ok(value.to_string())
            } else {
                Err(format!("`{value}` is not one of {}", options.join(", ")))
            }
        }
        Kind::Text => Ok(value.to_string()),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Builds a [`RunConfig`] from `argv` (program name first) and an optional
/// file. An explicit `file` takes the place of `--config`. Flags override
/// file values; unknown keys and invalid values are errors.
pub fn parse_config<I, S>(argv: I, file: Option<&Path>) -> Result<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let matches = command().try_get_matches_from(argv)?;
    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let subcommand = Subcommand::from_name(name).expect("registered subcommand");
    let specs = subcommand.keys();

    let config_path = file.map(Path::to_path_buf).or_else(|| matches.get_one::<String>("config").map(PathBuf::from));
    let mut merged: BTreeMap<String, (String, Origin)> = BTreeMap::new();
    let mut errors = Vec::new();

    if let Some(path) = &config_path {
        let text = read_file(path)?;
        match parse_config_text(&text) {
            Ok(entries) => {
                for (line, k, v) in entries {
                    let known = specs.iter().any(|s| s.name == k) || GLOBAL_FILE_KEYS.contains(&k.as_str());
                    if known {
                        merged.insert(k, (v, Origin::File(path.clone(), line)));
                    } else {
                        errors.push(format!("{}:{line}: unknown key `{k}` for `{subcommand}`", path.display()));
                    }
                }
            }
            Err(errs) => errors.extend(errs.into_iter().map(|e| format!("{}: {e}", path.display()))),
        }
    }

    for spec in specs {
        let from_cli = match spec.kind {
            Kind::Flag => sub_matches.get_flag(spec.name).then(|| "true".to_string()),
            _ => sub_matches.get_one::<String>(spec.name).cloned(),
        };
        if let Some(v) = from_cli {
            merged.insert(spec.name.to_string(), (v, Origin::Flag(flag_name(spec.name))));
        }
    }
    for global in GLOBAL_FILE_KEYS {
        if let Some(v) = matches.get_one::<String>(global) {
            merged.insert(global.to_string(), (v.clone(), Origin::Flag(global.to_string())));
        }
    }
    for spec in specs {
        if let (Some(d), false) = (spec.default, merged.contains_key(spec.name)) {
            merged.insert(spec.name.to_string(), (d.to_string(), Origin::Default));
        }
    }

    let mut params = BTreeMap::new();
    for spec in specs {
        if let Some((v, origin)) = merged.get(spec.name) {
            match check_value(spec.kind, v) {
                Ok(v) => {
                    params.insert(spec.name.to_string(), v);
                }
                Err(msg) => errors.push(format!("{origin}: `{}` {msg}", spec.name)),
            }
        }
    }
    let precision = match merged.get("precision") {
        None => Precision::F64,
        Some((v, origin)) => Precision::parse(v).unwrap_or_else(|| {
            errors.push(format!("{origin}: `precision` must be f32 or f64, got `{v}`"));
            Precision::F64
        }),
    };
    let output = merged.get("output").map(|(v, _)| PathBuf::from(v));
    errors.extend(cross_checks(subcommand, &params));

    if !errors.is_empty() {
        return Err(CliError::Config(errors));
    }
    Ok(RunConfig { subcommand, params, output, precision })
}

fn cross_checks(sub: Subcommand, params: &BTreeMap<String, String>) -> Vec<String> {
    let num = |k: &str| params.get(k).and_then(|v| v.parse::<f64>().ok());
    let mut errors = Vec::new();
    let mut ordered = |lo: &str, hi: &str| match (num(lo), num(hi)) {
        (Some(a), Some(b)) if a > b => errors.push(format!("`{lo}` = {a} exceeds `{hi}` = {b}")),
        (Some(_), None) | (None, Some(_)) => errors.push(format!("`{lo}` and `{hi}` must be given together")),
        _ => {}
    };
    match sub {
        Subcommand::Spectrum => ordered("eps_min", "eps_max"),
        Subcommand::Ep => {
            ordered("eps_re_min", "eps_re_max");
            ordered("eps_im_min", "eps_im_max");
        }
        Subcommand::Generic => {
            if let (Some(a), Some(b)) = (num("e_min"), num("e_max")) {
                if a > b {
                    errors.push(format!("`e_min` = {a} exceeds `e_max` = {b}"));
                }
            }
        }
        _ => {}
    }
    errors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse() {
        let cfg = parse_config(["threshold-ep", "dynamics", "--g", "0.02", "--eps-d", "-2", "--t-max", "600"], None).unwrap();
        assert_eq!(cfg.subcommand, Subcommand::Dynamics);
        assert_eq!(cfg.real("g"), Some(0.02));
        assert_eq!(cfg.real("eps_d"), Some(-2.0));
        assert_eq!(cfg.real("t_max"), Some(600.0));
        assert_eq!(cfg.text("method"), Some("oracle"));
        assert_eq!(cfg.precision, Precision::F64);
        assert!(!cfg.has("n"));
    }

    #[test]
    fn negative_coupling_rejected() {
        let err = parse_config(["threshold-ep", "dynamics", "--g", "-1"], None).unwrap_err();
        match err {
            CliError::Config(msgs) => assert!(msgs[0].contains("--g") && msgs[0].contains(">= 0"), "{msgs:?}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn file_syntax_errors_carry_line_numbers() {
        let errs = parse_config_text("g = 0.1\n\n# note\nbroken line\n = 3\ng = 0.2\n").unwrap_err();
        assert_eq!(errs.len(), 3);
        assert!(errs[0].starts_with("line 4"));
        assert!(errs[1].starts_with("line 5"));
        assert!(errs[2].starts_with("line 6") && errs[2].contains("duplicate"));
    }

    #[test]
    fn comments_and_dashes() {
        let entries = parse_config_text("t-max = 5 # trailing\n  eps_d=-2\n").unwrap();
        assert_eq!(entries, vec![(1, "t_max".into(), "5".into()), (2, "eps_d".into(), "-2".into())]);
    }

    #[test]
    fn non_finite_and_bad_choice() {
        let err = parse_config(["x", "dynamics", "--step", "inf", "--method", "euler"], None).unwrap_err();
        let CliError::Config(msgs) = err else { panic!() };
        assert_eq!(msgs.len(), 2);
    }

    #[test]
    fn half_given_range_rejected() {
        assert!(parse_config(["x", "spectrum", "--eps-min", "-2.1"], None).is_err());
        assert!(parse_config(["x", "spectrum", "--eps-min", "-2.1", "--eps-max", "-2.2"], None).is_err());
        assert!(parse_config(["x", "spectrum", "--eps-min", "-2.2", "--eps-max", "-2.1"], None).is_ok());
    }

    #[test]
    fn jordan_alias_and_unknown_flag() {
        assert_eq!(parse_config(["x", "jordan-check"], None).unwrap().subcommand, Subcommand::Jordan);
        assert!(matches!(parse_config(["x", "dynamics", "--gg", "1"], None), Err(CliError::Usage(_))));
    }
}
