//! Command-line flags, the optional `key = value` config file, and parsing of
//! ranges and lists. Flags override config-file values.

use crate::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rieszlab", version, about = "Integer powers of the complex Riesz transform: tables, checks and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of gamma_k(p), k^{1-2/p}(p-1) and their quotient.
    #[command(after_help = "Columns: k, p, gamma, reference, band_value\nDefaults: k = 1:10, p = 2,3,4")]
    GammaTable(CommonArgs),
    /// Run the identity suite and report each check against its threshold.
    #[command(after_help = "Columns: family, check, error, threshold, status\nFamilies: log-gamma, oscileq, powers-lp, subordination, truncation, k0-reduction, conjugation")]
    VerifyIdentities(VerifyArgs),
    /// Certificates per (k, p): gamma, Riesz-potential ratio, regression, band.
    #[command(after_help = "Columns: k, p, gamma, ratio_riesz_potential, ratio_gauss_regression, t_axis_regression_ratio, \
band_value, weak11_ratio, bmo_ratio, regression_rel_dev, status, failures\nDefaults: k = 3, p = 4, eps = 1e-4,1e-6,1e-8,1e-10,1e-12\n\
Tolerances: tol.regression (0.02), tol.band (1e-9)")]
    Certify(CertifyArgs),
    /// Apply R^k to an RZFLD1 field by Fourier multiplier or kernel convolution.
    #[command(after_help = "Columns: method, k, n, side, l2_in, l2_out, discrepancy, probes")]
    Apply(ApplyArgs),
    /// Weak-(1,1) quasinorm of R^k applied to the unit-disc indicator.
    #[command(after_help = "Columns: k, w, w_over_k\nDefaults: k = 1:9:2, n = 256, side = 32\nTolerances: tol.spread (4)")]
    Weak11(CommonArgs),
    /// Dyadic BMO norm of the Gaussian over sup |f_k|, odd k.
    #[command(after_help = "Columns: k, sup_f, bmo_g, ratio, ratio_over_k\nDefaults: k = 1:15:2, n = 256, side = 16\nTolerances: tol.spread (4)")]
    Bmo(CommonArgs),
    /// Radial profile formula against direct principal-value convolution.
    #[command(after_help = "Columns: u, profile_formula, profile_pv, abs_diff\nDefaults: k = 3, sigma = 0.25, u = 0.5,2\nTolerances: tol.radial (1e-4)")]
    RadialProfile(RadialArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Fft,
    Kernel,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// `key = value` config file; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Omit the timestamp header line.
    #[arg(long)]
    pub no_timestamp: bool,
    /// k values: `a:b:step`, `a:b`, or a comma list.
    #[arg(short, long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// p values: `a:b:step` or a comma list.
    #[arg(short, long)]
    pub p: Option<String>,
    /// Strictly decreasing eps schedule (comma list).
    #[arg(long)]
    pub eps: Option<String>,
    /// Grid points per axis (power of two).
    #[arg(long)]
    pub n: Option<String>,
    /// Grid side length.
    #[arg(long)]
    pub side: Option<String>,
    /// Tolerance override `name=value`, repeatable.
    #[arg(long, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Run only the families whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also compute the weak-(1,1) ratio on an `n x n` grid of side `side`.
    #[arg(long)]
    pub weak11: bool,
    /// Also compute the BMO ratio (odd k) on the grid.
    #[arg(long)]
    pub bmo: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input RZFLD1 file.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Output RZFLD1 file.
    #[arg(long, value_name = "FILE")]
    pub field_output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Run both methods and report the relative sup discrepancy at interior probes.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RadialArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub sigma: Option<String>,
    /// Evaluation points (comma list or range).
    #[arg(long)]
    pub u: Option<String>,
}

/// Keys accepted in a config file.
const KNOWN_KEYS: &[&str] = &[
    "format", "output", "no-timestamp", "k", "p", "eps", "n", "side", "filter", "weak11", "bmo", "input",
    "field-output", "method", "compare", "sigma", "u",
];

/// Merged configuration: config-file entries overridden by flags.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("config line {}: expected `key = value`", no + 1)))?;
        let key = k.trim().to_string();
        if !(KNOWN_KEYS.contains(&key.as_str()) || key.starts_with("tol.")) {
            return Err(config_err(format!("config line {}: unknown key `{key}`", no + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

impl Settings {
    pub fn from_common(common: &CommonArgs) -> Result<Self, CliError> {
        let mut map = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        };
        set("format", common.format.map(|f| if f == Format::Json { "json".into() } else { "csv".into() }));
        set("output", common.output.as_ref().map(|p| p.display().to_string()));
        set("no-timestamp", common.no_timestamp.then(|| "true".into()));
        set("k", common.k.clone());
        set("p", common.p.clone());
        set("eps", common.eps.clone());
        set("n", common.n.clone());
        set("side", common.side.clone());
        for t in &common.tol {
            let (name, v) = t.split_once('=').ok_or_else(|| config_err(format!("--tol `{t}`: expected NAME=VALUE")))?;
            map.insert(format!("tol.{}", name.trim()), v.trim().to_string());
        }
        Ok(Self { map })
    }

    pub fn set(&mut self, key: &str, v: Option<String>) {
        if let Some(v) = v {
            self.map.insert(key.to_string(), v);
        }
    }

    pub fn set_flag(&mut self, key: &str, on: bool) {
        if on {
            self.map.insert(key.to_string(), "true".into());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(false),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(config_err(format!("`{key}`: expected a boolean, got `{v}`"))),
        }
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.raw("format") {
            None | Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(v) => Err(config_err(format!("format must be csv or json, got `{v}`"))),
        }
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.raw("output").map(PathBuf::from)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }

    pub fn timestamp(&self) -> Result<bool, CliError> {
        Ok(!self.flag("no-timestamp")?)
    }

    pub fn k_list(&self, default: &str) -> Result<Vec<i64>, CliError> {
        parse_int_list(self.raw("k").unwrap_or(default)).map_err(|e| config_err(format!("k: {e}")))
    }

    pub fn real_list(&self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        parse_real_list(self.raw(key).unwrap_or(default)).map_err(|e| config_err(format!("{key}: {e}")))
    }

    pub fn real(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_real(v).map_err(|e| config_err(format!("{key}: {e}"))),
        }
    }

    pub fn grid(&self, n_default: usize, side_default: f64) -> Result<(usize, f64), CliError> {
        let n = match self.raw("n") {
            None => n_default,
            Some(v) => v.trim().parse().map_err(|_| config_err(format!("n: `{v}` is not an integer")))?,
        };
        if n < 8 || !n.is_power_of_two() {
            return Err(config_err(format!("n = {n} must be a power of two >= 8")));
        }
        let side = self.real("side", side_default)?;
        if !(side > 0.0 && side.is_finite()) {
            return Err(config_err(format!("side = {side} must be positive")));
        }
        Ok((n, side))
    }

    pub fn eps_schedule(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let s = match self.raw("eps") {
            None => return Ok(default.to_vec()),
            Some(v) => parse_real_list(v).map_err(|e| config_err(format!("eps: {e}")))?,
        };
        if s.len() < 4 {
            return Err(config_err("eps: need at least 4 values"));
        }
        if s.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(config_err("eps: schedule must be strictly decreasing"));
        }
        if s.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
            return Err(config_err("eps: values must lie in (0, 1/2)"));
        }
        if (s[0] / s[s.len() - 1]).log10() < 3.0 - 1e-12 {
            return Err(config_err("eps: schedule must span at least 3 decades"));
        }
        Ok(s)
    }

    pub fn tol(&self, name: &str, default: f64) -> Result<f64, CliError> {
        let v = self.real(&format!("tol.{name}"), default)?;
        if !(v >= 0.0) {
            return Err(config_err(format!("tol.{name} must be non-negative")));
        }
        Ok(v)
    }

    /// Tolerance keys present in the settings.
    pub fn tol_keys(&self) -> impl Iterator<Item = &str> {
        self.map.keys().filter_map(|k| k.strip_prefix("tol."))
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("`{}` is not finite", s.trim()));
    }
    Ok(v)
}

/// `a:b:step` (inclusive), `a:b` (step 1) or `a,b,c`.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>, String> {
    let s = s.trim();
    let out: Vec<i64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() > 3 {
            return Err(format!("bad range `{s}`"));
        }
        let num = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not an integer"));
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
        if step <= 0 {
            return Err("range step must be positive".into());
        }
        (a..=b).step_by(step as usize).collect()
    } else {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not an integer")))
            .collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(format!("empty range `{s}`"));
    }
    Ok(out)
}

/// Real-valued version of [`parse_int_list`]; range ends are included up to
/// a rounding slack of `1e-9 step`.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let out: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() > 3 {
            return Err(format!("bad range `{s}`"));
        }
        let (a, b) = (parse_real(parts[0])?, parse_real(parts[1])?);
        let step = if parts.len() == 3 { parse_real(parts[2])? } else { 1.0 };
        if !(step > 0.0) {
            return Err("range step must be positive".into());
        }
        let mut v = Vec::new();
        let mut i = 0.0;
        while a + i * step <= b + 1e-9 * step {
            v.push(a + i * step);
            i += 1.0;
            if v.len() > 1_000_000 {
                return Err("range too long".into());
            }
        }
        v
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(parse_real).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(format!("empty range `{s}`"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_int_list("1:10").unwrap().len(), 10);
        assert_eq!(parse_int_list("1:9:2").unwrap(), vec![1, 3, 5, 7, 9]);
        assert_eq!(parse_int_list("3, 5,7").unwrap(), vec![3, 5, 7]);
        assert_eq!(parse_int_list("-2:2").unwrap(), vec![-2, -1, 0, 1, 2]);
        assert!(parse_int_list("5:1").is_err());
        assert!(parse_int_list("").is_err());
        assert!(parse_int_list("1:5:0").is_err());
        assert_eq!(parse_real_list("2:4:0.5").unwrap(), vec![2.0, 2.5, 3.0, 3.5, 4.0]);
        assert_eq!(parse_real_list("0.1:0.3:0.1").unwrap().len(), 3);
        assert_eq!(parse_real_list("2,3,4").unwrap(), vec![2.0, 3.0, 4.0]);
        assert!(parse_real_list("2,x").is_err());
        assert!(parse_real_list("inf").is_err());
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# sweep\nk = 1:3\n p=2,3 # inline\n\ntol.band = 1e-6\n").unwrap();
        assert_eq!(m["k"], "1:3");
        assert_eq!(m["p"], "2,3");
        assert_eq!(m["tol.band"], "1e-6");
        assert!(parse_config_text("bogus = 1").is_err());
        assert!(parse_config_text("k 1").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        std::fs::write(&path, "k = 1:3\np = 3\nformat = json\n").unwrap();
        let args = CommonArgs { config: Some(path), k: Some("7".into()), ..Default::default() };
        let s = Settings::from_common(&args).unwrap();
        assert_eq!(s.k_list("1").unwrap(), vec![7]);
        assert_eq!(s.real_list("p", "2").unwrap(), vec![3.0]);
        assert_eq!(s.format().unwrap(), Format::Json);
    }

    #[test]
    fn eps_schedule_validation() {
        let mut s = Settings::default();
        s.set("eps", Some("1e-2,1e-3,1e-4,1e-5".into()));
        assert_eq!(s.eps_schedule(&[]).unwrap().len(), 4);
        s.set("eps", Some("1e-2,1e-4,1e-3,1e-5".into()));
        assert!(s.eps_schedule(&[]).is_err());
        s.set("eps", Some("1e-2,1e-3".into()));
        assert!(s.eps_schedule(&[]).is_err());
    }

    #[test]
    fn grid_validation() {
        let mut s = Settings::default();
        assert_eq!(s.grid(64, 4.0).unwrap(), (64, 4.0));
        s.set("n", Some("100".into()));
        assert!(s.grid(64, 4.0).is_err());
    }
}
