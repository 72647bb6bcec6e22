//! Run configuration: defaults, an optional JSON config file, and flag
//! overrides, merged in that order. The resolved configuration is echoed
//! into every report, and one seed determines every random draw of a run.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use bethe_core::model::{ModelParams, Variant, POLE_GUARD};
use bethe_core::sampling::ParameterSampler;

/// All check names, in report order (sorted by name).
pub const CHECK_NAMES: [&str; 12] = [
    "column-reduction",
    "commutation",
    "f-basis",
    "factorizing",
    "gaudin",
    "orthogonality",
    "phi-m",
    "residue",
    "rtt",
    "scalar-sum",
    "slavnov",
    "yang-baxter",
];

/// Chain cap for brute-force-backed checks, and the `--unsafe-caps` value.
pub const SITES_CAP: usize = 12;
pub const SITES_CAP_RAISED: usize = bethe_core::oracle::BRUTE_FORCE_MAX_SITES;
/// Magnon cap for the partition sum, and the `--unsafe-caps` value.
pub const MAGNONS_CAP: usize = 5;
pub const MAGNONS_CAP_RAISED: usize = 8;

/// Hard bound on the chain: the monodromy matrix spends one extra bit on the
/// auxiliary spin.
pub const MAX_CONFIG_SITES: usize = bethe_core::tensor::MAX_SITES - 1;

/// Substream id of the inhomogeneity draw, distinct from every check stream.
const XI_STREAM: u64 = 0xC0A1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Rational,
    Trigonometric,
}

impl VariantArg {
    pub fn label(self) -> &'static str {
        match self {
            VariantArg::Rational => "rational",
            VariantArg::Trigonometric => "trigonometric",
        }
    }
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Rational => Variant::Rational,
            VariantArg::Trigonometric => Variant::Trigonometric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Json,
    Tsv,
}

/// Inhomogeneities: a draw mode or explicit points as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XiSpec {
    Mode(String),
    Points(Vec<[f64; 2]>),
}

impl XiSpec {
    pub fn label(&self) -> &str {
        match self {
            XiSpec::Mode(m) => m,
            XiSpec::Points(_) => "explicit",
        }
    }
}

/// JSON config file mirroring the flags; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub variant: Option<VariantArg>,
    pub sites: Option<usize>,
    pub magnons: Option<usize>,
    pub eta: Option<[f64; 2]>,
    pub xi: Option<XiSpec>,
    pub seed: Option<u64>,
    pub tol: Option<BTreeMap<String, f64>>,
    pub checks: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub format: Option<FormatArg>,
    pub unsafe_caps: Option<bool>,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON config file mirroring the flags
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Weight variant
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Chain length
    #[arg(long)]
    pub sites: Option<usize>,
    /// Number of creation operators, and of Bethe roots where roots are solved
    #[arg(long)]
    pub magnons: Option<usize>,
    /// Anisotropy as "re,im" or "re"
    #[arg(long)]
    pub eta: Option<String>,
    /// Inhomogeneities: "random", "homogeneous", or "re,im;re,im;..."
    #[arg(long)]
    pub xi: Option<String>,
    /// Seed behind every random draw
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override "check=value", or "value" for every check; repeatable
    #[arg(long, value_name = "SPEC")]
    pub tol: Vec<String>,
    /// Comma-separated check names, or "all"
    #[arg(long)]
    pub checks: Option<String>,
    /// Report file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Raise the size caps to the brute-force maximum (sites 14, magnons 8)
    #[arg(long)]
    pub unsafe_caps: bool,
}

/// The merged configuration, echoed verbatim into every report.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub variant: VariantArg,
    pub sites: usize,
    pub magnons: usize,
    pub eta: [f64; 2],
    pub xi: XiSpec,
    pub seed: u64,
    pub tol: BTreeMap<String, f64>,
    pub checks: Vec<String>,
    pub out: Option<PathBuf>,
    pub format: FormatArg,
    pub unsafe_caps: bool,
}

impl ResolvedConfig {
    pub fn variant_core(&self) -> Variant {
        self.variant.into()
    }

    pub fn eta_c(&self) -> Complex64 {
        Complex64::new(self.eta[0], self.eta[1])
    }

    pub fn cap_sites(&self) -> usize {
        if self.unsafe_caps {
            SITES_CAP_RAISED
        } else {
            SITES_CAP
        }
    }

    pub fn cap_magnons(&self) -> usize {
        if self.unsafe_caps {
            MAGNONS_CAP_RAISED
        } else {
            MAGNONS_CAP
        }
    }

    /// Effective tolerance of one check: an override under the check's name
    /// wins, then an override under "*", then the built-in default.
    pub fn tol_for(&self, check: &str, default: f64) -> f64 {
        self.tol
            .get(check)
            .or_else(|| self.tol.get("*"))
            .copied()
            .unwrap_or(default)
    }

    /// Canonical one-line digest of the inputs a check ran on.
    pub fn digest(&self, draws: usize) -> String {
        format!(
            "variant={};sites={};magnons={};eta={};xi={};seed={};draws={draws}",
            self.variant.label(),
            self.sites,
            self.magnons,
            fmt_complex(self.eta_c()),
            self.xi.label(),
            self.seed,
        )
    }

    /// The configured chain. Random inhomogeneities come from a substream of
    /// the run seed that no check shares.
    pub fn build_model(&self) -> bethe_core::Result<ModelParams> {
        let variant = self.variant_core();
        let eta = self.eta_c();
        match &self.xi {
            XiSpec::Mode(mode) if mode == "homogeneous" => {
                ModelParams::homogeneous(variant, eta, self.sites, Complex64::ZERO)
            }
            XiSpec::Mode(_) => ParameterSampler::substream(self.seed, XI_STREAM)
                .random_model(variant, eta, self.sites),
            XiSpec::Points(pts) => {
                let xi = pts.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                ModelParams::new(variant, eta, xi)
            }
        }
    }
}

/// Compact complex formatting for digests and human output.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn resolve(args: &CommonArgs) -> Result<ResolvedConfig, String> {
    let file: ConfigFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => ConfigFile::default(),
    };

    let eta = match &args.eta {
        Some(text) => {
            let z = parse_complex(text)?;
            [z.re, z.im]
        }
        None => file.eta.unwrap_or([1.0, 0.0]),
    };
    let xi = match &args.xi {
        Some(text) => parse_xi(text)?,
        None => file.xi.unwrap_or_else(|| XiSpec::Mode("random".into())),
    };
    let mut tol = file.tol.unwrap_or_default();
    for spec in &args.tol {
        let (key, value) = parse_tol(spec)?;
        tol.insert(key, value);
    }
    let checks = match &args.checks {
        Some(text) => normalize_checks(split_checks(text))?,
        None => match file.checks {
            Some(list) => normalize_checks(list)?,
            None => CHECK_NAMES.iter().map(|s| s.to_string()).collect(),
        },
    };

    let cfg = ResolvedConfig {
        variant: args
            .variant
            .or(file.variant)
            .unwrap_or(VariantArg::Rational),
        sites: args.sites.or(file.sites).unwrap_or(6),
        magnons: args.magnons.or(file.magnons).unwrap_or(2),
        eta,
        xi,
        seed: args.seed.or(file.seed).unwrap_or(7),
        tol,
        checks,
        out: args.out.clone().or(file.out),
        format: args.format.or(file.format).unwrap_or(FormatArg::Json),
        unsafe_caps: args.unsafe_caps || file.unsafe_caps.unwrap_or(false),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ResolvedConfig) -> Result<(), String> {
    if cfg.sites < 2 || cfg.sites > MAX_CONFIG_SITES {
        return Err(format!(
            "sites must lie in 2..={MAX_CONFIG_SITES}, got {}",
            cfg.sites
        ));
    }
    if cfg.magnons > cfg.sites {
        return Err(format!(
            "magnons {} exceeds the chain length {}",
            cfg.magnons, cfg.sites
        ));
    }
    let eta = cfg.eta_c();
    if !eta.re.is_finite() || !eta.im.is_finite() {
        return Err("eta must be finite".into());
    }
    if cfg.variant_core().phi(eta).norm() < POLE_GUARD {
        return Err(format!(
            "degenerate anisotropy: phi(eta) vanishes at eta = {}",
            fmt_complex(eta)
        ));
    }
    match &cfg.xi {
        XiSpec::Mode(mode) if mode == "random" || mode == "homogeneous" => {}
        XiSpec::Mode(mode) => {
            return Err(format!(
                "unknown xi mode '{mode}'; use \"random\", \"homogeneous\", or explicit points"
            ));
        }
        XiSpec::Points(pts) => {
            if pts.len() != cfg.sites {
                return Err(format!(
                    "explicit xi lists {} points for a chain of {} sites",
                    pts.len(),
                    cfg.sites
                ));
            }
            if pts.iter().flatten().any(|v| !v.is_finite()) {
                return Err("explicit xi points must be finite".into());
            }
        }
    }
    for (key, value) in &cfg.tol {
        if key != "*" && !CHECK_NAMES.contains(&key.as_str()) {
            return Err(format!(
                "tolerance override names unknown check '{key}'; valid names: {}",
                CHECK_NAMES.join(", ")
            ));
        }
        if !value.is_finite() || *value <= 0.0 {
            return Err(format!(
                "tolerance for '{key}' must be positive, got {value}"
            ));
        }
    }
    Ok(())
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let bad = || format!("cannot parse '{text}' as a complex number; use \"re,im\" or \"re\"");
    let (re, im) = match text.split_once(',') {
        Some((re, im)) => (re, im),
        None => (text, "0"),
    };
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn parse_xi(text: &str) -> Result<XiSpec, String> {
    let trimmed = text.trim();
    if trimmed == "random" || trimmed == "homogeneous" {
        return Ok(XiSpec::Mode(trimmed.into()));
    }
    let points = trimmed
        .split(';')
        .filter(|part| !part.trim().is_empty())
        .map(|part| parse_complex(part).map(|z| [z.re, z.im]))
        .collect::<Result<Vec<_>, _>>()?;
    if points.is_empty() {
        return Err(format!(
            "cannot parse xi '{text}'; use \"random\", \"homogeneous\", or \"re,im;re,im;...\""
        ));
    }
    Ok(XiSpec::Points(points))
}

fn parse_tol(spec: &str) -> Result<(String, f64), String> {
    let (key, value) = match spec.split_once('=') {
        Some((key, value)) => (key.trim().to_string(), value),
        None => ("*".to_string(), spec),
    };
    let value: f64 = value.trim().parse().map_err(|_| {
        format!("cannot parse tolerance '{spec}'; use \"check=value\" or \"value\"")
    })?;
    Ok((key, value))
}

fn split_checks(text: &str) -> Vec<String> {
    text.split(',')
        .map(|part| part.trim().to_string())
        .filter(|part| !part.is_empty())
        .collect()
}

fn normalize_checks(items: Vec<String>) -> Result<Vec<String>, String> {
    if items.iter().any(|item| item == "all") {
        return Ok(CHECK_NAMES.iter().map(|s| s.to_string()).collect());
    }
    let mut set = BTreeSet::new();
    for item in items {
        if !CHECK_NAMES.contains(&item.as_str()) {
            return Err(format!(
                "unknown check '{item}'; valid names: {}",
                CHECK_NAMES.join(", ")
            ));
        }
        set.insert(item);
    }
    Ok(set.into_iter().collect())
}

/// A resolved default configuration for tests in sibling modules.
#[cfg(test)]
pub fn test_config() -> ResolvedConfig {
    resolve(&CommonArgs {
        config: None,
        variant: None,
        sites: None,
        magnons: None,
        eta: None,
        xi: None,
        seed: None,
        tol: Vec::new(),
        checks: None,
        out: None,
        format: None,
        unsafe_caps: false,
    })
    .expect("defaults resolve")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare_args() -> CommonArgs {
        CommonArgs {
            config: None,
            variant: None,
            sites: None,
            magnons: None,
            eta: None,
            xi: None,
            seed: None,
            tol: Vec::new(),
            checks: None,
            out: None,
            format: None,
            unsafe_caps: false,
        }
    }

    #[test]
    fn check_names_are_sorted_and_distinct() {
        let mut sorted = CHECK_NAMES.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted, CHECK_NAMES);
    }

    #[test]
    fn complex_arguments_accept_both_forms() {
        assert_eq!(
            parse_complex("1.5,-0.25").unwrap(),
            Complex64::new(1.5, -0.25)
        );
        assert_eq!(parse_complex(" 2 ").unwrap(), Complex64::new(2.0, 0.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("inf,0").is_err());
    }

    #[test]
    fn xi_arguments_accept_modes_and_point_lists() {
        assert_eq!(parse_xi("random").unwrap(), XiSpec::Mode("random".into()));
        assert_eq!(
            parse_xi("0,1;2,-3").unwrap(),
            XiSpec::Points(vec![[0.0, 1.0], [2.0, -3.0]])
        );
        assert!(parse_xi(";;").is_err());
    }

    #[test]
    fn tolerance_overrides_parse_named_and_global_forms() {
        assert_eq!(parse_tol("gaudin=1e-6").unwrap(), ("gaudin".into(), 1e-6));
        assert_eq!(parse_tol("1e-9").unwrap(), ("*".into(), 1e-9));
        assert!(parse_tol("gaudin=").is_err());
    }

    #[test]
    fn check_lists_deduplicate_and_sort() {
        let items = vec!["rtt".to_string(), "gaudin".to_string(), "rtt".to_string()];
        assert_eq!(normalize_checks(items).unwrap(), vec!["gaudin", "rtt"]);
        let all = normalize_checks(vec!["all".to_string()]).unwrap();
        assert_eq!(all.len(), CHECK_NAMES.len());
        assert!(normalize_checks(vec!["bogus".to_string()]).is_err());
    }

    #[test]
    fn named_tolerances_beat_the_global_override() {
        let mut args = bare_args();
        args.tol = vec!["1e-6".to_string(), "gaudin=1e-3".to_string()];
        let cfg = resolve(&args).unwrap();
        assert_eq!(cfg.tol_for("gaudin", 1e-7), 1e-3);
        assert_eq!(cfg.tol_for("rtt", 1e-11), 1e-6);
        let plain = resolve(&bare_args()).unwrap();
        assert_eq!(plain.tol_for("rtt", 1e-11), 1e-11);
    }

    #[test]
    fn defaults_describe_a_small_random_rational_chain() {
        let cfg = resolve(&bare_args()).unwrap();
        assert_eq!(cfg.variant, VariantArg::Rational);
        assert_eq!((cfg.sites, cfg.magnons, cfg.seed), (6, 2, 7));
        assert_eq!(cfg.eta, [1.0, 0.0]);
        assert_eq!(cfg.checks.len(), CHECK_NAMES.len());
        assert!(!cfg.unsafe_caps);
        assert_eq!(cfg.cap_sites(), SITES_CAP);
    }

    #[test]
    fn validation_rejects_unusable_configurations() {
        for (mutate, needle) in [
            (
                Box::new(|a: &mut CommonArgs| a.sites = Some(1)) as Box<dyn Fn(&mut CommonArgs)>,
                "sites",
            ),
            (Box::new(|a| a.magnons = Some(9)), "magnons"),
            (Box::new(|a| a.eta = Some("0,0".into())), "degenerate"),
            (Box::new(|a| a.xi = Some("0,0;1,0".into())), "points"),
            (
                Box::new(|a| a.tol = vec!["bogus=1".into()]),
                "unknown check",
            ),
            (Box::new(|a| a.tol = vec!["rtt=0".into()]), "positive"),
        ] {
            let mut args = bare_args();
            mutate(&mut args);
            let err = resolve(&args).unwrap_err();
            assert!(err.contains(needle), "{err}");
        }
    }

    #[test]
    fn digests_echo_the_shared_inputs() {
        let cfg = resolve(&bare_args()).unwrap();
        assert_eq!(
            cfg.digest(10),
            "variant=rational;sites=6;magnons=2;eta=1+0i;xi=random;seed=7;draws=10"
        );
    }

    #[test]
    fn complex_formatting_folds_the_sign_into_the_imaginary_part() {
        assert_eq!(fmt_complex(Complex64::new(1.0, 0.0)), "1+0i");
        assert_eq!(fmt_complex(Complex64::new(0.6, -0.3)), "0.6-0.3i");
    }

    #[test]
    fn explicit_inhomogeneities_build_the_requested_chain() {
        let mut args = bare_args();
        args.sites = Some(2);
        args.magnons = Some(1);
        args.xi = Some("0.1,0;0.9,0.2".into());
        let cfg = resolve(&args).unwrap();
        let model = cfg.build_model().unwrap();
        assert_eq!(
            model.xi(),
            &[Complex64::new(0.1, 0.0), Complex64::new(0.9, 0.2)]
        );
    }
}
