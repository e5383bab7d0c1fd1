use std::fs;
use std::path::{Path, PathBuf};

use ownconc::calibrate::SurfaceMarginal;
use ownconc::io::{read_joint_csv, read_joint_json, read_pmf_csv, read_pmf_json};
use ownconc::marginals::{realize, DiscretePmf, FitFamily, MarginalSpec};
use ownconc::sklar::JointPmf;

#[derive(Debug)]
pub enum CliError {
    Missing(PathBuf),
    Usage(String),
    Core(ownconc::Error),
}

impl From<ownconc::Error> for CliError {
    fn from(e: ownconc::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Missing(_) | CliError::Usage(_) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Missing(p) => write!(f, "no such file: {}", p.display()),
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    if !path.is_file() {
        return Err(CliError::Missing(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|e| CliError::Core(e.into()))
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn read_pmf(path: &Path) -> CliResult<DiscretePmf> {
    let text = read_text(path)?;
    let pmf = if is_json(path) {
        read_pmf_json(&text)?
    } else {
        read_pmf_csv(text.as_bytes())?
    };
    Ok(pmf)
}

pub fn read_joint(path: &Path) -> CliResult<JointPmf> {
    let text = read_text(path)?;
    let joint = if is_json(path) {
        read_joint_json(&text)?
    } else {
        read_joint_csv(text.as_bytes())?
    };
    Ok(joint)
}

/// A marginal argument: a parametric spec, a spec with `k` in place of the
/// parameter, or a pmf file.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalArg {
    Spec(MarginalSpec),
    Scanned { family: FitFamily, n: usize },
    File(PathBuf),
}

pub fn parse_marginal(s: &str) -> CliResult<MarginalArg> {
    let parts: Vec<&str> = s.split(':').collect();
    let family = match parts[0] {
        "power-law" | "power_law" => Some(FitFamily::PowerLaw),
        "exponential" => Some(FitFamily::Exponential),
        _ => None,
    };
    let Some(family) = family else {
        return Ok(MarginalArg::File(PathBuf::from(s)));
    };
    let bad = || CliError::Usage(format!("marginal {s:?} is not family:parameter:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if parts[1] == "k" {
        return Ok(MarginalArg::Scanned { family, n });
    }
    let x: f64 = parts[1].parse().map_err(|_| bad())?;
    Ok(MarginalArg::Spec(match family {
        FitFamily::PowerLaw => MarginalSpec::power_law(x, n),
        FitFamily::Exponential => MarginalSpec::exponential(x, n),
    }))
}

pub fn load_marginal(s: &str) -> CliResult<DiscretePmf> {
    match parse_marginal(s)? {
        MarginalArg::Spec(spec) => Ok(realize(&spec)?),
        MarginalArg::File(p) => read_pmf(&p),
        MarginalArg::Scanned { .. } => usage(format!("{s:?}: a scanned marginal needs --k-grid")),
    }
}

pub fn surface_marginal(s: &str) -> CliResult<SurfaceMarginal> {
    Ok(match parse_marginal(s)? {
        MarginalArg::Spec(spec) => SurfaceMarginal::Fixed(spec),
        MarginalArg::Scanned { family, n } => SurfaceMarginal::Scanned { family, n },
        MarginalArg::File(p) => {
            SurfaceMarginal::Fixed(MarginalSpec::empirical(read_pmf(&p)?.probs().to_vec()))
        }
    })
}

pub fn require<'a>(value: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing {flag}")))
}

/// Pads `target` to the marginals' grid when it is smaller.
pub fn fit_target(target: JointPmf, n_in: usize, n_out: usize) -> CliResult<JointPmf> {
    if target.n_in() > n_in || target.n_out() > n_out {
        return usage(format!(
            "target grid {}x{} exceeds the marginals' {}x{}",
            target.n_in(),
            target.n_out(),
            n_in,
            n_out
        ));
    }
    Ok(target.padded(n_in, n_out))
}

pub fn parse_window(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("window {s:?} is not lo:hi"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(bad());
    }
    Ok((lo, hi))
}
