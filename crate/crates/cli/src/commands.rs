use std::fs;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ownconc::calibrate::{
    calibrate_theta, entropy_surface, scan_theta, CalibrationOptions, CalibrationResult, Grid,
    Objective,
};
use ownconc::copulas::{CopulaSpec, Family};
use ownconc::io::{fmt_num, joint_to_csv, read_sample, scan_to_csv, to_versioned_json};
use ownconc::marginals::{
    empirical_pmf, fit_exponential_ls, fit_power_law_ls, fit_power_law_mle, DiscretePmf, FitReport,
    FitTarget, Goodness,
};
use ownconc::measures::{copula_value_entropy, euclidean_distance, shannon_entropy, Goal};
use ownconc::net::{
    build_degree_sample, degree_sequences, load_edge_list, DegreeRecord, DropCounts, EdgeFormat,
    SampleMode, Samples,
};
use ownconc::report::{build_report, ReportInput, ReportOptions};
use ownconc::sklar::{empirical_joint, joint_from_copula, JointPmf};

use crate::cli::*;
use crate::inputs::*;

pub struct Ctx {
    pub format: Option<Format>,
    pub quiet: bool,
}

impl Ctx {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn json<T: Serialize>(body: &T) -> CliResult<String> {
    Ok(to_versioned_json(body)?)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Core(e.into()))
}

fn copula(s: &str) -> CliResult<CopulaSpec> {
    Ok(s.parse()?)
}

fn family(s: &str) -> CliResult<Family> {
    Ok(s.parse()?)
}

fn grid(s: &str) -> CliResult<Grid> {
    Ok(s.parse()?)
}

fn marginals(m: &MarginalPair) -> CliResult<(DiscretePmf, DiscretePmf)> {
    Ok((
        load_marginal(require(&m.inn, "--in")?)?,
        load_marginal(require(&m.out, "--out")?)?,
    ))
}

fn goal(g: GoalArg) -> Goal {
    match g {
        GoalArg::Min => Goal::Min,
        GoalArg::Max => Goal::Max,
    }
}

// ---------------------------------------------------------------------------
// degrees

struct LoadedSample {
    records: Vec<DegreeRecord>,
    dropped: DropCounts,
    samples: Samples,
}

fn load_degrees(path: &Path, input: &EdgeInput, ctx: &Ctx) -> CliResult<LoadedSample> {
    let text = read_text(path)?;
    let format = if input.tsv {
        EdgeFormat::Tsv
    } else {
        EdgeFormat::Csv
    };
    let loaded = load_edge_list(text.as_bytes(), format)?;
    let d = loaded.dropped;
    if d.self_loops + d.duplicates > 0 {
        ctx.note(format!(
            "dropped {} self-loops and {} duplicate edges",
            d.self_loops, d.duplicates
        ));
    }
    let records = degree_sequences(&loaded.edges);
    let mode = match input.mode {
        Mode::JointPositive => SampleMode::JointPositive,
        Mode::MarginalPositive => SampleMode::MarginalPositive,
    };
    let samples = build_degree_sample(&records, mode)?;
    Ok(LoadedSample {
        records,
        dropped: d,
        samples,
    })
}

fn histogram_csv(values: &[usize]) -> String {
    let n = values.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; n];
    for &v in values {
        counts[v - 1] += 1;
    }
    let mut s = String::from("j,count\n");
    for (j, c) in counts.iter().enumerate() {
        s.push_str(&format!("{},{c}\n", j + 1));
    }
    s
}

#[derive(Serialize)]
struct DegreesDoc<'a> {
    records: &'a [DegreeRecord],
    dropped: DropCounts,
    n_in_max: usize,
    n_out_max: usize,
}

pub fn degrees(args: &DegreesArgs, ctx: &Ctx) -> CliResult<String> {
    let loaded = load_degrees(&args.edges, &args.input, ctx)?;
    let (k_in, k_out, joint) = match &loaded.samples {
        Samples::Joint(s) => (s.k_in(), s.k_out(), Some(empirical_joint(s)?)),
        Samples::Marginal { k_in, k_out } => (k_in.clone(), k_out.clone(), None),
    };
    if let Some(dir) = &args.hist_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Core(e.into()))?;
        write_file(&dir.join("k_in.csv"), &histogram_csv(&k_in))?;
        write_file(&dir.join("k_out.csv"), &histogram_csv(&k_out))?;
        if let Some(j) = &joint {
            write_file(&dir.join("joint.csv"), &joint_to_csv(j))?;
        }
    }
    let n_in_max = k_in.iter().copied().max().unwrap_or(0);
    let n_out_max = k_out.iter().copied().max().unwrap_or(0);
    ctx.note(format!(
        "{} nodes; k_in in [1..{n_in_max}], k_out in [1..{n_out_max}] after zero exclusion",
        loaded.records.len()
    ));
    match ctx.format_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("node_id,k_in,k_out\n");
            for r in &loaded.records {
                s.push_str(&format!("{},{},{}\n", r.node_id, r.k_in, r.k_out));
            }
            Ok(s)
        }
        Format::Json => json(&DegreesDoc {
            records: &loaded.records,
            dropped: loaded.dropped,
            n_in_max,
            n_out_max,
        }),
    }
}

// ---------------------------------------------------------------------------
// fit

enum FitData {
    Pmf(DiscretePmf),
    Sample(Vec<usize>, usize),
}

/// Expands a histogram of integer counts into a sample.
fn counts_to_sample(pmf_weights: &[f64]) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for (j, &w) in pmf_weights.iter().enumerate() {
        if w.fract() != 0.0 || w < 0.0 {
            return None;
        }
        out.extend(std::iter::repeat_n(j + 1, w as usize));
    }
    Some(out)
}

fn raw_histogram(path: &Path) -> CliResult<Vec<f64>> {
    let text = read_text(path)?;
    let mut w: Vec<f64> = Vec::new();
    for line in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        let Some((j, x)) = line.split_once(',') else {
            continue;
        };
        let (Ok(j), Ok(x)) = (j.trim().parse::<usize>(), x.trim().parse::<f64>()) else {
            continue;
        };
        if j == 0 {
            continue;
        }
        if w.len() < j {
            w.resize(j, 0.0);
        }
        w[j - 1] += x;
    }
    Ok(w)
}

fn fit_data(args: &FitArgs) -> CliResult<FitData> {
    if let Some(p) = &args.hist {
        if args.method == FitMethodArg::Mle {
            let sample = counts_to_sample(&raw_histogram(p)?).ok_or_else(|| {
                CliError::Usage("--method mle needs integer counts or --sample".into())
            })?;
            let n = args
                .n
                .unwrap_or_else(|| sample.iter().copied().max().unwrap_or(0));
            return Ok(FitData::Sample(sample, n));
        }
        return Ok(FitData::Pmf(read_pmf(p)?));
    }
    if let Some(p) = &args.sample {
        let sample = read_sample(read_text(p)?.as_bytes())?;
        let n = args
            .n
            .unwrap_or_else(|| sample.iter().copied().max().unwrap_or(0));
        return Ok(FitData::Sample(sample, n));
    }
    if let Some(spec) = &args.synthetic {
        let pmf = load_marginal(spec)?;
        return Ok(match args.draws {
            None => FitData::Pmf(pmf),
            Some(draws) => {
                let dist = WeightedIndex::new(pmf.probs())
                    .map_err(|e| CliError::Usage(format!("cannot sample {spec}: {e}")))?;
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                let sample: Vec<usize> = (0..draws).map(|_| dist.sample(&mut rng) + 1).collect();
                FitData::Sample(sample, pmf.n())
            }
        });
    }
    usage("fit needs --hist, --sample or --synthetic")
}

fn fit_csv(r: &FitReport) -> String {
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    let (kind, g) = match r.goodness {
        Goodness::Rmse(x) => ("rmse", x),
        Goodness::LogLikelihood(x) => ("log_likelihood", x),
    };
    let value = serde_json::to_value(r).unwrap_or_default();
    let name = |k: &str| value[k].as_str().unwrap_or_default().to_owned();
    format!(
        "family,method,estimate,amplitude,lo,hi,goodness_kind,goodness,boundary,points\n\
         {},{},{},{},{},{},{kind},{},{},{}\n",
        name("family"),
        name("method"),
        fmt_num(r.estimate),
        opt(r.amplitude),
        opt(r.interval.map(|i| i.0)),
        opt(r.interval.map(|i| i.1)),
        fmt_num(g),
        r.boundary,
        r.points
    )
}

pub fn fit(args: &FitArgs, ctx: &Ctx) -> CliResult<String> {
    let data = fit_data(args)?;
    let report = match (args.family, args.method, data) {
        (FitFamilyArg::PowerLaw, FitMethodArg::Mle, FitData::Sample(s, n)) => {
            fit_power_law_mle(&s, n)?
        }
        (_, FitMethodArg::Mle, FitData::Pmf(_)) => {
            return usage("--method mle needs sample data (--sample or --draws)")
        }
        (FitFamilyArg::Exponential, FitMethodArg::Mle | FitMethodArg::LsSurvival, _) => {
            return usage("exponential fits support --method ls only")
        }
        (family, method, data) => {
            let pmf = match data {
                FitData::Pmf(p) => p,
                FitData::Sample(s, n) => empirical_pmf(&s, n)?,
            };
            match (family, method) {
                (FitFamilyArg::Exponential, _) => fit_exponential_ls(&pmf)?,
                (_, FitMethodArg::LsSurvival) => fit_power_law_ls(&pmf, FitTarget::Survival)?,
                _ => fit_power_law_ls(&pmf, FitTarget::Density)?,
            }
        }
    };
    if report.boundary {
        ctx.note("estimate sits on the edge of the parameter domain");
    }
    match ctx.format_or(Format::Json) {
        Format::Json => json(&report),
        Format::Csv => Ok(fit_csv(&report)),
    }
}

// ---------------------------------------------------------------------------
// joint, entropy, distance

fn joint_out(joint: &JointPmf, ctx: &Ctx) -> CliResult<String> {
    match ctx.format_or(Format::Csv) {
        Format::Csv => Ok(joint_to_csv(joint)),
        Format::Json => json(joint),
    }
}

pub fn joint(args: &JointArgs, ctx: &Ctx) -> CliResult<String> {
    let (pin, pout) = marginals(&args.marginals)?;
    let j = joint_from_copula(&copula(&args.copula)?, &pin, &pout)?;
    joint_out(&j, ctx)
}

fn joint_from_args(
    file: &Option<std::path::PathBuf>,
    m: &MarginalPair,
    spec: &Option<String>,
) -> CliResult<JointPmf> {
    match (file, spec) {
        (Some(p), _) => read_joint(p),
        (None, Some(c)) => {
            let (pin, pout) = marginals(m)?;
            Ok(joint_from_copula(&copula(c)?, &pin, &pout)?)
        }
        (None, None) => usage("give --joint FILE or --in/--out with --copula"),
    }
}

fn scalar_out(fields: &[(&str, f64)], ctx: &Ctx) -> CliResult<String> {
    match ctx.format_or(Format::Json) {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .iter()
                .map(|(k, v)| ((*k).to_owned(), serde_json::Value::from(*v)))
                .collect();
            json(&map)
        }
        Format::Csv => {
            let head: Vec<&str> = fields.iter().map(|f| f.0).collect();
            let vals: Vec<String> = fields.iter().map(|f| fmt_num(f.1)).collect();
            Ok(format!("{}\n{}\n", head.join(","), vals.join(",")))
        }
    }
}

pub fn entropy(args: &EntropyArgs, ctx: &Ctx) -> CliResult<String> {
    let j = joint_from_args(&args.joint, &args.marginals, &args.copula)?;
    let h = shannon_entropy(&j).nats();
    let mut fields = vec![("entropy", h), ("max_entropy", (j.cells() as f64).ln())];
    if args.copula_values {
        let (pin, pout) = marginals(&args.marginals)?;
        let spec = copula(require(&args.copula, "--copula")?)?;
        fields.push((
            "copula_value_entropy",
            copula_value_entropy(&spec, &pin, &pout),
        ));
    }
    scalar_out(&fields, ctx)
}

pub fn distance(args: &DistanceArgs, ctx: &Ctx) -> CliResult<String> {
    let target = read_joint(&args.target)?;
    let j = joint_from_args(&args.joint, &args.marginals, &args.copula)?;
    scalar_out(&[("distance", euclidean_distance(&j, &target))], ctx)
}

// ---------------------------------------------------------------------------
// scan, calibrate

fn objective(
    kind: ObjectiveArg,
    target: &Option<std::path::PathBuf>,
    pin: &DiscretePmf,
    pout: &DiscretePmf,
) -> CliResult<Objective> {
    match kind {
        ObjectiveArg::Entropy => Ok(Objective::Entropy),
        ObjectiveArg::Distance => {
            let path = target
                .as_ref()
                .ok_or_else(|| CliError::Usage("the distance objective needs --target".into()))?;
            let t = fit_target(read_joint(path)?, pin.n(), pout.n())?;
            Ok(Objective::Distance(t))
        }
    }
}

pub fn scan(args: &ScanArgs, ctx: &Ctx) -> CliResult<String> {
    let fam = family(&args.family)?;
    let theta_grid = args.grid.as_deref().map(grid).transpose()?;

    if let Some(k) = &args.k_grid {
        if args.objective != ObjectiveArg::Entropy {
            return usage("surfaces over k support the entropy objective only");
        }
        let out = surface_marginal(require(&args.marginals.out, "--out")?)?;
        let inn = surface_marginal(require(&args.marginals.inn, "--in")?)?;
        let surface = entropy_surface(&out, &inn, fam, grid(k)?, theta_grid)?;
        return match ctx.format_or(Format::Csv) {
            Format::Csv => Ok(scan_to_csv(&surface.scan)),
            Format::Json => json(&surface),
        };
    }

    if !fam.is_parametric() {
        return usage(format!(
            "{fam} has no θ to scan; use --k-grid or the entropy command"
        ));
    }
    let g = theta_grid.ok_or_else(|| CliError::Usage("missing --grid".into()))?;
    let (pin, pout) = marginals(&args.marginals)?;
    let obj = objective(args.objective, &args.target, &pin, &pout)?;
    let result = scan_theta(fam, &pin, &pout, &obj, g)?;
    match ctx.format_or(Format::Csv) {
        Format::Csv => Ok(scan_to_csv(&result)),
        Format::Json => json(&result),
    }
}

fn calibration_options(flags: &CalibrationFlags) -> CliResult<CalibrationOptions> {
    if flags.coarse_points < 3 {
        return usage("--coarse-points must be at least 3");
    }
    if flags.tol.is_nan() || flags.tol <= 0.0 {
        return usage("--tol must be positive");
    }
    Ok(CalibrationOptions {
        window: flags.window.as_deref().map(parse_window).transpose()?,
        coarse_points: flags.coarse_points,
        tol: flags.tol,
    })
}

fn calibration_csv(r: &CalibrationResult) -> String {
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    let value = serde_json::to_value(r).unwrap_or_default();
    let name = |k: &str| value[k].as_str().unwrap_or_default().to_owned();
    format!(
        "family,goal,objective_label,theta_star,k_star,objective,location,window_lo,window_hi\n\
         {},{},{},{},{},{},{},{},{}\n",
        r.family,
        name("goal"),
        r.objective_label,
        opt(r.theta_star),
        opt(r.k_star),
        fmt_num(r.objective),
        name("location"),
        fmt_num(r.window.0),
        fmt_num(r.window.1)
    )
}

pub fn calibrate(args: &CalibrateArgs, ctx: &Ctx) -> CliResult<String> {
    let fam = family(&args.family)?;
    if !fam.is_parametric() {
        return usage(format!("{fam} has no parameter to calibrate"));
    }
    let (pin, pout) = marginals(&args.marginals)?;
    let obj = objective(args.objective, &args.target, &pin, &pout)?;
    let g = args.goal.map(goal).unwrap_or(match args.objective {
        ObjectiveArg::Distance => Goal::Min,
        ObjectiveArg::Entropy => Goal::Max,
    });
    let result = calibrate_theta(
        fam,
        &pin,
        &pout,
        &obj,
        g,
        &calibration_options(&args.calibration)?,
    )?;
    if let Some(p) = &args.trace {
        write_file(p, &scan_to_csv(&result.trace))?;
    }
    match ctx.format_or(Format::Json) {
        Format::Json => json(&result),
        Format::Csv => Ok(calibration_csv(&result)),
    }
}

// ---------------------------------------------------------------------------
// report

pub fn report(args: &ReportArgs, ctx: &Ctx) -> CliResult<String> {
    if ctx.format == Some(Format::Csv) {
        return usage("report is written as JSON only");
    }
    let input = match &args.edges {
        Some(path) => {
            let loaded = load_degrees(path, &args.input, ctx)?;
            let source = path.display().to_string();
            match loaded.samples {
                Samples::Joint(s) => {
                    let k_out = s.k_out();
                    ReportInput::from_empirical(source, empirical_joint(&s)?, k_out)?
                }
                Samples::Marginal { k_in, k_out } => {
                    let n_in = k_in.iter().copied().max().unwrap_or(0);
                    let n_out = k_out.iter().copied().max().unwrap_or(0);
                    ReportInput {
                        source,
                        pmf_in: empirical_pmf(&k_in, n_in)?,
                        pmf_out: empirical_pmf(&k_out, n_out)?,
                        empirical: None,
                        k_out_sample: Some(k_out),
                    }
                }
            }
        }
        None => {
            let (pin, pout) = marginals(&args.marginals)?;
            let empirical = match &args.target {
                Some(p) => Some(fit_target(read_joint(p)?, pin.n(), pout.n())?),
                None => None,
            };
            let source = format!(
                "in={} out={}",
                require(&args.marginals.inn, "--in")?,
                require(&args.marginals.out, "--out")?
            );
            ReportInput {
                source,
                pmf_in: pin,
                pmf_out: pout,
                empirical,
                k_out_sample: None,
            }
        }
    };
    let mut opts = ReportOptions {
        calibration: calibration_options(&args.calibration)?,
        ..Default::default()
    };
    if let Some(k) = &args.k_grid {
        opts.k_grid = grid(k)?;
    }
    json(&build_report(&input, &opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts() {
        assert_eq!(histogram_csv(&[1, 3, 3]), "j,count\n1,1\n2,0\n3,2\n");
    }

    #[test]
    fn counts_expand_to_samples() {
        assert_eq!(counts_to_sample(&[2.0, 0.0, 1.0]), Some(vec![1, 1, 3]));
        assert_eq!(counts_to_sample(&[0.5, 0.5]), None);
    }
}
