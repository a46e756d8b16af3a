//! The five subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use super::config::{merge_with_config, read_config_file};
use super::output::{comment_lines, csv, emit, json, num, table};
use super::{
    Cli, CliError, Command, CommonArgs, DensityArgs, Format, GridScale, PredictiveArgs, RiskArgs, SampleArgs,
    SimulateArgs, Variable, EXIT_NUMERIC,
};
use crate::densities::{
    density_gamma, density_p, density_tau, log_density_log_scale_mixture, DecisionPrior, PriorFamily,
};
use crate::error::Error;
use crate::marginals::{
    kl_risk_bound, log_marginal_likelihood, log_spaced_counts, phi_marginal, predictive_score, symmetric_log_grid,
    write_figure_csv, FigureRow,
};
use crate::mcmc::{run_chain, ChainConfig, FixedGlobals, GlobalPriors};
use crate::sim::{evaluate_models, render_table, SimulationDesign, SimulationReport};

pub(super) fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let file = cli.common.config.as_deref().map(read_config_file).transpose()?;
    let file = file.as_ref();
    match cli.command {
        Command::Density(a) => density(&cli.common, a, file, stdout),
        Command::Sample(a) => sample(&cli.common, a, file, stdout),
        Command::Risk(a) => risk(&cli.common, a, file, stdout),
        Command::Predictive(a) => predictive(&cli.common, a, file, stdout),
        Command::Simulate(a) => simulate(&cli.common, a, file, stdout, stderr),
    }
}

/// Settings shared by every command after merging flags and config file.
struct Run {
    command: &'static str,
    seed: u64,
    format: Format,
    output: Option<PathBuf>,
}

impl Run {
    /// Resolve the common settings: flag first, then config file, then default.
    fn new(
        command: &'static str,
        common: &CommonArgs,
        merged: &Map<String, Value>,
        default_format: Format,
    ) -> Result<Self, CliError> {
        let from_file = |key: &str| merged.get(key).filter(|v| !v.is_null()).cloned();
        let seed = match (common.seed, from_file("seed")) {
            (Some(s), _) => s,
            (None, Some(v)) => serde_json::from_value(v).map_err(|e| CliError::usage(format!("seed: {e}")))?,
            (None, None) => 0,
        };
        let format = match (common.format, from_file("format")) {
            (Some(f), _) => f,
            (None, Some(v)) => serde_json::from_value(v).map_err(|e| CliError::usage(format!("format: {e}")))?,
            (None, None) => default_format,
        };
        let output = match (&common.output, from_file("output")) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(v)) => Some(serde_json::from_value(v).map_err(|e| CliError::usage(format!("output: {e}")))?),
            (None, None) => None,
        };
        Ok(Self { command, seed, format, output })
    }

    /// The effective configuration: resolved command parameters plus the
    /// common settings, as written into every output.
    fn echo<T: Serialize>(&self, args: &T) -> Map<String, Value> {
        let mut map = Map::new();
        map.insert("command".into(), Value::from(self.command));
        map.insert("seed".into(), Value::from(self.seed));
        map.insert("format".into(), serde_json::to_value(self.format).unwrap_or(Value::Null));
        if let Some(p) = &self.output {
            map.insert("output".into(), Value::from(p.display().to_string()));
        }
        if let Ok(Value::Object(fields)) = serde_json::to_value(args) {
            map.extend(fields);
        }
        map
    }

    fn emit(&self, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
        emit(text, self.output.as_deref(), stdout)
    }
}

fn parse_families(names: &[String]) -> Result<Vec<PriorFamily>, CliError> {
    let mut families = names.iter().map(|s| s.parse::<PriorFamily>()).collect::<Result<Vec<_>, _>>()?;
    families.sort();
    families.dedup();
    Ok(families)
}

fn labels(families: &[PriorFamily]) -> Vec<String> {
    families.iter().map(|f| f.label().to_string()).collect()
}

fn figure_output(run: &Run, config: &Map<String, Value>, rows: &[FigureRow]) -> Result<String, CliError> {
    let comments = comment_lines(config, &[]);
    match run.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_figure_csv(&mut buf, &comments, rows)?;
            Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
        }
        Format::Json => json(config, "rows", &rows),
        Format::Table => {
            let cells: Vec<Vec<String>> =
                rows.iter().map(|r| vec![r.family.clone(), num(r.x), num(r.value), r.curve.clone()]).collect();
            Ok(table(&comments, &["family", "x", "value", "curve"], &cells))
        }
    }
}

// ---------------------------------------------------------------- density

fn variable_label(v: Variable) -> &'static str {
    match v {
        Variable::Gamma => "gamma",
        Variable::Tau => "tau",
        Variable::P => "p",
        Variable::Phi => "phi",
    }
}

fn default_grid(v: Variable) -> (f64, f64, usize, GridScale) {
    match v {
        Variable::Gamma => (1e-3, 1e3, 121, GridScale::Log),
        Variable::Tau | Variable::P => (0.005, 0.995, 199, GridScale::Linear),
        Variable::Phi => (1e-2, 1e2, 100, GridScale::Symlog),
    }
}

fn build_grid(from: f64, to: f64, points: usize, scale: GridScale) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(CliError::usage(format!("grid needs finite --from < --to, got {from} and {to}")));
    }
    if points == 0 {
        return Err(CliError::usage("--points must be at least 1"));
    }
    let spaced = |a: f64, b: f64, k: usize| -> Vec<f64> {
        if k == 1 {
            return vec![a];
        }
        (0..k).map(|i| if i == k - 1 { b } else { a + (b - a) * i as f64 / (k - 1) as f64 }).collect()
    };
    match scale {
        GridScale::Linear => Ok(spaced(from, to, points)),
        GridScale::Log => {
            if from <= 0.0 {
                return Err(CliError::usage("a log grid needs --from > 0"));
            }
            let mut grid: Vec<f64> = spaced(from.ln(), to.ln(), points).into_iter().map(f64::exp).collect();
            grid[0] = from;
            if points > 1 {
                grid[points - 1] = to;
            }
            Ok(grid)
        }
        GridScale::Symlog => {
            if from <= 0.0 || !points.is_multiple_of(2) {
                return Err(CliError::usage("a symlog grid needs --from > 0 and an even --points"));
            }
            Ok(symmetric_log_grid(from, to, points / 2))
        }
    }
}

/// Whether the family's `γ` prior is a mixture over the decision parameter
/// that the quadrature route can evaluate.
fn has_mixture_form(family: PriorFamily) -> bool {
    matches!(family, PriorFamily::Hs | PriorFamily::Hths | PriorFamily::HthsLambda)
}

fn density_value(family: PriorFamily, var: Variable, x: f64, quadrature: bool) -> Result<f64, CliError> {
    let mixture = quadrature && has_mixture_form(family);
    let needs_quadrature = || {
        CliError::usage(format!(
            "the {family} prior has no closed-form density for {}; rerun with --quadrature to integrate over p",
            variable_label(var)
        ))
    };
    match var {
        Variable::Gamma => {
            if mixture {
                if !(x > 0.0) {
                    return Err(Error::Domain { what: "gamma must be positive", value: x }.into());
                }
                let u = x.ln();
                Ok((log_density_log_scale_mixture(DecisionPrior::for_family(family), u)? - u).exp())
            } else if family == PriorFamily::HthsLambda {
                Err(needs_quadrature())
            } else {
                Ok(density_gamma(family, x)?)
            }
        }
        Variable::Tau => {
            if mixture {
                if !(x > 0.0 && x < 1.0) {
                    return Err(Error::Domain { what: "tau must lie strictly inside (0, 1)", value: x }.into());
                }
                let (ln_t, ln_1mt) = (x.ln(), (-x).ln_1p());
                Ok((log_density_log_scale_mixture(DecisionPrior::for_family(family), ln_t - ln_1mt)? - ln_t - ln_1mt)
                    .exp())
            } else if family == PriorFamily::HthsLambda {
                Err(needs_quadrature())
            } else {
                Ok(density_tau(family, x)?)
            }
        }
        Variable::P => match family {
            PriorFamily::Hths | PriorFamily::HthsLambda => {
                let d = density_p(DecisionPrior::for_family(family), x)?;
                d.value().ok_or_else(|| CliError::usage(format!("the {family} prior on p is a point mass")))
            }
            PriorFamily::Hs | PriorFamily::HsPlus => {
                Err(CliError::usage(format!("the {family} prior fixes p = 1/2, so p has no density")))
            }
            PriorFamily::HthsPlus => Err(CliError::usage("the HTHS+ prior has no decision parameter p")),
        },
        Variable::Phi => Ok(phi_marginal(family, x)?),
    }
}

fn density(
    common: &CommonArgs,
    flags: DensityArgs,
    file: Option<&Map<String, Value>>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (mut a, merged) = merge_with_config(&flags, file)?;
    let run = Run::new("density", common, &merged, Format::Csv)?;
    let var = *a.variable.get_or_insert(Variable::Gamma);
    if a.family.is_empty() {
        a.family = labels(&match var {
            Variable::P => vec![PriorFamily::Hths, PriorFamily::HthsLambda],
            Variable::Gamma | Variable::Tau if a.quadrature => PriorFamily::ALL.to_vec(),
            _ => PriorFamily::CLOSED_FORM.to_vec(),
        });
    }
    let families = parse_families(&a.family)?;
    a.family = labels(&families);
    let grid = if a.at.is_empty() {
        let (from, to, points, scale) = default_grid(var);
        let from = *a.from.get_or_insert(from);
        let to = *a.to.get_or_insert(to);
        let points = *a.points.get_or_insert(points);
        let scale = *a.scale.get_or_insert(scale);
        build_grid(from, to, points, scale)?
    } else {
        a.at.clone()
    };
    let config = run.echo(&a);

    let curve = variable_label(var);
    let mut rows = Vec::with_capacity(families.len() * grid.len());
    for &family in &families {
        let values =
            grid.par_iter().map(|&x| density_value(family, var, x, a.quadrature)).collect::<Result<Vec<_>, _>>()?;
        rows.extend(grid.iter().zip(values).map(|(&x, value)| FigureRow {
            family: family.label().into(),
            x,
            value,
            curve: curve.into(),
        }));
    }
    run.emit(&figure_output(&run, &config, &rows)?, stdout)
}

// ----------------------------------------------------------------- sample

/// Read observations: one number per line, or one column of a CSV file
/// chosen by header name or zero-based index. Blank lines and lines
/// starting with `#` are skipped.
pub(crate) fn read_data(path: &Path, column: Option<&str>) -> Result<Vec<f64>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let lines =
        text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse = |line_no: usize, field: &str| {
        field.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
            CliError::usage(format!("{}:{line_no}: '{}' is not a finite number", path.display(), field.trim()))
        })
    };
    let mut data = Vec::new();
    match column {
        None => {
            for (line_no, line) in lines {
                if line.contains(',') {
                    return Err(CliError::usage(format!(
                        "{}:{line_no}: several fields on one line; choose one with --column",
                        path.display()
                    )));
                }
                data.push(parse(line_no, line)?);
            }
        }
        Some(selector) => {
            let mut lines = lines.peekable();
            let index = match selector.parse::<usize>() {
                Ok(i) => {
                    let header = lines.peek().map(|(_, l)| l.split(',').nth(i).map(|f| f.trim().parse::<f64>()));
                    if let Some(Some(Err(_))) = header {
                        lines.next();
                    }
                    i
                }
                Err(_) => {
                    let (_, header) = lines.next().ok_or_else(|| CliError::usage("data file is empty"))?;
                    header
                        .split(',')
                        .position(|h| h.trim() == selector)
                        .ok_or_else(|| CliError::usage(format!("no column named '{selector}' in {}", path.display())))?
                }
            };
            for (line_no, line) in lines {
                let field = line
                    .split(',')
                    .nth(index)
                    .ok_or_else(|| CliError::usage(format!("{}:{line_no}: no column {index}", path.display())))?;
                data.push(parse(line_no, field)?);
            }
        }
    }
    if data.is_empty() {
        return Err(CliError::usage(format!("{} holds no observations", path.display())));
    }
    Ok(data)
}

fn sample(
    common: &CommonArgs,
    flags: SampleArgs,
    file: Option<&Map<String, Value>>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (mut a, merged) = merge_with_config(&flags, file)?;
    let run = Run::new("sample", common, &merged, Format::Json)?;
    let family: PriorFamily = a.family.as_deref().ok_or_else(|| CliError::usage("--family is required"))?.parse()?;
    a.family = Some(family.label().into());
    let data_path = a.data.clone().ok_or_else(|| CliError::usage("--data is required"))?;
    let data = read_data(&data_path, a.column.as_deref())?;

    let fixed: FixedGlobals = match &a.fix_globals {
        Some(s) => s.parse()?,
        None => FixedGlobals::default(),
    };
    let d = GlobalPriors::default();
    let priors = GlobalPriors {
        mu_mean: *a.mu_mean.get_or_insert(d.mu_mean),
        mu_scale_multiplier: *a.mu_scale.get_or_insert(d.mu_scale_multiplier),
        sigma2_shape: *a.sigma2_shape.get_or_insert(d.sigma2_shape),
        sigma2_rate: *a.sigma2_rate.get_or_insert(d.sigma2_rate),
        z_shape: *a.z_shape.get_or_insert(d.z_shape),
        z_rate: *a.z_rate.get_or_insert(d.z_rate),
    };
    priors.validate()?;
    let dc = ChainConfig::default();
    let chain = ChainConfig {
        slice_width: *a.slice_width.get_or_insert(dc.slice_width),
        fixed_globals: fixed,
        keep_locals: !a.no_locals,
        ..ChainConfig::with_retained(
            *a.burn_in.get_or_insert(dc.burn_in),
            *a.retained.get_or_insert(dc.retained()),
            *a.thinning.get_or_insert(dc.thinning),
            run.seed,
        )
    };
    chain.validate()?;
    let config = run.echo(&a);

    let out = run_chain(&data, family, &priors, &chain)?;
    if let Some(path) = &a.draws {
        out.store.save(path)?;
    }
    let text = match run.format {
        Format::Json => json(&config, "summary", &out.summary)?,
        Format::Csv | Format::Table => {
            let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
            let cells: Vec<Vec<String>> = out
                .summary
                .parameters
                .iter()
                .map(|p| vec![p.name.clone(), num(p.mean), num(p.median), num(p.q025), num(p.q975), opt(p.ess)])
                .collect();
            let header = ["parameter", "mean", "median", "q025", "q975", "ess"];
            let comments = comment_lines(&config, &[]);
            if run.format == Format::Csv {
                csv(&comments, &header, &cells)
            } else {
                table(&comments, &header, &cells)
            }
        }
    };
    run.emit(&text, stdout)
}

// ------------------------------------------------------------------- risk

fn risk(
    common: &CommonArgs,
    flags: RiskArgs,
    file: Option<&Map<String, Value>>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (mut a, merged) = merge_with_config(&flags, file)?;
    let run = Run::new("risk", common, &merged, Format::Csv)?;
    if a.family.is_empty() {
        a.family = labels(&PriorFamily::CLOSED_FORM);
    }
    let families = parse_families(&a.family)?;
    a.family = labels(&families);
    let phi0 = *a.phi0.get_or_insert(0.0);
    if a.n.is_empty() {
        a.n = log_spaced_counts(1, 6, *a.per_decade.get_or_insert(4));
    }
    if a.n.contains(&0) {
        return Err(CliError::usage("sample sizes must be positive"));
    }
    a.n.sort_unstable();
    a.n.dedup();
    let config = run.echo(&a);

    let cells: Vec<(PriorFamily, u64)> = families.iter().flat_map(|&f| a.n.iter().map(move |&n| (f, n))).collect();
    let bounds = cells.par_iter().map(|&(f, n)| kl_risk_bound(f, phi0, n)).collect::<Result<Vec<_>, _>>()?;

    #[derive(Serialize)]
    struct RiskRow {
        family: PriorFamily,
        n: u64,
        phi0: f64,
        half_width: f64,
        bound: f64,
    }
    let rows: Vec<RiskRow> = cells
        .iter()
        .zip(bounds)
        .map(|(&(family, n), bound)| RiskRow { family, n, phi0, half_width: (2.0 / n as f64).sqrt(), bound })
        .collect();
    let text = match run.format {
        Format::Json => json(&config, "rows", &rows)?,
        fmt => {
            let header = ["family", "n", "phi0", "half_width", "bound"];
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.family.label().into(), r.n.to_string(), num(r.phi0), num(r.half_width), num(r.bound)])
                .collect();
            let comments = comment_lines(&config, &[]);
            if fmt == Format::Csv {
                csv(&comments, &header, &cells)
            } else {
                table(&comments, &header, &cells)
            }
        }
    };
    run.emit(&text, stdout)
}

// ------------------------------------------------------------- predictive

fn predictive(
    common: &CommonArgs,
    flags: PredictiveArgs,
    file: Option<&Map<String, Value>>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (mut a, merged) = merge_with_config(&flags, file)?;
    let run = Run::new("predictive", common, &merged, Format::Csv)?;
    if a.family.is_empty() {
        a.family = labels(&PriorFamily::CLOSED_FORM);
    }
    let families = parse_families(&a.family)?;
    a.family = labels(&families);
    if a.y.is_empty() {
        a.y = symmetric_log_grid(1e-2, 1e2, *a.points.get_or_insert(50));
    }
    let config = run.echo(&a);

    let mut rows = Vec::new();
    for &family in &families {
        let values =
            a.y.par_iter()
                .map(|&y| Ok((log_marginal_likelihood(family, y)?, predictive_score(family, y)?)))
                .collect::<Result<Vec<_>, Error>>()?;
        let row = |x: f64, value: f64, curve: &str| FigureRow {
            family: family.label().into(),
            x,
            value,
            curve: curve.into(),
        };
        rows.extend(a.y.iter().zip(&values).map(|(&y, &(lm, _))| row(y, lm, "log_marginal")));
        rows.extend(a.y.iter().zip(&values).map(|(&y, &(_, s))| row(y, s, "score")));
    }
    run.emit(&figure_output(&run, &config, &rows)?, stdout)
}

// --------------------------------------------------------------- simulate

fn simulate(
    common: &CommonArgs,
    flags: SimulateArgs,
    file: Option<&Map<String, Value>>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let (mut a, merged) = merge_with_config(&flags, file)?;
    let run = Run::new("simulate", common, &merged, Format::Json)?;
    if a.eta.is_empty() {
        a.eta = vec![0.2, 0.05, 0.01];
    }
    let base = |eta| {
        if a.paper_scale {
            SimulationDesign::paper_scale(eta, run.seed)
        } else {
            SimulationDesign::desk_scale(eta, run.seed)
        }
    };
    let template = base(0.5);
    let n = *a.n.get_or_insert(template.n);
    let replicates = *a.replicates.get_or_insert(template.replicates);
    let mu_true = *a.mu_true.get_or_insert(template.mu_true);
    let chain = ChainConfig {
        keep_locals: false,
        ..ChainConfig::with_retained(
            *a.burn_in.get_or_insert(template.chain.burn_in),
            *a.retained.get_or_insert(template.chain.retained()),
            *a.thinning.get_or_insert(template.chain.thinning),
            0,
        )
    };
    let designs: Vec<SimulationDesign> =
        a.eta.iter().map(|&eta| SimulationDesign { n, replicates, mu_true, chain, ..base(eta) }).collect();
    for d in &designs {
        d.validate()?;
    }
    let config = run.echo(&a);

    let reports = designs.iter().map(evaluate_models).collect::<Result<Vec<SimulationReport>, _>>()?;
    let comments = comment_lines(&config, &[]);
    let text_table = table_with_comments(&comments, &render_table(&reports));
    let text = match run.format {
        Format::Json => json(&config, "reports", &reports)?,
        Format::Table => text_table.clone(),
        Format::Csv => {
            let header =
                ["eta", "model", "mae", "mae_se", "oracle_distance", "oracle_distance_se", "replicates", "diverged"];
            let cells: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.summaries.iter().map(|s| {
                        vec![
                            num(r.design.eta),
                            s.model.label().into(),
                            num(s.mae),
                            num(s.mae_se),
                            num(s.oracle_distance),
                            num(s.oracle_distance_se),
                            s.replicates.to_string(),
                            s.diverged.to_string(),
                        ]
                    })
                })
                .collect();
            csv(&comments, &header, &cells)
        }
    };
    run.emit(&text, stdout)?;
    if let Some(path) = &a.table {
        emit(&text_table, Some(path), stdout)?;
    }

    let failures: Vec<_> = reports
        .iter()
        .flat_map(|r| r.rows.iter().map(move |row| (r.design.eta, row)))
        .filter(|(_, row)| row.diverged.is_some())
        .collect();
    if failures.is_empty() {
        return Ok(());
    }
    let _ = writeln!(stderr, "partial failure: {} chain(s) diverged", failures.len());
    for (eta, row) in &failures {
        let _ = writeln!(
            stderr,
            "  eta={eta} replicate={} model={} seed={}: {}",
            row.replicate,
            row.model.label(),
            row.seed,
            row.diverged.as_deref().unwrap_or_default()
        );
    }
    Err(CliError {
        code: EXIT_NUMERIC,
        message: "results were written, but the affected cells average fewer replicates".into(),
    })
}

fn table_with_comments(comments: &[String], body: &str) -> String {
    let mut out: String = comments.iter().map(|c| format!("# {c}\n")).collect();
    out.push_str(body);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_have_the_requested_length() {
        let log = build_grid(1e-3, 1e3, 121, GridScale::Log).unwrap();
        assert_eq!((log.len(), log[0], log[120]), (121, 1e-3, 1e3));
        assert_eq!(
            build_grid(0.0, 1.0, 7, GridScale::Linear).unwrap(),
            vec![0.0, 1.0 / 6.0, 2.0 / 6.0, 0.5, 4.0 / 6.0, 5.0 / 6.0, 1.0]
        );
        assert_eq!(build_grid(1e-2, 1e2, 10, GridScale::Symlog).unwrap().len(), 10);
        assert!(build_grid(1e-2, 1e2, 9, GridScale::Symlog).is_err());
        assert!(build_grid(0.0, 1.0, 3, GridScale::Log).is_err());
    }

    #[test]
    fn reads_plain_and_csv_data() {
        let dir = tempfile::tempdir().unwrap();
        let plain = dir.path().join("y.txt");
        std::fs::write(&plain, "# observations\n1.5\n\n-2\n").unwrap();
        assert_eq!(read_data(&plain, None).unwrap(), vec![1.5, -2.0]);

        let table = dir.path().join("y.csv");
        std::fs::write(&table, "id,y\n1,0.25\n2,-3\n").unwrap();
        assert_eq!(read_data(&table, Some("y")).unwrap(), vec![0.25, -3.0]);
        assert_eq!(read_data(&table, Some("1")).unwrap(), vec![0.25, -3.0]);
        assert!(read_data(&table, None).is_err());
        assert!(read_data(&table, Some("x")).is_err());

        std::fs::write(&plain, "1\nabc\n").unwrap();
        let err = read_data(&plain, None).unwrap_err();
        assert!(err.message.contains(":2:"), "{}", err.message);
    }

    #[test]
    fn quadrature_route_matches_closed_forms() {
        for family in [PriorFamily::Hs, PriorFamily::Hths] {
            for x in [0.01, 1.0, 50.0] {
                let closed = density_value(family, Variable::Gamma, x, false).unwrap();
                let mixed = density_value(family, Variable::Gamma, x, true).unwrap();
                assert!((closed - mixed).abs() <= 1e-8 * closed, "{family} at {x}: {closed} vs {mixed}");
            }
            let closed = density_value(family, Variable::Tau, 0.3, false).unwrap();
            let mixed = density_value(family, Variable::Tau, 0.3, true).unwrap();
            assert!((closed - mixed).abs() <= 1e-8 * closed);
        }
    }
}
