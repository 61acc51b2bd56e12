//! Command-line front end: CSV ingestion, subcommands and machine-readable
//! outputs. The `kcca-influence` binary is a thin wrapper around [`run_from`].
//!
//! Every subcommand writes its CSV files and a `summary.json` into `--out`.
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs::{self, File};
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::DataView;
use crate::error::{Error, Result};
use crate::influence::{self, InfluenceRun};
use crate::kcca::{self, KccaConfig, DEFAULT_KAPPA};
use crate::kernels::{Bandwidth, KernelSpec};
use crate::mkcca::{self, MkccaConfig};
use crate::report;
use crate::synthdata::{self, GenConfig, MgsdOptions, SmsdOptions, Synthetic};

/// Version of the `summary.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "kcca-influence",
    version,
    about = "Kernel CCA, multiple kernel CCA and influence-based outlier detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic two-view design and its contaminated row indices.
    Gen(GenArgs),
    /// Fit two-view kernel CCA and print the canonical correlations.
    Kcca(KccaArgs),
    /// Fit multiple kernel CCA on two or more views.
    Mkcca(MkccaArgs),
    /// Score every observation, plot, display and extract outliers.
    Influence(InfluenceArgs),
    /// Compare ideal and contaminated runs with the eta measures.
    Eta(EtaArgs),
    /// Cross-validated gap between training and test correlation.
    Cv(CvArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Design {
    Mgsd,
    Scsd,
    Smsd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Gaussian,
    Linear,
    Polynomial,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Kernel; give once for every view or once per view in view order.
    #[arg(long = "kernel", value_enum)]
    pub kernel: Vec<KernelKind>,
    /// Gaussian bandwidth (median heuristic if omitted); once or once per view.
    #[arg(long = "sigma")]
    pub sigma: Vec<f64>,
    /// Polynomial degree.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Polynomial offset.
    #[arg(long, default_value_t = 1.0)]
    pub offset: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Regularization.
    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    pub kappa: f64,
    /// Allow kappa = 0 (the unregularized, degenerate problem).
    #[arg(long)]
    pub degenerate_ok: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub design: Design,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace a fraction of rows with draws from the shifted distribution.
    #[arg(long)]
    pub contaminated: bool,
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,
    /// SMSD noise level of ideal rows (drawn from 1..=10 if omitted).
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value = "kcca-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct KccaArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Number of components to report.
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    #[arg(long, default_value = "kcca-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct MkccaArgs {
    /// View CSV; repeat for every view (at least two).
    #[arg(long = "view")]
    pub views: Vec<PathBuf>,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    #[arg(long, default_value = "kcca-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct InfluenceArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Component (1-based).
    #[arg(long, default_value_t = 1)]
    pub component: usize,
    /// Leaves printed per stem before the "+k" overflow.
    #[arg(long, default_value_t = 8)]
    pub leaf_cap: usize,
    /// Text file with one group label per observation, for plot colouring.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Also write the n x n canonical-variate influence matrices.
    #[arg(long)]
    pub variates: bool,
    #[arg(long, default_value = "kcca-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EtaArgs {
    /// Generate ideal and contaminated runs from this design.
    #[arg(long, value_enum, conflicts_with_all = ["x", "y", "x_cd", "y_cd"])]
    pub design: Option<Design>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,
    /// Ideal X view (with --y, --x-cd, --y-cd instead of --design).
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub x_cd: Option<PathBuf>,
    #[arg(long)]
    pub y_cd: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 1)]
    pub component: usize,
    /// Skip the canonical-variate measure (eta_f).
    #[arg(long)]
    pub no_eta_f: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "kcca-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "kcca-out")]
    pub out: PathBuf,
}

/// Contents of `summary.json`; fields that do not apply are `null`.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    pub rho: Option<Vec<f64>>,
    /// 1-based, ordered by decreasing influence magnitude.
    pub outlier_indices: Option<Vec<usize>>,
    pub eta_rho: Option<f64>,
    pub eta_f: Option<f64>,
    pub cv_mean: Option<f64>,
    pub cv_sd: Option<f64>,
}

impl Summary {
    fn new(command: &str) -> Self {
        Summary {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            ..Default::default()
        }
    }
}

/// A failure with its exit code and a message naming the file or flag.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn data(context: impl std::fmt::Display, err: Error) -> Self {
        Failure {
            code: 2,
            message: format!("{context}: {err}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn numeric(token: &str) -> Option<f64> {
    token.trim().parse::<f64>().ok()
}

/// Read a numeric CSV. A first row containing any non-numeric token is a
/// header; a header whose first cell is `id` makes the first column row
/// identifiers.
pub fn parse_csv(path: &Path) -> Result<DataView> {
    parse_csv_reader(File::open(path)?)
}

/// [`parse_csv`] over any reader.
pub fn parse_csv_reader<R: Read>(reader: R) -> Result<DataView> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let first = match records.next() {
        None => return Err(Error::EmptyInput),
        Some(r) => r.map_err(|e| csv_error(&e))?,
    };
    let header = first.iter().any(|t| numeric(t).is_none());
    let id_col = header && first.get(0).is_some_and(|t| t.eq_ignore_ascii_case("id"));
    let mut width = if header { Some(first.len()) } else { None };

    let mut ids = Vec::new();
    let mut values = Vec::new();
    let mut nrows = 0usize;
    let mut push = |rec: &csv::StringRecord, width: &mut Option<usize>| -> Result<()> {
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        match *width {
            Some(w) if w != rec.len() => return Err(Error::MalformedCsv { line, col: None }),
            None => *width = Some(rec.len()),
            _ => {}
        }
        for (c, token) in rec.iter().enumerate() {
            if id_col && c == 0 {
                ids.push(token.to_string());
                continue;
            }
            let v = numeric(token).ok_or(Error::MalformedCsv {
                line,
                col: Some(c + 1),
            })?;
            values.push(v);
        }
        nrows += 1;
        Ok(())
    };
    if !header {
        push(&first, &mut width)?;
    }
    for rec in records {
        let rec = rec.map_err(|e| csv_error(&e))?;
        push(&rec, &mut width)?;
    }
    if nrows == 0 {
        return Err(Error::EmptyInput);
    }
    let ncols = width.unwrap_or(0) - usize::from(id_col);
    let view = DataView::new(nalgebra::DMatrix::from_row_slice(nrows, ncols, &values));
    if id_col {
        view.with_ids(ids)
    } else {
        Ok(view)
    }
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::MalformedCsv { line, col: None }
}

/// Write a matrix with a header row; `ids` become a leading `id` column.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>], ids: Option<&[String]>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
    let mut head: Vec<String> = Vec::with_capacity(header.len() + 1);
    if ids.is_some() {
        head.push("id".into());
    }
    head.extend(header.iter().cloned());
    w.write_record(&head).map_err(csv_io)?;
    for (i, row) in rows.iter().enumerate() {
        let mut rec: Vec<String> = Vec::with_capacity(row.len() + 1);
        if let Some(ids) = ids {
            rec.push(ids[i].clone());
        }
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidData(format!("{other:?}")),
    }
}

fn view_rows(v: &DataView) -> Vec<Vec<f64>> {
    v.rows()
}

fn columns(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("{prefix}{j}")).collect()
}

fn read_view(path: &Path, flag: &str) -> CliResult<DataView> {
    parse_csv(path).map_err(|e| Failure::data(format!("reading {flag} {}", path.display()), e))
}

fn prepare_out(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out)
        .map_err(|e| Failure::data(format!("creating --out {}", out.display()), e.into()))
}

fn write_summary(out: &Path, summary: &Summary) -> CliResult<()> {
    let path = out.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| Failure::data("serializing summary", Error::InvalidData(e.to_string())))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Failure::data(path.display(), e.into()))
}

fn write_out(path: PathBuf, header: &[String], rows: &[Vec<f64>], ids: Option<&[String]>) -> CliResult<()> {
    write_csv(&path, header, rows, ids).map_err(|e| Failure::data(format!("writing {}", path.display()), e))
}

impl KernelArgs {
    fn specs(&self, views: usize) -> CliResult<Vec<KernelSpec>> {
        let pick = |list_len: usize, flag: &str| -> CliResult<()> {
            if list_len > 1 && list_len != views {
                return Err(Failure::usage(format!(
                    "--{flag} given {list_len} times for {views} views (give it once or once per view)"
                )));
            }
            Ok(())
        };
        pick(self.kernel.len(), "kernel")?;
        pick(self.sigma.len(), "sigma")?;
        let at = |list: &[f64], v: usize| match list.len() {
            0 => None,
            1 => Some(list[0]),
            _ => Some(list[v]),
        };
        (0..views)
            .map(|v| {
                let kind = match self.kernel.len() {
                    0 => KernelKind::Gaussian,
                    1 => self.kernel[0],
                    _ => self.kernel[v],
                };
                Ok(match kind {
                    KernelKind::Gaussian => KernelSpec::Gaussian {
                        bandwidth: match at(&self.sigma, v) {
                            Some(s) => Bandwidth::Explicit(s),
                            None => Bandwidth::MedianHeuristic,
                        },
                    },
                    KernelKind::Linear => KernelSpec::Linear,
                    KernelKind::Polynomial => KernelSpec::Polynomial {
                        degree: self.degree,
                        offset: self.offset,
                    },
                })
            })
            .collect()
    }
}

impl FitArgs {
    fn kcca_config(&self, num_components: usize) -> CliResult<KccaConfig> {
        let specs = self.kernel.specs(2)?;
        Ok(KccaConfig {
            kappa: self.kappa,
            kernel_x: specs[0],
            kernel_y: specs[1],
            num_components,
            degenerate_ok: self.degenerate_ok,
        })
    }
}

fn component_index(component: usize) -> CliResult<usize> {
    if component == 0 {
        return Err(Failure::usage("--component is 1-based and must be at least 1"));
    }
    Ok(component - 1)
}

fn generate(design: Design, cfg: &GenConfig, noise: Option<f64>) -> Result<Synthetic> {
    match design {
        Design::Mgsd => synthdata::gen_mgsd(cfg, &MgsdOptions::default()),
        Design::Scsd => synthdata::gen_scsd(cfg),
        Design::Smsd => synthdata::gen_smsd(
            cfg,
            &SmsdOptions {
                noise,
                ..Default::default()
            },
        ),
    }
}

fn cmd_gen(a: &GenArgs) -> CliResult<Summary> {
    let cfg = GenConfig {
        n: a.n,
        contaminated: a.contaminated,
        contamination_rate: a.rate,
        seed: a.seed,
    };
    let data = generate(a.design, &cfg, a.noise).map_err(|e| Failure::data("generating --design", e))?;
    prepare_out(&a.out)?;
    write_out(a.out.join("x.csv"), &columns("x", data.x.ncols()), &view_rows(&data.x), None)?;
    write_out(a.out.join("y.csv"), &columns("y", data.y.ncols()), &view_rows(&data.y), None)?;
    let idx: Vec<Vec<f64>> = data.contaminated.iter().map(|&i| vec![(i + 1) as f64]).collect();
    write_out(a.out.join("contaminated.csv"), &["index".to_string()], &idx, None)?;
    println!(
        "wrote {} rows ({} contaminated) to {}",
        a.n,
        data.contaminated.len(),
        a.out.display()
    );
    Ok(Summary::new("gen"))
}

fn fit_pair(x: &Path, y: &Path, cfg: &KccaConfig) -> CliResult<(DataView, kcca::KccaModel)> {
    let xv = read_view(x, "--x")?;
    let yv = read_view(y, "--y")?;
    let model = kcca::fit(&xv, &yv, cfg)
        .map_err(|e| Failure::data(format!("fitting --x {} / --y {}", x.display(), y.display()), e))?;
    Ok((xv, model))
}

fn cmd_kcca(a: &KccaArgs) -> CliResult<Summary> {
    if a.components == 0 {
        return Err(Failure::usage("--components must be at least 1"));
    }
    let cfg = a.fit.kcca_config(a.components)?;
    let (xv, model) = fit_pair(&a.x, &a.y, &cfg)?;
    prepare_out(&a.out)?;
    for (j, r) in model.rho().iter().enumerate() {
        println!("rho_{} = {r}", j + 1);
    }
    let rows: Vec<Vec<f64>> = model
        .rho()
        .iter()
        .enumerate()
        .map(|(j, &r)| vec![(j + 1) as f64, r])
        .collect();
    write_out(a.out.join("rho.csv"), &["component".into(), "rho".into()], &rows, None)?;
    let (gx, gy) = model.standardized_variates();
    let j = model.num_components();
    let mut header = columns("fbar_x", j);
    header.extend(columns("fbar_y", j));
    let variates: Vec<Vec<f64>> = (0..model.n())
        .map(|i| gx.row(i).iter().chain(gy.row(i).iter()).copied().collect())
        .collect();
    write_out(a.out.join("variates.csv"), &header, &variates, xv.ids())?;
    Ok(Summary {
        rho: Some(model.rho().to_vec()),
        ..Summary::new("kcca")
    })
}

fn cmd_mkcca(a: &MkccaArgs) -> CliResult<Summary> {
    if a.views.len() < 2 {
        return Err(Failure::usage(format!(
            "--view must be given at least twice, got {}",
            a.views.len()
        )));
    }
    if a.components == 0 {
        return Err(Failure::usage("--components must be at least 1"));
    }
    let kernels = a.fit.kernel.specs(a.views.len())?;
    let views = a
        .views
        .iter()
        .map(|p| read_view(p, "--view"))
        .collect::<CliResult<Vec<_>>>()?;
    let cfg = MkccaConfig {
        kappa: a.fit.kappa,
        kernels,
        num_components: a.components,
    };
    let model = mkcca::fit_multi(&views, &cfg).map_err(|e| Failure::data("fitting --view files", e))?;
    prepare_out(&a.out)?;
    for (l, r) in model.rho().iter().enumerate() {
        println!("sum-correlation score {} = {r}", l + 1);
    }
    let rows: Vec<Vec<f64>> = model
        .rho()
        .iter()
        .enumerate()
        .map(|(l, &r)| vec![(l + 1) as f64, r])
        .collect();
    write_out(a.out.join("rho.csv"), &["component".into(), "score".into()], &rows, None)?;
    let scores = influence::eif_mkcca_cc(&model, 0).map_err(|e| Failure::data("scoring", e))?;
    let srows: Vec<Vec<f64>> = scores
        .values
        .iter()
        .enumerate()
        .map(|(i, &s)| vec![(i + 1) as f64, s])
        .collect();
    write_out(a.out.join("scores.csv"), &["index".into(), "influence".into()], &srows, views[0].ids())?;
    Ok(Summary {
        rho: Some(model.rho().to_vec()),
        ..Summary::new("mkcca")
    })
}

fn read_labels(path: &Path) -> CliResult<Vec<String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("reading --labels {}", path.display()), e.into()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn cmd_influence(a: &InfluenceArgs) -> CliResult<Summary> {
    let j = component_index(a.component)?;
    let cfg = a.fit.kcca_config(a.component)?;
    let (xv, model) = fit_pair(&a.x, &a.y, &cfg)?;
    let labels = a.labels.as_deref().map(read_labels).transpose()?;
    if let (Some(l), Some(p)) = (&labels, &a.labels) {
        if l.len() != model.n() {
            return Err(Failure::data(
                format!("reading --labels {}", p.display()),
                Error::InvalidData(format!("{} labels for {} observations", l.len(), model.n())),
            ));
        }
    }
    let scores = influence::eif_cc(&model, j).map_err(|e| Failure::data("--component", e))?;
    let outliers = report::detect_outliers(&scores.values).map_err(|e| Failure::data("extracting outliers", e))?;
    let display = report::stem_leaf(&scores.values, a.leaf_cap).map_err(|e| Failure::data("stem-and-leaf", e))?;
    prepare_out(&a.out)?;

    let rows: Vec<Vec<f64>> = scores
        .values
        .iter()
        .enumerate()
        .map(|(i, &s)| vec![(i + 1) as f64, s])
        .collect();
    write_out(a.out.join("scores.csv"), &["index".into(), "influence".into()], &rows, xv.ids())?;
    let orows: Vec<Vec<f64>> = outliers
        .iter()
        .map(|&i| vec![(i + 1) as f64, scores.values[i]])
        .collect();
    let oids: Option<Vec<String>> = xv.ids().map(|ids| outliers.iter().map(|&i| ids[i].clone()).collect());
    write_out(
        a.out.join("outliers.csv"),
        &["index".into(), "influence".into()],
        &orows,
        oids.as_deref(),
    )?;
    let stem_path = a.out.join("stem_leaf.txt");
    fs::write(&stem_path, display.to_string()).map_err(|e| Failure::data(stem_path.display(), e.into()))?;
    let plot_path = a.out.join("index_plot.svg");
    report::index_plot(&scores.values, labels.as_deref(), &plot_path)
        .map_err(|e| Failure::data(plot_path.display(), e))?;
    if a.variates {
        let (cx, cy) = influence::eif_cv(&model, j).map_err(|e| Failure::data("--variates", e))?;
        let n = model.n();
        for (name, m) in [("cv_influence_x.csv", &cx.values), ("cv_influence_y.csv", &cy.values)] {
            let rows: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).iter().copied().collect()).collect();
            write_out(a.out.join(name), &columns("z", n), &rows, None)?;
        }
    }

    let one_based: Vec<usize> = outliers.iter().map(|i| i + 1).collect();
    println!("rho_{} = {}", a.component, model.rho()[j]);
    println!(
        "outliers ({}): {}",
        one_based.len(),
        one_based.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
    );
    print!("{display}");
    Ok(Summary {
        rho: Some(model.rho().to_vec()),
        outlier_indices: Some(one_based),
        ..Summary::new("influence")
    })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

fn cmd_eta(a: &EtaArgs) -> CliResult<Summary> {
    let j = component_index(a.component)?;
    let cfg = a.fit.kcca_config(a.component)?;
    let mut pairs: Vec<(DataView, DataView, DataView, DataView)> = Vec::new();
    match (a.design, &a.x, &a.y, &a.x_cd, &a.y_cd) {
        (Some(design), ..) => {
            if a.replicates == 0 {
                return Err(Failure::usage("--replicates must be at least 1"));
            }
            for r in 0..a.replicates {
                let base = GenConfig {
                    n: a.n,
                    contaminated: false,
                    contamination_rate: a.rate,
                    seed: a.seed.wrapping_add(r as u64),
                };
                let id = generate(design, &base, None).map_err(|e| Failure::data("generating --design", e))?;
                let cd = generate(design, &base.clone().contaminated(true), None)
                    .map_err(|e| Failure::data("generating --design", e))?;
                pairs.push((id.x, id.y, cd.x, cd.y));
            }
        }
        (None, Some(x), Some(y), Some(xc), Some(yc)) => {
            pairs.push((
                read_view(x, "--x")?,
                read_view(y, "--y")?,
                read_view(xc, "--x-cd")?,
                read_view(yc, "--y-cd")?,
            ));
        }
        _ => {
            return Err(Failure::usage(
                "eta needs either --design or all of --x, --y, --x-cd, --y-cd",
            ))
        }
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for (r, (x, y, xc, yc)) in pairs.iter().enumerate() {
        let id = kcca::fit(x, y, &cfg).map_err(|e| Failure::data("fitting the ideal run", e))?;
        let cd = kcca::fit(xc, yc, &cfg).map_err(|e| Failure::data("fitting the contaminated run", e))?;
        let (er, ef) = if a.no_eta_f {
            let si = influence::eif_cc(&id, j).map_err(|e| Failure::data("--component", e))?;
            let sc = influence::eif_cc(&cd, j).map_err(|e| Failure::data("--component", e))?;
            (
                influence::eta_rho(&si, &sc).map_err(|e| Failure::data("eta", e))?,
                f64::NAN,
            )
        } else {
            let ri = InfluenceRun::compute(&id, j).map_err(|e| Failure::data("ideal influence", e))?;
            let rc = InfluenceRun::compute(&cd, j).map_err(|e| Failure::data("contaminated influence", e))?;
            influence::eta_measures(&ri, &rc).map_err(|e| Failure::data("eta", e))?
        };
        rows.push(vec![(r + 1) as f64, er, ef]);
    }
    prepare_out(&a.out)?;
    let header: Vec<String> = if a.no_eta_f {
        vec!["replicate".into(), "eta_rho".into()]
    } else {
        vec!["replicate".into(), "eta_rho".into(), "eta_f".into()]
    };
    let written: Vec<Vec<f64>> = rows.iter().map(|r| r[..header.len()].to_vec()).collect();
    write_out(a.out.join("eta.csv"), &header, &written, None)?;
    let er: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (mr, sr) = mean_sd(&er);
    println!("eta_rho = {mr} ± {sr}");
    let mut summary = Summary {
        eta_rho: Some(mr),
        ..Summary::new("eta")
    };
    if !a.no_eta_f {
        let ef: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let (mf, sf) = mean_sd(&ef);
        println!("eta_f = {mf} ± {sf}");
        summary.eta_f = Some(mf);
    }
    Ok(summary)
}

fn cmd_cv(a: &CvArgs) -> CliResult<Summary> {
    let cfg = a.fit.kcca_config(1)?;
    let x = read_view(&a.x, "--x")?;
    let y = read_view(&a.y, "--y")?;
    let gap = kcca::cv_gap(&x, &y, a.folds, &cfg, a.seed).map_err(|e| match e {
        Error::TooManyFolds { .. } | Error::InvalidData(_) => Failure::data("--folds", e),
        other => Failure::data(format!("cross-validating --x {} / --y {}", a.x.display(), a.y.display()), other),
    })?;
    prepare_out(&a.out)?;
    let rows: Vec<Vec<f64>> = gap
        .gaps
        .iter()
        .enumerate()
        .map(|(f, &g)| vec![(f + 1) as f64, g])
        .collect();
    write_out(a.out.join("cv.csv"), &["fold".into(), "gap".into()], &rows, None)?;
    println!("cv gap = {} ± {}", gap.mean, gap.sd);
    Ok(Summary {
        cv_mean: Some(gap.mean),
        cv_sd: Some(gap.sd),
        ..Summary::new("cv")
    })
}

fn out_dir(cmd: &Command) -> &Path {
    match cmd {
        Command::Gen(a) => &a.out,
        Command::Kcca(a) => &a.out,
        Command::Mkcca(a) => &a.out,
        Command::Influence(a) => &a.out,
        Command::Eta(a) => &a.out,
        Command::Cv(a) => &a.out,
    }
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Kcca(a) => cmd_kcca(a),
        Command::Mkcca(a) => cmd_mkcca(a),
        Command::Influence(a) => cmd_influence(a),
        Command::Eta(a) => cmd_eta(a),
        Command::Cv(a) => cmd_cv(a),
    }
    .and_then(|summary| write_summary(out_dir(&cli.command), &summary));
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Parse arguments (including the program name) and run.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
