use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use indsys::dataset::{gen_synthetic, load_dataset, save_dataset, validate_consistency, Profile};
use indsys::drago::{drago_plan, PlanRecord};
use indsys::kpi::{compute_kpis, parse_records, render_comparison, render_report, KpiReport, KpiTotals, ReportFormat};
use indsys::model::ProductionAssignment;
use indsys::phase1::{run_phase1, EaConfig};
use indsys::pipeline::{prepare_network, PipelineError, SolutionFile};
use indsys::Dataset64;

use crate::config::{RunConfig, TransportConfig};
use crate::{Command, GenArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Usage(_) => 4,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Solution(m) => CliError::Validation(format!("solution file: {m}")),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

/// Id-keyed plan for one criterion.
#[derive(Serialize)]
struct PlanFile {
    criterion: String,
    route_exact: bool,
    products: u64,
    totals: KpiTotals,
    links: Vec<PlanRecord>,
    warnings: Vec<String>,
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { dataset, out, format } => validate(&dataset, out.as_deref(), format),
        Command::Gen(args) => generate(&args),
        Command::Phase1 { ea, out } => {
            let config = ea.to_config()?;
            let ds = load_valid(&ea.dataset)?;
            let run = RunConfig {
                dataset: ea.dataset.display().to_string(),
                assignment: None,
                ea: Some(config.clone()),
                transport: None,
            };
            create_dir(&out)?;
            write_json(&out.join("config.json"), &run)?;
            phase1(&ds, &config, &out).map(|_| ())
        }
        Command::Phase2 {
            dataset,
            assignment,
            transport,
            out,
        } => {
            let config = transport.to_config(0)?;
            let ds = load_valid(&dataset)?;
            let text = read(&assignment)?;
            let file: SolutionFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", assignment.display())))?;
            let a = file.to_assignment(&ds)?;
            let run = RunConfig {
                dataset: dataset.display().to_string(),
                assignment: Some(assignment.display().to_string()),
                ea: None,
                transport: Some(config.clone()),
            };
            create_dir(&out)?;
            write_json(&out.join("config.json"), &run)?;
            phase2(&ds, &a, &config, &out, transport.format)
        }
        Command::Optimize { ea, transport, out } => {
            let ea_config = ea.to_config()?;
            let config = transport.to_config(ea.seed)?;
            let ds = load_valid(&ea.dataset)?;
            let run = RunConfig {
                dataset: ea.dataset.display().to_string(),
                assignment: None,
                ea: Some(ea_config.clone()),
                transport: Some(config.clone()),
            };
            create_dir(&out)?;
            write_json(&out.join("config.json"), &run)?;
            let a = phase1(&ds, &ea_config, &out)?;
            phase2(&ds, &a, &config, &out, transport.format)
        }
        Command::Report { inputs, format } => {
            let reports = inputs
                .iter()
                .map(|p| parse_records(&read(p)?).map_err(|e| CliError::Validation(format!("{}: {e}", p.display()))))
                .collect::<Result<Vec<KpiReport>, CliError>>()?;
            let text = match reports.as_slice() {
                [one] => render_report(one, format),
                many => render_comparison(many, format),
            };
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads an input file; a missing or unreadable input is a validation failure.
fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    write(path, &(text + "\n"))
}

fn load(path: &Path) -> Result<Dataset64, CliError> {
    load_dataset(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Loads a dataset and refuses it when the consistency check finds errors.
fn load_valid(path: &Path) -> Result<Dataset64, CliError> {
    let ds = load(path)?;
    let report = validate_consistency(&ds);
    if report.has_errors() {
        return Err(CliError::Validation(format!(
            "{} is inconsistent:\n{report}",
            path.display()
        )));
    }
    Ok(ds)
}

fn validate(path: &Path, out: Option<&Path>, format: ReportFormat) -> Result<(), CliError> {
    let ds = load(path)?;
    let report = validate_consistency(&ds);
    match format {
        ReportFormat::Table => println!("{report}"),
        ReportFormat::Records => println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?
        ),
    }
    if let Some(out) = out {
        write_json(out, &report)?;
    }
    if report.has_errors() {
        return Err(CliError::Validation(format!(
            "{} error(s) in {}",
            report.errors().count(),
            path.display()
        )));
    }
    Ok(())
}

fn generate(args: &GenArgs) -> Result<(), CliError> {
    let profile = match args.profile.as_str() {
        "default" => Profile::default(),
        "toy" => Profile::toy(args.parts, args.units),
        other => {
            return Err(CliError::Usage(format!(
                "unknown profile `{other}`, expected default or toy"
            )))
        }
    };
    let ds: Dataset64 = gen_synthetic(&profile, args.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    save_dataset(&ds, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    fs::write(&args.out, buf).map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    println!(
        "{}: {} parts, {} units, {} warehouses, {} transport means, {} links",
        args.out.display(),
        ds.part_count(),
        ds.units().len(),
        ds.warehouses().len(),
        ds.transport_means().len(),
        ds.link_count()
    );
    Ok(())
}

/// Runs the search and writes the trace and the solution. An incomplete
/// champion is written too, then reported as infeasible.
fn phase1(ds: &Dataset64, config: &EaConfig, out: &Path) -> Result<ProductionAssignment<f64>, CliError> {
    let result = run_phase1(ds, config).map_err(|e| CliError::Usage(e.to_string()))?;
    write(&out.join("trace.csv"), &result.trace_csv())?;
    let champion = result.champion();
    let file = SolutionFile::from_assignment(&champion.assignment, ds, champion.sr, champion.dist);
    write_json(&out.join("assignment.json"), &file)?;
    write(&out.join("assignment.txt"), &file.listing())?;
    let last = result.trace.last().expect("trace has generation 0");
    println!(
        "phase1: {} generations, best sr {:.3}, best dist {}",
        config.max_generations,
        last.best_sr,
        last.best_dist.map_or_else(|| "-".to_string(), |d| format!("{d:.1}"))
    );
    match &result.diagnostic {
        Some(d) => Err(CliError::Infeasible(d.clone())),
        None => Ok(champion.assignment.clone()),
    }
}

fn phase2(
    ds: &Dataset64,
    a: &ProductionAssignment<f64>,
    config: &TransportConfig,
    out: &Path,
    format: ReportFormat,
) -> Result<(), CliError> {
    let (net, schedule) = prepare_network(ds, a, config.products, config.takt_h)?;
    write_json(&out.join("network.json"), &net)?;
    let criteria = config.criteria()?;
    let options = config.drago_options();
    let single = criteria.len() == 1;
    let name = |stem: &str, tag: &str, ext: &str| -> PathBuf {
        if single {
            out.join(format!("{stem}.{ext}"))
        } else {
            out.join(format!("{stem}-{tag}.{ext}"))
        }
    };
    let mut reports = Vec::new();
    for (tag, criterion) in &criteria {
        let plan = drago_plan(&net, &schedule, criterion, &options).map_err(|e| CliError::Infeasible(e.to_string()))?;
        for w in &plan.warnings {
            eprintln!("warning: {w}");
        }
        let report = compute_kpis(&plan, &net, config.products, config.packing_seed);
        write_json(
            &name("plan", tag, "json"),
            &PlanFile {
                criterion: plan.criterion.label(),
                route_exact: plan.route_exact,
                products: config.products,
                totals: report.totals,
                links: plan.records(&net),
                warnings: plan.warnings.clone(),
            },
        )?;
        write_json(&name("report", tag, "json"), &report)?;
        write(
            &name("report", tag, "txt"),
            &render_report(&report, ReportFormat::Table),
        )?;
        reports.push(report);
    }
    if single {
        print!("{}", render_report(&reports[0], format));
    } else {
        write(
            &out.join("comparison.txt"),
            &render_comparison(&reports, ReportFormat::Table),
        )?;
        print!("{}", render_comparison(&reports, format));
    }
    Ok(())
}
