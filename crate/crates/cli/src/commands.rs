use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use flexbeam_core::verify::check_threshold;
use flexbeam_core::{
    build_mesh, eval_energy, poincare_constant, search, solve::solve_fixed_with, verify_solution, BreakConfig,
    Discretization, Problem, ProblemKind, SearchResult, SolveReport,
};

use crate::error::CliError;
use crate::output::{fields_csv, to_pretty, to_value, write_atomic};
use crate::spec::ProblemSpec;

/// First root of `cos(k) cosh(k) = 1`.
pub const CLAMPED_ROOT: f64 = 4.730040744862704;

/// Relative agreement required between a stored and a recomputed energy.
pub const ENERGY_ROUND_TRIP: f64 = 1e-12;

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Spec read from disk with command-line overrides applied.
pub struct Loaded {
    pub spec: ProblemSpec,
    pub name: String,
    pub out: PathBuf,
}

pub fn load(path: &Path, o: &Overrides) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
    let mut spec = ProblemSpec::from_toml(&text).map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
    if let Some(n) = o.n {
        spec.n = n;
    }
    if let Some(t) = o.tol {
        if !(t > 0.0) {
            return Err(CliError::Spec(format!("--tol: must be positive, got {t}")));
        }
        spec.tol = Some(t);
    }
    spec.problem()?;
    let name = spec.output.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "result".into())
    });
    let out = o
        .out
        .clone()
        .or_else(|| spec.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Loaded { spec, name, out })
}

fn tolerance(spec: &ProblemSpec) -> f64 {
    spec.policy().tolerance
}

fn verification(problem: &Problem, report: &SolveReport) -> Value {
    match verify_solution(problem, report) {
        Ok(mut v) => {
            if problem.kind != ProblemKind::G1 {
                match check_threshold(problem, report.fields.primary().mesh()) {
                    Ok(t) => v.threshold = Some(t),
                    Err(e) => log::warn!("threshold not evaluated: {e}"),
                }
            }
            let mut value = to_value(&v);
            value["worst"] = json!(v.worst());
            value
        }
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn solver_meta(spec: &ProblemSpec, r: &SolveReport) -> Value {
    let mesh = r.fields.primary().mesh();
    json!({
        "name": r.solver,
        "iterations": r.iterations,
        "kkt_residual": r.kkt_residual,
        "elements": mesh.element_count(),
        "unknowns": r.dofs.len(),
        "tolerance": tolerance(spec),
    })
}

/// The JSON document of a solve; `search` adds the search summary.
pub fn document(command: &str, spec: &ProblemSpec, problem: &Problem, r: &SolveReport, search: Option<&SearchResult>) -> Value {
    let mut doc = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "spec": to_value(spec),
        "breaks": to_value(&r.breaks),
        "energy": to_value(&r.energy),
        "solver": solver_meta(spec, r),
        "verification": verification(problem, r),
        "solution": to_value(r),
    });
    if let Some(s) = search {
        doc["search"] = json!({
            "certificate": s.certificate,
            "explored": s.explored,
            "unbroken_energy": s.unbroken_energy,
            "near_optimal": to_value(&s.near_optimal),
            "non_unique": s.near_optimal.len() > 1,
            "refined": s.refined,
            "k_max": spec.policy().k_max,
        });
    }
    doc
}

pub fn run_solve(spec: &ProblemSpec) -> Result<Value, CliError> {
    let problem = spec.problem()?;
    let k: BreakConfig = spec.breaks()?;
    k.validate_for(problem.kind)?;
    let mesh = build_mesh(spec.n, &k)?;
    let r = solve_fixed_with(&problem, &mesh, tolerance(spec))?;
    Ok(document("solve", spec, &problem, &r, None))
}

pub fn run_search(spec: &ProblemSpec) -> Result<Value, CliError> {
    let problem = spec.problem()?;
    if !spec.breaks.is_empty() {
        return Err(CliError::Spec("breaks: a search starts unbroken; remove the [[breaks]] entries".into()));
    }
    let base = build_mesh(spec.n, &BreakConfig::empty())?;
    let s = search(&problem, &base, &spec.policy())?;
    Ok(document("search", spec, &problem, &s.best, Some(&s)))
}

/// Writes `<name>.json` (and `<name>.csv` unless disabled) under `out`.
pub fn write_result(doc: &Value, spec: &ProblemSpec, out: &Path, name: &str) -> Result<PathBuf, CliError> {
    let json_path = out.join(format!("{name}.json"));
    write_atomic(&json_path, to_pretty(doc).as_bytes())?;
    if spec.output.csv.unwrap_or(true) {
        let report: SolveReport = serde_json::from_value(doc["solution"].clone())
            .map_err(|e| CliError::Spec(format!("solution: {e}")))?;
        write_atomic(&out.join(format!("{name}.csv")), &fields_csv(&report.fields)?)?;
    }
    Ok(json_path)
}

fn summary(doc: &Value, path: &Path) -> String {
    format!(
        "{}: breaks {} energy {}",
        path.display(),
        doc["breaks"],
        doc["energy"]["total"]
    )
}

pub fn solve_command(spec_path: &Path, o: &Overrides) -> Result<String, CliError> {
    let l = load(spec_path, o)?;
    let doc = run_solve(&l.spec)?;
    let path = write_result(&doc, &l.spec, &l.out, &l.name)?;
    Ok(summary(&doc, &path))
}

pub fn search_command(spec_path: &Path, o: &Overrides) -> Result<String, CliError> {
    let l = load(spec_path, o)?;
    let doc = run_search(&l.spec)?;
    let path = write_result(&doc, &l.spec, &l.out, &l.name)?;
    Ok(format!("{} ({})", summary(&doc, &path), doc["search"]["certificate"]))
}

/// One result per sweep value, computed concurrently, plus `index.csv`.
pub fn sweep_command(spec_path: &Path, o: &Overrides) -> Result<String, CliError> {
    let l = load(spec_path, o)?;
    let sweep = l
        .spec
        .sweep
        .clone()
        .ok_or_else(|| CliError::Spec("sweep: the spec has no [sweep] table".into()))?;
    let command = sweep.command.clone().unwrap_or_else(|| "search".into());
    if command != "search" && command != "solve" {
        return Err(CliError::Spec(format!("sweep.command: expected `search` or `solve`, got `{command}`")));
    }
    if sweep.values.is_empty() {
        return Err(CliError::Spec("sweep.values: empty".into()));
    }
    let specs = sweep
        .values
        .iter()
        .map(|&v| l.spec.with_field(&sweep.field, v))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<Value, CliError>> = specs
        .par_iter()
        .map(|s| if command == "search" { run_search(s) } else { run_solve(s) })
        .collect();
    let mut index = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Spec(format!("csv: {e}"));
    index
        .write_record(["value", "n_breaks", "energy", "file"])
        .map_err(csv_err)?;
    for (i, (res, (s, v))) in results.into_iter().zip(specs.iter().zip(&sweep.values)).enumerate() {
        let doc = res?;
        let name = format!("{}_{i:03}", l.name);
        write_result(&doc, s, &l.out, &name)?;
        let n_breaks = doc["breaks"].as_array().map_or(0, |a| a.len());
        index
            .write_record([
                format!("{v}"),
                n_breaks.to_string(),
                doc["energy"]["total"].to_string(),
                format!("{name}.json"),
            ])
            .map_err(csv_err)?;
    }
    let bytes = index.into_inner().map_err(|e| CliError::Spec(format!("csv: {e}")))?;
    let index_path = l.out.join(format!("{}_index.csv", l.name));
    write_atomic(&index_path, &bytes)?;
    Ok(format!("{} values of {} -> {}", sweep.values.len(), sweep.field, index_path.display()))
}

/// Re-derives everything from a stored result. Failures to verify are
/// reported inside the document, never as an error.
pub fn verify_document(doc: &Value) -> Result<Value, CliError> {
    let spec = ProblemSpec::from_json(&doc["spec"])?;
    let problem = spec.problem()?;
    let report: SolveReport =
        serde_json::from_value(doc["solution"].clone()).map_err(|e| CliError::Spec(format!("solution: {e}")))?;
    let stored = report.energy.total;
    let recomputed = Discretization::new(&problem, report.fields.primary().mesh())
        .and_then(|d| {
            let fields = d.fields(&report.dofs)?;
            eval_energy(problem.kind, &problem.params, &problem.w, &problem.loads, &d.breaks(), &fields)
        });
    let mut out = json!({
        "stored_energy": stored,
        "breaks": to_value(&report.breaks),
        "verification": verification(&problem, &report),
    });
    match recomputed {
        Ok(e) => {
            let diff = (e.total - stored).abs();
            out["energy"] = to_value(&e);
            out["energy_difference"] = json!(diff);
            out["energy_matches"] = json!(diff <= ENERGY_ROUND_TRIP * (1.0 + stored.abs()));
        }
        Err(e) => out["error"] = json!(e.to_string()),
    }
    Ok(out)
}

pub fn verify_command(result: &Path, out: Option<&Path>) -> Result<String, CliError> {
    let text = std::fs::read_to_string(result).map_err(|e| CliError::Spec(format!("{}: {e}", result.display())))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Spec(format!("{}: {e}", result.display())))?;
    let v = verify_document(&doc)?;
    let text = to_pretty(&v);
    if let Some(dir) = out {
        let stem = result.file_stem().map_or("result".into(), |s| s.to_string_lossy().into_owned());
        write_atomic(&dir.join(format!("{stem}.verify.json")), text.as_bytes())?;
    }
    Ok(text.trim_end().to_string())
}

pub fn poincare_command(n: usize) -> Result<String, CliError> {
    let c = poincare_constant(n)?;
    let reference = (CLAMPED_ROOT / 2.0).powi(4);
    let v = json!({
        "n": n,
        "constant": c,
        "eigenvalue": 1.0 / c,
        "reference_eigenvalue": reference,
        "relative_error": (1.0 / c - reference).abs() / reference,
    });
    Ok(to_pretty(&v).trim_end().to_string())
}
