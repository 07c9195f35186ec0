use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};
use spectral_core::bounds::{kroger_diameter_upper, kroger_volume_upper, payne_weinberger_lower, rectangle_spectrum};
use spectral_core::certify::{
    certify, domain_spectrum, minimal_constant, sweep_from_spectrum, weak_chain_from_spectrum, WeakChainReport,
};
use spectral_core::fem::{assemble, solve_smallest};
use spectral_core::geometry::{diameter, rectangle_sandwich, BoxSandwich};
use spectral_core::mesh::build_mesh;
use spectral_core::{ConvexPolygon, Rectangle, SpectrumSource};

use crate::config::{Format, Settings};
use crate::domain::{default_gallery, DomainSpec};
use crate::error::{CliError, EXIT_CERTIFICATION, EXIT_SOLVER};
use crate::report::{int, num, opt, text, Report, Table, Timings, FORMULA, TOOL_VERSION};
use crate::svg::certificate_svg;

/// A finished command: the report, its main table, and the exit code.
#[derive(Debug, Clone)]
pub struct Output {
    pub report: Report,
    pub table: Table,
    pub code: u8,
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.report.to_json()),
            Format::Csv => self.table.to_csv(),
        }
    }
}

fn finish(settings: &Settings, results: Value, table: Table, timings: Timings, code: u8) -> Output {
    let mut results = results;
    results["rows"] = table.to_json();
    Output {
        report: Report {
            tool_version: TOOL_VERSION.to_string(),
            command: settings.command.clone(),
            config_echo: settings.echo(),
            results,
            timings: timings.finish(),
        },
        table,
        code,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn domain_json(spec: &DomainSpec, poly: &ConvexPolygon) -> Value {
    json!({
        "spec": spec,
        "vertices": poly.vertices().iter().map(|p| [num(p.x), num(p.y)]).collect::<Vec<_>>(),
        "area": num(poly.area()),
        "diameter": num(diameter(poly)),
        "geometry_provenance": FORMULA,
    })
}

/// `spectrum`: finite-element eigenvalues with bound columns for each index.
pub fn cmd_spectrum(s: &Settings) -> Result<Output, CliError> {
    let spec = DomainSpec::parse(s.single_domain()?)?;
    let poly = spec.polygon()?;
    let mut timings = Timings::new(!s.no_timings);
    let mesh = timings.time("mesh", || build_mesh(&poly, s.levels));
    if let Some(path) = &s.mesh_json {
        let dump = serde_json::to_string(&mesh.dump()).expect("mesh serializes");
        write_file(path, &dump)?;
    }
    let (k, mass) = timings.time("assemble", || assemble(&mesh))?;
    let spectrum = timings.time("solve", || solve_smallest(&k, &mass, s.m))?;
    let source = SpectrumSource::Fem { level: s.levels };

    let diam = diameter(&poly);
    let area = poly.area();
    let exact = match Rectangle::from_polygon(&poly) {
        Some(r) => Some(rectangle_spectrum(r.half_width_a, r.half_width_b, s.m)?),
        None => None,
    };
    let mut table = Table::new(&[
        "k",
        "mu",
        "mu_provenance",
        "closed_form",
        "closed_form_provenance",
        "payne_weinberger_lower",
        "kroger_diameter_upper",
        "kroger_volume_upper",
        "bound_provenance",
    ]);
    timings.time("bounds", || -> Result<(), CliError> {
        let pw = payne_weinberger_lower(diam)?;
        for (i, &mu) in spectrum.values.iter().enumerate() {
            let (pw, kd, kv) = if i == 0 {
                (Value::Null, Value::Null, Value::Null)
            } else {
                (
                    num(pw),
                    num(kroger_diameter_upper(2, i, diam)?),
                    num(kroger_volume_upper(2, i, area)?.value),
                )
            };
            let cf = exact.as_ref().and_then(|e| e.mu(i));
            table.push(vec![
                int(i),
                num(mu),
                text(source.to_string()),
                opt(cf),
                cf.map(|_| text(SpectrumSource::ClosedForm.to_string())).unwrap_or(Value::Null),
                pw,
                kd,
                kv,
                text(FORMULA),
            ]);
        }
        Ok(())
    })?;
    let results = json!({
        "domain": domain_json(&spec, &poly),
        "spectrum": {
            "provenance": source.to_string(),
            "values": spectrum.values.iter().map(|&v| num(v)).collect::<Vec<_>>(),
            "mesh_h": num(mesh.h_max),
            "refinement_level": s.levels,
            "solver_residual": num(spectrum.solver_residual),
            "vertices": mesh.vertices.len(),
            "triangles": mesh.triangles.len(),
        },
    });
    Ok(finish(s, results, table, timings, 0))
}

/// Rectangle a certificate is built on: the domain itself, or the inner box of
/// its sandwich.
fn certificate_domain(poly: &ConvexPolygon) -> Result<(Rectangle, &'static str, Option<BoxSandwich>), CliError> {
    match Rectangle::from_polygon(poly) {
        Some(r) => Ok((r, "identity", None)),
        None => {
            let sw = rectangle_sandwich(poly)?;
            Ok((sw.inner, "sandwich_inner", Some(sw)))
        }
    }
}

/// `certify`: partition certificate at `--C`, or at the searched minimal C.
pub fn cmd_certify(s: &Settings) -> Result<Output, CliError> {
    let spec = DomainSpec::parse(s.single_domain()?)?;
    let poly = spec.polygon()?;
    let k = s.k.ok_or_else(|| CliError::usage("certify needs --k"))?;
    let l = s.l.ok_or_else(|| CliError::usage("certify needs --l"))?;
    if l == 0 || k < l {
        return Err(CliError::usage(format!("certify needs k ≥ l ≥ 1 (k = {k}, l = {l})")));
    }
    let mut timings = Timings::new(!s.no_timings);
    let (rect, reduction, sandwich) = timings.time("sandwich", || certificate_domain(&poly))?;
    let spectrum = rectangle_spectrum(rect.half_width_a, rect.half_width_b, k + 1)?;
    let (cert, chain, trials) = match s.c {
        Some(c) => {
            let (cert, chain) = timings.time("certify", || certify(&rect, k, l, c, &spectrum))?;
            (cert, chain, None)
        }
        None => {
            let found = timings.time("search", || minimal_constant(&rect, k, l))?;
            (found.certificate, found.report, Some(found.trials))
        }
    };
    if let Some(path) = &s.svg {
        write_file(path, &certificate_svg(&poly, &cert, sandwich.as_ref()))?;
    }
    let provenance = cert.mu_k_source.to_string();
    let mut table = Table::new(&[
        "link", "relation", "lhs", "rhs", "ratio", "constant", "holds", "provenance",
    ]);
    for link in &chain.links {
        table.push(vec![
            text(link.name.clone()),
            serde_json::to_value(link.relation).expect("relation serializes"),
            num(link.lhs),
            num(link.rhs),
            opt(link.ratio),
            num(link.constant),
            Value::Bool(link.holds),
            text(provenance.clone()),
        ]);
    }
    let code = if chain.ok() { 0 } else { EXIT_CERTIFICATION };
    let results = json!({
        "domain": domain_json(&spec, &poly),
        "reduction": reduction,
        "rectangle": rect,
        "sandwich": sandwich,
        "k": k,
        "l": l,
        "C": num(cert.c),
        "minimal_C": opt(chain.minimal_c),
        "search_trials": trials.map(|t| t.iter().map(|&(c, ok)| json!({"C": num(c), "verified": ok})).collect::<Vec<_>>()),
        "mu_k": num(cert.mu_k_estimate),
        "mu_l": opt(cert.mu_l),
        "spectrum_provenance": provenance,
        "chain_ok": chain.ok(),
        "partition_convention": "a partition into m cells lower-bounds mu_m (mu_0 = 0)",
        "certificate": cert.to_document(),
        "chain": chain,
    });
    Ok(finish(s, results, table, timings, code))
}

struct DomainSweep {
    spec: DomainSpec,
    result: Result<(Value, Vec<Vec<Value>>, Vec<String>), CliError>,
    seconds: f64,
}

fn chain_json(r: &WeakChainReport) -> Value {
    serde_json::to_value(r).expect("chain report serializes")
}

fn sweep_one(spec: &DomainSpec, s: &Settings) -> Result<(Value, Vec<Vec<Value>>, Vec<String>), CliError> {
    let poly = spec.polygon()?;
    let spectrum = domain_spectrum(&poly, s.k_max + 1, s.levels)?;
    let provenance = spectrum.source.to_string();
    let chains = (1..s.k_max)
        .map(|k| weak_chain_from_spectrum(&poly, &spectrum, k, s.max_constant))
        .collect::<Result<Vec<_>, _>>()?;
    let table = sweep_from_spectrum(spectrum, s.k_max);
    let rows = table
        .entries
        .iter()
        .map(|e| {
            vec![
                text(spec.name.clone()),
                int(e.k),
                int(e.l),
                num(e.k as f64 / e.l as f64),
                num(e.ratio),
                text(provenance.clone()),
            ]
        })
        .collect();
    let mut violations = Vec::new();
    if table.max_constant > s.max_constant {
        violations.push(format!(
            "{}: empirical constant {} at (k, l) = {:?} exceeds {}",
            spec.name, table.max_constant, table.argmax, s.max_constant
        ));
    }
    for c in &chains {
        for link in c.chain.links.iter().filter(|l| !l.holds) {
            violations.push(format!("{}: k = {}: link {:?} fails", spec.name, c.k, link.name));
        }
    }
    let value = json!({
        "domain": domain_json(spec, &poly),
        "provenance": provenance,
        "spectrum": table.spectrum.values.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "max_constant": num(table.max_constant),
        "argmax": {"k": table.argmax.0, "l": table.argmax.1},
        "consecutive_ratios": chains.iter().map(|c| json!({"k": c.k, "ratio": num(c.consecutive_ratio), "provenance": provenance})).collect::<Vec<_>>(),
        "weak_chain": chains.iter().map(chain_json).collect::<Vec<_>>(),
    });
    Ok((value, rows, violations))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// `sweep`: empirical constants and chain ratios over a gallery.
pub fn cmd_sweep(s: &Settings) -> Result<Output, CliError> {
    let specs = match &s.domains {
        None => default_gallery(),
        Some(v) if v.is_empty() => return Err(CliError::usage("empty gallery")),
        Some(v) => v.iter().map(|d| DomainSpec::parse(d)).collect::<Result<Vec<_>, _>>()?,
    };
    if s.k_max == 0 {
        return Err(CliError::usage("--k-max must be at least 1"));
    }
    let mut timings = Timings::new(!s.no_timings);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {} workers: {e}", s.jobs)))?;
    let start = Instant::now();
    let sweeps: Vec<DomainSweep> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let t = Instant::now();
                let result = sweep_one(spec, s);
                DomainSweep {
                    spec: spec.clone(),
                    result,
                    seconds: t.elapsed().as_secs_f64(),
                }
            })
            .collect()
    });
    timings.record("total", start.elapsed().as_secs_f64());

    let mut table = Table::new(&["domain", "k", "l", "k_over_l", "ratio", "provenance"]);
    let mut domains = Vec::new();
    let mut violations = Vec::new();
    let mut global_max = f64::NEG_INFINITY;
    let mut failed = false;
    for d in sweeps {
        timings.record(format!("domain:{}", d.spec.name), d.seconds);
        match d.result {
            Ok((value, rows, v)) => {
                global_max = global_max.max(value["max_constant"].as_f64().unwrap_or(f64::NAN));
                if let Some(dir) = &s.plot_dir {
                    let mut plot = Table::new(&["x", "y", "k", "l", "provenance"]);
                    for r in &rows {
                        plot.push(vec![r[3].clone(), r[4].clone(), r[1].clone(), r[2].clone(), r[5].clone()]);
                    }
                    write_file(&dir.join(format!("{}.csv", file_stem(&d.spec.name))), &plot.to_csv()?)?;
                }
                for r in rows {
                    table.push(r);
                }
                violations.extend(v);
                domains.push(value);
            }
            Err(e) => {
                failed = true;
                domains.push(json!({"domain": d.spec, "error": e.message, "exit_code": e.code}));
            }
        }
    }
    let code = if failed {
        EXIT_SOLVER
    } else if !violations.is_empty() {
        EXIT_CERTIFICATION
    } else {
        0
    };
    let results = json!({
        "k_max": s.k_max,
        "levels": s.levels,
        "max_constant_threshold": num(s.max_constant),
        "global_max_constant": num(global_max),
        "violations": violations,
        "domains": domains,
    });
    Ok(finish(s, results, table, timings, code))
}

/// `bounds`: closed-form bounds for k = 1..k_max.
pub fn cmd_bounds(s: &Settings) -> Result<Output, CliError> {
    let spec = DomainSpec::parse(s.single_domain()?)?;
    let poly = spec.polygon()?;
    if s.k_max == 0 {
        return Err(CliError::usage("--k-max must be at least 1"));
    }
    let timings = Timings::new(!s.no_timings);
    let diam = diameter(&poly);
    let area = poly.area();
    let exact = match Rectangle::from_polygon(&poly) {
        Some(r) => Some(rectangle_spectrum(r.half_width_a, r.half_width_b, s.k_max + 1)?),
        None => None,
    };
    let pw = payne_weinberger_lower(diam)?;
    let mut table = Table::new(&[
        "k",
        "payne_weinberger_lower",
        "kroger_diameter_upper",
        "kroger_volume_upper",
        "kroger_volume_planar",
        "bound_provenance",
        "closed_form",
        "closed_form_provenance",
    ]);
    for k in 1..=s.k_max {
        let kv = kroger_volume_upper(2, k, area)?;
        let cf = exact.as_ref().and_then(|e| e.mu(k));
        table.push(vec![
            int(k),
            num(pw),
            num(kroger_diameter_upper(2, k, diam)?),
            num(kv.value),
            opt(kv.planar),
            text(FORMULA),
            opt(cf),
            cf.map(|_| text(SpectrumSource::ClosedForm.to_string())).unwrap_or(Value::Null),
        ]);
    }
    let results = json!({ "domain": domain_json(&spec, &poly) });
    Ok(finish(s, results, table, timings, 0))
}
