use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use pathmorse::bench::{auto_zero_function, bench, summarize, BenchConfig, CSV_HEADER};
use pathmorse::digraph::Digraph;
use pathmorse::flow::{flow, gradient};
use pathmorse::homology::{
    compare, direct_complex, direct_homology, integer_torsion, morse_homology, ChainComplexReport,
};
use pathmorse::linalg::{Field, Rationals};
use pathmorse::morse::{
    check_condition_star, check_morse, critical_paths, extend_to_closure, value_map, MorseError,
    MorseFunction,
};
use serde::Serialize;
use serde_json::json;

use crate::error::{usage, CliError};
use crate::render;
use crate::{Cli, CliResult, Coeffs, Command, FunctionSource, ModeFlags};

macro_rules! with_field {
    ($coeffs:expr, $f:ident => $body:expr) => {
        match $coeffs {
            Coeffs::Q | Coeffs::Z => {
                let $f = &Rationals;
                $body
            }
            Coeffs::Zp(p) => {
                let $f = p;
                $body
            }
        }
    };
}

pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Closure { graph } => closure(cli, &load_graph(graph)?),
        Command::Omega { graph } => omega(cli, &load_graph(graph)?),
        Command::MorseCheck { graph, source } => {
            let g = load_graph(graph)?;
            let f = load_function(&g, source)?;
            morse_check(cli, &g, &f)
        }
        Command::Extend { graph, source } => {
            let g = load_graph(graph)?;
            let f = load_function(&g, source)?;
            extend(cli, &g, &f)
        }
        Command::Flow { graph, source } => {
            let g = load_graph(graph)?;
            let f = load_function(&g, source)?;
            with_field!(&cli.coeffs, field => flow_cmd(cli, field, &g, &f))
        }
        Command::Homology {
            graph,
            source,
            mode,
        } => {
            let g = load_graph(graph)?;
            homology(cli, &g, source, *mode)
        }
        Command::Compare { graph, source } => {
            let g = load_graph(graph)?;
            let f = load_function(&g, source)?;
            let n = cli.max_dim_for(&g);
            let mut report = with_field!(&cli.coeffs, field => compare(field, &g, &f, n))?;
            attach_torsion(cli, &g, &mut report);
            Ok(render_report(cli, &report))
        }
        Command::Bench {
            sizes,
            density,
            trials,
            seed,
            csv,
        } => {
            let config = BenchConfig {
                sizes: sizes.0..=sizes.1,
                density: *density,
                trials: *trials,
                seed: *seed,
                max_dim: cli.max_dim,
            };
            bench_cmd(cli, &config, csv.as_deref())
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_graph(path: &Path) -> CliResult<Digraph> {
    Ok(Digraph::parse(&read(path)?)?)
}

fn load_function(g: &Digraph, source: &FunctionSource) -> CliResult<MorseFunction> {
    match (&source.values, source.auto_zero) {
        (Some(path), _) => Ok(MorseFunction::parse(g, &read(path)?)?),
        (None, true) => Ok(auto_zero_function(g)?),
        (None, false) => Err(usage("one of --values <file> or --auto-zero is required")),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn edge_pairs(
    g: &Digraph,
    edges: &[(pathmorse::digraph::VertexId, pathmorse::digraph::VertexId)],
) -> Vec<[String; 2]> {
    edges
        .iter()
        .map(|&(u, v)| [g.label(u).to_string(), g.label(v).to_string()])
        .collect()
}

fn closure(cli: &Cli, g: &Digraph) -> CliResult<String> {
    let c = g.transitive_closure();
    let added = g.missing_edges(&c);
    if cli.json {
        let edges: Vec<_> = c.edges().collect();
        return Ok(to_json(&json!({
            "vertices": g.labels(),
            "edges": edge_pairs(&c, &edges),
            "added": edge_pairs(&c, &added),
        })));
    }
    let mut out = g.to_edge_list();
    for (u, v) in added {
        out.push_str(&format!("{} -> {}\n", c.label(u), c.label(v)));
    }
    Ok(out)
}

fn omega(cli: &Cli, g: &Digraph) -> CliResult<String> {
    let n = cli.max_dim_for(g);
    with_field!(&cli.coeffs, field => {
        let complex = direct_complex(field, g, n)?;
        let allowed: Vec<usize> = (0..=n).map(|k| complex.basis(k).len()).collect();
        let bases: Vec<Vec<String>> = (0..=n).map(|k| complex.render_basis(k, g)).collect();
        if cli.json {
            return Ok(to_json(&json!({
                "coeffs": coeffs_name(cli, field),
                "max_dim": n,
                "allowed": allowed,
                "dims": complex.dims(),
                "bases": bases,
            })));
        }
        let mut out = String::new();
        for k in 0..=n {
            out.push_str(&format!(
                "Ω_{k}: dim {} (allowed paths {})\n",
                complex.group(k).dim(),
                allowed[k]
            ));
            for b in &bases[k] {
                out.push_str(&format!("  {b}\n"));
            }
        }
        Ok(out)
    })
}

fn morse_check(cli: &Cli, g: &Digraph, f: &MorseFunction) -> CliResult<String> {
    check_morse(g, f)?;
    let zeros: Vec<String> = f
        .zero_set()
        .iter()
        .map(|&z| g.label(z).to_string())
        .collect();
    let star = check_condition_star(g, f);
    let witness = match &star {
        Err(MorseError::ConditionStar(w)) => Some(w.to_string()),
        Err(e) => return Err(e.clone().into()),
        Ok(()) => None,
    };
    if cli.json {
        return Ok(to_json(&json!({
            "morse": true,
            "zeros": zeros,
            "condition_star": star.is_ok(),
            "condition_star_witness": witness,
        })));
    }
    let mut out = format!("morse: yes\nzeros: {}\n", zeros.join(" "));
    match witness {
        None => out.push_str("condition (*): holds\n"),
        Some(w) => out.push_str(&format!("condition (*): fails, {w}\n")),
    }
    Ok(out)
}

fn extend(cli: &Cli, g: &Digraph, f: &MorseFunction) -> CliResult<String> {
    let (c, fbar) = extend_to_closure(g, f)?;
    let added = g.missing_edges(&c);
    let values = value_map(&c, &fbar);
    if cli.json {
        let edges: Vec<_> = c.edges().collect();
        return Ok(to_json(&json!({
            "morse_on_closure": true,
            "edges": edge_pairs(&c, &edges),
            "added": edge_pairs(&c, &added),
            "values": values,
        })));
    }
    let mut out = String::from("extension is Morse on the transitive closure\n");
    out.push_str(&fbar.render(&c));
    out.push_str(&c.to_edge_list());
    Ok(out)
}

#[derive(Serialize)]
struct FlowDimension {
    n: usize,
    basis: Vec<String>,
    critical: Vec<String>,
    gradient: Vec<Vec<String>>,
    boundary: Vec<Vec<String>>,
    flow: Vec<Vec<String>>,
    stable: Vec<Vec<String>>,
    exponent: usize,
    fixed_space: Vec<String>,
}

fn flow_cmd<F: Field>(cli: &Cli, field: &F, g: &Digraph, f: &MorseFunction) -> CliResult<String> {
    let top = cli.max_dim_for(g);
    let (c, fbar) = extend_to_closure(g, f)?;
    let v = gradient(field, &c, &fbar, top)?;
    let phi = flow(&v)?.stabilize(None)?;
    let dims: Vec<FlowDimension> = (0..=top)
        .map(|n| -> CliResult<FlowDimension> {
            let fixed = phi.invariant_space(n);
            let fixed_space = fixed
                .basis()
                .iter()
                .map(|b| pathmorse::path::Chain::from_coordinates(field, v.basis(n), b).render(&c))
                .collect();
            Ok(FlowDimension {
                n,
                basis: v.basis(n).labels(&c),
                critical: critical_paths(&c, &fbar, n)?
                    .iter()
                    .map(|p| p.label(&c))
                    .collect(),
                gradient: v.matrix(n).to_strings(),
                boundary: v.boundary_matrix(n).to_strings(),
                flow: phi.matrix(n).to_strings(),
                stable: phi.stable_matrix(n).expect("stabilized").to_strings(),
                exponent: phi.exponents()[n],
                fixed_space,
            })
        })
        .collect::<CliResult<_>>()?;
    if cli.json {
        return Ok(to_json(&json!({
            "coeffs": coeffs_name(cli, field),
            "max_dim": top,
            "closure_added": edge_pairs(&c, &g.missing_edges(&c)),
            "gradient_codomain": v.basis(top + 1).labels(&c),
            "dimensions": dims,
        })));
    }
    let mut out = String::new();
    for d in &dims {
        let next = v.basis(d.n + 1).labels(&c);
        out.push_str(&format!("== dimension {} ==\n", d.n));
        out.push_str(&format!("critical: {}\n", d.critical.join(", ")));
        out.push_str(&format!("M(V_{}):\n", d.n));
        out.push_str(&render::matrix(&d.basis, &next, &d.gradient));
        out.push_str(&format!("M(Φ_{}), exponent {}:\n", d.n, d.exponent));
        out.push_str(&render::matrix(&d.basis, &d.basis, &d.flow));
        out.push_str(&format!("fixed space: {}\n", d.fixed_space.join(", ")));
    }
    Ok(out)
}

fn homology(cli: &Cli, g: &Digraph, source: &FunctionSource, mode: ModeFlags) -> CliResult<String> {
    let n = cli.max_dim_for(g);
    let mut report = if mode.direct {
        with_field!(&cli.coeffs, field => direct_homology(field, g, n))?
    } else {
        let f = load_function(g, source)?;
        if mode.both {
            with_field!(&cli.coeffs, field => compare(field, g, &f, n))?
        } else {
            with_field!(&cli.coeffs, field => morse_homology(field, g, &f, n))?
        }
    };
    attach_torsion(cli, g, &mut report);
    Ok(render_report(cli, &report))
}

/// Integer mode reports Betti numbers over `Q` and torsion of the direct
/// complex.
fn attach_torsion(cli: &Cli, g: &Digraph, report: &mut ChainComplexReport) {
    if !matches!(cli.coeffs, Coeffs::Z) {
        return;
    }
    report.coeffs = "Z".to_string();
    if report.mode == pathmorse::homology::Mode::Morse {
        report.warnings.push(
            "torsion is computed for the direct complex only; rerun with --direct or --both"
                .to_string(),
        );
        return;
    }
    report.torsion = Some(
        integer_torsion(g, report.max_dim)
            .into_iter()
            .map(|t| t.iter().map(ToString::to_string).collect())
            .collect(),
    );
}

fn coeffs_name<F: Field>(cli: &Cli, field: &F) -> String {
    match cli.coeffs {
        Coeffs::Z => "Z".to_string(),
        _ => field.name(),
    }
}

fn render_report(cli: &Cli, report: &ChainComplexReport) -> String {
    if cli.json {
        to_json(report)
    } else {
        render::report(report)
    }
}

fn bench_cmd(cli: &Cli, config: &BenchConfig, csv_path: Option<&Path>) -> CliResult<String> {
    let records = bench(config);
    let summary = summarize(&records);
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(CSV_HEADER)?;
        for r in &records {
            w.write_record(r.csv_row())?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    if cli.json {
        let config_doc: BTreeMap<&str, serde_json::Value> = [
            ("sizes", json!([config.sizes.start(), config.sizes.end()])),
            ("density", json!(config.density)),
            ("trials", json!(config.trials)),
            ("seed", json!(config.seed)),
            ("max_dim", json!(config.max_dim)),
        ]
        .into();
        return Ok(to_json(&json!({
            "config": config_doc,
            "records": records,
            "summary": summary,
        })));
    }
    let mut out = String::new();
    for r in &records {
        out.push_str(&render::bench_record(r));
    }
    out.push_str(&format!(
        "summary: {} trials, {} errors, {} invariant, {} agreeing, {} bound violations, mean reduction ratio {:.4}\n",
        summary.trials,
        summary.errors,
        summary.invariant,
        summary.agreeing,
        summary.bound_violations,
        summary.mean_reduction_ratio
    ));
    Ok(out)
}
