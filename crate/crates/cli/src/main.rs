//! Command-line interface: graph census, expression evaluation, module
//! actions, envelope checks, reductions, and the verification suite.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lpa_core::algebra::{corner_idempotents, parse_element, AlgebraElement, CornerData};
use lpa_core::chenmod::{parse_module_element, act, ModuleElement, ModuleSpace};
use lpa_core::envelope::{
    act_series, essential_witness, extend_from_corner_data, inverse_series_action, restriction,
    series_eq, EnvelopeError, SeriesElement, SeriesEq,
};
use lpa_core::graph::{Cycle, EdgeId, Graph, Path};
use lpa_core::reduce::{collapse_cycle, eliminate_source, split_components, CycleCollapse};
use lpa_core::scalar::{BaseField, Field, Polynomial};
use lpa_core::{run_suite, check_names, Sabotage, Status, SuiteConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_INSUFFICIENT: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "lpa", version, about = "Exact computation in Leavitt path algebras")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a graph: cycles, sinks, sources, disjointness.
    Check {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Enumerate the path family of a cycle.
    Paths {
        #[arg(long)]
        graph: PathBuf,
        /// Cycle word, e.g. `d1d2d3d4`, or a sink vertex name.
        #[arg(long)]
        cycle: String,
        #[arg(long, default_value_t = 10)]
        maxlen: usize,
    },
    /// Evaluate an algebra expression to canonical form.
    Eval {
        #[arg(long)]
        graph: PathBuf,
        /// Coefficient field, e.g. `Q` or `F5`.
        #[arg(long, default_value = "Q")]
        field: String,
        /// Expression, e.g. `"d1' d1"` or `"(s2 - b b') * d2"`.
        expr: String,
    },
    /// Act by an algebra element on a module element.
    Act {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cycle: String,
        /// Modulus polynomial, e.g. `"x-1 over Q"`.
        #[arg(long, default_value = "x-1 over Q")]
        poly: String,
        /// Algebra expression for the actor.
        actor: String,
        /// Module element literal, e.g. `"pd4 @a2"`.
        element: String,
    },
    /// Run one envelope-level check on a cycle's series module.
    Envelope {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cycle: String,
        #[arg(long, default_value = "x-1 over Q")]
        poly: String,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, value_enum)]
        check: EnvelopeCheck,
        /// Loop edge for the corner checks; defaults to the first source loop.
        #[arg(long)]
        tau: Option<String>,
        /// Acting polynomial for the inverse check; constant term must be 1.
        /// Defaults to 1 + x over the modulus's base field.
        #[arg(long)]
        act_poly: Option<String>,
    },
    /// Reduce a graph and optionally emit the result and the embedding.
    Reduce {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated passes out of components,sources,cycles.
        #[arg(long, default_value = "components,sources,cycles", value_delimiter = ',')]
        steps: Vec<String>,
        /// Write the terminal graph(s) to this file (suffixed if several).
        #[arg(long)]
        emit_graph: Option<PathBuf>,
        /// Print the collapse embedding of every new edge.
        #[arg(long)]
        emit_theta: bool,
    },
    /// Run the verification suite.
    Verify {
        /// Graph files; the built-in corpus when omitted.
        #[arg(long)]
        graph: Vec<PathBuf>,
        #[arg(long, default_value = "Q")]
        field: String,
        /// Restrict module-level checks to these cycle words.
        #[arg(long, value_delimiter = ',')]
        cycles: Vec<String>,
        /// Polynomials for the membership and reciprocal checks.
        #[arg(long)]
        poly: Vec<String>,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Run only the named checks.
        #[arg(long, value_delimiter = ',')]
        select: Vec<String>,
        /// Inject a deliberate defect; the family checks must fail.
        #[arg(long, value_enum)]
        sabotage: Option<SabotageArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvelopeCheck {
    Ck,
    Essential,
    Extend,
    Inverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum SabotageArg {
    GhostSignFlip,
    WrapDrop,
}

enum CliError {
    Usage(String),
    Fail(String),
    Insufficient { required: usize, available: usize },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Fail(_) => EXIT_FAIL,
            CliError::Insufficient { .. } => EXIT_INSUFFICIENT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(out, "{msg}"),
            CliError::Fail(msg) => write!(out, "{msg}"),
            CliError::Insufficient { required, available } => {
                write!(out, "insufficient horizon: needs at least {required}, got {available}")
            }
        }
    }
}

fn usage<E: fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn envelope_outcome(e: EnvelopeError) -> CliError {
    match e {
        EnvelopeError::HorizonTooSmall { required, available } => {
            CliError::Insufficient { required, available }
        }
        other => CliError::Fail(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the same path; keep those on
            // stdout with a clean exit and route real errors to the usage code
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(EXIT_USAGE) };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn load_graph(path: &PathBuf) -> Result<Arc<Graph>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(Arc::new(Graph::parse(&text).map_err(usage)?))
}

fn find_cycle(g: &Arc<Graph>, word: &str) -> Result<Cycle, CliError> {
    g.cycle_by_name(word).map_err(usage)
}

fn parse_poly(text: &str) -> Result<Polynomial, CliError> {
    Polynomial::parse(text).map_err(usage)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check { graph } => cmd_check(&graph, cli.json),
        Command::Paths { graph, cycle, maxlen } => cmd_paths(&graph, &cycle, maxlen, cli.json),
        Command::Eval { graph, field, expr } => cmd_eval(&graph, &field, &expr, cli.json),
        Command::Act { graph, cycle, poly, actor, element } => {
            cmd_act(&graph, &cycle, &poly, &actor, &element, cli.json)
        }
        Command::Envelope { graph, cycle, poly, horizon, check, tau, act_poly } => cmd_envelope(
            &graph,
            &cycle,
            &poly,
            horizon,
            check,
            tau.as_deref(),
            act_poly.as_deref(),
            cli.json,
        ),
        Command::Reduce { graph, steps, emit_graph, emit_theta } => {
            cmd_reduce(&graph, &steps, emit_graph.as_ref(), emit_theta, cli.json)
        }
        Command::Verify { graph, field, cycles, poly, horizon, seed, select, sabotage } => {
            cmd_verify(&graph, &field, &cycles, &poly, horizon, seed, &select, sabotage, cli.json)
        }
    }
}

fn cmd_check(path: &PathBuf, as_json: bool) -> Result<u8, CliError> {
    let g = load_graph(path)?;
    let cycles: Vec<String> = g.cycles().iter().map(|c| c.display(&g)).collect();
    let sinks: Vec<&str> = g.sinks().into_iter().map(|v| g.vertex_name(v)).collect();
    let sources: Vec<&str> = g.sources().into_iter().map(|v| g.vertex_name(v)).collect();
    if as_json {
        let value = json!({
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "disjoint_cycles": g.has_disjoint_cycles(),
            "cycles": cycles,
            "sinks": sinks,
            "sources": sources,
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
    } else {
        println!("vertices: {}", g.vertex_count());
        println!("edges: {}", g.edge_count());
        println!("disjoint-cycles: {}", g.has_disjoint_cycles());
        println!("cycles: {}", cycles.join(", "));
        println!("sinks: {}", sinks.join(", "));
        println!("sources: {}", sources.join(", "));
    }
    Ok(0)
}

fn cmd_paths(path: &PathBuf, word: &str, maxlen: usize, as_json: bool) -> Result<u8, CliError> {
    let g = load_graph(path)?;
    let cycle = find_cycle(&g, word)?;
    let family = g.enumerate_pc(&cycle, maxlen).map_err(usage)?;
    let words: Vec<String> = family.iter().map(|p| g.format_path(p)).collect();
    if as_json {
        println!("{}", serde_json::to_string_pretty(&words).expect("serializes"));
    } else {
        for w in &words {
            println!("{w}");
        }
    }
    Ok(0)
}

fn cmd_eval(path: &PathBuf, field: &str, expr: &str, as_json: bool) -> Result<u8, CliError> {
    let g = load_graph(path)?;
    let field = Field::base(BaseField::parse(field).map_err(usage)?);
    let value = parse_element(expr, &g, &field).map_err(usage)?;
    if as_json {
        println!("{}", json!({ "value": value.to_string() }));
    } else {
        println!("{value}");
    }
    Ok(0)
}

fn cmd_act(
    path: &PathBuf,
    word: &str,
    poly: &str,
    actor: &str,
    element: &str,
    as_json: bool,
) -> Result<u8, CliError> {
    let g = load_graph(path)?;
    let cycle = find_cycle(&g, word)?;
    let f = parse_poly(poly)?;
    let space = ModuleSpace::tower(&g, &cycle, &f).map_err(usage)?;
    let field = Field::base(f.base().clone());
    let a = parse_element(actor, &g, &field).map_err(usage)?;
    let m = parse_module_element(element, &space).map_err(usage)?;
    let out = act(&a, &m).map_err(|e| CliError::Fail(e.to_string()))?;
    if as_json {
        println!("{}", json!({ "value": out.to_string() }));
    } else {
        println!("{out}");
    }
    Ok(0)
}

/// Deterministic sample series for the envelope checks: each short basis
/// vector embedded alone, plus their alternating sum.
fn sample_series(
    space: &Arc<ModuleSpace>,
    horizon: usize,
) -> Result<Vec<SeriesElement>, CliError> {
    let basis = space.enumerate_basis(horizon.min(5), 2).map_err(usage)?;
    let mut out = Vec::new();
    let mut sum = ModuleElement::zero(space);
    for (i, bv) in basis.iter().take(12).enumerate() {
        let sign = space.base().from_i64(if i % 2 == 0 { 1 } else { -1 });
        let m = ModuleElement::basis(space, bv.gamma(), bv.fiber(), bv.level(), &sign)
            .map_err(usage)?;
        out.push(SeriesElement::embed(&m).truncate_to_inexact(horizon));
        sum = sum.add(&m).map_err(usage)?;
    }
    if !sum.is_zero() {
        out.push(SeriesElement::embed(&sum).truncate_to_inexact(horizon));
    }
    Ok(out)
}

fn expect_equal(lhs: &SeriesElement, rhs: &SeriesElement, what: &str) -> Result<(), CliError> {
    match series_eq(lhs, rhs).map_err(envelope_outcome)? {
        SeriesEq::Equal | SeriesEq::EqualToHorizon(_) => Ok(()),
        SeriesEq::Unequal(_) => Err(CliError::Fail(format!("{what} failed"))),
        SeriesEq::InsufficientHorizon { required, available } => {
            Err(CliError::Insufficient { required, available })
        }
    }
}

fn corner_for(
    g: &Arc<Graph>,
    field: &Field,
    tau: Option<&str>,
) -> Result<CornerData, CliError> {
    match tau {
        Some(name) => {
            let edge: EdgeId = g.edge_id(name).map_err(usage)?;
            corner_idempotents(g, field, edge).map_err(usage)
        }
        None => g
            .edge_ids()
            .filter(|&e| g.source(e) == g.range(e))
            .find_map(|e| corner_idempotents(g, field, e).ok())
            .ok_or_else(|| CliError::Usage("the graph has no source loop for a corner".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_envelope(
    path: &PathBuf,
    word: &str,
    poly: &str,
    horizon: usize,
    check: EnvelopeCheck,
    tau: Option<&str>,
    act_poly: Option<&str>,
    as_json: bool,
) -> Result<u8, CliError> {
    let g = load_graph(path)?;
    let cycle = find_cycle(&g, word)?;
    let f = parse_poly(poly)?;
    let space = ModuleSpace::tower(&g, &cycle, &f).map_err(usage)?;
    let field = Field::base(f.base().clone());
    let samples = sample_series(&space, horizon)?;
    let mut cases = 0usize;
    let name = match check {
        EnvelopeCheck::Ck => {
            for z in &samples {
                for v in g.vertex_ids() {
                    for w in g.vertex_ids() {
                        let lhs = z.op_pv(w).op_pv(v);
                        let rhs = if v == w { z.op_pv(v) } else { SeriesElement::zero(&space) };
                        expect_equal(&lhs, &rhs, "projection orthogonality")?;
                        cases += 1;
                    }
                }
                for e in g.edge_ids() {
                    for fe in g.edge_ids() {
                        let lhs = z
                            .op_se(e)
                            .and_then(|w| w.op_sfstar(fe))
                            .map_err(envelope_outcome)?;
                        let rhs = if e == fe {
                            z.op_pv(g.range(e))
                        } else {
                            SeriesElement::zero(&space)
                        };
                        expect_equal(&lhs, &rhs, "ghost against edge")?;
                        cases += 1;
                    }
                }
                for v in g.vertex_ids() {
                    if g.is_sink(v) {
                        continue;
                    }
                    let mut sum = SeriesElement::zero(&space);
                    for &e in g.out_edges(v) {
                        let back = z
                            .op_sfstar(e)
                            .and_then(|w| w.op_se(e))
                            .map_err(envelope_outcome)?;
                        sum = sum.add(&back).map_err(envelope_outcome)?;
                    }
                    expect_equal(&sum, &z.op_pv(v), "vertex expansion")?;
                    cases += 1;
                }
            }
            "ck"
        }
        EnvelopeCheck::Essential => {
            for z in &samples {
                if z.is_apparently_zero() {
                    continue;
                }
                let (gamma0, u) = essential_witness(z).map_err(envelope_outcome)?;
                if u.is_zero() {
                    return Err(CliError::Fail("essential witness vanished".into()));
                }
                if !as_json {
                    println!("witness along {}: {u}", g.format_path(&gamma0));
                }
                cases += 1;
            }
            "essential"
        }
        EnvelopeCheck::Extend => {
            let corner = corner_for(&g, &field, tau)?;
            let basis = space.enumerate_basis(horizon.min(5), 2).map_err(usage)?;
            let mut table = BTreeMap::new();
            for n in 0..3usize {
                let j = 1 + n % corner.entrances.len().max(1);
                let source = g.range(corner.entrances[j - 1]);
                let mut body = ModuleElement::zero(&space);
                for (i, bv) in
                    basis.iter().filter(|bv| bv.gamma().source() == source).enumerate()
                {
                    let sign = space.base().from_i64(if (i + n) % 2 == 0 { 1 } else { -1 });
                    let part =
                        ModuleElement::basis(&space, bv.gamma(), bv.fiber(), bv.level(), &sign)
                            .map_err(usage)?;
                    body = body.add(&part).map_err(usage)?;
                }
                if body.is_zero() {
                    continue;
                }
                table.insert((n, j), SeriesElement::embed(&body).truncate_to_inexact(horizon));
            }
            if table.is_empty() {
                return Err(CliError::Usage(
                    "no module basis vectors start at a corner entrance".into(),
                ));
            }
            let chi = extend_from_corner_data(&corner, &table).map_err(envelope_outcome)?;
            for (&(i, j), z) in &table {
                let back = restriction(&corner, i, j, &chi).map_err(envelope_outcome)?;
                expect_equal(&back, z, "corner restriction")?;
                cases += 1;
            }
            "extend"
        }
        EnvelopeCheck::Inverse => {
            let corner = corner_for(&g, &field, tau)?;
            if cycle.first_edge() == Some(corner.loop_edge) {
                return Err(CliError::Usage(
                    "the inverse check needs a cycle other than the corner loop".into(),
                ));
            }
            let p = match act_poly {
                Some(text) => parse_poly(text)?,
                None => Polynomial::from_i64_coeffs(f.base(), &[1, 1]),
            };
            if p.coeff_in(0, &field).map_err(usage)? != field.one() {
                return Err(CliError::Usage(
                    "the acting polynomial must have constant term 1".into(),
                ));
            }
            let mut p_of_tau = AlgebraElement::one(&g, &field);
            let mut walk = Path::trivial(corner.t);
            for i in 1..=p.degree().unwrap_or(0) {
                walk = walk.append(&g, corner.loop_edge).map_err(usage)?;
                let term = AlgebraElement::path(&g, &field, &walk)
                    .scale(&p.coeff_in(i, &field).map_err(usage)?)
                    .map_err(usage)?;
                p_of_tau = p_of_tau.add(&term).map_err(usage)?;
            }
            for z in &samples {
                let w = inverse_series_action(&p, &corner, z, horizon)
                    .map_err(envelope_outcome)?;
                let back = act_series(&p_of_tau, &w).map_err(envelope_outcome)?;
                expect_equal(&back, z, "reciprocal action")?;
                cases += 1;
            }
            "inverse"
        }
    };
    if as_json {
        println!("{}", json!({ "check": name, "status": "pass", "cases": cases }));
    } else {
        println!("pass {name} ({cases} cases)");
    }
    Ok(0)
}

fn cmd_reduce(
    path: &PathBuf,
    steps: &[String],
    emit_graph: Option<&PathBuf>,
    emit_theta: bool,
    as_json: bool,
) -> Result<u8, CliError> {
    for s in steps {
        if !matches!(s.as_str(), "components" | "sources" | "cycles") {
            return Err(CliError::Usage(format!(
                "unknown pass `{s}`; expected components, sources, cycles"
            )));
        }
    }
    let mut graphs = vec![load_graph(path)?];
    let mut log: Vec<String> = Vec::new();
    if steps.iter().any(|s| s == "components") {
        let mut split = Vec::new();
        for g in &graphs {
            let comps = split_components(g);
            if comps.len() > 1 {
                log.push(format!("split into {} components", comps.len()));
            }
            split.extend(comps.into_iter().map(|c| c.graph().clone()));
        }
        graphs = split;
    }
    if steps.iter().any(|s| s == "sources") {
        for g in &mut graphs {
            loop {
                if g.vertex_count() == 1 && g.edge_count() == 0 {
                    break;
                }
                let source = g
                    .sources()
                    .into_iter()
                    .min_by_key(|&v| g.vertex_name(v).to_string());
                let Some(v) = source else { break };
                log.push(format!("eliminate source `{}`", g.vertex_name(v)));
                let elim = eliminate_source(g, v).map_err(|e| CliError::Fail(e.to_string()))?;
                *g = elim.reduced().clone();
            }
        }
    }
    let mut collapses: Vec<CycleCollapse> = Vec::new();
    if steps.iter().any(|s| s == "cycles") {
        for g in &mut graphs {
            loop {
                let candidate = g.cycles().into_iter().find_map(|c| {
                    if !matches!(c, Cycle::Proper(ref p) if p.len() >= 2) {
                        return None;
                    }
                    collapse_cycle(g, &c).ok().map(|cc| (c.display(g), cc))
                });
                let Some((word, cc)) = candidate else { break };
                log.push(format!("collapse cycle `{word}`"));
                *g = cc.collapsed().clone();
                collapses.push(cc);
            }
        }
    }
    let texts: Vec<String> = graphs.iter().map(|g| g.to_text()).collect();
    let mut theta_lines: Vec<String> = Vec::new();
    if emit_theta {
        for cc in &collapses {
            let f = cc.collapsed();
            let e_graph = cc.original();
            theta_lines.push(format!(
                "theta({}) = {}",
                f.vertex_name(cc.vbar()),
                e_graph.vertex_name(cc.cycle().source())
            ));
            for e in f.edge_ids() {
                if e_graph.edge_id(f.edge_name(e)).is_ok() {
                    continue;
                }
                let image = cc
                    .theta_path(&Path::from_edges(f, vec![e]).expect("single edge"))
                    .map_err(|e| CliError::Fail(e.to_string()))?;
                theta_lines.push(format!(
                    "theta({}) = {}",
                    f.edge_name(e),
                    e_graph.format_path(&image)
                ));
            }
        }
    }
    if let Some(out) = emit_graph {
        if texts.len() == 1 {
            std::fs::write(out, &texts[0])
                .map_err(|e| CliError::Fail(format!("cannot write {}: {e}", out.display())))?;
        } else {
            for (i, text) in texts.iter().enumerate() {
                let numbered = out.with_extension(format!("{i}.graph"));
                std::fs::write(&numbered, text).map_err(|e| {
                    CliError::Fail(format!("cannot write {}: {e}", numbered.display()))
                })?;
            }
        }
    }
    if as_json {
        let value = json!({
            "steps": log,
            "graphs": texts,
            "theta": theta_lines,
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("serializes"));
    } else {
        for line in &log {
            println!("{line}");
        }
        for (i, g) in graphs.iter().enumerate() {
            println!("terminal graph {i}: {} vertices, {} edges", g.vertex_count(), g.edge_count());
            for c in g.cycles() {
                println!("  cycle: {}", c.display(g));
            }
        }
        for line in &theta_lines {
            println!("{line}");
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    graph_files: &[PathBuf],
    field: &str,
    cycles: &[String],
    polys: &[String],
    horizon: usize,
    seed: u64,
    select: &[String],
    sabotage: Option<SabotageArg>,
    as_json: bool,
) -> Result<u8, CliError> {
    let mut cfg = SuiteConfig::default();
    if !graph_files.is_empty() {
        let mut graphs = Vec::new();
        for path in graph_files {
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            graphs.push((label, load_graph(path)?));
        }
        cfg.graphs = graphs;
    }
    cfg.field = BaseField::parse(field).map_err(usage)?;
    if !cycles.is_empty() {
        cfg.cycles = Some(cycles.to_vec());
    }
    if !polys.is_empty() {
        cfg.polynomials =
            polys.iter().map(|p| parse_poly(p)).collect::<Result<Vec<_>, _>>()?;
    }
    cfg.horizon = horizon;
    cfg.seed = seed;
    if !select.is_empty() {
        let known = check_names();
        for name in select {
            if !known.contains(&name.as_str()) {
                return Err(CliError::Usage(format!(
                    "unknown check `{name}`; known checks: {}",
                    known.join(", ")
                )));
            }
        }
        cfg.select = Some(select.to_vec());
    }
    cfg.sabotage = sabotage.map(|s| match s {
        SabotageArg::GhostSignFlip => Sabotage::GhostSignFlip,
        SabotageArg::WrapDrop => Sabotage::WrapDrop,
    });
    let report = run_suite(&cfg);
    for check in &report.checks {
        eprintln!("{}: {} ms", check.name, check.millis);
    }
    if as_json {
        println!("{}", report.to_json());
    } else {
        for check in &report.checks {
            let status = match check.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Insufficient => "insufficient-horizon",
            };
            match &check.counterexample {
                Some(ce) => println!("{status:>21}  {} ({} cases): {ce}", check.name, check.cases),
                None => println!("{status:>21}  {} ({} cases)", check.name, check.cases),
            }
        }
        println!(
            "{} passed, {} failed, {} insufficient",
            report.passed, report.failed, report.insufficient
        );
    }
    Ok(report.exit_code() as u8)
}
