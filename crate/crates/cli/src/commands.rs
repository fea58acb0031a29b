//! The subcommands. Each returns human-readable text and a JSON value; the
//! binary prints one of them.

use std::path::{Path, PathBuf};

use orbiclust::algebra::LaurentPoly;
use orbiclust::explore::{
    enumerate, enumerate_gvectors, export_graph, specialized_census, variable_census, ExchangeGraph, Status,
};
use orbiclust::orbit::{quotient, validate_action};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::session::{SeedState, Session, State, Step, PROTOCOL};
use crate::workspace::WorkspaceFile;

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub json: Value,
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::invalid(path.display().to_string(), e.to_string()))
}

pub fn cmd_validate(path: &Path) -> Result<Output, CliError> {
    let w = WorkspaceFile::load(path)?;
    let diagnostics = w.diagnostics();
    if !diagnostics.is_empty() {
        return Err(CliError::Invalid(diagnostics));
    }
    let order = match &w.action {
        Some(g) => validate_action(&w.triangulation, g)?.order(),
        None => 1,
    };
    let n = w.triangulation.n_arcs();
    Ok(Output {
        text: format!("{}: valid, {n} arcs, group order {order}\n", path.display()),
        json: json!({"protocol": PROTOCOL, "valid": true, "arcs": n, "group_order": order, "diagnostics": []}),
    })
}

/// Applies `sequence` (arcs, or orbits when `orbits` is set), reporting
/// each exchange polynomial with its case and the final cluster.
pub fn cmd_mutate(path: &Path, sequence: &[usize], orbits: bool) -> Result<Output, CliError> {
    let w = WorkspaceFile::load(path)?;
    let mut session = Session::new(State::from_workspace(&w)?);
    let mut text = String::new();
    for &i in sequence {
        let step = if orbits { session.orbit_mutate(i)? } else { session.mutate(i)? };
        text.push_str(&describe_step(&step));
    }
    let cluster = session.current().cluster();
    text.push_str("cluster:\n");
    for (i, x) in cluster.iter().enumerate() {
        text.push_str(&format!("  x{} = {}    [{x}]\n", i + 1, x.pretty("x")));
    }
    Ok(Output {
        text,
        json: json!({
            "protocol": PROTOCOL,
            "steps": session.steps(),
            "cluster": cluster.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "pretty": cluster.iter().map(|x| x.pretty("x")).collect::<Vec<_>>(),
        }),
    })
}

fn describe_step(s: &Step) -> String {
    match &s.pretty {
        Some(p) => format!("mutate arc {}: {}\n  p = {p}\n", s.index, s.case),
        None => format!(
            "mutate orbit {}: {} (flips {})\n",
            s.index,
            s.case,
            s.flips.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
        ),
    }
}

/// The orbifold workspace of the quotient by the workspace's action (the
/// trivial group when there is none).
pub fn cmd_quotient(path: &Path, out: Option<&Path>) -> Result<Output, CliError> {
    let w = WorkspaceFile::load(path)?;
    let diagnostics = w.diagnostics();
    if !diagnostics.is_empty() {
        return Err(CliError::Invalid(diagnostics));
    }
    let action = validate_action(&w.triangulation, w.action.as_deref().unwrap_or(&[]))?;
    let q = quotient(&action)?;
    let file = WorkspaceFile { descriptor: q.descriptor, triangulation: q.triangulation, action: None, cluster: None };
    let body = file.to_json();
    if let Some(out) = out {
        write_file(out, &body)?;
    }
    Ok(Output {
        text: body,
        json: json!({
            "protocol": PROTOCOL,
            "workspace": file,
            "arc_map": q.arc_map.image.iter().map(|o| o + 1).collect::<Vec<_>>(),
        }),
    })
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateOptions {
    pub cap: usize,
    /// Track g-vectors, keeping exact variables within this many mutations
    /// of the start (ordinary surfaces only).
    pub gvectors: Option<usize>,
    pub census: Option<PathBuf>,
    pub specialized_census: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub format: String,
}

#[derive(Serialize)]
struct EnumerateJson<'a> {
    protocol: u32,
    status: Status,
    nodes: usize,
    edges: usize,
    census: Vec<String>,
    pretty: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    specialized: Option<&'a [String]>,
}

pub fn cmd_enumerate(path: &Path, opts: &EnumerateOptions) -> Result<Output, CliError> {
    let w = WorkspaceFile::load(path)?;
    let state = State::from_workspace(&w)?;
    let n = state.rank();
    let g: ExchangeGraph = match (&state.seed, opts.gvectors) {
        (SeedState::Surface(s), Some(depth)) => enumerate_gvectors(s, opts.cap, depth)?,
        (SeedState::Surface(s), None) => enumerate(s, opts.cap)?,
        (SeedState::Orbifold(_), Some(_)) => {
            return Err(CliError::Usage("g-vector mode needs an ordinary surface".into()));
        }
        (SeedState::Orbifold(s), None) => enumerate(s, opts.cap)?,
    };
    let census = variable_census(&g);
    let pretty = census.iter().map(|s| pretty_canonical(s, n)).collect::<Result<Vec<_>, _>>()?;
    let specialized = match &state.action {
        Some(action) => {
            let f = action.arc_orbits();
            let images = specialized_census(&g, n, &f)?;
            let images = images.iter().map(|s| pretty_canonical_with(s, f.target_nvars, "y")).collect::<Result<Vec<_>, _>>()?;
            Some(images)
        }
        None => None,
    };

    if let Some(p) = &opts.census {
        write_file(p, &lines(&census))?;
    }
    if let (Some(p), Some(s)) = (&opts.specialized_census, &specialized) {
        write_file(p, &lines(s))?;
    }
    if let Some(p) = &opts.graph {
        write_file(p, &export_graph(&g, &opts.format)?)?;
    }

    let status = match g.status {
        Status::Finite => "finite".to_string(),
        Status::CapReached(c) => format!("cap reached ({c} seeds)"),
    };
    let mut text = format!(
        "{status}: {} seeds, {} edges, {} variables\n",
        g.nodes.len(),
        g.undirected_edges().len(),
        census.len()
    );
    for p in &pretty {
        text.push_str(&format!("  {p}\n"));
    }
    if let Some(s) = &specialized {
        text.push_str(&format!("specialized: {{{}}}\n", s.join(", ")));
    }
    let json = serde_json::to_value(EnumerateJson {
        protocol: PROTOCOL,
        status: g.status,
        nodes: g.nodes.len(),
        edges: g.undirected_edges().len(),
        census,
        pretty,
        specialized: specialized.as_deref(),
    })
    .expect("serializable");
    Ok(Output { text, json })
}

fn lines(items: &[String]) -> String {
    items.iter().map(|s| format!("{s}\n")).collect()
}

fn pretty_canonical(s: &str, n: usize) -> Result<String, CliError> {
    pretty_canonical_with(s, n, "x")
}

fn pretty_canonical_with(s: &str, n: usize, prefix: &str) -> Result<String, CliError> {
    Ok(LaurentPoly::parse_canonical(s, n)?.pretty(prefix))
}

/// Writes every shipped fixture workspace into `dir`.
pub fn cmd_export_fixtures(dir: &Path) -> Result<Output, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::invalid(dir.display().to_string(), e.to_string()))?;
    let mut names = Vec::new();
    for (name, w) in crate::fixtures::workspaces() {
        write_file(&dir.join(format!("{name}.json")), &w.to_json())?;
        names.push(name);
    }
    Ok(Output { text: lines(&names), json: json!({"protocol": PROTOCOL, "written": names}) })
}
