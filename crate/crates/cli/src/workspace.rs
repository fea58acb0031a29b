//! Workspace files: one JSON document with the descriptor, the
//! triangulation, an optional group action and optional initial cluster.
//!
//! Any of `descriptor`, `triangulation` and `action` may instead be
//! `{"include": "relative/path.json"}`, resolved against the workspace
//! file's directory.

use std::path::{Path, PathBuf};

use orbiclust::algebra::LaurentPoly;
use orbiclust::orbit::validate_action;
use orbiclust::surface::{OrbifoldDescriptor, SurfaceSymmetry, Triangulation};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{CliError, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    pub descriptor: OrbifoldDescriptor,
    pub triangulation: Triangulation,
    /// Generators of the group action, as arc and marked-point maps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<SurfaceSymmetry>>,
    /// Initial cluster as expressions in x1..xn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkspace<'a> {
    #[serde(borrow)]
    descriptor: &'a RawValue,
    #[serde(borrow)]
    triangulation: &'a RawValue,
    #[serde(borrow, default)]
    action: Option<&'a RawValue>,
    #[serde(default)]
    cluster: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Include {
    include: PathBuf,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn parse_error(path: &Path, e: &serde_json::Error, base: (usize, usize)) -> CliError {
    let (line, col) = if e.line() <= 1 { (base.0, base.1 + e.column().saturating_sub(1)) } else { (base.0 + e.line() - 1, e.column()) };
    CliError::invalid(format!("{}:{line}:{col}", path.display()), e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::invalid(path.display().to_string(), e.to_string()))
}

/// Parses one section in place, or the file it includes.
fn section<T: DeserializeOwned>(path: &Path, text: &str, raw: &RawValue) -> Result<T, CliError> {
    if let Ok(inc) = serde_json::from_str::<Include>(raw.get()) {
        let target = path.parent().unwrap_or(Path::new(".")).join(&inc.include);
        let body = read(&target)?;
        return serde_json::from_str(&body).map_err(|e| parse_error(&target, &e, (1, 1)));
    }
    let offset = raw.get().as_ptr() as usize - text.as_ptr() as usize;
    serde_json::from_str(raw.get()).map_err(|e| parse_error(path, &e, line_col(text, offset)))
}

impl WorkspaceFile {
    pub fn load(path: &Path) -> Result<WorkspaceFile, CliError> {
        let text = read(path)?;
        Self::parse(path, &text)
    }

    /// Parses `text` as if read from `path` (used for includes and
    /// positions).
    pub fn parse(path: &Path, text: &str) -> Result<WorkspaceFile, CliError> {
        let raw: RawWorkspace = serde_json::from_str(text).map_err(|e| parse_error(path, &e, (1, 1)))?;
        Ok(WorkspaceFile {
            descriptor: section(path, text, raw.descriptor)?,
            triangulation: section(path, text, raw.triangulation)?,
            action: raw.action.map(|a| section(path, text, a)).transpose()?,
            cluster: raw.cluster,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("workspace serializes");
        s.push('\n');
        s
    }

    /// Every problem found: triangulation against the descriptor, then the
    /// action, then the cluster overrides.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out: Vec<Diagnostic> =
            self.triangulation.validate(&self.descriptor).into_iter().map(|m| locate_violation(&m)).collect();
        if !out.is_empty() {
            return out;
        }
        if let Some(gens) = &self.action {
            if let Err(e) = validate_action(&self.triangulation, gens) {
                out.extend(CliError::from(e).diagnostics());
            }
        }
        if let Err(e) = self.initial_cluster() {
            out.extend(e.diagnostics());
        }
        out
    }

    /// The cluster overrides, or x1..xn.
    pub fn initial_cluster(&self) -> Result<Vec<LaurentPoly>, CliError> {
        let n = self.triangulation.n_arcs();
        let Some(exprs) = &self.cluster else {
            return Ok((0..n).map(|i| LaurentPoly::var(n, i)).collect());
        };
        if exprs.len() != n {
            return Err(CliError::invalid("/cluster", format!("{} entries for {n} arcs", exprs.len())));
        }
        exprs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let p = LaurentPoly::parse_expr(s, n).map_err(|e| CliError::invalid(format!("/cluster/{i}"), e.to_string()))?;
                if p.is_zero() {
                    return Err(CliError::invalid(format!("/cluster/{i}"), "cluster entry is zero"));
                }
                Ok(p)
            })
            .collect()
    }
}

/// Maps a violation like `arcs[3]: ...` to a pointer into the workspace.
fn locate_violation(message: &str) -> Diagnostic {
    let located = message.split_once(": ").and_then(|(head, rest)| {
        let (field, idx) = head.strip_suffix(']')?.split_once('[')?;
        let idx: usize = idx.parse().ok()?;
        field.chars().all(|c| c.is_ascii_alphabetic() || c == '_').then(|| (format!("/triangulation/{field}/{idx}"), rest))
    });
    match located {
        Some((location, rest)) => Diagnostic { location, message: rest.to_string() },
        None => Diagnostic { location: "/triangulation".into(), message: message.to_string() },
    }
}
