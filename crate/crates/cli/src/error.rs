//! Command errors and their exit codes.

use orbiclust::algebra::AlgebraError;
use orbiclust::cluster::ClusterError;
use orbiclust::explore::ExploreError;
use orbiclust::orbit::OrbitError;
use orbiclust::quiver::QuiverError;
use orbiclust::surface::SurfaceError;
use serde::Serialize;
use thiserror::Error;

/// A problem located in a workspace file. `location` is a JSON pointer
/// into the resolved workspace, or `file:line:column` for parse errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("usage: {0}")]
    Usage(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    /// 0 success, 1 validation failure, 2 unsupported configuration,
    /// 3 internal invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Usage(_) => 1,
            CliError::Unsupported(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid(vec![Diagnostic { location: location.into(), message: message.into() }])
    }

    /// Diagnostics for JSON output.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            CliError::Invalid(d) => d.clone(),
            other => vec![Diagnostic { location: String::new(), message: other.to_string() }],
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Parse { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<QuiverError> for CliError {
    fn from(e: QuiverError) -> Self {
        match e {
            QuiverError::ClosureTooLarge(_) => CliError::Unsupported(e.to_string()),
            _ => CliError::invalid("", e.to_string()),
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::DegenerateSurface(_) | SurfaceError::ExcludedSurface(_) => {
                CliError::Unsupported(e.to_string())
            }
            SurfaceError::UnknownArc(_) => CliError::Usage(e.to_string()),
            SurfaceError::InvalidDescriptor(_) | SurfaceError::Invalid(_) => CliError::invalid("", e.to_string()),
        }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::Algebra(e) => e.into(),
            ClusterError::Quiver(e) => e.into(),
            ClusterError::Surface(e) => e.into(),
            ClusterError::IndexOutOfRange(_) => CliError::Usage(e.to_string()),
            ClusterError::NotASurface => CliError::Unsupported(e.to_string()),
            ClusterError::LengthMismatch { .. } | ClusterError::ZeroEntry(_) => CliError::invalid("/cluster", e.to_string()),
        }
    }
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::Surface(e) => e.into(),
            OrbitError::Cluster(e) => e.into(),
            OrbitError::Quiver(e) => e.into(),
            OrbitError::Algebra(e) => e.into(),
            OrbitError::UnsupportedConfiguration(_) => CliError::Unsupported(e.to_string()),
            OrbitError::Inconsistent(_) => CliError::Internal(e.to_string()),
            OrbitError::UnknownOrbit(_) => CliError::Usage(e.to_string()),
            OrbitError::NotTriangulationAutomorphism { generator, .. }
            | OrbitError::NotOrientationPreserving { generator, .. } => {
                CliError::invalid(format!("/action/{generator}"), e.to_string())
            }
            OrbitError::NotFree { .. } | OrbitError::NotStable(_) => CliError::invalid("/action", e.to_string()),
        }
    }
}

impl From<ExploreError> for CliError {
    fn from(e: ExploreError) -> Self {
        match e {
            ExploreError::Cluster(e) => e.into(),
            ExploreError::UnknownFormat(_) => CliError::Usage(e.to_string()),
        }
    }
}
