//! Mutation sessions: the current seed with its undo history, and the JSON
//! payloads shared by `mutate` and `serve`.
//!
//! Arc and orbit numbers at this boundary are 1-based, matching the
//! variable names x1..xn.

use orbiclust::algebra::LaurentPoly;
use orbiclust::cluster::{ExchangeCase, ExchangePolynomial, OrbifoldSeed, Seed};
use orbiclust::orbit::{orbit_mutate_surface, plan_orbit_mutation, validate_action, OrbitCase, SurfaceGroupAction};
use orbiclust::surface::Triangulation;
use serde::Serialize;

use crate::error::CliError;
use crate::workspace::WorkspaceFile;

pub const PROTOCOL: u32 = 1;

/// Ordinary surfaces mutate with the surface rules and support group
/// actions; orbifolds use the generalized exchange polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedState {
    Surface(Seed),
    Orbifold(OrbifoldSeed),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub seed: SeedState,
    pub action: Option<SurfaceGroupAction>,
}

fn arc_index(arc: usize, n: usize) -> Result<usize, CliError> {
    if arc == 0 || arc > n {
        return Err(CliError::Usage(format!("arc {arc} out of range 1..={n}")));
    }
    Ok(arc - 1)
}

impl State {
    pub fn from_workspace(w: &WorkspaceFile) -> Result<State, CliError> {
        let diagnostics = w.diagnostics();
        if !diagnostics.is_empty() {
            return Err(CliError::Invalid(diagnostics));
        }
        let t = w.triangulation.clone();
        let cluster = w.initial_cluster()?;
        let orbifold = t.orbifold_points > 0 || t.points.iter().any(|p| p.isotropy() > 1);
        let action = w.action.as_ref().map(|g| validate_action(&t, g)).transpose()?;
        let seed = if orbifold {
            if action.is_some() {
                return Err(CliError::Unsupported("group actions need a surface without orbifold points".into()));
            }
            SeedState::Orbifold(OrbifoldSeed::new(t, cluster)?)
        } else {
            SeedState::Surface(Seed { cluster, ..Seed::from_triangulation(t) })
        };
        Ok(State { seed, action })
    }

    pub fn rank(&self) -> usize {
        self.cluster().len()
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        match &self.seed {
            SeedState::Surface(s) => &s.cluster,
            SeedState::Orbifold(s) => &s.cluster,
        }
    }

    pub fn triangulation(&self) -> &Triangulation {
        match &self.seed {
            SeedState::Surface(s) => s.triangulation.as_ref().expect("surface seeds carry a triangulation"),
            SeedState::Orbifold(s) => &s.triangulation,
        }
    }

    /// Exchange polynomial of 1-based `arc`.
    pub fn exchange(&self, arc: usize) -> Result<ExchangePolynomial, CliError> {
        let k = arc_index(arc, self.rank())?;
        Ok(match &self.seed {
            SeedState::Surface(s) => s.exchange_polynomial(k)?,
            SeedState::Orbifold(s) => s.exchange_polynomial(k)?,
        })
    }

    /// Mutation at 1-based `arc`. The group action is kept: it is usually
    /// no longer stable, which `orbit_mutate` then reports.
    pub fn mutate(&self, arc: usize) -> Result<(State, Step), CliError> {
        let p = self.exchange(arc)?;
        let k = arc - 1;
        let seed = match &self.seed {
            SeedState::Surface(s) => SeedState::Surface(s.mutate(k)?),
            SeedState::Orbifold(s) => SeedState::Orbifold(s.mutate(k)?),
        };
        let step = Step {
            kind: StepKind::Mutate,
            index: arc,
            flips: vec![arc],
            polynomial: Some(p.value.to_string()),
            pretty: Some(p.value.pretty("x")),
            case: p.case.describe().to_string(),
        };
        Ok((State { seed, action: self.action.clone() }, step))
    }

    /// Orbit mutation at 1-based `orbit` of the group action.
    pub fn orbit_mutate(&self, orbit: usize) -> Result<(State, Step), CliError> {
        let (SeedState::Surface(s), Some(action)) = (&self.seed, &self.action) else {
            return Err(CliError::Usage("orbit mutation needs a workspace with a group action".into()));
        };
        let norbits = action.arc_orbits().target_nvars;
        if orbit == 0 || orbit > norbits {
            return Err(CliError::Usage(format!("orbit {orbit} out of range 1..={norbits}")));
        }
        let m = orbit_mutate_surface(s, action, orbit - 1)?;
        let step = Step {
            kind: StepKind::OrbitMutate,
            index: orbit,
            flips: m.sequence.iter().map(|k| k + 1).collect(),
            polynomial: None,
            pretty: None,
            case: m.case.describe().to_string(),
        };
        Ok((State { seed: SeedState::Surface(m.seed), action: Some(m.action) }, step))
    }

    pub fn previews(&self) -> Vec<Preview> {
        (1..=self.rank())
            .filter_map(|arc| {
                let p = self.exchange(arc).ok()?;
                Some(Preview {
                    arc,
                    polynomial: p.value.to_string(),
                    pretty: p.value.pretty("x"),
                    case: p.case,
                    description: p.case.describe(),
                })
            })
            .collect()
    }

    pub fn orbits(&self) -> Vec<OrbitView> {
        let (SeedState::Surface(s), Some(action)) = (&self.seed, &self.action) else { return Vec::new() };
        let f = action.arc_orbits();
        (0..f.target_nvars)
            .map(|o| {
                let members = action.orbit_members(o);
                let planned = plan_orbit_mutation(s, action, &members);
                OrbitView {
                    orbit: o + 1,
                    arcs: members.iter().map(|a| a + 1).collect(),
                    case: planned.as_ref().ok().map(|(c, _)| *c),
                    unsupported: planned.err().map(|e| e.to_string()),
                }
            })
            .collect()
    }

    pub fn payload(&self, session: &str, history: usize) -> StatePayload {
        let previews = self.previews();
        StatePayload {
            protocol: PROTOCOL,
            session: session.to_string(),
            kind: match self.seed {
                SeedState::Surface(_) => "surface",
                SeedState::Orbifold(_) => "orbifold",
            },
            triangulation: self.triangulation().clone(),
            exchange_matrix: match &self.seed {
                SeedState::Surface(s) => Some(s.b.b.clone()),
                SeedState::Orbifold(_) => None,
            },
            cluster: self.cluster().iter().map(|x| x.to_string()).collect(),
            pretty: self.cluster().iter().map(|x| x.pretty("x")).collect(),
            flippable: previews.iter().map(|p| p.arc).collect(),
            previews,
            orbits: self.orbits(),
            history,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Mutate,
    OrbitMutate,
}

/// One applied mutation: `flips` lists the arcs flipped in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub index: usize,
    pub flips: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pretty: Option<String>,
    pub case: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preview {
    pub arc: usize,
    pub polynomial: String,
    pub pretty: String,
    pub case: ExchangeCase,
    pub description: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitView {
    pub orbit: usize,
    pub arcs: Vec<usize>,
    pub case: Option<OrbitCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unsupported: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatePayload {
    pub protocol: u32,
    pub session: String,
    pub kind: &'static str,
    pub triangulation: Triangulation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exchange_matrix: Option<Vec<Vec<i64>>>,
    pub cluster: Vec<String>,
    pub pretty: Vec<String>,
    pub flippable: Vec<usize>,
    pub previews: Vec<Preview>,
    pub orbits: Vec<OrbitView>,
    pub history: usize,
}

/// Seed history with undo.
#[derive(Debug, Clone)]
pub struct Session {
    initial: State,
    history: Vec<(Step, State)>,
}

impl Session {
    pub fn new(initial: State) -> Self {
        Session { initial, history: Vec::new() }
    }

    pub fn current(&self) -> &State {
        self.history.last().map_or(&self.initial, |(_, s)| s)
    }

    pub fn steps(&self) -> Vec<Step> {
        self.history.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    pub fn mutate(&mut self, arc: usize) -> Result<Step, CliError> {
        let (state, step) = self.current().mutate(arc)?;
        self.history.push((step.clone(), state));
        Ok(step)
    }

    pub fn orbit_mutate(&mut self, orbit: usize) -> Result<Step, CliError> {
        let (state, step) = self.current().orbit_mutate(orbit)?;
        self.history.push((step.clone(), state));
        Ok(step)
    }

    /// Drops the last step; `None` at the start of the history.
    pub fn undo(&mut self) -> Option<Step> {
        self.history.pop().map(|(s, _)| s)
    }
}
