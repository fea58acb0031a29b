//! Finite groups acting on triangulated surfaces: validation of the action,
//! the quotient orbifold triangulation, orbit mutation in the covering
//! surface, and the check that specialization turns orbit mutation into
//! generalized mutation on the quotient.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, LaurentPoly, OrbitMap};
use crate::cluster::{initial_cluster, orbifold_exchange_poly, ClusterError, ExchangePolynomial, Seed};
use crate::quiver::{closure, compose_perm, invert_perm, is_perm, orbit_partition, GroupElement, PermGroup, QuiverError, DEFAULT_GROUP_CAP};
use crate::surface::{
    canonical_standard, OrbifoldDescriptor, PointKind, Side, SurfaceError, SurfaceSymmetry, Triangle, Triangulation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("generator {generator} is not an automorphism of the triangulation: {detail}")]
    NotTriangulationAutomorphism { generator: usize, detail: String },
    #[error("generator {generator} reverses orientation: {detail}")]
    NotOrientationPreserving { generator: usize, detail: String },
    #[error("group element {element} fixes arc {arc}")]
    NotFree { element: usize, arc: usize },
    #[error("triangulation is not stable under the group: {0}")]
    NotStable(String),
    #[error("unsupported orbit configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("inconsistent quotient: {0}")]
    Inconsistent(String),
    #[error("orbit {0} out of range")]
    UnknownOrbit(usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, OrbitError>;

impl GroupElement for SurfaceSymmetry {
    fn compose(&self, other: &Self) -> Self {
        SurfaceSymmetry {
            arcs: compose_perm(&self.arcs, &other.arcs),
            points: compose_perm(&self.points, &other.points),
        }
    }

    fn is_identity(&self) -> bool {
        self.arcs.iter().enumerate().all(|(i, &x)| i == x) && self.points.iter().enumerate().all(|(i, &x)| i == x)
    }
}

impl SurfaceSymmetry {
    pub fn identity(t: &Triangulation) -> Self {
        SurfaceSymmetry { arcs: (0..t.n_arcs()).collect(), points: (0..t.points.len()).collect() }
    }
}

/// A finite group of orientation-preserving automorphisms of a
/// triangulation acting freely on its arcs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceGroupAction {
    pub triangulation: Triangulation,
    pub generators: Vec<SurfaceSymmetry>,
    /// Closure of the generators; element 0 is the identity.
    pub group: PermGroup<SurfaceSymmetry>,
}

impl SurfaceGroupAction {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Orbit of every arc, numbered by smallest member.
    pub fn arc_orbits(&self) -> OrbitMap {
        orbit_partition(self.triangulation.n_arcs(), self.group.elements.iter().map(|e| e.arcs.as_slice()))
    }

    pub fn orbit_members(&self, orbit: usize) -> Vec<usize> {
        let f = self.arc_orbits();
        (0..f.image.len()).filter(|&a| f.image[a] == orbit).collect()
    }
}

/// Images of boundary segments; on failure the offending segment and
/// whether its reverse exists.
fn boundary_image(t: &Triangulation, points: &[usize]) -> std::result::Result<Vec<usize>, (usize, bool)> {
    t.boundary
        .iter()
        .enumerate()
        .map(|(i, &[u, v])| {
            let img = [points[u], points[v]];
            match t.boundary.iter().position(|&s| s == img) {
                Some(j) => Ok(j),
                None => Err((i, t.boundary.contains(&[img[1], img[0]]))),
            }
        })
        .collect()
}

fn map_side(s: Side, arcs: &[usize], bmap: &[usize]) -> Side {
    match s {
        Side::Arc(a) => Side::Arc(arcs[a]),
        Side::Boundary(b) => Side::Boundary(bmap[b]),
    }
}

fn map_triangle(t: &Triangulation, arcs: &[usize], points: &[usize], bmap: &[usize], tri: &Triangle) -> Triangle {
    match *tri {
        Triangle::Standard { sides, corners } => canonical_standard(
            sides.map(|s| map_side(s, arcs, bmap)),
            corners.map(|c| points[c]),
        ),
        Triangle::SelfFolded { loop_side, radius, puncture } => Triangle::SelfFolded {
            loop_side: map_side(loop_side, arcs, bmap),
            radius: arcs[radius],
            puncture: points[puncture],
        },
        Triangle::Orbifold { loop_arc, point } => {
            let l = arcs[loop_arc];
            let point = t
                .triangles
                .iter()
                .find_map(|x| match *x {
                    Triangle::Orbifold { loop_arc, point } if loop_arc == l => Some(point),
                    _ => None,
                })
                .unwrap_or(point);
            Triangle::Orbifold { loop_arc: l, point }
        }
    }
}

/// The same triangle read counterclockwise.
fn reversed(tri: &Triangle) -> Triangle {
    match *tri {
        Triangle::Standard { sides, corners } => {
            canonical_standard([sides[2], sides[1], sides[0]], [corners[1], corners[0], corners[2]])
        }
        ref other => other.clone(),
    }
}

fn mapped_triangles(t: &Triangulation, g: &SurfaceSymmetry, bmap: &[usize]) -> Vec<Triangle> {
    let mut v: Vec<Triangle> = t.triangles.iter().map(|tri| map_triangle(t, &g.arcs, &g.points, bmap, tri)).collect();
    v.sort();
    v
}

/// Checks that `g` maps the triangulation to itself preserving point
/// kinds, tags and clockwise order.
pub fn check_symmetry(t: &Triangulation, generator: usize, g: &SurfaceSymmetry) -> Result<()> {
    let fail = |detail: String| OrbitError::NotTriangulationAutomorphism { generator, detail };
    if g.arcs.len() != t.n_arcs() || !is_perm(&g.arcs) {
        return Err(fail(format!("arc map is not a permutation of {} arcs", t.n_arcs())));
    }
    if g.points.len() != t.points.len() || !is_perm(&g.points) {
        return Err(fail(format!("point map is not a permutation of {} points", t.points.len())));
    }
    for (p, kind) in t.points.iter().enumerate() {
        let q = g.points[p];
        if t.points[q] != *kind {
            return Err(fail(format!("point {p} of kind {kind:?} maps to point {q} of kind {:?}", t.points[q])));
        }
        if t.notched[q] != t.notched[p] {
            return Err(fail(format!("tag at point {p} differs from the tag at its image {q}")));
        }
    }
    for (a, e) in t.arcs.iter().enumerate() {
        let mut img = [g.points[e[0]], g.points[e[1]]];
        img.sort_unstable();
        if t.arcs[g.arcs[a]] != img {
            return Err(fail(format!("arc a{a} {e:?} maps to a{} {:?}, not {img:?}", g.arcs[a], t.arcs[g.arcs[a]])));
        }
    }
    let bmap = match boundary_image(t, &g.points) {
        Ok(b) => b,
        Err((i, true)) => {
            return Err(OrbitError::NotOrientationPreserving {
                generator,
                detail: format!("boundary segment b{i} maps to a reversed segment"),
            })
        }
        Err((i, false)) => return Err(fail(format!("boundary segment b{i} has no image"))),
    };
    let mapped = mapped_triangles(t, g, &bmap);
    if mapped != t.triangles {
        let mut rev: Vec<Triangle> = mapped.iter().map(reversed).collect();
        rev.sort();
        if rev == t.triangles {
            let i = t.triangles.iter().position(|x| matches!(x, Triangle::Standard { .. })).unwrap_or(0);
            return Err(OrbitError::NotOrientationPreserving {
                generator,
                detail: format!("triangle {i} has its cyclic order reversed"),
            });
        }
        let missing = mapped.iter().find(|x| !t.triangles.contains(x));
        return Err(fail(format!("image triangle {missing:?} is not in the triangulation")));
    }
    Ok(())
}

/// Validates generators, computes the closure and checks freeness on arcs.
pub fn validate_action(t: &Triangulation, generators: &[SurfaceSymmetry]) -> Result<SurfaceGroupAction> {
    for (i, g) in generators.iter().enumerate() {
        check_symmetry(t, i, g)?;
    }
    let elements = closure(SurfaceSymmetry::identity(t), generators, DEFAULT_GROUP_CAP)?;
    for (ei, e) in elements.iter().enumerate().skip(1) {
        if let Some(arc) = (0..t.n_arcs()).find(|&a| e.arcs[a] == a) {
            return Err(OrbitError::NotFree { element: ei, arc });
        }
    }
    Ok(SurfaceGroupAction {
        triangulation: t.clone(),
        generators: generators.to_vec(),
        group: PermGroup { elements },
    })
}

/// Orbits of arcs, points, boundary segments and triangles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStructure {
    pub arc_orbits: OrbitMap,
    pub point_orbits: OrbitMap,
    /// Stabilizer order of every original point.
    pub point_stabilizers: Vec<usize>,
    pub boundary_orbits: OrbitMap,
    /// Triangle indices per orbit; identical triangles share an orbit.
    pub triangle_orbits: Vec<Vec<usize>>,
    pub triangle_stabilizers: Vec<usize>,
    /// Indices of triangles fixed by an element of order 3.
    pub fixed_triangles: Vec<usize>,
}

impl OrbitStructure {
    /// Isotropy of every point orbit in the quotient.
    pub fn quotient_isotropy(&self, t: &Triangulation) -> Vec<u32> {
        let mut out = vec![1; self.point_orbits.target_nvars];
        for (p, &o) in self.point_orbits.image.iter().enumerate() {
            out[o] = self.point_stabilizers[p] as u32 * t.isotropy(p);
        }
        out
    }
}

pub fn orbit_structure(action: &SurfaceGroupAction) -> Result<OrbitStructure> {
    let t = &action.triangulation;
    let elems = &action.group.elements;
    let order = elems.len();
    let arc_orbits = action.arc_orbits();
    let point_orbits = orbit_partition(t.points.len(), elems.iter().map(|e| e.points.as_slice()));
    let point_stabilizers: Vec<usize> =
        (0..t.points.len()).map(|p| elems.iter().filter(|e| e.points[p] == p).count()).collect();
    for (p, &h) in point_stabilizers.iter().enumerate() {
        if t.points[p].is_puncture() && h > 1 && t.degree(p) % h != 0 {
            return Err(OrbitError::Inconsistent(format!(
                "stabilizer of puncture {p} has order {h}, not dividing its degree {}",
                t.degree(p)
            )));
        }
    }
    let bmaps: Vec<Vec<usize>> = elems
        .iter()
        .map(|e| boundary_image(t, &e.points).map_err(|(i, _)| OrbitError::NotStable(format!("boundary segment b{i}"))))
        .collect::<Result<_>>()?;
    let boundary_orbits = orbit_partition(t.boundary.len(), bmaps.iter().map(|b| b.as_slice()));

    let values: Vec<Triangle> = t.triangles.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let value_perms: Vec<Vec<usize>> = elems
        .iter()
        .zip(&bmaps)
        .map(|(e, b)| {
            values
                .iter()
                .map(|v| {
                    let img = map_triangle(t, &e.arcs, &e.points, b, v);
                    values.iter().position(|w| *w == img).ok_or_else(|| OrbitError::NotStable(format!("{img:?}")))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    let value_orbits = orbit_partition(values.len(), value_perms.iter().map(|p| p.as_slice()));
    let mut triangle_orbits = vec![Vec::new(); value_orbits.target_nvars];
    for (i, tri) in t.triangles.iter().enumerate() {
        let v = values.iter().position(|w| w == tri).expect("value");
        triangle_orbits[value_orbits.image[v]].push(i);
    }
    let mut triangle_stabilizers = Vec::new();
    let mut fixed_triangles = Vec::new();
    for orbit in &triangle_orbits {
        let size = orbit.iter().map(|&i| &t.triangles[i]).collect::<BTreeSet<_>>().len();
        let h = order / size;
        match (h, &t.triangles[orbit[0]]) {
            (1, _) => {}
            (3, Triangle::Standard { .. }) => fixed_triangles.extend(orbit.iter().copied()),
            (h, tri) => {
                return Err(OrbitError::Inconsistent(format!("triangle {tri:?} has stabilizer of order {h}")))
            }
        }
        triangle_stabilizers.push(h);
    }
    Ok(OrbitStructure {
        arc_orbits,
        point_orbits,
        point_stabilizers,
        boundary_orbits,
        triangle_orbits,
        triangle_stabilizers,
        fixed_triangles,
    })
}

/// The quotient orbifold: arcs are arc orbits (numbered as in the orbit
/// map), points are point orbits with isotropy multiplied by the
/// stabilizer order, and every triangle fixed by an element of order 3
/// becomes a loop around a new orbifold point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotient {
    pub descriptor: OrbifoldDescriptor,
    pub triangulation: Triangulation,
    pub arc_map: OrbitMap,
}

pub fn quotient(action: &SurfaceGroupAction) -> Result<Quotient> {
    let t = &action.triangulation;
    let st = orbit_structure(action)?;
    let iso = st.quotient_isotropy(t);
    let mut points = vec![PointKind::Boundary; st.point_orbits.target_nvars];
    let mut notched = vec![false; points.len()];
    for (p, &o) in st.point_orbits.image.iter().enumerate() {
        if t.points[p].is_puncture() {
            points[o] = PointKind::Puncture { isotropy: iso[o] };
        }
        notched[o] = t.notched[p];
    }
    let pt = |p: usize| st.point_orbits.image[p];
    let mut arcs = vec![[0, 0]; st.arc_orbits.target_nvars];
    for (a, e) in t.arcs.iter().enumerate() {
        let mut img = [pt(e[0]), pt(e[1])];
        img.sort_unstable();
        arcs[st.arc_orbits.image[a]] = img;
    }
    let mut boundary = vec![[0, 0]; st.boundary_orbits.target_nvars];
    for (b, e) in t.boundary.iter().enumerate() {
        boundary[st.boundary_orbits.image[b]] = [pt(e[0]), pt(e[1])];
    }
    let side = |s: Side| match s {
        Side::Arc(a) => Side::Arc(st.arc_orbits.image[a]),
        Side::Boundary(b) => Side::Boundary(st.boundary_orbits.image[b]),
    };
    let mut q = Triangulation { points, orbifold_points: 0, boundary, arcs, triangles: Vec::new(), notched };
    let mut triangles = Vec::new();
    for (orbit, &h) in st.triangle_orbits.iter().zip(&st.triangle_stabilizers) {
        let rep = &t.triangles[orbit[0]];
        let copies = orbit.iter().filter(|&&i| t.triangles[i] == *rep).count();
        for _ in 0..copies {
            let tri = match (rep.clone(), h) {
                (Triangle::Standard { sides, .. }, 3) => {
                    let loops: BTreeSet<Side> = sides.iter().map(|&s| side(s)).collect();
                    let [Side::Arc(loop_arc)] = loops.into_iter().collect::<Vec<_>>()[..] else {
                        return Err(OrbitError::Inconsistent(format!("fixed triangle {rep:?} has sides in several orbits")));
                    };
                    q.orbifold_points += 1;
                    Triangle::Orbifold { loop_arc, point: q.orbifold_points - 1 }
                }
                (Triangle::Standard { sides, corners }, _) => q.make_triangle(sides.map(side), corners.map(pt)),
                (Triangle::SelfFolded { loop_side, radius, puncture }, _) => Triangle::SelfFolded {
                    loop_side: side(loop_side),
                    radius: st.arc_orbits.image[radius],
                    puncture: pt(puncture),
                },
                (Triangle::Orbifold { loop_arc, .. }, _) => {
                    q.orbifold_points += 1;
                    Triangle::Orbifold { loop_arc: st.arc_orbits.image[loop_arc], point: q.orbifold_points - 1 }
                }
            };
            triangles.push(tri);
        }
    }
    q.triangles = triangles;
    q.normalize();
    let descriptor = q.descriptor()?;
    let problems = q.validate(&descriptor);
    if !problems.is_empty() {
        return Err(OrbitError::Inconsistent(problems.join("; ")));
    }
    let rank = descriptor.rank()?;
    if rank * action.order() != t.n_arcs() {
        return Err(OrbitError::Inconsistent(format!(
            "{} arcs over a group of order {} against quotient rank {rank}",
            t.n_arcs(),
            action.order()
        )));
    }
    Ok(Quotient { descriptor, triangulation: q, arc_map: st.arc_orbits })
}

/// How an orbit of arcs is replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitCase {
    /// No two arcs of the orbit share a triangle: flip each once.
    Independent,
    /// The orbit splits into triangles fixed by an element of order 3: flip
    /// γ1, γ2, γ3 and then γ1 again in each.
    FixedTriangle,
    /// The orbit is the fan of arcs at a puncture fixed by the group: a
    /// sequence of 2k−2 flips changes the tag at the puncture.
    PuncturedPolygon,
}

impl OrbitCase {
    pub fn describe(&self) -> &'static str {
        match self {
            OrbitCase::Independent => "independent arcs flipped once each",
            OrbitCase::FixedTriangle => "fixed triangle rotated by four flips",
            OrbitCase::PuncturedPolygon => "tag change at a fixed puncture",
        }
    }
}

/// Mutation sequence replacing the orbit `members` of a seed.
pub fn plan_orbit_mutation(s: &Seed, action: &SurfaceGroupAction, members: &[usize]) -> Result<(OrbitCase, Vec<usize>)> {
    let t = s.triangulation.as_ref().ok_or_else(|| OrbitError::NotStable("seed has no triangulation".into()))?;
    let b = |i: usize, j: usize| s.b.get(i, j);
    let in_orbit: BTreeSet<usize> = members.iter().copied().collect();

    // Fan of arcs at a puncture fixed by every element.
    let fixed_puncture = (0..t.points.len()).find(|&p| {
        t.points[p].is_puncture()
            && action.group.elements.iter().all(|e| e.points[p] == p)
            && t.arcs.iter().enumerate().filter(|(_, e)| e.contains(&p)).map(|(a, _)| a).collect::<BTreeSet<_>>()
                == in_orbit
    });
    if let (Some(_), true) = (fixed_puncture, members.len() >= 2) {
        let mut fan = vec![members[0]];
        while fan.len() < members.len() {
            let cur = *fan.last().expect("nonempty");
            let next: Vec<usize> = members.iter().copied().filter(|&j| b(cur, j) > 0 && !fan.contains(&j)).collect();
            match (members.len(), next.as_slice()) {
                (2, _) => fan.push(members[1]),
                (_, [j]) => fan.push(*j),
                _ => return Err(OrbitError::UnsupportedConfiguration("arcs at the fixed puncture do not form a fan".into())),
            }
        }
        let k = fan.len();
        let mut seq: Vec<usize> = fan[..k - 1].to_vec();
        seq.push(fan[k - 1]);
        seq.extend(fan[..k.saturating_sub(2)].iter().rev());
        return Ok((OrbitCase::PuncturedPolygon, seq));
    }

    let adjacent = |i: usize| -> Vec<usize> { members.iter().copied().filter(|&j| b(i, j) != 0).collect() };
    if members.len() % 3 == 0 && members.iter().all(|&i| adjacent(i).len() == 2) {
        let loop_of = |a: usize| {
            t.triangles
                .iter()
                .find_map(|x| match *x {
                    Triangle::SelfFolded { loop_side: Side::Arc(l), radius, puncture }
                        if radius == a && t.isotropy(puncture) == 1 =>
                    {
                        Some(l)
                    }
                    _ => None,
                })
                .unwrap_or(a)
        };
        let triangle_sides: Vec<BTreeSet<usize>> = t
            .triangles
            .iter()
            .filter_map(|x| match x {
                Triangle::Standard { sides, .. } => Some(sides.iter().filter_map(|s| s.arc()).collect()),
                _ => None,
            })
            .collect();
        let mut seq = Vec::new();
        let mut done = BTreeSet::new();
        for &g1 in members {
            if done.contains(&g1) {
                continue;
            }
            let g2 = adjacent(g1).into_iter().find(|&j| b(g1, j) > 0);
            let Some(g2) = g2 else { break };
            let g3 = adjacent(g2).into_iter().find(|&j| j != g1 && b(g2, j) > 0);
            let Some(g3) = g3 else { break };
            let ids: BTreeSet<usize> = [g1, g2, g3].map(loop_of).into_iter().collect();
            if b(g3, g1) <= 0 || !triangle_sides.contains(&ids) {
                break;
            }
            done.extend([g1, g2, g3]);
            seq.extend([g1, g2, g3, g1]);
        }
        if done.len() == members.len() {
            return Ok((OrbitCase::FixedTriangle, seq));
        }
    }

    let shares_triangle = t.triangles.iter().any(|x| {
        let arcs: BTreeSet<usize> = match *x {
            Triangle::Standard { sides, .. } => sides.iter().filter_map(|s| s.arc()).collect(),
            Triangle::SelfFolded { loop_side, radius, .. } => loop_side.arc().into_iter().chain([radius]).collect(),
            Triangle::Orbifold { loop_arc, .. } => [loop_arc].into(),
        };
        arcs.intersection(&in_orbit).count() > 1
    });
    if !shares_triangle && members.iter().all(|&i| members.iter().all(|&j| b(i, j) == 0)) {
        return Ok((OrbitCase::Independent, members.to_vec()));
    }
    Err(OrbitError::UnsupportedConfiguration(format!(
        "orbit {members:?} is neither independent, a fixed-triangle orbit nor a fan at a fixed puncture"
    )))
}

/// Arc permutation induced by a point permutation on `t`, with images of
/// arcs outside `free` prescribed by `known`.
fn induced_arc_perm(t: &Triangulation, points: &[usize], known: &[usize], free: &[usize]) -> Option<Vec<usize>> {
    let bmap = boundary_image(t, points).ok()?;
    let mut perm = known.to_vec();
    let mut used: BTreeSet<usize> = (0..t.n_arcs()).filter(|a| !free.contains(a)).map(|a| known[a]).collect();
    let candidates: Vec<Vec<usize>> = free
        .iter()
        .map(|&a| {
            let mut img = [points[t.arcs[a][0]], points[t.arcs[a][1]]];
            img.sort_unstable();
            free.iter().copied().filter(|&c| t.arcs[c] == img).collect()
        })
        .collect();
    fn search(
        t: &Triangulation,
        points: &[usize],
        bmap: &[usize],
        free: &[usize],
        candidates: &[Vec<usize>],
        i: usize,
        perm: &mut Vec<usize>,
        used: &mut BTreeSet<usize>,
    ) -> bool {
        if i == free.len() {
            let g = SurfaceSymmetry { arcs: perm.clone(), points: points.to_vec() };
            return mapped_triangles(t, &g, bmap) == t.triangles;
        }
        for &c in &candidates[i] {
            if used.insert(c) {
                perm[free[i]] = c;
                if search(t, points, bmap, free, candidates, i + 1, perm, used) {
                    return true;
                }
                used.remove(&c);
            }
        }
        false
    }
    search(t, points, &bmap, free, &candidates, 0, &mut perm, &mut used).then_some(perm)
}

/// Result of an orbit mutation: the new seed, the action on its
/// triangulation (same generators), and the flips that were applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMutation {
    pub seed: Seed,
    pub action: SurfaceGroupAction,
    pub case: OrbitCase,
    pub sequence: Vec<usize>,
}

/// Replaces an orbit of arcs by the unique other orbit completing a
/// G-stable triangulation. New arcs are numbered so that the original
/// generators still act by the same arc permutations.
pub fn orbit_mutate_surface(s: &Seed, action: &SurfaceGroupAction, orbit: usize) -> Result<OrbitMutation> {
    let t = s.triangulation.as_ref().ok_or_else(|| OrbitError::NotStable("seed has no triangulation".into()))?;
    for (i, g) in action.generators.iter().enumerate() {
        check_symmetry(t, i, g).map_err(|e| OrbitError::NotStable(e.to_string()))?;
    }
    let action = SurfaceGroupAction { triangulation: t.clone(), ..action.clone() };
    let members = action.orbit_members(orbit);
    if members.is_empty() {
        return Err(OrbitError::UnknownOrbit(orbit));
    }
    let (case, sequence) = plan_orbit_mutation(s, &action, &members)?;
    let raw = s.mutate_sequence(&sequence)?;
    let t2 = raw.triangulation.clone().expect("triangulation kept");

    // Induced generator actions on the new arcs.
    let mut induced = Vec::new();
    for g in &action.generators {
        let h = induced_arc_perm(&t2, &g.points, &g.arcs, &members)
            .ok_or_else(|| OrbitError::NotStable("a generator does not preserve the new triangulation".into()))?;
        induced.push(SurfaceSymmetry { arcs: h, points: g.points.clone() });
    }
    let new_elems = closure(SurfaceSymmetry::identity(&t2), &induced, DEFAULT_GROUP_CAP)?;
    if new_elems.len() != action.order() {
        return Err(OrbitError::NotStable("induced group has a different order".into()));
    }
    // Every anchor of the new orbit gives an equivariant numbering; prefer
    // the one keeping the most arcs on their old endpoints.
    let g0 = members[0];
    let mut best: Option<(usize, Vec<usize>, Triangulation)> = None;
    for &anchor in &members {
        let mut sigma: Vec<usize> = (0..t2.n_arcs()).collect();
        for (old, new) in action.group.elements.iter().zip(&new_elems) {
            sigma[new.arcs[anchor]] = old.arcs[g0];
        }
        if !is_perm(&sigma) {
            return Err(OrbitError::NotStable("new orbit is not a regular orbit".into()));
        }
        let t3 = t2.relabel_arcs(&sigma);
        let kept = members.iter().filter(|&&a| t3.arcs[a] == t.arcs[a]).count();
        if best.as_ref().is_none_or(|b| kept > b.0) {
            best = Some((kept, sigma, t3));
        }
    }
    let (_, sigma, t3) = best.expect("nonempty orbit");
    let mut cluster = raw.cluster.clone();
    for (i, x) in raw.cluster.iter().enumerate() {
        cluster[sigma[i]] = x.clone();
    }
    let b = raw.b.permuted(&invert_perm(&sigma));
    for (i, g) in action.generators.iter().enumerate() {
        check_symmetry(&t3, i, g).map_err(|e| OrbitError::NotStable(e.to_string()))?;
    }
    let seed = Seed { b, cluster, triangulation: Some(t3.clone()) };
    Ok(OrbitMutation { seed, action: SurfaceGroupAction { triangulation: t3, ..action }, case, sequence })
}

/// Outcome of comparing orbit mutation in the cover with generalized
/// mutation in the quotient under the specialization F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringReport {
    pub orbit: usize,
    pub case: OrbitCase,
    /// F-images of the new orbit variables.
    pub new_images: Vec<LaurentPoly>,
    /// F(x_old · x_new) with the current cluster taken as fresh variables.
    pub product: LaurentPoly,
    /// Exchange polynomial of the orbit's arc in the quotient.
    pub quotient_poly: ExchangePolynomial,
    /// F(x_old · x_new) for the actual cluster.
    pub evaluated_product: LaurentPoly,
    /// The quotient exchange polynomial at the F-image cluster.
    pub evaluated_expected: LaurentPoly,
    pub failures: Vec<String>,
}

impl CoveringReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn covering_consistency(s: &Seed, action: &SurfaceGroupAction, orbit: usize) -> Result<CoveringReport> {
    let t = s.triangulation.as_ref().ok_or_else(|| OrbitError::NotStable("seed has no triangulation".into()))?;
    let action = SurfaceGroupAction { triangulation: t.clone(), ..action.clone() };
    let mutation = orbit_mutate_surface(s, &action, orbit)?;
    let members = action.orbit_members(orbit);
    let f = action.arc_orbits();
    let g0 = members[0];
    let mut failures = Vec::new();

    let new_images: Vec<LaurentPoly> =
        members.iter().map(|&a| mutation.seed.cluster[a].specialize(&f)).collect::<std::result::Result<_, _>>()?;
    if let Some((i, y)) = new_images.iter().enumerate().find(|(_, y)| **y != new_images[0]) {
        failures.push(format!(
            "new orbit variables differ under F: a{g0} gives {}, a{} gives {y}",
            new_images[0], members[i]
        ));
    }

    let fresh = Seed { b: s.b.clone(), cluster: initial_cluster(t.n_arcs()), triangulation: Some(t.clone()) };
    let fresh_new = orbit_mutate_surface(&fresh, &action, orbit)?.seed;
    let product = fresh.cluster[g0].mul(&fresh_new.cluster[g0])?.specialize(&f)?;
    if !product.is_polynomial() {
        failures.push(format!("F(x_old x_new) = {product} is not a polynomial"));
    }

    let q = quotient(&action)?;
    let quotient_poly = orbifold_exchange_poly(&q.triangulation, orbit)?;
    if product != quotient_poly.value {
        failures.push(format!(
            "F(x_old x_new) = {product} but the quotient exchange polynomial is {} ({})",
            quotient_poly.value, quotient_poly.case
        ));
    }

    let mut reps = BTreeMap::new();
    for (a, &o) in f.image.iter().enumerate() {
        reps.entry(o).or_insert(a);
    }
    let qcluster: Vec<LaurentPoly> =
        reps.values().map(|&a| s.cluster[a].specialize(&f)).collect::<std::result::Result<_, _>>()?;
    let evaluated_product = s.cluster[g0].mul(&mutation.seed.cluster[g0])?.specialize(&f)?;
    let evaluated_expected = quotient_poly.evaluate(&qcluster)?;
    if evaluated_product != evaluated_expected {
        failures.push(format!(
            "F(x_old x_new) = {evaluated_product} on the current cluster, expected {evaluated_expected}"
        ));
    }
    Ok(CoveringReport {
        orbit,
        case: mutation.case,
        new_images,
        product,
        quotient_poly,
        evaluated_product,
        evaluated_expected,
        failures,
    })
}
