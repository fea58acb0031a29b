//! Combinatorial tagged triangulations of marked surfaces and orbifolds.
//!
//! A triangulation stores the ideal triangulation τ(T) (arcs with ideal
//! endpoints and a triangle list) together with one notch flag per puncture.
//! The tagged arcs are derived: at a puncture enclosed by a self-folded
//! triangle of isotropy 1 the radius is the plain arc and the loop stands for
//! the radius notched there; everywhere else an end is notched exactly when
//! its puncture is flagged.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quiver::Quiver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("degenerate surface: rank {0}")]
    DegenerateSurface(i64),
    #[error("excluded surface: {0}")]
    ExcludedSurface(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("arc {0} out of range")]
    UnknownArc(usize),
    #[error("invalid triangulation: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

pub type Result<T> = std::result::Result<T, SurfaceError>;

/// Topological type of an orbifold (S, M, O) with puncture isotropies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbifoldDescriptor {
    pub genus: u32,
    /// Marked-point count of each boundary component.
    pub boundaries: Vec<usize>,
    /// Isotropy order of each puncture.
    pub punctures: Vec<u32>,
    pub orbifold_points: usize,
}

impl OrbifoldDescriptor {
    pub fn new(genus: u32, boundaries: Vec<usize>, punctures: Vec<u32>, orbifold_points: usize) -> Result<Self> {
        let d = OrbifoldDescriptor { genus, boundaries, punctures, orbifold_points };
        d.check()?;
        Ok(d)
    }

    pub fn check(&self) -> Result<()> {
        if self.boundaries.iter().any(|&c| c == 0) {
            return Err(SurfaceError::InvalidDescriptor("boundary component without marked points".into()));
        }
        if self.punctures.iter().any(|&m| m == 0) {
            return Err(SurfaceError::InvalidDescriptor("isotropy must be at least 1".into()));
        }
        let (g, b, p, c) = (self.genus, self.boundaries.len(), self.punctures.len(), self.marked_boundary());
        if self.orbifold_points == 0 {
            if g == 0 && b == 0 && (1..=3).contains(&p) {
                return Err(SurfaceError::ExcludedSurface(format!("sphere with {p} punctures")));
            }
            // The once-punctured monogon stays allowed: it is the rank-one
            // orbifold of the m-punctured family.
            if g == 0 && b == 1 && c == 1 && p == 0 {
                return Err(SurfaceError::ExcludedSurface("unpunctured monogon".into()));
            }
            if g == 0 && b == 1 && p == 0 && (c == 2 || c == 3) {
                return Err(SurfaceError::ExcludedSurface(format!("unpunctured {c}-gon")));
            }
        }
        let n = self.signed_rank();
        if n <= 0 {
            return Err(SurfaceError::DegenerateSurface(n));
        }
        Ok(())
    }

    pub fn marked_boundary(&self) -> usize {
        self.boundaries.iter().sum()
    }

    fn signed_rank(&self) -> i64 {
        6 * self.genus as i64
            + 3 * self.boundaries.len() as i64
            + 3 * self.punctures.len() as i64
            + 2 * self.orbifold_points as i64
            + self.marked_boundary() as i64
            - 6
    }

    /// Number of arcs in any triangulation: 6g + 3b + 3p + 2x + c − 6.
    pub fn rank(&self) -> Result<usize> {
        match self.signed_rank() {
            n if n > 0 => Ok(n as usize),
            n => Err(SurfaceError::DegenerateSurface(n)),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundaries.len() as i64
    }

    /// Order-insensitive form for comparisons.
    pub fn normalized(&self) -> Self {
        let mut d = self.clone();
        d.boundaries.sort_unstable();
        d.punctures.sort_unstable();
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Plain,
    Notched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointKind {
    Boundary,
    Puncture { isotropy: u32 },
}

impl PointKind {
    pub fn isotropy(&self) -> u32 {
        match self {
            PointKind::Boundary => 1,
            PointKind::Puncture { isotropy } => *isotropy,
        }
    }

    pub fn is_puncture(&self) -> bool {
        matches!(self, PointKind::Puncture { .. })
    }
}

/// A triangle side: an arc or a boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Arc(usize),
    Boundary(usize),
}

impl Side {
    pub fn arc(&self) -> Option<usize> {
        match self {
            Side::Arc(a) => Some(*a),
            Side::Boundary(_) => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Arc(a) => write!(f, "a{a}"),
            Side::Boundary(b) => write!(f, "b{b}"),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("side must look like a3 or b1, got {s:?}");
        let (kind, num) = s.split_at(s.len().min(1));
        let n: usize = num.parse().map_err(|_| bad())?;
        match kind {
            "a" => Ok(Side::Arc(n)),
            "b" => Ok(Side::Boundary(n)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Side {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Side {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Triangle {
    /// Sides in clockwise order; `corners[i]` sits between `sides[i]` and
    /// `sides[(i + 1) % 3]`.
    Standard { sides: [Side; 3], corners: [usize; 3] },
    /// Loop (arc or boundary segment) enclosing a radius to `puncture`.
    SelfFolded {
        #[serde(rename = "loop")]
        loop_side: Side,
        radius: usize,
        puncture: usize,
    },
    /// Loop enclosing orbifold point `point`.
    Orbifold {
        #[serde(rename = "loop")]
        loop_arc: usize,
        point: usize,
    },
}

impl Triangle {
    fn map_arcs(&self, f: &impl Fn(usize) -> usize) -> Triangle {
        let ms = |s: Side| match s {
            Side::Arc(a) => Side::Arc(f(a)),
            b => b,
        };
        match *self {
            Triangle::Standard { sides, corners } => {
                canonical_standard([ms(sides[0]), ms(sides[1]), ms(sides[2])], corners)
            }
            Triangle::SelfFolded { loop_side, radius, puncture } => {
                Triangle::SelfFolded { loop_side: ms(loop_side), radius: f(radius), puncture }
            }
            Triangle::Orbifold { loop_arc, point } => Triangle::Orbifold { loop_arc: f(loop_arc), point },
        }
    }
}

/// Standard triangle rotated to its least (side, corner) sequence.
pub fn canonical_standard(sides: [Side; 3], corners: [usize; 3]) -> Triangle {
    let best = (0..3)
        .map(|r| {
            let s = [sides[r], sides[(r + 1) % 3], sides[(r + 2) % 3]];
            let c = [corners[r], corners[(r + 1) % 3], corners[(r + 2) % 3]];
            (s, c)
        })
        .min()
        .expect("three rotations");
    Triangle::Standard { sides: best.0, corners: best.1 }
}

/// A tagged arc: two (marked point, tag) ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TaggedArc {
    pub ends: [(usize, Tag); 2],
}

impl TaggedArc {
    fn normalized(self) -> Self {
        let [a, b] = self.ends;
        TaggedArc { ends: if a <= b { [a, b] } else { [b, a] } }
    }
}

/// Position of an arc inside the triangles containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadrilateral {
    /// Sides following the arc clockwise, one per containing triangle.
    pub plus: Vec<Side>,
    /// Sides preceding the arc clockwise.
    pub minus: Vec<Side>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArcLocalConfig {
    Generic(Quadrilateral),
    LoopOf1SelfFolded { radius: usize, puncture: usize },
    RadiusOf1SelfFolded { loop_side: Side, puncture: usize },
    RadiusOfOncePunctured1Bigon { partner: usize, puncture: usize },
    RadiusOfMSelfFolded { m: u32, loop_side: Side, puncture: usize },
    /// Loop around an orbifold point; `alpha`, `beta` are the other sides of
    /// the adjacent triangle. `doubled` marks the two-arc sphere where the
    /// adjacent triangle is self-folded with an isotropy-1 end.
    OrbifoldLoop { alpha: Side, beta: Side, doubled: bool },
    SphereOneMPunctureTwoOrbifoldPoints { m: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangulation {
    pub points: Vec<PointKind>,
    pub orbifold_points: usize,
    /// Boundary segments as (from, to) in the clockwise traversal of their
    /// triangle.
    pub boundary: Vec<[usize; 2]>,
    /// Ideal endpoints of each arc; loops have equal ends.
    pub arcs: Vec<[usize; 2]>,
    pub triangles: Vec<Triangle>,
    /// Notch flag per marked point (only punctures may be flagged).
    pub notched: Vec<bool>,
}

pub(crate) type Triple = ([Side; 3], [usize; 3]);

impl Triangulation {
    pub fn new(
        points: Vec<PointKind>,
        orbifold_points: usize,
        boundary: Vec<[usize; 2]>,
        arcs: Vec<[usize; 2]>,
        triangles: Vec<Triangle>,
    ) -> Self {
        let notched = vec![false; points.len()];
        let mut t = Triangulation { points, orbifold_points, boundary, arcs, triangles, notched };
        t.normalize();
        t
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn isotropy(&self, v: usize) -> u32 {
        self.points[v].isotropy()
    }

    /// Canonical rotation and order of triangles.
    pub(crate) fn normalize(&mut self) {
        for t in &mut self.triangles {
            if let Triangle::Standard { sides, corners } = *t {
                *t = canonical_standard(sides, corners);
            }
        }
        self.triangles.sort();
        for a in &mut self.arcs {
            a.sort_unstable();
        }
    }

    fn other_end(&self, arc: usize, v: usize) -> usize {
        let [x, y] = self.arcs[arc];
        if x == v {
            y
        } else {
            x
        }
    }

    /// Standard-like view: a self-folded triangle reads as (loop, radius,
    /// radius) with corners (base, puncture, base).
    pub(crate) fn triple(&self, ti: usize) -> Option<Triple> {
        match self.triangles[ti] {
            Triangle::Standard { sides, corners } => Some((sides, corners)),
            Triangle::SelfFolded { loop_side, radius, puncture } => {
                let q = self.other_end(radius, puncture);
                Some(([loop_side, Side::Arc(radius), Side::Arc(radius)], [q, puncture, q]))
            }
            Triangle::Orbifold { .. } => None,
        }
    }

    /// (triangle, position) pairs where `arc` occurs in a triple view.
    fn triple_slots(&self, arc: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for ti in 0..self.triangles.len() {
            if let Some((sides, _)) = self.triple(ti) {
                for (pos, s) in sides.iter().enumerate() {
                    if *s == Side::Arc(arc) {
                        out.push((ti, pos));
                    }
                }
            }
        }
        out
    }

    pub(crate) fn orbifold_triangles_of(&self, arc: usize) -> Vec<usize> {
        (0..self.triangles.len())
            .filter(|&ti| matches!(self.triangles[ti], Triangle::Orbifold { loop_arc, .. } if loop_arc == arc))
            .collect()
    }

    /// The self-folded triangle having `arc` as loop or radius.
    fn self_folded_of(&self, arc: usize) -> Option<(Side, usize, usize)> {
        self.triangles.iter().find_map(|t| match *t {
            Triangle::SelfFolded { loop_side, radius, puncture }
                if loop_side == Side::Arc(arc) || radius == arc =>
            {
                Some((loop_side, radius, puncture))
            }
            _ => None,
        })
    }

    /// Bar partner: the other arc of a self-folded triangle of isotropy 1.
    pub fn bar(&self, arc: usize) -> Option<usize> {
        let (l, r, p) = self.self_folded_of(arc)?;
        if self.isotropy(p) != 1 {
            return None;
        }
        let l = l.arc()?;
        Some(if l == arc { r } else { l })
    }

    /// Number of arc ends at `v` (a loop counts twice).
    pub fn degree(&self, v: usize) -> usize {
        self.arcs.iter().map(|e| e.iter().filter(|&&x| x == v).count()).sum()
    }

    fn tag_at(&self, v: usize) -> Tag {
        if self.notched[v] {
            Tag::Notched
        } else {
            Tag::Plain
        }
    }

    /// Tags of the ideal endpoints as written in files: the radius end of a
    /// self-folded triangle of isotropy 1 with an arc loop is plain, every
    /// other end follows its point's flag.
    pub fn ideal_tags(&self, arc: usize) -> [Tag; 2] {
        let [x, y] = self.arcs[arc];
        let exempt = |v: usize| {
            matches!(self.self_folded_of(arc), Some((Side::Arc(_), r, p)) if r == arc && p == v && self.isotropy(p) == 1)
        };
        let t = |v: usize| if exempt(v) { Tag::Plain } else { self.tag_at(v) };
        [t(x), t(y)]
    }

    /// ι applied arc by arc.
    pub fn tagged_arcs(&self) -> Vec<TaggedArc> {
        (0..self.arcs.len()).map(|a| self.tagged_arc(a)).collect()
    }

    pub fn tagged_arc(&self, arc: usize) -> TaggedArc {
        if let Some((Side::Arc(l), r, p)) = self.self_folded_of(arc) {
            if self.isotropy(p) == 1 {
                let q = self.other_end(r, p);
                let pt = if l == arc { Tag::Notched } else { Tag::Plain };
                return TaggedArc { ends: [(q, self.tag_at(q)), (p, pt)] }.normalized();
            }
        }
        let [x, y] = self.arcs[arc];
        let tags = self.ideal_tags(arc);
        TaggedArc { ends: [(x, tags[0]), (y, tags[1])] }.normalized()
    }

    /// τ(T): the same ideal triangulation with every notch flag cleared.
    pub fn tau(&self) -> Triangulation {
        let mut t = self.clone();
        t.notched = vec![false; t.points.len()];
        t
    }

    /// Relabel arcs: arc `i` becomes arc `perm[i]`.
    pub fn relabel_arcs(&self, perm: &[usize]) -> Triangulation {
        let mut arcs = vec![[0, 0]; self.arcs.len()];
        for (i, e) in self.arcs.iter().enumerate() {
            arcs[perm[i]] = *e;
        }
        let mut t = Triangulation {
            arcs,
            triangles: self.triangles.iter().map(|tr| tr.map_arcs(&|a| perm[a])).collect(),
            ..self.clone()
        };
        t.normalize();
        t
    }

    pub fn swap_arc_ids(&self, a: usize, b: usize) -> Triangulation {
        let perm: Vec<usize> = (0..self.arcs.len())
            .map(|i| if i == a { b } else if i == b { a } else { i })
            .collect();
        self.relabel_arcs(&perm)
    }

    /// Boundary components as lists of marked points, ordered by smallest
    /// member.
    pub fn boundary_components(&self) -> Vec<Vec<usize>> {
        let next: BTreeMap<usize, usize> = self.boundary.iter().map(|&[a, b]| (a, b)).collect();
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in next.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut v = next[&start];
            while v != start && seen.insert(v) {
                comp.push(v);
                v = match next.get(&v) {
                    Some(&w) => w,
                    None => break,
                };
            }
            comps.push(comp);
        }
        comps
    }

    /// Marked points + triangles − arcs − boundary segments.
    pub fn euler_characteristic(&self) -> i64 {
        self.points.len() as i64 + self.triangles.len() as i64
            - self.arcs.len() as i64
            - self.boundary.len() as i64
    }

    /// Descriptor read off the triangulation; genus from the Euler
    /// characteristic.
    pub fn descriptor(&self) -> Result<OrbifoldDescriptor> {
        let comps = self.boundary_components();
        let chi = self.euler_characteristic();
        let twice_g = 2 - comps.len() as i64 - chi;
        if twice_g < 0 || twice_g % 2 != 0 {
            return Err(SurfaceError::Invalid(vec![format!(
                "Euler characteristic {chi} with {} boundary components gives no genus",
                comps.len()
            )]));
        }
        let punctures = self
            .points
            .iter()
            .filter_map(|p| match p {
                PointKind::Puncture { isotropy } => Some(*isotropy),
                PointKind::Boundary => None,
            })
            .collect();
        Ok(OrbifoldDescriptor {
            genus: (twice_g / 2) as u32,
            boundaries: comps.iter().map(Vec::len).collect(),
            punctures,
            orbifold_points: self.orbifold_points,
        })
    }

    /// All structural violations, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let np = self.points.len();
        if self.notched.len() != np {
            v.push(format!("notched has {} entries for {np} points", self.notched.len()));
            return v;
        }
        for (i, p) in self.points.iter().enumerate() {
            if let PointKind::Puncture { isotropy: 0 } = p {
                v.push(format!("points[{i}]: isotropy 0"));
            }
            if self.notched[i] && !p.is_puncture() {
                v.push(format!("points[{i}]: notched tag at a boundary point"));
            }
        }
        for (i, e) in self.arcs.iter().enumerate() {
            if e.iter().any(|&x| x >= np) {
                v.push(format!("arcs[{i}]: endpoint out of range"));
            }
        }
        for (i, e) in self.boundary.iter().enumerate() {
            if e.iter().any(|&x| x >= np) {
                v.push(format!("boundary[{i}]: endpoint out of range"));
            } else if e.iter().any(|&x| self.points[x].is_puncture()) {
                v.push(format!("boundary[{i}]: endpoint is a puncture"));
            }
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.is_puncture() {
                let outs = self.boundary.iter().filter(|e| e[0] == i).count();
                let ins = self.boundary.iter().filter(|e| e[1] == i).count();
                if outs != 1 || ins != 1 {
                    v.push(format!("points[{i}]: boundary point on {outs} outgoing and {ins} incoming segments"));
                }
            }
        }
        if !v.is_empty() {
            return v;
        }
        // Slot counts.
        let mut arc_slots = vec![0usize; self.arcs.len()];
        let mut seg_slots = vec![0usize; self.boundary.len()];
        let mut orb_used = vec![0usize; self.orbifold_points];
        let mut count_side = |s: Side, k: usize, v: &mut Vec<String>, ti: usize| match s {
            Side::Arc(a) if a < arc_slots.len() => arc_slots[a] += k,
            Side::Boundary(b) if b < seg_slots.len() => seg_slots[b] += k,
            _ => v.push(format!("triangles[{ti}]: unknown side {s}")),
        };
        for (ti, t) in self.triangles.iter().enumerate() {
            match *t {
                Triangle::Standard { sides, corners } => {
                    for s in sides {
                        count_side(s, 1, &mut v, ti);
                    }
                    if sides[0] == sides[1] || sides[1] == sides[2] || sides[0] == sides[2] {
                        v.push(format!("triangles[{ti}]: repeated side in a standard triangle"));
                    }
                    if corners.iter().any(|&c| c >= np) {
                        v.push(format!("triangles[{ti}]: corner out of range"));
                    }
                }
                Triangle::SelfFolded { loop_side, radius, puncture } => {
                    count_side(loop_side, 1, &mut v, ti);
                    count_side(Side::Arc(radius), 2, &mut v, ti);
                    if puncture >= np || !self.points[puncture].is_puncture() {
                        v.push(format!("triangles[{ti}]: self-folded triangle must enclose a puncture"));
                    }
                }
                Triangle::Orbifold { loop_arc, point } => {
                    count_side(Side::Arc(loop_arc), 1, &mut v, ti);
                    if point < orb_used.len() {
                        orb_used[point] += 1;
                    } else {
                        v.push(format!("triangles[{ti}]: orbifold point {point} out of range"));
                    }
                }
            }
        }
        for (a, &c) in arc_slots.iter().enumerate() {
            if c != 2 {
                v.push(format!("arcs[{a}]: used in {c} triangle sides, expected 2"));
            }
        }
        for (b, &c) in seg_slots.iter().enumerate() {
            if c != 1 {
                v.push(format!("boundary[{b}]: used in {c} triangle sides, expected 1"));
            }
        }
        for (o, &c) in orb_used.iter().enumerate() {
            if c != 1 {
                v.push(format!("orbifold point {o}: in {c} orbifold triangles, expected 1"));
            }
        }
        if !v.is_empty() {
            return v;
        }
        // Endpoints, orientation and self-folded structure.
        let ends = |s: Side| match s {
            Side::Arc(a) => self.arcs[a],
            Side::Boundary(b) => self.boundary[b],
        };
        let mut traversals: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            match *t {
                Triangle::Standard { sides, corners } => {
                    for i in 0..3 {
                        let from = corners[(i + 2) % 3];
                        let to = corners[i];
                        let mut want = [from, to];
                        want.sort_unstable();
                        let mut have = ends(sides[i]);
                        have.sort_unstable();
                        if have != want {
                            v.push(format!("triangles[{ti}]: side {} does not join corners {from} and {to}", sides[i]));
                        }
                        match sides[i] {
                            Side::Arc(a) => traversals.entry(a).or_default().push((from, to)),
                            Side::Boundary(b) => {
                                if self.boundary[b] != [from, to] {
                                    v.push(format!("triangles[{ti}]: boundary b{b} traversed against its direction"));
                                }
                            }
                        }
                    }
                }
                Triangle::SelfFolded { loop_side, radius, puncture } => {
                    let le = ends(loop_side);
                    if le[0] != le[1] {
                        v.push(format!("triangles[{ti}]: self-folded loop {loop_side} is not a loop"));
                    }
                    if !self.arcs[radius].contains(&puncture) || self.arcs[radius].contains(&le[0]) == false {
                        v.push(format!("triangles[{ti}]: radius a{radius} must join the loop base to the puncture"));
                    }
                    if self.degree(puncture) != 1 {
                        v.push(format!("triangles[{ti}]: enclosed puncture {puncture} meets other arcs"));
                    }
                }
                Triangle::Orbifold { loop_arc, .. } => {
                    if self.arcs[loop_arc][0] != self.arcs[loop_arc][1] {
                        v.push(format!("triangles[{ti}]: orbifold loop a{loop_arc} is not a loop"));
                    }
                }
            }
        }
        for (a, tr) in traversals {
            if tr.len() == 2 && self.arcs[a][0] != self.arcs[a][1] && tr[0] == tr[1] {
                v.push(format!("arcs[{a}]: both triangles traverse it in the same direction"));
            }
        }
        // Notch flags at punctures enclosed by an arc loop of isotropy 1,
        // unless that loop also encloses an orbifold point.
        for t in &self.triangles {
            if let Triangle::SelfFolded { loop_side: Side::Arc(l), puncture, .. } = *t {
                if self.isotropy(puncture) == 1
                    && self.notched[puncture]
                    && self.orbifold_triangles_of(l).is_empty()
                {
                    v.push(format!("points[{puncture}]: flag must be clear inside a self-folded triangle"));
                }
            }
        }
        v
    }

    /// Full validation against a descriptor.
    pub fn validate(&self, d: &OrbifoldDescriptor) -> Vec<String> {
        let mut v = self.violations();
        if !v.is_empty() {
            return v;
        }
        if let Err(e) = d.check() {
            v.push(e.to_string());
            return v;
        }
        match d.rank() {
            Ok(n) if n != self.arcs.len() => {
                v.push(format!("rank {n} of the descriptor but {} arcs", self.arcs.len()))
            }
            _ => {}
        }
        let chi = self.euler_characteristic();
        if chi != d.euler_characteristic() {
            v.push(format!(
                "Euler characteristic {chi} from the triangulation, {} from the descriptor",
                d.euler_characteristic()
            ));
        }
        match self.descriptor() {
            Ok(own) if own.normalized() != d.normalized() => {
                v.push(format!("triangulation has type {own:?}, descriptor says {d:?}"))
            }
            Err(e) => v.push(e.to_string()),
            _ => {}
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SurfaceError::Invalid(v))
        }
    }

    pub fn classify_arc(&self, k: usize) -> Result<ArcLocalConfig> {
        if k >= self.arcs.len() {
            return Err(SurfaceError::UnknownArc(k));
        }
        let orb = self.orbifold_triangles_of(k);
        if orb.len() == 2 {
            return Ok(ArcLocalConfig::SphereOneMPunctureTwoOrbifoldPoints { m: self.isotropy(self.arcs[k][0]) });
        }
        if orb.len() == 1 {
            let (ti, pos) = self.triple_slots(k)[0];
            let (sides, corners) = self.triple(ti).expect("triple");
            let alpha = sides[(pos + 1) % 3];
            let beta = sides[(pos + 2) % 3];
            let a = self.arcs[k][0];
            let b = corners[(pos + 1) % 3];
            let doubled = alpha == beta && (self.isotropy(a) == 1 || self.isotropy(b) == 1);
            return Ok(ArcLocalConfig::OrbifoldLoop { alpha, beta, doubled });
        }
        if let Some((loop_side, radius, puncture)) = self.self_folded_of(k) {
            let m = self.isotropy(puncture);
            if radius == k {
                return Ok(if m == 1 {
                    ArcLocalConfig::RadiusOf1SelfFolded { loop_side, puncture }
                } else {
                    ArcLocalConfig::RadiusOfMSelfFolded { m, loop_side, puncture }
                });
            }
            if m == 1 {
                return Ok(ArcLocalConfig::LoopOf1SelfFolded { radius, puncture });
            }
        }
        if let Some((partner, puncture)) = self.punctured_bigon_partner(k) {
            return Ok(ArcLocalConfig::RadiusOfOncePunctured1Bigon { partner, puncture });
        }
        Ok(ArcLocalConfig::Generic(self.quadrilateral(k)))
    }

    fn punctured_bigon_partner(&self, k: usize) -> Option<(usize, usize)> {
        let [x, y] = self.arcs[k];
        if x == y {
            return None;
        }
        for a in [x, y] {
            if !self.points[a].is_puncture() || self.isotropy(a) != 1 || self.degree(a) != 2 {
                continue;
            }
            let partner = (0..self.arcs.len()).find(|&j| j != k && self.arcs[j].contains(&a))?;
            if self.arcs[partner][0] == self.arcs[partner][1] {
                continue;
            }
            let slots = self.triple_slots(k);
            let both = slots.iter().all(|&(ti, _)| {
                matches!(self.triangles[ti], Triangle::Standard { sides, .. } if sides.contains(&Side::Arc(partner)))
            });
            if slots.len() == 2 && both {
                return Some((partner, a));
            }
        }
        None
    }

    pub fn quadrilateral(&self, k: usize) -> Quadrilateral {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (ti, pos) in self.triple_slots(k) {
            let (sides, _) = self.triple(ti).expect("triple");
            let p = sides[(pos + 1) % 3];
            let m = sides[(pos + 2) % 3];
            if p != Side::Arc(k) {
                plus.push(p);
            }
            if m != Side::Arc(k) {
                minus.push(m);
            }
        }
        Quadrilateral { plus, minus }
    }

    /// Flip of the tagged arc `k`, reusing its id for the replacement.
    pub fn flip(&self, k: usize) -> Result<Triangulation> {
        let mut t = match self.classify_arc(k)? {
            ArcLocalConfig::SphereOneMPunctureTwoOrbifoldPoints { .. } => {
                let mut t = self.clone();
                let p = t.arcs[k][0];
                t.notched[p] = !t.notched[p];
                t
            }
            ArcLocalConfig::RadiusOfMSelfFolded { puncture, .. } => {
                let mut t = self.clone();
                t.notched[puncture] = !t.notched[puncture];
                t
            }
            ArcLocalConfig::RadiusOf1SelfFolded { loop_side: Side::Boundary(_), puncture } => {
                // Once-punctured monogon: plain and notched radius alternate.
                let mut t = self.clone();
                t.notched[puncture] = !t.notched[puncture];
                t
            }
            ArcLocalConfig::RadiusOf1SelfFolded { loop_side: Side::Arc(l), puncture }
                if !self.orbifold_triangles_of(l).is_empty() =>
            {
                // The loop also encloses an orbifold point, so it is not the
                // notched partner of the radius: only the tag changes.
                let mut t = self.clone();
                t.notched[puncture] = !t.notched[puncture];
                t
            }
            ArcLocalConfig::RadiusOf1SelfFolded { loop_side: Side::Arc(l), puncture } => {
                // The radius is the plain member of the tagged pair: flipping
                // it is the ideal flip of the loop followed by notching.
                let swapped = self.swap_arc_ids(k, l);
                let mut t = swapped.ideal_flip(k)?;
                t.notched[puncture] = true;
                t
            }
            ArcLocalConfig::OrbifoldLoop { .. } => self.reenclose(k),
            _ => self.ideal_flip(k)?,
        };
        t.fold_notched_pairs();
        t.normalize();
        Ok(t)
    }

    /// Quadrilateral diagonal swap, or re-enclosing for an orbifold loop.
    fn ideal_flip(&self, k: usize) -> Result<Triangulation> {
        if self.orbifold_triangles_of(k).len() == 1 {
            return Ok(self.reenclose(k));
        }
        let slots = self.triple_slots(k);
        if slots.len() != 2 || slots[0].0 == slots[1].0 {
            return Err(SurfaceError::Invalid(vec![format!("arc a{k} is not a diagonal of a quadrilateral")]));
        }
        let rot = |ti: usize, pos: usize| {
            let (s, c) = self.triple(ti).expect("triple");
            (
                [s[pos], s[(pos + 1) % 3], s[(pos + 2) % 3]],
                [c[pos], c[(pos + 1) % 3], c[(pos + 2) % 3]],
            )
        };
        let ((s1, c1), (s2, c2)) = (rot(slots[0].0, slots[0].1), rot(slots[1].0, slots[1].1));
        let (a, b, r) = (s1[1], s1[2], c1[1]);
        let (c, d, s) = (s2[1], s2[2], c2[1]);
        let n1 = self.make_triangle([Side::Arc(k), b, c], [r, c1[2], s]);
        let n2 = self.make_triangle([Side::Arc(k), d, a], [s, c2[2], r]);
        let mut t = self.clone();
        t.triangles[slots[0].0] = n1;
        t.triangles[slots[1].0] = n2;
        t.arcs[k] = [r, s];
        Ok(t)
    }

    /// Triangle from a clockwise triple, folding a repeated side.
    pub(crate) fn make_triangle(&self, sides: [Side; 3], corners: [usize; 3]) -> Triangle {
        for i in 0..3 {
            let j = (i + 1) % 3;
            if sides[i] == sides[j] {
                let loop_side = sides[(i + 2) % 3];
                let radius = sides[i].arc().expect("repeated side is an arc");
                return Triangle::SelfFolded { loop_side, radius, puncture: corners[i] };
            }
        }
        Triangle::Standard { sides, corners }
    }

    /// Move the loop around an orbifold point to the other corner of the
    /// adjacent triangle.
    fn reenclose(&self, k: usize) -> Triangulation {
        let (ti, pos) = self.triple_slots(k)[0];
        let (sides, corners) = self.triple(ti).expect("triple");
        let alpha = sides[(pos + 1) % 3];
        let beta = sides[(pos + 2) % 3];
        let a = corners[pos];
        let b = corners[(pos + 1) % 3];
        let mut t = self.clone();
        t.triangles[ti] = self.make_triangle([Side::Arc(k), beta, alpha], [b, a, b]);
        t.arcs[k] = [b, b];
        t
    }

    /// Where a new self-folded triangle of isotropy 1 encloses a flagged
    /// puncture, the notched member of the pair is the loop: exchange loop
    /// and radius ids and clear the flag.
    fn fold_notched_pairs(&mut self) {
        loop {
            let hit = self.triangles.iter().find_map(|t| match *t {
                Triangle::SelfFolded { loop_side: Side::Arc(l), radius, puncture }
                    if self.isotropy(puncture) == 1
                        && self.notched[puncture]
                        && self.orbifold_triangles_of(l).is_empty() =>
                {
                    Some((l, radius, puncture))
                }
                _ => None,
            });
            let Some((l, r, p)) = hit else { break };
            let mut t = self.swap_arc_ids(l, r);
            t.notched[p] = false;
            *self = t;
        }
    }

    /// Quiver of a surface triangulation: clockwise successors inside each
    /// non-self-folded triangle, with radii inheriting the arrows of their
    /// loops, and 2-cycles cancelled.
    pub fn quiver(&self) -> Quiver {
        let n = self.arcs.len();
        let mut count = vec![vec![0i64; n]; n];
        let radius_of = |s: Side| -> Vec<usize> {
            let Some(a) = s.arc() else { return Vec::new() };
            let mut v = vec![a];
            for t in &self.triangles {
                if let Triangle::SelfFolded { loop_side, radius, .. } = *t {
                    if loop_side == Side::Arc(a) {
                        v.push(radius);
                    }
                }
            }
            v
        };
        for t in &self.triangles {
            if let Triangle::Standard { sides, .. } = *t {
                for i in 0..3 {
                    for &x in &radius_of(sides[i]) {
                        for &y in &radius_of(sides[(i + 1) % 3]) {
                            count[x][y] += 1;
                        }
                    }
                }
            }
        }
        let mut arrows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let net = count[i][j] - count[j][i];
                for _ in 0..net.max(0) {
                    arrows.push((i, j));
                }
            }
        }
        Quiver::new(n, &arrows).expect("in range")
    }

    /// Serialization invariant under triangle order, used for seed keys.
    pub fn key_string(&self) -> String {
        let mut s = String::new();
        for (i, e) in self.arcs.iter().enumerate() {
            s.push_str(&format!("{i}:{}-{};", e[0], e[1]));
        }
        s.push('|');
        for t in &self.triangles {
            match t {
                Triangle::Standard { sides, corners } => s.push_str(&format!(
                    "S{}{}{}@{},{},{};",
                    sides[0], sides[1], sides[2], corners[0], corners[1], corners[2]
                )),
                Triangle::SelfFolded { loop_side, radius, puncture } => {
                    s.push_str(&format!("F{loop_side},a{radius}@{puncture};"))
                }
                Triangle::Orbifold { loop_arc, point } => s.push_str(&format!("O a{loop_arc}@{point};")),
            }
        }
        s.push('|');
        for (i, &f) in self.notched.iter().enumerate() {
            if f {
                s.push_str(&format!("{i},"));
            }
        }
        s
    }
}

/// Images of arcs and marked points under a candidate automorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSymmetry {
    pub arcs: Vec<usize>,
    pub points: Vec<usize>,
}

/// τ on a list of tagged arcs: a notched end whose arc has a plain partner
/// (same endpoints, other tag there) becomes the loop at the far end.
pub fn tau_arcs(tagged: &[TaggedArc]) -> Vec<[usize; 2]> {
    tagged
        .iter()
        .map(|t| {
            for i in 0..2 {
                let (p, tag) = t.ends[i];
                let (q, qt) = t.ends[1 - i];
                if tag == Tag::Notched {
                    let partner = TaggedArc { ends: [(q, qt), (p, Tag::Plain)] }.normalized();
                    if tagged.contains(&partner) {
                        return [q, q];
                    }
                }
            }
            let mut e = [t.ends[0].0, t.ends[1].0];
            e.sort_unstable();
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::quiver::ExchangeMatrix;

    #[test]
    fn rank_examples() {
        let sphere = OrbifoldDescriptor::new(0, vec![], vec![5], 2).unwrap();
        assert_eq!(sphere.rank().unwrap(), 1);
        assert_eq!(OrbifoldDescriptor::new(0, vec![5], vec![], 0).unwrap().rank().unwrap(), 2);
        assert_eq!(OrbifoldDescriptor::new(0, vec![4], vec![1], 0).unwrap().rank().unwrap(), 4);
        assert!(matches!(
            OrbifoldDescriptor { genus: 0, boundaries: vec![2], punctures: vec![], orbifold_points: 0 }.rank(),
            Err(SurfaceError::DegenerateSurface(-1))
        ));
    }

    #[test]
    fn excluded_surfaces() {
        for p in 1..=3 {
            assert!(OrbifoldDescriptor::new(0, vec![], vec![1; p], 0).is_err());
        }
        assert!(OrbifoldDescriptor::new(0, vec![], vec![1; 4], 0).is_ok());
        assert!(OrbifoldDescriptor::new(0, vec![3], vec![], 0).is_err());
        assert!(OrbifoldDescriptor::new(0, vec![2], vec![], 1).is_ok());
        assert!(OrbifoldDescriptor::new(0, vec![1], vec![1], 0).is_ok());
        assert!(OrbifoldDescriptor::new(0, vec![0], vec![1], 0).is_err());
        assert_eq!(OrbifoldDescriptor::new(1, vec![], vec![1], 0).unwrap().euler_characteristic(), 0);
    }

    #[test]
    fn euler_characteristic_examples() {
        let sq = fixtures::polygon(4);
        assert_eq!(sq.euler_characteristic(), 1);
        let sphere = fixtures::sphere_two_punctures_orbifold_point(3, 3);
        assert_eq!(sphere.euler_characteristic(), 2);
        let tri = fixtures::triangle_orbifold_point();
        assert_eq!(tri.euler_characteristic(), 1);
        let torus = fixtures::once_punctured_torus();
        assert_eq!(torus.euler_characteristic(), 0);
    }

    #[test]
    fn validation_catches_errors() {
        let hex = fixtures::hexagon_central_triangle();
        assert!(hex.validate(&OrbifoldDescriptor::new(0, vec![6], vec![], 0).unwrap()).is_empty());
        // Replace a boundary side by an arc already used twice.
        let mut bad = hex.clone();
        let ti = bad
            .triangles
            .iter()
            .position(|t| matches!(t, Triangle::Standard { sides, .. } if !sides.contains(&Side::Arc(0)) && sides.iter().any(|s| s.arc().is_none())))
            .unwrap();
        if let Triangle::Standard { sides, .. } = &mut bad.triangles[ti] {
            let j = sides.iter().position(|s| s.arc().is_none()).unwrap();
            sides[j] = Side::Arc(0);
        }
        let v = bad.violations();
        assert!(v.iter().any(|m| m.contains("expected 2")), "{v:?}");
        let mut notched = hex.clone();
        notched.notched[0] = true;
        assert!(notched.violations().iter().any(|m| m.contains("boundary point")));
        let wrong = hex.validate(&OrbifoldDescriptor::new(0, vec![7], vec![], 0).unwrap());
        assert!(!wrong.is_empty());
    }

    #[test]
    fn reversed_orientation_detected() {
        let sq = fixtures::polygon(4);
        let mut bad = sq.clone();
        if let Triangle::Standard { sides, corners } = bad.triangles[0] {
            bad.triangles[0] = Triangle::Standard {
                sides: [sides[0], sides[2], sides[1]],
                corners: [corners[1], corners[0], corners[2]],
            };
        }
        assert!(!bad.violations().is_empty());
    }

    #[test]
    fn classification_examples() {
        let sf = fixtures::once_punctured_bigon_self_folded();
        let loop_arc = sf
            .triangles
            .iter()
            .find_map(|t| match t {
                Triangle::SelfFolded { loop_side: Side::Arc(l), .. } => Some(*l),
                _ => None,
            })
            .unwrap();
        assert!(matches!(sf.classify_arc(loop_arc).unwrap(), ArcLocalConfig::LoopOf1SelfFolded { .. }));
        let s = fixtures::sphere_one_puncture_two_orbifold_points(3);
        assert_eq!(
            s.classify_arc(0).unwrap(),
            ArcLocalConfig::SphereOneMPunctureTwoOrbifoldPoints { m: 3 }
        );
        let bigon = fixtures::punctured_m_bigon(2);
        let flipped = bigon.flip(0).unwrap();
        let radius = (0..2)
            .find(|&a| matches!(flipped.classify_arc(a).unwrap(), ArcLocalConfig::RadiusOfMSelfFolded { m: 2, .. }));
        assert!(radius.is_some());
        assert!(matches!(
            fixtures::punctured_m_bigon(1).classify_arc(0).unwrap(),
            ArcLocalConfig::RadiusOfOncePunctured1Bigon { .. }
        ));
    }

    #[test]
    fn quiver_examples() {
        let hex = fixtures::hexagon_central_triangle();
        let b = ExchangeMatrix::from_quiver(&hex.quiver());
        let cyc = ExchangeMatrix::new(vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]]).unwrap();
        assert!(b == cyc || b == cyc.mutate(0).unwrap().mutate(0).unwrap().permuted(&[0, 2, 1]));
        assert!((0..3).all(|i| (0..3).filter(|&j| b.get(i, j) == 1).count() == 1));
        let ps = fixtures::punctured_polygon(4);
        let b = ExchangeMatrix::from_quiver(&ps.quiver());
        assert!((0..4).all(|i| (0..4).filter(|&j| b.get(i, j) == 1).count() == 1
            && (0..4).filter(|&j| b.get(i, j) == -1).count() == 1
            && (0..4).filter(|&j| b.get(i, j) != 0).count() == 2));
        let pent = fixtures::polygon(5);
        assert_eq!(pent.quiver().arrows.len(), 1);
    }

    #[test]
    fn pentagon_five_flips_return() {
        let t = fixtures::polygon(5);
        let mut cur = t.clone();
        for step in 0..5 {
            cur = cur.flip(step % 2).unwrap();
            assert!(cur.violations().is_empty());
        }
        // Five alternating flips realize the pentagon relation up to swapping
        // the two ids.
        assert_eq!(cur, t.swap_arc_ids(0, 1));
    }

    #[test]
    fn bigon_flip_cycle_returns() {
        // Isotropy 1 gives the square exchange graph of type A1×A1.
        for m in 1..=4 {
            let period = if m == 1 { 4 } else { 6 };
            let t = fixtures::punctured_m_bigon(m);
            let mut cur = t.clone();
            for step in 0..period {
                cur = cur.flip(step % 2).unwrap();
                assert!(cur.violations().is_empty(), "{:?}", cur.violations());
                if step < period - 1 {
                    assert_ne!(cur, t);
                }
            }
            assert_eq!(cur, t, "m = {m}");
        }
    }

    #[test]
    fn flips_are_involutions_on_all_fixtures() {
        for (name, t, d) in fixtures::all_triangulations() {
            assert!(t.validate(&d).is_empty(), "{name}: {:?}", t.validate(&d));
            for k in 0..t.n_arcs() {
                let f = t.flip(k).unwrap();
                assert!(f.validate(&d).is_empty(), "{name} flip {k}: {:?}", f.validate(&d));
                assert_eq!(f.flip(k).unwrap(), t, "{name} arc {k}");
            }
        }
    }

    #[test]
    fn flip_commutes_with_quiver_mutation() {
        for (name, t, _) in fixtures::all_triangulations() {
            if t.orbifold_points > 0 || t.points.iter().any(|p| p.isotropy() > 1) {
                continue;
            }
            let b = ExchangeMatrix::from_quiver(&t.quiver());
            for k in 0..t.n_arcs() {
                let fb = ExchangeMatrix::from_quiver(&t.flip(k).unwrap().quiver());
                assert_eq!(fb, b.mutate(k).unwrap(), "{name} arc {k}");
            }
        }
    }

    #[test]
    fn tau_iota_round_trip() {
        for (name, t, _) in fixtures::all_triangulations() {
            let ideal = t.tau();
            let back = tau_arcs(&ideal.tagged_arcs());
            assert_eq!(back, ideal.arcs, "{name}");
        }
        let sf = fixtures::once_punctured_bigon_self_folded();
        let tagged = sf.tagged_arcs();
        assert!(tagged.iter().any(|a| a.ends.iter().any(|e| e.1 == Tag::Notched)));
        let plain = fixtures::polygon(5);
        assert!(plain.tagged_arcs().iter().all(|a| a.ends.iter().all(|e| e.1 == Tag::Plain)));
        assert_eq!(tau_arcs(&plain.tagged_arcs()), plain.arcs);
    }

    #[test]
    fn side_text() {
        assert_eq!("a12".parse::<Side>().unwrap(), Side::Arc(12));
        assert_eq!(Side::Boundary(3).to_string(), "b3");
        assert!("c1".parse::<Side>().is_err());
        assert!("".parse::<Side>().is_err());
    }
}
