//! Quivers, exchange matrices, automorphism groups and orbit quivers.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::OrbitMap;

/// Default bound on the order of a generated group.
pub const DEFAULT_GROUP_CAP: usize = 10080;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("group closure exceeds cap {0}")]
    ClosureTooLarge(usize),
    #[error("group element {element} fixes vertex {vertex}")]
    NotAdmissible { element: usize, vertex: usize },
    #[error("matrix parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, QuiverError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: usize,
    pub src: usize,
    pub tgt: usize,
}

/// A finite quiver. Arrow ids coincide with their position in `arrows`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub nvertices: usize,
    pub arrows: Vec<Arrow>,
    #[serde(default)]
    pub vertex_labels: Vec<String>,
    #[serde(default)]
    pub arrow_labels: Vec<String>,
}

impl Quiver {
    pub fn new(nvertices: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        let arrows = arrows
            .iter()
            .enumerate()
            .map(|(id, &(src, tgt))| Arrow { id, src, tgt })
            .collect();
        let q = Quiver {
            nvertices,
            arrows,
            vertex_labels: Vec::new(),
            arrow_labels: Vec::new(),
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_labels(mut self, vertices: &[&str], arrows: &[&str]) -> Result<Self> {
        if vertices.len() != self.nvertices || arrows.len() != self.arrows.len() {
            return Err(QuiverError::InvalidQuiver("label count mismatch".into()));
        }
        self.vertex_labels = vertices.iter().map(|s| s.to_string()).collect();
        self.arrow_labels = arrows.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (pos, a) in self.arrows.iter().enumerate() {
            if a.id != pos {
                return Err(QuiverError::InvalidQuiver(format!(
                    "arrow at position {pos} has id {}",
                    a.id
                )));
            }
            if a.src >= self.nvertices || a.tgt >= self.nvertices {
                return Err(QuiverError::InvalidQuiver(format!("arrow {pos} endpoint out of range")));
            }
        }
        for labels in [&self.vertex_labels, &self.arrow_labels] {
            let set: HashSet<&String> = labels.iter().collect();
            if set.len() != labels.len() {
                return Err(QuiverError::InvalidQuiver("duplicate labels".into()));
            }
        }
        Ok(())
    }

    pub fn vertex_label(&self, v: usize) -> String {
        self.vertex_labels.get(v).cloned().unwrap_or_else(|| v.to_string())
    }

    pub fn arrow_label(&self, a: usize) -> String {
        self.arrow_labels.get(a).cloned().unwrap_or_else(|| format!("a{a}"))
    }

    pub fn arrow_by_label(&self, label: &str) -> Option<usize> {
        (0..self.arrows.len()).find(|&a| self.arrow_label(a) == label)
    }

    /// DOT rendering with arrows between the same pair merged into one edge
    /// carrying its multiplicity.
    pub fn to_dot(&self) -> String {
        let mut mult: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for a in &self.arrows {
            *mult.entry((a.src, a.tgt)).or_default() += 1;
        }
        let mut out = String::from("digraph Q {\n");
        for v in 0..self.nvertices {
            let _ = writeln!(out, "  {v} [label=\"{}\"];", self.vertex_label(v));
        }
        for ((s, t), m) in mult {
            if m == 1 {
                let _ = writeln!(out, "  {s} -> {t};");
            } else {
                let _ = writeln!(out, "  {s} -> {t} [label=\"{m}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Skew-symmetric integer matrix; `b[i][j]` counts arrows i→j minus j→i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    pub b: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(b: Vec<Vec<i64>>) -> Result<Self> {
        let n = b.len();
        if b.iter().any(|r| r.len() != n) {
            return Err(QuiverError::InvalidQuiver("matrix not square".into()));
        }
        let m = ExchangeMatrix { b };
        if !m.is_skew_symmetric() {
            return Err(QuiverError::InvalidQuiver("matrix not skew-symmetric".into()));
        }
        Ok(m)
    }

    pub fn zero(n: usize) -> Self {
        ExchangeMatrix { b: vec![vec![0; n]; n] }
    }

    pub fn from_quiver(q: &Quiver) -> Self {
        let mut b = vec![vec![0i64; q.nvertices]; q.nvertices];
        for a in &q.arrows {
            if a.src != a.tgt {
                b[a.src][a.tgt] += 1;
                b[a.tgt][a.src] -= 1;
            }
        }
        ExchangeMatrix { b }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.b[i][j]
    }

    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.b[i][j] == -self.b[j][i]))
    }

    /// Fomin–Zelevinsky matrix mutation at `k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let n = self.n();
        if k >= n {
            return Err(QuiverError::IndexOutOfRange { index: k, size: n });
        }
        let b = &self.b;
        let mut out = b.clone();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = if i == k || j == k {
                    -b[i][j]
                } else {
                    b[i][j] + b[i][k].signum() * (b[i][k] * b[k][j]).max(0)
                };
            }
        }
        Ok(ExchangeMatrix { b: out })
    }

    /// Conjugate by a relabeling: entry (i, j) of the result is
    /// `b[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        ExchangeMatrix {
            b: (0..n)
                .map(|i| (0..n).map(|j| self.b[perm[i]][perm[j]]).collect())
                .collect(),
        }
    }

    /// Quiver with |b[i][j]| arrows i→j for every positive entry.
    pub fn to_quiver(&self) -> Quiver {
        let mut arrows = Vec::new();
        for (i, row) in self.b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                for _ in 0..v.max(0) {
                    arrows.push((i, j));
                }
            }
        }
        Quiver::new(self.n(), &arrows).expect("in range")
    }

    /// Rows of space-separated integers.
    pub fn to_text(&self) -> String {
        self.b
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let mut b = Vec::new();
        for (line, row) in s.lines().enumerate() {
            if row.trim().is_empty() {
                continue;
            }
            let r: std::result::Result<Vec<i64>, _> =
                row.split_whitespace().map(str::parse).collect();
            b.push(r.map_err(|e| QuiverError::Parse { line: line + 1, msg: e.to_string() })?);
        }
        ExchangeMatrix::new(b)
    }
}

pub fn mutate_quiver(b: &ExchangeMatrix, k: usize) -> Result<ExchangeMatrix> {
    b.mutate(k)
}

/// Permutation of `0..n` stored as its image list.
pub fn compose_perm(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

pub fn invert_perm(f: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; f.len()];
    for (i, &x) in f.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

pub fn is_perm(f: &[usize]) -> bool {
    let mut seen = vec![false; f.len()];
    for &x in f {
        if x >= f.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Elements of a finite permutation group.
pub trait GroupElement: Clone + Eq + Hash {
    /// `self ∘ other`: apply `other` first.
    fn compose(&self, other: &Self) -> Self;
    fn is_identity(&self) -> bool;
}

/// Closure by breadth-first search from `identity`, multiplying by the
/// generators in input order.
pub fn closure<T: GroupElement>(identity: T, gens: &[T], cap: usize) -> Result<Vec<T>> {
    let mut seen: HashSet<T> = HashSet::new();
    let mut out = vec![identity.clone()];
    let mut queue = VecDeque::from([identity.clone()]);
    seen.insert(identity);
    while let Some(e) = queue.pop_front() {
        for g in gens {
            let h = g.compose(&e);
            if seen.insert(h.clone()) {
                if out.len() == cap {
                    return Err(QuiverError::ClosureTooLarge(cap));
                }
                out.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuiverAutomorphism {
    pub vperm: Vec<usize>,
    pub aperm: Vec<usize>,
}

impl QuiverAutomorphism {
    pub fn identity(q: &Quiver) -> Self {
        QuiverAutomorphism {
            vperm: (0..q.nvertices).collect(),
            aperm: (0..q.arrows.len()).collect(),
        }
    }

    pub fn validate(&self, q: &Quiver) -> Result<()> {
        if self.vperm.len() != q.nvertices || !is_perm(&self.vperm) {
            return Err(QuiverError::InvalidAutomorphism("vertex map is not a permutation".into()));
        }
        if self.aperm.len() != q.arrows.len() || !is_perm(&self.aperm) {
            return Err(QuiverError::InvalidAutomorphism("arrow map is not a permutation".into()));
        }
        for a in &q.arrows {
            let b = q.arrows[self.aperm[a.id]];
            if b.src != self.vperm[a.src] || b.tgt != self.vperm[a.tgt] {
                return Err(QuiverError::InvalidAutomorphism(format!(
                    "arrow {} not mapped compatibly",
                    a.id
                )));
            }
        }
        Ok(())
    }

    /// Lift a vertex permutation, pairing parallel arrows in id order.
    pub fn from_vertex_perm(q: &Quiver, vperm: Vec<usize>) -> Result<Self> {
        if vperm.len() != q.nvertices || !is_perm(&vperm) {
            return Err(QuiverError::InvalidAutomorphism("vertex map is not a permutation".into()));
        }
        let mut pool: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for a in q.arrows.iter().rev() {
            pool.entry((a.src, a.tgt)).or_default().push(a.id);
        }
        let mut aperm = Vec::with_capacity(q.arrows.len());
        for a in &q.arrows {
            let img = pool
                .get_mut(&(vperm[a.src], vperm[a.tgt]))
                .and_then(Vec::pop)
                .ok_or_else(|| QuiverError::InvalidAutomorphism(format!("arrow {} has no image", a.id)))?;
            aperm.push(img);
        }
        Ok(QuiverAutomorphism { vperm, aperm })
    }

    pub fn inverse(&self) -> Self {
        QuiverAutomorphism {
            vperm: invert_perm(&self.vperm),
            aperm: invert_perm(&self.aperm),
        }
    }
}

impl GroupElement for QuiverAutomorphism {
    fn compose(&self, other: &Self) -> Self {
        QuiverAutomorphism {
            vperm: compose_perm(&self.vperm, &other.vperm),
            aperm: compose_perm(&self.aperm, &other.aperm),
        }
    }

    fn is_identity(&self) -> bool {
        self.vperm.iter().enumerate().all(|(i, &x)| i == x)
            && self.aperm.iter().enumerate().all(|(i, &x)| i == x)
    }
}

/// A finite group given by its full element list; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroup<T = QuiverAutomorphism> {
    pub elements: Vec<T>,
}

impl<T: GroupElement> PermGroup<T> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> &T {
        &self.elements[0]
    }
}

pub fn group_closure(q: &Quiver, generators: &[QuiverAutomorphism]) -> Result<PermGroup> {
    group_closure_capped(q, generators, DEFAULT_GROUP_CAP)
}

pub fn group_closure_capped(
    q: &Quiver,
    generators: &[QuiverAutomorphism],
    cap: usize,
) -> Result<PermGroup> {
    for g in generators {
        g.validate(q)?;
    }
    let elements = closure(QuiverAutomorphism::identity(q), generators, cap)?;
    Ok(PermGroup { elements })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    /// A non-identity element fixing a vertex.
    FixedVertex { element: usize, vertex: usize },
}

pub fn check_admissible(q: &Quiver, g: &PermGroup) -> Admissibility {
    for (ei, e) in g.elements.iter().enumerate() {
        if e.is_identity() {
            continue;
        }
        if let Some(v) = (0..q.nvertices).find(|&v| e.vperm[v] == v) {
            return Admissibility::FixedVertex { element: ei, vertex: v };
        }
    }
    Admissibility::Admissible
}

/// True when no non-identity element fixes an arrow.
pub fn acts_freely_on_arrows(q: &Quiver, g: &PermGroup) -> bool {
    g.elements
        .iter()
        .filter(|e| !e.is_identity())
        .all(|e| (0..q.arrows.len()).all(|a| e.aperm[a] != a))
}

/// Orbit of every point under a list of permutations, as an orbit map whose
/// target indices are ordered by smallest member.
pub fn orbit_partition<'a, I>(n: usize, perms: I) -> OrbitMap
where
    I: IntoIterator<Item = &'a [usize]> + Clone,
{
    let mut image = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if image[x] != usize::MAX {
            continue;
        }
        for p in perms.clone() {
            image[p[x]] = next;
        }
        image[x] = next;
        next += 1;
    }
    OrbitMap { target_nvars: next, image }
}

/// Representative labels with trailing digits dropped (`α1` becomes `α`),
/// unless that would make two labels collide.
fn orbit_labels(reps: Vec<String>) -> Vec<String> {
    let stripped: Vec<String> =
        reps.iter().map(|l| l.trim_end_matches(|c: char| c.is_ascii_digit()).to_string()).collect();
    let unique: HashSet<&String> = stripped.iter().collect();
    if unique.len() == stripped.len() && stripped.iter().all(|l| !l.is_empty()) {
        stripped
    } else {
        reps
    }
}

/// The orbit quiver Q_G with its vertex and arrow orbit maps. Orbit
/// representatives are the smallest ids.
pub fn orbit_quiver(q: &Quiver, g: &PermGroup) -> Result<(Quiver, OrbitMap, OrbitMap)> {
    if let Admissibility::FixedVertex { element, vertex } = check_admissible(q, g) {
        return Err(QuiverError::NotAdmissible { element, vertex });
    }
    let vmap = orbit_partition(q.nvertices, g.elements.iter().map(|e| e.vperm.as_slice()));
    let amap = orbit_partition(q.arrows.len(), g.elements.iter().map(|e| e.aperm.as_slice()));
    let mut reps = vec![usize::MAX; amap.target_nvars];
    for a in (0..q.arrows.len()).rev() {
        reps[amap.image[a]] = a;
    }
    let arrows: Vec<(usize, usize)> = reps
        .iter()
        .map(|&a| (vmap.image[q.arrows[a].src], vmap.image[q.arrows[a].tgt]))
        .collect();
    let mut qg = Quiver::new(vmap.target_nvars, &arrows)?;
    if !q.vertex_labels.is_empty() {
        let mut vreps = vec![usize::MAX; vmap.target_nvars];
        for v in (0..q.nvertices).rev() {
            vreps[vmap.image[v]] = v;
        }
        qg.vertex_labels = orbit_labels(vreps.iter().map(|&v| q.vertex_label(v)).collect());
    }
    if !q.arrow_labels.is_empty() {
        qg.arrow_labels = orbit_labels(reps.iter().map(|&a| q.arrow_label(a)).collect());
    }
    Ok((qg, vmap, amap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three_cycle() -> Quiver {
        Quiver::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn rotation3() -> QuiverAutomorphism {
        QuiverAutomorphism { vperm: vec![1, 2, 0], aperm: vec![1, 2, 0] }
    }

    #[test]
    fn exchange_matrix_from_quiver_cancels_two_cycles() {
        let q = Quiver::new(2, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(ExchangeMatrix::from_quiver(&q).b, vec![vec![0, 1], vec![-1, 0]]);
    }

    #[test]
    fn mutation_examples() {
        let b = ExchangeMatrix::from_quiver(&Quiver::new(2, &[(0, 1)]).unwrap());
        assert_eq!(b.mutate(0).unwrap().b, vec![vec![0, -1], vec![1, 0]]);
        assert_eq!(b.mutate(0).unwrap().mutate(0).unwrap(), b);
        let c = ExchangeMatrix::from_quiver(&three_cycle());
        // 2->1, 1->3, 3->2 with the 2->3 / 3->2 pair cancelled: zero entry.
        assert_eq!(
            c.mutate(0).unwrap().b,
            vec![vec![0, -1, 1], vec![1, 0, 0], vec![-1, 0, 0]]
        );
        assert!(matches!(c.mutate(3), Err(QuiverError::IndexOutOfRange { .. })));
    }

    #[test]
    fn matrix_text_round_trip() {
        let c = ExchangeMatrix::from_quiver(&three_cycle());
        assert_eq!(c.to_text(), "0 1 -1\n-1 0 1\n1 -1 0");
        assert_eq!(ExchangeMatrix::from_text(&c.to_text()).unwrap(), c);
        assert!(ExchangeMatrix::from_text("0 1\n1 0").is_err());
        assert!(ExchangeMatrix::from_text("0 x").is_err());
    }

    #[test]
    fn dot_merges_multiplicities() {
        let q = Quiver::new(2, &[(0, 1), (0, 1)]).unwrap();
        let dot = q.to_dot();
        assert!(dot.contains("0 -> 1 [label=\"2\"];"));
    }

    #[test]
    fn closure_examples() {
        let q = three_cycle();
        assert_eq!(group_closure(&q, &[]).unwrap().order(), 1);
        let g = group_closure(&q, &[rotation3()]).unwrap();
        assert_eq!(g.order(), 3);
        assert!(g.identity().is_identity());
        assert!(matches!(
            group_closure_capped(&q, &[rotation3()], 2),
            Err(QuiverError::ClosureTooLarge(2))
        ));
        let bad = QuiverAutomorphism { vperm: vec![1, 0, 2], aperm: vec![0, 1, 2] };
        assert!(group_closure(&q, &[bad]).is_err());
    }

    #[test]
    fn admissibility_witness() {
        let q = three_cycle();
        let triv = group_closure(&q, &[]).unwrap();
        assert_eq!(check_admissible(&q, &triv), Admissibility::Admissible);
        // Reflection of the path 0 - 1 - 2 (two arrows into the middle).
        let p = Quiver::new(3, &[(0, 1), (2, 1)]).unwrap();
        let refl = QuiverAutomorphism { vperm: vec![2, 1, 0], aperm: vec![1, 0] };
        let g = group_closure(&p, &[refl]).unwrap();
        assert_eq!(
            check_admissible(&p, &g),
            Admissibility::FixedVertex { element: 1, vertex: 1 }
        );
        assert!(matches!(orbit_quiver(&p, &g), Err(QuiverError::NotAdmissible { .. })));
    }

    #[test]
    fn two_three_cycles_swapped() {
        let q = Quiver::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let swap = QuiverAutomorphism {
            vperm: vec![3, 4, 5, 0, 1, 2],
            aperm: vec![3, 4, 5, 0, 1, 2],
        };
        let g = group_closure(&q, &[swap]).unwrap();
        let (qg, vmap, amap) = orbit_quiver(&q, &g).unwrap();
        assert_eq!(qg.nvertices, 3);
        assert_eq!(ExchangeMatrix::from_quiver(&qg), ExchangeMatrix::from_quiver(&three_cycle()));
        assert_eq!(vmap.image, vec![0, 1, 2, 0, 1, 2]);
        assert_eq!(amap.image, vec![0, 1, 2, 0, 1, 2]);
    }

    #[test]
    fn trivial_group_orbit_quiver_is_copy() {
        let q = three_cycle();
        let g = group_closure(&q, &[]).unwrap();
        let (qg, _, _) = orbit_quiver(&q, &g).unwrap();
        assert_eq!(qg, q);
    }

    fn arb_matrix() -> impl Strategy<Value = ExchangeMatrix> {
        (2usize..6).prop_flat_map(|n| {
            proptest::collection::vec(-3i64..=3, n * (n - 1) / 2).prop_map(move |vals| {
                let mut b = vec![vec![0; n]; n];
                let mut it = vals.into_iter();
                for i in 0..n {
                    for j in i + 1..n {
                        let v = it.next().unwrap();
                        b[i][j] = v;
                        b[j][i] = -v;
                    }
                }
                ExchangeMatrix { b }
            })
        })
    }

    proptest! {
        #[test]
        fn mutation_is_involution_and_skew(b in arb_matrix(), k in 0usize..6) {
            let k = k % b.n();
            let m = b.mutate(k).unwrap();
            prop_assert!(m.is_skew_symmetric());
            prop_assert_eq!(m.mutate(k).unwrap(), b);
        }

        #[test]
        fn orbit_counts_divide(copies in 1usize..5, shift in 0usize..4) {
            // `copies` disjoint 3-cycles permuted cyclically.
            let n = 3 * copies;
            let mut arrows = Vec::new();
            for c in 0..copies {
                for i in 0..3 {
                    arrows.push((3 * c + i, 3 * c + (i + 1) % 3));
                }
            }
            let q = Quiver::new(n, &arrows).unwrap();
            let s = shift % copies.max(1);
            let perm: Vec<usize> = (0..n).map(|v| (v + 3 * s.max(1)) % n).collect();
            let g = group_closure(&q, &[QuiverAutomorphism { vperm: perm.clone(), aperm: perm }]).unwrap();
            let (qg, _, _) = orbit_quiver(&q, &g).unwrap();
            prop_assert_eq!(qg.nvertices * g.order(), n);
            prop_assert_eq!(qg.arrows.len() * g.order(), arrows.len());
            prop_assert!(acts_freely_on_arrows(&q, &g));
        }
    }
}
