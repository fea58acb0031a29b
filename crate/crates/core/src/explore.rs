//! Exchange-graph enumeration: breadth-first search over seeds up to
//! relabeling, the cluster-variable census and graph export.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::LaurentPoly;
use crate::cluster::{ClusterError, OrbifoldSeed, Seed};
use crate::quiver::{invert_perm, ExchangeMatrix};

pub const DEFAULT_CAP: usize = 10000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
}

pub type Result<T> = std::result::Result<T, ExploreError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "cap")]
pub enum Status {
    Finite,
    CapReached(usize),
}

/// Seeds up to relabeling, joined by single mutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeGraph {
    /// Canonical key of every seed, in discovery order.
    pub nodes: Vec<String>,
    /// Sorted cluster labels of every seed (polynomials, or g-vectors when
    /// seeds are keyed by g-vectors).
    pub clusters: Vec<Vec<String>>,
    /// (node, mutation index in the node's stored labeling, node).
    pub edges: Vec<(usize, usize, usize)>,
    /// Canonical serializations of every cluster variable met with its
    /// exact value.
    pub variables: BTreeSet<String>,
    /// g-vectors of all variables, filled in g-vector mode only.
    pub gvectors: BTreeSet<String>,
    pub status: Status,
}

impl ExchangeGraph {
    /// Edges as unordered node pairs with multiplicity, each listed once.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for &(u, _, v) in &self.edges {
            let e = (u.min(v), u.max(v));
            let c = seen.entry(e).or_default();
            *c += 1;
        }
        let mut out = Vec::new();
        let mut keys: Vec<_> = seen.into_iter().collect();
        keys.sort();
        for ((u, v), c) in keys {
            // Each undirected edge is found once from each end.
            for _ in 0..c.div_ceil(2) {
                out.push((u, v));
            }
        }
        out
    }
}

/// A seed that can be enumerated.
pub trait ExplorableSeed: Clone {
    fn rank(&self) -> usize;
    fn mutate_at(&self, k: usize) -> std::result::Result<Self, ClusterError>;
    /// Label of every cluster position; equal labels mean equal variables.
    fn labels(&self) -> Vec<String>;
    /// Serialization of the non-cluster data after moving position
    /// `perm[i]` to position `i`.
    fn shape(&self, perm: &[usize]) -> String;
    /// Exact cluster variables, when known.
    fn variables(&self) -> Option<&[LaurentPoly]>;
}

impl ExplorableSeed for Seed {
    fn rank(&self) -> usize {
        self.cluster.len()
    }

    fn mutate_at(&self, k: usize) -> std::result::Result<Self, ClusterError> {
        self.mutate(k)
    }

    fn labels(&self) -> Vec<String> {
        self.cluster.iter().map(|x| x.to_string()).collect()
    }

    fn shape(&self, perm: &[usize]) -> String {
        self.b.permuted(perm).to_text()
    }

    fn variables(&self) -> Option<&[LaurentPoly]> {
        Some(&self.cluster)
    }
}

impl ExplorableSeed for OrbifoldSeed {
    fn rank(&self) -> usize {
        self.cluster.len()
    }

    fn mutate_at(&self, k: usize) -> std::result::Result<Self, ClusterError> {
        self.mutate(k)
    }

    fn labels(&self) -> Vec<String> {
        self.cluster.iter().map(|x| x.to_string()).collect()
    }

    /// Exchange polynomials in the relabeled positions. Distinct ideal
    /// representations of one tagged triangulation share them.
    fn shape(&self, perm: &[usize]) -> String {
        let n = self.rank();
        let inv = invert_perm(perm);
        let rename: Vec<LaurentPoly> = (0..n).map(|a| LaurentPoly::var(n, inv[a])).collect();
        perm.iter()
            .map(|&old| {
                match self.exchange_polynomial(old).and_then(|p| Ok(p.value.substitute(&rename)?)) {
                    Ok(v) => v.to_string(),
                    Err(_) => self.triangulation.relabel_arcs(&inv).key_string(),
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    fn variables(&self) -> Option<&[LaurentPoly]> {
        Some(&self.cluster)
    }
}

/// Seed of a skew-symmetric cluster algebra tracked by g-vectors and
/// c-vectors with respect to the initial seed; exact variables are carried
/// only up to `exact_depth` mutations from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GVectorSeed {
    /// Exchange matrix with principal framing: rows n..2n hold the
    /// c-vectors.
    pub extended: ExchangeMatrix,
    pub initial_b: ExchangeMatrix,
    pub g: Vec<Vec<i64>>,
    pub depth: usize,
    pub exact_depth: usize,
    pub seed: Option<Seed>,
}

impl GVectorSeed {
    pub fn new(seed: &Seed, exact_depth: usize) -> Self {
        let n = seed.rank();
        let mut ext = vec![vec![0i64; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                ext[i][j] = seed.b.get(i, j);
            }
            ext[n + i][i] = 1;
            ext[i][n + i] = -1;
        }
        GVectorSeed {
            extended: ExchangeMatrix::new(ext).expect("skew-symmetric"),
            initial_b: seed.b.clone(),
            g: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
            depth: 0,
            exact_depth,
            seed: Some(seed.clone()),
        }
    }

    fn n(&self) -> usize {
        self.g.len()
    }

    /// c-vector of position `j`.
    pub fn c_vector(&self, j: usize) -> Vec<i64> {
        let n = self.n();
        (0..n).map(|i| self.extended.get(n + i, j)).collect()
    }
}

fn gvector_label(g: &[i64]) -> String {
    format!("g({})", g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

impl ExplorableSeed for GVectorSeed {
    fn rank(&self) -> usize {
        self.n()
    }

    /// g'_k = −g_k + Σ_i [b_ik]_+ g_i − Σ_j [c_jk]_+ b⁰_j, with the
    /// framing rows mutated as part of the extended matrix.
    fn mutate_at(&self, k: usize) -> std::result::Result<Self, ClusterError> {
        let n = self.n();
        if k >= n {
            return Err(ClusterError::IndexOutOfRange(k));
        }
        let mut gk: Vec<i64> = self.g[k].iter().map(|x| -x).collect();
        for i in 0..n {
            let b = self.extended.get(i, k).max(0);
            for (t, &gi) in gk.iter_mut().zip(&self.g[i]) {
                *t += b * gi;
            }
        }
        for j in 0..n {
            let c = self.extended.get(n + j, k).max(0);
            for (r, t) in gk.iter_mut().enumerate() {
                *t -= c * self.initial_b.get(r, j);
            }
        }
        let mut g = self.g.clone();
        g[k] = gk;
        let depth = self.depth + 1;
        let seed = match &self.seed {
            Some(s) if depth <= self.exact_depth => Some(s.mutate(k)?),
            _ => None,
        };
        Ok(GVectorSeed {
            extended: self.extended.mutate(k)?,
            initial_b: self.initial_b.clone(),
            g,
            depth,
            exact_depth: self.exact_depth,
            seed,
        })
    }

    fn labels(&self) -> Vec<String> {
        self.g.iter().map(|g| gvector_label(g)).collect()
    }

    fn shape(&self, perm: &[usize]) -> String {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.extended.get(perm[i], perm[j]).to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn variables(&self) -> Option<&[LaurentPoly]> {
        self.seed.as_ref().map(|s| s.cluster.as_slice())
    }
}

/// Canonical key: labels sorted, ties broken by the least shape over all
/// orders of equal labels. Returns the key and the chosen order.
pub fn canonical_key<S: ExplorableSeed>(s: &S) -> (String, Vec<usize>) {
    let labels = s.labels();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if labels[g[0]] == labels[i] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut best: Option<(String, Vec<usize>)> = None;
    let mut visit = |perm: Vec<usize>| {
        let shape = s.shape(&perm);
        if best.as_ref().is_none_or(|b| shape < b.0) {
            best = Some((shape, perm));
        }
    };
    for_each_tie_order(&groups, 0, &mut Vec::new(), &mut visit);
    let (shape, perm) = best.expect("at least one order");
    let sorted: Vec<&str> = perm.iter().map(|&i| labels[i].as_str()).collect();
    (format!("{}||{shape}", sorted.join(" ; ")), perm)
}

fn for_each_tie_order(groups: &[Vec<usize>], i: usize, prefix: &mut Vec<usize>, f: &mut impl FnMut(Vec<usize>)) {
    if i == groups.len() {
        f(prefix.clone());
        return;
    }
    let mut g = groups[i].clone();
    permute(&mut g, 0, &mut |p| {
        let len = prefix.len();
        prefix.extend_from_slice(p);
        for_each_tie_order(groups, i + 1, prefix, f);
        prefix.truncate(len);
    });
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Enumeration result with one representative seed per node.
#[derive(Debug, Clone)]
pub struct Enumeration<S> {
    pub graph: ExchangeGraph,
    pub seeds: Vec<S>,
}

/// Search where `pick(len)` selects which of the `len` frontier entries
/// to expand next (0 gives breadth-first order).
pub fn enumerate_with<S: ExplorableSeed>(
    initial: &S,
    cap: usize,
    pick: &mut dyn FnMut(usize) -> usize,
) -> Result<Enumeration<S>> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut graph = ExchangeGraph {
        nodes: Vec::new(),
        clusters: Vec::new(),
        edges: Vec::new(),
        variables: BTreeSet::new(),
        gvectors: BTreeSet::new(),
        status: Status::Finite,
    };
    let mut seeds = Vec::new();
    let mut add = |s: S, graph: &mut ExchangeGraph, seeds: &mut Vec<S>| -> Option<(usize, bool)> {
        let (key, perm) = canonical_key(&s);
        if let Some(&i) = index.get(&key) {
            return Some((i, false));
        }
        if graph.nodes.len() == cap {
            return None;
        }
        let labels = s.labels();
        if let Some(vars) = s.variables() {
            graph.variables.extend(vars.iter().map(|x| x.to_string()));
        }
        if labels.iter().all(|l| l.starts_with("g(")) {
            graph.gvectors.extend(labels.iter().cloned());
        }
        index.insert(key.clone(), graph.nodes.len());
        graph.nodes.push(key);
        graph.clusters.push(perm.iter().map(|&i| labels[i].clone()).collect());
        seeds.push(s);
        Some((graph.nodes.len() - 1, true))
    };
    add(initial.clone(), &mut graph, &mut seeds);
    let mut frontier: VecDeque<usize> = VecDeque::from([0]);
    'search: while !frontier.is_empty() {
        let at = pick(frontier.len()).min(frontier.len() - 1);
        let u = frontier.remove(at).expect("in range");
        let s = seeds[u].clone();
        for k in 0..s.rank() {
            let t = s.mutate_at(k)?;
            match add(t, &mut graph, &mut seeds) {
                Some((v, fresh)) => {
                    graph.edges.push((u, k, v));
                    if fresh {
                        frontier.push_back(v);
                    }
                }
                None => {
                    graph.status = Status::CapReached(cap);
                    break 'search;
                }
            }
        }
    }
    Ok(Enumeration { graph, seeds })
}

/// Breadth-first enumeration up to `cap` seeds.
pub fn enumerate<S: ExplorableSeed>(initial: &S, cap: usize) -> Result<ExchangeGraph> {
    Ok(enumerate_with(initial, cap, &mut |_| 0)?.graph)
}

/// Enumeration of an ordinary seed keyed by g-vectors, with exact
/// variables collected within `exact_depth` mutations of the start.
pub fn enumerate_gvectors(initial: &Seed, cap: usize, exact_depth: usize) -> Result<ExchangeGraph> {
    enumerate(&GVectorSeed::new(initial, exact_depth), cap)
}

/// Sorted canonical serializations of the variables.
pub fn variable_census(g: &ExchangeGraph) -> Vec<String> {
    g.variables.iter().cloned().collect()
}

/// Census images under a variable map, deduplicated and sorted.
pub fn specialized_census(
    g: &ExchangeGraph,
    nvars: usize,
    f: &crate::algebra::OrbitMap,
) -> std::result::Result<BTreeSet<String>, crate::algebra::AlgebraError> {
    g.variables
        .iter()
        .map(|s| Ok(LaurentPoly::parse_canonical(s, nvars)?.specialize(f)?.to_string()))
        .collect()
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    status: Status,
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge>,
    variables: &'a BTreeSet<String>,
}

#[derive(Serialize)]
struct JsonNode<'a> {
    id: usize,
    key: &'a str,
    cluster: &'a [String],
}

#[derive(Serialize)]
struct JsonEdge {
    source: usize,
    index: usize,
    target: usize,
}

/// DOT or JSON rendering; nodes in discovery order.
pub fn export_graph(g: &ExchangeGraph, format: &str) -> Result<String> {
    match format {
        "dot" => {
            let mut s = String::from("graph exchange {\n");
            for (i, c) in g.clusters.iter().enumerate() {
                s.push_str(&format!("  n{i} [label=\"{}\"];\n", c.join("\\n").replace('"', "\\\"")));
            }
            for (u, v) in g.undirected_edges() {
                s.push_str(&format!("  n{u} -- n{v};\n"));
            }
            s.push_str("}\n");
            Ok(s)
        }
        "json" => {
            let out = JsonGraph {
                status: g.status,
                nodes: g
                    .nodes
                    .iter()
                    .zip(&g.clusters)
                    .enumerate()
                    .map(|(id, (key, cluster))| JsonNode { id, key, cluster })
                    .collect(),
                edges: g.edges.iter().map(|&(source, index, target)| JsonEdge { source, index, target }).collect(),
                variables: &g.variables,
            };
            Ok(serde_json::to_string_pretty(&out).expect("serializable"))
        }
        other => Err(ExploreError::UnknownFormat(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::orbit::validate_action;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn canon(exprs: &[&str], n: usize) -> BTreeSet<String> {
        exprs.iter().map(|e| LaurentPoly::parse_expr(e, n).unwrap().to_string()).collect()
    }

    fn orb(t: crate::surface::Triangulation) -> OrbifoldSeed {
        OrbifoldSeed::initial(t)
    }

    #[test]
    fn pentagon_graph() {
        let g = enumerate(&Seed::from_triangulation(polygon(5)), DEFAULT_CAP).unwrap();
        assert_eq!(g.status, Status::Finite);
        assert_eq!(g.nodes.len(), 5);
        assert_eq!(
            g.variables,
            canon(&["x1", "x2", "(x2+1)/x1", "(x1+x2+1)/(x1*x2)", "(x1+1)/x2"], 2)
        );
        assert_eq!(g.undirected_edges().len(), 5);
        let dot = export_graph(&g, "dot").unwrap();
        assert_eq!(dot.matches(" -- ").count(), 5);
    }

    #[test]
    fn type_a_counts() {
        // Catalan numbers of clusters and n(n+3)/2 variables.
        for (n, clusters, vars) in [(4, 2, 2), (5, 5, 5), (6, 14, 9), (7, 42, 14)] {
            let g = enumerate(&Seed::from_triangulation(polygon(n)), DEFAULT_CAP).unwrap();
            assert_eq!((g.nodes.len(), g.variables.len()), (clusters, vars), "{n}-gon");
        }
    }

    #[test]
    fn rank_one_orbifolds() {
        for m in 1..=4u32 {
            let g = enumerate(&orb(sphere_one_puncture_two_orbifold_points(m)), DEFAULT_CAP).unwrap();
            let c = 4 * m * m;
            assert_eq!(g.variables, canon(&["x1", &format!("{c}/x1")], 1), "sphere m={m}");
            let g = enumerate(&orb(once_punctured_monogon(m)), DEFAULT_CAP).unwrap();
            let c = if m == 1 { 2 } else { m };
            assert_eq!(g.variables, canon(&["x1", &format!("{c}/x1")], 1), "monogon m={m}");
        }
        let g = enumerate(&orb(polygon(4)), DEFAULT_CAP).unwrap();
        assert_eq!(g.variables, canon(&["x1", "2/x1"], 1));
        let g = enumerate(&orb(bigon_orbifold_point()), DEFAULT_CAP).unwrap();
        assert_eq!(g.variables, canon(&["x1", "3/x1"], 1));
    }

    #[test]
    fn triangle_with_orbifold_point() {
        let g = enumerate(&orb(triangle_orbifold_point()), DEFAULT_CAP).unwrap();
        assert_eq!(g.status, Status::Finite);
        assert_eq!(
            g.variables,
            canon(
                &[
                    "x1",
                    "x2",
                    "(x1^2+x1+1)/x2",
                    "(x1^2+x1+x2+1)/(x1*x2)",
                    "(x1^2+x2^2+x1*x2+x1+2*x2+1)/(x1^2*x2)",
                    "(x2+1)/x1",
                ],
                2
            )
        );
    }

    #[test]
    fn punctured_m_bigons() {
        let g = enumerate(&orb(punctured_m_bigon(1)), DEFAULT_CAP).unwrap();
        assert_eq!(g.variables, canon(&["x1", "x2", "2/x1", "2/x2"], 2));
        for m in 2..=4u32 {
            let g = enumerate(&orb(punctured_m_bigon(m)), DEFAULT_CAP).unwrap();
            assert_eq!(
                g.variables,
                canon(&["x1", "x2", "2*x2/x1", &format!("{}/x1", 2 * m), &format!("{}/x2", 2 * m), "2*x1/x2"], 2),
                "m = {m}"
            );
            assert_eq!(g.nodes.len(), 6);
            let edges = g.undirected_edges();
            assert_eq!(edges.len(), 6);
            let mut degree = vec![0; 6];
            for (u, v) in edges {
                degree[u] += 1;
                degree[v] += 1;
            }
            assert!(degree.iter().all(|&d| d == 2), "6-cycle");
        }
    }

    #[test]
    fn sphere_with_two_punctures_and_orbifold_point() {
        for (r, s) in [(2u32, 2u32), (2, 3), (3, 2), (4, 2)] {
            let g = enumerate(&orb(sphere_two_punctures_orbifold_point(r, s)), DEFAULT_CAP).unwrap();
            let e = [
                "x1".to_string(),
                "x2".to_string(),
                "3*x2^2/x1".to_string(),
                format!("{}*x2/x1", 3 * s),
                format!("{}/x1", 9 * s * s),
                format!("{}/x2", 3 * r * s),
                format!("{}*x1/x2^2", 3 * r * r),
                format!("{r}*x1/x2"),
            ];
            let e: Vec<&str> = e.iter().map(String::as_str).collect();
            assert_eq!(g.variables, canon(&e, 2), "r={r} s={s}");
        }
        for (r, t) in [(1u32, 1u32), (2, 1), (1, 2), (3, 1), (1, 3), (4, 1)] {
            let g = enumerate(&orb(sphere_two_punctures_orbifold_point(r, t)), DEFAULT_CAP).unwrap();
            assert_eq!(g.nodes.len(), 6, "r={r} s={t}");
            let r = r.max(t);
            let e = [
                "x1".to_string(),
                "x2".to_string(),
                "3*x2/x1".to_string(),
                format!("{}/x1", 3 * r),
                format!("{}/x2", 3 * r),
                format!("{r}*x1/x2"),
            ];
            let e: Vec<&str> = e.iter().map(String::as_str).collect();
            assert_eq!(g.variables, canon(&e, 2), "r={r} s=1");
        }
    }

    #[test]
    fn monogon_with_two_orbifold_points_is_infinite() {
        let g = enumerate(&orb(monogon_two_orbifold_points()), 12).unwrap();
        assert_eq!(g.status, Status::CapReached(12));
        let listed = canon(
            &[
                "(x1^2+x1+1)/x2",
                "x1",
                "x2",
                "(x2^2+x2+1)/x1",
                "((x2^2+x2+1)^2+x1*(x2^2+x2+1)+x1^2)/(x1^2*x2)",
                "((x1^2+x1+1)^2+x2*(x1^2+x1+1)+x2^2)/(x2^2*x1)",
            ],
            2,
        );
        assert!(listed.is_subset(&g.variables));
    }

    #[test]
    fn kronecker_reaches_cap() {
        let s = Seed::from_triangulation(kronecker_annulus());
        let g = enumerate_gvectors(&s, DEFAULT_CAP, 6).unwrap();
        assert_eq!(g.status, Status::CapReached(DEFAULT_CAP));
        assert_eq!(g.nodes.len(), DEFAULT_CAP);
        let listed = canon(&["(x1^2+1)/x2", "x1", "x2", "(x2^2+1)/x1", "(x2^4+2*x2^2+x1^2+1)/(x1^2*x2)"], 2);
        assert!(listed.is_subset(&g.variables), "{:?}", g.variables);
    }

    /// Exact principal-coefficient seed: frozen variables n..2n, arrows
    /// from each frozen vertex to its mutable one.
    fn principal(seed: &Seed) -> Seed {
        let n = seed.rank();
        let mut b = vec![vec![0i64; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                b[i][j] = seed.b.get(i, j);
            }
            b[n + i][i] = 1;
            b[i][n + i] = -1;
        }
        Seed::initial(ExchangeMatrix::new(b).unwrap())
    }

    #[test]
    fn gvectors_match_principal_coefficients() {
        let cases = vec![
            Seed::from_triangulation(polygon(6)),
            Seed::from_triangulation(hexagon_central_triangle()),
            Seed::from_triangulation(kronecker_annulus()),
            Seed::from_triangulation(punctured_polygon(4)),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in cases {
            let n = s.rank();
            for _ in 0..20 {
                let mut p = principal(&s);
                let mut gs = GVectorSeed::new(&s, 0);
                for _ in 0..5 {
                    let k = rng.gen_range(0..n);
                    p = p.mutate(k).unwrap();
                    gs = gs.mutate_at(k).unwrap();
                }
                let mut zero: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::var(n, i)).collect();
                zero.extend((0..n).map(|_| LaurentPoly::zero(n)));
                for j in 0..n {
                    let lead = p.cluster[j].substitute(&zero).unwrap();
                    let m = lead.as_unit_monomial().expect("x^g");
                    assert_eq!(m.0, gs.g[j]);
                    let c: Vec<i64> = (0..n).map(|i| p.b.get(n + i, j)).collect();
                    assert_eq!(c, gs.c_vector(j));
                }
            }
        }
    }

    #[test]
    fn gvector_mode_agrees_on_finite_types() {
        for t in [polygon(6), polygon(7), punctured_polygon(4), hexagon_central_triangle()] {
            let s = Seed::from_triangulation(t);
            let a = enumerate(&s, DEFAULT_CAP).unwrap();
            let b = enumerate_gvectors(&s, DEFAULT_CAP, usize::MAX).unwrap();
            assert_eq!(a.nodes.len(), b.nodes.len());
            assert_eq!(a.variables, b.variables);
            assert_eq!(b.gvectors.len(), a.variables.len());
        }
    }

    #[test]
    fn hexagon_covering_census() {
        let t = hexagon_central_triangle();
        let g = enumerate(&Seed::from_triangulation(t.clone()), DEFAULT_CAP).unwrap();
        assert_eq!(
            g.variables,
            canon(
                &[
                    "x1",
                    "x2",
                    "x3",
                    "(x1+x3)/x2",
                    "(x2+x3)/x1",
                    "(x1+x2)/x3",
                    "(x1+x2+x3)/(x1*x3)",
                    "(x1+x2+x3)/(x1*x2)",
                    "(x1+x2+x3)/(x2*x3)",
                ],
                3
            )
        );
        let a = validate_action(&t, &[polygon_rotation(&t, 2)]).unwrap();
        let f = specialized_census(&g, 3, &a.arc_orbits()).unwrap();
        assert_eq!(f, canon(&["x1", "3/x1", "2"], 1));
    }

    #[test]
    fn punctured_square_covering_census() {
        let t = punctured_polygon(4);
        let g = enumerate(&Seed::from_triangulation(t.clone()), DEFAULT_CAP).unwrap();
        let x = |i: usize| format!("x{}", (i - 1) % 4 + 1);
        let mut e = Vec::new();
        for i in 1..=4 {
            e.push(x(i));
            e.push(format!("(x4*x1+x1*x2+x2*x3+x3*x4)/(x1*x2*x3*x4)*{}", x(i)));
            e.push(format!("(x4*x1+x1*x2+x2*x3+x3*x4-{}*{})/({}*{})", x(i), x(i + 1), x(i), x(i + 1)));
        }
        e.extend(["(x1+x3)/x2", "(x2+x4)/x3", "(x1+x3)/x4", "(x4+x2)/x1"].map(String::from));
        let e: Vec<&str> = e.iter().map(String::as_str).collect();
        assert_eq!(g.variables, canon(&e, 4));
        let a = validate_action(&t, &[punctured_polygon_rotation(4)]).unwrap();
        let f = specialized_census(&g, 4, &a.arc_orbits()).unwrap();
        assert_eq!(f, canon(&["x1", "4/x1", "2", "3"], 1));
    }

    #[test]
    fn rediscovered_seed_gives_same_graph() {
        for s in [Seed::from_triangulation(polygon(6)), Seed::from_triangulation(punctured_polygon(4))] {
            let e = enumerate_with(&s, DEFAULT_CAP, &mut |_| 0).unwrap();
            let base: BTreeSet<&String> = e.graph.nodes.iter().collect();
            for seed in e.seeds.iter().step_by(5) {
                let g = enumerate(seed, DEFAULT_CAP).unwrap();
                assert_eq!(g.nodes.iter().collect::<BTreeSet<_>>(), base);
                assert_eq!(g.variables, e.graph.variables);
            }
        }
    }

    #[test]
    fn edges_are_symmetric() {
        let g = enumerate(&orb(triangle_orbifold_point()), DEFAULT_CAP).unwrap();
        for &(u, _, v) in &g.edges {
            assert!(g.edges.iter().any(|&(a, _, b)| a == v && b == u));
        }
    }

    #[test]
    fn single_seed_and_formats() {
        let s = Seed::initial(ExchangeMatrix::new(Vec::new()).unwrap());
        let g = enumerate(&s, DEFAULT_CAP).unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert!(g.edges.is_empty());
        assert_eq!(export_graph(&g, "dot").unwrap().matches("n0").count(), 1);
        let json: serde_json::Value = serde_json::from_str(&export_graph(&g, "json").unwrap()).unwrap();
        assert_eq!(json["nodes"].as_array().unwrap().len(), 1);
        assert_eq!(json["status"]["kind"], "finite");
        assert_eq!(export_graph(&g, "svg"), Err(ExploreError::UnknownFormat("svg".into())));
    }

    #[test]
    fn canonical_key_ignores_labeling() {
        let s = Seed::from_triangulation(polygon(6));
        let t = s.mutate_sequence(&[0, 2, 1]).unwrap();
        let perm = [2, 0, 1];
        let relabeled = Seed {
            b: t.b.permuted(&perm),
            cluster: perm.iter().map(|&i| t.cluster[i].clone()).collect(),
            triangulation: None,
        };
        assert_eq!(canonical_key(&t).0, canonical_key(&relabeled).0);
        let o = orb(triangle_orbifold_point()).mutate(0).unwrap();
        let swapped = OrbifoldSeed {
            triangulation: o.triangulation.swap_arc_ids(0, 1),
            cluster: vec![o.cluster[1].clone(), o.cluster[0].clone()],
        };
        assert_eq!(canonical_key(&o).0, canonical_key(&swapped).0);
    }

    fn finite_inputs() -> Vec<OrbifoldSeed> {
        vec![
            orb(polygon(6)),
            orb(hexagon_central_triangle()),
            orb(triangle_orbifold_point()),
            orb(punctured_m_bigon(3)),
            orb(sphere_two_punctures_orbifold_point(2, 3)),
            orb(punctured_polygon(4)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn enumeration_is_order_independent(which in 0usize..6, seed in any::<u64>()) {
            let s = &finite_inputs()[which];
            let base = enumerate(s, DEFAULT_CAP).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shuffled = enumerate_with(s, DEFAULT_CAP, &mut |len| rng.gen_range(0..len)).unwrap().graph;
            prop_assert_eq!(
                base.nodes.iter().collect::<BTreeSet<_>>(),
                shuffled.nodes.iter().collect::<BTreeSet<_>>()
            );
            prop_assert_eq!(base.variables, shuffled.variables);
            prop_assert_eq!(base.edges.len(), shuffled.edges.len());
        }
    }
}
