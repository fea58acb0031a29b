//! Potentials on quivers: cyclic words, cyclic derivatives, orbit
//! potentials and path counting for monomial Jacobian ideals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::OrbitMap;
use crate::quiver::{orbit_quiver, PermGroup, Quiver, QuiverAutomorphism, QuiverError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PotentialError {
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("arrows {0:?} do not form a cycle")]
    NotACycle(Vec<usize>),
    #[error("group element {element} is not an automorphism of the potential")]
    NotPotentialAutomorphism { element: usize },
    #[error("relation {0} is not a single path")]
    NonMonomialIdeal(usize),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("parse error in term {term}: {msg}")]
    Parse { term: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, PotentialError>;

/// Oriented cycle of arrows in traversal order (the target of each arrow is
/// the source of the next), stored in its lexicographically least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    arrows: Vec<usize>,
}

impl CyclicWord {
    pub fn new(q: &Quiver, arrows: Vec<usize>) -> Result<Self> {
        if arrows.is_empty() {
            return Err(PotentialError::NotACycle(arrows));
        }
        for &a in &arrows {
            if a >= q.arrows.len() {
                return Err(PotentialError::UnknownArrow(a.to_string()));
            }
        }
        let n = arrows.len();
        for i in 0..n {
            if q.arrows[arrows[i]].tgt != q.arrows[arrows[(i + 1) % n]].src {
                return Err(PotentialError::NotACycle(arrows));
            }
        }
        Ok(CyclicWord { arrows: canonical_rotation(&arrows) })
    }

    pub fn arrows(&self) -> &[usize] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Image under an arrow relabeling (automorphism or orbit map).
    fn map(&self, f: impl Fn(usize) -> usize) -> CyclicWord {
        CyclicWord { arrows: canonical_rotation(&self.arrows.iter().map(|&a| f(a)).collect::<Vec<_>>()) }
    }

    /// Right-to-left rendering `last.….first`.
    pub fn render(&self, q: &Quiver) -> String {
        self.arrows.iter().rev().map(|&a| q.arrow_label(a)).collect::<Vec<_>>().join(".")
    }
}

pub fn canonical_rotation(w: &[usize]) -> Vec<usize> {
    (0..w.len())
        .map(|r| w[r..].iter().chain(&w[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Finite linear combination of distinct cycle classes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Potential {
    terms: BTreeMap<CyclicWord, BigRational>,
}

impl Potential {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BigRational, CyclicWord)>) -> Self {
        let mut p = Potential::new();
        for (c, w) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, w: CyclicWord, c: BigRational) {
        let e = self.terms.entry(w.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CyclicWord, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &CyclicWord) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn apply(&self, g: &QuiverAutomorphism) -> Potential {
        Potential::from_terms(self.terms.iter().map(|(w, c)| (c.clone(), w.map(|a| g.aperm[a]))))
    }

    /// `coeff * a.b.c ; ...` with arrows composed right to left.
    pub fn render(&self, q: &Quiver) -> String {
        self.terms
            .iter()
            .map(|(w, c)| format!("{c} * {}", w.render(q)))
            .collect::<Vec<_>>()
            .join(" ; ")
    }

    pub fn parse(q: &Quiver, s: &str) -> Result<Potential> {
        let mut p = Potential::new();
        if s.trim().is_empty() {
            return Ok(p);
        }
        for (k, term) in s.split(';').enumerate() {
            let perr = |msg: &str| PotentialError::Parse { term: k, msg: msg.into() };
            let (c, w) = term.split_once('*').ok_or_else(|| perr("expected 'coeff * word'"))?;
            let c: BigRational = c.trim().parse().map_err(|_| perr("bad coefficient"))?;
            let mut arrows = Vec::new();
            for name in w.trim().split('.') {
                let a = q
                    .arrow_by_label(name.trim())
                    .ok_or_else(|| PotentialError::UnknownArrow(name.trim().into()))?;
                arrows.push(a);
            }
            arrows.reverse();
            p.add_term(CyclicWord::new(q, arrows)?, c);
        }
        Ok(p)
    }
}

/// A path: start vertex plus arrows in traversal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { start: v, arrows: Vec::new() }
    }

    pub fn end(&self, q: &Quiver) -> usize {
        self.arrows.last().map_or(self.start, |&a| q.arrows[a].tgt)
    }

    /// Vertices visited, in order.
    fn vertices(&self, q: &Quiver) -> Vec<usize> {
        let mut vs = vec![self.start];
        vs.extend(self.arrows.iter().map(|&a| q.arrows[a].tgt));
        vs
    }

    /// Whether `other` occurs as a contiguous subpath.
    pub fn contains(&self, q: &Quiver, other: &Path) -> bool {
        if other.arrows.is_empty() {
            return self.vertices(q).contains(&other.start);
        }
        self.arrows.windows(other.arrows.len()).any(|w| w == other.arrows.as_slice())
    }

    pub fn render(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            return format!("e_{}", q.vertex_label(self.start));
        }
        self.arrows.iter().rev().map(|&a| q.arrow_label(a)).collect::<Vec<_>>().join(".")
    }
}

/// Linear combination of paths with like paths collected.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathCombo {
    terms: BTreeMap<Path, BigRational>,
}

impl PathCombo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(p: Path, c: BigRational) -> Self {
        let mut pc = PathCombo::new();
        pc.add_term(p, c);
        pc
    }

    pub fn add_term(&mut self, p: Path, c: BigRational) {
        let e = self.terms.entry(p.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: &BigRational) -> PathCombo {
        let mut r = PathCombo::new();
        for (p, c) in &self.terms {
            r.add_term(p.clone(), c * k);
        }
        r
    }

    pub fn apply(&self, g: &QuiverAutomorphism) -> PathCombo {
        self.push_forward(&g.vperm, &g.aperm)
    }

    /// Image under vertex and arrow maps, like paths collected.
    pub fn push_forward(&self, vmap: &[usize], amap: &[usize]) -> PathCombo {
        let mut r = PathCombo::new();
        for (p, c) in &self.terms {
            let img = Path { start: vmap[p.start], arrows: p.arrows.iter().map(|&a| amap[a]).collect() };
            r.add_term(img, c.clone());
        }
        r
    }

    pub fn render(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (p, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push_str(" ; ");
            }
            let _ = write!(out, "{c} * {}", p.render(q));
        }
        out
    }
}

/// Cyclic derivative with respect to arrow `alpha`.
pub fn partial_derivative(q: &Quiver, w: &Potential, alpha: usize) -> Result<PathCombo> {
    if alpha >= q.arrows.len() {
        return Err(PotentialError::UnknownArrow(alpha.to_string()));
    }
    let mut r = PathCombo::new();
    for (word, c) in &w.terms {
        let a = word.arrows();
        for (j, &x) in a.iter().enumerate() {
            if x != alpha {
                continue;
            }
            let arrows: Vec<usize> = a[j + 1..].iter().chain(&a[..j]).copied().collect();
            r.add_term(Path { start: q.arrows[alpha].tgt, arrows }, c.clone());
        }
    }
    Ok(r)
}

/// True iff `g` permutes the terms of `w` preserving coefficients.
pub fn automorphism_check(_q: &Quiver, w: &Potential, g: &QuiverAutomorphism) -> bool {
    w.apply(g) == *w
}

/// Orbit quiver together with the orbit potential.
#[derive(Debug, Clone)]
pub struct OrbitPotential {
    pub quiver: Quiver,
    pub vertex_map: OrbitMap,
    pub arrow_map: OrbitMap,
    pub potential: Potential,
}

/// Orbit potential: one term per orbit of cycle classes, coefficient scaled
/// by the orbit size.
pub fn orbit_potential(q: &Quiver, w: &Potential, g: &PermGroup) -> Result<OrbitPotential> {
    for (ei, e) in g.elements.iter().enumerate() {
        if !automorphism_check(q, w, e) {
            return Err(PotentialError::NotPotentialAutomorphism { element: ei });
        }
    }
    let (qg, vmap, amap) = orbit_quiver(q, g)?;
    let mut done: BTreeSet<CyclicWord> = BTreeSet::new();
    let mut wg = Potential::new();
    for (word, c) in &w.terms {
        if done.contains(word) {
            continue;
        }
        let orbit: BTreeSet<CyclicWord> =
            g.elements.iter().map(|e| word.map(|a| e.aperm[a])).collect();
        let size = BigRational::from_integer(BigInt::from(orbit.len()));
        wg.add_term(word.map(|a| amap.image[a]), c * size);
        done.extend(orbit);
    }
    Ok(OrbitPotential { quiver: qg, vertex_map: vmap, arrow_map: amap, potential: wg })
}

/// Jacobian generators of the orbit potential, one per orbit arrow.
pub fn jacobian_generators(op: &OrbitPotential) -> Result<Vec<PathCombo>> {
    (0..op.quiver.arrows.len())
        .map(|a| partial_derivative(&op.quiver, &op.potential, a))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JacobianCheck {
    Holds,
    Fails { arrow: usize, lhs: String, rhs: String },
}

/// For every arrow α: ∂_{Gα} W_G = |G| · π(∂_α W).
pub fn jacobian_identity_check(q: &Quiver, w: &Potential, g: &PermGroup) -> Result<JacobianCheck> {
    let op = orbit_potential(q, w, g)?;
    let order = BigRational::from_integer(BigInt::from(g.order()));
    for alpha in 0..q.arrows.len() {
        let lhs = partial_derivative(&op.quiver, &op.potential, op.arrow_map.image[alpha])?;
        let rhs = partial_derivative(q, w, alpha)?
            .push_forward(&op.vertex_map.image, &op.arrow_map.image)
            .scale(&order);
        if lhs != rhs {
            return Ok(JacobianCheck::Fails {
                arrow: alpha,
                lhs: lhs.render(&op.quiver),
                rhs: rhs.render(&op.quiver),
            });
        }
    }
    Ok(JacobianCheck::Holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianDimension {
    Finite(u64),
    Infinite,
}

/// Paths of length < `maxlen` avoiding every relation as a factor. When
/// paths of length `maxlen` survive the count is reported as infinite.
pub fn monomial_jacobian_dimension(
    q: &Quiver,
    relations: &[PathCombo],
    maxlen: usize,
) -> Result<JacobianDimension> {
    let mut rels = Vec::new();
    for (i, r) in relations.iter().enumerate() {
        let mut it = r.terms();
        match (it.next(), it.next()) {
            (Some((p, _)), None) => rels.push(p.clone()),
            _ => return Err(PotentialError::NonMonomialIdeal(i)),
        }
    }
    let killed = |p: &Path| {
        rels.iter().any(|r| {
            if r.arrows.is_empty() {
                p.end(q) == r.start
            } else {
                p.arrows.ends_with(&r.arrows)
            }
        })
    };
    let mut level: Vec<Path> = (0..q.nvertices).map(Path::trivial).filter(|p| !killed(p)).collect();
    let mut total = 0u64;
    for _ in 0..maxlen {
        if level.is_empty() {
            return Ok(JacobianDimension::Finite(total));
        }
        total += level.len() as u64;
        let mut next = Vec::new();
        for p in &level {
            let end = p.end(q);
            for a in q.arrows.iter().filter(|a| a.src == end) {
                let mut arrows = p.arrows.clone();
                arrows.push(a.id);
                let np = Path { start: p.start, arrows };
                if !killed(&np) {
                    next.push(np);
                }
            }
        }
        level = next;
    }
    if level.is_empty() {
        Ok(JacobianDimension::Finite(total))
    } else {
        Ok(JacobianDimension::Infinite)
    }
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::nine_vertex_quiver;
    use crate::quiver::group_closure;
    use proptest::prelude::*;

    fn tri() -> Quiver {
        Quiver::new(3, &[(0, 1), (1, 2), (2, 0)])
            .unwrap()
            .with_labels(&["u", "v", "w"], &["a", "b", "c"])
            .unwrap()
    }

    #[test]
    fn canonical_rotation_is_idempotent() {
        let w = canonical_rotation(&[2, 0, 1]);
        assert_eq!(w, vec![0, 1, 2]);
        assert_eq!(canonical_rotation(&w), w);
    }

    #[test]
    fn cyclic_word_rejects_open_paths() {
        let q = tri();
        assert!(CyclicWord::new(&q, vec![0, 1]).is_err());
        assert!(CyclicWord::new(&q, vec![1, 2, 0]).is_ok());
        assert!(CyclicWord::new(&q, vec![7]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let q = tri();
        let w = Potential::parse(&q, "2 * c.b.a ; 1/2 * a.c.b").unwrap();
        // Both terms are the same cycle class.
        assert_eq!(w.len(), 1);
        assert_eq!(w.render(&q), "5/2 * c.b.a");
        assert_eq!(Potential::parse(&q, &w.render(&q)).unwrap(), w);
        assert!(Potential::parse(&q, "1 * b.a").is_err());
        assert!(Potential::parse(&q, "x * c.b.a").is_err());
    }

    #[test]
    fn derivative_of_missing_arrow_is_zero() {
        let q = Quiver::new(2, &[(0, 1), (1, 0), (0, 0)]).unwrap();
        let w = Potential::from_terms([(one(), CyclicWord::new(&q, vec![0, 1]).unwrap())]);
        assert!(partial_derivative(&q, &w, 2).unwrap().is_empty());
        assert!(partial_derivative(&q, &w, 9).is_err());
    }

    #[test]
    fn single_cycle_rotation_keeps_coefficient_one() {
        let q = tri();
        let w = Potential::parse(&q, "1 * c.b.a").unwrap();
        let rot = QuiverAutomorphism { vperm: vec![1, 2, 0], aperm: vec![1, 2, 0] };
        let g = group_closure(&q, &[rot]).unwrap();
        let op = orbit_potential(&q, &w, &g).unwrap();
        assert_eq!(op.quiver.nvertices, 1);
        assert_eq!(op.potential.len(), 1);
        assert_eq!(op.potential.terms().next().unwrap().1, &one());
    }

    #[test]
    fn missing_summand_breaks_automorphism() {
        let (q, w, g) = nine_vertex_quiver();
        // Keep only the first of the three rotated 3-cycles.
        let partial = Potential::from_terms(
            w.terms().filter(|(word, _)| word.len() == 3).take(1).map(|(a, c)| (c.clone(), a.clone())),
        );
        assert!(!automorphism_check(&q, &partial, &g.elements[1]));
        assert!(automorphism_check(&q, &w, &g.elements[0]));
        assert!(matches!(
            orbit_potential(&q, &partial, &g),
            Err(PotentialError::NotPotentialAutomorphism { element: 1 })
        ));
    }

    #[test]
    fn trivial_group_keeps_potential() {
        let (q, w, _) = nine_vertex_quiver();
        let triv = group_closure(&q, &[]).unwrap();
        let op = orbit_potential(&q, &w, &triv).unwrap();
        assert_eq!(op.potential, w);
        assert_eq!(jacobian_identity_check(&q, &w, &triv).unwrap(), JacobianCheck::Holds);
    }

    #[test]
    fn small_dimensions() {
        let a2 = Quiver::new(2, &[(0, 1)]).unwrap();
        assert_eq!(monomial_jacobian_dimension(&a2, &[], 10).unwrap(), JacobianDimension::Finite(3));
        let lp = Quiver::new(1, &[(0, 0)]).unwrap();
        assert_eq!(monomial_jacobian_dimension(&lp, &[], 10).unwrap(), JacobianDimension::Infinite);
        let sq = PathCombo::single(Path { start: 0, arrows: vec![0, 0] }, one());
        assert_eq!(monomial_jacobian_dimension(&lp, &[sq], 10).unwrap(), JacobianDimension::Finite(2));
        let mut two = PathCombo::single(Path::trivial(0), one());
        two.add_term(Path { start: 0, arrows: vec![0] }, one());
        assert!(matches!(
            monomial_jacobian_dimension(&lp, &[two], 10),
            Err(PotentialError::NonMonomialIdeal(0))
        ));
    }

    /// Independent count: enumerate every path below the length bound and
    /// filter by factor containment.
    fn brute_force_dimension(q: &Quiver, rels: &[Path], maxlen: usize) -> u64 {
        let mut all: Vec<Path> = (0..q.nvertices).map(Path::trivial).collect();
        let mut frontier = all.clone();
        for _ in 1..maxlen {
            let mut next = Vec::new();
            for p in &frontier {
                for a in &q.arrows {
                    if a.src == p.end(q) {
                        let mut arrows = p.arrows.clone();
                        arrows.push(a.id);
                        next.push(Path { start: p.start, arrows });
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all.iter().filter(|p| !rels.iter().any(|r| p.contains(q, r))).count() as u64
    }

    #[test]
    fn orbit_algebra_dimension_matches_brute_force() {
        let (q, w, g) = nine_vertex_quiver();
        let op = orbit_potential(&q, &w, &g).unwrap();
        let gens = jacobian_generators(&op).unwrap();
        let dim = monomial_jacobian_dimension(&op.quiver, &gens, 12).unwrap();
        let rels: Vec<Path> = gens.iter().map(|r| r.terms().next().unwrap().0.clone()).collect();
        let oracle = brute_force_dimension(&op.quiver, &rels, 12);
        assert_eq!(dim, JacobianDimension::Finite(oracle));
        assert_eq!(oracle, 10);
    }

    #[test]
    fn nine_vertex_orbit_potential_golden() {
        let (q, w, g) = nine_vertex_quiver();
        let op = orbit_potential(&q, &w, &g).unwrap();
        assert_eq!((op.quiver.nvertices, op.quiver.arrows.len()), (3, 4));
        let expected = Potential::parse(&op.quiver, "1 * δ.δ.δ ; 3 * γ.β.α").unwrap();
        assert_eq!(op.potential, expected);
        let gens: BTreeSet<String> = jacobian_generators(&op).unwrap().iter().map(|j| j.render(&op.quiver)).collect();
        let want: BTreeSet<String> =
            ["3 * δ.δ", "3 * γ.β", "3 * β.α", "3 * α.γ"].iter().map(|s| s.to_string()).collect();
        assert_eq!(gens, want);
        assert_eq!(jacobian_identity_check(&q, &w, &g).unwrap(), JacobianCheck::Holds);
    }

    #[test]
    fn equivariance_on_fixture() {
        let (q, w, g) = nine_vertex_quiver();
        for e in &g.elements {
            for alpha in 0..q.arrows.len() {
                let lhs = partial_derivative(&q, &w.apply(e), e.aperm[alpha]).unwrap();
                let rhs = partial_derivative(&q, &w, alpha).unwrap().apply(e);
                assert_eq!(lhs, rhs);
            }
        }
    }

    /// `k` disjoint copies of a 3-cycle with an optional 2-cycle attached,
    /// permuted cyclically; random coefficients are made invariant by
    /// averaging over the group.
    fn random_fixture(k: usize, extra: bool, coeffs: &[i64]) -> (Quiver, Potential, PermGroup) {
        let mut arrows = Vec::new();
        for c in 0..k {
            let b = 4 * c;
            arrows.extend([(b, b + 1), (b + 1, b + 2), (b + 2, b)]);
            if extra {
                arrows.push((b + 3, b));
                arrows.push((b, b + 3));
            }
        }
        let q = Quiver::new(4 * k, &arrows).unwrap();
        let apc = arrows.len() / k;
        let vperm: Vec<usize> = (0..4 * k).map(|v| (v + 4) % (4 * k)).collect();
        let aperm: Vec<usize> = (0..arrows.len()).map(|a| (a + apc) % arrows.len()).collect();
        let g = group_closure(&q, &[QuiverAutomorphism { vperm, aperm }]).unwrap();
        let mut w = Potential::new();
        for c in 0..k {
            let b = apc * c;
            let coeff = rational(coeffs[0]);
            w.add_term(CyclicWord::new(&q, vec![b, b + 1, b + 2]).unwrap(), coeff);
            if extra {
                w.add_term(CyclicWord::new(&q, vec![b + 3, b + 4]).unwrap(), rational(coeffs[1]));
            }
        }
        // A cross term spanning all copies would break freeness; skip it.
        (q, w, g)
    }

    proptest! {
        #[test]
        fn orbit_potential_properties(k in 1usize..5, extra in any::<bool>(), c0 in 1i64..5, c1 in -3i64..4) {
            prop_assume!(c1 != 0);
            let (q, w, g) = random_fixture(k, extra, &[c0, c1]);
            let op = orbit_potential(&q, &w, &g).unwrap();
            // One term per orbit of cycle classes.
            let classes: BTreeSet<BTreeSet<CyclicWord>> = w
                .terms()
                .map(|(word, _)| g.elements.iter().map(|e| word.map(|a| e.aperm[a])).collect())
                .collect();
            prop_assert_eq!(op.potential.len(), classes.len());
            prop_assert_eq!(jacobian_identity_check(&q, &w, &g).unwrap(), JacobianCheck::Holds);
            for (word, _) in w.terms() {
                let once = CyclicWord { arrows: canonical_rotation(word.arrows()) };
                prop_assert_eq!(&once, word);
            }
        }
    }
}
