//! Seeds and mutation: the exchange binomial of a skew-symmetric matrix,
//! the surface exchange polynomial with its monomial gcd, and the
//! generalized exchange polynomials of orbifold triangulations.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{monomial_gcd, AlgebraError, LaurentPoly};
use crate::quiver::{ExchangeMatrix, QuiverError};
use crate::surface::{ArcLocalConfig, Side, SurfaceError, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("cluster has {cluster} entries for rank {rank}")]
    LengthMismatch { cluster: usize, rank: usize },
    #[error("cluster entry {0} is zero")]
    ZeroEntry(usize),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("surface exchange polynomial needs a surface without orbifold points or isotropy")]
    NotASurface,
}

pub type Result<T> = std::result::Result<T, ClusterError>;

/// Which rule produced an exchange polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeCase {
    MatrixBinomial,
    SurfacePtolemy,
    SurfaceSelfFolded,
    SurfacePuncturedBigon,
    SphereTwoOrbifoldPoints,
    OrbifoldLoopSelfFolded,
    OrbifoldLoop,
    LoopOf1SelfFolded,
    RadiusOf1SelfFolded,
    RadiusBehindOrbifoldLoop,
    OncePuncturedMonogon,
    OncePuncturedBigonRadius,
    RadiusOfMSelfFolded,
    Generic,
}

impl ExchangeCase {
    pub fn describe(&self) -> &'static str {
        match self {
            ExchangeCase::MatrixBinomial => "matrix binomial: prod x^[b]+ + prod x^[-b]+",
            ExchangeCase::SurfacePtolemy => "Ptolemy relation: p+ + p-",
            ExchangeCase::SurfaceSelfFolded => "self-folded triangle: (p+ + p-)/gcd",
            ExchangeCase::SurfacePuncturedBigon => "once-punctured bigon: (p+ + p-)/gcd",
            ExchangeCase::SphereTwoOrbifoldPoints => "sphere with two orbifold points: (2m)^2",
            ExchangeCase::OrbifoldLoopSelfFolded => "orbifold loop beside a self-folded triangle: 3a",
            ExchangeCase::OrbifoldLoop => "orbifold loop: a^2 + ab + b^2",
            ExchangeCase::LoopOf1SelfFolded => "loop of a 1-self-folded triangle: (p- + p+)/(t tbar)",
            ExchangeCase::RadiusOf1SelfFolded => "radius of a 1-self-folded triangle: loop rule with loop and radius exchanged",
            ExchangeCase::RadiusBehindOrbifoldLoop => {
                "radius of a 1-self-folded triangle whose loop encloses an orbifold point: m a"
            }
            ExchangeCase::OncePuncturedMonogon => "once-punctured monogon: 2",
            ExchangeCase::OncePuncturedBigonRadius => "radius in a once-punctured 1-bigon: (p- + p+)/(a abar)",
            ExchangeCase::RadiusOfMSelfFolded => "radius of an m-self-folded triangle: m a abar",
            ExchangeCase::Generic => "generic: p- + p+",
        }
    }
}

impl fmt::Display for ExchangeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

/// Exchange polynomial in the current cluster variables (variable i is the
/// entry at index i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangePolynomial {
    pub value: LaurentPoly,
    pub case: ExchangeCase,
}

impl ExchangePolynomial {
    pub fn evaluate(&self, cluster: &[LaurentPoly]) -> Result<LaurentPoly> {
        Ok(self.value.substitute(cluster)?)
    }
}

fn check_cluster(cluster: &[LaurentPoly], rank: usize) -> Result<()> {
    if cluster.len() != rank {
        return Err(ClusterError::LengthMismatch { cluster: cluster.len(), rank });
    }
    if let Some(i) = cluster.iter().position(LaurentPoly::is_zero) {
        return Err(ClusterError::ZeroEntry(i));
    }
    Ok(())
}

/// Initial cluster x_0, …, x_{n-1}.
pub fn initial_cluster(n: usize) -> Vec<LaurentPoly> {
    (0..n).map(|i| LaurentPoly::var(n, i)).collect()
}

/// Coefficient-free exchange binomial at k in current variables.
pub fn matrix_exchange_binomial(b: &ExchangeMatrix, k: usize) -> Result<ExchangePolynomial> {
    let n = b.n();
    if k >= n {
        return Err(ClusterError::IndexOutOfRange(k));
    }
    let mut plus = vec![0i64; n];
    let mut minus = vec![0i64; n];
    for i in 0..n {
        let e = b.get(i, k);
        if e > 0 {
            plus[i] = e;
        } else {
            minus[i] = -e;
        }
    }
    let value = LaurentPoly::term(n, crate::algebra::Monomial(plus), 1)
        .add(&LaurentPoly::term(n, crate::algebra::Monomial(minus), 1))?;
    Ok(ExchangePolynomial { value, case: ExchangeCase::MatrixBinomial })
}

/// Seed of an ordinary cluster algebra, optionally carrying the surface
/// triangulation whose quiver is `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub b: ExchangeMatrix,
    pub cluster: Vec<LaurentPoly>,
    pub triangulation: Option<Triangulation>,
}

impl Seed {
    pub fn new(b: ExchangeMatrix, cluster: Vec<LaurentPoly>) -> Result<Self> {
        check_cluster(&cluster, b.n())?;
        Ok(Seed { b, cluster, triangulation: None })
    }

    pub fn initial(b: ExchangeMatrix) -> Self {
        let n = b.n();
        Seed { b, cluster: initial_cluster(n), triangulation: None }
    }

    pub fn from_triangulation(t: Triangulation) -> Self {
        let b = ExchangeMatrix::from_quiver(&t.quiver());
        let n = b.n();
        Seed { b, cluster: initial_cluster(n), triangulation: Some(t) }
    }

    pub fn rank(&self) -> usize {
        self.cluster.len()
    }

    pub fn exchange_polynomial(&self, k: usize) -> Result<ExchangePolynomial> {
        matrix_exchange_binomial(&self.b, k)
    }

    pub fn mutate(&self, k: usize) -> Result<Seed> {
        mutate_seed(self, k)
    }

    /// Apply a mutation sequence.
    pub fn mutate_sequence(&self, ks: &[usize]) -> Result<Seed> {
        ks.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }
}

/// x_k ← (∏ x_i^{[b_ik]+} + ∏ x_i^{[−b_ik]+}) / x_k, B ← μ_k(B), and the
/// attached triangulation flipped at k.
pub fn mutate_seed(s: &Seed, k: usize) -> Result<Seed> {
    let p = s.exchange_polynomial(k)?.evaluate(&s.cluster)?;
    let mut cluster = s.cluster.clone();
    cluster[k] = p.exact_div(&s.cluster[k])?;
    let triangulation = match &s.triangulation {
        Some(t) => Some(t.flip(k)?),
        None => None,
    };
    Ok(Seed { b: s.b.mutate(k)?, cluster, triangulation })
}

/// Product of a side's variable with its bar partner; boundary sides are 1.
fn side_factor(t: &Triangulation, s: Side) -> LaurentPoly {
    let n = t.n_arcs();
    match s {
        Side::Boundary(_) => LaurentPoly::one(n),
        Side::Arc(a) => {
            let mut e = vec![0i64; n];
            e[a] += 1;
            if let Some(b) = t.bar(a) {
                e[b] += 1;
            }
            LaurentPoly::term(n, crate::algebra::Monomial(e), 1)
        }
    }
}

fn product(t: &Triangulation, sides: &[Side]) -> Result<LaurentPoly> {
    sides.iter().try_fold(LaurentPoly::one(t.n_arcs()), |acc, &s| Ok(acc.mul(&side_factor(t, s))?))
}

fn p_plus_minus(t: &Triangulation, k: usize) -> Result<(LaurentPoly, LaurentPoly)> {
    let q = t.quadrilateral(k);
    Ok((product(t, &q.plus)?, product(t, &q.minus)?))
}

/// (p⁺ + p⁻)/gcd(p⁺, p⁻) on a surface triangulation; the radius of a
/// self-folded triangle uses the rule of its loop with the ids exchanged.
pub fn surface_exchange_poly(t: &Triangulation, k: usize) -> Result<ExchangePolynomial> {
    if t.orbifold_points > 0 || t.points.iter().any(|p| p.isotropy() != 1) {
        return Err(ClusterError::NotASurface);
    }
    if let ArcLocalConfig::RadiusOf1SelfFolded { loop_side: Side::Arc(l), .. } = t.classify_arc(k)? {
        let swapped = t.swap_arc_ids(k, l);
        let inner = surface_exchange_poly(&swapped, k)?;
        return Ok(ExchangePolynomial { value: inner.value, case: ExchangeCase::SurfaceSelfFolded });
    }
    let (pp, pm) = p_plus_minus(t, k)?;
    let g = monomial_gcd(&pp, &pm)?;
    let value = pp.add(&pm)?.exact_div(&g)?;
    let case = if g.is_one() {
        ExchangeCase::SurfacePtolemy
    } else if matches!(
        t.classify_arc(k)?,
        ArcLocalConfig::LoopOf1SelfFolded { .. } | ArcLocalConfig::RadiusOf1SelfFolded { .. }
    ) {
        ExchangeCase::SurfaceSelfFolded
    } else {
        ExchangeCase::SurfacePuncturedBigon
    };
    Ok(ExchangePolynomial { value, case })
}

/// Generalized exchange polynomial of an arc of an orbifold triangulation.
pub fn orbifold_exchange_poly(t: &Triangulation, k: usize) -> Result<ExchangePolynomial> {
    let n = t.n_arcs();
    let (value, case) = match t.classify_arc(k)? {
        ArcLocalConfig::SphereOneMPunctureTwoOrbifoldPoints { m } => {
            let c = BigInt::from(2 * m as i64);
            (LaurentPoly::constant(n, &c * &c), ExchangeCase::SphereTwoOrbifoldPoints)
        }
        ArcLocalConfig::OrbifoldLoop { alpha, doubled: true, .. } => {
            let a = match alpha {
                Side::Arc(a) => LaurentPoly::var(n, a),
                Side::Boundary(_) => LaurentPoly::one(n),
            };
            (a.scale(&BigInt::from(3)), ExchangeCase::OrbifoldLoopSelfFolded)
        }
        ArcLocalConfig::OrbifoldLoop { alpha, beta, doubled: false } => {
            let a = side_factor(t, alpha);
            let b = side_factor(t, beta);
            let v = a.mul(&a)?.add(&a.mul(&b)?)?.add(&b.mul(&b)?)?;
            (v, ExchangeCase::OrbifoldLoop)
        }
        ArcLocalConfig::LoopOf1SelfFolded { .. } => {
            let (pp, pm) = p_plus_minus(t, k)?;
            let v = pm.add(&pp)?.exact_div(&side_factor(t, Side::Arc(k)))?;
            (v, ExchangeCase::LoopOf1SelfFolded)
        }
        ArcLocalConfig::RadiusOf1SelfFolded { loop_side: Side::Boundary(_), .. } => {
            (LaurentPoly::constant(n, 2), ExchangeCase::OncePuncturedMonogon)
        }
        ArcLocalConfig::RadiusOf1SelfFolded { loop_side: Side::Arc(l), .. } if !t.orbifold_triangles_of(l).is_empty() => {
            // The flip changes the tag at the loop's base, of isotropy m.
            let m = t.isotropy(t.arcs[l][0]);
            (LaurentPoly::var(n, l).scale(&BigInt::from(m)), ExchangeCase::RadiusBehindOrbifoldLoop)
        }
        ArcLocalConfig::RadiusOf1SelfFolded { loop_side: Side::Arc(l), .. } => {
            let swapped = t.swap_arc_ids(k, l);
            (orbifold_exchange_poly(&swapped, k)?.value, ExchangeCase::RadiusOf1SelfFolded)
        }
        ArcLocalConfig::RadiusOfOncePunctured1Bigon { partner, .. } => {
            let (pp, pm) = p_plus_minus(t, k)?;
            let v = pm.add(&pp)?.exact_div(&side_factor(t, Side::Arc(partner)))?;
            (v, ExchangeCase::OncePuncturedBigonRadius)
        }
        ArcLocalConfig::RadiusOfMSelfFolded { m, loop_side, .. } => {
            (side_factor(t, loop_side).scale(&BigInt::from(m)), ExchangeCase::RadiusOfMSelfFolded)
        }
        ArcLocalConfig::Generic(_) => {
            let (pp, pm) = p_plus_minus(t, k)?;
            (pm.add(&pp)?, ExchangeCase::Generic)
        }
    };
    Ok(ExchangePolynomial { value, case })
}

/// Seed of the generalized cluster algebra of an orbifold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbifoldSeed {
    pub triangulation: Triangulation,
    pub cluster: Vec<LaurentPoly>,
}

impl OrbifoldSeed {
    pub fn new(triangulation: Triangulation, cluster: Vec<LaurentPoly>) -> Result<Self> {
        check_cluster(&cluster, triangulation.n_arcs())?;
        Ok(OrbifoldSeed { triangulation, cluster })
    }

    pub fn initial(triangulation: Triangulation) -> Self {
        let n = triangulation.n_arcs();
        OrbifoldSeed { triangulation, cluster: initial_cluster(n) }
    }

    pub fn exchange_polynomial(&self, k: usize) -> Result<ExchangePolynomial> {
        orbifold_exchange_poly(&self.triangulation, k)
    }

    pub fn mutate(&self, k: usize) -> Result<OrbifoldSeed> {
        mutate_orbifold_seed(self, k)
    }

    pub fn mutate_sequence(&self, ks: &[usize]) -> Result<OrbifoldSeed> {
        ks.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }
}

/// y_τ ← p_τ(cluster)/y_τ and the triangulation flipped at τ.
pub fn mutate_orbifold_seed(s: &OrbifoldSeed, k: usize) -> Result<OrbifoldSeed> {
    if k >= s.cluster.len() {
        return Err(ClusterError::IndexOutOfRange(k));
    }
    let p = s.exchange_polynomial(k)?.evaluate(&s.cluster)?;
    let mut cluster = s.cluster.clone();
    cluster[k] = p.exact_div(&s.cluster[k])?;
    Ok(OrbifoldSeed { triangulation: s.triangulation.flip(k)?, cluster })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn parse(s: &str, n: usize) -> LaurentPoly {
        LaurentPoly::parse_expr(s, n).unwrap()
    }

    #[test]
    fn pentagon_first_mutation() {
        let s = Seed::from_triangulation(fixtures::polygon(5));
        let m = s.mutate(0).unwrap();
        assert_eq!(m.cluster[0], parse("(x2+1)/x1", 2));
        assert_eq!(m.mutate(0).unwrap(), s);
    }

    #[test]
    fn kronecker_listed_variables() {
        let s = Seed::from_triangulation(fixtures::kronecker_annulus());
        let a = s.mutate(0).unwrap();
        assert_eq!(a.cluster[0], parse("(x2^2+1)/x1", 2));
        let b = a.mutate(1).unwrap();
        assert_eq!(b.cluster[1], parse("(x2^4+2*x2^2+x1^2+1)/(x1^2*x2)", 2));
    }

    #[test]
    fn surface_cases() {
        // Ptolemy on the square.
        let sq = fixtures::polygon(4);
        let p = surface_exchange_poly(&sq, 0).unwrap();
        assert_eq!(p.case, ExchangeCase::SurfacePtolemy);
        assert_eq!(p.value, LaurentPoly::constant(1, 2));
        // Loop of a self-folded triangle: the radius factor cancels.
        let sf = fixtures::once_punctured_bigon_self_folded();
        let l = (0..2).find(|&a| matches!(sf.classify_arc(a).unwrap(), ArcLocalConfig::LoopOf1SelfFolded { .. })).unwrap();
        let p = surface_exchange_poly(&sf, l).unwrap();
        assert_eq!(p.case, ExchangeCase::SurfaceSelfFolded);
        assert_eq!(p.value, LaurentPoly::constant(2, 2));
        // Radius of a once-punctured bigon: the partner factor cancels.
        let bigon = fixtures::punctured_m_bigon(1);
        let p = surface_exchange_poly(&bigon, 0).unwrap();
        assert_eq!(p.case, ExchangeCase::SurfacePuncturedBigon);
        assert_eq!(p.value, LaurentPoly::constant(2, 2));
    }

    #[test]
    fn generic_quadrilateral_with_distinct_sides() {
        let hex = fixtures::hexagon_central_triangle();
        for k in 0..3 {
            let p = surface_exchange_poly(&hex, k).unwrap();
            assert_eq!(p.case, ExchangeCase::SurfacePtolemy);
            let others: Vec<usize> = (0..3).filter(|&j| j != k).collect();
            let expect = LaurentPoly::var(3, others[0]).add(&LaurentPoly::var(3, others[1])).unwrap();
            assert_eq!(p.value, expect);
        }
    }

    #[test]
    fn surface_poly_equals_matrix_binomial_on_unpunctured_fixtures() {
        for (name, t, d) in fixtures::all_triangulations() {
            if !d.punctures.is_empty() || d.orbifold_points > 0 {
                continue;
            }
            let b = ExchangeMatrix::from_quiver(&t.quiver());
            for k in 0..t.n_arcs() {
                let s = surface_exchange_poly(&t, k).unwrap().value;
                let m = matrix_exchange_binomial(&b, k).unwrap().value;
                assert_eq!(s, m, "{name} arc {k}");
            }
        }
    }

    #[test]
    fn orbifold_rule_agrees_with_surface_rule_on_surfaces() {
        for (name, t, d) in fixtures::all_triangulations() {
            if d.orbifold_points > 0 || d.punctures.iter().any(|&m| m != 1) {
                continue;
            }
            for k in 0..t.n_arcs() {
                let s = surface_exchange_poly(&t, k).unwrap().value;
                let o = orbifold_exchange_poly(&t, k).unwrap().value;
                assert_eq!(s, o, "{name} arc {k}");
            }
        }
    }

    #[test]
    fn exchange_polynomials_are_polynomials() {
        for (name, t, _) in fixtures::all_triangulations() {
            for k in 0..t.n_arcs() {
                let p = orbifold_exchange_poly(&t, k).unwrap();
                assert!(p.value.is_polynomial(), "{name} arc {k}: {}", p.value);
                assert!(!p.value.involves(k) || p.case == ExchangeCase::RadiusOf1SelfFolded, "{name} arc {k}");
            }
        }
    }

    #[test]
    fn sphere_two_orbifold_points_constant() {
        for m in 1..=4u32 {
            let t = fixtures::sphere_one_puncture_two_orbifold_points(m);
            let p = orbifold_exchange_poly(&t, 0).unwrap();
            assert_eq!(p.case, ExchangeCase::SphereTwoOrbifoldPoints);
            assert_eq!(p.value, LaurentPoly::constant(1, 4 * m * m));
        }
    }

    #[test]
    fn triangle_with_orbifold_point_loop() {
        let s = OrbifoldSeed::initial(fixtures::triangle_orbifold_point());
        let p = s.exchange_polynomial(1).unwrap();
        assert_eq!(p.case, ExchangeCase::OrbifoldLoop);
        assert_eq!(s.mutate(1).unwrap().cluster[1], parse("(x1^2+x1+1)/x2", 2));
        assert_eq!(s.mutate(0).unwrap().cluster[0], parse("(x2+1)/x1", 2));
    }

    #[test]
    fn m_self_folded_radius() {
        let t = fixtures::punctured_m_bigon(2).flip(0).unwrap();
        let p = orbifold_exchange_poly(&t, 1).unwrap();
        assert_eq!(p.case, ExchangeCase::RadiusOfMSelfFolded);
        assert_eq!(p.value, parse("2*x1", 2));
    }

    #[test]
    fn m_bigon_six_variables() {
        for m in 2..=4i64 {
            let mut s = OrbifoldSeed::initial(fixtures::punctured_m_bigon(m as u32));
            let mut seen = vec![s.cluster[0].to_string(), s.cluster[1].to_string()];
            for step in 0..6 {
                s = s.mutate(step % 2).unwrap();
                seen.push(s.cluster[step % 2].to_string());
            }
            assert_eq!(s, OrbifoldSeed::initial(fixtures::punctured_m_bigon(m as u32)));
            seen.sort();
            seen.dedup();
            let mut expect: Vec<String> = ["x1", "x2", "2*x2/x1", &format!("{}/x1", 2 * m), &format!("{}/x2", 2 * m), "2*x1/x2"]
                .iter()
                .map(|e| parse(e, 2).to_string())
                .collect();
            expect.sort();
            assert_eq!(seen, expect, "m = {m}");
        }
    }

    #[test]
    fn independence_witness_on_first_mutation() {
        // y' = p/y with p free of y: the Jacobian of the new cluster in the
        // initial variables is triangular with nonzero diagonal, so the new
        // cluster is algebraically independent.
        for (name, t, _) in fixtures::all_triangulations() {
            let s = OrbifoldSeed::initial(t.clone());
            for k in 0..t.n_arcs() {
                let m = s.mutate(k).unwrap();
                assert!(m.cluster[k].terms().all(|(mono, _)| mono.0[k] == -1), "{name} arc {k}");
                assert!((0..t.n_arcs()).filter(|&j| j != k).all(|j| m.cluster[j] == s.cluster[j]));
            }
        }
    }

    #[test]
    fn errors_reported() {
        let s = Seed::initial(ExchangeMatrix::zero(2));
        assert!(matches!(s.mutate(5), Err(ClusterError::IndexOutOfRange(5))));
        assert!(matches!(
            Seed::new(ExchangeMatrix::zero(2), vec![LaurentPoly::one(2)]),
            Err(ClusterError::LengthMismatch { .. })
        ));
        assert!(matches!(
            surface_exchange_poly(&fixtures::triangle_orbifold_point(), 0),
            Err(ClusterError::NotASurface)
        ));
    }

    fn all_fixture_seeds() -> Vec<(String, OrbifoldSeed)> {
        fixtures::all_triangulations().into_iter().map(|(n, t, _)| (n, OrbifoldSeed::initial(t))).collect()
    }

    #[test]
    fn mutation_is_an_involution_everywhere() {
        for (name, s) in all_fixture_seeds() {
            for k in 0..s.cluster.len() {
                assert_eq!(s.mutate(k).unwrap().mutate(k).unwrap(), s, "{name} arc {k}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_sequences_stay_laurent(idx in 0usize..1000, seq in proptest::collection::vec(0usize..12, 0..10)) {
            let seeds = all_fixture_seeds();
            let (name, s) = &seeds[idx % seeds.len()];
            let n = s.cluster.len();
            let mut cur = s.clone();
            for &k in &seq {
                let k = k % n;
                let next = cur.mutate(k);
                prop_assert!(next.is_ok(), "{name}: {:?}", next.err());
                let next = next.unwrap();
                prop_assert_eq!(&next.mutate(k).unwrap(), &cur);
                cur = next;
            }
        }
    }
}
