//! Named quivers, triangulations and group actions used by tests, the CLI
//! and the shipped workspace files.

use crate::potential::{one, CyclicWord, Potential};
use crate::quiver::{group_closure, PermGroup, Quiver, QuiverAutomorphism};
use crate::surface::{
    OrbifoldDescriptor, PointKind, Side, SurfaceSymmetry, Triangle, Triangulation,
};

/// Nine-vertex quiver with ℤ3 index rotation: vertices a_i, b_i, c_i,
/// arrows α_i: b_i→c_i, β_i: c_i→a_i, γ_i: a_i→b_i, δ_i: a_i→a_{i+1}, and
/// potential δ3δ2δ1 + Σ γ_iβ_iα_i.
pub fn nine_vertex_quiver() -> (Quiver, Potential, PermGroup) {
    let (a, b, c) = (|i: usize| i, |i: usize| 3 + i, |i: usize| 6 + i);
    let mut arrows = Vec::new();
    for i in 0..3 {
        arrows.push((b(i), c(i)));
    }
    for i in 0..3 {
        arrows.push((c(i), a(i)));
    }
    for i in 0..3 {
        arrows.push((a(i), b(i)));
    }
    for i in 0..3 {
        arrows.push((a(i), a((i + 1) % 3)));
    }
    let vlabels = ["a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3"];
    let alabels = ["α1", "α2", "α3", "β1", "β2", "β3", "γ1", "γ2", "γ3", "δ1", "δ2", "δ3"];
    let q = Quiver::new(9, &arrows).unwrap().with_labels(&vlabels, &alabels).unwrap();
    let mut w = Potential::new();
    w.add_term(CyclicWord::new(&q, vec![9, 10, 11]).unwrap(), one());
    for i in 0..3 {
        w.add_term(CyclicWord::new(&q, vec![i, 3 + i, 6 + i]).unwrap(), one());
    }
    let rot = |x: usize| x / 3 * 3 + (x % 3 + 1) % 3;
    let g = QuiverAutomorphism { vperm: (0..9).map(rot).collect(), aperm: (0..12).map(rot).collect() };
    let group = group_closure(&q, &[g]).unwrap();
    (q, w, group)
}

fn descriptor(genus: u32, boundaries: &[usize], punctures: &[u32], x: usize) -> OrbifoldDescriptor {
    OrbifoldDescriptor::new(genus, boundaries.to_vec(), punctures.to_vec(), x).unwrap()
}

/// Triangulation from clockwise vertex triples; every side is looked up by
/// its endpoint pair, which must be unique.
fn from_vertex_triples(
    points: Vec<PointKind>,
    boundary: Vec<[usize; 2]>,
    arcs: Vec<[usize; 2]>,
    triples: &[[usize; 3]],
) -> Triangulation {
    let side = |u: usize, v: usize| {
        let same = |e: &[usize; 2]| (e[0] == u && e[1] == v) || (e[0] == v && e[1] == u);
        let mut hits = arcs.iter().enumerate().filter(|(_, e)| same(e)).map(|(i, _)| Side::Arc(i));
        let mut bh = boundary.iter().enumerate().filter(|(_, e)| same(e)).map(|(i, _)| Side::Boundary(i));
        let s = hits.next().or_else(|| bh.next()).expect("side exists");
        assert!(hits.next().is_none(), "ambiguous side {u}-{v}");
        s
    };
    let triangles = triples
        .iter()
        .map(|&[u, v, w]| Triangle::Standard { sides: [side(u, v), side(v, w), side(w, u)], corners: [v, w, u] })
        .collect();
    Triangulation::new(points, 0, boundary, arcs, triangles)
}

fn disk_boundary(n: usize) -> Vec<[usize; 2]> {
    (0..n).map(|i| [i, (i + 1) % n]).collect()
}

/// Unpunctured n-gon, fan of diagonals from vertex 0.
pub fn polygon(n: usize) -> Triangulation {
    let arcs = (2..n - 1).map(|j| [0, j]).collect();
    let triples: Vec<[usize; 3]> = (1..n - 1).map(|j| [0, j, j + 1]).collect();
    from_vertex_triples(vec![PointKind::Boundary; n], disk_boundary(n), arcs, &triples)
}

/// Hexagon with the internal triangle 0-2-4.
pub fn hexagon_central_triangle() -> Triangulation {
    from_vertex_triples(
        vec![PointKind::Boundary; 6],
        disk_boundary(6),
        vec![[0, 2], [2, 4], [0, 4]],
        &[[0, 1, 2], [2, 3, 4], [0, 4, 5], [0, 2, 4]],
    )
}

/// 9-gon with internal triangle 0-3-6 and diagonals 0-2, 3-5, 6-8.
pub fn nonagon_central_triangle() -> Triangulation {
    from_vertex_triples(
        vec![PointKind::Boundary; 9],
        disk_boundary(9),
        vec![[0, 3], [3, 6], [0, 6], [0, 2], [3, 5], [6, 8]],
        &[[0, 3, 6], [0, 2, 3], [0, 1, 2], [3, 5, 6], [3, 4, 5], [0, 6, 8], [6, 7, 8]],
    )
}

/// 12-gon with internal triangle 0-4-8; each outer pentagon is cut into
/// the fan of its middle vertex, so both neighbours of the internal
/// triangle's sides are arcs.
pub fn dodecagon_central_triangle() -> Triangulation {
    from_vertex_triples(
        vec![PointKind::Boundary; 12],
        disk_boundary(12),
        vec![[0, 4], [4, 8], [0, 8], [0, 2], [4, 6], [8, 10], [2, 4], [6, 8], [0, 10]],
        &[
            [0, 4, 8],
            [0, 2, 4],
            [0, 1, 2],
            [2, 3, 4],
            [4, 6, 8],
            [4, 5, 6],
            [6, 7, 8],
            [0, 8, 10],
            [8, 9, 10],
            [0, 10, 11],
        ],
    )
}

/// Rotation i ↦ i + shift of a polygon fixture, arcs matched by endpoints.
pub fn polygon_rotation(t: &Triangulation, shift: usize) -> SurfaceSymmetry {
    let n = t.points.len();
    let points: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
    symmetry_from_points(t, points)
}

/// Arc images forced by a point map when endpoint pairs are unique.
pub fn symmetry_from_points(t: &Triangulation, points: Vec<usize>) -> SurfaceSymmetry {
    let arcs = t
        .arcs
        .iter()
        .map(|e| {
            let mut img = [points[e[0]], points[e[1]]];
            img.sort_unstable();
            t.arcs.iter().position(|f| *f == img).expect("image arc")
        })
        .collect();
    SurfaceSymmetry { arcs, points }
}

/// Disk with n boundary points and one puncture of isotropy m, triangulated
/// by the n radii; radius j joins boundary point j to the puncture.
pub fn punctured_polygon_with_isotropy(n: usize, m: u32) -> Triangulation {
    let mut points = vec![PointKind::Boundary; n];
    points.push(PointKind::Puncture { isotropy: m });
    let arcs = (0..n).map(|j| [j, n]).collect();
    let triangles = if n == 1 {
        vec![Triangle::SelfFolded { loop_side: Side::Boundary(0), radius: 0, puncture: 1 }]
    } else {
        (0..n)
            .map(|j| Triangle::Standard {
                sides: [Side::Boundary(j), Side::Arc((j + 1) % n), Side::Arc(j)],
                corners: [(j + 1) % n, n, j],
            })
            .collect()
    };
    Triangulation::new(points, 0, disk_boundary(n), arcs, triangles)
}

/// Once-punctured square (or any n-gon) with isotropy 1.
pub fn punctured_polygon(n: usize) -> Triangulation {
    punctured_polygon_with_isotropy(n, 1)
}

/// Rotation of the punctured n-gon by one step.
pub fn punctured_polygon_rotation(n: usize) -> SurfaceSymmetry {
    let mut points: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    points.push(n);
    SurfaceSymmetry { arcs: (0..n).map(|j| (j + 1) % n).collect(), points }
}

/// Once-punctured monogon with isotropy m.
pub fn once_punctured_monogon(m: u32) -> Triangulation {
    punctured_polygon_with_isotropy(1, m)
}

/// Once-punctured bigon with isotropy m, triangulated by two radii.
pub fn punctured_m_bigon(m: u32) -> Triangulation {
    punctured_polygon_with_isotropy(2, m)
}

/// Once-punctured bigon of isotropy 1 with a self-folded triangle.
pub fn once_punctured_bigon_self_folded() -> Triangulation {
    punctured_m_bigon(1).flip(0).unwrap()
}

/// Punctured 2m-gon: radii r_i from vertex 2i (ids 0..m) and arcs α_i from
/// 2i to 2i+2 (ids m..2m).
pub fn punctured_even_polygon(m: usize) -> Triangulation {
    let n = 2 * m;
    let mut points = vec![PointKind::Boundary; n];
    points.push(PointKind::Puncture { isotropy: 1 });
    let mut arcs: Vec<[usize; 2]> = (0..m).map(|i| [2 * i, n]).collect();
    arcs.extend((0..m).map(|i| [2 * i, (2 * i + 2) % n]));
    let mut triangles = Vec::new();
    for i in 0..m {
        let (v0, v1, v2) = (2 * i, 2 * i + 1, (2 * i + 2) % n);
        triangles.push(Triangle::Standard {
            sides: [Side::Boundary(v0), Side::Boundary(v1), Side::Arc(m + i)],
            corners: [v1, v2, v0],
        });
        triangles.push(Triangle::Standard {
            sides: [Side::Arc(m + i), Side::Arc((i + 1) % m), Side::Arc(i)],
            corners: [v2, n, v0],
        });
    }
    Triangulation::new(points, 0, disk_boundary(n), arcs, triangles)
}

pub fn punctured_even_polygon_rotation(m: usize) -> SurfaceSymmetry {
    let n = 2 * m;
    let mut points: Vec<usize> = (0..n).map(|i| (i + 2) % n).collect();
    points.push(n);
    let mut arcs: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
    arcs.extend((0..m).map(|i| m + (i + 1) % m));
    SurfaceSymmetry { arcs, points }
}

/// Octahedron: six punctures ±x, ±y, ±z (ids 2·axis + [negative]).
pub fn octahedron() -> Triangulation {
    let mut arcs = Vec::new();
    for u in 0..6 {
        for v in u + 1..6 {
            if u / 2 != v / 2 {
                arcs.push([u, v]);
            }
        }
    }
    let mut triples = Vec::new();
    for sx in 0..2 {
        for sy in 0..2 {
            for sz in 0..2 {
                let (x, y, z) = (sx, 2 + sy, 4 + sz);
                // Vertex order x, y, z is counterclockwise from outside when
                // the sign product is positive.
                if (sx + sy + sz) % 2 == 0 {
                    triples.push([x, z, y]);
                } else {
                    triples.push([x, y, z]);
                }
            }
        }
    }
    from_vertex_triples(vec![PointKind::Puncture { isotropy: 1 }; 6], Vec::new(), arcs, &triples)
}

/// Rotation of the octahedron given as a signed permutation of the axes.
fn octahedron_rotation(axis: [usize; 3], sign: [bool; 3]) -> SurfaceSymmetry {
    let points: Vec<usize> = (0..6)
        .map(|v| {
            let (i, neg) = (v / 2, v % 2 == 1);
            2 * axis[i] + usize::from(neg != sign[i])
        })
        .collect();
    symmetry_from_points(&octahedron(), points)
}

/// Generators of the rotations preserving the two face colours: the
/// three-fold rotation about (1,1,1) and the half turn about the z axis.
pub fn octahedron_color_rotations() -> Vec<SurfaceSymmetry> {
    vec![
        octahedron_rotation([1, 2, 0], [false, false, false]),
        octahedron_rotation([0, 1, 2], [true, true, false]),
    ]
}

/// Sphere with four punctures: three loops at the centre 0 cutting out
/// self-folded triangles around punctures 1, 2, 3, and the triangle of loops.
pub fn sphere_four_punctures() -> Triangulation {
    let points = vec![PointKind::Puncture { isotropy: 1 }; 4];
    let mut arcs = vec![[0, 0]; 3];
    arcs.extend((1..4).map(|p| [0, p]));
    let mut triangles: Vec<Triangle> = (0..3)
        .map(|i| Triangle::SelfFolded { loop_side: Side::Arc(i), radius: 3 + i, puncture: i + 1 })
        .collect();
    triangles.push(Triangle::Standard { sides: [Side::Arc(0), Side::Arc(1), Side::Arc(2)], corners: [0, 0, 0] });
    Triangulation::new(points, 0, Vec::new(), arcs, triangles)
}

pub fn sphere_four_punctures_rotation() -> SurfaceSymmetry {
    SurfaceSymmetry { arcs: vec![1, 2, 0, 4, 5, 3], points: vec![0, 2, 3, 1] }
}

/// Sphere with three boundary components, one marked point p_i on each,
/// arcs n_i (ids 0..3) and s_i (ids 3..6) from p_i to p_{i+1} forming a
/// northern and a southern triangle.
pub fn sphere_three_boundaries() -> Triangulation {
    let points = vec![PointKind::Boundary; 3];
    let boundary = (0..3).map(|i| [i, i]).collect();
    let mut arcs: Vec<[usize; 2]> = (0..3).map(|i| [i, (i + 1) % 3]).collect();
    arcs.extend((0..3).map(|i| [i, (i + 1) % 3]));
    let mut triangles = vec![
        Triangle::Standard { sides: [Side::Arc(0), Side::Arc(1), Side::Arc(2)], corners: [1, 2, 0] },
        Triangle::Standard { sides: [Side::Arc(3), Side::Arc(5), Side::Arc(4)], corners: [0, 2, 1] },
    ];
    for i in 0..3 {
        triangles.push(Triangle::Standard {
            sides: [Side::Boundary(i), Side::Arc(3 + i), Side::Arc(i)],
            corners: [i, (i + 1) % 3, i],
        });
    }
    Triangulation::new(points, 0, boundary, arcs, triangles)
}

pub fn sphere_three_boundaries_rotation() -> SurfaceSymmetry {
    SurfaceSymmetry { arcs: vec![1, 2, 0, 4, 5, 3], points: vec![1, 2, 0] }
}

/// Annulus with two marked points on each boundary (outer 0, 1; inner 2, 3)
/// and the zigzag A = 0–2, B = 2–1, C = 1–3, D = 3–0.
pub fn annulus_two_two() -> Triangulation {
    let points = vec![PointKind::Boundary; 4];
    let boundary = vec![[1, 0], [0, 1], [2, 3], [3, 2]];
    let arcs = vec![[0, 2], [1, 2], [1, 3], [0, 3]];
    let (a, b, c, d) = (Side::Arc(0), Side::Arc(1), Side::Arc(2), Side::Arc(3));
    let triangles = vec![
        Triangle::Standard { sides: [Side::Boundary(0), a, b], corners: [0, 2, 1] },
        Triangle::Standard { sides: [Side::Boundary(1), c, d], corners: [1, 3, 0] },
        Triangle::Standard { sides: [b, Side::Boundary(2), c], corners: [2, 3, 1] },
        Triangle::Standard { sides: [d, Side::Boundary(3), a], corners: [3, 2, 0] },
    ];
    Triangulation::new(points, 0, boundary, arcs, triangles)
}

pub fn annulus_half_turn() -> SurfaceSymmetry {
    SurfaceSymmetry { arcs: vec![2, 3, 0, 1], points: vec![1, 0, 3, 2] }
}

/// Annulus with one marked point on each boundary (outer 0, inner 1).
pub fn kronecker_annulus() -> Triangulation {
    let points = vec![PointKind::Boundary; 2];
    let boundary = vec![[0, 0], [1, 1]];
    let arcs = vec![[0, 1], [0, 1]];
    let triangles = vec![
        Triangle::Standard { sides: [Side::Arc(0), Side::Arc(1), Side::Boundary(0)], corners: [1, 0, 0] },
        Triangle::Standard { sides: [Side::Arc(0), Side::Arc(1), Side::Boundary(1)], corners: [0, 1, 1] },
    ];
    Triangulation::new(points, 0, boundary, arcs, triangles)
}

/// Once-punctured torus: arcs a, b, c and two triangles of the same cyclic
/// order.
pub fn once_punctured_torus() -> Triangulation {
    let s = [Side::Arc(0), Side::Arc(1), Side::Arc(2)];
    Triangulation::new(
        vec![PointKind::Puncture { isotropy: 1 }],
        0,
        Vec::new(),
        vec![[0, 0]; 3],
        vec![Triangle::Standard { sides: s, corners: [0, 0, 0] }; 2],
    )
}

/// Sphere with one puncture of isotropy m and two orbifold points.
pub fn sphere_one_puncture_two_orbifold_points(m: u32) -> Triangulation {
    Triangulation::new(
        vec![PointKind::Puncture { isotropy: m }],
        2,
        Vec::new(),
        vec![[0, 0]],
        vec![Triangle::Orbifold { loop_arc: 0, point: 0 }, Triangle::Orbifold { loop_arc: 0, point: 1 }],
    )
}

/// Bigon with one orbifold point enclosed by a loop at boundary point 0.
pub fn bigon_orbifold_point() -> Triangulation {
    Triangulation::new(
        vec![PointKind::Boundary; 2],
        1,
        vec![[0, 1], [1, 0]],
        vec![[0, 0]],
        vec![
            Triangle::Standard { sides: [Side::Boundary(0), Side::Boundary(1), Side::Arc(0)], corners: [1, 0, 0] },
            Triangle::Orbifold { loop_arc: 0, point: 0 },
        ],
    )
}

/// Triangle with one orbifold point: arc x1 joins 0 and 2, loop x2 at 0
/// encloses the orbifold point.
pub fn triangle_orbifold_point() -> Triangulation {
    Triangulation::new(
        vec![PointKind::Boundary; 3],
        1,
        disk_boundary(3),
        vec![[0, 2], [0, 0]],
        vec![
            Triangle::Standard {
                sides: [Side::Boundary(0), Side::Boundary(1), Side::Arc(0)],
                corners: [1, 2, 0],
            },
            Triangle::Standard { sides: [Side::Arc(1), Side::Arc(0), Side::Boundary(2)], corners: [0, 2, 0] },
            Triangle::Orbifold { loop_arc: 1, point: 0 },
        ],
    )
}

/// Monogon with two orbifold points, each enclosed by a loop at the single
/// boundary point.
pub fn monogon_two_orbifold_points() -> Triangulation {
    Triangulation::new(
        vec![PointKind::Boundary],
        2,
        vec![[0, 0]],
        vec![[0, 0], [0, 0]],
        vec![
            Triangle::Standard {
                sides: [Side::Arc(1), Side::Arc(0), Side::Boundary(0)],
                corners: [0, 0, 0],
            },
            Triangle::Orbifold { loop_arc: 0, point: 0 },
            Triangle::Orbifold { loop_arc: 1, point: 1 },
        ],
    )
}

/// Sphere with punctures of isotropy s (point 0) and r (point 1) and one
/// orbifold point: a loop at the s-puncture encloses the orbifold point and
/// the self-folded triangle around the r-puncture.
pub fn sphere_two_punctures_orbifold_point(r: u32, s: u32) -> Triangulation {
    Triangulation::new(
        vec![PointKind::Puncture { isotropy: s }, PointKind::Puncture { isotropy: r }],
        1,
        Vec::new(),
        vec![[0, 0], [0, 1]],
        vec![
            Triangle::Orbifold { loop_arc: 0, point: 0 },
            Triangle::SelfFolded { loop_side: Side::Arc(0), radius: 1, puncture: 1 },
        ],
    )
}

/// Every triangulation fixture with its descriptor.
pub fn all_triangulations() -> Vec<(String, Triangulation, OrbifoldDescriptor)> {
    let mut v = vec![
        ("square".to_string(), polygon(4), descriptor(0, &[4], &[], 0)),
        ("pentagon".to_string(), polygon(5), descriptor(0, &[5], &[], 0)),
        ("hexagon".to_string(), hexagon_central_triangle(), descriptor(0, &[6], &[], 0)),
        ("nonagon".to_string(), nonagon_central_triangle(), descriptor(0, &[9], &[], 0)),
        ("dodecagon".to_string(), dodecagon_central_triangle(), descriptor(0, &[12], &[], 0)),
        ("punctured square".to_string(), punctured_polygon(4), descriptor(0, &[4], &[1], 0)),
        ("octahedron".to_string(), octahedron(), descriptor(0, &[], &[1; 6], 0)),
        ("sphere with four punctures".to_string(), sphere_four_punctures(), descriptor(0, &[], &[1; 4], 0)),
        ("sphere with three boundaries".to_string(), sphere_three_boundaries(), descriptor(0, &[1, 1, 1], &[], 0)),
        ("annulus 2+2".to_string(), annulus_two_two(), descriptor(0, &[2, 2], &[], 0)),
        ("kronecker annulus".to_string(), kronecker_annulus(), descriptor(0, &[1, 1], &[], 0)),
        ("once-punctured torus".to_string(), once_punctured_torus(), descriptor(1, &[], &[1], 0)),
        ("bigon with orbifold point".to_string(), bigon_orbifold_point(), descriptor(0, &[2], &[], 1)),
        ("triangle with orbifold point".to_string(), triangle_orbifold_point(), descriptor(0, &[3], &[], 1)),
        (
            "monogon with two orbifold points".to_string(),
            monogon_two_orbifold_points(),
            descriptor(0, &[1], &[], 2),
        ),
        (
            "once-punctured bigon self-folded".to_string(),
            once_punctured_bigon_self_folded(),
            descriptor(0, &[2], &[1], 0),
        ),
    ];
    for n in [3, 5, 6] {
        v.push((format!("punctured {n}-gon"), punctured_polygon(n), descriptor(0, &[n], &[1], 0)));
    }
    for m in 2..=4usize {
        v.push((
            format!("punctured {}-gon with alternate diagonals", 2 * m),
            punctured_even_polygon(m),
            descriptor(0, &[2 * m], &[1], 0),
        ));
    }
    for m in 1..=4u32 {
        v.push((format!("once-punctured monogon m={m}"), once_punctured_monogon(m), descriptor(0, &[1], &[m], 0)));
        v.push((format!("once-punctured bigon m={m}"), punctured_m_bigon(m), descriptor(0, &[2], &[m], 0)));
        v.push((
            format!("sphere m={m} with two orbifold points"),
            sphere_one_puncture_two_orbifold_points(m),
            descriptor(0, &[], &[m], 2),
        ));
    }
    for (r, s) in [(2, 2), (2, 3), (3, 1), (1, 3), (1, 1), (4, 2)] {
        v.push((
            format!("sphere r={r} s={s} with orbifold point"),
            sphere_two_punctures_orbifold_point(r, s),
            descriptor(0, &[], &[s, r], 1),
        ));
    }
    v
}
