//! The workspace files shipped under `fixtures/`, generated from the core
//! fixtures so the two cannot drift.

use orbiclust::fixtures::*;
use orbiclust::surface::{SurfaceSymmetry, Triangulation};

use crate::workspace::WorkspaceFile;

fn ws(t: Triangulation, action: Option<Vec<SurfaceSymmetry>>) -> WorkspaceFile {
    let descriptor = t.descriptor().expect("fixture descriptor");
    WorkspaceFile { descriptor, triangulation: t, action, cluster: None }
}

pub fn workspaces() -> Vec<(String, WorkspaceFile)> {
    let h = hexagon_central_triangle();
    let d = dodecagon_central_triangle();
    let mut v = vec![
        ("pentagon".to_string(), ws(polygon(5), None)),
        ("square".to_string(), ws(polygon(4), None)),
        ("hexagon_z3".to_string(), ws(h.clone(), Some(vec![polygon_rotation(&h, 2)]))),
        ("dodecagon_z3".to_string(), ws(d.clone(), Some(vec![polygon_rotation(&d, 4)]))),
        ("punctured_square_z4".to_string(), ws(punctured_polygon(4), Some(vec![punctured_polygon_rotation(4)]))),
        ("octahedron_a4".to_string(), ws(octahedron(), Some(octahedron_color_rotations()))),
        ("sphere_four_punctures_z3".to_string(), ws(sphere_four_punctures(), Some(vec![sphere_four_punctures_rotation()]))),
        ("annulus_z2".to_string(), ws(annulus_two_two(), Some(vec![annulus_half_turn()]))),
        ("kronecker_annulus".to_string(), ws(kronecker_annulus(), None)),
        ("bigon_orbifold_point".to_string(), ws(bigon_orbifold_point(), None)),
        ("triangle_orbifold_point".to_string(), ws(triangle_orbifold_point(), None)),
        ("monogon_two_orbifold_points".to_string(), ws(monogon_two_orbifold_points(), None)),
    ];
    for m in 1..=4u32 {
        v.push((format!("once_punctured_monogon_m{m}"), ws(once_punctured_monogon(m), None)));
        v.push((format!("punctured_bigon_m{m}"), ws(punctured_m_bigon(m), None)));
        v.push((format!("sphere_two_orbifold_points_m{m}"), ws(sphere_one_puncture_two_orbifold_points(m), None)));
    }
    v.push(("sphere_two_punctures_orbifold_point_r2_s3".to_string(), ws(sphere_two_punctures_orbifold_point(2, 3), None)));
    v
}
