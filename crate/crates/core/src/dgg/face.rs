//! Cube-face projection.
//!
//! Each of the six faces carries a right-handed `(u, v)` frame in `[-1, 1]²`
//! so that counterclockwise in `(u, v)` is counterclockwise on the sphere
//! seen from outside. Cell coordinates `(s, t)` are the linear rescaling of
//! `(u, v)` onto `[0, 1]²`.

/// Point on the cube surface for `(face, u, v)`. Not normalized.
pub(crate) fn face_uv_to_xyz(face: u8, u: f64, v: f64) -> [f64; 3] {
    match face {
        0 => [1.0, u, v],
        1 => [-u, 1.0, v],
        2 => [-u, -v, 1.0],
        3 => [-1.0, -v, -u],
        4 => [v, -1.0, -u],
        5 => [v, u, -1.0],
        _ => unreachable!("face out of range"),
    }
}

/// `(u, v)` of `p` projected onto `face`. The caller picks a face whose axis
/// dominates `p`.
pub(crate) fn xyz_to_face_uv(face: u8, p: [f64; 3]) -> (f64, f64) {
    let [x, y, z] = p;
    match face {
        0 => (y / x, z / x),
        1 => (-x / y, z / y),
        2 => (-x / z, -y / z),
        3 => (z / x, y / x),
        4 => (z / y, -x / y),
        5 => (-y / z, -x / z),
        _ => unreachable!("face out of range"),
    }
}

/// Faces whose axis carries the largest absolute component. More than one
/// face is returned only for points exactly on a cube edge or corner.
pub(crate) fn candidate_faces(p: [f64; 3]) -> Vec<u8> {
    let abs = [p[0].abs(), p[1].abs(), p[2].abs()];
    let max = abs[0].max(abs[1]).max(abs[2]);
    let mut faces: Vec<u8> = (0..3)
        .filter(|&axis| abs[axis] == max)
        .map(|axis| if p[axis] >= 0.0 { axis as u8 } else { axis as u8 + 3 })
        .collect();
    faces.sort_unstable();
    faces
}

pub(crate) fn st_to_uv(s: f64) -> f64 {
    2.0 * s - 1.0
}

pub(crate) fn uv_to_st(u: f64) -> f64 {
    ((u + 1.0) * 0.5).clamp(0.0, 1.0)
}

pub(crate) fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

pub(crate) fn face_st_to_unit(face: u8, s: f64, t: f64) -> [f64; 3] {
    normalize(face_uv_to_xyz(face, st_to_uv(s), st_to_uv(t)))
}
