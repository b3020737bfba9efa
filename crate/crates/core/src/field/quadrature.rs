//! Triangle quadrature in barycentric coordinates.

/// Seven-point rule exact for polynomials of degree 5.
pub const DEGREE5: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_770;
    const B1: f64 = 0.470_142_064_105_115;
    const W1: f64 = 0.132_394_152_788_506;
    const A2: f64 = 0.797_426_985_353_087;
    const B2: f64 = 0.101_286_507_323_456;
    const W2: f64 = 0.125_939_180_544_827;
    const C: f64 = 1.0 / 3.0;
    [
        ([C, C, C], 0.225),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// Edge-midpoint rule, exact for quadratics.
pub const MIDPOINT3: [([f64; 3], f64); 3] = [
    ([0.5, 0.5, 0.0], 1.0 / 3.0),
    ([0.0, 0.5, 0.5], 1.0 / 3.0),
    ([0.5, 0.0, 0.5], 1.0 / 3.0),
];

/// Uniform split of the reference triangle into `s*s` congruent pieces.
///
/// Each piece is returned as three barycentric vertices with respect to the
/// parent triangle; each has area `1/s^2` of the parent.
pub fn subdivide(s: usize) -> Vec<[[f64; 3]; 3]> {
    let s = s.max(1);
    let sf = s as f64;
    let bary = |i: usize, j: usize| {
        let u = i as f64 / sf;
        let v = j as f64 / sf;
        [1.0 - u - v, u, v]
    };
    let mut out = Vec::with_capacity(s * s);
    for j in 0..s {
        for i in 0..s - j {
            out.push([bary(i, j), bary(i + 1, j), bary(i, j + 1)]);
            if i + j + 2 <= s {
                out.push([bary(i + 1, j), bary(i + 1, j + 1), bary(i, j + 1)]);
            }
        }
    }
    out
}

/// Maps a barycentric point of a sub-triangle to parent barycentric coordinates.
#[inline]
pub fn compose(sub: &[[f64; 3]; 3], local: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = sub[0][k] * local[0] + sub[1][k] * local[1] + sub[2][k] * local[2];
    }
    out
}
