//! Small planar geometry helpers shared by the mesh, interface and AMR code.

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

#[inline]
pub fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Twice the signed area of triangle `abc` (positive when counter-clockwise).
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

pub fn triangle_area(t: &[Point; 3]) -> f64 {
    0.5 * orient(t[0], t[1], t[2])
}

pub fn centroid(t: &[Point; 3]) -> Point {
    [
        (t[0][0] + t[1][0] + t[2][0]) / 3.0,
        (t[0][1] + t[1][1] + t[2][1]) / 3.0,
    ]
}

/// Gradient of the linear function taking the values `v` at the corners of `t`.
pub fn plane_gradient(t: &[Point; 3], v: [f64; 3]) -> Point {
    let d1 = sub(t[1], t[0]);
    let d2 = sub(t[2], t[0]);
    let (a, b) = (v[1] - v[0], v[2] - v[0]);
    let det = cross(d1, d2);
    [(a * d2[1] - b * d1[1]) / det, (b * d1[0] - a * d2[0]) / det]
}

/// Signed area of a simple polygon (shoelace formula).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    0.5 * s
}

/// Clip a convex polygon to the half-plane `n . x >= alpha`.
pub fn clip_halfplane(poly: &[Point], n: Point, alpha: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    let len = poly.len();
    for i in 0..len {
        let a = poly[i];
        let b = poly[(i + 1) % len];
        let da = dot(n, a) - alpha;
        let db = dot(n, b) - alpha;
        if da >= 0.0 {
            out.push(a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            let s = da / (da - db);
            out.push(lerp(a, b, s));
        }
    }
    out
}

/// Barycentric coordinates of `p` relative to triangle `t`.
pub fn barycentric(t: &[Point; 3], p: Point) -> [f64; 3] {
    let d = orient(t[0], t[1], t[2]);
    let l0 = orient(p, t[1], t[2]) / d;
    let l1 = orient(t[0], p, t[2]) / d;
    [l0, l1, 1.0 - l0 - l1]
}

pub fn point_in_triangle(t: &[Point; 3], p: Point, tol: f64) -> bool {
    let l = barycentric(t, p);
    l.iter().all(|&x| x >= -tol)
}
