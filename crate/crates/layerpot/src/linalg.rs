//! Small fixed-size types and complex helpers.

pub use num_complex::Complex64 as C64;

/// A point (or real vector) in the plane.
pub type Point = nalgebra::Vector2<f64>;
/// A complex 2-vector, used for gradients of complex potentials.
pub type CVec2 = nalgebra::Vector2<C64>;
/// A complex 2x2 matrix, used for coefficient values.
pub type CMat2 = nalgebra::Matrix2<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Promote a real vector to a complex one.
pub fn cvec(p: &Point) -> CVec2 {
    CVec2::new(c(p.x), c(p.y))
}

/// Rotation by +90 degrees, `[[0,-1],[1,0]]`.
pub fn rot90(p: &Point) -> Point {
    Point::new(-p.y, p.x)
}

pub fn crot90(v: &CVec2) -> CVec2 {
    CVec2::new(-v.y, v.x)
}

/// Real vector dotted with a complex vector (no conjugation).
pub fn rdot(a: &Point, b: &CVec2) -> C64 {
    b.x * a.x + b.y * a.y
}

/// Bilinear (non-conjugated) product of two complex vectors.
pub fn bdot(a: &CVec2, b: &CVec2) -> C64 {
    a.x * b.x + a.y * b.y
}

pub fn cmat(a11: C64, a12: C64, a21: C64, a22: C64) -> CMat2 {
    CMat2::new(a11, a12, a21, a22)
}

pub fn cdet(a: &CMat2) -> C64 {
    a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
}

/// Maximum absolute entry of a complex 2x2 matrix.
pub fn cmax_abs(a: &CMat2) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Weighted discrete L2 norm `(sum w |f|^2)^(1/2)`.
pub fn wnorm2(w: &[f64], f: &[C64]) -> f64 {
    w.iter()
        .zip(f)
        .map(|(w, f)| w * f.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Weighted bilinear pairing `sum w g f` (no conjugation).
pub fn wpair(w: &[f64], g: &[C64], f: &[C64]) -> C64 {
    w.iter().zip(g).zip(f).map(|((w, g), f)| g * f * *w).sum()
}
