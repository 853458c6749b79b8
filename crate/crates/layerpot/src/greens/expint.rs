//! Exponential integral `E1(z) = int_z^inf e^{-t}/t dt` for `Re z >= 0`.

use crate::linalg::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Principal-branch `E1(z)`; accurate to about 1e-14 relative on `Re z >= 0`.
pub fn expint_e1(z: C64) -> C64 {
    if z.norm() <= 4.0 {
        series(z)
    } else {
        fraction(z)
    }
}

fn series(z: C64) -> C64 {
    // Power series: E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!).
    let mut sum = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    for k in 1..200 {
        term *= -z / k as f64;
        let t = term / k as f64;
        sum += t;
        if t.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

fn fraction(z: C64) -> C64 {
    // Continued fraction E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))), modified Lentz.
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = C64::new(1.0 / tiny, 0.0);
    let mut d = C64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..5000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = C64::new(1.0, 0.0) / (d * a + b);
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference by direct quadrature along the ray z + s, s in [0, inf).
    fn quad(z: C64) -> C64 {
        let n = 200_000;
        let l = 60.0;
        let h = l / n as f64;
        let f = |s: f64| (-(z + s)).exp() / (z + s);
        let mut acc = (f(0.0) + f(l)) * 0.5;
        for k in 1..n {
            acc += f(k as f64 * h);
        }
        acc * h
    }

    #[test]
    fn matches_real_values() {
        // E1(1) and E1(0.1) from standard tables.
        assert!((expint_e1(C64::new(1.0, 0.0)).re - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((expint_e1(C64::new(0.1, 0.0)).re - 1.822_923_958_419_390_7).abs() < 1e-13);
    }

    #[test]
    fn matches_quadrature_in_right_half_plane() {
        for z in [
            C64::new(0.5, 3.0),
            C64::new(0.0, 5.0),
            C64::new(2.0, -1.0),
            C64::new(3.9, 0.5),
            C64::new(0.01, -7.0),
        ] {
            let r = quad(z);
            assert!(
                (expint_e1(z) - r).norm() < 1e-7 * r.norm().max(1e-3),
                "z = {z}"
            );
        }
    }

    #[test]
    fn series_and_fraction_agree_at_switch() {
        for th in [0.0f64, 0.7, 1.5, -1.5] {
            let z = C64::from_polar(4.0, th);
            let (a, b) = (series(z), fraction(z));
            assert!((a - b).norm() < 1e-12 * a.norm(), "z = {z}: {a} vs {b}");
        }
    }
}
