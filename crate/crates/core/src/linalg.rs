//! Small complex and real matrix helpers shared by the propagators.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

pub type C = Complex64;
pub type M2 = Matrix2<C>;

pub const I: C = C::new(0.0, 1.0);

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn identity2() -> M2 {
    M2::identity()
}

pub fn pauli_x() -> M2 {
    M2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn pauli_y() -> M2 {
    M2::new(c(0.0), -I, I, c(0.0))
}

pub fn pauli_z() -> M2 {
    M2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// X, Y, Z in that order.
pub fn paulis() -> [M2; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `n · σ` for a real 3-vector.
pub fn bloch(n: [f64; 3]) -> M2 {
    pauli_x() * c(n[0]) + pauli_y() * c(n[1]) + pauli_z() * c(n[2])
}

/// Exact `exp(-i θ/2 n·σ)` for a unit axis `n`.
pub fn rotation(n: [f64; 3], theta: f64) -> M2 {
    let (s, co) = (theta / 2.0).sin_cos();
    identity2() * c(co) - bloch(n) * (I * s)
}

/// Equatorial axis `(cos φ, sin φ, 0)`.
pub fn axis(phi: f64) -> [f64; 3] {
    [phi.cos(), phi.sin(), 0.0]
}

/// Frobenius norm of `U†U − I`.
pub fn unitarity_defect(u: &M2) -> f64 {
    (u.adjoint() * u - identity2()).norm()
}

/// Adjoint-representation matrix `R^{μα} = Tr[U† σ^μ U σ^α] / 2`, with the
/// largest discarded imaginary part.
pub fn adjoint_rep(u: &M2) -> (Matrix3<f64>, f64) {
    let p = paulis();
    let ud = u.adjoint();
    let mut r = Matrix3::zeros();
    let mut imag: f64 = 0.0;
    for mu in 0..3 {
        let left = ud * p[mu] * u;
        for alpha in 0..3 {
            let t = (left * p[alpha]).trace() * 0.5;
            r[(mu, alpha)] = t.re;
            imag = imag.max(t.im.abs());
        }
    }
    (r, imag)
}

/// SO(3) rotation by `theta` about unit axis `n` (Rodrigues).
pub fn so3_rotation(n: [f64; 3], theta: f64) -> Matrix3<f64> {
    let k = Vector3::new(n[0], n[1], n[2]);
    let kx = k.cross_matrix();
    Matrix3::identity() + kx * theta.sin() + kx * kx * (1.0 - theta.cos())
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rotation_by_pi_about_x_is_minus_i_x() {
        let u = rotation([1.0, 0.0, 0.0], std::f64::consts::PI);
        let d = u - pauli_x() * (-I);
        assert!(d.norm() < 1e-15);
    }

    #[test]
    fn adjoint_rep_of_exact_rotation_is_rodrigues() {
        let n = [0.6, 0.0, 0.8];
        let theta = 0.7;
        let (r, imag) = adjoint_rep(&rotation(n, theta));
        assert!(imag < 1e-15);
        let o = so3_rotation(n, theta);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(r[(i, j)], o[(i, j)], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn lcm_basics() {
        assert_eq!(lcm(4, 10), 20);
        assert_eq!(lcm(4, 12), 12);
        assert_eq!(gcd(64, 20), 4);
    }
}
