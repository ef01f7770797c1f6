//! 2×2 complex matrices acting on spin-1/2 states.

use std::fmt;
use std::ops::Mul;

use nalgebra::Matrix2;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A (possibly non-unitary) spin-1/2 Wigner map `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorMap(pub Matrix2<Complex64>);

impl SpinorMap {
    pub fn new(d11: Complex64, d12: Complex64, d21: Complex64, d22: Complex64) -> Self {
        SpinorMap(Matrix2::new(d11, d12, d21, d22))
    }

    pub fn from_real(d11: f64, d12: f64, d21: f64, d22: f64) -> Self {
        Self::new(d11.into(), d12.into(), d21.into(), d22.into())
    }

    pub fn identity() -> Self {
        SpinorMap(Matrix2::identity())
    }

    pub fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        let i = Complex64::i();
        Self::new(ZERO, -i, i, ZERO)
    }

    pub fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    /// The unitary element of shape `((A, B), (-B*, A*))`.
    pub fn su2(a: Complex64, b: Complex64) -> Self {
        Self::new(a, b, -b.conj(), a.conj())
    }

    /// `c0·I + c1·σ₁`.
    pub fn radial(c0: f64, c1: f64) -> Self {
        Self::from_real(c0, c1, c1, c0)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Entries in row-major order `[D11, D12, D21, D22]`.
    pub fn entries(&self) -> [Complex64; 4] {
        [self.get(0, 0), self.get(0, 1), self.get(1, 0), self.get(1, 1)]
    }

    pub fn adjoint(&self) -> Self {
        SpinorMap(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.get(0, 0) + self.get(1, 1)
    }

    pub fn determinant(&self) -> Complex64 {
        self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        SpinorMap(self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        SpinorMap(self.0 + other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        SpinorMap(self.0 - other.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix exponential via Cayley–Hamilton: with `G = μI + N`, `tr N = 0`,
    /// `N² = s²I` and `exp G = e^μ (cosh s · I + sinh(s)/s · N)`.
    pub fn exp(&self) -> Self {
        let mu = self.trace() * 0.5;
        let n = self.sub(&Self::identity().scale(mu));
        let s2 = -n.determinant();
        let s = s2.sqrt();
        let (cosh_s, sinhc) = if s.norm() < 1e-4 {
            let s4 = s2 * s2;
            (
                ONE + s2 / 2.0 + s4 / 24.0 + s4 * s2 / 720.0,
                ONE + s2 / 6.0 + s4 / 120.0 + s4 * s2 / 5040.0,
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        let em = mu.exp();
        Self::identity().scale(cosh_s * em).add(&n.scale(sinhc * em))
    }
}

impl Mul for SpinorMap {
    type Output = SpinorMap;

    fn mul(self, rhs: SpinorMap) -> SpinorMap {
        SpinorMap(self.0 * rhs.0)
    }
}

impl Mul for &SpinorMap {
    type Output = SpinorMap;

    fn mul(self, rhs: &SpinorMap) -> SpinorMap {
        SpinorMap(self.0 * rhs.0)
    }
}

impl fmt::Display for SpinorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries();
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_exp(g: &SpinorMap) -> SpinorMap {
        // Scaling and squaring with a long Taylor series, as an independent route.
        let squarings = 12;
        let scaled = g.scale(Complex64::new(1.0 / f64::from(1 << squarings), 0.0));
        let mut term = SpinorMap::identity();
        let mut sum = SpinorMap::identity();
        for k in 1..30 {
            term = (term * scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn exp_matches_taylor_series() {
        let cases = [
            SpinorMap::new(
                Complex64::new(0.3, -0.2),
                Complex64::new(1.1, 0.4),
                Complex64::new(-0.7, 0.05),
                Complex64::new(-0.1, 0.9),
            ),
            SpinorMap::radial(-0.4, 0.8),
            SpinorMap::radial(1e-9, -3e-8),
            // nilpotent: s = 0
            SpinorMap::from_real(0.0, 1.0, 0.0, 0.0),
        ];
        for g in cases {
            let d = g.exp().distance(&taylor_exp(&g));
            assert!(d < 1e-12, "{g}: {d}");
        }
    }

    #[test]
    fn exp_of_radial_generator_is_hyperbolic() {
        let (g0, g1) = (-0.25_f64, 0.6_f64);
        let e = SpinorMap::radial(g0, g1).exp();
        let expected = SpinorMap::radial(g0.exp() * g1.cosh(), g0.exp() * g1.sinh());
        assert!(e.distance(&expected) < 1e-15);
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (SpinorMap::sigma_x(), SpinorMap::sigma_y(), SpinorMap::sigma_z());
        let i = Complex64::i();
        assert_eq!(x * x, SpinorMap::identity());
        assert!((x * y).distance(&z.scale(i)) < 1e-15);
        let det = SpinorMap::su2(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).determinant();
        assert!((det - ONE).norm() < 1e-15);
    }
}
