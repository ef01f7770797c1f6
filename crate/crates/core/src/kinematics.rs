//! Chart maps, the radial-infall worldline and the momentum bookkeeping
//! (`α`, `β`, `K`) that feeds the Wigner step.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::{metric_at, tetrad_at, ChartPoint, HORIZON_GUARD};

/// Tolerance of the per-sample normalization invariants.
/// Per-sample normalization tolerance, relative to the largest squared
/// component entering the contraction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

fn check_mass(mass: f64) -> Result<()> {
    if mass.is_finite() && mass > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("M", mass, "mass must be positive and finite"))
    }
}

fn check_exterior(r: f64, mass: f64) -> Result<()> {
    if r > 2.0 * mass * (1.0 + HORIZON_GUARD) && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("r", r, "need r > 2M(1+ε)"))
    }
}

/// `(t, r) ↦ (T, X)` on region I.
pub fn kruskal_from_schwarzschild(t: f64, r: f64, mass: f64) -> Result<(f64, f64)> {
    check_mass(mass)?;
    if !(r > 2.0 * mass) || !t.is_finite() {
        return Err(Error::domain("r", r, "Kruskal map needs finite t and r > 2M"));
    }
    let rho = r / (2.0 * mass);
    let scale = ((r - 2.0 * mass) / (2.0 * mass)).sqrt() * (0.5 * rho).exp();
    let tau = t / (4.0 * mass);
    let (big_t, big_x) = (scale * tau.sinh(), scale * tau.cosh());
    if !(big_t.is_finite() && big_x.is_finite()) {
        return Err(Error::domain("X", big_x, "Kruskal image exceeds double range"));
    }
    Ok((big_t, big_x))
}

/// Inverse of [`kruskal_from_schwarzschild`] on the region-I exterior `X > |T|`.
pub fn schwarzschild_from_kruskal(big_t: f64, big_x: f64, mass: f64) -> Result<(f64, f64)> {
    check_mass(mass)?;
    if !(big_x > big_t.abs()) || !big_x.is_finite() {
        return Err(Error::domain("X", big_x, "region I needs X > |T|"));
    }
    let w = (big_x - big_t) * (big_x + big_t);
    let r = crate::geometry::areal_radius(w, mass)?.radius;
    let t = 4.0 * mass * (big_t / big_x).atanh();
    Ok((t, r))
}

/// `∂(T, X)/∂(t, r)`, rows `(T, X)`, columns `(t, r)`.
pub fn kruskal_jacobian(t: f64, r: f64, mass: f64) -> Result<[[f64; 2]; 2]> {
    let (big_t, big_x) = kruskal_from_schwarzschild(t, r, mass)?;
    let q = 4.0 * mass;
    let f = 1.0 - 2.0 * mass / r;
    Ok([[big_x / q, big_t / (q * f)], [big_t / q, big_x / (q * f)]])
}

/// Four-velocity `U^μ` in `(t, r, θ, φ)` for radial infall with rapidity `α`
/// relative to the static observer.
pub fn radial_velocity(r: f64, alpha: f64, mass: f64) -> Result<[f64; 4]> {
    check_mass(mass)?;
    check_exterior(r, mass)?;
    let sf = (1.0 - 2.0 * mass / r).sqrt();
    Ok([alpha.cosh() / sf, -sf * alpha.sinh(), 0.0, 0.0])
}

/// Local-frame energy, rapidity and the kinematic factor `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumState {
    pub mass: f64,
    pub energy: f64,
    pub alpha: f64,
    pub k: f64,
}

impl MomentumState {
    /// From a rapidity. `K = tanh(α/2)` equals `√((p⁰ − m)/(p⁰ + m))` and
    /// stays accurate for tiny `α`, where `p⁰ − m` cancels.
    pub fn from_rapidity(alpha: f64, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::domain("m", mass, "rest mass must be positive"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::domain("α", alpha, "rapidity must be finite and non-negative"));
        }
        Ok(MomentumState {
            mass,
            energy: mass * alpha.cosh(),
            alpha,
            k: (0.5 * alpha).tanh(),
        })
    }
}

pub fn momentum_state(p0: f64, m: f64) -> Result<MomentumState> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::domain("m", m, "rest mass must be positive"));
    }
    if !(p0 >= m) || !p0.is_finite() {
        return Err(Error::domain("p⁰", p0, "need p⁰ ≥ m"));
    }
    Ok(MomentumState {
        mass: m,
        energy: p0,
        alpha: (p0 / m).acosh(),
        k: ((p0 - m) / (p0 + m)).sqrt(),
    })
}

/// One point of an integrated radial worldline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldlineSample {
    pub proper_time: f64,
    /// Schwarzschild-chart image, equatorial.
    pub point: ChartPoint,
    pub kruskal_t: f64,
    pub kruskal_x: f64,
    /// `U^μ` in `(t, r, θ, φ)`.
    pub velocity: [f64; 4],
    /// `U^a` in the Kruskal tetrad frame.
    pub local_velocity: [f64; 4],
    /// `β = α + t/4M`
    pub beta: f64,
    /// `T` increment to the next sample, zero on the last one.
    pub d_kruskal_t: f64,
}

impl WorldlineSample {
    pub fn t(&self) -> f64 {
        self.point.coords()[0]
    }

    pub fn r(&self) -> f64 {
        self.point.radius()
    }

    pub fn mass(&self) -> f64 {
        self.point.mass()
    }

    /// `g_μν U^μ U^ν + 1`
    pub fn normalization_defect(&self) -> f64 {
        metric_at(&self.point).inner(&self.velocity, &self.velocity) + 1.0
    }

    /// `(U⁰)² − (U¹)² − 1` in the local frame.
    pub fn local_normalization_defect(&self) -> f64 {
        let u = self.local_velocity;
        u[0] * u[0] - u[1] * u[1] - u[2] * u[2] - u[3] * u[3] - 1.0
    }
}

/// Kruskal-frame components of `U` from the Kruskal tetrad and the Jacobian of the chart map.
pub fn local_velocity(t: f64, r: f64, velocity: &[f64; 4], mass: f64) -> Result<[f64; 4]> {
    let (big_t, big_x) = kruskal_from_schwarzschild(t, r, mass)?;
    let point = ChartPoint::kruskal(mass, big_t, big_x, FRAC_PI_2, 0.0)?;
    let j = kruskal_jacobian(t, r, mass)?;
    let u_kruskal = [
        j[0][0] * velocity[0] + j[0][1] * velocity[1],
        j[1][0] * velocity[0] + j[1][1] * velocity[1],
        velocity[2],
        velocity[3],
    ];
    Ok(tetrad_at(&point).to_local(&u_kruskal))
}

/// Classical fourth-order Runge–Kutta step for `y' = f(x, y)`.
fn rk4_step<const N: usize, F>(x: f64, y: [f64; N], h: f64, f: &F) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let axpy = |y: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] { std::array::from_fn(|i| y[i] + s * k[i]) };
    let k1 = f(x, &y);
    let k2 = f(x + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
    let k3 = f(x + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
    let k4 = f(x + h, &axpy(&y, &k3, h));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Radial infall from `r_start` down to `r_end` at fixed rapidity `α₀`,
/// parameterized by `r` on a uniform grid of `n_steps` segments.
///
/// `t(r)` and proper time come from RK4 on `dt/dr = Uᵗ/Uʳ` and `dτ/dr = 1/Uʳ`,
/// starting at `t = τ = 0`. Each sample is checked against the normalization
/// and region-I invariants; a violation is reported with its index.
pub fn integrate_worldline(
    r_start: f64,
    r_end: f64,
    alpha0: f64,
    mass: f64,
    n_steps: usize,
) -> Result<Vec<WorldlineSample>> {
    check_mass(mass)?;
    check_exterior(r_end, mass)?;
    if !(r_start > r_end) || !r_start.is_finite() {
        return Err(Error::domain("r_start", r_start, "need r_start > r_end"));
    }
    if !(alpha0.is_finite() && alpha0 > 0.0) {
        return Err(Error::domain("α₀", alpha0, "infall needs α₀ > 0"));
    }
    if n_steps < 2 {
        return Err(Error::domain("n_steps", n_steps as f64, "need at least 2 steps"));
    }

    let (cosh_a, sinh_a) = (alpha0.cosh(), alpha0.sinh());
    let rhs = |r: f64, _: &[f64; 2]| -> [f64; 2] {
        let f = 1.0 - 2.0 * mass / r;
        [-cosh_a / (f * sinh_a), -1.0 / (f.sqrt() * sinh_a)]
    };
    let h = (r_end - r_start) / n_steps as f64;
    let radius_at = |k: usize| if k == n_steps { r_end } else { r_start + k as f64 * h };

    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut state = [0.0_f64; 2];
    for k in 0..=n_steps {
        let r = radius_at(k);
        if k > 0 {
            state = rk4_step(radius_at(k - 1), state, r - radius_at(k - 1), &rhs);
        }
        let sample = make_sample(k, state[0], state[1], r, alpha0, mass)?;
        samples.push(sample);
    }
    for k in 0..n_steps {
        let d = samples[k + 1].kruskal_t - samples[k].kruskal_t;
        samples[k].d_kruskal_t = d;
    }
    Ok(samples)
}

fn make_sample(index: usize, t: f64, tau: f64, r: f64, alpha: f64, mass: f64) -> Result<WorldlineSample> {
    let step_err = |quantity: &'static str, value: f64, requirement: &'static str| Error::Step {
        index,
        quantity,
        value,
        requirement,
    };
    let point = ChartPoint::schwarzschild(mass, t, r, FRAC_PI_2, 0.0).map_err(|e| e.at_sample(index))?;
    let velocity = radial_velocity(r, alpha, mass).map_err(|e| e.at_sample(index))?;
    let (big_t, big_x) = kruskal_from_schwarzschild(t, r, mass)
        .map_err(|_| step_err("Kruskal image", r / mass, "region-I image must be representable"))?;
    if !(big_x > big_t.abs()) {
        return Err(step_err("X − |T|", big_x - big_t.abs(), "region I needs X > |T|"));
    }
    let local = local_velocity(t, r, &velocity, mass)
        .map_err(|_| step_err("Kruskal image", r / mass, "region-I image must be representable"))?;
    let sample = WorldlineSample {
        proper_time: tau,
        point,
        kruskal_t: big_t,
        kruskal_x: big_x,
        velocity,
        local_velocity: local,
        beta: alpha + t / (4.0 * mass),
        d_kruskal_t: 0.0,
    };
    let defect = sample.normalization_defect();
    let scale = (velocity[0] * velocity[0] * (1.0 - 2.0 * mass / r)).max(1.0);
    if !(defect.abs() <= NORMALIZATION_TOLERANCE * scale) {
        return Err(step_err("g(U,U) + 1", defect, "four-velocity must be unit timelike"));
    }
    let local_defect = sample.local_normalization_defect();
    if !(local_defect.abs() <= NORMALIZATION_TOLERANCE * (local[0] * local[0]).max(1.0)) {
        return Err(step_err(
            "(U⁰)² − (U¹)² − 1",
            local_defect,
            "local-frame velocity must be unit timelike",
        ));
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn forward_map_examples() {
        let (big_t, big_x) = kruskal_from_schwarzschild(0.0, 4.0, 1.0).unwrap();
        assert_eq!(big_t, 0.0);
        assert!((big_x - E).abs() < 1e-15);
        let (t0, x0) = kruskal_from_schwarzschild(0.0, 2.0 * (1.0 + 1e-14), 1.0).unwrap();
        assert_eq!(t0, 0.0);
        assert!(x0 < 1e-6);
        assert!(kruskal_from_schwarzschild(0.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn inverse_map_examples() {
        let (t, r) = schwarzschild_from_kruskal(0.0, E, 1.0).unwrap();
        assert!(t.abs() < 1e-15 && (r - 4.0).abs() < 1e-12);
        let (_, r_h) = schwarzschild_from_kruskal(0.0, 1e-7, 1.0).unwrap();
        assert!((r_h - 2.0).abs() < 1e-12);
        assert!(schwarzschild_from_kruskal(1.0, 0.5, 1.0).is_err());
        assert!(schwarzschild_from_kruskal(0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn radial_velocity_examples() {
        let u = radial_velocity(4.0, 0.0, 1.0).unwrap();
        assert_eq!(u, [1.0 / 0.5f64.sqrt(), 0.0, 0.0, 0.0]);
        let u = radial_velocity(4.0, 1.0, 1.0).unwrap();
        assert!((u[0] - 1f64.cosh() / 0.5f64.sqrt()).abs() < 1e-15);
        let p = ChartPoint::schwarzschild(1.0, 0.0, 4.0, FRAC_PI_2, 0.0).unwrap();
        assert!((metric_at(&p).inner(&u, &u) + 1.0).abs() < 1e-12);
        assert!(radial_velocity(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn local_velocity_is_boosted_static_frame() {
        // Kruskal frame = static frame boosted by t/4M, so U¹ = sinh(t/4M − α).
        let (t, r, alpha) = (1.3, 5.0, 0.8);
        let u = radial_velocity(r, alpha, 1.0).unwrap();
        let local = local_velocity(t, r, &u, 1.0).unwrap();
        let eta = t / 4.0 - alpha;
        assert!((local[0] - eta.cosh()).abs() < 1e-12);
        assert!((local[1] - eta.sinh()).abs() < 1e-12);
        assert_eq!(&local[2..], &[0.0, 0.0]);
    }

    #[test]
    fn momentum_examples() {
        let rest = momentum_state(1.0, 1.0).unwrap();
        assert_eq!((rest.k, rest.alpha), (0.0, 0.0));
        let m = momentum_state(1.25, 1.0).unwrap();
        assert!((m.k - 1.0 / 3.0).abs() < 1e-15);
        let fast = momentum_state(1e12, 1.0).unwrap();
        assert!(fast.k < 1.0 && fast.k > 1.0 - 1e-11);
        assert!(momentum_state(0.5, 1.0).is_err());
        let r = MomentumState::from_rapidity(m.alpha, 1.0).unwrap();
        assert!((r.k - m.k).abs() < 1e-15);
    }

    #[test]
    fn short_worldline_matches_euler() {
        let w = integrate_worldline(6.0, 5.999, 1.0, 1.0, 2).unwrap();
        assert_eq!(w.len(), 3);
        let u = radial_velocity(6.0, 1.0, 1.0).unwrap();
        let euler = u[0] / u[1] * (5.999 - 6.0);
        let dt = w[2].t() - w[0].t();
        assert!((dt - euler).abs() / euler.abs() < 1e-3);
        assert_eq!(w[2].r(), 5.999);
        assert_eq!(w[2].d_kruskal_t, 0.0);
    }

    #[test]
    fn worldline_rejects_bad_requests() {
        assert!(integrate_worldline(6.0, 6.0, 1.0, 1.0, 10).is_err());
        assert!(integrate_worldline(6.0, 2.0, 1.0, 1.0, 10).is_err());
        assert!(integrate_worldline(6.0, 3.0, 0.0, 1.0, 10).is_err());
        assert!(integrate_worldline(6.0, 3.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn unrepresentable_kruskal_image_names_the_sample() {
        let err = integrate_worldline(1e6, 1e6 - 10.0, 1e-6, 1.0, 10).unwrap_err();
        assert!(matches!(err, Error::Step { index: 0, .. }), "{err}");
    }
}
