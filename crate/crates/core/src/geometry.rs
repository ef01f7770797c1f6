//! Schwarzschild and Kruskal charts.
//!
//! Both charts are diagonal, so metrics, tetrads and their derivatives are
//! evaluated from closed forms. Every analytic quantity that feeds the spin
//! transport has a finite-difference counterpart built only from [`metric_at`]
//! and [`tetrad_at`], used as an oracle.
//!
//! Index conventions: coordinate indices run over `(t, r, θ, φ)` or
//! `(T, X, θ, φ)`; local (tetrad) indices over `0..4` with
//! `η = diag(-1, 1, 1, 1)`.

use std::f64::consts::{E, PI};

use nalgebra::Matrix4;

use crate::error::{Error, Result};

/// Relative horizon guard: Schwarzschild-chart points need `r > 2M(1 + ε)`.
pub const HORIZON_GUARD: f64 = 1e-9;

/// Relative finite-difference step, scaled by `max(1, |x|)` per coordinate.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Iteration cap for the areal-radius Newton solve.
pub const NEWTON_MAX_ITERATIONS: usize = 50;

/// Newton stops once `|Δr| < NEWTON_TOLERANCE · 2M`.
pub const NEWTON_TOLERANCE: f64 = 1e-12;

pub const MINKOWSKI: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

pub fn minkowski() -> Matrix4<f64> {
    Matrix4::from_diagonal(&MINKOWSKI.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// `(t, r, θ, φ)`
    Schwarzschild,
    /// `(T, X, θ, φ)`
    Kruskal,
}

/// A validated point of one of the two charts, with its areal radius cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    chart: Chart,
    coords: [f64; 4],
    mass: f64,
    radius: f64,
}

impl ChartPoint {
    pub fn new(chart: Chart, mass: f64, coords: [f64; 4]) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::domain("M", mass, "mass must be positive and finite"));
        }
        if let Some(&bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::domain("coordinate", bad, "coordinates must be finite"));
        }
        let theta = coords[2];
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::domain("θ", theta, "need 0 < θ < π"));
        }
        let radius = match chart {
            Chart::Schwarzschild => {
                let r = coords[1];
                if !(r > 2.0 * mass * (1.0 + HORIZON_GUARD)) {
                    return Err(Error::domain("r", r, "Schwarzschild chart needs r > 2M(1+ε)"));
                }
                r
            }
            Chart::Kruskal => {
                let (big_t, big_x) = (coords[0], coords[1]);
                let w = (big_x - big_t) * (big_x + big_t);
                let r = areal_radius(w, mass)?.radius;
                let f = kruskal_conformal_factor(r, mass);
                if !(f.is_normal() && (1.0 / f).is_finite()) {
                    return Err(Error::domain(
                        "r",
                        r,
                        "Kruskal conformal factor 32M³/r·exp(-r/2M) leaves double range",
                    ));
                }
                r
            }
        };
        Ok(ChartPoint {
            chart,
            coords,
            mass,
            radius,
        })
    }

    pub fn schwarzschild(mass: f64, t: f64, r: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(Chart::Schwarzschild, mass, [t, r, theta, phi])
    }

    pub fn kruskal(mass: f64, big_t: f64, big_x: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(Chart::Kruskal, mass, [big_t, big_x, theta, phi])
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn coords(&self) -> [f64; 4] {
        self.coords
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Areal radius `r`, solved from `X² − T²` for Kruskal points.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn theta(&self) -> f64 {
        self.coords[2]
    }

    /// The same point shifted by `delta` along coordinate `axis`.
    pub fn displaced(&self, axis: usize, delta: f64) -> Result<Self> {
        let mut c = self.coords;
        c[axis] += delta;
        Self::new(self.chart, self.mass, c)
    }
}

/// Result of solving `(r/2M − 1)·exp(r/2M) = X² − T²` for `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSolution {
    pub radius: f64,
    pub iterations: usize,
}

/// Areal radius from `w = X² − T²`.
///
/// With `ρ = r/2M` the equation is `(ρ − 1)e^ρ = w`, monotone for `ρ > 0`.
/// For `w ≤ e²` Newton runs on that form from `ρ₀ = 1 + max(w, 10⁻³)/e`,
/// which always sits right of the root of the convex residual. Larger `w`
/// overflow that form, so Newton runs on `ln(ρ − 1) + ρ − ln w` from a
/// Lambert-W asymptotic guess, left of the root of a concave residual. Both
/// branches converge monotonically.
pub fn areal_radius(w: f64, mass: f64) -> Result<RadiusSolution> {
    if !w.is_finite() || w <= -1.0 {
        return Err(Error::domain("X² − T²", w, "Kruskal chart needs X² − T² > −1"));
    }
    let mut last_step = f64::INFINITY;
    if w <= E * E {
        let mut rho = 1.0 + w.max(1e-3) / E;
        for iteration in 1..=NEWTON_MAX_ITERATIONS {
            let e = rho.exp();
            let step = ((rho - 1.0) * e - w) / (rho * e);
            rho -= step;
            last_step = step;
            if step.abs() < NEWTON_TOLERANCE * rho.max(1.0) {
                return finish(rho, mass, iteration);
            }
        }
    } else {
        let ln_w = w.ln();
        let ln_z = ln_w - 1.0;
        let mut u = ln_z - ln_z.ln();
        for iteration in 1..=NEWTON_MAX_ITERATIONS {
            let step = (u.ln() + u - ln_z) / (1.0 / u + 1.0);
            u -= step;
            last_step = step;
            if step.abs() < NEWTON_TOLERANCE * (u + 1.0).max(1.0) {
                return finish(u + 1.0, mass, iteration);
            }
        }
    }
    Err(Error::Convergence {
        quantity: "areal radius r(X² − T²)",
        iterations: NEWTON_MAX_ITERATIONS,
        last_step,
    })
}

fn finish(rho: f64, mass: f64, iterations: usize) -> Result<RadiusSolution> {
    if !(rho > 0.0) {
        return Err(Error::domain("r/2M", rho, "areal radius must be positive"));
    }
    Ok(RadiusSolution {
        radius: 2.0 * mass * rho,
        iterations,
    })
}

/// `32M³/r · exp(−r/2M)`, the conformal factor of the Kruskal `(T, X)` block.
pub fn kruskal_conformal_factor(r: f64, mass: f64) -> f64 {
    32.0 * mass.powi(3) / r * (-r / (2.0 * mass)).exp()
}

/// `g_μν` at a point, signature `(−, +, +, +)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub components: Matrix4<f64>,
}

impl Metric {
    #[inline]
    pub fn g(&self, mu: usize, nu: usize) -> f64 {
        self.components[(mu, nu)]
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.g(0, 0), self.g(1, 1), self.g(2, 2), self.g(3, 3)]
    }

    pub fn is_symmetric(&self) -> bool {
        self.components == self.components.transpose()
    }

    /// Signs of the diagonal, `[-1, 1, 1, 1]` for a healthy point.
    pub fn signature(&self) -> [i8; 4] {
        self.diagonal().map(|d| if d < 0.0 { -1 } else { 1 })
    }

    /// `g_μν u^μ v^ν`
    pub fn inner(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                s += self.g(mu, nu) * u[mu] * v[nu];
            }
        }
        s
    }
}

pub fn metric_at(point: &ChartPoint) -> Metric {
    Metric {
        components: Matrix4::from_diagonal(&metric_diagonal(point).into()),
    }
}

fn metric_diagonal(point: &ChartPoint) -> [f64; 4] {
    let m = point.mass;
    let r = point.radius;
    let s = point.theta().sin();
    match point.chart {
        Chart::Schwarzschild => {
            let f = 1.0 - 2.0 * m / r;
            [-f, 1.0 / f, r * r, r * r * s * s]
        }
        Chart::Kruskal => {
            let big_f = kruskal_conformal_factor(r, m);
            [-big_f, big_f, r * r, r * r * s * s]
        }
    }
}

/// Analytic first derivatives of the diagonal metric: `d[λ][μ] = ∂_λ g_μμ`.
pub fn metric_gradient(point: &ChartPoint) -> [[f64; 4]; 4] {
    let m = point.mass;
    let r = point.radius;
    let (s, c) = point.theta().sin_cos();
    let mut d = [[0.0; 4]; 4];
    match point.chart {
        Chart::Schwarzschild => {
            let f = 1.0 - 2.0 * m / r;
            let df = 2.0 * m / (r * r);
            d[1] = [-df, -df / (f * f), 2.0 * r, 2.0 * r * s * s];
            d[2][3] = 2.0 * r * r * s * c;
        }
        Chart::Kruskal => {
            let [big_t, big_x, ..] = point.coords;
            let rho = r / (2.0 * m);
            let big_f = kruskal_conformal_factor(r, m);
            // ∂ρ/∂T, ∂ρ/∂X from (ρ − 1)e^ρ = X² − T²
            let decay = (-rho).exp() / rho;
            let drho = [-2.0 * big_t * decay, 2.0 * big_x * decay];
            for (axis, dr) in drho.iter().enumerate() {
                let dfk = -big_f * (1.0 + rho) / rho * dr;
                let dr_areal = 2.0 * m * dr;
                d[axis] = [-dfk, dfk, 2.0 * r * dr_areal, 2.0 * r * s * s * dr_areal];
            }
            d[2][3] = 2.0 * r * r * s * c;
        }
    }
    d
}

/// Frame fields at a point: `forward[(a, μ)] = e_a^μ`, `inverse[(a, μ)] = e^a_μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrad {
    pub forward: Matrix4<f64>,
    pub inverse: Matrix4<f64>,
    pub point: ChartPoint,
}

impl Tetrad {
    /// `e^a_μ e^b_ν η_ab`
    pub fn induced_metric(&self) -> Matrix4<f64> {
        self.inverse.transpose() * minkowski() * self.inverse
    }

    /// `max |e^a_μ e^b_ν η_ab − g_μν|`
    pub fn metric_residual(&self) -> f64 {
        (self.induced_metric() - metric_at(&self.point).components).amax()
    }

    /// Max deviation of `e_a^μ e^a_ν` from `δ^μ_ν` and of `e_a^κ e^b_κ` from `δ_a^b`.
    pub fn duality_residual(&self) -> f64 {
        let id = Matrix4::identity();
        let coord = (self.forward.transpose() * self.inverse - id).amax();
        let local = (self.forward * self.inverse.transpose() - id).amax();
        coord.max(local)
    }

    /// Local-frame components `V^a = e^a_μ V^μ`.
    pub fn to_local(&self, v: &[f64; 4]) -> [f64; 4] {
        let out = self.inverse * nalgebra::Vector4::from(*v);
        [out[0], out[1], out[2], out[3]]
    }

    /// Multiplies every co-frame component by `1 + eps`; a sensitivity hook
    /// for the verification suite.
    pub fn perturbed(&self, eps: f64) -> Tetrad {
        Tetrad {
            forward: self.forward,
            inverse: self.inverse * (1.0 + eps),
            point: self.point,
        }
    }
}

pub fn tetrad_at(point: &ChartPoint) -> Tetrad {
    let m = point.mass;
    let r = point.radius;
    let s = point.theta().sin();
    let (inv, fwd) = match point.chart {
        Chart::Schwarzschild => {
            let sf = (1.0 - 2.0 * m / r).sqrt();
            ([sf, 1.0 / sf, r, r * s], [1.0 / sf, sf, 1.0 / r, 1.0 / (r * s)])
        }
        Chart::Kruskal => {
            let m3 = m.powi(3);
            let down = (32.0 * m3 / r).sqrt() * (-r / (4.0 * m)).exp();
            let up = (r / (32.0 * m3)).sqrt() * (r / (4.0 * m)).exp();
            ([down, down, r, r * s], [up, up, 1.0 / r, 1.0 / (r * s)])
        }
    };
    Tetrad {
        forward: Matrix4::from_diagonal(&fwd.into()),
        inverse: Matrix4::from_diagonal(&inv.into()),
        point: *point,
    }
}

/// `Γ^μ_{νλ}` stored as `gamma[μ][ν][λ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelSymbols {
    pub gamma: [[[f64; 4]; 4]; 4],
}

impl ChristoffelSymbols {
    #[inline]
    pub fn get(&self, mu: usize, nu: usize, lambda: usize) -> f64 {
        self.gamma[mu][nu][lambda]
    }

    /// `max |Γ^μ_{νλ} − Γ^μ_{λν}|`
    pub fn torsion(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                for la in 0..4 {
                    worst = worst.max((self.gamma[mu][nu][la] - self.gamma[mu][la][nu]).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma
            .iter()
            .flatten()
            .flatten()
            .fold(0.0, |a: f64, b| a.max(b.abs()))
    }

    /// Componentwise relative difference, `|a − b| / max(|b|, floor)`.
    pub fn max_relative_difference(&self, reference: &Self, floor: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                for la in 0..4 {
                    let a = self.gamma[mu][nu][la];
                    let b = reference.gamma[mu][nu][la];
                    worst = worst.max((a - b).abs() / b.abs().max(floor));
                }
            }
        }
        worst
    }
}

/// Christoffel symbols from closed-form metric derivatives.
pub fn christoffel_analytic(point: &ChartPoint) -> ChristoffelSymbols {
    let g = metric_diagonal(point);
    let dg = metric_gradient(point);
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for mu in 0..4 {
        let half_inv = 0.5 / g[mu];
        for nu in 0..4 {
            for la in 0..4 {
                let mut s = 0.0;
                if mu == la {
                    s += dg[nu][mu];
                }
                if mu == nu {
                    s += dg[la][mu];
                }
                if nu == la {
                    s -= dg[mu][nu];
                }
                gamma[mu][nu][la] = half_inv * s;
            }
        }
    }
    ChristoffelSymbols { gamma }
}

/// Richardson-extrapolated central difference of a matrix-valued field along `axis`.
fn central_difference<F>(point: &ChartPoint, axis: usize, h: f64, field: &F) -> Result<Matrix4<f64>>
where
    F: Fn(&ChartPoint) -> Matrix4<f64>,
{
    let step = h * point.coords[axis].abs().max(1.0);
    let diff = |s: f64| -> Result<Matrix4<f64>> {
        let plus = field(&point.displaced(axis, s)?);
        let minus = field(&point.displaced(axis, -s)?);
        Ok((plus - minus) / (2.0 * s))
    };
    let coarse = diff(step)?;
    let fine = diff(0.5 * step)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// `∂_λ g_μν` by finite differences of [`metric_at`].
pub fn metric_derivatives_numeric(point: &ChartPoint, h: f64) -> Result<[Matrix4<f64>; 4]> {
    let field = |p: &ChartPoint| metric_at(p).components;
    Ok([
        central_difference(point, 0, h, &field)?,
        central_difference(point, 1, h, &field)?,
        central_difference(point, 2, h, &field)?,
        central_difference(point, 3, h, &field)?,
    ])
}

/// Christoffel symbols from finite differences of [`metric_at`] and a full
/// matrix inverse; an oracle for [`christoffel_analytic`].
pub fn christoffel_numeric(point: &ChartPoint, h: f64) -> Result<ChristoffelSymbols> {
    let dg = metric_derivatives_numeric(point, h)?;
    let g_inv =
        metric_at(point)
            .components
            .try_inverse()
            .ok_or(Error::domain("det g", 0.0, "metric must be invertible"))?;
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            for la in 0..4 {
                let mut s = 0.0;
                for sigma in 0..4 {
                    s += g_inv[(mu, sigma)] * (dg[nu][(sigma, la)] + dg[la][(sigma, nu)] - dg[sigma][(nu, la)]);
                }
                gamma[mu][nu][la] = 0.5 * s;
            }
        }
    }
    Ok(ChristoffelSymbols { gamma })
}

/// Connection one-forms `ω^a_{b,ν}` with `δω^a_b = ω^a_{b,ν} dx^ν`, stored as `omega[a][b][ν]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionOneForms {
    pub omega: [[[f64; 4]; 4]; 4],
    pub point: ChartPoint,
}

impl ConnectionOneForms {
    #[inline]
    pub fn component(&self, a: usize, b: usize, nu: usize) -> f64 {
        self.omega[a][b][nu]
    }

    /// `δω^a_b` for a coordinate displacement.
    pub fn contract(&self, dx: &[f64; 4]) -> Matrix4<f64> {
        Matrix4::from_fn(|a, b| (0..4).map(|nu| self.omega[a][b][nu] * dx[nu]).sum())
    }

    /// `max |η_ac ω^c_{b,ν} + η_bc ω^c_{a,ν}|`
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for nu in 0..4 {
                    let s = MINKOWSKI[a] * self.omega[a][b][nu] + MINKOWSKI[b] * self.omega[b][a][nu];
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }
}

/// `ω^a_{b,ν} = e^a_μ (∂_ν e_b^μ + Γ^μ_{νλ} e_b^λ)`, the covariant derivative of
/// the frame expressed back in the frame.
pub fn connection_one_forms(point: &ChartPoint) -> ConnectionOneForms {
    let tetrad = tetrad_at(point);
    let gamma = christoffel_analytic(point);
    let g = metric_diagonal(point);
    let dg = metric_gradient(point);
    // e_b^b = |g_bb|^{-1/2} for both charts.
    let mut d_forward = [Matrix4::zeros(); 4];
    for (nu, d) in d_forward.iter_mut().enumerate() {
        for b in 0..4 {
            d[(b, b)] = -0.5 * g[b].abs().powf(-1.5) * g[b].signum() * dg[nu][b];
        }
    }
    assemble_forms(&tetrad, &gamma, &d_forward)
}

/// Oracle route for [`connection_one_forms`]: finite differences of
/// [`tetrad_at`] combined with [`christoffel_numeric`].
pub fn connection_one_forms_numeric(point: &ChartPoint, h: f64) -> Result<ConnectionOneForms> {
    let tetrad = tetrad_at(point);
    let gamma = christoffel_numeric(point, h)?;
    let field = |p: &ChartPoint| tetrad_at(p).forward;
    let d_forward = [
        central_difference(point, 0, h, &field)?,
        central_difference(point, 1, h, &field)?,
        central_difference(point, 2, h, &field)?,
        central_difference(point, 3, h, &field)?,
    ];
    Ok(assemble_forms(&tetrad, &gamma, &d_forward))
}

fn assemble_forms(tetrad: &Tetrad, gamma: &ChristoffelSymbols, d_forward: &[Matrix4<f64>; 4]) -> ConnectionOneForms {
    let mut omega = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for nu in 0..4 {
                let mut s = 0.0;
                for mu in 0..4 {
                    let mut cov = d_forward[nu][(b, mu)];
                    for la in 0..4 {
                        cov += gamma.gamma[mu][nu][la] * tetrad.forward[(b, la)];
                    }
                    s += tetrad.inverse[(a, mu)] * cov;
                }
                omega[a][b][nu] = s;
            }
        }
    }
    ConnectionOneForms {
        omega,
        point: tetrad.point,
    }
}

/// The six Kruskal-chart one-forms in the closed form printed alongside the
/// Kruskal tetrad, evaluated literally. Only the listed components are set;
/// the printed prefactors are not consistent with the tetrad, so this is a
/// diagnostic comparator for [`connection_one_forms`], never an input.
pub fn printed_kruskal_forms(point: &ChartPoint) -> Result<ConnectionOneForms> {
    if point.chart != Chart::Kruskal {
        return Err(Error::domain(
            "chart",
            0.0,
            "printed one-forms are Kruskal-chart expressions",
        ));
    }
    let m = point.mass;
    let r = point.radius;
    let [big_t, big_x, theta, _] = point.coords;
    let (s, c) = theta.sin_cos();
    let lapse = 1.0 - 2.0 * m / r;
    let growth = (r / (4.0 * m)).exp();
    let root = (r / (2.0 * m)).sqrt();
    let mut omega = [[[0.0; 4]; 4]; 4];
    omega[0][1][0] = -(2.0 * m / r - 1.0).powi(2) / big_x;
    omega[2][0][2] = (2.0 * r / (2.0 * m)).sqrt() * lapse / big_t * growth;
    omega[3][0][3] = root * lapse / big_t * growth * s;
    omega[3][2][3] = c;
    omega[2][1][2] = root * lapse / big_x * growth;
    omega[3][1][3] = root * lapse / big_x * growth * s;
    Ok(ConnectionOneForms { omega, point: *point })
}

/// One printed-vs-derived one-form component.
#[derive(Debug, Clone, PartialEq)]
pub struct FormDiscrepancy {
    pub label: &'static str,
    pub printed: f64,
    pub derived: f64,
}

impl FormDiscrepancy {
    pub fn relative(&self) -> f64 {
        (self.printed - self.derived).abs() / self.derived.abs().max(f64::MIN_POSITIVE)
    }
}

/// Side-by-side listing of the printed closed forms against the tetrad route.
pub fn compare_printed_forms(point: &ChartPoint) -> Result<Vec<FormDiscrepancy>> {
    let printed = printed_kruskal_forms(point)?;
    let derived = connection_one_forms(point);
    let entries: [(&'static str, usize, usize, usize); 6] = [
        ("ω⁰₁ (dT)", 0, 1, 0),
        ("ω²₀ (dθ)", 2, 0, 2),
        ("ω³₀ (dφ)", 3, 0, 3),
        ("ω³₂ (dφ)", 3, 2, 3),
        ("ω²₁ (dθ)", 2, 1, 2),
        ("ω³₁ (dφ)", 3, 1, 3),
    ];
    Ok(entries
        .iter()
        .map(|&(label, a, b, nu)| FormDiscrepancy {
            label,
            printed: printed.component(a, b, nu),
            derived: derived.component(a, b, nu),
        })
        .collect())
}

/// `Λ^a_b = δ^a_b + δω^a_b` for a coordinate displacement.
pub fn lorentz_step(forms: &ConnectionOneForms, displacement: &[f64; 4]) -> Matrix4<f64> {
    Matrix4::identity() + forms.contract(displacement)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalCharacter {
    Timelike,
    Null,
    Spacelike,
}

/// The boost Killing field `(1/4M)(X ∂_T + T ∂_X)` at a Kruskal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingField {
    pub components: [f64; 4],
    pub point: ChartPoint,
}

impl KillingField {
    pub fn norm_squared(&self) -> f64 {
        metric_at(&self.point).inner(&self.components, &self.components)
    }

    pub fn causal_character(&self) -> CausalCharacter {
        let n = self.norm_squared();
        if n < 0.0 {
            CausalCharacter::Timelike
        } else if n > 0.0 {
            CausalCharacter::Spacelike
        } else {
            CausalCharacter::Null
        }
    }
}

pub fn killing_vector(point: &ChartPoint) -> Result<KillingField> {
    if point.chart != Chart::Kruskal {
        return Err(Error::domain(
            "chart",
            0.0,
            "Killing field is given in the Kruskal chart",
        ));
    }
    let [big_t, big_x, ..] = point.coords;
    let k = 1.0 / (4.0 * point.mass);
    Ok(KillingField {
        components: [k * big_x, k * big_t, 0.0, 0.0],
        point: *point,
    })
}

/// `max |∇_μ ξ_ν + ∇_ν ξ_μ|` with derivatives from finite differences of the metric.
pub fn killing_residual(point: &ChartPoint, h: f64) -> Result<f64> {
    let xi = killing_vector(point)?.components;
    let g = metric_at(point).components;
    let dg = metric_derivatives_numeric(point, h)?;
    let gamma = christoffel_numeric(point, h)?;
    let k = 1.0 / (4.0 * point.mass);
    // ∂_μ ξ^σ: only ∂_T ξ^X and ∂_X ξ^T are nonzero.
    let mut dxi = [[0.0; 4]; 4];
    dxi[0][1] = k;
    dxi[1][0] = k;
    let lowered: [f64; 4] = std::array::from_fn(|nu| (0..4).map(|s| g[(nu, s)] * xi[s]).sum());
    let nabla = |mu: usize, nu: usize| -> f64 {
        let mut d = 0.0;
        for s in 0..4 {
            d += dg[mu][(nu, s)] * xi[s] + g[(nu, s)] * dxi[mu][s];
        }
        for la in 0..4 {
            d -= gamma.gamma[la][mu][nu] * lowered[la];
        }
        d
    };
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            worst = worst.max((nabla(mu, nu) + nabla(nu, mu)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn schw(r: f64) -> ChartPoint {
        ChartPoint::schwarzschild(1.0, 0.0, r, FRAC_PI_2, 0.0).unwrap()
    }

    #[test]
    fn schwarzschild_metric_at_r4() {
        let g = metric_at(&schw(4.0));
        assert_eq!(g.diagonal(), [-0.5, 2.0, 16.0, 16.0]);
        assert!(g.is_symmetric());
        assert_eq!(g.signature(), [-1, 1, 1, 1]);
    }

    #[test]
    fn asymptotically_flat() {
        let g = metric_at(&schw(1e9)).diagonal();
        assert!((g[0] + 1.0).abs() < 1e-8);
        assert!((g[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn kruskal_metric_at_x_equal_e() {
        let p = ChartPoint::kruskal(1.0, 0.0, E, FRAC_PI_2, 0.0).unwrap();
        assert!((p.radius() - 4.0).abs() < 1e-12);
        let g_tt = metric_at(&p).g(0, 0);
        assert!((g_tt + 8.0 * (-2.0f64).exp()).abs() < 1e-12);
        assert!((g_tt + 1.08268).abs() < 1e-5);
    }

    #[test]
    fn horizon_guard_rejects() {
        for r in [2.0, 2.0 * (1.0 + 0.5e-9), 1.0] {
            assert!(matches!(
                ChartPoint::schwarzschild(1.0, 0.0, r, FRAC_PI_2, 0.0),
                Err(Error::Domain { quantity: "r", .. })
            ));
        }
        assert!(ChartPoint::schwarzschild(1.0, 0.0, 2.0 * (1.0 + 2e-9), FRAC_PI_2, 0.0).is_ok());
        assert!(ChartPoint::kruskal(1.0, 1.0, 0.0, FRAC_PI_2, 0.0).is_err());
        assert!(ChartPoint::kruskal(1.0, 0.0, 0.0, FRAC_PI_2, 0.0).is_ok());
        assert!(ChartPoint::schwarzschild(1.0, 0.0, 4.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tetrad_values() {
        let t = tetrad_at(&schw(4.0));
        assert!((t.inverse[(0, 0)] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((t.inverse[(1, 1)] - 1.0 / 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.inverse[(2, 2)], 4.0);
        let k = tetrad_at(&ChartPoint::kruskal(1.0, 0.0, E, FRAC_PI_2, 0.0).unwrap());
        assert!((k.inverse[(0, 0)] - 8f64.sqrt() / E).abs() < 1e-12);
        assert!(k.duality_residual() < 1e-12);
        assert!(k.metric_residual() < 1e-12);
    }

    #[test]
    fn perturbed_tetrad_breaks_compatibility() {
        let t = tetrad_at(&schw(5.0)).perturbed(1e-4);
        assert!(t.metric_residual() > 1e-6);
    }

    #[test]
    fn christoffel_r_tt() {
        let g = christoffel_analytic(&schw(4.0));
        assert!((g.get(1, 0, 0) - 1.0 / 32.0).abs() < 1e-15);
        assert_eq!(g.torsion(), 0.0);
        assert!(g.get(2, 3, 3).abs() < 1e-15);
        let n = christoffel_numeric(&schw(4.0), DEFAULT_FD_STEP).unwrap();
        assert!((n.get(1, 0, 0) - 1.0 / 32.0).abs() / (1.0 / 32.0) < 1e-5);
    }

    #[test]
    fn christoffel_far_field_matches_flat_spherical() {
        // In spherical coordinates Γ^r_θθ = −r even in flat space, so the
        // comparison is against the M = 0 symbols, not against zero.
        let r = 1e6;
        let n = christoffel_numeric(&schw(r), DEFAULT_FD_STEP).unwrap();
        let mut flat = ChristoffelSymbols {
            gamma: [[[0.0; 4]; 4]; 4],
        };
        flat.gamma[1][2][2] = -r;
        flat.gamma[1][3][3] = -r;
        flat.gamma[2][1][2] = 1.0 / r;
        flat.gamma[2][2][1] = 1.0 / r;
        flat.gamma[3][1][3] = 1.0 / r;
        flat.gamma[3][3][1] = 1.0 / r;
        for (mu, nu, la) in [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)] {
            assert!(n.get(mu, nu, la).abs() < 1e-5);
        }
        assert!(n.max_relative_difference(&flat, 1e-3) < 1e-5);
    }

    #[test]
    fn kruskal_christoffel_oracle() {
        let p = ChartPoint::kruskal(1.0, 0.0, E, FRAC_PI_2, 0.0).unwrap();
        let a = christoffel_analytic(&p);
        let n = christoffel_numeric(&p, DEFAULT_FD_STEP).unwrap();
        assert!(n.max_relative_difference(&a, 1e-6) < 1e-5);
    }

    #[test]
    fn stencil_outside_domain_is_an_error() {
        let p = ChartPoint::schwarzschild(1.0, 0.0, 2.0 * (1.0 + 2e-9), FRAC_PI_2, 0.0).unwrap();
        assert!(christoffel_numeric(&p, DEFAULT_FD_STEP).is_err());
    }

    #[test]
    fn connection_forms_equatorial_and_far_field() {
        let p = ChartPoint::kruskal(1.0, 0.3, E, FRAC_PI_2, 0.0).unwrap();
        let w = connection_one_forms(&p);
        assert!(w.component(3, 2, 3).abs() < 1e-15);
        assert!(w.antisymmetry_residual() < 1e-12);
        let tilted = ChartPoint::kruskal(1.0, 0.3, E, 0.7, 0.0).unwrap();
        assert!((connection_one_forms(&tilted).component(3, 2, 3) - 0.7f64.cos()).abs() < 1e-14);

        let far = connection_one_forms(&schw(1e6));
        for a in 0..4 {
            for b in 0..4 {
                assert!(far.component(a, b, 0).abs() < 1e-5);
            }
        }
        let far_k = connection_one_forms(&ChartPoint::kruskal(1.0, 0.0, 1e100, FRAC_PI_2, 0.0).unwrap());
        for a in 0..4 {
            for b in 0..4 {
                assert!(far_k.component(a, b, 0).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn connection_forms_oracle_and_printed_comparison() {
        let p = ChartPoint::kruskal(1.0, 0.0, E, FRAC_PI_2, 0.0).unwrap();
        let analytic = connection_one_forms(&p).component(0, 1, 0);
        let numeric = connection_one_forms_numeric(&p, DEFAULT_FD_STEP)
            .unwrap()
            .component(0, 1, 0);
        assert!((analytic - numeric).abs() / analytic.abs() < 1e-5);
        // Closed form of the tetrad route at T = 0: −(1 − 1/ρ²)/X with ρ = 2.
        assert!((analytic + 0.75 / E).abs() < 1e-12);
        // The printed form gives −(1 − 1/ρ)²/X instead; reported, not asserted equal.
        let cmp = compare_printed_forms(&p).unwrap();
        assert!((cmp[0].printed + 0.25 / E).abs() < 1e-12);
        assert!(cmp[0].relative() > 0.1);
    }

    #[test]
    fn lorentz_step_structure() {
        let p = ChartPoint::kruskal(1.0, 0.2, 1.5, 1.1, 0.0).unwrap();
        let forms = connection_one_forms(&p);
        assert_eq!(lorentz_step(&forms, &[0.0; 4]), Matrix4::identity());
        let eta = minkowski();
        let dx = [1e-3, -2e-3, 5e-4, 1e-3];
        let lam = lorentz_step(&forms, &dx);
        let dw = forms.contract(&dx).norm();
        let defect = (lam.transpose() * eta * lam - eta).norm();
        assert!(defect <= 10.0 * dw * dw);
    }

    #[test]
    fn killing_field_character() {
        let p = ChartPoint::kruskal(1.0, 0.0, 2.0, FRAC_PI_2, 0.0).unwrap();
        let k = killing_vector(&p).unwrap();
        assert_eq!(k.components, [0.5, 0.0, 0.0, 0.0]);
        assert_eq!(k.causal_character(), CausalCharacter::Timelike);
        let h = ChartPoint::kruskal(1.0, 0.7, 0.7, FRAC_PI_2, 0.0).unwrap();
        assert_eq!(killing_vector(&h).unwrap().norm_squared(), 0.0);
        let s = ChartPoint::kruskal(1.0, 0.9, 0.3, FRAC_PI_2, 0.0).unwrap();
        assert_eq!(
            killing_vector(&s).unwrap().causal_character(),
            CausalCharacter::Spacelike
        );
        assert!(killing_residual(&p, DEFAULT_FD_STEP).unwrap() < 1e-8);
        assert!(killing_vector(&schw(4.0)).is_err());
    }

    #[test]
    fn newton_branches_meet() {
        // ρ = 2 gives w = e², the branch boundary.
        for w in [E * E * (1.0 - 1e-12), E * E * (1.0 + 1e-12)] {
            let s = areal_radius(w, 1.0).unwrap();
            assert!((s.radius - 4.0).abs() < 1e-10, "{}", s.radius);
        }
        let deep = areal_radius(-0.999, 1.0).unwrap();
        assert!(deep.radius > 0.0 && deep.iterations <= NEWTON_MAX_ITERATIONS);
        assert!(areal_radius(-1.0, 1.0).is_err());
    }
}
