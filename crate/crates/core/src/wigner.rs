//! The infinitesimal spin-1/2 Wigner step in the Kruskal frame, its
//! time-ordered accumulation along a worldline, and unitarity diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{MomentumState, WorldlineSample};
use crate::spinor::SpinorMap;

/// Scalars and increments entering one Wigner step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInputs {
    /// `(r/2M)^{1/2} (1 − 2M/r) e^{r/4M}`
    pub a: f64,
    /// `(2M/r − 1)²`
    pub b: f64,
    pub beta: f64,
    pub k: f64,
    pub kruskal_t: f64,
    pub kruskal_x: f64,
    pub d_kruskal_t: f64,
    pub d_theta: f64,
    pub d_phi: f64,
}

fn check_radius(r: f64, mass: f64) -> Result<()> {
    if mass > 0.0 && r >= 2.0 * mass && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("r", r, "need r ≥ 2M"))
    }
}

pub fn scalar_a(r: f64, mass: f64) -> Result<f64> {
    check_radius(r, mass)?;
    Ok((r / (2.0 * mass)).sqrt() * (1.0 - 2.0 * mass / r) * (r / (4.0 * mass)).exp())
}

pub fn scalar_b(r: f64, mass: f64) -> Result<f64> {
    check_radius(r, mass)?;
    Ok((2.0 * mass / r - 1.0).powi(2))
}

fn singular(quantity: &'static str, value: f64) -> Error {
    Error::SingularInput { quantity, value }
}

/// First-order Wigner map for one displacement `(dT, dθ, dφ)`.
pub fn step_matrix(inputs: &StepInputs) -> Result<SpinorMap> {
    let StepInputs {
        a,
        b,
        beta,
        k,
        kruskal_t: big_t,
        kruskal_x: big_x,
        d_kruskal_t: dt,
        d_theta,
        d_phi,
    } = *inputs;
    if !(0.0..1.0).contains(&k) {
        return Err(singular("K", k));
    }
    if beta == 0.0 || !beta.is_finite() {
        return Err(singular("β", beta));
    }
    if big_x == 0.0 || !big_x.is_finite() {
        return Err(singular("X", big_x));
    }
    if d_theta != 0.0 && (big_t == 0.0 || !big_t.is_finite()) {
        return Err(singular("T", big_t));
    }
    let den = 1.0 - k * k;
    let coth = 1.0 / beta.tanh();

    let damp = k * k * coth * b * dt / (den * big_x);
    let flip = (1.0 + 2.0 * k * coth - k * k) * b * dt / (2.0 * den * big_x);
    let (twist, tilt) = if d_theta != 0.0 {
        let angular = a * d_theta / (2.0 * den * big_x * big_t);
        (
            (2.0 * k * big_x - big_t - k * k * (3.0 * big_t + 2.0 * big_x * coth)) * angular,
            ((1.0 - 2.0 * k * coth + k * k) - 4.0 * k * big_t) * angular,
        )
    } else {
        (0.0, 0.0)
    };

    let i = Complex64::i();
    Ok(SpinorMap::new(
        Complex64::new(1.0 - damp, twist),
        -flip - 0.5 * i * (d_phi - tilt),
        -flip - 0.5 * i * (d_phi + tilt),
        Complex64::new(1.0 - damp, -twist),
    ))
}

/// `K → 0`, `X → ∞` limit of [`step_matrix`] with only `dφ ≠ 0`:
/// `I − (i dφ/2) σ₁`, unitary to first order.
pub fn flat_limit_step(d_phi: f64) -> SpinorMap {
    let h = Complex64::new(0.0, -0.5 * d_phi);
    SpinorMap::new(1.0.into(), h, h, 1.0.into())
}

/// The flat-limit matrix as printed, `((1, −i dφ/2), (i dφ/2, 1))`. Its lower
/// off-diagonal sign differs from the limit of [`step_matrix`]; the matrix is
/// Hermitian, so it is unitary only to first order in `dφ`.
pub fn printed_flat_limit(d_phi: f64) -> SpinorMap {
    let h = Complex64::new(0.0, 0.5 * d_phi);
    SpinorMap::new(1.0.into(), -h, h, 1.0.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductOrder {
    /// Later-`T` factors on the left.
    #[default]
    TimeOrdered,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// Each segment contributes `exp(D_k − I)`.
    #[default]
    Exponential,
    /// Each segment contributes the first-order matrix `D_k` itself.
    Linear,
}

/// Midpoint inputs of every segment of a radial worldline.
pub fn segment_inputs(worldline: &[WorldlineSample], mom: &MomentumState) -> Result<Vec<StepInputs>> {
    worldline
        .windows(2)
        .enumerate()
        .map(|(k, pair)| {
            let (s0, s1) = (&pair[0], &pair[1]);
            let mass = s0.mass();
            let a0 = scalar_a(s0.r(), mass).map_err(|e| e.at_sample(k))?;
            let a1 = scalar_a(s1.r(), mass).map_err(|e| e.at_sample(k + 1))?;
            let b0 = scalar_b(s0.r(), mass).map_err(|e| e.at_sample(k))?;
            let b1 = scalar_b(s1.r(), mass).map_err(|e| e.at_sample(k + 1))?;
            Ok(StepInputs {
                a: 0.5 * (a0 + a1),
                b: 0.5 * (b0 + b1),
                beta: 0.5 * (s0.beta + s1.beta),
                k: mom.k,
                kruskal_t: 0.5 * (s0.kruskal_t + s1.kruskal_t),
                kruskal_x: 0.5 * (s0.kruskal_x + s1.kruskal_x),
                d_kruskal_t: s1.kruskal_t - s0.kruskal_t,
                d_theta: 0.0,
                d_phi: 0.0,
            })
        })
        .collect()
}

/// Per-segment maps under the chosen rule.
pub fn segment_maps(worldline: &[WorldlineSample], mom: &MomentumState, rule: StepRule) -> Result<Vec<SpinorMap>> {
    segment_inputs(worldline, mom)?
        .iter()
        .enumerate()
        .map(|(k, inputs)| {
            let d = step_matrix(inputs).map_err(|e| e.at_sample(k))?;
            Ok(match rule {
                StepRule::Linear => d,
                StepRule::Exponential => d.sub(&SpinorMap::identity()).exp(),
            })
        })
        .collect()
}

/// Ordered product of segment maps; `steps[k]` belongs to segment `k → k+1`.
pub fn ordered_product(steps: &[SpinorMap], order: ProductOrder) -> Result<SpinorMap> {
    let mut total = SpinorMap::identity();
    for (k, step) in steps.iter().enumerate() {
        total = match order {
            ProductOrder::TimeOrdered => step * &total,
            ProductOrder::Reversed => &total * step,
        };
        if !total.is_finite() {
            return Err(Error::NonFinite {
                quantity: "accumulated Wigner map",
            }
            .at_sample(k + 1));
        }
    }
    Ok(total)
}

/// Accumulated Wigner map `D_N ⋯ D_2 D_1` along a radial worldline.
pub fn accumulate(worldline: &[WorldlineSample], mom: &MomentumState) -> Result<SpinorMap> {
    accumulate_with(worldline, mom, ProductOrder::TimeOrdered, StepRule::Exponential)
}

pub fn accumulate_with(
    worldline: &[WorldlineSample],
    mom: &MomentumState,
    order: ProductOrder,
    rule: StepRule,
) -> Result<SpinorMap> {
    ordered_product(&segment_maps(worldline, mom, rule)?, order)
}

/// Running time-ordered product, one map per sample (identity at the first).
pub fn accumulate_history(worldline: &[WorldlineSample], mom: &MomentumState) -> Result<Vec<SpinorMap>> {
    let steps = segment_maps(worldline, mom, StepRule::Exponential)?;
    let mut out = Vec::with_capacity(worldline.len());
    let mut total = SpinorMap::identity();
    if !worldline.is_empty() {
        out.push(total);
    }
    for (k, step) in steps.iter().enumerate() {
        total = step * &total;
        if !total.is_finite() {
            return Err(Error::NonFinite {
                quantity: "accumulated Wigner map",
            }
            .at_sample(k + 1));
        }
        out.push(total);
    }
    Ok(out)
}

/// Running midpoint integrals `∫ K² coth β · b/((1−K²)X) dT` and
/// `∫ (1 + K coth β − K²) · b/(2(1−K²)X) dT`, one pair per sample.
pub fn closed_form_integrals(worldline: &[WorldlineSample], mom: &MomentumState) -> Result<Vec<(f64, f64)>> {
    let inputs = segment_inputs(worldline, mom)?;
    let mut out = Vec::with_capacity(worldline.len());
    let (mut diag, mut off) = (0.0, 0.0);
    if !worldline.is_empty() {
        out.push((diag, off));
    }
    for (k, s) in inputs.iter().enumerate() {
        if !(0.0..1.0).contains(&s.k) {
            return Err(singular("K", s.k).at_sample(k));
        }
        if s.beta == 0.0 {
            return Err(singular("β", s.beta).at_sample(k));
        }
        if s.kruskal_x == 0.0 {
            return Err(singular("X", s.kruskal_x).at_sample(k));
        }
        let coth = 1.0 / s.beta.tanh();
        let den = 1.0 - s.k * s.k;
        let w = s.b * s.d_kruskal_t / s.kruskal_x;
        diag += s.k * s.k * coth / den * w;
        off += (1.0 + s.k * coth - s.k * s.k) / (2.0 * den) * w;
        out.push((diag, off));
    }
    Ok(out)
}

fn closed_form_from(diag: f64, off: f64) -> SpinorMap {
    let d = (-diag).exp();
    let o = (-off).exp_m1();
    SpinorMap::from_real(d, o, o, d)
}

/// The printed closed form: diagonal `exp(−∫…)`, off-diagonal `exp(−∫…) − 1`.
/// A comparator for [`accumulate`], not a substitute.
pub fn closed_form_radial(worldline: &[WorldlineSample], mom: &MomentumState) -> Result<SpinorMap> {
    Ok(closed_form_integrals(worldline, mom)?
        .last()
        .map(|&(d, o)| closed_form_from(d, o))
        .unwrap_or_else(SpinorMap::identity))
}

pub fn closed_form_history(worldline: &[WorldlineSample], mom: &MomentumState) -> Result<Vec<SpinorMap>> {
    Ok(closed_form_integrals(worldline, mom)?
        .into_iter()
        .map(|(d, o)| closed_form_from(d, o))
        .collect())
}

/// `‖D†D − I‖_F`, zero iff `D` is unitary.
pub fn unitarity_deviation(d: &SpinorMap) -> f64 {
    (&d.adjoint() * d).sub(&SpinorMap::identity()).frobenius_norm()
}

/// Whether `D` has the shape `((A, B), (−B*, A*))` with `|A|² + |B|² = 1`.
pub fn su2_form_check(d: &SpinorMap, tol: f64) -> bool {
    let [a, b, c, e] = d.entries();
    (e - a.conj()).norm() <= tol && (c + b.conj()).norm() <= tol && (a.norm_sqr() + b.norm_sqr() - 1.0).abs() <= tol
}
