//! Invariant checks over every layer, each with its measured value and tolerance.

use std::f64::consts::PI;

use horizon_spin::channel::{apply_map, extract_pq, spin_up_output, von_neumann_entropy, DensityMatrix};
use horizon_spin::geometry::*;
use horizon_spin::kinematics::*;
use horizon_spin::wigner::*;
use horizon_spin::{Result, SpinorMap};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    /// Upper bound on `measured`, when the check is a bound.
    pub tolerance: Option<f64>,
    pub passed: bool,
    /// Reported for reference; never fails the suite.
    pub informational: bool,
    pub detail: String,
}

impl Check {
    fn below(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Check {
            name,
            measured,
            tolerance: Some(tolerance),
            passed: measured < tolerance,
            informational: false,
            detail,
        }
    }

    fn info(name: &'static str, measured: f64, detail: String) -> Self {
        Check {
            name,
            measured,
            tolerance: None,
            passed: true,
            informational: true,
            detail,
        }
    }

    fn failed(name: &'static str, err: &horizon_spin::Error) -> Self {
        Check {
            name,
            measured: f64::NAN,
            tolerance: None,
            passed: false,
            informational: false,
            detail: err.to_string(),
        }
    }

    pub fn line(&self) -> String {
        let status = match (self.informational, self.passed) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        match self.tolerance {
            Some(t) => format!(
                "{status} {}: {:.3e} (tolerance {t:.1e}) {}",
                self.name, self.measured, self.detail
            ),
            None => format!("{status} {}: {:.6e} {}", self.name, self.measured, self.detail),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    /// Relative perturbation applied to every tetrad before the compatibility check.
    pub tetrad_perturbation: f64,
}

/// Deterministic low-discrepancy points in `[0, 1)^D`.
pub fn kronecker<const D: usize>(n: usize) -> impl Iterator<Item = [f64; D]> {
    const STEPS: [f64; 5] = [
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_3,
        0.412_496_572_049_796_1,
        0.316_062_180_708_632_8,
        0.236_067_977_499_789_7,
    ];
    (1..=n).map(|k| std::array::from_fn(|d| (0.5 + k as f64 * STEPS[d]).fract()))
}

fn lerp(lo: f64, hi: f64, u: f64) -> f64 {
    lo + (hi - lo) * u
}

/// Points per chart: Schwarzschild with `r ∈ [2.05M, 100M]`, Kruskal region I
/// with `X ∈ [0.05, 60]`, `|T| < 0.95 X`.
pub fn sample_points(mass: f64, n: usize) -> Result<(Vec<ChartPoint>, Vec<ChartPoint>)> {
    let mut schw = Vec::with_capacity(n);
    let mut krus = Vec::with_capacity(n);
    for [a, b, c, d] in kronecker::<4>(n) {
        let theta = lerp(0.05, PI - 0.05, c);
        let phi = 2.0 * PI * d;
        schw.push(ChartPoint::schwarzschild(
            mass,
            lerp(-50.0, 50.0, b) * mass,
            lerp(2.05, 100.0, a) * mass,
            theta,
            phi,
        )?);
        let x = lerp(0.05, 60.0, a);
        krus.push(ChartPoint::kruskal(mass, x * lerp(-0.95, 0.95, b), x, theta, phi)?);
    }
    Ok((schw, krus))
}

/// Largest `|e^a_μ e^b_ν η_ab − g_μν|` over both charts, relative to `max(1, max|g|)`.
pub fn tetrad_compatibility(mass: f64, n: usize, perturbation: f64) -> Result<f64> {
    let (schw, krus) = sample_points(mass, n)?;
    Ok(schw
        .iter()
        .chain(&krus)
        .map(|p| {
            let e = tetrad_at(p).perturbed(perturbation);
            let scale = metric_at(p).diagonal().iter().fold(1.0f64, |a, g| a.max(g.abs()));
            e.metric_residual() / scale
        })
        .fold(0.0, f64::max))
}

/// Largest relative difference between finite-difference and analytic
/// Christoffel symbols on `r ∈ [2.5M, 100M]` and a region-I Kruskal grid.
pub fn christoffel_agreement(mass: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..40 {
        let r = lerp(2.5, 100.0, i as f64 / 39.0) * mass;
        let p = ChartPoint::schwarzschild(mass, 0.3 * mass, r, 1.1, 0.4)?;
        let num = christoffel_numeric(&p, DEFAULT_FD_STEP)?;
        worst = worst.max(num.max_relative_difference(&christoffel_analytic(&p), 1e-12));
    }
    for i in 0..8 {
        for j in 0..8 {
            let x = lerp(0.2, 4.2, i as f64 / 7.0);
            let p = ChartPoint::kruskal(mass, x * lerp(-0.9, 0.9, j as f64 / 7.0), x, 1.1, 0.4)?;
            let num = christoffel_numeric(&p, DEFAULT_FD_STEP)?;
            worst = worst.max(num.max_relative_difference(&christoffel_analytic(&p), 1e-12));
        }
    }
    Ok(worst)
}

/// Largest relative mismatch between the Schwarzschild `(t, r)` block and the
/// Kruskal metric pulled back through the chart map, `r ∈ (2.05M, 10M)`, `|t| ≤ 10M`.
pub fn metric_pullback(mass: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..30 {
        for j in 0..21 {
            let r = lerp(2.05, 10.0, (i as f64 + 0.5) / 30.0) * mass;
            let t = (j as f64 - 10.0) * mass;
            let (big_t, big_x) = kruskal_from_schwarzschild(t, r, mass)?;
            let k = metric_at(&ChartPoint::kruskal(mass, big_t, big_x, 1.0, 0.0)?);
            let s = metric_at(&ChartPoint::schwarzschild(mass, t, r, 1.0, 0.0)?);
            let jac = kruskal_jacobian(t, r, mass)?;
            for a in 0..2 {
                for b in 0..2 {
                    let pulled = k.g(0, 0) * jac[0][a] * jac[0][b] + k.g(1, 1) * jac[1][a] * jac[1][b];
                    let scale = (s.g(a, a) * s.g(b, b)).abs().sqrt();
                    worst = worst.max((pulled - s.g(a, b)).abs() / scale);
                }
            }
            worst = worst.max((k.g(2, 2) - s.g(2, 2)).abs() / s.g(2, 2));
        }
    }
    Ok(worst)
}

/// Largest `|δω_ab + δω_ba|` relative to the largest form component.
pub fn connection_antisymmetry(mass: f64, n: usize) -> Result<f64> {
    let (schw, krus) = sample_points(mass, n)?;
    Ok(schw
        .iter()
        .chain(&krus)
        .map(|p| {
            let w = connection_one_forms(p);
            let mut scale = 1.0f64;
            for a in 0..4 {
                for b in 0..4 {
                    for nu in 0..4 {
                        scale = scale.max(w.component(a, b, nu).abs());
                    }
                }
            }
            w.antisymmetry_residual() / scale
        })
        .fold(0.0, f64::max))
}

/// `(worst relative error, most Newton iterations)` of `(t, r) → (T, X) → (t, r)`
/// over `r ∈ (2.01M, 600M)`, `|t| ≤ 10M`.
pub fn coordinate_round_trip(mass: f64, n: usize) -> Result<(f64, usize)> {
    let mut worst = 0.0f64;
    let mut iterations = 0;
    for [a, b] in kronecker::<2>(n) {
        let r = 2.0 * mass * (1.005f64).powf(1.0 - a) * 300f64.powf(a);
        let t = lerp(-10.0, 10.0, b) * mass;
        let (big_t, big_x) = kruskal_from_schwarzschild(t, r, mass)?;
        let (t2, r2) = schwarzschild_from_kruskal(big_t, big_x, mass)?;
        worst = worst.max((r2 - r).abs() / r).max((t2 - t).abs() / t.abs().max(mass));
        iterations = iterations.max(areal_radius(big_x * big_x - big_t * big_t, mass)?.iterations);
    }
    Ok((worst, iterations))
}

/// Largest `|g(U,U) + 1|` and `|(U⁰)² − (U¹)² − 1|` along a worldline.
pub fn worldline_normalization(worldline: &[WorldlineSample]) -> (f64, f64) {
    worldline.iter().fold((0.0f64, 0.0f64), |(g, l), s| {
        (
            g.max(s.normalization_defect().abs()),
            l.max(s.local_normalization_defect().abs()),
        )
    })
}

fn run_map(config: &RunConfig, n_steps: usize) -> Result<(Vec<WorldlineSample>, MomentumState)> {
    let m = config.mass;
    Ok((
        integrate_worldline(config.r_start * m, config.r_end * m, config.alpha0, m, n_steps)?,
        MomentumState::from_rapidity(config.alpha0, m)?,
    ))
}

/// `‖D(n) − D(2n)‖ / ‖D(2n) − D(4n)‖` for the configured trajectory.
pub fn richardson_ratio(config: &RunConfig) -> Result<f64> {
    let mut maps = Vec::new();
    for n in [config.n_steps, 2 * config.n_steps, 4 * config.n_steps] {
        let (w, mom) = run_map(config, n)?;
        maps.push(accumulate(&w, &mom)?);
    }
    Ok(maps[0].distance(&maps[1]) / maps[1].distance(&maps[2]))
}

/// Unitaries of shape `((A, B), (−B*, A*))` used by invariance checks.
pub fn sample_unitaries(n: usize) -> Vec<SpinorMap> {
    kronecker::<3>(n)
        .map(|[a, b, c]| {
            let th = PI * a;
            SpinorMap::su2(
                Complex64::from_polar((0.5 * th).cos(), 2.0 * PI * b),
                Complex64::from_polar((0.5 * th).sin(), 2.0 * PI * c),
            )
        })
        .collect()
}

/// Sample states: mixtures of orthogonal pure states.
pub fn sample_states(n: usize) -> Vec<DensityMatrix> {
    kronecker::<3>(n)
        .map(|[a, b, c]| {
            let u = (
                Complex64::new((PI * a).cos(), 0.0),
                Complex64::from_polar((PI * a).sin(), 2.0 * PI * b),
            );
            let up = DensityMatrix::from_pure(u.0, u.1);
            let down = DensityMatrix::from_pure(-u.1.conj(), u.0.conj());
            let m = up.matrix() * Complex64::new(c, 0.0) + down.matrix() * Complex64::new(1.0 - c, 0.0);
            DensityMatrix::new(m).expect("convex mixtures are states")
        })
        .collect()
}

/// `(|S(pure)|, |S(mixed) − 1|, max |S(UρU†) − S(ρ)|)` in bits.
pub fn entropy_invariants() -> Result<(f64, f64, f64)> {
    let mut pure = 0.0f64;
    for u in sample_unitaries(50) {
        pure = pure.max(von_neumann_entropy(&apply_map(&DensityMatrix::spin_up(), &u), true)?.abs());
    }
    let mixed = (von_neumann_entropy(&DensityMatrix::maximally_mixed(), true)? - 1.0).abs();
    let mut invariance = 0.0f64;
    for (rho, u) in sample_states(200).iter().zip(sample_unitaries(200)) {
        let s0 = von_neumann_entropy(rho, true)?;
        let s1 = von_neumann_entropy(&apply_map(rho, &u), true)?;
        invariance = invariance.max((s0 - s1).abs());
    }
    Ok((pure, mixed, invariance))
}

/// `(max ‖apply_map(↑, pI − (1−q)σ₁) − spin_up_output(p, q)‖, max |S − (−t log₂ t)|)`.
pub fn spin_up_consistency(maps: &[SpinorMap]) -> Result<(f64, f64)> {
    let mut state = 0.0f64;
    let mut entropy = 0.0f64;
    for d in maps {
        let (pq, _) = extract_pq(d)?;
        let radial = pq.reconstruct();
        let out = spin_up_output(pq.p, pq.q);
        state = state.max(apply_map(&DensityMatrix::spin_up(), &radial).distance(&out));
        let t = pq.p * pq.p + pq.flip() * pq.flip();
        let want = if t == 0.0 { 0.0 } else { -t * t.log2() };
        entropy = entropy.max((von_neumann_entropy(&out, false)? - want).abs());
    }
    Ok((state, entropy))
}

/// Largest relative gap between the printed Kruskal connection forms and the
/// forms derived from the tetrad, with the worst component's label.
pub fn printed_forms_gap(mass: f64) -> Result<(f64, String)> {
    let p = ChartPoint::kruskal(mass, 0.3, 1.7, 1.0, 0.0)?;
    let mut worst = (0.0, String::new());
    for d in compare_printed_forms(&p)? {
        let rel = d.relative();
        if rel > worst.0 {
            worst = (
                rel,
                format!("{}: printed {:.6e}, derived {:.6e}", d.label, d.printed, d.derived),
            );
        }
    }
    Ok(worst)
}

fn check<T>(name: &'static str, r: Result<T>, f: impl FnOnce(T) -> Check) -> Check {
    match r {
        Ok(v) => f(v),
        Err(e) => Check::failed(name, &e),
    }
}

/// Runs every check. `config` supplies the mass and the trajectory used for
/// the worldline, commutation, convergence and channel checks.
pub fn run_verify(config: &RunConfig, options: VerifyOptions) -> Vec<Check> {
    let m = config.mass;
    let mut out = Vec::new();
    out.push(check(
        "tetrad_compatibility",
        tetrad_compatibility(m, 1000, options.tetrad_perturbation),
        |v| Check::below("tetrad_compatibility", v, 1e-10, "1000 points per chart".into()),
    ));
    out.push(check("christoffel_oracle", christoffel_agreement(m), |v| {
        Check::below("christoffel_oracle", v, 1e-5, "finite difference vs analytic".into())
    }));
    out.push(check("metric_pullback", metric_pullback(m), |v| {
        Check::below(
            "metric_pullback",
            v,
            1e-8,
            "Kruskal metric vs Schwarzschild pullback".into(),
        )
    }));
    out.push(check("connection_antisymmetry", connection_antisymmetry(m, 300), |v| {
        Check::below("connection_antisymmetry", v, 1e-10, "lowered-index δω".into())
    }));
    out.push(check(
        "coordinate_round_trip",
        coordinate_round_trip(m, 1000),
        |(v, it)| {
            let mut c = Check::below("coordinate_round_trip", v, 1e-9, format!("max Newton iterations {it}"));
            c.passed &= it <= NEWTON_MAX_ITERATIONS;
            c
        },
    ));

    let run = run_map(config, config.n_steps);
    out.push(check("worldline_normalization", run.clone(), |(w, _)| {
        let (g, l) = worldline_normalization(&w);
        Check::below(
            "worldline_normalization",
            g.max(l),
            1e-8,
            format!("g(U,U) defect {g:.3e}, local defect {l:.3e}"),
        )
    }));
    let maps = run.and_then(|(w, mom)| {
        let fwd = accumulate_with(&w, &mom, ProductOrder::TimeOrdered, StepRule::Exponential)?;
        let rev = accumulate_with(&w, &mom, ProductOrder::Reversed, StepRule::Exponential)?;
        let history = accumulate_history(&w, &mom)?;
        let closed = closed_form_radial(&w, &mom)?;
        Ok((fwd, rev, history, closed))
    });
    out.push(check("radial_commutation", maps.clone(), |(f, r, _, _)| {
        Check::below(
            "radial_commutation",
            f.distance(&r),
            1e-12,
            "time-ordered vs reversed".into(),
        )
    }));
    out.push(check("refinement_convergence", richardson_ratio(config), |ratio| {
        Check {
            name: "refinement_convergence",
            measured: ratio,
            tolerance: None,
            passed: (3.2..=4.8).contains(&ratio),
            informational: false,
            detail: "Richardson ratio, expected in [3.2, 4.8]".into(),
        }
    }));
    out.push(check(
        "spin_up_output_consistency",
        maps.clone().and_then(|(_, _, h, _)| spin_up_consistency(&h)),
        |(s, e)| {
            Check::below(
                "spin_up_output_consistency",
                s.max(e),
                1e-12,
                format!("state {s:.3e}, entropy {e:.3e}"),
            )
        },
    ));
    out.push(check("entropy_invariants", entropy_invariants(), |(p, mx, inv)| {
        Check {
            name: "entropy_invariants",
            measured: p.max(mx).max(inv),
            tolerance: Some(1e-10),
            passed: p <= 1e-12 && mx <= 1e-12 && inv <= 1e-10,
            informational: false,
            detail: format!("pure {p:.3e}, maximally mixed {mx:.3e}, unitary invariance {inv:.3e}"),
        }
    }));

    out.push(check(
        "printed_connection_forms",
        printed_forms_gap(m),
        |(gap, label)| {
            Check::info(
                "printed_connection_forms",
                gap,
                format!("largest relative gap, {label}"),
            )
        },
    ));
    out.push(check("closed_form_comparator", maps, |(f, _, _, c)| {
        Check::info(
            "closed_form_comparator",
            f.distance(&c),
            format!("‖closed form − ordered product‖, closed form {c}"),
        )
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_points_fill_the_cube() {
        let pts: Vec<[f64; 2]> = kronecker::<2>(1000).collect();
        assert!(pts.iter().all(|p| p.iter().all(|x| (0.0..1.0).contains(x))));
        let low = pts.iter().filter(|p| p[0] < 0.5 && p[1] < 0.5).count();
        assert!((200..300).contains(&low), "{low}");
    }

    #[test]
    fn perturbed_tetrad_fails_compatibility() {
        assert!(tetrad_compatibility(1.0, 50, 0.0).unwrap() < 1e-10);
        assert!(tetrad_compatibility(1.0, 50, 1e-4).unwrap() > 1e-10);
    }
}
