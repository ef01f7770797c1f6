//! The Wigner map as a (non trace-preserving) qubit channel: output states,
//! von Neumann entropy, `(p, q)` extraction and bit-flip similarity.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spinor::SpinorMap;
use crate::wigner::unitarity_deviation;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-6;
pub const BITFLIP_SCAN_STEP: f64 = 1e-4;

/// Hermitian positive-semidefinite 2×2 matrix; the trace is carried along and
/// is not assumed to be 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    rho: Matrix2<Complex64>,
}

fn scale_of(m: &Matrix2<Complex64>) -> f64 {
    (m[(0, 0)].re + m[(1, 1)].re).abs().max(1.0)
}

impl DensityMatrix {
    /// Validates Hermiticity and positivity, then stores the exact Hermitian part.
    pub fn new(rho: Matrix2<Complex64>) -> Result<Self> {
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                quantity: "density matrix",
            });
        }
        let skew = (rho - rho.adjoint()).norm() * 0.5;
        if skew > HERMITIAN_TOLERANCE * scale_of(&rho) {
            return Err(Error::domain("‖ρ − ρ†‖/2", skew, "density matrix must be Hermitian"));
        }
        let out = DensityMatrix {
            rho: (rho + rho.adjoint()) * Complex64::new(0.5, 0.0),
        };
        let (lo, _) = out.eigenvalues();
        if lo < -EIGENVALUE_FLOOR * scale_of(&out.rho) {
            return Err(Error::domain(
                "smallest eigenvalue",
                lo,
                "density matrix must be positive semidefinite",
            ));
        }
        Ok(out)
    }

    /// `vv†` for a (not necessarily normalized) spinor `v`.
    pub fn from_pure(v0: Complex64, v1: Complex64) -> Self {
        let v = nalgebra::Vector2::new(v0, v1);
        DensityMatrix { rho: v * v.adjoint() }
    }

    pub fn spin_up() -> Self {
        Self::from_pure(1.0.into(), 0.0.into())
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            rho: Matrix2::identity() * Complex64::new(0.5, 0.0),
        }
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.rho
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.rho[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.rho[(0, 0)].re + self.rho[(1, 1)].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half = 0.5 * self.trace();
        let gap = (0.5 * (self.rho[(0, 0)].re - self.rho[(1, 1)].re)).hypot(self.rho[(0, 1)].norm());
        (half - gap, half + gap)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::domain("Tr ρ", tr, "cannot normalize a state of zero trace"));
        }
        Ok(DensityMatrix {
            rho: self.rho / Complex64::new(tr, 0.0),
        })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.rho - other.rho).norm()
    }
}

/// `ρ' = DρD†`, Hermitian by construction.
pub fn apply_map(rho: &DensityMatrix, d: &SpinorMap) -> DensityMatrix {
    let out = d.0 * rho.rho * d.0.adjoint();
    DensityMatrix {
        rho: (out + out.adjoint()) * Complex64::new(0.5, 0.0),
    }
}

/// `((p², −p(1−q)), (−p(1−q), (1−q)²))`, the image of spin up under `pI − (1−q)σ₁`.
pub fn spin_up_output(p: f64, q: f64) -> DensityMatrix {
    let s = 1.0 - q;
    let off = Complex64::new(-p * s, 0.0);
    DensityMatrix {
        rho: Matrix2::new(Complex64::new(p * p, 0.0), off, off, Complex64::new(s * s, 0.0)),
    }
}

/// Scalars of `D = pI − (1−q)σ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub p: f64,
    pub q: f64,
}

impl ChannelParams {
    pub fn flip(&self) -> f64 {
        1.0 - self.q
    }

    pub fn reconstruct(&self) -> SpinorMap {
        SpinorMap::radial(self.p, -self.flip())
    }
}

/// Projects `D` onto the real span of `{I, σ₁}`; returns the parameters and
/// the Frobenius residual of the projection.
pub fn extract_pq(d: &SpinorMap) -> Result<(ChannelParams, f64)> {
    if !d.is_finite() {
        return Err(Error::NonFinite { quantity: "Wigner map" });
    }
    let [d11, d12, d21, d22] = d.entries();
    let p = 0.5 * (d11.re + d22.re);
    let s = -0.5 * (d12.re + d21.re);
    let params = ChannelParams { p, q: 1.0 - s };
    let residual = d.distance(&params.reconstruct());
    if residual > DECOMPOSITION_TOLERANCE {
        return Err(Error::Decomposition { residual });
    }
    Ok((params, residual))
}

fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// von Neumann entropy in bits. With `normalize = false` the eigenvalues of
/// `ρ` are used as they are, so a rank-1 state of trace `t` gives `−t log₂ t`.
pub fn von_neumann_entropy(rho: &DensityMatrix, normalize: bool) -> Result<f64> {
    let state = if normalize { rho.normalized()? } else { *rho };
    let (lo, hi) = state.eigenvalues();
    let floor = -EIGENVALUE_FLOOR * state.trace().abs().max(1.0);
    if lo < floor {
        return Err(Error::domain("eigenvalue of ρ", lo, "negative beyond round-off"));
    }
    let s = -(xlog2x(lo.max(0.0)) + xlog2x(hi.max(0.0)));
    // A unit-trace state cannot have negative entropy; the sign is round-off.
    Ok(if normalize { s.max(0.0) } else { s })
}

/// Pauli transfer matrix `R_ij = ½ Tr(σ_i Φ(σ_j))` of `Φ(X) = AXA†/norm`.
pub fn pauli_transfer_matrix(a: &SpinorMap, norm: f64) -> [[f64; 4]; 4] {
    let basis = [
        SpinorMap::identity(),
        SpinorMap::sigma_x(),
        SpinorMap::sigma_y(),
        SpinorMap::sigma_z(),
    ];
    let adj = a.adjoint();
    let mut r = [[0.0; 4]; 4];
    for (j, sj) in basis.iter().enumerate() {
        let image = (a * sj) * adj;
        for (i, si) in basis.iter().enumerate() {
            r[i][j] = 0.5 * (si * &image).trace().re / norm;
        }
    }
    r
}

fn bitflip_gap(ptm: &[[f64; 4]; 4], lambda: f64) -> f64 {
    let shrink = 1.0 - 2.0 * lambda;
    let target = [1.0, 1.0, shrink, shrink];
    let mut sum = 0.0;
    for (i, row) in ptm.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let t = if i == j { target[i] } else { 0.0 };
            sum += (v - t).powi(2);
        }
    }
    sum.sqrt()
}

/// Closest bit-flip channel `(1−λ)X + λσ₁Xσ₁` to the trace-normalized map
/// `X ↦ AXA†/Tr(Aρ↑A†)`, `A = pI − (1−q)σ₁`, in the Pauli transfer basis.
/// Returns `(distance, λ)`; both are NaN when `A` annihilates spin up.
pub fn bitflip_distance(params: &ChannelParams) -> (f64, f64) {
    let a = params.reconstruct();
    let norm = apply_map(&DensityMatrix::spin_up(), &a).trace();
    if !(norm > 0.0) || !norm.is_finite() {
        return (f64::NAN, f64::NAN);
    }
    let ptm = pauli_transfer_matrix(&a, norm);
    let gap = |l: f64| bitflip_gap(&ptm, l);

    let n = (1.0 / BITFLIP_SCAN_STEP).round() as usize;
    let (mut best, mut best_gap) = (0.0, gap(0.0));
    for k in 1..=n {
        let l = k as f64 / n as f64;
        let g = gap(l);
        if g < best_gap {
            best = l;
            best_gap = g;
        }
    }

    // Golden-section refinement on the bracketing scan cell.
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = ((best - BITFLIP_SCAN_STEP).max(0.0), (best + BITFLIP_SCAN_STEP).min(1.0));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut g1, mut g2) = (gap(x1), gap(x2));
    for _ in 0..80 {
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = gap(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = gap(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let g_mid = gap(mid);
    if g_mid < best_gap {
        (g_mid, mid)
    } else {
        (best_gap, best)
    }
}

/// Channel diagnostics of an accumulated radial Wigner map acting on spin up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReport {
    pub params: ChannelParams,
    pub decomposition_residual: f64,
    /// `−Σ λ log₂ λ` of the unnormalized output.
    pub entropy_paper: f64,
    pub entropy_normalized: f64,
    /// Purity of the normalized output.
    pub purity: f64,
    pub unitarity_dev: f64,
    pub trace_out: f64,
    pub bitflip_distance: f64,
    pub bitflip_lambda: f64,
}

pub fn channel_report(d: &SpinorMap) -> Result<ChannelReport> {
    let (params, decomposition_residual) = extract_pq(d)?;
    let out = apply_map(&DensityMatrix::spin_up(), d);
    let normalized = out.normalized()?;
    let (bitflip_distance, bitflip_lambda) = bitflip_distance(&params);
    Ok(ChannelReport {
        params,
        decomposition_residual,
        entropy_paper: von_neumann_entropy(&out, false)?,
        entropy_normalized: von_neumann_entropy(&out, true)?,
        purity: normalized.purity(),
        unitarity_dev: unitarity_deviation(d),
        trace_out: out.trace(),
        bitflip_distance,
        bitflip_lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::flat_limit_step;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spin_up_output_examples() {
        assert_eq!(spin_up_output(1.0, 1.0), DensityMatrix::spin_up());
        let flipped = spin_up_output(0.0, 0.0);
        assert_eq!(flipped.get(1, 1), c(1.0, 0.0));
        assert_eq!(flipped.get(0, 0), c(0.0, 0.0));
        let s = spin_up_output(0.8, 0.9);
        let want = [0.64, -0.08, -0.08, 0.01];
        for (k, w) in want.iter().enumerate() {
            assert!((s.get(k / 2, k % 2).re - w).abs() < 1e-15);
        }
        assert!((s.trace() - 0.65).abs() < 1e-15);
    }

    #[test]
    fn apply_map_identity_and_radial_form() {
        let rho = DensityMatrix::new(Matrix2::new(c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0))).unwrap();
        assert_eq!(apply_map(&rho, &SpinorMap::identity()), rho);
        let (p, q) = (0.93, 0.71);
        let d = SpinorMap::radial(p, -(1.0 - q));
        assert!(apply_map(&DensityMatrix::spin_up(), &d).distance(&spin_up_output(p, q)) < 1e-12);
    }

    #[test]
    fn extract_pq_examples() {
        let (id, res) = extract_pq(&SpinorMap::identity()).unwrap();
        assert_eq!((id.p, id.q, res), (1.0, 1.0, 0.0));
        let (flip, _) = extract_pq(&SpinorMap::sigma_x().scale(c(-1.0, 0.0))).unwrap();
        assert_eq!((flip.p, flip.q), (0.0, 0.0));
        assert!(matches!(
            extract_pq(&flat_limit_step(1e-3)),
            Err(Error::Decomposition { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&DensityMatrix::spin_up(), true).unwrap(), 0.0);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(), true).unwrap() - 1.0).abs() < 1e-15);
        // p² + (1−q)² = 1/2
        let half = spin_up_output(0.5, 0.5);
        assert!((von_neumann_entropy(&half, false).unwrap() - 0.5).abs() < 1e-15);
        assert!(von_neumann_entropy(&half, true).unwrap().abs() < 1e-12);
    }

    #[test]
    fn negative_states_rejected() {
        let bad = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1e-6, 0.0));
        assert!(DensityMatrix::new(bad).is_err());
        let tiny = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1e-14, 0.0));
        let ok = DensityMatrix::new(tiny).unwrap();
        assert_eq!(von_neumann_entropy(&ok, false).unwrap(), 0.0);
        let skew = Matrix2::new(c(1.0, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.0, 0.0));
        assert!(DensityMatrix::new(skew).is_err());
    }

    #[test]
    fn bitflip_limits() {
        let (d, l) = bitflip_distance(&ChannelParams { p: 1.0, q: 1.0 });
        assert!(d < 1e-12 && l < 1e-12, "{d} {l}");
        let (d, l) = bitflip_distance(&ChannelParams { p: 0.0, q: 0.0 });
        assert!(d < 1e-12 && (l - 1.0).abs() < 1e-12, "{d} {l}");
        assert!(bitflip_distance(&ChannelParams { p: 0.0, q: 1.0 }).0.is_nan());
    }

    #[test]
    fn bitflip_matches_closed_form_minimum() {
        // A = pI − sσ₁ has PTM diag(1, 1, (p²−s²)/t, (p²−s²)/t) plus ∓2ps/t in
        // the (0,1) block, t = p² + s², so the optimum is λ = s²/t with
        // distance 2√2|ps|/t.
        for &(p, q) in &[(0.97, 0.65), (0.4, 0.1), (1.3, 1.2), (0.1, 0.95)] {
            let s = 1.0 - q;
            let t = p * p + s * s;
            let (d, l) = bitflip_distance(&ChannelParams { p, q });
            assert!((d - 2.0 * 2f64.sqrt() * (p * s).abs() / t).abs() < 1e-9, "{p} {q}: {d}");
            assert!((l - s * s / t).abs() < 1e-6, "{p} {q}: {l}");
        }
    }

    #[test]
    fn report_for_identity() {
        let r = channel_report(&SpinorMap::identity()).unwrap();
        assert_eq!(r.entropy_paper, 0.0);
        assert_eq!(r.entropy_normalized, 0.0);
        assert!((r.purity - 1.0).abs() < 1e-15);
        assert_eq!(r.unitarity_dev, 0.0);
        assert_eq!(r.trace_out, 1.0);
        assert!(r.bitflip_distance < 1e-12);
    }
}
