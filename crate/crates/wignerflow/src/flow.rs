//! Wigner currents, their Liouvillian truncation, the quantum excess ΔJ_k,
//! the continuity-equation residual, and stagnation-point analysis.
//!
//! The stationary continuity equation is ∂_x J_x + ∂_k J_k = 0 with
//!
//!   J_x = k W,
//!   J_k = −x (W + c Y),          c = (1 − 4α²)/4,
//!
//! where the single auxiliary kernel Y resums the entire Moyal series of the
//! inverse-square force. The Liouvillian (classical) truncation keeps only
//! the force term: J_k^{cl} = −(x + c/x³) W, and the quantum excess is
//! ΔJ_k = J_k − J_k^{cl} = −c (x Y − W/x³). At α = 1/2 the prefactor c is
//! exactly zero in f64 and the flow is exactly classical.

use rayon::prelude::*;
use serde::Serialize;

use crate::quantum::{
    wigner_closed, wigner_k_derivative_quadrature, wigner_y_closed, y_kernel_closed, FieldLabel,
    PhaseGrid, QuantumError, ScalarField, SupportMode, SystemConfig,
};

/// Moyal-series prefactor c = (1 − 4α²)/4; exactly 0.0 at α = 1/2.
pub fn quantum_prefactor(cfg: &SystemConfig) -> f64 {
    let a = cfg.alpha();
    (1.0 - 4.0 * a * a) / 4.0
}

/// J_x = k · W.
pub fn current_x(cfg: &SystemConfig, x: f64, k: f64) -> Result<f64, QuantumError> {
    Ok(k * wigner_closed(cfg, x, k)?)
}

/// J_k = −x (W + c Y). At α = 1/2 the Y term is skipped entirely (c = 0).
pub fn current_k(cfg: &SystemConfig, x: f64, k: f64) -> Result<f64, QuantumError> {
    let c = quantum_prefactor(cfg);
    if c == 0.0 {
        return Ok(-x * wigner_closed(cfg, x, k)?);
    }
    if let Some(v) = support_zero(cfg, x) {
        return Ok(v);
    }
    let (w, y) = wigner_y_closed(cfg, x, k)?;
    Ok(-x * (w + c * y))
}

/// Liouvillian truncation J_k^{cl} = −(x + c/x³) W. Diverges at x = 0 in
/// bounce mode (the classical 1/x³ force is singular at the wall).
pub fn current_k_classical(cfg: &SystemConfig, x: f64, k: f64) -> Result<f64, QuantumError> {
    if let Some(v) = support_zero(cfg, x) {
        return Ok(v);
    }
    check_bounce_axis(cfg, x, k)?;
    let c = quantum_prefactor(cfg);
    Ok(-(x + c / (x * x * x)) * wigner_closed(cfg, x, k)?)
}

/// Quantum excess ΔJ_k = J_k − J_k^{cl} = −c (x Y − W/x³); exactly 0.0 for
/// α = 1/2 and outside the half-line support.
pub fn delta_current_k(cfg: &SystemConfig, x: f64, k: f64) -> Result<f64, QuantumError> {
    let c = quantum_prefactor(cfg);
    if c == 0.0 {
        return Ok(0.0);
    }
    if let Some(v) = support_zero(cfg, x) {
        return Ok(v);
    }
    check_bounce_axis(cfg, x, k)?;
    let (w, y) = wigner_y_closed(cfg, x, k)?;
    Ok(-c * (x * y - w / (x * x * x)))
}

/// (J_x, J_k) with one shared evaluation of (W, Y).
pub fn current_vector(cfg: &SystemConfig, x: f64, k: f64) -> Result<(f64, f64), QuantumError> {
    let c = quantum_prefactor(cfg);
    if c == 0.0 {
        let w = wigner_closed(cfg, x, k)?;
        return Ok((k * w, -x * w));
    }
    if support_zero(cfg, x).is_some() {
        return Ok((0.0, 0.0));
    }
    let (w, y) = wigner_y_closed(cfg, x, k)?;
    Ok((k * w, -x * (w + c * y)))
}

/// All currents vanish identically outside the half-line support.
fn support_zero(cfg: &SystemConfig, x: f64) -> Option<f64> {
    (cfg.mode() == SupportMode::HalfLine && x <= 0.0).then_some(0.0)
}

fn check_bounce_axis(cfg: &SystemConfig, x: f64, k: f64) -> Result<(), QuantumError> {
    if cfg.mode() == SupportMode::Bounce && x == 0.0 {
        return Err(QuantumError::Domain {
            x,
            k,
            message: "classical 1/x^3 force is singular at the bounce axis x = 0".into(),
        });
    }
    Ok(())
}

/// Evaluate one labeled scalar field over the grid, node-parallel, using the
/// closed-form evaluators.
pub fn evaluate_field(
    cfg: &SystemConfig,
    grid: PhaseGrid,
    label: FieldLabel,
) -> Result<ScalarField, QuantumError> {
    match label {
        FieldLabel::W => ScalarField::build_parallel(grid, label, |x, k| wigner_closed(cfg, x, k)),
        FieldLabel::Y => {
            ScalarField::build_parallel(grid, label, |x, k| y_kernel_closed(cfg, x, k))
        }
        FieldLabel::Jx => ScalarField::build_parallel(grid, label, |x, k| current_x(cfg, x, k)),
        FieldLabel::Jk => ScalarField::build_parallel(grid, label, |x, k| current_k(cfg, x, k)),
        FieldLabel::JkClassical => {
            ScalarField::build_parallel(grid, label, |x, k| current_k_classical(cfg, x, k))
        }
        FieldLabel::DeltaJk => {
            ScalarField::build_parallel(grid, label, |x, k| delta_current_k(cfg, x, k))
        }
        FieldLabel::DivergenceResidual => divergence_residual(cfg, grid),
    }
}

/// Continuity-equation residual ∂_x J_x + ∂_k J_k by central differences at
/// interior nodes (one-node margin set to zero). For stationary eigenstates
/// the true divergence vanishes, so the residual is pure discretization
/// error, O(h²).
pub fn divergence_residual(
    cfg: &SystemConfig,
    grid: PhaseGrid,
) -> Result<ScalarField, QuantumError> {
    grid.validate()?;
    if grid.nx < 3 || grid.nk < 3 {
        return Err(QuantumError::InvalidGrid(format!(
            "divergence residual needs at least 3 nodes per axis, got {}x{}",
            grid.nx, grid.nk
        )));
    }
    let jx = evaluate_field(cfg, grid, FieldLabel::Jx)?;
    let jk = evaluate_field(cfg, grid, FieldLabel::Jk)?;
    let (nx, nk) = (grid.nx, grid.nk);
    let (two_dx, two_dk) = (2.0 * grid.dx(), 2.0 * grid.dk());
    let mut values = vec![0.0; grid.len()];
    for ix in 1..nx - 1 {
        for ik in 1..nk - 1 {
            let ddx = (jx.value(ix + 1, ik) - jx.value(ix - 1, ik)) / two_dx;
            let ddk = (jk.value(ix, ik + 1) - jk.value(ix, ik - 1)) / two_dk;
            values[ix * nk + ik] = ddx + ddk;
        }
    }
    ScalarField::from_values(grid, FieldLabel::DivergenceResidual, values)
}

/// Truncated Moyal-series momentum current: the resummed J_k must be the
/// ν → ∞ limit of
///
///   J_k^{(ν_max)} = −(x + c/x³) W + (c₂/ ) Σ_{ν=1}^{ν_max}
///                   (−1)^ν (2ν+2) 4^{−ν} x^{−(2ν+3)} ∂_k^{2ν} W,
///
/// with the series coefficient (4α²−1)/8 = −c/2 and the k-derivatives taken
/// exactly under the defining integral (quadrature route). This is the
/// three-way consistency check tying the closed J_k, the oracle W, and the
/// term-by-term Moyal expansion together.
pub fn moyal_truncated_current_k(
    cfg: &SystemConfig,
    x: f64,
    k: f64,
    nu_max: usize,
) -> Result<f64, QuantumError> {
    let c = quantum_prefactor(cfg);
    let w = crate::quantum::wigner_quadrature(cfg, x, k)?;
    let mut jk = -(x + c / (x * x * x)) * w;
    let g = -0.5 * c; // (4α²−1)/8
    for nu in 1..=nu_max {
        // The derivative magnitude grows like (2x)^{2ν} (the y-support
        // bound), so the absolute tolerance tracks that scale.
        let tol = 1e-12 * (2.0 * x.abs()).powi(2 * nu as i32).max(1.0);
        let d2nu = wigner_k_derivative_quadrature(cfg, x, k, nu, tol)?;
        let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * (2.0 * nu as f64 + 2.0) / 4f64.powi(nu as i32);
        jk += g * coeff * x.powi(-(2 * nu as i32 + 3)) * d2nu;
    }
    Ok(jk)
}

/// Local rotation sense of a stagnation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StagnationClass {
    /// Clockwise vortex (classical-like circulation, curl < 0).
    VortexCw,
    /// Counterclockwise vortex (inverted circulation, curl > 0).
    VortexCcw,
    /// Hyperbolic point (Poincaré index −1).
    Saddle,
    /// Degenerate point (Poincaré index 0, e.g. separatrix intersections).
    SeparatrixNode,
}

/// A refined joint zero of (J_x, J_k).
///
/// `index` is the measured Poincaré index (total field rotation / 2π around
/// a 16-point loop of radius two grid cells): +1 for either vortex sense,
/// −1 for saddles, 0 for degenerate points. `winding` is the reported
/// convention of the flow taxonomy: vortices carry their rotation sense
/// (counterclockwise +1, clockwise −1) and saddles/separatrix nodes carry 0,
/// so mirror-symmetric vortex pairs cancel. Curve additivity (the loop
/// theorem) holds for `index`, not for `winding`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StagnationPoint {
    pub x: f64,
    pub k: f64,
    pub classification: StagnationClass,
    pub winding: i32,
    pub index: i32,
    /// |J| at the refined location (≤ 1e−9 × field scale by construction).
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StagnationInventory {
    pub points: Vec<StagnationPoint>,
    /// max(|J_x|, |J_k|) over the scanned grid, the scale for residuals.
    pub field_scale: f64,
    /// Number of candidate pairs closer than one cell merged into one point.
    pub merge_events: usize,
}

impl StagnationInventory {
    /// Sum of reported windings (taxonomy convention).
    pub fn winding_sum(&self) -> i32 {
        self.points.iter().map(|p| p.winding).sum()
    }
    /// Sum of Poincaré indices (curve-additive).
    pub fn index_sum(&self) -> i32 {
        self.points.iter().map(|p| p.index).sum()
    }
}

const RESIDUAL_REL_TOL: f64 = 1e-9;

/// Locate, refine, and classify all stagnation points of the Wigner current
/// on the grid: scan cells where both components straddle zero, refine by
/// 2-D quadrant bisection (with a Newton polish), keep joint zeros with
/// |J| ≤ 1e−9 × field scale, then measure the Poincaré index on a 16-point
/// loop and classify by index and local curl.
pub fn find_stagnation_points(
    cfg: &SystemConfig,
    grid: PhaseGrid,
) -> Result<StagnationInventory, QuantumError> {
    let jx = evaluate_field(cfg, grid, FieldLabel::Jx)?;
    let jk = evaluate_field(cfg, grid, FieldLabel::Jk)?;
    let field_scale = jx.max_abs().max(jk.max_abs());
    if field_scale == 0.0 {
        return Ok(StagnationInventory {
            points: Vec::new(),
            field_scale,
            merge_events: 0,
        });
    }

    // Candidate cells: all four-corner sign straddles in both components.
    let mut cells = Vec::new();
    for ix in 0..grid.nx - 1 {
        for ik in 0..grid.nk - 1 {
            let corners = [(ix, ik), (ix + 1, ik), (ix, ik + 1), (ix + 1, ik + 1)];
            let straddles = |f: &ScalarField| {
                let vals = corners.map(|(a, b)| f.value(a, b));
                let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                min <= 0.0 && max >= 0.0
            };
            if straddles(&jx) && straddles(&jk) {
                cells.push((ix, ik));
            }
        }
    }

    let tol = RESIDUAL_REL_TOL * field_scale;
    let refined: Vec<(f64, f64, f64)> = cells
        .par_iter()
        .filter_map(|&(ix, ik)| {
            refine_cell(
                cfg,
                grid.x(ix),
                grid.x(ix + 1),
                grid.k(ik),
                grid.k(ik + 1),
                tol,
            )
        })
        .collect();

    // Merge candidates closer than one cell (the same zero found from two
    // adjacent cells); keep the better-refined representative.
    let (dx, dk) = (grid.dx(), grid.dk());
    let mut kept: Vec<(f64, f64, f64)> = Vec::new();
    let mut merge_events = 0;
    for cand in refined {
        match kept
            .iter_mut()
            .find(|p| (p.0 - cand.0).abs() < dx && (p.1 - cand.1).abs() < dk)
        {
            Some(p) => {
                merge_events += 1;
                if cand.2 < p.2 {
                    *p = cand;
                }
            }
            None => kept.push(cand),
        }
    }

    let points = kept
        .into_iter()
        .map(|(x, k, residual)| {
            let index = poincare_index(cfg, x, k, 2.0 * dx, 2.0 * dk, field_scale)?;
            let curl = local_curl(cfg, x, k, 0.5 * dx, 0.5 * dk)?;
            let (classification, winding) = match index {
                1 => {
                    if curl > 0.0 {
                        (StagnationClass::VortexCcw, 1)
                    } else {
                        (StagnationClass::VortexCw, -1)
                    }
                }
                -1 => (StagnationClass::Saddle, 0),
                _ => (StagnationClass::SeparatrixNode, 0),
            };
            Ok(StagnationPoint {
                x,
                k,
                classification,
                winding,
                index,
                residual,
            })
        })
        .collect::<Result<Vec<_>, QuantumError>>()?;

    Ok(StagnationInventory {
        points,
        field_scale,
        merge_events,
    })
}

/// Quadrant bisection toward the joint zero inside one cell, preferring
/// subcells whose corners straddle zero in both components, then a few
/// Newton steps to polish. Returns None when the cell straddle was spurious
/// (the two zero curves do not actually intersect there).
fn refine_cell(
    cfg: &SystemConfig,
    mut x0: f64,
    mut x1: f64,
    mut k0: f64,
    mut k1: f64,
    tol: f64,
) -> Option<(f64, f64, f64)> {
    let j = |x: f64, k: f64| current_vector(cfg, x, k).unwrap_or((f64::NAN, f64::NAN));
    for _ in 0..30 {
        let (xm, km) = (0.5 * (x0 + x1), 0.5 * (k0 + k1));
        let sub = [
            (x0, xm, k0, km),
            (xm, x1, k0, km),
            (x0, xm, km, k1),
            (xm, x1, km, k1),
        ];
        let mut best: Option<((f64, f64, f64, f64), f64)> = None;
        for s in sub {
            let corners = [j(s.0, s.2), j(s.1, s.2), j(s.0, s.3), j(s.1, s.3)];
            let strad = |pick: fn(&(f64, f64)) -> f64| {
                let v = corners.iter().map(pick).collect::<Vec<_>>();
                v.iter().cloned().fold(f64::INFINITY, f64::min) <= 0.0
                    && v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) >= 0.0
            };
            if strad(|c| c.0) && strad(|c| c.1) {
                let (cx, ck) = (0.5 * (s.0 + s.1), 0.5 * (s.2 + s.3));
                let (a, b) = j(cx, ck);
                let mag = a.hypot(b);
                if best.as_ref().is_none_or(|(_, m)| mag < *m) {
                    best = Some((s, mag));
                }
            }
        }
        match best {
            Some((s, _)) => (x0, x1, k0, k1) = s,
            // Straddle lost: the curves separated below cell resolution.
            None => break,
        }
    }

    // Newton polish with finite-difference Jacobian.
    let (mut x, mut k) = (0.5 * (x0 + x1), 0.5 * (k0 + k1));
    let h = ((x1 - x0).abs().max((k1 - k0).abs())).max(1e-9);
    for _ in 0..60 {
        let (fx, fk) = j(x, k);
        if !fx.is_finite() || !fk.is_finite() {
            return None;
        }
        if fx.hypot(fk) <= tol {
            return Some((x, k, fx.hypot(fk)));
        }
        let s = h.max(1e-7 * (x.abs() + k.abs()));
        let (axp, akp) = j(x + s, k);
        let (axm, akm) = j(x - s, k);
        let (bxp, bkp) = j(x, k + s);
        let (bxm, bkm) = j(x, k - s);
        let j11 = (axp - axm) / (2.0 * s);
        let j21 = (akp - akm) / (2.0 * s);
        let j12 = (bxp - bxm) / (2.0 * s);
        let j22 = (bkp - bkm) / (2.0 * s);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = (fx * j22 - fk * j12) / det;
        let dk = (fk * j11 - fx * j21) / det;
        // Clamp the step to twice the cell: a diverging Newton means the
        // candidate was spurious.
        let cap = 2.0 * ((x1 - x0).abs() + (k1 - k0).abs());
        if dx.abs() > cap || dk.abs() > cap {
            return None;
        }
        x -= dx;
        k -= dk;
    }
    let (fx, fk) = j(x, k);
    let mag = fx.hypot(fk);
    (mag <= tol).then_some((x, k, mag))
}

/// Poincaré index: total rotation of (J_x, J_k) along a 16-point elliptical
/// loop of half-axes (rx, rk), with branch-cut unwrapping, divided by 2π.
fn poincare_index(
    cfg: &SystemConfig,
    x: f64,
    k: f64,
    rx: f64,
    rk: f64,
    field_scale: f64,
) -> Result<i32, QuantumError> {
    let m = 16;
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    let mut first = 0.0;
    for i in 0..=m {
        let phase = 2.0 * std::f64::consts::PI * (i % m) as f64 / m as f64;
        let (px, pk) = (x + rx * phase.cos(), k + rk * phase.sin());
        let (jx, jk) = current_vector(cfg, px, pk)?;
        if jx.hypot(jk) < 1e-14 * field_scale {
            // Field vanishes on the loop: the index is not defined at this
            // radius; report degenerate.
            return Ok(0);
        }
        let theta = jk.atan2(jx);
        match prev {
            None => first = theta,
            Some(p) => {
                let mut d = theta - p;
                while d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                }
                while d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                total += d;
            }
        }
        prev = Some(theta);
    }
    let _ = first;
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i32)
}

/// Field rotation along an axis-aligned rectangle (counterclockwise), for
/// the additivity check: equals the sum of enclosed Poincaré indices.
pub fn winding_on_rectangle(
    cfg: &SystemConfig,
    x0: f64,
    x1: f64,
    k0: f64,
    k1: f64,
    pts_per_side: usize,
) -> Result<i32, QuantumError> {
    assert!(pts_per_side >= 2);
    let mut path = Vec::with_capacity(4 * pts_per_side);
    for i in 0..pts_per_side {
        let t = i as f64 / pts_per_side as f64;
        path.push((x0 + t * (x1 - x0), k0));
    }
    for i in 0..pts_per_side {
        let t = i as f64 / pts_per_side as f64;
        path.push((x1, k0 + t * (k1 - k0)));
    }
    for i in 0..pts_per_side {
        let t = i as f64 / pts_per_side as f64;
        path.push((x1 - t * (x1 - x0), k1));
    }
    for i in 0..pts_per_side {
        let t = i as f64 / pts_per_side as f64;
        path.push((x0, k1 - t * (k1 - k0)));
    }
    path.push(path[0]);

    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for (px, pk) in path {
        let (jx, jk) = current_vector(cfg, px, pk)?;
        let theta = jk.atan2(jx);
        if let Some(p) = prev {
            let mut d = theta - p;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            total += d;
        }
        prev = Some(theta);
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i32)
}

/// Scalar curl ∂_x J_k − ∂_k J_x by central differences.
fn local_curl(cfg: &SystemConfig, x: f64, k: f64, hx: f64, hk: f64) -> Result<f64, QuantumError> {
    let jk_p = current_vector(cfg, x + hx, k)?.1;
    let jk_m = current_vector(cfg, x - hx, k)?.1;
    let jx_p = current_vector(cfg, x, k + hk)?.0;
    let jx_m = current_vector(cfg, x, k - hk)?.0;
    Ok((jk_p - jk_m) / (2.0 * hx) - (jx_p - jx_m) / (2.0 * hk))
}
