//! The validation suite: every acceptance property of the crate as a
//! self-contained, deterministic runner producing a pass/fail outcome with
//! measured numbers in the details.
//!
//! The same runners back the `validate` CLI command and the `acceptance`
//! integration test, so the printed table and the test verdicts can never
//! drift apart. Runners never panic on numerical failure; they return a
//! failed outcome carrying the diagnostic.
//!
//! Two numerically delicate schemes are shared here:
//!
//! * **Clean-core / exact-tail splits.** The closed-form Wigner evaluator
//!   carries ~1e−5-scale evaluation noise for |k| > 6 at small x (cancelling
//!   error-function growth terms), so whole-plane integrals evaluate the
//!   closed form only on the validated band |k| ≤ 6 and supply the remainder
//!   through exact, W-independent identities: the marginal remainder via
//!   |φ|² − (y-representation partial marginal), and the squared-W remainder
//!   via the Plancherel identity ∫W(x,·)² dk = (2/π)∫₀ˣ φ(x+y)²φ(x−y)² dy
//!   with a quadrature-route core subtraction (so the closed form under test
//!   never cancels out of the check).
//!
//! * **Honest reporting.** Five checks measure properties that the family
//!   genuinely violates at the stated tolerances: the closed-form noise
//!   corner (oracle equivalence), zero-node mutual crossing, the (n = 2,
//!   purity) suppression cell, the enclosed winding-sum, and the bounce
//!   agreement at the x = 3 edge. The runners report the measured values
//!   and fail; they do not widen tolerances or special-case the known-red
//!   cells. Each red is analyzed in its runner's doc comment.

use std::fmt::Write as _;
use std::time::Instant;

use crate::classical::{hamiltonian, trajectory};
use crate::flow::{delta_current_k, divergence_residual, find_stagnation_points};
use crate::quadrature::{clenshaw_curtis, integrate, QuadratureError};
use crate::quantifiers::{find_flux_zero, flux_report_at, FluxReport, RateKind};
use crate::quantum::{
    eigenstate, energy_residual, wigner_closed, wigner_partial_marginal, wigner_quadrature,
    y_kernel_closed, y_kernel_quadrature, FieldLabel, PhaseGrid, ScalarField, SupportMode,
    SystemConfig,
};

/// Result of one validation check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckOutcome {
    /// 1-based position in the canonical suite order.
    pub id: usize,
    /// Stable short name (also the row label in the CLI table).
    pub name: &'static str,
    pub passed: bool,
    /// Measured numbers, worst cases, and failure diagnostics.
    pub details: String,
    pub elapsed_ms: u128,
}

impl CheckOutcome {
    /// One status line, suitable for the CLI table and the test log.
    pub fn render(&self) -> String {
        format!(
            "check {:02} {:<22} {} ({:>7} ms) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed_ms,
            self.details
        )
    }
}

/// The six reference configurations: n ∈ {0, 1, 2} × α ∈ {3/2, 5/2}.
fn six_configs() -> Vec<SystemConfig> {
    let mut v = Vec::with_capacity(6);
    for upsilon in [1u32, 2] {
        for n in 0..3usize {
            v.push(SystemConfig::new(n, upsilon, SupportMode::HalfLine));
        }
    }
    v
}

fn cfg_tag(cfg: &SystemConfig) -> String {
    format!("n={} a={}", cfg.n(), cfg.alpha())
}

/// Adaptive integration that accepts the best estimate when the panel
/// budget saturates short of the requested tolerance (the estimate's error
/// bound is still orders below the check tolerances where this is used).
fn integrate_lenient<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, String> {
    match integrate(f, a, b, tol) {
        Ok(q) => Ok(q.value),
        Err(QuadratureError::NonConvergence { estimate, .. }) => Ok(estimate),
        Err(e) => Err(e.to_string()),
    }
}

/// R2 low-discrepancy sequence (plastic-constant additive recurrence) over
/// a rectangle; fully deterministic.
fn quasi_random_points(
    count: usize,
    x_lo: f64,
    x_hi: f64,
    k_lo: f64,
    k_hi: f64,
) -> Vec<(f64, f64)> {
    const PLASTIC: f64 = 1.324_717_957_244_746;
    let a1 = 1.0 / PLASTIC;
    let a2 = 1.0 / (PLASTIC * PLASTIC);
    (1..=count)
        .map(|i| {
            let u = (0.5 + a1 * i as f64).fract();
            let v = (0.5 + a2 * i as f64).fract();
            (x_lo + u * (x_hi - x_lo), k_lo + v * (k_hi - k_lo))
        })
        .collect()
}

/// Exact full-line k-integral of W(x, ·)² through the Plancherel identity
/// on the defining transform (support-truncated to |y| ≤ x on the half
/// line): ∫ W(x,k)² dk = (2/π) ∫₀ˣ φ(x+y)² φ(x−y)² dy.
fn squared_marginal_identity(cfg: &SystemConfig, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let f = |y: f64| {
        let a = eigenstate(cfg, x + y);
        let b = eigenstate(cfg, x - y);
        (a * a) * (b * b)
    };
    (2.0 / std::f64::consts::PI) * clenshaw_curtis(&f, 0.0, x, 96)
}

fn finish(
    id: usize,
    name: &'static str,
    started: Instant,
    body: Result<(bool, String), String>,
) -> CheckOutcome {
    let (passed, details) = match body {
        Ok(pair) => pair,
        Err(e) => (false, format!("runner error: {e}")),
    };
    CheckOutcome {
        id,
        name,
        passed,
        details,
        elapsed_ms: started.elapsed().as_millis(),
    }
}

// ---------------------------------------------------------------------------
// 1. Normalization
// ---------------------------------------------------------------------------

/// ∫∫ W dx dk = 1 within 1e−6 (adaptive, clean-core + exact-tail split) and
/// within 1e−4 (201×201 Riemann sum on x ∈ [0.03, 7] × k ∈ [−12, 12]) for
/// all six configurations, in at most 60 s total.
pub fn check_normalization() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let mut worst_adaptive = 0.0f64;
        let mut worst_riemann = 0.0f64;
        let mut failures = String::new();
        for cfg in six_configs() {
            let core_inner = |x: f64| -> f64 {
                if x <= 0.0 {
                    return 0.0;
                }
                2.0 * clenshaw_curtis(
                    &|k: f64| wigner_closed(&cfg, x, k).expect("clean-region W"),
                    0.0,
                    6.0,
                    256,
                )
            };
            let core = integrate_lenient(&core_inner, 0.0, 14.0, 5e-8)?;
            let tail_inner = |x: f64| -> f64 {
                if x <= 0.0 {
                    return 0.0;
                }
                let phi = eigenstate(&cfg, x);
                let partial =
                    wigner_partial_marginal(&cfg, x, 6.0, 1e-10).expect("partial marginal");
                phi * phi - partial
            };
            let tail = integrate_lenient(&tail_inner, 0.0, 14.0, 1e-8)?;
            let adaptive_dev = (core + tail - 1.0).abs();
            worst_adaptive = worst_adaptive.max(adaptive_dev);
            if adaptive_dev > 1e-6 {
                let _ = write!(
                    failures,
                    " [{} adaptive {:.3e}]",
                    cfg_tag(&cfg),
                    adaptive_dev
                );
            }

            let grid =
                PhaseGrid::new(0.03, 7.0, 201, -12.0, 12.0, 201).map_err(|e| e.to_string())?;
            let field =
                ScalarField::build_parallel(grid, FieldLabel::W, |x, k| wigner_closed(&cfg, x, k))
                    .map_err(|e| e.to_string())?;
            let riemann_dev = (field.riemann_sum() - 1.0).abs();
            worst_riemann = worst_riemann.max(riemann_dev);
            if riemann_dev > 1e-4 {
                let _ = write!(failures, " [{} riemann {:.3e}]", cfg_tag(&cfg), riemann_dev);
            }
        }
        let in_budget = t.elapsed().as_secs_f64() <= 60.0;
        let passed = failures.is_empty() && in_budget;
        let mut details = format!(
            "worst adaptive dev {worst_adaptive:.3e} (tol 1e-6), worst riemann dev {worst_riemann:.3e} (tol 1e-4)"
        );
        if !failures.is_empty() {
            let _ = write!(details, "; failures:{failures}");
        }
        if !in_budget {
            let _ = write!(details, "; exceeded 60 s budget");
        }
        Ok((passed, details))
    })();
    finish(1, "normalization", t, body)
}

// ---------------------------------------------------------------------------
// 2. Purity of pure states
// ---------------------------------------------------------------------------

/// 2π ∫∫ W² dx dk = 1 within 1e−6 for the six configurations, with the
/// |k| > 6 remainder supplied by the Plancherel identity minus a
/// quadrature-route core (the closed form stays on its validated band).
pub fn check_purity() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let mut worst = 0.0f64;
        let mut failures = String::new();
        for cfg in six_configs() {
            let core_inner = |x: f64| -> f64 {
                if x <= 0.0 {
                    return 0.0;
                }
                2.0 * clenshaw_curtis(
                    &|k: f64| wigner_closed(&cfg, x, k).expect("clean-region W").powi(2),
                    0.0,
                    6.0,
                    256,
                )
            };
            let core = integrate_lenient(&core_inner, 0.0, 14.0, 5e-8)?;
            let tail_inner = |x: f64| -> f64 {
                if x <= 0.0 {
                    return 0.0;
                }
                let quad_core = 2.0
                    * clenshaw_curtis(
                        &|k: f64| {
                            let w = wigner_quadrature(&cfg, x, k).expect("quadrature W");
                            w * w
                        },
                        0.0,
                        6.0,
                        64,
                    );
                squared_marginal_identity(&cfg, x) - quad_core
            };
            let tail = clenshaw_curtis(&tail_inner, 0.0, 10.0, 48);
            let total = 2.0 * std::f64::consts::PI * (core + tail);
            let dev = (total - 1.0).abs();
            worst = worst.max(dev);
            if dev > 1e-6 {
                let _ = write!(failures, " [{} dev {:.3e}]", cfg_tag(&cfg), dev);
            }
        }
        let passed = failures.is_empty();
        let mut details = format!("worst |2pi∬W² − 1| = {worst:.3e} (tol 1e-6)");
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(2, "purity", t, body)
}

// ---------------------------------------------------------------------------
// 3. Marginal
// ---------------------------------------------------------------------------

/// ∫ W dk = |φ|² at 25 x-points within 1e−6 for the six configurations.
/// The k-integral is the clean-core closed form plus the exact remainder
/// |φ|² − (y-representation partial marginal at K = 6).
pub fn check_marginal() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let mut worst = 0.0f64;
        let mut failures = String::new();
        for cfg in six_configs() {
            for i in 0..25usize {
                let x = 0.25 + (6.0 - 0.25) * i as f64 / 24.0;
                let core = 2.0
                    * clenshaw_curtis(
                        &|k: f64| wigner_closed(&cfg, x, k).expect("clean-region W"),
                        0.0,
                        6.0,
                        256,
                    );
                let phi = eigenstate(&cfg, x);
                let partial =
                    wigner_partial_marginal(&cfg, x, 6.0, 1e-10).map_err(|e| e.to_string())?;
                let marginal = core + (phi * phi - partial);
                let dev = (marginal - phi * phi).abs();
                worst = worst.max(dev);
                if dev > 1e-6 {
                    let _ = write!(failures, " [{} x={x:.3} dev {dev:.3e}]", cfg_tag(&cfg));
                }
            }
        }
        let passed = failures.is_empty();
        let mut details = format!("worst |∫W dk − |φ|²| = {worst:.3e} over 150 points (tol 1e-6)");
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(3, "marginal", t, body)
}

// ---------------------------------------------------------------------------
// 4. Oracle equivalence
// ---------------------------------------------------------------------------

/// Closed-form vs quadrature for W and Y at 200 quasi-random points per
/// configuration on x ∈ (0.1, 5], k ∈ [−5, 5]; maximum absolute deviation
/// ≤ 1e−8.
///
/// Measured reality: Y and five of the six configurations meet the bound
/// with orders of margin, but the hardest closed form (n = 2, α = 5/2,
/// truncation order 7) carries up to ~1.7e−8 of error-function cancellation
/// noise in the far corner x < 0.25, |k| > 4.5 (the quadrature route is
/// self-consistent to 1e−18 there, isolating the noise to the closed form).
/// Reported red with the worst point.
pub fn check_oracle_equivalence() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let points = quasi_random_points(200, 0.1, 5.0, -5.0, 5.0);
        let mut worst_w = 0.0f64;
        let mut worst_y = 0.0f64;
        let mut failures = String::new();
        for cfg in six_configs() {
            for &(x, k) in &points {
                let wc = wigner_closed(&cfg, x, k).map_err(|e| e.to_string())?;
                let wq = wigner_quadrature(&cfg, x, k).map_err(|e| e.to_string())?;
                let dw = (wc - wq).abs();
                worst_w = worst_w.max(dw);
                if dw > 1e-8 {
                    let _ = write!(failures, " [{} W ({x:.3},{k:.3}) {dw:.2e}]", cfg_tag(&cfg));
                }
                let yc = y_kernel_closed(&cfg, x, k).map_err(|e| e.to_string())?;
                let yq = y_kernel_quadrature(&cfg, x, k).map_err(|e| e.to_string())?;
                let dy = (yc - yq).abs();
                worst_y = worst_y.max(dy);
                if dy > 1e-8 {
                    let _ = write!(failures, " [{} Y ({x:.3},{k:.3}) {dy:.2e}]", cfg_tag(&cfg));
                }
            }
        }
        let passed = failures.is_empty();
        let mut details = format!(
            "200 pts/config: worst |ΔW| = {worst_w:.3e}, worst |ΔY| = {worst_y:.3e} (tol 1e-8)"
        );
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(4, "oracle-equivalence", t, body)
}

// ---------------------------------------------------------------------------
// 5. Eigen-energy
// ---------------------------------------------------------------------------

/// The finite-difference Hamiltonian residual confirms ε_n = 2n + 1 with
/// residual ≤ 1e−5 at stencil spacing h = 1e−3.
pub fn check_eigen_energy() -> CheckOutcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = String::new();
    for cfg in six_configs() {
        let r = energy_residual(&cfg, 1e-3);
        worst = worst.max(r);
        if r > 1e-5 {
            let _ = write!(failures, " [{} residual {r:.3e}]", cfg_tag(&cfg));
        }
    }
    let passed = failures.is_empty();
    let mut details = format!("worst residual {worst:.3e} at h = 1e-3 (tol 1e-5)");
    if !passed {
        let _ = write!(details, "; failures:{failures}");
    }
    finish(5, "eigen-energy", t, Ok((passed, details)))
}

// ---------------------------------------------------------------------------
// 6. Stationarity
// ---------------------------------------------------------------------------

/// The continuity-equation residual is pure O(h²) discretization error for
/// stationary states: its max-norm must shrink by 4 ± 20% when halving the
/// grid spacing.
pub fn check_stationarity() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let mut failures = String::new();
        let mut ratios = String::new();
        for cfg in six_configs() {
            let coarse = PhaseGrid::new(0.8, 3.2, 31, -1.2, 1.2, 31).map_err(|e| e.to_string())?;
            let fine = PhaseGrid::new(0.8, 3.2, 61, -1.2, 1.2, 61).map_err(|e| e.to_string())?;
            let rc = divergence_residual(&cfg, coarse).map_err(|e| e.to_string())?;
            let rf = divergence_residual(&cfg, fine).map_err(|e| e.to_string())?;
            let ratio = rc.max_abs() / rf.max_abs();
            let _ = write!(ratios, " {ratio:.3}");
            if !(3.2..=4.8).contains(&ratio) {
                let _ = write!(failures, " [{} ratio {ratio:.3}]", cfg_tag(&cfg));
            }
        }
        let passed = failures.is_empty();
        let mut details =
            format!("residual max-norm ratios on halving:{ratios} (window [3.2, 4.8])");
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(6, "stationarity", t, body)
}

// ---------------------------------------------------------------------------
// 7. Classical limit
// ---------------------------------------------------------------------------

/// At α = 1/2 the quantum correction vanishes identically: ΔJ_k is machine
/// zero pointwise and all three flux rates are 0 within 1e−12 at
/// ε ∈ {0.5, 1, 2, 4}.
pub fn check_classical_limit() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let mut failures = String::new();
        let mut worst_rate = 0.0f64;
        for n in 0..3usize {
            let cfg = SystemConfig::new(n, 0, SupportMode::HalfLine);
            for &(x, k) in &quasi_random_points(25, 0.2, 5.0, -5.0, 5.0) {
                let d = delta_current_k(&cfg, x, k).map_err(|e| e.to_string())?;
                if d != 0.0 {
                    let _ = write!(failures, " [n={n} ΔJk({x:.3},{k:.3}) = {d:.3e}]");
                }
            }
            for eps in [0.5f64, 1.0, 2.0, 4.0] {
                let report = flux_report_at(&cfg, eps, 0.4, 1024).map_err(|e| e.to_string())?;
                for kind in [RateKind::Probability, RateKind::Entropy, RateKind::Purity] {
                    let r = report.rate(kind).abs();
                    worst_rate = worst_rate.max(r);
                    if r > 1e-12 {
                        let _ = write!(failures, " [n={n} eps={eps} {kind:?} rate {r:.3e}]");
                    }
                }
            }
        }
        let passed = failures.is_empty();
        let mut details = format!(
            "ΔJk machine zero at 75 points; worst |rate| = {worst_rate:.3e} over 36 rates (tol 1e-12)"
        );
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(7, "classical-limit", t, body)
}

// ---------------------------------------------------------------------------
// 8. Quantized zero nodes
// ---------------------------------------------------------------------------

fn rate_at(cfg: &SystemConfig, eps: f64, samples: usize) -> Result<FluxReport, String> {
    flux_report_at(cfg, eps, 0.0, samples).map_err(|e| e.to_string())
}

/// For each configuration and each rate, locate the sign change nearest
/// ε_n = 2n + 1; require |ε* − (2n+1)| ≤ 0.2 for all three rates and
/// pairwise agreement of the three crossings within 0.1, in under 3 min per
/// configuration.
///
/// Measured reality (see the crate tests for the pinned table): the entropy
/// crossing sits within the window for every configuration and the
/// probability crossing for four of six, but the purity crossing is
/// 0.30–0.46 below ε_n and the entropy–purity gap is 0.12–0.33, so this
/// check fails on every configuration and is reported red with the measured
/// crossings.
pub fn check_zero_nodes(quick: bool) -> CheckOutcome {
    let t = Instant::now();
    let samples = if quick { 768 } else { 2048 };
    let scan_points = if quick { 14 } else { 26 };
    let body = (|| -> Result<(bool, String), String> {
        let mut failures = String::new();
        let mut summary = String::new();
        for cfg in six_configs() {
            let t_cfg = Instant::now();
            let eps_n = cfg.epsilon_n();
            let lo = eps_n - 0.75;
            let hi = eps_n + 0.5;
            // Coarse scan to bracket the sign change of each rate nearest ε_n.
            let mut scans = Vec::with_capacity(scan_points);
            for i in 0..scan_points {
                let eps = lo + (hi - lo) * i as f64 / (scan_points - 1) as f64;
                scans.push((eps, rate_at(&cfg, eps, samples)?));
            }
            let mut crossings = [f64::NAN; 3];
            let kinds = [RateKind::Probability, RateKind::Entropy, RateKind::Purity];
            for (slot, &kind) in kinds.iter().enumerate() {
                let mut best: Option<(f64, f64)> = None;
                for pair in scans.windows(2) {
                    let (e0, r0) = (&pair[0].0, pair[0].1.rate(kind));
                    let (e1, r1) = (&pair[1].0, pair[1].1.rate(kind));
                    if r0.signum() != r1.signum() {
                        let mid = 0.5 * (e0 + e1);
                        if best.is_none_or(|(m, _)| (mid - eps_n).abs() < (m - eps_n).abs()) {
                            best = Some((mid, *e0));
                        }
                    }
                }
                match best {
                    Some((_, bracket_lo)) => {
                        let step = (hi - lo) / (scan_points - 1) as f64;
                        crossings[slot] = find_flux_zero(
                            &cfg,
                            kind,
                            (bracket_lo, bracket_lo + step),
                            0.0,
                            samples,
                        )
                        .map_err(|e| e.to_string())?;
                    }
                    None => {
                        let _ = write!(
                            failures,
                            " [{} {kind:?}: no sign change in [{lo:.2}, {hi:.2}]]",
                            cfg_tag(&cfg)
                        );
                    }
                }
            }
            let _ = write!(
                summary,
                " [{}: σ* {:.4} S* {:.4} P* {:.4}]",
                cfg_tag(&cfg),
                crossings[0],
                crossings[1],
                crossings[2]
            );
            for (slot, &kind) in kinds.iter().enumerate() {
                let c = crossings[slot];
                if c.is_finite() && (c - eps_n).abs() > 0.2 {
                    let _ = write!(
                        failures,
                        " [{} {kind:?} crossing {c:.4} is {:.3} from {eps_n}]",
                        cfg_tag(&cfg),
                        (c - eps_n).abs()
                    );
                }
            }
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let gap = (crossings[i] - crossings[j]).abs();
                    if gap.is_finite() && gap > 0.1 {
                        let _ = write!(
                            failures,
                            " [{} {:?}/{:?} gap {gap:.3}]",
                            cfg_tag(&cfg),
                            kinds[i],
                            kinds[j]
                        );
                    }
                }
            }
            let cfg_secs = t_cfg.elapsed().as_secs_f64();
            if cfg_secs > 180.0 {
                let _ = write!(failures, " [{} took {cfg_secs:.0} s]", cfg_tag(&cfg));
            }
        }
        let passed = failures.is_empty();
        let mut details = format!("crossings:{summary}");
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(8, "zero-nodes", t, body)
}

// ---------------------------------------------------------------------------
// 9. α-suppression
// ---------------------------------------------------------------------------

/// max |rate| over ε ∈ [0.25, 6] must be strictly smaller at α = 5/2 than
/// at α = 3/2 for each n and each rate.
///
/// Measured reality: holds for 17 of the 18 comparisons; the (n = 2,
/// purity) pair violates it by ~4% and is reported red.
pub fn check_alpha_suppression(quick: bool) -> CheckOutcome {
    let t = Instant::now();
    let samples = if quick { 768 } else { 2048 };
    let steps = if quick { 47 } else { 116 };
    let body = (|| -> Result<(bool, String), String> {
        let kinds = [RateKind::Probability, RateKind::Entropy, RateKind::Purity];
        // max |rate| per (n, upsilon, kind).
        let mut maxima = [[[0.0f64; 3]; 2]; 3];
        for (ui, upsilon) in [1u32, 2].into_iter().enumerate() {
            for n in 0..3usize {
                let cfg = SystemConfig::new(n, upsilon, SupportMode::HalfLine);
                for i in 0..steps {
                    let eps = 0.25 + (6.0 - 0.25) * i as f64 / (steps - 1) as f64;
                    let report = rate_at(&cfg, eps, samples)?;
                    for (slot, &kind) in kinds.iter().enumerate() {
                        maxima[n][ui][slot] = maxima[n][ui][slot].max(report.rate(kind).abs());
                    }
                }
            }
        }
        let mut failures = String::new();
        let mut summary = String::new();
        for n in 0..3usize {
            for (slot, &kind) in kinds.iter().enumerate() {
                let wide = maxima[n][0][slot];
                let narrow = maxima[n][1][slot];
                let _ = write!(summary, " [n={n} {kind:?}: {wide:.4e} vs {narrow:.4e}]");
                if narrow >= wide {
                    let _ = write!(
                        failures,
                        " [n={n} {kind:?}: a=5/2 max {narrow:.4e} >= a=3/2 max {wide:.4e}]"
                    );
                }
            }
        }
        let passed = failures.is_empty();
        let mut details = format!("max|rate| (a=3/2 vs a=5/2):{summary}");
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(9, "alpha-suppression", t, body)
}

// ---------------------------------------------------------------------------
// 10. Winding bookkeeping
// ---------------------------------------------------------------------------

/// Every stagnation point must report winding ∈ {−1, 0, +1}, and the
/// winding sum over the points enclosed by the ε = 2n + 1 energy contour is
/// required to be 0 for n ∈ {0, 1, 2} at α = 3/2.
///
/// Measured reality: the domain constraint holds, but the enclosed sums are
/// −1, −2, −1 (stable from 161² to 321² scans and under window extension to
/// the wall): the central clockwise vortex and same-sense mirror vortex
/// pairs (the current maps (J_x, J_k) → (−J_x, J_k) under k → −k, which
/// preserves rotation sense) leave a clockwise excess. Reported red with
/// the measured sums.
pub fn check_winding_bookkeeping() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let mut failures = String::new();
        let mut summary = String::new();
        for n in 0..3usize {
            let cfg = SystemConfig::new(n, 1, SupportMode::HalfLine);
            let grid = PhaseGrid::new(0.05, 5.5, 161, -4.5, 4.5, 161).map_err(|e| e.to_string())?;
            let inventory = find_stagnation_points(&cfg, grid).map_err(|e| e.to_string())?;
            for p in &inventory.points {
                if !(-1..=1).contains(&p.winding) {
                    let _ = write!(
                        failures,
                        " [n={n} point ({:.3},{:.3}) winding {}]",
                        p.x, p.k, p.winding
                    );
                }
            }
            let eps_n = cfg.epsilon_n();
            let enclosed: Vec<_> = inventory
                .points
                .iter()
                .filter(|p| {
                    hamiltonian(cfg.alpha(), p.x, p.k)
                        .map(|h| h < eps_n)
                        .unwrap_or(false)
                })
                .collect();
            let wsum: i32 = enclosed.iter().map(|p| p.winding).sum();
            let _ = write!(
                summary,
                " [n={n}: {} points, {} enclosed, winding sum {wsum}]",
                inventory.points.len(),
                enclosed.len()
            );
            if wsum != 0 {
                let _ = write!(failures, " [n={n} enclosed winding sum {wsum} != 0]");
            }
        }
        let passed = failures.is_empty();
        let mut details = format!("a=3/2 inventories:{summary}");
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(10, "winding-bookkeeping", t, body)
}

// ---------------------------------------------------------------------------
// 11. Trajectory exactness
// ---------------------------------------------------------------------------

/// Energy conservation ≤ 1e−12 along 4096 orbit samples and rate
/// invariance under the orbit phase ϑ ≤ 1e−10, for all six configurations
/// at ε ∈ {2n+1, 1.7}; rate stability ≤ 1e−9 under refinement 2048 → 4096
/// at the canonical orbits ε = 2n+1.
///
/// The refinement bound is a property of the canonical orbits: at generic
/// off-node energies the orbit crosses zero curves of W, where the ln|W|
/// entropy weight has integrable logarithmic spikes and any fixed-order
/// quadrature converges slowly (measured: ~1e−4 refinement shifts at
/// ε = 1.7, n = 2 for the entropy rate only; σ and purity stay ≲ 1e−12).
pub fn check_trajectory_exactness() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let mut failures = String::new();
        let mut worst_energy = 0.0f64;
        let mut worst_theta = 0.0f64;
        let mut worst_refine = 0.0f64;
        let kinds = [RateKind::Probability, RateKind::Entropy, RateKind::Purity];
        for cfg in six_configs() {
            for eps in [cfg.epsilon_n(), 1.7] {
                let traj = trajectory(cfg.alpha(), eps, 0.7, 4096).map_err(|e| e.to_string())?;
                let mut dev = 0.0f64;
                for s in &traj.samples {
                    let h = hamiltonian(cfg.alpha(), s.x, s.k).map_err(|e| e.to_string())?;
                    dev = dev.max((h - eps).abs());
                }
                worst_energy = worst_energy.max(dev);
                if dev > 1e-12 {
                    let _ = write!(
                        failures,
                        " [{} eps={eps} energy dev {dev:.3e}]",
                        cfg_tag(&cfg)
                    );
                }

                let base = flux_report_at(&cfg, eps, 0.7, 4096).map_err(|e| e.to_string())?;
                let other = flux_report_at(&cfg, eps, -1.3, 4096).map_err(|e| e.to_string())?;
                for &kind in &kinds {
                    let dtheta = (base.rate(kind) - other.rate(kind)).abs();
                    worst_theta = worst_theta.max(dtheta);
                    if dtheta > 1e-10 {
                        let _ = write!(
                            failures,
                            " [{} eps={eps} {kind:?} theta dev {dtheta:.3e}]",
                            cfg_tag(&cfg)
                        );
                    }
                }
            }

            let eps = cfg.epsilon_n();
            let base = flux_report_at(&cfg, eps, 0.7, 4096).map_err(|e| e.to_string())?;
            let halved = flux_report_at(&cfg, eps, 0.7, 2048).map_err(|e| e.to_string())?;
            for &kind in &kinds {
                let drefine = (base.rate(kind) - halved.rate(kind)).abs();
                worst_refine = worst_refine.max(drefine);
                if drefine > 1e-9 {
                    let _ = write!(
                        failures,
                        " [{} eps={eps} {kind:?} refinement dev {drefine:.3e}]",
                        cfg_tag(&cfg)
                    );
                }
            }
        }
        let passed = failures.is_empty();
        let mut details = format!(
            "worst energy dev {worst_energy:.3e} (tol 1e-12), worst ϑ dev {worst_theta:.3e} (tol 1e-10), worst refinement dev {worst_refine:.3e} (tol 1e-9)"
        );
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(11, "trajectory-exactness", t, body)
}

// ---------------------------------------------------------------------------
// 12. Bounce-mode consistency
// ---------------------------------------------------------------------------

/// The bounce-mode Wigner function agrees with the half-line one within
/// 1e−6 for x ≥ 3 and is exactly even in x, for all six configurations.
///
/// Measured reality: the deviation is the suppressed error-function factor
/// and decays like e^{−2x²} (2.8e−6 at x = 3.0 down to 7e−9 at x = 3.5 for
/// n = 2), so the two n = 2 configurations exceed the bound on the narrow
/// edge strip x ∈ [3, ≈3.25] and this check is reported red with the edge
/// values; n ∈ {0, 1} meet the bound everywhere.
pub fn check_bounce_consistency() -> CheckOutcome {
    let t = Instant::now();
    let body = (|| -> Result<(bool, String), String> {
        let xs_far = [3.0, 3.3, 3.8, 4.5, 5.2, 6.0];
        let ks = [0.0, 0.6, -1.4, 2.5, -4.0, 6.0];
        let xs_even = [0.4, 1.1, 2.6, 3.7];
        let mut worst = 0.0f64;
        let mut failures = String::new();
        for cfg in six_configs() {
            let bounce = SystemConfig::new(cfg.n(), cfg.upsilon(), SupportMode::Bounce);
            for &x in &xs_far {
                for &k in &ks {
                    let wh = wigner_closed(&cfg, x, k).map_err(|e| e.to_string())?;
                    let wb = wigner_closed(&bounce, x, k).map_err(|e| e.to_string())?;
                    let dev = (wh - wb).abs();
                    worst = worst.max(dev);
                    if dev > 1e-6 {
                        let _ = write!(
                            failures,
                            " [{} ({x:.2},{k:.2}) half/bounce dev {dev:.3e}]",
                            cfg_tag(&cfg)
                        );
                    }
                }
            }
            for &x in &xs_even {
                for &k in &ks {
                    let plus = wigner_closed(&bounce, x, k).map_err(|e| e.to_string())?;
                    let minus = wigner_closed(&bounce, -x, k).map_err(|e| e.to_string())?;
                    if plus != minus {
                        let _ = write!(
                            failures,
                            " [{} ({x:.2},{k:.2}) evenness broken: {plus:.6e} vs {minus:.6e}]",
                            cfg_tag(&cfg)
                        );
                    }
                }
            }
        }
        let passed = failures.is_empty();
        let mut details =
            format!("worst half/bounce dev {worst:.3e} for x ≥ 3 (tol 1e-6); evenness exact");
        if !passed {
            let _ = write!(details, "; failures:{failures}");
        }
        Ok((passed, details))
    })();
    finish(12, "bounce-consistency", t, body)
}

/// Run the full validation suite in canonical order.
///
/// `quick` reduces the sweep densities of the two ε-sweep checks (zero
/// nodes, α-suppression) without touching any tolerance; every other check
/// runs identically in both modes.
pub fn run_all(quick: bool) -> Vec<CheckOutcome> {
    vec![
        check_normalization(),
        check_purity(),
        check_marginal(),
        check_oracle_equivalence(),
        check_eigen_energy(),
        check_stationarity(),
        check_classical_limit(),
        check_zero_nodes(quick),
        check_alpha_suppression(quick),
        check_winding_bookkeeping(),
        check_trajectory_exactness(),
        check_bounce_consistency(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_random_points_are_deterministic_and_in_bounds() {
        let a = quasi_random_points(200, 0.3, 5.5, -6.0, 6.0);
        let b = quasi_random_points(200, 0.3, 5.5, -6.0, 6.0);
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|&(x, k)| (0.3..=5.5).contains(&x) && (-6.0..=6.0).contains(&k)));
        // Low-discrepancy: all points distinct.
        for (i, p) in a.iter().enumerate() {
            for q in &a[i + 1..] {
                assert!((p.0 - q.0).abs() > 1e-9 || (p.1 - q.1).abs() > 1e-9);
            }
        }
    }

    #[test]
    fn squared_marginal_identity_matches_quadrature_route() {
        // Plancherel identity vs direct k-integration of the quadrature W².
        let cfg = SystemConfig::new(1, 1, SupportMode::HalfLine);
        for x in [0.6, 1.4, 2.5] {
            let idy = squared_marginal_identity(&cfg, x);
            let brute = 2.0
                * clenshaw_curtis(
                    &|k: f64| {
                        let w = wigner_quadrature(&cfg, x, k).unwrap();
                        w * w
                    },
                    0.0,
                    20.0,
                    512,
                );
            assert!(
                (idy - brute).abs() < 1e-7,
                "x = {x}: identity {idy:.9e} vs quadrature {brute:.9e}"
            );
        }
    }

    #[test]
    fn outcome_render_is_one_line() {
        let o = CheckOutcome {
            id: 3,
            name: "marginal",
            passed: true,
            details: "worst 1e-9".into(),
            elapsed_ms: 12,
        };
        let line = o.render();
        assert!(line.contains("check 03"));
        assert!(line.contains("PASS"));
        assert!(!line.contains('\n'));
    }
}
