//! Local maximal operators: the time-supremum operators
//! sup_{0<t<a} |u(t,x)| for the heat and Poisson semigroups, a local
//! Hardy–Littlewood maximal average truncated to |y| < R(x∨1), and
//! desk-scale L^p(v) → L^p(u) boundedness probes (operator-norm lower
//! bounds only — no numerical upper bound is claimed).

use crate::data::DataFunction;
use crate::error::{Error, Result};
use crate::factors::phi_heat;
use crate::quad::{integrate, integrate_power_head, integrate_to_infinity, QuadOpts, TailPolicy};
use crate::report::{CheckResult, Report};
use crate::semigroup::{apply_with_tol, Problem};
use crate::kernels::LambdaParam;
use crate::weights::{
    dp_heat_norm, Atom, LebesgueExponent, Piece, WeightSpec,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Discretization of the supremum over 0 < t < a.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalConfig {
    /// Time horizon a > 0 (the supremum runs over the open interval).
    pub a: f64,
    /// Log-spaced supremum nodes spanning [a·1e-6, a); at least 16.
    pub t_nodes: usize,
    /// Golden-section refinement passes around the arg-max node.
    pub refine_levels: usize,
}

impl MaximalConfig {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::domain(format!("horizon must be positive, got {a}")));
        }
        Ok(MaximalConfig { a, t_nodes: 48, refine_levels: 1 })
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_nodes < 16 {
            return Err(Error::input(format!(
                "maximal supremum needs >= 16 t-nodes, got {}",
                self.t_nodes
            )));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::domain("horizon must be positive"));
        }
        Ok(())
    }

    /// Nodes approach a from below; the supremum is over an open interval,
    /// so a itself is excluded.
    fn nodes(&self) -> Vec<f64> {
        let lo = self.a * 1e-6;
        let hi = self.a * (1.0 - 1e-12);
        (0..self.t_nodes)
            .map(|i| lo * (hi / lo).powf(i as f64 / (self.t_nodes - 1) as f64))
            .collect()
    }
}

fn semigroup_maximal(
    problem: Problem,
    lp: LambdaParam,
    f: &DataFunction,
    cfg: &MaximalConfig,
    x: f64,
) -> Result<f64> {
    cfg.validate()?;
    let nodes = cfg.nodes();
    let abs_u = |t: f64| -> Result<f64> {
        Ok(apply_with_tol(problem, lp, t, x, f, 1e-9)?.abs())
    };
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&t| abs_u(t))
        .collect::<Result<_>>()?;
    let (mut best_i, mut best) = (0usize, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // the map t ↦ u(t,x) is smooth, so golden-section refinement around
    // the arg-max bracket converges quickly
    let mut lo = nodes[best_i.saturating_sub(1)];
    let mut hi = nodes[(best_i + 1).min(nodes.len() - 1)];
    for _ in 0..cfg.refine_levels {
        let (m, v) = golden_max(&mut |t| abs_u(t), lo, hi, 30)?;
        if v > best {
            best = v;
        }
        let spread = (hi - lo) * 0.2;
        lo = (m - spread).max(nodes[0]);
        hi = (m + spread).min(nodes[nodes.len() - 1]);
    }
    Ok(best)
}

/// Golden-section maximization of a smooth function on [lo, hi].
fn golden_max(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..iters {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d)?;
        }
    }
    if fc > fd {
        Ok((c, fc))
    } else {
        Ok((d, fd))
    }
}

/// sup_{0<t<a} |∫ W_t^λ(x,y) f(y) dμ_λ(y)|.
pub fn heat_maximal(
    lp: LambdaParam,
    f: &DataFunction,
    cfg: &MaximalConfig,
    x: f64,
) -> Result<f64> {
    semigroup_maximal(Problem::Heat, lp, f, cfg, x)
}

/// sup_{0<t<a} |∫ P_t^λ(x,y) f(y) dμ_λ(y)|.
pub fn poisson_maximal(
    lp: LambdaParam,
    f: &DataFunction,
    cfg: &MaximalConfig,
    x: f64,
) -> Result<f64> {
    semigroup_maximal(Problem::Poisson, lp, f, cfg, x)
}

/// Radius search space of the local Hardy–Littlewood maximal average.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HlConfig {
    /// Smallest radius scanned.
    pub r_min: f64,
    /// Geometric radius steps per octave.
    pub steps_per_octave: usize,
    /// Golden refinement around the best radius.
    pub refine: bool,
}

impl Default for HlConfig {
    fn default() -> Self {
        HlConfig { r_min: 1e-3, steps_per_octave: 8, refine: true }
    }
}

/// Truncated averaged local maximal operator:
/// sup_r (2r)^{−1} ∫_{B_r(x)} f(y) χ_{(0, R(x∨1))}(y) dy over radii
/// r ∈ [r_min, 2R(x∨1)]. The operator AVERAGES (the |B_r|^{−1}
/// normalization of the underlying covering argument); balls are
/// intervals of the line, so |B_r| = 2r.
pub fn local_hl_maximal(f: &DataFunction, r: f64, x: f64, cfg: &HlConfig) -> Result<f64> {
    if r <= 1.0 {
        return Err(Error::domain(format!("truncation parameter R must exceed 1, got {r}")));
    }
    if x <= 0.0 {
        return Err(Error::domain(format!("x must be positive, got {x}")));
    }
    let cut = r * x.max(1.0);
    let splits = f.split_points();
    let avg = |rad: f64| -> f64 {
        let lo = (x - rad).max(0.0);
        let hi = (x + rad).min(cut);
        if hi <= lo {
            return 0.0;
        }
        let seg: Vec<f64> = splits.iter().copied().filter(|&s| s > lo && s < hi).collect();
        let out = integrate(|y| f.eval(y), lo, hi, &seg, &QuadOpts::with_rel_tol(1e-12));
        out.value / (2.0 * rad)
    };
    let r_max = 2.0 * cut;
    let mut best = f64::NEG_INFINITY;
    let mut best_r = cfg.r_min;
    let octaves = (r_max / cfg.r_min).log2();
    let n = ((octaves * cfg.steps_per_octave as f64).ceil() as usize).max(2);
    for i in 0..=n {
        let rad = cfg.r_min * (r_max / cfg.r_min).powf(i as f64 / n as f64);
        let v = avg(rad);
        if v > best {
            best = v;
            best_r = rad;
        }
    }
    if cfg.refine {
        let lo = best_r / 2f64.powf(1.0 / cfg.steps_per_octave as f64);
        let hi = (best_r * 2f64.powf(1.0 / cfg.steps_per_octave as f64)).min(r_max);
        let (_, v) = golden_max(&mut |rad| Ok(avg(rad)), lo, hi, 40)?;
        best = best.max(v);
    }
    Ok(best)
}

/// Which operator a boundedness probe exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximalOp {
    Heat,
    Poisson,
    HardyLittlewood,
}

/// Outcome for one probe sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleProbe {
    pub name: String,
    pub data_norm: f64,
    /// None when the operator application diverged (the necessity
    /// direction of the boundedness theorem made visible).
    pub image_norm: Option<f64>,
    pub ratio: Option<f64>,
    pub note: String,
}

/// Operator-norm lower bound over a sample family:
/// max over samples of ‖Tf‖_{L^p(u)} / ‖f‖_{L^p(v)}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundednessProbe {
    pub op: MaximalOp,
    pub p: f64,
    pub samples: Vec<SampleProbe>,
    pub max_ratio: Option<f64>,
    pub all_finite: bool,
}

/// L^p(w) norm of a data function by direct quadrature; errors if the
/// sample is not in the space.
fn data_norm(f: &DataFunction, w: &WeightSpec, p: f64) -> Result<f64> {
    let g = |y: f64| f.eval(y).abs().powf(p) * w.eval(y);
    let head_alpha = p * f.power_at_zero() + w.power_at_zero();
    let mut splits = f.split_points();
    splits.extend(w.split_points());
    splits.sort_by(f64::total_cmp);
    splits.dedup();
    let opts = QuadOpts::with_rel_tol(1e-10);
    let head = integrate_power_head(&g, 0.5, head_alpha, &splits, &opts)?;
    let finite_to = splits.last().copied().unwrap_or(1.0).max(8.0);
    let tail_splits: Vec<f64> = splits.into_iter().filter(|&s| s > 0.5).collect();
    let tail = integrate_to_infinity(&g, 0.5, finite_to, &tail_splits, &opts, &TailPolicy::default())?;
    Ok((head.value + tail.value).powf(1.0 / p))
}

/// Evaluation grid for image norms: a fixed log grid with trapezoid
/// weights (a lower-bound estimator by construction).
fn probe_x_grid() -> Vec<f64> {
    let (lo, hi, n) = (0.05f64, 20.0f64, 24usize);
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn boundedness_probe(
    op: MaximalOp,
    lp: LambdaParam,
    v: &WeightSpec,
    u: &WeightSpec,
    p: LebesgueExponent,
    samples: &[DataFunction],
    cfg: &MaximalConfig,
) -> Result<BoundednessProbe> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::input("probe needs at least one sample"));
    }
    let xs = probe_x_grid();
    let mut out = Vec::with_capacity(samples.len());
    let mut max_ratio: Option<f64> = None;
    let mut all_finite = true;
    for f in samples {
        let fnorm = data_norm(f, v, p.p()).map_err(|e| {
            Error::input(format!("sample '{}' is not in L^p(v): {e}", f.name()))
        })?;
        if !fnorm.is_finite() {
            return Err(Error::input(format!(
                "sample '{}' has non-finite L^p(v) norm",
                f.name()
            )));
        }
        let tf: Result<Vec<f64>> = xs
            .par_iter()
            .map(|&x| match op {
                MaximalOp::Heat => heat_maximal(lp, f, cfg, x),
                MaximalOp::Poisson => poisson_maximal(lp, f, cfg, x),
                MaximalOp::HardyLittlewood => {
                    local_hl_maximal(f, 2.0f64.max(1.0 + 1e-9), x, &HlConfig::default())
                }
            })
            .collect();
        match tf {
            Ok(tf_vals) => {
                // trapezoid in x of |Tf|^p u
                let mut acc = 0.0;
                for i in 1..xs.len() {
                    let dm = xs[i] - xs[i - 1];
                    let ga = tf_vals[i - 1].powf(p.p()) * u.eval(xs[i - 1]);
                    let gb = tf_vals[i].powf(p.p()) * u.eval(xs[i]);
                    acc += 0.5 * (ga + gb) * dm;
                }
                let image_norm = acc.powf(1.0 / p.p());
                let ratio = image_norm / fnorm;
                if max_ratio.map(|m| ratio > m).unwrap_or(true) {
                    max_ratio = Some(ratio);
                }
                out.push(SampleProbe {
                    name: f.name(),
                    data_norm: fnorm,
                    image_norm: Some(image_norm),
                    ratio: Some(ratio),
                    note: String::new(),
                });
            }
            Err(Error::Divergent(msg)) => {
                all_finite = false;
                out.push(SampleProbe {
                    name: f.name(),
                    data_norm: fnorm,
                    image_norm: None,
                    ratio: None,
                    note: format!("operator application diverges: {msg}"),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BoundednessProbe {
        op,
        p: p.p(),
        samples: out,
        max_ratio,
        all_finite,
    })
}

/// The constructive part of the target-weight assembly for the heat
/// maximal operator: the data transform weight
/// ṽ ≍ y^{−2λp} (y ≤ 1) / y^{−λp} (y > 1), the explicit tail weight
/// u₂ ≍ x^{λp} (x ≤ 1) / x^{−p} (x > 1), the proof-suggested
/// σ₀ = 1/M², and numeric finiteness checks of ‖u₂^{−σ/p} φ_t^λ‖_{p'}.
/// The shell-supported factorization weights are existence-only and are
/// flagged as not constructed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightScaffold {
    pub hypothesis_ok: bool,
    pub sigma0: f64,
    pub sigma: f64,
    pub sigma_within_guarantee: bool,
    pub v_transformed: Option<WeightSpec>,
    pub u2: Option<WeightSpec>,
    pub u1_constructed: bool,
    pub report: Report,
}

pub fn theorem_weight_scaffold(
    lp: LambdaParam,
    v: &WeightSpec,
    p: LebesgueExponent,
    a: f64,
    m: f64,
    sigma: f64,
) -> Result<WeightScaffold> {
    lp.require_nonnegative("theorem_weight_scaffold")?;
    if m <= 1.0 {
        return Err(Error::domain(format!("M must exceed 1, got {m}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("horizon must be positive, got {a}")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::domain(format!("sigma must lie in (0,1), got {sigma}")));
    }
    let lambda = lp.lambda();
    let sigma0 = 1.0 / (m * m);
    let mut report = Report::new(format!(
        "target-weight scaffold: lambda = {lambda}, p = {}, a = {a}, M = {m}, sigma = {sigma}",
        p.p()
    ));
    let sigma_within = sigma <= sigma0;
    if !sigma_within {
        report.note(format!(
            "sigma = {sigma} exceeds the guaranteed sigma0 = 1/M^2 = {sigma0}; checks still run"
        ));
    }

    // hypothesis: the dual norm must be finite at t0 = c_M·a, the dilated
    // horizon the tail estimate produces
    let c_small = (m / (m - 1.0)).powi(3);
    let t0 = c_small * a;
    let hyp = dp_heat_norm(v, lambda, p, t0)?;
    report.push(CheckResult::flag(
        format!("heat dual norm finite at dilated horizon t0 = {t0:.6}"),
        hyp.is_finite(),
        format!("norm = {:?}", hyp.value),
    ));
    if !hyp.is_finite() {
        return Ok(WeightScaffold {
            hypothesis_ok: false,
            sigma0,
            sigma,
            sigma_within_guarantee: sigma_within,
            v_transformed: None,
            u2: None,
            u1_constructed: false,
            report,
        });
    }

    // data-transform weight ṽ = (y^{2λ}/(y+1)^λ)^{−p} v, emitted through
    // the piecewise-power envelope of the transform factor
    let v_transformed = transform_weight(v, -2.0 * lambda * p.p(), -lambda * p.p())?;
    // the tail weight: u₂(x) = (x∧1)^{λp} (1+x)^{−p} up to constants
    let u2 = WeightSpec::new(vec![
        Piece { lo: 0.0, hi: 1.0, atom: Atom::power(1.0, lambda * p.p()) },
        Piece { lo: 1.0, hi: f64::INFINITY, atom: Atom::power(1.0, -p.p()) },
    ])?;

    // numeric content of the finiteness display for u₂^σ membership:
    // ‖x^{λ(2−σ)} χ_{x≤1}‖_{p'} and ‖(1+x)^σ x^λ e^{−x²/4t}‖_{p'}
    let pc = p.conjugate();
    let head_fn = |x: f64| x.powf(lambda * (2.0 - sigma) * pc);
    let head_alpha = lambda * (2.0 - sigma) * pc;
    let head = integrate_power_head(head_fn, 1.0, head_alpha, &[], &QuadOpts::with_rel_tol(1e-10))?;
    report.push(CheckResult::flag(
        "head norm ||x^{lambda(2-sigma)} chi_{x<=1}||_{p'} finite",
        head.value.is_finite(),
        format!("integral = {:.6e}", head.value),
    ));
    for &t in &[0.25 * a, a, t0] {
        let g = |x: f64| ((1.0 + x).powf(sigma) * x.powf(lambda) * (-x * x / (4.0 * t)).exp()).powf(pc);
        let out = integrate_to_infinity(
            &g,
            0.0,
            (1400.0 * t).sqrt(),
            &[1.0],
            &QuadOpts::with_rel_tol(1e-10),
            &TailPolicy::default(),
        )?;
        report.push(CheckResult::flag(
            format!("tail norm ||(1+x)^sigma x^lambda e^{{-x^2/4t}}||_{{p'}} finite at t = {t:.4}"),
            out.value.is_finite(),
            format!("integral = {:.6e}", out.value),
        ));
    }
    // and the assembled u₂ itself: ‖u₂^{−σ/p} φ_t^λ‖_{p'} < ∞ for t ≤ t0
    for &t in &[a, t0] {
        let scaled_u2 = u2.clone();
        let g = move |y: f64| (scaled_u2.eval(y).powf(-sigma / p.p()) * phi_heat(lambda, t, y)).powf(pc);
        let alpha = pc * (2.0 * lambda - sigma * lambda);
        let scan = crate::semigroup::truncation_scan(g, alpha, &[1.0], &crate::semigroup::default_radii())?;
        report.push(CheckResult::flag(
            format!("||u2^(-sigma/p) phi_t||_{{p'}} finite at t = {t:.4}"),
            scan.status == crate::semigroup::AdmissibilityStatus::Finite,
            format!("last partial = {:?}", scan.partials.last()),
        ));
    }
    report.note(
        "u1 (the shell-assembled factorization part) relies on existence-only weights \
         and is not constructed; the final weight is u = min(u1, u2)"
            .to_string(),
    );
    Ok(WeightScaffold {
        hypothesis_ok: true,
        sigma0,
        sigma,
        sigma_within_guarantee: sigma_within,
        v_transformed: Some(v_transformed),
        u2: Some(u2),
        u1_constructed: false,
        report,
    })
}

/// Multiply a weight by the piecewise-power envelope y^{a0} (y ≤ 1),
/// y^{a1} (y > 1).
fn transform_weight(v: &WeightSpec, a0: f64, a1: f64) -> Result<WeightSpec> {
    let mut pieces = Vec::new();
    for piece in v.pieces() {
        if piece.lo < 1.0 && piece.hi > 1.0 {
            pieces.push(Piece {
                lo: piece.lo,
                hi: 1.0,
                atom: Atom { pow: piece.atom.pow + a0, ..piece.atom },
            });
            pieces.push(Piece {
                lo: 1.0,
                hi: piece.hi,
                atom: Atom { pow: piece.atom.pow + a1, ..piece.atom },
            });
        } else {
            let shift = if piece.hi <= 1.0 { a0 } else { a1 };
            pieces.push(Piece {
                atom: Atom { pow: piece.atom.pow + shift, ..piece.atom },
                ..*piece
            });
        }
    }
    WeightSpec::new(pieces)
}

/// Brute-force radius scan with the same averaging definition; the
/// independent oracle for `local_hl_maximal`.
pub fn hl_brute_force(f: &DataFunction, r: f64, x: f64, cfg: &HlConfig, scans: usize) -> f64 {
    let cut = r * x.max(1.0);
    let splits = f.split_points();
    let r_max = 2.0 * cut;
    let mut best = 0.0f64;
    for i in 0..=scans {
        let rad = cfg.r_min + (r_max - cfg.r_min) * i as f64 / scans as f64;
        let lo = (x - rad).max(0.0);
        let hi = (x + rad).min(cut);
        if hi <= lo {
            continue;
        }
        let seg: Vec<f64> = splits.iter().copied().filter(|&s| s > lo && s < hi).collect();
        let out = integrate(|y| f.eval(y), lo, hi, &seg, &QuadOpts::with_rel_tol(1e-12));
        best = best.max(out.value / (2.0 * rad));
    }
    best
}
