//! Adaptive Gauss–Kronrod quadrature on finite intervals, with helpers for
//! the semi-infinite integrals and algebraic endpoint singularities that
//! the kernel integrals produce.
//!
//! The panel rule is the classical 21-point Kronrod extension of 10-point
//! Gauss (QUADPACK's QK21 nodes); panels are refined globally, worst
//! error first, until the summed error estimate meets the tolerance.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae for the 21-point rule on [-1, 1] (positive half).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Embedded 10-point Gauss weights (nodes are XGK[1], XGK[3], ...).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOpts {
    /// Stop when the error estimate is below `rel_tol · |value|` …
    pub rel_tol: f64,
    /// … or below this absolute floor, whichever is larger.
    pub abs_tol: f64,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_panels: 4_000,
        }
    }
}

impl QuadOpts {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadOpts {
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_err: f64,
    pub panels: usize,
    pub converged: bool,
}

/// One evaluated panel: QK21 value, error estimate and bookkeeping.
#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; sequence number breaks ties deterministically
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// QK21 on [a, b]: returns (kronrod value, error estimate).
fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut result_gauss = 0.0;
    let mut result_kronrod = f_center * WGK[10];
    let mut result_abs = result_kronrod.abs();
    let mut fv = [0.0f64; 21];
    fv[10] = f_center;

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[20 - j] = f2;
        let fsum = f1 + f2;
        result_kronrod += WGK[j] * fsum;
        result_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * fsum;
        }
    }

    let mean = 0.5 * result_kronrod;
    let mut result_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        result_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }

    let value = result_kronrod * half;
    let result_abs = result_abs * half.abs();
    let result_asc = result_asc * half.abs();

    // QUADPACK error rescaling
    let mut err = ((result_kronrod - result_gauss) * half).abs();
    if result_asc != 0.0 && err != 0.0 {
        err = result_asc * 1.0f64.min((200.0 * err / result_asc).powf(1.5));
    }
    let tiny_floor = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if result_abs > tiny_floor {
        err = err.max(50.0 * f64::EPSILON * result_abs);
    }
    (value, err)
}

/// Adaptive integral of `f` over [a, b]. `splits` are interior points the
/// caller knows to be kinks or peaks; they seed the initial panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, splits: &[f64], opts: &QuadOpts) -> QuadOutcome {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return QuadOutcome {
            value: 0.0,
            abs_err: 0.0,
            panels: 0,
            converged: a == b,
        };
    }

    let mut cuts: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|s| s.is_finite() && *s > a && *s < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut lo = a;
    for &cut in cuts.iter().chain(std::iter::once(&b)) {
        if cut - lo > 0.0 {
            let (value, err) = qk21(&f, lo, cut);
            heap.push(Panel { a: lo, b: cut, value, err, seq });
            seq += 1;
        }
        lo = cut;
    }

    loop {
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut finite = true;
        for p in heap.iter() {
            total += p.value;
            total_err += p.err;
            finite &= p.value.is_finite();
        }
        if !finite {
            return QuadOutcome {
                value: f64::NAN,
                abs_err: f64::INFINITY,
                panels: heap.len(),
                converged: false,
            };
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target || heap.len() >= opts.max_panels {
            // sum ordered by position so the result does not depend on
            // heap internals
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            return QuadOutcome {
                value,
                abs_err: total_err,
                panels: panels.len(),
                converged: total_err <= target,
            };
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at f64 resolution; freeze it
            let mut p = worst;
            p.err = 0.0;
            heap.push(p);
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = qk21(&f, lo, hi);
            heap.push(Panel { a: lo, b: hi, value, err, seq });
            seq += 1;
        }
    }
}

/// ∫₀^b f with f(y) ~ y^alpha as y → 0⁺ and alpha ∈ (−1, 0): substitutes
/// y = b·v^s, s = 1/(1+alpha), which removes the singularity exactly.
/// For alpha ≥ 0 this is a plain adaptive integral.
pub fn integrate_power_head<F: Fn(f64) -> f64>(
    f: F,
    b: f64,
    alpha: f64,
    splits: &[f64],
    opts: &QuadOpts,
) -> Result<QuadOutcome> {
    if alpha <= -1.0 {
        return Err(Error::divergent(format!(
            "integrand behaves like y^{alpha} at 0, not integrable"
        )));
    }
    if alpha >= 0.0 {
        return Ok(integrate(f, 0.0, b, splits, opts));
    }
    let s = 1.0 / (1.0 + alpha);
    let g = |v: f64| f(b * v.powf(s)) * b * s * v.powf(s - 1.0);
    let mapped: Vec<f64> = splits
        .iter()
        .filter(|&&y| y > 0.0 && y < b)
        .map(|&y| (y / b).powf(1.0 / s))
        .collect();
    Ok(integrate(g, 0.0, 1.0, &mapped, opts))
}

/// Behaviour of the dyadic tail extension.
#[derive(Clone, Copy, Debug)]
pub struct TailPolicy {
    /// Maximum number of interval doublings past the finite part.
    pub max_doublings: usize,
    /// A tail chunk below `stop_rel · |total|` (twice in a row) ends the
    /// extension.
    pub stop_rel: f64,
    /// Running total past this magnitude is reported as divergence.
    pub blowup: f64,
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy {
            max_doublings: 60,
            stop_rel: 1e-14,
            blowup: 1e250,
        }
    }
}

/// ∫ₐ^∞ f by a finite adaptive part up to `finite_to` followed by dyadic
/// chunks [L, 2L], [2L, 4L], … until the contributions are negligible.
/// Non-decaying chunks are reported as divergence.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    finite_to: f64,
    splits: &[f64],
    opts: &QuadOpts,
    tail: &TailPolicy,
) -> Result<QuadOutcome> {
    let finite_to = finite_to.max(a + 1.0);
    let head = integrate(&f, a, finite_to, splits, opts);
    let mut value = head.value;
    let mut abs_err = head.abs_err;
    let mut panels = head.panels;

    let mut lo = finite_to;
    let mut small_in_a_row = 0;
    let mut growing_in_a_row = 0;
    let mut prev_chunk = f64::INFINITY;
    let mut last_chunk = 0.0f64;
    for _ in 0..tail.max_doublings {
        let hi = lo * 2.0;
        let chunk = integrate(&f, lo, hi, &[], opts);
        value += chunk.value;
        abs_err += chunk.abs_err;
        panels += chunk.panels;
        last_chunk = chunk.value.abs();
        if !value.is_finite() || value.abs() > tail.blowup {
            return Err(Error::divergent(format!(
                "tail integral exceeds {:.1e} by y = {hi:.3e}",
                tail.blowup
            )));
        }
        if last_chunk >= prev_chunk && last_chunk > tail.stop_rel * value.abs() {
            growing_in_a_row += 1;
            if growing_in_a_row >= 6 {
                return Err(Error::divergent(format!(
                    "tail contributions do not decay (chunk {last_chunk:.3e} at y = {hi:.3e})"
                )));
            }
        } else {
            growing_in_a_row = 0;
        }
        if last_chunk <= tail.stop_rel * value.abs().max(f64::MIN_POSITIVE) {
            small_in_a_row += 1;
            if small_in_a_row >= 2 {
                // geometric remainder estimate
                let ratio = if prev_chunk > 0.0 {
                    (last_chunk / prev_chunk).min(0.9)
                } else {
                    0.5
                };
                abs_err += last_chunk * ratio / (1.0 - ratio);
                return Ok(QuadOutcome {
                    value,
                    abs_err,
                    panels,
                    converged: true,
                });
            }
        } else {
            small_in_a_row = 0;
        }
        prev_chunk = last_chunk;
        lo = hi;
    }
    // ran out of doublings without clear decay
    Err(Error::divergent(format!(
        "tail not resolved after {} doublings (last chunk {last_chunk:.3e})",
        tail.max_doublings
    )))
}
