//! Weight classes for almost-everywhere convergence to initial data: the
//! dual-norm membership criteria ‖v^{−1/p} φ‖_{p'} < ∞ for the heat and
//! Poisson integrability factors, the strict-inclusion demonstration
//! between the two classes, and the dyadic-shell constants used by the
//! local maximal-operator theorem.

use crate::error::{Error, Result};
use crate::factors::{phi_heat, phi_poisson};
use crate::quad::{integrate, integrate_power_head, QuadOpts};
use crate::report::{CheckResult, Report};
use crate::semigroup::{truncation_scan, AdmissibilityStatus};
use serde::{Deserialize, Serialize};

/// One multiplicative piece: c · y^pow · e^{exp_sq·y²} · ln^{log_pow}(y+e).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub coef: f64,
    pub pow: f64,
    pub exp_sq: f64,
    pub log_pow: f64,
}

impl Atom {
    pub fn constant(c: f64) -> Self {
        Atom { coef: c, pow: 0.0, exp_sq: 0.0, log_pow: 0.0 }
    }

    pub fn power(c: f64, alpha: f64) -> Self {
        Atom { coef: c, pow: alpha, exp_sq: 0.0, log_pow: 0.0 }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let mut v = self.coef;
        if self.pow != 0.0 {
            v *= y.powf(self.pow);
        }
        if self.exp_sq != 0.0 {
            v *= (self.exp_sq * y * y).exp();
        }
        if self.log_pow != 0.0 {
            v *= (y + std::f64::consts::E).ln().powf(self.log_pow);
        }
        v
    }

    fn grammar(&self) -> String {
        let mut parts = vec![format!("{}", self.coef)];
        if self.pow != 0.0 {
            parts.push(format!("y^{}", self.pow));
        }
        if self.exp_sq != 0.0 {
            parts.push(format!("exp({}*y^2)", self.exp_sq));
        }
        if self.log_pow != 0.0 {
            parts.push(format!("log^{}(y+e)", self.log_pow));
        }
        parts.join("*")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    /// `f64::INFINITY` for the last piece.
    pub hi: f64,
    pub atom: Atom,
}

/// Piecewise-analytic weight on (0, ∞) built from the closed atom family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pieces: Vec<Piece>,
}

impl WeightSpec {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::input("weight needs at least one piece"));
        }
        if pieces[0].lo != 0.0 {
            return Err(Error::input("weight pieces must start at 0"));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::input(format!(
                    "weight pieces must be contiguous: [{}, {}) then [{}, {})",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        let last = pieces.last().unwrap();
        if last.hi != f64::INFINITY {
            return Err(Error::input("last weight piece must extend to inf"));
        }
        if pieces.iter().any(|p| p.atom.coef <= 0.0) {
            return Err(Error::input("weight atoms must have positive coefficients"));
        }
        Ok(WeightSpec { pieces })
    }

    pub fn one() -> Self {
        WeightSpec {
            pieces: vec![Piece { lo: 0.0, hi: f64::INFINITY, atom: Atom::constant(1.0) }],
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { atom: Atom { coef: p.atom.coef * c, ..p.atom }, ..*p })
            .collect();
        WeightSpec::new(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, y: f64) -> f64 {
        for p in &self.pieces {
            if y < p.hi {
                return p.atom.eval(y);
            }
        }
        self.pieces.last().unwrap().atom.eval(y)
    }

    pub fn power_at_zero(&self) -> f64 {
        self.pieces[0].atom.pow
    }

    pub fn tail_atom(&self) -> Atom {
        self.pieces.last().unwrap().atom
    }

    pub fn split_points(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .skip(1)
            .map(|p| p.lo)
            .filter(|&v| v.is_finite() && v > 0.0)
            .collect()
    }

    /// Render back to the textual grammar.
    pub fn grammar(&self) -> String {
        self.pieces
            .iter()
            .map(|p| {
                let hi = if p.hi.is_finite() { format!("{}", p.hi) } else { "inf".to_string() };
                format!("piece [{},{}): {}", p.lo, hi, p.atom.grammar())
            })
            .collect::<Vec<_>>()
            .join(" ; ")
    }

    /// Parse the weight grammar; see `docs/formats.md` in the repository
    /// root for the EBNF. A bare atom is shorthand for a single piece on
    /// [0, inf).
    pub fn parse(input: &str) -> Result<Self> {
        Parser::new(input).parse_weight()
    }
}

/// Hand-rolled cursor parser; whitespace-insensitive, positions reported
/// in bytes of the original input.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src: src.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'+') || self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit()
                || self.src[self.pos] == b'.'
                || self.src[self.pos] == b'e'
                || self.src[self.pos] == b'E'
                || (self.pos > start
                    && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                    && matches!(self.src[self.pos - 1], b'e' | b'E')))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.err(format!("expected a number, found '{text}'"))
        })
    }

    fn parse_weight(&mut self) -> Result<WeightSpec> {
        self.skip_ws();
        let mut pieces = Vec::new();
        if self.src[self.pos..].starts_with(b"piece") {
            loop {
                pieces.push(self.parse_piece()?);
                self.skip_ws();
                if self.peek() == Some(b';') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        } else {
            let atom = self.parse_atom()?;
            pieces.push(Piece { lo: 0.0, hi: f64::INFINITY, atom });
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("unexpected trailing input"));
        }
        WeightSpec::new(pieces)
    }

    fn parse_piece(&mut self) -> Result<Piece> {
        if !self.eat_keyword("piece") {
            return Err(self.err("expected 'piece'"));
        }
        self.eat(b'[')?;
        let lo = self.number()?;
        self.eat(b',')?;
        self.skip_ws();
        let hi = if self.eat_keyword("inf") {
            f64::INFINITY
        } else {
            self.number()?
        };
        self.eat(b')')?;
        self.eat(b':')?;
        let atom = self.parse_atom()?;
        Ok(Piece { lo, hi, atom })
    }

    fn parse_atom(&mut self) -> Result<Atom> {
        let mut atom = Atom::constant(1.0);
        loop {
            self.parse_factor(&mut atom)?;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(atom)
    }

    fn parse_factor(&mut self, atom: &mut Atom) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(b'y') => {
                self.pos += 1;
                let e = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.number()?
                } else {
                    1.0
                };
                atom.pow += e;
                Ok(())
            }
            Some(b'e') if self.src[self.pos..].starts_with(b"exp") => {
                self.pos += 3;
                self.eat(b'(')?;
                let a = self.number()?;
                self.skip_ws();
                if !self.eat_keyword("*y^2") {
                    return Err(self.err("expected '*y^2' in exp factor"));
                }
                self.eat(b')')?;
                atom.exp_sq += a;
                Ok(())
            }
            Some(b'l') if self.src[self.pos..].starts_with(b"log") => {
                self.pos += 3;
                let beta = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.number()?
                } else {
                    1.0
                };
                self.eat(b'(')?;
                if !self.eat_keyword("y+e") {
                    return Err(self.err("expected 'y+e' in log factor"));
                }
                self.eat(b')')?;
                atom.log_pow += beta;
                Ok(())
            }
            Some(c) if c == b'+' || c == b'-' || c == b'.' || c.is_ascii_digit() => {
                let n = self.number()?;
                atom.coef *= n;
                Ok(())
            }
            _ => Err(self.err("expected a factor (number, y^a, exp(A*y^2) or log^b(y+e))")),
        }
    }
}

/// A Lebesgue exponent p ∈ [1, ∞) with its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LebesgueExponent {
    p: f64,
    p_conj: f64,
}

impl LebesgueExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::domain(format!("exponent must satisfy 1 <= p < inf, got {p}")));
        }
        let p_conj = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        Ok(LebesgueExponent { p, p_conj })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn conjugate(&self) -> f64 {
        self.p_conj
    }
}

/// ‖·‖ with an explicit divergence marker instead of ∞.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtendedNorm {
    /// None when divergent.
    pub value: Option<f64>,
    pub status: AdmissibilityStatus,
    pub tail_slope: Option<f64>,
    pub partials: Vec<(f64, f64)>,
}

impl ExtendedNorm {
    pub fn is_finite(&self) -> bool {
        self.status == AdmissibilityStatus::Finite
    }
}

fn default_radii() -> Vec<f64> {
    crate::semigroup::default_radii()
}

/// ‖v^{−1/p} φ‖_{p'} for a factor closure with known power at 0.
fn dual_norm<F: Fn(f64) -> f64>(
    v: &WeightSpec,
    p: LebesgueExponent,
    phi: F,
    phi_pow_at_zero: f64,
) -> Result<ExtendedNorm> {
    if p.p() == 1.0 {
        return Ok(ess_sup_norm(v, phi));
    }
    let pc = p.conjugate();
    let g = |y: f64| (v.eval(y).powf(-1.0 / p.p()) * phi(y)).powf(pc);
    let head_alpha = pc * (phi_pow_at_zero - v.power_at_zero() / p.p());
    let splits = v.split_points();
    let scan = truncation_scan(g, head_alpha, &splits, &default_radii())?;
    let value = match scan.status {
        AdmissibilityStatus::Finite => {
            Some(scan.partials.last().map(|&(_, v)| v).unwrap_or(0.0).powf(1.0 / pc))
        }
        _ => None,
    };
    Ok(ExtendedNorm {
        value,
        status: scan.status,
        tail_slope: scan.tail_slope,
        partials: scan.partials,
    })
}

/// p = 1 policy: the criterion degenerates to ess-sup v^{−1}φ, evaluated
/// as a grid maximum with one refinement.
fn ess_sup_norm<F: Fn(f64) -> f64>(v: &WeightSpec, phi: F) -> ExtendedNorm {
    let sup_on = |n: usize| -> f64 {
        let mut best = 0.0f64;
        for i in 0..n {
            let y = 1e-6 * (1e12f64).powf(i as f64 / (n - 1) as f64);
            best = best.max(phi(y) / v.eval(y));
        }
        best
    };
    let coarse = sup_on(4_000);
    let fine = sup_on(8_000);
    let grew = (fine - coarse) / coarse.abs().max(f64::MIN_POSITIVE);
    if fine.is_finite() && grew < 0.01 {
        ExtendedNorm {
            value: Some(fine),
            status: AdmissibilityStatus::Finite,
            tail_slope: None,
            partials: vec![(4_000.0, coarse), (8_000.0, fine)],
        }
    } else {
        ExtendedNorm {
            value: None,
            status: AdmissibilityStatus::Divergent,
            tail_slope: Some(grew),
            partials: vec![(4_000.0, coarse), (8_000.0, fine)],
        }
    }
}

/// ‖v^{−1/p} φ^λ‖_{p'} — the Poisson-class membership norm.
pub fn dp_poisson_norm(v: &WeightSpec, lambda: f64, p: LebesgueExponent) -> Result<ExtendedNorm> {
    if lambda < 0.0 {
        return Err(Error::domain("weight classes are stated for lambda >= 0"));
    }
    dual_norm(v, p, |y| phi_poisson(lambda, y), 2.0 * lambda)
}

/// ‖v^{−1/p} φ_t^λ‖_{p'} — the heat-class membership norm at time t.
pub fn dp_heat_norm(
    v: &WeightSpec,
    lambda: f64,
    p: LebesgueExponent,
    t: f64,
) -> Result<ExtendedNorm> {
    if lambda < 0.0 {
        return Err(Error::domain("weight classes are stated for lambda >= 0"));
    }
    if t <= 0.0 {
        return Err(Error::domain(format!("heat norm needs t > 0, got {t}")));
    }
    dual_norm(v, p, |y| phi_heat(lambda, t, y), 2.0 * lambda)
}

/// ‖v^{−1/p}(y∨1)^{−2}‖_{p'}: the order-independent tail norm whose −2
/// exponent matches the Poisson factor's decay.
pub fn dp_tail_norm(v: &WeightSpec, p: LebesgueExponent) -> Result<ExtendedNorm> {
    dual_norm(v, p, |y| y.max(1.0).powf(-2.0), 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightClass {
    Heat,
    Poisson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Finite(f64),
    Unbounded,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    pub class: WeightClass,
    pub lambda: f64,
    pub p: f64,
    /// None for the unbounded horizon.
    pub horizon: Option<f64>,
    pub member: bool,
    /// Poisson: the single norm. Heat: the norm at the largest checked t
    /// (monotonicity of φ_t in t reduces the (0, T) family to this one).
    pub norm_value: Option<f64>,
    /// Heat only: the norm curve on the checked t-grid.
    pub t_norms: Vec<(f64, Option<f64>)>,
    /// Largest admissible horizon imposed by a Gaussian-decay tail atom
    /// (None when no such obstruction exists).
    pub tail_critical_t: Option<f64>,
    pub tail_slope: Option<f64>,
    pub diagnostics: String,
}

/// Class membership by the dual-norm criterion. For the heat class the
/// infinite family {t < T} reduces to the largest checked t because
/// φ_t^λ is pointwise nondecreasing in t; a decaying Gaussian tail atom
/// e^{A y²}, A < 0, additionally caps the admissible horizon at
/// t_crit = p/(−4A), handled symbolically.
pub fn membership(
    v: &WeightSpec,
    lambda: f64,
    p: LebesgueExponent,
    class: WeightClass,
    horizon: Horizon,
) -> Result<MembershipReport> {
    match class {
        WeightClass::Poisson => {
            let norm = dp_poisson_norm(v, lambda, p)?;
            Ok(MembershipReport {
                class,
                lambda,
                p: p.p(),
                horizon: None,
                member: norm.is_finite(),
                norm_value: norm.value,
                t_norms: Vec::new(),
                tail_critical_t: None,
                tail_slope: norm.tail_slope,
                diagnostics: match norm.status {
                    AdmissibilityStatus::Finite => String::new(),
                    AdmissibilityStatus::Divergent => {
                        "dual norm diverges (positive tail slope)".to_string()
                    }
                    AdmissibilityStatus::Inconclusive => {
                        "dual norm scan inconclusive".to_string()
                    }
                },
            })
        }
        WeightClass::Heat => {
            let a_tail = v.tail_atom().exp_sq;
            let t_crit = if a_tail < 0.0 { Some(p.p() / (-4.0 * a_tail)) } else { None };
            let (t_max, horizon_val, horizon_ok) = match horizon {
                Horizon::Finite(t_horizon) => {
                    if t_horizon <= 0.0 {
                        return Err(Error::domain("horizon must be positive"));
                    }
                    let ok = t_crit.map(|tc| t_horizon <= tc).unwrap_or(true);
                    // check strictly inside (0, T) and inside the critical cap
                    let mut tm = t_horizon * (1.0 - 1e-9);
                    if let Some(tc) = t_crit {
                        tm = tm.min(tc * (1.0 - 1e-9));
                    }
                    (tm, Some(t_horizon), ok)
                }
                Horizon::Unbounded => {
                    let ok = t_crit.is_none();
                    (1e6f64.min(t_crit.map(|tc| tc * (1.0 - 1e-9)).unwrap_or(1e6)), None, ok)
                }
            };
            let t_grid: Vec<f64> = (0..4).map(|j| t_max * 0.25f64.powi(j)).collect();
            let mut t_norms = Vec::new();
            let mut largest: Option<ExtendedNorm> = None;
            for &t in &t_grid {
                let n = dp_heat_norm(v, lambda, p, t)?;
                if largest.is_none() {
                    largest = Some(n.clone());
                }
                t_norms.push((t, n.value));
            }
            let largest = largest.expect("grid nonempty");
            let member = horizon_ok && largest.is_finite();
            Ok(MembershipReport {
                class,
                lambda,
                p: p.p(),
                horizon: horizon_val,
                member,
                norm_value: largest.value,
                t_norms,
                tail_critical_t: t_crit,
                tail_slope: largest.tail_slope,
                diagnostics: if member {
                    "finite at the largest checked t; monotonicity in t covers all smaller t"
                        .to_string()
                } else if !horizon_ok {
                    format!(
                        "tail atom caps the admissible horizon at t_crit = {:?} below the requested horizon",
                        t_crit
                    )
                } else {
                    "dual norm diverges at the largest checked t".to_string()
                },
            })
        }
    }
}

/// The strict inclusion of the Poisson class inside every finite-horizon
/// heat class, demonstrated on a small catalog plus the separating
/// weight y^{2λ+ε} (y ≤ 1) / e^{−p y²/4T} (y > 1) with ε = 0.5/p'.
pub fn inclusion_demo(lambda: f64, p: LebesgueExponent, t_horizon: f64) -> Result<Report> {
    let mut report = Report::new(format!(
        "class inclusion at lambda = {lambda}, p = {}, T = {t_horizon}",
        p.p()
    ));
    let catalog: Vec<(&str, WeightSpec)> = vec![
        ("unit", WeightSpec::one()),
        (
            "piecewise_poly",
            WeightSpec::new(vec![
                Piece { lo: 0.0, hi: 1.0, atom: Atom::power(1.0, 0.3) },
                Piece { lo: 1.0, hi: f64::INFINITY, atom: Atom::power(1.0, 2.0) },
            ])?,
        ),
        (
            "growing_gaussian",
            WeightSpec::new(vec![Piece {
                lo: 0.0,
                hi: f64::INFINITY,
                atom: Atom { coef: 1.0, pow: 0.0, exp_sq: 0.25, log_pow: 0.0 },
            }])?,
        ),
    ];
    for (name, v) in &catalog {
        let pm = membership(v, lambda, p, WeightClass::Poisson, Horizon::Unbounded)?;
        let hm = membership(v, lambda, p, WeightClass::Heat, Horizon::Finite(t_horizon))?;
        report.push(CheckResult::flag(
            format!("poisson member '{name}' is heat member"),
            !pm.member || hm.member,
            format!("poisson: {}, heat: {}", pm.member, hm.member),
        ));
    }
    let sep = separating_weight(lambda, p, t_horizon)?;
    let hm = membership(&sep, lambda, p, WeightClass::Heat, Horizon::Finite(t_horizon))?;
    let pm = membership(&sep, lambda, p, WeightClass::Poisson, Horizon::Unbounded)?;
    report.push(CheckResult::flag(
        "separating weight is heat member",
        hm.member,
        sep.grammar(),
    ));
    report.push(CheckResult::flag(
        "separating weight is NOT poisson member",
        !pm.member,
        format!("tail slope {:?}", pm.tail_slope),
    ));
    report.push(CheckResult::flag(
        "inclusion is strict",
        hm.member && !pm.member,
        "poisson class strictly inside heat class",
    ));
    Ok(report)
}

/// The separating weight of the strict inclusion: y^{2λ+ε} near zero with
/// ε = 0.5/p', glued to the decaying Gaussian e^{−p y²/(4T)}.
pub fn separating_weight(lambda: f64, p: LebesgueExponent, t_horizon: f64) -> Result<WeightSpec> {
    let eps = 0.5 / p.conjugate();
    WeightSpec::new(vec![
        Piece { lo: 0.0, hi: 1.0, atom: Atom::power(1.0, 2.0 * lambda + eps) },
        Piece {
            lo: 1.0,
            hi: f64::INFINITY,
            atom: Atom { coef: 1.0, pow: 0.0, exp_sq: -p.p() / (4.0 * t_horizon), log_pow: 0.0 },
        },
    ])
}

/// Shell data for the local maximal theorem: truncated dual norms
/// V_k = ‖v^{−1/p} χ_{(0, R·2^k)}‖_{p'} and C_k = |E_k|^{1/s−1} V_k over
/// the dyadic shells E_0 = (0,1), E_k = [2^{k−1}, 2^k); the proof's
/// unnamed constant is fixed to 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellConstants {
    pub k: usize,
    pub shell: (f64, f64),
    pub measure: f64,
    pub v_k: f64,
    pub c_k: f64,
}

pub fn shell_constants(
    v: &WeightSpec,
    _lambda: f64,
    p: LebesgueExponent,
    r: f64,
    s: f64,
    k_max: usize,
) -> Result<Vec<ShellConstants>> {
    if r <= 1.0 {
        return Err(Error::domain(format!("R must exceed 1, got {r}")));
    }
    if !(0.0 < s && s < 1.0) {
        return Err(Error::domain(format!("s must lie in (0, 1), got {s}")));
    }
    if k_max < 4 {
        return Err(Error::input(format!("k_max must be >= 4, got {k_max}")));
    }
    // local p'-integrability of v^{−1/p} at the origin
    let head_alpha = if p.p() == 1.0 {
        -v.power_at_zero()
    } else {
        -v.power_at_zero() * p.conjugate() / p.p()
    };
    if head_alpha <= -1.0 && p.p() > 1.0 {
        return Err(Error::input(format!(
            "v^(-1/p) is not locally L^p' on shell E_0: integrand ~ y^{head_alpha} at 0"
        )));
    }
    if p.p() == 1.0 && v.power_at_zero() > 0.0 {
        return Err(Error::input(
            "v^(-1) is unbounded on shell E_0; ess-sup norm infinite".to_string(),
        ));
    }

    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let cutoff = r * 2f64.powi(k as i32);
        let v_k = if p.p() == 1.0 {
            let mut best = 0.0f64;
            let n = 4000;
            for i in 0..n {
                let y = 1e-9f64 * (cutoff / 1e-9).powf(i as f64 / (n - 1) as f64);
                best = best.max(1.0 / v.eval(y));
            }
            best
        } else {
            let pc = p.conjugate();
            let g = |y: f64| v.eval(y).powf(-pc / p.p());
            let splits = v.split_points();
            let opts = QuadOpts::with_rel_tol(1e-11);
            let y_head = splits.iter().copied().find(|&s| s < cutoff).unwrap_or(cutoff).min(1.0);
            let head = integrate_power_head(&g, y_head, head_alpha, &splits, &opts)?;
            let rest = integrate(&g, y_head, cutoff, &splits, &opts);
            let total = head.value + rest.value;
            if !total.is_finite() {
                return Err(Error::input(format!(
                    "truncated dual norm diverges on shell k = {k}"
                )));
            }
            total.powf(1.0 / pc)
        };
        let (shell_lo, shell_hi, measure) = if k == 0 {
            (0.0, 1.0, 1.0)
        } else {
            let lo = 2f64.powi(k as i32 - 1);
            (lo, 2.0 * lo, lo)
        };
        out.push(ShellConstants {
            k,
            shell: (shell_lo, shell_hi),
            measure,
            v_k,
            c_k: measure.powf(1.0 / s - 1.0) * v_k,
        });
    }
    Ok(out)
}

/// Truth of the series-convergence condition 0 < γ < (1 − σ)(1 + 1/p)
/// governing the dyadic assembly of the target weight.
pub fn series_exponent_check(sigma: f64, gamma: f64, p: LebesgueExponent) -> Result<bool> {
    if !(0.0 < sigma && sigma < 1.0) {
        return Err(Error::domain(format!("sigma must lie in (0,1), got {sigma}")));
    }
    if gamma <= 0.0 {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(gamma < (1.0 - sigma) * (1.0 + 1.0 / p.p()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(v: f64) -> LebesgueExponent {
        LebesgueExponent::new(v).unwrap()
    }

    #[test]
    fn parser_round_trip_and_eval() {
        let w = WeightSpec::parse("piece [0,1): 2*y^0.5 ; piece [1,inf): 2*exp(-0.25*y^2)*log^2(y+e)").unwrap();
        assert_eq!(w.pieces().len(), 2);
        assert!((w.eval(0.25) - 2.0 * 0.5).abs() < 1e-14);
        let y: f64 = 3.0;
        let want = 2.0 * (-0.25 * 9.0f64).exp() * (y + std::f64::consts::E).ln().powi(2);
        assert!((w.eval(y) - want).abs() / want < 1e-14);
        let again = WeightSpec::parse(&w.grammar()).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn parser_accepts_bare_atom_and_unit() {
        let w = WeightSpec::parse("1").unwrap();
        assert_eq!(w.eval(7.0), 1.0);
        let w = WeightSpec::parse("piece [0,inf): 1").unwrap();
        assert_eq!(w.eval(0.5), 1.0);
        let w = WeightSpec::parse("y^2").unwrap();
        assert_eq!(w.eval(3.0), 9.0);
    }

    #[test]
    fn parser_errors_carry_positions() {
        match WeightSpec::parse("piece [0,1): y^a") {
            Err(Error::Parse { pos, .. }) => assert!(pos >= 14, "pos {pos}"),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(WeightSpec::parse("piece [0,2): 1 ; piece [3,inf): 1").is_err());
        assert!(WeightSpec::parse("piece [0,1): 1").is_err()); // no tail piece
        assert!(WeightSpec::parse("piece [0,inf): -2").is_err()); // nonpositive
    }

    #[test]
    fn poisson_norm_unit_weight() {
        // (∫ (1+y²)^{−2} dy)^{1/2} = √(π/4)
        let n = dp_poisson_norm(&WeightSpec::one(), 0.0, p(2.0)).unwrap();
        assert!(n.is_finite());
        let want = (PI / 4.0).sqrt();
        assert!((n.value.unwrap() - want).abs() < 1e-7, "{:?}", n.value);
        assert!((n.value.unwrap() - 0.886_226_9).abs() < 1e-6);

        // λ = 1: integrand y⁴/(1+y²)⁴, finite
        let n = dp_poisson_norm(&WeightSpec::one(), 1.0, p(2.0)).unwrap();
        assert!(n.is_finite());
    }

    #[test]
    fn heat_norm_unit_weight() {
        // (∫ e^{−y²/2} dy)^{1/2} = ((1/2)√(2π))^{1/2}
        let n = dp_heat_norm(&WeightSpec::one(), 0.0, p(2.0), 1.0).unwrap();
        let want = (0.5 * (2.0 * PI).sqrt()).sqrt();
        assert!((n.value.unwrap() - want).abs() < 1e-9, "{:?}", n.value);

        // t = 4: (∫ e^{−y²/8} dy)^{1/2} = √(2π)^{1/2}, larger than at t = 1
        let n4 = dp_heat_norm(&WeightSpec::one(), 0.0, p(2.0), 4.0).unwrap();
        let want4 = (2.0 * PI).sqrt().sqrt();
        assert!((n4.value.unwrap() - want4).abs() < 1e-9);
        assert!(n4.value.unwrap() > n.value.unwrap());
        assert!((want4 - 1.5832).abs() < 1e-4);
    }

    #[test]
    fn heat_norm_monotone_in_t() {
        let v = WeightSpec::parse("piece [0,1): y^0.5 ; piece [1,inf): 1*log^1(y+e)").unwrap();
        let mut prev = 0.0;
        for &t in &[0.1, 0.5, 1.0, 3.0] {
            let n = dp_heat_norm(&v, 1.0, p(2.0), t).unwrap().value.unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn scaling_covariance() {
        // norms of c·v equal c^{−1/p} × norms of v
        let v = WeightSpec::parse("piece [0,1): y^0.25 ; piece [1,inf): y^1").unwrap();
        let c = 3.7;
        let scaled = v.scaled(c).unwrap();
        for lambda in [0.0, 1.0] {
            let a = dp_poisson_norm(&v, lambda, p(2.0)).unwrap().value.unwrap();
            let b = dp_poisson_norm(&scaled, lambda, p(2.0)).unwrap().value.unwrap();
            assert!((b - a * c.powf(-0.5)).abs() / a < 1e-9);
        }
    }

    #[test]
    fn constructed_divergence_detected() {
        // v decaying fast enough at ∞ to cancel the factor's decay
        let v = WeightSpec::parse("piece [0,1): 1 ; piece [1,inf): y^-8").unwrap();
        let n = dp_poisson_norm(&v, 0.0, p(2.0)).unwrap();
        assert_eq!(n.status, AdmissibilityStatus::Divergent, "{n:?}");
        assert!(n.value.is_none());
        assert!(n.tail_slope.unwrap() > 0.05);
    }

    #[test]
    fn counterexample_membership_split() {
        let (lambda, pe, t_horizon) = (0.0, p(2.0), 1.0);
        let sep = separating_weight(lambda, pe, t_horizon).unwrap();
        let hm = membership(&sep, lambda, pe, WeightClass::Heat, Horizon::Finite(t_horizon)).unwrap();
        assert!(hm.member, "{hm:?}");
        assert!((hm.tail_critical_t.unwrap() - t_horizon).abs() < 1e-12);
        let pm = membership(&sep, lambda, pe, WeightClass::Poisson, Horizon::Unbounded).unwrap();
        assert!(!pm.member, "{pm:?}");
        assert!(pm.tail_slope.unwrap() > 0.05);
    }

    #[test]
    fn heat_membership_respects_horizon_cap() {
        let sep = separating_weight(1.0, p(2.0), 1.0).unwrap();
        // requesting a horizon beyond t_crit = 1 must fail
        let hm = membership(&sep, 1.0, p(2.0), WeightClass::Heat, Horizon::Finite(2.0)).unwrap();
        assert!(!hm.member);
        // unbounded horizon also fails
        let hm = membership(&sep, 1.0, p(2.0), WeightClass::Heat, Horizon::Unbounded).unwrap();
        assert!(!hm.member);
        // unit weight is in every class
        let hm = membership(&WeightSpec::one(), 1.0, p(2.0), WeightClass::Heat, Horizon::Unbounded)
            .unwrap();
        assert!(hm.member);
    }

    #[test]
    fn inclusion_demo_strict() {
        for &(lambda, pv, t) in &[(0.0, 2.0, 1.0), (1.0, 1.5, 2.0)] {
            let rep = inclusion_demo(lambda, p(pv), t).unwrap();
            assert!(rep.all_passed(), "{rep:?}");
        }
    }

    #[test]
    fn shell_constants_unit_weight() {
        let shells = shell_constants(&WeightSpec::one(), 0.0, p(2.0), 2.0, 0.5, 4).unwrap();
        // V_0 = ‖χ_{(0,2)}‖_2 = √2, V_3 = ‖χ_{(0,16)}‖_2 = 4
        assert!((shells[0].v_k - 2f64.sqrt()).abs() < 1e-9);
        assert!((shells[0].v_k - 1.414_213_6).abs() < 1e-6);
        assert!((shells[3].v_k - 4.0).abs() < 1e-9);
        // V_k nondecreasing
        assert!(shells.windows(2).all(|w| w[0].v_k <= w[1].v_k + 1e-12));
        // |E_k|: 1, 1, 2, 4, 8
        assert_eq!(shells[2].measure, 2.0);
        // C_k = |E_k|^{1/s−1} V_k with c = 1
        assert!((shells[2].c_k - 2.0 * shells[2].v_k).abs() < 1e-12);
    }

    #[test]
    fn shell_v_k_bounded_by_tail_norm() {
        // V_k ≤ ‖v‖_{D_p} (R 2^k)²
        let v = WeightSpec::parse("piece [0,1): y^0.5 ; piece [1,inf): y^1.5").unwrap();
        let pe = p(2.0);
        let tail = dp_tail_norm(&v, pe).unwrap().value.unwrap();
        let shells = shell_constants(&v, 0.0, pe, 2.0, 0.5, 6).unwrap();
        for s in &shells {
            let cutoff = 2.0 * 2f64.powi(s.k as i32);
            assert!(
                s.v_k <= tail * cutoff * cutoff * (1.0 + 1e-9),
                "k={} V={} bound={}",
                s.k,
                s.v_k,
                tail * cutoff * cutoff
            );
        }
    }

    #[test]
    fn shell_rejects_non_integrable_weight() {
        // v = y^{10} near 0 makes v^{−1/2} fail L² locally (p = 2)
        let v = WeightSpec::parse("piece [0,1): y^10 ; piece [1,inf): 1").unwrap();
        let e = shell_constants(&v, 0.0, p(2.0), 2.0, 0.5, 4);
        assert!(matches!(e, Err(Error::Input(_))), "{e:?}");
    }

    #[test]
    fn series_condition_truth_table() {
        assert!(series_exponent_check(0.5, 0.5, p(2.0)).unwrap()); // bound 0.75
        assert!(!series_exponent_check(0.5, 0.75, p(2.0)).unwrap()); // boundary, strict
        assert!(!series_exponent_check(0.999_999, 0.1, p(2.0)).unwrap()); // σ → 1⁻
        assert!(series_exponent_check(0.0, 0.1, p(2.0)).is_err());
        assert!(series_exponent_check(0.5, 0.0, p(2.0)).is_err());
    }

    #[test]
    fn p_one_ess_sup_policy() {
        // smooth weight: the p = 1 criterion is the p → 1⁺ limit
        let v = WeightSpec::parse("piece [0,inf): 1*exp(0.1*y^2)").unwrap();
        let n1 = dp_poisson_norm(&v, 0.0, p(1.0)).unwrap();
        assert!(n1.is_finite());
        // ess-sup of φ⁰/v = 1/((1+y²)e^{0.1y²}) is 1 at y = 0
        assert!((n1.value.unwrap() - 1.0).abs() < 1e-3, "{:?}", n1.value);
    }
}
