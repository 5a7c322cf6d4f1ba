//! Catalog of initial-data functions on (0, ∞): powers near zero,
//! Gaussian-growth tails, log-damped growth, indicators and bounded
//! smooth profiles. The catalog is closed so that every member exposes
//! its split points and its power behaviour at 0, which the quadrature
//! and divergence detection rely on.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Bounded smooth profiles used as convergence/maximal test data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothTag {
    /// f ≡ 1
    One,
    /// e^{−y}
    ExpDecay,
    /// e^{−y²}
    Gauss,
    /// 1/(1+y²)
    Lorentz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFunction {
    /// y^alpha
    Power { alpha: f64 },
    /// y^inner for y ≤ 1 glued to y^degree · e^{y²/(4·horizon)} for y > 1
    GaussianGrowth {
        horizon: f64,
        degree: i32,
        inner: f64,
    },
    /// y / ln^beta(y + e)
    LogDamped { beta: f64 },
    /// χ_{(a,b)}
    Indicator { a: f64, b: f64 },
    /// C^∞ version of the indicator with tanh shoulders of width w
    SmoothedIndicator { a: f64, b: f64, width: f64 },
    Smooth { tag: SmoothTag },
}

impl DataFunction {
    pub fn one() -> Self {
        DataFunction::Smooth { tag: SmoothTag::One }
    }

    pub fn gauss() -> Self {
        DataFunction::Smooth { tag: SmoothTag::Gauss }
    }

    pub fn exp_decay() -> Self {
        DataFunction::Smooth { tag: SmoothTag::ExpDecay }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            DataFunction::Power { alpha } => y.powf(alpha),
            DataFunction::GaussianGrowth { horizon, degree, inner } => {
                if y <= 1.0 {
                    y.powf(inner)
                } else {
                    y.powi(degree) * (y * y / (4.0 * horizon)).exp()
                }
            }
            DataFunction::LogDamped { beta } => {
                y / (y + std::f64::consts::E).ln().powf(beta)
            }
            DataFunction::Indicator { a, b } => {
                if y > a && y < b {
                    1.0
                } else {
                    0.0
                }
            }
            DataFunction::SmoothedIndicator { a, b, width } => {
                0.25 * (1.0 + ((y - a) / width).tanh()) * (1.0 + ((b - y) / width).tanh())
            }
            DataFunction::Smooth { tag } => match tag {
                SmoothTag::One => 1.0,
                SmoothTag::ExpDecay => (-y).exp(),
                SmoothTag::Gauss => (-y * y).exp(),
                SmoothTag::Lorentz => 1.0 / (1.0 + y * y),
            },
        }
    }

    /// Points where the definition changes or jumps; quadrature panels
    /// split here.
    pub fn split_points(&self) -> Vec<f64> {
        match *self {
            DataFunction::GaussianGrowth { .. } => vec![1.0],
            DataFunction::Indicator { a, b } => vec![a, b],
            DataFunction::SmoothedIndicator { a, b, .. } => vec![a, b],
            _ => Vec::new(),
        }
    }

    /// Jump discontinuities (the a.e. caveat of pointwise convergence is
    /// observable exactly there).
    pub fn jump_points(&self) -> Vec<f64> {
        match *self {
            DataFunction::Indicator { a, b } => {
                vec![a, b].into_iter().filter(|&p| p > 0.0).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Exponent q with f(y) ~ c·y^q as y → 0⁺.
    pub fn power_at_zero(&self) -> f64 {
        match *self {
            DataFunction::Power { alpha } => alpha,
            DataFunction::GaussianGrowth { inner, .. } => inner,
            DataFunction::LogDamped { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// Mean of the one-sided limits at x (differs from f(x) only at
    /// jump points).
    pub fn half_sum_at(&self, x: f64) -> f64 {
        match *self {
            DataFunction::Indicator { a, b } => {
                if x == a || x == b {
                    0.5
                } else {
                    self.eval(x)
                }
            }
            _ => self.eval(x),
        }
    }

    pub fn is_continuous_at(&self, x: f64) -> bool {
        !self.jump_points().iter().any(|&p| p == x)
    }

    pub fn name(&self) -> String {
        match *self {
            DataFunction::Power { alpha } => format!("power({alpha})"),
            DataFunction::GaussianGrowth { horizon, degree, inner } => {
                format!("gaussian_growth({horizon},{degree},{inner})")
            }
            DataFunction::LogDamped { beta } => format!("log_damped({beta})"),
            DataFunction::Indicator { a, b } => format!("indicator({a},{b})"),
            DataFunction::SmoothedIndicator { a, b, width } => {
                format!("smoothed_indicator({a},{b},{width})")
            }
            DataFunction::Smooth { tag } => match tag {
                SmoothTag::One => "one".to_string(),
                SmoothTag::ExpDecay => "exp_decay".to_string(),
                SmoothTag::Gauss => "gauss".to_string(),
                SmoothTag::Lorentz => "lorentz".to_string(),
            },
        }
    }

    /// Parse a catalog spec: a bare name (`one`, `gauss`, `exp_decay`,
    /// `lorentz`) or a parameterized form `name(args)` / `name:args`
    /// with comma-separated decimal arguments.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        let (name, args) = split_spec(s)?;
        let need = |n: usize| -> Result<()> {
            if args.len() != n {
                return Err(Error::Parse {
                    pos: name.len(),
                    msg: format!("'{name}' expects {n} argument(s), got {}", args.len()),
                });
            }
            Ok(())
        };
        match name {
            "one" | "1" => {
                need(0)?;
                Ok(DataFunction::one())
            }
            "gauss" => {
                need(0)?;
                Ok(DataFunction::gauss())
            }
            "exp_decay" | "exp" => {
                need(0)?;
                Ok(DataFunction::exp_decay())
            }
            "lorentz" => {
                need(0)?;
                Ok(DataFunction::Smooth { tag: SmoothTag::Lorentz })
            }
            "power" => {
                need(1)?;
                Ok(DataFunction::Power { alpha: args[0] })
            }
            "log_damped" => {
                need(1)?;
                Ok(DataFunction::LogDamped { beta: args[0] })
            }
            "indicator" => {
                need(2)?;
                if !(args[0] >= 0.0 && args[1] > args[0]) {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: "indicator needs 0 <= a < b".to_string(),
                    });
                }
                Ok(DataFunction::Indicator { a: args[0], b: args[1] })
            }
            "smoothed_indicator" => {
                if args.len() == 2 {
                    Ok(DataFunction::SmoothedIndicator {
                        a: args[0],
                        b: args[1],
                        width: 0.05,
                    })
                } else {
                    need(3)?;
                    if args[2] <= 0.0 {
                        return Err(Error::Parse {
                            pos: 0,
                            msg: "smoothing width must be positive".to_string(),
                        });
                    }
                    Ok(DataFunction::SmoothedIndicator {
                        a: args[0],
                        b: args[1],
                        width: args[2],
                    })
                }
            }
            "gaussian_growth" => {
                if args.len() == 2 {
                    Ok(DataFunction::GaussianGrowth {
                        horizon: args[0],
                        degree: args[1] as i32,
                        inner: 0.0,
                    })
                } else {
                    need(3)?;
                    Ok(DataFunction::GaussianGrowth {
                        horizon: args[0],
                        degree: args[1] as i32,
                        inner: args[2],
                    })
                }
            }
            other => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown data function '{other}'"),
            }),
        }
    }
}

/// Split `name(a,b,c)` or `name:a,b,c` into the name and parsed args.
fn split_spec(s: &str) -> Result<(&str, Vec<f64>)> {
    let (name, rest) = if let Some(open) = s.find('(') {
        if !s.ends_with(')') {
            return Err(Error::Parse {
                pos: s.len(),
                msg: "missing closing ')'".to_string(),
            });
        }
        (&s[..open], &s[open + 1..s.len() - 1])
    } else if let Some(colon) = s.find(':') {
        (&s[..colon], &s[colon + 1..])
    } else {
        (s, "")
    };
    let name = name.trim();
    let mut args = Vec::new();
    let rest = rest.trim();
    if !rest.is_empty() {
        for (i, piece) in rest.split(',').enumerate() {
            let piece = piece.trim();
            args.push(piece.parse::<f64>().map_err(|_| Error::Parse {
                pos: name.len() + 1 + i,
                msg: format!("'{piece}' is not a number"),
            })?);
        }
    }
    Ok((name, args))
}
