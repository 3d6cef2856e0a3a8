//! Congestion kernels `f` (concave, used in `C_f`) and the decreasing distance
//! functions whose `a f(a)` products they are.

use alloc::string::String;
use alloc::sync::Arc;
use core::f64::consts::PI;
use core::fmt;

use crate::{Error, Result};

/// Grid size for the numerical concavity check.
pub const CONCAVITY_GRID: usize = 10_000;

#[derive(Clone)]
enum Shape {
    Variance,
    Entropy,
    SqrtVariance,
    Sine,
    Sqrt,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A function `f : [0,1] -> R` used in `C_f(A) = int f(pi(A_u)) du / f(pi(A))`.
#[derive(Clone)]
pub struct CongestionKernel {
    name: String,
    shape: Shape,
    symmetric: bool,
    concave: bool,
}

impl fmt::Debug for CongestionKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CongestionKernel")
            .field("name", &self.name)
            .field("symmetric", &self.symmetric)
            .field("concave", &self.concave)
            .finish()
    }
}

fn xlog1x(a: f64) -> f64 {
    if a <= 0.0 || a >= 1.0 {
        0.0
    } else {
        -a * libm::log(a)
    }
}

impl CongestionKernel {
    fn builtin(name: &str, shape: Shape, symmetric: bool) -> Self {
        CongestionKernel { name: name.into(), shape, symmetric, concave: true }
    }

    /// `a (1 - a)`, the total-variation kernel.
    pub fn variance() -> Self {
        Self::builtin("a(1-a)", Shape::Variance, true)
    }

    /// `a log(1/a)`, the relative-entropy kernel.
    pub fn entropy() -> Self {
        Self::builtin("a*log(1/a)", Shape::Entropy, false)
    }

    /// `sqrt(a (1 - a))`, the L2 kernel.
    pub fn sqrt_variance() -> Self {
        Self::builtin("sqrt(a(1-a))", Shape::SqrtVariance, true)
    }

    /// `sin(pi a)`.
    pub fn sine() -> Self {
        Self::builtin("sin(pi*a)", Shape::Sine, true)
    }

    /// `sqrt(a)`.
    pub fn sqrt() -> Self {
        Self::builtin("sqrt(a)", Shape::Sqrt, false)
    }

    /// A user-supplied kernel; symmetry and concavity are checked on a grid.
    pub fn custom<F>(name: &str, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut k = CongestionKernel {
            name: name.into(),
            shape: Shape::Custom(Arc::new(f)),
            symmetric: false,
            concave: false,
        };
        k.concave = grid_concave(|a| k.eval(a));
        k.symmetric = (0..=CONCAVITY_GRID).all(|i| {
            let a = i as f64 / CONCAVITY_GRID as f64;
            (k.eval(a) - k.eval(1.0 - a)).abs() <= 1e-12
        });
        k
    }

    /// Looks up a built-in kernel by name (`variance`, `entropy`,
    /// `sqrt-variance`, `sine`, `sqrt`, `hellinger`).
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "variance" | "tv" | "a(1-a)" => Self::variance(),
            "entropy" | "a*log(1/a)" => Self::entropy(),
            "sqrt-variance" | "l2" | "sqrt(a(1-a))" => Self::sqrt_variance(),
            "sine" | "sin(pi*a)" => Self::sine(),
            "sqrt" | "sqrt(a)" => Self::sqrt(),
            "hellinger" => Decay::Hellinger.congestion_kernel(),
            _ => return None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }

    /// `f(a)`, with boundary values taken as continuous limits.
    pub fn eval(&self, a: f64) -> f64 {
        let a = a.clamp(0.0, 1.0);
        match &self.shape {
            Shape::Variance => a * (1.0 - a),
            Shape::Entropy => xlog1x(a),
            Shape::SqrtVariance => libm::sqrt(a * (1.0 - a)),
            Shape::Sine => libm::sin(PI * a),
            Shape::Sqrt => libm::sqrt(a),
            Shape::Custom(f) => f(a),
        }
    }

    pub fn require_concave(&self) -> Result<()> {
        if self.concave {
            Ok(())
        } else {
            Err(Error::NotConcave)
        }
    }
}

fn grid_concave<F: Fn(f64) -> f64>(f: F) -> bool {
    let h = 1.0 / CONCAVITY_GRID as f64;
    (1..CONCAVITY_GRID).all(|i| {
        let x = i as f64 * h;
        let d2 = f(x - h) - 2.0 * f(x) + f(x + h);
        d2 <= 1e-12
    })
}

/// A decreasing `f` bounding a distance by `E^_n f(pi(S_n))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Decay {
    /// `1 - a`
    TotalVariation,
    /// `log(1/a)`
    RelativeEntropy,
    /// `sqrt((1 - a)/a)`
    L2,
    /// `2 (1 - sqrt(a))`
    Hellinger,
}

impl Decay {
    pub const ALL: [Decay; 4] = [Decay::TotalVariation, Decay::RelativeEntropy, Decay::L2, Decay::Hellinger];

    pub fn name(self) -> &'static str {
        match self {
            Decay::TotalVariation => "tv",
            Decay::RelativeEntropy => "entropy",
            Decay::L2 => "l2",
            Decay::Hellinger => "hellinger",
        }
    }

    pub fn eval(self, a: f64) -> f64 {
        match self {
            Decay::TotalVariation => 1.0 - a,
            Decay::RelativeEntropy => -libm::log(a),
            Decay::L2 => libm::sqrt((1.0 - a).max(0.0) / a),
            Decay::Hellinger => 2.0 * (1.0 - libm::sqrt(a)),
        }
    }

    /// `f^{-1}(x)`; arguments outside the range of `f` are clamped into `[0, 1]`.
    pub fn inverse(self, x: f64) -> f64 {
        let a = match self {
            Decay::TotalVariation => 1.0 - x,
            Decay::RelativeEntropy => libm::exp(-x),
            Decay::L2 => 1.0 / (1.0 + x * x),
            Decay::Hellinger => {
                let s = 1.0 - x / 2.0;
                s * s
            }
        };
        a.clamp(0.0, 1.0)
    }

    /// The kernel `a f(a)` driving the contraction of `E^_n f(pi(S_n))`.
    pub fn congestion_kernel(self) -> CongestionKernel {
        match self {
            Decay::TotalVariation => CongestionKernel::variance(),
            Decay::RelativeEntropy => CongestionKernel::entropy(),
            Decay::L2 => CongestionKernel::sqrt_variance(),
            Decay::Hellinger => CongestionKernel {
                name: "2a(1-sqrt(a))".into(),
                shape: Shape::Custom(Arc::new(|a: f64| 2.0 * a * (1.0 - libm::sqrt(a)))),
                symmetric: false,
                concave: true,
            },
        }
    }
}
