//! Domain data for the interpolation system: extended data sets, binary
//! signatures and the family of vertical scaling factor functions.
//!
//! Everything in here is immutable after construction and validated once by
//! [`validate`]; downstream modules assume the invariants hold.

use crate::error::ModelError;

/// Strictness enforced on the aggregate contraction norm: a per-interval norm
/// sum is accepted only while it stays at or below `1 - SBAR_SLACK`.
pub const SBAR_SLACK: f64 = 1e-12;

/// How strictly the scaling-family norms are checked at validation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContractionMode {
    /// Require every per-interval norm sum below 1 (the construction
    /// hypothesis for the fixed-point argument).
    #[default]
    Strict,
    /// Skip the norm-sum check. Orbit refinement still works; the
    /// function-space contraction guarantee is forfeited.
    Relaxed,
}

/// Interpolation knots with visible ordinates `y` and hidden ordinates `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedDataSet {
    knots: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl ExtendedDataSet {
    pub fn new(knots: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self, ModelError> {
        if knots.len() < 3 {
            return Err(ModelError::TooFewKnots(knots.len()));
        }
        for (what, v) in [("knots", &knots), ("y", &y), ("z", &z)] {
            if let Some(index) = v.iter().position(|t| !t.is_finite()) {
                return Err(ModelError::NonFiniteValue { what, index });
            }
        }
        if y.len() != knots.len() {
            return Err(ModelError::LengthMismatch {
                what: "y",
                got: y.len(),
                expected: knots.len(),
            });
        }
        if z.len() != knots.len() {
            return Err(ModelError::LengthMismatch {
                what: "z",
                got: z.len(),
                expected: knots.len(),
            });
        }
        for i in 1..knots.len() {
            if knots[i] <= knots[i - 1] {
                return Err(ModelError::NonIncreasingKnots {
                    index: i,
                    value: knots[i],
                });
            }
        }
        Ok(Self { knots, y, z })
    }

    /// Number of subintervals.
    pub fn n(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn x0(&self) -> f64 {
        self.knots[0]
    }

    pub fn xn(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Subinterval `[x_{i-1}, x_i]` for `i` in `1..=n`.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.knots[i - 1], self.knots[i])
    }
}

/// Per-interval orientation flags: 0 keeps the interval map order-preserving,
/// 1 reverses it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    eps: Vec<u8>,
}

impl Signature {
    pub fn new(eps: Vec<u8>) -> Result<Self, ModelError> {
        if let Some(index) = eps.iter().position(|&e| e > 1) {
            return Err(ModelError::BadSignature {
                index,
                value: eps[index],
            });
        }
        Ok(Self { eps })
    }

    pub fn zeros(n: usize) -> Self {
        Self { eps: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// Flag for subinterval `i` in `1..=n`.
    pub fn eps(&self, i: usize) -> usize {
        self.eps[i - 1] as usize
    }

    pub fn flags(&self) -> &[u8] {
        &self.eps
    }
}

/// One scaling factor as the affine map `t -> c0 + c1 t`, used restricted to
/// a single subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorFunction {
    pub c0: f64,
    pub c1: f64,
}

impl FactorFunction {
    pub fn constant(c0: f64) -> Self {
        Self { c0, c1: 0.0 }
    }

    pub fn affine(c0: f64, c1: f64) -> Self {
        Self { c0, c1 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.c0 + self.c1 * t
    }

    /// Sup norm over `[lo, hi]`; affine maps attain extrema at endpoints.
    pub fn sup_norm(&self, lo: f64, hi: f64) -> f64 {
        self.eval(lo).abs().max(self.eval(hi).abs())
    }

    /// Signed range over `[lo, hi]`.
    pub fn range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (a, b) = (self.eval(lo), self.eval(hi));
        (a.min(b), a.max(b))
    }

    pub fn lipschitz(&self) -> f64 {
        self.c1.abs()
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite()
    }
}

/// The four per-interval factor families: `p`, `q` weight (y, z) in the
/// visible component, `p_tilde`, `q_tilde` in the hidden component.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFamily {
    pub p: Vec<FactorFunction>,
    pub q: Vec<FactorFunction>,
    pub p_tilde: Vec<FactorFunction>,
    pub q_tilde: Vec<FactorFunction>,
}

impl ScalingFamily {
    /// Family of constant factors from four coefficient vectors.
    pub fn constants(p: &[f64], q: &[f64], p_tilde: &[f64], q_tilde: &[f64]) -> Self {
        let lift = |v: &[f64]| v.iter().copied().map(FactorFunction::constant).collect();
        Self {
            p: lift(p),
            q: lift(q),
            p_tilde: lift(p_tilde),
            q_tilde: lift(q_tilde),
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    fn lists(&self) -> [(&'static str, &[FactorFunction]); 4] {
        [
            ("p", &self.p),
            ("q", &self.q),
            ("p_tilde", &self.p_tilde),
            ("q_tilde", &self.q_tilde),
        ]
    }

    /// Sup norms of all four factors on subinterval `i` of `data`.
    pub fn norms(&self, data: &ExtendedDataSet, i: usize) -> FactorNorms {
        let (lo, hi) = data.interval(i);
        FactorNorms {
            p: self.p[i - 1].sup_norm(lo, hi),
            q: self.q[i - 1].sup_norm(lo, hi),
            p_tilde: self.p_tilde[i - 1].sup_norm(lo, hi),
            q_tilde: self.q_tilde[i - 1].sup_norm(lo, hi),
        }
    }
}

/// Sup-norm bounds for the four factors on one subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorNorms {
    pub p: f64,
    pub q: f64,
    pub p_tilde: f64,
    pub q_tilde: f64,
}

/// Checks every construction hypothesis on the triple and reports the
/// aggregate contraction norm: the max over intervals of
/// `max(|p_i| + |p~_i|, |q_i| + |q~_i|)` in sup norm.
///
/// Under [`ContractionMode::Strict`] each per-interval sum must stay below 1
/// (with slack [`SBAR_SLACK`]); relaxed mode only computes the aggregate.
pub fn validate(
    data: &ExtendedDataSet,
    sig: &Signature,
    fam: &ScalingFamily,
    mode: ContractionMode,
) -> Result<f64, ModelError> {
    let n = data.n();
    if sig.len() != n {
        return Err(ModelError::LengthMismatch {
            what: "signature",
            got: sig.len(),
            expected: n,
        });
    }
    for (what, list) in fam.lists() {
        if list.len() != n {
            return Err(ModelError::LengthMismatch {
                what,
                got: list.len(),
                expected: n,
            });
        }
        if let Some(index) = list.iter().position(|f| !f.is_finite()) {
            return Err(ModelError::NonFiniteValue { what, index });
        }
    }
    let mut sbar: f64 = 0.0;
    for i in 1..=n {
        let norms = fam.norms(data, i);
        let sum_p = norms.p + norms.p_tilde;
        let sum_q = norms.q + norms.q_tilde;
        if mode == ContractionMode::Strict {
            if sum_p > 1.0 - SBAR_SLACK {
                return Err(ModelError::ContractionViolation {
                    interval: i,
                    which: "p + p_tilde",
                    sum: sum_p,
                });
            }
            if sum_q > 1.0 - SBAR_SLACK {
                return Err(ModelError::ContractionViolation {
                    interval: i,
                    which: "q + q_tilde",
                    sum: sum_q,
                });
            }
        }
        sbar = sbar.max(sum_p).max(sum_q);
    }
    Ok(sbar)
}
