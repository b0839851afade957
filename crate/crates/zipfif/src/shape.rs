//! Closed-form feasibility intervals on the vertical scaling factors that
//! guarantee a geometric property of the rendered interpolant: containment
//! in a rectangle, positivity, or staying above/below/between prescribed
//! piecewise lines.
//!
//! The bounds are sequential: the interval for `q` consumes the chosen
//! extremes of `p`, the `p_tilde` interval consumes `p` and the mixing
//! parameter `omega`, and `q_tilde` consumes `q` and `p_tilde`.

use crate::error::ShapeError;
use crate::model::{ExtendedDataSet, FactorNorms, ScalingFamily, Signature};
use crate::system::ZipperSystem;

/// Default mixing parameter when the caller does not pick one. Must satisfy
/// `sbar < omega < 1` for the tilde-stage bounds to be meaningful.
pub const DEFAULT_OMEGA: f64 = 0.975;

/// Admissible range for one scaling factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_strict: bool,
    pub hi_strict: bool,
}

impl FeasibleInterval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_strict || self.hi_strict))
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_strict { v > self.lo } else { v >= self.lo };
        let below = if self.hi_strict { v < self.hi } else { v <= self.hi };
        above && below
    }

    /// Covers the whole closed range `[min, max]`.
    pub fn contains_range(&self, min: f64, max: f64) -> bool {
        self.contains(min) && self.contains(max)
    }
}

/// One straight line `y = slope * x + intercept` attached to a subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Per-subinterval chord slopes of the data polygon.
pub fn chord_slopes(data: &ExtendedDataSet) -> Vec<f64> {
    let x = data.knots();
    let y = data.y();
    (1..=data.n())
        .map(|i| (y[i] - y[i - 1]) / (x[i] - x[i - 1]))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeMode {
    /// Keep the visible graph inside `I x [k1, k2]` (and the hidden one
    /// inside `I x [k1_tilde, k2_tilde]`).
    Rectangle {
        k1: f64,
        k2: f64,
        k1_tilde: f64,
        k2_tilde: f64,
    },
    /// Keep both components nonnegative; data must be nonnegative.
    Positivity,
    /// Lines sit below the data; guarantee the curve stays above them.
    LinesBelow { lines: Vec<Line> },
    /// Lines sit above the data; guarantee the curve stays below them.
    LinesAbove { lines: Vec<Line> },
    /// A band of lines around the data; keep the curve inside the band.
    LinesBetween { lower: Vec<Line>, upper: Vec<Line> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub mode: ShapeMode,
    pub omega: f64,
}

impl ShapeSpec {
    /// Checks the constraint geometry against the data: the rectangle must
    /// strictly contain it, positivity needs nonnegative data, lines must
    /// leave a positive gap at every knot.
    pub fn validate(&self, data: &ExtendedDataSet) -> Result<(), ShapeError> {
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(ShapeError::SpecViolation(format!(
                "omega = {} must lie in (0, 1)",
                self.omega
            )));
        }
        let n = data.n();
        let check_len = |lines: &[Line], what: &str| {
            if lines.len() != n {
                return Err(ShapeError::SpecViolation(format!(
                    "{what}: got {} lines, expected {n}",
                    lines.len()
                )));
            }
            Ok(())
        };
        match &self.mode {
            ShapeMode::Rectangle { k1, k2, k1_tilde, k2_tilde } => {
                let (ymin, ymax) = min_max(data.y());
                let (zmin, zmax) = min_max(data.z());
                if !(*k1 < ymin && *k2 > ymax && *k1_tilde < zmin && *k2_tilde > zmax) {
                    return Err(ShapeError::SpecViolation(format!(
                        "rectangle [{k1}, {k2}] x [{k1_tilde}, {k2_tilde}] must strictly contain the data"
                    )));
                }
            }
            ShapeMode::Positivity => {
                if data.y().iter().chain(data.z()).any(|&v| v < 0.0) {
                    return Err(ShapeError::SpecViolation(
                        "positivity needs nonnegative y and z data".into(),
                    ));
                }
            }
            ShapeMode::LinesBelow { lines } => {
                check_len(lines, "lower lines")?;
                gaps_above(data, lines)?;
            }
            ShapeMode::LinesAbove { lines } => {
                check_len(lines, "upper lines")?;
                gaps_below(data, lines)?;
            }
            ShapeMode::LinesBetween { lower, upper } => {
                check_len(lower, "lower lines")?;
                check_len(upper, "upper lines")?;
                gaps_above(data, lower)?;
                gaps_below(data, upper)?;
            }
        }
        Ok(())
    }
}

/// Chosen or admissible extremes of one factor on one subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
}

impl Extremes {
    pub fn at(v: f64) -> Self {
        Self { min: v, max: v }
    }
}

/// Which factor is being bounded, with the previously fixed extremes the
/// bound consumes (one entry per subinterval).
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    P,
    Q { p: Vec<Extremes> },
    PTilde { p: Vec<Extremes> },
    QTilde { q: Vec<Extremes>, p_tilde: Vec<Extremes> },
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::P => "p",
            Stage::Q { .. } => "q",
            Stage::PTilde { .. } => "p_tilde",
            Stage::QTilde { .. } => "q_tilde",
        }
    }
}

/// Auxiliary constants consumed by the positivity and line bounds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlopeAuxiliaries {
    /// Extreme values of the lower lines over the knots (line modes only).
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    /// Magnitude bound on both components from the factor norms.
    pub m_bound: Option<f64>,
    /// Hidden-component bound when the data sits above lower lines.
    pub k_tilde: Option<f64>,
    /// Hidden-component bound when the data sits below upper lines.
    pub l_tilde: Option<f64>,
    /// Envelope bound on the visible component, when a family is known.
    pub u_bound: Option<f64>,
}

/// Evaluates the auxiliary constants applicable to the spec mode. Factor
/// norms (from a concrete family or candidate bounds) enable the magnitude
/// bound; `u_bound` is the envelope half-width of a constructed system.
pub fn compute_slope_aux(
    data: &ExtendedDataSet,
    norms: Option<&[FactorNorms]>,
    u_bound: Option<f64>,
    spec: &ShapeSpec,
) -> Result<SlopeAuxiliaries, ShapeError> {
    spec.validate(data)?;
    let mut aux = SlopeAuxiliaries {
        u_bound,
        ..Default::default()
    };

    if let Some(norms) = norms {
        let omega_sum = norms
            .iter()
            .map(|nm| nm.p.max(nm.q) + nm.p_tilde.max(nm.q_tilde))
            .fold(0.0_f64, f64::max);
        // Norm sums at or above 1 leave the magnitude bound undefined; the
        // stages that need it report that when asked.
        if omega_sum < 1.0 {
            let (_, max_y) = min_max(data.y());
            let (_, max_z) = min_max(data.z());
            let anchor = end_min(data.y()) + end_min(data.z());
            aux.m_bound = Some((max_y + max_z - omega_sum * anchor) / (1.0 - omega_sum));
        }
    }

    // Lower-line extremes over the knots; the upper-line-only mode falls
    // back to the only lines it has.
    let scan_lines = |lines: &[Line]| {
        let x = data.knots();
        let mut vals: Vec<f64> = lines
            .iter()
            .enumerate()
            .map(|(k, l)| l.eval(x[k]))
            .collect();
        vals.push(lines[lines.len() - 1].eval(x[data.n()]));
        min_max(&vals)
    };
    let line_extremes = match &spec.mode {
        ShapeMode::LinesBelow { lines } => Some(scan_lines(lines)),
        ShapeMode::LinesBetween { lower, .. } => Some(scan_lines(lower)),
        ShapeMode::LinesAbove { lines } => Some(scan_lines(lines)),
        _ => None,
    };
    if let Some((y_min, y_max)) = line_extremes {
        aux.y_min = Some(y_min);
        aux.y_max = Some(y_max);
        let sums: Vec<f64> = data
            .y()
            .iter()
            .zip(data.z())
            .map(|(&y, &z)| (y + z).abs())
            .collect();
        let peak = sums.iter().fold(0.0_f64, |m, &v| m.max(v));
        let anchor = sums[0].min(sums[data.n()]);
        let w = spec.omega;
        aux.k_tilde = Some((peak - w * anchor - (1.0 - w) * y_min) / (1.0 - w));
        if let Some(u) = u_bound {
            aux.l_tilde = Some((peak - w * anchor - (1.0 - w) * u) / (1.0 - w));
        }
    }
    Ok(aux)
}

/// Per-subinterval factor bounds that keep the visible graph inside
/// `I x [k1, k2]` (rectangle mode).
pub fn rectangle_intervals(
    data: &ExtendedDataSet,
    spec: &ShapeSpec,
    stage: &Stage,
) -> Result<Vec<FeasibleInterval>, ShapeError> {
    spec.validate(data)?;
    let ShapeMode::Rectangle { k1, k2, k1_tilde, k2_tilde } = spec.mode else {
        return Err(ShapeError::SpecViolation(
            "rectangle bounds need a rectangle spec".into(),
        ));
    };
    let y = data.y();
    let z = data.z();
    let n = data.n();
    let w = spec.omega;
    let (ymin0n, ymax0n) = (end_min(y), end_max(y));
    let zmax0n = end_max(z);
    check_given(stage, n)?;

    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let pair_min = y[i - 1].min(y[i]);
        let pair_max = y[i - 1].max(y[i]);
        // Room between the data chord cell and the rectangle walls, scaled
        // by the worst-case reach of the endpoint blend.
        let lower_room = pair_min - k1;
        let upper_room = k2 - pair_max;
        let itv = match stage {
            Stage::P => FeasibleInterval {
                lo: -(lower_room / (k2 - ymin0n)).min(upper_room / (ymax0n - k1)),
                hi: (lower_room / (ymax0n - k1)).min(upper_room / (k2 - ymin0n)),
                lo_strict: true,
                hi_strict: true,
            },
            Stage::Q { p } => {
                let e = p[i - 1];
                let num1 = lower_room
                    - max4(
                        e.max * (y[0] - k1),
                        e.max * (y[n] - k1),
                        -e.min * (k2 - y[0]),
                        -e.min * (k2 - y[n]),
                    );
                let num2 = upper_room
                    - max4(
                        e.max * (k2 - y[0]),
                        e.max * (k2 - y[n]),
                        -e.min * (y[0] - k1),
                        -e.min * (y[n] - k1),
                    );
                FeasibleInterval {
                    lo: -(num1 / (k2_tilde - zmax0n)).min(num2 / (zmax0n - k1_tilde)),
                    hi: (num1 / (zmax0n - k1_tilde)).min(num2 / (k2_tilde - zmax0n)),
                    lo_strict: false,
                    hi_strict: false,
                }
            }
            Stage::PTilde { p } => {
                let e = p[i - 1];
                FeasibleInterval {
                    lo: -min4(
                        w - e.max,
                        w + e.min,
                        lower_room / (k2 - ymin0n),
                        upper_room / (ymax0n - k1),
                    ),
                    hi: min4(
                        w - e.max,
                        w + e.min,
                        lower_room / (ymax0n - k1),
                        upper_room / (k2 - ymin0n),
                    ),
                    lo_strict: true,
                    hi_strict: true,
                }
            }
            Stage::QTilde { q, p_tilde } => {
                let eq = q[i - 1];
                let ep = p_tilde[i - 1];
                let num1 = lower_room
                    - max4(
                        ep.max * (y[0] - k1),
                        ep.max * (y[n] - k1),
                        -ep.min * (k2 - y[0]),
                        -ep.min * (k2 - y[n]),
                    );
                let num2 = upper_room
                    - max4(
                        ep.max * (k2 - y[0]),
                        ep.max * (k2 - y[n]),
                        -ep.min * (y[0] - k1),
                        -ep.min * (y[n] - k1),
                    );
                FeasibleInterval {
                    lo: -min4(
                        w - eq.max,
                        w + eq.min,
                        num1 / (k2_tilde - zmax0n),
                        num2 / (zmax0n - k1_tilde),
                    ),
                    hi: min4(
                        w - eq.max,
                        w + eq.min,
                        num1 / (zmax0n - k1_tilde),
                        num2 / (k2_tilde - zmax0n),
                    ),
                    lo_strict: false,
                    hi_strict: false,
                }
            }
        };
        out.push(itv);
    }
    Ok(out)
}

/// Per-subinterval bounds that keep both components nonnegative.
pub fn positivity_intervals(
    data: &ExtendedDataSet,
    spec: &ShapeSpec,
    stage: &Stage,
    aux: &SlopeAuxiliaries,
) -> Result<Vec<FeasibleInterval>, ShapeError> {
    spec.validate(data)?;
    if !matches!(spec.mode, ShapeMode::Positivity) {
        return Err(ShapeError::SpecViolation(
            "positivity bounds need a positivity spec".into(),
        ));
    }
    let m = aux.m_bound.ok_or_else(|| {
        ShapeError::DenominatorCollapse("positivity bounds need the magnitude bound".into())
    })?;
    let y = data.y();
    let z = data.z();
    let n = data.n();
    let w = spec.omega;
    let (ymin0n, ymax0n) = (end_min(y), end_max(y));
    let (zmin0n, zmax0n) = (end_min(z), end_max(z));
    if m <= ymin0n || m <= zmin0n {
        return Err(ShapeError::DenominatorCollapse(format!(
            "magnitude bound {m} does not clear the endpoint data"
        )));
    }
    check_given(stage, n)?;

    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let pair_min = y[i - 1].min(y[i]);
        let itv = match stage {
            Stage::P => FeasibleInterval {
                lo: -pair_min / (m - ymin0n),
                hi: pair_min / ymax0n,
                lo_strict: true,
                hi_strict: true,
            },
            Stage::Q { p } => {
                let e = p[i - 1];
                FeasibleInterval {
                    lo: -((pair_min + e.min * (m - ymin0n)) / (m - zmin0n))
                        .min((pair_min - e.max * ymin0n) / (m - zmin0n)),
                    hi: ((pair_min - e.max * ymax0n) / zmax0n)
                        .min((pair_min + e.min * (m - ymax0n)) / zmax0n),
                    lo_strict: false,
                    hi_strict: false,
                }
            }
            Stage::PTilde { p } => {
                let e = p[i - 1];
                FeasibleInterval {
                    lo: -min3(w - e.max, w + e.min, pair_min / (m - ymin0n)),
                    hi: min3(w - e.max, w + e.min, pair_min / ymax0n),
                    lo_strict: true,
                    hi_strict: true,
                }
            }
            Stage::QTilde { q, p_tilde } => {
                let eq = q[i - 1];
                let ep = p_tilde[i - 1];
                FeasibleInterval {
                    lo: -min4(
                        w - eq.max,
                        w + eq.min,
                        (pair_min + ep.min * (m - ymin0n)) / (m - zmin0n),
                        (pair_min - ep.max * ymin0n) / (m - zmin0n),
                    ),
                    hi: min4(
                        w - eq.max,
                        w + eq.min,
                        (pair_min - ep.max * ymax0n) / zmax0n,
                        (pair_min + ep.min * (m - ymax0n)) / zmax0n,
                    ),
                    lo_strict: false,
                    hi_strict: false,
                }
            }
        };
        out.push(itv);
    }
    Ok(out)
}

/// Options for the line-constraint bounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct SlopeOptions {
    /// The above-lines `q` upper bound mixes the magnitude bound into one
    /// numerator as printed in its source; enabling this substitutes the
    /// envelope bound, which is what the underlying estimate actually uses.
    pub envelope_in_q_max: bool,
}

/// Per-subinterval bounds that keep the visible graph above, below, or
/// between the spec's piecewise lines.
pub fn slope_intervals(
    data: &ExtendedDataSet,
    spec: &ShapeSpec,
    stage: &Stage,
    aux: &SlopeAuxiliaries,
    opts: SlopeOptions,
) -> Result<Vec<FeasibleInterval>, ShapeError> {
    spec.validate(data)?;
    let n = data.n();
    let w = spec.omega;
    let y = data.y();
    let z = data.z();
    let (ymin0n, ymax0n) = (end_min(y), end_max(y));
    let (zmin0n, zmax0n) = (end_min(z), end_max(z));
    check_given(stage, n)?;

    let need = |v: Option<f64>, what: &str| {
        v.ok_or_else(|| ShapeError::DenominatorCollapse(format!("missing auxiliary {what}")))
    };

    // Tilde stages only depend on omega and the previous extremes.
    let tilde = |given: &[Extremes]| -> Vec<FeasibleInterval> {
        (1..=n)
            .map(|i| {
                let e = given[i - 1];
                let cap = (w - e.max).min(w + e.min);
                FeasibleInterval {
                    lo: -cap,
                    hi: cap,
                    lo_strict: false,
                    hi_strict: false,
                }
            })
            .collect()
    };
    match stage {
        Stage::PTilde { p } => return Ok(tilde(p)),
        Stage::QTilde { q, .. } => return Ok(tilde(q)),
        _ => {}
    }

    let mut out = Vec::with_capacity(n);
    match &spec.mode {
        ShapeMode::LinesBelow { lines } => {
            let g = gaps_above(data, lines)?;
            let u = need(aux.u_bound, "envelope bound")?;
            let y_min = need(aux.y_min, "line minimum")?;
            let k_tilde = need(aux.k_tilde, "hidden bound (above lower lines)")?;
            for i in 1..=n {
                let gap = g[i - 1];
                let itv = match stage {
                    Stage::P => FeasibleInterval {
                        lo: -gap / (u - ymin0n),
                        hi: gap / (ymax0n - y_min),
                        lo_strict: true,
                        hi_strict: true,
                    },
                    Stage::Q { p } => {
                        let e = p[i - 1];
                        let m_or_u = if opts.envelope_in_q_max {
                            u
                        } else {
                            need(aux.m_bound, "magnitude bound")?
                        };
                        FeasibleInterval {
                            lo: -((gap + e.min * (u - ymin0n)) / (k_tilde - zmin0n))
                                .min((gap - e.max * (ymax0n - y_min)) / (k_tilde - zmin0n)),
                            hi: ((gap - e.max * (ymax0n - y_min)) / (zmax0n + k_tilde))
                                .min((gap + e.min * (m_or_u - ymin0n)) / (zmax0n + k_tilde)),
                            lo_strict: false,
                            hi_strict: false,
                        }
                    }
                    _ => unreachable!(),
                };
                out.push(itv);
            }
        }
        ShapeMode::LinesAbove { lines } => {
            let g = gaps_below(data, lines)?;
            let u = need(aux.u_bound, "envelope bound")?;
            let y_max = need(aux.y_max, "line maximum")?;
            let l_tilde = need(aux.l_tilde, "hidden bound (below upper lines)")?;
            for i in 1..=n {
                let gap = g[i - 1];
                let itv = match stage {
                    Stage::P => FeasibleInterval {
                        lo: -gap / (u + ymax0n),
                        hi: gap / (y_max - ymin0n),
                        lo_strict: true,
                        hi_strict: true,
                    },
                    Stage::Q { p } => {
                        let e = p[i - 1];
                        FeasibleInterval {
                            lo: -((gap + e.min * (u + ymax0n)) / (zmax0n + l_tilde))
                                .min((gap - e.max * (y_max - ymin0n)) / (zmax0n + l_tilde)),
                            hi: ((gap + e.min * (ymax0n + u)) / (l_tilde - zmin0n))
                                .min((gap - e.max * (y_max - ymin0n)) / (l_tilde - zmin0n)),
                            lo_strict: false,
                            hi_strict: false,
                        }
                    }
                    _ => unreachable!(),
                };
                out.push(itv);
            }
        }
        ShapeMode::LinesBetween { lower, upper } => {
            let g1 = gaps_above(data, lower)?;
            let g2 = gaps_below(data, upper)?;
            let y_min = need(aux.y_min, "line minimum")?;
            let y_max = need(aux.y_max, "line maximum")?;
            let k_tilde = need(aux.k_tilde, "hidden bound (between lines)")?;
            for i in 1..=n {
                let (ga, gb) = (g1[i - 1], g2[i - 1]);
                let reach_up = y_max - ymin0n;
                let reach_down = ymax0n - y_min;
                let itv = match stage {
                    Stage::P => FeasibleInterval {
                        lo: -(ga / reach_up).min(gb / reach_down),
                        hi: (ga / reach_down).min(gb / reach_up),
                        lo_strict: true,
                        hi_strict: true,
                    },
                    Stage::Q { p } => {
                        let e = p[i - 1];
                        FeasibleInterval {
                            lo: -min4(
                                (ga + e.min * reach_up) / (k_tilde - zmin0n),
                                (gb + e.min * reach_down) / (zmax0n - k_tilde),
                                (ga - e.max * reach_down) / (k_tilde - zmin0n),
                                (gb - e.max * reach_up) / (zmax0n - k_tilde),
                            ),
                            hi: min4(
                                (ga - e.max * reach_down) / (zmax0n - k_tilde),
                                (gb - e.max * reach_up) / (k_tilde - zmin0n),
                                (ga + e.min * reach_up) / (zmax0n - k_tilde),
                                (gb + e.min * reach_down) / (k_tilde - zmin0n),
                            ),
                            lo_strict: false,
                            hi_strict: false,
                        }
                    }
                    _ => unreachable!(),
                };
                out.push(itv);
            }
        }
        _ => {
            return Err(ShapeError::SpecViolation(
                "line bounds need a line-constraint spec".into(),
            ))
        }
    }
    Ok(out)
}

/// One factor value range checked against its feasibility interval.
#[derive(Debug, Clone)]
pub struct FactorCheck {
    pub interval: usize,
    pub factor: &'static str,
    pub value_min: f64,
    pub value_max: f64,
    pub bound: FeasibleInterval,
    pub pass: bool,
    /// Which side binds when the check fails.
    pub binding: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct FamilyCheckReport {
    pub rows: Vec<FactorCheck>,
}

impl FamilyCheckReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Re-evaluates every stage of the spec's bounds against the concrete
/// factors of `fam`, using the family's own extremes as the given values of
/// earlier stages.
pub fn check_family(
    data: &ExtendedDataSet,
    sig: &Signature,
    fam: &ScalingFamily,
    spec: &ShapeSpec,
) -> Result<FamilyCheckReport, ShapeError> {
    spec.validate(data)?;
    let n = data.n();
    let ranges = |list: &[crate::model::FactorFunction]| -> Vec<Extremes> {
        (1..=n)
            .map(|i| {
                let (lo, hi) = data.interval(i);
                let (min, max) = list[i - 1].range(lo, hi);
                Extremes { min, max }
            })
            .collect()
    };
    let p = ranges(&fam.p);
    let q = ranges(&fam.q);
    let pt = ranges(&fam.p_tilde);
    let qt = ranges(&fam.q_tilde);

    let norms: Vec<FactorNorms> = (1..=n).map(|i| fam.norms(data, i)).collect();
    let u_bound = ZipperSystem::new(
        data.clone(),
        sig.clone(),
        fam.clone(),
        crate::model::ContractionMode::Strict,
    )
    .ok()
    .and_then(|s| s.envelope())
    .map(|e| e.u);
    let aux = compute_slope_aux(data, Some(&norms), u_bound, spec)?;
    // The magnitude bound collapses when the factor-norm sums reach 1; the
    // envelope bound serves the same role in the q-stage numerator.
    let opts = SlopeOptions {
        envelope_in_q_max: aux.m_bound.is_none() && aux.u_bound.is_some(),
    };

    let stages: [(&'static str, Stage, &Vec<Extremes>); 4] = [
        ("p", Stage::P, &p),
        ("q", Stage::Q { p: p.clone() }, &q),
        ("p_tilde", Stage::PTilde { p: p.clone() }, &pt),
        (
            "q_tilde",
            Stage::QTilde {
                q: q.clone(),
                p_tilde: pt.clone(),
            },
            &qt,
        ),
    ];
    let mut report = FamilyCheckReport::default();
    for (name, stage, values) in stages {
        let bounds = match &spec.mode {
            ShapeMode::Rectangle { .. } => rectangle_intervals(data, spec, &stage)?,
            ShapeMode::Positivity => positivity_intervals(data, spec, &stage, &aux)?,
            _ => slope_intervals(data, spec, &stage, &aux, opts)?,
        };
        for i in 1..=n {
            let e = values[i - 1];
            let bound = bounds[i - 1];
            let pass = bound.contains_range(e.min, e.max);
            let binding = if pass {
                None
            } else if !bound.contains(e.min) {
                Some(format!("lower bound {}", bound.lo))
            } else {
                Some(format!("upper bound {}", bound.hi))
            };
            report.rows.push(FactorCheck {
                interval: i,
                factor: name,
                value_min: e.min,
                value_max: e.max,
                bound,
                pass,
                binding,
            });
        }
    }
    Ok(report)
}

fn check_given(stage: &Stage, n: usize) -> Result<(), ShapeError> {
    let lens: &[usize] = match stage {
        Stage::P => &[],
        Stage::Q { p } => &[p.len()],
        Stage::PTilde { p } => &[p.len()],
        Stage::QTilde { q, p_tilde } => &[q.len(), p_tilde.len()],
    };
    if lens.iter().any(|&l| l != n) {
        return Err(ShapeError::SpecViolation(format!(
            "given extremes must have one entry per subinterval ({n})"
        )));
    }
    Ok(())
}

/// Positive gaps between the data chord and per-interval lower lines,
/// evaluated at both interval endpoints (the blend/line difference is affine
/// there, so endpoint gaps bound it exactly).
fn gaps_above(data: &ExtendedDataSet, lines: &[Line]) -> Result<Vec<f64>, ShapeError> {
    let x = data.knots();
    let y = data.y();
    (1..=data.n())
        .map(|i| {
            let l = lines[i - 1];
            let g = (y[i - 1] - l.eval(x[i - 1])).min(y[i] - l.eval(x[i]));
            if g <= 0.0 {
                Err(ShapeError::SpecViolation(format!(
                    "data does not sit strictly above the lower line on subinterval {i}"
                )))
            } else {
                Ok(g)
            }
        })
        .collect()
}

fn gaps_below(data: &ExtendedDataSet, lines: &[Line]) -> Result<Vec<f64>, ShapeError> {
    let x = data.knots();
    let y = data.y();
    (1..=data.n())
        .map(|i| {
            let l = lines[i - 1];
            let g = (l.eval(x[i - 1]) - y[i - 1]).min(l.eval(x[i]) - y[i]);
            if g <= 0.0 {
                Err(ShapeError::SpecViolation(format!(
                    "data does not sit strictly below the upper line on subinterval {i}"
                )))
            } else {
                Ok(g)
            }
        })
        .collect()
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

fn end_min(v: &[f64]) -> f64 {
    v[0].min(v[v.len() - 1])
}

fn end_max(v: &[f64]) -> f64 {
    v[0].max(v[v.len() - 1])
}

fn max4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.max(b).max(c).max(d)
}

fn min3(a: f64, b: f64, c: f64) -> f64 {
    a.min(b).min(c)
}

fn min4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.min(b).min(c).min(d)
}
