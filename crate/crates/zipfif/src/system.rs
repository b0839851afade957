//! Construction of the full interpolation system: affine interval maps,
//! shear maps with their offset functions, the invariant envelope rectangle
//! in (y, z) space, and the contraction constants that make the system
//! hyperbolic.

use crate::error::SystemError;
use crate::model::{
    validate, ContractionMode, ExtendedDataSet, FactorFunction, ScalingFamily, Signature,
};

/// Envelope rectangle `[-u, u] x [-u_tilde, u_tilde]` invariant under every
/// shear map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub u: f64,
    pub u_tilde: f64,
}

/// Metric weight `theta` and contraction factor `kappa < 1` for the metric
/// `|dx| + theta (|dy| + |dz|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub theta: f64,
    pub kappa: f64,
}

/// A quadratic `c0 + c1 x + c2 x^2`, used for the offset functions, which
/// are quadratic in x when the factors are affine.
#[derive(Debug, Clone, Copy)]
struct Quadratic {
    c: [f64; 3],
}

impl Quadratic {
    fn eval(&self, x: f64) -> f64 {
        (self.c[2] * x + self.c[1]) * x + self.c[0]
    }

    /// Exact sup of |self| over [lo, hi]: endpoints plus interior vertex.
    fn sup_abs(&self, lo: f64, hi: f64) -> f64 {
        let mut m = self.eval(lo).abs().max(self.eval(hi).abs());
        if self.c[2] != 0.0 {
            let v = -self.c[1] / (2.0 * self.c[2]);
            if v > lo && v < hi {
                m = m.max(self.eval(v).abs());
            }
        }
        m
    }

    /// Lipschitz constant over [lo, hi]: the derivative is affine, so its
    /// absolute maximum sits at an endpoint.
    fn lipschitz(&self, lo: f64, hi: f64) -> f64 {
        let d = |x: f64| 2.0 * self.c[2] * x + self.c[1];
        d(lo).abs().max(d(hi).abs())
    }
}

/// `c0 + c1 x` with quadratic-producing multiplication.
#[derive(Debug, Clone, Copy)]
struct Affine {
    c0: f64,
    c1: f64,
}

impl Affine {
    fn mul(&self, other: &Affine) -> Quadratic {
        Quadratic {
            c: [
                self.c0 * other.c0,
                self.c0 * other.c1 + self.c1 * other.c0,
                self.c1 * other.c1,
            ],
        }
    }
}

/// Fully derived zipper hidden-variable system.
#[derive(Debug, Clone)]
pub struct ZipperSystem {
    data: ExtendedDataSet,
    sig: Signature,
    fam: ScalingFamily,
    mode: ContractionMode,
    a: Vec<f64>,
    b: Vec<f64>,
    big_a: f64,
    sbar: f64,
    sup_r: Vec<f64>,
    sup_r_tilde: Vec<f64>,
    envelope: Option<Envelope>,
    contraction: Option<Contraction>,
}

/// Slopes and intercepts of the interval maps `L_i(x) = a_i x + b_i` mapping
/// the whole domain onto subinterval i, with orientation chosen per the
/// signature.
pub fn build_interval_maps(data: &ExtendedDataSet, sig: &Signature) -> (Vec<f64>, Vec<f64>) {
    let x = data.knots();
    let n = data.n();
    let span = data.xn() - data.x0();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 1..=n {
        let e = sig.eps(i);
        let left = x[i - 1 + e]; // image of x_0
        let right = x[i - e]; // image of x_n
        a.push((right - left) / span);
        b.push((left * data.xn() - right * data.x0()) / span);
    }
    (a, b)
}

impl ZipperSystem {
    pub fn new(
        data: ExtendedDataSet,
        sig: Signature,
        fam: ScalingFamily,
        mode: ContractionMode,
    ) -> Result<Self, SystemError> {
        let sbar = validate(&data, &sig, &fam, mode)?;
        let (a, b) = build_interval_maps(&data, &sig);
        let big_a = a.iter().fold(0.0_f64, |m, &ai| m.max(ai.abs()));

        let mut sys = Self {
            data,
            sig,
            fam,
            mode,
            a,
            b,
            big_a,
            sbar,
            sup_r: Vec::new(),
            sup_r_tilde: Vec::new(),
            envelope: None,
            contraction: None,
        };
        for i in 1..=sys.n() {
            let (r, rt) = sys.offset_polys(i);
            let (lo, hi) = (sys.data.x0(), sys.data.xn());
            sys.sup_r.push(r.sup_abs(lo, hi));
            sys.sup_r_tilde.push(rt.sup_abs(lo, hi));
        }
        sys.envelope = sys.compute_envelope()?;
        sys.contraction = sys.compute_contraction();
        Ok(sys)
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn data(&self) -> &ExtendedDataSet {
        &self.data
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn fam(&self) -> &ScalingFamily {
        &self.fam
    }

    pub fn mode(&self) -> ContractionMode {
        self.mode
    }

    pub fn slopes(&self) -> &[f64] {
        &self.a
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.b
    }

    /// Max absolute interval-map slope.
    pub fn big_a(&self) -> f64 {
        self.big_a
    }

    pub fn sbar(&self) -> f64 {
        self.sbar
    }

    /// Sup norms of the offset pair on interval i.
    pub fn offset_norms(&self, i: usize) -> (f64, f64) {
        (self.sup_r[i - 1], self.sup_r_tilde[i - 1])
    }

    /// None only in relaxed mode when the envelope denominator degenerates.
    pub fn envelope(&self) -> Option<Envelope> {
        self.envelope
    }

    pub fn contraction(&self) -> Option<Contraction> {
        self.contraction
    }

    pub fn l(&self, i: usize, x: f64) -> f64 {
        self.a[i - 1] * x + self.b[i - 1]
    }

    pub fn l_inv(&self, i: usize, x: f64) -> f64 {
        (x - self.b[i - 1]) / self.a[i - 1]
    }

    fn check_domain(&self, x: f64) -> Result<(), SystemError> {
        let (lo, hi) = (self.data.x0(), self.data.xn());
        let slack = 1e-12 * (hi - lo);
        if x < lo - slack || x > hi + slack {
            return Err(SystemError::XOutOfDomain { x, lo, hi });
        }
        Ok(())
    }

    /// Index i with x in `[x_{i-1}, x_i)`, the last interval being closed.
    pub fn interval_index(&self, x: f64) -> Result<usize, SystemError> {
        self.check_domain(x)?;
        let knots = self.data.knots();
        let i = match knots.partition_point(|&k| k <= x) {
            0 => 1,
            j if j > self.n() => self.n(),
            j => j,
        };
        Ok(i)
    }

    fn mu(&self, x: f64) -> f64 {
        (x - self.data.x0()) / (self.data.xn() - self.data.x0())
    }

    /// Factor matrix `[[p, q], [p~, q~]]` on interval i evaluated at `t` in
    /// the subinterval (t = L_i(x)).
    pub fn factor_matrix(&self, i: usize, t: f64) -> [[f64; 2]; 2] {
        [
            [self.fam.p[i - 1].eval(t), self.fam.q[i - 1].eval(t)],
            [self.fam.p_tilde[i - 1].eval(t), self.fam.q_tilde[i - 1].eval(t)],
        ]
    }

    /// Offset pair (r_i(x), r~_i(x)) for x in the whole domain.
    pub fn eval_offsets(&self, i: usize, x: f64) -> Result<(f64, f64), SystemError> {
        self.check_domain(x)?;
        let mu = self.mu(x);
        let y = self.data.y();
        let z = self.data.z();
        let e = self.sig.eps(i);
        let ends_y = mu * y[i - e] + (1.0 - mu) * y[i - 1 + e];
        let ends_z = mu * z[i - e] + (1.0 - mu) * z[i - 1 + e];
        let blend_y = mu * y[self.n()] + (1.0 - mu) * y[0];
        let blend_z = mu * z[self.n()] + (1.0 - mu) * z[0];
        let t = self.l(i, x);
        let m = self.factor_matrix(i, t);
        Ok((
            ends_y - m[0][0] * blend_y - m[0][1] * blend_z,
            ends_z - m[1][0] * blend_y - m[1][1] * blend_z,
        ))
    }

    /// Shear map image `(F_{i,1}, F_{i,2})(x, y, z)`.
    pub fn eval_f(&self, i: usize, x: f64, y: f64, z: f64) -> Result<(f64, f64), SystemError> {
        self.check_domain(x)?;
        let mu = self.mu(x);
        let yy = self.data.y();
        let zz = self.data.z();
        let e = self.sig.eps(i);
        let blend_y = mu * yy[self.n()] + (1.0 - mu) * yy[0];
        let blend_z = mu * zz[self.n()] + (1.0 - mu) * zz[0];
        let ends_y = mu * yy[i - e] + (1.0 - mu) * yy[i - 1 + e];
        let ends_z = mu * zz[i - e] + (1.0 - mu) * zz[i - 1 + e];
        let t = self.l(i, x);
        let m = self.factor_matrix(i, t);
        let dy = y - blend_y;
        let dz = z - blend_z;
        Ok((
            m[0][0] * dy + m[0][1] * dz + ends_y,
            m[1][0] * dy + m[1][1] * dz + ends_z,
        ))
    }

    /// Full map `(x, y, z) -> (L_i(x), F_i(x, y, z))` with the two domain
    /// endpoints snapped to exact knot data (join-up is exact there).
    pub fn omega(&self, i: usize, point: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = point;
        let knots = self.data.knots();
        let yy = self.data.y();
        let zz = self.data.z();
        let e = self.sig.eps(i);
        if x == self.data.x0() && y == yy[0] && z == zz[0] {
            return [knots[i - 1 + e], yy[i - 1 + e], zz[i - 1 + e]];
        }
        if x == self.data.xn() && y == yy[self.n()] && z == zz[self.n()] {
            return [knots[i - e], yy[i - e], zz[i - e]];
        }
        let (f1, f2) = self.eval_f(i, x, y, z).expect("orbit point left the domain");
        [self.l(i, x), f1, f2]
    }

    /// Closed-form offset polynomials (quadratic in x) for interval i.
    fn offset_polys(&self, i: usize) -> (Quadratic, Quadratic) {
        let x0 = self.data.x0();
        let span = self.data.xn() - x0;
        let y = self.data.y();
        let z = self.data.z();
        let n = self.n();
        let e = self.sig.eps(i);
        // g0 + (gn - g0) * mu(x) as an affine in x
        let blend = |g0: f64, gn: f64| Affine {
            c0: g0 - (gn - g0) * x0 / span,
            c1: (gn - g0) / span,
        };
        // factor composed with L_i, affine in x
        let through_l = |f: &FactorFunction| Affine {
            c0: f.c0 + f.c1 * self.b[i - 1],
            c1: f.c1 * self.a[i - 1],
        };
        let ends_y = blend(y[i - 1 + e], y[i - e]);
        let ends_z = blend(z[i - 1 + e], z[i - e]);
        let blend_y = blend(y[0], y[n]);
        let blend_z = blend(z[0], z[n]);
        let add = |base: Affine, s1: Quadratic, s2: Quadratic| Quadratic {
            c: [
                base.c0 - s1.c[0] - s2.c[0],
                base.c1 - s1.c[1] - s2.c[1],
                -s1.c[2] - s2.c[2],
            ],
        };
        let r = add(
            ends_y,
            through_l(&self.fam.p[i - 1]).mul(&blend_y),
            through_l(&self.fam.q[i - 1]).mul(&blend_z),
        );
        let rt = add(
            ends_z,
            through_l(&self.fam.p_tilde[i - 1]).mul(&blend_y),
            through_l(&self.fam.q_tilde[i - 1]).mul(&blend_z),
        );
        (r, rt)
    }

    fn compute_envelope(&self) -> Result<Option<Envelope>, SystemError> {
        let mut u = 0.0_f64;
        let mut ut = 0.0_f64;
        for i in 1..=self.n() {
            let nm = self.fam.norms(&self.data, i);
            let den = (1.0 - nm.p) * (1.0 - nm.q_tilde) - nm.p_tilde * nm.q;
            if den <= 0.0 {
                // Cannot happen when per-interval norm sums stay below 1.
                return match self.mode {
                    ContractionMode::Strict => Err(SystemError::DegenerateDenominator {
                        interval: i,
                        value: den,
                    }),
                    ContractionMode::Relaxed => Ok(None),
                };
            }
            let (sr, srt) = self.offset_norms(i);
            u = u.max((nm.q * srt + (1.0 - nm.q_tilde) * sr) / den);
            ut = ut.max((nm.p_tilde * sr + (1.0 - nm.p) * srt) / den);
        }
        Ok(Some(Envelope { u, u_tilde: ut }))
    }

    fn compute_contraction(&self) -> Option<Contraction> {
        if self.sbar >= 1.0 || self.big_a >= 1.0 {
            return None;
        }
        let env = self.envelope?;
        let (lo, hi) = (self.data.x0(), self.data.xn());
        let agg = |list: &[FactorFunction]| {
            list.iter().fold(0.0_f64, |m, f| m.max(f.lipschitz()))
        };
        let l_p = agg(&self.fam.p);
        let l_q = agg(&self.fam.q);
        let l_pt = agg(&self.fam.p_tilde);
        let l_qt = agg(&self.fam.q_tilde);
        let mut l_r = 0.0_f64;
        let mut l_rt = 0.0_f64;
        for i in 1..=self.n() {
            let (r, rt) = self.offset_polys(i);
            l_r = l_r.max(r.lipschitz(lo, hi));
            l_rt = l_rt.max(rt.lipschitz(lo, hi));
        }
        let den = self.big_a * env.u * (l_p + l_pt)
            + self.big_a * env.u_tilde * (l_q + l_qt)
            + (l_r + l_rt);
        // Any theta below (1 - A) / den works; take the midpoint for margin,
        // or 1 when the bound is vacuous.
        let theta = if den == 0.0 {
            1.0
        } else {
            0.5 * (1.0 - self.big_a) / den
        };
        let kappa = (self.big_a + theta * den).max(self.sbar);
        Some(Contraction { theta, kappa })
    }

    /// Metric `|dx| + theta (|dy| + |dz|)` used by the contraction property.
    pub fn rho(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let theta = self.contraction.map_or(1.0, |c| c.theta);
        (a[0] - b[0]).abs() + theta * ((a[1] - b[1]).abs() + (a[2] - b[2]).abs())
    }

    /// Crude bound on |f1|, |f2| plus the pinned-endpoint comparison
    /// functions; used to terminate the exact-evaluation recursion.
    pub fn value_bound(&self) -> f64 {
        let data_mag = self
            .data
            .y()
            .iter()
            .chain(self.data.z())
            .fold(0.0_f64, |m, &v| m.max(v.abs()));
        match self.envelope {
            Some(env) => env.u.max(env.u_tilde) + data_mag,
            None => 10.0 * (data_mag + 1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_knots() -> Vec<f64> {
        vec![-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
    }

    fn zigzag_system(sig: Vec<u8>) -> ZipperSystem {
        let data = ExtendedDataSet::new(
            uniform_knots(),
            vec![-4.0, 2.0, 0.0, 3.0, 1.0, 4.0, -2.0],
            vec![-3.0, 1.0, -2.0, 4.0, 3.0, 6.0, 2.0],
        )
        .unwrap();
        let fam = ScalingFamily::constants(
            &[0.5, -0.18, 0.53, -0.17, 0.52, 0.48],
            &[0.17, -0.054, 0.053, -0.034, 0.23, 0.14],
            &[0.36, -0.21, 0.33, -0.18, 0.34, 0.37],
            &[0.29, -0.05, 0.22, -0.14, 0.38, 0.23],
        );
        ZipperSystem::new(
            data,
            Signature::new(sig).unwrap(),
            fam,
            ContractionMode::Strict,
        )
        .unwrap()
    }

    #[test]
    fn interval_map_coefficients() {
        // Uniform knots on [-1, 1], alternating signature. For i = 1 with
        // eps = 0: a = ((-2/3) - (-1)) / 2 = 1/6, and L_1 fixes x_0.
        let sys = zigzag_system(vec![0, 1, 0, 1, 0, 1]);
        assert!((sys.slopes()[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((sys.intercepts()[0] + 5.0 / 6.0).abs() < 1e-15);
        assert!((sys.slopes()[1] + 1.0 / 6.0).abs() < 1e-15);
        assert!((sys.intercepts()[1] + 0.5).abs() < 1e-15);
        assert!((sys.l(1, -1.0) + 1.0).abs() < 1e-12);
        assert!((sys.l(1, 1.0) + 2.0 / 3.0).abs() < 1e-12);
        assert!((sys.l(2, -1.0) + 1.0 / 3.0).abs() < 1e-12);
        assert!((sys.l(2, 1.0) + 2.0 / 3.0).abs() < 1e-12);
        assert!((sys.big_a() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn interval_maps_hit_signature_endpoints() {
        for sig in [vec![0, 0, 0, 0, 0, 0], vec![1, 1, 1, 1, 1, 1], vec![0, 1, 1, 0, 1, 0]] {
            let sys = zigzag_system(sig);
            let x = sys.data().knots().to_vec();
            for i in 1..=sys.n() {
                let e = sys.sig().eps(i);
                assert!((sys.l(i, x[0]) - x[i - 1 + e]).abs() < 1e-12);
                assert!((sys.l(i, x[6]) - x[i - e]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn signature_flip_negates_slope_and_swaps_images() {
        let s0 = zigzag_system(vec![0, 1, 0, 1, 0, 1]);
        let s1 = zigzag_system(vec![1, 1, 0, 1, 0, 1]);
        assert!((s0.slopes()[0] + s1.slopes()[0]).abs() < 1e-15);
        let x = s0.data().knots();
        assert!((s0.l(1, x[0]) - s1.l(1, x[6])).abs() < 1e-12);
        assert!((s0.l(1, x[6]) - s1.l(1, x[0])).abs() < 1e-12);
    }

    #[test]
    fn offsets_collapse_at_domain_endpoints() {
        let sys = zigzag_system(vec![0, 1, 0, 1, 0, 1]);
        let d = sys.data().clone();
        let (y, z) = (d.y().to_vec(), d.z().to_vec());
        for i in 1..=sys.n() {
            let e = sys.sig().eps(i);
            let (r0, rt0) = sys.eval_offsets(i, d.x0()).unwrap();
            let m = sys.factor_matrix(i, sys.l(i, d.x0()));
            assert!((r0 - (y[i - 1 + e] - m[0][0] * y[0] - m[0][1] * z[0])).abs() < 1e-12);
            assert!((rt0 - (z[i - 1 + e] - m[1][0] * y[0] - m[1][1] * z[0])).abs() < 1e-12);
            let (rn, _) = sys.eval_offsets(i, d.xn()).unwrap();
            let mn = sys.factor_matrix(i, sys.l(i, d.xn()));
            assert!((rn - (y[i - e] - mn[0][0] * y[6] - mn[0][1] * z[6])).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_data_gives_zero_offsets_and_pure_matrix_action() {
        let data = ExtendedDataSet::new(uniform_knots(), vec![0.0; 7], vec![0.0; 7]).unwrap();
        let fam = ScalingFamily::constants(
            &[0.3; 6],
            &[0.2; 6],
            &[0.1; 6],
            &[-0.2; 6],
        );
        let sys = ZipperSystem::new(
            data,
            Signature::new(vec![0, 1, 0, 1, 0, 1]).unwrap(),
            fam,
            ContractionMode::Strict,
        )
        .unwrap();
        for i in 1..=6 {
            for x in [-1.0, -0.37, 0.2, 1.0] {
                let (r, rt) = sys.eval_offsets(i, x).unwrap();
                assert!(r.abs() < 1e-15 && rt.abs() < 1e-15);
                let (f1, f2) = sys.eval_f(i, x, 0.7, -0.4).unwrap();
                assert!((f1 - (0.3 * 0.7 + 0.2 * -0.4)).abs() < 1e-15);
                assert!((f2 - (0.1 * 0.7 + -0.2 * -0.4)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn join_up_condition() {
        let sys = zigzag_system(vec![0, 1, 0, 1, 0, 1]);
        let d = sys.data();
        let (y, z) = (d.y().to_vec(), d.z().to_vec());
        for i in 1..=sys.n() {
            let e = sys.sig().eps(i);
            let (f1, f2) = sys.eval_f(i, d.x0(), y[0], z[0]).unwrap();
            assert!((f1 - y[i - 1 + e]).abs() < 1e-10);
            assert!((f2 - z[i - 1 + e]).abs() < 1e-10);
            let (g1, g2) = sys.eval_f(i, d.xn(), y[6], z[6]).unwrap();
            assert!((g1 - y[i - e]).abs() < 1e-10);
            assert!((g2 - z[i - e]).abs() < 1e-10);
        }
    }

    #[test]
    fn envelope_from_simple_norms() {
        // ||p|| = 0.5, everything else zero, ||r|| = 1 forced by data with a
        // single nonzero middle knot and zero factors except p.
        // Denominator (1 - 0.5)(1 - 0) = 0.5, U = ((1-0)*1)/0.5 = 2.
        let data = ExtendedDataSet::new(
            vec![0.0, 0.5, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0],
        )
        .unwrap();
        let fam = ScalingFamily::constants(&[0.5, 0.5], &[0.0; 2], &[0.0; 2], &[0.0; 2]);
        let sys = ZipperSystem::new(
            data,
            Signature::zeros(2),
            fam,
            ContractionMode::Strict,
        )
        .unwrap();
        let (sr, srt) = sys.offset_norms(1);
        assert!((sr - 1.0).abs() < 1e-12);
        assert!(srt.abs() < 1e-15);
        let env = sys.envelope().unwrap();
        assert!((env.u - 2.0).abs() < 1e-12);
        assert!(env.u_tilde.abs() < 1e-15);
    }

    #[test]
    fn envelope_with_zero_factors_is_max_offset_norm() {
        let data = ExtendedDataSet::new(
            uniform_knots(),
            vec![-4.0, 2.0, 0.0, 3.0, 1.0, 4.0, -2.0],
            vec![-3.0, 1.0, -2.0, 4.0, 3.0, 6.0, 2.0],
        )
        .unwrap();
        let fam = ScalingFamily::constants(&[0.0; 6], &[0.0; 6], &[0.0; 6], &[0.0; 6]);
        let sys = ZipperSystem::new(
            data,
            Signature::new(vec![0, 1, 0, 1, 0, 1]).unwrap(),
            fam,
            ContractionMode::Strict,
        )
        .unwrap();
        let mut max_r = 0.0_f64;
        let mut max_rt = 0.0_f64;
        for i in 1..=6 {
            let (sr, srt) = sys.offset_norms(i);
            max_r = max_r.max(sr);
            max_rt = max_rt.max(srt);
        }
        let env = sys.envelope().unwrap();
        assert!((env.u - max_r).abs() < 1e-12);
        assert!((env.u_tilde - max_rt).abs() < 1e-12);
    }

    #[test]
    fn offset_sup_matches_dense_sampling() {
        // Affine (non-constant) factors exercise the quadratic closed form.
        let data = ExtendedDataSet::new(
            uniform_knots(),
            vec![-4.0, 2.0, 0.0, 3.0, 1.0, 4.0, -2.0],
            vec![-3.0, 1.0, -2.0, 4.0, 3.0, 6.0, 2.0],
        )
        .unwrap();
        let aff = |c0: f64, c1: f64| FactorFunction::affine(c0, c1);
        let fam = ScalingFamily {
            p: (0..6).map(|k| aff(0.2, 0.1 * (k as f64 - 2.0))).collect(),
            q: (0..6).map(|k| aff(-0.1, 0.05 * (k as f64))).collect(),
            p_tilde: (0..6).map(|_| aff(0.15, -0.2)).collect(),
            q_tilde: (0..6).map(|_| aff(0.1, 0.12)).collect(),
        };
        let sys = ZipperSystem::new(
            data,
            Signature::new(vec![0, 1, 0, 1, 0, 1]).unwrap(),
            fam,
            ContractionMode::Strict,
        )
        .unwrap();
        for i in 1..=6 {
            let mut dense = 0.0_f64;
            for k in 0..=1000 {
                let x = -1.0 + 2.0 * k as f64 / 1000.0;
                let (r, _) = sys.eval_offsets(i, x).unwrap();
                dense = dense.max(r.abs());
            }
            let (sr, _) = sys.offset_norms(i);
            assert!(sr >= dense - 1e-12, "interval {i}: {sr} < dense {dense}");
            assert!(sr <= dense + 1e-3, "sup too loose on interval {i}");
        }
    }

    #[test]
    fn contraction_constants_valid() {
        let sys = zigzag_system(vec![0, 1, 0, 1, 0, 1]);
        let c = sys.contraction().unwrap();
        assert!(c.kappa < 1.0);
        assert!(c.theta > 0.0);
        // Constant factors: the theta bound reduces to (1-A)/(l_r + l_rt),
        // and the chosen theta is half of it.
        let (lo, hi) = (-1.0, 1.0);
        let mut l_r = 0.0_f64;
        let mut l_rt = 0.0_f64;
        for i in 1..=6 {
            let (r, rt) = sys.offset_polys(i);
            l_r = l_r.max(r.lipschitz(lo, hi));
            l_rt = l_rt.max(rt.lipschitz(lo, hi));
        }
        let expect = 0.5 * (1.0 - sys.big_a()) / (l_r + l_rt);
        assert!((c.theta - expect).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_rejected() {
        let sys = zigzag_system(vec![0, 1, 0, 1, 0, 1]);
        assert!(matches!(
            sys.eval_offsets(1, 1.5),
            Err(SystemError::XOutOfDomain { .. })
        ));
        assert!(sys.interval_index(-2.0).is_err());
        assert_eq!(sys.interval_index(-1.0).unwrap(), 1);
        assert_eq!(sys.interval_index(1.0).unwrap(), 6);
        assert_eq!(sys.interval_index(0.0).unwrap(), 4);
    }
}
