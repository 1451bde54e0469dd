//! Logarithmic, fractional and truncated Gagliardo-type seminorms.
//!
//! All seminorms are double integrals `∫_h ∫_x Φ(|f(x+h) - f(x)|) K(h) dx dh`
//! with `f` extended by zero. The `h`-integral uses a [`RadialScheme`]; the
//! `x`-integral is a grid sum. Since `f(x + h)` is a nearest-cell lookup and
//! `x` runs over cell centers, a node `h` only enters through the integer
//! cell shift `round(h / Δ)`, so scheme weights are first grouped by shift
//! and each distinct shift is swept once.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Domain, SampledFunction};
use crate::quadrature::{frac_outer_radius, sphere_measure, RadialScheme, SEMINORM_RADIUS};
use crate::reduce;

/// Exponents shared by every functional. Only the fields an operation uses
/// are validated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeminormParams {
    /// Logarithmic order γ.
    pub gamma: f64,
    /// Integrability exponent.
    pub p: f64,
    /// Fractional order.
    pub s: f64,
    /// Secondary exponent of the truncated seminorm and of `Φ*_{s,q}`.
    pub q: f64,
    /// Accept `γ = 0` in [`x_seminorm`]. Such values sit outside the
    /// definition of the logarithmic space and are flagged in reports.
    pub allow_zero_gamma: bool,
}

impl Default for SeminormParams {
    fn default() -> Self {
        SeminormParams {
            gamma: 0.5,
            p: 1.0,
            s: 0.5,
            q: 1.0,
            allow_zero_gamma: false,
        }
    }
}

impl SeminormParams {
    pub fn log(gamma: f64, p: f64) -> Self {
        SeminormParams {
            gamma,
            p,
            ..Default::default()
        }
    }

    pub fn frac(s: f64, p: f64) -> Self {
        SeminormParams {
            s,
            p,
            ..Default::default()
        }
    }

    pub fn truncated(p: f64, q: f64) -> Self {
        SeminormParams {
            p,
            q,
            gamma: 1.0,
            ..Default::default()
        }
    }

    pub(crate) fn check_gamma(&self) -> Result<()> {
        let g = self.gamma;
        let ok = g.is_finite() && (g > 0.0 || (g == 0.0 && self.allow_zero_gamma));
        if !ok {
            return Err(Error::param("gamma", format!("must be positive, got {g}")));
        }
        Ok(())
    }

    pub(crate) fn check_p(&self, min: f64, inclusive: bool) -> Result<()> {
        let p = self.p;
        let ok = p.is_finite() && if inclusive { p >= min } else { p > min };
        if !ok {
            let rel = if inclusive { ">=" } else { ">" };
            return Err(Error::param("p", format!("must be {rel} {min}, got {p}")));
        }
        Ok(())
    }

    pub(crate) fn check_s_open(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::param("s", format!("must lie in (0, 1), got {}", self.s)));
        }
        Ok(())
    }

    pub(crate) fn check_q(&self) -> Result<()> {
        if !(self.q.is_finite() && self.q >= 1.0) {
            return Err(Error::param("q", format!("must be >= 1, got {}", self.q)));
        }
        Ok(())
    }
}

/// Scheme weights accumulated per integer cell shift, in lattice order.
#[derive(Debug, Clone)]
pub(crate) struct ShiftTable {
    pub entries: Vec<([i64; 2], f64)>,
}

impl ShiftTable {
    pub fn new(dom: &Domain, scheme: &RadialScheme, profile: impl Fn(f64) -> f64) -> Self {
        let dx = dom.spacing();
        let mut acc: BTreeMap<[i64; 2], f64> = BTreeMap::new();
        for &r in &scheme.radii {
            let k = profile(r) * scheme.radial_weight;
            for (dir, w) in scheme.directions.iter().zip(&scheme.angular_weights) {
                let mut shift = [0i64; 2];
                for axis in 0..dom.dim {
                    shift[axis] = (0.5 + r * dir[axis] / dx).floor() as i64;
                }
                if shift != [0, 0] {
                    *acc.entry(shift).or_insert(0.0) += k * w;
                }
            }
        }
        ShiftTable {
            entries: acc.into_iter().collect(),
        }
    }

    /// Largest shift magnitude along any axis.
    pub fn reach(&self) -> usize {
        self.entries
            .iter()
            .map(|(m, _)| m[0].unsigned_abs().max(m[1].unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }
}

fn check_scheme_dim(f: &SampledFunction, scheme: &RadialScheme) -> Result<()> {
    if scheme.dim != f.domain().dim {
        return Err(Error::IncompatibleScheme(format!(
            "scheme is {}-dimensional, function is {}-dimensional",
            scheme.dim,
            f.domain().dim
        )));
    }
    Ok(())
}

/// `∫ Φ(|f(x+m) - f(x)|) dx` for a whole-cell shift `m`, over every cell
/// where either term can be nonzero.
pub(crate) fn shifted_difference(f: &SampledFunction, m: [i64; 2], phi: impl Fn(f64) -> f64) -> f64 {
    let dom = f.domain();
    let n = dom.points_per_axis as i64;
    let span = |mk: i64| (0i64.min(-mk), n.max(n - mk));
    let (lo0, hi0) = span(m[0]);
    let total = if dom.dim == 1 {
        (lo0..hi0)
            .map(|i| phi((f.at([i + m[0], 0]) - f.at([i, 0])).abs()))
            .sum::<f64>()
    } else {
        let (lo1, hi1) = span(m[1]);
        let rows: Vec<f64> = (lo1..hi1)
            .map(|j| {
                (lo0..hi0)
                    .map(|i| phi((f.at([i + m[0], j + m[1]]) - f.at([i, j])).abs()))
                    .sum()
            })
            .collect();
        reduce::tree_sum(&rows)
    };
    total * dom.cell_volume()
}

/// Weighted sum over shifts of [`shifted_difference`].
pub(crate) fn double_integral<P>(f: &SampledFunction, table: &ShiftTable, phi: P) -> f64
where
    P: Fn(f64) -> f64 + Sync + Send + Copy,
{
    let terms = reduce::map_indexed(table.entries.len(), |k| {
        let (m, w) = table.entries[k];
        w * shifted_difference(f, m, phi)
    });
    reduce::tree_sum(&terms)
}

/// Per-node inner integral `Σ_m w_m Φ(|f(x+m) - f(x)|)` on the box enlarged
/// by the table's reach, so that every node with a nonzero value is present.
pub(crate) fn pointwise_integral<P>(f: &SampledFunction, table: &ShiftTable, phi: P) -> (Domain, Vec<f64>)
where
    P: Fn(f64) -> f64 + Sync + Send + Copy,
{
    let pad = table.reach();
    let ext = f.domain().padded(pad);
    let offset = pad as i64;
    let lift = |idx: [i64; 2]| {
        if f.domain().dim == 1 {
            [idx[0] - offset, 0]
        } else {
            [idx[0] - offset, idx[1] - offset]
        }
    };
    let values = reduce::map_indexed(ext.len(), |k| {
        let x = lift(ext.lattice(k));
        let fx = f.at(x);
        table
            .entries
            .iter()
            .map(|&(m, w)| w * phi((f.at([x[0] + m[0], x[1] + m[1]]) - fx).abs()))
            .sum()
    });
    (ext, values)
}

pub(crate) fn log_table(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<ShiftTable> {
    params.check_gamma()?;
    params.check_p(0.0, false)?;
    check_scheme_dim(f, scheme)?;
    scheme.require_radius(SEMINORM_RADIUS, "the logarithmic seminorm")?;
    let a = params.p * params.gamma - 1.0;
    Ok(ShiftTable::new(f.domain(), scheme, |r| (-r.ln()).powf(a)))
}

pub(crate) fn frac_table(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<ShiftTable> {
    params.check_s_open()?;
    params.check_p(1.0, true)?;
    check_scheme_dim(f, scheme)?;
    scheme.require_radius(frac_outer_radius(f.domain()), "the fractional seminorm")?;
    let a = -params.p * params.s;
    Ok(ShiftTable::new(f.domain(), scheme, |r| r.powf(a)))
}

/// `⟦f⟧_{X^{γ,p}}^p`: the logarithmic double integral on `B_{1/3}` before the
/// `1/p` root.
pub fn x_seminorm_pow(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<f64> {
    let table = log_table(f, params, scheme)?;
    let p = params.p;
    Ok(double_integral(f, &table, move |t| t.powf(p)))
}

/// `⟦f⟧_{X^{γ,p}}`.
pub fn x_seminorm(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<f64> {
    Ok(x_seminorm_pow(f, params, scheme)?.powf(1.0 / params.p))
}

/// `‖f‖_{X^{γ,p}} = (‖f‖_p^p + ⟦f⟧_{X^{γ,p}}^p)^{1/p}`.
pub fn x_norm(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<f64> {
    let semi = x_seminorm_pow(f, params, scheme)?;
    let lp = f.lp_norm(params.p)?;
    Ok((lp.powf(params.p) + semi).powf(1.0 / params.p))
}

/// Fractional seminorm split into the part computed on `|h| < R_out` and the
/// analytic bound on the remaining tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracSeminorm {
    /// `∬_{|h|<R_out} |f(x+h) - f(x)|^p |h|^{-d-ps}`.
    pub near: f64,
    /// `2^p ‖f‖_p^p σ_{d-1} / (p s R_out^{ps})`.
    pub tail: f64,
    pub outer_radius: f64,
    pub p: f64,
}

impl FracSeminorm {
    /// `(near + tail)^{1/p}`.
    pub fn value(&self) -> f64 {
        (self.near + self.tail).powf(1.0 / self.p)
    }

    /// `near^{1/p}`, the part that excludes the tail bound.
    pub fn near_value(&self) -> f64 {
        self.near.powf(1.0 / self.p)
    }

    /// `value()^p`.
    pub fn pow(&self) -> f64 {
        self.near + self.tail
    }
}

/// Tail constant `2^p σ_{d-1} / (p s R^{ps})`, to be multiplied by `|f|^p`.
pub(crate) fn frac_tail_factor(dim: usize, params: &SeminormParams, outer_radius: f64) -> f64 {
    let ps = params.p * params.s;
    2f64.powf(params.p) * sphere_measure(dim) / (ps * outer_radius.powf(ps))
}

/// `⟦f⟧_{W^{s,p}}` with outer cutoff `4L` and the tail reported separately.
pub fn w_seminorm(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<FracSeminorm> {
    let table = frac_table(f, params, scheme)?;
    let p = params.p;
    let near = double_integral(f, &table, move |t| t.powf(p));
    let lp = f.lp_norm(p)?.powf(p);
    let tail = lp * frac_tail_factor(f.domain().dim, params, scheme.outer_radius);
    Ok(FracSeminorm {
        near,
        tail,
        outer_radius: scheme.outer_radius,
        p,
    })
}

/// `‖f‖_{W^{s,p}} = (‖f‖_p^p + ⟦f⟧_{W^{s,p}}^p)^{1/p}`.
pub fn w_norm(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<f64> {
    let w = w_seminorm(f, params, scheme)?;
    Ok((f.lp_norm(params.p)?.powf(params.p) + w.pow()).powf(1.0 / params.p))
}

/// `∬_{B_{1/3}} (1 ∧ |f(x+h) - f(x)|^q) |h|^{-d} log(1/|h|)^{p-1} dx dh`.
///
/// The value is the integral itself, with no root taken.
pub fn truncated_q_seminorm(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<f64> {
    params.check_p(1.0, true)?;
    params.check_q()?;
    check_scheme_dim(f, scheme)?;
    scheme.require_radius(SEMINORM_RADIUS, "the truncated seminorm")?;
    let a = params.p - 1.0;
    let table = ShiftTable::new(f.domain(), scheme, |r| (-r.ln()).powf(a));
    let q = params.q;
    Ok(double_integral(f, &table, move |t| t.powf(q).min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, AnalyticFunction};
    use crate::quadrature::{SchemeOptions, MOMENT_RADIUS};

    fn setup(g: AnalyticFunction, n: usize) -> (SampledFunction, RadialScheme) {
        let dom = Domain::new(1, 1.0, n).unwrap();
        let f = sample(&g, &dom).unwrap();
        let s = SchemeOptions::default().log_scheme(&dom, SEMINORM_RADIUS).unwrap();
        (f, s)
    }

    #[test]
    fn constants_have_zero_seminorms() {
        for dim in [1, 2] {
            let dom = Domain::new(dim, 1.0, 32).unwrap();
            let f = sample(&AnalyticFunction::constant(3.0), &dom).unwrap();
            let opts = SchemeOptions {
                n_r: 32,
                n_theta: 8,
                ..Default::default()
            };
            let ls = opts.log_scheme(&dom, SEMINORM_RADIUS).unwrap();
            let fs = opts.frac_scheme(&dom).unwrap();
            // zero extension makes the box edge a jump, so only the zero
            // function is exactly flat everywhere
            let z = sample(&AnalyticFunction::constant(0.0), &dom).unwrap();
            assert_eq!(x_seminorm(&z, &SeminormParams::log(0.5, 1.0), &ls).unwrap(), 0.0);
            assert_eq!(w_seminorm(&z, &SeminormParams::frac(0.5, 1.0), &fs).unwrap().value(), 0.0);
            assert_eq!(
                truncated_q_seminorm(&z, &SeminormParams::truncated(1.0, 1.0), &ls).unwrap(),
                0.0
            );
            assert_eq!(x_norm(&z, &SeminormParams::log(0.5, 2.0), &ls).unwrap(), 0.0);
            assert!(x_seminorm(&f, &SeminormParams::log(0.5, 1.0), &ls).unwrap() > 0.0);
        }
    }

    #[test]
    fn validation_errors() {
        let (f, s) = setup(AnalyticFunction::gaussian(0.2), 64);
        let e = x_seminorm(&f, &SeminormParams::log(-1.0, 1.0), &s).unwrap_err();
        assert_eq!(e.parameter(), Some("gamma"));
        assert!(x_seminorm(&f, &SeminormParams::log(0.0, 1.0), &s).is_err());
        let zero_ok = SeminormParams {
            allow_zero_gamma: true,
            ..SeminormParams::log(0.0, 1.0)
        };
        assert!(x_seminorm(&f, &zero_ok, &s).is_ok());
        let wrong = SchemeOptions::default().log_scheme(f.domain(), MOMENT_RADIUS).unwrap();
        assert!(matches!(
            x_seminorm(&f, &SeminormParams::log(0.5, 1.0), &wrong),
            Err(Error::IncompatibleScheme(_))
        ));
        let fs = SchemeOptions::default().frac_scheme(f.domain()).unwrap();
        assert!(w_seminorm(&f, &SeminormParams::frac(1.0, 1.0), &fs).is_err());
        assert!(w_seminorm(&f, &SeminormParams::frac(0.5, 0.5), &fs).is_err());
        assert!(truncated_q_seminorm(&f, &SeminormParams::truncated(1.0, 0.5), &s).is_err());
    }

    #[test]
    fn grouped_shifts_match_naive_lookup_sum() {
        // same quadrature, evaluated node by node through `evaluate`
        let (f, s) = setup(AnalyticFunction::indicator_ball(0.2), 128);
        let params = SeminormParams::log(0.5, 2.0);
        let fast = x_seminorm_pow(&f, &params, &s).unwrap();
        let dom = *f.domain();
        let pad = (SEMINORM_RADIUS / dom.spacing()).ceil() as i64 + 1;
        let n = dom.points_per_axis as i64;
        let mut naive = 0.0;
        for i in -pad..n + pad {
            let x = dom.center(i);
            let fx = f.evaluate(&[x]);
            naive += s.integrate(
                |r| (-r.ln()).powf(params.p * params.gamma - 1.0),
                |h| (f.evaluate(&[x + h[0]]) - fx).abs().powf(params.p),
            ) * dom.spacing();
        }
        assert!((fast / naive - 1.0).abs() < 1e-9, "{fast} vs {naive}");
    }

    #[test]
    fn translation_invariance() {
        let (f, s) = setup(AnalyticFunction::gaussian(0.1), 512);
        let params = SeminormParams::log(0.5, 1.5);
        let a = x_seminorm(&f, &params, &s).unwrap();
        let b = x_seminorm(&f.translated([17, 0]), &params, &s).unwrap();
        assert!((a / b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn monotone_in_gamma() {
        let (f, s) = setup(AnalyticFunction::indicator_ball(0.1), 512);
        let vals: Vec<f64> = [0.1, 0.25, 0.5, 1.0, 2.0]
            .iter()
            .map(|&g| x_seminorm(&f, &SeminormParams::log(g, 1.0), &s).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{vals:?}");
    }

    #[test]
    fn x_norm_dominates_parts() {
        let (f, s) = setup(AnalyticFunction::trig_poly(3, 4), 256);
        let params = SeminormParams::log(0.5, 2.0);
        let n = x_norm(&f, &params, &s).unwrap();
        assert!(n >= f.lp_norm(2.0).unwrap());
        assert!(n >= x_seminorm(&f, &params, &s).unwrap());
    }

    #[test]
    fn truncated_is_below_untruncated_for_bounded_functions() {
        let (f, s) = setup(AnalyticFunction::step_sum(4), 256);
        let f = f.map(|v| 0.8 * v).unwrap();
        for p in [1.0, 2.0] {
            let t = truncated_q_seminorm(&f, &SeminormParams::truncated(p, p), &s).unwrap();
            let x = x_seminorm_pow(&f, &SeminormParams::log(1.0, p), &s).unwrap();
            assert!(t <= x * (1.0 + 1e-12));
        }
    }

    #[test]
    fn w_seminorm_increases_with_s() {
        let (f, _) = setup(AnalyticFunction::indicator_ball(0.25), 512);
        let fs = SchemeOptions::default().frac_scheme(f.domain()).unwrap();
        let lo = w_seminorm(&f, &SeminormParams::frac(0.3, 1.0), &fs).unwrap();
        let hi = w_seminorm(&f, &SeminormParams::frac(0.7, 1.0), &fs).unwrap();
        assert!(hi.near_value() > lo.near_value());
    }

    #[test]
    fn frac_tail_equals_exact_far_field_when_p_is_one() {
        // for |h| > diameter the difference integral is exactly 2 ‖f‖_1,
        // which is the 2^p bound at p = 1
        let (f, _) = setup(AnalyticFunction::indicator_ball(0.25), 256);
        let params = SeminormParams::frac(0.5, 1.0);
        let fs = SchemeOptions::default().frac_scheme(f.domain()).unwrap();
        let w = w_seminorm(&f, &params, &fs).unwrap();
        let exact = 2.0 * 0.5 * 2.0 / (0.5 * 4f64.sqrt());
        assert!((w.tail - exact).abs() < 1e-12);
    }

    #[test]
    fn pointwise_integral_sums_to_double_integral() {
        let (f, s) = setup(AnalyticFunction::step_sum(3), 128);
        let params = SeminormParams::log(0.75, 1.0);
        let table = log_table(&f, &params, &s).unwrap();
        let (ext, vals) = pointwise_integral(&f, &table, |t| t);
        let total: f64 = vals.iter().sum::<f64>() * ext.cell_volume();
        let direct = double_integral(&f, &table, |t| t);
        assert!((total / direct - 1.0).abs() < 1e-12);
    }
}
