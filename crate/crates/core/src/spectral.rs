//! Fourier-side description of the `p = 2` logarithmic scale.
//!
//! With the unitary transform `f̂(ξ) = (2π)^{-d/2} ∫ f(x) e^{-i x·ξ} dx`,
//! Plancherel turns the logarithmic seminorm into a Fourier multiplier:
//! `∫|f(x+h) - f(x)|^2 dx = 2 ∫ (1 - cos(h·ξ)) |f̂(ξ)|^2 dξ`. The multiplier
//! integrated against the kernel is the *kernel moment* `I(ξ)`.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::quadrature::{build_radial_scheme, RadialScheme, MOMENT_RADIUS, SEMINORM_RADIUS};
use crate::reduce;
use crate::seminorms::{x_seminorm_pow, SeminormParams};

/// Zero-padding factor applied before the transform.
pub const DEFAULT_PADDING: usize = 2;

/// Squared magnitudes of the transform on the discrete frequency lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub dim: usize,
    /// Frequencies along one axis, ascending: `ξ_k = k Δξ`, `k = -N/2..N/2-1`.
    pub frequencies: Vec<f64>,
    /// Frequency spacing `2π / (N Δ)`.
    pub dxi: f64,
    /// `|f̂(ξ)|^2`, axis 0 fastest, same ordering as `frequencies`.
    pub power: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    /// Frequency vector of entry `k`.
    pub fn xi(&self, k: usize) -> [f64; 2] {
        let n = self.frequencies.len();
        if self.dim == 1 {
            [self.frequencies[k], 0.0]
        } else {
            [self.frequencies[k % n], self.frequencies[k / n]]
        }
    }

    pub fn abs_xi(&self, k: usize) -> f64 {
        let x = self.xi(k);
        x[0].hypot(x[1])
    }

    /// `Δξ^d`.
    pub fn cell(&self) -> f64 {
        self.dxi.powi(self.dim as i32)
    }

    /// `Σ |f̂|^2 Δξ^d`, equal to `‖f‖_2^2` by discrete Plancherel.
    pub fn energy(&self) -> f64 {
        reduce::tree_sum(&self.power) * self.cell()
    }

    /// `Σ_{|ξ|>threshold} w(|ξ|) |f̂|^2 Δξ^d`.
    pub fn weighted_energy(&self, threshold: f64, w: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = (0..self.len())
            .map(|k| {
                let a = self.abs_xi(k);
                if a > threshold {
                    w(a) * self.power[k]
                } else {
                    0.0
                }
            })
            .collect();
        reduce::tree_sum(&terms) * self.cell()
    }
}

/// Spectrum with the default 2× zero padding.
pub fn compute_spectrum(f: &SampledFunction) -> Result<Spectrum> {
    compute_spectrum_padded(f, DEFAULT_PADDING)
}

/// Spectrum of `f` zero-padded to `padding * n` points per axis.
pub fn compute_spectrum_padded(f: &SampledFunction, padding: usize) -> Result<Spectrum> {
    let dom = f.domain();
    let n = dom.points_per_axis;
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if padding == 0 {
        return Err(Error::param("padding", "must be at least 1"));
    }
    let big = n * padding;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(big);
    let dx = dom.spacing();
    let scale = (dx * dx / (2.0 * PI)).powi(dom.dim as i32);

    let raw: Vec<Complex<f64>> = if dom.dim == 1 {
        let mut buf = vec![Complex::new(0.0, 0.0); big];
        for (slot, &v) in buf.iter_mut().zip(f.values()) {
            slot.re = v;
        }
        fft.process(&mut buf);
        buf
    } else {
        let mut buf = vec![Complex::new(0.0, 0.0); big * big];
        for j in 0..n {
            for i in 0..n {
                buf[i + big * j].re = f.values()[i + n * j];
            }
        }
        // rows
        for row in buf.chunks_exact_mut(big) {
            fft.process(row);
        }
        // columns
        let mut col = vec![Complex::new(0.0, 0.0); big];
        for i in 0..big {
            for j in 0..big {
                col[j] = buf[i + big * j];
            }
            fft.process(&mut col);
            for j in 0..big {
                buf[i + big * j] = col[j];
            }
        }
        buf
    };

    // centered ordering: output slot k holds FFT bin (k - big/2) mod big
    let bin = |k: usize| (k + big / 2) % big;
    let power = if dom.dim == 1 {
        (0..big).map(|k| scale * raw[bin(k)].norm_sqr()).collect()
    } else {
        let mut out = Vec::with_capacity(big * big);
        for j in 0..big {
            for i in 0..big {
                out.push(scale * raw[bin(i) + big * bin(j)].norm_sqr());
            }
        }
        out
    };
    let dxi = 2.0 * PI / (big as f64 * dx);
    let frequencies = (0..big)
        .map(|k| (k as f64 - (big / 2) as f64) * dxi)
        .collect();
    Ok(Spectrum {
        dim: dom.dim,
        frequencies,
        dxi,
        power,
    })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
    }
    Ok(())
}

/// `‖f‖_2^2 + Σ_{|ξ|>1} log(|ξ|)^{2γ} |f̂(ξ)|^2 Δξ^d`, the squared
/// Fourier-side norm.
pub fn spectral_x_norm(f: &SampledFunction, gamma: f64) -> Result<f64> {
    spectral_x_norm_padded(f, gamma, DEFAULT_PADDING)
}

pub fn spectral_x_norm_padded(f: &SampledFunction, gamma: f64, padding: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let spec = compute_spectrum_padded(f, padding)?;
    let l2 = f.lp_norm(2.0)?.powi(2);
    Ok(l2 + spec.weighted_energy(1.0, |a| a.ln().powf(2.0 * gamma)))
}

fn moment(xi: &[f64], gamma: f64, scheme: &RadialScheme) -> f64 {
    let a = 2.0 * gamma - 1.0;
    let xi = [xi[0], if scheme.dim == 2 { xi[1] } else { 0.0 }];
    scheme.integrate(
        |r| (-r.ln()).powf(a),
        |h| {
            // 1 - cos t = 2 sin^2(t/2) avoids cancellation for small t
            let half = 0.5 * (h[0] * xi[0] + h[1] * xi[1]);
            2.0 * half.sin().powi(2)
        },
    )
}

/// `I(ξ) = ∫_{B_{1/2}} (1 - cos(h·ξ)) |h|^{-d} log(1/|h|)^{2γ-1} dh`.
pub fn kernel_moment(xi: &[f64], gamma: f64, scheme: &RadialScheme) -> Result<f64> {
    check_gamma(gamma)?;
    scheme.require_radius(MOMENT_RADIUS, "kernel_moment")?;
    if xi.len() < scheme.dim {
        return Err(Error::param("xi", format!("needs {} components", scheme.dim)));
    }
    Ok(moment(xi, gamma, scheme))
}

/// A log-radial scheme on `B_R` fine enough to resolve `cos(h·ξ)` for all
/// `|ξ| <= xi_max`: the phase advances by at most 0.25 rad per radial node.
pub fn moment_scheme(dim: usize, outer_radius: f64, xi_max: f64) -> Result<RadialScheme> {
    let xi_max = xi_max.max(1.0);
    let r_min = 1e-7 / xi_max;
    let span = (outer_radius / r_min).ln();
    let n_r = ((span * outer_radius * xi_max / 0.25).ceil() as usize).max(512);
    let n_theta = if dim == 1 {
        2
    } else {
        ((4.0 * outer_radius * xi_max).ceil() as usize).max(64)
    };
    build_radial_scheme(r_min, outer_radius, n_r, n_theta, dim)
}

/// `⟦f⟧_{X^{γ,2}}^2` recomputed through Plancherel:
/// `Σ_ξ 2 I_{1/3}(ξ) |f̂(ξ)|^2 Δξ^d`, where `I_{1/3}` is the kernel moment
/// over the seminorm ball `B_{1/3}`.
pub fn plancherel_seminorm_pow(f: &SampledFunction, gamma: f64, scheme: &RadialScheme) -> Result<f64> {
    check_gamma(gamma)?;
    scheme.require_radius(SEMINORM_RADIUS, "the Plancherel route")?;
    let spec = compute_spectrum(f)?;
    let terms = reduce::map_indexed(spec.len(), |k| {
        if spec.power[k] == 0.0 {
            0.0
        } else {
            2.0 * moment(&spec.xi(k), gamma, scheme) * spec.power[k]
        }
    });
    Ok(reduce::tree_sum(&terms) * spec.cell())
}

/// `(‖f‖_2^2 + ⟦f⟧_{X^{γ,2}}^2) / (Fourier-side squared norm)`.
pub fn equivalence_ratio(f: &SampledFunction, gamma: f64, scheme: &RadialScheme) -> Result<f64> {
    let params = SeminormParams::log(gamma, 2.0);
    let semi = x_seminorm_pow(f, &params, scheme)?;
    let l2 = f.lp_norm(2.0)?.powi(2);
    let spectral = spectral_x_norm(f, gamma)?;
    if spectral == 0.0 {
        return Err(Error::ZeroDenominator("spectral norm of the zero function"));
    }
    Ok((l2 + semi) / spectral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, AnalyticFunction, Domain};
    use crate::quadrature::SchemeOptions;

    #[test]
    fn zero_function_has_zero_spectrum() {
        let dom = Domain::new(1, 1.0, 64).unwrap();
        let f = sample(&AnalyticFunction::constant(0.0), &dom).unwrap();
        let s = compute_spectrum(&f).unwrap();
        assert!(s.power.iter().all(|&v| v == 0.0));
        assert_eq!(spectral_x_norm(&f, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_power_of_two() {
        let dom = Domain::new(1, 1.0, 48).unwrap();
        let f = sample(&AnalyticFunction::gaussian(0.2), &dom).unwrap();
        assert_eq!(compute_spectrum(&f).unwrap_err(), Error::NotPowerOfTwo(48));
        assert!(spectral_x_norm(&f, 0.0).is_err());
    }

    #[test]
    fn gaussian_matches_closed_form_transform() {
        // σ = 1: |f̂(ξ)|^2 = exp(-ξ^2)
        let dom = Domain::new(1, 8.0, 2048).unwrap();
        let f = sample(&AnalyticFunction::gaussian(1.0), &dom).unwrap();
        let s = compute_spectrum(&f).unwrap();
        let mut checked = 0;
        for k in 0..s.len() {
            let xi = s.xi(k)[0];
            if xi.abs() <= 10.0 {
                assert!((s.power[k] - (-xi * xi).exp()).abs() < 1e-6, "xi={xi}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn gaussian_in_two_dimensions() {
        let dom = Domain::new(2, 6.0, 128).unwrap();
        let f = sample(&AnalyticFunction::gaussian(1.0), &dom).unwrap();
        let s = compute_spectrum(&f).unwrap();
        for k in (0..s.len()).step_by(97) {
            let a = s.abs_xi(k);
            assert!((s.power[k] - (-a * a).exp()).abs() < 1e-6);
        }
        assert!((s.energy() / f.lp_norm(2.0).unwrap().powi(2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plancherel_for_trig_polys() {
        for seed in 0..4 {
            let dom = Domain::new(1, 1.0, 256).unwrap();
            let f = sample(&AnalyticFunction::trig_poly(seed, 6), &dom).unwrap();
            let s = compute_spectrum(&f).unwrap();
            let l2 = f.lp_norm(2.0).unwrap().powi(2);
            assert!((s.energy() / l2 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn band_limited_trig_poly_has_no_log_term() {
        // wavenumbers π k / 4 with k <= 1 stay below |ξ| = 1; without padding
        // the box-periodic samples land exactly on those bins
        let dom = Domain::new(1, 4.0, 64).unwrap();
        let f = sample(&AnalyticFunction::trig_poly(11, 1), &dom).unwrap();
        let l2 = f.lp_norm(2.0).unwrap().powi(2);
        let norm = spectral_x_norm_padded(&f, 0.5, 1).unwrap();
        assert!((norm - l2).abs() <= 1e-12 * l2, "{norm} vs {l2}");
    }

    #[test]
    fn gaussian_spectral_norm_matches_dense_quadrature() {
        // √π + 2 ∫_1^∞ log(ξ) e^{-ξ^2} dξ with a fine midpoint rule
        let dom = Domain::new(1, 8.0, 2048).unwrap();
        let f = sample(&AnalyticFunction::gaussian(1.0), &dom).unwrap();
        let m = 200_000;
        let h = 9.0 / m as f64;
        let tail: f64 = (0..m)
            .map(|i| {
                let x = 1.0 + (i as f64 + 0.5) * h;
                x.ln() * (-x * x).exp() * h
            })
            .sum();
        let expected = PI.sqrt() + 2.0 * tail;
        let got = spectral_x_norm(&f, 0.5).unwrap();
        assert!((got / expected - 1.0).abs() < 0.01, "{got} vs {expected}");
    }

    #[test]
    fn kernel_moment_basics() {
        let s = moment_scheme(1, MOMENT_RADIUS, 100.0).unwrap();
        assert_eq!(kernel_moment(&[0.0], 0.5, &s).unwrap(), 0.0);
        let a = kernel_moment(&[7.0], 0.5, &s).unwrap();
        let b = kernel_moment(&[-7.0], 0.5, &s).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        let wrong = moment_scheme(1, SEMINORM_RADIUS, 10.0).unwrap();
        assert!(kernel_moment(&[1.0], 0.5, &wrong).is_err());
        assert!(kernel_moment(&[1.0], -0.5, &s).is_err());
    }

    #[test]
    fn kernel_moment_small_frequency_is_quadratic() {
        // for tiny ξ, I(ξ) ≈ (ξ^2/2) ∫_0^{1/2} r log(1/r)^{2γ-1} dr · 2
        let s = moment_scheme(1, MOMENT_RADIUS, 1.0).unwrap();
        let xi = 1e-3;
        let got = kernel_moment(&[xi], 1.0, &s).unwrap();
        // γ = 1: ∫_0^{1/2} r log(1/r) dr = (1/8)(log 2 + 1/2)
        let expected = xi * xi * (2f64.ln() + 0.5) / 8.0;
        assert!((got / expected - 1.0).abs() < 1e-4, "{got} vs {expected}");
    }

    #[test]
    fn kernel_moment_is_even_and_nondecreasing_along_rays_in_2d() {
        let s = moment_scheme(2, MOMENT_RADIUS, 20.0).unwrap();
        let dir = [0.6, 0.8];
        let mut prev = 0.0;
        for t in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let v = kernel_moment(&[t * dir[0], t * dir[1]], 0.5, &s).unwrap();
            let w = kernel_moment(&[-t * dir[0], -t * dir[1]], 0.5, &s).unwrap();
            assert!((v - w).abs() < 1e-10 * v);
            assert!(v >= prev * (1.0 - 1e-3), "t={t}");
            prev = v;
        }
    }

    #[test]
    fn plancherel_route_matches_direct_seminorm_for_smooth_function() {
        let dom = Domain::new(1, 1.0, 512).unwrap();
        let f = sample(&AnalyticFunction::gaussian(0.15), &dom).unwrap();
        let gamma = 0.5;
        let direct_scheme = SchemeOptions::default().log_scheme(&dom, SEMINORM_RADIUS).unwrap();
        let direct = x_seminorm_pow(&f, &SeminormParams::log(gamma, 2.0), &direct_scheme).unwrap();
        let xi_max = PI / dom.spacing();
        let fourier_scheme = moment_scheme(1, SEMINORM_RADIUS, xi_max).unwrap();
        let fourier = plancherel_seminorm_pow(&f, gamma, &fourier_scheme).unwrap();
        assert!((fourier / direct - 1.0).abs() < 0.05, "{fourier} vs {direct}");
    }

    #[test]
    fn equivalence_ratio_rejects_zero() {
        let dom = Domain::new(1, 1.0, 64).unwrap();
        let f = sample(&AnalyticFunction::constant(0.0), &dom).unwrap();
        let s = SchemeOptions::default().log_scheme(&dom, SEMINORM_RADIUS).unwrap();
        assert!(matches!(equivalence_ratio(&f, 0.5, &s), Err(Error::ZeroDenominator(_))));
    }
}
