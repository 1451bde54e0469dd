//! Log-radial quadrature for kernels that are singular at the origin.
//!
//! Every double integral in this crate has the form
//! `∫_{r_min<|h|<R} F(h) |h|^-d k(|h|) dh`. In polar coordinates this is
//! `∫ ∫ F(r θ) k(r) dθ dr/r`, and with `u = ln r` the measure `dr/r` becomes
//! `du`. A [`RadialScheme`] is the midpoint rule in `u` times a uniform rule
//! on the sphere of directions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Domain;

/// Outer radius of the logarithmic seminorm.
pub const SEMINORM_RADIUS: f64 = 1.0 / 3.0;
/// Outer radius of the Fourier-side kernel moment.
pub const MOMENT_RADIUS: f64 = 0.5;
/// Largest outer radius accepted for logarithmic kernels.
pub const MAX_LOG_RADIUS: f64 = 0.5;
/// Smallest admissible number of radial nodes.
pub const MIN_RADIAL_NODES: usize = 8;

/// Surface measure of the unit sphere `S^{d-1}` (2 for d = 1, 2π for d = 2).
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => unreachable!("dimension is validated to be 1 or 2"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `|h|^-d log(1/|h|)^(p γ - 1)`
    LogKernel,
    /// `|h|^(-d - p s)`
    FracKernel,
    /// `|h|^-d log(1/|h|)^(p - 1)`, the logarithmic kernel at `γ = 1`
    TruncatedLogKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: f64,
    pub p: f64,
    pub s: f64,
    pub outer_radius: f64,
}

impl KernelSpec {
    pub fn log(gamma: f64, p: f64, outer_radius: f64) -> Self {
        KernelSpec {
            kind: KernelKind::LogKernel,
            gamma,
            p,
            s: 0.0,
            outer_radius,
        }
    }

    pub fn frac(s: f64, p: f64, outer_radius: f64) -> Self {
        KernelSpec {
            kind: KernelKind::FracKernel,
            gamma: 0.0,
            p,
            s,
            outer_radius,
        }
    }

    pub fn truncated_log(p: f64, outer_radius: f64) -> Self {
        KernelSpec {
            kind: KernelKind::TruncatedLogKernel,
            gamma: 1.0,
            p,
            s: 0.0,
            outer_radius,
        }
    }

    /// Exponent of `log(1/r)` for the logarithmic kinds.
    fn log_power(&self) -> f64 {
        match self.kind {
            KernelKind::LogKernel => self.p * self.gamma,
            KernelKind::TruncatedLogKernel => self.p,
            KernelKind::FracKernel => f64::NAN,
        }
    }

    /// `r^d K(r)`: the kernel with the scale-invariant factor removed.
    pub fn radial_profile(&self, r: f64) -> f64 {
        match self.kind {
            KernelKind::FracKernel => r.powf(-self.p * self.s),
            _ => (-r.ln()).powf(self.log_power() - 1.0),
        }
    }

    /// Exact `∫_{r_min<|h|<R} K(h) dh`.
    pub fn closed_form_mass(&self, dim: usize, r_min: f64) -> f64 {
        let sigma = sphere_measure(dim);
        let r = self.outer_radius;
        match self.kind {
            KernelKind::FracKernel => {
                let a = self.p * self.s;
                sigma / a * (r_min.powf(-a) - r.powf(-a))
            }
            _ => {
                let a = self.log_power();
                sigma / a * ((-r_min.ln()).powf(a) - (-r.ln()).powf(a))
            }
        }
    }
}

/// Midpoint-in-`ln r` radial nodes times uniform directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialScheme {
    pub dim: usize,
    pub r_min: f64,
    pub outer_radius: f64,
    /// Radial nodes `r_j = r_min (R/r_min)^((j+1/2)/n_r)`.
    pub radii: Vec<f64>,
    /// Weight of each radial node for the measure `dr/r`.
    pub radial_weight: f64,
    /// Unit direction vectors (second entry unused when `d = 1`).
    pub directions: Vec<[f64; 2]>,
    pub angular_weights: Vec<f64>,
}

/// Scheme for logarithmic kernels: requires `R <= 1/2` so `log(1/r) > 0`.
pub fn build_radial_scheme(
    r_min: f64,
    outer_radius: f64,
    n_r: usize,
    n_theta: usize,
    dim: usize,
) -> Result<RadialScheme> {
    if !(outer_radius <= MAX_LOG_RADIUS) {
        return Err(Error::param(
            "outer_radius",
            format!("logarithmic schemes need R <= {MAX_LOG_RADIUS}, got {outer_radius}"),
        ));
    }
    build_scheme(r_min, outer_radius, n_r, n_theta, dim)
}

/// Scheme for the fractional kernel, whose outer radius is not capped.
pub fn build_frac_scheme(
    r_min: f64,
    outer_radius: f64,
    n_r: usize,
    n_theta: usize,
    dim: usize,
) -> Result<RadialScheme> {
    build_scheme(r_min, outer_radius, n_r, n_theta, dim)
}

fn build_scheme(
    r_min: f64,
    outer_radius: f64,
    n_r: usize,
    n_theta: usize,
    dim: usize,
) -> Result<RadialScheme> {
    if !(dim == 1 || dim == 2) {
        return Err(Error::param("dim", format!("must be 1 or 2, got {dim}")));
    }
    if !(r_min > 0.0 && r_min.is_finite()) {
        return Err(Error::param("r_min", format!("must be positive, got {r_min}")));
    }
    if !(outer_radius > r_min && outer_radius.is_finite()) {
        return Err(Error::param(
            "outer_radius",
            format!("must exceed r_min = {r_min}, got {outer_radius}"),
        ));
    }
    if n_r < MIN_RADIAL_NODES {
        return Err(Error::param(
            "n_r",
            format!("need at least {MIN_RADIAL_NODES} radial nodes, got {n_r}"),
        ));
    }
    let (directions, angular_weights) = match dim {
        1 => {
            if n_theta != 2 {
                return Err(Error::param(
                    "n_theta",
                    format!("d = 1 has exactly 2 directions, got {n_theta}"),
                ));
            }
            (vec![[1.0, 0.0], [-1.0, 0.0]], vec![1.0, 1.0])
        }
        _ => {
            if n_theta < 4 {
                return Err(Error::param(
                    "n_theta",
                    format!("need at least 4 directions in d = 2, got {n_theta}"),
                ));
            }
            let w = 2.0 * PI / n_theta as f64;
            let dirs = (0..n_theta)
                .map(|a| {
                    let t = w * a as f64;
                    [t.cos(), t.sin()]
                })
                .collect();
            (dirs, vec![w; n_theta])
        }
    };
    let span = (outer_radius / r_min).ln();
    let radii = (0..n_r)
        .map(|j| r_min * (span * (j as f64 + 0.5) / n_r as f64).exp())
        .collect();
    Ok(RadialScheme {
        dim,
        r_min,
        outer_radius,
        radii,
        radial_weight: span / n_r as f64,
        directions,
        angular_weights,
    })
}

impl RadialScheme {
    pub fn n_r(&self) -> usize {
        self.radii.len()
    }

    pub fn n_theta(&self) -> usize {
        self.directions.len()
    }

    pub fn total_angular_weight(&self) -> f64 {
        self.angular_weights.iter().sum()
    }

    /// Midpoint approximation of `∫_{r_min}^{R} g(r) dr`.
    pub fn integrate_radial(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.radial_weight * self.radii.iter().map(|&r| r * g(r)).sum::<f64>()
    }

    /// Approximation of `∫_{r_min<|h|<R} F(h) |h|^-d k(|h|) dh`.
    pub fn integrate(&self, profile: impl Fn(f64) -> f64, f: impl Fn([f64; 2]) -> f64) -> f64 {
        let mut total = 0.0;
        for &r in &self.radii {
            let k = profile(r);
            let ring: f64 = self
                .directions
                .iter()
                .zip(&self.angular_weights)
                .map(|(dir, w)| w * f([r * dir[0], r * dir[1]]))
                .sum();
            total += k * ring;
        }
        self.radial_weight * total
    }

    pub(crate) fn require_radius(&self, expected: f64, what: &str) -> Result<()> {
        if (self.outer_radius - expected).abs() > 1e-12 * expected {
            return Err(Error::IncompatibleScheme(format!(
                "{what} needs outer radius {expected}, scheme has {}",
                self.outer_radius
            )));
        }
        Ok(())
    }
}

/// User-settable scheme resolution. `r_min = None` means one grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemeOptions {
    pub r_min: Option<f64>,
    pub n_r: usize,
    /// Directions in d = 2 (d = 1 always uses the two directions ±1).
    pub n_theta: usize,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions {
            r_min: None,
            n_r: 256,
            n_theta: 32,
        }
    }
}

impl SchemeOptions {
    pub fn with_r_min(self, r_min: f64) -> Self {
        SchemeOptions {
            r_min: Some(r_min),
            ..self
        }
    }

    pub fn resolved_r_min(&self, dom: &Domain) -> f64 {
        self.r_min.unwrap_or_else(|| dom.spacing())
    }

    fn directions(&self, dim: usize) -> usize {
        if dim == 1 {
            2
        } else {
            self.n_theta
        }
    }

    /// Logarithmic-kernel scheme on `B_R` for functions sampled on `dom`.
    pub fn log_scheme(&self, dom: &Domain, outer_radius: f64) -> Result<RadialScheme> {
        build_radial_scheme(
            self.resolved_r_min(dom),
            outer_radius,
            self.n_r,
            self.directions(dom.dim),
            dom.dim,
        )
    }

    /// Fractional-kernel scheme with outer radius `4 L`.
    pub fn frac_scheme(&self, dom: &Domain) -> Result<RadialScheme> {
        build_frac_scheme(
            self.resolved_r_min(dom),
            frac_outer_radius(dom),
            self.n_r,
            self.directions(dom.dim),
            dom.dim,
        )
    }
}

/// Outer cutoff of the fractional kernel: four box half-widths, beyond the
/// diameter of any function supported in the box.
pub fn frac_outer_radius(dom: &Domain) -> f64 {
    4.0 * dom.half_width
}

/// Numerical `∫_{r_min<|h|<R} K(h) dh` over the scheme.
pub fn kernel_mass(spec: &KernelSpec, scheme: &RadialScheme) -> Result<f64> {
    scheme.require_radius(spec.outer_radius, "kernel_mass")?;
    Ok(scheme.integrate(|r| spec.radial_profile(r), |_| 1.0))
}
