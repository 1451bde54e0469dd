//! Pointwise functionals and the pairwise Lusin / Hajłasz checks.
//!
//! `L_{γ,p}f` and `D_{s,p}f` are the inner integrals of the double-integral
//! seminorms, evaluated node by node. They live on the box enlarged by the
//! reach of the quadrature so that their `L^p` norms reproduce the seminorms.
//! The maximal-type functionals `Mf` and `Φ*_{s,q}f` are evaluated on the box
//! nodes only, with the supremum over `r > 0` replaced by the dyadic radii
//! `Δ·2^k <= 2L` and averages taken over the box cells of the open discrete
//! ball `{y : |y - x| < r}`.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{write_node_csv, Domain, SampledFunction};
use crate::quadrature::RadialScheme;
use crate::reduce;
use crate::seminorms::{
    frac_table, frac_tail_factor, log_table, pointwise_integral, x_seminorm_pow, SeminormParams,
};

/// Pairs whose denominator falls below this are treated as degenerate.
pub const DEGENERATE: f64 = 1e-12;
/// Exponents are clamped here before `exp`.
pub const EXP_CLAMP: f64 = 700.0;
/// Upper separation bound for the Lusin-type estimates.
pub const PAIR_SEPARATION_MAX: f64 = 1.0 / 36.0;
pub const DEFAULT_PAIR_COUNT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    LusinL,
    FracD,
    PhiStar,
    HlMaximal,
}

/// A nonnegative value per node of `domain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFunctional {
    pub domain: Domain,
    pub values: Vec<f64>,
    pub kind: FunctionalKind,
    pub params: SeminormParams,
}

impl PointFunctional {
    /// `(Σ v^p Δ^d)^{1/p}` over the functional's own domain.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|v| v.powf(p)).collect();
        (reduce::tree_sum(&terms) * self.domain.cell_volume()).powf(1.0 / p)
    }

    /// Value at the node whose cell contains `x`, zero outside the domain.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.domain.cell_of(x).map_or(0.0, |k| self.values[k])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Node coordinates and values as CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_node_csv(&self.domain, &self.values, out)
    }
}

/// `L_{γ,p}f(x) = (∫_{B_{1/3}} |f(x+h) - f(x)|^p |h|^{-d} log(1/|h|)^{pγ-1} dh)^{1/p}`.
pub fn lusin_functional(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<PointFunctional> {
    let table = log_table(f, params, scheme)?;
    let p = params.p;
    let (domain, raw) = pointwise_integral(f, &table, move |t| t.powf(p));
    Ok(PointFunctional {
        domain,
        values: raw.into_iter().map(|v| v.max(0.0).powf(1.0 / p)).collect(),
        kind: FunctionalKind::LusinL,
        params: *params,
    })
}

/// `D_{s,p}f(x) = (∫ |f(x+h) - f(x)|^p |h|^{-d-ps} dh)^{1/p}`, with the part
/// beyond the outer cutoff replaced by `2^p |f(x)|^p σ_{d-1} / (ps R^{ps})`.
pub fn frac_functional(f: &SampledFunction, params: &SeminormParams, scheme: &RadialScheme) -> Result<PointFunctional> {
    let table = frac_table(f, params, scheme)?;
    let p = params.p;
    let (domain, raw) = pointwise_integral(f, &table, move |t| t.powf(p));
    let tail = frac_tail_factor(f.domain().dim, params, scheme.outer_radius);
    let pad = ((domain.points_per_axis - f.domain().points_per_axis) / 2) as i64;
    let values = (0..domain.len())
        .map(|k| {
            let idx = domain.lattice(k);
            let fx = if domain.dim == 1 {
                f.at([idx[0] - pad, 0])
            } else {
                f.at([idx[0] - pad, idx[1] - pad])
            };
            (raw[k] + tail * fx.abs().powf(p)).max(0.0).powf(1.0 / p)
        })
        .collect();
    Ok(PointFunctional {
        domain,
        values,
        kind: FunctionalKind::FracD,
        params: *params,
    })
}

/// Number of dyadic radii `Δ·2^k <= 2L`.
pub fn dyadic_radius_count(dom: &Domain) -> usize {
    let mut k = 0;
    while (1usize << k) <= dom.points_per_axis {
        k += 1;
    }
    k
}

/// Dyadic radii `Δ·2^k <= 2L` in physical units.
pub fn dyadic_radii(dom: &Domain) -> Vec<f64> {
    (0..dyadic_radius_count(dom))
        .map(|k| dom.spacing() * (1u64 << k) as f64)
        .collect()
}

/// Largest `w >= 0` with `w^2 <= t`.
fn isqrt(t: i64) -> i64 {
    let mut w = (t as f64).sqrt() as i64;
    while w * w > t {
        w -= 1;
    }
    while (w + 1) * (w + 1) <= t {
        w += 1;
    }
    w
}

/// Half-widths of the rows of the open discrete disk of radius `rad` cells:
/// entry `dy + rad - 1` is the largest `|dx|` with `dx^2 + dy^2 < rad^2`.
fn disk_rows(rad: i64) -> Vec<i64> {
    (-(rad - 1)..rad).map(|dy| isqrt(rad * rad - dy * dy - 1)).collect()
}

/// Offsets of the open discrete ball of radius `rad` cells that are not in
/// the ball of radius `inner` cells.
fn ring_offsets(dim: usize, rad: i64, inner: i64) -> Vec<[i64; 2]> {
    let inside = |m: [i64; 2], r: i64| m[0] * m[0] + m[1] * m[1] < r * r;
    let mut out = Vec::new();
    if dim == 1 {
        for dx in -(rad - 1)..rad {
            if !inside([dx, 0], inner) {
                out.push([dx, 0]);
            }
        }
    } else {
        for dy in -(rad - 1)..rad {
            for dx in -(rad - 1)..rad {
                let m = [dx, dy];
                if inside(m, rad) && !inside(m, inner) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Hardy–Littlewood maximal function of `|f|` over the dyadic radii.
pub fn hl_maximal(f: &SampledFunction) -> PointFunctional {
    let dom = *f.domain();
    let n = dom.points_per_axis;
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let radii: Vec<i64> = (0..dyadic_radius_count(&dom)).map(|k| 1i64 << k).collect();

    // row prefix sums of |f|, one row per second-axis index
    let rows = if dom.dim == 1 { 1 } else { n };
    let mut prefix = vec![0.0; rows * (n + 1)];
    for j in 0..rows {
        for i in 0..n {
            prefix[j * (n + 1) + i + 1] = prefix[j * (n + 1) + i] + abs[i + n * j];
        }
    }
    let row_sum = |j: i64, lo: i64, hi: i64| -> f64 {
        // Σ_{lo <= i <= hi} |f(i, j)|, zero outside the box
        if j < 0 || j >= rows as i64 {
            return 0.0;
        }
        let lo = lo.max(0);
        let hi = hi.min(n as i64 - 1);
        if lo > hi {
            return 0.0;
        }
        let base = j as usize * (n + 1);
        prefix[base + hi as usize + 1] - prefix[base + lo as usize]
    };
    let disks: Vec<Vec<i64>> = radii.iter().map(|&r| disk_rows(r)).collect();
    let clip = |lo: i64, hi: i64| (hi.min(n as i64 - 1) - lo.max(0) + 1).max(0) as f64;

    let values = reduce::map_indexed(dom.len(), |k| {
        let x = dom.lattice(k);
        let mut best = 0.0f64;
        for (ri, &r) in radii.iter().enumerate() {
            let (total, count) = if dom.dim == 1 {
                let (lo, hi) = (x[0] - (r - 1), x[0] + (r - 1));
                (row_sum(0, lo, hi), clip(lo, hi))
            } else {
                disks[ri].iter().enumerate().fold((0.0, 0.0), |(s, c), (t, &w)| {
                    let j = x[1] + t as i64 - (r - 1);
                    if j < 0 || j >= n as i64 {
                        (s, c)
                    } else {
                        (s + row_sum(j, x[0] - w, x[0] + w), c + clip(x[0] - w, x[0] + w))
                    }
                })
            };
            best = best.max(total / count);
        }
        best
    });
    PointFunctional {
        domain: dom,
        values,
        kind: FunctionalKind::HlMaximal,
        params: SeminormParams::default(),
    }
}

/// `Φ*_{s,q}f(x) = max_r ⨍_{B_r(x)} log(1 + |f(x) - f(y)| / r^s)^q dy` over
/// the dyadic radii.
pub fn phi_star(f: &SampledFunction, s: f64, q: f64) -> Result<PointFunctional> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::param("s", format!("must lie in (0, 1], got {s}")));
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::param("q", format!("must be at least 1, got {q}")));
    }
    let dom = *f.domain();
    let radii: Vec<i64> = (0..dyadic_radius_count(&dom)).map(|k| 1i64 << k).collect();
    let rings: Vec<Vec<[i64; 2]>> = radii
        .iter()
        .enumerate()
        .map(|(k, &r)| ring_offsets(dom.dim, r, if k == 0 { 0 } else { radii[k - 1] }))
        .collect();
    let scale: Vec<f64> = radii
        .iter()
        .map(|&r| (r as f64 * dom.spacing()).powf(-s))
        .collect();

    let values = reduce::map_indexed(dom.len(), |k| {
        let x = dom.lattice(k);
        let fx = f.values()[k];
        let mut best = 0.0f64;
        let mut diffs: Vec<f64> = Vec::new();
        for (ri, ring) in rings.iter().enumerate() {
            diffs.extend(ring.iter().filter_map(|m| {
                dom.flat([x[0] + m[0], x[1] + m[1]])
                    .map(|j| (fx - f.values()[j]).abs())
            }));
            let c = scale[ri];
            let total: f64 = diffs.iter().map(|&d| (d * c).ln_1p().powf(q)).sum();
            best = best.max(total / diffs.len() as f64);
        }
        best
    });
    let params = SeminormParams {
        s,
        q,
        ..SeminormParams::default()
    };
    Ok(PointFunctional {
        domain: dom,
        values,
        kind: FunctionalKind::PhiStar,
        params,
    })
}

/// Seeded point pairs inside the box with separations in `[δ_min, δ_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub pairs: Vec<([f64; 2], [f64; 2])>,
    pub delta_min: f64,
    pub delta_max: f64,
    pub seed: u64,
}

impl PairSample {
    /// Separations log-uniform in `[4Δ, 1/36 - ε]`.
    pub fn generate(dom: &Domain, count: usize, seed: u64) -> Result<Self> {
        let delta_max = PAIR_SEPARATION_MAX * (1.0 - 1e-9);
        Self::with_bounds(dom, count, 4.0 * dom.spacing(), delta_max, seed)
    }

    /// Points uniform in the box, separation log-uniform in the bounds, and
    /// a uniform direction. Pairs leaving the box are redrawn.
    pub fn with_bounds(dom: &Domain, count: usize, delta_min: f64, delta_max: f64, seed: u64) -> Result<Self> {
        if !(delta_min > 0.0 && delta_min <= delta_max) {
            return Err(Error::param(
                "delta_min",
                format!("need 0 < delta_min <= delta_max, got [{delta_min}, {delta_max}] (grid too coarse?)"),
            ));
        }
        if delta_max >= dom.half_width {
            return Err(Error::param("delta_max", "must be smaller than the box half-width"));
        }
        let l = dom.half_width;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = (delta_min.ln(), delta_max.ln());
        let mut pairs = Vec::with_capacity(count);
        while pairs.len() < count {
            let mut x = [0.0; 2];
            for c in x.iter_mut().take(dom.dim) {
                *c = rng.random_range(-l..l);
            }
            let delta = if hi > lo { rng.random_range(lo..hi).exp() } else { delta_min };
            let dir = if dom.dim == 1 {
                [if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0]
            } else {
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                [t.cos(), t.sin()]
            };
            let y = [x[0] + delta * dir[0], x[1] + delta * dir[1]];
            if y.iter().take(dom.dim).all(|c| c.abs() < l) {
                pairs.push((x, y));
            }
        }
        Ok(PairSample {
            pairs,
            delta_min,
            delta_max,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn distance(x: &[f64; 2], y: &[f64; 2]) -> f64 {
    (x[0] - y[0]).hypot(x[1] - y[1])
}

/// Outcome of a pairwise inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRatio {
    /// Largest numerator / denominator over the usable pairs; `+∞` when a
    /// pair has a vanishing denominator but a nonzero numerator.
    pub ratio: f64,
    pub used: usize,
    /// Pairs with vanishing numerator and denominator.
    pub skipped: usize,
    /// Pairs with vanishing denominator and nonzero numerator.
    pub violations: usize,
    /// Pairs whose exponent was clamped before `exp`.
    pub clamped: usize,
    /// Index of the pair attaining `ratio`.
    pub worst_pair: Option<usize>,
}

fn pair_ratio(pairs: &PairSample, term: impl Fn(&[f64; 2], &[f64; 2]) -> (f64, f64, bool) + Sync) -> Result<PairRatio> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairSet { skipped: 0 });
    }
    let terms = reduce::map_indexed(pairs.len(), |k| {
        let (x, y) = &pairs.pairs[k];
        term(x, y)
    });
    let mut out = PairRatio {
        ratio: 0.0,
        used: 0,
        skipped: 0,
        violations: 0,
        clamped: 0,
        worst_pair: None,
    };
    for (k, &(num, den, clamped)) in terms.iter().enumerate() {
        if clamped {
            out.clamped += 1;
        }
        if den < DEGENERATE {
            if num < DEGENERATE {
                out.skipped += 1;
                continue;
            }
            out.violations += 1;
            if out.ratio < f64::INFINITY {
                out.ratio = f64::INFINITY;
                out.worst_pair = Some(k);
            }
            continue;
        }
        out.used += 1;
        let r = num / den;
        if r > out.ratio {
            out.ratio = r;
            out.worst_pair = Some(k);
        }
    }
    Ok(out)
}

/// `max |f(x) - f(y)| log(1/|x-y|)^γ / (L(x) + L(y))` with `L` precomputed.
pub fn lusin_pair_ratio_with(f: &SampledFunction, l: &PointFunctional, gamma: f64, pairs: &PairSample) -> Result<PairRatio> {
    check_pairs(pairs)?;
    pair_ratio(pairs, |x, y| {
        let num = (f.evaluate(x) - f.evaluate(y)).abs() * (-distance(x, y).ln()).powf(gamma);
        (num, l.value_at(x) + l.value_at(y), false)
    })
}

/// [`lusin_pair_ratio_with`] after computing `L_{γ,p}f`.
pub fn lusin_pair_ratio(
    f: &SampledFunction,
    params: &SeminormParams,
    scheme: &RadialScheme,
    pairs: &PairSample,
) -> Result<PairRatio> {
    let l = lusin_functional(f, params, scheme)?;
    lusin_pair_ratio_with(f, &l, params.gamma, pairs)
}

/// `max |f(x) - f(y)| |x-y|^{-s} / (D(x) + D(y))` with `D` precomputed.
pub fn holder_pair_ratio_with(f: &SampledFunction, d: &PointFunctional, s: f64, pairs: &PairSample) -> Result<PairRatio> {
    pair_ratio(pairs, |x, y| {
        let num = (f.evaluate(x) - f.evaluate(y)).abs() * distance(x, y).powf(-s);
        (num, d.value_at(x) + d.value_at(y), false)
    })
}

/// [`holder_pair_ratio_with`] after computing `D_{s,p}f`.
pub fn holder_pair_ratio(
    f: &SampledFunction,
    params: &SeminormParams,
    scheme: &RadialScheme,
    pairs: &PairSample,
) -> Result<PairRatio> {
    let d = frac_functional(f, params, scheme)?;
    holder_pair_ratio_with(f, &d, params.s, pairs)
}

fn check_pairs(pairs: &PairSample) -> Result<()> {
    if pairs.delta_max >= PAIR_SEPARATION_MAX {
        return Err(Error::param(
            "delta_max",
            format!("pairs must be closer than 1/36, got {}", pairs.delta_max),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessRole {
    /// `|f(x) - f(y)| <= |x-y|^s (exp(g(x) + g(y)) - 1)`.
    Hajlasz,
    /// `|f(x) - f(y)| <= log(1/|x-y|)^{-γ} (g(x) + g(y))`.
    LusinConverse,
}

/// A nonnegative candidate `g` for one of the pointwise inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateWitness {
    pub g: SampledFunction,
    pub role: WitnessRole,
}

impl CandidateWitness {
    pub fn new(g: SampledFunction, role: WitnessRole) -> Result<Self> {
        if let Some(v) = g.values().iter().find(|&&v| v < 0.0) {
            return Err(Error::param("witness", format!("g must be nonnegative, found {v}")));
        }
        Ok(CandidateWitness { g, role })
    }

    pub fn constant(dom: &Domain, c: f64, role: WitnessRole) -> Result<Self> {
        Self::new(SampledFunction::new(*dom, vec![c; dom.len()])?, role)
    }

    /// Hajłasz witness for a `K`-Lipschitz function: `g = log(1 + K)`, so
    /// that `exp(2g) - 1 >= K`.
    pub fn lipschitz_hajlasz(dom: &Domain, k: f64) -> Result<Self> {
        Self::constant(dom, k.max(0.0).ln_1p(), WitnessRole::Hajlasz)
    }

    /// Lusin-converse witness for a `K`-Lipschitz function: the constant
    /// `K δ log(1/δ)^γ / 2` at `δ = 1/36`, where `δ log(1/δ)^γ` peaks on
    /// `(0, 1/36]` for `γ < log 36`.
    pub fn lipschitz_lusin(dom: &Domain, k: f64, gamma: f64) -> Result<Self> {
        let d = PAIR_SEPARATION_MAX;
        let c = k.max(0.0) * d * (-d.ln()).powf(gamma) / 2.0;
        Self::constant(dom, c, WitnessRole::LusinConverse)
    }

    /// Hajłasz witness for a piecewise constant function:
    /// `g(x) = log(1 + 2J / dist(x, jumps))`, where `J` is the largest jump
    /// between neighbouring cells and the jumps sit on the cell faces.
    pub fn jump_hajlasz(f: &SampledFunction) -> Result<Self> {
        let dom = *f.domain();
        let n = dom.points_per_axis as i64;
        let dx = dom.spacing();
        let mut faces: Vec<[f64; 2]> = Vec::new();
        let mut jump = 0.0f64;
        let mut visit = |a: [i64; 2], b: [i64; 2]| {
            let d = (f.at(a) - f.at(b)).abs();
            if d > 0.0 {
                jump = jump.max(d);
                let ca = [dom.center(a[0]), if dom.dim == 2 { dom.center(a[1]) } else { 0.0 }];
                let cb = [dom.center(b[0]), if dom.dim == 2 { dom.center(b[1]) } else { 0.0 }];
                faces.push([(ca[0] + cb[0]) / 2.0, (ca[1] + cb[1]) / 2.0]);
            }
        };
        let (lo1, hi1) = if dom.dim == 1 { (0, 0) } else { (-1, n) };
        for j in lo1..=hi1 {
            for i in -1..n {
                visit([i, j], [i + 1, j]);
                if dom.dim == 2 && j < n {
                    visit([i + 1, j], [i + 1, j + 1]);
                }
            }
        }
        if faces.is_empty() {
            return Self::constant(&dom, 0.0, WitnessRole::Hajlasz);
        }
        let g = SampledFunction::from_fn(dom, |x| {
            let dist = faces
                .iter()
                .map(|c| (x[0] - c[0]).hypot(if dom.dim == 2 { x[1] - c[1] } else { 0.0 }))
                .fold(f64::INFINITY, f64::min)
                .max(dx / 2.0);
            (2.0 * jump / dist).ln_1p()
        })?;
        Self::new(g, WitnessRole::Hajlasz)
    }
}

/// `max |f(x) - f(y)| / (|x-y|^s (exp(g(x) + g(y)) - 1))`; a value `<= 1`
/// certifies the Hajłasz-type inequality on the sample.
pub fn hajlasz_check(f: &SampledFunction, witness: &CandidateWitness, s: f64, pairs: &PairSample) -> Result<PairRatio> {
    if witness.role != WitnessRole::Hajlasz {
        return Err(Error::param("witness", "role must be hajlasz"));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::param("s", format!("must lie in (0, 1], got {s}")));
    }
    let g = &witness.g;
    pair_ratio(pairs, |x, y| {
        let num = (f.evaluate(x) - f.evaluate(y)).abs();
        let e = g.evaluate(x) + g.evaluate(y);
        let clamped = e > EXP_CLAMP;
        let den = distance(x, y).powf(s) * e.min(EXP_CLAMP).exp_m1();
        (num, den, clamped)
    })
}

/// Both sides of the converse estimate, plus the hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LusinConverse {
    /// `⟦f⟧_{X^{α,p}}^p`.
    pub seminorm_pow: f64,
    /// `‖g‖_p^p / (p (γ - α))`.
    pub bound: f64,
    /// `max |f(x) - f(y)| log(1/|x-y|)^γ / (g(x) + g(y))` over the sample.
    pub hypothesis: PairRatio,
    /// False when the sample contradicts the hypothesis; the two sides are
    /// still computed.
    pub hypothesis_holds: bool,
}

impl LusinConverse {
    /// `seminorm_pow / bound`, the empirical constant.
    pub fn constant(&self) -> Option<f64> {
        (self.bound > 0.0).then(|| self.seminorm_pow / self.bound)
    }
}

/// From `|f(x) - f(y)| <= log(1/|x-y|)^{-γ}(g(x) + g(y))` to the seminorm
/// bound at any `α < γ`.
pub fn lusin_converse_seminorm(
    f: &SampledFunction,
    witness: &CandidateWitness,
    gamma: f64,
    alpha: f64,
    p: f64,
    scheme: &RadialScheme,
    pairs: &PairSample,
) -> Result<LusinConverse> {
    if witness.role != WitnessRole::LusinConverse {
        return Err(Error::param("witness", "role must be lusin_converse"));
    }
    if !(alpha > 0.0 && alpha < gamma) {
        return Err(Error::param("alpha", format!("need 0 < alpha < gamma = {gamma}, got {alpha}")));
    }
    check_pairs(pairs)?;
    let g = &witness.g;
    let hypothesis = pair_ratio(pairs, |x, y| {
        let num = (f.evaluate(x) - f.evaluate(y)).abs() * (-distance(x, y).ln()).powf(gamma);
        (num, g.evaluate(x) + g.evaluate(y), false)
    })?;
    let seminorm_pow = x_seminorm_pow(f, &SeminormParams::log(alpha, p), scheme)?;
    let bound = g.lp_norm(p)?.powf(p) / (p * (gamma - alpha));
    Ok(LusinConverse {
        seminorm_pow,
        bound,
        hypothesis,
        hypothesis_holds: hypothesis.ratio <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, AnalyticFunction};
    use crate::quadrature::{SchemeOptions, SEMINORM_RADIUS};
    use crate::seminorms::{w_seminorm, x_seminorm};

    fn dom1(n: usize) -> Domain {
        Domain::new(1, 1.0, n).unwrap()
    }

    fn log_scheme(dom: &Domain) -> RadialScheme {
        SchemeOptions::default().log_scheme(dom, SEMINORM_RADIUS).unwrap()
    }

    #[test]
    fn constants_give_zero_functionals() {
        let dom = dom1(128);
        let f = sample(&AnalyticFunction::constant(0.0), &dom).unwrap();
        let c = sample(&AnalyticFunction::constant(2.5), &dom).unwrap();
        let scheme = log_scheme(&dom);
        let l = lusin_functional(&f, &SeminormParams::log(0.5, 1.0), &scheme).unwrap();
        assert!(l.values.iter().all(|&v| v == 0.0));
        assert!(phi_star(&c, 0.5, 1.0).unwrap().values.iter().all(|&v| v == 0.0));
        let m = hl_maximal(&f);
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn maximal_of_constant_box_interior() {
        let dom = dom1(64);
        let c = sample(&AnalyticFunction::constant(3.0), &dom).unwrap();
        let m = hl_maximal(&c);
        assert!(m.values.iter().all(|&v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn maximal_dominates_abs_value() {
        for dim in [1, 2] {
            let dom = Domain::new(dim, 1.0, 32).unwrap();
            let f = sample(&AnalyticFunction::trig_poly(3, 4), &dom).unwrap();
            let m = hl_maximal(&f);
            for (v, fv) in m.values.iter().zip(f.values()) {
                assert!(*v >= fv.abs() - 1e-12);
            }
        }
    }

    #[test]
    fn maximal_matches_brute_force_in_2d() {
        let dom = Domain::new(2, 1.0, 16).unwrap();
        let f = sample(&AnalyticFunction::trig_poly(5, 3), &dom).unwrap();
        let m = hl_maximal(&f);
        for k in (0..dom.len()).step_by(7) {
            let x = dom.lattice(k);
            let mut best = 0.0f64;
            for kk in 0..dyadic_radius_count(&dom) {
                let r = 1i64 << kk;
                let (mut s, mut c) = (0.0, 0.0);
                for dy in -r..=r {
                    for dx in -r..=r {
                        if let (true, Some(j)) = (dx * dx + dy * dy < r * r, dom.flat([x[0] + dx, x[1] + dy])) {
                            s += f.values()[j].abs();
                            c += 1.0;
                        }
                    }
                }
                best = best.max(s / c);
            }
            assert!((m.values[k] - best).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_star_lipschitz_bound() {
        // Φ*_1 g <= log(1 + K) with K the grid Lipschitz constant
        let dom = dom1(256);
        let f = sample(&AnalyticFunction::gaussian(0.3), &dom).unwrap();
        let k = f
            .values()
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / dom.spacing())
            .fold(0.0, f64::max);
        let phi = phi_star(&f, 1.0, 1.0).unwrap();
        assert!(phi.max() <= k.ln_1p() + 1e-12);
    }

    #[test]
    fn phi_star_validation() {
        let dom = dom1(32);
        let f = sample(&AnalyticFunction::gaussian(0.3), &dom).unwrap();
        assert!(phi_star(&f, 0.0, 1.0).is_err());
        assert!(phi_star(&f, 1.5, 1.0).is_err());
        assert!(phi_star(&f, 0.5, 0.5).is_err());
    }

    #[test]
    fn fubini_identities() {
        let dom = dom1(256);
        let f = sample(&AnalyticFunction::indicator_ball(0.125), &dom).unwrap();
        let params = SeminormParams::log(0.5, 2.0);
        let scheme = log_scheme(&dom);
        let l = lusin_functional(&f, &params, &scheme).unwrap();
        let x = x_seminorm(&f, &params, &scheme).unwrap();
        assert!((l.lp_norm(2.0) / x - 1.0).abs() < 1e-9);

        let fp = SeminormParams::frac(0.5, 1.0);
        let fs = SchemeOptions::default().frac_scheme(&dom).unwrap();
        let d = frac_functional(&f, &fp, &fs).unwrap();
        let w = w_seminorm(&f, &fp, &fs).unwrap();
        assert!((d.lp_norm(1.0) / w.value() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pair_sample_is_seeded_and_bounded() {
        let dom = dom1(1024);
        let a = PairSample::generate(&dom, 500, 7).unwrap();
        let b = PairSample::generate(&dom, 500, 7).unwrap();
        assert_eq!(a, b);
        for (x, y) in &a.pairs {
            let d = distance(x, y);
            assert!(d >= a.delta_min * (1.0 - 1e-12) && d <= a.delta_max * (1.0 + 1e-12));
            assert!(x[0].abs() < 1.0 && y[0].abs() < 1.0);
        }
        let coarse = dom1(16);
        assert!(PairSample::generate(&coarse, 10, 0).is_err());
    }

    #[test]
    fn constant_pairs_are_all_skipped() {
        let dom = dom1(1024);
        // the zero extension turns a nonzero constant into a box indicator
        let f = sample(&AnalyticFunction::constant(0.0), &dom).unwrap();
        let pairs = PairSample::generate(&dom, 200, 1).unwrap();
        let r = lusin_pair_ratio(&f, &SeminormParams::log(0.5, 1.0), &log_scheme(&dom), &pairs).unwrap();
        assert_eq!((r.ratio, r.skipped, r.used), (0.0, 200, 0));
        let empty = PairSample {
            pairs: vec![],
            ..pairs
        };
        assert!(matches!(
            lusin_pair_ratio(&f, &SeminormParams::log(0.5, 1.0), &log_scheme(&dom), &empty),
            Err(Error::EmptyPairSet { .. })
        ));
    }

    #[test]
    fn zero_denominator_with_jump_is_a_violation() {
        let dom = dom1(1024);
        let f = sample(&AnalyticFunction::indicator_ball(0.25), &dom).unwrap();
        let w = CandidateWitness::constant(&dom, 0.0, WitnessRole::Hajlasz).unwrap();
        let pairs = PairSample::generate(&dom, 2000, 3).unwrap();
        let r = hajlasz_check(&f, &w, 1.0, &pairs).unwrap();
        assert!(r.violations > 0);
        assert_eq!(r.ratio, f64::INFINITY);
    }

    #[test]
    fn hajlasz_lipschitz_witness_certifies() {
        let dom = dom1(1024);
        let f = sample(&AnalyticFunction::gaussian(0.2), &dom).unwrap();
        let k = f
            .values()
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / dom.spacing())
            .fold(0.0, f64::max);
        let w = CandidateWitness::lipschitz_hajlasz(&dom, 1.05 * k).unwrap();
        let pairs = PairSample::generate(&dom, 2000, 4).unwrap();
        let r = hajlasz_check(&f, &w, 1.0, &pairs).unwrap();
        assert!(r.ratio <= 1.0, "{r:?}");
        let zero = sample(&AnalyticFunction::constant(0.0), &dom).unwrap();
        assert_eq!(hajlasz_check(&zero, &w, 1.0, &pairs).unwrap().ratio, 0.0);
    }

    #[test]
    fn jump_witness_certifies_indicator() {
        let dom = dom1(1024);
        let f = sample(&AnalyticFunction::indicator_ball(0.125), &dom).unwrap();
        let w = CandidateWitness::jump_hajlasz(&f).unwrap();
        let pairs = PairSample::generate(&dom, 4000, 5).unwrap();
        let r = hajlasz_check(&f, &w, 1.0, &pairs).unwrap();
        assert!(r.ratio <= 1.0, "{r:?}");
    }

    #[test]
    fn witness_must_be_nonnegative() {
        let dom = dom1(32);
        let g = SampledFunction::new(dom, vec![-1.0; 32]).unwrap();
        assert!(CandidateWitness::new(g, WitnessRole::Hajlasz).is_err());
    }

    #[test]
    fn exp_is_clamped() {
        let dom = dom1(1024);
        let f = sample(&AnalyticFunction::gaussian(0.2), &dom).unwrap();
        let w = CandidateWitness::constant(&dom, 400.0, WitnessRole::Hajlasz).unwrap();
        let pairs = PairSample::generate(&dom, 100, 4).unwrap();
        let r = hajlasz_check(&f, &w, 1.0, &pairs).unwrap();
        assert_eq!(r.clamped, 100);
        assert!(r.ratio.is_finite());
    }

    #[test]
    fn lusin_converse_trivial_and_lipschitz() {
        let dom = dom1(512);
        let scheme = log_scheme(&dom);
        let pairs = PairSample::generate(&dom, 1000, 2).unwrap();
        let c = sample(&AnalyticFunction::constant(0.0), &dom).unwrap();
        let w0 = CandidateWitness::constant(&dom, 0.0, WitnessRole::LusinConverse).unwrap();
        let out = lusin_converse_seminorm(&c, &w0, 1.0, 0.5, 1.0, &scheme, &pairs).unwrap();
        assert_eq!((out.seminorm_pow, out.bound), (0.0, 0.0));
        assert!(out.hypothesis_holds);

        let f = sample(&AnalyticFunction::gaussian(0.2), &dom).unwrap();
        let k = f
            .values()
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / dom.spacing())
            .fold(0.0, f64::max);
        let w = CandidateWitness::lipschitz_lusin(&dom, 1.05 * k, 1.0).unwrap();
        let out = lusin_converse_seminorm(&f, &w, 1.0, 0.5, 1.0, &scheme, &pairs).unwrap();
        assert!(out.hypothesis_holds, "{:?}", out.hypothesis);
        assert!(out.constant().unwrap().is_finite());
        assert!(lusin_converse_seminorm(&f, &w, 1.0, 1.0, 1.0, &scheme, &pairs).is_err());
    }
}
