//! Norms on `R^n` (n ≥ 2) and estimates of their moduli of convexity and
//! smoothness.
//!
//! The norm universe is the (weighted) p-norm family with `p ∈ [1, ∞]`;
//! `f64::INFINITY` is the distinguished value for the sup norm. The moduli
//!
//! ```text
//! δ_X(ε) = inf { 1 − ‖x+y‖/2 : ‖x‖ = ‖y‖ = 1, ‖x−y‖ = ε }
//! ρ_X(τ) = sup { (‖x+y‖ + ‖x−y‖)/2 − 1 : ‖x‖ = 1, ‖y‖ = τ }
//! ```
//!
//! are estimated by constrained sampling over the unit sphere with
//! golden-section refinement. The convexity estimate is an upper bound on the
//! infimum and the smoothness estimate a lower bound on the supremum, both up
//! to solver tolerance.

use crate::error::{Error, Result};
use crate::quadrature::golden_min;
use crate::vecn;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A finite-dimensional norm: plain or weighted p-norm, `p ∈ [1, ∞]`.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    PNorm { p: f64, dim: usize },
    WeightedPNorm { p: f64, weights: Vec<f64> },
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("norm exponent must satisfy p >= 1, got {p}")));
    }
    Ok(())
}

impl NormSpec {
    /// The p-norm on `R^dim`.
    pub fn p_norm(p: f64, dim: usize) -> Result<Self> {
        check_exponent(p)?;
        if dim < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
        }
        Ok(NormSpec::PNorm { p, dim })
    }

    /// The weighted p-norm `(Σ w_i |x_i|^p)^(1/p)` (for `p = ∞`: `max w_i |x_i|`).
    pub fn weighted_p_norm(p: f64, weights: Vec<f64>) -> Result<Self> {
        check_exponent(p)?;
        if weights.len() < 2 {
            return Err(Error::invalid("weight vector must have length >= 2"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("all weights must be strictly positive and finite"));
        }
        Ok(NormSpec::WeightedPNorm { p, weights })
    }

    pub fn euclidean(dim: usize) -> Self {
        NormSpec::PNorm { p: 2.0, dim }
    }

    pub fn sup_norm(dim: usize) -> Self {
        NormSpec::PNorm { p: f64::INFINITY, dim }
    }

    pub fn taxicab(dim: usize) -> Self {
        NormSpec::PNorm { p: 1.0, dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::PNorm { dim, .. } => *dim,
            NormSpec::WeightedPNorm { weights, .. } => weights.len(),
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            NormSpec::PNorm { p, .. } | NormSpec::WeightedPNorm { p, .. } => *p,
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: v.len() });
        }
        Ok(())
    }

    /// `‖v‖` per this spec.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.nrm(v))
    }

    /// `‖x − y‖`.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.dist(x, y))
    }

    /// Dual norm `‖a‖_* = sup { a·x : ‖x‖ ≤ 1 }`, used for hyperplane
    /// boundary distances.
    pub fn dual_norm(&self, a: &[f64]) -> Result<f64> {
        self.check_dim(a)?;
        let p = self.p();
        Ok(match self {
            NormSpec::PNorm { .. } => {
                let q = dual_exponent(p);
                p_norm_raw(a, q)
            }
            NormSpec::WeightedPNorm { weights, .. } => {
                if p.is_infinite() {
                    // ‖x‖ = max w_i |x_i| <= 1  <=>  |x_i| <= 1/w_i
                    a.iter().zip(weights).map(|(ai, wi)| ai.abs() / wi).sum()
                } else if p == 1.0 {
                    a.iter()
                        .zip(weights)
                        .map(|(ai, wi)| ai.abs() / wi)
                        .fold(0.0, f64::max)
                } else {
                    // Hölder against u_i = w_i^(1/p) x_i.
                    let q = dual_exponent(p);
                    let scaled: Vec<f64> =
                        a.iter().zip(weights).map(|(ai, wi)| ai / wi.powf(1.0 / p)).collect();
                    p_norm_raw(&scaled, q)
                }
            }
        })
    }

    /// Infallible norm for validated inputs; hot-path core of [`Self::norm`].
    pub(crate) fn nrm(&self, v: &[f64]) -> f64 {
        match self {
            NormSpec::PNorm { p, .. } => p_norm_raw(v, *p),
            NormSpec::WeightedPNorm { p, weights } => {
                if p.is_infinite() {
                    v.iter().zip(weights).map(|(x, w)| w * x.abs()).fold(0.0, f64::max)
                } else if *p == 1.0 {
                    v.iter().zip(weights).map(|(x, w)| w * x.abs()).sum()
                } else if *p == 2.0 {
                    v.iter().zip(weights).map(|(x, w)| w * x * x).sum::<f64>().sqrt()
                } else {
                    v.iter()
                        .zip(weights)
                        .map(|(x, w)| w * x.abs().powf(*p))
                        .sum::<f64>()
                        .powf(1.0 / *p)
                }
            }
        }
    }

    pub(crate) fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = vecn::sub(x, y);
        self.nrm(&d)
    }
}

fn p_norm_raw(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().map(|x| x.abs()).fold(0.0, f64::max)
    } else if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// The conjugate exponent `q` with `1/p + 1/q = 1`; dual of 1 is ∞ and vice
/// versa. Expects `p ∈ [1, ∞]`.
pub fn dual_exponent(p: f64) -> f64 {
    assert!(p >= 1.0, "exponent out of range: {p}");
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// One-sided estimate of a modulus at a given argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    /// ε for the convexity modulus, τ for the smoothness modulus.
    pub argument: f64,
    pub value: f64,
    /// Number of admissible pairs examined.
    pub samples_used: usize,
}

/// A two-dimensional slice of the unit sphere: the sphere of `spec` restricted
/// to the plane spanned by Euclidean-orthonormal `e1`, `e2`.
struct PlaneSphere<'a> {
    spec: &'a NormSpec,
    e1: Vec<f64>,
    e2: Vec<f64>,
}

impl<'a> PlaneSphere<'a> {
    fn coordinate(spec: &'a NormSpec) -> Self {
        let dim = spec.dim();
        let mut e1 = vec![0.0; dim];
        let mut e2 = vec![0.0; dim];
        e1[0] = 1.0;
        e2[1] = 1.0;
        PlaneSphere { spec, e1, e2 }
    }

    fn random(spec: &'a NormSpec, rng: &mut impl Rng) -> Self {
        let dim = spec.dim();
        let gauss = |rng: &mut dyn rand::RngCore| -> Vec<f64> {
            // Box-Muller; avoids a rand_distr dependency.
            (0..dim)
                .map(|_| {
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                })
                .collect()
        };
        loop {
            let a = gauss(rng);
            let mut b = gauss(rng);
            let na = vecn::dot(&a, &a).sqrt();
            if na < 1e-9 {
                continue;
            }
            let e1: Vec<f64> = a.iter().map(|x| x / na).collect();
            let proj = vecn::dot(&b, &e1);
            for (bi, ei) in b.iter_mut().zip(&e1) {
                *bi -= proj * ei;
            }
            let nb = vecn::dot(&b, &b).sqrt();
            if nb < 1e-9 {
                continue;
            }
            let e2 = b.iter().map(|x| x / nb).collect();
            return PlaneSphere { spec, e1, e2 };
        }
    }

    /// Point of the unit sphere in direction angle `theta` within the plane.
    fn point(&self, theta: f64) -> Vec<f64> {
        let (s, c) = theta.sin_cos();
        let u: Vec<f64> = self.e1.iter().zip(&self.e2).map(|(a, b)| c * a + s * b).collect();
        let n = self.spec.nrm(&u);
        vecn::scale(&u, 1.0 / n)
    }
}

/// First `beta > alpha` with `‖S(alpha) − S(beta)‖ = eps`, by forward march
/// and bisection on the chart `(alpha, alpha + π]`. The chord length runs
/// continuously from 0 to `‖2 S(alpha)‖ = 2`, so a crossing always exists for
/// `eps ∈ (0, 2]`.
fn chord_root(sphere: &PlaneSphere, x: &[f64], alpha: f64, eps: f64) -> f64 {
    const SCAN: usize = 96;
    let h = |beta: f64| sphere.spec.dist(x, &sphere.point(beta));
    let step = std::f64::consts::PI / SCAN as f64;
    let mut lo = alpha;
    let mut hi = alpha + std::f64::consts::PI;
    for k in 1..=SCAN {
        let beta = alpha + step * k as f64;
        if h(beta) >= eps {
            hi = beta;
            break;
        }
        lo = beta;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn delta_on_plane(sphere: &PlaneSphere, eps: f64, n_alpha: usize) -> (f64, usize) {
    let objective = |alpha: f64| -> f64 {
        let x = sphere.point(alpha);
        let beta = chord_root(sphere, &x, alpha, eps);
        let y = sphere.point(beta);
        let mid = vecn::scale(&vecn::add(&x, &y), 0.5);
        1.0 - sphere.spec.nrm(&mid)
    };
    let mut best = f64::INFINITY;
    let mut best_alpha = 0.0;
    let step = std::f64::consts::TAU / n_alpha as f64;
    for k in 0..n_alpha {
        let alpha = step * k as f64;
        let v = objective(alpha);
        if v < best {
            best = v;
            best_alpha = alpha;
        }
    }
    let mut evals = n_alpha;
    let (_, refined) = golden_min(
        |a| {
            evals += 1;
            objective(a)
        },
        best_alpha - step,
        best_alpha + step,
        1e-10,
    );
    (best.min(refined), evals)
}

fn rho_on_plane(sphere: &PlaneSphere, tau: f64, n_side: usize) -> (f64, usize) {
    let objective = |alpha: f64, beta: f64| -> f64 {
        let x = sphere.point(alpha);
        let y = vecn::scale(&sphere.point(beta), tau);
        0.5 * (sphere.spec.nrm(&vecn::add(&x, &y)) + sphere.spec.nrm(&vecn::sub(&x, &y))) - 1.0
    };
    let step = std::f64::consts::TAU / n_side as f64;
    let mut best = f64::NEG_INFINITY;
    let (mut ba, mut bb) = (0.0, 0.0);
    for i in 0..n_side {
        for j in 0..n_side {
            let (a, b) = (step * i as f64, step * j as f64);
            let v = objective(a, b);
            if v > best {
                best = v;
                ba = a;
                bb = b;
            }
        }
    }
    let mut evals = n_side * n_side;
    // Coordinate-wise golden refinement around the best grid cell.
    for _ in 0..3 {
        let (a, va) = golden_min(
            |a| {
                evals += 1;
                -objective(a, bb)
            },
            ba - step,
            ba + step,
            1e-10,
        );
        if -va > best {
            best = -va;
            ba = a;
        }
        let (b, vb) = golden_min(
            |b| {
                evals += 1;
                -objective(ba, b)
            },
            bb - step,
            bb + step,
            1e-10,
        );
        if -vb > best {
            best = -vb;
            bb = b;
        }
    }
    (best, evals)
}

fn planes_for(spec: &NormSpec, restarts: usize) -> Vec<PlaneSphere<'_>> {
    let mut planes = vec![PlaneSphere::coordinate(spec)];
    if spec.dim() > 2 {
        // Sampling is seeded explicitly so reports are reproducible.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..restarts {
            planes.push(PlaneSphere::random(spec, &mut rng));
        }
    }
    planes
}

/// Estimate the modulus of convexity `δ_X(eps)` for `eps ∈ (0, 2]`.
///
/// Minimizes `1 − ‖x+y‖/2` over sampled unit-sphere pairs with `‖x−y‖ = eps`;
/// the pair constraint is enforced by 1-D root finding along the sphere
/// parameterization in 2-D, with random plane restarts in higher dimension.
/// The estimate is an upper bound on the true infimum up to solver tolerance.
pub fn modulus_of_convexity_estimate(
    spec: &NormSpec,
    eps: f64,
    budget: usize,
) -> Result<ModulusEstimate> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 2], got {eps}")));
    }
    let budget = budget.max(64);
    let (restarts, per_plane) =
        if spec.dim() == 2 { (0, budget) } else { ((budget / 128).clamp(8, 128), 128) };
    let mut best = f64::INFINITY;
    let mut used = 0;
    for plane in planes_for(spec, restarts) {
        let (v, evals) = delta_on_plane(&plane, eps, per_plane);
        best = best.min(v);
        used += evals;
    }
    // Root-find slop can leave a value a hair below zero; δ is nonnegative.
    Ok(ModulusEstimate { argument: eps, value: best.clamp(0.0, 1.0), samples_used: used })
}

/// Estimate the modulus of smoothness `ρ_X(tau)` for `tau > 0`.
///
/// Maximizes `(‖x+y‖ + ‖x−y‖)/2 − 1` over sampled pairs with `‖x‖ = 1`,
/// `‖y‖ = tau`; a lower bound on the true supremum up to tolerance.
pub fn modulus_of_smoothness_estimate(
    spec: &NormSpec,
    tau: f64,
    budget: usize,
) -> Result<ModulusEstimate> {
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    let budget = budget.max(64);
    let (restarts, per_side) = if spec.dim() == 2 {
        (0, (budget as f64).sqrt() as usize)
    } else {
        ((budget / 256).clamp(8, 64), 24)
    };
    let per_side = per_side.max(16);
    let mut best = f64::NEG_INFINITY;
    let mut used = 0;
    for plane in planes_for(spec, restarts) {
        let (v, evals) = rho_on_plane(&plane, tau, per_side);
        best = best.max(v);
        used += evals;
    }
    Ok(ModulusEstimate { argument: tau, value: best.max(0.0), samples_used: used })
}
