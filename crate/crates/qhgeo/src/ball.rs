//! Metric-ball boundary tracing and sampling-based starlikeness and
//! convexity checks.
//!
//! A ball `B(x, r) = { y : dist(x, y) ≤ r }` in the quasihyperbolic or
//! distance-ratio metric has no closed-form boundary. Its boundary is traced
//! ray by ray: march outward in geometric steps until the metric distance
//! first exceeds `r`, then bisect. Distances to the center are evaluated
//! exactly for the j-metric and by solver upper bounds (a Dijkstra distance
//! field) for the quasihyperbolic metric; chord-membership violations are
//! flagged only when the certified lower bound (the exact j-distance, which
//! minorizes k) exceeds `r + tol`, which keeps failure reports sound against
//! quadrature and grid error.
//!
//! Metric distance along a ray need not be monotone, so the FIRST crossing is
//! taken; for starlike balls that is the true boundary, and it is
//! conservative otherwise.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::normed_space::NormSpec;
use crate::paths::{j_distance, MetricKind};
use crate::solver::{DistanceField, SolverParams};
use crate::vecn;

/// What a single traced ray found.
#[derive(Debug, Clone)]
pub enum RayOutcome {
    /// First parameter where the metric distance reaches the radius.
    Crossing { t_star: f64, point: Vec<f64> },
    /// The ray left `Ω` before any crossing was pinned down; stores the exit
    /// parameter ("ball clipped by boundary").
    Clipped { t_exit: f64 },
}

#[derive(Debug, Clone)]
pub struct RayHit {
    /// Unit direction under the trace norm.
    pub direction: Vec<f64>,
    pub outcome: RayOutcome,
}

/// A traced metric ball boundary.
#[derive(Debug, Clone)]
pub struct BallTrace {
    pub center: Vec<f64>,
    pub radius: f64,
    pub metric: MetricKind,
    pub rays: Vec<RayHit>,
}

impl BallTrace {
    pub fn boundary_points(&self) -> Vec<Vec<f64>> {
        self.rays
            .iter()
            .filter_map(|r| match &r.outcome {
                RayOutcome::Crossing { point, .. } => Some(point.clone()),
                RayOutcome::Clipped { .. } => None,
            })
            .collect()
    }
}

/// A chord point that left the ball by more than the tolerance.
#[derive(Debug, Clone)]
pub struct Violation {
    pub endpoint_a: Vec<f64>,
    pub endpoint_b: Vec<f64>,
    pub s: f64,
    pub point: Vec<f64>,
    /// Certified lower bound on the metric distance from the center.
    pub distance: f64,
    /// `distance − radius − tol`; positive for a genuine violation.
    pub excess: f64,
}

/// Structured pass/fail result of a check suite.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub suite: String,
    pub configurations: usize,
    pub violations: Vec<Violation>,
    /// Max over all checked chord points of `distance − radius − tol`;
    /// at most zero whenever the suite passed.
    pub max_excess: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(suite: impl Into<String>, configurations: usize) -> Self {
        CheckReport {
            suite: suite.into(),
            configurations,
            violations: Vec::new(),
            max_excess: f64::NEG_INFINITY,
            passed: true,
        }
    }

    fn record(&mut self, excess: f64, make: impl FnOnce() -> Violation) {
        self.max_excess = self.max_excess.max(excess);
        if excess > 0.0 {
            self.violations.push(make());
            self.passed = false;
        }
    }

    /// Merge several reports into one aggregate.
    pub fn aggregate(suite: impl Into<String>, reports: &[CheckReport]) -> CheckReport {
        let mut out = CheckReport::new(suite, reports.iter().map(|r| r.configurations).sum());
        for r in reports {
            out.max_excess = out.max_excess.max(r.max_excess);
            out.violations.extend(r.violations.iter().cloned());
        }
        out.passed = out.violations.is_empty();
        out
    }
}

/// Center-bound metric evaluator: exact for j, distance-field upper bounds
/// for k, with the exact j-distance as the certified lower bound for both.
pub struct MetricEval<'a> {
    domain: &'a Domain,
    spec: &'a NormSpec,
    metric: MetricKind,
    center: Vec<f64>,
    d_center: f64,
    field: Option<DistanceField<'a>>,
}

impl<'a> MetricEval<'a> {
    /// Build an evaluator able to answer queries out to metric radius
    /// `r_max` from `center`.
    pub fn new(
        domain: &'a Domain,
        spec: &'a NormSpec,
        metric: MetricKind,
        center: &[f64],
        r_max: f64,
        params: &SolverParams,
    ) -> Result<Self> {
        let d_center = domain.boundary_distance(spec, center)?;
        let field = match metric {
            MetricKind::DistanceRatio => None,
            MetricKind::QuasiHyperbolic => {
                // j ≤ k ≤ r bounds the ball inside ‖z − c‖ ≤ (e^r − 1) d(c).
                let norm_radius = (r_max.exp() - 1.0) * d_center * 1.05 + 4.0 * params.grid_spacing;
                Some(DistanceField::from_center(domain, spec, center, norm_radius, params)?)
            }
        };
        Ok(MetricEval { domain, spec, metric, center: center.to_vec(), d_center, field })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn center_clearance(&self) -> f64 {
        self.d_center
    }

    /// Metric distance used for tracing: exact j, or the k upper bound.
    /// `+∞` outside `Ω` (both metrics blow up toward the boundary).
    pub fn distance(&self, z: &[f64]) -> f64 {
        match self.metric {
            MetricKind::DistanceRatio => {
                j_distance(self.domain, self.spec, &self.center, z).unwrap_or(f64::INFINITY)
            }
            MetricKind::QuasiHyperbolic => {
                self.field.as_ref().expect("field built for k").upper_bound(z)
            }
        }
    }

    /// Certified lower bound on the metric distance (exact j for both
    /// metrics, by the j ≤ k minorization).
    pub fn lower_bound(&self, z: &[f64]) -> f64 {
        j_distance(self.domain, self.spec, &self.center, z).unwrap_or(f64::INFINITY)
    }
}

/// Geometric-growth factor of the ray march.
const MARCH_GROWTH: f64 = 1.5;

fn crossing_with_eval(eval: &MetricEval, direction: &[f64], r: f64, tol: f64) -> RayOutcome {
    let at = |t: f64| -> Vec<f64> {
        eval.center.iter().zip(direction).map(|(c, u)| c + t * u).collect()
    };
    let mut lo = 0.0f64;
    let mut t = r * eval.d_center / 8.0;
    let mut hi = None;
    for _ in 0..200 {
        let p = at(t);
        if eval.distance(&p) > r {
            hi = Some(t);
            break;
        }
        lo = t;
        t *= MARCH_GROWTH;
    }
    let Some(mut hi) = hi else {
        return RayOutcome::Clipped { t_exit: t };
    };
    let mut best_t = hi;
    let mut best_err = f64::INFINITY;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let p = at(mid);
        let d = eval.distance(&p);
        if d.is_finite() {
            let err = (d - r).abs();
            if err < best_err {
                best_err = err;
                best_t = mid;
            }
            if err <= tol {
                return RayOutcome::Crossing { t_star: mid, point: p };
            }
        }
        if d > r {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    let p = at(best_t);
    if eval.domain.is_inside(&p) && best_err <= 10.0 * tol {
        RayOutcome::Crossing { t_star: best_t, point: p }
    } else {
        RayOutcome::Clipped { t_exit: hi }
    }
}

/// First parameter `t* > 0` along `center + t · direction` where the metric
/// distance to the center reaches `r`, by geometric march and bisection to
/// `|dist(t*) − r| ≤ tol`.
#[allow(clippy::too_many_arguments)]
pub fn first_crossing_along_ray(
    domain: &Domain,
    spec: &NormSpec,
    metric: MetricKind,
    center: &[f64],
    direction: &[f64],
    r: f64,
    tol: f64,
    params: &SolverParams,
) -> Result<RayOutcome> {
    if !(r > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    let n = spec.norm(direction)?;
    if n == 0.0 {
        return Err(Error::invalid("ray direction must be nonzero"));
    }
    let unit = vecn::scale(direction, 1.0 / n);
    let eval = MetricEval::new(domain, spec, metric, center, r, params)?;
    Ok(crossing_with_eval(&eval, &unit, r, tol))
}

/// Trace the ball boundary along `n_rays` directions uniform in angle
/// (two-dimensional tracing).
#[allow(clippy::too_many_arguments)]
pub fn trace_ball(
    domain: &Domain,
    spec: &NormSpec,
    metric: MetricKind,
    center: &[f64],
    r: f64,
    n_rays: usize,
    tol: f64,
    params: &SolverParams,
) -> Result<BallTrace> {
    if !(r > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    if n_rays == 0 {
        return Err(Error::invalid("need at least one ray"));
    }
    if domain.dim() != 2 || spec.dim() != 2 {
        return Err(Error::invalid("ball tracing is two-dimensional"));
    }
    let eval = MetricEval::new(domain, spec, metric, center, r, params)?;
    let mut rays = Vec::with_capacity(n_rays);
    for i in 0..n_rays {
        let theta = std::f64::consts::TAU * i as f64 / n_rays as f64;
        let dir = [theta.cos(), theta.sin()];
        let unit = vecn::scale(&dir, 1.0 / spec.nrm(&dir));
        let outcome = crossing_with_eval(&eval, &unit, r, tol);
        if let RayOutcome::Crossing { point, .. } = &outcome {
            debug_assert!(
                (eval.distance(point) - r).abs() <= 10.0 * tol,
                "traced point off the sphere"
            );
        }
        rays.push(RayHit { direction: unit, outcome });
    }
    Ok(BallTrace { center: center.to_vec(), radius: r, metric, rays })
}

fn chord_grid(n_chord: usize) -> impl Iterator<Item = f64> {
    (1..=n_chord).map(move |i| i as f64 / (n_chord + 1) as f64)
}

/// Check that the ball is starlike with respect to its center: every segment
/// from the center to a traced boundary point must stay inside the ball.
#[allow(clippy::too_many_arguments)]
pub fn starlike_check(
    domain: &Domain,
    spec: &NormSpec,
    metric: MetricKind,
    center: &[f64],
    r: f64,
    n_rays: usize,
    n_chord: usize,
    tol: f64,
    params: &SolverParams,
) -> Result<CheckReport> {
    let trace = trace_ball(domain, spec, metric, center, r, n_rays, tol.min(1e-4), params)?;
    let eval = MetricEval::new(domain, spec, metric, center, r, params)?;
    let mut report = CheckReport::new(format!("starlike[{metric}]"), 1);
    for y in trace.boundary_points() {
        for s in chord_grid(n_chord) {
            let point = vecn::convex_combination(center, &y, s);
            let dist = eval.lower_bound(&point);
            let excess = dist - r - tol;
            report.record(excess, || Violation {
                endpoint_a: center.to_vec(),
                endpoint_b: y.clone(),
                s,
                point: point.clone(),
                distance: dist,
                excess,
            });
        }
    }
    Ok(report)
}

/// Check convexity by sampling chords between all pairs of traced boundary
/// points.
#[allow(clippy::too_many_arguments)]
pub fn convexity_check(
    domain: &Domain,
    spec: &NormSpec,
    metric: MetricKind,
    center: &[f64],
    r: f64,
    n_rays: usize,
    n_chord: usize,
    tol: f64,
    params: &SolverParams,
) -> Result<CheckReport> {
    let trace = trace_ball(domain, spec, metric, center, r, n_rays, tol.min(1e-4), params)?;
    let eval = MetricEval::new(domain, spec, metric, center, r, params)?;
    let pts = trace.boundary_points();
    let mut report = CheckReport::new(format!("convexity[{metric}]"), 1);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for s in chord_grid(n_chord) {
                let point = vecn::convex_combination(&pts[i], &pts[j], s);
                let dist = eval.lower_bound(&point);
                let excess = dist - r - tol;
                report.record(excess, || Violation {
                    endpoint_a: pts[i].clone(),
                    endpoint_b: pts[j].clone(),
                    s,
                    point: point.clone(),
                    distance: dist,
                    excess,
                });
            }
        }
    }
    Ok(report)
}

/// A re-verified non-convexity witness for a j-ball.
#[derive(Debug, Clone)]
pub struct Witness {
    pub center: Vec<f64>,
    pub radius: f64,
    pub endpoint_a: Vec<f64>,
    pub endpoint_b: Vec<f64>,
    pub s: f64,
    pub point: Vec<f64>,
    pub j_value: f64,
    /// `j_value − radius`; exceeds `1e−9` for a genuine witness.
    pub excess: f64,
}

/// Per-radius outcome of the witness search.
#[derive(Debug, Clone)]
pub struct RadiusWitness {
    pub radius: f64,
    pub witness: Option<Witness>,
    /// Chord evaluations spent on this radius.
    pub evaluations: usize,
}

/// Search for j-ball non-convexity witnesses in the punctured plane under
/// `norm`, one search per radius.
///
/// Centers are concentrated near the diagonal, where the sup-norm unit
/// sphere has its corner and the inner `min(d(x), d(z))` regime glues two
/// flat face families at a reflex vertex; random near-diagonal centers serve
/// as a fallback. Each candidate violation is re-verified by a direct
/// j-distance evaluation with excess above `1e−9`. Returns `witness: None`
/// for a radius when the budget is exhausted first, which the suites treat
/// as a failure for the sup norm and as the expected outcome for norms
/// without corners.
pub fn find_nonconvex_witness(
    spec: &NormSpec,
    radii: &[f64],
    budget: usize,
) -> Result<Vec<RadiusWitness>> {
    if spec.dim() != 2 {
        return Err(Error::invalid("witness search is two-dimensional"));
    }
    const EXCESS_TOL: f64 = 1e-9;
    let domain = Domain::punctured_plane_at_origin();
    let params = SolverParams::default();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::invalid("radii must be positive"));
        }
        let rho = r.exp() - 1.0;
        // Deterministic near-diagonal center schedule.
        let mut centers: Vec<Vec<f64>> = Vec::new();
        for beta in [0.5, 0.25, 0.75, 1.0, 1.5, 0.125] {
            centers.push(vec![1.0, 1.0 - beta * rho]);
            centers.push(vec![1.0 - beta * rho, 1.0]);
        }
        for k in 1..=24 {
            let u = 1.9 * k as f64 / 24.0;
            centers.push(vec![1.0, 1.0 - u * rho]);
        }
        let mut spent = 0usize;
        let mut found: Option<Witness> = None;
        'centers: for center in centers {
            if spent >= budget {
                break;
            }
            if !domain.is_inside(&center) {
                continue;
            }
            let trace = match trace_ball(
                &domain,
                spec,
                MetricKind::DistanceRatio,
                &center,
                r,
                96,
                1e-11,
                &params,
            ) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let pts = trace.boundary_points();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    for s in chord_grid(9) {
                        if spent >= budget {
                            break 'centers;
                        }
                        spent += 1;
                        let point = vecn::convex_combination(&pts[i], &pts[j], s);
                        // Direct evaluation: the witness stands on its own.
                        let jv = match j_distance(&domain, spec, &center, &point) {
                            Ok(v) => v,
                            Err(_) => continue,
                        };
                        if jv - r > EXCESS_TOL {
                            found = Some(Witness {
                                center: center.clone(),
                                radius: r,
                                endpoint_a: pts[i].clone(),
                                endpoint_b: pts[j].clone(),
                                s,
                                point,
                                j_value: jv,
                                excess: jv - r,
                            });
                            break 'centers;
                        }
                    }
                }
            }
        }
        out.push(RadiusWitness { radius: r, witness: found, evaluations: spent });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2() -> NormSpec {
        NormSpec::euclidean(2)
    }

    fn sup() -> NormSpec {
        NormSpec::sup_norm(2)
    }

    fn params() -> SolverParams {
        SolverParams::default()
    }

    #[test]
    fn j_crossing_on_radial_ray() {
        // j((1,0), (1+t, 0)) = log(1 + t) in the punctured plane, so the
        // crossing for r = log 2 is exactly t* = 1 at (2, 0).
        let p = Domain::punctured_plane_at_origin();
        let hit = first_crossing_along_ray(
            &p,
            &l2(),
            MetricKind::DistanceRatio,
            &[1.0, 0.0],
            &[1.0, 0.0],
            std::f64::consts::LN_2,
            1e-9,
            &params(),
        )
        .unwrap();
        match hit {
            RayOutcome::Crossing { t_star, point } => {
                assert!((t_star - 1.0).abs() < 1e-8, "t* = {t_star}");
                assert!((point[0] - 2.0).abs() < 1e-8 && point[1].abs() < 1e-12);
            }
            RayOutcome::Clipped { .. } => panic!("unexpected clip"),
        }
    }

    #[test]
    fn k_crossing_down_the_half_plane() {
        // k((0,−1), (0,−2)) = ln 2 along the vertical geodesic.
        let h = Domain::lower_half_plane();
        let hit = first_crossing_along_ray(
            &h,
            &l2(),
            MetricKind::QuasiHyperbolic,
            &[0.0, -1.0],
            &[0.0, -1.0],
            std::f64::consts::LN_2,
            1e-4,
            &params(),
        )
        .unwrap();
        match hit {
            RayOutcome::Crossing { point, .. } => {
                assert!(point[0].abs() < 1e-9);
                assert!((point[1] + 2.0).abs() < 0.05, "boundary point {point:?}");
            }
            RayOutcome::Clipped { .. } => panic!("unexpected clip"),
        }
    }

    #[test]
    fn crossing_parameter_vanishes_with_radius() {
        let p = Domain::punctured_plane_at_origin();
        let hit = first_crossing_along_ray(
            &p,
            &l2(),
            MetricKind::DistanceRatio,
            &[1.0, 0.0],
            &[0.0, 1.0],
            1e-4,
            1e-11,
            &params(),
        )
        .unwrap();
        match hit {
            RayOutcome::Crossing { t_star, .. } => {
                assert!(t_star > 0.0 && t_star < 2e-4, "t* = {t_star}");
            }
            RayOutcome::Clipped { .. } => panic!("unexpected clip"),
        }
    }

    #[test]
    fn k_ball_flat_face_of_the_counterexample() {
        // In the sup-norm half-plane the k-ball at (0,−1), r = ln 2, has the
        // flat face {(t, −2) : t ∈ [−1, 1]} on its boundary.
        let h = Domain::lower_half_plane();
        let trace = trace_ball(
            &h,
            &sup(),
            MetricKind::QuasiHyperbolic,
            &[0.0, -1.0],
            std::f64::consts::LN_2,
            16,
            1e-4,
            &params(),
        )
        .unwrap();
        let mut down_rays = 0;
        for ray in &trace.rays {
            let d = &ray.direction;
            if d[1] < 0.0 && d[0].abs() < 0.99 * d[1].abs() {
                down_rays += 1;
                match &ray.outcome {
                    RayOutcome::Crossing { point, .. } => {
                        assert!((point[1] + 2.0).abs() < 0.05, "face miss: {point:?}");
                        assert!(point[0].abs() <= 1.0 + 0.05);
                    }
                    RayOutcome::Clipped { .. } => panic!("clipped downward ray"),
                }
            }
        }
        assert!(down_rays >= 3, "too few downward rays: {down_rays}");
    }

    #[test]
    fn small_j_balls_are_norm_balls_to_first_order() {
        let p = Domain::punctured(vec![vec![0.0, 0.0], vec![3.0, -1.0]]).unwrap();
        let center = [1.3, 0.2];
        let r = 0.01;
        for spec in [l2(), sup()] {
            let d_c = p.boundary_distance(&spec, &center).unwrap();
            let trace =
                trace_ball(&p, &spec, MetricKind::DistanceRatio, &center, r, 12, 1e-11, &params())
                    .unwrap();
            for ray in &trace.rays {
                match &ray.outcome {
                    RayOutcome::Crossing { t_star, .. } => {
                        assert!(
                            (t_star - r * d_c).abs() <= 0.03 * r * d_c,
                            "t* {t_star} vs first-order {}",
                            r * d_c
                        );
                    }
                    RayOutcome::Clipped { .. } => panic!("clipped"),
                }
            }
        }
    }

    #[test]
    fn four_rays_on_a_symmetric_configuration() {
        let p = Domain::punctured_plane_at_origin();
        let trace = trace_ball(
            &p,
            &l2(),
            MetricKind::DistanceRatio,
            &[1.0, 0.0],
            0.3,
            4,
            1e-11,
            &params(),
        )
        .unwrap();
        let t = |i: usize| match &trace.rays[i].outcome {
            RayOutcome::Crossing { t_star, .. } => *t_star,
            RayOutcome::Clipped { .. } => panic!("clipped"),
        };
        // Up and down are mirror images across the x-axis.
        assert!((t(1) - t(3)).abs() < 1e-9);
        assert_eq!(trace.rays.len(), 4);
    }

    #[test]
    fn nested_traces_stay_inside_larger_balls() {
        let p = Domain::punctured_plane_at_origin();
        let center = [1.0, 0.4];
        let big = 0.5;
        let small =
            trace_ball(&p, &l2(), MetricKind::DistanceRatio, &center, 0.3, 24, 1e-10, &params())
                .unwrap();
        for pt in small.boundary_points() {
            let j = j_distance(&p, &l2(), &center, &pt).unwrap();
            assert!(j <= big + 1e-9);
        }
    }

    #[test]
    fn starlike_checks_pass_where_the_theory_says_so() {
        // j-balls at r = log 2 are starlike in any domain.
        let p = Domain::punctured_plane_at_origin();
        let rep = starlike_check(
            &p,
            &l2(),
            MetricKind::DistanceRatio,
            &[0.9, 0.7],
            std::f64::consts::LN_2,
            32,
            8,
            1e-9,
            &params(),
        )
        .unwrap();
        assert!(rep.passed, "violations: {:?}", rep.violations.first());
        assert!(rep.max_excess <= 0.0);

        // Convex domains: j-balls of any radius are starlike (indeed convex).
        let boxy = Domain::axis_aligned_box(&[-4.0, -4.0], &[4.0, 4.0]).unwrap();
        let rep = starlike_check(
            &boxy,
            &l2(),
            MetricKind::DistanceRatio,
            &[0.5, -0.5],
            5.0,
            24,
            8,
            1e-9,
            &params(),
        )
        .unwrap();
        assert!(rep.passed, "violations: {:?}", rep.violations.first());

        // k-ball in the half-plane via solver upper bounds.
        let h = Domain::lower_half_plane();
        let rep = starlike_check(
            &h,
            &l2(),
            MetricKind::QuasiHyperbolic,
            &[0.0, -1.0],
            std::f64::consts::LN_2,
            16,
            6,
            1e-2,
            &params(),
        )
        .unwrap();
        assert!(rep.passed, "violations: {:?}", rep.violations.first());
    }

    #[test]
    fn convexity_checks_on_convex_domains() {
        let h = Domain::lower_half_plane();
        let rep = convexity_check(
            &h,
            &l2(),
            MetricKind::DistanceRatio,
            &[0.0, -1.0],
            1.0,
            24,
            7,
            1e-9,
            &params(),
        )
        .unwrap();
        assert!(rep.passed, "violations: {:?}", rep.violations.first());

        let boxy = Domain::axis_aligned_box(&[-6.0, -6.0], &[6.0, 0.0]).unwrap();
        let rep = convexity_check(
            &boxy,
            &NormSpec::p_norm(3.0, 2).unwrap(),
            MetricKind::QuasiHyperbolic,
            &[0.0, -2.0],
            0.8,
            12,
            5,
            1e-2,
            &params(),
        )
        .unwrap();
        assert!(rep.passed, "violations: {:?}", rep.violations.first());
    }

    #[test]
    fn sup_norm_witnesses_found_at_each_radius() {
        let results = find_nonconvex_witness(&sup(), &[0.2, 0.05], 600_000).unwrap();
        for rw in &results {
            let w = rw.witness.as_ref().unwrap_or_else(|| {
                panic!("no witness at r = {} after {} evals", rw.radius, rw.evaluations)
            });
            assert!(w.excess > 1e-9);
            // Re-verify from scratch.
            let dom = Domain::punctured_plane_at_origin();
            let direct = j_distance(&dom, &sup(), &w.center, &w.point).unwrap();
            assert!(direct > rw.radius + 1e-9);
            assert!((direct - w.j_value).abs() < 1e-15);
        }
    }

    #[test]
    fn euclidean_substitute_yields_no_witness() {
        let results = find_nonconvex_witness(&l2(), &[std::f64::consts::LN_2], 200_000).unwrap();
        assert!(results[0].witness.is_none(), "spurious witness: {:?}", results[0].witness);
    }
}
