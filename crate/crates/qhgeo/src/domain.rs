//! Proper subdomains `Ω ⊊ R^n` and the boundary distance `d(x) = d(x, ∂Ω)`
//! under a given norm.
//!
//! Four variants are supported: finitely punctured space, open half-spaces
//! `{x : a·x + b < 0}`, convex polytopes (finite half-space intersections,
//! certified nonempty at construction), and simple polygons in the plane.
//! Polygons exist for starlike-but-non-convex test domains such as an
//! L-shaped union of two rectangles; their boundary distance is the exact
//! minimum over boundary edges.

use crate::error::{Error, Result};
use crate::normed_space::NormSpec;
use crate::quadrature::golden_min;
use crate::vecn;

/// Parameter tolerance for golden-section clearance searches.
const PARAM_TOL: f64 = 1e-12;

/// Segments whose clearance falls below this are reported as touching ∂Ω;
/// callers treat them as carrying infinite quasihyperbolic weight.
pub const TOUCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Domain {
    /// `R^n` minus a finite, pairwise-distinct set of points.
    PuncturedSpace { punctures: Vec<Vec<f64>> },
    /// `{x : normal·x + offset < 0}`.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// Intersection of half-spaces `{x : a·x + b < 0}` with a strictly
    /// interior point found at construction.
    ConvexPolytope { halfspaces: Vec<(Vec<f64>, f64)>, interior_point: Vec<f64> },
    /// A simple polygon in the plane (vertex loop, either orientation).
    Polygon { vertices: Vec<Vec<f64>> },
}

/// Minimum boundary distance along a segment, with its location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceResult {
    pub min_distance: f64,
    /// Parameter in `[0, 1]` where the minimum is attained.
    pub argmin_parameter: f64,
}

impl Domain {
    pub fn punctured(punctures: Vec<Vec<f64>>) -> Result<Self> {
        if punctures.is_empty() {
            return Err(Error::invalid("puncture list must be nonempty"));
        }
        let dim = punctures[0].len();
        if dim < 2 {
            return Err(Error::invalid("punctures must have dimension >= 2"));
        }
        for p in &punctures {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: p.len() });
            }
        }
        for i in 0..punctures.len() {
            for j in i + 1..punctures.len() {
                if vecn::same_point(&punctures[i], &punctures[j]) {
                    return Err(Error::invalid("punctures must be pairwise distinct"));
                }
            }
        }
        Ok(Domain::PuncturedSpace { punctures })
    }

    /// The punctured plane `R^2 ∖ {0}`.
    pub fn punctured_plane_at_origin() -> Self {
        Domain::PuncturedSpace { punctures: vec![vec![0.0, 0.0]] }
    }

    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.len() < 2 {
            return Err(Error::invalid("half-space normal must have dimension >= 2"));
        }
        if normal.iter().all(|&a| a == 0.0) {
            return Err(Error::invalid("half-space normal must be nonzero"));
        }
        Ok(Domain::HalfSpace { normal, offset })
    }

    /// The lower half-plane `{(x, y) : y < 0}`.
    pub fn lower_half_plane() -> Self {
        Domain::HalfSpace { normal: vec![0.0, 1.0], offset: 0.0 }
    }

    /// Build a convex polytope from half-spaces `{x : a·x + b < 0}`,
    /// certifying a nonempty interior by locating a strictly interior point.
    pub fn convex_polytope(halfspaces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let point = find_interior_point(&halfspaces)?;
        Ok(Domain::ConvexPolytope { halfspaces, interior_point: point })
    }

    /// Axis-aligned box `(lo_1, hi_1) × … × (lo_n, hi_n)` as a polytope.
    pub fn axis_aligned_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), actual: hi.len() });
        }
        let dim = lo.len();
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            if !(lo[i] < hi[i]) {
                return Err(Error::invalid("box must satisfy lo < hi in every coordinate"));
            }
            let mut up = vec![0.0; dim];
            up[i] = 1.0;
            halfspaces.push((up, -hi[i]));
            let mut down = vec![0.0; dim];
            down[i] = -1.0;
            halfspaces.push((down, lo[i]));
        }
        Domain::convex_polytope(halfspaces)
    }

    /// A simple polygon from its vertex loop (first vertex not repeated).
    pub fn polygon(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let mut vertices = vertices;
        if vertices.len() >= 2 && vecn::same_point(&vertices[0], &vertices[vertices.len() - 1]) {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::invalid("polygon needs at least 3 distinct vertices"));
        }
        for v in &vertices {
            if v.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, actual: v.len() });
            }
        }
        for i in 0..vertices.len() {
            let j = (i + 1) % vertices.len();
            if vecn::same_point(&vertices[i], &vertices[j]) {
                return Err(Error::invalid("polygon has repeated consecutive vertices"));
            }
        }
        Ok(Domain::Polygon { vertices })
    }

    /// The L-shaped union of `[0,2]×[0,1]` and `[0,1]×[0,2]`, scaled by
    /// `scale`: a starlike, non-convex test domain whose kernel contains
    /// `scale·(0.5, 0.5)`.
    pub fn l_shape(scale: f64) -> Self {
        let pts = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        Domain::Polygon {
            vertices: pts.iter().map(|p| vec![p[0] * scale, p[1] * scale]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::PuncturedSpace { punctures } => punctures[0].len(),
            Domain::HalfSpace { normal, .. } => normal.len(),
            Domain::ConvexPolytope { halfspaces, .. } => halfspaces[0].0.len(),
            Domain::Polygon { .. } => 2,
        }
    }

    /// A point certified to lie in `Ω` (polytopes store the certificate; the
    /// other variants compute one).
    pub fn witness_point(&self) -> Vec<f64> {
        match self {
            Domain::PuncturedSpace { punctures } => {
                let mut x = punctures[0].clone();
                x[0] += 1.0;
                if self.is_inside(&x) {
                    return x;
                }
                // Nudge until clear of every puncture.
                let mut k = 2.0;
                loop {
                    x[0] += k;
                    if self.is_inside(&x) {
                        return x;
                    }
                    k += 1.0;
                }
            }
            Domain::HalfSpace { normal, offset } => {
                let nn = vecn::dot(normal, normal);
                vecn::scale(normal, -(offset + 1.0) / nn)
            }
            Domain::ConvexPolytope { interior_point, .. } => interior_point.clone(),
            Domain::Polygon { vertices } => {
                // Centroid works for the star-shaped test polygons; fall back
                // to a scan otherwise.
                let n = vertices.len() as f64;
                let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / n;
                let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / n;
                let c = vec![cx, cy];
                if self.is_inside(&c) {
                    return c;
                }
                for v in vertices {
                    for w in vertices {
                        let m = vecn::lerp(v, w, 0.5);
                        let m = vecn::lerp(&m, &c, 0.25);
                        if self.is_inside(&m) {
                            return m;
                        }
                    }
                }
                c
            }
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: x.len() });
        }
        Ok(())
    }

    /// Strict membership `x ∈ Ω`; boundary points are excluded and punctures
    /// are excluded exactly.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.is_inside(x))
    }

    pub(crate) fn is_inside(&self, x: &[f64]) -> bool {
        match self {
            Domain::PuncturedSpace { punctures } => {
                punctures.iter().all(|z| !vecn::same_point(z, x))
            }
            Domain::HalfSpace { normal, offset } => vecn::dot(normal, x) + offset < 0.0,
            Domain::ConvexPolytope { halfspaces, .. } => {
                halfspaces.iter().all(|(a, b)| vecn::dot(a, x) + b < 0.0)
            }
            Domain::Polygon { vertices } => {
                polygon_parity(vertices, x) && polygon_edge_distance_l2(vertices, x) > 0.0
            }
        }
    }

    /// Boundary distance `d(x) = d(x, ∂Ω)` under `spec`.
    ///
    /// Punctured space: nearest puncture. Half-space and polytope: dual-norm
    /// distance to the nearest face hyperplane. Polygon: nearest boundary
    /// edge.
    pub fn boundary_distance(&self, spec: &NormSpec, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if spec.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: spec.dim() });
        }
        if !self.is_inside(x) {
            return Err(Error::OutsideDomain);
        }
        Ok(self.d(spec, x))
    }

    /// Infallible boundary distance for validated interior points.
    pub(crate) fn d(&self, spec: &NormSpec, x: &[f64]) -> f64 {
        match self {
            Domain::PuncturedSpace { punctures } => {
                punctures.iter().map(|z| spec.dist(x, z)).fold(f64::INFINITY, f64::min)
            }
            Domain::HalfSpace { normal, offset } => {
                let dual = spec.dual_norm(normal).expect("validated dims");
                (vecn::dot(normal, x) + offset).abs() / dual
            }
            Domain::ConvexPolytope { halfspaces, .. } => halfspaces
                .iter()
                .map(|(a, b)| {
                    let dual = spec.dual_norm(a).expect("validated dims");
                    (vecn::dot(a, x) + b).abs() / dual
                })
                .fold(f64::INFINITY, f64::min),
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let a = &vertices[i];
                    let b = &vertices[(i + 1) % n];
                    best = best.min(segment_distance(spec, x, a, b));
                }
                best
            }
        }
    }

    /// Minimum of `d` along the segment `p + t (q − p)`, `t ∈ [0, 1]`.
    ///
    /// Exact for half-spaces and polytopes (per-face distance is affine along
    /// the segment, so the minimum sits at an endpoint). For punctures and
    /// polygon edges `t ↦ d` is convex per piece, so each piece is searched
    /// by golden section. A minimum within `TOUCH_TOL` of zero is reported as
    /// exactly zero: the segment touches `∂Ω`.
    pub fn min_boundary_distance_on_segment(
        &self,
        spec: &NormSpec,
        p: &[f64],
        q: &[f64],
    ) -> Result<ClearanceResult> {
        self.check_dim(p)?;
        self.check_dim(q)?;
        if !self.is_inside(p) || !self.is_inside(q) {
            return Err(Error::OutsideDomain);
        }
        let res = match self {
            Domain::HalfSpace { .. } | Domain::ConvexPolytope { .. } => {
                let dp = self.d(spec, p);
                let dq = self.d(spec, q);
                if dp <= dq {
                    ClearanceResult { min_distance: dp, argmin_parameter: 0.0 }
                } else {
                    ClearanceResult { min_distance: dq, argmin_parameter: 1.0 }
                }
            }
            Domain::PuncturedSpace { punctures } => {
                let mut best = ClearanceResult {
                    min_distance: f64::INFINITY,
                    argmin_parameter: 0.0,
                };
                for z in punctures {
                    let f = |t: f64| spec.dist(&vecn::lerp(p, q, t), z);
                    let (t, v) = piecewise_convex_min(f);
                    if v < best.min_distance {
                        best = ClearanceResult { min_distance: v, argmin_parameter: t };
                    }
                }
                best
            }
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = ClearanceResult {
                    min_distance: f64::INFINITY,
                    argmin_parameter: 0.0,
                };
                for i in 0..n {
                    let a = &vertices[i];
                    let b = &vertices[(i + 1) % n];
                    let f = |t: f64| segment_distance(spec, &vecn::lerp(p, q, t), a, b);
                    let (t, v) = piecewise_convex_min(f);
                    if v < best.min_distance {
                        best = ClearanceResult { min_distance: v, argmin_parameter: t };
                    }
                }
                best
            }
        };
        Ok(if res.min_distance < TOUCH_TOL {
            ClearanceResult { min_distance: 0.0, ..res }
        } else {
            res
        })
    }
}

/// Minimum over `[0, 1]` of a convex function: golden section checked against
/// both endpoints.
fn piecewise_convex_min<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    let (t, v) = golden_min(&f, 0.0, 1.0, PARAM_TOL);
    let (f0, f1) = (f(0.0), f(1.0));
    if f0 <= v && f0 <= f1 {
        (0.0, f0)
    } else if f1 <= v {
        (1.0, f1)
    } else {
        (t, v)
    }
}

/// Distance from `x` to the segment `[a, b]` under `spec`; the objective is
/// convex in the segment parameter. Euclidean distances use the projection
/// closed form, everything else golden section.
fn segment_distance(spec: &NormSpec, x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    if matches!(spec, NormSpec::PNorm { p, .. } if *p == 2.0) {
        let e = vecn::sub(b, a);
        let len2 = vecn::dot(&e, &e);
        let u = if len2 > 0.0 {
            (vecn::dot(&vecn::sub(x, a), &e) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        return spec.dist(x, &vecn::lerp(a, b, u));
    }
    let f = |u: f64| spec.dist(x, &vecn::lerp(a, b, u));
    let (_, v) = golden_min(f, 0.0, 1.0, 1e-13);
    v.min(f(0.0)).min(f(1.0))
}

/// Even-odd crossing parity of a horizontal ray from `x`.
fn polygon_parity(vertices: &[Vec<f64>], x: &[f64]) -> bool {
    let n = vertices.len();
    let (px, py) = (x[0], x[1]);
    let mut inside = false;
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        if (a[1] > py) != (b[1] > py) {
            let t = (py - a[1]) / (b[1] - a[1]);
            let ix = a[0] + t * (b[0] - a[0]);
            if px < ix {
                inside = !inside;
            }
        }
    }
    inside
}

/// Euclidean distance from `x` to the polygon boundary; used only to make
/// strict membership unambiguous for points on an edge.
fn polygon_edge_distance_l2(vertices: &[Vec<f64>], x: &[f64]) -> f64 {
    let n = vertices.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len2 = ex * ex + ey * ey;
        let u = (((x[0] - a[0]) * ex + (x[1] - a[1]) * ey) / len2).clamp(0.0, 1.0);
        let (dx, dy) = (x[0] - (a[0] + u * ex), x[1] - (a[1] + u * ey));
        best = best.min((dx * dx + dy * dy).sqrt());
    }
    best
}

/// Locate a strictly interior point of `∩ {x : a·x + b < 0}` by repeated
/// over-relaxed projection onto the worst-violated face. Fails with
/// `EmptyInterior` when no strictly feasible point emerges.
fn find_interior_point(halfspaces: &[(Vec<f64>, f64)]) -> Result<Vec<f64>> {
    if halfspaces.is_empty() {
        return Err(Error::invalid("polytope needs at least one half-space"));
    }
    let dim = halfspaces[0].0.len();
    if dim < 2 {
        return Err(Error::invalid("polytope must have dimension >= 2"));
    }
    for (a, _) in halfspaces {
        if a.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: a.len() });
        }
        if a.iter().all(|&c| c == 0.0) {
            return Err(Error::invalid("polytope face normal must be nonzero"));
        }
    }
    let norms: Vec<f64> = halfspaces.iter().map(|(a, _)| vecn::dot(a, a).sqrt()).collect();
    let scale = halfspaces
        .iter()
        .zip(&norms)
        .map(|((_, b), n)| (b / n).abs())
        .fold(1.0, f64::max);
    let margin = 1e-3 * scale;
    let mut x = vec![0.0; dim];
    for _ in 0..20_000 {
        let mut worst = f64::NEG_INFINITY;
        let mut worst_i = 0;
        for (i, (a, b)) in halfspaces.iter().enumerate() {
            let slack = (vecn::dot(a, &x) + b) / norms[i];
            if slack > worst {
                worst = slack;
                worst_i = i;
            }
        }
        if worst <= -margin {
            return Ok(x);
        }
        let (a, _) = &halfspaces[worst_i];
        let step = 1.5 * (worst + margin) / norms[worst_i];
        for (xi, ai) in x.iter_mut().zip(a) {
            *xi -= step * ai;
        }
    }
    // Accept a weaker certificate if the loop stalled just short of margin.
    let ok = halfspaces
        .iter()
        .zip(&norms)
        .all(|((a, b), n)| (vecn::dot(a, &x) + b) / n < -1e-12 * scale);
    if ok {
        Ok(x)
    } else {
        Err(Error::EmptyInterior)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l2() -> NormSpec {
        NormSpec::euclidean(2)
    }

    fn punctured_origin() -> Domain {
        Domain::punctured_plane_at_origin()
    }

    #[test]
    fn contains_examples() {
        let p = punctured_origin();
        assert!(p.contains(&[1.0, 0.0]).unwrap());
        assert!(!p.contains(&[0.0, 0.0]).unwrap());
        let h = Domain::lower_half_plane();
        assert!(!h.contains(&[0.0, 0.0]).unwrap());
        assert!(h.contains(&[3.0, -0.1]).unwrap());
    }

    #[test]
    fn boundary_distance_examples() {
        let p = punctured_origin();
        assert!((p.boundary_distance(&l2(), &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);

        let h = Domain::lower_half_plane();
        let sup = NormSpec::sup_norm(2);
        // Under ℓ∞ the distance to {y = 0} is |y| / ‖(0,1)‖₁ = |y|.
        assert!((h.boundary_distance(&sup, &[0.0, -1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((h.boundary_distance(&l2(), &[0.0, -2.0]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_distance_outside_is_error() {
        let h = Domain::lower_half_plane();
        assert!(matches!(
            h.boundary_distance(&l2(), &[0.0, 1.0]),
            Err(Error::OutsideDomain)
        ));
        assert!(matches!(
            punctured_origin().boundary_distance(&l2(), &[0.0, 0.0]),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn halfspace_distance_matches_boundary_grid_brute_force() {
        // Minimize ‖x − y‖ over a dense grid on the boundary line and compare
        // with the dual-norm formula.
        let specs = [
            l2(),
            NormSpec::sup_norm(2),
            NormSpec::taxicab(2),
            NormSpec::p_norm(3.0, 2).unwrap(),
            NormSpec::weighted_p_norm(2.0, vec![1.0, 4.0]).unwrap(),
            NormSpec::weighted_p_norm(f64::INFINITY, vec![2.0, 0.5]).unwrap(),
        ];
        let normal = vec![0.7, 1.3];
        let offset = -0.4;
        let dom = Domain::half_space(normal.clone(), offset).unwrap();
        let x = vec![-0.3, -0.9];
        assert!(dom.contains(&x).unwrap());
        // Boundary: normal·y + offset = 0, parameterized along the tangent.
        let nn = vecn::dot(&normal, &normal);
        let foot = vecn::scale(&normal, -offset / nn);
        let tangent = [normal[1], -normal[0]];
        for spec in &specs {
            let formula = dom.boundary_distance(spec, &x).unwrap();
            let at = |t: f64| {
                let y = [foot[0] + t * tangent[0], foot[1] + t * tangent[1]];
                spec.dist(&x, &y)
            };
            let mut brute = f64::INFINITY;
            let mut best_t = 0.0;
            for k in -40_000..=40_000 {
                let t = k as f64 * 1e-4;
                let d = at(t);
                if d < brute {
                    brute = d;
                    best_t = t;
                }
            }
            // Grid plus a local golden polish (the projection objective has
            // kinks under ℓ¹ and ℓ∞).
            let (_, refined) = golden_min(at, best_t - 1e-4, best_t + 1e-4, 1e-12);
            brute = brute.min(refined);
            assert!(
                (formula - brute).abs() < 1e-6,
                "{spec:?}: formula {formula} vs brute {brute}"
            );
        }
    }

    #[test]
    fn segment_clearance_examples() {
        let h = Domain::lower_half_plane();
        let sup = NormSpec::sup_norm(2);
        // d = 2 + t along the segment.
        let r = h
            .min_boundary_distance_on_segment(&sup, &[-1.0, -2.0], &[0.0, -3.0])
            .unwrap();
        assert!((r.min_distance - 2.0).abs() < 1e-12);
        assert_eq!(r.argmin_parameter, 0.0);

        let p = punctured_origin();
        let r = p
            .min_boundary_distance_on_segment(&l2(), &[1.0, -1.0], &[1.0, 1.0])
            .unwrap();
        assert!((r.min_distance - 1.0).abs() < 1e-10);
        assert!((r.argmin_parameter - 0.5).abs() < 1e-6);

        let r = p
            .min_boundary_distance_on_segment(&l2(), &[1.0, 0.0], &[2.0, 0.0])
            .unwrap();
        assert!((r.min_distance - 1.0).abs() < 1e-12);
        assert_eq!(r.argmin_parameter, 0.0);
    }

    #[test]
    fn segment_through_puncture_reports_touching() {
        let p = punctured_origin();
        let r = p
            .min_boundary_distance_on_segment(&l2(), &[-1.0, 0.0], &[1.0, 0.0])
            .unwrap();
        assert_eq!(r.min_distance, 0.0);
        assert!((r.argmin_parameter - 0.5).abs() < 1e-6);
    }

    #[test]
    fn polytope_construction_and_distance() {
        let boxy = Domain::axis_aligned_box(&[-1.0, 0.0], &[3.0, 2.0]).unwrap();
        assert!(boxy.contains(&[0.0, 1.0]).unwrap());
        assert!(!boxy.contains(&[3.0, 1.0]).unwrap());
        assert!((boxy.boundary_distance(&l2(), &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((boxy.boundary_distance(&l2(), &[2.5, 1.0]).unwrap() - 0.5).abs() < 1e-15);

        // Infeasible system: x_0 < 0 and x_0 > 1.
        let bad = Domain::convex_polytope(vec![
            (vec![1.0, 0.0], 0.0),
            (vec![-1.0, 0.0], 1.0),
        ]);
        assert!(matches!(bad, Err(Error::EmptyInterior)));
    }

    #[test]
    fn l_shape_membership_and_distance() {
        let l = Domain::l_shape(1.0);
        assert!(l.contains(&[0.5, 0.5]).unwrap());
        assert!(l.contains(&[1.9, 0.5]).unwrap());
        assert!(l.contains(&[0.5, 1.9]).unwrap());
        assert!(!l.contains(&[1.5, 1.5]).unwrap());
        assert!(!l.contains(&[2.5, 0.5]).unwrap());

        // Interior point whose nearest boundary is the reflex corner (1, 1).
        let d = l.boundary_distance(&l2(), &[0.9, 0.9]).unwrap();
        assert!((d - 0.02f64.sqrt()).abs() < 1e-9, "got {d}");
        // Plain side distances.
        let d = l.boundary_distance(&l2(), &[1.5, 0.5]).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
        // Under sup norm the corner point is at distance max(0.1, 0.1).
        let d = l.boundary_distance(&NormSpec::sup_norm(2), &[0.9, 0.9]).unwrap();
        assert!((d - 0.1).abs() < 1e-9, "got {d}");
    }

    fn random_point_in(dom: &Domain, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let x = vec![rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
            if dom.is_inside(&x) {
                return x;
            }
        }
    }

    #[test]
    fn boundary_distance_is_one_lipschitz() {
        let domains = [
            punctured_origin(),
            Domain::punctured(vec![vec![0.0, 0.0], vec![2.0, 1.0]]).unwrap(),
            Domain::lower_half_plane(),
            Domain::axis_aligned_box(&[-3.0, -3.0], &[3.0, 3.0]).unwrap(),
            Domain::l_shape(2.0),
        ];
        let specs = [l2(), NormSpec::sup_norm(2), NormSpec::taxicab(2)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dom in &domains {
            for spec in &specs {
                for _ in 0..10_000 {
                    let x = random_point_in(dom, &mut rng);
                    let y = random_point_in(dom, &mut rng);
                    let dx = dom.d(spec, &x);
                    let dy = dom.d(spec, &y);
                    assert!(
                        (dx - dy).abs() <= spec.dist(&x, &y) + 1e-12,
                        "Lipschitz violated for {spec:?} at {x:?}, {y:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn boundary_distance_concave_on_convex_domains() {
        // d(su + (1−s)v) ≥ s d(u) + (1−s) d(v) on convex domains.
        let domains = [
            Domain::lower_half_plane(),
            Domain::axis_aligned_box(&[-3.0, -2.0], &[2.0, 3.0]).unwrap(),
        ];
        let specs = [l2(), NormSpec::sup_norm(2), NormSpec::p_norm(3.0, 2).unwrap()];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dom in &domains {
            for spec in &specs {
                for _ in 0..10_000 {
                    let u = random_point_in(dom, &mut rng);
                    let v = random_point_in(dom, &mut rng);
                    let s: f64 = rng.gen_range(0.0..1.0);
                    let m = vecn::convex_combination(&v, &u, s);
                    let lhs = dom.d(spec, &m);
                    let rhs = s * dom.d(spec, &u) + (1.0 - s) * dom.d(spec, &v);
                    assert!(lhs >= rhs - 1e-12, "concavity violated: {lhs} < {rhs}");
                }
            }
        }
    }

    /// Per-puncture minimum of `t ↦ ‖x0 + t(x−x0) − z‖` for the starlike
    /// guard, written independently of the domain internals.
    fn per_puncture_min(spec: &NormSpec, x0: &[f64], x: &[f64], z: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..=2000 {
            let t = k as f64 / 2000.0;
            best = best.min(spec.dist(&vecn::lerp(x0, x, t), z));
        }
        best
    }

    #[test]
    fn starlike_scaling_bound() {
        // d(sx + (1−s)x0) ≥ s d(x): on convex domains for arbitrary pairs, on
        // the starlike L-shape from its kernel, and on punctured Euclidean
        // space for pairs whose distance to every puncture is non-decreasing
        // along the segment (the clearance guard; valid for the Euclidean
        // norm, where monotone departure from a puncture z forces
        // <x0 − z, x − z> ≥ 0 and with it the scaling bound).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let specs = [l2(), NormSpec::sup_norm(2), NormSpec::taxicab(2)];

        let convex: [Domain; 2] = [
            Domain::lower_half_plane(),
            Domain::axis_aligned_box(&[-4.0, -4.0], &[4.0, 4.0]).unwrap(),
        ];
        for dom in &convex {
            for spec in &specs {
                for _ in 0..3000 {
                    let x0 = random_point_in(dom, &mut rng);
                    let x = random_point_in(dom, &mut rng);
                    let s: f64 = rng.gen_range(0.0..1.0);
                    let m = vecn::convex_combination(&x0, &x, s);
                    assert!(dom.d(spec, &m) >= s * dom.d(spec, &x) - 1e-12);
                }
            }
        }

        // Starlike but not convex: segments from the kernel point.
        let lshape = Domain::l_shape(2.0);
        let kernel = vec![1.0, 1.0];
        for spec in &specs {
            for _ in 0..2000 {
                let x = random_point_in(&lshape, &mut rng);
                let s: f64 = rng.gen_range(0.0..1.0);
                let m = vecn::convex_combination(&kernel, &x, s);
                assert!(
                    lshape.d(spec, &m) >= s * lshape.d(spec, &x) - 1e-9,
                    "L-shape starlike bound violated for {spec:?}: x={x:?} s={s}"
                );
            }
        }

        let punct = Domain::punctured(vec![vec![0.0, 0.0], vec![1.5, -1.0]]).unwrap();
        let punctures = [vec![0.0, 0.0], vec![1.5, -1.0]];
        let spec = l2();
        let mut accepted = 0;
        while accepted < 2000 {
            let x0 = random_point_in(&punct, &mut rng);
            let x = random_point_in(&punct, &mut rng);
            let guard_ok = punctures
                .iter()
                .all(|z| per_puncture_min(&spec, &x0, &x, z) >= spec.dist(&x0, z) - 1e-9);
            if !guard_ok {
                continue;
            }
            accepted += 1;
            let s: f64 = rng.gen_range(0.0..1.0);
            let m = vecn::convex_combination(&x0, &x, s);
            assert!(
                punct.d(&spec, &m) >= s * punct.d(&spec, &x) - 1e-12,
                "starlike bound violated: x0={x0:?} x={x:?} s={s}"
            );
        }
    }
}
