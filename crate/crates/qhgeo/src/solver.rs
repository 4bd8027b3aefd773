//! Quasihyperbolic distance estimation: Dijkstra over a weighted lattice
//! followed by local polyline refinement.
//!
//! The quasihyperbolic distance `k(x, y)` is an infimum over paths with no
//! closed form in general, so the solver brackets it:
//!
//! - the lower bound is the distance-ratio metric `j(x, y) ≤ k(x, y)`;
//! - the upper bound is the quasihyperbolic length of an explicit admissible
//!   polyline, found by a shortest path over lattice nodes inside `Ω` and
//!   improved by coordinate-descent refinement.
//!
//! Everything is deterministic: Dijkstra ties break on node index, and the
//! refinement schedule depends only on the inputs.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::normed_space::NormSpec;
use crate::paths::{j_distance, qh_polyline_length, qh_segment_length, MetricKind, Polyline};
use crate::quadrature::golden_min;
use crate::vecn;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Neighborhood used for lattice edges: 8 = kings moves, 16 adds knight
/// moves for better directional coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Eight,
    Sixteen,
}

impl Stencil {
    fn offsets(self) -> &'static [(i64, i64)] {
        const EIGHT: [(i64, i64); 8] =
            [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
        const SIXTEEN: [(i64, i64); 16] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
            (1, 2),
            (1, -2),
            (-1, 2),
            (-1, -2),
            (2, 1),
            (2, -1),
            (-2, 1),
            (-2, -1),
        ];
        match self {
            Stencil::Eight => &EIGHT,
            Stencil::Sixteen => &SIXTEEN,
        }
    }
}

/// Restrict the search to a metric ball: a node is pruned only when its
/// certified lower bound (the exact j-distance, which minorizes k) exceeds
/// `radius`; ambiguous nodes are kept, so a constrained minimum is a valid
/// lower-bound witness for path length inside the ball.
#[derive(Debug, Clone)]
pub struct BallConstraint {
    pub center: Vec<f64>,
    pub radius: f64,
    pub metric: MetricKind,
}

#[derive(Debug, Clone)]
pub struct SolverParams {
    pub grid_spacing: f64,
    /// Bounding-box inflation around the endpoints.
    pub grid_margin: f64,
    pub neighbor_stencil: Stencil,
    pub refine_rounds: usize,
    pub refine_step: f64,
    pub quad_tol: f64,
    pub ball_constraint: Option<BallConstraint>,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            grid_spacing: 0.05,
            grid_margin: 2.0,
            neighbor_stencil: Stencil::Sixteen,
            refine_rounds: 200,
            refine_step: 0.01,
            quad_tol: 1e-8,
            ball_constraint: None,
        }
    }
}

impl SolverParams {
    fn validate(&self) -> Result<()> {
        if !(self.grid_spacing > 0.0) || !(self.grid_margin > 0.0) {
            return Err(Error::invalid("grid spacing and margin must be positive"));
        }
        if !(self.refine_step > 0.0) || !(self.quad_tol > 0.0) {
            return Err(Error::invalid("refine step and quadrature tolerance must be positive"));
        }
        Ok(())
    }

    /// All length-dimensioned parameters scaled by `lambda`; multiplication
    /// by a constant is a quasihyperbolic isometry of punctured space, and a
    /// scaled solve should see the same discrete problem.
    pub fn scaled(&self, lambda: f64) -> Self {
        SolverParams {
            grid_spacing: self.grid_spacing * lambda,
            grid_margin: self.grid_margin * lambda,
            neighbor_stencil: self.neighbor_stencil,
            refine_rounds: self.refine_rounds,
            refine_step: self.refine_step * lambda,
            quad_tol: self.quad_tol,
            ball_constraint: self.ball_constraint.as_ref().map(|bc| BallConstraint {
                center: vecn::scale(&bc.center, lambda),
                radius: bc.radius,
                metric: bc.metric,
            }),
        }
    }
}

/// Bracket `lower ≤ k(x, y) ≤ upper` with the witnessing path.
#[derive(Debug, Clone)]
pub struct DistanceEstimate {
    /// Exact j-distance: the classical minorant of k.
    pub lower: f64,
    /// Quasihyperbolic length of `path`.
    pub upper: f64,
    pub path: Polyline,
}

struct Lattice {
    origin: [f64; 2],
    spacing: f64,
    nx: usize,
    ny: usize,
    feasible: Vec<bool>,
}

impl Lattice {
    fn build(
        domain: &Domain,
        spec: &NormSpec,
        lo: [f64; 2],
        hi: [f64; 2],
        params: &SolverParams,
    ) -> Result<Lattice> {
        let h = params.grid_spacing;
        let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 1;
        let ny = ((hi[1] - lo[1]) / h).ceil() as usize + 1;
        if nx.saturating_mul(ny) > 1_500_000 {
            return Err(Error::invalid(format!(
                "grid of {nx} x {ny} nodes is too large; increase spacing or shrink margin"
            )));
        }
        let mut feasible = vec![false; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let p = [lo[0] + ix as f64 * h, lo[1] + iy as f64 * h];
                let pt = [p[0], p[1]];
                // Keep quadrature away from the d → 0 singularity.
                let ok = domain.is_inside(&pt)
                    && domain.d(spec, &pt) > h / 4.0
                    && constraint_allows(domain, spec, params.ball_constraint.as_ref(), &pt);
                feasible[iy * nx + ix] = ok;
            }
        }
        Ok(Lattice { origin: lo, spacing: h, nx, ny, feasible })
    }

    fn pos(&self, idx: usize) -> Vec<f64> {
        let ix = idx % self.nx;
        let iy = idx / self.nx;
        vec![self.origin[0] + ix as f64 * self.spacing, self.origin[1] + iy as f64 * self.spacing]
    }

    fn cell_of(&self, p: &[f64]) -> (i64, i64) {
        (
            ((p[0] - self.origin[0]) / self.spacing).round() as i64,
            ((p[1] - self.origin[1]) / self.spacing).round() as i64,
        )
    }

    /// Feasible node indices within Chebyshev distance `reach` cells of `p`.
    fn nodes_near(&self, p: &[f64], reach: i64) -> Vec<usize> {
        let (cx, cy) = self.cell_of(p);
        let mut out = Vec::new();
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let (ix, iy) = (cx + dx, cy + dy);
                if ix >= 0 && iy >= 0 && (ix as usize) < self.nx && (iy as usize) < self.ny {
                    let idx = iy as usize * self.nx + ix as usize;
                    if self.feasible[idx] {
                        out.push(idx);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn constraint_allows(
    domain: &Domain,
    spec: &NormSpec,
    bc: Option<&BallConstraint>,
    z: &[f64],
) -> bool {
    match bc {
        None => true,
        Some(bc) => match j_distance(domain, spec, &bc.center, z) {
            Ok(j) => j <= bc.radius + 1e-12,
            Err(_) => false,
        },
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapState {
    cost: f64,
    node: usize,
}

impl Eq for HeapState {}

impl Ord for HeapState {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost, ties broken by node index for determinism.
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NO_PREV: u32 = u32::MAX;
const FROM_SOURCE: u32 = u32::MAX - 1;

struct Dijkstra {
    dist: Vec<f64>,
    prev: Vec<u32>,
}

/// Single-source Dijkstra over the lattice. `seeds` carries the initial
/// (node, cost) frontier; `target` (if any) stops the search once settled.
fn dijkstra(
    domain: &Domain,
    spec: &NormSpec,
    lattice: &Lattice,
    params: &SolverParams,
    seeds: &[(usize, f64)],
    target: Option<&[f64]>,
) -> (Dijkstra, f64, u32) {
    let n = lattice.nx * lattice.ny;
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![NO_PREV; n];
    let mut heap = BinaryHeap::new();
    for &(node, cost) in seeds {
        if cost < dist[node] {
            dist[node] = cost;
            prev[node] = FROM_SOURCE;
            heap.push(HeapState { cost, node });
        }
    }
    let target_nodes: Vec<usize> = match target {
        Some(t) => lattice.nodes_near(t, 2),
        None => Vec::new(),
    };
    let mut best_target = f64::INFINITY;
    let mut best_target_via = NO_PREV;
    let offsets = params.neighbor_stencil.offsets();
    while let Some(HeapState { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        if let Some(t) = target {
            if target_nodes.binary_search(&node).is_ok() {
                let w = qh_segment_length(domain, spec, &lattice.pos(node), t, params.quad_tol)
                    .unwrap_or(f64::INFINITY);
                if cost + w < best_target {
                    best_target = cost + w;
                    best_target_via = node as u32;
                }
            }
            // Every remaining node is at least as far as the settled target.
            if cost >= best_target {
                break;
            }
        }
        let ix = (node % lattice.nx) as i64;
        let iy = (node / lattice.nx) as i64;
        let p = lattice.pos(node);
        for &(dx, dy) in offsets {
            let (jx, jy) = (ix + dx, iy + dy);
            if jx < 0 || jy < 0 || jx as usize >= lattice.nx || jy as usize >= lattice.ny {
                continue;
            }
            let next = jy as usize * lattice.nx + jx as usize;
            if !lattice.feasible[next] {
                continue;
            }
            let q = lattice.pos(next);
            let w = qh_segment_length(domain, spec, &p, &q, params.quad_tol)
                .unwrap_or(f64::INFINITY);
            let cand = cost + w;
            if cand < dist[next] {
                dist[next] = cand;
                prev[next] = node as u32;
                heap.push(HeapState { cost: cand, node: next });
            }
        }
    }
    (Dijkstra { dist, prev }, best_target, best_target_via)
}

fn bounding_lattice(
    domain: &Domain,
    spec: &NormSpec,
    x: &[f64],
    y: &[f64],
    params: &SolverParams,
) -> Result<Lattice> {
    let m = params.grid_margin;
    let lo = [x[0].min(y[0]) - m, x[1].min(y[1]) - m];
    let hi = [x[0].max(y[0]) + m, x[1].max(y[1]) + m];
    Lattice::build(domain, spec, lo, hi, params)
}

/// Weight-minimal lattice polyline from `x` to `y`.
///
/// Lattice nodes inside `Ω` with clearance above `grid_spacing / 4` carry
/// edges weighted by quasihyperbolic segment length; `x` and `y` connect to
/// feasible nodes near them. Fails with [`Error::Disconnected`] when no
/// feasible route exists at this resolution.
pub fn grid_shortest_path(
    domain: &Domain,
    spec: &NormSpec,
    x: &[f64],
    y: &[f64],
    params: &SolverParams,
) -> Result<Polyline> {
    params.validate()?;
    check_planar(domain, spec, &[x, y])?;
    for p in [x, y] {
        if !domain.is_inside(p) {
            return Err(Error::OutsideDomain);
        }
    }
    if vecn::same_point(x, y) {
        return Ok(Polyline::from_vertices_unchecked(vec![x.to_vec(), y.to_vec()]));
    }
    let lattice = bounding_lattice(domain, spec, x, y, params)?;
    let seeds: Vec<(usize, f64)> = lattice
        .nodes_near(x, 2)
        .into_iter()
        .filter_map(|node| {
            let w = qh_segment_length(domain, spec, x, &lattice.pos(node), params.quad_tol)
                .unwrap_or(f64::INFINITY);
            w.is_finite().then_some((node, w))
        })
        .collect();
    if seeds.is_empty() {
        return Err(Error::Disconnected { spacing: params.grid_spacing });
    }
    let (search, best, via) = dijkstra(domain, spec, &lattice, params, &seeds, Some(y));
    if !best.is_finite() {
        return Err(Error::Disconnected { spacing: params.grid_spacing });
    }
    let mut chain = vec![y.to_vec()];
    let mut cur = via;
    while cur != FROM_SOURCE {
        chain.push(lattice.pos(cur as usize));
        cur = search.prev[cur as usize];
    }
    chain.push(x.to_vec());
    chain.reverse();
    chain.dedup_by(|a, b| vecn::same_point(a, b));
    Ok(Polyline::from_vertices_unchecked(chain))
}

/// One vertex-move pass: returns the improved length if any move helped.
struct RefineState {
    vertices: Vec<Vec<f64>>,
    seg_len: Vec<f64>,
}

impl RefineState {
    fn total(&self) -> f64 {
        self.seg_len.iter().sum()
    }
}

/// Shorten a feasible path by coordinate descent on interior vertices with a
/// shrinking step, splitting any segment whose quasihyperbolic length exceeds
/// twice the per-segment mean. Descent runs coarse to fine: when a sweep
/// stalls, every segment is split and the sweep resumes, so corrections move
/// along the whole path in few rounds instead of diffusing vertex by vertex.
/// The measured length never increases; the input is returned unchanged when
/// no move improves it.
pub fn refine_polyline(
    domain: &Domain,
    spec: &NormSpec,
    path: &Polyline,
    params: &SolverParams,
) -> Result<Polyline> {
    params.validate()?;
    check_planar(domain, spec, &[path.first()])?;
    if params.refine_rounds == 0 {
        return Ok(path.clone());
    }
    let seg = |a: &[f64], b: &[f64]| {
        qh_segment_length(domain, spec, a, b, params.quad_tol).unwrap_or(f64::INFINITY)
    };
    let fresh = |vertices: Vec<Vec<f64>>| -> RefineState {
        let seg_len = vertices.windows(2).map(|w| seg(&w[0], &w[1])).collect();
        RefineState { vertices, seg_len }
    };
    let mut vertices: Vec<Vec<f64>> = path.vertices().to_vec();
    // A bare segment has no interior vertex to move; seed one at the midpoint.
    if vertices.len() == 2 {
        let mid = vecn::lerp(&vertices[0], &vertices[1], 0.5);
        if domain.is_inside(&mid) {
            vertices.insert(1, mid);
        }
    }
    let mut state = fresh(vertices);
    let input_len = state.total();
    let target_verts = state.vertices.len().clamp(33, 129);
    // Start from a coarsened resampling when that does not lengthen the
    // path (lattice staircases usually shorten).
    if state.vertices.len() > 9 && input_len.is_finite() {
        if let Ok(coarse) =
            crate::paths::arclength_reparameterize(spec, path, 8)
        {
            let coarse_state = fresh(coarse.into_vertices());
            if coarse_state.total() <= input_len {
                state = coarse_state;
            }
        }
    }
    let mut step = params.refine_step;
    let bc = params.ball_constraint.as_ref();
    // Accepting a move needs headroom over quadrature noise, or noise-level
    // "improvements" would let vertices drift off a geodesic.
    let accept_margin = 2.0 * params.quad_tol;
    // Axis and diagonal search directions: sup-norm lengths are flat along
    // single axes near a diagonal geodesic, so axes alone can stall.
    const DIRS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)];
    for _ in 0..params.refine_rounds {
        let mut improved = false;
        for i in 1..state.vertices.len() - 1 {
            let before = state.seg_len[i - 1] + state.seg_len[i];
            let mut cur = before;
            for (dx, dy) in DIRS {
                let base = state.vertices[i].clone();
                let objective = |t: f64| {
                    let cand = vec![base[0] + t * dx * step, base[1] + t * dy * step];
                    if !domain.is_inside(&cand) || !constraint_allows(domain, spec, bc, &cand) {
                        return f64::INFINITY;
                    }
                    seg(&state.vertices[i - 1], &cand) + seg(&cand, &state.vertices[i + 1])
                };
                // Line search a few steps either way; only strictly improving
                // minima are taken, so non-unimodal stretches are harmless.
                let (t, val) = golden_min(objective, -4.0, 4.0, 1e-3);
                if val < cur - accept_margin {
                    cur = val;
                    let cand = vec![base[0] + t * dx * step, base[1] + t * dy * step];
                    let l0 = seg(&state.vertices[i - 1], &cand);
                    let l1 = seg(&cand, &state.vertices[i + 1]);
                    state.vertices[i] = cand;
                    state.seg_len[i - 1] = l0;
                    state.seg_len[i] = l1;
                }
            }
            improved |= cur < before;
        }
        // Midpoint subdivision of overlong segments (path geometry is
        // unchanged). The vertex budget stops the mean-shrink cascade that
        // tiny endpoint-connector segments would otherwise feed.
        if state.vertices.len() < target_verts {
            let mean = state.total() / state.seg_len.len() as f64;
            if mean.is_finite() {
                let mut i = 0;
                while i < state.seg_len.len() {
                    if state.seg_len[i] > 2.0 * mean {
                        let mid = vecn::lerp(&state.vertices[i], &state.vertices[i + 1], 0.5);
                        if domain.is_inside(&mid) {
                            let l0 = seg(&state.vertices[i], &mid);
                            let l1 = seg(&mid, &state.vertices[i + 1]);
                            state.vertices.insert(i + 1, mid);
                            state.seg_len[i] = l0;
                            state.seg_len.insert(i + 1, l1);
                            i += 1;
                        }
                    }
                    i += 1;
                }
            }
        }
        if !improved {
            if state.vertices.len() * 2 - 1 <= target_verts {
                // Next pyramid level: split everything, resume at full step.
                let mut split = Vec::with_capacity(state.vertices.len() * 2 - 1);
                let mut lens = Vec::with_capacity(state.seg_len.len() * 2);
                for i in 0..state.seg_len.len() {
                    let mid = vecn::lerp(&state.vertices[i], &state.vertices[i + 1], 0.5);
                    split.push(state.vertices[i].clone());
                    if domain.is_inside(&mid) {
                        let l0 = seg(&state.vertices[i], &mid);
                        let l1 = seg(&mid, &state.vertices[i + 1]);
                        split.push(mid);
                        lens.push(l0);
                        lens.push(l1);
                    } else {
                        lens.push(state.seg_len[i]);
                    }
                }
                split.push(state.vertices[state.vertices.len() - 1].clone());
                state = RefineState { vertices: split, seg_len: lens };
                step = params.refine_step;
            } else {
                step *= 0.5;
                if step < params.refine_step * 1e-6 {
                    break;
                }
            }
        }
    }
    let mut vertices = state.vertices;
    vertices.dedup_by(|a, b| vecn::same_point(a, b));
    Ok(Polyline::from_vertices_unchecked(vertices))
}

/// Bracket the quasihyperbolic distance `k(x, y)`: exact j-distance below,
/// grid shortest path plus refinement above.
pub fn qh_distance(
    domain: &Domain,
    spec: &NormSpec,
    x: &[f64],
    y: &[f64],
    params: &SolverParams,
) -> Result<DistanceEstimate> {
    if vecn::same_point(x, y) {
        if !domain.contains(x)? {
            return Err(Error::OutsideDomain);
        }
        return Ok(DistanceEstimate {
            lower: 0.0,
            upper: 0.0,
            path: Polyline::from_vertices_unchecked(vec![x.to_vec(), y.to_vec()]),
        });
    }
    let lower = j_distance(domain, spec, x, y)?;
    let rough = grid_shortest_path(domain, spec, x, y, params)?;
    let mut path = refine_polyline(domain, spec, &rough, params)?;
    let mut upper = qh_polyline_length(domain, spec, &path, params.quad_tol)?;
    // The straight chord, refined, is an independent admissible candidate;
    // pointwise descent from the lattice route can stall on the flat
    // geodesic families of polyhedral norms (sup-norm diagonals), where the
    // chord is exact.
    let chord_ok = qh_segment_length(domain, spec, x, y, params.quad_tol)?.is_finite()
        && constraint_allows(domain, spec, params.ball_constraint.as_ref(), x)
        && constraint_allows(domain, spec, params.ball_constraint.as_ref(), y);
    if chord_ok {
        let chord = Polyline::from_vertices_unchecked(vec![x.to_vec(), y.to_vec()]);
        let refined = refine_polyline(domain, spec, &chord, params)?;
        let w = qh_polyline_length(domain, spec, &refined, params.quad_tol)?;
        if w < upper {
            upper = w;
            path = refined;
        }
    }
    // Quadrature noise can push the witness a hair under the exact minorant
    // when the straight segment is itself the geodesic; clamp within noise.
    if upper < lower {
        debug_assert!(
            upper >= lower - (10.0 * params.quad_tol).max(1e-9 * lower),
            "upper {upper} fell below lower {lower} beyond quadrature noise"
        );
        upper = lower;
    }
    assert!(lower <= upper, "bracket invariant violated: {lower} > {upper}");
    Ok(DistanceEstimate { lower, upper, path })
}

/// Single-source field of quasihyperbolic upper bounds around `center`,
/// queryable at arbitrary points; the workhorse behind k-ball tracing.
pub struct DistanceField<'a> {
    domain: &'a Domain,
    spec: &'a NormSpec,
    lattice: Lattice,
    dist: Vec<f64>,
    quad_tol: f64,
}

impl<'a> DistanceField<'a> {
    /// Build the field on a box covering `center ± norm_radius`.
    pub fn from_center(
        domain: &'a Domain,
        spec: &'a NormSpec,
        center: &[f64],
        norm_radius: f64,
        params: &SolverParams,
    ) -> Result<Self> {
        params.validate()?;
        check_planar(domain, spec, &[center])?;
        if !domain.is_inside(center) {
            return Err(Error::OutsideDomain);
        }
        if !(norm_radius > 0.0) {
            return Err(Error::invalid("field radius must be positive"));
        }
        let pad = norm_radius + 3.0 * params.grid_spacing;
        let lo = [center[0] - pad, center[1] - pad];
        let hi = [center[0] + pad, center[1] + pad];
        let lattice = Lattice::build(domain, spec, lo, hi, params)?;
        let seeds: Vec<(usize, f64)> = lattice
            .nodes_near(center, 2)
            .into_iter()
            .filter_map(|node| {
                let w =
                    qh_segment_length(domain, spec, center, &lattice.pos(node), params.quad_tol)
                        .unwrap_or(f64::INFINITY);
                w.is_finite().then_some((node, w))
            })
            .collect();
        if seeds.is_empty() {
            return Err(Error::Disconnected { spacing: params.grid_spacing });
        }
        let (search, _, _) = dijkstra(domain, spec, &lattice, params, &seeds, None);
        Ok(DistanceField { domain, spec, lattice, dist: search.dist, quad_tol: params.quad_tol })
    }

    /// Upper bound on `k(center, z)`: the best settled node near `z` plus the
    /// connecting segment. `+∞` when `z` is outside `Ω` or beyond the field.
    pub fn upper_bound(&self, z: &[f64]) -> f64 {
        if z.len() != 2 || !self.domain.is_inside(z) {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        for node in self.lattice.nodes_near(z, 2) {
            let base = self.dist[node];
            if !base.is_finite() || base >= best {
                continue;
            }
            let w = qh_segment_length(self.domain, self.spec, &self.lattice.pos(node), z, self.quad_tol)
                .unwrap_or(f64::INFINITY);
            best = best.min(base + w);
        }
        best
    }
}

fn check_planar(domain: &Domain, spec: &NormSpec, points: &[&[f64]]) -> Result<()> {
    if domain.dim() != 2 || spec.dim() != 2 {
        return Err(Error::invalid("the grid solver is two-dimensional"));
    }
    for p in points {
        if p.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: p.len() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LN_9_4: f64 = 0.810_930_216_216_328_9;

    fn l2() -> NormSpec {
        NormSpec::euclidean(2)
    }

    fn sup() -> NormSpec {
        NormSpec::sup_norm(2)
    }

    /// Closed-form quasihyperbolic distance of the punctured Euclidean plane
    /// via the log-polar map: k = sqrt(ln²(r₁/r₂) + θ²). Written before and
    /// independently of the solver; the angle is taken in [0, π].
    fn punctured_plane_oracle(x: &[f64], y: &[f64]) -> f64 {
        let r1 = x[0].hypot(x[1]);
        let r2 = y[0].hypot(y[1]);
        let cosang = ((x[0] * y[0] + x[1] * y[1]) / (r1 * r2)).clamp(-1.0, 1.0);
        let theta = cosang.acos();
        ((r1 / r2).ln().powi(2) + theta * theta).sqrt()
    }

    fn quick_params() -> SolverParams {
        SolverParams {
            grid_spacing: 0.1,
            grid_margin: 0.6,
            refine_rounds: 80,
            ..SolverParams::default()
        }
    }

    #[test]
    fn grid_path_half_plane_vertical_pair() {
        let h = Domain::lower_half_plane();
        let params = SolverParams { grid_margin: 1.0, ..SolverParams::default() };
        let path = grid_shortest_path(&h, &l2(), &[0.0, -1.0], &[0.0, -2.0], &params).unwrap();
        let w = qh_polyline_length(&h, &l2(), &path, 1e-9).unwrap();
        assert!(w <= std::f64::consts::LN_2 + 0.01, "grid weight {w}");
        assert!(w >= std::f64::consts::LN_2 - 1e-6, "impossibly short: {w}");
    }

    #[test]
    fn grid_path_counterexample_pair() {
        let h = Domain::lower_half_plane();
        let params = SolverParams { grid_margin: 1.5, ..SolverParams::default() };
        let path = grid_shortest_path(&h, &sup(), &[-1.0, -2.0], &[1.0, -2.0], &params).unwrap();
        let w = qh_polyline_length(&h, &sup(), &path, 1e-9).unwrap();
        assert!(w <= LN_9_4 + 0.02, "grid weight {w}");
    }

    #[test]
    fn coincident_endpoints_are_trivial() {
        let h = Domain::lower_half_plane();
        let est = qh_distance(&h, &l2(), &[0.5, -1.0], &[0.5, -1.0], &quick_params()).unwrap();
        assert_eq!(est.lower, 0.0);
        assert_eq!(est.upper, 0.0);
    }

    #[test]
    fn refine_keeps_the_vertical_geodesic() {
        let h = Domain::lower_half_plane();
        let seg = Polyline::new(vec![vec![0.0, -1.0], vec![0.0, -2.0]]).unwrap();
        let refined = refine_polyline(&h, &l2(), &seg, &SolverParams::default()).unwrap();
        for v in refined.vertices() {
            assert!(v[0].abs() < 1e-6, "vertex drifted off the geodesic: {v:?}");
            assert!((-2.0 - 1e-9..=-1.0 + 1e-9).contains(&v[1]));
        }
        let w = qh_polyline_length(&h, &l2(), &refined, 1e-10).unwrap();
        assert!((w - std::f64::consts::LN_2).abs() < 1e-6, "length changed: {w}");
    }

    #[test]
    fn refine_descends_from_the_straight_chord() {
        // The chord a → b has weight 1; descent must reach the broken line
        // through (0, −3) whose weight is ln(9/4).
        let h = Domain::lower_half_plane();
        let chord = Polyline::new(vec![vec![-1.0, -2.0], vec![1.0, -2.0]]).unwrap();
        let refined = refine_polyline(&h, &sup(), &chord, &SolverParams::default()).unwrap();
        let w = qh_polyline_length(&h, &sup(), &refined, 1e-10).unwrap();
        assert!(w <= LN_9_4 + 1e-3, "refined weight {w}");
    }

    #[test]
    fn refine_with_zero_rounds_is_identity() {
        let h = Domain::lower_half_plane();
        let params = SolverParams { refine_rounds: 0, ..SolverParams::default() };
        let path = Polyline::new(vec![vec![-1.0, -2.0], vec![0.0, -2.5], vec![1.0, -2.0]]).unwrap();
        let out = refine_polyline(&h, &sup(), &path, &params).unwrap();
        assert_eq!(out.vertices(), path.vertices());
    }

    #[test]
    fn refinement_is_monotone_round_by_round() {
        let h = Domain::lower_half_plane();
        let mut path = Polyline::new(vec![vec![-1.0, -2.0], vec![1.0, -2.0]]).unwrap();
        let params = SolverParams { refine_rounds: 1, ..SolverParams::default() };
        let mut prev = qh_polyline_length(&h, &sup(), &path, params.quad_tol).unwrap();
        for _ in 0..30 {
            path = refine_polyline(&h, &sup(), &path, &params).unwrap();
            let cur = qh_polyline_length(&h, &sup(), &path, params.quad_tol).unwrap();
            assert!(cur <= prev + params.quad_tol, "length grew: {cur} > {prev}");
            prev = cur;
        }
    }

    #[test]
    fn qh_distance_matches_punctured_plane_oracle_on_axes() {
        let p = Domain::punctured_plane_at_origin();
        let params = SolverParams { grid_margin: 1.0, ..SolverParams::default() };

        let quarter = qh_distance(&p, &l2(), &[1.0, 0.0], &[0.0, 1.0], &params).unwrap();
        let target = std::f64::consts::FRAC_PI_2;
        assert!((quarter.upper - target).abs() < 1e-2, "upper {}", quarter.upper);
        assert!(quarter.lower <= quarter.upper);

        let radial =
            qh_distance(&p, &l2(), &[1.0, 0.0], &[std::f64::consts::E, 0.0], &params).unwrap();
        assert!((radial.upper - 1.0).abs() < 1e-2, "upper {}", radial.upper);
    }

    #[test]
    fn qh_distance_matches_oracle_on_random_pairs() {
        let p = Domain::punctured_plane_at_origin();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let params = quick_params();
        for _ in 0..20 {
            let r1: f64 = rng.gen_range(0.8..1.4);
            let ratio: f64 = rng.gen_range(1.0f64 / 3.0..3.0);
            let r2 = (r1 * ratio).clamp(0.5, 3.0);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let x = vec![r1, 0.0];
            let y = vec![r2 * th.cos(), r2 * th.sin()];
            let est = qh_distance(&p, &l2(), &x, &y, &params).unwrap();
            let oracle = punctured_plane_oracle(&x, &y);
            assert!(
                (est.upper - oracle).abs() < 1e-2,
                "oracle {oracle} vs upper {} for {x:?} -> {y:?}",
                est.upper
            );
            assert!(est.lower <= oracle + 1e-12, "j must minorize k");
        }
    }

    #[test]
    fn scaling_is_a_quasihyperbolic_isometry() {
        let p = Domain::punctured_plane_at_origin();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = quick_params();
        for _ in 0..50 {
            let r1: f64 = rng.gen_range(0.7..1.5);
            let r2: f64 = rng.gen_range(0.7..1.5);
            let th: f64 = rng.gen_range(0.2..std::f64::consts::FRAC_PI_2);
            let x = vec![r1, 0.0];
            let y = vec![r2 * th.cos(), r2 * th.sin()];
            let base = qh_distance(&p, &l2(), &x, &y, &params).unwrap().upper;
            for lambda in [0.5, 2.0, 10.0] {
                let xs = vecn::scale(&x, lambda);
                let ys = vecn::scale(&y, lambda);
                let scaled = qh_distance(&p, &l2(), &xs, &ys, &params.scaled(lambda)).unwrap();
                assert!(
                    (scaled.upper - base).abs() <= 2e-2,
                    "lambda {lambda}: {} vs {base}",
                    scaled.upper
                );
            }
        }
    }

    #[test]
    fn solver_upper_bound_is_symmetric() {
        let p = Domain::punctured_plane_at_origin();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let params = quick_params();
        for _ in 0..50 {
            let r1: f64 = rng.gen_range(0.7..1.5);
            let r2: f64 = rng.gen_range(0.7..1.5);
            let th: f64 = rng.gen_range(0.2..std::f64::consts::PI);
            let x = vec![r1, 0.0];
            let y = vec![r2 * th.cos(), r2 * th.sin()];
            let xy = qh_distance(&p, &l2(), &x, &y, &params).unwrap().upper;
            let yx = qh_distance(&p, &l2(), &y, &x, &params).unwrap().upper;
            assert!((xy - yx).abs() <= 1e-2, "asymmetric: {xy} vs {yx}");
        }
    }

    #[test]
    fn removing_a_puncture_never_lengthens() {
        let two = Domain::punctured(vec![vec![0.0, 0.0], vec![0.9, 0.9]]).unwrap();
        let one = Domain::punctured_plane_at_origin();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let params = quick_params();
        for _ in 0..15 {
            let x = vec![rng.gen_range(0.3..1.8), rng.gen_range(-1.2..-0.3)];
            let y = vec![rng.gen_range(-1.8..-0.3), rng.gen_range(0.3..1.2)];
            if !two.is_inside(&x) || !two.is_inside(&y) {
                continue;
            }
            let constrained = qh_distance(&two, &l2(), &x, &y, &params).unwrap().upper;
            let free = qh_distance(&one, &l2(), &x, &y, &params).unwrap().upper;
            assert!(
                free <= constrained + 1e-2,
                "enlarging the domain lengthened: {free} > {constrained}"
            );
        }
    }

    #[test]
    fn ball_constraint_prunes_and_disconnects() {
        let h = Domain::lower_half_plane();
        let x = [0.0, -1.0];
        let y = [0.0, -2.5];
        // A tiny ball around x cannot contain any route to y.
        let params = SolverParams {
            ball_constraint: Some(BallConstraint {
                center: x.to_vec(),
                radius: 0.05,
                metric: MetricKind::QuasiHyperbolic,
            }),
            ..quick_params()
        };
        match grid_shortest_path(&h, &l2(), &x, &y, &params) {
            Err(Error::Disconnected { .. }) => {}
            other => panic!("expected disconnection, got {other:?}"),
        }
    }

    #[test]
    fn distance_field_agrees_with_oracle() {
        let p = Domain::punctured_plane_at_origin();
        let spec = l2();
        let center = [1.0, 0.0];
        let params = SolverParams { grid_spacing: 0.04, ..SolverParams::default() };
        let field = DistanceField::from_center(&p, &spec, &center, 1.2, &params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r: f64 = rng.gen_range(0.5..1.6);
            let z = [center[0] + r * th.cos() * 0.6, center[1] + r * th.sin() * 0.6];
            if !p.is_inside(&z) {
                continue;
            }
            let oracle = punctured_plane_oracle(&center, &z);
            let ub = field.upper_bound(&z);
            assert!(ub >= oracle - 1e-9, "upper bound below true distance");
            assert!(ub <= oracle + 0.04, "field too loose: {ub} vs {oracle}");
        }
    }

    #[test]
    fn rejects_outside_and_bad_dims() {
        let h = Domain::lower_half_plane();
        assert!(matches!(
            qh_distance(&h, &l2(), &[0.0, 1.0], &[0.0, -1.0], &quick_params()),
            Err(Error::OutsideDomain)
        ));
        let p3 = Domain::punctured(vec![vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(qh_distance(
            &p3,
            &NormSpec::euclidean(3),
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &quick_params()
        )
        .is_err());
    }
}

#[cfg(test)]
mod stencil_tests {
    use super::*;

    #[test]
    fn eight_neighbor_stencil_solves_axis_aligned_pairs() {
        let h = Domain::lower_half_plane();
        let l2 = NormSpec::euclidean(2);
        let params = SolverParams {
            neighbor_stencil: Stencil::Eight,
            grid_margin: 0.8,
            ..SolverParams::default()
        };
        let est = qh_distance(&h, &l2, &[0.0, -1.0], &[0.0, -2.0], &params).unwrap();
        assert!((est.upper - std::f64::consts::LN_2).abs() < 1e-2, "upper {}", est.upper);
    }

    #[test]
    fn weighted_norm_distances_solve() {
        // Weighted sup norm: boundary distance uses the weighted dual norm.
        let h = Domain::lower_half_plane();
        let spec = NormSpec::weighted_p_norm(f64::INFINITY, vec![1.0, 2.0]).unwrap();
        // d((0, y)) = |y| / ||(0,1)||_* = |y| / (1/2) = 2|y|.
        assert!((h.boundary_distance(&spec, &[0.0, -1.0]).unwrap() - 2.0).abs() < 1e-12);
        let params = SolverParams {
            grid_spacing: 0.1,
            grid_margin: 0.6,
            refine_rounds: 60,
            ..SolverParams::default()
        };
        let est = qh_distance(&h, &spec, &[0.0, -1.0], &[0.0, -2.0], &params).unwrap();
        // Vertical drop: ∫₁² (2 dt) / (2t) = ln 2 again (weights cancel).
        assert!((est.upper - std::f64::consts::LN_2).abs() < 1e-2, "upper {}", est.upper);
        assert!(est.lower <= est.upper);
    }
}
