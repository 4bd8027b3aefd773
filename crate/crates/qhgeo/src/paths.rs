//! Polyline paths and the metrics living on them: norm length,
//! quasihyperbolic length via adaptive quadrature, the distance-ratio
//! (j-)metric, reparameterizations, and path averaging.
//!
//! Polylines are the universal path representation here: any rectifiable path
//! can be approximated uniformly by a broken line, and every quantity the
//! experiments need is computable on broken lines. For a polyline the
//! norm-length supremum over partitions is attained at the vertex partition,
//! so `norm_length` is a plain sum. The quasihyperbolic length of a segment is
//!
//! ```text
//! ℓ_k([p, q]) = ‖q − p‖ ∫₀¹ dt / d(p + t (q − p))
//! ```
//!
//! integrated by adaptive Simpson; segments that touch `∂Ω` get the `+∞`
//! sentinel rather than an error, so shortest-path relaxations can prune them
//! uniformly.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::normed_space::NormSpec;
use crate::quadrature::adaptive_simpson;
use crate::vecn;

/// Which metric a ball or check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    QuasiHyperbolic,
    DistanceRatio,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricKind::QuasiHyperbolic => write!(f, "k"),
            MetricKind::DistanceRatio => write!(f, "j"),
        }
    }
}

/// A rectifiable path as a finite vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Vec<f64>>,
}

impl Polyline {
    /// A polyline from at least two vertices of equal dimension with distinct
    /// consecutive vertices.
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("polyline needs at least two vertices"));
        }
        let dim = vertices[0].len();
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("polyline vertices must be finite"));
            }
        }
        for w in vertices.windows(2) {
            if vecn::same_point(&w[0], &w[1]) {
                return Err(Error::invalid("consecutive polyline vertices must be distinct"));
            }
        }
        Ok(Polyline { vertices })
    }

    /// Internal constructor that tolerates repeated consecutive vertices;
    /// used for endpoint padding and trivial single-point estimates, where
    /// zero-length segments contribute zero length.
    pub(crate) fn from_vertices_unchecked(vertices: Vec<Vec<f64>>) -> Self {
        Polyline { vertices }
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec<f64>> {
        self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn num_segments(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn first(&self) -> &[f64] {
        &self.vertices[0]
    }

    pub fn last(&self) -> &[f64] {
        &self.vertices[self.vertices.len() - 1]
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Polyline { vertices: v }
    }

    /// Concatenate with a path starting where this one ends.
    pub fn concat(&self, other: &Polyline) -> Result<Polyline> {
        if !vecn::same_point(self.last(), other.first()) {
            return Err(Error::invalid("concat requires matching junction vertices"));
        }
        let mut v = self.vertices.clone();
        v.extend(other.vertices.iter().skip(1).cloned());
        Ok(Polyline { vertices: v })
    }
}

/// `Σ ‖v_{i+1} − v_i‖`: for polylines the partition supremum is attained at
/// the vertices.
pub fn norm_length(spec: &NormSpec, path: &Polyline) -> Result<f64> {
    if spec.dim() != path.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), actual: path.dim() });
    }
    Ok(path.vertices.windows(2).map(|w| spec.dist(&w[0], &w[1])).sum())
}

/// Point at norm-arclength `s` along the path (clamped to `[0, total]`).
pub fn point_at_arclength(spec: &NormSpec, path: &Polyline, s: f64) -> Result<Vec<f64>> {
    if spec.dim() != path.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), actual: path.dim() });
    }
    let mut remaining = s.max(0.0);
    for w in path.vertices.windows(2) {
        let len = spec.dist(&w[0], &w[1]);
        if remaining <= len {
            if len == 0.0 {
                return Ok(w[0].clone());
            }
            return Ok(vecn::lerp(&w[0], &w[1], remaining / len));
        }
        remaining -= len;
    }
    Ok(path.last().to_vec())
}

/// Resample to `n + 1` vertices at equal norm-arclength spacing: the
/// constant-speed parameterization of the polyline.
pub fn arclength_reparameterize(spec: &NormSpec, path: &Polyline, n: usize) -> Result<Polyline> {
    if n == 0 {
        return Err(Error::invalid("segment count must be positive"));
    }
    let total = norm_length(spec, path)?;
    if total <= 0.0 {
        return Err(Error::invalid("cannot reparameterize a zero-length path"));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(path.vertices[0].clone());
    let mut seg = 0usize;
    let mut seg_start_len = 0.0;
    let mut seg_len = spec.dist(&path.vertices[0], &path.vertices[1]);
    for j in 1..n {
        let target = total * j as f64 / n as f64;
        while seg_start_len + seg_len < target && seg + 2 < path.vertices.len() {
            seg_start_len += seg_len;
            seg += 1;
            seg_len = spec.dist(&path.vertices[seg], &path.vertices[seg + 1]);
        }
        let t = if seg_len > 0.0 { (target - seg_start_len) / seg_len } else { 0.0 };
        out.push(vecn::lerp(&path.vertices[seg], &path.vertices[seg + 1], t.clamp(0.0, 1.0)));
    }
    out.push(path.last().to_vec());
    Ok(Polyline::from_vertices_unchecked(out))
}

/// Quasihyperbolic length of the straight segment `[p, q]` to absolute
/// quadrature error `tol`. Returns `+∞` when the segment touches `∂Ω`
/// (clearance zero): the infeasible-segment sentinel.
pub fn qh_segment_length(
    domain: &Domain,
    spec: &NormSpec,
    p: &[f64],
    q: &[f64],
    tol: f64,
) -> Result<f64> {
    if !domain.contains(p)? || !domain.contains(q)? {
        return Err(Error::OutsideDomain);
    }
    let len = spec.dist(p, q);
    if len == 0.0 {
        return Ok(0.0);
    }
    // Fast clearance test: d is 1-Lipschitz, so a segment shorter than both
    // endpoint clearances cannot reach the boundary. The golden-section
    // search is needed only for segments that might.
    let dp = domain.d(spec, p);
    let dq = domain.d(spec, q);
    if dp.min(dq) <= len {
        let clearance = domain.min_boundary_distance_on_segment(spec, p, q)?;
        if clearance.min_distance <= 0.0 {
            return Ok(f64::INFINITY);
        }
    }
    let integral = adaptive_simpson(
        |t| 1.0 / domain.d(spec, &vecn::lerp(p, q, t)),
        0.0,
        1.0,
        tol / len,
    );
    Ok(len * integral)
}

/// Quasihyperbolic length of a polyline: segment sum with the tolerance
/// split evenly, `+∞` if any segment is infeasible.
pub fn qh_polyline_length(
    domain: &Domain,
    spec: &NormSpec,
    path: &Polyline,
    tol: f64,
) -> Result<f64> {
    let nseg = path.num_segments().max(1);
    let per_seg = tol / nseg as f64;
    let mut total = 0.0;
    for w in path.vertices.windows(2) {
        let l = qh_segment_length(domain, spec, &w[0], &w[1], per_seg)?;
        if l.is_infinite() {
            return Ok(f64::INFINITY);
        }
        total += l;
    }
    Ok(total)
}

/// Resample to `n + 1` vertices at equal quasihyperbolic-arclength spacing,
/// derived from the cumulative quasihyperbolic length by inverse
/// interpolation on a per-segment table.
pub fn qh_arclength_reparameterize(
    domain: &Domain,
    spec: &NormSpec,
    path: &Polyline,
    n: usize,
    tol: f64,
) -> Result<Polyline> {
    if n == 0 {
        return Err(Error::invalid("segment count must be positive"));
    }
    const SUB: usize = 128;
    let nseg = path.num_segments();
    // Per-segment cumulative tables at SUB+1 points, with integrand samples
    // for quadratic inverse interpolation within a chunk.
    let mut tables: Vec<Vec<f64>> = Vec::with_capacity(nseg);
    let mut densities: Vec<Vec<f64>> = Vec::with_capacity(nseg);
    let mut seg_totals = Vec::with_capacity(nseg);
    for w in path.vertices.windows(2) {
        let clearance = domain.min_boundary_distance_on_segment(spec, &w[0], &w[1])?;
        if clearance.min_distance <= 0.0 {
            return Err(Error::invalid(
                "cannot reparameterize a path with an infeasible segment",
            ));
        }
        let len = spec.dist(&w[0], &w[1]);
        let f = |t: f64| len / domain.d(spec, &vecn::lerp(&w[0], &w[1], t));
        let mut cum = Vec::with_capacity(SUB + 1);
        let mut dens = Vec::with_capacity(SUB + 1);
        cum.push(0.0);
        dens.push(f(0.0));
        let mut acc = 0.0;
        for k in 0..SUB {
            let a = k as f64 / SUB as f64;
            let b = (k + 1) as f64 / SUB as f64;
            acc += adaptive_simpson(f, a, b, tol / (nseg * SUB) as f64);
            cum.push(acc);
            dens.push(f(b));
        }
        seg_totals.push(acc);
        tables.push(cum);
        densities.push(dens);
    }
    let total: f64 = seg_totals.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("cannot reparameterize a zero-length path"));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(path.vertices[0].clone());
    let mut seg = 0usize;
    let mut before = 0.0;
    for j in 1..n {
        let target = total * j as f64 / n as f64;
        while before + seg_totals[seg] < target && seg + 1 < nseg {
            before += seg_totals[seg];
            seg += 1;
        }
        let local = (target - before).clamp(0.0, seg_totals[seg]);
        // Quadratic inverse interpolation within the chunk: the cumulative
        // length has known slopes (the integrand) at the chunk ends.
        let cum = &tables[seg];
        let dens = &densities[seg];
        let idx = cum.partition_point(|&c| c < local).clamp(1, SUB);
        let (c0, c1) = (cum[idx - 1], cum[idx]);
        let h = 1.0 / SUB as f64;
        let (f0, f1) = (dens[idx - 1], dens[idx]);
        let a = (f1 - f0) / (2.0 * h);
        let excess = local - c0;
        let u = if a.abs() > 1e-12 * f0.max(f1) {
            let disc = (f0 * f0 + 4.0 * a * excess).max(0.0);
            ((disc.sqrt() - f0) / (2.0 * a)).clamp(0.0, h)
        } else if c1 > c0 {
            h * excess / (c1 - c0)
        } else {
            0.0
        };
        let t = (idx - 1) as f64 * h + u;
        out.push(vecn::lerp(&path.vertices[seg], &path.vertices[seg + 1], t));
    }
    out.push(path.last().to_vec());
    Ok(Polyline::from_vertices_unchecked(out))
}

/// The distance-ratio metric `j(x, y) = log(1 + ‖x−y‖ / (d(x) ∧ d(y)))`.
pub fn j_distance(domain: &Domain, spec: &NormSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    let dx = domain.boundary_distance(spec, x)?;
    let dy = domain.boundary_distance(spec, y)?;
    let sep = spec.dist(x, y);
    if sep == 0.0 {
        return Ok(0.0);
    }
    Ok((sep / dx.min(dy)).ln_1p())
}

/// Vertex-wise convex combination `(1−s) path0 + s path1` of two aligned
/// polylines; `s = 0` gives `path0`, `s = 1` gives `path1`.
pub fn average_path(path0: &Polyline, path1: &Polyline, s: f64) -> Result<Polyline> {
    if path0.vertices.len() != path1.vertices.len() {
        return Err(Error::invalid(format!(
            "vertex-count mismatch: {} vs {}",
            path0.vertices.len(),
            path1.vertices.len()
        )));
    }
    if path0.dim() != path1.dim() {
        return Err(Error::DimensionMismatch { expected: path0.dim(), actual: path1.dim() });
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(format!("s must lie in [0, 1], got {s}")));
    }
    let vertices = path0
        .vertices
        .iter()
        .zip(&path1.vertices)
        .map(|(a, b)| vecn::convex_combination(a, b, s))
        .collect();
    Ok(Polyline::from_vertices_unchecked(vertices))
}


#[cfg(test)]
mod reparameterize_errors {
    use super::*;

    #[test]
    fn zero_length_paths_cannot_be_reparameterized() {
        let spec = NormSpec::euclidean(2);
        let path = Polyline::from_vertices_unchecked(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(arclength_reparameterize(&spec, &path, 4).is_err());
        assert!(arclength_reparameterize(&spec, &Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap(), 0).is_err());
    }
}
