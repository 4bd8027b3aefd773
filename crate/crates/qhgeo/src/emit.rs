//! CSV and SVG emitters.
//!
//! CSV output is RFC-4180 compatible: CRLF row terminators, a header row,
//! quoting only where needed. Floats are written with Rust's shortest
//! round-trip decimal formatting, so repeated runs of a deterministic
//! experiment produce byte-identical files.

use crate::ball::{BallTrace, CheckReport, RayOutcome};
use crate::domain::Domain;
use crate::paths::Polyline;

/// Shortest decimal that round-trips to the same f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Assemble a CSV document: header plus rows, CRLF-terminated.
pub fn format_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.iter().map(|h| csv_escape(h)).collect::<Vec<_>>().join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","));
        out.push_str("\r\n");
    }
    out
}

/// One vertex per row under a `x0,x1,...` header.
pub fn polyline_csv(path: &Polyline) -> String {
    let dim = path.dim();
    let header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Vec<String>> =
        path.vertices().iter().map(|v| v.iter().map(|c| fmt_f64(*c)).collect()).collect();
    format_csv(&header_refs, &rows)
}

/// Ball trace rows `angle,t_star,x0,x1`; clipped rays store the exit
/// parameter and exit point.
pub fn trace_csv(trace: &BallTrace) -> String {
    let rows: Vec<Vec<String>> = trace
        .rays
        .iter()
        .map(|ray| {
            let angle = ray.direction[1].atan2(ray.direction[0]);
            let (t, point) = match &ray.outcome {
                RayOutcome::Crossing { t_star, point } => (*t_star, point.clone()),
                RayOutcome::Clipped { t_exit } => (
                    *t_exit,
                    trace
                        .center
                        .iter()
                        .zip(&ray.direction)
                        .map(|(c, u)| c + t_exit * u)
                        .collect(),
                ),
            };
            vec![fmt_f64(angle), fmt_f64(t), fmt_f64(point[0]), fmt_f64(point[1])]
        })
        .collect();
    format_csv(&["angle", "t_star", "x0", "x1"], &rows)
}

/// Violation rows of a check report (header-only when the suite passed).
pub fn violations_csv(report: &CheckReport) -> String {
    let rows: Vec<Vec<String>> = report
        .violations
        .iter()
        .map(|v| {
            vec![
                fmt_f64(v.s),
                fmt_f64(v.distance),
                fmt_f64(v.excess),
                fmt_f64(v.point[0]),
                fmt_f64(v.point[1]),
            ]
        })
        .collect();
    format_csv(&["s", "distance", "excess", "x0", "x1"], &rows)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// An SVG 1.1 scene in mathematical coordinates (y up); elements carry ids
/// so emitted figures can be checked structurally.
pub struct SvgScene {
    min_x: f64,
    min_y: f64,
    width: f64,
    height: f64,
    elements: Vec<String>,
}

impl SvgScene {
    /// Viewport in math coordinates: lower-left corner plus extents.
    pub fn new(min_x: f64, min_y: f64, width: f64, height: f64) -> Self {
        SvgScene { min_x, min_y, width, height, elements: Vec::new() }
    }

    fn stroke(idx: usize) -> &'static str {
        PALETTE[idx % PALETTE.len()]
    }

    fn path_data(pts: &[Vec<f64>]) -> String {
        pts.iter()
            .map(|p| format!("{},{}", fmt_f64(p[0]), fmt_f64(-p[1])))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn add_polyline(&mut self, id: &str, pts: &[Vec<f64>], color: usize) {
        self.elements.push(format!(
            "<polyline id=\"{id}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.01\"/>",
            Self::path_data(pts),
            Self::stroke(color)
        ));
    }

    pub fn add_polygon(&mut self, id: &str, pts: &[Vec<f64>], color: usize) {
        self.elements.push(format!(
            "<polygon id=\"{id}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.01\"/>",
            Self::path_data(pts),
            Self::stroke(color)
        ));
    }

    /// A labeled point: a small disc with an id and a text label.
    pub fn add_point(&mut self, id: &str, p: &[f64]) {
        self.elements.push(format!(
            "<circle id=\"{id}\" cx=\"{}\" cy=\"{}\" r=\"0.03\" fill=\"#000000\"/>",
            fmt_f64(p[0]),
            fmt_f64(-p[1])
        ));
        self.elements.push(format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"0.12\">{id}</text>",
            fmt_f64(p[0] + 0.05),
            fmt_f64(-(p[1] + 0.05))
        ));
    }

    /// Render the domain boundary: the zero line of a half-space, puncture
    /// markers, polytope face lines, or the polygon outline.
    pub fn add_domain(&mut self, domain: &Domain) {
        match domain {
            Domain::HalfSpace { normal, offset } => {
                self.add_face_line("boundary", normal, *offset, 0);
            }
            Domain::PuncturedSpace { punctures } => {
                for (i, z) in punctures.iter().enumerate() {
                    self.elements.push(format!(
                        "<circle id=\"puncture{i}\" cx=\"{}\" cy=\"{}\" r=\"0.025\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.01\"/>",
                        fmt_f64(z[0]),
                        fmt_f64(-z[1])
                    ));
                }
            }
            Domain::ConvexPolytope { halfspaces, .. } => {
                for (i, (a, b)) in halfspaces.iter().enumerate() {
                    self.add_face_line(&format!("face{i}"), a, *b, 0);
                }
            }
            Domain::Polygon { vertices } => {
                self.add_polygon("boundary", vertices, 0);
            }
        }
    }

    /// Clip the hyperplane `a·x + b = 0` to the viewport (2-D only).
    fn add_face_line(&mut self, id: &str, a: &[f64], b: f64, color: usize) {
        if a.len() != 2 {
            return;
        }
        // Point on the line plus its tangent, extended across the viewport.
        let nn = a[0] * a[0] + a[1] * a[1];
        let foot = [-b * a[0] / nn, -b * a[1] / nn];
        let tangent = [a[1], -a[0]];
        let reach = 2.0 * (self.width + self.height);
        let p0 = [foot[0] - reach * tangent[0], foot[1] - reach * tangent[1]];
        let p1 = [foot[0] + reach * tangent[0], foot[1] + reach * tangent[1]];
        self.elements.push(format!(
            "<line id=\"{id}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"0.01\"/>",
            fmt_f64(p0[0]),
            fmt_f64(-p0[1]),
            fmt_f64(p1[0]),
            fmt_f64(-p1[1]),
            Self::stroke(color)
        ));
    }

    pub fn to_svg(&self) -> String {
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">\n",
            fmt_f64(self.min_x),
            fmt_f64(-(self.min_y + self.height)),
            fmt_f64(self.width),
            fmt_f64(self.height)
        ));
        for el in &self.elements {
            out.push_str(el);
            out.push('\n');
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normed_space::NormSpec;
    use crate::paths::MetricKind;
    use crate::solver::SolverParams;

    #[test]
    fn polyline_csv_has_one_row_per_vertex() {
        let p = Polyline::new(vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]]).unwrap();
        let csv = polyline_csv(&p);
        let lines: Vec<&str> = csv.split("\r\n").filter(|l| !l.is_empty()).collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "x0,x1");
        assert_eq!(lines[1], "0,1");
    }

    #[test]
    fn trace_csv_has_header_plus_one_row_per_ray() {
        let dom = Domain::punctured_plane_at_origin();
        let spec = NormSpec::euclidean(2);
        let trace = crate::ball::trace_ball(
            &dom,
            &spec,
            MetricKind::DistanceRatio,
            &[1.0, 0.0],
            0.2,
            4,
            1e-10,
            &SolverParams::default(),
        )
        .unwrap();
        let csv = trace_csv(&trace);
        let lines: Vec<&str> = csv.split("\r\n").filter(|l| !l.is_empty()).collect();
        assert_eq!(lines.len(), 5, "header + 4 rays");
        assert_eq!(lines[0], "angle,t_star,x0,x1");
    }

    #[test]
    fn csv_quoting_and_empty_table() {
        let csv = format_csv(&["name", "value"], &[vec!["a,b".into(), "1".into()]]);
        assert!(csv.contains("\"a,b\""));
        let empty = format_csv(&["a", "b"], &[]);
        assert_eq!(empty, "a,b\r\n");
    }

    #[test]
    fn empty_scene_is_a_valid_document() {
        let svg = SvgScene::new(-1.0, -1.0, 2.0, 2.0).to_svg();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("viewBox=\"-1 -1 2 2\""));
    }

    #[test]
    fn ball_trace_scene_emits_one_polygon() {
        let mut scene = SvgScene::new(0.0, -1.0, 3.0, 2.0);
        let pts = vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.5, 0.5]];
        scene.add_polygon("ball", &pts, 1);
        let svg = scene.to_svg();
        assert_eq!(svg.matches("<polygon").count(), 1);
    }
}
