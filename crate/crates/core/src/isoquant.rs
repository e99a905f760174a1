//! Unit-output input isoquants for two-input, one-output panels.
//!
//! Every estimator here has CRS, so its unit-output input requirement set is
//! determined by the normalized observations `p_n = x_n / y_n`:
//!
//! - CCR: convex hull of the `p_n` plus free disposal; the boundary is the
//!   lower-left convex chain between the point with least `x1` and the point
//!   with least `x2`.
//! - FP (inputs non-substitutable): `{x : x >= (min p_1, min p_2)}`, an L.
//! - BG (inputs tied): `{x : x1 + x2 >= min(p_1 + p_2)}`, a line of slope -1.
//! - TRUE (Leontief `min(x1, x2)`): the L with corner `(1, 1)`.

use std::fmt::{self, Write as _};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dea_models::DmuPanel;
use crate::fp_dea::FpStructure;

#[derive(Debug, Error)]
pub enum IsoquantError {
    #[error("isoquants need 2 inputs and 1 output, panel has {n_inputs} and {n_outputs}")]
    WrongDimensions { n_inputs: usize, n_outputs: usize },
    #[error("no DMU has a positive output")]
    NoProducingDmu,
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorTag {
    #[serde(rename = "TRUE")]
    True,
    #[serde(rename = "CCR")]
    Ccr,
    #[serde(rename = "FP")]
    Fp,
    #[serde(rename = "BG")]
    Bg,
}

impl EstimatorTag {
    pub const ALL: [EstimatorTag; 4] = [
        EstimatorTag::True,
        EstimatorTag::Ccr,
        EstimatorTag::Fp,
        EstimatorTag::Bg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorTag::True => "TRUE",
            EstimatorTag::Ccr => "CCR",
            EstimatorTag::Fp => "FP",
            EstimatorTag::Bg => "BG",
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            EstimatorTag::True => "black",
            EstimatorTag::Ccr => "blue",
            EstimatorTag::Fp => "red",
            EstimatorTag::Bg => "green",
        }
    }
}

impl fmt::Display for EstimatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Point = (f64, f64);

/// Unbounded boundary piece starting at `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point,
    pub direction: Point,
}

/// Boundary of a unit-output input requirement set: a vertical ray up from
/// the first vertex, the vertex chain, and a horizontal ray right from the
/// last vertex. Vertices have strictly increasing `x1` and strictly
/// decreasing `x2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoquantPolyline {
    pub estimator: EstimatorTag,
    pub vertices: Vec<Point>,
    pub rays: [Ray; 2],
}

impl IsoquantPolyline {
    fn from_vertices(estimator: EstimatorTag, vertices: Vec<Point>) -> Self {
        let first = vertices[0];
        let last = *vertices.last().expect("at least one vertex");
        Self {
            estimator,
            vertices,
            rays: [
                Ray {
                    origin: first,
                    direction: (0.0, 1.0),
                },
                Ray {
                    origin: last,
                    direction: (1.0, 0.0),
                },
            ],
        }
    }

    /// Lowest `x2` on the boundary at abscissa `x1`; `None` left of the
    /// vertical ray.
    pub fn boundary_at(&self, x1: f64) -> Option<f64> {
        let first = self.vertices[0];
        if x1 < first.0 {
            return None;
        }
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            if x1 <= b.0 {
                let t = (x1 - a.0) / (b.0 - a.0);
                return Some(a.1 + t * (b.1 - a.1));
            }
        }
        Some(self.vertices.last().expect("nonempty").1)
    }

    /// Whether `p` lies in the requirement set, allowing `slack` in each
    /// coordinate.
    pub fn contains(&self, p: Point, slack: f64) -> bool {
        let first = self.vertices[0];
        if p.0 < first.0 - slack {
            return false;
        }
        let x2 = self
            .boundary_at(p.0.max(first.0))
            .expect("clamped into range");
        p.1 >= x2 - slack
    }
}

fn check_dimensions(panel: &DmuPanel) -> Result<(), IsoquantError> {
    if panel.n_inputs() != 2 || panel.n_outputs() != 1 {
        return Err(IsoquantError::WrongDimensions {
            n_inputs: panel.n_inputs(),
            n_outputs: panel.n_outputs(),
        });
    }
    Ok(())
}

/// Inputs per unit of output for every DMU with a positive output.
pub fn normalized_points(panel: &DmuPanel) -> Result<Vec<Point>, IsoquantError> {
    check_dimensions(panel)?;
    let points: Vec<Point> = (0..panel.n_dmus())
        .filter_map(|n| {
            let y = panel.output(n)[0];
            let x = panel.input(n);
            (y > 0.0).then(|| (x[0] / y, x[1] / y))
        })
        .collect();
    if points.is_empty() {
        return Err(IsoquantError::NoProducingDmu);
    }
    Ok(points)
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Lower-left convex chain of `points` (monotone-chain lower hull, cut where
/// `x2` stops decreasing).
fn lower_left_chain(points: &[Point]) -> Vec<Point> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    sorted.dedup();
    let mut hull: Vec<Point> = Vec::new();
    for p in sorted {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let mut chain = vec![hull[0]];
    for &p in &hull[1..] {
        if p.1 < chain.last().expect("nonempty").1 {
            chain.push(p);
        } else {
            break;
        }
    }
    chain
}

fn corner(points: &[Point]) -> Point {
    points.iter().fold((f64::INFINITY, f64::INFINITY), |c, p| {
        (c.0.min(p.0), c.1.min(p.1))
    })
}

/// Builds the unit-output isoquant of `estimator` for a 2-input, 1-output
/// panel. `fp` applies to FP and BG and defaults to the two inputs being
/// non-substitutable; a structure without the input pair makes both
/// estimators coincide with CCR.
pub fn build_isoquant(
    panel: &DmuPanel,
    estimator: EstimatorTag,
    fp: Option<&FpStructure>,
) -> Result<IsoquantPolyline, IsoquantError> {
    check_dimensions(panel)?;
    if estimator == EstimatorTag::True {
        return Ok(IsoquantPolyline::from_vertices(estimator, vec![(1.0, 1.0)]));
    }
    let points = normalized_points(panel)?;
    let restricted = fp.is_none_or(|fp| fp.input_disjunctions().contains(&(0, 1)));
    let vertices = match estimator {
        EstimatorTag::Fp if restricted => vec![corner(&points)],
        EstimatorTag::Bg if restricted => {
            let level = points
                .iter()
                .map(|p| p.0 + p.1)
                .fold(f64::INFINITY, f64::min);
            vec![(0.0, level), (level, 0.0)]
        }
        _ => lower_left_chain(&points),
    };
    Ok(IsoquantPolyline::from_vertices(estimator, vertices))
}

/// All four isoquants in [`EstimatorTag::ALL`] order.
pub fn build_all(
    panel: &DmuPanel,
    fp: Option<&FpStructure>,
) -> Result<Vec<IsoquantPolyline>, IsoquantError> {
    EstimatorTag::ALL
        .iter()
        .map(|&tag| build_isoquant(panel, tag, fp))
        .collect()
}

/// CSV with columns `estimator,x1,x2,point_order`.
pub fn write_vertices_csv<W: io::Write>(
    polylines: &[IsoquantPolyline],
    writer: W,
) -> Result<(), IsoquantError> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["estimator", "x1", "x2", "point_order"])?;
    for line in polylines {
        for (k, v) in line.vertices.iter().enumerate() {
            out.write_record([
                line.estimator.name().to_string(),
                v.0.to_string(),
                v.1.to_string(),
                k.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 60.0;
const TICKS: usize = 5;

/// Plot extent `[0, 1.1 * max coordinate]` over normalized data and
/// polyline vertices.
fn axis_extent(points: &[Point], polylines: &[IsoquantPolyline]) -> f64 {
    let max = points
        .iter()
        .chain(polylines.iter().flat_map(|l| l.vertices.iter()))
        .fold(0.0_f64, |m, p| m.max(p.0).max(p.1));
    if max > 0.0 {
        1.1 * max
    } else {
        1.0
    }
}

/// Renders the isoquants over a scatter of the normalized DMUs as SVG 1.1.
/// Output depends only on the arguments.
pub fn svg_document(
    polylines: &[IsoquantPolyline],
    panel: &DmuPanel,
) -> Result<String, IsoquantError> {
    let points = normalized_points(panel)?;
    let extent = axis_extent(&points, polylines);
    let plot = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + x.clamp(0.0, extent) / extent * plot;
    let sy = |y: f64| SIZE - MARGIN - y.clamp(0.0, extent) / extent * plot;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#
    );

    let _ = writeln!(
        svg,
        r#"<g id="axes" stroke="black" stroke-width="1" font-family="sans-serif" font-size="12">"#
    );
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{:.3}" y2="{y0:.3}"/>"#,
        sx(extent)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{:.3}"/>"#,
        sy(extent)
    );
    for k in 0..=TICKS {
        let v = extent * k as f64 / TICKS as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.3}" y1="{y0:.3}" x2="{:.3}" y2="{:.3}"/><text x="{:.3}" y="{:.3}" stroke="none" text-anchor="middle">{v:.2}</text>"#,
            sx(v),
            sx(v),
            y0 + 5.0,
            sx(v),
            y0 + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{x0:.3}" y2="{:.3}"/><text x="{:.3}" y="{:.3}" stroke="none" text-anchor="end">{v:.2}</text>"#,
            x0 - 5.0,
            sy(v),
            sy(v),
            x0 - 8.0,
            sy(v) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.3}" y="{:.3}" stroke="none" text-anchor="middle">x1 / y</text>"#,
        SIZE / 2.0,
        SIZE - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.3}" stroke="none" text-anchor="middle" transform="rotate(-90 15 {:.3})">x2 / y</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g id="dmus" fill="gray" fill-opacity="0.7">"#);
    for p in &points {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3"/>"#,
            sx(p.0),
            sy(p.1)
        );
    }
    let _ = writeln!(svg, "</g>");

    for line in polylines {
        let first = line.vertices[0];
        let last = *line.vertices.last().expect("nonempty");
        let mut path = vec![(first.0, extent)];
        path.extend(line.vertices.iter().copied());
        path.push((extent, last.1));
        let coords: Vec<String> = path
            .iter()
            .map(|p| format!("{:.3},{:.3}", sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline id="isoquant-{}" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            line.estimator,
            coords.join(" "),
            line.estimator.color()
        );
    }

    if !polylines.is_empty() {
        let _ = writeln!(
            svg,
            r#"<g id="legend" font-family="sans-serif" font-size="12">"#
        );
        for (k, line) in polylines.iter().enumerate() {
            let y = MARGIN + 10.0 + 18.0 * k as f64;
            let x = SIZE - MARGIN - 90.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="{}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{}</text>"#,
                x + 24.0,
                line.estimator.color(),
                x + 30.0,
                y + 4.0,
                line.estimator
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

/// Writes [`svg_document`] to `path`.
pub fn render_svg(
    polylines: &[IsoquantPolyline],
    panel: &DmuPanel,
    path: &Path,
) -> Result<(), IsoquantError> {
    fs::write(path, svg_document(polylines, panel)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_input(rows: &[(f64, f64, f64)]) -> DmuPanel {
        DmuPanel::from_rows(
            rows.iter().map(|r| vec![r.0, r.1]).collect(),
            rows.iter().map(|r| vec![r.2]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_dmu_corner() {
        let p = two_input(&[(2.0, 2.0, 1.0)]);
        let fp = build_isoquant(&p, EstimatorTag::Fp, None).unwrap();
        assert_eq!(fp.vertices, vec![(2.0, 2.0)]);
        assert_eq!(
            fp.rays[0],
            Ray {
                origin: (2.0, 2.0),
                direction: (0.0, 1.0)
            }
        );
        assert_eq!(
            fp.rays[1],
            Ray {
                origin: (2.0, 2.0),
                direction: (1.0, 0.0)
            }
        );
    }

    #[test]
    fn two_point_hull() {
        let p = two_input(&[(1.0, 3.0, 1.0), (3.0, 1.0, 1.0)]);
        let ccr = build_isoquant(&p, EstimatorTag::Ccr, None).unwrap();
        assert_eq!(ccr.vertices, vec![(1.0, 3.0), (3.0, 1.0)]);
        let fp = build_isoquant(&p, EstimatorTag::Fp, None).unwrap();
        assert_eq!(fp.vertices, vec![(1.0, 1.0)]);
        let bg = build_isoquant(&p, EstimatorTag::Bg, None).unwrap();
        assert_eq!(bg.vertices, vec![(0.0, 4.0), (4.0, 0.0)]);
        assert_eq!(ccr.boundary_at(2.0), Some(2.0));
        assert_eq!(ccr.boundary_at(0.5), None);
        assert_eq!(ccr.boundary_at(10.0), Some(1.0));
    }

    #[test]
    fn chain_drops_interior_and_collinear_points() {
        let p = two_input(&[
            (1.0, 4.0, 1.0),
            (2.0, 2.0, 1.0),
            (4.0, 1.0, 1.0),
            (3.0, 3.0, 1.0),
            (1.5, 3.0, 1.0), // collinear with (1,4)-(2,2)
            (6.0, 0.5, 2.0), // normalizes to (3, 0.25)
            (5.0, 5.0, 1.0),
        ]);
        let ccr = build_isoquant(&p, EstimatorTag::Ccr, None).unwrap();
        assert_eq!(ccr.vertices, vec![(1.0, 4.0), (2.0, 2.0), (3.0, 0.25)]);
        for w in ccr.vertices.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
        }
    }

    #[test]
    fn fp_without_pair_matches_ccr() {
        let p = two_input(&[(1.0, 3.0, 1.0), (3.0, 1.0, 1.0)]);
        let fp = FpStructure::default();
        let iso = build_isoquant(&p, EstimatorTag::Fp, Some(&fp)).unwrap();
        assert_eq!(
            iso.vertices,
            build_isoquant(&p, EstimatorTag::Ccr, None)
                .unwrap()
                .vertices
        );
    }

    #[test]
    fn true_isoquant_and_dimension_errors() {
        let p = two_input(&[(1.0, 3.0, 1.0)]);
        assert_eq!(
            build_isoquant(&p, EstimatorTag::True, None)
                .unwrap()
                .vertices,
            vec![(1.0, 1.0)]
        );
        let three = DmuPanel::from_rows(vec![vec![1.0, 1.0, 1.0]], vec![vec![1.0]]).unwrap();
        assert!(matches!(
            build_isoquant(&three, EstimatorTag::Ccr, None),
            Err(IsoquantError::WrongDimensions {
                n_inputs: 3,
                n_outputs: 1
            })
        ));
        let idle = two_input(&[(1.0, 1.0, 0.0)]);
        assert!(matches!(
            build_isoquant(&idle, EstimatorTag::Ccr, None),
            Err(IsoquantError::NoProducingDmu)
        ));
    }

    #[test]
    fn containment_with_slack() {
        let p = two_input(&[(1.0, 3.0, 1.0), (3.0, 1.0, 1.0)]);
        let ccr = build_isoquant(&p, EstimatorTag::Ccr, None).unwrap();
        assert!(ccr.contains((2.0, 2.0), 0.0));
        assert!(!ccr.contains((2.0, 1.9), 0.0));
        assert!(ccr.contains((2.0, 1.9), 0.2));
        assert!(!ccr.contains((0.9, 10.0), 0.0));
        assert_abs_diff_eq!(ccr.boundary_at(1.0).unwrap(), 3.0);
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let p = two_input(&[(1.0, 3.0, 1.0), (3.0, 1.0, 1.0), (4.0, 4.0, 2.0)]);
        let lines = build_all(&p, None).unwrap();
        let a = svg_document(&lines, &p).unwrap();
        let b = svg_document(&lines, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(r#"stroke="green""#));
        assert!(a.contains(r#"id="isoquant-FP""#));
        assert_eq!(a.matches("<circle").count(), 3);
        assert!(a.trim_end().ends_with("</svg>"));

        let empty = svg_document(&[], &p).unwrap();
        assert!(!empty.contains("<polyline"));
        assert!(!empty.contains(r#"id="legend""#));
        assert_eq!(empty.matches("<circle").count(), 3);
    }

    #[test]
    fn vertices_csv() {
        let p = two_input(&[(1.0, 3.0, 1.0), (3.0, 1.0, 1.0)]);
        let lines = build_all(&p, None).unwrap();
        let mut buf = Vec::new();
        write_vertices_csv(&lines, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "estimator,x1,x2,point_order\nTRUE,1,1,0\nCCR,1,3,0\nCCR,3,1,1\nFP,1,1,0\nBG,0,4,0\nBG,4,0,1\n"
        );
    }
}
