//! SVG maps of sunburst glyphs.
//!
//! Each glyph is a disk split into three 120° sectors (maximum, minimum,
//! saddle). Within a sector the light fill reaches the upper interval bound,
//! the dark fill the lower bound, and a black arc marks the point estimate.
//! Radii scale with the square root of the probability so sector areas are
//! proportional to it.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::critical::CriticalType;
use crate::error::{Error, Result};
use crate::grid::GridTopology;
use crate::stats::ProbabilitySummary;

/// Sector layout, angles in degrees counterclockwise from +x.
pub const SECTORS: [(CriticalType, f64, f64); 3] = [
    (CriticalType::Maximum, 90.0, 210.0),
    (CriticalType::Minimum, 210.0, 330.0),
    (CriticalType::Saddle, 330.0, 450.0),
];

const LEGEND_SIZES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadePair {
    pub light: String,
    pub dark: String,
}

impl ShadePair {
    fn new(light: &str, dark: &str) -> Self {
        ShadePair {
            light: light.to_owned(),
            dark: dark.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlyphStyle {
    /// Radius at probability 1, in pixels.
    pub r_max: f64,
    /// Grid spacing in pixels.
    pub cell: f64,
    pub margin: f64,
    /// Stroke width of the point-estimate arc.
    pub arc_stroke: f64,
    pub maximum: ShadePair,
    pub minimum: ShadePair,
    pub saddle: ShadePair,
}

impl Default for GlyphStyle {
    fn default() -> Self {
        GlyphStyle {
            r_max: 18.0,
            cell: 40.0,
            margin: 30.0,
            arc_stroke: 1.5,
            maximum: ShadePair::new("#F4B6B6", "#C0392B"),
            minimum: ShadePair::new("#B6CDF4", "#2B5AC0"),
            saddle: ShadePair::new("#BCE4BC", "#2E8B40"),
        }
    }
}

fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].chars().all(|c| c.is_ascii_hexdigit())
}

impl GlyphStyle {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_max", self.r_max),
            ("cell", self.cell),
            ("margin", self.margin),
            ("arc_stroke", self.arc_stroke),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::input(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if self.r_max <= 0.0 || self.cell <= 0.0 {
            return Err(Error::input("r_max and cell must be positive"));
        }
        if self.r_max > self.cell / 2.0 {
            return Err(Error::input(format!(
                "r_max {} exceeds half the cell size {}; glyphs would overlap",
                self.r_max, self.cell
            )));
        }
        for pair in [&self.maximum, &self.minimum, &self.saddle] {
            for c in [&pair.light, &pair.dark] {
                if !is_hex_color(c) {
                    return Err(Error::input(format!("`{c}` is not a #RRGGBB color")));
                }
            }
        }
        Ok(())
    }

    pub fn shades(&self, t: CriticalType) -> &ShadePair {
        match t {
            CriticalType::Maximum => &self.maximum,
            CriticalType::Minimum => &self.minimum,
            CriticalType::Saddle | CriticalType::Regular => &self.saddle,
        }
    }
}

pub fn glyph_radius(p: f64, r_max: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(r_max * p.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGeometry {
    pub kind: CriticalType,
    pub start_deg: f64,
    pub end_deg: f64,
    pub radius_hat: f64,
    pub radius_lower: f64,
    pub radius_upper: f64,
}

impl SectorGeometry {
    pub fn area(&self, radius: f64) -> f64 {
        0.5 * radius * radius * (self.end_deg - self.start_deg).to_radians()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlyphGeometry {
    pub sectors: [SectorGeometry; 3],
}

pub fn glyph_geometry(summary: &ProbabilitySummary, r_max: f64) -> Result<GlyphGeometry> {
    let sector = |(kind, start_deg, end_deg): (CriticalType, f64, f64)| -> Result<SectorGeometry> {
        let e = summary.get(kind).expect("sector types are critical");
        let g = SectorGeometry {
            kind,
            start_deg,
            end_deg,
            radius_hat: glyph_radius(e.p_hat, r_max)?,
            radius_lower: glyph_radius(e.p_lower, r_max)?,
            radius_upper: glyph_radius(e.p_upper, r_max)?,
        };
        if g.radius_lower > g.radius_upper {
            return Err(Error::input(format!(
                "{} interval has lower bound above upper bound",
                kind.as_str()
            )));
        }
        Ok(g)
    };
    Ok(GlyphGeometry {
        sectors: [sector(SECTORS[0])?, sector(SECTORS[1])?, sector(SECTORS[2])?],
    })
}

/// Fixed-point coordinate with negative zero folded to zero.
fn coord(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_owned()
    } else {
        s
    }
}

/// Point on the circle of radius `r` at `deg`, in y-down screen coordinates.
fn polar(center: (f64, f64), r: f64, deg: f64) -> (f64, f64) {
    let rad = deg * PI / 180.0;
    (center.0 + r * rad.cos(), center.1 - r * rad.sin())
}

/// Counterclockwise arc from `start` to `end`: sweep flag 0 in y-down space.
fn arc_path(center: (f64, f64), r: f64, start: f64, end: f64, closed_sector: bool) -> String {
    let (x1, y1) = polar(center, r, start);
    let (x2, y2) = polar(center, r, end);
    let large = u8::from(end - start > 180.0);
    if closed_sector {
        format!(
            "M {} {} L {} {} A {r} {r} 0 {large} 0 {} {} Z",
            coord(center.0),
            coord(center.1),
            coord(x1),
            coord(y1),
            coord(x2),
            coord(y2)
        )
    } else {
        format!(
            "M {} {} A {r} {r} 0 {large} 0 {} {}",
            coord(x1),
            coord(y1),
            coord(x2),
            coord(y2)
        )
    }
}

/// Paths for one glyph. Per sector: light fill, dark fill, then the black
/// arc; zero-probability layers emit nothing.
pub fn render_glyph(summary: &ProbabilitySummary, style: &GlyphStyle, center: (f64, f64)) -> Result<String> {
    let geometry = glyph_geometry(summary, style.r_max)?;
    let mut out = String::new();
    for s in &geometry.sectors {
        let name = s.kind.as_str();
        let shades = style.shades(s.kind);
        if s.radius_upper > 0.0 {
            let d = arc_path(center, s.radius_upper, s.start_deg, s.end_deg, true);
            let _ = writeln!(
                out,
                r#"<path data-type="{name}" data-role="upper" fill="{}" d="{d}"/>"#,
                shades.light
            );
        }
        if s.radius_lower > 0.0 {
            let d = arc_path(center, s.radius_lower, s.start_deg, s.end_deg, true);
            let _ = writeln!(
                out,
                r#"<path data-type="{name}" data-role="lower" fill="{}" d="{d}"/>"#,
                shades.dark
            );
        }
        if s.radius_hat > 0.0 {
            let d = arc_path(center, s.radius_hat, s.start_deg, s.end_deg, false);
            let _ = writeln!(
                out,
                r##"<path data-type="{name}" data-role="estimate" fill="none" stroke="#000000" stroke-width="{}" d="{d}"/>"##,
                style.arc_stroke
            );
        }
    }
    Ok(out)
}

/// Pixel center of vertex (i, j); y grows upward in grid space.
pub fn glyph_center(topology: &GridTopology, style: &GlyphStyle, i: usize, j: usize) -> (f64, f64) {
    (
        style.margin + i as f64 * style.cell,
        style.margin + (topology.ny() - 1 - j) as f64 * style.cell,
    )
}

fn legend_height(style: &GlyphStyle) -> f64 {
    2.0 * style.r_max + 36.0
}

fn render_legend(out: &mut String, style: &GlyphStyle, top: f64) {
    let cy = top + style.r_max + 4.0;
    let _ = writeln!(out, r#"<g id="legend" font-family="sans-serif" font-size="10">"#);
    // Type key: full light sectors with labels at mid-angles.
    let key = (style.margin + style.r_max, cy);
    for (kind, start, end) in SECTORS {
        let shades = style.shades(kind);
        let d = arc_path(key, style.r_max, start, end, true);
        let _ = writeln!(out, r#"<path fill="{}" d="{d}"/>"#, shades.light);
        let (tx, ty) = polar(key, style.r_max + 6.0, 0.5 * (start + end));
        let anchor = if tx < key.0 - 1.0 {
            "end"
        } else if tx > key.0 + 1.0 {
            "start"
        } else {
            "middle"
        };
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            coord(tx),
            coord(ty + 3.0),
            kind.as_str()
        );
    }
    // Size key: glyph radius for a few probabilities.
    let mut x = key.0 + 2.0 * style.r_max + 40.0;
    for p in LEGEND_SIZES {
        let r = style.r_max * p.sqrt();
        let _ = writeln!(
            out,
            r##"<circle cx="{}" cy="{}" r="{r}" fill="none" stroke="#555555" stroke-width="1"/>"##,
            coord(x),
            coord(cy)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}%</text>"#,
            coord(x),
            coord(cy + style.r_max + 14.0),
            (p * 100.0).round()
        );
        x += 2.0 * style.r_max + 16.0;
    }
    out.push_str("</g>\n");
}

/// Full SVG document: one `<g data-vertex="i,j">` per vertex in linear order,
/// followed by the legend.
pub fn render_map(summaries: &[ProbabilitySummary], topology: &GridTopology, style: &GlyphStyle) -> Result<String> {
    style.validate()?;
    if summaries.len() != topology.vertex_count() {
        return Err(Error::input(format!(
            "{} summaries for a grid of {} vertices",
            summaries.len(),
            topology.vertex_count()
        )));
    }
    let map_width = 2.0 * style.margin + (topology.nx() - 1) as f64 * style.cell;
    let legend_width =
        2.0 * style.margin + 2.0 * style.r_max + 40.0 + LEGEND_SIZES.len() as f64 * (2.0 * style.r_max + 16.0);
    let width = map_width.max(legend_width);
    let map_height = 2.0 * style.margin + (topology.ny() - 1) as f64 * style.cell;
    let height = map_height + legend_height(style);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = coord(width),
        h = coord(height)
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{}" height="{}" fill="#FFFFFF"/>"##,
        coord(width),
        coord(height)
    );
    for (k, summary) in summaries.iter().enumerate() {
        let v = topology.vertex(k);
        let center = glyph_center(topology, style, v.i, v.j);
        let _ = writeln!(out, r#"<g data-vertex="{},{}">"#, v.i, v.j);
        out.push_str(&render_glyph(summary, style, center)?);
        out.push_str("</g>\n");
    }
    render_legend(&mut out, style, map_height);
    out.push_str("</svg>\n");
    Ok(out)
}
