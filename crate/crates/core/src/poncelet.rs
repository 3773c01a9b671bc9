//! Plane realisation of triangles that share a circumcircle `C` and an
//! excircle `E`, plus an SVG rendering of the figure.
//!
//! This is the only module using floating point. Exact sides are scaled so
//! that the longest side is one before conversion, so arbitrarily large
//! primitive triangles are handled.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::BigRational;
use crate::error::{Error, Result};
use crate::triangle::{verify, Triangle};

pub type Vertex = (f64, f64);

/// Circumcircle centred at the origin with radius `big_radius`; excircle
/// centred at `(center_distance, 0)` with radius `small_radius`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PonceletScene {
    pub big_radius: f64,
    pub small_radius: f64,
    pub center_distance: f64,
    pub triangles: Vec<[Vertex; 3]>,
}

/// Largest residuals of the incidence checks, each relative to `R` (or
/// `R^2` for the distance relation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Incidence {
    pub on_circumcircle: f64,
    pub tangent_to_excircle: f64,
    pub euler_relation: f64,
}

impl Incidence {
    pub const VERTEX_TOL: f64 = 1e-9;
    pub const TANGENT_TOL: f64 = 1e-9;
    pub const EULER_TOL: f64 = 1e-12;

    pub fn passes(&self) -> bool {
        self.on_circumcircle <= Self::VERTEX_TOL
            && self.tangent_to_excircle <= Self::TANGENT_TOL
            && self.euler_relation <= Self::EULER_TOL
    }
}

/// One triangle in normalised position: circumcentre at the origin, the
/// excentre on the positive horizontal axis, counterclockwise vertices.
#[derive(Debug, Clone, Copy)]
struct Placed {
    vertices: [Vertex; 3],
    circumradius: f64,
    exradius: f64,
    distance: f64,
}

impl Placed {
    fn scaled(&self, k: f64) -> Placed {
        Placed {
            vertices: self.vertices.map(|(x, y)| (x * k, y * k)),
            circumradius: self.circumradius * k,
            exradius: self.exradius * k,
            distance: self.distance * k,
        }
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Places `t` with its longest side scaled to one. Returns the placement
/// and the scale factor that was divided out.
fn place_unit(t: &Triangle) -> Result<(Placed, BigRational)> {
    verify(t)?;
    let longest = [&t.f, &t.g, &t.h].into_iter().max().expect("three sides").clone();
    let [f, g, h] = [&t.f, &t.g, &t.h].map(|s| to_f64(&(s / &longest)));

    // A = (0, 0), B = (h, 0); |BC| = f, |CA| = g.
    let cx = (g * g - f * f + h * h) / (2.0 * h);
    let cy = (g * g - cx * cx).max(0.0).sqrt();
    let a = (0.0, 0.0);
    let b = (h, 0.0);
    let c = (cx, cy);

    let s = (f + g + h) / 2.0;
    let area = (s * (s - f) * (s - g) * (s - h)).sqrt();
    let circumradius = f * g * h / (4.0 * area);
    let exradius = area / (s - h);

    let ox = h / 2.0;
    let oy = (cx * cx + cy * cy - h * cx) / (2.0 * cy);
    // Excentre opposite C, touching AB from outside: (f A + g B - h C) / (f + g - h).
    let w = f + g - h;
    let ex = (f * a.0 + g * b.0 - h * c.0) / w;
    let ey = (f * a.1 + g * b.1 - h * c.1) / w;

    let (dx, dy) = (ex - ox, ey - oy);
    let distance = dx.hypot(dy);
    let (cos, sin) = (dx / distance, dy / distance);
    let rotate = |(x, y): Vertex| {
        let (x, y) = (x - ox, y - oy);
        (x * cos + y * sin, -x * sin + y * cos)
    };
    let placed = Placed {
        vertices: [rotate(a), rotate(b), rotate(c)],
        circumradius,
        exradius,
        distance,
    };
    Ok((placed, longest))
}

/// A single triangle at its own scale.
pub fn realize(t: &Triangle) -> Result<PonceletScene> {
    let (unit, longest) = place_unit(t)?;
    let p = unit.scaled(to_f64(&longest));
    Ok(PonceletScene {
        big_radius: p.circumradius,
        small_radius: p.exradius,
        center_distance: p.distance,
        triangles: vec![p.vertices],
    })
}

/// Overlay triangles with the same ratio `n`, all rescaled to the
/// circumradius of the first (or to one when that is not representable).
pub fn compose(ts: &[Triangle], n: &BigRational) -> Result<PonceletScene> {
    let radius = match ts.first() {
        Some(t) => {
            let scene = realize(t)?;
            if scene.big_radius.is_finite() && scene.big_radius.is_normal() {
                scene.big_radius
            } else {
                1.0
            }
        }
        None => 1.0,
    };
    compose_with_radius(ts, n, radius)
}

pub fn compose_with_radius(ts: &[Triangle], n: &BigRational, radius: f64) -> Result<PonceletScene> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::OutOfRange(format!("circumradius {radius}")));
    }
    let ratio = to_f64(n);
    let small = radius / ratio;
    let mut triangles = Vec::with_capacity(ts.len());
    for t in ts {
        if verify(t)?.excircle_h != *n {
            return Err(Error::RatioMismatch(n.clone()));
        }
        let (unit, _) = place_unit(t)?;
        triangles.push(unit.scaled(radius / unit.circumradius).vertices);
    }
    Ok(PonceletScene {
        big_radius: radius,
        small_radius: small,
        center_distance: (radius * (radius + 2.0 * small)).sqrt(),
        triangles,
    })
}

fn line_distance(p: Vertex, a: Vertex, b: Vertex) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    ((p.0 - a.0) * dy - (p.1 - a.1) * dx).abs() / dx.hypot(dy)
}

impl PonceletScene {
    pub fn incidence(&self) -> Incidence {
        let r_big = self.big_radius;
        let centre = (self.center_distance, 0.0);
        let mut on_c: f64 = 0.0;
        let mut tangent: f64 = 0.0;
        for tri in &self.triangles {
            for (i, &v) in tri.iter().enumerate() {
                on_c = on_c.max((v.0.hypot(v.1) - r_big).abs() / r_big);
                let w = tri[(i + 1) % 3];
                tangent = tangent.max((line_distance(centre, v, w) - self.small_radius).abs() / r_big);
            }
        }
        let d2 = self.center_distance * self.center_distance;
        let euler = (d2 - r_big * (r_big + 2.0 * self.small_radius)).abs() / (r_big * r_big);
        Incidence {
            on_circumcircle: on_c,
            tangent_to_excircle: tangent,
            euler_relation: euler,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialises")
    }
}

/// Six significant digits, shortest round-trip text, no negative zero.
fn num(x: f64) -> String {
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

const COLOURS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// SVG 1.1 document with both circles and one closed path per triangle.
/// The `y` axis points up in scene coordinates and is flipped on output.
pub fn render_svg(scene: &PonceletScene) -> String {
    let (r_big, r_small, d) = (scene.big_radius, scene.small_radius, scene.center_distance);
    let min_x = (-r_big).min(d - r_small);
    let max_x = r_big.max(d + r_small);
    let half_h = r_big.max(r_small);
    let (w, h) = (max_x - min_x, 2.0 * half_h);
    let (mx, my) = (0.05 * w, 0.05 * h);
    let stroke = num(r_big / 150.0);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">",
        num(min_x - mx),
        num(-half_h - my),
        num(w + 2.0 * mx),
        num(h + 2.0 * my),
        num(800.0 * (h + 2.0 * my) / (w + 2.0 * mx)),
    );
    let _ = writeln!(
        out,
        "  <circle cx=\"0\" cy=\"0\" r=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{stroke}\"/>",
        num(r_big)
    );
    let _ = writeln!(
        out,
        "  <circle cx=\"{}\" cy=\"0\" r=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{stroke}\"/>",
        num(d),
        num(r_small)
    );
    for (i, tri) in scene.triangles.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let [a, b, c] = tri.map(|(x, y)| format!("{} {}", num(x), num(-y)));
        let _ = writeln!(
            out,
            "  <path d=\"M {a} L {b} L {c} Z\" fill=\"{colour}\" fill-opacity=\"0.1\" stroke=\"{colour}\" stroke-width=\"{stroke}\"/>"
        );
    }
    out.push_str("</svg>\n");
    out
}
