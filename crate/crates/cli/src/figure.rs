//! Deterministic SVG figures.
//!
//! Every coordinate is printed with at most 12 significant digits and
//! elements are emitted in a fixed order, so equal inputs give identical
//! bytes.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use clap::ValueEnum;
use mirror_core::fan;
use mirror_core::tropical::{self, AffineLift, LiftBase, SurgeredSection};
use mirror_core::LatticeVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    /// The curves `γ_k` in the annulus `e^{-1} <= |z| <= e`.
    AnnulusCurves,
    /// Lifts of the Euler multisection and the zero section to `Δ × R`.
    CoverLifts,
    /// The surgered lift with its handles, next to the equivalent section.
    CoverSurgery,
    /// `Δ°` and `Δ` with the weight sets at the vertices of `Δ`.
    PolytopeWeights,
}

impl FigureKind {
    pub fn name(self) -> &'static str {
        match self {
            FigureKind::AnnulusCurves => "annulus-curves",
            FigureKind::CoverLifts => "cover-lifts",
            FigureKind::CoverSurgery => "cover-surgery",
            FigureKind::PolytopeWeights => "polytope-weights",
        }
    }

    pub fn supports(self, n: usize) -> bool {
        match self {
            FigureKind::PolytopeWeights => n == 1 || n == 2,
            _ => n == 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub stroke_width: f64,
    pub samples: usize,
    /// Size of the surgery handles, in pixels.
    pub handle_size: f64,
}

impl FigureSpec {
    pub fn new(kind: FigureKind) -> Self {
        FigureSpec {
            kind,
            stroke_width: 2.0,
            samples: 97,
            handle_size: 56.0,
        }
    }
}

/// `x` with at most 12 significant digits, no exponent and no trailing
/// zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

type Point = (f64, f64);

struct Svg {
    body: String,
}

impl Svg {
    fn new(width: u32, height: u32, style: &str) -> Self {
        let mut body = String::new();
        writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{width}" height="{height}">"#
        )
        .unwrap();
        writeln!(body, "<style>{style}</style>").unwrap();
        writeln!(body, r#"<rect class="background" x="0" y="0" width="{width}" height="{height}"/>"#).unwrap();
        Svg { body }
    }

    fn points(pts: &[Point]) -> String {
        pts.iter()
            .map(|(x, y)| format!("{},{}", fmt_num(*x), fmt_num(*y)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn polyline(&mut self, class: &str, label: &str, pts: &[Point]) {
        writeln!(
            self.body,
            r#"<polyline class="{class}" data-label="{}" points="{}"/>"#,
            escape(label),
            Self::points(pts)
        )
        .unwrap();
    }

    fn polygon(&mut self, class: &str, pts: &[Point]) {
        writeln!(self.body, r#"<polygon class="{class}" points="{}"/>"#, Self::points(pts)).unwrap();
    }

    fn path(&mut self, class: &str, pts: &[Point]) {
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let op = if i == 0 { 'M' } else { 'L' };
            write!(d, "{op}{},{}", fmt_num(*x), fmt_num(*y)).unwrap();
            if i + 1 < pts.len() {
                d.push(' ');
            }
        }
        writeln!(self.body, r#"<path class="{class}" d="{d}"/>"#).unwrap();
    }

    fn line(&mut self, class: &str, a: Point, b: Point) {
        writeln!(
            self.body,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            fmt_num(a.0),
            fmt_num(a.1),
            fmt_num(b.0),
            fmt_num(b.1)
        )
        .unwrap();
    }

    fn circle(&mut self, class: &str, c: Point, r: f64) {
        writeln!(
            self.body,
            r#"<circle class="{class}" cx="{}" cy="{}" r="{}"/>"#,
            fmt_num(c.0),
            fmt_num(c.1),
            fmt_num(r)
        )
        .unwrap();
    }

    fn text(&mut self, class: &str, at: Point, anchor: &str, s: &str) {
        writeln!(
            self.body,
            r#"<text class="{class}" x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            fmt_num(at.0),
            fmt_num(at.1),
            escape(s)
        )
        .unwrap();
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn style(spec: &FigureSpec) -> String {
    let w = fmt_num(spec.stroke_width);
    let thin = fmt_num(spec.stroke_width / 2.0);
    format!(
        ".background{{fill:#ffffff}}\
         .boundary,.axis,.grid,.polytope,.dual{{fill:none;stroke:#555555;stroke-width:{thin}}}\
         .grid{{stroke:#dddddd}}\
         .dual{{stroke:#777777;stroke-dasharray:4 3}}\
         .l1{{fill:none;stroke:#1f4fbf;stroke-width:{w}}}\
         .l2{{fill:none;stroke:#c62828;stroke-width:{w}}}\
         .surgered{{fill:none;stroke:#2e7d32;stroke-width:{w}}}\
         .equivalent{{fill:none;stroke:#6a1b9a;stroke-width:{w};stroke-dasharray:6 4}}\
         .handle{{fill:none;stroke:#ff8f00;stroke-width:{w}}}\
         .surgery-point,.lattice-point{{fill:#000000}}\
         text{{font-family:sans-serif;font-size:13px;fill:#222222}}"
    )
}

fn figure_error<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().expect("coordinate fits in f64")
}

fn height_label(h: &BigInt) -> String {
    if h.sign() == num_bigint::Sign::Plus {
        format!("+{h}")
    } else {
        h.to_string()
    }
}

/// `γ_k(t) = (e t + e^{-1}(1 - t)) e^{2πkti}` at `samples` equally spaced
/// parameters in `[0, 1]`.
pub fn annulus_curve(k: i64, samples: usize) -> Vec<(f64, f64)> {
    (0..samples)
        .map(|j| {
            let t = j as f64 / (samples - 1) as f64;
            let r = E * t + (1.0 - t) / E;
            let angle = 2.0 * PI * k as f64 * t;
            (r * angle.cos(), r * angle.sin())
        })
        .collect()
}

fn annulus(spec: &FigureSpec) -> String {
    let (cx, cy, scale) = (260.0, 260.0, 220.0 / E);
    let to_px = |(x, y): (f64, f64)| (cx + scale * x, cy - scale * y);
    let mut svg = Svg::new(720, 520, &style(spec));
    svg.circle("boundary", (cx, cy), scale / E);
    svg.circle("boundary", (cx, cy), scale * E);
    svg.line("axis", (cx - scale * E - 10.0, cy), (cx + scale * E + 10.0, cy));
    let curves = [
        ("l1", "L(-1) u L(-1)", -1),
        ("l2", "L(0)", 0),
        ("surgered", "L(-2)", -2),
    ];
    for (i, (class, label, k)) in curves.iter().enumerate() {
        let pts: Vec<Point> = annulus_curve(*k, spec.samples).into_iter().map(to_px).collect();
        svg.polyline(class, label, &pts);
        let y = 40.0 + 22.0 * i as f64;
        svg.line(class, (540.0, y - 4.0), (560.0, y - 4.0));
        svg.text("legend", (566.0, y), "start", label);
    }
    svg.finish()
}

/// Pixel frame of the cover pictures: `x ∈ [-1, 1]`, heights in `[-2, 2]`.
struct CoverFrame;

impl CoverFrame {
    fn px(&self, x: f64, h: f64) -> Point {
        (320.0 + 220.0 * x, 240.0 - 80.0 * h)
    }

    fn draw_axes(&self, svg: &mut Svg) {
        for h in -2..=2 {
            svg.line("grid", self.px(-1.0, h as f64), self.px(1.0, h as f64));
            svg.text("tick", {
                let (x, y) = self.px(-1.0, h as f64);
                (x - 44.0, y + 4.0)
            }, "end", &h.to_string());
        }
        svg.line("axis", self.px(-1.0, -2.4), self.px(-1.0, 2.4));
        svg.line("axis", self.px(1.0, -2.4), self.px(1.0, 2.4));
        let (x, y) = self.px(-1.0, -2.4);
        svg.text("tick", (x, y + 18.0), "middle", "-1");
        let (x, y) = self.px(1.0, -2.4);
        svg.text("tick", (x, y + 18.0), "middle", "1");
    }
}

/// Heights at `x = -1` and `x = +1` of a lift over `[-1, 1]`.
fn endpoint_heights(l: &AffineLift) -> (BigInt, BigInt) {
    let at = |x: i64| {
        let k = l.base().vertex_index(&LatticeVector::m(&[x])).expect("base is [-1, 1]");
        l.height(k).coords()[0].clone()
    };
    (at(-1), at(1))
}

fn sample_segment(frame: &CoverFrame, l: &AffineLift, samples: usize) -> Vec<Point> {
    let (a, b) = endpoint_heights(l);
    let (a, b) = (to_f64(&a), to_f64(&b));
    (0..samples)
        .map(|j| {
            let s = j as f64 / (samples - 1) as f64;
            frame.px(-1.0 + 2.0 * s, a + (b - a) * s)
        })
        .collect()
}

fn n1_data() -> Result<(fan::ToricFano, tropical::MultiSection, AffineLift), CliError> {
    let space = fan::projective_space(1).map_err(figure_error)?;
    let l1 = tropical::euler_multisection(&space).map_err(figure_error)?;
    let l2 = AffineLift::zero_section(LiftBase::of(&space).map_err(figure_error)?);
    Ok((space, l1, l2))
}

fn cover_lifts(spec: &FigureSpec) -> Result<String, CliError> {
    let (_, l1, l2) = n1_data()?;
    let frame = CoverFrame;
    let mut svg = Svg::new(640, 480, &style(spec));
    frame.draw_axes(&mut svg);
    let mut lifts: Vec<(&str, &AffineLift)> = l1.components().iter().map(|c| ("l1", c)).collect();
    lifts.push(("l2", &l2));
    for (class, l) in &lifts {
        svg.polyline(class, l.label().unwrap_or(""), &sample_segment(&frame, l, spec.samples));
    }
    let mut labels = std::collections::BTreeSet::new();
    for (_, l) in &lifts {
        let (a, b) = endpoint_heights(l);
        labels.insert((-1, a));
        labels.insert((1, b));
    }
    for (side, h) in labels {
        let (x, y) = frame.px(side as f64, to_f64(&h));
        let (dx, anchor) = if side < 0 { (-8.0, "end") } else { (8.0, "start") };
        svg.text("height", (x + dx, y - 6.0), anchor, &height_label(&h));
    }
    for c in l1.components() {
        if let tropical::Intersection::Vertex { vertex, .. } =
            tropical::intersection(c, &l2).map_err(figure_error)?
        {
            let x = to_f64(&l2.base().vertices()[vertex].coords()[0]);
            svg.circle("surgery-point", frame.px(x, to_f64(&l2.height(vertex).coords()[0])), 4.0);
        }
    }
    Ok(svg.finish())
}

fn unit(a: Point, b: Point) -> Point {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = (dx * dx + dy * dy).sqrt();
    (dx / len, dy / len)
}

/// The handle `p + ε (a(t) u + b(t) v)` for `t ∈ [-1, 1]`, where `u` is the
/// direction of travel into `p` and `v` the direction out of it.
fn handle(p: Point, u: Point, v: Point, size: f64, samples: usize) -> Vec<Point> {
    let last = samples as i64 - 1;
    (0..=last)
        .map(|j| {
            let t = BigRational::new(BigInt::from(2 * j - last), BigInt::from(last));
            let (a, b) = tropical::handle_curve(&t);
            let (a, b) = (a.to_f64().unwrap(), b.to_f64().unwrap());
            (p.0 + size * (a * u.0 + b * v.0), p.1 + size * (a * u.1 + b * v.1))
        })
        .collect()
}

/// The surgered curve: the component of `L_1` ending at the surgery point
/// over `x = +1`, back along `L_2`, then the component starting at the
/// surgery point over `x = -1`. Returns the path and its handle arcs.
fn surgered_path(
    frame: &CoverFrame,
    s: &SurgeredSection,
    spec: &FigureSpec,
) -> Result<(Vec<Point>, Vec<Vec<Point>>), CliError> {
    let base = s.second().base();
    let vertex_at = |x: i64| base.vertex_index(&LatticeVector::m(&[x])).expect("base is [-1, 1]");
    let component_at = |x: i64| {
        s.surgery_points()
            .iter()
            .find(|p| p.vertex == vertex_at(x))
            .map(|p| &s.multisection().components()[p.component])
            .ok_or_else(|| CliError::Compute(format!("no surgery point over x = {x}")))
    };
    let first = component_at(1)?;
    let last = component_at(-1)?;
    let (f0, f1) = endpoint_heights(first);
    let (z0, z1) = endpoint_heights(s.second());
    let (l0, l1) = endpoint_heights(last);
    let [f0, f1, z0, z1, l0, l1] = [f0, f1, z0, z1, l0, l1].map(|h| to_f64(&h));

    let start = frame.px(-1.0, f0);
    let right = frame.px(1.0, f1);
    let left = frame.px(-1.0, z0);
    let end = frame.px(1.0, l1);
    debug_assert!((f1 - z1).abs() < 1e-12 && (l0 - z0).abs() < 1e-12);

    let eps = spec.handle_size;
    let u1 = unit(start, right);
    let v1 = unit(right, left);
    let u2 = v1;
    let v2 = unit(left, end);
    let h1 = handle(right, u1, v1, eps, spec.samples);
    let h2 = handle(left, u2, v2, eps, spec.samples);

    let straight = |a: Point, b: Point| -> Vec<Point> {
        let m = spec.samples;
        (0..m)
            .map(|j| {
                let s = j as f64 / (m - 1) as f64;
                (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s)
            })
            .collect()
    };
    let mut path = straight(start, h1[0]);
    path.extend(h1.iter().skip(1));
    path.extend(straight(*h1.last().unwrap(), h2[0]).into_iter().skip(1));
    path.extend(h2.iter().skip(1));
    path.extend(straight(*h2.last().unwrap(), end).into_iter().skip(1));
    Ok((path, vec![h1, h2]))
}

fn cover_surgery(spec: &FigureSpec) -> Result<String, CliError> {
    let (_, l1, l2) = n1_data()?;
    let s = tropical::surgery(&l1, &l2).map_err(figure_error)?;
    let section = s.as_section().map_err(figure_error)?;
    let frame = CoverFrame;
    let mut svg = Svg::new(640, 480, &style(spec));
    frame.draw_axes(&mut svg);
    let (path, handles) = surgered_path(&frame, &s, spec)?;
    svg.polyline("surgered", "L1 # L2", &path);
    let k = tropical::rotation_class(&section).map_err(figure_error)?;
    svg.polyline("equivalent", &format!("L({k})"), &sample_segment(&frame, &section, spec.samples));
    for h in &handles {
        svg.path("handle", h);
    }
    for p in s.surgery_points() {
        let x = to_f64(&l2.base().vertices()[p.vertex].coords()[0]);
        svg.circle("surgery-point", frame.px(x, to_f64(&l2.height(p.vertex).coords()[0])), 4.0);
    }
    let (a, b) = endpoint_heights(&section);
    let (x, y) = frame.px(-1.0, to_f64(&a));
    svg.text("height", (x - 8.0, y + 4.0), "end", &height_label(&a));
    let (x, y) = frame.px(1.0, to_f64(&b));
    svg.text("height", (x + 8.0, y + 4.0), "start", &height_label(&b));
    svg.text("legend", (320.0, 30.0), "middle", &format!("L1 # L2 ~ L({k})"));
    Ok(svg.finish())
}

fn weight_label(ws: &[LatticeVector]) -> String {
    let items: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn polytope_weights(spec: &FigureSpec, n: usize) -> Result<String, CliError> {
    let space = fan::projective_space(n).map_err(figure_error)?;
    let report = tropical::verify_main_theorem(n).map_err(figure_error)?;
    let scale = 60.0;
    let coords = |v: &LatticeVector| -> Point {
        let c = v.coords();
        (to_f64(&c[0]), if n > 1 { to_f64(&c[1]) } else { 0.0 })
    };
    let mut svg = Svg::new(760, 340, &style(spec));
    let panels: [(f64, &mirror_core::polytope::Polytope, &str, &str); 2] = [
        (180.0, space.fano_polytope(), "dual", "fano polytope (N)"),
        (520.0, space.polytope(), "polytope", "anticanonical polytope (M)"),
    ];
    for (cx, p, class, title) in panels {
        let cy = 200.0;
        let px = |v: &LatticeVector| {
            let (x, y) = coords(v);
            (cx + scale * x, cy - scale * y)
        };
        svg.text("legend", (cx, 30.0), "middle", title);
        let order = boundary_order(p, n);
        let pts: Vec<Point> = order.iter().map(|&i| px(&p.vertices()[i])).collect();
        if n == 1 {
            svg.polyline(class, title, &pts);
        } else {
            svg.polygon(class, &pts);
        }
        for q in mirror_core::polytope::lattice_points(p) {
            svg.circle("lattice-point", px(&q), 2.5);
        }
    }
    let cx = 520.0;
    for cone in &report.cones {
        let (x, y) = coords(&cone.vertex);
        let len = (x * x + y * y).sqrt();
        let at = (cx + scale * x + 18.0 * x / len, 200.0 - scale * y - 18.0 * y / len + 4.0);
        let anchor = if x > 0.0 {
            "start"
        } else if x < 0.0 {
            "end"
        } else {
            "middle"
        };
        svg.text("weights", at, anchor, &weight_label(&cone.surgered));
    }
    Ok(svg.finish())
}

/// Vertex indices of a polygon in counter-clockwise order, or of a segment
/// from left to right.
fn boundary_order(p: &mirror_core::polytope::Polytope, n: usize) -> Vec<usize> {
    let vs = p.vertices();
    let mut idx: Vec<usize> = (0..vs.len()).collect();
    if n == 1 {
        idx.sort_by_key(|&i| vs[i].clone());
        return idx;
    }
    let pts: Vec<Point> = vs
        .iter()
        .map(|v| (to_f64(&v.coords()[0]), to_f64(&v.coords()[1])))
        .collect();
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    idx.sort_by(|&a, &b| {
        let ta = (pts[a].1 - cy).atan2(pts[a].0 - cx);
        let tb = (pts[b].1 - cy).atan2(pts[b].0 - cx);
        ta.total_cmp(&tb)
    });
    idx
}

pub fn emit_figure(spec: &FigureSpec, n: usize) -> Result<String, CliError> {
    if spec.samples < 16 {
        return Err(CliError::Usage(format!("need at least 16 samples, got {}", spec.samples)));
    }
    if !spec.kind.supports(n) {
        return Err(CliError::Usage(format!(
            "figure kind {} does not support n = {n}",
            spec.kind.name()
        )));
    }
    match spec.kind {
        FigureKind::AnnulusCurves => Ok(annulus(spec)),
        FigureKind::CoverLifts => cover_lifts(spec),
        FigureKind::CoverSurgery => cover_surgery(spec),
        FigureKind::PolytopeWeights => polytope_weights(spec, n),
    }
}
