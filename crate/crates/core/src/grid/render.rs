//! SVG scatter plot of grid points with optional genre hulls.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{convex_hull, write_grid_csv, FactualityAxis, GridPoint, ZoomBounds};
use crate::corpus::TextKind;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 210.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const FIXED_RADIUS: f64 = 4.0;
const MAX_RADIUS: f64 = 18.0;
const UNTAGGED: &str = "#777777";
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#bcbd22",
    "#17becf", "#393b79",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub color_by_genre: bool,
    pub shape_by_kind: bool,
    /// Marker area proportional to `n_sentences`.
    pub size_by_count: bool,
    /// Shade the convex hull of each genre's points.
    pub hulls: bool,
    pub zoom: Option<ZoomBounds>,
    pub axis: FactualityAxis,
    pub title: Option<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            color_by_genre: true,
            shape_by_kind: true,
            size_by_count: false,
            hulls: false,
            zoom: None,
            axis: FactualityAxis::AllSentences,
            title: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedGrid {
    pub svg: String,
    /// Every plotted point in grid CSV layout.
    pub csv: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    bounds: ZoomBounds,
}

impl Frame {
    fn plot_w() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    /// Percent coordinates to pixels.
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let (x0, x1) = self.bounds.x;
        let (y0, y1) = self.bounds.y;
        (
            LEFT + (x - x0) / (x1 - x0) * Self::plot_w(),
            TOP + Self::plot_h() - (y - y0) / (y1 - y0) * Self::plot_h(),
        )
    }
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=5).map(|i| lo + (hi - lo) * i as f64 / 5.0).collect()
}

pub fn render_grid(points: &[GridPoint], options: &RenderOptions) -> RenderedGrid {
    let frame = Frame { bounds: options.zoom.unwrap_or(ZoomBounds::FULL) };
    let genres: Vec<String> = {
        let mut g: Vec<String> = points.iter().filter_map(|p| p.genre_tag.clone()).collect();
        g.sort();
        g.dedup();
        g
    };
    let color_of = |tag: &Option<String>| -> &'static str {
        match tag {
            Some(t) if options.color_by_genre => {
                let i = genres.binary_search(t).expect("genre collected");
                PALETTE[i % PALETTE.len()]
            }
            _ => UNTAGGED,
        }
    };
    let max_n = points.iter().map(|p| p.n_sentences).max().unwrap_or(1).max(1) as f64;
    let radius_of = |p: &GridPoint| {
        if options.size_by_count {
            MAX_RADIUS * (p.n_sentences as f64 / max_n).sqrt()
        } else {
            FIXED_RADIUS
        }
    };
    let pct = |p: &GridPoint| {
        let (x, y) = p.coordinates(options.axis);
        (x * 100.0, y * 100.0)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<defs><clipPath id=\"plot\"><rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{:.2}\" height=\"{:.2}\"/></clipPath></defs>",
        Frame::plot_w(),
        Frame::plot_h()
    );
    if let Some(title) = &options.title {
        let _ = writeln!(svg, "<text class=\"title\" x=\"{LEFT}\" y=\"18\" font-size=\"14\">{}</text>", escape(title));
    }

    // grid lines and tick labels
    for v in ticks(frame.bounds.x.0, frame.bounds.x.1) {
        let (x, _) = frame.px(v, frame.bounds.y.0);
        let _ = writeln!(
            svg,
            "<line class=\"gridline\" x1=\"{x:.2}\" y1=\"{TOP}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#e0e0e0\"/>",
            TOP + Frame::plot_h()
        );
        let _ = writeln!(
            svg,
            "<text class=\"tick\" x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{v:.0}</text>",
            TOP + Frame::plot_h() + 16.0
        );
    }
    for v in ticks(frame.bounds.y.0, frame.bounds.y.1) {
        let (_, y) = frame.px(frame.bounds.x.0, v);
        let _ = writeln!(
            svg,
            "<line class=\"gridline\" x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\"/>",
            LEFT + Frame::plot_w()
        );
        let _ = writeln!(
            svg,
            "<text class=\"tick\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v:.0}</text>",
            LEFT - 6.0,
            y + 4.0
        );
    }

    if options.hulls {
        let mut by_genre: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
        for p in points {
            if let Some(tag) = &p.genre_tag {
                let (x, y) = pct(p);
                by_genre.entry(tag.as_str()).or_default().push(frame.px(x, y));
            }
        }
        for (tag, pts) in by_genre {
            let hull = convex_hull(&pts);
            if hull.len() < 3 {
                continue;
            }
            let coords: Vec<String> = hull.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                svg,
                "<polygon class=\"hull\" clip-path=\"url(#plot)\" points=\"{}\" fill=\"{}\" fill-opacity=\"0.18\" stroke=\"none\"><title>{}</title></polygon>",
                coords.join(" "),
                color_of(&Some(tag.to_string())),
                escape(tag)
            );
        }
    }

    // axes
    let (x_axis_y, y_axis_x) = (TOP + Frame::plot_h(), LEFT);
    let _ = writeln!(
        svg,
        "<line class=\"axis\" x1=\"{LEFT}\" y1=\"{x_axis_y:.2}\" x2=\"{:.2}\" y2=\"{x_axis_y:.2}\" stroke=\"black\"/>",
        LEFT + Frame::plot_w()
    );
    let _ = writeln!(
        svg,
        "<line class=\"axis\" x1=\"{y_axis_x}\" y1=\"{TOP}\" x2=\"{y_axis_x}\" y2=\"{x_axis_y:.2}\" stroke=\"black\"/>"
    );
    let x_label = match options.axis {
        FactualityAxis::AllSentences => "Factuality (% fact sentences)",
        FactualityAxis::FactVsOpinion => "Factuality (% fact of fact + opinion)",
    };
    let _ = writeln!(
        svg,
        "<text class=\"axis-label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x_label}</text>",
        LEFT + Frame::plot_w() / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        "<text class=\"axis-label\" transform=\"translate(20,{:.2}) rotate(-90)\" text-anchor=\"middle\">Formality (% formal sentences)</text>",
        TOP + Frame::plot_h() / 2.0
    );

    // larger markers first so small ones stay visible
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[b].n_sentences.cmp(&points[a].n_sentences).then(a.cmp(&b)));
    let _ = writeln!(svg, "<g clip-path=\"url(#plot)\">");
    for i in order {
        let p = &points[i];
        let (x, y) = pct(p);
        let (cx, cy) = frame.px(x, y);
        let r = radius_of(p);
        let color = color_of(&p.genre_tag);
        let title = format!(
            "{} ({:.1}% fact, {:.1}% formal, n={})",
            p.unit_id,
            x,
            y,
            p.n_sentences
        );
        let written = options.shape_by_kind && p.text_kind == Some(TextKind::Written);
        if written {
            // equilateral triangle with the same area as the circle
            let side = r * (4.0 * std::f64::consts::PI / 3.0f64.sqrt()).sqrt();
            let h = side * 3.0f64.sqrt() / 2.0;
            let _ = writeln!(
                svg,
                "<polygon class=\"marker\" points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"{color}\" fill-opacity=\"0.85\" stroke=\"white\" stroke-width=\"0.5\"><title>{}</title></polygon>",
                cx,
                cy - 2.0 * h / 3.0,
                cx - side / 2.0,
                cy + h / 3.0,
                cx + side / 2.0,
                cy + h / 3.0,
                escape(&title)
            );
        } else {
            let _ = writeln!(
                svg,
                "<circle class=\"marker\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r:.3}\" fill=\"{color}\" fill-opacity=\"0.85\" stroke=\"white\" stroke-width=\"0.5\"><title>{}</title></circle>",
                escape(&title)
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    if options.color_by_genre && !genres.is_empty() {
        let lx = LEFT + Frame::plot_w() + 20.0;
        for (i, g) in genres.iter().enumerate() {
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let _ = writeln!(
                svg,
                "<rect class=\"legend\" x=\"{lx:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"{:.2}\" y=\"{ly:.2}\">{}</text>",
                ly - 9.0,
                PALETTE[i % PALETTE.len()],
                lx + 16.0,
                escape(g)
            );
        }
    }
    svg.push_str("</svg>\n");

    let mut csv = Vec::new();
    write_grid_csv(&mut csv, points).expect("writing to memory cannot fail");
    RenderedGrid {
        svg,
        csv: String::from_utf8(csv).expect("csv is utf-8"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{read_grid_csv, UnitLevel};

    fn point(id: &str, x: f64, y: f64, n: usize, genre: Option<&str>, kind: TextKind) -> GridPoint {
        GridPoint {
            unit_id: id.into(),
            level: UnitLevel::Item,
            n_sentences: n,
            frac_fact: x,
            frac_opinion: 1.0 - x,
            frac_neither: 0.0,
            frac_formal: y,
            genre_tag: genre.map(String::from),
            text_kind: Some(kind),
        }
    }

    #[test]
    fn minimal_render() {
        let out = render_grid(&[point("a", 0.5, 0.5, 10, None, TextKind::Spoken)], &RenderOptions::default());
        assert_eq!(out.svg.matches("class=\"marker\"").count(), 1);
        assert_eq!(out.svg.matches("class=\"axis-label\"").count(), 2);
        assert_eq!(out.svg.matches("class=\"axis\"").count(), 2);
    }

    #[test]
    fn one_triangle_hull() {
        let pts = vec![
            point("a", 0.2, 0.2, 10, Some("TV satire"), TextKind::Spoken),
            point("b", 0.8, 0.2, 10, Some("TV satire"), TextKind::Spoken),
            point("c", 0.5, 0.9, 10, Some("TV satire"), TextKind::Written),
            point("d", 0.5, 0.5, 10, Some("Podcasts"), TextKind::Spoken),
        ];
        let out = render_grid(&pts, &RenderOptions { hulls: true, ..Default::default() });
        assert_eq!(out.svg.matches("class=\"hull\"").count(), 1);
        let hull_line = out.svg.lines().find(|l| l.contains("class=\"hull\"")).unwrap();
        let pts_attr = hull_line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts_attr.split(' ').count(), 3);
        assert_eq!(out.svg.matches("<polygon class=\"marker\"").count(), 1);
    }

    #[test]
    fn larger_count_gives_larger_marker() {
        let pts = vec![
            point("Sports in general", 0.8, 0.85, 235, None, TextKind::Written),
            point("Domestic", 0.9, 0.9, 511_822, None, TextKind::Spoken),
        ];
        let opts = RenderOptions { size_by_count: true, shape_by_kind: false, ..Default::default() };
        let out = render_grid(&pts, &opts);
        let radius = |id: &str| -> f64 {
            let line = out.svg.lines().find(|l| l.contains(&format!("<title>{id} "))).unwrap();
            line.split("r=\"").nth(1).unwrap().split('"').next().unwrap().parse().unwrap()
        };
        assert!(radius("Domestic") > radius("Sports in general"));
        assert!(radius("Sports in general") > 0.0);
    }

    #[test]
    fn csv_replots_identically() {
        let pts = vec![
            point("a", 1.0 / 3.0, 0.123456789, 3, Some("x"), TextKind::Spoken),
            point("b", 0.9, 0.1, 7, None, TextKind::Written),
        ];
        let opts = RenderOptions { hulls: true, size_by_count: true, ..Default::default() };
        let first = render_grid(&pts, &opts);
        let reread = read_grid_csv(first.csv.as_bytes()).unwrap();
        assert_eq!(reread, pts);
        assert_eq!(render_grid(&reread, &opts), first);
    }

    #[test]
    fn zoom_changes_the_frame() {
        let pts = vec![point("a", 0.9, 0.9, 1, None, TextKind::Spoken)];
        let full = render_grid(&pts, &RenderOptions::default());
        let zoomed = render_grid(
            &pts,
            &RenderOptions { zoom: Some(ZoomBounds { x: (85.0, 95.0), y: (85.0, 95.0) }), ..Default::default() },
        );
        assert_ne!(full.svg, zoomed.svg);
        assert!(zoomed.svg.contains(">85</text>"));
    }
}
