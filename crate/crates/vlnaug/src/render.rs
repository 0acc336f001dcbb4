//! Top-down SVG view around one viewpoint: object footprints with category
//! labels and arrows to navigable neighbors.

use std::fmt::Write as _;

use vlnaug_core::geometry::Vec3;
use vlnaug_core::graph::{GraphError, NavGraph};
use vlnaug_core::scene::SceneModel;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub viewpoint: String,
    /// Meters shown from the viewpoint to the nearest canvas edge.
    pub radius: f64,
    pub width: u32,
    pub height: u32,
}

impl RenderSpec {
    pub fn new(viewpoint: &str) -> Self {
        RenderSpec {
            viewpoint: viewpoint.to_string(),
            radius: 4.0,
            width: 800,
            height: 800,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("render radius must be positive, got {0}")]
    Radius(f64),
    #[error("canvas must be at least 1×1 pixels")]
    Canvas,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn px(v: f64) -> String {
    let s = format!("{:.2}", v);
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Canvas {
    origin: Vec3,
    scale: f64,
    cx: f64,
    cy: f64,
}

impl Canvas {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (self.cx + (x - self.origin.x) * self.scale, self.cy - (y - self.origin.y) * self.scale)
    }
}

/// Objects within `radius` (3D distance, closed) are drawn by object index;
/// neighbor arrows follow neighbor id order.
pub fn render_viewpoint(scene: &SceneModel, graph: &NavGraph, spec: &RenderSpec) -> Result<String, RenderError> {
    if !(spec.radius > 0.0 && spec.radius.is_finite()) {
        return Err(RenderError::Radius(spec.radius));
    }
    if spec.width == 0 || spec.height == 0 {
        return Err(RenderError::Canvas);
    }
    let here = graph.position(&spec.viewpoint)?;
    let neighbors = graph.neighbors(&spec.viewpoint)?;
    let (w, h) = (spec.width as f64, spec.height as f64);
    let canvas = Canvas {
        origin: here,
        scale: w.min(h) / (2.0 * spec.radius),
        cx: w / 2.0,
        cy: h / 2.0,
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(
        s,
        "<title>{} / {} (radius {} m, +Y up)</title>",
        escape(graph.scan_id()),
        escape(&spec.viewpoint),
        px(spec.radius)
    );
    s.push_str(concat!(
        "<defs><marker id=\"head\" markerWidth=\"10\" markerHeight=\"8\" refX=\"9\" refY=\"4\" orient=\"auto\">",
        "<path d=\"M0,0 L10,4 L0,8 z\" fill=\"#1f5fbf\"/></marker></defs>\n"
    ));
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, spec.width, spec.height);

    s.push_str("<g id=\"objects\">\n");
    for obj in &scene.objects {
        if here.distance(obj.center) > spec.radius {
            continue;
        }
        let name = scene.category_name(obj.index).unwrap_or_default();
        let (a, b) = (obj.axis0 * obj.radii[0], obj.axis1 * obj.radii[1]);
        let corners = [
            obj.center + a + b,
            obj.center - a + b,
            obj.center - a - b,
            obj.center + a - b,
        ];
        let points: Vec<String> = corners
            .iter()
            .map(|c| {
                let (x, y) = canvas.map(c.x, c.y);
                format!("{},{}", px(x), px(y))
            })
            .collect();
        let (lx, ly) = canvas.map(obj.center.x, obj.center.y);
        let _ = writeln!(
            s,
            r##"<polygon class="object" data-index="{}" points="{}" fill="none" stroke="#7a4b16" stroke-width="1.5"/>"##,
            obj.index,
            points.join(" ")
        );
        let _ = writeln!(
            s,
            r##"<text class="object-label" x="{}" y="{}" font-size="12" text-anchor="middle" fill="#7a4b16">{}</text>"##,
            px(lx),
            px(ly),
            escape(&name)
        );
    }
    s.push_str("</g>\n<g id=\"neighbors\">\n");
    for (id, length) in &neighbors {
        let to = graph.position(id)?;
        let shown = length.min(spec.radius * 0.95);
        let dx = to.x - here.x;
        let dy = to.y - here.y;
        let flat = (dx * dx + dy * dy).sqrt();
        let (ux, uy) = if flat > 0.0 { (dx / flat, dy / flat) } else { (0.0, 0.0) };
        let (x2, y2) = canvas.map(here.x + ux * shown, here.y + uy * shown);
        let _ = writeln!(
            s,
            r##"<line class="neighbor" data-id="{}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1f5fbf" stroke-width="2" marker-end="url(#head)"/>"##,
            escape(id),
            px(canvas.cx),
            px(canvas.cy),
            px(x2),
            px(y2)
        );
        let _ = writeln!(
            s,
            r##"<text class="neighbor-label" x="{}" y="{}" font-size="12" fill="#1f5fbf">{} ({} m)</text>"##,
            px(x2 + 4.0),
            px(y2 - 4.0),
            escape(id),
            px(*length)
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r##"<circle class="viewpoint" cx="{}" cy="{}" r="6" fill="#c0392b"/>"##,
        px(canvas.cx),
        px(canvas.cy)
    );
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vlnaug_core::graph::Viewpoint;
    use vlnaug_core::scene::{Category, SceneObject};

    fn vp(id: &str, x: f64, y: f64) -> Viewpoint {
        Viewpoint {
            id: id.into(),
            position: Vec3::new(x, y, 1.5),
            height: 1.5,
            included: true,
        }
    }

    #[test]
    fn isolated_node_draws_only_marker() {
        let g = NavGraph::from_edges("s", vec![vp("a", 0.0, 0.0)], &[]).unwrap();
        let svg = render_viewpoint(&SceneModel::default(), &g, &RenderSpec::new("a")).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 0);
        assert_eq!(svg.matches("<line").count(), 0);
        assert_eq!(svg.matches("class=\"viewpoint\"").count(), 1);
    }

    #[test]
    fn radius_is_a_closed_bound() {
        let g = NavGraph::from_edges("s", vec![vp("a", 0.0, 0.0), vp("b", 2.0, 0.0)], &[("a", "b")]).unwrap();
        let mut scene = SceneModel::default();
        scene.categories.push(Category {
            index: 0,
            mapping_index: 0,
            name: "table".into(),
            mpcat40_index: 5,
            mpcat40_name: "table".into(),
        });
        for (i, y) in [4.0, 4.5].into_iter().enumerate() {
            scene.objects.push(SceneObject {
                index: i,
                region_index: -1,
                category_index: 0,
                center: Vec3::new(0.0, y, 1.5),
                axis0: Vec3::new(1.0, 0.0, 0.0),
                axis1: Vec3::new(0.0, 1.0, 0.0),
                radii: [0.5, 0.3, 0.4],
            });
        }
        let svg = render_viewpoint(&scene, &g, &RenderSpec::new("a")).unwrap();
        assert_eq!(svg.matches("class=\"object\"").count(), 1);
        assert!(svg.contains(">table</text>"));
        assert_eq!(svg.matches("class=\"neighbor\"").count(), 1);
        assert!(svg.contains("b (2.00 m)"));
        // +Y up: the table north of the viewpoint sits above the center
        assert!(svg.contains("<polygon class=\"object\" data-index=\"0\" points=\"450.00,-30.00"));
    }

    #[test]
    fn errors() {
        let g = NavGraph::from_edges("s", vec![vp("a", 0.0, 0.0)], &[]).unwrap();
        let mut spec = RenderSpec::new("zz");
        assert!(matches!(render_viewpoint(&SceneModel::default(), &g, &spec), Err(RenderError::Graph(_))));
        spec.viewpoint = "a".into();
        spec.radius = 0.0;
        assert!(matches!(render_viewpoint(&SceneModel::default(), &g, &spec), Err(RenderError::Radius(_))));
    }
}
