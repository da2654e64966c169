//! Portrait documents: labelled polylines in the plane, exported as SVG, CSV
//! and JSON metadata. Output is byte-stable for identical input.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::dynamics::{Point, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolylineClass {
    Separatrix,
    Representative,
    Generic,
}

impl PolylineClass {
    fn as_str(self) -> &'static str {
        match self {
            PolylineClass::Separatrix => "separatrix",
            PolylineClass::Representative => "representative",
            PolylineClass::Generic => "generic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub id: String,
    pub class: PolylineClass,
    pub points: Vec<Point>,
}

/// A trajectory with the label it gets in the document.
#[derive(Clone, Debug)]
pub struct LabelledTrajectory {
    pub id: String,
    pub class: PolylineClass,
    pub trajectory: Trajectory,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PortraitDoc {
    pub polylines: Vec<Polyline>,
    /// Radius of a disk drawn as the singular region (0 for none).
    pub singular_radius: f64,
    /// Half-width of the square view.
    pub view: f64,
    pub meta: serde_json::Value,
}

pub fn export_portrait(trajs: &[LabelledTrajectory], meta: serde_json::Value) -> PortraitDoc {
    let polylines: Vec<Polyline> = trajs
        .iter()
        .map(|t| Polyline {
            id: t.id.clone(),
            class: t.class,
            points: t.trajectory.vertices.clone(),
        })
        .collect();
    let view = polylines
        .iter()
        .flat_map(|p| p.points.iter())
        .map(|q| q[0].abs().max(q[1].abs()))
        .fold(1.0f64, f64::max);
    PortraitDoc {
        polylines,
        singular_radius: 0.0,
        view,
        meta,
    }
}

impl PortraitDoc {
    pub fn flagged_count(&self) -> usize {
        self.polylines
            .iter()
            .filter(|p| p.class != PolylineClass::Generic)
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("orbit,index,x,y\n");
        for p in &self.polylines {
            for (k, q) in p.points.iter().enumerate() {
                writeln!(out, "{},{},{:.16e},{:.16e}", p.id, k, q[0], q[1]).expect("string write");
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        let size = 800.0;
        let scale = size / (2.0 * self.view * 1.05);
        let px = |q: Point| (size / 2.0 + q[0] * scale, size / 2.0 - q[1] * scale);
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        )
        .expect("string write");
        out.push_str(
            "<style>.separatrix{stroke:#c0392b;stroke-width:1.6;fill:none}\
             .representative{stroke:#2471a3;stroke-width:1.2;fill:none;stroke-dasharray:4 2}\
             .generic{stroke:#7f8c8d;stroke-width:0.6;fill:none}\
             .singular{fill:#bbbbbb;stroke:#555555;stroke-width:0.5}</style>\n",
        );
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        if self.singular_radius > 0.0 {
            let (cx, cy) = px([0.0, 0.0]);
            writeln!(
                out,
                "<circle class=\"singular\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\"/>",
                (self.singular_radius * scale).max(1.5)
            )
            .expect("string write");
        }
        // generic first so flagged orbits draw on top
        let mut order: Vec<&Polyline> = self.polylines.iter().collect();
        order.sort_by_key(|p| match p.class {
            PolylineClass::Generic => 0,
            PolylineClass::Representative => 1,
            PolylineClass::Separatrix => 2,
        });
        for p in order {
            if p.points.is_empty() {
                continue;
            }
            let mut pts = String::new();
            let mut last: Option<(f64, f64)> = None;
            let n = p.points.len();
            for (k, q) in p.points.iter().enumerate() {
                let (x, y) = px(*q);
                let keep = match last {
                    None => true,
                    Some((lx, ly)) => k + 1 == n || (x - lx).hypot(y - ly) >= 0.75,
                };
                if keep {
                    write!(pts, "{x:.2},{y:.2} ").expect("string write");
                    last = Some((x, y));
                }
            }
            writeln!(
                out,
                "<polyline class=\"{}\" data-orbit=\"{}\" points=\"{}\"/>",
                p.class.as_str(),
                p.id,
                pts.trim_end()
            )
            .expect("string write");
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn to_json(&self) -> String {
        let mut counts = serde_json::Map::new();
        for class in [
            PolylineClass::Separatrix,
            PolylineClass::Representative,
            PolylineClass::Generic,
        ] {
            let c = self.polylines.iter().filter(|p| p.class == class).count();
            counts.insert(class.as_str().to_string(), c.into());
        }
        let doc = serde_json::json!({
            "meta": self.meta,
            "polylines": counts,
            "vertices": self.polylines.iter().map(|p| p.points.len()).sum::<usize>(),
            "singular_radius": self.singular_radius,
            "view_half_width": self.view,
        });
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn write_svg(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_svg())
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }

    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}
