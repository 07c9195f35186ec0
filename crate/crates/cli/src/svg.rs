use std::fmt::Write;

use spectral_core::geometry::BoxSandwich;
use spectral_core::{ConvexPolygon, PartitionCertificate, Point2};

fn points(v: &[Point2]) -> String {
    v.iter().map(|p| format!("{},{}", p.x, -p.y)).collect::<Vec<_>>().join(" ")
}

/// Plain SVG of the domain, certificate cells, net points and sandwich boxes.
/// The y axis points up.
pub fn certificate_svg(domain: &ConvexPolygon, cert: &PartitionCertificate, sandwich: Option<&BoxSandwich>) -> String {
    let mut all: Vec<Point2> = domain.vertices().to_vec();
    if let Some(sw) = sandwich {
        all.extend(sw.outer.corners());
    }
    all.extend(cert.domain.corners());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &all {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(-p.y);
        y1 = y1.max(-p.y);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0);
    let stroke = 0.004 * (x1 - x0).max(y1 - y0);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - pad,
        y0 - pad,
        x1 - x0 + 2.0 * pad,
        y1 - y0 + 2.0 * pad
    )
    .unwrap();
    writeln!(s, r#"<g fill="none" stroke-width="{stroke}">"#).unwrap();
    if let Some(sw) = sandwich {
        for (rect, color) in [(&sw.outer, "#999"), (&sw.inner, "#999")] {
            writeln!(s, r#"<polygon class="sandwich" stroke="{color}" stroke-dasharray="{}" points="{}"/>"#, 4.0 * stroke, points(&rect.corners())).unwrap();
        }
    }
    writeln!(s, r##"<polygon class="domain" stroke="#000" points="{}"/>"##, points(domain.vertices())).unwrap();
    for cell in &cert.cells {
        writeln!(s, r##"<polygon class="cell" stroke="#1f77b4" points="{}"/>"##, points(cell.vertices())).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    for p in &cert.sites {
        writeln!(s, r##"<circle class="site" cx="{}" cy="{}" r="{}" fill="#d62728"/>"##, p.x, -p.y, 2.0 * stroke).unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    s
}
