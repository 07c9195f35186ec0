use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spectral_core::{ConvexPolygon, Point2};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Rectangle,
    RegularPolygon,
    PolygonFile,
}

/// A named domain. Rectangles are `[-w/2, w/2] × [-h/2, h/2]`; regular
/// polygons are centered at the origin with a vertex on the positive x axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub name: String,
    pub kind: DomainKind,
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

const NAMED: &[(&str, &str)] = &[
    ("square", "rectangle:1x1"),
    ("rect2x1", "rectangle:2x1"),
    ("rect10x1", "rectangle:10x1"),
    ("pentagon", "regular:5"),
    ("hexagon", "regular:6"),
    ("octagon", "regular:8"),
    ("disk", "regular:256"),
];

/// Square, 2:1 and 10:1 rectangles, regular 5-, 6-, 8-gons and the 256-gon.
pub const DEFAULT_GALLERY: &[&str] = &["square", "rect2x1", "rect10x1", "pentagon", "hexagon", "octagon", "disk"];

fn rectangle(name: &str, w: f64, h: f64) -> DomainSpec {
    DomainSpec {
        name: name.to_string(),
        kind: DomainKind::Rectangle,
        parameters: BTreeMap::from([("width".to_string(), w), ("height".to_string(), h)]),
        path: None,
    }
}

fn regular(name: &str, n: usize) -> DomainSpec {
    DomainSpec {
        name: name.to_string(),
        kind: DomainKind::RegularPolygon,
        parameters: BTreeMap::from([("sides".to_string(), n as f64), ("circumradius".to_string(), 1.0)]),
        path: None,
    }
}

fn positive(text: &str, what: &str) -> Result<f64, CliError> {
    match text.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(CliError::usage(format!("invalid {what} {text:?}"))),
    }
}

impl DomainSpec {
    /// Parses `square`, `rect2x1`, `rect10x1`, `pentagon`, `hexagon`,
    /// `octagon`, `disk`, `regular:N`, `rectangle:WxH` or `polygon:PATH`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        let alias = NAMED.iter().find(|(n, _)| *n == text).map(|(_, t)| *t);
        let body = alias.unwrap_or(text);
        let mut spec = if let Some(n) = body.strip_prefix("regular:") {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("invalid polygon side count in {text:?}")))?;
            if n < 3 {
                return Err(CliError::usage(format!("a regular polygon needs at least 3 sides, got {n}")));
            }
            regular(text, n)
        } else if let Some(dims) = body.strip_prefix("rectangle:") {
            let (w, h) = dims
                .split_once(['x', 'X'])
                .ok_or_else(|| CliError::usage(format!("expected rectangle:WxH, got {text:?}")))?;
            rectangle(text, positive(w, "width")?, positive(h, "height")?)
        } else if let Some(path) = body.strip_prefix("polygon:") {
            DomainSpec {
                name: text.to_string(),
                kind: DomainKind::PolygonFile,
                parameters: BTreeMap::new(),
                path: Some(PathBuf::from(path)),
            }
        } else {
            return Err(CliError::usage(format!(
                "unknown domain {text:?}; expected one of {}, regular:N, rectangle:WxH, polygon:PATH",
                NAMED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
            )));
        };
        spec.name = text.to_string();
        Ok(spec)
    }

    pub fn polygon(&self) -> Result<ConvexPolygon, CliError> {
        let param = |key: &str| {
            self.parameters
                .get(key)
                .copied()
                .ok_or_else(|| CliError::usage(format!("domain {} lacks parameter {key}", self.name)))
        };
        let poly = match self.kind {
            DomainKind::Rectangle => {
                let (w, h) = (param("width")?, param("height")?);
                ConvexPolygon::axis_box(-w / 2.0, w / 2.0, -h / 2.0, h / 2.0)
            }
            DomainKind::RegularPolygon => {
                ConvexPolygon::regular(param("sides")? as usize, Point2::default(), param("circumradius")?, 0.0)
            }
            DomainKind::PolygonFile => {
                let path = self.path.as_ref().ok_or_else(|| CliError::usage("polygon domain without a path"))?;
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
                ConvexPolygon::from_json(&text)
            }
        };
        poly.map_err(|e| CliError::usage(format!("domain {}: {e}", self.name)))
    }
}

pub fn default_gallery() -> Vec<DomainSpec> {
    DEFAULT_GALLERY
        .iter()
        .map(|n| DomainSpec::parse(n).expect("gallery names parse"))
        .collect()
}
