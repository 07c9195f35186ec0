//! Partition certificates for `μ_k ≲ (k/l)² μ_l` on rectangles, and the
//! measured chain of comparisons that reduces a convex domain to a rectangle.
//!
//! A certificate records a partition of a rectangle into `l′ ≤ l` convex cells
//! of diameter `O(R)`, `R = Ck/(l√μ_k)`. Direct-sum interlacing then gives
//! `μ_l ≥ μ_{l′} ≥ min_i μ₁(cell_i) ≥ π²/max diam²`. Verification recomputes
//! every recorded quantity and reports each comparison as a [`ChainLink`].

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bounds::{rectangle_spectrum, torus_spectrum};
use crate::error::{Error, Result};
use crate::fem::neumann_spectrum;
use crate::geometry::{
    clip_halfplane, diameter, inner_offset, maximal_separated_net, rectangle_sandwich, voronoi_partition,
    ConvexPolygon, Point2, Rectangle,
};
use crate::spectrum::{Spectrum, SpectrumSource};

/// Relative tolerance on recorded geometric quantities.
pub const GEOMETRY_TOL: f64 = 1e-9;
/// Relative slack on the final link when the spectrum comes from finite elements.
pub const FEM_SPECTRAL_TOL: f64 = 0.01;
/// Default ceiling for measured `≲` constants.
pub const DEFAULT_RATIO_THRESHOLD: f64 = 100.0;
/// Search range and resolution of [`minimal_constant`].
pub const C_MIN: f64 = 0.25;
pub const C_MAX: f64 = 16384.0;
pub const C_RESOLUTION: f64 = 1.05;
/// Strip partitions with more cells than this are recorded without cells.
pub const MAX_STRIP_CELLS: usize = 4096;
/// Net partitions guaranteed to exceed this many cells are refused.
pub const MAX_NET_SITES: usize = 4096;

/// `2 + √2`: each Voronoi cell of a maximal `2R`-net in the `R`-offset lies in
/// the ball of this radius (times `R`) about its net point. Certificates also
/// hold every cell diameter to this multiple, which is stricter.
pub const NET_DIAMETER_FACTOR: f64 = 2.0 + SQRT_2;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    Strip,
    Net,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub domain: Rectangle,
    pub k: usize,
    pub l: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub mu_k_estimate: f64,
    pub mu_k_source: SpectrumSource,
    /// Reference `μ_l` the certificate was verified against.
    pub mu_l: Option<f64>,
    #[serde(rename = "R")]
    pub r: f64,
    pub case_tag: CaseTag,
    pub cells: Vec<ConvexPolygon>,
    /// Net points (Net case only).
    pub sites: Vec<Point2>,
    pub cell_diameters: Vec<f64>,
    /// `√(4a² + h²)` for strips of height `h`.
    pub strip_diameter_bound: Option<f64>,
    pub l_prime: usize,
    pub lower_bound: f64,
    pub chain_ok: bool,
    pub notes: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs` up to the link's slack.
    Le,
    /// `lhs = rhs` up to the link's slack.
    Eq,
    /// `lhs ≤ constant · rhs` with a measured constant.
    Lesssim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub name: String,
    pub relation: Relation,
    #[serde(with = "finite_or_null")]
    pub lhs: f64,
    #[serde(with = "finite_or_null")]
    pub rhs: f64,
    /// `lhs / rhs`; absent when not finite.
    pub ratio: Option<f64>,
    pub constant: f64,
    pub slack: f64,
    pub holds: bool,
}

impl ChainLink {
    fn new(name: impl Into<String>, relation: Relation, lhs: f64, rhs: f64, constant: f64, slack: f64) -> Self {
        let holds = lhs.is_finite()
            && rhs.is_finite()
            && match relation {
                Relation::Le | Relation::Lesssim => lhs <= constant * rhs * (1.0 + slack),
                Relation::Eq => (lhs - rhs).abs() <= slack * lhs.abs().max(rhs.abs()),
            };
        let ratio = lhs / rhs;
        ChainLink {
            name: name.into(),
            relation,
            lhs,
            rhs,
            ratio: ratio.is_finite().then_some(ratio),
            constant,
            slack,
            holds,
        }
    }

    fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, Relation::Le, lhs, rhs, 1.0, GEOMETRY_TOL)
    }

    fn eq(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, Relation::Eq, lhs, rhs, 1.0, GEOMETRY_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub links: Vec<ChainLink>,
    pub minimal_c: Option<f64>,
}

impl ChainReport {
    pub fn ok(&self) -> bool {
        self.links.iter().all(|l| l.holds)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.links.iter().filter(|l| !l.holds).map(|l| l.name.as_str()).collect()
    }

    pub fn link(&self, name: &str) -> Option<&ChainLink> {
        self.links.iter().find(|l| l.name == name)
    }
}

/// Link names of the four main verification steps.
pub const LINK_COUNT: &str = "l_prime <= l";
pub const LINK_DIAMETER: &str = "max cell diameter <= (2+sqrt2) R";
pub const LINK_PAYNE_WEINBERGER: &str = "lower_bound = pi^2 / max diameter^2";
pub const LINK_FINAL: &str = "lower_bound <= mu_l";
pub const LINK_PACKING: &str = "l_prime pi R^2 <= area";
pub const LINK_CLOSING: &str = "pi^2 l^2 mu_k / ((2+sqrt2)^2 C^2 k^2) <= lower_bound";
pub const LINK_VERDICT: &str = "recorded chain_ok";
pub const LINK_BALL: &str = "cell within B(site, (2+sqrt2) R)";

fn check_indices(k: usize, l: usize) -> Result<()> {
    if l == 0 || k < l {
        return Err(Error::InvalidArgument(format!("need k ≥ l ≥ 1 (k = {k}, l = {l})")));
    }
    Ok(())
}

fn radius(k: usize, l: usize, c: f64, mu_k: f64) -> f64 {
    c * k as f64 / (l as f64 * mu_k.sqrt())
}

fn strip_count(domain: &Rectangle, r: f64) -> usize {
    ((2.0 * domain.half_width_b / r).ceil() as usize).max(1)
}

fn notes_for(case: CaseTag, l_prime: usize, source: SpectrumSource) -> String {
    let case = match case {
        CaseTag::Strip => "strip partition into equal heights",
        CaseTag::Net => "Voronoi partition of a maximal 2R-separated net in the R-offset",
    };
    format!(
        "{case}; {l_prime} cells lower-bound mu_{l_prime} (m cells bound mu_m, direct-sum interlacing; \
         the (l+1)-piece form of the partition bound is not used); mu_k from {source}"
    )
}

/// Builds the partition of `domain` for `R = C·k/(l·√mu_k)`.
///
/// Strip case (`a ≤ 2R`): `⌈2b/R⌉` equal strips across the long side.
/// Net case: Voronoi cells of a maximal `2R`-separated net in the `R`-offset.
/// `chain_ok` is left false; see [`certify`].
pub fn construct_partition(
    domain: &Rectangle,
    k: usize,
    l: usize,
    c: f64,
    mu_k: f64,
    mu_k_source: SpectrumSource,
) -> Result<PartitionCertificate> {
    check_indices(k, l)?;
    if !(mu_k > 0.0 && mu_k.is_finite()) {
        return Err(Error::InvalidArgument(format!("mu_k must be positive, got {mu_k}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    let r = radius(k, l, c, mu_k);
    let (a, b) = (domain.half_width_a, domain.half_width_b);

    let (case_tag, cells, sites, strip_bound, l_prime) = if a <= 2.0 * r {
        let count = strip_count(domain, r);
        let h = 2.0 * b / count as f64;
        let cells = if count <= MAX_STRIP_CELLS {
            (0..count)
                .map(|i| {
                    let y0 = -b + i as f64 * h;
                    let y1 = if i + 1 == count { b } else { -b + (i + 1) as f64 * h };
                    let local = [
                        Point2::new(-a, y0),
                        Point2::new(a, y0),
                        Point2::new(a, y1),
                        Point2::new(-a, y1),
                    ];
                    ConvexPolygon::new(local.iter().map(|&p| domain.to_world(p)).collect())
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let bound = (4.0 * a * a + h * h).sqrt();
        (CaseTag::Strip, cells, Vec::new(), Some(bound), count)
    } else {
        let at_least = net_size_lower_bound(domain, r);
        if at_least > MAX_NET_SITES {
            return Err(Error::PartitionTooLarge {
                at_least,
                limit: MAX_NET_SITES,
            });
        }
        let poly = domain.to_polygon();
        let inner = inner_offset(&poly, r).ok_or(Error::EmptyRegion)?;
        let sites = maximal_separated_net(&inner, 2.0 * r)?;
        let cells = voronoi_partition(&poly, &sites)?.cells;
        let n = cells.len();
        (CaseTag::Net, cells, sites, None, n)
    };

    let cell_diameters: Vec<f64> = cells.iter().map(diameter).collect();
    let max_diam = match (cells.is_empty(), strip_bound) {
        (true, Some(d)) => d,
        _ => cell_diameters.iter().copied().fold(0.0, f64::max),
    };
    Ok(PartitionCertificate {
        domain: *domain,
        k,
        l,
        c,
        mu_k_estimate: mu_k,
        mu_k_source,
        mu_l: None,
        r,
        case_tag,
        cells,
        sites,
        cell_diameters,
        strip_diameter_bound: strip_bound,
        l_prime,
        lower_bound: PI * PI / (max_diam * max_diam),
        chain_ok: false,
        notes: notes_for(case_tag, l_prime, mu_k_source),
    })
}

/// Constructs the certificate from a spectrum of `domain` (values up to index
/// `k`), verifies it against `μ_l` and records the verdict.
pub fn certify(domain: &Rectangle, k: usize, l: usize, c: f64, spectrum: &Spectrum) -> Result<(PartitionCertificate, ChainReport)> {
    check_indices(k, l)?;
    let mu_k = spectrum
        .mu(k)
        .ok_or_else(|| Error::InvalidArgument(format!("spectrum has no index {k}")))?;
    let mu_l = spectrum.mu(l).expect("l ≤ k");
    let mut cert = construct_partition(domain, k, l, c, mu_k, spectrum.source)?;
    cert.mu_l = Some(mu_l);
    let links = certificate_links(&cert, mu_l);
    cert.chain_ok = links.iter().all(|l| l.holds);
    let report = verify_certificate(&cert, mu_l);
    Ok((cert, report))
}

fn spectral_tol(source: SpectrumSource) -> f64 {
    match source {
        SpectrumSource::Fem { .. } => FEM_SPECTRAL_TOL,
        _ => GEOMETRY_TOL,
    }
}

fn intersection_area(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    let (pmin, pmax) = p.bbox();
    let (qmin, qmax) = q.bbox();
    if pmax.x <= qmin.x || qmax.x <= pmin.x || pmax.y <= qmin.y || qmax.y <= pmin.y {
        return 0.0;
    }
    let mut cur = p.clone();
    for (a, b) in q.edges() {
        let e = b - a;
        let normal = Point2::new(e.y, -e.x);
        match clip_halfplane(&cur, normal, normal.dot(a)) {
            Some(next) => cur = next,
            None => return 0.0,
        }
    }
    cur.area()
}

/// Area of `p` not covered by `q`.
fn intersection_gap(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    (p.area() - intersection_area(p, q)).max(0.0)
}

/// Every link except the recorded verdict.
fn certificate_links(cert: &PartitionCertificate, mu_l_reference: f64) -> Vec<ChainLink> {
    let dom = &cert.domain;
    let (a, b) = (dom.half_width_a, dom.half_width_b);
    let area = dom.area();
    let scale = dom.diameter();
    let r_expected = radius(cert.k.max(1), cert.l.max(1), cert.c, cert.mu_k_estimate);
    let diams: Vec<f64> = cert.cells.iter().map(diameter).collect();
    let max_diam = diams.iter().copied().fold(f64::NAN, f64::max);
    let mut links = Vec::new();

    // (i)–(iv)
    links.push(ChainLink::le(LINK_COUNT, cert.l_prime as f64, cert.l as f64));
    links.push(ChainLink::le(LINK_DIAMETER, max_diam, NET_DIAMETER_FACTOR * cert.r));
    if cert.case_tag == CaseTag::Strip {
        let h = 2.0 * b / cert.l_prime.max(1) as f64;
        let bound = (4.0 * a * a + h * h).sqrt();
        links.push(ChainLink::le("max cell diameter <= sqrt(4a^2+h^2)", max_diam, bound));
        links.push(ChainLink::eq(
            "recorded strip diameter bound",
            cert.strip_diameter_bound.unwrap_or(f64::NAN),
            bound,
        ));
    }
    links.push(ChainLink::eq(LINK_PAYNE_WEINBERGER, cert.lower_bound, PI * PI / (max_diam * max_diam)));
    links.push(ChainLink::le(
        LINK_FINAL,
        cert.lower_bound,
        mu_l_reference * (1.0 + spectral_tol(cert.mu_k_source)),
    ));

    // Recorded quantities.
    links.push(ChainLink::eq("R = C k / (l sqrt(mu_k))", cert.r, r_expected));
    if cert.mu_k_source == SpectrumSource::ClosedForm {
        let exact = rectangle_spectrum(a, b, cert.k + 1)
            .ok()
            .and_then(|s| s.mu(cert.k))
            .unwrap_or(f64::NAN);
        links.push(ChainLink::eq("mu_k = closed form", cert.mu_k_estimate, exact));
    }
    links.push(ChainLink::eq(
        "recorded mu_l = reference",
        cert.mu_l.unwrap_or(f64::NAN),
        mu_l_reference,
    ));
    let strip_expected = a <= 2.0 * cert.r;
    links.push(ChainLink::eq(
        "case tag matches a <= 2R",
        (cert.case_tag == CaseTag::Strip) as u8 as f64,
        strip_expected as u8 as f64,
    ));
    links.push(ChainLink::eq("l_prime = number of cells", cert.l_prime as f64, cert.cells.len() as f64));
    let diam_dev = if diams.len() == cert.cell_diameters.len() {
        diams
            .iter()
            .zip(&cert.cell_diameters)
            .map(|(d, r)| ((d - r) / d).abs())
            .fold(0.0, f64::max)
    } else {
        1.0
    };
    links.push(ChainLink::new(
        "recorded cell diameters",
        Relation::Le,
        diam_dev,
        GEOMETRY_TOL,
        1.0,
        0.0,
    ));
    let outside = cert
        .cells
        .iter()
        .flat_map(|c| c.vertices())
        .map(|&v| {
            let q = dom.to_local(v);
            (q.x.abs() - a).max(q.y.abs() - b).max(0.0)
        })
        .fold(0.0, f64::max);
    links.push(ChainLink::new(
        "cells inside domain",
        Relation::Le,
        outside,
        GEOMETRY_TOL * scale,
        1.0,
        0.0,
    ));
    let total: f64 = cert.cells.iter().map(ConvexPolygon::area).sum();
    links.push(ChainLink::eq("cell areas sum to area", total, area));
    let mut overlap = 0.0;
    for i in 0..cert.cells.len() {
        for j in i + 1..cert.cells.len() {
            overlap += intersection_area(&cert.cells[i], &cert.cells[j]);
        }
    }
    links.push(ChainLink::new(
        "pairwise overlap area",
        Relation::Le,
        overlap,
        GEOMETRY_TOL * area,
        1.0,
        0.0,
    ));

    match cert.case_tag {
        CaseTag::Strip => {
            let height = cert
                .cells
                .iter()
                .map(|c| {
                    let ys = c.vertices().iter().map(|&v| dom.to_local(v).y);
                    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
                    hi - lo
                })
                .fold(f64::NAN, f64::max);
            links.push(ChainLink::le("strip heights <= R", height, cert.r));
            links.push(ChainLink::eq("no net points in strip case", cert.sites.len() as f64, 0.0));
        }
        CaseTag::Net => {
            links.push(ChainLink::eq("one net point per cell", cert.sites.len() as f64, cert.cells.len() as f64));
            if cert.sites.len() > 1 {
                let mut min_sep = f64::INFINITY;
                for i in 0..cert.sites.len() {
                    for j in i + 1..cert.sites.len() {
                        min_sep = min_sep.min(cert.sites[i].dist(cert.sites[j]));
                    }
                }
                links.push(ChainLink::le("net points 2R-separated", 2.0 * cert.r, min_sep));
            }
            let depth = cert
                .sites
                .iter()
                .map(|&s| {
                    let q = dom.to_local(s);
                    (a - q.x.abs()).min(b - q.y.abs())
                })
                .fold(f64::INFINITY, f64::min);
            links.push(ChainLink::le("net points in R-offset", cert.r, depth));
            let inside = cert
                .sites
                .iter()
                .zip(&cert.cells)
                .filter(|(s, c)| c.contains_with_tol(**s, GEOMETRY_TOL * scale))
                .count();
            links.push(ChainLink::eq("net point inside its cell", inside as f64, cert.cells.len() as f64));
            let reach = cert
                .sites
                .iter()
                .zip(&cert.cells)
                .flat_map(|(s, c)| c.vertices().iter().map(move |v| v.dist(*s)))
                .fold(f64::NAN, f64::max);
            links.push(ChainLink::le(LINK_BALL, reach, NET_DIAMETER_FACTOR * cert.r));
            let regenerated = voronoi_partition(&dom.to_polygon(), &cert.sites)
                .ok()
                .filter(|v| v.cells.len() == cert.cells.len())
                .map(|v| {
                    v.cells
                        .iter()
                        .zip(&cert.cells)
                        .map(|(a, b)| (a.area() - b.area()).abs() + intersection_gap(a, b))
                        .fold(0.0, f64::max)
                })
                .unwrap_or(f64::INFINITY);
            links.push(ChainLink::new(
                "cells are the Voronoi cells of the net points",
                Relation::Le,
                regenerated,
                GEOMETRY_TOL * area,
                1.0,
                0.0,
            ));
            links.push(ChainLink::eq(
                "no strip bound in net case",
                cert.strip_diameter_bound.is_none() as u8 as f64,
                1.0,
            ));
            links.push(ChainLink::new(
                LINK_PACKING,
                Relation::Le,
                cert.l_prime as f64 * PI * cert.r * cert.r,
                area,
                1.0,
                0.0,
            ));
        }
    }

    let (k, l) = (cert.k as f64, cert.l as f64);
    let closing = PI * PI * l * l * cert.mu_k_estimate
        / (NET_DIAMETER_FACTOR * NET_DIAMETER_FACTOR * cert.c * cert.c * k * k);
    links.push(ChainLink::le(LINK_CLOSING, closing, cert.lower_bound));
    links.push(ChainLink::eq(
        "notes match certificate",
        (cert.notes == notes_for(cert.case_tag, cert.l_prime, cert.mu_k_source)) as u8 as f64,
        1.0,
    ));
    links
}

/// Recomputes every recorded quantity of `cert` and checks the chain
/// `μ_l ≥ μ_{l′} ≥ min μ₁(cell) ≥ π²/max diam²` against `mu_l_reference`.
/// Failures are reported in the links, never returned as errors.
pub fn verify_certificate(cert: &PartitionCertificate, mu_l_reference: f64) -> ChainReport {
    let mut links = certificate_links(cert, mu_l_reference);
    let all = links.iter().all(|l| l.holds);
    links.push(ChainLink::eq(LINK_VERDICT, cert.chain_ok as u8 as f64, all as u8 as f64));
    ChainReport { links, minimal_c: None }
}

/// Non-finite values serialize as `null` and read back as NaN.
mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Archival form of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub tool_version: String,
    pub tolerances: Tolerances,
    pub certificate: PartitionCertificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub geometry_relative: f64,
    pub fem_spectral_relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            geometry_relative: GEOMETRY_TOL,
            fem_spectral_relative: FEM_SPECTRAL_TOL,
        }
    }
}

impl PartitionCertificate {
    pub fn to_document(&self) -> CertificateDocument {
        CertificateDocument {
            tool_version: TOOL_VERSION.to_string(),
            tolerances: Tolerances::default(),
            certificate: self.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    /// Accepts either a bare certificate or a [`CertificateDocument`].
    pub fn from_json(text: &str) -> Result<Self> {
        if let Ok(doc) = serde_json::from_str::<CertificateDocument>(text) {
            return Ok(doc.certificate);
        }
        Ok(serde_json::from_str(text)?)
    }
}

/// Result of [`minimal_constant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantSearch {
    #[serde(rename = "C")]
    pub c: f64,
    pub certificate: PartitionCertificate,
    pub report: ChainReport,
    /// Every `(C, verified)` pair tried, in order.
    pub trials: Vec<(f64, bool)>,
}

/// A maximal `2R`-net of the offset covers it with `2R`-balls (up to the
/// sampling grid), so it has at least `area(Ω′)/(π(2.2R)²)` points.
fn net_size_lower_bound(domain: &Rectangle, r: f64) -> usize {
    let (a, b) = (domain.half_width_a, domain.half_width_b);
    let offset_area = 4.0 * (a - r).max(0.0) * (b - r).max(0.0);
    (offset_area / (PI * (2.2 * r).powi(2))).floor() as usize
}

fn net_surely_too_large(domain: &Rectangle, l: usize, r: f64) -> bool {
    domain.half_width_a > 2.0 * r && net_size_lower_bound(domain, r) > l
}

/// Smallest `C ∈ [1/4, 2¹⁴]`, to within a factor 1.05, whose certificate on
/// `domain` verifies with closed-form spectra. Doubling from 1/4 finds the
/// first verified value, then log-bisection against the last failure.
/// Verification need not be monotone in `C`; the smallest verified value seen
/// is returned.
pub fn minimal_constant(domain: &Rectangle, k: usize, l: usize) -> Result<ConstantSearch> {
    check_indices(k, l)?;
    let spectrum = rectangle_spectrum(domain.half_width_a, domain.half_width_b, k + 1)?;
    let mu_k = spectrum.values[k];
    let mut trials = Vec::new();
    let attempt = |c: f64, trials: &mut Vec<(f64, bool)>| -> Result<Option<(PartitionCertificate, ChainReport)>> {
        if net_surely_too_large(domain, l, radius(k, l, c, mu_k)) {
            trials.push((c, false));
            return Ok(None);
        }
        let (cert, report) = certify(domain, k, l, c, &spectrum)?;
        let ok = report.ok();
        trials.push((c, ok));
        Ok(ok.then_some((cert, report)))
    };

    let mut lo = None;
    let mut c = C_MIN;
    let (mut hi, mut best) = loop {
        if let Some(found) = attempt(c, &mut trials)? {
            break (c, found);
        }
        lo = Some(c);
        c *= 2.0;
        if c > C_MAX {
            return Err(Error::NoVerifiedConstant { lo: C_MIN, hi: C_MAX });
        }
    };
    if let Some(mut lo) = lo {
        while hi / lo > C_RESOLUTION {
            let mid = (lo * hi).sqrt();
            match attempt(mid, &mut trials)? {
                Some(found) => {
                    hi = mid;
                    best = found;
                }
                None => lo = mid,
            }
        }
    }
    let (certificate, mut report) = best;
    report.minimal_c = Some(hi);
    Ok(ConstantSearch {
        c: hi,
        certificate,
        report,
        trials,
    })
}

/// Closed form for rectangles, finite elements at `levels` otherwise.
pub fn domain_spectrum(poly: &ConvexPolygon, count: usize, levels: usize) -> Result<Spectrum> {
    match Rectangle::from_polygon(poly) {
        Some(r) => rectangle_spectrum(r.half_width_a, r.half_width_b, count),
        None => neumann_spectrum(poly, count, levels),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub k: usize,
    pub l: usize,
    /// `(μ_k/μ_l)·(l/k)²`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub source: SpectrumSource,
    pub spectrum: Spectrum,
    pub entries: Vec<SweepEntry>,
    pub max_constant: f64,
    pub argmax: (usize, usize),
}

/// Table of `(μ_k/μ_l)(l/k)²` for `1 ≤ l ≤ k ≤ k_max` from one spectrum.
pub fn main_theorem_sweep(poly: &ConvexPolygon, k_max: usize, levels: usize) -> Result<SweepTable> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be ≥ 1".into()));
    }
    let spectrum = domain_spectrum(poly, k_max + 1, levels)?;
    Ok(sweep_from_spectrum(spectrum, k_max))
}

pub fn sweep_from_spectrum(spectrum: Spectrum, k_max: usize) -> SweepTable {
    let mut entries = Vec::with_capacity(k_max * (k_max + 1) / 2);
    let (mut max_constant, mut argmax) = (f64::NEG_INFINITY, (1, 1));
    for k in 1..=k_max {
        for l in 1..=k {
            let ratio = if k == l {
                1.0
            } else {
                spectrum.values[k] / spectrum.values[l] * (l as f64 / k as f64).powi(2)
            };
            if ratio > max_constant {
                max_constant = ratio;
                argmax = (k, l);
            }
            entries.push(SweepEntry { k, l, ratio });
        }
    }
    SweepTable {
        source: spectrum.source,
        spectrum,
        entries,
        max_constant,
        argmax,
    }
}

/// One row of the rectangle-vs-torus comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusRow {
    pub index: usize,
    pub rectangle_mu: f64,
    pub torus_lambda: f64,
    pub equal: bool,
    /// Multiplicities of `rectangle_mu` in the rectangle and torus lists.
    pub rectangle_multiplicity: usize,
    pub torus_multiplicity: usize,
    /// First torus index carrying the value `rectangle_mu`, if within range.
    pub torus_index_of_value: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakChainReport {
    pub k: usize,
    pub n: usize,
    pub source: SpectrumSource,
    pub inner: Rectangle,
    pub outer: Rectangle,
    pub dilation_factor: f64,
    pub chain: ChainReport,
    pub torus_table: Vec<TorusRow>,
    pub multiplicity_discrepancy: bool,
    /// `μ_{k+1}(Ω)/μ_k(Ω)`.
    pub consecutive_ratio: f64,
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= GEOMETRY_TOL * x.abs().max(y.abs()).max(1.0)
}

fn multiplicity(values: &[f64], v: f64) -> usize {
    values.iter().filter(|&&x| close(x, v)).count()
}

/// [`weak_chain_report_with`] at the default threshold.
pub fn weak_chain_report(poly: &ConvexPolygon, k: usize, levels: usize) -> Result<WeakChainReport> {
    weak_chain_report_with(poly, k, levels, DEFAULT_RATIO_THRESHOLD)
}

/// Measures each comparison of the reduction from `Ω` to its sandwich
/// rectangles at `n = 2`: `inner ⊆ Ω ⊆ outer = t·inner`.
///
/// `≲` links hold when the measured constant is at most `threshold`.
pub fn weak_chain_report_with(poly: &ConvexPolygon, k: usize, levels: usize, threshold: f64) -> Result<WeakChainReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be ≥ 1".into()));
    }
    let omega = domain_spectrum(poly, k + 2, levels)?;
    weak_chain_from_spectrum(poly, &omega, k, threshold)
}

/// [`weak_chain_report_with`] on a precomputed spectrum of `poly` holding at
/// least `k + 2` values.
pub fn weak_chain_from_spectrum(poly: &ConvexPolygon, omega: &Spectrum, k: usize, threshold: f64) -> Result<WeakChainReport> {
    if k == 0 || omega.len() < k + 2 {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ k and k + 2 ≤ {} spectrum values (k = {k})",
            omega.len()
        )));
    }
    let n = 2usize;
    let n2 = (n * n) as f64;
    let sandwich = rectangle_sandwich(poly)?;
    let (inner, outer, t) = (sandwich.inner, sandwich.outer, sandwich.dilation_factor);
    let inner_mu = rectangle_spectrum(inner.half_width_a, inner.half_width_b, k + 2)?.values;
    let outer_mu = rectangle_spectrum(outer.half_width_a, outer.half_width_b, k + 2)?.values;
    let torus_count = 8 * (k + 2) + 16;
    let torus = torus_spectrum(outer.half_width_a, outer.half_width_b, torus_count)?.values;
    let (mu_k, mu_k1) = (omega.values[k], omega.values[k + 1]);

    let lesssim = |name: String, lhs: f64, rhs: f64| ChainLink::new(name, Relation::Lesssim, lhs, rhs, threshold, GEOMETRY_TOL);
    let links = vec![
        ChainLink::eq("sandwich: inner in domain in outer", sandwich.check(poly) as u8 as f64, 1.0),
        lesssim(
            format!("mu_{}(domain) <~ n^2 mu_{}(inner)", k + 1, k + 1),
            mu_k1,
            n2 * inner_mu[k + 1],
        ),
        ChainLink::eq(
            format!("mu_{}(inner) = t^2 mu_{}(outer)", k + 1, k + 1),
            inner_mu[k + 1],
            t * t * outer_mu[k + 1],
        ),
        lesssim(format!("mu_{}(outer) <~ mu_{}(outer)", k + 1, k), outer_mu[k + 1], outer_mu[k]),
        lesssim(format!("lambda_{}(torus) <~ lambda_{}(torus)", k + 1, k), torus[k + 1], torus[k]),
        lesssim(format!("mu_{}(outer) <~ n^2 mu_{}(domain)", k, k), outer_mu[k], n2 * mu_k),
        lesssim(format!("mu_{}(domain) <~ mu_{}(domain)", k + 1, k), mu_k1, mu_k),
    ];

    let torus_table: Vec<TorusRow> = (0..=k + 1)
        .map(|i| {
            let v = outer_mu[i];
            TorusRow {
                index: i,
                rectangle_mu: v,
                torus_lambda: torus[i],
                equal: close(v, torus[i]),
                rectangle_multiplicity: multiplicity(&outer_mu, v),
                torus_multiplicity: multiplicity(&torus, v),
                torus_index_of_value: torus.iter().position(|&x| close(x, v)),
            }
        })
        .collect();
    let multiplicity_discrepancy = torus_table
        .iter()
        .any(|r| !r.equal || r.rectangle_multiplicity != r.torus_multiplicity);

    Ok(WeakChainReport {
        k,
        n,
        source: omega.source,
        inner,
        outer,
        dilation_factor: t,
        chain: ChainReport { links, minimal_c: None },
        torus_table,
        multiplicity_discrepancy,
        consecutive_ratio: mu_k1 / mu_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI2: f64 = PI * PI;

    fn unit_square() -> Rectangle {
        Rectangle::centered(0.5, 0.5).unwrap()
    }

    fn closed(r: &Rectangle, count: usize) -> Spectrum {
        rectangle_spectrum(r.half_width_a, r.half_width_b, count).unwrap()
    }

    #[test]
    fn square_k4_l2_single_strip() {
        let sq = unit_square();
        let s = closed(&sq, 5);
        assert!((s.values[4] - 4.0 * PI2).abs() < 1e-12);
        let (cert, report) = certify(&sq, 4, 2, 4.0, &s).unwrap();
        assert!((cert.r - 4.0 / PI).abs() < 1e-12);
        assert_eq!(cert.case_tag, CaseTag::Strip);
        assert_eq!(cert.l_prime, 1);
        assert!(cert.chain_ok, "{:?}", report.failures());
        assert!(report.ok());
    }

    #[test]
    fn long_rectangle_strips() {
        let r = Rectangle::centered(0.1, 10.0).unwrap();
        let s = closed(&r, 7);
        let search = minimal_constant(&r, 6, 3).unwrap();
        assert_eq!(search.certificate.case_tag, CaseTag::Strip);
        assert!(search.certificate.l_prime <= 3);
        let c = search.c;
        let (cert, _) = certify(&r, 6, 3, c, &s).unwrap();
        for cell in &cert.cells {
            let ys: Vec<f64> = cell.vertices().iter().map(|&v| r.to_local(v).y).collect();
            let h = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
            assert!(h <= cert.r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn single_cell_verification() {
        let sq = unit_square();
        let s = closed(&sq, 2);
        let (cert, report) = certify(&sq, 1, 1, 10.0, &s).unwrap();
        assert_eq!(cert.l_prime, 1);
        assert!((cert.lower_bound - PI2 / 2.0).abs() < 1e-12);
        let fin = report.link(LINK_FINAL).unwrap();
        assert!(fin.holds && (fin.rhs - PI2).abs() < 1e-6);
    }

    #[test]
    fn two_strips() {
        let sq = unit_square();
        let s = closed(&sq, 3);
        // R = C·2/(2π) = 1/2 at C = π/2.
        let (cert, report) = certify(&sq, 2, 2, PI / 2.0, &s).unwrap();
        assert_eq!((cert.case_tag, cert.l_prime), (CaseTag::Strip, 2));
        assert!((cert.lower_bound - PI2 / 1.25).abs() < 1e-12);
        assert!(report.link(LINK_FINAL).unwrap().holds);
        // √1.25 < (2+√2)/2, so the net diameter link holds too.
        assert!(report.ok(), "{:?}", report.failures());
    }

    #[test]
    fn corrupted_diameter_detected() {
        let sq = unit_square();
        let s = closed(&sq, 3);
        let (mut cert, report) = certify(&sq, 2, 2, PI / 2.0, &s).unwrap();
        assert!(report.ok());
        cert.cell_diameters[0] = 1.01 * NET_DIAMETER_FACTOR * cert.r;
        let bad = verify_certificate(&cert, s.values[2]);
        assert!(!bad.ok());
        assert!(!bad.link("recorded cell diameters").unwrap().holds);
    }

    #[test]
    fn net_case_certificate() {
        let r = Rectangle::centered(2.0, 3.0).unwrap();
        let s = closed(&r, 13);
        let mu_k = s.values[12];
        // R small enough for the Net case: a = 2 > 2R.
        let c = 0.6 * 4.0 * mu_k.sqrt() / 12.0;
        let (cert, report) = certify(&r, 12, 4, c, &s).unwrap();
        assert_eq!(cert.case_tag, CaseTag::Net);
        assert!(cert.l_prime >= 1);
        let pack = report.link(LINK_PACKING).unwrap();
        assert!(pack.holds && pack.lhs <= pack.rhs);
        assert!(report.link("cell areas sum to area").unwrap().holds);
        assert!(report.link("pairwise overlap area").unwrap().holds);
        assert!(report.link(LINK_BALL).unwrap().holds, "{:?}", report.link(LINK_BALL));
        assert!(report.link(LINK_DIAMETER).is_some());
    }

    #[test]
    fn json_roundtrip() {
        let sq = unit_square();
        let s = closed(&sq, 5);
        let (cert, _) = certify(&sq, 4, 2, 4.0, &s).unwrap();
        let text = cert.to_json().unwrap();
        assert!(text.contains("\"C\"") && text.contains("\"R\"") && text.contains("tool_version"));
        let back = PartitionCertificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&back, s.values[2]).ok());
    }

    #[test]
    fn minimal_constant_square() {
        let sq = unit_square();
        let search = minimal_constant(&sq, 2, 1).unwrap();
        assert!(search.c >= C_MIN && search.c <= C_MAX);
        assert!(search.report.ok());
        let s = closed(&sq, 3);
        let (_, above) = certify(&sq, 2, 1, 1.05 * search.c, &s).unwrap();
        // Reported only; monotonicity in C is not guaranteed.
        let _ = above.ok();
        let k_eq_l = minimal_constant(&sq, 3, 3).unwrap();
        assert!(k_eq_l.c.is_finite());
        assert!(minimal_constant(&sq, 1, 2).is_err());
    }

    #[test]
    fn sweep_examples() {
        let sq = ConvexPolygon::axis_box(-0.5, 0.5, -0.5, 0.5).unwrap();
        let t = main_theorem_sweep(&sq, 10, 0).unwrap();
        let e21 = t.entries.iter().find(|e| (e.k, e.l) == (2, 1)).unwrap();
        assert!((e21.ratio - 0.25).abs() < 1e-12);
        assert!(t.entries.iter().filter(|e| e.k == e.l).all(|e| e.ratio == 1.0));
        assert_eq!(t.source, SpectrumSource::ClosedForm);
        let four = ConvexPolygon::axis_box(0.0, 4.0, 0.0, 1.0).unwrap();
        assert!(main_theorem_sweep(&four, 12, 0).unwrap().max_constant.is_finite());
        let one = main_theorem_sweep(&sq, 1, 0).unwrap();
        assert_eq!(one.entries, vec![SweepEntry { k: 1, l: 1, ratio: 1.0 }]);
    }

    #[test]
    fn weak_chain_on_square() {
        let sq = ConvexPolygon::axis_box(-0.5, 0.5, -0.5, 0.5).unwrap();
        let r1 = weak_chain_report(&sq, 1, 0).unwrap();
        assert!((r1.consecutive_ratio - 1.0).abs() < 1e-12);
        let r2 = weak_chain_report(&sq, 2, 0).unwrap();
        assert!((r2.consecutive_ratio - 2.0).abs() < 1e-12);
        assert!(r2.multiplicity_discrepancy);
        assert!(r2.chain.links.iter().all(|l| l.ratio.is_some()));
        let scaling = r2.chain.links.iter().find(|l| l.relation == Relation::Eq).unwrap();
        assert!(scaling.holds);
    }

    #[test]
    fn weak_chain_on_hexagon() {
        let hex = ConvexPolygon::regular(6, Point2::default(), 1.0, 0.0).unwrap();
        let r = weak_chain_report(&hex, 3, 5).unwrap();
        assert!(matches!(r.source, SpectrumSource::Fem { level: 5 }));
        assert!(r.chain.links.iter().all(|l| l.ratio.is_some()));
        assert!(r.consecutive_ratio <= DEFAULT_RATIO_THRESHOLD);
    }
}
