//! GeoJSON, WKT and CSV output.
//!
//! Ring orientation is written exactly as produced. Coordinates use the
//! shortest representation that round-trips; integral values are written
//! without a fractional part.

use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

use crate::bench::TimingRecord;
use crate::rings::{PolygonSet, WorldRing};

#[derive(Debug, Error, PartialEq)]
pub enum GeoIoError {
    #[error("ring {index} is not closed")]
    OpenRing { index: usize },
    #[error("ring {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Clone, Copy)]
struct Coord(f64);

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        const EXACT: f64 = 9_007_199_254_740_992.0;
        if self.0.fract() == 0.0 && self.0.abs() < EXACT {
            s.serialize_i64(self.0 as i64)
        } else {
            s.serialize_f64(self.0)
        }
    }
}

struct Positions<'a>(&'a [[f64; 2]]);

impl Serialize for Positions<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for &[x, y] in self.0 {
            seq.serialize_element(&[Coord(x), Coord(y)])?;
        }
        seq.end()
    }
}

#[derive(serde::Serialize)]
#[serde(tag = "type", content = "coordinates")]
enum Geometry<'a> {
    Polygon(Vec<Positions<'a>>),
    LineString(Positions<'a>),
}

#[derive(serde::Serialize)]
struct Feature<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    geometry: Geometry<'a>,
    properties: serde_json::Map<String, serde_json::Value>,
}

#[derive(serde::Serialize)]
struct NamedCrs<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    properties: CrsName<'a>,
}

#[derive(serde::Serialize)]
struct CrsName<'a> {
    name: &'a str,
}

#[derive(serde::Serialize)]
struct FeatureCollection<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    crs: Option<NamedCrs<'a>>,
    features: Vec<Feature<'a>>,
}

fn check_ring(ring: &WorldRing, index: usize) -> Result<(), GeoIoError> {
    if !ring.is_closed() {
        return Err(GeoIoError::OpenRing { index });
    }
    if ring.coords.iter().flatten().any(|v| !v.is_finite()) {
        return Err(GeoIoError::NonFinite { index });
    }
    Ok(())
}

fn collection<'a>(features: Vec<Feature<'a>>, crs: Option<&'a str>) -> String {
    let fc = FeatureCollection {
        kind: "FeatureCollection",
        crs: crs.map(|name| NamedCrs {
            kind: "name",
            properties: CrsName { name },
        }),
        features,
    };
    serde_json::to_string(&fc).expect("finite coordinates always serialize")
}

fn feature(geometry: Geometry<'_>) -> Feature<'_> {
    Feature {
        kind: "Feature",
        geometry,
        properties: serde_json::Map::new(),
    }
}

/// A FeatureCollection with one Polygon feature per polygon, exterior first.
///
/// `crs`, when given, is attached as a named-CRS foreign member.
pub fn write_geojson_polygons(
    polygons: &PolygonSet<WorldRing>,
    crs: Option<&str>,
) -> Result<String, GeoIoError> {
    let mut features = Vec::with_capacity(polygons.len());
    let mut index = 0;
    for polygon in &polygons.polygons {
        let mut rings = Vec::with_capacity(1 + polygon.holes.len());
        for ring in std::iter::once(&polygon.outer).chain(&polygon.holes) {
            check_ring(ring, index)?;
            index += 1;
            rings.push(Positions(&ring.coords));
        }
        features.push(feature(Geometry::Polygon(rings)));
    }
    Ok(collection(features, crs))
}

/// A FeatureCollection with one LineString feature per ring.
pub fn write_geojson_rings(rings: &[WorldRing], crs: Option<&str>) -> Result<String, GeoIoError> {
    let mut features = Vec::with_capacity(rings.len());
    for (index, ring) in rings.iter().enumerate() {
        check_ring(ring, index)?;
        features.push(feature(Geometry::LineString(Positions(&ring.coords))));
    }
    Ok(collection(features, crs))
}

fn wkt_number(v: f64) -> String {
    // Display is already shortest round-trip; only negative zero needs care.
    if v == 0.0 {
        "0".to_string()
    } else {
        v.to_string()
    }
}

fn wkt_ring(out: &mut String, ring: &WorldRing) {
    out.push('(');
    for (i, [x, y]) in ring.coords.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&wkt_number(*x));
        out.push(' ');
        out.push_str(&wkt_number(*y));
    }
    out.push(')');
}

/// `POLYGON` for a single polygon, otherwise `MULTIPOLYGON`.
pub fn write_wkt(polygons: &PolygonSet<WorldRing>) -> Result<String, GeoIoError> {
    let mut index = 0;
    let mut bodies = Vec::with_capacity(polygons.len());
    for polygon in &polygons.polygons {
        let mut body = String::from("(");
        for (i, ring) in std::iter::once(&polygon.outer)
            .chain(&polygon.holes)
            .enumerate()
        {
            check_ring(ring, index)?;
            index += 1;
            if i > 0 {
                body.push_str(", ");
            }
            wkt_ring(&mut body, ring);
        }
        body.push(')');
        bodies.push(body);
    }
    Ok(match bodies.len() {
        0 => "MULTIPOLYGON EMPTY".to_string(),
        1 => format!("POLYGON {}", bodies[0]),
        _ => format!("MULTIPOLYGON ({})", bodies.join(", ")),
    })
}

/// `size,p,trials,mean_seconds,stddev_seconds`, one row per record. Numbers
/// use the shortest round-trip decimal form.
pub fn write_timing_csv(records: &[TimingRecord]) -> Result<String, GeoIoError> {
    let csv_err = |e: csv::Error| GeoIoError::Csv(e.to_string());
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["size", "p", "trials", "mean_seconds", "stddev_seconds"])
        .map_err(csv_err)?;
    for r in records {
        writer
            .write_record([
                r.size.to_string(),
                r.p.to_string(),
                r.trials.to_string(),
                r.mean_seconds.to_string(),
                r.stddev_seconds.to_string(),
            ])
            .map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| GeoIoError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
