//! Brute-force oracles for checking delineation output.
//!
//! These work directly from pixel sides and ray crossings and share no code
//! with the scan, so agreement is meaningful.

use std::collections::BTreeSet;

use crate::raster::BitRaster;
use crate::rings::GridRing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    /// `(x, y)` to `(x + 1, y)`.
    Horizontal,
    /// `(x, y)` to `(x, y + 1)`.
    Vertical,
}

/// Undirected unit segment on the corner grid, keyed by its lower endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitEdge {
    pub x: u32,
    pub y: u32,
    pub axis: Axis,
}

impl UnitEdge {
    pub fn horizontal(x: u32, y: u32) -> Self {
        Self {
            x,
            y,
            axis: Axis::Horizontal,
        }
    }

    pub fn vertical(x: u32, y: u32) -> Self {
        Self {
            x,
            y,
            axis: Axis::Vertical,
        }
    }
}

pub type BoundaryEdgeSet = BTreeSet<UnitEdge>;

/// Every pixel side separating a marked pixel from an unmarked or
/// out-of-bounds one.
pub fn boundary_edges(raster: &BitRaster) -> BoundaryEdgeSet {
    let mut edges = BoundaryEdgeSet::new();
    for y in 0..raster.height() {
        for x in 0..raster.width() {
            let (xi, yi) = (i64::from(x), i64::from(y));
            if !raster.get(xi, yi) {
                continue;
            }
            if !raster.get(xi, yi - 1) {
                edges.insert(UnitEdge::horizontal(x, y));
            }
            if !raster.get(xi, yi + 1) {
                edges.insert(UnitEdge::horizontal(x, y + 1));
            }
            if !raster.get(xi - 1, yi) {
                edges.insert(UnitEdge::vertical(x, y));
            }
            if !raster.get(xi + 1, yi) {
                edges.insert(UnitEdge::vertical(x + 1, y));
            }
        }
    }
    edges
}

/// Splits every ring segment into unit edges, keeping duplicates.
///
/// Panics on a diagonal segment.
pub fn ring_unit_edges(rings: &[GridRing]) -> Vec<UnitEdge> {
    let mut out = Vec::new();
    for ring in rings {
        for w in ring.coords.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.y == b.y {
                out.extend((a.x.min(b.x)..a.x.max(b.x)).map(|x| UnitEdge::horizontal(x, a.y)));
            } else if a.x == b.x {
                out.extend((a.y.min(b.y)..a.y.max(b.y)).map(|y| UnitEdge::vertical(a.x, y)));
            } else {
                panic!("diagonal segment {a:?} -> {b:?}");
            }
        }
    }
    out
}

/// Unit edges of all rings as a set, or the first edge that appears twice.
pub fn ring_edge_set(rings: &[GridRing]) -> Result<BoundaryEdgeSet, UnitEdge> {
    let mut set = BoundaryEdgeSet::new();
    for edge in ring_unit_edges(rings) {
        if !set.insert(edge) {
            return Err(edge);
        }
    }
    Ok(set)
}

/// Marks pixel `(x, y)` when a +x ray from its center crosses the ring
/// edges an odd number of times.
///
/// Ray ordinates are half-integers and vertices are integers, so a ray never
/// touches a vertex.
pub fn rasterize_even_odd(rings: &[GridRing], width: u32, height: u32) -> BitRaster {
    let (w, h) = (width as usize, height as usize);
    // crossings[row][x]: vertical edges at column x (clamped to w) spanning row.
    let mut crossings = vec![vec![0u32; w + 1]; h];
    for ring in rings {
        for seg in ring.coords.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if a.x != b.x {
                continue;
            }
            let col = (a.x as usize).min(w);
            for row in a.y.min(b.y)..a.y.max(b.y) {
                if let Some(r) = crossings.get_mut(row as usize) {
                    r[col] += 1;
                }
            }
        }
    }
    let mut raster = BitRaster::new(width, height);
    for (y, row) in crossings.iter().enumerate() {
        // Edges at column >= x + 1 lie right of the center x + 0.5.
        let mut right = 0u32;
        for x in (0..w).rev() {
            right += row[x + 1];
            if right % 2 == 1 {
                raster.set(x as u32, y as u32, true);
            }
        }
    }
    raster
}
