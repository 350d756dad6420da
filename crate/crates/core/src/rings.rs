//! Ring formation and polygon assembly.
//!
//! Orientation is expressed through the shoelace signed area computed on grid
//! coordinates with `y` pointing down. Outer rings come out negative and holes
//! positive. Under a north-up transform (negative `e`) the y axis flips, so
//! outer rings are counterclockwise in lon/lat.

use std::collections::HashMap;

use thiserror::Error;

use crate::delineate::DelineationResult;
use crate::transform::AffineTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub x: u32,
    pub y: u32,
}

impl GridPoint {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

impl From<(u32, u32)> for GridPoint {
    fn from((x, y): (u32, u32)) -> Self {
        Self { x, y }
    }
}

/// Closed ring of grid corners; the first point is repeated at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridRing {
    pub coords: Vec<GridPoint>,
}

impl GridRing {
    pub fn new(coords: Vec<GridPoint>) -> Self {
        Self { coords }
    }

    pub fn is_closed(&self) -> bool {
        !self.coords.is_empty() && self.coords.first() == self.coords.last()
    }

    /// Twice the shoelace signed area, exact.
    pub fn twice_signed_area(&self) -> i64 {
        self.coords
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                i64::from(a.x) * i64::from(b.y) - i64::from(b.x) * i64::from(a.y)
            })
            .sum()
    }

    /// Shoelace signed area over grid coordinates (y down).
    pub fn signed_area(&self) -> f64 {
        self.twice_signed_area() as f64 / 2.0
    }

    pub fn to_world(&self, transform: &AffineTransform) -> WorldRing {
        WorldRing {
            coords: self
                .coords
                .iter()
                .map(|p| transform.apply(f64::from(p.x), f64::from(p.y)))
                .collect(),
        }
    }

    /// Drops vertices lying strictly inside a straight run, including the
    /// closing vertex when the start sits mid-run.
    pub fn collapse_collinear(&self) -> GridRing {
        if !self.is_closed() || self.coords.len() < 4 {
            return self.clone();
        }
        let open = &self.coords[..self.coords.len() - 1];
        let n = open.len();
        let collinear = |prev: GridPoint, cur: GridPoint, next: GridPoint| {
            (prev.x == cur.x && cur.x == next.x) || (prev.y == cur.y && cur.y == next.y)
        };
        let mut kept: Vec<GridPoint> = (0..n)
            .filter(|&i| !collinear(open[(i + n - 1) % n], open[i], open[(i + 1) % n]))
            .map(|i| open[i])
            .collect();
        if kept.is_empty() {
            return self.clone();
        }
        kept.push(kept[0]);
        GridRing { coords: kept }
    }
}

/// Closed ring of `[lon, lat]` positions.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldRing {
    pub coords: Vec<[f64; 2]>,
}

impl WorldRing {
    pub fn is_closed(&self) -> bool {
        !self.coords.is_empty() && self.coords.first() == self.coords.last()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RingOptions {
    /// Merge runs of collinear vertices. Geometry is unchanged.
    pub collapse_collinear: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Rings {
    pub grid: Vec<GridRing>,
    pub world: Vec<WorldRing>,
}

/// Walks every unvisited start corner's list once and emits its ring, in
/// start-corner order.
///
/// Vertices are marked visited, so calling this twice on the same result
/// yields no rings the second time.
pub fn form_rings(result: &mut DelineationResult, transform: &AffineTransform) -> Rings {
    form_rings_with(result, transform, RingOptions::default())
}

pub fn form_rings_with(
    result: &mut DelineationResult,
    transform: &AffineTransform,
    options: RingOptions,
) -> Rings {
    let mut rings = Rings::default();
    form_rings_into(result, transform, options, &mut rings);
    rings
}

/// Like [`form_rings_with`], but replaces the contents of `rings`, reusing
/// its outer allocations.
pub fn form_rings_into(
    result: &mut DelineationResult,
    transform: &AffineTransform,
    options: RingOptions,
    rings: &mut Rings,
) {
    rings.grid.clear();
    rings.world.clear();
    // Rings are walked into one scratch buffer and copied out at their exact
    // length, so each ring costs two allocations however long it is.
    let mut scratch = Vec::new();
    let limit = result.vertex_count();
    for i in 0..result.corners().len() {
        let corner = result.corners()[i];
        if result.vertex(corner).visited {
            continue;
        }
        scratch.clear();
        let mut p = corner;
        loop {
            let v = result.vertex_mut(p);
            scratch.push(GridPoint::new(v.x, v.y));
            v.visited = true;
            p = v.next.expect("vertex without successor in a closed list");
            if p == corner {
                break;
            }
            assert!(
                scratch.len() <= limit,
                "ring from corner {corner:?} did not close within {limit} steps"
            );
        }
        scratch.push(scratch[0]);
        let mut ring = GridRing {
            coords: scratch.clone(),
        };
        if options.collapse_collinear {
            ring = ring.collapse_collinear();
        }
        rings.world.push(ring.to_world(transform));
        rings.grid.push(ring);
    }
}

pub fn signed_area(ring: &GridRing) -> f64 {
    ring.signed_area()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<R> {
    pub outer: R,
    pub holes: Vec<R>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSet<R> {
    pub polygons: Vec<Polygon<R>>,
}

impl<R> Default for PolygonSet<R> {
    fn default() -> Self {
        Self {
            polygons: Vec::new(),
        }
    }
}

impl<R> PolygonSet<R> {
    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }
}

impl PolygonSet<GridRing> {
    pub fn to_world(&self, transform: &AffineTransform) -> PolygonSet<WorldRing> {
        PolygonSet {
            polygons: self
                .polygons
                .iter()
                .map(|p| Polygon {
                    outer: p.outer.to_world(transform),
                    holes: p.holes.iter().map(|h| h.to_world(transform)).collect(),
                })
                .collect(),
        }
    }

    /// Every ring as its own polygon with no holes, orientation untouched.
    pub fn from_rings(rings: &[GridRing]) -> Self {
        PolygonSet {
            polygons: rings
                .iter()
                .map(|r| Polygon {
                    outer: r.clone(),
                    holes: vec![],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("hole ring {index} is not contained in any outer ring: {ring:?}")]
    OrphanHole { index: usize, ring: GridRing },
    #[error("ring {index} is open or has zero area")]
    InvalidRing { index: usize },
}

/// Groups rings into polygons. Negative-area rings become exteriors in input
/// order; each positive-area ring is attached to the smallest exterior that
/// contains a point a quarter unit inside the hole, next to its first edge.
pub fn assemble_polygons(rings: &[GridRing]) -> Result<PolygonSet<GridRing>, TopologyError> {
    let mut polygon_of_ring = HashMap::new();
    let mut set = PolygonSet::default();
    let mut holes = Vec::new();
    for (i, ring) in rings.iter().enumerate() {
        let area = ring.twice_signed_area();
        if !ring.is_closed() || ring.coords.len() < 4 || area == 0 {
            return Err(TopologyError::InvalidRing { index: i });
        }
        if area < 0 {
            polygon_of_ring.insert(i, set.polygons.len());
            set.polygons.push(Polygon {
                outer: ring.clone(),
                holes: vec![],
            });
        } else {
            holes.push(i);
        }
    }
    if holes.is_empty() {
        return Ok(set);
    }

    let index = CrossingIndex::new(rings, |i| polygon_of_ring.contains_key(&i));
    for i in holes {
        let ring = &rings[i];
        let (qx, qy) = inward_test_point(ring);
        let parent = index
            .containing(qx, qy)
            .into_iter()
            .min_by_key(|&r| (-rings[r].twice_signed_area(), r));
        match parent {
            Some(r) => set.polygons[polygon_of_ring[&r]].holes.push(ring.clone()),
            None => {
                return Err(TopologyError::OrphanHole {
                    index: i,
                    ring: ring.clone(),
                })
            }
        }
    }
    Ok(set)
}

/// Point a quarter unit off the middle of the ring's first unit edge, on
/// the side enclosed by the ring. Coordinates are in quarter units.
fn inward_test_point(ring: &GridRing) -> (i64, i64) {
    let (a, b) = (ring.coords[0], ring.coords[1]);
    let dx = (i64::from(b.x) - i64::from(a.x)).signum();
    let dy = (i64::from(b.y) - i64::from(a.y)).signum();
    let (mx, my) = (4 * i64::from(a.x) + 2 * dx, 4 * i64::from(a.y) + 2 * dy);
    // With y down, a negative-area ring encloses the side (dy, -dx).
    let side = if ring.twice_signed_area() < 0 { 1 } else { -1 };
    (mx + side * dy, my - side * dx)
}

/// Vertical ring edges bucketed by pixel row, for +x ray casting.
struct CrossingIndex {
    rows: Vec<Vec<(u32, usize)>>,
}

impl CrossingIndex {
    fn new(rings: &[GridRing], include: impl Fn(usize) -> bool) -> Self {
        let height = rings
            .iter()
            .flat_map(|r| r.coords.iter().map(|p| p.y as usize))
            .max()
            .unwrap_or(0);
        let mut rows = vec![Vec::new(); height];
        for (i, ring) in rings.iter().enumerate().filter(|(i, _)| include(*i)) {
            for w in ring.coords.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a.x == b.x {
                    for y in a.y.min(b.y)..a.y.max(b.y) {
                        rows[y as usize].push((a.x, i));
                    }
                }
            }
        }
        Self { rows }
    }

    /// Rings whose boundary a +x ray from the quarter-unit point `(qx, qy)`
    /// crosses an odd number of times. `qy` must not be a multiple of 4.
    fn containing(&self, qx: i64, qy: i64) -> Vec<usize> {
        debug_assert!(qy % 4 != 0);
        let row = qy.div_euclid(4);
        let Some(edges) = usize::try_from(row).ok().and_then(|r| self.rows.get(r)) else {
            return vec![];
        };
        let mut parity: HashMap<usize, bool> = HashMap::new();
        for &(x, ring) in edges {
            if 4 * i64::from(x) > qx {
                *parity.entry(ring).or_default() ^= true;
            }
        }
        parity
            .into_iter()
            .filter(|&(_, odd)| odd)
            .map(|(r, _)| r)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delineate::detect;
    use crate::raster::BitRaster;

    fn ring(points: &[(u32, u32)]) -> GridRing {
        GridRing::new(points.iter().copied().map(GridPoint::from).collect())
    }

    fn grid_rings(raster: &BitRaster) -> Vec<GridRing> {
        form_rings(&mut detect(raster), &AffineTransform::IDENTITY).grid
    }

    #[test]
    fn single_pixel_ring() {
        let rings = grid_rings(&BitRaster::from_bits(1, 1, &[true]));
        assert_eq!(rings, vec![ring(&[(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)])]);
        assert_eq!(rings[0].signed_area(), -1.0);
    }

    #[test]
    fn empty_input() {
        assert!(grid_rings(&BitRaster::new(3, 3)).is_empty());
    }

    #[test]
    fn diagonal_rings_share_corner() {
        let rings = grid_rings(&BitRaster::from_bits(2, 2, &[true, false, false, true]));
        assert_eq!(rings.len(), 2);
        for r in &rings {
            assert_eq!(r.coords.len(), 5);
            assert!(r.coords.contains(&GridPoint::new(1, 1)));
        }
    }

    #[test]
    fn second_pass_emits_nothing() {
        let mut result = detect(&BitRaster::from_bits(1, 1, &[true]));
        assert_eq!(
            form_rings(&mut result, &AffineTransform::IDENTITY)
                .grid
                .len(),
            1
        );
        assert!(form_rings(&mut result, &AffineTransform::IDENTITY)
            .grid
            .is_empty());
    }

    #[test]
    fn world_rings_follow_transform() {
        let t = AffineTransform::new(2.0, 0.0, 100.0, 0.0, -2.0, 50.0).unwrap();
        let rings = form_rings(&mut detect(&BitRaster::from_bits(1, 1, &[true])), &t);
        assert_eq!(
            rings.world[0].coords,
            vec![
                [100.0, 50.0],
                [100.0, 48.0],
                [102.0, 48.0],
                [102.0, 50.0],
                [100.0, 50.0]
            ]
        );
    }

    #[test]
    fn shoelace_values() {
        assert_eq!(
            ring(&[(0, 0), (0, 2), (2, 2), (2, 0), (0, 0)]).signed_area(),
            -4.0
        );
        assert_eq!(ring(&[(3, 3), (3, 3)]).signed_area(), 0.0);
        assert_eq!(
            signed_area(&ring(&[(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)])),
            1.0
        );
    }

    #[test]
    fn collapse_merges_runs() {
        let r = ring(&[(0, 1), (0, 2), (2, 2), (2, 0), (0, 0), (0, 1)]);
        let c = r.collapse_collinear();
        assert_eq!(c, ring(&[(0, 2), (2, 2), (2, 0), (0, 0), (0, 2)]));
        assert_eq!(c.signed_area(), r.signed_area());
        let plain = ring(&[(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)]);
        assert_eq!(plain.collapse_collinear(), plain);
    }

    #[test]
    fn frame_with_hole() {
        let mut bits = [true; 9];
        bits[4] = false;
        let rings = grid_rings(&BitRaster::from_bits(3, 3, &bits));
        assert_eq!(rings.len(), 2);
        let set = assemble_polygons(&rings).unwrap();
        assert_eq!(set.len(), 1);
        let polygon = &set.polygons[0];
        // The outer ring bounds the full 3x3 square; the hole gives back the center.
        assert_eq!(polygon.outer.signed_area(), -9.0);
        assert_eq!(polygon.holes.len(), 1);
        assert_eq!(polygon.holes[0].signed_area(), 1.0);
        assert_eq!(
            polygon.outer.signed_area() + polygon.holes[0].signed_area(),
            -8.0
        );
    }

    #[test]
    fn disjoint_blobs() {
        let raster = BitRaster::from_bits(3, 1, &[true, false, true]);
        let set = assemble_polygons(&grid_rings(&raster)).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.polygons.iter().all(|p| p.holes.is_empty()));
        let single = assemble_polygons(&grid_rings(&BitRaster::from_bits(1, 1, &[true]))).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single.polygons[0].holes.is_empty());
    }

    #[test]
    fn nested_islands_pick_innermost_outer() {
        // Outer frame, hole, island frame, hole, center pixel.
        let grid = [
            "111111111",
            "100000001",
            "101111101",
            "101000101",
            "101010101",
            "101000101",
            "101111101",
            "100000001",
            "111111111",
        ];
        let bits: Vec<bool> = grid
            .iter()
            .flat_map(|r| r.bytes().map(|b| b == b'1'))
            .collect();
        let rings = grid_rings(&BitRaster::from_bits(9, 9, &bits));
        let set = assemble_polygons(&rings).unwrap();
        assert_eq!(set.len(), 3);
        let mut by_area: Vec<(f64, Vec<f64>)> = set
            .polygons
            .iter()
            .map(|p| {
                (
                    p.outer.signed_area(),
                    p.holes.iter().map(GridRing::signed_area).collect(),
                )
            })
            .collect();
        by_area.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(by_area[0], (-81.0, vec![49.0]));
        assert_eq!(by_area[1], (-25.0, vec![9.0]));
        assert_eq!(by_area[2], (-1.0, vec![]));
    }

    #[test]
    fn orphan_hole_reported() {
        let hole = ring(&[(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]);
        assert!(matches!(
            assemble_polygons(&[hole]),
            Err(TopologyError::OrphanHole { index: 0, .. })
        ));
        let open = ring(&[(0, 0), (0, 1), (1, 1), (1, 0)]);
        assert_eq!(
            assemble_polygons(&[open]),
            Err(TopologyError::InvalidRing { index: 0 })
        );
    }
}
