//! Single-pass detection of polygon vertices.
//!
//! A 2x2 window is centered on every corner of the pixel grid, top-left to
//! bottom-right. The four pixels around the corner form a 4-bit window case:
//!
//! ```text
//!   +---+---+
//!   | 1 | 2 |      1: (x-1, y-1)   2: (x, y-1)
//!   +---o---+      4: (x-1, y)     8: (x, y)
//!   | 4 | 8 |
//!   +---+---+      o = corner (x, y)
//! ```
//!
//! Cases 1, 2, 4, 7, 8, 11, 13 and 14 put one vertex on the corner; cases 6
//! and 9 (two pixels meeting diagonally) put two coinciding vertices there so
//! the regions stay separate rings. Edges whose far end has not been scanned
//! yet are held as open vertices: one waiting to the left and one per corner
//! column waiting above. Each vertex links to its successor, forming one
//! circular list per ring.

use std::fmt::{self, Write as _};
use std::num::NonZeroU32;

use crate::raster::BitRaster;

/// Index of a vertex in a [`DelineationResult`].
// Stored off by one so `Option<VertexId>` stays four bytes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(NonZeroU32);

impl VertexId {
    fn new(index: usize) -> Self {
        let raw = u32::try_from(index + 1).expect("more than 2^32 - 1 vertices");
        VertexId(NonZeroU32::new(raw).expect("index + 1 is non-zero"))
    }

    pub fn index(self) -> usize {
        self.0.get() as usize - 1
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexId({})", self.index())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub x: u32,
    pub y: u32,
    pub next: Option<VertexId>,
    pub visited: bool,
}

/// Linked vertices produced by [`detect`].
#[derive(Debug, Clone, Default)]
pub struct DelineationResult {
    vertices: Vec<Vertex>,
    corners: Vec<VertexId>,
}

impl DelineationResult {
    /// Start corners (cases 7, 8 and 9) in scan order. Every circular list
    /// contains at least one of them.
    pub fn corners(&self) -> &[VertexId] {
        &self.corners
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, id: VertexId) -> &Vertex {
        &self.vertices[id.index()]
    }

    pub(crate) fn vertex_mut(&mut self, id: VertexId) -> &mut Vertex {
        &mut self.vertices[id.index()]
    }

    /// Successor of `id`. Panics if the list was left open.
    pub fn next(&self, id: VertexId) -> VertexId {
        self.vertex(id)
            .next
            .unwrap_or_else(|| panic!("vertex {} has no successor", id.index()))
    }

    /// One line per vertex: `index x y next start`, where `next` is `-` when
    /// absent and `start` is 1 for start corners.
    pub fn dump(&self) -> String {
        let mut is_start = vec![false; self.vertices.len()];
        for c in &self.corners {
            is_start[c.index()] = true;
        }
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let next = v
                .next
                .map_or_else(|| "-".to_string(), |n| n.index().to_string());
            writeln!(out, "{i} {} {} {next} {}", v.x, v.y, u8::from(is_start[i])).unwrap();
        }
        out
    }
}

/// Window case for corner `(x, y)`.
#[inline]
pub fn classify_window(raster: &BitRaster, x: i64, y: i64) -> u8 {
    u8::from(raster.get(x - 1, y - 1))
        | u8::from(raster.get(x, y - 1)) << 1
        | u8::from(raster.get(x - 1, y)) << 2
        | u8::from(raster.get(x, y)) << 3
}

/// Number of vertices a window case creates.
pub fn vertices_for_case(case: u8) -> usize {
    match case {
        1 | 2 | 4 | 7 | 8 | 11 | 13 | 14 => 1,
        6 | 9 => 2,
        _ => 0,
    }
}

/// Open-vertex bookkeeping for the scan.
struct ScanState {
    top: Vec<Option<VertexId>>,
    left: Option<VertexId>,
}

impl ScanState {
    fn take_top(&mut self, x: usize) -> VertexId {
        self.top[x]
            .take()
            .unwrap_or_else(|| panic!("no open vertex above corner column {x}"))
    }

    fn take_left(&mut self) -> VertexId {
        self.left.take().expect("no open vertex to the left")
    }

    fn open_top(&mut self, x: usize, v: VertexId) {
        let prev = self.top[x].replace(v);
        assert!(
            prev.is_none(),
            "corner column {x} already has an open vertex"
        );
    }

    fn open_left(&mut self, v: VertexId) {
        let prev = self.left.replace(v);
        assert!(prev.is_none(), "left open vertex overwritten");
    }
}

struct Builder {
    vertices: Vec<Vertex>,
    corners: Vec<VertexId>,
}

impl Builder {
    fn push(&mut self, x: u32, y: u32, next: Option<VertexId>) -> VertexId {
        let id = VertexId::new(self.vertices.len());
        self.vertices.push(Vertex {
            x,
            y,
            next,
            visited: false,
        });
        id
    }

    fn link(&mut self, from: VertexId, to: VertexId) {
        self.vertices[from.index()].next = Some(to);
    }
}

/// Scans every corner of `raster` and links the detected vertices into
/// circular lists.
///
/// Panics if the open-vertex bookkeeping is ever inconsistent; that can only
/// happen through a bug and no partial result is returned.
pub fn detect(raster: &BitRaster) -> DelineationResult {
    let mut result = DelineationResult {
        vertices: Vec::new(),
        corners: Vec::new(),
    };
    detect_into(raster, &mut result);
    result
}

/// Like [`detect`], but reuses the allocations already held by `result`.
pub fn detect_into(raster: &BitRaster, result: &mut DelineationResult) {
    let (w, h) = (raster.width(), raster.height());
    let stride = w as usize;
    let mut state = ScanState {
        top: vec![None; stride + 1],
        left: None,
    };
    let mut out = Builder {
        vertices: std::mem::take(&mut result.vertices),
        corners: std::mem::take(&mut result.corners),
    };
    out.vertices.clear();
    out.corners.clear();
    if raster.is_empty() {
        result.vertices = out.vertices;
        result.corners = out.corners;
        return;
    }

    for y in 0..=h {
        let above = (y > 0).then(|| (y as usize - 1) * stride);
        let below = (y < h).then(|| y as usize * stride);
        let pixel =
            |row: Option<usize>, x: u32| x < w && row.is_some_and(|r| raster.bit(r + x as usize));
        // Cases carry the right column of the previous window into the left.
        let (mut tl, mut bl) = (false, false);
        for x in 0..=w {
            let tr = pixel(above, x);
            let br = pixel(below, x);
            let case = u8::from(tl) | u8::from(tr) << 1 | u8::from(bl) << 2 | u8::from(br) << 3;
            tl = tr;
            bl = br;

            let col = x as usize;
            match case {
                0 | 3 | 5 | 10 | 12 | 15 => {}
                1 => {
                    let top = state.take_top(col);
                    let left = state.take_left();
                    let v = out.push(x, y, Some(top));
                    out.link(left, v);
                }
                2 => {
                    let top = state.take_top(col);
                    let v = out.push(x, y, None);
                    out.link(top, v);
                    state.open_left(v);
                }
                4 => {
                    let left = state.take_left();
                    let v = out.push(x, y, Some(left));
                    state.open_top(col, v);
                }
                6 => {
                    let top = state.take_top(col);
                    let left = state.take_left();
                    let v1 = out.push(x, y, None);
                    out.link(top, v1);
                    let v2 = out.push(x, y, Some(left));
                    state.open_top(col, v2);
                    state.open_left(v1);
                }
                7 | 8 => {
                    let v = out.push(x, y, None);
                    state.open_top(col, v);
                    state.open_left(v);
                    out.corners.push(v);
                }
                9 => {
                    let top = state.take_top(col);
                    let left = state.take_left();
                    let v1 = out.push(x, y, Some(top));
                    out.link(left, v1);
                    let v2 = out.push(x, y, None);
                    state.open_top(col, v2);
                    state.open_left(v2);
                    out.corners.push(v2);
                }
                11 => {
                    let left = state.take_left();
                    let v = out.push(x, y, None);
                    out.link(left, v);
                    state.open_top(col, v);
                }
                13 => {
                    let top = state.take_top(col);
                    let v = out.push(x, y, Some(top));
                    state.open_left(v);
                }
                14 => {
                    let top = state.take_top(col);
                    let left = state.take_left();
                    let v = out.push(x, y, Some(left));
                    out.link(top, v);
                }
                _ => unreachable!("window case {case} out of range"),
            }
        }
        assert!(
            state.left.is_none(),
            "open vertex left dangling at end of row {y}"
        );
    }
    assert!(
        state.top.iter().all(Option::is_none),
        "open vertices left dangling after the last row"
    );
    debug_assert!(out.vertices.iter().all(|v| v.next.is_some()));

    result.vertices = out.vertices;
    result.corners = out.corners;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn positions(result: &DelineationResult, start: VertexId) -> Vec<(u32, u32)> {
        let mut out = vec![];
        let mut p = start;
        loop {
            let v = result.vertex(p);
            out.push((v.x, v.y));
            p = result.next(p);
            if p == start {
                return out;
            }
        }
    }

    #[test]
    fn classify_examples() {
        let empty = BitRaster::new(2, 2);
        assert_eq!(classify_window(&empty, 1, 1), 0);
        let mut br = BitRaster::new(2, 2);
        br.set(1, 1, true);
        assert_eq!(classify_window(&br, 1, 1), 8);
        let single = BitRaster::from_bits(1, 1, &[true]);
        assert_eq!(classify_window(&single, 1, 1), 1);
        assert_eq!(classify_window(&single, 0, 0), 8);
        assert_eq!(classify_window(&single, 1, 0), 4);
        assert_eq!(classify_window(&single, 0, 1), 2);
    }

    #[test]
    fn empty_raster() {
        let result = detect(&BitRaster::new(5, 4));
        assert!(result.corners().is_empty());
        assert_eq!(result.vertex_count(), 0);
        assert_eq!(detect(&BitRaster::new(0, 0)).vertex_count(), 0);
        assert_eq!(detect(&BitRaster::new(3, 0)).vertex_count(), 0);
        assert_eq!(detect(&BitRaster::new(0, 3)).vertex_count(), 0);
    }

    #[test]
    fn single_pixel_trace() {
        let result = detect(&BitRaster::from_bits(1, 1, &[true]));
        assert_eq!(result.vertex_count(), 4);
        assert_eq!(result.corners().len(), 1);
        assert_eq!(
            positions(&result, result.corners()[0]),
            vec![(0, 0), (0, 1), (1, 1), (1, 0)]
        );
        // Creation order follows cases 8, 4, 2, 1.
        assert_eq!(
            result.dump(),
            "0 0 0 2 1\n1 1 0 0 0\n2 0 1 3 0\n3 1 1 1 0\n"
        );
    }

    #[test]
    fn diagonal_pixels_split_at_shared_corner() {
        let result = detect(&BitRaster::from_bits(2, 2, &[true, false, false, true]));
        assert_eq!(result.vertex_count(), 8);
        assert_eq!(result.corners().len(), 2);
        let first = positions(&result, result.corners()[0]);
        let second = positions(&result, result.corners()[1]);
        assert_eq!(first, vec![(0, 0), (0, 1), (1, 1), (1, 0)]);
        assert_eq!(second, vec![(1, 1), (1, 2), (2, 2), (2, 1)]);
    }

    #[test]
    fn anti_diagonal_pixels_use_case_six() {
        let raster = BitRaster::from_bits(2, 2, &[false, true, true, false]);
        assert_eq!(classify_window(&raster, 1, 1), 6);
        let result = detect(&raster);
        assert_eq!(result.vertex_count(), 8);
        assert_eq!(result.corners().len(), 2);
        let first = positions(&result, result.corners()[0]);
        let second = positions(&result, result.corners()[1]);
        assert_eq!(first, vec![(1, 0), (1, 1), (2, 1), (2, 0)]);
        assert_eq!(second, vec![(0, 1), (0, 2), (1, 2), (1, 1)]);
    }

    #[test]
    fn full_block_has_four_vertices() {
        let result = detect(&BitRaster::from_bits(2, 2, &[true; 4]));
        assert_eq!(result.vertex_count(), 4);
        let ring = positions(&result, result.corners()[0]);
        assert_eq!(ring, vec![(0, 0), (0, 2), (2, 2), (2, 0)]);
        let all_marked = detect(&BitRaster::from_bits(7, 3, &[true; 21]));
        assert_eq!(all_marked.vertex_count(), 4);
    }

    #[test]
    fn every_list_is_closed() {
        let raster = crate::raster::gen_bernoulli(40, 30, 0.5, 11).unwrap();
        let result = detect(&raster);
        assert!(result.vertices().iter().all(|v| v.next.is_some()));
        assert_eq!(result.vertex_count() % 2, 0);
    }
}
