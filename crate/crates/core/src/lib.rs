//! Exact delineation of binary raster masks into orthogonal rings.
//!
//! The pipeline is [`detect`] (one 2x2-window scan that links polygon
//! vertices into circular lists) followed by [`form_rings`] (one walk per
//! list, mapping grid corners through an [`AffineTransform`]). Every marked
//! pixel is covered exactly; no simplification is applied.

pub mod bench;
pub mod delineate;
pub mod geo_io;
pub mod mask;
pub mod raster;
pub mod rings;
pub mod transform;
pub mod verify;

pub use delineate::{classify_window, detect, detect_into, DelineationResult, Vertex, VertexId};
pub use mask::{parse_mask, write_mask, MaskError, MaskFormat};
pub use raster::{gen_bernoulli, BitRaster, RasterError};
pub use rings::{
    assemble_polygons, form_rings, form_rings_into, form_rings_with, signed_area, GridPoint,
    GridRing, Polygon, PolygonSet, RingOptions, Rings, TopologyError, WorldRing,
};
pub use transform::{parse_world_file, AffineTransform, TransformError};
