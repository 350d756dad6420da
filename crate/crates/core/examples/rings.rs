//! Prints the rings of a small mask given as rows of 0/1 on the command line.
//!
//! `cargo run -p delineate --example rings -- 111 101 111`

use delineate::geo_io::write_wkt;
use delineate::{assemble_polygons, detect, form_rings, AffineTransform, BitRaster};

fn main() {
    let rows: Vec<String> = std::env::args().skip(1).collect();
    let width = rows.first().map_or(0, String::len) as u32;
    let bits: Vec<bool> = rows
        .iter()
        .flat_map(|r| r.bytes().map(|b| b == b'1'))
        .collect();
    let raster = BitRaster::from_bits(width, rows.len() as u32, &bits);
    let mut result = detect(&raster);
    print!("{}", result.dump());
    let rings = form_rings(&mut result, &AffineTransform::IDENTITY);
    for ring in &rings.grid {
        let coords: Vec<_> = ring.coords.iter().map(|p| (p.x, p.y)).collect();
        println!("area {:>6}  {coords:?}", ring.signed_area());
    }
    let polygons = assemble_polygons(&rings.grid).expect("valid topology");
    println!(
        "{}",
        write_wkt(&polygons.to_world(&AffineTransform::IDENTITY)).unwrap()
    );
}
