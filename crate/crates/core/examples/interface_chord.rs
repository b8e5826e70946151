//! Cut a triangle by a straight line with a prescribed normal so that a
//! given fraction of its area lies on the side the normal points to.
//!
//! Usage: `cargo run --example interface_chord [FRACTION] [ANGLE_DEG]`

use swed::geometry::{clip_halfplane, polygon_area, triangle_area};
use swed::interface::interface_endpoints;

fn main() {
    let mut args = std::env::args().skip(1);
    let f: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let deg: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(45.0);
    let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let n = [deg.to_radians().cos(), deg.to_radians().sin()];
    match interface_endpoints(&tri, n, f) {
        Some(c) => {
            let cut = polygon_area(&clip_halfplane(&tri, c.normal, c.alpha)) / triangle_area(&tri);
            println!("chord ({:.12}, {:.12}) - ({:.12}, {:.12})", c.a[0], c.a[1], c.b[0], c.b[1]);
            println!("n . x = {:.12}, area fraction on the normal side {cut:.12}", c.alpha);
        }
        None => println!("no chord: fraction {f} is not strictly between 0 and 1"),
    }
}
