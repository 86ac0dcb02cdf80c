//! Two-colour a heavy-hex device so every coupled pair gets opposite
//! schedules, and show what an odd cycle does.

use crdd::harness::heavy_hex;
use crdd::sequence::{Color, QubitGraph};

fn main() -> crdd::Result<()> {
    let g = heavy_hex(3, 9)?.two_color()?;
    let (red, blue) = (g.class(Color::R), g.class(Color::B));
    println!("{} qubits, {} couplers", g.n, g.edges.len());
    println!("red : {red:?}");
    println!("blue: {blue:?}");

    let triangle = QubitGraph::new(3, vec![[0, 1], [1, 2], [2, 0]])?;
    match triangle.two_color() {
        Ok(_) => println!("triangle coloured?"),
        Err(e) => println!("triangle: {e}"),
    }
    Ok(())
}
