//! Regenerate the bundled texture test card.
//!
//! Usage: cargo run -p a2s-cli --example gen_test_card -- [PATH] [SIZE]

use a2s_core::kernels::test_card;
use a2s_core::pgm::{write, PgmFormat};
use std::path::PathBuf;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| "test_card.pgm".into()));
    let size: usize = match args.next() {
        Some(s) => s.parse()?,
        None => 128,
    };
    write(&path, &test_card(size, size), PgmFormat::P5)?;
    println!("wrote {} ({size}x{size})", path.display());
    Ok(())
}
