//! Regenerates `data/langid/profiles.tsv` from the bundled training text.
//!
//! cargo run -p disclosure-audit --example train_langid

use std::path::Path;

use disclosure_audit::langid::train_bundled_detector;

fn main() -> std::io::Result<()> {
    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/langid/profiles.tsv");
    std::fs::write(&out, train_bundled_detector().to_tsv())?;
    println!("wrote {}", out.display());
    Ok(())
}
