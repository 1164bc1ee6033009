//! Writes a synthetic knowledge base, association file, positive pairs,
//! pre-training text and a matching pipeline config into a directory.
//!
//! ```text
//! cargo run --example synthetic_data -- /tmp/synth 3
//! cargo run --bin ontoembed -- all --config /tmp/synth/pipeline.conf
//! ```

use std::env;
use std::fs;
use std::path::PathBuf;

use ontoembed::synthetic::{generate, pipeline_config, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synthetic".into()));
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let data = generate(&SyntheticConfig {
        seed,
        ..Default::default()
    });
    data.write_files(&dir)?;
    fs::write(dir.join("pipeline.conf"), pipeline_config(seed))?;
    println!("wrote {}", dir.display());
    Ok(())
}
