//! Regenerate the committed benchmark instances (deterministic; the files
//! under data/ were produced by this tool and are frozen).

use std::path::PathBuf;

fn main() -> anyhow::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"));
    std::fs::create_dir_all(&dir)?;
    for g in vrptw_cg::gen::benchmark_set() {
        let path = dir.join(format!("{}.txt", g.name));
        std::fs::write(&path, &g.text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
