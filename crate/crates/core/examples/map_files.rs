//! Reading and writing map files, and writing a gadget directory.
//!
//! ```bash
//! cargo run --example map_files
//! ```

use schatten_maps::io::{parse_map, read_map, write_gadget_dir, write_map, GADGET_FILES};
use schatten_maps::sat::{build_gadget_channels, gap_certify, TwoOutOfFourInstance};
use schatten_maps::{Result, SchattenIndex};

const AMPLITUDE_DAMPING: &str = r#"{
  "kind": "kraus", "in_dim": 2, "out_dim": 2,
  "operators": [
    [[1, [0, 0]], [0, 0.8]],
    [[0, 0.6], [0, 0]]
  ]
}"#;

pub fn run_example() -> Result<()> {
    let map = parse_map(AMPLITUDE_DAMPING)?;
    println!("amplitude damping: cp={} tp={}", map.is_cp()?, map.is_tp()?);

    let dir = std::env::temp_dir().join(format!("schatten-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("damping.json");
    write_map(&path, &map)?;
    let back = read_map(&path)?;
    println!("round trip mismatch: {:.2e}", (back.choi()? - map.choi()?).norm());

    let inst = TwoOutOfFourInstance::from_signed(5, &[([1, 2, 3, 4], "++--"), ([2, 3, 4, 5], "+-+-")])?;
    let g = build_gadget_channels(&inst, 1.0)?;
    let report = gap_certify(&inst, 1.0, SchattenIndex::TWO)?;
    let written = write_gadget_dir(&dir.join("gadgets"), &g, &report)?;
    assert_eq!(written.len(), GADGET_FILES.len() + 1);
    for f in &written {
        println!("wrote {} ({} bytes)", f.display(), std::fs::metadata(f)?.len());
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
