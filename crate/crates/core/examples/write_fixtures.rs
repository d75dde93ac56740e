//! Regenerates the fixture definition files in `fixtures/`.
//!
//! ```bash
//! cargo run --release -p kleinlab-core --example write_fixtures
//! ```

use kleinlab_core::ends::EndCollection;
use kleinlab_core::fixtures::{cusped_fuchsian, cyclic_loxodromic, schottky, CuspedParams};
use kleinlab_core::io::{ends_to_json, group_to_json};

fn write(path: &str, text: String) {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    std::fs::create_dir_all(&root).unwrap();
    let full = root.join(path);
    std::fs::write(&full, text).unwrap();
    println!("wrote {}", full.display());
}

fn main() {
    let cyclic = cyclic_loxodromic(2, 2.0);
    write(
        "cyclic_loxodromic.json",
        serde_json::to_string_pretty(&group_to_json(&cyclic)).unwrap() + "\n",
    );

    let fx = schottky(4.0);
    write("schottky.json", serde_json::to_string_pretty(&group_to_json(&fx.spec)).unwrap() + "\n");
    let ends = EndCollection::new(vec![], false, fx.ordinary).unwrap();
    write(
        "schottky.ends.json",
        serde_json::to_string_pretty(&ends_to_json(&fx.spec, &ends)).unwrap() + "\n",
    );

    let cf = cusped_fuchsian(CuspedParams::default());
    write(
        "cusped_fuchsian.json",
        serde_json::to_string_pretty(&group_to_json(&cf.spec)).unwrap() + "\n",
    );
    write(
        "cusped_fuchsian.ends.json",
        serde_json::to_string_pretty(&ends_to_json(&cf.spec, &cf.ends)).unwrap() + "\n",
    );
}
