//! Writes the pregroupoid fixtures used by the scripts and tests.

use frobperf::json;
use frobperf_core::groupoid::PregroupoidBuilder;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;

    let mut tree = PregroupoidBuilder::new(&["1", "2", "3"]);
    tree.arrow("a", "1", "2")?;
    tree.arrow("b", "2", "3")?;

    let mut star = PregroupoidBuilder::new(&["1", "2", "3", "4"]);
    star.arrow("a", "1", "2")?;
    star.arrow("b", "2", "3")?;
    star.arrow("c", "2", "4")?;

    let mut cycle = PregroupoidBuilder::new(&["1", "2", "3"]);
    cycle.arrow("a", "1", "2")?;
    cycle.arrow("b", "2", "3")?;
    cycle.arrow("c", "3", "1")?;

    let mut broken = json::PregroupoidFile::from_pregroupoid(&tree.build());
    broken.maps.get_mut("s").expect("s").insert("a^-1".into(), "1".into());

    for (name, value) in [
        ("tree.json", json::pregroupoid(&tree.build())),
        ("star.json", json::pregroupoid(&star.build())),
        ("cycle.json", json::pregroupoid(&cycle.build())),
        ("broken.json", serde_json::to_value(&broken)?),
    ] {
        std::fs::write(dir.join(name), frobperf::render(&value))?;
    }
    Ok(())
}
