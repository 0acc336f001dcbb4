//! The files under `fixtures/scenes` are generator output. Set
//! `VLNAUG_REGEN_FIXTURES=1` to rewrite them; otherwise they must match.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use vlnaug::core::ablation::{load_lexicon, PosTag};
use vlnaug::fixtures::{bundled_specs, generate_house, GeneratedHouse};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn manifest_row(scan: &str, house: &GeneratedHouse) -> String {
    let s = &house.scene;
    let included: Vec<bool> = house.nodes.iter().map(|n| n.viewpoint.included).collect();
    let mut edges = 0;
    for i in 0..house.nodes.len() {
        for j in (i + 1)..house.nodes.len() {
            let open = house.nodes[i].unobstructed[j] || house.nodes[j].unobstructed[i];
            if open && included[i] && included[j] {
                edges += 1;
            }
        }
    }
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        scan,
        house.levels.len(),
        s.regions.len(),
        s.categories.len(),
        s.panoramas.len(),
        s.objects.len(),
        house.nodes.len(),
        included.iter().filter(|x| **x).count(),
        edges
    )
}

#[test]
fn bundled_scenes_match_generator() {
    let dir = fixtures().join("scenes");
    let regen = std::env::var_os("VLNAUG_REGEN_FIXTURES").is_some();
    let mut manifest = String::from("scan\tlevels\tregions\tcategories\tpanoramas\tobjects\tviewpoints\tincluded\tedges\n");
    for (scan, spec) in bundled_specs() {
        let house = generate_house(scan, &spec);
        let files = [
            (dir.join(format!("{}.house", scan)), house.house_text()),
            (dir.join(format!("{}_connectivity.json", scan)), house.connectivity_text()),
        ];
        for (path, text) in files {
            if regen {
                fs::create_dir_all(&dir).unwrap();
                fs::write(&path, &text).unwrap();
            }
            let on_disk = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
            assert_eq!(on_disk, text, "{} is stale", path.display());
        }
        manifest.push_str(&manifest_row(scan, &house));
        manifest.push('\n');
    }
    let path = dir.join("manifest.tsv");
    if regen {
        fs::write(&path, &manifest).unwrap();
    }
    assert_eq!(fs::read_to_string(&path).unwrap(), manifest);
}

#[test]
fn default_lexicon_loads() {
    let text = fs::read_to_string(fixtures().join("pos_lexicon.tsv")).unwrap();
    let lex = load_lexicon(&text).unwrap();
    assert!(lex.len() >= 2000, "{} entries", lex.len());
    for w in ["left", "right", "straight", "around", "up", "down", "toward", "stop", "walk", "turn"] {
        assert_eq!(lex.tag(w), PosTag::Other, "{}", w);
    }
    for w in ["bed", "closet", "stairs", "table", "lamp", "counter", "chairs"] {
        assert_eq!(lex.tag(w), PosTag::Noun, "{}", w);
    }
    assert_eq!(lex.tag("potted"), PosTag::Adjective);
}

#[test]
fn bundled_category_words_are_tagged() {
    let lex = load_lexicon(&fs::read_to_string(fixtures().join("pos_lexicon.tsv")).unwrap()).unwrap();
    let mut words = BTreeSet::new();
    for (scan, spec) in bundled_specs() {
        for c in generate_house(scan, &spec).scene.categories {
            words.extend(c.name.split(' ').map(str::to_string));
        }
    }
    let untagged: Vec<_> = words.iter().filter(|w| lex.tag(w) == PosTag::Other).collect();
    assert!(untagged.is_empty(), "{:?}", untagged);
}
