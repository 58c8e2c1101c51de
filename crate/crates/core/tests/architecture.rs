//! Network access is confined to the chat-completions adapter.

use std::fs;
use std::path::{Path, PathBuf};

fn sources(dir: &Path, out: &mut Vec<PathBuf>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            sources(&path, out);
        } else if path.extension().is_some_and(|e| e == "rs") {
            out.push(path);
        }
    }
}

#[test]
fn only_the_endpoint_adapter_talks_to_the_network() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let allowed = root.join("models").join("endpoint.rs");
    let mut files = Vec::new();
    sources(&root, &mut files);
    assert!(files.contains(&allowed));
    let mut offenders = Vec::new();
    for f in files.iter().filter(|f| **f != allowed) {
        let text = fs::read_to_string(f).unwrap();
        for needle in ["reqwest", "std::net", "TcpStream", "UdpSocket"] {
            if text.contains(needle) {
                offenders.push(format!("{} mentions {needle}", f.display()));
            }
        }
    }
    assert!(offenders.is_empty(), "{offenders:#?}");
}
