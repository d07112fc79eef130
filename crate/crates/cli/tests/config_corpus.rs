use std::path::PathBuf;

use feather_cli::RunConfig;

#[test]
fn run_config_seeds() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/run_config");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = RunConfig::from_json(&text);
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        assert_eq!(parsed.is_ok(), name != "unknown_key", "{name}");
        if let Ok(c) = parsed {
            c.train_config().validate().unwrap();
        }
        seen += 1;
    }
    assert!(seen >= 4);
}
