#![no_main]
use feather_core::io::parse_edge_list;
use feather_core::Graph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(edges) = parse_edge_list(text) else { return };
    // Keep the node count small; a single large index would otherwise dominate memory.
    if edges.iter().any(|&(u, w, _)| u.max(w) >= 1 << 12) {
        return;
    }
    if let Ok(g) = Graph::from_edge_list(edges, None) {
        let a = g.normalize();
        for u in 0..g.num_nodes() {
            let (_, p) = a.row(u);
            assert_eq!(p.iter().sum::<f64>(), 1.0);
        }
    }
});
