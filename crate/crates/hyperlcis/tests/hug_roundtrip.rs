use hyperlcis::hug;
use hyperlcis_core::Hypergraph;
use proptest::prelude::*;

proptest! {
    #[test]
    fn write_then_parse_is_identity(d in 2usize..=5, n in 0usize..=12, seed: u64) {
        let g = Hypergraph::random(d, n, seed).unwrap();
        let text = hug::to_string(&g);
        prop_assert_eq!(hug::parse(&text).unwrap(), g.clone());
        let mut buf = Vec::new();
        hug::write(&g, &mut buf).unwrap();
        prop_assert_eq!(buf, text.into_bytes());
    }

    #[test]
    fn truncated_files_are_rejected(n in 4usize..=9, seed: u64, cut in 1usize..20) {
        let g = Hypergraph::random(3, n, seed).unwrap();
        prop_assume!(g.edge_count() > 0);
        let text = hug::to_string(&g);
        let cut = cut.min(text.len() - 1);
        prop_assert!(hug::parse(&text[..text.len() - cut]).is_err());
    }
}

#[test]
fn file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.hug");
    let g = Hypergraph::random(4, 9, 11).unwrap();
    hug::write_file(&g, &path).unwrap();
    assert_eq!(hug::read_file(&path).unwrap(), g);
}
