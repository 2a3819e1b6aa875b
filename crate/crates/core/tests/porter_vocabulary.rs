//! Porter stemmer checked word-by-word against a frozen vocabulary produced
//! by an independent implementation (see `data/gen_porter_fixture.py`).

use conrel_core::porter::stem;

#[test]
fn matches_reference_vocabulary() {
    let fixture = include_str!("data/porter_vocab.tsv");
    let mut mismatches = Vec::new();
    let mut n = 0;
    for line in fixture.lines() {
        let (word, expected) = line.split_once('\t').expect("word<TAB>stem");
        n += 1;
        let got = stem(word);
        if got != expected {
            mismatches.push(format!("{word}: expected {expected}, got {got}"));
        }
    }
    assert!(n > 5000, "fixture unexpectedly small: {n}");
    assert!(mismatches.is_empty(), "{} mismatches:\n{}", mismatches.len(), mismatches.join("\n"));
}
