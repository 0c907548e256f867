//! Stemmer output against a frozen table produced by an independent
//! reference implementation of the original 1980 algorithm.

use neurorel::corpus::stem;

fn fixture() -> Vec<(String, String, String)> {
    include_str!("fixtures/porter_oracle.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut f = l.split('\t').map(str::to_string);
            (f.next().unwrap(), f.next().unwrap(), f.next().unwrap())
        })
        .collect()
}

#[test]
fn matches_reference_stems() {
    let table = fixture();
    assert!(table.len() > 2000);
    let wrong: Vec<_> = table
        .iter()
        .filter(|(w, s, _)| stem(w) != *s)
        .map(|(w, s, _)| format!("{w}: got {}, want {s}", stem(w)))
        .collect();
    assert!(wrong.is_empty(), "{} mismatches:\n{}", wrong.len(), wrong.join("\n"));
}

#[test]
fn double_application_matches_reference() {
    for (w, _, twice) in fixture() {
        assert_eq!(stem(&stem(&w)), twice, "{w}");
    }
}

#[test]
fn idempotent_where_reference_is() {
    let table = fixture();
    let stable: Vec<_> = table.iter().filter(|(_, s, t)| s == t).collect();
    assert!(stable.len() * 10 > table.len() * 9, "lexicon mostly stable");
    for (w, s, _) in stable {
        assert_eq!(stem(&stem(w)), *s, "{w}");
    }
}

#[test]
fn spec_examples() {
    assert_eq!(stem("caresses"), "caress");
    assert_eq!(stem("ponies"), "poni");
    assert_eq!(stem("atom"), "atom");
    assert_eq!(stem("atomic"), "atom");
    assert_eq!(stem("atoms"), "atom");
}
