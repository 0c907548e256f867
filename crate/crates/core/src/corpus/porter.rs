//! The Porter (1980) suffix-stripping stemmer, original rule set.
//!
//! Rules follow the published algorithm rather than the later reference C
//! code (so `abli -> able`, no `logi -> log`). Within a rule group only the
//! longest matching suffix is considered; if its condition fails the group
//! does nothing. Words of one or two letters are returned unchanged, which
//! keeps tokens such as `s` from stemming to the empty string.

/// Stem one lowercase token. Tokens containing anything other than ASCII
/// lowercase letters are returned unchanged.
pub fn stem(token: &str) -> String {
    if token.len() <= 2 || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return token.to_owned();
    }
    let mut w = token.as_bytes().to_vec();
    step1a(&mut w);
    step1b(&mut w);
    step1c(&mut w);
    step2(&mut w);
    step3(&mut w);
    step4(&mut w);
    step5a(&mut w);
    step5b(&mut w);
    // Only ASCII bytes were ever written.
    String::from_utf8(w).expect("ascii")
}

fn is_consonant(w: &[u8], i: usize) -> bool {
    match w[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_consonant(w, i - 1),
        _ => true,
    }
}

/// Number of VC sequences in `w`, the `m` of `[C](VC)^m[V]`.
fn measure(w: &[u8]) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..w.len() {
        let consonant = is_consonant(w, i);
        if consonant && prev_vowel {
            m += 1;
        }
        prev_vowel = !consonant;
    }
    m
}

fn has_vowel(w: &[u8]) -> bool {
    (0..w.len()).any(|i| !is_consonant(w, i))
}

fn ends_double_consonant(w: &[u8]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1)
}

/// `*o`: stem ends consonant-vowel-consonant, last consonant not w, x or y.
fn ends_cvc(w: &[u8]) -> bool {
    let n = w.len();
    n >= 3
        && is_consonant(w, n - 3)
        && !is_consonant(w, n - 2)
        && is_consonant(w, n - 1)
        && !matches!(w[n - 1], b'w' | b'x' | b'y')
}

fn stem_of<'a>(w: &'a [u8], suffix: &str) -> Option<&'a [u8]> {
    w.strip_suffix(suffix.as_bytes())
}

fn replace_suffix(w: &mut Vec<u8>, suffix_len: usize, replacement: &str) {
    w.truncate(w.len() - suffix_len);
    w.extend_from_slice(replacement.as_bytes());
}

/// Apply the longest matching rule of a group, subject to `cond` on the stem.
fn apply_group(w: &mut Vec<u8>, rules: &[(&str, &str)], cond: impl Fn(&[u8], &str) -> bool) {
    let best = rules
        .iter()
        .filter(|(suffix, _)| w.ends_with(suffix.as_bytes()))
        .max_by_key(|(suffix, _)| suffix.len());
    if let Some(&(suffix, replacement)) = best {
        let stem = &w[..w.len() - suffix.len()];
        if cond(stem, suffix) {
            replace_suffix(w, suffix.len(), replacement);
        }
    }
}

fn step1a(w: &mut Vec<u8>) {
    apply_group(
        w,
        &[("sses", "ss"), ("ies", "i"), ("ss", "ss"), ("s", "")],
        |_, _| true,
    );
}

fn step1b(w: &mut Vec<u8>) {
    if let Some(stem) = stem_of(w, "eed") {
        if measure(stem) > 0 {
            w.pop();
        }
        return;
    }
    let removed = ["ed", "ing"].iter().find_map(|suffix| {
        stem_of(w, suffix)
            .filter(|stem| has_vowel(stem))
            .map(|_| suffix.len())
    });
    let Some(len) = removed else { return };
    w.truncate(w.len() - len);

    if w.ends_with(b"at") || w.ends_with(b"bl") || w.ends_with(b"iz") {
        w.push(b'e');
    } else if ends_double_consonant(w) && !matches!(w[w.len() - 1], b'l' | b's' | b'z') {
        w.pop();
    } else if measure(w) == 1 && ends_cvc(w) {
        w.push(b'e');
    }
}

fn step1c(w: &mut [u8]) {
    let n = w.len();
    if w[n - 1] == b'y' && has_vowel(&w[..n - 1]) {
        w[n - 1] = b'i';
    }
}

const STEP2: &[(&str, &str)] = &[
    ("ational", "ate"),
    ("tional", "tion"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("izer", "ize"),
    ("abli", "able"),
    ("alli", "al"),
    ("entli", "ent"),
    ("eli", "e"),
    ("ousli", "ous"),
    ("ization", "ize"),
    ("ation", "ate"),
    ("ator", "ate"),
    ("alism", "al"),
    ("iveness", "ive"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("aliti", "al"),
    ("iviti", "ive"),
    ("biliti", "ble"),
];

const STEP3: &[(&str, &str)] = &[
    ("icate", "ic"),
    ("ative", ""),
    ("alize", "al"),
    ("iciti", "ic"),
    ("ical", "ic"),
    ("ful", ""),
    ("ness", ""),
];

const STEP4: &[(&str, &str)] = &[
    ("al", ""),
    ("ance", ""),
    ("ence", ""),
    ("er", ""),
    ("ic", ""),
    ("able", ""),
    ("ible", ""),
    ("ant", ""),
    ("ement", ""),
    ("ment", ""),
    ("ent", ""),
    ("ion", ""),
    ("ou", ""),
    ("ism", ""),
    ("ate", ""),
    ("iti", ""),
    ("ous", ""),
    ("ive", ""),
    ("ize", ""),
];

fn step2(w: &mut Vec<u8>) {
    apply_group(w, STEP2, |stem, _| measure(stem) > 0);
}

fn step3(w: &mut Vec<u8>) {
    apply_group(w, STEP3, |stem, _| measure(stem) > 0);
}

fn step4(w: &mut Vec<u8>) {
    apply_group(w, STEP4, |stem, suffix| {
        measure(stem) > 1
            && (suffix != "ion" || matches!(stem.last(), Some(b's') | Some(b't')))
    });
}

fn step5a(w: &mut Vec<u8>) {
    if let Some(stem) = stem_of(w, "e") {
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            w.pop();
        }
    }
}

fn step5b(w: &mut Vec<u8>) {
    if measure(w) > 1 && ends_double_consonant(w) && w.ends_with(b"l") {
        w.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_examples_from_the_rule_definition() {
        for (word, m) in [
            ("tr", 0),
            ("ee", 0),
            ("tree", 0),
            ("y", 0),
            ("by", 0),
            ("trouble", 1),
            ("oats", 1),
            ("trees", 1),
            ("ivy", 1),
            ("troubles", 2),
            ("private", 2),
            ("oaten", 2),
            ("orrery", 2),
        ] {
            assert_eq!(measure(word.as_bytes()), m, "{word}");
        }
    }

    #[test]
    fn step_examples() {
        let run = |f: fn(&mut Vec<u8>), word: &str| {
            let mut w = word.as_bytes().to_vec();
            f(&mut w);
            String::from_utf8(w).unwrap()
        };
        assert_eq!(run(step1a, "caresses"), "caress");
        assert_eq!(run(step1a, "ponies"), "poni");
        assert_eq!(run(step1b, "feed"), "feed");
        assert_eq!(run(step1b, "agreed"), "agree");
        assert_eq!(run(step1b, "hopping"), "hop");
        assert_eq!(run(step1b, "filing"), "file");
        assert_eq!(run(step1b, "fizzed"), "fizz");
        assert_eq!(run(step2, "relational"), "relate");
        assert_eq!(run(step2, "rational"), "rational");
        assert_eq!(run(step2, "conformabli"), "conformable");
        assert_eq!(run(step3, "triplicate"), "triplic");
        assert_eq!(run(step3, "hopeful"), "hope");
        assert_eq!(run(step4, "adoption"), "adopt");
        assert_eq!(run(step4, "cement"), "cement");
        assert_eq!(run(step5a, "probate"), "probat");
        assert_eq!(run(step5a, "rate"), "rate");
        assert_eq!(run(step5b, "controll"), "control");
        assert_eq!(run(step5b, "roll"), "roll");
    }

    #[test]
    fn short_and_non_alphabetic_tokens_pass_through() {
        assert_eq!(stem("s"), "s");
        assert_eq!(stem("is"), "is");
        assert_eq!(stem("mp3s"), "mp3s");
    }
}
