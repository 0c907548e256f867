//! Tokenization and stop-word filtering.

use super::porter;

/// Lucene 4.10 English stop set.
pub const STOP_WORDS: [&str; 33] = [
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if", "in", "into", "is", "it",
    "no", "not", "of", "on", "or", "such", "that", "the", "their", "then", "there", "these",
    "they", "this", "to", "was", "will", "with",
];

pub fn is_stop_word(token: &str) -> bool {
    STOP_WORDS.binary_search(&token).is_ok()
}

/// Split on every non-alphanumeric character and lowercase. Empty and
/// all-digit tokens are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !t.chars().all(|c| c.is_ascii_digit()))
        .map(str::to_lowercase)
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| !is_stop_word(t)).collect()
}

/// Map one surface word to its index term, or `None` if it is a stop word,
/// a separator, or tokenizes to nothing. Words that split into several
/// tokens (`"atom's"`) map to the stem of their first non-stop token.
pub fn term_of(word: &str) -> Option<String> {
    remove_stopwords(tokenize(word))
        .first()
        .map(|t| porter::stem(t))
}

/// tokenize -> stop words -> stem.
pub fn analyze(text: &str) -> Vec<String> {
    remove_stopwords(tokenize(text))
        .iter()
        .map(|t| porter::stem(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn stop_list_is_sorted_and_complete() {
        let mut sorted = STOP_WORDS;
        sorted.sort_unstable();
        assert_eq!(sorted, STOP_WORDS);
        assert_eq!(STOP_WORDS.len(), 33);
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("I like my coffee."), strings(&["i", "like", "my", "coffee"]));
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("Atom's nucleus\u{2014}dense!"),
            strings(&["atom", "s", "nucleus", "dense"])
        );
        assert_eq!(tokenize("in 1897 the MP3"), strings(&["in", "the", "mp3"]));
        assert!(tokenize("3333333 &&&&&&").is_empty());
    }

    #[test]
    fn stopword_examples() {
        assert_eq!(remove_stopwords(strings(&["the", "atom"])), strings(&["atom"]));
        assert_eq!(
            remove_stopwords(strings(&["atom", "nucleus"])),
            strings(&["atom", "nucleus"])
        );
        assert!(remove_stopwords(strings(&["a", "an", "and"])).is_empty());
    }

    #[test]
    fn term_of_words() {
        assert_eq!(term_of("Atoms").as_deref(), Some("atom"));
        assert_eq!(term_of("the"), None);
        assert_eq!(term_of("&&&&&&"), None);
        assert_eq!(term_of("3333333"), None);
    }
}
