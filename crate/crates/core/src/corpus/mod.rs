//! Text analysis and the tf-idf term-document index.

mod index;
pub mod porter;
mod sparse;
mod text;

pub use index::{corpus_to_jsonl, read_corpus, Document, TermDocumentMatrix};
pub use porter::stem;
pub use sparse::SparseMatrix;
pub use text::{analyze, is_stop_word, remove_stopwords, term_of, tokenize, STOP_WORDS};
