//! Deterministic feature extraction for the tagger and the parser.

mod pair;
mod resources;
mod word;

pub use pair::{pair_features, PAIR_FEATURE_DIM};
pub use resources::{
    char_ngrams, extended_features, load_brown_clusters, load_name_list, load_ngram_index, load_tag_dictionary, save_ngram_index,
    BrownClusters, NameList, NgramIndex, ResourceBundle, TagDictionary, BROWN_PREFIX_LENGTHS, NGRAM_MIN_COUNT, TOP_TAGS,
};
pub use word::{starts_with_capital, word_features, WordFeatureVector, PUNCTUATION, URL_PATTERN, WORD_FEATURE_DIM};
