//! Local part-of-speech tagger over type embeddings, token embeddings and
//! surface features.

mod corpus;
mod model;
mod train;

pub use corpus::{load_tagged, read_tagged, subsample, write_tagged, TaggedSentence, Tagset};
pub use model::{compose_tagger_input, tag_sentence, tagging_accuracy, TaggerConfig, TaggerModel};
pub use train::{train_tagger, TaggerTrainOutcome};
