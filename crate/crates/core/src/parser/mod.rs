//! Parent-prediction dependency parser: each selected token independently
//! picks its highest-scoring parent among the wall and the other selected
//! tokens.

mod corpus;
mod eval;
mod model;
mod train;

pub use corpus::{load_parsed, read_parsed, write_parsed, ParsedSentence};
pub use eval::{attachment_f1, export_arc_scores, read_arc_scores, ArcScoreLine, AttachmentScores};
pub use model::{arc_loss, arc_score, compose_arc_input, predict_heads, sentence_loss, ParserConfig, ParserModel};
pub use train::{parse_corpus, train_parser, ParserTrainOutcome};
