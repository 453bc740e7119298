use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

/// Token ids of the `2r + 1` positions centred on one token, padded with BOS
/// on the left and EOS on the right past the sentence boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContextWindow {
    ids: Vec<usize>,
    position: usize,
    radius: usize,
}

impl ContextWindow {
    pub fn extract(sentence: &[usize], position: usize, radius: usize, bos: usize, eos: usize) -> Result<Self> {
        if position >= sentence.len() {
            return Err(Error::OutOfRange {
                index: position,
                len: sentence.len(),
            });
        }
        let ids = (0..2 * radius + 1)
            .map(|k| {
                let p = position as isize + k as isize - radius as isize;
                if p < 0 {
                    bos
                } else if p as usize >= sentence.len() {
                    eos
                } else {
                    sentence[p as usize]
                }
            })
            .collect();
        Ok(Self { ids, position, radius })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Position of the centre token in its sentence.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn center(&self) -> usize {
        self.ids[self.radius]
    }
}

pub fn extract_window(vocab: &Vocabulary, sentence: &[usize], position: usize, radius: usize) -> Result<ContextWindow> {
    ContextWindow::extract(sentence, position, radius, vocab.bos(), vocab.eos())
}
