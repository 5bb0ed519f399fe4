use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

use crate::extract::SemanticSegment;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {name} {value} is outside [-1, 1]")]
    Range {
        line: usize,
        name: &'static str,
        value: f64,
    },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

/// Word → (valence, arousal), keys lowercase, values in `[-1, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VadLexicon {
    entries: HashMap<String, (f64, f64)>,
}

impl VadLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` and leaves the lexicon unchanged if a value is out of range.
    pub fn insert(&mut self, word: &str, valence: f64, arousal: f64) -> bool {
        if !(-1.0..=1.0).contains(&valence) || !(-1.0..=1.0).contains(&arousal) {
            return false;
        }
        self.entries.insert(word.to_lowercase(), (valence, arousal));
        true
    }

    pub fn get(&self, word: &str) -> Option<(f64, f64)> {
        self.entries.get(&word.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_lexicon_str(input: &str) -> Result<VadLexicon, LexiconError> {
    load_lexicon(input.as_bytes())
}

/// Reads `word<TAB>valence<TAB>arousal` lines. `#` lines and blank lines are
/// ignored; a repeated word keeps its last entry.
pub fn load_lexicon<R: BufRead>(input: R) -> Result<VadLexicon, LexiconError> {
    let mut lexicon = VadLexicon::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(LexiconError::Format {
                line: line_no,
                message: format!("expected 3 tab-separated columns, found {}", cols.len()),
            });
        }
        let number = |name: &'static str, raw: &str| -> Result<f64, LexiconError> {
            let value: f64 = raw.trim().parse().map_err(|_| LexiconError::Format {
                line: line_no,
                message: format!("{name} {raw:?} is not a number"),
            })?;
            if !(-1.0..=1.0).contains(&value) {
                return Err(LexiconError::Range {
                    line: line_no,
                    name,
                    value,
                });
            }
            Ok(value)
        };
        let valence = number("valence", cols[1])?;
        let arousal = number("arousal", cols[2])?;
        let word = cols[0].trim();
        if word.is_empty() {
            return Err(LexiconError::Format {
                line: line_no,
                message: "empty word".to_string(),
            });
        }
        lexicon.insert(word, valence, arousal);
    }
    Ok(lexicon)
}

/// Mean valence and arousal over the lexicon hits among the maximal
/// alphabetic runs of `text`; `(0, 0)` when nothing matches.
pub fn score_text_lexicon(text: &str, lexicon: &VadLexicon) -> (f64, f64) {
    let mut sum = (0.0, 0.0);
    let mut hits = 0usize;
    for word in text.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty()) {
        if let Some((v, a)) = lexicon.get(word) {
            sum.0 += v;
            sum.1 += a;
            hits += 1;
        }
    }
    if hits == 0 {
        return (0.0, 0.0);
    }
    let n = hits as f64;
    ((sum.0 / n).clamp(-1.0, 1.0), (sum.1 / n).clamp(-1.0, 1.0))
}

pub fn score_segment_lexicon(segment: &SemanticSegment, lexicon: &VadLexicon) -> (f64, f64) {
    score_text_lexicon(&segment.text, lexicon)
}
