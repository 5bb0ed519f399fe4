//! Rule-based sentence segmentation.
//!
//! Units end at a cluster of terminal punctuation (`.`, `?`, `!`, `。`, `？`,
//! `！`) followed by whitespace or end of text, and at every line break.
//! A lone period that closes a known abbreviation does not end a unit.
//! Line breaks always end a unit, so unpunctuated poem lines come out one per
//! unit and blank lines never join their neighbours.

use serde::{Deserialize, Serialize};

/// Abbreviations that never end a sentence, compared case-insensitively
/// against the whitespace-delimited word that carries the period.
pub const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "dr.", "st.", "vs.", "etc.", "e.g.", "i.e.", "prof.", "sr.", "jr.",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: usize,
    pub text: String,
    /// `[start, end)` in Unicode scalar values.
    pub char_span: (usize, usize),
    /// `[start, end)` in UTF-8 bytes; always covers the same text as `char_span`.
    pub byte_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub raw_text: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// First non-blank line of the source text, trimmed.
    pub fn title(&self) -> &str {
        self.raw_text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .unwrap_or("")
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '?' | '!' | '。' | '？' | '！')
}

fn is_cjk_terminal(c: char) -> bool {
    matches!(c, '。' | '？' | '！')
}

/// Closing quotes and brackets that stay attached to the preceding sentence.
fn is_closer(c: char) -> bool {
    matches!(
        c,
        '"' | '\'' | ')' | ']' | '}' | '”' | '’' | '»' | '」' | '』' | '）' | '】' | '》'
    )
}

pub fn is_abbreviation(word: &str) -> bool {
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

pub fn segment_sentences(raw_text: &str) -> Document {
    let chars: Vec<(usize, char)> = raw_text.char_indices().collect();
    let n = chars.len();
    let byte_at = |ci: usize| if ci < n { chars[ci].0 } else { raw_text.len() };

    let mut sentences = Vec::new();
    let mut emit = |start: usize, end: usize| {
        let mut s = start;
        let mut e = end;
        while s < e && chars[s].1.is_whitespace() {
            s += 1;
        }
        while e > s && chars[e - 1].1.is_whitespace() {
            e -= 1;
        }
        if s == e {
            return;
        }
        let byte_span = (byte_at(s), byte_at(e));
        sentences.push(Sentence {
            id: sentences.len(),
            text: raw_text[byte_span.0..byte_span.1].to_string(),
            char_span: (s, e),
            byte_span,
        });
    };

    let mut unit_start = 0;
    let mut i = 0;
    while i < n {
        let c = chars[i].1;
        if c == '\n' {
            emit(unit_start, i);
            unit_start = i + 1;
            i += 1;
            continue;
        }
        if !is_terminal(c) {
            i += 1;
            continue;
        }

        let mut j = i;
        let mut cjk = false;
        while j < n && is_terminal(chars[j].1) {
            cjk |= is_cjk_terminal(chars[j].1);
            j += 1;
        }
        let cluster_len = j - i;
        while j < n && is_closer(chars[j].1) {
            j += 1;
        }

        let at_boundary = cjk || j == n || chars[j].1.is_whitespace();
        let abbreviated = c == '.' && cluster_len == 1 && {
            let mut w = i;
            while w > unit_start && !chars[w - 1].1.is_whitespace() {
                w -= 1;
            }
            is_abbreviation(&raw_text[byte_at(w)..byte_at(i + 1)])
        };
        if at_boundary && !abbreviated {
            emit(unit_start, j);
            unit_start = j;
        }
        i = j;
    }
    emit(unit_start, n);

    Document {
        raw_text: raw_text.to_string(),
        sentences,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(doc: &Document) -> Vec<&str> {
        doc.sentences.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn two_periods() {
        let doc = segment_sentences("Quiet night. The moon falls.");
        assert_eq!(texts(&doc), ["Quiet night.", "The moon falls."]);
    }

    #[test]
    fn abbreviation_does_not_split() {
        let doc = segment_sentences("Mr. Smith slept.");
        assert_eq!(texts(&doc), ["Mr. Smith slept."]);
        let doc = segment_sentences("Fruit, e.g. plums, i.E. ripe ones. Done");
        assert_eq!(texts(&doc), ["Fruit, e.g. plums, i.E. ripe ones.", "Done"]);
        let doc = segment_sentences("(Dr. Who) left.");
        assert_eq!(doc.len(), 1);
    }

    #[test]
    fn line_fallback() {
        let doc = segment_sentences("soft rain\nold pond\n");
        assert_eq!(texts(&doc), ["soft rain", "old pond"]);
    }

    #[test]
    fn empty_input() {
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences(" \n\n\t ").is_empty());
    }

    #[test]
    fn blank_line_terminates() {
        let doc = segment_sentences("first stanza ends\n\nsecond begins");
        assert_eq!(texts(&doc), ["first stanza ends", "second begins"]);
    }

    #[test]
    fn question_exclaim_and_quotes() {
        let doc = segment_sentences("Why? \"Go!\" she said. 3.14 is pi");
        assert_eq!(texts(&doc), ["Why?", "\"Go!\"", "she said.", "3.14 is pi"]);
    }

    #[test]
    fn cjk_terminals_split_without_space() {
        let doc = segment_sentences("床前明月光。疑是地上霜！举头望明月");
        assert_eq!(texts(&doc), ["床前明月光。", "疑是地上霜！", "举头望明月"]);
        assert_eq!(doc.sentences[1].char_span, (6, 12));
    }

    #[test]
    fn crlf_lines() {
        let doc = segment_sentences("one line\r\ntwo line\r\n");
        assert_eq!(texts(&doc), ["one line", "two line"]);
    }

    #[test]
    fn title_is_first_nonblank_line() {
        let doc = segment_sentences("\n  Night Thoughts \nmoon");
        assert_eq!(doc.title(), "Night Thoughts");
    }

    fn terminal_marks(s: &str) -> usize {
        s.chars().filter(|&c| is_terminal(c)).count()
    }

    /// Lines whose last non-blank character is not terminal punctuation,
    /// counting a trailing line without a newline.
    fn unpunctuated_lines(s: &str) -> usize {
        s.split('\n')
            .filter(|l| {
                let t = l.trim();
                !t.is_empty()
                    && t
                        .trim_end_matches(is_closer)
                        .chars()
                        .last()
                        .map_or(true, |c| !is_terminal(c))
            })
            .count()
    }

    fn poemish() -> impl Strategy<Value = String> {
        proptest::collection::vec(
            prop_oneof![
                "[a-zA-Z]{1,6}",
                Just(" ".to_string()),
                Just("  ".to_string()),
                Just("\n".to_string()),
                Just("\n\n".to_string()),
                Just(". ".to_string()),
                Just("?".to_string()),
                Just("!".to_string()),
                Just("。".to_string()),
                Just("Mr. ".to_string()),
                Just("\"".to_string()),
                Just("é".to_string()),
            ],
            0..40,
        )
        .prop_map(|parts| parts.concat())
    }

    proptest! {
        #[test]
        fn spans_round_trip_and_gaps_are_whitespace(text in poemish()) {
            let doc = segment_sentences(&text);
            let chars: Vec<char> = text.chars().collect();
            let mut cursor = 0;
            for (k, s) in doc.sentences.iter().enumerate() {
                prop_assert_eq!(s.id, k);
                prop_assert!(s.char_span.0 >= cursor);
                prop_assert!(chars[cursor..s.char_span.0].iter().all(|c| c.is_whitespace()));
                let piece: String = chars[s.char_span.0..s.char_span.1].iter().collect();
                prop_assert_eq!(&piece, &s.text);
                prop_assert_eq!(&text[s.byte_span.0..s.byte_span.1], s.text.as_str());
                prop_assert!(!s.text.trim().is_empty());
                cursor = s.char_span.1;
            }
            prop_assert!(chars[cursor..].iter().all(|c| c.is_whitespace()));
        }

        #[test]
        fn resegmenting_a_sentence_is_identity(text in poemish()) {
            for s in segment_sentences(&text).sentences {
                let again = segment_sentences(&s.text);
                prop_assert_eq!(again.sentences.len(), 1);
                prop_assert_eq!(&again.sentences[0].text, &s.text);
            }
        }

        #[test]
        fn unit_count_bounded(text in poemish()) {
            let doc = segment_sentences(&text);
            prop_assert!(doc.len() <= terminal_marks(&text) + unpunctuated_lines(&text));
        }
    }
}
