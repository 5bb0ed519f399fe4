//! CoNLL-U ingestion.
//!
//! Token rows carry ten tab-separated columns. Multiword ranges (`1-2`) and
//! empty nodes (`3.1`) are skipped. Every sentence is checked to be a tree
//! rooted at exactly one token before it is handed out.

use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {message}")]
    Tree { line: usize, message: String },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

impl ConlluError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConlluError::Format { line, .. } | ConlluError::Tree { line, .. } => Some(*line),
            ConlluError::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepToken {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    /// 0 marks the root.
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl DepToken {
    /// A token with the unused columns set to `_`.
    pub fn new(id: usize, form: &str, lemma: &str, upos: &str, head: usize, deprel: &str) -> Self {
        DepToken {
            id,
            form: form.to_string(),
            lemma: lemma.to_string(),
            upos: upos.to_string(),
            xpos: "_".to_string(),
            feats: "_".to_string(),
            head,
            deprel: deprel.to_string(),
            deps: "_".to_string(),
            misc: "_".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepSentence {
    pub tokens: Vec<DepToken>,
    /// Value of a `# text = ...` comment, if present.
    pub text_hint: Option<String>,
}

impl DepSentence {
    /// Validates the tree invariants and builds the sentence.
    ///
    /// `lines[k]` is the source line number of `tokens[k]`, used in errors.
    fn checked(
        tokens: Vec<DepToken>,
        text_hint: Option<String>,
        lines: &[usize],
    ) -> Result<Self, ConlluError> {
        let n = tokens.len();
        let tree_err = |line: usize, message: String| ConlluError::Tree { line, message };

        for (k, tok) in tokens.iter().enumerate() {
            if tok.id != k + 1 {
                return Err(ConlluError::Format {
                    line: lines[k],
                    message: format!("expected token id {}, found {}", k + 1, tok.id),
                });
            }
            if tok.head > n {
                return Err(tree_err(
                    lines[k],
                    format!("head {} outside sentence of {} tokens", tok.head, n),
                ));
            }
            if tok.head == tok.id {
                return Err(tree_err(lines[k], format!("token {} is its own head", tok.id)));
            }
        }

        let roots: Vec<usize> = (0..n).filter(|&k| tokens[k].head == 0).collect();
        match roots.len() {
            0 => return Err(tree_err(lines[0], "sentence has no root".to_string())),
            1 => {}
            _ => {
                return Err(tree_err(
                    lines[roots[1]],
                    format!("multiple roots (tokens {} and {})", roots[0] + 1, roots[1] + 1),
                ))
            }
        }

        // Every token must reach the root within n steps.
        for start in 0..n {
            let mut cur = start;
            let mut steps = 0;
            while tokens[cur].head != 0 {
                cur = tokens[cur].head - 1;
                steps += 1;
                if steps > n {
                    return Err(tree_err(
                        lines[start],
                        format!("token {} is on a head cycle", start + 1),
                    ));
                }
            }
        }

        Ok(DepSentence { tokens, text_hint })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, id: usize) -> &DepToken {
        &self.tokens[id - 1]
    }

    /// Children of each token, indexed by token id (index 0 holds the root's children).
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.tokens.len() + 1];
        for tok in &self.tokens {
            children[tok.head].push(tok.id);
        }
        children
    }

    pub fn to_conllu(&self) -> String {
        let mut out = String::new();
        if let Some(text) = &self.text_hint {
            let _ = writeln!(out, "# text = {text}");
        }
        for t in &self.tokens {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.id, t.form, t.lemma, t.upos, t.xpos, t.feats, t.head, t.deprel, t.deps, t.misc
            );
        }
        out
    }
}

pub fn write_conllu(sentences: &[DepSentence]) -> String {
    sentences
        .iter()
        .map(|s| s.to_conllu() + "\n")
        .collect::<Vec<_>>()
        .concat()
}

pub fn parse_conllu_str(input: &str) -> Result<Vec<DepSentence>, ConlluError> {
    parse_conllu(input.as_bytes())
}

pub fn parse_conllu<R: BufRead>(input: R) -> Result<Vec<DepSentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut lines = Vec::new();
    let mut text_hint = None;

    let mut flush = |tokens: &mut Vec<DepToken>,
                     lines: &mut Vec<usize>,
                     text_hint: &mut Option<String>|
     -> Result<(), ConlluError> {
        if !tokens.is_empty() {
            let sent = DepSentence::checked(std::mem::take(tokens), text_hint.take(), lines)?;
            sentences.push(sent);
        }
        lines.clear();
        *text_hint = None;
        Ok(())
    };

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);

        if line.trim().is_empty() {
            flush(&mut tokens, &mut lines, &mut text_hint)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(text) = comment.trim_start().strip_prefix("text") {
                if let Some(value) = text.trim_start().strip_prefix('=') {
                    text_hint = Some(value.trim().to_string());
                }
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::Format {
                line: line_no,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let int_field = |name: &str, value: &str| {
            value.parse::<usize>().map_err(|_| ConlluError::Format {
                line: line_no,
                message: format!("{name} {value:?} is not a non-negative integer"),
            })
        };
        let id = int_field("id", cols[0])?;
        let head = int_field("head", cols[6])?;
        tokens.push(DepToken {
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            xpos: cols[4].to_string(),
            feats: cols[5].to_string(),
            head,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
        });
        lines.push(line_no);
    }
    flush(&mut tokens, &mut lines, &mut text_hint)?;

    Ok(sentences)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHE_SLEEPS: &str = "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n2\tsleeps\tsleep\tVERB\t_\t_\t0\troot\t_\t_";

    #[test]
    fn single_block() {
        let sents = parse_conllu_str(SHE_SLEEPS).unwrap();
        assert_eq!(sents.len(), 1);
        assert_eq!(sents[0].len(), 2);
        assert_eq!(sents[0].tokens[0], DepToken::new(1, "She", "she", "PRON", 2, "nsubj"));
        assert_eq!(sents[0].tokens[1].head, 0);
        assert_eq!(sents[0].tokens[1].deprel, "root");
    }

    #[test]
    fn comments_are_skipped() {
        let input = format!("# sent_id = 1\n# text = She sleeps\n{SHE_SLEEPS}\n");
        let sents = parse_conllu_str(&input).unwrap();
        assert_eq!(sents[0].len(), 2);
        assert_eq!(sents[0].text_hint.as_deref(), Some("She sleeps"));
    }

    #[test]
    fn multiword_and_empty_nodes_skipped() {
        let input = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
                     1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n\
                     2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n\
                     3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n\
                     3.1\tgone\tgo\tVERB\t_\t_\t_\t_\t3:conj\t_\n";
        let sents = parse_conllu_str(input).unwrap();
        assert_eq!(sents[0].len(), 3);
    }

    #[test]
    fn crlf_and_multiple_blocks() {
        let input = format!("{SHE_SLEEPS}\r\n\r\n\r\n{SHE_SLEEPS}\r\n");
        let input = input.replace("\t_\n", "\t_\r\n");
        assert_eq!(parse_conllu_str(&input).unwrap().len(), 2);
    }

    #[test]
    fn nine_columns_is_format_error() {
        let input = "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\n2\tsleeps\tsleep\tVERB\t_\t_\t0\troot\t_\t_\n";
        let err = parse_conllu_str(input).unwrap_err();
        assert!(matches!(err, ConlluError::Format { line: 1, .. }), "{err}");
        assert!(err.to_string().starts_with("line 1:"));
    }

    #[test]
    fn non_integer_head() {
        let input = "# c\n1\tShe\tshe\tPRON\t_\t_\tx\tnsubj\t_\t_\n";
        let err = parse_conllu_str(input).unwrap_err();
        assert!(matches!(err, ConlluError::Format { line: 2, .. }), "{err}");
    }

    #[test]
    fn tree_errors_name_lines() {
        let no_root = "1\ta\ta\tX\t_\t_\t2\tdep\t_\t_\n2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n";
        let err = parse_conllu_str(no_root).unwrap_err();
        assert!(matches!(err, ConlluError::Tree { line: 1, .. }), "{err}");

        let two_roots = "\n1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t0\troot\t_\t_\n";
        let err = parse_conllu_str(two_roots).unwrap_err();
        assert!(matches!(err, ConlluError::Tree { line: 3, .. }), "{err}");

        let cycle = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n\
                     2\tb\tb\tX\t_\t_\t3\tdep\t_\t_\n\
                     3\tc\tc\tX\t_\t_\t2\tdep\t_\t_\n";
        let err = parse_conllu_str(cycle).unwrap_err();
        assert!(matches!(err, ConlluError::Tree { line: 2, .. }), "{err}");

        let self_head = "1\ta\ta\tX\t_\t_\t1\tdep\t_\t_\n";
        assert!(matches!(
            parse_conllu_str(self_head).unwrap_err(),
            ConlluError::Tree { line: 1, .. }
        ));

        let out_of_range = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t7\tdep\t_\t_\n";
        assert!(matches!(
            parse_conllu_str(out_of_range).unwrap_err(),
            ConlluError::Tree { line: 2, .. }
        ));
    }

    #[test]
    fn ids_must_be_sequential() {
        let input = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n3\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n";
        assert!(matches!(
            parse_conllu_str(input).unwrap_err(),
            ConlluError::Format { line: 2, .. }
        ));
    }

    #[test]
    fn empty_input() {
        assert!(parse_conllu_str("").unwrap().is_empty());
        assert!(parse_conllu_str("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn write_then_parse() {
        let input = format!("# text = She sleeps\n{SHE_SLEEPS}\n");
        let sents = parse_conllu_str(&input).unwrap();
        assert_eq!(parse_conllu_str(&write_conllu(&sents)).unwrap(), sents);
    }
}
