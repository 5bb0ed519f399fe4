//! Noun- and verb-phrase segments from dependency trees.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::conllu::DepSentence;
use crate::text::Document;

/// Relations whose dependent heads a noun phrase.
pub const NOUN_PHRASE_HEADS: &[&str] = &["nsubj", "nsubj:pass", "obj", "dobj", "iobj"];
/// Relations followed (transitively) when growing a noun phrase from its head.
/// Subtyped relations such as `nmod:poss` match on their base type.
pub const NOUN_PHRASE_MODIFIERS: &[&str] =
    &["det", "amod", "compound", "nmod", "nummod", "poss", "case"];
/// Relations of a verb whose whole subtree joins the verb phrase.
pub const VERB_PHRASE_ARGUMENTS: &[&str] = &["obj", "dobj", "iobj", "xcomp"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    NounPhrase,
    VerbPhrase,
}

impl SegmentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentKind::NounPhrase => "noun_phrase",
            SegmentKind::VerbPhrase => "verb_phrase",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticSegment {
    pub id: usize,
    pub text: String,
    pub kind: SegmentKind,
    pub sentence_id: usize,
    /// Sorted, non-empty, 1-based token ids within the sentence.
    pub token_ids: Vec<usize>,
}

impl SemanticSegment {
    pub fn first_token(&self) -> usize {
        self.token_ids[0]
    }

    /// Sort key for document order.
    pub fn position(&self) -> (usize, usize) {
        (self.sentence_id, self.first_token())
    }
}

fn base_rel(deprel: &str) -> &str {
    deprel.split(':').next().unwrap_or(deprel)
}

fn collect_subtree(children: &[Vec<usize>], root: usize, out: &mut BTreeSet<usize>) {
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if out.insert(id) {
            stack.extend(&children[id]);
        }
    }
}

fn surface(sentence: &DepSentence, ids: &BTreeSet<usize>) -> String {
    ids.iter()
        .map(|&id| sentence.token(id).form.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Extracts the semantic segments of one sentence.
///
/// Every token attached as a subject or object yields a noun phrase: the token
/// plus dependents reachable only through modifier relations. Every `VERB`
/// attached as `root` or `conj` yields a verb phrase: the verb plus the full
/// subtrees of its object and `xcomp` dependents. Segments with identical
/// token sets are emitted once. Output is ordered by first token id, then noun
/// phrases before verb phrases, then by length. Segment ids are numbered from
/// 0; [`number_segments`] renumbers a pooled list.
pub fn extract_segments(sentence: &DepSentence, sentence_id: usize) -> Vec<SemanticSegment> {
    let children = sentence.children();
    let mut found: Vec<(SegmentKind, BTreeSet<usize>)> = Vec::new();

    for tok in &sentence.tokens {
        if NOUN_PHRASE_HEADS.contains(&tok.deprel.as_str()) {
            let mut ids = BTreeSet::new();
            let mut stack = vec![tok.id];
            while let Some(id) = stack.pop() {
                if !ids.insert(id) {
                    continue;
                }
                for &child in &children[id] {
                    let rel = base_rel(&sentence.token(child).deprel);
                    if NOUN_PHRASE_MODIFIERS.contains(&rel) {
                        stack.push(child);
                    }
                }
            }
            found.push((SegmentKind::NounPhrase, ids));
        }

        let clause_rel = tok.deprel.eq_ignore_ascii_case("root") || tok.deprel == "conj";
        if clause_rel && tok.upos == "VERB" {
            let mut ids = BTreeSet::new();
            ids.insert(tok.id);
            for &child in &children[tok.id] {
                if VERB_PHRASE_ARGUMENTS.contains(&sentence.token(child).deprel.as_str()) {
                    collect_subtree(&children, child, &mut ids);
                }
            }
            found.push((SegmentKind::VerbPhrase, ids));
        }
    }

    let mut seen = BTreeSet::new();
    found.retain(|(_, ids)| seen.insert(ids.clone()));
    found.sort_by(|(ka, a), (kb, b)| {
        let fa = a.iter().next();
        let fb = b.iter().next();
        fa.cmp(&fb).then(ka.cmp(kb)).then(a.len().cmp(&b.len()))
    });

    found
        .into_iter()
        .enumerate()
        .map(|(k, (kind, ids))| SemanticSegment {
            id: k,
            text: surface(sentence, &ids),
            kind,
            sentence_id,
            token_ids: ids.into_iter().collect(),
        })
        .collect()
}

/// One whole-sentence segment per sentence, for input without parses.
///
/// Tokens are whitespace-separated words; the segment kind is
/// [`SegmentKind::NounPhrase`] by convention.
pub fn whole_sentence_segments(doc: &Document) -> Vec<SemanticSegment> {
    doc.sentences
        .iter()
        .map(|s| {
            let words: Vec<&str> = s.text.split_whitespace().collect();
            SemanticSegment {
                id: s.id,
                text: words.join(" "),
                kind: SegmentKind::NounPhrase,
                sentence_id: s.id,
                token_ids: (1..=words.len()).collect(),
            }
        })
        .collect()
}

/// Assigns pool-wide ids `0..n` in the current order.
pub fn number_segments(segments: &mut [SemanticSegment]) {
    for (k, seg) in segments.iter_mut().enumerate() {
        seg.id = k;
    }
}

/// Pools the segments of all sentences in document order and numbers them.
pub fn pool_segments(sentences: &[DepSentence]) -> Vec<SemanticSegment> {
    let mut pool: Vec<SemanticSegment> = sentences
        .iter()
        .enumerate()
        .flat_map(|(sid, s)| extract_segments(s, sid))
        .collect();
    number_segments(&mut pool);
    pool
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::{parse_conllu_str, DepToken};
    use crate::text::segment_sentences;
    use proptest::prelude::*;

    fn sent(tokens: &[(&str, &str, usize, &str)]) -> DepSentence {
        let conllu: String = tokens
            .iter()
            .enumerate()
            .map(|(k, (form, upos, head, rel))| {
                DepToken::new(k + 1, form, &form.to_lowercase(), upos, *head, rel)
            })
            .map(|t| {
                format!(
                    "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_\n",
                    t.id, t.form, t.lemma, t.upos, t.head, t.deprel
                )
            })
            .collect();
        parse_conllu_str(&conllu).unwrap().remove(0)
    }

    fn summary(segs: &[SemanticSegment]) -> Vec<(&str, SegmentKind)> {
        segs.iter().map(|s| (s.text.as_str(), s.kind)).collect()
    }

    #[test]
    fn she_reads_old_books() {
        let s = sent(&[
            ("She", "PRON", 2, "nsubj"),
            ("reads", "VERB", 0, "root"),
            ("old", "ADJ", 4, "amod"),
            ("books", "NOUN", 2, "obj"),
        ]);
        let segs = extract_segments(&s, 3);
        assert_eq!(
            summary(&segs),
            [
                ("She", SegmentKind::NounPhrase),
                ("reads old books", SegmentKind::VerbPhrase),
                ("old books", SegmentKind::NounPhrase),
            ]
        );
        assert_eq!(segs[1].token_ids, [2, 3, 4]);
        assert!(segs.iter().all(|s| s.sentence_id == 3));
    }

    #[test]
    fn coordinated_verbs() {
        let s = sent(&[
            ("She", "PRON", 2, "nsubj"),
            ("sings", "VERB", 0, "root"),
            ("and", "CCONJ", 4, "cc"),
            ("dances", "VERB", 2, "conj"),
        ]);
        let segs = extract_segments(&s, 0);
        let verbs: Vec<&str> = segs
            .iter()
            .filter(|s| s.kind == SegmentKind::VerbPhrase)
            .map(|s| s.text.as_str())
            .collect();
        assert_eq!(verbs, ["sings", "dances"]);
    }

    #[test]
    fn nominal_root_has_no_verb_phrase() {
        // "The night is dark": copular, root is the adjective.
        let s = sent(&[
            ("The", "DET", 2, "det"),
            ("night", "NOUN", 4, "nsubj"),
            ("is", "AUX", 4, "cop"),
            ("dark", "ADJ", 0, "root"),
        ]);
        let segs = extract_segments(&s, 0);
        assert_eq!(summary(&segs), [("The night", SegmentKind::NounPhrase)]);
    }

    #[test]
    fn modifier_closure_stops_at_other_relations() {
        // "the light of the moon that fades falls"
        let s = sent(&[
            ("the", "DET", 2, "det"),
            ("light", "NOUN", 8, "nsubj"),
            ("of", "ADP", 5, "case"),
            ("the", "DET", 5, "det"),
            ("moon", "NOUN", 2, "nmod"),
            ("that", "PRON", 7, "nsubj"),
            ("fades", "VERB", 5, "acl:relcl"),
            ("falls", "VERB", 0, "root"),
        ]);
        let segs = extract_segments(&s, 0);
        assert_eq!(segs[0].text, "the light of the moon");
        assert_eq!(segs[0].token_ids, [1, 2, 3, 4, 5]);
        assert!(segs.iter().any(|s| s.text == "that"));
        assert!(segs.iter().any(|s| s.text == "falls"));
    }

    #[test]
    fn xcomp_subtree_joins_verb_phrase() {
        // "I want to see the sea"
        let s = sent(&[
            ("I", "PRON", 2, "nsubj"),
            ("want", "VERB", 0, "root"),
            ("to", "PART", 4, "mark"),
            ("see", "VERB", 2, "xcomp"),
            ("the", "DET", 6, "det"),
            ("sea", "NOUN", 4, "obj"),
        ]);
        let segs = extract_segments(&s, 0);
        assert!(segs.iter().any(|s| s.text == "want to see the sea"));
        assert!(segs.iter().any(|s| s.text == "the sea"));
    }

    #[test]
    fn whole_sentence_fallback() {
        let doc = segment_sentences("soft  rain falls\nold pond");
        let segs = whole_sentence_segments(&doc);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].text, "soft rain falls");
        assert_eq!(segs[0].token_ids, [1, 2, 3]);
        assert_eq!(segs[1].kind, SegmentKind::NounPhrase);
        assert_eq!(segs[1].sentence_id, 1);
    }

    #[test]
    fn pooled_ids_are_dense() {
        let a = sent(&[("She", "PRON", 2, "nsubj"), ("sleeps", "VERB", 0, "root")]);
        let pool = pool_segments(&[a.clone(), a]);
        let ids: Vec<usize> = pool.iter().map(|s| s.id).collect();
        assert_eq!(ids, [0, 1, 2, 3]);
        assert_eq!(pool[2].sentence_id, 1);
    }

    const RELS: &[&str] = &[
        "nsubj", "obj", "iobj", "det", "amod", "compound", "nmod", "case", "conj", "xcomp",
        "advmod", "cc", "nmod:poss", "nsubj:pass",
    ];
    const UPOS: &[&str] = &["NOUN", "VERB", "ADJ", "DET", "PRON"];

    /// Random trees: token k+1 attaches to a strictly earlier token or the root
    /// is token 1, then ids are rotated so heads can point either way.
    fn random_tree() -> impl Strategy<Value = DepSentence> {
        (1usize..12)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(any::<proptest::sample::Index>(), n),
                    proptest::collection::vec(0..RELS.len(), n),
                    proptest::collection::vec(0..UPOS.len(), n),
                    0..n,
                )
            })
            .prop_map(|(n, parents, rels, upos, rot)| {
                let relabel = |k: usize| (k + rot) % n + 1;
                let mut tokens: Vec<DepToken> = (0..n)
                    .map(|k| {
                        let head = if k == 0 { 0 } else { relabel(parents[k].index(k)) };
                        let rel = if k == 0 { "root" } else { RELS[rels[k]] };
                        DepToken::new(relabel(k), "w", "w", UPOS[upos[k]], head, rel)
                    })
                    .collect();
                tokens.sort_by_key(|t| t.id);
                for t in &mut tokens {
                    t.form = format!("w{}", t.id);
                }
                DepSentence { tokens, text_hint: None }
            })
    }

    fn connected(s: &DepSentence, ids: &[usize]) -> bool {
        // A set is connected iff exactly one member's head lies outside it.
        ids.iter()
            .filter(|&&id| !ids.contains(&s.token(id).head))
            .count()
            == 1
    }

    proptest! {
        #[test]
        fn segment_invariants(s in random_tree()) {
            let segs = extract_segments(&s, 0);
            let mut sets = BTreeSet::new();
            for seg in &segs {
                prop_assert!(!seg.token_ids.is_empty());
                prop_assert!(seg.token_ids.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(connected(&s, &seg.token_ids));
                let text: Vec<&str> = seg.token_ids.iter().map(|&i| s.token(i).form.as_str()).collect();
                prop_assert_eq!(&seg.text, &text.join(" "));
                prop_assert!(sets.insert(seg.token_ids.clone()));
            }
            prop_assert!(segs.windows(2).all(|w| w[0].first_token() <= w[1].first_token()));
            prop_assert_eq!(extract_segments(&s, 0), segs);
        }
    }
}
