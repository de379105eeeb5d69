//! Offset-preserving tokenizer and a handwritten-rule POS tagger.
//!
//! Tokenization splits on Unicode whitespace, then peels leading and trailing
//! punctuation (`.,;:!?"'()%`) off each chunk as separate one-character
//! tokens. Anything left in the middle stays whole, so `$0.03`, `3rd` and
//! `company's` are single tokens.
//!
//! Tagging runs three stages per token: closed-class lexicon, suffix and
//! shape rules, then a default of `NN`. A few rules look at the previous tag.

use crate::pos::PosTag;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    /// Byte offsets into the instance text, half-open.
    pub start: usize,
    pub end: usize,
    pub pos: PosTag,
}

/// Anything a tagger can read features from.
pub trait Lexeme {
    fn surface(&self) -> &str;
    fn pos(&self) -> PosTag;
}

impl Lexeme for Token {
    fn surface(&self) -> &str {
        &self.surface
    }

    fn pos(&self) -> PosTag {
        self.pos
    }
}

const SPLIT_PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', '"', '\'', '(', ')', '%'];

fn token(text: &str, start: usize, end: usize) -> Token {
    Token {
        surface: text[start..end].to_string(),
        start,
        end,
        pos: PosTag::PAD,
    }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chunk_start: Option<usize> = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        match (c.is_whitespace(), chunk_start) {
            (true, Some(s)) => {
                split_chunk(text, s, i, &mut tokens);
                chunk_start = None;
            }
            (false, None) => chunk_start = Some(i),
            _ => {}
        }
    }
    tokens
}

fn split_chunk(text: &str, start: usize, end: usize, out: &mut Vec<Token>) {
    let mut lo = start;
    let mut hi = end;
    while let Some(c) = text[lo..hi].chars().next() {
        if !SPLIT_PUNCT.contains(&c) {
            break;
        }
        out.push(token(text, lo, lo + c.len_utf8()));
        lo += c.len_utf8();
    }
    let mut trailing = Vec::new();
    while let Some(c) = text[lo..hi].chars().next_back() {
        if !SPLIT_PUNCT.contains(&c) {
            break;
        }
        trailing.push(token(text, hi - c.len_utf8(), hi));
        hi -= c.len_utf8();
    }
    if lo < hi {
        out.push(token(text, lo, hi));
    }
    out.extend(trailing.into_iter().rev());
}

fn lexicon(lower: &str) -> Option<&'static str> {
    let tag = match lower {
        "the" | "a" | "an" | "this" | "that" | "these" | "those" | "each" | "every" | "another" | "some"
        | "any" | "no" | "all" | "both" | "either" | "neither" => "DT",
        "i" | "you" | "he" | "she" | "it" | "we" | "they" | "me" | "him" | "us" | "them" | "itself"
        | "themselves" | "himself" | "herself" | "ourselves" => "PRP",
        "my" | "your" | "his" | "her" | "its" | "our" | "their" => "PRP$",
        "of" | "in" | "on" | "at" | "by" | "for" | "with" | "from" | "as" | "about" | "into" | "over"
        | "after" | "before" | "since" | "during" | "than" | "because" | "due" | "through" | "under"
        | "between" | "against" | "among" | "despite" | "per" | "if" | "while" | "although" | "though"
        | "whereas" | "whether" | "amid" | "across" | "within" | "without" | "upon" | "toward"
        | "towards" | "around" | "above" | "below" | "near" | "throughout" | "until" | "unless" | "via"
        | "like" | "following" => "IN",
        "and" | "or" | "but" | "nor" | "yet" | "plus" => "CC",
        "to" => "TO",
        "will" | "would" | "can" | "could" | "may" | "might" | "shall" | "should" | "must" => "MD",
        "is" | "has" | "does" | "'s" => "VBZ",
        "are" | "have" | "do" | "am" | "'re" | "'ve" => "VBP",
        "was" | "were" | "had" | "did" | "drew" | "rose" | "fell" | "grew" | "saw" | "made" | "said"
        | "took" | "came" | "went" | "gave" | "paid" | "sold" | "bought" | "led" | "held" | "kept"
        | "lost" | "met" | "ran" | "set" | "cut" | "put" | "hit" | "spent" | "began" | "became"
        | "brought" | "thought" | "told" | "found" | "left" | "felt" | "won" | "shrank" | "sank"
        | "struck" | "built" | "sent" | "reported" => "VBD",
        "be" => "VB",
        "been" | "done" | "seen" | "taken" | "given" | "grown" | "fallen" | "risen" | "shown" | "known"
        | "driven" | "written" => "VBN",
        "being" => "VBG",
        "one" | "two" | "three" | "four" | "five" | "six" | "seven" | "eight" | "nine" | "ten" | "eleven"
        | "twelve" | "twenty" | "thirty" | "forty" | "fifty" | "hundred" | "thousand" | "million"
        | "billion" | "trillion" | "dozen" => "CD",
        "there" => "EX",
        "which" | "whatever" | "whichever" => "WDT",
        "who" | "what" | "whom" => "WP",
        "whose" => "WP$",
        "when" | "where" | "why" | "how" => "WRB",
        "not" | "n't" | "also" | "very" | "only" | "still" | "already" | "just" | "even" | "however"
        | "too" | "again" | "often" | "now" | "then" | "here" | "soon" | "ago" | "well" | "almost" | "up"
        | "down" | "out" | "off" | "back" => "RB",
        "more" | "less" | "better" | "worse" | "earlier" | "later" => "RBR",
        "most" | "least" => "RBS",
        "other" | "such" | "new" | "high" | "low" | "good" | "bad" | "big" | "small" | "large" | "long"
        | "short" | "strong" | "weak" | "net" | "gross" | "total" | "annual" | "quarterly" | "full"
        | "few" | "many" | "much" | "several" | "own" | "same" | "popular" | "recent" | "previous"
        | "last" | "first" | "next" | "major" => "JJ",
        "higher" | "lower" | "larger" | "smaller" | "bigger" | "greater" | "older" | "younger"
        | "stronger" | "weaker" => "JJR",
        "number" | "order" | "quarter" | "member" | "customer" | "consumer" | "investor" | "lender"
        | "holder" | "shareholder" | "officer" | "manager" | "partner" | "provider" | "paper" | "matter"
        | "water" | "power" | "center" | "letter" | "interest" | "business" | "loss" | "process"
        | "access" | "address" | "bonus" | "status" | "analysis" | "basis" | "crisis" | "news" | "series"
        | "percent" => "NN",
        "ever" | "never" | "rather" | "further" | "together" | "moreover" | "therefore" | "thus"
        | "hence" => "RB",
        _ => return None,
    };
    Some(tag)
}

fn is_punct(s: &str) -> bool {
    s.chars().all(|c| !c.is_alphanumeric())
}

fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

/// Tags every token in place order; deterministic and total.
pub fn pos_tag(tokens: &[Token]) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let prev = out.last().map(|t| t.pos);
        let sentence_initial = match out.last() {
            None => true,
            Some(t) => matches!(t.surface.as_str(), "." | "!" | "?"),
        };
        let tag = tag_word(&tok.surface, prev, sentence_initial);
        out.push(Token {
            pos: PosTag::named(tag),
            ..tok.clone()
        });
    }
    out
}

/// Convenience: tokenize then tag.
pub fn analyze(text: &str) -> Vec<Token> {
    pos_tag(&tokenize(text))
}

fn tag_word(surface: &str, prev: Option<PosTag>, sentence_initial: bool) -> &'static str {
    let lower = surface.to_lowercase();
    let prev_name = prev.map(PosTag::name).unwrap_or("");

    // stage 1: closed-class lexicon, with two contextual overrides
    if let Some(tag) = lexicon(&lower) {
        if lower == "that" && matches!(prev_name, "NN" | "NNS" | "NNP") {
            return "WDT";
        }
        if tag == "VBD" && is_have_or_be(prev_name) {
            return "VBN";
        }
        return tag;
    }

    // stage 2: shape rules
    if surface.chars().any(|c| c.is_ascii_digit()) {
        return "CD";
    }
    if surface == "%" {
        return "NN";
    }
    if is_punct(surface) {
        return "SYM";
    }
    if starts_upper(surface) && !sentence_initial {
        return if surface.len() > 1 && surface.chars().all(char::is_uppercase) {
            "NNP"
        } else if lower.ends_with('s') && !lower.ends_with("ss") && prev_name == "NNP" {
            "NNPS"
        } else {
            "NNP"
        };
    }

    // stage 2b: suffix rules on the lowercased form
    if lower.len() > 3 && lower.ends_with("ly") {
        return "RB";
    }
    if lower.len() > 4 && lower.ends_with("ing") {
        return "VBG";
    }
    if lower.len() > 3 && lower.ends_with("ed") {
        return if is_have_or_be(prev_name) { "VBN" } else { "VBD" };
    }
    if lower.len() > 4 && lower.ends_with("est") {
        return "JJS";
    }
    if lower.len() > 4 && lower.ends_with("er") {
        return "JJR";
    }
    if ["ous", "ful", "ive", "able", "ible", "al", "ic", "less"]
        .iter()
        .any(|s| lower.len() > s.len() + 2 && lower.ends_with(s))
    {
        return "JJ";
    }
    if lower.len() > 3 && lower.ends_with('s') && !["ss", "us", "is"].iter().any(|s| lower.ends_with(s)) {
        return if prev_name == "PRP" { "VBZ" } else { "NNS" };
    }
    if prev_name == "TO" || prev_name == "MD" {
        return "VB";
    }

    // stage 3
    "NN"
}

// Tags of the auxiliaries that make a following -ed form a participle.
fn is_have_or_be(prev_name: &str) -> bool {
    matches!(prev_name, "VBZ" | "VBP" | "VB" | "VBN")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    fn tags(words: &[&str]) -> Vec<&'static str> {
        let text = words.join(" ");
        analyze(&text).iter().map(|t| t.pos.name()).collect()
    }

    #[test]
    fn whitespace_split_with_offsets() {
        let toks = tokenize("It is consistently");
        let got: Vec<_> = toks
            .iter()
            .map(|t| (t.surface.as_str(), t.start, t.end))
            .collect();
        assert_eq!(got, vec![("It", 0, 2), ("is", 3, 5), ("consistently", 6, 18)]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t").is_empty());
    }

    #[test]
    fn currency_kept_punctuation_split() {
        // Hand-applied rules: "a" | "$0.03" ($ is not split punctuation, inner
        // "." is not at an edge) | "dividend." -> "dividend" + "."
        assert_eq!(
            surfaces(&tokenize("a $0.03 dividend.")),
            vec!["a", "$0.03", "dividend", "."]
        );
        assert_eq!(
            surfaces(&tokenize("(AGI) yield of 3.42%. September 3rd,")),
            vec![
                "(",
                "AGI",
                ")",
                "yield",
                "of",
                "3.42",
                "%",
                ".",
                "September",
                "3rd",
                ","
            ]
        );
    }

    #[test]
    fn sunshine_state_tags() {
        assert_eq!(
            tags(&["The", "Sunshine", "State", "drew"]),
            vec!["DT", "NNP", "NNP", "VBD"]
        );
        assert_eq!(
            tags(&["It", "is", "consistently", "one"]),
            vec!["PRP", "VBZ", "RB", "CD"]
        );
        assert_eq!(tags(&["55", "and", "older"]), vec!["CD", "CC", "JJR"]);
        assert_eq!(tags(&["and", "low", "taxes"]), vec!["CC", "JJ", "NNS"]);
    }

    #[test]
    fn unknown_word_defaults_to_noun() {
        assert_eq!(tags(&["zzqx"]), vec!["NN"]);
    }

    #[test]
    fn participle_after_auxiliary() {
        assert_eq!(tags(&["it", "has", "declined"]), vec!["PRP", "VBZ", "VBN"]);
        assert_eq!(tags(&["prices", "declined"]), vec!["NNS", "VBD"]);
    }

    #[test]
    fn punctuation_is_sym() {
        assert_eq!(
            tags(&["rates", "-", "fell", "."]),
            vec!["NNS", "SYM", "VBD", "SYM"]
        );
    }

    #[test]
    fn multibyte_offsets() {
        let text = "Café «prices» rose.";
        for t in tokenize(text) {
            assert_eq!(&text[t.start..t.end], t.surface);
        }
    }
}
