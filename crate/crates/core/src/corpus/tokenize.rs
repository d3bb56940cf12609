use crate::error::{Error, Result};
use crate::tokens::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenizerOptions {
    pub lowercase: bool,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        Self { lowercase: true }
    }
}

/// Lowercased whitespace tokenization with leading and trailing ASCII punctuation split
/// off one character per token.
pub fn tokenize(raw: &str) -> Result<TokenSequence> {
    tokenize_with(raw, TokenizerOptions::default())
}

pub fn tokenize_with(raw: &str, options: TokenizerOptions) -> Result<TokenSequence> {
    if raw.trim().is_empty() {
        return Err(Error::invalid("cannot tokenize empty text"));
    }
    let text = if options.lowercase {
        raw.to_lowercase()
    } else {
        raw.to_string()
    };
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let start = chunk
            .find(|c: char| !c.is_ascii_punctuation())
            .unwrap_or(chunk.len());
        let end = chunk
            .rfind(|c: char| !c.is_ascii_punctuation())
            .map_or(start, |i| i + chunk[i..].chars().next().map_or(1, char::len_utf8));
        tokens.extend(chunk[..start].chars().map(String::from));
        if start < end {
            tokens.push(chunk[start..end].to_string());
        }
        tokens.extend(chunk[end.max(start)..].chars().map(String::from));
    }
    Ok(TokenSequence::new(tokens))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).unwrap().into_inner()
    }

    #[test]
    fn sentence_with_punctuation() {
        assert_eq!(
            toks("This time, the firms were ready."),
            vec!["this", "time", ",", "the", "firms", "were", "ready", "."]
        );
    }

    #[test]
    fn single_word() {
        assert_eq!(toks("ready"), vec!["ready"]);
    }

    #[test]
    fn blank_is_rejected() {
        assert!(matches!(tokenize("   "), Err(Error::InvalidArgument(_))));
        assert!(tokenize("").is_err());
    }

    #[test]
    fn leading_trailing_and_inner_punctuation() {
        assert_eq!(toks("\"Hello!!\""), vec!["\"", "hello", "!", "!", "\""]);
        assert_eq!(toks("U.S. rates"), vec!["u.s", ".", "rates"]);
        assert_eq!(toks("--"), vec!["-", "-"]);
        assert_eq!(toks("(Ünïcode)"), vec!["(", "ünïcode", ")"]);
    }

    #[test]
    fn case_can_be_kept() {
        let t = tokenize_with("The Firms", TokenizerOptions { lowercase: false }).unwrap();
        assert_eq!(t.into_inner(), vec!["The", "Firms"]);
    }
}
