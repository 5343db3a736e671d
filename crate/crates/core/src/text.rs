//! Character classes shared by segmentation, extraction and context features.

/// Characters that terminate a sentence.
pub fn is_sentence_delimiter(c: char) -> bool {
    matches!(c, '。' | '！' | '？' | '；' | '\n')
}

/// Sentence punctuation proper (newline excluded). A document with none of
/// these falls back to fixed-length chunking.
pub fn is_sentence_punctuation(c: char) -> bool {
    matches!(c, '。' | '！' | '？' | '；')
}

/// Closing quotes and brackets attach to the sentence they follow.
pub fn is_closing_mark(c: char) -> bool {
    matches!(
        c,
        '」' | '』' | '”' | '’' | '）' | '〉' | '》' | '】' | '〕' | '〗' | '"' | '\'' | ')' | ']'
    )
}

/// Characters a pseudo-word may never contain: whitespace and punctuation.
pub fn is_break_char(c: char) -> bool {
    if c.is_whitespace() || c.is_control() || c.is_ascii_punctuation() {
        return true;
    }
    matches!(c as u32,
        0x2000..=0x206F   // general punctuation
        | 0x3000..=0x303F // CJK symbols and punctuation
        | 0xFE10..=0xFE1F // vertical forms
        | 0xFE30..=0xFE4F // CJK compatibility forms
        | 0xFF01..=0xFF0F
        | 0xFF1A..=0xFF20
        | 0xFF3B..=0xFF40
        | 0xFF5B..=0xFF65)
}

/// Han ideographs, used for the CJK-only character count.
pub fn is_cjk_ideograph(c: char) -> bool {
    matches!(c as u32,
        0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2EBEF
        | 0x2F800..=0x2FA1F
        | 0x30000..=0x3134F)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes() {
        assert!(is_sentence_delimiter('。'));
        assert!(is_sentence_delimiter('\n'));
        assert!(!is_sentence_delimiter('，'));
        assert!(is_break_char('，'));
        assert!(is_break_char('「'));
        assert!(is_break_char('“'));
        assert!(is_break_char(' '));
        assert!(!is_break_char('民'));
        assert!(is_cjk_ideograph('寶'));
        assert!(!is_cjk_ideograph('a'));
        assert!(!is_cjk_ideograph('。'));
    }
}
