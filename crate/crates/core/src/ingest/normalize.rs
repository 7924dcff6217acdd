//! Text clean-up applied when detections become entities.

use unicode_normalization::UnicodeNormalization;

/// Bullet glyphs rewritten to `"- "` at line starts.
pub const BULLET_GLYPHS: [char; 5] = ['•', '●', '▪', '‣', '·'];

/// Cleans heading text: strips control and replacement characters, collapses
/// runs of three or more identical punctuation marks to one, trims.
pub fn normalize_title(s: &str) -> String {
    let stripped: Vec<char> = s
        .chars()
        .filter(|c| !c.is_control() && *c != char::REPLACEMENT_CHARACTER)
        .collect();

    let mut out = String::with_capacity(stripped.len());
    let mut i = 0;
    while i < stripped.len() {
        let c = stripped[i];
        let mut run = 1;
        while i + run < stripped.len() && stripped[i + run] == c {
            run += 1;
        }
        let is_punct = c.is_ascii_punctuation() || is_unicode_punct(c);
        let keep = if is_punct && run >= 3 { 1 } else { run };
        out.extend(std::iter::repeat_n(c, keep));
        i += run;
    }
    out.trim().to_string()
}

fn is_unicode_punct(c: char) -> bool {
    matches!(c, '…' | '–' | '—' | '‘' | '’' | '“' | '”' | '¡' | '¿' | '«' | '»' | '·')
}

/// NFKC, bullet standardisation and horizontal whitespace collapse, line by line.
pub fn normalize_body(s: &str) -> String {
    let nfkc: String = s.nfkc().collect();
    let lines: Vec<String> = nfkc.split('\n').map(normalize_line).collect();
    lines.join("\n").trim().to_string()
}

fn normalize_line(line: &str) -> String {
    let mut collapsed = String::with_capacity(line.len());
    let mut in_space = false;
    for c in line.chars() {
        if c == ' ' || c == '\t' || c == '\r' || (c.is_whitespace() && c != '\n') {
            if !in_space {
                collapsed.push(' ');
            }
            in_space = true;
        } else {
            collapsed.push(c);
            in_space = false;
        }
    }
    let trimmed = collapsed.trim();
    match trimmed.chars().next() {
        Some(first) if BULLET_GLYPHS.contains(&first) => {
            let rest = trimmed[first.len_utf8()..].trim_start();
            format!("- {rest}").trim_end().to_string()
        }
        _ => trimmed.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn title_examples() {
        assert_eq!(normalize_title("Results!!!"), "Results!");
        assert_eq!(normalize_title("Title"), "Title");
        assert_eq!(normalize_title("  A\u{0007}B  "), "AB");
        assert_eq!(normalize_title("Intro\u{0000}duction!!"), "Introduction!!");
        assert_eq!(normalize_title("Wait.....what"), "Wait.what");
        assert_eq!(normalize_title("Bad\u{FFFD}char"), "Badchar");
    }

    #[test]
    fn body_examples() {
        assert_eq!(normalize_body("ﬁle"), "file");
        assert_eq!(normalize_body("• item"), "- item");
        assert_eq!(normalize_body("a   b"), "a b");
        assert_eq!(normalize_body("●first\n\t▪  second"), "- first\n- second");
        assert_eq!(normalize_body("line one\nline\ttwo"), "line one\nline two");
        // NFKC turns the no-break space into a plain space before collapsing.
        assert_eq!(normalize_body("a\u{00A0} b"), "a b");
    }

    proptest! {
        #[test]
        fn body_idempotent(s in "[a-z •●▪‣·\t\n!ﬁ\u{00A0}-]{0,40}") {
            let once = normalize_body(&s);
            prop_assert_eq!(normalize_body(&once), once);
        }

        #[test]
        fn title_idempotent(s in "[a-zA-Z !?.\u{0007}\u{0000}…-]{0,40}") {
            let once = normalize_title(&s);
            prop_assert_eq!(normalize_title(&once), once);
        }
    }
}
