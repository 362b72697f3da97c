//! Minimal HTML handling for post bodies: code-block removal, tag
//! stripping, and entity decoding.
//!
//! This is deliberately not a general HTML parser. Post bodies are small
//! fragments, and the pipeline only needs the prose between tags, so a
//! single scan with a few rules is enough. Malformed markup degrades to
//! plain-text treatment rather than erroring.

/// Remove the contents of `<code>…</code>` and `<pre>…</pre>` elements,
/// replacing each whole block with a single space.
///
/// Matching is case-insensitive and tolerates attributes in the opening
/// tag. A block ends at the first matching close tag; an unclosed block
/// swallows everything to the end of the input.
pub fn strip_code_blocks(html: &str) -> String {
    let lower = html.to_ascii_lowercase();
    let mut out = String::with_capacity(html.len());
    let mut pos = 0;
    while let Some((start, close_tag)) = next_code_opener(&lower, pos) {
        out.push_str(&html[pos..start]);
        out.push(' ');
        let Some(open_end) = find_from(&lower, start, ">") else {
            return out; // opener never terminated: treat rest as code
        };
        let Some(close_start) = find_from(&lower, open_end + 1, close_tag) else {
            return out; // no close tag: block runs to end of input
        };
        let Some(close_end) = find_from(&lower, close_start, ">") else {
            return out;
        };
        pos = close_end + 1;
    }
    out.push_str(&html[pos..]);
    out
}

/// Strip every remaining `<…>` tag (replaced by a space) and then decode
/// HTML entities in the surviving text. Decoded `<` and `>` are kept as
/// literal characters; a `<` with no closing `>` drops the remainder.
pub fn strip_tags_and_decode(html: &str) -> String {
    decode_entities(&strip_tags(html))
}

/// Earliest valid `<code` / `<pre` opener at or after `from`, together with
/// the close-tag pattern that ends it.
fn next_code_opener(lower: &str, from: usize) -> Option<(usize, &'static str)> {
    let code = find_opener(lower, from, "<code");
    let pre = find_opener(lower, from, "<pre");
    match (code, pre) {
        (None, None) => None,
        (Some(c), None) => Some((c, "</code")),
        (None, Some(p)) => Some((p, "</pre")),
        (Some(c), Some(p)) if c <= p => Some((c, "</code")),
        (Some(_), Some(p)) => Some((p, "</pre")),
    }
}

/// Find `tag` (e.g. "<code") at or after `from`, requiring the tag name to
/// end there: the next byte must be `>`, whitespace, `/`, or end of input,
/// so that `<coder>` or `<precision>` never match.
fn find_opener(lower: &str, from: usize, tag: &str) -> Option<usize> {
    let mut search = from;
    while let Some(i) = find_from(lower, search, tag) {
        match lower.as_bytes().get(i + tag.len()) {
            None | Some(b'>') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')
            | Some(b'/') => return Some(i),
            _ => search = i + 1,
        }
    }
    None
}

fn find_from(haystack: &str, from: usize, needle: &str) -> Option<usize> {
    haystack[from..].find(needle).map(|i| from + i)
}

fn strip_tags(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(i) = rest.find('<') {
        out.push_str(&rest[..i]);
        out.push(' ');
        match rest[i..].find('>') {
            Some(j) => rest = &rest[i + j + 1..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

fn decode_entities(text: &str) -> String {
    // Longest supported entity body ("thetasym"-class names are out of
    // scope; "frac12" and "#x10ffff" bound what we accept).
    const MAX_BODY: usize = 10;
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let body_end = rest[1..]
            .char_indices()
            .take(MAX_BODY + 1)
            .find(|(_, c)| *c == ';')
            .map(|(j, _)| 1 + j);
        match body_end.and_then(|end| decode_entity(&rest[1..end]).map(|ch| (ch, end))) {
            Some((ch, end)) => {
                out.push(ch);
                rest = &rest[end + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Decode the body of one `&…;` reference (without the delimiters).
/// Returns None for unknown names and invalid numeric references, which
/// the caller then leaves in the text verbatim.
fn decode_entity(body: &str) -> Option<char> {
    if let Some(num) = body.strip_prefix('#') {
        let value = if let Some(hex) = num.strip_prefix(['x', 'X']) {
            u32::from_str_radix(hex, 16).ok()?
        } else {
            num.parse::<u32>().ok()?
        };
        return char::from_u32(value);
    }
    let ch = match body {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{a0}',
        "iexcl" => '¡',
        "cent" => '¢',
        "pound" => '£',
        "curren" => '¤',
        "yen" => '¥',
        "brvbar" => '¦',
        "sect" => '§',
        "uml" => '¨',
        "copy" => '©',
        "ordf" => 'ª',
        "laquo" => '«',
        "not" => '¬',
        "shy" => '\u{ad}',
        "reg" => '®',
        "macr" => '¯',
        "deg" => '°',
        "plusmn" => '±',
        "sup2" => '²',
        "sup3" => '³',
        "acute" => '´',
        "micro" => 'µ',
        "para" => '¶',
        "middot" => '·',
        "cedil" => '¸',
        "sup1" => '¹',
        "ordm" => 'º',
        "raquo" => '»',
        "frac14" => '¼',
        "frac12" => '½',
        "frac34" => '¾',
        "iquest" => '¿',
        "Agrave" => 'À',
        "Aacute" => 'Á',
        "Acirc" => 'Â',
        "Atilde" => 'Ã',
        "Auml" => 'Ä',
        "Aring" => 'Å',
        "AElig" => 'Æ',
        "Ccedil" => 'Ç',
        "Egrave" => 'È',
        "Eacute" => 'É',
        "Ecirc" => 'Ê',
        "Euml" => 'Ë',
        "Igrave" => 'Ì',
        "Iacute" => 'Í',
        "Icirc" => 'Î',
        "Iuml" => 'Ï',
        "ETH" => 'Ð',
        "Ntilde" => 'Ñ',
        "Ograve" => 'Ò',
        "Oacute" => 'Ó',
        "Ocirc" => 'Ô',
        "Otilde" => 'Õ',
        "Ouml" => 'Ö',
        "times" => '×',
        "Oslash" => 'Ø',
        "Ugrave" => 'Ù',
        "Uacute" => 'Ú',
        "Ucirc" => 'Û',
        "Uuml" => 'Ü',
        "Yacute" => 'Ý',
        "THORN" => 'Þ',
        "szlig" => 'ß',
        "agrave" => 'à',
        "aacute" => 'á',
        "acirc" => 'â',
        "atilde" => 'ã',
        "auml" => 'ä',
        "aring" => 'å',
        "aelig" => 'æ',
        "ccedil" => 'ç',
        "egrave" => 'è',
        "eacute" => 'é',
        "ecirc" => 'ê',
        "euml" => 'ë',
        "igrave" => 'ì',
        "iacute" => 'í',
        "icirc" => 'î',
        "iuml" => 'ï',
        "eth" => 'ð',
        "ntilde" => 'ñ',
        "ograve" => 'ò',
        "oacute" => 'ó',
        "ocirc" => 'ô',
        "otilde" => 'õ',
        "ouml" => 'ö',
        "divide" => '÷',
        "oslash" => 'ø',
        "ugrave" => 'ù',
        "uacute" => 'ú',
        "ucirc" => 'û',
        "uuml" => 'ü',
        "yacute" => 'ý',
        "thorn" => 'þ',
        "yuml" => 'ÿ',
        "ndash" => '–',
        "mdash" => '—',
        "lsquo" => '\u{2018}',
        "rsquo" => '\u{2019}',
        "ldquo" => '\u{201c}',
        "rdquo" => '\u{201d}',
        "bull" => '•',
        "hellip" => '…',
        "prime" => '′',
        "Prime" => '″',
        "lsaquo" => '‹',
        "rsaquo" => '›',
        "oline" => '‾',
        "frasl" => '⁄',
        "euro" => '€',
        "trade" => '™',
        _ => return None,
    };
    Some(ch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_block_content_is_removed() {
        assert_eq!(strip_code_blocks("a <code>x=1</code> b"), "a   b");
    }

    #[test]
    fn pre_block_content_is_removed() {
        assert_eq!(strip_code_blocks("x<pre>int y;</pre>y"), "x y");
    }

    #[test]
    fn nested_code_inside_pre_goes_with_the_pre() {
        assert_eq!(strip_code_blocks("<pre>a<code>b</code>c</pre>d"), " d");
    }

    #[test]
    fn matching_is_case_insensitive() {
        assert_eq!(strip_code_blocks("<CODE>x</CoDe>ok"), " ok");
    }

    #[test]
    fn opening_tag_attributes_are_tolerated() {
        assert_eq!(strip_code_blocks("<code class=\"rust\">x</code>y"), " y");
    }

    #[test]
    fn unclosed_code_swallows_the_rest() {
        assert_eq!(strip_code_blocks("a<code>everything after"), "a ");
    }

    #[test]
    fn similar_tag_names_do_not_match() {
        assert_eq!(strip_code_blocks("<coded>x</coded>"), "<coded>x</coded>");
        assert_eq!(
            strip_code_blocks("<precision>5</precision>"),
            "<precision>5</precision>"
        );
    }

    #[test]
    fn block_ends_at_first_close_tag() {
        // A literal close tag inside the block ends it; the trailing real
        // close tag is left for the tag stripper.
        assert_eq!(strip_code_blocks("<code>a</code>b</code>"), " b</code>");
    }

    #[test]
    fn tags_become_spaces() {
        assert_eq!(strip_tags("<p>a</p><p>b</p>"), " a  b ");
    }

    #[test]
    fn unterminated_tag_drops_remainder() {
        assert_eq!(strip_tags("a<p b"), "a ");
    }

    #[test]
    fn named_entities_decode() {
        assert_eq!(decode_entities("a &amp; b"), "a & b");
        assert_eq!(decode_entities("&lt;b&gt;"), "<b>");
        assert_eq!(decode_entities("caf&eacute;"), "café");
    }

    #[test]
    fn numeric_entities_decode() {
        assert_eq!(decode_entities("&#65;&#x42;&#X43;"), "ABC");
    }

    #[test]
    fn unknown_or_malformed_entities_stay_verbatim() {
        assert_eq!(decode_entities("&bogus;"), "&bogus;");
        assert_eq!(decode_entities("a & b"), "a & b");
        assert_eq!(decode_entities("&amp"), "&amp");
        assert_eq!(decode_entities("&#xzz;"), "&#xzz;");
        assert_eq!(decode_entities("&#1114112;"), "&#1114112;");
    }

    #[test]
    fn decoded_brackets_are_not_restripped() {
        assert_eq!(strip_tags_and_decode("&lt;code&gt;"), "<code>");
    }

    #[test]
    fn tag_stripping_runs_before_decoding() {
        assert_eq!(strip_tags_and_decode("<b>x &amp; y</b>"), " x & y ");
    }
}
