//! URL and path tokenization over rendered page text.
//!
//! Documentation pages mention URLs in prose, code samples, and tables.
//! Nothing guarantees clean delimiters, so the tokenizer scans for scheme
//! prefixes and extends over URL-legal characters, then trims the trailing
//! sentence punctuation that prose tends to glue onto a URL. Parameter
//! markers (`{}`, `[]`, `()`, `<>`) and `:`-prefixed names are legal inside
//! path segments because docs write templates like
//! `https://api.example.com/users/{id}` or `/users/:id/posts`.

/// Punctuation trimmed from the end of a token. A trailing `)` survives
/// when it closes a `(` opened inside the token itself (think Wikipedia
/// style `/wiki/Rust_(language)`).
const TRIM_CHARS: &[char] = &['.', ',', ';', ')', '"', '\''];

/// Characters that may appear anywhere in an absolute URL token. This is
/// the RFC 3986 repertoire plus the template marker characters.
fn is_url_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "-._~:/?#[]@!$&'()*+,;=%{}<>".contains(c)
}

/// Characters allowed inside a relative path segment. Deliberately
/// narrower than the absolute-URL set: the sub-delimiters `!$&'*+,;=` are
/// legal in URLs but in running prose they are almost always punctuation,
/// and relative mentions have no scheme prefix to anchor them.
fn is_rel_segment_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "-._~%{}[]()<>:@".contains(c)
}

/// A token found in text: byte offset of its first character plus the
/// trimmed token string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub start: usize,
    pub text: String,
}

/// Trim trailing sentence punctuation. Returns the new end (byte index
/// into `text` relative to `start`).
fn trim_trailing(token: &str) -> &str {
    let mut t = token;
    loop {
        let Some(last) = t.chars().next_back() else {
            return t;
        };
        if !TRIM_CHARS.contains(&last) {
            return t;
        }
        if last == ')' {
            let opens = t.matches('(').count();
            let closes = t.matches(')').count();
            if opens >= closes {
                // This `)` closes a parenthesis opened inside the token.
                return t;
            }
        }
        t = &t[..t.len() - last.len_utf8()];
    }
}

/// Find absolute `http(s)://` URL tokens in `text`.
///
/// A token starts at a scheme prefix not glued to a preceding word
/// character, extends over URL-legal characters, and is trimmed of
/// trailing punctuation. The result preserves the token exactly as it
/// appears (no case folding, no normalization).
pub(crate) fn find_absolute_urls(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let lower = text.to_ascii_lowercase();
    let mut search_from = 0;
    while let Some(rel) = lower[search_from..].find("http") {
        let start = search_from + rel;
        let rest = &lower[start..];
        let scheme_len = if rest.starts_with("https://") {
            8
        } else if rest.starts_with("http://") {
            7
        } else {
            search_from = start + 4;
            continue;
        };
        // Reject "xhttp://..." — the scheme must begin the token.
        if start > 0 {
            let prev = text[..start].chars().next_back().unwrap();
            if prev.is_ascii_alphanumeric() || prev == '.' || prev == '-' || prev == '+' {
                search_from = start + scheme_len;
                continue;
            }
        }
        let mut end = start + scheme_len;
        while end < bytes.len() {
            let c = text[end..].chars().next().unwrap();
            if is_url_char(c) {
                end += c.len_utf8();
            } else {
                break;
            }
        }
        let token = trim_trailing(&text[start..end]);
        if token.len() > scheme_len {
            out.push(Token {
                start,
                text: token.to_string(),
            });
        }
        search_from = end.max(start + scheme_len);
    }
    out
}

/// True when the token looks like an absolute URL we can use: a scheme,
/// then a nonempty hostname of ordinary host characters (markers in the
/// host make the token unusable — only path parameters are a thing).
pub(crate) fn is_plausible_url(token: &str) -> bool {
    let rest = match token
        .strip_prefix("https://")
        .or_else(|| token.strip_prefix("http://"))
    {
        Some(r) => r,
        None => {
            let lower = token.to_ascii_lowercase();
            if let Some(r) = lower
                .strip_prefix("https://")
                .or_else(|| lower.strip_prefix("http://"))
            {
                // Mixed-case scheme; validate against the lowercased view.
                let host_end = r.find(['/', '?', '#']).unwrap_or(r.len());
                return host_is_valid(&r[..host_end]);
            }
            return false;
        }
    };
    let host_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    host_is_valid(&rest[..host_end])
}

fn host_is_valid(host: &str) -> bool {
    // Strip a userinfo part if present; nobody documents one, but the
    // grammar allows it and we should not mistake it for the host.
    let host = host.rsplit('@').next().unwrap_or(host);
    let (name, port) = match host.rsplit_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (host, None),
    };
    if name.is_empty() || !name.contains(|c: char| c.is_ascii_alphanumeric()) {
        return false;
    }
    if !name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '-')
    {
        return false;
    }
    match port {
        Some(p) => !p.is_empty() && p.chars().all(|c| c.is_ascii_digit()),
        None => true,
    }
}

/// Find relative path mentions: a leading `/` not glued to a hostname or
/// a larger URL, followed by one or more segments. `/users/:id/posts` and
/// `/users/{id}` both qualify; `a/b`, `I/O`, and the path inside
/// `https://x.com/a` do not.
pub(crate) fn find_relative_paths(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut idx = 0;
    let len = text.len();
    while idx < len {
        let c = text[idx..].chars().next().unwrap();
        if c != '/' {
            idx += c.len_utf8();
            continue;
        }
        // The character before the slash decides whether this starts a
        // fresh path or sits inside a word, a fraction, or a full URL.
        if idx > 0 {
            let prev = text[..idx].chars().next_back().unwrap();
            if prev.is_ascii_alphanumeric() || "._-~:%/".contains(prev) {
                idx += 1;
                continue;
            }
        }
        // Extend over `/segment` repetitions.
        let mut end = idx;
        while let Some('/') = text[end..].chars().next() {
            let seg_start = end + 1;
            let mut seg_end = seg_start;
            while seg_end < len {
                let sc = text[seg_end..].chars().next().unwrap();
                if is_rel_segment_char(sc) {
                    seg_end += sc.len_utf8();
                } else {
                    break;
                }
            }
            if seg_end == seg_start {
                break;
            }
            end = seg_end;
        }
        if end == idx {
            idx += 1;
            continue;
        }
        let token = trim_trailing(&text[idx..end]);
        // At least one nonempty segment must survive trimming.
        if token.len() > 1 {
            out.push(Token {
                start: idx,
                text: token.to_string(),
            });
        }
        idx = end.max(idx + 1);
    }
    out
}
