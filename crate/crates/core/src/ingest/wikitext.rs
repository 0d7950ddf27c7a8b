//! Wikitext handling: markup stripping and extraction of category tags and
//! inline inter-language links.

/// Elements whose whole content is dropped.
const DROPPED_BLOCKS: &[&str] = &[
    "ref",
    "math",
    "gallery",
    "timeline",
    "score",
    "syntaxhighlight",
    "source",
    "imagemap",
    "chem",
];

/// Namespaces whose links are removed entirely (media and files), in
/// lowercase. Category links are handled separately.
const MEDIA_PREFIXES: &[&str] = &[
    "file", "image", "media", "fichier", "archivo", "imagen", "datei", "bild", "fitxer",
    "fitxategi", "irudi", "fișier", "imagine", "αρχείο", "εικόνα", "ملف", "صورة", "imatge",
];

/// Interwiki prefixes that look like language codes but are not editions.
const NON_LANGUAGE_PREFIXES: &[&str] = &["wikt", "meta", "mw", "w", "s", "q", "n", "b", "v", "d", "c"];

/// A link found in wikitext: `[[target|anchor]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WikiLink<'a> {
    pub target: &'a str,
    pub parts: Vec<&'a str>,
}

/// What a page's wikitext declares about its links.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct PageLinks {
    /// Category titles, namespace prefix stripped, in order of appearance.
    pub categories: Vec<String>,
    /// Inline inter-language links `(lang, title)` in order of appearance.
    pub langlinks: Vec<(String, String)>,
}

/// Namespace context needed to classify links.
#[derive(Debug, Clone)]
pub struct LinkContext {
    /// Lowercased category namespace names (localized and canonical).
    pub category_prefixes: Vec<String>,
    /// Lowercased edition codes recognized as inter-language prefixes.
    pub language_codes: Vec<String>,
    pub own_lang: String,
}

impl LinkContext {
    fn category_name<'a>(&self, target: &'a str) -> Option<&'a str> {
        let (prefix, rest) = target.split_once(':')?;
        let prefix = prefix.trim().to_lowercase();
        self.category_prefixes
            .contains(&prefix)
            .then(|| rest.trim())
    }

    fn language_of<'a>(&self, target: &'a str) -> Option<(String, &'a str)> {
        let (prefix, rest) = target.split_once(':')?;
        let prefix = prefix.trim().to_lowercase();
        if prefix == self.own_lang
            || NON_LANGUAGE_PREFIXES.contains(&prefix.as_str())
            || !self.language_codes.contains(&prefix)
        {
            return None;
        }
        Some((prefix, rest.trim()))
    }

    fn is_media(&self, target: &str) -> bool {
        match target.split_once(':') {
            Some((prefix, _)) => {
                let p = prefix.trim().to_lowercase();
                MEDIA_PREFIXES.contains(&p.as_str())
            }
            None => false,
        }
    }
}

/// Normalizes a page title the way MediaWiki does for lookups: underscores
/// become spaces, whitespace runs collapse and the first letter is
/// uppercased.
pub fn normalize_title(title: &str) -> String {
    let collapsed = title
        .replace('_', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn remove_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("<!--") {
        out.push_str(&rest[..start]);
        match rest[start + 4..].find("-->") {
            Some(end) => rest = &rest[start + 4 + end + 3..],
            None => {
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

/// Finds the index just past the `close` that balances an `open` at `start`.
fn matching_close(text: &str, start: usize, open: &str, close: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut i = start;
    while i < bytes.len() {
        if bytes[i..].starts_with(open.as_bytes()) {
            depth += 1;
            i += open.len();
        } else if bytes[i..].starts_with(close.as_bytes()) {
            depth -= 1;
            i += close.len();
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += 1;
        }
    }
    None
}

/// Removes balanced `open ... close` spans (templates, tables). An unbalanced
/// opener swallows the remainder of the text.
fn remove_nested(text: &str, open: &str, close: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while let Some(off) = text[i..].find(open) {
        let start = i + off;
        out.push_str(&text[i..start]);
        match matching_close(text, start, open, close) {
            Some(end) => i = end,
            None => return out,
        }
    }
    out.push_str(&text[i..]);
    out
}

fn remove_tag_blocks(text: &str) -> String {
    let mut out = text.to_string();
    for tag in DROPPED_BLOCKS {
        out = remove_tag_block(&out, tag);
    }
    out
}

fn remove_tag_block(text: &str, tag: &str) -> String {
    let lower = text.to_ascii_lowercase();
    let open = format!("<{tag}");
    let close = format!("</{tag}>");
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while let Some(off) = lower[i..].find(&open) {
        let start = i + off;
        // Require a tag boundary so that <refs> or <reference> are not hit.
        let after = lower[start + open.len()..].chars().next();
        if !matches!(after, Some('>') | Some(' ') | Some('/') | Some('\t') | Some('\n')) {
            out.push_str(&text[i..start + open.len()]);
            i = start + open.len();
            continue;
        }
        out.push_str(&text[i..start]);
        let Some(gt) = lower[start..].find('>') else {
            return out;
        };
        let tag_end = start + gt;
        if lower[..tag_end].ends_with('/') {
            i = tag_end + 1;
            continue;
        }
        match lower[tag_end..].find(&close) {
            Some(c) => i = tag_end + c + close.len(),
            None => return out,
        }
    }
    out.push_str(&text[i..]);
    out
}

fn remove_html_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((_, c)) = chars.next() {
        if c == '<' {
            let looks_like_tag = matches!(chars.peek(), Some((_, n)) if n.is_ascii_alphabetic() || *n == '/' || *n == '!');
            if looks_like_tag {
                for (_, d) in chars.by_ref() {
                    if d == '>' {
                        break;
                    }
                }
                continue;
            }
        }
        out.push(c);
    }
    out
}

/// Splits link content at top-level `|`, ignoring pipes in nested links.
fn split_parts(inner: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut last = 0;
    let mut i = 0;
    while i < inner.len() {
        let rest = &inner[i..];
        if rest.starts_with("[[") {
            depth += 1;
            i += 2;
        } else if rest.starts_with("]]") {
            depth = depth.saturating_sub(1);
            i += 2;
        } else if rest.starts_with('|') && depth == 0 {
            parts.push(&inner[last..i]);
            i += 1;
            last = i;
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    parts.push(&inner[last..]);
    parts
}

/// Iterates over top-level `[[...]]` links.
pub fn links(text: &str) -> Vec<WikiLink<'_>> {
    let mut found = Vec::new();
    let mut i = 0;
    while let Some(off) = text[i..].find("[[") {
        let start = i + off;
        match matching_close(text, start, "[[", "]]") {
            Some(end) => {
                let inner = &text[start + 2..end - 2];
                let parts = split_parts(inner);
                found.push(WikiLink {
                    target: parts[0].trim(),
                    parts,
                });
                i = end;
            }
            None => break,
        }
    }
    found
}

/// Category tags and inline inter-language links of a page.
pub fn extract_links(text: &str, ctx: &LinkContext) -> PageLinks {
    let text = remove_comments(text);
    let mut out = PageLinks::default();
    for link in links(&text) {
        let target = link.target;
        if target.starts_with(':') {
            continue;
        }
        if let Some(name) = ctx.category_name(target) {
            let name = normalize_title(name);
            if !name.is_empty() && !out.categories.contains(&name) {
                out.categories.push(name);
            }
        } else if let Some((lang, title)) = ctx.language_of(target) {
            if !title.is_empty() {
                out.langlinks.push((lang, title.to_string()));
            }
        }
    }
    out
}

fn replace_links(text: &str, ctx: &LinkContext) -> String {
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while let Some(off) = text[i..].find("[[") {
        let start = i + off;
        out.push_str(&text[i..start]);
        let Some(end) = matching_close(text, start, "[[", "]]") else {
            out.push_str(&text[start..]);
            return out;
        };
        let inner = &text[start + 2..end - 2];
        let parts = split_parts(inner);
        let target = parts[0].trim();
        let hidden = !target.starts_with(':')
            && (ctx.category_name(target).is_some()
                || ctx.language_of(target).is_some()
                || ctx.is_media(target));
        if !hidden {
            let anchor = if parts.len() > 1 {
                parts[parts.len() - 1]
            } else {
                target.trim_start_matches(':')
            };
            out.push_str(&replace_links(anchor, ctx));
        }
        i = end;
    }
    out.push_str(&text[i..]);
    out
}

fn replace_external_links(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while let Some(off) = text[i..].find('[') {
        let start = i + off;
        out.push_str(&text[i..start]);
        let rest = &text[start + 1..];
        let is_url = rest.starts_with("http://")
            || rest.starts_with("https://")
            || rest.starts_with("//")
            || rest.starts_with("ftp://");
        if is_url {
            if let Some(close) = rest.find(']') {
                let inner = &rest[..close];
                if let Some((_, anchor)) = inner.split_once(' ') {
                    out.push_str(anchor.trim());
                }
                i = start + 1 + close + 1;
                continue;
            }
        }
        out.push('[');
        i = start + 1;
    }
    out.push_str(&text[i..]);
    out
}

fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while let Some(off) = text[i..].find('&') {
        let start = i + off;
        out.push_str(&text[i..start]);
        let rest = &text[start + 1..];
        let decoded = rest.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let name = &rest[..semi];
            let ch = match name {
                "nbsp" | "ensp" | "emsp" | "thinsp" => Some(' '),
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "ndash" => Some('–'),
                "mdash" => Some('—'),
                _ => name.strip_prefix('#').and_then(|num| {
                    let code = match num.strip_prefix(['x', 'X']) {
                        Some(hex) => u32::from_str_radix(hex, 16).ok(),
                        None => num.parse().ok(),
                    };
                    code.and_then(char::from_u32)
                }),
            };
            ch.map(|c| (c, semi))
        });
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                i = start + 1 + semi + 1;
            }
            None => {
                out.push('&');
                i = start + 1;
            }
        }
    }
    out.push_str(&text[i..]);
    out
}

fn clean_line(line: &str) -> &str {
    let line = line.trim();
    let line = line.trim_start_matches(['*', '#', ':', ';']);
    let line = line.trim_matches('=');
    line.trim()
}

/// Plain running text of a wikitext body. Templates, tables, references,
/// media and category links are removed; link anchors are kept.
pub fn strip_markup(text: &str, ctx: &LinkContext) -> String {
    let text = remove_comments(text);
    let text = remove_tag_blocks(&text);
    let text = remove_nested(&text, "{{", "}}");
    let text = remove_nested(&text, "{|", "|}");
    let text = replace_links(&text, ctx);
    let text = replace_external_links(&text);
    let text = remove_html_tags(&text);
    let text = text.replace("'''", "").replace("''", "");
    let text = decode_entities(&text);
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        if line.trim_start().starts_with("----") || line.trim_start().starts_with("__") {
            continue;
        }
        let cleaned = clean_line(line);
        if cleaned.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        let collapsed = cleaned.split_whitespace().collect::<Vec<_>>().join(" ");
        out.push_str(&collapsed);
    }
    out
}

/// `#REDIRECT`-style marker at the beginning of the body.
pub fn has_redirect_marker(body: &str, markers: &[String]) -> bool {
    let head: String = body.trim_start().chars().take(64).collect::<String>().to_lowercase();
    markers.iter().any(|m| head.starts_with(m.as_str()))
}

/// Template invocation `{{name}}` / `{{name|...}}` anywhere in the body.
pub fn has_template(body: &str, names: &[String]) -> bool {
    let lower = body.to_lowercase();
    let mut i = 0;
    while let Some(off) = lower[i..].find("{{") {
        let start = i + off + 2;
        let rest = lower[start..].trim_start();
        for name in names {
            if let Some(after) = rest.strip_prefix(name.as_str()) {
                if after.starts_with("}}") || after.starts_with('|') || after.starts_with(char::is_whitespace) {
                    return true;
                }
            }
        }
        i = start;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> LinkContext {
        LinkContext {
            category_prefixes: vec!["category".into()],
            language_codes: vec!["fr".into(), "es".into(), "en".into()],
            own_lang: "en".into(),
        }
    }

    #[test]
    fn strips_templates_refs_tables_and_keeps_anchors() {
        let text = "{{Infobox star|name=Sun}}\nThe '''Sun''' is a [[star]] at the centre of the [[Solar System|solar system]].<ref>{{cite web|url=x}}</ref>\n{| class=\"wikitable\"\n| a || b\n|}\n== Orbit ==\nIt has [[File:Sun.jpg|thumb|A [[photo]] here]] planets.\n[[Category:Stars]]\n[[fr:Soleil]]";
        let plain = strip_markup(text, &ctx());
        assert_eq!(
            plain,
            "The Sun is a star at the centre of the solar system.\nOrbit\nIt has planets."
        );
    }

    #[test]
    fn nested_templates_removed() {
        let text = "a {{outer|{{inner|x}}|y}} b";
        assert_eq!(strip_markup(text, &ctx()), "a b");
    }

    #[test]
    fn external_links_keep_label() {
        let text = "see [https://example.org the site] and [http://bare.org]";
        assert_eq!(strip_markup(text, &ctx()), "see the site and");
    }

    #[test]
    fn entities_and_html() {
        let text = "5&nbsp;km <small>wide</small> &amp; &#x41;";
        assert_eq!(strip_markup(text, &ctx()), "5 km wide & A");
    }

    #[test]
    fn comments_removed() {
        assert_eq!(strip_markup("a <!-- hidden [[Category:X]] --> b", &ctx()), "a b");
        let links = extract_links("a <!-- [[Category:Hidden]] --> [[Category:Shown|key]]", &ctx());
        assert_eq!(links.categories, vec!["Shown"]);
    }

    #[test]
    fn categories_and_langlinks_extracted() {
        let text = "[[Category:Planetary_science]] [[category:stars]] [[:Category:Visible]] [[fr:Étoile]] [[en:Self]] [[wikt:star]]";
        let links = extract_links(text, &ctx());
        assert_eq!(links.categories, vec!["Planetary science", "Stars"]);
        assert_eq!(links.langlinks, vec![("fr".to_string(), "Étoile".to_string())]);
    }

    #[test]
    fn redirect_and_template_detection() {
        let markers = vec!["#redirect".to_string()];
        assert!(has_redirect_marker("  #REDIRECT [[Sun]]", &markers));
        assert!(!has_redirect_marker("The redirect", &markers));
        let names = vec!["disambig".to_string()];
        assert!(has_template("x {{Disambig}} y", &names));
        assert!(has_template("x {{ disambig|geo}} y", &names));
        assert!(!has_template("x {{disambiguation needed}} y", &names));
    }

    #[test]
    fn title_normalization() {
        assert_eq!(normalize_title("geometric_measurement"), "Geometric measurement");
        assert_eq!(normalize_title("  Space  "), "Space");
        assert_eq!(normalize_title("évolution"), "Évolution");
    }

    #[test]
    fn unbalanced_markup_does_not_panic() {
        let ctx = ctx();
        for t in ["{{open", "[[open", "<ref>open", "{| open", "[http://x", "&#xZZ;", "<!-- open"] {
            let _ = strip_markup(t, &ctx);
            let _ = extract_links(t, &ctx);
        }
    }
}
