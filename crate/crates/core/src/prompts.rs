//! Versioned prompt templates shipped with the crate.
//!
//! Placeholders are `{name}`; substitution is single-pass, so values that
//! happen to contain `{...}` are inserted verbatim.

pub const KEYWORDS: &str = include_str!("../prompts/keywords.v1.txt");
pub const SUMMARIZE: &str = include_str!("../prompts/summarize.v1.txt");
pub const TAG_INTENT: &str = include_str!("../prompts/tag_intent.v1.txt");
pub const TAG_CONTRIBUTION: &str = include_str!("../prompts/tag_contribution.v1.txt");
pub const SYNTHESIZE: &str = include_str!("../prompts/synthesize.v1.txt");

pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let name_len = after
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(after.len());
        let name = &after[..name_len];
        let closed = after[name_len..].starts_with('}');
        match vars.iter().find(|(k, _)| *k == name) {
            Some((_, value)) if closed && !name.is_empty() => {
                out.push_str(value);
                rest = &after[name_len + 1..];
            }
            _ => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}
